use crate::mesh::Mesh;

use super::{TrainConfig, TrainError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub recon_loss: f64,
    pub lap_loss: f64,
    pub total_loss: f64,
    pub mad: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionPolicy {
    BestMad,
    Final,
}

impl SelectionPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionPolicy::BestMad => "best_mad",
            SelectionPolicy::Final => "final",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: TrainConfig,
    /// Every `log_interval`-th step, plus the last step run; sorted by step.
    pub records: Vec<StepRecord>,
    /// Losses of the untrained network (step 1).
    pub initial: StepRecord,
    /// MAD of the training input against the ground truth.
    pub input_mad: Option<f64>,
    pub best_step: Option<usize>,
    pub best_output: Option<Mesh>,
    pub final_output: Mesh,
    /// Smoothed input the displacements are added to; `None` when positions
    /// are regressed directly.
    pub base: Option<Mesh>,
    pub steps_run: usize,
    pub stopped_early: bool,
}

impl RunReport {
    pub fn record_at(&self, step: usize) -> Option<&StepRecord> {
        self.records
            .binary_search_by_key(&step, |r| r.step)
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn last_record(&self) -> Option<&StepRecord> {
        self.records.last()
    }

    pub fn best_mad(&self) -> Option<f64> {
        self.best_step
            .and_then(|s| self.record_at(s))
            .and_then(|r| r.mad)
    }

    pub fn final_mad(&self) -> Option<f64> {
        self.last_record().and_then(|r| r.mad)
    }

    /// `recon(step) / recon(1)`.
    pub fn normalized_recon(&self, step: usize) -> Option<f64> {
        self.record_at(step)
            .map(|r| r.recon_loss / self.initial.recon_loss)
    }

    pub fn mad_series(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .filter_map(|r| r.mad.map(|m| (r.step, m)))
            .collect()
    }

    pub fn output(&self, policy: SelectionPolicy) -> Result<&Mesh, TrainError> {
        match policy {
            SelectionPolicy::Final => Ok(&self.final_output),
            SelectionPolicy::BestMad => {
                select_output_step(self, policy)?;
                self.best_output
                    .as_ref()
                    .ok_or(TrainError::MissingGroundTruth)
            }
        }
    }
}

/// Step whose output the policy picks. Ties go to the earliest step.
pub fn select_output_step(
    report: &RunReport,
    policy: SelectionPolicy,
) -> Result<usize, TrainError> {
    let last = report.records.last().ok_or(TrainError::EmptyReport)?;
    match policy {
        SelectionPolicy::Final => Ok(last.step),
        SelectionPolicy::BestMad => {
            let mut best: Option<(usize, f64)> = None;
            for r in &report.records {
                let mad = r.mad.ok_or(TrainError::MissingGroundTruth)?;
                if best.is_none_or(|(_, m)| mad < m) {
                    best = Some((r.step, mad));
                }
            }
            Ok(best.expect("non-empty").0)
        }
    }
}
