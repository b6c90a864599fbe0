use std::fs;
use std::path::{Path, PathBuf};

use crate::mesh::save_obj;
use crate::train::{RunReport, SelectionPolicy, StepRecord};

use super::MetricsError;

pub const CSV_HEADER: &str = "step,recon_loss,lap_loss,total_loss,mad";

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:?}"))
}

/// Config and run summary as `#` comments, then one row per logged step.
/// Floats use shortest round-trip notation.
pub fn report_csv(report: &RunReport) -> String {
    let mut out = String::new();
    for (key, value) in report.config.describe() {
        out.push_str(&format!("# {key}={value}\n"));
    }
    let init = &report.initial;
    out.push_str(&format!("# initial_recon_loss={:?}\n", init.recon_loss));
    out.push_str(&format!("# initial_lap_loss={:?}\n", init.lap_loss));
    out.push_str(&format!("# initial_total_loss={:?}\n", init.total_loss));
    out.push_str(&format!("# initial_mad={}\n", opt(init.mad)));
    out.push_str(&format!("# input_mad={}\n", opt(report.input_mad)));
    out.push_str(&format!(
        "# best_step={}\n",
        report.best_step.map_or(String::new(), |s| s.to_string())
    ));
    out.push_str(&format!("# steps_run={}\n", report.steps_run));
    out.push_str(&format!("# stopped_early={}\n", report.stopped_early));

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(CSV_HEADER.split(','))
        .expect("in-memory write");
    for r in &report.records {
        writer
            .write_record([
                r.step.to_string(),
                format!("{:?}", r.recon_loss),
                format!("{:?}", r.lap_loss),
                format!("{:?}", r.total_loss),
                opt(r.mad),
            ])
            .expect("in-memory write");
    }
    let body = writer.into_inner().expect("in-memory flush");
    out.push_str(std::str::from_utf8(&body).expect("ascii"));
    out
}

pub fn parse_report_csv(text: &str) -> Result<Vec<StepRecord>, MetricsError> {
    let csv_err = |e: csv::Error| MetricsError::Csv(e.to_string());
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(MetricsError::Csv(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64, MetricsError> {
            row[i]
                .parse::<f64>()
                .map_err(|e| MetricsError::Csv(format!("line {line}: {e}")))
        };
        let step = row[0]
            .parse::<usize>()
            .map_err(|e| MetricsError::Csv(format!("line {line}: {e}")))?;
        let mad = if row[4].is_empty() {
            None
        } else {
            Some(num(4)?)
        };
        records.push(StepRecord {
            step,
            recon_loss: num(1)?,
            lap_loss: num(2)?,
            total_loss: num(3)?,
            mad,
        });
    }
    Ok(records)
}

/// Writes the CSV report and the selected output mesh.
pub fn export_report_to(
    report: &RunReport,
    csv_path: &Path,
    obj_path: &Path,
    policy: SelectionPolicy,
) -> Result<(), MetricsError> {
    let mesh = report
        .output(policy)
        .map_err(|e| MetricsError::Report(e.to_string()))?;
    fs::write(csv_path, report_csv(report))?;
    fs::write(obj_path, save_obj(mesh))?;
    Ok(())
}

/// [`export_report_to`] with the mesh written next to the CSV as `.obj`.
pub fn export_report(
    report: &RunReport,
    csv_path: &Path,
    policy: SelectionPolicy,
) -> Result<PathBuf, MetricsError> {
    let obj_path = csv_path.with_extension("obj");
    export_report_to(report, csv_path, &obj_path, policy)?;
    Ok(obj_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::triangle;
    use crate::mesh::load_obj;
    use crate::train::TrainConfig;

    fn synthetic(steps: usize, interval: usize, with_mad: bool) -> RunReport {
        let records: Vec<StepRecord> = (1..=steps)
            .filter(|s| s % interval == 0)
            .map(|s| StepRecord {
                step: s,
                recon_loss: 1.0 / s as f64,
                lap_loss: 0.1 + 1e-17 * s as f64,
                total_loss: 1.0 / s as f64 + 0.02,
                mad: with_mad.then(|| 10.0 / (1.0 + s as f64).sqrt()),
            })
            .collect();
        RunReport {
            config: TrainConfig::denoise(),
            initial: records[0],
            best_step: with_mad.then(|| records.last().unwrap().step),
            records,
            input_mad: with_mad.then_some(12.5),
            best_output: with_mad.then(triangle),
            final_output: triangle(),
            base: None,
            steps_run: steps,
            stopped_early: false,
        }
    }

    #[test]
    fn row_count_and_header() {
        let csv = report_csv(&synthetic(4000, 10, true));
        let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], CSV_HEADER);
        assert_eq!(data.len(), 401);
    }

    #[test]
    fn round_trip_is_exact() {
        for with_mad in [true, false] {
            let report = synthetic(300, 7, with_mad);
            let parsed = parse_report_csv(&report_csv(&report)).unwrap();
            assert_eq!(parsed, report.records);
        }
    }

    #[test]
    fn blank_mad_without_ground_truth() {
        let csv = report_csv(&synthetic(20, 10, false));
        assert!(csv
            .lines()
            .any(|l| l.starts_with("10,") && l.ends_with(',')));
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(parse_report_csv("step,loss\n1,2\n").is_err());
        assert!(parse_report_csv(&format!("{CSV_HEADER}\nx,1,2,3,\n")).is_err());
    }

    #[test]
    fn export_writes_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let report = synthetic(50, 10, true);
        let csv_path = dir.path().join("run.csv");
        let obj = export_report(&report, &csv_path, SelectionPolicy::BestMad).unwrap();
        assert_eq!(obj, dir.path().join("run.obj"));
        let text = fs::read_to_string(&csv_path).unwrap();
        assert_eq!(parse_report_csv(&text).unwrap(), report.records);
        assert_eq!(
            load_obj(&fs::read_to_string(obj).unwrap()).unwrap(),
            triangle()
        );
        let missing = dir.path().join("no/such/dir/run.csv");
        assert!(matches!(
            export_report(&report, &missing, SelectionPolicy::Final),
            Err(MetricsError::Io(_))
        ));
        let no_gt = synthetic(50, 10, false);
        assert!(export_report(&no_gt, &csv_path, SelectionPolicy::BestMad).is_err());
    }
}
