//! CSV emission with deterministic row order.

use std::io::Write;
use std::path::Path;

use meanfield::bounds::BoundReport;

pub const BOUNDS_HEADER: [&str; 6] = ["target", "params", "lhs", "rhs", "margin", "pass"];

/// Writes `header` and `rows` to `path`, or to stdout when no path is given.
pub fn emit_csv(header: &[&str], rows: &[Vec<String>], path: Option<&Path>) -> Result<(), String> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header).map_err(|e| e.to_string())?;
    for r in rows {
        w.write_record(r).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

pub fn report_rows(reports: &[BoundReport], digits: usize) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.target.to_string(),
                r.params_string(),
                r.lhs.to_sci(digits),
                r.rhs.to_sci(digits),
                r.margin.to_sci(digits),
                r.pass.to_string(),
            ]
        })
        .collect()
}
