//! CSV artifacts. Floats are written with 17 significant digits so files
//! are byte-identical across runs of the same config.

use std::path::Path;

use nlheat::{DiagnosticsRecord, Field, Grid};
use std::sync::Arc;

use crate::error::CliError;

pub const TRACE_HEADER: [&str; 8] = ["t", "mass", "energy", "mu", "grad_l2", "nehari", "linf", "step_residual"];

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn trace_csv(trace: &[DiagnosticsRecord]) -> Vec<u8> {
    to_bytes(
        &TRACE_HEADER,
        trace.iter().map(|r| {
            [r.t, r.mass, r.energy, r.mu, r.grad_l2, r.nehari, r.linf, r.step_residual]
                .iter()
                .map(|&v| fmt_float(v))
                .collect()
        }),
    )
}

pub fn field_csv(field: &Field) -> Vec<u8> {
    to_bytes(
        &["coord", "value"],
        field
            .grid()
            .nodes()
            .iter()
            .zip(field.values())
            .map(|(x, v)| vec![fmt_float(*x), fmt_float(*v)]),
    )
}

pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    to_bytes(header, rows.iter().cloned())
}

/// Read a `coord,value` file onto `grid`. Coordinates must match the grid
/// nodes.
pub fn read_field(path: &Path, grid: &Arc<Grid>) -> Result<Field, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(CliError::csv(path))?;
    let header = reader.headers().map_err(CliError::csv(path))?.clone();
    if header.iter().collect::<Vec<_>>() != ["coord", "value"] {
        return Err(CliError::Usage(format!(
            "{}: expected header `coord,value`",
            path.display()
        )));
    }
    let mut values = Vec::with_capacity(grid.len());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(CliError::csv(path))?;
        let parse = |s: Option<&str>| s.and_then(|s| s.trim().parse::<f64>().ok());
        let (Some(x), Some(v)) = (parse(rec.get(0)), parse(rec.get(1))) else {
            return Err(CliError::Usage(format!("{}: row {} is not numeric", path.display(), i + 1)));
        };
        if let Some(&node) = grid.nodes().get(i) {
            if (x - node).abs() > 1e-9 * (1.0 + node.abs()) {
                return Err(CliError::Usage(format!(
                    "{}: row {} has coord {x}, grid node is {node}",
                    path.display(),
                    i + 1
                )));
            }
        }
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(CliError::Usage(format!(
            "{}: {} rows for a grid of {} nodes",
            path.display(),
            values.len(),
            grid.len()
        )));
    }
    Field::new(Arc::clone(grid), values).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlheat::DomainSpec;

    #[test]
    fn field_round_trip() {
        let grid = Grid::new(DomainSpec::interval(2.0).unwrap(), 17).unwrap();
        let f = Field::from_fn(grid.clone(), |x| x.sin() / 3.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, field_csv(&f)).unwrap();
        let back = read_field(&path, &grid).unwrap();
        assert_eq!(back.values(), f.values());
        let other = Grid::new(DomainSpec::interval(2.0).unwrap(), 18).unwrap();
        assert!(read_field(&path, &other).is_err());
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(-2.0), "-2.0000000000000000e0");
    }
}
