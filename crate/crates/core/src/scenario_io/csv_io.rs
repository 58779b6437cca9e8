use crate::error::{Error, Result};
use crate::simulation::Trajectory;

/// Shortest decimal text that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Header plus one row per sample, `\n`-separated, no trailing newline.
pub fn write_trajectory_csv(t: &Trajectory) -> String {
    let mut lines = Vec::with_capacity(t.len() + 1);
    lines.push(t.header().join(","));
    for i in 0..t.len() {
        let row: Vec<String> = t.row(i).into_iter().map(fmt_num).collect();
        lines.push(row.join(","));
    }
    lines.join("\n")
}

/// A numeric CSV table as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_csv_table(text: &str) -> Result<CsvTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: {f:?} is not a number", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{simulate_modulated, Modulation};
    use crate::control::simulate_controlled;
    use crate::integrator::IntegratorSettings;
    use crate::model::{EconState, ModelParams};
    use crate::simulation::simulate_basic;
    use proptest::prelude::*;

    #[test]
    fn basic_format() {
        let tr = simulate_basic(
            &ModelParams::reference(),
            EconState::new(4.0, 1.0),
            1.0,
            &IntegratorSettings::default(),
            1.0,
        )
        .unwrap();
        let text = write_trajectory_csv(&tr);
        assert!(text.starts_with("t,K,E,Y,C,I_k,I_r\n0,4,1,"));
        assert_eq!(text.lines().count(), 3);
        assert!(!text.ends_with('\n'));
    }

    #[test]
    fn headers_per_kind() {
        let p = ModelParams::reference();
        let s = IntegratorSettings::default();
        let tr =
            simulate_controlled(&p, 0.47, EconState::new(4.0, 1.0), 0.1, 1.0, &s, 1.0).unwrap();
        assert!(write_trajectory_csv(&tr).starts_with("t,K,E,s_r,Y,C,I_k,I_r\n"));
        let tr = simulate_modulated(
            &p,
            &Modulation::new(0.5),
            EconState::new(4.0, 1.0),
            1.0,
            &s,
            1.0,
        )
        .unwrap();
        assert!(write_trajectory_csv(&tr).starts_with("t,K,E,x,y,z,Y,C,I_k,I_r\n"));
    }

    #[test]
    fn rereads_exactly() {
        let tr = simulate_basic(
            &ModelParams::reference(),
            EconState::new(1.0, 1.0),
            20.0,
            &IntegratorSettings::default(),
            0.7,
        )
        .unwrap();
        let table = read_csv_table(&write_trajectory_csv(&tr)).unwrap();
        assert_eq!(table.header, tr.header());
        for (i, row) in table.rows.iter().enumerate() {
            assert_eq!(row, &tr.row(i));
        }
        assert_eq!(table.column("Y").unwrap(), tr.output);
    }

    #[test]
    fn rejects_non_numbers() {
        assert!(matches!(read_csv_table("a,b\n1,x"), Err(Error::Parse(_))));
    }

    proptest! {
        #[test]
        fn number_format_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = fmt_num(v);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
