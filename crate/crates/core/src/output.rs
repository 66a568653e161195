//! CSV tables. Numbers use `{:.16e}` (17 significant digits, round-trips any
//! `f64`), `.` as decimal separator, and `#`-prefixed header comment lines.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fiber::ScanTable;
use crate::fock::ModeGrid;
use crate::trial::TrialStateReport;

pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// Lines written as `# line` before the column header.
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable {
            comments: vec![],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidInput(format!(
                "row has {} fields, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|x| format_f64(*x)).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut comments = vec![];
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            match lines.next() {
                Some(l) if l.starts_with('#') => {
                    comments.push(l.trim_start_matches('#').trim_start().to_string())
                }
                Some(l) => break l,
                None => return Err(Error::InvalidInput("CSV has no header line".into())),
            }
        };
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut rows = vec![];
        for (n, l) in lines.enumerate() {
            let row = l
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| {
                        Error::InvalidInput(format!("row {}: bad number {f:?}: {e}", n + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::InvalidInput(format!(
                    "row {} has the wrong width",
                    n + 1
                )));
            }
            rows.push(row);
        }
        Ok(CsvTable {
            comments,
            columns,
            rows,
        })
    }
}

pub const SCAN_COLUMNS: [&str; 6] = [
    "alpha",
    "energy_numeric",
    "energy_expansion",
    "nf_expectation",
    "grid_err_estimate",
    "residual",
];

pub fn scan_csv(t: &ScanTable) -> CsvTable {
    let mut c = CsvTable::new(&SCAN_COLUMNS);
    for r in &t.rows {
        c.rows.push(vec![
            r.alpha,
            r.energy_numeric,
            r.energy_expansion,
            r.nf_expectation,
            r.grid_err_estimate,
            r.residual,
        ]);
    }
    c
}

pub const BINDING_COLUMNS: [&str; 6] = [
    "alpha",
    "lambda_star_sq",
    "upsilon_exact",
    "upsilon_asymptotic",
    "binding_estimate",
    "extracted_alpha3_coeff",
];

pub fn binding_csv(reports: &[TrialStateReport]) -> CsvTable {
    let mut c = CsvTable::new(&BINDING_COLUMNS);
    for r in reports {
        c.rows.push(vec![
            r.alpha,
            r.lambda_star_sq,
            r.upsilon_star_sq_exact,
            r.upsilon_star_sq_asymptotic,
            r.binding_estimate,
            r.extracted_alpha3_coeff,
        ]);
    }
    c
}

pub fn grid_csv(g: &ModeGrid) -> CsvTable {
    let mut c = CsvTable::new(&["k1", "k2", "k3", "weight", "lambda"]);
    for m in &g.modes {
        c.rows
            .push(vec![m.k[0], m.k[1], m.k[2], m.weight, m.lambda as f64]);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn render_and_parse() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.comments.push("tool 0.1.0".into());
        t.push(vec![0.1, -1e-300]).unwrap();
        t.push(vec![f64::NAN, 3.0]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let s = t.render();
        assert!(s.starts_with("# tool 0.1.0\na,b\n1.0000000000000001e-1,"));
        let back = CsvTable::parse(&s).unwrap();
        assert_eq!(back.comments, t.comments);
        assert_eq!(back.rows[0], t.rows[0]);
        assert!(back.rows[1][0].is_nan());
        assert_eq!(back.column("b").unwrap(), vec![-1e-300, 3.0]);
        assert!(CsvTable::parse("# only\n").is_err());
        assert!(CsvTable::parse("a,b\n1,x\n").is_err());
    }

    proptest! {
        #[test]
        fn numbers_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = format_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
