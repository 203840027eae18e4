use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Outcome, treatment and observed controls for one analysis.
///
/// Columns are stored column-major. Construction validates lengths, finiteness
/// and non-constancy; missing values are rejected rather than imputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    outcome: Vec<f64>,
    treatment: Vec<f64>,
    controls: Vec<Vec<f64>>,
    outcome_name: String,
    treatment_name: String,
    control_names: Vec<String>,
}

impl Dataset {
    pub fn new(outcome: Vec<f64>, treatment: Vec<f64>, controls: Vec<Vec<f64>>) -> Result<Self> {
        let names = (1..=controls.len()).map(|j| format!("w{j}")).collect();
        Self::with_names(outcome, treatment, controls, "y".into(), "x".into(), names)
    }

    pub fn with_names(
        outcome: Vec<f64>,
        treatment: Vec<f64>,
        controls: Vec<Vec<f64>>,
        outcome_name: String,
        treatment_name: String,
        control_names: Vec<String>,
    ) -> Result<Self> {
        let n = outcome.len();
        let j = controls.len();
        if j == 0 {
            return Err(Error::InvalidData("at least one control column is required".into()));
        }
        if control_names.len() != j {
            return Err(Error::InvalidData(format!("{} control names for {} control columns", control_names.len(), j)));
        }
        if n < j + 3 {
            return Err(Error::InsufficientData { rows: n, required: j + 3 });
        }
        check_column(&outcome_name, &outcome, n)?;
        check_column(&treatment_name, &treatment, n)?;
        for (name, col) in control_names.iter().zip(&controls) {
            check_column(name, col, n)?;
        }
        Ok(Self { outcome, treatment, controls, outcome_name, treatment_name, control_names })
    }

    /// Read a comma-delimited CSV with a header row.
    ///
    /// `controls = None` designates every column other than outcome and
    /// treatment as a control, in file order.
    pub fn from_csv_path(
        path: impl AsRef<Path>,
        outcome: &str,
        treatment: &str,
        controls: Option<&[String]>,
    ) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_csv_reader(file, outcome, treatment, controls)
    }

    pub fn from_csv_reader<R: Read>(
        reader: R,
        outcome: &str,
        treatment: &str,
        controls: Option<&[String]>,
    ) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let find =
            |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn(name.to_string()));
        let y_idx = find(outcome)?;
        let x_idx = find(treatment)?;
        let control_idx: Vec<usize> = match controls {
            Some(names) => names.iter().map(|c| find(c)).collect::<Result<_>>()?,
            None => (0..headers.len()).filter(|&i| i != y_idx && i != x_idx).collect(),
        };
        if control_idx.contains(&y_idx) || control_idx.contains(&x_idx) {
            return Err(Error::InvalidData("outcome/treatment column also designated as a control".into()));
        }

        let mut y = Vec::new();
        let mut x = Vec::new();
        let mut w: Vec<Vec<f64>> = vec![Vec::new(); control_idx.len()];
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            // header is line 1
            let line = row + 2;
            let field = |idx: usize| -> Result<f64> {
                let raw = record.get(idx).unwrap_or("").trim();
                if raw.is_empty() || raw.eq_ignore_ascii_case("na") {
                    return Err(Error::InvalidData(format!("line {line}: missing value in column `{}`", headers[idx])));
                }
                raw.parse::<f64>().map_err(|_| {
                    Error::InvalidData(format!("line {line}: cannot parse `{raw}` in column `{}`", headers[idx]))
                })
            };
            y.push(field(y_idx)?);
            x.push(field(x_idx)?);
            for (k, &idx) in control_idx.iter().enumerate() {
                w[k].push(field(idx)?);
            }
        }
        Self::with_names(
            y,
            x,
            w,
            headers[y_idx].clone(),
            headers[x_idx].clone(),
            control_idx.iter().map(|&i| headers[i].clone()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.outcome.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcome.is_empty()
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn outcome(&self) -> &[f64] {
        &self.outcome
    }

    pub fn treatment(&self) -> &[f64] {
        &self.treatment
    }

    pub fn controls(&self) -> &[Vec<f64>] {
        &self.controls
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn treatment_name(&self) -> &str {
        &self.treatment_name
    }

    pub fn control_names(&self) -> &[String] {
        &self.control_names
    }

    /// Multiply the outcome column by `k`.
    pub fn scale_outcome(&self, k: f64) -> Result<Self> {
        Self::with_names(
            self.outcome.iter().map(|v| v * k).collect(),
            self.treatment.clone(),
            self.controls.clone(),
            self.outcome_name.clone(),
            self.treatment_name.clone(),
            self.control_names.clone(),
        )
    }

    /// Write the dataset as CSV (outcome, treatment, controls) with 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec![self.outcome_name.clone(), self.treatment_name.clone()];
        header.extend(self.control_names.iter().cloned());
        wtr.write_record(&header)?;
        let mut row = Vec::with_capacity(header.len());
        for i in 0..self.len() {
            row.clear();
            row.push(crate::fmt_machine(self.outcome[i]));
            row.push(crate::fmt_machine(self.treatment[i]));
            for col in &self.controls {
                row.push(crate::fmt_machine(col[i]));
            }
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn check_column(name: &str, col: &[f64], n: usize) -> Result<()> {
    if col.len() != n {
        return Err(Error::InvalidData(format!("column `{name}` has {} values, expected {n}", col.len())));
    }
    if let Some(pos) = col.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidData(format!("column `{name}` has a non-finite value at row {}", pos + 1)));
    }
    let first = col[0];
    if col.iter().all(|&v| v == first) {
        return Err(Error::InvalidData(format!("column `{name}` is constant")));
    }
    Ok(())
}
