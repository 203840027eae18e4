use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::BoundedBox;
use crate::model_inputs::{Dataset, DgpSpec, RegressionSummary};

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_SWEEP_STEPS: [f64; 3] = [1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

/// Lower `R_max` bound of a box spec: a number or the intermediate R-squared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RmaxLow {
    Value(f64),
    RTilde,
}

/// `delta_low:delta_high:rmax_low:rmax_high`, where `rmax_low` may be `rtilde`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    pub delta_low: f64,
    pub delta_high: f64,
    pub rmax_low: RmaxLow,
    pub rmax_high: f64,
}

impl FromStr for BoxSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!("box `{s}` must have four colon-separated fields")));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Config(format!("box `{s}`: cannot parse `{t}`")));
        let rmax_low =
            if parts[2].eq_ignore_ascii_case("rtilde") { RmaxLow::RTilde } else { RmaxLow::Value(num(parts[2])?) };
        Ok(Self { delta_low: num(parts[0])?, delta_high: num(parts[1])?, rmax_low, rmax_high: num(parts[3])? })
    }
}

impl BoxSpec {
    pub fn resolve(&self, s: &RegressionSummary, step: f64) -> Result<BoundedBox> {
        let rmax_low = match self.rmax_low {
            RmaxLow::Value(v) => v,
            RmaxLow::RTilde => s.r2_int,
        };
        let b = BoundedBox::new(self.delta_low, self.delta_high, rmax_low, self.rmax_high, step)?;
        b.validate_for(s)?;
        Ok(b)
    }
}

/// Every option of every subcommand. Loaded from a JSON file and overlaid by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub outcome: Option<String>,
    pub treatment: Option<String>,
    pub controls: Option<Vec<String>>,
    pub summary_json: Option<PathBuf>,
    /// Inline summary statistics (config file only).
    pub summary: Option<RegressionSummary>,
    pub boxes: Vec<String>,
    pub step: Option<f64>,
    pub rmax: Vec<f64>,
    pub out_dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
    pub strict: bool,
    pub seed: Option<u64>,
    pub steps: Vec<f64>,
    pub dgp: Option<DgpSpec>,
}

impl RunConfig {
    pub fn from_json_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        macro_rules! take_opt {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        macro_rules! take_vec {
            ($($f:ident),*) => { $( if !flags.$f.is_empty() { self.$f = flags.$f; } )* };
        }
        take_opt!(input, outcome, treatment, controls, summary_json, summary, step, out_dir, seed, dgp);
        take_vec!(boxes, rmax, formats, steps);
        self.strict |= flags.strict;
        self
    }

    pub fn step(&self) -> f64 {
        self.step.unwrap_or(DEFAULT_STEP)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn formats(&self) -> Vec<OutputFormat> {
        if self.formats.is_empty() {
            vec![OutputFormat::Csv]
        } else {
            self.formats.clone()
        }
    }

    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats().contains(&f)
    }

    pub fn box_specs(&self) -> Result<Vec<BoxSpec>> {
        if self.boxes.is_empty() {
            return Err(Error::Config("at least one --box is required".into()));
        }
        self.boxes.iter().map(|b| b.parse()).collect()
    }

    pub fn require_rmax(&self) -> Result<&[f64]> {
        if self.rmax.is_empty() {
            return Err(Error::Config("--rmax is required; there is no default R_max".into()));
        }
        Ok(&self.rmax)
    }

    /// Load the dataset in raw-CSV mode.
    pub fn dataset(&self) -> Result<Dataset> {
        let path = self.input.as_ref().ok_or_else(|| Error::Config("--input is required".into()))?;
        let outcome = self.outcome.as_deref().ok_or_else(|| Error::Config("--outcome is required".into()))?;
        let treatment = self.treatment.as_deref().ok_or_else(|| Error::Config("--treatment is required".into()))?;
        Dataset::from_csv_path(path, outcome, treatment, self.controls.as_deref())
    }

    /// The regression summary from whichever single input mode is configured.
    pub fn resolve_summary(&self) -> Result<RegressionSummary> {
        let modes = [self.input.is_some(), self.summary_json.is_some(), self.summary.is_some()];
        match modes.iter().filter(|m| **m).count() {
            0 => return Err(Error::Config("no input: give --input or --summary-json".into())),
            1 => {}
            _ => return Err(Error::Config("give exactly one of --input, --summary-json, inline summary".into())),
        }
        if self.input.is_some() {
            return crate::model_inputs::summarize(&self.dataset()?);
        }
        let s = match (&self.summary_json, self.summary) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str::<RegressionSummary>(&text)?
            }
            (None, Some(s)) => s,
            (None, None) => unreachable!("input mode counted above"),
        };
        s.validate()?;
        Ok(s)
    }
}
