use std::io::Write;

use serde::{Deserialize, Serialize};

use super::lattice::BoundedBox;
use crate::cubic::RootSet;
use crate::error::Result;
use crate::fmt_machine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "URR")]
    Urr,
    #[serde(rename = "NURR")]
    Nurr,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::Urr => "URR",
            Region::Nurr => "NURR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseUsed {
    Case1,
    Case2,
    Case3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionSource {
    UniqueRoot,
    PropagatedFrom { i: usize, j: usize },
}

/// Lattice widening applied when the original box held no URR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extension {
    pub delta_low: f64,
    pub delta_high: f64,
    pub columns_low: usize,
    pub columns_high: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    /// Delta index in the (possibly extended) lattice.
    pub i: usize,
    pub j: usize,
    pub delta: f64,
    pub rmax: f64,
    pub region: Region,
    pub roots: RootSet,
    pub selected: f64,
    pub source: SelectionSource,
    /// 0 for URR cells, otherwise the propagation layer that resolved the cell.
    pub layer: usize,
    /// `false` where `b^2 ~ 3ac` and continuity selection is unreliable.
    pub multiplicity_ok: bool,
    pub ambiguous: bool,
    /// Delta was moved off the singular line `delta = 1`.
    pub shifted: bool,
    pub in_box: bool,
}

impl GridCell {
    pub fn is_flagged(&self) -> bool {
        self.ambiguous || !self.multiplicity_ok
    }

    fn flags(&self) -> String {
        let mut f = Vec::new();
        if !self.multiplicity_ok {
            f.push("multiplicity");
        }
        if self.ambiguous {
            f.push("ambiguous");
        }
        if self.shifted {
            f.push("shifted");
        }
        if !self.in_box {
            f.push("extension");
        }
        f.join(";")
    }
}

/// Discontinuity between neighbouring cells larger than the Lipschitz allowance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityWarning {
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub jump: f64,
    pub allowance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasField {
    pub bbox: BoundedBox,
    /// Columns in the lattice, including any extension.
    pub n_delta: usize,
    pub n_rmax: usize,
    /// Lattice column holding the box's `delta_low`.
    pub delta_offset: usize,
    /// Delta-major: `cells[i * n_rmax + j]`.
    pub cells: Vec<GridCell>,
    pub case_used: CaseUsed,
    pub extension: Option<Extension>,
}

impl BiasField {
    pub fn cell(&self, i: usize, j: usize) -> &GridCell {
        &self.cells[i * self.n_rmax + j]
    }

    pub fn in_box(&self) -> impl Iterator<Item = &GridCell> {
        self.cells.iter().filter(|c| c.in_box)
    }

    pub fn count_in_box(&self, region: super::Region) -> usize {
        self.in_box().filter(|c| c.region == region).count()
    }

    pub fn flagged_in_box(&self) -> usize {
        self.in_box().filter(|c| c.is_flagged()).count()
    }

    /// Largest URR finite-difference slope, times 10.
    pub fn lipschitz_allowance(&self) -> Option<f64> {
        let step = self.bbox.step;
        let mut worst: Option<f64> = None;
        for (a, b) in self.adjacent_pairs() {
            if a.region == Region::Urr && b.region == Region::Urr {
                let slope = (a.selected - b.selected).abs() / step;
                worst = Some(worst.map_or(slope, |w| w.max(slope)));
            }
        }
        worst.map(|w| 10.0 * w)
    }

    /// Adjacent clean cells whose selections jump by more than `L e`.
    pub fn continuity_warnings(&self) -> Vec<ContinuityWarning> {
        let Some(l) = self.lipschitz_allowance() else {
            return Vec::new();
        };
        let allowance = l * self.bbox.step;
        self.adjacent_pairs()
            .filter(|(a, b)| a.multiplicity_ok && b.multiplicity_ok)
            .filter_map(|(a, b)| {
                let jump = (a.selected - b.selected).abs();
                (jump > allowance).then_some(ContinuityWarning { from: (a.i, a.j), to: (b.i, b.j), jump, allowance })
            })
            .collect()
    }

    fn adjacent_pairs(&self) -> impl Iterator<Item = (&GridCell, &GridCell)> {
        self.cells.iter().flat_map(move |c| {
            let right = (c.i + 1 < self.n_delta).then(|| self.cell(c.i + 1, c.j));
            let up = (c.j + 1 < self.n_rmax).then(|| self.cell(c.i, c.j + 1));
            right.into_iter().chain(up).map(move |n| (c, n))
        })
    }

    /// Long format: one row per lattice point, extension cells included and flagged.
    pub fn write_long_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["delta", "rmax", "region", "root1", "root2", "root3", "selected", "flags"])?;
        for c in &self.cells {
            let root = |k: usize| c.roots.roots.get(k).map(|v| fmt_machine(*v)).unwrap_or_default();
            w.write_record([
                fmt_machine(c.delta),
                fmt_machine(c.rmax),
                c.region.label().to_string(),
                root(0),
                if c.roots.is_unique() { String::new() } else { root(1) },
                if c.roots.is_unique() { String::new() } else { root(2) },
                fmt_machine(c.selected),
                c.flags(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Matrix of selected roots over the box: one row per `R_max`, one column per delta.
    pub fn write_contour_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let cols: Vec<usize> = (self.delta_offset..self.delta_offset + self.bbox.n_delta()).collect();
        let mut header = vec!["rmax\\delta".to_string()];
        header.extend(cols.iter().map(|&i| fmt_machine(self.cell(i, 0).delta)));
        w.write_record(&header)?;
        for j in 0..self.n_rmax {
            let mut row = vec![fmt_machine(self.cell(cols[0], j).rmax)];
            row.extend(cols.iter().map(|&i| fmt_machine(self.cell(i, j).selected)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
