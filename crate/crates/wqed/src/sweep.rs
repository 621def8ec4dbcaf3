//! Parameter-space scans over the phase delay and the coherent-coupling
//! control, evaluating closed-form observables on a rectangular grid.
//!
//! Rows are produced in a fixed order — the phase axis outermost, the
//! coupling axis innermost — and every cell is a pure function of the grid
//! point, so a sweep renders to a byte-identical CSV no matter how the work
//! is scheduled across threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::one_photon::{r1_closed, RatioState};
use crate::params::{SystemParams, CLASSIFY_TOL};
use crate::report::{fmt_sig, CsvTable};
use crate::two_photon::{bunching_report, BunchingReport};

/// Evenly spaced closed interval. `count == 1` degenerates to `{start}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid endpoints must be finite, got [{start}, {stop}]"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidInput(
                "grid axis needs at least one point".to_string(),
            ));
        }
        if count == 1 && start != stop {
            return Err(Error::InvalidInput(format!(
                "a single-point axis needs start == stop, got [{start}, {stop}]"
            )));
        }
        Ok(GridAxis { start, stop, count })
    }

    pub fn single(x: f64) -> Result<Self> {
        GridAxis::new(x, x, 1)
    }

    pub fn value(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        if self.count == 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    /// Grid spacing (zero for a single-point axis).
    pub fn step(&self) -> f64 {
        if self.count == 1 {
            0.0
        } else {
            (self.stop - self.start) / (self.count - 1) as f64
        }
    }
}

/// One scannable observable; `column` gives its CSV header name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    R1FirstExcited,
    R1PsiLeft,
    R2Oracle,
    R2Printed,
    ProbRR,
    ProbLL,
    ProbRL,
    ProbLR,
    GammaPlus,
    GammaMinus,
    Delta,
    ConditionClass,
}

impl Quantity {
    pub const ALL: [Quantity; 12] = [
        Quantity::R1FirstExcited,
        Quantity::R1PsiLeft,
        Quantity::R2Oracle,
        Quantity::R2Printed,
        Quantity::ProbRR,
        Quantity::ProbLL,
        Quantity::ProbRL,
        Quantity::ProbLR,
        Quantity::GammaPlus,
        Quantity::GammaMinus,
        Quantity::Delta,
        Quantity::ConditionClass,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Quantity::R1FirstExcited => "r1_eg",
            Quantity::R1PsiLeft => "r1_psiL",
            Quantity::R2Oracle => "r2_oracle",
            Quantity::R2Printed => "r2_printed",
            Quantity::ProbRR => "P_RR",
            Quantity::ProbLL => "P_LL",
            Quantity::ProbRL => "P_RL",
            Quantity::ProbLR => "P_LR",
            Quantity::GammaPlus => "gamma_plus",
            Quantity::GammaMinus => "gamma_minus",
            Quantity::Delta => "delta",
            Quantity::ConditionClass => "condition_class",
        }
    }

    pub fn parse(name: &str) -> Result<Quantity> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.column() == name)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown sweep quantity {name:?}; known: {}",
                    Quantity::ALL.map(|q| q.column()).join(", ")
                ))
            })
    }

    fn needs_pairs(self) -> bool {
        matches!(
            self,
            Quantity::R2Oracle
                | Quantity::R2Printed
                | Quantity::ProbRR
                | Quantity::ProbLL
                | Quantity::ProbRL
                | Quantity::ProbLR
        )
    }
}

/// A sweep request: one emission rate, two grid axes, and the columns to
/// evaluate at every grid point.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub gamma: f64,
    pub theta: GridAxis,
    pub g_c: GridAxis,
    pub quantities: Vec<Quantity>,
}

impl SweepSpec {
    pub fn new(
        gamma: f64,
        theta: GridAxis,
        g_c: GridAxis,
        quantities: Vec<Quantity>,
    ) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        if quantities.is_empty() {
            return Err(Error::InvalidInput(
                "sweep needs at least one quantity".to_string(),
            ));
        }
        for (i, q) in quantities.iter().enumerate() {
            if quantities[..i].contains(q) {
                return Err(Error::InvalidInput(format!(
                    "duplicate sweep quantity {:?}",
                    q.column()
                )));
            }
        }
        Ok(SweepSpec {
            gamma,
            theta,
            g_c,
            quantities,
        })
    }
}

/// One evaluated cell: a number (rendered with the fixed float format) or a
/// short classification label.
#[derive(Clone, Debug, PartialEq)]
pub enum CellValue {
    Number(f64),
    Text(String),
}

impl CellValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            CellValue::Number(x) => Some(*x),
            CellValue::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            CellValue::Number(x) => fmt_sig(*x),
            CellValue::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub theta: f64,
    pub g_c: f64,
    pub cells: Vec<CellValue>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Phase-major: all couplings for the first phase value, then the next.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["theta".to_string(), "g_c".to_string()];
        h.extend(self.spec.quantities.iter().map(|q| q.column().to_string()));
        h
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut table = CsvTable::new(self.header());
        for row in &self.rows {
            let mut cells = vec![fmt_sig(row.theta), fmt_sig(row.g_c)];
            cells.extend(row.cells.iter().map(CellValue::render));
            table.push_row(cells);
        }
        table
    }

    fn column_index(&self, q: Quantity) -> Option<usize> {
        self.spec.quantities.iter().position(|&c| c == q)
    }

    /// All grid points whose value of `q` lies within `atol` of the global
    /// minimum, NaN cells excluded. Returns `(theta, g_c, value)` triples in
    /// row order.
    pub fn minima_cells(&self, q: Quantity, atol: f64) -> Vec<(f64, f64, f64)> {
        let Some(col) = self.column_index(q) else {
            return Vec::new();
        };
        let valid = || {
            self.rows.iter().filter_map(move |r| {
                let v = r.cells[col].as_number()?;
                (!v.is_nan()).then_some((r.theta, r.g_c, v))
            })
        };
        let Some(min) = valid().map(|(_, _, v)| v).reduce(f64::min) else {
            return Vec::new();
        };
        valid().filter(|&(_, _, v)| v <= min + atol).collect()
    }
}

fn evaluate_cell(q: Quantity, p: &SystemParams, pairs: Option<&BunchingReport>) -> CellValue {
    let rates = p.rates();
    let number = |x: f64| CellValue::Number(x);
    let pairs = |f: fn(&BunchingReport) -> f64| {
        number(f(pairs.expect("pair report computed when requested")))
    };
    match q {
        Quantity::R1FirstExcited => number(r1_closed(p, RatioState::FirstExcited).value),
        Quantity::R1PsiLeft => number(r1_closed(p, RatioState::PsiLeft).value),
        Quantity::R2Oracle => pairs(|r| r.r2.unwrap_or(f64::NAN)),
        Quantity::R2Printed => pairs(|r| r.r2_printed),
        Quantity::ProbRR => pairs(|r| r.p_rr),
        Quantity::ProbLL => pairs(|r| r.p_ll),
        Quantity::ProbRL => pairs(|r| r.p_rl),
        Quantity::ProbLR => pairs(|r| r.p_lr),
        Quantity::GammaPlus => number(rates.gamma_plus),
        Quantity::GammaMinus => number(rates.gamma_minus),
        Quantity::Delta => number(rates.delta),
        Quantity::ConditionClass => CellValue::Text(p.classify(CLASSIFY_TOL).to_string()),
    }
}

fn evaluate_row(spec: &SweepSpec, theta: f64, g_c: f64) -> Result<SweepRow> {
    let p = SystemParams::new(spec.gamma, theta, g_c)?;
    let pairs = if spec.quantities.iter().any(|q| q.needs_pairs()) {
        Some(bunching_report(&p)?)
    } else {
        None
    };
    let cells = spec
        .quantities
        .iter()
        .map(|&q| evaluate_cell(q, &p, pairs.as_ref()))
        .collect();
    Ok(SweepRow { theta, g_c, cells })
}

/// Evaluate the grid. Cells are computed in parallel but collected in axis
/// order, so the result (and its CSV rendering) is identical across runs.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let thetas = spec.theta.values();
    let gcs = spec.g_c.values();
    let n = thetas.len() * gcs.len();
    let rows: Result<Vec<SweepRow>> = (0..n)
        .into_par_iter()
        .map(|k| evaluate_row(spec, thetas[k / gcs.len()], gcs[k % gcs.len()]))
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        rows: rows?,
    })
}
