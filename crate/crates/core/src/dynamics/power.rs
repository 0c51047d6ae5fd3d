use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::track::{adiabatic_track, uniform_grid};
use super::EvolutionTrace;
use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::models::{Family, ModelSpec, Schedule};

/// Grid density of the adiabatic power scans.
pub const ISING_SCAN_POINTS: usize = 1001;

/// `Pbar(s) = d<H_ref>/ds` on the report grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    pub s: Vec<f64>,
    pub pbar: Vec<f64>,
    pub max: f64,
    pub s_at_max: f64,
}

impl PowerSeries {
    /// Trapezoid rule for `int Pbar ds`.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.s, &self.pbar)
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Central differences inside, one-sided at the ends.
pub fn power_series_from(s: &[f64], e_ref: &[f64]) -> Result<PowerSeries> {
    if s.len() != e_ref.len() {
        return Err(Error::Dimension {
            expected: s.len(),
            found: e_ref.len(),
        });
    }
    let m = s.len();
    if m < 3 {
        return Err(Error::InvalidInput(format!("power series needs >= 3 points, got {m}")));
    }
    let pbar: Vec<f64> = (0..m)
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(m - 1));
            (e_ref[hi] - e_ref[lo]) / (s[hi] - s[lo])
        })
        .collect();
    let (imax, max) = pbar
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    Ok(PowerSeries {
        s: s.to_vec(),
        s_at_max: s[imax],
        max,
        pbar,
    })
}

pub fn power_series(trace: &EvolutionTrace) -> Result<PowerSeries> {
    if trace.e_ref.len() != trace.s_grid.len() {
        return Err(Error::InvalidInput("trace has no reference energies attached".into()));
    }
    power_series_from(&trace.s_grid, &trace.e_ref)
}

/// `s,e_ref_over_Omega0,pbar,fidelity`.
pub fn trace_csv(trace: &EvolutionTrace, omega0: f64) -> Result<CsvTable> {
    let series = power_series(trace)?;
    let mut t = CsvTable::new(&["s", "e_ref_over_Omega0", "pbar", "fidelity"]);
    for i in 0..trace.s_grid.len() {
        let f = trace.fidelity_vs_adiabatic.get(i).copied().unwrap_or(f64::NAN);
        t.push(vec![
            trace.s_grid[i].into(),
            (trace.e_ref[i] / omega0).into(),
            (series.pbar[i] / omega0).into(),
            f.into(),
        ]);
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub n: usize,
    pub pbar_max: f64,
    pub s_at_max: f64,
    /// `int Pbar ds - (e_ref(1) - e_ref(0))`.
    pub bookkeeping_error: f64,
}

fn scan_family(family: Family, ns: &[usize]) -> Result<Vec<PowerRow>> {
    let grid = uniform_grid(ISING_SCAN_POINTS);
    let mut rows = ns
        .par_iter()
        .map(|&n| {
            if !(2..=16).contains(&n) {
                return Err(Error::InvalidInput(format!("power scan supports 2 <= n <= 16, got {n}")));
            }
            let spec = ModelSpec::new(family, n, Schedule::Oscillating);
            let track = adiabatic_track(&spec, &grid)?;
            let e_ref = track.reference_energies(&spec)?;
            let series = power_series_from(&grid, &e_ref)?;
            Ok(PowerRow {
                n,
                pbar_max: series.max,
                s_at_max: series.s_at_max,
                bookkeeping_error: series.integral() - (e_ref[e_ref.len() - 1] - e_ref[0]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}

/// Maximum normalized adiabatic power of the Ising battery, sorted by `n`.
pub fn ising_max_power_scan(ns: &[usize]) -> Result<Vec<PowerRow>> {
    scan_family(Family::Ising, ns)
}

/// Same scan for independent cells.
pub fn parallel_max_power_scan(ns: &[usize]) -> Result<Vec<PowerRow>> {
    scan_family(Family::Parallel, ns)
}

/// `n,pbar_max`.
pub fn power_scan_csv(rows: &[PowerRow]) -> CsvTable {
    let mut t = CsvTable::new(&["n", "pbar_max"]);
    for r in rows {
        t.push(vec![r.n.into(), r.pbar_max.into()]);
    }
    t
}
