use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::models::{collective_potential, parallel_potential};
use crate::operator::{eigenvalues_hermitian, lanczos_lowest, LinearOperator, OperatorSum, DENSE_GROUND_STATE_MAX_DIM};

/// Largest allowed deviation between the closed-form and numerical ranges.
pub const ADVANTAGE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvantageMethod {
    ClosedForm,
    Numerical,
}

/// Driving-potential ranges of the parallel and collective batteries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub n: usize,
    pub v_parallel: f64,
    pub v_collective: f64,
    pub ratio: f64,
    pub method: AdvantageMethod,
}

/// Spectral range `max - min` of a Hermitian Pauli sum.
pub fn driving_potential_norm(v: &OperatorSum) -> Result<f64> {
    if !v.is_hermitian(1e-12) {
        return Err(Error::NotHermitian {
            deviation: v.hermiticity_defect(),
        });
    }
    if v.is_empty() {
        return Ok(0.0);
    }
    if v.dim() <= DENSE_GROUND_STATE_MAX_DIM {
        let values = eigenvalues_hermitian(&v.to_dense()?)?;
        return Ok(values[values.len() - 1] - values[0]);
    }
    let low = lanczos_lowest(v, None, 1)?.ritz[0].0;
    let high = -lanczos_lowest(&v.scale(-1.0), None, 1)?.ritz[0].0;
    Ok(high - low)
}

fn check_sites(n: usize) -> Result<()> {
    if !(2..=11).contains(&n) {
        return Err(Error::InvalidInput(format!("advantage ratio supports n in 2..=11, got {n}")));
    }
    Ok(())
}

/// `v_par = 2 n`, `v_col = 2 n` (n even) or `2 (n - 1)` (n odd), in units of `Omega_0`.
pub fn advantage_closed_form(n: usize) -> Result<AdvantageReport> {
    check_sites(n)?;
    let v_parallel = 2.0 * n as f64;
    let v_collective = if n % 2 == 0 { 2.0 * n as f64 } else { 2.0 * (n - 1) as f64 };
    Ok(AdvantageReport {
        n,
        v_parallel,
        v_collective,
        ratio: v_collective / v_parallel,
        method: AdvantageMethod::ClosedForm,
    })
}

/// Numerical ranges, checked against [`advantage_closed_form`].
pub fn advantage_ratio(n: usize) -> Result<AdvantageReport> {
    let closed = advantage_closed_form(n)?;
    let v_parallel = driving_potential_norm(&parallel_potential(n, 1.0))?;
    let v_collective = driving_potential_norm(&collective_potential(n, 1.0))?;
    let report = AdvantageReport {
        n,
        v_parallel,
        v_collective,
        ratio: v_collective / v_parallel,
        method: AdvantageMethod::Numerical,
    };
    let dev = (report.v_parallel - closed.v_parallel)
        .abs()
        .max((report.v_collective - closed.v_collective).abs())
        .max((report.ratio - closed.ratio).abs());
    if dev > ADVANTAGE_TOL {
        return Err(Error::Consistency(format!(
            "driving-potential range at n={n} deviates from the closed form by {dev:e}"
        )));
    }
    Ok(report)
}

pub fn advantage_table(ns: &[usize]) -> Result<Vec<AdvantageReport>> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter().map(advantage_ratio).collect()
}

/// `n,v_par,v_col,ratio`.
pub fn advantage_csv(rows: &[AdvantageReport]) -> CsvTable {
    let mut t = CsvTable::new(&["n", "v_par", "v_col", "ratio"]);
    for r in rows {
        t.push(vec![r.n.into(), r.v_parallel.into(), r.v_collective.into(), r.ratio.into()]);
    }
    t
}
