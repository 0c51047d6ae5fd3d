use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dynamics::uniform_grid;
use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::models::h_ising;
use crate::operator::{
    eigenvalues_hermitian, ground_state, lanczos_lowest, DenseOperator, LinearOperator, DEGENERACY_TOL,
    DENSE_GROUND_STATE_MAX_DIM,
};

/// Smallest accepted probe grid.
pub const MIN_PROBE_POINTS: usize = 201;

/// Ground energy of the Ising battery at one `lambda`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapProbeRow {
    pub lambda: f64,
    /// `E_0 / Omega_0`.
    pub e0: f64,
    /// `d^2 E_0 / d lambda^2`; absent at the ends and on degenerate rows.
    pub d2e0: Option<f64>,
    pub gap: f64,
    pub degenerate: bool,
}

/// `H + shift |v><v|`.
struct Deflated<'a, M: ?Sized> {
    inner: &'a M,
    v: &'a [C64],
    shift: f64,
}

impl<M: LinearOperator + ?Sized> LinearOperator for Deflated<'_, M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, input: &[C64], output: &mut [C64]) {
        self.inner.apply(input, output);
        let c: C64 = self.v.iter().zip(input).map(|(a, b)| a.conj() * b).sum::<C64>() * self.shift;
        output.iter_mut().zip(self.v).for_each(|(o, v)| *o += c * v);
    }

    fn to_dense(&self) -> Result<DenseOperator> {
        let mut d = self.inner.to_dense()?;
        for i in 0..d.dim() {
            for j in 0..d.dim() {
                d.set(i, j, d.get(i, j) + self.shift * self.v[i] * self.v[j].conj());
            }
        }
        Ok(d)
    }
}

/// `(E_0, E_1 - E_0)` counting multiplicity.
fn lowest_pair<M: LinearOperator + ?Sized>(m: &M) -> Result<(f64, f64)> {
    if m.dim() <= DENSE_GROUND_STATE_MAX_DIM {
        let values = eigenvalues_hermitian(&m.to_dense()?)?;
        return Ok((values[0], values.get(1).map_or(f64::INFINITY, |e| e - values[0])));
    }
    let g = ground_state(m)?;
    let deflated = Deflated {
        inner: m,
        v: &g.state,
        shift: 4.0 * g.energy.abs().max(1.0),
    };
    // start vector independent of the default one
    let start: Vec<C64> = (0..m.dim())
        .map(|i| {
            let x = (i as f64 + 1.0) * 0.754_877_666;
            C64::new((x * 12.9898).sin(), (x * 78.233).cos())
        })
        .collect();
    let next = lanczos_lowest(&deflated, Some(&start), 1)?.ritz[0].0;
    Ok((g.energy, next - g.energy))
}

fn check_uniform(grid: &[f64]) -> Result<f64> {
    if grid.len() < MIN_PROBE_POINTS {
        return Err(Error::InvalidInput(format!(
            "probe grid needs >= {MIN_PROBE_POINTS} points, got {}",
            grid.len()
        )));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(h > 0.0) || grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidInput("probe grid must be uniform and increasing".into()));
    }
    if grid[0] < 0.0 || grid[grid.len() - 1] > 1.0 {
        return Err(Error::Domain("probe grid must lie in [0, 1]".into()));
    }
    Ok(h)
}

/// Ground energy of `H(lambda)` and its curvature by central differences.
pub fn gap_probe(n: usize, lambda_grid: &[f64]) -> Result<Vec<GapProbeRow>> {
    if !(3..=11).contains(&n) {
        return Err(Error::InvalidInput(format!("gap probe supports n in 3..=11, got {n}")));
    }
    let h = check_uniform(lambda_grid)?;
    let pairs = lambda_grid
        .par_iter()
        .map(|&l| lowest_pair(&h_ising(n, 1.0, l)?))
        .collect::<Result<Vec<_>>>()?;
    let scale = n as f64;
    let mut rows: Vec<GapProbeRow> = lambda_grid
        .iter()
        .zip(&pairs)
        .map(|(&lambda, &(e0, gap))| GapProbeRow {
            lambda,
            e0,
            d2e0: None,
            gap,
            degenerate: gap <= DEGENERACY_TOL * scale,
        })
        .collect();
    for i in 1..rows.len() - 1 {
        if !rows[i].degenerate {
            rows[i].d2e0 = Some((rows[i + 1].e0 - 2.0 * rows[i].e0 + rows[i - 1].e0) / (h * h));
        }
    }
    Ok(rows)
}

/// [`gap_probe`] on a uniform grid over `[0, 1]`.
pub fn gap_probe_uniform(n: usize, points: usize) -> Result<Vec<GapProbeRow>> {
    gap_probe(n, &uniform_grid(points))
}

/// Most negative curvature as `(lambda, d2e0)`.
pub fn curvature_dip(rows: &[GapProbeRow]) -> Option<(f64, f64)> {
    rows.iter()
        .filter_map(|r| r.d2e0.map(|d| (r.lambda, d)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Largest raw second difference `E_{i+1} - 2 E_i + E_{i-1}`; concavity means it is `<= 0`.
pub fn max_second_difference(rows: &[GapProbeRow]) -> f64 {
    rows.windows(3)
        .map(|w| w[2].e0 - 2.0 * w[1].e0 + w[0].e0)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `lambda,e0_over_Omega0,d2e0,degenerate`.
pub fn gap_probe_csv(rows: &[GapProbeRow]) -> CsvTable {
    let mut t = CsvTable::new(&["lambda", "e0_over_Omega0", "d2e0", "degenerate"]);
    for r in rows {
        t.push(vec![r.lambda.into(), r.e0.into(), r.d2e0.into(), r.degenerate.into()]);
    }
    t
}
