use rayon::prelude::*;

use super::gauge::{check_order, solve_alphas};
use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::models::ModelSpec;
use crate::operator::OperatorSum;

/// Points of the uniform `lambda` grid on which coefficients are tabulated.
pub const GAUGE_GRID_POINTS: usize = 201;

/// Piecewise cubic Hermite interpolation of vector data on a uniform grid,
/// with node slopes from fourth-order finite differences.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformCubic {
    h: f64,
    values: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
}

impl UniformCubic {
    /// `values[i]` sampled at `x = i h`, `x` in `[0, (len - 1) h]`.
    pub fn new(values: Vec<Vec<f64>>, h: f64) -> Result<Self> {
        let m = values.len();
        if m < 5 {
            return Err(Error::InvalidInput(format!("cubic table needs >= 5 nodes, got {m}")));
        }
        let width = values[0].len();
        if values.iter().any(|v| v.len() != width) {
            return Err(Error::InvalidInput("ragged cubic table".into()));
        }
        let stencil = |i: usize, c: [f64; 5], start: usize| -> Vec<f64> {
            let _ = i;
            (0..width)
                .map(|d| c.iter().enumerate().map(|(j, w)| w * values[start + j][d]).sum::<f64>() / (12.0 * h))
                .collect()
        };
        let slopes = (0..m)
            .map(|i| match i {
                0 => stencil(i, [-25.0, 48.0, -36.0, 16.0, -3.0], 0),
                1 => stencil(i, [-3.0, -10.0, 18.0, -6.0, 1.0], 0),
                _ if i == m - 2 => stencil(i, [-1.0, 6.0, -18.0, 10.0, 3.0], m - 5),
                _ if i == m - 1 => stencil(i, [3.0, -16.0, 36.0, -48.0, 25.0], m - 5),
                _ => stencil(i, [1.0, -8.0, 0.0, 8.0, -1.0], i - 2),
            })
            .collect();
        Ok(Self { h, values, slopes })
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let last = self.values.len() - 1;
        let pos = (x / self.h).clamp(0.0, last as f64);
        let i = (pos.floor() as usize).min(last - 1);
        let t = pos - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (0..self.values[i].len())
            .map(|d| {
                h00 * self.values[i][d]
                    + h10 * self.h * self.slopes[i][d]
                    + h01 * self.values[i + 1][d]
                    + h11 * self.h * self.slopes[i + 1][d]
            })
            .collect()
    }
}

/// Variational coefficients `alpha_k(lambda)` of `H(lambda) = (1 - lambda) A + lambda B`.
#[derive(Clone, Debug)]
pub struct GaugeExpansion {
    pub order: usize,
    pub lambda_grid: Vec<f64>,
    pub alphas: Vec<Vec<f64>>,
    endpoints: (OperatorSum, OperatorSum),
    table: UniformCubic,
}

impl GaugeExpansion {
    pub fn build(model: &ModelSpec, order: usize) -> Result<Self> {
        Self::build_with_points(model, order, GAUGE_GRID_POINTS)
    }

    pub fn build_with_points(model: &ModelSpec, order: usize, points: usize) -> Result<Self> {
        check_order(order)?;
        let endpoints = model.symbolic_endpoints()?;
        let last = points.max(5) - 1;
        let lambda_grid: Vec<f64> = (0..=last).map(|i| i as f64 / last as f64).collect();
        let alphas = lambda_grid
            .par_iter()
            .map(|&l| Ok(solve_at(&endpoints, l, order)?.alphas))
            .collect::<Result<Vec<_>>>()?;
        if alphas.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::Consistency("non-finite gauge coefficient".into()));
        }
        let table = UniformCubic::new(alphas.clone(), 1.0 / last as f64)?;
        Ok(Self {
            order,
            lambda_grid,
            alphas,
            endpoints,
            table,
        })
    }

    /// Interpolated coefficients at `lambda`.
    pub fn alphas_at(&self, lambda: f64) -> Vec<f64> {
        self.table.eval(lambda)
    }

    /// Coefficients re-solved at `lambda`.
    pub fn direct(&self, lambda: f64) -> Result<Vec<f64>> {
        Ok(solve_at(&self.endpoints, lambda, self.order)?.alphas)
    }

    /// `(H(lambda), dH/dlambda)`.
    pub fn hamiltonian(&self, lambda: f64) -> Result<(OperatorSum, OperatorSum)> {
        pair_at(&self.endpoints, lambda)
    }

    pub fn endpoints(&self) -> &(OperatorSum, OperatorSum) {
        &self.endpoints
    }

    /// `lambda,alpha1[,alpha2]`.
    pub fn to_csv(&self) -> CsvTable {
        let mut header = vec!["lambda".to_string()];
        header.extend((1..=self.order).map(|k| format!("alpha{k}")));
        let mut t = CsvTable::new(&header);
        for (l, a) in self.lambda_grid.iter().zip(&self.alphas) {
            let mut row: Vec<crate::export::Cell> = vec![(*l).into()];
            row.extend(a.iter().map(|x| crate::export::Cell::from(*x)));
            t.push(row);
        }
        t
    }
}

pub(crate) fn pair_at(endpoints: &(OperatorSum, OperatorSum), lambda: f64) -> Result<(OperatorSum, OperatorSum)> {
    let (a, b) = endpoints;
    Ok((a.combine(1.0 - lambda, b, lambda)?, b.sub(a)?))
}

fn solve_at(endpoints: &(OperatorSum, OperatorSum), lambda: f64, order: usize) -> Result<super::AlphaSolution> {
    let (h, dh) = pair_at(endpoints, lambda)?;
    solve_alphas(&h, &dh, order)
}
