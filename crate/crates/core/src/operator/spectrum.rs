//! Hermitian eigensolvers: dense (backed by `faer`) and a Krylov path for large spaces.

use std::ops::Range;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use super::dense::DenseOperator;
use super::LinearOperator;
use crate::error::{Error, Result};

/// Above this dimension `ground_state` switches to Lanczos.
pub const DENSE_GROUND_STATE_MAX_DIM: usize = 1 << 10;

/// Relative gap below which a ground state is flagged as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Residual bound required from the Krylov path (relative to the spectral scale).
pub const KRYLOV_RESIDUAL_TOL: f64 = 1e-8;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Full eigendecomposition, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest eigenvalue magnitude, at least 1.
    pub fn scale(&self) -> f64 {
        let lo = self.eigenvalues.first().copied().unwrap_or(0.0).abs();
        let hi = self.eigenvalues.last().copied().unwrap_or(0.0).abs();
        lo.max(hi).max(f64::MIN_POSITIVE)
    }

    /// Index ranges of eigenvalue clusters separated by more than `tol`.
    pub fn clusters(&self, tol: f64) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.eigenvalues.len() {
            if k == self.eigenvalues.len() || self.eigenvalues[k] - self.eigenvalues[k - 1] > tol {
                out.push(start..k);
                start = k;
            }
        }
        out
    }

    /// `sum_k E_k v_k v_k^dagger`.
    pub fn reconstruct(&self) -> DenseOperator {
        let n = self.dim();
        DenseOperator::from_fn(n, |i, j| {
            self.eigenvalues
                .iter()
                .zip(&self.eigenvectors)
                .map(|(e, v)| v[i] * v[j].conj() * *e)
                .sum()
        })
    }
}

/// Lowest eigenpair plus its separation from the next level.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: Vec<C64>,
    /// `E_1 - E_0`; infinite for a one-dimensional space.
    pub gap: f64,
    pub degenerate: bool,
}

/// Rotates `v` so that its largest component is real and positive.
pub fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_norm = 0.0;
    for (i, x) in v.iter().enumerate() {
        // strict improvement by a margin keeps the choice stable under roundoff
        if x.norm() > best_norm * (1.0 + 1e-9) {
            best = i;
            best_norm = x.norm();
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

fn evd_error(e: impl std::fmt::Debug) -> Error {
    Error::Eigensolver(format!("{e:?}"))
}

/// Full Hermitian eigendecomposition.
pub fn eig_hermitian(m: &DenseOperator) -> Result<Spectrum> {
    m.ensure_hermitian()?;
    let n = m.dim();
    let (eigenvalues, mut eigenvectors) = if m.is_real() {
        let a = Mat::<f64>::from_fn(n, n, |i, j| m.get(i, j).re);
        let evd = a.self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
        let (s, u) = (evd.S(), evd.U());
        let values: Vec<f64> = (0..n).map(|k| s[k]).collect();
        let vectors: Vec<Vec<C64>> = (0..n).map(|k| (0..n).map(|i| C64::new(u[(i, k)], 0.0)).collect()).collect();
        (values, vectors)
    } else {
        let a = Mat::<C64>::from_fn(n, n, |i, j| m.get(i, j));
        let evd = a.self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
        let (s, u) = (evd.S(), evd.U());
        let values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
        let vectors: Vec<Vec<C64>> = (0..n).map(|k| (0..n).map(|i| u[(i, k)]).collect()).collect();
        (values, vectors)
    };
    eigenvectors.iter_mut().for_each(|v| fix_phase(v));
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues only.
pub fn eigenvalues_hermitian(m: &DenseOperator) -> Result<Vec<f64>> {
    m.ensure_hermitian()?;
    let n = m.dim();
    if m.is_real() {
        let a = Mat::<f64>::from_fn(n, n, |i, j| m.get(i, j).re);
        a.self_adjoint_eigenvalues(Side::Lower).map_err(evd_error)
    } else {
        let a = Mat::<C64>::from_fn(n, n, |i, j| m.get(i, j));
        a.self_adjoint_eigenvalues(Side::Lower).map_err(evd_error)
    }
}

fn ground_from_values(values: &[f64], state: Vec<C64>) -> GroundState {
    let scale = values
        .first()
        .zip(values.last())
        .map(|(a, b)| a.abs().max(b.abs()))
        .unwrap_or(0.0);
    let gap = if values.len() > 1 { values[1] - values[0] } else { f64::INFINITY };
    GroundState {
        energy: values[0],
        state,
        gap,
        degenerate: gap <= DEGENERACY_TOL * scale,
    }
}

/// Lowest eigenpair. Spaces larger than [`DENSE_GROUND_STATE_MAX_DIM`] use Lanczos.
pub fn ground_state<M: LinearOperator + ?Sized>(m: &M) -> Result<GroundState> {
    if m.dim() <= DENSE_GROUND_STATE_MAX_DIM {
        let spec = eig_hermitian(&m.to_dense()?)?;
        let state = spec.eigenvectors[0].clone();
        return Ok(ground_from_values(&spec.eigenvalues, state));
    }
    let pairs = lanczos_lowest(m, None, 2)?;
    let values: Vec<f64> = pairs.ritz.iter().map(|p| p.0).chain(std::iter::once(pairs.extreme)).collect();
    let mut state = pairs.ritz[0].1.clone();
    fix_phase(&mut state);
    let mut g = ground_from_values(&values, state);
    if pairs.ritz.len() < 2 {
        g.gap = f64::INFINITY;
        g.degenerate = false;
    }
    Ok(g)
}

/// Ground energy only (with degeneracy flag, dense eigenvalues or Lanczos).
pub fn ground_energy<M: LinearOperator + ?Sized>(m: &M) -> Result<(f64, bool)> {
    if m.dim() <= DENSE_GROUND_STATE_MAX_DIM {
        let values = eigenvalues_hermitian(&m.to_dense()?)?;
        let g = ground_from_values(&values, Vec::new());
        return Ok((g.energy, g.degenerate));
    }
    let g = ground_state(m)?;
    Ok((g.energy, g.degenerate))
}

/// Spectral norm of a Hermitian matrix.
pub fn operator_norm(m: &DenseOperator) -> Result<f64> {
    let values = eigenvalues_hermitian(m)?;
    Ok(values
        .first()
        .zip(values.last())
        .map(|(a, b)| a.abs().max(b.abs()))
        .unwrap_or(0.0))
}

/// Result of a Lanczos run: lowest Ritz pairs and the largest Ritz value seen.
#[derive(Clone, Debug)]
pub struct RitzPairs {
    pub ritz: Vec<(f64, Vec<C64>)>,
    pub extreme: f64,
    pub iterations: usize,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic dense start vector with no special symmetry.
fn default_start(dim: usize) -> Vec<C64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut v: Vec<C64> = (0..dim)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            C64::new(a, b)
        })
        .collect();
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Lanczos with full reorthogonalization for the `count` lowest eigenpairs.
///
/// Converged when every requested Ritz residual is below
/// [`KRYLOV_RESIDUAL_TOL`] times the spectral scale. A start vector confined to
/// a symmetry sector keeps the Krylov space (and the result) in that sector.
pub fn lanczos_lowest<M: LinearOperator + ?Sized>(m: &M, start: Option<&[C64]>, count: usize) -> Result<RitzPairs> {
    let dim = m.dim();
    let max_iter = dim.min(400);
    let mut q = match start {
        Some(s) => {
            if s.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: s.len(),
                });
            }
            s.to_vec()
        }
        None => default_start(dim),
    };
    let n0 = norm(&q);
    if n0 == 0.0 {
        return Err(Error::InvalidInput("zero Lanczos start vector".into()));
    }
    q.iter_mut().for_each(|x| *x /= n0);

    let mut basis: Vec<Vec<C64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![ZERO; dim];

    loop {
        let j = basis.len() - 1;
        m.apply(&basis[j], &mut w);
        let alpha = dot(&basis[j], &w).re;
        alphas.push(alpha);
        // two passes of classical Gram-Schmidt against the full basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = norm(&w);

        let k = alphas.len();
        let tri = Mat::<f64>::from_fn(k, k, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c || c + 1 == r {
                betas[r.min(c)]
            } else {
                0.0
            }
        });
        let evd = tri.self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
        let (s, u) = (evd.S(), evd.U());
        let scale = s[0].abs().max(s[k - 1].abs()).max(1.0);
        let wanted = count.min(k);
        let converged = (0..wanted).all(|i| (beta * u[(k - 1, i)]).abs() <= KRYLOV_RESIDUAL_TOL * scale);
        let exhausted = beta <= 1e-12 * scale || k >= max_iter;

        if (converged && k >= count.min(dim)) || exhausted {
            if !converged {
                return Err(Error::Eigensolver(format!("Lanczos did not converge in {k} iterations")));
            }
            let ritz = (0..wanted)
                .map(|i| {
                    let mut v = vec![ZERO; dim];
                    for (r, b) in basis.iter().enumerate() {
                        let coeff = u[(r, i)];
                        v.iter_mut().zip(b).for_each(|(x, y)| *x += y * coeff);
                    }
                    let nv = norm(&v);
                    v.iter_mut().for_each(|x| *x /= nv);
                    (s[i], v)
                })
                .collect();
            return Ok(RitzPairs {
                ritz,
                extreme: s[k - 1],
                iterations: k,
            });
        }
        betas.push(beta);
        let next: Vec<C64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }
}
