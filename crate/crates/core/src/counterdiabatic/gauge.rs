use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::{commutator, eig_hermitian, DenseOperator, OperatorSum};

/// Highest supported expansion order.
pub const MAX_ORDER: usize = 2;

/// Abort threshold for the size of a nested commutator.
pub const MAX_TERMS: usize = 1_000_000;

/// Relative gap below which two levels count as degenerate in [`gauge_exact`].
pub const GAUGE_DEGENERACY_TOL: f64 = 1e-8;

pub(crate) fn check_order(order: usize) -> Result<()> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidInput(format!("expansion order must be 1 or 2, got {order}")));
    }
    Ok(())
}

fn guarded(op: OperatorSum) -> Result<OperatorSum> {
    if op.len() > MAX_TERMS {
        return Err(Error::TermExplosion { terms: op.len() });
    }
    Ok(op)
}

/// `O_k = [H, [H, ... [H, dH]]]` with `2k - 1` nestings, for `k = 1..=order`.
pub fn nested_commutator_basis(h: &OperatorSum, dh: &OperatorSum, order: usize) -> Result<Vec<OperatorSum>> {
    check_order(order)?;
    let mut out = Vec::with_capacity(order);
    let mut current = guarded(commutator(h, dh)?)?;
    out.push(current.clone());
    for _ in 1..order {
        current = guarded(commutator(h, &guarded(commutator(h, &current)?)?)?)?;
        out.push(current.clone());
    }
    Ok(out)
}

/// Minimizer of the action `Tr G^2` over the expansion coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSolution {
    pub alphas: Vec<f64>,
    /// `[H, dH] = 0`: the exact gauge potential vanishes and so do all coefficients.
    pub commuting: bool,
    /// `Tr G^2` at the minimum.
    pub action: f64,
    /// `|M alpha - b| / max(|b|, tiny)`.
    pub residual: f64,
}

/// `C_k = -[H, O_k]`, so that `G = dH - sum_k alpha_k C_k`.
fn response_terms(h: &OperatorSum, basis: &[OperatorSum]) -> Result<Vec<OperatorSum>> {
    basis.iter().map(|o| Ok(guarded(commutator(h, o)?)?.scale(-1.0))).collect()
}

fn real_inner(a: &OperatorSum, b: &OperatorSum) -> Result<f64> {
    Ok(a.hs_inner(b)?.re)
}

/// `Tr G^2` for given coefficients.
pub fn action(h: &OperatorSum, dh: &OperatorSum, alphas: &[f64]) -> Result<f64> {
    check_order(alphas.len())?;
    let basis = nested_commutator_basis(h, dh, alphas.len())?;
    let responses = response_terms(h, &basis)?;
    let mut g = dh.clone();
    for (c, a) in responses.iter().zip(alphas) {
        g = g.combine(1.0, c, -*a)?;
    }
    real_inner(&g, &g)
}

/// Variational gauge potential coefficients from the normal equations `M alpha = b`.
pub fn solve_alphas(h: &OperatorSum, dh: &OperatorSum, order: usize) -> Result<AlphaSolution> {
    let basis = nested_commutator_basis(h, dh, order)?;
    let responses = response_terms(h, &basis)?;
    let dh_norm2 = real_inner(dh, dh)?;
    if basis[0].is_empty() || responses.iter().all(|c| c.is_empty()) {
        return Ok(AlphaSolution {
            alphas: vec![0.0; order],
            commuting: true,
            action: dh_norm2,
            residual: 0.0,
        });
    }
    let m = Mat::<f64>::from_fn(order, order, |j, k| real_inner(&responses[j], &responses[k]).unwrap_or(f64::NAN));
    let b: Vec<f64> = responses.iter().map(|c| real_inner(c, dh)).collect::<Result<_>>()?;
    if (0..order).any(|j| (0..order).any(|k| !m[(j, k)].is_finite())) {
        return Err(Error::Consistency("non-finite normal matrix".into()));
    }
    // pseudo-inverse: dependent directions (e.g. a two-level H) get zero weight
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let (s, u) = (evd.S(), evd.U());
    let top = (0..order).map(|i| s[i].abs()).fold(0.0, f64::max);
    let mut alphas = vec![0.0; order];
    for i in 0..order {
        if s[i].abs() <= 1e-12 * top {
            continue;
        }
        let proj: f64 = (0..order).map(|j| u[(j, i)] * b[j]).sum::<f64>() / s[i];
        for (j, a) in alphas.iter_mut().enumerate() {
            *a += u[(j, i)] * proj;
        }
    }
    let residual = (0..order)
        .map(|j| (0..order).map(|k| m[(j, k)] * alphas[k]).sum::<f64>() - b[j])
        .map(|r| r * r)
        .sum::<f64>()
        .sqrt()
        / b.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let action = dh_norm2 - 2.0 * alphas.iter().zip(&b).map(|(a, b)| a * b).sum::<f64>()
        + (0..order)
            .map(|j| (0..order).map(|k| alphas[j] * m[(j, k)] * alphas[k]).sum::<f64>())
            .sum::<f64>();
    Ok(AlphaSolution {
        alphas,
        commuting: false,
        action,
        residual,
    })
}

/// `A = i sum_k alpha_k O_k` as a Pauli sum.
pub fn gauge_variational(h: &OperatorSum, dh: &OperatorSum, alphas: &[f64]) -> Result<OperatorSum> {
    let basis = nested_commutator_basis(h, dh, alphas.len())?;
    let mut a = OperatorSum::zero(h.sites());
    for (o, alpha) in basis.iter().zip(alphas) {
        a = a.combine(1.0, o, C64::new(0.0, *alpha))?;
    }
    Ok(a)
}

/// Spectral gauge potential `<m|A|n> = i <m|dH|n> / (E_n - E_m)` in the computational basis.
///
/// Degenerate pairs that `dH` does not couple get a zero entry; a coupled
/// degenerate pair is an error.
pub fn gauge_exact(h: &DenseOperator, dh: &DenseOperator) -> Result<DenseOperator> {
    if h.dim() != dh.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            found: dh.dim(),
        });
    }
    dh.ensure_hermitian()?;
    let spec = eig_hermitian(h)?;
    let n = h.dim();
    let gap_tol = GAUGE_DEGENERACY_TOL * spec.scale().max(1.0);
    let coupling_tol = 1e-10 * dh.max_abs().max(1.0);
    let vecs = &spec.eigenvectors;
    // dH in the eigenbasis
    let mut dh_v = vec![vec![C64::new(0.0, 0.0); n]; n];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    for (k, v) in vecs.iter().enumerate() {
        dh.matvec(v, &mut tmp);
        for (m, w) in vecs.iter().enumerate() {
            dh_v[m][k] = w.iter().zip(&tmp).map(|(a, b)| a.conj() * b).sum();
        }
    }
    let mut a_eig = vec![vec![C64::new(0.0, 0.0); n]; n];
    for m in 0..n {
        for k in 0..n {
            if m == k {
                continue;
            }
            let gap = spec.eigenvalues[k] - spec.eigenvalues[m];
            let coupling = dh_v[m][k];
            if coupling.norm() <= coupling_tol {
                continue;
            }
            if gap.abs() <= gap_tol {
                return Err(Error::Degenerate { gap: gap.abs() });
            }
            a_eig[m][k] = C64::new(0.0, 1.0) * coupling / gap;
        }
    }
    // back to the computational basis: A = V A_eig V^dagger
    let mut out = DenseOperator::zeros(n);
    let mut half = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            half[i][k] = (0..n).map(|m| vecs[m][i] * a_eig[m][k]).sum();
        }
    }
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, (0..n).map(|k| half[i][k] * vecs[k][j].conj()).sum());
        }
    }
    Ok(out)
}
