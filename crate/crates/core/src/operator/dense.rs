use num_complex::Complex64 as C64;

use super::pauli::OperatorSum;
use super::LinearOperator;
use crate::error::{Error, Result};

/// Dense operators are capped at `2^14` basis states.
pub const MAX_DENSE_SITES: usize = 14;

/// Tolerance on `max |M - M^dagger|` (relative to `max(1, max |M_ij|)`).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<C64>,
}

const ZERO: C64 = C64::new(0.0, 0.0);

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = C64::new(*d, 0.0);
        }
        m
    }

    /// Kronecker expansion of a Pauli sum.
    pub fn from_sum(sum: &OperatorSum) -> Result<Self> {
        check_capacity(sum.sites())?;
        let dim = 1usize << sum.sites();
        let mut m = Self::zeros(dim);
        for t in sum.terms() {
            for col in 0..dim {
                let (row, phase) = t.string.apply_basis(col);
                m.data[row * dim + col] += t.coefficient * phase;
            }
        }
        Ok(m)
    }

    /// `1 - |v><v|` for a unit vector `v`.
    pub fn projector_complement(state: &[C64]) -> Self {
        let dim = state.len();
        Self::from_fn(dim, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            C64::new(delta, 0.0) - state[i] * state[j].conj()
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[C64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    fn check_dim(&self, other: &DenseOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn scale(&self, factor: impl Into<C64>) -> DenseOperator {
        let factor = factor.into();
        DenseOperator {
            dim: self.dim,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: impl Into<C64>, other: &DenseOperator, b: impl Into<C64>) -> Result<DenseOperator> {
        self.check_dim(other)?;
        let (a, b) = (a.into(), b.into());
        Ok(DenseOperator {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect(),
        })
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: impl Into<C64>, other: &DenseOperator) -> Result<()> {
        self.check_dim(other)?;
        let factor = factor.into();
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += factor * y;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseOperator { dim: n, data: out })
    }

    pub fn commutator(&self, other: &DenseOperator) -> Result<DenseOperator> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.combine(1.0, &ba, -1.0)
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_defect();
        if deviation > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|x| x.im == 0.0)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute row sum; bounds the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, input: &[C64], output: &mut [C64]) {
        assert_eq!(input.len(), self.dim);
        assert_eq!(output.len(), self.dim);
        for (i, o) in output.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(input).map(|(a, x)| a * x).sum();
        }
    }

    /// `<psi|M|psi>`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let mut tmp = vec![ZERO; self.dim];
        self.matvec(psi, &mut tmp);
        psi.iter().zip(&tmp).map(|(a, b)| a.conj() * b).sum()
    }

    /// Rows of `re,im` pairs, one matrix row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            let line: Vec<String> = self.row(i).iter().map(|x| format!("{:.16e},{:.16e}", x.re, x.im)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// `Tr(A^dagger B)`.
pub fn hs_inner(a: &DenseOperator, b: &DenseOperator) -> Result<C64> {
    a.check_dim(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

pub fn check_capacity(sites: usize) -> Result<()> {
    if sites > MAX_DENSE_SITES {
        return Err(Error::Capacity {
            sites,
            max: MAX_DENSE_SITES,
        });
    }
    Ok(())
}

/// Dense matrix of a Pauli sum on `n` sites.
pub fn to_dense(sum: &OperatorSum) -> Result<DenseOperator> {
    DenseOperator::from_sum(sum)
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, input: &[C64], output: &mut [C64]) {
        self.matvec(input, output)
    }

    fn to_dense(&self) -> Result<DenseOperator> {
        Ok(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli::{PauliString, PauliTerm, Pauli};

    fn z_field(n: usize) -> OperatorSum {
        OperatorSum::from_terms(n, (0..n).map(|k| PauliTerm::new(1.0, PauliString::single(n, k, Pauli::Z)))).unwrap()
    }

    #[test]
    fn identity_sum_is_identity_matrix() {
        let m = to_dense(&OperatorSum::identity(3, 1.0)).unwrap();
        assert_eq!(m, DenseOperator::identity(8));
    }

    #[test]
    fn z_field_uses_minus_one_on_zero() {
        let m = to_dense(&z_field(2)).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m.get(i, i).re).collect();
        assert_eq!(diag, vec![-2.0, 0.0, 0.0, 2.0]);
        assert_eq!(m.max_abs(), 2.0);
        assert_eq!(m.trace(), ZERO);
    }

    #[test]
    fn projector_complement_of_empty_state() {
        let mut e = vec![ZERO; 4];
        e[0] = C64::new(1.0, 0.0);
        let p = DenseOperator::projector_complement(&e);
        assert_eq!(p, DenseOperator::from_diagonal(&[0.0, 1.0, 1.0, 1.0]));
    }

    #[test]
    fn capacity_guard() {
        let big = OperatorSum::identity(15, 1.0);
        assert!(matches!(to_dense(&big), Err(Error::Capacity { sites: 15, .. })));
    }

    #[test]
    fn hs_inner_basics() {
        let i2 = DenseOperator::identity(4);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), C64::new(4.0, 0.0));
        let x = to_dense(&OperatorSum::from_terms(1, [PauliTerm::parse(1.0, "X").unwrap()]).unwrap()).unwrap();
        let z = to_dense(&z_field(1)).unwrap();
        assert_eq!(hs_inner(&x, &z).unwrap(), ZERO);
        assert!(hs_inner(&x, &DenseOperator::identity(4)).is_err());
    }

    #[test]
    fn y_matrix_convention() {
        let y = to_dense(&OperatorSum::from_terms(1, [PauliTerm::parse(1.0, "Y").unwrap()]).unwrap()).unwrap();
        assert_eq!(y.get(0, 1), C64::new(0.0, 1.0));
        assert_eq!(y.get(1, 0), C64::new(0.0, -1.0));
        assert!(y.is_hermitian());
    }

    #[test]
    fn csv_dump_shape() {
        let csv = DenseOperator::identity(2).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 4);
    }
}
