//! Schrödinger propagation, adiabatic tracking and charging metrics.

mod integrator;
mod power;
mod track;

use num_complex::Complex64 as C64;

pub use integrator::{evolve_tdse, EvolutionTrace, IntegratorConfig, MIN_STEPS_PER_PERIOD, NORM_DRIFT_LIMIT};
pub use power::{
    ising_max_power_scan, parallel_max_power_scan, power_scan_csv, power_series, power_series_from, trace_csv,
    PowerRow, PowerSeries, ISING_SCAN_POINTS,
};
pub use track::{
    adiabatic_track, adiabatic_track_with, uniform_grid, AdiabaticTrack, TrackMethod, DENSE_TRACK_MAX_DIM, MIN_ADJACENT_OVERLAP,
};

use crate::error::{Error, Result};
use crate::models::{ModelSpec, Schedule};
use crate::operator::DenseOperator;

/// Tolerance on the norm of a state handed to the library.
pub const STATE_NORM_TOL: f64 = 1e-9;

/// Pure state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2(&amplitudes);
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidInput(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|x| *x /= norm);
        Ok(Self { amplitudes })
    }

    /// Skips the norm check; for propagated states whose drift is tracked separately.
    pub(crate) fn unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }
}

pub(crate) fn l2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<psi|phi>|`, clamped to `[0, 1]`.
pub fn fidelity(psi: &QuantumState, phi: &QuantumState) -> Result<f64> {
    Ok(psi.inner(phi)?.norm().min(1.0))
}

/// Time-dependent Hamiltonian `H(t)`.
pub trait Generator: Sync {
    fn dim(&self) -> usize;

    fn at(&self, t: f64) -> Result<DenseOperator>;

    /// `output = H(t) input`.
    fn apply(&self, t: f64, input: &[C64], output: &mut [C64]) -> Result<()> {
        self.at(t)?.matvec(input, output);
        Ok(())
    }
}

/// Adapts a closure `t -> H(t)`.
pub struct FnGenerator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> Result<DenseOperator> + Sync> FnGenerator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64) -> Result<DenseOperator> + Sync> Generator for FnGenerator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn at(&self, t: f64) -> Result<DenseOperator> {
        let h = (self.f)(t)?;
        if h.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: h.dim(),
            });
        }
        Ok(h)
    }
}

/// Constant Hamiltonian.
pub struct ConstantGenerator(pub DenseOperator);

impl Generator for ConstantGenerator {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn at(&self, _t: f64) -> Result<DenseOperator> {
        Ok(self.0.clone())
    }

    fn apply(&self, _t: f64, input: &[C64], output: &mut [C64]) -> Result<()> {
        self.0.matvec(input, output);
        Ok(())
    }
}

/// Unassisted sweep `H(s = t / tau) = g(s) A + f(s) B` of a battery model.
#[derive(Clone, Debug)]
pub struct ModelGenerator {
    pub(crate) a: DenseOperator,
    pub(crate) b: DenseOperator,
    pub(crate) schedule: Schedule,
    pub(crate) tau: f64,
}

impl ModelGenerator {
    pub fn new(model: &ModelSpec, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        let (a, b) = model.endpoint_operators()?;
        Ok(Self {
            a,
            b,
            schedule: model.schedule,
            tau,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub(crate) fn s_of(&self, t: f64) -> f64 {
        (t / self.tau).clamp(0.0, 1.0)
    }

    /// `dH/dlambda = B - A` (with `lambda = f`).
    pub fn dh_dlambda(&self) -> DenseOperator {
        self.b.combine(1.0, &self.a, -1.0).expect("endpoint dimensions agree")
    }
}

pub(crate) fn apply_pair(a: &DenseOperator, ca: f64, b: &DenseOperator, cb: f64, input: &[C64], output: &mut [C64]) {
    let n = a.dim();
    for (i, o) in output.iter_mut().enumerate() {
        let (ra, rb) = (a.row(i), b.row(i));
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += (ra[j] * ca + rb[j] * cb) * input[j];
        }
        *o = acc;
    }
}

impl Generator for ModelGenerator {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn at(&self, t: f64) -> Result<DenseOperator> {
        let c = self.schedule.eval(self.s_of(t))?;
        self.a.combine(c.g, &self.b, c.f)
    }

    fn apply(&self, t: f64, input: &[C64], output: &mut [C64]) -> Result<()> {
        let c = self.schedule.eval(self.s_of(t))?;
        apply_pair(&self.a, c.g, &self.b, c.f, input, output);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Family;

    #[test]
    fn fidelity_examples() {
        let zero = QuantumState::basis(2, 0);
        let one = QuantumState::basis(2, 1);
        assert_eq!(fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        let psi = QuantumState::normalized(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.9)]).unwrap();
        let rotated = QuantumState::new(psi.amplitudes().iter().map(|x| x * C64::from_polar(1.0, 1.234)).collect()).unwrap();
        assert!((fidelity(&psi, &rotated).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&zero, &QuantumState::basis(4, 0)).is_err());
    }

    #[test]
    fn state_norm_is_checked() {
        assert!(QuantumState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(QuantumState::normalized(vec![C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn model_generator_matches_dense_model() {
        let spec = ModelSpec::new(Family::Ising, 3, Schedule::Oscillating);
        let g = ModelGenerator::new(&spec, 2.0).unwrap();
        let h = g.at(0.6).unwrap();
        let direct = spec.dense_hamiltonian(0.3).unwrap();
        assert!(h.combine(1.0, &direct, -1.0).unwrap().max_abs() < 1e-14);
        let x: Vec<C64> = (0..8).map(|i| C64::new(i as f64, 1.0)).collect();
        let (mut a, mut b) = (vec![C64::new(0.0, 0.0); 8], vec![C64::new(0.0, 0.0); 8]);
        g.apply(0.6, &x, &mut a).unwrap();
        h.matvec(&x, &mut b);
        assert!(a.iter().zip(&b).all(|(p, q)| (p - q).norm() < 1e-12));
    }
}
