use num_complex::Complex64 as C64;

use super::schedule::ScheduleValue;
use crate::error::{Error, Result};
use crate::operator::{check_capacity, DenseOperator, LinearOperator, OperatorSum, Pauli, PauliString, PauliTerm};

/// `Omega_0 sum_k Z_k`; its ground state `|0...0>` is the empty battery.
pub fn h_reference(n: usize, omega0: f64) -> OperatorSum {
    local_field(n, omega0, Pauli::Z)
}

fn local_field(n: usize, omega0: f64, letter: Pauli) -> OperatorSum {
    OperatorSum::from_terms(n, (0..n).map(|k| PauliTerm::new(omega0, PauliString::single(n, k, letter))))
        .expect("site counts agree")
}

/// Parallel charging potential `Omega_0 sum_k X_k`.
pub fn parallel_potential(n: usize, omega0: f64) -> OperatorSum {
    local_field(n, omega0, Pauli::X)
}

/// Collective charging potential `Omega_0 sum_i prod_{j != i} X_j`.
pub fn collective_potential(n: usize, omega0: f64) -> OperatorSum {
    let all_x = PauliString::from_letters(&vec![Pauli::X; n]);
    OperatorSum::from_terms(n, (0..n).map(|i| PauliTerm::new(omega0, all_x.with(i, Pauli::I))))
        .expect("site counts agree")
}

/// `Omega_0 sum_k [f X_k + g Z_k]`.
pub fn h_parallel(n: usize, omega0: f64, control: &ScheduleValue) -> OperatorSum {
    parallel_potential(n, omega0)
        .combine(control.f, &h_reference(n, omega0), control.g)
        .expect("site counts agree")
}

fn check_ising_sites(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("Ising battery needs n >= 2, got {n}")));
    }
    Ok(())
}

/// `(1 - lambda) H_ref + lambda V_#`.
pub fn h_ising(n: usize, omega0: f64, lambda: f64) -> Result<OperatorSum> {
    check_ising_sites(n)?;
    h_reference(n, omega0).combine(1.0 - lambda, &collective_potential(n, omega0), lambda)
}

/// `dH/dlambda = V_# - H_ref`, independent of `lambda`.
pub fn dh_ising_dlambda(n: usize, omega0: f64) -> Result<OperatorSum> {
    check_ising_sites(n)?;
    collective_potential(n, omega0).sub(&h_reference(n, omega0))
}

/// `|0...0>`.
pub fn empty_state(n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << n];
    v[0] = C64::new(1.0, 0.0);
    v
}

/// `|+>^{(x) n}`, the uniform superposition of all basis states.
pub fn half_charged_state(n: usize) -> Vec<C64> {
    let dim = 1usize << n;
    vec![C64::new(1.0 / (dim as f64).sqrt(), 0.0); dim]
}

/// `Omega_0 [f (1 - |hc><hc|) + g (1 - |empty><empty|)]`, applied matrix-free.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroverHamiltonian {
    pub sites: usize,
    pub omega0: f64,
    pub f: f64,
    pub g: f64,
}

impl GroverHamiltonian {
    pub fn new(sites: usize, omega0: f64, control: &ScheduleValue) -> Self {
        Self {
            sites,
            omega0,
            f: control.f,
            g: control.g,
        }
    }
}

impl LinearOperator for GroverHamiltonian {
    fn dim(&self) -> usize {
        1 << self.sites
    }

    fn apply(&self, input: &[C64], output: &mut [C64]) {
        let dim = self.dim();
        let amp = 1.0 / (dim as f64).sqrt();
        // <hc|x> for the uniform state
        let hc_overlap: C64 = input.iter().sum::<C64>() * amp;
        for (o, x) in output.iter_mut().zip(input) {
            *o = (*x - hc_overlap * amp) * self.f + *x * self.g;
        }
        output[0] -= input[0] * self.g;
        output.iter_mut().for_each(|o| *o *= self.omega0);
    }

    fn to_dense(&self) -> Result<DenseOperator> {
        h_grover(self.sites, self.omega0, &ScheduleValue {
            f: self.f,
            g: self.g,
            df: 0.0,
            dg: 0.0,
        })
    }
}

/// Dense Grover-battery Hamiltonian built from the two projectors.
pub fn h_grover(n: usize, omega0: f64, control: &ScheduleValue) -> Result<DenseOperator> {
    check_capacity(n)?;
    let hc = DenseOperator::projector_complement(&half_charged_state(n));
    let empty = DenseOperator::projector_complement(&empty_state(n));
    Ok(hc.combine(control.f * omega0, &empty, control.g * omega0)?)
}
