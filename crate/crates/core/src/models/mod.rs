//! Battery Hamiltonians and charging schedules.

mod hamiltonian;
mod schedule;

use serde::{Deserialize, Serialize};

pub use hamiltonian::{
    collective_potential, dh_ising_dlambda, empty_state, h_grover, h_ising, h_parallel, h_reference,
    half_charged_state, parallel_potential, GroverHamiltonian,
};
pub use schedule::{schedule_eval, Schedule, ScheduleValue};

use crate::error::{Error, Result};
use crate::operator::{check_capacity, DenseOperator, LinearOperator, OperatorSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Parallel,
    Grover,
    Ising,
}

/// A battery: family, number of cells, energy unit and schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: Family,
    pub n: usize,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    pub schedule: Schedule,
}

fn default_omega0() -> f64 {
    1.0
}

/// Hamiltonian at one instant, in the representation natural to its family.
#[derive(Clone, Debug)]
pub enum ModelHamiltonian {
    Pauli(OperatorSum),
    Grover(GroverHamiltonian),
}

impl LinearOperator for ModelHamiltonian {
    fn dim(&self) -> usize {
        match self {
            ModelHamiltonian::Pauli(h) => h.dim(),
            ModelHamiltonian::Grover(h) => h.dim(),
        }
    }

    fn apply(&self, input: &[crate::C64], output: &mut [crate::C64]) {
        match self {
            ModelHamiltonian::Pauli(h) => h.apply(input, output),
            ModelHamiltonian::Grover(h) => h.apply(input, output),
        }
    }

    fn to_dense(&self) -> Result<DenseOperator> {
        match self {
            ModelHamiltonian::Pauli(h) => h.to_dense(),
            ModelHamiltonian::Grover(h) => h.to_dense(),
        }
    }
}

impl ModelSpec {
    pub fn new(family: Family, n: usize, schedule: Schedule) -> Self {
        Self {
            family,
            n,
            omega0: 1.0,
            schedule,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("battery needs at least one cell".into()));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::InvalidInput(format!("omega0 must be positive, got {}", self.omega0)));
        }
        if self.family == Family::Ising && self.n < 2 {
            return Err(Error::InvalidInput(format!("Ising battery needs n >= 2, got {}", self.n)));
        }
        if self.n > 63 {
            return Err(Error::Capacity { sites: self.n, max: 63 });
        }
        self.schedule.validate()
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    /// Hilbert-space dimension `N = 2^n` seen by the Grover closed forms.
    pub fn grover_dimension(&self) -> u64 {
        1u64 << self.n
    }

    /// `H_ref`, the observable whose expectation measures the stored energy.
    pub fn reference(&self) -> OperatorSum {
        h_reference(self.n, self.omega0)
    }

    pub fn hamiltonian(&self, s: f64) -> Result<ModelHamiltonian> {
        self.validate()?;
        let control = self.schedule.eval(s)?;
        Ok(match self.family {
            Family::Parallel => ModelHamiltonian::Pauli(h_parallel(self.n, self.omega0, &control)),
            Family::Ising => ModelHamiltonian::Pauli(h_ising(self.n, self.omega0, control.lambda())?),
            Family::Grover => {
                check_capacity(self.n)?;
                ModelHamiltonian::Grover(GroverHamiltonian::new(self.n, self.omega0, &control))
            }
        })
    }

    pub fn dense_hamiltonian(&self, s: f64) -> Result<DenseOperator> {
        self.hamiltonian(s)?.to_dense()
    }

    /// Dense `dH/ds`.
    pub fn dense_derivative(&self, s: f64) -> Result<DenseOperator> {
        self.validate()?;
        let c = self.schedule.eval(s)?;
        let rate = ScheduleValue {
            f: c.df,
            g: c.dg,
            df: 0.0,
            dg: 0.0,
        };
        match self.family {
            Family::Parallel => h_parallel(self.n, self.omega0, &rate).to_dense(),
            Family::Ising => Ok(dh_ising_dlambda(self.n, self.omega0)?.to_dense()?.scale(c.df)),
            Family::Grover => h_grover(self.n, self.omega0, &rate),
        }
    }

    /// Dense `(A, B)` with `H(s) = g(s) A + f(s) B` for every family.
    pub fn endpoint_operators(&self) -> Result<(DenseOperator, DenseOperator)> {
        self.validate()?;
        check_capacity(self.n)?;
        let at = |f: f64| -> Result<DenseOperator> {
            let c = ScheduleValue {
                f,
                g: 1.0 - f,
                df: 0.0,
                dg: 0.0,
            };
            match self.family {
                Family::Parallel => h_parallel(self.n, self.omega0, &c).to_dense(),
                Family::Ising => h_ising(self.n, self.omega0, f)?.to_dense(),
                Family::Grover => h_grover(self.n, self.omega0, &c),
            }
        };
        Ok((at(0.0)?, at(1.0)?))
    }

    /// Pauli-sum `(A, B)` with `H = g A + f B`; the Grover projectors have no compact Pauli form.
    pub fn symbolic_endpoints(&self) -> Result<(OperatorSum, OperatorSum)> {
        self.validate()?;
        match self.family {
            Family::Parallel => Ok((h_reference(self.n, self.omega0), parallel_potential(self.n, self.omega0))),
            Family::Ising => Ok((h_reference(self.n, self.omega0), collective_potential(self.n, self.omega0))),
            Family::Grover => Err(Error::InvalidInput("the Grover battery has no symbolic Pauli form".into())),
        }
    }

    pub fn initial_state(&self) -> Vec<crate::C64> {
        empty_state(self.n)
    }
}
