use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::drive::{CdGenerator, CdMode, FloquetConfig, FloquetGenerator};
use super::expansion::GaugeExpansion;
use crate::dynamics::{
    adiabatic_track, evolve_tdse, uniform_grid, EvolutionTrace, Generator, IntegratorConfig, ModelGenerator,
    QuantumState,
};
use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::models::{Family, ModelSpec, Schedule};

/// Settings of the UA / CD / FE fidelity comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub n: usize,
    /// `Omega_0 tau`.
    pub tau: f64,
    /// `omega / omega0` for the first-order drive.
    pub omega_ratio_1: f64,
    /// `omega / omega0` for the second-order drive.
    pub omega_ratio_2: f64,
    pub integrator: IntegratorConfig,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            n: 4,
            tau: 0.25,
            omega_ratio_1: 1e3,
            omega_ratio_2: 1e4,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl ProtocolConfig {
    pub fn model(&self) -> ModelSpec {
        ModelSpec::new(Family::Ising, self.n, Schedule::Oscillating)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    /// Unassisted sweep.
    Ua,
    Cd1,
    Cd2,
    Fe1,
    Fe2,
    /// Spectral gauge potential.
    CdExact,
}

impl Protocol {
    pub const COMPARED: [Protocol; 5] = [Protocol::Ua, Protocol::Cd1, Protocol::Cd2, Protocol::Fe1, Protocol::Fe2];

    pub fn label(self) -> &'static str {
        match self {
            Protocol::Ua => "UA",
            Protocol::Cd1 => "CD1",
            Protocol::Cd2 => "CD2",
            Protocol::Fe1 => "FE1",
            Protocol::Fe2 => "FE2",
            Protocol::CdExact => "CDexact",
        }
    }
}

/// One propagated protocol with fidelities against the adiabatic track.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub protocol: Protocol,
    pub trace: EvolutionTrace,
}

impl ProtocolRun {
    pub fn final_fidelity(&self) -> f64 {
        *self.trace.fidelity_vs_adiabatic.last().expect("trace has report points")
    }
}

/// Propagates one protocol from the empty state and attaches the adiabatic fidelity.
pub fn run_protocol(config: &ProtocolConfig, protocol: Protocol, reference: &[QuantumState]) -> Result<ProtocolRun> {
    let model = config.model();
    let tau = config.tau;
    let psi0 = QuantumState::new(model.initial_state())?;
    let evolve = |g: &dyn Generator, freq: f64| evolve_tdse(g, &psi0, tau, freq, &config.integrator);
    let floquet = |order: usize, ratio: f64| -> Result<EvolutionTrace> {
        let expansion = GaugeExpansion::build(&model, order)?;
        let fc = FloquetConfig::new(model.omega0, ratio, &expansion)?;
        let g = FloquetGenerator::new(&model, tau, &fc)?;
        evolve(&g, g.max_frequency())
    };
    let mut trace = match protocol {
        Protocol::Ua => evolve(&ModelGenerator::new(&model, tau)?, 0.0)?,
        Protocol::Cd1 => evolve(&CdGenerator::new(&model, tau, CdMode::Variational(1))?, 0.0)?,
        Protocol::Cd2 => evolve(&CdGenerator::new(&model, tau, CdMode::Variational(2))?, 0.0)?,
        Protocol::CdExact => evolve(&CdGenerator::new(&model, tau, CdMode::Exact)?, 0.0)?,
        Protocol::Fe1 => floquet(1, config.omega_ratio_1)?,
        Protocol::Fe2 => floquet(2, config.omega_ratio_2)?,
    };
    trace.attach_reference(&model.reference())?;
    trace.attach_fidelity(reference)?;
    Ok(ProtocolRun { protocol, trace })
}

/// Fidelity traces of several protocols on a shared report grid.
#[derive(Clone, Debug)]
pub struct FidelityComparison {
    pub config: ProtocolConfig,
    pub t_over_tau: Vec<f64>,
    pub runs: Vec<ProtocolRun>,
}

impl FidelityComparison {
    pub fn run(&self, protocol: Protocol) -> Option<&ProtocolRun> {
        self.runs.iter().find(|r| r.protocol == protocol)
    }

    pub fn final_fidelity(&self, protocol: Protocol) -> Option<f64> {
        self.run(protocol).map(ProtocolRun::final_fidelity)
    }

    /// Columns `t_over_tau,F_<label>...` in the order of `runs`.
    pub fn to_csv(&self) -> CsvTable {
        let mut header = vec!["t_over_tau".to_string()];
        header.extend(self.runs.iter().map(|r| format!("F_{}", r.protocol.label())));
        let mut table = CsvTable::new(&header);
        for (i, s) in self.t_over_tau.iter().enumerate() {
            let mut row: Vec<crate::export::Cell> = vec![(*s).into()];
            row.extend(self.runs.iter().map(|r| crate::export::Cell::from(r.trace.fidelity_vs_adiabatic[i])));
            table.push(row);
        }
        table
    }
}

pub fn compare_protocols(config: &ProtocolConfig, protocols: &[Protocol]) -> Result<FidelityComparison> {
    if protocols.is_empty() {
        return Err(Error::InvalidInput("no protocols requested".into()));
    }
    let model = config.model();
    let grid = uniform_grid(config.integrator.report_points);
    let track = adiabatic_track(&model, &grid)?;
    let runs = protocols
        .par_iter()
        .map(|&p| run_protocol(config, p, &track.states))
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityComparison {
        config: config.clone(),
        t_over_tau: grid,
        runs,
    })
}

/// UA, CD1, CD2, FE1 and FE2.
pub fn fidelity_comparison(config: &ProtocolConfig) -> Result<FidelityComparison> {
    compare_protocols(config, &Protocol::COMPARED)
}
