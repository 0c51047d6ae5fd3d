//! Experiment configuration: one TOML table per subcommand.

use serde::{Deserialize, Serialize};
use supercharge::dynamics::IntegratorConfig;
use supercharge::grover::ScheduleKind;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub grover_scan: GroverScanConfig,
    pub grover_brach: GroverBrachConfig,
    pub ising_power: IsingPowerConfig,
    pub ising_gap: IsingGapConfig,
    pub cd_fidelity: CdFidelityConfig,
    pub advantage: AdvantageConfig,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// `N = 2^n` for `n` in `nmin..=nmax`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroverScanConfig {
    pub nmin: usize,
    pub nmax: usize,
    pub schedules: Vec<ScheduleKind>,
}

impl Default for GroverScanConfig {
    fn default() -> Self {
        Self {
            nmin: 4,
            nmax: 16,
            schedules: vec![ScheduleKind::Linear, ScheduleKind::Brach],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroverBrachConfig {
    pub dims: Vec<u64>,
    pub points: usize,
}

impl Default for GroverBrachConfig {
    fn default() -> Self {
        Self {
            dims: vec![16, 256, 4096, 65536],
            points: 201,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsingPowerConfig {
    pub nmin: usize,
    pub nmax: usize,
    pub parallel_baseline: bool,
}

impl Default for IsingPowerConfig {
    fn default() -> Self {
        Self {
            nmin: 4,
            nmax: 10,
            parallel_baseline: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsingGapConfig {
    pub ns: Vec<usize>,
    pub points: usize,
}

impl Default for IsingGapConfig {
    fn default() -> Self {
        Self {
            ns: vec![4, 6, 8, 10],
            points: 201,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CdFidelityConfig {
    pub n: usize,
    /// `Omega_0 tau`.
    pub tau: f64,
    /// Expansion orders to drive with.
    pub ell: Vec<usize>,
    pub omega_ratio_1: f64,
    pub omega_ratio_2: f64,
    pub integrator: IntegratorConfig,
}

impl Default for CdFidelityConfig {
    fn default() -> Self {
        Self {
            n: 4,
            tau: 0.25,
            ell: vec![1, 2],
            omega_ratio_1: 1e3,
            omega_ratio_2: 1e4,
            integrator: IntegratorConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdvantageConfig {
    pub nmin: usize,
    pub nmax: usize,
}

impl Default for AdvantageConfig {
    fn default() -> Self {
        Self { nmin: 2, nmax: 11 }
    }
}
