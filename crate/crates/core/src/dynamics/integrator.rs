use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{fidelity, l2, Generator, QuantumState};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;

pub const MIN_STEPS_PER_PERIOD: usize = 40;
pub const MIN_REPORT_POINTS: usize = 201;

/// Largest tolerated `| ||psi|| - 1 |` before renormalization.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Fixed-step classical Runge-Kutta settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Steps per period of the fastest angular frequency.
    pub steps_per_period: usize,
    pub renormalize: bool,
    pub report_points: usize,
    /// Times at which the generator is sampled for a Gershgorin frequency bound.
    pub frequency_samples: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            steps_per_period: 512,
            renormalize: false,
            report_points: MIN_REPORT_POINTS,
            frequency_samples: 257,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < MIN_STEPS_PER_PERIOD {
            return Err(Error::InvalidInput(format!(
                "steps_per_period must be >= {MIN_STEPS_PER_PERIOD}, got {}",
                self.steps_per_period
            )));
        }
        if self.report_points < MIN_REPORT_POINTS {
            return Err(Error::InvalidInput(format!(
                "report_points must be >= {MIN_REPORT_POINTS}, got {}",
                self.report_points
            )));
        }
        if self.frequency_samples < 2 {
            return Err(Error::InvalidInput("frequency_samples must be >= 2".into()));
        }
        Ok(())
    }
}

/// Propagated states at uniformly spaced report times.
#[derive(Clone, Debug)]
pub struct EvolutionTrace {
    pub tau: f64,
    /// `t / tau` at each report point.
    pub s_grid: Vec<f64>,
    pub states: Vec<QuantumState>,
    /// `<H_ref>` per report point, once attached.
    pub e_ref: Vec<f64>,
    /// Fidelity against a reference trajectory, once attached.
    pub fidelity_vs_adiabatic: Vec<f64>,
    pub step: f64,
    pub steps: usize,
    /// Largest `| ||psi|| - 1 |` observed at the report points.
    pub max_norm_drift: f64,
}

impl EvolutionTrace {
    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("trace has report points")
    }

    /// Norm drift normalized to `10^4` steps.
    pub fn drift_per_10k_steps(&self) -> f64 {
        self.max_norm_drift * 1e4 / self.steps.max(1) as f64
    }

    pub fn attach_reference<M: LinearOperator + ?Sized>(&mut self, h_ref: &M) -> Result<()> {
        let mut tmp = vec![C64::new(0.0, 0.0); h_ref.dim()];
        self.e_ref = self
            .states
            .iter()
            .map(|psi| {
                if psi.dim() != h_ref.dim() {
                    return Err(Error::Dimension {
                        expected: h_ref.dim(),
                        found: psi.dim(),
                    });
                }
                h_ref.apply(psi.amplitudes(), &mut tmp);
                let num = super::inner(psi.amplitudes(), &tmp).re;
                Ok(num / psi.norm().powi(2))
            })
            .collect::<Result<_>>()?;
        Ok(())
    }

    pub fn attach_fidelity(&mut self, reference: &[QuantumState]) -> Result<()> {
        if reference.len() != self.states.len() {
            return Err(Error::Dimension {
                expected: self.states.len(),
                found: reference.len(),
            });
        }
        self.fidelity_vs_adiabatic = self
            .states
            .iter()
            .zip(reference)
            .map(|(a, b)| Ok(fidelity(a, b)? / a.norm()))
            .collect::<Result<_>>()?;
        Ok(())
    }
}

/// `psi(t + h)` with `d psi/dt = -i H(t) psi`.
struct Rk4 {
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    fn step<G: Generator + ?Sized>(&mut self, g: &G, t: f64, h: f64, psi: &mut [C64]) -> Result<()> {
        let minus_i = C64::new(0.0, -1.0);
        let stages = [(0.0, 0.0), (0.5, 0.5), (0.5, 0.5), (1.0, 1.0)];
        for (stage, &(ct, cy)) in stages.iter().enumerate() {
            if stage == 0 {
                self.tmp.copy_from_slice(psi);
            } else {
                let prev = &self.k[stage - 1];
                for ((x, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(prev) {
                    *x = p + k * (cy * h);
                }
            }
            let out = &mut self.k[stage];
            g.apply(t + ct * h, &self.tmp, out)?;
            out.iter_mut().for_each(|x| *x *= minus_i);
        }
        let [k1, k2, k3, k4] = &self.k;
        for (i, p) in psi.iter_mut().enumerate() {
            *p += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        Ok(())
    }
}

/// Integrates `i d|psi>/dt = H(t)|psi>` on `[0, tau]`.
///
/// The step resolves `max(max_frequency, Gershgorin bound of H)` with
/// `config.steps_per_period` steps per period.
pub fn evolve_tdse<G: Generator + ?Sized>(
    generator: &G,
    psi0: &QuantumState,
    tau: f64,
    max_frequency: f64,
    config: &IntegratorConfig,
) -> Result<EvolutionTrace> {
    config.validate()?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    let dim = generator.dim();
    if psi0.dim() != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: psi0.dim(),
        });
    }
    QuantumState::new(psi0.amplitudes().to_vec())?;

    let mut freq = max_frequency.max(2.0 * PI / tau);
    for j in 0..config.frequency_samples {
        let h = generator.at(tau * j as f64 / (config.frequency_samples - 1) as f64)?;
        h.ensure_hermitian()?;
        freq = freq.max(h.gershgorin_bound());
    }
    let segments = config.report_points - 1;
    let h_max = 2.0 * PI / (config.steps_per_period as f64 * freq);
    let per_segment = (tau / (segments as f64 * h_max)).ceil().max(1.0) as usize;
    let steps = per_segment * segments;
    let h = tau / steps as f64;

    let mut psi = psi0.amplitudes().to_vec();
    let mut rk = Rk4::new(dim);
    let mut states = Vec::with_capacity(config.report_points);
    states.push(psi0.clone());
    let mut max_drift = 0.0f64;
    for seg in 0..segments {
        for i in 0..per_segment {
            let t = (seg * per_segment + i) as f64 * h;
            rk.step(generator, t, h, &mut psi)?;
            if config.renormalize {
                let norm = l2(&psi);
                max_drift = max_drift.max((norm - 1.0).abs());
                psi.iter_mut().for_each(|x| *x /= norm);
            }
        }
        let drift = (l2(&psi) - 1.0).abs();
        max_drift = max_drift.max(drift);
        if max_drift > NORM_DRIFT_LIMIT || !drift.is_finite() {
            return Err(Error::IntegrationAccuracy { drift: max_drift, step: h });
        }
        states.push(QuantumState::unchecked(psi.clone()));
    }
    Ok(EvolutionTrace {
        tau,
        s_grid: (0..=segments).map(|j| j as f64 / segments as f64).collect(),
        states,
        e_ref: Vec::new(),
        fidelity_vs_adiabatic: Vec::new(),
        step: h,
        steps,
        max_norm_drift: max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ConstantGenerator;
    use crate::operator::{to_dense, OperatorSum, PauliTerm};

    fn single(letter: &str) -> DenseOp {
        to_dense(&OperatorSum::from_terms(1, [PauliTerm::parse(1.0, letter).unwrap()]).unwrap()).unwrap()
    }

    type DenseOp = crate::operator::DenseOperator;

    #[test]
    fn stationary_state() {
        let g = ConstantGenerator(single("Z"));
        let psi0 = QuantumState::basis(2, 0);
        let tr = evolve_tdse(&g, &psi0, 3.7, 1.0, &IntegratorConfig::default()).unwrap();
        assert!((fidelity(tr.final_state(), &psi0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(tr.states.len(), 201);
    }

    #[test]
    fn rabi_half_period() {
        let g = ConstantGenerator(single("X"));
        let tr = evolve_tdse(&g, &QuantumState::basis(2, 0), PI / 2.0, 1.0, &IntegratorConfig::default()).unwrap();
        let p1 = tr.final_state().amplitudes()[1].norm_sqr();
        assert!((p1 - 1.0).abs() < 1e-8, "{p1}");
    }

    #[test]
    fn coarse_steps_are_detected() {
        let cfg = IntegratorConfig {
            steps_per_period: 40,
            ..IntegratorConfig::default()
        };
        // stable but lossy for 40 steps per period over many periods
        let g = ConstantGenerator(single("X").scale(1.0));
        let tr = evolve_tdse(&g, &QuantumState::basis(2, 0), 2000.0, 1.0, &cfg);
        assert!(matches!(tr, Err(Error::IntegrationAccuracy { .. })));
        let renorm = IntegratorConfig {
            renormalize: true,
            ..cfg
        };
        // per-step loss stays below the limit, so renormalized runs go through
        let tr = evolve_tdse(&g, &QuantumState::basis(2, 0), 2000.0, 1.0, &renorm).unwrap();
        assert!((tr.final_state().norm() - 1.0).abs() < 1e-12);
        assert!(tr.max_norm_drift > 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = IntegratorConfig {
            steps_per_period: 10,
            ..IntegratorConfig::default()
        };
        assert!(bad.validate().is_err());
        let parsed: IntegratorConfig = toml::from_str("renormalize = true").unwrap();
        assert!(parsed.renormalize && parsed.steps_per_period == 512);
        assert!(toml::from_str::<IntegratorConfig>("steps = 3").is_err());
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let mut m = single("X");
        m.set(0, 1, C64::new(2.0, 0.0));
        let g = ConstantGenerator(m);
        assert!(matches!(
            evolve_tdse(&g, &QuantumState::basis(2, 0), 1.0, 1.0, &IntegratorConfig::default()),
            Err(Error::NotHermitian { .. })
        ));
    }
}
