use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expansion::{pair_at, GaugeExpansion, UniformCubic, GAUGE_GRID_POINTS};
use super::gauge::{check_order, gauge_exact};
use crate::dynamics::{apply_pair, Generator};
use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec, Schedule};
use crate::operator::{commutator, DenseOperator, LinearOperator, OperatorSum};

/// Smallest accepted `omega / omega0`.
pub const MIN_FLOQUET_RATIO: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CdMode {
    /// Variational expansion of the given order.
    Variational(usize),
    /// Spectral gauge potential.
    Exact,
}

/// Fourier coefficients of the high-frequency drive from the expansion coefficients.
pub fn beta_coefficients(alphas: &[f64], omega0: f64, order: usize) -> Result<Vec<f64>> {
    check_order(order)?;
    if alphas.len() < order {
        return Err(Error::InvalidInput(format!("need {order} coefficients, got {}", alphas.len())));
    }
    let mut betas = vec![2.0 * omega0 * alphas[0]];
    if order == 2 {
        betas.push(2.0 * omega0 * (24.0 * omega0 * omega0 * alphas[1] + 3.0 * alphas[0]));
    }
    Ok(betas)
}

fn check_family(model: &ModelSpec) -> Result<()> {
    model.validate()?;
    if model.family == Family::Grover {
        return Err(Error::InvalidInput("counter-diabatic drives need the ising or parallel battery".into()));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}

/// `(lambda, dlambda/dt)` at time `t`.
fn control(schedule: &Schedule, tau: f64, t: f64) -> Result<(f64, f64)> {
    let c = schedule.eval((t / tau).clamp(0.0, 1.0))?;
    Ok((c.f, c.df / tau))
}

fn combine_into(terms: &[(&DenseOperator, C64)], input: &[C64], output: &mut [C64]) {
    let n = input.len();
    for (i, o) in output.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (op, c) in terms {
            let row = op.row(i);
            let mut part = C64::new(0.0, 0.0);
            for j in 0..n {
                part += row[j] * input[j];
            }
            acc += c * part;
        }
        *o = acc;
    }
}

fn dense_sum(terms: &[(&DenseOperator, C64)]) -> Result<DenseOperator> {
    let mut out = DenseOperator::zeros(terms[0].0.dim());
    for (op, c) in terms {
        out.add_scaled(*c, op)?;
    }
    Ok(out)
}

enum CdGauge {
    /// `O_1` and the three pieces of `O_2(lambda) = (1-l)^2 Q_aa + l(1-l) Q_ab + l^2 Q_bb`.
    Variational {
        expansion: GaugeExpansion,
        o1: DenseOperator,
        q: Option<[DenseOperator; 3]>,
    },
    /// Real and imaginary parts of the exact gauge potential on a uniform grid.
    Exact { table: UniformCubic },
}

/// `H(lambda(t)) + dlambda/dt A(lambda(t))`.
pub struct CdGenerator {
    a: DenseOperator,
    b: DenseOperator,
    schedule: Schedule,
    tau: f64,
    mode: CdMode,
    gauge: CdGauge,
}

pub fn h_cd_generator(model: &ModelSpec, tau: f64, mode: CdMode) -> Result<CdGenerator> {
    CdGenerator::new(model, tau, mode)
}

impl CdGenerator {
    pub fn new(model: &ModelSpec, tau: f64, mode: CdMode) -> Result<Self> {
        check_family(model)?;
        check_tau(tau)?;
        let (a, b) = model.endpoint_operators()?;
        let gauge = match mode {
            CdMode::Variational(order) => {
                let expansion = GaugeExpansion::build(model, order)?;
                let (sa, sb) = expansion.endpoints().clone();
                let c = commutator(&sa, &sb)?;
                let q = if order == 2 {
                    let ac = commutator(&sa, &c)?;
                    let bc = commutator(&sb, &c)?;
                    let qaa = commutator(&sa, &ac)?;
                    let qab = commutator(&sa, &bc)?.add(&commutator(&sb, &ac)?)?;
                    let qbb = commutator(&sb, &bc)?;
                    Some([qaa.to_dense()?, qab.to_dense()?, qbb.to_dense()?])
                } else {
                    None
                };
                CdGauge::Variational {
                    expansion,
                    o1: c.to_dense()?,
                    q,
                }
            }
            CdMode::Exact => {
                let dh = b.combine(1.0, &a, -1.0)?;
                let last = GAUGE_GRID_POINTS - 1;
                let values = (0..=last)
                    .into_par_iter()
                    .map(|i| {
                        let l = i as f64 / last as f64;
                        let g = gauge_exact(&a.combine(1.0 - l, &b, l)?, &dh)?;
                        Ok(g.as_slice().iter().flat_map(|z| [z.re, z.im]).collect())
                    })
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                CdGauge::Exact {
                    table: UniformCubic::new(values, 1.0 / last as f64)?,
                }
            }
        };
        Ok(Self {
            a,
            b,
            schedule: model.schedule,
            tau,
            mode,
            gauge,
        })
    }

    pub fn mode(&self) -> CdMode {
        self.mode
    }

    /// Gauge potential at `lambda`.
    pub fn gauge_at(&self, lambda: f64) -> Result<DenseOperator> {
        match &self.gauge {
            CdGauge::Variational { expansion, o1, q } => {
                let alpha = expansion.alphas_at(lambda);
                let mut terms = vec![(o1, C64::new(0.0, alpha[0]))];
                if let Some([qaa, qab, qbb]) = q {
                    let i2 = C64::new(0.0, alpha[1]);
                    let m = 1.0 - lambda;
                    terms.push((qaa, i2 * m * m));
                    terms.push((qab, i2 * lambda * m));
                    terms.push((qbb, i2 * lambda * lambda));
                }
                dense_sum(&terms)
            }
            CdGauge::Exact { table } => {
                let v = table.eval(lambda);
                let data = v.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
                let g = DenseOperator::from_row_major(self.a.dim(), data)?;
                Ok(g.combine(0.5, &g.adjoint(), 0.5)?)
            }
        }
    }
}

impl Generator for CdGenerator {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn at(&self, t: f64) -> Result<DenseOperator> {
        let (l, rate) = control(&self.schedule, self.tau, t)?;
        let mut h = self.a.combine(1.0 - l, &self.b, l)?;
        if rate != 0.0 {
            h.add_scaled(rate, &self.gauge_at(l)?)?;
        }
        Ok(h)
    }

    fn apply(&self, t: f64, input: &[C64], output: &mut [C64]) -> Result<()> {
        let (l, rate) = control(&self.schedule, self.tau, t)?;
        match &self.gauge {
            CdGauge::Variational { expansion, o1, q } => {
                let alpha = expansion.alphas_at(l);
                let re = |x: f64| C64::new(x, 0.0);
                let mut terms = vec![(&self.a, re(1.0 - l)), (&self.b, re(l)), (o1, C64::new(0.0, rate * alpha[0]))];
                if let Some([qaa, qab, qbb]) = q {
                    let i2 = C64::new(0.0, rate * alpha[1]);
                    let m = 1.0 - l;
                    terms.push((qaa, i2 * m * m));
                    terms.push((qab, i2 * l * m));
                    terms.push((qbb, i2 * l * l));
                }
                combine_into(&terms, input, output);
            }
            CdGauge::Exact { .. } => self.at(t)?.matvec(input, output),
        }
        Ok(())
    }
}

/// Parameters of the high-frequency drive replacing the gauge term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloquetConfig {
    /// Reference angular frequency `2 pi Omega_0`.
    pub omega0: f64,
    pub omega: f64,
    pub order: usize,
    /// `(beta_1..beta_order)` on the uniform expansion grid.
    pub betas: Vec<Vec<f64>>,
}

impl FloquetConfig {
    /// Drive at `omega = ratio * omega0` with coefficients from `expansion`.
    pub fn new(model_omega0: f64, ratio: f64, expansion: &GaugeExpansion) -> Result<Self> {
        if !(ratio >= MIN_FLOQUET_RATIO && ratio.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "omega/omega0 must be at least {MIN_FLOQUET_RATIO}, got {ratio}"
            )));
        }
        let omega0 = 2.0 * PI * model_omega0;
        let betas = expansion
            .alphas
            .iter()
            .map(|a| beta_coefficients(a, omega0, expansion.order))
            .collect::<Result<_>>()?;
        Ok(Self {
            omega0,
            omega: ratio * omega0,
            order: expansion.order,
            betas,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.omega / self.omega0
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.order)?;
        if !(self.omega0 > 0.0 && self.omega / self.omega0 >= MIN_FLOQUET_RATIO) {
            return Err(Error::InvalidInput(format!(
                "omega/omega0 must be at least {MIN_FLOQUET_RATIO}, got {}",
                self.omega / self.omega0
            )));
        }
        if self.betas.iter().any(|b| b.len() != self.order || b.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidInput("malformed beta table".into()));
        }
        Ok(())
    }
}

/// `[1 + (omega/omega0) cos(omega t)] H + [sum_k beta_k sin((2k-1) omega t)] dH/dlambda dlambda/dt`.
pub struct FloquetGenerator {
    a: DenseOperator,
    b: DenseOperator,
    symbolic: (OperatorSum, OperatorSum),
    schedule: Schedule,
    tau: f64,
    config: FloquetConfig,
    table: UniformCubic,
}

pub fn h_floquet_generator(model: &ModelSpec, tau: f64, config: &FloquetConfig) -> Result<FloquetGenerator> {
    FloquetGenerator::new(model, tau, config)
}

impl FloquetGenerator {
    pub fn new(model: &ModelSpec, tau: f64, config: &FloquetConfig) -> Result<Self> {
        check_family(model)?;
        check_tau(tau)?;
        config.validate()?;
        let (a, b) = model.endpoint_operators()?;
        let table = UniformCubic::new(config.betas.clone(), 1.0 / (config.betas.len() - 1) as f64)?;
        Ok(Self {
            a,
            b,
            symbolic: model.symbolic_endpoints()?,
            schedule: model.schedule,
            tau,
            config: config.clone(),
            table,
        })
    }

    /// Angular frequency the propagator must resolve.
    pub fn max_frequency(&self) -> f64 {
        self.config.omega
    }

    pub fn config(&self) -> &FloquetConfig {
        &self.config
    }

    /// Coefficients `(c_a, c_b)` of the endpoint operators at time `t`.
    fn coefficients(&self, t: f64) -> Result<(f64, f64)> {
        let (l, rate) = control(&self.schedule, self.tau, t)?;
        let w = self.config.omega;
        let amp = 1.0 + (w / self.config.omega0) * (w * t).cos();
        let betas = self.table.eval(l);
        let drive: f64 = betas
            .iter()
            .enumerate()
            .map(|(k, beta)| beta * ((2 * k + 1) as f64 * w * t).sin())
            .sum::<f64>()
            * rate;
        Ok((amp * (1.0 - l) - drive, amp * l + drive))
    }

    /// The generator at `t` as a Pauli sum.
    pub fn symbolic_at(&self, t: f64) -> Result<OperatorSum> {
        let (ca, cb) = self.coefficients(t)?;
        self.symbolic.0.combine(ca, &self.symbolic.1, cb)
    }

    /// `H(lambda)` and `dH/dlambda` as Pauli sums.
    pub fn symbolic_pair(&self, lambda: f64) -> Result<(OperatorSum, OperatorSum)> {
        pair_at(&self.symbolic, lambda)
    }
}

impl Generator for FloquetGenerator {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn at(&self, t: f64) -> Result<DenseOperator> {
        let (ca, cb) = self.coefficients(t)?;
        self.a.combine(ca, &self.b, cb)
    }

    fn apply(&self, t: f64, input: &[C64], output: &mut [C64]) -> Result<()> {
        let (ca, cb) = self.coefficients(t)?;
        apply_pair(&self.a, ca, &self.b, cb, input, output);
        Ok(())
    }
}
