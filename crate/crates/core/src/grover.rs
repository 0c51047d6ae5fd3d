//! Closed-form adiabatic solution of the Grover battery.
//!
//! In the adiabatic limit the state is `a (|0...0> + k sum_{b != 0} |b>)`, so a
//! single real ratio `k(s)` carries the whole charging process. Units:
//! energies in `Omega_0`, times in `1/Omega_0`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::models::Schedule;

/// Adiabatic Grover state: amplitude `a` on the empty state, `a k` on each other basis state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroverState {
    pub dim: u64,
    pub k: C64,
    pub a: C64,
}

impl GroverState {
    /// Normalized state with real positive `a`.
    pub fn new(dim: u64, k: C64) -> Self {
        let a = 1.0 / (1.0 + (dim - 1) as f64 * k.norm_sqr()).sqrt();
        Self {
            dim,
            k,
            a: C64::new(a, 0.0),
        }
    }

    pub fn adiabatic(s: f64, dim: u64, schedule: &Schedule) -> Result<Self> {
        Ok(Self::new(dim, C64::new(k_adiabatic(s, dim, schedule)?, 0.0)))
    }

    pub fn to_vector(&self) -> Vec<C64> {
        let mut v = vec![self.a * self.k; self.dim as usize];
        v[0] = self.a;
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Linear,
    #[serde(alias = "brachistochrone")]
    Brach,
}

impl ScheduleKind {
    pub fn schedule(&self, dim: u64) -> Schedule {
        match self {
            ScheduleKind::Linear => Schedule::Linear,
            ScheduleKind::Brach => Schedule::Brachistochrone { dim },
        }
    }

    /// `tau_lin = N`, `tau_brach = sqrt(N)`.
    pub fn total_time(&self, dim: u64) -> f64 {
        match self {
            ScheduleKind::Linear => dim as f64,
            ScheduleKind::Brach => (dim as f64).sqrt(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::Linear => "linear",
            ScheduleKind::Brach => "brach",
        }
    }
}

fn check_dim(dim: u64) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!("Grover dimension must be >= 2, got {dim}")));
    }
    Ok(())
}

/// `k` and `dk/ds` at `s`.
pub fn k_adiabatic_with_derivative(s: f64, dim: u64, schedule: &Schedule) -> Result<(f64, f64)> {
    check_dim(dim)?;
    let c = schedule.eval(s)?;
    let nbar = 1.0 - 1.0 / dim as f64;
    let disc = 1.0 - 4.0 * c.f * c.g * nbar;
    if disc < 0.0 {
        return Err(Error::Domain(format!("negative discriminant {disc} at s = {s}")));
    }
    let r = disc.sqrt();
    // rationalized root: exact at f = 0 where the textbook form is 0/0
    let k = 1.0 - 2.0 * c.g / (1.0 + r);
    let dr = -2.0 * nbar * (c.df * c.g + c.f * c.dg) / r;
    let dk = -2.0 * c.dg / (1.0 + r) + 2.0 * c.g * dr / (1.0 + r).powi(2);
    Ok((k.clamp(0.0, 1.0), dk))
}

pub fn k_adiabatic(s: f64, dim: u64, schedule: &Schedule) -> Result<f64> {
    Ok(k_adiabatic_with_derivative(s, dim, schedule)?.0)
}

/// `<psi|H_ref|psi> = -n (1 - |k|^2) / (1 + (N - 1) |k|^2)`.
pub fn grover_reference_energy(state: &GroverState, n: usize) -> f64 {
    let k2 = state.k.norm_sqr();
    -(n as f64) * (1.0 - k2) / (1.0 + (state.dim - 1) as f64 * k2)
}

fn sites_of(dim: u64) -> Result<usize> {
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::InvalidInput(format!("Grover dimension must be a power of two >= 2, got {dim}")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `d<H_ref>/ds`, i.e. `tau P(s)`.
pub fn grover_energy_rate(s: f64, dim: u64, schedule: &Schedule) -> Result<f64> {
    let n = sites_of(dim)?;
    let (k, dk) = k_adiabatic_with_derivative(s, dim, schedule)?;
    let denom = 1.0 + (dim - 1) as f64 * k * k;
    Ok(n as f64 * dim as f64 * 2.0 * k * dk / (denom * denom))
}

/// Instantaneous power `P(s)` for total time `tau`.
pub fn grover_power(s: f64, dim: u64, tau: f64, schedule: &Schedule) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    Ok(grover_energy_rate(s, dim, schedule)? / tau)
}

fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // tolerance floored at roundoff
    if depth == 0 || delta.abs() <= 15.0 * tol.max(1e-13 * (left + right).abs()) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // 16 initial panels
    let panels = 16;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, if i + 1 == panels { b } else { a + (i + 1) as f64 * h });
            let xm = 0.5 * (x0 + x1);
            let (f0, f1, fm) = (f(x0), f(x1), f(xm));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            simpson_step(&f, x0, f0, x1, f1, xm, fm, whole, tol / panels as f64, 30)
        })
        .sum()
}

/// `int_0^1 tau P(s) ds`, which must equal `Delta E = n`.
pub fn grover_energy_integral(dim: u64, schedule: &Schedule) -> Result<f64> {
    let n = sites_of(dim)?;
    let rate = |s: f64| grover_energy_rate(s, dim, schedule).unwrap_or(f64::NAN);
    let total = integrate(rate, 0.0, 1.0, 1e-10 * n as f64);
    if !total.is_finite() {
        return Err(Error::Consistency("energy integrand not finite".into()));
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerScanRow {
    pub dim: u64,
    pub tau: f64,
    pub s_at_max: f64,
    /// `P_max / P_0` with `P_0 = Omega_0 Delta E`.
    pub p_max: f64,
}

pub const SCAN_GRID_POINTS: usize = 2001;
pub const GOLDEN_TOL: f64 = 1e-6;

/// Maximizer of a unimodal `f` on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn scan_one(dim: u64, kind: ScheduleKind) -> Result<PowerScanRow> {
    let n = sites_of(dim)?;
    if dim < 4 {
        return Err(Error::InvalidInput(format!("scan needs N >= 4, got {dim}")));
    }
    let schedule = kind.schedule(dim);
    let tau = kind.total_time(dim);
    // P / P_0 with Delta E = n
    let p = |s: f64| grover_energy_rate(s, dim, &schedule).map(|r| r / (tau * n as f64));
    let last = SCAN_GRID_POINTS - 1;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..=last {
        let v = p(i as f64 / last as f64)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let lo = best.0.saturating_sub(1) as f64 / last as f64;
    let hi = (best.0 + 1).min(last) as f64 / last as f64;
    let (s_ref, p_ref) = golden_section_max(|s| p(s).unwrap_or(f64::NEG_INFINITY), lo, hi, GOLDEN_TOL);
    let (s_at_max, p_max) = if p_ref >= best.1 { (s_ref, p_ref) } else { (best.0 as f64 / last as f64, best.1) };
    Ok(PowerScanRow {
        dim,
        tau,
        s_at_max,
        p_max,
    })
}

/// Maximum power for each `N`, sorted by `N`.
pub fn grover_max_power_scan(dims: &[u64], kind: ScheduleKind) -> Result<Vec<PowerScanRow>> {
    let mut rows = dims.par_iter().map(|&d| scan_one(d, kind)).collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.dim);
    Ok(rows)
}

pub fn power_scan_csv(rows: &[PowerScanRow]) -> CsvTable {
    let mut t = CsvTable::new(&["N", "tau", "s_at_max", "p_max_over_P0"]);
    for r in rows {
        t.push(vec![r.dim.into(), r.tau.into(), r.s_at_max.into(), r.p_max.into()]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values() {
        for sch in [Schedule::Linear, Schedule::Brachistochrone { dim: 16 }] {
            assert_eq!(k_adiabatic(0.0, 16, &sch).unwrap(), 0.0);
            assert!((k_adiabatic(1.0, 16, &sch).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reference_energy_limits() {
        let empty = GroverState::new(8, C64::new(0.0, 0.0));
        let full = GroverState::new(8, C64::new(1.0, 0.0));
        assert_eq!(grover_reference_energy(&empty, 3), -3.0);
        assert_eq!(grover_reference_energy(&full, 3), 0.0);
        let v = GroverState::adiabatic(0.3, 8, &Schedule::Linear).unwrap().to_vector();
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_against_richardson_differences() {
        for sch in [Schedule::Linear, Schedule::Brachistochrone { dim: 1024 }] {
            for i in 1..40 {
                let s = i as f64 / 40.0;
                let d = |h: f64| (k_adiabatic(s + h, 1024, &sch).unwrap() - k_adiabatic(s - h, 1024, &sch).unwrap()) / (2.0 * h);
                let h = 1e-3;
                let richardson = (4.0 * d(h / 2.0) - d(h)) / 3.0;
                let (_, dk) = k_adiabatic_with_derivative(s, 1024, &sch).unwrap();
                assert!((dk - richardson).abs() < 1e-6 * dk.abs().max(1.0), "s={s}: {dk} vs {richardson}");
            }
        }
    }

    #[test]
    fn power_vanishes_at_start() {
        assert_eq!(grover_power(0.0, 64, 64.0, &Schedule::Linear).unwrap(), 0.0);
        assert!(grover_power(0.5, 64, 0.0, &Schedule::Linear).is_err());
    }

    #[test]
    fn simpson_and_golden_section() {
        assert!((integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12) - 2.0).abs() < 1e-11);
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-7 && fx <= 0.0);
    }

    #[test]
    fn single_row_scan() {
        let rows = grover_max_power_scan(&[64], ScheduleKind::Linear).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].s_at_max > 0.0 && rows[0].s_at_max < 1.0);
        assert!(grover_max_power_scan(&[2], ScheduleKind::Linear).is_err());
        assert!(grover_max_power_scan(&[12], ScheduleKind::Linear).is_err());
        let csv = power_scan_csv(&rows).render();
        assert!(csv.starts_with("N,tau,s_at_max,p_max_over_P0\n64,"));
    }
}
