use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interpolation schedule in the normalized time `s = t / tau`.
///
/// Every schedule satisfies `g(s) = 1 - f(s)`, so the Ising control
/// `lambda(s)` is the same function as `f(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Schedule {
    /// `f = s`.
    Linear,
    /// Gap-adapted Grover schedule for a Hilbert space of dimension `dim`.
    #[serde(alias = "brach")]
    Brachistochrone { dim: u64 },
    /// `lambda = sin^2((pi/2) sin^2(pi s / 2))`, flat to second order at both ends.
    Oscillating,
}

/// Control values and their `s`-derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleValue {
    pub f: f64,
    pub g: f64,
    pub df: f64,
    pub dg: f64,
}

impl ScheduleValue {
    pub fn lambda(&self) -> f64 {
        self.f
    }

    pub fn dlambda(&self) -> f64 {
        self.df
    }
}

impl Schedule {
    pub fn brachistochrone_for_sites(sites: usize) -> Schedule {
        Schedule::Brachistochrone { dim: 1u64 << sites }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Linear => "linear",
            Schedule::Brachistochrone { .. } => "brachistochrone",
            Schedule::Oscillating => "oscillating",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Schedule::Brachistochrone { dim } = self {
            if *dim < 2 {
                return Err(Error::InvalidInput(format!("brachistochrone needs dim >= 2, got {dim}")));
            }
        }
        Ok(())
    }

    /// Values and first derivatives at `s` in `[0, 1]`.
    pub fn eval(&self, s: f64) -> Result<ScheduleValue> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("schedule evaluated at s = {s} outside [0, 1]")));
        }
        self.validate()?;
        let (f, df) = match *self {
            Schedule::Linear => (s, 1.0),
            Schedule::Brachistochrone { dim } => {
                let r = ((dim - 1) as f64).sqrt();
                let theta = r.atan();
                let arg = (1.0 - 2.0 * s) * theta;
                let sec2 = 1.0 / arg.cos().powi(2);
                ((r - arg.tan()) / (2.0 * r), theta * sec2 / r)
            }
            Schedule::Oscillating => {
                let inner = (PI * s / 2.0).sin().powi(2);
                let lambda = (PI / 2.0 * inner).sin().powi(2);
                let dlambda = PI * PI / 4.0 * (PI * inner).sin() * (PI * s).sin();
                (lambda, dlambda)
            }
        };
        Ok(ScheduleValue {
            f,
            g: 1.0 - f,
            df,
            dg: -df,
        })
    }
}

/// Free-function form of [`Schedule::eval`].
pub fn schedule_eval(schedule: &Schedule, s: f64) -> Result<ScheduleValue> {
    schedule.eval(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Schedule; 4] = [
        Schedule::Linear,
        Schedule::Brachistochrone { dim: 8 },
        Schedule::Brachistochrone { dim: 1 << 12 },
        Schedule::Oscillating,
    ];

    #[test]
    fn boundary_values() {
        for sch in ALL {
            let a = sch.eval(0.0).unwrap();
            let b = sch.eval(1.0).unwrap();
            assert!(a.f.abs() < 1e-12 && (a.g - 1.0).abs() < 1e-12, "{sch:?}");
            assert!((b.f - 1.0).abs() < 1e-12 && b.g.abs() < 1e-12, "{sch:?}");
        }
    }

    #[test]
    fn midpoint_values() {
        assert!((Schedule::Brachistochrone { dim: 16 }.eval(0.5).unwrap().f - 0.5).abs() < 1e-15);
        assert!((Schedule::Oscillating.eval(0.5).unwrap().f - 0.5).abs() < 1e-15);
    }

    #[test]
    fn oscillating_is_flat_at_the_ends() {
        let sch = Schedule::Oscillating;
        for s in [0.0, 1.0] {
            assert!(sch.eval(s).unwrap().df.abs() < 1e-15);
        }
        // dlambda/ds = O(s^3) near s = 0 (and symmetrically at 1), so the second derivative vanishes too
        let h = 1e-4;
        let slope0 = (sch.eval(h).unwrap().df - sch.eval(0.0).unwrap().df) / h;
        let slope1 = (sch.eval(1.0).unwrap().df - sch.eval(1.0 - h).unwrap().df) / h;
        assert!(slope0.abs() < 1e-5 && slope1.abs() < 1e-5, "{slope0} {slope1}");
    }

    #[test]
    fn analytic_derivatives_match_central_differences() {
        let h = 1e-6;
        for sch in ALL {
            for i in 1..=101 {
                let s = i as f64 / 102.0;
                let v = sch.eval(s).unwrap();
                let fd = (sch.eval(s + h).unwrap().f - sch.eval(s - h).unwrap().f) / (2.0 * h);
                assert!((v.df - fd).abs() < 1e-6, "{sch:?} s={s} {} vs {fd}", v.df);
                assert_eq!(v.dg, -v.df);
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(Schedule::Linear.eval(1.5), Err(Error::Domain(_))));
        assert!(Schedule::Oscillating.eval(-1e-9).is_err());
        assert!(Schedule::Brachistochrone { dim: 1 }.eval(0.5).is_err());
    }
}
