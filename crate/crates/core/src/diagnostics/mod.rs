//! Phase-transition probe, driving-potential advantage ratio and power-law fits.

mod advantage;
mod fit;
mod gap;

pub use advantage::{
    advantage_closed_form, advantage_csv, advantage_ratio, advantage_table, driving_potential_norm, AdvantageMethod,
    AdvantageReport, ADVANTAGE_TOL,
};
pub use fit::{loglog_fit, PowerLawFit};
pub use gap::{
    curvature_dip, gap_probe, gap_probe_csv, gap_probe_uniform, max_second_difference, GapProbeRow, MIN_PROBE_POINTS,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{collective_potential, parallel_potential};
    use crate::operator::OperatorSum;

    #[test]
    fn fit_examples() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0, 16.0].iter().map(|&x| (x, 7.0 * x * x)).collect();
        let f = loglog_fit(&pts).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert!((f.prefactor - 7.0).abs() < 1e-11);
        assert!(f.rms < 1e-12);
        let pts: Vec<(f64, f64)> = [1.0, 3.0, 9.0].iter().map(|&x: &f64| (x, 3.0 / x.sqrt())).collect();
        assert!((loglog_fit(&pts).unwrap().exponent + 0.5).abs() < 1e-12);
        assert!(loglog_fit(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(loglog_fit(&[(1.0, 1.0), (2.0, -2.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn potential_ranges() {
        assert!((driving_potential_norm(&parallel_potential(4, 1.0)).unwrap() - 8.0).abs() < 1e-12);
        assert!((driving_potential_norm(&collective_potential(3, 1.0)).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(driving_potential_norm(&OperatorSum::zero(3)).unwrap(), 0.0);
    }

    #[test]
    fn ratio_examples() {
        assert!((advantage_ratio(4).unwrap().ratio - 1.0).abs() < 1e-12);
        assert!((advantage_ratio(3).unwrap().ratio - 2.0 / 3.0).abs() < 1e-12);
        assert!(advantage_ratio(1).is_err());
        assert!(advantage_ratio(12).is_err());
        let csv = advantage_csv(&advantage_table(&[3, 2]).unwrap()).render();
        assert!(csv.starts_with("n,v_par,v_col,ratio\n2,"));
    }

    #[test]
    fn probe_endpoints_and_flags() {
        for n in [3, 4] {
            let rows = gap_probe_uniform(n, 201).unwrap();
            assert!((rows[0].e0 + n as f64).abs() < 1e-10);
            let end = if n % 2 == 0 { -(n as f64) } else { -(n as f64 - 2.0) };
            assert!((rows[200].e0 - end).abs() < 1e-10);
            assert_eq!(rows[200].degenerate, n % 2 == 1);
            assert!(rows[0].d2e0.is_none() && rows[200].d2e0.is_none());
            assert!(rows.iter().all(|r| r.e0 <= 0.0));
            assert!(max_second_difference(&rows) <= 1e-9);
        }
        let csv = gap_probe_csv(&gap_probe_uniform(3, 201).unwrap()).render();
        assert!(csv.starts_with("lambda,e0_over_Omega0,d2e0,degenerate\n0.0000000000000000e0,"));
        assert!(csv.lines().last().unwrap().ends_with(",,1"));
    }

    #[test]
    fn probe_rejects_bad_input() {
        assert!(gap_probe_uniform(2, 201).is_err());
        assert!(gap_probe_uniform(4, 101).is_err());
        let mut grid = crate::dynamics::uniform_grid(201);
        grid[7] += 1e-3;
        assert!(gap_probe(4, &grid).is_err());
    }
}
