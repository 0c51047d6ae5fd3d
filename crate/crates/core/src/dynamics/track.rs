use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{inner, l2, EvolutionTrace, QuantumState};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::operator::{eig_hermitian, fix_phase, lanczos_lowest, LinearOperator, DEGENERACY_TOL};

/// Smallest accepted `|<psi(s_i)|psi(s_{i+1})>|`.
pub const MIN_ADJACENT_OVERLAP: f64 = 0.9;

/// Largest dimension handled by full diagonalization in [`TrackMethod::Auto`].
pub const DENSE_TRACK_MAX_DIM: usize = 256;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackMethod {
    /// Dense up to [`DENSE_TRACK_MAX_DIM`], Krylov above.
    #[default]
    Auto,
    /// Full spectrum; follows the lowest eigenspace that overlaps the previous state.
    Dense,
    /// Lanczos seeded with the previous state, which confines it to that state's symmetry sector.
    Krylov,
}

/// Continuity-fixed instantaneous eigenstates along a schedule.
#[derive(Clone, Debug)]
pub struct AdiabaticTrack {
    pub s_grid: Vec<f64>,
    pub energies: Vec<f64>,
    pub states: Vec<QuantumState>,
}

impl AdiabaticTrack {
    /// `<H_ref>` along the track.
    pub fn reference_energies(&self, model: &ModelSpec) -> Result<Vec<f64>> {
        let h_ref = model.reference();
        let mut tmp = vec![C64::new(0.0, 0.0); h_ref.dim()];
        self.states
            .iter()
            .map(|psi| {
                if psi.dim() != h_ref.dim() {
                    return Err(Error::Dimension {
                        expected: h_ref.dim(),
                        found: psi.dim(),
                    });
                }
                h_ref.apply(psi.amplitudes(), &mut tmp);
                Ok(inner(psi.amplitudes(), &tmp).re)
            })
            .collect()
    }

    /// Trace view with `e_ref` attached and unit fidelity.
    pub fn to_trace(&self, model: &ModelSpec, tau: f64) -> Result<EvolutionTrace> {
        Ok(EvolutionTrace {
            tau,
            s_grid: self.s_grid.clone(),
            states: self.states.clone(),
            e_ref: self.reference_energies(model)?,
            fidelity_vs_adiabatic: vec![1.0; self.states.len()],
            step: 0.0,
            steps: 0,
            max_norm_drift: 0.0,
        })
    }
}

fn check_grid(s_grid: &[f64]) -> Result<()> {
    if s_grid.len() < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    if s_grid[0] != 0.0 || *s_grid.last().unwrap() != 1.0 {
        return Err(Error::InvalidInput("grid must start at 0 and end at 1".into()));
    }
    if s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Squared overlap below which an eigenspace counts as outside the previous state's sector.
const SECTOR_WEIGHT_TOL: f64 = 1e-12;

/// Lowest eigenspace of `h` carrying weight of `prev`, as `(energy, projected state)`.
fn dense_follow(h: &crate::operator::DenseOperator, prev: Option<&[C64]>) -> Result<(f64, Vec<C64>)> {
    let spec = eig_hermitian(h)?;
    let clusters = spec.clusters(DEGENERACY_TOL * spec.scale().max(1.0));
    let Some(prev) = prev else {
        let ground = &clusters[0];
        return Ok((spec.eigenvalues[ground.start], spec.eigenvectors[ground.start].clone()));
    };
    let overlaps: Vec<C64> = spec.eigenvectors.iter().map(|v| inner(v, prev)).collect();
    let weight = |r: &std::ops::Range<usize>| -> f64 { overlaps[r.clone()].iter().map(|c| c.norm_sqr()).sum() };
    let best = clusters
        .iter()
        .find(|r| weight(r) > SECTOR_WEIGHT_TOL)
        .expect("a unit vector has weight somewhere in the spectrum");
    let mut psi = vec![C64::new(0.0, 0.0); h.dim()];
    for k in best.clone() {
        for (x, v) in psi.iter_mut().zip(&spec.eigenvectors[k]) {
            *x += v * overlaps[k];
        }
    }
    let energy = spec.eigenvalues[best.clone()].iter().sum::<f64>() / best.len() as f64;
    Ok((energy, psi))
}

fn krylov_follow<M: LinearOperator + ?Sized>(h: &M, seed: &[C64]) -> Result<(f64, Vec<C64>)> {
    let pairs = lanczos_lowest(h, Some(seed), 1)?;
    let (energy, state) = pairs.ritz.into_iter().next().expect("one Ritz pair requested");
    Ok((energy, state))
}

/// Instantaneous eigenstates of `model` on `s_grid`, phase-aligned to their predecessors.
pub fn adiabatic_track(model: &ModelSpec, s_grid: &[f64]) -> Result<AdiabaticTrack> {
    adiabatic_track_with(model, s_grid, TrackMethod::Auto)
}

pub fn adiabatic_track_with(model: &ModelSpec, s_grid: &[f64], method: TrackMethod) -> Result<AdiabaticTrack> {
    model.validate()?;
    check_grid(s_grid)?;
    let dense = match method {
        TrackMethod::Auto => model.dim() <= DENSE_TRACK_MAX_DIM,
        TrackMethod::Dense => true,
        TrackMethod::Krylov => false,
    };
    let endpoints = if dense { Some(model.endpoint_operators()?) } else { None };
    let initial = model.initial_state();

    let mut energies = Vec::with_capacity(s_grid.len());
    let mut states: Vec<QuantumState> = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let prev = states.last().map(|p| p.amplitudes());
        let (energy, mut psi) = match &endpoints {
            Some((a, b)) => {
                let c = model.schedule.eval(s)?;
                dense_follow(&a.combine(c.g, b, c.f)?, prev)?
            }
            None => krylov_follow(&model.hamiltonian(s)?, prev.unwrap_or(&initial))?,
        };
        let norm = l2(&psi);
        psi.iter_mut().for_each(|x| *x /= norm);
        match prev {
            Some(prev) => {
                let ov = inner(&psi, prev);
                if ov.norm() < MIN_ADJACENT_OVERLAP {
                    return Err(Error::GridTooCoarse { s, overlap: ov.norm() });
                }
                let phase = ov / ov.norm();
                psi.iter_mut().for_each(|x| *x *= phase);
            }
            None => fix_phase(&mut psi),
        }
        energies.push(energy);
        states.push(QuantumState::unchecked(psi));
    }
    Ok(AdiabaticTrack {
        s_grid: s_grid.to_vec(),
        energies,
        states,
    })
}

/// `points` uniformly spaced values covering `[0, 1]`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    let last = points.max(2) - 1;
    (0..=last).map(|i| if i == last { 1.0 } else { i as f64 / last as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::fidelity;
    use crate::models::{half_charged_state, Family, Schedule};

    #[test]
    fn starts_empty_for_every_family() {
        for family in [Family::Parallel, Family::Grover, Family::Ising] {
            let spec = ModelSpec::new(family, 3, Schedule::Linear);
            let tr = adiabatic_track(&spec, &uniform_grid(21)).unwrap();
            let e0 = tr.reference_energies(&spec).unwrap()[0];
            assert!((e0 + 3.0).abs() < 1e-12, "{family:?}");
            assert!((tr.states[0].amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grover_ends_half_charged() {
        let spec = ModelSpec::new(Family::Grover, 3, Schedule::Linear);
        let tr = adiabatic_track(&spec, &uniform_grid(101)).unwrap();
        let hc = QuantumState::new(half_charged_state(3)).unwrap();
        assert!((fidelity(tr.states.last().unwrap(), &hc).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn neighbouring_states_overlap_positively() {
        let spec = ModelSpec::new(Family::Ising, 4, Schedule::Oscillating);
        let tr = adiabatic_track(&spec, &uniform_grid(101)).unwrap();
        for w in tr.states.windows(2) {
            let ov = w[0].inner(&w[1]).unwrap();
            assert!(ov.re > 0.9 && ov.im.abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let spec = ModelSpec::new(Family::Grover, 8, Schedule::Linear);
        let err = adiabatic_track(&spec, &[0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::GridTooCoarse { .. }));
        assert!(adiabatic_track(&spec, &[0.0, 0.5]).is_err());
        assert!(adiabatic_track(&spec, &[0.0, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn dense_and_krylov_agree() {
        for (family, n) in [(Family::Ising, 5), (Family::Ising, 6), (Family::Grover, 4), (Family::Parallel, 3)] {
            let spec = ModelSpec::new(family, n, Schedule::Oscillating);
            let grid = uniform_grid(201);
            let d = adiabatic_track_with(&spec, &grid, TrackMethod::Dense).unwrap();
            let k = adiabatic_track_with(&spec, &grid, TrackMethod::Krylov).unwrap();
            for (a, b) in d.states.iter().zip(&k.states) {
                let diff = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(diff < 1e-7, "{family:?} n={n}: {diff}");
            }
            for (a, b) in d.energies.iter().zip(&k.energies) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
