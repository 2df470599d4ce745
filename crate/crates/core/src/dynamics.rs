//! Time evolution inside a charge sector, Rabi frequency content and
//! scans of the single-excitation spectrum against detuning.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::bethe::{self, EnergyMap};
use crate::error::{Error, Result};
use crate::hilbert::{ModeKind, OperatorMatrix, SpaceSpec};
use crate::lax::vacuum_for;
use crate::linalg::{self, ZERO};
use crate::models::MRParams;
use crate::oracle::{self, SectorBasis, SpectrumReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionMethod {
    /// Orthonormal eigenbasis.
    Hermitian,
    /// Bi-orthogonal left/right eigenvectors; probabilities unnormalised.
    Biorthogonal,
    /// Defective sector: `exp(-iHt)` by scaling and squaring, which keeps
    /// the secular terms of the Jordan blocks.
    Jordan,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub t_grid: Vec<f64>,
    /// `probabilities[p][i] = |<φ_p|ψ(t_i)>|²`; `φ_0 = ψ₀`.
    pub probabilities: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    pub spectrum: SpectrumReport,
    pub sector: SectorBasis,
    /// Initial state and projector states in sector coordinates.
    pub psi0: Vec<C64>,
    pub targets: Vec<Vec<C64>>,
    pub method: EvolutionMethod,
}

impl EvolutionResult {
    pub fn normalized(&self) -> bool {
        self.method == EvolutionMethod::Hermitian
    }
}

fn normalise(v: &[C64]) -> Result<Vec<C64>> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::InvalidSector("state has zero norm".into()));
    }
    Ok(v.iter().map(|z| z / n).collect())
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Expansion coefficients `<L_k|ψ>` in the right eigenbasis.
fn left_coefficients(spec: &SpectrumReport, psi: &[C64]) -> Vec<C64> {
    let n = psi.len();
    (0..n).map(|k| (0..n).map(|i| spec.left[(k, i)] * psi[i]).sum()).collect()
}

/// Evolves full-space `psi0` under `h` on its charge sector and records
/// `|<φ|ψ(t)>|²` for `φ = ψ₀` followed by each state in `targets`.
pub fn evolve(h: &OperatorMatrix, space: &SpaceSpec, psi0: &[C64], targets: &[Vec<C64>], t_grid: &[f64]) -> Result<EvolutionResult> {
    let sector = oracle::sector_of(space, psi0, 1e-14)?;
    let spectrum = oracle::diag_sector(h, &sector, None)?;
    let psi = normalise(&sector.project(psi0))?;
    let mut phis = vec![psi.clone()];
    for t in targets {
        phis.push(normalise(&sector.project(t))?);
    }
    let n = sector.dim();
    let method = if spectrum.hermitian {
        EvolutionMethod::Hermitian
    } else if spectrum.defective {
        EvolutionMethod::Jordan
    } else {
        EvolutionMethod::Biorthogonal
    };
    let block = h.restricted(&sector.indices);
    let coeffs = left_coefficients(&spectrum, &psi);
    let mut probabilities = vec![Vec::with_capacity(t_grid.len()); phis.len()];
    let mut norms = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let state: Vec<C64> = match method {
            EvolutionMethod::Jordan => {
                let u = linalg::expm(linalg::scale(block.as_ref(), C64::new(0.0, -t)).as_ref());
                linalg::matvec(u.as_ref(), &psi)
            }
            _ => {
                let mut v = vec![ZERO; n];
                for k in 0..n {
                    let ph = coeffs[k] * (C64::new(0.0, -t) * spectrum.eigenvalues[k]).exp();
                    for i in 0..n {
                        v[i] += ph * spectrum.right[(i, k)];
                    }
                }
                v
            }
        };
        norms.push(state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        for (p, phi) in phis.iter().enumerate() {
            probabilities[p].push(dot(phi, &state).norm_sqr());
        }
    }
    let targets = phis[1..].to_vec();
    Ok(EvolutionResult { t_grid: t_grid.to_vec(), probabilities, norms, spectrum, sector, psi0: psi, targets, method })
}

/// Uniform grid `[0, t_max]` with `points` samples.
pub fn time_grid(t_max: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![0.0];
    }
    (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RabiClass {
    /// Number of significant transition frequencies.
    Frequencies(usize),
    Irregular,
}

impl RabiClass {
    pub fn label(self) -> String {
        match self {
            RabiClass::Frequencies(1) => "single".into(),
            RabiClass::Frequencies(3) => "triple".into(),
            RabiClass::Frequencies(n) => format!("{n}-frequency"),
            RabiClass::Irregular => "irregular".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiPeak {
    pub frequency: f64,
    pub weight: f64,
}

/// A group of eigenvalues closer than the window can resolve.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelCluster {
    pub energy: C64,
    pub members: Vec<usize>,
    /// `|Σ_k <φ|R_k><L_k|ψ₀>|` over members.
    pub amplitude: f64,
}

#[derive(Clone, Debug)]
pub struct RabiSpectrum {
    pub peaks: Vec<RabiPeak>,
    pub clusters: Vec<LevelCluster>,
    /// `w_jk = c_j conj(c_k)` with `c_k = <φ|R_k><L_k|ψ₀>`.
    pub weights: Mat<C64>,
    /// `Σ_jk w_jk`, equal to `P(0)`.
    pub weight_sum: C64,
    pub classification: RabiClass,
    pub resolution: f64,
}

/// Relative cluster amplitude below which a level does not count.
pub const SIGNIFICANCE: f64 = 1e-3;

/// Bohr frequencies of projector `which` of `result`. Levels closer than
/// `2π / T` (the window length `T`) are merged, clusters with amplitude
/// above `SIGNIFICANCE` relative to the largest are kept, and every pair of
/// kept clusters is one transition frequency. A significant level with a
/// non-real energy makes the oscillation irregular.
pub fn rabi_spectrum(result: &EvolutionResult, which: usize) -> Result<RabiSpectrum> {
    let spec = &result.spectrum;
    let phi = if which == 0 {
        &result.psi0
    } else {
        result
            .targets
            .get(which - 1)
            .ok_or_else(|| Error::InvalidSector(format!("no projector {which}")))?
    };
    let n = result.sector.dim();
    let window = result.t_grid.last().copied().unwrap_or(0.0) - result.t_grid.first().copied().unwrap_or(0.0);
    let resolution = if window > 0.0 { 2.0 * std::f64::consts::PI / window } else { f64::INFINITY };
    let (c, energies): (Vec<C64>, Vec<C64>) = if spec.defective {
        // no eigenbasis: amplitudes are not defined
        (vec![C64::new(f64::NAN, 0.0); n], spec.eigenvalues.clone())
    } else {
        let lc = left_coefficients(spec, &result.psi0);
        let c = (0..n)
            .map(|k| {
                let r: Vec<C64> = (0..n).map(|i| spec.right[(i, k)]).collect();
                dot(phi, &r) * lc[k]
            })
            .collect();
        (c, spec.eigenvalues.clone())
    };
    let weights = Mat::from_fn(n, n, |j, k| c[j] * c[k].conj());
    let weight_sum: C64 = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| weights[(j, k)]).sum();

    // clusters along the real axis
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| energies[a].re.total_cmp(&energies[b].re));
    let mut clusters: Vec<LevelCluster> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(cl) if (energies[k].re - energies[*cl.members.last().unwrap()].re).abs() < resolution => cl.members.push(k),
            _ => clusters.push(LevelCluster { energy: energies[k], members: vec![k], amplitude: 0.0 }),
        }
    }
    for cl in clusters.iter_mut() {
        let amp: C64 = cl.members.iter().map(|&k| c[k]).sum();
        cl.amplitude = amp.norm();
        cl.energy = cl.members.iter().map(|&k| energies[k]).sum::<C64>() / cl.members.len() as f64;
    }
    let max_amp = clusters.iter().map(|c| c.amplitude).fold(0.0, f64::max);
    let significant: Vec<&LevelCluster> = clusters
        .iter()
        .filter(|cl| !cl.amplitude.is_nan() && cl.amplitude > SIGNIFICANCE * max_amp)
        .collect();
    let mut peaks = Vec::new();
    for a in 0..significant.len() {
        for b in a + 1..significant.len() {
            peaks.push(RabiPeak {
                frequency: (significant[a].energy.re - significant[b].energy.re).abs(),
                weight: 2.0 * significant[a].amplitude * significant[b].amplitude,
            });
        }
    }
    peaks.sort_by(|x, y| x.frequency.total_cmp(&y.frequency));
    let scale = energies.iter().map(|e| e.norm()).fold(1.0, f64::max);
    let complex = if spec.defective {
        energies.iter().any(|e| e.im.abs() > 1e-9 * scale)
    } else {
        significant
            .iter()
            .flat_map(|cl| cl.members.iter())
            .any(|&k| energies[k].im.abs() > 1e-9 * scale && c[k].norm() > SIGNIFICANCE * max_amp)
    };
    let classification = if complex || spec.defective { RabiClass::Irregular } else { RabiClass::Frequencies(peaks.len()) };
    Ok(RabiSpectrum { peaks, clusters, weights, weight_sum, classification, resolution })
}

/// The Rabi setup of the two-atom BS study: Fock state `|n; ↓...↓>` with
/// `n` photons, evolved and projected onto itself.
pub fn photon_state(space: &SpaceSpec, photons: usize) -> Vec<C64> {
    let mut v = vec![ZERO; space.dim()];
    let down = space.atom_dim() - 1;
    v[space.compose(photons, &vec![down; space.n_atoms()])] = C64::new(1.0, 0.0);
    v
}

/// Product state with the photon number and per-atom factor indices given
/// (index 0 is spin up).
pub fn product_state(space: &SpaceSpec, photons: usize, atoms: &[usize]) -> Vec<C64> {
    let mut v = vec![ZERO; space.dim()];
    v[space.compose(photons, atoms)] = C64::new(1.0, 0.0);
    v
}

#[derive(Clone, Debug)]
pub struct VrsRow {
    pub delta: f64,
    /// Single-excitation energies, sorted by real then imaginary part.
    pub energies: Vec<C64>,
    /// Discriminant of `α(λ) - β(λ)`.
    pub discriminant: f64,
    /// Jump to the previous row exceeds ten times the local slope.
    pub discontinuous: bool,
}

#[derive(Clone, Debug)]
pub struct VrsScan {
    pub omega_f: f64,
    pub alpha: f64,
    pub n_atoms: usize,
    pub rows: Vec<VrsRow>,
    /// Detunings where the discriminant changes sign, to 1e-6.
    pub exceptional: Vec<f64>,
}

fn m1_row(omega_f: f64, alpha: f64, delta: f64, n_atoms: usize) -> Result<(Vec<C64>, f64)> {
    let p = MRParams::bs(omega_f, alpha, delta, n_atoms)?;
    let vac = vacuum_for(&p, ModeKind::Su11Boson, 1)?;
    let emap = EnergyMap::for_model(&p, ModeKind::Su11Boson, 1, &vac)?;
    let mut e = bethe::energies(&bethe::solve_m1(&vac, Some(&emap))?);
    crate::poly::sort_complex(&mut e);
    let disc = (&vac.alpha - &vac.beta).trimmed(1e-14).discriminant()?;
    Ok((e, disc.re))
}

/// Discriminant of the single-excitation Bethe polynomial of the BS model.
pub fn m1_discriminant(omega_f: f64, alpha: f64, delta: f64, n_atoms: usize) -> Result<f64> {
    Ok(m1_row(omega_f, alpha, delta, n_atoms)?.1)
}

/// Bisection on a discriminant sign change inside `[lo, hi]`.
pub fn locate_exceptional(omega_f: f64, alpha: f64, n_atoms: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = m1_discriminant(omega_f, alpha, a, n_atoms)?;
    let fb = m1_discriminant(omega_f, alpha, b, n_atoms)?;
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!("no discriminant sign change in [{lo}, {hi}]")));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = m1_discriminant(omega_f, alpha, mid, n_atoms)?;
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

pub fn vrs_scan(omega_f: f64, alpha: f64, deltas: &[f64], n_atoms: usize) -> Result<VrsScan> {
    let mut rows = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let (energies, discriminant) = m1_row(omega_f, alpha, d, n_atoms)?;
        rows.push(VrsRow { delta: d, energies, discriminant, discontinuous: false });
    }
    let mut exceptional = Vec::new();
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        if a.discriminant == 0.0 {
            exceptional.push(a.delta);
        } else if a.discriminant.signum() != b.discriminant.signum() && b.discriminant != 0.0 {
            let (lo, hi) = if a.delta < b.delta { (a.delta, b.delta) } else { (b.delta, a.delta) };
            exceptional.push(locate_exceptional(omega_f, alpha, n_atoms, lo, hi, 1e-6)?);
        }
    }
    if let Some(last) = rows.last() {
        if last.discriminant == 0.0 && !exceptional.contains(&last.delta) {
            exceptional.push(last.delta);
        }
    }
    // continuity: compare each jump with the neighbouring ones
    let jumps: Vec<f64> = (1..rows.len())
        .map(|i| {
            let step = (rows[i].delta - rows[i - 1].delta).abs().max(f64::MIN_POSITIVE);
            level_distance(&rows[i - 1].energies, &rows[i].energies) / step
        })
        .collect();
    for i in 1..rows.len() {
        let here = jumps[i - 1];
        let nb: Vec<f64> = [i.checked_sub(2).map(|k| jumps[k]), jumps.get(i).copied()].into_iter().flatten().collect();
        if let Some(local) = nb.iter().copied().reduce(f64::min) {
            rows[i].discontinuous = here > 10.0 * local.max(1e-3);
        }
    }
    Ok(VrsScan { omega_f, alpha, n_atoms, rows, exceptional })
}

/// Largest displacement under the best sorted pairing of two level sets.
fn level_distance(a: &[C64], b: &[C64]) -> f64 {
    let m = oracle::match_levels(a, b, None, 1e-9);
    m.iter().map(|l| l.abs_diff).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Model;

    #[test]
    fn grid_endpoints() {
        let g = time_grid(7.0, 2048);
        assert_eq!(g.len(), 2048);
        assert_eq!(g[0], 0.0);
        assert!((g[2047] - 7.0).abs() < 1e-15);
    }

    #[test]
    fn vrs_resonance_row() {
        let scan = vrs_scan(3.02, 1.0, &[0.0], 2).unwrap();
        let e: Vec<f64> = scan.rows[0].energies.iter().map(|z| z.re).collect();
        for (g, w) in e.iter().zip([2.02, 3.02, 4.02]) {
            assert!((g - w).abs() < 1e-10);
        }
        assert!(scan.rows[0].discriminant > 0.0);
    }

    #[test]
    fn self_projection_starts_at_one() {
        let spec = SpaceSpec::new(8, 2, 1).unwrap();
        let m = Model::bs(3.02, 1.0, 0.0, spec.clone()).unwrap();
        let r = evolve(&m.h, &spec, &photon_state(&spec, 1), &[], &time_grid(1.0, 5)).unwrap();
        assert!((r.probabilities[0][0] - 1.0).abs() < 1e-12);
    }
}
