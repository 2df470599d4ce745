//! Exact diagonalisation in conserved-charge sectors: the ground truth for
//! every Bethe and transfer-matrix result.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::bethe::{self, BetheSolution, EnergyMap, SolveOptions};
use crate::error::{Error, Result};
use crate::hilbert::{ModeKind, OperatorMatrix, SpaceSpec};
use crate::lax::{vacuum_for, Chain};
use crate::linalg::{self, ONE, ZERO};
use crate::models::Model;
use crate::poly::{sort_complex, Poly};

/// States of the sector with `M` pseudoparticles, in ascending full-space
/// index order (boson occupation first, then atom factors).
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBasis {
    pub m: usize,
    /// Boson occupation and spin projections `m_j` of each basis state.
    pub states: Vec<(usize, Vec<f64>)>,
    /// Full-space index of each basis state.
    pub indices: Vec<usize>,
}

impl SectorBasis {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Eigenvalue of `s3 + Σ S^z_j` on the sector, given `<0|s3|0>`.
    pub fn excitation_value(&self, r: f64, spec: &SpaceSpec) -> f64 {
        self.m as f64 + r - spec.n_atoms() as f64 * spec.spin()
    }

    /// Sector coordinates of a full-space vector.
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        self.indices.iter().map(|&i| v[i]).collect()
    }

    pub fn embed(&self, v: &[C64], dim: usize) -> Vec<C64> {
        let mut out = vec![ZERO; dim];
        for (k, &i) in self.indices.iter().enumerate() {
            out[i] = v[k];
        }
        out
    }

    /// Position of a full-space index inside the sector.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }
}

fn spin_projection(spec: &SpaceSpec, k: usize) -> f64 {
    spec.atom_excitation(k) as f64 - spec.spin()
}

pub fn sector_basis(spec: &SpaceSpec, m: usize) -> Result<SectorBasis> {
    if m >= spec.boson_cutoff() {
        return Err(Error::InvalidSector(format!(
            "sector M = {m} reaches the boson cutoff {}",
            spec.boson_cutoff()
        )));
    }
    let counts = spec.pseudoparticle_numbers();
    let mut states = Vec::new();
    let mut indices = Vec::new();
    for (i, &mi) in counts.iter().enumerate() {
        if mi == m {
            let (n, atoms) = spec.decompose(i);
            states.push((n, atoms.iter().map(|&k| spin_projection(spec, k)).collect()));
            indices.push(i);
        }
    }
    Ok(SectorBasis { m, states, indices })
}

/// Sector spectrum with bi-orthogonal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub m: usize,
    /// Sorted by real part, then imaginary part; `shift` already added.
    pub eigenvalues: Vec<C64>,
    /// Columns are right eigenvectors `|R_k>` (unit norm).
    pub right: Mat<C64>,
    /// Row `k` is `<L_k|`, with `<L_k|R_j> = δ_kj`.
    pub left: Mat<C64>,
    pub residuals: Vec<f64>,
    pub hermitian: bool,
    /// Eigenvector matrix numerically singular: exceptional point.
    pub defective: bool,
    pub condition: f64,
    pub shift: C64,
    /// Largest matrix element coupling the sector to the rest of the space.
    pub leakage: f64,
    pub comparison: Vec<LevelMatch>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelMatch {
    pub oracle_index: usize,
    pub oracle: C64,
    pub bethe_index: Option<usize>,
    pub bethe: Option<C64>,
    pub abs_diff: f64,
}

const DEFECTIVE_CONDITION: f64 = 1e10;

pub fn diag_sector(h: &OperatorMatrix, basis: &SectorBasis, shift: Option<C64>) -> Result<SpectrumReport> {
    let shift = shift.unwrap_or(ZERO);
    let idx = &basis.indices;
    let block = h.restricted(idx);
    let n = idx.len();
    let mut leakage: f64 = 0.0;
    for &i in idx {
        for j in 0..h.dim() {
            if basis.position(j).is_none() {
                leakage = leakage.max(h.get(i, j).norm()).max(h.get(j, i).norm());
            }
        }
    }
    let hermitian = linalg::is_hermitian(block.as_ref(), 1e-13 * (1.0 + linalg::max_abs(block.as_ref())));
    let (mut w, mut r) = if hermitian {
        let (w, u) = linalg::eigh(block.as_ref())?;
        (w.into_iter().map(|x| C64::new(x, 0.0)).collect::<Vec<_>>(), u)
    } else {
        linalg::eig(block.as_ref())?
    };
    // sort columns with their eigenvalues
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w[a].re.total_cmp(&w[b].re).then(w[a].im.total_cmp(&w[b].im)));
    w = order.iter().map(|&k| w[k]).collect();
    r = Mat::from_fn(n, n, |i, j| r[(i, order[j])]);

    let residuals: Vec<f64> = (0..n)
        .map(|k| {
            let v: Vec<C64> = (0..n).map(|i| r[(i, k)]).collect();
            let hv = linalg::matvec(block.as_ref(), &v);
            hv.iter().zip(&v).map(|(a, b)| (a - w[k] * b).norm_sqr()).sum::<f64>().sqrt()
        })
        .collect();
    let (left, condition) = if hermitian {
        (Mat::from_fn(n, n, |i, j| r[(j, i)].conj()), 1.0)
    } else {
        let inv = linalg::inverse(r.as_ref());
        let cond = linalg::norm1(r.as_ref()) * linalg::norm1(inv.as_ref());
        (inv, if cond.is_finite() { cond } else { f64::INFINITY })
    };
    let defective = !hermitian && condition > DEFECTIVE_CONDITION;
    if defective {
        // the Schur eigenvalues stay reliable; eigenvectors are not used
        let mut s = block
            .eigenvalues()
            .map_err(|e| Error::Numerical(format!("schur eigenvalues failed: {e:?}")))?;
        sort_complex(&mut s);
        w = s;
    }
    let eigenvalues = w.iter().map(|z| z + shift).collect();
    Ok(SpectrumReport {
        m: basis.m,
        eigenvalues,
        right: r,
        left,
        residuals,
        hermitian,
        defective,
        condition,
        shift,
        leakage,
        comparison: Vec::new(),
    })
}

impl SpectrumReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self) -> f64 {
        self.comparison.iter().map(|m| m.abs_diff).fold(0.0, f64::max)
    }

    pub fn unmatched_oracle(&self) -> Vec<C64> {
        self.comparison.iter().filter(|m| m.bethe_index.is_none()).map(|m| m.oracle).collect()
    }

    pub fn complete(&self) -> bool {
        !self.comparison.is_empty() && self.comparison.iter().all(|m| m.bethe_index.is_some())
    }
}

/// Calibration constant `κ₀` that puts oracle energies on the Bethe scale
/// (pseudovacuum at zero).
pub fn kappa0(model: &Model) -> C64 {
    -model.vacuum_energy()
}

/// Characteristic polynomial `det(x - A)` (monic, ascending) by
/// Faddeev-LeVerrier; meant for small blocks.
pub fn charpoly(a: &Mat<C64>) -> Poly {
    let n = a.nrows();
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[n] = ONE;
    let mut mk = Mat::<C64>::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a * &mk;
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        mk = next;
        let am = a * &mk;
        let tr: C64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs[n - k] = -tr / k as f64;
    }
    Poly::new(coeffs)
}

/// Product `B(λ_1)...B(λ_M)|0>` of creation operators on the pseudovacuum.
pub fn bethe_vector(chain: &Chain, roots: &[C64]) -> Vec<C64> {
    let mut v = vec![ZERO; chain.spec().dim()];
    v[chain.vacuum_index()] = ONE;
    for &l in roots {
        v = chain.monodromy(l).b_op().apply(&v);
    }
    v
}

#[derive(Clone, Debug)]
pub struct Tolerances {
    pub energy: f64,
    /// Oracle levels closer than this are treated as degenerate.
    pub degenerate: f64,
    /// Extra boson levels for the second-cutoff certificate.
    pub cutoff_step: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { energy: 1e-8, degenerate: 1e-6, cutoff_step: 8 }
    }
}

/// Bethe solutions of one sector matched against the oracle.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub report: SpectrumReport,
    pub bethe: Vec<BetheSolution>,
    /// Largest eigenvalue shift of the sector between the two cutoffs.
    pub cutoff_shift: f64,
    pub tolerances: Tolerances,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.report.complete()
            && self.report.comparison.len() == self.bethe.len()
            && self.report.max_abs_diff() < self.tolerances.energy
            && self.cutoff_shift < self.tolerances.energy
    }

    /// Error naming the unmatched oracle levels when the match is incomplete.
    pub fn check(&self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        Err(Error::Numerical(format!(
            "sector M = {}: {} Bethe vs {} oracle levels, max diff {:.3e}, cutoff shift {:.3e}, unmatched oracle {:?}",
            self.report.m,
            self.bethe.len(),
            self.report.eigenvalues.len(),
            self.report.max_abs_diff(),
            self.cutoff_shift,
            self.report.unmatched_oracle()
        )))
    }
}

/// Greedy bipartite matching by absolute energy difference. Inside a
/// cluster of degenerate oracle levels the Bethe vector overlap decides,
/// when vectors are available.
pub fn match_levels(
    oracle: &[C64],
    bethe: &[C64],
    overlaps: Option<&[Vec<f64>]>,
    degenerate_tol: f64,
) -> Vec<LevelMatch> {
    let mut pairs: Vec<(f64, f64, usize, usize)> = Vec::new();
    for (i, o) in oracle.iter().enumerate() {
        for (j, b) in bethe.iter().enumerate() {
            let d = (o - b).norm();
            let d = if d.is_finite() { d } else { f64::INFINITY };
            // secondary key: larger overlap first
            let ov = overlaps.map_or(0.0, |ov| -ov[j][i]);
            pairs.push((d, ov, i, j));
        }
    }
    let key = |d: f64| (d / degenerate_tol).floor();
    pairs.sort_by(|a, b| key(a.0).total_cmp(&key(b.0)).then(a.1.total_cmp(&b.1)).then(a.0.total_cmp(&b.0)));
    let mut used_o = vec![false; oracle.len()];
    let mut used_b = vec![false; bethe.len()];
    let mut out: Vec<LevelMatch> = oracle
        .iter()
        .enumerate()
        .map(|(i, &o)| LevelMatch { oracle_index: i, oracle: o, bethe_index: None, bethe: None, abs_diff: f64::INFINITY })
        .collect();
    for (d, _, i, j) in pairs {
        if used_o[i] || used_b[j] {
            continue;
        }
        used_o[i] = true;
        used_b[j] = true;
        out[i].bethe_index = Some(j);
        out[i].bethe = Some(bethe[j]);
        out[i].abs_diff = d;
    }
    out
}

fn bethe_solutions(model: &Model, m: usize, opts: &SolveOptions) -> Result<(Vec<BetheSolution>, EnergyMap)> {
    let two_s = model.spec.two_s();
    let vac = vacuum_for(&model.params, model.kind(), two_s)?;
    let emap = EnergyMap::for_model(&model.params, model.kind(), two_s, &vac)?;
    let sols = match m {
        1 => bethe::solve_m1(&vac, Some(&emap))?,
        _ => bethe::solve_m_general(&vac, m, Some(&emap), opts)?.solutions,
    };
    Ok((sols, emap))
}

/// Bethe energies of sector `M` against the κ₀-calibrated oracle, with the
/// oracle repeated at `cutoff + cutoff_step` as a truncation certificate.
pub fn compare_bethe_vs_exact(model: &Model, m: usize, tol: &Tolerances, opts: &SolveOptions) -> Result<Comparison> {
    if model.kind().is_deformed() || !model.kind().has_fock_vacuum() {
        return Err(Error::UnsupportedRealization(format!(
            "Bethe comparison needs a rational model with a Fock vacuum, got {}",
            model.kind().name()
        )));
    }
    let basis = sector_basis(&model.spec, m)?;
    let shift = kappa0(model);
    let mut report = diag_sector(&model.h, &basis, Some(shift))?;
    let cutoff_shift = cutoff_certificate(model, &[m], tol.cutoff_step)?;
    let (bethe, _) = bethe_solutions(model, m, opts)?;
    let energies: Vec<C64> = bethe.iter().map(|s| s.energy).collect();

    let overlaps = if report.defective || m == 0 {
        None
    } else {
        let chain = Chain::new(&model.params, model.kind(), &model.spec)?;
        Some(
            bethe
                .iter()
                .map(|s| {
                    let v = basis.project(&bethe_vector(&chain, &s.roots));
                    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    (0..basis.dim())
                        .map(|k| {
                            if nv == 0.0 {
                                return 0.0;
                            }
                            let ov: C64 = (0..basis.dim()).map(|i| report.right[(i, k)].conj() * v[i]).sum();
                            ov.norm() / nv
                        })
                        .collect::<Vec<f64>>()
                })
                .collect::<Vec<_>>(),
        )
    };
    report.comparison = match_levels(&report.eigenvalues, &energies, overlaps.as_deref(), tol.degenerate);
    Ok(Comparison { report, bethe, cutoff_shift, tolerances: tol.clone() })
}

/// Largest change of any listed sector's eigenvalues when the boson cutoff
/// grows by `step`.
pub fn cutoff_certificate(model: &Model, sectors: &[usize], step: usize) -> Result<f64> {
    let bigger = model.with_cutoff(model.spec.boson_cutoff() + step)?;
    let mut worst: f64 = 0.0;
    for &m in sectors {
        let a = diag_sector(&model.h, &sector_basis(&model.spec, m)?, None)?;
        let b = diag_sector(&bigger.h, &sector_basis(&bigger.spec, m)?, None)?;
        if a.eigenvalues.len() != b.eigenvalues.len() {
            return Ok(f64::INFINITY);
        }
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

/// Checks the single-excitation block against the Bethe cubic: the
/// characteristic polynomial of the (κ₀-shifted) block must equal
/// `α - β` after the affine map `λ ↦ E` implied by the energy map.
/// Returns the largest coefficient mismatch of the monic polynomials.
pub fn m1_charpoly_crosscheck(model: &Model) -> Result<f64> {
    let two_s = model.spec.two_s();
    let vac = vacuum_for(&model.params, model.kind(), two_s)?;
    let emap = EnergyMap::for_model(&model.params, model.kind(), two_s, &vac)?;
    let d = (&vac.alpha - &vac.beta).trimmed(1e-14);
    let energy_at = |l: C64| {
        let (q, _) = d.div_rem(&Poly::linear_root(l));
        emap.excitation(&(&(&vac.alpha + &vac.beta) + &q))
    };
    let b = energy_at(ZERO);
    let a = energy_at(ONE) - b;
    if a.norm() < 1e-14 {
        return Err(Error::Numerical("energy is independent of the root".into()));
    }
    // p(E) = d((E - b)/a), made monic
    let inv = Poly::new(vec![-b / a, ONE / a]);
    let mut p = Poly::constant(ZERO);
    let mut pow = Poly::constant(ONE);
    for k in 0..d.coeffs().len() {
        p = &p + &pow.scale(d.coeff(k));
        pow = &pow * &inv;
    }
    let lead = p.coeff(p.coeffs().len() - 1);
    let p = p.scale(ONE / lead);

    let basis = sector_basis(&model.spec, 1)?;
    let mut block = model.h.restricted(&basis.indices);
    let k0 = kappa0(model);
    for i in 0..block.nrows() {
        block[(i, i)] += k0;
    }
    let cp = charpoly(&block);
    let n = cp.coeffs().len().max(p.coeffs().len());
    let scale = cp.max_coeff().max(1.0);
    Ok((0..n).map(|k| (cp.coeff(k) - p.coeff(k)).norm()).fold(0.0, f64::max) / scale)
}

/// All sectors `0..=m_max` glued back into one matrix on their union;
/// equals `H` restricted there when the charge is conserved.
pub fn reassemble(h: &OperatorMatrix, spec: &SpaceSpec, m_max: usize) -> Result<(Vec<usize>, Mat<C64>)> {
    let bases: Vec<SectorBasis> = (0..=m_max).map(|m| sector_basis(spec, m)).collect::<Result<_>>()?;
    let mut union: Vec<usize> = bases.iter().flat_map(|b| b.indices.iter().copied()).collect();
    union.sort_unstable();
    let n = union.len();
    let mut out = Mat::<C64>::zeros(n, n);
    for b in &bases {
        let block = h.restricted(&b.indices);
        let pos: Vec<usize> = b.indices.iter().map(|i| union.binary_search(i).unwrap()).collect();
        for (a, &pa) in pos.iter().enumerate() {
            for (c, &pc) in pos.iter().enumerate() {
                out[(pa, pc)] = block[(a, c)];
            }
        }
    }
    Ok((union, out))
}

/// Sector of a state with support in exactly one charge sector.
pub fn sector_of(spec: &SpaceSpec, v: &[C64], tol: f64) -> Result<SectorBasis> {
    let counts = spec.pseudoparticle_numbers();
    let mut m: Option<usize> = None;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > tol {
            match m {
                None => m = Some(counts[i]),
                Some(k) if k != counts[i] => {
                    return Err(Error::InvalidSector("state spans several charge sectors".into()));
                }
                _ => {}
            }
        }
    }
    let m = m.ok_or_else(|| Error::InvalidSector("zero state".into()))?;
    sector_basis(spec, m)
}

/// Whether the space carries a well-defined pseudoparticle number.
pub fn has_sectors(kind: ModeKind) -> bool {
    kind.has_fock_vacuum()
}
