//! Algebraic Bethe ansatz: Bethe equations, transfer-matrix eigenvalues,
//! the symmetric-root reduction of the single-atom BS model and detection
//! of degenerate (common-zero) states.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::ModeKind;
use crate::lax::{energy_calibration, Calibration, RKind, VacuumEigenPair};
use crate::linalg::{solve_small, ONE, ZERO};
use crate::models::MRParams;
use crate::poly::{sort_complex, Poly};

/// Eigenvalues of the diagonal monodromy entries on the pseudovacuum.
pub trait Vacuum {
    fn alpha(&self, l: C64) -> C64;
    fn beta(&self, l: C64) -> C64;

    fn alpha_deriv(&self, l: C64) -> C64 {
        let h = 1e-6;
        (self.alpha(l + h) - self.alpha(l - h)) / (2.0 * h)
    }

    fn beta_deriv(&self, l: C64) -> C64 {
        let h = 1e-6;
        (self.beta(l + h) - self.beta(l - h)) / (2.0 * h)
    }
}

impl Vacuum for VacuumEigenPair {
    fn alpha(&self, l: C64) -> C64 {
        self.alpha.eval(l)
    }
    fn beta(&self, l: C64) -> C64 {
        self.beta.eval(l)
    }
    fn alpha_deriv(&self, l: C64) -> C64 {
        self.alpha.deriv().eval(l)
    }
    fn beta_deriv(&self, l: C64) -> C64 {
        self.beta.deriv().eval(l)
    }
}

/// `f(λ) = (λ+η)/λ` (rational) or `sin(λ+η)/sin λ` (trigonometric).
pub fn f_factor(l: C64, kind: RKind, eta: f64) -> Result<C64> {
    match kind {
        RKind::Rational => {
            if l.norm() < 1e-14 {
                return Err(Error::Pole(l));
            }
            Ok((l + eta) / l)
        }
        RKind::Trigonometric => {
            let s = l.sin();
            if s.norm() < 1e-14 {
                return Err(Error::Pole(l));
            }
            Ok((l + eta).sin() / s)
        }
    }
}

fn principal_log(z: C64) -> C64 {
    if z == ZERO {
        return C64::new(f64::NEG_INFINITY, 0.0);
    }
    z.ln()
}

/// Absolute tolerance for deciding that α or β vanishes at `l`.
fn vanish_tol(vac: &dyn Vacuum, l: C64) -> f64 {
    1e-10 * (1.0 + l.norm()).powi(4)
        * (1.0 + vac.alpha(l + 1.0).norm().max(vac.beta(l + 1.0).norm()).sqrt())
}

fn is_common_zero(vac: &dyn Vacuum, l: C64) -> bool {
    let tol = vanish_tol(vac, l);
    vac.alpha(l).norm() < tol && vac.beta(l).norm() < tol
}

/// Log-form residuals `ln[α(λ_a)/β(λ_a)] - Σ_{b≠a} ln[f(λ_b-λ_a)/f(λ_a-λ_b)]`
/// (principal branch of the combined ratio). A root sitting on a common
/// zero of α and β satisfies its equation identically and gets residual 0.
pub fn bethe_residual(roots: &[C64], vac: &dyn Vacuum, kind: RKind, eta: f64) -> Result<Vec<C64>> {
    let m = roots.len();
    for a in 0..m {
        for b in a + 1..m {
            if (roots[a] - roots[b]).norm() < 1e-10 && !is_common_zero(vac, roots[a]) {
                return Err(Error::RootCollision(a, b));
            }
        }
    }
    let mut out = Vec::with_capacity(m);
    for a in 0..m {
        let (al, be) = (vac.alpha(roots[a]), vac.beta(roots[a]));
        let tol = vanish_tol(vac, roots[a]);
        if al.norm() < tol && be.norm() < tol {
            out.push(ZERO);
            continue;
        }
        if be.norm() < tol {
            return Err(Error::BetaZero(a));
        }
        let mut rhs = ONE;
        for b in 0..m {
            if b != a {
                rhs *= f_factor(roots[b] - roots[a], kind, eta)? / f_factor(roots[a] - roots[b], kind, eta)?;
            }
        }
        out.push(principal_log(al / (be * rhs)));
    }
    Ok(out)
}

/// Rational-kind Bethe equations in product form,
/// `F_a = α(λ_a) Π_{b≠a}(λ_a-λ_b+η) - β(λ_a) Π_{b≠a}(λ_a-λ_b-η)`,
/// each scaled by the size of its two terms, with the analytic Jacobian.
/// Unlike the log form this has no singularities at zeros of α or β,
/// which sit next to physical roots in the multi-atom models.
fn product_system(roots: &[C64], vac: &dyn Vacuum, eta: f64) -> (Vec<C64>, Vec<Vec<C64>>, f64, f64) {
    let m = roots.len();
    let mut f = vec![ZERO; m];
    let mut jac = vec![vec![ZERO; m]; m];
    let mut rel: f64 = 0.0;
    let mut raw: f64 = 0.0;
    for a in 0..m {
        let la = roots[a];
        let (al, be) = (vac.alpha(la), vac.beta(la));
        let (mut pa, mut ma) = (ONE, ONE);
        for b in 0..m {
            if b != a {
                pa *= la - roots[b] + eta;
                ma *= la - roots[b] - eta;
            }
        }
        let tp = al * pa;
        let tm = be * ma;
        let scale = tp.norm() + tm.norm() + 1e-300;
        let mut diag = vac.alpha_deriv(la) * pa - vac.beta_deriv(la) * ma;
        for b in 0..m {
            if b == a {
                continue;
            }
            // d/dλ_a of Π(λ_a-λ_b±η) via the product without factor b
            let (mut pa_b, mut ma_b) = (al, be);
            for k in 0..m {
                if k != a && k != b {
                    pa_b *= la - roots[k] + eta;
                    ma_b *= la - roots[k] - eta;
                }
            }
            diag += pa_b - ma_b;
            jac[a][b] = (-pa_b + ma_b) / scale;
        }
        jac[a][a] = diag / scale;
        f[a] = (tp - tm) / scale;
        rel = rel.max(f[a].norm());
        raw += (tp - tm).norm_sqr();
    }
    (f, jac, rel, raw.sqrt())
}

fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Damped Newton iteration on the product-form Bethe equations. Returns
/// the roots once the scaled residual is below `tol`.
pub fn newton(start: &[C64], vac: &dyn Vacuum, eta: f64, tol: f64, max_iter: usize) -> Option<Vec<C64>> {
    let mut x = start.to_vec();
    let (mut f, mut jac, mut fn_, mut raw) = product_system(&x, vac, eta);
    for _ in 0..max_iter {
        if !fn_.is_finite() {
            return None;
        }
        if fn_ < tol * 1e-3 {
            break;
        }
        let step = solve_small(jac.clone(), f.iter().map(|z| -z).collect())?;
        // line search on the unscaled residual: the scaled one jumps where α and β are both small
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand: Vec<C64> = x.iter().zip(&step).map(|(xi, si)| xi + si * t).collect();
            let (fc, jc, fcn, rc) = product_system(&cand, vac, eta);
            if fcn.is_finite() && (rc < raw * (1.0 - 1e-4 * t) || fcn < fn_ * (1.0 - 1e-4 * t)) {
                x = cand;
                f = fc;
                jac = jc;
                fn_ = fcn;
                raw = rc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if fn_ < tol && x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Maps a transfer eigenvalue polynomial to an energy through the charge
/// calibration `E = α Λ_{N_a-1} + a Λ_{N_a} + b`, reported relative to the
/// pseudovacuum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyMap {
    pub n_atoms: usize,
    pub calibration: Calibration,
    pub vacuum_raw: C64,
}

impl EnergyMap {
    pub fn new(n_atoms: usize, calibration: Calibration, vac: &VacuumEigenPair) -> Self {
        let mut e = Self { n_atoms, calibration, vacuum_raw: ZERO };
        e.vacuum_raw = e.raw(&(&vac.alpha + &vac.beta));
        e
    }

    pub fn for_model(params: &MRParams, kind: ModeKind, two_s: usize, vac: &VacuumEigenPair) -> Result<Self> {
        Ok(Self::new(params.n_atoms(), energy_calibration(params, kind, two_s)?, vac))
    }

    /// Energy in the convention of the Hamiltonian itself.
    pub fn raw(&self, lambda: &Poly) -> C64 {
        let cal = &self.calibration;
        cal.alpha * lambda.coeff(self.n_atoms - 1) + cal.a * lambda.coeff(self.n_atoms) + cal.b
    }

    /// Energy above the pseudovacuum.
    pub fn excitation(&self, lambda: &Poly) -> C64 {
        self.raw(lambda) - self.vacuum_raw
    }
}

#[derive(Clone, Debug)]
pub struct BetheSolution {
    pub roots: Vec<C64>,
    /// Log-form Bethe residuals.
    pub residuals: Vec<C64>,
    /// Energy above the pseudovacuum (NaN without an energy map).
    pub energy: C64,
    /// `Λ(λ)` as an exact polynomial (pole-cancelled form).
    pub lambda_poly: Poly,
    /// Relative remainder of the pole-cancelling division; ~0 for a valid state.
    pub remainder: f64,
    /// Number of roots within 1e-6 of each root (1 = simple).
    pub multiplicity: Vec<usize>,
    /// Whether some root is a common zero of α and β.
    pub degenerate: bool,
}

impl BetheSolution {
    pub fn max_residual(&self) -> f64 {
        max_norm(&self.residuals)
    }
}

/// `Λ = N/Q` with `N = α Π(λ-λ_a+η) + β Π(λ-λ_a-η)`, `Q = Π(λ-λ_a)`.
/// Returns the quotient and the relative size of the remainder.
pub fn lambda_polynomial(roots: &[C64], vac: &VacuumEigenPair) -> (Poly, f64) {
    let eta = vac.eta;
    let plus: Vec<C64> = roots.iter().map(|r| r - eta).collect();
    let minus: Vec<C64> = roots.iter().map(|r| r + eta).collect();
    let n = &(&vac.alpha * &Poly::from_roots(&plus, ONE)) + &(&vac.beta * &Poly::from_roots(&minus, ONE));
    let q = Poly::from_roots(roots, ONE);
    let (quot, rem) = n.div_rem(&q);
    let rel = rem.max_coeff() / n.max_coeff().max(f64::MIN_POSITIVE);
    (quot, rel)
}

fn multiplicities(roots: &[C64]) -> Vec<usize> {
    roots
        .iter()
        .map(|a| roots.iter().filter(|b| (a - *b).norm() < 1e-6).count())
        .collect()
}

fn package(roots: Vec<C64>, vac: &VacuumEigenPair, emap: Option<&EnergyMap>) -> Result<BetheSolution> {
    let mut roots = roots;
    sort_complex(&mut roots);
    let residuals = bethe_residual(&roots, vac, RKind::Rational, vac.eta)?;
    let (lambda_poly, remainder) = lambda_polynomial(&roots, vac);
    let energy = emap.map_or(C64::new(f64::NAN, f64::NAN), |e| e.excitation(&lambda_poly));
    let degenerate = roots.iter().any(|&r| is_common_zero(vac, r));
    Ok(BetheSolution { multiplicity: multiplicities(&roots), roots, residuals, energy, lambda_poly, remainder, degenerate })
}

/// All M = 1 states: roots of `α(λ) - β(λ)` by companion matrix.
pub fn solve_m1(vac: &VacuumEigenPair, emap: Option<&EnergyMap>) -> Result<Vec<BetheSolution>> {
    let d = (&vac.alpha - &vac.beta).trimmed(1e-14);
    if d.max_coeff() == 0.0 || d.degree() == Some(0) && d.coeff(0).norm() < 1e-14 {
        return Err(Error::DegenerateVacuum);
    }
    let roots = d.roots()?;
    let mut out: Vec<BetheSolution> = roots
        .iter()
        .map(|&r| package(vec![r], vac, emap))
        .collect::<Result<_>>()?;
    // coinciding M = 1 roots (double root of α - β)
    let all: Vec<C64> = out.iter().map(|s| s.roots[0]).collect();
    for s in out.iter_mut() {
        s.multiplicity = vec![all.iter().filter(|r| (*r - s.roots[0]).norm() < 1e-6).count()];
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    pub starts: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { seed: 7, starts: 200, tol: 1e-11, max_iter: 80 }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub m: usize,
    pub solutions: Vec<BetheSolution>,
    pub starts_tried: usize,
    pub converged: usize,
    pub rejected: usize,
}

fn same_multiset(a: &[C64], b: &[C64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let tol = 1e-7 * (1.0 + max_norm(a).max(max_norm(b)));
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let hit = (0..b.len()).filter(|&j| !used[j]).min_by(|&i, &j| (x - b[i]).norm().total_cmp(&(x - b[j]).norm()));
        match hit {
            Some(j) if (x - b[j]).norm() < tol => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

/// Rejects roots a distance η apart and coinciding roots, except
/// repeated roots on a common zero of α and β.
fn admissible(roots: &[C64], vac: &VacuumEigenPair) -> bool {
    let eta = vac.eta;
    for a in 0..roots.len() {
        for b in a + 1..roots.len() {
            let d = roots[a] - roots[b];
            if (d - eta).norm() < 1e-6 || (d + eta).norm() < 1e-6 {
                return false;
            }
            if d.norm() < 1e-6 && !is_common_zero(vac, roots[a]) {
                return false;
            }
        }
    }
    true
}

/// Snaps roots lying near a common zero of α and β onto it; repeated
/// roots there come out of the companion matrix split by ~sqrt(eps).
fn snap_to_common_zeros(roots: &mut [C64], zeros: &[C64]) {
    for r in roots.iter_mut() {
        if let Some(z) = zeros.iter().find(|z| (*r - **z).norm() < 1e-4) {
            *r = *z;
        }
    }
}

/// Root sets from the TQ relation `Λ(λ) Q(λ) = α(λ) Q(λ+η) + β(λ) Q(λ-η)`
/// with `Q = Π(λ-λ_a)`. When α and β have degree 2 only the constant term
/// of Λ is unknown and the relation is a linear eigenproblem of size M+1
/// in the coefficients of Q; every Bethe solution is among its
/// eigenvectors. Returns `None` for other degrees.
pub fn tq_candidates(vac: &VacuumEigenPair, m: usize) -> Result<Option<Vec<Vec<C64>>>> {
    let (a, b) = (vac.alpha.trimmed(1e-14), vac.beta.trimmed(1e-14));
    let deg = a.degree().unwrap_or(0).max(b.degree().unwrap_or(0));
    if deg != 2 || m == 0 {
        return Ok(None);
    }
    let eta = vac.eta;
    let l2 = a.coeff(2) + b.coeff(2);
    let l1 = a.coeff(1) + b.coeff(1) + m as f64 * eta * (a.coeff(2) - b.coeff(2));
    let fixed = Poly::new(vec![ZERO, l1, l2]);
    let n = m + 1;
    let mut cols: Vec<Poly> = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![ZERO; j + 1];
        e[j] = ONE;
        let mono = Poly::new(e);
        let up = Poly::from_roots(&vec![C64::new(-eta, 0.0); j], ONE);
        let down = Poly::from_roots(&vec![C64::new(eta, 0.0); j], ONE);
        cols.push(&(&(&fixed * &mono) - &(&a * &up)) - &(&b * &down));
    }
    let sq = faer::Mat::<C64>::from_fn(n, n, |i, j| -cols[j].coeff(i));
    let (_, vecs) = crate::linalg::eig(sq.as_ref())?;
    let zeros: Vec<C64> = degeneracy_check(vac, 1e-9)?.into_iter().map(|z| z.lambda).collect();
    let mut out = Vec::new();
    for k in 0..n {
        let lead = vecs[(m, k)];
        let size = (0..n).map(|i| vecs[(i, k)].norm()).fold(0.0, f64::max);
        if lead.norm() < 1e-12 * size {
            continue;
        }
        let q = Poly::new((0..n).map(|i| vecs[(i, k)] / lead).collect());
        let mut roots = q.roots()?;
        snap_to_common_zeros(&mut roots, &zeros);
        sort_complex(&mut roots);
        out.push(roots);
    }
    Ok(Some(out))
}

/// Start vectors that place `k_i` roots in a short string around the
/// `i`-th single-root solution, for every split of M over them.
fn cluster_starts(m1: &[C64], m: usize, spacing: f64, imaginary: bool) -> Vec<Vec<C64>> {
    fn splits(n: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 1 {
            return vec![vec![n]];
        }
        (0..=n)
            .flat_map(|k| {
                splits(n - k, parts - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, k);
                    rest
                })
            })
            .collect()
    }
    splits(m, m1.len())
        .into_iter()
        .take(2000)
        .map(|counts| {
            let mut v = Vec::with_capacity(m);
            for (r, &k) in m1.iter().zip(&counts) {
                for j in 0..k {
                    let off = spacing * (j as f64 - 0.5 * (k as f64 - 1.0));
                    let step = if imaginary { C64::new(0.013 * j as f64, off) } else { C64::new(off, 0.011) };
                    v.push(r + step);
                }
            }
            v
        })
        .collect()
}

/// Multi-start Newton solver for M pseudoparticles. Starts are perturbed
/// M = 1 roots and random complex points, all drawn from a seeded ChaCha
/// stream; converged solutions are screened (distinct, non-singular roots,
/// exact pole cancellation), deduplicated and closed under conjugation.
pub fn solve_m_general(vac: &VacuumEigenPair, m: usize, emap: Option<&EnergyMap>, opts: &SolveOptions) -> Result<SolveReport> {
    if m == 0 {
        let sol = package(Vec::new(), vac, emap)?;
        return Ok(SolveReport { m, solutions: vec![sol], starts_tried: 0, converged: 0, rejected: 0 });
    }
    let d = (&vac.alpha - &vac.beta).trimmed(1e-14);
    if d.degree().unwrap_or(0) == 0 {
        return Err(Error::DegenerateVacuum);
    }
    let m1 = d.roots()?;
    let center = m1.iter().map(|z| z.re).sum::<f64>() / m1.len() as f64;
    let spread = m1.iter().map(|z| (z.re - center).abs()).fold(0.0, f64::max);
    let radius = spread + 0.5 * m as f64 + 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = SolveReport { m, solutions: Vec::new(), starts_tried: 0, converged: 0, rejected: 0 };
    let eta = vac.eta;

    let zeros: Vec<C64> = degeneracy_check(vac, 1e-9)?.into_iter().map(|z| z.lambda).collect();
    let accept = |x: Vec<C64>, report: &mut SolveReport| -> Result<()> {
        let mut x = x;
        sort_complex(&mut x);
        if !admissible(&x, vac) {
            report.rejected += 1;
            return Ok(());
        }
        let sol = match package(x, vac, emap) {
            Ok(s) => s,
            Err(_) => {
                report.rejected += 1;
                return Ok(());
            }
        };
        if sol.remainder > 1e-8 || sol.max_residual() > opts.tol * 10.0 {
            report.rejected += 1;
            return Ok(());
        }
        if !report.solutions.iter().any(|s| same_multiset(&s.roots, &sol.roots)) {
            report.solutions.push(sol);
        }
        Ok(())
    };
    let try_start = |start: Vec<C64>, report: &mut SolveReport| -> Result<()> {
        report.starts_tried += 1;
        let Some(x) = newton(&start, vac, eta, opts.tol, opts.max_iter) else {
            return Ok(());
        };
        report.converged += 1;
        accept(x, report)
    };

    if let Some(cands) = tq_candidates(vac, m)? {
        for roots in cands {
            report.starts_tried += 1;
            report.converged += 1;
            let on_zero = roots.iter().any(|r| zeros.contains(r));
            // polish simple roots; roots on a common zero are exact already
            let polished = if on_zero { None } else { newton(&roots, vac, eta, opts.tol, opts.max_iter) };
            accept(polished.unwrap_or(roots), &mut report)?;
        }
    }
    for (spacing, imaginary) in [(0.7, true), (1.2, true), (0.5, false)] {
        for start in cluster_starts(&m1, m, spacing, imaginary) {
            try_start(start, &mut report)?;
        }
    }
    for k in 0..opts.starts {
        let start: Vec<C64> = if k % 2 == 0 {
            (0..m)
                .map(|a| {
                    let base = m1[rng.random_range(0..m1.len())];
                    base + C64::new(
                        (a as f64 - 0.5 * (m - 1) as f64) * 0.7 + rng.random_range(-0.3..0.3),
                        rng.random_range(-0.3..0.3),
                    )
                })
                .collect()
        } else {
            (0..m)
                .map(|_| C64::new(center + radius * rng.random_range(-1.0..1.0), 0.6 * radius * rng.random_range(-1.0..1.0)))
                .collect()
        };
        try_start(start, &mut report)?;
    }
    // conjugation closure
    let found: Vec<Vec<C64>> = report.solutions.iter().map(|s| s.roots.clone()).collect();
    for roots in found {
        let mut conj: Vec<C64> = roots.iter().map(|z| z.conj()).collect();
        sort_complex(&mut conj);
        if !report.solutions.iter().any(|s| same_multiset(&s.roots, &conj)) {
            try_start(conj, &mut report)?;
        }
    }
    report.solutions.sort_by(|a, b| a.energy.re.total_cmp(&b.energy.re).then(a.energy.im.total_cmp(&b.energy.im)));
    Ok(report)
}

/// `Λ(λ) = α(λ) Π f(λ-λ_a) + β(λ) Π f(λ_a-λ)`. At a root the pole-cancelled
/// polynomial form is used; an invalid solution there is an error.
pub fn eigenvalue_lambda(l: C64, sol: &BetheSolution, vac: &dyn Vacuum, kind: RKind, eta: f64) -> Result<C64> {
    if sol.roots.iter().any(|r| (l - r).norm() < 1e-9) {
        if kind == RKind::Rational && sol.remainder < 1e-8 {
            return Ok(sol.lambda_poly.eval(l));
        }
        return Err(Error::Pole(l));
    }
    let mut pa = vac.alpha(l);
    let mut pb = vac.beta(l);
    for &r in &sol.roots {
        pa *= f_factor(l - r, kind, eta)?;
        pb *= f_factor(r - l, kind, eta)?;
    }
    Ok(pa + pb)
}

/// Residue of the product form of `Λ` at each root; all vanish exactly
/// when the Bethe equations hold.
pub fn lambda_residues(roots: &[C64], vac: &dyn Vacuum, kind: RKind, eta: f64) -> Result<Vec<C64>> {
    let pref = match kind {
        RKind::Rational => eta,
        RKind::Trigonometric => eta.sin(),
    };
    let mut out = Vec::with_capacity(roots.len());
    for (a, &la) in roots.iter().enumerate() {
        let mut pa = vac.alpha(la);
        let mut pb = vac.beta(la);
        for (b, &lb) in roots.iter().enumerate() {
            if b != a {
                pa *= f_factor(la - lb, kind, eta)?;
                pb *= f_factor(lb - la, kind, eta)?;
            }
        }
        out.push(pref * (pa - pb));
    }
    Ok(out)
}

/// One branch of the single-atom BS sector in the two-state basis
/// `|M⟩ = X|M,↓⟩ + Y|M-1,↑⟩` (energies in the Hamiltonian's own units).
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricBSSolution {
    pub m: usize,
    pub delta: f64,
    pub omega_f: f64,
    pub branch: i8,
    /// `κ = Y/X`, root of `Mκ² + δκ - M = 0`.
    pub kappa: f64,
    pub x: f64,
    pub y: f64,
    /// `Δ₊ + Mκ` with `Δ± = Mω_f ± δ/2`.
    pub energy: f64,
    /// `Mω_f ± (δ² + M²)^{1/2}` on the same branch.
    pub closed_form_energy: f64,
    pub quadratic_residual: f64,
}

pub fn symmetric_bs(m: usize, delta: f64, omega_f: f64) -> Result<[SymmetricBSSolution; 2]> {
    if m == 0 {
        return Err(Error::InvalidSector("symmetric reduction needs M >= 1".into()));
    }
    let mf = m as f64;
    let disc = (delta * delta + 4.0 * mf * mf).sqrt();
    let make = |branch: i8| {
        let sgn = branch as f64;
        // stable root pair of Mκ² + δκ - M
        let kappa = if sgn * delta <= 0.0 {
            (-delta + sgn * disc) / (2.0 * mf)
        } else {
            -1.0 / ((-delta - sgn * disc) / (2.0 * mf))
        };
        let norm = (1.0 + kappa * kappa).sqrt();
        let delta_plus = mf * omega_f + 0.5 * delta;
        SymmetricBSSolution {
            m,
            delta,
            omega_f,
            branch,
            kappa,
            x: 1.0 / norm,
            y: kappa / norm,
            energy: delta_plus + mf * kappa,
            closed_form_energy: mf * omega_f + sgn * (delta * delta + mf * mf).sqrt(),
            quadratic_residual: (mf * kappa * kappa + delta * kappa - mf).abs(),
        }
    };
    Ok([make(1), make(-1)])
}

/// Elementary symmetric polynomials `s_0 = 1, s_1, …, s_M` of the roots.
pub fn elementary_symmetric(roots: &[C64]) -> Vec<C64> {
    let p = Poly::from_roots(roots, ONE);
    let m = roots.len();
    (0..=m)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            p.coeff(m - k) * sign
        })
        .collect()
}

/// `X_M = M s_M`, `Y_M = -M s_M + ½δ(s_{M-1} + … + s_1 + 1)` from a root set.
pub fn xy_from_symmetric_roots(roots: &[C64], delta: f64) -> (C64, C64) {
    let m = roots.len();
    let s = elementary_symmetric(roots);
    let mf = m as f64;
    let x = s[m] * mf;
    let tail: C64 = s[..m].iter().sum();
    (x, -s[m] * mf + tail * (0.5 * delta))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommonZero {
    pub lambda: C64,
    pub alpha_residual: f64,
    pub beta_residual: f64,
}

/// Common zeros of α and β: the degeneracy condition `α(λ₁) = β(λ₁) = 0`.
pub fn degeneracy_check(vac: &VacuumEigenPair, tol: f64) -> Result<Vec<CommonZero>> {
    let a = vac.alpha.trimmed(1e-14);
    let b = vac.beta.trimmed(1e-14);
    if a.degree().unwrap_or(0) == 0 || b.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let scale = a.max_coeff().max(b.max_coeff()).max(1.0);
    let mut out: Vec<CommonZero> = Vec::new();
    for z in a.roots()? {
        let br = b.eval(z).norm();
        if br < tol * scale && !out.iter().any(|cz| (cz.lambda - z).norm() < 1e-8) {
            out.push(CommonZero { lambda: z, alpha_residual: a.eval(z).norm(), beta_residual: br });
        }
    }
    Ok(out)
}

/// The ladder `E_M = M E_1` implied by a degenerate single-excitation energy.
pub fn degenerate_ladder(e1: C64, m_max: usize) -> Vec<C64> {
    (1..=m_max).map(|m| e1 * m as f64).collect()
}

pub fn energies(sols: &[BetheSolution]) -> Vec<C64> {
    sols.iter().map(|s| s.energy).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::vacuum_for;
    use crate::linalg::c;

    fn bs(delta: f64, na: usize) -> (MRParams, VacuumEigenPair, EnergyMap) {
        let p = MRParams::bs(3.02, 1.0, delta, na).unwrap();
        let vac = vacuum_for(&p, ModeKind::Su11Boson, 1).unwrap();
        let em = EnergyMap::for_model(&p, ModeKind::Su11Boson, 1, &vac).unwrap();
        (p, vac, em)
    }

    #[test]
    fn f_factor_values() {
        assert_eq!(f_factor(c(1.0), RKind::Rational, 1.0).unwrap(), c(2.0));
        assert!((f_factor(c(1e8), RKind::Rational, 1.0).unwrap() - ONE).norm() < 1e-7);
        let a = f_factor(c(0.3), RKind::Trigonometric, 0.4).unwrap();
        let b = f_factor(c(0.3 + std::f64::consts::PI), RKind::Trigonometric, 0.4).unwrap();
        assert!((a - b).norm() < 1e-12);
        assert!(matches!(f_factor(ZERO, RKind::Rational, 1.0), Err(Error::Pole(_))));
    }

    #[test]
    fn resonance_triplet() {
        let (p, vac, em) = bs(0.0, 2);
        let sols = solve_m1(&vac, Some(&em)).unwrap();
        let mut e: Vec<f64> = sols.iter().map(|s| s.energy.re).collect();
        e.sort_by(f64::total_cmp);
        for (got, want) in e.iter().zip([2.02, 3.02, 4.02]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
        // shifted roots u = λ + c sit at -1/2, 0, 1/2
        for (s, u) in sols.iter().zip([-0.5, 0.0, 0.5]) {
            assert!((s.roots[0].re + p.c11 - u).abs() < 1e-12);
            assert!(s.max_residual() < 1e-10);
        }
    }

    #[test]
    fn newton_agrees_with_companion() {
        let (_, vac, em) = bs(0.15, 2);
        let comp = solve_m1(&vac, Some(&em)).unwrap();
        let rep = solve_m_general(&vac, 1, Some(&em), &SolveOptions { starts: 40, ..Default::default() }).unwrap();
        assert_eq!(rep.solutions.len(), 3);
        for s in &comp {
            assert!(rep.solutions.iter().any(|t| (t.roots[0] - s.roots[0]).norm() < 1e-10));
        }
    }

    #[test]
    fn non_root_has_large_residual() {
        let (_, vac, _) = bs(0.0, 2);
        let r = bethe_residual(&[c(0.123)], &vac, RKind::Rational, 1.0).unwrap();
        assert!(r[0].norm() > 1e-2);
    }

    #[test]
    fn symmetric_quadratic() {
        for delta in [0.0, 0.3, -0.5] {
            for m in 1..5 {
                for s in symmetric_bs(m, delta, 1.0).unwrap() {
                    assert!(s.quadratic_residual < 1e-12);
                }
            }
        }
        let [p, n] = symmetric_bs(3, 0.0, 2.0).unwrap();
        assert!((p.energy - 9.0).abs() < 1e-12 && (n.energy - 3.0).abs() < 1e-12);
        assert!(symmetric_bs(0, 0.1, 1.0).is_err());
    }

    #[test]
    fn single_atom_resonance_common_zeros() {
        let p = MRParams::bs(3.02, 1.0, 0.0, 1).unwrap();
        let vac = vacuum_for(&p, ModeKind::Su11Boson, 1).unwrap();
        let cz = degeneracy_check(&vac, 1e-10).unwrap();
        assert_eq!(cz.len(), 2);
        for want in [0.5 * (-3.02 + 1.0), 0.5 * (-3.02 - 1.0)] {
            assert!(cz.iter().any(|z| (z.lambda - c(want)).norm() < 1e-12));
        }
        let p = MRParams::bs(3.02, 1.0, 0.1, 1).unwrap();
        let vac = vacuum_for(&p, ModeKind::Su11Boson, 1).unwrap();
        assert!(degeneracy_check(&vac, 1e-8).unwrap().is_empty());
    }

    #[test]
    fn empty_solution_lambda_is_alpha_plus_beta() {
        let (_, vac, em) = bs(0.2, 2);
        let rep = solve_m_general(&vac, 0, Some(&em), &SolveOptions::default()).unwrap();
        let sol = &rep.solutions[0];
        let l = C64::new(0.3, 0.2);
        let lam = eigenvalue_lambda(l, sol, &vac, RKind::Rational, 1.0).unwrap();
        assert!((lam - vac.alpha.eval(l) - vac.beta.eval(l)).norm() < 1e-13);
        assert!(sol.energy.norm() < 1e-13);
    }
}
