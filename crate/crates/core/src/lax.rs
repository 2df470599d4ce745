//! R-matrices, Lax operators, monodromy and transfer matrices, numerical
//! Yang-Baxter checks, conserved charges and vacuum eigenvalue functions.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{FullOps, ModeKind, OperatorMatrix, SpaceSpec};
use crate::linalg::{self, c, ONE, ZERO};
use crate::models::{build_h_mr, MRParams};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RKind {
    Rational,
    Trigonometric,
}

/// 4x4 R-matrix on `C² ⊗ C²`, basis order `(a1, a2) -> 2 a1 + a2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RMatrix {
    pub kind: RKind,
    pub eta: f64,
}

impl RMatrix {
    /// `R(u) = u I + P` with unit shift, the normalisation fixed by the Lax
    /// operators' unit spectral slope.
    pub fn rational() -> Self {
        Self { kind: RKind::Rational, eta: 1.0 }
    }

    pub fn trigonometric(eta: f64) -> Self {
        Self { kind: RKind::Trigonometric, eta }
    }

    pub fn entries(&self, u: C64) -> [[C64; 4]; 4] {
        let mut r = [[ZERO; 4]; 4];
        let eta = c(self.eta);
        match self.kind {
            RKind::Rational => {
                for (i, row) in r.iter_mut().enumerate() {
                    row[i] = u;
                }
                r[0][0] += eta;
                r[3][3] += eta;
                r[1][2] += eta;
                r[2][1] += eta;
            }
            RKind::Trigonometric => {
                let a = (u + eta).sin();
                let b = u.sin();
                let cc = eta.sin();
                r[0][0] = a;
                r[3][3] = a;
                r[1][1] = b;
                r[2][2] = b;
                r[1][2] = cc;
                r[2][1] = cc;
            }
        }
        r
    }

    /// True where `R(u)` is not invertible.
    pub fn is_singular(&self, u: C64, tol: f64) -> bool {
        let eta = c(self.eta);
        match self.kind {
            RKind::Rational => (u + eta).norm() < tol || (u - eta).norm() < tol,
            RKind::Trigonometric => {
                let a = (u + eta).sin();
                let b = u.sin();
                let cc = eta.sin();
                a.norm() < tol || (b * b - cc * cc).norm() < tol
            }
        }
    }

    fn embed3(&self, u: C64, pair: (usize, usize)) -> Mat<C64> {
        let r = self.entries(u);
        let bit = |s: usize, k: usize| (s >> (2 - k)) & 1;
        Mat::from_fn(8, 8, |i, j| {
            let other = 3 - pair.0 - pair.1;
            if bit(i, other) != bit(j, other) {
                return ZERO;
            }
            let ri = 2 * bit(i, pair.0) + bit(i, pair.1);
            let rj = 2 * bit(j, pair.0) + bit(j, pair.1);
            r[ri][rj]
        })
    }
}

/// `‖R12(u-v) R13(u) R23(v) - R23(v) R13(u) R12(u-v)‖_max`.
pub fn pure_ybe_residual(r: &RMatrix, u: C64, v: C64) -> f64 {
    let r12 = r.embed3(u - v, (0, 1));
    let r13 = r.embed3(u, (0, 2));
    let r23 = r.embed3(v, (1, 2));
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    linalg::max_abs((&lhs - &rhs).as_ref())
}

/// 2x2 auxiliary matrix of operators evaluated at `lambda`.
#[derive(Clone, Debug)]
pub struct LaxOperator {
    pub lambda: C64,
    pub entries: [[OperatorMatrix; 2]; 2],
}

impl LaxOperator {
    fn mul(&self, rhs: &LaxOperator) -> LaxOperator {
        let e = |i: usize, j: usize| {
            &(&self.entries[i][0] * &rhs.entries[0][j]) + &(&self.entries[i][1] * &rhs.entries[1][j])
        };
        LaxOperator { lambda: self.lambda, entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    /// `C(λ) = T_12`, annihilates pseudoparticles.
    pub fn c_op(&self) -> &OperatorMatrix {
        &self.entries[0][1]
    }

    /// `B(λ) = T_21`, creates pseudoparticles.
    pub fn b_op(&self) -> &OperatorMatrix {
        &self.entries[1][0]
    }

    pub fn trace(&self) -> OperatorMatrix {
        &self.entries[0][0] + &self.entries[1][1]
    }
}

/// Ancestor mode Lax operator followed by one spin Lax operator per atom.
#[derive(Clone, Debug)]
pub struct Chain {
    pub params: MRParams,
    pub ops: FullOps,
}

impl Chain {
    pub fn new(params: &MRParams, kind: ModeKind, spec: &SpaceSpec) -> Result<Self> {
        params.check_kind(kind)?;
        Self::new_unchecked(params, kind, spec)
    }

    /// Skips the central-element consistency check; such chains violate the
    /// exchange relations and serve as negative controls.
    pub fn new_unchecked(params: &MRParams, kind: ModeKind, spec: &SpaceSpec) -> Result<Self> {
        if spec.deformation().is_some() {
            return Err(Error::UnsupportedRealization("rational chains are undeformed".into()));
        }
        if spec.n_atoms() != params.n_atoms() {
            return Err(Error::DimensionMismatch { expected: params.n_atoms(), got: spec.n_atoms() });
        }
        Ok(Self { params: params.clone(), ops: FullOps::build(kind, spec)? })
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.ops.spec
    }

    pub fn kind(&self) -> ModeKind {
        self.ops.kind
    }

    fn lam(&self, l: C64) -> OperatorMatrix {
        self.ops.identity.scale(l)
    }

    /// `[[c10(λ+s3)+c11, s-], [s+, c20(λ-s3)-c21]]`
    pub fn ancestor(&self, l: C64) -> LaxOperator {
        let p = &self.params;
        let s = &self.ops.mode;
        let id = &self.ops.identity;
        let a = &(&self.lam(l) + &s.z).scale_re(p.c10) + &id.scale_re(p.c11);
        let d = &(&self.lam(l) - &s.z).scale_re(p.c20) - &id.scale_re(p.c21);
        LaxOperator { lambda: l, entries: [[a, s.minus.clone()], [s.plus.clone(), d]] }
    }

    /// `[[λ+S^z_j+c_j, S-_j], [S+_j, λ-S^z_j+c_j]]`
    pub fn atom(&self, j: usize, l: C64) -> LaxOperator {
        let at = &self.ops.atoms[j];
        let shift = &self.lam(l) + &self.ops.identity.scale_re(self.params.inhomogeneities[j]);
        LaxOperator {
            lambda: l,
            entries: [[&shift + &at.z, at.minus.clone()], [at.plus.clone(), &shift - &at.z]],
        }
    }

    /// `T(λ) = L^s(λ) L_1(λ) … L_{N_a}(λ)`
    pub fn monodromy(&self, l: C64) -> LaxOperator {
        (0..self.params.n_atoms()).fold(self.ancestor(l), |t, j| t.mul(&self.atom(j, l)))
    }

    pub fn transfer(&self, l: C64) -> OperatorMatrix {
        self.monodromy(l).trace()
    }

    /// Indices on which truncation cannot leak into the exchange relations:
    /// excitation number at most cutoff/2 (or the low Fock band for the
    /// canonical mode).
    pub fn safe_indices(&self) -> Vec<usize> {
        let spec = self.spec();
        if self.kind().has_fock_vacuum() {
            let half = spec.boson_cutoff() / 2;
            spec.pseudoparticle_numbers()
                .iter()
                .enumerate()
                .filter(|(_, &m)| m <= half)
                .map(|(i, _)| i)
                .collect()
        } else {
            self.ops.safe_indices(self.kind().safe_level(spec.boson_cutoff()))
        }
    }

    pub fn vacuum_index(&self) -> usize {
        let spec = self.spec();
        spec.compose(0, &vec![spec.atom_dim() - 1; spec.n_atoms()])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YbeReport {
    pub rtt: f64,
    pub tau_commutator: f64,
}

/// RTT residual `‖R(λ-μ) T1(λ) T2(μ) - T2(μ) T1(λ) R(λ-μ)‖` and
/// `‖[τ(λ), τ(μ)]‖`, both on the cutoff-safe block.
pub fn check_ybe(chain: &Chain, l: C64, m: C64) -> Result<YbeReport> {
    let r = RMatrix::rational();
    if r.is_singular(l - m, 1e-12) {
        return Err(Error::SingularArgument(l - m));
    }
    let rm = r.entries(l - m);
    let tl = chain.monodromy(l);
    let tm = chain.monodromy(m);
    let safe = chain.safe_indices();
    let block = |op: &OperatorMatrix| op.restricted(&safe);
    let dim = chain.spec().dim();
    let mut rtt: f64 = 0.0;
    for row in 0..4 {
        let (a1, a2) = (row / 2, row % 2);
        for col in 0..4 {
            let (b1, b2) = (col / 2, col % 2);
            let mut lhs = OperatorMatrix::zeros(chain.spec().factor_dims());
            let mut rhs = lhs.clone();
            for c1 in 0..2 {
                for c2 in 0..2 {
                    let w = rm[row][2 * c1 + c2];
                    if w != ZERO {
                        lhs = &lhs + &(&tl.entries[c1][b1] * &tm.entries[c2][b2]).scale(w);
                    }
                    let w = rm[2 * c1 + c2][col];
                    if w != ZERO {
                        rhs = &rhs + &(&tm.entries[a2][c2] * &tl.entries[a1][c1]).scale(w);
                    }
                }
            }
            debug_assert_eq!(lhs.dim(), dim);
            rtt = rtt.max(linalg::max_abs((&block(&lhs) - &block(&rhs)).as_ref()));
        }
    }
    let taul = tl.trace();
    let taum = tm.trace();
    let comm = linalg::max_abs(block(&taul.commutator(&taum)).as_ref());
    Ok(YbeReport { rtt, tau_commutator: comm })
}

/// Coefficients `C_a` of `τ(λ) = Σ_a C_a λ^a` recovered by interpolation.
#[derive(Clone, Debug)]
pub struct TransferCharges {
    pub coeffs: Vec<OperatorMatrix>,
    pub nodes: Vec<f64>,
    pub condition: f64,
}

impl TransferCharges {
    /// Number of coefficients whose norm on the safe block exceeds `tol`.
    pub fn nonvanishing(&self, tol: f64) -> usize {
        self.coeffs.iter().filter(|c| c.max_abs() > tol).count()
    }
}

/// Chebyshev nodes scaled around the inhomogeneities.
pub fn default_nodes(params: &MRParams) -> Vec<f64> {
    let n = params.n_atoms() + 2;
    let cj = &params.inhomogeneities;
    let (lo, hi) = cj
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(-x), hi.max(-x)));
    let (lo, hi) = if cj.is_empty() { (0.0, 0.0) } else { (lo, hi) };
    let center = 0.5 * (lo + hi);
    let half = (0.5 * (hi - lo) + 1.0).max(1.5);
    (0..n)
        .map(|k| center + half * ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect()
}

pub fn charges_from_transfer(chain: &Chain, nodes: Option<&[f64]>) -> Result<TransferCharges> {
    let n = chain.params.n_atoms() + 2;
    let nodes: Vec<f64> = match nodes {
        Some(x) => x.to_vec(),
        None => default_nodes(&chain.params),
    };
    if nodes.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: nodes.len() });
    }
    let v = Mat::<C64>::from_fn(n, n, |i, j| c(nodes[i].powi(j as i32)));
    let vinv = linalg::inverse(v.as_ref());
    let condition = linalg::norm1(v.as_ref()) * linalg::norm1(vinv.as_ref());
    if !condition.is_finite() || condition > 1e12 {
        return Err(Error::IllConditioned(condition));
    }
    let taus: Vec<OperatorMatrix> = nodes.iter().map(|&x| chain.transfer(c(x))).collect();
    let coeffs = (0..n)
        .map(|a| {
            taus.iter()
                .enumerate()
                .fold(OperatorMatrix::zeros(chain.spec().factor_dims()), |acc, (k, t)| {
                    &acc + &t.scale(vinv[(a, k)])
                })
        })
        .collect();
    Ok(TransferCharges { coeffs, nodes, condition })
}

/// `H = α C_{N_a-1} + a C_{N_a} + b` on the safe block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub residual: f64,
}

pub fn calibrate(chain: &Chain, charges: &TransferCharges, h: &OperatorMatrix) -> Result<Calibration> {
    let na = chain.params.n_atoms();
    if na == 0 {
        return Err(Error::InconsistentParams("charge calibration needs at least one atom".into()));
    }
    let alpha = chain.params.alpha;
    let safe = chain.safe_indices();
    let d = &h.restricted(&safe) - &linalg::scale(charges.coeffs[na - 1].restricted(&safe).as_ref(), c(alpha));
    let q = charges.coeffs[na].restricted(&safe);
    // least squares on the diagonal for d ≈ a q + b
    let (mut sqq, mut sq, mut sqd, mut sd) = (0.0, 0.0, 0.0, 0.0);
    let k = safe.len() as f64;
    for i in 0..safe.len() {
        let (qi, di) = (q[(i, i)].re, d[(i, i)].re);
        sqq += qi * qi;
        sq += qi;
        sqd += qi * di;
        sd += di;
    }
    let det = sqq * k - sq * sq;
    let (a, b) = if det.abs() > 1e-9 * (sqq * k).max(1.0) {
        ((sqd * k - sq * sd) / det, (sqq * sd - sq * sqd) / det)
    } else {
        (0.0, sd / k)
    };
    let fit = &linalg::scale(q.as_ref(), c(a)) + &linalg::scale(linalg::identity(safe.len()).as_ref(), c(b));
    let residual = linalg::max_abs((&d - &fit).as_ref());
    Ok(Calibration { alpha, a, b, residual })
}

/// Calibration of the Hamiltonian against the transfer charges, computed on
/// a small auxiliary space (the identity is exact, independent of cutoff).
pub fn energy_calibration(params: &MRParams, kind: ModeKind, two_s: usize) -> Result<Calibration> {
    let cutoff = 2 * (params.n_atoms() * two_s + 2);
    let spec = SpaceSpec::new(cutoff, params.n_atoms(), two_s)?;
    let chain = Chain::new(params, kind, &spec)?;
    let charges = charges_from_transfer(&chain, None)?;
    let h = build_h_mr(params, kind, &spec)?;
    let cal = calibrate(&chain, &charges, &h)?;
    let scale = h.max_abs().max(1.0);
    if cal.residual > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "Hamiltonian is not an affine function of the transfer charges (residual {:.3e})",
            cal.residual
        )));
    }
    Ok(cal)
}

/// Pseudovacuum eigenvalues `T11|0> = α(λ)|0>`, `T22|0> = β(λ)|0>`.
#[derive(Clone, Debug)]
pub struct VacuumEigenPair {
    /// Authoritative polynomials from the monodromy's vacuum action.
    pub alpha: Poly,
    pub beta: Poly,
    /// `<0|s3|0>` and the atomic spin.
    pub r: f64,
    pub s: f64,
    /// `(c10(λ+r)+c11) Π(λ-s+c_j)` and `(c20(λ-r)-c21) Π(λ+s+c_j)`.
    pub closed_alpha: Poly,
    pub closed_beta: Poly,
    /// β with the mode prefactor `(c10(λ-r)-c21)`.
    pub c10_prefactor_beta: Poly,
    pub closed_form_residual: f64,
    pub c10_prefactor_matches: bool,
    pub eta: f64,
}

fn interpolate(nodes: &[f64], values: &[C64]) -> Result<Poly> {
    let n = nodes.len();
    let a: Vec<Vec<C64>> = nodes.iter().map(|&x| (0..n).map(|j| c(x.powi(j as i32))).collect()).collect();
    let coef = linalg::solve_small(a, values.to_vec())
        .ok_or_else(|| Error::IllConditioned(f64::INFINITY))?;
    Ok(Poly::new(coef))
}

fn poly_distance(a: &Poly, b: &Poly) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n).map(|k| (a.coeff(k) - b.coeff(k)).norm()).fold(0.0, f64::max)
}

pub fn vacuum_eigen(chain: &Chain) -> Result<VacuumEigenPair> {
    let p = &chain.params;
    let spec = chain.spec();
    let v = chain.vacuum_index();
    let nodes = default_nodes(p);
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut leak: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for &x in &nodes {
        let t = chain.monodromy(c(x));
        let (a, d) = (t.entries[0][0].get(v, v), t.entries[1][1].get(v, v));
        scale = scale.max(a.norm()).max(d.norm());
        for i in 0..spec.dim() {
            leak = leak.max(t.c_op().get(i, v).norm());
            if i != v {
                leak = leak.max(t.entries[0][0].get(i, v).norm()).max(t.entries[1][1].get(i, v).norm());
            }
        }
        alphas.push(a);
        betas.push(d);
    }
    if leak > 1e-10 * scale {
        return Err(Error::VacuumNotAnnihilated(leak / scale));
    }
    let alpha = interpolate(&nodes, &alphas)?;
    let beta = interpolate(&nodes, &betas)?;
    let r = chain.ops.mode.z.get(v, v).re;
    let s = spec.spin();
    let atoms_a = p.inhomogeneities.iter().map(|cj| c(s - cj)).collect::<Vec<_>>();
    let atoms_b = p.inhomogeneities.iter().map(|cj| c(-s - cj)).collect::<Vec<_>>();
    let pa = Poly::from_roots(&atoms_a, ONE);
    let pb = Poly::from_roots(&atoms_b, ONE);
    let closed_alpha = &Poly::new(vec![c(p.c10 * r + p.c11), c(p.c10)]) * &pa;
    let closed_beta = &Poly::new(vec![c(-p.c20 * r - p.c21), c(p.c20)]) * &pb;
    let c10_prefactor_beta = &Poly::new(vec![c(-p.c10 * r - p.c21), c(p.c10)]) * &pb;
    let tol = 1e-9 * alpha.max_coeff().max(beta.max_coeff()).max(1.0);
    let closed_form_residual = poly_distance(&alpha, &closed_alpha).max(poly_distance(&beta, &closed_beta));
    let c10_prefactor_matches = poly_distance(&beta, &c10_prefactor_beta) < tol;
    Ok(VacuumEigenPair {
        alpha: alpha.trimmed(1e-13),
        beta: beta.trimmed(1e-13),
        r,
        s,
        closed_alpha,
        closed_beta,
        c10_prefactor_beta,
        closed_form_residual,
        c10_prefactor_matches,
        eta: 1.0,
    })
}

/// Vacuum pair of a rational model, computed on a minimal space.
pub fn vacuum_for(params: &MRParams, kind: ModeKind, two_s: usize) -> Result<VacuumEigenPair> {
    let spec = SpaceSpec::new(2, params.n_atoms(), two_s)?;
    vacuum_eigen(&Chain::new(params, kind, &spec)?)
}
