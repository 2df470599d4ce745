//! Hamiltonians of the matter-radiation family and the parameter to
//! frequency map.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{self, embed, FullOps, ModeKind, OperatorMatrix, SpaceSpec, Triple};
use crate::linalg::{c, ZERO};

/// Ancestor Lax parameters `c10, c20, c11, c21`, coupling and inhomogeneities.
#[derive(Clone, Debug, PartialEq)]
pub struct MRParams {
    pub c10: f64,
    pub c20: f64,
    pub c11: f64,
    pub c21: f64,
    pub alpha: f64,
    pub inhomogeneities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frequencies {
    pub omega_f: f64,
    pub w: Vec<f64>,
    pub omega_a: Vec<f64>,
}

fn nonzero_alpha(alpha: f64) -> Result<()> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::InconsistentParams(format!("coupling alpha = {alpha} must be finite and nonzero")));
    }
    Ok(())
}

fn nonempty(omega_a: &[f64]) -> Result<()> {
    if omega_a.is_empty() {
        return Err(Error::InconsistentParams("at least one atom is required".into()));
    }
    Ok(())
}

impl MRParams {
    pub fn raw(c10: f64, c20: f64, c11: f64, c21: f64, alpha: f64, inhomogeneities: Vec<f64>) -> Self {
        Self { c10, c20, c11, c21, alpha, inhomogeneities }
    }

    /// Buck-Sukumar reduction with `N_a` equally detuned atoms, `δ = ω_f - ω_a`.
    pub fn bs(omega_f: f64, alpha: f64, delta: f64, n_atoms: usize) -> Result<Self> {
        Self::bs_with_atoms(omega_f, alpha, &vec![omega_f - delta; n_atoms])
    }

    /// Buck-Sukumar reduction `c10 = -c20 = 1`, `c11 = c21 = c`, solving the
    /// frequency map for `c` and the `c_j` given per-atom frequencies.
    pub fn bs_with_atoms(omega_f: f64, alpha: f64, omega_a: &[f64]) -> Result<Self> {
        nonzero_alpha(alpha)?;
        nonempty(omega_a)?;
        let n = omega_a.len() as f64;
        let sum_a: f64 = omega_a.iter().sum();
        let cc = (omega_f - n * omega_f + sum_a) / (2.0 * alpha * n);
        let cj = omega_a
            .iter()
            .map(|wa| (omega_f - wa + 2.0 * alpha * cc) / (2.0 * alpha))
            .collect();
        Ok(Self::raw(1.0, -1.0, cc, cc, alpha, cj))
    }

    pub fn jc(omega_f: f64, alpha: f64, delta: f64, n_atoms: usize) -> Result<Self> {
        Self::jc_with_atoms(omega_f, alpha, &vec![omega_f - delta; n_atoms])
    }

    /// Jaynes-Cummings reduction `c10 = α`, `c20 = 0`, `c11 = c`, `c21 = -1/α`.
    pub fn jc_with_atoms(omega_f: f64, alpha: f64, omega_a: &[f64]) -> Result<Self> {
        nonzero_alpha(alpha)?;
        nonempty(omega_a)?;
        let n = omega_a.len() as f64;
        let sum_a: f64 = omega_a.iter().sum();
        let alpha_c = (omega_f - n * omega_f + sum_a) / n + 1.0;
        let cj = omega_a
            .iter()
            .map(|wa| (omega_f - wa + alpha_c - 1.0) / (alpha * alpha))
            .collect();
        Ok(Self::raw(alpha, 0.0, alpha_c / alpha, -1.0 / alpha, alpha, cj))
    }

    /// Trapped-ion reduction `c10 = -1`, `c11 = c`, `c20 = c21 = 0`, one atom.
    pub fn ti(omega_f: f64, omega_a: f64, alpha: f64) -> Result<Self> {
        nonzero_alpha(alpha)?;
        Ok(Self::raw(-1.0, 0.0, omega_a / alpha, 0.0, alpha, vec![-omega_f / alpha]))
    }

    pub fn n_atoms(&self) -> usize {
        self.inhomogeneities.len()
    }

    /// `(m+, m-) = (c10 c20, c11 c20 + c10 c21)`.
    pub fn central_elements(&self) -> (f64, f64) {
        (self.c10 * self.c20, self.c11 * self.c20 + self.c10 * self.c21)
    }

    pub fn check_kind(&self, kind: ModeKind) -> Result<()> {
        let want = kind.central_elements().ok_or_else(|| {
            Error::InconsistentParams(format!("{} is a deformed realization; use QMRParams", kind.name()))
        })?;
        let got = self.central_elements();
        let scale = 1.0 + self.c10.abs() * (self.c20.abs() + self.c21.abs()) + self.c11.abs() * self.c20.abs();
        if (got.0 - want.0).abs() > 1e-12 * scale || (got.1 - want.1).abs() > 1e-12 * scale {
            return Err(Error::InconsistentParams(format!(
                "central elements ({:.6}, {:.6}) do not match {} ({}, {})",
                got.0,
                got.1,
                kind.name(),
                want.0,
                want.1
            )));
        }
        Ok(())
    }

    pub fn frequencies(&self) -> Frequencies {
        let w: Vec<f64> = self
            .inhomogeneities
            .iter()
            .map(|cj| self.alpha * (self.c10 - self.c20) * cj)
            .collect();
        let omega_f: f64 = w.iter().sum();
        let shift = self.alpha * (self.c11 + self.c21);
        let omega_a = w.iter().map(|wj| omega_f - wj + shift).collect();
        Frequencies { omega_f, w, omega_a }
    }
}

fn check_space(params: &MRParams, spec: &SpaceSpec) -> Result<()> {
    if spec.deformation().is_some() {
        return Err(Error::InvalidSpace("undeformed model on a deformed space".into()));
    }
    if spec.n_atoms() != params.n_atoms() {
        return Err(Error::DimensionMismatch { expected: params.n_atoms(), got: spec.n_atoms() });
    }
    Ok(())
}

/// `H = H_d + H_Ss + H_SS` of the unified model.
pub fn build_h_mr(params: &MRParams, kind: ModeKind, spec: &SpaceSpec) -> Result<OperatorMatrix> {
    params.check_kind(kind)?;
    check_space(params, spec)?;
    let ops = FullOps::build(kind, spec)?;
    let fr = params.frequencies();
    let a = params.alpha;
    let csum = params.c10 + params.c20;
    let s = &ops.mode;
    let mut h = s.z.scale_re(fr.omega_f);
    for (j, at) in ops.atoms.iter().enumerate() {
        h = &h + &at.z.scale_re(fr.omega_a[j]);
        let hop = &(&s.plus * &at.minus) + &(&s.minus * &at.plus);
        let zz = (&s.z * &at.z).scale_re(csum);
        h = &h + &(&hop + &zz).scale_re(a);
    }
    for i in 0..ops.atoms.len() {
        for j in i + 1..ops.atoms.len() {
            let (ai, aj) = (&ops.atoms[i], &ops.atoms[j]);
            let t = &(&(&ai.z * &aj.z).scale_re(csum) + &(&ai.minus * &aj.plus).scale_re(params.c10))
                + &(&ai.plus * &aj.minus).scale_re(params.c20);
            h = &h + &t.scale_re(a);
        }
    }
    Ok(h)
}

/// Multi-atom Buck-Sukumar Hamiltonian, assembled term by term with equal
/// atomic frequencies `ω_a = ω_f - δ`:
/// `ω_f s3 + Σ_j [ω_a S^z_j + α(s+ S-_j + s- S+_j)] + α Σ_{i<j}(S-_i S+_j - S+_i S-_j)`.
pub fn build_h_bs(omega_f: f64, alpha: f64, delta: f64, spec: &SpaceSpec) -> Result<OperatorMatrix> {
    if spec.n_atoms() == 0 {
        return Err(Error::InconsistentParams("the BS model needs at least one atom".into()));
    }
    if spec.deformation().is_some() {
        return Err(Error::InvalidSpace("undeformed model on a deformed space".into()));
    }
    let omega_a = omega_f - delta;
    let d = spec.mode_dim();
    // s- = b sqrt(N): <n-1|s-|n> = n
    let mut sm = faer::Mat::<C64>::zeros(d, d);
    for n in 1..d {
        sm[(n - 1, n)] = c(n as f64);
    }
    let sm = OperatorMatrix::new(sm, vec![d])?;
    let sp = sm.dagger();
    let s3 = OperatorMatrix::diagonal(&(0..d).map(|n| c(n as f64 + 0.5)).collect::<Vec<_>>(), vec![d])?;
    let spin = hilbert::spin_ops(spec.two_s())?;
    let e = |op: &OperatorMatrix, slot| embed(op, slot, spec);
    let (sp, sm, s3) = (e(&sp, 0)?, e(&sm, 0)?, e(&s3, 0)?);
    let atoms: Vec<Triple> = (1..=spec.n_atoms())
        .map(|k| {
            Ok(Triple { plus: e(&spin.plus, k)?, minus: e(&spin.minus, k)?, z: e(&spin.z, k)? })
        })
        .collect::<Result<_>>()?;
    let mut h = s3.scale_re(omega_f);
    for at in &atoms {
        h = &h + &at.z.scale_re(omega_a);
        h = &h + &(&(&sp * &at.minus) + &(&sm * &at.plus)).scale_re(alpha);
    }
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            let t = &(&atoms[i].minus * &atoms[j].plus) - &(&atoms[i].plus * &atoms[j].minus);
            h = &h + &t.scale_re(alpha);
        }
    }
    Ok(h)
}

/// Jaynes-Cummings reduction with the boson realization.
pub fn build_h_jc(params: &MRParams, spec: &SpaceSpec) -> Result<OperatorMatrix> {
    let a = params.alpha;
    if params.c20 != 0.0 || (params.c10 - a).abs() > 1e-14 * a.abs() || (params.c21 * a + 1.0).abs() > 1e-14 {
        return Err(Error::InconsistentParams("not the JC reduction (c10 = alpha, c20 = 0, c21 = -1/alpha)".into()));
    }
    build_h_mr(params, ModeKind::Boson, spec)
}

/// Position and momentum of the mode factor.
pub fn canonical_xp(spec: &SpaceSpec) -> (OperatorMatrix, OperatorMatrix) {
    let (b, bd, _) = hilbert::boson_ops(spec);
    let r2 = std::f64::consts::SQRT_2;
    let x = (&b + &bd).scale_re(1.0 / r2);
    let p = (&b - &bd).scale(C64::new(0.0, -1.0 / r2));
    (x, p)
}

/// Trapped-ion Hamiltonian for one atom:
/// `(ω_a - ω_f) S^z + (S^z)^2 + α(e^{-ix} S+ + e^{ix} S-) + ½(p² + x²) + xp`.
/// The `xp` term is kept literally, so the matrix is not Hermitian.
pub fn build_h_ti(omega_f: f64, omega_a: f64, alpha: f64, spec: &SpaceSpec) -> Result<OperatorMatrix> {
    if spec.n_atoms() != 1 {
        return Err(Error::InconsistentParams("the trapped-ion model is defined for one atom".into()));
    }
    let ops = FullOps::build(ModeKind::Canonical, spec)?;
    let at = &ops.atoms[0];
    let (x, p) = canonical_xp(spec);
    let x = embed(&x, 0, spec)?;
    let p = embed(&p, 0, spec)?;
    let hxp = &(&(&p * &p) + &(&x * &x)).scale_re(0.5) + &(&x * &p);
    let h = &(&at.z.scale_re(omega_a - omega_f) + &(&at.z * &at.z))
        + &(&(&ops.mode.minus * &at.plus) + &(&ops.mode.plus * &at.minus)).scale_re(alpha);
    Ok(&h + &hxp)
}

/// Excitation charge `s3 + Σ_j S^z_j`.
pub fn conserved_charge(kind: ModeKind, spec: &SpaceSpec) -> Result<OperatorMatrix> {
    Ok(FullOps::build(kind, spec)?.charge())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QReduction {
    QBS,
    QJC,
    QTI,
    General,
}

impl QReduction {
    pub fn mode_kind(self) -> Result<ModeKind> {
        match self {
            QReduction::QBS => Ok(ModeKind::QSu11),
            QReduction::QJC => Ok(ModeKind::QOscillator),
            QReduction::QTI => Ok(ModeKind::Canonical),
            QReduction::General => Err(Error::UnsupportedRealization(
                "the general deformed ancestor algebra is not specified".into(),
            )),
        }
    }

    fn undeformed_kind(self) -> Result<ModeKind> {
        match self {
            QReduction::QBS => Ok(ModeKind::Su11Boson),
            QReduction::QJC => Ok(ModeKind::Boson),
            other => other.mode_kind(),
        }
    }
}

/// Parameters of the deformed model `-i c0 cos(αX) + c sin(αX) + (s+S- + s-S+) sin α`.
#[derive(Clone, Debug, PartialEq)]
pub struct QMRParams {
    pub c0: C64,
    pub c: f64,
    pub alpha: f64,
    pub omega: f64,
    pub q: f64,
}

impl QMRParams {
    pub fn qbs(c: f64, alpha: f64, q: f64) -> Self {
        Self { c0: ZERO, c, alpha, omega: 0.0, q }
    }
    pub fn qjc(alpha: f64, q: f64) -> Self {
        Self { c0: C64::new(0.0, 1.0), c: 1.0, alpha, omega: 0.0, q }
    }
    pub fn qti(alpha: f64, q: f64) -> Self {
        Self { c0: C64::new(0.0, 1.0), c: 0.0, alpha, omega: 0.0, q }
    }

    pub fn for_reduction(reduction: QReduction, c: f64, alpha: f64, q: f64) -> Result<Self> {
        match reduction {
            QReduction::QBS => Ok(Self::qbs(c, alpha, q)),
            QReduction::QJC => Ok(Self::qjc(alpha, q)),
            QReduction::QTI => Ok(Self::qti(alpha, q)),
            QReduction::General => Err(Error::UnsupportedRealization(
                "the general deformed ancestor algebra is not specified".into(),
            )),
        }
    }
}

fn q_space_checks(qp: &QMRParams, spec: &SpaceSpec) -> Result<()> {
    if spec.n_atoms() != 1 {
        return Err(Error::InconsistentParams("deformed models are built for one atom".into()));
    }
    if qp.c0.re != 0.0 {
        return Err(Error::InconsistentParams("c0 must be purely imaginary or zero".into()));
    }
    Ok(())
}

fn assemble_q(qp: &QMRParams, mode: &Triple, atom: &Triple, spec: &SpaceSpec) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let s = Triple { plus: embed(&mode.plus, 0, spec)?, minus: embed(&mode.minus, 0, spec)?, z: embed(&mode.z, 0, spec)? };
    let a = Triple { plus: embed(&atom.plus, 1, spec)?, minus: embed(&atom.minus, 1, spec)?, z: embed(&atom.z, 1, spec)? };
    let ident = OperatorMatrix::identity(spec.factor_dims());
    let x = &(&s.z + &a.z) + &ident.scale_re(qp.omega);
    let hop = (&(&s.plus * &a.minus) + &(&s.minus * &a.plus)).scale_re(qp.alpha.sin());
    // X is diagonal unless the mode is canonical
    let hd = if x_is_diagonal(&x) {
        let vals: Vec<C64> = (0..x.dim())
            .map(|i| {
                let v = qp.alpha * x.get(i, i).re;
                -C64::new(0.0, 1.0) * qp.c0 * v.cos() + c(qp.c * v.sin())
            })
            .collect();
        OperatorMatrix::diagonal(&vals, spec.factor_dims())?
    } else {
        // X Hermitian: cos and sin through its eigenbasis
        let ax = x.scale_re(qp.alpha);
        let cosx = crate::linalg::hermitian_function(ax.data(), |v| c(v.cos()))?;
        let sinx = crate::linalg::hermitian_function(ax.data(), |v| c(v.sin()))?;
        let cosx = OperatorMatrix::on_space(cosx, spec)?;
        let sinx = OperatorMatrix::on_space(sinx, spec)?;
        &cosx.scale(-C64::new(0.0, 1.0) * qp.c0) + &sinx.scale_re(qp.c)
    };
    Ok((&hd + &hop, x))
}

fn x_is_diagonal(x: &OperatorMatrix) -> bool {
    let n = x.dim();
    (0..n).all(|i| (0..n).all(|j| i == j || x.get(i, j) == ZERO))
}

/// Deformed Hamiltonian and its conserved `X = s3 + S^z + ω`.
pub fn build_h_qmr_with_x(qp: &QMRParams, reduction: QReduction, spec: &SpaceSpec) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let kind = reduction.mode_kind()?;
    q_space_checks(qp, spec)?;
    match spec.deformation() {
        Some(q) if (q - qp.q).abs() <= 1e-15 * q => {}
        _ => return Err(Error::InvalidSpace(format!("space deformation must equal q = {}", qp.q))),
    }
    let mode = hilbert::mode_realization(kind, spec)?;
    let atom = hilbert::coproduct_spin_q(spec.two_s(), qp.q)?;
    assemble_q(qp, &mode, &atom, spec)
}

pub fn build_h_qmr(qp: &QMRParams, reduction: QReduction, spec: &SpaceSpec) -> Result<OperatorMatrix> {
    Ok(build_h_qmr_with_x(qp, reduction, spec)?.0)
}

/// The same Hamiltonian with every deformation switched off (`q = 1`),
/// laid out on the deformed space so the two can be subtracted.
pub fn build_h_qmr_undeformed(qp: &QMRParams, reduction: QReduction, spec: &SpaceSpec) -> Result<OperatorMatrix> {
    let kind = reduction.undeformed_kind()?;
    q_space_checks(qp, spec)?;
    let plain = SpaceSpec::new(spec.boson_cutoff(), spec.n_atoms(), spec.two_s())?;
    let mode = hilbert::mode_realization(kind, &plain)?;
    let atom = hilbert::coproduct_spin_q(spec.two_s(), 1.0)?;
    Ok(assemble_q(qp, &mode, &atom, spec)?.0)
}

/// Largest entry of `H_q - H_1` between states with at most `m_max`
/// pseudoparticles: the q -> 1 regression measure. Higher states carry
/// q-numbers `[n]_q` whose distance from `n` grows with `n`.
pub fn q_deformation_error(qp: &QMRParams, reduction: QReduction, spec: &SpaceSpec, m_max: usize) -> Result<f64> {
    let hq = build_h_qmr(qp, reduction, spec)?;
    let h1 = build_h_qmr_undeformed(qp, reduction, spec)?;
    let idx: Vec<usize> = spec
        .pseudoparticle_numbers()
        .iter()
        .enumerate()
        .filter(|(_, &m)| m <= m_max)
        .map(|(i, _)| i)
        .collect();
    let mut worst: f64 = 0.0;
    for &i in &idx {
        for &j in &idx {
            worst = worst.max((hq.get(i, j) - h1.get(i, j)).norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    BS,
    JC,
    Raw(ModeKind),
}

impl Family {
    pub fn kind(self) -> ModeKind {
        match self {
            Family::BS => ModeKind::Su11Boson,
            Family::JC => ModeKind::Boson,
            Family::Raw(k) => k,
        }
    }
}

/// A rational model together with its space and Hamiltonian.
#[derive(Clone, Debug)]
pub struct Model {
    pub family: Family,
    pub params: MRParams,
    pub spec: SpaceSpec,
    pub h: OperatorMatrix,
}

impl Model {
    pub fn new(family: Family, params: MRParams, spec: SpaceSpec) -> Result<Self> {
        let h = build_h_mr(&params, family.kind(), &spec)?;
        Ok(Self { family, params, spec, h })
    }

    pub fn bs(omega_f: f64, alpha: f64, delta: f64, spec: SpaceSpec) -> Result<Self> {
        let params = MRParams::bs(omega_f, alpha, delta, spec.n_atoms())?;
        Self::new(Family::BS, params, spec)
    }

    pub fn jc(omega_f: f64, alpha: f64, delta: f64, spec: SpaceSpec) -> Result<Self> {
        let params = MRParams::jc(omega_f, alpha, delta, spec.n_atoms())?;
        Self::new(Family::JC, params, spec)
    }

    pub fn kind(&self) -> ModeKind {
        self.family.kind()
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        Self::new(self.family, self.params.clone(), self.spec.with_cutoff(cutoff)?)
    }

    pub fn charge(&self) -> Result<OperatorMatrix> {
        conserved_charge(self.kind(), &self.spec)
    }

    /// `<0|H|0>` on the pseudovacuum (boson vacuum, all atoms down).
    pub fn vacuum_energy(&self) -> C64 {
        let down = self.spec.atom_dim() - 1;
        let i = self.spec.compose(0, &vec![down; self.spec.n_atoms()]);
        self.h.get(i, i)
    }
}
