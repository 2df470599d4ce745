//! Truncated operator representations: boson modes, su(1,1), canonical
//! pairs, q-oscillators, su(2) spins and the quantum-group coproduct spin,
//! plus tensor-product embedding.
//!
//! Full-space basis ordering is mode-major: index = n * atom_block + atom
//! index, with atom 1 the most significant atom factor. Within an atom of
//! spin s, index k carries S^z = s - k (index 0 is spin up).

use std::ops::{Add, Mul, Sub};

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec {
    boson_cutoff: usize,
    n_atoms: usize,
    two_s: usize,
    deformation: Option<f64>,
}

impl SpaceSpec {
    /// Fock states `|0>..|boson_cutoff>` and `n_atoms` atoms of spin `two_s / 2`.
    pub fn new(boson_cutoff: usize, n_atoms: usize, two_s: usize) -> Result<Self> {
        if boson_cutoff < 1 {
            return Err(Error::InvalidSpace("boson_cutoff must be at least 1".into()));
        }
        if two_s < 1 {
            return Err(Error::InvalidSpace("atomic spin must be positive".into()));
        }
        Ok(Self { boson_cutoff, n_atoms, two_s, deformation: None })
    }

    /// Deformed space: each atom of spin s is carried by 2s qubits on which
    /// the coproduct spin acts, so the atom factor has dimension 2^{2s}.
    pub fn with_deformation(mut self, q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) || q == 1.0 {
            return Err(Error::InvalidSpace(format!("deformation q = {q} must be real, positive and != 1")));
        }
        if self.two_s > 12 {
            return Err(Error::InvalidSpace("deformed atoms are limited to 2s <= 12 qubits".into()));
        }
        self.deformation = Some(q);
        Ok(self)
    }

    pub fn boson_cutoff(&self) -> usize {
        self.boson_cutoff
    }
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }
    pub fn two_s(&self) -> usize {
        self.two_s
    }
    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }
    pub fn deformation(&self) -> Option<f64> {
        self.deformation
    }

    pub fn with_cutoff(&self, boson_cutoff: usize) -> Result<Self> {
        let mut s = Self::new(boson_cutoff, self.n_atoms, self.two_s)?;
        s.deformation = self.deformation;
        Ok(s)
    }

    pub fn mode_dim(&self) -> usize {
        self.boson_cutoff + 1
    }

    pub fn atom_dim(&self) -> usize {
        match self.deformation {
            Some(_) => 1 << self.two_s,
            None => self.two_s + 1,
        }
    }

    pub fn atom_block(&self) -> usize {
        self.atom_dim().pow(self.n_atoms as u32)
    }

    pub fn dim(&self) -> usize {
        self.mode_dim() * self.atom_block()
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        let mut d = vec![self.mode_dim()];
        d.extend(std::iter::repeat(self.atom_dim()).take(self.n_atoms));
        d
    }

    /// Pseudoparticle content (number of raised spin units) of an atom
    /// factor basis state.
    pub fn atom_excitation(&self, k: usize) -> usize {
        match self.deformation {
            Some(_) => self.two_s - (k as u32).count_ones() as usize,
            None => self.two_s - k,
        }
    }

    /// Boson occupation and per-atom factor indices of a full-space index.
    pub fn decompose(&self, index: usize) -> (usize, Vec<usize>) {
        let block = self.atom_block();
        let n = index / block;
        let mut rest = index % block;
        let ad = self.atom_dim();
        let mut atoms = vec![0; self.n_atoms];
        for j in (0..self.n_atoms).rev() {
            atoms[j] = rest % ad;
            rest /= ad;
        }
        (n, atoms)
    }

    pub fn compose(&self, n: usize, atoms: &[usize]) -> usize {
        let ad = self.atom_dim();
        let a = atoms.iter().fold(0, |acc, &k| acc * ad + k);
        n * self.atom_block() + a
    }

    /// Eigenvalue M of the excitation charge for each full-space index.
    pub fn pseudoparticle_numbers(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                let (n, atoms) = self.decompose(i);
                n + atoms.iter().map(|&k| self.atom_excitation(k)).sum::<usize>()
            })
            .collect()
    }

    pub fn boson_levels(&self) -> Vec<usize> {
        (0..self.dim()).map(|i| i / self.atom_block()).collect()
    }
}

/// Dense complex matrix tagged with the tensor layout it acts on.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    data: Mat<C64>,
    dims: Vec<usize>,
}

impl OperatorMatrix {
    pub fn new(data: Mat<C64>, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch { expected: data.nrows(), got: data.ncols() });
        }
        if data.nrows() != total {
            return Err(Error::DimensionMismatch { expected: total, got: data.nrows() });
        }
        Ok(Self { data, dims })
    }

    pub fn on_space(data: Mat<C64>, spec: &SpaceSpec) -> Result<Self> {
        Self::new(data, spec.factor_dims())
    }

    fn single(data: Mat<C64>) -> Self {
        let n = data.nrows();
        Self { data, dims: vec![n] }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self { data: linalg::identity(n), dims }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self { data: Mat::zeros(n, n), dims }
    }

    pub fn diagonal(values: &[C64], dims: Vec<usize>) -> Result<Self> {
        let n = values.len();
        Self::new(Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO }), dims)
    }

    pub fn data(&self) -> MatRef<'_, C64> {
        self.data.as_ref()
    }
    pub fn into_inner(self) -> Mat<C64> {
        self.data
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn dagger(&self) -> Self {
        Self { data: self.data.adjoint().to_owned(), dims: self.dims.clone() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { data: linalg::scale(self.data.as_ref(), s), dims: self.dims.clone() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(self.data.as_ref())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.data[(i, i)]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::is_hermitian(self.data.as_ref(), tol)
    }

    /// Restriction to the rows and columns in `idx`.
    pub fn restricted(&self, idx: &[usize]) -> Mat<C64> {
        linalg::submatrix(self.data.as_ref(), idx, idx)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        linalg::matvec(self.data.as_ref(), v)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.dims, other.dims, "operator layouts differ");
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_same(rhs);
        OperatorMatrix { data: &self.data + &rhs.data, dims: self.dims.clone() }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_same(rhs);
        OperatorMatrix { data: &self.data - &rhs.data, dims: self.dims.clone() }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_same(rhs);
        OperatorMatrix { data: &self.data * &rhs.data, dims: self.dims.clone() }
    }
}

/// Realization of the mode algebra `[s+, s-] = 2 m+ s3 + m-`, `[s3, s±] = ±s±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeKind {
    /// Finite spin of size `boson_cutoff / 2` in ascending weight order.
    Su2,
    /// `s+ = sqrt(N) b†`, `s- = b sqrt(N)`, `s3 = N + 1/2`.
    Su11Boson,
    /// `s+ = b†`, `s- = b`, `s3 = N`.
    Boson,
    /// `s± = exp(±ix)`, `s3 = p + x`.
    Canonical,
    /// `s+ = b_q†`, `s- = b_q` with `b_q|n> = sqrt([n]_q)|n-1>`, `s3 = N`.
    QOscillator,
    /// `s+ = sqrt([N]_q) b_q†`, `s3 = N + 1/2`; `[s+, s-] = -[2 s3]_q`.
    QSu11,
    /// General trigonometric ancestor algebra; not constructible here.
    QGeneral,
}

impl ModeKind {
    /// `(m+, m-)` for the undeformed kinds.
    pub fn central_elements(self) -> Option<(f64, f64)> {
        match self {
            ModeKind::Su2 => Some((1.0, 0.0)),
            ModeKind::Su11Boson => Some((-1.0, 0.0)),
            ModeKind::Boson => Some((0.0, -1.0)),
            ModeKind::Canonical => Some((0.0, 0.0)),
            _ => None,
        }
    }

    pub fn is_deformed(self) -> bool {
        matches!(self, ModeKind::QOscillator | ModeKind::QSu11 | ModeKind::QGeneral)
    }

    /// Whether the Fock vacuum is a lowest-weight state (`s-|0> = 0`).
    pub fn has_fock_vacuum(self) -> bool {
        !matches!(self, ModeKind::Canonical | ModeKind::QGeneral)
    }

    /// Highest Fock level on which algebra identities are trusted.
    pub fn safe_level(self, cutoff: usize) -> usize {
        match self {
            ModeKind::Su2 => cutoff,
            ModeKind::Canonical => cutoff / 4,
            _ => cutoff.saturating_sub(1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeKind::Su2 => "su2",
            ModeKind::Su11Boson => "su11_boson",
            ModeKind::Boson => "boson",
            ModeKind::Canonical => "canonical",
            ModeKind::QOscillator => "q_oscillator",
            ModeKind::QSu11 => "q_su11",
            ModeKind::QGeneral => "q_general",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Triple {
    pub plus: OperatorMatrix,
    pub minus: OperatorMatrix,
    pub z: OperatorMatrix,
}

/// `[n]_q = (q^n - q^-n) / (q - q^-1)`; equals `n` at `q = 1`.
pub fn q_number(n: f64, q: f64) -> f64 {
    if q == 1.0 {
        return n;
    }
    let l = q.ln();
    (n * l).sinh() / l.sinh()
}

/// Annihilator, creator and number operator on `|0>..|cutoff>`.
pub fn boson_ops(spec: &SpaceSpec) -> (OperatorMatrix, OperatorMatrix, OperatorMatrix) {
    let d = spec.mode_dim();
    let b = Mat::from_fn(d, d, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { ZERO });
    let bd = b.adjoint().to_owned();
    let n = Mat::from_fn(d, d, |i, j| if i == j { c(i as f64) } else { ZERO });
    (OperatorMatrix::single(b), OperatorMatrix::single(bd), OperatorMatrix::single(n))
}

fn diag_fn(d: usize, f: impl Fn(usize) -> f64) -> Mat<C64> {
    Mat::from_fn(d, d, |i, j| if i == j { c(f(i)) } else { ZERO })
}

/// Mode triple on the single mode factor.
pub fn mode_realization(kind: ModeKind, spec: &SpaceSpec) -> Result<Triple> {
    let d = spec.mode_dim();
    let lower = |amp: &dyn Fn(usize) -> f64| Mat::from_fn(d, d, |i, j| if j == i + 1 { c(amp(j)) } else { ZERO });
    let need_q = || {
        spec.deformation
            .ok_or_else(|| Error::UnsupportedRealization(format!("{} needs a deformation parameter", kind.name())))
    };
    let (plus, minus, z) = match kind {
        ModeKind::Su2 => {
            let j = (d - 1) as f64 / 2.0;
            // index n carries weight m = -j + n
            let up = Mat::from_fn(d, d, |r, col| {
                if r == col + 1 {
                    let m = -j + col as f64;
                    c((j * (j + 1.0) - m * (m + 1.0)).sqrt())
                } else {
                    ZERO
                }
            });
            let dn = up.adjoint().to_owned();
            (up, dn, diag_fn(d, |n| -j + n as f64))
        }
        ModeKind::Su11Boson => {
            // s- = b sqrt(N): <n-1| s- |n> = n
            let sm = lower(&|n| n as f64);
            (sm.adjoint().to_owned(), sm, diag_fn(d, |n| n as f64 + 0.5))
        }
        ModeKind::Boson => {
            let b = lower(&|n| (n as f64).sqrt());
            (b.adjoint().to_owned(), b, diag_fn(d, |n| n as f64))
        }
        ModeKind::Canonical => {
            let (b, bd, _) = boson_ops(spec);
            let r2 = std::f64::consts::SQRT_2;
            let x = linalg::scale((&b.data + &bd.data).as_ref(), c(1.0 / r2));
            let p = linalg::scale((&b.data - &bd.data).as_ref(), C64::new(0.0, -1.0 / r2));
            let ep = linalg::hermitian_function(x.as_ref(), |v| C64::new(0.0, v).exp())?;
            let em = linalg::hermitian_function(x.as_ref(), |v| C64::new(0.0, -v).exp())?;
            (ep, em, &p + &x)
        }
        ModeKind::QOscillator => {
            let q = need_q()?;
            let bq = lower(&|n| q_number(n as f64, q).sqrt());
            (bq.adjoint().to_owned(), bq, diag_fn(d, |n| n as f64))
        }
        ModeKind::QSu11 => {
            let q = need_q()?;
            let sm = lower(&|n| q_number(n as f64, q));
            (sm.adjoint().to_owned(), sm, diag_fn(d, |n| n as f64 + 0.5))
        }
        ModeKind::QGeneral => {
            return Err(Error::UnsupportedRealization(
                "the general trigonometric ancestor algebra is not specified; use q_oscillator or q_su11".into(),
            ))
        }
    };
    Ok(Triple {
        plus: OperatorMatrix::single(plus),
        minus: OperatorMatrix::single(minus),
        z: OperatorMatrix::single(z),
    })
}

/// Largest violation of the defining relations of `kind` on Fock levels
/// `0..=n_safe` (rows and columns restricted).
pub fn mode_algebra_residual(kind: ModeKind, t: &Triple, q: Option<f64>, n_safe: usize) -> f64 {
    let d = t.z.dim();
    let idx: Vec<usize> = (0..=n_safe.min(d - 1)).collect();
    let block = |m: &OperatorMatrix| linalg::max_abs(m.restricted(&idx).as_ref());
    let raise = &t.z.commutator(&t.plus) - &t.plus;
    let lower = &t.z.commutator(&t.minus) + &t.minus;
    let mut res = block(&raise).max(block(&lower));
    let pm = &t.plus * &t.minus;
    let mp = &t.minus * &t.plus;
    let z_diag: Vec<f64> = (0..d).map(|i| t.z.get(i, i).re).collect();
    let dims = t.z.dims().to_vec();
    match (kind.central_elements(), kind, q) {
        (Some((mp_, mm_)), _, _) => {
            let rhs = &t.z.scale_re(2.0 * mp_) + &OperatorMatrix::identity(dims).scale_re(mm_);
            res = res.max(block(&(&(&pm - &mp) - &rhs)));
        }
        (None, ModeKind::QOscillator, Some(q)) => {
            let nq: Vec<C64> = z_diag.iter().map(|&n| c(q_number(n, q))).collect();
            let nq1: Vec<C64> = z_diag.iter().map(|&n| c(q_number(n + 1.0, q))).collect();
            let a = OperatorMatrix::diagonal(&nq, dims.clone()).expect("diag");
            let b = OperatorMatrix::diagonal(&nq1, dims).expect("diag");
            res = res.max(block(&(&pm - &a))).max(block(&(&mp - &b)));
        }
        (None, ModeKind::QSu11, Some(q)) => {
            let v: Vec<C64> = z_diag.iter().map(|&s3| c(q_number(2.0 * s3, q))).collect();
            let rhs = OperatorMatrix::diagonal(&v, dims).expect("diag");
            res = res.max(block(&(&(&pm - &mp) + &rhs)));
        }
        _ => return f64::INFINITY,
    }
    res
}

/// Standard spin-s matrices of dimension 2s+1; index k carries S^z = s - k.
pub fn spin_ops(two_s: usize) -> Result<Triple> {
    if two_s < 1 {
        return Err(Error::InvalidSpace("spin must be positive".into()));
    }
    let s = two_s as f64 / 2.0;
    let d = two_s + 1;
    let up = Mat::from_fn(d, d, |i, j| {
        if j == i + 1 {
            let m = s - j as f64;
            c((s * (s + 1.0) - m * (m + 1.0)).sqrt())
        } else {
            ZERO
        }
    });
    Ok(Triple {
        minus: OperatorMatrix::single(up.adjoint().to_owned()),
        plus: OperatorMatrix::single(up),
        z: OperatorMatrix::single(diag_fn(d, |k| s - k as f64)),
    })
}

/// Quantum-group generators on `n_sites` qubits:
/// `S±_q = Σ_j q^{-Σ_{k<j} σz_k} σ±_j q^{Σ_{l>j} σz_l}` and `S_z = ½ Σ σz`.
/// Site 0 is the most significant qubit; bit value 0 is spin up.
pub fn coproduct_spin_q(n_sites: usize, q: f64) -> Result<Triple> {
    if n_sites < 1 || n_sites > 16 {
        return Err(Error::InvalidSpace("coproduct spin needs 1..=16 sites".into()));
    }
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidSpace(format!("q = {q} must be positive")));
    }
    let d = 1usize << n_sites;
    let sigma = |state: usize, site: usize| -> f64 {
        if state >> (n_sites - 1 - site) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let mut plus = Mat::<C64>::zeros(d, d);
    for state in 0..d {
        for j in 0..n_sites {
            let bit = 1 << (n_sites - 1 - j);
            if state & bit == 0 {
                continue; // site j already up
            }
            let target = state & !bit;
            let left: f64 = (0..j).map(|k| sigma(state, k)).sum();
            let right: f64 = (j + 1..n_sites).map(|l| sigma(state, l)).sum();
            plus[(target, state)] += c(q.powf(right - left));
        }
    }
    let z = diag_fn(d, |st| 0.5 * (0..n_sites).map(|k| sigma(st, k)).sum::<f64>());
    Ok(Triple {
        minus: OperatorMatrix::single(plus.transpose().to_owned()),
        plus: OperatorMatrix::single(plus),
        z: OperatorMatrix::single(z),
    })
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` in factor `slot` (slot 0 is the mode).
pub fn embed(op: &OperatorMatrix, slot: usize, spec: &SpaceSpec) -> Result<OperatorMatrix> {
    let dims = spec.factor_dims();
    if slot >= dims.len() {
        return Err(Error::SlotOutOfRange { slot, factors: dims.len() });
    }
    if op.dim() != dims[slot] {
        return Err(Error::DimensionMismatch { expected: dims[slot], got: op.dim() });
    }
    let before: usize = dims[..slot].iter().product();
    let after: usize = dims[slot + 1..].iter().product();
    let left = linalg::kron(linalg::identity(before).as_ref(), op.data());
    let full = linalg::kron(left.as_ref(), linalg::identity(after).as_ref());
    OperatorMatrix::new(full, dims)
}

/// Mode and atom operators embedded in the full space.
#[derive(Clone, Debug)]
pub struct FullOps {
    pub spec: SpaceSpec,
    pub kind: ModeKind,
    pub mode: Triple,
    pub atoms: Vec<Triple>,
    pub identity: OperatorMatrix,
}

impl FullOps {
    pub fn build(kind: ModeKind, spec: &SpaceSpec) -> Result<Self> {
        let local = mode_realization(kind, spec)?;
        let emb = |t: &Triple, slot| -> Result<Triple> {
            Ok(Triple {
                plus: embed(&t.plus, slot, spec)?,
                minus: embed(&t.minus, slot, spec)?,
                z: embed(&t.z, slot, spec)?,
            })
        };
        let mode = emb(&local, 0)?;
        let atom_local = match spec.deformation {
            Some(q) => coproduct_spin_q(spec.two_s, q)?,
            None => spin_ops(spec.two_s)?,
        };
        let atoms = (1..=spec.n_atoms)
            .map(|slot| emb(&atom_local, slot))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec: spec.clone(),
            kind,
            mode,
            atoms,
            identity: OperatorMatrix::identity(spec.factor_dims()),
        })
    }

    /// `s3 + Σ_j S^z_j`
    pub fn charge(&self) -> OperatorMatrix {
        self.atoms.iter().fold(self.mode.z.clone(), |acc, a| &acc + &a.z)
    }

    pub fn total_spin(&self) -> Triple {
        let zero = OperatorMatrix::zeros(self.spec.factor_dims());
        let mut t = Triple { plus: zero.clone(), minus: zero.clone(), z: zero };
        for a in &self.atoms {
            t.plus = &t.plus + &a.plus;
            t.minus = &t.minus + &a.minus;
            t.z = &t.z + &a.z;
        }
        t
    }

    /// Full-space indices whose boson occupation is at most `level`.
    pub fn safe_indices(&self, level: usize) -> Vec<usize> {
        let block = self.spec.atom_block();
        (0..self.spec.dim()).filter(|i| i / block <= level).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn spec(cut: usize) -> SpaceSpec {
        SpaceSpec::new(cut, 0, 1).unwrap()
    }

    #[test]
    fn smallest_fock_space() {
        let (b, _, n) = boson_ops(&spec(1));
        assert_eq!(b.get(0, 1), ONE);
        assert_eq!(b.get(1, 0), ZERO);
        assert_eq!(n.get(1, 1), ONE);
    }

    #[test]
    fn truncated_commutator_edge_identity() {
        let s = spec(6);
        let (b, bd, _) = boson_ops(&s);
        let comm = b.commutator(&bd);
        for i in 0..6 {
            assert!((comm.get(i, i) - ONE).norm() < 1e-14);
        }
        assert!((comm.get(6, 6) - c(-6.0)).norm() < 1e-14);
    }

    #[test]
    fn lowering_matrix_element() {
        let (b, _, _) = boson_ops(&spec(40));
        assert!((b.get(4, 5).re - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn su11_and_boson_relations() {
        let s = spec(30);
        let t = mode_realization(ModeKind::Su11Boson, &s).unwrap();
        assert!(mode_algebra_residual(ModeKind::Su11Boson, &t, None, 15) < 1e-10);
        let t = mode_realization(ModeKind::Boson, &s).unwrap();
        assert!(mode_algebra_residual(ModeKind::Boson, &t, None, 29) < 1e-12);
        let t = mode_realization(ModeKind::Su2, &s).unwrap();
        assert!(mode_algebra_residual(ModeKind::Su2, &t, None, 30) < 1e-12);
    }

    #[test]
    fn q_oscillator_number_relation() {
        let q = 1.2;
        let s = spec(12).with_deformation(q).unwrap();
        let t = mode_realization(ModeKind::QOscillator, &s).unwrap();
        let pm = &t.plus * &t.minus;
        for n in 0..=12 {
            assert!((pm.get(n, n).re - q_number(n as f64, q)).abs() < 1e-12);
        }
        assert!(mode_algebra_residual(ModeKind::QOscillator, &t, Some(q), 11) < 1e-12);
        let t = mode_realization(ModeKind::QSu11, &s).unwrap();
        assert!(mode_algebra_residual(ModeKind::QSu11, &t, Some(q), 11) < 1e-11);
    }

    #[test]
    fn canonical_exponentials_are_unitary_pair() {
        let s = spec(24);
        let t = mode_realization(ModeKind::Canonical, &s).unwrap();
        let d = &t.plus.dagger() - &t.minus;
        assert!(d.max_abs() < 1e-12);
        assert!(mode_algebra_residual(ModeKind::Canonical, &t, None, 6) < 1e-10);
    }

    #[test]
    fn q_kinds_need_deformation() {
        assert!(mode_realization(ModeKind::QOscillator, &spec(4)).is_err());
        let s = spec(4).with_deformation(1.1).unwrap();
        assert!(matches!(mode_realization(ModeKind::QGeneral, &s), Err(Error::UnsupportedRealization(_))));
    }

    #[test]
    fn spin_matrices() {
        let t = spin_ops(1).unwrap();
        assert_eq!(t.z.get(0, 0), c(0.5));
        assert_eq!(t.plus.get(0, 1), ONE);
        let t = spin_ops(2).unwrap();
        assert!((t.plus.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        let t = spin_ops(3).unwrap();
        let cas = &(&(&t.z * &t.z) + &(&t.plus * &t.minus).scale_re(0.5)) + &(&t.minus * &t.plus).scale_re(0.5);
        let want = OperatorMatrix::identity(vec![4]).scale_re(3.75);
        assert!((&cas - &want).max_abs() < 1e-13);
    }

    #[test]
    fn coproduct_single_site_and_classical_limit() {
        let t = coproduct_spin_q(1, 1.7).unwrap();
        assert_eq!(t.plus.get(0, 1), ONE);
        let t = coproduct_spin_q(3, 1.0).unwrap();
        let s = SpaceSpec::new(1, 3, 1).unwrap();
        let mut sum = OperatorMatrix::zeros(vec![8]);
        let sp = spin_ops(1).unwrap();
        for slot in 1..=3 {
            let e = embed(&sp.plus, slot, &s).unwrap();
            let block = linalg::submatrix(e.data(), &(0..8).collect::<Vec<_>>(), &(0..8).collect::<Vec<_>>());
            sum = &sum + &OperatorMatrix::new(block, vec![8]).unwrap();
        }
        assert!((&t.plus - &sum).max_abs() < 1e-15);
    }

    #[test]
    fn embed_errors_and_trace() {
        let s = SpaceSpec::new(3, 2, 1).unwrap();
        let sp = spin_ops(1).unwrap();
        assert!(matches!(embed(&sp.plus, 3, &s), Err(Error::SlotOutOfRange { .. })));
        assert!(matches!(embed(&sp.plus, 0, &s), Err(Error::DimensionMismatch { .. })));
        let e = embed(&sp.z, 2, &s).unwrap();
        assert!(e.trace().norm() < 1e-15);
        let (_, _, n) = boson_ops(&s);
        let e = embed(&n, 0, &s).unwrap();
        assert!((e.trace() - c(6.0 * 4.0)).norm() < 1e-12);
    }

    #[test]
    fn index_bookkeeping() {
        let s = SpaceSpec::new(4, 2, 1).unwrap();
        let m = s.pseudoparticle_numbers();
        assert_eq!(m[s.compose(0, &[1, 1])], 0);
        assert_eq!(m[s.compose(1, &[1, 1])], 1);
        assert_eq!(m[s.compose(0, &[0, 1])], 1);
        assert_eq!(m[s.compose(2, &[0, 0])], 4);
        assert_eq!(s.decompose(s.compose(3, &[0, 1])), (3, vec![0, 1]));
    }
}
