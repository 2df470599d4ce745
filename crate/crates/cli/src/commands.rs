//! The six subcommands. Each returns its tables and run record; writing
//! them is left to the caller.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrint::bethe::{self, degeneracy_check, eigenvalue_lambda, BetheSolution, EnergyMap, SolveOptions};
use mrint::dynamics::{evolve, photon_state, product_state, rabi_spectrum, time_grid, vrs_scan, RabiClass};
use mrint::lax::{check_ybe, pure_ybe_residual, vacuum_for, Chain, RKind, RMatrix};
use mrint::linalg::eig;
use mrint::models::{build_h_qmr, Family, MRParams, Model, QMRParams, QReduction};
use mrint::oracle::{compare_bethe_vs_exact, diag_sector, kappa0, sector_basis, SectorBasis, SpectrumReport, Tolerances};
use mrint::{ModeKind, OperatorMatrix, SpaceSpec, C64};

use crate::config::{ModelName, RunConfig};
use crate::error::CliError;
use crate::record::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Bethe,
    Rabi,
    Verify,
    Sweep,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Bethe => "bethe",
            Command::Rabi => "rabi",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Compare => "compare",
        }
    }
}

/// Tables and record of one run. `failure` is set when the run completed
/// but a numerical check did not pass.
#[derive(Clone, Debug)]
pub struct Output {
    /// `(file stem, csv text)`; the first table is the primary one.
    pub tables: Vec<(String, String)>,
    pub record: RunRecord,
    pub summary: Vec<String>,
    pub failure: Option<String>,
}

/// The configured Hamiltonian with whatever structure the model supports.
pub struct System {
    pub h: OperatorMatrix,
    pub spec: SpaceSpec,
    /// Rational model (absent for the deformed ones).
    pub model: Option<Model>,
    pub sectors: bool,
    pub bethe: bool,
}

fn kind_by_name(name: &str) -> Result<ModeKind, CliError> {
    [ModeKind::Su2, ModeKind::Su11Boson, ModeKind::Boson, ModeKind::Canonical]
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| CliError::Config(format!("unknown realization '{name}' (su2, su11_boson, boson, canonical)")))
}

fn infer_kind(p: &MRParams) -> Result<ModeKind, CliError> {
    [ModeKind::Su11Boson, ModeKind::Boson, ModeKind::Canonical, ModeKind::Su2]
        .into_iter()
        .find(|&k| p.check_kind(k).is_ok())
        .ok_or_else(|| {
            let (a, b) = p.central_elements();
            CliError::Config(format!("central elements ({a}, {b}) match no realization"))
        })
}

fn atom_frequencies(cfg: &RunConfig) -> Vec<f64> {
    let m = &cfg.model;
    match (&m.omega_a, m.delta) {
        (Some(wa), _) => wa.clone(),
        (None, Some(d)) => vec![m.omega_f - d; m.n_atoms],
        (None, None) => Vec::new(),
    }
}

fn raw_params(cfg: &RunConfig) -> Result<(MRParams, ModeKind, bool), CliError> {
    let raw = cfg.model.raw.as_ref().ok_or_else(|| CliError::Config("raw-mr needs [model.raw]".into()))?;
    if raw.inhomogeneities.len() != cfg.model.n_atoms {
        return Err(CliError::Config(format!(
            "raw.inhomogeneities has {} entries for n_atoms = {}",
            raw.inhomogeneities.len(),
            cfg.model.n_atoms
        )));
    }
    let p = MRParams::raw(raw.c10, raw.c20, raw.c11, raw.c21, cfg.model.alpha, raw.inhomogeneities.clone());
    match &raw.realization {
        Some(name) => Ok((p, kind_by_name(name)?, true)),
        None => Ok((p.clone(), infer_kind(&p)?, false)),
    }
}

fn rational_params(cfg: &RunConfig) -> Result<(MRParams, Family), CliError> {
    let m = &cfg.model;
    let wa = atom_frequencies(cfg);
    Ok(match m.name {
        ModelName::Bs => (MRParams::bs_with_atoms(m.omega_f, m.alpha, &wa)?, Family::BS),
        ModelName::Jc => (MRParams::jc_with_atoms(m.omega_f, m.alpha, &wa)?, Family::JC),
        ModelName::Ti => (MRParams::ti(m.omega_f, wa[0], m.alpha)?, Family::Raw(ModeKind::Canonical)),
        ModelName::RawMr => {
            let (p, k, _) = raw_params(cfg)?;
            (p, Family::Raw(k))
        }
        _ => return Err(CliError::Config(format!("{:?} is not a rational model", m.name))),
    })
}

fn reduction(name: ModelName) -> QReduction {
    match name {
        ModelName::Qbs => QReduction::QBS,
        ModelName::Qjc => QReduction::QJC,
        _ => QReduction::QTI,
    }
}

pub fn build_system(cfg: &RunConfig) -> Result<System, CliError> {
    cfg.validate()?;
    let two_s = cfg.two_s()?;
    let spec = SpaceSpec::new(cfg.space.cutoff, cfg.model.n_atoms, two_s)?;
    if cfg.model.name.is_deformed() {
        let q = cfg.model.q.unwrap_or(1.0);
        let red = reduction(cfg.model.name);
        let spec = spec.with_deformation(q)?;
        let qp = QMRParams::for_reduction(red, cfg.model.c, cfg.model.alpha, q)?;
        let h = build_h_qmr(&qp, red, &spec)?;
        let sectors = red.mode_kind()?.has_fock_vacuum();
        return Ok(System { h, spec, model: None, sectors, bethe: false });
    }
    let (params, family) = rational_params(cfg)?;
    let model = Model::new(family, params, spec.clone())?;
    let kind = model.kind();
    let sectors = kind.has_fock_vacuum();
    Ok(System { h: model.h.clone(), spec, sectors, bethe: sectors, model: Some(model) })
}

fn opts(cfg: &RunConfig) -> SolveOptions {
    SolveOptions { seed: cfg.run.seed, ..SolveOptions::default() }
}

fn shift_of(sys: &System) -> C64 {
    match (&sys.model, sys.bethe) {
        (Some(m), true) => kappa0(m),
        _ => C64::new(0.0, 0.0),
    }
}

fn sector_record(m: Option<usize>, report: &SpectrumReport, shift: C64) -> SectorRecord {
    SectorRecord {
        m,
        dim: report.eigenvalues.len(),
        shift: cplx(shift),
        eigenvalues: report.eigenvalues.iter().map(|&z| cplx(z)).collect(),
        hermitian: report.hermitian,
        defective: report.defective,
        bethe: Vec::new(),
        comparison: None,
    }
}

/// Whole truncated space as one block, for models without sectors.
fn full_basis(spec: &SpaceSpec) -> SectorBasis {
    SectorBasis {
        m: usize::MAX,
        states: (0..spec.dim())
            .map(|i| {
                let (n, atoms) = spec.decompose(i);
                (n, atoms.iter().map(|&a| spec.spin() - a as f64).collect())
            })
            .collect(),
        indices: (0..spec.dim()).collect(),
    }
}

fn bethe_solutions(model: &Model, m: usize, cfg: &RunConfig) -> Result<(Vec<BetheSolution>, usize), CliError> {
    let two_s = model.spec.two_s();
    let vac = vacuum_for(&model.params, model.kind(), two_s)?;
    let emap = EnergyMap::for_model(&model.params, model.kind(), two_s, &vac)?;
    if m == 1 {
        let s = bethe::solve_m1(&vac, Some(&emap))?;
        let n = s.len();
        return Ok((s, n));
    }
    let rep = bethe::solve_m_general(&vac, m, Some(&emap), &opts(cfg))?;
    Ok((rep.solutions, rep.starts_tried))
}

fn bethe_record(sol: &BetheSolution, c: f64, checks: Vec<LambdaCheck>) -> BetheRecord {
    BetheRecord {
        roots: sol.roots.iter().map(|&z| cplx(z)).collect(),
        roots_shifted: sol.roots.iter().map(|&z| cplx(z + c)).collect(),
        residuals: sol.residuals.iter().map(|z| finite(z.norm())).collect(),
        energy: cplx(sol.energy),
        remainder: sol.remainder,
        degenerate: sol.degenerate,
        lambda_checks: checks,
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = build_system(cfg)?;
    let mut record = RunRecord::new("spectrum", cfg);
    let mut rows = Vec::new();
    let shift = shift_of(&sys);
    if !sys.sectors {
        let report = diag_sector(&sys.h, &full_basis(&sys.spec), None)?;
        for (i, e) in report.eigenvalues.iter().enumerate() {
            rows.push(SpectrumRow { sector_m: None, index: i, energy_re: e.re, energy_im: e.im, source: "oracle".into(), abs_diff: None });
        }
        record.sectors.push(sector_record(None, &report, shift));
    }
    for &m in if sys.sectors { &cfg.space.sectors[..] } else { &[] } {
        if let (Some(model), true, true) = (&sys.model, sys.bethe, m > 0) {
            let cmp = compare_bethe_vs_exact(model, m, &Tolerances::default(), &opts(cfg))?;
            let mut diff_of_bethe = vec![None; cmp.bethe.len()];
            for lm in &cmp.report.comparison {
                if let Some(j) = lm.bethe_index {
                    diff_of_bethe[j] = finite(lm.abs_diff);
                }
            }
            for (i, lm) in cmp.report.comparison.iter().enumerate() {
                let e = cmp.report.eigenvalues[i];
                let d = lm.bethe_index.and_then(|_| finite(lm.abs_diff));
                rows.push(SpectrumRow { sector_m: Some(m), index: i, energy_re: e.re, energy_im: e.im, source: "oracle".into(), abs_diff: d });
            }
            for (j, s) in cmp.bethe.iter().enumerate() {
                rows.push(SpectrumRow {
                    sector_m: Some(m),
                    index: j,
                    energy_re: s.energy.re,
                    energy_im: s.energy.im,
                    source: "bethe".into(),
                    abs_diff: diff_of_bethe[j],
                });
            }
            if cmp.bethe.len() < cmp.report.eigenvalues.len() {
                record.warnings.push(format!(
                    "sector M = {m}: {} of {} levels reached by Bethe roots",
                    cmp.bethe.len(),
                    cmp.report.eigenvalues.len()
                ));
            }
            let mut sr = sector_record(Some(m), &cmp.report, shift);
            sr.comparison = Some(comparison_record(&cmp));
            record.sectors.push(sr);
        } else {
            let report = diag_sector(&sys.h, &sector_basis(&sys.spec, m)?, Some(shift))?;
            for (i, e) in report.eigenvalues.iter().enumerate() {
                rows.push(SpectrumRow { sector_m: Some(m), index: i, energy_re: e.re, energy_im: e.im, source: "oracle".into(), abs_diff: None });
            }
            record.sectors.push(sector_record(Some(m), &report, shift));
        }
    }
    let summary = record
        .sectors
        .iter()
        .map(|s| format!("sector {}: {} levels", s.m.map_or("all".into(), |m| m.to_string()), s.dim))
        .collect();
    Ok(Output { tables: vec![("spectrum".into(), to_csv(&rows, SPECTRUM_HEADER)?)], record, summary, failure: None })
}

fn comparison_record(cmp: &mrint::oracle::Comparison) -> ComparisonRecord {
    ComparisonRecord {
        passed: cmp.passed(),
        max_abs_diff: finite(cmp.report.max_abs_diff()),
        cutoff_shift: finite(cmp.cutoff_shift),
        unmatched_oracle: cmp.report.unmatched_oracle().into_iter().map(cplx).collect(),
    }
}

fn rational_model<'a>(sys: &'a System, what: &str) -> Result<&'a Model, CliError> {
    match (&sys.model, sys.bethe) {
        (Some(m), true) => Ok(m),
        _ => Err(CliError::Config(format!("{what} needs a rational model with a Fock vacuum (bs, jc or raw-mr)"))),
    }
}

pub fn bethe_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = build_system(cfg)?;
    let model = rational_model(&sys, "the Bethe solver")?;
    let mut record = RunRecord::new("bethe", cfg);
    let two_s = model.spec.two_s();
    let vac = vacuum_for(&model.params, model.kind(), two_s)?;
    record.degeneracy_certificates = degeneracy_check(&vac, 1e-10)?
        .into_iter()
        .map(|z| Certificate { lambda: cplx(z.lambda), alpha_residual: z.alpha_residual, beta_residual: z.beta_residual })
        .collect();
    let chain = Chain::new(&model.params, model.kind(), &model.spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let shift = kappa0(model);
    let c = model.params.c11;
    let mut rows = Vec::new();
    for &m in &cfg.space.sectors {
        let basis = sector_basis(&model.spec, m)?;
        let report = diag_sector(&model.h, &basis, Some(shift))?;
        let mut sr = sector_record(Some(m), &report, shift);
        if m == 0 {
            record.sectors.push(sr);
            continue;
        }
        let (sols, _) = bethe_solutions(model, m, cfg)?;
        let points: Vec<C64> = (0..3).map(|_| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0))).collect();
        let taus: Vec<Vec<C64>> = points
            .iter()
            .map(|&l| eig(chain.transfer(l).restricted(&basis.indices).as_ref()).map(|r| r.0))
            .collect::<Result<_, _>>()?;
        for (k, sol) in sols.iter().enumerate() {
            let mut checks = Vec::new();
            for (&l, tau) in points.iter().zip(&taus) {
                let v = eigenvalue_lambda(l, sol, &vac, RKind::Rational, 1.0)?;
                let d = tau.iter().map(|t| (t - v).norm()).fold(f64::INFINITY, f64::min);
                checks.push(LambdaCheck { lambda: cplx(l), value: cplx(v), tau_distance: d });
            }
            for (a, r) in sol.roots.iter().enumerate() {
                rows.push(RootRow {
                    sector_m: m,
                    solution: k,
                    root: a,
                    root_re: r.re,
                    root_im: r.im,
                    shifted_re: r.re + c,
                    shifted_im: r.im,
                    residual: finite(sol.residuals.get(a).map_or(f64::NAN, |z| z.norm())),
                    energy_re: sol.energy.re,
                    energy_im: sol.energy.im,
                    degenerate: sol.degenerate,
                });
            }
            sr.bethe.push(bethe_record(sol, c, checks));
        }
        if sols.len() < basis.dim() {
            record.warnings.push(format!(
                "sector M = {m}: solver budget ({} starts) found {} of {} Bethe states",
                opts(cfg).starts,
                sols.len(),
                basis.dim()
            ));
        }
        record.sectors.push(sr);
    }
    let summary = record
        .sectors
        .iter()
        .map(|s| format!("sector {}: {} Bethe solutions, {} levels", s.m.unwrap_or(0), s.bethe.len(), s.dim))
        .collect();
    Ok(Output { tables: vec![("bethe".into(), to_csv(&rows, ROOT_HEADER)?)], record, summary, failure: None })
}

pub fn rabi(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = build_system(cfg)?;
    if !sys.sectors {
        return Err(CliError::Config("Rabi dynamics needs conserved sectors".into()));
    }
    let r = &cfg.rabi;
    if r.photons >= sys.spec.boson_cutoff() {
        return Err(CliError::Config(format!("photons = {} must be below the cutoff", r.photons)));
    }
    let psi0 = match &r.atoms {
        Some(a) => {
            if a.len() != sys.spec.n_atoms() || a.iter().any(|&k| k >= sys.spec.atom_dim()) {
                return Err(CliError::Config("rabi.atoms must list one valid factor index per atom".into()));
            }
            product_state(&sys.spec, r.photons, a)
        }
        None => photon_state(&sys.spec, r.photons),
    };
    let res = evolve(&sys.h, &sys.spec, &psi0, &[], &time_grid(r.t_max, r.points))?;
    let rs = rabi_spectrum(&res, 0)?;
    let rows: Vec<RabiRow> = res
        .t_grid
        .iter()
        .zip(&res.probabilities[0])
        .zip(&res.norms)
        .map(|((&t, &p), &n)| RabiRow { t, probability: p, norm: n })
        .collect();
    let peaks: Vec<PeakRecord> = rs.peaks.iter().map(|p| PeakRecord { frequency: p.frequency, weight: p.weight }).collect();
    let mut record = RunRecord::new("rabi", cfg);
    let drift = res.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    record.rabi = Some(RabiRecord {
        classification: rs.classification.label(),
        frequencies: match rs.classification {
            RabiClass::Frequencies(n) => Some(n),
            RabiClass::Irregular => None,
        },
        method: format!("{:?}", res.method),
        resolution: rs.resolution,
        peaks: peaks.clone(),
        weight_sum: cplx(rs.weight_sum),
        max_norm_drift: drift,
        sector_energies: res.spectrum.eigenvalues.iter().map(|&z| cplx(z)).collect(),
    });
    let summary = vec![format!("rabi: {} ({} peaks, {:?})", rs.classification.label(), peaks.len(), res.method)];
    Ok(Output {
        tables: vec![("rabi".into(), to_csv(&rows, RABI_HEADER)?), ("rabi_peaks".into(), to_csv(&peaks, PEAK_HEADER)?)],
        record,
        summary,
        failure: None,
    })
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    if cfg.model.name.is_deformed() {
        return Err(CliError::Config("verify checks rational realizations; deformed models are covered by their own tests".into()));
    }
    let spec = SpaceSpec::new(cfg.space.cutoff, cfg.model.n_atoms, cfg.two_s()?)?;
    // an explicit raw realization skips the consistency check, so broken
    // parameters show up as RTT failures instead of config errors
    let chain = if cfg.model.name == ModelName::RawMr {
        let (p, k, explicit) = raw_params(cfg)?;
        if explicit { Chain::new_unchecked(&p, k, &spec)? } else { Chain::new(&p, k, &spec)? }
    } else {
        let (p, family) = rational_params(cfg)?;
        Chain::new(&p, family.kind(), &spec)?
    };
    let tol = cfg.verify.tolerance;
    let r = RMatrix::rational();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let mut points = vec![(C64::new(0.3, 0.2), C64::new(0.3, 0.2))];
    while points.len() < cfg.verify.draws + 1 {
        let l = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
        let m = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
        if (l - m - 1.0).norm() > 0.1 && (l - m + 1.0).norm() > 0.1 {
            points.push((l, m));
        }
    }
    let mut rows = Vec::new();
    let mut record = RunRecord::new("verify", cfg);
    for (i, &(l, m)) in points.iter().enumerate() {
        let rep = check_ybe(&chain, l, m)?;
        let pure = pure_ybe_residual(&r, l, m);
        let pass = rep.rtt < tol && rep.tau_commutator < tol && pure < tol;
        rows.push(VerifyRow {
            draw: i,
            lambda_re: l.re,
            lambda_im: l.im,
            mu_re: m.re,
            mu_im: m.im,
            pure_ybe: pure,
            rtt: rep.rtt,
            tau_commutator: rep.tau_commutator,
            pass,
        });
        record.ybe.push(YbeRow { draw: i, lambda: cplx(l), mu: cplx(m), pure_ybe: pure, rtt: rep.rtt, tau_commutator: rep.tau_commutator, pass });
    }
    let worst = rows.iter().map(|r| r.rtt.max(r.tau_commutator)).fold(0.0, f64::max);
    let failed = rows.iter().filter(|r| !r.pass).count();
    let failure = (failed > 0).then(|| format!("{failed} of {} draws exceed {tol:e} (worst {worst:.3e})", rows.len()));
    let summary = vec![format!("verify: {} draws, worst residual {worst:.3e}, {}", rows.len(), if failed == 0 { "pass" } else { "FAIL" })];
    Ok(Output { tables: vec![("verify".into(), to_csv(&rows, VERIFY_HEADER)?)], record, summary, failure })
}

pub fn sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    if cfg.model.name != ModelName::Bs {
        return Err(CliError::Config("sweep scans the Buck-Sukumar single-excitation sector; use model bs".into()));
    }
    let s = &cfg.sweep;
    let deltas: Vec<f64> = if s.steps == 1 {
        vec![s.delta_min]
    } else {
        (0..s.steps).map(|i| s.delta_min + (s.delta_max - s.delta_min) * i as f64 / (s.steps - 1) as f64).collect()
    };
    let scan = vrs_scan(cfg.model.omega_f, cfg.model.alpha, &deltas, cfg.model.n_atoms)?;
    let mut rows = Vec::new();
    for row in &scan.rows {
        for (k, e) in row.energies.iter().enumerate() {
            rows.push(SweepRow {
                delta: row.delta,
                level: k,
                energy_re: e.re,
                energy_im: e.im,
                discriminant: row.discriminant,
                discontinuous: row.discontinuous,
            });
        }
    }
    let mut record = RunRecord::new("sweep", cfg);
    record.sweep = Some(SweepRecord {
        deltas,
        exceptional: scan.exceptional.clone(),
        discontinuous: scan.rows.iter().filter(|r| r.discontinuous).map(|r| r.delta).collect(),
    });
    let summary = vec![format!("sweep: exceptional detunings {:?}", scan.exceptional)];
    Ok(Output { tables: vec![("sweep".into(), to_csv(&rows, SWEEP_HEADER)?)], record, summary, failure: None })
}

pub fn compare(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = build_system(cfg)?;
    let model = rational_model(&sys, "the Bethe comparison")?;
    let mut record = RunRecord::new("compare", cfg);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let shift = kappa0(model);
    for &m in &cfg.space.sectors {
        if m == 0 {
            continue;
        }
        let cmp = compare_bethe_vs_exact(model, m, &Tolerances::default(), &opts(cfg))?;
        for lm in &cmp.report.comparison {
            rows.push(CompareRow {
                sector_m: m,
                oracle_index: lm.oracle_index,
                oracle_re: lm.oracle.re,
                oracle_im: lm.oracle.im,
                bethe_index: lm.bethe_index,
                bethe_re: lm.bethe.map(|z| z.re),
                bethe_im: lm.bethe.map(|z| z.im),
                abs_diff: lm.bethe_index.and_then(|_| finite(lm.abs_diff)),
            });
        }
        if let Err(e) = cmp.check() {
            failures.push(e.to_string());
        }
        let mut sr = sector_record(Some(m), &cmp.report, shift);
        sr.comparison = Some(comparison_record(&cmp));
        sr.bethe = cmp.bethe.iter().map(|s| bethe_record(s, model.params.c11, Vec::new())).collect();
        record.sectors.push(sr);
    }
    let summary = record
        .sectors
        .iter()
        .map(|s| {
            let c = s.comparison.as_ref().unwrap();
            format!(
                "sector {}: {} (max diff {:.3e}, cutoff shift {:.3e})",
                s.m.unwrap_or(0),
                if c.passed { "pass" } else { "FAIL" },
                c.max_abs_diff.unwrap_or(f64::INFINITY),
                c.cutoff_shift.unwrap_or(f64::INFINITY)
            )
        })
        .collect();
    let failure = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(Output { tables: vec![("compare".into(), to_csv(&rows, COMPARE_HEADER)?)], record, summary, failure })
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    match cmd {
        Command::Spectrum => spectrum(cfg),
        Command::Bethe => bethe_cmd(cfg),
        Command::Rabi => rabi(cfg),
        Command::Verify => verify(cfg),
        Command::Sweep => sweep(cfg),
        Command::Compare => compare(cfg),
    }
}
