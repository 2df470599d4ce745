//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrint::bethe::{
    degeneracy_check, eigenvalue_lambda, lambda_residues, solve_m1, solve_m_general, symmetric_bs, BetheSolution, EnergyMap,
    SolveOptions,
};
use mrint::dynamics::{evolve, locate_exceptional, photon_state, rabi_spectrum, time_grid, vrs_scan, RabiClass};
use mrint::lax::{check_ybe, pure_ybe_residual, vacuum_for, Chain, RKind, RMatrix};
use mrint::linalg::eig;
use mrint::models::{build_h_qmr_with_x, q_deformation_error, MRParams, Model, QMRParams, QReduction};
use mrint::oracle::{compare_bethe_vs_exact, cutoff_certificate, diag_sector, kappa0, sector_basis, Tolerances};
use mrint::{ModeKind, SpaceSpec, C64};

type Outcome = Result<String, String>;

const OMEGA: f64 = 3.02;

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn bs(na: usize, delta: f64, cutoff: usize) -> Result<Model, String> {
    Model::bs(OMEGA, 1.0, delta, SpaceSpec::new(cutoff, na, 1).map_err(e)?).map_err(e)
}

fn sorted_re(v: &[C64]) -> Vec<f64> {
    let mut r: Vec<f64> = v.iter().map(|z| z.re).collect();
    r.sort_by(f64::total_cmp);
    r
}

fn vrs_triplet() -> Outcome {
    let start = Instant::now();
    let model = bs(2, 0.0, 24)?;
    let cmp = compare_bethe_vs_exact(&model, 1, &Tolerances::default(), &SolveOptions::default()).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    let energies = sorted_re(&cmp.bethe.iter().map(|s| s.energy).collect::<Vec<_>>());
    ensure(energies.len() == 3, format!("{} Bethe levels", energies.len()))?;
    let worst = energies.iter().zip([2.02, 3.02, 4.02]).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    ensure(worst <= 0.01, format!("energies {energies:?}"))?;
    ensure(cmp.passed(), format!("oracle mismatch {:.3e}", cmp.report.max_abs_diff()))?;
    ensure(secs < 1.0, format!("runtime {secs:.2} s"))?;
    Ok(format!(
        "E1 = {:.4}/{:.4}/{:.4}, Bethe-oracle {:.1e}, {secs:.3} s",
        energies[0],
        energies[1],
        energies[2],
        cmp.report.max_abs_diff()
    ))
}

fn exceptional_detuning() -> Outcome {
    let plus = locate_exceptional(OMEGA, 1.0, 2, 0.1, 0.5, 1e-12).map_err(e)?;
    let minus = locate_exceptional(OMEGA, 1.0, 2, -0.5, -0.1, 1e-12).map_err(e)?;
    ensure((plus - 0.30).abs() <= 0.01 && (minus + 0.30).abs() <= 0.01, format!("delta* = {minus}, {plus}"))?;
    // the reference triples describe the coalescence point, i.e. delta* itself
    let level = |d: f64| -> Result<Vec<f64>, String> {
        Ok(sorted_re(&vrs_scan(OMEGA, 1.0, &[d], 2).map_err(e)?.rows[0].energies))
    };
    for (d, want) in [(minus, [2.05, 3.81, 3.81]), (plus, [2.22, 2.22, 3.99])] {
        let got = level(d)?;
        let worst = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
        ensure(worst <= 0.02, format!("at delta = {d}: {got:?} vs {want:?}"))?;
    }
    for d in [0.31, 0.35, 0.5, 0.8, -0.31, -0.35, -0.5, -0.8] {
        let en = &vrs_scan(OMEGA, 1.0, &[d], 2).map_err(e)?.rows[0].energies;
        let real: Vec<&C64> = en.iter().filter(|z| z.im == 0.0 || z.im.abs() < 1e-12 * z.norm()).collect();
        let cplx: Vec<&C64> = en.iter().filter(|z| z.im.abs() >= 1e-12 * z.norm()).collect();
        ensure(real.len() == 1 && cplx.len() == 2, format!("delta = {d}: {en:?}"))?;
        ensure((cplx[0] - cplx[1].conj()).norm() < 1e-12 * cplx[0].norm(), format!("delta = {d}: pair not conjugate"))?;
    }
    let lit = level(0.30)?;
    Ok(format!(
        "delta* = {minus:.7}, +{plus:.7}; triples evaluated at delta* (at literal +0.30 the pair is {:.3}/{:.3})",
        lit[0], lit[1]
    ))
}

fn closed_bs_spectrum() -> Outcome {
    let start = Instant::now();
    let mut formula_dev: f64 = 0.0;
    let mut oracle_dev: f64 = 0.0;
    let mut secular_dev: f64 = 0.0;
    for delta in [0.0, 0.1, -0.1, 0.3, -0.3, 0.5, -0.5] {
        let model = bs(1, delta, 20)?;
        for m in 1..=8usize {
            let mf = m as f64;
            let [up, down] = symmetric_bs(m, delta, OMEGA).map_err(e)?;
            // reference closed form
            let reference = [mf * OMEGA + (delta * delta + mf * mf).sqrt(), mf * OMEGA - (delta * delta + mf * mf).sqrt()];
            formula_dev = formula_dev.max((up.energy - reference[0]).abs()).max((down.energy - reference[1]).abs());
            // two-state secular equation of the sector, solved here
            let half = 0.5 * (delta * delta + 4.0 * mf * mf).sqrt();
            secular_dev = secular_dev.max((up.energy - mf * OMEGA - half).abs()).max((down.energy - mf * OMEGA + half).abs());
            // symmetric-root energies are raw H energies (their vacuum offset is zero)
            let oracle = sorted_re(&diag_sector(&model.h, &sector_basis(&model.spec, m).map_err(e)?, None).map_err(e)?.eigenvalues);
            oracle_dev = oracle_dev.max((oracle[0] - down.energy).abs()).max((oracle[1] - up.energy).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "vs reference M*omega_f +- sqrt(delta^2+M^2): {formula_dev:.3e}; vs secular M*omega_f +- sqrt(delta^2+4M^2)/2: {secular_dev:.1e}; vs oracle: {oracle_dev:.1e}; {secs:.2} s"
    );
    ensure(oracle_dev < 1e-8 && secular_dev < 1e-12 && secs < 5.0, detail.clone())?;
    ensure(formula_dev < 1e-12, detail.clone())?;
    Ok(detail)
}

fn resonance_degeneracy() -> Outcome {
    let p = MRParams::bs(OMEGA, 1.0, 0.0, 1).map_err(e)?;
    let vac = vacuum_for(&p, ModeKind::Su11Boson, 1).map_err(e)?;
    let zeros = degeneracy_check(&vac, 1e-10).map_err(e)?;
    ensure(zeros.len() == 2, format!("{} common zeros", zeros.len()))?;
    let mut lam: Vec<f64> = zeros.iter().map(|z| z.lambda.re).collect();
    lam.sort_by(f64::total_cmp);
    let want = [0.5 * (-OMEGA - 1.0), 0.5 * (-OMEGA + 1.0)];
    ensure((lam[0] - want[0]).abs() < 1e-10 && (lam[1] - want[1]).abs() < 1e-10, format!("zeros {lam:?}"))?;
    let res = zeros.iter().map(|z| z.alpha_residual.max(z.beta_residual)).fold(0.0, f64::max);
    ensure(res < 1e-10, format!("residual {res:e}"))?;
    let model = bs(1, 0.0, 16)?;
    let level = |m: usize| -> Result<Vec<f64>, String> {
        Ok(sorted_re(
            &diag_sector(&model.h, &sector_basis(&model.spec, m).map_err(e)?, Some(kappa0(&model))).map_err(e)?.eigenvalues,
        ))
    };
    let e1 = level(1)?;
    let mut worst: f64 = 0.0;
    for m in 1..=4 {
        for (a, b) in level(m)?.iter().zip(&e1) {
            worst = worst.max((a - m as f64 * b).abs());
        }
    }
    ensure(worst < 1e-8, format!("ladder deviation {worst:e}"))?;
    Ok(format!("lambda1 = {:.4}, {:.4} (residual {res:.1e}); ladder E_M = M E_1 to {worst:.1e}", lam[0], lam[1]))
}

fn integrability() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draw = |rng: &mut ChaCha8Rng| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
    let mut pure: f64 = 0.0;
    for _ in 0..100 {
        let (u, v) = (draw(&mut rng), draw(&mut rng));
        pure = pure.max(pure_ybe_residual(&RMatrix::rational(), u, v));
        pure = pure.max(pure_ybe_residual(&RMatrix::trigonometric(rng.random_range(0.1..1.4)), u, v));
    }
    ensure(pure < 1e-12, format!("pure YBE {pure:e}"))?;
    let mut worst: f64 = 0.0;
    for na in 1..=3 {
        let cutoff = if na == 3 { 6 } else { 8 };
        let spec = SpaceSpec::new(cutoff, na, 1).map_err(e)?;
        for (p, kind) in [
            (MRParams::bs(OMEGA, 1.0, 0.2, na).map_err(e)?, ModeKind::Su11Boson),
            (MRParams::jc(2.0, 0.7, -0.1, na).map_err(e)?, ModeKind::Boson),
        ] {
            let chain = Chain::new(&p, kind, &spec).map_err(e)?;
            for _ in 0..3 {
                let (l, m) = loop {
                    let (l, m) = (draw(&mut rng), draw(&mut rng));
                    if (l - m - 1.0).norm() > 0.1 && (l - m + 1.0).norm() > 0.1 {
                        break (l, m);
                    }
                };
                let r = check_ybe(&chain, l, m).map_err(e)?;
                worst = worst.max(r.rtt).max(r.tau_commutator);
            }
        }
    }
    ensure(worst < 1e-10, format!("RTT/commutator {worst:e}"))?;
    let good = MRParams::bs(OMEGA, 1.0, 0.0, 1).map_err(e)?;
    let bad = MRParams { c20: -0.5, ..good };
    let chain = Chain::new_unchecked(&bad, ModeKind::Su11Boson, &SpaceSpec::new(8, 1, 1).map_err(e)?).map_err(e)?;
    let neg = check_ybe(&chain, C64::new(0.3, 0.1), C64::new(-0.4, 0.2)).map_err(e)?.rtt;
    ensure(neg > 1e-3, format!("negative control only {neg:e}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, format!("runtime {secs:.1} s"))?;
    Ok(format!("pure YBE {pure:.1e}, RTT/[tau,tau] {worst:.1e}, broken params {neg:.2e}, {secs:.2} s"))
}

fn solutions(model: &Model, m: usize) -> Result<Vec<BetheSolution>, String> {
    let vac = vacuum_for(&model.params, model.kind(), 1).map_err(e)?;
    let emap = EnergyMap::for_model(&model.params, model.kind(), 1, &vac).map_err(e)?;
    if m == 1 {
        solve_m1(&vac, Some(&emap)).map_err(e)
    } else {
        Ok(solve_m_general(&vac, m, Some(&emap), &SolveOptions::default()).map_err(e)?.solutions)
    }
}

fn lambda_tau() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut count, mut worst_tau, mut worst_res) = (0usize, 0.0f64, 0.0f64);
    let mut models = Vec::new();
    for na in 1..=2 {
        for delta in [0.0, 0.3, -0.6] {
            models.push(bs(na, delta, 10)?);
        }
        models.push(Model::jc(2.0, 0.7, 0.1, SpaceSpec::new(10, na, 1).map_err(e)?).map_err(e)?);
    }
    for model in &models {
        let vac = vacuum_for(&model.params, model.kind(), 1).map_err(e)?;
        let chain = Chain::new(&model.params, model.kind(), &model.spec).map_err(e)?;
        for m in 1..=3 {
            let basis = sector_basis(&model.spec, m).map_err(e)?;
            let points: Vec<C64> = (0..10).map(|_| C64::new(rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0))).collect();
            let spectra = points
                .iter()
                .map(|&l| eig(chain.transfer(l).restricted(&basis.indices).as_ref()).map(|r| r.0).map_err(e))
                .collect::<Result<Vec<_>, _>>()?;
            for sol in solutions(model, m)? {
                count += 1;
                for (&l, spec) in points.iter().zip(&spectra) {
                    let lam = eigenvalue_lambda(l, &sol, &vac, RKind::Rational, 1.0).map_err(e)?;
                    let d = spec.iter().map(|t| (t - lam).norm()).fold(f64::INFINITY, f64::min);
                    worst_tau = worst_tau.max(d);
                }
                let r = if sol.degenerate {
                    // repeated roots on common zeros: residue-free means exact division
                    sol.remainder
                } else {
                    lambda_residues(&sol.roots, &vac, RKind::Rational, 1.0).map_err(e)?.iter().map(|z| z.norm()).fold(0.0, f64::max)
                };
                worst_res = worst_res.max(r);
            }
        }
    }
    ensure(worst_tau < 1e-8, format!("Lambda vs tau {worst_tau:e}"))?;
    ensure(worst_res < 1e-9, format!("residue {worst_res:e}"))?;
    Ok(format!("{count} solutions x 10 points: Lambda-tau {worst_tau:.1e}, residues {worst_res:.1e}"))
}

fn rabi_classification() -> Outcome {
    let classify = |delta: f64| -> Result<RabiClass, String> {
        let spec = SpaceSpec::new(12, 2, 1).map_err(e)?;
        let m = Model::bs(OMEGA, 1.0, delta, spec.clone()).map_err(e)?;
        let r = evolve(&m.h, &spec, &photon_state(&spec, 1), &[], &time_grid(7.0, 2048)).map_err(e)?;
        Ok(rabi_spectrum(&r, 0).map_err(e)?.classification)
    };
    let got = [classify(0.0)?, classify(-0.30)?, classify(0.5)?];
    ensure(
        got == [RabiClass::Frequencies(3), RabiClass::Frequencies(1), RabiClass::Irregular],
        format!("classes {got:?}"),
    )?;
    let spec = SpaceSpec::new(16, 1, 1).map_err(e)?;
    let m = Model::bs(OMEGA, 1.0, 0.2, spec.clone()).map_err(e)?;
    let r = evolve(&m.h, &spec, &photon_state(&spec, 3), &[], &time_grid(50.0, 2001)).map_err(e)?;
    let drift = r.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    ensure(r.normalized() && drift < 1e-10, format!("Hermitian norm drift {drift:e}"))?;
    Ok(format!(
        "{} / {} / {}; Hermitian norm drift {drift:.1e}",
        got[0].label(),
        got[1].label(),
        got[2].label()
    ))
}

fn q_models() -> Outcome {
    let (mut herm, mut comm): (f64, f64) = (0.0, 0.0);
    for red in [QReduction::QBS, QReduction::QJC] {
        for q in [0.8, 1.1, 1.5] {
            for two_s in [1, 2] {
                let spec = SpaceSpec::new(10, 1, two_s).map_err(e)?.with_deformation(q).map_err(e)?;
                let qp = QMRParams::for_reduction(red, 0.8, 0.7, q).map_err(e)?;
                let (h, x) = build_h_qmr_with_x(&qp, red, &spec).map_err(e)?;
                herm = herm.max((&h - &h.dagger()).max_abs());
                comm = comm.max(h.commutator(&x).max_abs());
            }
        }
    }
    ensure(herm < 1e-13 && comm < 1e-12, format!("hermiticity {herm:e}, [H,X] {comm:e}"))?;
    let mut ratios = Vec::new();
    for red in [QReduction::QBS, QReduction::QJC] {
        let mut by_size = Vec::new();
        for dq in [1e-2, 1e-3] {
            let mut worst: f64 = 0.0;
            for q in [1.0 + dq, 1.0 - dq] {
                let spec = SpaceSpec::new(10, 1, 1).map_err(e)?.with_deformation(q).map_err(e)?;
                let qp = QMRParams::for_reduction(red, 0.8, 0.7, q).map_err(e)?;
                let err = q_deformation_error(&qp, red, &spec, 2).map_err(e)?;
                ensure(err <= 1e-2 * dq, format!("{red:?} q = {q}: {err:e}"))?;
                worst = worst.max(err / dq);
            }
            by_size.push(worst);
        }
        ensure(by_size[1] <= by_size[0] * 1.01, format!("{red:?}: error/|q-1| grows {by_size:?}"))?;
        ratios.push(by_size);
    }
    Ok(format!(
        "hermiticity {herm:.1e}, [H,X] {comm:.1e}; max error/|q-1| (s = 1/2, M <= 2) {:.1e} -> {:.1e}",
        ratios.iter().map(|r| r[0]).fold(0.0, f64::max),
        ratios.iter().map(|r| r[1]).fold(0.0, f64::max)
    ))
}

fn truncation() -> Outcome {
    let mut worst: f64 = 0.0;
    for (model, sectors) in [
        (bs(2, 0.3, 12)?, vec![0, 1, 2, 3, 4]),
        (bs(2, 0.0, 24)?, vec![1]),
        (bs(1, 0.1, 20)?, (1..=8).collect()),
        (Model::jc(2.0, 0.7, 0.1, SpaceSpec::new(10, 2, 1).map_err(e)?).map_err(e)?, vec![1, 2, 3]),
    ] {
        worst = worst.max(cutoff_certificate(&model, &sectors, 8).map_err(e)?);
    }
    ensure(worst < 1e-10, format!("shift {worst:e}"))?;
    Ok(format!("largest shift under cutoff + 8: {worst:.1e}"))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 6] = [
        &["spectrum", "--delta", "0", "--cutoff", "24"],
        &["bethe", "--delta", "0.3", "--cutoff", "10", "--sectors", "1,2,3", "--seed", "5"],
        &["rabi", "--delta", "-0.30", "--cutoff", "12"],
        &["verify", "--delta", "0.1", "--cutoff", "6", "--seed", "9"],
        &["sweep"],
        &["compare", "--delta", "0.3", "--cutoff", "10", "--sectors", "1,2"],
    ];
    let mut files = 0;
    for args in runs {
        let dir = tempfile::tempdir().map_err(e)?;
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", dir.path().to_str().unwrap()]);
        let mut snaps = Vec::new();
        for _ in 0..2 {
            let st = Command::new(env!("CARGO_BIN_EXE_mrint")).args(&full).output().map_err(e)?.status;
            ensure(st.success(), format!("{args:?} exited {st}"))?;
            let mut snap: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
                .map_err(e)?
                .map(|x| {
                    let x = x.unwrap();
                    (x.file_name().to_string_lossy().into_owned(), std::fs::read(x.path()).unwrap())
                })
                .collect();
            snap.sort();
            snaps.push(snap);
        }
        ensure(snaps[0] == snaps[1], format!("{args:?} outputs differ"))?;
        files += snaps[0].len();
    }
    Ok(format!("{files} CSV/JSON files byte-identical across two runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("VRS triplet", vrs_triplet),
        ("exceptional detuning", exceptional_detuning),
        ("closed BS spectrum", closed_bs_spectrum),
        ("resonance degeneracy", resonance_degeneracy),
        ("integrability suite", integrability),
        ("Lambda-tau equivalence", lambda_tau),
        ("Rabi regime classification", rabi_classification),
        ("q-model suite", q_models),
        ("truncation certificate", truncation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
