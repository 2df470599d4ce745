use mrint::bethe::{
    degeneracy_check, eigenvalue_lambda, lambda_residues, solve_m1, solve_m_general, symmetric_bs, xy_from_symmetric_roots,
    BetheSolution, EnergyMap, SolveOptions,
};
use mrint::lax::{vacuum_for, Chain, RKind};
use mrint::linalg::eig;
use mrint::models::{MRParams, Model};
use mrint::oracle::{
    compare_bethe_vs_exact, cutoff_certificate, diag_sector, kappa0, m1_charpoly_crosscheck, reassemble, sector_basis, Tolerances,
};
use mrint::{ModeKind, SpaceSpec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OMEGA: f64 = 3.02;

fn bs(na: usize, delta: f64, cutoff: usize) -> Model {
    Model::bs(OMEGA, 1.0, delta, SpaceSpec::new(cutoff, na, 1).unwrap()).unwrap()
}

fn bethe(model: &Model, m: usize) -> Vec<BetheSolution> {
    let vac = vacuum_for(&model.params, model.kind(), 1).unwrap();
    let emap = EnergyMap::for_model(&model.params, model.kind(), 1, &vac).unwrap();
    if m == 1 {
        solve_m1(&vac, Some(&emap)).unwrap()
    } else {
        solve_m_general(&vac, m, Some(&emap), &SolveOptions::default()).unwrap().solutions
    }
}

fn sorted_re(v: &[C64]) -> Vec<f64> {
    let mut r: Vec<f64> = v.iter().map(|z| z.re).collect();
    r.sort_by(f64::total_cmp);
    r
}

#[test]
fn vacuum_rabi_triplet() {
    let model = bs(2, 0.0, 24);
    let cmp = compare_bethe_vs_exact(&model, 1, &Tolerances::default(), &SolveOptions::default()).unwrap();
    cmp.check().unwrap();
    let e = sorted_re(&cmp.bethe.iter().map(|s| s.energy).collect::<Vec<_>>());
    for (got, want) in e.iter().zip([2.02, 3.02, 4.02]) {
        assert!((got - want).abs() < 0.01, "{e:?}");
    }
}

#[test]
fn detuning_grid_two_atoms() {
    for delta in [0.0, 0.15, -0.15, 0.30, -0.30, 0.5, -0.5] {
        let model = bs(2, delta, 16);
        let cmp = compare_bethe_vs_exact(&model, 1, &Tolerances::default(), &SolveOptions::default()).unwrap();
        cmp.check().unwrap_or_else(|e| panic!("delta {delta}: {e}"));
    }
}

#[test]
fn two_atoms_higher_sectors_off_resonance() {
    let model = bs(2, 0.3, 16);
    for m in 2..=4 {
        let cmp = compare_bethe_vs_exact(&model, m, &Tolerances::default(), &SolveOptions::default()).unwrap();
        cmp.check().unwrap_or_else(|e| panic!("M = {m}: {e}"));
    }
}

#[test]
fn two_atoms_resonant_higher_sectors_are_reported() {
    // collisions on common zeros: the solver may come back short, but
    // whatever it returns must sit on oracle levels
    let model = bs(2, 0.0, 12);
    let cmp = compare_bethe_vs_exact(&model, 2, &Tolerances::default(), &SolveOptions::default()).unwrap();
    for lm in cmp.report.comparison.iter().filter(|l| l.bethe.is_some()) {
        assert!(lm.abs_diff < 1e-8);
    }
}

#[test]
fn single_atom_sectors_complete() {
    for delta in [0.0, 0.3, -0.5] {
        let model = bs(1, delta, 18);
        for m in 1..=6 {
            let cmp = compare_bethe_vs_exact(&model, m, &Tolerances::default(), &SolveOptions::default()).unwrap();
            cmp.check().unwrap_or_else(|e| panic!("delta {delta}, M = {m}: {e}"));
        }
    }
}

#[test]
fn three_atoms_single_excitation() {
    let model = bs(3, 0.2, 10);
    let cmp = compare_bethe_vs_exact(&model, 1, &Tolerances::default(), &SolveOptions::default()).unwrap();
    cmp.check().unwrap();
    assert_eq!(cmp.bethe.len(), 4);
}

#[test]
fn symmetric_reduction_matches_solver_and_oracle() {
    for delta in [0.0, 0.1, -0.3, 0.5] {
        let model = bs(1, delta, 22);
        let k0 = kappa0(&model).re;
        for m in 1..=8 {
            let [up, down] = symmetric_bs(m, delta, OMEGA).unwrap();
            assert!(up.quadratic_residual < 1e-12 && down.quadratic_residual < 1e-12);
            // the two-state secular equation, solved independently
            let mf = m as f64;
            let half = 0.5 * (delta * delta + 4.0 * mf * mf).sqrt();
            assert!((up.energy - (mf * OMEGA + half)).abs() < 1e-12);
            assert!((down.energy - (mf * OMEGA - half)).abs() < 1e-12);
            let report = diag_sector(&model.h, &sector_basis(&model.spec, m).unwrap(), None).unwrap();
            let oracle = sorted_re(&report.eigenvalues);
            assert!((oracle[0] - down.energy).abs() < 1e-8 && (oracle[1] - up.energy).abs() < 1e-8, "M = {m}, delta {delta}");
            if m <= 4 {
                for sol in bethe(&model, m) {
                    let shifted = sol.energy.re - k0;
                    assert!((shifted - up.energy).abs() < 1e-8 || (shifted - down.energy).abs() < 1e-8);
                    let (x, y) = xy_from_symmetric_roots(&sol.roots, delta);
                    assert!(x.norm().is_finite() && y.norm().is_finite());
                }
            }
        }
    }
}

#[test]
fn resonance_common_zeros_and_ladders() {
    let p = MRParams::bs(OMEGA, 1.0, 0.0, 1).unwrap();
    let vac = vacuum_for(&p, ModeKind::Su11Boson, 1).unwrap();
    let mut zeros: Vec<f64> = degeneracy_check(&vac, 1e-10).unwrap().iter().map(|z| {
        assert!(z.alpha_residual < 1e-10 && z.beta_residual < 1e-10);
        assert!(z.lambda.im.abs() < 1e-10);
        z.lambda.re
    }).collect();
    zeros.sort_by(f64::total_cmp);
    assert_eq!(zeros.len(), 2);
    assert!((zeros[0] - 0.5 * (-OMEGA - 1.0)).abs() < 1e-10);
    assert!((zeros[1] - 0.5 * (-OMEGA + 1.0)).abs() < 1e-10);

    let model = bs(1, 0.0, 14);
    let e1 = sorted_re(&diag_sector(&model.h, &sector_basis(&model.spec, 1).unwrap(), Some(kappa0(&model))).unwrap().eigenvalues);
    for m in 1..=4 {
        let em = sorted_re(&diag_sector(&model.h, &sector_basis(&model.spec, m).unwrap(), Some(kappa0(&model))).unwrap().eigenvalues);
        for (a, b) in em.iter().zip(&e1) {
            assert!((a - m as f64 * b).abs() < 1e-8, "M = {m}: {em:?}");
        }
    }
}

#[test]
fn detuned_single_atom_has_no_common_zero() {
    let p = MRParams::bs(OMEGA, 1.0, 0.4, 1).unwrap();
    let vac = vacuum_for(&p, ModeKind::Su11Boson, 1).unwrap();
    assert!(degeneracy_check(&vac, 1e-10).unwrap().is_empty());
}

/// Eigenvalues of τ(λ) on the sector contain Λ(λ); residues vanish.
fn check_lambda_tau(model: &Model, m: usize, rng: &mut ChaCha8Rng) -> usize {
    let vac = vacuum_for(&model.params, model.kind(), 1).unwrap();
    let chain = Chain::new(&model.params, model.kind(), &model.spec).unwrap();
    let basis = sector_basis(&model.spec, m).unwrap();
    let sols = bethe(model, m);
    let points: Vec<C64> = (0..10).map(|_| C64::new(rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0))).collect();
    let spectra: Vec<Vec<C64>> = points
        .iter()
        .map(|&l| eig(chain.transfer(l).restricted(&basis.indices).as_ref()).unwrap().0)
        .collect();
    for sol in &sols {
        for (&l, spec) in points.iter().zip(&spectra) {
            let lam = eigenvalue_lambda(l, sol, &vac, RKind::Rational, 1.0).unwrap();
            let best = spec.iter().map(|t| (t - lam).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8 * (1.0 + lam.norm()), "M = {m}: Λ = {lam} misses τ spectrum by {best:e}");
        }
        if sol.degenerate {
            // repeated roots: Λ stays polynomial exactly when the division is clean
            assert!(sol.remainder < 1e-9);
        } else {
            let res = lambda_residues(&sol.roots, &vac, RKind::Rational, 1.0).unwrap();
            assert!(res.iter().all(|r| r.norm() < 1e-9), "residues {res:?}");
        }
    }
    sols.len()
}

#[test]
fn lambda_matches_transfer_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut total = 0;
    for na in 1..=2 {
        for delta in [0.0, 0.25, -0.6] {
            let model = bs(na, delta, 10);
            for m in 1..=3 {
                total += check_lambda_tau(&model, m, &mut rng);
            }
        }
    }
    let jc = Model::jc(2.0, 0.7, 0.1, SpaceSpec::new(10, 2, 1).unwrap()).unwrap();
    for m in 1..=3 {
        total += check_lambda_tau(&jc, m, &mut rng);
    }
    assert!(total > 30);
}

#[test]
fn corrupted_roots_are_caught() {
    let model = bs(2, 0.3, 10);
    let vac = vacuum_for(&model.params, model.kind(), 1).unwrap();
    let mut sol = bethe(&model, 2).into_iter().find(|s| !s.degenerate).unwrap();
    sol.roots[0] += C64::new(1e-3, 0.0);
    let res = lambda_residues(&sol.roots, &vac, RKind::Rational, 1.0).unwrap();
    assert!(res.iter().any(|r| r.norm() > 1e-6));

    let chain = Chain::new(&model.params, model.kind(), &model.spec).unwrap();
    let basis = sector_basis(&model.spec, 2).unwrap();
    let l = C64::new(0.37, 0.21);
    let spec = eig(chain.transfer(l).restricted(&basis.indices).as_ref()).unwrap().0;
    let lam = eigenvalue_lambda(l, &sol, &vac, RKind::Rational, 1.0).unwrap();
    assert!(spec.iter().all(|t| (t - lam).norm() > 1e-6));
}

#[test]
fn single_excitation_charpoly_agrees() {
    for (na, delta) in [(1, 0.0), (2, 0.0), (2, 0.4), (3, -0.2)] {
        let model = bs(na, delta, 8);
        let err = m1_charpoly_crosscheck(&model).unwrap();
        assert!(err < 1e-10, "na={na} delta={delta}: {err:e}");
    }
}

#[test]
fn sectors_reassemble_to_hamiltonian() {
    let model = bs(2, 0.3, 12);
    let (idx, glued) = reassemble(&model.h, &model.spec, 5).unwrap();
    let direct = model.h.restricted(&idx);
    let mut worst: f64 = 0.0;
    for i in 0..idx.len() {
        for j in 0..idx.len() {
            worst = worst.max((glued[(i, j)] - direct[(i, j)]).norm());
        }
    }
    assert!(worst < 1e-14);
}

#[test]
fn truncation_certificate() {
    let model = bs(2, 0.3, 16);
    assert!(cutoff_certificate(&model, &[0, 1, 2, 3, 4], 8).unwrap() < 1e-10);
    let one = bs(1, 0.0, 20);
    assert!(cutoff_certificate(&one, &[1, 2, 3, 4, 5, 6, 7, 8], 8).unwrap() < 1e-10);
}
