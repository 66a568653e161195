use std::sync::Arc;

use pf_core::cutoff::CutoffProfile;
use pf_core::fiber::*;
use pf_core::fock::{build_grid, vacuum_state, GridSpec, TruncatedFockSpace};
use pf_core::quadrature::QuadratureSpec;

fn space(grid: GridSpec, n: usize, cut: &CutoffProfile) -> Arc<TruncatedFockSpace> {
    Arc::new(TruncatedFockSpace::new(build_grid(&grid, cut).unwrap(), n).unwrap())
}

fn sharp() -> CutoffProfile {
    CutoffProfile::sharp(1.0).unwrap()
}

#[test]
fn davidson_matches_dense_for_small_grids() {
    let cuts = [
        sharp(),
        CutoffProfile::smoothed_plateau(1.5, 0.5).unwrap(),
        CutoffProfile::gaussian_bump(1.0, 0.4).unwrap(),
    ];
    for cut in &cuts {
        let grid = GridSpec {
            nodes_per_panel: 2,
            ..GridSpec::new(1, 1)
        };
        let s = space(grid, 2, cut);
        assert!(s.grid.len() <= 30, "{}", s.grid.len());
        for alpha in [0.01, 0.05, 0.1] {
            let op = assemble([0.0; 3], alpha, s.clone(), cut).unwrap();
            let dense = dense_eigenvalues(&op).unwrap();
            let gs = ground_state(&op, &SolverSpec::default()).unwrap();
            assert!(gs.converged);
            assert!(
                (gs.energy - dense[0]).abs() < 1e-10,
                "{} vs {}",
                gs.energy,
                dense[0]
            );
        }
    }
}

#[test]
fn free_operator_has_vacuum_ground_state() {
    let cut = sharp();
    let s = space(GridSpec::new(1, 1), 2, &cut);
    let op = assemble_unchecked([0.0; 3], 0.0, s.clone(), &cut).unwrap();
    let gs = ground_state(&op, &SolverSpec::default()).unwrap();
    assert!(gs.energy.abs() < 1e-12);
    assert!((gs.state.sector_norms_sq()[0] - 1.0).abs() < 1e-12);
    assert!(gs.ritz_values[1].abs() < 1e-12);
    // The exact alpha = 0 ground state has no photons at all.
    let pt = pull_through_check(&vacuum_state(s, 1).unwrap(), 0.0, &cut).unwrap();
    assert!(pt.trivially_satisfied);
    assert_eq!(pt.constant, 0.0);
}

#[test]
fn small_coupling_energy_tends_to_zero_with_degeneracy() {
    let cut = sharp();
    let s = space(GridSpec::new(1, 2), 2, &cut);
    let mut last = f64::NEG_INFINITY;
    for alpha in [1e-2, 1e-3, 1e-4] {
        let op = assemble([0.0; 3], alpha, s.clone(), &cut).unwrap();
        let gs = ground_state(&op, &SolverSpec::default()).unwrap();
        assert!(gs.energy < 0.0 && gs.energy > last);
        assert!(gs.energy.abs() < alpha);
        assert!((gs.ritz_values[1] - gs.ritz_values[0]).abs() < 1e-9);
        last = gs.energy;
    }
}

#[test]
fn truncation_is_variational() {
    let cut = sharp();
    let grid = GridSpec::new(1, 2);
    let alpha = 0.08;
    let mut energies = vec![];
    for n in 1..=3 {
        let s = space(grid, n, &cut);
        let op = assemble([0.0; 3], alpha, s, &cut).unwrap();
        energies.push(ground_state(&op, &SolverSpec::default()).unwrap().energy);
    }
    assert!(energies[1] <= energies[0] + 1e-12);
    assert!(energies[2] <= energies[1] + 1e-12);
}

#[test]
fn ground_energy_below_first_order_trial() {
    let cut = sharp();
    let s = space(GridSpec::new(2, 2), 2, &cut);
    for alpha in [0.01, 0.05] {
        let op = assemble([0.0; 3], alpha, s.clone(), &cut).unwrap();
        let gs = ground_state(&op, &SolverSpec::default()).unwrap();
        for spin in 0..2 {
            let trial = op.first_order_trial(spin).unwrap();
            let rq = op.rayleigh_quotient(&trial.amplitudes);
            assert!(gs.energy <= rq + 1e-12);
            // The trial already captures the leading order.
            assert!((rq - gs.energy).abs() < 0.1 * gs.energy.abs());
        }
    }
}

#[test]
fn magnetic_vacuum_amplitudes_follow_the_closed_form_on_refined_grids() {
    use pf_core::amplitudes::{sigma_b_plus_vacuum, SpinorPair};
    use pf_core::fock::Occupation;
    let cut = CutoffProfile::smoothed_plateau(1.0, 0.3).unwrap();
    let closed = sigma_b_plus_vacuum(SpinorPair::up(), &cut);
    let alpha = 0.03;
    for grid in [GridSpec::new(1, 1), GridSpec::new(3, 2)] {
        let s = space(grid, 1, &cut);
        let op = assemble([0.0; 3], alpha, s.clone(), &cut).unwrap();
        let y = op.apply_vec(&vacuum_state(s.clone(), 0).unwrap().amplitudes);
        for (j, m) in s.grid.modes.iter().enumerate() {
            let o = Occupation::from_modes(&[j]).unwrap();
            let want = closed.evaluate(&m.k, m.lambda);
            for spin in 0..2 {
                let got = y[s.basis_index(&o, spin).unwrap()] / (alpha.sqrt() * m.weight.sqrt());
                assert!((got - want[spin]).norm() < 1e-12 * (1.0 + want[spin].norm()));
            }
        }
    }
}

#[test]
fn discarded_constant_converges_to_c_no() {
    use pf_core::coefficients::normal_ordering_constant;
    let q = QuadratureSpec::default();
    // Piecewise polynomial integrand: exact once panels follow the kinks.
    let plateau = CutoffProfile::smoothed_plateau(1.0, 0.4).unwrap();
    let c_no = normal_ordering_constant(&plateau, &q).unwrap().value;
    for panels in [1, 3] {
        let s = space(GridSpec::new(panels, 1), 1, &plateau);
        let op = assemble([0.0; 3], 0.01, s, &plateau).unwrap();
        assert!((op.discarded_constant() - c_no).abs() < 1e-13 * c_no);
    }
    let bump = CutoffProfile::gaussian_bump(1.0, 0.3).unwrap();
    let c_no = normal_ordering_constant(&bump, &q).unwrap().value;
    let mut errs = vec![];
    for panels in [1, 2, 4] {
        let s = space(GridSpec::new(panels, 1), 1, &bump);
        let op = assemble([0.0; 3], 0.01, s, &bump).unwrap();
        errs.push((op.discarded_constant() - c_no).abs());
    }
    assert!(errs[2] < errs[0], "{errs:?}");
    assert!(errs[2] < 1e-3 * c_no, "{errs:?}");
}

#[test]
fn expansion_and_discrete_perturbation_theory_agree() {
    let cut = sharp();
    let quad = QuadratureSpec {
        tensor_radial_panels: 6,
        tensor_nodes_per_panel: 4,
        angular_order: 4,
        ..QuadratureSpec::default()
    };
    let alphas = [0.002, 0.004, 0.006, 0.008, 0.01];
    let t = self_energy_scan(
        &cut,
        &alphas,
        &GridSpec::default(),
        2,
        &SolverSpec::default(),
        &quad,
    )
    .unwrap();
    assert!(t.all_converged());
    let (e1, e2) = t.discrete_coefficients;
    // Leading order on the grid reproduces the continuum to grid accuracy.
    assert!((e1 + t.coefficients.gamma1_star_sq).abs() < 1e-6);
    // Quadratic fit of E/alpha reproduces both discrete coefficients.
    let fit = fit_slope(&t.alphas(), &t.energies(), 2).unwrap();
    assert!((fit.coefficients[0] - e1).abs() < 1e-8);
    assert!(
        (fit.coefficients[1] - e2).abs() < 0.02 * e2.abs(),
        "{} vs {e2}",
        fit.coefficients[1]
    );
    // The continuum alpha^2 coefficient is within a few percent of the grid one.
    assert!((t.coefficients.second_order() - e2).abs() < 0.05 * e2.abs());
    for r in &t.rows {
        assert!(r.grid_err_estimate < 1e-7);
        assert!((r.energy_numeric - r.energy_expansion).abs() < 1e-7);
    }
}

#[test]
fn refinement_approaches_the_expansion() {
    let cut = sharp();
    let alpha = 0.002;
    let expansion = pf_core::coefficients::SelfEnergyCoefficients::compute(
        &cut,
        &QuadratureSpec {
            tensor_radial_panels: 6,
            tensor_nodes_per_panel: 4,
            angular_order: 4,
            ..QuadratureSpec::default()
        },
    )
    .unwrap()
    .expansion(alpha)
    .unwrap();
    let mut gaps = vec![];
    for grid in [GridSpec::new(1, 1), GridSpec::new(2, 2)] {
        let s = space(grid, 2, &cut);
        let op = assemble([0.0; 3], alpha, s, &cut).unwrap();
        let e = ground_state(&op, &SolverSpec::default()).unwrap().energy;
        gaps.push((e - expansion).abs());
    }
    assert!(gaps[1] < gaps[0], "{gaps:?}");
}

#[test]
fn nonzero_momentum_is_supported() {
    let cut = sharp();
    let s = space(GridSpec::new(1, 1), 2, &cut);
    let op = assemble([0.0, 0.0, 0.2], 0.02, s, &cut).unwrap();
    assert!(op.hermiticity_residual(3) < 1e-13);
    let gs = ground_state(&op, &SolverSpec::default()).unwrap();
    let dense = dense_eigenvalues(&op).unwrap();
    assert!((gs.energy - dense[0]).abs() < 1e-10);
    assert!(op.perturbative_coefficients().is_err());
}
