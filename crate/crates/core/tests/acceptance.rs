//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use pf_core::amplitudes::{gamma2, gamma2_star_norm_sq_mc, gamma2_star_norm_sq_tensor, SpinorPair};
use pf_core::coefficients::*;
use pf_core::cutoff::CutoffProfile;
use pf_core::fiber::*;
use pf_core::fock::{build_grid, GridSpec, TruncatedFockSpace};
use pf_core::identities::{
    all_passed, default_fields, spinor_samples, verify_orthogonality_suite, verify_scaling_suite,
};
use pf_core::quadrature::QuadratureSpec;
use pf_core::trial::binding_sweep;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let mut o = f();
    let dt = t.elapsed();
    if let Some(limit) = limit {
        if dt > limit {
            o.pass = false;
            o.detail
                .push_str(&format!("; runtime {dt:.2?} exceeds {limit:?}"));
        }
    }
    (o, dt)
}

fn sharp() -> CutoffProfile {
    CutoffProfile::sharp(1.0).unwrap()
}

fn closed_forms() -> Outcome {
    let s = QuadratureSpec::default();
    let c = sharp();
    let got = [
        normal_ordering_constant(&c, &s).unwrap().value,
        binding_orbital_coefficient(&c, &s).unwrap().value,
        binding_zeeman_coefficient(&c, &s).unwrap().value,
    ];
    let want = [
        1.0 / PI,
        2.0 / (3.0 * PI) * LN_2,
        2.0 / (3.0 * PI) * (LN_2 - 0.625),
    ];
    let err = got
        .iter()
        .zip(&want)
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: err <= 1e-8,
        detail: format!(
            "c_no={:.10} F={:.10} F_z={:.10} max abs err {err:.1e}",
            got[0], got[1], got[2]
        ),
    }
}

fn dual_path() -> Outcome {
    let s = QuadratureSpec::default();
    let c = sharp();
    let direct = gamma1_star_norm_sq(&c, &s).unwrap().value;
    let radial = gamma1_star_norm_sq_radial(&c, &s).unwrap().value;
    let rel = (direct - radial).abs() / radial;
    Outcome {
        pass: rel <= 1e-6,
        detail: format!("3D {direct:.12} radial {radial:.12} rel {rel:.1e}"),
    }
}

fn identity_suites() -> Outcome {
    let s = QuadratureSpec::default();
    let c = sharp();
    let samples = spinor_samples(8, 7);
    let ortho = verify_orthogonality_suite(&c, &s, &samples, 1e-10, 0.01).unwrap();
    let scaling = verify_scaling_suite(&c, &s, &default_fields(11), 1e-10, 11).unwrap();
    let failed = ortho.iter().chain(&scaling).filter(|r| !r.passed()).count();
    Outcome {
        pass: samples.len() >= 8 && all_passed(&ortho) && all_passed(&scaling),
        detail: format!(
            "{} samples, {} orthogonality + {} scaling reports, {failed} failed",
            samples.len(),
            ortho.len(),
            scaling.len()
        ),
    }
}

fn space(grid: GridSpec, n: usize, c: &CutoffProfile) -> Arc<TruncatedFockSpace> {
    Arc::new(TruncatedFockSpace::new(build_grid(&grid, c).unwrap(), n).unwrap())
}

fn leading_order() -> Outcome {
    let c = sharp();
    let solver = SolverSpec::default();
    let quad = QuadratureSpec::default();
    let target = gamma1_star_norm_sq_radial(&c, &quad).unwrap().value;

    // Dense oracle on a small grid.
    let small = space(
        GridSpec {
            nodes_per_panel: 3,
            ..GridSpec::new(2, 1)
        },
        2,
        &c,
    );
    let mut dense_err: f64 = 0.0;
    for alpha in [0.002, 0.01, 0.05] {
        let op = assemble([0.0; 3], alpha, small.clone(), &c).unwrap();
        let d = dense_eigenvalues(&op).unwrap()[0];
        let g = ground_state(&op, &solver).unwrap();
        dense_err = dense_err.max((g.energy - d).abs());
    }

    let grid = GridSpec::default();
    let alphas = [0.002, 0.005, 0.01];
    let fine = space(grid, 2, &c);
    let coarse = space(grid.coarser().unwrap(), 2, &c);
    let mut e_fine = vec![];
    let mut e_coarse = vec![];
    let mut converged = true;
    for &alpha in &alphas {
        let g = ground_state(
            &assemble([0.0; 3], alpha, fine.clone(), &c).unwrap(),
            &solver,
        )
        .unwrap();
        let h = ground_state(
            &assemble([0.0; 3], alpha, coarse.clone(), &c).unwrap(),
            &solver,
        )
        .unwrap();
        converged &= g.converged && h.converged;
        e_fine.push(g.energy);
        e_coarse.push(h.energy);
    }
    let fit = fit_slope(&alphas, &e_fine, 1).unwrap();
    let fit_c = fit_slope(&alphas, &e_coarse, 1).unwrap();
    let err_est = (fit.slope() - fit_c.slope()).abs() + fit.slope_error();
    let dev = (fit.slope() - target).abs();
    Outcome {
        pass: converged
            && small.grid.len() <= 30
            && dense_err <= 1e-10
            && (100..=200).contains(&fine.grid.len())
            && dev <= err_est
            && dev <= 0.1 * target,
        detail: format!(
            "{} modes, slope {:.9} vs {target:.9}, deviation {dev:.1e}, estimate {err_est:.1e}; \
             dense oracle ({} modes) {dense_err:.1e}",
            fine.grid.len(),
            fit.slope(),
            small.grid.len()
        ),
    }
}

fn ground_states(alphas: &[f64]) -> Vec<GroundState> {
    let c = sharp();
    let s = space(GridSpec::default(), 2, &c);
    alphas
        .iter()
        .map(|&a| {
            ground_state(
                &assemble([0.0; 3], a, s.clone(), &c).unwrap(),
                &SolverSpec::default(),
            )
            .unwrap()
        })
        .collect()
}

fn photon_number(states: &[(f64, GroundState)]) -> Outcome {
    let ratios: Vec<f64> = states
        .iter()
        .map(|(a, g)| g.state.number_expectation().unwrap() / a)
        .collect();
    let max = ratios.iter().copied().fold(f64::MIN, f64::max);
    let min = ratios.iter().copied().fold(f64::MAX, f64::min);
    Outcome {
        pass: states.iter().all(|(_, g)| g.converged) && min > 0.0 && max / min <= 3.0,
        detail: format!("N_f/alpha = {ratios:.5?}, max/min {:.4}", max / min),
    }
}

fn pull_through(states: &[(f64, GroundState)]) -> Outcome {
    let c = sharp();
    let reports: Vec<_> = states
        .iter()
        .map(|(a, g)| pull_through_check(&g.state, *a, &c).unwrap())
        .collect();
    let cs: Vec<f64> = reports.iter().map(|r| r.constant).collect();
    let ratio =
        cs.iter().copied().fold(f64::MIN, f64::max) / cs.iter().copied().fold(f64::MAX, f64::min);
    Outcome {
        pass: reports
            .iter()
            .all(|r| r.outside_support == 0.0 && r.constant > 0.0)
            && ratio <= 2.0,
        detail: format!(
            "c at alpha {:?} = {cs:.4?}, ratio {ratio:.3}",
            states.iter().map(|(a, _)| *a).collect::<Vec<_>>()
        ),
    }
}

fn alpha3_coefficient() -> Outcome {
    let target = 2.0 / (3.0 * PI) * LN_2 + 2.0 / (3.0 * PI) * (LN_2 - 0.625);
    let alphas = [0.0025, 0.005, 0.01, 0.02];
    let r = binding_sweep(&sharp(), &alphas, &QuadratureSpec::default()).unwrap();
    let x: Vec<f64> = r.iter().map(|r| r.extracted_alpha3_coeff).collect();
    let errs: Vec<f64> = x.iter().map(|v| (v - target).abs()).collect();
    let monotone = errs.windows(2).all(|w| w[0] < w[1])
        && (x.windows(2).all(|w| w[0] < w[1]) || x.windows(2).all(|w| w[0] > w[1]));
    let rel = errs[0] / target;
    Outcome {
        pass: monotone && rel <= 0.15,
        detail: format!("coeffs {x:.5?} vs {target:.5}, alpha=0.0025 rel {rel:.3}"),
    }
}

fn second_order() -> Outcome {
    let c = sharp();
    let spec = QuadratureSpec::default();
    let coeffs = SelfEnergyCoefficients::compute(&c, &spec).unwrap();
    let mut spread: f64 = 0.0;
    for alpha in [0.001, 0.01, 0.05, 0.1] {
        let e = coeffs.expansion(alpha).unwrap();
        let q = (e + alpha * coeffs.gamma1_star_sq) / (alpha * alpha);
        spread = spread.max((q - coeffs.second_order()).abs() / coeffs.second_order().abs());
    }
    let amp = gamma2(SpinorPair::up(), &c);
    let tensor = gamma2_star_norm_sq_tensor(&amp, &spec, false).unwrap();
    let mc = gamma2_star_norm_sq_mc(&amp, &spec).unwrap();
    let with = |g2: f64| {
        SelfEnergyCoefficients {
            gamma2_star_sq: g2,
            ..coeffs
        }
        .second_order()
    };
    let diff = (with(tensor.value) - with(mc.value)).abs();
    Outcome {
        pass: spread <= 1e-12 && diff <= 3.0 * mc.error,
        detail: format!(
            "alpha^2 coeff tensor {:.8} MC {:.8} +- {:.1e} ({:.2} sigma), alpha spread {spread:.1e}",
            with(tensor.value),
            with(mc.value),
            mc.error,
            diff / mc.error
        ),
    }
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |n: usize, name: &str, (o, dt): (Outcome, Duration)| {
        all &= o.pass;
        println!(
            "{} {n} {name}: {} [{dt:.2?}]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    };
    report(
        1,
        "closed forms",
        timed(Some(Duration::from_secs(1)), closed_forms),
    );
    report(
        2,
        "dual-path star norm",
        timed(Some(Duration::from_secs(10)), dual_path),
    );
    report(
        3,
        "identity suites",
        timed(Some(Duration::from_secs(60)), identity_suites),
    );
    report(4, "self-energy slope", timed(None, leading_order));
    let alphas = [0.005, 0.01, 0.02, 0.05];
    let mut states: Vec<(f64, GroundState)> = vec![];
    report(
        5,
        "photon number band",
        timed(None, || {
            states = alphas.iter().copied().zip(ground_states(&alphas)).collect();
            photon_number(&states)
        }),
    );
    let pair = [states[1].clone(), states[3].clone()];
    report(
        6,
        "pull-through constant",
        timed(None, || pull_through(&pair)),
    );
    report(
        7,
        "alpha^3 coefficient",
        timed(Some(Duration::from_secs(10)), alpha3_coefficient),
    );
    report(8, "second-order consistency", timed(None, second_order));
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
