mod common;

use std::f64::consts::PI;

use chlab_core::evolution::*;
use chlab_core::fixtures::{gaussian, sech, synthetic_spectrum, Profile};
use chlab_core::inequalities::{assembled_constants, AssembledConstants};
use chlab_core::norms::phi_infinity;
use chlab_core::spectral::Field;
use chlab_core::taylor::{linear_fit, taylor_coeffs};
use chlab_core::{Error, Grid, State, SystemParams};
use common::*;

fn wave(grid: &Grid) -> State {
    let u = Profile::Sech2 {
        amplitude: 0.1,
        width: 2.0,
        center: 0.0,
    }
    .field(grid)
    .unwrap();
    let v = Profile::Gaussian {
        amplitude: 0.1,
        width: 1.0,
        center: 0.0,
    }
    .field(grid)
    .unwrap();
    State::new(u, v).unwrap()
}

fn flat(k: f64, l: f64, m: f64) -> AssembledConstants {
    AssembledConstants {
        k1: k,
        k2: 0.0,
        l1: l,
        l2: 0.0,
        m1: m,
        m2: 0.0,
        m3: 0.0,
        sigma_fold: 0.0,
    }
}

#[test]
fn zero_datum_stays_zero() {
    let g = Grid::new(4.0, 128).unwrap();
    let traj = evolve(&State::zeros(&g), SystemParams::default(), 1.0, 0.05, 4).unwrap();
    assert!(traj.states.iter().all(State::is_zero));
    assert_eq!(*traj.times.last().unwrap(), 1.0);
    let rep = phi_liapunov_check(&traj, -1.0, 4, 10.0, 1.0, 1.0).unwrap();
    assert!(rep.iter().all(|r| r.pass && r.lhs == 0.0 && r.rhs == 0.0));
}

#[test]
fn snapshots_and_flags() {
    let g = Grid::new(8.0, 256).unwrap();
    let st = wave(&g);
    let traj = evolve(
        &st,
        SystemParams {
            alpha: 0.0,
            beta: 2.5,
        },
        0.5,
        0.02,
        5,
    )
    .unwrap();
    assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(traj.times.len(), 6);
    assert_eq!(traj.times.len(), traj.diagnostics.len());
    assert!(!traj.globally_admissible && traj.admissible_datum);
    assert!(traj.states.iter().all(|s| s.grid() == &g));
}

#[test]
fn bad_step_arguments() {
    let g = Grid::new(8.0, 256).unwrap();
    let st = wave(&g);
    let p = SystemParams::default();
    let bound = cfl_bound(&st, p);
    assert!(matches!(
        step_rk4(&st, p, 1.01 * bound),
        Err(Error::StepSize { .. })
    ));
    assert!(matches!(step_rk4(&st, p, 0.0), Err(Error::StepSize { .. })));
    assert!(evolve(&st, p, -1.0, 0.01, 1).is_err());
    assert!(evolve(&st, p, 1.0, 0.01, 0).is_err());
}

#[test]
fn means_preserved_per_step() {
    let g = default_grid();
    let st = wave(&g).dealiased();
    let p = SystemParams {
        alpha: 0.8,
        beta: 1.0,
    };
    let next = step_rk4(&st, p, 0.02).unwrap();
    assert!((next.u.integral() - st.u.integral()).abs() < 1e-12);
    assert!((next.v.integral() - st.v.integral()).abs() < 1e-12);
}

#[test]
fn rk4_step_against_taylor() {
    let g = default_grid();
    let st = gaussian_pair(&g).dealiased();
    let p = SystemParams::default();
    let series = taylor_coeffs(&st, p, 6).unwrap();
    let pts: Vec<(f64, f64)> = [2e-3, 1e-3, 5e-4]
        .iter()
        .map(|&dt| {
            let err = step_rk4(&st, p, dt)
                .unwrap()
                .sub(&series.evaluate(dt).unwrap())
                .unwrap()
                .norm(2.0);
            (f64::ln(dt), err.ln())
        })
        .collect();
    let (slope, _) = linear_fit(&pts);
    assert!((slope - 5.0).abs() < 0.3, "slope {slope}");
}

#[test]
fn fourth_order_convergence_coarse() {
    let g = Grid::new(8.0, 256).unwrap();
    let st = wave(&g);
    let p = SystemParams::default();
    let end = |dt: f64| {
        evolve(&st, p, 1.0, dt, usize::MAX)
            .unwrap()
            .states
            .pop()
            .unwrap()
            .u
    };
    let (a, b, c) = (end(0.04), end(0.02), end(0.01));
    let ratio = a.sub(&b).unwrap().norm(2.0) / b.sub(&c).unwrap().norm(2.0);
    assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
}

#[test]
fn radius_calibration() {
    let g = default_grid();
    let r = radius_estimate(&Field::from_fn(&g, sech).unwrap()).unwrap();
    assert!(rel(r, PI / 2.0) < 0.05);
    let r = radius_estimate(&synthetic_spectrum(&g, 3.0, 0.8).unwrap()).unwrap();
    assert!((r - 0.8).abs() < 1e-3);
    let cap = radius_estimate(&gaussian(&g).unwrap()).unwrap();
    assert_eq!(cap, 16.0 * PI / 4.0);
    assert!(matches!(
        radius_estimate(&Field::zeros(&g)),
        Err(Error::IndeterminateRadius)
    ));
}

#[test]
fn radius_ignores_amplitude() {
    let g = default_grid();
    for f in [
        Field::from_fn(&g, sech).unwrap(),
        synthetic_spectrum(&g, 1.0, 1.1).unwrap(),
        wave(&g).u,
    ] {
        let a = radius_estimate(&f).unwrap();
        let b = radius_estimate(&f.scale(2.0)).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }
}

#[test]
fn sigma_curve_shape() {
    let g = default_grid();
    let st = wave(&g);
    let traj = evolve(&st, SystemParams::default(), 1.0, 0.02, 5).unwrap();
    let phi0 = phi_infinity(&st.dealiased(), -1.0, 12).unwrap();

    let track = strip_bound(&traj, -1.0, 0.0, 6, &flat(0.7, 0.3, 0.2)).unwrap();
    let first = &track.records[0];
    assert_eq!(first.sigma_t, -1.0);
    assert!(rel(first.log_r_t, phi0.ln()) < 1e-14);
    assert!(track
        .records
        .windows(2)
        .all(|w| w[1].sigma_t < w[0].sigma_t));
    assert!(track.records.iter().all(|r| r.exp_sigma_t > 0.0));
    assert!(track.all_hold());

    let still = strip_bound(&traj, -1.0, 0.0, 6, &flat(3.0, 0.0, 0.0)).unwrap();
    assert!(still.records.iter().all(|r| r.sigma_t == -1.0));
    let k_zero = strip_bound(&traj, -1.0, 0.0, 6, &flat(0.0, 0.5, 0.0)).unwrap();
    let last = k_zero.records.last().unwrap();
    assert!(rel(last.sigma_t, -1.0 - 0.5 * phi0.sqrt()) < 1e-12);
}

#[test]
fn strip_bound_preconditions() {
    let g = default_grid();
    let traj = evolve(&wave(&g), SystemParams::default(), 0.2, 0.02, 5).unwrap();
    let c = assembled_constants(SystemParams::default(), 0.0);
    assert!(strip_bound(&traj, 0.5, 0.0, 6, &c).is_err());

    let f = synthetic_spectrum(&g, 1.0, 0.3).unwrap();
    let slow = evolve(
        &State::new(f.scale(0.01), Field::zeros(&g)).unwrap(),
        SystemParams::default(),
        0.1,
        0.02,
        5,
    )
    .unwrap();
    assert!(matches!(
        strip_bound(&slow, 0.0, 0.0, 6, &c),
        Err(Error::InadmissibleDatum(_))
    ));
}

#[test]
fn liapunov_starts_with_equality() {
    let g = default_grid();
    let traj = evolve(&wave(&g), SystemParams::default(), 0.5, 0.02, 5).unwrap();
    let rep = phi_liapunov_check(&traj, -1.0, 4, 2.0, 1.0, 1.0).unwrap();
    assert_eq!(rep[0].lhs, rep[0].rhs);
    assert!(rep.iter().all(|r| r.pass));
}

#[test]
fn measured_radius_stable_under_refinement() {
    let p = SystemParams::default();
    let radii: Vec<Vec<f64>> = [1024, 2048]
        .iter()
        .map(|&n| {
            let g = Grid::new(16.0, n).unwrap();
            evolve(&wave(&g), p, 2.0, 0.02, 25)
                .unwrap()
                .states
                .iter()
                .map(|s| state_radius(s).unwrap())
                .collect()
        })
        .collect();
    for (a, b) in radii[0].iter().zip(&radii[1]) {
        assert!(rel(*a, *b) <= 0.02, "{a} vs {b}");
    }
}
