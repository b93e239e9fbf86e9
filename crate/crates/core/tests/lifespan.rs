mod common;

use std::f64::consts::PI;

use chlab_core::fixtures::{sech, synthetic_spectrum};
use chlab_core::lifespan::*;
use chlab_core::spectral::Field;
use chlab_core::system::algebra_constants;
use chlab_core::{Error, State, SystemParams};
use common::*;

#[test]
fn zero_datum_constants() {
    let g = default_grid();
    let z = State::zeros(&g);
    let (l, m) = lifespan_constants(
        &z,
        SystemParams {
            alpha: -1.5,
            beta: 1.0,
        },
        2.0,
        0.0,
    )
    .unwrap();
    assert_eq!((l, m), (3.5, 0.0));
    assert!(matches!(
        lifespan_t(&z, SystemParams::default(), 2.0),
        Err(Error::DegenerateDatum)
    ));
}

#[test]
fn constants_by_substitution() {
    let g = default_grid();
    let st = gaussian_pair(&g);
    let r0 = pair_norm(&st, 1.0, 2.0).unwrap();
    // independent oracle: both components are e^{-x^2}, sup at k = 5
    assert!(rel(r0, 1054.5105217561484) < 1e-9);
    let c2 = algebra_constants(2.0, None).unwrap().big_c_s;
    let c3 = algebra_constants(3.0, None).unwrap().big_c_s;
    let cp = c2.max(c3);
    assert!(rel(c3, 18.0 * (65.0 * 3.0 * PI / 8.0).sqrt()) < 1e-14);
    let r = 0.75 * r0;
    for (p, coef) in [
        (SystemParams::default(), 6.0),
        (
            SystemParams {
                alpha: 0.3,
                beta: 3.0,
            },
            8.0,
        ),
    ] {
        let (l, m) = lifespan_constants(&st, p, 2.0, r).unwrap();
        let a2 = p.alpha.abs() + 2.0;
        assert!(rel(l, cp * coef * (r0 + r) + a2) < 1e-14);
        assert!(rel(m, c3 / 2.0 * coef * r0 * r0 + a2 * r0) < 1e-14);
    }
}

#[test]
fn report_identities() {
    let g = default_grid();
    let st = gaussian_pair(&g);
    let rep = lifespan_t(&st, SystemParams::default(), 2.0).unwrap();
    assert!(rel(rep.t, rep.r / (16.0 * rep.l * rep.r + 8.0 * rep.m)) < 1e-12);
    assert!((rep.t * (rep.gamma1 * rep.r + rep.gamma2) - 1.0).abs() < 1e-12);
    assert!(
        rel(
            16.0 * rep.l * rep.r + 8.0 * rep.m,
            (rep.gamma1 * rep.r + rep.gamma2) * rep.r
        ) < 1e-10
    );
    assert_eq!(rep.gamma2, 48.0);
    let c3 = 18.0 * (65.0 * 3.0 * PI / 8.0).sqrt();
    assert!(rel(rep.gamma1, 36.0 * c3 * 6.0) < 1e-14);
    assert!(rel(rep.gamma1_fit, rep.gamma1) < 1e-8 && rel(rep.gamma2_fit, rep.gamma2) < 1e-8);
}

#[test]
fn homogeneity_and_limits() {
    let g = default_grid();
    let st = gaussian_pair(&g);
    let p = SystemParams::default();
    let base = lifespan_t(&st, p, 2.0).unwrap();
    let mut last = f64::INFINITY;
    for e in -10..=6 {
        let lambda = 10f64.powi(e);
        let rep = lifespan_t(&st.scale(lambda), p, 2.0).unwrap();
        assert!(rel(rep.r, lambda * base.r) < 1e-14);
        assert!(rep.t < last);
        last = rep.t;
    }
    let tiny = lifespan_t(&st.scale(1e-10), p, 2.0).unwrap();
    assert!((tiny.t * 48.0 - 1.0).abs() < 1e-4);
    let huge = lifespan_t(&st.scale(1e6), p, 2.0).unwrap();
    assert!((huge.t * huge.gamma1 * huge.r - 1.0).abs() < 1e-6);
}

#[test]
fn larger_product_constant_shortens_lifespan() {
    let g = default_grid();
    let st = gaussian_pair(&g);
    let p = SystemParams::default();
    let base = lifespan_t(&st, p, 2.0).unwrap();
    let mut last = base.t;
    for c in [12.0, 20.0, 40.0] {
        let rep = lifespan_t_with(&st, p, 2.0, Some(c)).unwrap();
        assert!(rep.t <= last);
        last = rep.t;
    }
    assert!(last < base.t);
}

#[test]
fn scaled_variant() {
    let g = default_grid();
    let st = gaussian_pair(&g);
    let p = SystemParams {
        alpha: 0.7,
        beta: 1.0,
    };
    let plain = lifespan_t(&st, p, 2.0).unwrap();
    let one = lifespan_scaled_variant(&st, p, 2.0, 1.0).unwrap();
    assert!(rel(one.l, plain.l - 1.0) < 1e-14);
    assert!(rel(one.m, plain.m) < 1e-14);
    assert!((one.alpha_offset - (plain.alpha_offset - 1.0)).abs() < 1e-15);

    let f = Field::from_fn(&g, sech).unwrap();
    let sst = State::new(f.clone(), f).unwrap();
    let half = lifespan_scaled_variant(&sst, p, 2.0, 0.5).unwrap();
    let r = half.r;
    let cp_part = half.l - (p.alpha.abs() + 1.0);
    // doubled relative to Delta = 1 at the same norm
    assert!(
        rel(
            cp_part,
            2.0 * half.big_c_prime * p.quadratic_coef() * 2.0 * r
        ) < 1e-13
    );
    assert!(half.t > 0.0 && half.t.is_finite());
    assert!(lifespan_scaled_variant(&sst, p, 2.0, 1.5).is_err());
}

#[test]
fn slow_decay_is_inadmissible() {
    let g = default_grid();
    let f = synthetic_spectrum(&g, 1.0, 0.5).unwrap();
    let st = State::new(f.clone(), f).unwrap();
    assert!(matches!(
        pair_norm(&st, 1.0, 2.0),
        Err(Error::InadmissibleDatum(_))
    ));
    assert!(matches!(
        lifespan_t(&st, SystemParams::default(), 2.0),
        Err(Error::InadmissibleDatum(_))
    ));
    assert!(lifespan_t(&gaussian_pair(&g), SystemParams::default(), 1.5).is_err());
}
