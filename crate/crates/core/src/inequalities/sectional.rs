//! The eight term-by-term estimates behind the Liapunov inequality and their
//! assembly.
//!
//! Each left side is a weighted pairing sum
//!
//! ```text
//! sum_{j=1}^{m+1} e^{2(j-1) sigma} / (j!)^2 <u^(j), d^j g>_2    (u terms)
//! sum_{j=0}^{m}   e^{2 j sigma}    / (j!)^2 <v^(j), d^j g>_2    (v terms)
//! ```
//!
//! with `g` one of `u u_x`, `Lambda^-2 d u`, `Lambda^-2 d u^2`,
//! `Lambda^-2 d u_x^2`, `Lambda^-2 d v`, `Lambda^-2 d v^2` (u terms) or
//! `u_x`, `d(u v)` (v terms).

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::Result;
use crate::norms::phi;
use crate::system::{pairing, u_pairing, v_pairing, State, SystemParams};

use super::CheckReport;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AssembledConstants {
    pub k1: f64,
    pub k2: f64,
    pub l1: f64,
    pub l2: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// sigma at which the `e^{2 sigma}` factors of the K part were frozen.
    pub sigma_fold: f64,
}

impl AssembledConstants {
    /// `(K1 + K2 n) Phi + (L1 + L2 e^s) sqrt(Phi) dPhi + (M1 + (M2 + M3 e^{2s}) n) dPhi`.
    pub fn bound(&self, n3: f64, phi: f64, dphi: f64, sigma: f64) -> f64 {
        (self.k1 + self.k2 * n3) * phi
            + (self.l1 + self.l2 * sigma.exp()) * phi.sqrt() * dphi
            + (self.m1 + (self.m2 + self.m3 * (2.0 * sigma).exp()) * n3) * dphi
    }
}

/// Weights of the eight estimates in the pairing, `|coefficient|` of each term.
pub fn sectional_weights(p: SystemParams) -> [f64; 8] {
    [
        p.beta.abs(),
        p.alpha.abs(),
        (3.0 - p.beta).abs() / 2.0,
        p.beta.abs() / 2.0,
        1.0,
        0.5,
        1.0,
        1.0,
    ]
}

/// Collects the weighted estimates into the `K, L, M` shape. Mixed norms
/// `a |u|_3 + b |v|_3` are bounded by `(a + b)(|u|_3 + |v|_3)`.
pub fn assembled_constants(p: SystemParams, sigma_fold: f64) -> AssembledConstants {
    let b = p.beta.abs();
    let c = (3.0 - p.beta).abs();
    let e2 = (2.0 * sigma_fold).exp();
    let r3 = PI / 3f64.sqrt();
    AssembledConstants {
        k1: 2.0 * p.alpha.abs() + 1.0 + 4.0,
        k2: 96.0 * b + 96.0 * c + 32.0 * b + 12.0 + 84.0 + 24.0 * e2,
        l1: 8.0 * PI / 6f64.sqrt(),
        l2: r3 * (32.0 * b + 32.0 * c + 16.0 * b + 16.0 * (1.0 + SQRT_2)),
        m1: 2.0,
        m2: 16.0 * b + 16.0 * c + 8.0 * b + 21.0,
        m3: 4.0,
        sigma_fold,
    }
}

/// The eight estimates, in order.
pub fn sectional_bounds(st: &State, sigma: f64, m: usize) -> Result<[CheckReport; 8]> {
    let (u, v) = (&st.u, &st.v);
    let ux = u.derivative(1)?;
    let uu = u.mul_dealiased(u)?;
    let uxux = ux.mul_dealiased(&ux)?;
    let vv = v.mul_dealiased(v)?;
    let uv = u.mul_dealiased(v)?;

    let g1 = u.mul_dealiased(&ux)?;
    let g2 = u.helmholtz_inv(1)?;
    let g3 = uu.helmholtz_inv(1)?;
    let g4 = uxux.helmholtz_inv(1)?;
    let g5 = v.helmholtz_inv(1)?;
    let g6 = vv.helmholtz_inv(1)?;
    let g8 = uv.derivative(1)?;

    let lhs = [
        u_pairing(u, &g1, sigma, m)?.abs(),
        u_pairing(u, &g2, sigma, m)?.abs(),
        u_pairing(u, &g3, sigma, m)?.abs(),
        u_pairing(u, &g4, sigma, m)?.abs(),
        u_pairing(u, &g5, sigma, m)?.abs(),
        u_pairing(u, &g6, sigma, m)?.abs(),
        v_pairing(v, &ux, sigma, m)?.abs(),
        v_pairing(v, &g8, sigma, m)?.abs(),
    ];
    let rhs = sectional_rhs(st, sigma, m)?;
    Ok(std::array::from_fn(|i| {
        CheckReport::inequality(format!("estimate{}", i + 1), lhs[i], rhs[i])
    }))
}

/// Right sides of the eight estimates.
fn sectional_rhs(st: &State, sigma: f64, m: usize) -> Result<[f64; 8]> {
    let ph = phi(st, sigma, m)?;
    let (f, df) = (ph.phi, ph.dphi);
    let rf = f.sqrt();
    let nu = st.u.norm(3.0);
    let nv = st.v.norm(3.0);
    let nv2 = st.v.norm(2.0);
    let es = sigma.exp();
    let e2 = (2.0 * sigma).exp();
    let r3 = PI / 3f64.sqrt();
    let r6 = PI / 6f64.sqrt();
    Ok([
        96.0 * nu * f + (16.0 * nu + 32.0 * r3 * es * rf) * df,
        2.0 * f,
        192.0 * nu * f + (32.0 * nu + 64.0 * r3 * es * rf) * df,
        64.0 * nu * f + (16.0 * nu + 32.0 * r3 * es * rf) * df,
        f,
        (16.0 * nu + 8.0 * nv2) * f + 16.0 * r6 * rf * df,
        4.0 * f + 2.0 * df,
        ((66.0 + 16.0 * e2) * nu + (18.0 + 8.0 * e2) * nv) * f
            + 16.0 * r3 * (1.0 + SQRT_2) * es * rf * df
            + (8.0 * nu + (4.0 * e2 + 13.0) * nv) * df,
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct MainEstimate {
    pub report: CheckReport,
    pub sectional: Vec<CheckReport>,
    /// `sum w_i |sectional lhs_i|`, sandwiched between the two sides.
    pub triangle: f64,
    pub constants: AssembledConstants,
    /// The assembled bound evaluated at this state.
    pub shaped_rhs: f64,
}

/// `|<F, D Phi>|` against the weighted sum of the sectional right sides.
pub fn main_estimate(st: &State, p: SystemParams, sigma: f64, m: usize) -> Result<MainEstimate> {
    let lhs = pairing(st, p, sigma, m)?.abs();
    let sectional = sectional_bounds(st, sigma, m)?;
    let w = sectional_weights(p);
    let rhs: f64 = w.iter().zip(&sectional).map(|(w, r)| w * r.rhs).sum();
    let triangle: f64 = w.iter().zip(&sectional).map(|(w, r)| w * r.lhs).sum();
    let constants = assembled_constants(p, sigma);
    let ph = phi(st, sigma, m)?;
    let n3 = st.u.norm(3.0) + st.v.norm(3.0);
    Ok(MainEstimate {
        report: CheckReport::inequality("main_estimate", lhs, rhs),
        sectional: sectional.to_vec(),
        triangle,
        constants,
        shaped_rhs: constants.bound(n3, ph.phi, ph.dphi, sigma),
    })
}
