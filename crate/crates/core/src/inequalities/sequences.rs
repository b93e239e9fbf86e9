//! Trilinear sums over non-negative sequences `a_1..a_{m+1}`, `b_0..b_m`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::Result;
use crate::norms::{phi, seq_quantities, SeqQuadruple};
use crate::system::State;

use super::CheckReport;

/// `pi / sqrt(6)`, i.e. `sqrt(sum 1/l^2)`.
pub const AB_CONSTANT: f64 = 1.282_549_830_161_864;

/// The seven double-sum bounds. `q.a[i]` holds `a_{i+1}` and `q.b[i]` holds `b_i`.
pub fn check_ab(q: &SeqQuadruple) -> Vec<CheckReport> {
    let m = q.m();
    let a = |k: usize| q.a_at(k);
    let b = |k: usize| q.b_at(k);
    let c = PI / 6f64.sqrt();
    let (big_a, at, big_b, bt) = (q.a_norm, q.a_tilde, q.b_norm, q.b_tilde);
    let r = |x: usize, y: usize| x as f64 / y as f64;

    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for j in 3..=m + 1 {
        for l in 2..j {
            s1 += a(j) * a(l) * a(j - l);
            s2 += r(j - l + 1, l) * a(j) * a(l - 1) * a(j - l + 1);
        }
    }
    let mut s3 = 0.0;
    for j in 2..=m + 1 {
        for l in 1..j {
            s3 += a(j) * b(l) * b(j - l - 1) / j as f64;
        }
    }
    let mut s4 = 0.0;
    let mut s5 = 0.0;
    for j in 2..=m {
        for l in 2..=j {
            s4 += a(l) * b(j) * b(j - l);
            s5 += r(j - l + 1, l) * a(l - 1) * b(j) * b(j - l + 1);
        }
    }
    let mut s6 = 0.0;
    let mut s7 = 0.0;
    for j in 3..=m {
        for l in 2..j {
            s6 += a(j - l) * b(j) * b(l);
            s7 += r(j - l + 1, l) * a(j - l + 1) * b(j) * b(l - 1);
        }
    }

    vec![
        CheckReport::inequality("ab1", s1, c * big_a * at * at),
        CheckReport::inequality("ab2", s2, c * big_a * at * at),
        CheckReport::inequality("ab3", s3, c * at * big_b * bt),
        CheckReport::inequality("ab4", s4, c * at * big_b * bt),
        CheckReport::inequality("ab5", s5, c * big_a * bt * bt),
        CheckReport::inequality("ab6", s6, c * big_a * bt * bt),
        CheckReport::inequality("ab7", s7, c * at * big_b * bt),
    ]
}

/// Links between the sequence norms and the Liapunov functional.
pub fn check_seq_state(st: &State, sigma: f64, m: usize) -> Result<Vec<CheckReport>> {
    let q = seq_quantities(st, sigma, m)?;
    let ph = phi(st, sigma, m)?;
    let es = sigma.exp();
    let first_lhs = (-2.0 * sigma).exp() * q.a_norm * q.a_tilde * q.a_tilde;
    let first_lhs = if first_lhs.is_nan() { 0.0 } else { first_lhs };
    Ok(vec![
        CheckReport::inequality(
            "seq_state_first",
            first_lhs,
            2.0 * SQRT_2 * es * ph.phi1.sqrt() * ph.dphi_u,
        ),
        CheckReport::inequality(
            "seq_state_second",
            q.a_tilde * q.b_norm * q.b_tilde,
            2.0 * es * ph.phi2.sqrt() * (ph.dphi_u * ph.dphi_v).sqrt(),
        ),
        CheckReport::equality(
            "seq_state_equality",
            q.a_norm * q.b_tilde * q.b_tilde,
            SQRT_2 * es * ph.phi1.sqrt() * ph.dphi_v,
            1e-10,
        ),
    ])
}
