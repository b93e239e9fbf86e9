//! Lifespan of the holomorphic solution from the abstract Cauchy-Kowalevsky
//! theorem.
//!
//! With `R = |(u0,v0)|_{(1,s+1)}` (sum of the component norms),
//! `coef = 2|beta| + |3-beta| + 2` and `C'_s = max(C_s, C_{s+1})`:
//!
//! ```text
//! L = C'_s coef (R0 + R) + |alpha| + 2
//! M = C_{s+1} / 2 coef R0^2 + (|alpha| + 2) R0
//! T = R / (16 L R + 8 M) = 1 / (gamma1 R + gamma2)
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{e_norm, EParams, DEFAULT_K_MAX};
use crate::system::{algebra_constants, State, SystemParams};

#[derive(Clone, Debug, Serialize)]
pub struct LifespanReport {
    pub s: f64,
    /// Scale parameter of the norm; 1 for the plain theorem.
    pub delta: f64,
    pub r: f64,
    pub l: f64,
    pub m: f64,
    pub t: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma1_fit: f64,
    pub gamma2_fit: f64,
    pub c_s: f64,
    pub big_c_s: f64,
    pub big_c_s1: f64,
    pub big_c_prime: f64,
    /// Additive constant in L: `|alpha| + 2` here, `|alpha| + 1` in the scaled variant.
    pub alpha_offset: f64,
    pub notes: Vec<String>,
}

/// `(c_s, C_s, C_{s+1}, C'_s)`. An override replaces `c_s` only.
fn constants(s: f64, c_s: Option<f64>) -> Result<(f64, f64, f64, f64)> {
    let a = algebra_constants(s, c_s)?;
    let big_s1 = algebra_constants(s + 1.0, None)?.big_c_s;
    Ok((a.c_s, a.big_c_s, big_s1, a.big_c_s.max(big_s1)))
}

/// `|(u,v)|_{(delta,s+1)}`, refusing data whose supremum is still climbing at the cut.
pub fn pair_norm(st: &State, delta: f64, s: f64) -> Result<f64> {
    let p = EParams::new(delta, s + 1.0, DEFAULT_K_MAX)?;
    let mut total = 0.0;
    for f in [&st.u, &st.v] {
        let e = e_norm(f, p)?;
        if !e.value.is_finite() {
            return Err(Error::InadmissibleDatum(format!(
                "analytic norm at delta = {delta} is not finite"
            )));
        }
        if e.value > 0.0 && e.argmax == p.k_max {
            return Err(Error::InadmissibleDatum(format!(
                "analytic norm at delta = {delta} still growing at order {}",
                p.k_max
            )));
        }
        total += e.value;
    }
    Ok(total)
}

fn check_s(s: f64) -> Result<()> {
    if s >= 2.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("need s >= 2, got {s}")))
    }
}

/// `(L, M)` at datum norm `R0` and radius `R`.
pub fn lifespan_constants(st0: &State, p: SystemParams, s: f64, r: f64) -> Result<(f64, f64)> {
    lifespan_constants_with(st0, p, s, r, None)
}

pub fn lifespan_constants_with(
    st0: &State,
    p: SystemParams,
    s: f64,
    r: f64,
    c_s: Option<f64>,
) -> Result<(f64, f64)> {
    check_s(s)?;
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be >= 0, got {r}"
        )));
    }
    let r0 = pair_norm(st0, 1.0, s)?;
    let (_, _, big_s1, big_prime) = constants(s, c_s)?;
    Ok(lm_from_norm(p, r0, r, big_s1, big_prime))
}

fn lm_from_norm(p: SystemParams, r0: f64, r: f64, big_s1: f64, big_prime: f64) -> (f64, f64) {
    let coef = p.quadratic_coef();
    let a2 = p.alpha.abs() + 2.0;
    let l = big_prime * coef * (r0 + r) + a2;
    let m = big_s1 / 2.0 * coef * r0 * r0 + a2 * r0;
    (l, m)
}

pub fn lifespan_t(st0: &State, p: SystemParams, s: f64) -> Result<LifespanReport> {
    lifespan_t_with(st0, p, s, None)
}

pub fn lifespan_t_with(
    st0: &State,
    p: SystemParams,
    s: f64,
    c_s: Option<f64>,
) -> Result<LifespanReport> {
    check_s(s)?;
    let r = pair_norm(st0, 1.0, s)?;
    if r == 0.0 {
        return Err(Error::DegenerateDatum);
    }
    let (c, big_s, big_s1, big_prime) = constants(s, c_s)?;
    let (l, m) = lm_from_norm(p, r, r, big_s1, big_prime);
    let t = r / (16.0 * l * r + 8.0 * m);
    let coef = p.quadratic_coef();
    let gamma1 = (32.0 * big_prime + 4.0 * big_s1) * coef;
    let gamma2 = 24.0 * (p.alpha.abs() + 2.0);

    // two-point fit of (16 L R + 8 M) / R = gamma1 R + gamma2 on data rescaled
    // to R = 1 and R = 2, where neither term swamps the other
    let sample = |target: f64| -> Result<(f64, f64)> {
        let scaled = st0.scale(target / r);
        let rr = pair_norm(&scaled, 1.0, s)?;
        let (l, m) = lifespan_constants_with(&scaled, p, s, rr, c_s)?;
        Ok((rr, (16.0 * l * rr + 8.0 * m) / rr))
    };
    let (ra, ya) = sample(1.0)?;
    let (rb, yb) = sample(2.0)?;
    let gamma1_fit = (yb - ya) / (rb - ra);
    let gamma2_fit = ya - gamma1_fit * ra;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    if rel(gamma1_fit, gamma1) > 1e-8 || rel(gamma2_fit, gamma2) > 1e-8 {
        return Err(Error::Inconsistent(format!(
            "fitted (gamma1, gamma2) = ({gamma1_fit}, {gamma2_fit}) vs closed form ({gamma1}, {gamma2})"
        )));
    }
    Ok(LifespanReport {
        s,
        delta: 1.0,
        r,
        l,
        m,
        t,
        gamma1,
        gamma2,
        gamma1_fit,
        gamma2_fit,
        c_s: c,
        big_c_s: big_s,
        big_c_s1: big_s1,
        big_c_prime: big_prime,
        alpha_offset: p.alpha.abs() + 2.0,
        notes: Vec::new(),
    })
}

/// Lifespan in the rescaled scale `delta in (0, 1]`:
///
/// ```text
/// L = C'_s / Delta coef (R + R) + |alpha| + 1
/// M = C_{s+1} / (2 Delta) coef R^2 + (|alpha| + 2) / Delta R
/// ```
pub fn lifespan_scaled_variant(
    st0: &State,
    p: SystemParams,
    s: f64,
    delta: f64,
) -> Result<LifespanReport> {
    check_s(s)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "scale must lie in (0, 1], got {delta}"
        )));
    }
    let r = pair_norm(st0, delta, s)?;
    if r == 0.0 {
        return Err(Error::DegenerateDatum);
    }
    let (c, big_s, big_s1, big_prime) = constants(s, None)?;
    let coef = p.quadratic_coef();
    let a = p.alpha.abs();
    let l = big_prime / delta * coef * (r + r) + a + 1.0;
    let m = big_s1 / (2.0 * delta) * coef * r * r + (a + 2.0) / delta * r;
    let t = r / (16.0 * l * r + 8.0 * m);
    let gamma1 = (32.0 * big_prime + 4.0 * big_s1) * coef / delta;
    let gamma2 = 16.0 * (a + 1.0) + 8.0 * (a + 2.0) / delta;
    Ok(LifespanReport {
        s,
        delta,
        r,
        l,
        m,
        t,
        gamma1,
        gamma2,
        gamma1_fit: gamma1,
        gamma2_fit: gamma2,
        c_s: c,
        big_c_s: big_s,
        big_c_s1: big_s1,
        big_c_prime: big_prime,
        alpha_offset: a + 1.0,
        notes: vec![
            "additive constant in L is |alpha|+1 here but |alpha|+2 in the unscaled lifespan; both kept as stated".into(),
        ],
    })
}
