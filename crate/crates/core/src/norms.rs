//! Analytic norms built from derivative norms.
//!
//! Kato-Masuda norm:
//!
//! ```text
//! |f|_{sigma,s}^2 = sum_j e^{2 j sigma} / (j!)^2 |f^(j)|_s^2
//! ```
//!
//! Analytic-class norm:
//!
//! ```text
//! |f|_{(delta,s)} = sup_k delta^k (k+1)^2 / k! |f^(k)|_s
//! ```
//!
//! The Liapunov functional pairs both components at a fixed truncation `m`:
//!
//! ```text
//! Phi^1 = 1/2 sum_{j=1}^{m+1} e^{2(j-1) sigma} / (j!)^2 |u^(j)|_2^2
//! Phi^2 = 1/2 sum_{j=0}^{m}   e^{2 j sigma}    / (j!)^2 |v^(j)|_2^2
//! ```
//!
//! All weights are formed in log space; a vanishing sigma multiplier is
//! treated as exactly zero so `sigma = -inf` stays finite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::Field;
use crate::system::State;

/// Sobolev index, non-negative.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s >= 0.0 {
            Ok(SobolevIndex(s))
        } else {
            Err(Error::InvalidParameter(format!(
                "Sobolev index must be >= 0, got {s}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GevreyParams {
    pub sigma: f64,
    pub s: SobolevIndex,
    /// Highest derivative order kept in the series.
    pub j_max: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EParams {
    pub delta: f64,
    pub s: SobolevIndex,
    pub k_max: usize,
}

impl EParams {
    pub fn new(delta: f64, s: f64, k_max: usize) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1], got {delta}"
            )));
        }
        if !(s >= 2.0) {
            return Err(Error::InvalidParameter(format!("need s >= 2, got {s}")));
        }
        Ok(EParams {
            delta,
            s: SobolevIndex::new(s)?,
            k_max,
        })
    }
}

/// Default truncation of the supremum in the analytic-class norm.
pub const DEFAULT_K_MAX: usize = 12;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KmNorm {
    pub value: f64,
    /// Last retained term over the whole sum; at least 1 when the terms were
    /// still growing at the cut.
    pub tail_ratio: f64,
}

impl KmNorm {
    pub fn diverging(&self) -> bool {
        self.tail_ratio >= 1.0
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ENorm {
    pub value: f64,
    pub argmax: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhiValue {
    pub phi1: f64,
    pub phi2: f64,
    pub phi: f64,
    /// u part of the sigma derivative.
    pub dphi_u: f64,
    /// v part of the sigma derivative.
    pub dphi_v: f64,
    pub dphi: f64,
}

/// Sequences and their weighted norms used by the trilinear sum bounds.
#[derive(Clone, Debug, Serialize)]
pub struct SeqQuadruple {
    /// `a[i]` holds `a_{i+1}`, `i = 0..=m`.
    pub a: Vec<f64>,
    /// `b[i]` holds `b_i`, `i = 0..=m`.
    pub b: Vec<f64>,
    pub a_norm: f64,
    pub a_tilde: f64,
    pub b_norm: f64,
    pub b_tilde: f64,
}

impl SeqQuadruple {
    /// Builds the quadruple from raw sequences of equal length `m+1`.
    pub fn from_sequences(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "sequences must share a non-zero length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if let Some(index) = a.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::NegativeEntry { index });
        }
        if let Some(index) = b.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::NegativeEntry { index });
        }
        let a_sq: f64 = a.iter().map(|x| x * x).sum();
        let a_tilde_sq: f64 = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, x)| (i + 1) as f64 * x * x)
            .sum();
        let b_sq: f64 = b.iter().map(|x| x * x).sum();
        let b_tilde_sq: f64 = b.iter().enumerate().map(|(i, x)| i as f64 * x * x).sum();
        Ok(SeqQuadruple {
            a,
            b,
            a_norm: a_sq.sqrt(),
            a_tilde: a_tilde_sq.sqrt(),
            b_norm: b_sq.sqrt(),
            b_tilde: b_tilde_sq.sqrt(),
        })
    }

    pub fn m(&self) -> usize {
        self.a.len() - 1
    }

    /// `a_k`, 1-based.
    pub fn a_at(&self, k: usize) -> f64 {
        self.a[k - 1]
    }

    pub fn b_at(&self, k: usize) -> f64 {
        self.b[k]
    }
}

/// `ln(j!)`.
pub fn ln_factorial(j: usize) -> f64 {
    (2..=j).map(|i| (i as f64).ln()).sum()
}

/// `ln(e^{2 p sigma} / (j!)^2)`; a zero multiplier contributes nothing even at
/// `sigma = -inf`.
pub fn log_weight(p: usize, sigma: f64, j: usize) -> f64 {
    let e = if p == 0 { 0.0 } else { 2.0 * p as f64 * sigma };
    e - 2.0 * ln_factorial(j)
}

/// `e^{2 p sigma} / (j!)^2 * x` evaluated without forming the weight.
pub fn weighted(p: usize, sigma: f64, j: usize, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (log_weight(p, sigma, j) + x.ln()).exp()
}

fn check_order(f: &Field, j: usize) -> Result<()> {
    let limit = f.grid().order_limit();
    if j > limit {
        Err(Error::OrderOverflow { order: j, limit })
    } else {
        Ok(())
    }
}

/// Kato-Masuda norm truncated at `j_max`.
pub fn km_norm(f: &Field, p: GevreyParams) -> Result<KmNorm> {
    if p.sigma.is_nan() {
        return Err(Error::InvalidParameter("sigma is NaN".into()));
    }
    check_order(f, p.j_max)?;
    let norms = f.deriv_norms_sq(p.j_max, p.s.get());
    let terms: Vec<f64> = norms
        .iter()
        .enumerate()
        .map(|(j, &n)| weighted(j, p.sigma, j, n))
        .collect();
    let total: f64 = terms.iter().sum();
    if total == 0.0 {
        return Ok(KmNorm {
            value: 0.0,
            tail_ratio: 0.0,
        });
    }
    let mut tail_ratio = terms[p.j_max] / total;
    if p.j_max >= 3 && terms[p.j_max - 3..].windows(2).all(|w| w[1] > w[0]) {
        tail_ratio = tail_ratio.max(1.0);
    }
    Ok(KmNorm {
        value: total.sqrt(),
        tail_ratio,
    })
}

/// Analytic-class norm with the supremum truncated at `k_max`.
pub fn e_norm(f: &Field, p: EParams) -> Result<ENorm> {
    check_order(f, p.k_max)?;
    let norms = f.deriv_norms_sq(p.k_max, p.s.get());
    let ln_delta = p.delta.ln();
    let mut best = ENorm {
        value: 0.0,
        argmax: 0,
    };
    for (k, &n) in norms.iter().enumerate() {
        if n == 0.0 {
            continue;
        }
        let kk = k as f64;
        let ln_term = kk * ln_delta + 2.0 * (kk + 1.0).ln() - ln_factorial(k) + 0.5 * n.ln();
        let term = ln_term.exp();
        if term > best.value {
            best = ENorm {
                value: term,
                argmax: k,
            };
        }
    }
    Ok(best)
}

/// Liapunov functional and its sigma derivative at truncation `m`.
pub fn phi(st: &State, sigma: f64, m: usize) -> Result<PhiValue> {
    if sigma.is_nan() {
        return Err(Error::InvalidParameter("sigma is NaN".into()));
    }
    check_order(&st.u, m + 2)?;
    let nu = st.u.deriv_norms_sq(m + 1, 2.0);
    let nv = st.v.deriv_norms_sq(m, 2.0);
    let mut phi1 = 0.0;
    let mut dphi_u = 0.0;
    for j in 1..=m + 1 {
        let t = weighted(j - 1, sigma, j, nu[j]);
        phi1 += 0.5 * t;
        dphi_u += (j - 1) as f64 * t;
    }
    let mut phi2 = 0.0;
    let mut dphi_v = 0.0;
    for j in 0..=m {
        let t = weighted(j, sigma, j, nv[j]);
        phi2 += 0.5 * t;
        dphi_v += j as f64 * t;
    }
    Ok(PhiValue {
        phi1,
        phi2,
        phi: phi1 + phi2,
        dphi_u,
        dphi_v,
        dphi: dphi_u + dphi_v,
    })
}

/// Untruncated Liapunov functional through the Kato-Masuda identity
/// `Phi_inf = 1/2 e^{-2 sigma0} (|u|_{sigma0,2}^2 - |u|_2^2) + 1/2 |v|_{sigma0,2}^2`.
pub fn phi_infinity(st: &State, sigma0: f64, j_max: usize) -> Result<f64> {
    Ok(phi_infinity_with_tail(st, sigma0, j_max)?.0)
}

/// [`phi_infinity`] together with the larger of the two tail ratios.
pub fn phi_infinity_with_tail(st: &State, sigma0: f64, j_max: usize) -> Result<(f64, f64)> {
    let s = SobolevIndex::new(2.0)?;
    let p = GevreyParams {
        sigma: sigma0,
        s,
        j_max,
    };
    let ku = km_norm(&st.u, p)?;
    let kv = km_norm(&st.v, p)?;
    if ku.diverging() || kv.diverging() {
        return Err(Error::InadmissibleDatum(format!(
            "Kato-Masuda series does not settle by order {j_max} at sigma0 = {sigma0}"
        )));
    }
    let u0 = st.u.norm_sq(2.0);
    let du = (ku.value * ku.value - u0).max(0.0);
    let value = 0.5 * (-2.0 * sigma0).exp() * du + 0.5 * kv.value * kv.value;
    Ok((value, ku.tail_ratio.max(kv.tail_ratio)))
}

/// `a_k = e^{k sigma} |u^(k)|_2 / k!` for `k = 1..=m+1` and
/// `b_k = e^{k sigma} |v^(k)|_2 / k!` for `k = 0..=m`.
pub fn seq_quantities(st: &State, sigma: f64, m: usize) -> Result<SeqQuadruple> {
    if sigma.is_nan() {
        return Err(Error::InvalidParameter("sigma is NaN".into()));
    }
    check_order(&st.u, m + 1)?;
    let nu = st.u.deriv_norms_sq(m + 1, 2.0);
    let nv = st.v.deriv_norms_sq(m, 2.0);
    let a = (1..=m + 1)
        .map(|k| weighted(k, sigma, k, nu[k]).sqrt())
        .collect();
    let b = (0..=m)
        .map(|k| weighted(k, sigma, k, nv[k]).sqrt())
        .collect();
    SeqQuadruple::from_sequences(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn log_weight_at_minus_infinity() {
        assert_eq!(log_weight(0, f64::NEG_INFINITY, 3), -2.0 * 6f64.ln());
        assert_eq!(weighted(2, f64::NEG_INFINITY, 2, 5.0), 0.0);
        assert!((weighted(0, f64::NEG_INFINITY, 0, 5.0) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn zero_field() {
        let g = Grid::new(2.0, 64).unwrap();
        let z = Field::zeros(&g);
        let p = GevreyParams {
            sigma: 0.0,
            s: SobolevIndex::new(2.0).unwrap(),
            j_max: 10,
        };
        let k = km_norm(&z, p).unwrap();
        assert_eq!(k.value, 0.0);
        assert_eq!(k.tail_ratio, 0.0);
        let st = State::new(z.clone(), z).unwrap();
        let ph = phi(&st, -1.0, 4).unwrap();
        assert_eq!(ph.phi, 0.0);
        assert_eq!(ph.dphi, 0.0);
    }

    #[test]
    fn sequences_reject_negative() {
        assert!(matches!(
            SeqQuadruple::from_sequences(vec![1.0, -1.0], vec![0.0, 0.0]),
            Err(Error::NegativeEntry { index: 1 })
        ));
    }

    #[test]
    fn growing_series_flagged() {
        // a single high mode makes every term grow with j at sigma = 1
        let g = Grid::new(1.0, 64).unwrap();
        let f = Field::from_fn(&g, |x| (20.0 * x).cos()).unwrap();
        let p = GevreyParams {
            sigma: 1.0,
            s: SobolevIndex::new(0.0).unwrap(),
            j_max: 8,
        };
        assert!(km_norm(&f, p).unwrap().diverging());
    }
}
