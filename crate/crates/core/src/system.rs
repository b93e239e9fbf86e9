//! The nonlocal two-component system
//!
//! ```text
//! u_t = F1(u,v) = -beta u u_x - Lambda^-2 d[-alpha u + (3-beta)/2 u^2 + beta/2 u_x^2 + v + v^2/2]
//! v_t = F2(u,v) = -u_x - (u v)_x
//! ```
//!
//! with `Lambda^-2 = (1 - d^2)^-1`, plus the product constants used by the
//! estimates.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::norms::weighted;
use crate::spectral::{Field, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            alpha: 0.0,
            beta: 1.0,
        }
    }
}

impl SystemParams {
    /// Whether the global existence theory applies (`0 < beta < 2`).
    pub fn globally_admissible(&self) -> bool {
        self.beta > 0.0 && self.beta < 2.0
    }

    /// `2|beta| + |3-beta| + 2`, the coefficient collecting the quadratic terms.
    pub fn quadratic_coef(&self) -> f64 {
        2.0 * self.beta.abs() + (3.0 - self.beta).abs() + 2.0
    }
}

#[derive(Clone, Debug)]
pub struct State {
    pub u: Field,
    pub v: Field,
}

impl State {
    pub fn new(u: Field, v: Field) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::IncompatibleGrid);
        }
        Ok(State { u, v })
    }

    pub fn zeros(grid: &Grid) -> Self {
        State {
            u: Field::zeros(grid),
            v: Field::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn min_v(&self) -> f64 {
        self.v.min()
    }

    /// `inf v > -1`, needed by the global theory.
    pub fn is_admissible(&self) -> bool {
        self.min_v() > -1.0
    }

    pub fn scale(&self, c: f64) -> State {
        State {
            u: self.u.scale(c),
            v: self.v.scale(c),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &State) -> Result<State> {
        Ok(State {
            u: self.u.axpy(c, &other.u)?,
            v: self.v.axpy(c, &other.v)?,
        })
    }

    pub fn add(&self, other: &State) -> Result<State> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &State) -> Result<State> {
        self.axpy(-1.0, other)
    }

    pub fn dealiased(&self) -> State {
        State {
            u: self.u.dealiased(),
            v: self.v.dealiased(),
        }
    }

    /// `|u|_s + |v|_s`.
    pub fn norm(&self, s: f64) -> f64 {
        self.u.norm(s) + self.v.norm(s)
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlgebraConstants {
    pub s: f64,
    pub d_s: f64,
    pub c_small_s: f64,
    pub c_s: f64,
    pub big_c_s: f64,
}

/// `int (1+xi^2)^-s dxi = sqrt(pi) Gamma(s-1/2) / Gamma(s)`.
pub fn bessel_integral(s: f64) -> Result<f64> {
    if !(s > 0.5) {
        return Err(Error::DivergentIntegral(s));
    }
    if s.fract() == 0.0 && s <= 170.0 {
        // I_1 = pi, I_s = I_{s-1} (2s-3)/(2s-2)
        let mut v = PI;
        for k in 2..=s as usize {
            let k = k as f64;
            v *= (2.0 * k - 3.0) / (2.0 * k - 2.0);
        }
        return Ok(v);
    }
    Ok((0.5 * PI.ln() + ln_gamma(s - 0.5) - ln_gamma(s)).exp())
}

/// `c(s)` from the product bound in `H^s`.
pub fn c_small(s: f64) -> Result<f64> {
    let d2 = bessel_integral(s)?;
    Ok(((1.0 + 4f64.powf(s)) * d2).sqrt())
}

/// Default product constant for the mixed bound: `max(8, c(s))`.
pub fn default_c_s(s: f64) -> Result<f64> {
    Ok(c_small(s)?.max(8.0))
}

pub fn algebra_constants(s: f64, c_s_override: Option<f64>) -> Result<AlgebraConstants> {
    let d2 = bessel_integral(s)?;
    let c_small_s = ((1.0 + 4f64.powf(s)) * d2).sqrt();
    let c_s = match c_s_override {
        Some(c) if c.is_finite() && c > 0.0 => c,
        Some(c) => {
            return Err(Error::InvalidParameter(format!(
                "product constant must be positive, got {c}"
            )))
        }
        None => c_small_s.max(8.0),
    };
    Ok(AlgebraConstants {
        s,
        d_s: d2.sqrt(),
        c_small_s,
        c_s,
        big_c_s: 18.0 * c_s,
    })
}

/// Spectra of the four quadratic building blocks `u^2, u_x^2, v^2, u v`.
pub(crate) struct Quadratics {
    pub uu: Vec<Complex64>,
    pub uxux: Vec<Complex64>,
    pub vv: Vec<Complex64>,
    pub uv: Vec<Complex64>,
}

impl Quadratics {
    pub fn of(st: &State) -> Result<Self> {
        let ux = st.u.derivative(1)?;
        Ok(Quadratics {
            uu: st.u.mul_dealiased(&st.u)?.spectrum().to_vec(),
            uxux: ux.mul_dealiased(&ux)?.spectrum().to_vec(),
            vv: st.v.mul_dealiased(&st.v)?.spectrum().to_vec(),
            uv: st.u.mul_dealiased(&st.v)?.spectrum().to_vec(),
        })
    }

    /// From physical-space products, dealiased.
    pub fn from_products(
        grid: &Grid,
        uu: Vec<f64>,
        uxux: Vec<f64>,
        vv: Vec<f64>,
        uv: Vec<f64>,
    ) -> Result<Self> {
        let spec = |x: Vec<f64>| -> Result<Vec<Complex64>> {
            Ok(Field::from_samples(grid, x)?
                .dealiased()
                .spectrum()
                .to_vec())
        };
        Ok(Quadratics {
            uu: spec(uu)?,
            uxux: spec(uxux)?,
            vv: spec(vv)?,
            uv: spec(uv)?,
        })
    }
}

/// Combines the linear action on `lin` with precomputed quadratic spectra.
pub(crate) fn assemble(p: SystemParams, lin: &State, q: &Quadratics) -> Result<State> {
    let grid = lin.grid();
    let nyq = grid.nyquist();
    let n = grid.modes();
    let mut f1 = Vec::with_capacity(n);
    let mut f2 = Vec::with_capacity(n);
    let (a, b) = (p.alpha, p.beta);
    for (k, &xi) in grid.wavenumbers().iter().enumerate() {
        if k == nyq {
            f1.push(Complex64::new(0.0, 0.0));
            f2.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let ixi = Complex64::new(0.0, xi);
        let uk = lin.u.spectrum()[k];
        let vk = lin.v.spectrum()[k];
        let inner = -a * uk + vk + 0.5 * (3.0 - b) * q.uu[k] + 0.5 * b * q.uxux[k] + 0.5 * q.vv[k];
        f1.push(-0.5 * b * ixi * q.uu[k] - ixi / (1.0 + xi * xi) * inner);
        f2.push(-ixi * uk - ixi * q.uv[k]);
    }
    Ok(State {
        u: Field::from_spectrum(grid, f1)?,
        v: Field::from_spectrum(grid, f2)?,
    })
}

/// `(F1(u,v), F2(u,v))` with dealiased products.
pub fn rhs(st: &State, p: SystemParams) -> Result<State> {
    let q = Quadratics::of(st)?;
    assemble(p, st, &q)
}

/// `<F(u,v), D Phi_{sigma,m}(u,v)>`.
pub fn pairing(st: &State, p: SystemParams, sigma: f64, m: usize) -> Result<f64> {
    let f = rhs(st, p)?;
    weighted_pairing(st, &f, sigma, m)
}

/// `sum_j w_j <u^(j), d^j g1>_2 + sum_j w'_j <v^(j), d^j g2>_2` with the
/// Liapunov weights.
pub fn weighted_pairing(st: &State, g: &State, sigma: f64, m: usize) -> Result<f64> {
    Ok(u_pairing(&st.u, &g.u, sigma, m)? + v_pairing(&st.v, &g.v, sigma, m)?)
}

pub(crate) fn u_pairing(u: &Field, g: &Field, sigma: f64, m: usize) -> Result<f64> {
    let mut acc = 0.0;
    for j in 1..=m + 1 {
        let x = u.deriv_inner(g, j, 2.0)?;
        acc += x.signum() * weighted(j - 1, sigma, j, x.abs());
    }
    Ok(acc)
}

pub(crate) fn v_pairing(v: &Field, g: &Field, sigma: f64, m: usize) -> Result<f64> {
    let mut acc = 0.0;
    for j in 0..=m {
        let x = v.deriv_inner(g, j, 2.0)?;
        acc += x.signum() * weighted(j, sigma, j, x.abs());
    }
    Ok(acc)
}
