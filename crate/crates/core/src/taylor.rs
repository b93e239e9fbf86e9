//! Time-Taylor expansion of the solution and a Picard probe.
//!
//! Since `F` is quadratic, `U(t) = sum_k U_k t^k` satisfies
//!
//! ```text
//! (k+1) U_{k+1} = L U_k + sum_{i+j=k} Q(U_i, U_j)
//! ```
//!
//! where `L` is the linear part of `F` and `Q` the symmetric bilinear part.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lifespan::lifespan_t;
use crate::norms::{e_norm, EParams, DEFAULT_K_MAX};
use crate::ser;
use crate::system::{assemble, rhs, Quadratics, State, SystemParams};

pub const MAX_ORDER: usize = 20;

#[derive(Clone, Debug)]
pub struct TaylorSeries {
    pub coeffs: Vec<State>,
    pub params: SystemParams,
}

impl TaylorSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Partial sum at `t` (Horner).
    pub fn evaluate(&self, t: f64) -> Result<State> {
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = c.axpy(t, &acc)?;
        }
        Ok(acc)
    }

    /// Partial sum through order `k`.
    pub fn truncated(&self, k: usize) -> TaylorSeries {
        TaylorSeries {
            coeffs: self.coeffs[..=k.min(self.order())].to_vec(),
            params: self.params,
        }
    }

    /// Relative mismatch between `(k+1) U_{k+1}` and the t^k coefficient of
    /// `F(U)` rebuilt from `rhs` alone by polarisation.
    pub fn recursion_residuals(&self) -> Result<Vec<f64>> {
        let p = self.params;
        let norm = |s: &State| s.norm(2.0);
        let lin = |w: &State| -> Result<State> {
            let n = norm(w);
            if n == 0.0 {
                return Ok(w.clone());
            }
            let w1 = w.scale(1.0 / n);
            let plus = rhs(&w1, p)?;
            let minus = rhs(&w1.scale(-1.0), p)?;
            Ok(plus.sub(&minus)?.scale(0.5 * n))
        };
        let quad = |w: &State| -> Result<State> {
            let plus = rhs(w, p)?;
            let minus = rhs(&w.scale(-1.0), p)?;
            Ok(plus.add(&minus)?.scale(0.5))
        };
        // Q(a, b) = (Q(a+b) - Q(a) - Q(b)) / 2 on unit-normalised inputs
        let bilinear = |a: &State, b: &State| -> Result<State> {
            let (na, nb) = (norm(a), norm(b));
            if na == 0.0 || nb == 0.0 {
                return Ok(State::zeros(a.grid()));
            }
            let a1 = a.scale(1.0 / na);
            let b1 = b.scale(1.0 / nb);
            let s = quad(&a1.add(&b1)?)?.sub(&quad(&a1)?)?.sub(&quad(&b1)?)?;
            Ok(s.scale(0.5 * na * nb))
        };
        let mut out = Vec::with_capacity(self.order());
        for k in 0..self.order() {
            let mut acc = lin(&self.coeffs[k])?;
            for i in 0..=k / 2 {
                let j = k - i;
                let term = bilinear(&self.coeffs[i], &self.coeffs[j])?;
                let weight = if i == j { 1.0 } else { 2.0 };
                acc = acc.axpy(weight, &term)?;
            }
            let target = self.coeffs[k + 1].scale((k + 1) as f64);
            let diff = norm(&target.sub(&acc)?);
            let scale = norm(&target);
            out.push(if scale > 0.0 { diff / scale } else { diff });
        }
        Ok(out)
    }
}

/// Taylor coefficients `U_0..U_K` of the solution through `st0`.
pub fn taylor_coeffs(st0: &State, p: SystemParams, order: usize) -> Result<TaylorSeries> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "Taylor order must lie in 1..={MAX_ORDER}, got {order}"
        )));
    }
    let grid = st0.grid().clone();
    let n = grid.modes();
    let mut coeffs = vec![st0.clone()];
    let mut ux: Vec<Vec<f64>> = vec![st0.u.derivative(1)?.samples().to_vec()];
    for k in 0..order {
        let mut uu = vec![0.0; n];
        let mut uxux = vec![0.0; n];
        let mut vv = vec![0.0; n];
        let mut uv = vec![0.0; n];
        for i in 0..=k {
            let (a, b) = (&coeffs[i], &coeffs[k - i]);
            let (au, bu) = (a.u.samples(), b.u.samples());
            let (av, bv) = (a.v.samples(), b.v.samples());
            let (ax, bx) = (&ux[i], &ux[k - i]);
            for x in 0..n {
                uu[x] += au[x] * bu[x];
                uxux[x] += ax[x] * bx[x];
                vv[x] += av[x] * bv[x];
                uv[x] += au[x] * bv[x];
            }
        }
        let q = Quadratics::from_products(&grid, uu, uxux, vv, uv)
            .map_err(|_| Error::Overflow { last_valid: k })?;
        let next = assemble(p, &coeffs[k], &q)
            .map_err(|_| Error::Overflow { last_valid: k })?
            .scale(1.0 / (k + 1) as f64);
        if !(next.norm(2.0) < 1e250) {
            return Err(Error::Overflow { last_valid: k });
        }
        ux.push(next.u.derivative(1)?.samples().to_vec());
        coeffs.push(next);
    }
    Ok(TaylorSeries { coeffs, params: p })
}

/// `|U|_{(delta,s+1)}` as the sum over components.
pub fn scale_norm(st: &State, delta: f64, s: f64) -> Result<f64> {
    let p = EParams::new(delta, s + 1.0, DEFAULT_K_MAX)?;
    Ok(e_norm(&st.u, p)?.value + e_norm(&st.v, p)?.value)
}

/// Convergence radius `1/rho` from a least-squares fit of `log |U_k|` over the
/// top half of the orders.
pub fn disk_radius(series: &TaylorSeries, delta: f64, s: f64) -> Result<f64> {
    let norms = series
        .coeffs
        .iter()
        .map(|c| scale_norm(c, delta, s))
        .collect::<Result<Vec<_>>>()?;
    radius_from_norms(&norms)
}

/// Same fit on precomputed coefficient norms.
pub fn radius_from_norms(norms: &[f64]) -> Result<f64> {
    const NEEDED: usize = 6;
    let k = norms.len().saturating_sub(1);
    let top = k.div_ceil(2);
    let floor = 1e-13 * norms.first().copied().unwrap_or(0.0);
    let pts: Vec<(f64, f64)> = (k + 1 - top..=k)
        .filter(|&i| norms[i] > floor && norms[i] > 0.0)
        .map(|i| (i as f64, norms[i].ln()))
        .collect();
    if pts.len() < NEEDED {
        return Err(Error::InsufficientData {
            usable: pts.len(),
            needed: NEEDED,
        });
    }
    let (slope, _) = linear_fit(&pts);
    Ok((-slope).exp())
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// `S[i][j] = int_{-1}^{x_i} l_j` for the Lagrange basis on the nodes `x`.
fn integration_matrix(x: &[f64], w: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let bary: Vec<f64> = (0..n)
        .map(|j| {
            1.0 / (0..n)
                .filter(|&k| k != j)
                .map(|k| x[j] - x[k])
                .product::<f64>()
        })
        .collect();
    let basis = |y: f64| -> Vec<f64> {
        if let Some(j) = x.iter().position(|&xj| xj == y) {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            return e;
        }
        let terms: Vec<f64> = (0..n).map(|j| bary[j] / (y - x[j])).collect();
        let total: f64 = terms.iter().sum();
        terms.iter().map(|t| t / total).collect()
    };
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        let half = (x[i] + 1.0) / 2.0;
        for q in 0..n {
            let y = -1.0 + half * (x[q] + 1.0);
            let l = basis(y);
            for j in 0..n {
                s[i][j] += half * w[q] * l[j];
            }
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardProbe {
    pub t: f64,
    #[serde(serialize_with = "ser::floats")]
    pub differences: Vec<f64>,
    /// `d_{n+1} / d_n` where both exceed the noise floor.
    #[serde(serialize_with = "ser::floats")]
    pub ratios: Vec<f64>,
    pub noise_floor: f64,
    pub diverging: bool,
}

impl PicardProbe {
    /// The last usable ratio is at most `limit`, or the iteration reached the
    /// noise floor after its first step.
    pub fn contracting(&self, limit: f64) -> bool {
        match self.ratios.last() {
            Some(&r) => r <= limit,
            None => self
                .differences
                .iter()
                .skip(1)
                .all(|&d| d <= self.noise_floor),
        }
    }
}

pub const PICARD_NODES: usize = 32;

/// Successive differences `|U_{n+1}(t) - U_n(t)|_{(delta,s+1)}` of the integral
/// iteration `U_{n+1}(t) = U_0 + int_0^t F(U_n)`, with a 32-point Gauss rule.
pub fn picard_probe(
    st0: &State,
    p: SystemParams,
    t: f64,
    delta: f64,
    s: f64,
    n_iters: usize,
) -> Result<PicardProbe> {
    if !st0.is_zero() {
        let life = lifespan_t(st0, p, s)?;
        let limit = life.t * (1.0 - delta);
        if t.abs() >= limit {
            return Err(Error::InvalidParameter(format!(
                "|t| = {} must stay below T(1 - delta) = {limit}",
                t.abs()
            )));
        }
    }
    let (x, w) = gauss_legendre(PICARD_NODES);
    let smat = integration_matrix(&x, &w);
    let half_t = t / 2.0;

    let mut nodes: Vec<State> = vec![st0.clone(); PICARD_NODES];
    let mut end = st0.clone();
    let mut differences = Vec::with_capacity(n_iters);
    for _ in 0..n_iters {
        let fs = nodes
            .iter()
            .map(|u| rhs(u, p))
            .collect::<Result<Vec<_>>>()?;
        let mut next_end = st0.clone();
        for (j, f) in fs.iter().enumerate() {
            next_end = next_end.axpy(half_t * w[j], f)?;
        }
        let mut next_nodes = Vec::with_capacity(PICARD_NODES);
        for row in &smat {
            let mut acc = st0.clone();
            for (j, f) in fs.iter().enumerate() {
                acc = acc.axpy(half_t * row[j], f)?;
            }
            next_nodes.push(acc);
        }
        differences.push(scale_norm(&next_end.sub(&end)?, delta, s)?);
        nodes = next_nodes;
        end = next_end;
    }
    let noise_floor = 1e-13 * scale_norm(st0, delta, s)?;
    let ratios: Vec<f64> = differences
        .windows(2)
        .filter(|d| d[0] > noise_floor && d[1] > noise_floor)
        .map(|d| d[1] / d[0])
        .collect();
    let above: Vec<f64> = differences
        .iter()
        .copied()
        .filter(|&d| d > noise_floor)
        .collect();
    let diverging = above
        .windows(4)
        .any(|d| d[1] > d[0] && d[2] > d[1] && d[3] > d[2]);
    Ok(PicardProbe {
        t,
        differences,
        ratios,
        noise_floor,
        diverging,
    })
}
