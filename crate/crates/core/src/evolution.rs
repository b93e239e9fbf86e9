//! Time stepping, analyticity-radius measurement and the strip lower bound.
//!
//! The strip half-width `e^{sigma(t)}` follows
//!
//! ```text
//! sigma(t) = sigma0 - (2L/K) Phi_inf^{1/2} (e^{Kt/2} - 1) - M t
//! K = K1 + K2 mu0,  L = L1 + L2 e^{sigma_bar},  M = M1 + (M2 + M3 e^{2 sigma_bar}) mu0
//! ```
//!
//! with `mu0 = 1 + max_t |(u,v)|_3` over the trajectory.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequalities::{AssembledConstants, CheckReport};
use crate::norms::{phi, phi_infinity_with_tail};
use crate::ser;
use crate::spectral::Field;
use crate::system::{rhs, State, SystemParams};
use crate::taylor::linear_fit;

/// Largest admissible tail ratio for the untruncated functional.
pub const PHI_INF_TAIL: f64 = 1e-6;
/// Truncation order used for the untruncated functional.
pub const PHI_INF_ORDER: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub u_h3: f64,
    pub v_h3: f64,
    pub int_u: f64,
    pub int_v: f64,
    pub min_v: f64,
}

impl Snapshot {
    fn of(t: f64, st: &State) -> Self {
        Snapshot {
            t,
            u_h3: st.u.norm(3.0),
            v_h3: st.v.norm(3.0),
            int_u: st.u.integral(),
            int_v: st.v.integral(),
            min_v: st.min_v(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: SystemParams,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub diagnostics: Vec<Snapshot>,
    /// `0 < beta < 2`.
    pub globally_admissible: bool,
    /// `inf v0 > -1`.
    pub admissible_datum: bool,
}

impl Trajectory {
    fn push(&mut self, t: f64, st: State) {
        self.diagnostics.push(Snapshot::of(t, &st));
        self.times.push(t);
        self.states.push(st);
    }
}

/// Step-size bound `1.5 / (max|xi| (|beta| max|u| + 1))`.
pub fn cfl_bound(st: &State, p: SystemParams) -> f64 {
    1.5 / (st.grid().max_wavenumber() * (p.beta.abs() * st.u.max_abs() + 1.0))
}

fn stage(st: &State, p: SystemParams) -> Result<State> {
    Ok(rhs(st, p)?.dealiased())
}

/// One classical Runge-Kutta step.
pub fn step_rk4(st: &State, p: SystemParams, dt: f64) -> Result<State> {
    let bound = cfl_bound(st, p);
    if !(dt > 0.0 && dt <= bound) {
        return Err(Error::StepSize { dt, bound });
    }
    let blowup = |e: Error| match e {
        Error::NonFiniteSample { .. } => Error::Blowup {
            time: dt,
            last_good: None,
        },
        other => other,
    };
    let k1 = stage(st, p).map_err(blowup)?;
    let k2 = stage(&st.axpy(0.5 * dt, &k1)?, p).map_err(blowup)?;
    let k3 = stage(&st.axpy(0.5 * dt, &k2)?, p).map_err(blowup)?;
    let k4 = stage(&st.axpy(dt, &k3)?, p).map_err(blowup)?;
    let out = st
        .axpy(dt / 6.0, &k1)?
        .axpy(dt / 3.0, &k2)?
        .axpy(dt / 3.0, &k3)?
        .axpy(dt / 6.0, &k4)?;
    let finite = out
        .u
        .samples()
        .iter()
        .chain(out.v.samples())
        .all(|x| x.is_finite());
    if !finite {
        return Err(Error::Blowup {
            time: dt,
            last_good: None,
        });
    }
    Ok(out)
}

/// Integrates to `t_end`, saving every `save_every` steps and at the end.
/// The initial data are dealiased first; `dt` is shrunk so the steps land on
/// `t_end` exactly.
pub fn evolve(
    st0: &State,
    p: SystemParams,
    t_end: f64,
    dt: f64,
    save_every: usize,
) -> Result<Trajectory> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be >= 0, got {t_end}"
        )));
    }
    if !(dt > 0.0) || save_every == 0 {
        return Err(Error::InvalidParameter(
            "dt and save_every must be positive".into(),
        ));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { dt } else { t_end / steps as f64 };
    let mut st = st0.dealiased();
    let mut traj = Trajectory {
        params: p,
        dt: h,
        times: Vec::new(),
        states: Vec::new(),
        diagnostics: Vec::new(),
        globally_admissible: p.globally_admissible(),
        admissible_datum: st0.is_admissible(),
    };
    traj.push(0.0, st.clone());
    for n in 1..=steps {
        match step_rk4(&st, p, h) {
            Ok(next) => st = next,
            Err(Error::Blowup { .. }) => {
                return Err(Error::Blowup {
                    time: n as f64 * h,
                    last_good: Some(Box::new(traj)),
                })
            }
            Err(e) => return Err(e),
        }
        if n % save_every == 0 || n == steps {
            traj.push(if n == steps { t_end } else { n as f64 * h }, st.clone());
        }
    }
    Ok(traj)
}

const FIT_HIGH: f64 = 1e-4;
const FIT_LOW: f64 = 1e-11;
/// Slope steepening across the fit window beyond which decay counts as
/// faster than exponential.
const STEEPENING: f64 = 1.3;

/// Strip half-width read off the exponential decay rate of `|f^(xi)|`,
/// capped at `P pi / 4`.
pub fn radius_estimate(f: &Field) -> Result<f64> {
    let grid = f.grid();
    let cap = radius_cap(f);
    let spec = f.spectrum();
    let n = grid.modes();
    let max = spec.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if max == 0.0 {
        return Err(Error::IndeterminateRadius);
    }
    let pts: Vec<(f64, f64)> = (1..n / 2)
        .filter_map(|k| {
            let a = 0.5 * (spec[k].norm() + spec[n - k].norm());
            (a >= FIT_LOW * max && a <= FIT_HIGH * max).then(|| (grid.wavenumbers()[k], a.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::IndeterminateRadius);
    }
    if pts.len() >= 5 {
        if let Some((lo, hi)) = end_slopes(&pts) {
            if lo < 0.0 && hi / lo > STEEPENING {
                return Ok(cap);
            }
        }
    }
    let (slope, _) = linear_fit(&pts);
    if !(slope < 0.0) {
        return Err(Error::IndeterminateRadius);
    }
    Ok((-slope).min(cap))
}

pub fn radius_cap(f: &Field) -> f64 {
    f.grid().half_width() * PI / 4.0
}

/// Slopes of a least-squares parabola at the two ends of the window.
fn end_slopes(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for &(x, y) in pts {
        let d = x - mx;
        let mut pw = 1.0;
        for (i, si) in s.iter_mut().enumerate() {
            *si += pw;
            if i < 3 {
                t[i] += pw * y;
            }
            pw *= d;
        }
    }
    let a = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let c = solve3(a, t)?;
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - mx;
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) - mx;
    Some((c[1] + 2.0 * c[2] * lo, c[1] + 2.0 * c[2] * hi))
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][i] = b[r];
        }
        *o = det(m) / d;
    }
    Some(out)
}

/// Smaller of the two component radii; `None` when both are indeterminate.
pub fn state_radius(st: &State) -> Option<f64> {
    let ru = radius_estimate(&st.u).ok();
    let rv = radius_estimate(&st.v).ok();
    match (ru, rv) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StripRecord {
    pub t: f64,
    #[serde(serialize_with = "ser::float")]
    pub sigma_t: f64,
    pub exp_sigma_t: f64,
    #[serde(serialize_with = "ser::opt_float")]
    pub measured_radius: Option<f64>,
    #[serde(serialize_with = "ser::float")]
    pub log_r_t: f64,
    /// `Phi_{sigma(t), m_trunc}(u(t), v(t))`.
    pub phi_trunc: f64,
    pub bound_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StripTrack {
    pub sigma0: f64,
    pub sigma_bar: f64,
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub mu0: f64,
    pub phi_inf: f64,
    pub phi_inf_tail: f64,
    pub m_trunc: usize,
    pub records: Vec<StripRecord>,
}

impl StripTrack {
    pub fn all_hold(&self) -> bool {
        self.records.iter().all(|r| r.bound_holds)
    }
}

/// `sigma0 - (2L/K) sqrt(phi0) (e^{Kt/2} - 1) - M t`; runs to `-inf` on overflow.
pub fn sigma_curve(sigma0: f64, k: f64, l: f64, m: f64, phi0: f64, t: f64) -> f64 {
    let growth = if k == 0.0 {
        l * t
    } else {
        2.0 * l / k * (0.5 * k * t).exp_m1()
    };
    let drop = growth * phi0.sqrt();
    let drop = if drop.is_nan() { 0.0 } else { drop };
    sigma0 - drop - m * t
}

/// Strip lower bound along a trajectory, compared with the measured radius.
pub fn strip_bound(
    traj: &Trajectory,
    sigma0: f64,
    sigma_bar: f64,
    m_trunc: usize,
    c: &AssembledConstants,
) -> Result<StripTrack> {
    strip_bound_with_order(traj, sigma0, sigma_bar, m_trunc, PHI_INF_ORDER, c)
}

/// As [`strip_bound`], summing `Phi_{sigma0, infinity}` to order `j_max`.
pub fn strip_bound_with_order(
    traj: &Trajectory,
    sigma0: f64,
    sigma_bar: f64,
    m_trunc: usize,
    j_max: usize,
    c: &AssembledConstants,
) -> Result<StripTrack> {
    if !(sigma0 <= sigma_bar) {
        return Err(Error::InvalidParameter(format!(
            "need sigma0 <= sigma_bar, got {sigma0} > {sigma_bar}"
        )));
    }
    let first = traj
        .states
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    let (phi_inf, tail) = phi_infinity_with_tail(first, sigma0, j_max)?;
    if tail > PHI_INF_TAIL {
        return Err(Error::InadmissibleDatum(format!(
            "Kato-Masuda tail ratio {tail:e} at sigma0 = {sigma0} exceeds {PHI_INF_TAIL:e}"
        )));
    }
    let max_h3 = traj
        .diagnostics
        .iter()
        .map(|d| d.u_h3 + d.v_h3)
        .fold(0.0, f64::max);
    let mu0 = 1.0 + max_h3;
    let k = c.k1 + c.k2 * mu0;
    let l = c.l1 + c.l2 * sigma_bar.exp();
    let m = c.m1 + (c.m2 + c.m3 * (2.0 * sigma_bar).exp()) * mu0;
    let mut records = Vec::with_capacity(traj.states.len());
    for (&t, st) in traj.times.iter().zip(&traj.states) {
        let sigma_t = sigma_curve(sigma0, k, l, m, phi_inf, t);
        let exp_sigma_t = sigma_t.exp();
        let measured = state_radius(st);
        let phi_trunc = phi(st, sigma_t, m_trunc)?.phi;
        records.push(StripRecord {
            t,
            sigma_t,
            exp_sigma_t,
            measured_radius: measured,
            log_r_t: phi_inf.ln() + k * t,
            phi_trunc,
            bound_holds: measured.is_none_or(|r| r >= exp_sigma_t),
        });
    }
    Ok(StripTrack {
        sigma0,
        sigma_bar,
        k,
        l,
        m,
        mu0,
        phi_inf,
        phi_inf_tail: tail,
        m_trunc,
        records,
    })
}

/// `Phi_{sigma_m(t), m}(u(t), v(t)) <= Phi_{sigma0, m}(u0, v0) e^{Kt}` at every
/// snapshot, with `sigma_m` built from the truncated functional.
pub fn phi_liapunov_check(
    traj: &Trajectory,
    sigma0: f64,
    m: usize,
    k: f64,
    l: f64,
    mm: f64,
) -> Result<Vec<CheckReport>> {
    let first = traj
        .states
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    let phi0 = phi(first, sigma0, m)?.phi;
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, st)| {
            let sigma_t = sigma_curve(sigma0, k, l, mm, phi0, t);
            let lhs = phi(st, sigma_t, m)?.phi;
            let rhs = if t == 0.0 { phi0 } else { phi0 * (k * t).exp() };
            Ok(CheckReport::inequality("liapunov", lhs, rhs).with_digest(format!("t={t}")))
        })
        .collect()
}
