//! The four subcommands. Each writes its artifacts plus `effective.conf` into
//! the output directory and returns an [`Outcome`]; nothing time-dependent is
//! written, so reruns are byte-identical.

use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use chlab_core::evolution::{
    evolve, phi_liapunov_check, strip_bound_with_order, StripTrack, Trajectory,
};
use chlab_core::inequalities::{
    assembled_constants, run_ensemble, AssembledConstants, CheckReport, EnsembleSummary,
};
use chlab_core::lifespan::{lifespan_scaled_variant, lifespan_t_with, LifespanReport};
use chlab_core::system::{algebra_constants, AlgebraConstants};
use chlab_core::taylor::{disk_radius, picard_probe, scale_norm, taylor_coeffs, PicardProbe};
use chlab_core::{ser, Error, State};

use crate::config::{to_text, RunConfig};

/// Hard failures always fail the run; soft flags only under `--strict`.
#[derive(Debug, Default, Clone, Serialize)]
pub struct Outcome {
    pub hard_failures: Vec<String>,
    pub soft_flags: Vec<String>,
}

impl Outcome {
    fn hard(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.hard_failures.push(msg());
        }
    }

    fn soft(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.soft_flags.push(msg());
        }
    }

    /// 0 when clean, 1 on a hard failure (or a soft flag under `strict`).
    pub fn exit_code(&self, strict: bool) -> i32 {
        if !self.hard_failures.is_empty() || (strict && !self.soft_flags.is_empty()) {
            1
        } else {
            0
        }
    }
}

fn write_json<T: Serialize>(cfg: &RunConfig, name: &str, value: &T) -> anyhow::Result<()> {
    if cfg.json {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        write(cfg, name, &text)?;
    }
    Ok(())
}

fn write(cfg: &RunConfig, name: &str, text: &str) -> anyhow::Result<()> {
    let path = cfg.out_dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn prepare(cfg: &RunConfig) -> anyhow::Result<()> {
    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    write(cfg, "effective.conf", &to_text(cfg))
}

fn datum(cfg: &RunConfig, base: &Path) -> anyhow::Result<State> {
    let grid = cfg.grid()?;
    Ok(State::new(
        cfg.u0.field(&grid, base)?,
        cfg.v0.field(&grid, base)?,
    )?)
}

fn global_flag(cfg: &RunConfig, out: &mut Outcome) {
    out.soft(cfg.params().globally_admissible(), || {
        format!(
            "beta = {} lies outside 0 < beta < 2; only local results apply",
            cfg.beta
        )
    });
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    zero: bool,
    constants: Vec<AlgebraConstants>,
    summary: EnsembleSummary,
    outcome: Outcome,
}

/// Runs the inequality battery over the seeded ensemble.
pub fn verify(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    prepare(cfg)?;
    let constants = vec![
        algebra_constants(1.0, cfg.c_s)?,
        algebra_constants(2.0, cfg.c_s)?,
        algebra_constants(cfg.s, cfg.c_s)?,
    ];
    let summary = run_ensemble(
        cfg.seed,
        cfg.ensemble,
        &cfg.verify_grid()?,
        cfg.zero_ensemble,
    )?;
    let mut out = Outcome::default();
    for f in &summary.failures {
        out.hard(false, || {
            format!(
                "{} failed: lhs {:e} > rhs {:e} ({})",
                f.name, f.lhs, f.rhs, f.inputs_digest
            )
        });
    }
    write_json(
        cfg,
        "verify.json",
        &VerifyReport {
            seed: cfg.seed,
            zero: cfg.zero_ensemble,
            constants,
            summary,
            outcome: out.clone(),
        },
    )?;
    Ok(out)
}

#[derive(Serialize)]
struct LifespanPoint {
    lambda: f64,
    report: LifespanReport,
    /// `T gamma2`, tending to 1 as lambda -> 0.
    t_gamma2: f64,
    /// `T gamma1 R`, tending to 1 as lambda -> infinity.
    t_gamma1_r: f64,
}

#[derive(Serialize)]
struct LifespanFile {
    points: Vec<LifespanPoint>,
    scaled_variant: Option<LifespanReport>,
    outcome: Outcome,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Lifespan along `lambda (u0, v0)` on a log-spaced lambda range.
pub fn lifespan(cfg: &RunConfig, base: &Path) -> anyhow::Result<Outcome> {
    prepare(cfg)?;
    let st0 = datum(cfg, base)?;
    let p = cfg.params();
    let (lo, hi) = (cfg.lambda_min.log10(), cfg.lambda_max.log10());
    let n = cfg.lambda_points;
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64);
        let report = lifespan_t_with(&st0.scale(lambda), p, cfg.s, cfg.c_s)?;
        points.push(LifespanPoint {
            lambda,
            t_gamma2: report.t * report.gamma2,
            t_gamma1_r: report.t * report.gamma1 * report.r,
            report,
        });
    }

    let mut out = Outcome::default();
    for pt in &points {
        let r = &pt.report;
        let direct = r.r / (16.0 * r.l * r.r + 8.0 * r.m);
        out.hard(rel(r.t, direct) <= 1e-12, || {
            format!(
                "lambda {:e}: T = {:e} but R / (16 L R + 8 M) = {:e}",
                pt.lambda, r.t, direct
            )
        });
        let affine = r.gamma1 * r.r + r.gamma2;
        out.hard(rel(1.0 / r.t, affine) <= 1e-10, || {
            format!(
                "lambda {:e}: 1/T = {:e} but gamma1 R + gamma2 = {:e}",
                pt.lambda,
                1.0 / r.t,
                affine
            )
        });
    }
    out.hard(
        points.windows(2).all(|w| w[1].report.t < w[0].report.t),
        || "T is not strictly decreasing in lambda".into(),
    );
    let first = &points[0];
    let last = &points[n - 1];
    out.soft((first.t_gamma2 - 1.0).abs() <= 1e-6, || {
        format!(
            "small-amplitude regime: |T gamma2 - 1| = {:.3e} at lambda {:e} (target 1e-6)",
            (first.t_gamma2 - 1.0).abs(),
            first.lambda
        )
    });
    out.soft((last.t_gamma1_r - 1.0).abs() <= 1e-3, || {
        format!(
            "large-amplitude regime: |T gamma1 R - 1| = {:.3e} at lambda {:e} (target 1e-3)",
            (last.t_gamma1_r - 1.0).abs(),
            last.lambda
        )
    });
    global_flag(cfg, &mut out);

    let scaled_variant = match lifespan_scaled_variant(&st0, p, cfg.s, cfg.delta) {
        Ok(r) => Some(r),
        Err(Error::DegenerateDatum) => None,
        Err(e) => return Err(e.into()),
    };

    if cfg.csv {
        let mut csv = String::from("lambda,r,l,m,t,gamma1,gamma2,t_gamma2,t_gamma1_r\n");
        for pt in &points {
            let r = &pt.report;
            csv.push_str(&format!(
                "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n",
                pt.lambda, r.r, r.l, r.m, r.t, r.gamma1, r.gamma2, pt.t_gamma2, pt.t_gamma1_r
            ));
        }
        write(cfg, "lifespan_curve.csv", &csv)?;
    }
    write_json(
        cfg,
        "lifespan.json",
        &LifespanFile {
            points,
            scaled_variant,
            outcome: out.clone(),
        },
    )?;
    Ok(out)
}

#[derive(Serialize)]
struct TaylorFile {
    order: usize,
    delta: f64,
    s: f64,
    #[serde(serialize_with = "ser::floats")]
    coefficient_norms: Vec<f64>,
    #[serde(serialize_with = "ser::floats")]
    recursion_residuals: Vec<f64>,
    lifespan_t: f64,
    /// `T (1 - delta)`, the guaranteed disk.
    guaranteed_radius: f64,
    disk_radius: f64,
    picard: PicardProbe,
    outcome: Outcome,
}

/// Taylor coefficients in time, their recursion residuals, the fitted disk
/// radius and a Picard contraction probe.
pub fn taylor(cfg: &RunConfig, base: &Path) -> anyhow::Result<Outcome> {
    prepare(cfg)?;
    let st0 = datum(cfg, base)?;
    let p = cfg.params();
    let series = taylor_coeffs(&st0, p, cfg.taylor_order)?;
    let residuals = series.recursion_residuals()?;
    let norms = series
        .coeffs
        .iter()
        .map(|c| scale_norm(c, cfg.delta, cfg.s))
        .collect::<chlab_core::Result<Vec<_>>>()?;
    let life = lifespan_t_with(&st0, p, cfg.s, cfg.c_s)?;
    let guaranteed = life.t * (1.0 - cfg.delta);
    let radius = disk_radius(&series, cfg.delta, cfg.s)?;
    let probe = picard_probe(
        &st0,
        p,
        cfg.picard_fraction * guaranteed,
        cfg.delta,
        cfg.s,
        cfg.picard_iters,
    )?;

    let mut out = Outcome::default();
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    out.hard(worst <= 1e-10, || {
        format!("recursion residual {worst:e} exceeds 1e-10")
    });
    out.hard(radius >= guaranteed, || {
        format!("fitted disk radius {radius:e} is below T (1 - delta) = {guaranteed:e}")
    });
    out.soft(probe.contracting(0.9) && !probe.diverging, || {
        format!("Picard iteration not contracting at t = {:e}", probe.t)
    });
    global_flag(cfg, &mut out);
    write_json(
        cfg,
        "taylor.json",
        &TaylorFile {
            order: cfg.taylor_order,
            delta: cfg.delta,
            s: cfg.s,
            coefficient_norms: norms,
            recursion_residuals: residuals,
            lifespan_t: life.t,
            guaranteed_radius: guaranteed,
            disk_radius: radius,
            picard: probe,
            outcome: out.clone(),
        },
    )?;
    Ok(out)
}

#[derive(Serialize)]
struct EvolveFile<'a> {
    dt: f64,
    #[serde(serialize_with = "ser::opt_float")]
    blowup_time: Option<f64>,
    diagnostics: &'a [chlab_core::evolution::Snapshot],
    constants: AssembledConstants,
    strip: Option<&'a StripTrack>,
    strip_error: Option<String>,
    liapunov: Vec<CheckReport>,
    outcome: Outcome,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

/// Integrates the configured datum and tracks the strip of analyticity
/// against its guaranteed lower bound.
pub fn evolve_cmd(cfg: &RunConfig, base: &Path) -> anyhow::Result<Outcome> {
    prepare(cfg)?;
    let st0 = datum(cfg, base)?;
    let p = cfg.params();
    let mut out = Outcome::default();
    let (traj, blowup_time): (Trajectory, Option<f64>) =
        match evolve(&st0, p, cfg.t_end, cfg.dt, cfg.save_every) {
            Ok(t) => (t, None),
            Err(Error::Blowup {
                time,
                last_good: Some(t),
            }) => (*t, Some(time)),
            Err(e) => return Err(e.into()),
        };
    if let Some(time) = blowup_time {
        out.hard(false, || format!("solution blew up at t = {time}"));
    }
    out.soft(traj.admissible_datum, || {
        "initial v is not positive everywhere".into()
    });
    out.soft(traj.globally_admissible, || {
        format!(
            "beta = {} lies outside 0 < beta < 2; only local results apply",
            cfg.beta
        )
    });

    let constants = assembled_constants(p, cfg.sigma_bar);
    let (strip, strip_error) = match strip_bound_with_order(
        &traj,
        cfg.sigma0,
        cfg.sigma_bar,
        cfg.m_trunc,
        cfg.j_max,
        &constants,
    ) {
        Ok(s) => (Some(s), None),
        Err(e @ Error::InadmissibleDatum(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mut liapunov = Vec::new();
    match &strip {
        Some(track) => {
            for r in track.records.iter().filter(|r| !r.bound_holds) {
                out.hard(false, || {
                    format!(
                        "t = {}: measured radius {} below e^sigma(t) = {:e}",
                        r.t,
                        fmt_opt(r.measured_radius),
                        r.exp_sigma_t
                    )
                });
            }
            liapunov = phi_liapunov_check(&traj, cfg.sigma0, cfg.m, track.k, track.l, track.m)?;
            for r in liapunov.iter().filter(|r| !r.pass) {
                out.hard(false, || {
                    format!(
                        "Liapunov bound fails at {}: {:e} > {:e}",
                        r.inputs_digest, r.lhs, r.rhs
                    )
                });
            }
        }
        None => out.soft(false, || {
            format!(
                "strip bound skipped: {}",
                strip_error.as_deref().unwrap_or("")
            )
        }),
    }

    if cfg.csv {
        let mut csv = String::from("t,u_h3,v_h3,int_u,int_v,min_v,sigma_t,exp_sigma_t,radius\n");
        for (i, d) in traj.diagnostics.iter().enumerate() {
            let rec = strip.as_ref().map(|s| &s.records[i]);
            csv.push_str(&format!(
                "{:?},{:?},{:?},{:?},{:?},{:?},{},{},{}\n",
                d.t,
                d.u_h3,
                d.v_h3,
                d.int_u,
                d.int_v,
                d.min_v,
                fmt_opt(rec.map(|r| r.sigma_t)),
                fmt_opt(rec.map(|r| r.exp_sigma_t)),
                fmt_opt(rec.and_then(|r| r.measured_radius)),
            ));
        }
        write(cfg, "trajectory.csv", &csv)?;
    }
    write_json(
        cfg,
        "evolve.json",
        &EvolveFile {
            dt: traj.dt,
            blowup_time,
            diagnostics: &traj.diagnostics,
            constants,
            strip: strip.as_ref(),
            strip_error,
            liapunov,
            outcome: out.clone(),
        },
    )?;
    Ok(out)
}
