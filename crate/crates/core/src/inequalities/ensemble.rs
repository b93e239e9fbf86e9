//! Seeded random ensembles running every checker.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fixtures::random_analytic;
use crate::norms::{seq_quantities, SeqQuadruple};
use crate::spectral::{Field, Grid};
use crate::system::{State, SystemParams};

use super::{
    check_ab, check_product, check_scale, check_seq_state, main_estimate, tag, CheckReport,
};

/// Parameters drawn for one seed.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleCase {
    pub seed: u64,
    pub rate_u: f64,
    pub rate_v: f64,
    pub m: usize,
    pub sigma: f64,
    pub s_product: f64,
    pub s_scale: f64,
    pub delta: f64,
    pub delta_p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub seq_m: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct InequalityStats {
    pub count: usize,
    pub skipped: usize,
    pub failures: usize,
    pub min_margin: Option<f64>,
    /// smallest `margin / max(|rhs|, tiny)`
    pub min_relative_margin: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleSummary {
    pub base_seed: u64,
    pub cases: usize,
    pub total_checks: usize,
    pub total_failures: usize,
    pub per_inequality: BTreeMap<String, InequalityStats>,
    pub failures: Vec<CheckReport>,
}

impl EnsembleSummary {
    pub fn passed(&self) -> bool {
        self.total_failures == 0
    }
}

fn draw(seed: u64) -> (EnsembleCase, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = rng.random_range(0.3..=1.0);
    let case = EnsembleCase {
        seed,
        rate_u: rng.random_range(0.5..=3.0),
        rate_v: rng.random_range(0.5..=3.0),
        m: rng.random_range(2..=6),
        sigma: rng.random_range(-2.0..=0.0),
        s_product: rng.random_range(0.6..=3.5),
        s_scale: rng.random_range(2.0..=3.5),
        delta,
        delta_p: delta * rng.random_range(0.2..=0.9),
        alpha: rng.random_range(-2.0..=2.0),
        beta: rng.random_range(-1.0..=4.0),
        seq_m: rng.random_range(1..=64),
    };
    (case, rng)
}

/// Runs every suite on the fixture drawn from `seed`. With `zero` the fields
/// are identically zero.
pub fn ensemble_case(
    seed: u64,
    grid: &Grid,
    zero: bool,
) -> Result<(EnsembleCase, Vec<CheckReport>)> {
    let (case, mut rng) = draw(seed);
    let field = |rate: f64, rng: &mut ChaCha8Rng| -> Result<Field> {
        if zero {
            return Ok(Field::zeros(grid));
        }
        let amp = rng.random_range(0.05..=2.0);
        random_analytic(grid, rng, rate, amp)
    };
    let u = field(case.rate_u, &mut rng)?;
    let v = field(case.rate_v, &mut rng)?;
    let h = field(rng.random_range(0.5..=3.0), &mut rng)?;
    let st = State::new(u, v)?;
    let p = SystemParams {
        alpha: case.alpha,
        beta: case.beta,
    };

    let mut out = Vec::new();
    out.extend(check_product(&st.u, &st.v, &h, case.s_product)?);
    out.extend(check_scale(
        &st.u,
        &st.v,
        case.delta_p,
        case.delta,
        case.s_scale,
    )?);
    out.extend(check_ab(&seq_quantities(&st, case.sigma, case.m)?));

    let decay_a = rng.random_range(0.05..=1.5);
    let decay_b = rng.random_range(0.05..=1.5);
    let a: Vec<f64> = (1..=case.seq_m + 1)
        .map(|k| {
            if zero {
                0.0
            } else {
                rng.random::<f64>() * (-decay_a * k as f64).exp()
            }
        })
        .collect();
    let b: Vec<f64> = (0..=case.seq_m)
        .map(|k| {
            if zero {
                0.0
            } else {
                rng.random::<f64>() * (-decay_b * k as f64).exp()
            }
        })
        .collect();
    let seq = SeqQuadruple::from_sequences(a, b)?;
    out.extend(check_ab(&seq).into_iter().map(|mut r| {
        r.name.push_str("_seq");
        r
    }));

    out.extend(check_seq_state(&st, case.sigma, case.m)?);
    let me = main_estimate(&st, p, case.sigma, case.m)?;
    out.extend(me.sectional.iter().cloned());
    out.push(me.report.clone());
    out.push(CheckReport::inequality(
        "main_triangle_lower",
        me.report.lhs,
        me.triangle,
    ));
    out.push(CheckReport::inequality(
        "main_triangle_upper",
        me.triangle,
        me.report.rhs,
    ));
    out.push(CheckReport::inequality(
        "main_shaped",
        me.report.rhs,
        me.shaped_rhs,
    ));
    Ok((case, tag(out, &format!("seed={seed}"))))
}

/// `count` consecutive seeds starting at `base_seed`, run in parallel.
pub fn run_ensemble(
    base_seed: u64,
    count: usize,
    grid: &Grid,
    zero: bool,
) -> Result<EnsembleSummary> {
    let results: Vec<Result<(EnsembleCase, Vec<CheckReport>)>> = (0..count as u64)
        .into_par_iter()
        .map(|i| ensemble_case(base_seed.wrapping_add(i), grid, zero))
        .collect();
    let mut per: BTreeMap<String, InequalityStats> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut total = 0;
    for r in results {
        let (_, reports) = r?;
        for rep in reports {
            total += 1;
            let e = per.entry(rep.name.clone()).or_default();
            e.count += 1;
            if rep.is_skipped() {
                e.skipped += 1;
                continue;
            }
            let rel = rep.margin / rep.rhs.abs().max(f64::MIN_POSITIVE);
            e.min_margin = Some(e.min_margin.map_or(rep.margin, |m| m.min(rep.margin)));
            e.min_relative_margin = Some(e.min_relative_margin.map_or(rel, |m| m.min(rel)));
            if !rep.pass {
                e.failures += 1;
                failures.push(rep);
            }
        }
    }
    Ok(EnsembleSummary {
        base_seed,
        cases: count,
        total_checks: total,
        total_failures: failures.len(),
        per_inequality: per,
        failures,
    })
}
