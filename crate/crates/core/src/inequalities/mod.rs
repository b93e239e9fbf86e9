//! Numerical checkers for the quantitative inequalities.
//!
//! Every checker returns [`CheckReport`]s. Inequalities pass when
//! `lhs <= rhs + tol` with `tol = 1e-9 |rhs| + 1e-12`; equalities carry their
//! own relative tolerance.

mod ensemble;
mod field_checks;
mod sectional;
mod sequences;

pub use ensemble::{ensemble_case, run_ensemble, EnsembleCase, EnsembleSummary, InequalityStats};
pub use field_checks::{check_product, check_scale};
pub use sectional::{
    assembled_constants, main_estimate, sectional_bounds, sectional_weights, AssembledConstants,
    MainEstimate,
};
pub use sequences::{check_ab, check_seq_state, AB_CONSTANT};

use serde::Serialize;

use crate::ser;

pub const REL_SLACK: f64 = 1e-9;
pub const ABS_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Inequality,
    Equality,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub kind: CheckKind,
    #[serde(serialize_with = "ser::float")]
    pub lhs: f64,
    #[serde(serialize_with = "ser::float")]
    pub rhs: f64,
    #[serde(serialize_with = "ser::float")]
    pub margin: f64,
    #[serde(serialize_with = "ser::float")]
    pub tol: f64,
    pub pass: bool,
    pub inputs_digest: String,
}

impl CheckReport {
    /// `lhs <= rhs` with the default slack.
    pub fn inequality(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let tol = REL_SLACK * rhs.abs() + ABS_SLACK;
        let margin = rhs - lhs;
        let pass = if rhs == f64::INFINITY {
            !lhs.is_nan()
        } else {
            margin >= -tol
        };
        CheckReport {
            name: name.into(),
            kind: CheckKind::Inequality,
            lhs,
            rhs,
            margin,
            tol,
            pass,
            inputs_digest: String::new(),
        }
    }

    /// `lhs == rhs` up to `rel` times the larger magnitude.
    pub fn equality(name: impl Into<String>, lhs: f64, rhs: f64, rel: f64) -> Self {
        let tol = rel * lhs.abs().max(rhs.abs());
        let margin = -(lhs - rhs).abs();
        CheckReport {
            name: name.into(),
            kind: CheckKind::Equality,
            lhs,
            rhs,
            margin,
            tol,
            pass: margin >= -tol,
            inputs_digest: String::new(),
        }
    }

    pub fn skipped(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            kind: CheckKind::Skipped,
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            tol: 0.0,
            pass: true,
            inputs_digest: String::new(),
        }
    }

    pub fn with_digest(mut self, digest: impl Into<String>) -> Self {
        self.inputs_digest = digest.into();
        self
    }

    pub fn is_skipped(&self) -> bool {
        self.kind == CheckKind::Skipped
    }
}

/// Tags every report with the same digest.
pub fn tag(reports: Vec<CheckReport>, digest: &str) -> Vec<CheckReport> {
    reports.into_iter().map(|r| r.with_digest(digest)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_margin_within_tol() {
        let r = CheckReport::inequality("x", 1.0, 1.0);
        assert!(r.pass && r.margin == 0.0);
        let r = CheckReport::inequality("x", 1.0 + 1e-10, 1.0);
        assert!(r.pass);
        let r = CheckReport::inequality("x", 1.0 + 1e-8, 1.0);
        assert!(!r.pass);
        let r = CheckReport::inequality("x", 0.0, 0.0);
        assert!(r.pass);
        let r = CheckReport::inequality("x", 1e300, f64::INFINITY);
        assert!(r.pass);
    }

    #[test]
    fn equality_tolerance() {
        assert!(CheckReport::equality("e", 1.0, 1.0 + 1e-11, 1e-10).pass);
        assert!(!CheckReport::equality("e", 1.0, 1.0 + 1e-9, 1e-10).pass);
        assert!(CheckReport::equality("e", 0.0, 0.0, 1e-10).pass);
    }
}
