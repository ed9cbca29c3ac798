//! Runs the check requests of an instance against the core routines.

use std::time::Instant;

use indexmap::IndexMap;
use serde::Serialize;

use ckg_core::{
    atomic_check, canonical_dual, douglas_solve, equivalence_check, frame_bounds,
    operator_algebra_bounds, orthogonal_combine, positive_perturb, range_combine,
    restricted_dual_frame, subspace_dual_bound, verify_dual, Bound, BoundCheck, Error,
    FrameCertificate, Tolerance,
};

use crate::instance::{CheckKind, CheckSpec, Instance};
use crate::json::BoundOut;

/// Relative agreement demanded of two routes to the same quantity when one of
/// them goes through a squared pencil (`||U||²` against the pencil constant).
pub const PENCIL_AGREEMENT: f64 = 1e-8;
/// Relative agreement for `||T_Θ||² · A_opt = 1`.
pub const PRODUCT_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub name: String,
    pub formula: BoundOut,
    pub empirical: BoundOut,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: &'static str,
    pub verdict: bool,
    pub expected: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub bounds: IndexMap<String, BoundOut>,
    pub residuals: IndexMap<String, f64>,
    pub comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Default)]
struct Outcome {
    verdict: bool,
    /// Internal cross-checks that must hold whatever the verdict.
    consistent: Option<String>,
    error: Option<String>,
    bounds: IndexMap<String, BoundOut>,
    residuals: IndexMap<String, f64>,
    comparisons: Vec<Comparison>,
}

impl Outcome {
    fn bound(&mut self, name: &str, value: Bound) {
        self.bounds.insert(name.into(), BoundOut(value));
    }

    fn value(&mut self, name: &str, value: f64) {
        self.bounds.insert(name.into(), BoundOut(Bound::Finite(value)));
    }

    fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.into(), value);
    }

    fn compare(&mut self, name: &str, check: &BoundCheck) {
        self.comparisons.push(Comparison {
            name: name.into(),
            formula: BoundOut(check.formula),
            empirical: BoundOut(check.empirical),
            holds: check.holds,
        });
    }

    fn frame(&mut self, prefix: &str, cert: &FrameCertificate) {
        self.bound(&format!("{prefix}lower"), cert.lower_bound);
        self.value(&format!("{prefix}upper"), cert.bessel_bound);
        for (k, v) in &cert.residuals {
            self.residual(&format!("{prefix}{k}"), *v);
        }
    }

    fn inconsistent(&mut self, why: String) {
        self.consistent = Some(why);
    }

    /// Hypothesis failures and non-frames are negative verdicts, not errors of the tool.
    fn rejected(err: Error) -> Outcome {
        Outcome {
            verdict: false,
            error: Some(err.to_string()),
            ..Default::default()
        }
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn evaluate(inst: &Instance, kind: &CheckKind, tol: &Tolerance) -> Result<Outcome, Error> {
    let mut out = Outcome::default();
    match kind {
        CheckKind::FrameBounds { family, operator } => {
            let cert = frame_bounds(inst.family(family), inst.operator(operator), tol)?;
            out.frame("", &cert);
            out.verdict = cert.is_ckg_frame;
        }
        CheckKind::VerifyDual { family, dual, operator } => {
            let cert = verify_dual(inst.family(family), inst.family(dual), inst.operator(operator), tol)?;
            out.bound("primal_lower", cert.primal_lower_bound);
            out.value("dual_upper", cert.gamma_bessel_bound);
            out.value("synthesis_norm_sq", cert.synthesis_norm_sq);
            if let Some(floor) = cert.floor {
                out.value("floor", floor);
            }
            out.residual("duality", cert.duality_residual);
            out.verdict = cert.is_valid;
        }
        CheckKind::CanonicalDual { family, operator } => {
            let k = inst.operator(operator);
            let dual = canonical_dual(inst.family(family), k, tol)?;
            let cert = &dual.certificate;
            out.bound("primal_lower", cert.primal_lower_bound);
            out.value("synthesis_norm_sq", cert.synthesis_norm_sq);
            out.value("phi_norm_sq", dual.phi_norm_sq);
            out.residual("duality", cert.duality_residual);
            out.verdict = cert.is_valid;
            if let Bound::Finite(a) = cert.primal_lower_bound {
                let product = cert.synthesis_norm_sq * a;
                out.residual("norm_times_bound_minus_one", (product - 1.0).abs());
                if !close(product, 1.0, PRODUCT_AGREEMENT) {
                    out.inconsistent(format!("||T_Θ||² · A = {product:.17e}, expected 1"));
                }
            }
        }
        CheckKind::Douglas { left, right } => {
            let (l1, l2) = (inst.operator(left), inst.operator(right));
            let eq = equivalence_check(l1, l2, tol)?;
            out.residual("range", eq.range_residual);
            out.residual("factorization", eq.factorization_residual);
            out.bound("majorization_constant", eq.majorization_constant);
            if !eq.agree() {
                out.inconsistent(format!(
                    "equivalent conditions disagree: range {}, majorization {}, factorization {}",
                    eq.range_inclusion, eq.majorization, eq.factorization
                ));
            }
            match douglas_solve(l1, l2, tol) {
                Ok(sol) => {
                    let u_norm_sq = sol.u.norm().powi(2);
                    out.value("u_norm_sq", u_norm_sq);
                    out.value("pencil_constant", sol.norm_sq);
                    out.residual("solution", sol.residual);
                    out.residual("kernel", sol.null_residual);
                    out.residual("co_range", sol.range_residual);
                    out.verdict = tol.within(sol.residual, l1.norm())
                        && sol.null_match
                        && sol.range_ok
                        && close(u_norm_sq, sol.norm_sq, PENCIL_AGREEMENT);
                }
                Err(e @ Error::RangeNotIncluded { .. }) => out.error = Some(e.to_string()),
                Err(e) => return Err(e),
            }
        }
        CheckKind::Atomic { family, operator } => {
            let cert = atomic_check(inst.family(family), inst.operator(operator), tol)?;
            out.frame("", &cert.frame);
            out.value("minimal_c", cert.minimal_c);
            if let Some(r) = cert.reconstruction_residual {
                out.residual("reconstruction", r);
            }
            out.verdict = cert.is_atomic;
            if !cert.equivalence_agrees {
                out.inconsistent("atomic verdict differs from frame verdict".into());
            }
        }
        CheckKind::SubspaceDual { family, dual, operator } => {
            let res = subspace_dual_bound(inst.family(family), inst.family(dual), inst.operator(operator), tol)?;
            out.frame("", &res.certificate);
            out.value("dual_upper", res.gamma_bessel_bound);
            out.residual("invariance", res.invariance_residual);
            out.residual("duality", res.duality_residual);
            out.compare(
                "lower_bound",
                &BoundCheck::lower(res.conclusion_bound, res.certificate.lower_bound, tol),
            );
            out.verdict = res.holds;
        }
        CheckKind::OperatorAlgebra { family, k1, k2, alpha, beta } => {
            let res = operator_algebra_bounds(
                inst.family(family),
                inst.operator(k1),
                inst.operator(k2),
                *alpha,
                *beta,
                tol,
            )?;
            out.bound("k1_lower", res.k1.lower_bound);
            out.bound("k2_lower", res.k2.lower_bound);
            out.compare("sum", &res.sum);
            out.compare("product", &res.product);
            out.verdict = res.sum.holds && res.product.holds;
        }
        CheckKind::OrthogonalCombine { family, other, u, v, operator } => {
            let res = orthogonal_combine(
                inst.family(family),
                inst.family(other),
                inst.operator(u),
                inst.operator(v),
                inst.operator(operator),
                tol,
            )?;
            out.frame("", &res.certificate);
            out.compare("lower", &res.lower);
            if let Some(upper) = res.upper_formula {
                out.value("upper_formula", upper);
            }
            out.residual("additivity", res.additivity_residual);
            out.verdict = res.lower.holds && res.upper_holds && tol.within(res.additivity_residual, 1.0);
        }
        CheckKind::RangeCombine { family, other, u1, u2, operator } => {
            let res = range_combine(
                inst.family(family),
                inst.family(other),
                inst.operator(u1),
                inst.operator(u2),
                inst.operator(operator),
                tol,
            )?;
            out.frame("", &res.certificate);
            out.compare("lower", &res.lower);
            out.residual("additivity", res.additivity_residual);
            out.verdict = res.lower.holds && tol.within(res.additivity_residual, 1.0);
        }
        CheckKind::PositivePerturb { family, u, power, operator } => {
            let res = positive_perturb(inst.family(family), inst.operator(u), *power, inst.operator(operator), tol)?;
            out.frame("", &res.certificate);
            out.bound("original_lower", res.original.lower_bound);
            out.residual("frame_operator", res.operator_residual);
            out.residual("dominance_margin", res.dominance_margin);
            out.verdict = res.holds && tol.within(res.operator_residual, 1.0);
        }
        CheckKind::RestrictedDual { family, dual, operator } => {
            let res = restricted_dual_frame(inst.family(family), inst.family(dual), inst.operator(operator), tol)?;
            out.frame("", &res.certificate);
            out.value("upper_formula", res.upper_formula);
            out.residual("reconstruction", res.reconstruction_residual);
            out.residual("adjoint_order", res.adjoint_residual);
            out.verdict = res.holds;
        }
    }
    Ok(out)
}

pub fn run_check(inst: &Instance, spec: &CheckSpec, tol: &Tolerance, timings: bool) -> CheckResult {
    let start = Instant::now();
    let outcome = match evaluate(inst, &spec.kind, tol) {
        Ok(o) => o,
        Err(e) => Outcome::rejected(e),
    };
    let expected = spec.expected();
    let pass = outcome.verdict == expected && outcome.consistent.is_none();
    let error = match (outcome.error, outcome.consistent) {
        (e, None) => e,
        (None, Some(c)) => Some(c),
        (Some(e), Some(c)) => Some(format!("{e}; {c}")),
    };
    CheckResult {
        name: spec.name.clone(),
        kind: spec.kind.label(),
        verdict: outcome.verdict,
        expected,
        pass,
        error,
        bounds: outcome.bounds,
        residuals: outcome.residuals,
        comparisons: outcome.comparisons,
        elapsed_ms: timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    }
}

pub fn run_checks(inst: &Instance, tol: &Tolerance, timings: bool) -> Vec<CheckResult> {
    inst.checks.iter().map(|c| run_check(inst, c, tol, timings)).collect()
}
