//! The oracle-versus-closed-form verification suite.

use crate::error::Result;
use crate::gaussian_analysis::{j_factor, FactorKind, JForm};
use crate::model::{GaussianSpec, InitialState, Normalization, OscillatorParams, Partition, TimeProfile};
use crate::oracle::{self, QuadratureSpec};

/// Arguments at which every factor is checked.
pub const FACTOR_ARGS: [f64; 5] = [0.25, 0.5, 1.0, 1.72, 3.0];
/// (a, b) pairs for the erf product identity, drawn once from U(−3, 3).
pub const ERF_PAIRS: [(f64, f64); 5] = [(0.37, -1.21), (2.54, 0.68), (-2.91, -0.43), (1.13, 1.87), (-1.62, 2.79)];
pub const SUM_RULE_WINDOWS: [u32; 3] = [2, 4, 6];
/// β at which the two candidate forms of J are compared.
pub const J_ADJUDICATION_BETA: f64 = 0.5;

pub const FACTOR_TOL: f64 = 1e-6;
pub const ERF_TOL: f64 = 1e-9;
pub const SUM_RULE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub spec: QuadratureSpec,
    /// Replaces every per-check tolerance when set.
    pub tolerance: Option<f64>,
    pub j_form: JForm,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { spec: QuadratureSpec::default(), tolerance: None, j_form: JForm::Appendix }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub got: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn close(name: String, expected: f64, got: f64, tolerance: f64) -> Self {
        let passed = (got - expected).abs() <= tolerance;
        Self { name, expected, got, tolerance, passed }
    }

    pub fn delta(&self) -> f64 {
        (self.got - self.expected).abs()
    }
}

/// The Gaussian ⊗ Gaussian setup of the sum-rule checks: σ = δ/5, centred at
/// the partition origin, with coupling and driving switched on.
pub fn sum_rule_setup() -> (InitialState, OscillatorParams, Partition) {
    let delta = 1.5;
    let state = InitialState::Product {
        particle: GaussianSpec::new(0.0, delta / 5.0, Normalization::L2Normalized),
        pointer: GaussianSpec::new(0.0, 0.5, Normalization::L2Normalized),
    };
    let params = OscillatorParams::new(1.0, 1.0, 1.0).with_driving(TimeProfile::Const(1.0));
    (state, params, Partition::new(delta, 0.0))
}

pub fn factor_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let tol = opts.tolerance.unwrap_or(FACTOR_TOL);
    let mut out = Vec::new();
    for kind in FactorKind::ALL {
        for arg in FACTOR_ARGS {
            let got = oracle::oracle_factor(kind, arg, &opts.spec)?;
            let expected = kind.closed_form(arg, opts.j_form);
            out.push(Check::close(format!("factor {}({arg})", kind.name()), expected, got, tol));
        }
    }
    Ok(out)
}

pub fn erf_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let tol = opts.tolerance.unwrap_or(ERF_TOL);
    ERF_PAIRS
        .iter()
        .map(|&(a, b)| {
            let (numeric, closed) = oracle::erf_product_integral(a, b, &opts.spec)?;
            Ok(Check::close(format!("erf product (a={a} b={b})"), closed, numeric, tol))
        })
        .collect()
}

/// One check per window that |Σ − 1| is within tolerance at the largest N
/// and non-increasing in N, plus the imaginary residue.
pub fn sum_rule_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let (state, params, partition) = sum_rule_setup();
    let tol = opts.tolerance.unwrap_or(SUM_RULE_TOL);
    let mut out = Vec::new();
    let mut previous: Option<f64> = None;
    for n in SUM_RULE_WINDOWS {
        let r = oracle::sum_rule_check(&state, &params, &partition, n, &opts.spec)?;
        if let Some(prev) = previous {
            let slack = opts.tolerance.unwrap_or(opts.spec.abs_tol);
            let passed = r.deviation() <= prev + slack;
            out.push(Check {
                name: format!("sum rule deviation non-increasing (N={n})"),
                expected: prev,
                got: r.deviation(),
                tolerance: slack,
                passed,
            });
        }
        if n == *SUM_RULE_WINDOWS.last().unwrap() {
            out.push(Check::close(format!("sum rule (N={n})"), r.target, r.partial_sum, tol));
            let im_tol = opts.tolerance.unwrap_or(opts.spec.abs_tol);
            out.push(Check::close(format!("sum rule imaginary part (N={n})"), 0.0, r.imag_residue, im_tol));
        }
        previous = Some(r.deviation());
    }
    Ok(out)
}

/// Passes when the oracle matches the selected closed form and is at least
/// ten tolerances away from the other form.
pub fn j_adjudication(opts: &VerifyOptions) -> Result<Check> {
    let tol = opts.tolerance.unwrap_or(FACTOR_TOL);
    let beta = J_ADJUDICATION_BETA;
    let got = oracle::oracle_factor(FactorKind::J, beta, &opts.spec)?;
    let other = match opts.j_form {
        JForm::Appendix => JForm::MainText,
        JForm::MainText => JForm::Appendix,
    };
    let mut check = Check::close(format!("J adjudication ({beta})"), j_factor(beta, opts.j_form), got, tol);
    check.passed &= (got - j_factor(beta, other)).abs() > 10.0 * tol;
    Ok(check)
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<Check>> {
    opts.spec.validate()?;
    let mut checks = factor_checks(opts)?;
    checks.extend(erf_checks(opts)?);
    checks.extend(sum_rule_checks(opts)?);
    checks.push(j_adjudication(opts)?);
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let checks = run_all(&VerifyOptions::default()).unwrap();
        assert_eq!(checks.len(), 30 + 5 + 2 + 2 + 1);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn main_text_j_fails_adjudication() {
        let opts = VerifyOptions { j_form: JForm::MainText, ..Default::default() };
        assert!(!j_adjudication(&opts).unwrap().passed);
    }

    #[test]
    fn impossible_tolerance_fails() {
        let opts = VerifyOptions { tolerance: Some(1e-15), ..Default::default() };
        let checks = sum_rule_checks(&opts).unwrap();
        assert!(checks.iter().any(|c| !c.passed));
    }
}
