//! Analytic gradients of circuit expectations via parameter-shift rules,
//! plus a central finite-difference oracle used to validate them.
//!
//! Every trainable parameter enters the model through exactly one rotation
//! gate, so each parameter carries a single rule: [`ShiftRule::TwoTerm`] for
//! uncontrolled rotations, [`ShiftRule::FourTerm`] for controlled ones
//! (their generator has eigenvalues {0, ±1/2}, which needs four evaluation
//! points).

use rayon::prelude::*;

use crate::qsim::Circuit;
use crate::{Error, Result};

use std::f64::consts::{FRAC_PI_2, SQRT_2};

const C_PLUS: f64 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
const C_MINUS: f64 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);

const TWO_TERM: [(f64, f64); 2] = [(FRAC_PI_2, 0.5), (-FRAC_PI_2, -0.5)];
const FOUR_TERM: [(f64, f64); 4] = [
    (FRAC_PI_2, C_PLUS),
    (-FRAC_PI_2, -C_PLUS),
    (3.0 * FRAC_PI_2, -C_MINUS),
    (-3.0 * FRAC_PI_2, C_MINUS),
];

/// Which parameter-shift rule differentiates a given parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftRule {
    TwoTerm,
    FourTerm,
}

impl ShiftRule {
    /// The (offset, coefficient) pairs of the rule: the derivative is
    /// Σ coeff · f(θ + offset).
    pub fn shifts(&self) -> &'static [(f64, f64)] {
        match self {
            ShiftRule::TwoTerm => &TWO_TERM,
            ShiftRule::FourTerm => &FOUR_TERM,
        }
    }
}

/// Derive the per-parameter rule table from a finished circuit: a parameter
/// on a controlled rotation is tagged FourTerm, otherwise TwoTerm. Errors if
/// any parameter index is reused or absent, since the shift rules are only
/// valid when each parameter enters through exactly one gate.
pub fn param_rules(circuit: &Circuit) -> Result<Vec<ShiftRule>> {
    let mut rules: Vec<Option<ShiftRule>> = vec![None; circuit.n_params()];
    for gate in circuit.gates() {
        if let Some(i) = gate.param_index() {
            if rules[i].is_some() {
                return Err(Error::structure(format!(
                    "parameter {i} is referenced by more than one gate"
                )));
            }
            rules[i] = Some(if gate.controls.is_empty() {
                ShiftRule::TwoTerm
            } else {
                ShiftRule::FourTerm
            });
        }
    }
    rules
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| Error::structure(format!("parameter {i} is never used"))))
        .collect()
}

fn check_finite(value: f64, param: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::numeric(format!(
            "non-finite forward value {value} while shifting parameter {param}"
        )))
    }
}

/// Shift-rule gradient of a scalar expectation-valued function.
pub fn expectation_gradient<F>(forward: F, params: &[f64], rules: &[ShiftRule]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    assert_eq!(params.len(), rules.len(), "one rule per parameter");
    let mut grad = Vec::with_capacity(params.len());
    let mut shifted = params.to_vec();
    for (k, rule) in rules.iter().enumerate() {
        let mut acc = 0.0;
        for &(offset, coeff) in rule.shifts() {
            shifted[k] = params[k] + offset;
            acc += coeff * check_finite(forward(&shifted)?, k)?;
        }
        shifted[k] = params[k];
        grad.push(acc);
    }
    Ok(grad)
}

/// Central finite differences (forward(p+h e_k) − forward(p−h e_k)) / 2h.
/// Test oracle only; never used on the training path.
pub fn finite_diff_gradient<F>(forward: F, params: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut grad = Vec::with_capacity(params.len());
    let mut shifted = params.to_vec();
    for k in 0..params.len() {
        shifted[k] = params[k] + h;
        let plus = forward(&shifted)?;
        shifted[k] = params[k] - h;
        let minus = forward(&shifted)?;
        shifted[k] = params[k];
        grad.push((plus - minus) / (2.0 * h));
    }
    Ok(grad)
}

/// Gradient of Σ_j weights[j] · logit_j(params).
///
/// One shifted run of `forward` produces all logits at once, so the total
/// number of circuit evaluations is 2·(#TwoTerm) + 4·(#FourTerm) regardless
/// of how many logits the model measures. With `parallel` set, parameters
/// are differentiated on the rayon pool; per-parameter results are collected
/// in index order, so sequential and parallel runs agree bitwise.
pub fn logits_gradient_weighted<F>(
    forward: F,
    params: &[f64],
    rules: &[ShiftRule],
    weights: &[f64],
    parallel: bool,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    assert_eq!(params.len(), rules.len(), "one rule per parameter");
    let one_param = |k: usize| -> Result<f64> {
        let mut shifted = params.to_vec();
        let mut acc = 0.0;
        for &(offset, coeff) in rules[k].shifts() {
            shifted[k] = params[k] + offset;
            let logits = forward(&shifted)?;
            debug_assert_eq!(logits.len(), weights.len());
            let mut dot = 0.0;
            for (l, w) in logits.iter().zip(weights) {
                dot += w * l;
            }
            acc += coeff * check_finite(dot, k)?;
        }
        Ok(acc)
    };

    if parallel {
        (0..params.len()).into_par_iter().map(one_param).collect()
    } else {
        (0..params.len()).map(one_param).collect()
    }
}

/// Scalar loss and its gradient with respect to circuit parameters.
///
/// `loss` maps logits to the loss value and the analytic dloss/dlogits;
/// those logit sensitivities are chained with the shift-rule logit
/// gradients. Costs one unshifted run plus the shifted runs of
/// [`logits_gradient_weighted`].
pub fn loss_gradient<F, L>(
    forward: F,
    loss: L,
    params: &[f64],
    rules: &[ShiftRule],
    parallel: bool,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
    L: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let base_logits = forward(params)?;
    let (loss_value, dloss_dlogits) = loss(&base_logits);
    if !loss_value.is_finite() {
        return Err(Error::numeric(format!(
            "non-finite loss value {loss_value} at the unshifted point"
        )));
    }
    let grad = logits_gradient_weighted(forward, params, rules, &dloss_dlogits, parallel)?;
    Ok((loss_value, grad))
}
