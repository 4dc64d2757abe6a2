//! Cognitive weights derived from a constrained minimum-effort problem:
//! System 1 keeps choice close to the Luce rule while System 2 insists on a
//! minimum improvement `m` in the probability of the best option.

use std::collections::BTreeMap;

use crate::error::ExtensionError;
use crate::extensions::menu_weights::DDstParams;
use crate::scalar::Scalar;
use crate::types::{LinearOrder, LuceWeights, Menu, Universe};

/// Share of the menu's Luce weight held by `best`, with the argument checks
/// common to everything here.
fn luce_share<T: Scalar>(weights: &LuceWeights<T>, menu: Menu, best: usize, improvement: &T) -> Result<T, ExtensionError> {
    if menu.len() < 2 || menu.iter().any(|x| x >= weights.len()) {
        return Err(ExtensionError::Domain("menu needs two or more known options".into()));
    }
    if !menu.contains(best) {
        return Err(ExtensionError::Domain(format!("best option {best} is not in the menu")));
    }
    let share = weights.get(best).clone() / weights.total(menu);
    let cap = T::one() - share.clone();
    if *improvement < T::zero() || !(*improvement < cap) {
        return Err(ExtensionError::Domain(format!("improvement {improvement} outside [0, {cap})")));
    }
    Ok(share)
}

/// Cognitive weight implied by a required improvement.
pub fn microfoundation_alpha<T: Scalar>(weights: &LuceWeights<T>, menu: Menu, best: usize, improvement: T) -> Result<T, ExtensionError> {
    let share = luce_share(weights, menu, best, &improvement)?;
    Ok(improvement / (T::one() - share))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FocCheck<T: Scalar = f64> {
    pub alpha: T,
    /// Optimal choice probabilities, indexed like the weights; zero off the menu.
    pub probabilities: Vec<T>,
    /// Multiplier on the adding-up constraint.
    pub sum_multiplier: T,
    /// Multiplier on the improvement constraint.
    pub improvement_multiplier: T,
    pub binding: bool,
    /// Largest violation of stationarity, feasibility or complementary
    /// slackness.
    pub max_residual: T,
    /// The optimum equals the dual-system probabilities at `alpha`.
    pub matches_model: bool,
}

/// Solves the effort problem in closed form, checks its first-order
/// conditions and compares the optimum with the dual-system formula.
pub fn verify_foc<T: Scalar>(weights: &LuceWeights<T>, menu: Menu, best: usize, improvement: T) -> Result<FocCheck<T>, ExtensionError> {
    let share = luce_share(weights, menu, best, &improvement)?;
    let alpha = improvement.clone() / (T::one() - share.clone());
    let two = T::from_i64(2);
    let total = weights.total(menu);
    let w_best = weights.get(best).clone();
    let rest = total.clone() - w_best.clone();

    let floor = share.clone() + improvement.clone();
    let p_best = floor.clone();
    let mut probs = vec![T::zero(); weights.len()];
    probs[best] = p_best.clone();
    for x in menu.iter().filter(|&x| x != best) {
        probs[x] = (T::one() - p_best.clone()) * weights.get(x).clone() / rest.clone();
    }
    let lambda_sum = two.clone() * (T::one() - p_best.clone()) / rest;
    let lambda_imp = two.clone() * p_best.clone() / w_best.clone() - lambda_sum.clone();

    let mut residual = T::zero();
    let mut track = |v: T| {
        let v = v.abs();
        if v > residual {
            residual = v;
        }
    };
    for x in menu.iter() {
        let grad = two.clone() * probs[x].clone() / weights.get(x).clone();
        let multipliers = if x == best { lambda_sum.clone() + lambda_imp.clone() } else { lambda_sum.clone() };
        track(grad - multipliers);
    }
    track(T::sum(menu.iter().map(|x| &probs[x]).collect::<Vec<_>>()) - T::one());
    track(lambda_imp.clone() * (p_best.clone() - floor));
    if lambda_imp < T::zero() {
        track(lambda_imp.clone());
    }

    let mut matches = true;
    for x in menu.iter() {
        let luce = (T::one() - alpha.clone()) * weights.get(x).clone() / total.clone();
        let model = if x == best { alpha.clone() + luce } else { luce };
        matches &= model.approx_eq(&probs[x], 1e-12);
    }
    let binding = improvement > T::zero();
    Ok(FocCheck {
        alpha,
        probabilities: probs,
        sum_multiplier: lambda_sum,
        improvement_multiplier: lambda_imp,
        binding,
        max_residual: residual,
        matches_model: matches,
    })
}

/// Menu-dependent model whose weights come from per-menu improvements.
pub fn ddst_from_improvements<T: Scalar>(
    universe: Universe,
    weights: LuceWeights<T>,
    order: LinearOrder,
    improvements: &BTreeMap<Menu, T>,
) -> Result<DDstParams<T>, ExtensionError> {
    let mut alphas = BTreeMap::new();
    for (m, imp) in improvements.iter().filter(|(m, _)| m.len() >= 2) {
        let best = order.best_in(*m).ok_or_else(|| ExtensionError::Domain("empty menu".into()))?;
        alphas.insert(*m, microfoundation_alpha(&weights, *m, best, imp.clone())?);
    }
    Ok(DDstParams::new(universe, alphas, order, weights)?)
}
