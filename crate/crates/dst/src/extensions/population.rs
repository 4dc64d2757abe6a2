//! Heterogeneous populations: finite mixtures of dual-system types and the
//! random-utility polytope they live in.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{Axiom, AxiomReport, Witness};
use crate::error::{ExtensionError, ModelError};
use crate::model::dst_rcf;
use crate::scalar::{Rational, Scalar};
use crate::types::{ChoiceData, DstParams, LinearOrder, LuceWeights, Menu, MenuCollection, Universe};

const SHARE_TOL: f64 = 1e-9;
/// Slack on the sign of a Block-Marschak sum.
pub const BM_TOL: f64 = 1e-12;
/// Largest universe for exhaustive Block-Marschak checks.
pub const MAX_BM_UNIVERSE: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct HDstParams<T: Scalar = f64> {
    universe: Universe,
    types: Vec<(T, DstParams<T>)>,
}

impl<T: Scalar> HDstParams<T> {
    pub fn new(types: Vec<(T, DstParams<T>)>) -> Result<Self, ExtensionError> {
        let Some((_, first)) = types.first() else {
            return Err(ExtensionError::InvalidMixture("no types".into()));
        };
        let universe = first.universe().clone();
        for (share, p) in &types {
            if !(*share > T::zero() && *share <= T::one()) {
                return Err(ExtensionError::InvalidMixture(format!("share {share} outside (0, 1]")));
            }
            if p.universe() != &universe {
                return Err(ModelError::UniverseMismatch.into());
            }
        }
        let total = T::sum(types.iter().map(|(s, _)| s));
        if !total.approx_eq(&T::one(), SHARE_TOL) {
            return Err(ExtensionError::InvalidMixture(format!("shares sum to {total}")));
        }
        Ok(Self { universe, types })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn types(&self) -> &[(T, DstParams<T>)] {
        &self.types
    }
}

impl HDstParams<f64> {
    /// The same mixture with every number read as an exact decimal.
    pub fn to_exact(&self) -> Result<HDstParams<Rational>, ExtensionError> {
        let exact = |v: f64| Rational::from_f64(v).ok_or_else(|| ExtensionError::Domain(format!("{v} is not finite")));
        let mut types = Vec::with_capacity(self.types.len());
        for (share, p) in &self.types {
            let weights = LuceWeights::new(p.weights().values().iter().map(|&w| exact(w)).collect::<Result<_, _>>()?)?;
            types.push((exact(*share)?, DstParams::new(self.universe.clone(), exact(*p.alpha())?, p.order().clone(), weights)?));
        }
        let total = Rational::sum(types.iter().map(|(s, _)| s));
        for (s, _) in types.iter_mut() {
            *s = s.clone() / total.clone();
        }
        HDstParams::new(types)
    }
}

pub fn hdst_rcf<T: Scalar>(params: &HDstParams<T>, menus: &MenuCollection) -> Result<ChoiceData<T>, ExtensionError> {
    let n = params.universe.len();
    let mut rows: BTreeMap<Menu, Vec<T>> = menus.iter().map(|m| (m, vec![T::zero(); n])).collect();
    for (share, p) in &params.types {
        let part = dst_rcf(p, menus)?;
        for (m, row) in rows.iter_mut() {
            for x in m.iter() {
                row[x] = row[x].clone() + share.clone() * part.get(x, *m)?.clone();
            }
        }
    }
    Ok(ChoiceData::new(menus.clone(), rows)?)
}

/// Alternating sum of `x`'s choice probabilities over all supersets of
/// `base`. Singleton menus count as probability one.
pub fn block_marschak<T: Scalar>(rho: &ChoiceData<T>, x: usize, base: Menu) -> Result<T, ExtensionError> {
    if !base.contains(x) {
        return Err(ModelError::AlternativeNotInMenu(x).into());
    }
    let u = rho.universe();
    let full = u.full_menu();
    if !base.is_subset_of(full) {
        return Err(ModelError::MenuOutsideUniverse.into());
    }
    let outside = full.difference(base);
    let mut total = T::zero();
    for extra in outside.subsets() {
        let menu = base.union(extra);
        let p = if menu.len() == 1 {
            T::one()
        } else {
            rho.prob(x, menu).cloned().ok_or_else(|| ExtensionError::IncompleteData(format!("menu {} is not observed", u.label(menu))))?
        };
        total = if extra.len() % 2 == 0 { total + p } else { total - p };
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RumReport {
    pub report: AxiomReport,
    /// Every sum is clearly positive, so the data sit inside the polytope.
    pub strict_interior: bool,
    pub min_value: f64,
    pub quantities: usize,
}

/// Evaluates every Block-Marschak sum. Needs every menu of two or more
/// options.
pub fn rum_check<T: Scalar>(rho: &ChoiceData<T>) -> Result<RumReport, ExtensionError> {
    let u = rho.universe();
    let n = u.len();
    if n > MAX_BM_UNIVERSE {
        return Err(ExtensionError::Domain(format!("at most {MAX_BM_UNIVERSE} alternatives for the full check, got {n}")));
    }
    let full = u.full_menu();
    for m in full.subsets().filter(|m| m.len() >= 2) {
        if rho.row(m).is_none() {
            return Err(ExtensionError::IncompleteData(format!("menu {} is not observed", u.label(m))));
        }
    }
    let cells: Vec<(usize, Menu)> = full.subsets().filter(|m| !m.is_empty()).flat_map(|m| m.iter().map(move |x| (x, m))).collect();
    let values: Vec<T> = cells.par_iter().map(|&(x, m)| block_marschak(rho, x, m)).collect::<Result<_, _>>()?;
    let mut report = AxiomReport::new(Axiom::BlockMarschak);
    let mut strict = true;
    let mut min_value = f64::INFINITY;
    for ((x, m), v) in cells.iter().zip(&values) {
        let f = v.to_f64();
        min_value = min_value.min(f);
        if *v < -T::tolerance(BM_TOL) {
            report.violate(Witness { alternatives: vec![u.id(*x).to_string()], menus: vec![u.label(*m)], values: vec![f] });
        }
        if !(*v > T::tolerance(BM_TOL)) {
            strict = false;
        }
    }
    Ok(RumReport { report, strict_interior: strict, min_value, quantities: values.len() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RumApproximation {
    pub params: HDstParams<f64>,
    /// Largest absolute gap to the random utility model over all menus.
    pub sup_error: f64,
    /// Guaranteed ceiling on `sup_error`.
    pub bound: f64,
}

/// Random utility model over orders: probability that `x` is top in `menu`.
pub fn rum_prob(types: &[(f64, LinearOrder)], menu: Menu, x: usize) -> f64 {
    types.iter().filter(|(_, o)| o.best_in(menu) == Some(x)).map(|(s, _)| s).sum()
}

/// Mixture of dual-system types whose System 1 weights concentrate on each
/// order's favourite, approximating the given random utility model.
pub fn rum_approximate(universe: &Universe, types: &[(f64, LinearOrder)], alpha: f64, lambda: f64) -> Result<RumApproximation, ExtensionError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ExtensionError::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if types.is_empty() {
        return Err(ExtensionError::InvalidMixture("no types".into()));
    }
    let n = universe.len();
    if n > MAX_BM_UNIVERSE {
        return Err(ExtensionError::Domain(format!("at most {MAX_BM_UNIVERSE} alternatives, got {n}")));
    }
    let mut mixture = Vec::with_capacity(types.len());
    for (share, order) in types {
        if order.len() != n {
            return Err(ModelError::DimensionMismatch { expected: n, got: order.len() }.into());
        }
        let raw: Vec<f64> = (0..n).map(|x| (-lambda * order.rank(x) as f64).exp()).collect();
        if raw.iter().any(|w| *w <= 0.0) {
            return Err(ExtensionError::Domain(format!("lambda {lambda} underflows the weights")));
        }
        let params = DstParams::new(universe.clone(), alpha, order.clone(), LuceWeights::new(raw)?)?;
        mixture.push((*share, params));
    }
    let params = HDstParams::new(mixture)?;
    let menus = MenuCollection::with_sizes(universe.clone(), 2, n);
    let rho = hdst_rcf(&params, &menus)?;
    let sup_error = menus
        .iter()
        .flat_map(|m| m.iter().map(move |x| (x, m)))
        .map(|(x, m)| (rho.prob(x, m).copied().unwrap_or(0.0) - rum_prob(types, m, x)).abs())
        .fold(0.0, f64::max);
    let bound = (1.0 - alpha) * (n as f64 - 1.0) * (-lambda).exp();
    Ok(RumApproximation { params, sup_error, bound })
}
