//! Forward evaluation of the dual-system model and of its reference baselines.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::ModelError;
use crate::scalar::Scalar;
use crate::types::{ChoiceData, DstParams, LinearOrder, LuceWeights, Menu, MenuCollection, MenuWeights, Universe, WeakOrder};

/// Choice probability of `x` from `menu`.
///
/// With probability `alpha` the best element is chosen; otherwise the choice
/// is Luce with the salience weights.
pub fn dst_prob<T: Scalar>(params: &DstParams<T>, menu: Menu, x: usize) -> Result<T, ModelError> {
    check_menu(params.universe(), menu, x)?;
    let w = params.weights();
    let luce = w.get(x).clone() / w.total(menu);
    let one_minus = T::one() - params.alpha().clone();
    let best = params.order().best_in(menu) == Some(x);
    Ok(if best { params.alpha().clone() + one_minus * luce } else { one_minus * luce })
}

/// Full row of choice probabilities for `menu`, indexed by universe position.
pub fn dst_row<T: Scalar>(params: &DstParams<T>, menu: Menu) -> Result<Vec<T>, ModelError> {
    let n = params.universe().len();
    if menu.is_empty() {
        return Err(ModelError::EmptyMenu);
    }
    if !menu.is_subset_of(Menu::full(n)) {
        return Err(ModelError::MenuOutsideUniverse);
    }
    let mut row = vec![T::zero(); n];
    for x in menu.iter() {
        row[x] = dst_prob(params, menu, x)?;
    }
    Ok(row)
}

/// Random choice function generated on every menu of `menus`.
pub fn dst_rcf<T: Scalar>(params: &DstParams<T>, menus: &MenuCollection) -> Result<ChoiceData<T>, ModelError> {
    if menus.universe() != params.universe() {
        return Err(ModelError::UniverseMismatch);
    }
    let rows = menus.iter().map(|m| Ok((m, dst_row(params, m)?))).collect::<Result<BTreeMap<_, _>, ModelError>>()?;
    ChoiceData::new(menus.clone(), rows)
}

/// Variant for a preference with indifference: System 2 splits its mass
/// equally among the top class of the menu.
pub fn dst_prob_tie_aware<T: Scalar>(
    alpha: &T,
    preference: &WeakOrder,
    weights: &LuceWeights<T>,
    menu: Menu,
    x: usize,
) -> Result<T, ModelError> {
    if !(alpha > &T::zero() && alpha < &T::one()) {
        return Err(ModelError::InvalidAlpha(alpha.to_f64()));
    }
    if menu.is_empty() {
        return Err(ModelError::EmptyMenu);
    }
    if !menu.contains(x) {
        return Err(ModelError::AlternativeNotInMenu(x));
    }
    let top = preference.maximal_in(menu);
    let luce = weights.get(x).clone() / weights.total(menu);
    let base = (T::one() - alpha.clone()) * luce;
    Ok(if top.contains(x) { base + alpha.clone() / T::from_i64(top.len() as i64) } else { base })
}

/// Choice probability of `query` after `replicated` is duplicated `copies`
/// times, the copies ranking just below the original and sharing its weight.
pub fn replica_prob<T: Scalar>(
    params: &DstParams<T>,
    base_menu: Menu,
    replicated: usize,
    copies: i64,
    query: usize,
) -> Result<T, ModelError> {
    if copies < 0 {
        return Err(ModelError::InvalidReplicaCount(copies));
    }
    check_menu(params.universe(), base_menu, replicated)?;
    check_menu(params.universe(), base_menu, query)?;
    let w = params.weights();
    let total = w.total(base_menu) + T::from_i64(copies) * w.get(replicated).clone();
    let one_minus = T::one() - params.alpha().clone();
    let luce = one_minus * w.get(query).clone() / total;
    let best = params.order().best_in(base_menu) == Some(query);
    Ok(if best { params.alpha().clone() + luce } else { luce })
}

/// Limit of [`replica_prob`] as the number of copies grows: System 2 keeps
/// the best element, everything else vanishes.
pub fn replica_limit<T: Scalar>(params: &DstParams<T>, base_menu: Menu, query: usize) -> Result<T, ModelError> {
    check_menu(params.universe(), base_menu, query)?;
    Ok(if params.order().best_in(base_menu) == Some(query) { params.alpha().clone() } else { T::zero() })
}

/// Models used as baselines or data generators.
#[derive(Clone, Debug, PartialEq)]
pub enum ChoiceModel<T: Scalar = f64> {
    /// Luce choice with the given weights.
    Luce { universe: Universe, weights: LuceWeights<T> },
    /// Deterministic maximization of a strict preference.
    Max { universe: Universe, order: LinearOrder },
    Dst(DstParams<T>),
}

impl<T: Scalar> ChoiceModel<T> {
    pub fn universe(&self) -> &Universe {
        match self {
            ChoiceModel::Luce { universe, .. } | ChoiceModel::Max { universe, .. } => universe,
            ChoiceModel::Dst(p) => p.universe(),
        }
    }

    pub fn prob(&self, menu: Menu, x: usize) -> Result<T, ModelError> {
        match self {
            ChoiceModel::Luce { universe, weights } => {
                check_menu(universe, menu, x)?;
                Ok(weights.get(x).clone() / weights.total(menu))
            }
            ChoiceModel::Max { universe, order } => {
                check_menu(universe, menu, x)?;
                Ok(if order.best_in(menu) == Some(x) { T::one() } else { T::zero() })
            }
            ChoiceModel::Dst(p) => dst_prob(p, menu, x),
        }
    }

    pub fn rcf(&self, menus: &MenuCollection) -> Result<ChoiceData<T>, ModelError> {
        if menus.universe() != self.universe() {
            return Err(ModelError::UniverseMismatch);
        }
        let n = self.universe().len();
        let mut rows = BTreeMap::new();
        for m in menus.iter() {
            let mut row = vec![T::zero(); n];
            for x in m.iter() {
                row[x] = self.prob(m, x)?;
            }
            rows.insert(m, row);
        }
        ChoiceData::new(menus.clone(), rows)
    }
}

/// Simulated choices: raw counts and the resulting frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub counts: BTreeMap<Menu, Vec<u64>>,
    /// Frequencies on the menus that were drawn at least once.
    pub frequencies: ChoiceData<f64>,
}

/// Draws `n` (menu, choice) pairs: a menu from `sigma`, then a choice from the model.
pub fn sample_choices(
    model: &ChoiceModel<f64>,
    menus: &MenuCollection,
    sigma: &MenuWeights,
    n: u64,
    seed: u64,
) -> Result<Sample, ModelError> {
    let truth = model.rcf(menus)?;
    let menu_list: Vec<Menu> = menus.iter().collect();
    let menu_dist = WeightedIndex::new(menu_list.iter().map(|m| sigma.get(*m)))
        .map_err(|_| ModelError::InvalidMenuWeight(0.0))?;
    let choice_dists = menu_list
        .iter()
        .map(|m| WeightedIndex::new(truth.row(*m).expect("row exists").iter().copied()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| ModelError::DegenerateRow)?;
    let universe_size = menus.universe().len();
    let mut counts: BTreeMap<Menu, Vec<u64>> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let k = menu_dist.sample(&mut rng);
        let x = choice_dists[k].sample(&mut rng);
        counts.entry(menu_list[k]).or_insert_with(|| vec![0; universe_size])[x] += 1;
    }
    let frequencies = frequencies_from_counts(menus.universe(), &counts)?;
    Ok(Sample { counts, frequencies })
}

/// Normalizes per-menu counts into choice frequencies.
pub fn frequencies_from_counts(universe: &Universe, counts: &BTreeMap<Menu, Vec<u64>>) -> Result<ChoiceData<f64>, ModelError> {
    let collection = MenuCollection::new(universe.clone(), counts.keys().copied())?;
    let rows = counts
        .iter()
        .map(|(m, c)| {
            let total: u64 = c.iter().sum();
            if total == 0 {
                return Err(ModelError::MissingMenu(universe.label(*m)));
            }
            Ok((*m, c.iter().map(|&v| v as f64 / total as f64).collect()))
        })
        .collect::<Result<_, _>>()?;
    ChoiceData::new(collection, rows)
}

fn check_menu(universe: &Universe, menu: Menu, x: usize) -> Result<(), ModelError> {
    if menu.is_empty() {
        return Err(ModelError::EmptyMenu);
    }
    if !menu.is_subset_of(universe.full_menu()) {
        return Err(ModelError::MenuOutsideUniverse);
    }
    if !menu.contains(x) {
        return Err(ModelError::AlternativeNotInMenu(x));
    }
    Ok(())
}
