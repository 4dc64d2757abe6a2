//! Dual-system choice with a cognitive weight that varies by menu.

use std::collections::BTreeMap;

use crate::axioms::{Axiom, AxiomReport, Witness};
use crate::error::{ExtensionError, ModelError};
use crate::scalar::Scalar;
use crate::types::{ChoiceData, LinearOrder, LuceWeights, Menu, MenuCollection, Universe};

/// Reproduction tolerance when validating a constructed representation.
const FIT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DDstParams<T: Scalar = f64> {
    universe: Universe,
    alpha_by_menu: BTreeMap<Menu, T>,
    order: LinearOrder,
    weights: LuceWeights<T>,
}

impl<T: Scalar> DDstParams<T> {
    /// Menus of one option need no weight and are ignored.
    pub fn new(universe: Universe, alpha_by_menu: BTreeMap<Menu, T>, order: LinearOrder, weights: LuceWeights<T>) -> Result<Self, ModelError> {
        let n = universe.len();
        if order.len() != n {
            return Err(ModelError::DimensionMismatch { expected: n, got: order.len() });
        }
        if weights.len() != n {
            return Err(ModelError::DimensionMismatch { expected: n, got: weights.len() });
        }
        let full = universe.full_menu();
        let mut kept = BTreeMap::new();
        for (m, a) in alpha_by_menu {
            if !m.is_subset_of(full) || m.is_empty() {
                return Err(ModelError::MenuOutsideUniverse);
            }
            if m.len() < 2 {
                continue;
            }
            if !(a > T::zero() && a < T::one()) {
                return Err(ModelError::InvalidAlpha(a.to_f64()));
            }
            kept.insert(m, a);
        }
        Ok(Self { universe, alpha_by_menu: kept, order, weights })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn alpha(&self, menu: Menu) -> Option<&T> {
        self.alpha_by_menu.get(&menu)
    }

    pub fn alphas(&self) -> &BTreeMap<Menu, T> {
        &self.alpha_by_menu
    }

    pub fn order(&self) -> &LinearOrder {
        &self.order
    }

    pub fn weights(&self) -> &LuceWeights<T> {
        &self.weights
    }
}

pub fn ddst_prob<T: Scalar>(params: &DDstParams<T>, menu: Menu, x: usize) -> Result<T, ModelError> {
    if !menu.contains(x) {
        return Err(ModelError::AlternativeNotInMenu(x));
    }
    if menu.len() == 1 {
        return Ok(T::one());
    }
    let alpha = params.alpha(menu).ok_or_else(|| ModelError::MissingMenu(params.universe.label(menu)))?.clone();
    let luce = params.weights.get(x).clone() / params.weights.total(menu);
    let base = (T::one() - alpha.clone()) * luce;
    Ok(if params.order.best_in(menu) == Some(x) { alpha + base } else { base })
}

pub fn ddst_rcf<T: Scalar>(params: &DDstParams<T>, menus: &MenuCollection) -> Result<ChoiceData<T>, ModelError> {
    if menus.universe() != &params.universe {
        return Err(ModelError::UniverseMismatch);
    }
    let n = params.universe.len();
    let mut rows = BTreeMap::new();
    for m in menus.iter() {
        let mut row = vec![T::zero(); n];
        for x in m.iter() {
            row[x] = ddst_prob(params, m, x)?;
        }
        rows.insert(m, row);
    }
    ChoiceData::new(menus.clone(), rows)
}

/// Choice probability with singletons implicitly one.
fn prob<T: Scalar>(rho: &ChoiceData<T>, x: usize, menu: Menu) -> Result<T, ExtensionError> {
    if menu.len() == 1 && menu.contains(x) {
        return Ok(T::one());
    }
    rho.prob(x, menu).cloned().ok_or_else(|| ExtensionError::MissingMenu(rho.universe().label(menu)))
}

fn odds<T: Scalar>(rho: &ChoiceData<T>, x: usize, y: usize, menu: Menu) -> Result<T, ExtensionError> {
    Ok(prob(rho, x, menu)? / prob(rho, y, menu)?)
}

fn require_positive<T: Scalar>(rho: &ChoiceData<T>) -> Result<(), ExtensionError> {
    for m in rho.menus() {
        for x in m.iter() {
            if !(prob(rho, x, m)? > T::zero()) {
                return Err(ExtensionError::NotPositive(format!("{} in {}", rho.universe().id(x), rho.universe().label(m))));
            }
        }
    }
    Ok(())
}

/// `a > b` beyond the float tolerance; plain `>` for exact scalars.
fn clearly_greater<T: Scalar>(a: &T, b: &T) -> bool {
    let scale = T::from_f64(a.to_f64().abs().max(b.to_f64().abs()).max(1.0)).unwrap_or_else(T::one);
    a.clone() - b.clone() > T::tolerance(1e-12) * scale
}

fn reproduces<T: Scalar>(params: &DDstParams<T>, rho: &ChoiceData<T>) -> Result<(), ExtensionError> {
    let fitted = ddst_rcf(params, rho.collection())?;
    for m in rho.menus() {
        for x in m.iter() {
            let (a, b) = (prob(rho, x, m)?, prob(&fitted, x, m)?);
            if !a.approx_eq(&b, FIT_TOL) {
                return Err(ExtensionError::AxiomViolation {
                    axiom: "representation".into(),
                    detail: format!("fitted {} differs from observed {} for {} in {}", b, a, rho.universe().id(x), rho.universe().label(m)),
                });
            }
        }
    }
    Ok(())
}

/// Per-menu weights backed out from the least preferred option of each menu.
fn menu_alphas<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder, weights: &LuceWeights<T>) -> Result<BTreeMap<Menu, T>, ExtensionError> {
    let mut alphas = BTreeMap::new();
    for m in rho.menus().filter(|m| m.len() >= 2) {
        let worst = order.worst_in(m).expect("non-empty");
        let a = T::one() - prob(rho, worst, m)? * weights.total(m) / weights.get(worst).clone();
        if !(a > T::zero() && a < T::one()) {
            return Err(ExtensionError::AxiomViolation {
                axiom: "cognitive weight".into(),
                detail: format!("weight {} in {} lies outside (0, 1)", a, rho.universe().label(m)),
            });
        }
        alphas.insert(m, a);
    }
    Ok(alphas)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DDstConstruction<T: Scalar = f64> {
    pub params: DDstParams<T>,
    /// Admissible open interval for the weight on the full menu.
    pub alpha_full_interval: (T, T),
    /// Every order for which the construction goes through.
    pub orders: Vec<LinearOrder>,
    /// Always false: the full-menu weight can be moved within its interval.
    pub unique: bool,
}

fn three_menus(u: &Universe) -> (Menu, impl Fn(usize, usize) -> Menu) {
    (u.full_menu(), |a: usize, b: usize| Menu::from_indices([a, b]))
}

/// Orders `best > mid > worst` for which the tripleton odds of the worst
/// option exceed its binary odds against the middle one.
fn admissible_orders<T: Scalar>(rho: &ChoiceData<T>) -> Result<Vec<LinearOrder>, ExtensionError> {
    let (full, pair) = three_menus(rho.universe());
    let mut out = Vec::new();
    for order in LinearOrder::all(3) {
        let (mid, worst) = (order.ranking()[1], order.ranking()[2]);
        if clearly_greater(&odds(rho, worst, mid, full)?, &odds(rho, worst, mid, pair(mid, worst))?) {
            out.push(order);
        }
    }
    Ok(out)
}

/// Open interval of full-menu weights that work for `order`.
pub fn alpha_full_bounds<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder) -> Result<(T, T), ExtensionError> {
    let (full, pair) = three_menus(rho.universe());
    let [x, y, z] = [order.ranking()[0], order.ranking()[1], order.ranking()[2]];
    let binary = {
        let (a, b) = (odds(rho, x, y, pair(x, y))?, odds(rho, x, z, pair(x, z))?);
        if a < b { a } else { b }
    };
    let (py, pz) = (prob(rho, y, full)?, prob(rho, z, full)?);
    let smaller = if py < pz { py } else { pz };
    let px = prob(rho, x, full)?;
    let lo = px.clone() - binary * smaller;
    let lo = if lo > T::zero() { lo } else { T::zero() };
    Ok((lo, px))
}

/// Representation for a given order and full-menu weight, following the
/// constructive argument for three options.
pub fn ddst_construct_3_with<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder, alpha_full: T) -> Result<DDstParams<T>, ExtensionError> {
    let u = rho.universe();
    if u.len() != 3 {
        return Err(ExtensionError::WrongUniverseSize(u.len()));
    }
    require_positive(rho)?;
    let (full, pair) = three_menus(u);
    let [x, y, z] = [order.ranking()[0], order.ranking()[1], order.ranking()[2]];
    let (lo, hi) = alpha_full_bounds(rho, order)?;
    if !(alpha_full > lo && alpha_full < hi) {
        return Err(ExtensionError::NoRepresentation(format!("full-menu weight {alpha_full} outside ({lo}, {hi})")));
    }
    let scale = T::one() - alpha_full.clone();
    let wy = prob(rho, y, full)? / scale.clone();
    let wz = prob(rho, z, full)? / scale.clone();
    let wx = T::one() - wy.clone() - wz.clone();
    let mut w = vec![T::zero(); 3];
    w[x] = wx.clone();
    w[y] = wy.clone();
    w[z] = wz.clone();
    let alpha_pair = |worse: usize, better: usize| -> Result<T, ExtensionError> {
        Ok(T::one() - prob(rho, worse, pair(better, worse))? * (w[better].clone() + w[worse].clone()) / w[worse].clone())
    };
    let alphas = BTreeMap::from([(full, alpha_full), (pair(x, y), alpha_pair(y, x)?), (pair(x, z), alpha_pair(z, x)?), (pair(y, z), alpha_pair(z, y)?)]);
    for (m, a) in &alphas {
        if !(*a > T::zero() && *a < T::one()) {
            return Err(ExtensionError::NoRepresentation(format!("weight {} on {} outside (0, 1)", a, u.label(*m))));
        }
    }
    let params = DDstParams::new(u.clone(), alphas, order.clone(), LuceWeights::new(w)?)?;
    reproduces(&params, rho)?;
    Ok(params)
}

/// A representation of a positive three-option choice function that
/// violates IIA, with the full-menu weight at the middle of its range.
pub fn ddst_construct_3<T: Scalar>(rho: &ChoiceData<T>) -> Result<DDstConstruction<T>, ExtensionError> {
    let u = rho.universe();
    if u.len() != 3 {
        return Err(ExtensionError::WrongUniverseSize(u.len()));
    }
    require_positive(rho)?;
    let orders = admissible_orders(rho)?;
    let Some(order) = orders.first().cloned() else {
        return Err(ExtensionError::NoRepresentation("odds are menu-independent (IIA holds)".into()));
    };
    let (lo, hi) = alpha_full_bounds(rho, &order)?;
    let mid = (lo.clone() + hi.clone()) / T::from_i64(2);
    let params = ddst_construct_3_with(rho, &order, mid)?;
    Ok(DDstConstruction { params, alpha_full_interval: (lo, hi), orders, unique: false })
}

fn order_from_relation(n: usize, beats: impl Fn(usize, usize) -> bool) -> Option<LinearOrder> {
    let mut wins: Vec<(usize, usize)> = (0..n).map(|x| ((0..n).filter(|&y| y != x && beats(x, y)).count(), x)).collect();
    wins.sort_by(|a, b| b.cmp(a));
    let ranking: Vec<usize> = wins.iter().map(|w| w.1).collect();
    let linear = (0..n).all(|i| (i + 1..n).all(|j| beats(ranking[i], ranking[j]) && !beats(ranking[j], ranking[i])));
    linear.then(|| LinearOrder::new(ranking).expect("permutation"))
}

/// Order revealed by within-menu probability rankings; `None` when the
/// rankings disagree across menus or tie.
pub fn consistent_revealed_order<T: Scalar>(rho: &ChoiceData<T>) -> Result<Option<LinearOrder>, ExtensionError> {
    let n = rho.universe().len();
    let mut beats = vec![vec![false; n]; n];
    for (x, row) in beats.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            if x == y {
                continue;
            }
            let mut menus = rho.menus().filter(|m| m.contains(x) && m.contains(y)).peekable();
            if menus.peek().is_none() {
                continue;
            }
            let mut all = true;
            for m in menus {
                all &= clearly_greater(&prob(rho, x, m)?, &prob(rho, y, m)?);
            }
            *cell = all;
        }
    }
    Ok(order_from_relation(n, |a, b| beats[a][b]))
}

/// Order revealed by how removing the known best option shifts binary odds.
pub fn known_best_revealed_order<T: Scalar>(rho: &ChoiceData<T>, best: usize) -> Result<Option<LinearOrder>, ExtensionError> {
    let n = rho.universe().len();
    let mut beats = vec![vec![false; n]; n];
    for y in 0..n {
        if y != best {
            beats[best][y] = true;
        }
    }
    for y in (0..n).filter(|&y| y != best) {
        for z in (0..n).filter(|&z| z != best && z != y) {
            let pair = Menu::from_indices([y, z]);
            beats[y][z] = clearly_greater(&odds(rho, y, z, pair)?, &odds(rho, y, z, pair.with(best))?);
        }
    }
    Ok(order_from_relation(n, |a, b| beats[a][b]))
}

fn witness<T: Scalar>(u: &Universe, alts: &[usize], menus: &[Menu], values: &[T]) -> Witness {
    Witness {
        alternatives: alts.iter().map(|&a| u.id(a).to_string()).collect(),
        menus: menus.iter().map(|&m| u.label(m)).collect(),
        values: values.iter().map(T::to_f64).collect(),
    }
}

/// The best option of a menu gains relative odds over menus where it is not
/// best.
pub fn check_best_option_gain<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder) -> Result<AxiomReport, ExtensionError> {
    let u = rho.universe();
    let mut report = AxiomReport::new(Axiom::BestOptionGain);
    let menus: Vec<Menu> = rho.menus().filter(|m| m.len() >= 2).collect();
    for &s in &menus {
        let x = order.best_in(s).expect("non-empty");
        for &t in menus.iter().filter(|t| t.contains(x) && order.best_in(**t) != Some(x)) {
            for y in s.intersection(t).iter().filter(|&y| y != x) {
                let (a, b) = (odds(rho, x, y, s)?, odds(rho, x, y, t)?);
                if !clearly_greater(&a, &b) {
                    report.violate(witness(u, &[x, y], &[s, t], &[a, b]));
                }
            }
        }
    }
    Ok(report)
}

/// With the same best option in two menus, its odds in one exceed any other
/// option's odds in the other.
pub fn check_shared_best_gain<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder) -> Result<AxiomReport, ExtensionError> {
    let u = rho.universe();
    let mut report = AxiomReport::new(Axiom::SharedBestGain);
    let menus: Vec<Menu> = rho.menus().filter(|m| m.len() >= 2).collect();
    for &s in &menus {
        let x = order.best_in(s).expect("non-empty");
        for &t in menus.iter().filter(|t| order.best_in(**t) == Some(x)) {
            for y in s.intersection(t).iter().filter(|&y| y != x) {
                for z in t.iter().filter(|&z| z != x && z != y) {
                    let (a, b) = (odds(rho, x, y, s)?, odds(rho, z, y, t)?);
                    if !clearly_greater(&a, &b) {
                        report.violate(witness(u, &[x, y, z], &[s, t], &[a, b]));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Odds between options that are not best are menu-independent and
/// multiply along chains.
pub fn check_transitive_iia<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder) -> Result<AxiomReport, ExtensionError> {
    let u = rho.universe();
    let n = u.len();
    let mut report = AxiomReport::new(Axiom::TransitiveIia);
    let mut reference: BTreeMap<(usize, usize), (Menu, T)> = BTreeMap::new();
    for s in rho.menus().filter(|m| m.len() >= 2) {
        let best = order.best_in(s).expect("non-empty");
        for x in s.iter().filter(|&x| x != best) {
            for y in s.iter().filter(|&y| y != best && y != x) {
                let r = odds(rho, x, y, s)?;
                match reference.get(&(x, y)) {
                    None => {
                        reference.insert((x, y), (s, r));
                    }
                    Some((m0, r0)) => {
                        if !r.approx_eq(r0, FIT_TOL) {
                            report.violate(witness(u, &[x, y], &[*m0, s], &[r0.clone(), r]));
                        }
                    }
                }
            }
        }
    }
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            for z in (0..n).filter(|&z| z != x && z != y) {
                if let (Some((s, a)), Some((t, b)), Some((v, c))) = (reference.get(&(x, y)), reference.get(&(y, z)), reference.get(&(x, z))) {
                    let chained = a.clone() * b.clone();
                    if !chained.approx_eq(c, FIT_TOL) {
                        report.violate(witness(u, &[x, y, z], &[*s, *t, *v], &[chained, c.clone()]));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DDstIdentification<T: Scalar = f64> {
    pub params: DDstParams<T>,
    /// Open interval of admissible best-option weights, relative to a unit
    /// weight on the least preferred option. The returned parameters use
    /// its midpoint.
    pub top_weight_interval: (T, T),
    /// False: the best option's weight, and the menu weights of menus that
    /// contain it, are only set-identified.
    pub unique: bool,
    pub reports: Vec<AxiomReport>,
}

fn fail_on(reports: &[AxiomReport]) -> Result<(), ExtensionError> {
    if let Some(r) = reports.iter().find(|r| !r.passed) {
        let w = &r.witnesses[0];
        return Err(ExtensionError::AxiomViolation {
            axiom: format!("{:?}", r.axiom),
            detail: format!("options {:?} in menus {:?}: {:?}", w.alternatives, w.menus, w.values),
        });
    }
    Ok(())
}

fn build_from_order<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder, top_floor: Option<()>) -> Result<(DDstParams<T>, (T, T)), ExtensionError> {
    let u = rho.universe();
    let n = u.len();
    let best = order.ranking()[0];
    let worst = order.ranking()[n - 1];
    let mut raw = vec![T::zero(); n];
    raw[worst] = T::one();
    for &y in &order.ranking()[1..n - 1] {
        let t = Menu::from_indices([best, y, worst]);
        raw[y] = odds(rho, y, worst, t)?;
    }
    let mut hi: Option<T> = None;
    for s in rho.menus().filter(|m| m.contains(best) && m.len() >= 2) {
        for z in s.iter().filter(|&z| z != best) {
            let bound = odds(rho, best, z, s)? * raw[z].clone();
            if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        }
    }
    let hi = hi.ok_or_else(|| ExtensionError::MissingMenu(format!("a menu containing {}", u.id(best))))?;
    let lo = match top_floor {
        Some(()) => order.ranking()[1..].iter().map(|&y| raw[y].clone()).fold(T::zero(), |a, b| if b > a { b } else { a }),
        None => T::zero(),
    };
    if !clearly_greater(&hi, &lo) {
        return Err(ExtensionError::AxiomViolation {
            axiom: "best-option weight".into(),
            detail: format!("no admissible weight for {} in ({lo}, {hi})", u.id(best)),
        });
    }
    raw[best] = (lo.clone() + hi.clone()) / T::from_i64(2);
    let weights = LuceWeights::new(raw)?;
    let alphas = menu_alphas(rho, order, &weights)?;
    let params = DDstParams::new(u.clone(), alphas, order.clone(), weights)?;
    reproduces(&params, rho)?;
    Ok((params, (lo, hi)))
}

/// Identification when salience and preference rank options alike: the
/// order comes from within-menu rankings and the weights from tripleton
/// odds against the least preferred option.
pub fn ddst_identify_consistent<T: Scalar>(rho: &ChoiceData<T>) -> Result<DDstIdentification<T>, ExtensionError> {
    let n = rho.universe().len();
    if n < 2 {
        return Err(ExtensionError::WrongUniverseSize(n));
    }
    require_positive(rho)?;
    let Some(order) = consistent_revealed_order(rho)? else {
        return Err(ExtensionError::InconsistentRanking("within-menu rankings do not form one linear order".into()));
    };
    let reports = vec![
        check_best_option_gain(rho, &order)?,
        check_shared_best_gain(rho, &order)?,
        check_transitive_iia(rho, &order)?,
    ];
    fail_on(&reports)?;
    let (params, interval) = build_from_order(rho, &order, Some(()))?;
    Ok(DDstIdentification { params, top_weight_interval: interval, unique: false, reports })
}

/// Identification when the analyst knows which option is best overall.
pub fn ddst_identify_known_best<T: Scalar>(rho: &ChoiceData<T>, best: usize) -> Result<DDstIdentification<T>, ExtensionError> {
    let u = rho.universe();
    let n = u.len();
    if n < 2 {
        return Err(ExtensionError::WrongUniverseSize(n));
    }
    if best >= n {
        return Err(ModelError::AlternativeNotInMenu(best).into());
    }
    require_positive(rho)?;
    let Some(order) = known_best_revealed_order(rho, best)? else {
        return Err(ExtensionError::AxiomViolation {
            axiom: "revealed order".into(),
            detail: "removing the best option does not strictly rank every pair".into(),
        });
    };
    let reports = vec![check_best_option_gain(rho, &order)?, check_transitive_iia(rho, &order)?];
    fail_on(&reports)?;
    let (params, interval) = build_from_order(rho, &order, None)?;
    Ok(DDstIdentification { params, top_weight_interval: interval, unique: false, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::check_iia;
    use crate::model::ChoiceModel;
    use crate::scalar::{ratio, Rational};
    use proptest::prelude::*;

    fn xyz() -> Universe {
        Universe::new(["x", "y", "z"]).unwrap()
    }

    fn cyclic() -> ChoiceData<Rational> {
        let u = xyz();
        let m = |ids: &[usize]| Menu::from_indices(ids.iter().copied());
        let (q, t) = (ratio(3, 4), ratio(1, 4));
        let third = ratio(1, 3);
        let rows = BTreeMap::from([
            (m(&[0, 1, 2]), vec![third.clone(), third.clone(), third]),
            (m(&[0, 1]), vec![q.clone(), t.clone(), Rational::zero()]),
            (m(&[1, 2]), vec![Rational::zero(), q.clone(), t.clone()]),
            (m(&[0, 2]), vec![t, Rational::zero(), q]),
        ]);
        ChoiceData::new(MenuCollection::with_sizes(u, 2, 3), rows).unwrap()
    }

    fn showcase_params() -> DDstParams<Rational> {
        let m = |ids: &[usize]| Menu::from_indices(ids.iter().copied());
        let alphas = BTreeMap::from([(m(&[0, 1]), ratio(11, 16)), (m(&[0, 2]), ratio(1, 16)), (m(&[1, 2]), ratio(1, 2)), (m(&[0, 1, 2]), ratio(1, 4))]);
        let w = LuceWeights::new(vec![ratio(1, 9), ratio(4, 9), ratio(4, 9)]).unwrap();
        DDstParams::new(xyz(), alphas, LinearOrder::identity(3), w).unwrap()
    }

    #[test]
    fn showcase_parameters_generate_the_cycle() {
        let data = ddst_rcf(&showcase_params(), &MenuCollection::with_sizes(xyz(), 1, 3)).unwrap();
        assert_eq!(data.restrict(|m| m.len() >= 2).unwrap(), cyclic());
        assert_eq!(data.prob(0, Menu::singleton(0)).unwrap(), &Rational::one());
    }

    #[test]
    fn constant_weight_matches_plain_model() {
        let u = xyz();
        let menus = MenuCollection::with_sizes(u.clone(), 2, 3);
        let w = LuceWeights::new(vec![0.2, 0.5, 0.3]).unwrap();
        let order = LinearOrder::new(vec![2, 0, 1]).unwrap();
        let plain = crate::types::DstParams::new(u.clone(), 0.35, order.clone(), w.clone()).unwrap();
        let d = DDstParams::new(u, menus.iter().map(|m| (m, 0.35)).collect(), order, w).unwrap();
        let (a, b) = (ddst_rcf(&d, &menus).unwrap(), crate::model::dst_rcf(&plain, &menus).unwrap());
        for m in menus.iter() {
            for x in m.iter() {
                assert!((a.prob(x, m).unwrap() - b.prob(x, m).unwrap()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cycle_has_three_cyclic_representations() {
        let rho = cyclic();
        let c = ddst_construct_3(&rho).unwrap();
        let labels: Vec<String> = c.orders.iter().map(|o| o.label(rho.universe())).collect();
        assert_eq!(labels.len(), 3);
        for want in ["x>y>z", "y>z>x", "z>x>y"] {
            assert!(labels.iter().any(|l| l == want), "{labels:?}");
        }
        for order in &c.orders {
            let (lo, hi) = alpha_full_bounds(&rho, order).unwrap();
            let mid = (lo + hi) / Rational::from_i64(2);
            ddst_construct_3_with(&rho, order, mid).unwrap();
        }
        assert!(!c.unique);
    }

    #[test]
    fn construction_with_quarter_weight_gives_showcase_parameters() {
        let rho = cyclic();
        let p = ddst_construct_3_with(&rho, &LinearOrder::identity(3), ratio(1, 4)).unwrap();
        assert_eq!(p, showcase_params());
    }

    #[test]
    fn luce_has_no_menu_weight_representation() {
        let u = xyz();
        let rho = ChoiceModel::Luce { universe: u.clone(), weights: LuceWeights::new(vec![0.2, 0.3, 0.5]).unwrap() }
            .rcf(&MenuCollection::with_sizes(u, 2, 3))
            .unwrap();
        assert!(matches!(ddst_construct_3(&rho), Err(ExtensionError::NoRepresentation(_))));
        assert!(ddst_identify_consistent(&rho).is_err());
        assert!(ddst_identify_known_best(&rho, 2).is_err());
    }

    #[test]
    fn wrong_size_and_zero_probability() {
        let u = Universe::new(["a", "b"]).unwrap();
        let rho = ChoiceModel::Luce { universe: u.clone(), weights: LuceWeights::<f64>::uniform(2) }.rcf(&MenuCollection::with_sizes(u, 2, 2)).unwrap();
        assert_eq!(ddst_construct_3(&rho), Err(ExtensionError::WrongUniverseSize(2)));
        let u = xyz();
        let max: ChoiceData = ChoiceModel::Max { universe: u.clone(), order: LinearOrder::identity(3) }.rcf(&MenuCollection::with_sizes(u, 2, 3)).unwrap();
        assert!(matches!(ddst_construct_3(&max), Err(ExtensionError::NotPositive(_))));
    }

    #[test]
    fn known_best_recovers_cycle_order() {
        let id = ddst_identify_known_best(&cyclic(), 0).unwrap();
        assert_eq!(id.params.order(), &LinearOrder::identity(3));
        // The showcase ratio w(x)/w(z) = 1/4 is admissible.
        let (lo, hi) = &id.top_weight_interval;
        assert!(*lo < ratio(1, 4) && ratio(1, 4) < *hi);
        let id_y = ddst_identify_known_best(&cyclic(), 1).unwrap();
        assert_eq!(id_y.params.order().label(&xyz()), "y>z>x");
    }

    fn consistent_params(n: usize, order: Vec<usize>, raw_w: Vec<i64>, alphas: &[i64]) -> DDstParams<Rational> {
        let u = Universe::new(["a", "b", "c", "d", "e"].into_iter().take(n)).unwrap();
        let order = LinearOrder::new(order).unwrap();
        // Weights decreasing along the order.
        let mut sorted = raw_w.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted.dedup();
        assert_eq!(sorted.len(), n);
        let mut w = vec![Rational::zero(); n];
        for (rank, &x) in order.ranking().iter().enumerate() {
            w[x] = ratio(sorted[rank], 1);
        }
        let menus = MenuCollection::with_sizes(u.clone(), 2, n);
        let a = menus.iter().zip(alphas.iter().cycle()).map(|(m, &k)| (m, ratio(k, 100))).collect();
        DDstParams::new(u, a, order, LuceWeights::new(w).unwrap()).unwrap()
    }

    #[test]
    fn consistent_round_trip_exact() {
        let p = consistent_params(4, vec![2, 0, 3, 1], vec![9, 5, 3, 2], &[30, 55, 12, 71, 44, 5, 63]);
        let rho = ddst_rcf(&p, &MenuCollection::with_sizes(p.universe().clone(), 2, 4)).unwrap();
        let id = ddst_identify_consistent(&rho).unwrap();
        assert_eq!(id.params.order(), p.order());
        let best = p.order().ranking()[0];
        let worst = p.order().ranking()[3];
        for x in (0..4).filter(|&x| x != best) {
            let got = id.params.weights().get(x).clone() / id.params.weights().get(worst).clone();
            let want = p.weights().get(x).clone() / p.weights().get(worst).clone();
            assert_eq!(got, want);
        }
        let true_top = p.weights().get(best).clone() / p.weights().get(worst).clone();
        assert!(id.top_weight_interval.0 < true_top && true_top < id.top_weight_interval.1);
        for (m, a) in p.alphas().iter().filter(|(m, _)| !m.contains(best)) {
            assert_eq!(id.params.alpha(*m).unwrap(), a);
        }
        assert!(id.reports.iter().all(|r| r.passed));
        assert!(!id.unique);
    }

    #[test]
    fn misaligned_salience_breaks_consistent_identification() {
        // Salience favours the least preferred option strongly.
        let u = xyz();
        let menus = MenuCollection::with_sizes(u.clone(), 2, 3);
        let a = menus.iter().map(|m| (m, 0.2)).collect();
        let p = DDstParams::new(u, a, LinearOrder::identity(3), LuceWeights::new(vec![0.1, 0.2, 0.7]).unwrap()).unwrap();
        let rho = ddst_rcf(&p, &menus).unwrap();
        assert!(matches!(ddst_identify_consistent(&rho), Err(ExtensionError::InconsistentRanking(_))));
        // Knowing the best option still recovers the order.
        assert_eq!(ddst_identify_known_best(&rho, 0).unwrap().params.order(), &LinearOrder::identity(3));
    }

    fn arb_rcf3() -> impl Strategy<Value = ChoiceData> {
        (proptest::collection::vec(0.05f64..1.0, 3), proptest::collection::vec(0.05f64..0.95, 3)).prop_map(|(t, pairs)| {
            let u = xyz();
            let total: f64 = t.iter().sum();
            let m = |a: usize, b: usize| Menu::from_indices([a, b]);
            let mut rows = BTreeMap::from([(u.full_menu(), t.iter().map(|v| v / total).collect::<Vec<_>>())]);
            for (k, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
                let mut r = vec![0.0; 3];
                r[a] = pairs[k];
                r[b] = 1.0 - pairs[k];
                rows.insert(m(a, b), r);
            }
            ChoiceData::new(MenuCollection::with_sizes(u, 2, 3), rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn construction_iff_iia_fails(rho in arb_rcf3()) {
            let iia = check_iia(&rho, 1e-7).unwrap().passed;
            let built = ddst_construct_3(&rho);
            prop_assert_eq!(built.is_ok(), !iia);
            if let Ok(c) = built {
                let fitted = ddst_rcf(&c.params, rho.collection()).unwrap();
                for m in rho.menus() {
                    for x in m.iter() {
                        prop_assert!((fitted.prob(x, m).unwrap() - rho.prob(x, m).unwrap()).abs() < 1e-9);
                    }
                }
            }
        }

        #[test]
        fn luce_data_is_never_constructed(w in proptest::collection::vec(0.05f64..1.0, 3)) {
            let u = xyz();
            let rho = ChoiceModel::Luce { universe: u.clone(), weights: LuceWeights::new(w).unwrap() }.rcf(&MenuCollection::with_sizes(u, 2, 3)).unwrap();
            prop_assert!(ddst_construct_3(&rho).is_err());
        }

        #[test]
        fn menu_weights_always_break_iia(a in proptest::collection::vec(0.01f64..0.99, 4), w in proptest::collection::vec(0.05f64..1.0, 3)) {
            let u = xyz();
            let menus = MenuCollection::with_sizes(u.clone(), 2, 3);
            let p = DDstParams::new(u, menus.iter().zip(a).collect(), LinearOrder::identity(3), LuceWeights::new(w).unwrap()).unwrap();
            let rho = ddst_rcf(&p, &menus).unwrap();
            let full = Menu::full(3);
            let yz = Menu::from_indices([1, 2]);
            prop_assert!(odds(&rho, 1, 2, full).unwrap() < odds(&rho, 1, 2, yz).unwrap());
        }

        #[test]
        fn consistent_round_trip_float(
            perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
            w in proptest::collection::btree_set(1u32..1000, 4),
            a in proptest::collection::vec(0.05f64..0.95, 11),
        ) {
            let u = Universe::new(["a", "b", "c", "d"]).unwrap();
            let order = LinearOrder::new(perm).unwrap();
            let sorted: Vec<f64> = w.iter().rev().map(|&v| v as f64).collect();
            let mut weights = vec![0.0; 4];
            for (rank, &x) in order.ranking().iter().enumerate() {
                weights[x] = sorted[rank];
            }
            let menus = MenuCollection::with_sizes(u.clone(), 2, 4);
            let p = DDstParams::new(u, menus.iter().zip(a).collect(), order.clone(), LuceWeights::new(weights).unwrap()).unwrap();
            let rho = ddst_rcf(&p, &menus).unwrap();
            let id = ddst_identify_consistent(&rho).unwrap();
            prop_assert_eq!(id.params.order(), &order);
            let best = order.ranking()[0];
            for (m, alpha) in p.alphas().iter().filter(|(m, _)| !m.contains(best)) {
                prop_assert!((id.params.alpha(*m).unwrap() - alpha).abs() < 1e-9);
            }
            let known = ddst_identify_known_best(&rho, best).unwrap();
            prop_assert_eq!(known.params.order(), &order);
        }
    }
}
