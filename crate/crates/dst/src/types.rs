//! Alternatives, menus, orders, weights and choice data.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::scalar::Scalar;

/// Identifier reserved for the outside (default) option.
pub const DEFAULT_ID: &str = "__default__";

/// Largest universe a [`Menu`] bitset can hold.
pub const MAX_UNIVERSE: usize = 63;

/// Row-sum tolerance for floating-point choice data.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Finite, lexicographically sorted set of alternative ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Universe {
    ids: Vec<String>,
}

impl Universe {
    pub fn new<I, S>(ids: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        ids.sort();
        for id in &ids {
            if id.trim().is_empty() {
                return Err(ModelError::InvalidAlternative(id.clone()));
            }
            if id == DEFAULT_ID {
                return Err(ModelError::ReservedId(id.clone()));
            }
        }
        if let Some((a, _)) = ids.iter().tuple_windows().find(|(a, b)| a == b) {
            return Err(ModelError::DuplicateAlternative(a.clone()));
        }
        if ids.is_empty() {
            return Err(ModelError::EmptyUniverse);
        }
        if ids.len() > MAX_UNIVERSE {
            return Err(ModelError::UniverseTooLarge { size: ids.len(), max: MAX_UNIVERSE });
        }
        Ok(Self { ids })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, ModelError> {
        self.ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .map_err(|_| ModelError::UnknownAlternative(id.to_string()))
    }

    pub fn full_menu(&self) -> Menu {
        Menu::full(self.len())
    }

    pub fn menu<S: AsRef<str>>(&self, ids: &[S]) -> Result<Menu, ModelError> {
        let mut menu = Menu::EMPTY;
        for id in ids {
            let i = self.index_of(id.as_ref())?;
            if menu.contains(i) {
                return Err(ModelError::DuplicateAlternative(id.as_ref().to_string()));
            }
            menu = menu.with(i);
        }
        Ok(menu)
    }

    pub fn menu_ids(&self, menu: Menu) -> Vec<String> {
        menu.iter().map(|i| self.ids[i].clone()).collect()
    }

    /// `{a,b,c}` style label.
    pub fn label(&self, menu: Menu) -> String {
        format!("{{{}}}", menu.iter().map(|i| self.id(i)).join(","))
    }
}

impl TryFrom<Vec<String>> for Universe {
    type Error = ModelError;
    fn try_from(ids: Vec<String>) -> Result<Self, Self::Error> {
        Universe::new(ids)
    }
}

impl From<Universe> for Vec<String> {
    fn from(u: Universe) -> Self {
        u.ids
    }
}

/// Subset of a universe, stored as a bitset over universe indices.
///
/// Menus order by size first, then by bit pattern.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Menu(u64);

impl Menu {
    pub const EMPTY: Menu = Menu(0);

    pub fn from_bits(bits: u64) -> Self {
        Menu(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Menu(u64::MAX)
        } else {
            Menu((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Menu(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(items: I) -> Self {
        items.into_iter().fold(Menu::EMPTY, |m, i| m.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        Menu(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        Menu(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Menu) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Menu) -> Menu {
        Menu(self.0 | other.0)
    }

    pub fn intersection(self, other: Menu) -> Menu {
        Menu(self.0 & other.0)
    }

    pub fn difference(self, other: Menu) -> Menu {
        Menu(self.0 & !other.0)
    }

    /// Members in ascending index order.
    pub fn iter(self) -> MenuIter {
        MenuIter(self.0)
    }

    /// Every subset, the empty set and `self` included.
    pub fn subsets(self) -> impl Iterator<Item = Menu> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some(((cur | !full).wrapping_add(1)) & full) };
            Some(Menu(cur))
        })
    }

    /// Parity sign `(-1)^|self \ sub|`.
    pub fn alternating_sign(self, sub: Menu) -> i64 {
        if self.difference(sub).len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl Ord for Menu {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for Menu {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Menu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Menu{:?}", self.iter().collect::<Vec<_>>())
    }
}

pub struct MenuIter(u64);

impl Iterator for MenuIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Observable menus over a universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MenuCollection {
    universe: Universe,
    menus: BTreeSet<Menu>,
}

/// How far a menu collection is from being closed under subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Richness {
    /// Subsets with at least two elements that are missing.
    pub missing_subsets: Vec<Menu>,
    /// Pairs and triples of the universe that are missing.
    pub missing_small: Vec<Menu>,
}

impl Richness {
    pub fn is_rich(&self) -> bool {
        self.missing_subsets.is_empty() && self.missing_small.is_empty()
    }
}

impl MenuCollection {
    pub fn new<I: IntoIterator<Item = Menu>>(universe: Universe, menus: I) -> Result<Self, ModelError> {
        let full = universe.full_menu();
        let menus: BTreeSet<Menu> = menus.into_iter().collect();
        for &m in &menus {
            if m.is_empty() {
                return Err(ModelError::EmptyMenu);
            }
            if !m.is_subset_of(full) {
                return Err(ModelError::MenuOutsideUniverse);
            }
        }
        Ok(Self { universe, menus })
    }

    /// All non-empty subsets of the universe.
    pub fn all_nonempty(universe: Universe) -> Self {
        Self::with_sizes(universe, 1, usize::MAX)
    }

    /// All subsets whose size lies in `min..=max`.
    pub fn with_sizes(universe: Universe, min: usize, max: usize) -> Self {
        let menus = universe
            .full_menu()
            .subsets()
            .filter(|m| m.len() >= min.max(1) && m.len() <= max)
            .collect();
        Self { universe, menus }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn contains(&self, menu: Menu) -> bool {
        self.menus.contains(&menu)
    }

    pub fn iter(&self) -> impl Iterator<Item = Menu> + '_ {
        self.menus.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.menus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.menus.is_empty()
    }

    /// Singletons carry no information, so richness ignores them.
    pub fn richness(&self) -> Richness {
        let mut missing_subsets = BTreeSet::new();
        for &m in &self.menus {
            for sub in m.subsets() {
                if sub.len() >= 2 && !self.menus.contains(&sub) {
                    missing_subsets.insert(sub);
                }
            }
        }
        let missing_small = self
            .universe
            .full_menu()
            .subsets()
            .filter(|m| (m.len() == 2 || m.len() == 3) && !self.menus.contains(m))
            .collect();
        Richness { missing_subsets: missing_subsets.into_iter().collect(), missing_small }
    }

    pub fn is_complete(&self) -> bool {
        self.universe.full_menu().subsets().all(|m| m.is_empty() || self.menus.contains(&m))
    }
}

/// Strict ranking of the universe, best first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearOrder {
    ranking: Vec<usize>,
    position: Vec<usize>,
}

impl LinearOrder {
    pub fn new(ranking: Vec<usize>) -> Result<Self, ModelError> {
        let n = ranking.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &i) in ranking.iter().enumerate() {
            if i >= n || position[i] != usize::MAX {
                return Err(ModelError::InvalidOrder);
            }
            position[i] = pos;
        }
        Ok(Self { ranking, position })
    }

    /// Order in which index `i` ranks `i`-th.
    pub fn identity(n: usize) -> Self {
        Self::new((0..n).collect()).expect("identity permutation")
    }

    pub fn from_ids<S: AsRef<str>>(universe: &Universe, ids: &[S]) -> Result<Self, ModelError> {
        if ids.len() != universe.len() {
            return Err(ModelError::InvalidOrder);
        }
        let ranking = ids.iter().map(|id| universe.index_of(id.as_ref())).collect::<Result<_, _>>()?;
        Self::new(ranking)
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// Zero for the best alternative.
    pub fn rank(&self, i: usize) -> usize {
        self.position[i]
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    pub fn best_in(&self, menu: Menu) -> Option<usize> {
        menu.iter().min_by_key(|&i| self.position[i])
    }

    pub fn worst_in(&self, menu: Menu) -> Option<usize> {
        menu.iter().max_by_key(|&i| self.position[i])
    }

    /// Members of `menu`, best first.
    pub fn sorted(&self, menu: Menu) -> Vec<usize> {
        let mut v: Vec<usize> = menu.iter().collect();
        v.sort_by_key(|&i| self.position[i]);
        v
    }

    pub fn ids(&self, universe: &Universe) -> Vec<String> {
        self.ranking.iter().map(|&i| universe.id(i).to_string()).collect()
    }

    /// `a>b>c` style label.
    pub fn label(&self, universe: &Universe) -> String {
        self.ranking.iter().map(|&i| universe.id(i)).join(">")
    }

    /// All `n!` orders, in lexicographic order of their rankings.
    pub fn all(n: usize) -> impl Iterator<Item = LinearOrder> {
        (0..n).permutations(n).map(|r| LinearOrder::new(r).expect("permutation"))
    }
}

/// Complete preorder as an ordered partition, best class first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakOrder {
    classes: Vec<Menu>,
    class_of: Vec<usize>,
}

impl WeakOrder {
    pub fn new(classes: Vec<Menu>, n: usize) -> Result<Self, ModelError> {
        let mut class_of = vec![usize::MAX; n];
        for (c, m) in classes.iter().enumerate() {
            if m.is_empty() {
                return Err(ModelError::InvalidOrder);
            }
            for i in m.iter() {
                if i >= n || class_of[i] != usize::MAX {
                    return Err(ModelError::InvalidOrder);
                }
                class_of[i] = c;
            }
        }
        if class_of.contains(&usize::MAX) {
            return Err(ModelError::InvalidOrder);
        }
        Ok(Self { classes, class_of })
    }

    pub fn from_linear(order: &LinearOrder) -> Self {
        let classes = order.ranking().iter().map(|&i| Menu::singleton(i)).collect();
        Self::new(classes, order.len()).expect("linear order is a weak order")
    }

    pub fn classes(&self) -> &[Menu] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Elements of `menu` in its best class.
    pub fn maximal_in(&self, menu: Menu) -> Menu {
        let best = menu.iter().map(|i| self.class_of[i]).min();
        match best {
            Some(c) => Menu::from_indices(menu.iter().filter(|&i| self.class_of[i] == c)),
            None => Menu::EMPTY,
        }
    }

    /// Every ordered set partition of `0..n`.
    pub fn all(n: usize) -> Vec<WeakOrder> {
        fn rec(remaining: Menu, prefix: &mut Vec<Menu>, n: usize, out: &mut Vec<WeakOrder>) {
            if remaining.is_empty() {
                out.push(WeakOrder::new(prefix.clone(), n).expect("partition"));
                return;
            }
            for first in remaining.subsets().filter(|m| !m.is_empty()) {
                prefix.push(first);
                rec(remaining.difference(first), prefix, n, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(Menu::full(n), &mut Vec::new(), n, &mut out);
        out
    }
}

/// Positive weights over the universe, normalized to sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct LuceWeights<T: Scalar = f64> {
    values: Vec<T>,
}

impl<T: Scalar> LuceWeights<T> {
    pub fn new(values: Vec<T>) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::EmptyUniverse);
        }
        for (i, v) in values.iter().enumerate() {
            let f = v.to_f64();
            if !(*v > T::zero()) || !f.is_finite() {
                return Err(ModelError::NonPositiveWeight { index: i, value: f });
            }
        }
        let total = T::sum(&values);
        let values = values.into_iter().map(|v| v / total.clone()).collect();
        Ok(Self { values })
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(vec![T::one(); n]).expect("uniform weights")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn total(&self, menu: Menu) -> T {
        T::sum(menu.iter().map(|i| &self.values[i]))
    }

    pub fn to_f64(&self) -> LuceWeights<f64> {
        LuceWeights { values: self.values.iter().map(Scalar::to_f64).collect() }
    }
}

/// Parameters of the dual-system model: System-2 weight, preference and salience.
#[derive(Clone, Debug, PartialEq)]
pub struct DstParams<T: Scalar = f64> {
    universe: Universe,
    alpha: T,
    order: LinearOrder,
    weights: LuceWeights<T>,
}

impl<T: Scalar> DstParams<T> {
    pub fn new(universe: Universe, alpha: T, order: LinearOrder, weights: LuceWeights<T>) -> Result<Self, ModelError> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(ModelError::InvalidAlpha(alpha.to_f64()));
        }
        if order.len() != universe.len() || weights.len() != universe.len() {
            return Err(ModelError::DimensionMismatch { expected: universe.len(), got: order.len().max(weights.len()) });
        }
        Ok(Self { universe, alpha, order, weights })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    pub fn order(&self) -> &LinearOrder {
        &self.order
    }

    pub fn weights(&self) -> &LuceWeights<T> {
        &self.weights
    }

    pub fn to_f64(&self) -> DstParams<f64> {
        DstParams {
            universe: self.universe.clone(),
            alpha: self.alpha.to_f64(),
            order: self.order.clone(),
            weights: self.weights.to_f64(),
        }
    }
}

/// Probability of facing each menu.
#[derive(Clone, Debug, PartialEq)]
pub struct MenuWeights {
    weights: BTreeMap<Menu, f64>,
}

impl MenuWeights {
    pub fn new(collection: &MenuCollection, weights: BTreeMap<Menu, f64>) -> Result<Self, ModelError> {
        for m in collection.iter() {
            match weights.get(&m) {
                Some(&w) if w > 0.0 && w <= 1.0 => {}
                Some(&w) => return Err(ModelError::InvalidMenuWeight(w)),
                None => return Err(ModelError::MissingMenu(collection.universe().label(m))),
            }
        }
        if weights.keys().any(|m| !collection.contains(*m)) {
            return Err(ModelError::MenuOutsideCollection);
        }
        let total: f64 = weights.values().sum();
        if (total - 1.0).abs() > ROW_SUM_TOL {
            return Err(ModelError::RowSum { menu: "menu weights".into(), sum: total });
        }
        Ok(Self { weights })
    }

    pub fn uniform(collection: &MenuCollection) -> Self {
        let w = 1.0 / collection.len() as f64;
        Self { weights: collection.iter().map(|m| (m, w)).collect() }
    }

    /// Normalizes positive masses into menu probabilities.
    pub fn from_masses(collection: &MenuCollection, masses: BTreeMap<Menu, f64>) -> Result<Self, ModelError> {
        let total: f64 = masses.values().sum();
        if !(total > 0.0) {
            return Err(ModelError::InvalidMenuWeight(total));
        }
        Self::new(collection, masses.into_iter().map(|(m, v)| (m, v / total)).collect())
    }

    pub fn get(&self, menu: Menu) -> f64 {
        self.weights.get(&menu).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Menu, f64)> + '_ {
        self.weights.iter().map(|(m, w)| (*m, *w))
    }
}

/// Random choice function observed or predicted on a menu collection.
///
/// Rows are indexed by universe position and are zero outside the menu.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceData<T: Scalar = f64> {
    collection: MenuCollection,
    rows: BTreeMap<Menu, Vec<T>>,
}

impl<T: Scalar> ChoiceData<T> {
    pub fn new(collection: MenuCollection, rows: BTreeMap<Menu, Vec<T>>) -> Result<Self, ModelError> {
        let universe = collection.universe();
        let n = universe.len();
        for m in collection.iter() {
            let row = rows.get(&m).ok_or_else(|| ModelError::MissingMenu(universe.label(m)))?;
            if row.len() != n {
                return Err(ModelError::DimensionMismatch { expected: n, got: row.len() });
            }
            for (i, v) in row.iter().enumerate() {
                if !m.contains(i) && !v.is_zero() {
                    return Err(ModelError::MassOutsideMenu {
                        menu: universe.label(m),
                        alternative: universe.id(i).to_string(),
                    });
                }
                if *v < T::zero() || *v > T::one() || !v.to_f64().is_finite() {
                    return Err(ModelError::InvalidProbability { menu: universe.label(m), value: v.to_f64() });
                }
            }
            let sum = T::sum(row);
            if !sum.approx_eq(&T::one(), ROW_SUM_TOL) {
                return Err(ModelError::RowSum { menu: universe.label(m), sum: sum.to_f64() });
            }
        }
        if rows.keys().any(|m| !collection.contains(*m)) {
            return Err(ModelError::MenuOutsideCollection);
        }
        Ok(Self { collection, rows })
    }

    pub fn collection(&self) -> &MenuCollection {
        &self.collection
    }

    pub fn universe(&self) -> &Universe {
        self.collection.universe()
    }

    pub fn menus(&self) -> impl Iterator<Item = Menu> + '_ {
        self.collection.iter()
    }

    pub fn row(&self, menu: Menu) -> Option<&[T]> {
        self.rows.get(&menu).map(Vec::as_slice)
    }

    pub fn prob(&self, x: usize, menu: Menu) -> Option<&T> {
        if !menu.contains(x) {
            return None;
        }
        self.rows.get(&menu).map(|r| &r[x])
    }

    /// Like [`ChoiceData::prob`] but reports which menu is missing.
    pub fn get(&self, x: usize, menu: Menu) -> Result<&T, ModelError> {
        self.prob(x, menu).ok_or_else(|| ModelError::MissingMenu(self.universe().label(menu)))
    }

    /// True if every in-menu probability is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.rows.iter().all(|(m, r)| m.iter().all(|i| r[i] > T::zero()))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Result<ChoiceData<U>, ModelError> {
        let rows = self.rows.iter().map(|(m, r)| (*m, r.iter().map(&f).collect())).collect();
        ChoiceData::new(self.collection.clone(), rows)
    }

    pub fn to_f64(&self) -> ChoiceData<f64> {
        ChoiceData {
            collection: self.collection.clone(),
            rows: self.rows.iter().map(|(m, r)| (*m, r.iter().map(Scalar::to_f64).collect())).collect(),
        }
    }

    /// Restriction to the menus satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(Menu) -> bool) -> Result<ChoiceData<T>, ModelError> {
        let collection = MenuCollection::new(self.universe().clone(), self.collection.iter().filter(|m| keep(*m)))?;
        let rows = self.rows.iter().filter(|(m, _)| keep(**m)).map(|(m, r)| (*m, r.clone())).collect();
        ChoiceData::new(collection, rows)
    }
}
