//! Choice when options are randomly available and an outside default is
//! taken from an empty menu.

use std::collections::BTreeMap;

use crate::axioms::{Axiom, AxiomReport, Witness};
use crate::error::{AvailabilityError, ModelError};
use crate::identify::{identify, IdentifyConfig};
use crate::model::dst_prob;
use crate::scalar::Scalar;
use crate::types::{ChoiceData, DstParams, Menu, MenuCollection, Universe, DEFAULT_ID, ROW_SUM_TOL};

/// Subset sums are exponential in the menu size.
pub const MAX_MENU_SIZE: usize = 16;

fn check_size(universe: &Universe, menu: Menu) -> Result<(), AvailabilityError> {
    if menu.len() > MAX_MENU_SIZE {
        return Err(AvailabilityError::MenuTooLarge { menu: universe.label(menu), size: menu.len(), max: MAX_MENU_SIZE });
    }
    Ok(())
}

fn require_subset_closed(collection: &MenuCollection) -> Result<(), AvailabilityError> {
    let u = collection.universe();
    for m in collection.iter() {
        check_size(u, m)?;
        if m.subsets().any(|s| !s.is_empty() && !collection.contains(s)) {
            return Err(AvailabilityError::NotSubsetClosed(u.label(m)));
        }
    }
    Ok(())
}

/// Distribution of the set of available options, with mass on every
/// observed menu and on the empty set.
#[derive(Clone, Debug, PartialEq)]
pub struct AvailabilityDistribution<T: Scalar = f64> {
    collection: MenuCollection,
    masses: BTreeMap<Menu, T>,
}

impl<T: Scalar> AvailabilityDistribution<T> {
    pub fn new(collection: MenuCollection, masses: BTreeMap<Menu, T>) -> Result<Self, AvailabilityError> {
        require_subset_closed(&collection)?;
        let u = collection.universe();
        let bad = |msg: String| Err(AvailabilityError::InvalidAvailability(msg));
        if masses.len() != collection.len() + 1 || !masses.contains_key(&Menu::EMPTY) {
            return bad("masses must cover the empty set and exactly the menus of the collection".into());
        }
        for (m, v) in &masses {
            if !m.is_empty() && !collection.contains(*m) {
                return bad(format!("{} is not in the collection", u.label(*m)));
            }
            if !(*v > T::zero() && *v < T::one()) {
                return bad(format!("mass {} on {} is outside (0, 1)", v, u.label(*m)));
            }
        }
        let total = T::sum(masses.values());
        if !total.approx_eq(&T::one(), ROW_SUM_TOL) {
            return bad(format!("masses sum to {total}"));
        }
        Ok(Self { collection, masses })
    }

    /// Each option available independently with probability `phi[i]`.
    pub fn independent(universe: Universe, phi: &[T]) -> Result<Self, AvailabilityError> {
        let n = universe.len();
        if phi.len() != n {
            return Err(ModelError::DimensionMismatch { expected: n, got: phi.len() }.into());
        }
        if let Some(p) = phi.iter().find(|p| !(**p > T::zero() && **p < T::one())) {
            return Err(AvailabilityError::InvalidPhi(p.to_f64()));
        }
        let full = universe.full_menu();
        check_size(&universe, full)?;
        let masses = full
            .subsets()
            .map(|s| {
                let mass = (0..n).fold(T::one(), |acc, i| acc * if s.contains(i) { phi[i].clone() } else { T::one() - phi[i].clone() });
                (s, mass)
            })
            .collect();
        Self::new(MenuCollection::all_nonempty(universe), masses)
    }

    pub fn universe(&self) -> &Universe {
        self.collection.universe()
    }

    pub fn collection(&self) -> &MenuCollection {
        &self.collection
    }

    pub fn get(&self, menu: Menu) -> Option<&T> {
        self.masses.get(&menu)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Menu, &T)> + '_ {
        self.masses.iter().map(|(m, v)| (*m, v))
    }

    /// Probability that the available set is contained in `menu`.
    pub fn mass_within(&self, menu: Menu) -> Result<T, AvailabilityError> {
        let mut total = T::zero();
        for s in menu.subsets() {
            let v = self.masses.get(&s).ok_or_else(|| ModelError::MissingMenu(self.universe().label(s)))?;
            total = total + v.clone();
        }
        Ok(total)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DstPaParams<T: Scalar = f64> {
    pub base: DstParams<T>,
    pub pi: AvailabilityDistribution<T>,
}

impl<T: Scalar> DstPaParams<T> {
    pub fn new(base: DstParams<T>, pi: AvailabilityDistribution<T>) -> Result<Self, AvailabilityError> {
        if base.universe() != pi.universe() {
            return Err(ModelError::UniverseMismatch.into());
        }
        Ok(Self { base, pi })
    }

    pub fn default_id(&self) -> &'static str {
        DEFAULT_ID
    }
}

/// Choice probabilities over a subset-closed collection, plus the
/// probability of the default on every menu and on the empty menu.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceDataWithDefault<T: Scalar = f64> {
    collection: MenuCollection,
    rows: BTreeMap<Menu, Vec<T>>,
    default: BTreeMap<Menu, T>,
}

impl<T: Scalar> ChoiceDataWithDefault<T> {
    pub fn new(collection: MenuCollection, rows: BTreeMap<Menu, Vec<T>>, default: BTreeMap<Menu, T>) -> Result<Self, AvailabilityError> {
        require_subset_closed(&collection)?;
        let u = collection.universe();
        let n = u.len();
        let empty = default.get(&Menu::EMPTY).ok_or(AvailabilityError::MissingEmptyMenu)?;
        if !empty.approx_eq(&T::one(), ROW_SUM_TOL) {
            return Err(AvailabilityError::EmptyMenuDefault(empty.to_f64()));
        }
        for m in collection.iter() {
            let row = rows.get(&m).ok_or_else(|| ModelError::MissingMenu(u.label(m)))?;
            let d = default.get(&m).ok_or_else(|| AvailabilityError::MissingDefault(u.label(m)))?;
            if row.len() != n {
                return Err(ModelError::DimensionMismatch { expected: n, got: row.len() }.into());
            }
            for (i, v) in row.iter().chain(std::iter::once(d)).enumerate() {
                if i < n && !m.contains(i) && !v.is_zero() {
                    return Err(ModelError::MassOutsideMenu { menu: u.label(m), alternative: u.id(i).to_string() }.into());
                }
                if *v < T::zero() || *v > T::one() {
                    return Err(ModelError::InvalidProbability { menu: u.label(m), value: v.to_f64() }.into());
                }
            }
            let sum = T::sum(row) + d.clone();
            if !sum.approx_eq(&T::one(), ROW_SUM_TOL) {
                return Err(ModelError::RowSum { menu: u.label(m), sum: sum.to_f64() }.into());
            }
        }
        if rows.keys().chain(default.keys()).any(|m| !m.is_empty() && !collection.contains(*m)) {
            return Err(ModelError::MenuOutsideCollection.into());
        }
        Ok(Self { collection, rows, default })
    }

    pub fn universe(&self) -> &Universe {
        self.collection.universe()
    }

    pub fn collection(&self) -> &MenuCollection {
        &self.collection
    }

    pub fn menus(&self) -> impl Iterator<Item = Menu> + '_ {
        self.collection.iter()
    }

    pub fn rows(&self) -> &BTreeMap<Menu, Vec<T>> {
        &self.rows
    }

    pub fn defaults(&self) -> &BTreeMap<Menu, T> {
        &self.default
    }

    pub fn row(&self, menu: Menu) -> Option<&[T]> {
        self.rows.get(&menu).map(Vec::as_slice)
    }

    /// Probability of the default; one on the empty menu.
    pub fn default_prob(&self, menu: Menu) -> Option<&T> {
        self.default.get(&menu)
    }

    pub fn prob(&self, x: usize, menu: Menu) -> Option<&T> {
        self.rows.get(&menu).and_then(|r| r.get(x))
    }

    pub fn to_f64(&self) -> ChoiceDataWithDefault<f64> {
        ChoiceDataWithDefault {
            collection: self.collection.clone(),
            rows: self.rows.iter().map(|(m, r)| (*m, r.iter().map(T::to_f64).collect())).collect(),
            default: self.default.iter().map(|(m, v)| (*m, v.to_f64())).collect(),
        }
    }

    fn positive_default(&self, menu: Menu) -> Result<&T, AvailabilityError> {
        let d = self.default.get(&menu).ok_or_else(|| AvailabilityError::MissingDefault(self.universe().label(menu)))?;
        if !(*d > T::zero()) {
            return Err(AvailabilityError::ZeroDefault(self.universe().label(menu)));
        }
        Ok(d)
    }

    /// Odds of `x` against the default; zero when `x` is not in the menu.
    fn odds(&self, x: usize, menu: Menu) -> Result<T, AvailabilityError> {
        if !menu.contains(x) {
            return Ok(T::zero());
        }
        let d = self.positive_default(menu)?.clone();
        Ok(self.rows[&menu][x].clone() / d)
    }
}

/// Choice probabilities generated by DST on whatever subset of the menu
/// turns out to be available.
pub fn dstpa_rcf<T: Scalar>(params: &DstPaParams<T>, menus: &MenuCollection) -> Result<ChoiceDataWithDefault<T>, AvailabilityError> {
    require_subset_closed(menus)?;
    if menus.universe() != params.base.universe() {
        return Err(ModelError::UniverseMismatch.into());
    }
    let n = menus.universe().len();
    let empty_mass = params.pi.get(Menu::EMPTY).expect("empty set carries mass").clone();
    let mut rows = BTreeMap::new();
    let mut default = BTreeMap::from([(Menu::EMPTY, T::one())]);
    for s in menus.iter() {
        let within = params.pi.mass_within(s)?;
        let mut row = vec![T::zero(); n];
        for t in s.subsets().filter(|t| !t.is_empty()) {
            let mass = params.pi.get(t).expect("checked by mass_within").clone();
            for x in t.iter() {
                row[x] = row[x].clone() + mass.clone() * dst_prob(&params.base, t, x)?;
            }
        }
        rows.insert(s, row.into_iter().map(|v| v / within.clone()).collect());
        default.insert(s, empty_mass.clone() / within);
    }
    ChoiceDataWithDefault::new(menus.clone(), rows, default)
}

/// `sum_{A in S} (-1)^{|S \ A|} / rho(default, A)`, which equals the ratio
/// of the mass on `S` to the mass on the empty set.
pub fn default_mobius<T: Scalar>(data: &ChoiceDataWithDefault<T>, menu: Menu) -> Result<T, AvailabilityError> {
    check_size(data.universe(), menu)?;
    let mut total = T::zero();
    for a in menu.subsets() {
        let term = T::one() / data.positive_default(a)?.clone();
        total = if menu.alternating_sign(a) > 0 { total + term } else { total - term };
    }
    Ok(total)
}

/// Largest ratio of the absolute terms to the result across the alternating
/// sums; large values mean the float results lost precision.
pub fn mobius_conditioning<T: Scalar>(data: &ChoiceDataWithDefault<T>) -> Result<f64, AvailabilityError> {
    let mut worst: f64 = 1.0;
    for s in data.menus() {
        let mut magnitude = 0.0;
        for a in s.subsets() {
            magnitude += 1.0 / data.positive_default(a)?.to_f64();
        }
        worst = worst.max(magnitude / default_mobius(data, s)?.to_f64().abs());
    }
    Ok(worst)
}

fn positive_mobius<T: Scalar>(data: &ChoiceDataWithDefault<T>, menu: Menu) -> Result<T, AvailabilityError> {
    let m = default_mobius(data, menu)?;
    if !(m > T::tolerance(1e-12)) {
        return Err(AvailabilityError::BlockMarschakViolation { menu: data.universe().label(menu), value: m.to_f64() });
    }
    Ok(m)
}

/// Availability distribution implied by the default probabilities.
pub fn recover_pi<T: Scalar>(data: &ChoiceDataWithDefault<T>) -> Result<AvailabilityDistribution<T>, AvailabilityError> {
    let mut ratios = BTreeMap::from([(Menu::EMPTY, T::one())]);
    for s in data.menus() {
        ratios.insert(s, positive_mobius(data, s)?);
    }
    let total = T::sum(ratios.values());
    let masses = ratios.into_iter().map(|(m, r)| (m, r / total.clone())).collect();
    AvailabilityDistribution::new(data.collection().clone(), masses)
}

fn finish_associated<T: Scalar>(
    data: &ChoiceDataWithDefault<T>,
    numerator: impl Fn(usize, Menu) -> Result<T, AvailabilityError>,
) -> Result<ChoiceData<T>, AvailabilityError> {
    let u = data.universe();
    let mut rows = BTreeMap::new();
    for s in data.menus() {
        let m = positive_mobius(data, s)?;
        let mut row = vec![T::zero(); u.len()];
        for x in s.iter() {
            let v = numerator(x, s)? / m.clone();
            let slack = T::tolerance(ROW_SUM_TOL);
            if v < T::zero() - slack.clone() || v > T::one() + slack {
                return Err(AvailabilityError::NormalizationFailure {
                    menu: u.label(s),
                    detail: format!("{} gets {}", u.id(x), v),
                });
            }
            // Rounding can push a float a hair outside [0, 1].
            row[x] = if v < T::zero() { T::zero() } else if v > T::one() { T::one() } else { v };
        }
        let sum = T::sum(&row);
        if !sum.approx_eq(&T::one(), ROW_SUM_TOL) {
            return Err(AvailabilityError::NormalizationFailure { menu: u.label(s), detail: format!("row sums to {sum}") });
        }
        rows.insert(s, row);
    }
    Ok(ChoiceData::new(data.collection().clone(), rows)?)
}

/// Choice probabilities with the availability noise removed.
pub fn associated_rcf<T: Scalar>(data: &ChoiceDataWithDefault<T>) -> Result<ChoiceData<T>, AvailabilityError> {
    finish_associated(data, |x, s| {
        let mut total = T::zero();
        for t in s.subsets().filter(|t| t.contains(x)) {
            let o = data.odds(x, t)?;
            total = if s.alternating_sign(t) > 0 { total + o } else { total - o };
        }
        Ok(total)
    })
}

/// Same quantity as [`associated_rcf`], computed by pairing each subset
/// containing a second option `z` with the subset that drops it.
pub fn associated_rcf_pairwise<T: Scalar>(data: &ChoiceDataWithDefault<T>) -> Result<ChoiceData<T>, AvailabilityError> {
    finish_associated(data, |x, s| {
        let Some(z) = s.iter().find(|&z| z != x) else {
            return data.odds(x, s);
        };
        let mut total = T::zero();
        for t in s.subsets().filter(|t| t.contains(x) && t.contains(z)) {
            let diff = data.odds(x, t)? - data.odds(x, t.without(z))?;
            total = if s.alternating_sign(t) > 0 { total + diff } else { total - diff };
        }
        Ok(total)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DstPaIdentification<T: Scalar = f64> {
    pub params: DstPaParams<T>,
    pub associated: ChoiceData<T>,
    pub conditioning: f64,
}

/// Recovers the availability distribution and the DST parameters of the
/// associated choice function.
pub fn identify_dstpa<T: Scalar>(data: &ChoiceDataWithDefault<T>, cfg: &IdentifyConfig) -> Result<DstPaIdentification<T>, AvailabilityError> {
    let pi = recover_pi(data)?;
    let associated = associated_rcf(data)?;
    let base = identify(&associated, cfg).map_err(AvailabilityError::NoDstRepresentation)?.params;
    let conditioning = mobius_conditioning(data)?;
    Ok(DstPaIdentification { params: DstPaParams::new(base, pi)?, associated, conditioning })
}

/// Positivity of every alternating sum of inverse default probabilities.
pub fn check_block_marschak_default<T: Scalar>(data: &ChoiceDataWithDefault<T>) -> Result<AxiomReport, AvailabilityError> {
    let mut report = AxiomReport::new(Axiom::BlockMarschakDefault);
    for s in data.menus() {
        let m = default_mobius(data, s)?;
        if !(m > T::tolerance(1e-12)) {
            let v = m.to_f64();
            report.max_deviation = report.max_deviation.max(-v);
            report.violate(Witness { alternatives: data.universe().menu_ids(s), menus: vec![data.universe().label(s)], values: vec![v] });
        }
    }
    Ok(report)
}

/// Adding `x` scales the default probability by the same factor in every
/// menu.
pub fn check_mido<T: Scalar>(data: &ChoiceDataWithDefault<T>, tol: f64) -> Result<AxiomReport, AvailabilityError> {
    let u = data.universe();
    let mut report = AxiomReport::new(Axiom::MenuIndependentDefault);
    for x in 0..u.len() {
        let single = Menu::singleton(x);
        if !data.collection().contains(single) {
            continue;
        }
        let base = data.positive_default(single)?.clone();
        for s in data.menus().filter(|s| s.len() > 1 && s.contains(x)) {
            let ratio = data.positive_default(s)?.clone() / data.positive_default(s.without(x))?.clone();
            if !ratio.approx_eq(&base, tol) {
                let dev = (ratio.to_f64() - base.to_f64()).abs();
                report.max_deviation = report.max_deviation.max(dev);
                report.violate(Witness {
                    alternatives: vec![u.id(x).to_string()],
                    menus: vec![u.label(s), u.label(single)],
                    values: vec![ratio.to_f64(), base.to_f64()],
                });
            }
        }
    }
    Ok(report)
}

/// Per-option availability probabilities, after checking that the
/// recovered distribution is an independent product.
pub fn recover_phi<T: Scalar>(data: &ChoiceDataWithDefault<T>, tol: f64) -> Result<Vec<T>, AvailabilityError> {
    let u = data.universe();
    let report = check_mido(data, tol)?;
    if let Some(w) = report.witnesses.first() {
        return Err(AvailabilityError::MidoViolation {
            alternative: w.alternatives[0].clone(),
            detail: format!("ratio {} in {} against {} in {}", w.values[0], w.menus[0], w.values[1], w.menus[1]),
        });
    }
    let mut phi = Vec::with_capacity(u.len());
    for x in 0..u.len() {
        let single = Menu::singleton(x);
        if !data.collection().contains(single) {
            return Err(ModelError::MissingMenu(u.label(single)).into());
        }
        phi.push(T::one() - data.positive_default(single)?.clone());
    }
    let pi = recover_pi(data)?;
    for s in data.menus() {
        let within = pi.mass_within(s)?;
        for t in s.subsets() {
            let lhs = pi.get(t).expect("recovered on every menu").clone() / within.clone();
            let rhs = s.iter().fold(T::one(), |acc, i| acc * if t.contains(i) { phi[i].clone() } else { T::one() - phi[i].clone() });
            if !lhs.approx_eq(&rhs, tol) {
                return Err(AvailabilityError::MidoViolation {
                    alternative: u.label(t),
                    detail: format!("conditional mass {} within {} differs from the product {}", lhs, u.label(s), rhs),
                });
            }
        }
    }
    Ok(phi)
}
