//! Recovering the preference, System-2 weight and salience weights from a
//! random choice function.

use crate::error::{IdentifyError, ModelError};
use crate::model::dst_row;
use crate::scalar::Scalar;
use crate::types::{ChoiceData, DstParams, LinearOrder, LuceWeights, Menu, MenuCollection, Universe};

/// Tolerances for identification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentifyConfig {
    /// Relative-odds differences within this band count as zero.
    pub sign_eps: f64,
    /// Allowed relative spread of the per-triple alpha values.
    pub tol_alpha: f64,
}

impl Default for IdentifyConfig {
    fn default() -> Self {
        Self { sign_eps: 1e-7, tol_alpha: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Positive => '+',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleOutcome {
    /// Best, middle, worst.
    Ordered([usize; 3]),
    Cyclic,
    Ambiguous,
}

/// Sign pattern of the three relative-odds differences of a triple.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleSigns {
    /// Labels `(x, y, z)` in ascending index order.
    pub triple: [usize; 3],
    /// `D(x,y;z)`, `D(y,z;x)`, `D(z,x;y)`.
    pub values: [f64; 3],
    pub signs: [Sign; 3],
    pub outcome: TripleOutcome,
}

/// How the odds of `x` against `y` change when `z` joins the pair:
/// `rho(x,T)/rho(y,T) - rho(x,{x,y})/rho(y,{x,y})` with `T = {x,y,z}`.
pub fn relative_odds_difference<T: Scalar>(rho: &ChoiceData<T>, x: usize, y: usize, z: usize) -> Result<T, IdentifyError> {
    if x == y || y == z || x == z {
        return Err(IdentifyError::NotATriple);
    }
    let triple = Menu::from_indices([x, y, z]);
    let pair = Menu::from_indices([x, y]);
    let odds = |m: Menu| -> Result<T, IdentifyError> {
        let px = positive(rho, x, m)?;
        let py = positive(rho, y, m)?;
        Ok(px / py)
    };
    Ok(odds(triple)? - odds(pair)?)
}

/// Classifies a triple from the signs of its relative-odds differences.
pub fn classify_triple<T: Scalar>(rho: &ChoiceData<T>, x: usize, y: usize, z: usize, sign_eps: f64) -> Result<TripleSigns, IdentifyError> {
    let eps = T::tolerance(sign_eps);
    let sign = |d: &T| {
        if d.abs() <= eps {
            Sign::Zero
        } else if *d > T::zero() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    };
    let d = [
        relative_odds_difference(rho, x, y, z)?,
        relative_odds_difference(rho, y, z, x)?,
        relative_odds_difference(rho, z, x, y)?,
    ];
    let signs = [sign(&d[0]), sign(&d[1]), sign(&d[2])];
    let outcome = outcome_from_signs([x, y, z], signs);
    Ok(TripleSigns { triple: [x, y, z], values: [d[0].to_f64(), d[1].to_f64(), d[2].to_f64()], signs, outcome })
}

/// Maps a sign pattern to the order it reveals. For best `a`, middle `b`
/// and worst `c`, the model implies `D(a,b;c) > 0`, `D(b,c;a) < 0` and
/// `D(c,a;b) < 0`; swapping the first two arguments flips a sign.
pub fn outcome_from_signs(labels: [usize; 3], signs: [Sign; 3]) -> TripleOutcome {
    if signs.contains(&Sign::Zero) {
        return TripleOutcome::Ambiguous;
    }
    if signs.iter().all(|s| *s == signs[0]) {
        return TripleOutcome::Cyclic;
    }
    let [x, y, z] = labels;
    let sign_of = |p: usize, q: usize| -> Sign {
        match (p, q) {
            _ if (p, q) == (x, y) => signs[0],
            _ if (p, q) == (y, x) => signs[0].flip(),
            _ if (p, q) == (y, z) => signs[1],
            _ if (p, q) == (z, y) => signs[1].flip(),
            _ if (p, q) == (z, x) => signs[2],
            _ => signs[2].flip(),
        }
    };
    for [a, b, c] in [[x, y, z], [x, z, y], [y, x, z], [y, z, x], [z, x, y], [z, y, x]] {
        if sign_of(a, b) == Sign::Positive && sign_of(b, c) == Sign::Negative && sign_of(c, a) == Sign::Negative {
            return TripleOutcome::Ordered([a, b, c]);
        }
    }
    unreachable!("every non-constant sign pattern matches one order")
}

/// Revealed preference together with the per-triple evidence.
#[derive(Clone, Debug, PartialEq)]
pub struct RevealedPreference {
    pub order: LinearOrder,
    pub triples: Vec<TripleSigns>,
}

/// Whether a triple and its three pairs are all observed.
pub fn triple_observed(collection: &MenuCollection, [x, y, z]: [usize; 3]) -> bool {
    [Menu::from_indices([x, y, z]), Menu::from_indices([x, y]), Menu::from_indices([y, z]), Menu::from_indices([x, z])]
        .into_iter()
        .all(|m| collection.contains(m))
}

/// Aggregates the classifications of the observed triples into a linear
/// order. Comparisons not settled by a triple are filled in by transitivity;
/// the result must rank every pair.
pub fn revealed_preference<T: Scalar>(rho: &ChoiceData<T>, cfg: &IdentifyConfig) -> Result<RevealedPreference, IdentifyError> {
    let universe = rho.universe();
    let n = universe.len();
    if n < 3 {
        return Err(IdentifyError::TooFewAlternatives(n));
    }
    let mut triples = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                if triple_observed(rho.collection(), [x, y, z]) {
                    triples.push(classify_triple(rho, x, y, z, cfg.sign_eps)?);
                }
            }
        }
    }
    if triples.is_empty() {
        return Err(IdentifyError::MissingMenu("any triple with its pairs".into()));
    }
    let label = |t: &TripleSigns| universe.label(Menu::from_indices(t.triple));
    let ambiguous: Vec<String> = triples.iter().filter(|t| t.outcome == TripleOutcome::Ambiguous).map(label).collect();
    if !ambiguous.is_empty() {
        return Err(IdentifyError::Ambiguous { triples: ambiguous });
    }
    let cyclic: Vec<String> = triples.iter().filter(|t| t.outcome == TripleOutcome::Cyclic).map(label).collect();
    if !cyclic.is_empty() {
        return Err(IdentifyError::AxiomViolation {
            axiom: "rationality".into(),
            detail: format!("cyclic sign pattern on {}", cyclic.join(", ")),
        });
    }
    // beats[a][b]: some triple ranks a above b.
    let mut beats = vec![vec![false; n]; n];
    let mut conflicts = Vec::new();
    for t in &triples {
        let TripleOutcome::Ordered(r) = t.outcome else { unreachable!() };
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let (a, b) = (r[i], r[j]);
            if beats[b][a] {
                conflicts.push(format!("{} vs {} in {}", universe.id(a), universe.id(b), label(t)));
            }
            beats[a][b] = true;
        }
    }
    if !conflicts.is_empty() {
        return Err(IdentifyError::AxiomViolation {
            axiom: "rationality".into(),
            detail: format!("triples disagree: {}", conflicts.join("; ")),
        });
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                if beats[a][k] && beats[k][b] {
                    beats[a][b] = true;
                }
            }
        }
    }
    if (0..n).any(|a| beats[a][a]) {
        return Err(IdentifyError::AxiomViolation {
            axiom: "rationality".into(),
            detail: "revealed relation is not transitive".into(),
        });
    }
    let unranked: Vec<String> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !beats[a][b] && !beats[b][a])
        .map(|(a, b)| format!("{}/{}", universe.id(a), universe.id(b)))
        .collect();
    if !unranked.is_empty() {
        return Err(IdentifyError::Incomplete { pairs: unranked });
    }
    let wins: Vec<usize> = (0..n).map(|a| (0..n).filter(|&b| beats[a][b]).count()).collect();
    let mut ranking: Vec<usize> = (0..n).collect();
    ranking.sort_by(|a, b| wins[*b].cmp(&wins[*a]));
    Ok(RevealedPreference { order: LinearOrder::new(ranking)?, triples })
}

/// System-2 weight estimated from every triple.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaEstimate<T: Scalar = f64> {
    /// Mean over triples.
    pub alpha: T,
    /// Triples as best, middle, worst with their value.
    pub per_triple: Vec<([usize; 3], T)>,
    pub max_deviation: f64,
    /// Set when the estimate is not inside (0, 1).
    pub boundary: bool,
}

/// For `x > y > z`: `alpha = 1 - rho(z,{y,z}) * (rho(z,T) + rho(y,T)) / rho(z,T)`.
pub fn alpha_from_triple<T: Scalar>(rho: &ChoiceData<T>, ranked: [usize; 3]) -> Result<T, IdentifyError> {
    let [x, y, z] = ranked;
    let t = Menu::from_indices([x, y, z]);
    let yz = Menu::from_indices([y, z]);
    let z_pair = positive(rho, z, yz)?;
    let z_t = positive(rho, z, t)?;
    let y_t = positive(rho, y, t)?;
    Ok(T::one() - z_pair * (z_t.clone() + y_t) / z_t)
}

pub fn recover_alpha<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder, tol_alpha: f64) -> Result<AlphaEstimate<T>, IdentifyError> {
    let n = rho.universe().len();
    if n < 3 {
        return Err(IdentifyError::TooFewAlternatives(n));
    }
    if order.len() != n {
        return Err(ModelError::InvalidOrder.into());
    }
    let r = order.ranking();
    let mut per_triple = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let ranked = [r[i], r[j], r[k]];
                if triple_observed(rho.collection(), ranked) {
                    per_triple.push((ranked, alpha_from_triple(rho, ranked)?));
                }
            }
        }
    }
    if per_triple.is_empty() {
        return Err(IdentifyError::MissingMenu("any triple with its pairs".into()));
    }
    let count = T::from_i64(per_triple.len() as i64);
    let alpha = T::sum(per_triple.iter().map(|(_, a)| a)) / count;
    let mean = alpha.to_f64();
    let scale = mean.abs().max(1.0);
    let max_deviation = per_triple.iter().map(|(_, a)| (a.to_f64() - mean).abs() / scale).fold(0.0, f64::max);
    let consistent = per_triple.iter().all(|(_, a)| a.approx_eq(&alpha, tol_alpha));
    if !consistent {
        let universe = rho.universe();
        return Err(IdentifyError::InconsistentAlpha {
            mean,
            max_deviation,
            per_triple: per_triple
                .iter()
                .map(|(t, a)| (t.iter().map(|&i| universe.id(i)).collect::<Vec<_>>().join(">"), a.to_f64()))
                .collect(),
        });
    }
    let boundary = !(alpha > T::zero() && alpha < T::one()) || (!T::EXACT && (mean <= tol_alpha || mean >= 1.0 - tol_alpha));
    Ok(AlphaEstimate { alpha, per_triple, max_deviation, boundary })
}

/// Salience weights from the binary menus that contain the worst alternative.
///
/// With `z` worst: `w(z) = 1 / (sum_y (1-alpha)/rho(z,{y,z}) - |X| + 2)` and
/// `w(y) = w(z) * ((1-alpha)/rho(z,{y,z}) - 1)`.
pub fn recover_weights<T: Scalar>(rho: &ChoiceData<T>, order: &LinearOrder, alpha: &T) -> Result<LuceWeights<T>, IdentifyError> {
    let universe = rho.universe();
    let n = universe.len();
    if n < 2 {
        return Err(IdentifyError::TooFewAlternatives(n));
    }
    let z = order.worst_in(universe.full_menu()).ok_or(ModelError::InvalidOrder)?;
    let one_minus = T::one() - alpha.clone();
    let mut ratio = vec![T::zero(); n];
    let mut total = T::zero();
    for y in (0..n).filter(|&y| y != z) {
        let r = one_minus.clone() / positive(rho, z, Menu::from_indices([y, z]))?;
        total = total + r.clone();
        ratio[y] = r;
    }
    let wz = T::one() / (total - T::from_i64(n as i64) + T::from_i64(2));
    let mut values = vec![T::zero(); n];
    for (y, slot) in values.iter_mut().enumerate() {
        *slot = if y == z { wz.clone() } else { wz.clone() * (ratio[y].clone() - T::one()) };
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > T::zero())) {
        return Err(IdentifyError::NonPositiveWeight { alternative: universe.id(i).to_string(), value: v.to_f64() });
    }
    Ok(LuceWeights::new(values)?)
}

/// Identified parameters with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Identification<T: Scalar = f64> {
    pub params: DstParams<T>,
    pub alpha: AlphaEstimate<T>,
    pub triples: Vec<TripleSigns>,
}

/// Full pipeline: positivity, revealed preference, alpha, weights.
pub fn identify<T: Scalar>(rho: &ChoiceData<T>, cfg: &IdentifyConfig) -> Result<Identification<T>, IdentifyError> {
    let universe = rho.universe();
    let n = universe.len();
    if n < 3 {
        return Err(IdentifyError::TooFewAlternatives(n));
    }
    for m in rho.menus().filter(|m| m.len() == 2 || m.len() == 3) {
        for x in m.iter() {
            if !(rho.get(x, m)? > &T::zero()) {
                return Err(IdentifyError::AxiomViolation {
                    axiom: "positivity".into(),
                    detail: format!("{} has zero probability in {}", universe.id(x), universe.label(m)),
                });
            }
        }
    }
    let revealed = revealed_preference(rho, cfg)?;
    let alpha = recover_alpha(rho, &revealed.order, cfg.tol_alpha)?;
    if alpha.boundary {
        return Err(IdentifyError::AlphaOutOfRange(alpha.alpha.to_f64()));
    }
    let weights = recover_weights(rho, &revealed.order, &alpha.alpha)?;
    let params = DstParams::new(universe.clone(), alpha.alpha.clone(), revealed.order, weights)?;
    Ok(Identification { params, alpha, triples: revealed.triples })
}

/// Predicted choice probabilities on a menu.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction<T: Scalar = f64> {
    pub menu: Menu,
    /// Indexed by universe position; zero outside the menu.
    pub probs: Vec<T>,
    /// True when the menu was not part of the observed collection.
    pub out_of_sample: bool,
}

pub fn predict<T: Scalar>(params: &DstParams<T>, menu: Menu, observed: Option<&MenuCollection>) -> Result<Prediction<T>, ModelError> {
    let probs = dst_row(params, menu)?;
    let out_of_sample = observed.is_some_and(|c| !c.contains(menu));
    Ok(Prediction { menu, probs, out_of_sample })
}

fn positive<T: Scalar>(rho: &ChoiceData<T>, x: usize, menu: Menu) -> Result<T, IdentifyError> {
    let universe: &Universe = rho.universe();
    let p = rho.prob(x, menu).ok_or_else(|| IdentifyError::MissingMenu(universe.label(menu)))?;
    if !(p > &T::zero()) {
        return Err(IdentifyError::ZeroProbability { alternative: universe.id(x).to_string(), menu: universe.label(menu) });
    }
    Ok(p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dst_rcf, ChoiceModel};
    use crate::scalar::{ratio, Rational};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn xyz() -> Universe {
        Universe::new(["x", "y", "z"]).unwrap()
    }

    fn exact_params(order: &[&str]) -> DstParams<Rational> {
        let u = xyz();
        let w = LuceWeights::new(vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap();
        DstParams::new(u.clone(), ratio(1, 4), LinearOrder::from_ids(&u, order).unwrap(), w).unwrap()
    }

    #[test]
    fn sign_table_matches_the_six_orders() {
        use Sign::{Negative as N, Positive as P};
        let (x, y, z) = (0, 1, 2);
        let table = [
            ([P, N, N], [x, y, z]),
            ([N, P, N], [y, z, x]),
            ([N, N, P], [z, x, y]),
            ([P, P, N], [x, z, y]),
            ([N, P, P], [y, x, z]),
            ([P, N, P], [z, y, x]),
        ];
        for (signs, order) in table {
            assert_eq!(outcome_from_signs([x, y, z], signs), TripleOutcome::Ordered(order));
        }
        assert_eq!(outcome_from_signs([x, y, z], [P, P, P]), TripleOutcome::Cyclic);
        assert_eq!(outcome_from_signs([x, y, z], [N, N, N]), TripleOutcome::Cyclic);
        assert_eq!(outcome_from_signs([x, y, z], [P, Sign::Zero, N]), TripleOutcome::Ambiguous);
    }

    #[test]
    fn every_order_of_three_is_recovered_exactly() {
        for order in LinearOrder::all(3) {
            let ids = order.ids(&xyz());
            let p = exact_params(&ids.iter().map(String::as_str).collect::<Vec<_>>());
            let rho = dst_rcf(&p, &MenuCollection::all_nonempty(xyz())).unwrap();
            let id = identify(&rho, &IdentifyConfig::default()).unwrap();
            assert_eq!(id.params, p);
            assert_eq!(id.alpha.max_deviation, 0.0);
        }
    }

    #[test]
    fn luce_data_is_ambiguous() {
        let u = xyz();
        let model = ChoiceModel::Luce { universe: u.clone(), weights: LuceWeights::new(vec![0.2, 0.3, 0.5]).unwrap() };
        let rho = model.rcf(&MenuCollection::all_nonempty(u.clone())).unwrap();
        assert!(matches!(revealed_preference(&rho, &IdentifyConfig::default()), Err(IdentifyError::Ambiguous { .. })));
        // Forcing an order, alpha comes out at the boundary.
        let est = recover_alpha(&rho, &LinearOrder::identity(3), 1e-6).unwrap();
        assert!(est.alpha.abs() < 1e-12);
        assert!(est.boundary);
        // Equal weights with alpha = 0 are recovered as uniform.
        let uniform = ChoiceModel::Luce { universe: u.clone(), weights: LuceWeights::uniform(3) }
            .rcf(&MenuCollection::all_nonempty(u))
            .unwrap();
        let w = recover_weights(&uniform, &LinearOrder::identity(3), &0.0).unwrap();
        assert!(w.values().iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn perturbed_data_has_inconsistent_alpha() {
        let u = Universe::new(["a", "b", "c", "d"]).unwrap();
        let p = DstParams::new(u.clone(), 0.3, LinearOrder::identity(4), LuceWeights::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap()).unwrap();
        let rho = dst_rcf(&p, &MenuCollection::all_nonempty(u.clone())).unwrap();
        let bump = Menu::from_indices([1, 2, 3]);
        let mut rows: std::collections::BTreeMap<Menu, Vec<f64>> = rho.menus().map(|m| (m, rho.row(m).unwrap().to_vec())).collect();
        let row = rows.get_mut(&bump).unwrap();
        row[2] += 0.01;
        row[3] -= 0.01;
        let bumped = ChoiceData::new(rho.collection().clone(), rows).unwrap();
        let err = recover_alpha(&bumped, &LinearOrder::identity(4), 1e-6).unwrap_err();
        assert!(matches!(err, IdentifyError::InconsistentAlpha { .. }));
    }

    /// Every pair, and only the triples {x,y,z} and {x,z,t}.
    fn stated_example() -> ChoiceData<Rational> {
        let u = Universe::new(["x", "y", "z", "t"]).unwrap();
        let mut rows = BTreeMap::new();
        let mut add = |cells: &[(&str, Rational)]| {
            let mut row = vec![Rational::zero(); 4];
            for (id, p) in cells {
                row[u.index_of(id).unwrap()] = p.clone();
            }
            rows.insert(Menu::from_indices(cells.iter().map(|(id, _)| u.index_of(id).unwrap())), row);
        };
        let (lo, hi) = (ratio(2, 5), ratio(3, 5));
        for other in ["y", "z", "t"] {
            add(&[("x", lo.clone()), (other, hi.clone())]);
        }
        add(&[("y", hi.clone()), ("z", lo.clone())]);
        add(&[("y", hi.clone()), ("t", lo.clone())]);
        add(&[("z", hi), ("t", lo)]);
        for (b, c) in [("y", "z"), ("z", "t")] {
            add(&[("x", ratio(11, 35)), (b, ratio(12, 35)), (c, ratio(12, 35))]);
        }
        let menus: Vec<Menu> = rows.keys().copied().collect();
        ChoiceData::new(MenuCollection::new(u, menus).unwrap(), rows).unwrap()
    }

    #[test]
    fn stated_example_is_identified_from_two_triples() {
        let rho = stated_example();
        let u = rho.universe().clone();
        let id = identify(&rho, &IdentifyConfig::default()).unwrap();
        assert_eq!(id.params.order().ids(&u), ["x", "y", "z", "t"]);
        assert_eq!(id.params.alpha(), &ratio(1, 5));
        let w: Vec<&Rational> = ["x", "y", "z", "t"].iter().map(|s| id.params.weights().get(u.index_of(s).unwrap())).collect();
        assert_eq!(w, [&ratio(1, 10), &ratio(3, 10), &ratio(3, 10), &ratio(3, 10)]);
        assert_eq!(id.alpha.per_triple.len(), 2);
        let grand = crate::model::dst_row(&id.params, u.full_menu()).unwrap();
        assert_eq!(grand[u.index_of("x").unwrap()], ratio(7, 25));
        assert_eq!(grand[u.index_of("t").unwrap()], ratio(6, 25));
    }

    #[test]
    fn unranked_pairs_are_reported() {
        // Only {x,y,z} observed: t is never compared within a triple.
        let rho = stated_example();
        let u = rho.universe().clone();
        let keep: Vec<Menu> = rho.menus().filter(|m| m.len() == 2 || *m == u.menu(&["x", "y", "z"]).unwrap()).collect();
        let rho = rho.restrict(|m| keep.contains(&m)).unwrap();
        match revealed_preference(&rho, &IdentifyConfig::default()) {
            Err(IdentifyError::Incomplete { pairs }) => assert_eq!(pairs, ["t/x", "t/y", "t/z"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_menus_are_reported() {
        let u = xyz();
        let p = exact_params(&["x", "y", "z"]).to_f64();
        let rho = dst_rcf(&p, &MenuCollection::with_sizes(u, 2, 2)).unwrap();
        assert!(matches!(identify(&rho, &IdentifyConfig::default()), Err(IdentifyError::MissingMenu(_))));
    }

    #[test]
    fn prediction_flags_out_of_sample_menus() {
        let p = exact_params(&["x", "y", "z"]);
        let pairs = MenuCollection::with_sizes(xyz(), 2, 2);
        let pr = predict(&p, Menu::full(3), Some(&pairs)).unwrap();
        assert!(pr.out_of_sample);
        assert_eq!(pr.probs, vec![ratio(3, 8), ratio(1, 4), ratio(3, 8)]);
        assert!(!predict(&p, Menu::from_indices([0, 1]), Some(&pairs)).unwrap().out_of_sample);
    }

    fn arb_params() -> impl Strategy<Value = DstParams<f64>> {
        (3usize..=6).prop_flat_map(|n| {
            (0.02f64..0.98, Just((0..n).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(0.05f64..1.0, n)).prop_map(
                move |(alpha, ranking, w)| {
                    let ids: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
                    DstParams::new(Universe::new(ids).unwrap(), alpha, LinearOrder::new(ranking).unwrap(), LuceWeights::new(w).unwrap())
                        .unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn round_trip_recovers_parameters(p in arb_params()) {
            let rho = dst_rcf(&p, &MenuCollection::with_sizes(p.universe().clone(), 2, 3)).unwrap();
            let id = identify(&rho, &IdentifyConfig::default()).unwrap();
            prop_assert_eq!(id.params.order(), p.order());
            prop_assert!((id.params.alpha() - p.alpha()).abs() < 1e-9);
            for (a, b) in id.params.weights().values().iter().zip(p.weights().values()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn exact_round_trip(alpha_num in 1i64..20, ws in proptest::collection::vec(1i64..50, 4), perm in Just(vec![0usize,1,2,3]).prop_shuffle()) {
            let u = Universe::new(["a", "b", "c", "d"]).unwrap();
            let w = LuceWeights::new(ws.iter().map(|&v| ratio(v, 7)).collect()).unwrap();
            let p = DstParams::new(u.clone(), ratio(alpha_num, 21), LinearOrder::new(perm).unwrap(), w).unwrap();
            let rho = dst_rcf(&p, &MenuCollection::all_nonempty(u)).unwrap();
            let id = identify(&rho, &IdentifyConfig::default()).unwrap();
            prop_assert_eq!(id.params, p);
        }
    }
}
