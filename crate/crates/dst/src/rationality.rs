//! Model-free rationality measures and comparative statics.

use serde::Serialize;

use crate::error::RationalityError;
use crate::types::{ChoiceData, LinearOrder, LuceWeights, Menu, MenuWeights, WeakOrder};

/// Largest universe for the swaps index.
pub const MAX_SWAPS_UNIVERSE: usize = 8;
/// Largest universe for the rationality index.
pub const MAX_INDEX_UNIVERSE: usize = 5;
/// Costs or probabilities closer than this are treated as equal.
pub const TIE_TOL: f64 = 1e-12;

/// Expected number of options ranked above the chosen one:
/// `sum_S sigma(S) sum_x rho(x,S) |{y in S : y > x}|`.
pub fn swaps_cost(rho: &ChoiceData, sigma: &MenuWeights, order: &LinearOrder) -> f64 {
    let mut total = 0.0;
    for m in rho.menus() {
        let row = rho.row(m).expect("row exists");
        let ranked = order.sorted(m);
        let inner: f64 = ranked.iter().enumerate().map(|(above, &x)| row[x] * above as f64).sum();
        total += sigma.get(m) * inner;
    }
    total
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapsResult {
    pub index: f64,
    /// Every order attaining the index, in lexicographic order.
    pub minimizers: Vec<LinearOrder>,
    /// Cost of every order, in lexicographic order of the orders.
    pub costs: Vec<(LinearOrder, f64)>,
}

/// Minimum swaps cost over all orders.
pub fn swaps_index(rho: &ChoiceData, sigma: &MenuWeights) -> Result<SwapsResult, RationalityError> {
    let n = rho.universe().len();
    if n > MAX_SWAPS_UNIVERSE {
        return Err(RationalityError::UniverseTooLarge { size: n, max: MAX_SWAPS_UNIVERSE });
    }
    let costs: Vec<(LinearOrder, f64)> = LinearOrder::all(n).map(|o| {
        let c = swaps_cost(rho, sigma, &o);
        (o, c)
    }).collect();
    let index = costs.iter().map(|(_, c)| *c).fold(f64::INFINITY, f64::min);
    let minimizers = costs.iter().filter(|(_, c)| *c - index <= TIE_TOL).map(|(o, _)| o.clone()).collect();
    Ok(SwapsResult { index, minimizers, costs })
}

/// Options whose probability is at least `lambda` times the menu maximum.
pub fn lambda_correspondence(rho: &ChoiceData, lambda: f64) -> Result<Vec<(Menu, Menu)>, RationalityError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(RationalityError::InvalidLambda(lambda));
    }
    Ok(rho
        .menus()
        .map(|m| {
            let row = rho.row(m).expect("row exists");
            let max = m.iter().map(|x| row[x]).fold(0.0, f64::max);
            (m, Menu::from_indices(m.iter().filter(|&x| row[x] + TIE_TOL >= lambda * max)))
        })
        .collect())
}

/// A choice correspondence is rational if some weak order picks exactly its
/// maximal elements from every menu.
pub fn is_rational_correspondence(choices: &[(Menu, Menu)], weak_orders: &[WeakOrder]) -> bool {
    weak_orders.iter().any(|r| choices.iter().all(|(m, c)| r.maximal_in(*m) == *c))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaInterval {
    pub lo: f64,
    pub hi: f64,
    pub rational: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalityIndex {
    pub index: f64,
    pub intervals: Vec<LambdaInterval>,
}

/// Measure of the `lambda` in (0, 1] whose correspondence is rational.
///
/// The correspondence only changes at ratios `rho(x,S) / max rho(.,S)`, so
/// it is evaluated once inside each interval between consecutive ratios.
pub fn rationality_index(rho: &ChoiceData) -> Result<RationalityIndex, RationalityError> {
    let n = rho.universe().len();
    if n > MAX_INDEX_UNIVERSE {
        return Err(RationalityError::UniverseTooLarge { size: n, max: MAX_INDEX_UNIVERSE });
    }
    let mut breaks = vec![0.0, 1.0];
    for m in rho.menus() {
        let row = rho.row(m).expect("row exists");
        let max = m.iter().map(|x| row[x]).fold(0.0, f64::max);
        if max <= 0.0 {
            continue;
        }
        breaks.extend(m.iter().map(|x| row[x] / max).filter(|r| *r > 0.0 && *r < 1.0));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= TIE_TOL);
    let weak = WeakOrder::all(n);
    let mut intervals = Vec::new();
    let mut index = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let rational = is_rational_correspondence(&lambda_correspondence(rho, 0.5 * (lo + hi))?, &weak);
        if rational {
            index += hi - lo;
        }
        intervals.push(LambdaInterval { lo, hi, rational });
    }
    Ok(RationalityIndex { index, intervals })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FosdResult {
    pub dominates: bool,
    /// First failing (menu, upper-set size, lhs, rhs).
    pub witness: Option<(String, usize, f64, f64)>,
}

/// `rho1` puts at least as much mass as `rho2` on every upper set of every
/// common menu.
pub fn fosd(rho1: &ChoiceData, rho2: &ChoiceData, order: &LinearOrder) -> Result<FosdResult, RationalityError> {
    if rho1.universe() != rho2.universe() {
        return Err(RationalityError::UniverseMismatch);
    }
    for m in rho1.menus().filter(|m| rho2.collection().contains(*m)) {
        let (r1, r2) = (rho1.row(m).expect("row"), rho2.row(m).expect("row"));
        let (mut c1, mut c2) = (0.0, 0.0);
        for (k, x) in order.sorted(m).into_iter().enumerate() {
            c1 += r1[x];
            c2 += r2[x];
            if c1 < c2 - TIE_TOL {
                return Ok(FosdResult { dominates: false, witness: Some((rho1.universe().label(m), k + 1, c1, c2)) });
            }
        }
    }
    Ok(FosdResult { dominates: true, witness: None })
}

/// `w1(x)/w2(x) >= w1(y)/w2(y)` whenever `x` is preferred to `y`.
pub fn mlr_check(w1: &LuceWeights, w2: &LuceWeights, order: &LinearOrder) -> bool {
    let ratio = |i: usize| *w1.get(i) / *w2.get(i);
    order.ranking().windows(2).all(|p| ratio(p[0]) >= ratio(p[1]) * (1.0 - TIE_TOL))
}

/// Whenever `x` beats `y` in the benchmark and `x` beats `y` under `weaker`,
/// `x` beats `y` under `stronger` too.
pub fn single_crossing(weaker: &LinearOrder, stronger: &LinearOrder, benchmark: &LinearOrder) -> bool {
    let n = benchmark.len();
    (0..n).all(|x| (0..n).all(|y| x == y || !benchmark.prefers(x, y) || !weaker.prefers(x, y) || stronger.prefers(x, y)))
}
