//! Maximum-likelihood estimation and goodness of fit.

pub mod nelder_mead;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{EstimateError, ModelError};
use crate::model::{dst_rcf, ChoiceModel};
use crate::types::{ChoiceData, DstParams, LinearOrder, LuceWeights, Menu, MenuCollection, MenuWeights, Universe};

use self::nelder_mead::{latin_hypercube, minimize, NelderMeadOptions};

/// Floor applied to probabilities inside the logarithm.
pub const PROB_FLOOR: f64 = 1e-300;

/// Largest universe for which every order is tried.
pub const MAX_SEARCH_UNIVERSE: usize = 8;

/// Observed choice frequencies with menu probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedFrequencies {
    pub data: ChoiceData<f64>,
    pub sigma: MenuWeights,
    pub counts: Option<BTreeMap<Menu, Vec<u64>>>,
}

impl ObservedFrequencies {
    /// Menus weighted equally.
    pub fn uniform(data: ChoiceData<f64>) -> Self {
        let sigma = MenuWeights::uniform(data.collection());
        Self { data, sigma, counts: None }
    }

    pub fn with_sigma(data: ChoiceData<f64>, sigma: MenuWeights) -> Self {
        Self { data, sigma, counts: None }
    }

    /// Menus weighted by their number of observations.
    pub fn from_counts(universe: &Universe, counts: BTreeMap<Menu, Vec<u64>>) -> Result<Self, ModelError> {
        let data = crate::model::frequencies_from_counts(universe, &counts)?;
        let masses = counts.iter().map(|(m, c)| (*m, c.iter().sum::<u64>() as f64)).collect();
        let sigma = MenuWeights::from_masses(data.collection(), masses)?;
        Ok(Self { data, sigma, counts: Some(counts) })
    }

    pub fn universe(&self) -> &Universe {
        self.data.universe()
    }

    /// Number of freely varying cells, `sum over menus of (|S| - 1)`.
    pub fn independent_cells(&self) -> usize {
        self.data.menus().map(|m| m.len() - 1).sum()
    }
}

/// `sum_S sigma(S) sum_x f(x,S) log p(x,S)`, skipping zero frequencies.
pub fn log_likelihood(observed: &ObservedFrequencies, predicted: impl Fn(Menu, usize) -> f64) -> f64 {
    let mut total = 0.0;
    for m in observed.data.menus() {
        let s = observed.sigma.get(m);
        let row = observed.data.row(m).expect("row exists");
        for x in m.iter() {
            if row[x] > 0.0 {
                total += s * row[x] * predicted(m, x).max(PROB_FLOOR).ln();
            }
        }
    }
    total
}

pub fn dst_log_likelihood(params: &DstParams, observed: &ObservedFrequencies) -> f64 {
    dst_log_likelihood_raw(*params.alpha(), params.order(), params.weights().values(), observed)
}

fn dst_log_likelihood_raw(alpha: f64, order: &LinearOrder, w: &[f64], observed: &ObservedFrequencies) -> f64 {
    log_likelihood(observed, |m, x| {
        let total: f64 = m.iter().map(|i| w[i]).sum();
        let luce = (1.0 - alpha) * w[x] / total;
        if order.best_in(m) == Some(x) {
            alpha + luce
        } else {
            luce
        }
    })
}

/// Likelihood of the uniform-choice model.
pub fn null_log_likelihood(observed: &ObservedFrequencies) -> f64 {
    log_likelihood(observed, |m, _| 1.0 / m.len() as f64)
}

fn logistic(a: f64) -> f64 {
    1.0 / (1.0 + (-a).exp())
}

fn softmax_with_last_fixed(theta: &[f64]) -> Vec<f64> {
    let mut z: Vec<f64> = theta.to_vec();
    z.push(0.0);
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Unconstrained coordinates `(logit alpha, theta)` to `(alpha, weights)`.
pub fn dst_from_unconstrained(x: &[f64]) -> (f64, Vec<f64>) {
    (logistic(x[0]), softmax_with_last_fixed(&x[1..]))
}

/// Log-likelihood in unconstrained coordinates.
pub fn dst_objective(x: &[f64], order: &LinearOrder, observed: &ObservedFrequencies) -> f64 {
    let (alpha, w) = dst_from_unconstrained(x);
    dst_log_likelihood_raw(alpha, order, &w, observed)
}

/// Analytic gradient of [`dst_objective`].
pub fn dst_gradient(x: &[f64], order: &LinearOrder, observed: &ObservedFrequencies) -> Vec<f64> {
    let (alpha, w) = dst_from_unconstrained(x);
    let n = w.len();
    let mut grad = vec![0.0; n];
    for m in observed.data.menus() {
        let s = observed.sigma.get(m);
        let row = observed.data.row(m).expect("row exists");
        let total: f64 = m.iter().map(|i| w[i]).sum();
        let best = order.best_in(m);
        for x in m.iter().filter(|&x| row[x] > 0.0) {
            let share = w[x] / total;
            let is_best = best == Some(x);
            let p = if is_best { alpha + (1.0 - alpha) * share } else { (1.0 - alpha) * share };
            if p <= PROB_FLOOR {
                continue;
            }
            let coef = s * row[x] / p;
            let indicator = if is_best { 1.0 } else { 0.0 };
            grad[0] += coef * alpha * (1.0 - alpha) * (indicator - share);
            for j in m.iter().filter(|&j| j < n - 1) {
                let delta = if j == x { 1.0 } else { 0.0 };
                grad[1 + j] += coef * (1.0 - alpha) * share * (delta - w[j] / total);
            }
        }
    }
    grad
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Starting points are drawn from `[-start_range, start_range]` in
    /// unconstrained coordinates.
    pub start_range: f64,
    pub optimizer: NelderMeadOptions,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { restarts: 16, seed: 0, start_range: 4.0, optimizer: NelderMeadOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Dst,
    DstSearch,
    Luce,
    Logit,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct GoodnessOfFit {
    /// Number of observed cells `(menu, alternative)` with `|menu| >= 2`.
    pub cells: usize,
    pub r2: f64,
    /// `None` when there are no residual degrees of freedom.
    pub adjusted_r2: Option<f64>,
    pub mcfadden_r2: f64,
}

#[derive(Clone, Debug, PartialEq, Default, serde::Serialize)]
pub struct FitDiagnostics {
    /// Estimated alpha within 1e-3 of 0 or 1.
    pub alpha_at_boundary: bool,
    /// Parameters are not pinned down by the data.
    pub flat_likelihood: bool,
    /// Spread of alpha across restarts that reached the best likelihood.
    pub alpha_spread: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub model: ModelKind,
    pub universe: Universe,
    pub alpha: Option<f64>,
    pub order: Option<LinearOrder>,
    /// Luce or salience weights, normalized.
    pub weights: Option<Vec<f64>>,
    /// Utility coefficients of the logit model.
    pub coefficients: Option<Vec<f64>>,
    pub log_likelihood: f64,
    pub null_log_likelihood: f64,
    pub n_free_params: usize,
    pub predicted: ChoiceData<f64>,
    pub fit: GoodnessOfFit,
    pub converged: bool,
    pub restarts: usize,
    pub diagnostics: FitDiagnostics,
    /// Best log-likelihood for each order, best first (order search only).
    pub order_table: Vec<(LinearOrder, f64)>,
}

/// R-squared over all observed cells of menus with at least two options,
/// adjusted with `k` counted as in `1 - (1 - R^2)(n - 1)/(n - k)`, and the
/// McFadden pseudo R-squared against uniform choice.
pub fn goodness_of_fit(
    observed: &ObservedFrequencies,
    predicted: &ChoiceData<f64>,
    n_free_params: usize,
    log_likelihood: f64,
    null_log_likelihood: f64,
) -> Result<GoodnessOfFit, EstimateError> {
    let mut pairs = Vec::new();
    for m in observed.data.menus().filter(|m| m.len() >= 2) {
        let f = observed.data.row(m).expect("row exists");
        let p = predicted.row(m).ok_or_else(|| EstimateError::MissingPrediction(observed.universe().label(m)))?;
        for x in m.iter() {
            pairs.push((f[x], p[x]));
        }
    }
    let n = pairs.len();
    let mean = pairs.iter().map(|(f, _)| f).sum::<f64>() / n as f64;
    let sst: f64 = pairs.iter().map(|(f, _)| (f - mean).powi(2)).sum();
    let sse: f64 = pairs.iter().map(|(f, p)| (f - p).powi(2)).sum();
    if sst <= 0.0 {
        return Err(EstimateError::DegenerateVariance);
    }
    let r2 = 1.0 - sse / sst;
    let adjusted_r2 = (n > n_free_params).then(|| 1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n - n_free_params) as f64);
    let mcfadden_r2 = 1.0 - log_likelihood / null_log_likelihood;
    Ok(GoodnessOfFit { cells: n, r2, adjusted_r2, mcfadden_r2 })
}

struct Candidate {
    x: Vec<f64>,
    f: f64,
    converged: bool,
}

fn multistart<F: Fn(&[f64]) -> f64 + Sync>(objective: F, dim: usize, cfg: &FitConfig) -> Vec<Candidate> {
    let starts = latin_hypercube(cfg.restarts.max(1), dim, cfg.start_range, cfg.seed);
    starts
        .par_iter()
        .map(|x0| {
            let r = minimize(&objective, x0, &cfg.optimizer);
            Candidate { x: r.x, f: r.f, converged: r.converged }
        })
        .collect()
}

fn best_index(cands: &[Candidate]) -> usize {
    // Ties keep the earliest start.
    let mut best = 0;
    for (i, c) in cands.iter().enumerate() {
        if c.f < cands[best].f {
            best = i;
        }
    }
    best
}

/// Maximum-likelihood fit for a fixed preference order.
pub fn fit_dst(observed: &ObservedFrequencies, order: &LinearOrder, cfg: &FitConfig) -> Result<FitReport, EstimateError> {
    let universe = observed.universe().clone();
    let n = universe.len();
    if n < 2 {
        return Err(EstimateError::TooFewAlternatives(n));
    }
    if order.len() != n {
        return Err(ModelError::InvalidOrder.into());
    }
    let cands = multistart(|x| -dst_objective(x, order, observed), n, cfg);
    let b = best_index(&cands);
    let (alpha, w) = dst_from_unconstrained(&cands[b].x);
    let best_f = cands[b].f;
    let near: Vec<f64> = cands.iter().filter(|c| (c.f - best_f).abs() < 1e-9).map(|c| logistic(c.x[0])).collect();
    let alpha_spread = near.iter().copied().fold(f64::NEG_INFINITY, f64::max) - near.iter().copied().fold(f64::INFINITY, f64::min);
    let n_free_params = n;
    let diagnostics = FitDiagnostics {
        alpha_at_boundary: !(1e-3..=1.0 - 1e-3).contains(&alpha),
        flat_likelihood: observed.independent_cells() < n_free_params || alpha_spread > 1e-4,
        alpha_spread,
    };
    let clamped_alpha = alpha.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    let weights = LuceWeights::new(w.iter().map(|v| v.max(f64::MIN_POSITIVE)).collect())?;
    let params = DstParams::new(universe.clone(), clamped_alpha, order.clone(), weights)?;
    let predicted = dst_rcf(&params, observed.data.collection())?;
    let ll = -best_f;
    let null = null_log_likelihood(observed);
    let fit = goodness_of_fit(observed, &predicted, n_free_params, ll, null)?;
    Ok(FitReport {
        model: ModelKind::Dst,
        universe,
        alpha: Some(alpha),
        order: Some(order.clone()),
        weights: Some(w),
        coefficients: None,
        log_likelihood: ll,
        null_log_likelihood: null,
        n_free_params,
        predicted,
        fit,
        converged: cands[b].converged,
        restarts: cands.len(),
        diagnostics,
        order_table: Vec::new(),
    })
}

/// Fits every order and keeps the best; ties go to the first order in
/// lexicographic enumeration.
pub fn fit_dst_all_orders(observed: &ObservedFrequencies, cfg: &FitConfig) -> Result<FitReport, EstimateError> {
    let n = observed.universe().len();
    if n > MAX_SEARCH_UNIVERSE {
        return Err(EstimateError::UniverseTooLarge { size: n, max: MAX_SEARCH_UNIVERSE });
    }
    let orders: Vec<LinearOrder> = LinearOrder::all(n).collect();
    let fits: Vec<FitReport> = orders.par_iter().map(|o| fit_dst(observed, o, cfg)).collect::<Result<_, _>>()?;
    let mut best = 0;
    for (i, f) in fits.iter().enumerate() {
        if f.log_likelihood > fits[best].log_likelihood + 1e-12 {
            best = i;
        }
    }
    let mut table: Vec<(LinearOrder, f64)> = fits.iter().map(|f| (f.order.clone().expect("order"), f.log_likelihood)).collect();
    table.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut report = fits.into_iter().nth(best).expect("at least one order");
    report.model = ModelKind::DstSearch;
    report.order_table = table;
    Ok(report)
}

/// Luce model by minorization-maximization; the weights are the fixed point
/// of `w_i = W_i / sum_{S containing i} sigma(S) / w(S)`.
pub fn fit_luce(observed: &ObservedFrequencies) -> Result<FitReport, EstimateError> {
    let universe = observed.universe().clone();
    let n = universe.len();
    let data = &observed.data;
    let mut wins = vec![0.0; n];
    for m in data.menus() {
        let row = data.row(m).expect("row exists");
        for x in m.iter() {
            wins[x] += observed.sigma.get(m) * row[x];
        }
    }
    let mut w = vec![1.0 / n as f64; n];
    let mut converged = false;
    for _ in 0..200_000 {
        let mut denom = vec![0.0; n];
        for m in data.menus().filter(|m| m.len() >= 2) {
            let total: f64 = m.iter().map(|i| w[i]).sum();
            for x in m.iter() {
                denom[x] += observed.sigma.get(m) / total;
            }
        }
        let mut next: Vec<f64> = (0..n).map(|i| if denom[i] > 0.0 { (wins[i] / denom[i]).max(1e-300) } else { w[i] }).collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        let change = next.iter().zip(&w).map(|(a, b)| (a - b).abs() / b.max(1e-300)).fold(0.0, f64::max);
        w = next;
        if change < 1e-13 {
            converged = true;
            break;
        }
    }
    let weights = LuceWeights::new(w.clone())?;
    let model = ChoiceModel::Luce { universe: universe.clone(), weights: weights.clone() };
    let predicted = model.rcf(data.collection())?;
    let ll = log_likelihood(observed, |m, x| predicted.prob(x, m).copied().unwrap_or(0.0));
    let null = null_log_likelihood(observed);
    let n_free_params = n - 1;
    let fit = goodness_of_fit(observed, &predicted, n_free_params, ll, null)?;
    Ok(FitReport {
        model: ModelKind::Luce,
        universe,
        alpha: None,
        order: None,
        weights: Some(weights.values().to_vec()),
        coefficients: None,
        log_likelihood: ll,
        null_log_likelihood: null,
        n_free_params,
        predicted,
        fit,
        converged,
        restarts: 1,
        diagnostics: FitDiagnostics::default(),
        order_table: Vec::new(),
    })
}

/// Linear-in-parameters utilities: `v(x) = features[x] . beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilitySpec {
    pub names: Vec<String>,
    /// One feature vector per universe position.
    pub features: Vec<Vec<f64>>,
}

impl UtilitySpec {
    /// One constant per alternative, the last normalized to zero.
    pub fn alternative_specific(universe: &Universe) -> Self {
        let n = universe.len();
        let names = universe.ids()[..n - 1].iter().map(|id| format!("asc_{id}")).collect();
        let features = (0..n).map(|x| (0..n - 1).map(|j| if j == x { 1.0 } else { 0.0 }).collect()).collect();
        Self { names, features }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }
}

/// Multinomial logit by maximum likelihood.
pub fn fit_logit(observed: &ObservedFrequencies, spec: &UtilitySpec, cfg: &FitConfig) -> Result<FitReport, EstimateError> {
    let universe = observed.universe().clone();
    let n = universe.len();
    let k = spec.dim();
    if spec.features.len() != n || spec.features.iter().any(|f| f.len() != k) {
        return Err(ModelError::DimensionMismatch { expected: n, got: spec.features.len() }.into());
    }
    let utilities = |beta: &[f64]| -> Vec<f64> { spec.features.iter().map(|f| f.iter().zip(beta).map(|(a, b)| a * b).sum()).collect() };
    let prob = |v: &[f64], m: Menu, x: usize| -> f64 {
        let max = m.iter().map(|i| v[i]).fold(f64::NEG_INFINITY, f64::max);
        let denom: f64 = m.iter().map(|i| (v[i] - max).exp()).sum();
        (v[x] - max).exp() / denom
    };
    let objective = |beta: &[f64]| {
        let v = utilities(beta);
        -log_likelihood(observed, |m, x| prob(&v, m, x))
    };
    let cands = multistart(objective, k, cfg);
    let b = best_index(&cands);
    let beta = cands[b].x.clone();
    let v = utilities(&beta);
    let rows = observed
        .data
        .menus()
        .map(|m| {
            let mut row = vec![0.0; n];
            for x in m.iter() {
                row[x] = prob(&v, m, x);
            }
            (m, row)
        })
        .collect();
    let predicted = ChoiceData::new(observed.data.collection().clone(), rows)?;
    let ll = -cands[b].f;
    let null = null_log_likelihood(observed);
    let fit = goodness_of_fit(observed, &predicted, k, ll, null)?;
    Ok(FitReport {
        model: ModelKind::Logit,
        universe,
        alpha: None,
        order: None,
        weights: None,
        coefficients: Some(beta),
        log_likelihood: ll,
        null_log_likelihood: null,
        n_free_params: k,
        predicted,
        fit,
        converged: cands[b].converged,
        restarts: cands.len(),
        diagnostics: FitDiagnostics::default(),
        order_table: Vec::new(),
    })
}

/// Predicted probabilities of a fitted DST report on arbitrary menus.
pub fn fitted_params(report: &FitReport) -> Option<DstParams> {
    let alpha = report.alpha?.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    let w = LuceWeights::new(report.weights.clone()?.into_iter().map(|v| v.max(f64::MIN_POSITIVE)).collect()).ok()?;
    DstParams::new(report.universe.clone(), alpha, report.order.clone()?, w).ok()
}

/// Menus collection helper for tests and the command line.
pub fn pairs_and_triples(universe: &Universe) -> MenuCollection {
    MenuCollection::with_sizes(universe.clone(), 2, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sample_choices;
    use proptest::prelude::*;

    fn xyz_params() -> DstParams {
        let u = Universe::new(["x", "y", "z"]).unwrap();
        DstParams::new(u, 0.4, LinearOrder::identity(3), LuceWeights::new(vec![0.2, 0.3, 0.5]).unwrap()).unwrap()
    }

    #[test]
    fn exact_data_are_fit_exactly() {
        let p = xyz_params();
        let rho = dst_rcf(&p, &pairs_and_triples(p.universe())).unwrap();
        let obs = ObservedFrequencies::uniform(rho);
        let fit = fit_dst(&obs, p.order(), &FitConfig::default()).unwrap();
        assert!((fit.alpha.unwrap() - 0.4).abs() < 1e-6, "{:?}", fit.alpha);
        for (a, b) in fit.weights.unwrap().iter().zip(p.weights().values()) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!((fit.log_likelihood - dst_log_likelihood(&p, &obs)).abs() < 1e-10);
    }

    #[test]
    fn order_search_finds_generating_order() {
        let p = xyz_params();
        let rho = dst_rcf(&p, &pairs_and_triples(p.universe())).unwrap();
        let fit = fit_dst_all_orders(&ObservedFrequencies::uniform(rho), &FitConfig::default()).unwrap();
        assert_eq!(fit.order.as_ref(), Some(p.order()));
        assert_eq!(fit.order_table.len(), 6);
    }

    #[test]
    fn sampled_data_recover_parameters() {
        let p = xyz_params();
        let menus = pairs_and_triples(p.universe());
        let s = sample_choices(&ChoiceModel::Dst(p.clone()), &menus, &MenuWeights::uniform(&menus), 1_000_000, 3).unwrap();
        let obs = ObservedFrequencies::from_counts(p.universe(), s.counts).unwrap();
        let fit = fit_dst(&obs, p.order(), &FitConfig::default()).unwrap();
        assert!((fit.alpha.unwrap() - 0.4).abs() < 0.01);
    }

    #[test]
    fn luce_data_push_alpha_to_the_boundary() {
        let u = Universe::new(["x", "y", "z"]).unwrap();
        let model = ChoiceModel::Luce { universe: u.clone(), weights: LuceWeights::new(vec![0.2, 0.3, 0.5]).unwrap() };
        let obs = ObservedFrequencies::uniform(model.rcf(&pairs_and_triples(&u)).unwrap());
        let fit = fit_dst(&obs, &LinearOrder::identity(3), &FitConfig::default()).unwrap();
        assert!(fit.diagnostics.alpha_at_boundary);
        assert!(fit.alpha.unwrap() < 1e-3);
        let luce = fit_luce(&obs).unwrap();
        for (a, b) in luce.weights.unwrap().iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn single_menu_is_flagged_flat() {
        let p = xyz_params();
        let menus = MenuCollection::new(p.universe().clone(), [Menu::full(3)]).unwrap();
        let obs = ObservedFrequencies::uniform(dst_rcf(&p, &menus).unwrap());
        let fit = fit_dst(&obs, p.order(), &FitConfig::default()).unwrap();
        assert!(fit.diagnostics.flat_likelihood);
    }

    #[test]
    fn logit_with_constants_matches_luce() {
        let p = xyz_params();
        let obs = ObservedFrequencies::uniform(dst_rcf(&p, &pairs_and_triples(p.universe())).unwrap());
        let luce = fit_luce(&obs).unwrap();
        let logit = fit_logit(&obs, &UtilitySpec::alternative_specific(p.universe()), &FitConfig::default()).unwrap();
        assert!((luce.log_likelihood - logit.log_likelihood).abs() < 1e-9);
        assert_eq!(luce.n_free_params, logit.n_free_params);
    }

    #[test]
    fn constant_data_have_no_variance() {
        let u = Universe::new(["x", "y"]).unwrap();
        let menus = MenuCollection::new(u.clone(), [Menu::full(2)]).unwrap();
        let rho = ChoiceData::new(menus, BTreeMap::from([(Menu::full(2), vec![0.5, 0.5])])).unwrap();
        let obs = ObservedFrequencies::uniform(rho.clone());
        assert!(matches!(goodness_of_fit(&obs, &rho, 1, -1.0, -1.0), Err(EstimateError::DegenerateVariance)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gradient_matches_finite_differences(
            x in proptest::collection::vec(-2.0f64..2.0, 4),
            freqs in proptest::collection::vec(0.05f64..1.0, 12),
        ) {
            let u = Universe::new(["a", "b", "c", "d"]).unwrap();
            let menus = MenuCollection::with_sizes(u.clone(), 2, 4);
            let mut k = 0;
            let rows = menus.iter().map(|m| {
                let mut row = vec![0.0; 4];
                for i in m.iter() { row[i] = freqs[k % freqs.len()]; k += 1; }
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= s);
                (m, row)
            }).collect();
            let obs = ObservedFrequencies::uniform(ChoiceData::new(menus, rows).unwrap());
            let order = LinearOrder::new(vec![2, 0, 3, 1]).unwrap();
            let g = dst_gradient(&x, &order, &obs);
            for j in 0..4 {
                let h = 1e-6;
                let mut up = x.clone(); up[j] += h;
                let mut dn = x.clone(); dn[j] -= h;
                let fd = (dst_objective(&up, &order, &obs) - dst_objective(&dn, &order, &obs)) / (2.0 * h);
                prop_assert!((fd - g[j]).abs() < 1e-6, "coordinate {}: {} vs {}", j, fd, g[j]);
            }
        }
    }
}
