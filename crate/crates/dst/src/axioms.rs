//! Testable conditions on a random choice function.

use serde::Serialize;

use crate::error::{AxiomError, IdentifyError};
use crate::identify::{revealed_preference, IdentifyConfig};
use crate::types::{ChoiceData, LinearOrder, Menu};

/// Witness lists are truncated to this many entries.
pub const MAX_WITNESSES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Positivity,
    Rationality,
    StrictRegularity,
    /// Substitution rate over removed probability is constant.
    ConstantGain,
    /// Substitution rates of the worst remaining options sum to one.
    SubstitutionBalance,
    /// The balance condition under every order, equivalent to IIA.
    BalanceUnderAllOrders,
    Iia,
    /// Salience and preference rank options the same way.
    Consistency,
    WeakStochasticTransitivity,
    ModerateStochasticTransitivity,
    StrongStochasticTransitivity,
    /// Alternating sums of inverse default probabilities are positive.
    BlockMarschakDefault,
    /// The default's odds ratio from adding an option is menu-independent.
    MenuIndependentDefault,
    /// The best option gains relative odds in menus where it is best.
    BestOptionGain,
    /// Menus sharing a best option favour it over every rival's odds.
    SharedBestGain,
    /// Odds among options that are not best are menu-independent and chain.
    TransitiveIia,
    /// Block-Marschak sums of the choice function are nonnegative.
    BlockMarschak,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub alternatives: Vec<String>,
    pub menus: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub passed: bool,
    pub violations: usize,
    pub witnesses: Vec<Witness>,
    /// Largest deviation from the condition seen (zero if not applicable).
    pub max_deviation: f64,
    /// Estimated constant where the condition has one.
    pub estimate: Option<f64>,
    pub note: Option<String>,
}

impl AxiomReport {
    pub(crate) fn new(axiom: Axiom) -> Self {
        Self { axiom, passed: true, violations: 0, witnesses: Vec::new(), max_deviation: 0.0, estimate: None, note: None }
    }

    pub(crate) fn violate(&mut self, w: Witness) {
        self.passed = false;
        self.violations += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxiomConfig {
    pub tol_gamma: f64,
    pub tol_sum: f64,
    pub tol_iia: f64,
    pub sign_eps: f64,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        Self { tol_gamma: 1e-7, tol_sum: 1e-7, tol_iia: 1e-7, sign_eps: 1e-7 }
    }
}

/// Universe size up to which the all-orders check enumerates orders.
pub const MAX_ORDERS_UNIVERSE: usize = 8;

/// Slack for weak inequalities between probabilities.
const WEAK_INEQ_TOL: f64 = 1e-12;

/// Choice probability with singletons implicitly equal to one.
fn prob(rho: &ChoiceData, x: usize, menu: Menu) -> Option<f64> {
    if menu.len() == 1 && menu.contains(x) {
        return Some(1.0);
    }
    rho.prob(x, menu).copied()
}

fn observed(rho: &ChoiceData, menu: Menu) -> bool {
    menu.len() == 1 || rho.collection().contains(menu)
}

/// Relative drop in the probability of `x` when `y` is added to `menu \ {y}`:
/// `(rho(x, S\y) - rho(x, S)) / rho(x, S\y)`.
pub fn substitution_rate(rho: &ChoiceData, x: usize, y: usize, menu: Menu) -> Result<f64, AxiomError> {
    let universe = rho.universe();
    if x == y || !menu.contains(x) || !menu.contains(y) {
        return Err(AxiomError::InvalidArguments("x and y must be distinct members of the menu".into()));
    }
    let smaller = menu.without(y);
    let with = prob(rho, x, menu).ok_or_else(|| AxiomError::MissingMenu(universe.label(menu)))?;
    let without = prob(rho, x, smaller).ok_or_else(|| AxiomError::MissingMenu(universe.label(smaller)))?;
    if without <= 0.0 {
        return Err(AxiomError::ZeroProbability { alternative: universe.id(x).into(), menu: universe.label(smaller) });
    }
    Ok((without - with) / without)
}

pub fn check_positivity(rho: &ChoiceData) -> AxiomReport {
    let u = rho.universe();
    let mut r = AxiomReport::new(Axiom::Positivity);
    for m in rho.menus() {
        for x in m.iter() {
            let p = prob(rho, x, m).unwrap_or(0.0);
            if p <= 0.0 {
                r.violate(Witness { alternatives: vec![u.id(x).into()], menus: vec![u.label(m)], values: vec![p] });
            }
        }
    }
    r
}

/// Sign patterns of every triple aggregate into a linear order.
pub fn check_rationality(rho: &ChoiceData, sign_eps: f64) -> Result<(AxiomReport, Option<LinearOrder>), AxiomError> {
    let mut r = AxiomReport::new(Axiom::Rationality);
    let cfg = IdentifyConfig { sign_eps, ..IdentifyConfig::default() };
    match revealed_preference(rho, &cfg) {
        Ok(rp) => {
            let label = rp.order.label(rho.universe());
            Ok((r.with_note(format!("revealed order {label}")), Some(rp.order)))
        }
        Err(IdentifyError::Ambiguous { triples }) => {
            for t in triples {
                r.violate(Witness { alternatives: vec![], menus: vec![t], values: vec![] });
            }
            Ok((r.with_note("some sign patterns contain a zero"), None))
        }
        Err(IdentifyError::AxiomViolation { detail, .. }) => {
            r.violate(Witness { alternatives: vec![], menus: vec![], values: vec![] });
            Ok((r.with_note(detail), None))
        }
        Err(IdentifyError::Incomplete { pairs }) => {
            for p in &pairs {
                r.violate(Witness { alternatives: p.split('/').map(String::from).collect(), menus: vec![], values: vec![] });
            }
            Ok((r.with_note("observed triples do not rank every pair"), None))
        }
        Err(e) => Err(e.into()),
    }
}

/// Adding an option strictly lowers every other option's probability.
pub fn check_strict_regularity(rho: &ChoiceData) -> AxiomReport {
    let u = rho.universe();
    let mut r = AxiomReport::new(Axiom::StrictRegularity);
    for m in rho.menus().filter(|m| m.len() >= 2) {
        for y in m.iter() {
            let smaller = m.without(y);
            if !observed(rho, smaller) {
                continue;
            }
            for x in smaller.iter() {
                let (Some(big), Some(small)) = (prob(rho, x, m), prob(rho, x, smaller)) else { continue };
                r.max_deviation = r.max_deviation.max(big - small);
                if big >= small {
                    r.violate(Witness {
                        alternatives: vec![u.id(x).into(), u.id(y).into()],
                        menus: vec![u.label(m), u.label(smaller)],
                        values: vec![big, small],
                    });
                }
            }
        }
    }
    r
}

/// `A(x,y,S) / rho(y,S)` is the same for all non-best `x`, `y` of every menu.
pub fn check_constant_gain(rho: &ChoiceData, order: &LinearOrder, tol_gamma: f64) -> Result<AxiomReport, AxiomError> {
    let u = rho.universe();
    let mut ratios = Vec::new();
    for m in rho.menus().filter(|m| m.len() >= 3) {
        let best = order.best_in(m).expect("non-empty menu");
        for y in m.iter().filter(|&y| y != best) {
            if !observed(rho, m.without(y)) {
                continue;
            }
            let py = prob(rho, y, m).unwrap_or(0.0);
            if py <= 0.0 {
                return Err(AxiomError::ZeroProbability { alternative: u.id(y).into(), menu: u.label(m) });
            }
            for x in m.iter().filter(|&x| x != best && x != y) {
                ratios.push((x, y, m, substitution_rate(rho, x, y, m)? / py));
            }
        }
    }
    if ratios.is_empty() {
        return Err(AxiomError::NoAdmissibleTriple);
    }
    let mean = ratios.iter().map(|t| t.3).sum::<f64>() / ratios.len() as f64;
    let scale = mean.abs().max(1.0);
    let mut r = AxiomReport::new(Axiom::ConstantGain);
    r.estimate = Some(mean);
    for (x, y, m, g) in ratios {
        let dev = (g - mean).abs() / scale;
        r.max_deviation = r.max_deviation.max(dev);
        if dev > tol_gamma {
            r.violate(Witness { alternatives: vec![u.id(x).into(), u.id(y).into()], menus: vec![u.label(m)], values: vec![g, mean] });
        }
    }
    Ok(r)
}

/// Sum over `x` in `menu` of `A(worst(S\x), x, S)` under `order`.
pub fn substitution_balance_sum(rho: &ChoiceData, order: &LinearOrder, menu: Menu) -> Result<f64, AxiomError> {
    let mut total = 0.0;
    for x in menu.iter() {
        let rest = menu.without(x);
        let worst = order.worst_in(rest).ok_or(AxiomError::InvalidArguments("menu needs two elements".into()))?;
        total += substitution_rate(rho, worst, x, menu)?;
    }
    Ok(total)
}

fn balance_menus(rho: &ChoiceData) -> Vec<Menu> {
    rho.menus().filter(|m| m.len() >= 2 && m.iter().all(|x| observed(rho, m.without(x)))).collect()
}

/// Substitution rates of the worst remaining options sum to one.
pub fn check_substitution_balance(rho: &ChoiceData, order: &LinearOrder, tol_sum: f64) -> Result<AxiomReport, AxiomError> {
    let u = rho.universe();
    let mut r = AxiomReport::new(Axiom::SubstitutionBalance);
    for m in balance_menus(rho) {
        let s = substitution_balance_sum(rho, order, m)?;
        r.max_deviation = r.max_deviation.max((s - 1.0).abs());
        if (s - 1.0).abs() > tol_sum {
            r.violate(Witness { alternatives: vec![], menus: vec![u.label(m)], values: vec![s] });
        }
    }
    Ok(r)
}

/// The balance condition under every order. Equivalent to IIA, which is
/// used instead above [`MAX_ORDERS_UNIVERSE`] alternatives.
pub fn check_balance_all_orders(rho: &ChoiceData, tol_sum: f64, tol_iia: f64) -> Result<AxiomReport, AxiomError> {
    let u = rho.universe();
    let n = u.len();
    if n > MAX_ORDERS_UNIVERSE {
        let mut r = check_iia(rho, tol_iia)?;
        r.axiom = Axiom::BalanceUnderAllOrders;
        return Ok(r.with_note(format!("{n} alternatives: evaluated through the equivalent IIA check")));
    }
    let menus: Vec<Menu> = balance_menus(rho).into_iter().filter(|m| m.len() >= 3).collect();
    let mut r = AxiomReport::new(Axiom::BalanceUnderAllOrders);
    for order in LinearOrder::all(n) {
        for &m in &menus {
            let s = substitution_balance_sum(rho, &order, m)?;
            r.max_deviation = r.max_deviation.max((s - 1.0).abs());
            if (s - 1.0).abs() > tol_sum {
                r.violate(Witness { alternatives: order.ids(u), menus: vec![u.label(m)], values: vec![s] });
            }
        }
    }
    Ok(r)
}

/// Odds between two options do not depend on the menu.
pub fn check_iia(rho: &ChoiceData, tol_iia: f64) -> Result<AxiomReport, AxiomError> {
    let u = rho.universe();
    let n = u.len();
    let mut r = AxiomReport::new(Axiom::Iia);
    for x in 0..n {
        for y in x + 1..n {
            let mut odds: Vec<(Menu, f64)> = Vec::new();
            for m in rho.menus().filter(|m| m.contains(x) && m.contains(y)) {
                let (px, py) = (prob(rho, x, m).unwrap_or(0.0), prob(rho, y, m).unwrap_or(0.0));
                if py <= 0.0 {
                    return Err(AxiomError::ZeroProbability { alternative: u.id(y).into(), menu: u.label(m) });
                }
                odds.push((m, px / py));
            }
            let Some(&(m0, reference)) = odds.first() else { continue };
            for &(m, o) in &odds[1..] {
                let dev = (o - reference).abs() / reference.abs().max(1.0);
                r.max_deviation = r.max_deviation.max(dev);
                if dev > tol_iia {
                    r.violate(Witness {
                        alternatives: vec![u.id(x).into(), u.id(y).into()],
                        menus: vec![u.label(m0), u.label(m)],
                        values: vec![reference, o],
                    });
                }
            }
        }
    }
    Ok(r)
}

/// For `x > y > z`: `rho(x,{x,z}) > max(rho(x,{x,y}), rho(y,{y,z}))`.
pub fn check_consistency(rho: &ChoiceData, order: &LinearOrder) -> Result<AxiomReport, AxiomError> {
    let u = rho.universe();
    let mut r = AxiomReport::new(Axiom::Consistency);
    let ranking = order.ranking();
    let n = ranking.len();
    if n < 3 {
        return Ok(r.with_note("fewer than three alternatives"));
    }
    let pair = |a: usize, b: usize| -> Result<f64, AxiomError> {
        let m = Menu::from_indices([a, b]);
        prob(rho, a, m).ok_or_else(|| AxiomError::MissingMenu(u.label(m)))
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (x, y, z) = (ranking[i], ranking[j], ranking[k]);
                let (xz, xy, yz) = (pair(x, z)?, pair(x, y)?, pair(y, z)?);
                let gap = xy.max(yz) - xz;
                r.max_deviation = r.max_deviation.max(gap);
                if gap >= 0.0 {
                    r.violate(Witness {
                        alternatives: vec![u.id(x).into(), u.id(y).into(), u.id(z).into()],
                        menus: vec![],
                        values: vec![xz, xy, yz],
                    });
                }
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StochasticTransitivity {
    pub weak: AxiomReport,
    pub moderate: AxiomReport,
    pub strong: AxiomReport,
}

/// Weak, moderate and strong stochastic transitivity of binary choices.
/// Witness values are `rho(x,{x,y})`, `rho(y,{y,z})`, `rho(x,{x,z})`.
pub fn stochastic_transitivity(rho: &ChoiceData) -> StochasticTransitivity {
    let u = rho.universe();
    let n = u.len();
    let mut weak = AxiomReport::new(Axiom::WeakStochasticTransitivity);
    let mut moderate = AxiomReport::new(Axiom::ModerateStochasticTransitivity);
    let mut strong = AxiomReport::new(Axiom::StrongStochasticTransitivity);
    let pair = |a: usize, b: usize| prob(rho, a, Menu::from_indices([a, b]));
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            for z in (0..n).filter(|&z| z != x && z != y) {
                let (Some(xy), Some(yz), Some(xz)) = (pair(x, y), pair(y, z), pair(x, z)) else { continue };
                if xy < 0.5 - WEAK_INEQ_TOL || yz < 0.5 - WEAK_INEQ_TOL {
                    continue;
                }
                let witness = || Witness {
                    alternatives: vec![u.id(x).into(), u.id(y).into(), u.id(z).into()],
                    menus: vec![],
                    values: vec![xy, yz, xz],
                };
                for (report, bound) in [(&mut weak, 0.5), (&mut moderate, xy.min(yz)), (&mut strong, xy.max(yz))] {
                    report.max_deviation = report.max_deviation.max(bound - xz);
                    if xz < bound - WEAK_INEQ_TOL {
                        report.violate(witness());
                    }
                }
            }
        }
    }
    StochasticTransitivity { weak, moderate, strong }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Characterization {
    /// Positivity, rationality, strict regularity, constant gain and
    /// substitution balance; the model holds iff all pass.
    pub reports: Vec<AxiomReport>,
    pub order: Option<LinearOrder>,
    /// Whether salience lines up with the revealed order. Only meaningful
    /// when `reports` all pass.
    pub consistency: Option<AxiomReport>,
}

impl Characterization {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }
}

/// Conditions characterizing the model, run in sequence.
pub fn check_all(rho: &ChoiceData, cfg: &AxiomConfig) -> Result<Characterization, AxiomError> {
    let mut reports = vec![check_positivity(rho)];
    let (rationality, order) = check_rationality(rho, cfg.sign_eps)?;
    reports.push(rationality);
    reports.push(check_strict_regularity(rho));
    let mut consistency = None;
    if let Some(order) = &order {
        match check_constant_gain(rho, order, cfg.tol_gamma) {
            Ok(r) => reports.push(r),
            Err(AxiomError::NoAdmissibleTriple) => {}
            Err(e) => return Err(e),
        }
        reports.push(check_substitution_balance(rho, order, cfg.tol_sum)?);
        consistency = Some(check_consistency(rho, order)?);
    }
    Ok(Characterization { reports, order, consistency })
}
