//! Choosing the order in which a platform lists its products when every
//! customer follows a dual-system model.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use itertools::Itertools;
use microlp::{ComparisonOp, Error as LpError, LinearExpr, OptimizationDirection, Problem, SolveOutcome, Variable};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ListError;
use crate::io::value_text;
use crate::scalar::{parse_scalar, Scalar};

/// Largest product set for exhaustive search (9! lists).
pub const MAX_EXHAUSTIVE: usize = 9;
/// Branch-and-bound gives up after this many nodes.
pub const MAX_NODES: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Customer<T: Scalar = f64> {
    pub share: T,
    pub alpha: T,
    /// Salience by position, strictly decreasing.
    pub salience: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Objective<T: Scalar = f64> {
    ExpectedPayoff,
    /// Constant elasticity of substitution `delta > 1`.
    Ces { delta: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ListProblem<T: Scalar = f64> {
    products: Vec<String>,
    payoffs: Vec<T>,
    utilities: Vec<T>,
    boost: Vec<T>,
    customers: Vec<Customer<T>>,
    objective: Objective<T>,
    tie_break: bool,
}

fn invalid<V>(msg: impl Into<String>) -> Result<V, ListError> {
    Err(ListError::Invalid(msg.into()))
}

impl<T: Scalar> ListProblem<T> {
    pub fn new(
        products: Vec<String>,
        payoffs: Vec<T>,
        utilities: Vec<T>,
        boost: Vec<T>,
        customers: Vec<Customer<T>>,
        objective: Objective<T>,
    ) -> Result<Self, ListError> {
        let p = Self { products, payoffs, utilities, boost, customers, objective, tie_break: false };
        p.validate()?;
        if let Some((x, y)) = p.perceived_tie() {
            return Err(ListError::PerceivedUtilityTie(p.products[x].clone(), p.products[y].clone()));
        }
        Ok(p)
    }

    /// Allows lists with tied perceived utilities, broken in favour of the
    /// product listed first in the problem.
    pub fn with_tie_break(mut self) -> Self {
        self.tie_break = true;
        self
    }

    fn validate(&self) -> Result<(), ListError> {
        let s = self.products.len();
        if s == 0 {
            return invalid("no products");
        }
        if s > 63 {
            return Err(ListError::TooManyProducts { size: s, max: 63 });
        }
        if self.products.iter().collect::<HashSet<_>>().len() != s {
            return invalid("duplicate product names");
        }
        for (name, v) in [("payoffs", &self.payoffs), ("utilities", &self.utilities), ("boost", &self.boost)] {
            if v.len() != s {
                return invalid(format!("{name} has {} entries for {s} products", v.len()));
            }
        }
        if self.payoffs.iter().any(|t| !(*t > T::zero())) {
            return invalid("payoffs must be positive");
        }
        for i in 0..s {
            for j in 0..i {
                if self.payoffs[i] == self.payoffs[j] {
                    return invalid(format!("{} and {} have the same payoff", self.products[j], self.products[i]));
                }
            }
        }
        if self.boost.iter().any(|b| *b < T::zero()) || self.boost.windows(2).any(|w| w[1] > w[0]) {
            return invalid("boost must be nonnegative and weakly decreasing");
        }
        if self.customers.is_empty() {
            return invalid("no customers");
        }
        for (i, c) in self.customers.iter().enumerate() {
            if !(c.share > T::zero() && c.share <= T::one()) {
                return invalid(format!("customer {i}: share must lie in (0, 1]"));
            }
            if !(c.alpha > T::zero() && c.alpha < T::one()) {
                return invalid(format!("customer {i}: alpha must lie in (0, 1)"));
            }
            if c.salience.len() != s {
                return invalid(format!("customer {i}: salience has {} entries for {s} positions", c.salience.len()));
            }
            if c.salience.iter().any(|w| !(*w > T::zero())) || c.salience.windows(2).any(|w| !(w[1] < w[0])) {
                return invalid(format!("customer {i}: salience must be positive and strictly decreasing"));
            }
        }
        let total = T::sum(self.customers.iter().map(|c| &c.share));
        if !total.approx_eq(&T::one(), 1e-9) {
            return invalid(format!("customer shares sum to {total}"));
        }
        if let Objective::Ces { delta } = &self.objective {
            if !(*delta > T::one()) {
                return Err(ListError::InvalidDelta(delta.to_f64()));
            }
        }
        Ok(())
    }

    /// Two products whose perceived utilities coincide under some list.
    fn perceived_tie(&self) -> Option<(usize, usize)> {
        let s = self.products.len();
        let tol = T::tolerance(1e-12);
        for x in 0..s {
            for y in x + 1..s {
                for p in 0..s {
                    for q in (0..s).filter(|&q| q != p) {
                        let gap = (self.utilities[x].clone() + self.boost[p].clone()) - (self.utilities[y].clone() + self.boost[q].clone());
                        if gap.abs() <= tol {
                            return Some((x, y));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn products(&self) -> &[String] {
        &self.products
    }

    pub fn payoffs(&self) -> &[T] {
        &self.payoffs
    }

    pub fn utilities(&self) -> &[T] {
        &self.utilities
    }

    pub fn objective(&self) -> &Objective<T> {
        &self.objective
    }

    /// Products by decreasing payoff.
    pub fn payoff_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.payoffs[b].partial_cmp(&self.payoffs[a]).unwrap_or(Ordering::Equal));
        idx
    }

    /// Product with the highest perceived utility when listed as `list`.
    pub fn perceived_best(&self, list: &[usize]) -> usize {
        let mut best = (list[0], self.utilities[list[0]].clone() + self.boost[0].clone());
        for (k, &x) in list.iter().enumerate().skip(1) {
            let v = self.utilities[x].clone() + self.boost[k].clone();
            if v > best.1 || (v == best.1 && x < best.0) {
                best = (x, v);
            }
        }
        best.0
    }

    fn check_list(&self, list: &[usize]) -> Result<(), ListError> {
        let s = self.len();
        if list.len() != s || list.iter().any(|&x| x >= s) || list.iter().collect::<HashSet<_>>().len() != s {
            return Err(ListError::NotAList);
        }
        Ok(())
    }

    /// Product indices from names, in list order.
    pub fn list_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, ListError> {
        let list = names
            .iter()
            .map(|n| self.products.iter().position(|p| p == n.as_ref()).ok_or_else(|| ListError::UnknownProduct(n.as_ref().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        self.check_list(&list)?;
        Ok(list)
    }

    pub fn names(&self, list: &[usize]) -> Vec<String> {
        list.iter().map(|&x| self.products[x].clone()).collect()
    }
}

/// Population choice probabilities, indexed by product, when products are
/// shown in the order `list`.
pub fn list_demand<T: Scalar>(problem: &ListProblem<T>, list: &[usize]) -> Result<Vec<T>, ListError> {
    problem.check_list(list)?;
    let winner = problem.perceived_best(list);
    let mut demand = vec![T::zero(); problem.len()];
    for c in &problem.customers {
        let total = T::sum(&c.salience);
        let one_minus = T::one() - c.alpha.clone();
        for (k, &x) in list.iter().enumerate() {
            let luce = one_minus.clone() * c.salience[k].clone() / total.clone();
            demand[x] = demand[x].clone() + c.share.clone() * luce;
        }
        demand[winner] = demand[winner].clone() + c.share.clone() * c.alpha.clone();
    }
    Ok(demand)
}

pub fn platform_utility<T: Scalar>(problem: &ListProblem<T>, demand: &[T]) -> Result<T, ListError> {
    match &problem.objective {
        Objective::ExpectedPayoff => Ok(T::sum(demand.iter().zip(&problem.payoffs).map(|(d, t)| d.clone() * t.clone()).collect::<Vec<_>>().iter())),
        Objective::Ces { delta } => {
            let d = delta.to_f64();
            if d <= 1.0 {
                return Err(ListError::InvalidDelta(d));
            }
            let e = (d - 1.0) / d;
            let inner: f64 = demand.iter().zip(&problem.payoffs).map(|(p, t)| p.to_f64() * t.to_f64().powf(e)).sum();
            T::from_f64(inner.powf(1.0 / e)).ok_or(ListError::InvalidDelta(d))
        }
    }
}

pub fn list_value<T: Scalar>(problem: &ListProblem<T>, list: &[usize]) -> Result<T, ListError> {
    platform_utility(problem, &list_demand(problem, list)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ListSolution<T: Scalar = f64> {
    /// Product at each position.
    pub list: Vec<usize>,
    pub platform_utility: T,
    pub demand: Vec<T>,
    /// Product with the highest perceived utility under the list.
    pub perceived_best: usize,
    /// Every optimal list found, sorted; the first is `list`.
    pub co_optimal: Vec<Vec<usize>>,
}

impl<T: Scalar> ListSolution<T> {
    fn from_list(problem: &ListProblem<T>, list: Vec<usize>, co_optimal: Vec<Vec<usize>>) -> Result<Self, ListError> {
        let demand = list_demand(problem, &list)?;
        Ok(Self {
            platform_utility: platform_utility(problem, &demand)?,
            perceived_best: problem.perceived_best(&list),
            demand,
            list,
            co_optimal,
        })
    }
}

struct Best<T> {
    value: Option<T>,
    lists: Vec<Vec<usize>>,
}

impl<T: Scalar> Best<T> {
    fn offer(&mut self, value: T, list: Vec<usize>) {
        let tol = T::tolerance(1e-12);
        match &self.value {
            Some(v) if value.clone() - v.clone() > tol => {
                self.value = Some(value);
                self.lists = vec![list];
            }
            Some(v) if (value.clone() - v.clone()).abs() <= tol => self.lists.push(list),
            Some(_) => {}
            None => {
                self.value = Some(value);
                self.lists = vec![list];
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        if let Some(v) = other.value {
            let lists = other.lists;
            let first = lists[0].clone();
            let before = self.value.clone();
            self.offer(v.clone(), first);
            let kept_other = before.as_ref().is_none_or(|b| v.clone() - b.clone() >= T::zero() - T::tolerance(1e-12));
            if kept_other {
                self.lists.extend(lists.into_iter().skip(1));
            }
        }
        self
    }
}

/// Best list by enumerating every order.
pub fn optimize_exhaustive<T: Scalar>(problem: &ListProblem<T>) -> Result<ListSolution<T>, ListError> {
    let s = problem.len();
    if s > MAX_EXHAUSTIVE {
        return Err(ListError::TooManyProducts { size: s, max: MAX_EXHAUSTIVE });
    }
    let best = (0..s)
        .into_par_iter()
        .map(|first| -> Result<Best<T>, ListError> {
            let rest: Vec<usize> = (0..s).filter(|&x| x != first).collect();
            let mut local = Best { value: None, lists: Vec::new() };
            for tail in rest.iter().copied().permutations(rest.len()) {
                let mut list = Vec::with_capacity(s);
                list.push(first);
                list.extend(tail);
                local.offer(list_value(problem, &list)?, list);
            }
            Ok(local)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(Best { value: None, lists: Vec::new() }, Best::merge);
    let mut lists = best.lists;
    lists.sort();
    ListSolution::from_list(problem, lists[0].clone(), lists)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T: Scalar = f64> {
    pub solution: ListSolution<T>,
    /// Position of the perceived-best product.
    pub winner_position: usize,
    pub root_bound: f64,
    pub nodes: usize,
}

struct Node {
    bound: f64,
    id: usize,
    fixed: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then_with(|| other.id.cmp(&self.id))
    }
}

/// A sparse row: `Σ coef·x[v] (relation) rhs`.
struct Row {
    terms: Vec<(usize, f64)>,
    relation: ComparisonOp,
    rhs: f64,
}

struct Program {
    s: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
}

impl Program {
    fn build<T: Scalar>(problem: &ListProblem<T>) -> Self {
        let s = problem.len();
        let a = |j: usize, k: usize| j * s + k;
        let b = |j: usize, k: usize| s * s + j * s + k;
        let mut objective = vec![0.0; 2 * s * s];
        for j in 0..s {
            let tau = problem.payoffs[j].to_f64();
            let mut system_two = 0.0;
            for c in &problem.customers {
                let total: f64 = c.salience.iter().map(T::to_f64).sum();
                let (eta, alpha) = (c.share.to_f64(), c.alpha.to_f64());
                for k in 0..s {
                    objective[a(j, k)] += tau * eta * (1.0 - alpha) * c.salience[k].to_f64() / total;
                }
                system_two += eta * alpha;
            }
            for k in 0..s {
                objective[b(j, k)] = tau * system_two;
            }
        }
        let mut rows = Vec::new();
        for j in 0..s {
            rows.push(Row { terms: (0..s).map(|k| (a(j, k), 1.0)).collect(), relation: ComparisonOp::Eq, rhs: 1.0 });
            rows.push(Row { terms: (0..s).map(|k| (a(k, j), 1.0)).collect(), relation: ComparisonOp::Eq, rhs: 1.0 });
        }
        rows.push(Row { terms: (s * s..2 * s * s).map(|v| (v, 1.0)).collect(), relation: ComparisonOp::Eq, rhs: 1.0 });
        let perceived = |j: usize, k: usize| problem.utilities[j].clone() + problem.boost[k].clone();
        for j in 0..s {
            for k in 0..s {
                let below = vec![(b(j, k), 1.0), (a(j, k), -1.0)];
                rows.push(Row { terms: below.clone(), relation: ComparisonOp::Le, rhs: 0.0 });
                let mut dominance = below;
                for m in 0..s {
                    for q in 0..s {
                        if perceived(m, q) > perceived(j, k) {
                            dominance.push((a(m, q), 1.0));
                        }
                    }
                }
                rows.push(Row { terms: dominance, relation: ComparisonOp::Ge, rhs: 0.0 });
            }
        }
        Self { s, objective, rows }
    }

    /// Relaxation over the unit box with some variables pinned.
    fn relax(&self, fixed: &[(usize, f64)]) -> Result<Option<(Vec<f64>, f64)>, ListError> {
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<Variable> = self
            .objective
            .iter()
            .enumerate()
            .map(|(v, &c)| {
                let bounds = fixed.iter().rev().find(|f| f.0 == v).map_or((0.0, 1.0), |f| (f.1, f.1));
                lp.add_var(c, bounds)
            })
            .collect();
        for row in &self.rows {
            let expr: LinearExpr = row.terms.iter().map(|&(v, c)| (vars[v], c)).collect();
            lp.add_constraint(expr, row.relation, row.rhs);
        }
        match lp.solve() {
            Ok(SolveOutcome::Solution(sol)) => Ok(Some((vars.iter().map(|&v| sol[v]).collect(), sol.objective()))),
            Ok(SolveOutcome::Interrupted(_)) => Err(ListError::InfeasibleModel("relaxation was interrupted".into())),
            Err(LpError::Infeasible) => Ok(None),
            Err(e) => Err(ListError::InfeasibleModel(format!("relaxation failed: {e:?}"))),
        }
    }

    /// The list encoded by an integral assignment block.
    fn list(&self, x: &[f64]) -> Option<Vec<usize>> {
        let s = self.s;
        let mut list = vec![usize::MAX; s];
        for j in 0..s {
            for k in 0..s {
                let v = x[j * s + k];
                if (v - v.round()).abs() > 1e-7 {
                    return None;
                }
                if v > 0.5 {
                    list[k] = j;
                }
            }
        }
        list.iter().all(|&j| j < s).then_some(list)
    }

    fn branch_variable(&self, x: &[f64]) -> Option<usize> {
        (0..self.s * self.s)
            .filter(|&v| (x[v] - x[v].round()).abs() > 1e-7)
            .min_by(|&a, &b| (x[a] - 0.5).abs().total_cmp(&(x[b] - 0.5).abs()).then(a.cmp(&b)))
    }
}

/// Best list for an expected-payoff platform from the 0-1 program, solved
/// by best-first branch and bound on its linear relaxation.
pub fn optimize_lp<T: Scalar>(problem: &ListProblem<T>) -> Result<LpSolution<T>, ListError> {
    if !matches!(problem.objective, Objective::ExpectedPayoff) {
        return Err(ListError::ObjectiveUnsupported);
    }
    if let Some((x, y)) = problem.perceived_tie() {
        return Err(ListError::InfeasibleModel(format!("perceived utilities of {} and {} can tie", problem.products[x], problem.products[y])));
    }
    let program = Program::build(problem);
    let mut incumbent_list = problem.payoff_order();
    let mut incumbent = list_value(problem, &incumbent_list)?.to_f64();
    let Some((_, root_bound)) = program.relax(&[])? else {
        return Err(ListError::InfeasibleModel("relaxation is infeasible".into()));
    };
    let mut heap = BinaryHeap::from([Node { bound: root_bound, id: 0, fixed: Vec::new() }]);
    let mut next_id = 1;
    let mut nodes = 0;
    while let Some(node) = heap.pop() {
        if node.bound <= incumbent + 1e-9 {
            break;
        }
        nodes += 1;
        if nodes > MAX_NODES {
            return Err(ListError::NodeLimit(MAX_NODES));
        }
        let Some((x, value)) = program.relax(&node.fixed)? else {
            continue;
        };
        if value <= incumbent + 1e-9 {
            continue;
        }
        match program.branch_variable(&x) {
            None => {
                if let Some(list) = program.list(&x) {
                    let exact = list_value(problem, &list)?.to_f64();
                    if exact > incumbent + 1e-12 {
                        incumbent = exact;
                        incumbent_list = list;
                    }
                }
            }
            Some(v) => {
                for fix in [1.0, 0.0] {
                    let mut fixed = node.fixed.clone();
                    fixed.push((v, fix));
                    heap.push(Node { bound: value, id: next_id, fixed });
                    next_id += 1;
                }
            }
        }
    }
    let solution = ListSolution::from_list(problem, incumbent_list.clone(), vec![incumbent_list])?;
    let winner_position = solution.list.iter().position(|&x| x == solution.perceived_best).expect("winner is listed");
    Ok(LpSolution { solution, winner_position, root_bound, nodes })
}

/// Block structure of an optimal list. Ranks and positions are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockReport {
    pub perceived_best: String,
    /// Payoff rank of the perceived-best product.
    pub a: usize,
    /// Position of the perceived-best product.
    pub m: usize,
    pub highest_utility: String,
    /// Payoff rank of the product with the highest observed utility.
    pub h: usize,
    pub first_block: Vec<String>,
    pub middle_block: Vec<String>,
    pub last_block: Vec<String>,
    pub first_block_ordered: bool,
    pub a_at_most_h: bool,
    pub highest_utility_not_above_m: bool,
    pub last_block_ordered: bool,
    pub passed: bool,
}

/// Checks the first-block and last-block pattern every optimal list obeys.
pub fn verify_block_structure<T: Scalar>(problem: &ListProblem<T>, list: &[usize]) -> Result<BlockReport, ListError> {
    problem.check_list(list)?;
    let s = problem.len();
    let by_payoff = problem.payoff_order();
    let payoff_rank = |x: usize| by_payoff.iter().position(|&y| y == x).expect("product") + 1;
    let position = |x: usize| list.iter().position(|&y| y == x).expect("product") + 1;
    let xa = problem.perceived_best(list);
    let a = payoff_rank(xa);
    let m = position(xa);
    let xh = (0..s)
        .max_by(|&p, &q| problem.utilities[p].partial_cmp(&problem.utilities[q]).unwrap_or(Ordering::Equal).then(q.cmp(&p)))
        .expect("non-empty");
    let h = payoff_rank(xh);
    let lh = position(xh);
    let first_block_ordered = m <= a
        && (1..a).all(|i| {
            let want = if i < m { i } else { i + 1 };
            position(by_payoff[i - 1]) == want
        });
    let after: Vec<usize> = list[lh..].to_vec();
    let last_block_ordered = after.windows(2).all(|w| problem.payoffs[w[0]] > problem.payoffs[w[1]]);
    let cut = a.max(lh).min(s);
    let names = |xs: &[usize]| problem.names(xs);
    let report = BlockReport {
        perceived_best: problem.products[xa].clone(),
        a,
        m,
        highest_utility: problem.products[xh].clone(),
        h,
        first_block: names(&list[..a.min(s)]),
        middle_block: names(&list[a.min(s)..cut]),
        last_block: names(&list[cut..]),
        first_block_ordered,
        a_at_most_h: a <= h,
        highest_utility_not_above_m: lh >= m,
        last_block_ordered,
        passed: false,
    };
    let passed = report.first_block_ordered && report.a_at_most_h && report.highest_utility_not_above_m && report.last_block_ordered;
    Ok(BlockReport { passed, ..report })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomerFile {
    share: Value,
    alpha: Value,
    salience: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ObjectiveFile {
    ExpectedPayoff,
    Ces { delta: Value },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    products: Vec<String>,
    payoffs: Vec<Value>,
    utilities: Vec<Value>,
    boost: Vec<Value>,
    customers: Vec<CustomerFile>,
    #[serde(default = "default_objective")]
    objective: ObjectiveFile,
    #[serde(default)]
    tie_break: bool,
}

fn default_objective() -> ObjectiveFile {
    ObjectiveFile::ExpectedPayoff
}

fn number<T: Scalar>(v: &Value) -> Result<T, ListError> {
    let text = value_text(v).map_err(|e| ListError::Parse(e.to_string()))?;
    parse_scalar(&text).ok_or_else(|| ListError::Parse(format!("not a number: {text}")))
}

fn numbers<T: Scalar>(vs: &[Value]) -> Result<Vec<T>, ListError> {
    vs.iter().map(number).collect()
}

/// Parses a problem from JSON: products, payoffs, utilities, boost,
/// customers (share, alpha, salience), and an optional objective.
pub fn parse_list_problem<T: Scalar>(text: &str) -> Result<ListProblem<T>, ListError> {
    let f: ProblemFile = serde_json::from_str(text).map_err(|e| ListError::Parse(e.to_string()))?;
    let customers = f
        .customers
        .iter()
        .map(|c| Ok(Customer { share: number(&c.share)?, alpha: number(&c.alpha)?, salience: numbers(&c.salience)? }))
        .collect::<Result<Vec<_>, ListError>>()?;
    let objective = match &f.objective {
        ObjectiveFile::ExpectedPayoff => Objective::ExpectedPayoff,
        ObjectiveFile::Ces { delta } => Objective::Ces { delta: number(delta)? },
    };
    let (payoffs, utilities, boost) = (numbers(&f.payoffs)?, numbers(&f.utilities)?, numbers(&f.boost)?);
    if f.tie_break {
        let p = ListProblem { products: f.products, payoffs, utilities, boost, customers, objective, tie_break: true };
        p.validate()?;
        Ok(p)
    } else {
        ListProblem::new(f.products, payoffs, utilities, boost, customers, objective)
    }
}
