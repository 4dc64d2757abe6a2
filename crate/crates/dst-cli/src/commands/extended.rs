use serde_json::{json, Map, Value};

use dst::availability::{check_block_marschak_default, check_mido, identify_dstpa, recover_phi, ChoiceDataWithDefault};
use dst::error::{AvailabilityError, ExtensionError};
use dst::extensions::{
    alpha_full_bounds, ddst_construct_3, ddst_construct_3_with, ddst_identify_consistent, ddst_identify_known_best, hdst_rcf, rum_approximate,
    rum_check, verify_foc, DDstParams, HDstParams,
};
use dst::identify::IdentifyConfig;
use dst::io::choice_data_json;
use dst::listdesign::{list_value, optimize_exhaustive, optimize_lp, parse_list_problem, verify_block_structure, ListSolution};
use dst::scalar::{Rational, Scalar};
use dst::types::{ChoiceData, LinearOrder, LuceWeights, Menu, MenuCollection, Universe};

use super::params::{build_params, parse_json, scalar, scalar_text, MixtureFile, RumFile};
use super::{by_id, ids, menu_map, num, rows_json, Ctx, Outcome};
use crate::args::{DdstCommand, DstpaCommand, HdstCommand, ListArgs, Method, MicroCommand};
use crate::error::{input, rejected, CliError};

/// Largest universe for the exact strictness check after an approximation.
const EXACT_CHECK_MAX: usize = 6;

fn availability_error(e: AvailabilityError) -> CliError {
    match e {
        AvailabilityError::BlockMarschakViolation { .. }
        | AvailabilityError::NormalizationFailure { .. }
        | AvailabilityError::NoDstRepresentation(_)
        | AvailabilityError::MidoViolation { .. } => rejected(e),
        other => input(other),
    }
}

fn extension_error(e: ExtensionError) -> CliError {
    match e {
        ExtensionError::NoRepresentation(_) | ExtensionError::InconsistentRanking(_) | ExtensionError::AxiomViolation { .. } => rejected(e),
        other => input(other),
    }
}

pub fn dstpa<T: Scalar>(ctx: &mut Ctx, command: &DstpaCommand) -> Result<Outcome, CliError> {
    let args = match command {
        DstpaCommand::Identify(a) | DstpaCommand::Check(a) => a,
    };
    let loaded = ctx.load(args)?;
    let (collection, rows, defaults) = loaded.rows_with_default::<T>().map_err(input)?;
    let data = ChoiceDataWithDefault::new(collection, rows, defaults).map_err(availability_error)?;
    let u = data.universe().clone();
    let tol = ctx.config.tolerances;
    match command {
        DstpaCommand::Identify(_) => {
            let cfg = IdentifyConfig { sign_eps: tol.sign_eps, tol_alpha: tol.tol_alpha };
            let id = identify_dstpa(&data, &cfg).map_err(availability_error)?;
            let pi: Value = Value::Object(id.params.pi.iter().map(|(m, v)| (u.label(m), num(v))).collect());
            let base = &id.params.base;
            Ok(Outcome::ok(json!({
                "order": base.order().ids(&u),
                "alpha": num(base.alpha()),
                "weights": by_id(&u, base.weights().values(), u.full_menu()),
                "availability": pi,
                "associated": rows_json(&id.associated),
                "conditioning": id.conditioning,
            })))
        }
        DstpaCommand::Check(_) => {
            let bm = check_block_marschak_default(&data).map_err(availability_error)?;
            let mido = check_mido(&data, tol.tol_mido).map_err(availability_error)?;
            let phi = if mido.passed {
                let phi = recover_phi(&data, tol.tol_mido).map_err(availability_error)?;
                Some(by_id(&u, &phi, u.full_menu()))
            } else {
                None
            };
            Ok(Outcome::judged(bm.passed, json!({ "block_marschak_default": bm, "menu_independent_default": mido, "availability_phi": phi })))
        }
    }
}

fn ddst_json<T: Scalar>(p: &DDstParams<T>) -> Value {
    let u = p.universe();
    json!({
        "order": p.order().ids(u),
        "weights": by_id(u, p.weights().values(), u.full_menu()),
        "alpha_by_menu": menu_map(u, p.alphas()),
    })
}

pub fn ddst<T: Scalar>(ctx: &mut Ctx, command: &DdstCommand) -> Result<Outcome, CliError> {
    match command {
        DdstCommand::Construct { data, order, alpha_full } => {
            let loaded = ctx.load(data)?;
            let rho: ChoiceData<T> = loaded.choice_data().map_err(input)?;
            let u = rho.universe().clone();
            let built = ddst_construct_3(&rho).map_err(extension_error)?;
            let (params, interval) = match order {
                None if alpha_full.is_none() => (built.params.clone(), built.alpha_full_interval.clone()),
                _ => {
                    let order = match order {
                        Some(text) => LinearOrder::new(ids(&u, text)?).map_err(input)?,
                        None => built.params.order().clone(),
                    };
                    if !built.orders.contains(&order) {
                        return Err(CliError::Rejected(format!("order {} admits no representation", order.label(&u))));
                    }
                    let interval = alpha_full_bounds(&rho, &order).map_err(extension_error)?;
                    let alpha = match alpha_full {
                        Some(text) => scalar_text::<T>(text)?,
                        None => (interval.0.clone() + interval.1.clone()) / T::from_i64(2),
                    };
                    (ddst_construct_3_with(&rho, &order, alpha).map_err(extension_error)?, interval)
                }
            };
            Ok(Outcome::ok(json!({
                "representation": ddst_json(&params),
                "alpha_full_interval": [num(&interval.0), num(&interval.1)],
                "admissible_orders": built.orders.iter().map(|o| o.ids(&u)).collect::<Vec<_>>(),
                "unique": built.unique,
            })))
        }
        DdstCommand::Identify { data, best } => {
            let loaded = ctx.load(data)?;
            let rho: ChoiceData<T> = loaded.choice_data().map_err(input)?;
            let id = match best {
                Some(b) => {
                    let x = rho.universe().index_of(b).map_err(input)?;
                    ddst_identify_known_best(&rho, x)
                }
                None => ddst_identify_consistent(&rho),
            }
            .map_err(extension_error)?;
            Ok(Outcome::ok(json!({
                "representation": ddst_json(&id.params),
                "top_weight_interval": [num(&id.top_weight_interval.0), num(&id.top_weight_interval.1)],
                "unique": id.unique,
                "axioms": id.reports,
            })))
        }
    }
}

pub fn hdst<T: Scalar>(ctx: &mut Ctx, command: &HdstCommand) -> Result<Outcome, CliError> {
    match command {
        HdstCommand::Simulate { params, min_size, max_size, out } => {
            let text = ctx.read(params)?;
            let file: MixtureFile = parse_json(&text)?;
            let u = Universe::new(file.universe.clone()).map_err(input)?;
            let types = file
                .types
                .iter()
                .map(|t| Ok((scalar::<T>(&t.share)?, build_params::<T>(&u, &t.alpha, &t.order, &t.weights)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let mixture = HDstParams::new(types).map_err(extension_error)?;
            let hi = max_size.unwrap_or(u.len()).min(u.len());
            let menus = MenuCollection::with_sizes(u, (*min_size).max(1), hi);
            let data = hdst_rcf(&mixture, &menus).map_err(extension_error)?;
            let doc = choice_data_json(&data, None, true);
            if let Some(out) = out {
                let text = serde_json::to_string_pretty(&doc).expect("json");
                std::fs::write(out, text + "\n").map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
            }
            Ok(Outcome::ok(json!({ "data": doc })))
        }
        HdstCommand::RumCheck(args) => {
            let loaded = ctx.load(args)?;
            let rho: ChoiceData<T> = loaded.choice_data().map_err(input)?;
            let r = rum_check(&rho).map_err(extension_error)?;
            Ok(Outcome::judged(r.report.passed, json!(r)))
        }
        HdstCommand::Approximate { rum, alpha, lambda } => {
            let text = ctx.read(rum)?;
            let file: RumFile = parse_json(&text)?;
            let u = Universe::new(file.universe.clone()).map_err(input)?;
            let types = file.types.iter().map(|t| Ok((t.share, LinearOrder::from_ids(&u, &t.order).map_err(input)?))).collect::<Result<Vec<_>, CliError>>()?;
            let a = rum_approximate(&u, &types, *alpha, *lambda).map_err(extension_error)?;
            let strict = if u.len() <= EXACT_CHECK_MAX {
                let exact = a.params.to_exact().map_err(extension_error)?;
                let rho = hdst_rcf::<Rational>(&exact, &MenuCollection::with_sizes(u.clone(), 2, u.len())).map_err(extension_error)?;
                Some(rum_check(&rho).map_err(extension_error)?.strict_interior)
            } else {
                None
            };
            let mixture: Vec<Value> = a
                .params
                .types()
                .iter()
                .map(|(s, p)| json!({ "share": s, "alpha": p.alpha(), "order": p.order().ids(&u), "weights": by_id(&u, p.weights().values(), u.full_menu()) }))
                .collect();
            Ok(Outcome::ok(json!({
                "types": mixture,
                "sup_error": a.sup_error,
                "bound": a.bound,
                "within_bound": a.sup_error <= a.bound * (1.0 + 1e-9),
                "strict_interior_exact": strict,
            })))
        }
    }
}

pub fn microfoundation<T: Scalar>(_ctx: &mut Ctx, command: &MicroCommand) -> Result<Outcome, CliError> {
    let MicroCommand::Verify { weights, best, improvement, menu } = command;
    let mut pairs = Vec::new();
    for pair in weights.split(',') {
        let (id, v) = pair.split_once('=').ok_or_else(|| CliError::Input(format!("expected id=value, got {pair}")))?;
        pairs.push((id.trim().to_string(), scalar_text::<T>(v)?));
    }
    let u = Universe::new(pairs.iter().map(|(id, _)| id.clone())).map_err(input)?;
    let mut values = vec![T::zero(); u.len()];
    for (id, v) in pairs {
        values[u.index_of(&id).map_err(input)?] = v;
    }
    let w = LuceWeights::new(values).map_err(input)?;
    let best = u.index_of(best.trim()).map_err(input)?;
    let menu = match menu {
        Some(text) => Menu::from_indices(ids(&u, text)?),
        None => u.full_menu(),
    };
    let c = verify_foc(&w, menu, best, scalar_text::<T>(improvement)?).map_err(extension_error)?;
    let ok = c.matches_model && c.max_residual.to_f64() <= 1e-12;
    Ok(Outcome::judged(
        ok,
        json!({
            "alpha": num(&c.alpha),
            "probabilities": by_id(&u, &c.probabilities, menu),
            "sum_multiplier": num(&c.sum_multiplier),
            "improvement_multiplier": num(&c.improvement_multiplier),
            "binding": c.binding,
            "max_residual": num(&c.max_residual),
            "matches_model": c.matches_model,
        }),
    ))
}

fn solution_json<T: Scalar>(names: impl Fn(&[usize]) -> Vec<String>, products: &[String], s: &ListSolution<T>) -> Value {
    let demand: Map<String, Value> = products.iter().zip(&s.demand).map(|(p, d)| (p.clone(), num(d))).collect();
    json!({
        "list": names(&s.list),
        "platform_utility": num(&s.platform_utility),
        "demand": demand,
        "perceived_best": products[s.perceived_best],
        "co_optimal": s.co_optimal.iter().map(|l| names(l)).collect::<Vec<_>>(),
    })
}

pub fn list_design<T: Scalar>(ctx: &mut Ctx, args: &ListArgs) -> Result<Outcome, CliError> {
    let text = ctx.read(&args.problem)?;
    let problem = parse_list_problem::<T>(&text).map_err(input)?;
    let names = |l: &[usize]| problem.names(l);
    let payoff_order = problem.payoff_order();
    let payoff_value = list_value(&problem, &payoff_order).map_err(input)?;
    let mut result = Map::new();
    let list = match args.method {
        Method::Exhaustive => {
            let s = optimize_exhaustive(&problem).map_err(input)?;
            result.insert("solution".into(), solution_json(names, problem.products(), &s));
            s.list
        }
        Method::Lp => {
            let s = optimize_lp(&problem).map_err(input)?;
            result.insert("solution".into(), solution_json(names, problem.products(), &s.solution));
            result.insert("winner_position".into(), json!(s.winner_position + 1));
            result.insert("root_bound".into(), json!(s.root_bound));
            result.insert("nodes".into(), json!(s.nodes));
            s.solution.list
        }
    };
    result.insert("payoff_ordered".into(), json!({ "list": problem.names(&payoff_order), "platform_utility": num(&payoff_value) }));
    let blocks = verify_block_structure(&problem, &list).map_err(input)?;
    result.insert("blocks".into(), json!(blocks));
    Ok(Outcome::ok(Value::Object(result)))
}
