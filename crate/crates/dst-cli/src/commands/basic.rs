use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use dst::axioms::{check_all, check_iia, stochastic_transitivity, AxiomConfig};
use dst::error::{AxiomError, IdentifyError};
use dst::estimate::{fit_dst, fit_dst_all_orders, fit_logit, fit_luce, FitConfig, FitReport, ObservedFrequencies, UtilitySpec};
use dst::identify::{identify as identify_params, predict, IdentifyConfig};
use dst::io::{default_menu_id, LoadedData};
use dst::model::{sample_choices, ChoiceModel};
use dst::rationality::{rationality_index, swaps_index};
use dst::scalar::Scalar;
use dst::types::{ChoiceData, LinearOrder, MenuCollection, MenuWeights, Universe};

use super::params::{parse_json, ModelFile};
use super::{by_id, ids, num, rows_json, Ctx, Outcome};
use crate::args::{DataArgs, FitArgs, MenuSet, ModelArg, SimulateArgs, SwapsArgs};
use crate::error::{input, rejected, CliError};

pub fn identify_error(e: IdentifyError) -> CliError {
    match e {
        IdentifyError::Model(_) | IdentifyError::TooFewAlternatives(_) | IdentifyError::MissingMenu(_) | IdentifyError::Incomplete { .. } | IdentifyError::NotATriple => input(e),
        other => rejected(other),
    }
}

fn axiom_error(e: AxiomError) -> CliError {
    match e {
        AxiomError::Identify(inner) => identify_error(inner),
        AxiomError::ZeroProbability { .. } => rejected(e),
        other => input(other),
    }
}

pub fn identify<T: Scalar>(ctx: &mut Ctx, args: &DataArgs) -> Result<Outcome, CliError> {
    let loaded = ctx.load(args)?;
    let rho: ChoiceData<T> = loaded.choice_data().map_err(input)?;
    let tol = ctx.config.tolerances;
    let cfg = IdentifyConfig { sign_eps: tol.sign_eps, tol_alpha: tol.tol_alpha };
    let id = identify_params(&rho, &cfg).map_err(identify_error)?;
    let u = rho.universe();
    let full = u.full_menu();
    let grand = predict(&id.params, full, Some(rho.collection())).map_err(input)?;
    let per_triple: Vec<Value> = id
        .alpha
        .per_triple
        .iter()
        .map(|(t, a)| json!({ "triple": t.iter().map(|&i| u.id(i)).collect::<Vec<_>>().join(">"), "alpha": num(a) }))
        .collect();
    Ok(Outcome::ok(json!({
        "order": id.params.order().ids(u),
        "alpha": num(id.params.alpha()),
        "weights": by_id(u, id.params.weights().values(), full),
        "alpha_per_triple": per_triple,
        "alpha_max_deviation": id.alpha.max_deviation,
        "triples": id.triples.len(),
        "grand_set": { "menu": u.label(full), "out_of_sample": grand.out_of_sample, "probabilities": by_id(u, &grand.probs, full) },
    })))
}

pub fn axioms(ctx: &mut Ctx, args: &DataArgs) -> Result<Outcome, CliError> {
    let loaded = ctx.load(args)?;
    let rho: ChoiceData = loaded.choice_data().map_err(input)?;
    let tol = ctx.config.tolerances;
    let cfg = AxiomConfig { tol_gamma: tol.tol_gamma, tol_sum: tol.tol_sum, tol_iia: tol.tol_iia, sign_eps: tol.sign_eps };
    let c = check_all(&rho, &cfg).map_err(axiom_error)?;
    let passed = c.passed();
    let iia = check_iia(&rho, tol.tol_iia).ok();
    Ok(Outcome::judged(
        passed,
        json!({
            "passed": passed,
            "axioms": c.reports,
            "revealed_order": c.order.map(|o| o.ids(rho.universe())),
            "consistency": c.consistency,
            "iia": iia,
            "stochastic_transitivity": stochastic_transitivity(&rho),
        }),
    ))
}

fn observed(loaded: &LoadedData) -> Result<ObservedFrequencies, CliError> {
    match loaded.counts() {
        Some(c) => ObservedFrequencies::from_counts(&loaded.universe, c).map_err(input),
        None => Ok(ObservedFrequencies::uniform(loaded.choice_data().map_err(input)?)),
    }
}

fn covariate_spec(text: &str, u: &Universe) -> Result<UtilitySpec, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| CliError::Input("covariates file is empty".into()))?.split(',').map(str::trim).collect();
    if header.first() != Some(&"alternative") || header.len() < 2 {
        return Err(CliError::Input("covariates header must be alternative,attr1,...".into()));
    }
    let names: Vec<String> = header[1..].iter().map(|s| s.to_string()).collect();
    let mut features: Vec<Option<Vec<f64>>> = vec![None; u.len()];
    for (k, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(CliError::Input(format!("covariates line {}: expected {} fields", k + 2, header.len())));
        }
        let x = u.index_of(cells[0]).map_err(input)?;
        let row = cells[1..].iter().map(|c| c.parse::<f64>().map_err(|_| CliError::Input(format!("covariates line {}: bad number {c}", k + 2)))).collect::<Result<_, _>>()?;
        features[x] = Some(row);
    }
    let features = features
        .into_iter()
        .enumerate()
        .map(|(x, f)| f.ok_or_else(|| CliError::Input(format!("no covariates for {}", u.id(x)))))
        .collect::<Result<_, _>>()?;
    Ok(UtilitySpec { names, features })
}

fn fit_json(r: &FitReport) -> Value {
    let u = &r.universe;
    let full = u.full_menu();
    let mut out = Map::new();
    out.insert("model".into(), json!(r.model));
    if let Some(a) = r.alpha {
        out.insert("alpha".into(), json!(a));
    }
    if let Some(o) = &r.order {
        out.insert("order".into(), json!(o.ids(u)));
    }
    if let Some(w) = &r.weights {
        out.insert("weights".into(), by_id(u, w, full));
    }
    if let Some(c) = &r.coefficients {
        out.insert("coefficients".into(), json!(c));
    }
    out.insert("log_likelihood".into(), json!(r.log_likelihood));
    out.insert("null_log_likelihood".into(), json!(r.null_log_likelihood));
    out.insert("free_parameters".into(), json!(r.n_free_params));
    out.insert("r2".into(), json!(r.fit.r2));
    out.insert("adjusted_r2".into(), json!(r.fit.adjusted_r2));
    out.insert("mcfadden_r2".into(), json!(r.fit.mcfadden_r2));
    out.insert("predicted".into(), rows_json(&r.predicted));
    out.insert("converged".into(), json!(r.converged));
    out.insert("restarts".into(), json!(r.restarts));
    out.insert("diagnostics".into(), json!(r.diagnostics));
    if !r.order_table.is_empty() {
        let table: Vec<Value> = r.order_table.iter().map(|(o, ll)| json!({ "order": o.ids(u), "log_likelihood": ll })).collect();
        out.insert("order_table".into(), Value::Array(table));
    }
    Value::Object(out)
}

pub fn fit(ctx: &mut Ctx, args: &FitArgs) -> Result<Outcome, CliError> {
    let loaded = ctx.load(&args.data)?;
    let obs = observed(&loaded)?;
    let u = obs.universe().clone();
    let cfg = FitConfig { restarts: ctx.config.restarts, seed: ctx.config.seed, ..FitConfig::default() };
    let mut coefficient_names = None;
    let report = match args.model {
        ModelArg::Dst => {
            let text = args.order.as_deref().ok_or_else(|| CliError::Input("--model dst needs --order".into()))?;
            let order = LinearOrder::new(ids(&u, text)?).map_err(input)?;
            fit_dst(&obs, &order, &cfg)
        }
        ModelArg::DstSearch => fit_dst_all_orders(&obs, &cfg),
        ModelArg::Luce => fit_luce(&obs),
        ModelArg::Logit => {
            let spec = match &args.covariates {
                Some(p) => {
                    let text = ctx.read(p)?;
                    covariate_spec(&text, &u)?
                }
                None => UtilitySpec::alternative_specific(&u),
            };
            coefficient_names = Some(spec.names.clone());
            fit_logit(&obs, &spec, &cfg)
        }
    }
    .map_err(input)?;
    let mut result = fit_json(&report);
    if let (Some(names), Some(coefs)) = (coefficient_names, &report.coefficients) {
        result["coefficients"] = Value::Object(names.into_iter().zip(coefs).map(|(n, c)| (n, json!(c))).collect());
    }
    Ok(Outcome::ok(result))
}

pub fn swaps(ctx: &mut Ctx, args: &SwapsArgs) -> Result<Outcome, CliError> {
    let loaded = ctx.load(&args.data)?;
    let rho: ChoiceData = loaded.choice_data().map_err(input)?;
    let sigma = match &args.sigma {
        Some(p) => {
            let text = ctx.read(p)?;
            let raw: BTreeMap<String, f64> = parse_json(&text)?;
            let by_name: BTreeMap<&str, _> = loaded.menu_ids.iter().map(|(m, id)| (id.as_str(), *m)).collect();
            let mut w = BTreeMap::new();
            for (id, v) in raw {
                let m = by_name.get(id.as_str()).ok_or_else(|| CliError::Input(format!("unknown menu {id} in sigma")))?;
                w.insert(*m, v);
            }
            MenuWeights::new(rho.collection(), w).map_err(input)?
        }
        None => MenuWeights::uniform(rho.collection()),
    };
    let r = swaps_index(&rho, &sigma).map_err(input)?;
    let u = rho.universe();
    Ok(Outcome::ok(json!({
        "index": r.index,
        "minimizers": r.minimizers.iter().map(|o| o.ids(u)).collect::<Vec<_>>(),
        "costs": r.costs.iter().map(|(o, c)| json!({ "order": o.ids(u), "cost": c })).collect::<Vec<_>>(),
    })))
}

pub fn rationality(ctx: &mut Ctx, args: &DataArgs) -> Result<Outcome, CliError> {
    let loaded = ctx.load(args)?;
    let rho: ChoiceData = loaded.choice_data().map_err(input)?;
    let r = rationality_index(&rho).map_err(input)?;
    Ok(Outcome::ok(json!(r)))
}

pub fn simulate(ctx: &mut Ctx, args: &SimulateArgs) -> Result<Outcome, CliError> {
    let text = ctx.read(&args.model)?;
    let file: ModelFile = parse_json(&text)?;
    let params = file.params::<f64>()?;
    let u = params.universe().clone();
    let n = u.len();
    let (lo, hi) = match args.menus {
        MenuSet::Pairs => (2, 2),
        MenuSet::Triples => (3, 3),
        MenuSet::PairsTriples => (2, 3),
        MenuSet::All => (2, n),
    };
    let menus = MenuCollection::with_sizes(u.clone(), lo, hi.min(n));
    if menus.is_empty() {
        return Err(CliError::Input("no menus of the requested sizes".into()));
    }
    let sigma = MenuWeights::uniform(&menus);
    let sample = sample_choices(&ChoiceModel::Dst(params), &menus, &sigma, args.n, ctx.config.seed).map_err(input)?;
    let mut menu_doc = Map::new();
    let mut prob = Map::new();
    for (m, counts) in &sample.counts {
        let id = default_menu_id(&u, *m);
        menu_doc.insert(id.clone(), json!(u.menu_ids(*m)));
        prob.insert(id, Value::Object(m.iter().map(|x| (u.id(x).to_string(), json!(counts[x]))).collect()));
    }
    let doc = json!({ "universe": u.ids(), "menus": menu_doc, "prob": prob });
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&doc).expect("json");
        std::fs::write(out, text + "\n").map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    }
    Ok(Outcome::ok(json!({ "draws": args.n, "data": doc, "frequencies": rows_json(&sample.frequencies) })))
}
