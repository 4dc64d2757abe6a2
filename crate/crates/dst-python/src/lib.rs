//! Python bindings. Choice data are dicts mapping a menu (any iterable of
//! option ids) to `{id: probability}`. Probabilities may be floats, ints,
//! `fractions.Fraction` or strings such as `"1/3"`.

use std::collections::BTreeMap;
use std::fmt::Display;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};
use serde_json::{json, Value};

use dst::axioms::{check_all, AxiomConfig};
use dst::estimate::{fit_dst, fit_dst_all_orders, FitConfig, ObservedFrequencies};
use dst::identify::{identify as identify_dst, IdentifyConfig};
use dst::io::{load_dataset, load_json_str, LoadedData};
use dst::listdesign::{optimize_exhaustive, parse_list_problem};
use dst::model::dst_rcf;
use dst::scalar::{parse_scalar, Rational, Scalar};
use dst::types::{ChoiceData, DstParams, LinearOrder, LuceWeights, Menu, MenuCollection, Universe};

fn err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn text_of(v: &Bound<'_, PyAny>) -> PyResult<String> {
    Ok(v.str()?.to_string())
}

/// Converts the Python mapping to the on-disk JSON layout and loads it, so
/// validation matches the file readers.
fn load(data: &Bound<'_, PyDict>) -> PyResult<LoadedData> {
    let mut menus = serde_json::Map::new();
    let mut prob = serde_json::Map::new();
    for (k, (menu, row)) in data.iter().enumerate() {
        let members: Vec<String> = menu.try_iter()?.map(|x| text_of(&x?)).collect::<PyResult<_>>()?;
        let row = row.cast::<PyDict>().map_err(|_| PyValueError::new_err("each menu maps to a dict of probabilities"))?;
        let mut cells = serde_json::Map::new();
        for (alt, p) in row.iter() {
            cells.insert(text_of(&alt)?, Value::String(text_of(&p)?));
        }
        let id = format!("m{k}");
        menus.insert(id.clone(), json!(members));
        prob.insert(id, Value::Object(cells));
    }
    load_json_str(&json!({ "menus": menus, "prob": prob }).to_string()).map_err(err)
}

fn menu_key<'py>(py: Python<'py>, u: &Universe, m: Menu) -> PyResult<Bound<'py, PyTuple>> {
    PyTuple::new(py, u.menu_ids(m))
}

fn weights_dict<'py, T: Scalar>(py: Python<'py>, u: &Universe, values: &[T], exact: bool) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (i, v) in values.iter().enumerate() {
        if exact {
            d.set_item(u.id(i), v.to_string())?;
        } else {
            d.set_item(u.id(i), v.to_f64())?;
        }
    }
    Ok(d)
}

fn params<T: Scalar>(alpha: &str, order: &[String], weights: &BTreeMap<String, String>) -> PyResult<DstParams<T>> {
    let u = Universe::new(order.iter().cloned()).map_err(err)?;
    let mut w = vec![T::zero(); u.len()];
    for (id, v) in weights {
        w[u.index_of(id).map_err(err)?] = parse_scalar(v).ok_or_else(|| err(format!("not a number: {v}")))?;
    }
    let alpha = parse_scalar(alpha).ok_or_else(|| err(format!("not a number: {alpha}")))?;
    let order = LinearOrder::from_ids(&u, order).map_err(err)?;
    DstParams::new(u, alpha, order, LuceWeights::new(w).map_err(err)?).map_err(err)
}

fn predict<'py, T: Scalar>(py: Python<'py>, p: &DstParams<T>, min_size: usize, exact: bool) -> PyResult<Bound<'py, PyDict>> {
    let u = p.universe().clone();
    let menus = MenuCollection::with_sizes(u.clone(), min_size.max(1), u.len());
    let rho = dst_rcf(p, &menus).map_err(err)?;
    let out = PyDict::new(py);
    for m in rho.menus() {
        let row = rho.row(m).expect("observed");
        let d = PyDict::new(py);
        for x in m.iter() {
            if exact {
                d.set_item(u.id(x), row[x].to_string())?;
            } else {
                d.set_item(u.id(x), row[x].to_f64())?;
            }
        }
        out.set_item(menu_key(py, &u, m)?, d)?;
    }
    Ok(out)
}

/// Choice probabilities of the model on every menu of at least `min_size`
/// options. `order` lists the options best first; `weights` maps each id to
/// its salience weight.
#[pyfunction]
#[pyo3(signature = (alpha, order, weights, min_size = 2, exact = false))]
fn choice_probabilities<'py>(
    py: Python<'py>,
    alpha: &Bound<'py, PyAny>,
    order: Vec<String>,
    weights: &Bound<'py, PyDict>,
    min_size: usize,
    exact: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let alpha = text_of(alpha)?;
    let weights = weights.iter().map(|(k, v)| Ok((text_of(&k)?, text_of(&v)?))).collect::<PyResult<BTreeMap<_, _>>>()?;
    if exact {
        predict(py, &params::<Rational>(&alpha, &order, &weights)?, min_size, true)
    } else {
        predict(py, &params::<f64>(&alpha, &order, &weights)?, min_size, false)
    }
}

fn identified<'py, T: Scalar>(py: Python<'py>, rho: &ChoiceData<T>, exact: bool) -> PyResult<Bound<'py, PyDict>> {
    let id = identify_dst(rho, &IdentifyConfig::default()).map_err(err)?;
    let u = rho.universe();
    let out = PyDict::new(py);
    if exact {
        out.set_item("alpha", id.params.alpha().to_string())?;
    } else {
        out.set_item("alpha", id.params.alpha().to_f64())?;
    }
    out.set_item("order", id.params.order().ids(u))?;
    out.set_item("weights", weights_dict(py, u, id.params.weights().values(), exact)?)?;
    Ok(out)
}

/// Recovers the order, System-2 weight and salience weights from data on all
/// pairs and triples.
#[pyfunction]
#[pyo3(signature = (data, exact = false))]
fn identify<'py>(py: Python<'py>, data: &Bound<'py, PyDict>, exact: bool) -> PyResult<Bound<'py, PyDict>> {
    let loaded = load(data)?;
    if exact {
        identified(py, &loaded.choice_data::<Rational>().map_err(err)?, true)
    } else {
        identified(py, &loaded.choice_data::<f64>().map_err(err)?, false)
    }
}

/// Runs the characterizing conditions. Returns `passed`, a per-condition
/// verdict, the revealed order (if any) and whether the two systems agree.
#[pyfunction]
fn check_axioms<'py>(py: Python<'py>, data: &Bound<'py, PyDict>) -> PyResult<Bound<'py, PyDict>> {
    let rho: ChoiceData = load(data)?.choice_data().map_err(err)?;
    let c = check_all(&rho, &AxiomConfig::default()).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("passed", c.passed())?;
    let each = PyDict::new(py);
    for r in &c.reports {
        each.set_item(serde_json::to_value(r.axiom).map_err(err)?.as_str().unwrap_or_default(), r.passed)?;
    }
    out.set_item("axioms", each)?;
    out.set_item("order", c.order.map(|o| o.ids(rho.universe())))?;
    out.set_item("consistent", c.consistency.map(|r| r.passed))?;
    Ok(out)
}

/// Maximum-likelihood fit. `order` fixes the preference; without it every
/// order is tried. Data given as whole-number counts are weighted by menu
/// frequency.
#[pyfunction]
#[pyo3(signature = (data, order = None, seed = 0))]
fn fit<'py>(py: Python<'py>, data: &Bound<'py, PyDict>, order: Option<Vec<String>>, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let loaded = load(data)?;
    let observed = match loaded.counts() {
        Some(c) => ObservedFrequencies::from_counts(&loaded.universe, c).map_err(err)?,
        None => ObservedFrequencies::uniform(loaded.choice_data().map_err(err)?),
    };
    let cfg = FitConfig { seed, ..FitConfig::default() };
    let report = match order {
        Some(o) => fit_dst(&observed, &LinearOrder::from_ids(&loaded.universe, &o).map_err(err)?, &cfg),
        None => fit_dst_all_orders(&observed, &cfg),
    }
    .map_err(err)?;
    let u = &report.universe;
    let out = PyDict::new(py);
    out.set_item("alpha", report.alpha)?;
    out.set_item("order", report.order.as_ref().map(|o| o.ids(u)))?;
    if let Some(w) = &report.weights {
        out.set_item("weights", weights_dict(py, u, w, false)?)?;
    }
    out.set_item("log_likelihood", report.log_likelihood)?;
    out.set_item("r2", report.fit.r2)?;
    out.set_item("adjusted_r2", report.fit.adjusted_r2)?;
    out.set_item("mcfadden_r2", report.fit.mcfadden_r2)?;
    out.set_item("converged", report.converged)?;
    Ok(out)
}

/// Reads a `.json` or `.csv` data file into the dict layout used here.
/// Counts come back as ints, probabilities as strings so nothing is rounded.
#[pyfunction]
#[pyo3(signature = (path, menus = None))]
fn read_data<'py>(py: Python<'py>, path: std::path::PathBuf, menus: Option<std::path::PathBuf>) -> PyResult<Bound<'py, PyDict>> {
    let loaded = load_dataset(&path, menus.as_deref()).map_err(err)?;
    let out = PyDict::new(py);
    if let Some(counts) = loaded.counts() {
        let u = &loaded.universe;
        for (m, row) in counts {
            let d = PyDict::new(py);
            for x in m.iter() {
                d.set_item(u.id(x), row[x])?;
            }
            out.set_item(menu_key(py, u, m)?, d)?;
        }
        return Ok(out);
    }
    let rho: ChoiceData<Rational> = loaded.choice_data().map_err(err)?;
    let u = rho.universe();
    for m in rho.menus() {
        let row = rho.row(m).expect("observed");
        let d = PyDict::new(py);
        for x in m.iter() {
            d.set_item(u.id(x), row[x].to_string())?;
        }
        out.set_item(menu_key(py, u, m)?, d)?;
    }
    Ok(out)
}

/// Best product list for a problem given as JSON text (the `list-design`
/// file format), by exhaustive search.
#[pyfunction]
#[pyo3(signature = (problem, exact = false))]
fn optimal_list<'py>(py: Python<'py>, problem: &str, exact: bool) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    if exact {
        let p = parse_list_problem::<Rational>(problem).map_err(err)?;
        let s = optimize_exhaustive(&p).map_err(err)?;
        out.set_item("list", s.list.iter().map(|&i| p.products()[i].clone()).collect::<Vec<_>>())?;
        out.set_item("platform_utility", s.platform_utility.to_string())?;
    } else {
        let p = parse_list_problem::<f64>(problem).map_err(err)?;
        let s = optimize_exhaustive(&p).map_err(err)?;
        out.set_item("list", s.list.iter().map(|&i| p.products()[i].clone()).collect::<Vec<_>>())?;
        out.set_item("platform_utility", s.platform_utility)?;
    }
    Ok(out)
}

#[pymodule]
fn pydst(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(choice_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(identify, m)?)?;
    m.add_function(wrap_pyfunction!(check_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(read_data, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_list, m)?)?;
    Ok(())
}
