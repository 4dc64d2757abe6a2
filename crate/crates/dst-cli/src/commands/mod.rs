mod basic;
mod extended;
mod params;

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use dst::io::{load_dataset, LoadedData};
use dst::scalar::Scalar;
use dst::types::{ChoiceData, Menu, Universe};

use crate::args::{Command, DataArgs};
use crate::config::RunConfig;
use crate::error::{input, CliError};
use crate::report::{Input, Status};

pub struct Outcome {
    pub status: Status,
    pub result: Value,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Self { status: Status::Ok, result }
    }

    pub fn judged(passed: bool, result: Value) -> Self {
        Self { status: if passed { Status::Ok } else { Status::Rejected }, result }
    }
}

pub struct Ctx {
    pub config: RunConfig,
    pub inputs: Vec<Input>,
    pub warnings: Vec<String>,
}

impl Ctx {
    pub fn new(config: RunConfig) -> Self {
        Self { config, inputs: Vec::new(), warnings: Vec::new() }
    }

    pub fn record(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(Input::read(path)?);
        Ok(())
    }

    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        self.record(path)?;
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn load(&mut self, args: &DataArgs) -> Result<LoadedData, CliError> {
        self.record(&args.data)?;
        let is_csv = args.data.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            let sidecar = args.menus.clone().unwrap_or_else(|| args.data.with_file_name("menus.csv"));
            if sidecar.exists() {
                self.record(&sidecar)?;
            }
        }
        let loaded = load_dataset(&args.data, args.menus.as_deref()).map_err(input)?;
        self.warnings.extend(loaded.warnings.iter().cloned());
        Ok(loaded)
    }
}

/// Exact values print as fractions, floats as JSON numbers.
pub fn num<T: Scalar>(v: &T) -> Value {
    if T::EXACT {
        Value::String(v.to_string())
    } else {
        json!(v.to_f64())
    }
}

/// `{id: value}` over the members of `menu`.
pub fn by_id<T: Scalar>(u: &Universe, values: &[T], menu: Menu) -> Value {
    let mut m = Map::new();
    for x in menu.iter() {
        m.insert(u.id(x).to_string(), num(&values[x]));
    }
    Value::Object(m)
}

/// `{menu label: {id: value}}` for every observed menu.
pub fn rows_json<T: Scalar>(data: &ChoiceData<T>) -> Value {
    let u = data.universe();
    let mut out = Map::new();
    for m in data.menus() {
        out.insert(u.label(m), by_id(u, data.row(m).expect("observed"), m));
    }
    Value::Object(out)
}

pub fn menu_map<T: Scalar>(u: &Universe, values: &BTreeMap<Menu, T>) -> Value {
    Value::Object(values.iter().map(|(m, v)| (u.label(*m), num(v))).collect())
}

/// Names separated by commas, mapped to universe positions.
pub fn ids(u: &Universe, text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',').map(|s| u.index_of(s.trim()).map_err(input)).collect()
}

pub fn run(ctx: &mut Ctx, command: &Command) -> Result<Outcome, CliError> {
    let exact = ctx.config.exact;
    match command {
        Command::Identify(a) if exact => basic::identify::<dst::scalar::Rational>(ctx, a),
        Command::Identify(a) => basic::identify::<f64>(ctx, a),
        Command::Axioms(a) => basic::axioms(ctx, a),
        Command::Fit(a) => basic::fit(ctx, a),
        Command::Swaps(a) => basic::swaps(ctx, a),
        Command::RationalityIndex(a) => basic::rationality(ctx, a),
        Command::Simulate(a) => basic::simulate(ctx, a),
        Command::Dstpa { command } if exact => extended::dstpa::<dst::scalar::Rational>(ctx, command),
        Command::Dstpa { command } => extended::dstpa::<f64>(ctx, command),
        Command::Ddst { command } if exact => extended::ddst::<dst::scalar::Rational>(ctx, command),
        Command::Ddst { command } => extended::ddst::<f64>(ctx, command),
        Command::Hdst { command } if exact => extended::hdst::<dst::scalar::Rational>(ctx, command),
        Command::Hdst { command } => extended::hdst::<f64>(ctx, command),
        Command::Microfoundation { command } if exact => extended::microfoundation::<dst::scalar::Rational>(ctx, command),
        Command::Microfoundation { command } => extended::microfoundation::<f64>(ctx, command),
        Command::ListDesign(a) if exact => extended::list_design::<dst::scalar::Rational>(ctx, a),
        Command::ListDesign(a) => extended::list_design::<f64>(ctx, a),
    }
}

pub fn name(command: &Command) -> &'static str {
    use crate::args::{DdstCommand, DstpaCommand, HdstCommand, MicroCommand};
    match command {
        Command::Identify(_) => "identify",
        Command::Axioms(_) => "axioms",
        Command::Fit(_) => "fit",
        Command::Swaps(_) => "swaps",
        Command::RationalityIndex(_) => "rationality-index",
        Command::Simulate(_) => "simulate",
        Command::Dstpa { command: DstpaCommand::Identify(_) } => "dstpa identify",
        Command::Dstpa { command: DstpaCommand::Check(_) } => "dstpa check",
        Command::Ddst { command: DdstCommand::Construct { .. } } => "ddst construct",
        Command::Ddst { command: DdstCommand::Identify { .. } } => "ddst identify",
        Command::Hdst { command: HdstCommand::Simulate { .. } } => "hdst simulate",
        Command::Hdst { command: HdstCommand::RumCheck(_) } => "hdst rum-check",
        Command::Hdst { command: HdstCommand::Approximate { .. } } => "hdst approximate",
        Command::Microfoundation { command: MicroCommand::Verify { .. } } => "microfoundation verify",
        Command::ListDesign(_) => "list-design",
    }
}
