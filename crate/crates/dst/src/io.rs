//! Reading and writing choice data.
//!
//! Long CSV: `menu_id,alternative,value`, with a sidecar `menu_id,alternative`
//! file listing menu members. JSON:
//! `{"universe": [...], "menus": {id: [alts]}, "prob": {id: {alt: value}}}`.
//! Values are frequencies or integer counts; counts are normalized per menu.
//! The outside option appears as `__default__`, and the empty menu as `EMPTY`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::IoError;
use crate::scalar::{parse_scalar, Scalar};
use crate::types::{ChoiceData, Menu, MenuCollection, Universe, DEFAULT_ID};

/// Id of the empty menu in data files.
pub const EMPTY_MENU_ID: &str = "EMPTY";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Counts,
    Frequencies,
}

/// Parsed data file, values kept as text until a numeric type is chosen.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedData {
    pub universe: Universe,
    pub menu_ids: BTreeMap<Menu, String>,
    pub kind: ValueKind,
    /// Per menu: universe-indexed values, plus the outside option's value.
    cells: BTreeMap<Menu, (Vec<Option<String>>, Option<String>)>,
    pub warnings: Vec<String>,
}

impl LoadedData {
    pub fn has_default(&self) -> bool {
        self.cells.values().any(|(_, d)| d.is_some())
    }

    pub fn collection(&self) -> MenuCollection {
        MenuCollection::new(self.universe.clone(), self.cells.keys().copied().filter(|m| !m.is_empty()))
            .expect("validated on load")
    }

    fn parse<T: Scalar>(&self, raw: &Option<String>, menu: Menu) -> Result<T, IoError> {
        match raw {
            None => Ok(T::zero()),
            Some(s) => parse_scalar::<T>(s).ok_or_else(|| IoError::Parse(format!("bad value {s:?} in menu {}", self.menu_ids[&menu]))),
        }
    }

    /// Raw values per menu, with the outside option last (zero if absent).
    fn numeric_rows<T: Scalar>(&self) -> Result<BTreeMap<Menu, (Vec<T>, T)>, IoError> {
        let mut out = BTreeMap::new();
        for (m, (vals, default)) in &self.cells {
            let row = vals.iter().map(|v| self.parse::<T>(v, *m)).collect::<Result<Vec<T>, _>>()?;
            let d = self.parse::<T>(default, *m)?;
            let (row, d) = if self.kind == ValueKind::Counts {
                let total = T::sum(&row) + d.clone();
                if total.is_zero() {
                    return Err(IoError::Parse(format!("menu {} has no observations", self.menu_ids[m])));
                }
                (row.into_iter().map(|v| v / total.clone()).collect(), d / total)
            } else {
                (row, d)
            };
            out.insert(*m, (row, d));
        }
        Ok(out)
    }

    /// Choice data without an outside option.
    pub fn choice_data<T: Scalar>(&self) -> Result<ChoiceData<T>, IoError> {
        if self.has_default() {
            return Err(IoError::Parse(format!("data contain {DEFAULT_ID}; load them as data with an outside option")));
        }
        let rows = self.numeric_rows::<T>()?.into_iter().map(|(m, (r, _))| (m, r)).collect();
        Ok(ChoiceData::new(self.collection(), rows)?)
    }

    /// Rows including the outside option's probability, for every menu and the empty menu.
    pub fn rows_with_default<T: Scalar>(&self) -> Result<(MenuCollection, BTreeMap<Menu, Vec<T>>, BTreeMap<Menu, T>), IoError> {
        let mut rows = BTreeMap::new();
        let mut defaults = BTreeMap::new();
        for (m, (r, d)) in self.numeric_rows::<T>()? {
            if !m.is_empty() {
                rows.insert(m, r);
            }
            defaults.insert(m, d);
        }
        Ok((self.collection(), rows, defaults))
    }

    /// Observation counts per menu, when the file holds counts.
    pub fn counts(&self) -> Option<BTreeMap<Menu, Vec<u64>>> {
        if self.kind != ValueKind::Counts || self.has_default() {
            return None;
        }
        let mut out = BTreeMap::new();
        for (m, (vals, _)) in &self.cells {
            let row = vals.iter().map(|v| v.as_deref().map_or(Some(0), |s| s.trim().parse::<u64>().ok())).collect::<Option<Vec<u64>>>()?;
            out.insert(*m, row);
        }
        Some(out)
    }
}

/// Loads `.json`, or `.csv` with a sidecar (`menus.csv` next to the data by default).
pub fn load_dataset(path: &Path, menus: Option<&Path>) -> Result<LoadedData, IoError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "json" => {
            let text = read(path)?;
            load_json_str(&text)
        }
        "csv" => {
            let sidecar: PathBuf = match menus {
                Some(p) => p.to_path_buf(),
                None => path.with_file_name("menus.csv"),
            };
            load_csv_str(&read(path)?, &read(&sidecar)?)
        }
        _ => Err(IoError::Parse(format!("unsupported file type: {}", path.display()))),
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::Io(format!("{}: {e}", path.display())))
}

struct Builder {
    menus: BTreeMap<String, Vec<String>>,
    values: BTreeMap<String, BTreeMap<String, String>>,
}

impl Builder {
    fn finish(self, explicit_universe: Option<Vec<String>>) -> Result<LoadedData, IoError> {
        let mut warnings = Vec::new();
        let ids: Vec<String> = match explicit_universe {
            Some(u) => u,
            None => {
                let mut all: Vec<String> = self.menus.values().flatten().cloned().collect();
                all.sort();
                all.dedup();
                all
            }
        };
        let universe = Universe::new(ids)?;
        let mut menu_ids = BTreeMap::new();
        let mut cells = BTreeMap::new();
        let mut menus = self.menus;
        if self.values.contains_key(EMPTY_MENU_ID) {
            menus.entry(EMPTY_MENU_ID.to_string()).or_default();
        }
        for (id, members) in &menus {
            if id == EMPTY_MENU_ID && !members.is_empty() {
                return Err(IoError::Parse(format!("menu {EMPTY_MENU_ID} must have no members")));
            }
            let menu = universe.menu(members)?;
            if let Some(prev) = menu_ids.insert(menu, id.clone()) {
                return Err(IoError::Parse(format!("menus {prev} and {id} have the same members")));
            }
            let Some(vals) = self.values.get(id) else {
                return Err(IoError::Parse(format!("menu {id} has no data rows")));
            };
            let mut row = vec![None; universe.len()];
            let mut default = None;
            for (alt, v) in vals {
                if alt == DEFAULT_ID {
                    default = Some(v.clone());
                    continue;
                }
                let i = universe.index_of(alt)?;
                if !menu.contains(i) {
                    return Err(IoError::Parse(format!("{alt} is not a member of menu {id}")));
                }
                row[i] = Some(v.clone());
            }
            if menu.is_empty() && default.is_none() {
                return Err(IoError::Parse(format!("menu {EMPTY_MENU_ID} needs a {DEFAULT_ID} value")));
            }
            cells.insert(menu, (row, default));
        }
        for id in self.values.keys() {
            if !menus.contains_key(id) {
                return Err(IoError::Parse(format!("data refer to undeclared menu {id}")));
            }
        }
        let kind = detect_kind(&cells);
        let collection = MenuCollection::new(universe.clone(), cells.keys().copied().filter(|m| !m.is_empty()))?;
        let richness = collection.richness();
        if !richness.missing_subsets.is_empty() {
            warnings.push(format!("menu collection is not closed under subsets ({} missing)", richness.missing_subsets.len()));
        }
        if !richness.missing_small.is_empty() {
            warnings.push(format!("{} pairs or triples of the universe are not observed", richness.missing_small.len()));
        }
        Ok(LoadedData { universe, menu_ids, kind, cells, warnings })
    }
}

fn is_integer(s: &str) -> bool {
    let s = s.trim();
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Counts if every value is an integer and some menu does not already sum to one.
fn detect_kind(cells: &BTreeMap<Menu, (Vec<Option<String>>, Option<String>)>) -> ValueKind {
    let all_values = || cells.values().flat_map(|(r, d)| r.iter().flatten().chain(d.iter()));
    if !all_values().all(|v| is_integer(v)) {
        return ValueKind::Frequencies;
    }
    let sums_to_one = cells.values().all(|(r, d)| r.iter().flatten().chain(d.iter()).map(|v| v.trim().parse::<u64>().unwrap_or(0)).sum::<u64>() == 1);
    if sums_to_one {
        ValueKind::Frequencies
    } else {
        ValueKind::Counts
    }
}

#[derive(Deserialize)]
struct DataRow {
    menu_id: String,
    alternative: String,
    value: String,
}

#[derive(Deserialize)]
struct MenuRow {
    menu_id: String,
    alternative: String,
}

pub fn load_csv_str(data: &str, menus: &str) -> Result<LoadedData, IoError> {
    let mut b = Builder { menus: BTreeMap::new(), values: BTreeMap::new() };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(menus.as_bytes());
    for row in rdr.deserialize::<MenuRow>() {
        let row = row.map_err(|e| IoError::Parse(format!("menus file: {e}")))?;
        if row.alternative == DEFAULT_ID {
            return Err(IoError::Parse(format!("{DEFAULT_ID} cannot be listed as a menu member")));
        }
        let members = b.menus.entry(row.menu_id.clone()).or_default();
        if members.contains(&row.alternative) {
            return Err(IoError::Parse(format!("{} listed twice in menu {}", row.alternative, row.menu_id)));
        }
        members.push(row.alternative);
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(data.as_bytes());
    for row in rdr.deserialize::<DataRow>() {
        let row = row.map_err(|e| IoError::Parse(format!("data file: {e}")))?;
        let cell = b.values.entry(row.menu_id.clone()).or_default();
        if cell.insert(row.alternative.clone(), row.value).is_some() {
            return Err(IoError::Parse(format!("duplicate cell ({}, {})", row.menu_id, row.alternative)));
        }
    }
    b.finish(None)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonData {
    universe: Option<Vec<String>>,
    menus: BTreeMap<String, Vec<String>>,
    prob: BTreeMap<String, BTreeMap<String, Value>>,
}

pub(crate) fn value_text(v: &Value) -> Result<String, IoError> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        other => Err(IoError::Parse(format!("expected a number, got {other}"))),
    }
}

pub fn load_json_str(text: &str) -> Result<LoadedData, IoError> {
    let doc: JsonData = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    let mut values = BTreeMap::new();
    for (id, cells) in doc.prob {
        let mut row = BTreeMap::new();
        for (alt, v) in cells {
            row.insert(alt, value_text(&v)?);
        }
        values.insert(id, row);
    }
    Builder { menus: doc.menus, values }.finish(doc.universe)
}

/// Menu id used when writing generated data: member ids joined by `_`.
pub fn default_menu_id(universe: &Universe, menu: Menu) -> String {
    if menu.is_empty() {
        EMPTY_MENU_ID.to_string()
    } else {
        universe.menu_ids(menu).join("_")
    }
}

/// JSON document in the format read by [`load_json_str`].
pub fn choice_data_json<T: Scalar>(data: &ChoiceData<T>, default: Option<&BTreeMap<Menu, T>>, exact: bool) -> Value {
    let u = data.universe();
    let num = |v: &T| -> Value {
        if exact && T::EXACT {
            Value::String(v.to_string())
        } else {
            json!(v.to_f64())
        }
    };
    let mut menus = Map::new();
    let mut prob = Map::new();
    let mut all: Vec<Menu> = data.menus().collect();
    if let Some(d) = default {
        if d.contains_key(&Menu::EMPTY) {
            all.insert(0, Menu::EMPTY);
        }
    }
    for m in all {
        let id = default_menu_id(u, m);
        menus.insert(id.clone(), json!(u.menu_ids(m)));
        let mut cells = Map::new();
        if let Some(row) = data.row(m) {
            for x in m.iter() {
                cells.insert(u.id(x).to_string(), num(&row[x]));
            }
        }
        if let Some(v) = default.and_then(|d| d.get(&m)) {
            cells.insert(DEFAULT_ID.to_string(), num(v));
        }
        prob.insert(id, Value::Object(cells));
    }
    json!({ "universe": u.ids(), "menus": menus, "prob": prob })
}

/// Counts in long CSV form plus the matching menus sidecar.
pub fn counts_csv(universe: &Universe, counts: &BTreeMap<Menu, Vec<u64>>) -> (String, String) {
    let mut data = String::from("menu_id,alternative,value\n");
    let mut menus = String::from("menu_id,alternative\n");
    for (m, row) in counts {
        let id = default_menu_id(universe, *m);
        for x in m.iter() {
            data.push_str(&format!("{id},{},{}\n", universe.id(x), row[x]));
            menus.push_str(&format!("{id},{}\n", universe.id(x)));
        }
    }
    (data, menus)
}
