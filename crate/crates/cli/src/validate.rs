//! Structural validation of a run configuration, reporting every problem
//! with a JSON pointer into the document.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Command, RunConfig};
use mzi_core::ProbeSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub pointer: String,
    pub message: String,
}

#[derive(Debug, Default)]
struct Report(Vec<Violation>);

impl Report {
    fn push(&mut self, pointer: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            pointer: pointer.into(),
            message: message.into(),
        });
    }
}

const TOP_KEYS: [&str; 11] = [
    "command",
    "sweep_command",
    "probe",
    "generator",
    "grid",
    "output",
    "seed",
    "m",
    "reps",
    "tail_tol",
    "out_path",
];

const PROBE_FIELDS: [(&str, &[&str]); 5] = [
    ("fock", &["n"]),
    ("coherent", &["re", "im"]),
    ("squeezed_vacuum", &["r"]),
    ("thermal", &["nbar"]),
    ("explicit", &["re", "im"]),
];

/// Every violation in `doc`; empty iff it deserializes into a usable [`RunConfig`].
pub fn validate_value(doc: &Value) -> Vec<Violation> {
    let mut rep = Report::default();
    let Some(obj) = doc.as_object() else {
        rep.push("", "configuration must be a JSON object");
        return rep.0;
    };
    for key in obj.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            rep.push(format!("/{}", escape(key)), "unknown field");
        }
    }

    let command = check_command(obj.get("command"), "/command", true, &mut rep);
    let sweep = check_command(obj.get("sweep_command"), "/sweep_command", false, &mut rep);
    if sweep == Some(Command::Sweep) {
        rep.push("/sweep_command", "a sweep cannot nest another sweep");
    }
    if command == Some(Command::Sweep) && obj.get("sweep_command").is_none() {
        rep.push("/sweep_command", "required when command is `sweep`");
    }
    let recipe = match command {
        Some(Command::Sweep) => sweep,
        c => c,
    };

    let grid_r = check_grid(obj.get("grid"), recipe, &mut rep);
    check_probe(obj.get("probe"), recipe, grid_r, &mut rep);

    if let Some(g) = obj.get("generator") {
        if !matches!(g.as_str(), Some("difference" | "sum" | "one_arm")) {
            rep.push(
                "/generator",
                "expected one of `difference`, `sum`, `one_arm`",
            );
        }
    }
    if let Some(o) = obj.get("output") {
        if !matches!(o.as_str(), Some("csv" | "json")) {
            rep.push("/output", "expected `csv` or `json`");
        }
    }
    if let Some(s) = obj.get("seed") {
        if s.as_u64().is_none() {
            rep.push("/seed", "expected a non-negative integer");
        }
    }
    for key in ["m", "reps"] {
        if let Some(v) = obj.get(key) {
            if !matches!(v.as_u64(), Some(n) if n >= 1) {
                rep.push(format!("/{key}"), "expected a positive integer");
            }
        }
    }
    if let Some(v) = obj.get("tail_tol") {
        if !matches!(v.as_f64(), Some(x) if x > 0.0 && x < 1.0) {
            rep.push("/tail_tol", "expected a number in (0, 1)");
        }
    }
    if let Some(v) = obj.get("out_path") {
        if !v.is_string() {
            rep.push("/out_path", "expected a path string");
        }
    }

    if rep.0.is_empty() {
        // anything the structural pass let through must still deserialize
        if let Err(e) = serde_json::from_value::<RunConfig>(doc.clone()) {
            rep.push("", e.to_string());
        }
    }
    rep.0
}

fn check_command(
    v: Option<&Value>,
    ptr: &str,
    required: bool,
    rep: &mut Report,
) -> Option<Command> {
    match v {
        None if required => {
            rep.push(ptr, "required");
            None
        }
        None => None,
        Some(v) => match v.as_str().map(str::parse::<Command>) {
            Some(Ok(c)) => Some(c),
            _ => {
                let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
                rep.push(ptr, format!("expected one of {}", names.join(", ")));
                None
            }
        },
    }
}

/// Checks `/grid`; returns whether a non-empty `r` axis is present.
fn check_grid(v: Option<&Value>, recipe: Option<Command>, rep: &mut Report) -> bool {
    let Some(v) = v else {
        rep.push("/grid", "required");
        return false;
    };
    let Some(grid) = v.as_object() else {
        rep.push("/grid", "expected an object");
        return false;
    };
    for key in grid.keys() {
        if !["T", "r", "phi"].contains(&key.as_str()) {
            rep.push(format!("/grid/{}", escape(key)), "unknown axis");
        }
    }
    match grid.get("T") {
        None => rep.push("/grid/T", "required"),
        Some(t) => check_axis(t, "/grid/T", Some((0.0, 1.0)), rep),
    }
    if let Some(r) = grid.get("r") {
        check_axis(r, "/grid/r", None, rep);
    }
    match grid.get("phi") {
        Some(_) if recipe.is_some_and(|c| !c.is_gaussian()) => rep.push(
            "/grid/phi",
            "only the detection-scheme recipes take a phase axis",
        ),
        Some(phi) => check_axis(phi, "/grid/phi", None, rep),
        None if recipe.is_some_and(Command::is_gaussian) => {
            rep.push("/grid/phi", "required for the detection-scheme recipes")
        }
        None => {}
    }
    grid.get("r")
        .and_then(Value::as_array)
        .is_some_and(|a| !a.is_empty())
}

fn check_axis(v: &Value, ptr: &str, range: Option<(f64, f64)>, rep: &mut Report) {
    let Some(items) = v.as_array() else {
        rep.push(ptr, "expected an array of numbers");
        return;
    };
    if items.is_empty() {
        rep.push(ptr, "must not be empty");
    }
    for (i, x) in items.iter().enumerate() {
        match (x.as_f64(), range) {
            (None, _) => rep.push(format!("{ptr}/{i}"), "expected a number"),
            (Some(x), Some((lo, hi))) if !(lo..=hi).contains(&x) => {
                rep.push(format!("{ptr}/{i}"), format!("{x} outside [{lo}, {hi}]"))
            }
            _ => {}
        }
    }
}

fn check_probe(v: Option<&Value>, recipe: Option<Command>, grid_r: bool, rep: &mut Report) {
    let Some(v) = v else {
        rep.push("/probe", "required");
        return;
    };
    let Some(probe) = v.as_object() else {
        rep.push("/probe", "expected an object with a `kind` field");
        return;
    };
    let kind = match probe.get("kind").and_then(Value::as_str) {
        Some(k) => k,
        None => {
            rep.push("/probe/kind", "required");
            return;
        }
    };
    let Some((_, fields)) = PROBE_FIELDS.iter().find(|(k, _)| *k == kind) else {
        let kinds: Vec<&str> = PROBE_FIELDS.iter().map(|(k, _)| *k).collect();
        rep.push(
            "/probe/kind",
            format!("expected one of {}", kinds.join(", ")),
        );
        return;
    };
    let before = rep.0.len();
    check_probe_fields(probe, kind, fields, rep);
    if rep.0.len() > before {
        return;
    }
    match serde_json::from_value::<ProbeSpec>(v.clone()) {
        Err(e) => rep.push("/probe", e.to_string()),
        Ok(spec) => {
            if let Err(e) = spec.validate() {
                rep.push("/probe", e.to_string());
            }
            let squeezed = matches!(spec, ProbeSpec::SqueezedVacuum { .. });
            if recipe.is_some_and(Command::is_gaussian) && !squeezed {
                rep.push(
                    "/probe/kind",
                    "the detection scheme needs a squeezed_vacuum probe",
                );
            }
            if grid_r && !squeezed {
                rep.push(
                    "/grid/r",
                    "an r axis only applies to squeezed_vacuum probes",
                );
            }
        }
    }
}

fn check_probe_fields(probe: &Map<String, Value>, kind: &str, fields: &[&str], rep: &mut Report) {
    for key in probe.keys() {
        if key != "kind" && !fields.contains(&key.as_str()) {
            rep.push(
                format!("/probe/{}", escape(key)),
                format!("not a field of `{kind}`"),
            );
        }
    }
    let number = |key: &str, required: bool, rep: &mut Report| match probe.get(key) {
        None if required => rep.push(format!("/probe/{key}"), "required"),
        Some(x) if x.as_f64().is_none() => rep.push(format!("/probe/{key}"), "expected a number"),
        _ => {}
    };
    match kind {
        "fock" => match probe.get("n") {
            None => rep.push("/probe/n", "required"),
            Some(n) if n.as_u64().is_none() => {
                rep.push("/probe/n", "expected a non-negative integer")
            }
            _ => {}
        },
        "coherent" => {
            number("re", true, rep);
            number("im", false, rep);
        }
        "squeezed_vacuum" => number("r", true, rep),
        "thermal" => {
            number("nbar", true, rep);
            if probe
                .get("nbar")
                .and_then(Value::as_f64)
                .is_some_and(|x| x < 0.0)
            {
                rep.push("/probe/nbar", "must be non-negative");
            }
        }
        _ => {
            match probe.get("re") {
                None => rep.push("/probe/re", "required"),
                Some(m) => check_square(m, "/probe/re", rep),
            }
            if let Some(m) = probe.get("im") {
                check_square(m, "/probe/im", rep);
            }
        }
    }
}

fn check_square(v: &Value, ptr: &str, rep: &mut Report) {
    let Some(rows) = v.as_array() else {
        rep.push(ptr, "expected a square array of number rows");
        return;
    };
    if rows.is_empty() {
        rep.push(ptr, "must not be empty");
    }
    for (i, row) in rows.iter().enumerate() {
        match row.as_array() {
            Some(cells) if cells.len() == rows.len() => {
                for (j, c) in cells.iter().enumerate() {
                    if c.as_f64().is_none() {
                        rep.push(format!("{ptr}/{i}/{j}"), "expected a number");
                    }
                }
            }
            _ => rep.push(
                format!("{ptr}/{i}"),
                format!("expected a row of {} numbers", rows.len()),
            ),
        }
    }
}

/// RFC 6901 escaping of one reference token.
fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}
