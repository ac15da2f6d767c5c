//! Command reports: an ordered list of named values, printed as `key: value`
//! lines or as a single JSON object.

use serde_json::{json, Map, Value};

use crate::io::Loaded;

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    inputs: Vec<(String, String)>,
    tolerances: Vec<(String, f64)>,
    fields: Vec<(String, Value)>,
    outputs: Vec<(String, String)>,
    notes: Vec<String>,
    pub ok: bool,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            ok: true,
            ..Self::default()
        }
    }

    pub fn input(&mut self, loaded: &Loaded) {
        self.inputs
            .push((loaded.path.display().to_string(), loaded.sha256.clone()));
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.push((name.to_string(), value));
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.to_string(), value.into()));
    }

    pub fn list(&mut self, key: &str, values: &[f64]) {
        self.set(key, values.to_vec());
    }

    pub fn output(&mut self, path: &std::path::Path, sha256: String) {
        self.outputs.push((path.display().to_string(), sha256));
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Records a failure; the process exits with status 1.
    pub fn fail(&mut self, note: impl Into<String>) {
        self.ok = false;
        self.note(note);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn to_json(&self) -> Value {
        let pairs = |xs: &[(String, String)], a: &str, b: &str| -> Vec<Value> {
            xs.iter().map(|(x, y)| json!({ a: x, b: y })).collect()
        };
        let mut fields = Map::new();
        for (k, v) in &self.fields {
            fields.insert(k.clone(), v.clone());
        }
        let mut tolerances = Map::new();
        for (k, v) in &self.tolerances {
            tolerances.insert(k.clone(), json!(v));
        }
        json!({
            "command": self.command,
            "inputs": pairs(&self.inputs, "path", "sha256"),
            "tolerances": tolerances,
            "fields": fields,
            "outputs": pairs(&self.outputs, "path", "sha256"),
            "notes": self.notes,
            "ok": self.ok,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for (path, digest) in &self.inputs {
            out.push_str(&format!("input: {path} sha256={digest}\n"));
        }
        for (name, value) in &self.tolerances {
            out.push_str(&format!("tolerance {name}: {value:e}\n"));
        }
        for (key, value) in &self.fields {
            out.push_str(&format!("{key}: {}\n", render(value)));
        }
        for (path, digest) in &self.outputs {
            out.push_str(&format!("wrote: {path} sha256={digest}\n"));
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push_str(if self.ok {
            "status: ok\n"
        } else {
            "status: FAILED\n"
        });
        out
    }
}

/// Short human form of a number: at most 12 decimals, trailing zeros cut.
pub fn short(x: f64) -> String {
    if x.abs() < 5e-13 {
        return "0".into();
    }
    if x.abs() >= 1e6 || x.abs() < 1e-4 {
        return format!("{x:.6e}");
    }
    let s = format!("{x:.12}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn render(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(short).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(render).collect();
            format!("({})", parts.join(", "))
        }
        Value::Object(map) => {
            let parts: Vec<String> = map
                .iter()
                .map(|(k, v)| format!("{k}={}", render(v)))
                .collect();
            parts.join(", ")
        }
        other => other.to_string(),
    }
}
