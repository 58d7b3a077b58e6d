use serde_json::Value;

use crate::Format;

pub struct Body {
    pub value: Value,
    pub default: Format,
    /// Replaces the generic key/value table.
    pub table: Option<String>,
}

impl Body {
    pub fn json(value: Value) -> Self {
        Body {
            value,
            default: Format::Json,
            table: None,
        }
    }

    pub fn table(value: Value) -> Self {
        Body {
            value,
            default: Format::Table,
            table: None,
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Flattens nested objects into dotted keys; arrays of scalars become one
/// space-separated cell.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (k, child) in items.iter().enumerate() {
                flatten(&key(&k.to_string()), child, out);
            }
        }
        Value::Array(items) => out.push((prefix.to_string(), items.iter().map(scalar_text).collect::<Vec<_>>().join(" "))),
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(body: &Body, format: Option<Format>) -> String {
    match format.unwrap_or(body.default) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&body.value).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Table if body.table.is_some() => body.table.clone().unwrap_or_default(),
        Format::Table => {
            let mut rows = Vec::new();
            flatten("", &body.value, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &body.value, &mut rows);
            let mut s = String::from("key,value\n");
            for (k, v) in rows {
                s.push_str(&format!("{},{}\n", csv_cell(&k), csv_cell(&v)));
            }
            s
        }
    }
}
