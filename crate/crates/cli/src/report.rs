//! Reports: a JSON document in the grammar style alongside human-readable
//! text in the compact style.

use serde_json::{Map, Value};
use symred_core::expr::{print, Style};
use symred_core::ratfunc::RatFunc;

#[derive(Debug, Default)]
pub struct Report {
    pub json: Map<String, Value>,
    pub text: Vec<String>,
}

impl Report {
    pub fn new(command: &str, problem: &str) -> Self {
        let mut r = Report::default();
        r.set("command", command.into());
        r.set("problem", problem.into());
        r.line(format!("problem: {problem}"));
        r
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.json.insert(key.to_string(), value);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.json.clone())).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = self.text.join("\n");
        s.push('\n');
        s
    }
}

/// Grammar-style string, the form that re-parses.
pub fn g(e: &RatFunc) -> String {
    print(e, Style::Grammar)
}

/// Compact style for text output.
pub fn c(e: &RatFunc) -> String {
    print(e, Style::Compact)
}

pub fn grammar_list(v: &[RatFunc]) -> Value {
    Value::Array(v.iter().map(|e| Value::String(g(e))).collect())
}

pub fn compact_tuple(v: &[RatFunc]) -> String {
    format!("({})", v.iter().map(c).collect::<Vec<_>>().join(", "))
}

/// `[{"name": .., "expr": ..}]`, keeping order.
pub fn named(names: &[String], exprs: &[RatFunc]) -> Value {
    Value::Array(names.iter().zip(exprs).map(|(n, e)| serde_json::json!({ "name": n, "expr": g(e) })).collect())
}
