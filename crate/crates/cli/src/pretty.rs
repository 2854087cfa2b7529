//! Plain-text rendering of JSON reports.

use serde_json::Value;

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::String(_) | Value::Number(_) | Value::Bool(_))) => {
            Some(format!("[{}]", a.iter().map(|x| scalar(x).unwrap()).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn is_check_list(a: &[Value]) -> bool {
    !a.is_empty() && a.iter().all(|x| x.get("name").is_some() && x.get("passed").is_some())
}

fn walk(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if let Some(s) = scalar(x) {
                    out.push_str(&format!("{pad}{k}: {s}\n"));
                } else if let Value::Array(a) = x {
                    if is_check_list(a) {
                        out.push_str(&format!("{pad}{k}:\n"));
                        let width = a.iter().map(|c| c["name"].as_str().unwrap_or("").len()).max().unwrap_or(0);
                        for c in a {
                            let mark = if c["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
                            out.push_str(&format!("{pad}  {:<width$}  {mark}\n", c["name"].as_str().unwrap_or("")));
                        }
                    } else {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for x in a {
                            match scalar(x) {
                                Some(s) => out.push_str(&format!("{pad}  - {s}\n")),
                                None => {
                                    out.push_str(&format!("{pad}  -\n"));
                                    walk(x, depth + 2, out);
                                }
                            }
                        }
                    }
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    walk(x, depth + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
