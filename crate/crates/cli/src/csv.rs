use serde_json::Value;

/// One row per polynomial or numeric vector in the result: the dotted path
/// to it, then its coefficients from degree 0 upwards.
pub fn render(value: &Value) -> String {
    let mut rows = Vec::new();
    walk(value, String::new(), &mut rows);
    let mut out = String::new();
    for (label, cells) in rows {
        out.push_str(&label);
        for c in cells {
            out.push(',');
            out.push_str(&c);
        }
        out.push('\n');
    }
    out
}

fn join(path: &str, part: &str) -> String {
    if path.is_empty() {
        part.to_string()
    } else {
        format!("{path}.{part}")
    }
}

fn walk(v: &Value, path: String, rows: &mut Vec<(String, Vec<String>)>) {
    match v {
        Value::Object(map) => {
            if let (Some(Value::String(var)), Some(Value::Array(coeffs))) = (map.get("var"), map.get("coeffs")) {
                if var == "t" {
                    let cells = coeffs.iter().map(|c| c.as_str().unwrap_or_default().to_string()).collect();
                    rows.push((path, cells));
                    return;
                }
            }
            for (key, child) in map {
                walk(child, join(&path, key), rows);
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_number) => {
            rows.push((path, items.iter().map(Value::to_string).collect()));
        }
        Value::Array(items) => {
            // entries with a face id are labelled by it
            for (i, child) in items.iter().enumerate() {
                let label = child
                    .get("face_id")
                    .and_then(Value::as_str)
                    .map_or_else(|| i.to_string(), str::to_string);
                walk(child, join(&path, &label), rows);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn polynomials_and_vectors_become_rows() {
        let v = json!({
            "g": {"var": "t", "coeffs": ["1", "2"]},
            "f_vector": [6, 9, 5],
            "reports": [{"face_id": "0.1", "poincare": {"var": "t", "coeffs": ["1"]}}],
            "agree": true
        });
        assert_eq!(render(&v), "f_vector,6,9,5\ng,1,2\nreports.0.1.poincare,1\n");
    }
}
