use std::fmt::Write;

use serde_json::{json, Value};

use quadfield::qfield::HeightValue;

/// `{exact, decimal, interval}` for a logarithmic quantity.
pub fn height(h: &HeightValue) -> Value {
    let iv = h.numeric();
    json!({
        "exact": h.exact_form().map(|e| e.to_string()),
        "decimal": h.decimal(),
        "interval": [format!("{:.17e}", iv.lo().to_f64()), format!("{:.17e}", iv.hi().to_f64())],
    })
}

/// Plain-text rendering of a JSON record; every value in the JSON appears here.
pub fn table(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Array(items) if items.iter().all(Value::is_object) => {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                object(&mut out, item, 0);
            }
        }
        Value::Object(_) => object(&mut out, v, 0),
        other => {
            let _ = writeln!(out, "{}", scalar(other));
        }
    }
    out
}

fn object(out: &mut String, v: &Value, indent: usize) {
    let Value::Object(map) = v else {
        return;
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    let pad = " ".repeat(indent);
    for (k, val) in map {
        if is_height(val) {
            let _ = writeln!(out, "{pad}{k:width$}  {}", height_text(val));
            continue;
        }
        match val {
            Value::Object(_) => {
                let _ = writeln!(out, "{pad}{k}:");
                object(out, val, indent + 2);
            }
            Value::Array(xs) if xs.iter().any(|x| x.is_object() && !is_height(x)) => {
                let _ = writeln!(out, "{pad}{k}:");
                for (i, x) in xs.iter().enumerate() {
                    let _ = writeln!(out, "{pad}  [{i}]");
                    object(out, x, indent + 4);
                }
            }
            Value::Array(xs) => {
                let items: Vec<String> = xs
                    .iter()
                    .map(|x| if is_height(x) { height_text(x) } else { scalar(x) })
                    .collect();
                let _ = writeln!(out, "{pad}{k:width$}  [{}]", items.join(", "));
            }
            _ => {
                let _ = writeln!(out, "{pad}{k:width$}  {}", scalar(val));
            }
        }
    }
}

fn is_height(v: &Value) -> bool {
    v.as_object()
        .is_some_and(|m| m.len() == 3 && m.contains_key("exact") && m.contains_key("decimal") && m.contains_key("interval"))
}

fn height_text(v: &Value) -> String {
    let iv = &v["interval"];
    let enclosure = format!("in [{}, {}]", scalar(&iv[0]), scalar(&iv[1]));
    match v["exact"].as_str() {
        Some(e) => format!("{e} = {} {enclosure}", scalar(&v["decimal"])),
        None => format!("{} {enclosure}", scalar(&v["decimal"])),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
