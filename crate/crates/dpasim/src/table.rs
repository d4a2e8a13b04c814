//! Plot-ready output: numeric tables and key-value records rendered to CSV
//! or JSON, deterministically (no timestamps, fixed field order, 12
//! significant digits in CSV).

use serde_json::{json, Value};

/// Formats with 12 significant digits, C `%g` style: fixed point inside
/// [1e-4, 1e12), scientific outside, trailing zeros trimmed.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    let sign = if mant.starts_with('-') { "-" } else { "" };
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let n = digits.len() as i32;
    if !(-4..12).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    } else if exp >= n - 1 {
        format!("{sign}{digits}{}", "0".repeat((exp - n + 1) as usize))
    } else if exp >= 0 {
        let (int, frac) = digits.split_at((exp + 1) as usize);
        format!("{sign}{int}.{frac}")
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

/// A numeric table (every command's tabular output) or a key-value record
/// (fit and calibration results).
pub enum Output {
    Table {
        columns: Vec<&'static str>,
        rows: Vec<Vec<f64>>,
    },
    Record(Vec<(&'static str, Value)>),
}

pub struct RenderContext<'a> {
    pub command: &'a str,
    pub config_sha256: &'a str,
}

impl Output {
    pub fn to_csv(&self, ctx: &RenderContext) -> String {
        let mut out = String::new();
        out.push_str(&format!("# dpasim {}\n", ctx.command));
        out.push_str(&format!("# config_sha256 = {}\n", ctx.config_sha256));
        match self {
            Output::Table { columns, rows } => {
                out.push_str(&columns.join(","));
                out.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|&v| fmt12(v)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Output::Record(fields) => {
                out.push_str("name,value\n");
                for (name, value) in fields {
                    match value {
                        Value::Array(items) => {
                            for (i, item) in items.iter().enumerate() {
                                match item {
                                    Value::Array(inner) => {
                                        for (j, cell) in inner.iter().enumerate() {
                                            out.push_str(&format!(
                                                "{name}_{i}_{j},{}\n",
                                                json_cell(cell)
                                            ));
                                        }
                                    }
                                    other => {
                                        out.push_str(&format!("{name}_{i},{}\n", json_cell(other)))
                                    }
                                }
                            }
                        }
                        other => out.push_str(&format!("{name},{}\n", json_cell(other))),
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self, ctx: &RenderContext) -> String {
        let mut root = serde_json::Map::new();
        root.insert("command".into(), json!(ctx.command));
        root.insert("config_sha256".into(), json!(ctx.config_sha256));
        match self {
            Output::Table { columns, rows } => {
                root.insert("columns".into(), json!(columns));
                root.insert("rows".into(), json!(rows));
            }
            Output::Record(fields) => {
                for (name, value) in fields {
                    root.insert((*name).into(), value.clone());
                }
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("json renders");
        text.push('\n');
        text
    }
}

fn json_cell(value: &Value) -> String {
    match value {
        Value::Number(n) => match n.as_f64() {
            Some(x) => fmt12(x),
            None => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digit_format_covers_ranges() {
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(4.22395), "4.22395");
        assert_eq!(fmt12(7.28987e9), "7289870000");
        assert_eq!(fmt12(-25.5), "-25.5");
        assert_eq!(fmt12(0.0015), "0.0015");
        assert_eq!(fmt12(1e-5), "1e-5");
        assert_eq!(fmt12(1e12), "1e12");
        assert_eq!(fmt12(9.32e-14), "9.32e-14");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(2.0 / 3.0e-7), "6666666.66667");
    }
}
