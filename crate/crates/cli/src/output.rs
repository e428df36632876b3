//! JSON and CSV writers that print every float with 17 significant digits,
//! so output round-trips exactly and is byte-stable across runs.

use std::fmt::Write;

use tzo_core::eigen::fmt17;

pub enum Json {
    Num(f64),
    Int(u64),
    Str(String),
    Null,
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn opt(v: Option<f64>) -> Json {
        v.map_or(Json::Null, Json::Num)
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Num(v) if v.is_finite() => out.push_str(&fmt17(*v)),
            Json::Num(_) | Json::Null => out.push_str("null"),
            Json::Int(v) => write!(out, "{v}").unwrap(),
            Json::Str(s) => out.push_str(&serde_json::to_string(s).unwrap()),
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write!(out, "\"{k}\": ").unwrap();
                    v.write(out);
                }
                out.push('}');
            }
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s.push('\n');
        s
    }
}

/// One CSV row of floats.
pub fn csv_row(values: &[f64]) -> String {
    let mut s = values.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_render() {
        let j = Json::Obj(vec![
            ("a", Json::Num(0.1)),
            ("b", Json::Arr(vec![Json::Int(3), Json::Null])),
            ("c", Json::Num(f64::NAN)),
        ]);
        assert_eq!(j.render(), "{\"a\": 1.0000000000000001e-1, \"b\": [3, null], \"c\": null}\n");
        let back: serde_json::Value = serde_json::from_str(&j.render()).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_is_comma_separated() {
        assert_eq!(csv_row(&[1.0, -2.5]), "1.0000000000000000e0,-2.5000000000000000e0\n");
    }
}
