//! Canonical JSON: fixed key order, no whitespace, floats with 17
//! significant digits, complex numbers as `[re, im]`.

use num_complex::Complex64;
use opmod_core::linalg::CMat;

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

/// Components below this fraction of the value's scale are printed as zero,
/// so rounding noise such as `1e-17i` does not reach golden files.
pub const SNAP_RTOL: f64 = 1e-14;

impl Json {
    pub fn obj<const N: usize>(fields: [(&str, Json); N]) -> Json {
        Json::Obj(
            fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(n) => out.push_str(&n.to_string()),
            Json::Num(x) => out.push_str(&number(*x)),
            Json::Str(s) => out.push_str(&serde_json::to_string(s).expect("strings serialise")),
            Json::Arr(items) => {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (k, (key, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push_str(&serde_json::to_string(key).expect("strings serialise"));
                    out.push(':');
                    value.write(out);
                }
                out.push('}');
            }
        }
    }
}

/// `d.dddddddddddddddde±x`; non-finite values become `null`.
pub fn number(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    format!("{:.16e}", x + 0.0)
}

fn snap(x: f64, scale: f64) -> f64 {
    if x.abs() <= SNAP_RTOL * scale.max(1.0) {
        0.0
    } else {
        x
    }
}

pub fn complex(c: Complex64, scale: f64) -> Json {
    Json::Arr(vec![
        Json::Num(snap(c.re, scale)),
        Json::Num(snap(c.im, scale)),
    ])
}

/// Row-major list of rows of `[re, im]` pairs.
pub fn matrix(m: &CMat, scale: f64) -> Json {
    Json::Arr(
        (0..m.nrows())
            .map(|i| Json::Arr((0..m.ncols()).map(|j| complex(m[(i, j)], scale)).collect()))
            .collect(),
    )
}

/// Points sorted by `(re, im)` after snapping.
pub fn sorted_points(points: &[Complex64]) -> Json {
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let mut snapped: Vec<Complex64> = points
        .iter()
        .map(|p| Complex64::new(snap(p.re, scale), snap(p.im, scale)))
        .collect();
    snapped.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Json::Arr(snapped.into_iter().map(|p| complex(p, scale)).collect())
}
