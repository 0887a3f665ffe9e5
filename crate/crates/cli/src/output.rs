//! Canonical JSON, result logs and SVG plots.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Rebuilds every object with keys in sorted order.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, canonicalize(v));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::validation(format!("serialization: {e}")))
}

/// Pretty, sorted-key JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonicalize(v.clone())).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::resolution(format!("{}: {e}", path.display())))
}

/// Appends one compact JSON line to `path`.
pub fn append_log(path: &Path, command: &str, result: &Value) -> Result<(), CliError> {
    let line = canonicalize(serde_json::json!({ "command": command, "result": result }));
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::resolution(format!("{}: {e}", path.display())))?;
    writeln!(f, "{line}").map_err(|e| CliError::resolution(format!("{}: {e}", path.display())))
}

/// Log-log scatter of `counts` against `grid`, with an optional fitted curve
/// `log N = alpha log X + beta log log X + c`.
pub fn svg_plot(title: &str, grid: &[u64], counts: &[u128], fit: Option<(f64, f64, f64)>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 50.0;
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(counts)
        .filter(|(_, &n)| n > 0)
        .map(|(&x, &n)| ((x as f64).log10(), (n as f64).log10()))
        .collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{M}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        escape(title)
    );
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{r}\" y=\"{lb}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">log10 X</text>\n\
         <text x=\"8\" y=\"{M}\" font-family=\"sans-serif\" font-size=\"12\">log10 N</text>\n",
        b = H - M,
        r = W - M,
        lb = H - 15.0
    ));
    for &(x, y) in &pts {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    if let Some((alpha, beta, c)) = fit {
        let path: Vec<String> = (0..=64)
            .map(|i| {
                let lx = x0 + (x1 - x0) * i as f64 / 64.0;
                let ln_x = lx * std::f64::consts::LN_10;
                let ln_n = alpha * ln_x + beta * ln_x.ln() + c;
                format!("{:.2},{:.2}", sx(lx), sy(ln_n / std::f64::consts::LN_10))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"firebrick\"/>\n",
            path.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_recursively() {
        let v = serde_json::json!({"b": 1, "a": {"z": [ {"y": 1, "x": 2} ], "c": 3}});
        assert_eq!(
            serde_json::to_string(&canonicalize(v)).unwrap(),
            r#"{"a":{"c":3,"z":[{"x":2,"y":1}]},"b":1}"#
        );
    }

    #[test]
    fn svg_has_one_marker_per_positive_count() {
        let s = svg_plot("t", &[10, 100, 1000], &[0, 5, 50], Some((1.0, 0.0, 0.0)));
        assert_eq!(s.matches("<circle").count(), 2);
        assert!(s.contains("<polyline"));
    }
}
