//! CSV tables with fixed float formatting, and log-log SVG charts read back from CSV text.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// 17 significant digits, `.` decimal separator.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| float(*v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(|f| quote(f)).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, dir: &Path, name: &str) -> std::io::Result<PathBuf> {
        let path = dir.join(name);
        std::fs::write(&path, self.to_csv())?;
        Ok(path)
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Log-log chart of every column against the first one. Rows with non-positive entries are
/// dropped per series.
pub fn loglog_svg_from_csv(csv: &str, title: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let rows: Vec<Vec<Option<f64>>> = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().ok().filter(|v| *v > 0.0 && v.is_finite())).collect())
        .collect();
    let series: Vec<(&str, Vec<(f64, f64)>)> = (1..header.len())
        .map(|c| {
            let pts = rows
                .iter()
                .filter_map(|r| match (r.first().copied().flatten(), r.get(c).copied().flatten()) {
                    (Some(x), Some(y)) => Some((x.log10(), y.log10())),
                    _ => None,
                })
                .collect();
            (header[c], pts)
        })
        .filter(|(_, p): &(&str, Vec<(f64, f64)>)| !p.is_empty())
        .collect();

    let (w, h, m) = (640.0, 420.0, 60.0);
    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    for d in x0 as i32..=x1 as i32 {
        let x = px(d as f64);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#, h - m + 16.0);
    }
    for d in y0 as i32..=y1 as i32 {
        let y = py(d as f64);
        let _ = writeln!(s, r##"<line x1="{m}" x2="{:.1}" y1="{y:.1}" y2="{y:.1}" stroke="#ddd"/>"##, w - m);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#, m - 4.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 16.0,
        header.first().unwrap_or(&"")
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.1},{:.1}", px(*x), py(*y))).collect();
        let _ =
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for (x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{color}"/>"#, px(*x), py(*y));
        }
        let ly = m + 14.0 * (i as f64 + 1.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}" fill="{color}">{name}</text>"#, m + 8.0);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_has_17_significant_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        let mut t = Table::new(["name", "v"]);
        t.push(vec!["randers(0.5,0)".into(), "1".into()]);
        assert_eq!(t.to_csv(), "name,v\n\"randers(0.5,0)\",1\n");
    }

    #[test]
    fn svg_lists_every_positive_series() {
        let csv = "eps,a,b,c\n1e-2,1e-4,0,x\n1e-3,1e-6,0,x\n";
        let svg = loglog_svg_from_csv(csv, "t");
        assert!(svg.contains(">a</text>"));
        assert!(!svg.contains(">b</text>"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
