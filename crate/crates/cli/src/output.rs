//! Artifact writing. Every file carries the config hash and crate versions.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use sci_core::SpectralSet;

pub struct Artifacts {
    dir: PathBuf,
    hash: String,
    written: Vec<PathBuf>,
}

pub fn versions() -> Value {
    json!({ "sci_core": sci_core::VERSION, "sci_cli": env!("CARGO_PKG_VERSION") })
}

impl Artifacts {
    pub fn create(dir: &Path, hash: &str) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_path_buf(), hash: hash.to_string(), written: Vec::new() })
    }

    fn stamp(&self) -> String {
        format!("config_hash={} sci_core={} sci_cli={}", self.hash, sci_core::VERSION, env!("CARGO_PKG_VERSION"))
    }

    fn write(&mut self, name: &str, body: &str) -> io::Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body)?;
        self.written.push(path);
        Ok(())
    }

    /// Pretty JSON with `config_hash` and `versions` merged into the top level.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> io::Result<()> {
        let mut v = serde_json::to_value(body).map_err(io::Error::other)?;
        if let Some(obj) = v.as_object_mut() {
            obj.insert("config_hash".into(), Value::from(self.hash.clone()));
            obj.insert("versions".into(), versions());
        }
        let mut text = serde_json::to_string_pretty(&v).map_err(io::Error::other)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// CSV preceded by a `#` comment line with the stamp.
    pub fn csv(&mut self, name: &str, body: &str) -> io::Result<()> {
        let text = format!("# {}\n{body}", self.stamp());
        self.write(name, &text)
    }

    pub fn svg(&mut self, name: &str, layers: &[Layer<'_>]) -> io::Result<()> {
        let text = render_svg(layers, &self.stamp());
        self.write(name, &text)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// One colour-coded point set in a scatter plot.
pub struct Layer<'a> {
    pub label: &'a str,
    pub set: &'a SpectralSet,
    pub color: &'a str,
    pub radius: f64,
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

fn render_svg(layers: &[Layer<'_>], stamp: &str) -> String {
    let extent = layers
        .iter()
        .flat_map(|l| l.set.points())
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(1.0_f64, f64::max)
        * 1.15;
    let scale = (SIZE / 2.0 - MARGIN) / extent;
    let c = SIZE / 2.0;
    let to_px = |z: &Complex64| (c + z.re * scale, c - z.im * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<!-- {stamp} -->");
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<line x1="{MARGIN}" y1="{c}" x2="{:.1}" y2="{c}" stroke="#bbb" stroke-width="0.5"/>"##,
        SIZE - MARGIN
    );
    let _ = writeln!(
        s,
        r##"<line x1="{c}" y1="{MARGIN}" x2="{c}" y2="{:.1}" stroke="#bbb" stroke-width="0.5"/>"##,
        SIZE - MARGIN
    );
    let _ = writeln!(
        s,
        r##"<circle cx="{c}" cy="{c}" r="{scale:.3}" fill="none" stroke="#888" stroke-dasharray="4 3"/>"##
    );
    for (i, layer) in layers.iter().enumerate() {
        let _ = writeln!(s, r#"<g fill="{}" fill-opacity="0.8">"#, layer.color);
        for z in layer.set.points() {
            let (x, y) = to_px(z);
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.1}"/>"#, layer.radius);
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="{:.1}" font-family="sans-serif" font-size="12" fill="{}">{} ({} points)</text>"#,
            16.0 + 14.0 * i as f64,
            layer.color,
            layer.label,
            layer.set.len()
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_has_circle_and_points() {
        let set = SpectralSet::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)], 0.0).unwrap();
        let svg = render_svg(&[Layer { label: "tower", set: &set, color: "#c33", radius: 2.0 }], "x");
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("<!-- x -->"));
    }
}
