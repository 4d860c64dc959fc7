//! SVG output: leaves as flow polylines, rank strata as a heat map of fiber
//! dimensions, and traces of 1-parameter bisections.

use std::fmt::Write;
use std::path::Path;

use folia_core::flows::{flow, one_parameter_group, Domain, FlowConfig};
use folia_core::graph::anchored_fields;
use folia_core::pointwise::fiber_dimension;
use folia_core::poly::{rational_from_f64, Rational};
use serde_json::json;

use crate::input::load;
use crate::{CliError, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Leaves,
    Strata,
    Bisection,
}

const SIZE: f64 = 480.0;
const PALETTE: [&str; 8] = ["#f7fbff", "#c6dbef", "#6baed6", "#2171b5", "#08306b", "#fdae6b", "#e6550d", "#a63603"];

struct Canvas {
    r: f64,
    body: String,
}

impl Canvas {
    fn new(r: f64) -> Self {
        Canvas { r, body: String::new() }
    }

    fn px(&self, x: f64) -> f64 {
        (x + self.r) / (2.0 * self.r) * SIZE
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - self.px(y)
    }

    fn polyline(&mut self, pts: &[(f64, f64)], colour: &str) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        let _ = writeln!(self.body, r#"<polyline fill="none" stroke="{colour}" stroke-width="1" points="{}"/>"#, coords.join(" "));
    }

    fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, colour: &str) {
        let (a, b) = (self.px(x0), self.py(y1));
        let (w, h) = (self.px(x1) - a, self.py(y0) - b);
        let _ = writeln!(self.body, r#"<rect x="{a:.2}" y="{b:.2}" width="{w:.2}" height="{h:.2}" fill="{colour}"/>"#);
    }

    fn text(&mut self, x: f64, y: f64, s: &str) {
        let _ = writeln!(self.body, r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="11">{s}</text>"#);
    }

    fn finish(self, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{}" viewBox="0 0 {SIZE} {}">"#, SIZE + 20.0, SIZE + 20.0);
        let _ = writeln!(s, "<title>{title}</title>");
        let _ = writeln!(s, r##"<rect width="{SIZE}" height="{SIZE}" fill="#ffffff" stroke="#888888"/>"##);
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

fn in_box(p: &[f64], r: f64) -> bool {
    p.iter().all(|v| v.abs() <= r)
}

fn planar(p: &[f64], offset: f64) -> (f64, f64) {
    (p[0], if p.len() > 1 { p[1] } else { offset })
}

/// Orbit of `x0` under the flow of `field`, in both directions, clipped to the box.
fn orbit(field: &folia_core::flows::CompiledField, x0: &[f64], r: f64, offset: f64, cfg: &FlowConfig) -> Vec<(f64, f64)> {
    let dt = 0.02 * r;
    let half = |sign: f64| {
        let mut pts = Vec::new();
        let mut x = x0.to_vec();
        for _ in 0..200 {
            match flow(field, &x, sign * dt, cfg) {
                Ok(y) if in_box(&y, r) => {
                    pts.push(planar(&y, offset));
                    x = y;
                }
                _ => break,
            }
        }
        pts
    };
    let mut back = half(-1.0);
    back.reverse();
    back.push(planar(x0, offset));
    back.extend(half(1.0));
    back
}

pub fn render(file: &Path, kind: Kind, out: &Path, r: f64, cells: usize, generator: usize) -> Result<Report, CliError> {
    let b = load(file)?;
    let n = b.base_dim();
    if !(1..=2).contains(&n) {
        return Err(CliError(format!("render needs a base of dimension 1 or 2, got {n}")));
    }
    if cells == 0 || r <= 0.0 {
        return Err(CliError("--cells and --box must be positive".into()));
    }
    let cfg = FlowConfig::default();
    let mut canvas = Canvas::new(r);
    let centre = |i: usize| -r + (2.0 * r) * (i as f64 + 0.5) / cells as f64;
    let seeds: Vec<Vec<f64>> = if n == 1 {
        (0..cells).map(|i| vec![centre(i)]).collect()
    } else {
        let m = cells.div_ceil(4).max(2);
        let c = |i: usize| -r + (2.0 * r) * (i as f64 + 0.5) / m as f64;
        (0..m * m).map(|ij| vec![c(ij / m), c(ij % m)]).collect()
    };
    let row = |i: usize| if n == 1 { centre(i) } else { 0.0 };
    let json = match kind {
        Kind::Leaves => {
            let fields = anchored_fields(&b)?;
            let mut lines = 0;
            for (si, s) in seeds.iter().enumerate() {
                for (gi, f) in fields.iter().enumerate() {
                    let pts = orbit(f, s, r, row(si), &cfg);
                    if pts.len() > 1 {
                        lines += 1;
                    }
                    canvas.polyline(&pts, PALETTE[2 + gi % 6]);
                }
            }
            json!({"kind": "leaves", "seeds": seeds.len(), "polylines": lines})
        }
        Kind::Strata => {
            let axis: Vec<Rational> = (0..cells)
                .map(|i| rational_from_f64(centre(i)).ok_or_else(|| CliError("non-finite grid".into())))
                .collect::<Result<_, _>>()?;
            let mut dims = Vec::new();
            let rows = if n == 1 { 1 } else { cells };
            for j in 0..rows {
                let mut line = Vec::with_capacity(cells);
                for (i, xi) in axis.iter().enumerate() {
                    let p = if n == 1 { vec![xi.clone()] } else { vec![xi.clone(), axis[j].clone()] };
                    let d = fiber_dimension(&b, &p)?;
                    let (x0, x1) = (-r + 2.0 * r * i as f64 / cells as f64, -r + 2.0 * r * (i + 1) as f64 / cells as f64);
                    let (y0, y1) = if n == 1 { (-r, r) } else { (-r + 2.0 * r * j as f64 / cells as f64, -r + 2.0 * r * (j + 1) as f64 / cells as f64) };
                    canvas.rect(x0, y0, x1, y1, PALETTE[d.min(PALETTE.len() - 1)]);
                    line.push(d);
                }
                dims.push(line);
            }
            let mut seen: Vec<usize> = dims.iter().flatten().copied().collect();
            seen.sort_unstable();
            seen.dedup();
            let legend = seen.iter().map(|d| format!("{d}:{}", PALETTE[(*d).min(PALETTE.len() - 1)])).collect::<Vec<_>>().join(" ");
            canvas.text(4.0, SIZE + 14.0, &format!("fiber dimension {legend}"));
            json!({"kind": "strata", "cells": cells, "dims": dims})
        }
        Kind::Bisection => {
            let alpha = b
                .generators()
                .get(generator)
                .cloned()
                .ok_or_else(|| CliError(format!("generator {generator} out of range")))?;
            let fam = one_parameter_group(&b, &alpha, Domain::cube(n, r), cfg.clone())?;
            let mut traces = Vec::new();
            for (si, s) in seeds.iter().enumerate() {
                let mut pts = Vec::new();
                for k in 0..=40 {
                    let l = -1.0 + k as f64 / 20.0;
                    if let Ok(e) = fam.evaluate(l, s) {
                        let t = e.target();
                        if n == 1 {
                            pts.push((t[0], l * r));
                        } else if in_box(&t, r) {
                            pts.push(planar(&t, row(si)));
                        }
                    }
                }
                canvas.polyline(&pts, PALETTE[3 + si % 5]);
                traces.push(pts.len());
            }
            json!({"kind": "bisection", "generator": generator, "traces": traces})
        }
    };
    let title = format!("{} of {}", match kind { Kind::Leaves => "leaves", Kind::Strata => "rank strata", Kind::Bisection => "bisection traces" }, file.display());
    std::fs::write(out, canvas.finish(&title)).map_err(|e| CliError(format!("cannot write {}: {e}", out.display())))?;
    let mut json = json;
    json["box"] = json!(r);
    let summary = format!("wrote {}", out.display());
    Ok(Report { schema: "folia.render/1", json, summary, refuted: false })
}
