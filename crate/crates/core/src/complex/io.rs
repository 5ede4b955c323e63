//! ASCII OFF and metric-JSON readers and writers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ComplexError, MetricComplex};

/// On-disk form of an abstract metric complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricJson {
    pub vertices: usize,
    pub triangles: Vec<[usize; 3]>,
    pub edge_lengths: Vec<(usize, usize, f64)>,
}

/// Parses a metric complex from `{vertices, triangles, edge_lengths}` JSON.
pub fn parse_metric_json(text: &str) -> Result<MetricComplex, ComplexError> {
    let doc: MetricJson = serde_json::from_str(text).map_err(|e| ComplexError::Json(e.to_string()))?;
    MetricComplex::from_lengths(doc.vertices, doc.triangles, doc.edge_lengths)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, as (1-based number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ComplexError {
    ComplexError::Syntax { line, message: message.into() }
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, ComplexError> {
    token
        .parse()
        .map_err(|_| syntax(line, format!("expected {what}, found `{token}`")))
}

/// Parses an ASCII OFF file whose faces are all triangles. Edge lengths are
/// computed from the vertex coordinates.
pub fn parse_off(text: &str) -> Result<MetricComplex, ComplexError> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let (line, mut header) = lines.next_tokens().ok_or_else(|| syntax(1, "empty input"))?;
    if header[0] != "OFF" {
        return Err(syntax(line, format!("expected `OFF` header, found `{}`", header[0])));
    }
    header.remove(0);
    let (count_line, counts) = if header.is_empty() {
        lines
            .next_tokens()
            .ok_or_else(|| syntax(line + 1, "missing vertex/face counts"))?
    } else {
        (line, header)
    };
    if counts.len() < 2 {
        return Err(syntax(count_line, "expected vertex and face counts"));
    }
    let nv: usize = number(count_line, counts[0], "vertex count")?;
    let nf: usize = number(count_line, counts[1], "face count")?;

    let mut points = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, tokens) = lines
            .next_tokens()
            .ok_or_else(|| syntax(count_line, format!("expected {nv} vertices, found {}", points.len())))?;
        if tokens.len() < 3 {
            return Err(syntax(l, "vertex needs three coordinates"));
        }
        let mut p = [0.0f64; 3];
        for (k, tok) in tokens[..3].iter().enumerate() {
            p[k] = number(l, tok, "coordinate")?;
            if !p[k].is_finite() {
                return Err(syntax(l, "non-finite coordinate"));
            }
        }
        points.push(p);
    }

    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, tokens) = lines
            .next_tokens()
            .ok_or_else(|| syntax(count_line, format!("expected {nf} faces, found {}", triangles.len())))?;
        let count: usize = number(l, tokens[0], "face vertex count")?;
        if count != 3 {
            return Err(ComplexError::NonTriangleFace { line: l, count });
        }
        if tokens.len() < 4 {
            return Err(syntax(l, "face lists fewer than three vertex indices"));
        }
        let mut tri = [0usize; 3];
        for (k, tok) in tokens[1..4].iter().enumerate() {
            tri[k] = number(l, tok, "vertex index")?;
            if tri[k] >= nv {
                return Err(syntax(l, format!("vertex index {} out of range (0..{nv})", tri[k])));
            }
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(syntax(l, format!("repeated vertex in face {tri:?}")));
        }
        triangles.push(tri);
    }
    MetricComplex::from_embedding(points, triangles)
}

impl MetricComplex {
    /// OFF text for embedded complexes; `None` for abstract ones.
    pub fn to_off(&self) -> Option<String> {
        let pts = self.embedding()?;
        let mut out = String::new();
        writeln!(out, "OFF").unwrap();
        writeln!(out, "{} {} {}", pts.len(), self.triangle_count(), self.edge_count()).unwrap();
        for p in pts {
            writeln!(out, "{} {} {}", p[0], p[1], p[2]).unwrap();
        }
        for t in self.triangles() {
            writeln!(out, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
        }
        Some(out)
    }

    pub fn to_metric_json(&self) -> MetricJson {
        MetricJson {
            vertices: self.vertex_count(),
            triangles: self.triangles().to_vec(),
            edge_lengths: self.edges().map(|(e, l)| (e.lo(), e.hi(), l)).collect(),
        }
    }
}
