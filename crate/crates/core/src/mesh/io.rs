//! Plain-text mesh format.
//!
//! ```text
//! polymesh 2d
//! domain x0 y0 x1 y1
//! vertices N
//! x y                    (N lines)
//! cells M
//! k v0 v1 ... v{k-1}     (M lines, counter-clockwise loops)
//! facets F
//! a b minus plus         (F lines, plus = -1 on the boundary)
//! ```
//!
//! Reals are written with 17 significant digits so that coordinates round-trip
//! exactly. On read, the facet records are checked against the facets rebuilt
//! from the cell loops.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::PolyMesh;
use crate::error::{Error, Result};
use crate::geom::{Point2, Rect};

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_mesh<W: Write>(mesh: &PolyMesh, mut out: W) -> Result<()> {
    let d = &mesh.domain;
    writeln!(out, "polymesh 2d")?;
    writeln!(
        out,
        "domain {} {} {} {}",
        real(d.min.x),
        real(d.min.y),
        real(d.max.x),
        real(d.max.y)
    )?;
    writeln!(out, "vertices {}", mesh.vertices.len())?;
    for p in &mesh.vertices {
        writeln!(out, "{} {}", real(p.x), real(p.y))?;
    }
    writeln!(out, "cells {}", mesh.cells.len())?;
    for c in &mesh.cells {
        let ids: Vec<String> = c.vertices.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{} {}", c.vertices.len(), ids.join(" "))?;
    }
    writeln!(out, "facets {}", mesh.facets.len())?;
    for f in &mesh.facets {
        let plus = f.plus.map_or(-1, |p| p as i64);
        writeln!(
            out,
            "{} {} {} {}",
            f.vertices[0], f.vertices[1], f.minus, plus
        )?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_tokens(&mut self) -> Result<Vec<String>> {
        loop {
            self.line += 1;
            let Some(l) = self.inner.next() else {
                return Err(self.err("unexpected end of file"));
            };
            let l = l?;
            let t = l.trim();
            if !t.is_empty() {
                return Ok(t.split_whitespace().map(str::to_owned).collect());
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn parse<T: std::str::FromStr>(&self, tok: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(format!("cannot parse '{tok}'")))
    }

    fn section(&mut self, name: &str) -> Result<usize> {
        let t = self.next_tokens()?;
        if t.len() != 2 || t[0] != name {
            return Err(self.err(format!("expected '{name} <count>'")));
        }
        self.parse(&t[1])
    }
}

pub fn read_mesh<R: BufRead>(input: R) -> Result<PolyMesh> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    let header = lines.next_tokens()?;
    if header != ["polymesh", "2d"] {
        return Err(lines.err("missing 'polymesh 2d' header"));
    }
    let t = lines.next_tokens()?;
    if t.len() != 5 || t[0] != "domain" {
        return Err(lines.err("expected 'domain x0 y0 x1 y1'"));
    }
    let c: Vec<f64> = t[1..]
        .iter()
        .map(|s| lines.parse(s))
        .collect::<Result<_>>()?;
    let domain = Rect::new(Point2::new(c[0], c[1]), Point2::new(c[2], c[3]))?;

    let nv = lines.section("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let t = lines.next_tokens()?;
        if t.len() != 2 {
            return Err(lines.err("expected 'x y'"));
        }
        vertices.push(Point2::new(lines.parse(&t[0])?, lines.parse(&t[1])?));
    }

    let nc = lines.section("cells")?;
    let mut loops = Vec::with_capacity(nc);
    for _ in 0..nc {
        let t = lines.next_tokens()?;
        let k: usize = lines.parse(t.first().map(String::as_str).unwrap_or(""))?;
        if t.len() != k + 1 {
            return Err(lines.err(format!("expected {k} vertex indices")));
        }
        loops.push(
            t[1..]
                .iter()
                .map(|s| lines.parse(s))
                .collect::<Result<Vec<usize>>>()?,
        );
    }

    let nf = lines.section("facets")?;
    let mut records = Vec::with_capacity(nf);
    for _ in 0..nf {
        let t = lines.next_tokens()?;
        if t.len() != 4 {
            return Err(lines.err("expected 'a b minus plus'"));
        }
        let a: usize = lines.parse(&t[0])?;
        let b: usize = lines.parse(&t[1])?;
        let minus: usize = lines.parse(&t[2])?;
        let plus: i64 = lines.parse(&t[3])?;
        records.push((a, b, minus, (plus >= 0).then_some(plus as usize)));
    }

    let mesh = PolyMesh::from_polygons(domain, vertices, loops)?;
    if records.len() != mesh.facets.len() {
        return Err(Error::Parse {
            line: lines.line,
            message: format!(
                "{} facet records but the cells define {} facets",
                records.len(),
                mesh.facets.len()
            ),
        });
    }
    let built: HashMap<(usize, usize), (usize, Option<usize>)> = mesh
        .facets
        .iter()
        .map(|f| ((f.vertices[0], f.vertices[1]), (f.minus, f.plus)))
        .collect();
    for (a, b, minus, plus) in records {
        let ok = built.get(&(a, b)) == Some(&(minus, plus))
            || (plus.is_some() && built.get(&(b, a)) == Some(&(plus.unwrap(), Some(minus))));
        if !ok {
            return Err(Error::Parse {
                line: lines.line,
                message: format!("facet record ({a}, {b}, {minus}) does not match the cell loops"),
            });
        }
    }
    Ok(mesh)
}
