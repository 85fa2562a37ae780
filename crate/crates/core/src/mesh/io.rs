//! Line-oriented text format:
//!
//! ```text
//! nv nc
//! x y            (nv lines, 17 significant digits)
//! m i1 ... im    (nc lines, 0-based counterclockwise vertex indices)
//! b              (nv lines, 0/1 boundary flag)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::PolygonalMesh;
use crate::error::{Error, Result};
use crate::geometry::polygon::Point;

pub fn format_mesh(mesh: &PolygonalMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", mesh.num_vertices(), mesh.num_cells());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:.16e} {:.16e}", p.x, p.y);
    }
    for c in mesh.cells() {
        let _ = write!(s, "{}", c.len());
        for v in c {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    for &b in mesh.boundary_flags() {
        s.push_str(if b { "1\n" } else { "0\n" });
    }
    s
}

pub fn write_mesh(mesh: &PolygonalMesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<PolygonalMesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_mesh(&text, path)
}

/// Parse the mesh format; errors carry the 1-based line number.
pub fn parse_mesh(text: &str, origin: &Path) -> Result<PolygonalMesh> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| err(text.lines().count() + 1, format!("unexpected end of file, expected {what}")))
    };
    let parse_usize = |line: usize, tok: &str| {
        tok.parse::<usize>()
            .map_err(|_| err(line, format!("expected a non-negative integer, found {tok:?}")))
    };

    let (ln, header) = next("header")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(err(ln, "header must be `nv nc`".into()));
    }
    let nv = parse_usize(ln, toks[0])?;
    let nc = parse_usize(ln, toks[1])?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next("vertex coordinates")?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(err(ln, "vertex line must be `x y`".into()));
        }
        let x: f64 = toks[0].parse().map_err(|_| err(ln, format!("bad coordinate {:?}", toks[0])))?;
        let y: f64 = toks[1].parse().map_err(|_| err(ln, format!("bad coordinate {:?}", toks[1])))?;
        vertices.push(Point::new(x, y));
    }

    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, l) = next("cell")?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let Some((&m, rest)) = toks.split_first() else {
            return Err(err(ln, "empty cell line".into()));
        };
        let m = parse_usize(ln, m)?;
        if m < 3 {
            return Err(err(ln, format!("cell needs at least 3 vertices, found {m}")));
        }
        if rest.len() != m {
            return Err(err(ln, format!("cell declares {m} vertices but lists {}", rest.len())));
        }
        let mut loop_ = Vec::with_capacity(m);
        for tok in rest {
            let v = parse_usize(ln, tok)?;
            if v >= nv {
                return Err(err(ln, format!("vertex index {v} out of range (nv = {nv})")));
            }
            loop_.push(v);
        }
        cells.push(loop_);
    }

    let mut boundary = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next("boundary flag")?;
        boundary.push(match l {
            "0" => false,
            "1" => true,
            other => return Err(err(ln, format!("boundary flag must be 0 or 1, found {other:?}"))),
        });
    }
    for (ln, l) in lines {
        if !l.is_empty() {
            return Err(err(ln, "trailing content after boundary flags".into()));
        }
    }
    Ok(PolygonalMesh::from_parts(vertices, cells, boundary))
}
