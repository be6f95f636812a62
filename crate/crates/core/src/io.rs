//! Plain-text formats for perforated domains and lattice fields.
//!
//! Perforated domain:
//!
//! ```text
//! # perforated-domain v1
//! domain ball <R>            | domain box <h1> <h2> <h3>
//! eps <eps>
//! alpha <alpha>
//! holes <n>
//! <x> <y> <z> <radius>       (n lines)
//! ```
//!
//! Scalar field (cells in lattice order, x fastest):
//!
//! ```text
//! # scalar-field v1
//! dims <nx> <ny> <nz>
//! spacing <h>
//! origin <x0> <y0> <z0>
//! legend 0=interior 1=hole 2=exterior
//! <kind> <value>             (nx*ny*nz lines)
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces every value bit for bit.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::perforation::{Hole, PerforatedDomain};
use crate::proxy::{CellKind, Lattice, ScalarField};

const DOMAIN_HEADER: &str = "# perforated-domain v1";
const FIELD_HEADER: &str = "# scalar-field v1";

pub fn write_perforated<W: Write>(pd: &PerforatedDomain, mut w: W) -> Result<()> {
    writeln!(w, "{DOMAIN_HEADER}")?;
    writeln!(w, "domain {}", pd.domain())?;
    writeln!(w, "eps {}", pd.eps())?;
    writeln!(w, "alpha {}", pd.alpha())?;
    writeln!(w, "holes {}", pd.holes().len())?;
    for h in pd.holes() {
        writeln!(w, "{} {} {} {}", h.center[0], h.center[1], h.center[2], h.radius)?;
    }
    Ok(())
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn floats(line: usize, parts: &[&str]) -> Result<Vec<f64>> {
    parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| parse_err(line, format!("{p:?}: {e}"))))
        .collect()
}

/// Content lines with their 1-based line numbers; blank lines and `#` comments skipped.
fn content_lines<R: BufRead>(r: R, header: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut saw_header = false;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t == header {
            saw_header = true;
            continue;
        }
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push((i + 1, t.to_string()));
    }
    if !saw_header {
        return Err(Error::Parse(format!("missing header {header:?}")));
    }
    Ok(out)
}

fn keyed<'a>(lines: &'a [(usize, String)], at: usize, key: &str) -> Result<(usize, Vec<&'a str>)> {
    let (n, l) = lines
        .get(at)
        .ok_or_else(|| Error::Parse(format!("unexpected end of input, expected {key:?}")))?;
    let mut parts = l.split_whitespace();
    if parts.next() != Some(key) {
        return Err(parse_err(*n, format!("expected {key:?}")));
    }
    Ok((*n, parts.collect()))
}

pub fn read_perforated<R: BufRead>(r: R) -> Result<PerforatedDomain> {
    let lines = content_lines(r, DOMAIN_HEADER)?;
    let (n, d) = keyed(&lines, 0, "domain")?;
    let domain = match d.as_slice() {
        ["ball", r] => DomainSpec::Ball { radius: floats(n, &[r])?[0] },
        ["box", a, b, c] => {
            let v = floats(n, &[a, b, c])?;
            DomainSpec::Box { half_widths: [v[0], v[1], v[2]] }
        }
        _ => return Err(parse_err(n, "expected `ball <R>` or `box <h1> <h2> <h3>`")),
    };
    let scalar = |at: usize, key: &str| -> Result<f64> {
        let (n, v) = keyed(&lines, at, key)?;
        match v.as_slice() {
            [x] => Ok(floats(n, &[x])?[0]),
            _ => Err(parse_err(n, format!("{key} takes one value"))),
        }
    };
    let eps = scalar(1, "eps")?;
    let alpha = scalar(2, "alpha")?;
    let (n, c) = keyed(&lines, 3, "holes")?;
    let count: usize = match c.as_slice() {
        [x] => x.parse().map_err(|e| parse_err(n, e))?,
        _ => return Err(parse_err(n, "holes takes one value")),
    };
    if lines.len() != 4 + count {
        return Err(Error::Parse(format!("expected {count} hole lines, found {}", lines.len() - 4)));
    }
    let holes = lines[4..]
        .iter()
        .map(|(n, l)| {
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(parse_err(*n, "hole lines are `x y z radius`"));
            }
            let v = floats(*n, &parts)?;
            Ok(Hole { center: [v[0], v[1], v[2]], radius: v[3] })
        })
        .collect::<Result<Vec<_>>>()?;
    PerforatedDomain::from_holes(domain, eps, alpha, holes)
}

pub fn write_field<W: Write>(field: &ScalarField, mut w: W) -> Result<()> {
    let l = &field.lattice;
    writeln!(w, "{FIELD_HEADER}")?;
    writeln!(w, "dims {} {} {}", l.dims[0], l.dims[1], l.dims[2])?;
    writeln!(w, "spacing {}", l.spacing)?;
    writeln!(w, "origin {} {} {}", l.origin[0], l.origin[1], l.origin[2])?;
    writeln!(w, "legend 0=interior 1=hole 2=exterior")?;
    for (k, v) in field.kinds.iter().zip(&field.values) {
        writeln!(w, "{} {}", k.code(), v)?;
    }
    Ok(())
}

pub fn read_field<R: BufRead>(r: R) -> Result<ScalarField> {
    let lines = content_lines(r, FIELD_HEADER)?;
    let (n, d) = keyed(&lines, 0, "dims")?;
    if d.len() != 3 {
        return Err(parse_err(n, "dims takes three values"));
    }
    let dims = [0, 1, 2]
        .map(|k| d[k].parse::<usize>().map_err(|e| parse_err(n, e)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (n, s) = keyed(&lines, 1, "spacing")?;
    let spacing = floats(n, &s)?.first().copied().ok_or_else(|| parse_err(n, "missing spacing"))?;
    let (n, o) = keyed(&lines, 2, "origin")?;
    let o = floats(n, &o)?;
    if o.len() != 3 {
        return Err(parse_err(n, "origin takes three values"));
    }
    keyed(&lines, 3, "legend")?;
    let lattice = Lattice { dims: [dims[0], dims[1], dims[2]], spacing, origin: [o[0], o[1], o[2]] };
    if lines.len() != 4 + lattice.len() {
        return Err(Error::Parse(format!("expected {} cell lines, found {}", lattice.len(), lines.len() - 4)));
    }
    let mut kinds = Vec::with_capacity(lattice.len());
    let mut values = Vec::with_capacity(lattice.len());
    for (n, l) in &lines[4..] {
        let (k, v) = l.split_once(' ').ok_or_else(|| parse_err(*n, "cell lines are `kind value`"))?;
        let code: u8 = k.parse().map_err(|e| parse_err(*n, e))?;
        kinds.push(CellKind::from_code(code).ok_or_else(|| parse_err(*n, format!("unknown cell kind {code}")))?);
        values.push(v.trim().parse::<f64>().map_err(|e| parse_err(*n, e))?);
    }
    Ok(ScalarField { lattice, kinds, values })
}
