//! Grid-function CSV format.
//!
//! Comment header lines carry the domain, then one value per line
//! (row-major for 2D). Values are written with 17 significant digits so a
//! write/read cycle reproduces every f64 bit-exactly.
//!
//! ```text
//! # dim=1
//! # lower=0
//! # upper=1
//! # shape=65
//! # support=zero-outside
//! 0
//! 2.4169921875e-2
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{BoxDomain, GridFunction};

fn fmt_f64(v: f64) -> String {
    // 17 significant digits round-trip any finite f64.
    format!("{:.16e}", v)
}

fn fmt_axis(vals: [f64; 2], dim: usize) -> String {
    if dim == 1 {
        fmt_f64(vals[0])
    } else {
        format!("{},{}", fmt_f64(vals[0]), fmt_f64(vals[1]))
    }
}

pub fn to_csv(g: &GridFunction) -> String {
    let d = &g.domain;
    let mut out = String::new();
    let _ = writeln!(out, "# dim={}", d.dim());
    let _ = writeln!(out, "# lower={}", fmt_axis(d.lower(), d.dim()));
    let _ = writeln!(out, "# upper={}", fmt_axis(d.upper(), d.dim()));
    let shape = if d.dim() == 1 {
        format!("{}", d.nodes_per_axis()[0])
    } else {
        format!("{},{}", d.nodes_per_axis()[0], d.nodes_per_axis()[1])
    };
    let _ = writeln!(out, "# shape={}", shape);
    let _ = writeln!(
        out,
        "# support={}",
        if g.zero_outside { "zero-outside" } else { "free" }
    );
    for v in &g.values {
        let _ = writeln!(out, "{}", fmt_f64(*v));
    }
    out
}

pub fn write_csv(path: impl AsRef<Path>, g: &GridFunction) -> Result<()> {
    std::fs::write(path, to_csv(g))?;
    Ok(())
}

fn parse_axis(text: &str, field: &str) -> Result<(usize, [f64; 2])> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.is_empty() || parts.len() > 2 {
        return Err(Error::Input(format!("field {field}: expected 1 or 2 components")));
    }
    let mut vals = [0.0; 2];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Input(format!("field {field}: {e}")))?;
    }
    Ok((parts.len(), vals))
}

pub fn from_csv(text: &str) -> Result<GridFunction> {
    let mut dim: Option<usize> = None;
    let mut lower = [0.0; 2];
    let mut upper = [0.0; 2];
    let mut shape = [0usize; 2];
    let mut support_zero = false;
    let mut values = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((key, val)) = rest.split_once('=') {
                match key.trim() {
                    "dim" => {
                        dim = Some(val.trim().parse::<usize>().map_err(|e| {
                            Error::Input(format!("field dim (line {}): {e}", lineno + 1))
                        })?)
                    }
                    "lower" => lower = parse_axis(val, "lower")?.1,
                    "upper" => upper = parse_axis(val, "upper")?.1,
                    "shape" => {
                        let parts: Vec<&str> = val.split(',').collect();
                        for (i, p) in parts.iter().enumerate().take(2) {
                            shape[i] = p.trim().parse::<usize>().map_err(|e| {
                                Error::Input(format!("field shape (line {}): {e}", lineno + 1))
                            })?;
                        }
                    }
                    "support" => match val.trim() {
                        "zero-outside" => support_zero = true,
                        "free" => support_zero = false,
                        other => {
                            return Err(Error::Input(format!(
                                "field support: unknown value '{other}'"
                            )))
                        }
                    },
                    _ => {} // unknown headers are ignored
                }
            }
            continue;
        }
        values.push(line.parse::<f64>().map_err(|e| {
            Error::Input(format!("value (line {}): {e}", lineno + 1))
        })?);
    }

    let dim = dim.ok_or_else(|| Error::Input("field dim: missing header".into()))?;
    let domain = match dim {
        1 => BoxDomain::new_1d(lower[0], upper[0], shape[0])?,
        2 => BoxDomain::new_2d(lower, upper, shape)?,
        other => return Err(Error::Input(format!("field dim: unsupported value {other}"))),
    };
    let mut g = GridFunction::from_values(&domain, values)?;
    if support_zero {
        g = g.with_zero_outside();
    }
    Ok(g)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<GridFunction> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
        Error::Input(format!(
            "cannot read grid file {}: {e}",
            path.as_ref().display()
        ))
    })?;
    from_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid_function;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 33).unwrap();
        let g = make_grid_function(&dom, |p| (37.0 * p[0]).sin() / 3.0)
            .unwrap()
            .with_zero_outside();
        let text = to_csv(&g);
        let back = from_csv(&text).unwrap();
        assert_eq!(back.domain, g.domain);
        assert_eq!(back.zero_outside, g.zero_outside);
        for (a, b) in g.values.iter().zip(&back.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn csv_round_trip_2d() {
        let dom = BoxDomain::new_2d([0.0, -1.0], [2.0, 1.0], [5, 7]).unwrap();
        let g = make_grid_function(&dom, |p| p[0] * p[1] + 0.1).unwrap();
        let back = from_csv(&to_csv(&g)).unwrap();
        assert_eq!(back.domain, g.domain);
        for (a, b) in g.values.iter().zip(&back.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn malformed_csv_names_the_field() {
        let res = from_csv("# dim=1\n# lower=0\n# upper=1\n# shape=3\nnot-a-number\n");
        match res {
            Err(Error::Input(msg)) => assert!(msg.contains("value")),
            other => panic!("unexpected: {other:?}"),
        }
        assert!(from_csv("# lower=0\n# upper=1\n# shape=3\n0\n0\n0\n").is_err());
    }
}
