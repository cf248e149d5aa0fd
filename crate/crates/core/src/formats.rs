//! Text formats: `.pbf` partial functions, `.poly` polynomials, DIMACS CNF,
//! and JSON perturbation instances.
//!
//! `.pbf`: `n <int>`, then `table <2^n chars over 01*>` or repeated
//! `point <bits> <0|1>` lines (unlisted points undefined). `.poly`: `n <int>`,
//! `basis fourier|monomial`, then `<mask bits> <coefficient>` lines. Bit
//! strings start with `x_1`; `#` starts a comment in both formats.

use std::fs;
use std::path::Path;

use crate::boolfn::{bitstring, Input, PartialFunction, Value, MAX_ARITY};
use crate::error::{Error, Result};
use crate::perturbation::{Cnf, PerturbationInstance};
use crate::polynomials::{Basis, MultilinearPoly};

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str, comment: char) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(move |(i, line)| {
        let body = line.split(comment).next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn parse_arity<'a>(lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>) -> Result<usize> {
    let (line, words) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `n <int>` header"))?;
    match words.as_slice() {
        ["n", v] => {
            let n: usize = v.parse().map_err(|_| Error::parse(line, format!("bad arity {v:?}")))?;
            if n == 0 || n > MAX_ARITY {
                return Err(Error::parse(line, format!("arity {n} outside 1..={MAX_ARITY}")));
            }
            Ok(n)
        }
        _ => Err(Error::parse(line, "expected `n <int>`")),
    }
}

fn parse_bits(line: usize, s: &str, n: usize) -> Result<u32> {
    if s.len() != n {
        return Err(Error::parse(
            line,
            format!("bit string {s:?} has length {}, expected {n}", s.len()),
        ));
    }
    Input::from_bitstring(s)
        .map(|x| x.bits)
        .map_err(|e| Error::parse(line, e.to_string()))
}

pub fn parse_pbf(text: &str) -> Result<PartialFunction> {
    let mut lines = content_lines(text, '#');
    let n = parse_arity(&mut lines)?;
    let mut f = PartialFunction::from_fn(n, |_| Value::Undefined)?;
    let mut table_seen = false;
    let mut points_seen = false;
    for (line, words) in lines {
        match words.as_slice() {
            ["table", t] => {
                if table_seen || points_seen {
                    return Err(Error::parse(line, "table must be the only body line"));
                }
                if t.len() != f.size() {
                    return Err(Error::parse(
                        line,
                        format!("table has {} entries, expected {}", t.len(), f.size()),
                    ));
                }
                for (x, c) in t.chars().enumerate() {
                    let v =
                        Value::from_char(c).ok_or_else(|| Error::parse(line, format!("bad table character {c:?}")))?;
                    f.set(x as u32, v);
                }
                table_seen = true;
            }
            ["point", bits, v] => {
                if table_seen {
                    return Err(Error::parse(line, "point lines cannot follow a table"));
                }
                let x = parse_bits(line, bits, n)?;
                let v = match *v {
                    "0" => Value::Zero,
                    "1" => Value::One,
                    _ => return Err(Error::parse(line, format!("bad value {v:?}"))),
                };
                if f.in_domain(x) && f.value(x) != v {
                    return Err(Error::parse(line, format!("conflicting labels for {bits}")));
                }
                f.set(x, v);
                points_seen = true;
            }
            _ => return Err(Error::parse(line, format!("unrecognized line {:?}", words.join(" ")))),
        }
    }
    Ok(f)
}

/// Canonical form: header plus one table line.
pub fn write_pbf(f: &PartialFunction) -> String {
    format!("n {}\ntable {}\n", f.arity(), f.table_string())
}

pub fn parse_poly(text: &str) -> Result<MultilinearPoly> {
    let mut lines = content_lines(text, '#');
    let n = parse_arity(&mut lines)?;
    let (line, words) = lines.next().ok_or_else(|| Error::parse(2, "missing `basis` line"))?;
    let basis = match words.as_slice() {
        ["basis", "fourier"] => Basis::Fourier,
        ["basis", "monomial"] => Basis::Monomial,
        _ => return Err(Error::parse(line, "expected `basis fourier|monomial`")),
    };
    let mut terms = Vec::new();
    for (line, words) in lines {
        match words.as_slice() {
            [mask, c] => {
                let s = parse_bits(line, mask, n)?;
                let c: f64 = c
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad coefficient {c:?}")))?;
                if !c.is_finite() {
                    return Err(Error::parse(line, "coefficient must be finite"));
                }
                terms.push((s, c));
            }
            _ => return Err(Error::parse(line, "expected `<mask> <coefficient>`")),
        }
    }
    Ok(MultilinearPoly::from_coeffs(n, basis, terms))
}

/// Coefficients in increasing mask order, shortest round-trip decimals.
pub fn write_poly(p: &MultilinearPoly) -> Result<String> {
    let basis = match p.basis {
        Basis::Fourier => "fourier",
        Basis::Monomial => "monomial",
        Basis::Biased { .. } => {
            return Err(Error::InvalidArgument("biased polynomials have no text form".into()));
        }
    };
    let mut out = format!("n {}\nbasis {basis}\n", p.n);
    for (&s, &c) in &p.coeffs {
        out.push_str(&format!("{} {c}\n", bitstring(s, p.n)));
    }
    Ok(out)
}

pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (line, words) in content_lines(text, '%') {
        if words[0] == "c" {
            continue;
        }
        if words[0] == "p" {
            if header.is_some() {
                return Err(Error::parse(line, "duplicate problem line"));
            }
            match words.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad variable count {v:?}")))?;
                    let c = c
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad clause count {c:?}")))?;
                    header = Some((v, c));
                }
                _ => return Err(Error::parse(line, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let (vars, _) = header.ok_or_else(|| Error::parse(line, "clause before problem line"))?;
        for w in words {
            let l: i32 = w
                .parse()
                .map_err(|_| Error::parse(line, format!("bad literal {w:?}")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() as usize > vars {
                return Err(Error::parse(line, format!("literal {l} exceeds {vars} variables")));
            } else {
                current.push(l);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| Error::parse(1, "missing problem line"))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        let last = text.lines().count().max(1);
        return Err(Error::parse(
            last,
            format!("{} clauses, header declares {count}", clauses.len()),
        ));
    }
    Ok(Cnf { vars, clauses })
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            out.push_str(&format!("{l} "));
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse_pf_json(text: &str) -> Result<PerturbationInstance> {
    let raw: PerturbationInstance = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    PerturbationInstance::new(raw.t, raw.p, raw.q, raw.epsilon, raw.bound)
}

pub fn write_pf_json(inst: &PerturbationInstance) -> String {
    let mut s = serde_json::to_string_pretty(inst).expect("plain data serializes");
    s.push('\n');
    s
}
