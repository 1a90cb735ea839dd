//! Line format.
//!
//! ```text
//! # comment
//! elem <n> <m>            e <v>
//! vec <n> <m>             u <i> <±delta>
//! mat <n> <d> <m>         u <i> <j> <±delta>
//! ```
//!
//! The header is the first non-blank, non-comment line; `m` must equal the
//! number of records. Deltas carry an explicit sign. Everything after `#` on
//! a line is ignored.

use std::fmt::Write;

use super::{Body, EntryChecker, Header, Model, StreamSource, TurnstileUpdate};
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn int<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| perr(line, format!("bad {what} {tok:?}")))
}

fn delta(tok: &str, line: usize) -> Result<i64> {
    if !(tok.starts_with('+') || tok.starts_with('-')) {
        return Err(perr(line, format!("delta {tok:?} needs an explicit sign")));
    }
    int(tok, line, "delta")
}

pub fn parse_stream(input: &str) -> Result<StreamSource> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, htext) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
    let toks: Vec<&str> = htext.split_whitespace().collect();
    let header = match toks.as_slice() {
        ["elem", n, m] => Header { model: Model::Element, n: int(n, hline, "n")?, d: 1, m: int(m, hline, "m")? },
        ["vec", n, m] => Header { model: Model::TurnstileVector, n: int(n, hline, "n")?, d: 1, m: int(m, hline, "m")? },
        ["mat", n, d, m] => Header {
            model: Model::TurnstileMatrix,
            n: int(n, hline, "n")?,
            d: int(d, hline, "d")?,
            m: int(m, hline, "m")?,
        },
        _ => return Err(perr(hline, format!("unrecognized header {htext:?}"))),
    };
    if header.n == 0 || header.d == 0 {
        return Err(perr(hline, "dimensions must be positive"));
    }

    let mut count = 0u64;
    let body = if header.model == Model::Element {
        let mut out = Vec::new();
        for (line, text) in lines {
            let toks: Vec<&str> = text.split_whitespace().collect();
            let ["e", v] = toks.as_slice() else {
                return Err(perr(line, format!("expected `e <v>`, found {text:?}")));
            };
            let v: u64 = int(v, line, "element")?;
            if v == 0 || v > header.n {
                return Err(Error::Domain(format!("line {line}: element {v} outside [1, {}]", header.n)));
            }
            out.push(v);
            count += 1;
        }
        Body::Elements(out)
    } else {
        let mut checker = EntryChecker::new(&header);
        let mut out = Vec::new();
        for (line, text) in lines {
            let toks: Vec<&str> = text.split_whitespace().collect();
            let u = match (header.model, toks.as_slice()) {
                (Model::TurnstileVector, ["u", i, dl]) => {
                    TurnstileUpdate::vector(int(i, line, "index")?, delta(dl, line)?)
                }
                (Model::TurnstileMatrix, ["u", i, j, dl]) => {
                    TurnstileUpdate::matrix(int(i, line, "row")?, int(j, line, "column")?, delta(dl, line)?)
                }
                _ => return Err(perr(line, format!("unexpected record {text:?} in a {} stream", header.model))),
            };
            checker.apply(&u).map_err(|e| {
                Error::Domain(format!("line {line}: {}", e.to_string().trim_start_matches("domain error: ")))
            })?;
            out.push(u);
            count += 1;
        }
        Body::Updates(out)
    };
    if count != header.m {
        return Err(perr(hline, format!("header promises {} records, found {count}", header.m)));
    }
    Ok(StreamSource::from_parts(header, body))
}

pub fn serialize_stream(s: &StreamSource) -> String {
    let h = s.header();
    let mut out = String::new();
    match h.model {
        Model::TurnstileMatrix => writeln!(out, "mat {} {} {}", h.n, h.d, h.m),
        m => writeln!(out, "{} {} {}", m.tag(), h.n, h.m),
    }
    .unwrap();
    match &*s.body {
        Body::Elements(e) => e.iter().for_each(|v| writeln!(out, "e {v}").unwrap()),
        Body::Updates(u) => u.iter().for_each(|u| {
            if h.model == Model::TurnstileMatrix {
                writeln!(out, "u {} {} {:+}", u.row, u.col, u.delta).unwrap()
            } else {
                writeln!(out, "u {} {:+}", u.row, u.delta).unwrap()
            }
        }),
    }
    out
}
