//! Line-based text format.
//!
//! ```text
//! # comment
//! header <n> <m> <k> <p>
//! vertex <id> <iface>:<cost> [<iface>:<cost> ...]
//! edge <u> <v>
//! group <id> [<id> ...]
//! ```
//!
//! Vertex indices follow the order of `vertex` lines. Interface labels are
//! indexed in numeric order when every label is an integer, lexicographic
//! order otherwise. Costs are non-negative decimals (`0.125`, `3`) or exact
//! fractions (`1/3`).

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Assignment, Instance, Violation};
use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<Violation>),
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses a non-negative decimal or `p/q` fraction.
pub fn parse_cost(text: &str) -> Option<Rational> {
    if let Some((p, q)) = text.split_once('/') {
        let p: i128 = p.parse().ok()?;
        let q: i128 = q.parse().ok()?;
        if p < 0 || q <= 0 {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
        return None;
    }
    let scale = 10i128.checked_pow(frac.len() as u32)?;
    let int_part: i128 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac_part: i128 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let numer = int_part.checked_mul(scale)?.checked_add(frac_part)?;
    Some(Rational::new(numer, scale))
}

/// Formats a cost exactly: as a decimal when the expansion terminates,
/// otherwise as `p/q`.
pub fn format_cost(c: &Rational) -> String {
    let (p, q) = (*c.numer(), *c.denom());
    let mut rest = q;
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    if rest != 1 {
        return format!("{p}/{q}");
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return p.to_string();
    }
    let scale = 10i128.pow(digits);
    let scaled = p * (scale / q);
    let int = scaled / scale;
    let frac = format!("{:0width$}", scaled % scale, width = digits as usize);
    format!("{int}.{}", frac.trim_end_matches('0'))
}

fn interface_order(labels: &[String]) -> Vec<String> {
    let mut sorted = labels.to_vec();
    if sorted.iter().all(|l| l.parse::<u64>().is_ok()) {
        sorted.sort_by_key(|l| l.parse::<u64>().unwrap());
    } else {
        sorted.sort();
    }
    sorted
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.ok_or_else(|| syntax(line, format!("header missing {what}")))?
        .parse()
        .map_err(|_| syntax(line, format!("header {what} is not a count")))
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, [usize; 4])> = None;
    let mut vertex_labels: Vec<String> = Vec::new();
    let mut vertex_index: HashMap<String, usize> = HashMap::new();
    let mut raw_interfaces: Vec<Vec<(String, Rational)>> = Vec::new();
    let mut edges = Vec::new();
    let mut groups = Vec::new();
    let mut pending_refs: Vec<(usize, Vec<String>, bool)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut toks = content.split_whitespace();
        let keyword = toks.next().unwrap();
        if keyword != "header" && header.is_none() {
            return Err(syntax(line, "expected `header` before other directives"));
        }
        match keyword {
            "header" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate header"));
                }
                let counts = [
                    parse_count(toks.next(), line, "n")?,
                    parse_count(toks.next(), line, "m")?,
                    parse_count(toks.next(), line, "k")?,
                    parse_count(toks.next(), line, "p")?,
                ];
                if toks.next().is_some() {
                    return Err(syntax(line, "trailing tokens after header"));
                }
                header = Some((line, counts));
            }
            "vertex" => {
                let label = toks
                    .next()
                    .ok_or_else(|| syntax(line, "vertex line missing identifier"))?;
                if vertex_index.contains_key(label) {
                    return Err(syntax(line, format!("vertex {label} declared twice")));
                }
                let mut list: Vec<(String, Rational)> = Vec::new();
                for tok in toks {
                    let (iface, cost) = tok.split_once(':').ok_or_else(|| {
                        syntax(line, format!("expected <iface>:<cost>, found `{tok}`"))
                    })?;
                    if iface.is_empty() {
                        return Err(syntax(line, "empty interface label"));
                    }
                    let cost = parse_cost(cost).ok_or_else(|| {
                        syntax(line, format!("cost `{cost}` is not a non-negative decimal"))
                    })?;
                    if list.iter().any(|(l, _)| l == iface) {
                        return Err(syntax(line, format!("interface {iface} listed twice")));
                    }
                    list.push((iface.to_string(), cost));
                }
                vertex_index.insert(label.to_string(), vertex_labels.len());
                vertex_labels.push(label.to_string());
                raw_interfaces.push(list);
            }
            "edge" => {
                let ends: Vec<String> = toks.map(str::to_string).collect();
                if ends.len() != 2 {
                    return Err(syntax(line, "edge line needs exactly two endpoints"));
                }
                pending_refs.push((line, ends, true));
            }
            "group" => {
                let members: Vec<String> = toks.map(str::to_string).collect();
                if members.is_empty() {
                    return Err(syntax(line, "empty group"));
                }
                pending_refs.push((line, members, false));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let (header_line, [n, m, k, p]) = header.ok_or_else(|| syntax(1, "missing header"))?;

    for (line, labels, is_edge) in pending_refs {
        let ids = labels
            .iter()
            .map(|l| {
                vertex_index
                    .get(l)
                    .copied()
                    .ok_or_else(|| syntax(line, format!("unknown vertex {l}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if is_edge {
            edges.push((ids[0], ids[1]));
        } else {
            groups.push(ids);
        }
    }

    let mut labels: Vec<String> = raw_interfaces
        .iter()
        .flatten()
        .map(|(l, _)| l.clone())
        .collect();
    labels.sort();
    labels.dedup();
    let interface_labels = interface_order(&labels);
    let iface_index: HashMap<&str, usize> = interface_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let available: Vec<Vec<(usize, Rational)>> = raw_interfaces
        .iter()
        .map(|list| {
            let mut v: Vec<(usize, Rational)> =
                list.iter().map(|(l, c)| (iface_index[l.as_str()], *c)).collect();
            v.sort_by_key(|&(i, _)| i);
            v
        })
        .collect();

    let found = [vertex_labels.len(), edges.len(), interface_labels.len(), groups.len()];
    for (name, (want, got)) in ["n", "m", "k", "p"].iter().zip([n, m, k, p].iter().zip(found)) {
        if *want != got {
            return Err(syntax(
                header_line,
                format!("header declares {name}={want} but the document has {got}"),
            ));
        }
    }

    for g in &mut groups {
        g.sort_unstable();
    }
    let inst = Instance::with_labels(vertex_labels, interface_labels, available, edges, groups);
    let violations = inst.validate();
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(ParseError::Invalid(violations))
    }
}

impl Instance {
    /// Serializes in the text format; `parse_instance` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "header {} {} {} {}",
            self.n(),
            self.m(),
            self.interface_count(),
            self.groups().len()
        );
        for v in 0..self.n() {
            out.push_str("vertex ");
            out.push_str(self.vertex_label(v));
            for (i, c) in self.interfaces(v) {
                let _ = write!(out, " {}:{}", self.interface_label(*i), format_cost(c));
            }
            out.push('\n');
        }
        for &(u, v) in self.edges() {
            let _ = writeln!(out, "edge {} {}", self.vertex_label(u), self.vertex_label(v));
        }
        for g in self.groups() {
            out.push_str("group");
            for &t in g {
                out.push(' ');
                out.push_str(self.vertex_label(t));
            }
            out.push('\n');
        }
        out
    }
}

/// Parses `active <vertex> <iface>...` lines against `inst`.
pub fn parse_assignment(inst: &Instance, text: &str) -> Result<Assignment, ParseError> {
    let mut a = Assignment::empty(inst.n());
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut toks = content.split_whitespace();
        if toks.next() != Some("active") {
            return Err(syntax(line, "expected `active <vertex> <iface>...`"));
        }
        let label = toks
            .next()
            .ok_or_else(|| syntax(line, "active line missing vertex"))?;
        let v = inst
            .vertex_index(label)
            .ok_or_else(|| syntax(line, format!("unknown vertex {label}")))?;
        for tok in toks {
            let i = inst
                .interface_index(tok)
                .ok_or_else(|| syntax(line, format!("unknown interface {tok}")))?;
            if !inst.available_set(v).contains(i) {
                return Err(syntax(
                    line,
                    format!("interface {tok} is not available at vertex {label}"),
                ));
            }
            a.activate(v, i);
        }
    }
    Ok(a)
}
