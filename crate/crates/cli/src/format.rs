//! Text formats for languages, instances and assignments.
//!
//! ```text
//! domain 2
//! function f 2
//!   0 1 : 3/2
//!   1 0 : inf
//! end
//! ```
//!
//! Unlisted tuples are `inf`. Instances:
//!
//! ```text
//! vars 3
//! constraint f 0 1
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use vcsp::model::{format_rational, CostFn, ExtRat, Instance, Label, Language};
use vcsp::{Error, Result};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into whitespace-separated tokens with 1-based character
/// columns, dropping everything after `#`.
fn tokens(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in body.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((byte, col + 1)),
            (true, Some((b, c))) => {
                out.push(Token {
                    text: &body[b..byte],
                    column: c,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push(Token {
            text: &body[b..],
            column: c,
        });
    }
    out
}

fn end_column(line: &str) -> usize {
    line.split('#')
        .next()
        .unwrap_or("")
        .trim_end()
        .chars()
        .count()
        + 1
}

fn number(tok: &Token<'_>, line: usize, what: &str) -> Result<usize> {
    tok.text.parse().map_err(|_| {
        parse_err(
            line,
            tok.column,
            format!("expected {what}, found `{}`", tok.text),
        )
    })
}

fn expect_len(toks: &[Token<'_>], n: usize, line: usize, raw: &str, usage: &str) -> Result<()> {
    match toks.len().cmp(&n) {
        std::cmp::Ordering::Less => Err(parse_err(
            line,
            end_column(raw),
            format!("expected `{usage}`"),
        )),
        std::cmp::Ordering::Greater => Err(parse_err(
            line,
            toks[n].column,
            format!("unexpected `{}`", toks[n].text),
        )),
        std::cmp::Ordering::Equal => Ok(()),
    }
}

struct Pending {
    name: String,
    arity: usize,
    line: usize,
    entries: Vec<(Vec<Label>, ExtRat)>,
    seen: BTreeSet<Vec<Label>>,
}

pub fn parse_language(text: &str) -> Result<Language> {
    let mut lang: Option<Language> = None;
    let mut open: Option<Pending> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else {
            continue;
        };
        let Some(lang_ref) = lang.as_mut() else {
            if head.text != "domain" {
                return Err(parse_err(line, head.column, "expected `domain K` first"));
            }
            expect_len(&toks, 2, line, raw, "domain K")?;
            let k = number(&toks[1], line, "a domain size")?;
            lang =
                Some(Language::new(k).map_err(|e| parse_err(line, toks[1].column, e.to_string()))?);
            continue;
        };
        let k = lang_ref.domain_size();
        match (head.text, open.as_mut()) {
            ("function", None) => {
                expect_len(&toks, 3, line, raw, "function NAME ARITY")?;
                let arity = number(&toks[2], line, "an arity")?;
                if arity == 0 {
                    return Err(parse_err(line, toks[2].column, "arity must be at least 1"));
                }
                let name = toks[1].text.to_string();
                if lang_ref.get(&name).is_ok() {
                    return Err(parse_err(
                        line,
                        toks[1].column,
                        format!("duplicate function `{name}`"),
                    ));
                }
                open = Some(Pending {
                    name,
                    arity,
                    line,
                    entries: Vec::new(),
                    seen: BTreeSet::new(),
                });
            }
            ("end", Some(_)) => {
                expect_len(&toks, 1, line, raw, "end")?;
                let p = open.take().expect("open function");
                let f = CostFn::new(p.name, p.arity, k, p.entries)
                    .map_err(|e| parse_err(p.line, 1, e.to_string()))?;
                lang_ref
                    .insert(f)
                    .map_err(|e| parse_err(p.line, 1, e.to_string()))?;
            }
            (_, Some(p)) => {
                let Some(colon) = toks.iter().position(|t| t.text == ":") else {
                    return Err(parse_err(
                        line,
                        end_column(raw),
                        "expected `t1 ... tn : VALUE`",
                    ));
                };
                if colon != p.arity {
                    let column = toks
                        .get(p.arity)
                        .filter(|_| colon > p.arity)
                        .map_or(toks[colon].column, |t| t.column);
                    return Err(parse_err(
                        line,
                        column,
                        format!(
                            "function `{}` has arity {}, tuple has {} labels",
                            p.name, p.arity, colon
                        ),
                    ));
                }
                let mut tuple = Vec::with_capacity(p.arity);
                for t in &toks[..colon] {
                    let d = number(t, line, "a label")?;
                    if d >= k {
                        return Err(parse_err(
                            line,
                            t.column,
                            format!("label {d} out of range for domain {k}"),
                        ));
                    }
                    tuple.push(d);
                }
                let value_tok = toks
                    .get(colon + 1)
                    .ok_or_else(|| parse_err(line, end_column(raw), "missing value after `:`"))?;
                if let Some(extra) = toks.get(colon + 2) {
                    return Err(parse_err(
                        line,
                        extra.column,
                        format!("unexpected `{}`", extra.text),
                    ));
                }
                let value: ExtRat =
                    value_tok
                        .text
                        .parse()
                        .map_err(|e: vcsp::model::ParseExtRatError| {
                            parse_err(line, value_tok.column, e.to_string())
                        })?;
                if !p.seen.insert(tuple.clone()) {
                    return Err(parse_err(line, toks[0].column, "tuple listed twice"));
                }
                p.entries.push((tuple, value));
            }
            ("domain", None) => return Err(parse_err(line, head.column, "domain declared twice")),
            (other, None) => {
                return Err(parse_err(
                    line,
                    head.column,
                    format!("expected `function` or end of file, found `{other}`"),
                ))
            }
        }
    }
    if let Some(p) = open {
        return Err(parse_err(
            p.line,
            1,
            format!("function `{}` is missing `end`", p.name),
        ));
    }
    lang.ok_or_else(|| parse_err(1, 1, "missing `domain K`"))
}

/// Parses an instance. With a language, every constraint is checked for a
/// known function name and matching arity so errors carry positions.
pub fn parse_instance(text: &str, lang: Option<&Language>) -> Result<Instance> {
    let mut inst: Option<Instance> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else {
            continue;
        };
        let Some(inst_ref) = inst.as_mut() else {
            if head.text != "vars" {
                return Err(parse_err(line, head.column, "expected `vars N` first"));
            }
            expect_len(&toks, 2, line, raw, "vars N")?;
            inst = Some(Instance::new(number(&toks[1], line, "a variable count")?));
            continue;
        };
        if head.text != "constraint" {
            return Err(parse_err(
                line,
                head.column,
                format!("expected `constraint`, found `{}`", head.text),
            ));
        }
        let name_tok = toks.get(1).ok_or_else(|| {
            parse_err(
                line,
                end_column(raw),
                "expected `constraint NAME v1 ... vn`",
            )
        })?;
        let scope_toks = &toks[2..];
        if let Some(lang) = lang {
            let f = lang.get(name_tok.text).map_err(|_| {
                parse_err(
                    line,
                    name_tok.column,
                    format!("unknown function `{}`", name_tok.text),
                )
            })?;
            if scope_toks.len() != f.arity() {
                let column = scope_toks
                    .get(f.arity())
                    .map_or(end_column(raw), |t| t.column);
                return Err(parse_err(
                    line,
                    column,
                    format!(
                        "function `{}` has arity {}, scope has {} variables",
                        f.name(),
                        f.arity(),
                        scope_toks.len()
                    ),
                ));
            }
        }
        if scope_toks.is_empty() {
            return Err(parse_err(
                line,
                end_column(raw),
                "constraint needs at least one variable",
            ));
        }
        let mut scope = Vec::with_capacity(scope_toks.len());
        for t in scope_toks {
            let v = number(t, line, "a variable index")?;
            if v >= inst_ref.num_vars() {
                return Err(parse_err(
                    line,
                    t.column,
                    format!(
                        "variable {v} out of range ({} variables)",
                        inst_ref.num_vars()
                    ),
                ));
            }
            scope.push(v);
        }
        inst_ref.add(name_tok.text, scope)?;
    }
    inst.ok_or_else(|| parse_err(1, 1, "missing `vars N`"))
}

/// Space-separated labels on one line.
pub fn parse_assignment(text: &str, domain_size: usize) -> Result<Vec<Label>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        for t in tokens(raw) {
            let d = number(&t, i + 1, "a label")?;
            if d >= domain_size {
                return Err(parse_err(
                    i + 1,
                    t.column,
                    format!("label {d} out of range for domain {domain_size}"),
                ));
            }
            out.push(d);
        }
    }
    Ok(out)
}

pub fn print_language(lang: &Language) -> String {
    let mut out = String::new();
    writeln!(out, "domain {}", lang.domain_size()).expect("string write");
    for f in lang.functions() {
        writeln!(out, "function {} {}", f.name(), f.arity()).expect("string write");
        for (t, v) in f.entries() {
            writeln!(out, "  {} : {}", labels(t), format_rational(v)).expect("string write");
        }
        writeln!(out, "end").expect("string write");
    }
    out
}

pub fn print_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "vars {}", inst.num_vars()).expect("string write");
    for c in inst.constraints() {
        writeln!(out, "constraint {} {}", c.function, labels(&c.scope)).expect("string write");
    }
    out
}

pub fn labels(xs: &[usize]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}
