//! Line-oriented circuit text formats.
//!
//! DNF files start with a header `dnf n=<n> m=<terms>` followed by one term
//! per line as space-separated signed 1-based literals (`1 -3 4`); a line
//! containing only `0` denotes the empty term. CNF files mirror this with a
//! `cnf` header. A file may contain several headers; `parse_family` returns
//! them all. Deeper circuits use a nested s-expression after an `ac0 n=<n>`
//! header, e.g. `(or (and 1 -2) 3)`. Restrictions are strings over `01*`.

use thiserror::Error;

use crate::circuit::{Ac0Circuit, CircuitError, Gate, GateInput, GateKind};
use crate::formula::{CnfFormula, DnfFormula, FormulaError, Literal, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("line {line}: expected header `{expected} n=<n> m=<count>`")]
    BadHeader { line: usize, expected: &'static str },
    #[error("line {line}: bad literal {token:?}")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} out of range for n={n}")]
    LiteralOutOfRange { line: usize, lit: i64, n: usize },
    #[error("header declares {declared} terms but {found} were given")]
    TermCountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("s-expression error at offset {at}: {message}")]
    SExpr { at: usize, message: String },
    #[error("empty input")]
    Empty,
}

fn parse_header(line: &str, lineno: usize) -> Option<(&'static str, usize, usize)> {
    let mut parts = line.split_whitespace();
    let kind = match parts.next()? {
        "dnf" => "dnf",
        "cnf" => "cnf",
        _ => return None,
    };
    let mut n = None;
    let mut m = None;
    for p in parts {
        if let Some(v) = p.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = p.strip_prefix("m=") {
            m = v.parse().ok();
        }
    }
    let _ = lineno;
    Some((kind, n?, m?))
}

fn parse_term_line(line: &str, lineno: usize, n: usize) -> Result<Term, TextError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens == ["0"] {
        return Ok(Term::empty());
    }
    let mut lits = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let v: i64 = tok
            .parse()
            .map_err(|_| TextError::BadLiteral { line: lineno, token: tok.to_string() })?;
        if v == 0 {
            return Err(TextError::BadLiteral { line: lineno, token: tok.to_string() });
        }
        let var = v.unsigned_abs() as usize - 1;
        if var >= n {
            return Err(TextError::LiteralOutOfRange { line: lineno, lit: v, n });
        }
        lits.push(Literal { var, negated: v < 0 });
    }
    Ok(Term::new(lits)?)
}

enum Parsed {
    Dnf(DnfFormula),
    Cnf(CnfFormula),
}

fn parse_sections(input: &str) -> Result<Vec<Parsed>, TextError> {
    let mut out = Vec::new();
    let mut lines = input.lines().enumerate().peekable();
    while let Some((lineno, line)) = lines.next() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((kind, n, m)) = parse_header(line, lineno + 1) else {
            return Err(TextError::BadHeader { line: lineno + 1, expected: "dnf|cnf" });
        };
        let mut terms = Vec::with_capacity(m);
        while terms.len() < m {
            let Some((tno, tline)) = lines.next() else {
                return Err(TextError::TermCountMismatch { declared: m, found: terms.len() });
            };
            let tline = tline.trim();
            if tline.is_empty() || tline.starts_with('#') {
                continue;
            }
            terms.push(parse_term_line(tline, tno + 1, n)?);
        }
        out.push(match kind {
            "dnf" => Parsed::Dnf(DnfFormula::new(n, terms)?),
            _ => Parsed::Cnf(CnfFormula::new(n, terms)?),
        });
    }
    if out.is_empty() {
        return Err(TextError::Empty);
    }
    Ok(out)
}

pub fn parse_dnf(input: &str) -> Result<DnfFormula, TextError> {
    match parse_sections(input)?.into_iter().next().unwrap() {
        Parsed::Dnf(f) => Ok(f),
        Parsed::Cnf(_) => Err(TextError::BadHeader { line: 1, expected: "dnf" }),
    }
}

pub fn parse_cnf(input: &str) -> Result<CnfFormula, TextError> {
    match parse_sections(input)?.into_iter().next().unwrap() {
        Parsed::Cnf(f) => Ok(f),
        Parsed::Dnf(_) => Err(TextError::BadHeader { line: 1, expected: "cnf" }),
    }
}

/// Parses every `dnf` section in the file, in order.
pub fn parse_family(input: &str) -> Result<Vec<DnfFormula>, TextError> {
    parse_sections(input)?
        .into_iter()
        .map(|p| match p {
            Parsed::Dnf(f) => Ok(f),
            Parsed::Cnf(_) => Err(TextError::BadHeader { line: 1, expected: "dnf" }),
        })
        .collect()
}

fn write_terms(out: &mut String, terms: &[Term]) {
    for t in terms {
        if t.is_empty() {
            out.push_str("0\n");
            continue;
        }
        let lits: Vec<String> = t
            .literals()
            .iter()
            .map(|l| {
                let v = l.var as i64 + 1;
                if l.negated { format!("-{v}") } else { v.to_string() }
            })
            .collect();
        out.push_str(&lits.join(" "));
        out.push('\n');
    }
}

pub fn write_dnf(f: &DnfFormula) -> String {
    use crate::formula::BooleanFn;
    let mut out = format!("dnf n={} m={}\n", f.dimension(), f.term_count());
    write_terms(&mut out, f.terms());
    out
}

pub fn write_cnf(f: &CnfFormula) -> String {
    use crate::formula::BooleanFn;
    let mut out = format!("cnf n={} m={}\n", f.dimension(), f.clause_count());
    write_terms(&mut out, f.clauses());
    out
}

pub fn write_family(family: &[DnfFormula]) -> String {
    family.iter().map(write_dnf).collect::<Vec<_>>().join("")
}

/// Parses `ac0 n=<n>` followed by one s-expression, e.g.
/// `(or (and 1 -2) (and 2 3) -4)`. Signed 1-based literals; gate kinds
/// alternate implicitly by nesting.
pub fn parse_circuit(input: &str) -> Result<Ac0Circuit, TextError> {
    let mut n = None;
    let mut rest_start = 0usize;
    for (off, line) in split_lines_with_offsets(input) {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        if parts.next() == Some("ac0") {
            for p in parts {
                if let Some(v) = p.strip_prefix("n=") {
                    n = v.parse().ok();
                }
            }
            rest_start = off + line.len();
            break;
        }
        return Err(TextError::BadHeader { line: 1, expected: "ac0" });
    }
    let n = n.ok_or(TextError::BadHeader { line: 1, expected: "ac0" })?;
    let body = &input[rest_start..];
    let chars: Vec<char> = body.chars().collect();
    let mut pos = 0usize;
    let mut gates = Vec::new();
    let root = parse_sexpr(&chars, &mut pos, n, &mut gates)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(TextError::SExpr { at: pos, message: "trailing input".into() });
    }
    let output = match root {
        GateInput::Gate(g) => g,
        GateInput::Lit(l) => {
            // A bare literal at the top level becomes a one-input OR.
            gates.push(Gate { kind: GateKind::Or, inputs: vec![GateInput::Lit(l)] });
            gates.len() - 1
        }
    };
    Ok(Ac0Circuit::new(n, gates, output)?)
}

fn split_lines_with_offsets(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.split_inclusive('\n').scan(0usize, |off, line| {
        let start = *off;
        *off += line.len();
        Some((start, line))
    })
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while chars.get(*pos).is_some_and(|c| c.is_whitespace()) {
        *pos += 1;
    }
}

fn parse_sexpr(
    chars: &[char],
    pos: &mut usize,
    n: usize,
    gates: &mut Vec<Gate>,
) -> Result<GateInput, TextError> {
    skip_ws(chars, pos);
    match chars.get(*pos) {
        Some('(') => {
            *pos += 1;
            skip_ws(chars, pos);
            let start = *pos;
            while chars.get(*pos).is_some_and(|c| c.is_ascii_alphabetic()) {
                *pos += 1;
            }
            let kind: String = chars[start..*pos].iter().collect();
            let kind = match kind.as_str() {
                "and" => GateKind::And,
                "or" => GateKind::Or,
                other => {
                    return Err(TextError::SExpr {
                        at: start,
                        message: format!("unknown gate kind {other:?}"),
                    })
                }
            };
            let mut inputs = Vec::new();
            loop {
                skip_ws(chars, pos);
                match chars.get(*pos) {
                    Some(')') => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => inputs.push(parse_sexpr(chars, pos, n, gates)?),
                    None => {
                        return Err(TextError::SExpr { at: *pos, message: "unclosed (".into() })
                    }
                }
            }
            gates.push(Gate { kind, inputs });
            Ok(GateInput::Gate(gates.len() - 1))
        }
        Some(&c) if c == '-' || c.is_ascii_digit() => {
            let start = *pos;
            if c == '-' {
                *pos += 1;
            }
            while chars.get(*pos).is_some_and(|ch| ch.is_ascii_digit()) {
                *pos += 1;
            }
            let tok: String = chars[start..*pos].iter().collect();
            let v: i64 = tok
                .parse()
                .map_err(|_| TextError::SExpr { at: start, message: format!("bad literal {tok}") })?;
            if v == 0 || v.unsigned_abs() as usize > n {
                return Err(TextError::SExpr { at: start, message: format!("literal {v} out of range") });
            }
            Ok(GateInput::Lit(Literal { var: v.unsigned_abs() as usize - 1, negated: v < 0 }))
        }
        Some(&c) => Err(TextError::SExpr { at: *pos, message: format!("unexpected {c:?}") }),
        None => Err(TextError::SExpr { at: *pos, message: "empty expression".into() }),
    }
}

pub fn write_circuit(c: &Ac0Circuit) -> String {
    use crate::formula::BooleanFn;
    fn emit(c: &Ac0Circuit, input: &GateInput, out: &mut String) {
        match *input {
            GateInput::Lit(l) => {
                let v = l.var as i64 + 1;
                out.push_str(&if l.negated { format!("-{v}") } else { v.to_string() });
            }
            GateInput::Gate(g) => {
                let gate = &c.gates()[g];
                out.push('(');
                out.push_str(match gate.kind {
                    GateKind::And => "and",
                    GateKind::Or => "or",
                });
                for i in &gate.inputs {
                    out.push(' ');
                    emit(c, i, out);
                }
                out.push(')');
            }
        }
    }
    let mut out = format!("ac0 n={}\n", c.dimension());
    emit(c, &GateInput::Gate(c.output()), &mut out);
    out.push('\n');
    out
}
