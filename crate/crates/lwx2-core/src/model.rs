//! Textual model format: charts, polynomials, structure-constant models, and
//! task directives in one diff-friendly file, plus canonical emitters and a
//! JSON-compatible structured variant.
//!
//! # Grammar
//!
//! A document is a sequence of blocks; `#` starts a comment. Rationals are
//! written `a/b`, exponents `^k`, and fiber variables `xi_1`/`xi^1`,
//! `th_1`/`th^1`. All names must be declared before use.
//!
//! ```text
//! chart C degree 3 {
//!   pair q1 0 p_1 3
//!   pair xi_1 2 xi^1 1
//! }
//!
//! poly Theta on C = xi^1 p_1 + 3/2 q1^2 xi^1 p_1
//!
//! space V {
//!   degree 0: e1 e2
//!   degree -1: m1
//! }
//!
//! linf L on V {
//!   l1[m1] = e1
//!   l2[e1,e2] = 2 e1 - 1/2 e2
//! }
//!
//! leibniz2 B on V {
//!   d[m1] = e1
//!   l2_00[e1,e2] = e1
//!   l2_01[e1,m1] = m1
//!   l2_10[m1,e1] = m1
//!   l3[e1,e2,e1] = m1
//! }
//!
//! lwx W on V {
//!   l2_00[e1,e2] = e1
//!   pair[e1,m1] = 1/2
//! }
//!
//! task master Theta
//! task verify linf L
//! task derive lwx Theta
//! task skew W
//! task double semidirect L
//! task double bialgebroid Mu Gamma
//! task check-bialgebroid Mu Gamma
//! ```
//!
//! A `chart` block lists conjugate pairs `position degree momentum degree`;
//! the two degrees of each pair must sum to the chart degree. A polynomial
//! term is an optional rational coefficient (an optional `*` may follow)
//! times a product of variable factors; a factor is either a declared
//! variable name or `name^k`, where `name^k` is resolved by first trying the
//! whole token as a declared variable and otherwise splitting at the last
//! `^`. Structure blocks give sparse bracket tables on a declared graded
//! space; omitted entries are zero. `leibniz2` and `lwx` spaces must have
//! exactly the degrees 0 and -1.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::algebra::{GPoly, Q, VarId};
use crate::brackets::{
    GradedSpace, LInfStructure, LWXPointStructure, Leibniz2Structure, MultiBracket, Symmetry,
    ViolationReport,
};
use crate::symplectic::DarbouxChart;

/// Parse failure with a position pointing inside the offending token.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ModelError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError {
        line,
        col,
        msg: msg.into(),
    })
}

/// A directive naming a computation over the document's declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Task {
    Master { poly: String },
    Verify { kind: String, name: String },
    Derive { kind: String, poly: String },
    Skew { name: String },
    Double { kind: String, args: Vec<String> },
    CheckBialgebroid { mu: String, gamma: String },
}

/// Parsed model file: named charts, polynomials, structures, and tasks.
#[derive(Debug, Clone, Default)]
pub struct ModelDocument {
    pub charts: Vec<(String, DarbouxChart)>,
    /// name, chart name, polynomial
    pub polys: Vec<(String, String, GPoly)>,
    pub spaces: Vec<(String, GradedSpace)>,
    /// name, space name, structure
    pub linf: Vec<(String, String, LInfStructure)>,
    pub leibniz2: Vec<(String, String, Leibniz2Structure)>,
    pub lwx: Vec<(String, String, LWXPointStructure)>,
    pub tasks: Vec<Task>,
}

impl ModelDocument {
    pub fn chart(&self, name: &str) -> Option<&DarbouxChart> {
        self.charts.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn poly(&self, name: &str) -> Option<(&str, &GPoly)> {
        self.polys
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, c, p)| (c.as_str(), p))
    }

    pub fn space(&self, name: &str) -> Option<&GradedSpace> {
        self.spaces.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn linf(&self, name: &str) -> Option<&LInfStructure> {
        self.linf.iter().find(|(n, _, _)| n == name).map(|(_, _, s)| s)
    }

    pub fn leibniz2(&self, name: &str) -> Option<&Leibniz2Structure> {
        self.leibniz2
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, _, s)| s)
    }

    pub fn lwx(&self, name: &str) -> Option<&LWXPointStructure> {
        self.lwx.iter().find(|(n, _, _)| n == name).map(|(_, _, s)| s)
    }
}

/// One token with its 1-based column.
#[derive(Debug, Clone)]
struct Tok {
    col: usize,
    text: String,
}

/// Split a line into tokens; punctuation `{ } [ ] , = :` tokenizes alone.
fn tokenize(line: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut cur_col = 0usize;
    for (i, ch) in line.chars().enumerate() {
        let col = i + 1;
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() || "{}[],=:".contains(ch) {
            if !cur.is_empty() {
                out.push(Tok {
                    col: cur_col,
                    text: std::mem::take(&mut cur),
                });
            }
            if !ch.is_whitespace() {
                out.push(Tok {
                    col,
                    text: ch.to_string(),
                });
            }
        } else {
            if cur.is_empty() {
                cur_col = col;
            }
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push(Tok { col: cur_col, text: cur });
    }
    out
}

struct Cursor {
    line: usize,
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_col(&self) -> usize {
        self.toks
            .last()
            .map(|t| t.col + t.text.chars().count())
            .unwrap_or(1)
    }

    fn expect_word(&mut self, what: &str) -> Result<(usize, String), ModelError> {
        let (line, end) = (self.line, self.end_col());
        match self.next() {
            Some(t) if !"{}[],=:".contains(&t.text) => Ok((t.col, t.text.clone())),
            Some(t) => err(line, t.col, format!("expected {what}, found `{}`", t.text)),
            None => err(line, end, format!("expected {what}, found end of line")),
        }
    }

    fn expect_lit(&mut self, lit: &str) -> Result<usize, ModelError> {
        let (line, end) = (self.line, self.end_col());
        match self.next() {
            Some(t) if t.text == lit => Ok(t.col),
            Some(t) => err(line, t.col, format!("expected `{lit}`, found `{}`", t.text)),
            None => err(line, end, format!("expected `{lit}`, found end of line")),
        }
    }

    fn expect_end(&mut self) -> Result<(), ModelError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => err(self.line, t.col, format!("unexpected trailing `{}`", t.text)),
        }
    }

    fn expect_u32(&mut self, what: &str) -> Result<u32, ModelError> {
        let (col, w) = self.expect_word(what)?;
        w.parse::<u32>()
            .map_err(|_| ModelError {
                line: self.line,
                col,
                msg: format!("expected {what}, found `{w}`"),
            })
    }

    /// Consume a leading `+`/`-` (possibly glued to the next token) and
    /// return the sign; a missing operator is allowed only on the first term.
    fn take_sign(&mut self, first: bool) -> Result<Q, ModelError> {
        let (line, end) = (self.line, self.end_col());
        match self.toks.get_mut(self.pos) {
            None => err(line, end, "expected term"),
            Some(t) if t.text == "+" => {
                self.pos += 1;
                Ok(Q::one())
            }
            Some(t) if t.text == "-" => {
                self.pos += 1;
                Ok(-Q::one())
            }
            Some(t) if t.text.len() > 1 && t.text.starts_with('-') => {
                t.text.remove(0);
                t.col += 1;
                Ok(-Q::one())
            }
            Some(t) if first => {
                let _ = t;
                Ok(Q::one())
            }
            Some(t) => err(line, t.col, format!("expected `+` or `-`, found `{}`", t.text)),
        }
    }

    fn expect_i32(&mut self, what: &str) -> Result<i32, ModelError> {
        let (col, w) = self.expect_word(what)?;
        w.parse::<i32>()
            .map_err(|_| ModelError {
                line: self.line,
                col,
                msg: format!("expected {what}, found `{w}`"),
            })
    }
}

fn parse_q(line: usize, col: usize, text: &str) -> Result<Q, ModelError> {
    Q::from_str(text).map_err(|_| ModelError {
        line,
        col,
        msg: format!("invalid rational `{text}`"),
    })
}

fn looks_rational(text: &str) -> bool {
    let body = text.strip_prefix('-').unwrap_or(text);
    !body.is_empty() && body.chars().all(|c| c.is_ascii_digit() || c == '/')
}

/// Resolve a factor token: a declared variable, optionally `^exponent`.
fn parse_factor(
    chart: &DarbouxChart,
    line: usize,
    col: usize,
    text: &str,
) -> Result<(VarId, u32), ModelError> {
    if let Some(v) = chart.env().lookup(text) {
        return Ok((v, 1));
    }
    if let Some(caret) = text.rfind('^') {
        let (name, exp) = (&text[..caret], &text[caret + 1..]);
        if let (Some(v), Ok(e)) = (chart.env().lookup(name), exp.parse::<u32>()) {
            if e == 0 {
                return err(line, col + caret + 1, "exponent must be positive");
            }
            return Ok((v, e));
        }
    }
    err(line, col, format!("unknown variable `{text}`"))
}

/// Parse the remaining tokens of the line as a polynomial over the chart.
fn parse_poly_expr(chart: &DarbouxChart, cur: &mut Cursor) -> Result<GPoly, ModelError> {
    let line = cur.line;
    let mut raw: Vec<(Q, Vec<VarId>)> = Vec::new();
    let mut first = true;
    if cur.peek().is_none() {
        return err(line, cur.end_col(), "expected polynomial expression");
    }
    if cur.peek().map(|t| t.text.as_str()) == Some("0") && cur.toks.len() == cur.pos + 1 {
        cur.next();
        return Ok(GPoly::zero(chart.env()));
    }
    while cur.peek().is_some() {
        let sign = cur.take_sign(first)?;
        first = false;
        let mut coeff = sign;
        let mut word: Vec<VarId> = Vec::new();
        let mut any = false;
        if let Some(t) = cur.peek() {
            if looks_rational(&t.text) {
                let q = parse_q(line, t.col, &t.text)?;
                coeff *= q;
                cur.next();
                any = true;
                if cur.peek().map(|t| t.text.as_str()) == Some("*") {
                    cur.next();
                }
            }
        }
        while let Some(t) = cur.peek() {
            if t.text == "+" || t.text == "-" {
                break;
            }
            let (v, e) = parse_factor(chart, line, t.col, &t.text)?;
            if e > 1 && chart.env().var(v).degree % 2 == 1 {
                return err(line, t.col, format!("odd variable `{}` squares to zero", t.text));
            }
            for _ in 0..e {
                word.push(v);
            }
            any = true;
            cur.next();
        }
        if !any {
            let c = cur.peek().map(|t| t.col).unwrap_or_else(|| cur.end_col());
            return err(line, c, "empty term");
        }
        raw.push((coeff, word));
    }
    GPoly::normalize(chart.env(), &raw).map_err(|e| ModelError {
        line,
        col: 1,
        msg: e.to_string(),
    })
}

/// Parse a rational-weighted sum of basis labels into a coefficient vector.
fn parse_combo(space: &GradedSpace, cur: &mut Cursor) -> Result<Vec<(usize, Q)>, ModelError> {
    let line = cur.line;
    if cur.peek().is_none() {
        return err(line, cur.end_col(), "expected basis combination");
    }
    if cur.peek().map(|t| t.text.as_str()) == Some("0") && cur.toks.len() == cur.pos + 1 {
        cur.next();
        return Ok(Vec::new());
    }
    let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
    let mut first = true;
    while cur.peek().is_some() {
        let mut sign = cur.take_sign(first)?;
        first = false;
        if let Some(t) = cur.peek() {
            if looks_rational(&t.text) {
                let q = parse_q(line, t.col, &t.text)?;
                sign *= q;
                cur.next();
                if cur.peek().map(|t| t.text.as_str()) == Some("*") {
                    cur.next();
                }
            }
        }
        let (col, label) = cur.expect_word("basis label")?;
        let idx = space
            .find(&label)
            .ok_or_else(|| ModelError {
                line,
                col,
                msg: format!("unknown basis label `{label}`"),
            })?;
        *acc.entry(idx).or_insert_with(Q::zero) += sign;
    }
    Ok(acc.into_iter().filter(|(_, q)| !q.is_zero()).collect())
}

/// Parse `name[a,b,...]` bracket-entry heads into the label list.
fn parse_args(cur: &mut Cursor) -> Result<Vec<(usize, String)>, ModelError> {
    cur.expect_lit("[")?;
    let mut out = Vec::new();
    loop {
        out.push(cur.expect_word("basis label")?);
        match cur.next() {
            Some(t) if t.text == "," => continue,
            Some(t) if t.text == "]" => break,
            Some(t) => {
                return err(cur.line, t.col, format!("expected `,` or `]`, found `{}`", t.text))
            }
            None => return err(cur.line, cur.end_col(), "expected `,` or `]`, found end of line"),
        }
    }
    Ok(out)
}

fn resolve_labels(
    space: &GradedSpace,
    line: usize,
    args: &[(usize, String)],
) -> Result<Vec<usize>, ModelError> {
    args.iter()
        .map(|(col, l)| {
            space.find(l).ok_or_else(|| ModelError {
                line,
                col: *col,
                msg: format!("unknown basis label `{l}`"),
            })
        })
        .collect()
}

struct Lines {
    rows: Vec<(usize, Vec<Tok>)>,
    idx: usize,
}

impl Lines {
    fn new(text: &str) -> Self {
        let rows = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, tokenize(l)))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Lines { rows, idx: 0 }
    }

    fn next_line(&mut self) -> Option<(usize, Vec<Tok>)> {
        let r = self.rows.get(self.idx).cloned()?;
        self.idx += 1;
        Some(r)
    }
}

/// Expect a body line inside a `{ ... }` block, or the closing brace.
enum BodyLine {
    Close,
    Line(Cursor),
}

fn next_body(lines: &mut Lines, opened_at: usize) -> Result<BodyLine, ModelError> {
    match lines.next_line() {
        None => err(opened_at, 1, "unclosed `{` block"),
        Some((no, toks)) => {
            if toks.len() == 1 && toks[0].text == "}" {
                Ok(BodyLine::Close)
            } else {
                Ok(BodyLine::Line(Cursor {
                    line: no,
                    toks,
                    pos: 0,
                }))
            }
        }
    }
}

fn check_fresh(doc: &ModelDocument, line: usize, col: usize, name: &str) -> Result<(), ModelError> {
    let taken = doc.charts.iter().any(|(n, _)| n == name)
        || doc.polys.iter().any(|(n, _, _)| n == name)
        || doc.spaces.iter().any(|(n, _)| n == name)
        || doc.linf.iter().any(|(n, _, _)| n == name)
        || doc.leibniz2.iter().any(|(n, _, _)| n == name)
        || doc.lwx.iter().any(|(n, _, _)| n == name);
    if taken {
        return err(line, col, format!("name `{name}` is already declared"));
    }
    Ok(())
}

/// Split a two-term space into (degree-0 labels, degree-(-1) labels).
fn two_term_labels(
    space: &GradedSpace,
    line: usize,
    col: usize,
) -> Result<(Vec<String>, Vec<String>), ModelError> {
    let degs = space.component_degrees();
    if degs.iter().any(|d| *d != 0 && *d != -1) || !degs.contains(&0) || !degs.contains(&-1) {
        return err(
            line,
            col,
            format!("space must have exactly degrees 0 and -1, found {degs:?}"),
        );
    }
    let l0 = space
        .indices_of_degree(0)
        .into_iter()
        .map(|i| space.label(i).to_string())
        .collect();
    let l1 = space
        .indices_of_degree(-1)
        .into_iter()
        .map(|i| space.label(i).to_string())
        .collect();
    Ok((l0, l1))
}

fn parse_chart_block(lines: &mut Lines, cur: &mut Cursor) -> Result<DarbouxChart, ModelError> {
    let degree = cur.expect_lit("degree").and_then(|_| cur.expect_u32("chart degree"))?;
    cur.expect_lit("{")?;
    cur.expect_end()?;
    let opened_at = cur.line;
    let mut decls: Vec<((String, u32), (String, u32))> = Vec::new();
    loop {
        match next_body(lines, opened_at)? {
            BodyLine::Close => break,
            BodyLine::Line(mut c) => {
                c.expect_lit("pair")?;
                let (_, pname) = c.expect_word("position name")?;
                let pdeg = c.expect_u32("position degree")?;
                let (_, mname) = c.expect_word("momentum name")?;
                let mdeg = c.expect_u32("momentum degree")?;
                c.expect_end()?;
                decls.push(((pname, pdeg), (mname, mdeg)));
            }
        }
    }
    let borrowed: Vec<((&str, u32), (&str, u32))> = decls
        .iter()
        .map(|((p, dp), (m, dm))| ((p.as_str(), *dp), (m.as_str(), *dm)))
        .collect();
    DarbouxChart::make(&borrowed, degree).map_err(|e| ModelError {
        line: opened_at,
        col: 1,
        msg: e.to_string(),
    })
}

fn parse_space_block(lines: &mut Lines, cur: &mut Cursor) -> Result<GradedSpace, ModelError> {
    cur.expect_lit("{")?;
    cur.expect_end()?;
    let opened_at = cur.line;
    let mut components: Vec<(i32, Vec<String>)> = Vec::new();
    loop {
        match next_body(lines, opened_at)? {
            BodyLine::Close => break,
            BodyLine::Line(mut c) => {
                c.expect_lit("degree")?;
                let d = c.expect_i32("integer degree")?;
                c.expect_lit(":")?;
                let mut labels = Vec::new();
                while c.peek().is_some() {
                    labels.push(c.expect_word("basis label")?.1);
                }
                if labels.is_empty() {
                    return err(c.line, c.end_col(), "expected at least one basis label");
                }
                components.push((d, labels));
            }
        }
    }
    GradedSpace::new(components).map_err(|e| ModelError {
        line: opened_at,
        col: 1,
        msg: e.to_string(),
    })
}

fn parse_linf_block(
    lines: &mut Lines,
    cur: &mut Cursor,
    space: &GradedSpace,
) -> Result<LInfStructure, ModelError> {
    cur.expect_lit("{")?;
    cur.expect_end()?;
    let opened_at = cur.line;
    let mut s = LInfStructure::new(space.clone());
    let mut pending: Vec<(usize, usize, Vec<usize>, Vec<(usize, Q)>)> = Vec::new();
    loop {
        match next_body(lines, opened_at)? {
            BodyLine::Close => break,
            BodyLine::Line(mut c) => {
                let (col, head) = c.expect_word("bracket name `l1`..`l4`")?;
                let k = match head.as_str() {
                    "l1" => 1,
                    "l2" => 2,
                    "l3" => 3,
                    "l4" => 4,
                    _ => return err(c.line, col, format!("unknown bracket `{head}`")),
                };
                let args = parse_args(&mut c)?;
                if args.len() != k {
                    return err(c.line, col, format!("`{head}` takes {k} arguments"));
                }
                let idx = resolve_labels(space, c.line, &args)?;
                c.expect_lit("=")?;
                let out = parse_combo(space, &mut c)?;
                c.expect_end()?;
                pending.push((c.line, k, idx, out));
            }
        }
    }
    let mut brackets: BTreeMap<usize, MultiBracket> = BTreeMap::new();
    for (line, k, idx, out) in pending {
        let b = brackets
            .entry(k)
            .or_insert_with(|| MultiBracket::new(k, 2 - k as i32, Symmetry::GradedAntisymmetric));
        b.set(space, &idx, &out).map_err(|e| ModelError {
            line,
            col: 1,
            msg: e.to_string(),
        })?;
    }
    for (k, b) in brackets {
        s.set_bracket(k, b).map_err(|e| ModelError {
            line: opened_at,
            col: 1,
            msg: e.to_string(),
        })?;
    }
    Ok(s)
}

/// Shared body parser for `leibniz2` and `lwx` blocks; `pairing` is filled
/// only when allowed (lwx).
fn parse_leibniz_body(
    lines: &mut Lines,
    cur: &mut Cursor,
    space: &GradedSpace,
    allow_pairing: bool,
) -> Result<LWXPointStructure, ModelError> {
    cur.expect_lit("{")?;
    cur.expect_end()?;
    let opened_at = cur.line;
    let (labels0, labels1) = two_term_labels(space, opened_at, 1)?;
    let mut w = LWXPointStructure::zero(labels0.clone(), labels1.clone());
    let find0 = |line: usize, col: usize, l: &str| {
        labels0
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| ModelError {
                line,
                col,
                msg: format!("`{l}` is not a degree-0 basis label"),
            })
    };
    let find1 = |line: usize, col: usize, l: &str| {
        labels1
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| ModelError {
                line,
                col,
                msg: format!("`{l}` is not a degree-(-1) basis label"),
            })
    };
    let combo0 = |line: usize, out: &[(usize, Q)], dim0: usize| -> Result<Vec<Q>, ModelError> {
        let mut v = vec![Q::zero(); dim0];
        for &(i, ref q) in out {
            if i >= dim0 {
                return err(line, 1, "output must lie in the degree-0 component");
            }
            v[i] = q.clone();
        }
        Ok(v)
    };
    let combo1 = |line: usize, out: &[(usize, Q)], dim0: usize, dim1: usize| -> Result<Vec<Q>, ModelError> {
        let mut v = vec![Q::zero(); dim1];
        for &(i, ref q) in out {
            if i < dim0 || i >= dim0 + dim1 {
                return err(line, 1, "output must lie in the degree-(-1) component");
            }
            v[i - dim0] = q.clone();
        }
        Ok(v)
    };
    let (p, q) = (w.dim0(), w.dim1());
    loop {
        match next_body(lines, opened_at)? {
            BodyLine::Close => break,
            BodyLine::Line(mut c) => {
                let (col, head) = c.expect_word("entry name")?;
                let args = parse_args(&mut c)?;
                c.expect_lit("=")?;
                let line = c.line;
                match head.as_str() {
                    "d" => {
                        if args.len() != 1 {
                            return err(line, col, "`d` takes 1 argument");
                        }
                        let m = find1(line, args[0].0, &args[0].1)?;
                        let out = parse_combo(space, &mut c)?;
                        w.leibniz.d[m] = combo0(line, &out, p)?;
                    }
                    "l2_00" => {
                        if args.len() != 2 {
                            return err(line, col, "`l2_00` takes 2 arguments");
                        }
                        let a = find0(line, args[0].0, &args[0].1)?;
                        let b = find0(line, args[1].0, &args[1].1)?;
                        let out = parse_combo(space, &mut c)?;
                        w.leibniz.l2_00[a][b] = combo0(line, &out, p)?;
                    }
                    "l2_01" => {
                        if args.len() != 2 {
                            return err(line, col, "`l2_01` takes 2 arguments");
                        }
                        let a = find0(line, args[0].0, &args[0].1)?;
                        let m = find1(line, args[1].0, &args[1].1)?;
                        let out = parse_combo(space, &mut c)?;
                        w.leibniz.l2_01[a][m] = combo1(line, &out, p, q)?;
                    }
                    "l2_10" => {
                        if args.len() != 2 {
                            return err(line, col, "`l2_10` takes 2 arguments");
                        }
                        let m = find1(line, args[0].0, &args[0].1)?;
                        let a = find0(line, args[1].0, &args[1].1)?;
                        let out = parse_combo(space, &mut c)?;
                        w.leibniz.l2_10[m][a] = combo1(line, &out, p, q)?;
                    }
                    "l3" => {
                        if args.len() != 3 {
                            return err(line, col, "`l3` takes 3 arguments");
                        }
                        let a = find0(line, args[0].0, &args[0].1)?;
                        let b = find0(line, args[1].0, &args[1].1)?;
                        let cc = find0(line, args[2].0, &args[2].1)?;
                        let out = parse_combo(space, &mut c)?;
                        w.leibniz.l3[a][b][cc] = combo1(line, &out, p, q)?;
                    }
                    "pair" if allow_pairing => {
                        if args.len() != 2 {
                            return err(line, col, "`pair` takes 2 arguments");
                        }
                        let a = find0(line, args[0].0, &args[0].1)?;
                        let m = find1(line, args[1].0, &args[1].1)?;
                        let (qcol, qtext) = c.expect_word("rational value")?;
                        w.pairing[a][m] = parse_q(line, qcol, &qtext)?;
                    }
                    _ => return err(line, col, format!("unknown entry `{head}`")),
                }
                c.expect_end()?;
            }
        }
    }
    Ok(w)
}

/// Parse a model document, or report the first error with line/column.
pub fn parse_model(text: &str) -> Result<ModelDocument, ModelError> {
    let mut doc = ModelDocument::default();
    let mut lines = Lines::new(text);
    while let Some((no, toks)) = lines.next_line() {
        let mut cur = Cursor {
            line: no,
            toks,
            pos: 0,
        };
        let (kcol, keyword) = cur.expect_word("block keyword")?;
        match keyword.as_str() {
            "chart" => {
                let (ncol, name) = cur.expect_word("chart name")?;
                check_fresh(&doc, no, ncol, &name)?;
                let chart = parse_chart_block(&mut lines, &mut cur)?;
                doc.charts.push((name, chart));
            }
            "poly" => {
                let (ncol, name) = cur.expect_word("polynomial name")?;
                check_fresh(&doc, no, ncol, &name)?;
                cur.expect_lit("on")?;
                let (ccol, cname) = cur.expect_word("chart name")?;
                let chart = doc
                    .chart(&cname)
                    .ok_or_else(|| ModelError {
                        line: no,
                        col: ccol,
                        msg: format!("unknown chart `{cname}`"),
                    })?
                    .clone();
                cur.expect_lit("=")?;
                let p = parse_poly_expr(&chart, &mut cur)?;
                doc.polys.push((name, cname, p));
            }
            "space" => {
                let (ncol, name) = cur.expect_word("space name")?;
                check_fresh(&doc, no, ncol, &name)?;
                let s = parse_space_block(&mut lines, &mut cur)?;
                doc.spaces.push((name, s));
            }
            "linf" => {
                let (ncol, name) = cur.expect_word("structure name")?;
                check_fresh(&doc, no, ncol, &name)?;
                cur.expect_lit("on")?;
                let (scol, sname) = cur.expect_word("space name")?;
                let space = doc
                    .space(&sname)
                    .ok_or_else(|| ModelError {
                        line: no,
                        col: scol,
                        msg: format!("unknown space `{sname}`"),
                    })?
                    .clone();
                let s = parse_linf_block(&mut lines, &mut cur, &space)?;
                doc.linf.push((name, sname, s));
            }
            "leibniz2" | "lwx" => {
                let (ncol, name) = cur.expect_word("structure name")?;
                check_fresh(&doc, no, ncol, &name)?;
                cur.expect_lit("on")?;
                let (scol, sname) = cur.expect_word("space name")?;
                let space = doc
                    .space(&sname)
                    .ok_or_else(|| ModelError {
                        line: no,
                        col: scol,
                        msg: format!("unknown space `{sname}`"),
                    })?
                    .clone();
                let is_lwx = keyword == "lwx";
                let w = parse_leibniz_body(&mut lines, &mut cur, &space, is_lwx)?;
                if is_lwx {
                    doc.lwx.push((name, sname, w));
                } else {
                    doc.leibniz2.push((name, sname, w.leibniz));
                }
            }
            "task" => {
                let task = parse_task(&doc, &mut cur)?;
                doc.tasks.push(task);
            }
            _ => return err(no, kcol, format!("unknown block keyword `{keyword}`")),
        }
    }
    Ok(doc)
}

fn parse_task(doc: &ModelDocument, cur: &mut Cursor) -> Result<Task, ModelError> {
    let line = cur.line;
    let need_poly = |col: usize, name: &str| -> Result<(), ModelError> {
        if doc.poly(name).is_none() {
            return err(line, col, format!("unknown polynomial `{name}`"));
        }
        Ok(())
    };
    let (vcol, verb) = cur.expect_word("task verb")?;
    let task = match verb.as_str() {
        "master" => {
            let (col, poly) = cur.expect_word("polynomial name")?;
            need_poly(col, &poly)?;
            Task::Master { poly }
        }
        "verify" => {
            let (kcol, kind) = cur.expect_word("structure kind")?;
            let (col, name) = cur.expect_word("structure name")?;
            let known = match kind.as_str() {
                "linf" => doc.linf(&name).is_some(),
                "leibniz2" => doc.leibniz2(&name).is_some(),
                "lwx" => doc.lwx(&name).is_some(),
                _ => return err(line, kcol, format!("unknown structure kind `{kind}`")),
            };
            if !known {
                return err(line, col, format!("unknown {kind} structure `{name}`"));
            }
            Task::Verify { kind, name }
        }
        "derive" => {
            let (kcol, kind) = cur.expect_word("derivation kind")?;
            if kind != "lie2algebroid" && kind != "lwx" {
                return err(line, kcol, format!("unknown derivation kind `{kind}`"));
            }
            let (col, poly) = cur.expect_word("polynomial name")?;
            need_poly(col, &poly)?;
            Task::Derive { kind, poly }
        }
        "skew" => {
            let (col, name) = cur.expect_word("lwx structure name")?;
            if doc.lwx(&name).is_none() {
                return err(line, col, format!("unknown lwx structure `{name}`"));
            }
            Task::Skew { name }
        }
        "double" => {
            let (kcol, kind) = cur.expect_word("double kind")?;
            match kind.as_str() {
                "semidirect" => {
                    let (col, name) = cur.expect_word("linf structure name")?;
                    if doc.linf(&name).is_none() {
                        return err(line, col, format!("unknown linf structure `{name}`"));
                    }
                    Task::Double {
                        kind,
                        args: vec![name],
                    }
                }
                "bialgebroid" => {
                    let (c1, mu) = cur.expect_word("mu polynomial name")?;
                    need_poly(c1, &mu)?;
                    let (c2, gamma) = cur.expect_word("gamma polynomial name")?;
                    need_poly(c2, &gamma)?;
                    Task::Double {
                        kind,
                        args: vec![mu, gamma],
                    }
                }
                _ => return err(line, kcol, format!("unknown double kind `{kind}`")),
            }
        }
        "check-bialgebroid" => {
            let (c1, mu) = cur.expect_word("mu polynomial name")?;
            need_poly(c1, &mu)?;
            let (c2, gamma) = cur.expect_word("gamma polynomial name")?;
            need_poly(c2, &gamma)?;
            Task::CheckBialgebroid { mu, gamma }
        }
        _ => return err(line, vcol, format!("unknown task verb `{verb}`")),
    };
    cur.expect_end()?;
    Ok(task)
}

fn fmt_combo(labels: &dyn Fn(usize) -> String, out: &[(usize, Q)]) -> String {
    if out.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (idx, q)) in out.iter().enumerate() {
        let neg = q.is_negative();
        let mag = q.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            let _ = write!(s, "{mag} ");
        }
        s.push_str(&labels(*idx));
    }
    s
}

fn dense_to_sparse(v: &[Q], offset: usize) -> Vec<(usize, Q)> {
    v.iter()
        .enumerate()
        .filter(|(_, q)| !q.is_zero())
        .map(|(i, q)| (i + offset, q.clone()))
        .collect()
}

/// Emit a document in canonical form; `parse_model(emit_document(d))`
/// reproduces `d`.
pub fn emit_document(doc: &ModelDocument) -> String {
    let mut s = String::new();
    for (name, chart) in &doc.charts {
        let _ = writeln!(s, "chart {name} degree {} {{", chart.n());
        for p in chart.pairs() {
            let env = chart.env();
            let (pv, mv) = (env.var(p.position), env.var(p.momentum));
            let _ = writeln!(s, "  pair {} {} {} {}", pv.name, pv.degree, mv.name, mv.degree);
        }
        s.push_str("}\n\n");
    }
    for (name, cname, p) in &doc.polys {
        let _ = writeln!(s, "poly {name} on {cname} = {p}");
        s.push('\n');
    }
    for (name, space) in &doc.spaces {
        let _ = writeln!(s, "space {name} {{");
        let mut degs = space.component_degrees();
        degs.sort_unstable();
        degs.dedup();
        degs.reverse();
        for d in degs {
            let labels: Vec<String> = space
                .indices_of_degree(d)
                .into_iter()
                .map(|i| space.label(i).to_string())
                .collect();
            let _ = writeln!(s, "  degree {d}: {}", labels.join(" "));
        }
        s.push_str("}\n\n");
    }
    for (name, sname, l) in &doc.linf {
        let _ = writeln!(s, "linf {name} on {sname} {{");
        let lab = |i: usize| l.space.label(i).to_string();
        for k in 1..=l.max_arity() {
            if let Some(b) = l.bracket(k) {
                for (keys, out) in b.entries() {
                    let heads: Vec<String> = keys.iter().map(|&i| lab(i)).collect();
                    let _ = writeln!(
                        s,
                        "  l{k}[{}] = {}",
                        heads.join(","),
                        fmt_combo(&lab, out)
                    );
                }
            }
        }
        s.push_str("}\n\n");
    }
    for (name, sname, l) in &doc.leibniz2 {
        let _ = writeln!(s, "leibniz2 {name} on {sname} {{");
        emit_leibniz_entries(&mut s, l);
        s.push_str("}\n\n");
    }
    for (name, sname, w) in &doc.lwx {
        let _ = writeln!(s, "lwx {name} on {sname} {{");
        emit_leibniz_entries(&mut s, &w.leibniz);
        for (a, row) in w.pairing.iter().enumerate() {
            for (m, q) in row.iter().enumerate() {
                if !q.is_zero() {
                    let _ = writeln!(
                        s,
                        "  pair[{},{}] = {q}",
                        w.leibniz.labels0[a], w.leibniz.labels1[m]
                    );
                }
            }
        }
        s.push_str("}\n\n");
    }
    for t in &doc.tasks {
        let line = match t {
            Task::Master { poly } => format!("task master {poly}"),
            Task::Verify { kind, name } => format!("task verify {kind} {name}"),
            Task::Derive { kind, poly } => format!("task derive {kind} {poly}"),
            Task::Skew { name } => format!("task skew {name}"),
            Task::Double { kind, args } => format!("task double {kind} {}", args.join(" ")),
            Task::CheckBialgebroid { mu, gamma } => format!("task check-bialgebroid {mu} {gamma}"),
        };
        let _ = writeln!(s, "{line}");
    }
    s
}

fn emit_leibniz_entries(s: &mut String, l: &Leibniz2Structure) {
    let lab0 = |i: usize| l.labels0[i].clone();
    let lab1 = |i: usize| l.labels1[i].clone();
    let all = |i: usize| {
        if i < l.dim0() {
            lab0(i)
        } else {
            lab1(i - l.dim0())
        }
    };
    let p = l.dim0();
    for (m, row) in l.d.iter().enumerate() {
        let out = dense_to_sparse(row, 0);
        if !out.is_empty() {
            let _ = writeln!(s, "  d[{}] = {}", lab1(m), fmt_combo(&all, &out));
        }
    }
    for (a, rows) in l.l2_00.iter().enumerate() {
        for (b, row) in rows.iter().enumerate() {
            let out = dense_to_sparse(row, 0);
            if !out.is_empty() {
                let _ = writeln!(s, "  l2_00[{},{}] = {}", lab0(a), lab0(b), fmt_combo(&all, &out));
            }
        }
    }
    for (a, rows) in l.l2_01.iter().enumerate() {
        for (m, row) in rows.iter().enumerate() {
            let out = dense_to_sparse(row, p);
            if !out.is_empty() {
                let _ = writeln!(s, "  l2_01[{},{}] = {}", lab0(a), lab1(m), fmt_combo(&all, &out));
            }
        }
    }
    for (m, rows) in l.l2_10.iter().enumerate() {
        for (a, row) in rows.iter().enumerate() {
            let out = dense_to_sparse(row, p);
            if !out.is_empty() {
                let _ = writeln!(s, "  l2_10[{},{}] = {}", lab1(m), lab0(a), fmt_combo(&all, &out));
            }
        }
    }
    for (a, rows) in l.l3.iter().enumerate() {
        for (b, cols) in rows.iter().enumerate() {
            for (c, row) in cols.iter().enumerate() {
                let out = dense_to_sparse(row, p);
                if !out.is_empty() {
                    let _ = writeln!(
                        s,
                        "  l3[{},{},{}] = {}",
                        lab0(a),
                        lab0(b),
                        lab0(c),
                        fmt_combo(&all, &out)
                    );
                }
            }
        }
    }
}

/// JSON-compatible structured records for machine consumption.
pub mod structured {
    use super::*;

    /// A polynomial as a list of (coefficient, monomial) records in canonical
    /// term order.
    pub fn poly(p: &GPoly) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = p
            .terms()
            .map(|(key, c)| {
                let one = GPoly::normalize(&Arc::clone(p.env()), &[(Q::one(), {
                    let mut w: Vec<VarId> = Vec::new();
                    for &(v, e) in &key.evens {
                        for _ in 0..e {
                            w.push(v);
                        }
                    }
                    w.extend(key.odds.iter().copied());
                    w
                })])
                .expect("monomial renormalizes");
                let mono = format!("{one}");
                json!({ "coeff": c.to_string(), "monomial": if mono == "1" { String::new() } else { mono } })
            })
            .collect();
        json!({ "terms": terms })
    }

    /// A verification report with per-violation residual records.
    pub fn report(r: &ViolationReport) -> serde_json::Value {
        let violations: Vec<serde_json::Value> = r
            .violations
            .iter()
            .map(|v| {
                json!({
                    "identity": v.identity,
                    "tuple": v.tuple,
                    "residual": v.residual.iter().map(|(l, q)| json!({"label": l, "value": q})).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "checked": r.checked, "pass": r.passes(), "violations": violations })
    }

    /// A named table of labelled polynomials (operator tables, residual
    /// decompositions).
    pub fn poly_table(title: &str, rows: &[(String, GPoly)]) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = rows
            .iter()
            .map(|(name, p)| json!({ "name": name, "poly": poly(p), "display": format!("{p}") }))
            .collect();
        json!({ "table": title, "entries": entries })
    }
}
