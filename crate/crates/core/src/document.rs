//! Text format for models and constraints.
//!
//! ```text
//! kind cpnet            # cpnet | cprnet | lptree
//!
//! [variables]
//! A: a1 a2
//! B: b1 b2
//!
//! [edges]               # optional; must match the CPT parents
//! A -> B
//!
//! [cpts]
//! A: a1 > a2
//! B | A=a1: b1 > b2
//! B | A=a2: partial b2 > b1
//!
//! [constraints]         # optional
//! {A=a1} -> {B=b2}
//! table A B: a1 b2, a2 b1
//! ```
//!
//! See `docs/format.md` for the full grammar.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use crate::cpnet::{CpNet, Cpt, PreferenceRow};
use crate::cprnet::{AriStatement, CprNet};
use crate::csp::{Constraint, ConstraintSet};
use crate::error::{Error, Result};
use crate::lptree::{LpNode, LpTree};
use crate::model::{PartialAssignment, ValueId, VarId, VariableSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    CpNet,
    CprNet,
    LpTree,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CpNet => "cpnet",
            Self::CprNet => "cprnet",
            Self::LpTree => "lptree",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cpnet" => Ok(Self::CpNet),
            "cprnet" => Ok(Self::CprNet),
            "lptree" => Ok(Self::LpTree),
            other => Err(format!("unknown model kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    CpNet(CpNet),
    CprNet(CprNet),
    LpTree(LpTree),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::CpNet(_) => ModelKind::CpNet,
            Self::CprNet(_) => ModelKind::CprNet,
            Self::LpTree(_) => ModelKind::LpTree,
        }
    }

    pub fn vars(&self) -> &Arc<VariableSet> {
        match self {
            Self::CpNet(n) => n.vars(),
            Self::CprNet(n) => n.vars(),
            Self::LpTree(t) => t.vars(),
        }
    }
}

/// A parsed model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDocument {
    pub model: Model,
    pub constraints: Option<ConstraintSet>,
}

impl ModelDocument {
    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }

    pub fn vars(&self) -> &Arc<VariableSet> {
        self.model.vars()
    }
}

#[derive(Clone, Copy)]
struct Line<'a> {
    no: usize,
    raw: &'a str,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn err(&self, at: &str, message: impl Into<String>) -> Error {
        // `at` is normally a slice of `raw`; fall back to a search otherwise
        let start = self.raw.as_ptr() as usize;
        let ptr = at.as_ptr() as usize;
        let col = if ptr >= start && ptr <= start + self.raw.len() {
            ptr - start + 1
        } else {
            self.raw.find(at).map_or(1, |i| i + 1)
        };
        Error::Parse {
            line: self.no,
            col,
            message: message.into(),
        }
    }

    fn whole(&self, message: impl Into<String>) -> Error {
        self.err(self.text, message)
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.')
}

/// Parses a model document.
pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            Line {
                no: i + 1,
                raw,
                text: body.trim(),
            }
        })
        .filter(|l| !l.text.is_empty())
        .collect();
    let Some(first) = lines.first() else {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            message: "empty document".into(),
        });
    };
    let kind = match first.text.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["kind", k] => k.parse::<ModelKind>().map_err(|m| first.whole(m))?,
        _ => return Err(first.whole("expected `kind <cpnet|cprnet|lptree>`")),
    };

    let mut sections: Vec<(Line, Vec<Line>)> = Vec::new();
    for line in &lines[1..] {
        if line.text.starts_with('[') && line.text.ends_with(']') && !line.text.contains(" node") {
            let name = line.text[1..line.text.len() - 1].trim();
            let allowed: &[&str] = match kind {
                ModelKind::CpNet => &["variables", "edges", "cpts", "constraints"],
                ModelKind::CprNet => &["variables", "edges", "cpts", "ari", "constraints"],
                ModelKind::LpTree => &["variables", "tree", "constraints"],
            };
            if !allowed.contains(&name) {
                return Err(line.whole(format!("section `[{name}]` is not valid in a {kind} document")));
            }
            if sections.iter().any(|(h, _)| h.text == line.text) {
                return Err(line.whole(format!("duplicate section `[{name}]`")));
            }
            sections.push((*line, Vec::new()));
        } else {
            match sections.last_mut() {
                Some((_, body)) => body.push(*line),
                None => return Err(line.whole("expected a section header")),
            }
        }
    }
    let section = |name: &str| -> Option<&Vec<Line>> {
        sections
            .iter()
            .find(|(h, _)| h.text[1..h.text.len() - 1].trim() == name)
            .map(|(_, b)| b)
    };
    let missing = |name: &str| Error::Parse {
        line: first.no,
        col: 1,
        message: format!("missing section `[{name}]`"),
    };

    let vars = Arc::new(parse_variables(section("variables").ok_or_else(|| missing("variables"))?)?);
    let model = match kind {
        ModelKind::CpNet | ModelKind::CprNet => {
            let cpts = parse_cpts(&vars, section("cpts").ok_or_else(|| missing("cpts"))?)?;
            let edges = section("edges").map(|b| parse_edges(&vars, b)).transpose()?;
            let net = CpNet::new(Arc::clone(&vars), cpts, edges.as_deref())?;
            if kind == ModelKind::CpNet {
                Model::CpNet(net)
            } else {
                let aris = section("ari").map(|b| parse_aris(&vars, b)).transpose()?;
                Model::CprNet(CprNet::new(net, aris.unwrap_or_default())?)
            }
        }
        ModelKind::LpTree => {
            let body = section("tree").ok_or_else(|| missing("tree"))?;
            let first = body.first().ok_or_else(|| missing("tree"))?;
            let mut pos = 0;
            let root = parse_node(&vars, body, &mut pos, first.text)?;
            if let Some(extra) = body.get(pos) {
                return Err(extra.whole("unexpected line after the root node"));
            }
            Model::LpTree(LpTree::new(Arc::clone(&vars), root)?)
        }
    };
    let constraints = section("constraints")
        .map(|b| parse_constraints(&vars, b))
        .transpose()?;
    Ok(ModelDocument { model, constraints })
}

fn parse_variables(body: &[Line]) -> Result<VariableSet> {
    let mut decls: Vec<(String, Vec<String>)> = Vec::new();
    for line in body {
        let (name, values) = line
            .text
            .split_once(':')
            .ok_or_else(|| line.whole("expected `Name: value value ...`"))?;
        let name = name.trim();
        if !is_name(name) {
            return Err(line.err(name, format!("invalid variable name `{name}`")));
        }
        if decls.iter().any(|(n, _)| n == name) {
            return Err(line.err(name, format!("duplicate variable `{name}`")));
        }
        let values: Vec<&str> = values.split_whitespace().collect();
        for (i, v) in values.iter().enumerate() {
            if !is_name(v) {
                return Err(line.err(v, format!("invalid value `{v}`")));
            }
            if values[..i].contains(v) {
                return Err(line.err(v, format!("duplicate value `{v}` in `{name}`")));
            }
        }
        if values.len() < 2 {
            return Err(line.whole(format!("`{name}` needs at least two values")));
        }
        decls.push((name.to_string(), values.iter().map(|v| v.to_string()).collect()));
    }
    VariableSet::new(decls)
}

fn var_ref(vars: &VariableSet, line: &Line, name: &str) -> Result<VarId> {
    vars.var_id(name)
        .map_err(|_| line.err(name, format!("unknown variable `{name}`")))
}

fn value_ref(vars: &VariableSet, line: &Line, var: VarId, value: &str) -> Result<ValueId> {
    vars.value_id(var, value).map_err(|_| {
        line.err(value, format!("`{value}` is not a value of `{}`", vars.name(var)))
    })
}

fn parse_edges(vars: &VariableSet, body: &[Line]) -> Result<Vec<(VarId, VarId)>> {
    body.iter()
        .map(|line| {
            let (a, b) = line
                .text
                .split_once("->")
                .ok_or_else(|| line.whole("expected `A -> B`"))?;
            Ok((var_ref(vars, line, a.trim())?, var_ref(vars, line, b.trim())?))
        })
        .collect()
}

fn parse_aris(vars: &VariableSet, body: &[Line]) -> Result<Vec<AriStatement>> {
    body.iter()
        .map(|line| {
            let (a, b) = line
                .text
                .split_once('>')
                .ok_or_else(|| line.whole("expected `A > B`"))?;
            Ok(AriStatement::new(
                var_ref(vars, line, a.trim())?,
                var_ref(vars, line, b.trim())?,
            ))
        })
        .collect()
}

/// `A=a1, B=b2`
fn parse_bindings(vars: &VariableSet, line: &Line, text: &str) -> Result<PartialAssignment> {
    let mut pa = PartialAssignment::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| line.err(item, "expected `Var=value`"))?;
        let var = var_ref(vars, line, name.trim())?;
        let value = value_ref(vars, line, var, value.trim())?;
        pa.bind(var, value)
            .map_err(|_| line.err(item, format!("`{}` bound twice", vars.name(var))))?;
    }
    Ok(pa)
}

/// `x1 > x2 > x3` or `partial x1 > x2, x1 > x3`.
fn parse_row(vars: &VariableSet, line: &Line, var: VarId, text: &str) -> Result<PreferenceRow> {
    let size = vars.domain_size(var);
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("partial").filter(|r| r.is_empty() || r.starts_with(char::is_whitespace)) {
        let mut pairs = Vec::new();
        for chain in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let values = chain
                .split('>')
                .map(|v| value_ref(vars, line, var, v.trim()))
                .collect::<Result<Vec<_>>>()?;
            if values.len() < 2 {
                return Err(line.err(chain, "expected `x > y`"));
            }
            pairs.extend(values.windows(2).map(|w| (w[0], w[1])));
        }
        return PreferenceRow::partial(pairs, size).map_err(|m| line.err(text, m));
    }
    let order = text
        .split('>')
        .map(|v| value_ref(vars, line, var, v.trim()))
        .collect::<Result<Vec<_>>>()?;
    PreferenceRow::total(order, size).map_err(|m| line.err(text, m))
}

/// `X: row` or `X | ctx: row`, with `X` omitted in tree tables.
fn split_row<'a>(line: &Line<'a>, text: &'a str) -> Result<(&'a str, &'a str, &'a str)> {
    let (head, row) = text
        .split_once(':')
        .ok_or_else(|| line.whole("expected `: <order>`"))?;
    let (name, ctx) = head.split_once('|').unwrap_or((head, ""));
    Ok((name.trim(), ctx, row))
}

fn parse_cpts(vars: &VariableSet, body: &[Line]) -> Result<Vec<Cpt>> {
    let mut grouped: Vec<(VarId, Line, Vec<(PartialAssignment, PreferenceRow)>)> = Vec::new();
    for line in body {
        let (name, ctx, row) = split_row(line, line.text)?;
        let var = var_ref(vars, line, name)?;
        let ctx = parse_bindings(vars, line, ctx)?;
        let row = parse_row(vars, line, var, row)?;
        match grouped.iter_mut().find(|(v, _, _)| *v == var) {
            Some((_, _, rows)) => rows.push((ctx, row)),
            None => grouped.push((var, *line, vec![(ctx, row)])),
        }
    }
    grouped
        .into_iter()
        .map(|(var, line, rows)| table(vars, &line, var, rows))
        .collect()
}

fn table(vars: &VariableSet, line: &Line, var: VarId, rows: Vec<(PartialAssignment, PreferenceRow)>) -> Result<Cpt> {
    let parents: Vec<VarId> = rows[0].0.vars().collect();
    if rows.iter().any(|(ctx, _)| !ctx.vars().eq(parents.iter().copied())) {
        return Err(line.whole(format!(
            "rows of `{}` condition on different variables",
            vars.name(var)
        )));
    }
    Cpt::new(vars, var, &parents, rows)
}

/// Parses the node whose header `node X {` is `header`, found on line `pos`.
fn parse_node(vars: &VariableSet, body: &[Line], pos: &mut usize, header: &str) -> Result<LpNode> {
    let line = body[*pos];
    let var = node_header(vars, &line, header)?;
    *pos += 1;
    let mut rows = Vec::new();
    let mut children: Vec<(BTreeSet<ValueId>, LpNode)> = Vec::new();
    loop {
        let next = body.get(*pos).ok_or_else(|| Error::Parse {
            line: body.last().map_or(1, |l| l.no),
            col: 1,
            message: format!("unclosed node `{}`", vars.name(var)),
        })?;
        let text = next.text;
        if text == "}" {
            *pos += 1;
            break;
        }
        if let Some(rest) = text.strip_prefix("cpt") {
            let (name, ctx, row) = split_row(next, rest)?;
            if !name.is_empty() {
                return Err(next.err(name, "expected `cpt:` or `cpt | ctx:`"));
            }
            rows.push((parse_bindings(vars, next, ctx)?, parse_row(vars, next, var, row)?));
            *pos += 1;
        } else if let Some(rest) = text.strip_prefix('[') {
            let (labels, child) = rest
                .split_once(']')
                .ok_or_else(|| next.whole("expected `[values] node X {`"))?;
            let labels = labels
                .split_whitespace()
                .map(|v| value_ref(vars, next, var, v))
                .collect::<Result<BTreeSet<_>>>()?;
            let child = parse_node(vars, body, pos, child.trim())?;
            children.push((labels, child));
        } else {
            return Err(next.whole("expected `cpt`, `[values] node X {` or `}`"));
        }
    }
    if rows.is_empty() {
        return Err(line.err(header, format!("node `{}` has no table", vars.name(var))));
    }
    let cpt = table(vars, &line, var, rows)?;
    Ok(LpNode::new(var, cpt, children))
}

fn node_header(vars: &VariableSet, line: &Line, text: &str) -> Result<VarId> {
    let name = text
        .strip_prefix("node")
        .and_then(|r| r.strip_suffix('{'))
        .map(str::trim)
        .ok_or_else(|| line.err(text, "expected `node X {`"))?;
    var_ref(vars, line, name)
}

fn parse_constraints(vars: &Arc<VariableSet>, body: &[Line]) -> Result<ConstraintSet> {
    let mut out = Vec::new();
    for line in body {
        let text = line.text;
        let c = if let Some(rest) = text.strip_prefix("table") {
            let (names, tuples) = rest
                .split_once(':')
                .ok_or_else(|| line.whole("expected `table A B: a1 b1, ...`"))?;
            let scope = names
                .split_whitespace()
                .map(|n| var_ref(vars, line, n))
                .collect::<Result<Vec<_>>>()?;
            let mut allowed = Vec::new();
            for tuple in tuples.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let values: Vec<&str> = tuple.split_whitespace().collect();
                if values.len() != scope.len() {
                    return Err(line.err(tuple, "tuple length differs from the scope"));
                }
                allowed.push(
                    scope
                        .iter()
                        .zip(values)
                        .map(|(v, x)| value_ref(vars, line, *v, x))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            Constraint::new(vars, scope, allowed).map_err(|e| line.whole(e.to_string()))?
        } else {
            let (lhs, op, rhs) = if let Some((l, r)) = text.split_once("<->") {
                (l, "<->", Some(r))
            } else if let Some((l, r)) = text.split_once("->") {
                (l, "->", Some(r))
            } else {
                (text, "", None)
            };
            let literal = |part: &str| -> Result<(VarId, ValueId)> {
                let inner = part
                    .trim()
                    .strip_prefix('{')
                    .and_then(|p| p.strip_suffix('}'))
                    .ok_or_else(|| line.err(part.trim(), "expected `{X=x}`"))?;
                let pa = parse_bindings(vars, line, inner)?;
                match pa.iter().collect::<Vec<_>>().as_slice() {
                    [one] => Ok(*one),
                    _ => Err(line.err(inner, "expected exactly one binding")),
                }
            };
            let x = literal(lhs)?;
            let made = match (op, rhs) {
                ("<->", Some(r)) => Constraint::iff(vars, x, literal(r)?),
                ("->", Some(r)) => Constraint::implies(vars, x, literal(r)?),
                _ => Constraint::unary(vars, x.0, x.1),
            };
            made.map_err(|e| line.whole(e.to_string()))?
        };
        out.push(c);
    }
    ConstraintSet::new(Arc::clone(vars), out)
}

/// Prints a document in canonical form. Constraints are written as tables.
pub fn print_model(doc: &ModelDocument) -> String {
    let vars = doc.vars();
    let mut out = String::new();
    let _ = writeln!(out, "kind {}\n\n[variables]", doc.kind());
    for v in vars.ids() {
        let _ = writeln!(out, "{}: {}", vars.name(v), vars.variable(v).domain().join(" "));
    }
    let net = match &doc.model {
        Model::CpNet(n) => Some(n),
        Model::CprNet(n) => Some(n.base()),
        Model::LpTree(_) => None,
    };
    if let Some(net) = net {
        let edges = net.edges();
        if !edges.is_empty() {
            out.push_str("\n[edges]\n");
            for (a, b) in edges {
                let _ = writeln!(out, "{} -> {}", vars.name(a), vars.name(b));
            }
        }
        out.push_str("\n[cpts]\n");
        for v in net.scope() {
            let cpt = net.cpt(*v);
            for (ctx, row) in cpt.keyed_rows(vars) {
                let _ = writeln!(out, "{}{}: {}", vars.name(*v), context(vars, &ctx), row_text(vars, *v, row));
            }
        }
    }
    if let Model::CprNet(n) = &doc.model {
        if !n.aris().is_empty() {
            out.push_str("\n[ari]\n");
            for a in n.aris() {
                let _ = writeln!(out, "{} > {}", vars.name(a.more_important), vars.name(a.less_important));
            }
        }
    }
    if let Model::LpTree(t) = &doc.model {
        out.push_str("\n[tree]\n");
        if let Some(root) = t.root() {
            print_node(vars, root, "", 0, &mut out);
        }
    }
    if let Some(cs) = &doc.constraints {
        out.push_str("\n[constraints]\n");
        for c in cs.constraints() {
            out.push_str(&constraint_text(vars, c));
            out.push('\n');
        }
    }
    out
}

fn context(vars: &VariableSet, ctx: &PartialAssignment) -> String {
    if ctx.is_empty() {
        String::new()
    } else {
        format!(" | {}", vars.format(ctx).replace(',', ", "))
    }
}

pub fn row_text(vars: &VariableSet, var: VarId, row: &PreferenceRow) -> String {
    match row {
        PreferenceRow::Total(order) => order
            .iter()
            .map(|v| vars.value_name(var, *v))
            .collect::<Vec<_>>()
            .join(" > "),
        PreferenceRow::Partial(pairs) => {
            let body = pairs
                .iter()
                .map(|(a, b)| format!("{} > {}", vars.value_name(var, *a), vars.value_name(var, *b)))
                .collect::<Vec<_>>()
                .join(", ");
            if body.is_empty() {
                "partial".into()
            } else {
                format!("partial {body}")
            }
        }
    }
}

pub fn constraint_text(vars: &VariableSet, c: &Constraint) -> String {
    let names: Vec<&str> = c.scope().iter().map(|v| vars.name(*v)).collect();
    let tuples: Vec<String> = c
        .allowed()
        .iter()
        .map(|t| {
            c.scope()
                .iter()
                .zip(t)
                .map(|(v, x)| vars.value_name(*v, *x))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    if tuples.is_empty() {
        format!("table {}:", names.join(" "))
    } else {
        format!("table {}: {}", names.join(" "), tuples.join(", "))
    }
}

fn print_node(vars: &VariableSet, node: &LpNode, label: &str, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let _ = writeln!(out, "{pad}{label}node {} {{", vars.name(node.var()));
    for (ctx, row) in node.cpt().keyed_rows(vars) {
        let _ = writeln!(out, "{pad}  cpt{}: {}", context(vars, &ctx), row_text(vars, node.var(), row));
    }
    for (labels, child) in node.children() {
        let names: Vec<&str> = labels.iter().map(|v| vars.value_name(node.var(), *v)).collect();
        print_node(vars, child, &format!("[{}] ", names.join(" ")), depth + 1, out);
    }
    let _ = writeln!(out, "{pad}}}");
}
