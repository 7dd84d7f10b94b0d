//! Acyclic CP-nets: conditional preference tables, improving flips, the
//! exhaustive dominance oracle, ordering queries and the forward sweep.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Assignments, Outcome, PartialAssignment, ValueId, VarId, VariableSet};

/// One row of a CPT: a strict order over the variable's domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PreferenceRow {
    /// Ranking of every domain value, best first.
    Total(Vec<ValueId>),
    /// Transitively closed set of `(better, worse)` pairs.
    Partial(BTreeSet<(ValueId, ValueId)>),
}

impl PreferenceRow {
    /// A total row; `order` must list every value of a domain of size `size` once.
    pub fn total(order: Vec<ValueId>, size: usize) -> std::result::Result<Self, String> {
        if order.len() != size {
            return Err(format!("row lists {} values, domain has {size}", order.len()));
        }
        let mut seen = vec![false; size];
        for v in &order {
            if v.0 >= size || std::mem::replace(&mut seen[v.0], true) {
                return Err("row must list every value exactly once".into());
            }
        }
        Ok(Self::Total(order))
    }

    /// A partial row from `(better, worse)` pairs, closed transitively.
    pub fn partial(
        pairs: impl IntoIterator<Item = (ValueId, ValueId)>,
        size: usize,
    ) -> std::result::Result<Self, String> {
        let mut better = vec![vec![false; size]; size];
        for (a, b) in pairs {
            if a.0 >= size || b.0 >= size {
                return Err("value out of range".into());
            }
            better[a.0][b.0] = true;
        }
        for k in 0..size {
            for i in 0..size {
                if better[i][k] {
                    for j in 0..size {
                        if better[k][j] {
                            better[i][j] = true;
                        }
                    }
                }
            }
        }
        if (0..size).any(|i| better[i][i]) {
            return Err("partial row is cyclic".into());
        }
        let mut set = BTreeSet::new();
        for (i, row) in better.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                if *b {
                    set.insert((ValueId(i), ValueId(j)));
                }
            }
        }
        Ok(Self::Partial(set))
    }

    pub fn is_total(&self) -> bool {
        matches!(self, Self::Total(_))
    }

    /// True if the row strictly prefers `a` to `b`.
    pub fn prefers(&self, a: ValueId, b: ValueId) -> bool {
        match self {
            Self::Total(order) => {
                if a == b {
                    return false;
                }
                for v in order {
                    if *v == a {
                        return true;
                    }
                    if *v == b {
                        return false;
                    }
                }
                false
            }
            Self::Partial(pairs) => pairs.contains(&(a, b)),
        }
    }

    /// The value preferred to every other, if there is one.
    pub fn best(&self, size: usize) -> Option<ValueId> {
        match self {
            Self::Total(order) => order.first().copied(),
            Self::Partial(pairs) => (0..size)
                .map(ValueId)
                .find(|v| (0..size).all(|w| w == v.0 || pairs.contains(&(*v, ValueId(w))))),
        }
    }

    /// Values the row ranks strictly above `v`.
    pub fn better_than(&self, v: ValueId, size: usize) -> Vec<ValueId> {
        (0..size)
            .map(ValueId)
            .filter(|w| self.prefers(*w, v))
            .collect()
    }

    pub fn reversed(&self) -> Self {
        match self {
            Self::Total(order) => Self::Total(order.iter().rev().copied().collect()),
            Self::Partial(pairs) => Self::Partial(pairs.iter().map(|(a, b)| (*b, *a)).collect()),
        }
    }

    /// True if the two rows order every pair of distinct values oppositely.
    pub fn is_reverse_of(&self, other: &Self, size: usize) -> bool {
        (0..size).all(|a| {
            (0..size).all(|b| {
                a == b || self.prefers(ValueId(a), ValueId(b)) == other.prefers(ValueId(b), ValueId(a))
                    && self.prefers(ValueId(a), ValueId(b)) != other.prefers(ValueId(a), ValueId(b))
            })
        })
    }
}

/// Conditional preference table of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpt {
    var: VarId,
    parents: Vec<VarId>,
    radices: Vec<usize>,
    rows: Vec<PreferenceRow>,
}

impl Cpt {
    /// Builds a CPT from rows keyed by parent assignments. Every assignment
    /// to `parents` must appear exactly once.
    pub fn new(
        vars: &VariableSet,
        var: VarId,
        parents: &[VarId],
        rows: Vec<(PartialAssignment, PreferenceRow)>,
    ) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidCpt {
            var: vars.name(var).to_string(),
            reason,
        };
        let mut parents = parents.to_vec();
        parents.sort();
        if parents.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("repeated parent".into()));
        }
        if parents.contains(&var) {
            return Err(invalid("a variable cannot be its own parent".into()));
        }
        let radices: Vec<usize> = parents.iter().map(|p| vars.domain_size(*p)).collect();
        let count: usize = radices.iter().product();
        let mut slots: Vec<Option<PreferenceRow>> = vec![None; count];
        let size = vars.domain_size(var);
        for (ctx, row) in rows {
            if ctx.len() != parents.len() || !parents.iter().all(|p| ctx.is_bound(*p)) {
                return Err(invalid("row context must bind exactly the parents".into()));
            }
            check_row(&row, size).map_err(invalid)?;
            let idx = index_of(&parents, &radices, &ctx);
            if slots[idx].replace(row).is_some() {
                return Err(invalid(format!(
                    "duplicate row for {}",
                    vars.format(&ctx)
                )));
            }
        }
        let rows: Option<Vec<PreferenceRow>> = slots.into_iter().collect();
        let rows = rows.ok_or_else(|| invalid("missing row for some parent assignment".into()))?;
        Ok(Self {
            var,
            parents,
            radices,
            rows,
        })
    }

    /// CPT without parents.
    pub fn unconditional(vars: &VariableSet, var: VarId, row: PreferenceRow) -> Result<Self> {
        Self::new(vars, var, &[], vec![(PartialAssignment::new(), row)])
    }

    /// Builds a CPT from rows listed in canonical parent-assignment order.
    pub fn from_rows(
        vars: &VariableSet,
        var: VarId,
        parents: &[VarId],
        rows: Vec<PreferenceRow>,
    ) -> Result<Self> {
        let mut sorted = parents.to_vec();
        sorted.sort();
        let keyed = Assignments::new(vars, &sorted)
            .map(Outcome::into_assignment)
            .zip(rows)
            .collect();
        Self::new(vars, var, &sorted, keyed)
    }

    pub fn var(&self) -> VarId {
        self.var
    }

    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    /// Rows in canonical parent-assignment order (first parent slowest).
    pub fn rows(&self) -> &[PreferenceRow] {
        &self.rows
    }

    /// Parent assignments paired with their rows, in canonical order.
    pub fn keyed_rows(&self, vars: &VariableSet) -> Vec<(PartialAssignment, &PreferenceRow)> {
        Assignments::new(vars, &self.parents)
            .map(Outcome::into_assignment)
            .zip(self.rows.iter())
            .collect()
    }

    /// The row selected by `ctx`, which must bind every parent.
    pub fn row(&self, ctx: &PartialAssignment) -> &PreferenceRow {
        &self.rows[index_of(&self.parents, &self.radices, ctx)]
    }

    pub fn try_row(&self, vars: &VariableSet, ctx: &PartialAssignment) -> Result<&PreferenceRow> {
        if let Some(p) = self.parents.iter().find(|p| !ctx.is_bound(**p)) {
            return Err(Error::UnboundVariable(vars.name(*p).to_string()));
        }
        Ok(self.row(ctx))
    }

    /// Keeps the rows consistent with `pa` and drops bound parents.
    pub fn condition(&self, vars: &VariableSet, pa: &PartialAssignment) -> Self {
        let kept: Vec<VarId> = self
            .parents
            .iter()
            .copied()
            .filter(|p| !pa.is_bound(*p))
            .collect();
        if kept.len() == self.parents.len() {
            return self.clone();
        }
        let radices: Vec<usize> = kept.iter().map(|p| vars.domain_size(*p)).collect();
        let rows = Assignments::new(vars, &kept)
            .map(|o| {
                let mut ctx = o.into_assignment();
                for p in &self.parents {
                    if let Some(v) = pa.get(*p) {
                        ctx.set(*p, v);
                    }
                }
                self.row(&ctx).clone()
            })
            .collect();
        Self {
            var: self.var,
            parents: kept,
            radices,
            rows,
        }
    }

    pub fn is_total(&self) -> bool {
        self.rows.iter().all(PreferenceRow::is_total)
    }
}

fn check_row(row: &PreferenceRow, size: usize) -> std::result::Result<(), String> {
    match row {
        PreferenceRow::Total(order) => PreferenceRow::total(order.clone(), size).map(|_| ()),
        PreferenceRow::Partial(pairs) => {
            let closed = PreferenceRow::partial(pairs.iter().copied(), size)?;
            if &closed != row {
                return Err("partial row is not transitively closed".into());
            }
            Ok(())
        }
    }
}

pub(crate) fn index_of(vars: &[VarId], radices: &[usize], ctx: &PartialAssignment) -> usize {
    vars.iter().zip(radices).fold(0, |acc, (v, r)| {
        acc * r + ctx.get(*v).expect("context binds every parent").0
    })
}

/// Kind of dependency an arc expresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcClass {
    PartialDependency,
    TotalDependency,
}

/// Answer of the ordering query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingAnswer {
    /// The first outcome is certainly not entailed to be preferred.
    NotPreferred,
    Unknown,
}

/// An acyclic CP-net over the variables in `scope`.
///
/// Restricted nets keep the global variable ids of the original; their
/// scope is the set of variables left unbound.
#[derive(Debug, Clone)]
pub struct CpNet {
    vars: Arc<VariableSet>,
    scope: Vec<VarId>,
    cpts: Vec<Option<Cpt>>,
    topo: Vec<VarId>,
}

impl PartialEq for CpNet {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.scope == other.scope && self.cpts == other.cpts
    }
}

impl Eq for CpNet {}

impl CpNet {
    /// Builds a net over every variable of `vars`. If `edges` is given it
    /// must equal the parent sets declared by the CPTs.
    pub fn new(
        vars: Arc<VariableSet>,
        cpts: Vec<Cpt>,
        edges: Option<&[(VarId, VarId)]>,
    ) -> Result<Self> {
        let mut slots: Vec<Option<Cpt>> = vec![None; vars.len()];
        for cpt in cpts {
            if !vars.contains(cpt.var) {
                return Err(Error::UnknownVariable(format!("#{}", cpt.var.0)));
            }
            let var = cpt.var;
            if slots[var.0].replace(cpt).is_some() {
                return Err(Error::DuplicateCpt(vars.name(var).to_string()));
            }
        }
        if let Some(missing) = slots.iter().position(Option::is_none) {
            return Err(Error::MissingCpt(vars.name(VarId(missing)).to_string()));
        }
        let scope = vars.all();
        let mut net = Self {
            vars,
            scope,
            cpts: slots,
            topo: Vec::new(),
        };
        if let Some(edges) = edges {
            let declared: BTreeSet<(VarId, VarId)> = edges.iter().copied().collect();
            let implied: BTreeSet<(VarId, VarId)> = net.edges().into_iter().collect();
            if declared != implied || declared.len() != edges.len() {
                return Err(Error::EdgeMismatch);
            }
        }
        net.topo = net.compute_topo()?;
        Ok(net)
    }

    fn compute_topo(&self) -> Result<Vec<VarId>> {
        let mut indeg: HashMap<VarId, usize> =
            self.scope.iter().map(|v| (*v, self.cpt(*v).parents.len())).collect();
        let mut order = Vec::with_capacity(self.scope.len());
        let mut ready: BTreeSet<VarId> =
            indeg.iter().filter(|(_, d)| **d == 0).map(|(v, _)| *v).collect();
        let children = self.children_map();
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for c in &children[&v] {
                let d = indeg.get_mut(c).expect("child in scope");
                *d -= 1;
                if *d == 0 {
                    ready.insert(*c);
                }
            }
        }
        if order.len() != self.scope.len() {
            let stuck = self
                .scope
                .iter()
                .find(|v| !order.contains(v))
                .expect("some variable is left");
            return Err(Error::CyclicNet(self.vars.name(*stuck).to_string()));
        }
        Ok(order)
    }

    fn children_map(&self) -> HashMap<VarId, Vec<VarId>> {
        let mut map: HashMap<VarId, Vec<VarId>> =
            self.scope.iter().map(|v| (*v, Vec::new())).collect();
        for v in &self.scope {
            for p in &self.cpt(*v).parents {
                map.get_mut(p).expect("parent in scope").push(*v);
            }
        }
        map
    }

    pub fn vars(&self) -> &Arc<VariableSet> {
        &self.vars
    }

    /// Active variables, in declaration order.
    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn in_scope(&self, var: VarId) -> bool {
        self.cpts.get(var.0).is_some_and(Option::is_some)
    }

    /// CPT of an active variable.
    pub fn cpt(&self, var: VarId) -> &Cpt {
        self.cpts[var.0].as_ref().expect("variable is in scope")
    }

    pub fn cpts(&self) -> impl Iterator<Item = &Cpt> {
        self.cpts.iter().flatten()
    }

    pub fn parents(&self, var: VarId) -> &[VarId] {
        &self.cpt(var).parents
    }

    pub fn children(&self, var: VarId) -> Vec<VarId> {
        self.scope
            .iter()
            .copied()
            .filter(|c| self.parents(*c).contains(&var))
            .collect()
    }

    /// Arcs `(parent, child)`, sorted.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        let mut edges: Vec<(VarId, VarId)> = self
            .cpts()
            .flat_map(|c| c.parents.iter().map(move |p| (*p, c.var)))
            .collect();
        edges.sort();
        edges
    }

    pub fn ancestors(&self, var: VarId) -> BTreeSet<VarId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<VarId> = self.parents(var).to_vec();
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend_from_slice(self.parents(v));
            }
        }
        seen
    }

    /// The lexicographically smallest topological order of the active variables.
    pub fn topological_order(&self) -> &[VarId] {
        &self.topo
    }

    fn outcome(&self, pa: &PartialAssignment) -> Result<()> {
        if pa.len() != self.scope.len() || !self.scope.iter().all(|v| pa.is_bound(*v)) {
            return Err(Error::IncompleteOutcome);
        }
        Ok(())
    }

    /// Checks that `o` is an outcome over this net's scope.
    pub fn check_outcome(&self, o: &Outcome) -> Result<()> {
        self.outcome(o)
    }

    fn first_difference(&self, o1: &PartialAssignment, o2: &PartialAssignment) -> Option<VarId> {
        self.topo.iter().copied().find(|v| o1.get(*v) != o2.get(*v))
    }

    /// Classifies the arc `(x, y)`.
    ///
    /// The arc is totally dependent when, for every assignment to the other
    /// parents of `y`, any two values of `x` select rows that order every
    /// pair of `y` values oppositely. Since three or more values cannot be
    /// pairwise opposite, a totally dependent arc needs a binary parent.
    pub fn classify_arc(&self, x: VarId, y: VarId) -> Result<ArcClass> {
        if !self.in_scope(x) || !self.in_scope(y) || !self.parents(y).contains(&x) {
            return Err(Error::UnknownArc(
                self.vars.name(x).to_string(),
                self.vars.name(y).to_string(),
            ));
        }
        let cpt = self.cpt(y);
        if !cpt.is_total() {
            return Err(Error::PartialRowUnsupported(self.vars.name(y).to_string()));
        }
        let others: Vec<VarId> = cpt.parents.iter().copied().filter(|p| *p != x).collect();
        let size = self.vars.domain_size(y);
        for p in Assignments::new(&self.vars, &others) {
            let rows: Vec<&PreferenceRow> = self
                .vars
                .values(x)
                .map(|xv| {
                    let mut ctx = p.assignment().clone();
                    ctx.set(x, xv);
                    cpt.row(&ctx)
                })
                .collect();
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    if !rows[i].is_reverse_of(rows[j], size) {
                        return Ok(ArcClass::PartialDependency);
                    }
                }
            }
        }
        Ok(ArcClass::TotalDependency)
    }

    /// True iff every arc is totally dependent. Nets with partial rows
    /// on a child of some arc are never totally dependent.
    pub fn is_totally_dependent(&self) -> bool {
        self.edges()
            .into_iter()
            .all(|(x, y)| matches!(self.classify_arc(x, y), Ok(ArcClass::TotalDependency)))
    }

    fn require_total_dependency(&self) -> Result<()> {
        for (x, y) in self.edges() {
            if !matches!(self.classify_arc(x, y), Ok(ArcClass::TotalDependency)) {
                return Err(Error::NotTotallyDependent(
                    self.vars.name(x).to_string(),
                    self.vars.name(y).to_string(),
                ));
            }
        }
        Ok(())
    }

    /// Importance relations induced by a totally dependent net: its arcs.
    pub fn induced_importance(&self) -> Result<Vec<(VarId, VarId)>> {
        self.require_total_dependency()?;
        Ok(self.edges())
    }

    /// Unordered variable pairs joined by no arc, as `(smaller, larger)`.
    pub fn nop_pairs(&self) -> Result<Vec<(VarId, VarId)>> {
        self.require_total_dependency()?;
        Ok(self.unlinked_pairs())
    }

    pub(crate) fn unlinked_pairs(&self) -> Vec<(VarId, VarId)> {
        let edges: BTreeSet<(VarId, VarId)> = self.edges().into_iter().collect();
        let mut out = Vec::new();
        for (i, a) in self.scope.iter().enumerate() {
            for b in &self.scope[i + 1..] {
                if !edges.contains(&(*a, *b)) && !edges.contains(&(*b, *a)) {
                    out.push((*a, *b));
                }
            }
        }
        out
    }

    /// Outcomes one improving flip away from `o`.
    pub fn improving_flips(&self, o: &Outcome) -> Vec<Outcome> {
        let mut out = Vec::new();
        for &var in &self.scope {
            let current = o.get(var).expect("outcome binds the scope");
            let row = self.cpt(var).row(o);
            for better in row.better_than(current, self.vars.domain_size(var)) {
                out.push(o.with(var, better));
            }
        }
        out
    }

    /// True if `to` is one improving flip away from `from`.
    pub fn is_improving_flip(&self, from: &PartialAssignment, to: &PartialAssignment) -> bool {
        let diff: Vec<VarId> = self
            .scope
            .iter()
            .copied()
            .filter(|v| from.get(*v) != to.get(*v))
            .collect();
        match diff.as_slice() {
            [var] => {
                let (Some(a), Some(b)) = (to.get(*var), from.get(*var)) else {
                    return false;
                };
                self.cpt(*var).row(from).prefers(a, b)
            }
            _ => false,
        }
    }

    /// Exhaustive dominance: true iff `o1` is reachable from `o2` by
    /// improving flips. Equal outcomes give false.
    pub fn dominance_oracle(&self, o1: &Outcome, o2: &Outcome) -> bool {
        self.shortest_flip_sequence(o1, o2).is_some()
    }

    /// A shortest improving flipping sequence from `o2` to `o1`, both ends
    /// included, found by breadth-first search.
    pub fn shortest_flip_sequence(&self, o1: &Outcome, o2: &Outcome) -> Option<Vec<Outcome>> {
        if o1 == o2 {
            return None;
        }
        let mut pred: HashMap<Outcome, Outcome> = HashMap::new();
        let mut queue = VecDeque::from([o2.clone()]);
        while let Some(cur) = queue.pop_front() {
            for next in self.improving_flips(&cur) {
                if next == *o2 || pred.contains_key(&next) {
                    continue;
                }
                pred.insert(next.clone(), cur.clone());
                if next == *o1 {
                    let mut path = vec![next];
                    while let Some(p) = pred.get(path.last().expect("non-empty")) {
                        path.push(p.clone());
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(next);
            }
        }
        None
    }

    /// Certifies non-dominance from the first differing variable in the
    /// fixed topological order.
    pub fn ordering_query(&self, o1: &Outcome, o2: &Outcome) -> Result<OrderingAnswer> {
        self.outcome(o1)?;
        self.outcome(o2)?;
        let x = self.first_difference(o1, o2).ok_or(Error::EqualOutcomes)?;
        let row = self.cpt(x).row(o1);
        let (a, b) = (o1.get(x).expect("bound"), o2.get(x).expect("bound"));
        Ok(if row.prefers(a, b) {
            OrderingAnswer::Unknown
        } else {
            OrderingAnswer::NotPreferred
        })
    }

    /// The optimal outcome: each variable, in topological order, takes its
    /// best value given its parents.
    pub fn forward_sweep(&self) -> Result<Outcome> {
        let mut pa = PartialAssignment::new();
        for &var in &self.topo {
            let best = self
                .cpt(var)
                .row(&pa)
                .best(self.vars.domain_size(var))
                .ok_or_else(|| Error::PartialRowUnsupported(self.vars.name(var).to_string()))?;
            pa.set(var, best);
        }
        Ok(Outcome::from_assignment_unchecked(pa))
    }

    /// Removes the variables bound by `pa` and restricts the remaining
    /// CPTs. The bound variables must include all of their ancestors.
    pub fn restrict(&self, pa: &PartialAssignment) -> Result<Self> {
        for (var, value) in pa.iter() {
            if !self.in_scope(var) {
                return Err(Error::UnknownVariable(format!("#{}", var.0)));
            }
            self.vars.check_value(var, value)?;
            if let Some(p) = self.parents(var).iter().find(|p| !pa.is_bound(**p)) {
                return Err(Error::NotAncestorClosed(self.vars.name(*p).to_string()));
            }
        }
        Ok(self.condition(pa))
    }

    /// Like [`CpNet::restrict`] without the ancestor check. Bindings of
    /// variables outside the scope are ignored.
    pub fn condition(&self, pa: &PartialAssignment) -> Self {
        if !pa.vars().any(|v| self.in_scope(v)) {
            return self.clone();
        }
        let cpts: Vec<Option<Cpt>> = self
            .cpts
            .iter()
            .map(|c| match c {
                Some(c) if !pa.is_bound(c.var) => Some(c.condition(&self.vars, pa)),
                _ => None,
            })
            .collect();
        let scope: Vec<VarId> = self.scope.iter().copied().filter(|v| !pa.is_bound(*v)).collect();
        let mut net = Self {
            vars: Arc::clone(&self.vars),
            scope,
            cpts,
            topo: Vec::new(),
        };
        net.topo = net.compute_topo().expect("a subgraph of a DAG is acyclic");
        net
    }

    /// Every outcome over the scope, in canonical order.
    pub fn outcomes(&self) -> Assignments {
        Assignments::new(&self.vars, &self.scope)
    }
}

/// All-pairs dominance by exhaustive reachability; for bulk checks on
/// small nets.
#[derive(Debug, Clone)]
pub struct FlipGraph {
    outcomes: Vec<Outcome>,
    index: HashMap<Outcome, usize>,
    /// `reach[i][j]`: outcome `j` is reachable from outcome `i`.
    reach: Vec<Vec<bool>>,
}

impl FlipGraph {
    pub fn new(net: &CpNet, limit: u128) -> Result<Self> {
        let count = net.vars.product_size(&net.scope);
        if count > limit {
            return Err(Error::TooManyOutcomes { count, limit });
        }
        let outcomes: Vec<Outcome> = net.outcomes().collect();
        let index: HashMap<Outcome, usize> = outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        let succ: Vec<Vec<usize>> = outcomes
            .iter()
            .map(|o| net.improving_flips(o).iter().map(|n| index[n]).collect())
            .collect();
        let n = outcomes.len();
        let reach = (0..n)
            .map(|start| {
                let mut seen = vec![false; n];
                let mut stack = succ[start].clone();
                while let Some(i) = stack.pop() {
                    if !std::mem::replace(&mut seen[i], true) {
                        stack.extend_from_slice(&succ[i]);
                    }
                }
                seen
            })
            .collect();
        Ok(Self {
            outcomes,
            index,
            reach,
        })
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// Same answer as [`CpNet::dominance_oracle`].
    pub fn dominates(&self, o1: &Outcome, o2: &Outcome) -> bool {
        self.reach[self.index[o2]][self.index[o1]]
    }

    pub fn dominates_idx(&self, i1: usize, i2: usize) -> bool {
        self.reach[i2][i1]
    }
}
