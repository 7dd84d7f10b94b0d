//! Constrained optimization over CPR-nets and LP-trees, and dominance
//! testing over acyclic CP-nets.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::cpnet::{CpNet, PreferenceRow};
use crate::cprnet::CprNet;
use crate::csp::{Consistency, ConstraintSet, PropagationResult};
use crate::error::{Error, Result};
use crate::lptree::LpTree;
use crate::model::{Assignments, Outcome, PartialAssignment, ValueId, VarId, VariableSet};

/// One step of a constrained search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    /// `var = value` is tried under the assignment built so far.
    Branch { depth: usize, var: VarId, value: ValueId },
    /// Propagation emptied the domain of `var`.
    Wipeout { depth: usize, var: VarId },
    /// Assignment induced by the current branch.
    Induced { depth: usize, assignment: PartialAssignment },
    /// A complete assignment failed the final constraint check.
    Rejected { depth: usize, assignment: PartialAssignment },
    Solution { outcome: Outcome },
}

impl TraceEvent {
    pub fn describe(&self, vars: &VariableSet) -> String {
        match self {
            Self::Branch { depth, var, value } => {
                format!("{}try {}={}", "  ".repeat(*depth), vars.name(*var), vars.value_name(*var, *value))
            }
            Self::Wipeout { depth, var } => format!("{}wipeout on {}", "  ".repeat(*depth), vars.name(*var)),
            Self::Induced { depth, assignment } => {
                format!("{}induced {}", "  ".repeat(*depth), vars.format(assignment))
            }
            Self::Rejected { depth, assignment } => {
                format!("{}rejected {}", "  ".repeat(*depth), vars.format(assignment))
            }
            Self::Solution { outcome } => format!("solution {}", vars.format(outcome)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: Option<Outcome>,
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverOptions {
    pub consistency: Consistency,
}

fn same_vars(a: &VariableSet, cs: &ConstraintSet) -> Result<()> {
    if a != cs.vars().as_ref() {
        return Err(Error::ModelMismatch);
    }
    Ok(())
}

/// The model a search walks down: something that can name the variable
/// to instantiate next, rank its values, and shrink by an assignment.
trait SearchModel: Sized {
    fn is_done(&self) -> bool;
    fn next_var(&self) -> Result<VarId>;
    fn row(&self, var: VarId, k: &PartialAssignment) -> Vec<ValueId>;
    fn shrink(&self, k: &PartialAssignment) -> Self;
}

impl SearchModel for CprNet {
    fn is_done(&self) -> bool {
        self.scope().is_empty()
    }

    fn next_var(&self) -> Result<VarId> {
        match self.sources().as_slice() {
            [x] => Ok(*x),
            other => Err(Error::NoUniqueSource(other.len())),
        }
    }

    fn row(&self, var: VarId, k: &PartialAssignment) -> Vec<ValueId> {
        ranked(self.base().cpt(var).row(k))
    }

    fn shrink(&self, k: &PartialAssignment) -> Self {
        self.condition(k)
    }
}

impl SearchModel for LpTree {
    fn is_done(&self) -> bool {
        self.is_empty()
    }

    fn next_var(&self) -> Result<VarId> {
        Ok(self.root().expect("non-empty tree").var())
    }

    fn row(&self, _var: VarId, k: &PartialAssignment) -> Vec<ValueId> {
        ranked(self.root().expect("non-empty tree").cpt().row(k))
    }

    fn shrink(&self, k: &PartialAssignment) -> Self {
        self.reduce_unchecked(k)
    }
}

fn ranked(row: &PreferenceRow) -> Vec<ValueId> {
    match row {
        PreferenceRow::Total(order) => order.clone(),
        PreferenceRow::Partial(_) => unreachable!("search models have total rows"),
    }
}

struct Search<'a> {
    original: &'a ConstraintSet,
    options: SolverOptions,
    trace: Vec<TraceEvent>,
}

impl Search<'_> {
    /// `cs` has been strengthened by every binding of `k`.
    fn run<M: SearchModel>(
        &mut self,
        model: &M,
        cs: &ConstraintSet,
        k: &PartialAssignment,
        depth: usize,
    ) -> Result<Option<Outcome>> {
        if model.is_done() {
            return Ok(self.finish(k, depth));
        }
        let x = model.next_var()?;
        for xi in model.row(x, k) {
            self.trace.push(TraceEvent::Branch { depth, var: x, value: xi });
            let ci = cs.strengthen(x, xi)?;
            let induced = match ci.propagate_with(self.options.consistency) {
                PropagationResult::Wipeout(var) => {
                    self.trace.push(TraceEvent::Wipeout { depth, var });
                    continue;
                }
                PropagationResult::Consistent { induced, .. } => induced,
            };
            let mut known: Vec<VarId> = k.vars().collect();
            known.push(x);
            let new = induced.without(&known);
            self.trace.push(TraceEvent::Induced {
                depth,
                assignment: new.clone(),
            });
            let next_cs = ci.strengthen_all(&new)?;
            let sub = model.shrink(&induced);
            let found = if sub.is_done() {
                self.finish(&induced, depth)
            } else {
                self.run(&sub, &next_cs, &induced, depth + 1)?
            };
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn finish(&mut self, k: &PartialAssignment, depth: usize) -> Option<Outcome> {
        if k.len() == self.original.vars().len() && self.original.check_assignment(k) {
            let outcome = Outcome::from_assignment_unchecked(k.clone());
            self.trace.push(TraceEvent::Solution {
                outcome: outcome.clone(),
            });
            Some(outcome)
        } else {
            self.trace.push(TraceEvent::Rejected {
                depth,
                assignment: k.clone(),
            });
            None
        }
    }
}

fn solve<M: SearchModel>(model: &M, cs: &ConstraintSet, options: SolverOptions) -> Result<SolveResult> {
    let mut search = Search {
        original: cs,
        options,
        trace: Vec::new(),
    };
    let start = cs.fixed().clone();
    let outcome = search.run(&model.shrink(&start), cs, &start, 0)?;
    Ok(SolveResult {
        outcome,
        trace: search.trace,
    })
}

/// The most preferred outcome of `net` satisfying `cs`.
pub fn search_cpr(net: &CprNet, cs: &ConstraintSet) -> Result<SolveResult> {
    search_cpr_with(net, cs, SolverOptions::default())
}

pub fn search_cpr_with(net: &CprNet, cs: &ConstraintSet, options: SolverOptions) -> Result<SolveResult> {
    same_vars(net.vars(), cs)?;
    if net.scope().len() != net.vars().len() {
        return Err(Error::ModelMismatch);
    }
    solve(net, cs, options)
}

/// The lexicographically best outcome of `tree` satisfying `cs`.
pub fn search_lp(tree: &LpTree, cs: &ConstraintSet) -> Result<SolveResult> {
    search_lp_with(tree, cs, SolverOptions::default())
}

pub fn search_lp_with(tree: &LpTree, cs: &ConstraintSet, options: SolverOptions) -> Result<SolveResult> {
    same_vars(tree.vars(), cs)?;
    if tree.scope().len() != tree.vars().len() {
        return Err(Error::ModelMismatch);
    }
    solve(tree, cs, options)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Yes => "yes",
            Self::No => "no",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceVerdict {
    pub answer: Answer,
    /// Improving flipping sequence from the second outcome to the first.
    pub witness: Option<Vec<Outcome>>,
}

/// Default limit on recursive dominance sub-calls per query.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DtOptions {
    /// Maximum number of recursive sub-calls per query.
    pub budget: u64,
    /// When the first differing variable has three or more values, also
    /// search for sequences that move it through several intermediate
    /// values. Without this the search can miss such sequences.
    pub complete_chains: bool,
}

impl Default for DtOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            complete_chains: true,
        }
    }
}

type Path = Vec<PartialAssignment>;
type MemoKey = (PartialAssignment, PartialAssignment, PartialAssignment);

/// Recursive dominance testing over an acyclic CP-net.
///
/// Sub-queries are memoized per tester, keyed by the bound context and the
/// two partial outcomes; answers are pure so the memo survives across
/// queries on the same net.
pub struct DominanceTester<'a> {
    net: &'a CpNet,
    options: DtOptions,
    calls: u64,
    memo: HashMap<MemoKey, Option<Path>>,
    nets: HashMap<PartialAssignment, CpNet>,
}

impl<'a> DominanceTester<'a> {
    pub fn new(net: &'a CpNet, options: DtOptions) -> Self {
        Self {
            net,
            options,
            calls: 0,
            memo: HashMap::new(),
            nets: HashMap::new(),
        }
    }

    /// Sub-calls made by the last query.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Does `o1` dominate `o2`?
    pub fn test(&mut self, o1: &Outcome, o2: &Outcome) -> Result<DominanceVerdict> {
        self.net.check_outcome(o1)?;
        self.net.check_outcome(o2)?;
        if o1 == o2 {
            return Err(Error::EqualOutcomes);
        }
        self.calls = 0;
        let path = self.dt(&PartialAssignment::new(), o1, o2)?;
        Ok(match path {
            Some(p) => DominanceVerdict {
                answer: Answer::Yes,
                witness: Some(p.into_iter().map(Outcome::from_assignment_unchecked).collect()),
            },
            None => DominanceVerdict {
                answer: Answer::No,
                witness: None,
            },
        })
    }

    fn sub_net(&mut self, ctx: &PartialAssignment) -> CpNet {
        if ctx.is_empty() {
            return self.net.clone();
        }
        if let Some(n) = self.nets.get(ctx) {
            return n.clone();
        }
        let n = self.net.condition(ctx);
        self.nets.insert(ctx.clone(), n.clone());
        n
    }

    /// A flipping sequence from `o2` to `o1` in the net conditioned on
    /// `ctx`; both outcomes range over that net's scope.
    fn dt(&mut self, ctx: &PartialAssignment, o1: &PartialAssignment, o2: &PartialAssignment) -> Result<Option<Path>> {
        self.calls += 1;
        if self.calls > self.options.budget {
            return Err(Error::BudgetExhausted(self.options.budget));
        }
        let key = (ctx.clone(), o1.clone(), o2.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let found = self.dt_uncached(ctx, o1, o2)?;
        self.memo.insert(key, found.clone());
        Ok(found)
    }

    fn dt_uncached(
        &mut self,
        ctx: &PartialAssignment,
        o1: &PartialAssignment,
        o2: &PartialAssignment,
    ) -> Result<Option<Path>> {
        let net = self.sub_net(ctx);
        let Some(x) = net.topological_order().iter().copied().find(|v| o1.get(*v) != o2.get(*v)) else {
            return Ok(None);
        };
        let (x1, x2) = (o1.get(x).expect("bound"), o2.get(x).expect("bound"));
        let row = net.cpt(x).row(o1).clone();
        if !row.prefers(x1, x2) {
            return Ok(None);
        }
        let mut prefix_vars: Vec<VarId> = net.ancestors(x).into_iter().collect();
        let r = o1.restrict_to(&prefix_vars);
        prefix_vars.push(x);
        let s1 = o1.without(&prefix_vars);
        let s2 = o2.without(&prefix_vars);
        let with = |v: ValueId| {
            let mut p = r.clone();
            p.set(x, v);
            p
        };
        let lift = |path: &Path, v: ValueId| -> Path {
            path.iter()
                .map(|s| s.merge(&with(v)).expect("disjoint"))
                .collect()
        };
        if s1 == s2 {
            return Ok(Some(vec![o2.clone(), o1.clone()]));
        }
        let ctx_of = |v: ValueId| ctx.merge(&with(v)).expect("disjoint");
        let (ctx1, ctx2) = (ctx_of(x1), ctx_of(x2));

        // stay at x1 after one flip
        if let Some(p) = self.dt(&ctx1, &s1, &s2)? {
            let mut path = vec![o2.clone()];
            path.extend(lift(&p, x1));
            return Ok(Some(path));
        }
        // move at x2, flip last
        if let Some(p) = self.dt(&ctx2, &s1, &s2)? {
            let mut path = lift(&p, x2);
            path.push(o1.clone());
            return Ok(Some(path));
        }
        let size = net.vars().domain_size(x);
        let between: Vec<ValueId> = (0..size)
            .map(ValueId)
            .filter(|v| row.prefers(x1, *v) && row.prefers(*v, x2))
            .collect();
        for &xi in &between {
            if let Some(p) = self.dt(&ctx_of(xi), &s1, &s2)? {
                let mut path = vec![o2.clone()];
                path.extend(lift(&p, xi));
                path.push(o1.clone());
                return Ok(Some(path));
            }
        }
        let rest: Vec<VarId> = net.scope().iter().copied().filter(|v| !prefix_vars.contains(v)).collect();
        let middles: Vec<PartialAssignment> = Assignments::new(net.vars(), &rest)
            .map(Outcome::into_assignment)
            .filter(|s3| *s3 != s1 && *s3 != s2)
            .collect();
        for s3 in &middles {
            let Some(p2) = self.dt(&ctx2, s3, &s2)? else {
                continue;
            };
            if let Some(p1) = self.dt(&ctx1, &s1, s3)? {
                let mut path = lift(&p2, x2);
                path.extend(lift(&p1, x1));
                return Ok(Some(path));
            }
        }
        if !self.options.complete_chains || between.is_empty() {
            return Ok(None);
        }

        // Breadth-first search over (value of x, rest of the outcome):
        // x only climbs towards x1, and between its flips the rest moves
        // inside the net conditioned on x's current value.
        let mut values = between.clone();
        values.push(x1);
        values.push(x2);
        let mut suffixes: Vec<PartialAssignment> = middles;
        suffixes.push(s1.clone());
        suffixes.push(s2.clone());
        let start = (x2, s2.clone());
        let mut pred: HashMap<(ValueId, PartialAssignment), ((ValueId, PartialAssignment), Path)> = HashMap::new();
        let mut seen: HashSet<(ValueId, PartialAssignment)> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some((v, s)) = queue.pop_front() {
            let mut next: Vec<((ValueId, PartialAssignment), Path)> = Vec::new();
            for &w in &values {
                if row.prefers(w, v) {
                    let mut step = vec![s.merge(&with(v)).expect("disjoint")];
                    step.push(s.merge(&with(w)).expect("disjoint"));
                    next.push(((w, s.clone()), step));
                }
            }
            for t in &suffixes {
                if *t != s {
                    if let Some(p) = self.dt(&ctx_of(v), t, &s)? {
                        next.push(((v, t.clone()), lift(&p, v)));
                    }
                }
            }
            for (state, step) in next {
                if seen.insert(state.clone()) {
                    pred.insert(state.clone(), ((v, s.clone()), step));
                    if state == (x1, s1.clone()) {
                        return Ok(Some(unwind(&pred, state, &start)));
                    }
                    queue.push_back(state);
                }
            }
        }
        Ok(None)
    }
}

fn unwind(
    pred: &HashMap<(ValueId, PartialAssignment), ((ValueId, PartialAssignment), Path)>,
    mut state: (ValueId, PartialAssignment),
    start: &(ValueId, PartialAssignment),
) -> Path {
    let mut steps: Vec<&Path> = Vec::new();
    while state != *start {
        let (prev, step) = &pred[&state];
        steps.push(step);
        state = prev.clone();
    }
    let mut path: Path = Vec::new();
    for step in steps.into_iter().rev() {
        let skip = usize::from(!path.is_empty());
        path.extend(step.iter().skip(skip).cloned());
    }
    path
}

/// Dominance test with a fresh tester and default options.
pub fn acyclic_cp_dt(net: &CpNet, o1: &Outcome, o2: &Outcome) -> Result<DominanceVerdict> {
    DominanceTester::new(net, DtOptions::default()).test(o1, o2)
}

/// True if consecutive outcomes of `path` are improving flips in `net`.
pub fn is_flip_sequence(net: &CpNet, path: &[Outcome]) -> bool {
    path.windows(2).all(|w| net.is_improving_flip(&w[0], &w[1]))
}
