//! Extensional hard constraints, strengthening by literals, propagation
//! and the brute-force feasibility oracle.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Assignments, Outcome, PartialAssignment, ValueId, VarId, VariableSet};

pub const MAX_ARITY: usize = 3;

/// A table of allowed value tuples over one to three variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    scope: Vec<VarId>,
    allowed: BTreeSet<Vec<ValueId>>,
}

impl Constraint {
    /// An empty table is accepted and forbids everything.
    pub fn new(
        vars: &VariableSet,
        scope: Vec<VarId>,
        allowed: impl IntoIterator<Item = Vec<ValueId>>,
    ) -> Result<Self> {
        if scope.is_empty() || scope.len() > MAX_ARITY {
            return Err(Error::InvalidConstraint(format!(
                "arity must be between 1 and {MAX_ARITY}, got {}",
                scope.len()
            )));
        }
        for (i, v) in scope.iter().enumerate() {
            if !vars.contains(*v) {
                return Err(Error::UnknownVariable(format!("#{}", v.0)));
            }
            if scope[..i].contains(v) {
                return Err(Error::InvalidConstraint(format!(
                    "`{}` appears twice in the scope",
                    vars.name(*v)
                )));
            }
        }
        let allowed: BTreeSet<Vec<ValueId>> = allowed.into_iter().collect();
        for tuple in &allowed {
            if tuple.len() != scope.len() {
                return Err(Error::InvalidConstraint("tuple length differs from the scope".into()));
            }
            for (var, value) in scope.iter().zip(tuple) {
                vars.check_value(*var, *value)?;
            }
        }
        Ok(Self { scope, allowed })
    }

    /// `{X=x} -> {Y=y}`: forbids `X=x` together with any other value of `Y`.
    pub fn implies(vars: &VariableSet, (x, xv): (VarId, ValueId), (y, yv): (VarId, ValueId)) -> Result<Self> {
        Self::pair(vars, x, y, |a, b| a != xv || b == yv)
    }

    /// `{X=x} <-> {Y=y}`.
    pub fn iff(vars: &VariableSet, (x, xv): (VarId, ValueId), (y, yv): (VarId, ValueId)) -> Result<Self> {
        Self::pair(vars, x, y, |a, b| (a == xv) == (b == yv))
    }

    /// `{X=x}`.
    pub fn unary(vars: &VariableSet, x: VarId, xv: ValueId) -> Result<Self> {
        Self::new(vars, vec![x], [vec![xv]])
    }

    fn pair(vars: &VariableSet, x: VarId, y: VarId, keep: impl Fn(ValueId, ValueId) -> bool) -> Result<Self> {
        if !vars.contains(x) || !vars.contains(y) {
            return Err(Error::UnknownVariable(format!("#{}", x.0.max(y.0))));
        }
        let tuples: Vec<Vec<ValueId>> = vars
            .values(x)
            .flat_map(|a| vars.values(y).map(move |b| (a, b)))
            .filter(|(a, b)| keep(*a, *b))
            .map(|(a, b)| vec![a, b])
            .collect();
        Self::new(vars, vec![x, y], tuples)
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    /// Allowed tuples, in lexicographic order.
    pub fn allowed(&self) -> &BTreeSet<Vec<ValueId>> {
        &self.allowed
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    /// True if `pa`, which must bind the scope, is allowed.
    pub fn allows(&self, pa: &PartialAssignment) -> bool {
        match pa.values_of(&self.scope) {
            Some(tuple) => self.allowed.contains(&tuple),
            None => false,
        }
    }

    fn strengthen(&self, var: VarId, value: ValueId) -> Self {
        match self.scope.iter().position(|v| *v == var) {
            None => self.clone(),
            Some(i) => Self {
                scope: self.scope.clone(),
                allowed: self.allowed.iter().filter(|t| t[i] == value).cloned().collect(),
            },
        }
    }
}

/// How much inference `propagate` performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Consistency {
    /// No inference beyond the fixed literals.
    None,
    /// Unary tables plus one pass over the constraints of each fixed
    /// variable, newest first; no chaining.
    ForwardChecking,
    /// Generalized arc consistency to a fixpoint.
    #[default]
    Gac,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropagationResult {
    Consistent {
        /// The fixed literals plus every variable left with one value.
        induced: PartialAssignment,
        /// Surviving values per variable, indexed by variable.
        domains: Vec<Vec<ValueId>>,
    },
    Wipeout(VarId),
}

/// Constraints over a variable set together with the literals they have
/// been strengthened by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    vars: Arc<VariableSet>,
    constraints: Vec<Constraint>,
    fixed: PartialAssignment,
    /// Fixed variables in the order they were committed.
    history: Vec<VarId>,
}

impl ConstraintSet {
    pub fn new(vars: Arc<VariableSet>, constraints: Vec<Constraint>) -> Result<Self> {
        for c in &constraints {
            if let Some(v) = c.scope.iter().find(|v| !vars.contains(**v)) {
                return Err(Error::UnknownVariable(format!("#{}", v.0)));
            }
        }
        Ok(Self {
            vars,
            constraints,
            fixed: PartialAssignment::new(),
            history: Vec::new(),
        })
    }

    pub fn empty(vars: Arc<VariableSet>) -> Self {
        Self {
            vars,
            constraints: Vec::new(),
            fixed: PartialAssignment::new(),
            history: Vec::new(),
        }
    }

    pub fn vars(&self) -> &Arc<VariableSet> {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn fixed(&self) -> &PartialAssignment {
        &self.fixed
    }

    pub fn check_outcome(&self, o: &Outcome) -> bool {
        self.check_assignment(o)
    }

    /// Like [`ConstraintSet::check_outcome`] for any assignment binding
    /// every constrained variable.
    pub fn check_assignment(&self, pa: &PartialAssignment) -> bool {
        pa.extends(&self.fixed) && self.constraints.iter().all(|c| c.allows(pa))
    }

    /// Adds `var = value` to the fixed literals and filters every table
    /// mentioning `var`.
    pub fn strengthen(&self, var: VarId, value: ValueId) -> Result<Self> {
        self.vars.check_value(var, value)?;
        match self.fixed.get(var) {
            Some(v) if v == value => return Ok(self.clone()),
            Some(_) => return Err(Error::ConflictingBinding(self.vars.name(var).to_string())),
            None => {}
        }
        let mut fixed = self.fixed.clone();
        fixed.set(var, value);
        let mut history = self.history.clone();
        history.push(var);
        Ok(Self {
            vars: Arc::clone(&self.vars),
            constraints: self.constraints.iter().map(|c| c.strengthen(var, value)).collect(),
            fixed,
            history,
        })
    }

    /// Strengthens by every binding of `pa`, in variable order.
    pub fn strengthen_all(&self, pa: &PartialAssignment) -> Result<Self> {
        let mut cs = self.clone();
        for (var, value) in pa.iter() {
            cs = cs.strengthen(var, value)?;
        }
        Ok(cs)
    }

    /// Generalized arc consistency.
    pub fn propagate(&self) -> PropagationResult {
        self.propagate_with(Consistency::Gac)
    }

    pub fn propagate_with(&self, level: Consistency) -> PropagationResult {
        let mut domains: Vec<Vec<bool>> = self
            .vars
            .ids()
            .map(|v| match self.fixed.get(v) {
                Some(x) => (0..self.vars.domain_size(v)).map(|i| i == x.0).collect(),
                None => vec![true; self.vars.domain_size(v)],
            })
            .collect();
        let outcome = match level {
            Consistency::None => Ok(()),
            Consistency::ForwardChecking => self.forward_check(&mut domains),
            Consistency::Gac => self.arc_consistency(&mut domains),
        };
        match outcome {
            Err(var) => PropagationResult::Wipeout(var),
            Ok(()) => {
                let mut induced = self.fixed.clone();
                for v in self.vars.ids() {
                    let alive: Vec<usize> = (0..domains[v.0].len()).filter(|i| domains[v.0][*i]).collect();
                    if let [only] = alive.as_slice() {
                        induced.set(v, ValueId(*only));
                    }
                }
                PropagationResult::Consistent {
                    induced,
                    domains: domains
                        .iter()
                        .map(|d| (0..d.len()).filter(|i| d[*i]).map(ValueId).collect())
                        .collect(),
                }
            }
        }
    }

    /// Revises the domains of `targets` against `c`. Returns the first
    /// emptied variable, or whether anything changed.
    fn revise(
        &self,
        c: &Constraint,
        targets: &[VarId],
        domains: &mut [Vec<bool>],
    ) -> std::result::Result<Vec<VarId>, VarId> {
        let live: Vec<&Vec<ValueId>> = c
            .allowed
            .iter()
            .filter(|t| c.scope.iter().zip(t.iter()).all(|(v, x)| domains[v.0][x.0]))
            .collect();
        let mut changed = Vec::new();
        for &var in targets {
            let i = c.scope.iter().position(|v| *v == var).expect("target in scope");
            let supported: BTreeSet<usize> = live.iter().map(|t| t[i].0).collect();
            let dom = &mut domains[var.0];
            let mut shrunk = false;
            for (x, alive) in dom.iter_mut().enumerate() {
                if *alive && !supported.contains(&x) {
                    *alive = false;
                    shrunk = true;
                }
            }
            if !dom.iter().any(|a| *a) {
                return Err(var);
            }
            if shrunk {
                changed.push(var);
            }
        }
        Ok(changed)
    }

    fn forward_check(&self, domains: &mut [Vec<bool>]) -> std::result::Result<(), VarId> {
        for c in self.constraints.iter().filter(|c| c.scope.len() == 1) {
            self.revise(c, &c.scope, domains)?;
        }
        for &x in self.history.iter().rev() {
            for c in self.constraints.iter().filter(|c| c.scope.contains(&x)) {
                let mut targets: Vec<VarId> = c.scope.iter().copied().filter(|v| *v != x).collect();
                if c.is_empty() {
                    targets.push(x);
                }
                self.revise(c, &targets, domains)?;
            }
        }
        Ok(())
    }

    fn arc_consistency(&self, domains: &mut [Vec<bool>]) -> std::result::Result<(), VarId> {
        let trigger = self.history.last().copied();
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut queued = vec![false; self.constraints.len()];
        let touches = |i: &usize| trigger.is_some_and(|t| self.constraints[*i].scope.contains(&t));
        let (first, rest): (Vec<usize>, Vec<usize>) = (0..self.constraints.len()).partition(touches);
        for i in first.into_iter().chain(rest) {
            queue.push_back(i);
            queued[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            queued[i] = false;
            let c = &self.constraints[i];
            // the trigger goes last so that a wipeout names the variable it hits
            let (mut targets, last): (Vec<VarId>, Vec<VarId>) =
                c.scope.iter().copied().partition(|v| Some(*v) != trigger);
            targets.extend(last);
            for var in self.revise(c, &targets, domains)? {
                for (j, other) in self.constraints.iter().enumerate() {
                    if j != i && !queued[j] && other.scope.contains(&var) {
                        queue.push_back(j);
                        queued[j] = true;
                    }
                }
            }
        }
        Ok(())
    }

    /// Every outcome satisfying the constraints and the fixed literals,
    /// in canonical order.
    pub fn solve_all(&self, limit: u128) -> Result<Vec<Outcome>> {
        let all = self.vars.all();
        let count = self.vars.product_size(&all);
        if count > limit {
            return Err(Error::TooManyOutcomes { count, limit });
        }
        Ok(Assignments::new(&self.vars, &all)
            .filter(|o| self.check_outcome(o))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cprnet::DEFAULT_OUTCOME_LIMIT;
    use crate::fixtures;
    use proptest::prelude::*;

    fn lit(cs: &ConstraintSet, text: &str) -> (VarId, ValueId) {
        let pa = cs.vars().parse_assignment(text).unwrap();
        let first = pa.iter().next().unwrap();
        first
    }

    fn induced(cs: &ConstraintSet, r: &PropagationResult) -> String {
        match r {
            PropagationResult::Consistent { induced, .. } => cs.vars().format(induced),
            PropagationResult::Wipeout(v) => format!("wipeout {}", cs.vars().name(*v)),
        }
    }

    fn outcome(cs: &ConstraintSet, text: &str) -> Outcome {
        Outcome::new(&cs.vars().all(), cs.vars().parse_assignment(text).unwrap()).unwrap()
    }

    #[test]
    fn check_outcome_examples() {
        let cs = fixtures::csp_example();
        assert!(cs.check_outcome(&outcome(&cs, "A=a1,B=b1,C=c1")));
        assert!(!cs.check_outcome(&outcome(&cs, "A=a1,B=b1,C=c2")));
        let free = ConstraintSet::empty(cs.vars().clone());
        assert!(free.check_outcome(&outcome(&cs, "A=a2,B=b1,C=c2")));
    }

    #[test]
    fn sugar_tables() {
        let vars = VariableSet::new([("X", vec!["x1", "x2", "x3"]), ("Y", vec!["y1", "y2"])]).unwrap();
        let c = Constraint::implies(&vars, (VarId(0), ValueId(0)), (VarId(1), ValueId(1))).unwrap();
        assert_eq!(c.allowed().len(), 5);
        assert!(!c.allowed().contains(&vec![ValueId(0), ValueId(0)]));
        let c = Constraint::iff(&vars, (VarId(0), ValueId(0)), (VarId(1), ValueId(1))).unwrap();
        let expected: BTreeSet<Vec<ValueId>> = [
            vec![ValueId(0), ValueId(1)],
            vec![ValueId(1), ValueId(0)],
            vec![ValueId(2), ValueId(0)],
        ]
        .into();
        assert_eq!(c.allowed(), &expected);
        assert!(Constraint::new(&vars, vec![VarId(0), VarId(0)], []).is_err());
        assert!(Constraint::new(&vars, vec![], []).is_err());
        assert!(Constraint::new(&vars, vec![VarId(1)], [vec![ValueId(2)]]).is_err());
    }

    #[test]
    fn strengthen_examples() {
        let c1 = fixtures::constrained_cpr().1;
        let a1 = c1.strengthen(VarId(0), ValueId(0)).unwrap();
        // {A=a1} -> {B=b2} now only allows B=b2, {A=a1} <-> {D=d2} only D=d2
        let only = |c: &Constraint| c.allowed().iter().map(|t| t[1]).collect::<BTreeSet<_>>();
        assert_eq!(only(&a1.constraints()[0]), [ValueId(1)].into());
        assert_eq!(only(&a1.constraints()[1]), [ValueId(1)].into());
        assert_eq!(a1.strengthen(VarId(0), ValueId(0)).unwrap(), a1);
        assert!(matches!(a1.strengthen(VarId(0), ValueId(1)), Err(Error::ConflictingBinding(_))));

        let a2 = c1.strengthen(VarId(0), ValueId(1)).unwrap();
        let rest = |cs: &ConstraintSet| -> Vec<String> {
            cs.solve_all(DEFAULT_OUTCOME_LIMIT)
                .unwrap()
                .iter()
                .map(|o| cs.vars().format(&o.without(&[VarId(0)])))
                .collect()
        };
        let unconstrained: Vec<String> = c1
            .solve_all(DEFAULT_OUTCOME_LIMIT)
            .unwrap()
            .iter()
            .filter(|o| o.get(VarId(0)) == Some(ValueId(1)))
            .map(|o| c1.vars().format(&o.without(&[VarId(0)])))
            .collect();
        assert_eq!(rest(&a2), unconstrained);
    }

    #[test]
    fn forward_checking_matches_the_worked_trace() {
        let c1 = fixtures::constrained_cpr().1;
        let a1 = c1.strengthen_all(&c1.vars().parse_assignment("A=a1").unwrap()).unwrap();
        let r = a1.propagate_with(Consistency::ForwardChecking);
        assert_eq!(induced(&c1, &r), "A=a1,B=b2,D=d2");

        let deeper = a1
            .strengthen_all(&c1.vars().parse_assignment("B=b2,D=d2").unwrap())
            .unwrap();
        let (c, v) = lit(&c1, "C=c1");
        let r = deeper.strengthen(c, v).unwrap().propagate_with(Consistency::ForwardChecking);
        assert_eq!(induced(&c1, &r), "wipeout D");
    }

    #[test]
    fn gac_sees_further_than_forward_checking() {
        let c1 = fixtures::constrained_cpr().1;
        let a1 = c1.strengthen(VarId(0), ValueId(0)).unwrap();
        assert!(matches!(a1.propagate(), PropagationResult::Wipeout(_)));
        let deeper = a1
            .strengthen_all(&c1.vars().parse_assignment("B=b2,D=d2").unwrap())
            .unwrap();
        let (c, v) = lit(&c1, "C=c1");
        assert_eq!(induced(&c1, &deeper.strengthen(c, v).unwrap().propagate()), "wipeout D");
    }

    #[test]
    fn gac_on_the_tree_trace() {
        let c2 = fixtures::constrained_lp().1;
        let cs = c2
            .strengthen_all(&c2.vars().parse_assignment("A=a2,B=b2").unwrap())
            .unwrap();
        let (d, v) = lit(&c2, "D=d1");
        let r = cs.strengthen(d, v).unwrap().propagate();
        assert_eq!(induced(&c2, &r), "A=a2,B=b2,C=c2,D=d1");
    }

    #[test]
    fn no_inference_keeps_only_fixed() {
        let c1 = fixtures::constrained_cpr().1;
        let a1 = c1.strengthen(VarId(0), ValueId(0)).unwrap();
        assert_eq!(induced(&c1, &a1.propagate_with(Consistency::None)), "A=a1");
    }

    #[test]
    fn solve_all_examples() {
        let cs = fixtures::csp_example();
        let all: Vec<String> = cs
            .solve_all(DEFAULT_OUTCOME_LIMIT)
            .unwrap()
            .iter()
            .map(|o| cs.vars().format_values(o))
            .collect();
        assert_eq!(all, ["a1 b1 c1", "a2 b2 c2"]);
        let two = Arc::new(VariableSet::new([("A", ["a1", "a2"]), ("B", ["b1", "b2"])]).unwrap());
        assert_eq!(ConstraintSet::empty(two).solve_all(DEFAULT_OUTCOME_LIMIT).unwrap().len(), 4);
        let c1 = fixtures::constrained_cpr().1;
        let target = outcome(&c1, "A=a2,B=b2,C=c1,D=d1");
        assert!(c1.solve_all(DEFAULT_OUTCOME_LIMIT).unwrap().contains(&target));
        assert!(matches!(c1.solve_all(8), Err(Error::TooManyOutcomes { .. })));
    }

    fn random_set() -> impl Strategy<Value = (ConstraintSet, Vec<(usize, usize)>)> {
        let vars = Arc::new(
            VariableSet::new([
                ("A", vec!["a1", "a2", "a3"]),
                ("B", vec!["b1", "b2"]),
                ("C", vec!["c1", "c2", "c3"]),
                ("D", vec!["d1", "d2"]),
            ])
            .unwrap(),
        );
        let table = (0usize..4, 0usize..4, proptest::collection::vec(any::<bool>(), 9), 1usize..3);
        (
            proptest::collection::vec(table, 0..5),
            proptest::collection::vec((0usize..4, 0usize..3), 0..3),
        )
            .prop_map(move |(tables, lits)| {
                let constraints = tables
                    .into_iter()
                    .filter_map(|(x, y, mask, arity)| {
                        let scope = if arity == 1 || x == y { vec![VarId(x)] } else { vec![VarId(x), VarId(y)] };
                        let tuples: Vec<Vec<ValueId>> = Assignments::new(&vars, &scope)
                            .enumerate()
                            .filter(|(i, _)| mask[*i])
                            .map(|(_, o)| o.values_of(&scope).unwrap())
                            .collect();
                        Constraint::new(&vars, scope, tuples).ok()
                    })
                    .collect();
                (ConstraintSet::new(vars.clone(), constraints).unwrap(), lits)
            })
    }

    proptest! {
        #[test]
        fn propagation_is_sound((cs, lits) in random_set()) {
            let mut cs = cs;
            for (v, x) in lits {
                let var = VarId(v);
                let value = ValueId(x % cs.vars().domain_size(var));
                if let Ok(next) = cs.strengthen(var, value) {
                    cs = next;
                }
            }
            let feasible = cs.solve_all(DEFAULT_OUTCOME_LIMIT).unwrap();
            for level in [Consistency::None, Consistency::ForwardChecking, Consistency::Gac] {
                match cs.propagate_with(level) {
                    PropagationResult::Wipeout(_) => prop_assert!(feasible.is_empty()),
                    PropagationResult::Consistent { induced, domains } => {
                        prop_assert!(induced.extends(cs.fixed()));
                        for o in &feasible {
                            prop_assert!(o.extends(&induced));
                            for (v, x) in o.iter() {
                                prop_assert!(domains[v.0].contains(&x));
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn strengthen_is_conjunction((cs, _) in random_set(), v in 0usize..4, x in 0usize..3) {
            let var = VarId(v);
            let value = ValueId(x % cs.vars().domain_size(var));
            let strong = cs.strengthen(var, value).unwrap();
            for o in Assignments::new(cs.vars(), &cs.vars().all()) {
                prop_assert_eq!(
                    strong.check_outcome(&o),
                    cs.check_outcome(&o) && o.get(var) == Some(value)
                );
            }
        }
    }
}
