//! Lexicographic preference trees.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cpnet::{Cpt, PreferenceRow};
use crate::error::{Error, Result};
use crate::model::{Assignments, Outcome, PartialAssignment, Preference, ValueId, VarId, VariableSet};

/// A tree node: a variable, its value order (conditioned on some of the
/// node's ancestors) and labelled children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpNode {
    var: VarId,
    cpt: Cpt,
    children: Vec<(BTreeSet<ValueId>, LpNode)>,
}

impl LpNode {
    /// Children are kept sorted by their smallest label.
    pub fn new(var: VarId, cpt: Cpt, children: Vec<(BTreeSet<ValueId>, LpNode)>) -> Self {
        let mut node = Self { var, cpt, children };
        node.sort_children();
        node
    }

    pub fn leaf(var: VarId, cpt: Cpt) -> Self {
        Self::new(var, cpt, Vec::new())
    }

    fn sort_children(&mut self) {
        self.children
            .sort_by(|a, b| a.0.iter().next().cmp(&b.0.iter().next()));
    }

    pub fn var(&self) -> VarId {
        self.var
    }

    pub fn cpt(&self) -> &Cpt {
        &self.cpt
    }

    pub fn children(&self) -> &[(BTreeSet<ValueId>, LpNode)] {
        &self.children
    }

    fn child_for(&self, value: ValueId) -> Option<&LpNode> {
        self.children
            .iter()
            .find(|(labels, _)| labels.contains(&value))
            .map(|(_, c)| c)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.node_count()).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpTree {
    vars: Arc<VariableSet>,
    scope: Vec<VarId>,
    root: Option<LpNode>,
}

impl LpTree {
    /// A tree over every variable of `vars`.
    pub fn new(vars: Arc<VariableSet>, root: LpNode) -> Result<Self> {
        let scope = vars.all();
        let tree = Self {
            vars,
            scope,
            root: Some(root),
        };
        tree.validate()?;
        Ok(tree)
    }

    pub fn vars(&self) -> &Arc<VariableSet> {
        &self.vars
    }

    /// Variables the tree ranks, in declaration order.
    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn root(&self) -> Option<&LpNode> {
        self.root.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        match &self.root {
            None => match self.scope.first() {
                Some(v) => Err(Error::PathIncomplete(self.vars.name(*v).to_string())),
                None => Ok(()),
            },
            Some(root) => self.validate_node(root, &mut Vec::new()),
        }
    }

    fn validate_node(&self, node: &LpNode, path: &mut Vec<VarId>) -> Result<()> {
        let vars = &self.vars;
        let name = vars.name(node.var).to_string();
        if !self.scope.contains(&node.var) {
            return Err(Error::UnknownVariable(name));
        }
        if path.contains(&node.var) {
            return Err(Error::VariableRepeated(name));
        }
        let bad = |reason: &str| Error::BadCptScope {
            var: name.clone(),
            reason: reason.to_string(),
        };
        if node.cpt.var() != node.var {
            return Err(bad("table belongs to another variable"));
        }
        if !node.cpt.parents().iter().all(|p| path.contains(p)) {
            return Err(bad("table conditions on a variable that is not an ancestor"));
        }
        if !node.cpt.is_total() {
            return Err(bad("rows must be total orders"));
        }
        path.push(node.var);
        if node.children.is_empty() {
            if let Some(missing) = self.scope.iter().find(|v| !path.contains(v)) {
                return Err(Error::PathIncomplete(vars.name(*missing).to_string()));
            }
        } else {
            let mut seen = BTreeSet::new();
            for (labels, _) in &node.children {
                if labels.is_empty()
                    || labels.iter().any(|v| v.0 >= vars.domain_size(node.var) || !seen.insert(*v))
                {
                    return Err(Error::LabelNotPartition(name));
                }
            }
            if seen.len() != vars.domain_size(node.var) {
                return Err(Error::LabelNotPartition(name));
            }
            for (_, child) in &node.children {
                self.validate_node(child, path)?;
            }
        }
        path.pop();
        Ok(())
    }

    fn check_outcome(&self, o: &Outcome) -> Result<()> {
        if o.len() != self.scope.len() || !self.scope.iter().all(|v| o.is_bound(*v)) {
            return Err(Error::IncompleteOutcome);
        }
        Ok(())
    }

    /// Lexicographic comparison.
    pub fn compare(&self, o1: &Outcome, o2: &Outcome) -> Result<Preference> {
        self.check_outcome(o1)?;
        self.check_outcome(o2)?;
        self.try_compare(o1, o2).ok_or(Error::EqualOutcomes)
    }

    fn try_compare(&self, o1: &PartialAssignment, o2: &PartialAssignment) -> Option<Preference> {
        let mut node = self.root.as_ref()?;
        loop {
            let (a, b) = (o1.get(node.var)?, o2.get(node.var)?);
            if a != b {
                return Some(if node.cpt.row(o1).prefers(a, b) {
                    Preference::FirstPreferred
                } else {
                    Preference::SecondPreferred
                });
            }
            node = node.child_for(a)?;
        }
    }

    /// Comparison as an [`Ordering`] where `Less` means preferred.
    pub fn cmp_outcomes(&self, o1: &Outcome, o2: &Outcome) -> Ordering {
        match self.try_compare(o1, o2) {
            None => Ordering::Equal,
            Some(Preference::FirstPreferred) => Ordering::Less,
            Some(Preference::SecondPreferred) => Ordering::Greater,
        }
    }

    /// All outcomes, best first.
    pub fn total_order(&self, limit: u128) -> Result<Vec<Outcome>> {
        let count = self.vars.product_size(&self.scope);
        if count > limit {
            return Err(Error::TooManyOutcomes { count, limit });
        }
        let mut out = Vec::with_capacity(count as usize);
        match &self.root {
            None => out.push(Outcome::from_assignment_unchecked(PartialAssignment::new())),
            Some(root) => emit(root, &mut PartialAssignment::new(), &mut out),
        }
        Ok(out)
    }

    /// The best outcome.
    pub fn optimum(&self) -> Outcome {
        let mut pa = PartialAssignment::new();
        let mut node = self.root.as_ref();
        while let Some(n) = node {
            let best = ranked(n.cpt.row(&pa))[0];
            pa.set(n.var, best);
            node = n.child_for(best);
        }
        Outcome::from_assignment_unchecked(pa)
    }

    /// Removes the variables bound by `pa`: at each of their nodes only
    /// the branch of the assigned value is kept, the node is spliced out,
    /// tables are restricted to the assigned values, and sibling branches
    /// that became identical are merged.
    pub fn reduce(&self, pa: &PartialAssignment) -> Result<Self> {
        for (var, value) in pa.iter() {
            if !self.scope.contains(&var) {
                return Err(Error::UnknownVariable(
                    if self.vars.contains(var) { self.vars.name(var).to_string() } else { format!("#{}", var.0) },
                ));
            }
            self.vars.check_value(var, value)?;
        }
        Ok(self.reduce_unchecked(pa))
    }

    /// Like [`LpTree::reduce`]; bindings outside the scope are ignored.
    pub fn reduce_unchecked(&self, pa: &PartialAssignment) -> Self {
        if !self.scope.iter().any(|v| pa.is_bound(*v)) {
            return self.clone();
        }
        Self {
            vars: Arc::clone(&self.vars),
            scope: self.scope.iter().copied().filter(|v| !pa.is_bound(*v)).collect(),
            root: self.root.as_ref().and_then(|r| reduce_node(&self.vars, r, pa).0),
        }
    }

    /// Checks exhaustively that every preference of `self` also holds in
    /// `original` once the outcomes are extended by `w`.
    pub fn is_compatible(&self, original: &LpTree, w: &PartialAssignment, limit: u128) -> Result<bool> {
        let expected: Vec<VarId> = original
            .scope
            .iter()
            .copied()
            .filter(|v| !w.is_bound(*v))
            .collect();
        if self.vars != original.vars
            || self.scope != expected
            || !w.vars().all(|v| original.scope.contains(&v))
        {
            return Err(Error::VariableMismatch);
        }
        let count = self.vars.product_size(&self.scope);
        if count > limit {
            return Err(Error::TooManyOutcomes { count, limit });
        }
        let outcomes: Vec<Outcome> = Assignments::new(&self.vars, &self.scope).collect();
        let extended: Vec<PartialAssignment> = outcomes
            .iter()
            .map(|o| o.merge(w).expect("disjoint scopes"))
            .collect();
        for (i, a) in outcomes.iter().enumerate() {
            for (j, b) in outcomes.iter().enumerate() {
                if i != j
                    && self.try_compare(a, b) == Some(Preference::FirstPreferred)
                    && original.try_compare(&extended[i], &extended[j]) != Some(Preference::FirstPreferred)
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn ranked(row: &PreferenceRow) -> &[ValueId] {
    match row {
        PreferenceRow::Total(order) => order,
        PreferenceRow::Partial(_) => unreachable!("LP-tree rows are total"),
    }
}

fn emit(node: &LpNode, pa: &mut PartialAssignment, out: &mut Vec<Outcome>) {
    for &value in ranked(node.cpt.row(pa)) {
        pa.set(node.var, value);
        match node.child_for(value) {
            Some(child) => emit(child, pa, out),
            None => out.push(Outcome::from_assignment_unchecked(pa.clone())),
        }
    }
    pa.unbind(node.var);
}

/// Returns the reduced subtree (absent if every variable in it is bound)
/// and whether anything below was deleted.
fn reduce_node(vars: &VariableSet, node: &LpNode, pa: &PartialAssignment) -> (Option<LpNode>, bool) {
    if let Some(value) = pa.get(node.var) {
        let kept = node.child_for(value).and_then(|c| reduce_node(vars, c, pa).0);
        return (kept, true);
    }
    let mut changed = false;
    let mut children = Vec::with_capacity(node.children.len());
    for (labels, child) in &node.children {
        let (reduced, deleted) = reduce_node(vars, child, pa);
        changed |= deleted;
        if let Some(reduced) = reduced {
            children.push((labels.clone(), reduced));
        }
    }
    // Sibling subtrees rank the same variable set, so either all of them
    // vanished or none did.
    debug_assert!(children.is_empty() || children.len() == node.children.len());
    if changed {
        let mut merged: Vec<(BTreeSet<ValueId>, LpNode)> = Vec::new();
        for (labels, child) in children {
            match merged.iter_mut().find(|(_, c)| *c == child) {
                Some((l, _)) => l.extend(labels),
                None => merged.push((labels, child)),
            }
        }
        children = merged;
    }
    let reduced = LpNode::new(node.var, node.cpt.condition(vars, pa), children);
    (Some(reduced), changed)
}
