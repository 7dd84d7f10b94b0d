//! CPR-nets: a totally dependent CP-net whose non-adjacent variable pairs
//! are ordered by relative-importance statements, giving a total order
//! over outcomes.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cpnet::{CpNet, PreferenceRow};
use crate::error::{Error, Result};
use crate::model::{Outcome, PartialAssignment, Preference, ValueId, VarId, VariableSet};

/// Default cap on the number of outcomes materialized by total-order queries.
pub const DEFAULT_OUTCOME_LIMIT: u128 = 1 << 20;

/// `more_important ⊳ less_important`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AriStatement {
    pub more_important: VarId,
    pub less_important: VarId,
}

impl AriStatement {
    pub fn new(more_important: VarId, less_important: VarId) -> Self {
        Self {
            more_important,
            less_important,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CprNet {
    base: CpNet,
    aris: Vec<AriStatement>,
    order: Vec<VarId>,
}

impl CprNet {
    pub fn new(base: CpNet, aris: Vec<AriStatement>) -> Result<Self> {
        let vars = Arc::clone(base.vars());
        let name = |v: VarId| vars.name(v).to_string();
        if let Some(cpt) = base.cpts().find(|c| !c.is_total()) {
            return Err(Error::PartialRowUnsupported(name(cpt.var())));
        }
        let nops: BTreeSet<(VarId, VarId)> = base.nop_pairs()?.into_iter().collect();
        let mut covered = BTreeSet::new();
        for ari in &aris {
            let (a, b) = (ari.more_important, ari.less_important);
            if !base.in_scope(a) || !base.in_scope(b) {
                return Err(Error::UnknownVariable(format!("#{}", a.0.max(b.0))));
            }
            let key = (a.min(b), a.max(b));
            if a == b || !nops.contains(&key) {
                return Err(Error::AriNotOnNop(name(a), name(b)));
            }
            if !covered.insert(key) {
                return Err(Error::DuplicateAri(name(key.0), name(key.1)));
            }
        }
        if let Some((a, b)) = nops.difference(&covered).next() {
            return Err(Error::NopUncovered(name(*a), name(*b)));
        }
        let mut sorted = aris;
        sorted.sort();
        let mut net = Self {
            base,
            aris: sorted,
            order: Vec::new(),
        };
        net.order = net.combined_order()?;
        Ok(net)
    }

    /// Orders the scope by in-degree in the combined graph. In an acyclic
    /// tournament the in-degrees are exactly `0..n`.
    fn combined_order(&self) -> Result<Vec<VarId>> {
        let scope = self.base.scope();
        let mut indeg: Vec<(usize, VarId)> = scope
            .iter()
            .map(|v| (self.predecessors(*v).len(), *v))
            .collect();
        indeg.sort();
        for (i, (d, v)) in indeg.iter().enumerate() {
            if *d != i {
                return Err(Error::CyclicCprNet(self.base.vars().name(*v).to_string()));
            }
        }
        Ok(indeg.into_iter().map(|(_, v)| v).collect())
    }

    /// Variables ordered before `var` by an arc or an ARI.
    pub fn predecessors(&self, var: VarId) -> Vec<VarId> {
        let mut out = self.base.parents(var).to_vec();
        out.extend(
            self.aris
                .iter()
                .filter(|a| a.less_important == var)
                .map(|a| a.more_important),
        );
        out.sort();
        out
    }

    pub fn base(&self) -> &CpNet {
        &self.base
    }

    pub fn vars(&self) -> &Arc<VariableSet> {
        self.base.vars()
    }

    pub fn scope(&self) -> &[VarId] {
        self.base.scope()
    }

    pub fn aris(&self) -> &[AriStatement] {
        &self.aris
    }

    /// The unique topological order of arcs and ARIs together.
    pub fn unique_topo_order(&self) -> &[VarId] {
        &self.order
    }

    /// Variables with no predecessor in the combined graph.
    pub fn sources(&self) -> Vec<VarId> {
        self.scope()
            .iter()
            .copied()
            .filter(|v| self.predecessors(*v).is_empty())
            .collect()
    }

    /// Fails with `EqualOutcomes` on equal outcomes.
    pub fn compare(&self, o1: &Outcome, o2: &Outcome) -> Result<Preference> {
        self.base.check_outcome(o1)?;
        self.base.check_outcome(o2)?;
        self.try_compare(o1, o2).ok_or(Error::EqualOutcomes)
    }

    fn try_compare(&self, o1: &PartialAssignment, o2: &PartialAssignment) -> Option<Preference> {
        let x = self.order.iter().copied().find(|v| o1.get(*v) != o2.get(*v))?;
        let row = self.base.cpt(x).row(o1);
        Some(if row.prefers(o1.get(x)?, o2.get(x)?) {
            Preference::FirstPreferred
        } else {
            Preference::SecondPreferred
        })
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
        let count = self.vars().product_size(self.scope());
        if count > limit {
            return Err(Error::TooManyOutcomes { count, limit });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut pa = PartialAssignment::new();
        self.emit(0, &mut pa, &mut out);
        Ok(out)
    }

    fn emit(&self, depth: usize, pa: &mut PartialAssignment, out: &mut Vec<Outcome>) {
        let Some(&var) = self.order.get(depth) else {
            out.push(Outcome::from_assignment_unchecked(pa.clone()));
            return;
        };
        for &value in ranked(self.base.cpt(var).row(pa)) {
            pa.set(var, value);
            self.emit(depth + 1, pa, out);
        }
        pa.unbind(var);
    }

    /// The net over the unbound variables: CPTs conditioned on `pa`, ARIs
    /// touching bound variables dropped.
    pub fn condition(&self, pa: &PartialAssignment) -> Self {
        Self {
            base: self.base.condition(pa),
            aris: self
                .aris
                .iter()
                .copied()
                .filter(|a| !pa.is_bound(a.more_important) && !pa.is_bound(a.less_important))
                .collect(),
            order: self.order.iter().copied().filter(|v| !pa.is_bound(*v)).collect(),
        }
    }
}

/// Values of a total row, best first.
fn ranked(row: &PreferenceRow) -> &[ValueId] {
    match row {
        PreferenceRow::Total(order) => order,
        PreferenceRow::Partial(_) => unreachable!("CPR-net rows are total"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn o(net: &CprNet, text: &str) -> Outcome {
        Outcome::new(net.scope(), net.vars().parse_assignment(text).unwrap()).unwrap()
    }

    #[test]
    fn partial_rows_are_rejected() {
        let doc = crate::document::parse_model("kind cprnet\n[variables]\nA: a1 a2 a3\n[cpts]\nA: partial a1 > a2\n");
        assert!(matches!(doc, Err(Error::PartialRowUnsupported(v)) if v == "A"));
    }

    #[test]
    fn build_examples() {
        let n2 = fixtures::chain();
        let (a, c) = (VarId(0), VarId(2));
        assert!(CprNet::new(n2.clone(), vec![AriStatement::new(a, c)]).is_ok());
        assert!(matches!(
            CprNet::new(n2.clone(), vec![AriStatement::new(c, a)]),
            Err(Error::CyclicCprNet(_))
        ));
        assert_eq!(
            CprNet::new(n2.clone(), vec![]).unwrap_err(),
            Error::NopUncovered("A".into(), "C".into())
        );
        assert_eq!(
            CprNet::new(n2.clone(), vec![AriStatement::new(VarId(0), VarId(1)), AriStatement::new(a, c)])
                .unwrap_err(),
            Error::AriNotOnNop("A".into(), "B".into())
        );
        assert_eq!(
            CprNet::new(n2.clone(), vec![AriStatement::new(a, c), AriStatement::new(a, c)]).unwrap_err(),
            Error::DuplicateAri("A".into(), "C".into())
        );
        assert!(matches!(
            CprNet::new(fixtures::dinner(), vec![]),
            Err(Error::NotTotallyDependent(..))
        ));
    }

    #[test]
    fn topo_orders() {
        let r0 = fixtures::chain_cpr();
        assert_eq!(r0.unique_topo_order(), &[VarId(0), VarId(1), VarId(2)]);
        let r1 = fixtures::constrained_cpr().0;
        assert_eq!(r1.unique_topo_order(), &[VarId(0), VarId(1), VarId(2), VarId(3)]);
        assert_eq!(r1.sources(), vec![VarId(0)]);
    }

    #[test]
    fn compare_examples() {
        let r0 = fixtures::chain_cpr();
        let first = Preference::FirstPreferred;
        assert_eq!(r0.compare(&o(&r0, "A=a1,B=b1,C=c2"), &o(&r0, "A=a2,B=b1,C=c1")).unwrap(), first);
        assert_eq!(r0.compare(&o(&r0, "A=a1,B=b2,C=c1"), &o(&r0, "A=a2,B=b2,C=c2")).unwrap(), first);
        assert_eq!(r0.compare(&o(&r0, "A=a2,B=b2,C=c1"), &o(&r0, "A=a2,B=b1,C=c1")).unwrap(), first);
        let x = o(&r0, "A=a1,B=b1,C=c1");
        assert_eq!(r0.compare(&x, &x).unwrap_err(), Error::EqualOutcomes);
    }

    #[test]
    fn total_order_example() {
        let r0 = fixtures::chain_cpr();
        let order: Vec<String> = r0
            .total_order(DEFAULT_OUTCOME_LIMIT)
            .unwrap()
            .iter()
            .map(|x| r0.vars().format_values(x))
            .collect();
        assert_eq!(
            order,
            [
                "a1 b1 c1", "a1 b1 c2", "a1 b2 c2", "a1 b2 c1", "a2 b2 c2", "a2 b2 c1", "a2 b1 c1",
                "a2 b1 c2"
            ]
        );
        assert_eq!(
            r0.total_order(DEFAULT_OUTCOME_LIMIT).unwrap()[0],
            r0.base().forward_sweep().unwrap()
        );
        assert!(matches!(r0.total_order(4), Err(Error::TooManyOutcomes { count: 8, limit: 4 })));
    }

    #[test]
    fn total_order_agrees_with_compare() {
        let r1 = fixtures::constrained_cpr().0;
        let order = r1.total_order(DEFAULT_OUTCOME_LIMIT).unwrap();
        for w in order.windows(2) {
            assert_eq!(r1.compare(&w[0], &w[1]).unwrap(), Preference::FirstPreferred);
        }
    }
}
