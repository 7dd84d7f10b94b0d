//! Variables, finite domains, partial assignments and outcomes.
//!
//! Every preference model and constraint set refers to one shared
//! [`VariableSet`]. Variables and values are addressed by index
//! ([`VarId`], [`ValueId`]); names only matter at the edges (parsing and
//! printing). Value names are scoped to their variable, so two variables
//! may both have a value called `x1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Index of a variable in its [`VariableSet`] (declaration order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Index of a value in its variable's domain (declaration order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    name: String,
    domain: Vec<String>,
}

impl Variable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }
}

/// Ordered set of variables with their finite domains.
#[derive(Debug, Clone)]
pub struct VariableSet {
    vars: Vec<Variable>,
    index: HashMap<String, VarId>,
}

impl PartialEq for VariableSet {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
    }
}

impl Eq for VariableSet {}

impl VariableSet {
    /// Builds a variable set from `(name, domain)` pairs in declaration order.
    pub fn new<N, V, D>(decls: impl IntoIterator<Item = (N, D)>) -> Result<Self>
    where
        N: Into<String>,
        V: Into<String>,
        D: IntoIterator<Item = V>,
    {
        let mut vars = Vec::new();
        let mut index = HashMap::new();
        for (name, domain) in decls {
            let name = name.into();
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            let domain: Vec<String> = domain.into_iter().map(Into::into).collect();
            for (i, v) in domain.iter().enumerate() {
                if v.is_empty() || domain[..i].contains(v) {
                    return Err(Error::DuplicateValue {
                        var: name,
                        value: v.clone(),
                    });
                }
            }
            if domain.len() < 2 {
                return Err(Error::DomainTooSmall(name));
            }
            if index.insert(name.clone(), VarId(vars.len())).is_some() {
                return Err(Error::DuplicateVariable(name));
            }
            vars.push(Variable { name, domain });
        }
        Ok(Self { vars, index })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len()).map(VarId)
    }

    pub fn all(&self) -> Vec<VarId> {
        self.ids().collect()
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.vars[id.0].name
    }

    pub fn domain_size(&self, id: VarId) -> usize {
        self.vars[id.0].domain.len()
    }

    pub fn values(&self, id: VarId) -> impl Iterator<Item = ValueId> {
        (0..self.domain_size(id)).map(ValueId)
    }

    pub fn value_name(&self, id: VarId, value: ValueId) -> &str {
        &self.vars[id.0].domain[value.0]
    }

    pub fn var_id(&self, name: &str) -> Result<VarId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn value_id(&self, var: VarId, value: &str) -> Result<ValueId> {
        self.vars[var.0]
            .domain
            .iter()
            .position(|v| v == value)
            .map(ValueId)
            .ok_or_else(|| Error::UnknownValue {
                var: self.name(var).to_string(),
                value: value.to_string(),
            })
    }

    pub fn contains(&self, var: VarId) -> bool {
        var.0 < self.vars.len()
    }

    /// Number of complete assignments over `scope`, saturating.
    pub fn product_size(&self, scope: &[VarId]) -> u128 {
        scope
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(self.domain_size(*v) as u128))
    }

    /// Parses `A=a1,B=b2` (order-insensitive, whitespace tolerated).
    pub fn parse_assignment(&self, text: &str) -> Result<PartialAssignment> {
        let mut pa = PartialAssignment::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (var, value) = item.split_once('=').ok_or_else(|| Error::Parse {
                line: 1,
                col: 1,
                message: format!("expected Var=value, found `{item}`"),
            })?;
            let var = self.var_id(var.trim())?;
            let value = self.value_id(var, value.trim())?;
            pa.bind(var, value)
                .map_err(|_| Error::ConflictingBinding(self.name(var).to_string()))?;
        }
        Ok(pa)
    }

    /// Formats an assignment as `A=a1,B=b2` in declaration order.
    pub fn format(&self, pa: &PartialAssignment) -> String {
        pa.iter()
            .map(|(var, value)| format!("{}={}", self.name(var), self.value_name(var, value)))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Formats values only, e.g. `a1 b2 c1`.
    pub fn format_values(&self, pa: &PartialAssignment) -> String {
        pa.iter()
            .map(|(var, value)| self.value_name(var, value).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn check_value(&self, var: VarId, value: ValueId) -> Result<()> {
        if !self.contains(var) {
            return Err(Error::UnknownVariable(format!("#{}", var.0)));
        }
        if value.0 >= self.domain_size(var) {
            return Err(Error::UnknownValue {
                var: self.name(var).to_string(),
                value: format!("#{}", value.0),
            });
        }
        Ok(())
    }
}

/// A set of variable bindings. Iteration follows declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialAssignment {
    bindings: BTreeMap<VarId, ValueId>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, ValueId)>) -> Result<Self> {
        let mut pa = Self::new();
        for (var, value) in pairs {
            pa.bind(var, value)?;
        }
        Ok(pa)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, var: VarId) -> Option<ValueId> {
        self.bindings.get(&var).copied()
    }

    pub fn is_bound(&self, var: VarId) -> bool {
        self.bindings.contains_key(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, ValueId)> + '_ {
        self.bindings.iter().map(|(k, v)| (*k, *v))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.bindings.keys().copied()
    }

    /// Adds a binding; rebinding to the same value is a no-op.
    pub fn bind(&mut self, var: VarId, value: ValueId) -> Result<()> {
        match self.bindings.insert(var, value) {
            Some(old) if old != value => {
                self.bindings.insert(var, old);
                Err(Error::ConflictingBinding(format!("#{}", var.0)))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn set(&mut self, var: VarId, value: ValueId) {
        self.bindings.insert(var, value);
    }

    pub(crate) fn unbind(&mut self, var: VarId) {
        self.bindings.remove(&var);
    }

    /// Restriction to `vars`; every variable in `vars` must be bound.
    pub fn project(&self, vars: &[VarId]) -> Result<Self> {
        let mut out = Self::new();
        for &var in vars {
            let value = self
                .get(var)
                .ok_or_else(|| Error::UnboundVariable(format!("#{}", var.0)))?;
            out.set(var, value);
        }
        Ok(out)
    }

    /// Restriction to whichever of `vars` are bound.
    pub fn restrict_to(&self, vars: &[VarId]) -> Self {
        let mut out = Self::new();
        for &var in vars {
            if let Some(value) = self.get(var) {
                out.set(var, value);
            }
        }
        out
    }

    /// Bindings of variables not in `vars`.
    pub fn without(&self, vars: &[VarId]) -> Self {
        Self {
            bindings: self
                .bindings
                .iter()
                .filter(|(k, _)| !vars.contains(k))
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    /// Union of two assignments that agree on their common variables.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (var, value) in other.iter() {
            out.bind(var, value)?;
        }
        Ok(out)
    }

    /// True if no variable is bound differently in the two assignments.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .iter()
            .all(|(var, value)| large.get(var).is_none_or(|v| v == value))
    }

    /// True if every binding of `other` is also a binding of `self`.
    pub fn extends(&self, other: &Self) -> bool {
        other.iter().all(|(var, value)| self.get(var) == Some(value))
    }

    /// Values of `vars` in order, or `None` if one is unbound.
    pub fn values_of(&self, vars: &[VarId]) -> Option<Vec<ValueId>> {
        vars.iter().map(|v| self.get(*v)).collect()
    }
}

impl FromIterator<(VarId, ValueId)> for PartialAssignment {
    /// Later bindings of the same variable win.
    fn from_iter<T: IntoIterator<Item = (VarId, ValueId)>>(iter: T) -> Self {
        Self {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// A complete assignment to a given scope of variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(PartialAssignment);

impl Outcome {
    /// Checks that `assignment` binds exactly `scope`.
    pub fn new(scope: &[VarId], assignment: PartialAssignment) -> Result<Self> {
        if assignment.len() != scope.len() || !scope.iter().all(|v| assignment.is_bound(*v)) {
            return Err(Error::IncompleteOutcome);
        }
        Ok(Self(assignment))
    }

    pub(crate) fn from_assignment_unchecked(assignment: PartialAssignment) -> Self {
        Self(assignment)
    }

    pub fn assignment(&self) -> &PartialAssignment {
        &self.0
    }

    pub fn into_assignment(self) -> PartialAssignment {
        self.0
    }

    /// Copy of this outcome with `var` set to `value`.
    pub fn with(&self, var: VarId, value: ValueId) -> Self {
        let mut pa = self.0.clone();
        pa.set(var, value);
        Self(pa)
    }
}

impl Deref for Outcome {
    type Target = PartialAssignment;

    fn deref(&self) -> &PartialAssignment {
        &self.0
    }
}

/// Which of two compared outcomes a total order ranks higher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preference {
    FirstPreferred,
    SecondPreferred,
}

impl Preference {
    pub fn reversed(self) -> Self {
        match self {
            Self::FirstPreferred => Self::SecondPreferred,
            Self::SecondPreferred => Self::FirstPreferred,
        }
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FirstPreferred => f.write_str("first"),
            Self::SecondPreferred => f.write_str("second"),
        }
    }
}

/// Iterator over the complete assignments to a scope, first variable
/// slowest, values in domain order.
#[derive(Debug, Clone)]
pub struct Assignments {
    scope: Vec<VarId>,
    sizes: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Assignments {
    pub fn new(vars: &VariableSet, scope: &[VarId]) -> Self {
        let sizes: Vec<usize> = scope.iter().map(|v| vars.domain_size(*v)).collect();
        Self {
            scope: scope.to_vec(),
            sizes,
            current: Some(vec![0; scope.len()]),
        }
    }
}

impl Iterator for Assignments {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        let current = self.current.as_mut()?;
        let item: PartialAssignment = self
            .scope
            .iter()
            .zip(current.iter())
            .map(|(v, i)| (*v, ValueId(*i)))
            .collect();
        let mut pos = current.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < self.sizes[pos] {
                break;
            }
            current[pos] = 0;
        }
        Some(Outcome(item))
    }
}

/// Every outcome over the whole variable set, in canonical order.
pub fn enumerate_outcomes(vars: &VariableSet) -> Assignments {
    Assignments::new(vars, &vars.all())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> VariableSet {
        VariableSet::new([
            ("A", vec!["a1", "a2"]),
            ("B", vec!["b1", "b2"]),
            ("C", vec!["c1", "c2"]),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_bad_declarations() {
        assert_eq!(
            VariableSet::new([("A", vec!["a1", "a2"]), ("A", vec!["x", "y"])]).unwrap_err(),
            Error::DuplicateVariable("A".into())
        );
        assert_eq!(
            VariableSet::new([("A", vec!["a1"])]).unwrap_err(),
            Error::DomainTooSmall("A".into())
        );
        assert!(VariableSet::new([("A", vec!["a1", "a1"])]).is_err());
        assert_eq!(
            VariableSet::new([("", vec!["a1", "a2"])]).unwrap_err(),
            Error::EmptyName
        );
    }

    #[test]
    fn values_are_scoped_to_their_variable() {
        let vars = VariableSet::new([("X", vec!["v1", "v2"]), ("Y", vec!["v2", "v1"])]).unwrap();
        let pa = vars.parse_assignment("X=v1,Y=v1").unwrap();
        assert_eq!(pa.get(VarId(0)), Some(ValueId(0)));
        assert_eq!(pa.get(VarId(1)), Some(ValueId(1)));
    }

    #[test]
    fn project_examples() {
        let vars = abc();
        let a1b1c1 = vars.parse_assignment("A=a1,B=b1,C=c1").unwrap();
        let ab = a1b1c1.project(&[VarId(0), VarId(1)]).unwrap();
        assert_eq!(vars.format_values(&ab), "a1 b1");
        assert!(a1b1c1.project(&[]).unwrap().is_empty());
        let a1b1 = vars.parse_assignment("A=a1,B=b1").unwrap();
        assert!(matches!(
            a1b1.project(&[VarId(0), VarId(1), VarId(2)]),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn merge_examples() {
        let vars = VariableSet::new([
            ("A", vec!["a1", "a2"]),
            ("B", vec!["b1", "b2"]),
            ("D", vec!["d1", "d2"]),
        ])
        .unwrap();
        let a1 = vars.parse_assignment("A=a1").unwrap();
        let b2d2 = vars.parse_assignment("B=b2,D=d2").unwrap();
        assert_eq!(vars.format_values(&a1.merge(&b2d2).unwrap()), "a1 b2 d2");
        assert_eq!(PartialAssignment::new().merge(&a1).unwrap(), a1);
        let a2 = vars.parse_assignment("A=a2").unwrap();
        assert!(matches!(a1.merge(&a2), Err(Error::ConflictingBinding(_))));
        // a failed bind leaves the assignment untouched
        let mut x = a1.clone();
        assert!(x.bind(VarId(0), ValueId(1)).is_err());
        assert_eq!(x, a1);
    }

    #[test]
    fn enumeration_order_and_counts() {
        let two = VariableSet::new([("A", vec!["a1", "a2"]), ("B", vec!["b1", "b2"])]).unwrap();
        let listed: Vec<String> = enumerate_outcomes(&two)
            .map(|o| two.format_values(&o))
            .collect();
        assert_eq!(listed, ["a1 b1", "a1 b2", "a2 b1", "a2 b2"]);

        let dinner = VariableSet::new([
            ("A", vec!["a1", "a2"]),
            ("B", vec!["b1", "b2", "b3"]),
            ("C", vec!["c1", "c2"]),
            ("D", vec!["d1", "d2"]),
        ])
        .unwrap();
        assert_eq!(enumerate_outcomes(&dinner).count(), 24);

        let one = VariableSet::new([("X", vec!["x1", "x2", "x3"])]).unwrap();
        let listed: Vec<String> = enumerate_outcomes(&one)
            .map(|o| one.format_values(&o))
            .collect();
        assert_eq!(listed, ["x1", "x2", "x3"]);
    }

    #[test]
    fn empty_scope_has_one_assignment() {
        let vars = abc();
        let all: Vec<Outcome> = Assignments::new(&vars, &[]).collect();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_empty());
    }

    #[test]
    fn outcome_must_be_complete() {
        let vars = abc();
        let a1b1 = vars.parse_assignment("A=a1,B=b1").unwrap();
        assert_eq!(
            Outcome::new(&vars.all(), a1b1).unwrap_err(),
            Error::IncompleteOutcome
        );
    }

    fn assignment_strategy() -> impl Strategy<Value = PartialAssignment> {
        proptest::collection::btree_map(0usize..6, 0usize..3, 0..6)
            .prop_map(|m| m.into_iter().map(|(k, v)| (VarId(k), ValueId(v))).collect())
    }

    proptest! {
        #[test]
        fn projection_composes(a in assignment_strategy(), mask_w in 0u32..64, mask_u in 0u32..64) {
            let bound: Vec<VarId> = a.vars().collect();
            let w: Vec<VarId> = bound.iter().copied().filter(|v| mask_w & (1 << v.0) != 0).collect();
            let u: Vec<VarId> = w.iter().copied().filter(|v| mask_u & (1 << v.0) != 0).collect();
            let direct = a.project(&u).unwrap();
            let twice = a.project(&w).unwrap().project(&u).unwrap();
            prop_assert_eq!(direct, twice);
        }

        #[test]
        fn merge_is_commutative_and_associative(
            a in assignment_strategy(),
            b in assignment_strategy(),
            c in assignment_strategy(),
        ) {
            prop_assert_eq!(a.merge(&PartialAssignment::new()).unwrap(), a.clone());
            if a.agrees_with(&b) {
                prop_assert_eq!(a.merge(&b).unwrap(), b.merge(&a).unwrap());
            } else {
                prop_assert!(a.merge(&b).is_err());
            }
            if a.agrees_with(&b) && b.agrees_with(&c) && a.agrees_with(&c) {
                let left = a.merge(&b).unwrap().merge(&c).unwrap();
                let right = a.merge(&b.merge(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }
        }

        #[test]
        fn enumeration_yields_the_product(sizes in proptest::collection::vec(2usize..4, 0..5)) {
            let vars = VariableSet::new(sizes.iter().enumerate().map(|(i, n)| {
                (format!("V{i}"), (0..*n).map(|j| format!("v{j}")).collect::<Vec<_>>())
            }))
            .unwrap();
            let all: Vec<Outcome> = enumerate_outcomes(&vars).collect();
            let expected: usize = sizes.iter().product();
            prop_assert_eq!(all.len(), expected);
            let distinct: std::collections::BTreeSet<_> = all.iter().cloned().collect();
            prop_assert_eq!(distinct.len(), expected);
            prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
