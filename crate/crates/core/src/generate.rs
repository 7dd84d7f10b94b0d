//! Seeded random instances.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cpnet::{CpNet, Cpt, PreferenceRow};
use crate::cprnet::{AriStatement, CprNet};
use crate::csp::{Constraint, ConstraintSet};
use crate::document::{Model, ModelDocument, ModelKind};
use crate::error::{Error, Result};
use crate::lptree::{LpNode, LpTree};
use crate::model::{Assignments, Outcome, PartialAssignment, ValueId, VarId, VariableSet};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub kind: ModelKind,
    pub var_count: usize,
    pub domain_size: usize,
    pub max_parents: usize,
    pub constraint_count: usize,
    /// Fraction of tuples each constraint forbids.
    pub tightness: f64,
    /// Probability that a CP-net row is partial instead of total.
    pub partial_rows: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::CpNet,
            var_count: 4,
            domain_size: 2,
            max_parents: 2,
            constraint_count: 0,
            tightness: 0.0,
            partial_rows: 0.0,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.var_count == 0 {
            return bad("at least one variable is required");
        }
        if self.var_count > 26 * 9 {
            return bad("too many variables");
        }
        if self.domain_size < 2 {
            return bad("domains need at least two values");
        }
        if self.domain_size > 64 {
            return bad("domains are limited to 64 values");
        }
        if !(0.0..=1.0).contains(&self.tightness) {
            return bad("tightness must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.partial_rows) {
            return bad("partial row probability must lie in [0, 1]");
        }
        if self.partial_rows > 0.0 && self.kind != ModelKind::CpNet {
            return bad("partial rows are only allowed in CP-nets");
        }
        Ok(())
    }
}

/// Variable `i` is named by a letter (`A`..`Z`, then `A1`..) and its
/// values by the lowercase letter with an index.
fn variable_set(sizes: &[usize]) -> VariableSet {
    let decls = sizes.iter().enumerate().map(|(i, n)| {
        let letter = (b'A' + (i % 26) as u8) as char;
        let name = if i < 26 {
            letter.to_string()
        } else {
            format!("{letter}{}", i / 26)
        };
        let lower = name.to_lowercase();
        let values: Vec<String> = (1..=*n).map(|j| format!("{lower}{j}")).collect();
        (name, values)
    });
    VariableSet::new(decls).expect("generated names are valid")
}

fn random_total(rng: &mut ChaCha8Rng, size: usize) -> PreferenceRow {
    let mut order: Vec<ValueId> = (0..size).map(ValueId).collect();
    order.shuffle(rng);
    PreferenceRow::Total(order)
}

/// A random subset of the pairs of a random ranking, closed transitively.
fn random_partial(rng: &mut ChaCha8Rng, size: usize) -> PreferenceRow {
    let mut order: Vec<ValueId> = (0..size).map(ValueId).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..size {
        for j in i + 1..size {
            if rng.gen_bool(0.5) {
                pairs.push((order[i], order[j]));
            }
        }
    }
    PreferenceRow::partial(pairs, size).expect("pairs follow one ranking")
}

/// Random DAG consistent with `order`: every variable picks up to
/// `max_parents` parents among the variables before it.
fn random_parents(rng: &mut ChaCha8Rng, order: &[VarId], max_parents: usize) -> Vec<Vec<VarId>> {
    let mut parents = vec![Vec::new(); order.len()];
    for (pos, v) in order.iter().enumerate() {
        let k = rng.gen_range(0..=max_parents.min(pos));
        let mut chosen: Vec<VarId> = order[..pos].choose_multiple(rng, k).copied().collect();
        chosen.sort();
        parents[v.0] = chosen;
    }
    parents
}

fn permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<VarId> {
    let mut order: Vec<VarId> = (0..n).map(VarId).collect();
    order.shuffle(rng);
    order
}

/// Random acyclic CP-net; each row is partial with probability `partial`.
pub fn random_cpnet(rng: &mut ChaCha8Rng, n: usize, domain: usize, max_parents: usize, partial: f64) -> CpNet {
    let vars = Arc::new(variable_set(&vec![domain; n]));
    let order = permutation(rng, n);
    let parents = random_parents(rng, &order, max_parents);
    let cpts = vars
        .ids()
        .map(|v| {
            let count = vars.product_size(&parents[v.0]) as usize;
            let rows = (0..count)
                .map(|_| {
                    if partial > 0.0 && rng.gen_bool(partial) {
                        random_partial(rng, domain)
                    } else {
                        random_total(rng, domain)
                    }
                })
                .collect();
            Cpt::from_rows(&vars, v, &parents[v.0], rows).expect("complete table")
        })
        .collect();
    CpNet::new(vars, cpts, None).expect("acyclic by construction")
}

/// Random totally dependent CP-net together with the order its DAG was
/// drawn from. Variables with children are binary; each child's row is a
/// base ranking, reversed when the parent value indices sum to an odd
/// number, so flipping any single parent reverses the row.
pub fn random_totally_dependent(
    rng: &mut ChaCha8Rng,
    n: usize,
    domain: usize,
    max_parents: usize,
) -> (CpNet, Vec<VarId>) {
    let order = permutation(rng, n);
    let parents = random_parents(rng, &order, max_parents);
    let has_children: BTreeSet<VarId> = parents.iter().flatten().copied().collect();
    let sizes: Vec<usize> = (0..n)
        .map(|i| if has_children.contains(&VarId(i)) { 2 } else { domain })
        .collect();
    let vars = Arc::new(variable_set(&sizes));
    let cpts = vars
        .ids()
        .map(|v| {
            let base = random_total(rng, vars.domain_size(v));
            let rows = Assignments::new(&vars, &parents[v.0])
                .map(|ctx| {
                    let parity: usize = ctx.iter().map(|(_, x)| x.0).sum();
                    if parity.is_multiple_of(2) {
                        base.clone()
                    } else {
                        base.reversed()
                    }
                })
                .collect();
            Cpt::from_rows(&vars, v, &parents[v.0], rows).expect("complete table")
        })
        .collect();
    let net = CpNet::new(vars, cpts, None).expect("acyclic by construction");
    (net, order)
}

/// Random CPR-net: a totally dependent base whose unlinked pairs are
/// ordered along the same random order the DAG follows.
pub fn random_cprnet(rng: &mut ChaCha8Rng, n: usize, domain: usize, max_parents: usize) -> CprNet {
    let (base, order) = random_totally_dependent(rng, n, domain, max_parents);
    let pos = |v: VarId| order.iter().position(|o| *o == v).expect("in order");
    let aris = base
        .unlinked_pairs()
        .into_iter()
        .map(|(a, b)| {
            if pos(a) < pos(b) {
                AriStatement::new(a, b)
            } else {
                AriStatement::new(b, a)
            }
        })
        .collect();
    CprNet::new(base, aris).expect("ARIs follow the DAG order")
}

/// Random LP-tree: every node picks a remaining variable, a table
/// conditioned on up to `max_parents` random ancestors, and a random
/// partition of its domain into branches.
pub fn random_lptree(rng: &mut ChaCha8Rng, n: usize, domain: usize, max_parents: usize) -> LpTree {
    let vars = Arc::new(variable_set(&vec![domain; n]));
    let remaining: Vec<VarId> = vars.all();
    let root = random_node(rng, &vars, remaining, &mut Vec::new(), max_parents);
    LpTree::new(vars, root).expect("valid by construction")
}

fn random_node(
    rng: &mut ChaCha8Rng,
    vars: &VariableSet,
    mut remaining: Vec<VarId>,
    ancestors: &mut Vec<VarId>,
    max_parents: usize,
) -> LpNode {
    let var = remaining.remove(rng.gen_range(0..remaining.len()));
    let k = rng.gen_range(0..=max_parents.min(ancestors.len()));
    let mut scope: Vec<VarId> = ancestors.choose_multiple(rng, k).copied().collect();
    scope.sort();
    let size = vars.domain_size(var);
    let rows = (0..vars.product_size(&scope)).map(|_| random_total(rng, size)).collect();
    let cpt = Cpt::from_rows(vars, var, &scope, rows).expect("complete table");
    if remaining.is_empty() {
        return LpNode::leaf(var, cpt);
    }
    let groups = rng.gen_range(1..=size);
    let mut values: Vec<ValueId> = (0..size).map(ValueId).collect();
    values.shuffle(rng);
    let mut labels: Vec<BTreeSet<ValueId>> = vec![BTreeSet::new(); groups];
    for (i, v) in values.into_iter().enumerate() {
        // the first `groups` values seed one group each, so none is empty
        let g = if i < groups { i } else { rng.gen_range(0..groups) };
        labels[g].insert(v);
    }
    ancestors.push(var);
    let children = labels
        .into_iter()
        .map(|l| (l, random_node(rng, vars, remaining.clone(), ancestors, max_parents)))
        .collect();
    ancestors.pop();
    LpNode::new(var, cpt, children)
}

/// `count` random binary constraints (unary when there is one variable),
/// each forbidding `round(tightness * size)` tuples of its table.
pub fn random_constraints(
    rng: &mut ChaCha8Rng,
    vars: &Arc<VariableSet>,
    count: usize,
    tightness: f64,
) -> ConstraintSet {
    let all = vars.all();
    let constraints = (0..count)
        .map(|_| {
            let arity = all.len().min(2);
            let mut scope: Vec<VarId> = all.choose_multiple(rng, arity).copied().collect();
            scope.sort();
            let mut tuples: Vec<Vec<ValueId>> = Assignments::new(vars, &scope)
                .map(|o: Outcome| o.values_of(&scope).expect("complete"))
                .collect();
            let forbid = (tightness * tuples.len() as f64).round() as usize;
            tuples.shuffle(rng);
            tuples.truncate(tuples.len() - forbid);
            Constraint::new(vars, scope, tuples).expect("valid table")
        })
        .collect();
    ConstraintSet::new(Arc::clone(vars), constraints).expect("scopes are known")
}

/// Generates a document. The same configuration always yields the same
/// document.
pub fn generate(cfg: &GeneratorConfig) -> Result<ModelDocument> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (n, d, p) = (cfg.var_count, cfg.domain_size, cfg.max_parents);
    let model = match cfg.kind {
        ModelKind::CpNet => Model::CpNet(random_cpnet(&mut rng, n, d, p, cfg.partial_rows)),
        ModelKind::CprNet => Model::CprNet(random_cprnet(&mut rng, n, d, p)),
        ModelKind::LpTree => Model::LpTree(random_lptree(&mut rng, n, d, p)),
    };
    let constraints = (cfg.constraint_count > 0)
        .then(|| random_constraints(&mut rng, model.vars(), cfg.constraint_count, cfg.tightness));
    Ok(ModelDocument { model, constraints })
}

/// A random partial assignment binding each variable with probability 1/2.
pub fn random_assignment(rng: &mut ChaCha8Rng, vars: &VariableSet) -> PartialAssignment {
    let mut pa = PartialAssignment::new();
    for v in vars.ids() {
        if rng.gen_bool(0.5) {
            pa.set(v, ValueId(rng.gen_range(0..vars.domain_size(v))));
        }
    }
    pa
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpnet::ArcClass;
    use crate::document::{parse_model, print_model};

    fn cfg(kind: ModelKind, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            kind,
            var_count: 4,
            domain_size: 3,
            max_parents: 2,
            constraint_count: 3,
            tightness: 0.3,
            partial_rows: 0.0,
            seed,
        }
    }

    #[test]
    fn deterministic_and_round_trips() {
        for kind in [ModelKind::CpNet, ModelKind::CprNet, ModelKind::LpTree] {
            for seed in 0..20 {
                let a = print_model(&generate(&cfg(kind, seed)).unwrap());
                let b = print_model(&generate(&cfg(kind, seed)).unwrap());
                assert_eq!(a, b);
                let doc = generate(&cfg(kind, seed)).unwrap();
                assert_eq!(parse_model(&a).unwrap(), doc);
            }
        }
    }

    #[test]
    fn partial_rows_round_trip() {
        let c = GeneratorConfig {
            partial_rows: 0.5,
            ..cfg(ModelKind::CpNet, 3)
        };
        for seed in 0..20 {
            let doc = generate(&GeneratorConfig { seed, ..c.clone() }).unwrap();
            assert_eq!(parse_model(&print_model(&doc)).unwrap(), doc);
        }
    }

    #[test]
    fn totally_dependent_generation() {
        let mut r = rng(7);
        for _ in 0..50 {
            let (net, _) = random_totally_dependent(&mut r, 4, 3, 2);
            for (x, y) in net.edges() {
                assert_eq!(net.classify_arc(x, y).unwrap(), ArcClass::TotalDependency);
            }
        }
    }

    #[test]
    fn tightness_extremes() {
        let loose = generate(&GeneratorConfig {
            tightness: 0.0,
            ..cfg(ModelKind::CprNet, 1)
        })
        .unwrap();
        for c in loose.constraints.unwrap().constraints() {
            assert_eq!(c.allowed().len() as u128, loose.model.vars().product_size(c.scope()));
        }
        let tight = generate(&GeneratorConfig {
            tightness: 1.0,
            ..cfg(ModelKind::LpTree, 1)
        })
        .unwrap();
        assert!(tight.constraints.unwrap().constraints().iter().all(|c| c.is_empty()));
    }

    #[test]
    fn invalid_configs() {
        for bad in [
            GeneratorConfig { var_count: 0, ..GeneratorConfig::default() },
            GeneratorConfig { domain_size: 1, ..GeneratorConfig::default() },
            GeneratorConfig { tightness: 1.5, ..GeneratorConfig::default() },
            GeneratorConfig { partial_rows: 0.5, kind: ModelKind::LpTree, ..GeneratorConfig::default() },
        ] {
            assert!(matches!(generate(&bad), Err(Error::InvalidConfig(_))));
        }
    }
}
