//! Randomized cross-checks of the solvers against brute-force oracles.
//!
//! Every suite draws its instances from seeded generators, so a failing
//! case can be replayed from the seed in its failure message.

use rand::Rng;

use crate::cpnet::{CpNet, FlipGraph};
use crate::cprnet::{CprNet, DEFAULT_OUTCOME_LIMIT};
use crate::csp::{Consistency, ConstraintSet};
use crate::error::{Error, Result};
use crate::generate::{
    random_assignment, random_constraints, random_cpnet, random_cprnet, random_lptree, random_totally_dependent, rng,
};
use crate::lptree::LpTree;
use crate::model::{Outcome, PartialAssignment, Preference, VarId};
use crate::solvers::{is_flip_sequence, search_cpr_with, search_lp_with, Answer, DominanceTester, DtOptions, SolverOptions};

pub const TIGHTNESS_LEVELS: [f64; 4] = [0.0, 0.3, 0.6, 0.9];

/// Outcome of one suite.
#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }

    fn fail(&mut self, msg: String) {
        // keep reports readable when something is badly broken
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} cases, {} checks, {} failures",
            self.name,
            self.cases,
            self.checks,
            self.failures.len()
        )
    }
}

/// How many instances each suite draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSizes {
    pub dominance: usize,
    pub optimization: usize,
    pub adjacency: usize,
    pub reduction: usize,
    pub seed: u64,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self {
            dominance: 240,
            optimization: 240,
            adjacency: 120,
            reduction: 120,
            seed: 1,
        }
    }
}

fn case_seed(base: u64, suite: u64, i: usize) -> u64 {
    base.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (suite << 32) ^ i as u64
}

/// Shape of the i-th dominance instance: n in {2,3,4}, |D| in {2,3},
/// partial rows mixed in for n <= 3.
fn dominance_shape(i: usize) -> (usize, usize, f64) {
    let n = 2 + i % 3;
    let d = 2 + (i / 3) % 2;
    let partial = if n <= 3 && i % 4 < 2 { 0.5 } else { 0.0 };
    (n, d, partial)
}

pub fn dominance_corpus(count: usize, seed: u64) -> Vec<(u64, CpNet)> {
    (0..count)
        .map(|i| {
            let s = case_seed(seed, 1, i);
            let (n, d, partial) = dominance_shape(i);
            (s, random_cpnet(&mut rng(s), n, d, 2, partial))
        })
        .collect()
}

/// The recursive dominance test agrees with reachability in the flip graph
/// on every ordered pair of distinct outcomes, and every witness is an
/// improving flip sequence between the right endpoints.
pub fn dominance_suite(count: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("dominance vs flip-graph oracle");
    for (s, net) in dominance_corpus(count, seed) {
        report.cases += 1;
        let graph = FlipGraph::new(&net, DEFAULT_OUTCOME_LIMIT)?;
        let mut tester = DominanceTester::new(&net, DtOptions::default());
        let outcomes = graph.outcomes();
        for (i, a) in outcomes.iter().enumerate() {
            for (j, b) in outcomes.iter().enumerate() {
                if i == j {
                    continue;
                }
                report.checks += 1;
                let v = tester.test(a, b)?;
                let expected = graph.dominates_idx(i, j);
                let vars = net.vars();
                if (v.answer == Answer::Yes) != expected {
                    report.fail(format!(
                        "seed {s}: {} vs {}: got {}, oracle says {}",
                        vars.format(a),
                        vars.format(b),
                        v.answer,
                        if expected { "yes" } else { "no" }
                    ));
                }
                if let Some(w) = &v.witness {
                    if !is_flip_sequence(&net, w) || w.first() != Some(b) || w.last() != Some(a) {
                        report.fail(format!("seed {s}: bad witness for {} vs {}", vars.format(a), vars.format(b)));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// One constrained optimization instance.
pub enum Instance {
    Cpr(CprNet, ConstraintSet),
    Lp(LpTree, ConstraintSet),
}

fn instance_shape(i: usize) -> (usize, usize, f64) {
    let n = 1 + i % 4;
    let d = 2 + (i / 4) % 2;
    let tightness = TIGHTNESS_LEVELS[(i / 8) % TIGHTNESS_LEVELS.len()];
    (n, d, tightness)
}

/// `count` CPR-net and `count` LP-tree instances, n <= 4, |D| <= 3, cycling
/// through the tightness levels.
pub fn optimization_corpus(count: usize, seed: u64) -> Vec<(u64, Instance)> {
    let mut out = Vec::with_capacity(2 * count);
    for i in 0..count {
        let (n, d, tightness) = instance_shape(i);
        let s = case_seed(seed, 2, i);
        let mut r = rng(s);
        let net = random_cprnet(&mut r, n, d, 2);
        let k = r.gen_range(1..=4);
        let cs = random_constraints(&mut r, net.vars(), k, tightness);
        out.push((s, Instance::Cpr(net, cs)));

        let s = case_seed(seed, 3, i);
        let mut r = rng(s);
        let tree = random_lptree(&mut r, n, d, 2);
        let k = r.gen_range(1..=4);
        let cs = random_constraints(&mut r, tree.vars(), k, tightness);
        out.push((s, Instance::Lp(tree, cs)));
    }
    out
}

fn best_feasible(cs: &ConstraintSet, cmp: impl Fn(&Outcome, &Outcome) -> std::cmp::Ordering) -> Result<Option<Outcome>> {
    Ok(cs.solve_all(DEFAULT_OUTCOME_LIMIT)?.into_iter().min_by(cmp))
}

/// Both searches return the best feasible outcome under the model's order,
/// and nothing exactly when no outcome is feasible, at every propagation
/// level.
pub fn optimization_suite(count: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("constrained optimization vs brute force");
    for (s, inst) in optimization_corpus(count, seed) {
        report.cases += 1;
        let (expected, vars) = match &inst {
            Instance::Cpr(net, cs) => (best_feasible(cs, |a, b| net.cmp_outcomes(a, b))?, net.vars()),
            Instance::Lp(tree, cs) => (best_feasible(cs, |a, b| tree.cmp_outcomes(a, b))?, tree.vars()),
        };
        for consistency in [Consistency::None, Consistency::ForwardChecking, Consistency::Gac] {
            report.checks += 1;
            let options = SolverOptions { consistency };
            let got = match &inst {
                Instance::Cpr(net, cs) => search_cpr_with(net, cs, options)?.outcome,
                Instance::Lp(tree, cs) => search_lp_with(tree, cs, options)?.outcome,
            };
            if got != expected {
                let show = |o: &Option<Outcome>| o.as_ref().map_or("infeasible".to_string(), |o| vars.format(o));
                report.fail(format!(
                    "seed {s} ({consistency:?}): got {}, expected {}",
                    show(&got),
                    show(&expected)
                ));
            }
        }
    }
    Ok(report)
}

pub fn adjacency_corpus(count: usize, seed: u64) -> Vec<(u64, CpNet)> {
    (0..count)
        .map(|i| {
            let s = case_seed(seed, 4, i);
            let n = 2 + i % 2;
            let d = 2 + (i / 2) % 2;
            (s, random_totally_dependent(&mut rng(s), n, d, 2).0)
        })
        .collect()
}

fn fully_adjacent(net: &CpNet) -> bool {
    let scope = net.scope();
    scope.iter().enumerate().all(|(i, &x)| {
        scope[i + 1..]
            .iter()
            .all(|&y| net.parents(x).contains(&y) || net.parents(y).contains(&x))
    })
}

/// On totally dependent nets: every pair of variables is joined by an arc
/// exactly when every pair of distinct outcomes is ordered by dominance.
pub fn adjacency_suite(count: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("full adjacency iff total dominance");
    let (mut complete, mut incomplete) = (0usize, 0usize);
    for (s, net) in adjacency_corpus(count, seed) {
        report.cases += 1;
        report.checks += 1;
        if !net.is_totally_dependent() {
            report.fail(format!("seed {s}: generated net is not totally dependent"));
            continue;
        }
        let graph = FlipGraph::new(&net, DEFAULT_OUTCOME_LIMIT)?;
        let n = graph.outcomes().len();
        let incomparable = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !graph.dominates_idx(i, j) && !graph.dominates_idx(j, i));
        let adjacent = fully_adjacent(&net);
        if adjacent {
            complete += 1;
        } else {
            incomplete += 1;
        }
        match (adjacent, incomparable) {
            (true, Some((i, j))) => report.fail(format!(
                "seed {s}: fully adjacent but {} and {} are incomparable",
                net.vars().format(&graph.outcomes()[i]),
                net.vars().format(&graph.outcomes()[j])
            )),
            (false, None) => {
                report.fail(format!("seed {s}: some pair is not adjacent yet all outcomes are comparable"))
            }
            _ => {}
        }
    }
    if complete == 0 || incomplete == 0 {
        report.fail(format!(
            "corpus is one-sided: {complete} fully adjacent, {incomplete} not"
        ));
    }
    Ok(report)
}

pub fn reduction_corpus(count: usize, seed: u64) -> Vec<(u64, LpTree, PartialAssignment)> {
    (0..count)
        .map(|i| {
            let s = case_seed(seed, 5, i);
            let mut r = rng(s);
            let n = 2 + i % 3;
            let d = 2 + (i / 3) % 2;
            let tree = random_lptree(&mut r, n, d, 2);
            let w = random_assignment(&mut r, tree.vars());
            (s, tree, w)
        })
        .collect()
}

/// Reducing an LP-tree by `w` yields a compatible tree whose order is the
/// original order restricted to outcomes extending `w`.
pub fn reduction_suite(count: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("LP-tree reduction");
    for (s, tree, w) in reduction_corpus(count, seed) {
        report.cases += 1;
        report.checks += 2;
        let reduced = tree.reduce(&w)?;
        if !reduced.is_compatible(&tree, &w, DEFAULT_OUTCOME_LIMIT)? {
            report.fail(format!("seed {s}: reduction by {} is not compatible", tree.vars().format(&w)));
        }
        let bound: Vec<VarId> = w.vars().collect();
        let expected: Vec<PartialAssignment> = tree
            .total_order(DEFAULT_OUTCOME_LIMIT)?
            .into_iter()
            .filter(|o| o.extends(&w))
            .map(|o| o.without(&bound))
            .collect();
        let got: Vec<PartialAssignment> = reduced
            .total_order(DEFAULT_OUTCOME_LIMIT)?
            .into_iter()
            .map(Outcome::into_assignment)
            .collect();
        if got != expected {
            report.fail(format!("seed {s}: reduced order differs under {}", tree.vars().format(&w)));
        }
    }
    Ok(report)
}

/// Checks that `compare` is a strict total order on all outcomes and that
/// `total_order` lists them best first.
fn check_linear_order(
    outcomes: &[Outcome],
    listed: &[Outcome],
    compare: impl Fn(&Outcome, &Outcome) -> Result<Preference>,
) -> std::result::Result<u64, String> {
    let mut checks = 0;
    if listed.len() != outcomes.len() {
        return Err(format!("total order lists {} of {} outcomes", listed.len(), outcomes.len()));
    }
    for (i, a) in listed.iter().enumerate() {
        for (j, b) in listed.iter().enumerate() {
            checks += 1;
            let got = compare(a, b);
            match (i.cmp(&j), got) {
                (std::cmp::Ordering::Equal, Err(Error::EqualOutcomes)) => {}
                (std::cmp::Ordering::Less, Ok(Preference::FirstPreferred)) => {}
                (std::cmp::Ordering::Greater, Ok(Preference::SecondPreferred)) => {}
                (_, got) => return Err(format!("positions {i} and {j} compare as {got:?}")),
            }
        }
    }
    // a listing without repeats that agrees with every pairwise comparison
    // makes the relation asymmetric, transitive and total
    let mut seen: Vec<&Outcome> = listed.iter().collect();
    seen.sort();
    seen.dedup();
    if seen.len() != listed.len() {
        return Err("total order repeats an outcome".to_string());
    }
    Ok(checks)
}

/// Asymmetry, transitivity and totality of the CPR-net and LP-tree orders
/// over every model in the other suites' corpora.
pub fn order_suite(sizes: &SuiteSizes) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("strict total orders");
    let mut cprs: Vec<(u64, CprNet)> = Vec::new();
    let mut lps: Vec<(u64, LpTree)> = Vec::new();
    for (s, inst) in optimization_corpus(sizes.optimization, sizes.seed) {
        match inst {
            Instance::Cpr(net, _) => cprs.push((s, net)),
            Instance::Lp(tree, _) => lps.push((s, tree)),
        }
    }
    for (s, tree, w) in reduction_corpus(sizes.reduction, sizes.seed) {
        lps.push((s, tree.reduce(&w)?));
        lps.push((s, tree));
    }
    // CPR-nets over the shapes used for dominance and adjacency
    for i in 0..sizes.dominance.max(sizes.adjacency) {
        let s = case_seed(sizes.seed, 6, i);
        let (n, d, _) = dominance_shape(i);
        cprs.push((s, random_cprnet(&mut rng(s), n, d, 2)));
    }
    for (s, net) in &cprs {
        report.cases += 1;
        let outcomes: Vec<Outcome> = net.base().outcomes().collect();
        let listed = net.total_order(DEFAULT_OUTCOME_LIMIT)?;
        match check_linear_order(&outcomes, &listed, |a, b| net.compare(a, b)) {
            Ok(c) => report.checks += c,
            Err(e) => report.fail(format!("CPR-net seed {s}: {e}")),
        }
    }
    for (s, tree) in &lps {
        report.cases += 1;
        let outcomes: Vec<Outcome> = crate::model::Assignments::new(tree.vars(), tree.scope()).collect();
        let listed = tree.total_order(DEFAULT_OUTCOME_LIMIT)?;
        match check_linear_order(&outcomes, &listed, |a, b| tree.compare(a, b)) {
            Ok(c) => report.checks += c,
            Err(e) => report.fail(format!("LP-tree seed {s}: {e}")),
        }
    }
    Ok(report)
}

/// Runs every suite at the given sizes.
pub fn run_all(sizes: &SuiteSizes) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        dominance_suite(sizes.dominance, sizes.seed)?,
        optimization_suite(sizes.optimization, sizes.seed)?,
        adjacency_suite(sizes.adjacency, sizes.seed)?,
        reduction_suite(sizes.reduction, sizes.seed)?,
        order_suite(sizes)?,
    ])
}
