//! Qualitative preference models (CP-nets, CPR-nets, LP-trees), a small
//! constraint layer and solvers for constrained optimization and
//! dominance testing.

pub mod cpnet;
pub mod cprnet;
pub mod csp;
pub mod document;
pub mod error;
pub mod generate;
pub mod lptree;
pub mod model;
pub mod solvers;
pub mod verify;

pub use cpnet::{ArcClass, CpNet, Cpt, FlipGraph, OrderingAnswer, PreferenceRow};
pub use cprnet::{AriStatement, CprNet, DEFAULT_OUTCOME_LIMIT};
pub use csp::{Consistency, Constraint, ConstraintSet, PropagationResult};
pub use document::{parse_model, print_model, Model, ModelDocument, ModelKind};
pub use error::{Error, Result};
pub use generate::{generate, GeneratorConfig};
pub use lptree::{LpNode, LpTree};
pub use model::{
    enumerate_outcomes, Outcome, PartialAssignment, Preference, ValueId, VarId, Variable, VariableSet,
};
pub use solvers::{
    acyclic_cp_dt, search_cpr, search_cpr_with, search_lp, search_lp_with, Answer, DominanceTester,
    DominanceVerdict, DtOptions, SolveResult, SolverOptions, TraceEvent,
};

#[cfg(test)]
mod fixtures {
    use crate::{parse_model, ConstraintSet, CpNet, CprNet, LpTree, Model};

    fn load(text: &str) -> (Model, Option<ConstraintSet>) {
        let doc = parse_model(text).expect("fixture parses");
        (doc.model, doc.constraints)
    }

    fn cp(text: &str) -> CpNet {
        match load(text).0 {
            Model::CpNet(n) => n,
            _ => panic!("expected a CP-net"),
        }
    }

    fn cpr(text: &str) -> (CprNet, Option<ConstraintSet>) {
        match load(text) {
            (Model::CprNet(n), c) => (n, c),
            _ => panic!("expected a CPR-net"),
        }
    }

    fn lp(text: &str) -> (LpTree, Option<ConstraintSet>) {
        match load(text) {
            (Model::LpTree(t), c) => (t, c),
            _ => panic!("expected an LP-tree"),
        }
    }

    pub fn dinner() -> CpNet {
        cp(include_str!("../../../fixtures/fig1-cpnet"))
    }

    pub fn chain() -> CpNet {
        cp(include_str!("../../../fixtures/fig3-cpnet"))
    }

    pub fn chain_cpr() -> CprNet {
        cpr(include_str!("../../../fixtures/fig4-cprnet")).0
    }

    pub fn constrained_cpr() -> (CprNet, ConstraintSet) {
        let (n, c) = cpr(include_str!("../../../fixtures/fig5-cprnet"));
        (n, c.expect("constraints"))
    }

    pub fn dinner_lp() -> LpTree {
        lp(include_str!("../../../fixtures/fig2-lptree")).0
    }

    pub fn constrained_lp() -> (LpTree, ConstraintSet) {
        let (t, c) = lp(include_str!("../../../fixtures/fig7-lptree"));
        (t, c.expect("constraints"))
    }

    pub fn csp_example() -> ConstraintSet {
        load(include_str!("../../../fixtures/csp-example")).1.expect("constraints")
    }
}
