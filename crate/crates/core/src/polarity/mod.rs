//! Characteristic sets of natural theories and the positive polarity
//! criterion: signed dependency graph, closures, equivalence classes,
//! decorations and the staging order.

mod charset;
mod classes;
mod decorate;
mod graph;

use serde::Serialize;

pub use charset::{CharacteristicSet, Rhs};
pub use classes::{closure_of, equivalence_classes, ClassPoset};
pub use decorate::{
    decorate_class, stage_plan, Constraint, Decoration, DecorationResult, Polarity, Stage,
    StagePlan,
};
pub use graph::{check_positive_polarity, signed_graph, Edge, PolarityVerdict, Sign, SignedGraph, Witness};

use crate::error::Result;
use crate::types::{validate_natural, TheorySpec};

pub fn completion(a: &CharacteristicSet) -> CharacteristicSet {
    a.completion()
}

/// Everything the polarity analysis computes for one natural theory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolarityReport {
    pub complete_set: CharacteristicSet,
    pub classes: Vec<Vec<String>>,
    pub order: Vec<(usize, usize)>,
    pub graph_edges: Vec<Edge>,
    pub verdict: PolarityVerdict,
    pub caveats: Vec<String>,
    pub stages: Option<Vec<Stage>>,
}

impl PolarityReport {
    pub fn passes(&self) -> bool {
        self.verdict == PolarityVerdict::Pass
    }
}

pub fn analyze(t: &TheorySpec) -> Result<PolarityReport> {
    let complete_set = validate_natural(t)?;
    let poset = equivalence_classes(&complete_set);
    let graph = signed_graph(&complete_set);
    let verdict = check_positive_polarity(&complete_set);
    let stages = match (&verdict, stage_plan(&complete_set)) {
        (PolarityVerdict::Pass, StagePlan::Stages(s)) => Some(s),
        _ => None,
    };
    let caveats = if t.order.is_empty() {
        Vec::new()
    } else {
        vec![format!(
            "{} order clause(s) take part in subtyping but not in the characteristic set",
            t.order.len()
        )]
    };
    Ok(PolarityReport {
        classes: poset
            .classes
            .iter()
            .map(|c| c.iter().cloned().collect())
            .collect(),
        order: poset.order.iter().copied().collect(),
        graph_edges: graph.edges.into_iter().collect(),
        verdict,
        caveats,
        stages,
        complete_set,
    })
}
