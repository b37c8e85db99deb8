//! One-step predicate transformers (Bellman operators) on valuations.
//!
//! Each operator is a pure monotone map `[I, K] → [I, K]` for a finite index
//! set `I` and value lattice `K`, parameterized by a model. Word-indexed
//! instances run over an explicitly finite index domain: all words up to a
//! length bound (suffix-closed by construction) or the suffix-rotation
//! closure of a set of lasso words.

pub(crate) mod dlts;
mod lift;
pub(crate) mod mc;
pub(crate) mod mdp;
pub(crate) mod resource;
pub(crate) mod ufa;

pub use dlts::{step_dlts_partial, step_dlts_total, LassoDomain};
pub use lift::{lift_partial_step, lift_total_step};
pub use mc::{step_mc_partial, step_mc_total};
pub use mdp::{step_mdp_partial, step_mdp_total};
pub use resource::{step_resource, step_resource_reach};
pub use ufa::{
    step_ufa_count, step_ufa_lang, step_ufa_prob_count, step_ufa_prob_lang, LetterMc, WordDomain,
};

use crate::lattice::Lattice;
use crate::model::{Dlts, MarkovChain, Mdp, Nfa, ResourceGraph};
use crate::valuation::{IndexSet, Valuation};
use std::sync::Arc;
use thiserror::Error;

/// Default bound on per-state selection products in frontier steps.
pub const DEFAULT_EXPLOSION_LIMIT: u64 = 100_000;

#[derive(Debug, Error)]
pub enum StepError {
    #[error("frontier explosion at state {state}: {size} selections exceed limit {limit}")]
    FrontierExplosion {
        state: String,
        size: u64,
        limit: u64,
    },
    #[error("decomposition explosion: {size} global decompositions exceed limit {limit}")]
    DecompositionExplosion { size: u64, limit: u64 },
    #[error("valuation has {got} entries, operator index has {want}")]
    IndexMismatch { got: usize, want: usize },
}

#[derive(Clone, Debug)]
enum OperatorKind {
    McPartial(Arc<MarkovChain>),
    McTotal(Arc<MarkovChain>),
    MdpPartial {
        mdp: Arc<Mdp>,
        limit: u64,
    },
    MdpTotal(Arc<Mdp>),
    ResourceBounded(Arc<ResourceGraph>),
    ResourceReach(Arc<ResourceGraph>),
    DltsPartial {
        dlts: Arc<Dlts>,
        dom: Arc<LassoDomain>,
    },
    DltsTotal {
        dlts: Arc<Dlts>,
        dom: Arc<LassoDomain>,
    },
    UfaLang {
        nfa: Arc<Nfa>,
        dom: Arc<WordDomain>,
    },
    UfaCount {
        nfa: Arc<Nfa>,
        dom: Arc<WordDomain>,
    },
    UfaProbLang {
        nfa: Arc<Nfa>,
        mc: Arc<LetterMc>,
        dom: Arc<WordDomain>,
    },
    UfaProbCount {
        nfa: Arc<Nfa>,
        mc: Arc<LetterMc>,
        dom: Arc<WordDomain>,
    },
    LiftPartial {
        mdp: Arc<Mdp>,
        limit: u64,
    },
    LiftTotal(Arc<Mdp>),
}

/// A model-bound step operator with its index set and value lattice.
#[derive(Clone, Debug)]
pub struct OperatorHandle {
    kind: OperatorKind,
    index: Arc<IndexSet>,
    lattice: Lattice,
}

fn state_index(states: &[String]) -> Arc<IndexSet> {
    IndexSet::new(states.to_vec())
}

impl OperatorHandle {
    pub fn mc_partial(mc: Arc<MarkovChain>) -> Self {
        OperatorHandle {
            index: state_index(&mc.states),
            lattice: Lattice::prob_reward_pair(),
            kind: OperatorKind::McPartial(mc),
        }
    }

    pub fn mc_total(mc: Arc<MarkovChain>) -> Self {
        OperatorHandle {
            index: state_index(&mc.states),
            lattice: Lattice::ExtRealLat,
            kind: OperatorKind::McTotal(mc),
        }
    }

    pub fn mdp_partial_frontier(mdp: Arc<Mdp>, limit: u64) -> Self {
        OperatorHandle {
            index: state_index(&mdp.states),
            lattice: Lattice::Frontier,
            kind: OperatorKind::MdpPartial { mdp, limit },
        }
    }

    pub fn mdp_total(mdp: Arc<Mdp>) -> Self {
        OperatorHandle {
            index: state_index(&mdp.states),
            lattice: Lattice::ExtRealLat,
            kind: OperatorKind::MdpTotal(mdp),
        }
    }

    pub fn resource_bounded(g: Arc<ResourceGraph>) -> Self {
        OperatorHandle {
            index: state_index(&g.states),
            lattice: Lattice::BoundedNat(g.bound),
            kind: OperatorKind::ResourceBounded(g),
        }
    }

    pub fn resource_reach(g: Arc<ResourceGraph>) -> Self {
        OperatorHandle {
            index: state_index(&g.states),
            lattice: Lattice::Bool2,
            kind: OperatorKind::ResourceReach(g),
        }
    }

    pub fn dlts_partial(dlts: Arc<Dlts>, dom: Arc<LassoDomain>) -> Self {
        OperatorHandle {
            index: dom.index_set(&dlts.states),
            lattice: Lattice::Lex2,
            kind: OperatorKind::DltsPartial { dlts, dom },
        }
    }

    pub fn dlts_total(dlts: Arc<Dlts>, dom: Arc<LassoDomain>) -> Self {
        OperatorHandle {
            index: dom.index_set(&dlts.states),
            lattice: Lattice::Bool2,
            kind: OperatorKind::DltsTotal { dlts, dom },
        }
    }

    pub fn ufa_lang(nfa: Arc<Nfa>, dom: Arc<WordDomain>) -> Self {
        OperatorHandle {
            index: dom.index_set(&nfa.states, &nfa.alphabet),
            lattice: Lattice::Bool2,
            kind: OperatorKind::UfaLang { nfa, dom },
        }
    }

    pub fn ufa_count(nfa: Arc<Nfa>, dom: Arc<WordDomain>) -> Self {
        OperatorHandle {
            index: dom.index_set(&nfa.states, &nfa.alphabet),
            lattice: Lattice::ExtNatLat,
            kind: OperatorKind::UfaCount { nfa, dom },
        }
    }

    pub fn ufa_prob_lang(nfa: Arc<Nfa>, mc: Arc<LetterMc>, dom: Arc<WordDomain>) -> Self {
        OperatorHandle {
            index: dom.index_set(&nfa.states, &nfa.alphabet),
            lattice: Lattice::product(Lattice::Bool2, Lattice::UnitInterval),
            kind: OperatorKind::UfaProbLang { nfa, mc, dom },
        }
    }

    pub fn ufa_prob_count(nfa: Arc<Nfa>, mc: Arc<LetterMc>, dom: Arc<WordDomain>) -> Self {
        OperatorHandle {
            index: dom.index_set(&nfa.states, &nfa.alphabet),
            lattice: Lattice::product(Lattice::ExtNatLat, Lattice::ExtRealLat),
            kind: OperatorKind::UfaProbCount { nfa, mc, dom },
        }
    }

    pub fn lift_partial(mdp: Arc<Mdp>, limit: u64) -> Self {
        OperatorHandle {
            index: state_index(&mdp.states),
            lattice: Lattice::Frontier,
            kind: OperatorKind::LiftPartial { mdp, limit },
        }
    }

    pub fn lift_total(mdp: Arc<Mdp>) -> Self {
        OperatorHandle {
            index: state_index(&mdp.states),
            lattice: Lattice::ExtRealLat,
            kind: OperatorKind::LiftTotal(mdp),
        }
    }

    pub fn tag(&self) -> &'static str {
        match &self.kind {
            OperatorKind::McPartial(_) => "mc_partial",
            OperatorKind::McTotal(_) => "mc_total",
            OperatorKind::MdpPartial { .. } => "mdp_partial_frontier",
            OperatorKind::MdpTotal(_) => "mdp_total",
            OperatorKind::ResourceBounded(_) => "resource_bounded",
            OperatorKind::ResourceReach(_) => "resource_reach",
            OperatorKind::DltsPartial { .. } => "dlts_partial",
            OperatorKind::DltsTotal { .. } => "dlts_total",
            OperatorKind::UfaLang { .. } => "ufa_lang",
            OperatorKind::UfaCount { .. } => "ufa_count",
            OperatorKind::UfaProbLang { .. } => "ufa_prob_lang",
            OperatorKind::UfaProbCount { .. } => "ufa_prob_count",
            OperatorKind::LiftPartial { .. } => "lift_partial",
            OperatorKind::LiftTotal(_) => "lift_total",
        }
    }

    pub fn index(&self) -> &Arc<IndexSet> {
        &self.index
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The bottom of the iteration: `⊥` of the value lattice at every index
    /// (for frontiers that is the `{(0,0)}` lowerset).
    pub fn bottom(&self) -> Valuation {
        Valuation::bottom(Arc::clone(&self.index), &self.lattice)
    }

    /// One application of the operator.
    pub fn step(&self, k: &Valuation) -> Result<Valuation, StepError> {
        if k.len() != self.index.len() {
            return Err(StepError::IndexMismatch {
                got: k.len(),
                want: self.index.len(),
            });
        }
        match &self.kind {
            OperatorKind::McPartial(mc) => Ok(step_mc_partial(mc, k)),
            OperatorKind::McTotal(mc) => Ok(step_mc_total(mc, k)),
            OperatorKind::MdpPartial { mdp, limit } => step_mdp_partial(mdp, k, *limit),
            OperatorKind::MdpTotal(mdp) => Ok(step_mdp_total(mdp, k)),
            OperatorKind::ResourceBounded(g) => Ok(step_resource(g, k)),
            OperatorKind::ResourceReach(g) => Ok(step_resource_reach(g, k)),
            OperatorKind::DltsPartial { dlts, dom } => Ok(step_dlts_partial(dlts, dom, k)),
            OperatorKind::DltsTotal { dlts, dom } => Ok(step_dlts_total(dlts, dom, k)),
            OperatorKind::UfaLang { nfa, dom } => Ok(step_ufa_lang(nfa, dom, k)),
            OperatorKind::UfaCount { nfa, dom } => Ok(step_ufa_count(nfa, dom, k)),
            OperatorKind::UfaProbLang { nfa, mc, dom } => Ok(step_ufa_prob_lang(nfa, mc, dom, k)),
            OperatorKind::UfaProbCount { nfa, mc, dom } => Ok(step_ufa_prob_count(nfa, mc, dom, k)),
            OperatorKind::LiftPartial { mdp, limit } => lift_partial_step(mdp, k, *limit),
            OperatorKind::LiftTotal(mdp) => lift_total_step(mdp, k),
        }
    }
}
