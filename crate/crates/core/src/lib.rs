//! A fixed-point semantics engine for finite transition systems.
//!
//! The engine computes two semantics of a model — a concrete one and an
//! abstract one connected by a Galois connection — as least fixed points of
//! monotone step operators, decides the instance's global reachability
//! condition, and verifies or refutes the resulting fixed-point
//! correspondence. Every instance ships with an independent brute-force
//! oracle.
//!
//! Instances:
//! - Markov chains: partial vs. total expected reward, linked by almost-sure
//!   reachability.
//! - MDPs: Pareto-frontier multi-objective partial reward vs. total reward.
//! - Resource graphs: resource-bounded reachability vs. plain reachability.
//! - Deterministic labeled transition systems over lasso words: partial vs.
//!   total correctness.
//! - NFAs: recognized language vs. accepting-run counting (the unambiguity
//!   condition), optionally weighted by a Markov chain over the alphabet.

pub mod correspond;
pub mod ext;
pub mod frontier;
pub mod galois;
pub mod grc;
pub mod jsonout;
pub mod lattice;
pub mod model;
pub mod op;
pub mod oracle;
pub mod solver;
pub mod util;
pub mod valuation;

pub use ext::{ExtNat, ExtReal};
pub use frontier::{FrontierPoint, ParetoFrontier};
pub use galois::GaloisConnection;
pub use lattice::{BoundedNat, Lattice, LatticeError, Value};
pub use model::{
    embed_mc_as_mdp, load_model, parse_lasso_file, to_json, Dlts, LassoWord, MarkovChain, Mdp,
    Model, ModelError, Next, Nfa, ResourceGraph,
};
pub use op::{OperatorHandle, StepError};
pub use valuation::{IndexSet, Valuation};
