//! End-to-end correspondence verification.
//!
//! For an instance's pair of operators this computes both least fixed points
//! (or their stated approximants), evaluates the instance's global
//! reachability condition, transports each fixed point across the Galois
//! connection, and reports coincidence or a counterexample with the maximal
//! pointwise deviation.

use crate::ext::ExtReal;
use crate::galois::GaloisConnection;
use crate::grc::{self, Verdict};
use crate::jsonout::{self, Json};
use crate::lattice::{LatticeError, Value};
use crate::model::{Dlts, LassoWord, MarkovChain, Mdp, Nfa};
use crate::op::{LassoDomain, LetterMc, OperatorHandle, StepError, WordDomain};
use crate::solver::{kleene_lfp, ConvergencePolicy, SolveError};
use crate::valuation::{IndexSet, Valuation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("model error: {0}")]
    Model(#[from] crate::model::ModelError),
}

/// Outcome of the chain-route side conditions.
#[derive(Clone, Debug)]
pub struct ChainConditions {
    /// The transpose law `Φ∘R = R∘Ψ`, sampled (plain counting instance) or
    /// evaluated at the chain limit (probability pair).
    pub transpose_law_holds: bool,
    pub transpose_samples: usize,
    /// The abstract chain is stationary on the bounded word domain.
    pub chain_stationary: bool,
    /// The abstract fixed point lies in `Fix(ε)` numerically.
    pub counit_fixed: bool,
}

#[derive(Clone, Debug)]
pub struct CorrespondenceReport {
    pub instance: String,
    /// Which concrete object was checked: `mu_phi`, or the frontier
    /// approximant of the scheduler-achievable algebra for MDPs.
    pub checked_object: String,
    pub grc: Verdict,
    pub index: Arc<IndexSet>,
    pub concrete: Valuation,
    pub abstract_fp: Valuation,
    /// `L(concrete)`, to be compared with `abstract_fp`.
    pub lowered: Valuation,
    /// `R(abstract_fp)`, to be compared with `concrete`.
    pub uppered: Valuation,
    pub coincidence: bool,
    pub max_deviation: ExtReal,
    pub scope: String,
    /// True when any side is an approximation (non-converged iteration or
    /// cap-promotion).
    pub approximate: bool,
    pub flags: Vec<String>,
    pub chain: Option<ChainConditions>,
}

impl CorrespondenceReport {
    pub fn to_json(&self) -> Json {
        let mut fields = vec![
            ("instance".to_string(), Json::Str(self.instance.clone())),
            (
                "checked_object".to_string(),
                Json::Str(self.checked_object.clone()),
            ),
            ("grc".to_string(), verdict_json(&self.grc)),
            ("concrete".to_string(), jsonout::valuation(&self.concrete)),
            (
                "abstract".to_string(),
                jsonout::valuation(&self.abstract_fp),
            ),
            ("lowered".to_string(), jsonout::valuation(&self.lowered)),
            ("uppered".to_string(), jsonout::valuation(&self.uppered)),
            ("coincidence".to_string(), Json::Bool(self.coincidence)),
            (
                "max_deviation".to_string(),
                jsonout::ext_real(&self.max_deviation),
            ),
            ("scope".to_string(), Json::Str(self.scope.clone())),
            (
                "flags".to_string(),
                Json::Arr(self.flags.iter().cloned().map(Json::Str).collect()),
            ),
        ];
        if let Some(chain) = &self.chain {
            fields.push((
                "chain_conditions".to_string(),
                Json::Obj(vec![
                    (
                        "transpose_law_holds".to_string(),
                        Json::Bool(chain.transpose_law_holds),
                    ),
                    (
                        "transpose_samples".to_string(),
                        Json::Int(chain.transpose_samples as u64),
                    ),
                    (
                        "chain_stationary".to_string(),
                        Json::Bool(chain.chain_stationary),
                    ),
                    ("counit_fixed".to_string(), Json::Bool(chain.counit_fixed)),
                ]),
            ));
        }
        Json::Obj(fields)
    }
}

pub fn verdict_json(v: &Verdict) -> Json {
    Json::Obj(vec![
        ("holds".to_string(), Json::Bool(v.holds())),
        ("scope".to_string(), Json::Str(v.scope().to_string())),
        (
            "witnesses".to_string(),
            Json::Arr(v.witnesses().iter().cloned().map(Json::Str).collect()),
        ),
    ])
}

struct TransportCheck {
    lowered: Valuation,
    uppered: Valuation,
    coincidence: bool,
    max_deviation: ExtReal,
}

/// Checks both transport equalities `L(concrete) = abstract` and
/// `R(abstract) = concrete` within `tol`.
fn transport_check(
    g: &GaloisConnection,
    concrete: &Valuation,
    abstract_fp: &Valuation,
    tol: f64,
) -> Result<TransportCheck, VerifyError> {
    let lowered = g.apply_lower(concrete)?;
    let uppered = g.apply_upper(abstract_fp)?;
    let eq_lower = lowered.eq_tol(abstract_fp, g.abstract_lattice(), tol)?;
    let eq_upper = uppered.eq_tol(concrete, g.concrete_lattice(), tol)?;
    let dev = lowered
        .deviation(abstract_fp, g.abstract_lattice())?
        .max(uppered.deviation(concrete, g.concrete_lattice())?);
    Ok(TransportCheck {
        lowered,
        uppered,
        coincidence: eq_lower && eq_upper,
        max_deviation: dev,
    })
}

fn flags_for(grc: &Verdict, coincidence: bool) -> Vec<String> {
    if coincidence && !grc.holds() {
        vec!["coincidence without GRC".to_string()]
    } else {
        Vec::new()
    }
}

/// MC route: `μΦ` against the exactly solved `μΨ`, under almost-sure
/// reachability.
pub fn verify_mc(
    mc: &MarkovChain,
    policy: &ConvergencePolicy,
    tol: f64,
) -> Result<CorrespondenceReport, VerifyError> {
    let mc = Arc::new(mc.clone());
    let op = OperatorHandle::mc_partial(Arc::clone(&mc));
    let trace = kleene_lfp(&op, policy)?;
    let concrete = trace.fixed_point().clone();
    let abstract_fp = crate::solver::mc_total_exact(&mc)?;
    let g = GaloisConnection::mc_reward();
    let check = transport_check(&g, &concrete, &abstract_fp, tol)?;
    let grc = grc::grc_mc(&mc);
    Ok(CorrespondenceReport {
        instance: "mc".into(),
        checked_object: "mu_phi".into(),
        flags: flags_for(&grc, check.coincidence),
        grc,
        index: Arc::clone(op.index()),
        concrete,
        abstract_fp,
        lowered: check.lowered,
        uppered: check.uppered,
        coincidence: check.coincidence,
        max_deviation: check.max_deviation,
        scope: trace.scope(),
        approximate: trace.is_approximate(),
        chain: None,
    })
}

/// Resource route: exact fixed points on both sides.
pub fn verify_resource(
    g: &crate::model::ResourceGraph,
) -> Result<CorrespondenceReport, VerifyError> {
    let graph = Arc::new(g.clone());
    let op_c = OperatorHandle::resource_bounded(Arc::clone(&graph));
    let op_a = OperatorHandle::resource_reach(Arc::clone(&graph));
    let policy = ConvergencePolicy::exact();
    let trace_c = kleene_lfp(&op_c, &policy)?;
    let trace_a = kleene_lfp(&op_a, &policy)?;
    let concrete = trace_c.fixed_point().clone();
    let abstract_fp = trace_a.fixed_point().clone();
    let conn = GaloisConnection::resource(g.bound);
    let check = transport_check(&conn, &concrete, &abstract_fp, 0.0)?;
    let grc = grc::grc_resource(g)?;
    Ok(CorrespondenceReport {
        instance: "resource".into(),
        checked_object: "mu_phi".into(),
        flags: flags_for(&grc, check.coincidence),
        grc,
        index: Arc::clone(op_c.index()),
        concrete,
        abstract_fp,
        lowered: check.lowered,
        uppered: check.uppered,
        coincidence: check.coincidence,
        max_deviation: check.max_deviation,
        scope: "exact".into(),
        approximate: false,
        chain: None,
    })
}

/// DLTS route: partial vs. total correctness over a lasso-word domain.
pub fn verify_dlts(dlts: &Dlts, lassos: &[LassoWord]) -> Result<CorrespondenceReport, VerifyError> {
    let d = Arc::new(dlts.clone());
    let dom = Arc::new(LassoDomain::close(&d, lassos)?);
    let op_c = OperatorHandle::dlts_partial(Arc::clone(&d), Arc::clone(&dom));
    let op_a = OperatorHandle::dlts_total(Arc::clone(&d), Arc::clone(&dom));
    let policy = ConvergencePolicy::exact();
    let trace_c = kleene_lfp(&op_c, &policy)?;
    let trace_a = kleene_lfp(&op_a, &policy)?;
    let concrete = trace_c.fixed_point().clone();
    let abstract_fp = trace_a.fixed_point().clone();
    let conn = GaloisConnection::dlts_correctness();
    let check = transport_check(&conn, &concrete, &abstract_fp, 0.0)?;
    let grc = grc::grc_dlts(&d, lassos);
    Ok(CorrespondenceReport {
        instance: "dlts".into(),
        checked_object: "mu_phi".into(),
        flags: flags_for(&grc, check.coincidence),
        grc,
        index: Arc::clone(op_c.index()),
        concrete,
        abstract_fp,
        lowered: check.lowered,
        uppered: check.uppered,
        coincidence: check.coincidence,
        max_deviation: check.max_deviation,
        scope: "exact".into(),
        approximate: false,
        chain: None,
    })
}

/// MDP route: the frontier approximant of the scheduler-achievable algebra
/// against the total-reward fixed point.
pub fn verify_mdp(
    mdp: &Mdp,
    policy: &ConvergencePolicy,
    tol: f64,
) -> Result<CorrespondenceReport, VerifyError> {
    let m = Arc::new(mdp.clone());
    let op_c =
        OperatorHandle::mdp_partial_frontier(Arc::clone(&m), crate::op::DEFAULT_EXPLOSION_LIMIT);
    let op_a = OperatorHandle::mdp_total(Arc::clone(&m));
    let trace_c = kleene_lfp(&op_c, policy)?;
    let trace_a = kleene_lfp(&op_a, policy)?;
    let concrete = trace_c.fixed_point().clone();
    let abstract_fp = trace_a.fixed_point().clone();
    let conn = GaloisConnection::mdp_reward();
    let check = transport_check(&conn, &concrete, &abstract_fp, tol)?;
    let grc = grc::grc_mdp_from_frontiers(&m, &concrete, trace_c.is_approximate(), tol)?;
    let approximate = trace_c.is_approximate() || trace_a.is_approximate();
    let scope = if approximate {
        format!("approximate({})", policy.describe())
    } else {
        trace_c.scope()
    };
    Ok(CorrespondenceReport {
        instance: "mdp".into(),
        checked_object: "f_approximant".into(),
        flags: flags_for(&grc, check.coincidence),
        grc,
        index: Arc::clone(op_c.index()),
        concrete,
        abstract_fp,
        lowered: check.lowered,
        uppered: check.uppered,
        coincidence: check.coincidence,
        max_deviation: check.max_deviation,
        scope,
        approximate,
        chain: None,
    })
}

fn sample_nat_valuation(rng: &mut ChaCha8Rng, index: &Arc<IndexSet>) -> Valuation {
    let values = (0..index.len())
        .map(|_| {
            let v = match rng.gen_range(0..10u32) {
                9 => crate::ext::ExtNat::Infinity,
                n => crate::ext::ExtNat::Finite(u64::from(n) % 5),
            };
            Value::Nat(v)
        })
        .collect();
    Valuation::new(Arc::clone(index), values)
}

/// Chain route for the counting instance: checks the three sufficient
/// conditions — the transpose law on sampled valuations, stationarity of
/// the counting chain on the bounded word domain, and the fixed point lying
/// in `Fix(ε)` (exactly via the product construction, numerically on the
/// domain) — then compares the transported fixed points.
pub fn verify_chain(
    nfa: &Nfa,
    maxlen: usize,
    transpose_samples: usize,
) -> Result<CorrespondenceReport, VerifyError> {
    let n = Arc::new(nfa.clone());
    let dom = Arc::new(WordDomain::all_words(n.alphabet.len(), maxlen));
    let op_lang = OperatorHandle::ufa_lang(Arc::clone(&n), Arc::clone(&dom));
    let op_count = OperatorHandle::ufa_count(Arc::clone(&n), Arc::clone(&dom));
    let conn = GaloisConnection::ufa_counting();

    // Condition (1): Φ(R(k)) = R(Ψ(k)) exactly on sampled valuations.
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2b3c4d);
    let mut transpose_law_holds = true;
    for _ in 0..transpose_samples {
        let k = sample_nat_valuation(&mut rng, op_count.index());
        let lhs = op_lang.step(&conn.apply_upper(&k)?)?;
        let rhs = conn.apply_upper(&op_count.step(&k)?)?;
        if lhs != rhs {
            transpose_law_holds = false;
            break;
        }
    }

    // Condition (2): the counting chain is stationary after maxlen+1 stages.
    let stages = maxlen + 2;
    let mut count_chain = vec![op_count.bottom()];
    for i in 0..stages {
        count_chain.push(op_count.step(&count_chain[i])?);
    }
    let chain_stationary = count_chain[stages] == count_chain[stages - 1];
    let mu_count = count_chain[stages - 1].clone();

    // Condition (3): unambiguity, exact and numeric.
    let grc = grc::grc_ufa(&n);
    let counit_fixed = conn.in_fix_counit(&mu_count, 0.0)?;

    let mut lang_chain = op_lang.bottom();
    for _ in 0..stages {
        lang_chain = op_lang.step(&lang_chain)?;
    }
    let check = transport_check(&conn, &lang_chain, &mu_count, 0.0)?;

    Ok(CorrespondenceReport {
        instance: "ufa".into(),
        checked_object: "mu_phi".into(),
        flags: flags_for(&grc, check.coincidence),
        grc,
        index: Arc::clone(op_lang.index()),
        concrete: lang_chain,
        abstract_fp: mu_count,
        lowered: check.lowered,
        uppered: check.uppered,
        coincidence: check.coincidence,
        max_deviation: check.max_deviation,
        scope: format!("exact(words<={maxlen})"),
        approximate: false,
        chain: Some(ChainConditions {
            transpose_law_holds,
            transpose_samples,
            chain_stationary,
            counit_fixed,
        }),
    })
}

/// Chain route for the probability pair. The literal operator couples the
/// second component to the current index's first component, so the global
/// transpose law does not hold stage-by-stage; the law is instead evaluated
/// at the chain limit, where the coupling is self-consistent.
pub fn verify_chain_prob(
    nfa: &Nfa,
    mc_labels: &MarkovChain,
    maxlen: usize,
    tol: f64,
) -> Result<CorrespondenceReport, VerifyError> {
    let n = Arc::new(nfa.clone());
    let letters = Arc::new(LetterMc::new(&n, mc_labels)?);
    let dom = Arc::new(WordDomain::all_words(n.alphabet.len(), maxlen));
    let op_lang =
        OperatorHandle::ufa_prob_lang(Arc::clone(&n), Arc::clone(&letters), Arc::clone(&dom));
    let op_count =
        OperatorHandle::ufa_prob_count(Arc::clone(&n), Arc::clone(&letters), Arc::clone(&dom));
    let conn = GaloisConnection::ufa_prob_pair();

    // The coupled second component lags one stage behind; maxlen+2 stages
    // reach the fixed point on the bounded domain for both operators.
    let stages = maxlen + 3;
    let mut count_chain = vec![op_count.bottom()];
    for i in 0..stages {
        count_chain.push(op_count.step(&count_chain[i])?);
    }
    let chain_stationary = count_chain[stages] == count_chain[stages - 1];
    let mu_count = count_chain[stages - 1].clone();
    let mut mu_lang = op_lang.bottom();
    for _ in 0..stages {
        mu_lang = op_lang.step(&mu_lang)?;
    }

    // Transpose law at the limit: Φ(R(μΨ)) = R(Ψ(μΨ)) = R(μΨ).
    let upper = conn.apply_upper(&mu_count)?;
    let transpose_law_holds = op_lang
        .step(&upper)?
        .eq_tol(&upper, conn.concrete_lattice(), tol)?;

    let grc = grc::grc_ufa(&n);
    let counit_fixed = conn.in_fix_counit(&mu_count, tol)?;
    let check = transport_check(&conn, &mu_lang, &mu_count, tol)?;

    Ok(CorrespondenceReport {
        instance: "ufa_prob".into(),
        checked_object: "mu_phi".into(),
        flags: flags_for(&grc, check.coincidence),
        grc,
        index: Arc::clone(op_lang.index()),
        concrete: mu_lang,
        abstract_fp: mu_count,
        lowered: check.lowered,
        uppered: check.uppered,
        coincidence: check.coincidence,
        max_deviation: check.max_deviation,
        scope: format!("exact(words<={maxlen})"),
        approximate: false,
        chain: Some(ChainConditions {
            transpose_law_holds,
            transpose_samples: 1,
            chain_stationary,
            counit_fixed,
        }),
    })
}

/// Dispatches the equivalence route on the model type: MCs, resource
/// graphs, DLTSs (which need a lasso set) and MDPs. NFAs go through the
/// chain route instead.
pub fn verify_equivalence(
    model: &crate::model::Model,
    lassos: &[LassoWord],
    policy: &ConvergencePolicy,
    tol: f64,
) -> Result<CorrespondenceReport, VerifyError> {
    match model {
        crate::model::Model::Mc(mc) => verify_mc(mc, policy, tol),
        crate::model::Model::Resource(g) => verify_resource(g),
        crate::model::Model::Dlts(d) => verify_dlts(d, lassos),
        crate::model::Model::Mdp(m) => verify_mdp(m, policy, tol),
        crate::model::Model::Nfa(_) => {
            Err(VerifyError::Model(crate::model::ModelError::Validation(
                "NFA correspondence uses the chain route (verify_chain)".into(),
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportDirection {
    Lower,
    Upper,
}

#[derive(Clone, Debug)]
pub struct TransportOutcome {
    pub image: Valuation,
    /// The image is a prefixed point of the other operator within `tol`.
    pub valid: bool,
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("precondition failed: the valuation is not a prefixed point")]
    NotPrefixed,
    #[error("precondition failed: the valuation is not in Fix(η)")]
    NotInFixUnit,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Transports a prefixed point across the connection. The lower direction
/// additionally requires membership in `Fix(η)`; a violated precondition is
/// reported rather than silently transported.
pub fn transport_prefixed_point(
    g: &GaloisConnection,
    direction: TransportDirection,
    k: &Valuation,
    op_concrete: &OperatorHandle,
    op_abstract: &OperatorHandle,
    tol: f64,
) -> Result<TransportOutcome, TransportError> {
    match direction {
        TransportDirection::Lower => {
            if !g.in_fix_unit(k, tol)? {
                return Err(TransportError::NotInFixUnit);
            }
            let stepped = op_concrete.step(k)?;
            if !leq_within(&stepped, k, g.concrete_lattice(), tol)? {
                return Err(TransportError::NotPrefixed);
            }
            let image = g.apply_lower(k)?;
            let image_stepped = op_abstract.step(&image)?;
            let valid = leq_within(&image_stepped, &image, g.abstract_lattice(), tol)?;
            Ok(TransportOutcome { image, valid })
        }
        TransportDirection::Upper => {
            let stepped = op_abstract.step(k)?;
            if !leq_within(&stepped, k, g.abstract_lattice(), tol)? {
                return Err(TransportError::NotPrefixed);
            }
            let image = g.apply_upper(k)?;
            let image_stepped = op_concrete.step(&image)?;
            let valid = leq_within(&image_stepped, &image, g.concrete_lattice(), tol)?;
            Ok(TransportOutcome { image, valid })
        }
    }
}

/// `a ⊑ b` allowing numeric slack `tol` per coordinate.
fn leq_within(
    a: &Valuation,
    b: &Valuation,
    lat: &crate::lattice::Lattice,
    tol: f64,
) -> Result<bool, LatticeError> {
    for (x, y) in a.values().iter().zip(b.values()) {
        if !(lat.leq(x, y)? || lat.eq_tol(x, y, tol)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
