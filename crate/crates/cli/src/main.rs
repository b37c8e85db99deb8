//! Command-line front end: solve fixed points, check global reachability
//! conditions, verify correspondences, and query the brute-force oracles.
//! Output is JSON on stdout with deterministic key order and float
//! formatting; exit codes carry the verdict.

use clap::{Args, Parser, Subcommand};
use fixcorr::correspond::{
    verdict_json, verify_chain, verify_chain_prob, verify_dlts, verify_mc, verify_mdp,
    verify_resource, CorrespondenceReport, VerifyError,
};
use fixcorr::grc::{self, Verdict};
use fixcorr::jsonout::{self, Json};
use fixcorr::model::{parse_lasso_file, LassoWord, Model};
use fixcorr::op::{LassoDomain, LetterMc, OperatorHandle, StepError, WordDomain};
use fixcorr::oracle;
use fixcorr::solver::{kleene_lfp, ConvergencePolicy, SolveError};
use fixcorr::{load_model, Lattice, MarkovChain};
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_OK: u8 = 0;
const EXIT_NO_COINCIDENCE: u8 = 1;
const EXIT_FAILS: u8 = 2;
const EXIT_APPROXIMATE: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_INTERNAL: u8 = 5;
const EXIT_BUDGET: u8 = 6;

#[derive(Parser)]
#[command(name = "fixcorr", version, about = "fixed-point correspondence engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON model file.
    #[arg(long)]
    model: String,
    /// Instance tag (see README for the vocabulary per subcommand).
    #[arg(long)]
    instance: String,
    /// Absolute tolerance for real-valued equality and convergence.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Iteration budget.
    #[arg(long = "max-iter", default_value_t = 100_000)]
    max_iter: usize,
    /// Divergence cap: coordinates above it are promoted to infinity.
    #[arg(long, default_value_t = 1e12)]
    cap: f64,
    /// Word-length bound for NFA instances.
    #[arg(long, default_value_t = 4)]
    maxlen: usize,
    /// Lasso-word file for DLTS instances.
    #[arg(long)]
    words: Option<String>,
    /// Markov chain over the alphabet for probability-weighted NFA
    /// instances.
    #[arg(long = "labels-mc")]
    labels_mc: Option<String>,
    /// Suppress output; communicate through the exit code only.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    model: String,
    /// Oracle tag: mc_partial | mc_total | mdp_pareto | nfa_count |
    /// nfa_prob | dlts_run | resource_path.
    #[arg(long)]
    oracle: String,
    /// Horizon for the Markov-chain and MDP oracles.
    #[arg(long, default_value_t = 4)]
    horizon: usize,
    #[arg(long, default_value_t = 4)]
    maxlen: usize,
    #[arg(long)]
    words: Option<String>,
    #[arg(long = "labels-mc")]
    labels_mc: Option<String>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a least fixed point (or its approximant).
    Solve(CommonArgs),
    /// Decide the instance's global reachability condition.
    CheckGrc(CommonArgs),
    /// Verify the fixed-point correspondence end to end.
    Verify(CommonArgs),
    /// Query an independent brute-force oracle.
    Oracle(OracleArgs),
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<fixcorr::ModelError> for Failure {
    fn from(e: fixcorr::ModelError) -> Failure {
        Failure::input(e.to_string())
    }
}

impl From<StepError> for Failure {
    fn from(e: StepError) -> Failure {
        Failure::internal(e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Failure {
        match e {
            SolveError::Step(e) => e.into(),
            other => Failure::internal(other.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Failure {
        match e {
            VerifyError::Model(m) => m.into(),
            VerifyError::Step(s) => s.into(),
            VerifyError::Solve(s) => s.into(),
            VerifyError::Lattice(l) => Failure::internal(l.to_string()),
        }
    }
}

impl From<oracle::OracleError> for Failure {
    fn from(e: oracle::OracleError) -> Failure {
        Failure {
            code: EXIT_BUDGET,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (quiet, outcome) = match &cli.command {
        Command::Solve(args) => (args.quiet, cmd_solve(args)),
        Command::CheckGrc(args) => (args.quiet, cmd_check_grc(args)),
        Command::Verify(args) => (args.quiet, cmd_verify(args)),
        Command::Oracle(args) => (args.quiet, cmd_oracle(args)),
    };
    match outcome {
        Ok((json, code)) => {
            if !quiet {
                println!("{}", json.render());
            }
            ExitCode::from(code)
        }
        Err(failure) => {
            if !quiet {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn read_model(path: &str) -> Result<Model, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {path}: {e}")))?;
    Ok(load_model(&text)?)
}

fn read_lassos(args_words: &Option<String>) -> Result<Vec<LassoWord>, Failure> {
    let path = args_words
        .as_ref()
        .ok_or_else(|| Failure::input("this instance requires --words <lasso file>"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {path}: {e}")))?;
    Ok(parse_lasso_file(&text)?)
}

fn read_labels_mc(args: &Option<String>) -> Result<MarkovChain, Failure> {
    let path = args
        .as_ref()
        .ok_or_else(|| Failure::input("this instance requires --labels-mc <mc file>"))?;
    match read_model(path)? {
        Model::Mc(mc) => Ok(mc),
        other => Err(Failure::input(format!(
            "--labels-mc must be an mc model, got {}",
            other.type_name()
        ))),
    }
}

/// Exact convergence is the default on discrete lattices, tolerance-based
/// elsewhere.
fn default_policy(op: &OperatorHandle, args: &CommonArgs) -> ConvergencePolicy {
    fn discrete(lat: &Lattice) -> bool {
        match lat {
            Lattice::Bool2 | Lattice::ExtNatLat | Lattice::BoundedNat(_) | Lattice::Lex2 => true,
            Lattice::UnitInterval | Lattice::ExtRealLat | Lattice::Frontier => false,
            Lattice::Product(a, b) => discrete(a) && discrete(b),
        }
    }
    let base = if discrete(op.lattice()) {
        ConvergencePolicy::exact()
    } else {
        ConvergencePolicy::tolerance(args.tol)
    };
    base.with_max_iterations(args.max_iter).with_cap(args.cap)
}

fn build_operator(model: &Model, args: &CommonArgs) -> Result<OperatorHandle, Failure> {
    let tag = args.instance.as_str();
    let mismatch = || {
        Failure::input(format!(
            "instance {tag} does not apply to a {} model",
            model.type_name()
        ))
    };
    match tag {
        "mc_partial" | "mc_total" => {
            let Model::Mc(mc) = model else {
                return Err(mismatch());
            };
            let mc = Arc::new(mc.clone());
            Ok(match tag {
                "mc_partial" => OperatorHandle::mc_partial(mc),
                _ => OperatorHandle::mc_total(mc),
            })
        }
        "mdp_partial_frontier" | "mdp_total" | "lift_partial" | "lift_total" => {
            let Model::Mdp(mdp) = model else {
                return Err(mismatch());
            };
            let mdp = Arc::new(mdp.clone());
            Ok(match tag {
                "mdp_partial_frontier" => {
                    OperatorHandle::mdp_partial_frontier(mdp, fixcorr::op::DEFAULT_EXPLOSION_LIMIT)
                }
                "mdp_total" => OperatorHandle::mdp_total(mdp),
                "lift_partial" => {
                    OperatorHandle::lift_partial(mdp, fixcorr::op::DEFAULT_EXPLOSION_LIMIT)
                }
                _ => OperatorHandle::lift_total(mdp),
            })
        }
        "resource_bounded" | "resource_reach" => {
            let Model::Resource(g) = model else {
                return Err(mismatch());
            };
            let g = Arc::new(g.clone());
            Ok(match tag {
                "resource_bounded" => OperatorHandle::resource_bounded(g),
                _ => OperatorHandle::resource_reach(g),
            })
        }
        "dlts_partial" | "dlts_total" => {
            let Model::Dlts(d) = model else {
                return Err(mismatch());
            };
            let d = Arc::new(d.clone());
            let lassos = read_lassos(&args.words)?;
            let dom = Arc::new(LassoDomain::close(&d, &lassos)?);
            Ok(match tag {
                "dlts_partial" => OperatorHandle::dlts_partial(d, dom),
                _ => OperatorHandle::dlts_total(d, dom),
            })
        }
        "ufa_lang" | "ufa_count" => {
            let Model::Nfa(nfa) = model else {
                return Err(mismatch());
            };
            let nfa = Arc::new(nfa.clone());
            let dom = Arc::new(WordDomain::all_words(nfa.alphabet.len(), args.maxlen));
            Ok(match tag {
                "ufa_lang" => OperatorHandle::ufa_lang(nfa, dom),
                _ => OperatorHandle::ufa_count(nfa, dom),
            })
        }
        "ufa_prob_lang" | "ufa_prob_count" => {
            let Model::Nfa(nfa) = model else {
                return Err(mismatch());
            };
            let nfa = Arc::new(nfa.clone());
            let letters = Arc::new(LetterMc::new(&nfa, &read_labels_mc(&args.labels_mc)?)?);
            let dom = Arc::new(WordDomain::all_words(nfa.alphabet.len(), args.maxlen));
            Ok(match tag {
                "ufa_prob_lang" => OperatorHandle::ufa_prob_lang(nfa, letters, dom),
                _ => OperatorHandle::ufa_prob_count(nfa, letters, dom),
            })
        }
        other => Err(Failure::input(format!("unknown solve instance {other}"))),
    }
}

fn cmd_solve(args: &CommonArgs) -> Result<(Json, u8), Failure> {
    let model = read_model(&args.model)?;
    let op = build_operator(&model, args)?;
    let policy = default_policy(&op, args);
    let trace = kleene_lfp(&op, &policy)?;
    let mut fields: Vec<(String, Json)> = trace
        .fixed_point()
        .iter()
        .map(|(label, v)| (label.to_string(), jsonout::value(v)))
        .collect();
    fields.push(("scope".to_string(), Json::Str(trace.scope())));
    let code = if trace.converged {
        EXIT_OK
    } else {
        EXIT_APPROXIMATE
    };
    Ok((Json::Obj(fields), code))
}

fn grc_exit(verdict: &Verdict) -> u8 {
    match verdict {
        Verdict::Holds { .. } => EXIT_OK,
        Verdict::Fails { .. } if verdict.is_exact() => EXIT_FAILS,
        Verdict::Fails { .. } => EXIT_APPROXIMATE,
        Verdict::Inconclusive { .. } => EXIT_APPROXIMATE,
    }
}

fn cmd_check_grc(args: &CommonArgs) -> Result<(Json, u8), Failure> {
    let model = read_model(&args.model)?;
    let verdict = match (args.instance.as_str(), &model) {
        ("mc", Model::Mc(mc)) => grc::grc_mc(mc),
        ("resource", Model::Resource(g)) => grc::grc_resource(g)?,
        ("dlts", Model::Dlts(d)) => {
            let lassos = read_lassos(&args.words)?;
            for lasso in &lassos {
                for letter in lasso.prefix.iter().chain(&lasso.cycle) {
                    if !d.labels.contains(letter) {
                        return Err(Failure::input(format!(
                            "lasso letter {letter} is not a model label"
                        )));
                    }
                }
            }
            grc::grc_dlts(d, &lassos)
        }
        ("ufa", Model::Nfa(nfa)) => grc::grc_ufa(nfa),
        ("mdp", Model::Mdp(mdp)) => {
            let policy = ConvergencePolicy::tolerance(args.tol)
                .with_max_iterations(args.max_iter)
                .with_cap(args.cap);
            grc::grc_mdp(mdp, &policy, args.tol)?
        }
        (tag, m) => {
            return Err(Failure::input(format!(
                "unknown grc instance {tag} for a {} model",
                m.type_name()
            )))
        }
    };
    Ok((verdict_json(&verdict), grc_exit(&verdict)))
}

fn verify_exit(report: &CorrespondenceReport) -> u8 {
    if report.coincidence {
        if report.approximate {
            EXIT_APPROXIMATE
        } else {
            EXIT_OK
        }
    } else if report.grc.holds() {
        EXIT_NO_COINCIDENCE
    } else {
        EXIT_FAILS
    }
}

fn cmd_verify(args: &CommonArgs) -> Result<(Json, u8), Failure> {
    let model = read_model(&args.model)?;
    // Iterate three orders tighter than the comparison tolerance so the
    // residual iteration error cannot dominate the equality check.
    let policy_for = |tol: f64| {
        ConvergencePolicy::tolerance(tol * 1e-3)
            .with_max_iterations(args.max_iter)
            .with_cap(args.cap)
    };
    let report = match (args.instance.as_str(), &model) {
        ("mc", Model::Mc(mc)) => verify_mc(mc, &policy_for(args.tol), args.tol)?,
        ("resource", Model::Resource(g)) => verify_resource(g)?,
        ("dlts", Model::Dlts(d)) => verify_dlts(d, &read_lassos(&args.words)?)?,
        ("mdp", Model::Mdp(mdp)) => verify_mdp(mdp, &policy_for(args.tol), args.tol)?,
        ("ufa", Model::Nfa(nfa)) => verify_chain(nfa, args.maxlen, 500)?,
        ("ufa_prob", Model::Nfa(nfa)) => {
            let labels = read_labels_mc(&args.labels_mc)?;
            verify_chain_prob(nfa, &labels, args.maxlen, args.tol)?
        }
        (tag, m) => {
            return Err(Failure::input(format!(
                "unknown verify instance {tag} for a {} model",
                m.type_name()
            )))
        }
    };
    Ok((report.to_json(), verify_exit(&report)))
}

fn cmd_oracle(args: &OracleArgs) -> Result<(Json, u8), Failure> {
    let model = read_model(&args.model)?;
    let json = match (args.oracle.as_str(), &model) {
        ("mc_partial", Model::Mc(mc)) => {
            jsonout::valuation(&oracle::mc_partial_oracle(mc, args.horizon)?)
        }
        ("mc_total", Model::Mc(mc)) => {
            jsonout::valuation(&oracle::mc_total_oracle(mc, args.horizon)?)
        }
        ("mdp_pareto", Model::Mdp(mdp)) => {
            jsonout::valuation(&oracle::mdp_pareto_oracle(mdp, args.horizon)?)
        }
        ("nfa_count", Model::Nfa(nfa)) => {
            let dom = WordDomain::all_words(nfa.alphabet.len(), args.maxlen);
            let mut fields = Vec::new();
            for w in 0..dom.len() {
                let counts = oracle::nfa_count_oracle(nfa, dom.word(w));
                let word = dom.render(w, &nfa.alphabet);
                for (s, count) in counts.iter().enumerate() {
                    fields.push((format!("{}|{word}", nfa.states[s]), jsonout::ext_nat(count)));
                }
            }
            Json::Obj(fields)
        }
        ("nfa_prob", Model::Nfa(nfa)) => {
            let letters = LetterMc::new(nfa, &read_labels_mc(&args.labels_mc)?)?;
            let dom = WordDomain::all_words(nfa.alphabet.len(), args.maxlen);
            let mut fields = Vec::new();
            for w in 0..dom.len() {
                let values = oracle::nfa_prob_oracle(nfa, &letters, dom.word(w));
                let word = dom.render(w, &nfa.alphabet);
                for (s, (count, mass)) in values.iter().enumerate() {
                    fields.push((
                        format!("{}|{word}", nfa.states[s]),
                        Json::Arr(vec![jsonout::ext_nat(count), jsonout::ext_real(mass)]),
                    ));
                }
            }
            Json::Obj(fields)
        }
        ("dlts_run", Model::Dlts(d)) => {
            let lassos = read_lassos(&args.words)?;
            let mut fields = Vec::new();
            for lasso in &lassos {
                for letter in lasso.prefix.iter().chain(&lasso.cycle) {
                    if !d.labels.contains(letter) {
                        return Err(Failure::input(format!(
                            "lasso letter {letter} is not a model label"
                        )));
                    }
                }
                for s in 0..d.states.len() {
                    let outcome = match oracle::dlts_run_oracle(d, s, lasso) {
                        oracle::RunOutcome::Terminates { steps, safe } => Json::Obj(vec![
                            ("terminates".to_string(), Json::Bool(true)),
                            ("steps".to_string(), Json::Int(steps as u64)),
                            ("safe".to_string(), Json::Bool(safe)),
                        ]),
                        oracle::RunOutcome::Loops => {
                            Json::Obj(vec![("terminates".to_string(), Json::Bool(false))])
                        }
                    };
                    fields.push((format!("{}|{}", d.states[s], lasso.render()), outcome));
                }
            }
            Json::Obj(fields)
        }
        ("resource_path", Model::Resource(g)) => {
            let fields = g
                .states
                .iter()
                .enumerate()
                .map(|(s, name)| {
                    let v = oracle::resource_path_oracle(g, s);
                    (name.clone(), jsonout::value(&fixcorr::Value::Res(v)))
                })
                .collect();
            Json::Obj(fields)
        }
        (tag, m) => {
            return Err(Failure::input(format!(
                "unknown oracle {tag} for a {} model",
                m.type_name()
            )))
        }
    };
    Ok((json, EXIT_OK))
}
