//! Command-line front end for the freezing-network toolkit.
//!
//! Every subcommand reads its inputs from JSON files in the formats of the
//! library modules, runs one solver, oracle, or construction, and prints a
//! single JSON document to stdout or to `--out`. Equal results serialize to
//! equal bytes, so outputs can be compared directly.
//!
//! Exit codes form the machine-readable half of the contract: `0` answers
//! yes or satisfiable, `1` answers no, `2` flags a usage or validation
//! problem, `3` a blown resource budget, and `4` a solver/oracle mismatch
//! under `--oracle`. The environment variables `FREEZENET_BAG_CAP`,
//! `FREEZENET_ORACLE_CONFIGS`, and `FREEZENET_ORACLE_STEPS` override the
//! default solver and oracle budgets.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use freezenet::core::{
    config_from_json, config_to_json, Alphabet, Config, Graph, Network,
};
use freezenet::gadgets::{
    circuit_async_gadget, circuit_predecessor_gadget, dominating_set_gadget, grid_bramble, route,
    routed_prediction_gadget, sat_nilpotency_gadget, Bramble, CircuitDag, Digraph,
};
use freezenet::oracle::{
    brute_async_reach, brute_check_spec, brute_dominating_set, brute_nilpotency,
    brute_predecessor, OracleBudget,
};
use freezenet::problems::{
    apply_schedule, solve_async_reachability, solve_nilpotency, solve_predecessor,
    solve_prediction, Schedule,
};
use freezenet::solver::{check_spec, SolveOptions, Verdict};
use freezenet::traces::{RleTrace, Specification, TraceSet};
use freezenet::treedecomp::{
    binarize_balance, standard_decomposition, validate_decomposition, TreeDecomposition,
};
use freezenet::{Error, Result};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;

const ENV_BAG_CAP: &str = "FREEZENET_BAG_CAP";
const ENV_ORACLE_CONFIGS: &str = "FREEZENET_ORACLE_CONFIGS";
const ENV_ORACLE_STEPS: &str = "FREEZENET_ORACLE_STEPS";

#[derive(Parser)]
#[command(
    name = "freezenet",
    version,
    about = "Model checking and canonical problems for freezing automata networks",
    after_help = "Exit codes: 0 yes/satisfiable, 1 no, 2 usage or validation error, \
                  3 budget exceeded, 4 solver/oracle disagreement.\n\
                  Environment: FREEZENET_BAG_CAP, FREEZENET_ORACLE_CONFIGS, and \
                  FREEZENET_ORACLE_STEPS override the default budgets."
)]
struct Cli {
    /// Worker threads for the solver; 0 uses one per core
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Seed for randomized schedule sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the JSON result here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether some orbit satisfies a trace specification
    CheckSpec(CheckSpecArgs),
    /// Decide whether one node's trace from a start lies in a given set
    Predict(PredictArgs),
    /// Search for a configuration reaching a target in exactly t steps
    Predecessor(PredecessorArgs),
    /// Decide whether all orbits settle on one shared fixed point
    Nilpotency(NilpotencyArgs),
    /// Decide reachability under asynchronous subset updates
    AsyncReach(AsyncReachArgs),
    /// Run an orbit, replay a schedule, or sample a random schedule
    Simulate(SimulateArgs),
    /// Build, validate, or binarize a tree decomposition
    Decompose(DecomposeArgs),
    /// Embed a digraph into a host graph along a bramble
    Route(RouteArgs),
    /// Build a hardness gadget and decide the encoded instance
    Gadget(GadgetArgs),
    /// Run a brute-force oracle on its own
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CheckSpecArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Specification file
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Tree decomposition file; omitted builds one from the network graph
    #[arg(long, value_name = "FILE")]
    decomposition: Option<PathBuf>,
    /// Assert that the specification horizon equals this value
    #[arg(long)]
    t: Option<u32>,
    /// Cross-check the verdict against the brute-force oracle
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct PredictArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Start configuration file
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Observed node
    #[arg(long)]
    node: usize,
    /// Specification file constraining exactly the observed node
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Assert that the specification horizon equals this value
    #[arg(long)]
    t: Option<u32>,
    /// Cross-check the verdict by direct simulation
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct PredecessorArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Target configuration file
    #[arg(long, value_name = "FILE")]
    target: PathBuf,
    /// Number of steps from the sought configuration to the target
    #[arg(long)]
    t: u32,
    /// Cross-check the verdict against the brute-force oracle
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct NilpotencyArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Cross-check the verdict against the brute-force oracle
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct AsyncReachArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Start configuration file
    #[arg(long, value_name = "FILE")]
    from: PathBuf,
    /// Goal configuration file
    #[arg(long, value_name = "FILE")]
    to: PathBuf,
    /// Cross-check the verdict against the brute-force oracle
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Start configuration file
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Run the deterministic orbit for this many steps
    #[arg(long, group = "mode")]
    steps: Option<u32>,
    /// Replay the update schedule in this file
    #[arg(long, value_name = "FILE", group = "mode")]
    schedule: Option<PathBuf>,
    /// Sample this many random subset updates, driven by --seed
    #[arg(long, value_name = "N", group = "mode")]
    random_schedule: Option<u32>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Graph file
    #[arg(long, value_name = "FILE", group = "input")]
    graph: Option<PathBuf>,
    /// Network file; its graph is decomposed
    #[arg(long, value_name = "FILE", group = "input")]
    net: Option<PathBuf>,
    /// Existing decomposition to validate and binarize instead of building one
    #[arg(long, value_name = "FILE")]
    decomposition: Option<PathBuf>,
}

#[derive(Args)]
struct RouteArgs {
    /// Host graph file
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Bramble file over the host graph
    #[arg(long, value_name = "FILE")]
    bramble: PathBuf,
    /// Digraph file to embed
    #[arg(long, value_name = "FILE")]
    digraph: PathBuf,
}

#[derive(Args)]
struct GadgetArgs {
    #[command(subcommand)]
    kind: GadgetKind,
}

#[derive(Subcommand)]
enum GadgetKind {
    /// Grid network deciding whether a graph has a dominating set of size k
    Domset {
        /// Graph file of the instance
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        /// Dominating-set size bound
        #[arg(long)]
        k: usize,
    },
    /// Network that is nilpotent exactly when the circuit is unsatisfiable
    Nilpotency {
        /// Circuit file
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        /// Host grid side length; defaults to a side fitting the circuit
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Network whose target has a predecessor exactly when the circuit is satisfiable
    Predecessor {
        /// Circuit file
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        /// Host grid side length; defaults to a side fitting the circuit
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Network whose goal is asynchronously reachable exactly when the circuit is satisfiable
    Async {
        /// Circuit file
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        /// Host grid side length; defaults to a side fitting the circuit
        #[arg(long)]
        grid: Option<usize>,
        /// Input bits, e.g. 101; omitted searches all assignments
        #[arg(long)]
        assignment: Option<String>,
    },
    /// Network computing a monotone circuit; the output node predicts the result
    Prediction {
        /// Circuit file
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        /// Host grid side length; defaults to a side fitting the circuit
        #[arg(long)]
        grid: Option<usize>,
        /// Input bits, e.g. 101
        #[arg(long)]
        assignment: String,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    kind: OracleKind,
}

#[derive(Subcommand)]
enum OracleKind {
    /// Exhaustive orbit enumeration against a specification
    CheckSpec {
        /// Network file
        #[arg(long, value_name = "FILE")]
        net: PathBuf,
        /// Specification file
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
    },
    /// Exhaustive predecessor search
    Predecessor {
        /// Network file
        #[arg(long, value_name = "FILE")]
        net: PathBuf,
        /// Target configuration file
        #[arg(long, value_name = "FILE")]
        target: PathBuf,
        /// Number of steps from the sought configuration to the target
        #[arg(long)]
        t: u32,
    },
    /// Exhaustive nilpotency check over all configurations
    Nilpotency {
        /// Network file
        #[arg(long, value_name = "FILE")]
        net: PathBuf,
    },
    /// Breadth-first search over asynchronous subset updates
    AsyncReach {
        /// Network file
        #[arg(long, value_name = "FILE")]
        net: PathBuf,
        /// Start configuration file
        #[arg(long, value_name = "FILE")]
        from: PathBuf,
        /// Goal configuration file
        #[arg(long, value_name = "FILE")]
        to: PathBuf,
    },
    /// Exhaustive dominating-set search
    Domset {
        /// Graph file
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        /// Dominating-set size bound
        #[arg(long)]
        k: usize,
    },
}

struct Outcome {
    value: Value,
    exit: i32,
}

impl Outcome {
    fn answer(value: Value, yes: bool) -> Outcome {
        Outcome { value, exit: if yes { EXIT_YES } else { EXIT_NO } }
    }

    fn report(value: Value) -> Outcome {
        Outcome { value, exit: EXIT_YES }
    }
}

/// Parses `args` and runs the selected subcommand, writing the JSON result
/// and error messages to the given sinks. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests exit 0, true parse errors exit 2.
            return if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{e}");
                EXIT_YES
            };
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let text = format!("{:#}\n", outcome.value);
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text)
                    .map_err(|e| Error::validation(format!("cannot write {}: {e}", path.display()))),
                None => out.write_all(text.as_bytes()).map_err(Error::from),
            };
            match written {
                Ok(()) => outcome.exit,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Budget { .. } => EXIT_BUDGET,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::CheckSpec(a) => run_check_spec(cli, a),
        Cmd::Predict(a) => run_predict(cli, a),
        Cmd::Predecessor(a) => run_predecessor(cli, a),
        Cmd::Nilpotency(a) => run_nilpotency(cli, a),
        Cmd::AsyncReach(a) => run_async_reach(cli, a),
        Cmd::Simulate(a) => run_simulate(cli, a),
        Cmd::Decompose(a) => run_decompose(a),
        Cmd::Route(a) => run_route(a),
        Cmd::Gadget(a) => run_gadget(&a.kind),
        Cmd::Oracle(a) => run_oracle(&a.kind),
    }
}

fn run_check_spec(cli: &Cli, a: &CheckSpecArgs) -> Result<Outcome> {
    let net = load_net(&a.net)?;
    let spec = load_spec(&a.spec, net.alphabet())?;
    check_horizon(a.t, spec.horizon())?;
    let decomp = prepare_decomposition(net.graph(), a.decomposition.as_deref())?;
    let verdict = check_spec(&net, &spec, &decomp, &solve_options(cli)?)?;
    let mut value = verdict_value(&verdict, net.alphabet())?;
    let mut exit = if verdict.satisfiable { EXIT_YES } else { EXIT_NO };
    if a.oracle {
        let brute = brute_check_spec(&net, &spec, &oracle_budget()?)?;
        exit = record_agreement(&mut value, verdict.satisfiable, brute, exit);
    }
    Ok(Outcome { value, exit })
}

fn run_predict(cli: &Cli, a: &PredictArgs) -> Result<Outcome> {
    let net = load_net(&a.net)?;
    let c = load_config(&a.config, &net)?;
    let spec = load_spec(&a.spec, net.alphabet())?;
    check_horizon(a.t, spec.horizon())?;
    let constrained: Vec<usize> = spec.constrained_nodes().collect();
    if constrained != [a.node] {
        return Err(Error::validation(format!(
            "prediction expects the specification to constrain exactly node {}, got {:?}",
            a.node, constrained
        )));
    }
    let set: TraceSet = spec
        .node_set(a.node)
        .expect("constrained node has a trace set")
        .clone();
    let brute = if a.oracle {
        Some(simulated_membership(&net, &c, a.node, spec.horizon(), &set)?)
    } else {
        None
    };
    // Traces opening elsewhere than the start state can never match, so
    // dropping them keeps the answer while meeting the solver precondition.
    let anchored: Vec<RleTrace> =
        set.iter().filter(|trace| trace.first_state() == c[a.node]).cloned().collect();
    let verdict = if anchored.is_empty() {
        Verdict { satisfiable: false, witness: None, stats: Default::default() }
    } else {
        solve_prediction(
            &net,
            &c,
            a.node,
            TraceSet::new(anchored),
            spec.horizon(),
            &solve_options(cli)?,
        )?
    };
    let mut value = verdict_value(&verdict, net.alphabet())?;
    value["node"] = json!(a.node);
    let mut exit = if verdict.satisfiable { EXIT_YES } else { EXIT_NO };
    if let Some(brute) = brute {
        exit = record_agreement(&mut value, verdict.satisfiable, brute, exit);
    }
    Ok(Outcome { value, exit })
}

fn run_predecessor(cli: &Cli, a: &PredecessorArgs) -> Result<Outcome> {
    let net = load_net(&a.net)?;
    let target = load_config(&a.target, &net)?;
    let answer = solve_predecessor(&net, &target, a.t, &solve_options(cli)?)?;
    let mut value = verdict_value(&answer.verdict, net.alphabet())?;
    value["predecessor"] = match &answer.predecessor {
        Some(p) => json!(net.config_names(p)),
        None => Value::Null,
    };
    let mut exit = if answer.verdict.satisfiable { EXIT_YES } else { EXIT_NO };
    if a.oracle {
        let brute = brute_predecessor(&net, &target, a.t, &oracle_budget()?)?;
        exit = record_agreement(&mut value, answer.verdict.satisfiable, brute.is_some(), exit);
    }
    Ok(Outcome { value, exit })
}

fn run_nilpotency(cli: &Cli, a: &NilpotencyArgs) -> Result<Outcome> {
    let net = load_net(&a.net)?;
    let answer = solve_nilpotency(&net, &solve_options(cli)?)?;
    let mut value = json!({
        "nilpotent": answer.nilpotent,
        "queries": answer.queries,
        "stats": serde_json::to_value(&answer.stats)?,
    });
    let mut exit = if answer.nilpotent { EXIT_YES } else { EXIT_NO };
    if a.oracle {
        let brute = brute_nilpotency(&net, &oracle_budget()?)?;
        exit = record_agreement(&mut value, answer.nilpotent, brute, exit);
    }
    Ok(Outcome { value, exit })
}

fn run_async_reach(cli: &Cli, a: &AsyncReachArgs) -> Result<Outcome> {
    let net = load_net(&a.net)?;
    let c0 = load_config(&a.from, &net)?;
    let c1 = load_config(&a.to, &net)?;
    let answer = solve_async_reachability(&net, &c0, &c1, &solve_options(cli)?)?;
    let mut value = json!({
        "reachable": answer.reachable,
        "schedule": answer.schedule,
        "stats": serde_json::to_value(&answer.verdict.stats)?,
    });
    let mut exit = if answer.reachable { EXIT_YES } else { EXIT_NO };
    if a.oracle {
        let brute = brute_async_reach(&net, &c0, &c1, &oracle_budget()?)?;
        exit = record_agreement(&mut value, answer.reachable, brute, exit);
    }
    Ok(Outcome { value, exit })
}

fn run_simulate(cli: &Cli, a: &SimulateArgs) -> Result<Outcome> {
    let net = load_net(&a.net)?;
    let start = load_config(&a.config, &net)?;
    let (orbit, schedule) = match (&a.steps, &a.schedule, &a.random_schedule) {
        (Some(t), None, None) => (net.orbit(&start, *t)?, None),
        (None, Some(path), None) => {
            let schedule: Schedule = serde_json::from_str(&read_file(path)?)
                .map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
            (replay_orbit(&net, &start, &schedule)?, Some(schedule))
        }
        (None, None, Some(steps)) => {
            let schedule = sample_schedule(net.n(), *steps, cli.seed);
            (replay_orbit(&net, &start, &schedule)?, Some(schedule))
        }
        _ => {
            return Err(Error::validation(
                "pass exactly one of --steps, --schedule, or --random-schedule",
            ))
        }
    };
    let configs: Vec<Vec<String>> = orbit.iter().map(|c| net.config_names(c)).collect();
    let mut value = json!({
        "orbit": configs,
        "steps": orbit.len() - 1,
    });
    if let Some(schedule) = schedule {
        value["schedule"] = json!(schedule);
    }
    Ok(Outcome::report(value))
}

fn run_decompose(a: &DecomposeArgs) -> Result<Outcome> {
    let g = match (&a.graph, &a.net) {
        (Some(path), None) => load_graph(path)?,
        (None, Some(path)) => load_net(path)?.graph().clone(),
        _ => return Err(Error::validation("pass exactly one of --graph or --net")),
    };
    let decomp = prepare_decomposition(&g, a.decomposition.as_deref())?;
    let value = json!({
        "decomposition": parse_value(&decomp.to_json())?,
        "width": decomp.width(),
        "depth": decomp.depth()?,
        "bags": decomp.bags().len(),
    });
    Ok(Outcome::report(value))
}

fn run_route(a: &RouteArgs) -> Result<Outcome> {
    let g = load_graph(&a.graph)?;
    let b = Bramble::from_json(&read_file(&a.bramble)?)
        .map_err(|e| Error::validation(format!("{}: {e}", a.bramble.display())))?;
    let d = Digraph::from_json(&read_file(&a.digraph)?)
        .map_err(|e| Error::validation(format!("{}: {e}", a.digraph.display())))?;
    let emb = route(&g, &b, &d)?;
    Ok(Outcome::report(parse_value(&emb.to_json())?))
}

fn run_gadget(kind: &GadgetKind) -> Result<Outcome> {
    match kind {
        GadgetKind::Domset { graph, k } => {
            let g = load_graph(graph)?;
            let gadget = dominating_set_gadget(&g, *k)?;
            let marking = gadget.satisfying_marking()?;
            let value = json!({
                "kind": "domset",
                "n": gadget.n(),
                "k": gadget.k(),
                "rows": gadget.k() + 2,
                "cols": gadget.n() * gadget.n(),
                "alphabet": gadget.net.alphabet().len(),
                "horizon": gadget.horizon,
                "satisfiable": marking.is_some(),
                "marking": marking,
            });
            let yes = value["satisfiable"].as_bool().unwrap_or(false);
            Ok(Outcome::answer(value, yes))
        }
        GadgetKind::Nilpotency { circuit, grid } => {
            let circ = load_circuit(circuit)?;
            let (host, b) = circuit_host(&circ, *grid)?;
            let gadget = sat_nilpotency_gadget(&host, &b, &circ)?;
            let sat = gadget.has_satisfying_fixed_point()?;
            let value = json!({
                "kind": "nilpotency",
                "gates": circ.n(),
                "inputs": gadget.inputs(),
                "host": gadget.net.n(),
                "alphabet": gadget.net.alphabet().len(),
                "satisfiable": sat,
                "nilpotent": !sat,
            });
            Ok(Outcome::answer(value, sat))
        }
        GadgetKind::Predecessor { circuit, grid } => {
            let circ = load_circuit(circuit)?;
            let (host, b) = circuit_host(&circ, *grid)?;
            let gadget = circuit_predecessor_gadget(&host, &b, &circ)?;
            let sat = gadget.has_predecessor_by_assignments()?;
            let value = json!({
                "kind": "predecessor",
                "gates": circ.n(),
                "inputs": gadget.inputs(),
                "host": gadget.net.n(),
                "alphabet": gadget.net.alphabet().len(),
                "target": parse_value(&config_to_json(&gadget.target, gadget.net.alphabet())?)?,
                "satisfiable": sat,
            });
            Ok(Outcome::answer(value, sat))
        }
        GadgetKind::Async { circuit, grid, assignment } => {
            let circ = load_circuit(circuit)?;
            let (host, b) = circuit_host(&circ, *grid)?;
            let gadget = circuit_async_gadget(&host, &b, &circ)?;
            let witness = async_witness(&circ, &gadget, assignment.as_deref())?;
            let value = json!({
                "kind": "async",
                "gates": circ.n(),
                "inputs": gadget.inputs(),
                "host": gadget.net.n(),
                "alphabet": gadget.net.alphabet().len(),
                "start": parse_value(&config_to_json(&gadget.start, gadget.net.alphabet())?)?,
                "goal": parse_value(&config_to_json(&gadget.goal, gadget.net.alphabet())?)?,
                "reachable": witness.is_some(),
                "schedule": witness,
            });
            let yes = value["reachable"].as_bool().unwrap_or(false);
            Ok(Outcome::answer(value, yes))
        }
        GadgetKind::Prediction { circuit, grid, assignment } => {
            let circ = load_circuit(circuit)?;
            let bits = parse_bits(assignment)?;
            let (host, b) = circuit_host(&circ, *grid)?;
            let gadget = routed_prediction_gadget(&host, &b, &circ, &bits)?;
            let output = gadget.simulate_output()?;
            if output != gadget.expected_output() {
                return Err(Error::Internal(format!(
                    "simulated output {output} disagrees with the circuit value {}",
                    gadget.expected_output()
                )));
            }
            let value = json!({
                "kind": "prediction",
                "gates": circ.n(),
                "host": gadget.net.n(),
                "alphabet": gadget.net.alphabet().len(),
                "node": gadget.node,
                "horizon": gadget.horizon,
                "assignment": assignment,
                "output": output,
            });
            Ok(Outcome::answer(value, output))
        }
    }
}

fn run_oracle(kind: &OracleKind) -> Result<Outcome> {
    let budget = oracle_budget()?;
    match kind {
        OracleKind::CheckSpec { net, spec } => {
            let net = load_net(net)?;
            let spec = load_spec(spec, net.alphabet())?;
            let sat = brute_check_spec(&net, &spec, &budget)?;
            Ok(Outcome::answer(json!({ "kind": "check-spec", "satisfiable": sat }), sat))
        }
        OracleKind::Predecessor { net, target, t } => {
            let net = load_net(net)?;
            let target = load_config(target, &net)?;
            let found = brute_predecessor(&net, &target, *t, &budget)?;
            let value = json!({
                "kind": "predecessor",
                "satisfiable": found.is_some(),
                "predecessor": found.as_ref().map(|p| net.config_names(p)),
            });
            Ok(Outcome::answer(value, found.is_some()))
        }
        OracleKind::Nilpotency { net } => {
            let net = load_net(net)?;
            let nilpotent = brute_nilpotency(&net, &budget)?;
            Ok(Outcome::answer(json!({ "kind": "nilpotency", "nilpotent": nilpotent }), nilpotent))
        }
        OracleKind::AsyncReach { net, from, to } => {
            let net = load_net(net)?;
            let c0 = load_config(from, &net)?;
            let c1 = load_config(to, &net)?;
            let reachable = brute_async_reach(&net, &c0, &c1, &budget)?;
            Ok(Outcome::answer(json!({ "kind": "async-reach", "reachable": reachable }), reachable))
        }
        OracleKind::Domset { graph, k } => {
            let g = load_graph(graph)?;
            let sat = brute_dominating_set(&g, *k, &budget)?;
            Ok(Outcome::answer(json!({ "kind": "domset", "satisfiable": sat }), sat))
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))
}

fn load_net(path: &Path) -> Result<Network> {
    Network::from_json(&read_file(path)?)
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph> {
    Graph::from_json(&read_file(path)?)
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path, alphabet: &Alphabet) -> Result<Specification> {
    Specification::from_json(&read_file(path)?, alphabet)
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path, net: &Network) -> Result<Config> {
    let c = config_from_json(&read_file(path)?, net.alphabet())
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    if c.len() != net.n() {
        return Err(Error::validation(format!(
            "{}: configuration has {} entries, network has {} nodes",
            path.display(),
            c.len(),
            net.n()
        )));
    }
    Ok(c)
}

fn load_circuit(path: &Path) -> Result<CircuitDag> {
    CircuitDag::from_json(&read_file(path)?)
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))
}

fn check_horizon(asserted: Option<u32>, actual: u32) -> Result<()> {
    match asserted {
        Some(t) if t != actual => Err(Error::validation(format!(
            "--t {t} does not match the specification horizon {actual}"
        ))),
        _ => Ok(()),
    }
}

/// Loads and binarizes the decomposition at `path`, or builds one for `g`.
/// Loaded decompositions are validated against the graph first.
fn prepare_decomposition(g: &Graph, path: Option<&Path>) -> Result<TreeDecomposition> {
    match path {
        Some(path) => {
            let d = TreeDecomposition::from_json(&read_file(path)?)
                .map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
            if let Err(violations) = validate_decomposition(g, &d) {
                return Err(Error::validation(format!(
                    "{}: invalid decomposition: {}",
                    path.display(),
                    violations
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                )));
            }
            if d.is_binary()? {
                Ok(d)
            } else {
                binarize_balance(&d)
            }
        }
        None => standard_decomposition(g),
    }
}

fn solve_options(cli: &Cli) -> Result<SolveOptions> {
    let mut opts = SolveOptions { jobs: cli.jobs, ..SolveOptions::default() };
    if let Some(cap) = env_u64(ENV_BAG_CAP)? {
        opts.bag_cap = cap;
    }
    Ok(opts)
}

fn oracle_budget() -> Result<OracleBudget> {
    let mut budget = OracleBudget::default();
    if let Some(cap) = env_u64(ENV_ORACLE_CONFIGS)? {
        budget.max_configs = cap;
    }
    if let Some(cap) = env_u64(ENV_ORACLE_STEPS)? {
        budget.max_steps = cap;
    }
    Ok(budget)
}

fn env_u64(name: &str) -> Result<Option<u64>> {
    match std::env::var(name) {
        Ok(text) => match text.trim().parse::<u64>() {
            Ok(v) if v > 0 => Ok(Some(v)),
            _ => Err(Error::validation(format!(
                "{name} must be a positive integer, got {text:?}"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::validation(format!("{name}: {e}"))),
    }
}

fn parse_value(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

fn verdict_value(verdict: &Verdict, alphabet: &Alphabet) -> Result<Value> {
    parse_value(&verdict.to_json(alphabet)?)
}

/// Records the oracle answer next to the solver answer; a mismatch turns the
/// exit code into the disagreement code.
fn record_agreement(value: &mut Value, solver: bool, oracle: bool, exit: i32) -> i32 {
    value["oracle"] = json!(oracle);
    value["agreement"] = json!(solver == oracle);
    if solver == oracle {
        exit
    } else {
        EXIT_DISAGREE
    }
}

/// Runs the orbit directly and tests membership of the observed node's trace.
fn simulated_membership(
    net: &Network,
    c: &Config,
    v: usize,
    t: u32,
    set: &TraceSet,
) -> Result<bool> {
    let orbit = net.orbit(c, t)?;
    let symbols: Vec<_> = orbit.iter().map(|cfg| cfg[v]).collect();
    let trace = RleTrace::from_symbols(&symbols, net.alphabet())?;
    Ok(set.contains(&trace))
}

fn replay_orbit(net: &Network, start: &Config, schedule: &Schedule) -> Result<Vec<Config>> {
    let mut orbit = vec![start.clone()];
    for step in schedule {
        let next = apply_schedule(net, orbit.last().expect("orbit is non-empty"), &[step.clone()])?;
        orbit.push(next);
    }
    Ok(orbit)
}

/// Samples `steps` non-empty update sets; each node joins a set with
/// probability one half, empty draws fall back to one uniform node.
fn sample_schedule(n: usize, steps: u32, seed: u64) -> Schedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut schedule = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        let mut set: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if set.is_empty() && n > 0 {
            set.push(rng.gen_range(0..n));
        }
        schedule.push(set);
    }
    schedule
}

/// Host grid and bramble for a circuit gadget. The side defaults to the
/// smallest one whose bramble can pin every gate, and is checked so routing
/// failures surface as usage errors instead of deep construction errors.
fn circuit_host(circ: &CircuitDag, grid: Option<usize>) -> Result<(Graph, Bramble)> {
    let side = grid.unwrap_or_else(|| circ.n().max(2));
    if side < 2 || side < circ.n() {
        return Err(Error::validation(format!(
            "grid side {side} cannot host a {}-gate circuit; need at least {}",
            circ.n(),
            circ.n().max(2)
        )));
    }
    let host = Graph::grid(side, side)?;
    let b = grid_bramble(side)?;
    Ok((host, b))
}

/// Finds a schedule driving the async gadget to its goal. A given assignment
/// is tried alone; otherwise all assignments are searched in binary order.
fn async_witness(
    circ: &CircuitDag,
    gadget: &freezenet::gadgets::AsyncGadget,
    assignment: Option<&str>,
) -> Result<Option<Schedule>> {
    let inputs = gadget.inputs();
    let candidates: Vec<Vec<bool>> = match assignment {
        Some(text) => {
            let bits = parse_bits(text)?;
            if bits.len() != inputs {
                return Err(Error::validation(format!(
                    "assignment has {} bits, circuit has {} inputs",
                    bits.len(),
                    inputs
                )));
            }
            vec![bits]
        }
        None => {
            if inputs > 20 {
                return Err(Error::validation(format!(
                    "refusing to search {inputs} inputs; pass --assignment"
                )));
            }
            (0..1u32 << inputs)
                .map(|mask| (0..inputs).map(|i| mask >> (inputs - 1 - i) & 1 == 1).collect())
                .collect()
        }
    };
    let output = circ.output_gates()[0];
    for bits in candidates {
        if !circ.eval(&bits)?[output] {
            continue;
        }
        let schedule = gadget.witness_schedule(&bits)?;
        if gadget.replay(&schedule)? != gadget.goal {
            return Err(Error::Internal(
                "witness schedule misses the goal configuration".to_string(),
            ));
        }
        return Ok(Some(schedule));
    }
    Ok(None)
}

fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::validation(format!(
                "assignment must be a string of 0s and 1s, got {text:?}"
            ))),
        })
        .collect()
}
