//! End-to-end tests running the compiled binary against small fixtures.
//!
//! Each test shells out so exit codes, stdout, and environment handling are
//! exercised exactly as a user sees them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

use freezenet::core::{config_to_json, Alphabet, Graph, Network, State};
use freezenet::gadgets::{grid_bramble, CircuitDag, Digraph, GateKind};
use freezenet::traces::{enumerate_traces, RleTrace, Specification, TraceBounds, TraceSet};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_freezenet")
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(bin());
    cmd.args(args)
        .env_remove("FREEZENET_BAG_CAP")
        .env_remove("FREEZENET_ORACLE_CONFIGS")
        .env_remove("FREEZENET_ORACLE_STEPS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn parse(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is one JSON document")
}

struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    fn new() -> Fixtures {
        Fixtures { dir: TempDir::new().expect("temp dir") }
    }

    fn write(&self, name: &str, text: &str) -> String {
        let path = self.dir.path().join(name);
        std::fs::write(&path, text).expect("fixture write");
        path.to_str().expect("utf8 path").to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn net(&self, name: &str, net: &Network) -> String {
        self.write(name, &net.to_json().expect("table-backed network"))
    }

    fn config(&self, name: &str, net: &Network, c: &[State]) -> String {
        self.write(name, &config_to_json(&c.to_vec(), net.alphabet()).expect("config"))
    }

    fn spec(&self, name: &str, net: &Network, spec: &Specification) -> String {
        self.write(name, &spec.to_json(net.alphabet()))
    }
}

fn or_net(graph: Graph) -> Network {
    Network::from_closed_rule(graph, Alphabet::boolean(), |_, inputs| {
        vec![inputs.iter().copied().max().unwrap()]
    })
    .unwrap()
}

fn identity2() -> Network {
    // P2 closed neighborhoods are both [0, 1], so a node's own state sits
    // at its own index.
    Network::from_closed_rule(Graph::path(2), Alphabet::boolean(), |v, inputs| vec![inputs[v]])
        .unwrap()
}

fn bounded_set(net: &Network, t: u32, bounds: TraceBounds) -> TraceSet {
    TraceSet::new(enumerate_traces(net.alphabet(), t, bounds, 10_000).unwrap())
}

fn ends_at_one_spec(net: &Network, v: usize, t: u32) -> Specification {
    let mut nodes = BTreeMap::new();
    nodes.insert(v, bounded_set(net, t, TraceBounds { start: None, end: Some(1) }));
    Specification::from_sets(t, nodes).unwrap()
}

fn or2_circuit() -> CircuitDag {
    CircuitDag::new(
        vec![GateKind::Input, GateKind::Input, GateKind::Or, GateKind::Output],
        vec![(0, 2), (1, 2), (2, 3)],
    )
    .unwrap()
}

#[test]
fn check_spec_satisfiable_with_witness() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let spec = ends_at_one_spec(&net, 2, 2);
    let spec_path = f.spec("endsone.json", &net, &spec);

    let (code, stdout, _) =
        run(&["check-spec", "--net", &net_path, "--spec", &spec_path, "--t", "2"], &[]);
    assert_eq!(code, 0, "satisfiable instance exits 0");
    let v = parse(&stdout);
    assert_eq!(v["satisfiable"], Value::Bool(true));
    let witness = v["witness"].as_object().expect("witness present");

    // The witness replays: expand each node's runs, start an orbit from the
    // first symbols, and compare column by column.
    let mut columns: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (node, runs) in witness {
        let mut symbols = Vec::new();
        for run in runs.as_array().expect("runs array") {
            let name = run[0].as_str().expect("state name").to_string();
            let len = run[1].as_u64().expect("run length");
            symbols.extend(std::iter::repeat(name).take(len as usize));
        }
        assert_eq!(symbols.len(), 3, "t = 2 means three symbols");
        columns.insert(node.parse().expect("node index"), symbols);
    }
    assert_eq!(columns.len(), net.n());
    let start: Vec<String> = (0..net.n()).map(|v| columns[&v][0].clone()).collect();
    let c0 = net.parse_config(&start).unwrap();
    let orbit = net.orbit(&c0, 2).unwrap();
    for (step, config) in orbit.iter().enumerate() {
        for v in 0..net.n() {
            assert_eq!(
                net.config_names(config)[v], columns[&v][step],
                "witness column {v} disagrees with the replay at step {step}"
            );
        }
    }
    assert_eq!(columns[&2][2], "1", "constrained node ends at one");
}

#[test]
fn check_spec_oracle_agreement_keeps_the_exit_code() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 2, 2));

    let (code, stdout, _) =
        run(&["check-spec", "--net", &net_path, "--spec", &spec_path, "--oracle"], &[]);
    assert_eq!(code, 0, "agreement never turns into exit 4");
    let v = parse(&stdout);
    assert_eq!(v["agreement"], Value::Bool(true));
    assert_eq!(v["oracle"], Value::Bool(true));
}

#[test]
fn check_spec_unsatisfiable_exits_one() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    // Node 0 pinned to constant zero while node 1 must end at one: any one
    // reaching node 1 spreads to node 0 a step later, so the pair clashes.
    let constant = RleTrace::from_symbols(&[0, 0, 0], net.alphabet()).unwrap();
    let mut nodes = BTreeMap::new();
    nodes.insert(0, TraceSet::new(vec![constant]));
    nodes.insert(1, bounded_set(&net, 2, TraceBounds { start: None, end: Some(1) }));
    let spec = Specification::from_sets(2, nodes).unwrap();
    let spec_path = f.spec("clash.json", &net, &spec);

    let (code, stdout, _) =
        run(&["check-spec", "--net", &net_path, "--spec", &spec_path, "--oracle"], &[]);
    assert_eq!(code, 1);
    let v = parse(&stdout);
    assert_eq!(v["satisfiable"], Value::Bool(false));
    assert_eq!(v["witness"], Value::Null);
    assert_eq!(v["agreement"], Value::Bool(true));
}

#[test]
fn check_spec_horizon_mismatch_is_a_usage_error() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 2, 2));

    let (code, _, stderr) =
        run(&["check-spec", "--net", &net_path, "--spec", &spec_path, "--t", "3"], &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("horizon"));
}

#[test]
fn check_spec_accepts_a_decomposition_file() {
    let f = Fixtures::new();
    let net = or_net(Graph::cycle(4).unwrap());
    let net_path = f.net("c4.json", &net);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 3, 2));
    // A star of three leaf bags under one fat root: valid but not binary,
    // so the tool has to binarize it before solving.
    let decomp = f.write(
        "decomp.json",
        r#"{"bags": [[0, 1, 2, 3], [0, 1], [1, 2], [2, 3]], "edges": [[0, 1], [0, 2], [0, 3]], "root": 0}"#,
    );

    let (code, stdout, _) = run(
        &["check-spec", "--net", &net_path, "--spec", &spec_path, "--decomposition", &decomp],
        &[],
    );
    assert_eq!(code, 0);
    assert_eq!(parse(&stdout)["satisfiable"], Value::Bool(true));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_job_counts() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 2, 2));
    let base = ["check-spec", "--net", &net_path, "--spec", &spec_path];

    let (_, first, _) = run(&base, &[]);
    let (_, second, _) = run(&base, &[]);
    let mut one_job = base.to_vec();
    one_job.extend(["--jobs", "1"]);
    let (_, third, _) = run(&one_job, &[]);
    let mut two_jobs = base.to_vec();
    two_jobs.extend(["--jobs", "2"]);
    let (_, fourth, _) = run(&two_jobs, &[]);
    assert_eq!(first, second);
    assert_eq!(first, third);
    assert_eq!(first, fourth);
}

#[test]
fn out_flag_redirects_the_document() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 2, 2));
    let out_path = f.path("verdict.json");

    let (code, stdout, _) = run(
        &[
            "check-spec",
            "--net",
            &net_path,
            "--spec",
            &spec_path,
            "--out",
            out_path.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code, 0);
    assert!(stdout.is_empty(), "document goes to the file, not stdout");
    let on_disk = std::fs::read_to_string(&out_path).unwrap();
    let (_, direct, _) = run(&["check-spec", "--net", &net_path, "--spec", &spec_path], &[]);
    assert_eq!(on_disk, direct);
}

#[test]
fn predict_follows_the_orbit_and_cross_checks() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let config_path = f.config("start.json", &net, &[1, 0, 0]);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 2, 2));

    let args = [
        "predict", "--net", &net_path, "--config", &config_path, "--node", "2", "--spec",
        &spec_path, "--oracle",
    ];
    let (code, stdout, _) = run(&args, &[]);
    assert_eq!(code, 0, "the one reaches node 2 by step 2");
    let v = parse(&stdout);
    assert_eq!(v["agreement"], Value::Bool(true));
    assert_eq!(v["node"], Value::Number(2.into()));

    // From the all-zero start nothing ever rises, so the same spec fails.
    let zeros_path = f.config("zeros.json", &net, &[0, 0, 0]);
    let args = [
        "predict", "--net", &net_path, "--config", &zeros_path, "--node", "2", "--spec",
        &spec_path, "--oracle",
    ];
    let (code, stdout, _) = run(&args, &[]);
    assert_eq!(code, 1);
    assert_eq!(parse(&stdout)["agreement"], Value::Bool(true));
}

#[test]
fn predict_rejects_specs_constraining_other_nodes() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let config_path = f.config("start.json", &net, &[1, 0, 0]);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 2, 2));

    let args = [
        "predict", "--net", &net_path, "--config", &config_path, "--node", "1", "--spec",
        &spec_path,
    ];
    let (code, _, stderr) = run(&args, &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("exactly node 1"));
}

#[test]
fn predecessor_existence_and_absence() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);

    let ones_path = f.config("ones.json", &net, &[1, 1, 1]);
    let (code, stdout, _) = run(
        &["predecessor", "--net", &net_path, "--target", &ones_path, "--t", "1", "--oracle"],
        &[],
    );
    assert_eq!(code, 0);
    let v = parse(&stdout);
    assert!(v["predecessor"].is_array());
    assert_eq!(v["agreement"], Value::Bool(true));

    // Node 1 reads the whole path, so a zero there after one step forces
    // all zeros before, contradicting the one at node 0.
    let mixed_path = f.config("mixed.json", &net, &[1, 0, 1]);
    let (code, stdout, _) = run(
        &["predecessor", "--net", &net_path, "--target", &mixed_path, "--t", "1", "--oracle"],
        &[],
    );
    assert_eq!(code, 1);
    let v = parse(&stdout);
    assert_eq!(v["predecessor"], Value::Null);
    assert_eq!(v["agreement"], Value::Bool(true));
}

#[test]
fn nilpotency_example_exits_one_for_identity() {
    let f = Fixtures::new();
    let net = identity2();
    let net_path = f.net("identity2.json", &net);

    let (code, stdout, _) = run(&["nilpotency", "--net", &net_path, "--oracle"], &[]);
    assert_eq!(code, 1, "the identity network keeps every fixed point");
    let v = parse(&stdout);
    assert_eq!(v["nilpotent"], Value::Bool(false));
    assert_eq!(v["agreement"], Value::Bool(true));
}

#[test]
fn nilpotency_accepts_a_collapsing_network() {
    let f = Fixtures::new();
    let net = Network::from_closed_rule(Graph::path(2), Alphabet::boolean(), |_, _| vec![1])
        .unwrap();
    let net_path = f.net("allone.json", &net);

    let (code, stdout, _) = run(&["nilpotency", "--net", &net_path, "--oracle"], &[]);
    assert_eq!(code, 0);
    let v = parse(&stdout);
    assert_eq!(v["nilpotent"], Value::Bool(true));
    assert_eq!(v["agreement"], Value::Bool(true));
}

#[test]
fn async_reachability_respects_freezing() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let from_path = f.config("from.json", &net, &[0, 0, 1]);
    let to_path = f.config("to.json", &net, &[1, 1, 1]);

    let args =
        ["async-reach", "--net", &net_path, "--from", &from_path, "--to", &to_path, "--oracle"];
    let (code, stdout, _) = run(&args, &[]);
    assert_eq!(code, 0);
    let v = parse(&stdout);
    assert!(v["schedule"].is_array());
    assert_eq!(v["agreement"], Value::Bool(true));

    // Ones never fall back, so losing one is unreachable.
    let lost_path = f.config("lost.json", &net, &[0, 0, 0]);
    let args = [
        "async-reach", "--net", &net_path, "--from", &from_path, "--to", &lost_path, "--oracle",
    ];
    let (code, stdout, _) = run(&args, &[]);
    assert_eq!(code, 1);
    assert_eq!(parse(&stdout)["agreement"], Value::Bool(true));
}

#[test]
fn simulate_runs_replays_and_samples() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let config_path = f.config("start.json", &net, &[1, 0, 0]);

    let (code, stdout, _) =
        run(&["simulate", "--net", &net_path, "--config", &config_path, "--steps", "2"], &[]);
    assert_eq!(code, 0);
    let v = parse(&stdout);
    let orbit = v["orbit"].as_array().unwrap();
    assert_eq!(orbit.len(), 3);
    assert_eq!(orbit[2], serde_json::json!(["1", "1", "1"]));

    let schedule_path = f.write("sched.json", "[[1], [2]]");
    let (code, stdout, _) = run(
        &["simulate", "--net", &net_path, "--config", &config_path, "--schedule", &schedule_path],
        &[],
    );
    assert_eq!(code, 0);
    let v = parse(&stdout);
    assert_eq!(v["orbit"].as_array().unwrap().len(), 3);
    assert_eq!(v["orbit"][1], serde_json::json!(["1", "1", "0"]));
    assert_eq!(v["orbit"][2], serde_json::json!(["1", "1", "1"]));

    let sampled = [
        "simulate",
        "--net",
        &net_path,
        "--config",
        &config_path,
        "--random-schedule",
        "4",
        "--seed",
        "11",
    ];
    let (code, first, _) = run(&sampled, &[]);
    assert_eq!(code, 0);
    let (_, second, _) = run(&sampled, &[]);
    assert_eq!(first, second, "one seed, one schedule");
    assert_eq!(parse(&first)["schedule"].as_array().unwrap().len(), 4);

    let (code, _, stderr) =
        run(&["simulate", "--net", &net_path, "--config", &config_path], &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--steps"));
}

#[test]
fn decompose_builds_and_rebuilds() {
    let f = Fixtures::new();
    let g = Graph::grid(3, 3).unwrap();
    let graph_path = f.write("grid.json", &g.to_json());

    let (code, stdout, _) = run(&["decompose", "--graph", &graph_path], &[]);
    assert_eq!(code, 0);
    let v = parse(&stdout);
    assert!(v["width"].as_u64().unwrap() <= 8);
    assert!(v["decomposition"]["bags"].is_array());

    // Feed the produced decomposition back in for validation and balancing.
    let decomp_path = f.write("decomp.json", &v["decomposition"].to_string());
    let (code, stdout, _) =
        run(&["decompose", "--graph", &graph_path, "--decomposition", &decomp_path], &[]);
    assert_eq!(code, 0);
    let rebuilt = parse(&stdout);
    assert!(rebuilt["depth"].as_u64().is_some());

    let (code, _, stderr) = run(&["decompose"], &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--graph"));
}

#[test]
fn route_embeds_a_small_digraph() {
    let f = Fixtures::new();
    let g = Graph::grid(4, 4).unwrap();
    let graph_path = f.write("grid.json", &g.to_json());
    let bramble_path = f.write("bramble.json", &grid_bramble(4).unwrap().to_json());
    let d = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
    let digraph_path = f.write("digraph.json", &d.to_json());

    let (code, stdout, _) = run(
        &["route", "--graph", &graph_path, "--bramble", &bramble_path, "--digraph", &digraph_path],
        &[],
    );
    assert_eq!(code, 0);
    let v = parse(&stdout);
    assert_eq!(v["mu"].as_array().unwrap().len(), 3);
    assert_eq!(v["paths"].as_array().unwrap().len(), 2);
}

#[test]
fn gadget_domset_decides_both_ways() {
    let f = Fixtures::new();
    let star_path = f.write("star.json", &Graph::star(4).to_json());
    let (code, stdout, _) = run(&["gadget", "domset", "--graph", &star_path, "--k", "1"], &[]);
    assert_eq!(code, 0, "the hub dominates a star");
    let v = parse(&stdout);
    assert_eq!(v["satisfiable"], Value::Bool(true));
    assert!(v["marking"].is_array());

    let path_path = f.write("p4.json", &Graph::path(4).to_json());
    let (code, stdout, _) = run(&["gadget", "domset", "--graph", &path_path, "--k", "1"], &[]);
    assert_eq!(code, 1, "one vertex cannot dominate a four-path");
    assert_eq!(parse(&stdout)["marking"], Value::Null);
}

#[test]
fn gadget_prediction_tracks_the_assignment() {
    let f = Fixtures::new();
    let circuit_path = f.write("or2.json", &or2_circuit().to_json());

    let (code, stdout, _) = run(
        &["gadget", "prediction", "--circuit", &circuit_path, "--assignment", "10"],
        &[],
    );
    assert_eq!(code, 0);
    assert_eq!(parse(&stdout)["output"], Value::Bool(true));

    let (code, stdout, _) = run(
        &["gadget", "prediction", "--circuit", &circuit_path, "--assignment", "00"],
        &[],
    );
    assert_eq!(code, 1);
    assert_eq!(parse(&stdout)["output"], Value::Bool(false));

    let (code, _, stderr) = run(
        &["gadget", "prediction", "--circuit", &circuit_path, "--assignment", "1"],
        &[],
    );
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());
}

#[test]
fn gadget_circuit_family_agrees_on_satisfiability() {
    let f = Fixtures::new();
    let circuit_path = f.write("or2.json", &or2_circuit().to_json());

    let (code, stdout, _) = run(&["gadget", "nilpotency", "--circuit", &circuit_path], &[]);
    assert_eq!(code, 0, "a satisfiable circuit blocks nilpotency");
    let v = parse(&stdout);
    assert_eq!(v["satisfiable"], Value::Bool(true));
    assert_eq!(v["nilpotent"], Value::Bool(false));

    let (code, stdout, _) = run(&["gadget", "predecessor", "--circuit", &circuit_path], &[]);
    assert_eq!(code, 0);
    assert!(parse(&stdout)["target"].is_array());

    let (code, stdout, _) = run(&["gadget", "async", "--circuit", &circuit_path], &[]);
    assert_eq!(code, 0, "the search finds a satisfying assignment");
    assert!(parse(&stdout)["schedule"].is_array());

    let (code, stdout, _) = run(
        &["gadget", "async", "--circuit", &circuit_path, "--assignment", "00"],
        &[],
    );
    assert_eq!(code, 1, "the zero assignment misses the goal");
    assert_eq!(parse(&stdout)["reachable"], Value::Bool(false));
}

#[test]
fn oracle_subcommands_answer_directly() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 2, 2));

    let (code, stdout, _) =
        run(&["oracle", "check-spec", "--net", &net_path, "--spec", &spec_path], &[]);
    assert_eq!(code, 0);
    assert_eq!(parse(&stdout)["satisfiable"], Value::Bool(true));

    let identity_path = f.net("identity2.json", &identity2());
    let (code, stdout, _) = run(&["oracle", "nilpotency", "--net", &identity_path], &[]);
    assert_eq!(code, 1);
    assert_eq!(parse(&stdout)["nilpotent"], Value::Bool(false));

    let p4_path = f.write("p4.json", &Graph::path(4).to_json());
    let (code, stdout, _) = run(&["oracle", "domset", "--graph", &p4_path, "--k", "2"], &[]);
    assert_eq!(code, 0);
    assert_eq!(parse(&stdout)["satisfiable"], Value::Bool(true));
}

#[test]
fn oracle_budget_env_var_trips_exit_three() {
    let f = Fixtures::new();
    let net = or_net(Graph::path(3));
    let net_path = f.net("p3.json", &net);
    let spec_path = f.spec("endsone.json", &net, &ends_at_one_spec(&net, 2, 2));
    let args = ["oracle", "check-spec", "--net", &net_path, "--spec", &spec_path];

    let (code, _, stderr) = run(&args, &[("FREEZENET_ORACLE_CONFIGS", "2")]);
    assert_eq!(code, 3, "eight start configurations exceed a cap of two");
    assert!(stderr.contains("cap"));

    let (code, _, stderr) = run(&args, &[("FREEZENET_ORACLE_CONFIGS", "plenty")]);
    assert_eq!(code, 2);
    assert!(stderr.contains("positive integer"));
}

#[test]
fn unreadable_input_exits_two() {
    let missing = Path::new("/nonexistent").join("net.json");
    let (code, _, stderr) = run(&["nilpotency", "--net", missing.to_str().unwrap()], &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("cannot read"));
}
