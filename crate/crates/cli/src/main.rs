use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use evflow::augment::{augmented_dot, augmented_json, auxiliary_dot, auxiliary_json, detect_unbounded};
use evflow::capacitated::{partition_instance, solve_capacitated, ColumnGeneration};
use evflow::lp::write_lp;
use evflow::oracle::{brute_flow, enumerate_all, BruteFlow, OracleCaps};
use evflow::router::RouteError;
use evflow::{
    check_assumption1, load_network, network_to_json, route_single, AssumptionCheck, Augmentation, ChargingNetwork, FlowError,
    FlowObjective, Rational, Scalar,
};

mod output;

const SCHEMA: &str = r#"Network file (JSON). Numbers are strings ("5", "2.5", "21/2") or JSON numbers.

  {
    "L": "9",                                  battery capacity
    "thresholds": ["0", "5", "9"],             charging curve breakpoints, 0 first, L last
    "nodes": ["s", "i1", "i2", "t"],
    "edges": [{"tail": "s", "head": "i1", "d": "5", "ell": "5", "u": "1"}],
                                               d battery use, ell travel time,
                                               u optional edge capacity
    "stations": [{"node": "i1", "chargers": 1, "speeds": ["2", "1"],
                  "prices": ["0", "0"], "occupancy_price": "0",
                  "thresholds": ["0", "5", "9"]}],
                                               one speed and price per interval;
                                               thresholds optional per station;
                                               repeated nodes become separate
                                               charger types
    "od_pairs": [{"s": "s", "t": "t", "demand": "1"}]
  }

Exit codes: 0 success, 1 infeasible, unbounded or assumption violated,
2 input error, 3 internal error."#;

#[derive(Parser)]
#[command(name = "evflow", version, about = "Charging-aware routing and flow for electric vehicles", after_help = SCHEMA)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Use floating point instead of exact rational arithmetic.
    #[arg(long, global = true)]
    float: bool,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a network file.
    Validate { input: PathBuf },
    /// Check that battery-shortest paths between terminals are also time-shortest.
    Assumption { input: PathBuf },
    /// Build the charge-augmented graph.
    Augment {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        /// Emit the auxiliary station-copy network instead.
        #[arg(long)]
        aux: bool,
    },
    /// Cheapest charging strategy for one OD pair.
    Route {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        od: usize,
    },
    /// Maximum EV flow.
    Maxflow {
        input: PathBuf,
        #[command(flatten)]
        flow: FlowArgs,
        /// Also write the LP in CPLEX LP format.
        #[arg(long)]
        emit_lp: Option<PathBuf>,
    },
    /// Minimum-cost EV flow meeting every demand.
    Mincost {
        input: PathBuf,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Print the PARTITION network for the given values.
    GenPartition {
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
    },
}

#[derive(clap::Args)]
struct FlowArgs {
    /// Honour edge capacities (column generation).
    #[arg(long)]
    edge_caps: bool,
    /// Relative tolerance for column generation.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Cross-check against brute-force enumeration.
    #[arg(long)]
    oracle: bool,
}

enum Failure {
    /// Result computed, but negative (infeasible, unbounded, violated).
    Negative(Value),
    Input(String),
    Internal(String),
}

type Outcome = Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(String),
}

fn read_network<T: Scalar>(path: &Path) -> Result<ChargingNetwork<T>, Failure> {
    let bytes = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map(|_| buf)
    } else {
        fs::read(path)
    }
    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    load_network(&bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn flow_failure<T: Scalar>(net: &ChargingNetwork<T>, err: FlowError<T>) -> Failure {
    match err {
        FlowError::Unbounded { od, path } => Failure::Negative(json!({"status": "unbounded", "od": od, "path": path})),
        FlowError::AssumptionViolated(v) => {
            Failure::Negative(json!({"status": "assumption_violated", "violation": output::violation(net, &v)}))
        }
        FlowError::Infeasible { farkas } => {
            Failure::Negative(json!({"status": "infeasible", "certificate": farkas.iter().map(output::num).collect::<Vec<_>>()}))
        }
        other => Failure::Internal(other.to_string()),
    }
}

fn cross_check<T: Scalar>(net: &ChargingNetwork<T>, objective: FlowObjective, edge_caps: bool, value: &T) -> Result<Value, Failure> {
    let universes = enumerate_all(net, &OracleCaps::default()).map_err(|e| Failure::Input(format!("oracle: {e}")))?;
    match brute_flow(net, &universes, objective, edge_caps) {
        BruteFlow::Optimal { value: brute, .. } if brute.approx_eq(value) => Ok(output::num(&brute)),
        BruteFlow::Optimal { value: brute, .. } => {
            Err(Failure::Internal(format!("oracle disagrees: {} vs {}", brute.render(), value.render())))
        }
        other => Err(Failure::Internal(format!("oracle disagrees: {other:?}"))),
    }
}

fn run<T: Scalar>(command: &Command) -> Outcome {
    match command {
        Command::Validate { input } => {
            let net = read_network::<T>(input)?;
            Ok(Output::Json(output::summary(&net)))
        }
        Command::Assumption { input } => {
            let net = read_network::<T>(input)?;
            let aug = Augmentation::build(&net);
            match check_assumption1(&net, &aug.closure) {
                AssumptionCheck::Holds => Ok(Output::Json(json!({"holds": true}))),
                AssumptionCheck::Violated(v) => {
                    Err(Failure::Negative(json!({"holds": false, "violation": output::violation(&net, &v)})))
                }
            }
        }
        Command::Augment { input, emit, aux } => {
            let net = read_network::<T>(input)?;
            let aug = Augmentation::build(&net);
            Ok(match (emit, aux) {
                (Emit::Json, false) => Output::Json(augmented_json(&net, &aug)),
                (Emit::Json, true) => Output::Json(auxiliary_json(&net, &aug)),
                (Emit::Dot, false) => Output::Text(augmented_dot(&net, &aug)),
                (Emit::Dot, true) => Output::Text(auxiliary_dot(&net, &aug)),
            })
        }
        Command::Route { input, od } => {
            let net = read_network::<T>(input)?;
            let aug = Augmentation::build(&net);
            match route_single(&net, &aug, *od) {
                Ok(route) => Ok(Output::Json(output::route(&net, &route))),
                Err(RouteError::UnknownOd(k)) => Err(Failure::Input(format!("no OD pair with index {k}"))),
                Err(RouteError::AssumptionViolated(v)) => Err(Failure::Negative(
                    json!({"status": "assumption_violated", "violation": output::violation(&net, &v)}),
                )),
                Err(RouteError::Infeasible(k)) => Err(Failure::Negative(json!({"status": "infeasible", "od": k}))),
            }
        }
        Command::Maxflow { input, flow, emit_lp } => {
            let net = read_network::<T>(input)?;
            solve(&net, FlowObjective::MaxFlow, flow, emit_lp.as_deref())
        }
        Command::Mincost { input, flow } => {
            let net = read_network::<T>(input)?;
            solve(&net, FlowObjective::MinCost, flow, None)
        }
        Command::GenPartition { values } => {
            let net = partition_instance::<T>(values).map_err(|e| Failure::Input(e.to_string()))?;
            Ok(Output::Json(network_to_json(&net.to_raw())))
        }
    }
}

fn solve<T: Scalar>(net: &ChargingNetwork<T>, objective: FlowObjective, args: &FlowArgs, emit_lp: Option<&Path>) -> Outcome {
    if !args.epsilon.is_finite() || args.epsilon < 0.0 {
        return Err(Failure::Input("epsilon must be non-negative".into()));
    }
    let mut result = if args.edge_caps {
        let settings = ColumnGeneration { epsilon: args.epsilon, ..ColumnGeneration::default() };
        let sol = solve_capacitated(net, objective, settings).map_err(|e| flow_failure(net, e))?;
        output::capacitated(net, &sol)
    } else {
        let aug = Augmentation::build(net);
        if let Some(path) = emit_lp {
            if detect_unbounded(net, &aug.closure).is_none() {
                let lp = evflow::flow::build_flow_lp(net, &aug, objective, true);
                fs::write(path, write_lp(&lp.lp)).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
        }
        let sol = evflow::flow::solve_flow(net, &aug, objective).map_err(|e| flow_failure(net, e))?;
        output::flow(net, &sol)
    };
    if args.oracle {
        let value = T::parse_decimal(result["objective"].as_str().expect("objective is rendered")).expect("round trip");
        result["oracle"] = cross_check(net, objective, args.edge_caps, &value)?;
    }
    Ok(Output::Json(result))
}

fn emit(cli: &Cli, value: &Output) -> Result<(), Failure> {
    let text = match value {
        Output::Json(v) => format!("{}\n", serde_json::to_string_pretty(v).expect("values serialise")),
        Output::Text(t) => t.clone(),
    };
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Internal(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = if cli.float { run::<f64>(&cli.command) } else { run::<Rational>(&cli.command) };
    let outcome = outcome.and_then(|out| emit(&cli, &out));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(value)) => match emit(&cli, &Output::Json(value)) {
            Ok(()) => ExitCode::from(1),
            Err(_) => ExitCode::from(2),
        },
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
