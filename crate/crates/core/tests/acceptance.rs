//! One line per acceptance criterion. Runs without the libtest harness so the
//! verdicts always reach the terminal.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{check_charge_pattern, example1, example1_raw, has_partition, q, r, random_instance, Shape};
use evflow::augment::{node_label, EdgeKind};
use evflow::capacitated::{partition_instance, solve_capacitated, ColumnGeneration};
use evflow::flow::build_flow_lp;
use evflow::lp::{solve, LpOutcome};
use evflow::oracle::{brute_flow, brute_single_opt, enumerate_all, BruteFlow, OracleCaps};
use evflow::router::RouteError;
use evflow::{
    route_single, solve_maxflow, solve_mincost, Augmentation, ExactNetwork, FlowError, FlowObjective, Rational, RawNetwork,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn figure_reconstruction() -> String {
    let net = example1();
    let aug = Augmentation::build(&net);
    let g = &aug.graph;
    let nodes: BTreeSet<String> = (0..g.nodes().len()).map(|n| node_label(&net, &aug, n)).collect();
    let expected_nodes: BTreeSet<String> = [
        "(s,9)", "(t,0)", "(i1,1,0)", "(i1,1,4)", "(i1,1,5)", "(i1,2,5)", "(i1,2,6)", "(i1,2,9)", "(i2,1,0)", "(i2,1,3)",
        "(i2,1,5)", "(i2,2,5)", "(i2,2,6)", "(i2,2,9)",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(nodes, expected_nodes);

    let edges: BTreeSet<(String, String, &str)> = g
        .edges()
        .iter()
        .map(|e| (node_label(&net, &aug, e.tail), node_label(&net, &aug, e.head), e.kind.roman()))
        .collect();
    let arc = |a: &str, b: &str, k: EdgeKind| (a.to_string(), b.to_string(), k.roman());
    use EdgeKind::*;
    let figure = [
        arc("(i1,1,0)", "(i1,1,4)", Charge),
        arc("(i1,1,4)", "(i1,1,5)", Charge),
        arc("(i1,2,5)", "(i1,2,6)", Charge),
        arc("(i1,2,6)", "(i1,2,9)", Charge),
        arc("(i2,1,0)", "(i2,1,3)", Charge),
        arc("(i2,1,3)", "(i2,1,5)", Charge),
        arc("(i2,2,5)", "(i2,2,6)", Charge),
        arc("(i2,2,6)", "(i2,2,9)", Charge),
        arc("(i1,1,5)", "(i1,2,5)", Chain),
        arc("(i2,1,5)", "(i2,2,5)", Chain),
        arc("(s,9)", "(i1,1,4)", Travel),
        arc("(s,9)", "(i2,1,5)", Travel),
        arc("(s,9)", "(i2,2,5)", Travel),
        arc("(i1,2,6)", "(i2,1,0)", Travel),
        arc("(i1,2,9)", "(i2,1,3)", Travel),
        arc("(i1,1,5)", "(t,0)", Travel),
        arc("(i1,2,5)", "(t,0)", Travel),
        arc("(i2,2,6)", "(t,0)", Travel),
    ];
    // Drawn in the figure, but leaving s full and driving 5 arrives at 4,
    // which lies in the first interval of i1, not at level 5 of the second.
    let inconsistent = arc("(s,9)", "(i1,2,5)", Travel);
    assert_eq!(edges, figure.into_iter().collect::<BTreeSet<_>>());
    assert!(!edges.contains(&inconsistent));
    "14 nodes, 18 arcs; figure arc (s,9)->(i1,2,5) absent (battery-inconsistent)".into()
}

fn single_ev_optimum() -> String {
    let net = example1();
    let aug = Augmentation::build(&net);
    let route = route_single(&net, &aug, 0).unwrap();
    assert_eq!(route.cost, q(21, 2));
    assert!(route.strategy.check(&net).is_ok());
    check_charge_pattern(&net, &aug, &route);
    format!("cost {} via {}", route.cost, route.strategy.path_labels(&net).join("-"))
}

fn oracle_equivalence() -> String {
    let (mut routes, mut flows) = (0, 0);
    for seed in 0..200 {
        let aligned = random_instance(seed, Shape::default());
        let aug = Augmentation::build(&aligned);
        let universes = enumerate_all(&aligned, &OracleCaps::default()).unwrap();
        let brute = brute_single_opt(&aligned, &universes[0]).map(|(_, c)| c);
        match route_single(&aligned, &aug, 0) {
            Ok(route) => {
                assert_eq!(Some(route.cost), brute, "route seed {seed}");
                routes += 1;
            }
            Err(RouteError::Infeasible(_)) => assert_eq!(brute, None, "route seed {seed}"),
            Err(e) => panic!("route seed {seed}: {e}"),
        }

        let net = random_instance(seed, Shape { aligned: false, ..Shape::default() });
        let aug = Augmentation::build(&net);
        let universes = enumerate_all(&net, &OracleCaps::default()).unwrap();
        match (solve_maxflow(&net, &aug), brute_flow(&net, &universes, FlowObjective::MaxFlow, false)) {
            (Ok(sol), BruteFlow::Optimal { value, .. }) => {
                assert_eq!(sol.objective, value, "flow seed {seed}");
                flows += 1;
            }
            (Err(FlowError::Unbounded { .. }), BruteFlow::Unbounded) => {}
            (got, want) => panic!("flow seed {seed}: {got:?} vs {want:?}"),
        }
    }
    format!("200 seeds; {routes} feasible routes and {flows} bounded flows compared")
}

fn max_flow_value() -> String {
    let net = example1();
    let aug = Augmentation::build(&net);
    let sol = solve_maxflow(&net, &aug).unwrap();
    assert_eq!(sol.objective, r(4));
    let dual: Rational = net.stations().iter().zip(&sol.duals.y).map(|(s, y)| Rational::from_integer(s.chargers.into()) * y).sum();
    assert_eq!(dual, r(4));

    let lp = build_flow_lp(&net, &aug, FlowObjective::MaxFlow, false);
    let LpOutcome::Optimal(raw) = solve(&lp.lp) else { panic!("edge LP not optimal") };
    assert_eq!(raw.objective, r(4));
    assert_eq!(lp.lp.dual_objective(&raw.duals, &raw.bound_duals), r(4));
    assert_eq!(lp.lp.dual_violation(&raw.duals, &raw.bound_duals), r(0));
    assert_eq!(lp.lp.primal_violation(&raw.x), r(0));
    "value 4, duality gap 0".into()
}

fn min_cost_consistency() -> String {
    let base = example1().scale_chargers(1000);
    let aug = Augmentation::build(&base);
    let one = solve_mincost(&base, &aug).unwrap();
    let single = route_single(&base, &aug, 0).unwrap();
    assert_eq!(one.objective, q(21, 2));
    assert_eq!(one.objective, single.cost);

    let three = base.with_demands(&[r(3)]);
    let sol = solve_mincost(&three, &Augmentation::build(&three)).unwrap();
    let universes = enumerate_all(&three, &OracleCaps::default()).unwrap();
    assert_eq!(brute_flow(&three, &universes, FlowObjective::MinCost, false).value(), Some(&sol.objective));
    assert!(sol.objective >= q(63, 2));

    let tight = example1().with_demands(&[r(3)]);
    let sol_tight = solve_mincost(&tight, &Augmentation::build(&tight)).unwrap();
    let universes = enumerate_all(&tight, &OracleCaps::default()).unwrap();
    assert_eq!(brute_flow(&tight, &universes, FlowObjective::MinCost, false).value(), Some(&sol_tight.objective));
    assert!(sol_tight.objective >= q(63, 2));
    format!("D=1: {}; D=3: {} (a=1000), {} (a=1)", one.objective, sol.objective, sol_tight.objective)
}

fn gadget_suite() -> String {
    let mut cases: Vec<Vec<u64>> = vec![
        vec![2, 2, 2, 2],
        vec![3, 3, 1, 1],
        vec![3, 3, 3, 3],
        vec![4, 3, 3, 2],
        vec![5, 5, 1, 1],
        vec![5, 3, 3, 1],
        vec![1, 1, 1, 9],
        vec![2, 2],
        vec![1, 1, 2],
    ];
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let n = rng.gen_range(1..=10);
        let mut values: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=12)).collect();
        if values.iter().sum::<u64>() % 2 == 1 {
            values[0] += 1;
        }
        cases.push(values);
    }
    let (mut yes, mut no) = (0, 0);
    for values in &cases {
        let net: ExactNetwork = partition_instance(values).unwrap();
        let flow = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration::default()).unwrap().flow.objective;
        if has_partition(values) {
            assert_eq!(flow, r(2), "{values:?}");
            yes += 1;
        } else {
            assert!(flow < r(2), "{values:?}: {flow}");
            no += 1;
        }
    }
    format!("{} instances: {yes} partitionable, {no} not", cases.len())
}

fn unboundedness() -> String {
    let direct = |d: i64| {
        let mut raw = RawNetwork::new(r(9), vec![r(0), r(9)]);
        raw.nodes(["s", "t"]).edge("s", "t", r(d), r(1)).od("s", "t", r(1));
        ExactNetwork::from_raw(raw).unwrap()
    };
    let net = direct(9);
    let aug = Augmentation::build(&net);
    assert!(matches!(solve_maxflow(&net, &aug), Err(FlowError::Unbounded { .. })));

    let net = direct(10);
    let aug = Augmentation::build(&net);
    assert_eq!(solve_maxflow(&net, &aug).unwrap().objective, r(0));
    assert!(matches!(route_single(&net, &aug, 0), Err(RouteError::Infeasible(0))));
    assert!(matches!(solve_mincost(&net, &aug), Err(FlowError::Infeasible { .. })));

    let mut raw = example1_raw();
    raw.edge("s", "t", r(9), r(9));
    let net = ExactNetwork::from_raw(raw).unwrap();
    assert!(matches!(solve_maxflow(&net, &Augmentation::build(&net)), Err(FlowError::Unbounded { .. })));
    "d=L unbounded; d=L+1 value 0".into()
}

fn homogeneity() -> String {
    let mut checked = 0;
    let mut seed = 0;
    while checked < 20 {
        let net = random_instance(5_000 + seed, Shape { aligned: false, ..Shape::default() });
        seed += 1;
        let Ok(base) = solve_maxflow(&net, &Augmentation::build(&net)) else { continue };
        let factor = 2 + seed % 4;
        let scaled = net.scale_chargers(factor);
        let sol = solve_maxflow(&scaled, &Augmentation::build(&scaled)).unwrap();
        assert_eq!(sol.objective, base.objective * r(factor as i64), "seed {}", 5_000 + seed - 1);
        checked += 1;
    }
    format!("{checked} bounded instances")
}

type Criterion = (&'static str, Duration, fn() -> String);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 augmented graph of the worked example", Duration::from_secs(1), figure_reconstruction),
        ("2 single-EV optimum 21/2", Duration::from_secs(1), single_ev_optimum),
        ("3 oracle equivalence on 200 instances", Duration::from_secs(60), oracle_equivalence),
        ("4 max-flow value and strong duality", Duration::from_secs(5), max_flow_value),
        ("5 min-cost consistency", Duration::from_secs(5), min_cost_consistency),
        ("6 PARTITION gadgets", Duration::from_secs(120), gadget_suite),
        ("7 unboundedness", Duration::from_secs(1), unboundedness),
        ("8 charger scaling homogeneity", Duration::from_secs(30), homogeneity),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check));
        let took = start.elapsed();
        let verdict = match result {
            Ok(detail) if took <= budget => format!("PASS  {detail}"),
            Ok(detail) => format!("FAIL  over budget {budget:?}: {detail}"),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                format!("FAIL  {msg}")
            }
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!("criterion {name:<42} {took:>10.2?}  {verdict}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
