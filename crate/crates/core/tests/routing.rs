mod common;

use common::{check_charge_pattern, example1, q, r, random_instance, Shape};
use evflow::capacitated::{lattice_cost_to_go, pricing_oracle, ChargeSurcharge, EdgeSurcharge, PricingCosts};
use evflow::oracle::{brute_single_opt, enumerate_strategies, OracleCaps};
use evflow::router::{RouteError, SingleEvGraph};
use evflow::{load_network, network_to_json, route_single, Augmentation, ExactNetwork, FloatNetwork, Rational, Scalar};
use proptest::prelude::*;

fn zero_dual_costs(net: &ExactNetwork) -> PricingCosts<Rational> {
    let w = vec![r(0); net.edges().len()];
    let pi = vec![vec![r(0); net.curve().intervals()]; net.stations().len()];
    PricingCosts::from_duals(net, &w, &pi, EdgeSurcharge::TravelTime, ChargeSurcharge::UnitCost)
}

fn with_price_bump(net: &ExactNetwork, station: usize, interval: usize, bump: i64) -> ExactNetwork {
    let mut raw = net.to_raw();
    raw.stations[station].prices[interval] += r(bump);
    ExactNetwork::from_raw(raw).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn routes_follow_the_charge_pattern(seed in any::<u64>()) {
        let net = random_instance(seed, Shape::default());
        let aug = Augmentation::build(&net);
        if let Ok(route) = route_single(&net, &aug, 0) {
            prop_assert!(route.strategy.check(&net).is_ok());
            prop_assert_eq!(route.strategy.cost(&net).unwrap().total, route.cost.clone());
            check_charge_pattern(&net, &aug, &route);
        }
    }

    #[test]
    fn raising_a_price_never_lowers_the_cost(seed in any::<u64>(), pick in any::<prop::sample::Index>(), bump in 1i64..5) {
        let net = random_instance(seed, Shape::default());
        let (station, interval) = {
            let i = pick.index(net.stations().len() * net.curve().intervals());
            (i / net.curve().intervals(), i % net.curve().intervals())
        };
        let before = route_single(&net, &Augmentation::build(&net), 0).ok().map(|r| r.cost);
        let bumped = with_price_bump(&net, station, interval, bump);
        let after = route_single(&bumped, &Augmentation::build(&bumped), 0).ok().map(|r| r.cost);
        match (before, after) {
            (Some(b), Some(a)) => prop_assert!(a >= b),
            (None, None) => {}
            (b, a) => prop_assert!(false, "feasibility changed: {:?} -> {:?}", b, a),
        }
    }

    #[test]
    fn exact_value_function_is_monotone_in_battery(seed in any::<u64>()) {
        let net = random_instance(seed, Shape::default());
        let table = lattice_cost_to_go(&net, 0, &zero_dual_costs(&net)).unwrap();
        for row in &table.values {
            for w in row.windows(2) {
                match (&w[0], &w[1]) {
                    (Some(lo), Some(hi)) => prop_assert!(hi <= lo),
                    (Some(_), None) => prop_assert!(false, "more battery lost reachability"),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn router_labels_bound_the_value_function(seed in any::<u64>()) {
        let net = random_instance(seed, Shape::default());
        let aug = Augmentation::build(&net);
        let graph = SingleEvGraph::build(&aug);
        let table = lattice_cost_to_go(&net, 0, &zero_dual_costs(&net)).unwrap();
        let to_go = graph.cost_to_go(0);
        for (n, label) in to_go.iter().enumerate() {
            let (Some((copy, level)), Some(label)) = (graph.level(n), label) else { continue };
            let (station, _) = aug.aux.copy(copy);
            let b = (level.clone() / table.step.clone()).to_integer();
            let b: usize = b.try_into().unwrap();
            let exact = table.values[net.station(station).node.0][b].clone().expect("router states reach the target");
            prop_assert!(&exact <= label);
        }
        let origin = net.od_pairs()[0].origin.0;
        let top = table.values[origin].len() - 1;
        match route_single(&net, &aug, 0) {
            Ok(route) => prop_assert_eq!(Some(route.cost), table.values[origin][top].clone()),
            Err(RouteError::Infeasible(_)) => prop_assert_eq!(None, table.values[origin][top].clone()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn pricing_with_zero_duals_is_the_single_ev_optimum(seed in any::<u64>()) {
        let net = random_instance(seed, Shape::default());
        let aug = Augmentation::build(&net);
        let priced = pricing_oracle(&net, 0, &zero_dual_costs(&net)).unwrap().map(|p| p.value);
        prop_assert_eq!(route_single(&net, &aug, 0).ok().map(|r| r.cost), priced);
    }

    #[test]
    fn float_mode_agrees(seed in any::<u64>()) {
        let net = random_instance(seed, Shape::default());
        let exact = route_single(&net, &Augmentation::build(&net), 0).ok().map(|r| r.cost.to_f64_lossy());
        let text = serde_json::to_vec(&network_to_json(&net.to_raw())).unwrap();
        let float: FloatNetwork = load_network(&text).unwrap();
        let approx = route_single(&float, &Augmentation::build(&float), 0).ok().map(|r| r.cost);
        match (exact, approx) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0)),
            (a, b) => prop_assert_eq!(a.is_none(), b.is_none()),
        }
    }
}

#[test]
fn fine_grid_finds_nothing_cheaper() {
    let shape = Shape { max_stations: 3, max_value: 8, ..Shape::default() };
    for seed in 0..40 {
        let net = random_instance(seed, shape);
        let coarse = enumerate_strategies(&net, 0, &OracleCaps::default()).unwrap();
        let fine = enumerate_strategies(&net, 0, &OracleCaps { grid: Some(r(1)), ..OracleCaps::default() }).unwrap();
        let coarse_best = brute_single_opt(&net, &coarse).map(|(_, c)| c);
        let fine_best = brute_single_opt(&net, &fine).map(|(_, c)| c);
        assert_eq!(coarse_best, fine_best, "seed {seed}");
    }
}

#[test]
fn example_tie_and_breakdown() {
    let net = example1();
    let aug = Augmentation::build(&net);
    let route = route_single(&net, &aug, 0).unwrap();
    assert_eq!(route.strategy.path_labels(&net), vec!["s", "i2", "t"]);
    assert_eq!(route.breakdown.drive_time, r(10));
    assert_eq!(route.breakdown.charge_time, q(1, 2));
    assert_eq!(route.legs.len(), 1);
    assert_eq!((route.legs[0].arrive.clone(), route.legs[0].depart.clone()), (r(5), r(6)));
}

#[test]
fn no_charging_needed() {
    let mut raw = common::example1_raw();
    raw.edge("s", "t", r(9), r(12));
    let net = ExactNetwork::from_raw(raw).unwrap();
    // the battery-shortest trip is slower than s-i1-t, so routing refuses
    assert!(matches!(route_single(&net, &Augmentation::build(&net), 0), Err(RouteError::AssumptionViolated(_))));
    let mut raw = common::example1_raw();
    raw.edge("s", "t", r(9), r(7));
    let net = ExactNetwork::from_raw(raw).unwrap();
    let route = route_single(&net, &Augmentation::build(&net), 0).unwrap();
    assert_eq!(route.cost, r(7));
    assert!(route.legs.is_empty());
    assert!(route.strategy.charges.iter().all(|c| c == &r(0)));
}
