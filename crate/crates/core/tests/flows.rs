mod common;

use common::{example1, has_partition, r, random_instance, Shape};
use evflow::capacitated::{
    partition_instance, pricing_oracle, solve_capacitated, ChargeSurcharge, ColumnGeneration, EdgeSurcharge, PricingCosts,
};
use evflow::oracle::{brute_flow, enumerate_all, BruteFlow, OracleCaps};
use evflow::{solve_maxflow, solve_mincost, verify_flow, Augmentation, ExactNetwork, FlowError, FlowObjective, Rational};
use proptest::prelude::*;

fn same_outcome(got: Result<Rational, FlowError<Rational>>, want: BruteFlow<Rational>) -> Result<(), String> {
    match (got, want) {
        (Ok(a), BruteFlow::Optimal { value, .. }) if a == value => Ok(()),
        (Err(FlowError::Unbounded { .. }), BruteFlow::Unbounded) => Ok(()),
        (Err(FlowError::Infeasible { .. }), BruteFlow::Infeasible) => Ok(()),
        (a, b) => Err(format!("{a:?} vs {b:?}")),
    }
}

fn capped(seed: u64) -> ExactNetwork {
    random_instance(seed, Shape { capacities: true, max_stations: 4, ..Shape::default() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposed_flows_are_feasible(seed in any::<u64>()) {
        let net = random_instance(seed, Shape { aligned: false, ..Shape::default() });
        if let Ok(sol) = solve_maxflow(&net, &Augmentation::build(&net)) {
            let report = verify_flow(&net, &sol.strategies);
            prop_assert!(report.feasible(), "{:?}", report.violations);
            let carried: Rational = sol.strategies.iter().map(|(_, x)| x.clone()).sum();
            prop_assert_eq!(carried, sol.objective);
        }
    }

    #[test]
    fn scaling_chargers_scales_max_flow(seed in any::<u64>(), factor in 2u64..6) {
        let net = random_instance(seed, Shape { aligned: false, ..Shape::default() });
        let base = solve_maxflow(&net, &Augmentation::build(&net)).ok().map(|s| s.objective);
        let scaled = net.scale_chargers(factor);
        let big = solve_maxflow(&scaled, &Augmentation::build(&scaled)).ok().map(|s| s.objective);
        prop_assert_eq!(base.map(|v| v * r(factor as i64)), big);
    }

    #[test]
    fn min_cost_matches_brute_force(seed in any::<u64>()) {
        let net = random_instance(seed, Shape { max_stations: 4, ..Shape::default() });
        let universes = enumerate_all(&net, &OracleCaps::default()).unwrap();
        let got = solve_mincost(&net, &Augmentation::build(&net)).map(|s| s.objective);
        let want = brute_flow(&net, &universes, FlowObjective::MinCost, false);
        prop_assert!(same_outcome(got, want).is_ok());
    }

    #[test]
    fn dropping_capacities_reproduces_the_edge_lp(seed in any::<u64>()) {
        let net = capped(seed).without_capacities();
        let aug = Augmentation::build(&net);
        let cg = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration::default()).map(|s| s.flow.objective);
        let lp = solve_maxflow(&net, &aug).map(|s| s.objective);
        match (cg, lp) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(FlowError::Unbounded { .. }), Err(FlowError::Unbounded { .. })) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
        let cg = solve_capacitated(&net, FlowObjective::MinCost, ColumnGeneration::default()).map(|s| s.flow.objective);
        let lp = solve_mincost(&net, &aug).map(|s| s.objective);
        match (cg, lp) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(FlowError::Unbounded { .. }), Err(FlowError::Unbounded { .. })) => {}
            (Err(FlowError::Infeasible { .. }), Err(FlowError::Infeasible { .. })) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn column_generation_matches_brute_force_with_capacities(seed in any::<u64>()) {
        let net = capped(seed);
        let universes = enumerate_all(&net, &OracleCaps::default()).unwrap();
        for objective in [FlowObjective::MaxFlow, FlowObjective::MinCost] {
            let got = solve_capacitated(&net, objective, ColumnGeneration::default()).map(|s| s.flow.objective);
            let want = brute_flow(&net, &universes, objective, true);
            let verdict = same_outcome(got, want);
            prop_assert!(verdict.is_ok(), "{:?}: {:?}", objective, verdict);
        }
    }

    #[test]
    fn final_duals_certify_optimality(seed in any::<u64>()) {
        let net = capped(seed);
        let Ok(sol) = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration::default()) else { return Ok(()) };
        prop_assert!(sol.history.windows(2).all(|w| w[0] <= w[1]));
        let d = &sol.flow.duals;
        let costs = PricingCosts::from_duals(&net, &d.w, &d.pi, EdgeSurcharge::None, ChargeSurcharge::None);
        if let Some(best) = pricing_oracle(&net, 0, &costs).unwrap() {
            prop_assert!(best.value >= r(1));
        }
        let Ok(sol) = solve_capacitated(&net, FlowObjective::MinCost, ColumnGeneration::default()) else { return Ok(()) };
        prop_assert!(sol.history.windows(2).skip_while(|w| w[1] != sol.history[sol.history.len() - 1] && w[0] < w[1]).count() > 0);
        let d = &sol.flow.duals;
        let costs = PricingCosts::from_duals(&net, &d.w, &d.pi, EdgeSurcharge::TravelTime, ChargeSurcharge::UnitCost);
        let best = pricing_oracle(&net, 0, &costs).unwrap().expect("demand is served, so a strategy exists");
        prop_assert!(best.value >= d.phi[0]);
    }

    #[test]
    fn gadget_flow_two_iff_partition(values in prop::collection::vec(1u64..8, 1..=12)) {
        let mut values = values;
        if values.iter().sum::<u64>() % 2 == 1 {
            values[0] += 1;
        }
        let net: ExactNetwork = partition_instance(&values).unwrap();
        let flow = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration::default()).unwrap().flow.objective;
        prop_assert_eq!(flow == r(2), has_partition(&values));
        prop_assert!(flow <= r(2));
    }
}

#[test]
fn example_flow_shape() {
    let net = example1();
    let sol = solve_maxflow(&net, &Augmentation::build(&net)).unwrap();
    assert_eq!(sol.objective, r(4));
    let report = verify_flow(&net, &sol.strategies);
    assert!(report.feasible());
    assert!(report.stations.iter().all(|u| u.slack() == Some(r(0))));
    let none = net.scale_chargers(0);
    assert_eq!(solve_maxflow(&none, &Augmentation::build(&none)).unwrap().objective, r(0));
}

#[test]
fn epsilon_stops_no_later() {
    let net: ExactNetwork = partition_instance(&[3, 3, 2, 2, 1, 1]).unwrap();
    let exact = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration::default()).unwrap();
    let loose = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration { epsilon: 0.5, ..ColumnGeneration::default() }).unwrap();
    assert!(loose.rounds <= exact.rounds);
    assert!(loose.flow.objective <= exact.flow.objective);
    // the master value is a (1 + eps) approximation
    assert!(loose.flow.objective.clone() * Rational::new(3.into(), 2.into()) >= exact.flow.objective);
}
