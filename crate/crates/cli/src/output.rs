use serde_json::{json, Map, Value};

use evflow::capacitated::CapacitatedSolution;
use evflow::router::Route;
use evflow::{ChargingNetwork, ChargingStrategy, Scalar, Violation};

pub fn num<T: Scalar>(v: &T) -> Value {
    Value::String(v.render())
}

fn nums<T: Scalar>(vs: &[T]) -> Value {
    Value::Array(vs.iter().map(num).collect())
}

pub fn summary<T: Scalar>(net: &ChargingNetwork<T>) -> Value {
    json!({
        "battery": num(net.battery()),
        "edge_capacities": net.has_edge_capacities(),
        "edges": net.edges().len(),
        "intervals": net.curve().intervals(),
        "nodes": net.node_count(),
        "od_pairs": net.od_pairs().len(),
        "stations": net.stations().len(),
        "thresholds": nums(net.curve().thresholds()),
    })
}

pub fn violation<T: Scalar>(net: &ChargingNetwork<T>, v: &Violation<T>) -> Value {
    json!({
        "from": net.label(v.from),
        "to": net.label(v.to),
        "battery_shortest": {"d": num(&v.d_min), "ell": num(&v.ell_along_d_min)},
        "time_shortest": {"d": num(&v.d_along_ell_min), "ell": num(&v.ell_min)},
    })
}

pub fn strategy<T: Scalar>(net: &ChargingNetwork<T>, s: &ChargingStrategy<T>) -> Value {
    let charges: Vec<Value> = s
        .charges_by_node(net)
        .into_iter()
        .map(|(node, amount)| json!({"node": node, "amount": num(&amount)}))
        .collect();
    json!({
        "od": s.od,
        "path": s.path_labels(net),
        "charges": charges,
    })
}

pub fn route<T: Scalar>(net: &ChargingNetwork<T>, r: &Route<T>) -> Value {
    let legs: Vec<Value> = r
        .legs
        .iter()
        .map(|leg| {
            json!({
                "station": net.label(net.station(leg.station).node),
                "interval": leg.interval + 1,
                "arrive": num(&leg.arrive),
                "depart": num(&leg.depart),
            })
        })
        .collect();
    let mut charges: Map<String, Value> = Map::new();
    let mut totals: Vec<(String, T)> = Vec::new();
    for (node, amount) in r.strategy.charges_by_node(net) {
        match totals.iter_mut().find(|(n, _)| *n == node) {
            Some((_, sum)) => *sum = sum.clone() + amount,
            None => totals.push((node, amount)),
        }
    }
    for (node, amount) in totals {
        charges.insert(node, num(&amount));
    }
    json!({
        "od": r.od,
        "path": r.strategy.path_labels(net),
        "charges": charges,
        "legs": legs,
        "cost": num(&r.cost),
        "drive_time": num(&r.breakdown.drive_time),
        "charge_time": num(&r.breakdown.charge_time),
        "money": num(&r.breakdown.money),
    })
}

fn per_station<T: Scalar>(net: &ChargingNetwork<T>, rows: &[Vec<T>]) -> Value {
    let mut map = Map::new();
    for (station, row) in net.stations().iter().zip(rows) {
        map.insert(net.label(station.node).to_string(), nums(row));
    }
    Value::Object(map)
}

pub fn flow<T: Scalar>(net: &ChargingNetwork<T>, sol: &evflow::FlowSolution<T>) -> Value {
    let strategies: Vec<Value> = sol
        .strategies
        .iter()
        .map(|(s, x)| {
            let mut v = strategy(net, s);
            v["flow"] = num(x);
            v
        })
        .collect();
    let mut y = Map::new();
    for (station, v) in net.stations().iter().zip(&sol.duals.y) {
        y.insert(net.label(station.node).to_string(), num(v));
    }
    json!({
        "objective": num(&sol.objective),
        "strategies": strategies,
        "allocation": per_station(net, &sol.allocation),
        "edge_loads": nums(&sol.edge_loads),
        "duals": {
            "pi": per_station(net, &sol.duals.pi),
            "y": Value::Object(y),
            "w": nums(&sol.duals.w),
            "phi": nums(&sol.duals.phi),
        },
        "lp": {"variables": sol.lp_variables, "rows": sol.lp_rows},
    })
}

pub fn capacitated<T: Scalar>(net: &ChargingNetwork<T>, sol: &CapacitatedSolution<T>) -> Value {
    let mut v = flow(net, &sol.flow);
    v["column_generation"] = json!({
        "rounds": sol.rounds,
        "columns": sol.columns,
        "history": nums(&sol.history),
    });
    v
}
