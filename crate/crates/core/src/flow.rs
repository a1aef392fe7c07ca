//! Maximum and minimum-cost EV flow as multicommodity flow over the
//! charge-augmented graph, with station capacity on charging edges.

use thiserror::Error;

use crate::augment::{detect_unbounded, AugNode, Augmentation, EdgeKind};
use crate::closure::{check_assumption1, AssumptionCheck, Violation};
use crate::lp::{solve, LpOutcome, LpProblem, Relation, Sense};
use crate::network::ChargingNetwork;
use crate::scalar::{min_of, Scalar};
use crate::strategy::ChargingStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowObjective {
    MaxFlow,
    /// Meet every OD pair's demand at least cost.
    MinCost,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError<T: Scalar> {
    #[error("OD pair {od} can be served without charging, so the flow is unbounded")]
    Unbounded { od: usize, path: Vec<String> },
    #[error("battery-shortest and time-shortest paths differ between nodes {} and {}", .0.from.0, .0.to.0)]
    AssumptionViolated(Violation<T>),
    #[error("demands cannot be met")]
    Infeasible { farkas: Vec<T> },
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("pricing failed: {0}")]
    Pricing(String),
}

/// Multipliers in the orientation of the dual programs: `pi >= 0` per copy
/// (station capacity), `y` per station (charger count), `w >= 0` per edge
/// (edge capacity) and `phi >= 0` per OD pair (demand).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDuals<T> {
    pub pi: Vec<Vec<T>>,
    pub y: Vec<T>,
    pub w: Vec<T>,
    pub phi: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution<T> {
    pub objective: T,
    /// Strategy and the flow it carries.
    pub strategies: Vec<(ChargingStrategy<T>, T)>,
    /// Chargers given to each interval, `[station][interval]`.
    pub allocation: Vec<Vec<T>>,
    /// Augmented-graph edge flow `[od][edge]`, when solved on that graph.
    pub augmented_flow: Option<Vec<Vec<T>>>,
    /// Flow on each original edge.
    pub edge_loads: Vec<T>,
    pub duals: FlowDuals<T>,
    pub lp_variables: usize,
    pub lp_rows: usize,
}

/// The edge LP plus the index of every variable and row.
#[derive(Debug, Clone)]
pub struct FlowLp<T> {
    pub lp: LpProblem<T>,
    /// `flow[k][e]`: variable of augmented edge `e` for OD pair `k`.
    pub flow: Vec<Vec<Option<usize>>>,
    /// Allocation variable per copy.
    pub allocation: Vec<usize>,
    pub capacity_rows: Vec<usize>,
    pub station_rows: Vec<usize>,
    pub conservation_rows: Vec<Vec<usize>>,
    pub demand_rows: Vec<usize>,
    /// Min-cost only: flow of OD pair `k` on its no-charge trip, when the
    /// battery-shortest path fits in one battery.
    pub direct: Vec<Option<usize>>,
}

/// Builds the edge LP. With `trim`, only edges on some origin-destination
/// path of a commodity get a variable.
pub fn build_flow_lp<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, objective: FlowObjective, trim: bool) -> FlowLp<T> {
    let graph = &aug.graph;
    let sense = match objective {
        FlowObjective::MaxFlow => Sense::Maximize,
        FlowObjective::MinCost => Sense::Minimize,
    };
    let mut lp = LpProblem::new(sense);
    let mut flow = Vec::new();
    for k in 0..graph.od_count() {
        let useful = if trim { graph.useful_edges(k) } else { vec![true; graph.edges().len()] };
        let own = |n: usize| match graph.node(n) {
            AugNode::Origin(o) | AugNode::Destination(o) => *o == k,
            AugNode::Level { .. } => true,
        };
        let vars = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                if !useful[e] || !own(edge.tail) || !own(edge.head) {
                    return None;
                }
                let cost = match objective {
                    FlowObjective::MaxFlow if edge.head == graph.destination(k) => T::one(),
                    FlowObjective::MaxFlow => T::zero(),
                    FlowObjective::MinCost => edge.gamma.clone(),
                };
                Some(lp.add_variable(format!("f_{k}_{e}"), cost))
            })
            .collect::<Vec<_>>();
        flow.push(vars);
    }
    let aux = &aug.aux;
    let allocation: Vec<usize> = (0..aux.copy_count())
        .map(|c| {
            let (s, j) = aux.copy(c);
            lp.add_variable(format!("z_{}_{}", net.label(net.station(s).node), j + 1), T::zero())
        })
        .collect();

    let mut charge_terms: Vec<Vec<(usize, T)>> = vec![Vec::new(); aux.copy_count()];
    for vars in &flow {
        for (e, var) in vars.iter().enumerate() {
            let edge = graph.edge(e);
            if let (Some(var), EdgeKind::Charge, Some(c)) = (var, edge.kind, edge.copy) {
                charge_terms[c].push((*var, edge.lambda.clone()));
            }
        }
    }
    let capacity_rows = (0..aux.copy_count())
        .map(|c| {
            let (s, j) = aux.copy(c);
            let mut terms = std::mem::take(&mut charge_terms[c]);
            terms.push((allocation[c], -net.station(s).speeds[j].clone()));
            lp.add_constraint(format!("cap_{c}"), terms, Relation::Le, T::zero())
        })
        .collect();
    let station_rows = net
        .stations()
        .iter()
        .enumerate()
        .map(|(s, station)| {
            let terms = (0..aux.intervals()).map(|j| (allocation[s * aux.intervals() + j], T::one())).collect();
            lp.add_constraint(format!("chargers_{s}"), terms, Relation::Eq, T::from_int(station.chargers as i64))
        })
        .collect();

    let mut conservation_rows = Vec::new();
    for (k, vars) in flow.iter().enumerate() {
        let mut rows = Vec::new();
        for v in 0..graph.nodes().len() {
            if !matches!(graph.node(v), AugNode::Level { .. }) {
                continue;
            }
            let mut terms = Vec::new();
            for &e in graph.out_edges(v) {
                if let Some(var) = vars[e] {
                    terms.push((var, T::one()));
                }
            }
            for &e in graph.in_edges(v) {
                if let Some(var) = vars[e] {
                    terms.push((var, -T::one()));
                }
            }
            if terms.is_empty() && trim {
                continue;
            }
            rows.push(lp.add_constraint(format!("flow_{k}_{v}"), terms, Relation::Eq, T::zero()));
        }
        conservation_rows.push(rows);
    }
    let mut demand_rows = Vec::new();
    let mut direct = vec![None; graph.od_count()];
    if objective == FlowObjective::MinCost {
        for (k, vars) in flow.iter().enumerate() {
            let mut terms: Vec<(usize, T)> = graph.in_edges(graph.destination(k)).iter().filter_map(|&e| vars[e].map(|v| (v, T::one()))).collect();
            if let Some(trip) = aux.direct(k).filter(|len| len.d.approx_le(aux.battery())) {
                let var = lp.add_variable(format!("direct_{k}"), trip.ell.clone());
                terms.push((var, T::one()));
                direct[k] = Some(var);
            }
            demand_rows.push(lp.add_constraint(format!("demand_{k}"), terms, Relation::Ge, net.od_pairs()[k].demand.clone()));
        }
    }
    FlowLp { lp, flow, allocation, capacity_rows, station_rows, conservation_rows, demand_rows, direct }
}

/// Max flow: refuses OD pairs that need no charging. Min-cost: refuses
/// networks whose battery-shortest and time-shortest paths differ.
pub fn check_solvable<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, objective: FlowObjective) -> Result<(), FlowError<T>> {
    match objective {
        FlowObjective::MaxFlow => {
            if let Some(u) = detect_unbounded(net, &aug.closure) {
                return Err(FlowError::Unbounded { od: u.od, path: path_labels(net, u.od, &u.path) });
            }
        }
        FlowObjective::MinCost => {
            if let AssumptionCheck::Violated(v) = check_assumption1(net, &aug.closure) {
                return Err(FlowError::AssumptionViolated(v));
            }
        }
    }
    Ok(())
}

pub(crate) fn path_labels<T: Scalar>(net: &ChargingNetwork<T>, od: usize, path: &[crate::network::EdgeId]) -> Vec<String> {
    let mut labels = vec![net.label(net.od_pairs()[od].origin).to_string()];
    labels.extend(path.iter().map(|&e| net.label(net.edge(e).head).to_string()));
    labels
}

/// Solves the edge LP and decomposes the optimal flow into strategies.
pub fn solve_flow<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, objective: FlowObjective) -> Result<FlowSolution<T>, FlowError<T>> {
    check_solvable(net, aug, objective)?;
    let built = build_flow_lp(net, aug, objective, true);
    let sol = match solve(&built.lp) {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible { farkas, .. } => return Err(FlowError::Infeasible { farkas }),
        LpOutcome::IterationLimit => return Err(FlowError::IterationLimit),
        LpOutcome::Unbounded { .. } => unreachable!("bounded OD pairs give a bounded flow"),
    };
    let value = |v: Option<usize>| v.map_or(T::zero(), |v| sol.x[v].clone());
    let edge_flow: Vec<Vec<T>> = built.flow.iter().map(|vars| vars.iter().map(|&v| value(v)).collect()).collect();
    let mut strategies = Vec::new();
    for (k, f) in edge_flow.iter().enumerate() {
        for (path, amount) in decompose_commodity(aug, k, f) {
            strategies.push((strategy_from_augmented_path(net, aug, k, &path), amount));
        }
        if let Some(v) = built.direct[k].filter(|&v| !sol.x[v].is_negligible()) {
            let od = &net.od_pairs()[k];
            let edges = aug.closure.battery_path(net, od.origin, od.destination).expect("direct trip exists");
            strategies.push((ChargingStrategy::uncharged(net, k, edges), sol.x[v].clone()));
        }
    }
    let intervals = aug.aux.intervals();
    let allocation = net
        .stations()
        .iter()
        .enumerate()
        .map(|(s, _)| (0..intervals).map(|j| sol.x[built.allocation[s * intervals + j]].clone()).collect())
        .collect();
    let sign = if objective == FlowObjective::MinCost { -T::one() } else { T::one() };
    let pi = (0..net.stations().len())
        .map(|s| (0..intervals).map(|j| sign.clone() * sol.duals[built.capacity_rows[s * intervals + j]].clone()).collect())
        .collect();
    let y = built.station_rows.iter().map(|&r| sign.clone() * sol.duals[r].clone()).collect();
    let phi = built.demand_rows.iter().map(|&r| sol.duals[r].clone()).collect();
    let edge_loads = edge_loads(net, &strategies);
    Ok(FlowSolution {
        objective: sol.objective,
        strategies,
        allocation,
        augmented_flow: Some(edge_flow),
        edge_loads,
        duals: FlowDuals { pi, y, w: vec![T::zero(); net.edges().len()], phi },
        lp_variables: built.lp.variables.len(),
        lp_rows: built.lp.constraints.len(),
    })
}

pub fn solve_maxflow<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>) -> Result<FlowSolution<T>, FlowError<T>> {
    solve_flow(net, aug, FlowObjective::MaxFlow)
}

pub fn solve_mincost<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>) -> Result<FlowSolution<T>, FlowError<T>> {
    solve_flow(net, aug, FlowObjective::MinCost)
}

/// Splits one commodity's edge flow into origin-destination paths (lists of
/// augmented edges) with their amounts. Flow around cycles is dropped.
/// Paths are found by depth-first search taking the lowest edge id first.
pub fn decompose_commodity<T: Scalar>(aug: &Augmentation<T>, od: usize, flow: &[T]) -> Vec<(Vec<usize>, T)> {
    let graph = &aug.graph;
    let mut rest: Vec<T> = flow.to_vec();
    let (origin, target) = (graph.origin(od), graph.destination(od));
    let positive = |rest: &[T], e: usize| !rest[e].is_negligible() && rest[e] > T::zero();
    let mut paths = Vec::new();
    while graph.out_edges(origin).iter().any(|&e| positive(&rest, e)) {
        let mut on_path = vec![None; graph.nodes().len()];
        let mut edges: Vec<usize> = Vec::new();
        let mut at = origin;
        on_path[origin] = Some(0);
        while at != target {
            // A dead end only arises from float round-off; stop there.
            let Some(e) = graph.out_edges(at).iter().copied().find(|&e| positive(&rest, e)) else {
                return paths;
            };
            let head = graph.edge(e).head;
            match on_path[head] {
                Some(start) => {
                    // Cancel the cycle and resume from where it closed.
                    let cycle: Vec<usize> = edges[start..].iter().copied().chain(std::iter::once(e)).collect();
                    let amount = cycle.iter().map(|&c| rest[c].clone()).reduce(min_of).expect("non-empty");
                    for &c in &cycle {
                        rest[c] = rest[c].clone() - amount.clone();
                    }
                    for &c in &edges[start..] {
                        on_path[graph.edge(c).head] = None;
                    }
                    edges.truncate(start);
                }
                None => {
                    edges.push(e);
                    on_path[head] = Some(edges.len());
                }
            }
            at = head;
        }
        let amount = edges.iter().map(|&c| rest[c].clone()).reduce(min_of).expect("non-empty");
        for &c in &edges {
            rest[c] = rest[c].clone() - amount.clone();
        }
        paths.push((edges, amount));
    }
    paths
}

/// Maps an origin-destination path of the augmented graph to a strategy in
/// the original network.
pub fn strategy_from_augmented_path<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, od: usize, path: &[usize]) -> ChargingStrategy<T> {
    let graph = &aug.graph;
    let mut stops: Vec<(crate::network::NodeId, T)> = Vec::new();
    for &e in path {
        let edge = graph.edge(e);
        match edge.kind {
            EdgeKind::Travel => {
                if let AugNode::Level { copy, .. } = graph.node(edge.head) {
                    let node = net.station(aug.aux.copy(*copy).0).node;
                    stops.push((node, T::zero()));
                }
            }
            EdgeKind::Charge => {
                let last = stops.last_mut().expect("charging follows an arrival");
                last.1 = last.1.clone() + edge.lambda.clone();
            }
            EdgeKind::Chain => {}
        }
    }
    ChargingStrategy::through_stops(net, &aug.closure, od, &stops).expect("augmented paths follow reachable terminals")
}

/// Flow on each original edge induced by strategy flows.
pub fn edge_loads<T: Scalar>(net: &ChargingNetwork<T>, strategies: &[(ChargingStrategy<T>, T)]) -> Vec<T> {
    let mut loads = vec![T::zero(); net.edges().len()];
    for (strategy, x) in strategies {
        for &e in &strategy.edges {
            loads[e.0] = loads[e.0].clone() + x.clone();
        }
    }
    loads
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationUsage<T> {
    pub station: String,
    /// Charge delivered per interval.
    pub load: Vec<T>,
    /// Charger time needed, `sum_j load_j / r_j`; `None` when charge is
    /// taken in a zero-speed interval.
    pub required: Option<T>,
    pub chargers: T,
}

impl<T: Scalar> StationUsage<T> {
    pub fn slack(&self) -> Option<T> {
        self.required.clone().map(|r| self.chargers.clone() - r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowViolation<T> {
    Station { station: String, interval: Option<usize>, excess: Option<T> },
    Edge { edge: usize, tail: String, head: String, excess: T },
    Strategy { index: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport<T> {
    pub stations: Vec<StationUsage<T>>,
    pub violations: Vec<FlowViolation<T>>,
}

impl<T> FlowReport<T> {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that some charger allocation supports the strategy flows. The
/// allocation splits per station: it exists iff the charger time needed
/// over all intervals fits in the station's chargers. Edge capacities are
/// checked as well.
pub fn verify_flow<T: Scalar>(net: &ChargingNetwork<T>, strategies: &[(ChargingStrategy<T>, T)]) -> FlowReport<T> {
    let intervals = net.curve().intervals();
    let mut load = vec![vec![T::zero(); intervals]; net.stations().len()];
    let mut violations = Vec::new();
    for (index, (strategy, x)) in strategies.iter().enumerate() {
        if x.definitely_lt(&T::zero()) {
            violations.push(FlowViolation::Strategy { index, reason: "negative flow".into() });
            continue;
        }
        match strategy.station_loads(net) {
            Ok(per) => {
                for (s, row) in per.into_iter().enumerate() {
                    for (j, q) in row.into_iter().enumerate() {
                        load[s][j] = load[s][j].clone() + q * x.clone();
                    }
                }
            }
            Err(err) => violations.push(FlowViolation::Strategy { index, reason: err.to_string() }),
        }
    }
    let mut stations = Vec::new();
    for (s, station) in net.stations().iter().enumerate() {
        let label = net.label(station.node).to_string();
        let chargers = T::from_int(station.chargers as i64);
        let mut required = Some(T::zero());
        for j in 0..intervals {
            if load[s][j].is_negligible() {
                continue;
            }
            if station.speeds[j].is_negligible() {
                required = None;
                violations.push(FlowViolation::Station { station: label.clone(), interval: Some(j + 1), excess: None });
            } else if let Some(r) = required.as_mut() {
                *r = r.clone() + load[s][j].clone() / station.speeds[j].clone();
            }
        }
        if let Some(r) = &required {
            if chargers.definitely_lt(r) {
                violations.push(FlowViolation::Station { station: label.clone(), interval: None, excess: Some(r.clone() - chargers.clone()) });
            }
        }
        stations.push(StationUsage { station: label, load: load[s].clone(), required, chargers });
    }
    for (e, flow) in edge_loads(net, strategies).into_iter().enumerate() {
        let edge = &net.edges()[e];
        if let Some(u) = &edge.capacity {
            if u.definitely_lt(&flow) {
                violations.push(FlowViolation::Edge {
                    edge: e,
                    tail: net.label(edge.tail).to_string(),
                    head: net.label(edge.head).to_string(),
                    excess: flow - u.clone(),
                });
            }
        }
    }
    FlowReport { stations, violations }
}
