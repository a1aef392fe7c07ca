//! Flow with edge capacities by column generation.
//!
//! The restricted master is the LP over the strategy columns found so far.
//! New columns come from an exact pricing oracle: a label-setting search over
//! `(node, battery)` states on the lattice spanned by all distances and
//! thresholds. Charging one lattice step at a time, with every per-unit cost
//! non-negative, reaches every charge amount a strategy can need, so the
//! search is exact. The search is exponential in the input size only through
//! the lattice size.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::flow::{edge_loads, path_labels, FlowDuals, FlowError, FlowObjective, FlowSolution};
use crate::lp::{solve, LpOutcome, LpProblem, LpSolution, Relation, Sense};
use crate::network::{ChargingNetwork, EdgeId, NodeId, RawNetwork};
use crate::scalar::{rational_gcd, Ordered, Rational, Scalar};
use crate::strategy::ChargingStrategy;

/// Largest number of battery levels the pricing lattice may have.
pub const MAX_LATTICE_LEVELS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSurcharge {
    None,
    /// Add each edge's travel time.
    TravelTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeSurcharge {
    None,
    /// Add the per-unit price only.
    Price,
    /// Add the full per-unit cost: price plus time and occupancy.
    UnitCost,
}

/// Per-edge and per-unit-charge costs seen by the pricing oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingCosts<T> {
    pub edge: Vec<T>,
    /// `[station][interval]`; `None` forbids charging there.
    pub charge: Vec<Vec<Option<T>>>,
}

impl<T: Scalar> PricingCosts<T> {
    /// Dual prices `w` per edge and `pi` per `(station, interval)` plus the
    /// chosen surcharges. Zero-speed intervals are always forbidden.
    pub fn from_duals(net: &ChargingNetwork<T>, w: &[T], pi: &[Vec<T>], edge: EdgeSurcharge, charge: ChargeSurcharge) -> Self {
        let clamp = |v: &T| if v.is_negative() { T::zero() } else { v.clone() };
        let edge_costs = net
            .edges()
            .iter()
            .zip(w)
            .map(|(e, w)| match edge {
                EdgeSurcharge::None => clamp(w),
                EdgeSurcharge::TravelTime => clamp(w) + e.ell.clone(),
            })
            .collect();
        let charge_costs = net
            .stations()
            .iter()
            .zip(pi)
            .map(|(station, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let unit = station.unit_cost(j)?;
                        Some(match charge {
                            ChargeSurcharge::None => clamp(p),
                            ChargeSurcharge::Price => clamp(p) + station.prices[j].clone(),
                            ChargeSurcharge::UnitCost => clamp(p) + unit,
                        })
                    })
                    .collect()
            })
            .collect();
        PricingCosts { edge: edge_costs, charge: charge_costs }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("battery lattice has {0} levels, more than the pricing oracle supports")]
    LatticeTooFine(String),
    #[error("network data is not rational")]
    NotRational,
}

/// Lattice step: the largest value dividing every distance and threshold.
pub fn lattice_step<T: Scalar>(net: &ChargingNetwork<T>) -> Result<Rational, PricingError> {
    let mut step = Rational::from_int(0);
    let values = net.edges().iter().map(|e| &e.d).chain(net.curve().thresholds());
    for v in values {
        step = rational_gcd(&step, &v.to_ratio().ok_or(PricingError::NotRational)?);
    }
    Ok(step)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Priced<T> {
    pub strategy: ChargingStrategy<T>,
    /// Cost of the strategy under the pricing costs.
    pub value: T,
}

/// The battery lattice: levels `0, step, 2 step, ..., L`.
struct Lattice<T> {
    delta: T,
    levels: usize,
    edge_units: Vec<usize>,
    /// Interval of the step `[b, b + delta)`.
    interval: Vec<usize>,
}

impl<T: Scalar> Lattice<T> {
    fn new(net: &ChargingNetwork<T>) -> Result<Self, PricingError> {
        let step = lattice_step(net)?;
        let battery = net.battery().to_ratio().ok_or(PricingError::NotRational)?;
        let levels_big = (&battery / &step).to_integer();
        let levels = levels_big
            .to_usize()
            .filter(|&l| l < MAX_LATTICE_LEVELS)
            .ok_or_else(|| PricingError::LatticeTooFine(levels_big.to_string()))?
            + 1;
        let units = |v: &T| -> usize { (v.to_ratio().expect("rational") / &step).round().to_integer().to_usize().expect("in range") };
        let delta = T::from_ratio(&step);
        let edge_units = net.edges().iter().map(|e| units(&e.d)).collect();
        let interval = (0..levels).map(|b| net.curve().interval_of(&(delta.clone() * T::from_int(b as i64)))).collect();
        Ok(Lattice { delta, levels, edge_units, interval })
    }
}

/// Exact cheapest completion from every `(node, battery)` state to the
/// destination of `od`, battery on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeValues<T> {
    pub step: T,
    /// `values[node][b]` for battery `b * step`; `None` when the
    /// destination cannot be reached.
    pub values: Vec<Vec<Option<T>>>,
}

pub fn lattice_cost_to_go<T: Scalar>(net: &ChargingNetwork<T>, od: usize, costs: &PricingCosts<T>) -> Result<LatticeValues<T>, PricingError> {
    let lat = Lattice::new(net)?;
    let levels = lat.levels;
    let n = net.node_count();
    let mut into: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for (e, edge) in net.edges().iter().enumerate() {
        into[edge.head.0].push(EdgeId(e));
    }
    let mut best: Vec<Option<T>> = vec![None; n * levels];
    let mut done = vec![false; n * levels];
    let mut heap = BinaryHeap::new();
    let target = net.od_pairs()[od].destination;
    for b in 0..levels {
        best[target.0 * levels + b] = Some(T::zero());
        heap.push(Reverse((Ordered(T::zero()), target.0 * levels + b)));
    }
    while let Some(Reverse((Ordered(cost), s))) = heap.pop() {
        if std::mem::replace(&mut done[s], true) {
            continue;
        }
        let (v, b) = (s / levels, s % levels);
        let mut relax = |prev: usize, extra: &T| {
            let cand = cost.clone() + extra.clone();
            if !done[prev] && best[prev].as_ref().is_none_or(|old| cand.definitely_lt(old)) {
                best[prev] = Some(cand.clone());
                heap.push(Reverse((Ordered(cand), prev)));
            }
        };
        for &e in &into[v] {
            let before = b + lat.edge_units[e.0];
            if before < levels {
                relax(net.edge(e).tail.0 * levels + before, &costs.edge[e.0]);
            }
        }
        if let (Some(st), true) = (net.station_at(NodeId(v)), b > 0) {
            if let Some(unit) = &costs.charge[st.0][lat.interval[b - 1]] {
                relax(s - 1, &(unit.clone() * lat.delta.clone()));
            }
        }
    }
    let values = best.chunks(levels).map(|c| c.to_vec()).collect();
    Ok(LatticeValues { step: lat.delta, values })
}

/// Cheapest strategy for OD pair `od` under `costs`, over all walks and
/// charge amounts. `None` when no feasible strategy exists.
pub fn pricing_oracle<T: Scalar>(net: &ChargingNetwork<T>, od: usize, costs: &PricingCosts<T>) -> Result<Option<Priced<T>>, PricingError> {
    let lat = Lattice::new(net)?;
    let (levels, delta, edge_units, interval) = (lat.levels, lat.delta.clone(), &lat.edge_units, &lat.interval);

    let pair = &net.od_pairs()[od];
    let n = net.node_count();
    let state = |v: NodeId, b: usize| v.0 * levels + b;
    let mut best: Vec<Option<T>> = vec![None; n * levels];
    let mut pred: Vec<Option<(usize, Option<EdgeId>)>> = vec![None; n * levels];
    let mut settled_max: Vec<Option<usize>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    let start = state(pair.origin, levels - 1);
    best[start] = Some(T::zero());
    heap.push(Reverse((Ordered(T::zero()), start)));

    let mut found = None;
    while let Some(Reverse((Ordered(cost), s))) = heap.pop() {
        if best[s].as_ref().is_some_and(|b| b.definitely_lt(&cost)) {
            continue;
        }
        let (v, b) = (NodeId(s / levels), s % levels);
        if settled_max[v.0].is_some_and(|m| m >= b) {
            continue;
        }
        settled_max[v.0] = Some(b);
        if v == pair.destination {
            found = Some((s, cost));
            break;
        }
        let mut relax = |next: usize, extra: T, via: Option<EdgeId>, heap: &mut BinaryHeap<_>| {
            let cand = cost.clone() + extra;
            if best[next].as_ref().is_none_or(|old| cand.definitely_lt(old)) {
                best[next] = Some(cand.clone());
                pred[next] = Some((s, via));
                heap.push(Reverse((Ordered(cand), next)));
            }
        };
        for &e in net.out_edges(v) {
            if edge_units[e.0] <= b {
                relax(state(net.edge(e).head, b - edge_units[e.0]), costs.edge[e.0].clone(), Some(e), &mut heap);
            }
        }
        if let Some(st) = net.station_at(v) {
            if b + 1 < levels {
                if let Some(unit) = &costs.charge[st.0][interval[b]] {
                    relax(state(v, b + 1), unit.clone() * delta.clone(), None, &mut heap);
                }
            }
        }
    }
    let Some((end, value)) = found else { return Ok(None) };

    let mut moves = Vec::new();
    let mut at = end;
    while let Some((prev, via)) = pred[at] {
        moves.push(via);
        at = prev;
    }
    moves.reverse();
    let mut strategy = ChargingStrategy { od, nodes: vec![pair.origin], edges: Vec::new(), charges: vec![T::zero()] };
    for via in moves {
        match via {
            Some(e) => {
                strategy.edges.push(e);
                strategy.nodes.push(net.edge(e).head);
                strategy.charges.push(T::zero());
            }
            None => {
                let last = strategy.charges.last_mut().expect("non-empty");
                *last = last.clone() + delta.clone();
            }
        }
    }
    Ok(Some(Priced { strategy, value }))
}

/// A strategy column of the master LP.
#[derive(Debug, Clone, PartialEq)]
struct Column<T> {
    strategy: ChargingStrategy<T>,
    /// Charge per copy, indexed `station * J + interval`.
    load: Vec<T>,
    /// Times each edge is used.
    uses: Vec<(usize, T)>,
    cost: T,
}

impl<T: Scalar> Column<T> {
    fn new(net: &ChargingNetwork<T>, strategy: ChargingStrategy<T>) -> Self {
        let load = strategy.station_loads(net).expect("priced strategies are feasible").into_iter().flatten().collect();
        let mut uses: Vec<(usize, T)> = Vec::new();
        for e in &strategy.edges {
            match uses.iter_mut().find(|(x, _)| *x == e.0) {
                Some((_, c)) => *c = c.clone() + T::one(),
                None => uses.push((e.0, T::one())),
            }
        }
        let cost = strategy.cost(net).expect("feasible").total;
        Column { strategy, load, uses, cost }
    }
}

struct Master<T> {
    lp: LpProblem<T>,
    x: Vec<usize>,
    z: Vec<usize>,
    capacity_rows: Vec<usize>,
    station_rows: Vec<usize>,
    edge_rows: Vec<Option<usize>>,
    demand_rows: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    MaxFlow,
    /// Minimise the demand shortfall.
    Shortfall,
    MinCost,
}

fn build_master<T: Scalar>(net: &ChargingNetwork<T>, columns: &[Column<T>], phase: Phase) -> Master<T> {
    let sense = if phase == Phase::MaxFlow { Sense::Maximize } else { Sense::Minimize };
    let mut lp = LpProblem::new(sense);
    let x: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(m, col)| {
            let cost = match phase {
                Phase::MaxFlow => T::one(),
                Phase::Shortfall => T::zero(),
                Phase::MinCost => col.cost.clone(),
            };
            lp.add_variable(format!("x_{m}"), cost)
        })
        .collect();
    let intervals = net.curve().intervals();
    let mut z = Vec::new();
    for station in net.stations() {
        for j in 0..intervals {
            z.push(lp.add_variable(format!("z_{}_{}", net.label(station.node), j + 1), T::zero()));
        }
    }
    let capacity_rows = (0..z.len())
        .map(|c| {
            let speed = net.stations()[c / intervals].speeds[c % intervals].clone();
            let mut terms: Vec<(usize, T)> = columns.iter().zip(&x).filter(|(col, _)| !col.load[c].is_zero()).map(|(col, &v)| (v, col.load[c].clone())).collect();
            terms.push((z[c], -speed));
            lp.add_constraint(format!("cap_{c}"), terms, Relation::Le, T::zero())
        })
        .collect();
    let station_rows = net
        .stations()
        .iter()
        .enumerate()
        .map(|(s, st)| {
            let terms = (0..intervals).map(|j| (z[s * intervals + j], T::one())).collect();
            lp.add_constraint(format!("chargers_{s}"), terms, Relation::Eq, T::from_int(st.chargers as i64))
        })
        .collect();
    let edge_rows = net
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let u = edge.capacity.clone()?;
            let terms = columns.iter().zip(&x).filter_map(|(col, &v)| col.uses.iter().find(|(x, _)| *x == e).map(|(_, c)| (v, c.clone()))).collect();
            Some(lp.add_constraint(format!("edge_{e}"), terms, Relation::Le, u))
        })
        .collect();
    let mut demand_rows = Vec::new();
    if phase != Phase::MaxFlow {
        for (k, od) in net.od_pairs().iter().enumerate() {
            let mut terms: Vec<(usize, T)> = columns.iter().zip(&x).filter(|(col, _)| col.strategy.od == k).map(|(_, &v)| (v, T::one())).collect();
            if phase == Phase::Shortfall {
                let a = lp.add_variable(format!("short_{k}"), T::one());
                terms.push((a, T::one()));
            }
            demand_rows.push(lp.add_constraint(format!("demand_{k}"), terms, Relation::Ge, od.demand.clone()));
        }
    }
    Master { lp, x, z, capacity_rows, station_rows, edge_rows, demand_rows }
}

/// Duals in the orientation of the dual programs (all of `pi`, `w`, `phi`
/// non-negative at optimality).
fn master_duals<T: Scalar>(net: &ChargingNetwork<T>, master: &Master<T>, sol: &LpSolution<T>, minimise: bool) -> FlowDuals<T> {
    let sign = if minimise { -T::one() } else { T::one() };
    let intervals = net.curve().intervals();
    let pi = (0..net.stations().len())
        .map(|s| (0..intervals).map(|j| sign.clone() * sol.duals[master.capacity_rows[s * intervals + j]].clone()).collect())
        .collect();
    let y = master.station_rows.iter().map(|&r| sign.clone() * sol.duals[r].clone()).collect();
    let w = master.edge_rows.iter().map(|r| r.map_or(T::zero(), |r| sign.clone() * sol.duals[r].clone())).collect();
    let phi = master.demand_rows.iter().map(|&r| sol.duals[r].clone()).collect();
    FlowDuals { pi, y, w, phi }
}

/// Settings for [`solve_capacitated`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnGeneration {
    /// Relative violation tolerated on the best column not added.
    pub epsilon: f64,
    pub max_rounds: usize,
}

impl Default for ColumnGeneration {
    fn default() -> Self {
        ColumnGeneration { epsilon: 0.0, max_rounds: 10_000 }
    }
}

/// Solution plus how it was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitatedSolution<T> {
    pub flow: FlowSolution<T>,
    pub rounds: usize,
    pub columns: usize,
    /// Master objective after each round.
    pub history: Vec<T>,
}

/// An OD pair linked by a path that fits in one battery and uses only
/// uncapacitated edges carries unlimited max flow.
pub fn detect_unbounded_capacitated<T: Scalar>(net: &ChargingNetwork<T>) -> Option<(usize, Vec<EdgeId>)> {
    for (k, od) in net.od_pairs().iter().enumerate() {
        let n = net.node_count();
        let mut dist: Vec<Option<T>> = vec![None; n];
        let mut pred: Vec<Option<EdgeId>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[od.origin.0] = Some(T::zero());
        heap.push(Reverse((Ordered(T::zero()), od.origin.0)));
        while let Some(Reverse((Ordered(d), u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &e in net.out_edges(NodeId(u)) {
                let edge = net.edge(e);
                if edge.capacity.is_some() {
                    continue;
                }
                let cand = d.clone() + edge.d.clone();
                let v = edge.head.0;
                if !done[v] && dist[v].as_ref().is_none_or(|old| cand.definitely_lt(old)) {
                    dist[v] = Some(cand.clone());
                    pred[v] = Some(e);
                    heap.push(Reverse((Ordered(cand), v)));
                }
            }
        }
        if dist[od.destination.0].as_ref().is_some_and(|d| d.approx_le(net.battery())) {
            let mut path = Vec::new();
            let mut at = od.destination;
            while let Some(e) = pred[at.0] {
                path.push(e);
                at = net.edge(e).tail;
            }
            path.reverse();
            return Some((k, path));
        }
    }
    None
}

/// Max flow or min-cost flow honouring edge capacities.
pub fn solve_capacitated<T: Scalar>(net: &ChargingNetwork<T>, objective: FlowObjective, settings: ColumnGeneration) -> Result<CapacitatedSolution<T>, FlowError<T>> {
    if let Some((od, path)) = detect_unbounded_capacitated(net).filter(|_| objective == FlowObjective::MaxFlow) {
        return Err(FlowError::Unbounded { od, path: path_labels(net, od, &path) });
    }
    let eps = T::from_ratio(&Rational::from_float(settings.epsilon).unwrap_or_else(|| Rational::from_int(0)));
    let one_plus = T::one() + eps;
    let mut columns: Vec<Column<T>> = Vec::new();
    let mut history = Vec::new();
    let mut rounds = 0;

    let phases: &[Phase] = match objective {
        FlowObjective::MaxFlow => &[Phase::MaxFlow],
        FlowObjective::MinCost => &[Phase::Shortfall, Phase::MinCost],
    };
    let mut final_state = None;
    for &phase in phases {
        let minimise = phase != Phase::MaxFlow;
        let (edge_extra, charge_extra) = match phase {
            Phase::MinCost => (EdgeSurcharge::TravelTime, ChargeSurcharge::UnitCost),
            _ => (EdgeSurcharge::None, ChargeSurcharge::None),
        };
        loop {
            rounds += 1;
            if rounds > settings.max_rounds {
                return Err(FlowError::IterationLimit);
            }
            let master = build_master(net, &columns, phase);
            let sol = match solve(&master.lp) {
                LpOutcome::Optimal(sol) => sol,
                LpOutcome::IterationLimit => return Err(FlowError::IterationLimit),
                other => unreachable!("master is feasible and bounded: {other:?}"),
            };
            history.push(sol.objective.clone());
            let duals = master_duals(net, &master, &sol, minimise);
            let costs = PricingCosts::from_duals(net, &duals.w, &duals.pi, edge_extra, charge_extra);
            let mut added = false;
            for k in 0..net.od_pairs().len() {
                let threshold = if minimise { duals.phi[k].clone() } else { T::one() };
                let priced = pricing_oracle(net, k, &costs).map_err(|e| FlowError::Pricing(e.to_string()))?;
                let Some(p) = priced else { continue };
                if (one_plus.clone() * p.value.clone()).definitely_lt(&threshold)
                    && !columns.iter().any(|c| c.strategy == p.strategy)
                {
                    columns.push(Column::new(net, p.strategy));
                    added = true;
                }
            }
            if !added {
                final_state = Some((master, sol, duals));
                break;
            }
        }
        if phase == Phase::Shortfall {
            let (_, sol, duals) = final_state.as_ref().expect("set on exit");
            if sol.objective.definitely_lt(&T::zero()) || !sol.objective.is_negligible() {
                let mut farkas = duals.phi.clone();
                farkas.extend(duals.y.iter().cloned());
                return Err(FlowError::Infeasible { farkas });
            }
        }
    }
    let (master, sol, duals) = final_state.expect("at least one phase ran");
    let strategies: Vec<(ChargingStrategy<T>, T)> = columns
        .iter()
        .zip(&master.x)
        .filter(|(_, &v)| !sol.x[v].is_negligible())
        .map(|(col, &v)| (col.strategy.clone(), sol.x[v].clone()))
        .collect();
    let intervals = net.curve().intervals();
    let allocation = (0..net.stations().len()).map(|s| (0..intervals).map(|j| sol.x[master.z[s * intervals + j]].clone()).collect()).collect();
    let loads = edge_loads(net, &strategies);
    let flow = FlowSolution {
        objective: sol.objective,
        strategies,
        allocation,
        augmented_flow: None,
        edge_loads: loads,
        duals,
        lp_variables: master.lp.variables.len(),
        lp_rows: master.lp.constraints.len(),
    };
    Ok(CapacitatedSolution { flow, rounds, columns: columns.len(), history })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GadgetError {
    #[error("at least one value is required")]
    Empty,
    #[error("values sum to {0}, which is odd")]
    OddSum(u64),
}

/// Chain `s = v0, v1, …, vn = t`. Hop `h` has a top arc of battery use
/// `values[h]` and a bottom arc of zero use, each with capacity one. Every
/// inner node is a station that cannot charge; the battery holds half the
/// total. Two units of flow fit iff the values split into equal halves.
pub fn partition_instance<T: Scalar>(values: &[u64]) -> Result<ChargingNetwork<T>, GadgetError> {
    if values.is_empty() {
        return Err(GadgetError::Empty);
    }
    let total: u64 = values.iter().sum();
    if total % 2 == 1 {
        return Err(GadgetError::OddSum(total));
    }
    let half = T::from_int((total / 2) as i64);
    let n = values.len();
    let label = |h: usize| match h {
        0 => "s".to_string(),
        h if h == n => "t".to_string(),
        h => format!("v{h}"),
    };
    let mut raw = RawNetwork::new(half.clone(), vec![T::zero(), half]);
    for h in 0..=n {
        raw.node(&label(h));
    }
    for (h, &z) in values.iter().enumerate() {
        let d = T::from_int(z as i64);
        raw.capped_edge(&label(h), &label(h + 1), d.clone(), d, T::one());
        raw.capped_edge(&label(h), &label(h + 1), T::zero(), T::zero(), T::one());
    }
    for h in 1..n {
        raw.station(&label(h), 1, vec![T::zero()], vec![T::zero()], T::zero());
    }
    raw.od("s", "t", T::zero());
    Ok(ChargingNetwork::from_raw(raw).expect("gadget is well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn example() -> ChargingNetwork<Rational> {
        let mut raw = RawNetwork::new(r(9), vec![r(0), r(5), r(9)]);
        raw.nodes(["s", "i1", "i2", "t"])
            .edge("s", "i1", r(5), r(5))
            .edge("s", "i2", r(4), r(4))
            .edge("i1", "i2", r(6), r(6))
            .edge("i1", "t", r(5), r(5))
            .edge("i2", "t", r(6), r(6))
            .station("i1", 1, vec![r(2), r(1)], vec![r(0), r(0)], r(0))
            .station("i2", 1, vec![r(3), r(2)], vec![r(0), r(0)], r(0))
            .od("s", "t", r(1));
        ChargingNetwork::from_raw(raw).unwrap()
    }

    #[test]
    fn pricing_example() {
        let net = example();
        let big = r(100);
        let pi = vec![vec![big.clone(), big.clone()], vec![big, q(1, 5)]];
        let costs = PricingCosts::from_duals(&net, &vec![r(0); 5], &pi, EdgeSurcharge::None, ChargeSurcharge::None);
        let best = pricing_oracle(&net, 0, &costs).unwrap().unwrap();
        assert_eq!(best.value, q(1, 5));
        assert_eq!(best.strategy.path_labels(&net), vec!["s", "i2", "t"]);
        assert_eq!(best.strategy.charges_by_node(&net), vec![("i2".to_string(), r(1))]);
    }

    #[test]
    fn zero_duals_give_zero() {
        let net = example();
        let costs = PricingCosts::from_duals(&net, &vec![r(0); 5], &[vec![r(0); 2], vec![r(0); 2]], EdgeSurcharge::None, ChargeSurcharge::None);
        assert_eq!(pricing_oracle(&net, 0, &costs).unwrap().unwrap().value, r(0));
    }

    #[test]
    fn single_ev_cost_from_pricing() {
        let net = example();
        let costs = PricingCosts::from_duals(&net, &vec![r(0); 5], &[vec![r(0); 2], vec![r(0); 2]], EdgeSurcharge::TravelTime, ChargeSurcharge::UnitCost);
        assert_eq!(pricing_oracle(&net, 0, &costs).unwrap().unwrap().value, q(21, 2));
    }

    #[test]
    fn uncapacitated_matches_edge_lp() {
        let net = example();
        let sol = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration::default()).unwrap();
        assert_eq!(sol.flow.objective, r(4));
        assert!(sol.history.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn capacitated_min_cost() {
        let net = example().with_demands(&[r(3)]);
        let sol = solve_capacitated(&net, FlowObjective::MinCost, ColumnGeneration::default()).unwrap();
        let edge = solve_capacitated(&net.scale_chargers(1000), FlowObjective::MinCost, ColumnGeneration::default()).unwrap();
        assert_eq!(edge.flow.objective, q(63, 2));
        assert!(sol.flow.objective >= edge.flow.objective);
    }

    #[test]
    fn infeasible_demand() {
        let net = example().with_demands(&[r(5)]);
        assert!(matches!(solve_capacitated(&net, FlowObjective::MinCost, ColumnGeneration::default()), Err(FlowError::Infeasible { .. })));
    }

    #[test]
    fn gadget_shape() {
        let net: ChargingNetwork<Rational> = partition_instance(&[2, 2]).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edges().len(), 4);
        assert_eq!(net.battery(), &r(2));
        assert_eq!(partition_instance::<Rational>(&[1, 2]).unwrap_err(), GadgetError::OddSum(3));
    }

    #[test]
    fn gadget_flows() {
        for (values, expected) in [(vec![1, 1, 1, 1], r(2)), (vec![1, 1, 2], r(2)), (vec![3, 3, 1, 1], r(2))] {
            let net: ChargingNetwork<Rational> = partition_instance(&values).unwrap();
            let sol = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration::default()).unwrap();
            assert_eq!(sol.flow.objective, expected, "{values:?}");
        }
        let net: ChargingNetwork<Rational> = partition_instance(&[1, 1, 1, 9]).unwrap();
        let sol = solve_capacitated(&net, FlowObjective::MaxFlow, ColumnGeneration::default()).unwrap();
        assert!(sol.flow.objective < r(2));
    }
}
