//! Brute-force references for cross-checking the optimised solvers.
//!
//! Everything here enumerates: simple paths, then every charge profile built
//! from a finite set of candidate departure levels. Only good for small
//! instances, and every enumeration is capped.

use thiserror::Error;

use crate::flow::FlowObjective;
use crate::lp::{solve, LpOutcome, LpProblem, Relation, Sense};
use crate::network::{ChargingNetwork, EdgeId, NodeId};
use crate::scalar::{Rational, Scalar};
use crate::strategy::ChargingStrategy;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCaps {
    pub max_path_edges: usize,
    pub max_paths: usize,
    pub max_strategies: usize,
    /// Enumerate every multiple of this step instead of the candidate levels.
    pub grid: Option<Rational>,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { max_path_edges: 16, max_paths: 2_000, max_strategies: 200_000, grid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("more than {0} simple paths")]
    TooManyPaths(usize),
    #[error("more than {0} strategies")]
    TooManyStrategies(usize),
}

/// Every enumerated strategy of one OD pair, in deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyUniverse<T> {
    pub od: usize,
    pub paths: Vec<Vec<EdgeId>>,
    pub strategies: Vec<ChargingStrategy<T>>,
}

/// Simple origin-destination paths in depth-first order of edge id.
pub fn simple_paths<T: Scalar>(net: &ChargingNetwork<T>, od: usize, caps: &OracleCaps) -> Result<Vec<Vec<EdgeId>>, OracleError> {
    let pair = &net.od_pairs()[od];
    let mut out = Vec::new();
    let mut visited = vec![false; net.node_count()];
    let mut path = Vec::new();
    visited[pair.origin.0] = true;
    walk(net, pair.origin, pair.destination, caps, &mut visited, &mut path, &mut out)?;
    Ok(out)
}

fn walk<T: Scalar>(
    net: &ChargingNetwork<T>,
    at: NodeId,
    target: NodeId,
    caps: &OracleCaps,
    visited: &mut [bool],
    path: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
) -> Result<(), OracleError> {
    if at == target {
        if out.len() == caps.max_paths {
            return Err(OracleError::TooManyPaths(caps.max_paths));
        }
        out.push(path.clone());
        return Ok(());
    }
    if path.len() == caps.max_path_edges {
        return Ok(());
    }
    for &e in net.out_edges(at) {
        let head = net.edge(e).head;
        if visited[head.0] {
            continue;
        }
        visited[head.0] = true;
        path.push(e);
        walk(net, head, target, caps, visited, path, out)?;
        path.pop();
        visited[head.0] = false;
    }
    Ok(())
}

/// Departure levels worth trying at position `p` of a path: every threshold,
/// and every threshold shifted by the distance to a later node, so that the
/// battery meets that threshold on arrival there.
fn candidate_levels<T: Scalar>(net: &ChargingNetwork<T>, edges: &[EdgeId], p: usize) -> Vec<T> {
    let thresholds = net.curve().thresholds();
    let mut out: Vec<T> = thresholds.to_vec();
    let mut ahead = T::zero();
    for e in &edges[p..] {
        ahead = ahead + net.edge(*e).d.clone();
        out.extend(thresholds.iter().map(|t| t.clone() + ahead.clone()));
    }
    out
}

fn profiles<T: Scalar>(net: &ChargingNetwork<T>, od: usize, edges: &[EdgeId], caps: &OracleCaps, out: &mut Vec<ChargingStrategy<T>>) -> Result<(), OracleError> {
    let mut nodes = vec![net.od_pairs()[od].origin];
    nodes.extend(edges.iter().map(|e| net.edge(*e).head));
    let grid = caps.grid.as_ref().map(T::from_ratio);
    let mut charges = Vec::with_capacity(nodes.len());
    extend_profile(net, od, edges, &nodes, grid.as_ref(), net.battery().clone(), &mut charges, caps, out)
}

#[allow(clippy::too_many_arguments)]
fn extend_profile<T: Scalar>(
    net: &ChargingNetwork<T>,
    od: usize,
    edges: &[EdgeId],
    nodes: &[NodeId],
    grid: Option<&T>,
    arrive: T,
    charges: &mut Vec<T>,
    caps: &OracleCaps,
    out: &mut Vec<ChargingStrategy<T>>,
) -> Result<(), OracleError> {
    let p = charges.len();
    if p == nodes.len() {
        let strategy = ChargingStrategy { od, nodes: nodes.to_vec(), edges: edges.to_vec(), charges: charges.clone() };
        if strategy.check(net).is_ok() && !out.contains(&strategy) {
            if out.len() == caps.max_strategies {
                return Err(OracleError::TooManyStrategies(caps.max_strategies));
            }
            out.push(strategy);
        }
        return Ok(());
    }
    let mut departures = vec![arrive.clone()];
    if net.station_at(nodes[p]).is_some() {
        let mut more = match grid {
            Some(step) => {
                let mut levels = Vec::new();
                let mut level = arrive.clone() + step.clone();
                while level.approx_le(net.battery()) {
                    levels.push(level.clone());
                    level = level + step.clone();
                }
                levels
            }
            None => candidate_levels(net, edges, p),
        };
        more.retain(|l| arrive.definitely_lt(l) && l.approx_le(net.battery()));
        more.sort_by(|a, b| a.total_cmp(b));
        more.dedup_by(|a, b| a.approx_eq(b));
        departures.extend(more);
    }
    for depart in departures {
        let next = match edges.get(p) {
            Some(e) => depart.clone() - net.edge(*e).d.clone(),
            None => depart.clone(),
        };
        if next.definitely_lt(&T::zero()) {
            continue;
        }
        charges.push(depart - arrive.clone());
        extend_profile(net, od, edges, nodes, grid, next, charges, caps, out)?;
        charges.pop();
    }
    Ok(())
}

/// All feasible strategies of OD pair `od` within the caps.
pub fn enumerate_strategies<T: Scalar>(net: &ChargingNetwork<T>, od: usize, caps: &OracleCaps) -> Result<StrategyUniverse<T>, OracleError> {
    let paths = simple_paths(net, od, caps)?;
    let mut strategies = Vec::new();
    for path in &paths {
        profiles(net, od, path, caps, &mut strategies)?;
    }
    Ok(StrategyUniverse { od, paths, strategies })
}

/// Cheapest strategy of the universe; the first one wins ties.
pub fn brute_single_opt<T: Scalar>(net: &ChargingNetwork<T>, universe: &StrategyUniverse<T>) -> Option<(ChargingStrategy<T>, T)> {
    let mut best: Option<(ChargingStrategy<T>, T)> = None;
    for s in &universe.strategies {
        let cost = s.cost(net).expect("enumerated strategies are feasible").total;
        if best.as_ref().is_none_or(|(_, b)| cost.definitely_lt(b)) {
            best = Some((s.clone(), cost));
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub enum BruteFlow<T> {
    Optimal { value: T, strategies: Vec<(ChargingStrategy<T>, T)> },
    Infeasible,
    Unbounded,
}

impl<T> BruteFlow<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            BruteFlow::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Optimum of the finite LP over the enumerated strategy columns.
pub fn brute_flow<T: Scalar>(net: &ChargingNetwork<T>, universes: &[StrategyUniverse<T>], objective: FlowObjective, edge_caps: bool) -> BruteFlow<T> {
    let min_cost = objective == FlowObjective::MinCost;
    let mut lp = LpProblem::new(if min_cost { Sense::Minimize } else { Sense::Maximize });
    let columns: Vec<(&ChargingStrategy<T>, usize)> = universes
        .iter()
        .flat_map(|u| &u.strategies)
        .enumerate()
        .map(|(m, s)| {
            let cost = if min_cost { s.cost(net).expect("feasible").total } else { T::one() };
            (s, lp.add_variable(format!("x{m}"), cost))
        })
        .collect();
    let loads: Vec<Vec<Vec<T>>> = columns.iter().map(|(s, _)| s.station_loads(net).expect("feasible")).collect();
    for (i, station) in net.stations().iter().enumerate() {
        let mut z = Vec::new();
        for (j, speed) in station.speeds.iter().enumerate() {
            let zij = lp.add_variable(format!("z{i}_{j}"), T::zero());
            z.push((zij, T::one()));
            let mut terms: Vec<(usize, T)> = columns.iter().zip(&loads).map(|((_, v), l)| (*v, l[i][j].clone())).collect();
            terms.push((zij, -speed.clone()));
            lp.add_constraint(format!("a{i}_{j}"), terms, Relation::Le, T::zero());
        }
        lp.add_constraint(format!("b{i}"), z, Relation::Eq, T::from_int(station.chargers as i64));
    }
    if edge_caps {
        for (e, edge) in net.edges().iter().enumerate() {
            if let Some(u) = &edge.capacity {
                let terms = columns
                    .iter()
                    .map(|(s, v)| (*v, T::from_int(s.edges.iter().filter(|x| x.0 == e).count() as i64)))
                    .collect();
                lp.add_constraint(format!("u{e}"), terms, Relation::Le, u.clone());
            }
        }
    }
    if min_cost {
        for (k, od) in net.od_pairs().iter().enumerate() {
            let terms = columns.iter().filter(|(s, _)| s.od == k).map(|(_, v)| (*v, T::one())).collect();
            lp.add_constraint(format!("d{k}"), terms, Relation::Ge, od.demand.clone());
        }
    }
    match solve(&lp) {
        LpOutcome::Optimal(sol) => BruteFlow::Optimal {
            strategies: columns.iter().filter(|(_, v)| !sol.x[*v].is_negligible()).map(|(s, v)| ((*s).clone(), sol.x[*v].clone())).collect(),
            value: sol.objective,
        },
        LpOutcome::Infeasible { .. } => BruteFlow::Infeasible,
        LpOutcome::Unbounded { .. } => BruteFlow::Unbounded,
        LpOutcome::IterationLimit => panic!("oracle LP hit the iteration limit"),
    }
}

/// Every OD pair's universe.
pub fn enumerate_all<T: Scalar>(net: &ChargingNetwork<T>, caps: &OracleCaps) -> Result<Vec<StrategyUniverse<T>>, OracleError> {
    (0..net.od_pairs().len()).map(|k| enumerate_strategies(net, k, caps)).collect()
}
