//! Cheapest single-vehicle charging strategy.
//!
//! States are `(copy, arrival level)`. Leaving a copy either tops up just
//! enough to reach the floor of a cheaper next copy, or fills the copy to its
//! ceiling. Any optimal strategy can be put in this form, so a shortest path
//! over the states is optimal.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::augment::{Augmentation, AuxNode};
use crate::closure::{check_assumption1, AssumptionCheck, Violation};
use crate::network::{ChargingNetwork, StationId};
use crate::scalar::{max_of, Ordered, Scalar};
use crate::strategy::{ChargingStrategy, CostBreakdown};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RouterNode {
    Arrive { copy: usize, level: usize },
    Origin(usize),
    Destination(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouterEdge<T> {
    pub tail: usize,
    pub head: usize,
    pub cost: T,
    /// Copy left and the level it is left at (absent for the origin).
    pub depart: Option<(usize, T)>,
}

/// State graph of one vehicle.
#[derive(Debug, Clone)]
pub struct SingleEvGraph<T> {
    nodes: Vec<RouterNode>,
    levels: Vec<Vec<T>>,
    edges: Vec<RouterEdge<T>>,
    out: Vec<Vec<usize>>,
    into: Vec<Vec<usize>>,
    origins: Vec<usize>,
    destinations: Vec<usize>,
}

/// Stay at a copy: charge from `arrive` up to `depart` at `unit` per unit.
fn charge_cost<T: Scalar>(unit: Option<&T>, arrive: &T, depart: &T) -> Option<T> {
    if depart.approx_eq(arrive) {
        return Some(T::zero());
    }
    unit.map(|c| c.clone() * (depart.clone() - arrive.clone()))
}

fn cheaper<T: Scalar>(next: Option<&T>, here: Option<&T>) -> bool {
    match (next, here) {
        (Some(a), Some(b)) => a.definitely_lt(b),
        (Some(_), None) => true,
        _ => false,
    }
}

impl<T: Scalar> SingleEvGraph<T> {
    pub fn build(aug: &Augmentation<T>) -> Self {
        let aux = &aug.aux;
        let od_count = aug.graph.od_count();
        let levels = aug.sets.arrive.clone();
        let mut nodes = Vec::new();
        let mut index: Vec<Vec<usize>> = Vec::new();
        for (c, lv) in levels.iter().enumerate() {
            index.push((0..lv.len()).map(|l| {
                nodes.push(RouterNode::Arrive { copy: c, level: l });
                nodes.len() - 1
            }).collect());
        }
        let mut origins = Vec::new();
        let mut destinations = Vec::new();
        for k in 0..od_count {
            nodes.push(RouterNode::Origin(k));
            origins.push(nodes.len() - 1);
            nodes.push(RouterNode::Destination(k));
            destinations.push(nodes.len() - 1);
        }
        let find = |c: usize, b: &T| levels[c].iter().position(|v| v.approx_eq(b)).map(|l| index[c][l]);

        let mut edges = Vec::new();
        for e in aux.edges() {
            match (e.from, e.to) {
                (AuxNode::Origin(k), AuxNode::Copy(c)) => {
                    if let Some(head) = find(c, &(aux.battery().clone() - e.d.clone())) {
                        edges.push(RouterEdge { tail: origins[k], head, cost: e.ell.clone(), depart: None });
                    }
                }
                (AuxNode::Copy(c), to) => {
                    let (lo, hi, unit) = (aux.lower(c), aux.upper(c), aux.unit_cost(c));
                    for (l, b) in levels[c].iter().enumerate() {
                        let tail = index[c][l];
                        let (depart, head) = match to {
                            AuxNode::Copy(c2) if cheaper(aux.unit_cost(c2), unit) => {
                                (aux.lower(c2).clone() + e.d.clone(), find(c2, aux.lower(c2)))
                            }
                            AuxNode::Copy(c2) => {
                                let arrive = hi.clone() - e.d.clone();
                                let ok = aux.lower(c2).approx_le(&arrive) && arrive.approx_le(aux.upper(c2));
                                (hi.clone(), if ok { find(c2, &arrive) } else { None })
                            }
                            AuxNode::Destination(k) => (max_of(b.clone(), e.d.clone()), Some(destinations[k])),
                            AuxNode::Origin(_) => unreachable!("origins have no incoming edges"),
                        };
                        let Some(head) = head else { continue };
                        if depart.definitely_lt(b) || hi.definitely_lt(&depart) || depart.definitely_lt(lo) {
                            continue;
                        }
                        let Some(charge) = charge_cost(unit, b, &depart) else { continue };
                        edges.push(RouterEdge { tail, head, cost: charge + e.ell.clone(), depart: Some((c, depart)) });
                    }
                }
                _ => {}
            }
        }
        for k in 0..od_count {
            if let Some(direct) = aux.direct(k).filter(|len| len.d.approx_le(aux.battery())) {
                edges.push(RouterEdge { tail: origins[k], head: destinations[k], cost: direct.ell.clone(), depart: None });
            }
        }
        let mut out = vec![Vec::new(); nodes.len()];
        let mut into = vec![Vec::new(); nodes.len()];
        for (id, e) in edges.iter().enumerate() {
            out[e.tail].push(id);
            into[e.head].push(id);
        }
        SingleEvGraph { nodes, levels, edges, out, into, origins, destinations }
    }

    pub fn nodes(&self) -> &[RouterNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RouterEdge<T>] {
        &self.edges
    }

    /// Battery level of a copy state.
    pub fn level(&self, node: usize) -> Option<(usize, &T)> {
        match self.nodes[node] {
            RouterNode::Arrive { copy, level } => Some((copy, &self.levels[copy][level])),
            _ => None,
        }
    }

    /// Dijkstra from the origin of `od`: cost and predecessor edge per node.
    /// Equal costs keep the predecessor found from the lower node index.
    pub fn forward(&self, od: usize) -> (Vec<Option<T>>, Vec<Option<usize>>) {
        self.dijkstra(self.origins[od], &self.out, |e| e.head)
    }

    /// Cheapest completion from every state to the destination of `od`.
    pub fn cost_to_go(&self, od: usize) -> Vec<Option<T>> {
        self.dijkstra(self.destinations[od], &self.into, |e| e.tail).0
    }

    fn dijkstra(&self, start: usize, adjacency: &[Vec<usize>], next: impl Fn(&RouterEdge<T>) -> usize) -> (Vec<Option<T>>, Vec<Option<usize>>) {
        let n = self.nodes.len();
        let mut dist: Vec<Option<T>> = vec![None; n];
        let mut pred = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[start] = Some(T::zero());
        heap.push(Reverse((Ordered(T::zero()), start)));
        while let Some(Reverse((_, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            let here = dist[u].clone().expect("queued");
            for &e in &adjacency[u] {
                let v = next(&self.edges[e]);
                if done[v] {
                    continue;
                }
                let cand = here.clone() + self.edges[e].cost.clone();
                let better = match &dist[v] {
                    None => true,
                    Some(old) => cand.definitely_lt(old),
                };
                if better {
                    heap.push(Reverse((Ordered(cand.clone()), v)));
                    dist[v] = Some(cand);
                    pred[v] = Some(e);
                }
            }
        }
        (dist, pred)
    }
}

/// One visited copy.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg<T> {
    pub station: StationId,
    pub interval: usize,
    pub arrive: T,
    pub depart: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route<T> {
    pub od: usize,
    pub cost: T,
    pub legs: Vec<Leg<T>>,
    pub strategy: ChargingStrategy<T>,
    pub breakdown: CostBreakdown<T>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RouteError<T: Scalar> {
    #[error("no OD pair with index {0}")]
    UnknownOd(usize),
    #[error("battery-shortest and time-shortest paths differ between {} and {}", .0.from.0, .0.to.0)]
    AssumptionViolated(Violation<T>),
    #[error("no feasible charging strategy for OD pair {0}")]
    Infeasible(usize),
}

/// Cheapest strategy for OD pair `od` without checking the metric assumption.
pub fn route_unchecked<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, graph: &SingleEvGraph<T>, od: usize) -> Result<Route<T>, RouteError<T>> {
    if od >= net.od_pairs().len() {
        return Err(RouteError::UnknownOd(od));
    }
    let (dist, pred) = graph.forward(od);
    let target = graph.destinations[od];
    let cost = dist[target].clone().ok_or(RouteError::Infeasible(od))?;
    let mut hops = Vec::new();
    let mut at = target;
    while let Some(e) = pred[at] {
        hops.push(e);
        at = graph.edges[e].tail;
    }
    hops.reverse();

    let mut legs = Vec::new();
    let mut stops = Vec::new();
    for &e in &hops {
        let edge = &graph.edges[e];
        let Some((copy, depart)) = &edge.depart else { continue };
        let (_, arrive) = graph.level(edge.tail).expect("departures leave copy states");
        let (station, interval) = aug.aux.copy(*copy);
        stops.push((net.station(station).node, depart.clone() - arrive.clone()));
        legs.push(Leg { station, interval, arrive: arrive.clone(), depart: depart.clone() });
    }
    let strategy = ChargingStrategy::through_stops(net, &aug.closure, od, &stops).ok_or(RouteError::Infeasible(od))?;
    let breakdown = strategy.cost(net).expect("router strategies are feasible");
    Ok(Route { od, cost, legs, strategy, breakdown })
}

/// Cheapest charging strategy for OD pair `od`. Requires battery-shortest
/// paths between terminals to also be time-shortest.
pub fn route_single<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, od: usize) -> Result<Route<T>, RouteError<T>> {
    if let AssumptionCheck::Violated(v) = check_assumption1(net, &aug.closure) {
        return Err(RouteError::AssumptionViolated(v));
    }
    route_unchecked(net, aug, &SingleEvGraph::build(aug), od)
}
