//! Station copies, discrete battery levels and the charge-augmented graph.
//!
//! A copy `(i, j)` is station `i` restricted to battery interval `j`. The
//! auxiliary network connects copies (and OD endpoints) that are within one
//! battery of each other; the augmented graph expands every copy into the
//! finitely many battery levels at which an extreme strategy can arrive or
//! leave.

mod render;

use std::collections::VecDeque;

use crate::closure::{MetricClosure, PathLength};
use crate::network::{ChargingNetwork, EdgeId, NodeId, StationId};
use crate::scalar::Scalar;

pub use render::{augmented_dot, augmented_json, auxiliary_dot, auxiliary_json, node_label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AuxNode {
    Copy(usize),
    Origin(usize),
    Destination(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxEdge<T> {
    pub from: AuxNode,
    pub to: AuxNode,
    pub d: T,
    pub ell: T,
}

#[derive(Debug, Clone)]
pub struct AuxiliaryNetwork<T> {
    intervals: usize,
    stations: usize,
    lower: Vec<T>,
    upper: Vec<T>,
    cost: Vec<Option<T>>,
    edges: Vec<AuxEdge<T>>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    direct: Vec<Option<PathLength<T>>>,
    battery: T,
}

impl<T: Scalar> AuxiliaryNetwork<T> {
    pub fn copy_count(&self) -> usize {
        self.stations * self.intervals
    }

    pub fn copy_index(&self, station: StationId, interval: usize) -> usize {
        station.0 * self.intervals + interval
    }

    pub fn copy(&self, copy: usize) -> (StationId, usize) {
        (StationId(copy / self.intervals), copy % self.intervals)
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn battery(&self) -> &T {
        &self.battery
    }

    /// `b̲`: lowest battery level of the copy.
    pub fn lower(&self, copy: usize) -> &T {
        &self.lower[copy]
    }

    /// `b̄`: highest battery level of the copy.
    pub fn upper(&self, copy: usize) -> &T {
        &self.upper[copy]
    }

    /// Unit charging cost, `None` when the interval has zero speed.
    pub fn unit_cost(&self, copy: usize) -> Option<&T> {
        self.cost[copy].as_ref()
    }

    pub fn edges(&self) -> &[AuxEdge<T>] {
        &self.edges
    }

    pub fn edges_into(&self, copy: usize) -> impl Iterator<Item = &AuxEdge<T>> {
        self.incoming[copy].iter().map(|&e| &self.edges[e])
    }

    pub fn edges_out_of(&self, copy: usize) -> impl Iterator<Item = &AuxEdge<T>> {
        self.outgoing[copy].iter().map(|&e| &self.edges[e])
    }

    /// Origin and destination edges of commodity `k` plus copy-to-copy edges.
    pub fn node_count(&self, od_pairs: usize) -> usize {
        self.copy_count() + 2 * od_pairs
    }

    /// Shortest direct origin-destination trip, when one exists.
    pub fn direct(&self, od: usize) -> Option<&PathLength<T>> {
        self.direct[od].as_ref()
    }
}

/// Connects copies of stations within battery range of each other, origins
/// to reachable copies and copies to reachable destinations. Copies of one
/// station are linked with zero-length edges.
pub fn build_auxiliary<T: Scalar>(net: &ChargingNetwork<T>, mc: &MetricClosure<T>) -> AuxiliaryNetwork<T> {
    let curve = net.curve();
    let intervals = curve.intervals();
    let battery = net.battery().clone();
    let stations = net.stations();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut cost = Vec::new();
    for station in stations {
        for j in 0..intervals {
            lower.push(curve.lower(j).clone());
            upper.push(curve.upper(j).clone());
            cost.push(station.unit_cost(j));
        }
    }
    let copy = |s: usize, j: usize| AuxNode::Copy(s * intervals + j);
    let in_range = |from: NodeId, to: NodeId| mc.battery_first(from, to).filter(|len| len.d.approx_le(&battery)).cloned();

    let mut edges = Vec::new();
    for (k, od) in net.od_pairs().iter().enumerate() {
        for (s, station) in stations.iter().enumerate() {
            if let Some(len) = in_range(od.origin, station.node) {
                for j in 0..intervals {
                    edges.push(AuxEdge { from: AuxNode::Origin(k), to: copy(s, j), d: len.d.clone(), ell: len.ell.clone() });
                }
            }
        }
    }
    for (s, from) in stations.iter().enumerate() {
        for (s2, to) in stations.iter().enumerate() {
            let len = if s == s2 {
                Some(PathLength { d: T::zero(), ell: T::zero() })
            } else {
                in_range(from.node, to.node)
            };
            let Some(len) = len else { continue };
            for j in 0..intervals {
                for j2 in 0..intervals {
                    if s == s2 && j == j2 {
                        continue;
                    }
                    edges.push(AuxEdge { from: copy(s, j), to: copy(s2, j2), d: len.d.clone(), ell: len.ell.clone() });
                }
            }
        }
        for (k, od) in net.od_pairs().iter().enumerate() {
            if let Some(len) = in_range(from.node, od.destination) {
                for j in 0..intervals {
                    edges.push(AuxEdge { from: copy(s, j), to: AuxNode::Destination(k), d: len.d.clone(), ell: len.ell.clone() });
                }
            }
        }
    }

    let copies = stations.len() * intervals;
    let mut incoming = vec![Vec::new(); copies];
    let mut outgoing = vec![Vec::new(); copies];
    for (e, edge) in edges.iter().enumerate() {
        if let AuxNode::Copy(c) = edge.to {
            incoming[c].push(e);
        }
        if let AuxNode::Copy(c) = edge.from {
            outgoing[c].push(e);
        }
    }
    let direct = net
        .od_pairs()
        .iter()
        .map(|od| mc.battery_first(od.origin, od.destination).cloned())
        .collect();
    AuxiliaryNetwork { intervals, stations: stations.len(), lower, upper, cost, edges, incoming, outgoing, direct, battery }
}

/// Arrival and departure battery levels of every copy, each sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSets<T> {
    pub arrive: Vec<Vec<T>>,
    pub depart: Vec<Vec<T>>,
}

impl<T: Scalar> LevelSets<T> {
    /// Union of arrival and departure levels of a copy, sorted.
    pub fn levels(&self, copy: usize) -> Vec<T> {
        sorted_unique(self.arrive[copy].iter().chain(&self.depart[copy]).cloned().collect())
    }
}

fn sorted_unique<T: Scalar>(mut values: Vec<T>) -> Vec<T> {
    values.sort_by(|a, b| a.total_cmp(b));
    values.dedup_by(|a, b| a.approx_eq(b));
    values
}

/// Arrivals: the copy's floor, or a full departure from an in-neighbour
/// (the origin counts as departing full). Departures: the copy's ceiling, or
/// just enough to reach the floor of an out-neighbour (a destination's floor
/// is empty).
pub fn compute_level_sets<T: Scalar>(aux: &AuxiliaryNetwork<T>) -> LevelSets<T> {
    let mut arrive = Vec::with_capacity(aux.copy_count());
    let mut depart = Vec::with_capacity(aux.copy_count());
    for c in 0..aux.copy_count() {
        let (lo, hi) = (aux.lower(c), aux.upper(c));
        let inside = |v: &T| lo.approx_le(v) && v.approx_le(hi);
        let mut ins = vec![lo.clone()];
        for edge in aux.edges_into(c) {
            let full = match edge.from {
                AuxNode::Copy(src) => aux.upper(src).clone(),
                _ => aux.battery().clone(),
            };
            ins.push(full - edge.d.clone());
        }
        let mut outs = vec![hi.clone()];
        for edge in aux.edges_out_of(c) {
            let floor = match edge.to {
                AuxNode::Copy(dst) => aux.lower(dst).clone(),
                _ => T::zero(),
            };
            outs.push(floor + edge.d.clone());
        }
        arrive.push(sorted_unique(ins.into_iter().filter(|v| inside(v)).collect()));
        depart.push(sorted_unique(outs.into_iter().filter(|v| inside(v)).collect()));
    }
    LevelSets { arrive, depart }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AugNode<T> {
    Level { copy: usize, level: T },
    /// `(s_k, L)`.
    Origin(usize),
    /// `(t_k, 0)`.
    Destination(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Charging within one copy.
    Charge,
    /// Moving up to the next copy of the same station.
    Chain,
    /// Driving between copies or to/from an OD endpoint.
    Travel,
}

impl EdgeKind {
    pub fn roman(self) -> &'static str {
        match self {
            EdgeKind::Charge => "I",
            EdgeKind::Chain => "II",
            EdgeKind::Travel => "III",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugEdge<T> {
    pub kind: EdgeKind,
    pub tail: usize,
    pub head: usize,
    /// Charge taken (charging edges only).
    pub lambda: T,
    /// Cost of one unit of flow.
    pub gamma: T,
    pub d: T,
    pub ell: T,
    /// Copy whose chargers this edge uses.
    pub copy: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct AugmentedGraph<T> {
    nodes: Vec<AugNode<T>>,
    edges: Vec<AugEdge<T>>,
    out: Vec<Vec<usize>>,
    into: Vec<Vec<usize>>,
    copy_nodes: Vec<Vec<usize>>,
    origins: Vec<usize>,
    destinations: Vec<usize>,
    battery: T,
}

impl<T: Scalar> AugmentedGraph<T> {
    pub fn nodes(&self) -> &[AugNode<T>] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &AugNode<T> {
        &self.nodes[id]
    }

    pub fn edges(&self) -> &[AugEdge<T>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &AugEdge<T> {
        &self.edges[id]
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.into[node]
    }

    pub fn origin(&self, od: usize) -> usize {
        self.origins[od]
    }

    pub fn destination(&self, od: usize) -> usize {
        self.destinations[od]
    }

    pub fn od_count(&self) -> usize {
        self.origins.len()
    }

    /// Node ids of a copy, ascending in battery level.
    pub fn copy_nodes(&self, copy: usize) -> &[usize] {
        &self.copy_nodes[copy]
    }

    /// Battery level carried by a node.
    pub fn level(&self, node: usize) -> T {
        match &self.nodes[node] {
            AugNode::Level { level, .. } => level.clone(),
            AugNode::Origin(_) => self.battery.clone(),
            AugNode::Destination(_) => T::zero(),
        }
    }

    pub fn find(&self, copy: usize, level: &T) -> Option<usize> {
        self.copy_nodes[copy].iter().copied().find(|&n| self.level(n).approx_eq(level))
    }

    /// Edges lying on some origin-destination path of commodity `od`.
    pub fn useful_edges(&self, od: usize) -> Vec<bool> {
        let forward = self.reach(self.origins[od], |n| &self.out[n], |e| e.head);
        let backward = self.reach(self.destinations[od], |n| &self.into[n], |e| e.tail);
        self.edges.iter().map(|e| forward[e.tail] && backward[e.head]).collect()
    }

    pub fn connected(&self, od: usize) -> bool {
        self.reach(self.origins[od], |n| &self.out[n], |e| e.head)[self.destinations[od]]
    }

    fn reach<'a>(&'a self, start: usize, next: impl Fn(usize) -> &'a Vec<usize>, end: impl Fn(&AugEdge<T>) -> usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for &e in next(n) {
                let m = end(&self.edges[e]);
                if !seen[m] {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
        seen
    }
}

/// Builds the charge-augmented graph. Charging edges form a chain over each
/// copy's sorted levels (omitted when the copy has zero speed); travel edges
/// join a departure level to an arrival level exactly one trip apart.
pub fn build_augmented<T: Scalar>(aux: &AuxiliaryNetwork<T>, sets: &LevelSets<T>, od_pairs: usize) -> AugmentedGraph<T> {
    let mut nodes = Vec::new();
    let mut copy_nodes = Vec::with_capacity(aux.copy_count());
    for c in 0..aux.copy_count() {
        let ids: Vec<usize> = sets
            .levels(c)
            .into_iter()
            .map(|level| {
                nodes.push(AugNode::Level { copy: c, level });
                nodes.len() - 1
            })
            .collect();
        copy_nodes.push(ids);
    }
    let mut origins = Vec::new();
    let mut destinations = Vec::new();
    for k in 0..od_pairs {
        nodes.push(AugNode::Origin(k));
        origins.push(nodes.len() - 1);
        nodes.push(AugNode::Destination(k));
        destinations.push(nodes.len() - 1);
    }
    let level = |n: usize| match &nodes[n] {
        AugNode::Level { level, .. } => level.clone(),
        _ => unreachable!("copy nodes carry levels"),
    };
    let find = |c: usize, b: &T| copy_nodes[c].iter().copied().find(|&n: &usize| level(n).approx_eq(b));

    let mut edges = Vec::new();
    for c in 0..aux.copy_count() {
        let Some(unit) = aux.unit_cost(c) else { continue };
        for pair in copy_nodes[c].windows(2) {
            let lambda = level(pair[1]) - level(pair[0]);
            edges.push(AugEdge {
                kind: EdgeKind::Charge,
                tail: pair[0],
                head: pair[1],
                gamma: unit.clone() * lambda.clone(),
                lambda,
                d: T::zero(),
                ell: T::zero(),
                copy: Some(c),
            });
        }
    }
    for c in 0..aux.copy_count() {
        let (station, j) = aux.copy(c);
        if j + 1 < aux.intervals() {
            let next = aux.copy_index(station, j + 1);
            if let (Some(tail), Some(head)) = (find(c, aux.upper(c)), find(next, aux.lower(next))) {
                edges.push(AugEdge {
                    kind: EdgeKind::Chain,
                    tail,
                    head,
                    lambda: T::zero(),
                    gamma: T::zero(),
                    d: T::zero(),
                    ell: T::zero(),
                    copy: None,
                });
            }
        }
    }
    let travel = |tail: usize, head: usize, e: &AuxEdge<T>| AugEdge {
        kind: EdgeKind::Travel,
        tail,
        head,
        lambda: T::zero(),
        gamma: e.ell.clone(),
        d: e.d.clone(),
        ell: e.ell.clone(),
        copy: None,
    };
    for e in aux.edges() {
        match (e.from, e.to) {
            (AuxNode::Copy(a), AuxNode::Copy(b)) => {
                if aux.copy(a).0 == aux.copy(b).0 {
                    continue;
                }
                for out in &sets.depart[a] {
                    for inn in &sets.arrive[b] {
                        if (out.clone() - inn.clone()).approx_eq(&e.d) {
                            edges.push(travel(find(a, out).unwrap(), find(b, inn).unwrap(), e));
                        }
                    }
                }
            }
            (AuxNode::Origin(k), AuxNode::Copy(b)) => {
                if let Some(head) = find(b, &(aux.battery().clone() - e.d.clone())) {
                    edges.push(travel(origins[k], head, e));
                }
            }
            (AuxNode::Copy(a), AuxNode::Destination(k)) => {
                if let Some(tail) = find(a, &e.d) {
                    edges.push(travel(tail, destinations[k], e));
                }
            }
            _ => {}
        }
    }

    let mut out = vec![Vec::new(); nodes.len()];
    let mut into = vec![Vec::new(); nodes.len()];
    for (id, e) in edges.iter().enumerate() {
        out[e.tail].push(id);
        into[e.head].push(id);
    }
    AugmentedGraph { nodes, edges, out, into, copy_nodes, origins, destinations, battery: aux.battery().clone() }
}

/// Everything needed to route or flow over a network.
#[derive(Debug, Clone)]
pub struct Augmentation<T> {
    pub closure: MetricClosure<T>,
    pub aux: AuxiliaryNetwork<T>,
    pub sets: LevelSets<T>,
    pub graph: AugmentedGraph<T>,
}

impl<T: Scalar> Augmentation<T> {
    pub fn build(net: &ChargingNetwork<T>) -> Self {
        let closure = MetricClosure::compute(net);
        let aux = build_auxiliary(net, &closure);
        let sets = compute_level_sets(&aux);
        let graph = build_augmented(&aux, &sets, net.od_pairs().len());
        Augmentation { closure, aux, sets, graph }
    }
}

/// An OD pair that can be travelled without charging.
#[derive(Debug, Clone, PartialEq)]
pub struct Unbounded {
    pub od: usize,
    pub path: Vec<EdgeId>,
}

/// First OD pair whose battery-shortest trip fits in a full battery. Such a
/// trip needs no charger, so arbitrarily much flow can use it.
pub fn detect_unbounded<T: Scalar>(net: &ChargingNetwork<T>, mc: &MetricClosure<T>) -> Option<Unbounded> {
    net.od_pairs().iter().enumerate().find_map(|(k, od)| {
        let d = mc.d_min(od.origin, od.destination)?;
        d.approx_le(net.battery()).then(|| Unbounded {
            od: k,
            path: mc.battery_path(net, od.origin, od.destination).expect("reachable"),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::RawNetwork;
    use crate::scalar::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
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

    fn ints(values: &[Rational]) -> Vec<i64> {
        values.iter().map(|v| v.to_integer().try_into().unwrap()).collect()
    }

    #[test]
    fn auxiliary_shape() {
        let net = example();
        let mc = MetricClosure::compute(&net);
        let aux = build_auxiliary(&net, &mc);
        assert_eq!(aux.node_count(1), 6);
        let i1 = aux.copy_index(StationId(0), 0);
        let i2 = aux.copy_index(StationId(1), 0);
        assert!(aux.edges().iter().any(|e| e.from == AuxNode::Copy(i1) && e.to == AuxNode::Copy(i2)));
        assert!(!aux.edges().iter().any(|e| e.from == AuxNode::Copy(i2) && e.to == AuxNode::Copy(i1)));
        assert_eq!(aux.direct(0).unwrap().d, r(10));
    }

    #[test]
    fn level_sets_match_hand_computation() {
        let net = example();
        let aux = build_auxiliary(&net, &MetricClosure::compute(&net));
        let sets = compute_level_sets(&aux);
        assert_eq!(ints(&sets.arrive[0]), vec![0, 4]);
        assert_eq!(ints(&sets.depart[0]), vec![5]);
        assert_eq!(ints(&sets.arrive[1]), vec![5]);
        assert_eq!(ints(&sets.depart[1]), vec![5, 6, 9]);
        assert_eq!(ints(&sets.arrive[2]), vec![0, 3, 5]);
        assert_eq!(ints(&sets.depart[2]), vec![5]);
        assert_eq!(ints(&sets.arrive[3]), vec![5]);
        assert_eq!(ints(&sets.depart[3]), vec![6, 9]);
    }

    #[test]
    fn augmented_counts() {
        let aug = Augmentation::build(&example());
        assert_eq!(aug.graph.nodes().len(), 14);
        assert_eq!(aug.graph.edges().len(), 18);
        let count = |k| aug.graph.edges().iter().filter(|e| e.kind == k).count();
        assert_eq!((count(EdgeKind::Charge), count(EdgeKind::Chain), count(EdgeKind::Travel)), (8, 2, 8));
        assert!(aug.graph.connected(0));
    }

    #[test]
    fn charge_edge_cost() {
        let aug = Augmentation::build(&example());
        let tail = aug.graph.find(3, &r(5)).unwrap();
        let head = aug.graph.find(3, &r(6)).unwrap();
        let e = aug.graph.edges().iter().find(|e| e.tail == tail && e.head == head).unwrap();
        assert_eq!((e.lambda.clone(), e.gamma.clone()), (r(1), Rational::new(1.into(), 2.into())));
    }

    #[test]
    fn bounded_example() {
        let net = example();
        assert_eq!(detect_unbounded(&net, &MetricClosure::compute(&net)), None);
    }
}
