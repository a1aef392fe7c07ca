//! Shortest paths between terminals (stations and OD endpoints) under the
//! battery and time metrics, and the check that both metrics agree.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::network::{ChargingNetwork, EdgeId, NodeId};
use crate::scalar::{Ordered, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Minimise total battery consumption.
    Battery,
    /// Minimise total travel time.
    Time,
    /// Battery first, time among battery-minimal paths.
    BatteryThenTime,
    /// Time first, battery among time-minimal paths.
    TimeThenBattery,
}

impl Metric {
    fn time_first(self) -> bool {
        matches!(self, Metric::Time | Metric::TimeThenBattery)
    }

    fn lexicographic(self) -> bool {
        matches!(self, Metric::BatteryThenTime | Metric::TimeThenBattery)
    }
}

/// Length of a path under both metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLength<T> {
    pub d: T,
    pub ell: T,
}

/// Single-source shortest-path tree.
#[derive(Debug, Clone)]
pub struct ShortestPaths<T> {
    source: NodeId,
    length: Vec<Option<PathLength<T>>>,
    pred: Vec<Option<EdgeId>>,
}

impl<T: Scalar> ShortestPaths<T> {
    /// Dijkstra from `source`. Among equally short paths the predecessor with
    /// the smaller node index (then edge index) wins.
    pub fn compute(net: &ChargingNetwork<T>, source: NodeId, metric: Metric) -> Self {
        let n = net.node_count();
        let key = |len: &PathLength<T>| {
            if metric.time_first() {
                (len.ell.clone(), len.d.clone())
            } else {
                (len.d.clone(), len.ell.clone())
            }
        };
        let better = |new: &(T, T), old: &(T, T)| -> Ordering {
            let first = new.0.total_cmp(&old.0);
            if first != Ordering::Equal || !metric.lexicographic() {
                first
            } else {
                new.1.total_cmp(&old.1)
            }
        };

        let mut length: Vec<Option<PathLength<T>>> = vec![None; n];
        let mut pred: Vec<Option<EdgeId>> = vec![None; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        length[source.0] = Some(PathLength { d: T::zero(), ell: T::zero() });
        heap.push(Reverse((Ordered(T::zero()), Ordered(T::zero()), source.0)));

        while let Some(Reverse((_, _, u))) = heap.pop() {
            if settled[u] {
                continue;
            }
            settled[u] = true;
            let here = length[u].clone().expect("queued nodes have a length");
            for &e in net.out_edges(NodeId(u)) {
                let edge = net.edge(e);
                let v = edge.head.0;
                if settled[v] {
                    continue;
                }
                let cand = PathLength {
                    d: here.d.clone() + edge.d.clone(),
                    ell: here.ell.clone() + edge.ell.clone(),
                };
                let replace = match &length[v] {
                    None => true,
                    Some(old) => match better(&key(&cand), &key(old)) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => {
                            let current = pred[v].expect("reached nodes have a predecessor");
                            (u, e.0) < (net.edge(current).tail.0, current.0)
                        }
                    },
                };
                if replace {
                    let (a, b) = key(&cand);
                    heap.push(Reverse((Ordered(a), Ordered(b), v)));
                    length[v] = Some(cand);
                    pred[v] = Some(e);
                }
            }
        }
        ShortestPaths { source, length, pred }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn length(&self, target: NodeId) -> Option<&PathLength<T>> {
        self.length[target.0].as_ref()
    }

    /// Edges of the tree path from the source to `target`.
    pub fn path(&self, net: &ChargingNetwork<T>, target: NodeId) -> Option<Vec<EdgeId>> {
        self.length[target.0].as_ref()?;
        let mut edges = Vec::new();
        let mut at = target;
        while at != self.source {
            let e = self.pred[at.0]?;
            edges.push(e);
            at = net.edge(e).tail;
        }
        edges.reverse();
        Some(edges)
    }
}

/// Shortest paths from every terminal to every node under one metric.
#[derive(Debug, Clone)]
pub struct PathTable<T> {
    metric: Metric,
    slot: Vec<Option<usize>>,
    trees: Vec<ShortestPaths<T>>,
}

impl<T: Scalar> PathTable<T> {
    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn tree(&self, source: NodeId) -> Option<&ShortestPaths<T>> {
        self.slot[source.0].map(|s| &self.trees[s])
    }

    pub fn length(&self, from: NodeId, to: NodeId) -> Option<&PathLength<T>> {
        self.tree(from)?.length(to)
    }
}

/// Stations and OD endpoints, sorted by node index.
pub fn terminals<T: Scalar>(net: &ChargingNetwork<T>) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = net.stations().iter().map(|s| s.node).collect();
    for od in net.od_pairs() {
        nodes.push(od.origin);
        nodes.push(od.destination);
    }
    nodes.sort();
    nodes.dedup();
    nodes
}

/// Shortest paths between all terminal pairs under `metric`.
pub fn all_pairs_shortest<T: Scalar>(net: &ChargingNetwork<T>, metric: Metric) -> PathTable<T> {
    let mut slot = vec![None; net.node_count()];
    let trees = terminals(net)
        .into_iter()
        .enumerate()
        .map(|(s, node)| {
            slot[node.0] = Some(s);
            ShortestPaths::compute(net, node, metric)
        })
        .collect();
    PathTable { metric, slot, trees }
}

/// Battery-first and time-first closures over the terminals.
#[derive(Debug, Clone)]
pub struct MetricClosure<T> {
    battery: PathTable<T>,
    time: PathTable<T>,
}

impl<T: Scalar> MetricClosure<T> {
    pub fn compute(net: &ChargingNetwork<T>) -> Self {
        MetricClosure {
            battery: all_pairs_shortest(net, Metric::BatteryThenTime),
            time: all_pairs_shortest(net, Metric::TimeThenBattery),
        }
    }

    /// Battery-minimal path length, time breaking ties.
    pub fn battery_first(&self, from: NodeId, to: NodeId) -> Option<&PathLength<T>> {
        self.battery.length(from, to)
    }

    /// Time-minimal path length, battery breaking ties.
    pub fn time_first(&self, from: NodeId, to: NodeId) -> Option<&PathLength<T>> {
        self.time.length(from, to)
    }

    pub fn d_min(&self, from: NodeId, to: NodeId) -> Option<&T> {
        self.battery_first(from, to).map(|l| &l.d)
    }

    pub fn ell_min(&self, from: NodeId, to: NodeId) -> Option<&T> {
        self.time_first(from, to).map(|l| &l.ell)
    }

    /// Edges of the battery-first path between two terminals.
    pub fn battery_path(&self, net: &ChargingNetwork<T>, from: NodeId, to: NodeId) -> Option<Vec<EdgeId>> {
        self.battery.tree(from)?.path(net, to)
    }
}

/// Where the battery-minimal and time-minimal paths disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T> {
    pub from: NodeId,
    pub to: NodeId,
    pub d_min: T,
    pub ell_along_d_min: T,
    pub ell_min: T,
    pub d_along_ell_min: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssumptionCheck<T> {
    Holds,
    Violated(Violation<T>),
}

impl<T> AssumptionCheck<T> {
    pub fn holds(&self) -> bool {
        matches!(self, AssumptionCheck::Holds)
    }
}

/// Verifies that between every relevant pair of terminals some path is both
/// battery-minimal and time-minimal. Pairs run from stations and origins to
/// stations and destinations; the first disagreement in node order is
/// returned.
pub fn check_assumption1<T: Scalar>(net: &ChargingNetwork<T>, mc: &MetricClosure<T>) -> AssumptionCheck<T> {
    let mut sources: Vec<NodeId> = net.stations().iter().map(|s| s.node).collect();
    let mut targets = sources.clone();
    sources.extend(net.od_pairs().iter().map(|od| od.origin));
    targets.extend(net.od_pairs().iter().map(|od| od.destination));
    for list in [&mut sources, &mut targets] {
        list.sort();
        list.dedup();
    }
    for &from in &sources {
        for &to in &targets {
            if from == to {
                continue;
            }
            let (Some(by_battery), Some(by_time)) = (mc.battery_first(from, to), mc.time_first(from, to)) else {
                continue;
            };
            if !by_battery.ell.approx_eq(&by_time.ell) || !by_time.d.approx_eq(&by_battery.d) {
                return AssumptionCheck::Violated(Violation {
                    from,
                    to,
                    d_min: by_battery.d.clone(),
                    ell_along_d_min: by_battery.ell.clone(),
                    ell_min: by_time.ell.clone(),
                    d_along_ell_min: by_time.d.clone(),
                });
            }
        }
    }
    AssumptionCheck::Holds
}
