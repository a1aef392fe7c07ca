//! Charging network: directed graph, charging stations with piecewise-constant
//! speeds over a shared battery grid, and origin-destination pairs.

mod raw;
pub mod schema;

use std::collections::HashMap;

pub use raw::{merge_threshold_grids, RawEdge, RawNetwork, RawOdPair, RawStation, StationGrid};

use crate::error::NetworkError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StationId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub tail: NodeId,
    pub head: NodeId,
    /// Battery consumed.
    pub d: T,
    /// Travel time.
    pub ell: T,
    /// Flow capacity, `None` when uncapacitated.
    pub capacity: Option<T>,
}

/// Battery thresholds `0 = α_1 < … < α_{J+1} = L`. Intervals are indexed
/// from zero and are half-open, `[α_j, α_{j+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargingCurve<T> {
    thresholds: Vec<T>,
}

impl<T: Scalar> ChargingCurve<T> {
    pub fn thresholds(&self) -> &[T] {
        &self.thresholds
    }

    /// Number of intervals `J`.
    pub fn intervals(&self) -> usize {
        self.thresholds.len() - 1
    }

    pub fn lower(&self, interval: usize) -> &T {
        &self.thresholds[interval]
    }

    pub fn upper(&self, interval: usize) -> &T {
        &self.thresholds[interval + 1]
    }

    pub fn battery(&self) -> &T {
        self.thresholds.last().expect("grid has at least two points")
    }

    /// Interval containing `level`; `L` itself belongs to the last one.
    pub fn interval_of(&self, level: &T) -> usize {
        raw::interval_of(&self.thresholds, level)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Station<T> {
    pub node: NodeId,
    pub chargers: u64,
    /// Charging speed per interval.
    pub speeds: Vec<T>,
    /// Monetary price per unit of charge, per interval.
    pub prices: Vec<T>,
    /// Price per unit of time spent charging.
    pub occupancy_price: T,
}

impl<T: Scalar> Station<T> {
    /// Cost of one unit of charge in `interval`: price plus the time and
    /// occupancy cost of the charging time. `None` for a zero-speed interval,
    /// which dispenses no charge at all.
    pub fn unit_cost(&self, interval: usize) -> Option<T> {
        let speed = &self.speeds[interval];
        if speed.is_negligible() {
            return None;
        }
        Some(self.prices[interval].clone() + (T::one() + self.occupancy_price.clone()) / speed.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdPair<T> {
    pub origin: NodeId,
    pub destination: NodeId,
    pub demand: T,
}

/// Validated, immutable charging network.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargingNetwork<T> {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<Edge<T>>,
    out_edges: Vec<Vec<EdgeId>>,
    stations: Vec<Station<T>>,
    station_at: Vec<Option<StationId>>,
    curve: ChargingCurve<T>,
    od_pairs: Vec<OdPair<T>>,
}

impl<T: Scalar> ChargingNetwork<T> {
    /// Normalises (one station per node, one shared grid) and validates.
    pub fn from_raw(raw: RawNetwork<T>) -> Result<Self, NetworkError> {
        if !T::zero().definitely_lt(&raw.battery) {
            return Err(NetworkError::Battery { location: "L".into() });
        }

        let mut index = HashMap::new();
        for (position, label) in raw.nodes.iter().enumerate() {
            if index.insert(label.clone(), NodeId(position)).is_some() {
                return Err(NetworkError::DuplicateNode {
                    location: format!("nodes[{position}]"),
                    label: label.clone(),
                });
            }
        }
        let lookup = |label: &str, location: String| {
            index.get(label).copied().ok_or_else(|| NetworkError::UnknownNode {
                location,
                label: label.to_string(),
            })
        };

        let mut od_pairs = Vec::with_capacity(raw.od_pairs.len());
        for (k, od) in raw.od_pairs.iter().enumerate() {
            let origin = lookup(&od.origin, format!("od_pairs[{k}].s"))?;
            let destination = lookup(&od.destination, format!("od_pairs[{k}].t"))?;
            if origin == destination {
                return Err(NetworkError::DegenerateOdPair {
                    location: format!("od_pairs[{k}]"),
                    node: od.origin.clone(),
                });
            }
            if od.demand.is_negative() {
                return Err(NetworkError::Negative {
                    location: format!("od_pairs[{k}]"),
                    field: "demand",
                });
            }
            od_pairs.push(OdPair {
                origin,
                destination,
                demand: od.demand.clone(),
            });
        }
        for (s, station) in raw.stations.iter().enumerate() {
            let location = format!("stations[{s}]");
            lookup(&station.node, location.clone())?;
            let is_od = raw
                .od_pairs
                .iter()
                .any(|od| od.origin == station.node || od.destination == station.node);
            if is_od {
                return Err(NetworkError::StationAtOdNode {
                    location,
                    node: station.node.clone(),
                });
            }
            let negative = station
                .speeds
                .iter()
                .map(|v| (v, "speeds"))
                .chain(station.prices.iter().map(|v| (v, "prices")))
                .chain(std::iter::once((&station.occupancy_price, "occupancy_price")))
                .find(|(v, _)| v.is_negative() && !v.is_negligible());
            if let Some((_, field)) = negative {
                return Err(NetworkError::Negative { location, field });
            }
        }
        for (e, edge) in raw.edges.iter().enumerate() {
            let location = format!("edges[{e}]");
            lookup(&edge.tail, format!("{location}.tail"))?;
            lookup(&edge.head, format!("{location}.head"))?;
            for (value, field) in [(Some(&edge.d), "d"), (Some(&edge.ell), "ell"), (edge.capacity.as_ref(), "u")] {
                if value.is_some_and(|v| v.is_negative() && !v.is_negligible()) {
                    return Err(NetworkError::Negative { location, field });
                }
            }
        }

        let raw = raw.split_charger_types().merge_threshold_grids()?;

        let mut index = HashMap::new();
        for (position, label) in raw.nodes.iter().enumerate() {
            index.insert(label.clone(), NodeId(position));
        }
        let edges: Vec<Edge<T>> = raw
            .edges
            .iter()
            .map(|e| Edge {
                tail: index[&e.tail],
                head: index[&e.head],
                d: e.d.clone(),
                ell: e.ell.clone(),
                capacity: e.capacity.clone(),
            })
            .collect();
        let mut out_edges = vec![Vec::new(); raw.nodes.len()];
        for (e, edge) in edges.iter().enumerate() {
            out_edges[edge.tail.0].push(EdgeId(e));
        }
        let mut station_at = vec![None; raw.nodes.len()];
        let stations: Vec<Station<T>> = raw
            .stations
            .iter()
            .enumerate()
            .map(|(s, st)| {
                let node = index[&st.node];
                station_at[node.0] = Some(StationId(s));
                Station {
                    node,
                    chargers: st.chargers,
                    speeds: st.speeds.clone(),
                    prices: st.prices.clone(),
                    occupancy_price: st.occupancy_price.clone(),
                }
            })
            .collect();

        Ok(ChargingNetwork {
            labels: raw.nodes,
            index,
            edges,
            out_edges,
            stations,
            station_at,
            curve: ChargingCurve { thresholds: raw.thresholds },
            od_pairs,
        })
    }

    /// Inverse of [`ChargingNetwork::from_raw`] on normalised networks.
    pub fn to_raw(&self) -> RawNetwork<T> {
        RawNetwork {
            battery: self.battery().clone(),
            thresholds: self.curve.thresholds.clone(),
            nodes: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    tail: self.label(e.tail).to_string(),
                    head: self.label(e.head).to_string(),
                    d: e.d.clone(),
                    ell: e.ell.clone(),
                    capacity: e.capacity.clone(),
                })
                .collect(),
            stations: self
                .stations
                .iter()
                .map(|s| RawStation {
                    node: self.label(s.node).to_string(),
                    chargers: s.chargers,
                    speeds: s.speeds.clone(),
                    prices: s.prices.clone(),
                    occupancy_price: s.occupancy_price.clone(),
                    thresholds: None,
                })
                .collect(),
            od_pairs: self
                .od_pairs
                .iter()
                .map(|od| RawOdPair {
                    origin: self.label(od.origin).to_string(),
                    destination: self.label(od.destination).to_string(),
                    demand: od.demand.clone(),
                })
                .collect(),
        }
    }

    pub fn battery(&self) -> &T {
        self.curve.battery()
    }

    pub fn curve(&self) -> &ChargingCurve<T> {
        &self.curve
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.0]
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge<T> {
        &self.edges[id.0]
    }

    pub fn out_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.out_edges[node.0]
    }

    pub fn stations(&self) -> &[Station<T>] {
        &self.stations
    }

    pub fn station(&self, id: StationId) -> &Station<T> {
        &self.stations[id.0]
    }

    pub fn station_at(&self, node: NodeId) -> Option<StationId> {
        self.station_at[node.0]
    }

    pub fn od_pairs(&self) -> &[OdPair<T>] {
        &self.od_pairs
    }

    pub fn has_edge_capacities(&self) -> bool {
        self.edges.iter().any(|e| e.capacity.is_some())
    }

    /// Charging speed of `station` at battery level `level`.
    pub fn speed_at(&self, station: StationId, level: &T) -> &T {
        &self.stations[station.0].speeds[self.curve.interval_of(level)]
    }

    /// Copy with every charger count multiplied by `factor`.
    pub fn scale_chargers(&self, factor: u64) -> Self {
        let mut scaled = self.clone();
        for station in &mut scaled.stations {
            station.chargers *= factor;
        }
        scaled
    }

    /// Copy with all edge capacities removed.
    pub fn without_capacities(&self) -> Self {
        let mut copy = self.clone();
        for edge in &mut copy.edges {
            edge.capacity = None;
        }
        copy
    }

    /// Copy with the demand of every OD pair replaced.
    pub fn with_demands(&self, demands: &[T]) -> Self {
        let mut copy = self.clone();
        for (od, demand) in copy.od_pairs.iter_mut().zip(demands) {
            od.demand = demand.clone();
        }
        copy
    }
}
