//! Charging strategies: a walk from an origin to a destination plus the
//! charge taken at each position, with battery bookkeeping and cost.

use thiserror::Error;

use crate::closure::MetricClosure;
use crate::network::{ChargingCurve, ChargingNetwork, EdgeId, NodeId};
use crate::scalar::{max_of, min_of, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct ChargingStrategy<T> {
    pub od: usize,
    /// Visited nodes, origin first; one more than `edges`.
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    /// Charge taken at each position of `nodes`.
    pub charges: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeasibilityError {
    #[error("position {position} ({node}): battery drops to {level}")]
    Depleted { position: usize, node: String, level: String },
    #[error("position {position} ({node}): battery rises to {level} above capacity")]
    Overcharged { position: usize, node: String, level: String },
    #[error("position {position} ({node}): charge taken at a node without chargers")]
    ChargeOffStation { position: usize, node: String },
    #[error("position {position} ({node}): negative charge")]
    NegativeCharge { position: usize, node: String },
    #[error("position {position} ({node}): charge taken in zero-speed interval {interval}")]
    ZeroSpeedCharge { position: usize, node: String, interval: usize },
    #[error("walk does not follow the network from origin to destination")]
    BrokenPath,
}

/// One charging stop.
#[derive(Debug, Clone, PartialEq)]
pub struct Stop<T> {
    pub position: usize,
    pub node: NodeId,
    pub arrive: T,
    pub depart: T,
    /// Charge taken in each interval.
    pub split: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown<T> {
    pub drive_time: T,
    pub charge_time: T,
    pub money: T,
    pub total: T,
}

/// Charge taken in each interval when charging from `from` up to `to`.
pub fn split_charge<T: Scalar>(curve: &ChargingCurve<T>, from: &T, to: &T) -> Vec<T> {
    (0..curve.intervals())
        .map(|j| {
            let lo = max_of(from.clone(), curve.lower(j).clone());
            let hi = min_of(to.clone(), curve.upper(j).clone());
            if lo < hi {
                hi - lo
            } else {
                T::zero()
            }
        })
        .collect()
}

impl<T: Scalar> ChargingStrategy<T> {
    /// Strategy that follows battery-shortest paths between the given
    /// charging stops. Consecutive stops at one node merge.
    pub fn through_stops(net: &ChargingNetwork<T>, mc: &MetricClosure<T>, od: usize, stops: &[(NodeId, T)]) -> Option<Self> {
        let pair = &net.od_pairs()[od];
        let mut strategy = ChargingStrategy { od, nodes: vec![pair.origin], edges: Vec::new(), charges: vec![T::zero()] };
        let targets = stops.iter().cloned().chain(std::iter::once((pair.destination, T::zero())));
        for (node, charge) in targets {
            let here = *strategy.nodes.last().expect("non-empty");
            if here != node {
                for e in mc.battery_path(net, here, node)? {
                    strategy.edges.push(e);
                    strategy.nodes.push(net.edge(e).head);
                    strategy.charges.push(T::zero());
                }
            }
            let last = strategy.charges.last_mut().expect("non-empty");
            *last = last.clone() + charge;
        }
        Some(strategy)
    }

    /// Strategy without charging along a path of edges.
    pub fn uncharged(net: &ChargingNetwork<T>, od: usize, edges: Vec<EdgeId>) -> Self {
        let mut nodes = vec![net.od_pairs()[od].origin];
        nodes.extend(edges.iter().map(|&e| net.edge(e).head));
        let charges = vec![T::zero(); nodes.len()];
        ChargingStrategy { od, nodes, edges, charges }
    }

    /// Battery on arrival at each position.
    pub fn arrivals(&self, net: &ChargingNetwork<T>) -> Vec<T> {
        let mut level = net.battery().clone();
        let mut out = Vec::with_capacity(self.nodes.len());
        for (n, q) in self.charges.iter().enumerate() {
            out.push(level.clone());
            level = level + q.clone();
            if let Some(&e) = self.edges.get(n) {
                level = level - net.edge(e).d.clone();
            }
        }
        out
    }

    /// Checks the battery stays within `[0, L]`, charging happens only at
    /// stations in non-zero-speed intervals, and the walk is well formed.
    /// Returns the charging stops.
    pub fn check(&self, net: &ChargingNetwork<T>) -> Result<Vec<Stop<T>>, FeasibilityError> {
        let od = net.od_pairs().get(self.od).ok_or(FeasibilityError::BrokenPath)?;
        let shape_ok = self.nodes.len() == self.edges.len() + 1
            && self.charges.len() == self.nodes.len()
            && self.nodes.first() == Some(&od.origin)
            && self.nodes.last() == Some(&od.destination)
            && self.edges.iter().enumerate().all(|(n, &e)| {
                e.0 < net.edges().len() && net.edge(e).tail == self.nodes[n] && net.edge(e).head == self.nodes[n + 1]
            });
        if !shape_ok {
            return Err(FeasibilityError::BrokenPath);
        }
        let battery = net.battery();
        let mut stops = Vec::new();
        for (n, arrive) in self.arrivals(net).into_iter().enumerate() {
            let node = self.nodes[n];
            let name = || net.label(node).to_string();
            if arrive.definitely_lt(&T::zero()) {
                return Err(FeasibilityError::Depleted { position: n, node: name(), level: arrive.render() });
            }
            let q = &self.charges[n];
            if q.definitely_lt(&T::zero()) {
                return Err(FeasibilityError::NegativeCharge { position: n, node: name() });
            }
            if q.is_negligible() {
                continue;
            }
            let Some(station) = net.station_at(node) else {
                return Err(FeasibilityError::ChargeOffStation { position: n, node: name() });
            };
            let depart = arrive.clone() + q.clone();
            if battery.definitely_lt(&depart) {
                return Err(FeasibilityError::Overcharged { position: n, node: name(), level: depart.render() });
            }
            let split = split_charge(net.curve(), &arrive, &depart);
            let speeds = &net.station(station).speeds;
            if let Some(j) = (0..split.len()).find(|&j| !split[j].is_negligible() && speeds[j].is_negligible()) {
                return Err(FeasibilityError::ZeroSpeedCharge { position: n, node: name(), interval: j + 1 });
            }
            stops.push(Stop { position: n, node, arrive, depart, split });
        }
        Ok(stops)
    }

    /// Travel time, charging time, money, and their sum.
    pub fn cost(&self, net: &ChargingNetwork<T>) -> Result<CostBreakdown<T>, FeasibilityError> {
        let stops = self.check(net)?;
        let drive_time = self.edges.iter().fold(T::zero(), |acc, &e| acc + net.edge(e).ell.clone());
        let (mut charge_time, mut money) = (T::zero(), T::zero());
        for stop in &stops {
            let station = net.station(net.station_at(stop.node).expect("checked"));
            for (j, q) in stop.split.iter().enumerate() {
                if q.is_negligible() {
                    continue;
                }
                let time = q.clone() / station.speeds[j].clone();
                money = money + station.prices[j].clone() * q.clone() + station.occupancy_price.clone() * time.clone();
                charge_time = charge_time + time;
            }
        }
        let total = drive_time.clone() + charge_time.clone() + money.clone();
        Ok(CostBreakdown { drive_time, charge_time, money, total })
    }

    /// Charge taken per interval at every station, indexed like
    /// `(station, interval)`.
    pub fn station_loads(&self, net: &ChargingNetwork<T>) -> Result<Vec<Vec<T>>, FeasibilityError> {
        let mut loads = vec![vec![T::zero(); net.curve().intervals()]; net.stations().len()];
        for stop in self.check(net)? {
            let s = net.station_at(stop.node).expect("checked").0;
            for (j, q) in stop.split.into_iter().enumerate() {
                loads[s][j] = loads[s][j].clone() + q;
            }
        }
        Ok(loads)
    }

    /// Total charge per node label, in path order.
    pub fn charges_by_node(&self, net: &ChargingNetwork<T>) -> Vec<(String, T)> {
        let mut out: Vec<(String, T)> = Vec::new();
        for (n, q) in self.charges.iter().enumerate() {
            if q.is_negligible() {
                continue;
            }
            let label = net.label(self.nodes[n]).to_string();
            match out.iter_mut().find(|(l, _)| *l == label) {
                Some((_, total)) => *total = total.clone() + q.clone(),
                None => out.push((label, q.clone())),
            }
        }
        out
    }

    pub fn path_labels<'a>(&self, net: &'a ChargingNetwork<T>) -> Vec<&'a str> {
        self.nodes.iter().map(|&n| net.label(n)).collect()
    }
}

/// Unit cost charged per interval, `strategy_cost` minus driving time.
pub fn strategy_cost<T: Scalar>(net: &ChargingNetwork<T>, strategy: &ChargingStrategy<T>) -> Result<T, FeasibilityError> {
    strategy.cost(net).map(|c| c.total)
}
