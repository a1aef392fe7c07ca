//! Unvalidated network description and the two normalisation passes that
//! turn it into the one-station-per-node, single-grid form.

use std::collections::HashSet;

use crate::error::NetworkError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RawEdge<T> {
    pub tail: String,
    pub head: String,
    pub d: T,
    pub ell: T,
    pub capacity: Option<T>,
}

/// One charger type at a node. `thresholds`, when present, replaces the
/// network-wide grid for this charger and must span `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawStation<T> {
    pub node: String,
    pub chargers: u64,
    pub speeds: Vec<T>,
    pub prices: Vec<T>,
    pub occupancy_price: T,
    pub thresholds: Option<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawOdPair<T> {
    pub origin: String,
    pub destination: String,
    pub demand: T,
}

/// Network as written in a file: several charger types may share a node and
/// each may carry its own threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RawNetwork<T> {
    pub battery: T,
    pub thresholds: Vec<T>,
    pub nodes: Vec<String>,
    pub edges: Vec<RawEdge<T>>,
    pub stations: Vec<RawStation<T>>,
    pub od_pairs: Vec<RawOdPair<T>>,
}

impl<T: Scalar> RawNetwork<T> {
    /// Empty network with battery capacity `battery` and grid `thresholds`.
    pub fn new(battery: T, thresholds: Vec<T>) -> Self {
        RawNetwork {
            battery,
            thresholds,
            nodes: Vec::new(),
            edges: Vec::new(),
            stations: Vec::new(),
            od_pairs: Vec::new(),
        }
    }

    pub fn node(&mut self, label: &str) -> &mut Self {
        self.nodes.push(label.to_string());
        self
    }

    pub fn nodes<'a>(&mut self, labels: impl IntoIterator<Item = &'a str>) -> &mut Self {
        for label in labels {
            self.node(label);
        }
        self
    }

    pub fn edge(&mut self, tail: &str, head: &str, d: T, ell: T) -> &mut Self {
        self.edges.push(RawEdge {
            tail: tail.to_string(),
            head: head.to_string(),
            d,
            ell,
            capacity: None,
        });
        self
    }

    pub fn capped_edge(&mut self, tail: &str, head: &str, d: T, ell: T, capacity: T) -> &mut Self {
        self.edges.push(RawEdge {
            tail: tail.to_string(),
            head: head.to_string(),
            d,
            ell,
            capacity: Some(capacity),
        });
        self
    }

    pub fn station(&mut self, node: &str, chargers: u64, speeds: Vec<T>, prices: Vec<T>, occupancy_price: T) -> &mut Self {
        self.stations.push(RawStation {
            node: node.to_string(),
            chargers,
            speeds,
            prices,
            occupancy_price,
            thresholds: None,
        });
        self
    }

    pub fn od(&mut self, origin: &str, destination: &str, demand: T) -> &mut Self {
        self.od_pairs.push(RawOdPair {
            origin: origin.to_string(),
            destination: destination.to_string(),
            demand,
        });
        self
    }

    /// Gives every extra charger type at a node its own node, joined to the
    /// original by a zero-length edge in each direction.
    pub fn split_charger_types(mut self) -> Self {
        let mut taken: HashSet<String> = self.nodes.iter().cloned().collect();
        let mut seen: HashSet<String> = HashSet::new();
        let mut extra_nodes = Vec::new();
        let mut extra_edges = Vec::new();
        for (position, station) in self.stations.iter_mut().enumerate() {
            if seen.insert(station.node.clone()) {
                continue;
            }
            let base = station.node.clone();
            let mut suffix = position + 1;
            let mut label = format!("{base}#{suffix}");
            while taken.contains(&label) {
                suffix += 1;
                label = format!("{base}#{suffix}");
            }
            taken.insert(label.clone());
            seen.insert(label.clone());
            for (tail, head) in [(&base, &label), (&label, &base)] {
                extra_edges.push(RawEdge {
                    tail: tail.clone(),
                    head: head.clone(),
                    d: T::zero(),
                    ell: T::zero(),
                    capacity: None,
                });
            }
            extra_nodes.push(label.clone());
            station.node = label;
        }
        self.nodes.extend(extra_nodes);
        self.edges.extend(extra_edges);
        self
    }

    /// Replaces per-station grids by the sorted union of all grids.
    pub fn merge_threshold_grids(mut self) -> Result<Self, NetworkError> {
        let grids: Vec<Option<Vec<T>>> = self.stations.iter().map(|s| s.thresholds.clone()).collect();
        let mut specs = Vec::with_capacity(self.stations.len());
        for (station, grid) in self.stations.iter().zip(&grids) {
            specs.push(StationGrid {
                thresholds: grid.as_deref().unwrap_or(&self.thresholds),
                speeds: &station.speeds,
                prices: &station.prices,
            });
        }
        let (global, expanded) = merge_threshold_grids(&self.battery, &self.thresholds, &specs)?;
        for (station, (speeds, prices)) in self.stations.iter_mut().zip(expanded) {
            station.speeds = speeds;
            station.prices = prices;
            station.thresholds = None;
        }
        self.thresholds = global;
        Ok(self)
    }
}

/// A station's own piecewise-constant speed and price description.
#[derive(Debug, Clone, Copy)]
pub struct StationGrid<'a, T> {
    pub thresholds: &'a [T],
    pub speeds: &'a [T],
    pub prices: &'a [T],
}

/// Sorted union of `base` and every station grid, with each station's speeds
/// and prices re-expanded so that they are constant on every global interval.
#[allow(clippy::type_complexity)]
pub fn merge_threshold_grids<T: Scalar>(
    battery: &T,
    base: &[T],
    stations: &[StationGrid<'_, T>],
) -> Result<(Vec<T>, Vec<(Vec<T>, Vec<T>)>), NetworkError> {
    check_grid(battery, base, "thresholds")?;
    for (index, spec) in stations.iter().enumerate() {
        let location = format!("stations[{index}].thresholds");
        check_grid(battery, spec.thresholds, &location)?;
        let intervals = spec.thresholds.len() - 1;
        if spec.speeds.len() != intervals || spec.prices.len() != intervals {
            return Err(NetworkError::LengthMismatch {
                location: format!("stations[{index}]"),
                expected: intervals,
                speeds: spec.speeds.len(),
                prices: spec.prices.len(),
            });
        }
    }

    let mut global: Vec<T> = base.to_vec();
    for spec in stations {
        global.extend(spec.thresholds.iter().cloned());
    }
    global.sort_by(|a, b| a.total_cmp(b));
    global.dedup_by(|a, b| a.approx_eq(b));

    let expanded = stations
        .iter()
        .map(|spec| {
            let mut speeds = Vec::with_capacity(global.len() - 1);
            let mut prices = Vec::with_capacity(global.len() - 1);
            for start in &global[..global.len() - 1] {
                let j = interval_of(spec.thresholds, start);
                speeds.push(spec.speeds[j].clone());
                prices.push(spec.prices[j].clone());
            }
            (speeds, prices)
        })
        .collect();
    Ok((global, expanded))
}

/// Index `j` with `thresholds[j] <= level < thresholds[j + 1]`; the top level
/// maps to the last interval.
pub(crate) fn interval_of<T: Scalar>(thresholds: &[T], level: &T) -> usize {
    let last = thresholds.len() - 2;
    (0..=last)
        .find(|&j| thresholds[j].approx_le(level) && level.definitely_lt(&thresholds[j + 1]))
        .unwrap_or(last)
}

fn check_grid<T: Scalar>(battery: &T, grid: &[T], location: &str) -> Result<(), NetworkError> {
    if grid.len() < 2 {
        return Err(NetworkError::Thresholds {
            location: location.to_string(),
            reason: "need at least two thresholds".into(),
        });
    }
    if !grid[0].is_negligible() || !grid[grid.len() - 1].approx_eq(battery) {
        return Err(NetworkError::Thresholds {
            location: location.to_string(),
            reason: format!("must start at 0 and end at L = {}", battery.render()),
        });
    }
    if let Some(pos) = grid.windows(2).position(|w| !w[0].definitely_lt(&w[1])) {
        return Err(NetworkError::Thresholds {
            location: format!("{location}[{}]", pos + 1),
            reason: "thresholds must be strictly increasing".into(),
        });
    }
    Ok(())
}
