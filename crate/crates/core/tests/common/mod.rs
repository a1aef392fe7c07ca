#![allow(dead_code)]

use evflow::router::Route;
use evflow::{Augmentation, ExactNetwork, Rational, RawNetwork, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn r(v: i64) -> Rational {
    Rational::from_int(v)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// The four-node network with two stations used throughout the tests.
pub fn example1_raw() -> RawNetwork<Rational> {
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
    raw
}

pub fn example1() -> ExactNetwork {
    ExactNetwork::from_raw(example1_raw()).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_stations: usize,
    pub max_intervals: usize,
    pub max_value: i64,
    /// Travel time proportional to battery use, so battery-shortest paths
    /// are also time-shortest.
    pub aligned: bool,
    pub capacities: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_stations: 5, max_intervals: 2, max_value: 20, aligned: true, capacities: false }
    }
}

/// Random acyclic instance: `s`, stations `i1..`, `t`, edges only forward.
pub fn random_instance(seed: u64, shape: Shape) -> ExactNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stations = rng.gen_range(1..=shape.max_stations);
    let battery = rng.gen_range(4..=shape.max_value);
    let intervals = rng.gen_range(1..=shape.max_intervals.min(battery as usize));
    let mut cuts: Vec<i64> = Vec::new();
    while cuts.len() + 1 < intervals {
        let c = rng.gen_range(1..battery);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort();
    let mut thresholds = vec![r(0)];
    thresholds.extend(cuts.into_iter().map(r));
    thresholds.push(r(battery));

    let mut raw = RawNetwork::new(r(battery), thresholds);
    let labels: Vec<String> = std::iter::once("s".to_string())
        .chain((1..=stations).map(|i| format!("i{i}")))
        .chain(std::iter::once("t".to_string()))
        .collect();
    for l in &labels {
        raw.node(l);
    }
    let n = labels.len();
    let ell_factor = rng.gen_range(1..=2);
    for a in 0..n {
        for b in a + 1..n {
            if a == 0 && b == n - 1 {
                // a direct trip must need more than one battery
                if rng.gen_bool(0.3) {
                    let d = rng.gen_range(battery + 1..=battery + shape.max_value);
                    raw.edge(&labels[a], &labels[b], r(d), r(d * ell_factor));
                }
                continue;
            }
            if rng.gen_bool(0.6) {
                let d = rng.gen_range(1..=shape.max_value.min(battery + 2));
                let ell = if shape.aligned { d * ell_factor } else { rng.gen_range(0..=shape.max_value) };
                if shape.capacities && rng.gen_bool(0.6) {
                    raw.capped_edge(&labels[a], &labels[b], r(d), r(ell), r(rng.gen_range(0..=3)));
                } else {
                    raw.edge(&labels[a], &labels[b], r(d), r(ell));
                }
            }
        }
    }
    for label in &labels[1..n - 1] {
        let speeds = (0..intervals).map(|_| r(if rng.gen_bool(0.15) { 0 } else { rng.gen_range(1..=4) })).collect();
        let prices = (0..intervals).map(|_| r(rng.gen_range(0..=3))).collect();
        raw.station(label, rng.gen_range(0..=3), speeds, prices, r(rng.gen_range(0..=2)));
    }
    raw.od("s", "t", r(rng.gen_range(1..=3)));
    ExactNetwork::from_raw(raw).unwrap()
}

/// Whether some subset of `values` sums to exactly half the total.
pub fn has_partition(values: &[u64]) -> bool {
    let total: u64 = values.iter().sum();
    if total % 2 == 1 {
        return false;
    }
    (0u32..1 << values.len()).any(|mask| {
        values.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| v).sum::<u64>() * 2 == total
    })
}

/// Checks the charge pattern on every leg: just reach the next stop when it
/// is strictly cheaper, otherwise fill to the top of the interval.
pub fn check_charge_pattern(net: &ExactNetwork, aug: &Augmentation<Rational>, route: &Route<Rational>) {
    let target = net.od_pairs()[route.od].destination;
    for (n, leg) in route.legs.iter().enumerate() {
        let copy = aug.aux.copy_index(leg.station, leg.interval);
        let cost = aug.aux.unit_cost(copy).cloned().expect("charging copies have speed");
        let here = net.station(leg.station).node;
        let (next_cost, next_floor, hop) = match route.legs.get(n + 1) {
            Some(next) => {
                let c = aug.aux.copy_index(next.station, next.interval);
                let there = net.station(next.station).node;
                let hop = if there == here { r(0) } else { aug.closure.d_min(here, there).cloned().unwrap() };
                (aug.aux.unit_cost(c).cloned(), aug.aux.lower(c).clone(), hop)
            }
            None => (Some(r(0)), r(0), aug.closure.d_min(here, target).cloned().unwrap()),
        };
        let expected = match next_cost {
            Some(c) if c < cost => next_floor + hop,
            _ => aug.aux.upper(copy).clone(),
        };
        assert_eq!(leg.depart, expected, "leg {n}");
    }
}
