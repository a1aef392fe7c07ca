//! JSON network file.
//!
//! ```json
//! {
//!   "L": "9",
//!   "thresholds": ["0", "5", "9"],
//!   "nodes": ["s", "i1", "t"],
//!   "edges": [{"tail": "s", "head": "i1", "d": "5", "ell": "5", "u": "1"}],
//!   "stations": [{"node": "i1", "chargers": 1, "speeds": ["2", "1"],
//!                 "prices": ["0", "0"], "occupancy_price": "0"}],
//!   "od_pairs": [{"s": "s", "t": "t", "demand": "1"}]
//! }
//! ```
//!
//! Numbers are decimal or `p/q` strings so that battery arithmetic stays
//! exact; plain JSON numbers are accepted as well. A station may carry its own
//! `"thresholds"` grid, and several stations may name the same node.

use serde::{Deserialize, Serialize};

use super::{ChargingNetwork, RawEdge, RawNetwork, RawOdPair, RawStation};
use crate::error::NetworkError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Text(String),
    Number(serde_json::Number),
}

impl NumberText {
    fn text(&self) -> String {
        match self {
            NumberText::Text(text) => text.clone(),
            NumberText::Number(number) => number.to_string(),
        }
    }

    fn parse<T: Scalar>(&self, location: impl Into<String>) -> Result<T, NetworkError> {
        let text = self.text();
        T::parse_decimal(&text).ok_or_else(|| NetworkError::BadNumber {
            location: location.into(),
            text,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(rename = "L")]
    pub battery: NumberText,
    pub thresholds: Vec<NumberText>,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub stations: Vec<StationRecord>,
    #[serde(default)]
    pub od_pairs: Vec<OdRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub tail: String,
    pub head: String,
    pub d: NumberText,
    pub ell: NumberText,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<NumberText>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationRecord {
    pub node: String,
    pub chargers: NumberText,
    pub speeds: Vec<NumberText>,
    pub prices: Vec<NumberText>,
    pub occupancy_price: NumberText,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<NumberText>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdRecord {
    pub s: String,
    pub t: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<NumberText>,
}

fn parse_list<T: Scalar>(items: &[NumberText], location: &str) -> Result<Vec<T>, NetworkError> {
    items
        .iter()
        .enumerate()
        .map(|(i, item)| item.parse(format!("{location}[{i}]")))
        .collect()
}

impl NetworkFile {
    pub fn into_raw<T: Scalar>(self) -> Result<RawNetwork<T>, NetworkError> {
        let mut raw = RawNetwork::new(self.battery.parse("L")?, parse_list(&self.thresholds, "thresholds")?);
        raw.nodes = self.nodes;
        for (e, edge) in self.edges.into_iter().enumerate() {
            let location = format!("edges[{e}]");
            raw.edges.push(RawEdge {
                d: edge.d.parse(format!("{location}.d"))?,
                ell: edge.ell.parse(format!("{location}.ell"))?,
                capacity: edge.u.map(|u| u.parse(format!("{location}.u"))).transpose()?,
                tail: edge.tail,
                head: edge.head,
            });
        }
        for (s, station) in self.stations.into_iter().enumerate() {
            let location = format!("stations[{s}]");
            let chargers_text = station.chargers.text();
            let chargers = chargers_text.trim().parse::<u64>().map_err(|_| NetworkError::BadNumber {
                location: format!("{location}.chargers"),
                text: chargers_text.clone(),
            })?;
            raw.stations.push(RawStation {
                chargers,
                speeds: parse_list(&station.speeds, &format!("{location}.speeds"))?,
                prices: parse_list(&station.prices, &format!("{location}.prices"))?,
                occupancy_price: station.occupancy_price.parse(format!("{location}.occupancy_price"))?,
                thresholds: station
                    .thresholds
                    .map(|t| parse_list(&t, &format!("{location}.thresholds")))
                    .transpose()?,
                node: station.node,
            });
        }
        for (k, od) in self.od_pairs.into_iter().enumerate() {
            raw.od_pairs.push(RawOdPair {
                demand: match od.demand {
                    Some(d) => d.parse(format!("od_pairs[{k}].demand"))?,
                    None => T::zero(),
                },
                origin: od.s,
                destination: od.t,
            });
        }
        Ok(raw)
    }

    pub fn from_raw<T: Scalar>(raw: &RawNetwork<T>) -> Self {
        let text = |v: &T| NumberText::Text(v.render());
        NetworkFile {
            battery: text(&raw.battery),
            thresholds: raw.thresholds.iter().map(text).collect(),
            nodes: raw.nodes.clone(),
            edges: raw
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    tail: e.tail.clone(),
                    head: e.head.clone(),
                    d: text(&e.d),
                    ell: text(&e.ell),
                    u: e.capacity.as_ref().map(text),
                })
                .collect(),
            stations: raw
                .stations
                .iter()
                .map(|s| StationRecord {
                    node: s.node.clone(),
                    chargers: NumberText::Number(s.chargers.into()),
                    speeds: s.speeds.iter().map(text).collect(),
                    prices: s.prices.iter().map(text).collect(),
                    occupancy_price: text(&s.occupancy_price),
                    thresholds: s.thresholds.as_ref().map(|t| t.iter().map(text).collect()),
                })
                .collect(),
            od_pairs: raw
                .od_pairs
                .iter()
                .map(|od| OdRecord {
                    s: od.origin.clone(),
                    t: od.destination.clone(),
                    demand: Some(text(&od.demand)),
                })
                .collect(),
        }
    }
}

/// Parses the file without normalising or validating it.
pub fn parse_raw<T: Scalar>(bytes: &[u8]) -> Result<RawNetwork<T>, NetworkError> {
    let file: NetworkFile = serde_json::from_slice(bytes)?;
    file.into_raw()
}

/// Parses, normalises and validates a network file.
pub fn load_network<T: Scalar>(bytes: &[u8]) -> Result<ChargingNetwork<T>, NetworkError> {
    ChargingNetwork::from_raw(parse_raw(bytes)?)
}

/// Serialises a network in the file format.
pub fn network_to_json<T: Scalar>(raw: &RawNetwork<T>) -> serde_json::Value {
    serde_json::to_value(NetworkFile::from_raw(raw)).expect("network file is always serialisable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    const EXAMPLE: &str = r#"{
        "L": "9", "thresholds": ["0", "5", "9"],
        "nodes": ["s", "i1", "i2", "t"],
        "edges": [
            {"tail": "s", "head": "i1", "d": "5", "ell": "5"},
            {"tail": "s", "head": "i2", "d": "4", "ell": "4"},
            {"tail": "i1", "head": "i2", "d": "6", "ell": "6"},
            {"tail": "i1", "head": "t", "d": "5", "ell": "5"},
            {"tail": "i2", "head": "t", "d": "6", "ell": "6"}
        ],
        "stations": [
            {"node": "i1", "chargers": 1, "speeds": ["2", "1"], "prices": ["0", "0"], "occupancy_price": "0"},
            {"node": "i2", "chargers": "1", "speeds": ["3", "2"], "prices": ["0", "0"], "occupancy_price": "0"}
        ],
        "od_pairs": [{"s": "s", "t": "t", "demand": "1"}]
    }"#;

    #[test]
    fn loads_example() {
        let net = load_network::<Rational>(EXAMPLE.as_bytes()).unwrap();
        assert_eq!(net.node_count(), 4);
        assert_eq!(net.edges().len(), 5);
        assert_eq!(net.curve().intervals(), 2);
        assert_eq!(net.stations()[1].speeds, vec![Rational::from_int(3), Rational::from_int(2)]);
    }

    #[test]
    fn float_mode_loads_too() {
        let net = load_network::<f64>(EXAMPLE.as_bytes()).unwrap();
        assert_eq!(net.battery(), &9.0);
    }

    #[test]
    fn missing_field_is_schema_error() {
        let broken = EXAMPLE.replace("\"ell\": \"5\"", "\"elll\": \"5\"");
        assert!(matches!(load_network::<Rational>(broken.as_bytes()), Err(NetworkError::Schema(_))));
    }

    #[test]
    fn bad_number_reports_location() {
        let broken = EXAMPLE.replace("\"d\": \"4\"", "\"d\": \"four\"");
        let err = load_network::<Rational>(broken.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "edges[1].d: cannot parse number \"four\"");
    }

    #[test]
    fn non_monotone_thresholds() {
        let broken = EXAMPLE.replace(r#"["0", "5", "9"]"#, r#"["0", "9", "5"]"#);
        let err = load_network::<Rational>(broken.as_bytes()).unwrap_err();
        assert!(matches!(err, NetworkError::Thresholds { .. }), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let raw = parse_raw::<Rational>(EXAMPLE.as_bytes()).unwrap();
        let text = serde_json::to_string(&network_to_json(&raw)).unwrap();
        assert_eq!(parse_raw::<Rational>(text.as_bytes()).unwrap(), raw);
    }
}
