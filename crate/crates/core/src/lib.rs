//! Charging-aware routing and flow for battery electric vehicles.
//!
//! Every algorithm is generic over [`Scalar`]: use the exact aliases
//! (`Exact*`) for reproducible answers and the `Float*` ones for speed.

pub mod augment;
pub mod capacitated;
pub mod closure;
pub mod error;
pub mod flow;
pub mod lp;
pub mod network;
pub mod oracle;
pub mod router;
pub mod scalar;
pub mod strategy;

pub use augment::{detect_unbounded, Augmentation, AugmentedGraph, AuxiliaryNetwork, LevelSets};
pub use capacitated::{partition_instance, pricing_oracle, solve_capacitated, CapacitatedSolution, ColumnGeneration, PricingCosts};
pub use closure::{check_assumption1, AssumptionCheck, Metric, MetricClosure, PathLength, Violation};
pub use error::NetworkError;
pub use flow::{solve_maxflow, solve_mincost, verify_flow, FlowError, FlowObjective, FlowSolution};
pub use network::schema::{load_network, network_to_json, parse_raw};
pub use network::{ChargingCurve, ChargingNetwork, Edge, EdgeId, NodeId, OdPair, RawNetwork, Station, StationId};
pub use oracle::{brute_flow, brute_single_opt, enumerate_strategies, OracleCaps};
pub use router::{route_single, Route, RouteError};
pub use scalar::{Rational, Scalar};
pub use strategy::{ChargingStrategy, FeasibilityError};

pub type ExactNetwork = ChargingNetwork<Rational>;
pub type FloatNetwork = ChargingNetwork<f64>;
pub type ExactStrategy = ChargingStrategy<Rational>;
pub type FloatStrategy = ChargingStrategy<f64>;
pub type ExactRoute = Route<Rational>;
pub type FloatRoute = Route<f64>;
pub type ExactFlow = FlowSolution<Rational>;
pub type FloatFlow = FlowSolution<f64>;
