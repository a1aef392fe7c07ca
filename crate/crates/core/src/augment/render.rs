//! DOT and JSON views of the auxiliary and augmented graphs.

use std::fmt::Write;

use serde_json::{json, Value};

use super::{AugNode, Augmentation, AuxNode, EdgeKind};
use crate::network::ChargingNetwork;
use crate::scalar::Scalar;

fn copy_label<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, copy: usize) -> (String, usize) {
    let (station, j) = aug.aux.copy(copy);
    (net.label(net.station(station).node).to_string(), j + 1)
}

fn aux_label<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, node: AuxNode) -> String {
    match node {
        AuxNode::Copy(c) => {
            let (label, j) = copy_label(net, aug, c);
            format!("({label},{j})")
        }
        AuxNode::Origin(k) => net.label(net.od_pairs()[k].origin).to_string(),
        AuxNode::Destination(k) => net.label(net.od_pairs()[k].destination).to_string(),
    }
}

/// `(i1,1,5)`, `(s,9)`, `(t,0)`.
pub fn node_label<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>, node: usize) -> String {
    let graph = &aug.graph;
    match graph.node(node) {
        AugNode::Level { copy, level } => {
            let (label, j) = copy_label(net, aug, *copy);
            format!("({label},{j},{})", level.render())
        }
        AugNode::Origin(k) => format!("({},{})", net.label(net.od_pairs()[*k].origin), graph.level(node).render()),
        AugNode::Destination(k) => format!("({},0)", net.label(net.od_pairs()[*k].destination)),
    }
}

fn quote(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn auxiliary_dot<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>) -> String {
    let mut out = String::from("digraph auxiliary {\n  rankdir=LR;\n");
    for e in aug.aux.edges() {
        let style = match (e.from, e.to) {
            (AuxNode::Copy(a), AuxNode::Copy(b)) if aug.aux.copy(a).0 == aug.aux.copy(b).0 => " style=dashed color=gray",
            _ => "",
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}/{}\"{style}];",
            quote(&aux_label(net, aug, e.from)),
            quote(&aux_label(net, aug, e.to)),
            e.d.render(),
            e.ell.render()
        );
    }
    out.push_str("}\n");
    out
}

pub fn auxiliary_json<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>) -> Value {
    let aux = &aug.aux;
    let copies: Vec<Value> = (0..aux.copy_count())
        .map(|c| {
            let (label, j) = copy_label(net, aug, c);
            json!({
                "id": aux_label(net, aug, AuxNode::Copy(c)),
                "node": label,
                "interval": j,
                "lower": aux.lower(c).render(),
                "upper": aux.upper(c).render(),
                "unit_cost": aux.unit_cost(c).map(|v| v.render()),
                "arrive": aug.sets.arrive[c].iter().map(|v| v.render()).collect::<Vec<_>>(),
                "depart": aug.sets.depart[c].iter().map(|v| v.render()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut nodes: Vec<String> = (0..aux.copy_count()).map(|c| aux_label(net, aug, AuxNode::Copy(c))).collect();
    for k in 0..net.od_pairs().len() {
        for node in [AuxNode::Origin(k), AuxNode::Destination(k)] {
            let label = aux_label(net, aug, node);
            if !nodes.contains(&label) {
                nodes.push(label);
            }
        }
    }
    let edges: Vec<Value> = aux
        .edges()
        .iter()
        .map(|e| {
            json!({
                "tail": aux_label(net, aug, e.from),
                "head": aux_label(net, aug, e.to),
                "d": e.d.render(),
                "ell": e.ell.render(),
            })
        })
        .collect();
    json!({
        "L": net.battery().render(),
        "thresholds": net.curve().thresholds().iter().map(|v| v.render()).collect::<Vec<_>>(),
        "nodes": nodes,
        "edges": edges,
        "copies": copies,
    })
}

/// Charging edges red, copy chains gray dashed, travel black.
pub fn augmented_dot<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>) -> String {
    let graph = &aug.graph;
    let mut out = String::from("digraph augmented {\n  rankdir=LR;\n  node [shape=box style=rounded];\n");
    for n in 0..graph.nodes().len() {
        let _ = writeln!(out, "  n{n} [label={}];", quote(&node_label(net, aug, n)));
    }
    for e in graph.edges() {
        let attrs = match e.kind {
            EdgeKind::Charge => format!("color=red label=\"+{}\"", e.lambda.render()),
            EdgeKind::Chain => "color=gray style=dashed".to_string(),
            EdgeKind::Travel => format!("color=black label=\"{}\"", e.d.render()),
        };
        let _ = writeln!(out, "  n{} -> n{} [{attrs}];", e.tail, e.head);
    }
    out.push_str("}\n");
    out
}

pub fn augmented_json<T: Scalar>(net: &ChargingNetwork<T>, aug: &Augmentation<T>) -> Value {
    let graph = &aug.graph;
    let nodes: Vec<Value> = (0..graph.nodes().len()).map(|n| Value::String(node_label(net, aug, n))).collect();
    let edges: Vec<Value> = graph
        .edges()
        .iter()
        .map(|e| {
            json!({
                "type": e.kind.roman(),
                "tail": node_label(net, aug, e.tail),
                "head": node_label(net, aug, e.head),
                "lambda": e.lambda.render(),
                "gamma": e.gamma.render(),
                "d": e.d.render(),
                "ell": e.ell.render(),
            })
        })
        .collect();
    json!({ "nodes": nodes, "edges": edges })
}
