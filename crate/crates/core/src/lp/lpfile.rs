//! CPLEX LP text format, for cross-checking with external solvers.

use std::fmt::Write;

use super::{LpProblem, Relation, Sense};
use crate::scalar::Scalar;

fn sanitize(name: &str, fallback: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.()[]".contains(c) { c } else { '_' })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E') {
        out = format!("{fallback}_{out}");
    }
    out
}

fn number<T: Scalar>(value: &T) -> String {
    let text = value.abs().render();
    if text.contains('/') {
        format!("{:.17e}", value.abs().to_f64_lossy())
    } else {
        text
    }
}

fn linear<T: Scalar>(terms: &[(usize, T)], names: &[String]) -> String {
    if terms.is_empty() {
        return "0 ".to_string() + &names.first().cloned().unwrap_or_else(|| "x".into());
    }
    let mut out = String::new();
    for (k, (v, c)) in terms.iter().enumerate() {
        let sign = if c.is_negative() { "-" } else if k == 0 { "" } else { "+" };
        if !out.is_empty() {
            out.push(' ');
        }
        if sign.is_empty() {
            let _ = write!(out, "{} {}", number(c), names[*v]);
        } else {
            let _ = write!(out, "{sign} {} {}", number(c), names[*v]);
        }
    }
    out
}

/// Renders the problem; names are sanitised and made unique per kind.
pub fn write_lp<T: Scalar>(lp: &LpProblem<T>) -> String {
    let names: Vec<String> = lp.variables.iter().enumerate().map(|(j, v)| format!("{}_{j}", sanitize(&v.name, "x"))).collect();
    let mut out = String::new();
    out.push_str(match lp.sense {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    let objective: Vec<(usize, T)> =
        lp.variables.iter().enumerate().filter(|(_, v)| !v.cost.is_zero()).map(|(j, v)| (j, v.cost.clone())).collect();
    let _ = writeln!(out, " obj: {}", linear(&objective, &names));
    out.push_str("Subject To\n");
    for (i, row) in lp.constraints.iter().enumerate() {
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let rhs = if row.rhs.is_negative() { format!("-{}", number(&row.rhs)) } else { number(&row.rhs) };
        let _ = writeln!(out, " {}_{i}: {} {rel} {rhs}", sanitize(&row.name, "c"), linear(&row.terms, &names));
    }
    let bounded: Vec<_> = lp.variables.iter().enumerate().filter_map(|(j, v)| v.upper.as_ref().map(|u| (j, u))).collect();
    if !bounded.is_empty() {
        out.push_str("Bounds\n");
        for (j, u) in bounded {
            let _ = writeln!(out, " 0 <= {} <= {}", names[j], number(u));
        }
    }
    out.push_str("End\n");
    out
}
