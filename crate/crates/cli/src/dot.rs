//! Deterministic DOT renderings: plain graphs, ray bundles with one color
//! per ray, and minor models with one color per branch set.

use std::collections::BTreeMap;
use thicket_core::builder::MinorModel;
use thicket_core::families::Window;
use thicket_core::rays::RayBundle;
use thicket_core::{FiniteGraph, VertexId};

/// Fill colors cycled by index; chosen to stay distinguishable in print.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

fn quoted(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

fn render(g: &FiniteGraph, name: &str, fill: &BTreeMap<VertexId, usize>) -> String {
    let mut out = String::new();
    out.push_str("graph ");
    out.push_str(&quoted(name));
    out.push_str(" {\n  node [shape=circle fontsize=10];\n");
    for &v in g.vertices() {
        let label = match g.label(v) {
            Some(text) => text.to_string(),
            None => v.to_string(),
        };
        out.push_str("  ");
        out.push_str(&v.to_string());
        out.push_str(" [label=");
        out.push_str(&quoted(&label));
        if let Some(&idx) = fill.get(&v) {
            out.push_str(" style=filled fillcolor=");
            out.push_str(&quoted(PALETTE[idx % PALETTE.len()]));
        }
        out.push_str("];\n");
    }
    for &(u, v) in g.edges() {
        out.push_str("  ");
        out.push_str(&u.to_string());
        out.push_str(" -- ");
        out.push_str(&v.to_string());
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

pub fn graph_dot(g: &FiniteGraph, name: &str) -> String {
    render(g, name, &BTreeMap::new())
}

/// The window with every ray's vertices filled in that ray's color.
pub fn bundle_dot(w: &Window, bundle: &RayBundle) -> String {
    let mut fill = BTreeMap::new();
    for (i, ray) in bundle.rays.iter().enumerate() {
        for &v in ray.vertices() {
            fill.insert(v, i);
        }
    }
    render(&w.graph, &w.family.id_string(), &fill)
}

/// The host with every branch set filled in its own color.
pub fn model_dot(model: &MinorModel) -> String {
    let mut fill = BTreeMap::new();
    for (i, set) in model.branch_sets.values().enumerate() {
        for &v in set {
            fill.insert(v, i);
        }
    }
    render(&model.host, "minor-model", &fill)
}
