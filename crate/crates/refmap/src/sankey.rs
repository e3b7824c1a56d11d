//! Sankey emitters for [`FlowGraph`]s: a canonical JSON listing and a static
//! three-column SVG.

use std::collections::BTreeMap;
use std::fmt::Write;

use refmap_core::ecomap::{FlowGraph, NodeKind};

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 30.0;
const NODE_W: f64 = 14.0;
const GAP: f64 = 10.0;
const COLUMN_X: [f64; 3] = [200.0, 473.0, 746.0];

/// Nodes ordered by kind, descending weight, id; one trailing newline.
pub fn to_json(graph: &FlowGraph) -> Vec<u8> {
    let canonical = graph.clone().into_canonical();
    let mut out = serde_json::to_vec_pretty(&canonical).expect("graph serializes");
    out.push(b'\n');
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn fill(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Funder => "#2b6c9e",
        NodeKind::Org => "#5f8f55",
        NodeKind::OtherOrg => "#8c8c8c",
        NodeKind::UnknownOrg => "#b5b5b5",
        NodeKind::Memo => "#7a3b69",
    }
}

struct Placed {
    x: f64,
    y: f64,
    h: f64,
    out_cursor: f64,
    in_cursor: f64,
}

/// Pixels per unit of weight, chosen so the busiest column fits.
pub fn scale(graph: &FlowGraph) -> f64 {
    let tp = graph.throughput();
    let mut totals = [0.0f64; 3];
    let mut counts = [0usize; 3];
    for n in &graph.nodes {
        let c = n.kind.column();
        totals[c] += tp[n.id.as_str()];
        counts[c] += 1;
    }
    (0..3)
        .filter(|&c| totals[c] > 0.0)
        .map(|c| (HEIGHT - 2.0 * MARGIN - GAP * counts[c].saturating_sub(1) as f64) / totals[c])
        .fold(f64::INFINITY, f64::min)
}

/// Ribbon thickness is `weight * data-px-per-unit`; each ribbon carries its
/// weight and thickness as data attributes.
pub fn to_svg(graph: &FlowGraph) -> Vec<u8> {
    let graph = graph.clone().into_canonical();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}""#
    );
    if graph.is_empty() {
        s.push_str(" data-px-per-unit=\"0\">\n</svg>\n");
        return s.into_bytes();
    }
    let k = scale(&graph);
    let _ = writeln!(
        s,
        r#" data-px-per-unit="{k:.6}" font-family="sans-serif" font-size="11">"#
    );

    let tp = graph.throughput();
    let mut placed: BTreeMap<&str, Placed> = BTreeMap::new();
    let mut next_y = [MARGIN; 3];
    for n in &graph.nodes {
        let c = n.kind.column();
        let h = tp[n.id.as_str()] * k;
        placed.insert(
            &n.id,
            Placed {
                x: COLUMN_X[c],
                y: next_y[c],
                h,
                out_cursor: 0.0,
                in_cursor: 0.0,
            },
        );
        next_y[c] += h + GAP;
    }

    s.push_str("<g class=\"ribbons\" fill=\"#9aa5b1\" fill-opacity=\"0.5\">\n");
    for e in &graph.edges {
        let t = e.weight * k;
        let (x0, y0) = {
            let p = placed.get_mut(e.src.as_str()).expect("edge source is a node");
            let y = p.y + p.out_cursor;
            p.out_cursor += t;
            (p.x + NODE_W, y)
        };
        let (x1, y1) = {
            let p = placed.get_mut(e.dst.as_str()).expect("edge target is a node");
            let y = p.y + p.in_cursor;
            p.in_cursor += t;
            (p.x, y)
        };
        let xm = (x0 + x1) / 2.0;
        let _ = writeln!(
            s,
            r#"<path data-src="{}" data-dst="{}" data-weight="{}" data-thickness="{t:.3}" d="M{x0:.3},{y0:.3} C{xm:.3},{y0:.3} {xm:.3},{y1:.3} {x1:.3},{y1:.3} L{x1:.3},{:.3} C{xm:.3},{:.3} {xm:.3},{:.3} {x0:.3},{:.3} Z"/>"#,
            escape(&e.src),
            escape(&e.dst),
            e.weight,
            y1 + t,
            y1 + t,
            y0 + t,
            y0 + t,
        );
    }
    s.push_str("</g>\n<g class=\"nodes\">\n");
    for n in &graph.nodes {
        let p = &placed[n.id.as_str()];
        let _ = writeln!(
            s,
            r#"<rect data-id="{}" x="{:.3}" y="{:.3}" width="{NODE_W}" height="{:.3}" fill="{}"/>"#,
            escape(&n.id),
            p.x,
            p.y,
            p.h,
            fill(n.kind)
        );
        let (tx, anchor) = if n.kind == NodeKind::Funder {
            (p.x - 4.0, "end")
        } else {
            (p.x + NODE_W + 4.0, "start")
        };
        let _ = writeln!(
            s,
            r#"<text x="{tx:.3}" y="{:.3}" text-anchor="{anchor}" dominant-baseline="middle">{}</text>"#,
            p.y + p.h / 2.0,
            escape(&n.label)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s.into_bytes()
}
