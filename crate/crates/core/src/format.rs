//! Text output: fixed-precision floats, DOT and GraphML.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::farey::Slope;
use crate::hierarchy::Resolution;
use crate::horoball::HoroParams;
use crate::marking::{neighbors, AugmentedMarking};

/// Twelve significant digits, `%g` style: trailing zeros trimmed and
/// scientific notation outside `[1e-5, 1e12)`.
pub fn float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Markings within `radius` of `center`, with the edges between them.
pub fn ball(center: &AugmentedMarking, radius: u32, params: HoroParams) -> (Vec<AugmentedMarking>, Vec<(usize, usize)>) {
    let mut index: BTreeMap<AugmentedMarking, usize> = BTreeMap::new();
    let mut order = vec![*center];
    let mut dist = vec![0u32];
    index.insert(*center, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if dist[i] == radius {
            continue;
        }
        for n in neighbors(&order[i], params) {
            if let std::collections::btree_map::Entry::Vacant(e) = index.entry(n) {
                e.insert(order.len());
                order.push(n);
                dist.push(dist[i] + 1);
                queue.push_back(order.len() - 1);
            }
        }
    }
    let mut edges = Vec::new();
    for (i, m) in order.iter().enumerate() {
        for n in neighbors(m, params) {
            if let Some(&j) = index.get(&n) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    (order, edges)
}

fn slope_label(s: Slope) -> String {
    if s.is_infinity() {
        "1/0".into()
    } else {
        s.to_string()
    }
}

fn label(m: &AugmentedMarking) -> String {
    format!("{}:{}", slope_label(m.base), m.d)
}

pub fn ball_dot(nodes: &[AugmentedMarking], edges: &[(usize, usize)]) -> String {
    let mut s = String::from("graph am_ball {\n");
    for (i, m) in nodes.iter().enumerate() {
        let _ = writeln!(s, "  n{i} [label=\"{}\", transversal=\"{}\"];", label(m), slope_label(m.transversal));
    }
    for (a, b) in edges {
        let _ = writeln!(s, "  n{a} -- n{b};");
    }
    s.push_str("}\n");
    s
}

pub fn ball_graphml(nodes: &[AugmentedMarking], edges: &[(usize, usize)]) -> String {
    let mut s = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n\
         \x20 <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n\
         \x20 <key id=\"transversal\" for=\"node\" attr.name=\"transversal\" attr.type=\"string\"/>\n\
         \x20 <graph id=\"am_ball\" edgedefault=\"undirected\">\n",
    );
    for (i, m) in nodes.iter().enumerate() {
        let _ = writeln!(
            s,
            "    <node id=\"n{i}\"><data key=\"label\">{}</data><data key=\"transversal\">{}</data></node>",
            label(m),
            slope_label(m.transversal)
        );
    }
    for (k, (a, b)) in edges.iter().enumerate() {
        let _ = writeln!(s, "    <edge id=\"e{k}\" source=\"n{a}\" target=\"n{b}\"/>");
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

/// The slice-transition graph of a resolution, labelled by compatible markings.
pub fn resolution_dot(res: &Resolution, markings: &[AugmentedMarking]) -> String {
    let mut s = String::from("digraph resolution {\n");
    for (i, (slice, m)) in res.slices.iter().zip(markings).enumerate() {
        let _ = writeln!(s, "  s{i} [label=\"{}\", slice=\"{}\"];", label(m), slice);
    }
    for (i, mv) in res.moves.iter().enumerate() {
        let _ = writeln!(s, "  s{i} -> s{} [geodesic=\"{}\"];", i + 1, mv.geodesic);
    }
    s.push_str("}\n");
    s
}
