//! Augmented markings and the augmented marking graph.
//!
//! At complexity four a complete marking is a base curve with one
//! transversal Farey-adjacent to it; the augmentation adds a length datum
//! `d ≥ 0` measuring how short the base is. Edges come in three kinds:
//! flips (only in the thick part), twists about the base, and vertical
//! moves changing `d` by one.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::{
    act, adjacent, annular_coordinate, farey_distance, farey_geodesic, transversal_with_coordinate,
    twist_about, MappingClass, Slope, SurfaceKind,
};
use crate::horoball::{horo_distance_z, HoroParams, HoroPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MarkingRepr")]
pub struct AugmentedMarking {
    pub kind: SurfaceKind,
    pub base: Slope,
    pub transversal: Slope,
    pub d: u32,
}

#[derive(Deserialize)]
struct MarkingRepr {
    kind: SurfaceKind,
    base: Slope,
    transversal: Slope,
    d: u32,
}

impl TryFrom<MarkingRepr> for AugmentedMarking {
    type Error = Error;

    fn try_from(r: MarkingRepr) -> Result<Self> {
        AugmentedMarking::new(r.kind, r.base, r.transversal, r.d)
    }
}

impl AugmentedMarking {
    pub fn new(kind: SurfaceKind, base: Slope, transversal: Slope, d: u32) -> Result<AugmentedMarking> {
        if !adjacent(base, transversal) {
            return Err(Error::InvalidMarking(format!(
                "transversal {transversal} is not adjacent to base {base}"
            )));
        }
        Ok(AugmentedMarking {
            kind,
            base,
            transversal,
            d,
        })
    }

    /// Torus marking with the reference transversal (twist coordinate 0).
    pub fn standard(base: Slope, d: u32) -> AugmentedMarking {
        AugmentedMarking {
            kind: SurfaceKind::OncePuncturedTorus,
            base,
            transversal: transversal_with_coordinate(base, 0).expect("reference transversal"),
            d,
        }
    }

    /// Twist coordinate of the transversal about the base.
    pub fn twist(&self) -> i128 {
        annular_coordinate(self.base, self.transversal).expect("transversal meets base")
    }
}

impl fmt::Display for AugmentedMarking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {} t={} d={}]", self.kind, self.base, self.transversal, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementaryMove {
    Flip,
    Twist(i64),
    Vertical(i8),
}

impl ElementaryMove {
    pub fn inverse(&self) -> ElementaryMove {
        match *self {
            ElementaryMove::Flip => ElementaryMove::Flip,
            ElementaryMove::Twist(n) => ElementaryMove::Twist(-n),
            ElementaryMove::Vertical(s) => ElementaryMove::Vertical(-s),
        }
    }
}

/// Largest twist power allowed at length datum `d`.
fn max_twist(d: u32, params: HoroParams) -> i64 {
    if d == 0 {
        1
    } else {
        params.reach_u64(d).min(i64::MAX as u64) as i64 - 1
    }
}

pub fn is_legal(m: &AugmentedMarking, mv: ElementaryMove, params: HoroParams) -> bool {
    match mv {
        ElementaryMove::Flip => m.d == 0,
        ElementaryMove::Twist(n) => n != 0 && n.unsigned_abs() <= max_twist(m.d, params) as u64,
        ElementaryMove::Vertical(1) => true,
        ElementaryMove::Vertical(-1) => m.d > 0,
        ElementaryMove::Vertical(_) => false,
    }
}

/// Legal moves from `m`, in a fixed order.
pub fn legal_moves(m: &AugmentedMarking, params: HoroParams) -> Vec<ElementaryMove> {
    let mut out = Vec::new();
    if m.d == 0 {
        out.push(ElementaryMove::Flip);
    }
    let t = max_twist(m.d, params);
    out.extend((-t..=-1).map(ElementaryMove::Twist));
    out.extend((1..=t).map(ElementaryMove::Twist));
    if m.d > 0 {
        out.push(ElementaryMove::Vertical(-1));
    }
    out.push(ElementaryMove::Vertical(1));
    out
}

pub fn apply_move(m: &AugmentedMarking, mv: ElementaryMove, params: HoroParams) -> Result<AugmentedMarking> {
    if !is_legal(m, mv, params) {
        return Err(Error::IllegalMove(format!("{mv:?} from {m}")));
    }
    let mut out = *m;
    match mv {
        ElementaryMove::Flip => {
            out.base = m.transversal;
            out.transversal = m.base;
        }
        ElementaryMove::Twist(n) => out.transversal = act(&twist_about(m.base, n), m.transversal),
        ElementaryMove::Vertical(s) => out.d = (m.d as i64 + s as i64) as u32,
    }
    Ok(out)
}

pub fn neighbors(m: &AugmentedMarking, params: HoroParams) -> Vec<AugmentedMarking> {
    legal_moves(m, params)
        .into_iter()
        .map(|mv| apply_move(m, mv, params).expect("move listed as legal"))
        .collect()
}

/// Number of neighbours of a marking with length datum `d`.
pub fn degree(d: u32, params: HoroParams) -> u64 {
    let flip = u64::from(d == 0);
    let vertical = if d > 0 { 2 } else { 1 };
    flip + 2 * max_twist(d, params) as u64 + vertical
}

pub fn mcg_act(g: &MappingClass, m: &AugmentedMarking) -> AugmentedMarking {
    AugmentedMarking {
        kind: m.kind,
        base: act(g, m.base),
        transversal: act(g, m.transversal),
        d: m.d,
    }
}

/// Highest length datum a path of length at most `cap` can visit.
///
/// Reaching height `h` costs `(h − d₁) + (h − d₂)` vertical moves.
pub fn sound_height_cap(m1: &AugmentedMarking, m2: &AugmentedMarking, cap: u32) -> u32 {
    (cap + m1.d + m2.d) / 2
}

/// Exact distance in the augmented marking graph if it is at most `cap`.
///
/// Bidirectional breadth-first search restricted to length data at most
/// `d_cap` (default [`sound_height_cap`], which loses nothing).
pub fn bfs_distance(
    m1: &AugmentedMarking,
    m2: &AugmentedMarking,
    params: HoroParams,
    cap: u32,
    d_cap: Option<u32>,
) -> Option<u32> {
    if m1.kind != m2.kind {
        return None;
    }
    if m1 == m2 {
        return Some(0);
    }
    let d_cap = d_cap.unwrap_or_else(|| sound_height_cap(m1, m2, cap));
    if m1.d > d_cap || m2.d > d_cap {
        return None;
    }
    let mut sides: [HashMap<AugmentedMarking, u32>; 2] = [HashMap::new(), HashMap::new()];
    let mut frontiers = [vec![*m1], vec![*m2]];
    let mut depth = [0u32, 0u32];
    sides[0].insert(*m1, 0);
    sides[1].insert(*m2, 0);
    while depth[0] + depth[1] < cap {
        if frontiers[0].is_empty() || frontiers[1].is_empty() {
            return None;
        }
        let s = if frontiers[0].len() <= frontiers[1].len() { 0 } else { 1 };
        let o = 1 - s;
        let mut next = Vec::new();
        let mut best: Option<u32> = None;
        for m in std::mem::take(&mut frontiers[s]) {
            for n in neighbors(&m, params) {
                if n.d > d_cap || sides[s].contains_key(&n) {
                    continue;
                }
                if let Some(&other) = sides[o].get(&n) {
                    let total = depth[s] + 1 + other;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                sides[s].insert(n, depth[s] + 1);
                next.push(n);
            }
        }
        depth[s] += 1;
        if let Some(b) = best {
            return (b <= cap).then_some(b);
        }
        frontiers[s] = next;
    }
    None
}

/// Projection of a marking to the horoball over the annulus about `alpha`.
///
/// When `alpha` is the base, the transversal's twist and the length datum
/// give the point; otherwise the base lands at height zero.
pub fn project_to_annulus(m: &AugmentedMarking, alpha: Slope) -> HoroPoint {
    if alpha == m.base {
        HoroPoint::new(annular_coordinate(alpha, m.transversal).expect("transversal meets base"), m.d)
    } else {
        HoroPoint::new(annular_coordinate(alpha, m.base).expect("distinct slopes intersect"), 0)
    }
}

pub fn project_to_surface(m: &AugmentedMarking) -> Slope {
    m.base
}

/// Distance in the annular horoball about `alpha` between two markings.
pub fn annular_projection_distance(
    m1: &AugmentedMarking,
    m2: &AugmentedMarking,
    alpha: Slope,
    params: HoroParams,
) -> u64 {
    horo_distance_z(&project_to_annulus(m1, alpha), &project_to_annulus(m2, alpha), params)
}

fn threshold(x: u64, k: u64) -> u64 {
    if x > k {
        x
    } else {
        0
    }
}

/// The distance-formula sum with cutoff `k`.
///
/// Annuli whose cores are not on the canonical Farey geodesic between the
/// bases see both markings within bounded distance, so only geodesic
/// vertices are summed.
pub fn distance_formula_estimate(m1: &AugmentedMarking, m2: &AugmentedMarking, k: u64, params: HoroParams) -> u64 {
    let whole = threshold(farey_distance(m1.base, m2.base) as u64, k);
    let annular: u64 = farey_geodesic(m1.base, m2.base)
        .into_iter()
        .map(|alpha| threshold(annular_projection_distance(m1, m2, alpha, params), k))
        .sum();
    whole + annular
}

/// Largest horoball distance between projections of the given curves to
/// the annulus about `alpha` (all at height zero).
pub fn projection_diameter(curves: &[Slope], alpha: Slope, params: HoroParams) -> u64 {
    let pts: Vec<HoroPoint> = curves
        .iter()
        .filter(|c| **c != alpha)
        .map(|c| HoroPoint::new(annular_coordinate(alpha, *c).expect("distinct slopes"), 0))
        .collect();
    let mut worst = 0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            worst = worst.max(horo_distance_z(p, q, params));
        }
    }
    worst
}
