//! Combinatorial horoballs.
//!
//! `H(X)` has vertices `X × {0, 1, 2, …}`. Two vertices at the same height
//! `n` are joined when their base distance is positive and at most `bⁿ`,
//! and each vertex is joined to the ones directly above and below it.
//! Over `X = ℤ` distances have a closed form, computed here by a short
//! scan over the height at which a geodesic travels horizontally.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HoroParams {
    pub base_b: u32,
}

impl HoroParams {
    pub fn new(base_b: u32) -> Result<HoroParams> {
        if base_b < 2 {
            return Err(Error::InvalidConfig(format!("horoball base must be at least 2, got {base_b}")));
        }
        Ok(HoroParams { base_b })
    }

    /// `bⁿ`, the horizontal reach at height `n`.
    pub fn reach(&self, n: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.base_b), n as usize)
    }

    /// `bⁿ` as a machine integer, saturating.
    pub fn reach_u64(&self, n: u32) -> u64 {
        (self.base_b as u64).checked_pow(n).unwrap_or(u64::MAX)
    }

    /// Smallest `h` with `bʰ ≥ c`.
    pub fn ceil_log(&self, c: &BigInt) -> u32 {
        let mut h = 0;
        let mut power = BigInt::one();
        while &power < c {
            power *= self.base_b;
            h += 1;
        }
        h
    }
}

impl Default for HoroParams {
    fn default() -> Self {
        HoroParams { base_b: 2 }
    }
}

/// A vertex `(x, n)` of the horoball over ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoroPoint {
    pub x: BigInt,
    pub n: u32,
}

impl HoroPoint {
    pub fn new(x: impl Into<BigInt>, n: u32) -> HoroPoint {
        HoroPoint { x: x.into(), n }
    }
}

impl fmt::Display for HoroPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.n)
    }
}

#[derive(Serialize, Deserialize)]
struct HoroPointRepr {
    x: String,
    n: u32,
}

impl Serialize for HoroPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HoroPointRepr {
            x: self.x.to_string(),
            n: self.n,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HoroPoint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = HoroPointRepr::deserialize(de)?;
        let x = raw
            .x
            .parse::<BigInt>()
            .map_err(|e| serde::de::Error::custom(format!("bad horoball coordinate {:?}: {e}", raw.x)))?;
        Ok(HoroPoint { x, n: raw.n })
    }
}

/// A base graph the horoball can be built over.
pub trait BaseGraph {
    type Vertex: Clone + Eq + Hash + Ord;

    fn distance(&self, a: &Self::Vertex, b: &Self::Vertex) -> u64;

    /// Every vertex within `radius` of `center`, including `center`.
    fn ball(&self, center: &Self::Vertex, radius: u64) -> Vec<Self::Vertex>;
}

/// ℤ with its usual metric.
#[derive(Clone, Copy, Debug, Default)]
pub struct IntegerLine;

impl BaseGraph for IntegerLine {
    type Vertex = i64;

    fn distance(&self, a: &i64, b: &i64) -> u64 {
        a.abs_diff(*b)
    }

    fn ball(&self, center: &i64, radius: u64) -> Vec<i64> {
        let r = radius.min(i64::MAX as u64 / 4) as i64;
        (center.saturating_sub(r)..=center.saturating_add(r)).collect()
    }
}

/// Neighbours of `(x, n)` in `H(X)`.
pub fn horo_neighbors<G: BaseGraph>(
    x: &G::Vertex,
    n: u32,
    params: HoroParams,
    g: &G,
) -> Vec<(G::Vertex, u32)> {
    let reach = params.reach_u64(n);
    let mut out: Vec<(G::Vertex, u32)> = g
        .ball(x, reach)
        .into_iter()
        .filter(|y| y != x)
        .map(|y| (y, n))
        .collect();
    if n > 0 {
        out.push((x.clone(), n - 1));
    }
    out.push((x.clone(), n + 1));
    out
}

/// Neighbours of a point of `H(ℤ)`.
pub fn horo_neighbors_z(pt: &HoroPoint, params: HoroParams) -> Vec<HoroPoint> {
    let reach = params.reach(pt.n);
    let mut out = Vec::new();
    let mut k = BigInt::one();
    while k <= reach {
        out.push(HoroPoint::new(&pt.x - &k, pt.n));
        out.push(HoroPoint::new(&pt.x + &k, pt.n));
        k += 1;
    }
    if pt.n > 0 {
        out.push(HoroPoint::new(pt.x.clone(), pt.n - 1));
    }
    out.push(HoroPoint::new(pt.x.clone(), pt.n + 1));
    out
}

/// Whether two points of `H(ℤ)` span an edge.
pub fn is_horo_edge(a: &HoroPoint, b: &HoroPoint, params: HoroParams) -> bool {
    if a.x == b.x {
        return a.n.abs_diff(b.n) == 1;
    }
    a.n == b.n && (&a.x - &b.x).abs() <= params.reach(a.n)
}

/// Cost of the path that climbs to height `h`, crosses, and descends.
fn cost_at_height(delta: &BigInt, n1: u32, n2: u32, h: u32, params: HoroParams) -> BigInt {
    let vertical = BigInt::from(2 * h as u64 - n1 as u64 - n2 as u64);
    vertical + Integer::div_ceil(delta, &params.reach(h))
}

/// The optimal crossing height and the resulting distance.
///
/// A path whose highest point is at height `h` spends at least
/// `(h − n₁) + (h − n₂)` vertical steps and at least `⌈Δ/bʰ⌉` horizontal
/// ones, and the climb-cross-descend path achieves exactly that. Past the
/// first `h` with `bʰ ≥ Δ` the cost only grows, which bounds the scan.
fn optimal_height(p1: &HoroPoint, p2: &HoroPoint, params: HoroParams) -> (u32, BigInt) {
    let delta = (&p1.x - &p2.x).abs();
    let mut h = p1.n.max(p2.n);
    let mut best = (h, cost_at_height(&delta, p1.n, p2.n, h, params));
    while params.reach(h) < delta {
        h += 1;
        let c = cost_at_height(&delta, p1.n, p2.n, h, params);
        if c < best.1 {
            best = (h, c);
        }
    }
    best
}

/// Exact distance in `H(ℤ)`.
pub fn horo_distance_z(p1: &HoroPoint, p2: &HoroPoint, params: HoroParams) -> u64 {
    optimal_height(p1, p2, params)
        .1
        .to_u64()
        .expect("horoball distance exceeds u64")
}

/// The canonical geodesic: climb to the lowest optimal height, cross in
/// full steps of `bʰ` (remainder last), descend.
pub fn horo_geodesic_z(p1: &HoroPoint, p2: &HoroPoint, params: HoroParams) -> Vec<HoroPoint> {
    let (h, _) = optimal_height(p1, p2, params);
    let mut path = vec![p1.clone()];
    for n in (p1.n + 1)..=h {
        path.push(HoroPoint::new(p1.x.clone(), n));
    }
    let step = params.reach(h);
    let sign = if p2.x >= p1.x { BigInt::one() } else { -BigInt::one() };
    let mut x = p1.x.clone();
    while x != p2.x {
        let left = (&p2.x - &x).abs();
        x += &sign * left.min(step.clone());
        path.push(HoroPoint::new(x.clone(), h));
    }
    for n in (p2.n..h).rev() {
        path.push(HoroPoint::new(p2.x.clone(), n));
    }
    path
}

/// The preferred path: vertical, one horizontal edge, vertical.
///
/// The horizontal edge sits at `max(⌈log_b C⌉, n₁, n₂)` where `C` is the
/// base distance; equal bases give a plain vertical segment.
pub fn preferred_path(p1: &HoroPoint, p2: &HoroPoint, params: HoroParams) -> Vec<HoroPoint> {
    let c = (&p1.x - &p2.x).abs();
    let mut path = vec![p1.clone()];
    if c.is_zero() {
        if p2.n >= p1.n {
            path.extend((p1.n + 1..=p2.n).map(|n| HoroPoint::new(p1.x.clone(), n)));
        } else {
            path.extend((p2.n..p1.n).rev().map(|n| HoroPoint::new(p1.x.clone(), n)));
        }
        return path;
    }
    let top = params.ceil_log(&c).max(p1.n).max(p2.n);
    path.extend((p1.n + 1..=top).map(|n| HoroPoint::new(p1.x.clone(), n)));
    path.push(HoroPoint::new(p2.x.clone(), top));
    path.extend((p2.n..top).rev().map(|n| HoroPoint::new(p2.x.clone(), n)));
    path
}

/// Breadth-first distance in `H(X)`, or `None` if it exceeds `cap`.
pub fn horo_bfs_distance<G: BaseGraph>(
    p1: (&G::Vertex, u32),
    p2: (&G::Vertex, u32),
    params: HoroParams,
    g: &G,
    cap: u64,
) -> Option<u64> {
    let start = (p1.0.clone(), p1.1);
    let goal = (p2.0.clone(), p2.1);
    if start == goal {
        return Some(0);
    }
    // A path through height h costs at least (h − n₁) + (h − n₂).
    let max_height = ((cap + p1.1 as u64 + p2.1 as u64) / 2) as u32;
    let mut seen: HashMap<(G::Vertex, u32), u64> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone(), 0);
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        let dv = seen[&v];
        if dv >= cap {
            continue;
        }
        for w in horo_neighbors(&v.0, v.1, params, g) {
            if w.1 > max_height || seen.contains_key(&w) {
                continue;
            }
            if dv + 1 + (w.1.abs_diff(goal.1) as u64) > cap {
                continue;
            }
            if w == goal {
                return Some(dv + 1);
            }
            seen.insert(w.clone(), dv + 1);
            queue.push_back(w);
        }
    }
    None
}

/// Breadth-first distance between two points of `H(ℤ)` given as [`HoroPoint`]s.
pub fn horo_bfs_distance_z(p1: &HoroPoint, p2: &HoroPoint, params: HoroParams, cap: u64) -> Option<u64> {
    let x1 = p1.x.to_i64()?;
    let x2 = p2.x.to_i64()?;
    horo_bfs_distance((&x1, p1.n), (&x2, p2.n), params, &IntegerLine, cap)
}

/// All distances from one source inside the box `[lo, hi] × [0, max_height]`.
///
/// Each row keeps its unvisited positions in an ordered set so a
/// horizontal expansion removes a whole interval at once; the search is
/// linear in the box size up to a logarithm.
pub fn horo_box_bfs(
    source: (i64, u32),
    lo: i64,
    hi: i64,
    max_height: u32,
    params: HoroParams,
) -> Vec<Vec<u32>> {
    let width = (hi - lo + 1) as usize;
    let rows = max_height as usize + 1;
    let mut dist = vec![vec![u32::MAX; width]; rows];
    let mut unvisited: Vec<BTreeSet<i64>> = (0..rows).map(|_| (lo..=hi).collect()).collect();
    let mut queue = VecDeque::new();
    let visit = |x: i64, n: u32, d: u32, dist: &mut Vec<Vec<u32>>, unvisited: &mut Vec<BTreeSet<i64>>, queue: &mut VecDeque<(i64, u32)>| {
        if unvisited[n as usize].remove(&x) {
            dist[n as usize][(x - lo) as usize] = d;
            queue.push_back((x, n));
        }
    };
    visit(source.0, source.1, 0, &mut dist, &mut unvisited, &mut queue);
    while let Some((x, n)) = queue.pop_front() {
        let d = dist[n as usize][(x - lo) as usize] + 1;
        let reach = params.reach_u64(n).min((hi - lo) as u64) as i64;
        let row = &mut unvisited[n as usize];
        let found: Vec<i64> = row.range(x - reach..=x + reach).copied().collect();
        for y in found {
            row.remove(&y);
            dist[n as usize][(y - lo) as usize] = d;
            queue.push_back((y, n));
        }
        if n > 0 {
            visit(x, n - 1, d, &mut dist, &mut unvisited, &mut queue);
        }
        if n < max_height {
            visit(x, n + 1, d, &mut dist, &mut unvisited, &mut queue);
        }
    }
    dist
}

/// Four-point defect: half the gap between the largest and the middle of
/// the three pairwise distance sums.
pub fn four_point_defect(points: [&HoroPoint; 4], params: HoroParams) -> Ratio<u64> {
    let d = |i: usize, j: usize| horo_distance_z(points[i], points[j], params);
    let mut sums = [d(0, 1) + d(2, 3), d(0, 2) + d(1, 3), d(0, 3) + d(1, 2)];
    sums.sort_unstable();
    Ratio::new(sums[2] - sums[1], 2)
}

/// Largest four-point defect over seeded random quadruples from the box
/// `|x| ≤ radius`, `0 ≤ n ≤ height_cap`.
pub fn gromov_delta_sample(
    radius: u64,
    height_cap: u32,
    samples: usize,
    seed: u64,
    params: HoroParams,
) -> Ratio<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = radius as i64;
    let mut worst = Ratio::from_integer(0);
    for _ in 0..samples {
        let pts: Vec<HoroPoint> = (0..4)
            .map(|_| HoroPoint::new(rng.gen_range(-r..=r), rng.gen_range(0..=height_cap)))
            .collect();
        let defect = four_point_defect([&pts[0], &pts[1], &pts[2], &pts[3]], params);
        if defect > worst {
            worst = defect;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: i64, n: u32) -> HoroPoint {
        HoroPoint::new(x, n)
    }

    const B2: HoroParams = HoroParams { base_b: 2 };
    const B3: HoroParams = HoroParams { base_b: 3 };

    #[test]
    fn neighbor_examples() {
        let mut n = horo_neighbors_z(&pt(0, 0), B2);
        n.sort();
        assert_eq!(n, vec![pt(-1, 0), pt(0, 1), pt(1, 0)]);

        let n = horo_neighbors_z(&pt(0, 2), B2);
        assert_eq!(n.len(), 8 + 2);
        assert!(n.contains(&pt(4, 2)) && n.contains(&pt(-4, 2)) && !n.contains(&pt(5, 2)));
        assert!(n.contains(&pt(0, 1)) && n.contains(&pt(0, 3)));

        let n = horo_neighbors(&0i64, 1, B3, &IntegerLine);
        assert_eq!(n.len(), 6 + 2);
        assert!(n.contains(&(3, 1)) && n.contains(&(-3, 1)) && !n.contains(&(4, 1)));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(horo_distance_z(&pt(0, 0), &pt(0, 5), B2), 5);
        assert_eq!(horo_distance_z(&pt(7, 3), &pt(7, 3), B2), 0);
        assert_eq!(horo_bfs_distance_z(&pt(0, 0), &pt(0, 1), B2, 5), Some(1));
        assert_eq!(horo_bfs_distance_z(&pt(0, 0), &pt(1_000_000, 0), B2, 3), None);
    }

    #[test]
    fn preferred_path_examples() {
        let p = preferred_path(&pt(0, 0), &pt(16, 0), B2);
        assert_eq!(p.len() - 1, 9);
        assert_eq!(p[4], pt(0, 4));
        assert_eq!(p[5], pt(16, 4));

        let p = preferred_path(&pt(0, 3), &pt(1, 0), B2);
        assert_eq!(p, vec![pt(0, 3), pt(1, 3), pt(1, 2), pt(1, 1), pt(1, 0)]);

        let p = preferred_path(&pt(2, 5), &pt(2, 1), B2);
        assert_eq!(p.len(), 5);
    }

    #[test]
    fn geodesic_realizes_distance() {
        for (a, b) in [((0, 0), (16, 0)), ((-5, 3), (40, 1)), ((3, 2), (3, 7)), ((0, 0), (1, 0))] {
            let (p, q) = (pt(a.0, a.1), pt(b.0, b.1));
            let g = horo_geodesic_z(&p, &q, B2);
            assert_eq!(g.first(), Some(&p));
            assert_eq!(g.last(), Some(&q));
            assert_eq!(g.len() as u64 - 1, horo_distance_z(&p, &q, B2));
            assert!(g.windows(2).all(|w| is_horo_edge(&w[0], &w[1], B2)));
        }
    }

    #[test]
    fn box_bfs_agrees_with_generic_bfs() {
        let d = horo_box_bfs((0, 0), -20, 20, 10, B2);
        for x in [-20i64, -7, 0, 3, 20] {
            for n in [0u32, 2, 5] {
                let oracle = horo_bfs_distance((&0i64, 0), (&x, n), B2, &IntegerLine, 30).unwrap();
                assert_eq!(d[n as usize][(x + 20) as usize] as u64, oracle, "({x}, {n})");
            }
        }
    }

    #[test]
    fn degenerate_quadruple_has_zero_defect() {
        let p = pt(3, 2);
        assert_eq!(four_point_defect([&p, &p, &p, &p], B2), Ratio::from_integer(0));
    }

    #[test]
    fn json_round_trip() {
        let p = HoroPoint::new("123456789012345678901234567890".parse::<BigInt>().unwrap(), 4);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"x":"123456789012345678901234567890","n":4}"#);
        assert_eq!(serde_json::from_str::<HoroPoint>(&s).unwrap(), p);
    }

    proptest! {
        #[test]
        fn exact_distance_matches_bfs(x1 in -40i64..40, x2 in -40i64..40, n1 in 0u32..6, n2 in 0u32..6, b in 2u32..4) {
            let params = HoroParams { base_b: b };
            let exact = horo_distance_z(&pt(x1, n1), &pt(x2, n2), params);
            let bfs = horo_bfs_distance((&x1, n1), (&x2, n2), params, &IntegerLine, 24);
            prop_assert_eq!(Some(exact), bfs);
        }

        #[test]
        fn translation_invariance(x1 in -1000i64..1000, x2 in -1000i64..1000, n1 in 0u32..8, n2 in 0u32..8, c in -100_000i64..100_000) {
            prop_assert_eq!(
                horo_distance_z(&pt(x1, n1), &pt(x2, n2), B2),
                horo_distance_z(&pt(x1 + c, n1), &pt(x2 + c, n2), B2)
            );
        }

        #[test]
        fn preferred_path_is_edge_path(x1 in -300i64..300, x2 in -300i64..300, n1 in 0u32..9, n2 in 0u32..9) {
            let (p, q) = (pt(x1, n1), pt(x2, n2));
            let path = preferred_path(&p, &q, B2);
            prop_assert_eq!(path.first(), Some(&p));
            prop_assert_eq!(path.last(), Some(&q));
            prop_assert!(path.windows(2).all(|w| is_horo_edge(&w[0], &w[1], B2)));
        }

        #[test]
        fn metric_axioms(a in (-500i64..500, 0u32..8), b in (-500i64..500, 0u32..8), c in (-500i64..500, 0u32..8)) {
            let (a, b, c) = (pt(a.0, a.1), pt(b.0, b.1), pt(c.0, c.1));
            let d = |u: &HoroPoint, v: &HoroPoint| horo_distance_z(u, v, B3);
            prop_assert_eq!(d(&a, &b), d(&b, &a));
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
            prop_assert_eq!(d(&a, &b) == 0, a == b);
        }
    }
}
