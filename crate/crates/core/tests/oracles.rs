//! Cross-checks against independent brute-force oracles, with the
//! resulting values frozen.

use std::collections::{HashMap, HashSet, VecDeque};

use num_integer::Integer;
use proptest::prelude::*;
use rand::Rng;

use augmark::experiment::{item_rng, random_marking, random_walk, MarkingSampler};
use augmark::farey::{
    act, adjacent, annular_distance, farey_distance, farey_geodesic, intersection, twist_about, twist_coord, MappingClass, Slope, SurfaceKind,
};
use augmark::hierarchy::{build_hierarchy, resolve, total_size, validate_resolution};
use augmark::horoball::{horo_bfs_distance_z, horo_box_bfs, horo_distance_z, HoroParams, HoroPoint};
use augmark::marking::{bfs_distance, degree, legal_moves, mcg_act, neighbors, project_to_annulus, sound_height_cap, AugmentedMarking};
use augmark::teich::{embed, kerckhoff_lower_bound, shortest_augmented_marking, teich_distance, TeichParams, TeichPoint};

const B2: HoroParams = HoroParams { base_b: 2 };
const TORUS: SurfaceKind = SurfaceKind::OncePuncturedTorus;

fn s(p: i64, q: i64) -> Slope {
    Slope::new(p, q).unwrap()
}

fn slope_ball(r: i64) -> Vec<Slope> {
    let mut out = vec![Slope::INFINITY];
    for q in 1..=r {
        for p in -r..=r {
            if p.gcd(&q) == 1 {
                out.push(s(p, q));
            }
        }
    }
    out
}

fn farey_adjacency(ball: &[Slope]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); ball.len()];
    for i in 0..ball.len() {
        for j in i + 1..ball.len() {
            if adjacent(ball[i], ball[j]) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    adj
}

/// Breadth-first distances from `from` in the Farey graph restricted to a ball.
fn farey_ball_bfs(adj: &[Vec<usize>], from: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[test]
fn farey_distance_matches_ball_bfs() {
    let ball = slope_ball(64);
    let adj = farey_adjacency(&ball);
    let index: HashMap<Slope, usize> = ball.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let from_zero = farey_ball_bfs(&adj, index[&Slope::ZERO]);
    assert_eq!(from_zero[index[&s(5, 8)]], 3);
    assert_eq!(farey_distance(Slope::ZERO, s(5, 8)), 3);
    let path = farey_geodesic(Slope::ZERO, s(5, 8));
    assert_eq!(path.len(), 4);
    assert!(path.windows(2).all(|w| adjacent(w[0], w[1])));

    for a in slope_ball(5) {
        let dist = farey_ball_bfs(&adj, index[&a]);
        for b in slope_ball(16) {
            assert_eq!(farey_distance(a, b), dist[index[&b]], "{a} -> {b}");
        }
    }
}

#[test]
fn farey_metric_on_ball() {
    let ball = slope_ball(32);
    let n = ball.len();
    let d: Vec<Vec<u8>> = ball.iter().map(|a| ball.iter().map(|b| farey_distance(*a, *b) as u8).collect()).collect();
    for i in 0..n {
        assert_eq!(d[i][i], 0);
        for j in 0..n {
            assert_eq!(d[i][j], d[j][i]);
            assert_eq!(d[i][j] == 0, i == j);
            assert_eq!(intersection(ball[i], ball[j], TORUS), intersection(ball[j], ball[i], TORUS));
            assert_eq!(intersection(ball[i], ball[j], TORUS) == 0, i == j);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let dij = d[i][j];
            assert!(d[j].iter().zip(&d[i]).all(|(djk, dik)| *dik <= dij + djk));
        }
    }
}

fn random_sl2<R: Rng>(rng: &mut R, bound: i64) -> MappingClass {
    loop {
        let (a, c) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        let g = a.extended_gcd(&c);
        if g.gcd != 1 {
            continue;
        }
        // a·x + c·y = 1, so [[a, -y], [c, x]] has determinant 1.
        let (b, d) = (-g.y, g.x);
        if b.abs() <= bound && d.abs() <= bound {
            return MappingClass::new(a, b, c, d).unwrap();
        }
    }
}

#[test]
fn farey_distance_is_mcg_invariant() {
    let mut rng = item_rng(1, 0);
    let ball = slope_ball(10);
    for _ in 0..100 {
        let g = random_sl2(&mut rng, 50);
        for _ in 0..20 {
            let a = ball[rng.gen_range(0..ball.len())];
            let b = ball[rng.gen_range(0..ball.len())];
            assert_eq!(farey_distance(act(&g, a), act(&g, b)), farey_distance(a, b));
        }
    }
}

/// Twist coordinate read off any matrix that sends `alpha` to infinity.
fn matrix_coordinate(alpha: Slope, beta: Slope) -> i64 {
    for c in -10i64..=10 {
        for d in -10i64..=10 {
            if c * alpha.p() + d * alpha.q() != 0 || c.gcd(&d) != 1 {
                continue;
            }
            let e = d.extended_gcd(&(-c));
            let (a, b) = (e.x, e.y);
            let num = a * beta.p() + b * beta.q();
            let den = c * beta.p() + d * beta.q();
            return Integer::div_floor(&num, &den);
        }
    }
    unreachable!("small normalizing matrix exists for small slopes")
}

#[test]
fn twist_coordinates_match_matrix_oracle() {
    assert_eq!(twist_coord(Slope::ZERO, Slope::INFINITY, s(1, 1)).unwrap(), 1);
    assert_eq!(annular_distance(Slope::ZERO, Slope::INFINITY, s(5, 1)).unwrap(), 1);

    let ball = slope_ball(6);
    for &alpha in &ball {
        for &b in &ball {
            for &r in &ball {
                if b == alpha || r == alpha {
                    continue;
                }
                let oracle = matrix_coordinate(alpha, b) - matrix_coordinate(alpha, r);
                assert_eq!(twist_coord(alpha, b, r).unwrap(), oracle as i128, "{alpha} {b} {r}");
            }
        }
    }
}

#[test]
fn projection_example() {
    let m = AugmentedMarking::new(TORUS, Slope::INFINITY, Slope::ZERO, 5).unwrap();
    assert_eq!(project_to_annulus(&m, Slope::INFINITY), HoroPoint::new(0, 5));
    assert_eq!(project_to_annulus(&m, Slope::ZERO), HoroPoint::new(0, 0));
}

#[test]
fn horoball_example_matches_bfs() {
    let (p, q) = (HoroPoint::new(0, 0), HoroPoint::new(16, 0));
    let dist = horo_box_bfs((0, 0), -64, 64, 10, B2);
    assert_eq!(dist[0][(16 + 64) as usize], 8);
    assert_eq!(horo_distance_z(&p, &q, B2), 8);
    assert_eq!(horo_bfs_distance_z(&p, &q, B2, 20), Some(8));
    let scan = (0..6).map(|h| 2 * h + 16u64.div_ceil(1 << h)).min().unwrap();
    assert_eq!(scan, 8);
}

#[test]
fn degree_matches_enumeration() {
    for b in [2u32, 3] {
        let params = HoroParams { base_b: b };
        for d in 0..=6 {
            let m = AugmentedMarking::standard(s(2, 5), d);
            let moves = legal_moves(&m, params).len() as u64;
            let formula = u64::from(d == 0) + 2 * if d > 0 { (b as u64).pow(d) - 1 } else { 1 } + if d > 0 { 2 } else { 1 };
            assert_eq!(moves, formula);
            assert_eq!(degree(d, params), formula);
        }
    }
}

/// Plain one-sided breadth-first search, no height restriction beyond `max_d`.
fn oracle_distance(m1: &AugmentedMarking, m2: &AugmentedMarking, cap: u32, max_d: u32) -> Option<u32> {
    let mut seen = HashSet::from([*m1]);
    let mut layer = vec![*m1];
    for depth in 0..=cap {
        if layer.contains(m2) {
            return Some(depth);
        }
        let mut next = Vec::new();
        for m in &layer {
            for n in neighbors(m, B2) {
                if n.d <= max_d && seen.insert(n) {
                    next.push(n);
                }
            }
        }
        layer = next;
    }
    None
}

#[test]
fn deep_twist_example() {
    let m1 = AugmentedMarking::new(TORUS, Slope::ZERO, Slope::INFINITY, 0).unwrap();
    let t8 = act(&twist_about(Slope::ZERO, 8), Slope::INFINITY);
    let m2 = AugmentedMarking::new(TORUS, Slope::ZERO, t8, 0).unwrap();
    let d = bfs_distance(&m1, &m2, B2, 12, Some(6));
    assert_eq!(d, Some(7));
    assert_eq!(d, oracle_distance(&m1, &m2, 12, 12));
    // The horoball climbs 2, crosses twice and descends 2; twists at
    // height 2 stop at 3, so the marking graph needs one more step.
    assert_eq!(horo_distance_z(&HoroPoint::new(0, 0), &HoroPoint::new(8, 0), B2), 6);
}

fn nearby_pairs(count: u64, steps: u32) -> Vec<(AugmentedMarking, AugmentedMarking)> {
    let sampler = MarkingSampler {
        slope_radius: 10,
        twist_range: 10,
        max_d: 3,
    };
    (0..count)
        .map(|i| {
            let mut rng = item_rng(7, i);
            let m1 = random_marking(&mut rng, &sampler);
            let k = rng.gen_range(0..=steps);
            (m1, random_walk(&mut rng, &m1, k, 3, B2))
        })
        .collect()
}

#[test]
fn bidirectional_bfs_matches_oracle() {
    for (m1, m2) in nearby_pairs(60, 6) {
        let cap = 6;
        let expected = oracle_distance(&m1, &m2, cap, m1.d.max(m2.d) + cap);
        assert_eq!(bfs_distance(&m1, &m2, B2, cap, None), expected, "{m1} {m2}");
    }
}

#[test]
fn raising_height_cap_changes_nothing() {
    for (m1, m2) in nearby_pairs(100, 10) {
        let base = sound_height_cap(&m1, &m2, 10);
        let d = bfs_distance(&m1, &m2, B2, 10, None);
        assert!(d.is_some());
        assert_eq!(bfs_distance(&m1, &m2, B2, 10, Some(base + 2)), d);
        assert_eq!(bfs_distance(&m1, &m2, B2, 10, Some(m1.d.max(m2.d) + 10)), d);
    }
}

#[test]
fn bfs_distance_is_mcg_invariant() {
    let mut rng = item_rng(3, 0);
    for (m1, m2) in nearby_pairs(40, 8) {
        let g = random_sl2(&mut rng, 20);
        assert_eq!(bfs_distance(&mcg_act(&g, &m1), &mcg_act(&g, &m2), B2, 8, None), bfs_distance(&m1, &m2, B2, 8, None));
    }
}

#[test]
fn interior_annuli_span_neighbor_projections() {
    let m1 = AugmentedMarking::standard(Slope::ZERO, 1);
    let m2 = AugmentedMarking::standard(s(5, 8), 2);
    let h = build_hierarchy(&m1, &m2, B2).unwrap();
    let path = farey_geodesic(Slope::ZERO, s(5, 8));
    for i in 1..path.len() - 1 {
        let alpha = path[i];
        let g = h.annular_at(h.main.first() + i).unwrap();
        let before = HoroPoint::new(augmark::farey::annular_coordinate(alpha, path[i - 1]).unwrap(), 0);
        let after = HoroPoint::new(augmark::farey::annular_coordinate(alpha, path[i + 1]).unwrap(), 0);
        assert_eq!(g.size() as u64, horo_distance_z(&before, &after, B2));
    }
}

#[test]
fn resolution_length_bounded_by_size() {
    let sampler = MarkingSampler {
        slope_radius: 30,
        twist_range: 100,
        max_d: 5,
    };
    for i in 0..200 {
        let mut rng = item_rng(11, i);
        let (m1, m2) = (random_marking(&mut rng, &sampler), random_marking(&mut rng, &sampler));
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        let res = resolve(&h);
        validate_resolution(&h, &res).unwrap();
        assert!(res.len() <= total_size(&h));
    }
}

#[test]
fn shortest_marking_at_thin_square_torus() {
    let tp = TeichParams::default();
    let m = shortest_augmented_marking(TeichPoint::new(0.0, 32.0).unwrap(), tp);
    assert_eq!(m, AugmentedMarking::new(TORUS, Slope::INFINITY, Slope::ZERO, 2).unwrap());
}

#[test]
fn kerckhoff_sweep_is_monotone() {
    let tp = TeichParams::default();
    let (z1, z2) = (TeichPoint::new(0.0, 1.0).unwrap(), TeichPoint::new(1.0, 2.0).unwrap());
    let dt = teich_distance(z1, z2, tp);
    let mut last = 0.0;
    for r in [1, 2, 4, 8, 16] {
        let k = kerckhoff_lower_bound(z1, z2, &slope_ball(r), tp);
        assert!(k >= last && k <= dt + 1e-9);
        last = k;
    }
    assert!(last >= 0.95 * dt);
}

#[test]
fn teich_metric_axioms() {
    let tp = TeichParams::default();
    let mut rng = item_rng(1, 0);
    for _ in 0..10_000 {
        let mut pt = || TeichPoint::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.01..10.0)).unwrap();
        let (a, b, c) = (pt(), pt(), pt());
        let (ab, ba) = (teich_distance(a, b, tp), teich_distance(b, a, tp));
        assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
        assert!(teich_distance(a, c, tp) <= ab + teich_distance(b, c, tp) + 1e-9);
    }
}

proptest! {
    #[test]
    fn neighbors_are_symmetric(i in 0u64..10_000) {
        let m = random_marking(&mut item_rng(5, i), &MarkingSampler::default());
        for n in neighbors(&m, B2) {
            prop_assert!(neighbors(&n, B2).contains(&m));
        }
    }
}

#[test]
fn lipschitz_constants() {
    const G_EDGE_MAX: f64 = 2.5 * std::f64::consts::LN_2;
    const F_UNIT_MAX: u32 = 9;
    let tp = TeichParams::default();
    let sampler = MarkingSampler {
        slope_radius: 20,
        twist_range: 20,
        max_d: 6,
    };
    let mut g_max = 0.0f64;
    for i in 0..500 {
        let m = random_marking(&mut item_rng(1, i), &sampler);
        let z = embed(&m, tp).unwrap();
        for n in neighbors(&m, B2) {
            g_max = g_max.max(teich_distance(z, embed(&n, tp).unwrap(), tp));
        }
    }
    assert!((g_max - G_EDGE_MAX).abs() < 1e-9, "{g_max}");

    let mut rng = item_rng(1, 0);
    let rho = 1.0 / tp.metric_scale;
    let mut f_max = 0;
    for _ in 0..300 {
        let z = TeichPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..20.0)).unwrap();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let den = rho.cosh() - rho.sinh() * theta.sin();
        let w = TeichPoint::new(z.re + z.im * rho.sinh() * theta.cos() / den, z.im / den).unwrap();
        assert!((teich_distance(z, w, tp) - 1.0).abs() < 1e-9);
        let (m1, m2) = (shortest_augmented_marking(z, tp), shortest_augmented_marking(w, tp));
        f_max = f_max.max(bfs_distance(&m1, &m2, B2, 14, None).unwrap());
    }
    assert_eq!(f_max, F_UNIT_MAX);
}
