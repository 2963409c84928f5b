//! Invariant suites behind the `verify` command.

use std::fmt;

use rand::Rng;

use crate::config::Config;
use crate::experiment::{item_rng, random_marking, random_slope, random_walk, MarkingSampler};
use crate::farey::{act, adjacent, farey_distance, farey_geodesic, intersection, twist_coord, MappingClass, Slope, SurfaceKind};
use crate::hierarchy::{build_hierarchy, path_of, resolve, total_size, validate_hierarchy, validate_resolution};
use crate::horoball::{horo_box_bfs, horo_distance_z, is_horo_edge, preferred_path, HoroParams, HoroPoint};
use crate::marking::{bfs_distance, legal_moves, mcg_act, neighbors, project_to_annulus, ElementaryMove};
use crate::teich::{embed, ext_length, kerckhoff_lower_bound, shortest_augmented_marking, teich_distance, TeichPoint};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, self.suite, c.name, c.detail)?;
        }
        Ok(())
    }
}

pub const SUITES: [&str; 5] = ["farey", "horoball", "marking", "hierarchy", "teich"];

pub fn run_suite(name: &str, cfg: &Config) -> Option<SuiteReport> {
    Some(match name {
        "farey" => farey_suite(cfg),
        "horoball" => horoball_suite(cfg),
        "marking" => marking_suite(cfg),
        "hierarchy" => hierarchy_suite(cfg),
        "teich" => teich_suite(cfg),
        _ => return None,
    })
}

fn ball(radius: i64) -> Vec<Slope> {
    let mut out = vec![Slope::INFINITY];
    for q in 1..=radius {
        for p in -radius..=radius {
            if num_integer::gcd(p, q) == 1 {
                out.push(Slope::new(p, q).unwrap());
            }
        }
    }
    out
}

fn random_sl2<R: Rng>(rng: &mut R, len: usize) -> MappingClass {
    let gens = [
        MappingClass::T,
        MappingClass::T.inverse(),
        MappingClass::new(0, -1, 1, 0).unwrap(),
        MappingClass::new(1, 0, 1, 1).unwrap(),
    ];
    (0..len).fold(MappingClass::IDENTITY, |acc, _| gens[rng.gen_range(0..4)].compose(&acc))
}

fn farey_suite(cfg: &Config) -> SuiteReport {
    let mut r = SuiteReport::new("farey");
    let slopes = ball(8);
    let mut bad = 0;
    for a in &slopes {
        for b in &slopes {
            let d = farey_distance(*a, *b);
            if d != farey_distance(*b, *a) || (d == 0) != (a == b) || intersection(*a, *b, SurfaceKind::OncePuncturedTorus) != intersection(*b, *a, SurfaceKind::OncePuncturedTorus) {
                bad += 1;
            }
            let g = farey_geodesic(*a, *b);
            if g.len() as u32 != d + 1 || g[0] != *a || *g.last().unwrap() != *b || !g.windows(2).all(|w| adjacent(w[0], w[1])) {
                bad += 1;
            }
        }
    }
    r.push("metric-and-geodesics", bad == 0, format!("{} slopes, {bad} violations", slopes.len()));

    let mut rng = item_rng(cfg.seed, 0);
    let mut bad = 0;
    for _ in 0..100 {
        let g = random_sl2(&mut rng, 6);
        let (a, b) = (random_slope(&mut rng, 30), random_slope(&mut rng, 30));
        if farey_distance(act(&g, a), act(&g, b)) != farey_distance(a, b) {
            bad += 1;
        }
    }
    r.push("mcg-invariance", bad == 0, format!("100 samples, {bad} violations"));

    let mut bad = 0;
    for _ in 0..200 {
        let alpha = random_slope(&mut rng, 20);
        let [b, c, r1, r2] = [0; 4].map(|_| loop {
            let s = random_slope(&mut rng, 20);
            if s != alpha {
                break s;
            }
        });
        let d1 = twist_coord(alpha, b, r1).unwrap() - twist_coord(alpha, c, r1).unwrap();
        let d2 = twist_coord(alpha, b, r2).unwrap() - twist_coord(alpha, c, r2).unwrap();
        if d1 != d2 {
            bad += 1;
        }
    }
    r.push("twist-reference-independence", bad == 0, format!("200 samples, {bad} violations"));
    r
}

fn horoball_suite(cfg: &Config) -> SuiteReport {
    let mut r = SuiteReport::new("horoball");
    let params = cfg.horo();
    let mut mismatches = 0;
    let mut pairs = 0;
    for b in [2u32, 3] {
        let hp = HoroParams { base_b: b };
        for x0 in -16i64..=16 {
            for n0 in 0..=5u32 {
                let dist = horo_box_bfs((x0, n0), -16, 16, 12, hp);
                for x in -16i64..=16 {
                    for n in 0..=5u32 {
                        pairs += 1;
                        if dist[n as usize][(x + 16) as usize] as u64 != horo_distance_z(&HoroPoint::new(x0, n0), &HoroPoint::new(x, n), hp) {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    r.push("exact-vs-bfs", mismatches == 0, format!("{pairs} pairs, {mismatches} mismatches"));

    let mut worst = 0i64;
    let mut invalid = 0;
    for dx in -128i64..=128 {
        for n1 in 0..=8 {
            for n2 in 0..=8 {
                let (p, q) = (HoroPoint::new(0, n1), HoroPoint::new(dx, n2));
                let path = preferred_path(&p, &q, params);
                if !path.windows(2).all(|w| is_horo_edge(&w[0], &w[1], params)) {
                    invalid += 1;
                }
                worst = worst.max(path.len() as i64 - 1 - horo_distance_z(&p, &q, params) as i64);
            }
        }
    }
    r.push("preferred-path", invalid == 0 && worst <= 8, format!("max excess {worst}, {invalid} invalid paths"));

    let mut rng = item_rng(cfg.seed, 1);
    let mut bad = 0;
    for _ in 0..10_000 {
        let mut pt = || HoroPoint::new(rng.gen_range(-1000i64..=1000), rng.gen_range(0..=8));
        let (a, b, c) = (pt(), pt(), pt());
        let d = |u: &HoroPoint, v: &HoroPoint| horo_distance_z(u, v, params);
        if d(&a, &b) != d(&b, &a) || d(&a, &c) > d(&a, &b) + d(&b, &c) || (d(&a, &b) == 0) != (a == b) {
            bad += 1;
        }
    }
    r.push("metric-axioms", bad == 0, format!("10000 triples, {bad} violations"));
    r
}

fn marking_suite(cfg: &Config) -> SuiteReport {
    let mut r = SuiteReport::new("marking");
    let params = cfg.horo();
    let sampler = MarkingSampler {
        slope_radius: 20,
        twist_range: 20,
        max_d: 4,
    };
    let mut asym = 0;
    let mut flips = 0;
    let mut lipschitz = 0u64;
    for i in 0..500 {
        let mut rng = item_rng(cfg.seed, 100 + i);
        let m = random_marking(&mut rng, &sampler);
        for (mv, n) in legal_moves(&m, params).into_iter().zip(neighbors(&m, params)) {
            if !neighbors(&n, params).contains(&m) {
                asym += 1;
            }
            if m.d > 0 && mv == ElementaryMove::Flip {
                flips += 1;
            }
            for alpha in [m.base, m.transversal, n.base, Slope::INFINITY, Slope::ZERO] {
                let (a, b) = (project_to_annulus(&m, alpha), project_to_annulus(&n, alpha));
                lipschitz = lipschitz.max(horo_distance_z(&a, &b, params));
            }
        }
    }
    r.push("neighbor-symmetry", asym == 0, format!("500 markings, {asym} asymmetric edges"));
    r.push("no-thin-flips", flips == 0, format!("{flips} flips with d > 0"));
    r.push("projection-lipschitz", lipschitz <= 4, format!("max projection jump {lipschitz}"));

    let mut bad = 0;
    for i in 0..20 {
        let mut rng = item_rng(cfg.seed, 1000 + i);
        let m1 = random_marking(&mut rng, &MarkingSampler { max_d: 2, ..sampler });
        let steps = rng.gen_range(0..=6);
        let m2 = random_walk(&mut rng, &m1, steps, 2, params);
        let g = random_sl2(&mut rng, 5);
        if bfs_distance(&m1, &m2, params, 8, None) != bfs_distance(&mcg_act(&g, &m1), &mcg_act(&g, &m2), params, 8, None) {
            bad += 1;
        }
    }
    r.push("mcg-equivariance", bad == 0, format!("20 pairs, {bad} violations"));
    r
}

fn hierarchy_suite(cfg: &Config) -> SuiteReport {
    let mut r = SuiteReport::new("hierarchy");
    let params = cfg.horo();
    let sampler = MarkingSampler {
        slope_radius: 30,
        twist_range: 50,
        max_d: 4,
    };
    let mut failures = Vec::new();
    let mut max_step = 0;
    for i in 0..60 {
        let mut rng = item_rng(cfg.seed, 2000 + i);
        let (m1, m2) = (random_marking(&mut rng, &sampler), random_marking(&mut rng, &sampler));
        let h = build_hierarchy(&m1, &m2, params).unwrap();
        let res = resolve(&h);
        if let Err(e) = validate_hierarchy(&h).and_then(|_| validate_resolution(&h, &res)) {
            failures.push(e.to_string());
            continue;
        }
        let path = path_of(&h, &res).unwrap();
        if path.markings.first() != Some(&m1) || path.markings.last() != Some(&m2) || res.len() > total_size(&h) {
            failures.push(format!("pair {i}: endpoints or length"));
        }
        for w in path.markings.windows(2) {
            max_step = max_step.max(bfs_distance(&w[0], &w[1], params, 4, None).unwrap_or(u32::MAX));
        }
    }
    r.push("hierarchy-and-resolution", failures.is_empty(), format!("60 pairs, {} failures", failures.len()));
    r.push("path-steps", max_step <= 2, format!("max consecutive distance {max_step}"));
    r
}

fn teich_suite(cfg: &Config) -> SuiteReport {
    let mut r = SuiteReport::new("teich");
    let tp = cfg.teich();
    let sampler = MarkingSampler {
        slope_radius: 30,
        twist_range: 30,
        max_d: 6,
    };
    let mut bad = 0;
    for i in 0..200 {
        let mut rng = item_rng(cfg.seed, 3000 + i);
        let m = random_marking(&mut rng, &sampler);
        if shortest_augmented_marking(embed(&m, tp).unwrap(), tp) != m {
            bad += 1;
        }
    }
    r.push("F-after-G", bad == 0, format!("200 markings, {bad} failures"));

    let mut rng = item_rng(cfg.seed, 4000);
    let mut bad = 0;
    for _ in 0..2000 {
        let z = TeichPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..5.0)).unwrap();
        let (a, b) = (random_slope(&mut rng, 30), random_slope(&mut rng, 30));
        let i = intersection(a, b, SurfaceKind::OncePuncturedTorus) as f64;
        let lhs = ext_length(z, a) * ext_length(z, b);
        if lhs < i * i - 1e-12 * lhs.max(i * i) {
            bad += 1;
        }
    }
    r.push("minsky-inequality", bad == 0, format!("2000 triples, {bad} violations"));

    let slopes = ball(6);
    let mut bad = 0;
    for _ in 0..500 {
        let z1 = TeichPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)).unwrap();
        let z2 = TeichPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)).unwrap();
        if kerckhoff_lower_bound(z1, z2, &slopes, tp) > teich_distance(z1, z2, tp) + 1e-9 {
            bad += 1;
        }
    }
    r.push("kerckhoff-bound", bad == 0, format!("500 pairs, {bad} violations"));
    r
}
