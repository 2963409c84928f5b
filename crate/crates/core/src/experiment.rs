//! Seeded samplers, coarse-equality fits and the quasi-isometry table.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::farey::{farey_distance, transversal_with_coordinate, Slope, SurfaceKind};
use crate::horoball::HoroParams;
use crate::marking::{apply_move, bfs_distance, distance_formula_estimate, legal_moves, sound_height_cap, AugmentedMarking, ElementaryMove};
use crate::teich::{embed, teich_distance};

/// Independent generator for item `index` of a seeded sample, so a sample
/// of size `n` is a prefix of the sample of size `2n`.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform reduced slope with `|p| ≤ radius`, `0 ≤ q ≤ radius`.
pub fn random_slope<R: Rng>(rng: &mut R, radius: i64) -> Slope {
    loop {
        let p = rng.gen_range(-radius..=radius);
        let q = rng.gen_range(0..=radius);
        if num_integer::gcd(p, q) == 1 && (q > 0 || p == 1) {
            return Slope::new(p, q).expect("nonzero slope");
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkingSampler {
    pub slope_radius: i64,
    pub twist_range: i64,
    pub max_d: u32,
}

impl Default for MarkingSampler {
    fn default() -> Self {
        MarkingSampler {
            slope_radius: 20,
            twist_range: 20,
            max_d: 4,
        }
    }
}

pub fn random_marking<R: Rng>(rng: &mut R, s: &MarkingSampler) -> AugmentedMarking {
    let base = random_slope(rng, s.slope_radius);
    let k = rng.gen_range(-s.twist_range..=s.twist_range);
    let t = transversal_with_coordinate(base, k as i128).expect("small twist");
    AugmentedMarking::new(SurfaceKind::OncePuncturedTorus, base, t, rng.gen_range(0..=s.max_d)).expect("adjacent transversal")
}

/// A walk of `steps` uniformly chosen legal moves that never raises the
/// length datum above `max_d`.
pub fn random_walk<R: Rng>(rng: &mut R, m: &AugmentedMarking, steps: u32, max_d: u32, params: HoroParams) -> AugmentedMarking {
    let mut cur = *m;
    for _ in 0..steps {
        let moves: Vec<ElementaryMove> = legal_moves(&cur, params)
            .into_iter()
            .filter(|mv| !(cur.d >= max_d && *mv == ElementaryMove::Vertical(1)))
            .collect();
        let mv = *moves.choose(rng).expect("every marking has a move");
        cur = apply_move(&cur, mv, params).expect("legal move");
    }
    cur
}

/// Smallest `C ≥ 1` with `x/C − c ≤ y ≤ C·x + c` for every row `(x, y)`.
pub fn fit_multiplicative(rows: &[(f64, f64)], additive: f64) -> f64 {
    let mut c = 1.0f64;
    for &(x, y) in rows {
        if y > additive {
            c = c.max(if x > 0.0 { (y - additive) / x } else { f64::INFINITY });
        }
        if x > 0.0 {
            c = c.max(if y + additive > 0.0 { x / (y + additive) } else { f64::INFINITY });
        }
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiSpec {
    pub pairs: usize,
    pub seed: u64,
    /// Longest random walk used for nearby pairs.
    pub max_walk: u32,
    pub sampler: MarkingSampler,
}

impl QiSpec {
    pub fn new(pairs: usize, seed: u64) -> QiSpec {
        QiSpec {
            pairs,
            seed,
            max_walk: 10,
            sampler: MarkingSampler::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiRow {
    pub pair_id: usize,
    pub m1: AugmentedMarking,
    pub m2: AugmentedMarking,
    pub d_am: f64,
    pub exact: bool,
    pub d_t: f64,
    pub d_formula: u64,
}

/// Even ids are random walks from a random marking (known to be within
/// the walk length); odd ids are independent random markings.
pub fn qi_pair(spec: &QiSpec, id: usize, params: HoroParams) -> (AugmentedMarking, AugmentedMarking, Option<u32>) {
    let mut rng = item_rng(spec.seed, id as u64);
    let m1 = random_marking(&mut rng, &spec.sampler);
    if id.is_multiple_of(2) {
        let steps = rng.gen_range(0..=spec.max_walk);
        (m1, random_walk(&mut rng, &m1, steps, spec.sampler.max_d, params), Some(steps))
    } else {
        (m1, random_marking(&mut rng, &spec.sampler), None)
    }
}

/// Exact distance when a walk certifies it is within the BFS cap,
/// otherwise the distance-formula estimate.
pub fn am_distance(m1: &AugmentedMarking, m2: &AugmentedMarking, upper: Option<u32>, cfg: &Config) -> (f64, bool) {
    let params = cfg.horo();
    let reachable = upper.is_some_and(|u| u <= cfg.bfs_cap) && farey_distance(m1.base, m2.base) <= cfg.bfs_cap;
    if reachable {
        let d_cap = sound_height_cap(m1, m2, cfg.bfs_cap) + cfg.d_cap_slack;
        if let Some(d) = bfs_distance(m1, m2, params, cfg.bfs_cap, Some(d_cap)) {
            return (d as f64, true);
        }
    }
    (distance_formula_estimate(m1, m2, cfg.formula_k, params) as f64, false)
}

pub fn qi_compare(spec: &QiSpec, cfg: &Config) -> Vec<QiRow> {
    let params = cfg.horo();
    let tp = cfg.teich();
    (0..spec.pairs)
        .map(|id| {
            let (m1, m2, upper) = qi_pair(spec, id, params);
            let (d_am, exact) = am_distance(&m1, &m2, upper, cfg);
            let d_t = teich_distance(embed(&m1, tp).expect("torus"), embed(&m2, tp).expect("torus"), tp);
            QiRow {
                pair_id: id,
                m1,
                m2,
                d_am,
                exact,
                d_t,
                d_formula: distance_formula_estimate(&m1, &m2, cfg.formula_k, params),
            }
        })
        .collect()
}

pub fn qi_csv(rows: &[QiRow], cfg: &Config) -> String {
    let mut s = cfg.header("#");
    s.push_str("pair_id,d_am,d_t,d_formula\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.pair_id,
            crate::format::float(r.d_am),
            crate::format::float(r.d_t),
            r.d_formula
        ));
    }
    s
}
