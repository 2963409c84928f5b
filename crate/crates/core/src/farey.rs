//! The curve graph of a complexity-four surface, modelled as the Farey graph.
//!
//! Curves on the once-punctured torus and on the four-holed sphere are both
//! classified by reduced slopes `p/q`; two curves are joined in the curve
//! graph when they intersect minimally, which for slopes means
//! `|p₁q₂ − q₁p₂| = 1`. Mapping classes act through `SL(2, ℤ)`.
//!
//! Annular curve graphs are identified with `ℤ` through twist coordinates:
//! after normalising the core curve to `1/0`, every other slope becomes a
//! finite rational and its integer part records how far it twists around
//! the core.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reduced slope `p/q` with `q ≥ 0`; `1/0` is the slope at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };
    pub const ZERO: Slope = Slope { p: 0, q: 1 };

    /// Builds the canonical representative of `p/q`.
    ///
    /// The pair is reduced and the sign is moved onto the numerator. `0/0`
    /// is rejected.
    pub fn new(p: i64, q: i64) -> Result<Slope> {
        Slope::from_wide(p as i128, q as i128)
    }

    pub(crate) fn from_wide(p: i128, q: i128) -> Result<Slope> {
        if p == 0 && q == 0 {
            return Err(Error::InvalidSlope("0/0 is not a slope".into()));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        let p = i64::try_from(p).map_err(|_| Error::Overflow)?;
        let q = i64::try_from(q).map_err(|_| Error::Overflow)?;
        Ok(Slope { p, q })
    }

    /// Integer slope `n/1`.
    pub fn integer(n: i64) -> Slope {
        Slope { p: n, q: 1 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    /// Tie-break key used whenever the library has to choose between
    /// slopes: smaller denominator first, then smaller numerator.
    pub fn simplicity_key(&self) -> (i64, i64) {
        (self.q, self.p)
    }

    fn det(&self, other: &Slope) -> i128 {
        self.p as i128 * other.q as i128 - self.q as i128 * other.p as i128
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        self.simplicity_key().cmp(&other.simplicity_key())
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Slope> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Slope::INFINITY);
        }
        let bad = || Error::Parse(format!("bad slope {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p = p.trim().parse::<i64>().map_err(|_| bad())?;
                let q = q.trim().parse::<i64>().map_err(|_| bad())?;
                Slope::new(p, q)
            }
            None => Ok(Slope::integer(s.parse::<i64>().map_err(|_| bad())?)),
        }
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: i64,
            q: i64,
        }
        let raw = Raw::deserialize(de)?;
        let s = Slope::new(raw.p, raw.q).map_err(serde::de::Error::custom)?;
        if s.p != raw.p || s.q != raw.q {
            return Err(serde::de::Error::custom(format!(
                "slope {}/{} is not in canonical form",
                raw.p, raw.q
            )));
        }
        Ok(s)
    }
}

/// Which complexity-four surface the slopes live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceKind {
    #[serde(rename = "t1")]
    OncePuncturedTorus,
    #[serde(rename = "s04")]
    FourHoledSphere,
}

impl SurfaceKind {
    fn intersection_scale(self) -> u64 {
        match self {
            SurfaceKind::OncePuncturedTorus => 1,
            SurfaceKind::FourHoledSphere => 2,
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::OncePuncturedTorus => "t1",
            SurfaceKind::FourHoledSphere => "s04",
        })
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" | "torus" => Ok(SurfaceKind::OncePuncturedTorus),
            "s04" | "sphere" => Ok(SurfaceKind::FourHoledSphere),
            _ => Err(Error::Parse(format!("unknown surface kind {s:?}"))),
        }
    }
}

/// An element of `SL(2, ℤ)` acting on slopes by `(p : q) ↦ (ap + bq : cp + dq)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MappingClass {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl MappingClass {
    pub const IDENTITY: MappingClass = MappingClass { a: 1, b: 0, c: 0, d: 1 };
    /// The twist `[[1, 1], [0, 1]]` about `1/0`.
    pub const T: MappingClass = MappingClass { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<MappingClass> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(Error::InvalidMappingClass(format!(
                "[[{a}, {b}], [{c}, {d}]] does not have determinant 1"
            )));
        }
        Ok(MappingClass { a, b, c, d })
    }

    pub fn inverse(&self) -> MappingClass {
        MappingClass {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &MappingClass) -> MappingClass {
        let mul = |x: i64, y: i64, z: i64, w: i64| {
            i64::try_from(x as i128 * y as i128 + z as i128 * w as i128)
                .expect("mapping class entries exceed i64")
        };
        MappingClass {
            a: mul(self.a, other.a, self.b, other.c),
            b: mul(self.a, other.b, self.b, other.d),
            c: mul(self.c, other.a, self.d, other.c),
            d: mul(self.c, other.b, self.d, other.d),
        }
    }

    /// `n`-th power of the twist about `1/0`.
    pub fn twist_power(n: i64) -> MappingClass {
        MappingClass { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Geometric intersection number of two curves on a surface of the given kind.
pub fn intersection(a: Slope, b: Slope, kind: SurfaceKind) -> u64 {
    a.det(&b).unsigned_abs() as u64 * kind.intersection_scale()
}

/// Adjacency in the curve graph: the slopes are Farey neighbours.
pub fn adjacent(a: Slope, b: Slope) -> bool {
    a.det(&b).unsigned_abs() == 1
}

/// Image of a slope under a mapping class.
pub fn act(m: &MappingClass, a: Slope) -> Slope {
    try_act(m, a).expect("slope entries exceed i64")
}

/// Like [`act`], reporting overflow instead of panicking.
pub fn try_act(m: &MappingClass, a: Slope) -> Result<Slope> {
    let (p, q) = (a.p as i128, a.q as i128);
    Slope::from_wide(
        m.a as i128 * p + m.b as i128 * q,
        m.c as i128 * p + m.d as i128 * q,
    )
}

/// The canonical mapping class sending `a` to `1/0`.
///
/// For `a = p/q` this is `[[x, y], [−q, p]]` where `px + qy = 1` and
/// `0 ≤ x < q` (for `q = 0` it is the identity).
pub fn normalize_to_infinity(a: Slope) -> MappingClass {
    if a.is_infinity() {
        return MappingClass::IDENTITY;
    }
    let (p, q) = (a.p, a.q);
    // q > 0 here; solve p·x ≡ 1 (mod q) with 0 ≤ x < q.
    let ext = p.extended_gcd(&q);
    debug_assert_eq!(ext.gcd.abs(), 1);
    let mut x = (ext.x as i128 * ext.gcd as i128).rem_euclid(q as i128);
    if q == 1 {
        x = 0;
    }
    let y = (1 - p as i128 * x) / q as i128;
    debug_assert_eq!(p as i128 * x + q as i128 * y, 1);
    MappingClass {
        a: x as i64,
        b: i64::try_from(y).expect("normalizing matrix exceeds i64"),
        c: -q,
        d: p,
    }
}

/// The twist `T_α^n` about an arbitrary curve `α`.
///
/// Conjugating `[[1, n], [0, 1]]` by any matrix sending `α` to `1/0` gives
/// the same element, so the result does not depend on the normalisation.
pub fn twist_about(alpha: Slope, n: i64) -> MappingClass {
    let w = normalize_to_infinity(alpha);
    w.inverse().compose(&MappingClass::twist_power(n).compose(&w))
}

/// Floor of the normalised position of `beta` relative to the core `alpha`.
///
/// This is the twist coordinate of `beta` measured from the global
/// reference curve of `alpha`, namely the preimage of `0/1` under the
/// canonical normalisation.
pub fn annular_coordinate(alpha: Slope, beta: Slope) -> Result<i128> {
    if alpha == beta {
        return Err(Error::UndefinedProjection {
            curve: beta,
            core: alpha,
        });
    }
    let w = normalize_to_infinity(alpha);
    let (p, q) = (beta.p as i128, beta.q as i128);
    let np = w.a as i128 * p + w.b as i128 * q;
    let nq = w.c as i128 * p + w.d as i128 * q;
    // nq ≠ 0 because beta ≠ alpha; orient so the denominator is positive.
    let (np, nq) = if nq < 0 { (-np, -nq) } else { (np, nq) };
    Ok(np.div_euclid(nq))
}

/// Twisting of `beta` about `alpha`, measured relative to `reference`.
pub fn twist_coord(alpha: Slope, beta: Slope, reference: Slope) -> Result<i128> {
    Ok(annular_coordinate(alpha, beta)? - annular_coordinate(alpha, reference)?)
}

/// Distance between `beta` and `gamma` in the annular curve graph of `alpha`.
pub fn annular_distance(alpha: Slope, beta: Slope, gamma: Slope) -> Result<u128> {
    Ok((annular_coordinate(alpha, beta)? - annular_coordinate(alpha, gamma)?).unsigned_abs())
}

/// The slope adjacent to `alpha` whose twist coordinate about `alpha` is `k`.
pub fn transversal_with_coordinate(alpha: Slope, k: i128) -> Result<Slope> {
    let w = normalize_to_infinity(alpha).inverse();
    Slope::from_wide(
        w.a as i128 * k + w.b as i128,
        w.c as i128 * k + w.d as i128,
    )
}

/// Farey distance from `1/0` to `x`.
///
/// Walks the ladder of Farey triangles crossed by the hyperbolic geodesic
/// from `∞` to `x`. Each crossed edge separates `∞` from `x`, so the
/// distance to a new ladder vertex is one more than the nearer endpoint of
/// the edge it is attached to. Inside a fan the pivot keeps its distance
/// and the far side settles after two steps, so every fan is processed in
/// constant time.
fn distance_from_infinity(x: Slope) -> u32 {
    if x.is_infinity() {
        return 0;
    }
    if x.q == 1 {
        return 1;
    }
    let (p, q) = (x.p as i128, x.q as i128);
    let n = p.div_euclid(q);
    let (mut l, mut r) = ((n, 1i128), (n + 1, 1i128));
    let (mut dl, mut dr) = (1u32, 1u32);
    loop {
        // a = q·(x − l)·lq, b = q·(r − x)·rq, both positive.
        let a = p * l.1 - q * l.0;
        let b = q * r.0 - p * r.1;
        debug_assert!(a > 0 && b > 0);
        match a.cmp(&b) {
            Ordering::Equal => return dl.min(dr) + 1,
            Ordering::Less => {
                let k = (b - 1) / a;
                for _ in 0..k.min(2) {
                    dr = dl.min(dr) + 1;
                }
                r = (k * l.0 + r.0, k * l.1 + r.1);
            }
            Ordering::Greater => {
                let k = (a - 1) / b;
                for _ in 0..k.min(2) {
                    dl = dl.min(dr) + 1;
                }
                l = (l.0 + k * r.0, l.1 + k * r.1);
            }
        }
    }
}

/// Length of a shortest path between two slopes in the Farey graph.
pub fn farey_distance(a: Slope, b: Slope) -> u32 {
    distance_from_infinity(act(&normalize_to_infinity(a), b))
}

/// The canonical Farey geodesic from `a` to `b`.
///
/// From the current vertex `u`, every geodesic towards `b` continues
/// through one of the two endpoints of the first ladder edge, i.e. the
/// preimages of `⌊x⌋` and `⌊x⌋ + 1` where `x` is `b` in the frame
/// normalising `u`. Among those that keep the path geodesic the simpler
/// slope (smaller denominator, then numerator) is taken.
pub fn farey_geodesic(a: Slope, b: Slope) -> Vec<Slope> {
    let mut path = vec![a];
    let mut u = a;
    let mut remaining = farey_distance(a, b);
    while remaining > 0 {
        if remaining == 1 {
            path.push(b);
            break;
        }
        let w = normalize_to_infinity(u);
        let x = act(&w, b);
        let n = (x.p as i128).div_euclid(x.q as i128);
        let back = w.inverse();
        let next = [n, n + 1]
            .into_iter()
            .map(|k| act(&back, Slope::from_wide(k, 1).expect("integer slope")))
            .filter(|c| farey_distance(*c, b) == remaining - 1)
            .min_by_key(|c| c.simplicity_key())
            .expect("a ladder endpoint continues every geodesic");
        path.push(next);
        u = next;
        remaining -= 1;
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(s(2, 4), s(1, 2));
        assert_eq!(s(-3, -6), s(1, 2));
        assert_eq!(s(3, -6), s(-1, 2));
        assert_eq!(s(-5, 0), Slope::INFINITY);
        assert!(Slope::new(0, 0).is_err());
        assert_eq!(s(0, -7), Slope::ZERO);
    }

    #[test]
    fn intersection_examples() {
        let t = SurfaceKind::OncePuncturedTorus;
        assert_eq!(intersection(s(0, 1), Slope::INFINITY, t), 1);
        assert_eq!(intersection(s(3, 7), s(3, 7), t), 0);
        assert_eq!(intersection(s(2, 5), s(3, 7), t), 1);
        assert_eq!(
            intersection(s(2, 5), s(3, 7), SurfaceKind::FourHoledSphere),
            2
        );
    }

    #[test]
    fn adjacency_examples() {
        assert!(adjacent(s(0, 1), Slope::INFINITY));
        assert!(!adjacent(s(0, 1), s(2, 3)));
        assert!(adjacent(s(1, 2), s(1, 3)));
    }

    #[test]
    fn action_examples() {
        assert_eq!(act(&MappingClass::IDENTITY, s(3, 5)), s(3, 5));
        assert_eq!(act(&MappingClass::T, s(0, 1)), s(1, 1));
        assert_eq!(act(&MappingClass::T, Slope::INFINITY), Slope::INFINITY);
        assert!(MappingClass::new(1, 1, 1, 1).is_err());
    }

    #[test]
    fn normalization_sends_to_infinity() {
        assert_eq!(normalize_to_infinity(Slope::INFINITY), MappingClass::IDENTITY);
        for a in [s(0, 1), s(3, 5), s(-7, 3), s(1, 1), s(-1, 1), s(12, 1)] {
            let m = normalize_to_infinity(a);
            assert_eq!(act(&m, a), Slope::INFINITY, "{a}");
            assert_eq!(m.a as i128 * m.d as i128 - m.b as i128 * m.c as i128, 1);
        }
    }

    #[test]
    fn geodesic_examples() {
        assert_eq!(farey_geodesic(s(0, 1), Slope::INFINITY), vec![s(0, 1), Slope::INFINITY]);
        assert_eq!(farey_geodesic(s(0, 1), s(1, 1)), vec![s(0, 1), s(1, 1)]);
        assert_eq!(farey_geodesic(s(2, 3), s(2, 3)), vec![s(2, 3)]);
        assert_eq!(farey_distance(s(2, 3), s(2, 3)), 0);
        assert_eq!(farey_distance(s(0, 1), Slope::INFINITY), 1);
    }

    #[test]
    fn twist_coordinates() {
        for n in -5..=5 {
            assert_eq!(twist_coord(Slope::INFINITY, Slope::integer(n), s(0, 1)).unwrap(), n as i128);
        }
        assert_eq!(annular_distance(Slope::INFINITY, s(0, 1), s(0, 1)).unwrap(), 0);
        assert_eq!(annular_distance(Slope::INFINITY, s(1, 1), s(3, 1)).unwrap(), 2);
        assert!(twist_coord(s(0, 1), s(0, 1), s(1, 1)).is_err());
        assert!(twist_coord(s(0, 1), s(1, 1), s(0, 1)).is_err());
    }

    #[test]
    fn twist_about_moves_coordinate() {
        for alpha in [Slope::INFINITY, s(0, 1), s(2, 5), s(-3, 4)] {
            let t = transversal_with_coordinate(alpha, 0).unwrap();
            assert!(adjacent(alpha, t));
            for n in [-3i64, -1, 1, 4] {
                let moved = act(&twist_about(alpha, n), t);
                assert!(adjacent(alpha, moved));
                assert_eq!(annular_coordinate(alpha, moved).unwrap(), n as i128);
                assert_eq!(act(&twist_about(alpha, n), alpha), alpha);
            }
        }
    }

    #[test]
    fn text_forms() {
        assert_eq!("inf".parse::<Slope>().unwrap(), Slope::INFINITY);
        assert_eq!("-3/6".parse::<Slope>().unwrap(), s(-1, 2));
        assert_eq!("4".parse::<Slope>().unwrap(), Slope::integer(4));
        assert!("x/2".parse::<Slope>().is_err());
        assert_eq!(Slope::INFINITY.to_string(), "inf");
        assert_eq!(s(-2, 3).to_string(), "-2/3");
        let json = serde_json::to_string(&s(-2, 3)).unwrap();
        assert_eq!(json, r#"{"p":-2,"q":3}"#);
        assert!(serde_json::from_str::<Slope>(r#"{"p":2,"q":4}"#).is_err());
    }
}
