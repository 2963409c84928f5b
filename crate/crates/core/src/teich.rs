//! Teichmüller space of the once-punctured torus as the upper half-plane.
//!
//! A point `z` is the flat torus `ℂ / (ℤ + zℤ)`, where the slope `p/q`
//! has extremal length `|p − qz|² / Im z`. `SL(2, ℤ)` acts on both slopes
//! and the half-plane, and extremal length is invariant under the joint
//! action.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::{act, annular_coordinate, normalize_to_infinity, MappingClass, Slope, SurfaceKind};
use crate::marking::AugmentedMarking;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeichPoint {
    pub re: f64,
    pub im: f64,
}

impl TeichPoint {
    pub fn new(re: f64, im: f64) -> Result<TeichPoint> {
        if im <= 0.0 || !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidConfig(format!("{re} + {im}i is not in the upper half-plane")));
        }
        Ok(TeichPoint { re, im })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeichParams {
    pub epsilon0: f64,
    pub metric_scale: f64,
}

impl TeichParams {
    /// `ε₀ < 2` keeps the shortest curve unique on the image of [`embed`]:
    /// there its extremal length is at most `ε₀/√2`, while every other
    /// slope has extremal length at least `√2/ε₀`.
    pub fn new(epsilon0: f64, metric_scale: f64) -> Result<TeichParams> {
        if !(epsilon0 > 0.0 && epsilon0 < 2.0) {
            return Err(Error::InvalidConfig(format!("epsilon0 must lie in (0, 2), got {epsilon0}")));
        }
        if !(metric_scale > 0.0 && metric_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("metric_scale must be positive, got {metric_scale}")));
        }
        Ok(TeichParams { epsilon0, metric_scale })
    }
}

impl Default for TeichParams {
    fn default() -> Self {
        TeichParams {
            epsilon0: 0.25,
            metric_scale: 0.5,
        }
    }
}

pub fn ext_length(z: TeichPoint, a: Slope) -> f64 {
    let (p, q) = (a.p() as f64, a.q() as f64);
    let re = p - q * z.re;
    let im = q * z.im;
    (re * re + im * im) / z.im
}

/// Möbius action `z ↦ (az + b)/(cz + d)`.
pub fn mobius(m: &MappingClass, z: TeichPoint) -> TeichPoint {
    let (a, b, c, d) = (m.a as f64, m.b as f64, m.c as f64, m.d as f64);
    let (nr, ni) = (a * z.re + b, a * z.im);
    let (dr, di) = (c * z.re + d, c * z.im);
    let den = dr * dr + di * di;
    TeichPoint {
        re: (nr * dr + ni * di) / den,
        im: (ni * dr - nr * di) / den,
    }
}

/// `metric_scale` times the hyperbolic distance.
pub fn teich_distance(z1: TeichPoint, z2: TeichPoint, params: TeichParams) -> f64 {
    let dx = z1.re - z2.re;
    let dy = z1.im - z2.im;
    let chord = (dx * dx + dy * dy).sqrt();
    params.metric_scale * 2.0 * (chord / (2.0 * (z1.im * z2.im).sqrt())).asinh()
}

/// Half the log of the largest extremal-length ratio over `slopes`,
/// rescaled to the chosen metric normalisation.
pub fn kerckhoff_lower_bound(z1: TeichPoint, z2: TeichPoint, slopes: &[Slope], params: TeichParams) -> f64 {
    let worst = slopes
        .iter()
        .map(|a| {
            let (e1, e2) = (ext_length(z1, *a), ext_length(z2, *a));
            (e1 / e2).max(e2 / e1)
        })
        .fold(1.0f64, f64::max);
    params.metric_scale * worst.ln()
}

const TIE: f64 = 1e-12;

/// The slope of least extremal length, ties to the smaller `(q, p)`.
///
/// Any slope with denominator `q` has extremal length at least `q²·Im z`,
/// which bounds the search. For a fixed `q` only the two numerators
/// around `q·Re z` can win; a non-reduced winner is dominated by its
/// reduced form at a smaller denominator.
pub fn shortest_slope(z: TeichPoint) -> Slope {
    let mut best = (Slope::INFINITY, ext_length(z, Slope::INFINITY));
    let mut q: i64 = 1;
    while (q * q) as f64 * z.im <= best.1 * (1.0 + TIE) {
        let base = (q as f64 * z.re).floor() as i64;
        for p in [base, base + 1] {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let s = Slope::new(p, q).expect("nonzero denominator");
            let e = ext_length(z, s);
            if e < best.1 * (1.0 - TIE) {
                best = (s, e);
            }
        }
        q += 1;
    }
    best.0
}

/// Length-datum band of a base curve with extremal length `ext`.
///
/// With `r = ε₀/Ext`, the band is `k` when `2ᵏ < r ≤ 2ᵏ⁺¹`, and `0` when
/// `r ≤ 2`.
pub fn band(ext: f64, params: TeichParams) -> u32 {
    let r = params.epsilon0 / ext;
    let mut k = 0u32;
    while r > 2f64.powi(k as i32 + 1) {
        k += 1;
    }
    k
}

/// The map from Teichmüller space to augmented markings: shortest curve,
/// shortest transversal, and the band of the shortest curve.
pub fn shortest_augmented_marking(z: TeichPoint, params: TeichParams) -> AugmentedMarking {
    let base = shortest_slope(z);
    let w = normalize_to_infinity(base);
    let zn = mobius(&w, z);
    let k = zn.re.floor();
    let pick = if zn.re - k <= (k + 1.0) - zn.re { k } else { k + 1.0 };
    let back = w.inverse();
    let transversal = act(&back, Slope::integer(pick as i64));
    AugmentedMarking::new(SurfaceKind::OncePuncturedTorus, base, transversal, band(ext_length(z, base), params))
        .expect("integer slopes are adjacent to infinity")
}

/// The map from augmented markings to Teichmüller space.
///
/// In the frame sending the base to `1/0`, the point sits above the
/// transversal's twist coordinate at the height where the base has
/// extremal length `ε₀/2^(d + 1/2)`.
pub fn embed(m: &AugmentedMarking, params: TeichParams) -> Result<TeichPoint> {
    if m.kind != SurfaceKind::OncePuncturedTorus {
        return Err(Error::Unsupported("embedding is defined for the once-punctured torus only".into()));
    }
    let n = annular_coordinate(m.base, m.transversal)? as f64;
    let height = 2f64.powf(m.d as f64 + 0.5) / params.epsilon0;
    let w = normalize_to_infinity(m.base);
    Ok(mobius(&w.inverse(), TeichPoint { re: n, im: height }))
}
