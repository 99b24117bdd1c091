//! Points, balls and the explicit witness constructions.
//!
//! The central object is the absorption set
//!
//! ```text
//! W(x, y, r) = { z ∈ B(y, ‖y−x‖) : B(z, r) ⊇ B(x, r) ∩ B(y, ‖y−x‖) }
//! ```
//!
//! A point of `W(x, y, r)` dominates `x` inside any vertex set that lies in
//! `B(x,r) ∩ B(y,‖y−x‖)`, which is what makes it useful for dismantling
//! arguments. [`w_contains`] decides membership by a Monte Carlo probe,
//! [`w_witness_ball`] constructs a ball that provably sits inside `W`, and
//! [`inner_ball`] produces a ball inside `B(x,r) ∩ X` for a convex `X` with a
//! known inscribed ball.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::ABS_TOL;

/// A point of `ℝ^d`. Coordinates must be finite.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Point {
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "point coordinates must be finite"
        );
        assert!(!coords.is_empty(), "dimension must be at least 1");
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        math::sqrt(self.dist_sq(other))
    }

    /// `self + t * (other - self)`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }

    /// `self + scale * dir`.
    pub fn add_scaled(&self, dir: &[f64], scale: f64) -> Point {
        Point::new(
            self.coords
                .iter()
                .zip(dir)
                .map(|(a, d)| a + scale * d)
                .collect(),
        )
    }
}

/// A Euclidean ball given by center and radius.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Ball {
        assert!(radius >= 0.0 && radius.is_finite(), "radius must be >= 0");
        Ball { center, radius }
    }

    /// Closed containment test with the crate-wide tolerance.
    pub fn contains(&self, p: &Point) -> bool {
        self.center.dist(p) <= self.radius + ABS_TOL
    }
}

/// What a [`WitnessBall`] certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum WitnessClaim {
    /// The ball lies inside `W(x, y, r)`.
    WMembership,
    /// The ball lies inside `B(x, r) ∩ X` for the convex set `X` in question.
    BallDomainIntersection,
    /// The ball lies inside an intersection of cover balls (center inside the
    /// domain).
    CoverIntersection,
}

/// A ball together with the containment claim it certifies. The claim is
/// checkable by sampling; see [`w_contains`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WitnessBall {
    pub center: Point,
    pub radius: f64,
    pub claim: WitnessClaim,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Outcome of a probe-based `W`-membership test.
///
/// `vacuous` is set when not a single probe could be drawn from
/// `B(x,r) ∩ B(y,‖y−x‖)`; membership is then reported as holding but the
/// caller should treat the verdict as uninformative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WVerdict {
    pub holds: bool,
    pub vacuous: bool,
}

/// Draws a uniform point from the ball via a normal direction and a radial
/// `u^{1/d}` correction.
pub fn sample_in_ball(center: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Point {
    let d = center.dim();
    let mut dir = Vec::with_capacity(d);
    // Box-Muller, two normals per draw.
    let mut spare = None;
    while dir.len() < d {
        match spare.take() {
            Some(z) => dir.push(z),
            None => {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                let m = math::sqrt(-2.0 * math::ln(u1));
                let a = 2.0 * core::f64::consts::PI * u2;
                dir.push(m * math::cos(a));
                spare = Some(m * math::sin(a));
            }
        }
    }
    let norm = math::sqrt(dir.iter().map(|v| v * v).sum::<f64>());
    if norm == 0.0 {
        return center.clone();
    }
    let u: f64 = rng.gen_range(0.0..1.0);
    let scale = radius * math::powf(u, 1.0 / d as f64) / norm;
    center.add_scaled(&dir, scale)
}

/// Draws a uniform point from `B(a, ra) ∩ B(b, rb)` by rejection from the
/// smaller ball. Returns `None` when `max_attempts` draws all miss.
pub fn sample_ball_intersection(
    a: &Point,
    ra: f64,
    b: &Point,
    rb: f64,
    rng: &mut ChaCha8Rng,
    max_attempts: usize,
) -> Option<Point> {
    let (small_c, small_r, other_c, other_r) = if ra <= rb {
        (a, ra, b, rb)
    } else {
        (b, rb, a, ra)
    };
    for _ in 0..max_attempts {
        let p = sample_in_ball(small_c, small_r, rng);
        if other_c.dist(&p) <= other_r + ABS_TOL {
            return Some(p);
        }
    }
    None
}

/// Probe-based test for `z ∈ W(x, y, r)`.
///
/// A deterministic necessary-condition pre-check is run first: the two
/// extreme points of `B(x,r) ∩ B(y,‖y−x‖)` along the `x → y` axis lie in the
/// closure of the intersection, so both must be within `r` of `z`. The
/// remaining obligation — that every point of the intersection is within `r`
/// of `z` — is tested on `probes` uniform samples.
pub fn w_contains(
    x: &Point,
    y: &Point,
    r: f64,
    z: &Point,
    probes: usize,
    seed: u64,
) -> Result<WVerdict, GeometryError> {
    if r <= 0.0 {
        return Err(GeometryError::Precondition(String::from("r must be > 0")));
    }
    let rho = x.dist(y);
    if rho <= ABS_TOL {
        return Err(GeometryError::Degenerate(String::from("x = y")));
    }

    // z must lie in B(y, ‖y−x‖) by definition of W.
    if y.dist(z) > rho + ABS_TOL {
        return Ok(WVerdict {
            holds: false,
            vacuous: false,
        });
    }

    // Axis extremes of the intersection: t ∈ [0, min(r, 2ρ)] along the unit
    // direction from x toward y.
    let dir: Vec<f64> = x
        .coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| (b - a) / rho)
        .collect();
    let t_hi = r.min(2.0 * rho);
    let u0 = x.clone();
    let u1 = x.add_scaled(&dir, t_hi);
    if z.dist(&u0) > r + ABS_TOL || z.dist(&u1) > r + ABS_TOL {
        return Ok(WVerdict {
            holds: false,
            vacuous: false,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drew_any = false;
    for _ in 0..probes {
        match sample_ball_intersection(x, r, y, rho, &mut rng, 10_000) {
            Some(p) => {
                drew_any = true;
                if z.dist(&p) > r + ABS_TOL {
                    return Ok(WVerdict {
                        holds: false,
                        vacuous: false,
                    });
                }
            }
            None => break,
        }
    }
    Ok(WVerdict {
        holds: true,
        vacuous: !drew_any,
    })
}

/// The radius factor of [`w_witness_ball`]:
/// `δ₁(λ) = min( 1/(10λ), 1 − (1 − 1/(100λ²))^{1/2} )`.
pub fn delta1(lambda: f64) -> f64 {
    let a = 1.0 / (10.0 * lambda);
    let b = 1.0 - math::sqrt(1.0 - 1.0 / (100.0 * lambda * lambda));
    a.min(b)
}

/// The radius factor of [`inner_ball`]: `δ₃(λ) = 1 / (1 + 2λ)`.
pub fn delta3(lambda: f64) -> f64 {
    1.0 / (1.0 + 2.0 * lambda)
}

/// Constructs a ball certified to lie inside `W(x, y, r)`.
///
/// Requires `r ≤ ‖x−y‖ ≤ λ·r` with `λ ≥ 1`. The center is placed on the
/// segment `[x, y]` at distance `r/(10λ)` from `x`, and the radius is
/// `δ₁(λ)·r`.
pub fn w_witness_ball(
    x: &Point,
    y: &Point,
    r: f64,
    lambda: f64,
) -> Result<WitnessBall, GeometryError> {
    if r <= 0.0 {
        return Err(GeometryError::Precondition(String::from("r must be > 0")));
    }
    if lambda < 1.0 - ABS_TOL {
        return Err(GeometryError::Precondition(String::from("lambda must be >= 1")));
    }
    let rho = x.dist(y);
    if rho < r - ABS_TOL {
        return Err(GeometryError::Precondition(String::from(
            "need r <= |x - y|",
        )));
    }
    if rho > lambda * r + ABS_TOL {
        return Err(GeometryError::Precondition(String::from(
            "need |x - y| <= lambda * r",
        )));
    }
    let t = r / (10.0 * lambda * rho);
    let center = x.lerp(y, t);
    Ok(WitnessBall {
        center,
        radius: delta1(lambda) * r,
        claim: WitnessClaim::WMembership,
    })
}

/// Constructs a ball inside `B(x, r) ∩ X` for a convex `X` that contains the
/// inscribed ball `B(c, ρ)` handed in by the caller.
///
/// The construction dilates the inscribed ball toward `x` with factor
/// `μ = r / ((1/2 + λ)·ρ)`; the result has center `(1−μ)·x + μ·c` and radius
/// `μ·ρ/2 = δ₃(λ)·r`, and sits inside `B(x, r)` by the triangle inequality.
/// Requires `‖x−c‖ ≤ λ·ρ` (the computable shadow of `diam(X) ≤ λ·inr(X)`)
/// and `0 < r ≤ (1/2 + λ)·ρ`.
pub fn inner_ball(
    x: &Point,
    inball_center: &Point,
    inball_radius: f64,
    r: f64,
    lambda: f64,
) -> Result<WitnessBall, GeometryError> {
    if inball_radius <= 0.0 {
        return Err(GeometryError::Precondition(String::from(
            "inscribed ball radius must be > 0",
        )));
    }
    if r <= 0.0 {
        return Err(GeometryError::Precondition(String::from("r must be > 0")));
    }
    let off = x.dist(inball_center);
    if off > lambda * inball_radius + ABS_TOL {
        return Err(GeometryError::Precondition(String::from(
            "need |x - inball_center| <= lambda * inball_radius (diam <= lambda * inr violated)",
        )));
    }
    let mu = r / ((0.5 + lambda) * inball_radius);
    if mu > 1.0 + ABS_TOL {
        return Err(GeometryError::Precondition(String::from(
            "r too large: need r <= (1/2 + lambda) * inball_radius",
        )));
    }
    let mu = mu.min(1.0);
    let center = x.lerp(inball_center, mu);
    Ok(WitnessBall {
        center,
        radius: mu * inball_radius / 2.0,
        claim: WitnessClaim::BallDomainIntersection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec())
    }

    #[test]
    fn w_contains_rejects_degenerate_input() {
        let x = pt(&[0.0, 0.0]);
        let err = w_contains(&x, &x, 1.0, &x, 16, 1).unwrap_err();
        assert!(matches!(err, GeometryError::Degenerate(_)));
    }

    #[test]
    fn w_contains_y_is_member_at_touching_radius() {
        // |x - y| = r: every u in the intersection is within r of y.
        let x = pt(&[0.0, 0.0]);
        let y = pt(&[1.0, 0.0]);
        let v = w_contains(&x, &y, 1.0, &y, 2048, 7).unwrap();
        assert!(v.holds && !v.vacuous);
    }

    #[test]
    fn w_contains_accepts_constructed_center() {
        // lambda = 3/2, normalised construction center at distance 1/(10λ)
        // from x along the axis.
        let x = pt(&[0.0, 0.0]);
        let y = pt(&[1.5, 0.0]);
        let z = pt(&[1.0 / 15.0, 0.0]);
        let v = w_contains(&x, &y, 1.0, &z, 4096, 11).unwrap();
        assert!(v.holds && !v.vacuous);
    }

    #[test]
    fn w_contains_refutes_far_center() {
        // Brute-force refutation: the intersection contains points farther
        // than r from (1.4, 0); 10^4 probes find one.
        let x = pt(&[0.0, 0.0]);
        let y = pt(&[1.5, 0.0]);
        let z = pt(&[1.4, 0.0]);
        let v = w_contains(&x, &y, 1.0, &z, 10_000, 13).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn delta1_matches_closed_form_values() {
        // Targets evaluated from the closed form in 40-digit arithmetic.
        // λ=1: 1/(10λ) = 0.1, 1 - sqrt(0.99) ≈ 0.0050126 is the min.
        assert!((delta1(1.0) - 0.0050125628933800452655).abs() < 1e-15);
        // λ=10: 1/(10λ) = 0.01 is not the min; 1 - sqrt(0.9999) ≈ 5.00013e-5.
        assert!((delta1(10.0) - 5.0001250062503906523e-5).abs() < 1e-15);
        assert!(delta1(10.0) < 0.01);
    }

    #[test]
    fn witness_ball_center_and_radius() {
        let x = pt(&[0.0, 0.0]);
        let y = pt(&[2.0, 0.0]);
        let wb = w_witness_ball(&x, &y, 1.0, 2.0).unwrap();
        assert!((wb.center.coords[0] - 0.05).abs() < 1e-15);
        assert!(wb.center.coords[1].abs() < 1e-15);
        assert!((wb.radius - delta1(2.0)).abs() < 1e-15);
        // Verify the containment claim by probing.
        let v = w_contains(&x, &y, 1.0, &wb.center, 4096, 17).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn witness_ball_preconditions_are_named() {
        let x = pt(&[0.0, 0.0]);
        let y = pt(&[0.5, 0.0]);
        // |x - y| < r
        let err = w_witness_ball(&x, &y, 1.0, 2.0).unwrap_err();
        assert!(matches!(err, GeometryError::Precondition(ref m) if m.contains("r <= |x - y|")));
        // |x - y| > lambda r
        let y2 = pt(&[3.0, 0.0]);
        let err = w_witness_ball(&x, &y2, 1.0, 2.0).unwrap_err();
        assert!(matches!(err, GeometryError::Precondition(ref m) if m.contains("lambda")));
    }

    #[test]
    fn inner_ball_unit_disk_example() {
        // X = unit disk, x = (1, 0), r = 1/2, λ = 2 -> center (0.8, 0),
        // radius 0.1; containment follows from 0.2 + 0.1 <= 0.5 and
        // 0.8 + 0.1 <= 1.
        let x = pt(&[1.0, 0.0]);
        let c = pt(&[0.0, 0.0]);
        let wb = inner_ball(&x, &c, 1.0, 0.5, 2.0).unwrap();
        assert!((wb.center.coords[0] - 0.8).abs() < 1e-12);
        assert!(wb.center.coords[1].abs() < 1e-12);
        assert!((wb.radius - 0.1).abs() < 1e-12);
        assert!((wb.radius - delta3(2.0) * 0.5).abs() < 1e-12);
        // Triangle inequalities, exact arithmetic.
        assert!(x.dist(&wb.center) + wb.radius <= 0.5 + 1e-12);
        assert!(c.dist(&wb.center) + wb.radius <= 1.0 + 1e-12);
    }

    #[test]
    fn inner_ball_degenerate_segment() {
        // x at the incenter: returned center equals x.
        let x = pt(&[0.25, 0.25]);
        let wb = inner_ball(&x, &x, 0.5, 0.2, 2.0).unwrap();
        assert_eq!(wb.center, x);
        assert!(wb.radius <= 0.2);
    }

    #[test]
    fn inner_ball_square_corner_example() {
        // Unit square, x at the corner, incenter (0.5, 0.5) with ρ = 0.5,
        // λ = 2√2; check containment at sampled probe points.
        let x = pt(&[0.0, 0.0]);
        let c = pt(&[0.5, 0.5]);
        let lambda = 2.0 * math::sqrt(2.0);
        let wb = inner_ball(&x, &c, 0.5, 0.2, lambda).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10_000 {
            let p = sample_in_ball(&wb.center, wb.radius, &mut rng);
            assert!(x.dist(&p) <= 0.2 + 1e-9);
            assert!(p.coords.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)));
        }
    }

    #[test]
    fn inner_ball_rejects_violated_shape_assumption() {
        let x = pt(&[10.0, 0.0]);
        let c = pt(&[0.0, 0.0]);
        let err = inner_ball(&x, &c, 1.0, 0.5, 2.0).unwrap_err();
        assert!(matches!(err, GeometryError::Precondition(_)));
    }

    #[test]
    fn sample_in_ball_stays_in_ball() {
        let c = pt(&[1.0, -2.0, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let p = sample_in_ball(&c, 0.7, &mut rng);
            assert!(c.dist(&p) <= 0.7 + 1e-12);
        }
    }
}
