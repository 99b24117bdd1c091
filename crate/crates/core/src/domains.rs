//! Support domains, densities with a uniformly positive lower bound, i.i.d.
//! sampling, and grid-certified coverage checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Ball, Point};
use crate::math;
use crate::pointgrid::PointGrid;
use crate::ABS_TOL;

/// A half-space `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    fn norm(&self) -> f64 {
        math::sqrt(self.normal.iter().map(|a| a * a).sum())
    }

    /// Signed slack `offset - normal·x`, scaled so it is a Euclidean distance.
    fn slack(&self, p: &Point) -> f64 {
        let dot: f64 = self.normal.iter().zip(&p.coords).map(|(a, x)| a * x).sum();
        (self.offset - dot) / self.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DomainShape {
    Box { min: Vec<f64>, max: Vec<f64> },
    Ball { center: Point, radius: f64 },
    Polytope { halfspaces: Vec<Halfspace> },
    /// Closed outer ball minus the open inner ball. The one non-convex kind.
    Annulus { center: Point, inner: f64, outer: f64 },
}

/// A compact support region with cached metric data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Domain {
    shape: DomainShape,
    dim: usize,
    bbox_min: Vec<f64>,
    bbox_max: Vec<f64>,
    diameter: f64,
    inradius: f64,
    incenter: Point,
    convex: bool,
    volume: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("invalid domain: {0}")]
    Invalid(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("n must be >= 1")]
    EmptySample,
    #[error(
        "rejection acceptance ratio {accepted}/{attempts} fell below 1e-4; \
         reparameterize the domain or its bounding box"
    )]
    LowAcceptance { accepted: usize, attempts: usize },
    #[error("grid_step {grid_step} exceeds r/4 = {limit}")]
    GridTooCoarse { grid_step: f64, limit: f64 },
    #[error("r must be > 0")]
    NonPositiveRadius,
}

impl Domain {
    pub fn unit_box(dim: usize) -> Domain {
        Domain::rect(vec![0.0; dim], vec![1.0; dim]).expect("unit box is valid")
    }

    pub fn rect(min: Vec<f64>, max: Vec<f64>) -> Result<Domain, DomainError> {
        if min.is_empty() || min.len() != max.len() {
            return Err(DomainError::Invalid(String::from(
                "box needs matching nonempty corners",
            )));
        }
        if min.iter().zip(&max).any(|(a, b)| !(b > a)) {
            return Err(DomainError::Invalid(String::from("box needs max > min per axis")));
        }
        let dim = min.len();
        let diameter = math::sqrt(min.iter().zip(&max).map(|(a, b)| (b - a) * (b - a)).sum());
        let inradius = min
            .iter()
            .zip(&max)
            .map(|(a, b)| (b - a) / 2.0)
            .fold(f64::INFINITY, f64::min);
        let incenter = Point::new(min.iter().zip(&max).map(|(a, b)| (a + b) / 2.0).collect());
        let volume = min.iter().zip(&max).map(|(a, b)| b - a).product();
        Ok(Domain {
            shape: DomainShape::Box {
                min: min.clone(),
                max: max.clone(),
            },
            dim,
            bbox_min: min,
            bbox_max: max,
            diameter,
            inradius,
            incenter,
            convex: true,
            volume,
        })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Domain, DomainError> {
        if !(radius > 0.0) {
            return Err(DomainError::Invalid(String::from("ball radius must be > 0")));
        }
        let dim = center.dim();
        let bbox_min = center.coords.iter().map(|c| c - radius).collect();
        let bbox_max = center.coords.iter().map(|c| c + radius).collect();
        let volume = math::unit_ball_volume(dim) * math::powf(radius, dim as f64);
        Ok(Domain {
            shape: DomainShape::Ball {
                center: center.clone(),
                radius,
            },
            dim,
            bbox_min,
            bbox_max,
            diameter: 2.0 * radius,
            inradius: radius,
            incenter: center,
            convex: true,
            volume,
        })
    }

    pub fn annulus(center: Point, inner: f64, outer: f64) -> Result<Domain, DomainError> {
        if !(inner > 0.0) || !(outer > inner) {
            return Err(DomainError::Invalid(String::from(
                "annulus needs 0 < inner < outer",
            )));
        }
        let dim = center.dim();
        let bbox_min = center.coords.iter().map(|c| c - outer).collect();
        let bbox_max = center.coords.iter().map(|c| c + outer).collect();
        // Largest inscribed ball sits in the shell, centered at radius
        // (inner + outer)/2 from the hole.
        let mut inc = center.coords.clone();
        inc[0] += (inner + outer) / 2.0;
        let volume = math::unit_ball_volume(dim)
            * (math::powf(outer, dim as f64) - math::powf(inner, dim as f64));
        Ok(Domain {
            shape: DomainShape::Annulus {
                center,
                inner,
                outer,
            },
            dim,
            bbox_min,
            bbox_max,
            diameter: 2.0 * outer,
            inradius: (outer - inner) / 2.0,
            incenter: Point::new(inc),
            convex: false,
            volume,
        })
    }

    /// A convex polytope `{ x : normal_i · x <= offset_i }`.
    ///
    /// The caller supplies the bounding box, an interior point and the
    /// inscribed-ball radius; containment of the inscribed ball is verified
    /// exactly against every half-space, the bounding box is trusted. The
    /// cached diameter is the bounding-box diagonal (an upper bound) and the
    /// volume comes from grid quadrature.
    pub fn polytope(
        halfspaces: Vec<Halfspace>,
        bbox_min: Vec<f64>,
        bbox_max: Vec<f64>,
        incenter: Point,
        inradius: f64,
    ) -> Result<Domain, DomainError> {
        if halfspaces.is_empty() {
            return Err(DomainError::Invalid(String::from("polytope needs half-spaces")));
        }
        let dim = incenter.dim();
        if bbox_min.len() != dim
            || bbox_max.len() != dim
            || halfspaces.iter().any(|h| h.normal.len() != dim)
        {
            return Err(DomainError::Invalid(String::from("dimension mismatch")));
        }
        if halfspaces.iter().any(|h| h.norm() <= ABS_TOL) {
            return Err(DomainError::Invalid(String::from("zero half-space normal")));
        }
        if !(inradius > 0.0) {
            return Err(DomainError::Invalid(String::from("inradius must be > 0")));
        }
        for (k, h) in halfspaces.iter().enumerate() {
            if h.slack(&incenter) < inradius - ABS_TOL {
                return Err(DomainError::Invalid(format!(
                    "inscribed ball violates half-space {k}: slack {} < inradius {}",
                    h.slack(&incenter),
                    inradius
                )));
            }
        }
        if incenter
            .coords
            .iter()
            .zip(bbox_min.iter().zip(&bbox_max))
            .any(|(c, (lo, hi))| c < lo || c > hi)
        {
            return Err(DomainError::Invalid(String::from("incenter outside bbox")));
        }
        let diameter = math::sqrt(
            bbox_min
                .iter()
                .zip(&bbox_max)
                .map(|(a, b)| (b - a) * (b - a))
                .sum(),
        );
        let mut dom = Domain {
            shape: DomainShape::Polytope { halfspaces },
            dim,
            bbox_min,
            bbox_max,
            diameter,
            inradius,
            incenter,
            convex: true,
            volume: 0.0,
        };
        dom.volume = dom.quadrature_volume(dom.inradius / 10.0);
        Ok(dom)
    }

    pub fn shape(&self) -> &DomainShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bbox(&self) -> (&[f64], &[f64]) {
        (&self.bbox_min, &self.bbox_max)
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn incenter(&self) -> &Point {
        &self.incenter
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Closed membership test with the crate tolerance.
    pub fn contains(&self, p: &Point) -> bool {
        match &self.shape {
            DomainShape::Box { min, max } => p
                .coords
                .iter()
                .zip(min.iter().zip(max))
                .all(|(c, (lo, hi))| *c >= lo - ABS_TOL && *c <= hi + ABS_TOL),
            DomainShape::Ball { center, radius } => center.dist(p) <= radius + ABS_TOL,
            DomainShape::Polytope { halfspaces } => {
                halfspaces.iter().all(|h| h.slack(p) >= -ABS_TOL)
            }
            DomainShape::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = center.dist(p);
                d <= outer + ABS_TOL && d >= inner - ABS_TOL
            }
        }
    }

    /// Moves `p` into the domain. Exact nearest-point projection for box and
    /// ball; cyclic half-space projection for polytopes (a point of K, not
    /// necessarily the nearest); radial clamping for the annulus.
    pub fn project(&self, p: &Point) -> Point {
        match &self.shape {
            DomainShape::Box { min, max } => Point::new(
                p.coords
                    .iter()
                    .zip(min.iter().zip(max))
                    .map(|(c, (lo, hi))| c.max(*lo).min(*hi))
                    .collect(),
            ),
            DomainShape::Ball { center, radius } => {
                let d = center.dist(p);
                if d <= *radius {
                    p.clone()
                } else {
                    center.lerp(p, radius / d)
                }
            }
            DomainShape::Polytope { halfspaces } => {
                let mut q = p.clone();
                for _ in 0..64 {
                    let mut moved = false;
                    for h in halfspaces {
                        let s = h.slack(&q);
                        if s < 0.0 {
                            // Move onto the violated hyperplane.
                            let nn = h.norm();
                            let unit: Vec<f64> = h.normal.iter().map(|a| a / nn).collect();
                            q = q.add_scaled(&unit, s);
                            moved = true;
                        }
                    }
                    if !moved {
                        break;
                    }
                }
                q
            }
            DomainShape::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = center.dist(p);
                if d > *outer {
                    center.lerp(p, outer / d)
                } else if d < *inner {
                    if d <= ABS_TOL {
                        // At the hole center: push along the first axis.
                        let mut c = center.coords.clone();
                        c[0] += *inner;
                        Point::new(c)
                    } else {
                        center.lerp(p, inner / d)
                    }
                } else {
                    p.clone()
                }
            }
        }
    }

    /// Compact label used in result files.
    pub fn tag(&self) -> String {
        match &self.shape {
            DomainShape::Box { min, max } => {
                let unit = min.iter().all(|&v| v == 0.0) && max.iter().all(|&v| v == 1.0);
                if unit {
                    format!("unit-box{}", self.dim)
                } else {
                    format!("box{}", self.dim)
                }
            }
            DomainShape::Ball { radius, .. } => format!("ball{}(r={})", self.dim, radius),
            DomainShape::Polytope { halfspaces } => {
                format!("polytope{}(m={})", self.dim, halfspaces.len())
            }
            // no commas: the tag is a bare CSV field
            DomainShape::Annulus { inner, outer, .. } => {
                format!("annulus{}({};{})", self.dim, inner, outer)
            }
        }
    }

    /// Midpoint-rule volume estimate over the bounding-box lattice.
    pub fn quadrature_volume(&self, pitch: f64) -> f64 {
        let mut cells = 0usize;
        let mut it = LatticeIter::cell_centers(&self.bbox_min, &self.bbox_max, pitch);
        while let Some(p) = it.next() {
            if self.contains(&p) {
                cells += 1;
            }
        }
        cells as f64 * math::powi(pitch, self.dim as u32)
    }

    /// One uniform draw from the domain by rejection from the bounding box.
    pub(crate) fn uniform_point(&self, rng: &mut ChaCha8Rng) -> Point {
        loop {
            let p = Point::new(
                self.bbox_min
                    .iter()
                    .zip(&self.bbox_max)
                    .map(|(lo, hi)| rng.gen_range(*lo..*hi))
                    .collect(),
            );
            if self.contains(&p) {
                return p;
            }
        }
    }
}

/// Iterator over lattice points `origin + i * pitch` of a box, in
/// lexicographic index order with the last axis fastest.
pub(crate) struct LatticeIter {
    origin: Vec<f64>,
    pitch: f64,
    counts: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl LatticeIter {
    pub fn lattice(min: &[f64], max: &[f64], pitch: f64) -> LatticeIter {
        assert!(pitch > 0.0);
        let counts = min
            .iter()
            .zip(max)
            .map(|(a, b)| (math::floor((b - a) / pitch + 1e-9) as usize) + 1)
            .collect();
        LatticeIter {
            origin: min.to_vec(),
            pitch,
            counts,
            idx: vec![0; min.len()],
            done: false,
        }
    }

    pub fn cell_centers(min: &[f64], max: &[f64], pitch: f64) -> LatticeIter {
        assert!(pitch > 0.0);
        let counts: Vec<usize> = min
            .iter()
            .zip(max)
            .map(|(a, b)| math::ceil((b - a) / pitch - 1e-9) as usize)
            .collect();
        LatticeIter {
            origin: min.iter().map(|a| a + pitch / 2.0).collect(),
            pitch,
            counts,
            idx: vec![0; min.len()],
            done: false,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<Point> {
        if self.done || self.counts.iter().any(|&c| c == 0) {
            return None;
        }
        let p = Point::new(
            self.idx
                .iter()
                .zip(&self.origin)
                .map(|(i, o)| o + *i as f64 * self.pitch)
                .collect(),
        );
        // advance, last axis fastest
        let mut k = self.idx.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.counts[k] {
                break;
            }
            self.idx[k] = 0;
        }
        Some(p)
    }
}

/// Density kind: uniform, or a uniform base with finitely many disjoint ball
/// bumps (piecewise density with a stated min/max ratio).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DensityKind {
    Uniform,
    BoundedRatio { pieces: Vec<(Ball, f64)> },
}

/// A probability density on a [`Domain`], uniformly positive with stored
/// infimum `nu_min`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensitySpec {
    pub kind: DensityKind,
    nu_min: f64,
    normalizer: f64,
    max_weight: f64,
}

impl DensitySpec {
    pub fn uniform(domain: &Domain) -> DensitySpec {
        let vol = domain.volume();
        DensitySpec {
            kind: DensityKind::Uniform,
            nu_min: 1.0 / vol,
            normalizer: vol,
            max_weight: 1.0,
        }
    }

    /// Piecewise density: relative weight `w_k` on the k-th ball piece, 1
    /// elsewhere, normalized analytically. Pieces must be pairwise disjoint
    /// and contained in the domain so the normalizer is exact.
    pub fn bounded_ratio(
        domain: &Domain,
        pieces: Vec<(Ball, f64)>,
    ) -> Result<DensitySpec, DomainError> {
        let d = domain.dim();
        for (k, (ball, w)) in pieces.iter().enumerate() {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(DomainError::InvalidDensity(format!(
                    "piece {k} weight must be positive and finite"
                )));
            }
            if ball.center.dim() != d {
                return Err(DomainError::InvalidDensity(format!(
                    "piece {k} dimension mismatch"
                )));
            }
            if !ball_inside_domain(domain, ball) {
                return Err(DomainError::InvalidDensity(format!(
                    "piece {k} is not contained in the domain"
                )));
            }
        }
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                let (a, b) = (&pieces[i].0, &pieces[j].0);
                if a.center.dist(&b.center) < a.radius + b.radius - ABS_TOL {
                    return Err(DomainError::InvalidDensity(format!(
                        "pieces {i} and {j} overlap"
                    )));
                }
            }
        }
        let vol_piece = |b: &Ball| math::unit_ball_volume(d) * math::powf(b.radius, d as f64);
        let z = domain.volume()
            + pieces
                .iter()
                .map(|(b, w)| (w - 1.0) * vol_piece(b))
                .sum::<f64>();
        if !(z > 0.0) {
            return Err(DomainError::InvalidDensity(String::from(
                "normalizer must be positive",
            )));
        }
        let min_w = pieces.iter().map(|(_, w)| *w).fold(1.0f64, f64::min);
        let max_w = pieces.iter().map(|(_, w)| *w).fold(1.0f64, f64::max);
        Ok(DensitySpec {
            kind: DensityKind::BoundedRatio { pieces },
            nu_min: min_w / z,
            normalizer: z,
            max_weight: max_w,
        })
    }

    /// Infimum of the density over the domain.
    pub fn nu_min(&self) -> f64 {
        self.nu_min
    }

    /// Density value at a point of the domain.
    pub fn density_at(&self, p: &Point) -> f64 {
        self.weight_at(p) / self.normalizer
    }

    fn weight_at(&self, p: &Point) -> f64 {
        match &self.kind {
            DensityKind::Uniform => 1.0,
            DensityKind::BoundedRatio { pieces } => pieces
                .iter()
                .find(|(b, _)| b.contains(p))
                .map(|(_, w)| *w)
                .unwrap_or(1.0),
        }
    }

    /// Midpoint-rule integral of the density over the domain; should be close
    /// to 1. Exact up to rounding for boxes when `pitch` divides every side.
    pub fn quadrature_integral(&self, domain: &Domain, pitch: f64) -> f64 {
        let (lo, hi) = domain.bbox();
        let mut total = 0.0;
        let mut it = LatticeIter::cell_centers(lo, hi, pitch);
        while let Some(p) = it.next() {
            if domain.contains(&p) {
                total += self.density_at(&p);
            }
        }
        total * math::powi(pitch, domain.dim() as u32)
    }
}

fn ball_inside_domain(domain: &Domain, ball: &Ball) -> bool {
    let c = &ball.center;
    let r = ball.radius;
    match domain.shape() {
        DomainShape::Box { min, max } => c
            .coords
            .iter()
            .zip(min.iter().zip(max))
            .all(|(x, (lo, hi))| *x >= lo + r - ABS_TOL && *x <= hi - r + ABS_TOL),
        DomainShape::Ball { center, radius } => center.dist(c) <= radius - r + ABS_TOL,
        DomainShape::Polytope { halfspaces } => {
            halfspaces.iter().all(|h| h.slack(c) >= r - ABS_TOL)
        }
        DomainShape::Annulus {
            center,
            inner,
            outer,
        } => {
            let d = center.dist(c);
            d <= outer - r + ABS_TOL && d >= inner + r - ABS_TOL
        }
    }
}

/// A sampled cloud. Membership of every point in the source domain is an
/// invariant of construction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Point>,
    pub seed: u64,
    pub domain_tag: String,
}

/// Draws `n` i.i.d. points from `density` on `domain` by rejection sampling
/// against the bounding box. Deterministic given the seed.
pub fn sample(
    domain: &Domain,
    density: &DensitySpec,
    n: usize,
    seed: u64,
) -> Result<PointCloud, DomainError> {
    if n == 0 {
        return Err(DomainError::EmptySample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut attempts = 0usize;
    let (lo, hi) = domain.bbox();
    while points.len() < n {
        attempts += 1;
        let p = Point::new(
            lo.iter()
                .zip(hi)
                .map(|(a, b)| rng.gen_range(*a..*b))
                .collect(),
        );
        let mut accept = domain.contains(&p);
        if accept {
            if let DensityKind::BoundedRatio { .. } = density.kind {
                let thin: f64 = rng.gen_range(0.0..1.0);
                accept = thin < density.weight_at(&p) / density.max_weight;
            }
        }
        if accept {
            points.push(p);
        }
        if attempts >= 10_000 && (points.len() as f64) < 1e-4 * attempts as f64 {
            return Err(DomainError::LowAcceptance {
                accepted: points.len(),
                attempts,
            });
        }
    }
    Ok(PointCloud {
        dim: domain.dim(),
        points,
        seed,
        domain_tag: domain.tag(),
    })
}

/// Verdict of a grid coverage check.
///
/// `covered = true` certifies `K ⊆ ⋃ B(X_i, certified_radius)` where
/// `certified_radius = r + grid_step * sqrt(d)`: every point of K is within
/// `grid_step * sqrt(d)` of a tested lattice point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverageReport {
    pub covered: bool,
    pub witness: Option<Point>,
    pub certified_radius: f64,
}

/// Tests whether the `r`-balls around the cloud cover the domain, on the
/// lattice of pitch `grid_step`. The witness is the first uncovered lattice
/// point in grid order.
pub fn check_coverage(
    cloud: &PointCloud,
    domain: &Domain,
    r: f64,
    grid_step: f64,
) -> Result<CoverageReport, DomainError> {
    if !(r > 0.0) {
        return Err(DomainError::NonPositiveRadius);
    }
    if grid_step > r / 4.0 + ABS_TOL {
        return Err(DomainError::GridTooCoarse {
            grid_step,
            limit: r / 4.0,
        });
    }
    let certified_radius = r + grid_step * math::sqrt(domain.dim() as f64);
    let grid = PointGrid::build(&cloud.points, r.max(ABS_TOL));
    let (lo, hi) = domain.bbox();
    let mut it = LatticeIter::lattice(lo, hi, grid_step);
    while let Some(p) = it.next() {
        if !domain.contains(&p) {
            continue;
        }
        if !grid.has_point_within(&cloud.points, &p, r, ABS_TOL) {
            return Ok(CoverageReport {
                covered: false,
                witness: Some(p),
                certified_radius,
            });
        }
    }
    Ok(CoverageReport {
        covered: true,
        witness: None,
        certified_radius,
    })
}
