//! The ball-cover construction and the nerve-condition verifier.
//!
//! A cover is built in two stages. First a greedy maximal packing of
//! `r`-balls with centers in the domain, so that the `2r`-balls cover it.
//! Then every covering radius starts at `3r` and index sets whose
//! intersection with the domain is nonempty but too thin to hold an
//! `ε·r`-ball are inflated by `ε·r`, each set at most once. On success all
//! radii stay within `[3r, 4r]` and every nonempty intersection carries an
//! inner-ball certificate.
//!
//! [`verify_nerve`] then checks the three conditions that let the nerve of
//! the cover stand in for the Vietoris–Rips complex itself: (a) every clique
//! lives inside a single cover element, (b) every nonempty intersection
//! induces a dismantlable subgraph, and (c) the nerve of the cover elements
//! equals the nerve of the induced subcomplexes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{maximal_cliques, ComplexError};
use crate::dismantle::{dismantle_with_order, RemovalOrder};
use crate::domains::{Domain, PointCloud};
use crate::geometry::{w_contains, w_witness_ball, GeometryError, Point, WitnessBall, WitnessClaim};
use crate::math;
use crate::proximity::GeometricGraph;
use crate::ABS_TOL;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoverError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error(
        "covering radius for {indices:?} would exceed 4r with epsilon {epsilon}; retry with a smaller epsilon"
    )]
    RadiusOverflow { indices: Vec<u32>, epsilon: f64 },
    #[error("epsilon fell below the floor {floor} without terminating")]
    EpsilonFloor { floor: f64 },
    #[error("face enumeration exceeded budget {0}")]
    FaceBudget(usize),
    #[error("cover radius {cover_r} does not match graph radius {graph_r}")]
    RadiusMismatch { cover_r: f64, graph_r: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Clique(#[from] ComplexError),
}

/// A nonempty nerve face of the cover balls, with its inner-ball data: the
/// best point found in `K ∩ ⋂ B(x_i, s_i)` and its margin
/// `min_i (s_i − ‖x − x_i‖)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverFace {
    pub indices: Vec<u32>,
    pub witness: Point,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverDiagnostics {
    pub candidate_pitch: f64,
    pub optimizer_evals: u64,
    pub inflation_rounds: usize,
}

/// The constructed cover: packing centers `x_i`, radii `s_i ∈ [3r, 4r]`, the
/// inflation step actually used, and the per-index-set inner-ball cache.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cover {
    pub domain: Domain,
    pub r: f64,
    pub epsilon: f64,
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
    pub faces: Vec<CoverFace>,
    pub inflated: Vec<Vec<u32>>,
    pub diagnostics: CoverDiagnostics,
}

impl Cover {
    /// `A_i = B(x_i, s_i) ∩ K` membership for a point already known to be
    /// in K.
    pub fn in_element(&self, i: usize, p: &Point) -> bool {
        self.centers[i].dist(p) <= self.radii[i] + ABS_TOL
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Neighbor counts in the 4r-overlap structure: element `i` of the result
    /// is `|{ j : B(x_i, 4r) ∩ B(x_j, 4r) ≠ ∅ }|` (including `i`).
    pub fn overlap_counts(&self) -> Vec<usize> {
        let n = self.centers.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| self.centers[i].dist(&self.centers[j]) <= 8.0 * self.r + ABS_TOL)
                    .count()
            })
            .collect()
    }
}

/// Greedy maximal packing + iterative inflation with the given `epsilon`.
pub fn build_cover(
    domain: &Domain,
    r: f64,
    epsilon: f64,
    probe_budget: usize,
    seed: u64,
) -> Result<Cover, CoverError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(CoverError::BadParameters(String::from("r must be > 0")));
    }
    if r >= domain.diameter() {
        return Err(CoverError::BadParameters(String::from(
            "r must be < diam(K); at r >= diam(K) the complex is complete and needs no cover",
        )));
    }
    if !(epsilon > 0.0) {
        return Err(CoverError::BadParameters(String::from("epsilon must be > 0")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = domain.dim();

    // Stage 1: greedy maximal packing over lattice candidates (pitch r/10,
    // the same lattice the covering check uses) plus a few sampled ones.
    let pitch = r / 10.0;
    let mut centers: Vec<Point> = Vec::new();
    {
        let (lo, hi) = domain.bbox();
        let mut it = crate::domains::LatticeIter::lattice(lo, hi, pitch);
        let consider = |p: Point, centers: &mut Vec<Point>| {
            if domain.contains(&p)
                && centers
                    .iter()
                    .all(|c| c.dist(&p) >= 2.0 * r - ABS_TOL)
            {
                centers.push(p);
            }
        };
        while let Some(p) = it.next() {
            consider(p, &mut centers);
        }
        for _ in 0..probe_budget.min(256) {
            let p = domain.uniform_point(&mut rng);
            consider(p, &mut centers);
        }
    }
    let n = centers.len();
    debug_assert!(n > 0);

    // Maximality gives the 2r-covering on the candidate lattice; checked
    // directly here so a violation surfaces as an error instead of a bad
    // cover.
    {
        let (lo, hi) = domain.bbox();
        let mut it = crate::domains::LatticeIter::lattice(lo, hi, pitch);
        while let Some(p) = it.next() {
            if domain.contains(&p) && !centers.iter().any(|c| c.dist(&p) <= 2.0 * r + ABS_TOL) {
                return Err(CoverError::BadParameters(String::from(
                    "packing failed to 2r-cover its own candidate lattice",
                )));
            }
        }
    }

    // Locality bound from disjointness of the r-balls.
    let cap = math::powi(9.0, dim as u32) as usize;
    for i in 0..n {
        let m_i = (0..n)
            .filter(|&j| centers[i].dist(&centers[j]) <= 8.0 * r + ABS_TOL)
            .count();
        assert!(m_i <= cap, "overlap count {m_i} exceeds 9^d = {cap}");
    }

    // Stage 2: inflate radii until every nonempty intersection holds an
    // eps*r inner ball.
    let mut radii = vec![3.0 * r; n];
    let mut inflated: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut evals: u64 = 0;
    let mut rounds = 0usize;
    let budget_per_face = probe_budget.max(2_000);
    let mut cache: BTreeMap<Vec<u32>, CoverFace> = BTreeMap::new();

    loop {
        let faces = enumerate_faces(
            domain,
            &centers,
            &radii,
            budget_per_face,
            seed,
            &mut evals,
            &mut cache,
        )?;
        let offender = faces
            .iter()
            .find(|f| f.margin >= -ABS_TOL && f.margin < epsilon * r - ABS_TOL);
        match offender {
            None => {
                let faces = faces
                    .into_iter()
                    .filter(|f| f.margin >= -ABS_TOL)
                    .collect::<Vec<_>>();
                return Ok(Cover {
                    domain: domain.clone(),
                    r,
                    epsilon,
                    centers,
                    radii,
                    faces,
                    inflated: inflated.into_iter().collect(),
                    diagnostics: CoverDiagnostics {
                        candidate_pitch: pitch,
                        optimizer_evals: evals,
                        inflation_rounds: rounds,
                    },
                });
            }
            Some(face) => {
                let indices = face.indices.clone();
                // Inflating lifts this face's margin to >= eps*r permanently
                // (margins are monotone in the radii), so each set is
                // inflated at most once.
                assert!(
                    inflated.insert(indices.clone()),
                    "index set {indices:?} inflated twice"
                );
                for &i in &indices {
                    radii[i as usize] += epsilon * r;
                    if radii[i as usize] > 4.0 * r + ABS_TOL {
                        return Err(CoverError::RadiusOverflow { indices, epsilon });
                    }
                }
                // margins of any face sharing an index are stale
                cache.retain(|k, _| k.iter().all(|i| !indices.contains(i)));
                rounds += 1;
            }
        }
    }
}

/// [`build_cover`] with the automatic epsilon-halving schedule: on radius
/// overflow the step is halved and the build restarts, down to a floor of
/// 2^-20.
pub fn build_cover_adaptive(
    domain: &Domain,
    r: f64,
    epsilon0: f64,
    probe_budget: usize,
    seed: u64,
) -> Result<Cover, CoverError> {
    let floor = math::powi(0.5, 20);
    let mut eps = epsilon0;
    loop {
        match build_cover(domain, r, eps, probe_budget, seed) {
            Err(CoverError::RadiusOverflow { .. }) => {
                eps /= 2.0;
                if eps < floor {
                    return Err(CoverError::EpsilonFloor { floor });
                }
            }
            other => return other,
        }
    }
}

/// Enumerates the nonempty nerve faces of `{B(x_i, s_i) ∩ K}` level-wise
/// (increasing size, lexicographic within a size), extending each face only
/// by larger indices whose ball pairwise-meets every current one. Margins
/// come from [`inner_ball_search`]'s underlying optimizer and are exact at
/// the returned witness.
#[allow(clippy::too_many_arguments)]
fn enumerate_faces(
    domain: &Domain,
    centers: &[Point],
    radii: &[f64],
    budget: usize,
    seed: u64,
    evals: &mut u64,
    cache: &mut BTreeMap<Vec<u32>, CoverFace>,
) -> Result<Vec<CoverFace>, CoverError> {
    const FACE_BUDGET: usize = 100_000;
    let n = centers.len();
    let mut out: Vec<CoverFace> = Vec::new();
    let mut level: Vec<CoverFace> = Vec::new();
    for i in 0..n as u32 {
        // singleton margin is s_i, attained at the center itself
        level.push(CoverFace {
            indices: vec![i],
            witness: centers[i as usize].clone(),
            margin: radii[i as usize],
        });
    }
    let mut known: BTreeSet<Vec<u32>> = level.iter().map(|f| f.indices.clone()).collect();
    while !level.is_empty() {
        out.extend(level.iter().cloned());
        if out.len() > FACE_BUDGET {
            return Err(CoverError::FaceBudget(FACE_BUDGET));
        }
        let mut next: Vec<CoverFace> = Vec::new();
        for face in &level {
            if face.margin < -ABS_TOL {
                continue; // empty sets cannot extend
            }
            let max = *face.indices.last().unwrap();
            'ext: for j in (max + 1)..n as u32 {
                // pairwise prefilter
                for &i in &face.indices {
                    let need = radii[i as usize] + radii[j as usize];
                    if centers[i as usize].dist(&centers[j as usize]) >= need - ABS_TOL {
                        continue 'ext;
                    }
                }
                let mut cand: Vec<u32> = face.indices.clone();
                cand.push(j);
                // downward closure: all size-(k) subsets must be nonempty faces
                if cand.len() > 2 {
                    for drop in 0..cand.len() - 1 {
                        let sub: Vec<u32> = cand
                            .iter()
                            .enumerate()
                            .filter(|(t, _)| *t != drop)
                            .map(|(_, &v)| v)
                            .collect();
                        if !known.contains(&sub) {
                            continue 'ext;
                        }
                    }
                }
                let resolved = match cache.get(&cand) {
                    Some(f) => f.clone(),
                    None => {
                        let (witness, margin, used) = search_intersection_point(
                            domain,
                            centers,
                            radii,
                            &cand,
                            budget,
                            face_seed(seed, &cand),
                            Some(&face.witness),
                        );
                        *evals += used as u64;
                        let f = CoverFace {
                            indices: cand.clone(),
                            witness,
                            margin,
                        };
                        cache.insert(cand.clone(), f.clone());
                        f
                    }
                };
                if resolved.margin >= -ABS_TOL {
                    known.insert(cand);
                    next.push(resolved);
                }
            }
        }
        level = next;
    }
    Ok(out)
}

fn face_seed(seed: u64, indices: &[u32]) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for &i in indices {
        h = (h ^ (i as u64 + 1)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 27;
    }
    h
}

/// Seeks a ball of radius at least `target` of the form
/// `B(x, min_i(s_i − ‖x−x_i‖))` with `x ∈ K`, by multi-start subgradient
/// ascent on the concave margin objective. Absence (`None`) is a legitimate
/// return: the intersection may still be nonempty below the target.
pub fn inner_ball_search(
    domain: &Domain,
    centers: &[Point],
    radii: &[f64],
    indices: &[u32],
    target: f64,
    budget: usize,
    seed: u64,
) -> Option<WitnessBall> {
    assert!(!indices.is_empty(), "index set must be nonempty");
    let (witness, margin, _) =
        search_intersection_point(domain, centers, radii, indices, budget, seed, None);
    if margin >= target - ABS_TOL {
        Some(WitnessBall {
            center: witness,
            radius: margin.max(0.0),
            claim: WitnessClaim::CoverIntersection,
        })
    } else {
        None
    }
}

/// Maximizes `f(x) = min_i (s_i − ‖x − x_i‖)` over `x ∈ K`. Returns the best
/// point found, its exact margin, and the number of objective evaluations.
/// The margin is a sound certificate regardless of optimizer quality; only
/// emptiness verdicts are heuristic.
fn search_intersection_point(
    domain: &Domain,
    centers: &[Point],
    radii: &[f64],
    indices: &[u32],
    budget: usize,
    seed: u64,
    warm_start: Option<&Point>,
) -> (Point, f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = domain.dim();
    let scale = indices
        .iter()
        .map(|&i| radii[i as usize])
        .fold(0.0f64, f64::max);
    let mut evals = 0usize;
    let margin = |p: &Point, evals: &mut usize| -> f64 {
        *evals += 1;
        indices
            .iter()
            .map(|&i| radii[i as usize] - centers[i as usize].dist(p))
            .fold(f64::INFINITY, f64::min)
    };

    // centroid of the participating centers, pulled into K
    let centroid = {
        let mut c = vec![0.0; dim];
        for &i in indices {
            for (acc, v) in c.iter_mut().zip(&centers[i as usize].coords) {
                *acc += v;
            }
        }
        for v in c.iter_mut() {
            *v /= indices.len() as f64;
        }
        domain.project(&Point::new(c))
    };

    let mut starts: Vec<Point> = Vec::new();
    if let Some(w) = warm_start {
        starts.push(w.clone());
    }
    starts.push(centroid.clone());
    for &i in indices.iter().take(4) {
        starts.push(centers[i as usize].clone());
    }
    let extra = 4 + 2 * indices.len();
    for _ in 0..extra {
        let p = crate::geometry::sample_in_ball(&centroid, scale, &mut rng);
        starts.push(domain.project(&p));
    }

    let mut best = centroid.clone();
    let mut best_m = margin(&best, &mut evals);
    let per_start = (budget / starts.len().max(1)).max(64);
    for start in starts {
        let mut x = start;
        let mut m = margin(&x, &mut evals);
        if m > best_m {
            best_m = m;
            best = x.clone();
        }
        let mut step = scale / 4.0;
        let mut local = 0usize;
        while step > 1e-12 * scale && local < per_start {
            // subgradient of the active minima: pull toward the tightest
            // centers
            let mut dir = vec![0.0; dim];
            let mut active = 0;
            for &i in indices {
                let c = &centers[i as usize];
                let g = radii[i as usize] - c.dist(&x);
                if g <= m + 1e-9 * scale {
                    let d = c.dist(&x).max(1e-30);
                    for (acc, (xc, cc)) in dir.iter_mut().zip(x.coords.iter().zip(&c.coords)) {
                        *acc += (cc - xc) / d;
                    }
                    active += 1;
                }
            }
            if active == 0 {
                break;
            }
            let norm = math::sqrt(dir.iter().map(|v| v * v).sum::<f64>());
            let cand = if norm > 1e-30 {
                domain.project(&x.add_scaled(&dir, step / norm))
            } else {
                // balanced active set: probe a random direction
                let p = crate::geometry::sample_in_ball(&x, step, &mut rng);
                domain.project(&p)
            };
            let cm = margin(&cand, &mut evals);
            local += 1;
            if cm > m {
                x = cand;
                m = cm;
                if m > best_m {
                    best_m = m;
                    best = x.clone();
                }
            } else {
                step *= 0.6;
            }
        }
    }
    (best, best_m, evals)
}

/// Nerve faces that verification flagged, with the reason.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FaceIssue {
    /// Cover intersection nonempty (margin recorded) but no sample point in
    /// it: the two nerves differ.
    NoSamplePoint { indices: Vec<u32>, margin: f64 },
    /// The subgraph induced by the points of this intersection did not
    /// dismantle.
    NotDismantlable { indices: Vec<u32>, residual: usize },
    /// A maximal clique fit in no single cover element.
    CliqueNotCovered { clique: Vec<u32> },
}

/// Verdicts for the three nerve conditions, with per-face failure detail.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NerveReport {
    pub condition_a: bool,
    pub condition_b: bool,
    pub condition_c: bool,
    /// Maximal faces of the nerve of the cover elements.
    pub nerve_a: Vec<Vec<u32>>,
    /// Maximal faces of the nerve of the induced subcomplexes.
    pub nerve_delta: Vec<Vec<u32>>,
    pub issues: Vec<FaceIssue>,
    pub epsilon: f64,
}

/// Checks conditions a, b and c for a cover against the radius graph built
/// from the same cloud at the same radius.
pub fn verify_nerve(
    cloud: &PointCloud,
    graph: &GeometricGraph,
    cover: &Cover,
) -> Result<NerveReport, CoverError> {
    if (graph.r - cover.r).abs() > ABS_TOL {
        return Err(CoverError::RadiusMismatch {
            cover_r: cover.r,
            graph_r: graph.r,
        });
    }
    let n_elems = cover.len();
    let npts = cloud.points.len();

    // membership sets S_p = { i : p ∈ A_i }
    let words = n_elems.div_ceil(64).max(1);
    let mut masks: Vec<Vec<u64>> = vec![vec![0u64; words]; npts];
    let mut sets: Vec<Vec<u32>> = vec![Vec::new(); npts];
    for (p, point) in cloud.points.iter().enumerate() {
        for i in 0..n_elems {
            if cover.in_element(i, point) {
                masks[p][i / 64] |= 1u64 << (i % 64);
                sets[p].push(i as u32);
            }
        }
    }

    // nerve of the induced subcomplexes: all nonempty subsets of the S_p
    const FACE_BUDGET: usize = 1_000_000;
    let distinct: BTreeSet<Vec<u32>> = sets.iter().filter(|s| !s.is_empty()).cloned().collect();
    let mut delta_faces: BTreeSet<Vec<u32>> = BTreeSet::new();
    for s in &distinct {
        let k = s.len();
        if k > 20 {
            return Err(CoverError::FaceBudget(FACE_BUDGET));
        }
        for mask in 1u32..(1u32 << k) {
            let face: Vec<u32> = (0..k).filter(|b| mask & (1 << b) != 0).map(|b| s[b]).collect();
            delta_faces.insert(face);
            if delta_faces.len() > FACE_BUDGET {
                return Err(CoverError::FaceBudget(FACE_BUDGET));
            }
        }
    }

    // nerve of the cover elements: the build-time cache, plus any face with
    // an explicit sample-point witness (a point in the intersection proves
    // nonemptiness regardless of the optimizer)
    let mut a_faces: BTreeMap<Vec<u32>, f64> = cover
        .faces
        .iter()
        .map(|f| (f.indices.clone(), f.margin))
        .collect();
    for f in &delta_faces {
        a_faces.entry(f.clone()).or_insert(0.0);
    }

    let mut issues: Vec<FaceIssue> = Vec::new();

    // condition a: every maximal clique inside one element
    let cliques = maximal_cliques(&graph.graph, FACE_BUDGET)?;
    let mut condition_a = true;
    for clique in &cliques {
        let mut common = vec![!0u64; words];
        for &p in clique {
            for (acc, m) in common.iter_mut().zip(&masks[p as usize]) {
                *acc &= *m;
            }
        }
        if common.iter().all(|&w| w == 0) {
            condition_a = false;
            if issues.len() < 64 {
                issues.push(FaceIssue::CliqueNotCovered {
                    clique: clique.clone(),
                });
            }
        }
    }

    // condition b: each nerve-delta face induces a dismantlable subgraph,
    // dismantled farthest-from-anchor first
    let mut condition_b = true;
    for face in &delta_faces {
        let members: Vec<u32> = (0..npts as u32)
            .filter(|&p| face.iter().all(|&i| {
                masks[p as usize][(i / 64) as usize] & (1u64 << (i % 64)) != 0
            }))
            .collect();
        debug_assert!(!members.is_empty());
        let sub = graph.graph.induced(&members);
        let anchor = anchor_point(cover, face, &members, cloud);
        let mut order: Vec<u32> = (0..members.len() as u32).collect();
        order.sort_by(|&a, &b| {
            let da = anchor.dist(&cloud.points[members[a as usize] as usize]);
            let db = anchor.dist(&cloud.points[members[b as usize] as usize]);
            db.partial_cmp(&da).unwrap().then(a.cmp(&b))
        });
        let mut keys = vec![0u64; members.len()];
        for (rank, &v) in order.iter().enumerate() {
            keys[v as usize] = rank as u64;
        }
        let record = dismantle_with_order(&sub, &RemovalOrder::ByKey(keys))
            .expect("face member set is nonempty");
        if !record.complete {
            condition_b = false;
            if issues.len() < 64 {
                issues.push(FaceIssue::NotDismantlable {
                    indices: face.clone(),
                    residual: record.residual.len(),
                });
            }
        }
    }

    // condition c: the two nerves coincide
    let mut condition_c = true;
    for (face, margin) in &a_faces {
        if !delta_faces.contains(face) {
            condition_c = false;
            if issues.len() < 64 {
                issues.push(FaceIssue::NoSamplePoint {
                    indices: face.clone(),
                    margin: *margin,
                });
            }
        }
    }
    // (sample-point faces were merged into the cover nerve above, so the
    // reverse inclusion holds by construction; keep the check for clarity)
    debug_assert!(delta_faces.iter().all(|f| a_faces.contains_key(f)));

    Ok(NerveReport {
        condition_a,
        condition_b,
        condition_c,
        nerve_a: maximal_faces(a_faces.keys().cloned().collect()),
        nerve_delta: maximal_faces(delta_faces.iter().cloned().collect()),
        issues,
        epsilon: cover.epsilon,
    })
}

fn anchor_point(cover: &Cover, face: &[u32], members: &[u32], cloud: &PointCloud) -> Point {
    let target = cover
        .faces
        .iter()
        .find(|f| f.indices == face)
        .map(|f| f.witness.clone())
        .unwrap_or_else(|| {
            let dim = cover.domain.dim();
            let mut c = vec![0.0; dim];
            for &i in face {
                for (acc, v) in c.iter_mut().zip(&cover.centers[i as usize].coords) {
                    *acc += v;
                }
            }
            for v in c.iter_mut() {
                *v /= face.len() as f64;
            }
            Point::new(c)
        });
    // the anchor is the member point closest to the inner-ball center
    members
        .iter()
        .map(|&p| &cloud.points[p as usize])
        .min_by(|a, b| a.dist(&target).partial_cmp(&b.dist(&target)).unwrap())
        .cloned()
        .unwrap_or(target)
}

fn maximal_faces(faces: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    let set: BTreeSet<Vec<u32>> = faces.into_iter().collect();
    let mut out: Vec<Vec<u32>> = Vec::new();
    'outer: for f in set.iter().rev() {
        for g in &out {
            if f.len() < g.len() && f.iter().all(|i| g.contains(i)) {
                continue 'outer;
            }
        }
        out.push(f.clone());
    }
    out.sort();
    out
}

/// Witness-ball search inside `W(x, y, r) ∩ ⋂_{i∈I} A_i`, the variant used
/// on non-convex domains where the segment argument is unavailable.
///
/// The W-side is anchored by the constructed witness ball of
/// [`w_witness_ball`], added to the constraint system as one more ball; the
/// found center is re-checked with [`w_contains`] probes before it is
/// returned.
pub fn smooth_condition_b5(
    cover: &Cover,
    indices: &[u32],
    x: &Point,
    y: &Point,
    probe_budget: usize,
    seed: u64,
) -> Result<Option<WitnessBall>, CoverError> {
    let r = cover.r;
    let dist = x.dist(y);
    if dist < r - ABS_TOL {
        return Err(CoverError::BadParameters(String::from(
            "applicable only when |x - y| >= r; use direct adjacency below r",
        )));
    }
    let lambda = (dist / r).max(1.0);
    let anchor = w_witness_ball(x, y, r, lambda)?;

    let mut centers: Vec<Point> = indices
        .iter()
        .map(|&i| cover.centers[i as usize].clone())
        .collect();
    let mut radii: Vec<f64> = indices.iter().map(|&i| cover.radii[i as usize]).collect();
    centers.push(anchor.center.clone());
    radii.push(anchor.radius);
    let all: Vec<u32> = (0..centers.len() as u32).collect();
    let (witness, margin, _) = search_intersection_point(
        &cover.domain,
        &centers,
        &radii,
        &all,
        probe_budget.max(2_000),
        seed,
        Some(&anchor.center),
    );
    if margin <= ABS_TOL {
        return Ok(None);
    }
    let verdict = w_contains(x, y, r, &witness, 512, seed ^ 0xA5A5_5A5A)?;
    if !verdict.holds {
        return Ok(None);
    }
    Ok(Some(WitnessBall {
        center: witness,
        radius: margin,
        claim: WitnessClaim::WMembership,
    }))
}
