//! Sweep configuration, per-trial execution, and the parallel driver.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ripslab_core::complex::{self, BettiProfile};
use ripslab_core::covernerve::{build_cover_adaptive, verify_nerve};
use ripslab_core::dismantle::{dismantle, pursue, RobberStrategy};
use ripslab_core::domains::{check_coverage, sample, DensitySpec, Domain};
use ripslab_core::geometry::{Ball, Point};
use ripslab_core::proximity::build_graph;

use crate::{derive_seed, radius_from_c};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Domain family, instantiated per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DomainSpec {
    UnitBox,
    Rect { min: Vec<f64>, max: Vec<f64> },
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl DomainSpec {
    pub fn instantiate(&self, dim: usize) -> Result<Domain, SweepError> {
        let build = |r: Result<Domain, ripslab_core::domains::DomainError>| {
            r.map_err(|e| SweepError::Invalid(e.to_string()))
        };
        match self {
            DomainSpec::UnitBox => Ok(Domain::unit_box(dim)),
            DomainSpec::Rect { min, max } => {
                if min.len() != dim || max.len() != dim {
                    return Err(SweepError::Invalid(format!(
                        "box corners have dimension {}, sweep dimension is {dim}",
                        min.len()
                    )));
                }
                build(Domain::rect(min.clone(), max.clone()))
            }
            DomainSpec::Ball { radius } => {
                build(Domain::ball(Point::new(vec![0.0; dim]), *radius))
            }
            DomainSpec::Annulus { inner, outer } => {
                build(Domain::annulus(Point::new(vec![0.0; dim]), *inner, *outer))
            }
        }
    }
}

impl FromStr for DomainSpec {
    type Err = String;

    /// `unit-box`, `ball:R`, `annulus:INNER,OUTER`, or `box:x0,y0;x1,y1`.
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "unit-box" {
            return Ok(DomainSpec::UnitBox);
        }
        if let Some(rest) = s.strip_prefix("ball:") {
            let radius: f64 = rest.parse().map_err(|_| format!("bad ball radius `{rest}`"))?;
            return Ok(DomainSpec::Ball { radius });
        }
        if let Some(rest) = s.strip_prefix("annulus:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 2 {
                return Err(format!("annulus wants `inner,outer`, got `{rest}`"));
            }
            let inner: f64 = parts[0].parse().map_err(|_| "bad inner radius".to_string())?;
            let outer: f64 = parts[1].parse().map_err(|_| "bad outer radius".to_string())?;
            return Ok(DomainSpec::Annulus { inner, outer });
        }
        if let Some(rest) = s.strip_prefix("box:") {
            let corners: Vec<&str> = rest.split(';').collect();
            if corners.len() != 2 {
                return Err(format!("box wants `min;max`, got `{rest}`"));
            }
            let parse = |t: &str| -> Result<Vec<f64>, String> {
                t.split(',')
                    .map(|v| v.trim().parse().map_err(|_| format!("bad coordinate `{v}`")))
                    .collect()
            };
            return Ok(DomainSpec::Rect {
                min: parse(corners[0])?,
                max: parse(corners[1])?,
            });
        }
        Err(format!(
            "unknown domain `{s}` (expected unit-box, ball:R, annulus:I,O, box:min;max)"
        ))
    }
}

/// Density family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DensityChoice {
    Uniform,
    /// Ball bumps `(center.., radius, weight)`, applied over a uniform base.
    BoundedRatio { pieces: Vec<(Vec<f64>, f64, f64)> },
}

impl DensityChoice {
    pub fn instantiate(&self, domain: &Domain) -> Result<DensitySpec, SweepError> {
        match self {
            DensityChoice::Uniform => Ok(DensitySpec::uniform(domain)),
            DensityChoice::BoundedRatio { pieces } => {
                let balls: Vec<(Ball, f64)> = pieces
                    .iter()
                    .map(|(c, r, w)| (Ball::new(Point::new(c.clone()), *r), *w))
                    .collect();
                DensitySpec::bounded_ratio(domain, balls)
                    .map_err(|e| SweepError::Invalid(e.to_string()))
            }
        }
    }
}

impl FromStr for DensityChoice {
    type Err = String;

    /// `uniform` or `bounded:<c1,..,cd,r,w>[;...]`.
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "uniform" {
            return Ok(DensityChoice::Uniform);
        }
        if let Some(rest) = s.strip_prefix("bounded:") {
            let mut pieces = Vec::new();
            for chunk in rest.split(';') {
                let vals: Result<Vec<f64>, _> =
                    chunk.split(',').map(|v| v.trim().parse::<f64>()).collect();
                let vals = vals.map_err(|_| format!("bad piece `{chunk}`"))?;
                if vals.len() < 3 {
                    return Err(format!("piece `{chunk}` wants center..,radius,weight"));
                }
                let (center, tail) = vals.split_at(vals.len() - 2);
                pieces.push((center.to_vec(), tail[0], tail[1]));
            }
            return Ok(DensityChoice::BoundedRatio { pieces });
        }
        Err(format!("unknown density `{s}`"))
    }
}

/// Radius parameterization: the scale constant c (radius
/// `c (ln n / n)^{1/d}`) or raw radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadiusSpec {
    C(Vec<f64>),
    R(Vec<f64>),
}

/// Which checks a trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSet {
    pub dismantle: bool,
    pub betti: bool,
    pub coverage: bool,
    pub nerve: bool,
    pub pursuit: bool,
}

impl CheckSet {
    pub fn dismantle_only() -> CheckSet {
        CheckSet {
            dismantle: true,
            betti: false,
            coverage: false,
            nerve: false,
            pursuit: false,
        }
    }
}

impl FromStr for CheckSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut set = CheckSet {
            dismantle: false,
            betti: false,
            coverage: false,
            nerve: false,
            pursuit: false,
        };
        for item in s.split(',') {
            match item.trim() {
                "dismantle" => set.dismantle = true,
                "betti" => set.betti = true,
                "coverage" => set.coverage = true,
                "nerve" => set.nerve = true,
                "pursuit" => set.pursuit = true,
                other => return Err(format!("unknown check `{other}`")),
            }
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub domain: DomainSpec,
    pub density: DensityChoice,
    pub dims: Vec<usize>,
    pub ns: Vec<usize>,
    pub radius: RadiusSpec,
    pub trials: usize,
    pub base_seed: u64,
    /// Defaults to d + 1 per trial when absent.
    pub dim_cap: Option<usize>,
    pub epsilon: f64,
    pub simplex_budget: usize,
    pub checks: CheckSet,
    /// Radii above diam(K) are a configuration error unless set.
    pub allow_r_above_diam: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.trials == 0 {
            return Err(SweepError::Invalid("trials must be >= 1".into()));
        }
        if self.dims.is_empty() || self.ns.is_empty() {
            return Err(SweepError::Invalid("dims and n values must be nonempty".into()));
        }
        if self.ns.iter().any(|&n| n == 0) {
            return Err(SweepError::Invalid("n must be >= 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(SweepError::Invalid("epsilon must be > 0".into()));
        }
        match &self.radius {
            RadiusSpec::C(cs) => {
                if cs.is_empty() || cs.iter().any(|&c| !(c > 0.0)) {
                    return Err(SweepError::Invalid("c values must be positive".into()));
                }
            }
            RadiusSpec::R(rs) => {
                if rs.is_empty() || rs.iter().any(|&r| !(r > 0.0)) {
                    return Err(SweepError::Invalid("r values must be positive".into()));
                }
            }
        }
        if !self.allow_r_above_diam {
            for &d in &self.dims {
                let dom = self.domain.instantiate(d)?;
                for (_, r) in self.cells_for(d) {
                    if r > dom.diameter() {
                        return Err(SweepError::Invalid(format!(
                            "radius {r} exceeds diam(K) = {} in dimension {d}; \
                             pass allow_r_above_diam to permit this",
                            dom.diameter()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// (c, r) pairs per n for one dimension, in sweep order.
    fn cells_for(&self, d: usize) -> Vec<(Option<f64>, f64)> {
        let mut out = Vec::new();
        for &n in &self.ns {
            match &self.radius {
                RadiusSpec::C(cs) => {
                    for &c in cs {
                        out.push((Some(c), radius_from_c(c, n, d)));
                    }
                }
                RadiusSpec::R(rs) => {
                    for &r in rs {
                        out.push((None, r));
                    }
                }
            }
        }
        out
    }
}

/// Wall-clock stage timings in milliseconds. Not reproducible across runs;
/// excluded from replay comparisons.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageMillis {
    pub sample: u64,
    pub graph: u64,
    pub dismantle: u64,
    pub betti: u64,
    pub coverage: u64,
    pub nerve: u64,
    pub pursuit: u64,
    pub total: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NerveFlags {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    /// Inflation step actually used; 0 marks the complete-complex
    /// short-circuit where no cover is built.
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PursuitSummary {
    pub captured: bool,
    pub turns: usize,
    pub vertices: usize,
}

/// One trial: the cell coordinates, the seed, and whatever the configured
/// checks produced. Every field except the timings is reproducible from
/// (cell, seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub d: usize,
    pub n: usize,
    pub c: Option<f64>,
    pub r: f64,
    pub domain: String,
    pub seed: u64,
    pub dismantlable: Option<bool>,
    pub betti: Option<BettiProfile>,
    pub covered: Option<bool>,
    pub nerve: Option<NerveFlags>,
    pub pursuit: Option<PursuitSummary>,
    pub error: Option<String>,
    pub ms: StageMillis,
}

impl TrialResult {
    /// Equality of everything a replay must reproduce (all fields except
    /// wall-clock timings).
    pub fn same_outcome(&self, other: &TrialResult) -> bool {
        let a = (
            self.d,
            self.n,
            self.c,
            self.r,
            &self.domain,
            self.seed,
            self.dismantlable,
            &self.betti,
            self.covered,
        );
        let b = (
            other.d,
            other.n,
            other.c,
            other.r,
            &other.domain,
            other.seed,
            other.dismantlable,
            &other.betti,
            other.covered,
        );
        a == b && self.nerve == other.nerve && self.pursuit == other.pursuit
            && self.error == other.error
    }
}

/// Runs one trial. Deterministic given its arguments; errors are recorded in
/// the result, never raised.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    domain: &Domain,
    density: &DensitySpec,
    d: usize,
    n: usize,
    c: Option<f64>,
    r: f64,
    seed: u64,
    checks: &CheckSet,
    dim_cap: usize,
    epsilon: f64,
    simplex_budget: usize,
) -> TrialResult {
    let t_start = Instant::now();
    let mut result = TrialResult {
        d,
        n,
        c,
        r,
        domain: domain.tag(),
        seed,
        dismantlable: None,
        betti: None,
        covered: None,
        nerve: None,
        pursuit: None,
        error: None,
        ms: StageMillis::default(),
    };
    let note_error = |res: &mut TrialResult, stage: &str, msg: String| {
        let tagged = format!("{stage}: {msg}");
        match &mut res.error {
            Some(e) => {
                e.push_str("; ");
                e.push_str(&tagged);
            }
            None => res.error = Some(tagged),
        }
    };

    let t0 = Instant::now();
    let cloud = match sample(domain, density, n, seed) {
        Ok(c) => c,
        Err(e) => {
            note_error(&mut result, "sample", e.to_string());
            result.ms.total = t_start.elapsed().as_millis() as u64;
            return result;
        }
    };
    result.ms.sample = t0.elapsed().as_millis() as u64;

    let needs_graph = checks.dismantle || checks.betti || checks.nerve || checks.pursuit;
    let graph = if needs_graph {
        let t = Instant::now();
        let g = build_graph(&cloud, r);
        result.ms.graph = t.elapsed().as_millis() as u64;
        Some(g)
    } else {
        None
    };

    let mut record = None;
    if checks.dismantle || checks.pursuit {
        let g = graph.as_ref().unwrap();
        let t = Instant::now();
        match dismantle(&g.graph) {
            Ok(rec) => {
                result.dismantlable = Some(rec.complete);
                record = Some(rec);
            }
            Err(e) => note_error(&mut result, "dismantle", e.to_string()),
        }
        result.ms.dismantle = t.elapsed().as_millis() as u64;
    }

    if checks.betti {
        let g = graph.as_ref().unwrap();
        let t = Instant::now();
        if g.graph.is_complete() {
            // the flag complex of a complete graph is a full simplex; its
            // profile is known exactly and enumeration would blow the budget
            result.betti = Some(complex::full_simplex_profile(n, dim_cap));
        } else {
            match complex::enumerate_with_budget(&g.graph, dim_cap, simplex_budget) {
                Ok(cx) => result.betti = Some(complex::betti(&cx)),
                Err(e) => note_error(&mut result, "betti", e.to_string()),
            }
        }
        result.ms.betti = t.elapsed().as_millis() as u64;
    }

    if checks.coverage {
        let t = Instant::now();
        match check_coverage(&cloud, domain, r, r / 10.0) {
            Ok(rep) => result.covered = Some(rep.covered),
            Err(e) => note_error(&mut result, "coverage", e.to_string()),
        }
        result.ms.coverage = t.elapsed().as_millis() as u64;
    }

    if checks.nerve {
        let g = graph.as_ref().unwrap();
        let t = Instant::now();
        if r >= domain.diameter() {
            // complete complex: nothing to verify
            result.nerve = Some(NerveFlags {
                a: true,
                b: true,
                c: true,
                epsilon: 0.0,
            });
        } else {
            match build_cover_adaptive(domain, r, epsilon, 4_000, seed) {
                Ok(cover) => match verify_nerve(&cloud, g, &cover) {
                    Ok(rep) => {
                        result.nerve = Some(NerveFlags {
                            a: rep.condition_a,
                            b: rep.condition_b,
                            c: rep.condition_c,
                            epsilon: cover.epsilon,
                        });
                    }
                    Err(e) => note_error(&mut result, "nerve", e.to_string()),
                },
                Err(e) => note_error(&mut result, "nerve", e.to_string()),
            }
        }
        result.ms.nerve = t.elapsed().as_millis() as u64;
    }

    if checks.pursuit {
        let g = graph.as_ref().unwrap();
        let t = Instant::now();
        if let Some(rec) = record.as_ref().filter(|rec| rec.complete) {
            match pursue(&g.graph, rec, RobberStrategy::GreedyEscape, seed) {
                Ok(tr) => {
                    result.pursuit = Some(PursuitSummary {
                        captured: tr.captured,
                        turns: tr.turns,
                        vertices: g.graph.n(),
                    });
                }
                Err(e) => note_error(&mut result, "pursuit", e.to_string()),
            }
        }
        result.ms.pursuit = t.elapsed().as_millis() as u64;
    }

    result.ms.total = t_start.elapsed().as_millis() as u64;
    result
}

/// Runs the whole sweep on a worker pool. Trial seeds derive from
/// (base_seed, cell index, trial index); results are ordered by cell then
/// trial regardless of completion order, and per-trial errors never abort
/// the sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<TrialResult>, SweepError> {
    config.validate()?;
    struct Job {
        domain: Domain,
        density: DensitySpec,
        d: usize,
        n: usize,
        c: Option<f64>,
        r: f64,
        seed: u64,
    }
    let mut jobs = Vec::new();
    let mut cell = 0u64;
    for &d in &config.dims {
        let domain = config.domain.instantiate(d)?;
        let density = config.density.instantiate(&domain)?;
        for &n in &config.ns {
            let pairs: Vec<(Option<f64>, f64)> = match &config.radius {
                RadiusSpec::C(cs) => cs
                    .iter()
                    .map(|&c| (Some(c), radius_from_c(c, n, d)))
                    .collect(),
                RadiusSpec::R(rs) => rs.iter().map(|&r| (None, r)).collect(),
            };
            for (c, r) in pairs {
                for trial in 0..config.trials {
                    jobs.push(Job {
                        domain: domain.clone(),
                        density: density.clone(),
                        d,
                        n,
                        c,
                        r,
                        seed: derive_seed(config.base_seed, cell, trial as u64),
                    });
                }
                cell += 1;
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|job| {
            let dim_cap = config.dim_cap.unwrap_or(job.d + 1);
            run_trial(
                &job.domain,
                &job.density,
                job.d,
                job.n,
                job.c,
                job.r,
                job.seed,
                &config.checks,
                dim_cap,
                config.epsilon,
                config.simplex_budget,
            )
        })
        .collect();
    Ok(results)
}
