//! Cross-module invariants: witness-ball containment, monotonicity
//! properties, and statistical behavior of coverage.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ripslab_core::complex::{betti, enumerate};
use ripslab_core::covernerve::build_cover_adaptive;
use ripslab_core::dismantle::dismantle;
use ripslab_core::domains::{check_coverage, sample, DensitySpec, Domain};
use ripslab_core::geometry::{
    delta1, delta3, inner_ball, sample_ball_intersection, sample_in_ball, w_contains,
    w_witness_ball, Point,
};
use ripslab_core::proximity::build_graph;

fn arb_point(d: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-10.0f64..10.0, d).prop_map(Point::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_factors_monotone_nonincreasing(a in 1.0f64..50.0, b in 0.0f64..10.0) {
        let lo = a;
        let hi = a + b;
        prop_assert!(delta1(hi) <= delta1(lo) + 1e-15);
        prop_assert!(delta3(hi) <= delta3(lo) + 1e-15);
    }

    #[test]
    fn witness_center_lies_on_segment(
        d in 2usize..4,
        seed in any::<u64>(),
        lambda_extra in 0.0f64..3.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Point::new((0..d).map(|_| rng.gen_range(-5.0..5.0)).collect());
        let mut y = x.clone();
        while y.dist(&x) < 1e-6 {
            y = Point::new((0..d).map(|_| rng.gen_range(-5.0..5.0)).collect());
        }
        let sep = x.dist(&y);
        let r = sep / (1.0 + rng.gen_range(0.0..lambda_extra));
        let lambda = (sep / r) * (1.0 + rng.gen_range(0.0..0.5));
        let wb = w_witness_ball(&x, &y, r, lambda).unwrap();
        // collinear and between: |x-z| + |z-y| = |x-y|
        let through = x.dist(&wb.center) + wb.center.dist(&y);
        prop_assert!((through - sep).abs() <= 1e-9);
    }

    #[test]
    fn inner_ball_inside_query_ball_and_domain(
        d in 2usize..4,
        seed in any::<u64>(),
    ) {
        // model X as the ball B(c, rho) itself, with x a member of X
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Point::new((0..d).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let rho = rng.gen_range(0.2..2.0);
        let lambda = rng.gen_range(2.0..6.0); // diam(X)/inr(X) = 2 for a ball
        let x = sample_in_ball(&c, rho, &mut rng);
        let r = rng.gen_range(0.01..2.0 * rho);
        let wb = inner_ball(&x, &c, rho, r, lambda).unwrap();
        // triangle inequalities, exact arithmetic
        prop_assert!(x.dist(&wb.center) + wb.radius <= r + 1e-12);
        prop_assert!(c.dist(&wb.center) + wb.radius <= rho + 1e-12);
        prop_assert!((wb.radius - delta3(lambda) * r).abs() <= 1e-12);
    }

    #[test]
    fn edge_sets_monotone_in_radius(seed in any::<u64>(), n in 20usize..80) {
        let dom = Domain::unit_box(2);
        let dens = DensitySpec::uniform(&dom);
        let cloud = sample(&dom, &dens, n, seed).unwrap();
        let g1 = build_graph(&cloud, 0.12);
        let g2 = build_graph(&cloud, 0.2);
        for v in 0..n as u32 {
            for &w in g1.graph.neighbors(v) {
                prop_assert!(g2.graph.has_edge(v, w));
            }
        }
    }
}

/// Random valid witness-ball configurations: every probe drawn from the ball
/// intersection stays within the lemma margin of the constructed center, so
/// the whole witness ball sits inside W. Zero violations at 1e-9.
#[test]
fn witness_balls_absorb_the_intersection() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for case in 0..200 {
        let d = if case % 2 == 0 { 2 } else { 3 };
        let x = Point::new((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect());
        let mut y = x.clone();
        while y.dist(&x) < 1e-3 {
            y = Point::new((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect());
        }
        let sep = x.dist(&y);
        let r = sep / rng.gen_range(1.0..4.0);
        let lambda = (sep / r) * rng.gen_range(1.0..1.5);
        let wb = w_witness_ball(&x, &y, r, lambda).unwrap();

        // margin route: every intersection point u satisfies
        // |u - z| <= (1 - delta1) r, hence every point of the witness ball
        // absorbs it
        let bound = (1.0 - delta1(lambda)) * r + 1e-9;
        for _ in 0..200 {
            let u = sample_ball_intersection(&x, r, &y, sep, &mut rng, 10_000).unwrap();
            assert!(
                wb.center.dist(&u) <= bound,
                "case {case}: margin violated"
            );
        }
        // probe route on the member predicate itself
        let v = w_contains(&x, &y, r, &wb.center, 256, 1000 + case).unwrap();
        assert!(v.holds && !v.vacuous, "case {case}");
    }
}

/// Any set of diameter <= r built as (point + its r-neighborhood sample)
/// fits inside a single cover element.
#[test]
fn cover_swallows_small_sets() {
    let dom = Domain::unit_box(2);
    let r = 0.2;
    let cover = build_cover_adaptive(&dom, r, 0.05, 2_000, 40).unwrap();
    let dens = DensitySpec::uniform(&dom);
    let cloud = sample(&dom, &dens, 400, 41).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..1000 {
        let p = Point::new(vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]);
        let mut set: Vec<&Point> = cloud
            .points
            .iter()
            .filter(|q| q.dist(&p) <= r)
            .collect();
        set.push(&p);
        let fits = (0..cover.len()).any(|i| {
            set.iter()
                .all(|q| cover.centers[i].dist(q) <= cover.radii[i] + 1e-9)
        });
        assert!(fits, "set around {p:?} fits in no single element");
    }
}

/// Empirical coverage probability is nondecreasing in the scale constant c
/// (radius r = c (ln n / n)^{1/d}), within two standard errors.
#[test]
fn coverage_probability_nondecreasing_in_c() {
    let dom = Domain::unit_box(2);
    let dens = DensitySpec::uniform(&dom);
    let n = 300usize;
    let trials = 50;
    let cs = [0.8, 1.2, 1.6, 2.0, 2.4];
    let mut phat = Vec::new();
    for (ci, &c) in cs.iter().enumerate() {
        let r = c * ((n as f64).ln() / n as f64).sqrt();
        let mut covered = 0;
        for t in 0..trials {
            let cloud = sample(&dom, &dens, n, (7000 + ci * 100 + t) as u64).unwrap();
            if check_coverage(&cloud, &dom, r, r / 10.0).unwrap().covered {
                covered += 1;
            }
        }
        phat.push(covered as f64 / trials as f64);
    }
    let m = trials as f64;
    for w in 0..phat.len() - 1 {
        let (p1, p2) = (phat[w], phat[w + 1]);
        let se = ((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / m).sqrt();
        assert!(
            p2 >= p1 - 2.0 * se - 1e-9,
            "coverage probability dropped: {phat:?}"
        );
    }
}

/// Dismantlable radius graphs have point-like homology; spot scale check.
#[test]
fn dismantlable_geometric_graphs_look_contractible() {
    let dom = Domain::unit_box(2);
    let dens = DensitySpec::uniform(&dom);
    let mut seen = 0;
    for seed in 0..40u64 {
        let n = 18 + (seed as usize % 8);
        let cloud = sample(&dom, &dens, n, 300 + seed).unwrap();
        let c = 2.0 + (seed % 3) as f64;
        let r = c * ((n as f64).ln() / n as f64).sqrt();
        let gg = build_graph(&cloud, r);
        let rec = dismantle(&gg.graph).unwrap();
        if !rec.complete {
            continue;
        }
        let profile = betti(&enumerate(&gg.graph, 3).unwrap());
        assert_eq!(profile.betti[0], 1, "seed {seed}");
        assert!(profile.betti[1..].iter().all(|&b| b == 0), "seed {seed}");
        seen += 1;
    }
    assert!(seen >= 5, "too few dismantlable instances: {seen}");
}
