use std::time::Instant;
use ripslab_core::covernerve::build_cover;
use ripslab_core::domains::Domain;
use ripslab_core::geometry::Point;

fn main() {
    let dom = Domain::ball(Point::new(vec![0.0, 0.0]), 1.0).unwrap();
    for r in [0.2, 0.15] {
        for eps in [0.05, 0.025] {
            let t = Instant::now();
            match build_cover(&dom, r, eps, 2000, 7) {
                Ok(c) => println!(
                    "r={r} eps={eps}: N={} inflations={} rounds={} evals={} time={:?}",
                    c.len(), c.inflated.len(), c.diagnostics.inflation_rounds,
                    c.diagnostics.optimizer_evals, t.elapsed()
                ),
                Err(e) => println!("r={r} eps={eps}: ERR {e} time={:?}", t.elapsed()),
            }
        }
    }
}
