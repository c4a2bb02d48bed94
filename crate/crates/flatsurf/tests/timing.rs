//! Ignored by default: scale probes used while tuning the packaged
//! surfaces. Run with `cargo test --test timing -- --ignored --nocapture`.

use flatsurf::lamination::dt::DtVector;
use flatsurf::lamination::realize::{flat_length_dt, DtRealizer};
use flatsurf::num::rat;
use flatsurf::strebel::ChainSurface;
use flatsurf::volume::{count_multicurves, CountConfig};

#[test]
#[ignore]
fn per_point_probe() {
    let t0 = std::time::Instant::now();
    let c = ChainSurface::new(
        [rat(1, 2), rat(3, 4), rat(1, 2)],
        [rat(4, 1), rat(1, 2), rat(4, 1)],
    )
    .unwrap();
    println!(
        "build {:?} polys {} tris {}",
        t0.elapsed(),
        c.st.surface.polygons.len(),
        c.tri.n_triangles()
    );
    for pairs in [
        vec![(1u32, 0i64), (0, 0), (0, 0)],
        vec![(0, 0), (2, 0), (0, 0)],
        vec![(1, 3), (2, -2), (1, 1)],
        vec![(2, 5), (4, 3), (2, -4)],
    ] {
        let dt = DtVector::new(pairs.clone());
        let t0 = std::time::Instant::now();
        let (lb, ub) = c.pl_bounds(&dt);
        let t1 = std::time::Instant::now();
        let len = flat_length_dt(&c, &dt).unwrap();
        let t2 = std::time::Instant::now();
        println!(
            "{:?}: lb {:.4} ub {:.4} len {:.4} | bounds {:?} tighten {:?}",
            pairs,
            lb,
            ub,
            len,
            t1 - t0,
            t2 - t1
        );
    }
}

#[test]
#[ignore]
fn count_probe() {
    let c = ChainSurface::new(
        [rat(1, 2), rat(3, 4), rat(1, 2)],
        [rat(4, 1), rat(1, 2), rat(4, 1)],
    )
    .unwrap();
    for l in [4i64, 8] {
        let t0 = std::time::Instant::now();
        let cfg = CountConfig::new(vec![rat(l, 1)]);
        let r = count_multicurves(&c, &cfg).unwrap();
        println!(
            "L={} N={} visited={} skipped={} tightens={} est={:.6} wall={:?}",
            l,
            r.counts[0],
            r.visited,
            r.pruned_skipped,
            r.shell_tightens,
            r.estimates[0],
            t0.elapsed()
        );
    }
}
