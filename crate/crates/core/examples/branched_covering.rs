//! The coverings z -> (z1^p1, z2^p2) from the ellipsoids |z1|^p1 + |z2|^p2 < 1
//! onto the diamond do not increase the metric; they preserve it when the
//! extremal disc has no zeros in the squared coordinates.

use lempertkit::domains::{random_point, random_unit_tangent};
use lempertkit::metrics::{ellipsoid_extremal, kappa_diamond};
use lempertkit::{DomainSpec, Point2, Result, Tangent2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (p1, p2) in [(2u8, 1u8), (1, 2), (2, 2)] {
        let e = DomainSpec::Ellipsoid { q1: f64::from(p1), q2: f64::from(p2) };
        for _ in 0..3 {
            let z = random_point(&e, &mut rng, 0.85);
            let x = random_unit_tangent(&e, &mut rng);
            let Some((k_e, it)) = ellipsoid_extremal(f64::from(p1), f64::from(p2), &z, &x)? else { continue };
            let sq = |w: lempertkit::C64, v: lempertkit::C64, p: u8| if p == 2 { (w * w, 2.0 * w * v) } else { (w, v) };
            let (w1, y1) = sq(z.z1, x.x1, p1);
            let (w2, y2) = sq(z.z2, x.x2, p2);
            let k_d = kappa_diamond(&Point2::new(w1, w2), &Tangent2::new(y1, y2))?.value;
            println!(
                "E{{{p1},{p2}}}: kappa_E {k_e:.10} >= kappa_diamond {k_d:.10} (zeros r = {:?}, |alpha| = [{:.3}, {:.3}])",
                it.disc.r,
                it.disc.alpha[0].norm(),
                it.disc.alpha[1].norm()
            );
        }
    }
    Ok(())
}
