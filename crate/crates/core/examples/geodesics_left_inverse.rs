//! Complex geodesics of the diamond whose components both vanish, their linear
//! left inverses z1 + w z2, and a check that they realize the distance.

use lempertkit::geodesics::{left_inverse_for, verify_left_inverse, GeodesicParams, GeodesicRef};
use lempertkit::hyperbolic::poincare_distance_raw;
use lempertkit::metrics::kobayashi_distance;
use lempertkit::{DomainSpec, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        let g = GeodesicParams::random_full_zero_set(&mut rng, 0.9);
        let f = left_inverse_for(&g)?;
        let residual = verify_left_inverse(&f, GeodesicRef::Complex(&g), 64);
        println!("{}", serde_json::to_string(&g).expect("serializable"));
        if let lempertkit::CompetitorKind::LinearSum { tau1, tau2 } = f.kind {
            println!("    left inverse z1 + ({:.6}) z2, residual {residual:.1e}", tau2 / tau1);
        }
        let s = C64::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        let z = C64::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        let d = kobayashi_distance(&DomainSpec::Diamond, &g.eval(s), &g.eval(z))?;
        println!("    k(f(s), f(z)) = {:.8}, p(s, z) = {:.8}", d.value, poincare_distance_raw(s, z));
    }
    Ok(())
}
