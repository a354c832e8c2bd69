//! Poincaré distance and metric on the unit disc, and their invariance under
//! disc automorphisms.

use lempertkit::hyperbolic::{poincare_distance, poincare_metric, schwarz_pick_check};
use lempertkit::{DiscAutomorphism, Result, UnitDiscPoint, C64};

fn main() -> Result<()> {
    let a = UnitDiscPoint::real(-0.5)?;
    let b = UnitDiscPoint::real(0.3)?;
    println!("p(-0.5, 0.3) = {:.12}", poincare_distance(a, b));
    println!("metric at 0.5 in direction 1 = {:.12}", poincare_metric(UnitDiscPoint::real(0.5)?, C64::new(1.0, 0.0)));

    let m = DiscAutomorphism::new(C64::from_polar(1.0, 0.7), C64::new(0.2, -0.4))?;
    let (ma, mb) = (UnitDiscPoint::new(m.apply(a.value()))?, UnitDiscPoint::new(m.apply(b.value()))?);
    println!("after an automorphism      = {:.12}", poincare_distance(ma, mb));

    let pairs = [(a, b), (UnitDiscPoint::new(C64::new(0.1, 0.6))?, UnitDiscPoint::real(-0.8)?)];
    println!("z -> z^2 contracts: {}", schwarz_pick_check(|z| z * z, &pairs));
    Ok(())
}
