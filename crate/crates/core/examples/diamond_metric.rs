//! Kobayashi–Royden metric of the diamond {|z1| + |z2| < 1}: the value, the
//! branch that attains it and every branch of the formula.

use lempertkit::metrics::{kappa_diamond, kobayashi_distance, quasieffective_branches};
use lempertkit::{DomainSpec, Point2, Result, Tangent2, C64};

fn main() -> Result<()> {
    let cases = [
        (Point2::real(0.3, 0.0), Tangent2::real(1.0, 0.0)),
        (Point2::real(0.2, 0.3), Tangent2::real(0.6, -0.8)),
        (Point2::new(C64::new(0.1, 0.4), C64::new(-0.2, 0.1)), Tangent2::new(C64::new(0.0, 1.0), C64::new(0.5, 0.0))),
    ];
    for (z, x) in cases {
        let k = kappa_diamond(&z, &x)?;
        let b = quasieffective_branches(&z, &x)?;
        println!("kappa({z}; {x}) = {:.10} via {:?}", k.value, k.achiever);
        for (v, a) in b.all() {
            println!("    {a:?}: {v:.10}");
        }
    }
    let d = kobayashi_distance(&DomainSpec::Diamond, &Point2::real(0.5, 0.0), &Point2::real(0.0, 0.3))?;
    println!("k((0.5,0),(0,0.3)) = {:.10} ({:?})", d.value, d.achiever);
    let d = kobayashi_distance(&DomainSpec::Diamond, &Point2::real(0.2, 0.1), &Point2::real(-0.1, 0.4))?;
    println!("k((0.2,0.1),(-0.1,0.4)) in [{:.8}, {:.8}]", d.lower, d.upper);
    Ok(())
}
