//! Certified two-sided bounds from the oracle: a Carathéodory-type competitor
//! below, an explicit analytic disc above.

use lempertkit::extremal::Problem;
use lempertkit::oracle::{sandwich, Budget};
use lempertkit::{CompetitorKind, DomainSpec, Point2, Result, Tangent2};

fn main() -> Result<()> {
    let budget = Budget::default();
    let problems = [
        (DomainSpec::Diamond, Problem::Pair(Point2::real(0.5, 0.0), Point2::real(0.0, 0.3))),
        (DomainSpec::Ellipsoid { q1: 1.5, q2: 3.0 }, Problem::Pair(Point2::real(0.2, -0.3), Point2::real(-0.4, 0.1))),
        (DomainSpec::Ball2, Problem::Tangent(Point2::real(0.3, 0.2), Tangent2::real(0.0, 1.0))),
    ];
    for (domain, problem) in problems {
        let s = sandwich(&domain, &problem, &budget)?;
        let lower = match s.lower_witness.map(|c| c.kind) {
            Some(CompetitorKind::LinearSum { .. }) => "linear sum",
            Some(CompetitorKind::AxisQuotient { .. }) => "axis quotient",
            Some(CompetitorKind::LempertDual { .. }) => "extremal left inverse",
            None => "none",
        };
        let upper = s.upper_witness.as_ref().map(|w| if w.disc.as_polynomial().is_some() { "polynomial disc" } else { "extremal disc" });
        println!(
            "{}: [{:.9}, {:.9}] width {:.1e} certified {} (lower {lower}, upper {})",
            domain.name(),
            s.lower,
            s.upper,
            s.width,
            s.certified,
            upper.unwrap_or("none")
        );
    }
    Ok(())
}
