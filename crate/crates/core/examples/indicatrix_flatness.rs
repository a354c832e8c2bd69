//! Flat pieces of indicatrices: the diamond's indicatrix at the origin is the
//! diamond itself, so it is flat across each face; the ball's is round.

use lempertkit::analysis::{classify_flatness, sample_indicatrix, Flatness};
use lempertkit::{DomainSpec, Point2, Result};

fn main() -> Result<()> {
    for (domain, z) in [(DomainSpec::Diamond, Point2::ORIGIN), (DomainSpec::Ball2, Point2::real(0.3, -0.2))] {
        let s = sample_indicatrix(&domain, &z, 200)?;
        let d = classify_flatness(&s)?;
        let count = |f: Flatness| d.iter().filter(|x| x.flag == f).count();
        println!(
            "{} at {z}: FLAT {}, STRICT {}, INCONCLUSIVE {}",
            domain.name(),
            count(Flatness::Flat),
            count(Flatness::Strict),
            count(Flatness::Inconclusive)
        );
    }
    let mut s = sample_indicatrix(&DomainSpec::Diamond, &Point2::ORIGIN, 8)?;
    s.classify()?;
    s.write_csv(std::io::stdout())?;
    Ok(())
}
