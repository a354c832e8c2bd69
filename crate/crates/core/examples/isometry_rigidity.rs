//! Which real-linear maps of C^2 preserve the Kobayashi distance of the
//! diamond: rotations, conjugations and the coordinate swap pass, everything
//! else in the candidate set fails on some off-axis pair.

use lempertkit::analysis::{rigidity_experiment, RigidityConfig};
use lempertkit::Result;

fn main() -> Result<()> {
    let cfg = RigidityConfig { pairs: 40, seed: 0, rotation_grid: 1, random_linear: 10 };
    let report = rigidity_experiment(&cfg)?;
    for c in &report.candidates {
        let verdict = match (c.accepted, c.rejected) {
            (true, _) => "isometry",
            (_, true) => "rejected",
            _ => "undecided",
        };
        println!("{:<40} defect {:.2e} over {:>3} pairs: {verdict}", c.label, c.defect, c.evaluated);
    }
    println!("consistent: {}", report.consistent);
    println!("{}", report.note);
    Ok(())
}
