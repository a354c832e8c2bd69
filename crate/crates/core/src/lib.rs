//! Holomorphically invariant distances and metrics on the diamond
//! `{|z1| + |z2| < 1}` and on convex complex ellipsoids in C^2.
//!
//! The crate is organised bottom-up:
//!
//! * [`hyperbolic`]: Poincaré distance and metric on the unit disc, disc automorphisms.
//! * [`domains`]: the supported model domains, membership, and the symmetries of the diamond.
//! * [`extremal`]: explicit extremal discs of convex ellipsoids and their holomorphic left inverses.
//! * [`competitor`]: holomorphic maps into the unit disc used as Carathéodory lower bounds.
//! * [`geodesics`]: complex geodesics of the diamond, left inverses, real geodesics.
//! * [`metrics`]: closed forms, the quasieffective formula for the diamond, certified distances.
//! * [`oracle`]: brute-force analytic-disc upper bounds and two-sided certificates.
//! * [`analysis`]: indicatrix geometry and the isometry-rigidity harness.
//! * [`cli`]: the command-line front end used by the `lempertkit` binary.

pub mod analysis;
pub mod cli;
pub mod competitor;
pub mod domains;
pub mod error;
pub mod extremal;
pub mod geodesics;
pub mod hyperbolic;
pub mod metrics;
pub mod optimize;
pub mod oracle;
pub mod verify;

pub use num_complex::Complex64 as C64;

pub use competitor::{Competitor, CompetitorFamily, CompetitorKind};
pub use domains::{DiamondSymmetry, DomainSpec, Point2, Tangent2};
pub use error::{Error, Result};
pub use hyperbolic::{DiscAutomorphism, UnitDiscPoint};
pub use metrics::{Achiever, MetricResult};
