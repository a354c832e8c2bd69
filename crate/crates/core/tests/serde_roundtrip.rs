//! JSON round trips of the public data types.

use lempertkit::analysis::{sample_indicatrix, CandidateIsometry};
use lempertkit::extremal::Problem;
use lempertkit::geodesics::GeodesicParams;
use lempertkit::metrics::{kappa_diamond, kobayashi_distance};
use lempertkit::oracle::{sandwich, Budget};
use lempertkit::{Competitor, DiamondSymmetry, DomainSpec, Point2, Tangent2, C64};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn roundtrip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) {
    let text = serde_json::to_string(v).unwrap();
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, v, "{text}");
}

#[test]
fn domains_points_and_competitors() {
    for d in [DomainSpec::Disc, DomainSpec::Ball2, DomainSpec::Diamond, DomainSpec::Ellipsoid { q1: 1.5, q2: 3.0 }] {
        roundtrip(&d);
    }
    roundtrip(&Point2::new(C64::new(0.1, -0.2), C64::new(0.3, 0.0)));
    roundtrip(&Tangent2::real(1.0, -1.0));
    roundtrip(&Competitor::linear_sum(C64::new(1.0, 0.0), C64::new(0.0, 1.0)).unwrap());
    roundtrip(&Competitor::axis_quotient(C64::new(0.0, -1.0), 2).unwrap());
    roundtrip(&DiamondSymmetry::new(C64::new(0.0, 1.0), C64::new(-1.0, 0.0), true, false, true).unwrap());
    roundtrip(&CandidateIsometry::half_conjugation(1).unwrap());
}

#[test]
fn geodesic_params_keep_their_shape() {
    let g = GeodesicParams::new(
        [C64::new(0.3, 0.1), C64::new(0.2, -0.2)],
        [C64::new(0.1, 0.0), C64::new(0.0, 0.2)],
        [1, 1],
        C64::new(0.05, 0.0),
    )
    .unwrap();
    roundtrip(&g);
    let v: serde_json::Value = serde_json::to_value(g).unwrap();
    assert_eq!(v["a"][0], serde_json::json!([0.3, 0.1]));
    assert_eq!(v["r"], serde_json::json!([1, 1]));
}

#[test]
fn certificates_and_results() {
    let w = Point2::real(0.2, 0.1);
    let z = Point2::new(C64::new(-0.1, 0.1), C64::new(0.3, 0.0));
    roundtrip(&sandwich(&DomainSpec::Diamond, &Problem::Pair(w, z), &Budget::default()).unwrap());
    roundtrip(&kobayashi_distance(&DomainSpec::Ellipsoid { q1: 2.0, q2: 1.0 }, &w, &z).unwrap());
    roundtrip(&kappa_diamond(&Point2::real(0.3, 0.0), &Tangent2::real(1.0, 0.0)).unwrap());
}

#[test]
fn indicatrix_sample() {
    let s = sample_indicatrix(&DomainSpec::Ball2, &Point2::real(0.1, 0.2), 5).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["radii"].as_array().unwrap().len(), 5);
    assert_eq!(v["domain"], serde_json::to_value(DomainSpec::Ball2).unwrap());
}
