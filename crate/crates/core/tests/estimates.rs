use std::f64::consts::{FRAC_PI_2, PI};

use pmc::estimates::{confinement_quantities, probe_vertical_heights, Verdict};
use pmc::rotational::cmc_sphere_diameter;
use pmc::{Kappa, PrescribedFunction};

const HYP: Kappa = Kappa::HYPERBOLIC;
const SPH: Kappa = Kappa::SPHERICAL;

fn c(v: f64) -> PrescribedFunction {
    PrescribedFunction::constant(v)
}

fn radii(max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| max * k as f64 / n as f64).collect()
}

#[test]
fn unit_prescription_is_capped_by_hemisphere() {
    let rep = probe_vertical_heights(&c(1.0), HYP, &radii(2.0, 10)).unwrap();
    assert_eq!(rep.bounded_verdict, Verdict::Bounded);
    let half = rep.comparison_height.unwrap();
    assert!((rep.c_empirical - half).abs() < 1e-4, "{} vs {half}", rep.c_empirical);
    assert!((rep.r_star.unwrap() - 3f64.ln()).abs() < 1e-3);
    assert!(rep.heights.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn subcritical_prescription_grows() {
    let rep = probe_vertical_heights(&c(0.4), HYP, &radii(20.0, 20)).unwrap();
    assert_eq!(rep.bounded_verdict, Verdict::Growing);
    assert!(rep.r_star.is_none());
    assert!(rep.comparison_height.is_none());
}

#[test]
fn spherical_unit_prescription_is_bounded() {
    let rep = probe_vertical_heights(&c(1.0), SPH, &radii(PI - 0.1, 12)).unwrap();
    assert_eq!(rep.bounded_verdict, Verdict::Bounded);
    assert!(rep.r_star.unwrap() < FRAC_PI_2);
}

#[test]
fn larger_curvature_gives_shallower_caps() {
    let a = probe_vertical_heights(&c(1.0), HYP, &radii(2.0, 8)).unwrap();
    let b = probe_vertical_heights(&c(1.5), HYP, &radii(2.0, 8)).unwrap();
    assert!(b.c_empirical < a.c_empirical);
}

#[test]
fn even_battery_is_bounded_by_sphere() {
    for json in [
        r#"{"type":"constant","value":0.8}"#,
        r#"{"type":"constant","value":2.0}"#,
        r#"{"type":"even-poly","coeffs":[1.0,0.5]}"#,
        r#"{"type":"even-poly","coeffs":[0.7,-0.1,0.3]}"#,
    ] {
        let h = PrescribedFunction::parse(json).unwrap();
        let rep = probe_vertical_heights(&h, HYP, &radii(3.0, 6)).unwrap();
        assert_eq!(rep.bounded_verdict, Verdict::Bounded, "{json}");
        assert!(rep.c_empirical <= rep.comparison_height.unwrap() + 1e-4, "{json}");
    }
}

#[test]
fn probes_are_deterministic() {
    let a = probe_vertical_heights(&c(0.9), HYP, &[0.3, 0.9, 0.6]).unwrap();
    let b = probe_vertical_heights(&c(0.9), HYP, &[0.9, 0.6, 0.3]).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn confinement_uses_sphere_diameter() {
    let rep = confinement_quantities(&c(1.0), HYP, 0.9, None).unwrap();
    assert!(rep.d > 0.0 && rep.d.is_finite());
    assert_eq!(rep.slab_width, 2.0 * rep.d);
    assert_eq!(rep.d, cmc_sphere_diameter(0.9, HYP).unwrap());
    assert!(rep.cylinder_radius_bound.is_none());

    let probe = probe_vertical_heights(&c(1.0), HYP, &radii(2.0, 4)).unwrap();
    let rep = confinement_quantities(&c(1.0), HYP, 0.9, Some(&probe)).unwrap();
    assert_eq!(rep.cylinder_radius_bound, Some(2.0 * rep.d + 8.0 * probe.c_empirical));
}
