use std::f64::consts::{FRAC_PI_2, PI};

use pmc::graphs::residual_radial;
use pmc::rotational::{
    build_sphere, cmc_sphere_diameter, cylinder_radius, first_integral, integrate_profile, phase_plane, Closure,
    PhaseWindow, ProfileState,
};
use pmc::{Error, Kappa, PrescribedFunction};

const HYP: Kappa = Kappa::HYPERBOLIC;
const SPH: Kappa = Kappa::SPHERICAL;

fn c(v: f64) -> PrescribedFunction {
    PrescribedFunction::constant(v)
}

fn max_drift(step: f64) -> f64 {
    let s = build_sphere(&c(1.0), HYP, step).unwrap();
    s.samples.iter().skip(1).map(|p| (first_integral(HYP, 1.0, p) + 2.0).abs()).fold(0.0, f64::max)
}

#[test]
fn hyperbolic_sphere_equator_is_ln3() {
    let s = build_sphere(&c(1.0), HYP, 1e-4).unwrap();
    assert_eq!(s.closure, Closure::ClosedSphere);
    assert!(s.closure_defect.unwrap() < 1e-3);
    assert!((s.equator_radius() - 3f64.ln()).abs() < 1e-4, "{}", s.equator_radius());
    assert!(max_drift(1e-4) <= 1e-8);
}

#[test]
fn sphere_height_is_twice_lower_half() {
    let s = build_sphere(&c(1.0), HYP, 1e-4).unwrap();
    let h = s.height();
    assert!(h > 0.0);
    assert!((h - 2.0 * s.lower_half_height().unwrap()).abs() < 1e-6);
}

#[test]
fn even_prescription_gives_reflection_symmetric_profile() {
    let h = PrescribedFunction::parse(r#"{"type":"even-poly","coeffs":[1.0,0.3]}"#).unwrap();
    let s = build_sphere(&h, HYP, 1e-4).unwrap();
    let z0 = s.samples[0].z;
    let total = s.height();
    for k in 1..20 {
        let sigma = PI * k as f64 / 20.0;
        let a = s.z_at_angle(sigma).unwrap() - z0;
        let b = s.z_at_angle(PI - sigma).unwrap() - z0;
        assert!((a + b - total).abs() < 1e-6, "sigma {sigma}: {}", a + b - total);
    }
}

#[test]
fn first_integral_converges_at_fourth_order() {
    // At fine steps the drift sits at roundoff, so the order is measured coarse.
    let ratio = max_drift(1e-2) / max_drift(5e-3);
    assert!(ratio >= 12.0, "ratio {ratio}");
}

#[test]
fn spherical_sphere_stays_in_hemisphere() {
    let s = build_sphere(&c(1.0), SPH, 1e-4).unwrap();
    assert_eq!(s.closure, Closure::ClosedSphere);
    assert!(s.equator_radius() < FRAC_PI_2);
    // sin x + 2 cos x = 2 at the equator, so tan(x/2) = 1/2.
    let expected = 2.0 * 0.5f64.atan();
    assert!((s.equator_radius() - expected).abs() < 1e-4);
}

#[test]
fn angle_function_changes_sign_on_sphere() {
    let s = build_sphere(&c(1.0), HYP, 1e-3).unwrap();
    assert!(s.samples.iter().all(|p| (-1.0..=1.0).contains(&p.nu())));
    assert!(s.samples.iter().any(|p| p.nu() > 0.5));
    assert!(s.samples.iter().any(|p| p.nu() < -0.5));
    let top = s.samples.iter().max_by(|a, b| a.x.total_cmp(&b.x)).unwrap();
    assert!(top.nu().abs() < 1e-2);
}

#[test]
fn samples_are_ordered_and_off_axis() {
    let s = build_sphere(&c(2.0), HYP, 1e-3).unwrap();
    assert!(s.samples.windows(2).all(|w| w[1].s > w[0].s));
    assert!(s.samples.iter().all(|p| p.x >= 0.0));
}

#[test]
fn lower_cap_satisfies_divergence_equation() {
    let s = build_sphere(&c(1.0), HYP, 1e-4).unwrap();
    let cap = s.lower_cap().unwrap();
    let rep = residual_radial(&cap, &c(1.0), HYP);
    assert!(rep.max_residual <= 1e-5, "{}", rep.max_residual);
}

#[test]
fn horizontal_slice_is_graph_arc() {
    let curve = integrate_profile(&c(0.0), HYP, ProfileState::new(0.0, 1.0, 0.0, 0.0), 2.0, 1e-2).unwrap();
    assert_eq!(curve.closure, Closure::GraphArc);
    assert!(curve.samples.iter().all(|p| p.z == 0.0));
}

#[test]
fn phase_plane_finds_the_cylinder() {
    let w = PhaseWindow { x: (0.1, 2.0), sigma: (0.0, PI) };
    let rep = phase_plane(&c(1.0), HYP, w, 4).unwrap();
    assert_eq!(rep.equilibria.len(), 1);
    let eq = rep.equilibria[0];
    assert!((eq.x - 0.5f64.atanh()).abs() < 1e-10);
    assert!((eq.sigma - FRAC_PI_2).abs() < 1e-10);
    assert_eq!(rep.orbits.len(), 4);

    let rep = phase_plane(&c(0.4), HYP, w, 0).unwrap();
    assert!(rep.equilibria.is_empty());
    assert!(rep.cylinder_radius.is_none());
    assert!(matches!(cylinder_radius(&c(0.4), HYP), Err(Error::NoSolution(_))));
}

#[test]
fn diameter_decreases_with_curvature() {
    let d1 = cmc_sphere_diameter(1.0, HYP).unwrap();
    let d2 = cmc_sphere_diameter(2.0, HYP).unwrap();
    let d4 = cmc_sphere_diameter(4.0, HYP).unwrap();
    assert!(d1 > d2 && d2 > d4, "{d1} {d2} {d4}");
    let s = build_sphere(&c(1.0), HYP, 1e-3).unwrap();
    assert!(d1 >= s.height() - 1e-9);
    assert!(d1 >= 2.0 * s.equator_radius() - 1e-9);

    let ds = cmc_sphere_diameter(1.0, SPH).unwrap();
    let hs = build_sphere(&c(1.0), SPH, 1e-3).unwrap().height();
    assert!(ds.is_finite() && ds < PI + hs);
}
