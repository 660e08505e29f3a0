//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use pmc::estimates::{probe_vertical_heights, Verdict};
use pmc::graphs::{residual_disk, residual_radial, solve_disk, solve_radial};
use pmc::prescribed::validate_class;
use pmc::rotational::{build_sphere, cylinder_radius, first_integral, phase_plane, PhaseWindow};
use pmc::spaceform::{ambient_distance, base_distance, circle_geodesic_curvature, export_chart, ChartPoint};
use pmc::{AmbientPoint, Chart, Error, Kappa, PrescribedFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HYP: Kappa = Kappa::HYPERBOLIC;
const SPH: Kappa = Kappa::SPHERICAL;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn c(v: f64) -> PrescribedFunction {
    PrescribedFunction::constant(v)
}

fn even_poly(coeffs: &[f64]) -> PrescribedFunction {
    PrescribedFunction::parse(&serde_json::json!({ "type": "even-poly", "coeffs": coeffs }).to_string()).unwrap()
}

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

/// Random even polynomial `a0 + a2 y² + a4 y⁴` with `4H > floor + 1e-3` on `[-1, 1]`.
fn random_even(rng: &mut ChaCha8Rng, floor: f64) -> PrescribedFunction {
    loop {
        let coeffs = [rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let h = even_poly(&coeffs);
        let min = (0..=10_000).map(|i| h.eval(-1.0 + i as f64 * 2e-4)).fold(f64::INFINITY, f64::min);
        if min > 0.0 && 4.0 * min > floor + 1e-3 {
            return h;
        }
    }
}

fn class_gate() -> Outcome {
    let one = validate_class(&c(1.0), HYP);
    check(one.in_c1k && one.in_c1k_even, "H = 1 not accepted in both classes".into())?;
    let half = validate_class(&c(0.5), HYP);
    check(!half.in_c1k && !half.in_c1k_even, "H = 1/2 accepted".into())?;
    let lin = validate_class(&PrescribedFunction::parse(r#"{"type":"linear"}"#).unwrap(), HYP);
    check(!lin.in_c1k && !lin.in_c1k_even, "H(y) = y accepted".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..50 {
        let h = random_even(&mut rng, 2.0);
        let r = validate_class(&h, HYP);
        check(r.in_c1k && r.in_c1k_even, format!("random even polynomial {k} rejected: {:?}", h.descriptor()))?;
    }
    Ok("fixed cases and 50 random even polynomials".into())
}

fn sphere_closure() -> Outcome {
    let drift = |step: f64| -> Result<(f64, f64, f64), String> {
        let s = build_sphere(&c(1.0), HYP, step).map_err(|e| e.to_string())?;
        let d = s.samples.iter().skip(1).map(|p| (first_integral(HYP, 1.0, p) + 2.0).abs()).fold(0.0, f64::max);
        Ok((d, s.closure_defect.unwrap_or(f64::INFINITY), s.equator_radius()))
    };
    let (d_fine, defect, equator) = drift(1e-4)?;
    check(defect < 1e-3, format!("closure defect {defect:e}"))?;
    let eq_err = (equator - 3f64.ln()).abs();
    check(eq_err <= 1e-4, format!("equator {equator} off ln 3 by {eq_err:e}"))?;
    check(d_fine <= 1e-8, format!("first-integral drift {d_fine:e}"))?;
    // The drift at 1e-4 sits at roundoff, so the order is measured where
    // truncation dominates.
    let (d1, _, _) = drift(1e-2)?;
    let (d2, _, _) = drift(5e-3)?;
    let ratio = d1 / d2;
    check(ratio >= 12.0, format!("halving ratio {ratio:.2}"))?;
    Ok(format!("defect {defect:.1e}, |x_max - ln 3| {eq_err:.1e}, drift {d_fine:.1e}, halving ratio {ratio:.1} (1e-2 -> 5e-3)"))
}

fn cylinder_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let kappa = if k % 2 == 0 { HYP } else { SPH };
        let h = random_even(&mut rng, 1.0 - kappa.as_f64());
        let rho = cylinder_radius(&h, kappa).map_err(|e| format!("case {k}: {e}"))?;
        let x_max = if kappa.is_spherical() { PI - 0.05 } else { 4.0 };
        let window = PhaseWindow { x: (0.05, x_max), sigma: (0.0, PI) };
        let rep = phase_plane(&h, kappa, window, 0).map_err(|e| e.to_string())?;
        let eq = rep.equilibria.iter().find(|e| e.branch > 0.0).ok_or(format!("case {k}: no equilibrium"))?;
        worst = worst.max((eq.x - rho).abs());
    }
    check(worst <= 1e-10, format!("max |x* - rho| = {worst:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..10 {
        let h = even_poly(&[rng.gen_range(-0.5..0.5), rng.gen_range(0.0..1.0)]);
        let none = matches!(cylinder_radius(&h, HYP), Err(Error::NoSolution(_)));
        let window = PhaseWindow { x: (0.05, 4.0), sigma: (0.0, PI) };
        let rep = phase_plane(&h, HYP, window, 0).map_err(|e| e.to_string())?;
        check(none && rep.equilibria.is_empty(), format!("subcritical case {k} reports a cylinder"))?;
    }
    Ok(format!("20 in-class cases, max |x* - rho| {worst:.1e}; 10 subcritical cases without cylinders"))
}

fn rotational_consistency() -> Outcome {
    let cases = [
        (HYP, c(1.0)),
        (HYP, c(2.0)),
        (HYP, even_poly(&[0.8, 0.3])),
        (SPH, c(1.0)),
        (SPH, even_poly(&[0.4, -0.2, 0.3])),
    ];
    let mut worst = 0.0f64;
    for (kappa, h) in &cases {
        let s = build_sphere(h, *kappa, 1e-4).map_err(|e| e.to_string())?;
        let cap = s.lower_cap().map_err(|e| e.to_string())?;
        worst = worst.max(residual_radial(&cap, h, *kappa).max_residual);
    }
    check(worst <= 1e-5, format!("max residual {worst:e}"))?;
    Ok(format!("{} spheres, max lower-cap residual {worst:.1e}", cases.len()))
}

fn disk_agreement() -> Outcome {
    let h = c(1.0);
    let nt = 32;
    let disk = solve_disk(&h, HYP, 0.8, &vec![0.0; nt], 128, nt, 1e-10, 500).map_err(|e| e.to_string())?;
    let radial = solve_radial(&h, HYP, 0.8, 0.8 / 1280.0).map_err(|e| e.to_string())?;
    let mut dev = 0.0f64;
    for i in 0..=128 {
        for j in 0..nt {
            dev = dev.max((disk.get(i, j) - radial.u[10 * i]).abs());
        }
    }
    check(dev <= 2e-3, format!("radial deviation {dev:e}"))?;
    let coarse = solve_disk(&h, HYP, 0.8, &vec![0.0; nt], 64, nt, 1e-10, 500).map_err(|e| e.to_string())?;
    let (a, b) = (residual_disk(&coarse, &h, HYP).max_residual, residual_disk(&disk, &h, HYP).max_residual);
    let ratio = a / b;
    check(ratio >= 3.5, format!("refinement ratio {ratio:.2}"))?;
    Ok(format!("max deviation {dev:.1e} at nr = 128, residual {a:.1e} -> {b:.1e} (ratio {ratio:.2})"))
}

fn height_probes() -> Outcome {
    let radii: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
    let rep = probe_vertical_heights(&c(1.0), HYP, &radii).map_err(|e| e.to_string())?;
    check(rep.bounded_verdict == Verdict::Bounded, format!("H = 1 verdict {:?}", rep.bounded_verdict))?;
    let half = rep.comparison_height.ok_or("no comparison height")?;
    let err = (rep.c_empirical - half).abs();
    check(err <= 1e-4, format!("C {} vs half height {half}", rep.c_empirical))?;
    let radii: Vec<f64> = (1..=20).map(|k| k as f64).collect();
    let low = probe_vertical_heights(&c(0.4), HYP, &radii).map_err(|e| e.to_string())?;
    check(low.bounded_verdict == Verdict::Growing, format!("H = 0.4 verdict {:?}", low.bounded_verdict))?;
    Ok(format!(
        "H = 1: bounded, |C - half height| {err:.1e}; H = 0.4: growing, height {:.3} at R = 20",
        low.heights[low.heights.len() - 1]
    ))
}

fn one_sidedness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..30 {
        let kappa = if k % 3 == 2 { SPH } else { HYP };
        let h = match k % 3 {
            0 => c(rng.gen_range(0.05..2.0)),
            1 => even_poly(&[rng.gen_range(0.05..1.0), rng.gen_range(0.0..1.0)]),
            _ => {
                let a = rng.gen_range(0.05..1.5);
                let top = rng.gen_range(0.0..0.5);
                let nodes = [[-1.0, a + 0.3], [0.0, a], [0.5, a + 0.25 * top], [1.0, a + top]];
                PrescribedFunction::parse(&serde_json::json!({"type": "table", "nodes": nodes}).to_string()).unwrap()
            }
        };
        let mut radius = rng.gen_range(0.1..if kappa.is_spherical() { 2.5 } else { 3.0 });
        let g = match solve_radial(&h, kappa, radius, 1e-3) {
            Err(Error::VerticalPoint { r_star, .. }) => {
                radius = 0.9 * r_star;
                solve_radial(&h, kappa, radius, 1e-3)
            }
            other => other,
        }
        .map_err(|e| format!("case {k}: {e}"))?;
        let n = g.len();
        check(g.u[n - 1] == 0.0, format!("case {k}: u(R) = {}", g.u[n - 1]))?;
        if let Some(i) = g.u[..n - 1].iter().position(|&v| !(v < 0.0)) {
            return Err(format!("case {k}: u({}) = {} at R = {radius}", g.r[i], g.u[i]));
        }
    }
    Ok("30 zero-boundary solutions with u < 0 inside, u = 0 on the boundary".into())
}

fn geometry_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_quadric = 0.0f64;
    for kappa in [HYP, SPH] {
        let r_max = if kappa.is_spherical() { PI - 1e-3 } else { 6.0 };
        for _ in 0..1000 {
            let p = AmbientPoint::new(kappa, rng.gen_range(0.0..r_max), rng.gen_range(0.0..TAU), 0.0).unwrap();
            let ChartPoint::Quadric(x) = export_chart(kappa, &p, Chart::Quadric).unwrap() else { unreachable!() };
            let q = (x[0] * x[0] + x[1] * x[1] + kappa.as_f64() * x[2] * x[2] - kappa.as_f64()).abs();
            worst_quadric = worst_quadric.max(q / (1.0 + x[2] * x[2]));
        }
    }
    check(worst_quadric <= 1e-10, format!("quadric defect {worst_quadric:e}"))?;

    let mut triples = 0;
    for kappa in [HYP, SPH] {
        let r_max = if kappa.is_spherical() { PI - 1e-3 } else { 5.0 };
        let mut pt = || {
            AmbientPoint::new(kappa, rng.gen_range(0.0..r_max), rng.gen_range(0.0..TAU), rng.gen_range(-2.0..2.0))
                .unwrap()
        };
        for _ in 0..500 {
            let (a, b, c) = (pt(), pt(), pt());
            let ab = ambient_distance(kappa, &a, &b);
            let (bc, ac) = (ambient_distance(kappa, &b, &c), ambient_distance(kappa, &a, &c));
            check(ambient_distance(kappa, &a, &a) == 0.0, "d(p, p) != 0".into())?;
            check((ab - ambient_distance(kappa, &b, &a)).abs() <= 1e-12 * (1.0 + ab), "asymmetric".into())?;
            check(ac <= ab + bc + 1e-9, format!("triangle inequality: {ac} > {ab} + {bc}"))?;
            triples += 1;
        }
    }

    // Discrete oracle: circumference L(ρ) of an inscribed polygon, curvature L'/L.
    let perimeter = |kappa: Kappa, rho: f64| {
        let n = 20_000;
        let p = |j: usize| AmbientPoint { r: rho, theta: TAU * j as f64 / n as f64, z: 0.0 };
        (0..n).map(|j| base_distance(kappa, &p(j), &p(j + 1))).sum::<f64>()
    };
    let mut worst_curv = 0.0f64;
    for (kappa, rho) in [(HYP, 0.3), (HYP, 1.0), (HYP, 2.5), (SPH, 0.3), (SPH, 1.0), (SPH, 2.5)] {
        let h = 1e-3;
        let discrete = (perimeter(kappa, rho + h) - perimeter(kappa, rho - h)) / (2.0 * h) / perimeter(kappa, rho);
        let exact = circle_geodesic_curvature(kappa, rho).map_err(|e| e.to_string())?;
        worst_curv = worst_curv.max((discrete - exact).abs());
    }
    check(worst_curv <= 1e-5, format!("circle curvature error {worst_curv:e}"))?;
    Ok(format!(
        "quadric defect {worst_quadric:.1e} on 2000 exports, {triples} triples, curvature error {worst_curv:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 class gate", 1, class_gate),
        ("2 sphere closure and equator", 5, sphere_closure),
        ("3 cylinder/equilibrium agreement", 10, cylinder_agreement),
        ("4 rotational vs divergence consistency", 5, rotational_consistency),
        ("5 radial/2D solver agreement", 60, disk_agreement),
        ("6 height-estimate probes", 30, height_probes),
        ("7 one-sidedness", 10, one_sidedness),
        ("8 geometry kernel", 5, geometry_kernel),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(budget) => Err(format!("{msg}; over the {budget} s budget")),
            other => other,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({secs:.2} s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2} s): {msg}");
            }
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
