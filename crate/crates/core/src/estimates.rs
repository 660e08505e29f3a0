//! Empirical probes of height estimates and confinement quantities.
//!
//! The uniform height constant for vertical H-graphs is not constructive; the
//! probe reports the supremum over a declared family of radial caps with zero
//! boundary values and makes no claim beyond that family.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::solve_radial;
use crate::prescribed::{validate_class, Descriptor, PrescribedFunction};
use crate::rotational::{build_sphere, cmc_sphere_diameter};
use crate::spaceform::Kappa;

pub const DEFAULT_PROBE_STEP: f64 = 1e-3;
/// Two consecutive heights closer than this count as stabilized.
pub const STABLE_TOL: f64 = 1e-6;
/// Minimum tail increment for a `growing` verdict.
pub const GROWTH_TOL: f64 = 1e-3;
const SPHERE_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightProbeReport {
    pub prescription: Descriptor,
    pub kappa: Kappa,
    pub radii: Vec<f64>,
    /// `|u(0)|` of the zero-boundary radial solution over each radius,
    /// clipped at the maximal cap.
    pub heights: Vec<f64>,
    pub r_star: Option<f64>,
    pub c_empirical: f64,
    pub bounded_verdict: Verdict,
    /// Half height of the H-sphere, when the prescription admits one.
    pub comparison_height: Option<f64>,
}

impl HeightProbeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,height\n");
        for (r, h) in self.radii.iter().zip(&self.heights) {
            out.push_str(&format!("{r:.16e},{h:.16e}\n"));
        }
        out
    }
}

pub fn probe_vertical_heights(h: &PrescribedFunction, kappa: Kappa, radii: &[f64]) -> Result<HeightProbeReport> {
    probe_vertical_heights_with_step(h, kappa, radii, DEFAULT_PROBE_STEP)
}

pub fn probe_vertical_heights_with_step(
    h: &PrescribedFunction,
    kappa: Kappa,
    radii: &[f64],
    step: f64,
) -> Result<HeightProbeReport> {
    if radii.is_empty() {
        return Err(Error::Precondition("height probe needs at least one radius".into()));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    let probes: Vec<Result<(f64, Option<f64>)>> = radii
        .par_iter()
        .map(|&r| match solve_radial(h, kappa, r, step) {
            Ok(g) => Ok((g.depth(), None)),
            Err(Error::VerticalPoint { r_star, cap_depth }) => Ok((cap_depth, Some(r_star))),
            Err(e) => Err(e),
        })
        .collect();
    let mut heights = Vec::with_capacity(radii.len());
    let mut r_star = None;
    for p in probes {
        let (height, star) = p?;
        heights.push(height);
        if r_star.is_none() {
            r_star = star;
        }
    }

    let c_empirical = heights.iter().copied().fold(0.0, f64::max);
    let n = heights.len();
    let bounded_verdict = if r_star.is_some() || (n >= 2 && (heights[n - 1] - heights[n - 2]).abs() < STABLE_TOL) {
        Verdict::Bounded
    } else if n >= 3 && heights[n - 3..].windows(2).all(|w| w[1] - w[0] > GROWTH_TOL) {
        Verdict::Growing
    } else {
        Verdict::Inconclusive
    };

    let comparison_height = if validate_class(h, kappa).in_c1k_even {
        build_sphere(h, kappa, SPHERE_STEP).ok().and_then(|s| s.lower_half_height())
    } else {
        None
    };

    Ok(HeightProbeReport {
        prescription: h.descriptor().clone(),
        kappa,
        radii,
        heights,
        r_star,
        c_empirical,
        bounded_verdict,
        comparison_height,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfinementReport {
    /// Ambient diameter of the constant-`H0` sphere.
    pub d: f64,
    /// Separation beyond which two parallel planes bound a compact piece: `2d`.
    pub slab_width: f64,
    pub cylinder_radius_bound: Option<f64>,
}

/// `d`, `2d` and, given a vertical height probe, the bound `2d + 8 C`.
pub fn confinement_quantities(
    h: &PrescribedFunction,
    kappa: Kappa,
    h0: f64,
    probe: Option<&HeightProbeReport>,
) -> Result<ConfinementReport> {
    let min_h = h.grid_min();
    if !(h0 < min_h) {
        return Err(Error::Precondition(format!("H0 = {h0} must satisfy H0 < min H = {min_h}")));
    }
    if !(4.0 * h0 > 1.0 - kappa.as_f64()) {
        return Err(Error::Precondition(format!("H0 = {h0} must satisfy 4H0 > 1 - kappa = {}", 1 - kappa.value())));
    }
    let d = cmc_sphere_diameter(h0, kappa)?;
    Ok(ConfinementReport {
        d,
        slab_width: 2.0 * d,
        cylinder_radius_bound: probe.map(|p| 2.0 * d + 8.0 * p.c_empirical),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HYP: Kappa = Kappa::HYPERBOLIC;

    #[test]
    fn confinement_preconditions() {
        let h = PrescribedFunction::constant(1.0);
        let e = confinement_quantities(&h, HYP, 1.1, None).unwrap_err();
        assert!(matches!(e, Error::Precondition(ref m) if m.contains("min H")));
        let e = confinement_quantities(&h, HYP, 0.4, None).unwrap_err();
        assert!(matches!(e, Error::Precondition(ref m) if m.contains("4H0")));
    }

    #[test]
    fn probe_needs_radii() {
        assert!(probe_vertical_heights(&PrescribedFunction::constant(1.0), HYP, &[]).is_err());
    }

    #[test]
    fn csv_table() {
        let rep = probe_vertical_heights(&PrescribedFunction::constant(1.0), HYP, &[0.5, 0.25]).unwrap();
        let csv = rep.to_csv();
        assert!(csv.starts_with("R,height\n2.5"));
        assert_eq!(csv.lines().count(), 3);
    }
}
