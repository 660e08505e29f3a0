//! Geometry of the model surfaces M²(κ), κ = ±1, and of the products M²(κ)×ℝ.
//!
//! Everything is expressed in geodesic polar coordinates `(r, θ)` about a fixed
//! rotation axis, plus the height `z`. Other models (the quadric in ℝ³ or
//! Lorentz–Minkowski space, the Poincaré disk) are only produced on export.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the curvature of the base surface: hyperbolic plane or round sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Kappa(i8);

impl Kappa {
    pub const HYPERBOLIC: Kappa = Kappa(-1);
    pub const SPHERICAL: Kappa = Kappa(1);

    pub fn new(value: i32) -> Result<Self> {
        match value {
            -1 => Ok(Self::HYPERBOLIC),
            1 => Ok(Self::SPHERICAL),
            other => Err(Error::InvalidKappa(other.to_string())),
        }
    }

    pub fn value(self) -> i32 {
        self.0 as i32
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn is_spherical(self) -> bool {
        self.0 > 0
    }

    /// `κ`-sine: `sin t` or `sinh t`.
    pub fn sn(self, t: f64) -> f64 {
        if self.is_spherical() { t.sin() } else { t.sinh() }
    }

    /// `κ`-cosine: `cos t` or `cosh t`.
    pub fn cs(self, t: f64) -> f64 {
        if self.is_spherical() { t.cos() } else { t.cosh() }
    }

    /// `κ`-cotangent `cs/sn`.
    pub fn ct(self, t: f64) -> f64 {
        self.cs(t) / self.sn(t)
    }

    /// Area of the geodesic disk of radius `rho`, `2π (1 − cs ρ)/κ`.
    pub fn disk_area(self, rho: f64) -> f64 {
        // (1 − cs ρ)/κ = 2 sn²(ρ/2) for both signs; no cancellation at small ρ.
        let half = self.sn(0.5 * rho);
        4.0 * PI * half * half
    }

    /// Largest admissible polar radius of the chart (antipodal cut for κ = +1).
    pub fn chart_bound(self) -> f64 {
        if self.is_spherical() { PI } else { f64::INFINITY }
    }
}

impl TryFrom<i32> for Kappa {
    type Error = Error;
    fn try_from(value: i32) -> Result<Self> {
        Kappa::new(value)
    }
}

impl From<Kappa> for i32 {
    fn from(k: Kappa) -> i32 {
        k.value()
    }
}

impl FromStr for Kappa {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-1" | "-1.0" => Ok(Self::HYPERBOLIC),
            "1" | "+1" | "1.0" | "+1.0" => Ok(Self::SPHERICAL),
            other => Err(Error::InvalidKappa(other.to_string())),
        }
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn sn(kappa: Kappa, t: f64) -> f64 {
    kappa.sn(t)
}

pub fn cs(kappa: Kappa, t: f64) -> f64 {
    kappa.cs(t)
}

pub fn ct(kappa: Kappa, t: f64) -> f64 {
    kappa.ct(t)
}

/// A point of M²(κ)×ℝ in geodesic polar coordinates about the rotation axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub r: f64,
    pub theta: f64,
    pub z: f64,
}

impl AmbientPoint {
    /// Builds a point, reducing `theta` into `[0, 2π)`.
    pub fn new(kappa: Kappa, r: f64, theta: f64, z: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite() && z.is_finite()) {
            return Err(Error::Domain(format!("non-finite point ({r}, {theta}, {z})")));
        }
        if r < 0.0 {
            return Err(Error::Domain(format!("negative polar radius {r}")));
        }
        if r >= kappa.chart_bound() {
            return Err(Error::Domain(format!("polar radius {r} reaches the antipodal cut")));
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        Ok(Self { r, theta, z })
    }
}

/// Distance in the base surface between two points in polar coordinates.
///
/// Uses the half-angle form of the law of cosines,
/// `sn²(d/2) = sn²((r₁−r₂)/2) + sn r₁ sn r₂ sin²(Δθ/2)`, which stays accurate
/// for nearby points.
pub fn base_distance(kappa: Kappa, p: &AmbientPoint, q: &AmbientPoint) -> f64 {
    let dr = kappa.sn(0.5 * (p.r - q.r));
    let dt = (0.5 * (p.theta - q.theta)).sin();
    let h = dr * dr + kappa.sn(p.r) * kappa.sn(q.r) * dt * dt;
    let h = h.max(0.0).sqrt();
    if kappa.is_spherical() {
        2.0 * h.min(1.0).asin()
    } else {
        2.0 * h.asinh()
    }
}

/// Distance in the product metric of M²(κ)×ℝ.
pub fn ambient_distance(kappa: Kappa, p: &AmbientPoint, q: &AmbientPoint) -> f64 {
    base_distance(kappa, p, q).hypot(p.z - q.z)
}

/// Inward geodesic curvature `ct_κ(ρ)` of the geodesic circle of radius `rho`.
pub fn circle_geodesic_curvature(kappa: Kappa, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || rho >= kappa.chart_bound() {
        return Err(Error::Domain(format!("circle radius {rho} outside (0, {})", kappa.chart_bound())));
    }
    Ok(kappa.ct(rho))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    Quadric,
    PoincareDisk,
    Polar,
}

impl FromStr for Chart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadric" => Ok(Chart::Quadric),
            "poincare-disk" => Ok(Chart::PoincareDisk),
            "polar" => Ok(Chart::Polar),
            other => Err(Error::UnsupportedChart(format!("unknown chart '{other}'"))),
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Quadric => "quadric",
            Chart::PoincareDisk => "poincare-disk",
            Chart::Polar => "polar",
        })
    }
}

/// Coordinates of a point in one of the export charts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartPoint {
    /// `(x₁, x₂, x₃, z)` with `x₁² + x₂² + κ x₃² = 1/κ`.
    Quadric([f64; 4]),
    /// `(tanh(r/2) cos θ, tanh(r/2) sin θ, z)`.
    PoincareDisk([f64; 3]),
    /// `(r, θ, z)` unchanged.
    Polar([f64; 3]),
}

impl ChartPoint {
    pub fn coords(&self) -> &[f64] {
        match self {
            ChartPoint::Quadric(c) => c,
            ChartPoint::PoincareDisk(c) | ChartPoint::Polar(c) => c,
        }
    }
}

pub fn export_chart(kappa: Kappa, p: &AmbientPoint, chart: Chart) -> Result<ChartPoint> {
    let (s, c) = p.theta.sin_cos();
    match chart {
        Chart::Quadric => {
            let rad = kappa.sn(p.r);
            Ok(ChartPoint::Quadric([rad * c, rad * s, kappa.cs(p.r), p.z]))
        }
        Chart::PoincareDisk => {
            if kappa.is_spherical() {
                return Err(Error::UnsupportedChart("poincare-disk requires kappa = -1".into()));
            }
            let t = (0.5 * p.r).tanh();
            Ok(ChartPoint::PoincareDisk([t * c, t * s, p.z]))
        }
        Chart::Polar => Ok(ChartPoint::Polar([p.r, p.theta, p.z])),
    }
}

/// Recovers polar data from a Poincaré-disk point.
pub fn from_poincare_disk(coords: [f64; 3]) -> AmbientPoint {
    let rho = coords[0].hypot(coords[1]);
    AmbientPoint {
        r: 2.0 * rho.atanh(),
        theta: coords[1].atan2(coords[0]).rem_euclid(TAU),
        z: coords[2],
    }
}

/// Solves `ct_κ(ρ) = target` by bisection; `None` when no root exists.
pub(crate) fn solve_ct(kappa: Kappa, target: f64, tol: f64) -> Option<f64> {
    // ct is strictly decreasing on the chart: coth from +∞ to 1, cot from +∞ to −∞ on (0, π).
    let (mut lo, mut hi) = if kappa.is_spherical() {
        (0.0, PI)
    } else {
        if target <= 1.0 {
            return None;
        }
        // coth ρ − 1 ≈ 2e^{−2ρ}; bracket generously.
        let mut hi = 1.0;
        while kappa.ct(hi) > target {
            hi *= 2.0;
        }
        (0.0, hi)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            break;
        }
        if kappa.ct(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
