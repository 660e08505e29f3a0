//! Vertical graphs `z = u` over geodesic disks of M²(κ) solving
//!
//! ```text
//! div(∇u / W) = 2 H(1/W),   W = √(1 + |∇u|²)
//! ```
//!
//! with `u = g` on the boundary circle. The solution is oriented upward, so the
//! angle function is `ν = 1/W`.

mod disk;
mod sparse;

pub use disk::{
    boundary_from_pairs, residual_disk, sample_boundary, solve_disk, DiskGraph, DiskSolver, DEFAULT_DAMPING,
};

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::prescribed::PrescribedFunction;
use crate::rk4;
use crate::spaceform::Kappa;

/// `|φ/sn|` at which the graph is declared vertical.
pub const VERTICAL_LIMIT: f64 = 1.0 - 1e-9;
/// Below this slope ratio the maximal cap is integrated in `r`; above it, in the tangent angle.
const TAIL_SWITCH: f64 = 0.9;
const TAIL_STEPS: usize = 4000;

/// Sampled radial solution `u(r)` on `[0, R]` with flux `φ = sn·u'/W` and `ν = 1/W`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGraph {
    pub radius: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    pub nu: Vec<f64>,
}

impl RadialGraph {
    /// Assembles a graph from samples, checking the structural invariants.
    pub fn from_parts(kappa: Kappa, r: Vec<f64>, u: Vec<f64>, phi: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        let n = r.len();
        if n < 3 || u.len() != n || phi.len() != n || nu.len() != n {
            return Err(Error::Precondition("radial graph needs at least 3 samples of equal length".into()));
        }
        if r[0] != 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("radial grid must start at 0 and increase strictly".into()));
        }
        if u[n - 1] != 0.0 || phi[0] != 0.0 {
            return Err(Error::Precondition("radial graph needs u(R) = 0 and phi(0) = 0".into()));
        }
        for i in 0..n {
            if !(nu[i] > 0.0 && nu[i] <= 1.0) {
                return Err(Error::Precondition(format!("nu = {} outside (0, 1] at r = {}", nu[i], r[i])));
            }
            if phi[i].abs() > kappa.sn(r[i]) {
                return Err(Error::Precondition(format!("flux exceeds sn at r = {}", r[i])));
            }
        }
        Ok(Self { radius: r[n - 1], r, u, phi, nu })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `|u(0)|`, the depth of the cap below its boundary plane.
    pub fn depth(&self) -> f64 {
        self.u[0].abs()
    }
}

fn flux_rhs(h: &PrescribedFunction, kappa: Kappa, r: f64, y: &[f64; 2]) -> Result<[f64; 2], ()> {
    let sn = kappa.sn(r);
    let p = if r == 0.0 { 0.0 } else { y[0] / sn };
    if !(p.abs() < 1.0) {
        return Err(());
    }
    let nu = ((1.0 - p) * (1.0 + p)).sqrt();
    Ok([2.0 * sn * h.eval(nu), p / nu])
}

/// Radial Dirichlet problem `u(R) = 0` via the flux equation
/// `φ' = 2 sn_κ(r) H(√(1 − (φ/sn)²))`, `φ(0) = 0`.
///
/// Only `H` on `[0, 1]` is ever evaluated. If the graph turns vertical before
/// `R`, returns [`Error::VerticalPoint`] with the radius and depth of the maximal cap.
pub fn solve_radial(h: &PrescribedFunction, kappa: Kappa, radius: f64, step: f64) -> Result<RadialGraph> {
    if !(radius > 0.0 && radius < kappa.chart_bound()) {
        return Err(Error::Domain(format!("disk radius {radius} outside (0, {})", kappa.chart_bound())));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Precondition(format!("step must be positive, got {step}")));
    }
    let n = (radius / step).ceil().max(2.0) as usize;
    let dr = radius / n as f64;
    let mut f = |r: f64, y: &[f64; 2]| flux_rhs(h, kappa, r, y);

    let mut r = Vec::with_capacity(n + 1);
    let mut phi = Vec::with_capacity(n + 1);
    let mut u = Vec::with_capacity(n + 1);
    let mut y = [0.0, 0.0];
    r.push(0.0);
    phi.push(0.0);
    u.push(0.0);
    for i in 0..n {
        let r0 = i as f64 * dr;
        let r1 = if i + 1 == n { radius } else { (i + 1) as f64 * dr };
        let next = rk4::step(&mut f, r0, &y, r1 - r0);
        let ok = matches!(next, Ok(v) if (v[0] / kappa.sn(r1)).abs() < VERTICAL_LIMIT && v[1].is_finite());
        if !ok {
            let (r_star, cap_depth) = maximal_cap(h, kappa, step, radius).unwrap_or((r0, y[1].abs()));
            return Err(Error::VerticalPoint { r_star, cap_depth });
        }
        y = next.unwrap();
        r.push(r1);
        phi.push(y[0]);
        u.push(y[1]);
    }
    let edge = u[n];
    let u: Vec<f64> = u.iter().map(|v| v - edge).collect();
    let nu: Vec<f64> = r
        .iter()
        .zip(&phi)
        .map(|(&r, &f)| {
            let p = if r == 0.0 { 0.0 } else { f / kappa.sn(r) };
            ((1.0 - p) * (1.0 + p)).sqrt()
        })
        .collect();
    Ok(RadialGraph { radius, r, u, phi, nu })
}

/// Radius `R*` where the radial graph turns vertical, and the depth of the cap
/// over `[0, R*]`. `None` if the graph stays a graph up to `r_limit`.
///
/// Near `R*` the slope blows up like `(R* − r)^(−1/2)`, so once `|φ/sn|`
/// passes a switch value the remaining arc is integrated with the tangent
/// angle `σ = asin(φ/sn)` as parameter, where it is regular:
/// `dr/dσ = cos σ / D`, `du/dσ = sin σ / D`, `D = 2H(cos σ) − ct_κ(r) sin σ`.
pub fn maximal_cap(h: &PrescribedFunction, kappa: Kappa, step: f64, r_limit: f64) -> Option<(f64, f64)> {
    let mut f = |r: f64, y: &[f64; 2]| flux_rhs(h, kappa, r, y);
    let mut y = [0.0, 0.0];
    let mut r = 0.0;
    loop {
        if r >= r_limit {
            return None;
        }
        let r1 = r + step;
        match rk4::step(&mut f, r, &y, step) {
            Ok(v) if r1 < kappa.chart_bound() && (v[0] / kappa.sn(r1)).abs() <= TAIL_SWITCH => {
                y = v;
                r = r1;
            }
            _ => break,
        }
    }
    let p = if r == 0.0 { 0.0 } else { y[0] / kappa.sn(r) };
    let direction = p.signum();
    if direction == 0.0 {
        return None;
    }
    let sigma0 = p.asin();
    let sigma1 = direction * FRAC_PI_2;
    let ds = (sigma1 - sigma0) / TAIL_STEPS as f64;
    let mut g = |sigma: f64, v: &[f64; 2]| -> Result<[f64; 2], ()> {
        let (sin, cos) = sigma.sin_cos();
        if !(v[0] > 0.0 && v[0] < kappa.chart_bound()) {
            return Err(());
        }
        let d = 2.0 * h.eval(cos) - kappa.ct(v[0]) * sin;
        if !(d * direction > 0.0) {
            return Err(());
        }
        Ok([cos / d, sin / d])
    };
    let mut v = [r, y[1]];
    for k in 0..TAIL_STEPS {
        v = rk4::step(&mut g, sigma0 + k as f64 * ds, &v, ds).ok()?;
    }
    (v[0] <= r_limit).then_some((v[0], v[1].abs()))
}

/// Pointwise residual `H_Σ − H(ν)` of a sampled graph, in max and mean norms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub mean_residual: f64,
    /// `(r, θ)` of the largest residual.
    pub worst_point: [f64; 2],
    pub nu_range: (f64, f64),
    pub points: usize,
}

impl ResidualReport {
    pub(crate) fn from_values(values: impl IntoIterator<Item = (f64, [f64; 2], f64)>) -> Self {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut worst = [0.0, 0.0];
        let mut nu_range = (f64::INFINITY, f64::NEG_INFINITY);
        for (res, at, nu) in values {
            let a = res.abs();
            if a > max || a.is_nan() {
                max = a;
                worst = at;
            }
            sum += a;
            count += 1;
            nu_range = (nu_range.0.min(nu), nu_range.1.max(nu));
        }
        Self {
            max_residual: max,
            mean_residual: if count > 0 { sum / count as f64 } else { 0.0 },
            worst_point: worst,
            nu_range,
            points: count,
        }
    }
}

/// Central-difference evaluation of `(1/sn)·d/dr[sn·u'/W] − 2H(1/W)` at the
/// interior samples of `graph`, using only `r` and `u`.
///
/// Slopes come from secants on each interval; the flux difference across two
/// intervals is taken at the centre of their midpoints, which keeps the
/// stencil second order on non-uniform samples.
pub fn residual_radial(graph: &RadialGraph, h: &PrescribedFunction, kappa: Kappa) -> ResidualReport {
    let r = &graph.r;
    let u = &graph.u;
    let n = r.len();
    let mid: Vec<f64> = r.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let slope: Vec<f64> = (0..n - 1)
        .map(|i| {
            let du = (u[i + 1] - u[i]) / (r[i + 1] - r[i]);
            du / du.hypot(1.0)
        })
        .collect();
    let flux: Vec<f64> = mid.iter().zip(&slope).map(|(&m, &p)| kappa.sn(m) * p).collect();
    ResidualReport::from_values((1..n - 1).map(|i| {
        let rc = 0.5 * (mid[i - 1] + mid[i]);
        let div = (flux[i] - flux[i - 1]) / (mid[i] - mid[i - 1]) / kappa.sn(rc);
        let p = 0.5 * (slope[i - 1] + slope[i]);
        let nu = ((1.0 - p) * (1.0 + p)).max(0.0).sqrt();
        (div - 2.0 * h.eval(nu), [rc, 0.0], nu)
    }))
}
