//! Rotational H-surfaces in M²(κ)×ℝ.
//!
//! A rotational surface is generated by a profile curve `(x(s), z(s))` in the
//! half-plane `x ≥ 0`, parametrized by arclength, with tangent angle `σ`:
//!
//! ```text
//! x' = cos σ,   z' = sin σ,   σ' = 2H(cos σ) − ct_κ(x) sin σ
//! ```
//!
//! The normal is chosen so that the angle function is `ν = cos σ`; on the lower
//! cap of a sphere (`ν > 0`) the surface is an upward graph `u(r)` with
//! `u' = tan σ`, and the system above is the arclength form of the radial flux
//! equation solved in [`crate::graphs`]. The cross-check lives in the tests.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::RadialGraph;
use crate::prescribed::{validate_class, PrescribedFunction};
use crate::rk4;
use crate::spaceform::{ambient_distance, solve_ct, AmbientPoint, Kappa};

/// Allowed local error per unit arclength before a step is subdivided.
pub const LOCAL_ERROR_TOL: f64 = 1e-6;
/// A profile closes when it meets the axis within this distance at `σ = π`.
pub const CLOSURE_TOL: f64 = 1e-3;
const EVENT_TOL: f64 = 1e-10;
const MAX_SUBDIVISION: usize = 1 << 12;
const SPHERE_MAX_ARCLENGTH: f64 = 200.0;
const SPHERE_REFINEMENTS: usize = 3;
/// Sampling step used by [`cmc_sphere_diameter`].
pub const DIAMETER_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub sigma: f64,
}

impl ProfileState {
    pub fn new(s: f64, x: f64, z: f64, sigma: f64) -> Self {
        Self { s, x, z, sigma }
    }

    /// Angle function `ν = cos σ`.
    pub fn nu(&self) -> f64 {
        self.sigma.cos()
    }

    fn vector(&self) -> [f64; 3] {
        [self.x, self.z, self.sigma]
    }

    fn from_vector(s: f64, v: [f64; 3]) -> Self {
        Self { s, x: v[0], z: v[1], sigma: v[2] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closure {
    ClosedSphere,
    EquilibriumCylinder,
    GraphArc,
    Truncated,
}

impl Closure {
    pub fn as_str(self) -> &'static str {
        match self {
            Closure::ClosedSphere => "closed-sphere",
            Closure::EquilibriumCylinder => "equilibrium-cylinder",
            Closure::GraphArc => "graph-arc",
            Closure::Truncated => "truncated",
        }
    }
}

impl std::str::FromStr for Closure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-sphere" => Ok(Closure::ClosedSphere),
            "equilibrium-cylinder" => Ok(Closure::EquilibriumCylinder),
            "graph-arc" => Ok(Closure::GraphArc),
            "truncated" => Ok(Closure::Truncated),
            other => Err(Error::Parse(format!("unknown closure '{other}'"))),
        }
    }
}

/// Arclength-sampled profile of a rotational surface.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    pub samples: Vec<ProfileState>,
    pub kappa: Kappa,
    pub prescription: PrescribedFunction,
    pub closure: Closure,
    pub step: f64,
    /// Distance to the axis where the profile reaches `σ = π`, when it does.
    pub closure_defect: Option<f64>,
}

impl ProfileCurve {
    pub fn equator_radius(&self) -> f64 {
        self.samples.iter().map(|p| p.x).fold(0.0, f64::max)
    }

    pub fn height(&self) -> f64 {
        let (first, last) = (self.samples[0], self.samples[self.samples.len() - 1]);
        last.z - first.z
    }

    /// Height at the first sample where `σ` reaches `angle`, by linear
    /// interpolation in `σ`.
    pub fn z_at_angle(&self, angle: f64) -> Option<f64> {
        self.samples.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            if (a.sigma - angle) * (b.sigma - angle) <= 0.0 && a.sigma != b.sigma {
                let t = (angle - a.sigma) / (b.sigma - a.sigma);
                Some(a.z + t * (b.z - a.z))
            } else {
                None
            }
        })
    }

    /// Height of the part below the equator `σ = π/2`.
    pub fn lower_half_height(&self) -> Option<f64> {
        Some(self.z_at_angle(FRAC_PI_2)? - self.samples[0].z)
    }

    /// The sub-arc with `ν > 0` starting at the axis, recast as a radial graph
    /// `u(r)` over the disk of radius `x` at its last sample.
    pub fn lower_cap(&self) -> Result<RadialGraph> {
        if self.samples.first().map(|p| p.x) != Some(0.0) {
            return Err(Error::Precondition("profile does not start on the axis".into()));
        }
        let mut cap: Vec<&ProfileState> = Vec::new();
        for p in &self.samples {
            if p.nu() <= 0.0 || cap.last().is_some_and(|q| p.x <= q.x) {
                break;
            }
            cap.push(p);
        }
        if cap.len() < 3 {
            return Err(Error::Precondition("lower cap has fewer than 3 samples".into()));
        }
        let z_edge = cap[cap.len() - 1].z;
        let kappa = self.kappa;
        RadialGraph::from_parts(
            kappa,
            cap.iter().map(|p| p.x).collect(),
            cap.iter().map(|p| p.z - z_edge).collect(),
            cap.iter().map(|p| kappa.sn(p.x) * p.sigma.sin()).collect(),
            cap.iter().map(|p| p.nu()).collect(),
        )
    }
}

/// Derivatives `(x', z', σ')` of the profile system.
pub fn profile_rhs(h: &PrescribedFunction, kappa: Kappa, state: &ProfileState) -> Result<[f64; 3]> {
    rhs(h, kappa, &state.vector())
}

fn rhs(h: &PrescribedFunction, kappa: Kappa, v: &[f64; 3]) -> Result<[f64; 3]> {
    let (x, sigma) = (v[0], v[2]);
    if !(x > 0.0) || x >= kappa.chart_bound() {
        return Err(Error::AxisSingularity { x });
    }
    let (sin, cos) = sigma.sin_cos();
    Ok([cos, sin, 2.0 * h.eval(cos) - kappa.ct(x) * sin])
}

/// Rectangle of the `(x, σ)` phase plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseWindow {
    pub x: (f64, f64),
    pub sigma: (f64, f64),
}

impl PhaseWindow {
    fn contains(&self, x: f64, sigma: f64) -> bool {
        x >= self.x.0 && x <= self.x.1 && sigma >= self.sigma.0 && sigma <= self.sigma.1
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct IntegrateOptions {
    window: Option<PhaseWindow>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Event {
    Axis,
    Angle(f64),
    ChartBound,
    Window,
}

pub fn integrate_profile(
    h: &PrescribedFunction,
    kappa: Kappa,
    initial: ProfileState,
    max_arclength: f64,
    step: f64,
) -> Result<ProfileCurve> {
    integrate(h, kappa, initial, max_arclength, step, IntegrateOptions::default())
}

fn integrate(
    h: &PrescribedFunction,
    kappa: Kappa,
    initial: ProfileState,
    max_arclength: f64,
    step: f64,
    opts: IntegrateOptions,
) -> Result<ProfileCurve> {
    if !(step > 0.0 && step.is_finite()) || !(max_arclength >= 0.0) {
        return Err(Error::Precondition(format!("invalid step {step} or length {max_arclength}")));
    }
    let initial_rhs = profile_rhs(h, kappa, &initial)?;
    let at_rest = initial_rhs[0].abs() <= 1e-12 && initial_rhs[2].abs() <= 1e-12;

    // The axis is reached at x = 0 where the system is singular; stop at a guard
    // distance comparable to the start-up offset and close by the local series.
    let guard = (10.0 * step).min(0.5 * initial.x);
    let chart_guard = kappa.chart_bound() - guard;
    let (lo, hi) = angle_bracket(initial.sigma);

    let mut f = |_s: f64, v: &[f64; 3]| rhs(h, kappa, v);
    let events = |a: &[f64; 3], b: &[f64; 3]| -> Vec<(Event, f64, f64)> {
        // (event, value before, value after); triggered when the value turns non-positive
        let mut out = vec![
            (Event::Axis, a[0] - guard, b[0] - guard),
            (Event::Angle(hi), hi - a[2], hi - b[2]),
            (Event::Angle(lo), a[2] - lo, b[2] - lo),
        ];
        if kappa.is_spherical() {
            out.push((Event::ChartBound, chart_guard - a[0], chart_guard - b[0]));
        }
        out.into_iter().filter(|e| e.1 > 0.0 && e.2 <= 0.0).collect()
    };

    let mut samples = vec![initial];
    let mut y = initial.vector();
    let mut s = initial.s;
    let end = initial.s + max_arclength;
    let mut hit: Option<(Event, ProfileState)> = None;

    while s < end - 1e-12 * step {
        let dt = step.min(end - s);
        let y1 = advance(&mut f, s, &y, dt)?;
        let triggered = events(&y, &y1);
        let window_exit = opts.window.is_some_and(|w| !w.contains(y1[0], y1[2]));
        if !triggered.is_empty() || window_exit {
            let f0 = f(s, &y)?;
            let f1 = f(s + dt, &y1)?;
            let dense = |t: f64| rk4::hermite(&y, &f0, &y1, &f1, dt, t);
            let mut best: Option<(f64, Event)> = None;
            for (ev, _, _) in triggered {
                let g = |v: &[f64; 3]| match ev {
                    Event::Axis => v[0] - guard,
                    Event::Angle(a) if a == hi => hi - v[2],
                    Event::Angle(_) => v[2] - lo,
                    Event::ChartBound => chart_guard - v[0],
                    Event::Window => unreachable!(),
                };
                let t = bisect(|t| g(&dense(t)));
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, ev));
                }
            }
            if window_exit {
                let w = opts.window.unwrap();
                let g = |v: &[f64; 3]| {
                    (v[0] - w.x.0).min(w.x.1 - v[0]).min(v[2] - w.sigma.0).min(w.sigma.1 - v[2])
                };
                let t = bisect(|t| g(&dense(t)));
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, Event::Window));
                }
            }
            let (t, ev) = best.expect("at least one event");
            let state = ProfileState::from_vector(s + t * dt, dense(t));
            hit = Some((ev, state));
            break;
        }
        s += dt;
        y = y1;
        samples.push(ProfileState::from_vector(s, y));
    }

    let mut closure_defect = None;
    let closure = match hit {
        None => {
            if at_rest {
                Closure::EquilibriumCylinder
            } else if samples.iter().all(|p| p.nu() > 0.0) {
                Closure::GraphArc
            } else {
                Closure::Truncated
            }
        }
        Some((ev, state)) => {
            if state.s > samples[samples.len() - 1].s {
                samples.push(state);
            }
            match ev {
                Event::Axis => {
                    let (defect, pole) = axis_closure(h, &state);
                    closure_defect = Some(defect);
                    if defect < CLOSURE_TOL {
                        samples.push(pole);
                        Closure::ClosedSphere
                    } else {
                        Closure::Truncated
                    }
                }
                Event::Angle(a) => {
                    let odd = ((a / PI).round() as i64).rem_euclid(2) == 1;
                    if odd {
                        closure_defect = Some(state.x);
                    }
                    if odd && state.x < CLOSURE_TOL {
                        Closure::ClosedSphere
                    } else {
                        Closure::Truncated
                    }
                }
                Event::ChartBound | Event::Window => Closure::Truncated,
            }
        }
    };

    Ok(ProfileCurve { samples, kappa, prescription: h.clone(), closure, step, closure_defect })
}

/// Open interval of multiples of π around the starting angle; reaching either
/// end is an event.
fn angle_bracket(sigma: f64) -> (f64, f64) {
    let mut lo = (sigma / PI).floor() * PI;
    let mut hi = (sigma / PI).ceil() * PI;
    if lo == sigma {
        lo -= PI;
    }
    if hi == sigma {
        hi += PI;
    }
    (lo, hi)
}

/// Extrapolates a profile arriving near the axis to `σ = π` along the regular
/// series `π − σ ≈ H(−1) x`; returns the miss distance and the closing pole sample.
fn axis_closure(h: &PrescribedFunction, state: &ProfileState) -> (f64, ProfileState) {
    let turns = ((state.sigma - PI) / (2.0 * PI)).round();
    let target = PI + 2.0 * PI * turns;
    let cos = state.sigma.cos();
    let rate = h.eval(-1.0);
    let defect = if cos < 0.0 && rate > 0.0 {
        (state.x - (target - state.sigma) / rate).abs()
    } else {
        f64::INFINITY
    };
    let ds = state.x / (-cos).max(f64::EPSILON);
    let pole = ProfileState {
        s: state.s + ds,
        x: 0.0,
        z: state.z + 0.5 * state.sigma.sin() * ds,
        sigma: target,
    };
    (defect, pole)
}

fn bisect(g: impl Fn(f64) -> f64) -> f64 {
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let v = g(m);
        if v.abs() <= EVENT_TOL || b - a < 1e-15 {
            return m;
        }
        if v > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// One accepted step of length `h`: RK4 with Richardson error estimation,
/// subdividing the step until the estimate meets [`LOCAL_ERROR_TOL`].
fn advance<F>(f: &mut F, s: f64, y: &[f64; 3], h: f64) -> Result<[f64; 3]>
where
    F: FnMut(f64, &[f64; 3]) -> Result<[f64; 3]>,
{
    let mut n = 1;
    let mut estimate = f64::INFINITY;
    let mut last_err = None;
    while n <= MAX_SUBDIVISION {
        match (rk4::substeps(f, s, y, h, n), rk4::substeps(f, s, y, h, 2 * n)) {
            (Ok(coarse), Ok(fine)) => {
                let diff = (0..3).map(|i| (fine[i] - coarse[i]).abs()).fold(0.0, f64::max);
                estimate = diff / 15.0 / h;
                if estimate <= LOCAL_ERROR_TOL {
                    return Ok(fine);
                }
            }
            (Err(e), _) | (_, Err(e)) => last_err = Some(e),
        }
        n *= 2;
    }
    match last_err {
        Some(e) if !estimate.is_finite() => Err(e),
        _ => Err(Error::StepRejected { s, estimate }),
    }
}

/// Rotational H-sphere, integrated from the pole until the profile returns to the axis.
///
/// The start-up uses `σ'(0) = H(1)` at the axis: `x = ε`, `z = 0`, `σ = H(1) ε`
/// with `ε = 10·step`; a pole sample at `s = 0` is prepended from the same series.
pub fn build_sphere(h: &PrescribedFunction, kappa: Kappa, step: f64) -> Result<ProfileCurve> {
    let class = validate_class(h, kappa);
    if !class.in_c1k_even {
        return Err(Error::ClassViolation(format!(
            "sphere needs an even prescription with 4H(y) > (1-kappa)sqrt(1-y^2); margin {} at y = {}, even = {}",
            class.margin_even, class.witness_even, class.even
        )));
    }
    let mut defect = f64::INFINITY;
    let mut last_err = None;
    for refinement in 0..SPHERE_REFINEMENTS {
        let st = step / f64::powi(2.0, refinement as i32);
        let eps = 10.0 * st;
        let h1 = h.eval(1.0);
        let start = ProfileState::new(eps, eps, 0.0, h1 * eps);
        match integrate(h, kappa, start, SPHERE_MAX_ARCLENGTH, st, IntegrateOptions::default()) {
            Ok(mut curve) => {
                if curve.closure == Closure::ClosedSphere {
                    curve.samples.insert(0, ProfileState::new(0.0, 0.0, -0.5 * h1 * eps * eps, 0.0));
                    return Ok(curve);
                }
                defect = curve.closure_defect.unwrap_or(f64::INFINITY);
            }
            Err(e @ (Error::StepRejected { .. } | Error::AxisSingularity { .. })) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    match last_err {
        Some(e) if !defect.is_finite() => Err(e),
        _ => Err(Error::NonClosure { defect }),
    }
}

/// Conserved quantity `sn_κ(x) sin σ + (2H₀/κ) cs_κ(x)` of constant-H₀ profiles.
pub fn first_integral(kappa: Kappa, h0: f64, state: &ProfileState) -> f64 {
    kappa.sn(state.x) * state.sigma.sin() + 2.0 * h0 / kappa.as_f64() * kappa.cs(state.x)
}

/// Radius of the geodesic circle whose vertical cylinder has mean curvature
/// `H(0)`, i.e. the root of `ct_κ(ρ) = 2H(0)`.
pub fn cylinder_radius(h: &PrescribedFunction, kappa: Kappa) -> Result<f64> {
    let target = 2.0 * h.eval(0.0);
    if kappa.is_spherical() && target <= 0.0 {
        return Err(Error::NoSolution("cot > 0 needs H(0) > 0".into()));
    }
    match solve_ct(kappa, target, 1e-13) {
        Some(rho) => Ok(rho),
        None if kappa.is_spherical() => Err(Error::NoSolution("cot > 0 needs H(0) > 0".into())),
        None => Err(Error::NoSolution("coth > 1".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Equilibrium {
    pub x: f64,
    pub sigma: f64,
    /// `sin σ*`: +1 on the branch `ct_κ(x*) = 2H(0)`, −1 on `ct_κ(x*) = −2H(0)`.
    pub branch: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhasePlaneReport {
    pub window: PhaseWindow,
    pub equilibria: Vec<Equilibrium>,
    pub cylinder_radius: Option<f64>,
    /// `(x, σ)` polylines, one per seed.
    pub orbits: Vec<Vec<[f64; 2]>>,
}

pub fn phase_plane(
    h: &PrescribedFunction,
    kappa: Kappa,
    window: PhaseWindow,
    seeds: usize,
) -> Result<PhasePlaneReport> {
    let (x0, x1) = window.x;
    let (s0, s1) = window.sigma;
    if !(x0 > 0.0 && x1 > x0 && x1 <= kappa.chart_bound()) || x1 == PI {
        return Err(Error::Domain(format!("phase window x-range ({x0}, {x1}) outside the chart")));
    }
    if !(s1 > s0) {
        return Err(Error::Domain(format!("empty sigma range ({s0}, {s1})")));
    }

    const GRID: usize = 12;
    let mut equilibria: Vec<Equilibrium> = Vec::new();
    for i in 0..GRID {
        for j in 0..GRID {
            let x = x0 + (x1 - x0) * (i as f64 + 0.5) / GRID as f64;
            let sigma = s0 + (s1 - s0) * (j as f64 + 0.5) / GRID as f64;
            if let Some(eq) = newton_equilibrium(h, kappa, x, sigma) {
                if window.contains(eq.x, eq.sigma)
                    && !equilibria.iter().any(|e| (e.x - eq.x).abs() < 1e-8 && (e.sigma - eq.sigma).abs() < 1e-8)
                {
                    equilibria.push(eq);
                }
            }
        }
    }
    equilibria.sort_by(|a, b| a.sigma.total_cmp(&b.sigma).then(a.x.total_cmp(&b.x)));

    let cols = (seeds as f64).sqrt().ceil().max(1.0) as usize;
    let rows = if seeds == 0 { 0 } else { seeds.div_ceil(cols) };
    let seed_points: Vec<(f64, f64)> = (0..seeds)
        .map(|k| {
            let (i, j) = (k % cols, k / cols);
            (
                x0 + (x1 - x0) * (i as f64 + 0.5) / cols as f64,
                s0 + (s1 - s0) * (j as f64 + 0.5) / rows as f64,
            )
        })
        .collect();
    let diag = (x1 - x0).hypot(s1 - s0);
    let step = diag / 2000.0;
    let length = 4.0 * ((x1 - x0) + (s1 - s0));
    let opts = IntegrateOptions { window: Some(window) };
    let orbits = seed_points
        .par_iter()
        .map(|&(x, sigma)| {
            let start = ProfileState::new(0.0, x, 0.0, sigma);
            match integrate(h, kappa, start, length, step, opts) {
                Ok(curve) => curve.samples.iter().map(|p| [p.x, p.sigma]).collect(),
                Err(_) => vec![[x, sigma]],
            }
        })
        .collect();

    Ok(PhasePlaneReport { window, equilibria, cylinder_radius: cylinder_radius(h, kappa).ok(), orbits })
}

fn newton_equilibrium(h: &PrescribedFunction, kappa: Kappa, mut x: f64, mut sigma: f64) -> Option<Equilibrium> {
    for _ in 0..100 {
        if !(x > 0.0 && x < kappa.chart_bound()) {
            return None;
        }
        let (sin, cos) = sigma.sin_cos();
        let ct = kappa.ct(x);
        let sn = kappa.sn(x);
        let f1 = cos;
        let f2 = 2.0 * h.eval(cos) - ct * sin;
        // Jacobian of (f1, f2) with respect to (x, σ)
        let (a, b) = (0.0, -sin);
        let (c, d) = (sin / (sn * sn), -2.0 * h.deriv(cos) * sin - ct * cos);
        let det = a * d - b * c;
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = (d * f1 - b * f2) / det;
        let ds = (a * f2 - c * f1) / det;
        x -= dx;
        sigma -= ds;
        if dx.abs() <= 1e-15 * x.abs().max(1.0) && ds.abs() <= 1e-15 {
            break;
        }
    }
    let (sin, cos) = sigma.sin_cos();
    let residual = cos.abs().max((2.0 * h.eval(cos) - kappa.ct(x) * sin).abs());
    (x > 0.0 && residual <= 1e-10).then(|| Equilibrium { x, sigma, branch: sin.signum() })
}

/// Ambient diameter of the constant-`h0` rotational sphere.
pub fn cmc_sphere_diameter(h0: f64, kappa: Kappa) -> Result<f64> {
    cmc_sphere_diameter_with_step(h0, kappa, DIAMETER_STEP)
}

pub fn cmc_sphere_diameter_with_step(h0: f64, kappa: Kappa, step: f64) -> Result<f64> {
    if !(4.0 * h0 > 1.0 - kappa.as_f64()) {
        return Err(Error::ClassViolation(format!("constant sphere needs 4H0 > 1 - kappa, got H0 = {h0}")));
    }
    let curve = build_sphere(&PrescribedFunction::constant(h0), kappa, step)?;
    Ok(profile_diameter(&curve))
}

/// Largest ambient distance between profile points in the meridian plane
/// (`Δθ ∈ {0, π}`).
pub fn profile_diameter(curve: &ProfileCurve) -> f64 {
    let kappa = curve.kappa;
    let pts: Vec<(AmbientPoint, AmbientPoint)> = curve
        .samples
        .iter()
        .map(|p| {
            (
                AmbientPoint { r: p.x, theta: 0.0, z: p.z },
                AmbientPoint { r: p.x, theta: PI, z: p.z },
            )
        })
        .collect();
    (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let (a, _) = &pts[i];
            pts[i..].iter().fold(0.0f64, |m, (b0, bpi)| {
                m.max(ambient_distance(kappa, a, b0)).max(ambient_distance(kappa, a, bpi))
            })
        })
        .reduce(|| 0.0, f64::max)
}
