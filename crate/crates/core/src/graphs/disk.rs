//! Full Dirichlet problem on a geodesic disk, on a uniform polar grid.
//!
//! Unknowns are the origin plus rings `1..nr`; ring `nr` carries the boundary
//! data. Each unknown owns a control volume (an annular sector, or the small
//! disk of radius `Δr/2` at the origin) and the discrete equation is the flux
//! balance of `∇u/W` across its faces, with `1/W` frozen at the faces.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::graphs::sparse::{pcg, Csr, CsrBuilder};
use crate::graphs::{RadialGraph, ResidualReport};
use crate::prescribed::PrescribedFunction;
use crate::spaceform::Kappa;

pub const DEFAULT_DAMPING: f64 = 0.5;
const CG_TOL: f64 = 1e-14;
const VERTICAL_WARNING: f64 = 1e-3;

/// Heights on the polar grid: row `i` holds `u(iΔr, jΔθ)` for `j < ntheta`;
/// row 0 repeats the origin value.
#[derive(Clone, Debug)]
pub struct DiskGraph {
    pub kappa: Kappa,
    pub radius: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub u: Vec<f64>,
    pub boundary: Vec<f64>,
    pub iterations: usize,
    /// Max-norm residual of the discrete flux-balance equations.
    pub residual: f64,
    /// Discrete residual after each Picard update.
    pub residual_history: Vec<f64>,
    /// Set when some `ν = 1/W` fell below `1e-3`, i.e. the graph is close to vertical.
    pub vertical_warning: bool,
}

impl DiskGraph {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.u[i * self.ntheta + j % self.ntheta]
    }

    pub fn dr(&self) -> f64 {
        self.radius / self.nr as f64
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.ntheta as f64
    }

    /// Samples a radial graph whose grid is uniform with `nr` intervals.
    pub fn from_radial(kappa: Kappa, graph: &RadialGraph, ntheta: usize) -> Result<Self> {
        let nr = graph.len() - 1;
        let dr = graph.radius / nr as f64;
        if graph.r.iter().enumerate().any(|(i, &r)| (r - i as f64 * dr).abs() > 1e-12 * graph.radius) {
            return Err(Error::Precondition("radial graph grid is not uniform".into()));
        }
        let u = graph.u.iter().flat_map(|&v| std::iter::repeat_n(v, ntheta)).collect();
        Ok(Self {
            kappa,
            radius: graph.radius,
            nr,
            ntheta,
            u,
            boundary: vec![graph.u[nr]; ntheta],
            iterations: 0,
            residual: f64::NAN,
            residual_history: Vec::new(),
            vertical_warning: false,
        })
    }
}

/// Samples `g(θ)` at the grid angles `2πj/ntheta`.
pub fn sample_boundary(ntheta: usize, g: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..ntheta).map(|j| g(TAU * j as f64 / ntheta as f64)).collect()
}

/// Periodic piecewise-linear resampling of `[θ, g]` pairs onto the grid angles.
pub fn boundary_from_pairs(pairs: &[[f64; 2]], ntheta: usize) -> Result<Vec<f64>> {
    if pairs.is_empty() {
        return Err(Error::Parse("boundary needs at least one [theta, value] pair".into()));
    }
    let mut pts: Vec<(f64, f64)> = pairs.iter().map(|p| (p[0].rem_euclid(TAU), p[1])).collect();
    if pts.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::Parse("boundary values must be finite".into()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pts.len();
    Ok(sample_boundary(ntheta, |t| {
        let k = pts.partition_point(|p| p.0 <= t);
        let (a, b) = match k {
            0 => ((pts[n - 1].0 - TAU, pts[n - 1].1), pts[0]),
            k if k == n => (pts[n - 1], (pts[0].0 + TAU, pts[0].1)),
            k => (pts[k - 1], pts[k]),
        };
        if b.0 == a.0 {
            return a.1;
        }
        a.1 + (t - a.0) / (b.0 - a.0) * (b.1 - a.1)
    }))
}

/// Configuration of the damped Picard iteration.
#[derive(Clone, Debug)]
pub struct DiskSolver {
    pub nr: usize,
    pub ntheta: usize,
    /// Stop when the max-norm change between iterates falls below this.
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    /// Initial interior heights (full `(nr + 1) × ntheta` field); zero when absent.
    pub initial: Option<Vec<f64>>,
}

impl DiskSolver {
    pub fn new(nr: usize, ntheta: usize) -> Self {
        Self { nr, ntheta, tol: 1e-10, max_iter: 500, damping: DEFAULT_DAMPING, initial: None }
    }

    pub fn solve(&self, h: &PrescribedFunction, kappa: Kappa, radius: f64, boundary: &[f64]) -> Result<DiskGraph> {
        let (nr, nt) = (self.nr, self.ntheta);
        if nr < 8 || nt < 8 {
            return Err(Error::Precondition(format!("grid {nr} x {nt} too coarse; need at least 8 x 8")));
        }
        if !(radius > 0.0 && radius < kappa.chart_bound()) {
            return Err(Error::Domain(format!("disk radius {radius} outside (0, {})", kappa.chart_bound())));
        }
        if boundary.len() != nt || boundary.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("boundary needs {nt} finite samples")));
        }
        if !(self.tol > 0.0) || !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Precondition("tolerance must be positive and damping in (0, 1]".into()));
        }
        let grid = Grid::new(kappa, radius, nr, nt);
        let mut u = match &self.initial {
            Some(init) if init.len() == (nr + 1) * nt => init.clone(),
            Some(_) => return Err(Error::Precondition("initial field has the wrong size".into())),
            None => vec![0.0; (nr + 1) * nt],
        };
        u[nr * nt..].copy_from_slice(boundary);
        let u0 = u[0];
        u[..nt].fill(u0);

        let mut faces = grid.faces(&u);
        let mut residual = grid.discrete_residual(h, &u, &faces);
        let mut history = Vec::new();
        let mut iterations = 0;
        let n_unknown = 1 + (nr - 1) * nt;
        let mut changed = residual > self.tol;
        while changed {
            if iterations == self.max_iter || !residual.is_finite() {
                history.push(residual);
                return Err(Error::NonConvergence { history });
            }
            iterations += 1;
            let (a, b) = grid.assemble(h, &u, &faces);
            let mut x: Vec<f64> = (0..n_unknown).map(|k| u[grid.field_index(k)]).collect();
            if pcg(&a, &b, &mut x, CG_TOL, 20 * n_unknown).is_none() {
                history.push(residual);
                return Err(Error::NonConvergence { history });
            }
            let mut change = 0.0f64;
            for (k, xk) in x.iter().enumerate() {
                let idx = grid.field_index(k);
                let next = (1.0 - self.damping) * u[idx] + self.damping * xk;
                change = change.max((next - u[idx]).abs());
                u[idx] = next;
            }
            let u0 = u[0];
            u[..nt].fill(u0);
            faces = grid.faces(&u);
            residual = grid.discrete_residual(h, &u, &faces);
            history.push(residual);
            changed = !(change < self.tol);
        }
        let min_nu = faces.nu.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(DiskGraph {
            kappa,
            radius,
            nr,
            ntheta: nt,
            u,
            boundary: boundary.to_vec(),
            iterations,
            residual,
            residual_history: history,
            vertical_warning: min_nu < VERTICAL_WARNING,
        })
    }
}

/// Damped Picard solve of the Dirichlet problem with data `boundary` (one sample
/// per grid angle).
#[allow(clippy::too_many_arguments)]
pub fn solve_disk(
    h: &PrescribedFunction,
    kappa: Kappa,
    radius: f64,
    boundary: &[f64],
    nr: usize,
    ntheta: usize,
    tol: f64,
    max_iter: usize,
) -> Result<DiskGraph> {
    DiskSolver { tol, max_iter, ..DiskSolver::new(nr, ntheta) }.solve(h, kappa, radius, boundary)
}

struct Grid {
    nr: usize,
    nt: usize,
    dr: f64,
    dt: f64,
    /// `sn` at ring `i` and at face `i + 1/2`.
    sn_node: Vec<f64>,
    sn_face: Vec<f64>,
    /// Control-volume area of ring `i` (index 0 is the origin disk).
    area: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

/// Frozen `1/W` on radial faces `(i + 1/2, j)`, angular faces `(i, j + 1/2)`
/// and `ν` at unknown nodes.
struct Faces {
    radial: Vec<f64>,
    angular: Vec<f64>,
    nu: Vec<f64>,
}

impl Grid {
    fn new(kappa: Kappa, radius: f64, nr: usize, nt: usize) -> Self {
        let dr = radius / nr as f64;
        let dt = TAU / nt as f64;
        let sn_node = (0..=nr).map(|i| kappa.sn(i as f64 * dr)).collect();
        let sn_face = (0..nr).map(|i| kappa.sn((i as f64 + 0.5) * dr)).collect();
        let mut area = vec![kappa.disk_area(0.5 * dr)];
        for i in 1..nr {
            let outer = kappa.disk_area((i as f64 + 0.5) * dr);
            let inner = kappa.disk_area((i as f64 - 0.5) * dr);
            area.push((outer - inner) / nt as f64);
        }
        let cos = (0..nt).map(|j| (j as f64 * dt).cos()).collect();
        let sin = (0..nt).map(|j| (j as f64 * dt).sin()).collect();
        Self { nr, nt, dr, dt, sn_node, sn_face, area, cos, sin }
    }

    #[inline]
    fn at(&self, u: &[f64], i: usize, j: usize) -> f64 {
        u[i * self.nt + j % self.nt]
    }

    /// Field index of unknown `k` (0 is the origin).
    fn field_index(&self, k: usize) -> usize {
        if k == 0 { 0 } else { self.nt + (k - 1) }
    }

    fn unknown(&self, i: usize, j: usize) -> usize {
        if i == 0 { 0 } else { 1 + (i - 1) * self.nt + j % self.nt }
    }

    /// Gradient at the origin from the first Fourier modes of ring 1.
    fn origin_gradient(&self, u: &[f64]) -> (f64, f64) {
        let scale = 2.0 / (self.nt as f64 * self.dr);
        let (mut gx, mut gy) = (0.0, 0.0);
        for j in 0..self.nt {
            let v = self.at(u, 1, j);
            gx += v * self.cos[j];
            gy += v * self.sin[j];
        }
        (gx * scale, gy * scale)
    }

    fn faces(&self, u: &[f64]) -> Faces {
        let (nr, nt, dr, dt) = (self.nr, self.nt, self.dr, self.dt);
        let (gx, gy) = self.origin_gradient(u);
        // tangential gradient component at nodes 0..=nr, and radial one at 1..nr
        let tangential = |i: usize, j: usize| -> f64 {
            if i == 0 {
                -gx * self.sin[j] + gy * self.cos[j]
            } else {
                (self.at(u, i, j + 1) - self.at(u, i, j + nt - 1)) / (2.0 * dt * self.sn_node[i])
            }
        };
        let radial_g = |i: usize, j: usize| (self.at(u, i + 1, j) - self.at(u, i - 1, j)) / (2.0 * dr);

        let mut radial = Vec::with_capacity(nr * nt);
        for i in 0..nr {
            for j in 0..nt {
                let gr = (self.at(u, i + 1, j) - self.at(u, i, j)) / dr;
                let gt = 0.5 * (tangential(i, j) + tangential(i + 1, j));
                radial.push(1.0 / (1.0 + gr * gr + gt * gt).sqrt());
            }
        }
        let mut angular = Vec::with_capacity((nr - 1) * nt);
        let mut nu = Vec::with_capacity(1 + (nr - 1) * nt);
        nu.push(1.0 / (1.0 + gx * gx + gy * gy).sqrt());
        for i in 1..nr {
            for j in 0..nt {
                let gt = (self.at(u, i, j + 1) - self.at(u, i, j)) / (dt * self.sn_node[i]);
                let gr = 0.5 * (radial_g(i, j) + radial_g(i, j + 1));
                angular.push(1.0 / (1.0 + gr * gr + gt * gt).sqrt());
                let (gr, gt) = (radial_g(i, j), tangential(i, j));
                nu.push(1.0 / (1.0 + gr * gr + gt * gt).sqrt());
            }
        }
        Faces { radial, angular, nu }
    }

    /// Transmissibilities of the faces of node `(i, j)`, `i ≥ 1`:
    /// (inner, outer, previous angle, next angle).
    fn transmissibility(&self, faces: &Faces, i: usize, j: usize) -> [f64; 4] {
        let nt = self.nt;
        let rad = self.dt / self.dr;
        let ang = self.dr / (self.dt * self.sn_node[i]);
        [
            faces.radial[(i - 1) * nt + j] * self.sn_face[i - 1] * rad,
            faces.radial[i * nt + j] * self.sn_face[i] * rad,
            faces.angular[(i - 1) * nt + (j + nt - 1) % nt] * ang,
            faces.angular[(i - 1) * nt + j] * ang,
        ]
    }

    fn origin_transmissibility(&self, faces: &Faces, j: usize) -> f64 {
        faces.radial[j] * self.sn_face[0] * self.dt / self.dr
    }

    /// Flux balance minus source, divided by the control area, at each unknown.
    fn discrete_residual(&self, h: &PrescribedFunction, u: &[f64], faces: &Faces) -> f64 {
        let (nr, nt) = (self.nr, self.nt);
        let u0 = u[0];
        let mut flux = 0.0;
        for j in 0..nt {
            flux += self.origin_transmissibility(faces, j) * (self.at(u, 1, j) - u0);
        }
        let mut max = ((flux - 2.0 * h.eval(faces.nu[0]) * self.area[0]) / self.area[0]).abs();
        for i in 1..nr {
            for j in 0..nt {
                let t = self.transmissibility(faces, i, j);
                let c = self.at(u, i, j);
                let flux = t[0] * (self.at(u, i - 1, j) - c)
                    + t[1] * (self.at(u, i + 1, j) - c)
                    + t[2] * (self.at(u, i, j + nt - 1) - c)
                    + t[3] * (self.at(u, i, j + 1) - c);
                let nu = faces.nu[self.unknown(i, j)];
                let r = ((flux - 2.0 * h.eval(nu) * self.area[i]) / self.area[i]).abs();
                if r > max || r.is_nan() {
                    max = r;
                }
            }
        }
        max
    }

    /// Linear system `A v = b` for the next iterate with coefficients frozen at `u`.
    fn assemble(&self, h: &PrescribedFunction, u: &[f64], faces: &Faces) -> (Csr, Vec<f64>) {
        let (nr, nt) = (self.nr, self.nt);
        let n = 1 + (nr - 1) * nt;
        let mut a = CsrBuilder::new(n);
        let mut b = vec![0.0; n];
        b[0] = -2.0 * h.eval(faces.nu[0]) * self.area[0];
        for j in 0..nt {
            let t = self.origin_transmissibility(faces, j);
            a.add(0, 0, t);
            a.add(0, self.unknown(1, j), -t);
        }
        for i in 1..nr {
            for j in 0..nt {
                let row = self.unknown(i, j);
                let t = self.transmissibility(faces, i, j);
                b[row] = -2.0 * h.eval(faces.nu[row]) * self.area[i];
                let neighbours = [(i - 1, j), (i + 1, j), (i, j + nt - 1), (i, j + 1)];
                for (tk, (ni, nj)) in t.iter().zip(neighbours) {
                    a.add(row, row, *tk);
                    if ni == nr {
                        b[row] += tk * self.at(u, nr, nj);
                    } else {
                        a.add(row, self.unknown(ni, nj), -tk);
                    }
                }
            }
        }
        (a.build(), b)
    }
}

/// Non-divergence evaluation of `div(∇u/W) − 2H(1/W)` at every interior node:
///
/// `div(∇u/W) = (Δu − Hess u(∇u, ∇u)/W²)/W`
///
/// with central differences in `(r, θ)` and the polar Christoffel symbols; at
/// the origin the derivatives come from a Fourier fit of ring 1.
pub fn residual_disk(graph: &DiskGraph, h: &PrescribedFunction, kappa: Kappa) -> ResidualReport {
    let (nr, nt) = (graph.nr, graph.ntheta);
    let dr = graph.dr();
    let dt = graph.dtheta();
    let u = |i: usize, j: usize| graph.get(i, j);
    let mut values = Vec::with_capacity(1 + (nr - 1) * nt);

    // origin
    let u0 = u(0, 0);
    let (mut m, mut c1, mut s1, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for j in 0..nt {
        let th = j as f64 * dt;
        let v = u(1, j);
        m += v;
        c1 += v * th.cos();
        s1 += v * th.sin();
        c2 += v * (2.0 * th).cos();
        s2 += v * (2.0 * th).sin();
    }
    let k = 2.0 / nt as f64;
    let (m, c1, s1, c2, s2) = (m / nt as f64, c1 * k, s1 * k, c2 * k, s2 * k);
    let (gx, gy) = (c1 / dr, s1 / dr);
    let lap = 4.0 * (m - u0) / (dr * dr);
    let diff = 4.0 * c2 / (dr * dr);
    let uxy = 2.0 * s2 / (dr * dr);
    let (uxx, uyy) = (0.5 * (lap + diff), 0.5 * (lap - diff));
    let w2 = 1.0 + gx * gx + gy * gy;
    let hess = uxx * gx * gx + 2.0 * uxy * gx * gy + uyy * gy * gy;
    let div = (lap - hess / w2) / w2.sqrt();
    let nu = 1.0 / w2.sqrt();
    values.push((div - 2.0 * h.eval(nu), [0.0, 0.0], nu));

    for i in 1..nr {
        let r = i as f64 * dr;
        let (sn, cs) = (kappa.sn(r), kappa.cs(r));
        let ct = cs / sn;
        for j in 0..nt {
            let (jp, jm) = (j + 1, j + nt - 1);
            let c = u(i, j);
            let ur = (u(i + 1, j) - u(i - 1, j)) / (2.0 * dr);
            let urr = (u(i + 1, j) - 2.0 * c + u(i - 1, j)) / (dr * dr);
            let ut = (u(i, jp) - u(i, jm)) / (2.0 * dt);
            let utt = (u(i, jp) - 2.0 * c + u(i, jm)) / (dt * dt);
            let urt = (u(i + 1, jp) - u(i + 1, jm) - u(i - 1, jp) + u(i - 1, jm)) / (4.0 * dr * dt);
            let gt = ut / sn;
            let w2 = 1.0 + ur * ur + gt * gt;
            let lap = urr + ct * ur + utt / (sn * sn);
            let hess = urr * ur * ur
                + 2.0 * ur * gt * (urt - ct * ut) / sn
                + gt * gt * (utt + sn * cs * ur) / (sn * sn);
            let div = (lap - hess / w2) / w2.sqrt();
            let nu = 1.0 / w2.sqrt();
            values.push((div - 2.0 * h.eval(nu), [r, j as f64 * dt], nu));
        }
    }
    ResidualReport::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HYP: Kappa = Kappa::HYPERBOLIC;

    #[test]
    fn minimal_slice_needs_no_iterations() {
        let g = solve_disk(&PrescribedFunction::constant(0.0), HYP, 0.7, &[0.0; 16], 8, 16, 1e-10, 10).unwrap();
        assert_eq!(g.iterations, 0);
        assert!(g.u.iter().all(|&v| v == 0.0));
        let rep = residual_disk(&g, &PrescribedFunction::constant(0.0), HYP);
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn control_volumes_tile_the_disk() {
        let g = Grid::new(HYP, 0.9, 12, 10);
        let total: f64 = g.area[0] + g.area[1..].iter().sum::<f64>() * 10.0;
        let expected = HYP.disk_area(0.9 - 0.5 * g.dr);
        assert!((total - expected).abs() < 1e-12);
    }

    #[test]
    fn operator_is_symmetric() {
        let grid = Grid::new(HYP, 0.6, 8, 8);
        let u: Vec<f64> = (0..9 * 8).map(|k| 0.01 * (k as f64).sin()).collect();
        let faces = grid.faces(&u);
        let (a, _) = grid.assemble(&PrescribedFunction::constant(1.0), &u, &faces);
        for i in 0..a.n() {
            for j in 0..a.n() {
                assert!((a.get(i, j) - a.get(j, i)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = PrescribedFunction::constant(1.0);
        assert!(solve_disk(&h, HYP, 0.5, &[0.0; 4], 4, 4, 1e-10, 10).is_err());
        assert!(solve_disk(&h, HYP, 0.5, &[0.0; 7], 8, 8, 1e-10, 10).is_err());
        assert!(solve_disk(&h, HYP, 0.5, &[0.0; 8], 8, 8, 0.0, 10).is_err());
    }

    #[test]
    fn non_convergence_carries_history() {
        let h = PrescribedFunction::constant(1.0);
        match solve_disk(&h, HYP, 0.5, &[0.0; 8], 8, 8, 1e-12, 2) {
            Err(Error::NonConvergence { history }) => assert_eq!(history.len(), 3),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn boundary_pairs_resample_periodically() {
        let b = boundary_from_pairs(&[[0.0, 0.0], [std::f64::consts::PI, 1.0]], 4).unwrap();
        assert_eq!(b, vec![0.0, 0.5, 1.0, 0.5]);
    }
}
