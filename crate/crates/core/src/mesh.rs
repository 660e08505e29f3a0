//! Triangle meshes of rotational surfaces and disk graphs, and OBJ output.
//!
//! Meshes are for viewing only. Vertices are kept as ambient points and only
//! mapped to a chart when written.

use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::error::Result;
use crate::graphs::{DiskGraph, RadialGraph};
use crate::io::NumberFormat;
use crate::rotational::{Closure, ProfileCurve};
use crate::spaceform::{export_chart, AmbientPoint, Chart, ChartPoint, Kappa};

/// Default cap on the number of profile rings in a revolved mesh.
pub const DEFAULT_MAX_RINGS: usize = 400;

#[derive(Clone, Debug, Default)]
pub struct TriMesh {
    pub vertices: Vec<AmbientPoint>,
    pub faces: Vec<[usize; 3]>,
}

/// Edge counts of a triangle mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeReport {
    pub edges: usize,
    pub boundary: usize,
    pub non_manifold: usize,
}

impl EdgeReport {
    pub fn is_manifold(&self) -> bool {
        self.non_manifold == 0
    }

    pub fn is_watertight(&self) -> bool {
        self.non_manifold == 0 && self.boundary == 0
    }
}

impl TriMesh {
    /// Stitches consecutive rings. A ring with one vertex is a pole and is
    /// joined to its neighbour by a fan; other rings must share one length.
    fn from_rings(rings: Vec<Vec<AmbientPoint>>) -> Self {
        let mut mesh = TriMesh::default();
        let mut starts = Vec::with_capacity(rings.len());
        for ring in &rings {
            starts.push(mesh.vertices.len());
            mesh.vertices.extend_from_slice(ring);
        }
        for k in 1..rings.len() {
            let (a, b) = (starts[k - 1], starts[k]);
            let (na, nb) = (rings[k - 1].len(), rings[k].len());
            match (na, nb) {
                (1, 1) => {}
                (1, n) => {
                    for j in 0..n {
                        mesh.faces.push([a, b + j, b + (j + 1) % n]);
                    }
                }
                (n, 1) => {
                    for j in 0..n {
                        mesh.faces.push([a + j, b, a + (j + 1) % n]);
                    }
                }
                (n, _) => {
                    for j in 0..n {
                        let j1 = (j + 1) % n;
                        mesh.faces.push([a + j, b + j, b + j1]);
                        mesh.faces.push([a + j, b + j1, a + j1]);
                    }
                }
            }
        }
        mesh
    }

    pub fn edge_report(&self) -> EdgeReport {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        EdgeReport {
            edges: count.len(),
            boundary: count.values().filter(|&&c| c == 1).count(),
            non_manifold: count.values().filter(|&&c| c > 2).count(),
        }
    }

    /// OBJ text in `chart`. The quadric chart lives in 4-space, so it yields
    /// two files: the base chart `(x1, x2, x3)` and a height view `(x1, x2, z)`,
    /// returned with the suffixes `""` and `".height"`.
    pub fn to_obj(&self, kappa: Kappa, chart: Chart, fmt: NumberFormat) -> Result<Vec<(&'static str, String)>> {
        let mut coords = Vec::with_capacity(self.vertices.len());
        for p in &self.vertices {
            coords.push(export_chart(kappa, p, chart)?);
        }
        let faces: String = self.faces.iter().map(|f| format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1)).collect();
        let body = |header: &str, pick: &dyn Fn(&ChartPoint, &AmbientPoint) -> [f64; 3]| {
            let mut out = format!("# pmc mesh kappa={kappa} chart={chart} {header}\n");
            for (c, p) in coords.iter().zip(&self.vertices) {
                let v = pick(c, p);
                out.push_str(&format!("v {} {} {}\n", fmt.fmt(v[0]), fmt.fmt(v[1]), fmt.fmt(v[2])));
            }
            out.push_str(&faces);
            out
        };
        Ok(match chart {
            Chart::Quadric => vec![
                ("", body("base (x1 x2 x3)", &|c, _| first3(c))),
                (".height", body("height (x1 x2 z)", &|c, p| [c.coords()[0], c.coords()[1], p.z])),
            ],
            Chart::Polar => vec![("", body("(r cos t, r sin t, z)", &|_, p| {
                [p.r * p.theta.cos(), p.r * p.theta.sin(), p.z]
            }))],
            Chart::PoincareDisk => vec![("", body("(x1 x2 z)", &|c, _| first3(c)))],
        })
    }
}

fn first3(c: &ChartPoint) -> [f64; 3] {
    let v = c.coords();
    [v[0], v[1], v[2]]
}

fn ring(r: f64, z: f64, ntheta: usize) -> Vec<AmbientPoint> {
    if r == 0.0 {
        return vec![AmbientPoint { r: 0.0, theta: 0.0, z }];
    }
    (0..ntheta).map(|j| AmbientPoint { r, theta: TAU * j as f64 / ntheta as f64, z }).collect()
}

fn subsample(n: usize, max: usize) -> Vec<usize> {
    let max = max.max(2);
    if n <= max {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..max).map(|k| k * (n - 1) / (max - 1)).collect();
    idx.dedup();
    idx
}

/// Revolves a profile about the axis. Closed spheres give a watertight mesh.
pub fn revolve_profile(curve: &ProfileCurve, ntheta: usize, max_rings: usize) -> TriMesh {
    let samples = &curve.samples;
    let mut rings: Vec<Vec<AmbientPoint>> =
        subsample(samples.len(), max_rings).into_iter().map(|i| ring(samples[i].x, samples[i].z, ntheta)).collect();
    if curve.closure == Closure::ClosedSphere {
        for end in [0, rings.len() - 1] {
            if rings[end].len() > 1 {
                let z = rings[end][0].z;
                let pole = vec![AmbientPoint { r: 0.0, theta: 0.0, z }];
                if end == 0 {
                    rings.insert(0, pole);
                } else {
                    rings.push(pole);
                }
            }
        }
    }
    TriMesh::from_rings(rings)
}

/// Revolves a radial graph `u(r)` over its disk.
pub fn revolve_radial(graph: &RadialGraph, ntheta: usize, max_rings: usize) -> TriMesh {
    let rings = subsample(graph.len(), max_rings).into_iter().map(|i| ring(graph.r[i], graph.u[i], ntheta)).collect();
    TriMesh::from_rings(rings)
}

/// Surface of a disk graph on its own polar grid.
pub fn disk_mesh(graph: &DiskGraph) -> TriMesh {
    let (nt, dr, dt) = (graph.ntheta, graph.dr(), graph.dtheta());
    let mut rings = vec![vec![AmbientPoint { r: 0.0, theta: 0.0, z: graph.get(0, 0) }]];
    for i in 1..=graph.nr {
        rings.push((0..nt).map(|j| AmbientPoint { r: i as f64 * dr, theta: j as f64 * dt, z: graph.get(i, j) }).collect());
    }
    TriMesh::from_rings(rings)
}
