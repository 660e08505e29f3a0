//! Prescription functions `H: [-1, 1] → ℝ` of the angle function, and their
//! admissibility classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaceform::Kappa;

/// Grid used by [`validate_class`].
pub const CLASS_GRID: usize = 2001;
/// Grid used for the parity check.
pub const PARITY_GRID: usize = 1001;
const PARITY_TOL: f64 = 1e-12;

/// JSON form of a prescription.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Descriptor {
    Constant { value: f64 },
    /// `H(y) = y`.
    Linear,
    /// `Σ aᵢ yⁱ`.
    Poly { coeffs: Vec<f64> },
    /// `Σ a₂ᵢ y²ⁱ`.
    EvenPoly { coeffs: Vec<f64> },
    /// Monotone cubic interpolation through `[y, H]` nodes.
    Table { nodes: Vec<[f64; 2]> },
}

#[derive(Clone, Debug)]
enum Evaluator {
    Constant(f64),
    Linear,
    Poly(Vec<f64>),
    EvenPoly(Vec<f64>),
    Table(Pchip),
}

/// An immutable evaluator for `H` and `H'` on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct PrescribedFunction {
    descriptor: Descriptor,
    eval: Evaluator,
    even: bool,
}

impl PrescribedFunction {
    pub fn parse(text: &str) -> Result<Self> {
        let descriptor: Descriptor =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("prescription: {e}")))?;
        Self::from_descriptor(descriptor)
    }

    pub fn constant(value: f64) -> Self {
        Self::from_descriptor(Descriptor::Constant { value }).expect("finite constant")
    }

    pub fn from_descriptor(descriptor: Descriptor) -> Result<Self> {
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        let eval = match &descriptor {
            Descriptor::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::Parse("constant prescription must be finite".into()));
                }
                Evaluator::Constant(*value)
            }
            Descriptor::Linear => Evaluator::Linear,
            Descriptor::Poly { coeffs } | Descriptor::EvenPoly { coeffs } => {
                if coeffs.is_empty() || !finite(coeffs) {
                    return Err(Error::Parse("polynomial needs at least one finite coefficient".into()));
                }
                if matches!(descriptor, Descriptor::Poly { .. }) {
                    Evaluator::Poly(coeffs.clone())
                } else {
                    Evaluator::EvenPoly(coeffs.clone())
                }
            }
            Descriptor::Table { nodes } => Evaluator::Table(Pchip::new(nodes)?),
        };
        let mut f = Self { descriptor, eval, even: false };
        f.even = (0..PARITY_GRID).all(|i| {
            let y = grid_point(i, PARITY_GRID);
            (f.eval(y) - f.eval(-y)).abs() <= PARITY_TOL
        });
        Ok(f)
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.descriptor).expect("descriptor serializes")
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.eval {
            Evaluator::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match &self.eval {
            Evaluator::Constant(c) => *c,
            Evaluator::Linear => y,
            Evaluator::Poly(a) => horner(a, y),
            Evaluator::EvenPoly(a) => horner(a, y * y),
            Evaluator::Table(t) => t.eval(y),
        }
    }

    pub fn deriv(&self, y: f64) -> f64 {
        match &self.eval {
            Evaluator::Constant(_) => 0.0,
            Evaluator::Linear => 1.0,
            Evaluator::Poly(a) => horner_deriv(a, y),
            Evaluator::EvenPoly(a) => 2.0 * y * horner_deriv(a, y * y),
            Evaluator::Table(t) => t.deriv(y),
        }
    }

    /// Minimum of `H` over the class grid.
    pub fn grid_min(&self) -> f64 {
        (0..CLASS_GRID).map(|i| self.eval(grid_point(i, CLASS_GRID))).fold(f64::INFINITY, f64::min)
    }
}

fn horner(a: &[f64], y: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

fn horner_deriv(a: &[f64], y: f64) -> f64 {
    a.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, c)| acc * y + i as f64 * c)
}

/// `i`-th point of an `n`-point uniform grid on `[-1, 1]`, exact at both ends and at 0.
pub(crate) fn grid_point(i: usize, n: usize) -> f64 {
    let half = (n - 1) as f64 / 2.0;
    (i as f64 - half) / half
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson (PCHIP) slopes.
#[derive(Clone, Debug)]
struct Pchip {
    y: Vec<f64>,
    h: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(nodes: &[[f64; 2]]) -> Result<Self> {
        if nodes.len() < 4 {
            return Err(Error::Parse(format!("table needs at least 4 nodes, got {}", nodes.len())));
        }
        let mut nodes = nodes.to_vec();
        for n in &nodes {
            if !(n[0].is_finite() && n[1].is_finite()) {
                return Err(Error::Parse("table node is not finite".into()));
            }
            if !(-1.0..=1.0).contains(&n[0]) {
                return Err(Error::Parse(format!("table node y = {} outside [-1, 1]", n[0])));
            }
        }
        nodes.sort_by(|a, b| a[0].total_cmp(&b[0]));
        if nodes.windows(2).any(|w| w[0][0] == w[1][0]) {
            return Err(Error::Parse("table has duplicate nodes".into()));
        }
        let y: Vec<f64> = nodes.iter().map(|n| n[0]).collect();
        let h: Vec<f64> = nodes.iter().map(|n| n[1]).collect();
        let n = y.len();
        let dx: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|k| (h[k + 1] - h[k]) / dx[k]).collect();
        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            if del[k - 1] * del[k] > 0.0 {
                let w1 = 2.0 * dx[k] + dx[k - 1];
                let w2 = dx[k] + 2.0 * dx[k - 1];
                d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
            }
        }
        d[0] = end_slope(dx[0], dx[1], del[0], del[1]);
        d[n - 1] = end_slope(dx[n - 2], dx[n - 3], del[n - 2], del[n - 3]);
        Ok(Self { y, h, d })
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.y.len();
        match self.y.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.y.len();
        if t < self.y[0] {
            return self.h[0] + self.d[0] * (t - self.y[0]);
        }
        if t > self.y[n - 1] {
            return self.h[n - 1] + self.d[n - 1] * (t - self.y[n - 1]);
        }
        let k = self.segment(t);
        let w = self.y[k + 1] - self.y[k];
        let s = (t - self.y[k]) / w;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.h[k] + h10 * w * self.d[k] + h01 * self.h[k + 1] + h11 * w * self.d[k + 1]
    }

    fn deriv(&self, t: f64) -> f64 {
        let n = self.y.len();
        if t < self.y[0] {
            return self.d[0];
        }
        if t > self.y[n - 1] {
            return self.d[n - 1];
        }
        let k = self.segment(t);
        let w = self.y[k + 1] - self.y[k];
        let s = (t - self.y[k]) / w;
        let dh00 = 6.0 * s * (s - 1.0) / w;
        let dh10 = (1.0 - s) * (1.0 - 3.0 * s);
        let dh01 = -dh00;
        let dh11 = s * (3.0 * s - 2.0);
        dh00 * self.h[k] + dh10 * self.d[k] + dh01 * self.h[k + 1] + dh11 * self.d[k + 1]
    }
}

// Shape-preserving three-point end slope.
fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Membership of a prescription in the admissibility classes
/// `4H(y) > 1 − κ` and (even, `4H(y) > (1 − κ)√(1 − y²)`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub in_c1k: bool,
    pub in_c1k_even: bool,
    /// `min 4H(y) − (1 − κ)` over the grid.
    pub margin: f64,
    pub witness: f64,
    /// `min 4H(y) − (1 − κ)√(1 − y²)` over the grid.
    pub margin_even: f64,
    pub witness_even: f64,
    pub even: bool,
}

pub fn validate_class(h: &PrescribedFunction, kappa: Kappa) -> ClassReport {
    let gap = 1.0 - kappa.as_f64();
    let mut margin = (f64::INFINITY, 0.0);
    let mut margin_even = (f64::INFINITY, 0.0);
    for i in 0..CLASS_GRID {
        let y = grid_point(i, CLASS_GRID);
        let four_h = 4.0 * h.eval(y);
        let m = four_h - gap;
        if m < margin.0 {
            margin = (m, y);
        }
        let me = four_h - gap * (1.0 - y * y).max(0.0).sqrt();
        if me < margin_even.0 {
            margin_even = (me, y);
        }
    }
    ClassReport {
        in_c1k: margin.0 > 0.0,
        in_c1k_even: h.is_even() && margin_even.0 > 0.0,
        margin: margin.0,
        witness: margin.1,
        margin_even: margin_even.0,
        witness_even: margin_even.1,
        even: h.is_even(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let c = PrescribedFunction::parse(r#"{"type":"constant","value":1.0}"#).unwrap();
        assert_eq!(c.eval(0.3), 1.0);
        assert!(c.is_even());
        let l = PrescribedFunction::parse(r#"{"type":"linear"}"#).unwrap();
        assert_eq!(l.eval(-0.5), -0.5);
        assert!(!l.is_even());
        let e = PrescribedFunction::parse(r#"{"type":"even-poly","coeffs":[1.0,0.25]}"#).unwrap();
        assert_eq!(e.eval(0.5), 1.0 + 0.25 * 0.25);
        assert_eq!(e.deriv(0.5), 0.25);
        assert!(e.is_even());
        let p = PrescribedFunction::parse(r#"{"type":"poly","coeffs":[1.0,2.0,3.0]}"#).unwrap();
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.deriv(2.0), 14.0);
    }

    #[test]
    fn parse_errors() {
        assert!(PrescribedFunction::parse("{").is_err());
        assert!(PrescribedFunction::parse(r#"{"type":"cubic"}"#).is_err());
        assert!(PrescribedFunction::parse(r#"{"type":"table","nodes":[[-1,1],[0,1],[1,1]]}"#).is_err());
        assert!(PrescribedFunction::parse(r#"{"type":"table","nodes":[[-1,1],[0,1],[0.5,1],[1.5,1]]}"#).is_err());
        assert!(PrescribedFunction::parse(r#"{"type":"table","nodes":[[-1,1],[0,1],[0,2],[1,1]]}"#).is_err());
        assert!(PrescribedFunction::parse(r#"{"type":"poly","coeffs":[]}"#).is_err());
    }

    #[test]
    fn table_interpolates_and_is_c1() {
        let t = PrescribedFunction::parse(r#"{"type":"table","nodes":[[1,2],[-1,2],[0,1],[0.5,1.25],[-0.5,1.25]]}"#)
            .unwrap();
        assert_eq!(t.eval(0.5), 1.25);
        assert_eq!(t.eval(-1.0), 2.0);
        assert!(t.is_even());
        // derivative is continuous across a node and matches finite differences
        let fd = (t.eval(0.3 + 1e-6) - t.eval(0.3 - 1e-6)) / 2e-6;
        assert!((fd - t.deriv(0.3)).abs() < 1e-6);
        assert!((t.deriv(0.5 - 1e-12) - t.deriv(0.5 + 1e-12)).abs() < 1e-9);
    }

    #[test]
    fn class_examples() {
        let k = Kappa::HYPERBOLIC;
        let r = validate_class(&PrescribedFunction::constant(1.0), k);
        assert!(r.in_c1k && r.in_c1k_even);
        assert_eq!(r.margin, 2.0);
        assert_eq!(r.margin_even, 2.0);
        assert_eq!(r.witness_even, 0.0);

        let r = validate_class(&PrescribedFunction::parse(r#"{"type":"linear"}"#).unwrap(), k);
        assert!(!r.in_c1k && !r.in_c1k_even);
        assert_eq!(r.margin, -6.0);
        assert_eq!(r.witness, -1.0);

        let r = validate_class(&PrescribedFunction::constant(0.5), k);
        assert!(!r.in_c1k);
        assert_eq!(r.margin, 0.0);
        assert!(!r.in_c1k_even);
    }

    #[test]
    fn spherical_gap_vanishes() {
        let r = validate_class(&PrescribedFunction::constant(1e-6), Kappa::SPHERICAL);
        assert!(r.in_c1k && r.in_c1k_even);
        let r = validate_class(&PrescribedFunction::constant(0.0), Kappa::SPHERICAL);
        assert!(!r.in_c1k);
    }
}
