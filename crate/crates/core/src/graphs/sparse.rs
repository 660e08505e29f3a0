//! Minimal CSR storage and Jacobi-preconditioned conjugate gradients for the
//! symmetric positive definite systems of the disk solver.

#[derive(Clone, Debug, Default)]
pub(crate) struct CsrBuilder {
    rows: Vec<Vec<(usize, f64)>>,
}

impl CsrBuilder {
    pub fn new(n: usize) -> Self {
        Self { rows: vec![Vec::new(); n] }
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let r = &mut self.rows[row];
        match r.iter_mut().find(|(c, _)| *c == col) {
            Some(e) => e.1 += value,
            None => r.push((col, value)),
        }
    }

    pub fn build(self) -> Csr {
        let mut indptr = Vec::with_capacity(self.rows.len() + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for mut row in self.rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                indices.push(c);
                data.push(v);
            }
            indptr.push(indices.len());
        }
        Csr { indptr, indices, data }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Csr {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl Csr {
    pub fn n(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (a, b) = (self.indptr[i], self.indptr[i + 1]);
            *o = self.indices[a..b].iter().zip(&self.data[a..b]).map(|(&c, v)| v * x[c]).sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| {
                let (a, b) = (self.indptr[i], self.indptr[i + 1]);
                (a..b).find(|&k| self.indices[k] == i).map_or(0.0, |k| self.data[k])
            })
            .collect()
    }

    #[cfg(test)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (a..b).find(|&k| self.indices[k] == j).map_or(0.0, |k| self.data[k])
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` in place from the initial guess in `x`. Returns the number
/// of iterations, or `None` if the relative tolerance was not met.
pub(crate) fn pcg(a: &Csr, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Option<usize> {
    let n = a.n();
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let b_norm = dot(b, b).sqrt();
    let target = rel_tol * b_norm.max(f64::MIN_POSITIVE);
    if dot(&r, &r).sqrt() <= target {
        return Some(0);
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return None;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= target {
            return Some(it);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_1d_laplacian() {
        let n = 50;
        let mut bld = CsrBuilder::new(n);
        for i in 0..n {
            bld.add(i, i, 2.0);
            if i > 0 {
                bld.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                bld.add(i, i + 1, -1.0);
            }
        }
        let a = bld.build();
        assert_eq!(a.get(3, 4), -1.0);
        let exact: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut b = vec![0.0; n];
        a.matvec(&exact, &mut b);
        let mut x = vec![0.0; n];
        assert!(pcg(&a, &b, &mut x, 1e-14, 1000).is_some());
        let err = x.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}
