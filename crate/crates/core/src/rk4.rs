//! Classical fixed-step Runge–Kutta of order 4 on small fixed-size systems.

pub(crate) type State<const N: usize> = [f64; N];

#[inline]
fn axpy<const N: usize>(y: &State<N>, h: f64, k: &State<N>) -> State<N> {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

/// One RK4 step; the right-hand side may fail (singular points).
pub(crate) fn step<const N: usize, E, F>(f: &mut F, t: f64, y: &State<N>, h: f64) -> Result<State<N>, E>
where
    F: FnMut(f64, &State<N>) -> Result<State<N>, E>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// `n` equal substeps covering `[t, t + h]`.
pub(crate) fn substeps<const N: usize, E, F>(
    f: &mut F,
    t: f64,
    y: &State<N>,
    h: f64,
    n: usize,
) -> Result<State<N>, E>
where
    F: FnMut(f64, &State<N>) -> Result<State<N>, E>,
{
    let dt = h / n as f64;
    let mut y = *y;
    for i in 0..n {
        y = step(f, t + i as f64 * dt, &y, dt)?;
    }
    Ok(y)
}

/// Cubic Hermite interpolation of a step from endpoint values and slopes, `theta ∈ [0, 1]`.
pub(crate) fn hermite<const N: usize>(
    y0: &State<N>,
    f0: &State<N>,
    y1: &State<N>,
    f1: &State<N>,
    h: f64,
    theta: f64,
) -> State<N> {
    let t = theta;
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_harmonic_oscillator() {
        let mut f = |_t: f64, y: &State<2>| Ok::<_, ()>([y[1], -y[0]]);
        let mut err = |n: usize| {
            let y = substeps(&mut f, 0.0, &[1.0, 0.0], 1.0, n).unwrap();
            (y[0] - 1f64.cos()).abs()
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn hermite_reproduces_cubic() {
        // y = t³ over [0, 2]
        let y = hermite(&[0.0], &[0.0], &[8.0], &[12.0], 2.0, 0.25);
        assert!((y[0] - 0.125).abs() < 1e-14);
    }
}
