//! Adaptive Dormand–Prince 5(4) integrator for real state vectors.
//!
//! Steps are clipped so that every requested output time is hit exactly.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 10_000_000;

/// Integrates `dy/dt = rhs(t, y)` from `times[0]` and returns the state at
/// every entry of `times` (which must be strictly increasing).
///
/// `check` runs on every stored state and may abort the integration.
pub fn integrate<F, C>(
    rhs: F,
    y0: &[f64],
    times: &[f64],
    tol: Tolerances,
    mut check: C,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]),
    C: FnMut(f64, &[f64]) -> Result<()>,
{
    if times.is_empty() {
        return Ok(vec![]);
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("output times must be strictly increasing".into()));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }

    let n = y0.len();
    let mut t = times[0];
    let mut y = y0.to_vec();
    check(t, &y)?;
    let mut out = Vec::with_capacity(times.len());
    out.push(y.clone());

    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    rhs(t, &y, &mut k[0]);
    let mut h = initial_step(&rhs, t, &y, &k[0], tol, times[times.len() - 1] - t);
    let mut steps = 0usize;

    for &target in &times[1..] {
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::ToleranceNotMet { t, h });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let h_step = if last { remaining } else { h };
            if h_step <= 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::ToleranceNotMet { t, h: h_step });
            }

            stage(&mut tmp, &y, h_step, &k, &[A21]);
            rhs(t + C2 * h_step, &tmp, &mut k[1]);
            stage(&mut tmp, &y, h_step, &k, &[A31, A32]);
            rhs(t + C3 * h_step, &tmp, &mut k[2]);
            stage(&mut tmp, &y, h_step, &k, &[A41, A42, A43]);
            rhs(t + C4 * h_step, &tmp, &mut k[3]);
            stage(&mut tmp, &y, h_step, &k, &[A51, A52, A53, A54]);
            rhs(t + C5 * h_step, &tmp, &mut k[4]);
            stage(&mut tmp, &y, h_step, &k, &[A61, A62, A63, A64, A65]);
            rhs(t + h_step, &tmp, &mut k[5]);
            stage(&mut y_new, &y, h_step, &k, &[A71, 0.0, A73, A74, A75, A76]);
            rhs(t + h_step, &y_new, &mut k[6]);

            let mut err_sq = 0.0;
            for i in 0..n {
                let e = h_step
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / scale).powi(2);
            }
            let err = if n == 0 { 0.0 } else { (err_sq / n as f64).sqrt() };
            if !err.is_finite() {
                h = h_step * MIN_FACTOR;
                continue;
            }

            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if err <= 1.0 {
                t = if last { target } else { t + h_step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                // a clipped final step says nothing about the natural step size
                if !last || factor < 1.0 {
                    h = h_step * factor;
                }
            } else {
                h = h_step * factor.min(1.0);
                if h <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::ToleranceNotMet { t, h });
                }
            }
        }
        check(t, &y)?;
        out.push(y.clone());
    }
    Ok(out)
}

fn stage(out: &mut [f64], y: &[f64], h: f64, k: &[Vec<f64>], a: &[f64]) {
    for i in 0..y.len() {
        let mut acc = 0.0;
        for (j, aj) in a.iter().enumerate() {
            acc += aj * k[j][i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Hairer–Nørsett–Wanner starting step heuristic.
fn initial_step<F>(rhs: &F, t: f64, y: &[f64], f0: &[f64], tol: Tolerances, span: f64) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y.len().max(1) as f64;
    let scale: Vec<f64> = y.iter().map(|v| tol.atol + tol.rtol * v.abs()).collect();
    let d0 = (y.iter().zip(&scale).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().zip(&scale).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(v, f)| v + h0 * f).collect();
    let mut f1 = vec![0.0; y.len()];
    rhs(t + h0, &y1, &mut f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(&scale)
        .map(|((a, b), s)| ((a - b) / s).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.2).collect();
        let out = integrate(
            |_, y, dy| dy[0] = -3.0 * y[0],
            &[1.0],
            &times,
            Tolerances::default(),
            |_, _| Ok(()),
        )
        .unwrap();
        for (t, y) in times.iter().zip(&out) {
            assert!((y[0] - (-3.0 * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn harmonic_oscillator_phase() {
        let times = [0.0, 1.0, 10.0];
        let out = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            &[1.0, 0.0],
            &times,
            Tolerances { rtol: 1e-11, atol: 1e-13 },
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((out[2][0] - 10f64.cos()).abs() < 1e-8);
        assert!((out[2][1] + 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn rejects_unordered_times() {
        let r = integrate(|_, _, _| {}, &[1.0], &[0.0, 1.0, 1.0], Tolerances::default(), |_, _| Ok(()));
        assert!(r.is_err());
    }

    #[test]
    fn check_can_abort() {
        let r = integrate(
            |_, _, dy| dy[0] = 1.0,
            &[0.0],
            &[0.0, 1.0, 2.0],
            Tolerances::default(),
            |t, _| {
                if t > 1.5 {
                    Err(Error::NonPhysicalState { t, reason: "stop".into() })
                } else {
                    Ok(())
                }
            },
        );
        assert!(matches!(r, Err(Error::NonPhysicalState { .. })));
    }
}
