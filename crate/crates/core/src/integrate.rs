//! Shared fixed-step RK4 driver for systems of dense matrix-valued ODEs.
//!
//! All integrators in this crate reduce to the same shape: a state made of a
//! few square complex matrices, a right-hand side evaluated at interior
//! times, snapshots recorded at the reporting grid only. The driver advances
//! each reporting interval with an integer number of equal substeps no longer
//! than the requested `dt`, so reporting points are hit exactly and runs are
//! bit-for-bit reproducible. An optional per-interval error budget activates
//! step-doubling: the interval is integrated twice (steps h and h/2), the
//! Richardson estimate ‖fine − coarse‖/15 is compared against the budget, and
//! the fine solution is kept either way.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schedule::TimeGrid;

pub(crate) type MatState = Vec<Array2<Complex64>>;

fn fro_norm(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn all_finite(state: &MatState) -> bool {
    state
        .iter()
        .all(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
}

/// base + factor·k, componentwise over the state tuple.
fn shifted(base: &MatState, k: &MatState, factor: f64) -> MatState {
    base.iter()
        .zip(k)
        .map(|(b, kk)| b + &kk.mapv(|z| z * factor))
        .collect()
}

fn rk4_step<F>(y: &MatState, t: f64, h: f64, rhs: &F) -> MatState
where
    F: Fn(f64, &MatState) -> MatState,
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, &shifted(y, &k1, 0.5 * h));
    let k3 = rhs(t + 0.5 * h, &shifted(y, &k2, 0.5 * h));
    let k4 = rhs(t + h, &shifted(y, &k3, h));
    y.iter()
        .zip(k1.iter().zip(k2.iter().zip(k3.iter().zip(k4.iter()))))
        .map(|(y0, (a, (b, (c, d))))| {
            let mut acc = a.clone();
            acc.zip_mut_with(b, |x, v| *x += 2.0 * v);
            acc.zip_mut_with(c, |x, v| *x += 2.0 * v);
            acc.zip_mut_with(d, |x, v| *x += *v);
            y0 + &acc.mapv(|z| z * (h / 6.0))
        })
        .collect()
}

/// Integrates one reporting interval `[t_a, t_a + delta]` with `n` equal
/// substeps. Substep times are computed from the interval endpoints rather
/// than accumulated, so they carry no drift.
fn rk4_interval<F>(mut y: MatState, t_a: f64, delta: f64, n: usize, rhs: &F) -> MatState
where
    F: Fn(f64, &MatState) -> MatState,
{
    let h = delta / n as f64;
    for i in 0..n {
        let t = t_a + delta * (i as f64) / (n as f64);
        y = rk4_step(&y, t, h, rhs);
    }
    y
}

/// Advances `state0` across `grid`, recording a snapshot at every grid point
/// (the first snapshot is the initial state itself).
///
/// `dt` caps the substep length; each interval uses the smallest equal
/// subdivision that respects it. `budget`, when set, bounds the per-interval
/// Richardson error estimate and turns violations into
/// [`Error::StepRejected`].
pub(crate) fn rk4_path<F>(
    state0: MatState,
    grid: &TimeGrid,
    dt: f64,
    budget: Option<f64>,
    rhs: F,
) -> Result<Vec<(f64, MatState)>>
where
    F: Fn(f64, &MatState) -> MatState,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::BadParams {
            reason: format!("integrator substep must be positive and finite, got {dt}"),
        });
    }
    if let Some(b) = budget {
        if !(b > 0.0) {
            return Err(Error::BadParams {
                reason: format!("error budget must be positive, got {b}"),
            });
        }
    }
    if !all_finite(&state0) {
        return Err(Error::NonFinite {
            what: "integration initial state",
        });
    }
    let points = grid.points();
    let mut out = Vec::with_capacity(points.len());
    out.push((points[0], state0.clone()));
    let mut y = state0;
    for w in points.windows(2) {
        let (t_a, t_b) = (w[0], w[1]);
        let delta = t_b - t_a;
        // the −1e−12 slack keeps exact multiples of dt from picking up a
        // spurious extra substep to roundoff
        let n = ((delta - 1e-12) / dt).ceil().max(1.0) as usize;
        y = match budget {
            None => rk4_interval(y, t_a, delta, n, &rhs),
            Some(b) => {
                let coarse = rk4_interval(y.clone(), t_a, delta, n, &rhs);
                let fine = rk4_interval(y, t_a, delta, 2 * n, &rhs);
                let gap = coarse
                    .iter()
                    .zip(fine.iter())
                    .map(|(c, f)| fro_norm(&(f - c)))
                    .fold(0.0, f64::max);
                let estimate = gap / 15.0;
                if estimate > b {
                    return Err(Error::StepRejected {
                        t: t_b,
                        estimate,
                        budget: b,
                    });
                }
                fine
            }
        };
        if !all_finite(&y) {
            return Err(Error::NonFinite {
                what: "integration state",
            });
        }
        out.push((t_b, y.clone()));
    }
    Ok(out)
}
