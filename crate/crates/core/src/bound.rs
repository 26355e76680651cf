//! The worst-case ratio of the shadow matcher as a function of `k`:
//! `k + k/(k-1) + (k^3 - k + 1)/k^2` for `k > 1`.

use num_traits::{Float, Num};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the ratio bound is only defined for k > 1, got {0}")]
pub struct BoundError(pub String);

/// Lower end of the minimizer search window (exclusive).
pub const SEARCH_LO: f64 = 1.0;
/// Upper end of the minimizer search window (inclusive).
pub const SEARCH_HI: f64 = 10.0;
/// Absolute tolerance on the minimizer.
pub const SEARCH_TOL: f64 = 1e-9;

/// Evaluates the bound. Works for any field type, including exact rationals.
pub fn approx_bound<T>(k: T) -> Result<T, BoundError>
where
    T: Num + Copy + PartialOrd + std::fmt::Debug,
{
    let one = T::one();
    if !(k > one) {
        return Err(BoundError(format!("{k:?}")));
    }
    Ok(k + k / (k - one) + (k * k * k - k + one) / (k * k))
}

/// Minimizes [`approx_bound`] on `(1, 10]` by ternary search.
/// Returns `(k*, bound(k*))`.
pub fn optimal_k<T: Float + std::fmt::Debug>() -> (T, T) {
    let f = |k: T| approx_bound(k).expect("search stays inside the domain");
    let mut lo = T::from(SEARCH_LO).unwrap();
    let mut hi = T::from(SEARCH_HI).unwrap();
    let tol = T::from(SEARCH_TOL).unwrap();
    let three = T::from(3.0).unwrap();
    // f32 cannot resolve 1e-9 near 1.7; the iteration cap ends the search there.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let third = (hi - lo) / three;
        let m1 = lo + third;
        let m2 = hi - third;
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let k = (lo + hi) / (T::one() + T::one());
    (k, f(k))
}

/// `(k, bound(k))` rows for `k = start, start + step, ...` up to `end` inclusive.
pub fn ratio_table(start: f64, end: f64, step: f64) -> Result<Vec<(f64, f64)>, BoundError> {
    if !(step > 0.0) {
        return Err(BoundError(format!("step {step}")));
    }
    let count = ((end - start) / step + 1e-9).floor() as i64;
    (0..=count.max(-1))
        .map(|i| {
            let k = start + i as f64 * step;
            approx_bound(k).map(|r| (k, r))
        })
        .collect()
}
