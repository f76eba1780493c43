use crate::error::{Error, Result};

/// Bisection for a sign change of `f` on `[lo, hi]`, run until the bracket
/// stops shrinking.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
