//! Bracketing root finder (Brent's method).
//!
//! Combines bisection with inverse quadratic interpolation; guaranteed to
//! converge once the bracket straddles a sign change. Follows the classic
//! formulation of Brent (1973) as given in Numerical Recipes.

use crate::error::Error;
use crate::scalar::{lit, Scalar};

const MAX_ITER: usize = 200;

/// Find a root of `f` in `[a, b]`.
///
/// `tol` is the absolute tolerance on the abscissa; the effective
/// termination width also includes a 2·eps·|x| machine-precision floor, so
/// requesting a tolerance below one ulp converges to the representable
/// limit instead of stalling.
pub fn brent<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T, Error> {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let three = lit::<T>(3.0);

    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if (fa > T::zero() && fb > T::zero()) || (fa < T::zero() && fb < T::zero()) {
        return Err(Error::Bracket {
            lo: a.to_f64().unwrap_or(f64::NAN),
            hi: b.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if (fb > T::zero() && fc > T::zero()) || (fb < T::zero() && fc < T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                q = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * q * (q - r) - (b - a) * (r - T::one()));
                q = (q - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b = b + d;
        } else {
            b = b + tol1.abs().copysign(xm);
        }
        fb = f(b);
    }
    Err(Error::Tolerance {
        iterations: MAX_ITER,
    })
}
