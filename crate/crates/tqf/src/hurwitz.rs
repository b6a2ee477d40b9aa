//! Hurwitz class numbers H(D) by exhaustive enumeration of reduced positive
//! definite binary quadratic forms of discriminant -D.
//!
//! A form a*x^2 + b*xy + c*y^2 is counted when |b| <= a <= c with
//! b^2 - 4ac = -D, taking b >= 0 on the boundaries |b| = a and a = c.
//! Classes of shape (a, 0, a) weigh 1/2, shape (a, a, a) weighs 1/3, all
//! others 1.

use crate::arith::{isqrt, Int, Rational};
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Weighted count of reduced forms of discriminant -D. Zero for
/// D = 1, 2 mod 4; error for D = 0 (the level-modified H(0) is a separate
/// quantity and plain H(0) is never consumed).
pub fn hurwitz(d: Int) -> Result<Rational> {
    if d <= 0 {
        return Err(Error::Domain(format!("hurwitz requires D >= 1, got {d}")));
    }
    match d.rem_euclid(4) {
        1 | 2 => return Ok(Rational::ZERO),
        _ => {}
    }
    let cache = memo();
    if let Some(v) = cache.lock().unwrap().get(&d) {
        return Ok(*v);
    }
    let value = enumerate(d);
    // idempotent fill: concurrent computations of the same D agree exactly
    cache.lock().unwrap().insert(d, value);
    Ok(value)
}

fn memo() -> &'static Mutex<HashMap<Int, Rational>> {
    static CACHE: OnceLock<Mutex<HashMap<Int, Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn enumerate(d: Int) -> Rational {
    let mut total = Rational::ZERO;
    let amax = isqrt(d / 3);
    for a in 1..=amax {
        let bstart = if d % 2 == 0 { 0 } else { 1 };
        let mut b = bstart;
        while b <= a {
            let num = b * b + d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a {
                    // b and -b are both admissible off the boundary
                    let signs = if b > 0 && b < a && a < c { 2 } else { 1 };
                    let weight = if a == b && b == c {
                        Rational::new(1, 3)
                    } else if b == 0 && a == c {
                        Rational::new(1, 2)
                    } else {
                        Rational::ONE
                    };
                    total = total + weight * Rational::from_int(signs);
                }
            }
            b += 2;
        }
    }
    total
}
