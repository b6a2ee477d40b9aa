//! Exact integer and rational primitives: Kronecker symbols, valuations,
//! factorization, unitary divisors, fundamental-discriminant decomposition.
//!
//! All arithmetic is over `i128`. Every intermediate this crate produces
//! (discriminants up to 16*(N1*N2)^2 with N1*N2 <= 823543, local density
//! counts below 2^63) fits with a wide margin; rational ops use checked
//! multiplication and panic loudly rather than wrap.

use crate::{Error, Result};
use std::cmp::Ordering;
use std::fmt;

/// The crate-wide integer type.
pub type Int = i128;

/// Greatest common divisor, always nonnegative.
pub fn gcd(a: Int, b: Int) -> Int {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g = gcd(a, b), g >= 0.
pub fn ext_gcd(a: Int, b: Int) -> (Int, Int, Int) {
    if b == 0 {
        if a < 0 {
            return (-a, -1, 0);
        }
        return (a, 1, 0);
    }
    let (g, x, y) = ext_gcd(b, a % b);
    (g, y, x - (a / b) * y)
}

/// base^exp for a nonnegative exponent, checked.
pub fn ipow(base: Int, exp: u32) -> Int {
    (0..exp).fold(1 as Int, |acc, _| {
        acc.checked_mul(base).expect("overflow in ipow")
    })
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: Int) -> Int {
    assert!(n >= 0, "isqrt of negative integer");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as Int + 1;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exact rational number, always reduced, denominator positive.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: Int,
    den: Int,
}

impl Rational {
    pub fn new(num: Int, den: Int) -> Rational {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn from_int(n: Int) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> Int {
        self.num
    }

    pub fn den(&self) -> Int {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn as_integer(&self) -> Option<Int> {
        if self.den == 1 {
            Some(self.num)
        } else {
            None
        }
    }

    pub fn recip(&self) -> Rational {
        assert!(self.num != 0, "reciprocal of zero");
        Rational::new(self.den, self.num)
    }

    /// p^e for a (possibly negative) exponent, as an exact rational.
    pub fn int_pow(base: Int, exp: i64) -> Rational {
        let mut v: Int = 1;
        for _ in 0..exp.unsigned_abs() {
            v = v.checked_mul(base).expect("overflow in int_pow");
        }
        if exp >= 0 {
            Rational::from_int(v)
        } else {
            Rational::new(1, v)
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        let num = self
            .num
            .checked_mul(rhs.den)
            .and_then(|a| rhs.num.checked_mul(self.den).and_then(|b| a.checked_add(b)))
            .expect("overflow in rational add");
        Rational::new(num, self.den.checked_mul(rhs.den).expect("overflow"))
    }
}

impl std::ops::Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self + (-rhs)
    }
}

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        // cross-reduce first to keep intermediates small
        let g1 = gcd(self.num, rhs.den);
        let g2 = gcd(rhs.num, self.den);
        let num = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .expect("overflow in rational mul");
        let den = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .expect("overflow in rational mul");
        Rational::new(num, den)
    }
}

impl std::ops::Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        self * rhs.recip()
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(Int, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(Int, u32)] {
        &self.pairs
    }

    pub fn primes(&self) -> impl Iterator<Item = Int> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    pub fn num_primes(&self) -> usize {
        self.pairs.len()
    }

    pub fn exponent_of(&self, p: Int) -> u32 {
        self.pairs
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn value(&self) -> Int {
        self.pairs.iter().fold(1, |acc, &(p, e)| {
            (0..e).fold(acc, |v, _| v.checked_mul(p).expect("overflow"))
        })
    }
}

/// Prime factorization by trial division (2,3 wheel). Inputs in this crate
/// never exceed ~10^7, where this is more than fast enough.
pub fn factorize(n: Int) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut pairs = Vec::new();
    let mut m = n;
    for p in [2, 3] {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            pairs.push((p, e));
        }
    }
    let mut p: Int = 5;
    let mut step: Int = 2; // alternate 5,7,11,13,... skipping multiples of 2 and 3
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            pairs.push((p, e));
        }
        p += step;
        step = 6 - step;
    }
    if m > 1 {
        pairs.push((m, 1));
    }
    Factorization { pairs }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: Int, p: Int) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain("valuation of 0 is undefined".into()));
    }
    debug_assert!(p >= 2);
    let mut m = n.abs();
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    Ok(e)
}

/// Kronecker symbol (a/n), defined for all integer pairs.
pub fn kronecker(a: Int, n: Int) -> i32 {
    fn kron2(a: Int) -> i32 {
        match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        }
    }
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        while n % 2 == 0 {
            n /= 2;
            result *= kron2(a);
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            result *= kron2(n);
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// All unitary divisors d of n (d * (n/d) = n with gcd(d, n/d) = 1),
/// ascending.
pub fn unitary_divisors(n: Int) -> Vec<Int> {
    assert!(n >= 1);
    let fac = factorize(n);
    let mut divs = vec![1 as Int];
    for &(p, e) in fac.pairs() {
        let pe = (0..e).fold(1 as Int, |v, _| v * p);
        let mut next = Vec::with_capacity(divs.len() * 2);
        for &d in &divs {
            next.push(d);
            next.push(d * pe);
        }
        divs = next;
    }
    divs.sort_unstable();
    divs
}

/// Decompose -4n = -n0 * n1^2 with -n0 a fundamental discriminant.
/// Returns (n0, n1).
pub fn fundamental_part(n: Int) -> (Int, Int) {
    assert!(n >= 1);
    let fac = factorize(n);
    // squarefree core of n (equals the squarefree core of 4n)
    let s = fac
        .pairs()
        .iter()
        .filter(|&&(_, e)| e % 2 == 1)
        .fold(1 as Int, |acc, &(p, _)| acc * p);
    if s.rem_euclid(4) == 3 {
        // -s is itself a fundamental discriminant; 4n/s = (2*sqrt(n/s))^2
        (s, 2 * isqrt(n / s))
    } else {
        // s = 1 or 2 mod 4 squarefree: -4s is fundamental
        (4 * s, isqrt(n / s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kronecker_dyadic_table() {
        assert_eq!(kronecker(-3, 2), -1); // -3 = 5 mod 8
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(-7, 2), 1); // 1 mod 8
        assert_eq!(kronecker(3, 2), -1);
    }

    #[test]
    fn kronecker_edge_cases() {
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(2, 0), 0);
        assert_eq!(kronecker(2, 7), 1); // Euler: 2^3 = 1 mod 7
        assert_eq!(kronecker(-1, 11), -1);
        assert_eq!(kronecker(0, 3), 0);
        assert_eq!(kronecker(9, 3), 0);
    }

    // Euler criterion oracle on odd primes.
    fn legendre_oracle(a: Int, p: Int) -> i32 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        let mut r: Int = 1;
        let mut base = a;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    proptest! {
        #[test]
        fn kronecker_matches_euler_criterion(a in -500i128..500, pi in 0usize..11) {
            let primes: [Int; 11] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
            let p = primes[pi];
            prop_assert_eq!(kronecker(a, p), legendre_oracle(a, p));
        }

        #[test]
        fn kronecker_multiplicative_in_top(a in -60i128..60, b in -60i128..60, n in 1i128..80) {
            prop_assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
        }

        #[test]
        fn kronecker_multiplicative_in_bottom(a in -60i128..60, m in 1i128..60, n in 1i128..60) {
            prop_assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
        }

        #[test]
        fn fundamental_part_reconstructs(n in 1i128..5000) {
            let (n0, n1) = fundamental_part(n);
            prop_assert_eq!(n0 * n1 * n1, 4 * n);
            // -n0 is fundamental: n0 = 3 mod 4 squarefree, or n0 = 4m with
            // m squarefree and m = 1,2 mod 4
            let is_squarefree = |v: Int| factorize(v).pairs().iter().all(|&(_, e)| e == 1);
            if n0 % 4 == 3 {
                prop_assert!(is_squarefree(n0));
            } else {
                prop_assert_eq!(n0 % 4, 0);
                let m = n0 / 4;
                prop_assert!(is_squarefree(m));
                prop_assert!(m % 4 == 1 || m % 4 == 2);
            }
        }

        #[test]
        fn unitary_divisor_count(n in 1i128..3000) {
            let divs = unitary_divisors(n);
            prop_assert_eq!(divs.len(), 1 << factorize(n).num_primes());
            for &d in &divs {
                prop_assert_eq!(n % d, 0);
                prop_assert_eq!(gcd(d, n / d), 1);
            }
        }
    }

    #[test]
    fn unitary_divisors_examples() {
        assert_eq!(unitary_divisors(12), vec![1, 3, 4, 12]);
        assert_eq!(unitary_divisors(8), vec![1, 8]);
        assert_eq!(unitary_divisors(30), vec![1, 2, 3, 5, 6, 10, 15, 30]);
        assert_eq!(unitary_divisors(1), vec![1]);
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).pairs().is_empty());
        assert_eq!(factorize(35152).pairs(), &[(2, 4), (13, 3)]);
        assert_eq!(factorize(60).pairs(), &[(2, 2), (3, 1), (5, 1)]);
        assert_eq!(factorize(823543).pairs(), &[(7, 7)]);
        assert_eq!(factorize(9999991).value(), 9999991);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(12, 2).unwrap(), 2);
        assert_eq!(valuation(12, 3).unwrap(), 1);
        assert_eq!(valuation(7, 5).unwrap(), 0);
        assert_eq!(valuation(-8, 2).unwrap(), 3);
        assert!(valuation(0, 2).is_err());
    }

    #[test]
    fn fundamental_part_examples() {
        assert_eq!(fundamental_part(1), (4, 1));
        assert_eq!(fundamental_part(9), (4, 3));
        assert_eq!(fundamental_part(2), (8, 1));
        assert_eq!(fundamental_part(3), (3, 2));
        assert_eq!(fundamental_part(11), (11, 2));
    }

    #[test]
    fn rational_basics() {
        let r = Rational::new(6, -4);
        assert_eq!((r.num(), r.den()), (-3, 2));
        assert_eq!(
            Rational::new(1, 3) + Rational::new(1, 6),
            Rational::new(1, 2)
        );
        assert_eq!(
            Rational::new(2, 3) * Rational::new(3, 4),
            Rational::new(1, 2)
        );
        assert_eq!(Rational::new(1, 2) - Rational::new(1, 2), Rational::ZERO);
        assert_eq!(Rational::new(7, 1).to_string(), "7");
        assert_eq!(Rational::new(-7, 2).to_string(), "-7/2");
        assert!(Rational::new(1, 3) < Rational::new(1, 2));
        assert_eq!(Rational::int_pow(2, -3), Rational::new(1, 8));
    }

    proptest! {
        #[test]
        fn rational_field_laws(a in -40i128..40, b in 1i128..20, c in -40i128..40, d in 1i128..20) {
            let x = Rational::new(a, b);
            let y = Rational::new(c, d);
            prop_assert_eq!(x + y, y + x);
            prop_assert_eq!(x * y, y * x);
            prop_assert_eq!((x + y) - y, x);
            if !y.is_zero() {
                prop_assert_eq!((x / y) * y, x);
            }
        }
    }
}
