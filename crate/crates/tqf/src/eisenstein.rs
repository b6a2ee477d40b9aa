//! The level-modified class number H^(N1,N2)(D): square-part extraction
//! f_{N1,N2} and the per-prime A-factors that correct the plain Hurwitz
//! number at primes dividing N1*N2.

use crate::arith::{factorize, gcd, kronecker, Factorization, Int, Rational};
use crate::hurwitz::hurwitz;
use crate::{Error, Result};

/// A validated level (N1, N2): gcd(N1, N2) = 1, every prime of N1 appears
/// to an odd exponent, and N1 has an odd number of distinct prime factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    n1: Int,
    n2: Int,
    n1_factors: Factorization,
    n2_factors: Factorization,
}

impl Level {
    pub fn n1(&self) -> Int {
        self.n1
    }

    pub fn n2(&self) -> Int {
        self.n2
    }

    pub fn product(&self) -> Int {
        self.n1 * self.n2
    }

    pub fn n1_factors(&self) -> &Factorization {
        &self.n1_factors
    }

    pub fn n2_factors(&self) -> &Factorization {
        &self.n2_factors
    }

    /// e(N1*N2): the number of distinct primes dividing N1*N2.
    pub fn num_primes(&self) -> u32 {
        (self.n1_factors.num_primes() + self.n2_factors.num_primes()) as u32
    }

    /// N1' = product of the distinct primes of N1 (the ramified set).
    pub fn ramified_primes(&self) -> Vec<Int> {
        self.n1_factors.primes().collect()
    }

    pub fn v_p(&self, p: Int) -> u32 {
        self.n1_factors.exponent_of(p) + self.n2_factors.exponent_of(p)
    }
}

/// Validate (N1, N2) as an admissible level.
pub fn admissible_level(n1: Int, n2: Int) -> Result<Level> {
    if n1 < 1 || n2 < 1 {
        return Err(Error::Domain(format!(
            "level components must be positive, got ({n1}, {n2})"
        )));
    }
    if gcd(n1, n2) != 1 {
        return Err(Error::Domain(format!(
            "gcd(N1, N2) = {} must be 1",
            gcd(n1, n2)
        )));
    }
    let n1_factors = factorize(n1);
    if let Some(&(p, e)) = n1_factors.pairs().iter().find(|&&(_, e)| e % 2 == 0) {
        return Err(Error::Domain(format!(
            "N1 = {n1} has even exponent {e} at prime {p}"
        )));
    }
    if n1_factors.num_primes() % 2 == 0 {
        return Err(Error::Domain(format!(
            "N1 = {n1} has an even number of prime factors ({})",
            n1_factors.num_primes()
        )));
    }
    let n2_factors = factorize(n2);
    Ok(Level {
        n1,
        n2,
        n1_factors,
        n2_factors,
    })
}

/// Every admissible level (N1, N2) with N1*N2 <= max, sorted by the
/// product and then by N1.
pub fn admissible_levels_up_to(max: Int) -> Vec<Level> {
    let mut out = Vec::new();
    for l in 2..=max {
        let fac = factorize(l);
        let primes: Vec<Int> = fac.primes().collect();
        for mask in 0u32..(1 << primes.len()) {
            let n1: Int = primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| crate::arith::ipow(p, fac.exponent_of(p)))
                .product();
            if let Ok(level) = admissible_level(n1, l / n1) {
                out.push(level);
            }
        }
    }
    out.sort_by_key(|l| (l.product(), l.n1()));
    out
}

/// The square part f_{N1,N2} of D: the largest integer supported on the
/// primes of N1*N2 whose square divides D with -D/f^2 still a discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarePart {
    pub f: Int,
    /// (prime, exponent of that prime in f)
    pub per_prime: Vec<(Int, u32)>,
}

impl SquarePart {
    /// The exact p-power dividing f, as an integer.
    pub fn fp_power(&self, p: Int) -> Int {
        let e = self
            .per_prime
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e);
        (0..e).fold(1, |v, _| v * p)
    }
}

/// Compute f_{N1,N2} for D = 0, 3 mod 4.
pub fn square_part(d: Int, level: &Level) -> Result<SquarePart> {
    if d < 1 || matches!(d.rem_euclid(4), 1 | 2) {
        return Err(Error::Domain(format!(
            "square_part requires a positive D = 0,3 mod 4, got {d}"
        )));
    }
    let mut f: Int = 1;
    let mut per_prime = Vec::new();
    let d_fac = factorize(d);
    let primes: Vec<Int> = level
        .n1_factors
        .primes()
        .chain(level.n2_factors.primes())
        .collect();
    for p in primes {
        let vd = d_fac.exponent_of(p);
        let mut e = vd / 2;
        if p == 2 {
            // dividing by an odd square keeps the residue mod 4; only the
            // 2-power must respect the discriminant condition
            let mut pow = (0..e).fold(1 as Int, |v, _| v * 2);
            while e > 0 {
                let rest = d / (pow * pow);
                if matches!(rest.rem_euclid(4), 0 | 3) {
                    break;
                }
                e -= 1;
                pow /= 2;
            }
        }
        if e > 0 {
            per_prime.push((p, e));
            f *= (0..e).fold(1 as Int, |v, _| v * p);
        }
    }
    debug_assert!(d % (f * f) == 0);
    debug_assert!(matches!((d / (f * f)).rem_euclid(4), 0 | 3));
    Ok(SquarePart { f, per_prime })
}

/// The per-prime factor of H^(N1,N2): A_{N1N2,p}(D) for p | N1,
/// A_{N1N2,p,1}(D) for p | N2 with odd v_p(N2), and A_{N1N2,p,2}(D) for
/// p | N2 with even v_p(N2).
pub fn a_factor(d: Int, p: Int, level: &Level) -> Result<Rational> {
    if level.v_p(p) == 0 {
        return Err(Error::Misuse(format!("prime {p} does not divide N1*N2")));
    }
    let sq = square_part(d, level)?;
    Ok(a_factor_with(d, p, level, &sq))
}

fn a_factor_with(d: Int, p: Int, level: &Level, sq: &SquarePart) -> Rational {
    let fp = sq.fp_power(p);
    let fp_exp = sq
        .per_prime
        .iter()
        .find(|&&(q, _)| q == p)
        .map_or(0, |&(_, e)| e) as i64;
    let d_red = d / (sq.f * sq.f);
    let chi = kronecker(-d_red, p) as Int;
    let v_level = level.v_p(p) as i64;
    // v_p(p * f^2) = 1 + 2*v_p(f)
    let v_pf2 = 1 + 2 * fp_exp;
    let in_n1 = level.n1_factors.exponent_of(p) > 0;

    if v_pf2 < v_level {
        if d_red % p == 0 {
            return Rational::ZERO;
        }
        // below the level: f_p^2 * (1 -/+ chi)
        let fp2 = Rational::from_int(fp * fp);
        if in_n1 {
            return fp2 * Rational::from_int(1 - chi);
        }
        return fp2 * Rational::from_int(1 + chi);
    }

    if in_n1 {
        // p^(v_p(N1) - 1) * (1 - chi)
        let v1 = level.n1_factors.exponent_of(p) as i64;
        return Rational::int_pow(p, v1 - 1) * Rational::from_int(1 - chi);
    }

    let v = level.n2_factors.exponent_of(p) as i64;
    let pr = |e: i64| Rational::int_pow(p, e);
    let fpq = Rational::from_int(fp);
    let chi_q = Rational::from_int(chi);
    let p1 = Rational::from_int(p + 1);
    let denom = Rational::from_int(p - 1);
    if v % 2 == 1 {
        // (2 p^((v+1)/2) f_p - p^(v-1)(p+1) - chi (2 p^((v-1)/2) f_p - p^(v-1)(p+1))) / (p-1)
        let lead = Rational::from_int(2) * pr((v + 1) / 2) * fpq - pr(v - 1) * p1;
        let twist = Rational::from_int(2) * pr((v - 1) / 2) * fpq - pr(v - 1) * p1;
        (lead - chi_q * twist) / denom
    } else {
        // ((p^(v/2) f_p - p^(v-1))(p+1) - chi (p^(v/2-1) f_p - p^(v-1))(p+1)) / (p-1)
        let lead = (pr(v / 2) * fpq - pr(v - 1)) * p1;
        let twist = (pr(v / 2 - 1) * fpq - pr(v - 1)) * p1;
        (lead - chi_q * twist) / denom
    }
}

/// H^(N1,N2)(D) for D >= 0.
pub fn h_level(d: Int, level: &Level) -> Result<Rational> {
    if d < 0 {
        return Err(Error::Domain(format!("h_level requires D >= 0, got {d}")));
    }
    if d == 0 {
        // (N1 N2 / 12) * prod_{p|N1} (1 - 1/p) * prod_{p|N2} (1 + 1/p)
        let mut v = Rational::new(level.product(), 12);
        for p in level.n1_factors.primes() {
            v = v * Rational::new(p - 1, p);
        }
        for p in level.n2_factors.primes() {
            v = v * Rational::new(p + 1, p);
        }
        return Ok(v);
    }
    if matches!(d.rem_euclid(4), 1 | 2) {
        return Ok(Rational::ZERO);
    }
    let sq = square_part(d, level)?;
    let mut value = hurwitz(d / (sq.f * sq.f))?;
    for p in level.n1_factors.primes().chain(level.n2_factors.primes()) {
        value = value * a_factor_with(d, p, level, &sq);
    }
    Ok(value)
}
