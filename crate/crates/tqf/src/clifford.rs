//! Even Clifford correspondence: the quaternion order C_0(f) of a ternary
//! form, dual bases, the associated forms f_O, f_O0 and f_S0, and zero
//! counting rho_O(n, r).
//!
//! For f = (a,b,c,r,s,t) the order has basis (1, e1, e2, e3) with
//!   e1^2 = r e1 - bc,   e2 e3 = a (r - e1),
//!   e2^2 = s e2 - ac,   e3 e1 = b (s - e2),
//!   e3^2 = t e3 - ab,   e1 e2 = c (t - e3),
//! and traces tr(e1) = r, tr(e2) = s, tr(e3) = t. The three remaining
//! products follow from associativity, e.g. e1 (e1 e2) = (e1^2) e2 forces
//! e1 e3 = -rt + t e1 + b e2 + r e3, and cyclically
//!   e2 e1 = -rs + s e1 + r e2 + c e3,
//!   e3 e2 = -st + a e1 + t e2 + s e3.
//! Associativity of the full table is re-verified on every construction.

use crate::arith::{isqrt, Int};
use crate::ternary::{reduce, TernaryForm};
use crate::{Error, Result};

/// Quaternion element in coordinates over the basis (1, e1, e2, e3).
pub type Quat = [Int; 4];

/// A quaternion order presented by structure constants over (1, e1, e2, e3).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderBasis {
    seed: TernaryForm,
    /// table[i][j] = e_i * e_j as coordinates over the basis, 0 <= i,j <= 3
    /// (index 0 is the unit).
    table: [[Quat; 4]; 4],
}

impl OrderBasis {
    pub fn seed_form(&self) -> &TernaryForm {
        &self.seed
    }

    /// discrd(O) = d of the seed form.
    pub fn reduced_discriminant(&self) -> Int {
        self.seed.disc()
    }

    pub fn trace(&self, x: Quat) -> Int {
        2 * x[0] + self.seed.r * x[1] + self.seed.s * x[2] + self.seed.t * x[3]
    }

    pub fn conj(&self, x: Quat) -> Quat {
        let tr = self.trace(x);
        [tr - x[0], -x[1], -x[2], -x[3]]
    }

    pub fn mul(&self, x: Quat, y: Quat) -> Quat {
        let mut out = [0 as Int; 4];
        for i in 0..4 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if y[j] == 0 {
                    continue;
                }
                let prod = self.table[i][j];
                for k in 0..4 {
                    out[k] += x[i] * y[j] * prod[k];
                }
            }
        }
        out
    }

    /// Reduced norm n(x) = x * conj(x); always a scalar.
    pub fn norm(&self, x: Quat) -> Int {
        let prod = self.mul(x, self.conj(x));
        debug_assert_eq!(prod[1..], [0, 0, 0], "norm is not scalar");
        prod[0]
    }

    /// Doubled Gram matrix of the norm form on (1, e1, e2, e3):
    /// entries tr(e_i conj(e_j)).
    pub fn norm_gram(&self) -> [[Int; 4]; 4] {
        let basis: [Quat; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        let mut g = [[0 as Int; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = self.trace(self.mul(basis[i], self.conj(basis[j])));
            }
        }
        g
    }
}

/// Build the even Clifford order of a nondegenerate integral ternary form.
pub fn clifford_order(f: &TernaryForm) -> Result<OrderBasis> {
    let d = f.disc();
    if d == 0 {
        return Err(Error::Domain(format!("degenerate form {f:?}")));
    }
    let (a, b, c, r, s, t) = (f.a, f.b, f.c, f.r, f.s, f.t);
    let one: Quat = [1, 0, 0, 0];
    let e = |k: usize| -> Quat {
        let mut v = [0 as Int; 4];
        v[k] = 1;
        v
    };
    let q = |w: Int, x: Int, y: Int, z: Int| -> Quat { [w, x, y, z] };
    let mut table = [[[0 as Int; 4]; 4]; 4];
    for k in 0..4 {
        table[0][k] = e(k);
        table[k][0] = e(k);
    }
    table[1][1] = q(-b * c, r, 0, 0);
    table[2][2] = q(-a * c, 0, s, 0);
    table[3][3] = q(-a * b, 0, 0, t);
    table[2][3] = q(a * r, -a, 0, 0);
    table[3][1] = q(b * s, 0, -b, 0);
    table[1][2] = q(c * t, 0, 0, -c);
    table[1][3] = q(-r * t, t, b, r);
    table[2][1] = q(-r * s, s, r, c);
    table[3][2] = q(-s * t, a, t, s);
    let order = OrderBasis { seed: *f, table };

    // exhaustive associativity check over basis triples
    let basis: [Quat; 4] = [one, e(1), e(2), e(3)];
    for x in basis {
        for y in basis {
            for z in basis {
                let lhs = order.mul(order.mul(x, y), z);
                let rhs = order.mul(x, order.mul(y, z));
                if lhs != rhs {
                    return Err(Error::Domain(format!(
                        "multiplication table not associative for {f:?}"
                    )));
                }
            }
        }
    }
    // trace and norm of the generators match the seed coefficients
    debug_assert_eq!(order.trace(e(1)), r);
    debug_assert_eq!(order.trace(e(2)), s);
    debug_assert_eq!(order.trace(e(3)), t);
    debug_assert_eq!(order.norm(e(1)), b * c);
    debug_assert_eq!(order.norm(e(2)), a * c);
    debug_assert_eq!(order.norm(e(3)), a * b);
    Ok(order)
}

/// The scaled dual basis (d e0', d e1', d e2', d e3') of an order.
pub fn scaled_dual_basis(o: &OrderBasis) -> [Quat; 4] {
    let f = o.seed;
    let (a, b, c, r, s, t) = (f.a, f.b, f.c, f.r, f.s, f.t);
    let d = f.disc();
    [
        [
            d - 2 * (a * b * c + r * s * t),
            a * r + s * t,
            b * s + r * t,
            c * t + r * s,
        ],
        [a * r + s * t, -2 * a, -t, -s],
        [b * s + r * t, -t, -2 * b, -r],
        [c * t + r * s, -s, -r, -2 * c],
    ]
}

/// f_O = discrd(O) * n(x e1' + y e2' + z e3'): recovers the seed form
/// exactly.
pub fn associated_form(o: &OrderBasis) -> TernaryForm {
    let d = o.reduced_discriminant();
    let dual = scaled_dual_basis(o);
    // traces of the dual basis: tr(e0') = 1, tr(e_i') = 0
    debug_assert_eq!(o.trace(dual[0]), d);
    debug_assert_eq!(o.trace(dual[1]), 0);
    debug_assert_eq!(o.trace(dual[2]), 0);
    debug_assert_eq!(o.trace(dual[3]), 0);
    let pair = |i: usize, j: usize| -> Int {
        let v = o.trace(o.mul(dual[i], o.conj(dual[j])));
        debug_assert_eq!(v % d, 0);
        v / d
    };
    // n(d e_i')/d = d * n(e_i'), tr(d e_i' conj(d e_j'))/d = d tr(e_i' conj(e_j'))
    TernaryForm::new(
        pair(1, 1) / 2,
        pair(2, 2) / 2,
        pair(3, 3) / 2,
        pair(2, 3),
        pair(1, 3),
        pair(1, 2),
    )
}

/// Norm form on a rank-3 sublattice of the order, given by basis vectors.
fn norm_form_on(o: &OrderBasis, basis: [Quat; 3]) -> TernaryForm {
    let pair = |x: Quat, y: Quat| o.trace(o.mul(x, o.conj(y)));
    TernaryForm::new(
        o.norm(basis[0]),
        o.norm(basis[1]),
        o.norm(basis[2]),
        pair(basis[1], basis[2]),
        pair(basis[0], basis[2]),
        pair(basis[0], basis[1]),
    )
}

/// f_O0: the norm form on the trace-zero sublattice O^0 = O n Q^0, reduced.
pub fn trace_zero_form(o: &OrderBasis) -> Result<TernaryForm> {
    let f = o.seed;
    // kernel of the trace functional (2, r, s, t) on Z^4
    let basis4 = kernel_basis_rank3([2, f.r, f.s, f.t]);
    let raw = norm_form_on(o, basis4);
    if !raw.is_positive_definite() {
        return Err(Error::Domain(format!(
            "trace-zero lattice of {f:?} is not positive definite"
        )));
    }
    Ok(reduce(&raw))
}

/// f_S0: the norm form on (Z + 2 O) n Q^0, reduced. The lattice has the
/// exact basis (2 e1 - r, 2 e2 - s, 2 e3 - t).
pub fn half_integral_form(o: &OrderBasis) -> Result<TernaryForm> {
    let f = o.seed;
    let basis: [Quat; 3] = [[-f.r, 2, 0, 0], [-f.s, 0, 2, 0], [-f.t, 0, 0, 2]];
    let raw = norm_form_on(o, basis);
    if !raw.is_positive_definite() {
        return Err(Error::Domain(format!(
            "S^0 lattice of {f:?} is not positive definite"
        )));
    }
    Ok(reduce(&raw))
}

/// Basis of the rank-3 kernel of a linear functional on Z^4 with nonzero
/// first coefficient. Column-reduces the functional to (g, 0, 0, 0) by
/// unimodular operations; the kernel is spanned by the last three columns
/// of the accumulated transformation.
fn kernel_basis_rank3(coeffs: [Int; 4]) -> [Quat; 3] {
    assert!(coeffs[0] != 0);
    let mut v = [[0 as Int; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1;
    }
    let mut c = coeffs;
    for i in 1..4 {
        if c[i] == 0 {
            continue;
        }
        let (g, x, y) = crate::arith::ext_gcd(c[0], c[i]);
        let (a0, ai) = (c[0] / g, c[i] / g);
        for row in v.iter_mut() {
            let (v0, vi) = (row[0], row[i]);
            row[0] = x * v0 + y * vi;
            row[i] = -ai * v0 + a0 * vi;
        }
        c[0] = g;
        c[i] = 0;
    }
    let col = |j: usize| [v[0][j], v[1][j], v[2][j], v[3][j]];
    let basis = [col(1), col(2), col(3)];
    for b in basis {
        debug_assert_eq!(
            b.iter().zip(coeffs.iter()).map(|(x, y)| x * y).sum::<Int>(),
            0
        );
    }
    basis
}

/// rho_O(n, r): the number of x in O with x^2 - r x + n = 0, i.e. elements
/// of trace r and norm n. Enumerated directly in the quaternary norm
/// lattice; requires 4n - r^2 >= 0.
pub fn rho(o: &OrderBasis, n: Int, r: Int) -> Result<Int> {
    if 4 * n - r * r < 0 {
        return Err(Error::Domain(format!(
            "rho needs 4n - r^2 >= 0, got n = {n}, r = {r}"
        )));
    }
    if n < 0 {
        return Ok(0);
    }
    let gram = o.norm_gram();
    // positive definiteness of the norm form
    let adj_diag = adjugate_diagonal4(&gram);
    let det = det4(&gram);
    if det <= 0 || adj_diag.iter().any(|&v| v <= 0) {
        return Err(Error::Domain(format!(
            "norm form of order on {:?} is not positive definite",
            o.seed
        )));
    }
    // coordinate bounds: x_i^2 * det <= 2n * adj_ii
    let mut bounds = [0 as Int; 4];
    for i in 0..4 {
        let cap = 2 * n * adj_diag[i];
        let mut bi = isqrt(cap / det);
        while (bi + 1) * (bi + 1) * det <= cap {
            bi += 1;
        }
        while bi > 0 && bi * bi * det > cap {
            bi -= 1;
        }
        bounds[i] = bi;
    }
    let mut count = 0;
    for x1 in -bounds[1]..=bounds[1] {
        for x2 in -bounds[2]..=bounds[2] {
            for x3 in -bounds[3]..=bounds[3] {
                for x0 in -bounds[0]..=bounds[0] {
                    let x = [x0, x1, x2, x3];
                    if o.trace(x) == r && o.norm(x) == n {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

fn det4(m: &[[Int; 4]; 4]) -> Int {
    let mut det = 0;
    for j in 0..4 {
        let minor = minor3(m, 0, j);
        let sign = if j % 2 == 0 { 1 } else { -1 };
        det += sign * m[0][j] * det3_arr(&minor);
    }
    det
}

fn minor3(m: &[[Int; 4]; 4], skip_i: usize, skip_j: usize) -> [[Int; 3]; 3] {
    let mut out = [[0 as Int; 3]; 3];
    let mut oi = 0;
    for i in 0..4 {
        if i == skip_i {
            continue;
        }
        let mut oj = 0;
        for j in 0..4 {
            if j == skip_j {
                continue;
            }
            out[oi][oj] = m[i][j];
            oj += 1;
        }
        oi += 1;
    }
    out
}

fn det3_arr(m: &[[Int; 3]; 3]) -> Int {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn adjugate_diagonal4(m: &[[Int; 4]; 4]) -> [Int; 4] {
    let mut out = [0 as Int; 4];
    for i in 0..4 {
        out[i] = det3_arr(&minor3(m, i, i));
    }
    out
}

/// |O^x|-weighted sanity value: the norm form restricted to the whole order
/// evaluated as a Rational mass term is handled in `verify`; here we expose
/// multiplicativity testing of the norm.
pub fn norm_is_multiplicative_on_sample(o: &OrderBasis) -> bool {
    let sample: [Quat; 5] = [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [1, -1, 2, 0],
        [2, 1, 0, -1],
        [0, 1, 1, 1],
    ];
    for x in sample {
        for y in sample {
            if o.norm(o.mul(x, y)) != o.norm(x) * o.norm(y) {
                return false;
            }
        }
    }
    true
}
