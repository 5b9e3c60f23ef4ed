//! Isomorphism of cubic number fields given by defining polynomials.
//!
//! For irreducible `f`, `g` the polynomial `N_s(x) = Res_t(f(t), g(x + s t))`
//! has roots `beta_j - s alpha_i`. When it is squarefree, an irreducible
//! factor corresponds to a Galois orbit of root pairs, and an orbit of size 3
//! exists exactly when `g` has a root in `Q(alpha)`. The factor search uses a
//! single prime, Hensel lifting and recombination of modular factors of total
//! degree at most 3.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::poly::{
    hensel_lift, is_square_int, symmetric_mod, trim, z_div_exact, z_is_squarefree, z_mul, z_primitive, FpPoly, ZPoly,
};
use crate::field::{seeded_rng, Mat, Rational, Rationals};

/// Coefficients `[c0, c1, c2, c3]` of `c3 t^3 + c2 t^2 + c1 t + c0`.
pub type IntCubic = [BigInt; 4];

fn disc(f: &IntCubic) -> BigInt {
    let [d, c, b, a] = f;
    BigInt::from(18) * a * b * c * d - BigInt::from(4) * b * b * b * d + b * b * c * c
        - BigInt::from(4) * a * c * c * c
        - BigInt::from(27) * a * a * d * d
}

fn resultant3(f: &IntCubic, g: &[BigInt; 4]) -> BigInt {
    let q = Rationals;
    let mut rows = vec![vec![Rational::zero(); 6]; 6];
    for r in 0..3 {
        for j in 0..4 {
            rows[r][r + j] = Rational::from_bigint(f[3 - j].clone());
            rows[r + 3][r + j] = Rational::from_bigint(g[3 - j].clone());
        }
    }
    let d = Mat::from_rows(&q, rows).expect("6x6").det().expect("square");
    assert!(d.is_integer());
    d.numer()
}

/// Coefficients of `g(x0 + s t)` as a cubic in `t`.
fn shifted(g: &IntCubic, x0: &BigInt, s: &BigInt) -> [BigInt; 4] {
    let mut out = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
    // (x0 + s t)^k = sum_j C(k, j) x0^(k-j) s^j t^j
    let binom = [[1, 0, 0, 0], [1, 1, 0, 0], [1, 2, 1, 0], [1, 3, 3, 1]];
    for k in 0..4 {
        for j in 0..=k {
            out[j] += &g[k] * BigInt::from(binom[k][j]) * num_traits::pow(x0.clone(), k - j) * num_traits::pow(s.clone(), j);
        }
    }
    out
}

/// `N_s(x)` by evaluation at ten points and interpolation.
pub fn shifted_norm(f: &IntCubic, g: &IntCubic, s: i64) -> ZPoly {
    let s = BigInt::from(s);
    let xs: Vec<BigInt> = (0..10).map(BigInt::from).collect();
    let ys: Vec<Rational> = xs.iter().map(|x0| Rational::from_bigint(resultant3(f, &shifted(g, x0, &s)))).collect();
    // Newton divided differences, then expand.
    let n = xs.len();
    let mut coef = ys.clone();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (coef[i].clone() - &coef[i - 1]) / Rational::from_bigint(&xs[i] - &xs[i - j]);
        }
    }
    let mut poly = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        // poly = poly * (x - xs[i]) + coef[i]
        let mut next = vec![Rational::zero(); n];
        for k in 0..n - 1 {
            next[k + 1] = next[k + 1].clone() + &poly[k];
            next[k] = next[k].clone() - poly[k].clone() * Rational::from_bigint(xs[i].clone());
        }
        next[0] = next[0].clone() + &coef[i];
        poly = next;
    }
    let mut out: ZPoly = poly
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "resultant interpolates to an integer polynomial");
            c.numer()
        })
        .collect();
    trim(&mut out);
    out
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

/// Whether `n` has a factor of degree 1 to 3 over `Q`. `n` must be squarefree.
pub fn has_small_factor(n: &[BigInt]) -> bool {
    let deg = n.len() - 1;
    let lc = n[deg].clone();
    let p = small_primes()
        .find(|&p| !(&lc % BigInt::from(p)).is_zero() && FpPoly::from_z(p, n).is_squarefree())
        .expect("some prime keeps a squarefree polynomial squarefree");
    let mut rng = seeded_rng(p);
    let factors = FpPoly::from_z(p, n).factor_squarefree(&mut rng);
    if factors.iter().all(|u| u.degree().expect("nonconstant") > 3) {
        return false;
    }
    // Coefficients of lc(n)/lc(h) * h for a factor h of degree <= 3 are at
    // most |lc| * 8 * ||n||_2.
    let norm2 = n.iter().map(|c| c * c).fold(BigInt::zero(), |a, b| a + b);
    let bound = BigInt::from(2) * lc.abs() * BigInt::from(8) * (num_integer::Roots::sqrt(&norm2) + 1);
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut m = pb.clone();
    while m <= bound {
        m *= &pb;
        k += 1;
    }
    let lc_inv = lc.extended_gcd(&m).x.mod_floor(&m);
    let target: ZPoly = n.iter().map(|c| (c * &lc_inv).mod_floor(&m)).collect();
    let lifted = hensel_lift(&target, &factors, k);
    let degs: Vec<usize> = factors.iter().map(|u| u.degree().expect("nonconstant")).collect();
    let r = factors.len();
    for mask in 1u32..(1 << r) {
        let total: usize = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| degs[i]).sum();
        if total > 3 {
            continue;
        }
        let mut cand = vec![lc.clone()];
        for i in (0..r).filter(|i| mask >> i & 1 == 1) {
            cand = z_mul(&cand, &lifted[i]).iter().map(|c| c.mod_floor(&m)).collect();
        }
        let cand: ZPoly = cand.iter().map(|c| symmetric_mod(c, &m)).collect();
        let h = z_primitive(&cand);
        if z_div_exact(n, &h).is_some() {
            return true;
        }
    }
    false
}

/// Decides `Q[t]/(f) = Q[t]/(g)` for irreducible integer cubics.
pub fn cubic_field_isomorphic(f: &IntCubic, g: &IntCubic) -> bool {
    let (f, g) = (primitive_cubic(f), primitive_cubic(g));
    if f == g {
        return true;
    }
    // Isomorphic fields have discriminants in the same square class.
    if !is_square_int(&(disc(&f) * disc(&g))) {
        return false;
    }
    let n = (1..)
        .map(|s| shifted_norm(&f, &g, s))
        .find(|n| z_is_squarefree(n))
        .expect("all but finitely many shifts give a squarefree norm");
    has_small_factor(&n)
}

fn primitive_cubic(f: &IntCubic) -> IntCubic {
    let v = z_primitive(f);
    [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]
}

/// The cubic `c3 t^3 + ... + c0` as an integer array.
pub fn int_cubic(c: [i64; 4]) -> IntCubic {
    c.map(BigInt::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::poly::z_eval;

    #[test]
    fn interpolated_norm_matches_direct_resultants() {
        let f = int_cubic([-2, 0, 0, 1]);
        let g = int_cubic([-3, 0, 0, 1]);
        let n = shifted_norm(&f, &g, 1);
        assert_eq!(n.len(), 10);
        for x0 in [-3i64, 0, 5, 17] {
            let x0 = BigInt::from(x0);
            assert_eq!(z_eval(&n, &x0), resultant3(&f, &shifted(&g, &x0, &BigInt::from(1))));
        }
    }

    #[test]
    fn decisions() {
        let c = |v| int_cubic(v);
        assert!(cubic_field_isomorphic(&c([-2, 0, 0, 1]), &c([-2, 0, 0, 1])));
        assert!(cubic_field_isomorphic(&c([-2, 0, 0, 1]), &c([-4, 0, 0, 1])));
        assert!(!cubic_field_isomorphic(&c([-2, 0, 0, 1]), &c([-3, 0, 0, 1])));
        // alpha^2 for a root alpha of t^3 - t - 1 has minimal polynomial
        // t^3 - 2t^2 + t - 1.
        assert!(cubic_field_isomorphic(&c([-1, -1, 0, 1]), &c([-1, 1, -2, 1])));
        // cyclic cubic fields of conductor 7 and 9: equal discriminant class
        // (both squares) but different fields.
        assert!(!cubic_field_isomorphic(&c([1, -2, -1, 1]), &c([1, -3, 0, 1])));
        // f(2t + 1) for the conductor 7 polynomial
        assert!(cubic_field_isomorphic(&c([1, -2, -1, 1]), &c([-1, -2, 8, 8])));
    }

    #[test]
    fn small_factor_detection() {
        let z = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<ZPoly>();
        // irreducible degree 4 times irreducible degree 5: no small factor
        let big = z_mul(&z(&[-2, 0, 0, 0, 1]), &z(&[-3, 1, 0, 0, 0, 1]));
        assert!(!has_small_factor(&big));
        let with_cubic = z_mul(&z(&[-2, 0, 0, 0, 1]), &z(&[-5, 0, 0, 7]));
        assert!(has_small_factor(&with_cubic));
    }
}
