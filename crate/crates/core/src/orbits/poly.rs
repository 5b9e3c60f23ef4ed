//! Dense univariate polynomials over the integers, the rationals and `F_p`,
//! with just enough machinery for root finding and modular factorization.
//! Coefficient vectors are little-endian: index `i` holds the `x^i` term.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::field::{Rational, Scalar};

pub type ZPoly = Vec<BigInt>;

pub fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree<T: Zero>(p: &[T]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn z_eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn z_content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Divides out the content and makes the leading coefficient positive.
pub fn z_primitive(p: &[BigInt]) -> ZPoly {
    let mut out = p.to_vec();
    trim(&mut out);
    let mut g = z_content(&out);
    if g.is_zero() {
        return out;
    }
    if out.last().is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    out.iter().map(|c| c / &g).collect()
}

pub fn z_mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Exact quotient `a / b` in `Z[x]`, or `None` if `b` does not divide `a`.
pub fn z_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let db = degree(b)?;
    let mut r = a.to_vec();
    trim(&mut r);
    if r.is_empty() {
        return Some(vec![]);
    }
    let da = degree(&r)?;
    if da < db {
        return None;
    }
    let mut q = vec![BigInt::zero(); da - db + 1];
    let lb = &b[db];
    for k in (0..=da - db).rev() {
        let top = &r[k + db];
        if top.is_zero() {
            continue;
        }
        let (c, rem) = top.div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
    }
    if r.iter().all(|c| c.is_zero()) {
        trim(&mut q);
        Some(q)
    } else {
        None
    }
}

/// Integer roots of a monic polynomial of degree at most 3, ascending.
///
/// The real line is cut at the critical points; away from them the
/// polynomial is monotone and a root is found by bisection. Integers within
/// distance 2 of a critical point are checked directly.
pub fn monic_integer_roots(p: &[BigInt]) -> Vec<BigInt> {
    let n = degree(p).expect("nonzero polynomial");
    assert!(n <= 3 && p[n].is_one(), "monic of degree <= 3");
    if n == 0 {
        return vec![];
    }
    let bound = BigInt::one() + p[..n].iter().map(|c| c.abs()).max().unwrap_or_default();
    let crit: Vec<BigInt> = match n {
        2 => vec![(-&p[1]).div_floor(&BigInt::from(2))],
        3 => {
            let disc = BigInt::from(4) * &p[2] * &p[2] - BigInt::from(12) * &p[1];
            if disc.is_negative() {
                vec![]
            } else {
                let r = disc.sqrt();
                let six = BigInt::from(6);
                vec![(-BigInt::from(2) * &p[2] - &r).div_floor(&six), (-BigInt::from(2) * &p[2] + &r).div_floor(&six)]
            }
        }
        _ => vec![],
    };
    let lo_all = -&bound;
    let two = BigInt::from(2);
    let mut roots = Vec::new();
    let mut start = lo_all.clone();
    for k in &crit {
        let a = (k - &two).max(lo_all.clone());
        let b = (k + &two).min(bound.clone());
        if a > start {
            bisect_root(p, &start, &(&a - 1), &mut roots);
        }
        let mut t = a.clone().max(start.clone());
        while t <= b {
            if z_eval(p, &t).is_zero() {
                roots.push(t.clone());
            }
            t += 1;
        }
        start = start.max(b + 1);
    }
    if start <= bound {
        bisect_root(p, &start, &bound, &mut roots);
    }
    roots.sort();
    roots.dedup();
    roots
}

fn bisect_root(p: &[BigInt], lo: &BigInt, hi: &BigInt, out: &mut Vec<BigInt>) {
    if lo > hi {
        return;
    }
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let (flo, fhi) = (z_eval(p, &lo), z_eval(p, &hi));
    if flo.is_zero() {
        out.push(lo.clone());
    }
    if fhi.is_zero() {
        out.push(hi.clone());
    }
    if flo.is_zero() || fhi.is_zero() || flo.signum() == fhi.signum() {
        return;
    }
    let slo = flo.signum();
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        let fm = z_eval(p, &mid);
        if fm.is_zero() {
            out.push(mid);
            return;
        }
        if fm.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Rational roots of an integer polynomial of degree 1 to 3, ascending.
/// Uses the substitution `s = lc * t`, which makes the polynomial monic.
pub fn rational_roots(p: &[BigInt]) -> Vec<Rational> {
    let mut p = p.to_vec();
    trim(&mut p);
    let n = degree(&p).expect("nonzero polynomial");
    if n == 0 {
        return vec![];
    }
    let lc = p[n].clone();
    // P(s) = lc^(n-1) p(s / lc) = s^n + sum p_i lc^(n-1-i) s^i
    let monic: ZPoly = (0..=n)
        .map(|i| if i == n { BigInt::one() } else { &p[i] * num_traits::pow(lc.clone(), n - 1 - i) })
        .collect();
    let mut out: Vec<Rational> =
        monic_integer_roots(&monic).into_iter().map(|s| Rational::new(s, lc.clone())).collect();
    out.sort();
    out
}

/// `|n|` is a perfect square and `n >= 0`.
pub fn is_square_int(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// The product of the primes dividing `n` to an odd power, with the sign
/// of `n`. Trial division runs up to `10^6`; a cofactor left after that is
/// kept whole unless it is a perfect square.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero());
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &d * &d <= m && d <= limit {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &d;
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
    }
    if !is_square_int(&m) {
        out *= m;
    }
    if n.is_negative() {
        -out
    } else {
        out
    }
}

/// Polynomials with rational coefficients; only gcd is needed.
pub fn q_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim_q(&mut a);
    trim_q(&mut b);
    while !b.is_empty() {
        let r = q_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn trim_q(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn q_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r[r.len() - 1].clone() / &lb;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = r[k + j].clone() - c.clone() * bj;
        }
        r.pop();
        trim_q(&mut r);
    }
    r
}

pub fn z_to_q(p: &[BigInt]) -> Vec<Rational> {
    p.iter().map(|c| Rational::from_bigint(c.clone())).collect()
}

pub fn z_derivative(p: &[BigInt]) -> ZPoly {
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

/// Squarefree over `Q`: `gcd(p, p')` is a constant.
pub fn z_is_squarefree(p: &[BigInt]) -> bool {
    q_gcd(&z_to_q(p), &z_to_q(&z_derivative(p))).len() <= 1
}

/// Polynomials over `F_p` with `u64` coefficients in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        trim(&mut c);
        FpPoly { p, c }
    }

    pub fn from_z(p: u64, z: &[BigInt]) -> Self {
        let pb = BigInt::from(p);
        FpPoly::new(p, z.iter().map(|c| c.mod_floor(&pb).try_into().expect("residue fits")).collect())
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn degree(&self) -> Option<usize> {
        degree(&self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => {
                let li = inv_mod(l, self.p);
                FpPoly::new(self.p, self.c.iter().map(|x| x * li % self.p).collect())
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| self.c.get(i).unwrap_or(&0) + self.p - o.c.get(i).unwrap_or(&0)).collect();
        FpPoly::new(self.p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::new(self.p, vec![]);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % self.p;
            }
        }
        FpPoly::new(self.p, c)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let li = inv_mod(d.c[dd], self.p);
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (FpPoly::new(self.p, vec![]), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..r.len() - dd).rev() {
            let t = r[k + dd] * li % self.p;
            q[k] = t;
            if t != 0 {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + self.p - t * dj % self.p) % self.p;
                }
            }
        }
        (FpPoly::new(self.p, q), FpPoly::new(self.p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FpPoly::new(p, vec![1]), FpPoly::new(p, vec![]));
        let (mut t0, mut t1) = (FpPoly::new(p, vec![]), FpPoly::new(p, vec![1]));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let l = inv_mod(*r0.c.last().expect("not both zero"), p);
        let sc = FpPoly::new(p, vec![l]);
        (r0.mul(&sc), s0.mul(&sc), t0.mul(&sc))
    }

    pub fn powmod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = FpPoly::new(self.p, vec![1]).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        FpPoly::new(self.p, self.c.iter().enumerate().skip(1).map(|(i, c)| c * (i as u64 % self.p) % self.p).collect())
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Irreducible monic factors of a squarefree polynomial, by distinct
    /// degree and then equal degree (Cantor-Zassenhaus) splitting.
    pub fn factor_squarefree<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<FpPoly> {
        let p = self.p;
        let mut f = self.monic();
        let mut out = Vec::new();
        let x = FpPoly::x(p);
        let mut h = x.clone();
        let mut d = 1usize;
        while f.degree().is_some_and(|n| n >= 2 * d) {
            h = h.powmod(p as u128, &f);
            let g = h.sub(&x).gcd(&f);
            if g.degree() != Some(0) {
                equal_degree(&g, d, rng, &mut out);
                f = f.divrem(&g).0;
                h = h.rem(&f);
            }
            d += 1;
        }
        if f.degree().is_some_and(|n| n > 0) {
            out.push(f);
        }
        out.sort_by(|a, b| (a.c.len(), &a.c).cmp(&(b.c.len(), &b.c)));
        out
    }
}

fn equal_degree<R: Rng + ?Sized>(f: &FpPoly, d: usize, rng: &mut R, out: &mut Vec<FpPoly>) {
    let n = f.degree().expect("nonzero");
    if n == d {
        out.push(f.monic());
        return;
    }
    let p = f.p;
    let e = ((p as u128).pow(d as u32) - 1) / 2;
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.degree().is_none_or(|k| k == 0) {
            continue;
        }
        let b = a.powmod(e, f).sub(&FpPoly::new(p, vec![1]));
        let g = b.gcd(f);
        if let Some(k) = g.degree() {
            if k > 0 && k < n {
                equal_degree(&g, d, rng, out);
                equal_degree(&f.divrem(&g).0, d, rng, out);
                return;
            }
        }
    }
}

/// Lifts `target = prod(factors) mod p`, with `target` monic mod `p^k` and
/// the factors monic, pairwise coprime mod `p`, to a factorization mod
/// `p^k`. One `p`-adic digit per step.
pub fn hensel_lift(target: &[BigInt], factors: &[FpPoly], k: u32) -> Vec<ZPoly> {
    let p = factors[0].p;
    let pb = BigInt::from(p);
    let r = factors.len();
    // a_i = (prod_{l != i} u_l)^-1 mod u_i, so that sum a_i prod_{l != i} u_l = 1
    let cofactors: Vec<FpPoly> = (0..r)
        .map(|i| {
            (0..r).filter(|&l| l != i).fold(FpPoly::new(p, vec![1]), |acc, l| acc.mul(&factors[l]))
        })
        .collect();
    let a: Vec<FpPoly> = (0..r)
        .map(|i| {
            let (g, s, _) = cofactors[i].rem(&factors[i]).xgcd(&factors[i]);
            assert!(g.is_one(), "factors are not coprime");
            s
        })
        .collect();
    let mut lifted: Vec<ZPoly> = factors.iter().map(|u| u.c.iter().map(|&c| BigInt::from(c)).collect()).collect();
    let mut modulus = pb.clone();
    for _ in 1..k {
        let next = &modulus * &pb;
        let prod = lifted.iter().fold(vec![BigInt::one()], |acc, u| z_mul(&acc, u));
        let n = target.len().max(prod.len());
        let err: ZPoly = (0..n)
            .map(|i| {
                let t = target.get(i).cloned().unwrap_or_default() - prod.get(i).cloned().unwrap_or_default();
                let t = t.mod_floor(&next);
                debug_assert!((&t % &modulus).is_zero());
                t / &modulus
            })
            .collect();
        let e = FpPoly::from_z(p, &err);
        for i in 0..r {
            let delta = e.mul(&a[i]).rem(&factors[i]);
            let u = &mut lifted[i];
            for (j, d) in delta.c.iter().enumerate() {
                u[j] = (&u[j] + &modulus * BigInt::from(*d)).mod_floor(&next);
            }
        }
        modulus = next;
    }
    lifted
}

/// Symmetric residue in `(-m/2, m/2]`.
pub fn symmetric_mod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::seeded_rng;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn integer_roots_of_monic_cubics() {
        // (s - 3)(s + 5)(s - 100)
        let p = z_mul(&z_mul(&z(&[-3, 1]), &z(&[5, 1])), &z(&[-100, 1]));
        assert_eq!(monic_integer_roots(&p), vec![BigInt::from(-5), BigInt::from(3), BigInt::from(100)]);
        // double root at 2 and a root at -1: (s-2)^2 (s+1)
        let p = z_mul(&z_mul(&z(&[-2, 1]), &z(&[-2, 1])), &z(&[1, 1]));
        assert_eq!(monic_integer_roots(&p), vec![BigInt::from(-1), BigInt::from(2)]);
        assert!(monic_integer_roots(&z(&[-2, 0, 0, 1])).is_empty());
        assert_eq!(monic_integer_roots(&z(&[-4, 0, 1])), vec![BigInt::from(-2), BigInt::from(2)]);
        assert_eq!(monic_integer_roots(&z(&[7, 1])), vec![BigInt::from(-7)]);
    }

    #[test]
    fn rational_roots_brute_force_oracle() {
        let mut rng = seeded_rng(11);
        for _ in 0..300 {
            let c: Vec<i64> = (0..4).map(|_| rng.gen_range(-12..=12)).collect();
            if c[3] == 0 {
                continue;
            }
            let p = z(&c);
            let got = rational_roots(&p);
            // every candidate num/den with num | c0, den | c3 (or 0 if c0 = 0)
            let mut want = Vec::new();
            let dens: Vec<i64> = (1..=c[3].abs()).filter(|d| c[3] % d == 0).collect();
            let nums: Vec<i64> = if c[0] == 0 {
                vec![0]
            } else {
                (1..=c[0].abs()).filter(|d| c[0] % d == 0).flat_map(|d| [d, -d]).collect()
            };
            for &n in &nums {
                for &d in &dens {
                    let q = Rational::new(BigInt::from(n), BigInt::from(d));
                    let v = c.iter().rev().fold(Rational::zero(), |acc, &k| acc * &q + Rational::from_int(k));
                    if v.is_zero() && !want.contains(&q) {
                        want.push(q);
                    }
                }
            }
            if c[0] == 0 {
                // the remaining roots come from c1 + c2 t + c3 t^2
                for q in rational_roots(&p[1..]) {
                    if !want.contains(&q) {
                        want.push(q);
                    }
                }
            }
            want.sort();
            assert_eq!(got, want, "{c:?}");
        }
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_part(&BigInt::from(-108)), BigInt::from(-3));
        assert_eq!(squarefree_part(&BigInt::from(72)), BigInt::from(2));
        assert_eq!(squarefree_part(&BigInt::from(1)), BigInt::from(1));
        assert_eq!(squarefree_part(&BigInt::from(-4)), BigInt::from(-1));
    }

    #[test]
    fn factor_mod_p_reconstructs() {
        let mut rng = seeded_rng(12);
        let p = 101;
        for _ in 0..20 {
            let f = FpPoly::new(p, (0..9).map(|_| rng.gen_range(0..p)).chain([1]).collect());
            if !f.is_squarefree() {
                continue;
            }
            let fs = f.factor_squarefree(&mut rng);
            let prod = fs.iter().fold(FpPoly::new(p, vec![1]), |a, b| a.mul(b));
            assert_eq!(prod, f.monic());
            for g in &fs {
                // irreducible: no factor of x^(p^i) - x for i < deg/2
                let n = g.degree().unwrap();
                let mut h = FpPoly::x(p);
                for _ in 1..=n / 2 {
                    h = h.powmod(p as u128, g);
                    assert_eq!(h.sub(&FpPoly::x(p)).gcd(g).degree(), Some(0));
                }
            }
        }
    }

    #[test]
    fn hensel_lifting() {
        let mut rng = seeded_rng(13);
        // (x^3 - 2)(x^2 + 3x + 7)(x + 11)
        let f = z_mul(&z_mul(&z(&[-2, 0, 0, 1]), &z(&[7, 3, 1])), &z(&[11, 1]));
        let p = 13;
        let fp = FpPoly::from_z(p, &f);
        assert!(fp.is_squarefree());
        let fs = fp.factor_squarefree(&mut rng);
        let k = 12;
        let lifted = hensel_lift(&f, &fs, k);
        let m = num_traits::pow(BigInt::from(p), k as usize);
        let prod = lifted.iter().fold(vec![BigInt::one()], |acc, u| z_mul(&acc, u));
        for (a, b) in prod.iter().zip(f.iter()) {
            assert_eq!(a.mod_floor(&m), b.mod_floor(&m));
        }
    }
}
