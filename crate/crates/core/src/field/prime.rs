use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use super::rational::owned_ops;
use super::{Field, FieldError, Rational, Scalar};

/// An element of `F_p`, stored with its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    v: u64,
    p: u64,
}

impl Fp {
    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Representative in `(-p/2, p/2]`.
    pub fn signed(&self) -> i64 {
        if self.v > self.p / 2 {
            self.v as i64 - self.p as i64
        } else {
            self.v as i64
        }
    }

    fn check(&self, other: &Fp) {
        assert_eq!(self.p, other.p, "mixing F_{} and F_{}", self.p, other.p);
    }

    pub fn pow(&self, mut e: u64) -> Fp {
        let mut base = self.v;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        Fp { v: acc, p: self.p }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.v, self.p)
    }
}

impl<'a> Add<&'a Fp> for Fp {
    type Output = Fp;
    fn add(self, rhs: &'a Fp) -> Fp {
        self.check(rhs);
        let s = self.v + rhs.v;
        Fp { v: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
}

impl<'a> Sub<&'a Fp> for Fp {
    type Output = Fp;
    fn sub(self, rhs: &'a Fp) -> Fp {
        self.check(rhs);
        let v = if self.v >= rhs.v { self.v - rhs.v } else { self.v + self.p - rhs.v };
        Fp { v, p: self.p }
    }
}

impl<'a> Mul<&'a Fp> for Fp {
    type Output = Fp;
    fn mul(self, rhs: &'a Fp) -> Fp {
        self.check(rhs);
        Fp { v: self.v * rhs.v % self.p, p: self.p }
    }
}

impl<'a> Div<&'a Fp> for Fp {
    type Output = Fp;
    fn div(self, rhs: &'a Fp) -> Fp {
        self * &rhs.inv().expect("division by zero")
    }
}

owned_ops!(Fp);

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { v: if self.v == 0 { 0 } else { self.p - self.v }, p: self.p }
    }
}

impl Scalar for Fp {
    type Field = PrimeField;

    fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn is_one(&self) -> bool {
        self.v == 1
    }

    fn inv(&self) -> Option<Fp> {
        if self.v == 0 {
            None
        } else {
            Some(self.pow(self.p - 2))
        }
    }
}

/// The prime field `F_p`, `p >= 5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 5 || p >= 1 << 31 || !is_prime(p) {
            return Err(FieldError::BadModulus(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, v: u64) -> Fp {
        Fp { v: v % self.p, p: self.p }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Fp {
        let r = n.mod_floor(&BigInt::from(self.p));
        self.elem(r.to_u64().expect("reduced residue fits"))
    }

    /// All elements in the order 0, 1, ..., p-1.
    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |v| self.elem(v))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = Fp;

    fn zero(&self) -> Fp {
        self.elem(0)
    }

    fn one(&self) -> Fp {
        self.elem(1)
    }

    fn from_i64(&self, n: i64) -> Fp {
        self.elem(n.rem_euclid(self.p as i64) as u64)
    }

    fn from_frac(&self, num: i64, den: i64) -> Result<Fp, FieldError> {
        let d = self.from_i64(den).inv().ok_or(FieldError::ZeroDenominator)?;
        Ok(self.from_i64(num) * d)
    }

    fn from_rational(&self, q: &Rational) -> Result<Fp, FieldError> {
        let d = self.from_bigint(&q.denom());
        if d.is_zero() {
            return Err(FieldError::ZeroDenominator);
        }
        Ok(self.from_bigint(&q.numer()) / d)
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn descriptor(&self) -> String {
        format!("fp:{}", self.p)
    }

    fn parse(&self, s: &str) -> Result<Fp, FieldError> {
        let q = super::Rationals.parse(s)?;
        self.from_rational(&q).map_err(|_| FieldError::Parse(s.to_string()))
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        self.elem(rng.gen_range(0..self.p))
    }

    fn small_values(&self, radius: u64) -> Vec<Fp> {
        let mut out = vec![self.zero()];
        for k in 1..=radius.min(self.p / 2) as i64 {
            out.push(self.from_i64(k));
            out.push(self.from_i64(-k));
        }
        out
    }

    fn sqrt(&self, a: &Fp) -> Option<Fp> {
        if a.is_zero() {
            return Some(self.zero());
        }
        if a.pow((self.p - 1) / 2).v != 1 {
            return None;
        }
        // p is small enough that a scan is acceptable next to everything
        // else we do with the field.
        if self.p < 1 << 16 {
            return self.elements().find(|r| *r * *r == *a);
        }
        tonelli_shanks(*a)
    }
}

fn tonelli_shanks(a: Fp) -> Option<Fp> {
    let p = a.p;
    let f = PrimeField { p };
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = f.elements().skip(2).find(|z| z.pow((p - 1) / 2).v == p - 1)?;
    let mut m = s;
    let mut c = z.pow(q);
    let mut t = a.pow(q);
    let mut r = a.pow((q + 1) / 2);
    while t.v != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2.v != 1 {
            t2 = t2 * t2;
            i += 1;
        }
        let b = c.pow(1 << (m - i - 1));
        m = i;
        c = b * b;
        t = t * c;
        r = r * b;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_representative() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.from_i64(-1).signed(), -1);
        assert_eq!(f.from_i64(3).signed(), 3);
        assert_eq!(f.from_i64(4).signed(), -3);
    }

    #[test]
    fn fractions_reduce() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.from_frac(1, 2).unwrap(), f.from_i64(4));
        assert_eq!(f.parse("3/4").unwrap(), f.from_i64(6));
        assert!(f.from_frac(1, 7).is_err());
    }

    #[test]
    #[should_panic]
    fn mixing_fields_panics() {
        let a = PrimeField::new(5).unwrap().one();
        let b = PrimeField::new(7).unwrap().one();
        let _ = a + b;
    }
}
