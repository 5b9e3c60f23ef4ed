use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::{Field, FieldError, LinalgError, Mat, Scalar};

/// An exact rational number.
///
/// Values whose numerator and denominator fit in an `i64` are kept inline and
/// use `i128` intermediates; everything else falls back to `BigRational`.
/// The representation is canonical, so structural equality is numeric
/// equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    // den > 0, gcd(num, den) = 1, num != i64::MIN
    Small(i64, i64),
    Big(BigRational),
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_i128(n as i128, 1)
    }

    pub fn new(num: BigInt, den: BigInt) -> Self {
        Self::from_big(BigRational::new(num, den))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn from_big(q: BigRational) -> Self {
        if let (Some(n), Some(d)) = (q.numer().to_i64(), q.denom().to_i64()) {
            if n != i64::MIN {
                return Rational(Repr::Small(n, d));
            }
        }
        Rational(Repr::Big(q))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) if n != i64::MIN => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(BigRational::new(n.into(), d.into()))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw((*n).into(), (*d).into()),
            Repr::Big(q) => q.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => (*n).into(),
            Repr::Big(q) => q.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => (*d).into(),
            Repr::Big(q) => q.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(q) => q.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(q) => {
                if q.is_positive() {
                    1
                } else if q.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn binop(
        &self,
        rhs: &Self,
        small: impl Fn(i128, i128, i128, i128) -> Option<(i128, i128)>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
            if let Some((n, m)) = small(*a as i128, *b as i128, *c as i128, *d as i128) {
                return Self::from_i128(n, m);
            }
        }
        Self::from_big(big(self.to_big(), rhs.to_big()))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(q) => write!(f, "{q}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl<'a> Add<&'a Rational> for Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        self.binop(
            rhs,
            |a, b, c, d| {
                if b == d {
                    Some((a.checked_add(c)?, b))
                } else {
                    Some((a.checked_mul(d)?.checked_add(c.checked_mul(b)?)?, b.checked_mul(d)?))
                }
            },
            |x, y| x + y,
        )
    }
}

impl<'a> Sub<&'a Rational> for Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        self.binop(
            rhs,
            |a, b, c, d| {
                if b == d {
                    Some((a.checked_sub(c)?, b))
                } else {
                    Some((a.checked_mul(d)?.checked_sub(c.checked_mul(b)?)?, b.checked_mul(d)?))
                }
            },
            |x, y| x - y,
        )
    }
}

impl<'a> Mul<&'a Rational> for Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        if self.is_zero_inner() || rhs.is_zero_inner() {
            return Rational::zero();
        }
        self.binop(rhs, |a, b, c, d| Some((a.checked_mul(c)?, b.checked_mul(d)?)), |x, y| x * y)
    }
}

impl<'a> Div<&'a Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        let inv = rhs.inv().expect("division by zero");
        self * &inv
    }
}

impl Rational {
    fn is_zero_inner(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                self * &rhs
            }
        }
        impl Div for $t {
            type Output = $t;
            fn div(self, rhs: $t) -> $t {
                self / &rhs
            }
        }
    };
}
pub(super) use owned_ops;

owned_ops!(Rational);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, d)),
            Repr::Big(q) => Rational::from_big(-q),
        }
    }
}

impl Scalar for Rational {
    type Field = Rationals;

    fn field(&self) -> Rationals {
        Rationals
    }

    fn is_zero(&self) -> bool {
        self.is_zero_inner()
    }

    fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    fn inv(&self) -> Option<Self> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) => Some(Rational::from_i128(*d as i128, *n as i128)),
            Repr::Big(q) => Some(Rational::from_big(q.recip())),
        }
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }

    fn one(&self) -> Rational {
        Rational::one()
    }

    fn from_i64(&self, n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn from_frac(&self, num: i64, den: i64) -> Result<Rational, FieldError> {
        if den == 0 {
            return Err(FieldError::ZeroDenominator);
        }
        Ok(Rational::from_i128(num as i128, den as i128))
    }

    fn from_rational(&self, q: &Rational) -> Result<Rational, FieldError> {
        Ok(q.clone())
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn descriptor(&self) -> String {
        "q".into()
    }

    fn parse(&self, s: &str) -> Result<Rational, FieldError> {
        let err = || FieldError::Parse(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational::new(n, d))
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Rational {
        let n = rng.gen_range(-4i64..=4);
        let d = if rng.gen_bool(0.7) { 1 } else { rng.gen_range(2i64..=3) };
        Rational::from_i128(n as i128, d as i128)
    }

    fn small_values(&self, radius: u64) -> Vec<Rational> {
        let mut out = vec![Rational::zero()];
        for k in 1..=radius as i64 {
            out.push(Rational::from_int(k));
            out.push(Rational::from_int(-k));
        }
        out
    }

    fn sqrt(&self, a: &Rational) -> Option<Rational> {
        if a.signum() < 0 {
            return None;
        }
        let n = a.numer();
        let d = a.denom();
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &rn * &rn == n && &rd * &rd == d {
            Some(Rational::new(rn, rd))
        } else {
            None
        }
    }

    fn invert_matrix(&self, m: &Mat<Rational>) -> Result<Mat<Rational>, LinalgError> {
        bareiss_inverse(m)
    }
}

/// Inverse via fraction-free elimination: rows are scaled to integers, the
/// augmented integer matrix is reduced with Bareiss' exact divisions, and
/// only the final back substitution leaves the integers.
fn bareiss_inverse(m: &Mat<Rational>) -> Result<Mat<Rational>, LinalgError> {
    let n = m.rows();
    if n != m.cols() {
        return Err(LinalgError::Dimension(format!("inverse of {}x{} matrix", n, m.cols())));
    }
    let w = 2 * n;
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut l = BigInt::one();
        for j in 0..n {
            l = l.lcm(&m[(i, j)].denom());
        }
        let mut row = Vec::with_capacity(w);
        for j in 0..n {
            let q = &m[(i, j)];
            row.push(q.numer() * (&l / q.denom()));
        }
        for j in 0..n {
            row.push(if i == j { l.clone() } else { BigInt::zero() });
        }
        a.push(row);
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero()).ok_or(LinalgError::Singular)?;
        a.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..w {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut out = Mat::zeros(&Rationals, n, n);
    for c in 0..n {
        for i in (0..n).rev() {
            let mut acc = Rational::from_bigint(a[i][n + c].clone());
            for j in i + 1..n {
                if !a[i][j].is_zero() {
                    acc = acc - &(Rational::from_bigint(a[i][j].clone()) * &out[(j, c)]);
                }
            }
            out[(i, c)] = acc / Rational::from_bigint(a[i][i].clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_and_big_agree() {
        let big = Rational::from_int(i64::MAX);
        let s = big.clone() + &big;
        assert_eq!(s.to_string(), "18446744073709551614");
        let back = s - &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        assert_eq!(Rational::from_int(i64::MIN).to_string(), i64::MIN.to_string());
        assert_eq!(-Rational::from_int(i64::MIN) + &Rational::from_int(i64::MIN), Rational::zero());
    }

    #[test]
    fn parse_and_display() {
        let q = Rationals.parse("-6/4").unwrap();
        assert_eq!(q.to_string(), "-3/2");
        assert!(Rationals.parse("1/0").is_err());
        assert!(Rationals.parse("x").is_err());
    }

    #[test]
    fn ordering() {
        let a = Rationals.from_frac(1, 3).unwrap();
        let b = Rationals.from_frac(1, 2).unwrap();
        assert!(a < b);
        assert!(-b.clone() < a);
    }
}
