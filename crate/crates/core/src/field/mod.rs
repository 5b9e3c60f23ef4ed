//! Exact base fields and dense linear algebra over them.
//!
//! Two fields are provided: the rationals ([`Rationals`]) and prime fields
//! ([`PrimeField`]) of characteristic at least 5. Every algebraic structure in
//! the crate is generic over the element type, which carries enough
//! information (for `F_p`, the modulus) to do arithmetic without a context.

mod matrix;
mod prime;
mod rational;

pub use matrix::{Mat, RowReducer};
pub use prime::{Fp, PrimeField};
pub use rational::{Rational, Rationals};

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("p = {0} is not a prime >= 5 below 2^31")]
    BadModulus(u64),
    #[error("cannot parse {0:?} as a field element")]
    Parse(String),
    #[error("denominator vanishes in this field")]
    ZeroDenominator,
    #[error("elements belong to different fields")]
    FieldMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("ragged row list")]
    Ragged,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrices are over different fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
}

/// An element of an exact field.
///
/// Operators panic when mixing elements of two different prime fields and
/// `/` panics on division by zero; use [`Scalar::inv`] when zero is possible.
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    type Field: Field<Elem = Self>;

    fn field(&self) -> Self::Field;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        self.clone() == self.field().one()
    }
}

/// A field descriptor: constructs elements and knows how to enumerate and
/// sample them.
pub trait Field: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync + 'static {
    type Elem: Scalar<Field = Self>;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// `num / den`; fails when `den` vanishes in the field.
    fn from_frac(&self, num: i64, den: i64) -> Result<Self::Elem, FieldError>;
    /// Image of a rational number; fails when the denominator vanishes.
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem, FieldError>;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// `"q"` or `"fp:P"`.
    fn descriptor(&self) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem, FieldError>;
    /// A random element; over the rationals the height is kept small.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// 0, 1, -1, 2, -2, ... up to `radius` in absolute value, without
    /// repetitions.
    fn small_values(&self, radius: u64) -> Vec<Self::Elem>;
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn half(&self) -> Self::Elem {
        self.from_frac(1, 2).expect("characteristic is not 2")
    }

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    fn is_square(&self, a: &Self::Elem) -> bool {
        self.sqrt(a).is_some()
    }

    /// Matrix inverse; the rationals override this with fraction-free
    /// elimination.
    fn invert_matrix(&self, m: &Mat<Self::Elem>) -> Result<Mat<Self::Elem>, LinalgError> {
        matrix::gauss_jordan_inverse(m)
    }
}

/// `n` as an element of the same field as `like`.
pub fn int_like<S: Scalar>(like: &S, n: i64) -> S {
    like.field().from_i64(n)
}

/// A field chosen at run time from its descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Rationals,
    Prime(PrimeField),
}

impl std::str::FromStr for FieldSpec {
    type Err = FieldError;

    /// Accepts `q` and `fp:P`.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let s = s.trim();
        if s == "q" {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("fp:")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| FieldError::Parse(s.to_string()))?;
        Ok(FieldSpec::Prime(PrimeField::new(p)?))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "{}", Rationals.descriptor()),
            FieldSpec::Prime(p) => write!(f, "{}", p.descriptor()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axioms<F: Field>(f: &F, seed: u64) {
        let mut rng = seeded_rng(seed);
        for _ in 0..200 {
            let a = f.random(&mut rng);
            let b = f.random(&mut rng);
            let c = f.random(&mut rng);
            assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
            assert_eq!(
                a.clone() * (b.clone() + c.clone()),
                a.clone() * b.clone() + a.clone() * c.clone()
            );
            assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            assert!((a.clone() - a.clone()).is_zero());
            if let Some(ai) = a.inv() {
                assert!((ai * a.clone()).is_one());
            } else {
                assert!(a.is_zero());
            }
            let p = f.parse(&a.to_string()).unwrap();
            assert_eq!(p, a);
            let sq = a.clone() * a.clone();
            let r = f.sqrt(&sq).unwrap();
            assert_eq!(r.clone() * r, sq);
        }
    }

    #[test]
    fn rational_axioms() {
        axioms(&Rationals, 1);
    }

    #[test]
    fn prime_axioms() {
        axioms(&PrimeField::new(7).unwrap(), 2);
        axioms(&PrimeField::new(1_000_003).unwrap(), 3);
    }

    #[test]
    fn bad_moduli_rejected() {
        for p in [0, 1, 2, 3, 4, 9, 15] {
            assert!(PrimeField::new(p).is_err(), "{p}");
        }
        assert!(PrimeField::new(5).is_ok());
    }

    #[test]
    fn descriptors() {
        for d in ["q", "fp:5", "fp:1000003"] {
            assert_eq!(d.parse::<FieldSpec>().unwrap().to_string(), d);
        }
        for d in ["fp:4", "fp:2", "fp:x", "r", ""] {
            assert!(d.parse::<FieldSpec>().is_err(), "{d}");
        }
    }

    #[test]
    fn small_values_are_distinct() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.small_values(10).len(), 5);
        let q = Rationals.small_values(2);
        assert_eq!(q.len(), 5);
        assert_eq!(q[2], Rationals.from_i64(-1));
    }

    #[test]
    fn quadratic_residues_mod_7() {
        let f = PrimeField::new(7).unwrap();
        let squares: Vec<i64> = (0..7).filter(|&a| f.is_square(&f.from_i64(a))).collect();
        assert_eq!(squares, vec![0, 1, 2, 4]);
    }
}
