//! Split octonions.
//!
//! Elements are stored in a basis `u1, ..., u8` in which the norm is the
//! hyperbolic form `u1 u2 + u3 u4 + u5 u6 + u7 u8` and `1 = u1 + u2`. The
//! product is Zorn's vector-matrix product: `(c1, c2)` are the two diagonal
//! scalars and the pairs `(c3, c4), (c5, c6), (c7, c8)` hold one coordinate
//! of each off-diagonal vector (the second with its sign flipped).

use std::ops::{Add, Mul, Neg, Sub};

use crate::field::{Field, Mat, Scalar};

pub const DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OctonionError {
    #[error("octonion has zero norm")]
    NotInvertible,
    #[error("wrong number of coordinates: {0}")]
    BadLength(usize),
    #[error("no solution found within search budget {0}")]
    SearchExhausted(u64),
    #[error("linear form is identically zero")]
    ZeroForm,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Octonion<S: Scalar> {
    c: [S; DIM],
}

impl<S: Scalar> std::fmt::Display for Octonion<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(t) = self.as_scalar() {
            return write!(f, "{t}");
        }
        write!(f, "[")?;
        for (i, c) in self.c.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

fn cross<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [
        a[1].clone() * &b[2] - a[2].clone() * &b[1],
        a[2].clone() * &b[0] - a[0].clone() * &b[2],
        a[0].clone() * &b[1] - a[1].clone() * &b[0],
    ]
}

fn dot<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0].clone() * &b[0] + a[1].clone() * &b[1] + a[2].clone() * &b[2]
}

impl<S: Scalar> Octonion<S> {
    pub fn zero<F: Field<Elem = S>>(field: &F) -> Self {
        Octonion { c: std::array::from_fn(|_| field.zero()) }
    }

    pub fn one<F: Field<Elem = S>>(field: &F) -> Self {
        Self::scalar(field.one())
    }

    pub fn scalar(t: S) -> Self {
        let z = t.field().zero();
        let mut c: [S; DIM] = std::array::from_fn(|_| z.clone());
        c[0] = t.clone();
        c[1] = t;
        Octonion { c }
    }

    /// The `i`-th basis vector `u_{i+1}`.
    pub fn basis<F: Field<Elem = S>>(field: &F, i: usize) -> Self {
        let mut x = Self::zero(field);
        x.c[i] = field.one();
        x
    }

    pub fn from_coords(c: Vec<S>) -> Result<Self, OctonionError> {
        let n = c.len();
        let c: [S; DIM] = c.try_into().map_err(|_| OctonionError::BadLength(n))?;
        Ok(Octonion { c })
    }

    pub fn from_ints<F: Field<Elem = S>>(field: &F, c: [i64; DIM]) -> Self {
        Octonion { c: c.map(|x| field.from_i64(x)) }
    }

    pub fn coords(&self) -> &[S; DIM] {
        &self.c
    }

    pub fn field(&self) -> S::Field {
        self.c[0].field()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, t: &S) -> Self {
        Octonion { c: std::array::from_fn(|i| self.c[i].clone() * t) }
    }

    fn zorn(&self) -> (S, [S; 3], [S; 3], S) {
        let c = &self.c;
        (
            c[0].clone(),
            [c[2].clone(), c[4].clone(), c[6].clone()],
            [-c[3].clone(), -c[5].clone(), -c[7].clone()],
            c[1].clone(),
        )
    }

    fn from_zorn(a: S, u: [S; 3], v: [S; 3], b: S) -> Self {
        let [u1, u2, u3] = u;
        let [v1, v2, v3] = v;
        Octonion { c: [a, b, u1, -v1, u2, -v2, u3, -v3] }
    }

    pub fn conj(&self) -> Self {
        let c = &self.c;
        Octonion { c: std::array::from_fn(|i| match i {
            0 => c[1].clone(),
            1 => c[0].clone(),
            _ => -c[i].clone(),
        }) }
    }

    pub fn trace(&self) -> S {
        self.c[0].clone() + &self.c[1]
    }

    pub fn norm(&self) -> S {
        let c = &self.c;
        c[0].clone() * &c[1] + c[2].clone() * &c[3] + c[4].clone() * &c[5] + c[6].clone() * &c[7]
    }

    /// Polar form of the norm, `Q(x, x) = |x|`.
    pub fn q_form(&self, other: &Self) -> S {
        let (a, b) = (&self.c, &other.c);
        let mut s = self.field().zero();
        for k in 0..4 {
            s = s + a[2 * k].clone() * &b[2 * k + 1] + a[2 * k + 1].clone() * &b[2 * k];
        }
        s * self.field().half()
    }

    pub fn inverse(&self) -> Result<Self, OctonionError> {
        let n = self.norm().inv().ok_or(OctonionError::NotInvertible)?;
        Ok(self.conj().scale(&n))
    }

    /// `Some(t)` when the element is `t * 1`.
    pub fn as_scalar(&self) -> Option<S> {
        if self.c[0] == self.c[1] && self.c[2..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// Matrix of `y -> self * y` in the coordinate basis.
    pub fn left_mul_matrix(&self) -> Mat<S> {
        let f = self.field();
        let cols: Vec<Vec<S>> = (0..DIM).map(|j| (self * &Self::basis(&f, j)).c.to_vec()).collect();
        Mat::from_columns(&f, &cols).expect("square")
    }

    /// Matrix of `y -> y * self`.
    pub fn right_mul_matrix(&self) -> Mat<S> {
        let f = self.field();
        let cols: Vec<Vec<S>> = (0..DIM).map(|j| (&Self::basis(&f, j) * self).c.to_vec()).collect();
        Mat::from_columns(&f, &cols).expect("square")
    }

    pub fn apply(m: &Mat<S>, x: &Self) -> Self {
        Octonion::from_coords(m.mul_vec(&x.c).expect("8x8 matrix")).expect("length 8")
    }
}

impl<'a, S: Scalar> Mul<&'a Octonion<S>> for &'a Octonion<S> {
    type Output = Octonion<S>;
    fn mul(self, rhs: &'a Octonion<S>) -> Octonion<S> {
        let (a, u, v, b) = self.zorn();
        let (a2, u2, v2, b2) = rhs.zorn();
        let vv = cross(&v, &v2);
        let uu = cross(&u, &u2);
        let top = a.clone() * &a2 + dot(&u, &v2);
        let bottom = b.clone() * &b2 + dot(&v, &u2);
        let nu = std::array::from_fn(|i| a.clone() * &u2[i] + b2.clone() * &u[i] + vv[i].clone());
        let nv = std::array::from_fn(|i| a2.clone() * &v[i] + b.clone() * &v2[i] - uu[i].clone());
        Octonion::from_zorn(top, nu, nv, bottom)
    }
}

impl<'a, S: Scalar> Add<&'a Octonion<S>> for &'a Octonion<S> {
    type Output = Octonion<S>;
    fn add(self, rhs: &'a Octonion<S>) -> Octonion<S> {
        Octonion { c: std::array::from_fn(|i| self.c[i].clone() + &rhs.c[i]) }
    }
}

impl<'a, S: Scalar> Sub<&'a Octonion<S>> for &'a Octonion<S> {
    type Output = Octonion<S>;
    fn sub(self, rhs: &'a Octonion<S>) -> Octonion<S> {
        Octonion { c: std::array::from_fn(|i| self.c[i].clone() - &rhs.c[i]) }
    }
}

impl<'a, S: Scalar> Neg for &'a Octonion<S> {
    type Output = Octonion<S>;
    fn neg(self) -> Octonion<S> {
        Octonion { c: std::array::from_fn(|i| -self.c[i].clone()) }
    }
}

/// Gram matrix of the polar form `Q` in the coordinate basis.
pub fn gram<F: Field>(field: &F) -> Mat<F::Elem> {
    let mut g = Mat::zeros(field, DIM, DIM);
    for k in 0..4 {
        g[(2 * k, 2 * k + 1)] = field.half();
        g[(2 * k + 1, 2 * k)] = field.half();
    }
    g
}

/// Matrix of conjugation.
pub fn conj_matrix<F: Field>(field: &F) -> Mat<F::Elem> {
    let cols: Vec<Vec<F::Elem>> = (0..DIM).map(|j| Octonion::basis(field, j).conj().c.to_vec()).collect();
    Mat::from_columns(field, &cols).expect("square")
}

/// `table[i][j]` = coordinates of `u_i * u_j`.
pub fn structure_table<F: Field>(field: &F) -> Vec<Vec<Vec<F::Elem>>> {
    (0..DIM)
        .map(|i| {
            (0..DIM)
                .map(|j| (&Octonion::basis(field, i) * &Octonion::basis(field, j)).c.to_vec())
                .collect()
        })
        .collect()
}

/// Basis of the traceless subspace: `u1 - u2, u3, ..., u8`.
pub fn traceless_basis<F: Field>(field: &F) -> Vec<Octonion<F::Elem>> {
    let mut out = vec![&Octonion::basis(field, 0) - &Octonion::basis(field, 1)];
    out.extend((2..DIM).map(|i| Octonion::basis(field, i)));
    out
}

/// An element of norm `n`: `1` when `n = 1`, otherwise `n u1 + u2`.
pub fn find_with_norm<F: Field>(field: &F, n: &F::Elem) -> Octonion<F::Elem> {
    if n.is_one() {
        return Octonion::one(field);
    }
    let mut x = Octonion::zero(field);
    x.c[0] = n.clone();
    x.c[1] = field.one();
    x
}

/// An element with trace `t` and norm `n`. When `n = t^2 / 4` the scalar
/// `t / 2` is returned; otherwise `t u1 + n u3 + u4`.
pub fn find_with_trace_norm<F: Field>(field: &F, t: &F::Elem, n: &F::Elem) -> Octonion<F::Elem> {
    let half_t = t.clone() * field.half();
    if half_t.clone() * &half_t == *n {
        return Octonion::scalar(half_t);
    }
    let mut x = Octonion::zero(field);
    x.c[0] = t.clone();
    x.c[2] = n.clone();
    x.c[3] = field.one();
    x
}

/// A traceless `u` with `tr(conj(x) u) != 0`, scanning the traceless basis
/// in order. `None` iff `x` is a scalar.
pub fn find_traceless_pairing<S: Scalar>(x: &Octonion<S>) -> Option<Octonion<S>> {
    let xc = x.conj();
    traceless_basis(&x.field()).into_iter().find(|u| !(&xc * u).trace().is_zero())
}

/// An element `u` with `|u| = 0` and `l(u) != 0`, where `l(u) = sum c_i u_i`.
///
/// Candidates are `u2 = 1`, `u1 = -(u3 u4 + u5 u6 + u7 u8)` with `(u3, ..., u8)`
/// enumerated over small values in order of increasing height. `budget`
/// bounds the number of candidates tried.
pub fn find_isotropic_nonvanishing<F: Field>(
    field: &F,
    coeffs: &[F::Elem; DIM],
    budget: u64,
) -> Result<Octonion<F::Elem>, OctonionError> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(OctonionError::ZeroForm);
    }
    let eval = |u: &Octonion<F::Elem>| {
        u.c.iter().zip(coeffs.iter()).fold(field.zero(), |acc, (a, b)| acc + a.clone() * b)
    };
    let mut tried = 0u64;
    for radius in 1..=3u64 {
        let vals = field.small_values(radius);
        let n = vals.len();
        let mut idx = [0usize; 6];
        loop {
            let t: Vec<F::Elem> = idx.iter().map(|&i| vals[i].clone()).collect();
            let mut u = Octonion::zero(field);
            u.c[1] = field.one();
            for k in 0..6 {
                u.c[k + 2] = t[k].clone();
            }
            u.c[0] = -(t[0].clone() * &t[1] + t[2].clone() * &t[3] + t[4].clone() * &t[5]);
            if !eval(&u).is_zero() {
                return Ok(u);
            }
            tried += 1;
            if tried >= budget {
                return Err(OctonionError::SearchExhausted(budget));
            }
            let mut k = 0;
            loop {
                if k == 6 {
                    break;
                }
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == 6 {
                break;
            }
        }
    }
    Err(OctonionError::SearchExhausted(budget))
}
