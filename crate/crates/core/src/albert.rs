//! The split Albert algebra of 3x3 Hermitian octonion matrices.
//!
//! `h(s1, s2, s3, x1, x2, x3)` is the matrix
//!
//! ```text
//! [ s1      x3      conj(x2) ]
//! [ conj(x3) s2     x1       ]
//! [ x2      conj(x1) s3      ]
//! ```
//!
//! and the flat coordinate order is `(s1, s2, s3, x1, x2, x3)`, 27 in all.

use std::ops::{Add, Neg, Sub};

use crate::field::{Field, Mat, Scalar};
use crate::octonion::{self, Octonion};

pub const DIM: usize = 27;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlbertError {
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("wrong number of coordinates: {0}")]
    BadLength(usize),
    #[error("index {0} out of range 1..=3")]
    BadIndex(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlbertElement<S: Scalar> {
    pub s: [S; 3],
    /// `x[0]` is `x1`, the (2,3) entry; `x[1]` is `x2`, the (3,1) entry;
    /// `x[2]` is `x3`, the (1,2) entry.
    pub x: [Octonion<S>; 3],
}

/// A 3x3 matrix of octonions with the (nonassociative) matrix product.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OctMat3<S: Scalar>(pub [[Octonion<S>; 3]; 3]);

impl<S: Scalar> OctMat3<S> {
    pub fn zero<F: Field<Elem = S>>(field: &F) -> Self {
        OctMat3(std::array::from_fn(|_| std::array::from_fn(|_| Octonion::zero(field))))
    }

    pub fn identity<F: Field<Elem = S>>(field: &F) -> Self {
        let mut m = Self::zero(field);
        for i in 0..3 {
            m.0[i][i] = Octonion::one(field);
        }
        m
    }

    /// Scalar matrix from a 3x3 [`Mat`].
    pub fn from_scalar_mat(g: &Mat<S>) -> Self {
        OctMat3(std::array::from_fn(|i| std::array::from_fn(|j| Octonion::scalar(g[(i, j)].clone()))))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = self.0[0][0].field();
        OctMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = Octonion::zero(&f);
                for k in 0..3 {
                    acc = &acc + &(&self.0[i][k] * &other.0[k][j]);
                }
                acc
            })
        }))
    }

    pub fn add(&self, other: &Self) -> Self {
        OctMat3(std::array::from_fn(|i| std::array::from_fn(|j| &self.0[i][j] + &other.0[i][j])))
    }

    pub fn conj_transpose(&self) -> Self {
        OctMat3(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i].conj())))
    }

    /// `(A X) A*`; for the matrices used here the bracketing does not matter.
    pub fn congruence(&self, x: &AlbertElement<S>) -> AlbertElement<S> {
        let m = self.mul(&x.to_matrix()).mul(&self.conj_transpose());
        AlbertElement::from_hermitian(&m).expect("congruence preserves Hermitian matrices")
    }
}

impl<S: Scalar> AlbertElement<S> {
    pub fn zero<F: Field<Elem = S>>(field: &F) -> Self {
        AlbertElement {
            s: std::array::from_fn(|_| field.zero()),
            x: std::array::from_fn(|_| Octonion::zero(field)),
        }
    }

    /// The identity `e = E1 + E2 + E3`.
    pub fn identity<F: Field<Elem = S>>(field: &F) -> Self {
        Self::diag(field.one(), field.one(), field.one())
    }

    pub fn diag(s1: S, s2: S, s3: S) -> Self {
        let f = s1.field();
        AlbertElement { s: [s1, s2, s3], x: std::array::from_fn(|_| Octonion::zero(&f)) }
    }

    pub fn diag_ints<F: Field<Elem = S>>(field: &F, s: [i64; 3]) -> Self {
        Self::diag(field.from_i64(s[0]), field.from_i64(s[1]), field.from_i64(s[2]))
    }

    /// The idempotent `E_i`, `i` in 1..=3.
    pub fn idempotent<F: Field<Elem = S>>(field: &F, i: usize) -> Result<Self, AlbertError> {
        check_index(i)?;
        let mut x = Self::zero(field);
        x.s[i - 1] = field.one();
        Ok(x)
    }

    /// `(a)_i`: the element with `x_i = a` and all other coordinates zero.
    pub fn off_diagonal(i: usize, a: Octonion<S>) -> Result<Self, AlbertError> {
        check_index(i)?;
        let mut x = Self::zero(&a.field());
        x.x[i - 1] = a;
        Ok(x)
    }

    /// The `i`-th vector of the coordinate basis.
    pub fn basis<F: Field<Elem = S>>(field: &F, i: usize) -> Self {
        let mut c = vec![field.zero(); DIM];
        c[i] = field.one();
        Self::from_coords(c).expect("length 27")
    }

    pub fn from_coords(c: Vec<S>) -> Result<Self, AlbertError> {
        if c.len() != DIM {
            return Err(AlbertError::BadLength(c.len()));
        }
        let oct = |k: usize| Octonion::from_coords(c[3 + 8 * k..11 + 8 * k].to_vec()).expect("length 8");
        Ok(AlbertElement { s: [c[0].clone(), c[1].clone(), c[2].clone()], x: [oct(0), oct(1), oct(2)] })
    }

    pub fn coords(&self) -> Vec<S> {
        let mut v: Vec<S> = self.s.to_vec();
        for o in &self.x {
            v.extend(o.coords().iter().cloned());
        }
        v
    }

    pub fn field(&self) -> S::Field {
        self.s[0].field()
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|x| x.is_zero()) && self.x.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, t: &S) -> Self {
        AlbertElement {
            s: std::array::from_fn(|i| self.s[i].clone() * t),
            x: std::array::from_fn(|i| self.x[i].scale(t)),
        }
    }

    pub fn to_matrix(&self) -> OctMat3<S> {
        let [s1, s2, s3] = &self.s;
        let [x1, x2, x3] = &self.x;
        let sc = |t: &S| Octonion::scalar(t.clone());
        OctMat3([
            [sc(s1), x3.clone(), x2.conj()],
            [x3.conj(), sc(s2), x1.clone()],
            [x2.clone(), x1.conj(), sc(s3)],
        ])
    }

    pub fn from_hermitian(m: &OctMat3<S>) -> Result<Self, AlbertError> {
        let a = &m.0;
        let s: Vec<S> = (0..3).map(|i| a[i][i].as_scalar().ok_or(AlbertError::NotHermitian)).collect::<Result<_, _>>()?;
        if a[1][0] != a[0][1].conj() || a[0][2] != a[2][0].conj() || a[2][1] != a[1][2].conj() {
            return Err(AlbertError::NotHermitian);
        }
        Ok(AlbertElement {
            s: [s[0].clone(), s[1].clone(), s[2].clone()],
            x: [a[1][2].clone(), a[2][0].clone(), a[0][1].clone()],
        })
    }

    /// `X o Y = (XY + YX) / 2`.
    pub fn jordan(&self, other: &Self) -> Self {
        let (a, b) = (self.to_matrix(), other.to_matrix());
        let sum = a.mul(&b).add(&b.mul(&a));
        let half = self.field().half();
        let m = OctMat3(std::array::from_fn(|i| std::array::from_fn(|j| sum.0[i][j].scale(&half))));
        Self::from_hermitian(&m).expect("Jordan product is Hermitian")
    }

    pub fn square(&self) -> Self {
        self.jordan(self)
    }

    pub fn trace(&self) -> S {
        self.s[0].clone() + &self.s[1] + &self.s[2]
    }

    /// `det X = s1 s2 s3 + tr(x1 x2 x3) - s1|x1| - s2|x2| - s3|x3|`.
    pub fn det(&self) -> S {
        let [s1, s2, s3] = &self.s;
        let [x1, x2, x3] = &self.x;
        s1.clone() * s2 * s3 + (&(x1 * x2) * x3).trace()
            - s1.clone() * &x1.norm()
            - s2.clone() * &x2.norm()
            - s3.clone() * &x3.norm()
    }

    /// `<X, Y> = Tr(X o Y)`.
    pub fn bilinear(&self, other: &Self) -> S {
        let f = self.field();
        let two = f.from_i64(2);
        let mut acc = f.zero();
        for i in 0..3 {
            acc = acc + self.s[i].clone() * &other.s[i] + two.clone() * &self.x[i].q_form(&other.x[i]);
        }
        acc
    }

    /// Cross product, characterised by `<X x Y, Z> = 3 D(X, Y, Z)`.
    pub fn cross(&self, other: &Self) -> Self {
        let f = self.field();
        let e = Self::identity(&f);
        let half = f.half();
        let te = self.trace();
        let to = other.trace();
        let xy = self.bilinear(other);
        let scal = (te.clone() * &to - &xy) * &half;
        &(&(&self.jordan(other) - &self.scale(&(to * &half))) - &other.scale(&(te * &half))) + &e.scale(&scal)
    }

    /// The symmetric trilinear form with `D(X, X, X) = det X`.
    pub fn trilinear_d(x: &Self, y: &Self, z: &Self) -> S {
        let f = x.field();
        let xy = x + y;
        let s = &xy + z;
        let v = s.det() - (&xy).det() - (y + z).det() - (z + x).det() + x.det() + y.det() + z.det();
        v * f.from_frac(1, 6).expect("characteristic is not 2 or 3")
    }
}

fn check_index(i: usize) -> Result<(), AlbertError> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(AlbertError::BadIndex(i))
    }
}

impl<'a, S: Scalar> Add<&'a AlbertElement<S>> for &'a AlbertElement<S> {
    type Output = AlbertElement<S>;
    fn add(self, rhs: &'a AlbertElement<S>) -> AlbertElement<S> {
        AlbertElement {
            s: std::array::from_fn(|i| self.s[i].clone() + &rhs.s[i]),
            x: std::array::from_fn(|i| &self.x[i] + &rhs.x[i]),
        }
    }
}

impl<'a, S: Scalar> Sub<&'a AlbertElement<S>> for &'a AlbertElement<S> {
    type Output = AlbertElement<S>;
    fn sub(self, rhs: &'a AlbertElement<S>) -> AlbertElement<S> {
        AlbertElement {
            s: std::array::from_fn(|i| self.s[i].clone() - &rhs.s[i]),
            x: std::array::from_fn(|i| &self.x[i] - &rhs.x[i]),
        }
    }
}

impl<'a, S: Scalar> Neg for &'a AlbertElement<S> {
    type Output = AlbertElement<S>;
    fn neg(self) -> AlbertElement<S> {
        AlbertElement { s: std::array::from_fn(|i| -self.s[i].clone()), x: std::array::from_fn(|i| -&self.x[i]) }
    }
}

/// Gram matrix of `<,>` in the coordinate basis.
pub fn bilinear_gram<F: Field>(field: &F) -> Mat<F::Elem> {
    let mut g = Mat::identity(field, DIM);
    let g8 = octonion::gram(field);
    let two = field.from_i64(2);
    for k in 0..3 {
        for i in 0..8 {
            for j in 0..8 {
                g[(3 + 8 * k + i, 3 + 8 * k + j)] = g8[(i, j)].clone() * &two;
            }
        }
    }
    g
}

pub fn random<F: Field, R: rand::Rng + ?Sized>(field: &F, rng: &mut R) -> AlbertElement<F::Elem> {
    AlbertElement::from_coords((0..DIM).map(|_| field.random(rng)).collect()).expect("length 27")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{seeded_rng, PrimeField, Rational, Rationals};

    type A = AlbertElement<Rational>;

    /// Hand-expanded square, used as an independent check of the matrix
    /// route through `jordan`.
    fn square_by_formula<S: Scalar>(x: &AlbertElement<S>) -> AlbertElement<S> {
        let [s1, s2, s3] = x.s.clone();
        let [x1, x2, x3] = x.x.clone();
        let (n1, n2, n3) = (x1.norm(), x2.norm(), x3.norm());
        let d = [
            s1.clone() * &s1 + &n2 + &n3,
            s2.clone() * &s2 + &n1 + &n3,
            s3.clone() * &s3 + &n1 + &n2,
        ];
        // (2,3) entry
        let y1 = &x1.scale(&(s2.clone() + &s3)) + &(&x3.conj() * &x2.conj());
        // (3,1) entry
        let y2 = &x2.scale(&(s1.clone() + &s3)) + &(&x1.conj() * &x3.conj());
        // (1,2) entry
        let y3 = &x3.scale(&(s1.clone() + &s2)) + &(&x2.conj() * &x1.conj());
        AlbertElement { s: d, x: [y1, y2, y3] }
    }

    fn rand_q(seed: u64, n: usize) -> Vec<A> {
        let mut rng = seeded_rng(seed);
        (0..n).map(|_| random(&Rationals, &mut rng)).collect()
    }

    #[test]
    fn coordinates_round_trip() {
        for x in rand_q(1, 20) {
            assert_eq!(A::from_coords(x.coords()).unwrap(), x);
            assert_eq!(A::from_hermitian(&x.to_matrix()).unwrap(), x);
        }
        assert_eq!(A::from_coords(vec![Rationals.zero(); 26]), Err(AlbertError::BadLength(26)));
        assert_eq!(A::idempotent(&Rationals, 4), Err(AlbertError::BadIndex(4)));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = OctMat3::identity(&Rationals);
        m.0[0][1] = Octonion::basis(&Rationals, 2);
        assert_eq!(A::from_hermitian(&m), Err(AlbertError::NotHermitian));
    }

    #[test]
    fn square_matches_formula() {
        for x in rand_q(2, 100) {
            assert_eq!(x.square(), square_by_formula(&x));
        }
    }

    #[test]
    fn identity_and_idempotents() {
        let f = Rationals;
        let e = A::identity(&f);
        assert_eq!(e.det(), f.one());
        for x in rand_q(3, 20) {
            assert_eq!(e.jordan(&x), x);
        }
        let es: Vec<A> = (1..=3).map(|i| A::idempotent(&f, i).unwrap()).collect();
        for i in 0..3 {
            for j in 0..3 {
                let p = es[i].jordan(&es[j]);
                assert_eq!(p, if i == j { es[i].clone() } else { A::zero(&f) });
            }
        }
        // (a)_i is killed by E_i and halved by the other two idempotents
        let a = Octonion::from_ints(&f, [1, 2, -1, 3, 0, 1, 2, 5]);
        for i in 1..=3 {
            let ai = A::off_diagonal(i, a.clone()).unwrap();
            for j in 1..=3 {
                let p = ai.jordan(&es[j - 1]);
                let expect = if i == j { A::zero(&f) } else { ai.scale(&f.half()) };
                assert_eq!(p, expect, "({i}) o E{j}");
            }
        }
    }

    #[test]
    fn cross_product_identities() {
        let f = Rationals;
        let e = A::identity(&f);
        assert_eq!(e.cross(&e), e);
        let xs = rand_q(4, 3 * 60);
        let three = f.from_i64(3);
        let four = f.from_i64(4);
        for c in xs.chunks(3) {
            let (x, y, z) = (&c[0], &c[1], &c[2]);
            // the defining property of the cross product
            assert_eq!(x.cross(y).bilinear(z), three.clone() * A::trilinear_d(x, y, z));
            assert_eq!(A::trilinear_d(x, x, x), x.det());
            assert_eq!(x.bilinear(y), x.jordan(y).trace());
            let xx = x.cross(x);
            let d = x.det();
            assert_eq!(x.jordan(&xx), e.scale(&d));
            assert_eq!(xx.cross(&xx), x.scale(&d));
            // 4 x(y(xx)) = det(x) y + <x,y> xx
            let lhs = x.cross(&y.cross(&xx)).scale(&four);
            assert_eq!(lhs, &y.scale(&d) + &xx.scale(&x.bilinear(y)));
            // 4 (xx)(xy) = det(x) y + 3D(x,x,y) x
            let lhs = xx.cross(&x.cross(y)).scale(&four);
            let dxxy = three.clone() * A::trilinear_d(x, x, y);
            assert_eq!(lhs, &y.scale(&d) + &x.scale(&dxxy));
            // 4 (xy)(xy) = -2 (xx)(yy) + 3D(x,y,y) x + 3D(x,x,y) y
            let xy = x.cross(y);
            let lhs = xy.cross(&xy).scale(&four);
            let yy = y.cross(y);
            let dxyy = three.clone() * A::trilinear_d(x, y, y);
            let rhs = &(&xx.cross(&yy).scale(&f.from_i64(-2)) + &x.scale(&dxyy)) + &y.scale(&dxxy);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn cubic_identity_over_f7() {
        // X^3 - Tr(X) X^2 + S(X) X - det(X) e = 0 with S = <X x X, e>
        let f = PrimeField::new(7).unwrap();
        let mut rng = seeded_rng(5);
        for _ in 0..100 {
            let x = random(&f, &mut rng);
            let e = AlbertElement::identity(&f);
            let x2 = x.square();
            let x3 = x2.jordan(&x);
            let sx = x.cross(&x).bilinear(&e);
            let r = &(&(&x3 - &x2.scale(&x.trace())) + &x.scale(&sx)) - &e.scale(&x.det());
            assert!(r.is_zero());
        }
    }

    #[test]
    fn gram_matches_bilinear() {
        let g = bilinear_gram(&Rationals);
        let xs = rand_q(6, 10);
        for c in xs.chunks(2) {
            let gy = g.mul_vec(&c[1].coords()).unwrap();
            let v = c[0].coords().iter().zip(&gy).fold(Rationals.zero(), |s, (a, b)| s + a.clone() * b);
            assert_eq!(v, c[0].bilinear(&c[1]));
        }
    }
}
