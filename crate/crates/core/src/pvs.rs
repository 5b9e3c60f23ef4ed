//! The prehomogeneous vector space `V = J (+) J` under `G = GE6 x GL2`.
//!
//! `(g1, g2)` acts by `x1' = a g1 x1 + b g1 x2`, `x2' = c g1 x1 + d g1 x2` for
//! `g2 = [[a, b], [c, d]]`. The attached binary cubic form is
//! `F_x(v1, v2) = det(v1 x1 + v2 x2)`.

use crate::albert::{AlbertElement, DIM};
use crate::field::{Field, Mat, Scalar};
use crate::group::GElement;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PvsError {
    #[error("isotope parameter m has det(m) = 0")]
    SingularIsotope,
    #[error("x1, x2, m(x) are linearly dependent")]
    DegenerateSubalgebra,
    #[error("span of x1, x2, m(x) is not closed under the isotope product")]
    NotClosed,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PairElement<S: Scalar> {
    pub x1: AlbertElement<S>,
    pub x2: AlbertElement<S>,
}

impl<S: Scalar> PairElement<S> {
    pub fn new(x1: AlbertElement<S>, x2: AlbertElement<S>) -> Self {
        PairElement { x1, x2 }
    }

    pub fn field(&self) -> S::Field {
        self.x1.field()
    }

    pub fn coords(&self) -> Vec<S> {
        let mut v = self.x1.coords();
        v.extend(self.x2.coords());
        v
    }
}

/// `a v1^3 + b v1^2 v2 + c v1 v2^2 + d v2^3`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryCubic<S: Scalar> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> BinaryCubic<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        BinaryCubic { a, b, c, d }
    }

    pub fn from_ints<F: Field<Elem = S>>(field: &F, c: [i64; 4]) -> Self {
        let [a, b, cc, d] = c.map(|x| field.from_i64(x));
        BinaryCubic { a, b, c: cc, d }
    }

    pub fn coeffs(&self) -> [S; 4] {
        [self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }

    pub fn field(&self) -> S::Field {
        self.a.field()
    }

    pub fn eval(&self, v1: &S, v2: &S) -> S {
        let (v11, v22) = (v1.clone() * v1, v2.clone() * v2);
        self.a.clone() * &v11 * v1 + self.b.clone() * &v11 * v2 + self.c.clone() * v1 * &v22 + self.d.clone() * &v22 * v2
    }

    /// `18abcd - 4b^3 d + b^2 c^2 - 4 a c^3 - 27 a^2 d^2`.
    pub fn disc(&self) -> S {
        let f = self.field();
        let n = |k: i64| f.from_i64(k);
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        n(18) * a * b * c * d - n(4) * b * b * b * d + b.clone() * b * c * c - n(4) * a * c * c * c - n(27) * a * a * d * d
    }

    /// `F(v g)` for a 2x2 matrix `g`, with `v` a row vector.
    pub fn substitute(&self, g: &Mat<S>) -> Self {
        let f = self.field();
        let (p, q, r, s) = (g[(0, 0)].clone(), g[(0, 1)].clone(), g[(1, 0)].clone(), g[(1, 1)].clone());
        // (v1, v2) g = (p v1 + r v2, q v1 + s v2); expand by interpolation-free
        // polynomial multiplication on coefficient vectors in (v1, v2).
        let l1 = [p, r];
        let l2 = [q, s];
        let mul = |x: &[S], y: &[S; 2]| -> Vec<S> {
            let mut out = vec![f.zero(); x.len() + 1];
            for (i, xi) in x.iter().enumerate() {
                out[i] = out[i].clone() + xi.clone() * &y[0];
                out[i + 1] = out[i + 1].clone() + xi.clone() * &y[1];
            }
            out
        };
        let one = vec![f.one()];
        let terms = [
            (self.a.clone(), mul(&mul(&mul(&one, &l1), &l1), &l1)),
            (self.b.clone(), mul(&mul(&mul(&one, &l1), &l1), &l2)),
            (self.c.clone(), mul(&mul(&mul(&one, &l1), &l2), &l2)),
            (self.d.clone(), mul(&mul(&mul(&one, &l2), &l2), &l2)),
        ];
        let mut out = vec![f.zero(); 4];
        for (k, poly) in terms {
            for (o, c) in out.iter_mut().zip(poly) {
                *o = o.clone() + k.clone() * &c;
            }
        }
        BinaryCubic::new(out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone())
    }

    pub fn scale(&self, t: &S) -> Self {
        BinaryCubic::new(self.a.clone() * t, self.b.clone() * t, self.c.clone() * t, self.d.clone() * t)
    }
}

/// The action of `G` on `V`.
pub fn act<S: Scalar>(g: &GElement<S>, x: &PairElement<S>) -> PairElement<S> {
    let y1 = g.g1.apply(&x.x1);
    let y2 = g.g1.apply(&x.x2);
    let m = &g.g2;
    PairElement {
        x1: &y1.scale(&m[(0, 0)]) + &y2.scale(&m[(0, 1)]),
        x2: &y1.scale(&m[(1, 0)]) + &y2.scale(&m[(1, 1)]),
    }
}

/// `F_x = (det x1, 3D(x1,x1,x2), 3D(x1,x2,x2), det x2)`.
pub fn f_x<S: Scalar>(x: &PairElement<S>) -> BinaryCubic<S> {
    BinaryCubic {
        a: x.x1.det(),
        b: x.x1.cross(&x.x1).bilinear(&x.x2),
        c: x.x2.cross(&x.x2).bilinear(&x.x1),
        d: x.x2.det(),
    }
}

/// The relative invariant `Delta(x) = disc(F_x)`.
pub fn disc<S: Scalar>(x: &PairElement<S>) -> S {
    f_x(x).disc()
}

pub fn is_semistable<S: Scalar>(x: &PairElement<S>) -> bool {
    !disc(x).is_zero()
}

/// The base point `w = (diag(1,-1,0), diag(0,1,-1))`.
pub fn w<F: Field>(field: &F) -> PairElement<F::Elem> {
    PairElement { x1: AlbertElement::diag_ints(field, [1, -1, 0]), x2: AlbertElement::diag_ints(field, [0, 1, -1]) }
}

/// The equivariant map
/// `m(x) = 6 (x1 x x1) x (x2 x x2) - 3D(x1,x2,x2) x1 - 3D(x1,x1,x2) x2`,
/// satisfying `m(g x) = c(g1) det(g2)^2 g1(m(x))`.
pub fn equivariant_m<S: Scalar>(x: &PairElement<S>) -> AlbertElement<S> {
    let f = x.field();
    let f3 = f_x(x);
    let a = x.x1.cross(&x.x1);
    let b = x.x2.cross(&x.x2);
    &(&a.cross(&b).scale(&f.from_i64(6)) - &x.x1.scale(&f3.c)) - &x.x2.scale(&f3.b)
}

/// The isotope `J^(m)` of the Albert algebra at an element with `det m != 0`.
#[derive(Clone, Debug)]
pub struct Isotope<S: Scalar> {
    m: AlbertElement<S>,
    det_inv: S,
}

impl<S: Scalar> Isotope<S> {
    pub fn new(m: AlbertElement<S>) -> Result<Self, PvsError> {
        let det_inv = m.det().inv().ok_or(PvsError::SingularIsotope)?;
        Ok(Isotope { m, det_inv })
    }

    pub fn base(&self) -> &AlbertElement<S> {
        &self.m
    }

    fn d(&self, x: &AlbertElement<S>, y: &AlbertElement<S>, z: &AlbertElement<S>) -> S {
        AlbertElement::trilinear_d(x, y, z)
    }

    /// `<x,y>_m = -6 det(m)^-1 D(x,y,m) + 9 det(m)^-2 D(x,m,m) D(y,m,m)`.
    pub fn bilinear(&self, x: &AlbertElement<S>, y: &AlbertElement<S>) -> S {
        let f = self.m.field();
        let m = &self.m;
        f.from_i64(-6) * &self.det_inv * &self.d(x, y, m)
            + f.from_i64(9) * &self.det_inv * &self.det_inv * &self.d(x, m, m) * &self.d(y, m, m)
    }

    /// `x o_m y = 4 det(m)^-1 (x x m) x (y x m) + (<x,y>_m - <x,m>_m <y,m>_m) m / 2`.
    pub fn product(&self, x: &AlbertElement<S>, y: &AlbertElement<S>) -> AlbertElement<S> {
        let f = self.m.field();
        let m = &self.m;
        let main = x.cross(m).cross(&y.cross(m)).scale(&(f.from_i64(4) * &self.det_inv));
        let s = (self.bilinear(x, y) - self.bilinear(x, m) * &self.bilinear(y, m)) * f.half();
        &main + &m.scale(&s)
    }

    pub fn det(&self, x: &AlbertElement<S>) -> S {
        self.det_inv.clone() * &x.det()
    }
}

/// `t(x) = span(x1, x2, m(x))` with its product from the isotope at `m(x)`.
#[derive(Clone, Debug)]
pub struct CubicSubalgebra<S: Scalar> {
    pub basis: [AlbertElement<S>; 3],
    /// `constants[i][j][k]`: coefficient of `basis[k]` in `basis[i] o_m basis[j]`.
    pub constants: Vec<Vec<Vec<S>>>,
}

pub fn t_x<S: Scalar>(x: &PairElement<S>) -> Result<CubicSubalgebra<S>, PvsError> {
    let f = x.field();
    let m = equivariant_m(x);
    let iso = Isotope::new(m.clone())?;
    let basis = [x.x1.clone(), x.x2.clone(), m];
    let bmat = Mat::from_columns(&f, &basis.iter().map(|b| b.coords()).collect::<Vec<_>>()).expect("27x3");
    if bmat.rank() < 3 {
        return Err(PvsError::DegenerateSubalgebra);
    }
    let mut constants = vec![vec![vec![]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let p = iso.product(&basis[i], &basis[j]);
            let rhs = Mat::from_columns(&f, &[p.coords()]).expect("27x1");
            let sol = bmat.solve(&rhs).map_err(|_| PvsError::NotClosed)?;
            constants[i][j] = sol.column(0);
        }
    }
    debug_assert_eq!(bmat.rows(), DIM);
    Ok(CubicSubalgebra { basis, constants })
}
