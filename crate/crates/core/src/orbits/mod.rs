//! Rational orbits of semistable points.
//!
//! A semistable `x` is classified by the splitting type of `F_x`: three
//! rational roots, one rational root and an irreducible quadratic factor, or
//! no rational root. The quadratic factor contributes its discriminant
//! square class; an irreducible cubic contributes its field. Explicit
//! reductions to normal forms live in [`reduce`].

pub mod cubic_fields;
pub(crate) mod poly;
mod reduce;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::albert::AlbertElement;
use crate::field::{Field, Fp, Mat, PrimeField, Rational, Rationals, Scalar};
use crate::group::{random_element, GElement, GroupError};
use crate::octonion::OctonionError;
use crate::pvs::{act, f_x, is_semistable, BinaryCubic, PairElement};

pub use cubic_fields::{cubic_field_isomorphic, IntCubic};
pub use reduce::{
    canonical_irreducible_shape, canonical_rank_deficient_shape, reduce, reduce_irreducible, reduce_rank_deficient,
    Branch, ReduceOptions, ReductionTrace, TraceStep,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbitError {
    #[error("point is not semistable (discriminant vanishes)")]
    NotSemistable,
    #[error("binary cubic is degenerate (discriminant vanishes)")]
    Degenerate,
    #[error("F_x has a rational root; the irreducible reduction does not apply")]
    HasRationalRoot,
    #[error("det(x1) != 0; the rank-deficient reduction does not apply")]
    FullRank,
    #[error("g does not fix x")]
    NotInStabilizer,
    #[error("F_x does not have three rational roots")]
    IrrationalRoots,
    #[error("step {step}: {reason}")]
    Step { step: String, reason: String },
    #[error("step {step}: search exhausted its budget of {budget}")]
    SearchExhausted { step: String, budget: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl From<OctonionError> for OrbitError {
    fn from(e: OctonionError) -> Self {
        OrbitError::Step { step: "octonion".into(), reason: e.to_string() }
    }
}

/// A point `(v1 : v2)` of the projective line, normalized to `(t : 1)` or
/// `(1 : 0)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct P1Point<S: Scalar> {
    pub v1: S,
    pub v2: S,
}

impl<S: Scalar> P1Point<S> {
    pub fn new(v1: S, v2: S) -> Option<Self> {
        if v2.is_zero() {
            if v1.is_zero() {
                return None;
            }
            let f = v1.field();
            return Some(P1Point { v1: f.one(), v2: f.zero() });
        }
        let t = v1 / &v2;
        let one = t.field().one();
        Some(P1Point { v1: t, v2: one })
    }

    pub fn is_infinite(&self) -> bool {
        self.v2.is_zero()
    }

    /// `(v1, v2) g` as a row vector, renormalized.
    pub fn times(&self, g: &Mat<S>) -> Self {
        let a = self.v1.clone() * &g[(0, 0)] + self.v2.clone() * &g[(1, 0)];
        let b = self.v1.clone() * &g[(0, 1)] + self.v2.clone() * &g[(1, 1)];
        P1Point::new(a, b).expect("g is invertible")
    }
}

impl<S: Scalar> fmt::Display for P1Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.v1, self.v2)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OrbitKind {
    Split3,
    OnePlusQuad,
    Cubic,
}

impl OrbitKind {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitKind::Split3 => "split",
            OrbitKind::OnePlusQuad => "mixed",
            OrbitKind::Cubic => "cubic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "split" => Some(OrbitKind::Split3),
            "mixed" => Some(OrbitKind::OnePlusQuad),
            "cubic" => Some(OrbitKind::Cubic),
            _ => None,
        }
    }

    pub const ALL: [OrbitKind; 3] = [OrbitKind::Split3, OrbitKind::OnePlusQuad, OrbitKind::Cubic];
}

/// Square class of the discriminant of the quadratic factor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SquareClass {
    /// A squarefree integer (up to the trial division limit of
    /// [`poly::squarefree_part`]).
    Rational(BigInt),
    /// Over `F_p` an irreducible quadratic always has nonsquare discriminant.
    FiniteNonSquare,
}

/// The cubic algebra attached to an irreducible `F_x`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CubicInvariant {
    /// Primitive integer coefficients `[c0, c1, c2, c3]` of
    /// `F_x(t, 1)`, with `c3 > 0`.
    Rational(IntCubic),
    /// `F_p` has a unique cubic extension.
    Finite,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum OrbitClass {
    Split3,
    OnePlusQuad(SquareClass),
    Cubic(CubicInvariant),
}

impl OrbitClass {
    pub fn kind(&self) -> OrbitKind {
        match self {
            OrbitClass::Split3 => OrbitKind::Split3,
            OrbitClass::OnePlusQuad(_) => OrbitKind::OnePlusQuad,
            OrbitClass::Cubic(_) => OrbitKind::Cubic,
        }
    }

    /// Equality of the underlying etale cubic algebras.
    pub fn same_class(&self, other: &Self) -> bool {
        match (self, other) {
            (OrbitClass::Split3, OrbitClass::Split3) => true,
            (OrbitClass::OnePlusQuad(a), OrbitClass::OnePlusQuad(b)) => match (a, b) {
                (SquareClass::Rational(x), SquareClass::Rational(y)) => poly::is_square_int(&(x * y)),
                (SquareClass::FiniteNonSquare, SquareClass::FiniteNonSquare) => true,
                _ => false,
            },
            (OrbitClass::Cubic(a), OrbitClass::Cubic(b)) => match (a, b) {
                (CubicInvariant::Rational(f), CubicInvariant::Rational(g)) => cubic_field_isomorphic(f, g),
                (CubicInvariant::Finite, CubicInvariant::Finite) => true,
                _ => false,
            },
            _ => false,
        }
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitClass::Split3 => write!(f, "split"),
            OrbitClass::OnePlusQuad(SquareClass::Rational(d)) => write!(f, "mixed(d={d})"),
            OrbitClass::OnePlusQuad(SquareClass::FiniteNonSquare) => write!(f, "mixed(nonsquare)"),
            OrbitClass::Cubic(CubicInvariant::Rational(c)) => write!(f, "cubic({})", format_int_cubic(c)),
            OrbitClass::Cubic(CubicInvariant::Finite) => write!(f, "cubic"),
        }
    }
}

/// `c3 t^3 + c2 t^2 + c1 t + c0` in the usual notation, e.g. `t^3 - 2`.
pub fn format_int_cubic(c: &IntCubic) -> String {
    let mut out = String::new();
    for k in (0..4).rev() {
        let a = &c[k];
        if a.is_zero() {
            continue;
        }
        let neg = a.is_negative();
        let mag = a.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match k {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{k}"),
        };
        if k == 0 || !mag.is_one() {
            out.push_str(&mag.to_string());
        }
        out.push_str(&mono);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Field-specific parts of the classification.
pub trait OrbitField: Field {
    /// All roots of `f` in `P^1(k)`: finite roots `(t, 1)` in ascending
    /// order, then `(1, 0)` if it is a root.
    fn projective_roots(f: &BinaryCubic<Self::Elem>) -> Vec<P1Point<Self::Elem>>;
    fn square_class(d: &Self::Elem) -> SquareClass;
    /// Only called when `f` has no root in `P^1(k)`, so `a != 0`.
    fn cubic_invariant(f: &BinaryCubic<Self::Elem>) -> CubicInvariant;
    /// A separable binary cubic of the given splitting type with small,
    /// random parameters.
    fn random_cubic<R: Rng + ?Sized>(&self, kind: OrbitKind, rng: &mut R) -> BinaryCubic<Self::Elem>;
    /// A binary cubic whose class is `class`.
    fn class_cubic(&self, class: &OrbitClass) -> Result<BinaryCubic<Self::Elem>, OrbitError>;
}

fn to_integer_cubic(f: &BinaryCubic<Rational>) -> [BigInt; 4] {
    let cs = f.coeffs();
    let l = cs.iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denom()));
    // little-endian in t = v1 / v2
    let mut out = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
    for (k, c) in cs.iter().enumerate() {
        out[3 - k] = c.numer() * (&l / c.denom());
    }
    out
}

/// Product of binary forms given by coefficients of `v1^(n-i) v2^i`.
fn form_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let f = a[0].field();
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y;
        }
    }
    out
}

/// The linear form vanishing at `(p : q)`: `q v1 - p v2`.
fn linear_form<S: Scalar>(p: &S, q: &S) -> Vec<S> {
    vec![q.clone(), -p.clone()]
}

fn cubic_from_form<S: Scalar>(c: Vec<S>) -> BinaryCubic<S> {
    let [a, b, cc, d]: [S; 4] = c.try_into().expect("cubic form");
    BinaryCubic::new(a, b, cc, d)
}

impl OrbitField for Rationals {
    fn projective_roots(f: &BinaryCubic<Rational>) -> Vec<P1Point<Rational>> {
        let z = to_integer_cubic(f);
        let mut out: Vec<P1Point<Rational>> =
            poly::rational_roots(&z).into_iter().map(|t| P1Point { v1: t, v2: Rational::one() }).collect();
        if f.a.is_zero() {
            out.push(P1Point { v1: Rational::one(), v2: Rational::zero() });
        }
        out
    }

    fn square_class(d: &Rational) -> SquareClass {
        SquareClass::Rational(poly::squarefree_part(&(d.numer() * d.denom())))
    }

    fn cubic_invariant(f: &BinaryCubic<Rational>) -> CubicInvariant {
        let v = poly::z_primitive(&to_integer_cubic(f));
        CubicInvariant::Rational([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
    }

    fn random_cubic<R: Rng + ?Sized>(&self, kind: OrbitKind, rng: &mut R) -> BinaryCubic<Rational> {
        let q = |n: i64| Rational::from_int(n);
        loop {
            let scale = q(*[1, -1, 2, -3].get(rng.gen_range(0..4)).expect("in range"));
            let form = match kind {
                OrbitKind::Split3 => {
                    let pts: Vec<(i64, i64)> = (0..3).map(|_| (rng.gen_range(-4..=4), rng.gen_range(0..=3))).collect();
                    pts.iter().fold(vec![scale.clone()], |acc, (p, qq)| form_mul(&acc, &linear_form(&q(*p), &q(*qq))))
                }
                OrbitKind::OnePlusQuad => {
                    let (p, qq) = (rng.gen_range(-4..=4), rng.gen_range(0..=3));
                    let quad: Vec<Rational> = (0..3).map(|_| q(rng.gen_range(-5..=5))).collect();
                    let disc = quad[1].clone() * &quad[1] - q(4) * &quad[0] * &quad[2];
                    if disc.is_zero() || is_rational_square(&disc) {
                        continue;
                    }
                    form_mul(&form_mul(&[scale], &linear_form(&q(p), &q(qq))), &quad)
                }
                OrbitKind::Cubic => {
                    let mut c: Vec<Rational> = (0..4).map(|_| q(rng.gen_range(-6..=6))).collect();
                    c[0] = q(rng.gen_range(1..=3));
                    c
                }
            };
            let f = cubic_from_form(form);
            if f.disc().is_zero() {
                continue;
            }
            let n = Self::projective_roots(&f).len();
            let want = match kind {
                OrbitKind::Split3 => 3,
                OrbitKind::OnePlusQuad => 1,
                OrbitKind::Cubic => 0,
            };
            if n == want {
                return f;
            }
        }
    }

    fn class_cubic(&self, class: &OrbitClass) -> Result<BinaryCubic<Rational>, OrbitError> {
        let q = Rational::from_bigint;
        Ok(match class {
            OrbitClass::Split3 => BinaryCubic::from_ints(self, [0, 1, -1, 0]),
            // v2 (v1^2 - d v2^2)
            OrbitClass::OnePlusQuad(SquareClass::Rational(d)) => {
                if poly::is_square_int(d) {
                    return Err(OrbitError::Degenerate);
                }
                BinaryCubic::new(Rational::zero(), Rational::one(), Rational::zero(), -q(d.clone()))
            }
            OrbitClass::Cubic(CubicInvariant::Rational(c)) => {
                let f = BinaryCubic::new(q(c[3].clone()), q(c[2].clone()), q(c[1].clone()), q(c[0].clone()));
                if f.disc().is_zero() || !Self::projective_roots(&f).is_empty() {
                    return Err(OrbitError::Degenerate);
                }
                f
            }
            _ => return Err(OrbitError::Degenerate),
        })
    }
}

fn is_rational_square(q: &Rational) -> bool {
    poly::is_square_int(&q.numer()) && poly::is_square_int(&q.denom())
}

impl OrbitField for PrimeField {
    fn projective_roots(f: &BinaryCubic<Fp>) -> Vec<P1Point<Fp>> {
        let field = f.field();
        let one = field.one();
        let mut out: Vec<P1Point<Fp>> =
            field.elements().filter(|t| f.eval(t, &one).is_zero()).map(|t| P1Point { v1: t, v2: one }).collect();
        if f.a.is_zero() {
            out.push(P1Point { v1: one, v2: field.zero() });
        }
        out
    }

    fn square_class(_d: &Fp) -> SquareClass {
        SquareClass::FiniteNonSquare
    }

    fn cubic_invariant(_f: &BinaryCubic<Fp>) -> CubicInvariant {
        CubicInvariant::Finite
    }

    fn random_cubic<R: Rng + ?Sized>(&self, kind: OrbitKind, rng: &mut R) -> BinaryCubic<Fp> {
        let want = match kind {
            OrbitKind::Split3 => 3,
            OrbitKind::OnePlusQuad => 1,
            OrbitKind::Cubic => 0,
        };
        loop {
            let f = match kind {
                OrbitKind::Split3 => {
                    let pts: Vec<(Fp, Fp)> = (0..3)
                        .map(|_| {
                            if rng.gen_range(0..self.modulus() + 1) == 0 {
                                (self.one(), self.zero())
                            } else {
                                (self.random(rng), self.one())
                            }
                        })
                        .collect();
                    let scale = self.random_nonzero(rng);
                    cubic_from_form(pts.iter().fold(vec![scale], |acc, (p, q)| form_mul(&acc, &linear_form(p, q))))
                }
                _ => BinaryCubic::new(self.random(rng), self.random(rng), self.random(rng), self.random(rng)),
            };
            if !f.disc().is_zero() && Self::projective_roots(&f).len() == want {
                return f;
            }
        }
    }

    fn class_cubic(&self, class: &OrbitClass) -> Result<BinaryCubic<Fp>, OrbitError> {
        let mut rng = crate::field::seeded_rng(self.modulus());
        match class {
            OrbitClass::Split3 => Ok(BinaryCubic::from_ints(self, [0, 1, -1, 0])),
            OrbitClass::OnePlusQuad(SquareClass::FiniteNonSquare) => {
                let n = self.elements().find(|t| !self.is_square(t)).expect("p is odd");
                Ok(BinaryCubic::new(self.zero(), self.one(), self.zero(), -n))
            }
            OrbitClass::Cubic(CubicInvariant::Finite) => Ok(self.random_cubic(OrbitKind::Cubic, &mut rng)),
            _ => Err(OrbitError::Degenerate),
        }
    }
}

/// Roots in `P^1(k)` and the class of a separable binary cubic.
pub fn factor_binary_cubic<F: OrbitField>(
    f: &BinaryCubic<F::Elem>,
) -> Result<(Vec<P1Point<F::Elem>>, OrbitClass), OrbitError> {
    let d = f.disc();
    if d.is_zero() {
        return Err(OrbitError::Degenerate);
    }
    let roots = F::projective_roots(f);
    let class = match roots.len() {
        3 => OrbitClass::Split3,
        1 => OrbitClass::OnePlusQuad(F::square_class(&d)),
        0 => OrbitClass::Cubic(F::cubic_invariant(f)),
        n => unreachable!("a separable cubic has 0, 1 or 3 roots, got {n}"),
    };
    Ok((roots, class))
}

pub fn classify<F: OrbitField>(x: &PairElement<F::Elem>) -> Result<OrbitClass, OrbitError> {
    factor_binary_cubic::<F>(&f_x(x)).map(|(_, c)| c).map_err(|_| OrbitError::NotSemistable)
}

pub fn same_orbit<F: OrbitField>(x: &PairElement<F::Elem>, y: &PairElement<F::Elem>) -> Result<bool, OrbitError> {
    Ok(classify::<F>(x)?.same_class(&classify::<F>(y)?))
}

pub fn zero_set_rational<F: OrbitField>(x: &PairElement<F::Elem>) -> Vec<P1Point<F::Elem>> {
    F::projective_roots(&f_x(x))
}

/// A permutation of `{1, 2, 3}`, stored zero-based; `compose` follows
/// `(s t)(i) = t(s(i))`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Perm3(pub [usize; 3]);

impl Perm3 {
    pub fn identity() -> Self {
        Perm3([0, 1, 2])
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn compose(&self, other: &Self) -> Self {
        Perm3([other.0[self.0[0]], other.0[self.0[1]], other.0[self.0[2]]])
    }

    /// One-based transposition `(i j)`.
    pub fn transposition(i: usize, j: usize) -> Self {
        let mut p = [0, 1, 2];
        p.swap(i - 1, j - 1);
        Perm3(p)
    }
}

impl fmt::Display for Perm3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.0;
        let moved: Vec<usize> = (0..3).filter(|&i| p[i] != i).collect();
        match moved.len() {
            0 => write!(f, "()"),
            2 => write!(f, "({} {})", moved[0] + 1, moved[1] + 1),
            _ => write!(f, "(1 {} {})", p[0] + 1, p[p[0]] + 1),
        }
    }
}

/// The permutation of `Zero(x)` induced by `g` in the stabilizer of `x`:
/// `q_i g2 = q_sigma(i)`.
pub fn eta_x<F: OrbitField>(x: &PairElement<F::Elem>, g: &GElement<F::Elem>) -> Result<Perm3, OrbitError> {
    if act(g, x) != *x {
        return Err(OrbitError::NotInStabilizer);
    }
    let roots = zero_set_rational::<F>(x);
    if roots.len() != 3 {
        return Err(OrbitError::IrrationalRoots);
    }
    let mut sigma = [0; 3];
    for (i, q) in roots.iter().enumerate() {
        let image = q.times(&g.g2);
        sigma[i] = roots.iter().position(|r| *r == image).expect("g permutes the roots");
    }
    Ok(Perm3(sigma))
}

/// `(Lambda, [[0,1,0],[1,a,b],[0,b,c]])`, whose cubic form is
/// `(2, -a, 2b, -c)`.
pub fn canonical_pair<S: Scalar>(a: &S, b: &S, c: &S) -> PairElement<S> {
    let f = a.field();
    let lambda = lambda(&f);
    let mut x2 = AlbertElement::zero(&f);
    x2.s = [f.zero(), a.clone(), c.clone()];
    x2.x[0] = crate::octonion::Octonion::scalar(b.clone());
    x2.x[2] = crate::octonion::Octonion::one(&f);
    PairElement::new(lambda, x2)
}

/// `Lambda = E13 + E31 - 2 E22`.
pub fn lambda<F: Field>(f: &F) -> AlbertElement<F::Elem> {
    let mut l = AlbertElement::zero(f);
    l.s[1] = f.from_i64(-2);
    l.x[1] = crate::octonion::Octonion::one(f);
    l
}

/// A point whose cubic form is a nonzero multiple of `f(v g2)` for some
/// `g2`, built from the canonical pair.
pub fn representative_for_cubic<S: Scalar>(f: &BinaryCubic<S>) -> Result<PairElement<S>, OrbitError> {
    if f.disc().is_zero() {
        return Err(OrbitError::Degenerate);
    }
    let field = f.field();
    let mut f = f.clone();
    if f.a.is_zero() {
        // move a non-root to (1, 0)
        let small = field.small_values(3);
        let (p, q) = small
            .iter()
            .flat_map(|p| small.iter().map(move |q| (p.clone(), q.clone())))
            .find(|(p, q)| !f.eval(p, q).is_zero())
            .expect("a separable cubic has at most three roots");
        let g2 = if p.is_zero() {
            Mat::from_rows(&field, vec![vec![p, q], vec![field.one(), field.zero()]])
        } else {
            Mat::from_rows(&field, vec![vec![p, q], vec![field.zero(), field.one()]])
        }
        .expect("2x2");
        f = f.substitute(&g2);
    }
    let s = field.from_i64(2) / &f.a;
    let f = f.scale(&s);
    let (a, b, c) = (-f.b.clone(), f.c.clone() * field.half(), -f.d.clone());
    Ok(canonical_pair(&a, &b, &c))
}

/// A representative of `class`, moved by a random word of `len` generators.
pub fn random_semistable<F: OrbitField, R: Rng + ?Sized>(
    field: &F,
    class: &OrbitClass,
    rng: &mut R,
    len: usize,
) -> Result<PairElement<F::Elem>, OrbitError> {
    let x = representative_for_cubic(&field.class_cubic(class)?)?;
    Ok(act(&random_element(field, rng, len), &x))
}

/// A random point of the given kind: a random cubic of that splitting type,
/// its representative, and a random word of `len` generators.
pub fn random_of_kind<F: OrbitField, R: Rng + ?Sized>(
    field: &F,
    kind: OrbitKind,
    rng: &mut R,
    len: usize,
) -> PairElement<F::Elem> {
    let f = field.random_cubic(kind, rng);
    let x = representative_for_cubic(&f).expect("random cubics are separable");
    let y = act(&random_element(field, rng, len), &x);
    debug_assert!(is_semistable(&y));
    y
}
