//! Reduction of semistable points to normal forms, recording every group
//! element used.
//!
//! Each step computes its parameter from the current point, applies the
//! element and checks the entries it was meant to produce. The checks are
//! cheap next to the 27x27 actions and make a wrong parameter an error
//! rather than a silently wrong normal form.

use crate::albert::AlbertElement;
use crate::field::{Field, Mat, Scalar};
use crate::group::{b_i, d_i, n_ij, nu, permutation, rho1, script_d, GElement, GroupElement};
use crate::octonion::{find_isotropic_nonvanishing, find_traceless_pairing, find_with_norm, find_with_trace_norm, Octonion};
use crate::pvs::{act, f_x, is_semistable, PairElement};

use super::{lambda, OrbitError, OrbitField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Candidates tried by each bounded search.
    pub budget: u64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { budget: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    RankDeficient,
    Irreducible,
}

#[derive(Clone, Debug)]
pub struct TraceStep<S: Scalar> {
    pub label: String,
    pub element: GElement<S>,
}

#[derive(Clone, Debug)]
pub struct ReductionTrace<S: Scalar> {
    pub branch: Branch,
    pub input: PairElement<S>,
    pub output: PairElement<S>,
    pub steps: Vec<TraceStep<S>>,
    /// Product of the steps, last step leftmost.
    pub accumulated: GElement<S>,
}

impl<S: Scalar> ReductionTrace<S> {
    /// `act(accumulated, input) = output` and the steps multiply out to
    /// `accumulated`.
    pub fn verify(&self) -> bool {
        let f = self.input.field();
        let replay = self.steps.iter().fold(GElement::identity(&f), |acc, s| s.element.compose(&acc));
        replay == self.accumulated && act(&self.accumulated, &self.input) == self.output
    }

    /// Product of the step multipliers.
    pub fn multiplier_product(&self) -> S {
        let f = self.input.field();
        self.steps.iter().fold(f.one(), |acc, s| acc * s.element.g1.multiplier())
    }
}

struct Reducer<S: Scalar> {
    input: PairElement<S>,
    x: PairElement<S>,
    steps: Vec<TraceStep<S>>,
    acc: GElement<S>,
    budget: u64,
}

fn step_err(step: &str, reason: impl Into<String>) -> OrbitError {
    OrbitError::Step { step: step.into(), reason: reason.into() }
}

fn ensure(cond: bool, step: &str, reason: &str) -> Result<(), OrbitError> {
    if cond {
        Ok(())
    } else {
        Err(step_err(step, format!("post-condition failed: {reason}")))
    }
}

/// The first coordinate basis vector `u` with `tr(u conj(a)) != 0`.
fn basis_pairing<S: Scalar>(a: &Octonion<S>) -> Option<Octonion<S>> {
    let f = a.field();
    let ac = a.conj();
    (0..8).map(|k| Octonion::basis(&f, k)).find(|u| !(u * &ac).trace().is_zero())
}

/// The traceless octonion `(a - conj(a)) / (2 s)`.
fn imaginary_over<S: Scalar>(a: &Octonion<S>, s: &S) -> Octonion<S> {
    let f = s.field();
    let t = f.half() * &s.inv().expect("pivot is nonzero");
    (a - &a.conj()).scale(&t)
}

impl<S: Scalar> Reducer<S> {
    fn new(x: PairElement<S>, opts: &ReduceOptions) -> Self {
        let f = x.field();
        Reducer { input: x.clone(), x, steps: Vec::new(), acc: GElement::identity(&f), budget: opts.budget }
    }

    fn field(&self) -> S::Field {
        self.x.field()
    }

    fn push(&mut self, label: String, g: GElement<S>) {
        self.x = act(&g, &self.x);
        self.acc = g.compose(&self.acc);
        self.steps.push(TraceStep { label, element: g });
    }

    fn push_g1(&mut self, label: String, g1: GroupElement<S>) {
        self.push(label, GElement::from_g1(g1));
    }

    fn push_gl2(&mut self, label: &str, a: S, b: S, c: S, d: S) -> Result<(), OrbitError> {
        let label = format!("{label}: gl2([[{a}, {b}], [{c}, {d}]])");
        let g = GElement::gl2_entries(a, b, c, d)?;
        self.push(label, g);
        Ok(())
    }

    fn finish(self, branch: Branch) -> ReductionTrace<S> {
        ReductionTrace { branch, input: self.input, output: self.x, steps: self.steps, accumulated: self.acc }
    }

    fn permute(&mut self, step: &str, sigma: [usize; 3]) {
        let f = self.field();
        let label = format!("{step}: permute({}, {}, {})", sigma[0] + 1, sigma[1] + 1, sigma[2] + 1);
        self.push_g1(label, permutation(&f, sigma));
    }

    fn n(&mut self, step: &str, i: usize, j: usize, u: &Octonion<S>) -> Result<(), OrbitError> {
        let label = format!("{step}: n_{i}{j}({u})");
        self.push_g1(label, n_ij(i, j, u)?);
        Ok(())
    }

    fn b(&mut self, step: &str, i: usize, u: &Octonion<S>) -> Result<(), OrbitError> {
        let label = format!("{step}: B_{i}({u})");
        self.push_g1(label, b_i(i, u)?);
        Ok(())
    }

    fn d(&mut self, step: &str, i: usize, a: &Octonion<S>) -> Result<(), OrbitError> {
        let label = format!("{step}: d_{i}({a})");
        self.push_g1(label, d_i(i, a)?);
        Ok(())
    }

    /// Brings `x1` to diagonal form with `s1 s2 != 0`, by permutations and
    /// the unipotent elements `n_ij`.
    fn diagonalize_x1(&mut self) -> Result<(), OrbitError> {
        // pivot at (1,1)
        let step = "pivot s11";
        let x1 = self.x.x1.clone();
        if x1.s[0].is_zero() {
            if !x1.s[1].is_zero() {
                self.permute(step, [1, 0, 2]);
            } else if !x1.s[2].is_zero() {
                self.permute(step, [2, 1, 0]);
            } else {
                if x1.x[2].is_zero() {
                    if !x1.x[0].is_zero() {
                        self.permute(step, [1, 2, 0]);
                    } else if !x1.x[1].is_zero() {
                        self.permute(step, [2, 0, 1]);
                    } else {
                        return Err(step_err(step, "x1 = 0"));
                    }
                }
                let x3 = self.x.x1.x[2].clone();
                let u = basis_pairing(&x3).ok_or_else(|| step_err(step, "no pairing vector"))?;
                self.n(step, 1, 2, &u)?;
            }
        }
        ensure(!self.x.x1.s[0].is_zero(), step, "s11 != 0")?;

        let step = "clear row 1 of x1";
        let s1 = self.x.x1.s[0].clone();
        let s1inv = s1.inv().expect("nonzero");
        if !self.x.x1.x[2].is_zero() {
            let u = self.x.x1.x[2].conj().scale(&-s1inv.clone());
            self.n(step, 2, 1, &u)?;
        }
        if !self.x.x1.x[1].is_zero() {
            let u = self.x.x1.x[1].scale(&-s1inv);
            self.n(step, 3, 1, &u)?;
        }
        ensure(self.x.x1.x[1].is_zero() && self.x.x1.x[2].is_zero(), step, "x1 entries (1,2), (1,3) vanish")?;

        let step = "pivot s12";
        let x1 = self.x.x1.clone();
        if x1.s[1].is_zero() {
            if !x1.s[2].is_zero() {
                self.permute(step, [0, 2, 1]);
            } else if !x1.x[0].is_zero() {
                let u = basis_pairing(&x1.x[0]).ok_or_else(|| step_err(step, "no pairing vector"))?;
                self.n(step, 2, 3, &u)?;
            } else {
                return Err(step_err(step, "lower block of x1 vanishes; x is not semistable"));
            }
        }
        ensure(!self.x.x1.s[1].is_zero(), step, "s12 != 0")?;

        let step = "clear (2,3) of x1";
        if !self.x.x1.x[0].is_zero() {
            let s2inv = self.x.x1.s[1].inv().expect("nonzero");
            let u = self.x.x1.x[0].conj().scale(&-s2inv);
            self.n(step, 3, 2, &u)?;
        }
        ensure(self.x.x1.is_diagonal(), step, "x1 diagonal")
    }

    /// Scales the diagonal `x1` to `targets` (entries with target `None` are
    /// left alone) using `d_i` with an element of the needed norm.
    fn rescale(&mut self, step: &str, slot: usize, targets: [Option<S>; 3]) -> Result<(), OrbitError> {
        let f = self.field();
        for (i, t) in targets.iter().enumerate() {
            let Some(t) = t else { continue };
            let cur = if slot == 1 { self.x.x1.s[i].clone() } else { self.x.x2.s[i].clone() };
            let ratio = t.clone() / &cur;
            if ratio.is_one() {
                continue;
            }
            let a = find_with_norm(&f, &ratio);
            self.d(step, i + 1, &a)?;
        }
        Ok(())
    }

    /// Makes the (2,3) entry of `x2` equal to 1 by two elements `D(b)` with
    /// traceless `b`, which fix `Lambda`.
    fn change_oct(&mut self, step: &str) -> Result<(), OrbitError> {
        let f = self.field();
        let y1 = self.x.x2.x[0].clone();
        if y1.is_one() {
            return Ok(());
        }
        if y1.norm().is_zero() {
            return Err(step_err(step, "(2,3) entry of x2 is isotropic"));
        }
        // kernel of tr and tr(y1 .)
        let rows: Vec<Vec<S>> = [Octonion::one(&f), y1.clone()]
            .iter()
            .map(|a| (0..8).map(|k| (a * &Octonion::basis(&f, k)).trace()).collect())
            .collect();
        let kernel = Mat::from_rows(&f, rows).expect("2x8").nullspace();
        let kernel: Vec<Octonion<S>> =
            kernel.into_iter().map(|v| Octonion::from_coords(v).expect("length 8")).collect();
        let beta = kernel
            .iter()
            .find(|b| !b.norm().is_zero())
            .cloned()
            .or_else(|| {
                (0..kernel.len())
                    .flat_map(|i| (i + 1..kernel.len()).map(move |j| (i, j)))
                    .map(|(i, j)| &kernel[i] + &kernel[j])
                    .find(|b| !b.norm().is_zero())
            })
            .ok_or_else(|| step_err(step, "kernel is totally isotropic"))?;
        let bc = beta.conj();
        self.push_g1(format!("{step}: D({bc})"), script_d(&bc)?);
        let z = self.x.x2.x[0].clone();
        ensure(z.trace().is_zero(), step, "tr(y1 beta) = 0")?;
        self.push_g1(format!("{step}: D({z})"), script_d(&z)?);
        ensure(self.x.x2.x[0].is_one(), step, "(2,3) entry of x2 is 1")
    }
}

trait OctExt {
    fn is_one(&self) -> bool;
}

impl<S: Scalar> OctExt for Octonion<S> {
    fn is_one(&self) -> bool {
        self.as_scalar().is_some_and(|t| t.is_one())
    }
}

/// `x1 = E12 + E21`, `x2 = diag(-1, s, 1)`.
pub fn canonical_rank_deficient_shape<S: Scalar>(x: &PairElement<S>) -> bool {
    let f = x.field();
    let mut x1 = AlbertElement::zero(&f);
    x1.x[2] = Octonion::one(&f);
    let x2 = &x.x2;
    x.x1 == x1 && x2.is_diagonal() && x2.s[0] == f.from_i64(-1) && x2.s[2].is_one()
}

/// `x1 = Lambda`, `x2 = [[0,1,0],[1,a,b],[0,b,c]]` with `a, b, c` scalars.
pub fn canonical_irreducible_shape<S: Scalar>(x: &PairElement<S>) -> bool {
    let f = x.field();
    let x2 = &x.x2;
    x.x1 == lambda(&f) && x2.s[0].is_zero() && x2.x[1].is_zero() && x2.x[2].is_one() && x2.x[0].as_scalar().is_some()
}

/// `x1` antidiagonal unit, `x2 = [[s, y, 0], [conj(y), t, 0], [0, 0, 1]]`.
fn intermediate_rank_deficient_shape<S: Scalar>(x: &PairElement<S>) -> bool {
    let f = x.field();
    let mut x1 = AlbertElement::zero(&f);
    x1.x[2] = Octonion::one(&f);
    x.x1 == x1 && x.x2.x[0].is_zero() && x.x2.x[1].is_zero() && x.x2.s[2].is_one()
}

/// Reduction of a semistable `x` with `det(x1) = 0` to
/// `(E12 + E21, diag(-1, s, 1))`.
pub fn reduce_rank_deficient<S: Scalar>(
    x: &PairElement<S>,
    opts: &ReduceOptions,
) -> Result<ReductionTrace<S>, OrbitError> {
    if !is_semistable(x) {
        return Err(OrbitError::NotSemistable);
    }
    if !x.x1.det().is_zero() {
        return Err(OrbitError::FullRank);
    }
    let mut r = Reducer::new(x.clone(), opts);
    rank_deficient_steps(&mut r)?;
    Ok(r.finish(Branch::RankDeficient))
}

fn rank_deficient_steps<S: Scalar>(r: &mut Reducer<S>) -> Result<(), OrbitError> {
    let f = r.field();
    if canonical_rank_deficient_shape(&r.x) {
        return Ok(());
    }
    if !intermediate_rank_deficient_shape(&r.x) {
        r.diagonalize_x1()?;
        ensure(r.x.x1.s[2].is_zero(), "diagonalize x1", "s13 = 0 since det(x1) = 0")?;

        let step = "clear column 3 of x2";
        let s23 = r.x.x2.s[2].clone();
        let s23inv = s23.inv().ok_or_else(|| step_err(step, "s23 = 0; x is not semistable"))?;
        if !r.x.x2.x[1].is_zero() {
            let u = r.x.x2.x[1].conj().scale(&-s23inv.clone());
            r.n(step, 1, 3, &u)?;
        }
        if !r.x.x2.x[0].is_zero() {
            let u = r.x.x2.x[0].scale(&-s23inv);
            r.n(step, 2, 3, &u)?;
        }
        ensure(r.x.x2.x[0].is_zero() && r.x.x2.x[1].is_zero(), step, "x2 entries (1,3), (2,3) vanish")?;

        r.rescale("rescale", 1, [Some(f.half()), Some(-f.half()), None])?;
        let cur = r.x.x2.s[2].clone();
        if !cur.is_one() {
            let a = find_with_norm(&f, &cur.inv().expect("nonzero"));
            r.d("rescale", 3, &a)?;
        }

        let step = "diagonal to antidiagonal";
        let g = Mat::from_ints(&f, &[&[1, -1, 0], &[1, 1, 0], &[0, 0, 1]]).expect("3x3");
        r.push_g1(format!("{step}: rho_1([[1,-1,0],[1,1,0],[0,0,1]])"), rho1(&g)?);
        ensure(intermediate_rank_deficient_shape(&r.x), step, "x1 = E12 + E21, x2 block diagonal with s23 = 1")?;
    }

    let step = "make s21 nonzero";
    if r.x.x2.s[0].is_zero() {
        if !r.x.x2.s[1].is_zero() {
            r.permute(step, [1, 0, 2]);
        } else {
            let u = find_traceless_pairing(&r.x.x2.x[2]).ok_or_else(|| step_err(step, "x23 is scalar"))?;
            r.n(step, 1, 2, &u)?;
        }
    }
    ensure(!r.x.x2.s[0].is_zero() && intermediate_rank_deficient_shape(&r.x), step, "s21 != 0, shape kept")?;

    let step = "make x23 scalar";
    if r.x.x2.x[2].as_scalar().is_none() {
        let u = imaginary_over(&r.x.x2.x[2], &r.x.x2.s[0]);
        r.n(step, 2, 1, &u)?;
    }
    ensure(r.x.x2.x[2].as_scalar().is_some() && intermediate_rank_deficient_shape(&r.x), step, "x23 in k")?;

    let step = "clear x23";
    let c = r.x.x2.x[2].as_scalar().expect("checked");
    if !c.is_zero() {
        r.push_gl2(step, f.one(), f.zero(), -c, f.one())?;
    }
    ensure(r.x.x2.is_diagonal(), step, "x2 diagonal")?;

    let step = "normalize s21";
    let s21 = r.x.x2.s[0].clone();
    let target = f.from_i64(-1);
    if s21 != target {
        let a1 = find_with_norm(&f, &(target / &s21));
        let a2 = a1.inverse()?;
        r.d(step, 1, &a1)?;
        r.d(step, 2, &a2)?;
    }
    ensure(canonical_rank_deficient_shape(&r.x), step, "x = (E12 + E21, diag(-1, s, 1))")
}

/// Reduction of a semistable `x` whose cubic form has no rational root to
/// `(Lambda, [[0,1,0],[1,a,b],[0,b,c]])`.
pub fn reduce_irreducible<F: OrbitField>(
    x: &PairElement<F::Elem>,
    opts: &ReduceOptions,
) -> Result<ReductionTrace<F::Elem>, OrbitError> {
    if !is_semistable(x) {
        return Err(OrbitError::NotSemistable);
    }
    if !F::projective_roots(&f_x(x)).is_empty() {
        return Err(OrbitError::HasRationalRoot);
    }
    let mut r = Reducer::new(x.clone(), opts);
    irreducible_steps(&mut r)?;
    Ok(r.finish(Branch::Irreducible))
}

fn irreducible_steps<S: Scalar>(r: &mut Reducer<S>) -> Result<(), OrbitError> {
    let f = r.field();
    let lam = lambda(&f);
    if canonical_irreducible_shape(&r.x) {
        return Ok(());
    }
    if r.x.x1 != lam {
        r.diagonalize_x1()?;
        ensure(!r.x.x1.s[2].is_zero(), "diagonalize x1", "s13 != 0 since det(x1) != 0")?;
        r.rescale("rescale", 1, [Some(f.half()), Some(f.from_i64(-2)), Some(-f.half())])?;
        let step = "diagonal to Lambda";
        let g = Mat::from_ints(&f, &[&[1, 0, 1], &[0, 1, 0], &[1, 0, -1]]).expect("3x3");
        r.push_g1(format!("{step}: rho_1([[1,0,1],[0,1,0],[1,0,-1]])"), rho1(&g)?);
        ensure(r.x.x1 == lam, step, "x1 = Lambda")?;
    }

    let step = "make s21 nonzero";
    if r.x.x2.s[0].is_zero() {
        if !r.x.x2.s[2].is_zero() {
            r.push_g1(format!("{step}: nu"), nu(&f));
        } else {
            let x23 = r.x.x2.x[2].clone();
            if x23.is_zero() {
                return Err(step_err(step, "x23 = 0 forces det(x2) = 0"));
            }
            let coeffs: [S; 8] =
                std::array::from_fn(|k| (&x23 * &Octonion::basis(&f, k)).trace() * f.half());
            let u = find_isotropic_nonvanishing(&f, &coeffs, r.budget)
                .map_err(|_| OrbitError::SearchExhausted { step: step.into(), budget: r.budget })?;
            r.b(step, 2, &u)?;
        }
    }
    ensure(!r.x.x2.s[0].is_zero() && r.x.x1 == lam, step, "s21 != 0, x1 = Lambda")?;

    let step = "clear x23";
    if !r.x.x2.x[2].is_zero() {
        let s21inv = r.x.x2.s[0].inv().expect("nonzero");
        let u = r.x.x2.x[2].conj().scale(&-s21inv);
        r.b(step, 1, &u)?;
    }
    ensure(r.x.x2.x[2].is_zero() && r.x.x1 == lam, step, "x23 = 0")?;

    let step = "clear s22";
    let s22 = r.x.x2.s[1].clone();
    if !s22.is_zero() {
        r.push_gl2(step, f.one(), f.zero(), s22 * f.half(), f.one())?;
    }
    ensure(r.x.x2.s[1].is_zero() && r.x.x2.x[2].is_zero(), step, "s22 = 0")?;

    r.change_oct("unit x21")?;
    ensure(r.x.x1 == lam && r.x.x2.s[1].is_zero() && r.x.x2.x[2].is_zero(), "unit x21", "shape kept")?;

    let step = "make x22 scalar";
    if r.x.x2.x[1].as_scalar().is_none() {
        let u = imaginary_over(&r.x.x2.x[1], &r.x.x2.s[0]).scale(&-f.one());
        r.n(step, 3, 1, &u)?;
    }
    ensure(r.x.x2.x[1].as_scalar().is_some() && r.x.x1 == lam, step, "x22 in k")?;

    let step = "normalize x2";
    let s21inv = r.x.x2.s[0].inv().expect("nonzero");
    let x22 = r.x.x2.x[1].as_scalar().expect("checked");
    if !(x22.is_zero() && s21inv.is_one()) {
        r.push_gl2(step, f.one(), f.zero(), -x22 * &s21inv, s21inv.clone())?;
    }
    let x2 = &r.x.x2;
    ensure(
        x2.s[0].is_one() && x2.x[1].is_zero() && x2.x[2].is_zero() && x2.x[0].as_scalar().is_some_and(|c| !c.is_zero()),
        step,
        "x2 = [[1,0,0],[0,s,c],[0,c,t]] with c != 0",
    )?;

    let step = "shift by B_1(2)";
    r.b(step, 1, &Octonion::scalar(f.from_i64(2)))?;
    r.push_gl2(step, f.one(), f.zero(), -f.one(), f.one())?;
    ensure(r.x.x1 == lam, step, "x1 = Lambda")?;

    let step = "make x23 anisotropic";
    let u = find_with_trace_norm(&f, &-f.one(), &f.zero());
    r.b(step, 2, &u)?;
    ensure(r.x.x2.s[0].is_zero() && !r.x.x2.x[2].norm().is_zero(), step, "s21 = 0, |x23| != 0")?;

    let step = "unit x23";
    r.push_g1(format!("{step}: nu"), nu(&f));
    r.change_oct(step)?;
    r.push_g1(format!("{step}: nu"), nu(&f));
    ensure(r.x.x2.s[0].is_zero() && r.x.x2.x[2].is_one() && r.x.x1 == lam, step, "s21 = 0, x23 = 1")?;

    let step = "clear x22";
    if !r.x.x2.x[1].is_zero() {
        let u = r.x.x2.x[1].conj().scale(&f.from_i64(-2));
        r.b(step, 1, &u)?;
    }
    ensure(r.x.x2.x[1].is_zero() && r.x.x2.x[2].is_one(), step, "x22 = 0, x23 = 1")?;

    let step = "make x21 scalar";
    let x21 = r.x.x2.x[0].clone();
    if x21.as_scalar().is_none() {
        let u = (&x21 - &x21.conj()).scale(&f.half());
        r.n(step, 3, 1, &u)?;
    }
    ensure(canonical_irreducible_shape(&r.x), step, "x = (Lambda, [[0,1,0],[1,a,b],[0,b,c]])")
}

/// Full reduction: if `F_x` has a rational root, it is moved to `(1, 0)` and
/// the rank-deficient reduction follows; otherwise the irreducible one.
pub fn reduce<F: OrbitField>(
    x: &PairElement<F::Elem>,
    opts: &ReduceOptions,
) -> Result<ReductionTrace<F::Elem>, OrbitError> {
    if !is_semistable(x) {
        return Err(OrbitError::NotSemistable);
    }
    let form = f_x(x);
    let roots = F::projective_roots(&form);
    let mut r = Reducer::new(x.clone(), opts);
    if roots.is_empty() {
        irreducible_steps(&mut r)?;
        return Ok(r.finish(Branch::Irreducible));
    }
    if !form.a.is_zero() {
        // F_{gx}(1, 0) = c F_x(q) for q the first row of g2.
        let f = x.field();
        let q = &roots[0];
        let (c, d) = if q.v1.is_zero() { (f.one(), f.zero()) } else { (f.zero(), f.one()) };
        r.push_gl2("move root to (1,0)", q.v1.clone(), q.v2.clone(), c, d)?;
        ensure(r.x.x1.det().is_zero(), "move root to (1,0)", "det(x1) = 0")?;
    }
    rank_deficient_steps(&mut r)?;
    Ok(r.finish(Branch::RankDeficient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{seeded_rng, PrimeField, Rationals};
    use crate::group::random_element;
    use crate::orbits::{canonical_pair, classify, random_of_kind, OrbitKind};
    use crate::pvs::w;

    fn check<F: OrbitField>(x: &PairElement<F::Elem>) -> ReductionTrace<F::Elem> {
        let t = reduce::<F>(x, &ReduceOptions::default()).unwrap();
        assert!(t.verify());
        assert_eq!(&t.multiplier_product(), t.accumulated.g1.multiplier());
        match t.branch {
            Branch::RankDeficient => assert!(canonical_rank_deficient_shape(&t.output)),
            Branch::Irreducible => assert!(canonical_irreducible_shape(&t.output)),
        }
        assert!(classify::<F>(&t.output).unwrap().same_class(&classify::<F>(x).unwrap()));
        t
    }

    #[test]
    fn base_point_reduces() {
        let t = check::<Rationals>(&w(&Rationals));
        assert_eq!(t.branch, Branch::RankDeficient);
    }

    #[test]
    fn canonical_inputs_are_fixed() {
        let q = Rationals;
        let mut x1 = AlbertElement::zero(&q);
        x1.x[2] = Octonion::one(&q);
        let x = PairElement::new(x1.clone(), AlbertElement::diag_ints(&q, [-1, 3, 1]));
        let t = reduce_rank_deficient(&x, &ReduceOptions::default()).unwrap();
        assert!(t.steps.is_empty());
        let y = canonical_pair(&q.from_i64(0), &q.from_i64(0), &q.from_i64(4));
        let t = reduce_irreducible::<Rationals>(&y, &ReduceOptions::default()).unwrap();
        assert!(t.steps.is_empty());
        // intermediate form with s21 = 1, x23 = 0: only the last steps run
        let z = PairElement::new(x1, AlbertElement::diag_ints(&q, [1, 5, 1]));
        let t = reduce_rank_deficient(&z, &ReduceOptions::default()).unwrap();
        assert_eq!(t.steps.len(), 2);
        assert!(t.steps.iter().all(|s| s.label.starts_with("normalize s21")));
    }

    #[test]
    fn round_trips_over_q() {
        let mut rng = seeded_rng(31);
        for kind in OrbitKind::ALL {
            for _ in 0..4 {
                let x = random_of_kind(&Rationals, kind, &mut rng, 4);
                let t = check::<Rationals>(&x);
                let expect = if kind == OrbitKind::Cubic { Branch::Irreducible } else { Branch::RankDeficient };
                assert_eq!(t.branch, expect);
                // idempotent on the output
                let again = reduce::<Rationals>(&t.output, &ReduceOptions::default()).unwrap();
                assert!(again.steps.is_empty(), "{:?}", again.steps.iter().map(|s| &s.label).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn round_trips_over_f7() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = seeded_rng(32);
        for kind in OrbitKind::ALL {
            for _ in 0..4 {
                let x = random_of_kind(&f, kind, &mut rng, 4);
                check::<PrimeField>(&x);
            }
        }
        // uniformly random points
        let mut done = 0;
        while done < 6 {
            let x = PairElement::new(crate::albert::random(&f, &mut rng), crate::albert::random(&f, &mut rng));
            if is_semistable(&x) {
                check::<PrimeField>(&x);
                done += 1;
            }
        }
    }

    #[test]
    fn irreducible_precondition() {
        let q = Rationals;
        assert!(matches!(reduce_irreducible::<Rationals>(&w(&q), &ReduceOptions::default()), Err(OrbitError::HasRationalRoot)));
        let x = PairElement::new(AlbertElement::identity(&q), AlbertElement::zero(&q));
        assert!(matches!(reduce::<Rationals>(&x, &ReduceOptions::default()), Err(OrbitError::NotSemistable)));
        let g = random_element(&q, &mut seeded_rng(3), 3);
        let y = act(&g, &w(&q));
        assert!(matches!(reduce_rank_deficient(&y, &ReduceOptions::default()), Err(OrbitError::FullRank) | Ok(_)));
    }
}
