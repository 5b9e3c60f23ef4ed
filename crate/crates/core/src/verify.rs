//! Identity batteries over a chosen field.
//!
//! Each check draws its own random inputs from a generator seeded by the
//! run seed and the check's name, so a report is reproducible and does not
//! depend on which other checks ran.

use std::fmt;

use serde_json::{json, Value};

use crate::albert::{self, AlbertElement};
use crate::field::{seeded_rng, Field, Mat, Scalar, SeededRng};
use crate::group::{
    b_i, d_diag, d_i, derivation_dimension, hat, local_triality_solve, n_ij, random_element, random_octonion, rho1,
    satisfies_local_triality, script_d, so_q_basis, tau, xi0, GElement, TrialityTriple,
};
use crate::octonion::{find_with_norm, Octonion};
use crate::orbits::{
    canonical_irreducible_shape, canonical_rank_deficient_shape, classify, cubic_field_isomorphic, eta_x, lambda,
    random_of_kind, reduce, Branch, IntCubic, OrbitField, OrbitKind, Perm3, ReduceOptions,
};
use crate::pvs::{act, disc, equivariant_m, f_x, is_semistable, t_x, w, BinaryCubic, Isotope, PairElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Octonion,
    Albert,
    Group,
    Pvs,
    Orbits,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Octonion, Suite::Albert, Suite::Group, Suite::Pvs, Suite::Orbits];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Octonion => "octonion",
            Suite::Albert => "albert",
            Suite::Group => "group",
            Suite::Pvs => "pvs",
            Suite::Orbits => "orbits",
        }
    }

    /// A suite name, or `all`.
    pub fn parse_list(s: &str) -> Option<Vec<Suite>> {
        if s == "all" {
            return Some(Suite::ALL.to_vec());
        }
        Suite::ALL.iter().find(|x| x.name() == s).map(|x| vec![*x])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Random trials per randomized check.
    pub trials: usize,
    pub seed: u64,
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { trials: 20, seed: 1, budget: ReduceOptions::default().budget }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Description of the first failing trial.
    pub first_failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub field: String,
    pub options: VerifyOptions,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "suite": c.suite.name(),
                    "name": c.name,
                    "trials": c.trials,
                    "failures": c.failures,
                    "passed": c.passed(),
                    "first_failure": c.first_failure,
                })
            })
            .collect();
        json!({
            "field": self.field,
            "seed": self.options.seed,
            "trials": self.options.trials,
            "passed": self.passed(),
            "checks": checks,
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            write!(f, "[{tag}] {:<8} {} ({}/{})", c.suite.name(), c.name, c.trials - c.failures, c.trials)?;
            if let Some(msg) = &c.first_failure {
                write!(f, ": {msg}")?;
            }
            writeln!(f)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(f, "{} checks over {}, {} failed", self.checks.len(), self.field, failed)
    }
}

type Outcome = Result<(), String>;

fn req(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn eq<T: PartialEq + fmt::Debug>(lhs: &T, rhs: &T) -> Outcome {
    req(lhs == rhs, || format!("{lhs:?} != {rhs:?}"))
}

/// FNV-1a, to derive per-check seeds.
fn name_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

struct Runner<'a> {
    suite: Suite,
    seed: u64,
    checks: &'a mut Vec<Check>,
}

impl Runner<'_> {
    fn check(&mut self, name: &str, trials: usize, mut f: impl FnMut(&mut SeededRng) -> Outcome) {
        let mut rng = seeded_rng(self.seed ^ name_hash(name));
        let mut failures = 0;
        let mut first_failure = None;
        for _ in 0..trials {
            if let Err(msg) = f(&mut rng) {
                failures += 1;
                first_failure.get_or_insert(msg);
            }
        }
        self.checks.push(Check { suite: self.suite, name: name.to_string(), trials, failures, first_failure });
    }

    fn once(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        let mut f = Some(f);
        self.check(name, 1, |_| (f.take().expect("runs once"))());
    }
}

pub fn run<F: OrbitField>(field: &F, suites: &[Suite], opts: &VerifyOptions) -> Report {
    let mut checks = Vec::new();
    for &suite in suites {
        let mut r = Runner { suite, seed: opts.seed, checks: &mut checks };
        match suite {
            Suite::Octonion => octonion_suite(field, &mut r, opts),
            Suite::Albert => albert_suite(field, &mut r, opts),
            Suite::Group => group_suite(field, &mut r, opts),
            Suite::Pvs => pvs_suite(field, &mut r, opts),
            Suite::Orbits => orbits_suite(field, &mut r, opts),
        }
    }
    Report { field: field.descriptor(), options: *opts, checks }
}

fn rand_oct<F: Field>(f: &F, rng: &mut SeededRng) -> Octonion<F::Elem> {
    Octonion::from_coords((0..8).map(|_| f.random(rng)).collect()).expect("8")
}

fn invertible_oct<F: Field>(f: &F, rng: &mut SeededRng) -> Octonion<F::Elem> {
    loop {
        let a = random_octonion(f, rng);
        if !a.norm().is_zero() {
            return a;
        }
    }
}

/// `a / b` with `|b| = |a|`, which has norm one.
fn unit_oct<F: Field>(f: &F, rng: &mut SeededRng) -> Octonion<F::Elem> {
    let a = invertible_oct(f, rng);
    let b = find_with_norm(f, &a.norm());
    &a * &b.inverse().expect("norm is nonzero")
}

fn octonion_suite<F: Field>(f: &F, r: &mut Runner, opts: &VerifyOptions) {
    let n = opts.trials;
    let two = f.from_i64(2);
    r.once("norm is u1u2 + u3u4 + u5u6 + u7u8 and 1 = (1,1,0,...)", || {
        let x = Octonion::from_ints(f, [1, 2, 3, 4, 5, 6, 7, 8]);
        eq(&x.norm(), &f.from_i64(2 + 12 + 30 + 56))?;
        let one = Octonion::one(f);
        eq(&(&one * &x), &x)?;
        eq(&(&x * &one), &x)
    });
    r.check("composition |xy| = |x||y|", n, |rng| {
        let (x, y) = (rand_oct(f, rng), rand_oct(f, rng));
        eq(&(&x * &y).norm(), &(x.norm() * y.norm()))
    });
    r.check("Moufang a(xy)a = (ax)(ya)", n, |rng| {
        let (a, x, y) = (rand_oct(f, rng), rand_oct(f, rng), rand_oct(f, rng));
        eq(&(&(&a * &(&x * &y)) * &a), &(&(&a * &x) * &(&y * &a)))
    });
    r.check("tr((xy)z) = tr(x(yz))", n, |rng| {
        let (x, y, z) = (rand_oct(f, rng), rand_oct(f, rng), rand_oct(f, rng));
        eq(&(&(&x * &y) * &z).trace(), &(&x * &(&y * &z)).trace())
    });
    r.check("(xy)conj(z) + (xz)conj(y) = 2Q(y,z)x", n, |rng| {
        let (x, y, z) = (rand_oct(f, rng), rand_oct(f, rng), rand_oct(f, rng));
        let lhs = &(&(&x * &y) * &z.conj()) + &(&(&x * &z) * &y.conj());
        eq(&lhs, &x.scale(&(y.q_form(&z) * &two)))
    });
    r.check("alternativity x(xy) = (xx)y and (yx)x = y(xx)", n, |rng| {
        let (x, y) = (rand_oct(f, rng), rand_oct(f, rng));
        eq(&(&x * &(&x * &y)), &(&(&x * &x) * &y))?;
        eq(&(&(&y * &x) * &x), &(&y * &(&x * &x)))
    });
    r.check("x conj(x) = |x| and conj(x) = tr(x) - x", n, |rng| {
        let x = rand_oct(f, rng);
        eq(&(&x * &x.conj()), &Octonion::scalar(x.norm()))?;
        eq(&x.conj(), &(&Octonion::scalar(x.trace()) - &x))
    });
}

fn albert_suite<F: Field>(f: &F, r: &mut Runner, opts: &VerifyOptions) {
    let n = opts.trials;
    let e = AlbertElement::identity(f);
    let (half, three, four) = (f.half(), f.from_i64(3), f.from_i64(4));
    let rand3 = |rng: &mut SeededRng| (albert::random(f, rng), albert::random(f, rng), albert::random(f, rng));
    r.check("x*y = x.y - <y,e>x/2 - <x,e>y/2 - <x,y>e/2 + <x,e><y,e>e/2", n, |rng| {
        let (x, y, _) = rand3(rng);
        let (xe, ye, xy) = (x.bilinear(&e), y.bilinear(&e), x.bilinear(&y));
        let rhs = &(&(&(&x.jordan(&y) - &x.scale(&(ye.clone() * &half))) - &y.scale(&(xe.clone() * &half)))
            - &e.scale(&(xy * &half)))
            + &e.scale(&(xe * &ye * &half));
        eq(&x.cross(&y), &rhs)
    });
    r.check("x.(x*x) = det(x) e", n, |rng| {
        let x = albert::random(f, rng);
        eq(&x.jordan(&x.cross(&x)), &e.scale(&x.det()))
    });
    r.check("(x*x)*(x*x) = det(x) x", n, |rng| {
        let x = albert::random(f, rng);
        let xx = x.cross(&x);
        eq(&xx.cross(&xx), &x.scale(&x.det()))
    });
    r.check("4 x*(y*(x*x)) = det(x) y + <x,y> x*x", n, |rng| {
        let (x, y, _) = rand3(rng);
        let xx = x.cross(&x);
        eq(&x.cross(&y.cross(&xx)).scale(&four), &(&y.scale(&x.det()) + &xx.scale(&x.bilinear(&y))))
    });
    r.check("4 (x*x)*(x*y) = det(x) y + 3D(x,x,y) x", n, |rng| {
        let (x, y, _) = rand3(rng);
        let d = three.clone() * AlbertElement::trilinear_d(&x, &x, &y);
        eq(&x.cross(&x).cross(&x.cross(&y)).scale(&four), &(&y.scale(&x.det()) + &x.scale(&d)))
    });
    r.check("4 (x*y)*(x*y) = -2 (x*x)*(y*y) + 3D(x,y,y) x + 3D(x,x,y) y", n, |rng| {
        let (x, y, _) = rand3(rng);
        let xy = x.cross(&y);
        let dxxy = three.clone() * AlbertElement::trilinear_d(&x, &x, &y);
        let dxyy = three.clone() * AlbertElement::trilinear_d(&x, &y, &y);
        let rhs =
            &(&x.cross(&x).cross(&y.cross(&y)).scale(&f.from_i64(-2)) + &x.scale(&dxyy)) + &y.scale(&dxxy);
        eq(&xy.cross(&xy).scale(&four), &rhs)
    });
    r.check("<x*y,z> = 3D(x,y,z)", n, |rng| {
        let (x, y, z) = rand3(rng);
        eq(&x.cross(&y).bilinear(&z), &(three.clone() * AlbertElement::trilinear_d(&x, &y, &z)))
    });
    r.check("D(x,x,x) = det(x) and <x,y> = Tr(x.y)", n, |rng| {
        let (x, y, _) = rand3(rng);
        eq(&AlbertElement::trilinear_d(&x, &x, &x), &x.det())?;
        eq(&x.bilinear(&y), &x.jordan(&y).trace())
    });
    r.check("x^3 - Tr(x) x^2 + <x*x,e> x - det(x) e = 0", n, |rng| {
        let x = albert::random(f, rng);
        let x2 = x.square();
        let res = &(&(&x2.jordan(&x) - &x2.scale(&x.trace())) + &x.scale(&x.cross(&x).bilinear(&e)))
            - &e.scale(&x.det());
        req(res.is_zero(), || format!("residual {res:?}"))
    });
    r.check("Jordan identity (x^2.y).x = x^2.(y.x)", n, |rng| {
        let (x, y, _) = rand3(rng);
        let x2 = x.square();
        eq(&x2.jordan(&y).jordan(&x), &x2.jordan(&y.jordan(&x)))
    });
}

fn group_suite<F: OrbitField>(f: &F, r: &mut Runner, opts: &VerifyOptions) {
    let n = opts.trials;
    let rand_alb = |rng: &mut SeededRng| albert::random(f, rng);
    // det(g x) = c det(x) on a random x, and c = det(g e)
    let member = |g: &crate::group::GroupElement<F::Elem>, x: &AlbertElement<F::Elem>| -> Outcome {
        eq(&g.apply(&AlbertElement::identity(f)).det(), g.multiplier())?;
        eq(&g.apply(x).det(), &(g.multiplier().clone() * &x.det()))
    };
    r.check("d_i(a) has multiplier |a|", n, |rng| {
        let a = invertible_oct(f, rng);
        let i = rng.gen_range_usize(1, 3);
        let g = d_i(i, &a).map_err(|e| e.to_string())?;
        eq(g.multiplier(), &a.norm())?;
        member(&g, &rand_alb(rng))
    });
    r.check("d(a1,a2,a3) has multiplier (a1 a2 a3)^2", n, |rng| {
        let a: [F::Elem; 3] = std::array::from_fn(|_| f.random_nonzero(rng));
        let g = d_diag(a.clone()).map_err(|e| e.to_string())?;
        let p = a[0].clone() * &a[1] * &a[2];
        eq(g.multiplier(), &(p.clone() * &p))?;
        member(&g, &rand_alb(rng))
    });
    r.check("n_ij(u) has multiplier 1", n, |rng| {
        let u = rand_oct(f, rng);
        let i = rng.gen_range_usize(1, 3);
        let j = (i + rng.gen_range_usize(0, 1)) % 3 + 1;
        let g = n_ij(i, j, &u).map_err(|e| e.to_string())?;
        req(g.multiplier().is_one(), || "multiplier".into())?;
        member(&g, &rand_alb(rng))
    });
    r.check("B_i(u) has multiplier 1 and fixes Lambda", n, |rng| {
        let u = rand_oct(f, rng);
        let g = b_i(rng.gen_range_usize(1, 2), &u).map_err(|e| e.to_string())?;
        req(g.multiplier().is_one(), || "multiplier".into())?;
        eq(&g.apply(&lambda(f)), &lambda(f))?;
        member(&g, &rand_alb(rng))
    });
    r.check("B_1(u) = n_31(-|u|/4) n_32(conj(u)/2) n_21(u)", n, |rng| {
        let u = rand_oct(f, rng);
        let half = f.half();
        let fact = n_ij(3, 1, &Octonion::scalar(-(u.norm() * &half * &half)))
            .and_then(|a| Ok(a.compose(&n_ij(3, 2, &u.conj().scale(&half))?)))
            .and_then(|a| Ok(a.compose(&n_ij(2, 1, &u)?)))
            .map_err(|e| e.to_string())?;
        eq(&b_i(1, &u).map_err(|e| e.to_string())?, &fact)
    });
    r.check("D(b) fixes Lambda for traceless anisotropic b", n, |rng| {
        let b = loop {
            let mut b = rand_oct(f, rng);
            let t = b.trace();
            let mut c = b.coords().to_vec();
            c[0] = c[0].clone() - t;
            b = Octonion::from_coords(c).expect("8");
            if !b.norm().is_zero() {
                break b;
            }
        };
        let g = script_d(&b).map_err(|e| e.to_string())?;
        req(g.multiplier().is_one(), || "multiplier".into())?;
        eq(&g.apply(&lambda(f)), &lambda(f))
    });
    r.check("rho1 is a homomorphism with multiplier det^2", n, |rng| {
        let m = |rng: &mut SeededRng| loop {
            let m = Mat::from_rows(f, (0..3).map(|_| (0..3).map(|_| f.random(rng)).collect()).collect()).expect("3x3");
            if !m.det().expect("square").is_zero() {
                break m;
            }
        };
        let (a, b) = (m(rng), m(rng));
        let ra = rho1(&a).map_err(|e| e.to_string())?;
        let rb = rho1(&b).map_err(|e| e.to_string())?;
        let d = a.det().expect("square");
        eq(ra.multiplier(), &(d.clone() * &d))?;
        eq(&rho1(&a.mul(&b).expect("3x3")).map_err(|e| e.to_string())?, &ra.compose(&rb))
    });
    r.once("tau_1^2 = tau_2^2 = 1 and (tau_1 tau_2)^2 = tau_2 tau_1", || {
        let (t1, t2) = (tau(f, 1).map_err(|e| e.to_string())?, tau(f, 2).map_err(|e| e.to_string())?);
        let id = GElement::identity(f);
        eq(&t1.compose(&t1), &id)?;
        eq(&t2.compose(&t2), &id)?;
        let t12 = t1.compose(&t2);
        eq(&t12.compose(&t12), &t2.compose(&t1))
    });
    r.once("tau_1 and tau_2 fix w", || {
        for i in 1..=2 {
            eq(&act(&tau(f, i).map_err(|e| e.to_string())?, &w(f)), &w(f))?;
        }
        Ok(())
    });
    r.check("xi0(t, spin(a)) fixes w with multiplier t^3", n, |rng| {
        let t = f.random_nonzero(rng);
        let triple = TrialityTriple::spin_from_unit(&unit_oct(f, rng)).map_err(|e| e.to_string())?;
        let g = xi0(&t, &triple).map_err(|e| e.to_string())?;
        eq(g.g1.multiplier(), &(t.clone() * &t * &t))?;
        eq(&act(&g, &w(f)), &w(f))
    });
    r.check("spin(a) and its eta'_i images satisfy triality", n.min(5), |rng| {
        let t = TrialityTriple::spin_from_unit(&unit_oct(f, rng)).map_err(|e| e.to_string())?;
        req(t.verify(), || "spin(a)".into())?;
        for i in 1..=3 {
            req(t.eta_prime(i).map_err(|e| e.to_string())?.verify(), || format!("eta'_{i}"))?;
        }
        Ok(())
    });
    r.once("conjugated transpositions are tau_1, tau_2 and twisted tau_1", || {
        let el = |g1: &[&[i64]], g2: &[&[i64]]| -> Result<GElement<F::Elem>, String> {
            let m = Mat::from_ints(f, g1).map_err(|e| e.to_string())?;
            GElement::new(rho1(&m).map_err(|e| e.to_string())?, Mat::from_ints(f, g2).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())
        };
        let t1 = tau(f, 1).map_err(|e| e.to_string())?;
        eq(&el(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]], &[&[-1, 0], &[1, 1]])?, &t1)?;
        eq(&el(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]], &[&[1, 1], &[0, -1]])?, &tau(f, 2).map_err(|e| e.to_string())?)?;
        let i8 = Mat::identity(f, 8);
        let minus = i8.scale(&f.from_i64(-1));
        let twist = xi0(&f.one(), &TrialityTriple { a: minus.clone(), b: minus, c: i8 }).map_err(|e| e.to_string())?;
        eq(&el(&[&[0, -1, 0], &[-1, 0, 0], &[0, 0, 1]], &[&[-1, 0], &[1, 1]])?, &t1.compose(&twist))
    });
    r.check("random generator words preserve det up to their multiplier (all basis triples)", n.min(3), |rng| {
        let g = random_element(f, rng, 4);
        req(g.g1.preserves_det(), || "polarized determinant not scaled by c".into())
    });
    r.once("local triality: unique (t2, t3) for each of the 28 basis elements of so(Q), cyclic companions too", || {
        let basis = so_q_basis(f);
        eq(&basis.len(), &28)?;
        for (k, t1) in basis.iter().enumerate() {
            let (t2, t3) = local_triality_solve(t1).map_err(|e| format!("basis element {k}: {e}"))?;
            req(satisfies_local_triality(t1, &t2, &t3), || format!("basis element {k}"))?;
            req(satisfies_local_triality(&t2, t1, &hat(&t3)), || format!("cyclic companion of {k}"))?;
        }
        Ok(())
    });
    if f.characteristic() > 0 {
        r.once("dim Der(J) = 52", || eq(&derivation_dimension(f), &52));
    }
}

fn pvs_suite<F: OrbitField>(f: &F, r: &mut Runner, opts: &VerifyOptions) {
    let n = opts.trials;
    let pair = |rng: &mut SeededRng| PairElement::new(albert::random(f, rng), albert::random(f, rng));
    r.once("m(w) = e", || eq(&equivariant_m(&w(f)), &AlbertElement::identity(f)));
    r.once("F_w = v1 v2 (v1 - v2) and Delta(w) = 1", || {
        eq(&f_x(&w(f)), &BinaryCubic::from_ints(f, [0, 1, -1, 0]))?;
        eq(&disc(&w(f)), &f.one())
    });
    r.check("F_x(v1, v2) = det(v1 x1 + v2 x2)", n, |rng| {
        let x = pair(rng);
        let (v1, v2) = (f.random(rng), f.random(rng));
        eq(&f_x(&x).eval(&v1, &v2), &(&x.x1.scale(&v1) + &x.x2.scale(&v2)).det())
    });
    r.check("g(h x) = (gh) x", n, |rng| {
        let x = pair(rng);
        let (g, h) = (random_element(f, rng, 2), random_element(f, rng, 2));
        eq(&act(&g.compose(&h), &x), &act(&g, &act(&h, &x)))
    });
    r.check("m(gx) = c(g1) det(g2)^2 g1(m(x))", n, |rng| {
        let x = pair(rng);
        let g = random_element(f, rng, 3);
        let dg = g.det_g2();
        let s = g.g1.multiplier().clone() * &dg * &dg;
        eq(&equivariant_m(&act(&g, &x)), &g.g1.apply(&equivariant_m(&x)).scale(&s))
    });
    r.check("F_gx(v) = c(g1) F_x(v g2)", n, |rng| {
        let x = pair(rng);
        let g = random_element(f, rng, 3);
        eq(&f_x(&act(&g, &x)), &f_x(&x).substitute(&g.g2).scale(g.g1.multiplier()))
    });
    r.check("Delta(gx) = c(g1)^4 det(g2)^6 Delta(x)", n, |rng| {
        let x = pair(rng);
        let g = random_element(f, rng, 3);
        let c = g.g1.multiplier().clone();
        let d = g.det_g2();
        let d3 = d.clone() * &d * &d;
        eq(&disc(&act(&g, &x)), &(c.clone() * &c * &c * &c * &d3 * &d3 * &disc(&x)))
    });
    r.check("det m(x) = Delta(x)", n, |rng| {
        let x = pair(rng);
        eq(&equivariant_m(&x).det(), &disc(&x))
    });
    r.check("x o_e y = x.y", n, |rng| {
        let iso = Isotope::new(AlbertElement::identity(f)).expect("det e = 1");
        let (x, y) = (albert::random(f, rng), albert::random(f, rng));
        eq(&iso.product(&x, &y), &x.jordan(&y))
    });
    // isotopes at random invertible m and at m(x) for semistable x
    let base = |rng: &mut SeededRng, k: usize| -> AlbertElement<F::Elem> {
        if k % 2 == 0 {
            equivariant_m(&random_of_kind(f, OrbitKind::ALL[k / 2 % 3], rng, 3))
        } else {
            loop {
                let m = albert::random(f, rng);
                if !m.det().is_zero() {
                    break m;
                }
            }
        }
    };
    let mut k = 0;
    r.check("J_m: x o_m m = x, commutative, Jordan identity", n, |rng| {
        k += 1;
        let iso = Isotope::new(base(rng, k)).map_err(|e| e.to_string())?;
        let m = iso.base().clone();
        let (x, y) = (albert::random(f, rng), albert::random(f, rng));
        eq(&iso.product(&x, &m), &x)?;
        eq(&iso.product(&x, &y), &iso.product(&y, &x))?;
        let x2 = iso.product(&x, &x);
        eq(&iso.product(&iso.product(&x2, &y), &x), &iso.product(&x2, &iso.product(&y, &x)))
    });
    let mut k = 0;
    r.check("J_m: x^3 - T(x) x^2 + S(x) x - det(m)^-1 det(x) m = 0", n, |rng| {
        // T(x) = <x,m>_m, S(x) = (T(x)^2 - T(x^2)) / 2: the generic minimal
        // polynomial of J_m, so this pins down det_m independently.
        k += 1;
        let iso = Isotope::new(base(rng, k)).map_err(|e| e.to_string())?;
        let m = iso.base().clone();
        let x = albert::random(f, rng);
        let x2 = iso.product(&x, &x);
        let x3 = iso.product(&x2, &x);
        let t = iso.bilinear(&x, &m);
        let s = (t.clone() * &t - iso.bilinear(&x2, &m)) * f.half();
        let res = &(&(&x3 - &x2.scale(&t)) + &x.scale(&s)) - &m.scale(&iso.det(&x));
        req(res.is_zero(), || format!("residual {res:?}"))?;
        req(iso.det(&m).is_one(), || "det_m(m) != 1".into())
    });
    let mut k = 0;
    r.check("t(x) is 3-dimensional, closed and associative under o_m(x)", n, |rng| {
        let kind = OrbitKind::ALL[k % 3];
        k += 1;
        let x = random_of_kind(f, kind, rng, 3);
        let t = t_x(&x).map_err(|e| e.to_string())?;
        let c = &t.constants;
        // (b_i b_j) b_l = b_i (b_j b_l) in coordinates
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    for out in 0..3 {
                        let lhs = (0..3).fold(f.zero(), |acc, p| acc + c[i][j][p].clone() * &c[p][l][out]);
                        let rhs = (0..3).fold(f.zero(), |acc, p| acc + c[j][l][p].clone() * &c[i][p][out]);
                        req(lhs == rhs, || format!("({i}{j}){l} != {i}({j}{l})"))?;
                    }
                    req(c[i][j] == c[j][i], || "not commutative".into())?;
                }
            }
        }
        Ok(())
    });
}

fn orbits_suite<F: OrbitField>(f: &F, r: &mut Runner, opts: &VerifyOptions) {
    let n = opts.trials;
    let ropts = ReduceOptions { budget: opts.budget };
    r.once("Zero(w) = {(0:1), (1:1), (1:0)}", || {
        let z: Vec<(F::Elem, F::Elem)> =
            crate::orbits::zero_set_rational::<F>(&w(f)).into_iter().map(|p| (p.v1, p.v2)).collect();
        let p = |a, b| (f.from_i64(a), f.from_i64(b));
        eq(&z, &vec![p(0, 1), p(1, 1), p(1, 0)])
    });
    r.once("eta_w(tau_1) = (1 2), eta_w(tau_2) = (2 3)", || {
        let e = |i| eta_x::<F>(&w(f), &tau(f, i).map_err(|e| e.to_string())?).map_err(|e| e.to_string());
        eq(&e(1)?, &Perm3::transposition(1, 2))?;
        eq(&e(2)?, &Perm3::transposition(2, 3))
    });
    let mut k = 0;
    r.check("classification is invariant under G", n, |rng| {
        let kind = OrbitKind::ALL[k % 3];
        k += 1;
        let x = random_of_kind(f, kind, rng, 2);
        let y = act(&random_element(f, rng, 3), &x);
        let (cx, cy) = (classify::<F>(&x).map_err(|e| e.to_string())?, classify::<F>(&y).map_err(|e| e.to_string())?);
        eq(&cx.kind(), &kind)?;
        req(cx.same_class(&cy), || format!("{cx} vs {cy}"))
    });
    for kind in OrbitKind::ALL {
        r.check(&format!("reduction of {} points: trace replays, canonical output, class kept", kind.name()), n, |rng| {
            let x = random_of_kind(f, kind, rng, 4);
            let t = reduce::<F>(&x, &ropts).map_err(|e| e.to_string())?;
            req(t.verify(), || "act(accumulated, input) != output".into())?;
            let shape = match t.branch {
                Branch::RankDeficient => canonical_rank_deficient_shape(&t.output),
                Branch::Irreducible => canonical_irreducible_shape(&t.output),
            };
            req(shape, || format!("output not in canonical shape: {:?}", t.output))?;
            let (cx, cy) = (classify::<F>(&x).map_err(|e| e.to_string())?, classify::<F>(&t.output).map_err(|e| e.to_string())?);
            req(cx.same_class(&cy), || format!("{cx} vs {cy}"))?;
            let again = reduce::<F>(&t.output, &ropts).map_err(|e| e.to_string())?;
            req(again.steps.is_empty(), || "canonical output is reduced again".into())
        });
    }
    if f.characteristic() > 0 {
        let mut seen = [false; 3];
        r.check("uniform random semistable points: class matches root count in P^1(F_p)", n, |rng| {
            let x = loop {
                let x = PairElement::new(albert::random(f, rng), albert::random(f, rng));
                if is_semistable(&x) {
                    break x;
                }
            };
            let kind = classify::<F>(&x).map_err(|e| e.to_string())?.kind();
            let roots = projective_root_count(f, &f_x(&x));
            let expected = match roots {
                3 => OrbitKind::Split3,
                1 => OrbitKind::OnePlusQuad,
                0 => OrbitKind::Cubic,
                k => return Err(format!("{k} roots of a separable cubic")),
            };
            seen[OrbitKind::ALL.iter().position(|k| *k == kind).expect("kind")] = true;
            eq(&kind, &expected)
        });
        if n >= 100 {
            r.once("uniform random semistable points realize all three classes", || {
                req(seen.iter().all(|s| *s), || format!("seen {seen:?}"))
            });
        }
    }
    r.once("cubic fields: t^3-2 ~ t^3-4, t^3-2 !~ t^3-3, f ~ f", || {
        let c = |v: [i64; 4]| -> IntCubic { v.map(num_bigint::BigInt::from) };
        req(cubic_field_isomorphic(&c([-2, 0, 0, 1]), &c([-4, 0, 0, 1])), || "t^3-2 vs t^3-4".into())?;
        req(!cubic_field_isomorphic(&c([-2, 0, 0, 1]), &c([-3, 0, 0, 1])), || "t^3-2 vs t^3-3".into())?;
        req(cubic_field_isomorphic(&c([-2, 0, 0, 1]), &c([-2, 0, 0, 1])), || "t^3-2 vs itself".into())
    });
}

/// Brute-force count of zeros of `F` on `P^1(F_p)`.
fn projective_root_count<F: Field>(f: &F, c: &BinaryCubic<F::Elem>) -> usize {
    let p = f.characteristic() as i64;
    let finite = (0..p).filter(|&t| c.eval(&f.from_i64(t), &f.one()).is_zero()).count();
    finite + usize::from(c.eval(&f.one(), &f.zero()).is_zero())
}

trait RangeExt {
    fn gen_range_usize(&mut self, lo: usize, hi: usize) -> usize;
}

impl RangeExt for SeededRng {
    fn gen_range_usize(&mut self, lo: usize, hi: usize) -> usize {
        rand::Rng::gen_range(self, lo..=hi)
    }
}
