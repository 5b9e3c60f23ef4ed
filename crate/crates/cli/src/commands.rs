use std::io::Read;

use albert_orbits::field::{seeded_rng, Field, FieldSpec, Mat, PrimeField, Rationals};
use albert_orbits::group::{
    b_i, d_diag, d_i, derivation_dimension, hat, local_triality_solve, n_ij, nu, permutation, rho1,
    satisfies_local_triality, script_d, so_q_basis, tau, xi0, GElement, GroupElement, TrialityTriple,
};
use albert_orbits::json::{document, matrix_to_json, read_document, report, scalar_from_json, scalar_to_json, Json, RawDocument};
use albert_orbits::octonion::{gram, structure_table, Octonion};
use albert_orbits::orbits::{
    classify, random_of_kind, reduce, representative_for_cubic, same_orbit, zero_set_rational, OrbitField, OrbitKind,
    ReduceOptions,
};
use albert_orbits::pvs::{disc, equivariant_m, f_x, is_semistable, t_x, BinaryCubic, PairElement};
use albert_orbits::verify::{self, Suite, VerifyOptions};
use serde_json::{json, Value};

use crate::{Cli, CliError, Command, Global};

pub struct Outcome {
    pub text: String,
    /// Exit status 0 when set, 1 otherwise.
    pub ok: bool,
}

fn usage(msg: impl ToString) -> CliError {
    CliError::Usage(msg.to_string())
}

fn failure(msg: impl ToString) -> CliError {
    CliError::Failure(msg.to_string())
}

fn emit(v: Value, ok: bool) -> Outcome {
    Outcome { text: serde_json::to_string_pretty(&v).expect("serializable"), ok }
}

macro_rules! with_field {
    ($spec:expr, $f:ident => $body:expr) => {
        match $spec {
            FieldSpec::Rationals => {
                let $f = &Rationals;
                $body
            }
            FieldSpec::Prime(p) => {
                let $f: &PrimeField = &p;
                $body
            }
        }
    };
}

fn field_flag(g: &Global) -> Result<FieldSpec, CliError> {
    g.field.as_deref().unwrap_or("q").parse().map_err(usage)
}

fn load(path: &str) -> Result<RawDocument, CliError> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(usage)?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
    }
    read_document(&text).map_err(|e| usage(format!("{path}: {e}")))
}

/// The document's field, checked against `--field` when that is given.
fn doc_field(g: &Global, doc: &RawDocument) -> Result<FieldSpec, CliError> {
    let spec: FieldSpec = doc.field.parse().map_err(|e| usage(format!("$.field: {e}")))?;
    if let Some(flag) = &g.field {
        let flag: FieldSpec = flag.parse().map_err(usage)?;
        if flag != spec {
            return Err(usage(format!("document is over {spec}, but --field {flag} was given")));
        }
    }
    Ok(spec)
}

fn decode<F: Field, T: Json<F>>(f: &F, doc: &RawDocument) -> Result<T, CliError> {
    doc.decode(f).map_err(usage)
}

fn semistable_pair<F: Field>(f: &F, doc: &RawDocument) -> Result<PairElement<F::Elem>, CliError> {
    let x: PairElement<F::Elem> = decode(f, doc)?;
    if !is_semistable(&x) {
        return Err(failure("point is not semistable (the discriminant of F_x vanishes)"));
    }
    Ok(x)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Verify { suite, json } => {
            let suites = Suite::parse_list(suite)
                .ok_or_else(|| usage(format!("unknown suite {suite:?}; expected octonion, albert, group, pvs, orbits or all")))?;
            let opts = VerifyOptions { trials: g.trials, seed: g.seed, budget: g.budget };
            let rep = with_field!(field_flag(g)?, f => verify::run(f, &suites, &opts));
            let ok = rep.passed();
            if *json {
                Ok(emit(rep.to_json(), ok))
            } else {
                Ok(Outcome { text: rep.to_string(), ok })
            }
        }
        Command::Classify { input } => {
            let doc = load(input)?;
            with_field!(doc_field(g, &doc)?, f => cmd_classify(f, &doc))
        }
        Command::Reduce { input } => {
            let doc = load(input)?;
            with_field!(doc_field(g, &doc)?, f => cmd_reduce(f, &doc, g))
        }
        Command::Invariants { input } => {
            let doc = load(input)?;
            with_field!(doc_field(g, &doc)?, f => cmd_invariants(f, &doc))
        }
        Command::Isotope { input } => {
            let doc = load(input)?;
            with_field!(doc_field(g, &doc)?, f => cmd_isotope(f, &doc))
        }
        Command::Representative { cubic } => with_field!(field_flag(g)?, f => cmd_representative(f, cubic)),
        Command::Random { class, length } => {
            let kind = OrbitKind::parse(class)
                .ok_or_else(|| usage(format!("unknown class {class:?}; expected split, mixed or cubic")))?;
            with_field!(field_flag(g)?, f => {
                let x = random_of_kind(f, kind, &mut seeded_rng(g.seed), *length);
                Ok(emit(document(f, &x), true))
            })
        }
        Command::LocalTriality { index } => with_field!(field_flag(g)?, f => cmd_local_triality(f, *index)),
        Command::DimDer => match field_flag(g)? {
            FieldSpec::Rationals => Err(usage("dim-der runs over a prime field; pass --field fp:P")),
            FieldSpec::Prime(p) => {
                let d = derivation_dimension(&p);
                Ok(emit(report(&p, "derivation-dimension", json!({ "dimension": d, "rank": 729 - d })), true))
            }
        },
        Command::SameOrbit { x, y } => {
            let (dx, dy) = (load(x)?, load(y)?);
            let (sx, sy) = (doc_field(g, &dx)?, doc_field(g, &dy)?);
            if sx != sy {
                return Err(usage(format!("{x} is over {sx} but {y} is over {sy}")));
            }
            with_field!(sx, f => cmd_same_orbit(f, &dx, &dy))
        }
        Command::DumpBasis => with_field!(field_flag(g)?, f => Ok(emit(dump_basis(f), true))),
        Command::DumpGenerator { name, args } => with_field!(field_flag(g)?, f => {
            let el = generator(f, name, args)?;
            Ok(emit(document(f, &el), true))
        }),
    }
}

fn cmd_classify<F: OrbitField>(f: &F, doc: &RawDocument) -> Result<Outcome, CliError> {
    let x = semistable_pair(f, doc)?;
    let class = classify::<F>(&x).map_err(failure)?;
    let roots: Vec<Value> =
        zero_set_rational::<F>(&x).iter().map(|p| json!([scalar_to_json(&p.v1), scalar_to_json(&p.v2)])).collect();
    let v = json!({
        "class": class.to_string(),
        "kind": class.kind().name(),
        "cubic_form": Json::<F>::to_json(&f_x(&x)),
        "discriminant": scalar_to_json(&disc(&x)),
        "rational_roots": roots,
    });
    Ok(emit(report(f, "classification", v), true))
}

fn cmd_reduce<F: OrbitField>(f: &F, doc: &RawDocument, g: &Global) -> Result<Outcome, CliError> {
    let x = semistable_pair(f, doc)?;
    let trace = reduce::<F>(&x, &ReduceOptions { budget: g.budget }).map_err(failure)?;
    let ok = trace.verify();
    Ok(emit(document(f, &trace), ok))
}

fn cmd_invariants<F: OrbitField>(f: &F, doc: &RawDocument) -> Result<Outcome, CliError> {
    let x: PairElement<F::Elem> = decode(f, doc)?;
    let m = equivariant_m(&x);
    let v = json!({
        "cubic_form": Json::<F>::to_json(&f_x(&x)),
        "discriminant": scalar_to_json(&disc(&x)),
        "m": Json::<F>::to_json(&m),
        "det_m": scalar_to_json(&m.det()),
    });
    Ok(emit(report(f, "invariants", v), true))
}

fn cmd_isotope<F: OrbitField>(f: &F, doc: &RawDocument) -> Result<Outcome, CliError> {
    let x = semistable_pair(f, doc)?;
    let t = t_x(&x).map_err(failure)?;
    let constants: Vec<Vec<Vec<Value>>> =
        t.constants.iter().map(|r| r.iter().map(|c| c.iter().map(scalar_to_json).collect()).collect()).collect();
    let v = json!({
        "m": Json::<F>::to_json(&t.basis[2]),
        "basis": t.basis.iter().map(|b| Json::<F>::to_json(b)).collect::<Vec<_>>(),
        "constants": constants,
    });
    Ok(emit(report(f, "cubic-subalgebra", v), true))
}

fn scalar_list<F: Field>(f: &F, s: &str, len: usize, what: &str) -> Result<Vec<F::Elem>, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != len {
        return Err(usage(format!("{what}: expected {len} comma-separated scalars, found {}", parts.len())));
    }
    parts
        .iter()
        .enumerate()
        .map(|(i, p)| scalar_from_json(f, &Value::String(p.to_string()), &format!("{what}[{i}]")).map_err(usage))
        .collect()
}

fn cmd_representative<F: OrbitField>(f: &F, cubic: &str) -> Result<Outcome, CliError> {
    let c = scalar_list(f, cubic, 4, "--cubic")?;
    let form = BinaryCubic::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone());
    let x = representative_for_cubic(&form).map_err(failure)?;
    Ok(emit(document(f, &x), true))
}

fn cmd_local_triality<F: Field>(f: &F, index: Option<usize>) -> Result<Outcome, CliError> {
    let basis = so_q_basis(f);
    let range = match index {
        Some(k) if k < basis.len() => k..k + 1,
        Some(k) => return Err(usage(format!("--index {k} out of range 0-{}", basis.len() - 1))),
        None => 0..basis.len(),
    };
    let mut ok = true;
    let mut out = Vec::new();
    for k in range {
        let t1 = &basis[k];
        let (t2, t3) = local_triality_solve(t1).map_err(failure)?;
        let holds = satisfies_local_triality(t1, &t2, &t3);
        let cyclic = satisfies_local_triality(&t2, t1, &hat(&t3));
        ok &= holds && cyclic;
        out.push(json!({
            "index": k,
            "t1": matrix_to_json(t1),
            "t2": matrix_to_json(&t2),
            "t3": matrix_to_json(&t3),
            "satisfied": holds,
            "cyclic_satisfied": cyclic,
        }));
    }
    Ok(emit(report(f, "local-triality", Value::Array(out)), ok))
}

fn cmd_same_orbit<F: OrbitField>(f: &F, dx: &RawDocument, dy: &RawDocument) -> Result<Outcome, CliError> {
    let x = semistable_pair(f, dx)?;
    let y = semistable_pair(f, dy)?;
    let same = same_orbit::<F>(&x, &y).map_err(failure)?;
    let (cx, cy) = (classify::<F>(&x).map_err(failure)?, classify::<F>(&y).map_err(failure)?);
    let v = json!({ "same_orbit": same, "class_x": cx.to_string(), "class_y": cy.to_string() });
    Ok(emit(report(f, "same-orbit", v), true))
}

fn dump_basis<F: Field>(f: &F) -> Value {
    let table: Vec<Vec<Vec<Value>>> = structure_table(f)
        .iter()
        .map(|row| row.iter().map(|c| c.iter().map(scalar_to_json).collect()).collect())
        .collect();
    let v = json!({
        "norm": "u1 u2 + u3 u4 + u5 u6 + u7 u8",
        "unit": Json::<F>::to_json(&Octonion::one(f)),
        "gram": matrix_to_json(&gram(f)),
        "products": table,
    });
    report(f, "octonion-basis", v)
}

fn generator<F: Field>(f: &F, name: &str, args: &[String]) -> Result<GElement<F::Elem>, CliError> {
    let want = |n: usize| -> Result<(), CliError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(usage(format!("{name} takes {n} argument(s), got {}", args.len())))
        }
    };
    let oct = |s: &str| -> Result<Octonion<F::Elem>, CliError> {
        Ok(Octonion::from_coords(scalar_list(f, s, 8, "octonion")?).expect("8"))
    };
    let g1 = |r: Result<GroupElement<F::Elem>, _>| r.map(GElement::from_g1).map_err(usage);
    let indices = |s: &str| -> Result<Vec<usize>, CliError> {
        s.split(',').map(|p| p.trim().parse::<usize>().map_err(|_| usage(format!("bad index list {s:?}")))).collect()
    };
    match name {
        "d1" | "d2" | "d3" => {
            want(1)?;
            g1(d_i(name[1..].parse().expect("digit"), &oct(&args[0])?))
        }
        "d-diag" => {
            want(1)?;
            let a = scalar_list(f, &args[0], 3, "d-diag")?;
            g1(d_diag([a[0].clone(), a[1].clone(), a[2].clone()]))
        }
        "n12" | "n13" | "n21" | "n23" | "n31" | "n32" => {
            want(1)?;
            let (i, j) = (name[1..2].parse().expect("digit"), name[2..3].parse().expect("digit"));
            g1(n_ij(i, j, &oct(&args[0])?))
        }
        "b1" | "b2" => {
            want(1)?;
            g1(b_i(name[1..].parse().expect("digit"), &oct(&args[0])?))
        }
        "script-d" => {
            want(1)?;
            g1(script_d(&oct(&args[0])?))
        }
        "nu" => {
            want(0)?;
            Ok(GElement::from_g1(nu(f)))
        }
        "perm" => {
            want(1)?;
            let s = indices(&args[0])?;
            let mut sorted = s.clone();
            sorted.sort();
            if sorted != [1, 2, 3] {
                return Err(usage("perm takes a permutation of 1,2,3"));
            }
            Ok(GElement::from_g1(permutation(f, [s[0] - 1, s[1] - 1, s[2] - 1])))
        }
        "rho1" => {
            want(1)?;
            let a = scalar_list(f, &args[0], 9, "rho1")?;
            let m = Mat::from_rows(f, a.chunks(3).map(|r| r.to_vec()).collect()).map_err(usage)?;
            g1(rho1(&m))
        }
        "tau1" | "tau2" => {
            want(0)?;
            tau(f, name[3..].parse().expect("digit")).map_err(usage)
        }
        "xi0" => {
            want(2)?;
            let t = scalar_list(f, &args[0], 1, "xi0 t")?.remove(0);
            let triple = TrialityTriple::spin_from_unit(&oct(&args[1])?).map_err(usage)?;
            xi0(&t, &triple).map_err(usage)
        }
        "gl2" => {
            want(1)?;
            let a = scalar_list(f, &args[0], 4, "gl2")?;
            GElement::gl2_entries(a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone()).map_err(usage)
        }
        _ => Err(usage(format!("unknown generator {name:?}"))),
    }
}
