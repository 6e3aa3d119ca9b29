//! End-to-end acceptance battery: ten numbered checks, one printed
//! PASS/FAIL line each. Tolerances and runtime budgets are pinned here in
//! code. The binary-facing checks run the built `rrb` executable; the rest
//! drive the library directly.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rrb_core::bch::{bch, BchScalar, NcPoly};
use rrb_core::domain::{ball_elements, box_elements, build_domain, DomainPolicy};
use rrb_core::groups::{
    closure, fingerprint, Action, Group, GroupFingerprint, ScaledProjAction, Symmetric,
};
use rrb_core::lie::{Family, OperatorFamily};
use rrb_core::perm_rb::{
    enumerate_single, sign_rep_operator, well_defined_check, RecursiveRbOp, SigmaTuple,
};
use rrb_core::rbops::{
    brace_from_rrb, descendent, gamma_function, gamma_matches_operator, pregroup_check,
    verify_derived_identities, verify_rrb, FnOp, RelRbOp, TripleBudget,
};
use rrb_core::tstruct::{cyclic_reconstruct, t_from_rrb, t_scaling_check, TStructure};
use rrb_core::ybe::{restrict_to_basis, roundtrip_check, structure_group, ybe_check};
use rrb_core::{AbSignature, IntVec, Perm, Rat};
use serde_json::Value;

type CheckResult = Result<(), String>;

fn fail(msg: impl Into<String>) -> CheckResult {
    Err(msg.into())
}

fn golden_dir() -> PathBuf {
    std::env::var("RRB_GOLDEN_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|_| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden"))
}

fn run_cli(args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rrb"))
        .args(args)
        .output()
        .map_err(|e| format!("could not launch the binary: {e}"))?;
    let code = out.status.code().unwrap_or(-1);
    let doc = serde_json::from_slice(&out.stdout).map_err(|e| {
        format!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok((code, doc))
}

/// Canonical set-comparison key for a serialized generating tuple.
fn tuple_key(v: &Value) -> String {
    format!(
        "{}|{}",
        v["sigma"],
        v.get("sigma_bar").cloned().unwrap_or(Value::Null)
    )
}

fn tuple_set(list: &Value) -> Result<BTreeSet<String>, String> {
    Ok(list
        .as_array()
        .ok_or("expected a JSON array of tuples")?
        .iter()
        .map(tuple_key)
        .collect())
}

fn parse_perms(specs: &[&str], n: usize) -> Vec<Perm> {
    specs
        .iter()
        .map(|s| Perm::parse_cycles(s, n).expect("valid cycle string"))
        .collect()
}

fn degree3_singles() -> Vec<SigmaTuple> {
    let tuples = enumerate_single(3).expect("degree-3 enumeration");
    assert_eq!(tuples.len(), 10, "the degree-3 list is the fixed point of the battery");
    tuples
}

// --- criterion 1 -----------------------------------------------------------

fn c01_degree3_list_matches_golden() -> CheckResult {
    let (code, doc) = run_cli(&["enumerate", "--n", "3"])?;
    if code != 0 {
        return fail(format!("exit code {code}, expected 0"));
    }
    if doc["result"]["count"] != 10 {
        return fail(format!("count {} != 10", doc["result"]["count"]));
    }
    let got = tuple_set(&doc["result"]["tuples"])?;
    let path = golden_dir().join("sigma_n3.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("could not read {}: {e}", path.display()))?;
    let golden: Value =
        serde_json::from_str(&text).map_err(|e| format!("golden file is not JSON: {e}"))?;
    let want = tuple_set(&golden)?;
    if got != want {
        return fail(format!(
            "tuple sets differ: missing {:?}, unexpected {:?}",
            want.difference(&got).collect::<Vec<_>>(),
            got.difference(&want).collect::<Vec<_>>(),
        ));
    }
    Ok(())
}

// --- criterion 2 -----------------------------------------------------------

fn c02_degree4_count() -> CheckResult {
    let (code, doc) = run_cli(&["enumerate", "--n", "4", "--count-only", "--threads", "1"])?;
    if code != 0 {
        return fail(format!("exit code {code}, expected 0"));
    }
    if doc["result"]["count"] != 88 {
        return fail(format!("count {} != 88", doc["result"]["count"]));
    }
    Ok(())
}

// --- criterion 3 -----------------------------------------------------------

fn c03_degree3_pairs() -> CheckResult {
    let (code, doc) = run_cli(&["enumerate", "--n", "3", "--pairs"])?;
    if code != 0 {
        return fail(format!("exit code {code}, expected 0"));
    }
    if doc["result"]["count"] != 2 || doc["result"]["unordered_count"] != 1 {
        return fail(format!(
            "expected 2 ordered / 1 unordered, got {} / {}",
            doc["result"]["count"], doc["result"]["unordered_count"]
        ));
    }
    let got = tuple_set(&doc["result"]["tuples"])?;
    // The two constant three-cycle pairings, one the coordinate-wise
    // inverse of the other.
    let c = serde_json::json!([[2, 3, 1], [2, 3, 1], [2, 3, 1]]);
    let ci = serde_json::json!([[3, 1, 2], [3, 1, 2], [3, 1, 2]]);
    let want: BTreeSet<String> = [
        serde_json::json!({"n": 3, "sigma": c, "sigma_bar": ci}),
        serde_json::json!({"n": 3, "sigma": ci, "sigma_bar": c}),
    ]
    .iter()
    .map(tuple_key)
    .collect();
    if got != want {
        return fail(format!("pair sets differ: got {got:?}, want {want:?}"));
    }
    Ok(())
}

// --- criterion 4 -----------------------------------------------------------

fn c04_degree4_dihedral_image() -> CheckResult {
    let sigma = parse_perms(&["(2 4)", "(1 3)", "(1 4 3 2)", "(1 2 3 4)"], 4);
    let t = SigmaTuple::single(sigma).map_err(|e| e.to_string())?;
    if !t.satisfies_conditions() {
        return fail("the tuple fails the compatibility conditions");
    }
    let g = Symmetric { n: 4 };
    let cl = closure(&g, &t.sigma, 16);
    if !cl.stabilized {
        return fail("generated subgroup did not stabilize within 16 factors");
    }
    let fp = fingerprint(&g, &cl.elements);
    let want = GroupFingerprint {
        order: 8,
        abelian: false,
        order_multiset: BTreeMap::from([(1, 1), (2, 5), (4, 2)]),
    };
    if fp != want {
        return fail(format!("fingerprint {fp:?} is not the dihedral one {want:?}"));
    }
    Ok(())
}

// --- criterion 5 -----------------------------------------------------------

fn c05_degree3_batteries() -> CheckResult {
    for t in degree3_singles() {
        let label = format!("{t:?}");
        let op = Arc::new(RecursiveRbOp::new(t).map_err(|e| e.to_string())?);
        let sig = op.action().signature().clone();
        let domain = build_domain(
            &sig,
            &DomainPolicy::Bounded {
                k: 3,
                extra_pairs: 0,
                seed: 42,
            },
        )
        .map_err(|e| e.to_string())?;

        let relation = verify_rrb(op.as_ref(), &domain).map_err(|e| e.to_string())?;
        if !relation.holds {
            return fail(format!("{label}: defining relation fails: {relation:?}"));
        }
        let derived = verify_derived_identities(op.as_ref(), &domain).map_err(|e| e.to_string())?;
        if !derived.holds {
            return fail(format!("{label}: derived identities fail: {derived:?}"));
        }
        let pre = pregroup_check(op.as_ref(), &domain, TripleBudget::default())
            .map_err(|e| e.to_string())?;
        if !pre.holds {
            return fail(format!("{label}: pre-group laws fail: {pre:?}"));
        }
        let (_, brace) = brace_from_rrb(op.clone(), &domain, TripleBudget::default())
            .map_err(|e| e.to_string())?;
        if !brace.holds {
            return fail(format!("{label}: brace law fails: {brace:?}"));
        }
        let box3 = box_elements(&sig, 3).map_err(|e| e.to_string())?;
        let scaling = t_scaling_check(op.as_ref(), &box3, 4);
        if !scaling.holds {
            return fail(format!("{label}: scaling identity fails: {scaling:?}"));
        }
        let wd = well_defined_check(op.as_ref(), 4);
        if !wd.holds {
            return fail(format!("{label}: reduction-order independence fails: {wd:?}"));
        }
    }
    Ok(())
}

// --- criterion 6 -----------------------------------------------------------

fn c06_induced_solutions() -> CheckResult {
    for t in degree3_singles() {
        let label = format!("{t:?}");
        let op = RecursiveRbOp::new(t).map_err(|e| e.to_string())?;
        let sol = restrict_to_basis(&op).map_err(|e| e.to_string())?;
        let checks = ybe_check(&sol);
        if !checks.holds {
            return fail(format!("{label}: solution checks fail: {checks:?}"));
        }
        let rt = roundtrip_check(&sol, 4).map_err(|e| e.to_string())?;
        if !rt.holds {
            return fail(format!("{label}: exchange-map round trip fails: {rt:?}"));
        }
        let sg = structure_group(&sol, 4).map_err(|e| e.to_string())?;
        let sig = op.action().signature().clone();
        for v in ball_elements(&sig, 3).map_err(|e| e.to_string())? {
            match sg.rr_map.get(&v) {
                Some(p) if *p == op.eval(&v) => {}
                Some(p) => {
                    return fail(format!(
                        "{label}: structure-group value {p} differs from the recursion at {v}"
                    ))
                }
                None => {
                    return fail(format!(
                        "{label}: vector {v} of norm <= 3 is missing from the bound-4 enumeration"
                    ))
                }
            }
        }
    }
    Ok(())
}

// --- criterion 7 -----------------------------------------------------------

fn c07_semidirect_symmetric_image() -> CheckResult {
    let act = ScaledProjAction::new(3, 2, 2).map_err(|e| e.to_string())?;
    let op = Arc::new(FnOp::new(act, |v: &IntVec| v.get(1)));
    let domain =
        build_domain(op.action().signature(), &DomainPolicy::Exhaustive).map_err(|e| e.to_string())?;
    let desc = descendent(op, &domain).map_err(|e| e.to_string())?;
    let elems = desc
        .enumerate()
        .ok_or("finite descendent group failed to enumerate")?;
    let fp = fingerprint(&desc, &elems);
    let want = GroupFingerprint {
        order: 6,
        abelian: false,
        order_multiset: BTreeMap::from([(1, 1), (2, 3), (3, 2)]),
    };
    if fp != want {
        return fail(format!("fingerprint {fp:?} is not the symmetric one {want:?}"));
    }
    Ok(())
}

// --- criterion 8 -----------------------------------------------------------

fn c08_exact_series() -> CheckResult {
    let q = |n: i64, d: i64| <Rat as BchScalar>::ratio(n, d);
    let x = NcPoly::<Rat>::generator(2, 3, 0);
    let y = NcPoly::<Rat>::generator(2, 3, 1);
    let z = bch(&x, &y).map_err(|e| e.to_string())?;

    // Degrees 1 and 2, and the full degree-3 component by word.
    let words: [(&[u8], (i64, i64)); 12] = [
        (&[0], (1, 1)),
        (&[1], (1, 1)),
        (&[0, 1], (1, 2)),
        (&[1, 0], (-1, 2)),
        (&[0, 0, 0], (0, 1)),
        (&[1, 1, 1], (0, 1)),
        (&[0, 0, 1], (1, 12)),
        (&[0, 1, 0], (-1, 6)),
        (&[1, 0, 0], (1, 12)),
        (&[1, 1, 0], (1, 12)),
        (&[1, 0, 1], (-1, 6)),
        (&[0, 1, 1], (1, 12)),
    ];
    for (w, (n, d)) in words {
        if z.coeff(w) != q(n, d) {
            return fail(format!("coefficient on word {w:?} is {}, want {n}/{d}", z.coeff(w)));
        }
    }

    // The same component as brackets. [x2,[x2,x1]] = -[x2,[x1,x2]], so the
    // two displayed forms carry +1/12 and -1/12 on the respective brackets;
    // both identities are asserted exactly.
    let xxy = x.bracket(&x.bracket(&y));
    let yyx = y.bracket(&y.bracket(&x));
    let yxy = y.bracket(&x.bracket(&y));
    let deg3 = z.homogeneous(3);
    if deg3 != xxy.scale(&q(1, 12)).add(&yyx.scale(&q(1, 12))) {
        return fail("degree-3 component is not (1/12)[x1,[x1,x2]] + (1/12)[x2,[x2,x1]]");
    }
    if deg3 != xxy.scale(&q(1, 12)).add(&yxy.scale(&q(-1, 12))) {
        return fail("degree-3 component is not (1/12)[x1,[x1,x2]] - (1/12)[x2,[x1,x2]]");
    }

    // Associativity, exact, three generators at degree 4.
    let a = NcPoly::<Rat>::generator(3, 4, 0);
    let b = NcPoly::<Rat>::generator(3, 4, 1);
    let c = NcPoly::<Rat>::generator(3, 4, 2);
    let left = bch(&bch(&a, &b).map_err(|e| e.to_string())?, &c).map_err(|e| e.to_string())?;
    let right = bch(&a, &bch(&b, &c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if left != right {
        return fail("the composition law is not associative at degree 4");
    }

    // Primitivity through degree 4, certified by the degree-grading operator.
    for degree in 1..=4usize {
        let xd = NcPoly::<Rat>::generator(2, degree, 0);
        let yd = NcPoly::<Rat>::generator(2, degree, 1);
        if !bch(&xd, &yd).map_err(|e| e.to_string())?.is_lie() {
            return fail(format!("the series is not a Lie element at degree {degree}"));
        }
    }
    Ok(())
}

// --- criterion 9 -----------------------------------------------------------

fn c09_numeric_families() -> CheckResult {
    const RB_TOL: f64 = 1e-9;
    const DERIV_TOL: f64 = 1e-6;
    const AGREE_TOL: f64 = 1e-10;
    const INVOL_TOL: f64 = 1e-9;
    const SAMPLES: usize = 1000;

    for &s in &[-1.0f64, -0.5, 0.5, 1.0] {
        for kind in [Family::Bs, Family::Bsp, Family::Rs] {
            let fam = OperatorFamily::new(kind, s);
            let label = format!("{kind:?} at s={s}");

            let rb = fam.rb_check(SAMPLES, 42);
            if !(rb.holds && rb.max_residual < RB_TOL && rb.tolerance == RB_TOL) {
                return fail(format!(
                    "{label}: relation residual {} exceeds {RB_TOL}",
                    rb.max_residual
                ));
            }
            let agree = fam.upsilon_agreement_check(SAMPLES, 43);
            if !(agree.holds && agree.tolerance == AGREE_TOL) {
                return fail(format!(
                    "{label}: closed exchange form deviates by {}",
                    agree.max_residual
                ));
            }
            let invol = fam.upsilon_involution_check(SAMPLES, 44);
            if !(invol.holds && invol.tolerance == INVOL_TOL) {
                return fail(format!(
                    "{label}: exchange map fails involutivity by {}",
                    invol.max_residual
                ));
            }
            let deriv = fam.derivative_check(SAMPLES, 45);
            if !(deriv.holds && deriv.tolerance == DERIV_TOL) {
                return fail(format!(
                    "{label}: derivative at zero deviates by {}",
                    deriv.max_residual
                ));
            }
        }
    }
    Ok(())
}

// --- criterion 10 ----------------------------------------------------------

fn corpus_op_checks<R>(label: &str, op: Arc<R>, window: u64, policy: &DomainPolicy) -> CheckResult
where
    R: RelRbOp + 'static,
    R::A: Clone,
{
    let (_, t_rep) = t_from_rrb(op.clone(), window).map_err(|e| format!("{label}: {e}"))?;
    if !t_rep.holds {
        return fail(format!("{label}: scaling structure fails: {t_rep:?}"));
    }
    let domain =
        build_domain(op.action().signature(), policy).map_err(|e| format!("{label}: {e}"))?;
    let (view, brace) = brace_from_rrb(op.clone(), &domain, TripleBudget::default())
        .map_err(|e| format!("{label}: {e}"))?;
    if !brace.holds {
        return fail(format!("{label}: brace law fails: {brace:?}"));
    }
    let gamma = gamma_function(&view);
    let elements: Vec<IntVec> = domain.all().cloned().collect();
    let pointwise = gamma_matches_operator(op.as_ref(), &gamma, &elements);
    if !pointwise.holds {
        return fail(format!(
            "{label}: brace action differs from the operator action: {pointwise:?}"
        ));
    }
    Ok(())
}

fn c10_property_suite() -> CheckResult {
    let box2 = DomainPolicy::Bounded {
        k: 2,
        extra_pairs: 16,
        seed: 42,
    };

    // Recursive operators: all ten degree-3 generating tuples.
    for t in degree3_singles() {
        let label = format!("{t:?}");
        let op = Arc::new(RecursiveRbOp::new(t).map_err(|e| e.to_string())?);
        corpus_op_checks(&label, op, 3, &box2)?;
    }

    // Sign-representation operators on the integers.
    let window6 = DomainPolicy::Bounded {
        k: 6,
        extra_pairs: 0,
        seed: 42,
    };
    for (n, r1) in [(2usize, "(1 2)"), (3, "(1 3)")] {
        let r1 = Perm::parse_cycles(r1, n).map_err(|e| e.to_string())?;
        let op = Arc::new(sign_rep_operator(n, r1.clone(), r1).map_err(|e| e.to_string())?);
        corpus_op_checks(&format!("sign-rep degree {n}"), op, 6, &window6)?;
    }

    // The finite semidirect projection operator.
    let act = ScaledProjAction::new(3, 2, 2).map_err(|e| e.to_string())?;
    let op = Arc::new(FnOp::new(act, |v: &IntVec| v.get(1)));
    corpus_op_checks("projection 3,2,2", op, 6, &DomainPolicy::Exhaustive)?;

    // Identity structures over every cyclic modulus up to 12 reconstruct the
    // trivial brace: all multipliers 1, star = addition.
    for m in 1..=12u64 {
        let t = TStructure::identity(AbSignature(vec![m]), m).map_err(|e| e.to_string())?;
        let datum = cyclic_reconstruct(&t).map_err(|e| e.to_string())?;
        if !datum.report.holds {
            return fail(format!("modulus {m}: reconstruction report fails"));
        }
        let mi = m as i64;
        if datum.rho != vec![1i64.rem_euclid(mi); m as usize] {
            return fail(format!("modulus {m}: multipliers {:?} are not all 1", datum.rho));
        }
        for x in 0..mi {
            for y in 0..mi {
                if datum.star_of(x, y) != (x + y).rem_euclid(mi) {
                    return fail(format!("modulus {m}: star({x},{y}) is not addition"));
                }
            }
        }
    }
    Ok(())
}

// --- harness ----------------------------------------------------------------

#[test]
fn acceptance() {
    let checks: [(&str, Option<Duration>, fn() -> CheckResult); 10] = [
        ("01 degree-3 list matches the frozen golden set", Some(Duration::from_secs(1)), c01_degree3_list_matches_golden),
        ("02 degree-4 count is 88 single-threaded", Some(Duration::from_secs(10)), c02_degree4_count),
        ("03 degree-3 two-tuple extensions", Some(Duration::from_secs(5)), c03_degree3_pairs),
        ("04 degree-4 tuple generates the order-8 dihedral group", None, c04_degree4_dihedral_image),
        ("05 degree-3 operators pass the full battery", Some(Duration::from_secs(30)), c05_degree3_batteries),
        ("06 induced solutions: checks, round trip, agreement", None, c06_induced_solutions),
        ("07 semidirect projection descends to the symmetric group", None, c07_semidirect_symmetric_image),
        ("08 exact series coefficients, associativity, primitivity", Some(Duration::from_secs(5)), c08_exact_series),
        ("09 numeric families within pinned tolerances", Some(Duration::from_secs(10)), c09_numeric_families),
        ("10 property suite over the operator corpus", None, c10_property_suite),
    ];

    let mut failures = Vec::new();
    for (label, budget, run) in checks {
        let start = Instant::now();
        let mut result = run();
        let elapsed = start.elapsed();
        if result.is_ok() {
            if let Some(b) = budget {
                if elapsed > b {
                    result = fail(format!("runtime {elapsed:.2?} exceeds the {b:?} budget"));
                }
            }
        }
        match &result {
            Ok(()) => println!("criterion {label}: PASS ({elapsed:.2?})"),
            Err(msg) => {
                println!("criterion {label}: FAIL ({elapsed:.2?}) - {msg}");
                failures.push(format!("{label}: {msg}"));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance failures:\n{}",
        failures.join("\n")
    );
}
