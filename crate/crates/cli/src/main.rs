//! Command-line driver: enumeration, verification, construction, and report
//! export for the weight-0 operator library.
//!
//! Exit codes: 0 = all checks pass, 1 = a mathematical check failed (the JSON
//! report carries the counterexample), 2 = usage or input error.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rrb_core::bch::{bch, lie_to_lyndon, NcPoly};
use rrb_core::domain::{build_domain, DomainPolicy, VerifyDomain};
use rrb_core::groups::action::{Action, ScaledProjAction};
use rrb_core::groups::group::{check_group_axioms, fingerprint, Group};
use rrb_core::lie::{Family, OperatorFamily};
use rrb_core::perm_rb::{
    enumerate_pairs, enumerate_single, sign_rep_operator, sign_rep_signature,
    unordered_pair_count, well_defined_check, RecursiveRbOp, SigmaTuple,
};
use rrb_core::rbops::{
    brace_from_rrb, cocycle_check, gamma_check, gamma_function, gamma_matches_operator,
    graph_subgroup_check, pregroup_check, verify_derived_identities, verify_rrb, FnOp, OneCocycle,
    RelRbOp, TripleBudget,
};
use rrb_core::report::{combine, Report};
use rrb_core::tstruct::{cyclic_reconstruct, tstruct_check, TStructure};
use rrb_core::ybe::{adjoint_cocycle_check, structure_group, ybe_check, SetYBE};
use rrb_core::{CoreError, IntVec, Perm, Rat};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "rrb",
    version,
    about = "Relative Rota-Baxter operators of weight zero: enumeration, verification, and derived structures"
)]
struct Cli {
    /// Cap internal parallelism (default: all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for every randomized sampling step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Also write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the compatible permutation tuples of degree n.
    Enumerate {
        /// Degree of the symmetric group.
        #[arg(long)]
        n: usize,
        /// Enumerate ordered pairs of distinct compatible tuples instead of
        /// single tuples.
        #[arg(long)]
        pairs: bool,
        /// Emit only the count, not the tuples.
        #[arg(long)]
        count_only: bool,
    },

    /// Verify the defining relation and the derived laws for an operator.
    Verify(VerifyArgs),

    /// Set-theoretic Yang-Baxter solutions.
    Ybe {
        #[command(subcommand)]
        sub: YbeCmd,
    },

    /// Brace induced by the projection operator on Z_m x Z_n, where a
    /// generator of Z_n scales the first coordinate by r.
    Brace {
        /// Modulus of the scaled coordinate.
        #[arg(long)]
        m: u64,
        /// Order of the acting cyclic group.
        #[arg(long)]
        n: u64,
        /// Scaling unit (must satisfy r^n = 1 mod m).
        #[arg(long)]
        r: i64,
    },

    /// T-structure verification and cyclic reconstruction.
    Tstruct {
        #[command(subcommand)]
        sub: TstructCmd,
    },

    /// Floating-point checks for the closed-form matrix operator families.
    Lie {
        #[command(subcommand)]
        sub: LieCmd,
    },

    /// Exact truncated series of log(exp(x1) exp(x2)).
    Bch {
        /// Number of generators (at least 2).
        #[arg(long)]
        gens: u8,
        /// Truncation degree.
        #[arg(long)]
        degree: usize,
        /// Also decompose into the Lyndon bracket basis.
        #[arg(long)]
        lyndon: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Degree of the symmetric group (tuple and sign-representation modes).
    #[arg(long)]
    n: Option<usize>,

    /// Comma-separated cycle strings, one per basis vector,
    /// e.g. "(2 4),(1 3),(1 4 3 2),(1 2 3 4)".
    #[arg(long)]
    tuple: Option<String>,

    /// Second tuple for the two-tuple extension (values at -e_i).
    #[arg(long)]
    tuple_bar: Option<String>,

    /// Sign-representation mode: value at +1 (cycle string).
    #[arg(long)]
    r1: Option<String>,

    /// Sign-representation mode: value at -1 (cycle string; ignored when the
    /// value at +1 is even).
    #[arg(long)]
    rm1: Option<String>,

    /// Semidirect projection module "m,n,r": operator on Z_m x Z_n projecting
    /// onto the second coordinate.
    #[arg(long, value_name = "M,N,R")]
    semidirect: Option<String>,

    /// Half-width of the verification box for free coordinates.
    /// Default scales with the degree: 3 up to degree 3, 2 at degree 4,
    /// 1 above (the box grows as (2k+1)^degree and every check is at
    /// least quadratic in its size).
    #[arg(long)]
    bound: Option<i64>,
}

fn default_bound(degree: usize) -> i64 {
    match degree {
        0..=3 => 3,
        4 => 2,
        _ => 1,
    }
}

#[derive(Subcommand)]
enum YbeCmd {
    /// Validate a solution file: involutivity, braid relation, compatibility.
    Check {
        /// JSON file with {"n": ..., "sigma": [[...]], "tau": [[...]]}.
        file: PathBuf,
    },
    /// Build the degree-n solution induced by a compatible tuple.
    FromTuple {
        #[arg(long)]
        n: usize,
        /// Comma-separated cycle strings, one per basis vector.
        #[arg(long)]
        tuple: String,
        #[arg(long)]
        tuple_bar: Option<String>,
    },
    /// Structure-group reconstruction and round trip within a word bound.
    Roundtrip {
        file: PathBuf,
        /// Word-length bound for the enumerated structure group.
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
}

#[derive(Subcommand)]
enum TstructCmd {
    /// Check the defining scaling law on a serialized structure.
    Check {
        /// JSON file with {"moduli": [...], "map": [[[..],[..]], ...]}.
        file: PathBuf,
        /// Exponent range "A:B" for the scaling law.
        #[arg(long, default_value = "-6:6")]
        krange: String,
    },
    /// Reconstruct the brace datum of a bijection of Z_m.
    Reconstruct {
        #[arg(long)]
        modulus: u64,
        /// Comma-separated images of 0..m-1, e.g. "0,5,2,3,4,1".
        #[arg(long)]
        table: String,
    },
}

#[derive(Subcommand)]
enum LieCmd {
    /// Run the residual, determinant, derivative, and exchange-map checks
    /// for one family.
    Check {
        /// Family name: Bs, Bsp, or Rs.
        #[arg(long)]
        family: String,
        /// Family parameter.
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        /// Sample count per check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

/// A mathematical verdict was reached and it is negative.
struct MathFail(String);

enum Outcome {
    /// Payload plus overall verdict.
    Done(Value, bool),
}

type RunResult = Result<Outcome, RunError>;

enum RunError {
    Usage(anyhow::Error),
    Math(MathFail),
}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        RunError::Usage(e)
    }
}

/// Input-position errors: could not build the objects to check.
fn usage(e: impl std::fmt::Display) -> RunError {
    RunError::Usage(anyhow!("{}", e))
}

/// Check-position errors: the objects were built and the math said no.
fn math(e: impl std::fmt::Display) -> RunError {
    RunError::Math(MathFail(e.to_string()))
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .is_err()
        {
            eprintln!("error: could not configure the thread pool");
            return 2;
        }
    }
    let started = Instant::now();
    let (command_name, args_echo) = describe(&cli.command, cli.seed);
    let outcome = run(&cli);
    let (result, holds, code) = match outcome {
        Ok(Outcome::Done(payload, holds)) => (payload, holds, if holds { 0 } else { 1 }),
        Err(RunError::Math(MathFail(msg))) => (json!({ "error": msg }), false, 1),
        Err(RunError::Usage(e)) => {
            eprintln!("error: {:#}", e);
            return 2;
        }
    };
    let envelope = json!({
        "command": command_name,
        "args": args_echo,
        "seed": cli.seed,
        "holds": holds,
        "result": result,
        "wall_ms": started.elapsed().as_millis() as u64,
    });
    let text = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    println!("{}", text);
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, format!("{}\n", text)) {
            eprintln!("error: could not write {}: {}", path.display(), e);
            return 2;
        }
    }
    code
}

/// Stable echo of the effective inputs, embedded in every report.
fn describe(cmd: &Cmd, seed: u64) -> (&'static str, Value) {
    let _ = seed;
    match cmd {
        Cmd::Enumerate { n, pairs, count_only } => (
            "enumerate",
            json!({"n": n, "pairs": pairs, "count_only": count_only}),
        ),
        Cmd::Verify(a) => (
            "verify",
            json!({
                "n": a.n,
                "tuple": a.tuple,
                "tuple_bar": a.tuple_bar,
                "r1": a.r1,
                "rm1": a.rm1,
                "semidirect": a.semidirect,
                "bound": a.bound,
            }),
        ),
        Cmd::Ybe { sub } => match sub {
            YbeCmd::Check { file } => ("ybe_check", json!({"file": file.display().to_string()})),
            YbeCmd::FromTuple { n, tuple, tuple_bar } => (
                "ybe_from_tuple",
                json!({"n": n, "tuple": tuple, "tuple_bar": tuple_bar}),
            ),
            YbeCmd::Roundtrip { file, bound } => (
                "ybe_roundtrip",
                json!({"file": file.display().to_string(), "bound": bound}),
            ),
        },
        Cmd::Brace { m, n, r } => ("brace", json!({"m": m, "n": n, "r": r})),
        Cmd::Tstruct { sub } => match sub {
            TstructCmd::Check { file, krange } => (
                "tstruct_check",
                json!({"file": file.display().to_string(), "krange": krange}),
            ),
            TstructCmd::Reconstruct { modulus, table } => (
                "tstruct_reconstruct",
                json!({"modulus": modulus, "table": table}),
            ),
        },
        Cmd::Lie { sub } => match sub {
            LieCmd::Check { family, s, samples } => (
                "lie_check",
                json!({"family": family, "s": s, "samples": samples}),
            ),
        },
        Cmd::Bch { gens, degree, lyndon } => (
            "bch",
            json!({"gens": gens, "degree": degree, "lyndon": lyndon}),
        ),
    }
}

fn run(cli: &Cli) -> RunResult {
    match &cli.command {
        Cmd::Enumerate { n, pairs, count_only } => run_enumerate(*n, *pairs, *count_only),
        Cmd::Verify(args) => run_verify(args, cli.seed),
        Cmd::Ybe { sub } => match sub {
            YbeCmd::Check { file } => run_ybe_check(file),
            YbeCmd::FromTuple { n, tuple, tuple_bar } => {
                run_ybe_from_tuple(*n, tuple, tuple_bar.as_deref())
            }
            YbeCmd::Roundtrip { file, bound } => run_ybe_roundtrip(file, *bound),
        },
        Cmd::Brace { m, n, r } => run_brace(*m, *n, *r, cli.seed),
        Cmd::Tstruct { sub } => match sub {
            TstructCmd::Check { file, krange } => run_tstruct_check(file, krange),
            TstructCmd::Reconstruct { modulus, table } => run_tstruct_reconstruct(*modulus, table),
        },
        Cmd::Lie { sub } => match sub {
            LieCmd::Check { family, s, samples } => run_lie_check(family, *s, *samples, cli.seed),
        },
        Cmd::Bch { gens, degree, lyndon } => run_bch(*gens, *degree, *lyndon),
    }
}

fn run_enumerate(n: usize, pairs: bool, count_only: bool) -> RunResult {
    let tuples = if pairs {
        enumerate_pairs(n).map_err(usage)?
    } else {
        enumerate_single(n).map_err(usage)?
    };
    let mut payload = json!({
        "n": n,
        "pairs": pairs,
        "count": tuples.len(),
    });
    if pairs {
        payload["unordered_count"] = json!(unordered_pair_count(&tuples));
    }
    if !count_only {
        payload["tuples"] = serde_json::to_value(&tuples).expect("tuples serialize");
    }
    Ok(Outcome::Done(payload, true))
}

/// Parses "(1 2),(2 3),()" into one permutation per comma-separated part.
fn parse_perm_list(s: &str, n: usize) -> Result<Vec<Perm>, RunError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(usage(format!(
            "expected {} comma-separated permutations, got {}",
            n,
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| Perm::parse_cycles(p, n).map_err(usage))
        .collect()
}

fn parse_one_perm(s: &str, n: usize) -> Result<Perm, RunError> {
    Perm::parse_cycles(s.trim(), n).map_err(usage)
}

fn run_verify(args: &VerifyArgs, seed: u64) -> RunResult {
    let modes = [
        args.tuple.is_some(),
        args.r1.is_some(),
        args.semidirect.is_some(),
    ];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return Err(usage(
            "pick exactly one mode: --tuple, --r1 (sign representation), or --semidirect",
        ));
    }

    if let Some(spec) = &args.semidirect {
        return verify_semidirect(spec, seed);
    }

    let n = args
        .n
        .ok_or_else(|| usage("--n is required in this mode"))?;

    if let Some(tuple) = &args.tuple {
        let sigma = parse_perm_list(tuple, n)?;
        let t = match &args.tuple_bar {
            Some(bar) => SigmaTuple::pair(sigma, parse_perm_list(bar, n)?).map_err(usage)?,
            None => SigmaTuple::single(sigma).map_err(usage)?,
        };
        return verify_tuple(t, args.bound.unwrap_or_else(|| default_bound(n)), seed);
    }

    // Sign-representation mode.
    let r1 = parse_one_perm(args.r1.as_ref().expect("mode checked"), n)?;
    let rm1 = match &args.rm1 {
        Some(s) => parse_one_perm(s, n)?,
        None => r1.inv(),
    };
    verify_sign_rep(n, r1, rm1, args.bound.unwrap_or_else(|| default_bound(1)), seed)
}

fn bounded(bound: i64, seed: u64) -> DomainPolicy {
    DomainPolicy::Bounded {
        k: bound,
        extra_pairs: 256,
        seed,
    }
}

/// The standard battery: defining relation, derived identities, graph
/// characterization, pre-group laws, brace law.
fn battery<R: RelRbOp + 'static>(
    op: Arc<R>,
    domain: &VerifyDomain,
    seed: u64,
) -> Result<Vec<Report>, CoreError>
where
    R::A: Clone,
{
    let budget = TripleBudget {
        seed,
        ..TripleBudget::default()
    };
    let relation = verify_rrb(op.as_ref(), domain)?;
    let relation_holds = relation.holds;
    let mut reports = vec![
        relation,
        verify_derived_identities(op.as_ref(), domain)?,
        graph_subgroup_check(op.as_ref(), domain)?,
        pregroup_check(op.as_ref(), domain, budget)?,
    ];
    // The brace only exists when the defining relation holds; a failed
    // relation already decides the verdict.
    if relation_holds {
        let (view, brace_rep) = brace_from_rrb(op.clone(), domain, budget)?;
        reports.push(brace_rep);
        let elements: Vec<IntVec> = domain.all().cloned().collect();
        let gamma = gamma_function(&view);
        // The homomorphism scan is cubic in list length, so large domains
        // get trimmed element/probe lists; the pointwise comparison below
        // stays on the full domain (it is only quadratic).
        let (gamma_elems, gamma_probes) = gamma_lists(&elements);
        reports.push(gamma_check(&gamma, &gamma_elems, &gamma_probes));
        reports.push(gamma_matches_operator(op.as_ref(), &gamma, &elements));
    }
    Ok(reports)
}

/// Element/probe lists for the cubic gamma scan: the full domain when it is
/// small, otherwise the sub-boxes of max-norm 2 and 1.
fn gamma_lists(all: &[IntVec]) -> (Vec<IntVec>, Vec<IntVec>) {
    if all.len() <= 400 {
        return (all.to_vec(), all.to_vec());
    }
    let max_norm = |v: &IntVec| v.coords().iter().map(|c| c.abs()).max().unwrap_or(0);
    let mut elems: Vec<IntVec> = all.iter().filter(|v| max_norm(v) <= 2).cloned().collect();
    let mut probes: Vec<IntVec> = all.iter().filter(|v| max_norm(v) <= 1).cloned().collect();
    if elems.is_empty() {
        elems = all.to_vec();
    }
    if probes.is_empty() {
        probes = elems.clone();
    }
    elems.truncate(350);
    probes.truncate(64);
    (elems, probes)
}

fn reports_payload(reports: &[Report]) -> (Value, bool) {
    let holds = reports.iter().all(|r| r.holds);
    (
        serde_json::to_value(reports).expect("reports serialize"),
        holds,
    )
}

fn verify_tuple(t: SigmaTuple, bound: i64, seed: u64) -> RunResult {
    let conditions = t.satisfies_conditions();
    let op = Arc::new(RecursiveRbOp::new_unchecked(t.clone()));
    let domain = build_domain(op.action().signature(), &bounded(bound, seed)).map_err(usage)?;
    let mut reports = battery(op.clone(), &domain, seed).map_err(math)?;
    reports.push(well_defined_check(op.as_ref(), bound.unsigned_abs() + 1));
    let (reports_json, reports_hold) = reports_payload(&reports);
    let holds = conditions && reports_hold;
    let payload = json!({
        "mode": "tuple",
        "tuple": serde_json::to_value(&t).expect("tuple serializes"),
        "bound": bound,
        "conditions_hold": conditions,
        "reports": reports_json,
    });
    Ok(Outcome::Done(payload, holds))
}

fn verify_sign_rep(n: usize, r1: Perm, rm1: Perm, bound: i64, seed: u64) -> RunResult {
    let op = sign_rep_operator(n, r1, rm1).map_err(math)?;
    let op = Arc::new(op);
    let domain = build_domain(&sign_rep_signature(), &bounded(bound, seed)).map_err(usage)?;
    let reports = battery(op, &domain, seed).map_err(math)?;
    let (reports_json, holds) = reports_payload(&reports);
    let payload = json!({
        "mode": "sign_rep",
        "n": n,
        "bound": bound,
        "reports": reports_json,
    });
    Ok(Outcome::Done(payload, holds))
}

fn projection_op(m: u64, n: u64, r: i64) -> Result<FnOp<ScaledProjAction, impl Fn(&IntVec) -> i64>, RunError> {
    let act = ScaledProjAction::new(m, n, r).map_err(usage)?;
    Ok(FnOp::new(act, |v: &IntVec| v.get(1)))
}

fn verify_semidirect(spec: &str, seed: u64) -> RunResult {
    let nums: Vec<i64> = spec
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("--semidirect expects \"m,n,r\": {}", e)))?;
    if nums.len() != 3 || nums[0] <= 0 || nums[1] <= 0 {
        return Err(usage("--semidirect expects three integers \"m,n,r\" with m, n positive"));
    }
    let (payload, holds) = semidirect_payload(nums[0] as u64, nums[1] as u64, nums[2], seed)?;
    Ok(Outcome::Done(payload, holds))
}

fn semidirect_payload(m: u64, n: u64, r: i64, seed: u64) -> Result<(Value, bool), RunError> {
    let op = Arc::new(projection_op(m, n, r)?);
    let domain = build_domain(op.action().signature(), &DomainPolicy::Exhaustive).map_err(usage)?;
    let mut reports = battery(op.clone(), &domain, seed).map_err(math)?;

    let elements: Vec<IntVec> = domain.all().cloned().collect();
    let desc = rrb_core::rbops::descendent(op.clone(), &domain).map_err(math)?;
    let enumerated = desc.enumerate().expect("finite signature enumerates");
    reports.push(check_group_axioms(&desc, &enumerated, 100_000, seed));

    let budget = TripleBudget {
        seed,
        ..TripleBudget::default()
    };
    let (view, _) = brace_from_rrb(op.clone(), &domain, budget).map_err(math)?;
    let coc = OneCocycle::<rrb_core::rbops::GammaAction>::identity_of_brace(&view);
    reports.push(cocycle_check(&coc, &elements, &elements));

    let fp = fingerprint(&desc, &enumerated);
    let (reports_json, holds) = reports_payload(&reports);
    let payload = json!({
        "mode": "semidirect",
        "m": m,
        "n": n,
        "r": r,
        "descendent_fingerprint": serde_json::to_value(&fp).expect("fingerprint serializes"),
        "reports": reports_json,
    });
    Ok((payload, holds))
}

fn run_brace(m: u64, n: u64, r: i64, seed: u64) -> RunResult {
    let (payload, holds) = semidirect_payload(m, n, r, seed)?;
    Ok(Outcome::Done(payload, holds))
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, RunError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("could not read {}", path.display()))
        .map_err(RunError::Usage)?;
    serde_json::from_str(&text)
        .with_context(|| format!("could not parse {}", path.display()))
        .map_err(RunError::Usage)
}

/// The raw shape of a solution file, before any mathematical validation.
#[derive(serde::Deserialize)]
struct RawSolutionShape {
    #[allow(dead_code)]
    n: usize,
    #[allow(dead_code)]
    sigma: Vec<Vec<usize>>,
    #[allow(dead_code)]
    tau: Vec<Vec<usize>>,
}

fn run_ybe_check(file: &PathBuf) -> RunResult {
    // Structural JSON errors are usage errors; a well-formed file whose
    // tables fail the solution axioms is a mathematical verdict.
    let text = std::fs::read_to_string(file)
        .with_context(|| format!("could not read {}", file.display()))
        .map_err(RunError::Usage)?;
    serde_json::from_str::<RawSolutionShape>(&text)
        .with_context(|| format!("could not parse {}", file.display()))
        .map_err(RunError::Usage)?;
    let solution: SetYBE = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return Err(math(format!("solution rejected: {}", e))),
    };
    let report = ybe_check(&solution);
    let holds = report.holds;
    let payload = json!({
        "n": solution.n,
        "solution": serde_json::to_value(&solution).expect("solution serializes"),
        "report": serde_json::to_value(&report).expect("report serializes"),
    });
    Ok(Outcome::Done(payload, holds))
}

fn tuple_from_parts(n: usize, tuple: &str, tuple_bar: Option<&str>) -> Result<SigmaTuple, RunError> {
    let sigma = parse_perm_list(tuple, n)?;
    match tuple_bar {
        Some(bar) => SigmaTuple::pair(sigma, parse_perm_list(bar, n)?).map_err(usage),
        None => SigmaTuple::single(sigma).map_err(usage),
    }
}

fn run_ybe_from_tuple(n: usize, tuple: &str, tuple_bar: Option<&str>) -> RunResult {
    let t = tuple_from_parts(n, tuple, tuple_bar)?;
    let op = RecursiveRbOp::new(t).map_err(math)?;
    let solution = rrb_core::ybe::restrict_to_basis(&op).map_err(math)?;
    let report = ybe_check(&solution);
    let holds = report.holds;
    let payload = json!({
        "n": n,
        "solution": serde_json::to_value(&solution).expect("solution serializes"),
        "report": serde_json::to_value(&report).expect("report serializes"),
    });
    Ok(Outcome::Done(payload, holds))
}

fn run_ybe_roundtrip(file: &PathBuf, bound: usize) -> RunResult {
    let solution: SetYBE = read_json_file(file)?;
    let h = structure_group(&solution, bound).map_err(math)?;
    let roundtrip = rrb_core::ybe::roundtrip_check(&solution, bound).map_err(math)?;
    let adjoint = adjoint_cocycle_check(&h);
    let combined = combine("roundtrip_with_cocycle", &[roundtrip, adjoint]);
    let holds = combined.holds;
    let payload = json!({
        "n": solution.n,
        "bound": bound,
        "stabilized": h.stabilized,
        "vectors": h.rr_map.len(),
        "report": serde_json::to_value(&combined).expect("report serializes"),
    });
    Ok(Outcome::Done(payload, holds))
}

fn parse_krange(s: &str) -> Result<(i64, i64), RunError> {
    let parts: Vec<&str> = s.splitn(2, ':').collect();
    if parts.len() != 2 {
        return Err(usage("--krange expects \"A:B\""));
    }
    let a: i64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| usage(format!("bad krange start: {}", e)))?;
    let b: i64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| usage(format!("bad krange end: {}", e)))?;
    if a > b {
        return Err(usage("--krange start exceeds end"));
    }
    Ok((a, b))
}

fn run_tstruct_check(file: &PathBuf, krange: &str) -> RunResult {
    let range = parse_krange(krange)?;
    let t: TStructure = read_json_file(file)?;
    let report = tstruct_check(&t, range);
    let holds = report.holds;
    let payload = json!({
        "moduli": t.signature().0,
        "krange": [range.0, range.1],
        "report": serde_json::to_value(&report).expect("report serializes"),
    });
    Ok(Outcome::Done(payload, holds))
}

fn run_tstruct_reconstruct(modulus: u64, table: &str) -> RunResult {
    if modulus == 0 {
        return Err(usage("--modulus must be positive"));
    }
    let images: Vec<i64> = table
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("--table expects comma-separated integers: {}", e)))?;
    if images.len() != modulus as usize {
        return Err(usage(format!(
            "--table needs exactly {} entries, got {}",
            modulus,
            images.len()
        )));
    }
    let t = TStructure::from_cyclic_images(modulus, &images).map_err(math)?;
    let datum = cyclic_reconstruct(&t).map_err(math)?;
    let holds = datum.report.holds;
    let payload = serde_json::to_value(&datum).expect("datum serializes");
    Ok(Outcome::Done(payload, holds))
}

fn run_lie_check(family: &str, s: f64, samples: usize, seed: u64) -> RunResult {
    let kind: Family = family.parse().map_err(usage)?;
    let fam = OperatorFamily::new(kind, s);
    let mut reports = vec![
        fam.rb_check(samples, seed),
        fam.det_check(samples, seed),
        fam.derivative_check(samples.min(200), seed),
        fam.upsilon_agreement_check(samples, seed),
        fam.upsilon_involution_check(samples, seed),
    ];
    if !fam.is_vector_domain() {
        reports.push(
            fam.prelie_diff_check(samples.min(200), seed)
                .expect("matrix family"),
        );
    }
    let holds = reports.iter().all(|r| r.holds);
    let payload = json!({
        "family": format!("{:?}", kind),
        "s": s,
        "samples": samples,
        "reports": serde_json::to_value(&reports).expect("reports serialize"),
    });
    Ok(Outcome::Done(payload, holds))
}

fn run_bch(gens: u8, degree: usize, lyndon: bool) -> RunResult {
    if gens < 2 || gens > 4 {
        return Err(usage("--gens must be between 2 and 4"));
    }
    if degree < 1 || degree > 6 {
        return Err(usage("--degree must be between 1 and 6"));
    }
    let x = NcPoly::<Rat>::generator(gens, degree, 0);
    let y = NcPoly::<Rat>::generator(gens, degree, 1);
    let z = bch(&x, &y).map_err(usage)?;
    let primitive = z.is_lie();
    let mut payload = json!({
        "gens": gens,
        "degree": degree,
        "series": z.to_json(),
        "display": z.to_string(),
        "is_lie": primitive,
    });
    if lyndon {
        let decomposition = lie_to_lyndon(&z).map_err(math)?;
        payload["lyndon"] = Value::Array(
            decomposition
                .iter()
                .map(|(b, c)| json!({"bracket": b.to_string(), "coeff": c.to_string()}))
                .collect(),
        );
    }
    Ok(Outcome::Done(payload, primitive))
}
