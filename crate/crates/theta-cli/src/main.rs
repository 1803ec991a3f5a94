//! Command-line front end: analyze, portrait, dynatomic, family, conjugate,
//! sweep, verify. All rational values are read and printed as exact `p/q`
//! strings; ∞ prints as `inf`.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use theta_core::{
    acceptance, are_conjugate, build_portrait, families, periodic_inventory, ArithError,
    ClassifyError, FactorBudget, FamilyError, MapError, Portrait, Rat, SweepConfig, ThetaMap,
};

const EXIT_OK: u8 = 0;
const EXIT_INVALID_MAP: u8 = 1;
const EXIT_THEOREM_VIOLATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "theta",
    about = "Exact rational preperiodic structure of the maps θ_{d,k}(z) = (kz² - 2dz + dk)/(z² - 2kz + d)",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapArgs {
    /// Parameter d as an exact rational (p/q)
    #[arg(long, allow_hyphen_values = true)]
    d: String,
    /// Parameter k as an exact rational (p/q)
    #[arg(long, allow_hyphen_values = true)]
    k: String,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a map: periodic inventory, preperiodic set, portrait class
    Analyze {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        json: bool,
    },
    /// Print the portrait graph (vertices, edges, class), optionally as DOT
    Portrait {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        json: bool,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
    },
    /// Print the n-th dynatomic polynomial, or the generalized (m, n) one
    Dynatomic {
        #[command(flatten)]
        map: MapArgs,
        /// Cycle length n ≥ 1
        #[arg(long)]
        n: u32,
        /// Tail length m for the generalized (m, n)-dynatomic polynomial
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Generate a parametrized family member and optionally verify it
    Family {
        /// One of: fixed_point, period2, period3, three_fixed,
        /// fixed_plus_2cycle, preper12, preper31, preper11_plus_period2, k0
        name: String,
        /// Comma-separated name=value parameters, e.g. u=7/5,v=1
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether two maps are conjugate over the rationals
    Conjugate {
        #[arg(long, allow_hyphen_values = true)]
        d1: String,
        #[arg(long, allow_hyphen_values = true)]
        k1: String,
        #[arg(long, allow_hyphen_values = true)]
        d2: String,
        #[arg(long, allow_hyphen_values = true)]
        k2: String,
        #[arg(long)]
        json: bool,
    },
    /// Classify every valid map within height bounds and tally the classes
    Sweep {
        #[arg(long, default_value_t = 12)]
        max_height_d: u32,
        #[arg(long, default_value_t = 8)]
        max_height_k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the full acceptance suite
    Verify {
        #[arg(long)]
        json: bool,
    },
}

fn budget_from_env() -> FactorBudget {
    let mut budget = FactorBudget::default();
    if let Ok(spec) = std::env::var("THETA_FACTOR_BUDGET") {
        let mut parts = spec.split(',');
        if let Some(Ok(limit)) = parts.next().map(str::parse) {
            budget.trial_limit = limit;
        }
        if let Some(Ok(rounds)) = parts.next().map(str::parse) {
            budget.rho_rounds = rounds;
        }
    }
    budget
}

enum CliError {
    Usage(String),
    InvalidMap(String),
    TheoremViolation(String),
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::InvalidMap(_) => EXIT_INVALID_MAP,
            CliError::TheoremViolation(_) => EXIT_THEOREM_VIOLATION,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::InvalidMap(m)
            | CliError::TheoremViolation(m)
            | CliError::Budget(m) => m,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::InvalidMap(_) => "invalid_map",
            CliError::TheoremViolation(_) => "theorem_violation",
            CliError::Budget(_) => "budget_exceeded",
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> CliError {
        match e {
            ClassifyError::TheoremViolation { .. } => CliError::TheoremViolation(e.to_string()),
            ClassifyError::Budget(b) => CliError::Budget(b.to_string()),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> CliError {
        CliError::InvalidMap(e.to_string())
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

fn parse_rat(name: &str, s: &str) -> Result<Rat, CliError> {
    s.parse()
        .map_err(|e: ArithError| CliError::Usage(format!("--{name}: {e}")))
}

fn parse_map(args: &MapArgs) -> Result<ThetaMap, CliError> {
    let d = parse_rat("d", &args.d)?;
    let k = parse_rat("k", &args.k)?;
    Ok(ThetaMap::new(d, k)?)
}

#[derive(Serialize)]
struct AnalyzeOut {
    d: Rat,
    k: Rat,
    class: String,
    preper_count: usize,
    fixed: Vec<String>,
    two_cycle: Option<[String; 2]>,
    three_cycle: Option<[String; 3]>,
    preperiodic: Vec<String>,
}

fn cmd_analyze(map: &MapArgs, json: bool) -> Result<(), CliError> {
    let m = parse_map(map)?;
    let budget = budget_from_env();
    let inv = periodic_inventory(&m, &budget)?;
    let portrait = theta_core::portrait_from_inventory(&m, &inv)?;
    let out = AnalyzeOut {
        d: m.d().clone(),
        k: m.k().clone(),
        class: portrait.class.to_string(),
        preper_count: portrait.vertices.len(),
        fixed: inv.fixed.iter().map(|p| p.to_string()).collect(),
        two_cycle: inv
            .two_cycle
            .as_ref()
            .map(|(a, b)| [a.to_string(), b.to_string()]),
        three_cycle: inv
            .three_cycle
            .as_ref()
            .map(|(a, b, c)| [a.to_string(), b.to_string(), c.to_string()]),
        preperiodic: portrait.vertices.iter().map(|p| p.to_string()).collect(),
    };
    if json {
        println!("{}", serde_json::to_string(&out).unwrap());
    } else {
        println!("map: d = {}, k = {}", out.d, out.k);
        println!("class: {}", out.class);
        println!("preperiodic points ({}): {}", out.preper_count, out.preperiodic.join(", "));
        println!("fixed points: {}", if out.fixed.is_empty() { "none".into() } else { out.fixed.join(", ") });
        match &out.two_cycle {
            Some([a, b]) => println!("2-cycle: ({a}, {b})"),
            None => println!("2-cycle: none"),
        }
        match &out.three_cycle {
            Some([a, b, c]) => println!("3-cycle: ({a}, {b}, {c})"),
            None => println!("3-cycle: none"),
        }
    }
    Ok(())
}

fn emit_dot(portrait: &Portrait) -> String {
    let mut out = String::from("digraph portrait {\n");
    out.push_str(&format!("  label=\"{}\";\n", portrait.class));
    for v in &portrait.vertices {
        out.push_str(&format!("  \"{v}\";\n"));
    }
    for (i, &j) in portrait.edges.iter().enumerate() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\";\n",
            portrait.vertices[i], portrait.vertices[j]
        ));
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct PortraitOut {
    d: Rat,
    k: Rat,
    class: String,
    vertices: Vec<String>,
    edges: Vec<usize>,
}

fn cmd_portrait(map: &MapArgs, json: bool, dot: bool) -> Result<(), CliError> {
    let m = parse_map(map)?;
    let portrait = build_portrait(&m, &budget_from_env())?;
    if dot {
        print!("{}", emit_dot(&portrait));
    } else if json {
        let out = PortraitOut {
            d: m.d().clone(),
            k: m.k().clone(),
            class: portrait.class.to_string(),
            vertices: portrait.vertices.iter().map(|p| p.to_string()).collect(),
            edges: portrait.edges.clone(),
        };
        println!("{}", serde_json::to_string(&out).unwrap());
    } else {
        println!("class: {}", portrait.class);
        for (i, &j) in portrait.edges.iter().enumerate() {
            println!("{} -> {}", portrait.vertices[i], portrait.vertices[j]);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DynatomicOut {
    d: Rat,
    k: Rat,
    n: u32,
    m: Option<u32>,
    formal_degree: usize,
    degree: usize,
    /// Coefficients of the dehomogenized polynomial, ascending powers of z
    coefficients: Vec<Rat>,
}

fn cmd_dynatomic(map: &MapArgs, n: u32, m_opt: Option<u32>, json: bool) -> Result<(), CliError> {
    let m = parse_map(map)?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let poly = match m_opt {
        None | Some(0) => m.dynatomic(n),
        Some(tail) => m.generalized_dynatomic(tail, n),
    }
    .map_err(|e| CliError::Budget(e.to_string()))?;
    let dehom = poly.dehomogenize();
    let out = DynatomicOut {
        d: m.d().clone(),
        k: m.k().clone(),
        n,
        m: m_opt,
        formal_degree: poly.formal_degree(),
        degree: dehom.degree(),
        coefficients: dehom.coeffs().to_vec(),
    };
    if json {
        println!("{}", serde_json::to_string(&out).unwrap());
    } else {
        println!("{dehom}");
    }
    Ok(())
}

fn parse_params(s: &str) -> Result<Vec<(String, String)>, CliError> {
    s.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| CliError::Usage(format!("bad parameter `{kv}`, expected name=value")))
        })
        .collect()
}

fn param<'a>(params: &'a [(String, String)], name: &str) -> Result<&'a str, CliError> {
    params
        .iter()
        .find(|(k, _)| k == name)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| CliError::Usage(format!("missing parameter `{name}`")))
}

fn param_rat(params: &[(String, String)], name: &str) -> Result<Rat, CliError> {
    parse_rat(name, param(params, name)?)
}

#[derive(Serialize)]
struct FamilyOut {
    family: String,
    params: Vec<(String, String)>,
    d: Rat,
    k: Rat,
    expected: Vec<String>,
    report: Option<families::FamilyReport>,
}

fn cmd_family(name: &str, params: &str, verify: bool, json: bool) -> Result<(), CliError> {
    let params = parse_params(params)?;
    let spec = match name {
        "fixed_point" => {
            families::fixed_point_family(param_rat(&params, "u")?, param_rat(&params, "v")?)?
        }
        "period2" => families::period2_family(param_rat(&params, "c")?, param_rat(&params, "k")?)?,
        "period3" => {
            let sign = match param(&params, "sign")? {
                "+" | "plus" => families::Sign::Plus,
                "-" | "minus" => families::Sign::Minus,
                other => return Err(CliError::Usage(format!("bad sign `{other}`"))),
            };
            families::period3_family(param_rat(&params, "x")?, param_rat(&params, "u")?, sign)?
        }
        "three_fixed" => {
            families::three_fixed_family(param_rat(&params, "s")?, param_rat(&params, "t")?)?
        }
        "fixed_plus_2cycle" => {
            families::fixed_plus_2cycle_family(param_rat(&params, "s")?, param_rat(&params, "t")?)?
        }
        "preper12" => families::preper12_family(
            param_rat(&params, "s")?,
            param_rat(&params, "t")?,
            param_rat(&params, "k")?,
        )?,
        "preper31" => families::preper31_family(
            param_rat(&params, "s")?,
            param_rat(&params, "t")?,
            param_rat(&params, "k")?,
        )?,
        "preper11_plus_period2" => families::preper11_plus_period2_family(
            param_rat(&params, "c")?,
            param_rat(&params, "r")?,
        )?,
        "k0" => {
            let variant = match param(&params, "variant")? {
                "three_fixed_tails" => families::K0Variant::ThreeFixedTails,
                "tail12" => families::K0Variant::Tail12,
                "two_cycle" => families::K0Variant::TwoCycle,
                other => return Err(CliError::Usage(format!("bad variant `{other}`"))),
            };
            families::k0_family(variant, param_rat(&params, "a")?)?
        }
        other => return Err(CliError::Usage(format!("unknown family `{other}`"))),
    };
    let report = if verify {
        Some(families::verify_family(&spec, &budget_from_env())?)
    } else {
        None
    };
    let out = FamilyOut {
        family: spec.name.to_string(),
        params: spec
            .params
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        d: spec.map.d().clone(),
        k: spec.map.k().clone(),
        expected: spec.expected.iter().map(|f| f.label()).collect(),
        report,
    };
    if json {
        println!("{}", serde_json::to_string(&out).unwrap());
    } else {
        println!("family: {}", out.family);
        println!("map: d = {}, k = {}", out.d, out.k);
        for f in &out.expected {
            println!("expected: {f}");
        }
        if let Some(rep) = &out.report {
            for c in &rep.checks {
                println!("check {}: {}", c.feature, if c.pass { "pass" } else { "FAIL" });
            }
            println!(
                "class: {} ({})",
                rep.class,
                if rep.class_ok { "as documented" } else { "UNEXPECTED" }
            );
            println!("verification: {}", if rep.pass { "pass" } else { "FAIL" });
        }
    }
    if let Some(rep) = &out.report {
        if !rep.pass {
            return Err(CliError::TheoremViolation(format!(
                "family verification failed at (d, k) = ({}, {})",
                rep.d, rep.k
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConjugateOut {
    conjugate: bool,
    b: Option<Rat>,
    branch: Option<String>,
    gamma: Option<Rat>,
    obstruction: Option<String>,
}

fn cmd_conjugate(d1: &str, k1: &str, d2: &str, k2: &str, json: bool) -> Result<(), CliError> {
    let m1 = ThetaMap::new(parse_rat("d1", d1)?, parse_rat("k1", k1)?)?;
    let m2 = ThetaMap::new(parse_rat("d2", d2)?, parse_rat("k2", k2)?)?;
    let witness = are_conjugate(&m1, &m2, &budget_from_env())
        .map_err(|e| CliError::Budget(e.to_string()))?;
    let out = match &witness {
        Some(w) => ConjugateOut {
            conjugate: true,
            b: Some(w.b.clone()),
            branch: Some(format!("{:?}", w.branch)),
            gamma: w.gamma.clone(),
            obstruction: None,
        },
        None => {
            let obstruction = if (m2.d() / m1.d()).sqrt().is_none() {
                "non-square ratio"
            } else {
                "no branch satisfied"
            };
            ConjugateOut {
                conjugate: false,
                b: None,
                branch: None,
                gamma: None,
                obstruction: Some(obstruction.to_string()),
            }
        }
    };
    if json {
        println!("{}", serde_json::to_string(&out).unwrap());
    } else if out.conjugate {
        let gamma = out
            .gamma
            .as_ref()
            .map(|g| format!(", gamma = {g}"))
            .unwrap_or_default();
        println!(
            "Yes: b = {}, branch = {}{}",
            out.b.unwrap(),
            out.branch.unwrap(),
            gamma
        );
    } else {
        println!("No: {}", out.obstruction.unwrap());
    }
    Ok(())
}

fn cmd_sweep(
    max_height_d: u32,
    max_height_k: u32,
    out: Option<PathBuf>,
    jobs: usize,
    json: bool,
) -> Result<(), CliError> {
    if max_height_d == 0 || max_height_k == 0 || jobs == 0 {
        return Err(CliError::Usage("heights and jobs must be at least 1".into()));
    }
    let cfg = SweepConfig {
        max_height_d,
        max_height_k,
        jobs,
        out,
    };
    let summary = theta_core::run_sweep(&cfg, &budget_from_env())?;
    if json {
        println!("{}", serde_json::to_string(&summary).unwrap());
    } else {
        println!("maps: {}", summary.maps);
        for (class, n) in &summary.tally {
            println!("{class}: {n}");
        }
        for (d, k, reason) in &summary.unresolved {
            println!("unresolved ({d}, {k}): {reason}");
        }
    }
    if !summary.unresolved.is_empty() {
        return Err(CliError::Budget(format!(
            "{} maps unresolved under the factor budget",
            summary.unresolved.len()
        )));
    }
    Ok(())
}

fn cmd_verify(json: bool) -> Result<(), CliError> {
    let results = acceptance::run_all();
    if json {
        println!("{}", serde_json::to_string(&results).unwrap());
    } else {
        for r in &results {
            println!(
                "criterion {} ({}): {} — {}",
                r.id,
                r.name,
                if r.pass { "pass" } else { "FAIL" },
                r.detail
            );
        }
    }
    if results.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(CliError::TheoremViolation(
            "acceptance suite failed".into(),
        ))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { map, json } => cmd_analyze(&map, json),
        Command::Portrait { map, json, dot } => cmd_portrait(&map, json, dot),
        Command::Dynatomic { map, n, m, json } => cmd_dynatomic(&map, n, m, json),
        Command::Family {
            name,
            params,
            verify,
            json,
        } => cmd_family(&name, &params, verify, json),
        Command::Conjugate { d1, k1, d2, k2, json } => cmd_conjugate(&d1, &k1, &d2, &k2, json),
        Command::Sweep {
            max_height_d,
            max_height_k,
            out,
            jobs,
            json,
        } => cmd_sweep(max_height_d, max_height_k, out, jobs, json),
        Command::Verify { json } => cmd_verify(json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::from(EXIT_OK);
            }
            eprintln!("{{\"error\":\"usage\",\"message\":{}}}", serde_json::to_string(&e.to_string()).unwrap());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!(
                "{{\"error\":\"{}\",\"message\":{}}}",
                e.kind(),
                serde_json::to_string(e.message()).unwrap()
            );
            ExitCode::from(e.code())
        }
    }
}
