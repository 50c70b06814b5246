use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperpair::arith::{factor, is_prime, FactorBudget};
use hyperpair::curve::{classify, frobenius_charpoly, jacobian_order, CurveParams};
use hyperpair::io::{curve_from_json, divisor_from_json, divisor_to_json, element_to_json, pairing_output_to_json, parse_json};
use hyperpair::jacobian::ReducedDivisor;
use hyperpair::pairings::{
    lift_root_of_unity, HvSpec, PairingContext, PairingOutput, PairingParams, PAIRING_NAMES,
};
use hyperpair::pfsearch::{embedding_degree, rho_value, search, CurveRecord, SearchConfig};
use hyperpair::verify::{default_vercauteren_expansion, run_suite};
use hyperpair::Error;
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hyperpair", version, about = "Pairings on genus-2 hyperelliptic Jacobians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one pairing and print the result as JSON.
    Pair(PairArgs),
    /// Run the randomized bilinearity and identity suite.
    Verify(VerifyArgs),
    /// Search for pairing-friendly curves y^2 = F(x) with F a monic quintic.
    Search(SearchArgs),
    /// Print the Frobenius polynomial, group order, class and subgroup candidates.
    CurveInfo(CurveArgs),
    /// Time every pairing on a context and report its loop length.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CurveArgs {
    /// Curve JSON file.
    #[arg(long)]
    curve: PathBuf,
}

#[derive(Args)]
struct ContextArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Subgroup order; defaults to the curve file's "r", then to the largest
    /// prime factor of #Jac(F_q).
    #[arg(long)]
    r: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    ctx: ContextArgs,
    /// First argument of the pairing, as divisor JSON.  When absent it is
    /// sampled from G2 (from G1 for twisted_ate).
    #[arg(long)]
    d1: Option<PathBuf>,
    /// Second argument of the pairing, as divisor JSON.  When absent it is
    /// sampled from G1 (from G2 for twisted_ate).
    #[arg(long)]
    d2: Option<PathBuf>,
    /// One of tate, weil, ate, hv, ate_i, vercauteren, rate, twisted_ate.
    #[arg(long, default_value = "tate")]
    pairing: String,
    #[arg(long)]
    hv_s: Option<BigInt>,
    /// Comma-separated h_0, h_1, ...
    #[arg(long)]
    hv_h: Option<String>,
    #[arg(long)]
    ate_j: Option<usize>,
    /// Comma-separated h_0, h_1, ... with sum h_i q^i = m r.
    #[arg(long)]
    ver_h: Option<String>,
    #[arg(long)]
    ver_m: Option<BigInt>,
    #[arg(long)]
    rate_i: Option<usize>,
    #[arg(long)]
    rate_j: Option<usize>,
    #[arg(long)]
    twist_e: Option<u64>,
    /// Also print the Tate Miller value before the final exponentiation.
    #[arg(long)]
    debug_raw_tate: bool,
    /// Include both arguments as divisor JSON in the output.
    #[arg(long)]
    show_inputs: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    ctx: ContextArgs,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 5)]
    p_min: u64,
    #[arg(long, default_value_t = 13)]
    p_max: u64,
    #[arg(long, default_value_t = 12)]
    max_k: u64,
    #[arg(long, default_value_t = 0)]
    min_r_bits: u32,
    /// Examine this many random quintics per prime instead of all of them.
    #[arg(long)]
    sample: Option<usize>,
    /// Keep one curve per orbit under x -> a x + b.
    #[arg(long)]
    dedup: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    ctx: ContextArgs,
    /// Evaluations per pairing.
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// A failure with its exit code.
enum Failure {
    Verification(Value),
    Parse(Error),
    Math(Error),
    Io(String, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Parse(e),
            other => Failure::Math(other),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Math(_) => 3,
            Failure::Io(..) => 4,
        }
    }

    fn diagnostic(&self) -> Value {
        match self {
            Failure::Verification(summary) => json!({"error": "verification", "summary": summary}),
            Failure::Parse(Error::Parse { pointer, message }) => {
                json!({"error": "parse", "pointer": pointer, "message": message})
            }
            Failure::Parse(e) => json!({"error": "parse", "message": e.to_string()}),
            Failure::Math(e) => json!({"error": "math", "kind": kind(e), "message": e.to_string()}),
            Failure::Io(path, e) => json!({"error": "io", "path": path, "message": e.to_string()}),
        }
    }
}

fn kind(e: &Error) -> String {
    format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("").to_string()
}

type CliResult<T> = Result<T, Failure>;

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(path.display().to_string(), e))?;
    Ok(parse_json(&text)?)
}

fn load_curve(args: &CurveArgs) -> CliResult<(CurveParams, Option<u64>)> {
    let spec = curve_from_json(&read_json(&args.curve)?)?;
    Ok((spec.curve, spec.r))
}

/// Prime factors of `#Jac(F_q)` other than the characteristic, ascending.
fn subgroup_candidates(curve: &CurveParams) -> CliResult<(BigUint, Vec<u64>)> {
    let cp = frobenius_charpoly(curve)?;
    let order = jacobian_order(&cp, 1);
    let n = order.to_u64().ok_or_else(|| Error::TooLarge(order.to_string()))?;
    let factors = factor(n, FactorBudget::default())
        .map_err(|t| Error::TooLarge(format!("unfactored cofactor {}", t.unfactored)))?;
    let p = curve.field().characteristic();
    Ok((order, factors.into_iter().map(|(f, _)| f).filter(|&f| f != p && f > 2).collect()))
}

fn load_context(args: &ContextArgs) -> CliResult<PairingContext> {
    let (curve, file_r) = load_curve(&args.curve)?;
    let r = match args.r.or(file_r) {
        Some(r) => r,
        None => *subgroup_candidates(&curve)?
            .1
            .last()
            .ok_or_else(|| Error::InvalidContext("#Jac(F_q) has no usable prime factor".into()))?,
    };
    if !is_prime(r) {
        return Err(Error::InvalidContext(format!("r = {r} is not prime")).into());
    }
    Ok(PairingContext::new(&curve, r)?)
}

fn parse_list(text: &str, flag: &str) -> CliResult<Vec<BigInt>> {
    text.split(',')
        .enumerate()
        .map(|(i, s)| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| Failure::Parse(Error::parse(format!("--{flag}/{i}"), format!("'{s}' is not an integer"))))
        })
        .collect()
}

fn default_twist(ctx: &PairingContext) -> u64 {
    if ctx.k.is_multiple_of(2) {
        ctx.k as u64 / 2
    } else {
        ctx.k as u64
    }
}

fn pair(args: &PairArgs) -> CliResult<Value> {
    let ctx = load_context(&args.ctx)?;
    let name = args.pairing.as_str();
    if !PAIRING_NAMES.contains(&name) {
        return Err(Error::UnknownPairing(name.to_string()).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.ctx.seed);
    let load = |path: &Option<PathBuf>, sample: &dyn Fn(&mut ChaCha8Rng) -> hyperpair::Result<ReducedDivisor>,
                rng: &mut ChaCha8Rng|
     -> CliResult<ReducedDivisor> {
        match path {
            Some(p) => Ok(divisor_from_json(&ctx, &read_json(p)?)?),
            None => Ok(sample(rng)?),
        }
    };
    let (d1, d2) = if name == "twisted_ate" {
        (load(&args.d1, &|r| ctx.sample_g1(r), &mut rng)?, load(&args.d2, &|r| ctx.sample_g2(r), &mut rng)?)
    } else {
        (load(&args.d1, &|r| ctx.sample_g2(r), &mut rng)?, load(&args.d2, &|r| ctx.sample_g1(r), &mut rng)?)
    };

    let hv = match (&args.hv_s, &args.hv_h) {
        (Some(s), Some(h)) => Some(HvSpec { s: s.clone(), h: parse_list(h, "hv-h")? }),
        (None, None) => None,
        _ => return Err(Failure::Parse(Error::parse("--hv-s", "--hv-s and --hv-h go together"))),
    };
    let vercauteren = match (&args.ver_h, &args.ver_m) {
        (Some(h), Some(m)) => (parse_list(h, "ver-h")?, m.clone()),
        (None, None) => default_vercauteren_expansion(&ctx),
        _ => return Err(Failure::Parse(Error::parse("--ver-h", "--ver-h and --ver-m go together"))),
    };
    let params = PairingParams {
        hv,
        ate_j: Some(args.ate_j.unwrap_or(1)),
        vercauteren: Some(vercauteren),
        rate: Some((args.rate_i.unwrap_or(1), args.rate_j.unwrap_or(2))),
        twist_e: Some(args.twist_e.unwrap_or_else(|| default_twist(&ctx))),
    };
    let out = ctx.pairing_dispatch(name, &d1, &d2, &params)?;
    let mut json = pairing_output_to_json(&out);
    if args.debug_raw_tate {
        json["raw_tate"] = element_to_json(&ctx.tate_raw(&d1, &d2)?);
    }
    if args.show_inputs {
        json["d1"] = divisor_to_json(&ctx, &d1)?;
        json["d2"] = divisor_to_json(&ctx, &d2)?;
    }
    Ok(json)
}

fn verify(args: &VerifyArgs, out: &mut impl Write) -> CliResult<()> {
    let ctx = load_context(&args.ctx)?;
    let report = run_suite(&ctx, args.trials, args.ctx.seed);
    let summary = json!({
        "r": ctx.r,
        "k": ctx.k,
        "trials": report.trials,
        "seed": report.seed,
        "passed": report.passed(),
        "failed": report.failed(),
    });
    match args.format {
        Format::Json => {
            for c in &report.checks {
                writeln!(out, "{}", serde_json::to_string(c).expect("serializable")).ok();
            }
            writeln!(out, "{summary}").ok();
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check", "passed", "failed"]).ok();
            for c in &report.checks {
                w.write_record([c.name.clone(), c.passed.to_string(), c.failed.to_string()]).ok();
            }
            w.flush().ok();
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verification(summary))
    }
}

fn record_row(r: &CurveRecord) -> Vec<String> {
    let f: Vec<String> = r.f.iter().map(u64::to_string).collect();
    vec![
        r.p.to_string(),
        f.join(" "),
        r.n1.to_string(),
        r.n2.to_string(),
        r.a1.to_string(),
        r.a2.to_string(),
        r.jac_order.to_string(),
        r.r.to_string(),
        r.k.to_string(),
        format!("{:.4}", r.rho),
        r.class.to_string(),
        r.mef_degree.to_string(),
    ]
}

fn search_cmd(args: &SearchArgs, out: &mut impl Write) -> CliResult<()> {
    let base = SearchConfig {
        p_min: args.p_min,
        p_max: args.p_max,
        max_k: args.max_k,
        min_r_bits: args.min_r_bits,
        sample_all: args.sample.is_none(),
        sample_size: args.sample.unwrap_or(0),
        dedup: args.dedup,
        seed: args.seed,
    };
    base.validate()?;
    // One prime at a time so records stream out as they are found.
    let each_prime = |emit: &mut dyn FnMut(&[CurveRecord])| -> CliResult<()> {
        for p in args.p_min..=args.p_max {
            let found = search(&SearchConfig { p_min: p, p_max: p, ..base.clone() })?;
            for skip in &found.skipped {
                eprintln!("{}", json!({ "skipped": skip }));
            }
            emit(&found.records);
        }
        Ok(())
    };
    match args.format {
        Format::Json => each_prime(&mut |records| {
            for rec in records {
                writeln!(out, "{}", serde_json::to_string(rec).expect("serializable")).ok();
            }
        }),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["p", "F", "n1", "n2", "a1", "a2", "jac_order", "r", "k", "rho", "class", "mef_degree"])
                .ok();
            each_prime(&mut |records| {
                for rec in records {
                    w.write_record(record_row(rec)).ok();
                }
                w.flush().ok();
            })
        }
    }
}

fn curve_info(args: &CurveArgs) -> CliResult<Value> {
    let (curve, _) = load_curve(args)?;
    let cp = frobenius_charpoly(&curve)?;
    let p = curve.field().characteristic();
    let (order, primes) = subgroup_candidates(&curve)?;
    let candidates: Vec<Value> = primes
        .iter()
        .map(|&r| {
            let k = embedding_degree(curve.q(), r).ok();
            json!({"r": r.to_string(), "k": k, "rho": rho_value(curve.genus as u32, curve.q(), &BigUint::from(r))})
        })
        .collect();
    Ok(json!({
        "q": curve.q().to_string(),
        "charpoly": cp.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "jac_order": order.to_string(),
        "class": classify(&cp, p).to_string(),
        "candidates": candidates,
    }))
}

fn bench(args: &BenchArgs, out: &mut impl Write) -> CliResult<()> {
    let ctx = load_context(&args.ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.ctx.seed);
    let p1 = ctx.sample_g1(&mut rng)?;
    let q2 = ctx.sample_g2(&mut rng)?;
    let t1 = ctx.sample_r_torsion(ctx.k, &mut rng)?;
    let t2 = ctx.sample_r_torsion(ctx.k, &mut rng)?;
    let hv = lift_root_of_unity(ctx.q_mod_r(), ctx.k as u64, ctx.r).ok().map(|s| HvSpec {
        s: BigInt::from(s),
        h: vec![BigInt::from(ctx.r) - BigInt::from(s), BigInt::from(1)],
    });
    let params = PairingParams {
        hv,
        ate_j: Some(1),
        vercauteren: Some(default_vercauteren_expansion(&ctx)),
        rate: (ctx.k >= 3).then_some((1, 2)),
        twist_e: Some(default_twist(&ctx)),
    };
    let mut rows: Vec<(PairingOutput, f64)> = Vec::new();
    let mut skipped = Vec::new();
    for name in PAIRING_NAMES {
        let (a, b) = match name {
            "tate" | "weil" => (&t1, &t2),
            "twisted_ate" => (&p1, &q2),
            _ => (&q2, &p1),
        };
        let start = Instant::now();
        let mut last = None;
        for _ in 0..args.trials.max(1) {
            match ctx.pairing_dispatch(name, a, b, &params) {
                Ok(o) => last = Some(o),
                Err(e) => {
                    skipped.push(json!({"pairing": name, "reason": e.to_string()}));
                    break;
                }
            }
        }
        if let Some(o) = last {
            let ms = start.elapsed().as_secs_f64() * 1e3 / args.trials.max(1) as f64;
            rows.push((o, ms));
        }
    }
    match args.format {
        Format::Json => {
            for (o, ms) in &rows {
                let row = json!({
                    "pairing": o.pairing,
                    "final_exp": o.final_exp,
                    "loop_bits": o.loop_bits,
                    "loop_log2": o.loop_log2,
                    "wall_ms": ms,
                });
                writeln!(out, "{row}").ok();
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["pairing", "final_exp", "loop_bits", "loop_log2", "wall_ms"]).ok();
            for (o, ms) in &rows {
                w.write_record([
                    o.pairing.clone(),
                    o.final_exp.to_string(),
                    o.loop_bits.to_string(),
                    format!("{:.3}", o.loop_log2),
                    format!("{ms:.3}"),
                ])
                .ok();
            }
            w.flush().ok();
        }
    }
    for s in skipped {
        eprintln!("{s}");
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let mut stdout = io::stdout().lock();
    match &cli.command {
        Command::Pair(a) => writeln!(stdout, "{}", pair(a)?).ok(),
        Command::Verify(a) => return verify(a, &mut stdout),
        Command::Search(a) => return search_cmd(a, &mut stdout),
        Command::CurveInfo(a) => writeln!(stdout, "{}", curve_info(a)?).ok(),
        Command::Bench(a) => return bench(a, &mut stdout),
    };
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.diagnostic());
            ExitCode::from(f.exit_code())
        }
    }
}
