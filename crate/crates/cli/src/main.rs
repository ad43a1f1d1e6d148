//! `sqdense`: command-line access to the squarefree-density toolkit.
//!
//! Every subcommand prints a versioned JSON payload on standard output
//! (or CSV rows with `--csv`) and a one-line human summary on standard
//! error unless `--quiet` is given.  Exit codes: 0 success, 2 usage,
//! 3 precondition failure, 4 enumeration budget exceeded.

use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use sqdense_core::density::{
    coprime_density_z, empirical_density_a, empirical_density_z, squarefree_density_a,
    squarefree_density_z, BoxSpec, DensityEstimate, EulerProduct, Mode, PredicateA, PredicateZ,
    Regime,
};
use sqdense_core::ecdisc::{empirical_disc_density, gamma_q, rd_limit};
use sqdense_core::finite::Fq;
use sqdense_core::mpoly::{parse, FqtRing, IntRing, MPoly};
use sqdense_core::qclasses::{c_f_constant, collision_count, delta_table, image_count};
use sqdense_core::unipoly::ZPoly;
use sqdense_core::Error;

#[derive(Parser)]
#[command(
    name = "sqdense",
    version,
    about = "Densities of squarefree polynomial values over Z and F_q[t]"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Emit the JSON payload on stdout (the default).
    #[arg(long, global = true)]
    json: bool,

    /// Emit CSV rows on stdout instead of JSON.
    #[arg(long, global = true)]
    csv: bool,

    /// Suppress the human summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Validate inputs and exit without computing.
    #[arg(long, global = true)]
    dry_run: bool,

    /// Cap the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for Monte Carlo sampling (also echoed into the payload).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Truncated density product for squarefree values of f over Z.
    SfZ(SfZArgs),
    /// Truncated density product for squarefree values of f over F_q[t].
    SfA(SfAArgs),
    /// Truncated density product for coprimality of a pair over Z.
    Coprime(CoprimeArgs),
    /// Empirical density of a predicate over a finite box.
    Empirical(EmpiricalArgs),
    /// Table of local counts c_p (no squarefreeness screening).
    Local(LocalArgs),
    /// Distinct squarefree classes among f(1..B).
    Image(ImageArgs),
    /// Class-density constant c_f of a univariate polynomial.
    Cf(CfArgs),
    /// Divisor-count table for a linear polynomial a*x + b.
    Delta(DeltaArgs),
    /// Count n <= B with f(n)/f(m) = q^2 * (square) for some m < n.
    Collide(CollideArgs),
    /// Limit constant for squarefree discriminants over F_q[t].
    EcGamma(EcGammaArgs),
    /// Empirical squarefree-discriminant density over F_q[t].
    EcEmpirical(EcEmpiricalArgs),
}

#[derive(Args)]
struct SfZArgs {
    /// Polynomial over Z, e.g. "x^2+1" or "x*y - 2".
    #[arg(long)]
    poly: String,
    /// Include primes p <= cutoff.
    #[arg(long, default_value_t = 10_000)]
    cutoff: u64,
    /// Skip the squarefreeness screening of f.
    #[arg(long)]
    r#unchecked: bool,
}

#[derive(Args)]
struct SfAArgs {
    /// Polynomial over F_q[t]; "t" is the coefficient parameter.
    #[arg(long)]
    poly: String,
    /// Field order q (prime power).
    #[arg(long)]
    ring: u64,
    /// Include primes of degree <= deg-cutoff.
    #[arg(long, default_value_t = 8)]
    deg_cutoff: u64,
    /// Skip the squarefreeness screening of f.
    #[arg(long)]
    r#unchecked: bool,
}

#[derive(Args)]
struct CoprimeArgs {
    #[arg(long)]
    poly: String,
    #[arg(long)]
    poly2: String,
    #[arg(long, default_value_t = 10_000)]
    cutoff: u64,
}

#[derive(Args)]
struct EmpiricalArgs {
    #[arg(long)]
    poly: String,
    /// Second polynomial; switches the predicate to coprimality.
    #[arg(long)]
    poly2: Option<String>,
    /// Field order q; omit for the integer box 1..=B (or -B..=B).
    #[arg(long)]
    ring: Option<u64>,
    /// Per-coordinate bounds, e.g. --box 1000,1000 (degree bounds over F_q[t]).
    #[arg(long = "box", value_name = "B1,B2,...")]
    bounds: String,
    /// Predicate: squarefree, coprime, or zero.
    #[arg(long, default_value = "squarefree")]
    predicate: String,
    /// Box regime: flat, lastlarge:R, or nested:i-j-...[:R].
    #[arg(long, default_value = "flat")]
    regime: String,
    /// Sampling mode: exhaustive or mc:N.
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    /// Use symmetric integer boxes -B..=B instead of 1..=B.
    #[arg(long)]
    signed: bool,
}

#[derive(Args)]
struct LocalArgs {
    #[arg(long)]
    poly: String,
    /// Field order q; omit for local counts at rational primes.
    #[arg(long)]
    ring: Option<u64>,
    /// Include primes p <= cutoff (integer case).
    #[arg(long, default_value_t = 100)]
    cutoff: u64,
    /// Include primes of degree <= deg-cutoff (function-field case).
    #[arg(long, default_value_t = 3)]
    deg_cutoff: u64,
}

#[derive(Args)]
struct ImageArgs {
    /// Univariate polynomial over Z.
    #[arg(long)]
    poly: String,
    #[arg(long)]
    bound: u64,
    /// Also report the running ratio every STRIDE arguments (CSV rows).
    #[arg(long)]
    stride: Option<u64>,
}

#[derive(Args)]
struct CfArgs {
    #[arg(long)]
    poly: String,
}

#[derive(Args)]
struct DeltaArgs {
    /// Linear polynomial a*x + b with a >= 1.
    #[arg(long)]
    poly: String,
}

#[derive(Args)]
struct CollideArgs {
    #[arg(long)]
    poly: String,
    /// Rational square-class representative, e.g. 2 or 3/5.
    #[arg(long)]
    q: String,
    #[arg(long)]
    bound: u64,
}

#[derive(Args)]
struct EcGammaArgs {
    /// Field order q with gcd(q, 6) = 1.
    #[arg(long)]
    ring: u64,
    #[arg(long, default_value_t = 3)]
    deg_cutoff: u64,
    /// Report the curve-count limit q/(q-1) * product instead of gamma_q.
    #[arg(long)]
    rd: bool,
}

#[derive(Args)]
struct EcEmpiricalArgs {
    #[arg(long)]
    ring: u64,
    /// Degree bound for both coefficients.
    #[arg(long, default_value_t = 3)]
    deg_cutoff: u64,
    /// Sampling mode: exhaustive or mc:N.
    #[arg(long, default_value = "exhaustive")]
    mode: String,
}

// ---------------------------------------------------------------------
// payload assembly

struct Report {
    payload: Map<String, Value>,
    /// CSV rows (header first) for `--csv`.
    csv: Vec<String>,
    summary: String,
}

impl Report {
    fn new(command: &str) -> Report {
        let mut payload = Map::new();
        payload.insert("schema".into(), json!("sqdense/1"));
        payload.insert("command".into(), json!(command));
        payload.insert("value".into(), Value::Null);
        payload.insert("cutoff".into(), Value::Null);
        Report { payload, csv: Vec::new(), summary: String::new() }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.payload.insert(key.into(), value);
    }

    fn euler_product(&mut self, ep: &EulerProduct) {
        self.set("value", json!(ep.value_f64()));
        self.set("cutoff", json!(ep.cutoff));
        let factors: Vec<Value> = ep
            .factors
            .iter()
            .map(|f| json!([f.prime, f.count, f.factor]))
            .collect();
        self.set("factors", Value::Array(factors));
        self.set(
            "tail",
            json!({ "low": ep.tail_low, "high": ep.tail_high, "rigorous": false }),
        );
        self.csv.push("prime,c,factor".into());
        for f in &ep.factors {
            self.csv.push(format!("{},{},{}", f.prime, f.count, f.factor));
        }
    }

    fn estimate(&mut self, est: &DensityEstimate, seed: Option<u64>) {
        self.set("value", json!(est.ratio));
        self.set("hits", json!(est.hits as u64));
        self.set("total", json!(est.total as u64));
        self.set("ratio", json!(est.ratio));
        self.set("half_width", json!(est.half_width));
        if let Some(s) = seed {
            self.set("seed", json!(s));
        }
        self.csv.push("hits,total,ratio,half_width".into());
        self.csv
            .push(format!("{},{},{},{}", est.hits, est.total, est.ratio, est.half_width));
    }
}

// ---------------------------------------------------------------------
// input parsing helpers

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse { line: 0, col: 0, msg: msg.into() }
}

fn parse_z(text: &str) -> Result<MPoly<IntRing>, Error> {
    parse(text, &IntRing)
}

fn parse_a(text: &str, q: u64) -> Result<MPoly<FqtRing>, Error> {
    let ring = FqtRing::new(Fq::from_order(q)?);
    parse(text, &ring)
}

/// Lower a univariate (or constant) integer polynomial to dense form.
fn to_zpoly(f: &MPoly<IntRing>) -> Result<ZPoly, Error> {
    match f.vars().len() {
        0 => Ok(ZPoly::constant(f.constant_value())),
        1 => Ok(f.specialize_except(0, &[BigInt::from(0)])),
        n => Err(Error::Arity { expected: 1, got: n }),
    }
}

fn parse_bounds(text: &str) -> Result<Vec<u64>, Error> {
    text.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| usage(format!("bad box bound `{s}`"))))
        .collect()
}

fn parse_regime(text: &str) -> Result<Regime, Error> {
    if text == "flat" {
        return Ok(Regime::Unrestricted);
    }
    if let Some(rest) = text.strip_prefix("lastlarge:") {
        let ratio = rest.parse().map_err(|_| usage("lastlarge wants lastlarge:R"))?;
        return Ok(Regime::LastLarge { ratio });
    }
    if let Some(rest) = text.strip_prefix("nested:") {
        let mut parts = rest.splitn(2, ':');
        let sigma = parts.next().unwrap_or_default();
        let ratio = match parts.next() {
            Some(r) => r.parse().map_err(|_| usage("bad nested ratio"))?,
            None => 2,
        };
        let perm: Result<Vec<usize>, Error> = sigma
            .split('-')
            .map(|s| s.parse::<usize>().map_err(|_| usage(format!("bad permutation entry `{s}`"))))
            .collect();
        return Ok(Regime::Nested { perm: perm?, ratio });
    }
    Err(usage(format!("unknown regime `{text}` (flat, lastlarge:R, nested:i-j-...[:R])")))
}

fn parse_mode(text: &str, seed: Option<u64>) -> Result<Mode, Error> {
    if text == "exhaustive" {
        return Ok(Mode::Exhaustive);
    }
    if let Some(rest) = text.strip_prefix("mc:") {
        let samples = rest.parse().map_err(|_| usage("monte carlo wants mc:N"))?;
        return Ok(Mode::MonteCarlo { samples, seed: seed.unwrap_or(0) });
    }
    Err(usage(format!("unknown mode `{text}` (exhaustive or mc:N)")))
}

fn parse_rational(text: &str) -> Result<BigRational, Error> {
    let mk = |s: &str| BigInt::from_str(s.trim()).map_err(|_| usage(format!("bad rational `{text}`")));
    match text.split_once('/') {
        Some((n, d)) => {
            let den = mk(d)?;
            if den == BigInt::from(0) {
                return Err(usage("rational with zero denominator"));
            }
            Ok(BigRational::new(mk(n)?, den))
        }
        None => Ok(BigRational::from(mk(text)?)),
    }
}

/// Extract (a, b) from a polynomial that must be a*x + b with a >= 1.
fn linear_parts(f: &ZPoly) -> Result<(u64, i64), Error> {
    if f.degree() != Some(1) {
        return Err(Error::Precondition("delta tables need a linear polynomial".into()));
    }
    let b = f.eval(&BigInt::from(0));
    let a = f.eval(&BigInt::from(1)) - &b;
    match (a.to_u64(), b.to_i64()) {
        (Some(a), Some(b)) if a >= 1 => Ok((a, b)),
        _ => Err(Error::Precondition("delta tables need a >= 1 and a small b".into())),
    }
}

// ---------------------------------------------------------------------
// subcommand drivers

fn seed_of(cli: &Cli) -> u64 {
    cli.seed.unwrap_or(0)
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Cmd::SfZ(a) => {
            let f = parse_z(&a.poly)?;
            let mut rep = Report::new("sf-z");
            if cli.dry_run {
                return Ok(rep);
            }
            let ep = squarefree_density_z(&f, a.cutoff, a.r#unchecked, None)?;
            rep.summary = format!(
                "squarefree density of {} over Z: {:.10} (primes <= {})",
                f.render(),
                ep.value_f64(),
                ep.cutoff
            );
            rep.euler_product(&ep);
            Ok(rep)
        }
        Cmd::SfA(a) => {
            let f = parse_a(&a.poly, a.ring)?;
            let mut rep = Report::new("sf-a");
            if cli.dry_run {
                return Ok(rep);
            }
            let ep = squarefree_density_a(&f, a.deg_cutoff, a.r#unchecked, None)?;
            rep.summary = format!(
                "squarefree density of {} over F_{}[t]: {:.10} (degrees <= {})",
                f.render(),
                a.ring,
                ep.value_f64(),
                ep.cutoff
            );
            rep.euler_product(&ep);
            Ok(rep)
        }
        Cmd::Coprime(a) => {
            let f = parse_z(&a.poly)?;
            let g = parse_z(&a.poly2)?;
            let mut rep = Report::new("coprime");
            if cli.dry_run {
                return Ok(rep);
            }
            let ep = coprime_density_z(&f, &g, a.cutoff, None)?;
            rep.summary = format!(
                "coprimality density of ({}, {}): {:.10} (primes <= {})",
                f.render(),
                g.render(),
                ep.value_f64(),
                ep.cutoff
            );
            rep.euler_product(&ep);
            Ok(rep)
        }
        Cmd::Empirical(a) => run_empirical(cli, a),
        Cmd::Local(a) => {
            let mut rep = Report::new("local");
            let ep = match a.ring {
                None => {
                    let f = parse_z(&a.poly)?;
                    if cli.dry_run {
                        return Ok(rep);
                    }
                    squarefree_density_z(&f, a.cutoff, true, None)?
                }
                Some(q) => {
                    let f = parse_a(&a.poly, q)?;
                    if cli.dry_run {
                        return Ok(rep);
                    }
                    squarefree_density_a(&f, a.deg_cutoff, true, None)?
                }
            };
            rep.summary = format!(
                "{} local counts; truncated product {:.10}",
                ep.factors.len(),
                ep.value_f64()
            );
            rep.euler_product(&ep);
            Ok(rep)
        }
        Cmd::Image(a) => {
            let f = to_zpoly(&parse_z(&a.poly)?)?;
            let mut rep = Report::new("image");
            if cli.dry_run {
                return Ok(rep);
            }
            let ic = image_count(&f, a.bound, a.stride)?;
            rep.summary = format!(
                "{} of {} values of {} in distinct squarefree classes (ratio {:.6})",
                ic.distinct,
                a.bound,
                f.render("x"),
                ic.ratio
            );
            rep.set("value", json!(ic.ratio));
            rep.set("hits", json!(ic.distinct));
            rep.set("total", json!(a.bound));
            rep.set("ratio", json!(ic.ratio));
            rep.csv.push("prefix,distinct,ratio".into());
            match &ic.per_prefix {
                Some(rows) => {
                    for (b, d, r) in rows {
                        rep.csv.push(format!("{b},{d},{r}"));
                    }
                }
                None => rep.csv.push(format!("{},{},{}", a.bound, ic.distinct, ic.ratio)),
            }
            Ok(rep)
        }
        Cmd::Cf(a) => {
            let f = to_zpoly(&parse_z(&a.poly)?)?;
            let mut rep = Report::new("cf");
            if cli.dry_run {
                return Ok(rep);
            }
            let cf = c_f_constant(&f)?;
            rep.summary = match &cf.pi_squared_multiple {
                Some(m) => format!("c_f({}) = {:.10} = ({}) / pi^2", f.render("x"), cf.value, m),
                None => format!("c_f({}) = {}", f.render("x"), cf.value),
            };
            rep.set("value", json!(cf.value));
            rep.csv.push("deg_h,value".into());
            rep.csv.push(format!("{},{}", cf.deg_h, cf.value));
            Ok(rep)
        }
        Cmd::Delta(a) => {
            let f = to_zpoly(&parse_z(&a.poly)?)?;
            let (aa, bb) = linear_parts(&f)?;
            let mut rep = Report::new("delta");
            if cli.dry_run {
                return Ok(rep);
            }
            let table = delta_table(aa, bb)?;
            let sum = table.delta_sum();
            rep.summary = format!(
                "delta table for {}: sum {} over {} residues",
                f.render("x"),
                sum,
                table.entries.len()
            );
            rep.set("value", json!(sum.to_f64().unwrap_or(f64::NAN)));
            rep.csv.push("m,delta".into());
            let rows: Vec<Value> = table
                .entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let m = i + 1;
                    rep.csv.push(match e {
                        Some(d) => format!("{m},{d}"),
                        None => format!("{m},"),
                    });
                    json!([m, e])
                })
                .collect();
            rep.set("factors", Value::Array(rows));
            Ok(rep)
        }
        Cmd::Collide(a) => {
            let f = to_zpoly(&parse_z(&a.poly)?)?;
            let q = parse_rational(&a.q)?;
            let mut rep = Report::new("collide");
            if cli.dry_run {
                return Ok(rep);
            }
            let hits = collision_count(&f, &q, a.bound)?;
            let ratio = hits as f64 / a.bound as f64;
            rep.summary = format!(
                "{} collisions of {} in the class of {} up to {}",
                hits,
                f.render("x"),
                q,
                a.bound
            );
            rep.set("value", json!(ratio));
            rep.set("hits", json!(hits));
            rep.set("total", json!(a.bound));
            rep.set("ratio", json!(ratio));
            rep.csv.push("hits,total,ratio".into());
            rep.csv.push(format!("{},{},{}", hits, a.bound, ratio));
            Ok(rep)
        }
        Cmd::EcGamma(a) => {
            let mut rep = Report::new("ec-gamma");
            if cli.dry_run {
                Fq::from_order(a.ring)?;
                return Ok(rep);
            }
            let lf = if a.rd { rd_limit(a.ring, a.deg_cutoff)? } else { gamma_q(a.ring, a.deg_cutoff)? };
            rep.summary = format!(
                "{} for q = {}: {:.10} = prefactor {} * product {:.10} (degrees <= {})",
                if a.rd { "curve-count limit" } else { "gamma_q" },
                a.ring,
                lf.value,
                lf.prefactor,
                lf.product.value_f64(),
                a.deg_cutoff
            );
            rep.euler_product(&lf.product);
            rep.set("value", json!(lf.value));
            Ok(rep)
        }
        Cmd::EcEmpirical(a) => {
            let mut rep = Report::new("ec-empirical");
            let mode = parse_mode(&a.mode, cli.seed)?;
            if cli.dry_run {
                Fq::from_order(a.ring)?;
                return Ok(rep);
            }
            let mc = matches!(mode, Mode::MonteCarlo { .. });
            let est = empirical_disc_density(a.ring, a.deg_cutoff, mode, None)?;
            rep.summary = format!(
                "squarefree-discriminant density over F_{}[t], degrees <= {}: {:.6}",
                a.ring, a.deg_cutoff, est.ratio
            );
            rep.estimate(&est, if mc { Some(seed_of(cli)) } else { None });
            Ok(rep)
        }
    }
}

fn run_empirical(cli: &Cli, a: &EmpiricalArgs) -> Result<Report, Error> {
    let mut rep = Report::new("empirical");
    let spec = BoxSpec {
        dims: parse_bounds(&a.bounds)?,
        regime: parse_regime(&a.regime)?,
        mode: parse_mode(&a.mode, cli.seed)?,
        signed: a.signed,
    };
    let mc = matches!(spec.mode, Mode::MonteCarlo { .. });
    let kind = match (a.predicate.as_str(), &a.poly2) {
        (_, Some(_)) | ("coprime", _) => "coprime",
        ("squarefree", None) => "squarefree",
        ("zero", None) => "zero",
        (other, _) => return Err(usage(format!("unknown predicate `{other}`"))),
    };
    if kind == "coprime" && a.poly2.is_none() {
        return Err(usage("coprime needs --poly2"));
    }
    let est = match a.ring {
        None => {
            let f = parse_z(&a.poly)?;
            let pred = match kind {
                "coprime" => {
                    PredicateZ::Coprime(f, parse_z(a.poly2.as_ref().unwrap())?).normalized()
                }
                "zero" => PredicateZ::Zero(f),
                _ => PredicateZ::Squarefree(f),
            };
            if cli.dry_run {
                spec.effective_dims(false)?;
                return Ok(rep);
            }
            empirical_density_z(&pred, &spec, None)?
        }
        Some(q) => {
            if a.signed {
                return Err(usage("--signed only applies to integer boxes"));
            }
            let f = parse_a(&a.poly, q)?;
            let pred = match kind {
                "coprime" => {
                    let g = parse_a(a.poly2.as_ref().unwrap(), q)?;
                    let (f, g) = MPoly::unify(&f, &g);
                    PredicateA::Coprime(f, g)
                }
                "zero" => PredicateA::Zero(f),
                _ => PredicateA::Squarefree(f),
            };
            if cli.dry_run {
                spec.effective_dims(true)?;
                return Ok(rep);
            }
            empirical_density_a(&pred, &spec, None)?
        }
    };
    rep.summary = format!(
        "{} predicate on box [{}]: {} of {} points (ratio {:.6})",
        kind, a.bounds, est.hits, est.total, est.ratio
    );
    rep.estimate(&est, if mc { Some(seed_of(cli)) } else { None });
    Ok(rep)
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Arity { .. } => 2,
        Error::Budget { .. } => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // best effort; a second initialization in tests is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let started = Instant::now();
    match run(&cli) {
        Ok(mut rep) => {
            if cli.dry_run {
                if !cli.quiet {
                    eprintln!("ok: inputs validated (dry run)");
                }
                return ExitCode::SUCCESS;
            }
            rep.set("elapsed_ms", json!(started.elapsed().as_millis() as u64));
            if cli.csv {
                for row in &rep.csv {
                    println!("{row}");
                }
            } else {
                println!("{}", serde_json::to_string(&Value::Object(rep.payload)).unwrap());
            }
            if !cli.quiet {
                eprintln!("{}", rep.summary);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}
