//! Command-line front end: every quantity in `permcover` behind a subcommand,
//! plus verification suites that report each comparison they make.
//!
//! [`execute`] is the whole program minus process exit; `main.rs` only prints
//! its output. Exit codes: 0 success, 1 a check failed, 2 usage or domain
//! error, 3 resource limit hit.

use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use permcover::covers::{self, UVector};
use permcover::ewens::{self, SamplerConfig};
use permcover::exactcomb;
use permcover::limitdist;
use permcover::perm::{self, Permutation};
use permcover::scalar::rational_to_f64;

pub mod report;
mod verify;

pub use report::{Check, Report, Status};
use report::{nat, num, rat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Malformed arguments or values outside an operation's domain.
    Usage(String),
    /// A size or budget limit was hit.
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Resource(_) => EXIT_RESOURCE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
        }
    }
}

impl From<permcover::Error> for CliError {
    fn from(e: permcover::Error) -> Self {
        match e {
            permcover::Error::Resource(m) => CliError::Resource(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "permcover", version, about = "Cycle counts, fixed sets and cover counts of random permutations")]
pub struct Cli {
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Tolerance for truncated series and limit-law computations.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Work budget for enumerations (subsets, DP states or box points).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bell number B_n.
    Bell {
        #[arg(long)]
        n: usize,
    },
    /// Unsigned Stirling numbers of the first kind s(n, k); the whole row without --k.
    Stirling1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Stirling numbers of the second kind {n k}; the whole row without --k.
    Stirling2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Touchard polynomial T_k, optionally evaluated at a rational --x.
    Touchard {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        x: Option<String>,
    },
    /// T_n(x) from the Dobiński series, compared with the exact polynomial.
    Dobinski {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        x: f64,
    },
    /// Number of m-covers v_{k;m}; --k-max gives the table k = 1..k-max.
    Covers {
        #[arg(long, required_unless_present = "k_max")]
        k: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        m: usize,
        /// Also count by brute-force enumeration (k <= 3, m <= 5).
        #[arg(long)]
        oracle: bool,
    },
    /// γ_m(u) = [z^m] prod_j (1 + z^j)^{u_j}.
    Gamma {
        #[arg(long)]
        m: usize,
        /// Comma-separated u_1,...,u_m.
        #[arg(long)]
        u: String,
    },
    /// Number of m-subsets fixed by a permutation given in cycle notation.
    Fixedsets {
        #[arg(long)]
        perm: String,
        #[arg(long)]
        m: usize,
        /// Degree; unlisted elements are fixed points.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Exact moment by enumerating S_n.
    MomentExact(MomentExactArgs),
    /// Exact E C_m^k from the closed form (n >= mk).
    MomentClosed {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        theta: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Monte Carlo estimate of E prod_i C_{m_i}^{k_i}.
    MomentMc {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        theta: String,
        #[arg(long)]
        specs: String,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
    },
    /// Draw Ewens permutations.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        theta: String,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        /// Report cycle counts c_1..c_max-m instead of permutations.
        #[arg(long)]
        max_m: Option<usize>,
    },
    /// The limit law of E_m.
    #[command(subcommand)]
    Limit(LimitCommand),
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Debug, Args)]
pub struct MomentExactArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "1")]
    pub theta: String,
    /// Cycle-count moment specs `m:k,m:k,...` for E prod C_m^k.
    #[arg(long, conflicts_with = "fixed_set")]
    pub specs: Option<String>,
    /// Fixed-set moment E (E_m)^k under the uniform measure; needs --k.
    #[arg(long, requires = "k")]
    pub fixed_set: Option<usize>,
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum LimitCommand {
    /// Truncated law of E_m.
    Dist {
        #[arg(long)]
        m: usize,
    },
    /// V_m(x) = E exp(x E_m).
    Egf {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Coefficients v_{k;m} / k! for k = 1..K.
    Coeffs {
        #[arg(long)]
        m: usize,
        #[arg(long = "K", alias = "k")]
        k_max: usize,
    },
    /// Enclosure of P(E_m >= 1).
    Nonzero {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "theoremC", alias = "theoremc")]
    TheoremC,
    #[value(name = "theorem1")]
    Theorem1,
    #[value(name = "theorem2")]
    Theorem2,
    Identities,
    All,
}

/// What the process should print and how it should exit.
#[derive(Debug, Clone)]
pub struct Execution {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
    pub report: Option<Report>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn execute<I, T>(argv: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Execution {
                stdout,
                stderr,
                exit_code: code,
                report: None,
            };
        }
    };
    match run(&cli) {
        Ok(report) => {
            let stdout = match cli.format {
                Format::Json => report.to_json() + "\n",
                Format::Table => report.to_table(),
            };
            let exit_code = if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            Execution {
                stdout,
                stderr: String::new(),
                exit_code,
                report: Some(report),
            }
        }
        Err(e) => Execution {
            stdout: String::new(),
            stderr: format!("{e}\n"),
            exit_code: e.exit_code(),
            report: None,
        },
    }
}

/// Runs an already parsed command.
pub fn run(cli: &Cli) -> CliResult<Report> {
    let start = Instant::now();
    let mut report = dispatch(cli)?;
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let eps = cli.eps.unwrap_or(1e-10);
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(CliError::Usage(format!("--eps must be positive, got {eps}")));
    }
    match &cli.command {
        Command::Bell { n } => {
            let mut r = Report::new("bell");
            r.input("n", *n).output("value", nat(&exactcomb::bell(*n)));
            Ok(r)
        }
        Command::Stirling1 { n, k } => stirling("stirling1", *n, *k, |n, k| {
            if k == 0 {
                Ok(if n == 0 { One::one() } else { Zero::zero() })
            } else if k > n {
                Ok(Zero::zero())
            } else {
                Ok(exactcomb::stirling1_unsigned(n, k)?)
            }
        }),
        Command::Stirling2 { n, k } => {
            stirling("stirling2", *n, *k, |n, k| Ok(exactcomb::stirling2(n, k)))
        }
        Command::Touchard { k, x } => {
            let poly = exactcomb::touchard::<BigRational>(*k);
            let mut r = Report::new("touchard");
            r.input("k", *k)
                .output("coefficients", poly.coeffs().iter().map(rat).collect::<Vec<_>>())
                .output("polynomial", poly.to_string());
            if let Some(x) = x {
                let xv = parse_rational(x)?;
                r.input("x", rat(&xv)).output("value", rat(&poly.eval(&xv)));
            }
            Ok(r)
        }
        Command::Dobinski { n, x } => {
            let tol = cli.eps.unwrap_or(1e-12);
            let s = exactcomb::dobinski(*n, *x, tol)?;
            let exact = exactcomb::touchard::<BigRational>(*n as usize)
                .eval(&rational_from_f64(*x)?);
            let exact = rational_to_f64(&exact);
            let mut r = Report::new("dobinski");
            r.input("n", *n)
                .input("x", num(*x))
                .input("rel_tol", num(tol))
                .output("value", num(s.value))
                .output("truncation_bound", num(s.truncation_bound))
                .output("terms", s.terms)
                .check(Check::close(
                    "series vs exact Touchard polynomial (relative)",
                    s.value,
                    exact,
                    1e-9 * exact.abs().max(1.0),
                ));
            Ok(r)
        }
        Command::Covers { k, k_max, m, oracle } => covers_cmd(cli, *k, *k_max, *m, *oracle),
        Command::Gamma { m, u } => {
            let u = UVector(parse_list::<usize>(u, "u")?);
            let g = covers::gamma(*m, &u)?;
            let b = covers::gamma_binomial_sum(*m, &u)?;
            let mut r = Report::new("gamma");
            r.input("m", *m)
                .input("u", u.0.clone())
                .output("value", nat(&g))
                .check(Check::exact("polynomial coefficient vs binomial sum", nat(&g), nat(&b)));
            Ok(r)
        }
        Command::Fixedsets { perm: text, m, n } => {
            let p = Permutation::parse_cycles(text, *n)?;
            let ct = p.cycle_type();
            let by_type = perm::fixed_set_count(&ct, *m);
            let budget = cli.budget.unwrap_or(perm::DEFAULT_SUBSET_BUDGET);
            let mut r = Report::new("fixedsets");
            r.input("perm", p.to_string())
                .input("n", p.n())
                .input("m", *m)
                .output("value", nat(&by_type))
                .output("cycle_type", ct.counts().to_vec());
            match perm::fixed_set_count_direct(&p, *m, budget) {
                Ok(direct) => {
                    r.check(Check::exact(
                        "cycle-type formula vs direct subset enumeration",
                        nat(&by_type),
                        nat(&direct),
                    ));
                }
                Err(permcover::Error::Resource(_)) => {
                    r.output("direct_check", "skipped: subset enumeration exceeds budget");
                }
                Err(e) => return Err(e.into()),
            }
            Ok(r)
        }
        Command::MomentExact(args) => moment_exact(args),
        Command::MomentClosed { n, theta, m, k } => {
            let th = parse_rational(theta)?;
            let value = perm::closed_cycle_moment(*n, &th, *m, *k)?;
            let limit = exactcomb::touchard::<BigRational>(*k)
                .eval(&(th.clone() / BigRational::from_integer(BigInt::from(*m))));
            let mut r = Report::new("moment-closed");
            r.input("n", *n)
                .input("theta", rat(&th))
                .input("m", *m)
                .input("k", *k)
                .output("value", rat(&value))
                .output("value_f64", num(rational_to_f64(&value)))
                .output("limit", rat(&limit));
            if *n <= 8 {
                let exact = perm::exact_cycle_moment(*n, &th, &[(*m, *k as u32)])?;
                r.check(Check::exact("closed form vs enumeration", rat(&value), rat(&exact)));
            }
            Ok(r)
        }
        Command::MomentMc {
            n,
            theta,
            specs,
            replicates,
        } => {
            let th = parse_float(theta)?;
            let specs = parse_specs(specs)?;
            let cfg = SamplerConfig::new(*n, th, cli.seed, *replicates)?;
            let est = ewens::mc_moment(&cfg, &specs)?;
            let mut r = Report::new("moment-mc");
            r.input("n", *n)
                .input("theta", num(th))
                .input("specs", specs_value(&specs))
                .input("replicates", *replicates)
                .output("estimate", num(est.estimate))
                .output("stderr", num(est.stderr))
                .output("replicates", est.replicates)
                .output("seed", est.seed);
            r.seed = Some(cli.seed);
            Ok(r)
        }
        Command::Sample {
            n,
            theta,
            replicates,
            max_m,
        } => {
            let th = parse_float(theta)?;
            let cfg = SamplerConfig::new(*n, th, cli.seed, *replicates)?;
            let mut r = Report::new("sample");
            r.input("n", *n).input("theta", num(th)).input("replicates", *replicates);
            match max_m {
                Some(mm) => {
                    let samples = ewens::cycle_count_samples(&cfg, *mm)?;
                    r.input("max_m", *mm).output("cycle_counts", samples);
                }
                None => {
                    let perms: Vec<String> = (0..*replicates)
                        .map(|i| ewens::sample_permutation_replicate(&cfg, i).to_string())
                        .collect();
                    r.output("permutations", perms);
                }
            }
            r.seed = Some(cli.seed);
            Ok(r)
        }
        Command::Limit(cmd) => limit_cmd(cli, cmd),
        Command::Verify { suite } => Ok(verify::run_suite(*suite, cli.seed)),
    }
}

fn stirling(
    name: &str,
    n: usize,
    k: Option<usize>,
    f: impl Fn(usize, usize) -> Result<num_bigint::BigUint, permcover::Error>,
) -> CliResult<Report> {
    let mut r = Report::new(name);
    r.input("n", n);
    match k {
        Some(k) => {
            r.input("k", k).output("value", nat(&f(n, k)?));
        }
        None => {
            let row = (0..=n)
                .map(|k| Ok(json!({ "k": k, "value": nat(&f(n, k)?) })))
                .collect::<CliResult<Vec<_>>>()?;
            r.output("row", row);
        }
    }
    Ok(r)
}

fn covers_cmd(
    cli: &Cli,
    k: Option<usize>,
    k_max: Option<usize>,
    m: usize,
    oracle: bool,
) -> CliResult<Report> {
    let budget = cli.budget.unwrap_or(covers::DEFAULT_STATE_BUDGET);
    let mut r = Report::new("covers");
    r.input("m", m);
    let ks: Vec<usize> = match (k, k_max) {
        (Some(k), _) => {
            r.input("k", k);
            vec![k]
        }
        (None, Some(kmax)) => {
            r.input("k_max", kmax);
            (1..=kmax).collect()
        }
        (None, None) => return Err(CliError::Usage("covers needs --k or --k-max".into())),
    };
    let mut rows = Vec::new();
    for &k in &ks {
        let v = covers::count_covers_with_budget(k, m, budget)?;
        if oracle {
            let b = covers::count_covers_bruteforce(k, m)?;
            r.check(Check::exact(
                format!("dynamic programming vs brute force, k={k}, m={m}"),
                nat(&v.value),
                nat(&b.value),
            ));
        }
        rows.push(json!({ "k": k, "m": m, "value": nat(&v.value) }));
    }
    if k.is_some() {
        r.output("value", rows[0]["value"].clone());
    } else {
        r.output("table", rows);
    }
    Ok(r)
}

fn moment_exact(args: &MomentExactArgs) -> CliResult<Report> {
    let mut r = Report::new("moment-exact");
    r.input("n", args.n);
    match (&args.specs, args.fixed_set) {
        (Some(specs), None) => {
            let th = parse_rational(&args.theta)?;
            let specs = parse_specs(specs)?;
            let value = perm::exact_cycle_moment(args.n, &th, &specs)?;
            r.input("theta", rat(&th))
                .input("specs", specs_value(&specs))
                .output("value", rat(&value))
                .output("value_f64", num(rational_to_f64(&value)));
        }
        (None, Some(m)) => {
            let k = args.k.ok_or_else(|| CliError::Usage("--fixed-set needs --k".into()))?;
            let value = perm::exact_fixed_set_moment(args.n, m, k)?;
            r.input("fixed_set_m", m)
                .input("k", k)
                .output("value", rat(&value))
                .output("value_f64", num(rational_to_f64(&value)));
        }
        _ => {
            return Err(CliError::Usage(
                "moment-exact needs exactly one of --specs or --fixed-set".into(),
            ))
        }
    }
    Ok(r)
}

fn limit_cmd(cli: &Cli, cmd: &LimitCommand) -> CliResult<Report> {
    let budget = cli.budget.unwrap_or(limitdist::DEFAULT_BOX_BUDGET);
    match cmd {
        LimitCommand::Dist { m } => {
            let eps = cli.eps.unwrap_or(1e-8);
            let d = limitdist::dist_e_with_order(*m, eps, limitdist::DEFAULT_MOMENT_ORDER, budget)?;
            let pmf: Vec<Value> = d
                .support
                .iter()
                .map(|&(v, p)| json!({ "value": v, "probability": num(p) }))
                .collect();
            let mut r = Report::new("limit dist");
            r.input("m", *m)
                .input("eps", num(eps))
                .output("pmf", pmf)
                .output("mass_captured", num(d.mass_captured))
                .output("mean", num(d.mean()))
                .output("second_moment", num(d.moment(2)))
                .output("variance", num(d.variance()));
            Ok(r)
        }
        LimitCommand::Egf { m, x } => {
            let eps = cli.eps.unwrap_or(1e-10);
            let v = limitdist::vm_eval(*m, *x, eps)?;
            let mut r = Report::new("limit egf");
            r.input("m", *m)
                .input("x", num(*x))
                .input("eps", num(eps))
                .output("value", num(v.value))
                .output("truncation_bound", num(v.truncation_bound));
            if *m == 2 || *m == 3 {
                let c = limitdist::vm_closed(*m, *x)?;
                r.output("closed_form", num(c.value)).check(Check::close(
                    "box sum vs closed-form series",
                    v.value,
                    c.value,
                    2.0 * (v.truncation_bound + c.truncation_bound) + 1e-12,
                ));
            }
            if *m == 1 {
                let want = (x.exp() - 1.0).exp();
                r.check(Check::close(
                    "box sum vs exp(e^x - 1)",
                    v.value,
                    want,
                    2.0 * v.truncation_bound + 1e-12 * want,
                ));
            }
            Ok(r)
        }
        LimitCommand::Coeffs { m, k_max } => {
            let coeffs = limitdist::vm_series_coeffs(*m, *k_max)?;
            let mut r = Report::new("limit coeffs");
            r.input("m", *m)
                .input("K", *k_max)
                .output("constant_term", rat(&BigRational::one()))
                .output("coefficients", coeffs.iter().map(rat).collect::<Vec<_>>());
            Ok(r)
        }
        LimitCommand::Nonzero { m } => {
            let eps = cli.eps.unwrap_or(1e-8);
            let iv = limitdist::prob_nonzero(*m, eps)?;
            let mut r = Report::new("limit nonzero");
            r.input("m", *m)
                .input("eps", num(eps))
                .output("lower", num(iv.lower))
                .output("upper", num(iv.upper));
            Ok(r)
        }
    }
}

/// Parses `"p/q"`, an integer, or a terminating decimal such as `"0.25"`,
/// exactly.
pub fn parse_rational(s: &str) -> CliResult<BigRational> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("cannot parse {s:?} as a rational number"));
    if s.contains('/') {
        let q = BigRational::from_str(s).map_err(|_| bad())?;
        return Ok(q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(numer, denom);
    Ok(if neg { -q } else { q })
}

fn parse_float(s: &str) -> CliResult<f64> {
    parse_rational(s)?
        .to_f64()
        .ok_or_else(|| CliError::Usage(format!("{s:?} is out of floating-point range")))
}

fn rational_from_f64(x: f64) -> CliResult<BigRational> {
    BigRational::from_float(x).ok_or_else(|| CliError::Usage(format!("{x} is not finite")))
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| CliError::Usage(format!("bad entry {t:?} in --{what}")))
        })
        .collect()
}

/// Parses `"m:k,m:k"`.
pub fn parse_specs(s: &str) -> CliResult<Vec<(usize, u32)>> {
    let specs = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (m, k) = t
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("spec {t:?} is not of the form m:k")))?;
            let m = m.trim().parse::<usize>();
            let k = k.trim().parse::<u32>();
            match (m, k) {
                (Ok(m), Ok(k)) => Ok((m, k)),
                _ => Err(CliError::Usage(format!("spec {t:?} is not of the form m:k"))),
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    if specs.is_empty() {
        return Err(CliError::Usage("empty --specs".into()));
    }
    Ok(specs)
}

fn specs_value(specs: &[(usize, u32)]) -> Value {
    specs.iter().map(|&(m, k)| json!({ "m": m, "k": k })).collect()
}
