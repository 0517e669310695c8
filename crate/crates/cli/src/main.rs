//! `projcanon`: canonical forms, automorphism groups and equivalence of
//! subspace families and codes from the command line.
//!
//! Exit codes: 0 success (or equivalent), 1 inequivalent or a failed check,
//! 2 usage or input error, 3 capacity exceeded.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use projcanon::codes::{canonize_code, code_equivalence, CodeCanon};
use projcanon::format::{self, Instance};
use projcanon::hyperoval::dual_hyperoval;
use projcanon::model::{normalize, DualizeMode};
use projcanon::oracle::{brute_same_orbit, brute_stab_order};
use projcanon::random::{random_family, random_semilinear, transform_family};
use projcanon::search::SearchConfig;
use projcanon::{canonize, CanonConfig, CanonResult, Error, Field};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use report::{Body, Canonization, Equivalence, FieldInfo, Map, OracleCheck, Report, Selftest, SelftestCase, Stats};

#[derive(Parser)]
#[command(name = "projcanon", version, about = "Canonical forms of subspace families under the semilinear group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form, transporter and automorphism group of an instance.
    Canonize {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Automorphism group only.
    Aut {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Decides whether two instances are equivalent; exit 0 iff they are.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Prints the dual hyperoval family of F_2^{2d} built from x^3.
    GenHyperoval {
        #[arg(value_parser = clap::value_parser!(u32).range(2..=8))]
        d: u32,
    },
    /// Cross-checks canonical forms and group orders against exhaustive search.
    Selftest {
        #[arg(long, default_value_t = 60)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dualize {
    Auto,
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Args)]
struct Opts {
    #[arg(long, value_enum, default_value_t = Dualize::Auto)]
    dualize: Dualize,
    #[arg(long)]
    no_aut_prune: bool,
    #[arg(long)]
    no_candidate_prune: bool,
    /// Also check the result by enumerating the whole group (small cases).
    #[arg(long)]
    oracle: bool,
    #[arg(long, env = "PROJCANON_NODE_LIMIT")]
    node_limit: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

impl Opts {
    fn config(&self) -> CanonConfig {
        let mut search = SearchConfig { aut_prune: !self.no_aut_prune, candidate_prune: !self.no_candidate_prune, ..Default::default() };
        if let Some(n) = self.node_limit {
            search.node_limit = n;
        }
        let dualize = match self.dualize {
            Dualize::Auto => DualizeMode::Auto,
            Dualize::On => DualizeMode::On,
            Dualize::Off => DualizeMode::Off,
        };
        CanonConfig { dualize, search }
    }
}

enum Failure {
    Usage(String),
    Capacity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::CapacityExceeded(_) => Failure::Capacity(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<Instance, Failure> {
    format::read_file(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Canonization of a family, or of a code together with its canonical code.
fn run_canon(inst: &Instance, cfg: &CanonConfig) -> Result<(CanonResult, Option<CodeCanon>), Error> {
    match inst.code() {
        Some(code) => {
            let c = canonize_code(code, cfg)?;
            Ok((c.result.clone(), Some(c)))
        }
        None => Ok((canonize(&inst.family(), cfg)?, None)),
    }
}

fn stats(r: &CanonResult) -> Stats {
    let s = &r.stats;
    Stats { nodes: s.nodes, leaves: s.leaves, pruned_by_trace: s.pruned_by_trace, pruned_by_aut: s.pruned_by_aut }
}

fn stab_check(r: &CanonResult) -> Result<OracleCheck, Error> {
    let order = brute_stab_order(&r.input)?;
    Ok(OracleCheck { what: "stabilizer_order".into(), agrees: order == r.aut_order_gammal, value: order.to_string() })
}

fn emit(report: &Report, fmt: OutputFormat) {
    match fmt {
        OutputFormat::Text => print!("{}", report.text()),
        OutputFormat::Json => print!("{}", report.json()),
    }
}

fn timing(label: &str, start: Instant) {
    eprintln!("{label}: {:.3} s", start.elapsed().as_secs_f64());
}

fn canonize_cmd(file: &PathBuf, opts: &Opts, aut_only: bool) -> Result<ExitCode, Failure> {
    let inst = read(file)?;
    let cfg = opts.config();
    let start = Instant::now();
    let (r, code) = run_canon(&inst, &cfg)?;
    timing("search time", start);
    let oracle = if opts.oracle { vec![stab_check(&r)?] } else { Vec::new() };
    let ok = oracle.iter().all(|o| o.agrees);
    let result = if aut_only {
        Body::Aut { group: report::group(&r), config_hash: r.config_hash.clone(), stats: stats(&r) }
    } else {
        Body::Canonize(Canonization::new(&r, code.as_ref()))
    };
    let rep = Report {
        schema: report::SCHEMA,
        schema_version: report::SCHEMA_VERSION,
        command: if aut_only { "aut" } else { "canonize" },
        field: Some(FieldInfo::new(&r.input.field)),
        k: Some(r.input.k),
        result,
        oracle,
    };
    emit(&rep, opts.format);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn equiv_cmd(first: &PathBuf, second: &PathBuf, opts: &Opts) -> Result<ExitCode, Failure> {
    let (a, b) = (read(first)?, read(second)?);
    if a.code().is_some() != b.code().is_some() {
        return Err(Failure::Usage("cannot compare a code with a subspace family".into()));
    }
    if **a.field() != **b.field() {
        return Err(Failure::Usage("the instances are over different fields".into()));
    }
    let cfg = opts.config();
    let start = Instant::now();
    let (ra, rb) = std::thread::scope(|s| {
        let h = s.spawn(|| run_canon(&b, &cfg));
        let ra = run_canon(&a, &cfg);
        (ra, h.join().expect("canonization thread"))
    });
    let ((ra, _), (rb, _)) = (ra?, rb?);
    let equivalent = ra.input.k == rb.input.k && ra.canonical == rb.canonical && ra.config_hash == rb.config_hash;
    let f: &Field = &ra.input.field;
    let mut mapping = None;
    let mut code_certificate = None;
    if equivalent {
        match (a.code(), b.code()) {
            (Some(ca), Some(cb)) => {
                let cert = code_equivalence(ca, cb, &cfg)?.ok_or_else(|| Failure::Usage("code canonical forms disagree".into()))?;
                mapping = Some(Map::new(f, &cert.map));
                code_certificate = Some(report::Certificate::new(f, &cert));
            }
            _ => {
                let g = ra.transporter.inverse(f).compose(f, &rb.transporter);
                if rb.input.act(&g) != ra.input {
                    return Err(Failure::Usage("mapping failed verification".into()));
                }
                mapping = Some(Map::new(f, &g));
            }
        }
    }
    timing("search time", start);
    let mut oracle = Vec::new();
    if opts.oracle {
        let same = ra.input.k == rb.input.k && brute_same_orbit(&ra.input, &rb.input)?;
        oracle.push(OracleCheck { what: "same_orbit".into(), value: same.to_string(), agrees: same == equivalent });
    }
    let ok = oracle.iter().all(|o| o.agrees);
    let rep = Report {
        schema: report::SCHEMA,
        schema_version: report::SCHEMA_VERSION,
        command: "equiv",
        field: Some(FieldInfo::new(f)),
        k: (ra.input.k == rb.input.k).then_some(ra.input.k),
        result: Body::Equiv(Equivalence {
            equivalent,
            config_hash: ra.config_hash.clone(),
            mapping,
            code_certificate,
            stats: [stats(&ra), stats(&rb)],
        }),
        oracle,
    };
    emit(&rep, opts.format);
    Ok(if equivalent && ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn selftest_cmd(count: usize, seed: u64, fmt: OutputFormat) -> Result<ExitCode, Failure> {
    let mut rng = StdRng::seed_from_u64(seed);
    let cfg = CanonConfig::default();
    let (mut equivalent_pairs, mut failures) = (0, Vec::new());
    let start = Instant::now();
    for i in 0..count {
        let (p, max_total) = if i % 3 == 2 { (3, 3) } else { (2, 4) };
        let f = Arc::new(Field::new(p, 1)?);
        let k = 3;
        let sets = 1 + i % 2;
        let a = random_family(&f, k, sets, max_total / sets, 1..=k - 1, &mut rng);
        let b = if rng.gen_bool(0.5) {
            transform_family(&a, &random_semilinear(&f, k, &mut rng), &mut rng)
        } else {
            random_family(&f, k, sets, max_total / sets, 1..=k - 1, &mut rng)
        };
        let (ra, rb) = (canonize(&a, &cfg)?, canonize(&b, &cfg)?);
        let (na, nb) = (normalize(&a)?, normalize(&b)?);
        let same_orbit = brute_same_orbit(&na, &nb)?;
        let forms_equal = ra.canonical == rb.canonical;
        let stab = brute_stab_order(&na)?;
        if same_orbit {
            equivalent_pairs += 1;
        }
        if same_orbit != forms_equal || stab != ra.aut_order_gammal {
            failures.push(SelftestCase {
                q: p,
                k,
                same_orbit,
                forms_equal,
                stab_order: stab.to_string(),
                aut_order: ra.aut_order_gammal.to_string(),
            });
        }
    }
    timing("selftest time", start);
    let ok = failures.is_empty();
    let rep = Report {
        schema: report::SCHEMA,
        schema_version: report::SCHEMA_VERSION,
        command: "selftest",
        field: None,
        k: None,
        result: Body::Selftest(Selftest { seed, cases: count, equivalent_pairs, failures }),
        oracle: Vec::new(),
    };
    emit(&rep, fmt);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Canonize { file, opts } => canonize_cmd(file, opts, false),
        Command::Aut { file, opts } => canonize_cmd(file, opts, true),
        Command::Equiv { first, second, opts } => equiv_cmd(first, second, opts),
        Command::GenHyperoval { d } => {
            let fam = dual_hyperoval(*d as usize)?;
            print!("{}", format::write_family(&fam));
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { count, seed, format } => selftest_cmd(*count, *seed, *format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Capacity(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
