//! `ffla` command-line driver.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ffla::apps::{betti_numbers, format_group_element, group_ring_unit, parse_group_element, SimplicialComplex};
use ffla::costmodel::{choose_blocking, solve_crossing, OmegaTable};
use ffla::displacement::DisplacementOperator;
use ffla::geninv::{inverse_generators, naive_column_recovery, slab_product, GeneratorStrategy};
use ffla::krylov::{matrix_inv, InvOptions};
use ffla::matrix::io::{format_dense, parse_any, read_dense};
use ffla::matrix::{dense_inverse, mat_mul, set_threads, DenseMatrix, SparseMatrix};
use ffla::rank::{rank_and_nullspace, RankOptions};
use ffla::structured::build_block_hankel;
use ffla::{displacement, Error, OpCounter, PrimeField, SeededRng};

#[derive(Parser)]
#[command(name = "ffla", version, about = "Exact linear algebra over prime fields")]
struct Cli {
    #[command(flatten)]
    opts: Common,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Common {
    /// Field modulus; must agree with the modulus in input file headers.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Block size; defaults to the cost-model choice.
    #[arg(long, global = true)]
    s: Option<usize>,
    /// Generator strategy: dense-oracle or schur.
    #[arg(long, global = true, default_value = "dense-oracle")]
    strategy: GeneratorStrategy,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// File of `k omega` lines replacing the bundled exponent table.
    #[arg(long = "omega-table", global = true)]
    omega_table: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 8)]
    retries: usize,
    /// Also write the JSON counters line to this file.
    #[arg(long, global = true)]
    counters: Option<PathBuf>,
    /// Suppress the JSON counters line on standard output.
    #[arg(long, global = true)]
    quiet: bool,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Invert a sparse matrix and write the dense inverse.
    Invert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified rank of a square matrix.
    Rank {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Certified rank and a nullspace basis.
    Nullspace {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Betti numbers of a simplicial complex, one per dimension.
    Betti {
        #[arg(long = "in")]
        input: PathBuf,
        /// Reject complexes that are not face-closed instead of closing them.
        #[arg(long = "assume-closed")]
        assume_closed: bool,
        /// Write the cycle bases, one dense block per dimension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test a group ring element for invertibility and write its inverse.
    GroupUnit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the orbit matrix, row i holding g_i times the inverse.
        #[arg(long)]
        orbit: Option<PathBuf>,
    },
    /// Multiplication counts of the recovery paths on block Hankel fixtures.
    Bench {
        /// Matrix sizes.
        #[arg(long, value_delimiter = ',', default_value = "128,256")]
        sizes: Vec<usize>,
        /// Numbers of blocks per side.
        #[arg(long, value_delimiter = ',', default_value = "4")]
        blocks: Vec<usize>,
        /// CSV output; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the exponent curves as CSV.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check that A times B is the identity.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        inverse: PathBuf,
    },
}

/// Exit codes: 1 for mathematical failures, 2 for malformed input, 3 for
/// unmet preconditions.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Singular { .. }
        | Error::SingularInput { .. }
        | Error::NotAUnit
        | Error::NotStronglyRegular { .. }
        | Error::PreconditionFailure { .. }
        | Error::RetriesExhausted { .. }
        | Error::OperatorSingular(_) => 1,
        Error::Parse { .. }
        | Error::InvalidGroup(_)
        | Error::InvalidComplex(_)
        | Error::NotPrime(_)
        | Error::ModulusOutOfRange(_)
        | Error::FieldMismatch { .. } => 2,
        _ => 3,
    }
}

enum Outcome {
    Ok(Value),
    /// Mathematical "no" that is not an error, e.g. a failed verification.
    Fail(Value, String),
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_modulus(opts: &Common, field: PrimeField) -> Result<(), Error> {
    match opts.p {
        Some(p) if p != field.modulus() => Err(Error::FieldMismatch { left: p, right: field.modulus() }),
        _ => Ok(()),
    }
}

fn load_matrix(opts: &Common, path: &Path) -> Result<SparseMatrix, Error> {
    let a = SparseMatrix::from_dense(&parse_any(&read_text(path)?)?);
    check_modulus(opts, a.field())?;
    Ok(a)
}

fn omega_table(opts: &Common) -> Result<OmegaTable, Error> {
    match &opts.omega_table {
        Some(p) => OmegaTable::load(p),
        None => Ok(OmegaTable::bundled()),
    }
}

fn counters(c: OpCounter) -> Value {
    json!({ "mul": c.mul_count, "add": c.add_count, "inv": c.inv_count })
}

fn cmd_invert(opts: &Common, input: &Path, out: Option<&Path>) -> Result<Outcome, Error> {
    let a = load_matrix(opts, input)?;
    let n = a.rows();
    let s = match opts.s {
        Some(s) => Some(s),
        None if n >= 4 => Some(choose_blocking(n, &omega_table(opts)?)?.s),
        None => None,
    };
    let inv_opts = InvOptions { s, strategy: opts.strategy, retries: opts.retries };
    let mut rng = SeededRng::new(opts.seed);
    let (rep, c) = OpCounter::measure(|| matrix_inv(&a, inv_opts, &mut rng));
    let rep = rep?;
    emit(out, &format_dense(&rep.inverse))?;
    Ok(Outcome::Ok(json!({
        "command": "invert", "n": n, "s": rep.s, "m": rep.m, "attempts": rep.attempts,
        "seed": opts.seed, "counters": counters(c),
    })))
}

fn cmd_rank(opts: &Common, input: &Path, out: Option<&Path>, nullspace: bool) -> Result<Outcome, Error> {
    let a = load_matrix(opts, input)?;
    let ropts = RankOptions { strategy: opts.strategy, retries: opts.retries };
    let mut rng = SeededRng::new(opts.seed);
    let (cert, c) = OpCounter::measure(|| rank_and_nullspace(&a, ropts, &mut rng));
    let cert = cert?;
    if nullspace {
        match out {
            Some(p) => {
                write_text(p, &format_dense(&cert.nullspace))?;
                println!("{}", cert.r);
            }
            None => print!("{}\n{}", cert.r, format_dense(&cert.nullspace)),
        }
    } else {
        println!("{}", cert.r);
    }
    Ok(Outcome::Ok(json!({
        "command": if nullspace { "nullspace" } else { "rank" }, "n": a.rows(), "r": cert.r,
        "nullity": cert.nullspace.cols(), "attempts": cert.attempts, "seed": opts.seed, "counters": counters(c),
    })))
}

fn cmd_betti(opts: &Common, input: &Path, assume_closed: bool, out: Option<&Path>) -> Result<Outcome, Error> {
    let complex = SimplicialComplex::parse(&read_text(input)?, !assume_closed)?;
    let field = PrimeField::new(opts.p.unwrap_or(2))?;
    let mut rng = SeededRng::new(opts.seed);
    let (h, c) = OpCounter::measure(|| betti_numbers(&complex, field, &mut rng));
    let h = h?;
    let line: Vec<String> = h.betti.iter().map(usize::to_string).collect();
    println!("{}", line.join(" "));
    if let Some(p) = out {
        let mut text = String::new();
        for (k, z) in h.cycles.iter().enumerate() {
            let _ = writeln!(text, "# dimension {k}");
            text.push_str(&format_dense(z));
        }
        write_text(p, &text)?;
    }
    Ok(Outcome::Ok(json!({
        "command": "betti", "simplices": complex.len(), "p": field.modulus(), "betti": h.betti,
        "seed": opts.seed, "counters": counters(c),
    })))
}

fn cmd_group_unit(opts: &Common, input: &Path, out: Option<&Path>, orbit: Option<&Path>) -> Result<Outcome, Error> {
    let (g, beta) = parse_group_element(&read_text(input)?)?;
    check_modulus(opts, beta.field)?;
    g.check_axioms()?;
    let (rep, c) = OpCounter::measure(|| group_ring_unit(&g, &beta, opts.strategy));
    let rep = rep?;
    emit(out, &format_group_element(&g, &rep.inverse))?;
    if let Some(p) = orbit {
        write_text(p, &format_dense(&rep.orbit))?;
    }
    Ok(Outcome::Ok(json!({
        "command": "group-unit", "order": g.order(), "block": rep.block, "unit": true, "counters": counters(c),
    })))
}

fn cmd_bench(
    opts: &Common,
    sizes: &[usize],
    blocks: &[usize],
    out: Option<&Path>,
    report: Option<&Path>,
) -> Result<Outcome, Error> {
    let f = PrimeField::new(opts.p.unwrap_or(65537))?;
    let exps = solve_crossing(&omega_table(opts)?);
    let mut rng = SeededRng::new(opts.seed);
    let mut csv = String::from(
        "seed,n,s,m,generator_muls,rect_product_muls,rect_post_product_muls,naive_recovery_muls,dense_inverse_muls,k_star,omega_star\n",
    );
    let mut rows = Vec::new();
    for &n in sizes {
        for &m in blocks {
            if m == 0 || n % m != 0 {
                return Err(Error::InvalidArgument(format!("{m} blocks do not divide n = {n}")));
            }
            let s = n / m;
            let op = DisplacementOperator::hankel(n, s)?;
            let mut tries = 0;
            let (h, g, gen_c) = loop {
                tries += 1;
                let hb: Vec<DenseMatrix> = (0..2 * m - 1).map(|_| DenseMatrix::random(f, s, s, &mut rng)).collect();
                let h = build_block_hankel(&hb)?;
                let (g, c) = OpCounter::measure(|| inverse_generators(&h, &op, opts.strategy));
                match g {
                    Ok(g) => break (h, g, c),
                    Err(_) if tries < opts.retries.max(1) => continue,
                    Err(e) => return Err(e),
                }
            };
            let (prod, prod_c) = OpCounter::measure(|| slab_product(&g));
            let (rect, post_c) = OpCounter::measure(|| displacement::recover(&g.op, prod?));
            let (naive, naive_c) = OpCounter::measure(|| naive_column_recovery(&g));
            let (dense, dense_c) = OpCounter::measure(|| dense_inverse(&h));
            let (rect, naive, dense) = (rect?, naive?, dense?);
            if rect != dense || naive != dense {
                return Err(Error::InvalidArgument(format!("recovered inverses differ for n = {n}, s = {s}")));
            }
            let _ = writeln!(
                csv,
                "{},{n},{s},{m},{},{},{},{},{},{:.6},{:.6}",
                opts.seed,
                gen_c.mul_count,
                prod_c.mul_count,
                post_c.mul_count,
                naive_c.mul_count,
                dense_c.mul_count,
                exps.k_star,
                exps.omega_star
            );
            rows.push(json!({
                "n": n, "s": s, "m": m, "rect": prod_c.mul_count + post_c.mul_count,
                "naive": naive_c.mul_count, "dense": dense_c.mul_count,
            }));
        }
    }
    emit(out, &csv)?;
    if let Some(p) = report {
        let mut text = String::from("k,mn2,s_omega_m,s_omega_m2,omega_k\n");
        for c in &exps.curves {
            let _ = writeln!(text, "{:.2},{:.6},{:.6},{:.6},{:.6}", c.k, c.mn2, c.s_omega_m, c.s_omega_m2, c.omega_k);
        }
        write_text(p, &text)?;
    }
    Ok(Outcome::Ok(json!({
        "command": "bench", "seed": opts.seed, "k_star": exps.k_star, "omega_star": exps.omega_star, "runs": rows,
    })))
}

fn cmd_verify(opts: &Common, input: &Path, inverse: &Path) -> Result<Outcome, Error> {
    let a = load_matrix(opts, input)?.to_dense();
    let b = read_dense(inverse)?;
    check_modulus(opts, b.field())?;
    if a.field() != b.field() {
        return Err(Error::FieldMismatch { left: a.field().modulus(), right: b.field().modulus() });
    }
    let (ok, c) = OpCounter::measure(|| {
        Ok::<_, Error>(a.rows() == a.cols() && a.cols() == b.rows() && b.rows() == b.cols() && mat_mul(&a, &b)?.is_identity())
    });
    let ok = ok?;
    let v = json!({ "command": "verify", "identity": ok, "counters": counters(c) });
    if ok {
        println!("ok");
        Ok(Outcome::Ok(v))
    } else {
        Ok(Outcome::Fail(v, "A times B is not the identity".into()))
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let opts = &cli.opts;
    if opts.threads == 0 {
        return Err(Error::InvalidArgument("--threads must be positive".into()));
    }
    if opts.s == Some(0) {
        return Err(Error::InvalidArgument("--s must be positive".into()));
    }
    if let Some(p) = opts.p {
        PrimeField::new(p)?;
    }
    set_threads(opts.threads);
    match &cli.cmd {
        Command::Invert { input, out } => cmd_invert(opts, input, out.as_deref()),
        Command::Rank { input } => cmd_rank(opts, input, None, false),
        Command::Nullspace { input, out } => cmd_rank(opts, input, out.as_deref(), true),
        Command::Betti { input, assume_closed, out } => cmd_betti(opts, input, *assume_closed, out.as_deref()),
        Command::GroupUnit { input, out, orbit } => cmd_group_unit(opts, input, out.as_deref(), orbit.as_deref()),
        Command::Bench { sizes, blocks, out, report } => cmd_bench(opts, sizes, blocks, out.as_deref(), report.as_deref()),
        Command::Verify { input, inverse } => cmd_verify(opts, input, inverse),
    }
}

fn report(opts: &Common, v: &Value) {
    let line = v.to_string();
    if !opts.quiet {
        println!("{line}");
    }
    if let Some(p) = &opts.counters {
        if let Err(e) = std::fs::write(p, format!("{line}\n")) {
            eprintln!("ffla: cannot write counters to {}: {e}", p.display());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok(v)) => {
            report(&cli.opts, &v);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Fail(v, msg)) => {
            report(&cli.opts, &v);
            eprintln!("ffla: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ffla: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
