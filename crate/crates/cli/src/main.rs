//! `circuitlp` command-line tool. Exit codes: 0 success, 1 infeasible or
//! unbounded, 2 usage or bad input, 3 internal failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use circuitlp::circuits::{conformal_decompose, enumerate_elementary_vectors, kappa_dual, kappa_exact};
use circuitlp::io::{
    diameter_rows, parse_instance, render_general, render_instance, solver_rows, walk_rows, write_trace, TraceRow,
};
use circuitlp::rational::{dot, format_vec, parse_rational, to_f64};
use circuitlp::solver::{
    build_aux_lp, feasibility_with_doubling, solve_from_scratch, FeasibilityOutcome, FeasibilityReport, SolveOutcome,
};
use circuitlp::walk::{capacitated_walk, check_trace_lemmas, diameter_walk, generate_instance, InstanceKind, Partition};
use circuitlp::{Error, IndexSet, LpInstance, Rational};

#[derive(Parser)]
#[command(name = "circuitlp", version, about = "Exact circuit augmentation for linear programs")]
struct Cli {
    /// Add decimal approximations next to exact values.
    #[arg(long, global = true)]
    approx: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Circuit imbalance of the constraint matrix.
    Kappa {
        file: PathBuf,
        /// Enumerate elementary vectors of ker(A) (default).
        #[arg(long, conflicts_with = "dual")]
        exact: bool,
        /// Enumerate elementary vectors of the row space instead.
        #[arg(long)]
        dual: bool,
    },
    /// List the elementary vectors of ker(A), one per line.
    Circuits { file: PathBuf },
    /// Conformal circuit decomposition of a kernel vector.
    Decompose {
        file: PathBuf,
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    /// Circuit walk from a vertex to the vertex of a basis.
    Walk {
        file: PathBuf,
        /// 1-based column ids, comma-separated.
        #[arg(long)]
        target_basis: String,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[command(flatten)]
        walk: WalkOpts,
    },
    /// Circuit walk on a capacitated instance.
    CapWalk {
        file: PathBuf,
        /// `B:L:H` with 1-based comma-separated ids, e.g. `1:2,3:4`.
        #[arg(long)]
        partition: String,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[command(flatten)]
        walk: WalkOpts,
    },
    /// Find a feasible point with x_N = 0, or a certificate that none exists.
    Feas {
        file: PathBuf,
        /// Phase I on the auxiliary problem: any x with Ax = b, x >= 0.
        #[arg(long, conflicts_with = "zero_set", required_unless_present = "zero_set")]
        aux: bool,
        /// 1-based ids of N.
        #[arg(long)]
        zero_set: Option<String>,
        /// Feasible start for --zero-set; found by phase I when omitted.
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Optimize; phase I runs first unless --start is given.
    Solve {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Standard-form view of a general-form system {Ax = b, Bx <= d}.
    ReduceGeneral { file: PathBuf },
    /// Generate a random instance with two known vertices.
    Gen {
        #[arg(long)]
        kind: InstanceKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Defaults to CIRCUITLP_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WalkOpts {
    /// Estimate of the circuit imbalance; exact value by enumeration when omitted.
    #[arg(long)]
    kappa_hat: Option<String>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EstimateCeiling { .. } | Error::Invariant(_) | Error::IterationCap { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<LpInstance, Failure> {
    Ok(parse_instance(&read(path)?)?.standard()?)
}

/// Loads `file` for the solver commands, moving finite upper bounds into
/// slack rows. Returns the original and the uncapacitated instance.
fn load_uncapped(path: &Path) -> Result<(LpInstance, LpInstance), Failure> {
    let inst = load(path)?;
    let std = inst.to_standard_form();
    if std.n() > inst.n() {
        println!("# {} upper bounds moved into slack rows", std.n() - inst.n());
    }
    Ok((inst, std))
}

/// Parses a start point of the original instance and appends its slacks.
fn parse_start(orig: &LpInstance, text: &str) -> Result<Vec<Rational>, Failure> {
    let x = parse_vector(text)?;
    if x.len() != orig.n() {
        return Err(usage(format!("--start needs {} entries", orig.n())));
    }
    Ok(orig.with_slacks(&x))
}

fn parse_vector(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|t| parse_rational(t).ok_or_else(|| usage(format!("not a rational: `{}`", t.trim()))))
        .collect()
}

fn parse_ids(text: &str, n: usize) -> Result<IndexSet, Failure> {
    let mut out = IndexSet::new();
    for t in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let id: usize = t.parse().map_err(|_| usage(format!("not an id: `{t}`")))?;
        if id == 0 || id > n {
            return Err(usage(format!("id {id} outside 1..={n}")));
        }
        out.insert(id - 1);
    }
    Ok(out)
}

fn run_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned())
}

struct Printer {
    approx: bool,
}

impl Printer {
    fn vec(&self, label: &str, v: &[Rational]) {
        println!("{label}: {}", format_vec(v));
        if self.approx {
            let d: Vec<String> = v.iter().map(|x| format!("{:.6}", to_f64(x))).collect();
            println!("{label} (approx): {}", d.join(" "));
        }
    }

    fn value(&self, label: &str, v: &Rational) {
        if self.approx {
            println!("{label}: {v} (approx {:.6})", to_f64(v));
        } else {
            println!("{label}: {v}");
        }
    }

    fn trace(&self, path: Option<&PathBuf>, rows: &[TraceRow]) -> Result<(), Failure> {
        let Some(path) = path else { return Ok(()) };
        let file = fs::File::create(path).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        write_trace(file, rows, self.approx)?;
        println!("trace: {} rows written to {}", rows.len(), path.display());
        Ok(())
    }
}

fn kappa_for(inst: &LpInstance, given: Option<&String>) -> Result<Rational, Failure> {
    match given {
        Some(t) => {
            let k = parse_rational(t).ok_or_else(|| usage(format!("bad --kappa-hat `{t}`")))?;
            if k < Rational::from_integer(1.into()) {
                return Err(usage("--kappa-hat must be at least 1"));
            }
            Ok(k)
        }
        None => Ok(kappa_exact(&inst.a)?.value),
    }
}

fn print_certificate(p: &Printer, inst: &LpInstance, y: &[Rational]) {
    println!("status: infeasible");
    p.vec("farkas y", y);
    p.vec("A^T y", &inst.a.tr_mul_vec(y));
    p.value("<b,y>", &dot(&inst.b, y));
    println!("certificate: A^T y >= 0 and <b,y> < 0, so no x >= 0 has Ax = b");
}

/// Phase I on the auxiliary problem; `Err(code 1)` after printing a
/// certificate when infeasible.
fn phase_one(p: &Printer, inst: &LpInstance) -> Result<(Vec<Rational>, FeasibilityReport), Result<u8, Failure>> {
    let aux = build_aux_lp(&inst.a, &inst.b).map_err(|e| Err(e.into()))?;
    let rep = feasibility_with_doubling(&aux.instance.a, &aux.instance.b, &aux.z_block, &aux.start)
        .map_err(|e| Err(e.into()))?;
    match rep.outcome().clone() {
        FeasibilityOutcome::Solution(v) => Ok((aux.recover(&v), rep)),
        FeasibilityOutcome::Certificate(cert) => {
            print_certificate(p, inst, &cert.y);
            Err(Ok(1))
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let p = Printer { approx: cli.approx };
    match cli.cmd {
        Cmd::Kappa { file, dual, .. } => {
            let inst = load(&file)?;
            let k = if dual { kappa_dual(&inst.a)? } else { kappa_exact(&inst.a)? };
            p.value(if dual { "kappa (row space)" } else { "kappa" }, &k.value);
            Ok(0)
        }
        Cmd::Circuits { file } => {
            let inst = load(&file)?;
            let evs = enumerate_elementary_vectors(&inst.a)?;
            println!("elementary vectors: {} (each up to sign)", evs.len());
            for e in &evs {
                println!("{}  support {}", format_vec(e.vector()), e.circuit());
            }
            Ok(0)
        }
        Cmd::Decompose { file, vector } => {
            let inst = load(&file)?;
            let x = parse_vector(&vector)?;
            let dec = conformal_decompose(&inst.a, &x)?;
            println!("parts: {}", dec.parts.len());
            for (i, part) in dec.parts.iter().enumerate() {
                p.vec(&format!("part {}", i + 1), part.vector());
            }
            Ok(0)
        }
        Cmd::Walk {
            file,
            target_basis,
            start,
            walk,
        } => {
            let inst = load(&file)?;
            let basis = parse_ids(&target_basis, inst.n())?;
            let x0 = parse_vector(&start)?;
            let k = kappa_for(&inst, walk.kappa_hat.as_ref())?;
            let w = diameter_walk(&inst.a, &inst.b, &basis, &x0, &k)?;
            p.value("kappa_hat", &k);
            for (t, st) in w.trace.steps.iter().enumerate() {
                println!("step {}: alpha {} along {}", t + 1, st.alpha, format_vec(st.direction.vector()));
                p.vec("  x", &st.iterate_after);
            }
            println!("length: {} (cap {})", w.trace.len(), w.trace.cap);
            p.vec("target", &w.trace.target);
            let report = check_trace_lemmas(&w, &k);
            if report.ok() {
                println!("lemma checks: all hold");
            } else {
                for f in &report.findings {
                    println!("lemma check: {f}");
                }
            }
            p.trace(walk.trace.as_ref(), &diameter_rows(&run_id(&file), &w))?;
            Ok(0)
        }
        Cmd::CapWalk {
            file,
            partition,
            start,
            walk,
        } => {
            let inst = load(&file)?;
            let u = inst.u.as_ref().ok_or_else(|| usage("cap-walk needs a capacitated instance"))?;
            let parts: Vec<&str> = partition.split(':').collect();
            let [b, l, h] = parts.as_slice() else {
                return Err(usage("--partition must look like B:L:H"));
            };
            let n = inst.n();
            let part = Partition::new(n, parse_ids(b, n)?, parse_ids(l, n)?, parse_ids(h, n)?)?;
            let x0 = parse_vector(&start)?;
            let k = kappa_for(&inst, walk.kappa_hat.as_ref())?;
            let w = capacitated_walk(&inst.a, &inst.b, u, &part, &x0, &k)?;
            p.value("kappa_hat", &k);
            for (t, st) in w.trace.steps.iter().enumerate() {
                println!("step {} (phase {}, {}): alpha {}", t + 1, st.phase, st.oracle, st.alpha);
                p.vec("  x", &st.iterate_after);
            }
            println!(
                "length: {} ({} in phase one, {} support calls, |S_t| = {} at the switch)",
                w.trace.len(),
                w.phase1_steps,
                w.support_calls,
                w.final_mismatch
            );
            p.vec("target", &w.trace.target);
            let h = Rational::from_integer((w.partition.upper.len() as i64).into());
            let rows = walk_rows(&run_id(&file), "capacitated-walk", &w.trace, |x| dot(&w.cost, x) + &h);
            p.trace(walk.trace.as_ref(), &rows)?;
            Ok(0)
        }
        Cmd::Feas {
            file,
            aux,
            zero_set,
            start,
            trace,
        } => {
            let (orig, inst) = load_uncapped(&file)?;
            let n = orig.n();
            let id = run_id(&file);
            if aux {
                let (x, rep) = match phase_one(&p, &inst) {
                    Ok(v) => v,
                    Err(r) => return r,
                };
                println!("status: feasible");
                p.vec("x", &x[..n]);
                p.value("kappa_hat", &rep.kappa_hat);
                p.trace(trace.as_ref(), &solver_rows(&id, "feasibility", &rep.run.steps))?;
                return Ok(0);
            }
            let n_set = parse_ids(zero_set.as_deref().unwrap_or(""), n)?;
            let x0 = match start {
                Some(s) => parse_start(&orig, &s)?,
                None => match phase_one(&p, &inst) {
                    Ok((x, _)) => x,
                    Err(r) => return r,
                },
            };
            let rep = feasibility_with_doubling(&inst.a, &inst.b, &n_set, &x0)?;
            p.value("kappa_hat", &rep.kappa_hat);
            println!(
                "oracle calls: ratio {} support {}",
                rep.run.stats.ratio_calls, rep.run.stats.support_calls
            );
            p.trace(trace.as_ref(), &solver_rows(&id, "feasibility", &rep.run.steps))?;
            match rep.outcome() {
                FeasibilityOutcome::Solution(x) => {
                    println!("status: feasible with x_N = 0");
                    p.vec("x", &x[..n]);
                    Ok(0)
                }
                FeasibilityOutcome::Certificate(cert) => {
                    println!("status: no feasible x with x_N = 0");
                    p.vec("y", &cert.y);
                    p.vec("s = c + A^T y", &cert.s);
                    p.value("<b,y>", &dot(&inst.b, &cert.y));
                    println!("certificate: s >= 0 and <b,y> < 0, so <1_N,x> = <s,x> - <b,y> > 0 for every feasible x");
                    Ok(1)
                }
            }
        }
        Cmd::Solve { file, start, trace } => {
            let (orig, inst) = load_uncapped(&file)?;
            let n = orig.n();
            let id = run_id(&file);
            let mut rows = Vec::new();
            let x0 = match start {
                Some(s) => parse_start(&orig, &s)?,
                None => match phase_one(&p, &inst) {
                    Ok((x, rep)) => {
                        rows.extend(solver_rows(&id, "feasibility", &rep.run.steps));
                        x
                    }
                    Err(r) => return r,
                },
            };
            let out = solve_from_scratch(&inst, Some(&x0))?;
            match out {
                SolveOutcome::Optimal { x, objective, report } => {
                    println!("status: optimal");
                    p.vec("x", &x[..n]);
                    p.value("objective", &objective);
                    if let Some(k) = &report.kappa_hat {
                        p.value("kappa_hat", k);
                    }
                    let (r, s) = report
                        .attempts
                        .iter()
                        .fold((0, 0), |(r, s), a| (r + a.ratio_calls, s + a.support_calls));
                    println!("oracle calls: ratio {r} support {s} over {} estimate(s)", report.attempts.len().max(1));
                    rows.extend(solver_rows(&id, "variable-fixing", &report.steps));
                    p.trace(trace.as_ref(), &rows)?;
                    Ok(0)
                }
                SolveOutcome::Unbounded { .. } => {
                    println!("status: unbounded");
                    Ok(1)
                }
                SolveOutcome::Infeasible { certificate, .. } => {
                    print_certificate(&p, &inst, &certificate.y);
                    Ok(1)
                }
            }
        }
        Cmd::ReduceGeneral { file } => {
            let sys = parse_instance(&read(&file)?)?.general()?;
            let gf = sys.reduce()?;
            println!("# M = [A 0; B I], q = (b; d)");
            for i in 0..gf.m_mat.rows() {
                println!("M: {}", format_vec(gf.m_mat.row(i)));
            }
            println!("q: {}", format_vec(&gf.q));
            p.vec("slack offset r", &gf.offset);
            match &gf.q_instance {
                Some(q) => {
                    println!("# Q = {{s >= 0 : Cs = C r}} in standard form:");
                    print!("{}", render_instance(q));
                }
                None => println!("# Q = {{s >= 0}}: W spans the whole slack space, no equations"),
            }
            print!("# original system\n{}", render_general(&sys));
            Ok(0)
        }
        Cmd::Gen { kind, n, m, seed, out } => {
            let seed = match seed {
                Some(s) => s,
                None => match std::env::var("CIRCUITLP_SEED") {
                    Ok(v) => v.parse().map_err(|_| usage(format!("CIRCUITLP_SEED is not an integer: `{v}`")))?,
                    Err(_) => 0,
                },
            };
            let g = generate_instance(kind, n, m, seed)?;
            let mut text = format!(
                "# generated: kind {kind:?}, seed {seed}\n# start: {}\n# target basis: {}\n",
                g.start.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                g.target_basis.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","),
            );
            if let Some(part) = &g.partition {
                let ids = |s: &IndexSet| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
                text.push_str(&format!(
                    "# partition: {}:{}:{}\n",
                    ids(&part.basis),
                    ids(&part.lower),
                    ids(&part.upper)
                ));
            }
            text.push_str(&render_instance(&g.instance));
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
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
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
