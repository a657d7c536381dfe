//! Command-line front end. Exit codes: 0 for YES/PASS, 1 for NO, 2 for any
//! error. Output is line-oriented and deterministic per (inputs, seed).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cwsteiner::analysis::{
    check_cs_basis, check_triangular_cs, fig1_matrix, fig2_matrix, gf2_rank, kronecker,
    matrix_mb, matrix_mc,
};
use cwsteiner::cspat::pow3;
use cwsteiner::expr::gen_random_instance;
use cwsteiner::oracle::{brute_solvable_sizes, check_representation, BRUTE_VERTEX_CAP};
use cwsteiner::pattern::{enumerate_cs, enumerate_patterns};
use cwsteiner::solver::{solve_with, DpLimits};
use cwsteiner::{parse_instance, Instance};

#[derive(Parser)]
#[command(name = "cwsteiner", about = "Steiner tree solving over k-clique-expressions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Randomized exact solver; exit 0 on YES, 1 on NO.
    Solve {
        instance: PathBuf,
        /// Independent repeats; the false-negative probability is at most 2^-repeats per size.
        #[arg(long, default_value_t = 20)]
        repeats: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for repeats; the output is independent of this.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Memory cap for DP tables, in MiB.
        #[arg(long = "mem-cap", default_value_t = 2048)]
        mem_cap: usize,
    },
    /// Exhaustive brute-force answer (small instances only).
    Oracle { instance: PathBuf },
    /// Print the realized labeled graph in the export format.
    Realize { instance: PathBuf },
    /// Structural matrix checks; exit 0 iff all requested checks pass.
    Analyze {
        #[arg(long)]
        k: u32,
        /// Checks to run; defaults to all that fit the given k.
        #[arg(long = "check", value_enum)]
        checks: Vec<CheckKind>,
        /// Dump matrices as 0/1 grids.
        #[arg(long)]
        dump: bool,
    },
    /// Generate a random instance file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        terminals: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in invariant suite.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Rank,
    Triangular,
    Basis,
    Kronecker,
    Representation,
}

fn load(path: &PathBuf) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let instance = parse_instance(&text)?;
    if instance.is_oversized() {
        eprintln!("warning: expression is larger than the usual size assumptions");
    }
    Ok(instance)
}

fn cmd_solve(
    path: &PathBuf,
    repeats: u32,
    seed: u64,
    jobs: usize,
    mem_cap_mib: usize,
) -> Result<ExitCode> {
    let instance = load(path)?;
    let limits = DpLimits { mem_bytes: mem_cap_mib << 20 };
    let report = solve_with(&instance, repeats, seed, jobs, limits)?;
    match report.min_size {
        Some(b) => {
            println!("YES size={b} repeats={repeats} seed={seed}");
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("NO repeats={repeats} seed={seed}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_oracle(path: &PathBuf) -> Result<ExitCode> {
    let instance = load(path)?;
    let g = instance.realize_graph();
    if g.vertex_count() > BRUTE_VERTEX_CAP {
        bail!("oracle requires at most {BRUTE_VERTEX_CAP} vertices, got {}", g.vertex_count());
    }
    let terms = instance.terminal_ids(&g);
    let sizes = brute_solvable_sizes(&g, &terms)?;
    match sizes.iter().copied().find(|&b| b <= instance.budget) {
        Some(b) => {
            println!("YES size={b} exact=true");
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("NO exact=true");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_realize(path: &PathBuf) -> Result<ExitCode> {
    let instance = load(path)?;
    print!("{}", instance.realize_graph().export());
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(k: u32, mut checks: Vec<CheckKind>, dump: bool) -> Result<ExitCode> {
    use CheckKind::*;
    if checks.is_empty() {
        checks = vec![Rank, Triangular, Basis, Kronecker, Representation]
            .into_iter()
            .filter(|c| match c {
                Rank => k <= 6,
                Triangular => k <= 7,
                Basis => k <= 3,
                Kronecker => k <= 4,
                Representation => k <= 3,
            })
            .collect();
        if checks.is_empty() {
            bail!("no check fits k = {k}");
        }
    }
    let mut all_ok = true;
    for check in checks {
        match check {
            Rank => {
                let fig1 = fig1_matrix();
                let r1 = gf2_rank(&fig1);
                println!("rank(M')={} {}", r1, pass(r1 == 4));
                all_ok &= r1 == 4;
                let mb = matrix_mb(k)?;
                let r = gf2_rank(&mb);
                let want = 4usize.pow(k);
                println!("rank(M_B)={} {}", r, pass(r == want));
                all_ok &= r == want;
                if dump {
                    print!("{}", mb.dump());
                }
            }
            Triangular => {
                let ok = check_triangular_cs(k)?;
                println!("triangular dim={} {}", pow3(k), pass(ok));
                all_ok &= ok;
            }
            Basis => {
                let ok = check_cs_basis(k)?;
                println!("cs-basis {}", pass(ok));
                all_ok &= ok;
                if k <= 2 {
                    let mc = matrix_mc(k)?;
                    let r = gf2_rank(&mc);
                    let want = pow3(k);
                    println!("rank(M_C)={} {}", r, pass(r == want));
                    all_ok &= r == want;
                }
                let count = enumerate_cs(k)?.len();
                println!("cs-count={} {}", count, pass(count == pow3(k)));
                all_ok &= count == pow3(k);
            }
            Kronecker => {
                let base = matrix_mb(1)?;
                let mut kron = base.clone();
                for shift in 1..k {
                    kron = kronecker(&kron, &base, shift)?;
                }
                let mb = matrix_mb(k)?;
                let ok = mb.to_bool_rows() == kron.to_bool_rows();
                println!("kronecker dim={} {}", mb.nrows(), pass(ok));
                all_ok &= ok;
                if dump {
                    print!("{}", fig2_matrix().dump());
                }
            }
            Representation => {
                let pats = enumerate_patterns(k)?;
                let mut ok = true;
                for p in &pats {
                    let rep = p.complete_rep();
                    ok &= rep.iter().all(|r| r.is_complete());
                    ok &= check_representation(&rep, &[p.clone()].into_iter().collect(), k)?;
                }
                println!("representation patterns={} {}", pats.len(), pass(ok));
                all_ok &= ok;
            }
        }
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_gen(n: usize, k: u32, terminals: usize, seed: u64, out: &PathBuf) -> Result<ExitCode> {
    let instance = gen_random_instance(n, k, terminals, seed)?;
    std::fs::write(out, instance.render())
        .with_context(|| format!("cannot write {}", out.display()))?;
    println!("wrote {} n={n} k={k} terminals={terminals} seed={seed}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest(quick: bool) -> Result<ExitCode> {
    let results = cwsteiner::selftest::run(quick);
    let mut ok = true;
    for (name, passed) in &results {
        println!("{name} {}", pass(*passed));
        ok &= passed;
    }
    println!("selftest {}/{} checks passed", results.iter().filter(|r| r.1).count(), results.len());
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        bail!("selftest failed");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<ExitCode> {
        match &cli.command {
            Cmd::Solve { instance, repeats, seed, jobs, mem_cap } => {
                cmd_solve(instance, *repeats, *seed, *jobs, *mem_cap)
            }
            Cmd::Oracle { instance } => cmd_oracle(instance),
            Cmd::Realize { instance } => cmd_realize(instance),
            Cmd::Analyze { k, checks, dump } => cmd_analyze(*k, checks.clone(), *dump),
            Cmd::Gen { n, k, terminals, seed, out } => cmd_gen(*n, *k, *terminals, *seed, out),
            Cmd::Selftest { quick } => cmd_selftest(*quick),
        }
    };
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
