//! Command-line front end: quotient dimensions, reductions, Lie evaluation, associators,
//! tangle invariants, the EK pipeline and the verification suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobi::diagram::{parse_diagrams, Skeleton};
use jacobi::ek::{conjecture_suite, ek_pipeline};
use jacobi::horizontal::{solve_associator, Associator, ASSOC_GUARD};
use jacobi::lie::{build_double, parse_lie, sl2_text, tar_eval, tg_eval, trace_on_rep, LieAlgebra, LieFile, UEnvTensor};
use jacobi::linalg::Q;
use jacobi::maps;
use jacobi::spaces::{set_diagram_limit, space, RelSet};
use jacobi::sum::FormalSum;
use jacobi::tangle::{z_eval, QuasiHopf, TangleWord};
use jacobi::verify::{acceptance_suites, conjecture_observations, run_suite, SUITES};

#[derive(Parser)]
#[command(name = "jacobi", version, about = "Exact computations with Jacobi diagrams")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Degree cap for undirected diagrams.
    #[arg(long, global = true, default_value_t = 3)]
    cap: usize,
    /// Degree cap for directed diagrams.
    #[arg(long, global = true, default_value_t = 2)]
    dcap: usize,
    /// Degree cap for horizontal chord diagrams; defaults to the largest of the other caps.
    #[arg(long, global = true)]
    hcap: Option<usize>,
    /// Maximum number of diagrams enumerated per skeleton and degree.
    #[arg(long, global = true)]
    guard_diagrams: Option<usize>,
    /// Output file or directory; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of a quotient space, one TSV row per degree.
    Dims {
        #[arg(long, default_value = "A")]
        space: String,
        #[arg(long, default_value = "O")]
        skeleton: String,
    },
    /// Coordinates of diagrams (a file or a named element) over the quotient basis.
    Reduce {
        #[arg(long, default_value = "A")]
        space: String,
        #[arg(long, conflicts_with = "element")]
        input: Option<PathBuf>,
        /// One of Omega, C, R, rho, rarrow, wheel2, wheel4.
        #[arg(long)]
        element: Option<String>,
    },
    /// Evaluate diagrams in U(g)^{⊗n}, optionally traced over representations.
    EvalLie {
        /// Lie algebra or Lie bialgebra file; sl₂ when absent.
        #[arg(long)]
        lie: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        /// Representation per strand, repeated; prints the traced power series.
        #[arg(long)]
        rep: Vec<String>,
    },
    /// Rational associators.
    Assoc {
        #[command(subcommand)]
        action: AssocAction,
    },
    /// The tangle invariant of a parenthesized tangle word.
    Zk {
        #[arg(long)]
        tangle: PathBuf,
        #[arg(long, value_enum, default_value_t = Algebra::Akz)]
        algebra: Algebra,
        /// Associator table written by `assoc solve`; solved on the fly when absent.
        #[arg(long)]
        assoc: Option<PathBuf>,
    },
    /// The EK twist, R_EK, the coassociativity residual and the conjecture report.
    Ek {
        #[arg(long)]
        assoc: Option<PathBuf>,
        /// ħ-degree of the sl₂ comparison.
        #[arg(long, default_value_t = 4)]
        lie_degree: usize,
    },
    /// Run a named verification suite, or `all`.
    Verify { suite: String },
}

#[derive(Subcommand)]
enum AssocAction {
    /// Solve for an even rational associator through the horizontal cap.
    Solve,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algebra {
    Akz,
    Aarkz,
    Aek,
}

impl Config {
    fn hcap(&self) -> usize {
        self.hcap.unwrap_or(self.cap.max(self.dcap))
    }

    fn emit(&self, default_name: &str, text: &str) -> Result<()> {
        match &self.out {
            None => print!("{text}"),
            Some(p) => {
                let path = if p.is_dir() { p.join(default_name) } else { p.clone() };
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn associator(path: Option<&Path>, cap: usize) -> Result<Associator> {
    match path {
        Some(p) => Associator::from_text(&read(p)?, cap).with_context(|| format!("associator {}", p.display())),
        None => Ok(solve_associator(cap, ASSOC_GUARD)?),
    }
}

fn load_sum(text: &str, cap: usize) -> Result<FormalSum> {
    let ds = parse_diagrams(text)?;
    let Some((first, _)) = ds.first() else { bail!("no diagrams in input") };
    let mut s = FormalSum::zero(first.skeleton.clone(), first.is_directed(), cap);
    for (d, sign) in &ds {
        if d.skeleton != first.skeleton || d.is_directed() != first.is_directed() {
            bail!("diagrams live on different skeletons");
        }
        s.add_raw(d, &Q::from_integer((*sign).into()));
    }
    Ok(s)
}

fn relset(name: &str) -> Result<RelSet> {
    Ok(name.parse::<RelSet>()?)
}

fn cmd_dims(cfg: &Config, space_name: &str, skeleton: &str) -> Result<String> {
    let rs = relset(space_name)?;
    let sk = Skeleton::parse(skeleton)?;
    let cap = if rs.directed() { cfg.dcap } else { cfg.cap };
    let sp = space(&sk, &rs, cap);
    let mut out = String::from("skeleton\trelation-set\tdegree\traw-count\trank\tdim\n");
    for m in 0..=cap {
        let b = sp.block(m)?;
        out.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\n", sk.tokens(), rs, m, b.cols.len(), b.echelon.rank(), b.basis.len()));
    }
    Ok(out)
}

fn cmd_reduce(cfg: &Config, space_name: &str, input: Option<&Path>, element: Option<&str>) -> Result<String> {
    let rs = relset(space_name)?;
    let cap = if rs.directed() { cfg.dcap } else { cfg.cap };
    let v = match (input, element) {
        (Some(p), _) => load_sum(&read(p)?, cap).with_context(|| format!("parsing {}", p.display()))?,
        (None, Some(name)) => maps::named(name, cap).with_context(|| format!("unknown element `{name}`"))?,
        (None, None) => bail!("give --input or --element"),
    };
    let v = if rs.directed() && !v.directed { maps::iota(&v) } else { v };
    let sp = space(&v.skeleton, &rs, cap);
    let nf = sp.normal_form(&v)?;
    Ok(format!("# {} on {}, cap {}, {} basis terms\n{}", rs, v.skeleton.tokens(), cap, nf.len(), nf.to_text()))
}

fn tensor_text(t: &UEnvTensor, g: &LieAlgebra, reps: &[String]) -> Result<String> {
    let mut out = t.display(g);
    if !out.ends_with('\n') {
        out.push('\n');
    }
    if !reps.is_empty() {
        let names: Vec<&str> = reps.iter().map(String::as_str).collect();
        let series = trace_on_rep(t, g, &names)?;
        let coeffs: Vec<String> = series.iter().map(Q::to_string).collect();
        out.push_str(&format!("trace\t{}\n", coeffs.join("\t")));
    }
    Ok(out)
}

fn cmd_eval_lie(cfg: &Config, lie: Option<&Path>, input: &Path, reps: &[String]) -> Result<String> {
    let text = match lie {
        Some(p) => read(p)?,
        None => sl2_text(),
    };
    let file = parse_lie(&text).context("parsing Lie algebra file")?;
    let raw = read(input)?;
    match file {
        LieFile::Metrized(g) => {
            let v = load_sum(&raw, cfg.cap)?;
            let t = if v.directed { bail!("directed diagrams need a Lie bialgebra file") } else { tg_eval(&v, &g)? };
            tensor_text(&t, &g, reps)
        }
        LieFile::Bialgebra(a, _) => {
            let mt = build_double(&a)?;
            let v = load_sum(&raw, cfg.dcap)?;
            let t = if v.directed { tar_eval(&v, &mt)? } else { tg_eval(&v, &mt.g)? };
            tensor_text(&t, &mt.g, reps)
        }
    }
}

fn cmd_zk(cfg: &Config, tangle: &Path, algebra: Algebra, assoc: Option<&Path>) -> Result<String> {
    let word = TangleWord::parse(&read(tangle)?).with_context(|| format!("parsing {}", tangle.display()))?;
    let h = match algebra {
        Algebra::Akz => QuasiHopf::akz(&associator(assoc, cfg.cap)?, cfg.cap)?,
        Algebra::Aarkz => QuasiHopf::aarkz(&associator(assoc, cfg.dcap)?, cfg.dcap)?,
        Algebra::Aek => ek_pipeline(&associator(assoc, cfg.dcap)?, cfg.dcap)?.aek,
    };
    let z = z_eval(&word, &h)?;
    let rs = if h.directed { RelSet::Aarrow } else { RelSet::A };
    let nf = space(&z.deco.skeleton, &rs, h.cap).normal_form(&z.deco)?;
    Ok(format!("# algebra {} cap {}\n{}{}", h.name, h.cap, z.to_text(), nf.to_text()))
}

fn cmd_ek(cfg: &Config, assoc: Option<&Path>, lie_degree: usize) -> Result<(String, bool)> {
    let cap = cfg.dcap;
    let a = associator(assoc, cap)?;
    let rep = ek_pipeline(&a, cap)?;
    let flags = |b: bool| if b { "yes" } else { "no" };
    let mut out = format!("# EK pipeline, directed cap {cap}\n");
    let two = space(&Skeleton::intervals(2), &RelSet::Aarrow, cap);
    out.push_str("## J\n");
    out.push_str(&two.normal_form(&rep.j.j)?.to_text());
    out.push_str("## R_EK\n");
    out.push_str(&two.normal_form(&rep.aek.r)?.to_text());
    out.push_str(&format!("## checks\ncoassociativity-residual-terms\t{}\n", rep.residual_terms));
    out.push_str(&format!("phi-trivial\t{}\nr-expansion\t{}\n", flags(rep.phi_trivial), flags(rep.r_expansion)));
    out.push_str(&format!("qybe-residual-terms\t{}\nribbon\t{}\n", rep.qybe_terms, flags(rep.ribbon)));
    let big = associator(assoc, lie_degree.max(cap))?;
    let c = conjecture_suite(&big, &rep.aek, lie_degree)?;
    out.push_str("## conjecture report\n");
    out.push_str(&format!("exercise\t{}\n", flags(c.exercise)));
    for line in conjecture_observations(&c) {
        out.push_str(&line);
        out.push('\n');
    }
    let ok = rep.passed() && c.exercise && c.sl2_matches();
    Ok((out, ok))
}

fn cmd_verify(suite: &str) -> Result<(String, bool)> {
    let names: Vec<&str> = if suite == "all" {
        acceptance_suites()
    } else if SUITES.iter().any(|(n, _)| *n == suite) {
        vec![suite]
    } else {
        let known: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
        bail!("unknown suite `{suite}`; known: {}, all", known.join(", "));
    };
    let mut out = String::new();
    let (mut checks, mut failed) = (0, 0);
    for n in names {
        let r = run_suite(n)?;
        out.push_str(&r.to_text());
        checks += r.checks.len();
        failed += r.failures();
    }
    out.push_str(&format!("# {} checks, {} passed, {} failed\n", checks, checks - failed, failed));
    Ok((out, failed == 0))
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("JACOBI_THREADS") {
        let n: usize = v.parse().with_context(|| format!("JACOBI_THREADS={v}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let cfg = &cli.config;
    if let Some(n) = cfg.guard_diagrams {
        if n == 0 {
            bail!("--guard-diagrams must be positive");
        }
        set_diagram_limit(n);
    }
    match &cli.command {
        Command::Dims { space, skeleton } => cfg.emit("dims.tsv", &cmd_dims(cfg, space, skeleton)?)?,
        Command::Reduce { space, input, element } => {
            cfg.emit("reduce.txt", &cmd_reduce(cfg, space, input.as_deref(), element.as_deref())?)?
        }
        Command::EvalLie { lie, input, rep } => cfg.emit("eval.txt", &cmd_eval_lie(cfg, lie.as_deref(), input, rep)?)?,
        Command::Assoc { action: AssocAction::Solve } => {
            let cap = cfg.hcap();
            cfg.emit(&format!("assoc_cap{cap}.txt"), &solve_associator(cap, ASSOC_GUARD)?.to_text())?
        }
        Command::Zk { tangle, algebra, assoc } => cfg.emit("zk.txt", &cmd_zk(cfg, tangle, *algebra, assoc.as_deref())?)?,
        Command::Ek { assoc, lie_degree } => {
            let (text, ok) = cmd_ek(cfg, assoc.as_deref(), *lie_degree)?;
            cfg.emit("ek.txt", &text)?;
            return Ok(ok);
        }
        Command::Verify { suite } => {
            let (text, ok) = cmd_verify(suite)?;
            cfg.emit("verify.txt", &text)?;
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_style_invocations() {
        Cli::try_parse_from(["jacobi", "dims", "--space", "A", "--skeleton", "O", "--cap", "4"]).unwrap();
        Cli::try_parse_from(["jacobi", "assoc", "solve", "--hcap", "4", "--out", "phi.txt"]).unwrap();
        Cli::try_parse_from(["jacobi", "zk", "--tangle", "t.tng", "--cap", "3", "--algebra", "aek"]).unwrap();
        Cli::try_parse_from(["jacobi", "verify", "wheels"]).unwrap();
        assert!(Cli::try_parse_from(["jacobi", "zk", "--tangle", "t.tng", "--algebra", "nope"]).is_err());
    }

    #[test]
    fn load_sum_rejects_empty_input() {
        assert!(load_sum("", 2).is_err());
        let msg = load_sum("", 2).err().map(|e| e.to_string());
        assert_eq!(msg.as_deref(), Some("no diagrams in input"));
    }
}
