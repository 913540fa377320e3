//! `ctc`: parse terms, build transition systems, check equivalences, test
//! the law catalog and compute expansion normal forms.
//!
//! Exit codes: 0 on success or equivalence, 1 on inequivalence or a law
//! counterexample, 2 on usage, input or model errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ctc_core::equiv::{check_hp_bisim, check_pomset_bisim, check_step_bisim, partition, HpBounds, Mode, Strength, Union};
use ctc_core::laws::{check_law, expansion_nf, find_law, law_model, laws, CheckOptions, GenConfig, LawReport};
use ctc_core::syntax::parse_definitions;
use ctc_core::{build_plts, parse_process, pretty, Bounds, Definitions, FeatureMode, Plts, Process, StateModel};

#[derive(Parser)]
#[command(name = "ctc", version, about = "Truly concurrent process calculus toolkit")]
struct Cli {
    /// Restrict the calculus to one feature preset (3 to 7).
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(3..=7))]
    chapter: Option<u8>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print its canonical form.
    Parse {
        /// Term text, or a file holding one term.
        term: String,
        #[arg(long)]
        defs: Option<PathBuf>,
    },
    /// Build and print the probabilistic transition system of a term.
    Lts {
        term: String,
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_enum, default_value_t = Format::Lines)]
        format: Format,
    },
    /// Decide an equivalence between two terms.
    Check {
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = Equiv::Step)]
        equiv: Equiv,
        #[arg(long, default_value = "strong")]
        strength: Strength,
        #[arg(long, default_value = "fr")]
        mode: Mode,
        /// Longest step sequence folded into one pomset move.
        #[arg(long, default_value_t = 2)]
        max_seq: usize,
        /// Write the final partition to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Test catalogued laws on random instances.
    Laws {
        #[arg(long, conflicts_with = "all")]
        law: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Base seed; `CTC_SEED` is used when absent.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the law list instead of checking.
        #[arg(long)]
        list: bool,
    },
    /// Rewrite a parallel composition into its expansion normal form.
    Normalize {
        term: String,
        #[command(flatten)]
        env: EnvArgs,
    },
}

#[derive(Args)]
struct EnvArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    defs: Option<PathBuf>,
    /// Initial data state (defaults to the model's first state).
    #[arg(long)]
    state: Option<String>,
    #[arg(long, default_value_t = Bounds::default().max_configs)]
    max_configs: usize,
    /// Resolve `P || Q` to the literal `P' + Q'`.
    #[arg(long)]
    faithful_pcomp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Lines,
    Doc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Equiv {
    Step,
    Pomset,
    Hp,
    Hhp,
}

/// Loaded inputs shared by the commands that build transition systems.
struct Env {
    model: StateModel,
    defs: Definitions,
    state: usize,
    bounds: Bounds,
}

impl Env {
    fn load(a: &EnvArgs, features: FeatureMode) -> Result<Env> {
        let model = load_model(a.model.as_deref())?;
        let defs = load_defs(a.defs.as_deref())?;
        let state = match &a.state {
            Some(s) => model.lookup(s)?,
            None => model.initial(),
        };
        let bounds = Bounds { max_configs: a.max_configs, faithful_pcomp: a.faithful_pcomp, features, ..Bounds::default() };
        Ok(Env { model, defs, state, bounds })
    }

    fn term(&self, text: &str) -> Result<Process> {
        let p = parse_process(&read_term(text)?, &self.defs)?;
        self.bounds.features.check(&p)?;
        Ok(p)
    }

    fn plts(&self, p: &Process) -> Result<Plts> {
        Ok(build_plts(p, self.state, &self.model, &self.defs, self.bounds)?)
    }
}

fn load_model(path: Option<&Path>) -> Result<StateModel> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading model {}", p.display()))?;
            Ok(StateModel::parse(&text).with_context(|| format!("in model {}", p.display()))?)
        }
        None => Ok(StateModel::trivial()),
    }
}

fn load_defs(path: Option<&Path>) -> Result<Definitions> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading definitions {}", p.display()))?;
            Ok(parse_definitions(&text).with_context(|| format!("in definitions {}", p.display()))?)
        }
        None => Ok(Definitions::new()),
    }
}

/// An argument naming an existing file stands for the file's contents.
fn read_term(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        return std::fs::read_to_string(path).with_context(|| format!("reading term {}", path.display()));
    }
    Ok(arg.to_string())
}

fn env_seed() -> Result<u64> {
    match std::env::var("CTC_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("CTC_SEED is not a number: {s:?}")),
        Err(_) => Ok(0),
    }
}

/// Machine output and the exit code it implies.
struct Outcome {
    stdout: String,
    code: u8,
}

fn run(cli: Cli) -> Result<Outcome> {
    let features = match cli.chapter {
        Some(n) => FeatureMode::chapter(n).context("unknown chapter")?,
        None => FeatureMode::full(),
    };
    let mut out = String::new();
    let mut code = 0;
    match cli.command {
        Command::Parse { term, defs } => {
            let defs = load_defs(defs.as_deref())?;
            let p = parse_process(&read_term(&term)?, &defs)?;
            features.check(&p)?;
            writeln!(out, "{}", pretty(&p))?;
        }
        Command::Lts { term, env, format } => {
            let env = Env::load(&env, features)?;
            let g = env.plts(&env.term(&term)?)?;
            out = match format {
                Format::Lines => g.to_lines(),
                Format::Doc => g.to_doc(),
            };
        }
        Command::Check { left, right, equiv, strength, mode, max_seq, witness, env } => {
            let env = Env::load(&env, features)?;
            let a = env.plts(&env.term(&left)?)?;
            let b = env.plts(&env.term(&right)?)?;
            let (equivalent, blocks) = match equiv {
                Equiv::Step => {
                    let v = check_step_bisim(&a, &b, mode, strength)?;
                    (v.equivalent, v.partition.render())
                }
                Equiv::Pomset => {
                    let v = check_pomset_bisim(&a, &b, mode, strength, max_seq)?;
                    (v.equivalent, v.partition.render())
                }
                Equiv::Hp | Equiv::Hhp => {
                    let hereditary = matches!(equiv, Equiv::Hhp);
                    let ok = check_hp_bisim(&a, &b, mode, strength, hereditary, HpBounds::default())?;
                    // the step partition is the coarse invariant the hp search refines
                    let u = Union::new(&a, &b)?;
                    (ok, partition(&u, mode, strength, 1).render())
                }
            };
            writeln!(out, "{}", if equivalent { "equivalent" } else { "not equivalent" })?;
            if let Some(path) = witness {
                std::fs::write(&path, blocks).with_context(|| format!("writing witness {}", path.display()))?;
            }
            code = u8::from(!equivalent);
        }
        Command::Laws { law, all, model, trials, seed, list } => {
            let model = match model {
                Some(p) => load_model(Some(&p))?,
                None => law_model(),
            };
            // `--all` is the default when no single law is named
            let _ = all;
            let chosen = match &law {
                Some(id) => vec![find_law(id).with_context(|| format!("no law with id `{id}`"))?],
                None => laws(),
            };
            if list {
                for l in &chosen {
                    writeln!(out, "{:<12} {:<6} {:<6} {}", l.id, l.mode.to_string(), l.strength.to_string(), l.text)?;
                }
                return Ok(Outcome { stdout: out, code: 0 });
            }
            let seed = match seed {
                Some(s) => s,
                None => env_seed()?,
            };
            let gen = GenConfig { seed, atoms: model.atoms().iter().cloned().collect(), ..GenConfig::default() };
            let opts = CheckOptions { trials, gen, ..CheckOptions::default() };
            writeln!(out, "{:<12} {:>6} {:>7} {:>5}  verdict", "law", "trials", "checked", "extra")?;
            for l in &chosen {
                let r = check_law(l, &opts, &model)?;
                write_report(&mut out, &r)?;
                if !r.holds() {
                    code = 1;
                }
            }
        }
        Command::Normalize { term, env } => {
            let env = Env::load(&env, features)?;
            let p = env.term(&term)?;
            writeln!(out, "{}", pretty(&expansion_nf(&p, &env.model, &env.defs, env.bounds)?))?;
        }
    }
    Ok(Outcome { stdout: out, code })
}

fn write_report(out: &mut String, r: &LawReport) -> std::fmt::Result {
    let verdict = if r.holds() { "holds" } else { "FAILS" };
    writeln!(out, "{:<12} {:>6} {:>7} {:>5}  {verdict}", r.id, r.trials, r.checked, r.extra_checked)?;
    if let Some(c) = &r.counterexample {
        writeln!(out, "  {} in state {}", c.check, c.state)?;
        writeln!(out, "  lhs: {}", c.lhs)?;
        writeln!(out, "  rhs: {}", c.rhs)?;
        for (name, value) in &c.bindings {
            writeln!(out, "  {name} = {value}")?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(o.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
