use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hornbound::change::{maximal_consistent_subsets, widtio_update, FormalismTag};
use hornbound::fastpath::CoreTieBreak;
use hornbound::formula::{parse_clause, parse_clauses, parse_cnf, parse_dimacs, Cnf};
use hornbound::hornsat;
use hornbound::recompile::{BeliefState, QueryVerdict, RecompileConfig};
use hornbound::reductions::{
    fuv_reduction, maxmodel, nodecover_reduction, pure3sat_reduction, transversals, Graph,
    Hypergraph,
};
use hornbound::semantics::{
    cores_from_models, enumerate_models, envelope_from_models, CoreMode, Limits,
};
use hornbound::verify::{find_non_additivity, run_all, VerifyOptions};
use hornbound::Error;

#[derive(Debug, Parser)]
#[command(
    name = "hornbound",
    version,
    about = "Horn upper and lower bounds under belief update"
)]
struct Cli {
    /// Largest universe for model enumeration and envelope extraction.
    #[arg(long, global = true)]
    vars_limit: Option<usize>,
    /// Change formalism; sessions keep their own unless this is given.
    #[arg(long, global = true)]
    formalism: Option<FormalismTag>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Syntax of formula files read and written.
    #[arg(long, global = true, value_enum, default_value_t = Format::Sym)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Sym,
    Dimacs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoreChoice {
    Exact,
    Greedy,
}

impl From<CoreChoice> for CoreMode {
    fn from(c: CoreChoice) -> CoreMode {
        match c {
            CoreChoice::Exact => CoreMode::ExactMax,
            CoreChoice::Greedy => CoreMode::Greedy,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Horn envelope and a Horn core of a formula.
    Compile {
        input: PathBuf,
        /// Print every maximal core instead of one.
        #[arg(long)]
        all_cores: bool,
        #[arg(long, value_enum, default_value_t = CoreChoice::Exact)]
        core_mode: CoreChoice,
    },
    /// Apply an update to a session file.
    Update {
        state: PathBuf,
        /// One clause, e.g. "-x y"; repeat to conjoin several.
        #[arg(long, allow_hyphen_values = true)]
        clause: Vec<String>,
        /// File of clauses, one per line.
        #[arg(long)]
        clause_file: Option<PathBuf>,
        /// 1-based core taken on the linear-time path.
        #[arg(long, default_value_t = 1)]
        pick: usize,
        /// Fail instead of falling back to model enumeration.
        #[arg(long)]
        no_fallback: bool,
        #[arg(long, value_enum, default_value_t = CoreChoice::Exact)]
        core_mode: CoreChoice,
        /// Write the new state here instead of over the input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ask whether a session entails a clause.
    Query {
        state: PathBuf,
        #[arg(allow_hyphen_values = true)]
        clause: String,
    },
    /// Run the randomized equivalence suites.
    Verify {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Search for a failure of additivity under the chosen formalism.
        #[arg(long)]
        adversarial_additivity: bool,
    },
    /// Build the hardness reductions.
    Reduce {
        #[command(subcommand)]
        kind: Reduce,
    },
    /// Manage session files.
    Session {
        #[command(subcommand)]
        action: Session,
    },
}

#[derive(Debug, Subcommand)]
enum Reduce {
    /// List the minimal transversals of a hypergraph.
    Transversal { input: PathBuf },
    /// Knowledge base and update whose maximal subsets mirror the transversals.
    Fuv {
        input: PathBuf,
        /// Also print the maximal consistent subsets.
        #[arg(long)]
        solve: bool,
    },
    /// Knowledge base in which `g` survives WIDTIO iff the pure CNF is unsatisfiable.
    Pure3sat {
        input: PathBuf,
        #[arg(long)]
        solve: bool,
    },
    /// Characteristic model sets for a node cover instance.
    Nodecover {
        input: PathBuf,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        solve: bool,
    },
}

#[derive(Debug, Subcommand)]
enum Session {
    /// Start a session from a formula file.
    New {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CoreChoice::Exact)]
        core_mode: CoreChoice,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
    Code(u8, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

impl Cli {
    fn limits(&self) -> Limits {
        let mut limits = Limits::default();
        if let Some(v) = self.vars_limit {
            limits.enumeration_vars = v;
            limits.envelope_vars = v;
        }
        limits
    }

    fn formalism_or(&self, default: FormalismTag) -> FormalismTag {
        self.formalism.unwrap_or(default)
    }

    fn parse_formula(&self, text: &str) -> Result<Cnf, Error> {
        match self.format {
            Format::Sym => parse_cnf(text),
            Format::Dimacs => parse_dimacs(text),
        }
    }

    fn show(&self, cnf: &Cnf) -> String {
        match self.format {
            Format::Sym => cnf.to_string(),
            Format::Dimacs => cnf.to_dimacs().trim_end().to_string(),
        }
    }
}

fn is_parse_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. }
            | Error::UnknownVariable(_)
            | Error::DuplicateVariable(_)
            | Error::InvalidName(_)
            | Error::EmptyUniverse
            | Error::TautologicalClause(_)
            | Error::InvalidGraph(_)
            | Error::NotPure(_)
    )
}

fn is_limit_error(e: &Error) -> bool {
    matches!(
        e,
        Error::UniverseTooLarge { .. } | Error::SetTooLarge { .. } | Error::TooLarge(_)
    )
}

fn exit_code(cmd: &Command, e: &Error) -> u8 {
    if is_parse_error(e) {
        return 2;
    }
    match cmd {
        Command::Update { .. } => match e {
            Error::NeedsSemanticFallback => 3,
            Error::UniverseTooLarge { .. } => 5,
            _ if is_limit_error(e) => 3,
            _ => 1,
        },
        _ if is_limit_error(e) => 3,
        _ => 1,
    }
}

fn compile(cli: &Cli, input: &Path, all_cores: bool, mode: CoreChoice) -> CmdResult {
    let g = cli.parse_formula(&read(input)?)?;
    let limits = cli.limits();
    let models = enumerate_models(&g, &limits)?;
    if models.is_empty() {
        println!("UNSAT");
        return Ok(4);
    }
    let envelope = envelope_from_models(&models, &limits)?;
    let mode = if all_cores {
        CoreMode::AllExact
    } else {
        mode.into()
    };
    let cores = cores_from_models(&models, mode, &limits)?;
    println!("envelope: {}", cli.show(&envelope));
    if cores.len() == 1 {
        println!("core: {}", cli.show(&cores[0]));
    } else {
        for (i, c) in cores.iter().enumerate() {
            println!("core {}: {}", i + 1, cli.show(c));
        }
    }
    Ok(0)
}

fn session_new(cli: &Cli, input: &Path, out: &Path, mode: CoreChoice) -> CmdResult {
    let g = cli.parse_formula(&read(input)?)?;
    let tag = cli.formalism_or(FormalismTag::Winslett);
    let state = if g.is_horn() {
        if !hornsat::is_satisfiable(&g)? {
            println!("UNSAT");
            return Ok(4);
        }
        BeliefState::init_horn(&g, tag)?
    } else {
        let config = RecompileConfig {
            limits: cli.limits(),
            core_mode: mode.into(),
            ..RecompileConfig::default()
        };
        match BeliefState::init_compile(&g, tag, &config) {
            Err(Error::UnsatisfiableBase) => {
                println!("UNSAT");
                return Ok(4);
            }
            r => r?,
        }
    };
    write(out, &state.to_json())?;
    println!("lower: {}", state.lower());
    println!("upper: {}", state.upper());
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn update(
    cli: &Cli,
    state_path: &Path,
    clauses: &[String],
    clause_file: Option<&Path>,
    pick: usize,
    no_fallback: bool,
    mode: CoreChoice,
    out: Option<&Path>,
) -> CmdResult {
    let mut state = BeliefState::from_json(&read(state_path)?)?;
    if let Some(tag) = cli.formalism {
        state = state.with_formalism(tag)?;
    }
    let u = state.universe().clone();
    let mut phi = Cnf::top(u.clone());
    for c in clauses {
        phi.push(parse_clause(c, &u)?)?;
    }
    if let Some(path) = clause_file {
        phi = phi.conjoin(&parse_clauses(&read(path)?, &u)?)?;
    }
    if clauses.is_empty() && clause_file.is_none() {
        return Err(Failure::Code(
            2,
            "no update given: use --clause or --clause-file".into(),
        ));
    }
    let config = RecompileConfig {
        limits: cli.limits(),
        core_mode: mode.into(),
        pick: CoreTieBreak::Index(pick),
        allow_fallback: !no_fallback,
    };
    let next = state.step(&phi, &config)?;
    write(out.unwrap_or(state_path), &next.to_json())?;
    let record = next.log().last().expect("step was logged");
    let bracket = if next.check_bracket() { "OK" } else { "BROKEN" };
    println!("path={} bracket={bracket}", record.path);
    println!("lower: {}", next.lower());
    println!("upper: {}", next.upper());
    Ok(0)
}

fn query(state_path: &Path, clause: &str) -> CmdResult {
    let state = BeliefState::from_json(&read(state_path)?)?;
    let psi = parse_clause(clause, state.universe())?;
    let verdict = state.query(&psi)?;
    println!("{verdict}");
    Ok(match verdict {
        QueryVerdict::Yes => 0,
        QueryVerdict::No => 10,
        QueryVerdict::Unknown => 11,
        QueryVerdict::ContradictoryBounds => 12,
    })
}

fn verify(cli: &Cli, n: usize, trials: usize, adversarial: bool) -> CmdResult {
    let opts = VerifyOptions {
        n,
        trials,
        seed: cli.seed,
    };
    if adversarial {
        let tag = cli.formalism_or(FormalismTag::Dalal);
        return match find_non_additivity(tag, &opts)? {
            Some(w) => {
                println!("{tag} is not additive: {w}");
                Ok(0)
            }
            None => {
                println!("no additivity failure found for {tag}");
                Ok(0)
            }
        };
    }
    let reports = run_all(&opts)?;
    let mut ok = true;
    for r in &reports {
        println!("{r}");
        ok &= r.passed();
    }
    println!("{}", if ok { "all suites passed" } else { "MISMATCH" });
    Ok(if ok { 0 } else { 1 })
}

fn print_kb(cli: &Cli, kb: &hornbound::formula::KnowledgeBase, phi: &Cnf) {
    println!("vars {}", kb.universe().names().join(" "));
    for (name, item) in kb.items() {
        println!("{name}: {}", cli.show(item));
    }
    println!("phi: {}", cli.show(phi));
}

fn reduce(cli: &Cli, kind: &Reduce) -> CmdResult {
    let limits = cli.limits();
    match kind {
        Reduce::Transversal { input } => {
            let h = Hypergraph::parse(&read(input)?)?;
            for t in transversals(&h)? {
                let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                println!("{{{}}}", parts.join(" "));
            }
        }
        Reduce::Fuv { input, solve } => {
            let h = Hypergraph::parse(&read(input)?)?;
            let (kb, f) = fuv_reduction(&h)?;
            print_kb(cli, &kb, &f);
            if *solve {
                for s in maximal_consistent_subsets(&kb, &f, &limits)? {
                    let names: Vec<&str> = s.iter().map(|&i| kb.items()[i].0.as_str()).collect();
                    println!("maximal: {{{}}}", names.join(" "));
                }
            }
        }
        Reduce::Pure3sat { input, solve } => {
            let source = cli.parse_formula(&read(input)?)?;
            let (kb, _, phi) = pure3sat_reduction(&source)?;
            print_kb(cli, &kb, &phi);
            if *solve {
                let kept = widtio_update(&kb, &phi, &limits)?.contains_name("g");
                println!(
                    "g {} (source formula {})",
                    if kept { "kept" } else { "dropped" },
                    if kept { "unsatisfiable" } else { "satisfiable" }
                );
            }
        }
        Reduce::Nodecover { input, l, solve } => {
            let g = Graph::parse(&read(input)?)?;
            let (m1, m2, k) = nodecover_reduction(&g, *l)?;
            println!("vars {}", m1.universe().names().join(" "));
            println!("m1: {m1}");
            println!("m2: {m2}");
            println!("k: {k}");
            if *solve {
                let found = maxmodel(&m1, &m2, k)?;
                println!(
                    "maxmodel: {found} (cover smaller than {l} {})",
                    if found { "exists" } else { "does not exist" }
                );
            }
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Compile {
            input,
            all_cores,
            core_mode,
        } => compile(cli, input, *all_cores, *core_mode),
        Command::Update {
            state,
            clause,
            clause_file,
            pick,
            no_fallback,
            core_mode,
            out,
        } => update(
            cli,
            state,
            clause,
            clause_file.as_deref(),
            *pick,
            *no_fallback,
            *core_mode,
            out.as_deref(),
        ),
        Command::Query { state, clause } => query(state, clause),
        Command::Verify {
            n,
            trials,
            adversarial_additivity,
        } => verify(cli, *n, *trials, *adversarial_additivity),
        Command::Reduce { kind } => reduce(cli, kind),
        Command::Session {
            action:
                Session::New {
                    input,
                    out,
                    core_mode,
                },
        } => session_new(cli, input, out, *core_mode),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&cli.command, &e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Code(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
