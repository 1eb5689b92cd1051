//! Command-line driver for the ICBD solver.
//!
//! Exit codes: 0 on success, 1 when the analysis finds something (a
//! condition fails, an oracle mismatch, a strategy with no certificate), 2 on
//! unreadable or invalid input.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use icbd::applications::agenda::{agenda_to_game, BinaryAgenda};
use icbd::applications::moneyburn::{money_burn_game, MoneyBurnBaseGame, MoneyBurnConfig};
use icbd::cardinal::{canonical_profile, profile_from_values, UtilityFunction};
use icbd::game::{classify_game, Game, GameError};
use icbd::io::format::{
    parse_doc, parse_game, parse_rational, serialize_game, to_canonical_json, AgendaDocument, BaseGameDocument,
    FormatError, GameDocument, RestrictionDocument, UtilitiesDocument,
};
use icbd::io::generator::{generate_game, GeneratorSpec};
use icbd::io::oracle::{oracle_check, OracleLevel};
use icbd::io::trace::{CertificateDocument, Names, TraceDocument};
use icbd::solvers::perfect_info::icbd_perfect_info;
use icbd::solvers::{
    backward_induction, check_nrt, check_tdi, check_tdi_structural, icbd as run_icbd, icd, iterated_admissibility,
    local_first_round_variant, osr, outcome_labels, SolveResult, SolverError,
};
use icbd::strategies::{Restriction, StrategySpace};
use icbd::witness::{construct_sequential_witness, verify_certificate, WitnessError};

/// Largest number of reduced strategies per player enumerated explicitly.
const STRATEGY_CAP: usize = 200_000;

#[derive(Parser)]
#[command(name = "icbd", version, about = "Solve dynamic games with ordinal preferences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solution concept and print the surviving strategies and outcomes.
    Solve(SolveArgs),
    /// Test a structural condition of a game.
    Check(CheckArgs),
    /// Generate a game file.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Compare the solvers against brute-force definitions, or replay a trace.
    Verify(VerifyArgs),
    /// Emit a rationality certificate for one strategy.
    Witness(WitnessArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Icbd,
    Osr,
    Icd,
    Ia,
    Bi,
    /// Variant whose first round removes strategies only where they are dominated.
    Local,
}

#[derive(Args)]
struct SolveArgs {
    game: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Cardinal utilities (for `icd`; defaults to the canonical ranks).
    #[arg(long)]
    utilities: Option<PathBuf>,
    /// Write the elimination trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Condition {
    Nrt,
    Tdi,
    PerfectInfo,
    PerfectRecall,
}

#[derive(Args)]
struct CheckArgs {
    game: PathBuf,
    #[arg(long, value_enum)]
    condition: Condition,
}

#[derive(Subcommand)]
enum GenCommand {
    /// A seeded random game.
    Random(RandomArgs),
    /// The voting game of a binary agenda.
    Agenda {
        agenda: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// A money-burning game over a two-player base game.
    Moneyburn {
        base: PathBuf,
        /// Cost per burnt unit, as `p/q`.
        #[arg(long)]
        epsilon: String,
        /// Largest burn level.
        #[arg(long)]
        cap: usize,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    seed: u64,
    /// Require no relevant ties (implies perfect information).
    #[arg(long)]
    nrt: bool,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 2)]
    players: usize,
    /// Probability that adjacent outcomes tie in a ranking, as `p/q`.
    #[arg(long, default_value = "1/5")]
    ties: String,
    /// Only one mover per node.
    #[arg(long)]
    perfect_info: bool,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Dominance,
    IcbdStep,
    Theorem31,
}

#[derive(Args)]
struct VerifyArgs {
    game: PathBuf,
    #[arg(long, value_enum, required_unless_present_any = ["trace", "certificate"])]
    oracle: Option<OracleArg>,
    /// Replay every recorded elimination of a trace file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Re-check a certificate file.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Restriction to start from (defaults to all strategies).
    #[arg(long)]
    restriction: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    game: PathBuf,
    /// Player name (or 1-based position).
    #[arg(long)]
    player: String,
    /// Strategy name as printed by `solve`.
    #[arg(long)]
    strategy: String,
    #[arg(long)]
    restriction: Option<PathBuf>,
    /// Write the certificate here instead of standard output.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

/// Input problems exit with 2, everything else the command decides.
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

type Outcome = std::result::Result<ExitCode, InputError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Check(a) => check(a),
        Command::Gen(g) => generate(g),
        Command::Verify(a) => verify(a),
        Command::Witness(a) => witness(a),
    };
    match run {
        Ok(code) => code,
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn finding() -> ExitCode {
    ExitCode::from(1)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_game(path: &Path) -> Result<Game> {
    parse_game(&read(path)?).with_context(|| format!("invalid game file {}", path.display()))
}

fn space_of(g: &Game) -> Result<StrategySpace<'_>> {
    StrategySpace::with_cap(g, STRATEGY_CAP).context("too many reduced strategies to enumerate")
}

fn load_restriction(names: &Names, path: Option<&Path>, space: &StrategySpace) -> Result<Restriction> {
    match path {
        None => Ok(Restriction::full(space)),
        Some(p) => {
            let doc: RestrictionDocument = parse_doc(&read(p)?)?;
            let r = names.parse_restriction_document(&doc)?;
            if !r.is_valid() {
                bail!("restriction leaves some player without strategies");
            }
            Ok(r)
        }
    }
}

fn load_utilities(g: &Game, path: Option<&Path>) -> Result<Vec<UtilityFunction>> {
    match path {
        None => Ok(canonical_profile(g)),
        Some(p) => {
            let doc: UtilitiesDocument = parse_doc(&read(p)?)?;
            Ok(profile_from_values(doc.resolve(g)?))
        }
    }
}

fn braces<I: IntoIterator<Item = String>>(items: I) -> String {
    format!("{{{}}}", items.into_iter().collect::<Vec<_>>().join(", "))
}

fn print_restriction(space: &StrategySpace, r: &Restriction) {
    let g = space.game;
    for (i, set) in r.sets.iter().enumerate() {
        println!(
            "  {}: {}",
            g.players()[i],
            braces(set.iter().map(|&s| space.name(i, s)))
        );
    }
    if r.num_profiles() <= 16 {
        let profiles = icbd::strategies::product(&r.sets).into_iter().map(|p| {
            format!(
                "({})",
                p.iter()
                    .enumerate()
                    .map(|(i, &s)| space.name(i, s))
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        });
        println!("profiles: {}", braces(profiles));
    }
}

fn solve(a: SolveArgs) -> Outcome {
    let g = load_game(&a.game)?;
    let method_name = a.method.to_possible_value().expect("named").get_name().to_string();
    if let Method::Bi = a.method {
        if a.trace.is_some() {
            return Err(anyhow::anyhow!("backward induction produces no elimination trace").into());
        }
        let bi = backward_induction(&g).map_err(|e| anyhow::anyhow!("{e}"))?;
        println!("method: bi");
        println!("outcomes: {}", braces(bi.labels(&g)));
        println!("unique: {}", bi.unique);
        return Ok(ExitCode::SUCCESS);
    }
    if let Method::Local = a.method {
        if a.trace.is_some() {
            return Err(anyhow::anyhow!("the local variant produces no elimination trace").into());
        }
        let space = space_of(&g)?;
        let res = local_first_round_variant(&space)?;
        println!("method: local");
        for (h, removed) in &res.local_removals {
            let owner = g.info_set(*h).owner;
            let names = removed.iter().map(|&s| space.name(owner, s));
            println!("round 1 at {}: removed {}", g.info_set(*h).name, braces(names));
        }
        for (k, round) in res.global_rounds.iter().enumerate() {
            let names = round
                .iter()
                .map(|&(i, s)| format!("{}:{}", g.players()[i], space.name(i, s)));
            println!("round {}: removed {}", k + 2, braces(names));
        }
        println!("fixpoint:");
        print_restriction(&space, &res.fixpoint);
        println!("outcomes: {}", braces(outcome_labels(&space, &res.outcomes)));
        return Ok(ExitCode::SUCCESS);
    }
    let space = match StrategySpace::with_cap(&g, STRATEGY_CAP) {
        Ok(sp) => sp,
        Err(_) if matches!(a.method, Method::Icbd) && a.trace.is_none() => return solve_structured(&g),
        Err(e) => {
            return Err(anyhow::Error::new(e)
                .context("too many reduced strategies to enumerate")
                .into())
        }
    };
    let names = Names::new(&space)?;
    let full = Restriction::full(&space);
    let u = load_utilities(&g, a.utilities.as_deref())?;
    let (res, certified): (SolveResult, Option<usize>) = match a.method {
        Method::Icbd => (run_icbd(&space, &full)?, None),
        Method::Osr => {
            let o = osr(&space, &full)?;
            let n = o.certificates.iter().map(|level| level.len()).sum();
            (o.solve, Some(n))
        }
        Method::Icd => (icd(&space, &u, &full)?, None),
        Method::Ia => (iterated_admissibility(&space)?, None),
        Method::Bi | Method::Local => unreachable!("handled above"),
    };
    let labels: Vec<String> = outcome_labels(&space, &res.outcomes).into_iter().collect();
    println!("method: {method_name}");
    println!("iterations: {}", res.iterations_to_fixpoint);
    for (k, it) in res.trace.iterations.iter().enumerate() {
        let removed = it
            .eliminated
            .iter()
            .map(|e| format!("{}:{}", g.players()[e.player], space.name(e.player, e.strategy)));
        println!("round {}: removed {}", k + 1, braces(removed));
    }
    println!("fixpoint:");
    print_restriction(&space, &res.fixpoint);
    println!("outcomes: {}", braces(labels.iter().cloned()));
    if let Some(n) = certified {
        println!("certificates: {n}");
    }
    if let Some(path) = &a.trace {
        let with_u = matches!(a.method, Method::Icd).then_some(u.as_slice());
        let doc = names.trace(&method_name, &res.trace, &res.fixpoint, &labels, with_u);
        write(path, &to_canonical_json(&doc))?;
    }
    Ok(ExitCode::SUCCESS)
}

/// ICBD on perfect-information games too large for explicit strategies.
fn solve_structured(g: &Game) -> Outcome {
    let res = icbd_perfect_info(g)?;
    let labels: BTreeSet<String> = res.outcomes.iter().map(|&z| g.label(z).to_string()).collect();
    println!("method: icbd");
    println!("engine: node-form");
    println!("iterations: {}", res.iterations_to_fixpoint);
    println!("outcomes: {}", braces(labels));
    Ok(ExitCode::SUCCESS)
}

fn check(a: CheckArgs) -> Outcome {
    if let Condition::PerfectRecall = a.condition {
        let text = read(&a.game)?;
        let doc: GameDocument = parse_doc(&text)?;
        return match doc.to_game() {
            Ok(_) => {
                println!("perfect recall: holds");
                Ok(ExitCode::SUCCESS)
            }
            Err(FormatError::Game(e @ GameError::PerfectRecallViolation { .. })) => {
                println!("perfect recall: fails ({e})");
                Ok(finding())
            }
            Err(e) => Err(e.into()),
        };
    }
    let g = load_game(&a.game)?;
    let class = classify_game(&g);
    let (name, failure) = match a.condition {
        Condition::PerfectInfo => (
            "perfect information",
            (!class.perfect_information)
                .then(|| "some node has simultaneous movers or a non-singleton information set".to_string()),
        ),
        Condition::Nrt => (
            "no relevant ties",
            match check_nrt(&g) {
                Ok(None) => None,
                Ok(Some(v)) => Some(format!(
                    "{} is indifferent between terminal histories {} ({}) and {} ({})",
                    g.players()[v.player],
                    g.history(v.z).name,
                    g.label(v.z),
                    g.history(v.z2).name,
                    g.label(v.z2)
                )),
                Err(SolverError::NotPerfectInformation) => Some("the game does not have perfect information".into()),
                Err(e) => return Err(e.into()),
            },
        ),
        Condition::Tdi => ("transference of decision-maker indifference", tdi_failure(&g)?),
        Condition::PerfectRecall => unreachable!("handled above"),
    };
    match failure {
        None => {
            println!("{name}: holds");
            Ok(ExitCode::SUCCESS)
        }
        Some(why) => {
            println!("{name}: fails ({why})");
            Ok(finding())
        }
    }
}

fn tdi_failure(g: &Game) -> Result<Option<String>> {
    if classify_game(g).perfect_information {
        return Ok(check_tdi_structural(g)?.map(|v| {
            format!(
                "{} is indifferent between {} and {} but {} is not",
                g.players()[v.deviator],
                g.label(v.z),
                g.label(v.z2),
                g.players()[v.other]
            )
        }));
    }
    let space = space_of(g)?;
    Ok(check_tdi(&space).map(|v| {
        format!(
            "{} is indifferent between {} and {} against one profile but {} is not",
            g.players()[v.deviator],
            space.name(v.deviator, v.s),
            space.name(v.deviator, v.s2),
            g.players()[v.other]
        )
    }))
}

fn generate(cmd: GenCommand) -> Outcome {
    let (g, out) = match cmd {
        GenCommand::Random(a) => {
            let spec = GeneratorSpec {
                seed: a.seed,
                max_depth: a.depth,
                max_actions: a.actions,
                player_count: a.players,
                tie_probability: a.ties,
                force_nrt: a.nrt,
                force_perfect_info: a.perfect_info,
            };
            (generate_game(&spec)?, a.output)
        }
        GenCommand::Agenda { agenda, output } => {
            let doc: AgendaDocument = parse_doc(&read(&agenda)?)?;
            (agenda_to_game(&BinaryAgenda::from_document(&doc)?)?, output)
        }
        GenCommand::Moneyburn {
            base,
            epsilon,
            cap,
            output,
        } => {
            let doc: BaseGameDocument = parse_doc(&read(&base)?)?;
            let base = MoneyBurnBaseGame::from_document(&doc)?;
            let config = MoneyBurnConfig {
                epsilon: parse_rational(&epsilon)?,
                budget_cap: cap,
            };
            (money_burn_game(&base, &config)?, output)
        }
    };
    write(&out, &serialize_game(&g))?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Outcome {
    let g = load_game(&a.game)?;
    let space = space_of(&g)?;
    let names = Names::new(&space)?;
    let mut clean = true;
    if let Some(level) = a.oracle {
        let level = match level {
            OracleArg::Dominance => OracleLevel::Dominance,
            OracleArg::IcbdStep => OracleLevel::IcbdStep,
            OracleArg::Theorem31 => OracleLevel::Theorem31,
        };
        let r = load_restriction(&names, a.restriction.as_deref(), &space)?;
        let rep = oracle_check(&space, &r, level)?;
        println!(
            "oracle: {} rounds, {} checks, {} mismatches",
            rep.rounds,
            rep.checks,
            rep.mismatches.len()
        );
        for m in &rep.mismatches {
            let at = m
                .info_set
                .map(|h| format!(" at {}", g.info_set(h).name))
                .unwrap_or_default();
            println!("  round {} {}{at}: {}", m.round, g.players()[m.player], m.detail);
        }
        clean &= rep.is_clean();
    }
    if let Some(path) = &a.trace {
        let doc: TraceDocument = parse_doc(&read(path)?)?;
        let trace = names.parse_trace(&doc)?;
        let u = doc.utilities.as_ref().map(|t| names.parse_utilities(t)).transpose()?;
        let errs = trace.replay(&space, u.as_deref());
        println!(
            "trace: {} rounds replayed, {} problems",
            trace.iterations.len(),
            errs.len()
        );
        for e in &errs {
            println!("  {e}");
        }
        clean &= errs.is_empty();
    }
    if let Some(path) = &a.certificate {
        let doc: CertificateDocument = parse_doc(&read(path)?)?;
        let cert = names.parse_certificate(&doc)?;
        let errs = verify_certificate(&space, &cert);
        println!("certificate: {} problems", errs.len());
        for e in &errs {
            println!("  {e}");
        }
        clean &= errs.is_empty();
    }
    Ok(if clean { ExitCode::SUCCESS } else { finding() })
}

fn witness(a: WitnessArgs) -> Outcome {
    let g = load_game(&a.game)?;
    let space = space_of(&g)?;
    let names = Names::new(&space)?;
    let i = match g.player_index(&a.player) {
        Some(i) => i,
        None => match a.player.parse::<usize>() {
            Ok(k) if (1..=g.num_players()).contains(&k) => k - 1,
            _ => return Err(anyhow::anyhow!("unknown player `{}`", a.player).into()),
        },
    };
    let s = space
        .find(i, &a.strategy)
        .ok_or_else(|| anyhow::anyhow!("unknown strategy `{}` of {}", a.strategy, g.players()[i]))?;
    let r = load_restriction(&names, a.restriction.as_deref(), &space)?;
    if !r.contains(i, s) {
        return Err(anyhow::anyhow!("strategy `{}` is not in the restriction", a.strategy).into());
    }
    match construct_sequential_witness(&space, i, s, &r) {
        Ok(cert) => {
            let text = to_canonical_json(&names.certificate(&cert));
            match &a.output {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ WitnessError::HypothesisViolated { .. }) => {
            println!("no certificate: {e}");
            Ok(finding())
        }
        Err(e) => Err(e.into()),
    }
}
