use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qtree::agents::{self, Pool};
use qtree::arith::Element;
use qtree::closure::subterm_closure;
use qtree::game::GameState;
use qtree::lemmas;
use qtree::parse::{parse_element, parse_term};
use qtree::rho::rho;
use qtree::service::{self, ServiceConfig, DEFAULT_MAX_N};
use qtree::transcript::{replay, Transcript};
use qtree::{FamilySet, ModelError};

#[derive(Parser)]
#[command(name = "qtree", version, about = "Tree-term model of Q with pairing, closures and the n-round game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AgentKind {
    Random,
    Exhaustive,
    Scripted,
}

#[derive(Subcommand)]
enum Command {
    /// Check Q1-Q7 and the pairing axiom on random instances.
    VerifyAxioms {
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 8)]
        max_size: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the closure, extension and automorphism property suites.
    VerifyLemmas {
        #[arg(long, default_value_t = 1_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print rho_n(k).
    Rho { n: u32, k: u32 },
    /// Print the subterm closure of the given terms.
    Closure {
        #[arg(long, num_args = 1.., required = true)]
        base: Vec<String>,
        /// Depth; the full closure when omitted.
        #[arg(long)]
        depth: Option<u64>,
    },
    /// Play games against a challenger agent.
    Autoplay {
        #[arg(long)]
        n: u32,
        /// The anchor element.
        #[arg(long, default_value = "5")]
        w: String,
        #[arg(long, value_enum, default_value_t = AgentKind::Random)]
        agent: AgentKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random games; more than one prints a summary.
        #[arg(long, default_value_t = 1)]
        games: u64,
        /// Move expressions, one per line.
        #[arg(long)]
        pool: Option<PathBuf>,
        /// Scripted moves, one `left <expr>` or `right <expr>` per line.
        #[arg(long)]
        moves: Option<PathBuf>,
    },
    /// Play interactively: reads `left <expr>` or `right <expr>` per line.
    Play {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "5")]
        w: String,
    },
    /// Re-check a transcript file (`-` for standard input).
    Replay { file: PathBuf },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: u32,
        /// Write all transcripts to this file on shutdown.
        #[arg(long)]
        persist: Option<PathBuf>,
    },
}

enum Failure {
    Property,
    Usage(String),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn check(ok: bool) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn element(text: &str) -> Result<Element, Failure> {
    parse_element(text).map_err(|e| Failure::Usage(format!("{text:?}: {e}")))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::VerifyAxioms { samples, max_size, seed } => {
            let report = lemmas::verify_axioms(samples, max_size, seed)?;
            print_json(&report);
            check(report.iter().all(|r| r.failures.is_empty()))
        }
        Command::VerifyLemmas { samples, seed } => {
            let report = lemmas::verify_lemmas(samples, seed)?;
            print_json(&report);
            check(report.iter().all(|r| r.failures.is_empty()))
        }
        Command::Rho { n, k } => {
            let r = rho(n, k);
            if r.is_vast() {
                eprintln!("note: rho({n},{k}) has more than 2^20 bits and is printed symbolically");
            }
            println!("{r}");
            Ok(())
        }
        Command::Closure { base, depth } => {
            let mut set = FamilySet::new();
            for text in &base {
                let t = parse_term(text).map_err(|e| Failure::Usage(format!("{text:?}: {e}")))?;
                set.union_with(&subterm_closure(&t, depth));
            }
            println!("{set}");
            Ok(())
        }
        Command::Autoplay {
            n,
            w,
            agent,
            seed,
            games,
            pool,
            moves,
        } => {
            let w = element(&w)?;
            let pool = match &pool {
                Some(p) => Pool::parse_lines(&read_input(p)?)?,
                None => Pool::default_pool(),
            };
            match agent {
                AgentKind::Scripted => {
                    let path = moves.ok_or_else(|| Failure::Usage("--moves is required for the scripted agent".into()))?;
                    let script = agents::parse_script(&read_input(&path)?)?;
                    let t = agents::play_scripted(n, w, &script)?;
                    print!("{}", t.to_json());
                    check(t.verdict.as_ref().is_some_and(|v| v.ok) && t.fragments_ok())
                }
                AgentKind::Random if games == 1 => {
                    let t = agents::play_random(n, w, seed, &pool)?;
                    print!("{}", t.to_json());
                    check(t.verdict.as_ref().is_some_and(|v| v.ok) && t.fragments_ok())
                }
                AgentKind::Random => {
                    let s = agents::run_random_batch(n, &w, seed, games, &pool)?;
                    print_json(&s);
                    check(s.ok())
                }
                AgentKind::Exhaustive => {
                    let s = agents::run_exhaustive(n, &w, &pool)?;
                    print_json(&s);
                    check(s.ok())
                }
            }
        }
        Command::Play { n, w } => play(n, element(&w)?),
        Command::Replay { file } => {
            let outcome = replay(&read_input(&file)?)?;
            print_json(&outcome);
            check(outcome.matching)
        }
        Command::Serve {
            host,
            port,
            max_n,
            persist,
        } => {
            let config = ServiceConfig { max_n, persist };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
                eprintln!("listening on {}", listener.local_addr()?);
                service::serve(listener, config).await
            })?;
            Ok(())
        }
    }
}

fn play(n: u32, w: Element) -> Result<(), Failure> {
    let mut state = GameState::new(n, w)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "w = {}, a0 = {}, b0 = {}", state.w, state.a0, state.b0)?;
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    while !state.is_finished() {
        writeln!(out, "round {} of {n}: <left|right> <element>", state.rounds.len() + 1)?;
        out.flush()?;
        let Some(line) = lines.next() else {
            return Err(Failure::Usage("input ended before the game".into()));
        };
        let line = line?;
        let parsed = agents::parse_script(&line).and_then(|mut m| {
            let m = m.pop().ok_or_else(|| ModelError::State("empty move".into()))?;
            Ok((m.side, agents::eval_move(&state, &m.expr)?))
        });
        match parsed {
            Ok((side, e)) => {
                let reply = state.respond(side, e)?;
                writeln!(out, "reply: {reply}")?;
            }
            Err(e) => writeln!(out, "error: {e}")?,
        }
    }
    let t = Transcript::from_state(&state, None);
    write!(out, "{}", t.to_json())?;
    check(t.verdict.as_ref().is_some_and(|v| v.ok) && t.fragments_ok())
}
