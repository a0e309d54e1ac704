//! Challenger agents and game drivers.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{self, Element};
use crate::embedding::Violation;
use crate::error::ModelError;
use crate::game::{GameState, Side};
use crate::index::Index;
use crate::parse::{parse_expr, Expr};
use crate::sample::{random_term, TermShape};
use crate::term::{Kind, Term};
use crate::transcript::{AgentInfo, Transcript};

/// Default move pool: a standard number, both parameters, and the sum,
/// product and double of the left parameter.
pub const DEFAULT_POOL: [&str; 6] = ["2", "a0", "b0", "add(a0,w)", "mul(a0,b0)", "mul(a0,2)"];

/// Largest term the random agent will play.
const MAX_RANDOM_SIZE: u64 = 64;

/// A parsed list of move expressions over `w`, `a0` and `b0`.
#[derive(Clone, Debug)]
pub struct Pool {
    exprs: Vec<Expr>,
}

impl Pool {
    pub fn default_pool() -> Pool {
        Pool::parse_lines(&DEFAULT_POOL.join("\n")).expect("default pool parses")
    }

    /// One expression per line; blank lines and `#` comments are skipped.
    pub fn parse_lines(text: &str) -> Result<Pool, ModelError> {
        let exprs = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| parse_expr(l).map_err(ModelError::from))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Pool { exprs })
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    pub fn texts(&self) -> Vec<String> {
        self.exprs.iter().map(|e| e.to_string()).collect()
    }

    pub fn eval(&self, i: usize, state: &GameState) -> Result<Element, ModelError> {
        self.exprs[i].eval(&env(state))
    }
}

/// Values of the names usable in move expressions.
pub fn env(state: &GameState) -> BTreeMap<String, Element> {
    BTreeMap::from([
        ("w".to_string(), state.w.clone()),
        ("a0".to_string(), Element::NonStd(state.a0.clone())),
        ("b0".to_string(), Element::NonStd(state.b0.clone())),
    ])
}

/// One scripted move: a side and an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptedMove {
    pub side: Side,
    pub expr: String,
}

/// Parses lines of the form `left <expr>` or `right <expr>`.
pub fn parse_script(text: &str) -> Result<Vec<ScriptedMove>, ModelError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (side, expr) = l
                .split_once(char::is_whitespace)
                .ok_or_else(|| ModelError::State(format!("expected `<side> <element>`, got {l:?}")))?;
            Ok(ScriptedMove {
                side: side.parse()?,
                expr: expr.trim().to_string(),
            })
        })
        .collect()
}

/// Evaluates a move expression in the context of a game.
pub fn eval_move(state: &GameState, expr: &str) -> Result<Element, ModelError> {
    parse_expr(expr)?.eval(&env(state))
}

/// Plays a scripted game. The script must have exactly `n` moves.
pub fn play_scripted(n: u32, w: Element, moves: &[ScriptedMove]) -> Result<Transcript, ModelError> {
    if moves.len() != n as usize {
        return Err(ModelError::State(format!(
            "script has {} moves for a {n}-round game",
            moves.len()
        )));
    }
    let mut state = GameState::new(n, w)?;
    for m in moves {
        let e = eval_move(&state, &m.expr)?;
        state.respond(m.side, e)?;
    }
    Ok(Transcript::from_state(&state, None))
}

/// A seeded challenger mixing pool moves, random small terms, standard
/// numbers and terms derived from its own earlier moves.
pub struct RandomAgent {
    rng: ChaCha8Rng,
    pool: Pool,
}

impl RandomAgent {
    pub fn new(seed: u64, pool: Pool) -> RandomAgent {
        RandomAgent {
            rng: ChaCha8Rng::seed_from_u64(seed),
            pool,
        }
    }

    pub fn next_move(&mut self, state: &GameState) -> (Side, Element) {
        let side = if self.rng.gen_bool(0.5) { Side::Left } else { Side::Right };
        let choice = self.rng.gen_range(0..5);
        let candidate = match choice {
            0 if !self.pool.is_empty() => {
                let i = self.rng.gen_range(0..self.pool.len());
                self.pool.eval(i, state).ok()
            }
            1 => Some(Element::std(self.rng.gen_range(0..=5))),
            2 | 3 => self.derived(state, side),
            _ => None,
        };
        let e = match candidate {
            Some(Element::NonStd(t)) if t.size() > MAX_RANDOM_SIZE => None,
            other => other,
        };
        let e = e.unwrap_or_else(|| Element::NonStd(self.small_term(state)));
        (side, e)
    }

    fn small_term(&mut self, state: &GameState) -> Term {
        let mut indices: Vec<Index> = (0..=3).map(Index::small).collect();
        for p in [&state.a0, &state.b0] {
            if let Kind::Leaf { index, .. } = p.kind() {
                indices.push(index.clone());
            }
        }
        let shape = TermShape {
            max_nodes: 4,
            indices,
            levels: -2..=2,
        };
        random_term(&mut self.rng, &shape)
    }

    fn derived(&mut self, state: &GameState, side: Side) -> Option<Element> {
        let mut own: Vec<Element> = state.side_terms(side).into_iter().map(Element::NonStd).collect();
        for r in &state.rounds {
            let (l, rt) = r.pair();
            own.push(if side == Side::Left { l } else { rt });
        }
        let x = own[self.rng.gen_range(0..own.len())].clone();
        let mut others = own.clone();
        others.push(Element::std(1));
        others.push(Element::std(2));
        let y = others[self.rng.gen_range(0..others.len())].clone();
        match self.rng.gen_range(0..6) {
            0 => Some(arith::succ(&x)),
            1 => Some(arith::pred(&x)),
            2 => Some(arith::add(&x, &y)),
            3 => Some(arith::add(&y, &x)),
            4 => arith::mul(&x, &y).ok(),
            _ => arith::mul(&y, &x).ok(),
        }
    }
}

/// Plays one game against a seeded random agent.
pub fn play_random(n: u32, w: Element, seed: u64, pool: &Pool) -> Result<Transcript, ModelError> {
    let mut state = GameState::new(n, w)?;
    let mut agent = RandomAgent::new(seed, pool.clone());
    while !state.is_finished() {
        let (side, e) = agent.next_move(&state);
        state.respond(side, e)?;
    }
    let info = AgentInfo {
        kind: "random".into(),
        seed: Some(seed),
        pool: pool.texts(),
    };
    Ok(Transcript::from_state(&state, Some(info)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub game: String,
    pub violations: Vec<Violation>,
}

/// Outcome of a batch of games.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub agent: String,
    pub n: u32,
    pub w: Element,
    pub pool: Vec<String>,
    pub games: u64,
    pub passed: u64,
    pub failures: Vec<Failure>,
}

impl BatchSummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.games
    }
}

fn game_failure(label: String, state: &GameState) -> Option<Failure> {
    let mut violations: Vec<Violation> = state
        .rounds
        .iter()
        .flat_map(|r| r.fragment_report.violations.clone())
        .collect();
    match state.win_check() {
        Ok(r) => violations.extend(r.violations),
        Err(e) => violations.push(Violation {
            clause: "state".into(),
            witness: e.to_string(),
        }),
    }
    (!violations.is_empty()).then_some(Failure { game: label, violations })
}

/// Plays seeds `seed .. seed + games` against the random agent.
pub fn run_random_batch(n: u32, w: &Element, seed: u64, games: u64, pool: &Pool) -> Result<BatchSummary, ModelError> {
    let mut summary = BatchSummary {
        agent: "random".into(),
        n,
        w: w.clone(),
        pool: pool.texts(),
        games,
        passed: 0,
        failures: Vec::new(),
    };
    for s in seed..seed + games {
        let mut state = GameState::new(n, w.clone())?;
        let mut agent = RandomAgent::new(s, pool.clone());
        while !state.is_finished() {
            let (side, e) = agent.next_move(&state);
            state.respond(side, e)?;
        }
        match game_failure(format!("seed {s}"), &state) {
            None => summary.passed += 1,
            Some(f) => summary.failures.push(f),
        }
    }
    Ok(summary)
}

/// Plays every sequence of `n` moves, each a side and a pool element.
pub fn run_exhaustive(n: u32, w: &Element, pool: &Pool) -> Result<BatchSummary, ModelError> {
    let state = GameState::new(n, w.clone())?;
    let moves: Vec<(Side, Element)> = [Side::Left, Side::Right]
        .into_iter()
        .flat_map(|s| (0..pool.len()).map(move |i| (s, i)))
        .map(|(s, i)| pool.eval(i, &state).map(|e| (s, e)))
        .collect::<Result<_, _>>()?;
    let mut summary = BatchSummary {
        agent: "exhaustive".into(),
        n,
        w: w.clone(),
        pool: pool.texts(),
        games: 0,
        passed: 0,
        failures: Vec::new(),
    };
    let mut label = Vec::new();
    explore(&state, &moves, &mut label, &mut summary)?;
    Ok(summary)
}

fn explore(
    state: &GameState,
    moves: &[(Side, Element)],
    label: &mut Vec<String>,
    summary: &mut BatchSummary,
) -> Result<(), ModelError> {
    if state.is_finished() {
        summary.games += 1;
        match game_failure(label.join(", "), state) {
            None => summary.passed += 1,
            Some(f) => summary.failures.push(f),
        }
        return Ok(());
    }
    for (side, e) in moves {
        let mut next = state.clone();
        next.respond(*side, e.clone())?;
        label.push(format!("{side} {e}"));
        explore(&next, moves, label, summary)?;
        label.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_element;

    #[test]
    fn scripted_games() {
        let w = parse_element("5").unwrap();
        let t = play_scripted(0, w.clone(), &[]).unwrap();
        assert!(t.verdict.as_ref().unwrap().ok);
        let script = parse_script("left a0").unwrap();
        let t = play_scripted(1, w.clone(), &script).unwrap();
        assert_eq!(t.rounds[0].reply, t.b0);
        assert!(t.verdict.unwrap().ok);
        assert!(play_scripted(2, w, &script).is_err());
    }

    #[test]
    fn random_games_are_deterministic() {
        let w = parse_element("p(d(2,0),d(3,1))").unwrap();
        let pool = Pool::default_pool();
        let a = play_random(2, w.clone(), 7, &pool).unwrap();
        let b = play_random(2, w, 7, &pool).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.verdict.unwrap().ok);
    }

    #[test]
    fn small_exhaustive_run() {
        let w = parse_element("d(2,0)").unwrap();
        let s = run_exhaustive(1, &w, &Pool::default_pool()).unwrap();
        assert_eq!(s.games, 12);
        assert!(s.ok(), "{s:?}");
    }
}
