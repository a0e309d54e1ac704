//! Game transcripts and their replay.

use serde::{Deserialize, Serialize};

use crate::arith::Element;
use crate::embedding::{GoodMap, Report};
use crate::error::ModelError;
use crate::game::{check_partial_embedding, checked_pairs, GameState, Round};

/// How the moves of a game were produced. Absent for scripted and
/// interactive play.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentInfo {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub pool: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub n: u32,
    pub w: Element,
    pub a0: Element,
    pub b0: Element,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub agent: Option<AgentInfo>,
    pub rounds: Vec<Round>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<Report>,
    pub fragment: GoodMap,
}

impl Transcript {
    /// The transcript of a game so far; the verdict is present once the game
    /// has ended.
    pub fn from_state(state: &GameState, agent: Option<AgentInfo>) -> Transcript {
        Transcript {
            n: state.n,
            w: state.w.clone(),
            a0: Element::NonStd(state.a0.clone()),
            b0: Element::NonStd(state.b0.clone()),
            agent,
            rounds: state.rounds.clone(),
            verdict: state.win_check().ok(),
            fragment: state.fragment.clone(),
        }
    }

    /// Pretty JSON with a trailing newline. This is the exchange format.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("transcripts serialize");
        s.push('\n');
        s
    }

    /// Whether every intermediate fragment passed its checks.
    pub fn fragments_ok(&self) -> bool {
        self.rounds.iter().all(|r| r.fragment_report.ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayOutcome {
    pub matching: bool,
    pub recorded: Report,
    pub recomputed: Report,
    pub mismatches: Vec<String>,
}

/// Re-checks a finished transcript. The verdict is recomputed from the
/// recorded play alone; the responder is also re-run on the recorded moves
/// so that altered replies or parameters are reported.
pub fn replay(text: &str) -> Result<ReplayOutcome, ModelError> {
    let t: Transcript = serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
    let recorded = t
        .verdict
        .clone()
        .ok_or_else(|| ModelError::Schema("missing verdict".into()))?;
    if t.rounds.len() != t.n as usize {
        return Err(ModelError::Schema(format!(
            "expected {} rounds, found {}",
            t.n,
            t.rounds.len()
        )));
    }
    let (Element::NonStd(a0), Element::NonStd(b0)) = (&t.a0, &t.b0) else {
        return Err(ModelError::Schema("a0 and b0 must be terms".into()));
    };
    let recomputed = check_partial_embedding(&checked_pairs(&t.w, a0, b0, &t.rounds));
    let mut mismatches = Vec::new();
    if recomputed != recorded {
        mismatches.push("verdict differs from the recomputed one".to_string());
    }
    let mut state = GameState::new(t.n, t.w.clone())?;
    if &state.a0 != a0 || &state.b0 != b0 {
        mismatches.push(format!(
            "parameters differ: expected a0 = {}, b0 = {}",
            state.a0, state.b0
        ));
    }
    for (i, r) in t.rounds.iter().enumerate() {
        match state.respond(r.side, r.mv.clone()) {
            Ok(reply) if reply == r.reply => {}
            Ok(reply) => mismatches.push(format!(
                "round {}: recorded reply {} but the responder gives {reply}",
                i + 1,
                r.reply
            )),
            Err(e) => mismatches.push(format!("round {}: {e}", i + 1)),
        }
    }
    Ok(ReplayOutcome {
        matching: mismatches.is_empty(),
        recorded,
        recomputed,
        mismatches,
    })
}
