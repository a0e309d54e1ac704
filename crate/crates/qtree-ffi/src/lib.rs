//! C interface to the qtree model and game engine.
//!
//! Terms and games are opaque handles released with their `_free`
//! functions. Strings returned through `char **` out-parameters are owned by
//! the caller and released with [`qtree_string_free`]. Every fallible call
//! returns a [`QtreeStatus`]; the message for the last failure on the
//! calling thread is available from [`qtree_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qtree::agents::eval_move;
use qtree::closure::subterm_closure;
use qtree::game::{GameState, Side};
use qtree::parse::{parse_element, parse_term};
use qtree::rho::rho;
use qtree::transcript::{replay, Transcript};
use qtree::{FamilySet, ModelError, Term};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QtreeStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A term, element or expression failed to parse.
    Parse = 3,
    /// The model rejected the operation.
    Model = 4,
    /// The game is over or the request does not fit its state.
    State = 5,
    /// A transcript was malformed.
    Schema = 6,
    /// An out-of-range argument, such as an unknown side.
    InvalidArgument = 7,
    /// A value does not fit the requested C type.
    Overflow = 8,
    /// An internal panic was caught at the boundary.
    Panic = 9,
}

/// Left or right structure, passed as `uint32_t`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QtreeSide {
    Left = 0,
    Right = 1,
}

/// Opaque tree term.
pub struct QtreeTerm(Term);

/// Opaque game in progress.
pub struct QtreeGame(GameState);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(QtreeStatus, String);

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        let status = match e {
            ModelError::Parse(_) => QtreeStatus::Parse,
            ModelError::State(_) => QtreeStatus::State,
            ModelError::Schema(_) => QtreeStatus::Schema,
            _ => QtreeStatus::Model,
        };
        Failure(status, e.to_string())
    }
}

impl From<qtree::ParseError> for Failure {
    fn from(e: qtree::ParseError) -> Failure {
        Failure(QtreeStatus::Parse, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `body`, recording failures and catching panics.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QtreeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            QtreeStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QtreeStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(QtreeStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(QtreeStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qtree_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qtree_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a term in the `d(n,m)`, `p(l,r)`, `r(m,b)` grammar.
///
/// # Safety
/// `input` must be a NUL-terminated string and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_term_parse(input: *const c_char, result: *mut *mut QtreeTerm) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let t = parse_term(text(input, "input")?)?;
        *slot = Box::into_raw(Box::new(QtreeTerm(t)));
        Ok(())
    })
}

/// Releases a term. Null is ignored.
///
/// # Safety
/// `term` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qtree_term_free(term: *mut QtreeTerm) {
    if !term.is_null() {
        drop(Box::from_raw(term));
    }
}

/// Writes the normal form of a term as a new string.
///
/// # Safety
/// `term` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_term_to_string(term: *const QtreeTerm, result: *mut *mut c_char) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let t = term.as_ref().ok_or_else(|| null("term"))?;
        *slot = c_string(t.0.to_string());
        Ok(())
    })
}

/// The level of the rightmost leaf.
///
/// # Safety
/// `term` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_term_chi(term: *const QtreeTerm, result: *mut i64) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let t = term.as_ref().ok_or_else(|| null("term"))?;
        *slot = i64::try_from(&t.0.chi()).map_err(|_| Failure(QtreeStatus::Overflow, "chi exceeds 64 bits".into()))?;
        Ok(())
    })
}

/// `S^k(term)` for any `k`, as a new handle.
///
/// # Safety
/// `term` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_term_shift(term: *const QtreeTerm, k: i64, result: *mut *mut QtreeTerm) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let t = term.as_ref().ok_or_else(|| null("term"))?;
        *slot = Box::into_raw(Box::new(QtreeTerm(t.0.shift_by(k))));
        Ok(())
    })
}

/// The pair `<left, right>` in normal form, as a new handle.
///
/// # Safety
/// Both terms must be live handles and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_term_pair(
    left: *const QtreeTerm,
    right: *const QtreeTerm,
    result: *mut *mut QtreeTerm,
) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let l = left.as_ref().ok_or_else(|| null("left"))?;
        let r = right.as_ref().ok_or_else(|| null("right"))?;
        *slot = Box::into_raw(Box::new(QtreeTerm(Term::pair(&l.0, &r.0))));
        Ok(())
    })
}

/// Whether two terms are equal in the model.
///
/// # Safety
/// Both terms must be live handles and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_term_equal(a: *const QtreeTerm, b: *const QtreeTerm, result: *mut bool) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        *slot = a.0 == b.0;
        Ok(())
    })
}

/// The subterm closure of `count` terms to `depth`, or the full closure
/// when `depth` is negative, printed with R-spines kept symbolic.
///
/// # Safety
/// `terms` must point to `count` NUL-terminated strings and `result` be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_closure(
    terms: *const *const c_char,
    count: usize,
    depth: i64,
    result: *mut *mut c_char,
) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        if terms.is_null() && count > 0 {
            return Err(null("terms"));
        }
        let depth = u64::try_from(depth).ok();
        let mut set = FamilySet::new();
        for i in 0..count {
            let t = parse_term(text(*terms.add(i), "term")?)?;
            set.union_with(&subterm_closure(&t, depth));
        }
        *slot = c_string(set.to_string());
        Ok(())
    })
}

/// `rho_n(k)` in decimal, or symbolically when it is too large to print.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_rho(n: u32, k: u32, result: *mut *mut c_char) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        *slot = c_string(rho(n, k).to_string());
        Ok(())
    })
}

/// Starts an `n`-round game with anchor `w`.
///
/// # Safety
/// `w` must be a NUL-terminated string and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_game_new(n: u32, w: *const c_char, result: *mut *mut QtreeGame) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let w = parse_element(text(w, "w")?)?;
        *slot = Box::into_raw(Box::new(QtreeGame(GameState::new(n, w)?)));
        Ok(())
    })
}

/// Releases a game. Null is ignored.
///
/// # Safety
/// `game` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qtree_game_free(game: *mut QtreeGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Plays a move given as an expression over `w`, `a0` and `b0` and writes
/// the reply. `side` is a [`QtreeSide`] value.
///
/// # Safety
/// `game` must be a live handle, `element` a NUL-terminated string and
/// `reply` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_game_move(
    game: *mut QtreeGame,
    side: u32,
    element: *const c_char,
    reply: *mut *mut c_char,
) -> QtreeStatus {
    guard(|| {
        let slot = out(reply, "reply")?;
        let g = game.as_mut().ok_or_else(|| null("game"))?;
        let e = eval_move(&g.0, text(element, "element")?)?;
        let side = match side {
            s if s == QtreeSide::Left as u32 => Side::Left,
            s if s == QtreeSide::Right as u32 => Side::Right,
            s => return Err(Failure(QtreeStatus::InvalidArgument, format!("unknown side {s}"))),
        };
        *slot = c_string(g.0.respond(side, e)?.to_string());
        Ok(())
    })
}

/// Whether all rounds have been played.
///
/// # Safety
/// `game` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_game_is_finished(game: *const QtreeGame, result: *mut bool) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let g = game.as_ref().ok_or_else(|| null("game"))?;
        *slot = g.0.is_finished();
        Ok(())
    })
}

/// The transcript JSON, identical to the command line's.
///
/// # Safety
/// `game` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_game_transcript(game: *const QtreeGame, result: *mut *mut c_char) -> QtreeStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let g = game.as_ref().ok_or_else(|| null("game"))?;
        *slot = c_string(Transcript::from_state(&g.0, None).to_json());
        Ok(())
    })
}

/// Re-checks a transcript; `matching` is set when the verdict and every
/// reply are reproduced.
///
/// # Safety
/// `transcript` must be a NUL-terminated string and `matching` writable.
#[no_mangle]
pub unsafe extern "C" fn qtree_replay(transcript: *const c_char, matching: *mut bool) -> QtreeStatus {
    guard(|| {
        let slot = out(matching, "matching")?;
        *slot = replay(text(transcript, "transcript")?)?.matching;
        Ok(())
    })
}
