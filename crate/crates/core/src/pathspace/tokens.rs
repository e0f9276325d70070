//! Location-token codec and the goal/path string grammar.
//!
//! Goals serialize as `Navigate to x=<locXXXX>, y=<locYYYY>.` and paths as
//! sequences of `<locYYYY><locXXXX>` token pairs, one pair per waypoint,
//! with 1024 discrete location tokens covering normalized coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Number of discrete location tokens.
pub const LOC_BINS: u16 = 1024;

/// Map a normalized coordinate to its token index.
pub fn encode_loc(value: f64) -> Result<u16> {
    if !(0.0..=1.0).contains(&value) {
        return Err(CoreError::InvalidParam(format!(
            "loc value {value} outside [0, 1]"
        )));
    }
    Ok(((value * f64::from(LOC_BINS)).floor() as i64).clamp(0, i64::from(LOC_BINS) - 1) as u16)
}

/// Center of a token's bin.
pub fn decode_loc(index: u16) -> Result<f64> {
    if index >= LOC_BINS {
        return Err(CoreError::Parse(format!("<loc{index:04}> out of range")));
    }
    Ok((f64::from(index) + 0.5) / f64::from(LOC_BINS))
}

/// A navigation goal given in world or pixel coordinates, with its prompt.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoalSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixel: Option<(f64, f64)>,
    pub prompt: String,
}

impl GoalSpec {
    pub fn from_pixel(u: f64, v: f64) -> Result<Self> {
        Ok(Self {
            world: None,
            pixel: Some((u, v)),
            prompt: format_goal_prompt(u, v)?,
        })
    }
}

/// `Navigate to x=<locXXXX>, y=<locYYYY>.` for a normalized pixel goal.
pub fn format_goal_prompt(u: f64, v: f64) -> Result<String> {
    let x = encode_loc(u)?;
    let y = encode_loc(v)?;
    Ok(format!("Navigate to x=<loc{x:04}>, y=<loc{y:04}>."))
}

/// Parse a goal prompt back to its (x, y) token indices.
pub fn parse_goal_prompt(s: &str) -> Result<(u16, u16)> {
    let rest = s
        .strip_prefix("Navigate to x=")
        .ok_or_else(|| CoreError::Parse(format!("missing prompt prefix in {s:?}")))?;
    let (x_tok, rest) = take_token(rest)?;
    let rest = rest
        .strip_prefix(", y=")
        .ok_or_else(|| CoreError::Parse(format!("missing `, y=` separator in {s:?}")))?;
    let (y_tok, rest) = take_token(rest)?;
    if rest != "." {
        return Err(CoreError::Parse(format!("trailing content {rest:?} after goal prompt")));
    }
    Ok((x_tok, y_tok))
}

/// Serialize waypoints as `<locYYYY><locXXXX>` pairs.
pub fn format_path_string(points: &[(f64, f64)]) -> Result<String> {
    let mut out = String::with_capacity(points.len() * 18);
    for &(u, v) in points {
        let x = encode_loc(u)?;
        let y = encode_loc(v)?;
        out.push_str(&format!("<loc{y:04}><loc{x:04}>"));
    }
    Ok(out)
}

/// Parse a path string into decoded pixel points.
///
/// Rejects malformed tokens, out-of-range indices, and odd token counts,
/// naming the offending token.
pub fn parse_path_string(s: &str) -> Result<Vec<(f64, f64)>> {
    let mut tokens = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let (tok, tail) = take_token(rest)?;
        tokens.push(tok);
        rest = tail;
    }
    if tokens.len() % 2 != 0 {
        return Err(CoreError::Parse(format!(
            "odd token count: trailing <loc{:04}> has no partner",
            tokens[tokens.len() - 1]
        )));
    }
    tokens
        .chunks(2)
        .map(|pair| {
            let (y, x) = (pair[0], pair[1]);
            Ok((decode_loc(x)?, decode_loc(y)?))
        })
        .collect()
}

/// Consume one `<locNNNN>` token from the front of the input.
fn take_token(s: &str) -> Result<(u16, &str)> {
    let body = s
        .strip_prefix("<loc")
        .ok_or_else(|| CoreError::Parse(format!("expected <locNNNN> at {:?}", head(s))))?;
    if body.len() < 5 || !body.is_char_boundary(4) {
        return Err(CoreError::Parse(format!("truncated token at {:?}", head(s))));
    }
    let digits = &body[..4];
    let rest = body[4..]
        .strip_prefix('>')
        .ok_or_else(|| CoreError::Parse(format!("unterminated token <loc{digits}")))?;
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(CoreError::Parse(format!("non-numeric token <loc{digits}>")));
    }
    let index: u16 = digits
        .parse()
        .map_err(|_| CoreError::Parse(format!("bad token <loc{digits}>")))?;
    if index >= LOC_BINS {
        return Err(CoreError::Parse(format!("<loc{index:04}> out of range")));
    }
    Ok((index, rest))
}

fn head(s: &str) -> &str {
    &s[..s.len().min(12)]
}
