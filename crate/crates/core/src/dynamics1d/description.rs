use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::scalar::{format_exact, Exact};
use super::{Homeo1D, MapError, Orientation, Space};

/// The JSON form of a map:
/// `{"space": "interval", "orientation": "preserving", "breakpoints": [["0","0"], ...]}`.
///
/// Coordinates may be JSON numbers or strings (`"0.25"`, `"-1.5"`, `"1/3"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDescription {
    pub space: Space,
    #[serde(default = "preserving")]
    pub orientation: Orientation,
    pub breakpoints: Vec<[Value; 2]>,
}

fn preserving() -> Orientation {
    Orientation::Preserving
}

/// Parse one coordinate into an exact rational.
pub fn parse_coordinate(v: &Value) -> Result<Exact, MapError> {
    match v {
        Value::String(s) => parse_str(s.trim()),
        // serde_json prints floats in their shortest round-trip form.
        Value::Number(n) => parse_str(&n.to_string()),
        other => Err(MapError::Parse(format!("coordinate {other} is not a number"))),
    }
}

fn parse_str(s: &str) -> Result<Exact, MapError> {
    let bad = || MapError::Parse(format!("cannot read coordinate {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Exact::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int}{frac}");
    let num: i128 = if all.is_empty() {
        0
    } else {
        all.parse().map_err(|_| bad())?
    };
    let scale = exp - frac.len() as i32;
    if scale.unsigned_abs() > 30 {
        return Err(bad());
    }
    let ten = 10i128.pow(scale.unsigned_abs());
    let v = if scale >= 0 {
        Exact::from_integer(num.checked_mul(ten).ok_or_else(bad)?)
    } else {
        Exact::new(num, ten)
    };
    Ok(if neg { -v } else { v })
}

impl MapDescription {
    pub fn from_json(text: &str) -> Result<Self, MapError> {
        serde_json::from_str(text).map_err(|e| MapError::Parse(e.to_string()))
    }

    /// Build the map; structural checks only, see [`Homeo1D::validate`].
    pub fn build(&self) -> Result<Homeo1D, MapError> {
        let mut pts = Vec::with_capacity(self.breakpoints.len());
        for [x, y] in &self.breakpoints {
            pts.push((parse_coordinate(x)?, parse_coordinate(y)?));
        }
        Homeo1D::new_exact(self.space, self.orientation, pts)
    }

    /// Build and validate.
    pub fn build_checked(&self) -> Result<Homeo1D, MapError> {
        let f = self.build()?;
        f.validate().map_err(MapError::Invalid)?;
        Ok(f)
    }

    /// Description of an existing map, using the exact source coordinates when available.
    pub fn of(f: &Homeo1D) -> Self {
        let breakpoints = match f.exact_breakpoints() {
            Some(bp) => bp
                .iter()
                .map(|(x, y)| [Value::String(format_exact(x)), Value::String(format_exact(y))])
                .collect(),
            None => f.breakpoints().map(|(x, y)| [Value::from(x), Value::from(y)]).collect(),
        };
        MapDescription {
            space: f.space(),
            orientation: f.orientation(),
            breakpoints,
        }
    }
}
