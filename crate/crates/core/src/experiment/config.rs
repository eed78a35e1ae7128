use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentError;
use crate::coding::LetterRegion;
use crate::dynamics1d::MapDescription;
use crate::hyperspace::HyperPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Base,
    Continuum,
    SymmetricK(usize),
    /// Lower-bound ladder `f^{*1}, …, f^{*k_max}` for the full hyperspace.
    PowerLowerBounds(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Separated,
    Coding,
    Both,
}

impl Method {
    pub fn separated(self) -> bool {
        self != Method::Coding
    }

    pub fn coding(self) -> bool {
        self != Method::Separated
    }
}

/// Pass bands around the expected slopes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub slope_one: f64,
    pub slope_two: f64,
    pub slope_three: f64,
    /// Any expected slope of 4 or more.
    pub slope_higher: f64,
    pub coding_one: f64,
    pub coding_two: f64,
    /// Largest gap between the separated and coding estimates of one target.
    pub agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slope_one: 0.15,
            slope_two: 0.25,
            slope_three: 0.4,
            slope_higher: 0.5,
            coding_one: 0.1,
            coding_two: 0.2,
            agreement: 0.2,
        }
    }
}

impl Tolerances {
    pub fn band(&self, expected: usize, coding: bool) -> f64 {
        match (expected, coding) {
            (1, true) => self.coding_one,
            (2, true) => self.coding_two,
            (0 | 1, _) => self.slope_one,
            (2, _) => self.slope_two,
            (3, _) => self.slope_three,
            _ => self.slope_higher,
        }
    }
}

/// A singularity query, for the `singular` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularQuery {
    pub u1: LetterRegion,
    pub u2: LetterRegion,
    pub m: usize,
    pub horizon: usize,
    /// `"mutually-singular"` or `"not-singular"`; sets the exit status.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub dir: Option<String>,
    pub report: String,
    pub counts: String,
    /// Written only when set.
    pub words: Option<String>,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            dir: None,
            report: "report.json".into(),
            counts: "counts.csv".into(),
            words: None,
        }
    }
}

fn default_target() -> Target {
    Target::Base
}

fn default_method() -> Method {
    Method::Both
}

/// A declarative experiment. Unset cloud parameters fall back to per-target
/// budgets, see [`super::Budget`]. Scales and grid steps are relative to a
/// wandering interval of length 1: invariant pieces and restricted clouds
/// multiply them by the length of their shorter wandering interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub map: MapDescription,
    #[serde(default = "default_target")]
    pub target: Target,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    /// Lattice phases per wandering interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<usize>,
    /// Local entropy radii, decreasing; needs `centers`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<String>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular: Option<SingularQuery>,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn new(map: MapDescription, target: Target) -> Self {
        ExperimentConfig {
            map,
            target,
            method: Method::Both,
            resolution: None,
            n_list: None,
            eps_list: None,
            phases: None,
            radii: None,
            centers: None,
            seed: 0,
            tolerances: Tolerances::default(),
            singular: None,
            output: OutputPaths::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ExperimentError::Field {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-level checks; the map itself is checked when built.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let field = |path: String, message: &str| {
            Err(ExperimentError::Field {
                path,
                message: message.to_string(),
            })
        };
        match self.target {
            Target::SymmetricK(0) => return field("target.symmetric-k".into(), "k must be at least 1"),
            Target::PowerLowerBounds(0) => {
                return field("target.power-lower-bounds".into(), "k_max must be at least 1")
            }
            Target::SymmetricK(k) | Target::PowerLowerBounds(k) if k > 4 => {
                return field("target".into(), "k above 4 is not supported")
            }
            _ => {}
        }
        if let Some(r) = self.resolution {
            if !(r > 0.0) || r >= 1.0 {
                return field("resolution".into(), "must be in (0, 1)");
            }
        }
        if let Some(ns) = &self.n_list {
            if ns.is_empty() {
                return field("n_list".into(), "must not be empty");
            }
            if ns[0] == 0 {
                return field("n_list[0]".into(), "must be positive");
            }
            for i in 1..ns.len() {
                if ns[i] <= ns[i - 1] {
                    return field(format!("n_list[{i}]"), &format!("must exceed n_list[{}]", i - 1));
                }
            }
            if *ns.last().unwrap() > 1 << 14 {
                return field(
                    format!("n_list[{}]", ns.len() - 1),
                    "windows above 16384 are not supported",
                );
            }
        }
        if let Some(es) = &self.eps_list {
            if es.is_empty() {
                return field("eps_list".into(), "must not be empty");
            }
            if let Some(i) = es.iter().position(|&e| !(e > 0.0) || !e.is_finite()) {
                return field(format!("eps_list[{i}]"), "must be a positive number");
            }
        }
        if self.phases == Some(0) {
            return field("phases".into(), "must be at least 1");
        }
        match (&self.radii, &self.centers) {
            (Some(r), Some(c)) => {
                if r.is_empty() {
                    return field("radii".into(), "must not be empty");
                }
                for i in 1..r.len() {
                    if r[i] >= r[i - 1] {
                        return field(format!("radii[{i}]"), "radii must decrease");
                    }
                }
                if let Some(i) = r.iter().position(|&x| !(x > 0.0)) {
                    return field(format!("radii[{i}]"), "must be positive");
                }
                for (i, s) in c.iter().enumerate() {
                    if let Err(e) = s.parse::<HyperPoint>() {
                        return field(format!("centers[{i}]"), &e.to_string());
                    }
                }
            }
            (Some(_), None) => return field("centers".into(), "required when radii is set"),
            (None, Some(_)) => return field("radii".into(), "required when centers is set"),
            (None, None) => {}
        }
        let t = &self.tolerances;
        let bands = [
            ("slope_one", t.slope_one),
            ("slope_two", t.slope_two),
            ("slope_three", t.slope_three),
            ("slope_higher", t.slope_higher),
            ("coding_one", t.coding_one),
            ("coding_two", t.coding_two),
            ("agreement", t.agreement),
        ];
        if let Some((name, _)) = bands.iter().find(|(_, v)| !(*v >= 0.0)) {
            return field(format!("tolerances.{name}"), "must be non-negative");
        }
        if let Some(q) = &self.singular {
            if q.horizon == 0 {
                return field("singular.horizon".into(), "must be positive");
            }
            if let Some(e) = &q.expect {
                if e != "mutually-singular" && e != "not-singular" {
                    return field("singular.expect".into(), "must be mutually-singular or not-singular");
                }
            }
        }
        Ok(())
    }

    /// SHA-256 over the git blob framing of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let body = serde_json::to_string(self).expect("configs serialize");
        let mut h = Sha256::new();
        h.update(format!("blob {}\0", body.len()).as_bytes());
        h.update(body.as_bytes());
        format!("{:x}", h.finalize())
    }
}
