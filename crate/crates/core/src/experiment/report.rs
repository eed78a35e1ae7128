use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

use super::setup::Budget;
use super::{ExperimentConfig, ExperimentError, Method};
use crate::coding::{LetterRegion, LocalEntropy, SingularityVerdict};
use crate::entropy::EntropyEstimate;

/// One estimate of one target by one route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// `f`, `C(f)`, `f^*k`, `C(f)|A`, `2^f>=f^*k`, …
    pub target: String,
    pub method: Method,
    pub expected: Option<usize>,
    pub tolerance: Option<f64>,
    pub value: f64,
    pub pass: Option<bool>,
    pub cloud_size: usize,
    pub budget: Budget,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub letters: Vec<LetterRegion>,
    pub estimate: EntropyEstimate,
}

/// A pass/fail statement that is not a single slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictResult {
    pub label: String,
    pub u1: LetterRegion,
    pub u2: LetterRegion,
    pub m: usize,
    pub horizon: usize,
    pub expect: Option<String>,
    pub verdict: SingularityVerdict,
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eq2Result {
    pub target: String,
    pub y1: LetterRegion,
    pub y2: LetterRegion,
    pub horizon: usize,
    pub l: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
    /// The estimators ran on `f^power`.
    pub power: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub verdicts: Vec<VerdictResult>,
    pub eq2: Vec<Eq2Result>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalEntropy>,
    pub passed: bool,
    /// Kept out of the JSON so that reruns are byte-identical.
    #[serde(skip)]
    pub wall_time: f64,
    #[serde(skip)]
    pub words: Vec<(String, usize, Vec<String>)>,
}

impl Report {
    pub(crate) fn settle(&mut self) {
        self.passed = self.rows.iter().all(|r| r.pass != Some(false))
            && self.checks.iter().all(|c| c.pass)
            && self.verdicts.iter().all(|v| v.pass != Some(false));
    }

    pub fn row(&self, target: &str, method: Method) -> Option<&Row> {
        self.rows.iter().find(|r| r.target == target && r.method == method)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn write_counts<W: Write>(&self, w: W) -> Result<(), ExperimentError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["target", "method", "eps", "n", "count", "cloud_size", "saturated"])?;
        for r in &self.rows {
            let method = match r.method {
                Method::Coding => "coding",
                _ => "separated",
            };
            for c in &r.estimate.counts {
                wr.write_record([
                    r.target.clone(),
                    method.to_string(),
                    c.eps.to_string(),
                    c.n.to_string(),
                    c.count.to_string(),
                    c.cloud_size.to_string(),
                    c.saturated.to_string(),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// `report.json`, `counts.csv` and, when configured, `words.txt` under `dir`
    /// (default: the configured output directory, else the working directory).
    pub fn write(&self, dir: Option<&Path>) -> Result<(), ExperimentError> {
        let out = &self.config.output;
        let dir = dir
            .map(Path::to_path_buf)
            .or_else(|| out.dir.as_ref().map(Into::into))
            .unwrap_or_else(|| ".".into());
        fs::create_dir_all(&dir)?;
        fs::write(dir.join(&out.report), self.to_json() + "\n")?;
        self.write_counts(fs::File::create(dir.join(&out.counts))?)?;
        if let Some(words) = &out.words {
            let mut f = std::io::BufWriter::new(fs::File::create(dir.join(words))?);
            for (target, n, ws) in &self.words {
                writeln!(f, "# {target} n={n} words={}", ws.len())?;
                for w in ws {
                    writeln!(f, "{w}")?;
                }
            }
            f.flush()?;
        }
        Ok(())
    }

    /// Plain-text summary table.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let method = match r.method {
                Method::Coding => "coding",
                _ => "separated",
            };
            let expect = match (r.expected, r.tolerance) {
                (Some(e), Some(t)) => format!("{e} ± {t}"),
                _ => "-".into(),
            };
            let mark = match r.pass {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "",
            };
            s += &format!(
                "{:<14} {:<9} {:>7.3}  expect {:<10} {mark}\n",
                r.target, method, r.value, expect
            );
        }
        for c in &self.checks {
            s += &format!("{:<24} {}  {}\n", c.name, if c.pass { "ok" } else { "FAIL" }, c.detail);
        }
        for v in &self.verdicts {
            let got = match &v.verdict {
                SingularityVerdict::MutuallySingular { .. } => "mutually-singular",
                SingularityVerdict::NotSingular { .. } => "not-singular",
                SingularityVerdict::Inconclusive { .. } => "inconclusive",
            };
            let mark = match v.pass {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "",
            };
            s += &format!("{:<24} {got} {mark}\n", v.label);
        }
        for e in &self.eq2 {
            match e.l {
                Some(l) => s += &format!("growth condition {:<8} L = {l}\n", e.target),
                None => s += &format!("growth condition {:<8} not reached by {}\n", e.target, e.horizon),
            }
        }
        if let Some(l) = &self.local {
            let slopes: Vec<String> = l.estimates.iter().map(|e| format!("{:.3}", e.value)).collect();
            s += &format!(
                "local entropy            {:.3}  radii {:?}, slopes {}{}\n",
                l.value,
                l.radii,
                slopes.join(", "),
                if l.monotone { "" } else { " (not monotone)" }
            );
        }
        s += if self.passed {
            "all expected values met\n"
        } else {
            "some expected values missed\n"
        };
        s
    }
}
