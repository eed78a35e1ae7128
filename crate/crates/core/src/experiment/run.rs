use rayon::prelude::*;
use std::time::Instant;

use super::report::{Check, Eq2Result, Provenance, Report, Row, VerdictResult};
use super::setup::{
    base_letters, build_cloud, continuum_letters, restrict_map, symmetric_letters, usable_power, Budget, Restrict,
    Wandering,
};
use super::{ExperimentConfig, ExperimentError, Method, Target};
use crate::coding::{
    check_singular, eq2_condition, local_entropy, relative_entropy, word_set, Family, LetterRegion, SingularityVerdict,
};
use crate::dynamics1d::{Homeo1D, Space};
use crate::entropy::{estimate_hpol, DynSystem, EstimateOptions};
use crate::hyperspace::{HyperPoint, Region, StateSpace};

/// One target on one cloud, by one or both routes.
struct Job {
    target: String,
    expected: Option<usize>,
    sys: DynSystem,
    region: Region,
    restrict: Restrict,
    budget: Budget,
    method: Method,
    letters: Vec<LetterRegion>,
    /// Check the quadratic growth condition on the two letters.
    eq2: bool,
    local: Option<(Vec<HyperPoint>, Vec<f64>)>,
}

#[derive(Default)]
struct JobOut {
    rows: Vec<Row>,
    checks: Vec<Check>,
    eq2: Vec<Eq2Result>,
    words: Vec<(String, usize, Vec<String>)>,
    local: Option<crate::coding::LocalEntropy>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    method: Method,
}

impl Ctx<'_> {
    fn budget(&self, b: Budget) -> Budget {
        b.with_overrides(
            self.cfg.resolution,
            self.cfg.n_list.as_ref(),
            self.cfg.eps_list.as_ref(),
            self.cfg.phases,
        )
    }

    fn row(&self, job: &Job, method: Method, cloud_size: usize, est: crate::entropy::EntropyEstimate) -> Row {
        let coding = method == Method::Coding;
        let tolerance = job.expected.map(|e| self.cfg.tolerances.band(e, coding));
        let pass = job
            .expected
            .zip(tolerance)
            .map(|(e, t)| (est.value - e as f64).abs() <= t);
        Row {
            target: job.target.clone(),
            method,
            expected: job.expected,
            tolerance,
            value: est.value,
            pass,
            cloud_size,
            budget: job.budget.clone(),
            letters: if coding { job.letters.clone() } else { Vec::new() },
            estimate: est,
        }
    }

    fn execute(&self, job: &Job) -> Result<JobOut, ExperimentError> {
        let cloud = build_cloud(&job.sys, job.region, job.restrict, &job.budget)?;
        log::info!("{}: {} cloud points", job.target, cloud.len());
        let mut out = JobOut::default();
        let b = &job.budget;
        if job.method.separated() {
            let opts = EstimateOptions {
                seed: self.cfg.seed,
                ..EstimateOptions::default()
            };
            let est = estimate_hpol(&job.sys, &cloud, &b.n_list, &b.eps_list, &opts)?;
            out.rows.push(self.row(job, Method::Separated, cloud.len(), est));
        }
        if job.method.coding() && !job.letters.is_empty() {
            let fam = Family::new(&job.sys, job.letters.clone())?;
            let est = relative_entropy(&job.sys, &fam, &cloud, &b.n_list, 0.9)?;
            if job.eq2 {
                let (y1, y2) = (&job.letters[0], &job.letters[1]);
                let horizon = b.horizon();
                let l = eq2_condition(&job.sys, y1, y2, &cloud, horizon)?;
                if let Some(l) = l {
                    out.checks.push(quadratic_check(&job.target, l, &est));
                }
                out.eq2.push(Eq2Result {
                    target: job.target.clone(),
                    y1: y1.clone(),
                    y2: y2.clone(),
                    horizon,
                    l,
                });
            }
            if self.cfg.output.words.is_some() {
                let n = b.n_list[0];
                let ws = word_set(&job.sys, &fam, &cloud, n)?;
                out.words
                    .push((job.target.clone(), n, ws.iter().map(|w| w.to_string()).collect()));
            }
            out.rows.push(self.row(job, Method::Coding, cloud.len(), est));
        }
        if let Some((centers, radii)) = &job.local {
            out.local = Some(local_entropy(
                &job.sys,
                centers,
                &cloud,
                radii,
                &b.n_list,
                self.cfg.tolerances.agreement,
            )?);
        }
        Ok(out)
    }
}

/// Word counts against the lower bound `Σ_{m<n-L} (n - L - m)` that the
/// growth condition forces, for every measured `n ≥ L + 2`.
fn quadratic_check(target: &str, l: usize, est: &crate::entropy::EntropyEstimate) -> Check {
    let mut worst = None;
    for c in &est.counts {
        if c.n < l + 2 {
            continue;
        }
        let k = c.n - l;
        let bound = k * (k + 1) / 2;
        if c.count < bound && worst.is_none() {
            worst = Some(format!("n={} count={} bound={bound}", c.n, c.count));
        }
    }
    Check {
        name: format!("quadratic bound {target}"),
        pass: worst.is_none(),
        detail: worst.unwrap_or_else(|| format!("L={l}, word counts meet the bound at every measured n")),
    }
}

fn run_jobs(ctx: &Ctx, jobs: &[Job]) -> Result<Vec<JobOut>, ExperimentError> {
    jobs.par_iter().map(|j| ctx.execute(j)).collect()
}

fn sys(f: &Homeo1D, kind: StateSpace) -> Result<DynSystem, ExperimentError> {
    Ok(DynSystem::new(f.clone(), kind)?)
}

fn base_job(ctx: &Ctx, f: &Homeo1D) -> Result<Job, ExperimentError> {
    let space = f.space();
    Ok(Job {
        target: "f".into(),
        expected: Some(1),
        sys: sys(f, StateSpace::Base(space))?,
        region: Region::Base,
        restrict: Restrict::All,
        budget: ctx.budget(Budget::base()),
        method: ctx.method,
        letters: base_letters(f),
        eq2: false,
        local: None,
    })
}

/// `f^{*k}` on `k`-point sets. Interval maps with extra fixed points are cut
/// down to `[0, p1]`; circle maps go through their first wandering interval.
fn symmetric_job(ctx: &Ctx, f: &Homeo1D, k: usize, label: String) -> Result<(Job, Option<String>), ExperimentError> {
    let (g, note) = match f.space() {
        Space::Interval => (f.clone(), None),
        Space::Circle => {
            let w = Wandering::all(f)[0];
            let g = restrict_map(f, w.lo, w.hi)?;
            (g, Some(format!("{label}: interval reduction to [{}, {}]", w.lo, w.hi)))
        }
    };
    let fixed = g.fixed_points();
    let w = Wandering::all(&g)[0];
    // scales shrink with the restricted interval, as for the rescaled map
    let (restrict, scale, note) = if fixed.len() > 2 {
        (
            Restrict::Span(0.0, w.hi),
            w.hi,
            note.or_else(|| Some(format!("{label}: clouds restricted to [0, {}]", w.hi))),
        )
    } else {
        (Restrict::All, 1.0, note)
    };
    Ok((
        Job {
            target: label,
            expected: Some(k),
            sys: sys(&g, StateSpace::Symmetric(Space::Interval, k))?,
            region: Region::AkStrict { k },
            restrict,
            budget: ctx.budget(Budget::symmetric(k)).scaled(scale),
            method: ctx.method,
            letters: symmetric_letters(&w, k),
            eq2: false,
            local: None,
        },
        note,
    ))
}

/// `C(f)` on the separated route as the largest of its invariant pieces: the
/// arcs `A` and `B` seen from the only fixed point of a circle map, otherwise
/// the intervals or arcs `D_ij` running from the closure of one wandering
/// interval to another. Each piece gets scales proportional to its shorter
/// wandering interval. With a single piece the coding route shares its cloud;
/// otherwise it runs on the whole space with letters in the first wandering
/// interval.
fn continuum_jobs(ctx: &Ctx, f: &Homeo1D) -> Result<(Vec<Job>, Option<String>), ExperimentError> {
    let space = f.space();
    let fixed = f.fixed_points();
    let ws = Wandering::all(f);
    let kind = StateSpace::Continuum(space);
    let len = |w: &Wandering| w.hi - w.lo;
    let (case, pieces): (Option<String>, Vec<(String, Region, Restrict, f64)>) = match space {
        Space::Interval => {
            let mut v = Vec::new();
            for (i, wi) in ws.iter().enumerate() {
                for (j, wj) in ws.iter().enumerate().skip(i) {
                    let restrict = if ws.len() == 1 {
                        Restrict::All
                    } else {
                        Restrict::Ends((wi.lo, wi.hi), (wj.lo, wj.hi))
                    };
                    let label = format!("C(f)|D{}{}", i + 1, j + 1);
                    v.push((label, Region::Triangle, restrict, len(wi).min(len(wj))));
                }
            }
            (None, v)
        }
        Space::Circle if fixed.len() == 1 => {
            let a = fixed[0];
            let v = vec![
                (
                    "C(f)|A".into(),
                    Region::CircleA { a },
                    Restrict::Arcs(Region::CircleA { a }),
                    1.0,
                ),
                (
                    "C(f)|B".into(),
                    Region::CircleB { a },
                    Restrict::Arcs(Region::CircleB { a }),
                    1.0,
                ),
            ];
            (
                Some("one fixed point: C(f) split into the arc families A and B".into()),
                v,
            )
        }
        Space::Circle => {
            let mut v = Vec::new();
            for (i, wi) in ws.iter().enumerate() {
                for (j, wj) in ws.iter().enumerate() {
                    let ci = (wi.lo, wi.hi.rem_euclid(1.0));
                    let cj = (wj.lo, wj.hi.rem_euclid(1.0));
                    let region = Region::Dij { ci, cj };
                    let label = format!("C(f)|D{}{}", i + 1, j + 1);
                    v.push((label, region, Restrict::Arcs(region), len(wi).min(len(wj))));
                }
            }
            let case = if fixed.len() == 2 {
                "two fixed points: C(f) split into the products D_ij"
            } else {
                "three or more fixed points: C(f) split into the products D_ij"
            };
            (Some(case.into()), v)
        }
    };
    let (y1, y2) = continuum_letters(space, &ws[0]);
    let letters = vec![y1, y2];
    let mut jobs = Vec::new();
    if pieces.len() == 1 {
        let (_, region, restrict, scale) = pieces.into_iter().next().unwrap();
        jobs.push(Job {
            target: "C(f)".into(),
            expected: Some(2),
            sys: sys(f, kind)?,
            region,
            restrict,
            budget: ctx.budget(Budget::continuum(space)).scaled(scale),
            method: ctx.method,
            letters,
            eq2: true,
            local: None,
        });
        return Ok((jobs, case));
    }
    if ctx.method.separated() {
        for (label, region, restrict, scale) in pieces {
            jobs.push(Job {
                target: label,
                expected: Some(2),
                sys: sys(f, kind)?,
                region,
                restrict,
                budget: ctx.budget(Budget::continuum(space)).scaled(scale),
                method: Method::Separated,
                letters: Vec::new(),
                eq2: false,
                local: None,
            });
        }
    }
    if ctx.method.coding() {
        let region = match space {
            Space::Interval => Region::Triangle,
            Space::Circle => Region::CircleA { a: fixed[0] },
        };
        jobs.push(Job {
            target: "C(f)".into(),
            expected: Some(2),
            sys: sys(f, kind)?,
            region,
            restrict: Restrict::All,
            budget: ctx.budget(Budget::continuum(space)),
            method: Method::Coding,
            letters,
            eq2: true,
            local: None,
        });
    }
    Ok((jobs, case))
}

/// The separated value of `C(f)`: the largest piece, placed before the pieces.
fn insert_continuum_row(report: &mut Report) {
    if report.row("C(f)", Method::Separated).is_some() {
        return;
    }
    if let Some(row) = continuum_row(&report.rows) {
        let at = report
            .rows
            .iter()
            .position(|r| r.target.starts_with("C(f)"))
            .unwrap_or(0);
        report.rows.insert(at, row);
    }
}

fn continuum_row(rows: &[Row]) -> Option<Row> {
    let best = rows
        .iter()
        .filter(|r| r.target.starts_with("C(f)|") && r.method == Method::Separated)
        .max_by(|a, b| a.value.total_cmp(&b.value))?;
    let mut row = best.clone();
    row.target = "C(f)".into();
    Some(row)
}

/// The singular pair `[a, p]`, `[q, a]` and a pair of interior arcs.
fn circle_verdicts(f: &Homeo1D) -> Result<Vec<VerdictResult>, ExperimentError> {
    let s = sys(f, StateSpace::Continuum(Space::Circle))?;
    let a = f.fixed_points()[0];
    let arc = |u: f64, v: f64| HyperPoint::Arc {
        from: (a + u).rem_euclid(1.0),
        to: (a + v).rem_euclid(1.0),
    };
    let (m, horizon) = (50, 160);
    let pairs = [
        (
            "singular pair [a,p] [q,a]",
            LetterRegion::ball(arc(0.0, 0.3), 0.05),
            LetterRegion::ball(arc(0.7, 0.0), 0.05),
            "mutually-singular",
        ),
        (
            "interior arcs",
            LetterRegion::ball(arc(0.2, 0.4), 0.03),
            LetterRegion::ball(arc(0.6, 0.8), 0.03),
            "not-singular",
        ),
    ];
    let mut out = Vec::new();
    for (label, u1, u2, expect) in pairs {
        let verdict = check_singular(&s, &u1, &u2, m, horizon, None)?;
        out.push(VerdictResult {
            label: label.into(),
            pass: Some(verdict_name(&verdict) == expect),
            u1,
            u2,
            m,
            horizon,
            expect: Some(expect.into()),
            verdict,
        });
    }
    Ok(out)
}

fn verdict_name(v: &SingularityVerdict) -> &'static str {
    match v {
        SingularityVerdict::MutuallySingular { .. } => "mutually-singular",
        SingularityVerdict::NotSingular { .. } => "not-singular",
        SingularityVerdict::Inconclusive { .. } => "inconclusive",
    }
}

fn agreement_checks(ctx: &Ctx, rows: &[Row]) -> Vec<Check> {
    let tol = ctx.cfg.tolerances.agreement;
    let mut out = Vec::new();
    for c in rows.iter().filter(|r| r.method == Method::Coding) {
        if let Some(s) = rows
            .iter()
            .find(|r| r.method == Method::Separated && r.target == c.target)
        {
            let gap = (s.value - c.value).abs();
            out.push(Check {
                name: format!("routes agree {}", c.target),
                pass: gap <= tol,
                detail: format!(
                    "separated {:.3}, coding {:.3}, gap {gap:.3} (≤ {tol})",
                    s.value, c.value
                ),
            });
        }
    }
    out
}

/// Each rung at least the previous one minus its band, and within its band of `k`.
fn ladder_check(ctx: &Ctx, rows: &[&Row]) -> Check {
    let mut pass = true;
    let mut prev: Option<f64> = None;
    let mut parts = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let k = i + 1;
        let t = ctx.cfg.tolerances.band(k, false);
        pass &= r.value >= k as f64 - t;
        if let Some(p) = prev {
            pass &= r.value >= p - t;
        }
        prev = Some(r.value);
        parts.push(format!("{:.3}", r.value));
    }
    Check {
        name: "2^f ladder".into(),
        pass,
        detail: format!("f^*k lower bounds for k = 1..{}: {}", rows.len(), parts.join(" <= ")),
    }
}

struct Prepared {
    f: Homeo1D,
    provenance: Provenance,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, ExperimentError> {
    cfg.validate()?;
    let f0 = cfg.map.build_checked()?;
    let (f, power) = usable_power(&f0)?;
    let mut notes = Vec::new();
    if power > 1 {
        notes.push(format!(
            "estimators run on f^{power}; polynomial entropy is unchanged by powers"
        ));
    }
    Ok(Prepared {
        f,
        provenance: Provenance {
            seed: cfg.seed,
            config_hash: cfg.content_hash(),
            version: env!("CARGO_PKG_VERSION").into(),
            power,
            notes,
        },
    })
}

fn finish(cfg: &ExperimentConfig, provenance: Provenance, outs: Vec<JobOut>, started: Instant) -> Report {
    let mut report = Report {
        config: cfg.clone(),
        provenance,
        rows: Vec::new(),
        checks: Vec::new(),
        verdicts: Vec::new(),
        eq2: Vec::new(),
        local: None,
        passed: false,
        wall_time: 0.0,
        words: Vec::new(),
    };
    for o in outs {
        report.rows.extend(o.rows);
        report.checks.extend(o.checks);
        report.eq2.extend(o.eq2);
        report.words.extend(o.words);
        if o.local.is_some() {
            report.local = o.local;
        }
    }
    report.wall_time = started.elapsed().as_secs_f64();
    report
}

fn local_spec(cfg: &ExperimentConfig) -> Option<(Vec<HyperPoint>, Vec<f64>)> {
    let centers = cfg.centers.as_ref()?;
    let radii = cfg.radii.clone()?;
    // validated already
    let centers = centers.iter().filter_map(|c| c.parse().ok()).collect();
    Some((centers, radii))
}

/// Run the configured target and method.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, ExperimentError> {
    let started = Instant::now();
    let Prepared { f, mut provenance } = prepare(cfg)?;
    let ctx = Ctx {
        cfg,
        method: cfg.method,
    };
    let mut jobs = Vec::new();
    let mut ladder = false;
    match cfg.target {
        Target::Base => jobs.push(base_job(&ctx, &f)?),
        Target::Continuum => {
            let (js, case) = continuum_jobs(&ctx, &f)?;
            provenance.notes.extend(case);
            jobs.extend(js);
        }
        Target::SymmetricK(k) => {
            let (job, note) = symmetric_job(&ctx, &f, k, format!("f^*{k}"))?;
            provenance.notes.extend(note);
            jobs.push(job);
        }
        Target::PowerLowerBounds(k_max) => {
            ladder = true;
            let ctx = Ctx {
                cfg,
                method: Method::Separated,
            };
            for k in 1..=k_max {
                let (job, note) = symmetric_job(&ctx, &f, k, format!("2^f>=f^*{k}"))?;
                provenance.notes.extend(note);
                jobs.push(job);
            }
        }
    }
    if let Some(first) = jobs.first_mut() {
        first.local = local_spec(cfg);
    }
    let outs = run_jobs(&ctx, &jobs)?;
    let mut report = finish(cfg, provenance, outs, started);
    insert_continuum_row(&mut report);
    if ladder {
        let rungs: Vec<&Row> = report.rows.iter().collect();
        let c = ladder_check(&ctx, &rungs);
        report.checks.push(c);
    }
    let agree = agreement_checks(&ctx, &report.rows);
    report.checks.extend(agree);
    report.settle();
    report.wall_time = started.elapsed().as_secs_f64();
    Ok(report)
}

/// Interval maps: `f`, `C(f)` and `f^{*k}` for `k ≤ k_max`, with the ladder
/// read off the symmetric products.
pub fn reproduce_theorem_a(cfg: &ExperimentConfig, k_max: usize) -> Result<Report, ExperimentError> {
    let started = Instant::now();
    if k_max == 0 || k_max > 4 {
        return Err(ExperimentError::Field {
            path: "kmax".into(),
            message: "must be between 1 and 4".into(),
        });
    }
    let Prepared { f, mut provenance } = prepare(cfg)?;
    if f.space() != Space::Interval {
        return Err(ExperimentError::Field {
            path: "map.space".into(),
            message: "this harness takes interval maps".into(),
        });
    }
    let ctx = Ctx {
        cfg,
        method: cfg.method,
    };
    let mut jobs = vec![base_job(&ctx, &f)?];
    let (cjobs, _) = continuum_jobs(&ctx, &f)?;
    jobs.extend(cjobs);
    for k in 1..=k_max {
        let (job, note) = symmetric_job(&ctx, &f, k, format!("f^*{k}"))?;
        if k == 1 {
            provenance.notes.extend(note);
        }
        jobs.push(job);
    }
    let outs = run_jobs(&ctx, &jobs)?;
    let mut report = finish(cfg, provenance, outs, started);
    insert_continuum_row(&mut report);
    symmetric_tail(&ctx, &mut report, k_max);
    report.settle();
    report.wall_time = started.elapsed().as_secs_f64();
    Ok(report)
}

fn symmetric_tail(ctx: &Ctx, report: &mut Report, k_max: usize) {
    if ctx.method.separated() {
        let rungs: Vec<&Row> = (1..=k_max)
            .filter_map(|k| report.row(&format!("f^*{k}"), Method::Separated))
            .collect();
        let c = ladder_check(ctx, &rungs);
        report.checks.push(c);
    }
    let agree = agreement_checks(ctx, &report.rows);
    report.checks.extend(agree);
}

/// Circle maps: `f`, `C(f)` by its invariant pieces, singular arcs and the
/// growth condition, and `f^{*k}` through the interval reduction.
pub fn reproduce_theorem_b(cfg: &ExperimentConfig, k_max: usize) -> Result<Report, ExperimentError> {
    let started = Instant::now();
    if k_max == 0 || k_max > 4 {
        return Err(ExperimentError::Field {
            path: "kmax".into(),
            message: "must be between 1 and 4".into(),
        });
    }
    let Prepared { f, mut provenance } = prepare(cfg)?;
    if f.space() != Space::Circle {
        return Err(ExperimentError::Field {
            path: "map.space".into(),
            message: "this harness takes circle maps".into(),
        });
    }
    let ctx = Ctx {
        cfg,
        method: cfg.method,
    };
    let mut jobs = vec![base_job(&ctx, &f)?];
    let (cjobs, case) = continuum_jobs(&ctx, &f)?;
    provenance.notes.extend(case);
    jobs.extend(cjobs);
    for k in 1..=k_max {
        let (job, note) = symmetric_job(&ctx, &f, k, format!("f^*{k}"))?;
        if k == 1 {
            provenance.notes.extend(note);
        }
        jobs.push(job);
    }
    let outs = run_jobs(&ctx, &jobs)?;
    let mut report = finish(cfg, provenance, outs, started);
    insert_continuum_row(&mut report);
    if f.fixed_points().len() == 1 {
        report.verdicts = circle_verdicts(&f)?;
    }
    symmetric_tail(&ctx, &mut report, k_max);
    report.settle();
    report.wall_time = started.elapsed().as_secs_f64();
    Ok(report)
}

/// The configured singularity query, with the map prepared as for [`run`].
pub fn run_singular(cfg: &ExperimentConfig) -> Result<VerdictResult, ExperimentError> {
    let q = cfg.singular.as_ref().ok_or_else(|| ExperimentError::Field {
        path: "singular".into(),
        message: "required for this command".into(),
    })?;
    let Prepared { f, .. } = prepare(cfg)?;
    let kind = match (&q.u1, &q.u2) {
        (LetterRegion::Span { .. }, _) => StateSpace::Base(f.space()),
        (LetterRegion::Ball { center, .. }, _) => match center {
            HyperPoint::Finite(v) if v.len() == 1 => StateSpace::Base(f.space()),
            HyperPoint::Finite(v) => StateSpace::Symmetric(f.space(), v.len()),
            _ => StateSpace::Continuum(f.space()),
        },
        (LetterRegion::Box { lo, .. }, _) => match lo.len() {
            1 => StateSpace::Base(f.space()),
            _ => StateSpace::Continuum(f.space()),
        },
    };
    let s = sys(&f, kind)?;
    let verdict = check_singular(&s, &q.u1, &q.u2, q.m, q.horizon, None)?;
    Ok(VerdictResult {
        label: "query".into(),
        pass: q.expect.as_ref().map(|e| e == verdict_name(&verdict)),
        u1: q.u1.clone(),
        u2: q.u2.clone(),
        m: q.m,
        horizon: q.horizon,
        expect: q.expect.clone(),
        verdict,
    })
}
