//! Benchmark records, shifted geometric means and performance profiles.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{SolveResult, Status};

/// Default shift of the shifted geometric mean (seconds).
pub const DEFAULT_SHIFT: f64 = 1.0;

/// One (problem, solver) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub problem: String,
    pub solver: String,
    /// Seconds.
    pub runtime: f64,
    pub status: Status,
    pub objective: f64,
    pub prim_res: f64,
    pub dual_res: f64,
}

impl BenchRecord {
    pub fn from_result(problem: impl Into<String>, solver: impl Into<String>, r: &SolveResult) -> Self {
        Self {
            problem: problem.into(),
            solver: solver.into(),
            runtime: r.info.run_time,
            status: r.status,
            objective: r.objective,
            prim_res: r.prim_res,
            dual_res: r.dual_res,
        }
    }

    /// Solved, or infeasibility correctly certified.
    pub fn succeeded(&self) -> bool {
        self.status.is_conclusive()
    }
}

/// Writes records as CSV with header `problem,solver,runtime,status,objective,prim_res,dual_res`.
pub fn write_records<W: Write>(w: W, records: &[BenchRecord]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads records written by [`write_records`].
pub fn read_records<R: Read>(r: R) -> Result<Vec<BenchRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (i, rec) in rd.deserialize().enumerate() {
        out.push(rec.map_err(|e: csv::Error| Error::Parse { line: i + 2, msg: e.to_string() })?);
    }
    Ok(out)
}

/// Shifted geometric mean `exp(mean(ln(t + ζ))) − ζ`, evaluated in log space.
pub fn sgm(times: &[f64], shift: f64) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::Empty("no runtimes".into()));
    }
    if !(shift > 0.0 && shift.is_finite()) {
        return Err(Error::InvalidProblem(format!("shift must be positive, got {shift}")));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidProblem(format!("runtime {t} is not a finite nonnegative number")));
    }
    let mean = times.iter().map(|t| (t + shift).ln()).sum::<f64>() / times.len() as f64;
    Ok(mean.exp() - shift)
}

/// Runtime used for statistics: failed runs count as the time limit.
pub fn effective_runtime(r: &BenchRecord, time_limit: f64) -> f64 {
    if r.succeeded() {
        r.runtime
    } else {
        time_limit
    }
}

/// Shifted geometric mean per solver, with failures set to `time_limit`.
pub fn sgm_by_solver(records: &[BenchRecord], shift: f64, time_limit: f64) -> Result<BTreeMap<String, f64>> {
    let mut by: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records {
        by.entry(r.solver.clone()).or_default().push(effective_runtime(r, time_limit));
    }
    if by.is_empty() {
        return Err(Error::Empty("no records".into()));
    }
    by.into_iter().map(|(s, t)| Ok((s, sgm(&t, shift)?))).collect()
}

/// Step function `q_s(f)` of one solver, as breakpoints `(f, q)` sorted by `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver: String,
    pub breakpoints: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// `q_s(f)`: the fraction of problems with ratio `≤ f`.
    pub fn value_at(&self, f: f64) -> f64 {
        self.breakpoints.iter().take_while(|(b, _)| *b <= f).last().map_or(0.0, |(_, q)| *q)
    }
}

/// Performance profile of a set of solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceProfile {
    pub curves: Vec<ProfileCurve>,
    /// Problems solved by no solver (left out of `|P|`).
    pub excluded: Vec<String>,
    /// Number of problems counted.
    pub problems: usize,
}

/// Performance ratios `r_{s,p} = t_{s,p} / min_s t_{s,p}` (`∞` on failure)
/// and the profiles `q_s(f) = #{p : r_{s,p} ≤ f}/|P|`.
///
/// Every (solver, problem) pair must be present exactly once.  Problems no
/// solver succeeded on are excluded and listed in `excluded`.
pub fn performance_profile(records: &[BenchRecord]) -> Result<PerformanceProfile> {
    let solvers: BTreeSet<&str> = records.iter().map(|r| r.solver.as_str()).collect();
    let problems: BTreeSet<&str> = records.iter().map(|r| r.problem.as_str()).collect();
    if solvers.is_empty() {
        return Err(Error::Empty("no records".into()));
    }
    let mut table: BTreeMap<(&str, &str), &BenchRecord> = BTreeMap::new();
    for r in records {
        if !(r.runtime >= 0.0) {
            return Err(Error::InvalidProblem(format!("negative runtime for {}/{}", r.solver, r.problem)));
        }
        if table.insert((r.solver.as_str(), r.problem.as_str()), r).is_some() {
            return Err(Error::InvalidProblem(format!("duplicate record for {}/{}", r.solver, r.problem)));
        }
    }
    let mut excluded = Vec::new();
    let mut ratios: BTreeMap<&str, Vec<f64>> = solvers.iter().map(|s| (*s, Vec::new())).collect();
    for p in &problems {
        let mut best = f64::INFINITY;
        for s in &solvers {
            let r = table
                .get(&(*s, *p))
                .ok_or_else(|| Error::InvalidProblem(format!("missing record for solver {s} on {p}")))?;
            if r.succeeded() {
                best = best.min(r.runtime);
            }
        }
        if best == f64::INFINITY {
            excluded.push(p.to_string());
            continue;
        }
        for s in &solvers {
            let r = table[&(*s, *p)];
            let ratio = if !r.succeeded() {
                f64::INFINITY
            } else if best == 0.0 {
                if r.runtime == 0.0 { 1.0 } else { f64::INFINITY }
            } else {
                r.runtime / best
            };
            ratios.get_mut(s).expect("solver key").push(ratio);
        }
    }
    let np = problems.len() - excluded.len();
    let curves = ratios
        .into_iter()
        .map(|(s, mut r)| {
            r.retain(|v| v.is_finite());
            r.sort_by(f64::total_cmp);
            let mut breakpoints: Vec<(f64, f64)> = Vec::new();
            for (i, v) in r.iter().enumerate() {
                let q = (i + 1) as f64 / np as f64;
                match breakpoints.last_mut() {
                    Some(last) if last.0 == *v => last.1 = q,
                    _ => breakpoints.push((*v, q)),
                }
            }
            ProfileCurve { solver: s.to_string(), breakpoints }
        })
        .collect();
    Ok(PerformanceProfile { curves, excluded, problems: np })
}

/// Writes profile breakpoints as CSV `solver,f,q`.
pub fn write_profile<W: Write>(w: W, profile: &PerformanceProfile) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["solver", "f", "q"]).map_err(|e| Error::Io(e.to_string()))?;
    for c in &profile.curves {
        for (f, q) in &c.breakpoints {
            wr.write_record([c.solver.clone(), format!("{f:?}"), format!("{q:?}")])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    wr.flush()?;
    Ok(())
}
