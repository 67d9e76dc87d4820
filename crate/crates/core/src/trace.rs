//! Run traces: one record per iteration plus the log of every archive pair,
//! with CSV output and the window counters built on top of them.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::dominance::Origin;
use crate::error::{Error, Result};
use crate::hypervolume::{hypervolume, ReferencePoint};
use crate::objective::{ForcingFunction, StepParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    SuccessfulSearch,
    SuccessfulPoll,
    Unsuccessful,
}

impl Status {
    pub fn is_success(&self) -> bool {
        !matches!(self, Status::Unsuccessful)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Status::SuccessfulSearch => "successful-search",
            Status::SuccessfulPoll => "successful-poll",
            Status::Unsuccessful => "unsuccessful",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "successful-search" => Ok(Status::SuccessfulSearch),
            "successful-poll" => Ok(Status::SuccessfulPoll),
            "unsuccessful" => Ok(Status::Unsuccessful),
            _ => Err(Error::Trace(format!("unknown status '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Direct multisearch with Pareto acceptance.
    Dms,
    /// Direct multisearch driven by the min-max acceptance rule.
    DmsMinMax,
    /// The single-iterate min-max direct search.
    MinMax,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Dms => "dms",
            SolverKind::DmsMinMax => "dms-minmax",
            SolverKind::MinMax => "minmax",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dms" => Ok(SolverKind::Dms),
            "dms-minmax" => Ok(SolverKind::DmsMinMax),
            "minmax" => Ok(SolverKind::MinMax),
            _ => Err(Error::Config(format!("unknown solver '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    AlphaMin,
    Criticality,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::MaxIterations => "max-iterations",
            StopReason::AlphaMin => "alpha-min",
            StopReason::Criticality => "criticality",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "max-iterations" => Ok(StopReason::MaxIterations),
            "alpha-min" => Ok(StopReason::AlphaMin),
            "criticality" => Ok(StopReason::Criticality),
            _ => Err(Error::Trace(format!("unknown stop reason '{s}'"))),
        }
    }
}

/// What happened at iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub status: Status,
    /// Id of the selected pair (the poll center).
    pub iterate_id: u64,
    pub center: Vec<f64>,
    pub center_value: Vec<f64>,
    pub alpha: f64,
    /// Acceptance margin used at this iteration.
    pub rho: f64,
    /// `F` evaluations spent in this iteration.
    pub evaluations: u64,
    pub poll_size: usize,
    pub search_size: usize,
    pub hi_before: Option<f64>,
    pub hi_after: Option<f64>,
    pub mu: Option<f64>,
    pub mu_d: Option<f64>,
    /// Archive size after the iteration.
    pub archive_size: usize,
    /// Tag of the poll set, empty when the poll step was skipped.
    pub directions: String,
    pub fx: Option<f64>,
    pub sum_alpha_sq: Option<f64>,
}

/// Lifetime of one archive pair: it belongs to `L_r` for
/// `created_at <= r < retired_at`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryLog {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub created_at: usize,
    pub retired_at: Option<usize>,
    pub stepsize: f64,
    pub origin: Origin,
    pub point: Vec<f64>,
    pub value: Vec<f64>,
}

impl EntryLog {
    pub fn alive_at(&self, r: usize) -> bool {
        self.created_at <= r && self.retired_at.is_none_or(|d| r < d)
    }

    /// Member of some `L_r` with `k0 <= r <= j1`.
    pub fn alive_in(&self, k0: usize, j1: usize) -> bool {
        self.created_at <= j1 && self.retired_at.is_none_or(|d| d > k0)
    }
}

/// Run parameters needed to re-check a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta {
    pub solver: SolverKind,
    pub problem: String,
    pub n: usize,
    pub m: usize,
    pub step: StepParams,
    pub forcing: Option<ForcingFunction>,
    /// Sufficient-decrease constant `c` of the min-max rule.
    pub decrease_c: Option<f64>,
    pub lipschitz_max: Option<f64>,
    pub f_min: Option<f64>,
    pub reference: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub x0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub meta: TraceMeta,
    pub records: Vec<IterationRecord>,
    pub entries: Vec<EntryLog>,
    pub evaluations: u64,
    pub stop: StopReason,
    /// `mu` at the iterate that triggered the stop, when tracked.
    pub final_mu: Option<f64>,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// First `k` with `mu_{k+1} <= epsilon`, for runs that stopped on the
    /// criticality test.
    pub fn k_epsilon(&self) -> Option<usize> {
        (self.stop == StopReason::Criticality).then(|| self.records.len().saturating_sub(1))
    }

    /// Index of the first unsuccessful iteration.
    pub fn first_unsuccessful(&self) -> Option<usize> {
        self.records.iter().position(|r| r.status == Status::Unsuccessful)
    }

    /// `[k0, j1]`: from the first unsuccessful iteration to the last
    /// iteration before the criticality stop. `None` when the run has no
    /// unsuccessful iteration before that point.
    pub fn measured_window(&self) -> Option<(usize, usize)> {
        let j1 = self.records.len().checked_sub(1)?;
        let k0 = self.first_unsuccessful()?;
        (k0 <= j1).then_some((k0, j1))
    }

    /// Live archive values at the start of iteration `r` (the list `L_r`).
    pub fn archive_values_at(&self, r: usize) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .filter(|e| e.alive_at(r))
            .map(|e| e.value.clone())
            .collect()
    }

    /// Fills `hi_before`/`hi_after` of every record using a single frozen
    /// reference point. Fails if any archive value exceeds it.
    pub fn fill_hypervolume(&mut self, reference: &ReferencePoint) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Trace("hypervolume needs the archive log".into()));
        }
        let mut born: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut died: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            born.entry(e.created_at).or_default().push(i);
            if let Some(d) = e.retired_at {
                died.entry(d).or_default().push(i);
            }
        }
        let mut live: BTreeMap<u64, &[f64]> = BTreeMap::new();
        for &i in born.get(&0).into_iter().flatten() {
            live.insert(self.entries[i].id, &self.entries[i].value);
        }
        let current = |live: &BTreeMap<u64, &[f64]>| -> Result<f64> {
            let vals: Vec<&[f64]> = live.values().copied().collect();
            hypervolume(&vals, reference)
        };
        let mut hi = current(&live)?;
        let mut filled = Vec::with_capacity(self.records.len());
        for rec in &self.records {
            let next = rec.k + 1;
            for &i in died.get(&next).into_iter().flatten() {
                live.remove(&self.entries[i].id);
            }
            for &i in born.get(&next).into_iter().flatten() {
                live.insert(self.entries[i].id, &self.entries[i].value);
            }
            let before = hi;
            if rec.status.is_success() {
                hi = current(&live)?;
            }
            filled.push((before, hi));
        }
        for (rec, (b, a)) in self.records.iter_mut().zip(filled) {
            rec.hi_before = Some(b);
            rec.hi_after = Some(a);
        }
        self.meta.reference = Some(reference.as_slice().to_vec());
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let meta = &self.meta;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        writeln!(w, "# solver = {}", meta.solver.as_str())?;
        writeln!(w, "# problem = {}", meta.problem)?;
        writeln!(w, "# n = {}", meta.n)?;
        writeln!(w, "# m = {}", meta.m)?;
        writeln!(w, "# alpha0 = {:e}", meta.step.alpha0())?;
        writeln!(w, "# beta1 = {:e}", meta.step.beta1())?;
        writeln!(w, "# beta2 = {:e}", meta.step.beta2())?;
        writeln!(w, "# gamma = {:e}", meta.step.gamma())?;
        writeln!(w, "# forcing_c = {}", opt(meta.forcing.map(|f| f.c())))?;
        writeln!(w, "# forcing_p = {}", opt(meta.forcing.map(|f| f.p())))?;
        writeln!(w, "# decrease_c = {}", opt(meta.decrease_c))?;
        writeln!(w, "# lipschitz_max = {}", opt(meta.lipschitz_max))?;
        writeln!(w, "# f_min = {}", opt(meta.f_min))?;
        writeln!(w, "# reference = {}", join(meta.reference.as_deref().unwrap_or(&[])))?;
        writeln!(w, "# epsilon = {}", opt(meta.epsilon))?;
        writeln!(w, "# x0 = {}", join(&meta.x0))?;
        writeln!(w, "# evaluations = {}", self.evaluations)?;
        writeln!(w, "# stop = {}", self.stop.as_str())?;
        writeln!(w, "# final_mu = {}", opt(self.final_mu))?;
        let mut wtr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = [
            "k",
            "status",
            "iterate_id",
            "alpha",
            "rho",
            "evaluations",
            "poll_size",
            "search_size",
            "hi_before",
            "hi_after",
            "mu",
            "mu_d",
            "archive_size",
            "directions",
            "fx",
            "sum_alpha_sq",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((1..=meta.n).map(|i| format!("x{i}")));
        header.extend((1..=meta.m).map(|i| format!("f{i}")));
        wtr.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.k.to_string(),
                r.status.as_str().to_string(),
                r.iterate_id.to_string(),
                format!("{:e}", r.alpha),
                format!("{:e}", r.rho),
                r.evaluations.to_string(),
                r.poll_size.to_string(),
                r.search_size.to_string(),
                opt(r.hi_before),
                opt(r.hi_after),
                opt(r.mu),
                opt(r.mu_d),
                r.archive_size.to_string(),
                r.directions.clone(),
                opt(r.fx),
                opt(r.sum_alpha_sq),
            ];
            row.extend(r.center.iter().map(|v| format!("{v:e}")));
            row.extend(r.center_value.iter().map(|v| format!("{v:e}")));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Every pair ever created, with its lifetime.
    pub fn write_entries_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = ["id", "parent_id", "created_at", "retired_at", "stepsize", "origin"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend((1..=self.meta.n).map(|i| format!("x{i}")));
        header.extend((1..=self.meta.m).map(|i| format!("f{i}")));
        wtr.write_record(&header)?;
        for e in &self.entries {
            let mut row = vec![
                e.id.to_string(),
                e.parent_id.map(|p| p.to_string()).unwrap_or_default(),
                e.created_at.to_string(),
                e.retired_at.map(|p| p.to_string()).unwrap_or_default(),
                format!("{:e}", e.stepsize),
                e.origin.as_str().to_string(),
            ];
            row.extend(e.point.iter().map(|v| format!("{v:e}")));
            row.extend(e.value.iter().map(|v| format!("{v:e}")));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// The list `L_k` at every `every`-th iteration and at the last one,
    /// rebuilt from entry lifetimes.
    pub fn write_snapshots_csv<W: Write>(&self, w: W, every: usize) -> Result<()> {
        if every == 0 {
            return Err(Error::Config("snapshot cadence must be positive".into()));
        }
        let mut wtr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = ["k", "id", "stepsize"].iter().map(|s| s.to_string()).collect();
        header.extend((1..=self.meta.n).map(|i| format!("x{i}")));
        header.extend((1..=self.meta.m).map(|i| format!("f{i}")));
        wtr.write_record(&header)?;
        let last = self.records.len().saturating_sub(1);
        let mut ks: Vec<usize> = (0..=last).step_by(every).collect();
        if ks.last() != Some(&last) {
            ks.push(last);
        }
        for k in ks {
            for e in self.entries.iter().filter(|e| e.alive_at(k)) {
                let mut row = vec![k.to_string(), e.id.to_string(), format!("{:e}", e.stepsize)];
                row.extend(e.point.iter().map(|v| format!("{v:e}")));
                row.extend(e.value.iter().map(|v| format!("{v:e}")));
                wtr.write_record(&row)?;
            }
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a trace written by [`RunTrace::write_csv`], optionally with the
    /// entry log from [`RunTrace::write_entries_csv`].
    pub fn read_csv<R: BufRead, E: BufRead>(trace: R, entries: Option<E>) -> Result<RunTrace> {
        let mut meta_lines = BTreeMap::new();
        let mut body = String::new();
        for line in trace.lines() {
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    meta_lines.insert(k.trim().to_string(), v.trim().to_string());
                }
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let get = |k: &str| -> Result<&str> {
            meta_lines
                .get(k)
                .map(|s| s.as_str())
                .ok_or_else(|| Error::Trace(format!("missing header field '{k}'")))
        };
        let num = |k: &str| -> Result<f64> { parse_f64(get(k)?) };
        let opt_num = |k: &str| -> Result<Option<f64>> { parse_opt(get(k)?) };
        let n: usize = get("n")?.parse().map_err(|_| Error::Trace("bad n".into()))?;
        let m: usize = get("m")?.parse().map_err(|_| Error::Trace("bad m".into()))?;
        let step = StepParams::new(num("alpha0")?, num("beta1")?, num("beta2")?, num("gamma")?)?;
        let forcing = match (opt_num("forcing_c")?, opt_num("forcing_p")?) {
            (Some(c), Some(p)) => Some(ForcingFunction::new(c, p)?),
            _ => None,
        };
        let reference = split_floats(get("reference")?)?;
        let meta = TraceMeta {
            solver: SolverKind::parse(get("solver")?)?,
            problem: get("problem")?.to_string(),
            n,
            m,
            step,
            forcing,
            decrease_c: opt_num("decrease_c")?,
            lipschitz_max: opt_num("lipschitz_max")?,
            f_min: opt_num("f_min")?,
            reference: (!reference.is_empty()).then_some(reference),
            epsilon: opt_num("epsilon")?,
            x0: split_floats(get("x0")?)?,
        };
        let evaluations = get("evaluations")?
            .parse()
            .map_err(|_| Error::Trace("bad evaluations".into()))?;
        let stop = StopReason::parse(get("stop")?)?;
        let final_mu = opt_num("final_mu")?;

        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let mut records = Vec::new();
        for row in rdr.records() {
            let row = row?;
            if row.len() != 16 + n + m {
                return Err(Error::Trace(format!(
                    "row has {} fields, expected {}",
                    row.len(),
                    16 + n + m
                )));
            }
            let int = |i: usize| -> Result<u64> {
                row[i]
                    .parse()
                    .map_err(|_| Error::Trace(format!("bad integer '{}'", &row[i])))
            };
            records.push(IterationRecord {
                k: int(0)? as usize,
                status: Status::parse(&row[1])?,
                iterate_id: int(2)?,
                alpha: parse_f64(&row[3])?,
                rho: parse_f64(&row[4])?,
                evaluations: int(5)?,
                poll_size: int(6)? as usize,
                search_size: int(7)? as usize,
                hi_before: parse_opt(&row[8])?,
                hi_after: parse_opt(&row[9])?,
                mu: parse_opt(&row[10])?,
                mu_d: parse_opt(&row[11])?,
                archive_size: int(12)? as usize,
                directions: row[13].to_string(),
                fx: parse_opt(&row[14])?,
                sum_alpha_sq: parse_opt(&row[15])?,
                center: (16..16 + n).map(|i| parse_f64(&row[i])).collect::<Result<_>>()?,
                center_value: (16 + n..16 + n + m)
                    .map(|i| parse_f64(&row[i]))
                    .collect::<Result<_>>()?,
            });
        }
        let entries = match entries {
            Some(r) => read_entries(r, n, m)?,
            None => Vec::new(),
        };
        Ok(RunTrace {
            meta,
            records,
            entries,
            evaluations,
            stop,
            final_mu,
        })
    }
}

fn read_entries<R: BufRead>(r: R, n: usize, m: usize) -> Result<Vec<EntryLog>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        if row.len() != 6 + n + m {
            return Err(Error::Trace("entry row has the wrong width".into()));
        }
        let opt_int = |i: usize| -> Result<Option<u64>> {
            if row[i].is_empty() {
                Ok(None)
            } else {
                row[i]
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::Trace(format!("bad integer '{}'", &row[i])))
            }
        };
        out.push(EntryLog {
            id: opt_int(0)?.ok_or_else(|| Error::Trace("missing id".into()))?,
            parent_id: opt_int(1)?,
            created_at: opt_int(2)?.ok_or_else(|| Error::Trace("missing created_at".into()))? as usize,
            retired_at: opt_int(3)?.map(|v| v as usize),
            stepsize: parse_f64(&row[4])?,
            origin: Origin::parse(&row[5])?,
            point: (6..6 + n).map(|i| parse_f64(&row[i])).collect::<Result<_>>()?,
            value: (6 + n..6 + n + m).map(|i| parse_f64(&row[i])).collect::<Result<_>>()?,
        });
    }
    Ok(out)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";")
}

fn split_floats(s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(parse_f64).collect()
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Trace(format!("bad number '{s}'")))
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}

/// `(|S|, |U|)`: successful and unsuccessful iterations in `[k0, j1]`.
pub fn count_iteration_sets(trace: &RunTrace, k0: usize, j1: usize) -> Result<(usize, usize)> {
    check_window(trace, k0, j1)?;
    let window = &trace.records[k0..=j1];
    let s = window.iter().filter(|r| r.status.is_success()).count();
    Ok((s, window.len() - s))
}

fn check_window(trace: &RunTrace, k0: usize, j1: usize) -> Result<()> {
    if k0 > j1 || j1 >= trace.records.len() {
        return Err(Error::Domain(format!(
            "window [{k0}, {j1}] outside a trace of {} iterations",
            trace.records.len()
        )));
    }
    Ok(())
}

/// Linked sequences between iterations `k0` and `j1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkedSequenceStats {
    pub window: (usize, usize),
    /// Number of maximal chains.
    pub chain_count: usize,
    pub max_chain_length: usize,
    /// Contraction links along each chain, in leaf-id order.
    pub per_chain_unsuccessful: Vec<usize>,
    /// Pair ids along each chain, root first.
    pub chains: Vec<Vec<u64>>,
}

/// Rebuilds the generation forest of the pairs alive in `L_r`,
/// `k0 <= r <= j1`, and returns every maximal root-to-leaf chain. A link
/// counts only when the child was generated inside the window.
pub fn linked_sequences(trace: &RunTrace, k0: usize, j1: usize) -> Result<LinkedSequenceStats> {
    check_window(trace, k0, j1)?;
    if trace.entries.is_empty() {
        return Err(Error::Trace("linked sequences need the archive log".into()));
    }
    let alive: BTreeMap<u64, &EntryLog> = trace
        .entries
        .iter()
        .filter(|e| e.alive_in(k0, j1))
        .map(|e| (e.id, e))
        .collect();
    let linked_parent = |e: &EntryLog| -> Option<u64> {
        let p = e.parent_id?;
        (alive.contains_key(&p) && e.created_at > k0).then_some(p)
    };
    let mut children: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for e in alive.values() {
        if let Some(p) = linked_parent(e) {
            children.entry(p).or_default().push(e.id);
        }
    }
    let mut chains = Vec::new();
    for leaf in alive.values().filter(|e| !children.contains_key(&e.id)) {
        let mut chain = vec![leaf.id];
        let mut cur = *leaf;
        while let Some(p) = linked_parent(cur) {
            chain.push(p);
            cur = alive[&p];
        }
        chain.reverse();
        chains.push(chain);
    }
    let per_chain_unsuccessful = chains
        .iter()
        .map(|c| {
            c.iter()
                .skip(1)
                .filter(|id| alive[id].origin == Origin::Contraction)
                .count()
        })
        .collect();
    Ok(LinkedSequenceStats {
        window: (k0, j1),
        chain_count: chains.len(),
        max_chain_length: chains.iter().map(|c| c.len()).max().unwrap_or(0),
        per_chain_unsuccessful,
        chains,
    })
}
