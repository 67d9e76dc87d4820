//! Pareto dominance, the margin-dominated region `D(L; a)` and the
//! nondominated archive `L_k`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{ObjectiveValue, Point};

/// How an archive entry came into existence. Contraction and expansion
/// entries are the same point as their parent with a new stepsize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Initial,
    Search,
    Poll,
    Expansion,
    Contraction,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::Initial => "initial",
            Origin::Search => "search",
            Origin::Poll => "poll",
            Origin::Expansion => "expansion",
            Origin::Contraction => "contraction",
        }
    }

    pub fn parse(s: &str) -> Result<Origin> {
        Ok(match s {
            "initial" => Origin::Initial,
            "search" => Origin::Search,
            "poll" => Origin::Poll,
            "expansion" => Origin::Expansion,
            "contraction" => Origin::Contraction,
            other => return Err(Error::Trace(format!("unknown entry origin '{other}'"))),
        })
    }
}

/// A pair `(x; alpha)` of the archive.
///
/// Entries are immutable: a stepsize update replaces the entry by a new one
/// whose `parent_id` points at the old pair, so the parent links form the
/// generation forest used for linked-sequence counting.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoEntry {
    pub id: u64,
    pub point: Point,
    pub value: ObjectiveValue,
    pub stepsize: f64,
    pub parent_id: Option<u64>,
    /// Index `r` of the first list `L_r` that contains this pair.
    pub created_at: usize,
    pub origin: Origin,
}

impl ParetoEntry {
    pub fn new(
        id: u64,
        point: Point,
        value: ObjectiveValue,
        stepsize: f64,
        parent_id: Option<u64>,
        created_at: usize,
        origin: Origin,
    ) -> Result<Self> {
        if !(stepsize > 0.0) {
            return Err(Error::Domain(format!("stepsize must be > 0, got {stepsize}")));
        }
        if !value.is_finite() {
            return Err(Error::NonFinite("archive entries need finite values".into()));
        }
        Ok(ParetoEntry {
            id,
            point,
            value,
            stepsize,
            parent_id,
            created_at,
            origin,
        })
    }

    /// The same point with a new stepsize, as a child pair.
    pub fn with_stepsize(&self, id: u64, stepsize: f64, created_at: usize, origin: Origin) -> Self {
        ParetoEntry {
            id,
            point: self.point.clone(),
            value: self.value.clone(),
            stepsize,
            parent_id: Some(self.id),
            created_at,
            origin,
        }
    }
}

fn check_len(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(())
}

/// `u` dominates `v`: `v - u` is componentwise nonnegative and nonzero.
pub fn dominates(u: &[f64], v: &[f64]) -> Result<bool> {
    check_len(u, v)?;
    Ok(dominates_unchecked(u, v))
}

pub(crate) fn dominates_unchecked(u: &[f64], v: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

/// `u ∈ D({w}; a)`: `u_i >= w_i - a` for every component.
pub fn margin_dominated_by(u: &[f64], w: &[f64], a: f64) -> Result<bool> {
    check_len(u, w)?;
    Ok(u.iter().zip(w).all(|(ui, wi)| *ui >= wi - a))
}

/// `u ∈ D(L; a)`: the l-infinity distance from `u` to the region dominated by
/// the archive is at most `a`. With `a = 0` this is weak dominance by some
/// entry.
pub fn in_margin_dominated(u: &[f64], archive: &ParetoArchive, a: f64) -> Result<bool> {
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("margin must be >= 0, got {a}")));
    }
    for e in &archive.entries {
        if margin_dominated_by(u, &e.value, a)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Result of a [`ParetoArchive::filter_insert`] call.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InsertOutcome {
    /// The archive's point set changed (the iteration is successful).
    pub changed: bool,
    /// Ids of accepted candidates still present after the call.
    pub accepted: Vec<u64>,
    /// Ids of entries removed by the call.
    pub evicted: Vec<u64>,
}

/// The list of nondominated pairs `L_k`, kept in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParetoArchive {
    entries: Vec<ParetoEntry>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        ParetoArchive::default()
    }

    pub fn singleton(entry: ParetoEntry) -> Self {
        ParetoArchive { entries: vec![entry] }
    }

    /// Builds an archive, rejecting sets that are not mutually nondominated.
    pub fn from_entries(entries: Vec<ParetoEntry>) -> Result<Self> {
        let archive = ParetoArchive { entries };
        if !archive.is_mutually_nondominated() {
            return Err(Error::Domain("entries are not mutually nondominated".into()));
        }
        Ok(archive)
    }

    pub fn entries(&self) -> &[ParetoEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&ParetoEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn contains(&self, id: u64) -> bool {
        self.get(id).is_some()
    }

    pub fn values(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|e| e.value.to_vec()).collect()
    }

    pub fn is_mutually_nondominated(&self) -> bool {
        self.entries
            .iter()
            .all(|a| self.entries.iter().all(|b| !dominates_unchecked(&a.value, &b.value)))
    }

    /// Swaps the entry `id` for `replacement` in place. Returns false when
    /// `id` is absent.
    pub fn replace(&mut self, id: u64, replacement: ParetoEntry) -> bool {
        match self.entries.iter_mut().find(|e| e.id == id) {
            Some(slot) => {
                *slot = replacement;
                true
            }
            None => false,
        }
    }

    /// Drops every entry and installs `entry` alone.
    pub fn reset_to(&mut self, entry: ParetoEntry) -> Vec<u64> {
        let evicted = self.entries.iter().map(|e| e.id).collect();
        self.entries = vec![entry];
        evicted
    }

    /// Processes `candidates` in order. A candidate is accepted iff its value
    /// is not in `D(L_current; a)`, where `L_current` already holds the
    /// candidates accepted earlier in the same call. An accepted candidate
    /// evicts the entries it strictly dominates.
    pub fn filter_insert(&mut self, candidates: Vec<ParetoEntry>, a: f64) -> Result<InsertOutcome> {
        if !(a >= 0.0) {
            return Err(Error::Domain(format!("margin must be >= 0, got {a}")));
        }
        let mut outcome = InsertOutcome::default();
        for cand in candidates {
            if !cand.value.is_finite() {
                return Err(Error::NonFinite("candidate value".into()));
            }
            if let Some(e) = self.entries.first() {
                check_len(&e.value, &cand.value)?;
            }
            if in_margin_dominated(&cand.value, self, a)? {
                continue;
            }
            let mut kept = Vec::with_capacity(self.entries.len() + 1);
            for e in self.entries.drain(..) {
                if dominates_unchecked(&cand.value, &e.value) {
                    outcome.evicted.push(e.id);
                    outcome.accepted.retain(|id| *id != e.id);
                } else {
                    kept.push(e);
                }
            }
            self.entries = kept;
            outcome.accepted.push(cand.id);
            self.entries.push(cand);
            outcome.changed = true;
        }
        Ok(outcome)
    }

    /// One CSV row per entry: `id,parent_id,created_at,stepsize,x…,F…`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let (n, m) = match self.entries.first() {
            Some(e) => (e.point.dim(), e.value.len()),
            None => (0, 0),
        };
        let mut header = vec![
            "id".to_string(),
            "parent_id".into(),
            "created_at".into(),
            "stepsize".into(),
        ];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=m).map(|i| format!("f{i}")));
        wtr.write_record(&header)?;
        for e in &self.entries {
            let mut row = vec![
                e.id.to_string(),
                e.parent_id.map(|p| p.to_string()).unwrap_or_default(),
                e.created_at.to_string(),
                format!("{:e}", e.stepsize),
            ];
            row.extend(e.point.iter().map(|v| format!("{v:e}")));
            row.extend(e.value.iter().map(|v| format!("{v:e}")));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Ordering criterion for picking the poll center from `L_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Largest stepsize first; ties go to the lower id.
    #[default]
    LargestStepsize,
    /// Oldest pair first; ties go to the lower id.
    Fifo,
    /// Uniform choice from a seeded stream.
    Random { seed: u64 },
}

/// Stateful selector; the random strategy owns its generator so a run is
/// reproducible from the seed.
#[derive(Debug, Clone)]
pub struct Selector {
    strategy: Selection,
    rng: ChaCha8Rng,
}

impl Selector {
    pub fn new(strategy: Selection) -> Self {
        let seed = match strategy {
            Selection::Random { seed } => seed,
            _ => 0,
        };
        Selector {
            strategy,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn strategy(&self) -> Selection {
        self.strategy
    }

    pub fn select<'a>(&mut self, archive: &'a ParetoArchive) -> Result<&'a ParetoEntry> {
        let entries = archive.entries();
        if entries.is_empty() {
            return Err(Error::EmptyArchive);
        }
        let chosen = match self.strategy {
            Selection::LargestStepsize => entries
                .iter()
                .min_by(|a, b| b.stepsize.total_cmp(&a.stepsize).then(a.id.cmp(&b.id)))
                .expect("nonempty"),
            Selection::Fifo => entries.iter().min_by_key(|e| (e.created_at, e.id)).expect("nonempty"),
            Selection::Random { .. } => &entries[self.rng.random_range(0..entries.len())],
        };
        Ok(chosen)
    }
}

/// Deterministic selection for the non-random strategies.
pub fn select_iterate(archive: &ParetoArchive, strategy: Selection) -> Result<&ParetoEntry> {
    Selector::new(strategy).select(archive)
}
