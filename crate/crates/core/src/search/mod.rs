//! Extremal constructions, family verification, and the maximum-family
//! search over the compatibility graph (subspaces joined when Δ <= d).
//!
//! A maximum family F can be replaced by F^⊥ (same size, same diameter), and
//! one of the two has its dimensions inside a window [x, x + d] with
//! x <= (n - d)/2. Each window is searched independently as a maximum
//! clique problem, which keeps results identical across worker counts.

mod checkpoint;
mod clique;
mod construct;

use std::path::PathBuf;
use std::sync::atomic::AtomicBool;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checkpoint::{Checkpoint, WindowState, CHECKPOINT_VERSION};
pub use construct::{construct_f1, construct_f2};

use crate::counting::{qbinom, slice_bound, slice_bound_applies, theorem_bound, Regime};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::metric::{delta_unchecked, diameter};
use crate::subspace::{all_subspaces, Family, Subspace, Vector, DEFAULT_CAP};
use checkpoint::{family_lines, reverify};
use clique::{max_clique, Bitset, CliqueProblem, Limits, Progress, Stop};

/// Largest compatibility graph (vertices in one window) the search builds.
pub const MAX_WINDOW_VERTICES: usize = 30_000;

pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    NodeBudget,
    TimeBudget,
    Interrupted,
}

impl From<Stop> for StopReason {
    fn from(s: Stop) -> Self {
        match s {
            Stop::NodeBudget => StopReason::NodeBudget,
            Stop::TimeBudget => StopReason::TimeBudget,
            Stop::Interrupted => StopReason::Interrupted,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub q: u32,
    pub n: usize,
    pub d: usize,
    pub mode: Mode,
    /// Branch-and-bound nodes allowed per window.
    pub node_budget: u64,
    pub time_budget: Option<Duration>,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: u64,
    /// Continue from `checkpoint` if the file exists.
    pub resume: bool,
    pub seed: Option<Family>,
    pub cap: u64,
    pub workers: usize,
    pub stop: Option<Arc<AtomicBool>>,
}

impl SearchConfig {
    pub fn new(q: u32, n: usize, d: usize) -> Self {
        SearchConfig {
            q,
            n,
            d,
            mode: Mode::Exact,
            node_budget: u64::MAX,
            time_budget: None,
            checkpoint: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
            resume: false,
            seed: None,
            cap: DEFAULT_CAP,
            workers: 1,
            stop: None,
        }
    }

    fn validate(&self) -> Result<FieldSpec> {
        let spec = FieldSpec::new(self.q)?;
        if self.node_budget == 0 || self.checkpoint_interval == 0 || self.workers == 0 {
            return Err(Error::InvalidParameters(
                "node budget, checkpoint interval and worker count must be positive".into(),
            ));
        }
        if self.time_budget.is_some_and(|t| t.is_zero()) {
            return Err(Error::InvalidParameters("time budget must be positive".into()));
        }
        if let Some(seed) = &self.seed {
            if seed.q() != spec.q() {
                return Err(Error::FieldMismatch {
                    left: spec.q(),
                    right: seed.q(),
                });
            }
            if seed.ambient() != self.n {
                return Err(Error::AmbientMismatch {
                    left: self.n,
                    right: seed.ambient(),
                });
            }
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub family: Family,
    pub best_size: usize,
    /// Set only when every window was searched to completion.
    pub optimal: bool,
    pub nodes: u64,
    pub regime: Regime,
    pub theorem_bound: BigUint,
    /// Proven upper bound on the maximum size.
    pub upper_bound: usize,
    pub windows: usize,
    pub stopped: Option<StopReason>,
}

impl SearchResult {
    /// Gap-regime runs are exploratory: nothing is proved there to compare to.
    pub fn exploratory(&self) -> bool {
        self.regime == Regime::Gap
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceCheck {
    pub k: usize,
    pub size: usize,
    pub bound: BigUint,
    /// Whether the intersecting-family hypothesis holds at this k; if not,
    /// `bound` is the full layer size.
    pub hypothesis: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub size: usize,
    pub d: usize,
    pub diameter: usize,
    pub slices: Vec<SliceCheck>,
    pub theorem_bound: BigUint,
    pub regime: Regime,
    /// size == theorem bound.
    pub tight: bool,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// Recomputes the diameter and checks it against `d`, each slice against the
/// slice bound, and (in the covered regimes) the size against the theorem
/// bound.
pub fn verify_family(spec: &FieldSpec, family: &Family, d: usize) -> FamilyReport {
    let n = family.ambient();
    let q = spec.q() as u64;
    let t = d / 2;
    let diam = diameter(spec, family);
    let mut violations = Vec::new();
    if diam > d {
        violations.push(format!("diameter {diam} exceeds {d}"));
    }
    let slices: Vec<SliceCheck> = family
        .slice_sizes()
        .into_iter()
        .filter(|&(_, size)| size > 0)
        .map(|(k, size)| {
            let bound = slice_bound(n, k, t, q);
            let holds = BigUint::from(size) <= bound;
            if !holds {
                violations.push(format!("slice {k} has {size} members, bound {bound}"));
            }
            SliceCheck {
                k,
                size,
                bound,
                hypothesis: slice_bound_applies(n, k, t),
                holds,
            }
        })
        .collect();
    let tb = theorem_bound(n, d, q);
    let size = BigUint::from(family.len());
    if tb.regime.is_covered() && size > tb.value {
        violations.push(format!("size {size} exceeds theorem bound {}", tb.value));
    }
    FamilyReport {
        size: family.len(),
        d,
        diameter: diam,
        slices,
        tight: size == tb.value,
        theorem_bound: tb.value,
        regime: tb.regime,
        pass: violations.is_empty(),
        violations,
    }
}

/// Admits subspaces in canonical order whenever Δ to every member stays
/// within `d`. Returns the family and the number of candidates examined.
fn greedy_extend(spec: &FieldSpec, d: usize, all: &[Subspace], seed: &Family) -> (Family, u64) {
    let mut fam = seed.clone();
    let mut members: Vec<&Subspace> = seed.iter().collect();
    let mut examined = 0;
    for s in all {
        if fam.contains(s) {
            continue;
        }
        examined += 1;
        if members.iter().all(|m| delta_unchecked(spec, m, s) <= d) {
            fam.insert(s.clone()).expect("same ambient space");
            members.push(s);
        }
    }
    (fam, examined)
}

fn checked_seed(spec: &FieldSpec, cfg: &SearchConfig) -> Result<Option<Family>> {
    let Some(seed) = &cfg.seed else {
        return Ok(None);
    };
    let found = diameter(spec, seed);
    if found > cfg.d {
        return Err(Error::DiameterViolation { found, bound: cfg.d });
    }
    Ok(Some(seed.clone()))
}

/// The matching extremal construction: F1 for even d, F2 through e_1 for
/// odd d.
fn construction(spec: &FieldSpec, n: usize, d: usize, cap: u64) -> Result<Family> {
    let t = d / 2;
    if d % 2 == 1 && t < n {
        construct_f2(spec, n, t, &Vector::unit(n, 0), cap)
    } else {
        construct_f1(spec, n, t, cap)
    }
}

fn emit(spec: &FieldSpec, family: &Family, d: usize) -> Result<()> {
    let found = diameter(spec, family);
    if found > d {
        return Err(Error::DiameterViolation { found, bound: d });
    }
    Ok(())
}

/// Deterministic greedy lower bound, started from the seed family if given
/// (otherwise from the empty family).
pub fn greedy_family(cfg: &SearchConfig) -> Result<SearchResult> {
    let spec = cfg.validate()?;
    let all = all_subspaces(cfg.n, &spec, cfg.cap)?;
    let seed = checked_seed(&spec, cfg)?.unwrap_or_else(|| Family::new(&spec, cfg.n));
    let (family, examined) = greedy_extend(&spec, cfg.d, &all, &seed);
    emit(&spec, &family, cfg.d)?;
    let tb = theorem_bound(cfg.n, cfg.d, spec.q() as u64);
    Ok(SearchResult {
        best_size: family.len(),
        upper_bound: all.len(),
        family,
        optimal: false,
        nodes: examined,
        regime: tb.regime,
        theorem_bound: tb.value,
        windows: 0,
        stopped: None,
    })
}

/// Per-layer cap: the slice bound for k and, through F ↦ F^⊥, for n - k.
fn layer_cap(n: usize, k: usize, d: usize, q: u64) -> usize {
    let t = d / 2;
    let b = qbinom(n, k, q)
        .min(slice_bound(n, k, t, q))
        .min(slice_bound(n, n - k, t, q));
    b.to_usize().unwrap_or(usize::MAX)
}

struct WindowOutcome {
    best: Option<Vec<Subspace>>,
    nodes: u64,
    stopped: Option<Stop>,
    root_bound: usize,
}

struct Shared<'a> {
    path: Option<&'a PathBuf>,
    state: Mutex<Checkpoint>,
    error: Mutex<Option<Error>>,
}

impl Shared<'_> {
    fn update(&self, slot: usize, f: impl FnOnce(&mut WindowState)) {
        let mut cp = self.state.lock().expect("checkpoint lock");
        f(&mut cp.windows[slot]);
        if let Some(path) = self.path {
            if let Err(e) = cp.save(path) {
                self.error.lock().expect("error lock").get_or_insert(e);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn search_window(
    spec: &FieldSpec,
    cfg: &SearchConfig,
    all: &[Subspace],
    slot: usize,
    x: usize,
    lower: usize,
    resume: Option<(u64, usize)>,
    deadline: Option<Instant>,
    shared: &Shared<'_>,
) -> Result<WindowOutcome> {
    let (n, d, q) = (cfg.n, cfg.d, spec.q() as u64);
    let (lo, hi) = (x, (x + d).min(n));
    let vertices: Vec<&Subspace> = all.iter().filter(|s| (lo..=hi).contains(&s.dim())).collect();
    if vertices.len() > MAX_WINDOW_VERTICES {
        return Err(Error::CapExceeded {
            what: format!("compatibility graph for dimensions {lo}..={hi}"),
            predicted: BigUint::from(vertices.len()),
            cap: MAX_WINDOW_VERTICES as u64,
        });
    }
    let m = vertices.len();
    let adj: Vec<Bitset> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut row = Bitset::new(m);
            for j in 0..m {
                if i != j && delta_unchecked(spec, vertices[i], vertices[j]) <= d {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    let layers = hi - lo + 1;
    let layer_of: Vec<usize> = vertices.iter().map(|s| s.dim() - lo).collect();
    let mut layer_masks = vec![Bitset::new(m); layers];
    for (i, &l) in layer_of.iter().enumerate() {
        layer_masks[l].insert(i);
    }
    let layer_cap = (lo..=hi).map(|k| layer_cap(n, k, d, q)).collect();
    let problem = CliqueProblem {
        adj,
        layer_of,
        layer_cap,
        layer_masks,
    };
    let limits = Limits {
        node_budget: cfg.node_budget,
        deadline,
        stop: cfg.stop.as_deref(),
        checkpoint_every: if shared.path.is_some() {
            cfg.checkpoint_interval
        } else {
            u64::MAX
        },
    };
    let to_members = |idx: &[usize]| -> Vec<Subspace> {
        let mut v: Vec<Subspace> = idx.iter().map(|&i| vertices[i].clone()).collect();
        v.sort();
        v
    };
    let mut hook = |p: Progress<'_>| {
        let best = p.best.map(|b| family_lines(&to_members(b)));
        shared.update(slot, |w| {
            w.nodes = p.nodes;
            w.root_digest = p.root_digest;
            w.root_done = p.root_done;
            if best.is_some() {
                w.best = best;
            }
        });
    };
    let run = max_clique(&problem, lower, resume, &limits, &mut hook);
    let best = run.best.as_deref().map(to_members);
    Ok(WindowOutcome {
        best,
        nodes: run.nodes,
        stopped: run.stopped,
        root_bound: run.root_bound,
    })
}

/// Maximum family of diameter at most `d`, searched exactly window by
/// window. Budgets, interruption and checkpoints are honoured; a truncated
/// run returns the best family so far with `optimal` unset.
pub fn max_family_exact(cfg: &SearchConfig) -> Result<SearchResult> {
    let spec = cfg.validate()?;
    let (n, d) = (cfg.n, cfg.d);
    let all = all_subspaces(n, &spec, cfg.cap)?;
    let tb = theorem_bound(n, d, spec.q() as u64);
    let deadline = cfg.time_budget.map(|t| Instant::now() + t);

    let mut incumbent = {
        let base = construction(&spec, n, d, cfg.cap)?;
        let (from_construction, _) = greedy_extend(&spec, d, &all, &base);
        match checked_seed(&spec, cfg)? {
            Some(seed) => {
                let (from_seed, _) = greedy_extend(&spec, d, &all, &seed);
                if from_seed.len() > from_construction.len() {
                    from_seed
                } else {
                    from_construction
                }
            }
            None => from_construction,
        }
    };

    let max_x = n.saturating_sub(d) / 2;
    let mut state = Checkpoint {
        version: CHECKPOINT_VERSION,
        q: spec.q(),
        n,
        d,
        incumbent: Vec::new(),
        windows: (0..=max_x)
            .map(|x| WindowState {
                x,
                ..Default::default()
            })
            .collect(),
    };
    let mut previous: Vec<Option<Family>> = vec![None; max_x + 1];
    if cfg.resume {
        if let Some(path) = cfg.checkpoint.as_ref().filter(|p| p.exists()) {
            let cp = Checkpoint::load(path)?;
            if !cp.matches(spec.q(), n, d) || cp.windows.len() != state.windows.len() {
                return Err(Error::Checkpoint(format!(
                    "checkpoint is for q={} n={} d={}, not q={} n={n} d={d}",
                    cp.q,
                    cp.n,
                    cp.d,
                    spec.q()
                )));
            }
            let stored = reverify(&spec, n, d, &cp.incumbent)?;
            if stored.len() > incumbent.len() {
                incumbent = stored;
            }
            for (slot, w) in cp.windows.iter().enumerate() {
                if let Some(lines) = &w.best {
                    previous[slot] = Some(reverify(&spec, n, d, lines)?);
                }
            }
            state.windows = cp.windows;
        }
    }
    state.incumbent = family_lines(&incumbent.iter().cloned().collect::<Vec<_>>());

    let shared = Shared {
        path: cfg.checkpoint.as_ref(),
        state: Mutex::new(state),
        error: Mutex::new(None),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;

    let snapshot: Vec<WindowState> = shared.state.lock().expect("checkpoint lock").windows.clone();
    let outcomes: Vec<Result<WindowOutcome>> = pool.install(|| {
        snapshot
            .par_iter()
            .enumerate()
            .map(|(slot, w)| {
                let prev = previous[slot].as_ref().map(|f| f.iter().cloned().collect::<Vec<_>>());
                if w.done {
                    return Ok(WindowOutcome {
                        best: prev,
                        nodes: w.nodes,
                        stopped: None,
                        root_bound: 0,
                    });
                }
                let lower = incumbent.len().max(prev.as_ref().map_or(0, Vec::len));
                let resume = (w.root_done > 0).then_some((w.root_digest, w.root_done));
                let mut out = search_window(&spec, cfg, &all, slot, w.x, lower, resume, deadline, &shared)?;
                if out.best.is_none() {
                    out.best = prev;
                }
                out.nodes += w.nodes;
                let done = out.stopped.is_none();
                let best_lines = out.best.as_deref().map(family_lines);
                shared.update(slot, |s| {
                    s.done = done;
                    s.nodes = out.nodes;
                    s.best = best_lines;
                });
                Ok(out)
            })
            .collect()
    });
    if let Some(e) = shared.error.lock().expect("error lock").take() {
        return Err(e);
    }
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let mut best_members: Option<Vec<Subspace>> = None;
    for o in &outcomes {
        if let Some(b) = &o.best {
            let better = match &best_members {
                None => b.len() > incumbent.len(),
                Some(cur) => b.len() > cur.len() || (b.len() == cur.len() && b < cur),
            };
            if better {
                best_members = Some(b.clone());
            }
        }
    }
    let family = match best_members {
        Some(m) => Family::from_members(&spec, n, m)?,
        None => incumbent,
    };
    emit(&spec, &family, d)?;

    let stopped = outcomes.iter().find_map(|o| o.stopped).map(StopReason::from);
    let optimal = stopped.is_none();
    let best_size = family.len();
    let upper_bound = outcomes
        .iter()
        .filter(|o| o.stopped.is_some())
        .map(|o| o.root_bound)
        .fold(best_size, usize::max);
    Ok(SearchResult {
        best_size,
        optimal,
        nodes: outcomes.iter().map(|o| o.nodes).sum(),
        regime: tb.regime,
        theorem_bound: tb.value,
        upper_bound,
        windows: outcomes.len(),
        stopped,
        family,
    })
}

/// Dispatches on `cfg.mode`.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchResult> {
    match cfg.mode {
        Mode::Exact => max_family_exact(cfg),
        Mode::Greedy => greedy_family(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(q: u32, n: usize, d: usize) -> SearchResult {
        max_family_exact(&SearchConfig::new(q, n, d)).unwrap()
    }

    #[test]
    fn small_optima() {
        for (q, n, d, want) in [(2, 2, 1, 2), (2, 3, 2, 8), (3, 3, 2, 14), (2, 4, 3, 23)] {
            let r = exact(q, n, d);
            assert!(r.optimal, "({q},{n},{d})");
            assert_eq!(r.best_size, want, "({q},{n},{d})");
            assert_eq!(BigUint::from(want), r.theorem_bound);
        }
    }

    #[test]
    fn diameter_zero_is_singleton() {
        for (q, n) in [(2, 3), (3, 2), (4, 2)] {
            let r = exact(q, n, 0);
            assert!(r.optimal);
            assert_eq!(r.best_size, 1);
        }
    }

    #[test]
    fn trivial_regime_takes_everything() {
        let r = exact(2, 3, 3);
        assert_eq!((r.best_size, r.optimal, r.regime), (16, true, Regime::Trivial));
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let mut cfg = SearchConfig::new(2, 4, 2);
        let one = max_family_exact(&cfg).unwrap();
        cfg.workers = 4;
        let four = max_family_exact(&cfg).unwrap();
        assert_eq!(one.family, four.family);
        assert_eq!((one.best_size, one.optimal, one.nodes), (four.best_size, four.optimal, four.nodes));
        assert!(one.exploratory());
    }

    #[test]
    fn greedy_from_f1_keeps_seed() {
        let f2 = FieldSpec::new(2).unwrap();
        let mut cfg = SearchConfig::new(2, 4, 2);
        cfg.mode = Mode::Greedy;
        cfg.seed = Some(construct_f1(&f2, 4, 1, 1000).unwrap());
        let r = run_search(&cfg).unwrap();
        assert!(r.best_size >= 16);
        assert!(verify_family(&f2, &r.family, 2).diameter <= 2);
    }

    #[test]
    fn greedy_rejects_bad_seed() {
        let f2 = FieldSpec::new(2).unwrap();
        let mut cfg = SearchConfig::new(2, 4, 1);
        cfg.mode = Mode::Greedy;
        cfg.seed = Some(construct_f1(&f2, 4, 1, 1000).unwrap());
        assert!(matches!(run_search(&cfg), Err(Error::DiameterViolation { found: 2, bound: 1 })));
    }

    #[test]
    fn verify_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        let fam = construct_f2(&f2, 4, 1, &Vector::unit(4, 0), 1000).unwrap();
        let r = verify_family(&f2, &fam, 3);
        assert!(r.pass && r.tight);
        assert_eq!(r.size, 23);

        let f1 = construct_f1(&f2, 4, 2, 1000).unwrap();
        let r = verify_family(&f2, &f1, 3);
        assert!(!r.pass);
        assert_eq!(r.diameter, 4);

        let r = verify_family(&f2, &Family::new(&f2, 4), 2);
        assert!(r.pass);
        assert_eq!(r.size, 0);
    }

    #[test]
    fn node_budget_truncates() {
        let mut cfg = SearchConfig::new(3, 3, 2);
        cfg.node_budget = 1;
        let r = max_family_exact(&cfg).unwrap();
        assert!(!r.optimal);
        assert_eq!(r.stopped, Some(StopReason::NodeBudget));
        assert!(r.upper_bound >= r.best_size);
        assert!(verify_family(&FieldSpec::new(3).unwrap(), &r.family, 2).diameter <= 2);
    }

    #[test]
    fn checkpoint_resume_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("search.json");
        let mut cfg = SearchConfig::new(2, 4, 3);
        cfg.checkpoint = Some(path.clone());
        cfg.checkpoint_interval = 5;
        cfg.node_budget = 20;
        let first = max_family_exact(&cfg).unwrap();
        assert!(!first.optimal);
        assert!(path.exists());
        cfg.node_budget = u64::MAX;
        cfg.resume = true;
        let second = max_family_exact(&cfg).unwrap();
        assert!(second.optimal);
        assert_eq!(second.best_size, 23);
        let cp = Checkpoint::load(&path).unwrap();
        assert!(cp.windows.iter().all(|w| w.done));
    }
}
