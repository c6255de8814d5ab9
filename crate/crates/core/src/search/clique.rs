//! Maximum clique by branch and bound with greedy-colouring bounds and
//! per-layer capacity bounds.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Self::new(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[cfg(test)]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &Bitset) -> Bitset {
        Bitset {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn and_not_assign(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn and_count(&self, other: &Bitset) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    #[cfg(test)]
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }
}

pub(crate) struct CliqueProblem {
    pub adj: Vec<Bitset>,
    pub layer_of: Vec<usize>,
    pub layer_cap: Vec<usize>,
    pub layer_masks: Vec<Bitset>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    NodeBudget,
    TimeBudget,
    Interrupted,
}

pub(crate) struct Limits<'a> {
    pub node_budget: u64,
    pub deadline: Option<Instant>,
    pub stop: Option<&'a AtomicBool>,
    pub checkpoint_every: u64,
}

/// Snapshot handed to the checkpoint hook.
pub(crate) struct Progress<'a> {
    pub nodes: u64,
    pub root_done: usize,
    pub root_digest: u64,
    pub best: Option<&'a [usize]>,
}

pub(crate) struct CliqueRun {
    /// A clique strictly larger than the starting lower bound, if found.
    pub best: Option<Vec<usize>>,
    pub nodes: u64,
    pub stopped: Option<Stop>,
    /// Upper bound on the clique number computed at the root.
    pub root_bound: usize,
}

struct Solver<'a, 'h> {
    p: &'a CliqueProblem,
    limits: &'a Limits<'a>,
    hook: &'h mut dyn FnMut(Progress<'_>),
    best_size: usize,
    best: Option<Vec<usize>>,
    nodes: u64,
    root_done: usize,
    root_digest: u64,
}

/// FNV-1a over the root branching order; identifies the frontier on resume.
fn digest(order: &[usize]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &v in order {
        for b in (v as u64).to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

impl Solver<'_, '_> {
    fn tick(&mut self) -> Result<(), Stop> {
        self.nodes += 1;
        if self.nodes > self.limits.node_budget {
            return Err(Stop::NodeBudget);
        }
        if self.nodes.is_multiple_of(256) {
            if self.limits.stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
                return Err(Stop::Interrupted);
            }
            if self.limits.deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(Stop::TimeBudget);
            }
        }
        if self.nodes.is_multiple_of(self.limits.checkpoint_every) {
            self.emit();
        }
        Ok(())
    }

    fn emit(&mut self) {
        (self.hook)(Progress {
            nodes: self.nodes,
            root_done: self.root_done,
            root_digest: self.root_digest,
            best: self.best.as_deref(),
        });
    }

    /// Greedy sequential colouring in vertex order. Returns vertices sorted
    /// by colour and the colour (1-based) of each.
    fn color(&self, cand: &Bitset) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(cand.count());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.and_not_assign(&self.p.adj[v]);
                uncolored.remove(v);
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }

    fn layer_bound(&self, size: usize, used: &[usize], left: &[usize]) -> usize {
        size + used
            .iter()
            .zip(left)
            .zip(&self.p.layer_cap)
            .map(|((&u, &l), &c)| l.min(c.saturating_sub(u)))
            .sum::<usize>()
    }

    fn layer_counts(&self, cand: &Bitset) -> Vec<usize> {
        self.p.layer_masks.iter().map(|m| cand.and_count(m)).collect()
    }

    fn branch(
        &mut self,
        v: usize,
        clique: &mut Vec<usize>,
        used: &mut [usize],
        cand: &Bitset,
    ) -> Result<(), Stop> {
        let layer = self.p.layer_of[v];
        clique.push(v);
        used[layer] += 1;
        let mut next = cand.and(&self.p.adj[v]);
        if used[layer] >= self.p.layer_cap[layer] {
            next.and_not_assign(&self.p.layer_masks[layer]);
        }
        let res = if next.is_empty() {
            if clique.len() > self.best_size {
                self.best_size = clique.len();
                self.best = Some(clique.clone());
            }
            Ok(())
        } else {
            self.expand(clique, used, next)
        };
        clique.pop();
        used[layer] -= 1;
        res
    }

    fn expand(&mut self, clique: &mut Vec<usize>, used: &mut [usize], mut cand: Bitset) -> Result<(), Stop> {
        self.tick()?;
        let (order, colors) = self.color(&cand);
        let mut left = self.layer_counts(&cand);
        for idx in (0..order.len()).rev() {
            if clique.len() + colors[idx] <= self.best_size
                || self.layer_bound(clique.len(), used, &left) <= self.best_size
            {
                return Ok(());
            }
            let v = order[idx];
            self.branch(v, clique, used, &cand)?;
            cand.remove(v);
            left[self.p.layer_of[v]] -= 1;
        }
        Ok(())
    }

    fn root(&mut self, resume: Option<(u64, usize)>) -> (usize, Result<(), Stop>) {
        let n = self.p.adj.len();
        let mut cand = Bitset::full(n);
        for (l, &cap) in self.p.layer_cap.iter().enumerate() {
            if cap == 0 {
                cand.and_not_assign(&self.p.layer_masks[l]);
            }
        }
        let (order, colors) = self.color(&cand);
        let mut left = self.layer_counts(&cand);
        let mut used = vec![0; self.p.layer_cap.len()];
        let root_bound = colors
            .last()
            .copied()
            .unwrap_or(0)
            .min(self.layer_bound(0, &used, &left));
        self.root_digest = digest(&order);
        let mut clique = Vec::new();
        let mut skip = 0;
        if let Some((d, done)) = resume {
            if d == self.root_digest {
                skip = done.min(order.len());
            }
        }
        let res = (|| {
            self.tick()?;
            for idx in (0..order.len()).rev() {
                let v = order[idx];
                if order.len() - idx <= skip {
                    cand.remove(v);
                    left[self.p.layer_of[v]] -= 1;
                    self.root_done = order.len() - idx;
                    continue;
                }
                if colors[idx] <= self.best_size || self.layer_bound(0, &used, &left) <= self.best_size {
                    break;
                }
                self.branch(v, &mut clique, &mut used, &cand)?;
                cand.remove(v);
                left[self.p.layer_of[v]] -= 1;
                self.root_done = order.len() - idx;
            }
            Ok(())
        })();
        (root_bound, res)
    }
}

/// Searches for a clique larger than `lower`. `resume` is a (digest, count)
/// pair from an earlier run: that many root branches are taken as finished.
pub(crate) fn max_clique(
    problem: &CliqueProblem,
    lower: usize,
    resume: Option<(u64, usize)>,
    limits: &Limits<'_>,
    hook: &mut dyn FnMut(Progress<'_>),
) -> CliqueRun {
    let mut s = Solver {
        p: problem,
        limits,
        hook,
        best_size: lower,
        best: None,
        nodes: 0,
        root_done: 0,
        root_digest: 0,
    };
    let (root_bound, res) = s.root(resume);
    let stopped = res.err();
    if stopped.is_some() {
        s.emit();
    }
    CliqueRun {
        best: s.best,
        nodes: s.nodes,
        stopped,
        root_bound,
    }
}
