//! The complement-pair graph G_k between V(k) and V(n-k) and a constructive
//! perfect matching in it.
//!
//! G_k joins A ∈ V(k) to B ∈ V(n-k) when A ∩ B = 0. Every such pair has
//! Δ(A, B) = n, so a family of diameter at most n - 1 contains at most one end
//! of each matched pair, which gives |F(k)| + |F(n-k)| <= [n, k].

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::counting::qbinom;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::subspace::{enumerate_subspaces, Family, Subspace};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    pub left: Vec<Subspace>,
    pub right: Vec<Subspace>,
    /// Sorted right-neighbour indices of each left vertex.
    pub adjacency: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn left_degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right.len()];
        for adj in &self.adjacency {
            for &j in adj {
                deg[j] += 1;
            }
        }
        deg
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Γ(W) for a set of left vertices.
    pub fn neighborhood(&self, left: &[usize]) -> BTreeSet<usize> {
        left.iter().flat_map(|&i| self.adjacency[i].iter().copied()).collect()
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> bool {
        match self.adjacency[i].binary_search(&j) {
            Ok(pos) => {
                self.adjacency[i].remove(pos);
                true
            }
            Err(_) => false,
        }
    }
}

/// Builds G_k for k <= n/2. When 2k = n both sides are separate copies of V(k).
pub fn build_gk(spec: &FieldSpec, n: usize, k: usize, cap: u64) -> Result<BipartiteGraph> {
    if 2 * k > n {
        return Err(Error::InvalidParameters(format!("G_k needs k <= n/2, got n={n}, k={k}")));
    }
    let left: Vec<Subspace> = enumerate_subspaces(n, k, spec, cap)?.collect();
    let right: Vec<Subspace> = enumerate_subspaces(n, n - k, spec, cap)?.collect();
    let adjacency = left
        .par_iter()
        .map(|a| {
            right
                .iter()
                .enumerate()
                .filter(|(_, b)| a.sum_dim_unchecked(spec, b) == n)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    Ok(BipartiteGraph {
        left,
        right,
        adjacency,
    })
}

/// Whether every vertex on both sides has degree `expected`.
pub fn regularity_check(g: &BipartiteGraph, expected: &BigUint) -> bool {
    g.left.len() == g.right.len()
        && g.left_degrees()
            .into_iter()
            .chain(g.right_degrees())
            .all(|deg| BigUint::from(deg) == *expected)
}

/// Hopcroft-Karp. Returns (left, right) pairs sorted by left index. Free
/// vertices and neighbours are scanned in index order, so the result depends
/// only on the graph.
pub fn perfect_matching(g: &BipartiteGraph) -> Result<Vec<(usize, usize)>> {
    let size = g.left.len();
    let degrees = g.left_degrees();
    let deg = degrees.first().copied().unwrap_or(0);
    if !regularity_check(g, &BigUint::from(deg)) {
        return Err(Error::NotRegular(format!(
            "{} left / {} right vertices, degrees not all {deg}",
            g.left.len(),
            g.right.len()
        )));
    }
    let (match_l, matched) = hopcroft_karp(&g.adjacency, g.right.len());
    if matched != size {
        return Err(Error::NoPerfectMatching {
            matched: 2 * matched,
            size: 2 * size,
        });
    }
    Ok(match_l.into_iter().enumerate().collect())
}

fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> (Vec<usize>, usize) {
    let left = adj.len();
    let mut match_l = vec![NONE; left];
    let mut match_r = vec![NONE; right];
    let mut dist = vec![NONE; left];
    let mut matched = 0;
    loop {
        let mut queue = std::collections::VecDeque::new();
        for u in 0..left {
            if match_l[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = NONE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NONE {
                    found = true;
                } else if dist[w] == NONE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; left];
        for root in 0..left {
            if match_l[root] == NONE
                && augment(adj, root, &mut match_l, &mut match_r, &mut dist, &mut next)
            {
                matched += 1;
            }
        }
    }
    (match_l, matched)
}

/// Iterative layered DFS from `root`; flips the path when it reaches a free
/// right vertex.
fn augment(
    adj: &[Vec<usize>],
    root: usize,
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next[u] == adj[u].len() {
            dist[u] = NONE;
            stack.pop();
            continue;
        }
        let v = adj[u][next[u]];
        let w = match_r[v];
        if w == NONE {
            for &x in &stack {
                let y = adj[x][next[x]];
                match_l[x] = y;
                match_r[y] = x;
            }
            return true;
        }
        if dist[w] != NONE && dist[w] == dist[u] + 1 {
            stack.push(w);
        } else {
            next[u] += 1;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerPair {
    pub k: usize,
    pub low: usize,
    pub high: usize,
    pub bound: BigUint,
    /// Matched pairs with both ends in the family.
    pub violations: Vec<(Subspace, Subspace)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerPairReport {
    pub layers: Vec<LayerPair>,
    pub holds: bool,
}

/// For n = d + 1, checks |F(k)| + |F(n-k)| <= [n, k] for every k <= n/2 by
/// confirming F holds at most one end of each pair of a perfect matching of
/// G_k.
pub fn layer_pair_bound_check(spec: &FieldSpec, family: &Family, d: usize, cap: u64) -> Result<LayerPairReport> {
    let n = family.ambient();
    if n != d + 1 {
        return Err(Error::InvalidParameters(format!(
            "layer pairing needs n = d + 1, got n={n}, d={d}"
        )));
    }
    let mut layers = Vec::new();
    for k in 0..=n / 2 {
        let g = build_gk(spec, n, k, cap)?;
        let pairs = perfect_matching(&g)?;
        let violations: Vec<_> = pairs
            .iter()
            .filter(|&&(i, j)| family.contains(&g.left[i]) && family.contains(&g.right[j]))
            .map(|&(i, j)| (g.left[i].clone(), g.right[j].clone()))
            .collect();
        layers.push(LayerPair {
            k,
            low: family.slice_len(k),
            high: family.slice_len(n - k),
            bound: qbinom(n, k, spec.q() as u64),
            violations,
        });
    }
    let holds = layers
        .iter()
        .all(|l| l.violations.is_empty() && BigUint::from(l.low + l.high) <= l.bound);
    Ok(LayerPairReport { layers, holds })
}
