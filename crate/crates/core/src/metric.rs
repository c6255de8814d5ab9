//! The subspace metric Δ(A, B) = dim A + dim B - 2 dim(A ∩ B), the q-Hamming
//! graph it is the path metric of, and family statistics.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::subspace::{all_subspaces, reduce, Family, Subspace};

/// Ambient cap for materialising the q-Hamming graph.
pub const GRAPH_CAP: u64 = 100_000;

pub fn delta(spec: &FieldSpec, a: &Subspace, b: &Subspace) -> Result<usize> {
    let s = a.sum_dim(spec, b)?;
    Ok(2 * s - a.dim() - b.dim())
}

/// Δ without field/ambient checks; callers guarantee both come from one family.
#[inline]
pub(crate) fn delta_unchecked(spec: &FieldSpec, a: &Subspace, b: &Subspace) -> usize {
    2 * a.sum_dim_unchecked(spec, b) - a.dim() - b.dim()
}

/// The q-Hamming graph on all subspaces of GF(q)^n: A ~ B when A ⊂ B with
/// codimension one.
pub struct QHammingGraph {
    vertices: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl QHammingGraph {
    pub fn build(spec: &FieldSpec, n: usize, cap: u64) -> Result<Self> {
        let vertices = all_subspaces(n, spec, cap)?;
        let index: HashMap<Subspace, usize> =
            vertices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let q = spec.q();
        let all_vectors: Vec<u64> = (0..(q as u64).pow(n as u32))
            .map(|mut x| {
                let mut row = 0u64;
                for j in 0..n {
                    reduce::set(q, &mut row, j, (x % q as u64) as u8);
                    x /= q as u64;
                }
                row
            })
            .collect();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (i, a) in vertices.iter().enumerate() {
            let mut ups = BTreeSet::new();
            for &v in &all_vectors {
                if a.contains_packed(spec, v) {
                    continue;
                }
                let mut rows = a.packed_rows().to_vec();
                rows.push(v);
                ups.insert(index[&Subspace::from_packed(spec, n, rows)]);
            }
            for j in ups {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(QHammingGraph {
            vertices,
            index,
            adjacency,
        })
    }

    pub fn vertices(&self) -> &[Subspace] {
        &self.vertices
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// BFS distances from vertex `source` to every vertex.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: &Subspace, b: &Subspace) -> Option<usize> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        Some(self.distances_from(i)[j])
    }
}

/// Shortest-path distance in the q-Hamming graph. Materialises the whole
/// graph, so it is a test oracle rather than a query API.
pub fn graph_distance(spec: &FieldSpec, a: &Subspace, b: &Subspace, cap: u64) -> Result<usize> {
    delta(spec, a, b)?;
    let g = QHammingGraph::build(spec, a.ambient(), cap)?;
    Ok(g.distance(a, b).expect("both endpoints are vertices"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyStats {
    pub diameter: usize,
    /// D(F): largest dimension difference.
    pub spread: usize,
    pub support: BTreeSet<usize>,
    /// Least x with supp(F) or supp(F^⊥) inside [x, x + diameter].
    pub m_f: usize,
    /// Set when only the F^⊥ window attains `m_f`.
    pub perp_flag: bool,
}

/// Maximum pairwise Δ.
///
/// Pairs of slices are visited by decreasing a-priori ceiling
/// min(i + j, 2n - i - j) and skipped once the ceiling cannot beat the
/// current maximum.
pub fn diameter(spec: &FieldSpec, family: &Family) -> usize {
    let n = family.ambient();
    let slices: Vec<(usize, Vec<&Subspace>)> = family
        .slices()
        .iter()
        .filter(|(_, s)| !s.is_empty())
        .map(|(&k, s)| (k, s.iter().collect()))
        .collect();
    let mut best = match (slices.first(), slices.last()) {
        (Some((lo, _)), Some((hi, _))) => hi - lo,
        _ => return 0,
    };
    let mut pairs = Vec::new();
    for a in 0..slices.len() {
        for b in a..slices.len() {
            let (i, j) = (slices[a].0, slices[b].0);
            if a == b && slices[a].1.len() < 2 {
                continue;
            }
            pairs.push(((i + j).min(2 * n - i - j), a, b));
        }
    }
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    for (ceiling, a, b) in pairs {
        if ceiling <= best {
            break;
        }
        let left = &slices[a].1;
        let right = &slices[b].1;
        let same = a == b;
        let found = left
            .par_iter()
            .enumerate()
            .map(|(x, sa)| {
                let start = if same { x + 1 } else { 0 };
                let mut m = 0;
                for sb in &right[start..] {
                    m = m.max(delta_unchecked(spec, sa, sb));
                    if m == ceiling {
                        break;
                    }
                }
                m
            })
            .max()
            .unwrap_or(0);
        best = best.max(found);
    }
    best
}

pub fn family_stats(spec: &FieldSpec, family: &Family) -> Result<FamilyStats> {
    if family.is_empty() {
        return Err(Error::InvalidParameters("statistics of an empty family".into()));
    }
    let n = family.ambient();
    let d = diameter(spec, family);
    let support = family.support();
    let lo = *support.first().unwrap();
    let hi = *support.last().unwrap();
    let (plo, phi) = (n - hi, n - lo);
    let fits = |x: usize, a: usize, b: usize| x <= a && b <= x + d;
    let (m_f, perp_flag) = (0..=n)
        .find_map(|x| {
            if fits(x, lo, hi) {
                Some((x, false))
            } else if fits(x, plo, phi) {
                Some((x, true))
            } else {
                None
            }
        })
        .expect("x = min supp always fits");
    Ok(FamilyStats {
        diameter: d,
        spread: hi - lo,
        support,
        m_f,
        perp_flag,
    })
}

/// F^⊥ = {W^⊥ : W ∈ F}.
pub fn family_perp(spec: &FieldSpec, family: &Family) -> Result<Family> {
    let members = family
        .iter()
        .map(|s| s.perp(spec))
        .collect::<Result<Vec<_>>>()?;
    Family::from_members(spec, family.ambient(), members)
}

/// Whether dim(A ∩ B) >= ceil((i + j - d)/2) for all A ∈ F(i), B ∈ F(j).
pub fn cross_intersecting_check(spec: &FieldSpec, family: &Family, i: usize, j: usize, d: usize) -> Result<bool> {
    for k in [i, j] {
        if family.slice_len(k) == 0 {
            return Err(Error::EmptySlice(k));
        }
    }
    let need = (i + j) as i64 - d as i64;
    if need <= 0 {
        return Ok(true);
    }
    let s = ((need + 1) / 2) as usize;
    Ok(family.slice(i).all(|a| {
        family
            .slice(j)
            .all(|b| a.dim() + b.dim() - a.sum_dim_unchecked(spec, b) >= s)
    }))
}
