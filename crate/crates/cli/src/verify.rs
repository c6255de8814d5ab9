//! Exhaustive and sampled property suites behind `qiso verify`.

use std::collections::{BTreeMap, HashSet};

use anyhow::{Context, Result};
use clap::ValueEnum;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qiso::counting::{intersection_count, line_sum_inequality, qbinom, qpow};
use qiso::gf::{FieldElement, FieldSpec};
use qiso::matching::{build_gk, perfect_matching, regularity_check};
use qiso::metric::{delta, QHammingGraph, GRAPH_CAP};
use qiso::subspace::{all_subspaces, enumerate_subspaces, Subspace};

/// Exhaustive triangle checks up to this many subspaces; sampled beyond.
const EXHAUSTIVE_TRIPLES: usize = 100;
const SAMPLED_TRIPLES: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Gf,
    Subspace,
    Metric,
    Counting,
    Matching,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Gf => "gf",
            Suite::Subspace => "subspace",
            Suite::Metric => "metric",
            Suite::Counting => "counting",
            Suite::Matching => "matching",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Gf, Suite::Subspace, Suite::Metric, Suite::Counting, Suite::Matching],
            s => vec![s],
        }
    }
}

/// Named check counts and the violations found.
#[derive(Default)]
pub struct SuiteOutcome {
    pub counts: BTreeMap<String, u64>,
    pub violations: Vec<String>,
}

impl SuiteOutcome {
    fn count(&mut self, name: &str, by: u64) {
        *self.counts.entry(name.to_string()).or_default() += by;
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(what());
        }
    }
}

pub fn run_suite(suite: Suite, q: u32, n: usize, cap: u64) -> Result<SuiteOutcome> {
    let spec = FieldSpec::new(q)?;
    let out = match suite {
        Suite::Gf => gf_suite(&spec),
        Suite::Subspace => subspace_suite(&spec, n, cap),
        Suite::Metric => metric_suite(&spec, n, cap),
        Suite::Counting => counting_suite(&spec, n, cap),
        Suite::Matching => matching_suite(&spec, n, cap),
        Suite::All => unreachable!("expanded by caller"),
    };
    out.with_context(|| format!("suite {}", suite.name()))
}

fn gf_suite(spec: &FieldSpec) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    let els: Vec<FieldElement> = spec.elements().collect();
    let (zero, one) = (FieldElement::ZERO, FieldElement::ONE);
    for &a in &els {
        out.require(spec.add(a, zero) == a && spec.mul(a, one) == a, || format!("identities at {a:?}"));
        out.require(spec.add(a, spec.neg(a)) == zero, || format!("additive inverse at {a:?}"));
        if a != zero {
            let inv = spec.inv(a)?;
            out.require(spec.mul(a, inv) == one, || format!("multiplicative inverse at {a:?}"));
        }
        for &b in &els {
            out.require(
                spec.add(a, b) == spec.add(b, a) && spec.mul(a, b) == spec.mul(b, a),
                || format!("commutativity at {a:?},{b:?}"),
            );
            for &c in &els {
                out.require(
                    spec.add(spec.add(a, b), c) == spec.add(a, spec.add(b, c))
                        && spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c))
                        && spec.mul(a, spec.add(b, c)) == spec.add(spec.mul(a, b), spec.mul(a, c)),
                    || format!("associativity/distributivity at {a:?},{b:?},{c:?}"),
                );
            }
        }
    }
    let q = els.len() as u64;
    out.count("element_checks", q);
    out.count("pair_checks", q * q);
    out.count("triple_checks", q * q * q);
    let g = spec.generator();
    out.require(
        spec.multiplicative_order(g) == Some(els.len() - 1),
        || "multiplicative group is not cyclic".into(),
    );
    Ok(out)
}

fn subspace_suite(spec: &FieldSpec, n: usize, cap: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    let q = spec.q() as u64;
    for k in 0..=n {
        let count = enumerate_subspaces(n, k, spec, cap)?.count();
        out.require(BigUint::from(count) == qbinom(n, k, q), || {
            format!("enumeration count for k={k} differs from the Gaussian binomial")
        });
    }
    out.count("enumeration_checks", n as u64 + 1);
    let all = all_subspaces(n, spec, cap)?;
    let perps: Vec<Subspace> = all.iter().map(|s| s.perp(spec)).collect::<qiso::Result<_>>()?;
    let mut seen = HashSet::new();
    for (s, p) in all.iter().zip(&perps) {
        out.require(seen.insert(s.canonical_bytes()), || format!("duplicate canonical form {s}"));
        out.require(p.dim() + s.dim() == n, || format!("perp dimension at {s}"));
        out.require(p.perp(spec)? == *s, || format!("perp is not an involution at {s}"));
        out.require(Subspace::span(spec, n, &s.basis())? == *s, || format!("rref not idempotent at {s}"));
    }
    out.count("subspace_checks", all.len() as u64);
    let bad: Vec<String> = all
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, a)| {
            let (all, perps) = (&all, &perps);
            all.iter().enumerate().filter_map(move |(j, b)| {
                let sum = a.sum(spec, b).expect("same ambient space");
                let meet = a.intersect(spec, b).expect("same ambient space");
                let dual = perps[i].sum(spec, &perps[j]).expect("same ambient space");
                let ok = sum.dim() + meet.dim() == a.dim() + b.dim() && meet.perp(spec).ok() == Some(dual);
                (!ok).then(|| format!("dimension formula or duality at ({a}, {b})"))
            })
        })
        .collect();
    out.violations.extend(bad);
    out.count("pair_checks", (all.len() * all.len()) as u64);
    Ok(out)
}

fn metric_suite(spec: &FieldSpec, n: usize, cap: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    let all = all_subspaces(n, spec, cap)?;
    let graph = QHammingGraph::build(spec, n, cap.min(GRAPH_CAP))?;
    let perps: Vec<Subspace> = all.iter().map(|s| s.perp(spec)).collect::<qiso::Result<_>>()?;
    let m = all.len();
    let table: Vec<Vec<usize>> = all
        .par_iter()
        .map(|a| all.iter().map(|b| delta(spec, a, b)).collect::<qiso::Result<Vec<_>>>())
        .collect::<qiso::Result<_>>()?;
    for (i, a) in all.iter().enumerate() {
        let idx = graph.index_of(a).expect("graph holds every subspace");
        let bfs = graph.distances_from(idx);
        for (j, b) in all.iter().enumerate() {
            let d = table[i][j];
            out.require(bfs[graph.index_of(b).expect("vertex")] == d, || format!("graph distance differs at ({a}, {b})"));
            out.require(d == table[j][i], || format!("asymmetry at ({a}, {b})"));
            out.require((d == 0) == (i == j), || format!("identity of indiscernibles at ({a}, {b})"));
            out.require(a.dim().abs_diff(b.dim()) <= d, || format!("dimension gap exceeds distance at ({a}, {b})"));
            out.require(delta(spec, &perps[i], &perps[j])? == d, || format!("perp changes distance at ({a}, {b})"));
        }
    }
    out.count("pair_checks", (m * m) as u64);
    let triangle = |i: usize, j: usize, k: usize| table[i][j] <= table[i][k] + table[k][j];
    if m <= EXHAUSTIVE_TRIPLES {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    out.require(triangle(i, j, k), || format!("triangle inequality at ({}, {}, {})", all[i], all[j], all[k]));
                }
            }
        }
        out.count("triple_checks", (m * m * m) as u64);
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..SAMPLED_TRIPLES {
            let (i, j, k) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
            out.require(triangle(i, j, k), || format!("triangle inequality at ({}, {}, {})", all[i], all[j], all[k]));
        }
        out.count("sampled_triple_checks", SAMPLED_TRIPLES as u64);
    }
    Ok(out)
}

fn counting_suite(spec: &FieldSpec, n: usize, cap: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    let q = spec.q() as u64;
    let all = all_subspaces(n, spec, cap)?;
    for k in 0..=n {
        let count = all.iter().filter(|s| s.dim() == k).count();
        out.require(BigUint::from(count) == qbinom(n, k, q), || format!("qbinom({n},{k}) differs from enumeration"));
    }
    out.count("qbinom_checks", n as u64 + 1);
    // For each A, tally B by (dim B, dim(A ∩ B)) and compare with the formula.
    let bad: Vec<String> = all
        .par_iter()
        .flat_map_iter(|a| {
            let mut tally = vec![vec![0u64; n + 1]; n + 1];
            for b in &all {
                let j = a.intersection_dim(spec, b).expect("same ambient space");
                tally[b.dim()][j] += 1;
            }
            let k = a.dim();
            let mut bad = Vec::new();
            for (l, row) in tally.iter().enumerate() {
                for (j, &found) in row.iter().enumerate() {
                    if BigUint::from(found) != intersection_count(n, k, l, j, q) {
                        bad.push(format!("intersection_count({n},{k},{l},{j}) differs from enumeration at A={a}"));
                    }
                }
            }
            bad
        })
        .collect();
    out.violations.extend(bad);
    out.count("intersection_checks", (all.len() * (n + 1) * (n + 1)) as u64);
    for k in 0..=n {
        for l in 0..=n {
            let total: BigUint = (0..=k.min(l)).map(|j| intersection_count(n, k, l, j, q)).sum();
            out.require(total == qbinom(n, l, q), || format!("intersection counts for k={k}, l={l} do not sum to qbinom"));
        }
    }
    out.count("total_probability_checks", ((n + 1) * (n + 1)) as u64);
    for m in 1..=n.max(1) {
        out.require(line_sum_inequality(m, q), || format!("line sum inequality at n={m}"));
    }
    out.count("line_sum_checks", n.max(1) as u64);
    Ok(out)
}

fn matching_suite(spec: &FieldSpec, n: usize, cap: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    let q = spec.q() as u64;
    for k in 0..=n / 2 {
        let g = build_gk(spec, n, k, cap)?;
        let degree = qpow(q, k * (n - k));
        out.require(degree == intersection_count(n, k, n - k, 0, q), || format!("degree formula at k={k}"));
        out.require(regularity_check(&g, &degree), || format!("G_{k} is not {degree}-regular"));
        let pairs = perfect_matching(&g)?;
        out.require(pairs.len() == g.left.len(), || format!("matching in G_{k} is not perfect"));
        for &(i, j) in &pairs {
            out.require(delta(spec, &g.left[i], &g.right[j])? == n, || {
                format!("matched pair ({}, {}) is not at distance n", g.left[i], g.right[j])
            });
        }
        out.count("matched_pairs", pairs.len() as u64);
        out.count("graphs", 1);
    }
    Ok(out)
}
