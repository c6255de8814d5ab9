//! Exact subspace counts and the bound formulas built from them.
//!
//! Everything here is integer or rational arithmetic; nothing is rounded.

mod audit;

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use audit::{
    layer_bound_audit, line_sum_inequality, partition_audit, partition_counts, product_audit,
    tail_second_side_condition, tail_sum_first, tail_sum_second, AuditCheck, BoundReport,
    PartitionRow, ProductAudit, PARTITION_AUDIT_RANGE,
};

pub type BigCount = BigUint;
pub type ExactRational = BigRational;

thread_local! {
    /// Rows of the q-Pascal triangle, per q.
    static PASCAL: RefCell<HashMap<u64, Vec<Vec<BigUint>>>> = RefCell::new(HashMap::new());
}

/// Gaussian binomial coefficient: the number of `k`-dimensional subspaces of
/// GF(q)^n. Zero when `k > n`.
///
/// Uses the recurrence `[n,k] = [n-1,k-1] + q^k [n-1,k]`, memoised per thread.
pub fn qbinom(n: usize, k: usize, q: u64) -> BigCount {
    if k > n {
        return BigUint::zero();
    }
    if k == 0 || k == n {
        return BigUint::one();
    }
    PASCAL.with(|cell| {
        let mut map = cell.borrow_mut();
        let rows = map.entry(q).or_insert_with(|| vec![vec![BigUint::one()]]);
        while rows.len() <= n {
            let m = rows.len();
            let prev = &rows[m - 1];
            let mut row = Vec::with_capacity(m + 1);
            row.push(BigUint::one());
            let mut qk = BigUint::one();
            for j in 1..m {
                qk *= q;
                row.push(&prev[j - 1] + &qk * &prev[j]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        rows[n][k].clone()
    })
}

/// [`qbinom`] with signed arguments; zero outside `0 <= k <= n`.
pub fn qbinom_signed(n: i64, k: i64, q: u64) -> BigCount {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        qbinom(n as usize, k as usize, q)
    }
}

pub fn qpow(q: u64, e: usize) -> BigCount {
    num_traits::pow(BigUint::from(q), e)
}

/// Number of `l`-dimensional B with dim(A ∩ B) = j, for a fixed
/// `k`-dimensional A in GF(q)^n.
pub fn intersection_count(n: usize, k: usize, l: usize, j: usize, q: u64) -> BigCount {
    if k > n || l > n || j > k.min(l) || l - j > n - k {
        return BigUint::zero();
    }
    qpow(q, (k - j) * (l - j)) * qbinom(n - k, l - j, q) * qbinom(k, j, q)
}

/// Where (n, d) sits relative to the parameter ranges the bound is proved for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// n = d + 1.
    #[serde(rename = "n=d+1")]
    NextToDiameter,
    /// n > 2d.
    #[serde(rename = "n>2d")]
    Large,
    /// d + 2 <= n <= 2d: the bound is conjectural here.
    #[serde(rename = "gap")]
    Gap,
    /// n <= d: every family qualifies.
    #[serde(rename = "trivial")]
    Trivial,
}

impl Regime {
    pub fn classify(n: usize, d: usize) -> Regime {
        if n == d + 1 {
            Regime::NextToDiameter
        } else if n > 2 * d {
            Regime::Large
        } else if n <= d {
            Regime::Trivial
        } else {
            Regime::Gap
        }
    }

    pub fn is_covered(self) -> bool {
        matches!(self, Regime::NextToDiameter | Regime::Large)
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::NextToDiameter => "n=d+1",
            Regime::Large => "n>2d",
            Regime::Gap => "gap",
            Regime::Trivial => "trivial",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremBound {
    pub value: BigCount,
    pub regime: Regime,
}

/// Largest size of a diameter-`d` family of subspaces of GF(q)^n, as given by
/// the ball-plus-star formula with t = floor(d/2). For n <= d the value is the
/// total number of subspaces. In the gap regime the formula is returned but
/// is not a proved bound.
pub fn theorem_bound(n: usize, d: usize, q: u64) -> TheoremBound {
    let regime = Regime::classify(n, d);
    let value = if regime == Regime::Trivial {
        (0..=n).map(|i| qbinom(n, i, q)).sum()
    } else {
        let t = d / 2;
        let ball: BigUint = (0..=t).map(|i| qbinom(n, i, q)).sum();
        if d.is_multiple_of(2) {
            ball
        } else {
            ball + qbinom(n - 1, t, q)
        }
    };
    TheoremBound { value, regime }
}

/// Upper bound on an `s`-intersecting family of `k`-spaces inside an
/// `n`-dimensional space. Requires n >= 2k - s.
pub fn ekr_bound(n: usize, k: usize, s: i64, q: u64) -> Result<BigCount> {
    let (n_i, k_i) = (n as i64, k as i64);
    if n_i < 2 * k_i - s {
        return Err(Error::HypothesisViolated(format!(
            "intersecting-family bound needs n >= 2k - s, got n={n}, k={k}, s={s}"
        )));
    }
    Ok(qbinom_signed(n_i - s, k_i - s, q).max(qbinom_signed(2 * k_i - s, k_i - s, q)))
}

/// Whether the slice bound's underlying hypothesis (k >= t and n >= k + t)
/// holds.
pub fn slice_bound_applies(n: usize, k: usize, t: usize) -> bool {
    k >= t && n >= k + t
}

/// Cap on |F(k)| for a family of diameter at most 2t or 2t+1:
/// max{[n-k+t, t], [k+t, t]}. Falls back to [n, k] where the intersecting
/// bound does not apply.
pub fn slice_bound(n: usize, k: usize, t: usize, q: u64) -> BigCount {
    if !slice_bound_applies(n, k, t) {
        return qbinom(n, k, q);
    }
    qbinom(n - k + t, t, q).max(qbinom(k + t, t, q))
}

/// Number of t-spaces meeting a fixed M-space nontrivially:
/// [n, t] - q^{Mt} [n-M, t].
pub fn layer_t_bound(n: usize, t: usize, m: usize, q: u64) -> Result<BigCount> {
    if m > n {
        return Err(Error::InvalidParameters(format!("M={m} exceeds n={n}")));
    }
    let all = qbinom(n, t, q);
    let avoiding = qpow(q, m * t) * qbinom(n - m, t, q);
    assert!(avoiding <= all, "more t-spaces avoid Y than exist");
    Ok(all - avoiding)
}

pub(crate) fn to_rational(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

pub(crate) fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn qbinom_examples() {
        for q in [2, 3, 7] {
            for m in 0..8 {
                assert_eq!(qbinom(m, 0, q), n(1));
                assert_eq!(qbinom(m, m + 1, q), n(0));
            }
        }
        assert_eq!(qbinom(4, 2, 2), n(35));
        assert_eq!(qbinom(3, 1, 3), n(13));
        assert_eq!(qbinom(9, 2, 2), n(43435));
        assert_eq!(qbinom(5, 2, 2), n(155));
    }

    #[test]
    fn qbinom_symmetry() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            for m in 0..15 {
                for k in 0..=m {
                    assert_eq!(qbinom(m, k, q), qbinom(m, m - k, q));
                }
            }
        }
    }

    #[test]
    fn intersection_count_examples() {
        assert_eq!(intersection_count(3, 1, 1, 0, 2), n(6));
        assert_eq!(intersection_count(4, 2, 2, 2, 2), n(1));
        assert_eq!(intersection_count(2, 1, 1, 0, 2), n(2));
        assert_eq!(intersection_count(3, 1, 1, 2, 2), n(0));
    }

    #[test]
    fn intersection_counts_sum_to_layer() {
        for q in [2, 3, 4] {
            for m in 0..=7 {
                for k in 0..=m {
                    for l in 0..=m {
                        let total: BigUint = (0..=k.min(l)).map(|j| intersection_count(m, k, l, j, q)).sum();
                        assert_eq!(total, qbinom(m, l, q), "q={q} n={m} k={k} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn theorem_bound_examples() {
        assert_eq!(theorem_bound(3, 2, 2), TheoremBound { value: n(8), regime: Regime::NextToDiameter });
        assert_eq!(theorem_bound(4, 3, 2), TheoremBound { value: n(23), regime: Regime::NextToDiameter });
        assert_eq!(theorem_bound(5, 2, 2), TheoremBound { value: n(32), regime: Regime::Large });
        assert_eq!(theorem_bound(4, 2, 2).regime, Regime::Gap);
        assert_eq!(theorem_bound(3, 3, 2), TheoremBound { value: n(16), regime: Regime::Trivial });
        assert_eq!(theorem_bound(1, 0, 5).regime, Regime::NextToDiameter);
    }

    #[test]
    fn ekr_examples() {
        assert_eq!(ekr_bound(4, 2, 1, 2).unwrap(), n(7));
        for q in [2, 3, 9] {
            assert_eq!(ekr_bound(2, 1, 1, q).unwrap(), n(1));
        }
        assert_eq!(ekr_bound(5, 2, 2, 2).unwrap(), n(1));
        assert!(matches!(ekr_bound(3, 2, 0, 2), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn slice_bound_examples() {
        // Independent product evaluation of [9,2]_2.
        assert_eq!(n(511 * 255 / 3), n(43435));
        assert_eq!(slice_bound(10, 3, 2, 2), n(43435));
        for k in 1..6 {
            assert_eq!(slice_bound(2 * k, k, k, 2), qbinom(2 * k, k, 2));
        }
        assert_eq!(slice_bound(5, 1, 1, 2), n(31));
        // k < t: unconstrained.
        assert_eq!(slice_bound(6, 1, 2, 2), qbinom(6, 1, 2));
        assert!(!slice_bound_applies(5, 4, 2));
    }

    #[test]
    fn layer_t_examples() {
        assert_eq!(layer_t_bound(5, 1, 2, 2).unwrap(), n(3));
        for m in 1..7 {
            for t in 0..=m {
                assert_eq!(layer_t_bound(m, t, 0, 3).unwrap(), n(0));
            }
        }
        assert_eq!(layer_t_bound(6, 2, 3, 2).unwrap(), n(203));
        assert!(layer_t_bound(3, 1, 4, 2).is_err());
    }

    #[test]
    fn regime_labels() {
        assert_eq!(Regime::classify(2, 1).label(), "n=d+1");
        assert_eq!(Regime::classify(9, 4).label(), "n>2d");
        assert_eq!(Regime::classify(8, 4).label(), "gap");
        assert_eq!(Regime::classify(6, 4).label(), "gap");
        assert_eq!(Regime::classify(4, 4).label(), "trivial");
        assert_eq!(serde_json::to_string(&Regime::Large).unwrap(), "\"n>2d\"");
    }
}
