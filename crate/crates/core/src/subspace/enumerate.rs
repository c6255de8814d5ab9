use num_bigint::BigUint;

use super::{check_ambient, reduce, Subspace};
use crate::counting::qbinom;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;

/// Number of subspaces of GF(q)^n of every dimension.
pub fn total_subspace_count(n: usize, q: u8) -> BigUint {
    (0..=n).map(|k| qbinom(n, k, q as u64)).sum()
}

fn check_cap(what: impl Into<String>, predicted: BigUint, cap: u64) -> Result<()> {
    if predicted > BigUint::from(cap) {
        Err(Error::CapExceeded {
            what: what.into(),
            predicted,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Streams every `k`-dimensional subspace of GF(q)^n once, ordered by pivot
/// set (lexicographic) and then by free entries (odometer, last entry
/// fastest).
pub fn enumerate_subspaces(n: usize, k: usize, spec: &FieldSpec, cap: u64) -> Result<SubspaceIter<'_>> {
    if k > n {
        return Err(Error::InvalidParameters(format!(
            "dimension {k} exceeds ambient dimension {n}"
        )));
    }
    check_cap(
        format!("enumerating {k}-subspaces of GF({})^{n}", spec.q()),
        qbinom(n, k, spec.q() as u64),
        cap,
    )?;
    check_ambient(spec.q(), n)?;
    Ok(SubspaceIter::new(spec, n, k))
}

/// All subspaces of GF(q)^n in canonical order (dimension ascending).
pub fn all_subspaces(n: usize, spec: &FieldSpec, cap: u64) -> Result<Vec<Subspace>> {
    check_cap(
        format!("enumerating all subspaces of GF({})^{n}", spec.q()),
        total_subspace_count(n, spec.q()),
        cap,
    )?;
    check_ambient(spec.q(), n)?;
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(SubspaceIter::new(spec, n, k));
    }
    Ok(out)
}

pub struct SubspaceIter<'a> {
    spec: &'a FieldSpec,
    n: usize,
    pivots: Vec<usize>,
    /// (row, column) of every free entry, row-major.
    free: Vec<(usize, usize)>,
    digits: Vec<u8>,
    done: bool,
}

impl<'a> SubspaceIter<'a> {
    fn new(spec: &'a FieldSpec, n: usize, k: usize) -> Self {
        let pivots: Vec<usize> = (0..k).collect();
        let mut it = SubspaceIter {
            spec,
            n,
            pivots,
            free: Vec::new(),
            digits: Vec::new(),
            done: false,
        };
        it.reset_free();
        it
    }

    fn reset_free(&mut self) {
        let mask: u64 = self.pivots.iter().map(|&p| 1u64 << p).sum();
        self.free = self
            .pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| {
                (p + 1..self.n)
                    .filter(move |&j| mask & (1 << j) == 0)
                    .map(move |j| (i, j))
            })
            .collect();
        self.digits = vec![0; self.free.len()];
    }

    fn current(&self) -> Subspace {
        let q = self.spec.q();
        let mut rows: Vec<u64> = self
            .pivots
            .iter()
            .map(|&p| {
                let mut r = 0;
                reduce::set(q, &mut r, p, 1);
                r
            })
            .collect();
        for (&(i, j), &d) in self.free.iter().zip(&self.digits) {
            reduce::set(q, &mut rows[i], j, d);
        }
        let mask = self.pivots.iter().map(|&p| 1u64 << p).sum();
        Subspace::from_rref_unchecked(q, self.n, mask, rows)
    }

    /// Next k-combination of 0..n in lexicographic order.
    fn advance_pivots(&mut self) -> bool {
        let k = self.pivots.len();
        let n = self.n;
        let Some(i) = (0..k).rev().find(|&i| self.pivots[i] < n - k + i) else {
            return false;
        };
        self.pivots[i] += 1;
        for j in i + 1..k {
            self.pivots[j] = self.pivots[j - 1] + 1;
        }
        true
    }

    fn advance(&mut self) {
        let q = self.spec.q();
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < q {
                return;
            }
            *d = 0;
        }
        if self.advance_pivots() {
            self.reset_free();
        } else {
            self.done = true;
        }
    }
}

impl Iterator for SubspaceIter<'_> {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let s = self.current();
        self.advance();
        Some(s)
    }
}
