//! Subspaces of GF(q)^n in canonical reduced row echelon form.

mod enumerate;
mod family;
pub(crate) mod reduce;

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};

pub use enumerate::{all_subspaces, enumerate_subspaces, total_subspace_count, SubspaceIter};
pub use family::{parse_family, Family};
pub use reduce::max_ambient;

/// Default cap on the number of subspaces any single enumeration may produce.
pub const DEFAULT_CAP: u64 = 5_000_000;

/// A vector of GF(q)^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector {
    coords: Vec<FieldElement>,
}

impl Vector {
    pub fn new(coords: Vec<FieldElement>) -> Self {
        Vector { coords }
    }

    pub fn from_indices(indices: &[u8]) -> Self {
        Vector {
            coords: indices.iter().map(|&i| FieldElement(i)).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Vector {
            coords: vec![FieldElement::ZERO; n],
        }
    }

    /// The standard basis vector e_{i+1} (0-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.coords[i] = FieldElement::ONE;
        v
    }

    pub fn ambient(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub(crate) fn pack(&self, spec: &FieldSpec) -> Result<u64> {
        let q = spec.q();
        check_ambient(q, self.ambient())?;
        let mut row = 0u64;
        for (j, c) in self.coords.iter().enumerate() {
            if c.0 >= q {
                return Err(Error::InvalidParameters(format!(
                    "coordinate {} is not an element of GF({q})",
                    c.0
                )));
            }
            reduce::set(q, &mut row, j, c.0);
        }
        Ok(row)
    }

    pub(crate) fn unpack(q: u8, n: usize, row: u64) -> Self {
        Vector {
            coords: (0..n).map(|j| FieldElement(reduce::get(q, row, j))).collect(),
        }
    }

    /// Parses a vector written as base-q digits, e.g. `"1021"`.
    pub fn parse(spec: &FieldSpec, text: &str) -> Result<Self> {
        let coords = text
            .trim()
            .chars()
            .map(|ch| {
                ch.to_digit(10)
                    .filter(|&d| d < spec.q() as u32)
                    .map(|d| FieldElement(d as u8))
                    .ok_or_else(|| Error::Parse(format!("bad digit {ch:?} for GF({})", spec.q())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Vector { coords })
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.coords {
            write!(f, "{}", c.0)?;
        }
        Ok(())
    }
}

fn check_ambient(q: u8, n: usize) -> Result<()> {
    let max = max_ambient(q);
    if n > max {
        Err(Error::AmbientTooLarge { n, q, max })
    } else {
        Ok(())
    }
}

/// A subspace of GF(q)^n, stored as its RREF basis.
///
/// Rows are sorted by pivot column, every pivot entry is 1 and pivot columns
/// are zero outside their row, so two subspaces are equal exactly when their
/// stored rows are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    q: u8,
    n: u8,
    pivots: u64,
    rows: Vec<u64>,
}

impl Subspace {
    pub fn zero(spec: &FieldSpec, n: usize) -> Result<Self> {
        check_ambient(spec.q(), n)?;
        Ok(Subspace {
            q: spec.q(),
            n: n as u8,
            pivots: 0,
            rows: Vec::new(),
        })
    }

    pub fn full(spec: &FieldSpec, n: usize) -> Result<Self> {
        let rows: Vec<Vector> = (0..n).map(|i| Vector::unit(n, i)).collect();
        Self::span(spec, n, &rows)
    }

    /// The span of `rows`, canonicalised. An empty list gives the zero subspace.
    pub fn span(spec: &FieldSpec, n: usize, rows: &[Vector]) -> Result<Self> {
        check_ambient(spec.q(), n)?;
        let packed = rows
            .iter()
            .map(|v| {
                if v.ambient() != n {
                    return Err(Error::AmbientMismatch {
                        left: n,
                        right: v.ambient(),
                    });
                }
                v.pack(spec)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_packed(spec, n, packed))
    }

    pub(crate) fn from_packed(spec: &FieldSpec, n: usize, rows: Vec<u64>) -> Self {
        let (rows, pivots) = reduce::rref_rows(spec, n, rows);
        Subspace {
            q: spec.q(),
            n: n as u8,
            pivots,
            rows,
        }
    }

    /// Builds directly from rows already known to be in RREF.
    pub(crate) fn from_rref_unchecked(q: u8, n: usize, pivots: u64, rows: Vec<u64>) -> Self {
        Subspace {
            q,
            n: n as u8,
            pivots,
            rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n as usize
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.ambient())
            .filter(|&j| self.pivots & (1 << j) != 0)
            .collect()
    }

    pub fn basis(&self) -> Vec<Vector> {
        self.rows
            .iter()
            .map(|&r| Vector::unpack(self.q, self.ambient(), r))
            .collect()
    }

    pub(crate) fn packed_rows(&self) -> &[u64] {
        &self.rows
    }

    /// Bytes `[n, k, entries of the basis row by row]`; equal iff the
    /// subspaces are equal.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let n = self.ambient();
        let mut out = Vec::with_capacity(2 + n * self.dim());
        out.push(self.n);
        out.push(self.dim() as u8);
        for &r in &self.rows {
            out.extend((0..n).map(|j| reduce::get(self.q, r, j)));
        }
        out
    }

    fn check_same(&self, spec: &FieldSpec, other: &Subspace) -> Result<()> {
        self.check_field(spec)?;
        if other.q != self.q {
            return Err(Error::FieldMismatch {
                left: self.q,
                right: other.q,
            });
        }
        if other.n != self.n {
            return Err(Error::AmbientMismatch {
                left: self.ambient(),
                right: other.ambient(),
            });
        }
        Ok(())
    }

    fn check_field(&self, spec: &FieldSpec) -> Result<()> {
        if spec.q() != self.q {
            Err(Error::FieldMismatch {
                left: self.q,
                right: spec.q(),
            })
        } else {
            Ok(())
        }
    }

    /// dim(A + B) without materialising the sum.
    pub fn sum_dim(&self, spec: &FieldSpec, other: &Subspace) -> Result<usize> {
        self.check_same(spec, other)?;
        Ok(self.sum_dim_unchecked(spec, other))
    }

    pub(crate) fn sum_dim_unchecked(&self, spec: &FieldSpec, other: &Subspace) -> usize {
        let (big, small) = if self.dim() >= other.dim() {
            (self, other)
        } else {
            (other, self)
        };
        reduce::joint_rank(spec, self.ambient(), &big.rows, big.pivots, &small.rows)
    }

    pub fn sum(&self, spec: &FieldSpec, other: &Subspace) -> Result<Subspace> {
        self.check_same(spec, other)?;
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Ok(Self::from_packed(spec, self.ambient(), rows))
    }

    /// A ∩ B by the Zassenhaus construction: reduce the rows `[a | a]` and
    /// `[b | 0]`; rows whose left half vanishes carry a basis of the
    /// intersection in their right half.
    pub fn intersect(&self, spec: &FieldSpec, other: &Subspace) -> Result<Subspace> {
        self.check_same(spec, other)?;
        let n = self.ambient();
        let q = self.q;
        let unpack = |r: u64| (0..n).map(move |j| reduce::get(q, r, j));
        let mut stacked: Vec<Vec<u8>> = Vec::with_capacity(self.dim() + other.dim());
        for &r in &self.rows {
            stacked.push(unpack(r).chain(unpack(r)).collect());
        }
        for &r in &other.rows {
            stacked.push(unpack(r).chain(std::iter::repeat_n(0, n)).collect());
        }
        let reduced = reduce::rref_dense(spec, stacked);
        let sum_dim = reduced
            .iter()
            .filter(|row| row[..n].iter().any(|&x| x != 0))
            .count();
        let rows: Vec<u64> = reduced
            .iter()
            .filter(|row| row[..n].iter().all(|&x| x == 0))
            .map(|row| {
                let mut packed = 0u64;
                for (j, &x) in row[n..].iter().enumerate() {
                    reduce::set(q, &mut packed, j, x);
                }
                packed
            })
            .collect();
        let meet = Self::from_packed(spec, n, rows);
        assert_eq!(
            sum_dim + meet.dim(),
            self.dim() + other.dim(),
            "dimension formula violated"
        );
        Ok(meet)
    }

    /// dim(A ∩ B), via the dimension formula.
    pub fn intersection_dim(&self, spec: &FieldSpec, other: &Subspace) -> Result<usize> {
        Ok(self.dim() + other.dim() - self.sum_dim(spec, other)?)
    }

    /// Orthogonal complement under the standard bilinear form.
    pub fn perp(&self, spec: &FieldSpec) -> Result<Subspace> {
        self.check_field(spec)?;
        let n = self.ambient();
        let q = self.q;
        let mut rows = Vec::with_capacity(n - self.dim());
        for f in (0..n).filter(|&j| self.pivots & (1 << j) == 0) {
            let mut v = 0u64;
            reduce::set(q, &mut v, f, 1);
            for &r in &self.rows {
                let p = reduce::leading(q, r).unwrap();
                reduce::set(q, &mut v, p, spec.neg_raw(reduce::get(q, r, f)));
            }
            rows.push(v);
        }
        let out = Self::from_packed(spec, n, rows);
        debug_assert_eq!(out.dim(), n - self.dim());
        Ok(out)
    }

    pub fn contains(&self, spec: &FieldSpec, v: &Vector) -> Result<bool> {
        self.check_field(spec)?;
        if v.ambient() != self.ambient() {
            return Err(Error::AmbientMismatch {
                left: self.ambient(),
                right: v.ambient(),
            });
        }
        let packed = v.pack(spec)?;
        Ok(self.contains_packed(spec, packed))
    }

    pub(crate) fn contains_packed(&self, spec: &FieldSpec, mut v: u64) -> bool {
        // Eliminate each pivot column; what is left must vanish.
        let q = self.q;
        for &r in &self.rows {
            let p = reduce::leading(q, r).unwrap();
            let c = reduce::get(q, v, p);
            if c != 0 {
                v = reduce::axpy(spec, self.ambient(), v, spec.neg_raw(c), r);
            }
        }
        v == 0
    }

    /// Whether `other ⊆ self`.
    pub fn contains_subspace(&self, spec: &FieldSpec, other: &Subspace) -> Result<bool> {
        self.check_same(spec, other)?;
        Ok(other.dim() <= self.dim()
            && other.rows.iter().all(|&r| self.contains_packed(spec, r)))
    }

    /// One line: basis rows as base-q digits, rows joined by `;`. The zero
    /// subspace is written as a single all-zero row.
    pub fn to_line(&self) -> String {
        let n = self.ambient();
        if self.rows.is_empty() {
            return "0".repeat(n);
        }
        self.rows
            .iter()
            .map(|&r| Vector::unpack(self.q, n, r).to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Inverse of [`Subspace::to_line`]; accepts any spanning rows.
    pub fn parse_line(spec: &FieldSpec, n: usize, line: &str) -> Result<Self> {
        let rows = line
            .split(';')
            .map(|part| Vector::parse(spec, part))
            .collect::<Result<Vec<_>>>()?;
        for r in &rows {
            if r.ambient() != n {
                return Err(Error::Parse(format!(
                    "row {r} has length {}, expected {n}",
                    r.ambient()
                )));
            }
        }
        Self::span(spec, n, &rows)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(q={}, n={}, [{}])", self.q, self.n, self.to_line())
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Compare two packed rows entry by entry from column 0.
fn cmp_row(q: u8, a: u64, b: u64) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let col = reduce::leading(q, diff).unwrap();
    reduce::get(q, a, col).cmp(&reduce::get(q, b, col))
}

/// Canonical order: dimension, then pivot set (lexicographic on the sorted
/// column list), then basis entries row by row. Within one dimension this is
/// exactly the order produced by [`enumerate_subspaces`].
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.q, self.n, self.dim())
            .cmp(&(other.q, other.n, other.dim()))
            .then_with(|| {
                let diff = self.pivots ^ other.pivots;
                if diff == 0 {
                    Ordering::Equal
                } else if self.pivots & (diff & diff.wrapping_neg()) != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            })
            .then_with(|| {
                self.rows
                    .iter()
                    .zip(&other.rows)
                    .map(|(&a, &b)| cmp_row(self.q, a, b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[u8]) -> Vector {
        Vector::from_indices(x)
    }

    #[test]
    fn rref_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(Subspace::span(&f2, 3, &[]).unwrap().dim(), 0);
        let s = Subspace::span(&f2, 3, &[v(&[1, 1, 0]), v(&[0, 1, 1]), v(&[1, 0, 1])]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.to_line(), "101;011");
        let full = Subspace::span(&f2, 3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(full.dim(), 3);
        assert_eq!(full, Subspace::full(&f2, 3).unwrap());
    }

    #[test]
    fn rref_is_idempotent() {
        let f3 = FieldSpec::new(3).unwrap();
        let s = Subspace::span(&f3, 4, &[v(&[2, 1, 0, 1]), v(&[1, 1, 2, 2]), v(&[0, 2, 2, 1])]).unwrap();
        let again = Subspace::span(&f3, 4, &s.basis()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.canonical_bytes(), again.canonical_bytes());
        for row in s.basis() {
            let lead = row.coords().iter().position(|c| !c.is_zero()).unwrap();
            assert_eq!(row.coords()[lead], FieldElement::ONE);
        }
    }

    #[test]
    fn rejects_mismatched_rows() {
        let f2 = FieldSpec::new(2).unwrap();
        let err = Subspace::span(&f2, 3, &[v(&[1, 0])]).unwrap_err();
        assert!(matches!(err, Error::AmbientMismatch { .. }));
        let err = Subspace::span(&f2, 2, &[v(&[1, 2])]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameters(_)));
        let err = Subspace::zero(&FieldSpec::new(3).unwrap(), 17).unwrap_err();
        assert!(matches!(err, Error::AmbientTooLarge { .. }));
    }

    #[test]
    fn sum_and_intersection() {
        let f2 = FieldSpec::new(2).unwrap();
        let a = Subspace::span(&f2, 3, &[v(&[1, 0, 0])]).unwrap();
        let b = Subspace::span(&f2, 3, &[v(&[0, 1, 0])]).unwrap();
        assert_eq!(a.sum(&f2, &a).unwrap(), a);
        assert_eq!(a.intersect(&f2, &a).unwrap(), a);
        assert_eq!(a.sum(&f2, &b).unwrap().dim(), 2);
        assert_eq!(a.intersect(&f2, &b).unwrap().dim(), 0);

        let c = Subspace::span(&f2, 3, &[v(&[1, 1, 0])]).unwrap();
        let d = Subspace::span(&f2, 3, &[v(&[1, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(c.intersect(&f2, &d).unwrap(), c);
        assert!(d.contains_subspace(&f2, &c).unwrap());
    }

    #[test]
    fn ambient_mismatch_errors() {
        let f2 = FieldSpec::new(2).unwrap();
        let a = Subspace::zero(&f2, 3).unwrap();
        let b = Subspace::zero(&f2, 4).unwrap();
        assert!(matches!(a.sum(&f2, &b), Err(Error::AmbientMismatch { .. })));
        assert!(matches!(a.intersect(&f2, &b), Err(Error::AmbientMismatch { .. })));
        assert!(matches!(
            a.contains(&f2, &Vector::zero(4)),
            Err(Error::AmbientMismatch { .. })
        ));
        let f3 = FieldSpec::new(3).unwrap();
        let c = Subspace::zero(&f3, 3).unwrap();
        assert!(matches!(a.sum(&f2, &c), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn perp_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        let zero = Subspace::zero(&f2, 3).unwrap();
        assert_eq!(zero.perp(&f2).unwrap(), Subspace::full(&f2, 3).unwrap());
        let w = Subspace::span(&f2, 2, &[v(&[1, 1])]).unwrap();
        assert_eq!(w.perp(&f2).unwrap(), w);
    }

    #[test]
    fn containment() {
        let f2 = FieldSpec::new(2).unwrap();
        let line = Subspace::span(&f2, 2, &[v(&[1, 1])]).unwrap();
        assert!(line.contains(&f2, &Vector::zero(2)).unwrap());
        assert!(!line.contains(&f2, &v(&[1, 0])).unwrap());
        let plane = Subspace::span(&f2, 3, &[v(&[1, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert!(plane.contains(&f2, &v(&[1, 1, 1])).unwrap());
        assert!(Subspace::zero(&f2, 3).unwrap().contains(&f2, &Vector::zero(3)).unwrap());
    }

    #[test]
    fn line_round_trip() {
        let f9 = FieldSpec::new(9).unwrap();
        let s = Subspace::span(&f9, 4, &[v(&[3, 8, 0, 1]), v(&[0, 5, 7, 2])]).unwrap();
        let back = Subspace::parse_line(&f9, 4, &s.to_line()).unwrap();
        assert_eq!(s, back);
        let zero = Subspace::zero(&f9, 4).unwrap();
        assert_eq!(zero.to_line(), "0000");
        assert_eq!(Subspace::parse_line(&f9, 4, "0000").unwrap(), zero);
        assert!(Subspace::parse_line(&f9, 4, "123").is_err());
        assert!(Subspace::parse_line(&FieldSpec::new(2).unwrap(), 2, "12").is_err());
    }

    #[test]
    fn ordering_starts_with_dimension() {
        let f2 = FieldSpec::new(2).unwrap();
        let zero = Subspace::zero(&f2, 3).unwrap();
        let a = Subspace::span(&f2, 3, &[v(&[1, 0, 0])]).unwrap();
        let b = Subspace::span(&f2, 3, &[v(&[0, 1, 0])]).unwrap();
        let ab = a.sum(&f2, &b).unwrap();
        assert!(zero < a && a < b && b < ab);
    }
}
