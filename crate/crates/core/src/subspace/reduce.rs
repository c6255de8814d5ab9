//! Row arithmetic on packed vectors.
//!
//! A row is a `u64`. Over GF(2) bit `j` holds coordinate `j`; over larger
//! fields coordinate `j` occupies the nibble at bits `4j..4j+4`.

use crate::gf::FieldSpec;

pub(crate) const NIBBLE: u32 = 4;

/// Largest ambient dimension a packed row can hold for GF(q).
pub fn max_ambient(q: u8) -> usize {
    if q == 2 {
        64
    } else {
        16
    }
}

#[inline]
pub(crate) fn get(q: u8, row: u64, j: usize) -> u8 {
    if q == 2 {
        ((row >> j) & 1) as u8
    } else {
        ((row >> (NIBBLE as usize * j)) & 0xF) as u8
    }
}

#[inline]
pub(crate) fn set(q: u8, row: &mut u64, j: usize, v: u8) {
    if q == 2 {
        *row = (*row & !(1u64 << j)) | ((v as u64 & 1) << j);
    } else {
        let shift = NIBBLE as usize * j;
        *row = (*row & !(0xFu64 << shift)) | ((v as u64) << shift);
    }
}

/// First nonzero column of `row`, if any.
#[inline]
pub(crate) fn leading(q: u8, row: u64) -> Option<usize> {
    if row == 0 {
        None
    } else if q == 2 {
        Some(row.trailing_zeros() as usize)
    } else {
        Some(row.trailing_zeros() as usize / NIBBLE as usize)
    }
}

/// `row + c * other`, entrywise over the first `n` coordinates.
#[inline]
pub(crate) fn axpy(spec: &FieldSpec, n: usize, row: u64, c: u8, other: u64) -> u64 {
    let q = spec.q();
    if q == 2 {
        return if c == 0 { row } else { row ^ other };
    }
    if c == 0 || other == 0 {
        return row;
    }
    let mut out = 0u64;
    for j in 0..n {
        let a = get(q, row, j);
        let b = get(q, other, j);
        let v = spec.add_raw(a, spec.mul_raw(c, b));
        out |= (v as u64) << (NIBBLE as usize * j);
    }
    out
}

#[inline]
pub(crate) fn scale(spec: &FieldSpec, n: usize, row: u64, c: u8) -> u64 {
    let q = spec.q();
    if q == 2 || c == 1 {
        return row;
    }
    let mut out = 0u64;
    for j in 0..n {
        let v = spec.mul_raw(c, get(q, row, j));
        out |= (v as u64) << (NIBBLE as usize * j);
    }
    out
}

/// Gauss-Jordan elimination. Returns the nonzero rows of the reduced row
/// echelon form, sorted by pivot column, and the pivot columns as a bitmask.
pub(crate) fn rref_rows(spec: &FieldSpec, n: usize, mut rows: Vec<u64>) -> (Vec<u64>, u64) {
    let q = spec.q();
    let mut rank = 0;
    let mut pivots = 0u64;
    for col in 0..n {
        let Some(found) = (rank..rows.len()).find(|&i| get(q, rows[i], col) != 0) else {
            continue;
        };
        rows.swap(rank, found);
        let lead = get(q, rows[rank], col);
        if lead != 1 {
            rows[rank] = scale(spec, n, rows[rank], spec.inv_raw(lead));
        }
        let pivot_row = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank {
                let c = get(q, *row, col);
                if c != 0 {
                    *row = axpy(spec, n, *row, spec.neg_raw(c), pivot_row);
                }
            }
        }
        pivots |= 1 << col;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// Rank of the span of `base` (already in RREF with pivot mask `base_pivots`)
/// together with `extra`.
pub(crate) fn joint_rank(
    spec: &FieldSpec,
    n: usize,
    base: &[u64],
    base_pivots: u64,
    extra: &[u64],
) -> usize {
    let q = spec.q();
    // Echelon basis indexed by leading column; starts from `base`.
    let mut by_lead: [u64; 64] = [0; 64];
    let mut mask = base_pivots;
    for &r in base {
        by_lead[leading(q, r).unwrap()] = r;
    }
    let mut rank = base.len();
    for &r0 in extra {
        let mut r = r0;
        while let Some(c) = leading(q, r) {
            if mask & (1 << c) == 0 {
                let lead = get(q, r, c);
                by_lead[c] = scale(spec, n, r, spec.inv_raw(lead));
                mask |= 1 << c;
                rank += 1;
                break;
            }
            let coef = get(q, r, c);
            r = axpy(spec, n, r, spec.neg_raw(coef), by_lead[c]);
        }
        if rank == n {
            break;
        }
    }
    rank
}

/// Dense RREF over unpacked rows of arbitrary width; used where rows do not
/// fit a packed word (Zassenhaus on doubled width).
pub(crate) fn rref_dense(spec: &FieldSpec, mut rows: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = spec.inv_raw(rows[rank][col]);
        for x in rows[rank].iter_mut() {
            *x = spec.mul_raw(inv, *x);
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col] == 0 {
                continue;
            }
            let c = spec.neg_raw(row[col]);
            for (x, &p) in row.iter_mut().zip(&pivot_row) {
                *x = spec.add_raw(*x, spec.mul_raw(c, p));
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}
