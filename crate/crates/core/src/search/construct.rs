use num_bigint::BigUint;

use crate::counting::qbinom;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::subspace::{enumerate_subspaces, reduce, Family, Subspace, Vector};

fn ball_size(n: usize, t: usize, q: u64) -> BigUint {
    (0..=t.min(n)).map(|i| qbinom(n, i, q)).sum()
}

fn check_cap(what: String, predicted: BigUint, cap: u64) -> Result<()> {
    if predicted > BigUint::from(cap) {
        Err(Error::CapExceeded { what, predicted, cap })
    } else {
        Ok(())
    }
}

/// F1: every subspace of dimension at most `t`.
pub fn construct_f1(spec: &FieldSpec, n: usize, t: usize, cap: u64) -> Result<Family> {
    let q = spec.q() as u64;
    check_cap(format!("ball of radius {t} in GF({q})^{n}"), ball_size(n, t, q), cap)?;
    let mut fam = Family::new(spec, n);
    for k in 0..=t.min(n) {
        for s in enumerate_subspaces(n, k, spec, cap)? {
            fam.insert(s)?;
        }
    }
    Ok(fam)
}

/// F2: F1 together with every (t+1)-space through the nonzero vector `x`.
pub fn construct_f2(spec: &FieldSpec, n: usize, t: usize, x: &Vector, cap: u64) -> Result<Family> {
    if x.ambient() != n {
        return Err(Error::AmbientMismatch {
            left: n,
            right: x.ambient(),
        });
    }
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    if t + 1 > n {
        return Err(Error::InvalidParameters(format!(
            "no {}-spaces in GF({})^{n}",
            t + 1,
            spec.q()
        )));
    }
    let q = spec.q() as u64;
    let total = ball_size(n, t, q) + qbinom(n - 1, t, q);
    check_cap(format!("ball plus star in GF({q})^{n}"), total, cap)?;
    let mut fam = construct_f1(spec, n, t, cap)?;
    for s in spaces_through(spec, n, t + 1, x, cap)? {
        fam.insert(s)?;
    }
    Ok(fam)
}

/// All `k`-spaces containing `x`: U ⊕ <x> for U a (k-1)-space of the
/// coordinate hyperplane {v : v_p = 0}, p the first nonzero coordinate of x.
pub(crate) fn spaces_through(spec: &FieldSpec, n: usize, k: usize, x: &Vector, cap: u64) -> Result<Vec<Subspace>> {
    let q = spec.q();
    let xp = x.pack(spec)?;
    let p = x.coords().iter().position(|c| !c.is_zero()).ok_or(Error::ZeroVector)?;
    let lift = |row: u64| -> u64 {
        let mut out = 0u64;
        for j in 0..n - 1 {
            let c = reduce::get(q, row, j);
            reduce::set(q, &mut out, if j < p { j } else { j + 1 }, c);
        }
        out
    };
    let mut out = Vec::new();
    for u in enumerate_subspaces(n - 1, k - 1, spec, cap)? {
        let mut rows: Vec<u64> = u.packed_rows().iter().map(|&r| lift(r)).collect();
        rows.push(xp);
        out.push(Subspace::from_packed(spec, n, rows));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{cross_intersecting_check, diameter};

    #[test]
    fn f1_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        let f = construct_f1(&f2, 3, 1, 1000).unwrap();
        assert_eq!((f.len(), diameter(&f2, &f)), (8, 2));
        for n in 1..6 {
            let f = construct_f1(&f2, n, 0, 1000).unwrap();
            assert_eq!((f.len(), diameter(&f2, &f)), (1, 0));
        }
        let f = construct_f1(&f2, 5, 2, 1000).unwrap();
        assert_eq!((f.len(), diameter(&f2, &f)), (187, 4));
        assert!(matches!(construct_f1(&f2, 8, 3, 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn f2_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        let f = construct_f2(&f2, 4, 1, &Vector::unit(4, 0), 1000).unwrap();
        assert_eq!((f.len(), diameter(&f2, &f)), (23, 3));
        assert!(cross_intersecting_check(&f2, &f, 2, 2, 3).unwrap());
        let x = Vector::unit(4, 0);
        assert!(f.slice(2).all(|s| s.contains(&f2, &x).unwrap()));

        let f3 = FieldSpec::new(3).unwrap();
        let f = construct_f2(&f3, 5, 1, &Vector::unit(5, 0), 10_000).unwrap();
        assert_eq!(f.len(), 1 + 121 + 40);

        assert!(matches!(construct_f2(&f2, 4, 1, &Vector::zero(4), 1000), Err(Error::ZeroVector)));
    }

    #[test]
    fn star_matches_filter() {
        let f3 = FieldSpec::new(3).unwrap();
        let x = Vector::from_indices(&[0, 2, 1, 1]);
        let star = spaces_through(&f3, 4, 2, &x, 10_000).unwrap();
        let filtered: Vec<_> = enumerate_subspaces(4, 2, &f3, 10_000)
            .unwrap()
            .filter(|s| s.contains(&f3, &x).unwrap())
            .collect();
        let mut sorted = star.clone();
        sorted.sort();
        assert_eq!(sorted, filtered);
    }
}
