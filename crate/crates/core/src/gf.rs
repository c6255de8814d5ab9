//! Table-driven arithmetic in GF(q) for the small prime powers used throughout
//! the crate.
//!
//! An element of GF(p^e) is a polynomial of degree < e over F_p; its index is
//! the base-p integer whose digits are the coefficients, constant term first.
//! Each order has one fixed modulus so that indices (and therefore canonical
//! subspace forms and enumeration orders) are reproducible.

use std::fmt;

use crate::error::{Error, Result};

/// Orders accepted by [`FieldSpec::new`].
pub const SUPPORTED_ORDERS: [u32; 7] = [2, 3, 4, 5, 7, 8, 9];

/// An element of GF(q), identified by its index in `0..q`.
///
/// Elements do not know their field; every operation goes through a
/// [`FieldSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    q: u8,
    p: u8,
    e: u8,
    /// Monic modulus, coefficients from the constant term up (length e + 1).
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Builds GF(q). Same as [`FieldSpec::new`].
pub fn field_make(q: u32) -> Result<FieldSpec> {
    FieldSpec::new(q)
}

fn fixed_modulus(q: u32) -> Option<(u8, u8, Vec<u8>)> {
    let m = match q {
        2 | 3 | 5 | 7 => (q as u8, 1, vec![0, 1]),
        4 => (2, 2, vec![1, 1, 1]),
        8 => (2, 3, vec![1, 1, 0, 1]),
        9 => (3, 2, vec![2, 2, 1]),
        _ => return None,
    };
    Some(m)
}

fn is_prime(p: u8) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p.
fn poly_rem(a: &[u8], m: &[u8], p: u8) -> Vec<u8> {
    let mut r: Vec<u8> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = (lead as u16 * c as u16) % p as u16;
                r[shift + i] = ((r[shift + i] as u16 + p as u16 - sub) % p as u16) as u8;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(m: &[u8], p: u8) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    // Trial division by every monic polynomial of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for low in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut x = low;
            for _ in 0..d {
                divisor.push((x % p as usize) as u8);
                x /= p as usize;
            }
            divisor.push(1);
            if poly_rem(m, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn digits(mut index: usize, p: u8, e: u8) -> Vec<u8> {
    (0..e)
        .map(|_| {
            let d = (index % p as usize) as u8;
            index /= p as usize;
            d
        })
        .collect()
}

fn from_digits(d: &[u8], p: u8) -> u8 {
    d.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize) as u8
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self> {
        let (p, e, modulus) = fixed_modulus(q).ok_or(Error::UnsupportedOrder(q))?;
        assert!(is_prime(p));
        assert!(is_irreducible(&modulus, p), "modulus for GF({q}) is reducible");

        let qn = q as usize;
        let polys: Vec<Vec<u8>> = (0..qn).map(|i| digits(i, p, e)).collect();
        let mut add = vec![0u8; qn * qn];
        let mut mul = vec![0u8; qn * qn];
        for a in 0..qn {
            for b in 0..qn {
                let sum: Vec<u8> = polys[a]
                    .iter()
                    .zip(&polys[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * qn + b] = from_digits(&sum, p);

                let mut prod = vec![0u8; 2 * e as usize - 1];
                for (i, &x) in polys[a].iter().enumerate() {
                    for (j, &y) in polys[b].iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as u16 + x as u16 * y as u16) % p as u16) as u8;
                    }
                }
                let mut red = poly_rem(&prod, &modulus, p);
                red.resize(e as usize, 0);
                mul[a * qn + b] = from_digits(&red, p);
            }
        }
        let neg = (0..qn)
            .map(|a| (0..qn).find(|&b| add[a * qn + b] == 0).unwrap() as u8)
            .collect();
        let inv = (0..qn)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..qn).find(|&b| mul[a * qn + b] == 1).unwrap() as u8
                }
            })
            .collect();

        Ok(FieldSpec {
            q: q as u8,
            p,
            e,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn characteristic(&self) -> u8 {
        self.p
    }

    pub fn degree(&self) -> u8 {
        self.e
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn element(&self, index: u8) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(Error::InvalidParameters(format!(
                "index {index} is not an element of GF({})",
                self.q
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(a.0, b.0))
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(a.0, self.neg[b.0 as usize]))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul_raw(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            Err(Error::DivisionByZero(self.q))
        } else {
            Ok(FieldElement(self.inv[a.0 as usize]))
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Order of `a` in the multiplicative group, `None` for zero.
    pub fn multiplicative_order(&self, a: FieldElement) -> Option<usize> {
        if a.is_zero() {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Smallest-index element of multiplicative order q - 1.
    pub fn generator(&self) -> FieldElement {
        self.elements()
            .find(|&a| self.multiplicative_order(a) == Some(self.q as usize - 1))
            .expect("multiplicative group of a finite field is cyclic")
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<FieldSpec> {
        SUPPORTED_ORDERS
            .iter()
            .map(|&q| FieldSpec::new(q).unwrap())
            .collect()
    }

    #[test]
    fn parameters() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!((f2.characteristic(), f2.degree()), (2, 1));
        let f4 = FieldSpec::new(4).unwrap();
        assert_eq!((f4.characteristic(), f4.degree()), (2, 2));
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(FieldSpec::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FieldSpec::new(9).unwrap().modulus(), &[2, 2, 1]);
    }

    #[test]
    fn rejects_unsupported() {
        for q in [0, 1, 6, 10, 11, 16, 27] {
            let err = FieldSpec::new(q).unwrap_err();
            assert!(matches!(err, Error::UnsupportedOrder(x) if x == q));
        }
        assert!(FieldSpec::new(6).unwrap_err().to_string().contains("unsupported order"));
    }

    #[test]
    fn small_products() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(f2.add(FieldElement(1), FieldElement(1)), FieldElement(0));
        let f4 = FieldSpec::new(4).unwrap();
        let w = FieldElement(2);
        assert_eq!(f4.mul(w, w), FieldElement(3));
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(f5.inv(FieldElement(2)).unwrap(), FieldElement(3));
    }

    #[test]
    fn inverse_of_zero() {
        for f in all_fields() {
            assert!(matches!(f.inv(FieldElement::ZERO), Err(Error::DivisionByZero(_))));
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in all_fields() {
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(f.sub(a, b), b), a);
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for f in all_fields() {
            let g = f.generator();
            assert_eq!(f.multiplicative_order(g), Some(f.q() as usize - 1));
            let mut seen = std::collections::BTreeSet::new();
            let mut x = FieldElement::ONE;
            for _ in 0..f.q() - 1 {
                seen.insert(x);
                x = f.mul(x, g);
            }
            assert_eq!(seen.len(), f.q() as usize - 1);
        }
    }

    #[test]
    fn characteristic_additive_order() {
        for f in all_fields() {
            let mut x = FieldElement::ZERO;
            for _ in 0..f.characteristic() {
                x = f.add(x, FieldElement::ONE);
            }
            assert_eq!(x, FieldElement::ZERO);
        }
    }

    #[test]
    fn irreducibility_check() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2)); // (x+1)^2
        assert!(is_irreducible(&[1, 1, 0, 1], 2));
        assert!(!is_irreducible(&[1, 1, 1, 1], 2));
        assert!(is_irreducible(&[2, 2, 1], 3));
        assert!(!is_irreducible(&[2, 0, 1], 3)); // x^2 - 1
    }
}
