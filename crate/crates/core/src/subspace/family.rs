use std::collections::{BTreeMap, BTreeSet};

use super::Subspace;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;

/// A finite set of subspaces of one ambient space, kept in dimension slices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    q: u8,
    n: usize,
    slices: BTreeMap<usize, BTreeSet<Subspace>>,
    len: usize,
}

impl Family {
    pub fn new(spec: &FieldSpec, n: usize) -> Self {
        Family {
            q: spec.q(),
            n,
            slices: BTreeMap::new(),
            len: 0,
        }
    }

    pub fn from_members<I>(spec: &FieldSpec, n: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = Subspace>,
    {
        let mut f = Family::new(spec, n);
        for s in members {
            f.insert(s)?;
        }
        Ok(f)
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Returns whether the member was new.
    pub fn insert(&mut self, s: Subspace) -> Result<bool> {
        if s.q() != self.q {
            return Err(Error::FieldMismatch {
                left: self.q,
                right: s.q(),
            });
        }
        if s.ambient() != self.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: s.ambient(),
            });
        }
        let added = self.slices.entry(s.dim()).or_default().insert(s);
        if added {
            self.len += 1;
        }
        Ok(added)
    }

    pub fn contains(&self, s: &Subspace) -> bool {
        self.slices.get(&s.dim()).is_some_and(|sl| sl.contains(s))
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Subspace> + '_ {
        self.slices.values().flatten()
    }

    /// F(k): the members of dimension `k` (empty if none).
    pub fn slice(&self, k: usize) -> impl Iterator<Item = &Subspace> + '_ {
        self.slices.get(&k).into_iter().flatten()
    }

    pub fn slice_len(&self, k: usize) -> usize {
        self.slices.get(&k).map_or(0, |s| s.len())
    }

    /// Occupied dimensions.
    pub fn support(&self) -> BTreeSet<usize> {
        self.slices
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(&k, _)| k)
            .collect()
    }

    pub fn slice_sizes(&self) -> BTreeMap<usize, usize> {
        self.slices.iter().map(|(&k, s)| (k, s.len())).collect()
    }

    pub(crate) fn slices(&self) -> &BTreeMap<usize, BTreeSet<Subspace>> {
        &self.slices
    }

    /// Family file text: header `q n`, then one member per line.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{} {}\n", self.q, self.n);
        for s in self.iter() {
            out.push_str(&s.to_line());
            out.push('\n');
        }
        out
    }
}

/// Parses a family file. Blank lines and lines starting with `#` are skipped.
pub fn parse_family(text: &str) -> Result<(FieldSpec, Family)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header line \"q n\"".into()))?;
    let mut parts = header.split_whitespace();
    let (Some(q), Some(n), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Parse(format!("bad header {header:?}, expected \"q n\"")));
    };
    let q: u32 = q.parse().map_err(|_| Error::Parse(format!("bad field order {q:?}")))?;
    let n: usize = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad ambient dimension {n:?}")))?;
    let spec = FieldSpec::new(q)?;
    let mut fam = Family::new(&spec, n);
    for line in lines {
        fam.insert(Subspace::parse_line(&spec, n, line)?)?;
    }
    Ok((spec, fam))
}
