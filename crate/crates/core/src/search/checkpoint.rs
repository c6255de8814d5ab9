use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::metric::diameter;
use crate::subspace::{Family, Subspace};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Progress of one dimension window.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowState {
    pub x: usize,
    pub done: bool,
    pub nodes: u64,
    /// Hash of the root branching order, so a resumed run can tell whether
    /// `root_done` still refers to the same branches.
    pub root_digest: u64,
    pub root_done: usize,
    /// Best family found in this window that beats the incumbent.
    pub best: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub q: u8,
    pub n: usize,
    pub d: usize,
    pub incumbent: Vec<String>,
    pub windows: Vec<WindowState>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cp: Checkpoint = serde_json::from_str(&text)?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
                cp.version
            )));
        }
        Ok(cp)
    }

    /// Writes to a sibling temporary file and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let json = serde_json::to_string_pretty(self)?;
        fs::write(&tmp, json)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn matches(&self, q: u8, n: usize, d: usize) -> bool {
        self.q == q && self.n == n && self.d == d
    }
}

pub(crate) fn family_lines(members: &[Subspace]) -> Vec<String> {
    members.iter().map(Subspace::to_line).collect()
}

/// Parses stored members and checks that they form a family of diameter at
/// most `d`.
pub(crate) fn reverify(spec: &FieldSpec, n: usize, d: usize, lines: &[String]) -> Result<Family> {
    let mut fam = Family::new(spec, n);
    for line in lines {
        fam.insert(Subspace::parse_line(spec, n, line)?)?;
    }
    let found = diameter(spec, &fam);
    if found > d {
        return Err(Error::Checkpoint(format!(
            "stored family has diameter {found}, exceeding {d}"
        )));
    }
    Ok(fam)
}
