use std::sync::OnceLock;

use crate::error::{config, Error, Result};

static STANDARD: OnceLock<QppTable> = OnceLock::new();

/// `pi(i) = (f1*i + f2*i^2) mod len`, checked to be a permutation.
pub fn qpp_interleave(len: usize, f1: u64, f2: u64) -> Result<Vec<usize>> {
    if len == 0 {
        return config("interleaver length must be positive");
    }
    let n = len as u64;
    let perm: Vec<usize> = (0..n)
        .map(|i| ((f1 % n) * i % n + (f2 % n) * (i * i % n) % n) % n)
        .map(|v| v as usize)
        .collect();
    let mut seen = vec![false; len];
    for &p in &perm {
        if std::mem::replace(&mut seen[p], true) {
            return config(format!("QPP ({f1}, {f2}) is not a permutation of length {len}"));
        }
    }
    Ok(perm)
}

/// Supported turbo block lengths and their QPP coefficients.
#[derive(Clone, Debug)]
pub struct QppTable {
    rows: Vec<(usize, u64, u64)>,
}

impl QppTable {
    /// The table shipped in `data/qpp.txt` (the 188 LTE block sizes, 40..=6144).
    pub fn standard() -> &'static QppTable {
        STANDARD.get_or_init(|| Self::parse(include_str!("../../data/qpp.txt")).expect("bundled QPP table is valid"))
    }

    /// Parses `len f1 f2` rows; `#` starts a comment. Lengths must ascend.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<(usize, u64, u64)> = Vec::new();
        let mut offset = 0;
        for line in text.lines() {
            let body = line.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                let nums: Vec<u64> = body
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Parse {
                        offset,
                        message: format!("QPP row: {e}"),
                    })?;
                if nums.len() != 3 {
                    return Err(Error::Parse {
                        offset,
                        message: "QPP row needs len f1 f2".into(),
                    });
                }
                let len = nums[0] as usize;
                if rows.last().is_some_and(|r| r.0 >= len) {
                    return Err(Error::Parse {
                        offset,
                        message: "QPP lengths must ascend".into(),
                    });
                }
                rows.push((len, nums[1], nums[2]));
            }
            offset += line.len() + 1;
        }
        if rows.is_empty() {
            return config("empty QPP table");
        }
        Ok(Self { rows })
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.0)
    }

    pub fn rows(&self) -> &[(usize, u64, u64)] {
        &self.rows
    }

    pub fn params(&self, len: usize) -> Option<(u64, u64)> {
        self.rows
            .binary_search_by_key(&len, |r| r.0)
            .ok()
            .map(|i| (self.rows[i].1, self.rows[i].2))
    }

    /// Smallest supported length that holds `bits`.
    pub fn fit(&self, bits: usize) -> Option<usize> {
        self.rows.iter().map(|r| r.0).find(|&l| l >= bits)
    }

    pub fn max_len(&self) -> usize {
        self.rows.last().map_or(0, |r| r.0)
    }

    pub fn interleaver(&self, len: usize) -> Result<Vec<usize>> {
        let (f1, f2) = self
            .params(len)
            .ok_or_else(|| Error::Config(format!("unsupported turbo block length {len}")))?;
        qpp_interleave(len, f1, f2)
    }
}
