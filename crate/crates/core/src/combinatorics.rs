//! The input datum `(d; m_1, ..., m_r)` and its closed-form numeric invariants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree-`d` surfaces in P3 with multiplicity at least `m_i` at the `i`-th
/// point of the elliptic quartic curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FatPointSystem {
    #[serde(rename = "d")]
    pub degree: i64,
    #[serde(rename = "m")]
    pub multiplicities: Vec<i64>,
}

impl FatPointSystem {
    pub fn new(degree: i64, multiplicities: impl Into<Vec<i64>>) -> Self {
        Self {
            degree,
            multiplicities: multiplicities.into(),
        }
    }

    /// Parses a degree and a multiplicity shorthand such as `"5,1x19"`.
    pub fn parse(degree: i64, multiplicities: &str) -> Result<Self> {
        Ok(Self::new(degree, parse_multiplicities(multiplicities)?))
    }

    pub fn r(&self) -> usize {
        self.multiplicities.len()
    }

    /// Multiplicity at 1-based position `i`, zero past the end.
    pub fn m(&self, i: usize) -> i64 {
        self.multiplicities.get(i - 1).copied().unwrap_or(0)
    }

    pub fn multiplicity_sum(&self) -> i64 {
        self.multiplicities.iter().sum()
    }

    /// Sum of the four largest multiplicities of a sorted system.
    pub fn top_four_sum(&self) -> i64 {
        self.multiplicities.iter().take(4).sum()
    }

    /// Clamps negative multiplicities to zero, sorts non-increasing and
    /// drops zeros.
    pub fn normalize(&self) -> Self {
        let mut multiplicities: Vec<i64> = self
            .multiplicities
            .iter()
            .map(|&m| m.max(0))
            .filter(|&m| m > 0)
            .collect();
        multiplicities.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(self.degree, multiplicities)
    }

    pub fn is_normalized(&self) -> bool {
        self.multiplicities.iter().all(|&m| m > 0) && is_sorted_desc(&self.multiplicities)
    }

    /// `m_1 >= ... >= m_r >= 0` and `2d >= m_1 + m_2 + m_3 + m_4`.
    pub fn is_standard(&self) -> bool {
        self.multiplicities.iter().all(|&m| m >= 0)
            && is_sorted_desc(&self.multiplicities)
            && 2 * self.degree >= self.top_four_sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("system serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            input: s.to_owned(),
            reason: e.to_string(),
        })
    }
}

fn is_sorted_desc(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

/// Compressed shorthand, e.g. `5,1x19`.
pub fn format_multiplicities(multiplicities: &[i64]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < multiplicities.len() {
        let m = multiplicities[i];
        let run = multiplicities[i..].iter().take_while(|&&x| x == m).count();
        if run > 1 {
            parts.push(format!("{m}x{run}"));
        } else {
            parts.push(m.to_string());
        }
        i += run;
    }
    parts.join(",")
}

impl fmt::Display for FatPointSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplicities.is_empty() {
            write!(f, "({};)", self.degree)
        } else {
            write!(
                f,
                "({}; {})",
                self.degree,
                format_multiplicities(&self.multiplicities)
            )
        }
    }
}

/// Parses `"5,1x19"` (also `"1 x 13"` and `"1^13"`) into a flat list.
pub fn parse_multiplicities(input: &str) -> Result<Vec<i64>> {
    let err = |reason: String| Error::Parse {
        input: input.to_owned(),
        reason,
    };
    let mut out = Vec::new();
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Ok(out);
    }
    for item in trimmed.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(err("empty entry".into()));
        }
        let (value, count) = match item.split_once(['x', 'X', '^']) {
            Some((v, c)) => (v.trim(), c.trim()),
            None => (item, "1"),
        };
        let value: i64 = value
            .parse()
            .map_err(|_| err(format!("bad multiplicity {value:?}")))?;
        let count: usize = count
            .parse()
            .map_err(|_| err(format!("bad repetition count {count:?}")))?;
        out.extend(std::iter::repeat_n(value, count));
    }
    Ok(out)
}

impl FromStr for FatPointSystem {
    type Err = Error;

    /// Accepts `"d; list"` or `"(d; list)"`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (d, m) = body.split_once(';').unwrap_or((body, ""));
        let degree = d.trim().parse().map_err(|_| Error::Parse {
            input: s.to_owned(),
            reason: format!("bad degree {:?}", d.trim()),
        })?;
        Self::parse(degree, m)
    }
}

/// Binomial coefficient with the total convention `binom(n, k) = 0` when
/// `n < k` or `n < 0`. Returns `None` on overflow.
pub fn checked_binom(n: i64, k: u32) -> Option<i64> {
    let k = i64::from(k);
    if n < 0 || n < k {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc.checked_mul(i128::from(n - i))? / i128::from(i + 1);
        if acc > i128::from(i64::MAX) {
            return None;
        }
    }
    i64::try_from(acc).ok()
}

/// Panics on overflow; use [`checked_binom`] when inputs are untrusted.
pub fn binom(n: i64, k: u32) -> i64 {
    checked_binom(n, k).unwrap_or_else(|| panic!("binom({n}, {k}) overflows i64"))
}

fn checked_sum(mut values: impl Iterator<Item = Option<i64>>, what: &'static str) -> Result<i64> {
    values
        .try_fold(0i64, |acc, v| v.and_then(|v| acc.checked_add(v)))
        .ok_or(Error::Overflow(what))
}

/// Number of linear conditions imposed by the fat points, `sum binom(m_i + 2, 3)`.
pub fn condition_count(sys: &FatPointSystem) -> Result<i64> {
    checked_sum(
        sys.multiplicities
            .iter()
            .map(|&m| m.checked_add(2).and_then(|n| checked_binom(n, 3))),
        "condition count",
    )
}

/// `binom(d + 3, 3) - sum binom(m_i + 2, 3) - 1`.
pub fn virtual_dim(sys: &FatPointSystem) -> Result<i64> {
    if sys.degree < 0 {
        return Err(Error::NegativeDegree(sys.degree));
    }
    let forms = sys
        .degree
        .checked_add(3)
        .and_then(|n| checked_binom(n, 3))
        .ok_or(Error::Overflow("virtual dimension"))?;
    forms
        .checked_sub(condition_count(sys)?)
        .and_then(|v| v.checked_sub(1))
        .ok_or(Error::Overflow("virtual dimension"))
}

/// `max(-1, v)`.
pub fn expected_dim(sys: &FatPointSystem) -> Result<i64> {
    Ok(virtual_dim(sys)?.max(-1))
}

/// Intersection of the system with the strict transform of the quartic
/// curve: `4d - sum m_i`.
pub fn anticanonical_degree(sys: &FatPointSystem) -> i64 {
    4 * sys.degree - sys.multiplicity_sum()
}

/// Multiplicities of the lines `l_i` forced into the base locus.
///
/// `l_1` is the line through `p_2, p_3`; `l_i` for `i >= 2` is the line
/// through `p_1, p_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DefectVector(pub Vec<i64>);

impl DefectVector {
    /// 1-based access.
    pub fn get(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// Indices `i` (1-based) with `t_i > 0`.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.0.len()).filter(|&i| self.get(i) > 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0)
    }

    /// `sum binom(t_i + 1, 3)`.
    pub fn correction(&self) -> i64 {
        self.0.iter().map(|&t| binom(t + 1, 3)).sum()
    }
}

pub fn line_defects(sys: &FatPointSystem) -> DefectVector {
    let d = sys.degree;
    let r = sys.r();
    let t = (1..=r)
        .map(|i| {
            if i == 1 {
                if r < 3 {
                    0
                } else {
                    (sys.m(2) + sys.m(3) - d).max(0)
                }
            } else {
                (sys.m(1) + sys.m(i) - d).max(0)
            }
        })
        .collect();
    DefectVector(t)
}
