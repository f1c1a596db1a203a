//! Case split for standard systems according to how often the quartic curve
//! sits in the base locus.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{anticanonical_degree, line_defects, DefectVector, FatPointSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Classification {
    Empty,
    /// `C.L >= 1`: the curve is not a base component.
    #[serde(rename = "one")]
    CaseOne {
        defects: DefectVector,
    },
    /// `(2m; m^8, m_9, ..., m_r)`.
    #[serde(rename = "two")]
    CaseTwo {
        m: i64,
    },
    /// `tC` is in the base locus with `1 <= t <= m_r` and `d >= m_1 + t`.
    #[serde(rename = "three")]
    CaseThree {
        defects: DefectVector,
        t: i64,
        b: usize,
        n: i64,
        u: i64,
    },
    /// The cubic cone with vertex `p_1` over the curve is a fixed component.
    Cone {
        residual: FatPointSystem,
        t: i64,
    },
    /// Tail multiplicities below `t` are raised to `t`.
    Truncate {
        replacement: FatPointSystem,
        t: i64,
        b: usize,
    },
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::Empty => "empty",
            Classification::CaseOne { .. } => "one",
            Classification::CaseTwo { .. } => "two",
            Classification::CaseThree { .. } => "three",
            Classification::Cone { .. } => "cone",
            Classification::Truncate { .. } => "truncate",
        }
    }
}

fn violated(msg: String) -> Error {
    Error::PreconditionViolated(msg)
}

/// `Some(d / 2)` when the system reads `(2m; m^8, ...)` with `r >= 8`.
pub fn is_case_two(sys: &FatPointSystem) -> Option<i64> {
    let d = sys.degree;
    if d % 2 != 0 || d <= 0 || sys.r() < 8 {
        return None;
    }
    let m = d / 2;
    sys.multiplicities[..8].iter().all(|&x| x == m).then_some(m)
}

/// `f(i) = 4d - (m_1 + ... + m_i) + m_i (i - 8)`.
fn b_criterion(sys: &FatPointSystem, prefix: i64, i: usize) -> i64 {
    4 * sys.degree - prefix + sys.m(i) * (i as i64 - 8)
}

/// Largest `i` in `[9, r]` with `f(i) >= 1`.
pub fn compute_b(sys: &FatPointSystem) -> Option<usize> {
    let mut prefix = 0;
    let mut best = None;
    for i in 1..=sys.r() {
        prefix += sys.m(i);
        if i >= 9 && b_criterion(sys, prefix, i) >= 1 {
            best = Some(i);
        }
    }
    best
}

/// `ceil((m_1 + ... + m_b - 4d + 1) / (b - 8))`.
pub fn compute_t(sys: &FatPointSystem, b: usize) -> i64 {
    assert!(b >= 9, "b must be at least 9, got {b}");
    let numerator: i64 = sys.multiplicities[..b].iter().sum::<i64>() - 4 * sys.degree + 1;
    ceil_div(numerator, b as i64 - 8)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    let q = a.div_euclid(b);
    if a.rem_euclid(b) == 0 {
        q
    } else {
        q + 1
    }
}

/// Classifies a standard, non-empty, normalized system.
pub fn classify(sys: &FatPointSystem) -> Result<Classification> {
    if !sys.is_standard() || !sys.is_normalized() {
        return Err(violated(format!(
            "{sys} is not a normalized standard system"
        )));
    }
    if sys.degree < 0 || sys.degree < sys.m(1) {
        return Ok(Classification::Empty);
    }
    classify_inner(sys, true)
}

fn classify_inner(sys: &FatPointSystem, allow_truncate: bool) -> Result<Classification> {
    let r = sys.r();
    let cl = anticanonical_degree(sys);
    if cl >= 1 {
        return Ok(Classification::CaseOne {
            defects: line_defects(sys),
        });
    }
    if r <= 7 {
        return Err(violated(format!(
            "{sys} is standard with r <= 7 but C.L = {cl} < 1"
        )));
    }
    if let Some(m) = is_case_two(sys) {
        return Ok(Classification::CaseTwo { m });
    }
    let b = compute_b(sys).ok_or_else(|| violated(format!("no admissible b for {sys}")))?;
    let t = compute_t(sys, b);
    if t < 1 {
        return Err(violated(format!("t = {t} is not positive for {sys}")));
    }
    if (t <= sys.m(r)) != (b == r) {
        return Err(violated(format!(
            "t <= m_r must hold exactly when b = r (t = {t}, b = {b}, r = {r}) for {sys}"
        )));
    }

    if b < r {
        if !allow_truncate {
            return Err(violated(format!("truncation of {sys} did not terminate")));
        }
        if !(sys.m(b + 1) < t && t <= sys.m(b)) {
            return Err(violated(format!(
                "truncation bound m_(b+1) < t <= m_b fails for {sys} (t = {t}, b = {b})"
            )));
        }
        let mut m = sys.multiplicities[..b].to_vec();
        m.resize(r, t);
        let replacement = FatPointSystem::new(sys.degree, m);
        match classify_inner(&replacement, false)? {
            Classification::CaseThree { t: t2, b: b2, .. } if t2 == t && b2 == r => {}
            Classification::Cone { t: t2, .. } if t2 == t => {}
            other => {
                return Err(violated(format!(
                    "truncated system {replacement} re-classified as {} instead of case three or cone with t = {t}",
                    other.tag()
                )))
            }
        }
        return Ok(Classification::Truncate { replacement, t, b });
    }

    let defects = line_defects(sys);
    let u = -cl;
    if sys.degree >= sys.m(1) + t {
        let n = u - (t - 1) * (r as i64 - 8);
        if !(0..=r as i64 - 9).contains(&n) {
            return Err(violated(format!(
                "n = {n} outside [0, {}] for {sys}",
                r as i64 - 9
            )));
        }
        return Ok(Classification::CaseThree {
            defects,
            t,
            b,
            n,
            u,
        });
    }

    if r < 10 || defects.get(r) <= 0 {
        return Err(violated(format!(
            "cone branch for {sys} needs r >= 10 and t_r > 0"
        )));
    }
    let mut m: Vec<i64> = sys.multiplicities.iter().map(|&x| x - 1).collect();
    m[0] -= 2;
    Ok(Classification::Cone {
        residual: FatPointSystem::new(sys.degree - 3, m),
        t,
    })
}
