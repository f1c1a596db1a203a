//! Cubo-cubic Cremona reduction to standard form.

use serde::{Deserialize, Serialize};

use crate::combinatorics::FatPointSystem;
use crate::error::{Error, Result};

/// One elementary move of the reduction loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum StepKind {
    Sort,
    /// Adds `k` to the degree and the four leading multiplicities (no clamping).
    Cremona {
        k: i64,
    },
    /// 0-based positions whose negative multiplicity is reset to zero.
    ClampNegative {
        indices: Vec<usize>,
    },
    DropZeros,
    DeclaredEmpty {
        reason: String,
    },
}

impl StepKind {
    pub fn apply(&self, sys: &FatPointSystem) -> FatPointSystem {
        match self {
            StepKind::Sort => {
                let mut out = sys.clone();
                out.multiplicities.sort_unstable_by(|a, b| b.cmp(a));
                out
            }
            StepKind::Cremona { k } => cremona_unclamped(sys, *k),
            StepKind::ClampNegative { indices } => {
                let mut out = sys.clone();
                for &i in indices {
                    out.multiplicities[i] = 0;
                }
                out
            }
            StepKind::DropZeros => {
                let mut out = sys.clone();
                out.multiplicities.retain(|&m| m != 0);
                out
            }
            StepKind::DeclaredEmpty { .. } => sys.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub before: FatPointSystem,
    pub after: FatPointSystem,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    fn push(&mut self, kind: StepKind, current: &mut FatPointSystem) {
        let after = kind.apply(current);
        self.steps.push(ReductionStep {
            kind,
            before: current.clone(),
            after: after.clone(),
        });
        *current = after;
    }

    /// Re-applies every step to `initial`, checking each recorded `before`.
    pub fn replay(&self, initial: &FatPointSystem) -> Option<FatPointSystem> {
        let mut current = initial.clone();
        for step in &self.steps {
            if step.before != current {
                return None;
            }
            current = step.kind.apply(&current);
            if current != step.after {
                return None;
            }
        }
        Some(current)
    }

    pub fn cremona_ks(&self) -> impl Iterator<Item = i64> + '_ {
        self.steps.iter().filter_map(|s| match s.kind {
            StepKind::Cremona { k } => Some(k),
            _ => None,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }
}

/// `2d - (m_1 + m_2 + m_3 + m_4)` with absent points counted as zero.
pub fn cremona_k(sys: &FatPointSystem) -> i64 {
    2 * sys.degree - sys.top_four_sum()
}

fn cremona_unclamped(sys: &FatPointSystem, k: i64) -> FatPointSystem {
    let mut m = sys.multiplicities.clone();
    if m.len() < 4 {
        m.resize(4, 0);
    }
    for x in m.iter_mut().take(4) {
        *x += k;
    }
    FatPointSystem::new(sys.degree + k, m)
}

/// Cremona transformation based at the four points of highest multiplicity.
///
/// Expects a sorted system. The result has length `max(r, 4)`, clamped at
/// zero and not re-sorted.
pub fn cremona_quadruple(sys: &FatPointSystem) -> FatPointSystem {
    let mut out = cremona_unclamped(sys, cremona_k(sys));
    for x in out.multiplicities.iter_mut().take(4) {
        *x = (*x).max(0);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduced {
    pub system: FatPointSystem,
    pub empty: bool,
    pub trace: ReductionTrace,
}

fn sort_and_drop(trace: &mut ReductionTrace, current: &mut FatPointSystem) {
    if !current.multiplicities.windows(2).all(|w| w[0] >= w[1]) {
        trace.push(StepKind::Sort, current);
    }
    if current.multiplicities.contains(&0) {
        trace.push(StepKind::DropZeros, current);
    }
}

/// Brings a system to standard form, or detects that it is empty.
///
/// The loop applies the Cremona transformation while
/// `2d < m_1 + m_2 + m_3 + m_4` and `d >= m_1`. Afterwards the system is
/// empty iff `d < 0` or `d < m_1`; otherwise it is standard and normalized.
pub fn reduce_to_standard(sys: &FatPointSystem) -> Result<Reduced> {
    if sys.degree < 0 {
        return Err(Error::NegativeDegree(sys.degree));
    }
    if let Some(&m) = sys.multiplicities.iter().find(|&&m| m < 0) {
        return Err(Error::PreconditionViolated(format!(
            "negative multiplicity {m} in {sys}"
        )));
    }
    let cap = 10 * (sys.degree as usize + sys.r() + 1);
    let mut trace = ReductionTrace::default();
    let mut current = sys.clone();
    sort_and_drop(&mut trace, &mut current);

    let mut iterations = 0;
    while current.degree >= 0
        && 2 * current.degree < current.top_four_sum()
        && current.degree >= current.m(1)
    {
        iterations += 1;
        if iterations > cap {
            return Err(Error::IterationCap {
                cap,
                system: sys.to_string(),
            });
        }
        let k = cremona_k(&current);
        trace.push(StepKind::Cremona { k }, &mut current);
        let negative: Vec<usize> = current
            .multiplicities
            .iter()
            .enumerate()
            .filter(|(_, &m)| m < 0)
            .map(|(i, _)| i)
            .collect();
        if !negative.is_empty() {
            trace.push(StepKind::ClampNegative { indices: negative }, &mut current);
        }
        sort_and_drop(&mut trace, &mut current);
    }

    let reason = if current.degree < 0 {
        Some(format!("degree {} is negative", current.degree))
    } else if current.degree < current.m(1) {
        Some(format!(
            "degree {} is below the top multiplicity {}",
            current.degree,
            current.m(1)
        ))
    } else {
        None
    };
    let empty = reason.is_some();
    if let Some(reason) = reason {
        trace.push(StepKind::DeclaredEmpty { reason }, &mut current);
    }
    Ok(Reduced {
        system: current,
        empty,
        trace,
    })
}
