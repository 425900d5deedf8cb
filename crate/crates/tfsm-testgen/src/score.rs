//! Mutation scoring. The score is `killed / (total - equivalent)`, kept as
//! an exact integer count of tenths of a percent so every rendering shows
//! one decimal with no floating-point drift.

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Score {
    pub killed: usize,
    pub total: usize,
    /// Mutants excluded from the denominator as equivalent.
    pub equivalent: usize,
    /// The score in tenths of a percent, rounded half-up: 225 renders 22.5.
    pub tenths: u32,
}

impl Score {
    /// `"22.5"`, `"100.0"`, …
    pub fn percent(&self) -> String {
        format!("{}.{}", self.tenths / 10, self.tenths % 10)
    }
}

impl std::fmt::Display for Score {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}%", self.percent())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("no mutants to score")]
    NoMutants,
    #[error("no killable mutants: all {total} are marked equivalent")]
    AllEquivalent { total: usize },
    #[error("inconsistent counts: {equivalent} equivalent of {total} total")]
    EquivalentExceedsTotal { equivalent: usize, total: usize },
    #[error("inconsistent counts: {killed} killed of {killable} killable")]
    KilledExceedsKillable { killed: usize, killable: usize },
}

/// Exact mutation score.
pub fn mutation_score(killed: usize, total: usize, equivalent: usize) -> Result<Score, ScoreError> {
    if total == 0 {
        return Err(ScoreError::NoMutants);
    }
    if equivalent > total {
        return Err(ScoreError::EquivalentExceedsTotal { equivalent, total });
    }
    let killable = total - equivalent;
    if killable == 0 {
        return Err(ScoreError::AllEquivalent { total });
    }
    if killed > killable {
        return Err(ScoreError::KilledExceedsKillable { killed, killable });
    }
    let tenths = ((1000 * killed as u64 + killable as u64 / 2) / killable as u64) as u32;
    Ok(Score {
        killed,
        total,
        equivalent,
        tenths,
    })
}
