use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of a question that may only be semi-decidable at a finite horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// Not decided by the data available up to `horizon`.
    Undetermined { horizon: u128 },
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(self) -> bool {
        matches!(self, Verdict::Fails)
    }

    pub fn is_undetermined(self) -> bool {
        matches!(self, Verdict::Undetermined { .. })
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    /// Conjunction: any `Fails` wins, then any `Undetermined`.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Undetermined { horizon: a }, Verdict::Undetermined { horizon: b }) => {
                Verdict::Undetermined { horizon: a.max(b) }
            }
            (u @ Verdict::Undetermined { .. }, _) | (_, u @ Verdict::Undetermined { .. }) => u,
            _ => Verdict::Holds,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undetermined { .. } => "undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Undetermined { horizon } => write!(f, "undetermined(H={horizon})"),
            v => f.write_str(v.label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction() {
        let u = Verdict::Undetermined { horizon: 5 };
        assert_eq!(Verdict::Holds.and(Verdict::Holds), Verdict::Holds);
        assert_eq!(Verdict::Holds.and(u), u);
        assert_eq!(u.and(Verdict::Fails), Verdict::Fails);
        assert_eq!(
            u.and(Verdict::Undetermined { horizon: 9 }),
            Verdict::Undetermined { horizon: 9 }
        );
    }
}
