//! Repo-wide numerical tolerances.
//!
//! The defaults are fixed constants. A binary may install overrides once at
//! start-up (before any computation); library code only ever reads them.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Tolerance set used by every rank, membership and round-trip decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Group membership (`‖M*M − I‖_F`, determinant constraints).
    pub group: f64,
    /// Round trips such as `exp(log g) = g`.
    pub num: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Distance of an eigenvalue from −1 at which the logarithm is refused.
    pub branch: f64,
    /// Relator residual accepted for a point of the representation variety.
    pub rep: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        group: 1e-10,
        num: 1e-10,
        rank: 1e-8,
        branch: 1e-6,
        rep: 1e-9,
    };

    /// The active tolerance set: installed overrides, else the defaults.
    pub fn current() -> Tolerances {
        *ACTIVE.get().unwrap_or(&Self::DEFAULT)
    }

    /// Install overrides for the lifetime of the process. Returns `false` when
    /// a set was already installed (the first one wins).
    pub fn install(t: Tolerances) -> bool {
        ACTIVE.set(t).is_ok()
    }

    /// Apply a `name=value` override (names: group, num, rank, branch, rep).
    pub fn with_override(mut self, spec: &str) -> Result<Tolerances, String> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| format!("tolerance override `{spec}` is not of the form name=value"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("tolerance value `{value}` is not a number"))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(format!("tolerance `{name}` must be positive and finite"));
        }
        match name.trim() {
            "group" => self.group = value,
            "num" => self.num = value,
            "rank" => self.rank = value,
            "branch" => self.branch = value,
            "rep" => self.rep = value,
            other => return Err(format!("unknown tolerance `{other}`")),
        }
        Ok(self)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

static ACTIVE: OnceLock<Tolerances> = OnceLock::new();

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let t = Tolerances::DEFAULT.with_override("rank=1e-7").unwrap();
        assert_eq!(t.rank, 1e-7);
        assert_eq!(t.group, 1e-10);
        assert!(Tolerances::DEFAULT.with_override("rank").is_err());
        assert!(Tolerances::DEFAULT.with_override("bogus=1").is_err());
        assert!(Tolerances::DEFAULT.with_override("num=-1").is_err());
    }
}
