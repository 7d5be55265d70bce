use std::collections::BTreeMap;

use serde::Serialize;

/// Outcome of evaluating one bound.
///
/// `residual ≤ 0` means the bound holds; the verdict is `satisfied` iff
/// `residual ≤ tol`, so boundary cases (laminates often sit exactly on a
/// bound) do not flap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsVerdict {
    pub name: String,
    pub satisfied: bool,
    pub residual: f64,
    pub tol: f64,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundsVerdict {
    pub fn from_residual(
        name: impl Into<String>,
        residual: f64,
        tol: f64,
        inputs: &[(&str, f64)],
    ) -> Self {
        BoundsVerdict {
            name: name.into(),
            satisfied: residual <= tol,
            residual,
            tol,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// `true` when every verdict holds.
pub fn all_satisfied<'a>(verdicts: impl IntoIterator<Item = &'a BoundsVerdict>) -> bool {
    verdicts.into_iter().all(|v| v.satisfied)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_matches_flag() {
        let v = BoundsVerdict::from_residual("x", -0.2, 1e-9, &[("a", 1.0)]);
        assert!(v.satisfied);
        let v = BoundsVerdict::from_residual("x", 5e-10, 1e-9, &[]);
        assert!(v.satisfied);
        let v = BoundsVerdict::from_residual("x", 1e-3, 1e-9, &[]);
        assert!(!v.satisfied);
        assert!(!all_satisfied([&v]));
    }
}
