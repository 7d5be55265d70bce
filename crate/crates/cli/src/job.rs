//! Job payloads, one per command. Unknown fields are rejected and every
//! number must be finite.

use hallbounds_core::gamma::L0Params;
use hallbounds_core::laminate::CounterexampleVariant;
use hallbounds_core::{Matrix3, TIConductivity, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Bounds,
    Hs,
    Laminate,
    Counterexample,
    GammaCheck,
    Plot,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::Hs => "hs",
            Command::Laminate => "laminate",
            Command::Counterexample => "counterexample",
            Command::GammaCheck => "gamma-check",
            Command::Plot => "plot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiInput {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TiInput {
    pub fn conductivity(&self) -> CliResult<TIConductivity> {
        Ok(TIConductivity::new(self.a, self.b, self.c)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedPhase {
    pub f: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsJob {
    pub phases: Vec<WeightedPhase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<TiInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsJob {
    pub f1: f64,
    pub phases: [TiInput; 2],
    pub candidate: TiInput,
}

/// A laminate phase, either transversely isotropic or a full matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseInput {
    Ti(TiInput),
    Matrix { matrix: [[f64; 3]; 3] },
}

impl PhaseInput {
    pub fn matrix(&self) -> Matrix3 {
        match self {
            PhaseInput::Ti(p) => Matrix3::new(p.a, -p.c, 0.0, p.c, p.a, 0.0, 0.0, 0.0, p.b),
            PhaseInput::Matrix { matrix: m } => Matrix3::from_fn(|i, j| m[i][j]),
        }
    }

    pub fn ti(&self) -> Option<TIConductivity> {
        match self {
            PhaseInput::Ti(p) => p.conductivity().ok(),
            PhaseInput::Matrix { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layering {
    pub direction: [f64; 3],
    pub fraction: f64,
}

impl Layering {
    pub fn direction(&self) -> Vector3 {
        Vector3::from(self.direction)
    }
}

/// Rank one with two phases and no `inner`; rank two with three phases,
/// the first filling the outer layers and the other two the inner laminate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaminateJob {
    pub phases: Vec<PhaseInput>,
    pub outer: Layering,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Layering>,
}

fn default_grid() -> Vec<f64> {
    hallbounds_core::laminate::DEFAULT_THETA_GRID.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleJob {
    pub kappa: f64,
    pub variant: CounterexampleVariant,
    #[serde(default = "default_grid")]
    pub theta_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaJob {
    pub l0: L0Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
}

/// JSON has no NaN or infinity literals and serde_json rejects overflowing
/// numbers, so a parsed job is finite throughout.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<T> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bounds_schema() {
        let j: BoundsJob = parse(
            r#"{"phases":[{"f":0.5,"a":4,"b":2,"c":0},{"f":0.5,"a":1,"b":1,"c":0}],"candidate":{"a":2,"b":1.333,"c":0}}"#,
        )
        .unwrap();
        assert_eq!(j.phases.len(), 2);
        assert_eq!(j.candidate.unwrap().b, 1.333);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_json() {
        assert!(parse::<BoundsJob>(r#"{"phases":[],"extra":1}"#).is_err());
        assert!(parse::<HsJob>(r#"{"f1":0.5"#).is_err());
        assert!(parse::<HsJob>(r#"{"f1":NaN}"#).is_err());
        assert!(parse::<CounterexampleJob>(r#"{"kappa":1e999,"variant":"plus_j"}"#).is_err());
    }

    #[test]
    fn laminate_phase_forms() {
        let j: LaminateJob = parse(
            r#"{"phases":[{"a":1,"b":2,"c":3},{"matrix":[[1,0,0],[0,1,0],[0,0,1]]}],
                "outer":{"direction":[0,0,1],"fraction":0.5}}"#,
        )
        .unwrap();
        assert_eq!(j.phases[0].matrix()[(1, 0)], 3.0);
        assert!(j.phases[1].ti().is_none());
        assert!(j.inner.is_none());
    }

    #[test]
    fn counterexample_default_grid() {
        let j: CounterexampleJob = parse(r#"{"kappa":17,"variant":"plus_j"}"#).unwrap();
        assert_eq!(j.theta_grid.len(), 5);
        assert_eq!(j.variant, CounterexampleVariant::PlusJ);
    }
}
