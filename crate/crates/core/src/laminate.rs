//! Exact effective conductivities of simple and two-scale (rank-two)
//! laminates, plus the high-contrast construction whose Hall coefficient
//! stays O(1) while every phase has a tiny or zero Hall coefficient.
//!
//! The rank-two geometry: slabs of phase 1 with normal `ξ¹` (volume fraction
//! `f`) alternate with a fine laminate of phases 2 and 3 with normal `ξ²`,
//! phase 2 taking fraction `g` of the fine layer. Fields are constant in each
//! of the three regions; continuity of tangential fields and of normal
//! fluxes reduces to a 6×6 system for the two jump amplitudes.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::bounds_elem::partial_isotropy_residual;
use crate::error::{Error, Result};
use crate::extrapolate::{observed_order, richardson};
use crate::tensor::{delta12, hall_j, symmetric_part_is_pd, Matrix3, Vector3};

/// Condition estimates above this are treated as a singular interface system.
pub const MAX_CONDITION: f64 = 1e13;

/// Tolerance on the fraction-weighted field average.
pub const FIELD_AVERAGE_TOL: f64 = 1e-10;

/// Default sweep in the contrast parameter, coarse to fine.
pub const DEFAULT_THETA_GRID: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub struct LaminateSpec {
    outer_direction: Vector3,
    outer_fraction: f64,
    inner_direction: Vector3,
    inner_fraction: f64,
    phases: [Matrix3; 3],
}

fn unit(v: &Vector3, what: &str) -> Result<Vector3> {
    let n = v.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidInput(format!("{what} must be a finite non-zero vector")));
    }
    Ok(v / n)
}

fn open_fraction(f: f64, what: &str) -> Result<f64> {
    if f.is_finite() && f > 0.0 && f < 1.0 {
        Ok(f)
    } else {
        Err(Error::InvalidInput(format!("{what} must lie in (0, 1), got {f}")))
    }
}

impl LaminateSpec {
    /// Directions are normalized here; fractions must lie in (0, 1) and every
    /// phase needs a positive definite symmetric part.
    pub fn new(
        outer_direction: Vector3,
        outer_fraction: f64,
        inner_direction: Vector3,
        inner_fraction: f64,
        phases: [Matrix3; 3],
    ) -> Result<Self> {
        for (i, p) in phases.iter().enumerate() {
            if p.iter().any(|x| !x.is_finite()) || !symmetric_part_is_pd(p) {
                return Err(Error::InvalidConductivity(format!(
                    "phase {} needs finite entries and a positive definite symmetric part",
                    i + 1
                )));
            }
        }
        Ok(LaminateSpec {
            outer_direction: unit(&outer_direction, "outer direction")?,
            outer_fraction: open_fraction(outer_fraction, "outer fraction")?,
            inner_direction: unit(&inner_direction, "inner direction")?,
            inner_fraction: open_fraction(inner_fraction, "inner fraction")?,
            phases,
        })
    }

    pub fn outer_direction(&self) -> &Vector3 {
        &self.outer_direction
    }
    pub fn outer_fraction(&self) -> f64 {
        self.outer_fraction
    }
    pub fn inner_direction(&self) -> &Vector3 {
        &self.inner_direction
    }
    pub fn inner_fraction(&self) -> f64 {
        self.inner_fraction
    }
    pub fn phases(&self) -> &[Matrix3; 3] {
        &self.phases
    }

    /// Volume fractions of the three regions.
    pub fn region_fractions(&self) -> [f64; 3] {
        let (f, g) = (self.outer_fraction, self.inner_fraction);
        [f, (1.0 - f) * g, (1.0 - f) * (1.0 - g)]
    }
}

/// Piecewise-constant field gradients and the interface jump amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminateFields {
    pub e1: Matrix3,
    pub e2: Matrix3,
    pub e3: Matrix3,
    pub eta1: Vector3,
    pub eta2: Vector3,
}

impl LaminateFields {
    pub fn identity() -> Self {
        LaminateFields {
            e1: Matrix3::identity(),
            e2: Matrix3::identity(),
            e3: Matrix3::identity(),
            eta1: Vector3::zeros(),
            eta2: Vector3::zeros(),
        }
    }

    pub fn regions(&self) -> [&Matrix3; 3] {
        [&self.e1, &self.e2, &self.e3]
    }
}

/// Norms of the equation groups the fields must satisfy; all should be at
/// rounding level relative to `flux_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpResiduals {
    pub inner_flux: f64,
    pub outer_flux: f64,
    pub inner_field: f64,
    pub outer_field: f64,
    pub average: f64,
    pub flux_scale: f64,
}

impl JumpResiduals {
    pub fn max_relative(&self) -> f64 {
        let s = self.flux_scale.max(f64::MIN_POSITIVE);
        (self.inner_flux / s)
            .max(self.outer_flux / s)
            .max(self.inner_field)
            .max(self.outer_field)
            .max(self.average)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaminateSolution {
    pub sigma_star: Matrix3,
    pub fields: LaminateFields,
    /// 2-norm condition number of the reduced interface system.
    pub condition: f64,
    pub residuals: JumpResiduals,
}

/// Checks every transmission condition for a candidate set of fields.
pub fn jump_residuals(spec: &LaminateSpec, fields: &LaminateFields) -> JumpResiduals {
    let [s1, s2, s3] = &spec.phases;
    let (x1, x2) = (&spec.outer_direction, &spec.inner_direction);
    let (f, g) = (spec.outer_fraction, spec.inner_fraction);
    let LaminateFields { e1, e2, e3, eta1, eta2 } = fields;
    let fine_field = e2 * g + e3 * (1.0 - g);
    let fine_flux = s2 * e2 * g + s3 * e3 * (1.0 - g);
    let j1 = s1 * e1;
    JumpResiduals {
        inner_flux: ((s2 * e2 - s3 * e3).transpose() * x2).norm(),
        outer_flux: ((j1 - fine_flux).transpose() * x1).norm(),
        inner_field: (e2 - e3 - x2 * eta2.transpose()).norm(),
        outer_field: (e1 - fine_field - x1 * eta1.transpose()).norm(),
        average: (e1 * f + fine_field * (1.0 - f) - Matrix3::identity()).norm(),
        flux_scale: j1.norm(),
    }
}

/// `Σ fᵢ Eᵢᵀ σᵢ Eᵢ`, after checking the fields average to the identity.
pub fn effective_from_fields(
    fractions: [f64; 3],
    phases: &[Matrix3; 3],
    fields: &LaminateFields,
) -> Result<Matrix3> {
    let e = fields.regions();
    let mut avg = Matrix3::zeros();
    let mut scale: f64 = 1.0;
    for i in 0..3 {
        avg += e[i] * fractions[i];
        scale = scale.max(e[i].norm());
    }
    let dev = (avg - Matrix3::identity()).norm();
    if dev > FIELD_AVERAGE_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "fields do not average to the identity (deviation {dev:e})"
        )));
    }
    let mut sigma = Matrix3::zeros();
    for i in 0..3 {
        sigma += e[i].transpose() * phases[i] * e[i] * fractions[i];
    }
    Ok(sigma)
}

/// Solves the two-scale laminate exactly.
pub fn rank_two_effective(spec: &LaminateSpec) -> Result<LaminateSolution> {
    let [s1, s2, s3] = &spec.phases;
    let (x1, x2) = (spec.outer_direction, spec.inner_direction);
    let (f, g) = (spec.outer_fraction, spec.inner_fraction);

    let quad = |s: &Matrix3, u: &Vector3, v: &Vector3| u.dot(&(s * v));
    let fine = s2 * g + s3 * (1.0 - g);
    let contrast = s2 - s3;
    let v1 = (s1 - fine).transpose() * x1;
    let v2 = contrast.transpose() * x2;
    let k2 = (1.0 - g) * quad(s2, &x2, &x2) + g * quad(s3, &x2, &x2);

    // Each block is a scalar multiple of I₃.
    let coeff = SMatrix::<f64, 2, 2>::new(
        quad(s1, &x1, &x1) - f * x1.dot(&v1),
        -g * (1.0 - g) * quad(&contrast, &x1, &x2),
        -f * x1.dot(&v2),
        k2,
    );
    let system = coeff.kronecker(&Matrix3::identity());
    let mut rhs = SVector::<f64, 6>::zeros();
    rhs.fixed_rows_mut::<3>(0).copy_from(&(-v1));
    rhs.fixed_rows_mut::<3>(3).copy_from(&(-v2));

    let sv = system.singular_values();
    let condition = sv.max() / sv.min();
    let degenerate = |reason: &str| Error::DegenerateLamination { reason: reason.into(), condition };
    if !(condition.is_finite() && condition <= MAX_CONDITION) {
        return Err(degenerate("interface system is singular"));
    }
    let x = system
        .full_piv_lu()
        .solve(&rhs)
        .ok_or_else(|| degenerate("interface system is singular"))?;
    let eta1: Vector3 = x.fixed_rows::<3>(0).into();
    let eta2: Vector3 = x.fixed_rows::<3>(3).into();

    let m = Matrix3::identity() - x1 * eta1.transpose() * f;
    let jump2 = x2 * eta2.transpose();
    let fields = LaminateFields {
        e1: m + x1 * eta1.transpose(),
        e2: m + jump2 * (1.0 - g),
        e3: m - jump2 * g,
        eta1,
        eta2,
    };
    let sigma_star = effective_from_fields(spec.region_fractions(), &spec.phases, &fields)?;
    let residuals = jump_residuals(spec, &fields);
    Ok(LaminateSolution { sigma_star, fields, condition, residuals })
}

/// Simple laminate of `sa` (fraction `f`) and `sb` with normal `xi`, solved
/// as a two-scale laminate whose fine layer is homogeneous.
pub fn rank_one_effective(sa: &Matrix3, sb: &Matrix3, f: f64, xi: &Vector3) -> Result<Matrix3> {
    let spec = LaminateSpec::new(*xi, f, *xi, 0.5, [*sa, *sb, *sb])?;
    Ok(rank_two_effective(&spec)?.sigma_star)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleVariant {
    /// Third phase `2I + J`.
    PlusJ,
    /// Third phase with a unit Hall block and a weaker axial conductivity.
    HallBlock,
}

impl CounterexampleVariant {
    pub fn third_phase(self) -> Matrix3 {
        match self {
            CounterexampleVariant::PlusJ => Matrix3::identity() * 2.0 + hall_j(),
            CounterexampleVariant::HallBlock => {
                Matrix3::new(2.0, -1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.5)
            }
        }
    }

    /// Limit of the effective Hall coefficient as θ → 0.
    pub fn limit_hall(self, kappa: f64) -> f64 {
        match self {
            CounterexampleVariant::PlusJ => -kappa / 17.0,
            CounterexampleVariant::HallBlock => kappa / 13.0,
        }
    }
}

/// The high-contrast two-scale laminate at contrast parameter `theta`.
pub fn counterexample_spec(theta: f64, kappa: f64, v: CounterexampleVariant) -> Result<LaminateSpec> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidInput(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidInput(format!("kappa must be finite and positive, got {kappa}")));
    }
    let stiff = kappa / (theta * theta);
    LaminateSpec::new(
        Vector3::new(0.0, theta, 1.0),
        1.0 - theta,
        Vector3::new(0.0, 1.0, 1.0),
        0.5,
        [
            Matrix3::from_diagonal(&Vector3::new(stiff, stiff, 1.0)),
            Matrix3::identity(),
            v.third_phase(),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub theta: f64,
    /// `(θ/2)·Δ₁₂(E³)`, the Hall coefficient predicted from the fine-layer field.
    pub c_star: f64,
    /// (2,1) entry of the antisymmetric part of the computed σ*.
    pub antisym_21: f64,
    pub minor_e2: f64,
    pub minor_e3: f64,
    pub partial_iso_residual: f64,
    pub condition: f64,
    pub max_jump_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleSweep {
    pub kappa: f64,
    pub variant: CounterexampleVariant,
    pub points: Vec<SweepPoint>,
    /// First-order Richardson limit from the two finest points.
    pub limit_c: f64,
    /// Observed order from the three finest points, when there are three
    /// and the data is monotone.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_order: Option<f64>,
}

pub fn counterexample_sweep(
    kappa: f64,
    v: CounterexampleVariant,
    thetas: &[f64],
) -> Result<CounterexampleSweep> {
    if thetas.len() < 2 {
        return Err(Error::InvalidInput("sweep needs at least two theta values".into()));
    }
    if thetas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("theta grid must be strictly decreasing".into()));
    }
    let mut points = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let spec = counterexample_spec(theta, kappa, v)?;
        let sol = rank_two_effective(&spec)?;
        let s = &sol.sigma_star;
        let minor_e3 = delta12(&sol.fields.e3);
        points.push(SweepPoint {
            theta,
            c_star: 0.5 * theta * minor_e3,
            antisym_21: 0.5 * (s[(1, 0)] - s[(0, 1)]),
            minor_e2: delta12(&sol.fields.e2),
            minor_e3,
            partial_iso_residual: partial_isotropy_residual(s),
            condition: sol.condition,
            max_jump_residual: sol.residuals.max_relative(),
        });
    }
    let n = points.len();
    let (p, q) = (&points[n - 2], &points[n - 1]);
    let limit_c = richardson(p.theta, p.c_star, q.theta, q.c_star, 1.0);
    let observed_order = if n >= 3 {
        let t = &points[n - 3..];
        observed_order(
            [t[0].theta, t[1].theta, t[2].theta],
            [t[0].c_star, t[1].c_star, t[2].c_star],
        )
        .ok()
    } else {
        None
    };
    Ok(CounterexampleSweep { kappa, variant: v, points, limit_c, observed_order })
}
