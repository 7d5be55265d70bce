//! Hashin–Shtrikman type bounds for a geometrically isotropic two-phase
//! composite with transversely isotropic phases.
//!
//! The candidate `σ*` is first mapped to its Y-tensor, a fractional-linear
//! transform in which the bounds become two disks in the `(a_Y, c_Y)` plane
//! plus an interval for `b_Y`. Each disk belongs to a root `α` of the
//! quadratic making the two phase points concyclic on a circle tangent to
//! the `c` axis at `c = α`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfun::g;
use crate::tensor::{Matrix3, TIConductivity};
use crate::verdict::BoundsVerdict;

/// Relative threshold for poles and for the `a₁ = a₂` degeneracy.
pub const POLE_TOL: f64 = 1e-13;

/// Roots of the concyclicity quadratic. When `a₁ = a₂` the quadratic is
/// linear: `plus` holds the finite root and `minus` is `None` (the root
/// went to infinity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaPm {
    pub plus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minus: Option<f64>,
}

impl AlphaPm {
    pub fn degenerate(&self) -> bool {
        self.minus.is_none()
    }
}

pub fn alpha_pm(a1: f64, c1: f64, a2: f64, c2: f64) -> Result<AlphaPm> {
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(Error::InvalidConductivity("a₁ and a₂ must be positive".into()));
    }
    let scale = a1.max(a2).max(c1.abs()).max(c2.abs());
    let da = a1 - a2;
    if da.abs() <= POLE_TOL * a1.max(a2) {
        if (c1 - c2).abs() <= POLE_TOL * scale {
            return Err(Error::IdenticalPhases);
        }
        return Ok(AlphaPm { plus: 0.5 * (c1 + c2), minus: None });
    }
    let b = a1 * c2 - a2 * c1;
    let c = a1 * (a2 * a2 + c2 * c2) - a2 * (a1 * a1 + c1 * c1);
    let sqrt_disc = (a1 * a2).sqrt() * da.hypot(c1 - c2);
    // pair the roots through their product to avoid cancellation
    let (plus, minus) = if b >= 0.0 {
        let q = b + sqrt_disc;
        (q / da, c / q)
    } else {
        let q = b - sqrt_disc;
        (c / q, q / da)
    };
    Ok(AlphaPm { plus, minus: Some(minus) })
}

/// `t₁ = a/(a² + (c − α)²)` and `s₁ = 2t₁/(1 + g(b t₁)) − t₁`.
pub fn t1_s1(a1: f64, c1: f64, b1: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(a1 > 0.0 && b1 > 0.0) {
        return Err(Error::InvalidConductivity("a₁ and b₁ must be positive".into()));
    }
    let dc = c1 - alpha;
    let t1 = a1 / (a1 * a1 + dc * dc);
    let s1 = 2.0 * t1 / (1.0 + g(b1 * t1)?) - t1;
    Ok((t1, s1))
}

/// `a² + (c − α)² − a/t₁`; zero when `(a, c)` lies on the phase circle.
pub fn phase_circle_residual(a: f64, c: f64, alpha: f64, t1: f64) -> f64 {
    let dc = c - alpha;
    a * a + dc * dc - a / t1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsBranch {
    pub alpha: f64,
    pub t1: f64,
    pub s1: f64,
}

/// One of the two bounds on `(a_Y, c_Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HsBound {
    Disk(HsBranch),
    /// Limit of the disk as `α → ∞` when `a₁ = a₂`: `a_Y ≥ a_min`.
    HalfPlane { a_min: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsCoefficients {
    pub plus: HsBound,
    pub minus: HsBound,
    pub degenerate: bool,
}

/// Coefficients for phases already ordered so that `p1.b ≥ p2.b`.
pub fn hs_coefficients(p1: &TIConductivity, p2: &TIConductivity) -> Result<HsCoefficients> {
    if p1.b < p2.b {
        return Err(Error::InvalidInput("phases must be ordered with b₁ ≥ b₂".into()));
    }
    let roots = alpha_pm(p1.a, p1.c, p2.a, p2.c)?;
    let disk = |alpha: f64| -> Result<HsBound> {
        let (t1, s1) = t1_s1(p1.a, p1.c, p1.b, alpha)?;
        Ok(HsBound::Disk(HsBranch { alpha, t1, s1 }))
    };
    Ok(HsCoefficients {
        plus: disk(roots.plus)?,
        minus: match roots.minus {
            Some(alpha) => disk(alpha)?,
            None => HsBound::HalfPlane { a_min: p1.a },
        },
        degenerate: roots.degenerate(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YTensorTI {
    pub a_y: f64,
    pub c_y: f64,
    pub b_y: f64,
}

fn same_phase(s1: &Matrix3, s2: &Matrix3) -> bool {
    (s1 - s2).amax() <= POLE_TOL * s1.amax().max(s2.amax())
}

/// `−f₂σ₁ − f₁σ₂ + f₁f₂(σ₁ − σ₂)(f₁σ₁ + f₂σ₂ − σ*)⁻¹(σ₁ − σ₂)`.
pub fn y_tensor_matrix(s1: &Matrix3, s2: &Matrix3, f1: f64, sstar: &Matrix3) -> Result<Matrix3> {
    if same_phase(s1, s2) {
        return Err(Error::IdenticalPhases);
    }
    let f2 = 1.0 - f1;
    let mean = s1 * f1 + s2 * f2;
    let middle = mean - sstar;
    let sv = middle.singular_values();
    if sv.min() <= POLE_TOL * mean.norm() {
        return Err(Error::YTransformPole(
            "f₁σ₁ + f₂σ₂ − σ* is singular; σ* meets the arithmetic mean".into(),
        ));
    }
    let inv = middle
        .try_inverse()
        .ok_or_else(|| Error::YTransformPole("f₁σ₁ + f₂σ₂ − σ* is singular".into()))?;
    let d = s1 - s2;
    Ok(-s1 * f2 - s2 * f1 + d * inv * d * (f1 * f2))
}

/// Scalar form of [`y_tensor_matrix`]: the in-plane block acts as the
/// complex number `a + ic`, the axial entry separately.
pub fn y_tensor_ti(
    p1: &TIConductivity,
    p2: &TIConductivity,
    f1: f64,
    pstar: &TIConductivity,
) -> Result<YTensorTI> {
    if same_phase(&p1.to_matrix(), &p2.to_matrix()) {
        return Err(Error::IdenticalPhases);
    }
    let f2 = 1.0 - f1;
    let (z1, z2, zs) = (
        Complex64::new(p1.a, p1.c),
        Complex64::new(p2.a, p2.c),
        Complex64::new(pstar.a, pstar.c),
    );
    let mean = z1 * f1 + z2 * f2;
    let den = mean - zs;
    if den.norm() <= POLE_TOL * mean.norm() {
        return Err(Error::YTransformPole(
            "in-plane σ* equals the arithmetic mean of the phases".into(),
        ));
    }
    // with c₁ = c₂ = c* both dz and den are real, so Im z_Y = −c exactly
    let dz = z1 - z2;
    let zy = -z1 * f2 - z2 * f1 + dz * dz * (f1 * f2) / den;

    let b_mean = f1 * p1.b + f2 * p2.b;
    let b_den = b_mean - pstar.b;
    if b_den.abs() <= POLE_TOL * b_mean {
        return Err(Error::YTransformPole("b* equals the arithmetic mean ⟨b⟩".into()));
    }
    // −(f₂b₁ + f₁b₂) + f₁f₂(b₁ − b₂)²/b_den over a common denominator; the
    // numerator vanishes at the harmonic mean without cancellation
    let b_y = ((f2 * p1.b + f1 * p2.b) * pstar.b - p1.b * p2.b) / b_den;
    Ok(YTensorTI { a_y: zy.re, c_y: zy.im, b_y })
}

/// Inverse of the Y-transform: the `σ*` whose Y-tensor is `y`.
pub fn sigma_from_y(s1: &Matrix3, s2: &Matrix3, f1: f64, y: &Matrix3) -> Result<Matrix3> {
    let f2 = 1.0 - f1;
    let inner = y + s1 * f2 + s2 * f1;
    let inv = inner
        .try_inverse()
        .ok_or_else(|| Error::YTransformPole("Y + f₂σ₁ + f₁σ₂ is singular".into()))?;
    let d = s1 - s2;
    Ok(s1 * f1 + s2 * f2 - d * inv * d * (f1 * f2))
}

fn disk_residual(y: &YTensorTI, bound: &HsBound) -> f64 {
    match bound {
        HsBound::Disk(h) => {
            let dc = y.c_y + h.alpha;
            y.a_y * y.a_y + dc * dc - y.a_y / h.s1
        }
        HsBound::HalfPlane { a_min } => a_min - y.a_y,
    }
}

/// The two disk conditions on `(a_Y, c_Y)`.
pub fn hs_disk_check(y: &YTensorTI, h: &HsCoefficients, tol: f64) -> [BoundsVerdict; 2] {
    [("hs_disk_plus", &h.plus), ("hs_disk_minus", &h.minus)].map(|(name, bound)| {
        let mut inputs = vec![("a_y", y.a_y), ("c_y", y.c_y)];
        match bound {
            HsBound::Disk(b) => inputs.extend([("alpha", b.alpha), ("s1", b.s1)]),
            HsBound::HalfPlane { a_min } => inputs.push(("a_min", *a_min)),
        }
        BoundsVerdict::from_residual(name, disk_residual(y, bound), tol, &inputs)
    })
}

/// `0 ≤ b_Y ≤ b₁(1 − g)/g` with `g = g(b₁t₁)`, the finite form of
/// `1/b_Y + 1/b₁ ≥ 1/(b₁(1 − g))`; `b_Y = 0` passes.
pub fn b_hs_check(b_y: f64, b1: f64, t1: f64, tol: f64) -> Result<BoundsVerdict> {
    let gv = g(b1 * t1)?;
    let upper = b1 * (1.0 - gv) / gv;
    Ok(BoundsVerdict::from_residual(
        "hs_b",
        (-b_y).max(b_y - upper),
        tol,
        &[("b_y", b_y), ("b1", b1), ("t1", t1), ("upper", upper)],
    ))
}

fn b_check_for(y: &YTensorTI, b1: f64, bound: &HsBound, name: &str, tol: f64) -> Result<BoundsVerdict> {
    let mut v = match bound {
        HsBound::Disk(h) => b_hs_check(y.b_y, b1, h.t1, tol)?,
        // t₁ → 0 sends the upper limit to infinity
        HsBound::HalfPlane { .. } => BoundsVerdict::from_residual("hs_b", -y.b_y, tol, &[("b_y", y.b_y)]),
    };
    v.name = name.into();
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskGeometry {
    pub center: (f64, f64),
    pub radius: f64,
    pub tangent_point: (f64, f64),
}

impl DiskGeometry {
    fn tangent_at(alpha: f64, radius: f64) -> Self {
        DiskGeometry { center: (radius, alpha), radius, tangent_point: (0.0, alpha) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Boundary {
    Circle(DiskGeometry),
    VerticalLine { a: f64 },
}

/// Boundaries in the `(a, −c_Y)` plane, where the HS disks and the phase
/// circles share their tangency point on the `c` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsGeometry {
    pub phase: [Boundary; 2],
    pub hs: [Boundary; 2],
}

pub fn hs_geometry(h: &HsCoefficients) -> HsGeometry {
    let pair = |b: &HsBound| match b {
        HsBound::Disk(x) => (
            Boundary::Circle(DiskGeometry::tangent_at(x.alpha, 0.5 / x.t1)),
            Boundary::Circle(DiskGeometry::tangent_at(x.alpha, 0.5 / x.s1)),
        ),
        HsBound::HalfPlane { a_min } => {
            (Boundary::VerticalLine { a: *a_min }, Boundary::VerticalLine { a: *a_min })
        }
    };
    let (p0, h0) = pair(&h.plus);
    let (p1, h1) = pair(&h.minus);
    HsGeometry { phase: [p0, p1], hs: [h0, h1] }
}

/// Full evaluation for a candidate, after ordering the phases by `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HsEvaluation {
    /// True when the inputs were relabeled to put the larger `b` first.
    pub swapped: bool,
    pub f1: f64,
    pub phases: [TIConductivity; 2],
    pub coefficients: HsCoefficients,
    pub y: YTensorTI,
    /// `[plus, minus]` residuals of both phase points on each phase circle.
    pub phase_circle_residuals: [[f64; 2]; 2],
    pub verdicts: Vec<BoundsVerdict>,
}

pub fn evaluate_hs(
    f1: f64,
    p1: TIConductivity,
    p2: TIConductivity,
    candidate: TIConductivity,
    tol: f64,
) -> Result<HsEvaluation> {
    if !(f1 > 0.0 && f1 < 1.0) {
        return Err(Error::InvalidInput(format!("f1 must lie in (0, 1), got {f1}")));
    }
    for p in [&p1, &p2, &candidate] {
        p.validate()?;
    }
    let swapped = p1.b < p2.b;
    let (f1, p1, p2) = if swapped { (1.0 - f1, p2, p1) } else { (f1, p1, p2) };
    let coefficients = hs_coefficients(&p1, &p2)?;
    let y = y_tensor_ti(&p1, &p2, f1, &candidate)?;
    let on_circle = |b: &HsBound| match b {
        HsBound::Disk(h) => [
            phase_circle_residual(p1.a, p1.c, h.alpha, h.t1),
            phase_circle_residual(p2.a, p2.c, h.alpha, h.t1),
        ],
        HsBound::HalfPlane { a_min } => [p1.a - a_min, p2.a - a_min],
    };
    let mut verdicts: Vec<BoundsVerdict> = hs_disk_check(&y, &coefficients, tol).into();
    verdicts.push(b_check_for(&y, p1.b, &coefficients.plus, "hs_b_plus", tol)?);
    verdicts.push(b_check_for(&y, p1.b, &coefficients.minus, "hs_b_minus", tol)?);
    Ok(HsEvaluation {
        swapped,
        f1,
        phases: [p1, p2],
        phase_circle_residuals: [on_circle(&coefficients.plus), on_circle(&coefficients.minus)],
        coefficients,
        y,
        verdicts,
    })
}

/// In-plane 2×2 block of a matrix as the complex number `a + ic`; `None`
/// unless it has the form `[[a, −c], [c, a]]` within `tol`.
pub fn complex_of_block(m: &Matrix2<f64>, tol: f64) -> Option<Complex64> {
    let a = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let c = 0.5 * (m[(1, 0)] - m[(0, 1)]);
    let dev = (m[(0, 0)] - a).abs().max((m[(1, 0)] - c).abs());
    (dev <= tol).then_some(Complex64::new(a, c))
}
