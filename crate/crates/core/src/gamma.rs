//! The reference-medium operator behind the Hashin–Shtrikman bounds.
//!
//! For a symmetric 6×6 reference tensor `L₀ = [[C₁, C₂], [C₂ᵀ, C₃]]` with the
//! five-parameter transversely isotropic pattern, `Γ(ξ)` maps `A` to the
//! unique `B` with `Γ₁(ξ)B = B` and `Γ₁(ξ)(A − L₀B) = 0`, where `Γ₁(ξ)`
//! projects onto the (curl-free, divergence-free) pair for wave vector `ξ`.
//! Its sphere average has a closed form in terms of [`g`](crate::gfun::g).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds_hs::{HsBranch, YTensorTI};
use crate::error::{Error, Result};
use crate::gfun::g;
use crate::quadrature::gauss_legendre;
use crate::tensor::{asymmetry, hall_j, min_eigenvalue_dyn, Matrix3, Matrix6, Vector3};
use crate::verdict::BoundsVerdict;

/// Entrywise Cauchy tolerance for [`gamma_avg_adaptive`].
pub const CAUCHY_TOL: f64 = 1e-11;
const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L0Params {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
}

impl L0Params {
    pub fn new(t1: f64, t2: f64, t3: f64, t4: f64, t5: f64) -> Result<Self> {
        let l0 = L0Params { t1, t2, t3, t4, t5 };
        l0.validate()?;
        Ok(l0)
    }

    /// `L₀ ≥ 0`: non-negative diagonal parameters and `t₁t₃ ≥ t₂²`
    /// (up to rounding, so `t₃ = t₂²/t₁` is admitted).
    pub fn validate(&self) -> Result<()> {
        let L0Params { t1, t2, t3, t4, t5 } = *self;
        if [t1, t2, t3, t4, t5].iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("reference parameters must be finite".into()));
        }
        if t1 < 0.0 || t3 < 0.0 || t4 < 0.0 || t5 < 0.0 {
            return Err(Error::InvalidInput("t1, t3, t4, t5 must be non-negative".into()));
        }
        let (p, q) = (t1 * t3, t2 * t2);
        if p - q < -1e-12 * p.max(q) {
            return Err(Error::InvalidInput(format!(
                "reference tensor is not positive semidefinite: t1·t3 = {p} < t2² = {q}"
            )));
        }
        Ok(())
    }

    /// The reference medium used for one HS branch: `t₂ = αt₁`,
    /// `t₃ = α²t₁`, `t₄ = 1/b₁`, `t₅ = b₂`, with `b₁ ≥ b₂`.
    pub fn for_branch(h: &HsBranch, b1: f64, b2: f64) -> Result<Self> {
        Self::new(h.t1, h.alpha * h.t1, h.alpha * h.alpha * h.t1, 1.0 / b1, b2)
    }

    /// In-plane entry of `D = C₃ − C₂ᵀC₁⁻¹C₂`; zero for the HS choice.
    pub fn d1(&self) -> f64 {
        self.t3 - self.t2 * self.t2 / self.t1
    }

    /// True when `d₁` is zero up to rounding, as for the HS reference medium.
    pub fn d1_vanishes(&self) -> bool {
        self.d1() <= 1e-12 * self.t3.abs().max(self.t2 * self.t2 / self.t1)
    }

    fn c1_inv(&self) -> Matrix3 {
        Matrix3::from_diagonal(&Vector3::new(1.0 / self.t1, 1.0 / self.t1, 1.0 / self.t4))
    }

    fn c2(&self) -> Matrix3 {
        -hall_j() * self.t2
    }

    fn d(&self) -> Matrix3 {
        let d1 = self.d1();
        Matrix3::from_diagonal(&Vector3::new(d1, d1, self.t5))
    }

    pub fn matrix(&self) -> Matrix6 {
        let mut m = Matrix6::zeros();
        let c2 = self.c2();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&Matrix3::from_diagonal(&Vector3::new(self.t1, self.t1, self.t4)));
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&c2);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&c2.transpose());
        m.fixed_view_mut::<3, 3>(3, 3)
            .copy_from(&Matrix3::from_diagonal(&Vector3::new(self.t3, self.t3, self.t5)));
        m
    }
}

fn check_unit(xi: &Vector3) -> Result<()> {
    if (xi.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidInput(format!("direction must be a unit vector, |ξ| = {}", xi.norm())));
    }
    Ok(())
}

/// `blockdiag(I − ξ⊗ξ, ξ⊗ξ)`.
pub fn gamma1_of_xi(xi: &Vector3) -> Result<Matrix6> {
    check_unit(xi)?;
    let p = xi * xi.transpose();
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(Matrix3::identity() - p));
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&p);
    Ok(m)
}

/// Closed form of `Γ(ξ)`. Needs `t₁, t₄ > 0` and `Dξ·ξ > 0`; the latter
/// holds for every `ξ` when `d₁ > 0`, and off the plane `ξ₃ = 0` when
/// `d₁ = 0`.
pub fn gamma_of_xi(l0: &L0Params, xi: &Vector3) -> Result<Matrix6> {
    check_unit(xi)?;
    l0.validate()?;
    if !(l0.t1 > 0.0 && l0.t4 > 0.0) {
        return Err(Error::SingularReference("C₁ needs t1 > 0 and t4 > 0".into()));
    }
    let dxx = xi.dot(&(l0.d() * xi));
    if !(dxx > 1e-14 * (l0.t3.abs() + l0.t5.abs())) {
        return Err(Error::SingularReference(format!("Dξ·ξ = {dxx:e} is not positive")));
    }
    Ok(gamma_unchecked(l0, xi))
}

fn gamma_unchecked(l0: &L0Params, xi: &Vector3) -> Matrix6 {
    let c1i = l0.c1_inv();
    let c2 = l0.c2();
    let dxx = xi.dot(&(l0.d() * xi));
    let p = xi * xi.transpose();
    let c1i_xi = c1i * xi;
    let k = c1i * c2;
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(
        &(c1i + k * p * k.transpose() / dxx - c1i_xi * c1i_xi.transpose() / xi.dot(&c1i_xi)),
    );
    let off = c1i * c2.transpose() * p / dxx;
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&off);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&off.transpose());
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&(p / dxx));
    m
}

/// Entries of the sphere average of `Γ`, valid for `d₁ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaAverage {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
    pub r1: f64,
    pub r2: f64,
    /// `t₂/t₁`, coupling the P block into the off-diagonal entries.
    pub ratio: f64,
}

impl GammaAverage {
    pub fn matrix(&self) -> Matrix6 {
        let k = self.ratio;
        let mut m = Matrix6::zeros();
        let inplane = self.r1 + k * k * self.p1;
        m[(0, 0)] = inplane;
        m[(1, 1)] = inplane;
        m[(2, 2)] = self.r2;
        m[(3, 3)] = self.p1;
        m[(4, 4)] = self.p1;
        m[(5, 5)] = self.p2;
        m[(0, 4)] = -k * self.p1;
        m[(4, 0)] = -k * self.p1;
        m[(1, 3)] = k * self.p1;
        m[(3, 1)] = k * self.p1;
        m
    }

    /// `2q₁/t₁ + q₂/t₄ − 1`.
    pub fn trace_identity_residual(&self, l0: &L0Params) -> f64 {
        2.0 * self.q1 / l0.t1 + self.q2 / l0.t4 - 1.0
    }
}

pub fn gamma_avg_closed(l0: &L0Params) -> Result<GammaAverage> {
    l0.validate()?;
    if !(l0.t1 > 0.0 && l0.t4 > 0.0 && l0.t5 > 0.0) {
        return Err(Error::SingularReference("need t1, t4, t5 > 0".into()));
    }
    let d1 = l0.d1();
    if !(d1 > 0.0) {
        return Err(Error::SingularReference(format!("d1 = {d1:e}; the average diverges")));
    }
    let d2 = l0.t5;
    let gd = g(d2 / d1)?;
    let gc = g(l0.t1 / l0.t4)?;
    Ok(GammaAverage {
        p1: (1.0 - gd) / (2.0 * d1),
        p2: gd / d2,
        q1: 0.5 * l0.t1 * (1.0 - gc),
        q2: l0.t4 * gc,
        r1: (1.0 + gc) / (2.0 * l0.t1),
        r2: (1.0 - gc) / l0.t4,
        ratio: l0.t2 / l0.t1,
    })
}

/// Sphere average of `Γ` by Gauss–Legendre in `cos θ` times the trapezoid
/// rule in `φ`, the φ grid shifted by `phi_offset` cells.
pub fn gamma_avg_numeric_offset(l0: &L0Params, n_theta: usize, n_phi: usize, phi_offset: f64) -> Result<Matrix6> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidInput("quadrature orders must be at least 2".into()));
    }
    l0.validate()?;
    if !(l0.t1 > 0.0 && l0.t4 > 0.0 && l0.t5 > 0.0 && l0.d1() > 0.0) {
        return Err(Error::SingularReference("numeric average needs D positive definite and t1, t4 > 0".into()));
    }
    let phis: Vec<(f64, f64)> = (0..n_phi)
        .map(|j| (std::f64::consts::TAU * (j as f64 + phi_offset) / n_phi as f64).sin_cos())
        .collect();
    let mut total = Matrix6::zeros();
    for (u, w) in gauss_legendre(n_theta) {
        let s = (1.0 - u * u).max(0.0).sqrt();
        let mut ring = Matrix6::zeros();
        for &(sp, cp) in &phis {
            ring += gamma_unchecked(l0, &Vector3::new(s * cp, s * sp, u));
        }
        total += ring * (0.5 * w / n_phi as f64);
    }
    Ok(total)
}

pub fn gamma_avg_numeric(l0: &L0Params, n_theta: usize, n_phi: usize) -> Result<Matrix6> {
    gamma_avg_numeric_offset(l0, n_theta, n_phi, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveAverage {
    pub matrix: Matrix6,
    pub order: usize,
    /// Largest entrywise change, relative to `max(1, |entry|)`, in the last doubling.
    pub cauchy: f64,
    pub converged: bool,
}

/// Doubles the polar order from `start` until successive averages agree
/// within [`CAUCHY_TOL`] or `max_order` is reached.
pub fn gamma_avg_adaptive(l0: &L0Params, start: usize, max_order: usize, n_phi: usize) -> Result<AdaptiveAverage> {
    let mut n = start.max(2);
    let mut prev = gamma_avg_numeric(l0, n, n_phi)?;
    loop {
        let next_n = 2 * n;
        if next_n > max_order {
            return Ok(AdaptiveAverage { matrix: prev, order: n, cauchy: f64::INFINITY, converged: false });
        }
        let next = gamma_avg_numeric(l0, next_n, n_phi)?;
        let cauchy = next
            .iter()
            .zip(prev.iter())
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0, f64::max);
        if cauchy < CAUCHY_TOL {
            return Ok(AdaptiveAverage { matrix: next, order: next_n, cauchy, converged: true });
        }
        prev = next;
        n = next_n;
    }
}

/// Limit of `⟨Γ⟩⁻¹` as `d₁ → 0`. Depends on `t₁, t₂, t₄, t₅` only.
pub fn gamma_avg_closed_inverse(l0: &L0Params) -> Result<Matrix6> {
    if !(l0.t1 > 0.0 && l0.t4 > 0.0 && l0.t5 > 0.0) {
        return Err(Error::SingularReference("need t1, t4, t5 > 0".into()));
    }
    let gc = g(l0.t1 / l0.t4)?;
    let r1 = (1.0 + gc) / (2.0 * l0.t1);
    let r2 = (1.0 - gc) / l0.t4;
    let k = l0.t2 / l0.t1;
    let mut m = Matrix6::zeros();
    m[(0, 0)] = 1.0 / r1;
    m[(1, 1)] = 1.0 / r1;
    m[(2, 2)] = 1.0 / r2;
    m[(3, 3)] = k * k / r1;
    m[(4, 4)] = k * k / r1;
    m[(5, 5)] = l0.t5;
    m[(0, 4)] = k / r1;
    m[(4, 0)] = k / r1;
    m[(1, 3)] = -k / r1;
    m[(3, 1)] = -k / r1;
    Ok(m)
}

/// `⟨Γ⟩⁻¹`: the closed limit when `d₁` vanishes, otherwise the inverse of
/// the closed-form average.
pub fn gamma_avg_inverse(l0: &L0Params) -> Result<Matrix6> {
    if l0.d1_vanishes() {
        return gamma_avg_closed_inverse(l0);
    }
    gamma_avg_closed(l0)?
        .matrix()
        .try_inverse()
        .ok_or_else(|| Error::SingularReference("⟨Γ⟩ is singular".into()))
}

/// The 6×6 tensor pairing built from the Y-tensor. `b_Y = 0` puts `+∞` on
/// the (3,3) diagonal, which [`hs_inequality_check`] treats as an
/// unconstrained direction.
pub fn ycal_from_ti(y: &YTensorTI) -> Result<Matrix6> {
    if y.a_y == 0.0 || !(y.a_y.is_finite() && y.c_y.is_finite() && y.b_y.is_finite()) {
        return Err(Error::InvalidInput("Y-tensor needs finite coefficients and a_Y ≠ 0".into()));
    }
    let (a, c) = (y.a_y, y.c_y);
    let mut m = Matrix6::zeros();
    m[(0, 0)] = 1.0 / a;
    m[(1, 1)] = 1.0 / a;
    m[(2, 2)] = if y.b_y == 0.0 { f64::INFINITY } else { 1.0 / y.b_y };
    m[(3, 3)] = a + c * c / a;
    m[(4, 4)] = a + c * c / a;
    m[(5, 5)] = y.b_y;
    m[(0, 4)] = -c / a;
    m[(4, 0)] = -c / a;
    m[(1, 3)] = c / a;
    m[(3, 1)] = c / a;
    Ok(m)
}

// 𝒴* + L₀ − ⟨Γ⟩⁻¹, keeping only the finite directions.
fn hs_matrix(yt: &Matrix6, l0: &L0Params) -> Result<(Matrix6, Matrix6, DMatrix<f64>)> {
    for i in 0..6 {
        for j in 0..6 {
            let (a, b) = (yt[(i, j)], yt[(j, i)]);
            if a.is_nan() || a == f64::NEG_INFINITY || (i != j && a.is_infinite()) {
                return Err(Error::InvalidInput("𝒴* may be infinite only on its diagonal (+∞)".into()));
            }
            if a.is_finite() && (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::NotSymmetric { asymmetry: (a - b).abs(), tol: 1e-12 });
            }
        }
    }
    let ginv = gamma_avg_inverse(l0)?;
    let m = yt + l0.matrix() - ginv;
    let keep: Vec<usize> = (0..6).filter(|&i| yt[(i, i)].is_finite()).collect();
    let reduced = DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])]);
    Ok((m, ginv, reduced))
}

/// `𝒴* + L₀ ≥ ⟨Γ⟩⁻¹` in the PSD order; residual `−λ_min`.
pub fn hs_inequality_check(yt: &Matrix6, l0: &L0Params, tol: f64) -> Result<BoundsVerdict> {
    let (_, _, reduced) = hs_matrix(yt, l0)?;
    let lambda = min_eigenvalue_dyn(&reduced, 1e-9 * (1.0 + reduced.amax()))?;
    Ok(BoundsVerdict::from_residual(
        "hs_matrix",
        -lambda,
        tol,
        &[("min_eigenvalue", lambda), ("dropped", (6 - reduced.nrows()) as f64)],
    ))
}

/// Residuals of the PSD condition rescaled to the scalar disk and `b_Y`
/// forms, valid for the HS reference medium (`d₁ = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedResiduals {
    pub disk: f64,
    pub b: f64,
}

pub fn hs_reduced_residuals(yt: &Matrix6, l0: &L0Params) -> Result<ReducedResiduals> {
    let (m, ginv, _) = hs_matrix(yt, l0)?;
    let l = l0.matrix();
    // the {1, 5} block; its determinant is −(s₁/a_Y) × disk residual
    let det = m[(0, 0)] * m[(4, 4)] - m[(0, 4)] * m[(4, 0)];
    let s1 = ginv[(0, 0)] - l[(0, 0)];
    let disk = -det / (yt[(0, 0)] * s1);
    let b_upper = 1.0 / (ginv[(2, 2)] - l[(2, 2)]);
    let b_y = yt[(5, 5)];
    Ok(ReducedResiduals { disk, b: (-b_y).max(b_y - b_upper) })
}

/// `max |Γ − Γᵀ|`.
pub fn gamma_asymmetry(m: &Matrix6) -> f64 {
    asymmetry(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_gk;
    use nalgebra::SVector;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn random_unit(rng: &mut StdRng) -> Vector3 {
        loop {
            let v = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            if v.norm() > 0.1 && v.norm() <= 1.0 {
                return v.normalize();
            }
        }
    }

    fn random_l0(rng: &mut StdRng) -> L0Params {
        let t1 = rng.gen_range(0.2..5.0);
        let t2 = rng.gen_range(-3.0..3.0);
        let d1 = rng.gen_range(0.2..5.0);
        L0Params::new(t1, t2, d1 + t2 * t2 / t1, rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0)).unwrap()
    }

    #[test]
    fn validation() {
        assert!(L0Params::new(1.0, 2.0, 3.0, 1.0, 1.0).is_err());
        assert!(L0Params::new(-1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(L0Params::new(0.3, 0.7, 0.7 * 0.7 / 0.3, 1.0, 1.0).is_ok());
    }

    #[test]
    fn projector_examples() {
        let g = gamma1_of_xi(&Vector3::z()).unwrap();
        let want = SVector::<f64, 6>::from_column_slice(&[1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(g, Matrix6::from_diagonal(&want));
        assert!(gamma1_of_xi(&Vector3::new(1.0, 1.0, 0.0)).is_err());
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..100 {
            let g = gamma1_of_xi(&random_unit(&mut rng)).unwrap();
            assert!((g * g - g).amax() < 1e-14);
            assert!((g.trace() - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_at_axis() {
        let l0 = L0Params::new(0.4, 0.3, 1.0, 0.7, 2.0).unwrap();
        let g = gamma_of_xi(&l0, &Vector3::z()).unwrap();
        let want = SVector::<f64, 6>::from_column_slice(&[1.0 / 0.4, 1.0 / 0.4, 0.0, 0.0, 0.0, 0.5]);
        assert!((g - Matrix6::from_diagonal(&want)).amax() < 1e-14);
    }

    #[test]
    fn gamma_solves_defining_relations() {
        let mut rng = StdRng::seed_from_u64(22);
        for _ in 0..1000 {
            let l0 = random_l0(&mut rng);
            let xi = random_unit(&mut rng);
            let gam = gamma_of_xi(&l0, &xi).unwrap();
            assert!(gamma_asymmetry(&gam) <= 1e-13 * gam.amax().max(1.0));
            let a = SVector::<f64, 6>::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let b = gam * a;
            let p = gamma1_of_xi(&xi).unwrap();
            let scale = 1.0 + gam.amax() * l0.matrix().amax();
            assert!((p * b - b).amax() <= 1e-12 * scale);
            assert!((p * (a - l0.matrix() * b)).amax() <= 1e-12 * scale);
        }
    }

    #[test]
    fn degenerate_reference_is_singular_in_plane() {
        let l0 = L0Params::new(0.2, 0.4, 0.8, 0.5, 1.0).unwrap();
        assert!(matches!(gamma_of_xi(&l0, &Vector3::x()), Err(Error::SingularReference(_))));
        assert!(gamma_of_xi(&l0, &Vector3::new(0.6, 0.0, 0.8)).is_ok());
    }

    #[test]
    fn numeric_average_matches_closed_form() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..20 {
            let l0 = random_l0(&mut rng);
            let closed = gamma_avg_closed(&l0).unwrap();
            let numeric = gamma_avg_numeric(&l0, 64, 8).unwrap();
            assert!((numeric - closed.matrix()).amax() < 1e-10, "{l0:?}");
            assert!(closed.trace_identity_residual(&l0).abs() < 1e-12);
        }
    }

    #[test]
    fn average_is_axisymmetric() {
        let l0 = L0Params::new(0.7, 0.5, 1.3, 0.4, 2.0).unwrap();
        let a = gamma_avg_numeric_offset(&l0, 48, 8, 0.0).unwrap();
        let b = gamma_avg_numeric_offset(&l0, 48, 8, 0.37).unwrap();
        assert!((a - b).amax() < 1e-12);
    }

    #[test]
    fn uncoupled_reference_has_no_off_blocks() {
        let l0 = L0Params::new(0.7, 0.0, 1.3, 0.4, 2.0).unwrap();
        let m = gamma_avg_numeric(&l0, 32, 8).unwrap();
        assert_eq!(m.fixed_view::<3, 3>(0, 3).amax(), 0.0);
        assert_eq!(gamma_avg_closed(&l0).unwrap().matrix().fixed_view::<3, 3>(0, 3).amax(), 0.0);
    }

    #[test]
    fn q_block_matches_quadrature() {
        // ⟨ξ⊗ξ / (C₁⁻¹ξ·ξ)⟩ by adaptive quadrature in cos θ
        for (t1, t4) in [(0.2, 0.5), (3.0, 0.7), (1.0, 1.0)] {
            let l0 = L0Params::new(t1, 0.0, 1.0, t4, 1.0).unwrap();
            let c = gamma_avg_closed(&l0).unwrap();
            let r = adaptive_gk(
                |u| {
                    let den = (1.0 - u * u) / t1 + u * u / t4;
                    [0.25 * (1.0 - u * u) / den, 0.5 * u * u / den]
                },
                -1.0,
                1.0,
                1e-15,
                1e-14,
                1000,
            );
            assert!((r.value[0] - c.q1).abs() < 1e-13 && (r.value[1] - c.q2).abs() < 1e-13);
        }
    }

    #[test]
    fn closed_inverse_example() {
        let l0 = L0Params::new(0.2, 0.4, 0.8, 0.5, 1.0).unwrap();
        let m = gamma_avg_closed_inverse(&l0).unwrap();
        assert!((m[(0, 0)] - 0.32752).abs() < 1e-5);
        assert!((m[(0, 4)] - 0.65504).abs() < 1e-5);
        assert!((m[(3, 3)] - 1.31009).abs() < 1e-5);
        assert_eq!(m[(5, 5)], 1.0);
        let m = gamma_avg_closed_inverse(&L0Params::new(0.2, 0.0, 0.8, 0.5, 1.0).unwrap()).unwrap();
        assert_eq!(m[(3, 3)], 0.0);
        assert_eq!(m[(0, 4)], 0.0);
    }

    #[test]
    fn p2_increases_to_its_limit() {
        let mut prev = 0.0;
        for e in 2..=8 {
            let d1 = 10f64.powi(-e);
            let l0 = L0Params::new(0.2, 0.4, 0.8 + d1, 0.5, 2.0).unwrap();
            let p2 = gamma_avg_closed(&l0).unwrap().p2;
            assert!(p2 > prev && p2 < 0.5);
            prev = p2;
        }
        assert!(0.5 - prev < 1e-3);
    }

    #[test]
    fn hs_check_equality_and_violation() {
        let l0 = L0Params::new(0.2, 0.4, 0.8, 0.5, 1.0).unwrap();
        let yt = gamma_avg_closed_inverse(&l0).unwrap() - l0.matrix();
        let v = hs_inequality_check(&yt, &l0, 1e-9).unwrap();
        assert!(v.satisfied && v.residual.abs() < 1e-12);
        let v = hs_inequality_check(&(yt - Matrix6::identity() * 1e-3), &l0, 1e-9).unwrap();
        assert!(!v.satisfied);
    }

    #[test]
    fn asymmetric_ycal_rejected() {
        let l0 = L0Params::new(0.2, 0.4, 0.8, 0.5, 1.0).unwrap();
        let mut yt = Matrix6::identity();
        yt[(0, 1)] = 0.5;
        assert!(matches!(hs_inequality_check(&yt, &l0, 1e-9), Err(Error::NotSymmetric { .. })));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn direction() -> impl Strategy<Value = Vector3> {
            (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
                .prop_filter("non-degenerate", |(x, y, z)| x * x + y * y + z * z > 0.01)
                .prop_map(|(x, y, z)| Vector3::new(x, y, z).normalize())
        }

        proptest! {
            #[test]
            fn generalized_inverse(
                t1 in 0.2..5.0f64, t2 in -3.0..3.0f64, d1 in 0.0..5.0f64,
                t4 in 0.2..5.0f64, t5 in 0.2..5.0f64, xi in direction(),
            ) {
                prop_assume!(d1 > 1e-3 || xi[2].abs() > 1e-3);
                let l0 = L0Params::new(t1, t2, d1 + t2 * t2 / t1, t4, t5).unwrap();
                let gam = gamma_of_xi(&l0, &xi).unwrap();
                let scale = 1.0 + gam.amax();
                prop_assert!((gam * l0.matrix() * gam - gam).amax() <= 1e-10 * scale);
                prop_assert!((gam - gam.transpose()).amax() <= 1e-12 * scale);
            }
        }
    }
}
