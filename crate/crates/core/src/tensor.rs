//! Conductivity tensors, the 6×6 block tensor `L`, and PSD orderings.
//!
//! A conductivity `σ` need not be symmetric; a magnetic field along `e₃`
//! adds an antisymmetric (Hall) part. Splitting `σ = σˢ + σᴬ` and pairing
//! `(j_S, e_A)` with `(e_S, j_A)` gives the symmetric tensor
//!
//! ```text
//!     L(σ) = [ (σˢ)⁻¹          −(σˢ)⁻¹ σᴬ          ]
//!            [ σᴬ (σˢ)⁻¹       σˢ − σᴬ (σˢ)⁻¹ σᴬ   ]
//! ```
//!
//! which is positive definite whenever `σˢ` is. Bounds on effective tensors
//! are stated as Löwner (PSD) orderings of such blocks.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix3 = nalgebra::Matrix3<f64>;
pub type Matrix6 = nalgebra::Matrix6<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;

/// Default tolerance for orderings and bound residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance on fraction sums in [`PhaseDistribution`].
pub const FRACTION_SUM_TOL: f64 = 1e-12;

/// The rotation generator about `e₃`: `[[0,−1,0],[1,0,0],[0,0,0]]`.
pub fn hall_j() -> Matrix3 {
    Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
}

/// Transversely isotropic conductivity `[[a, −c, 0], [c, a, 0], [0, 0, b]]`.
///
/// `a` is the in-plane symmetric coefficient, `b` the axial one, and `c`
/// the Hall coefficient (any sign).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TIConductivity {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TIConductivity {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let p = TIConductivity { a, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) {
            return Err(Error::InvalidConductivity(format!(
                "non-finite coefficient in (a={}, b={}, c={})",
                self.a, self.b, self.c
            )));
        }
        if self.a <= 0.0 || self.b <= 0.0 {
            return Err(Error::InvalidConductivity(format!(
                "a and b must be positive, got a={}, b={}",
                self.a, self.b
            )));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Matrix3 {
        ti_to_matrix(self)
    }

    /// Reads `(a, b, c)` back from a matrix, rejecting anything that is not
    /// transversely isotropic within `tol`.
    pub fn from_matrix(m: &Matrix3, tol: f64) -> Result<Self> {
        let a = 0.5 * (m[(0, 0)] + m[(1, 1)]);
        let c = 0.5 * (m[(1, 0)] - m[(0, 1)]);
        let b = m[(2, 2)];
        let off = ti_to_matrix(&TIConductivity { a, b, c }) - m;
        let dev = off.amax();
        if dev > tol {
            return Err(Error::InvalidInput(format!(
                "matrix is not transversely isotropic (deviation {dev:e})"
            )));
        }
        TIConductivity::new(a, b, c)
    }

    /// Determinant of the in-plane 2×2 block, `a² + c²`.
    pub fn in_plane_det(&self) -> f64 {
        self.a * self.a + self.c * self.c
    }
}

pub fn ti_to_matrix(p: &TIConductivity) -> Matrix3 {
    Matrix3::new(p.a, -p.c, 0.0, p.c, p.a, 0.0, 0.0, 0.0, p.b)
}

/// Returns `(Mˢ, Mᴬ)` with `Mˢ = (M + Mᵀ)/2`, `Mᴬ = (M − Mᵀ)/2`.
pub fn sym_antisym_split(m: &Matrix3) -> (Matrix3, Matrix3) {
    let t = m.transpose();
    ((m + t) * 0.5, (m - t) * 0.5)
}

/// Positive-definiteness of the symmetric part, via Cholesky.
pub fn symmetric_part_is_pd(m: &Matrix3) -> bool {
    let (s, _) = sym_antisym_split(m);
    s.iter().all(|x| x.is_finite()) && s.cholesky().is_some()
}

/// Builds the symmetric block tensor `L(σ)`.
pub fn build_block_l(sigma: &Matrix3) -> Result<Matrix6> {
    let (s, a) = sym_antisym_split(sigma);
    let chol = s.cholesky().ok_or_else(|| {
        Error::InvalidConductivity("symmetric part is not positive definite".into())
    })?;
    let s_inv = chol.inverse();
    let upper_right = -(s_inv * a);
    let lower_right = s - a * s_inv * a;

    let mut l = Matrix6::zeros();
    l.fixed_view_mut::<3, 3>(0, 0).copy_from(&sym3(&s_inv));
    l.fixed_view_mut::<3, 3>(0, 3).copy_from(&upper_right);
    // σᴬ(σˢ)⁻¹ = (−(σˢ)⁻¹σᴬ)ᵀ; write the transpose so L is exactly symmetric.
    l.fixed_view_mut::<3, 3>(3, 0).copy_from(&upper_right.transpose());
    l.fixed_view_mut::<3, 3>(3, 3).copy_from(&sym3(&lower_right));
    Ok(l)
}

/// Inverts [`build_block_l`]: `σˢ = (L₁₁)⁻¹`, `σᴬ = −σˢ L₁₂`.
pub fn sigma_from_block_l(l: &Matrix6) -> Result<Matrix3> {
    let l11: Matrix3 = l.fixed_view::<3, 3>(0, 0).into_owned();
    let l12: Matrix3 = l.fixed_view::<3, 3>(0, 3).into_owned();
    let s = l11
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("upper-left block of L is not positive definite".into()))?
        .inverse();
    let a = -(s * l12);
    Ok(s + a)
}

fn sym3(m: &Matrix3) -> Matrix3 {
    (m + m.transpose()) * 0.5
}

/// Largest entrywise asymmetry `max |M − Mᵀ|`.
pub fn asymmetry<const N: usize>(m: &nalgebra::SMatrix<f64, N, N>) -> f64 {
    (m - m.transpose()).amax()
}

/// Smallest eigenvalue of a matrix documented as symmetric.
///
/// Inputs within `tol` of symmetric are symmetrized first; anything further
/// off is rejected rather than silently repaired.
pub fn min_eigenvalue(m: &Matrix6, tol: f64) -> Result<f64> {
    let asym = asymmetry(m);
    if !(asym <= tol) {
        return Err(Error::NotSymmetric { asymmetry: asym, tol });
    }
    let s = (m + m.transpose()) * 0.5;
    Ok(s.symmetric_eigen().eigenvalues.min())
}

/// Smallest eigenvalue of a dynamically-sized symmetric matrix (same rules
/// as [`min_eigenvalue`]). An empty matrix has margin `+∞`.
pub fn min_eigenvalue_dyn(m: &DMatrix<f64>, tol: f64) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(f64::INFINITY);
    }
    let asym = (m - m.transpose()).amax();
    if !(asym <= tol) {
        return Err(Error::NotSymmetric { asymmetry: asym, tol });
    }
    let s = (m + m.transpose()) * 0.5;
    Ok(s.symmetric_eigen().eigenvalues.min())
}

/// Signed margin of `m1 ≤ m2`: the smallest eigenvalue of `m2 − m1`.
pub fn psd_order_margin(m1: &Matrix6, m2: &Matrix6, tol: f64) -> Result<f64> {
    for m in [m1, m2] {
        let asym = asymmetry(m);
        if !(asym <= tol) {
            return Err(Error::NotSymmetric { asymmetry: asym, tol });
        }
    }
    min_eigenvalue(&(m2 - m1), tol)
}

/// `true` iff `m2 − m1` is positive semidefinite up to `tol`.
pub fn psd_order_check(m1: &Matrix6, m2: &Matrix6, tol: f64) -> Result<bool> {
    Ok(psd_order_margin(m1, m2, tol)? >= -tol)
}

/// Upper-left 2×2 minor `m₁₁m₂₂ − m₁₂m₂₁`.
pub fn delta12(m: &Matrix3) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Volume-fraction-weighted collection of transversely isotropic phases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDistribution {
    entries: Vec<(f64, TIConductivity)>,
}

impl PhaseDistribution {
    pub fn new(entries: Vec<(f64, TIConductivity)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("phase distribution is empty".into()));
        }
        let mut sum = 0.0;
        for (w, p) in &entries {
            if !w.is_finite() || *w < 0.0 || *w > 1.0 {
                return Err(Error::InvalidInput(format!("fraction {w} outside [0, 1]")));
            }
            p.validate()?;
            sum += w;
        }
        if (sum - 1.0).abs() > FRACTION_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "fractions sum to {sum}, expected 1"
            )));
        }
        Ok(PhaseDistribution { entries })
    }

    pub fn single(p: TIConductivity) -> Result<Self> {
        Self::new(vec![(1.0, p)])
    }

    pub fn two_phase(f1: f64, p1: TIConductivity, p2: TIConductivity) -> Result<Self> {
        Self::new(vec![(f1, p1), (1.0 - f1, p2)])
    }

    pub fn entries(&self) -> &[(f64, TIConductivity)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `⟨q⟩ = Σ fᵢ q(phaseᵢ)`.
    pub fn average(&self, q: impl Fn(&TIConductivity) -> f64) -> f64 {
        self.entries.iter().map(|(w, p)| w * q(p)).sum()
    }

    /// Extremes over phases with nonzero weight.
    pub fn extremes(&self, q: impl Fn(&TIConductivity) -> f64) -> (f64, f64) {
        self.entries
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(_, p)| q(p))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// `⟨L⟩` over the phases.
    pub fn average_block_l(&self) -> Matrix6 {
        self.entries.iter().fold(Matrix6::zeros(), |acc, (w, p)| {
            // phases are validated on construction, so L exists
            acc + build_block_l(&p.to_matrix()).expect("validated phase") * *w
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn random_pd_sym_part(rng: &mut StdRng) -> Matrix3 {
        let g = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let s = g * g.transpose() + Matrix3::identity() * 0.2;
        let w = Matrix3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
        s + (w - w.transpose()) * 0.5
    }

    #[test]
    fn ti_matrix_cases() {
        let id = TIConductivity::new(1.0, 1.0, 0.0).unwrap().to_matrix();
        assert_eq!(id, Matrix3::identity());

        let hall = TIConductivity::new(2.0, 0.5, 1.0).unwrap().to_matrix();
        assert_eq!(hall, Matrix3::new(2.0, -1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.5));

        let (kappa, theta) = (3.0, 0.1);
        let s1 = TIConductivity::new(kappa / (theta * theta), 1.0, 0.0).unwrap().to_matrix();
        let k = kappa / (theta * theta);
        assert_eq!(s1, Matrix3::from_diagonal(&Vector3::new(k, k, 1.0)));
    }

    #[test]
    fn rejects_nonpositive_coefficients() {
        assert!(TIConductivity::new(0.0, 1.0, 0.0).is_err());
        assert!(TIConductivity::new(1.0, -1.0, 0.0).is_err());
        assert!(TIConductivity::new(1.0, 1.0, f64::NAN).is_err());
        assert!(TIConductivity::new(1.0, 1.0, -7.0).is_ok());
    }

    #[test]
    fn split_of_two_i_plus_j() {
        let m = Matrix3::identity() * 2.0 + hall_j();
        let (s, a) = sym_antisym_split(&m);
        assert_eq!(s, Matrix3::identity() * 2.0);
        assert_eq!(a, hall_j());

        let (s, a) = sym_antisym_split(&Matrix3::identity());
        assert_eq!(s, Matrix3::identity());
        assert_eq!(a, Matrix3::zeros());
    }

    #[test]
    fn split_reassembles() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let m = Matrix3::from_fn(|_, _| rng.gen_range(-5.0..5.0));
            let (s, a) = sym_antisym_split(&m);
            assert!((s + a - m).amax() < 1e-15);
            assert_eq!(s, s.transpose());
            assert_eq!(a, -a.transpose());
        }
    }

    #[test]
    fn block_l_identity_and_unit_hall() {
        let l = build_block_l(&Matrix3::identity()).unwrap();
        assert_eq!(l, Matrix6::identity());

        let l = build_block_l(&TIConductivity::new(1.0, 1.0, 1.0).unwrap().to_matrix()).unwrap();
        let diag = [1.0, 1.0, 1.0, 2.0, 2.0, 1.0];
        for i in 0..6 {
            assert!((l[(i, i)] - diag[i]).abs() < 1e-15);
        }
        // 1-based L₁₅ = 1 and L₂₄ = −1
        assert!((l[(0, 4)] - 1.0).abs() < 1e-15);
        assert!((l[(1, 3)] + 1.0).abs() < 1e-15);
        assert_eq!(l, l.transpose());
    }

    #[test]
    fn block_l_ti_pattern() {
        let p = TIConductivity::new(2.5, 0.7, -1.3).unwrap();
        let l = build_block_l(&p.to_matrix()).unwrap();
        let (a, b, c) = (p.a, p.b, p.c);
        let expect_diag = [1.0 / a, 1.0 / a, 1.0 / b, a + c * c / a, a + c * c / a, b];
        for i in 0..6 {
            assert!((l[(i, i)] - expect_diag[i]).abs() < 1e-14);
        }
        assert!((l[(0, 4)] - c / a).abs() < 1e-15);
        assert!((l[(1, 3)] + c / a).abs() < 1e-15);
        let mut off = l;
        for i in 0..6 {
            off[(i, i)] = 0.0;
        }
        off[(0, 4)] = 0.0;
        off[(4, 0)] = 0.0;
        off[(1, 3)] = 0.0;
        off[(3, 1)] = 0.0;
        assert_eq!(off.amax(), 0.0);
    }

    #[test]
    fn block_l_rejects_non_pd() {
        let m = Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
        let err = build_block_l(&m).unwrap_err();
        assert!(err.to_string().contains("not a valid conductivity"));
    }

    #[test]
    fn block_l_round_trip_and_symmetry() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..500 {
            let sigma = random_pd_sym_part(&mut rng);
            let l = build_block_l(&sigma).unwrap();
            assert!(asymmetry(&l) < 1e-13);
            let upper: Matrix3 = l.fixed_view::<3, 3>(0, 0).into_owned();
            assert!(upper.symmetric_eigen().eigenvalues.min() > 0.0);
            // full L is PD too
            assert!(l.symmetric_eigen().eigenvalues.min() > 0.0);
            let back = sigma_from_block_l(&l).unwrap();
            assert!((back - sigma).amax() < 1e-12 * sigma.amax().max(1.0));
        }
    }

    #[test]
    fn psd_order_basic_cases() {
        let z = Matrix6::zeros();
        let i = Matrix6::identity();
        assert!(psd_order_check(&z, &i, 1e-12).unwrap());
        assert!(!psd_order_check(&i, &z, 1e-12).unwrap());
        assert!(psd_order_check(&i, &i, 1e-12).unwrap());
        let mut bad = Matrix6::identity();
        bad[(0, 1)] = 1e-3;
        assert!(matches!(
            psd_order_check(&bad, &i, 1e-9),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn psd_margin_is_signed() {
        let m = Matrix6::from_diagonal(&nalgebra::Vector6::new(1.0, 2.0, 3.0, 4.0, 5.0, -0.5));
        assert!((min_eigenvalue(&m, 1e-12).unwrap() + 0.5).abs() < 1e-14);
        let margin = psd_order_margin(&Matrix6::zeros(), &m, 1e-12).unwrap();
        assert!((margin + 0.5).abs() < 1e-14);
    }

    #[test]
    fn delta12_cases() {
        assert_eq!(delta12(&Matrix3::identity()), 1.0);
        assert_eq!(delta12(&hall_j()), 1.0);
        let p = TIConductivity::new(1.5, 1.0, -0.5).unwrap();
        assert!((delta12(&p.to_matrix()) - p.in_plane_det()).abs() < 1e-15);
    }

    #[test]
    fn distribution_validation() {
        let p = TIConductivity::new(1.0, 1.0, 0.0).unwrap();
        assert!(PhaseDistribution::new(vec![]).is_err());
        assert!(PhaseDistribution::new(vec![(0.5, p), (0.4, p)]).is_err());
        assert!(PhaseDistribution::new(vec![(1.2, p), (-0.2, p)]).is_err());
        let d = PhaseDistribution::new(vec![(0.3, p), (0.7, p)]).unwrap();
        assert!((d.average(|q| q.a) - 1.0).abs() < 1e-15);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn block_l_round_trip(a in 0.1..10.0f64, b in 0.1..10.0f64, c in -5.0..5.0f64) {
                let s = TIConductivity::new(a, b, c).unwrap().to_matrix();
                let back = sigma_from_block_l(&build_block_l(&s).unwrap()).unwrap();
                prop_assert!((back - s).amax() <= 1e-12 * s.amax());
            }
        }
    }
}
