//! Bounds that need nothing beyond the phase averages: the arithmetic /
//! harmonic interval for the axial coefficient, the circle confining the
//! in-plane pair `(a*, c*)`, the coarse `|c*|` bound it implies, and the
//! Hall-coefficient bounds valid under partial isotropy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{build_block_l, min_eigenvalue, symmetric_part_is_pd, Matrix3, PhaseDistribution};
use crate::verdict::BoundsVerdict;

/// `(1/⟨1/b⟩, ⟨b⟩)`.
pub fn b_interval(d: &PhaseDistribution) -> (f64, f64) {
    let harmonic = 1.0 / d.average(|p| 1.0 / p.b);
    let arithmetic = d.average(|p| p.b);
    // the harmonic mean never exceeds the arithmetic one; clamp rounding
    (harmonic.min(arithmetic), arithmetic)
}

pub fn b_check(b_star: f64, d: &PhaseDistribution, tol: f64) -> BoundsVerdict {
    let (lo, hi) = b_interval(d);
    BoundsVerdict::from_residual(
        "b_interval",
        (lo - b_star).max(b_star - hi),
        tol,
        &[("b_star", b_star), ("lower", lo), ("upper", hi)],
    )
}

/// Parameters of the disk confining `(a*, c*)`: it is centred at
/// `((a_l + d_l)/2, c_l)` and touches `a = a_l` and `a = d_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleParams {
    pub a_l: f64,
    pub c_l: f64,
    pub d_l: f64,
}

pub fn circle_params(d: &PhaseDistribution) -> CircleParams {
    let a_l = 1.0 / d.average(|p| 1.0 / p.a);
    let c_l = d.average(|p| p.c / p.a) * a_l;
    let d_l = d.average(|p| p.a + p.c * p.c / p.a) - c_l * c_l / a_l;
    debug_assert!(d_l >= a_l * (1.0 - 1e-12), "d_l={d_l} < a_l={a_l}");
    CircleParams { a_l, c_l, d_l }
}

/// Residual `(c* − c_l)² − (a* − a_l)(d_l − a*)`.
pub fn circle_check(a_star: f64, c_star: f64, p: &CircleParams, tol: f64) -> BoundsVerdict {
    let dc = c_star - p.c_l;
    BoundsVerdict::from_residual(
        "circle",
        dc * dc - (a_star - p.a_l) * (p.d_l - a_star),
        tol,
        &[("a_star", a_star), ("c_star", c_star), ("a_l", p.a_l), ("c_l", p.c_l), ("d_l", p.d_l)],
    )
}

/// `2|c*| ≤ bound`, with `cap` a coarser value from phase extremes only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperfluousBound {
    pub bound: f64,
    pub cap: f64,
}

pub fn superfluous_cstar_bound(d: &PhaseDistribution) -> SuperfluousBound {
    let bound = d.average(|p| p.a + p.c * p.c / p.a);
    let (a_min, a_max) = d.extremes(|p| p.a);
    let (_, c_max) = d.extremes(|p| p.c.abs());
    SuperfluousBound { bound, cap: a_max + c_max * c_max / a_min }
}

pub fn superfluous_check(c_star: f64, b: &SuperfluousBound, tol: f64) -> BoundsVerdict {
    BoundsVerdict::from_residual(
        "superfluous",
        2.0 * c_star.abs() - b.bound,
        tol,
        &[("c_star", c_star), ("bound", b.bound)],
    )
}

/// Largest magnitude among the (1,3) and (2,3) entries of the antisymmetric
/// part; zero when the antisymmetric part is a multiple of `J`.
pub fn partial_isotropy_residual(sigma: &Matrix3) -> f64 {
    let anti = |i: usize, j: usize| 0.5 * (sigma[(i, j)] - sigma[(j, i)]);
    anti(0, 2).abs().max(anti(1, 2).abs())
}

/// Bound on `|c*|` for a partially isotropic `σ*` whose phases satisfy
/// `a ≥ a_lower` and `|c| ≤ c_upper`.
pub fn partial_iso_cstar_bound(sigma_star: &Matrix3, a_lower: f64, c_upper: f64) -> Result<f64> {
    if !symmetric_part_is_pd(sigma_star) {
        return Err(Error::InvalidConductivity("symmetric part of σ* is not positive definite".into()));
    }
    if !(a_lower > 0.0 && c_upper >= 0.0) {
        return Err(Error::InvalidInput("need a_lower > 0 and c_upper ≥ 0".into()));
    }
    Ok(c_upper / a_lower * sigma_star[(0, 0)].sqrt() * sigma_star[(1, 1)].sqrt())
}

/// Interval `center ± halfwidth` for `c*` when phase Hall coefficients lie in
/// `[c_minus, c_plus]` and `a ≥ a_lower`.
pub fn optimal_shift_bound(a_star: f64, a_lower: f64, c_plus: f64, c_minus: f64) -> Result<(f64, f64)> {
    if !(a_lower > 0.0) || c_plus < c_minus {
        return Err(Error::InvalidInput("need a_lower > 0 and c_plus ≥ c_minus".into()));
    }
    Ok((0.5 * (c_plus + c_minus), 0.5 * a_star / a_lower * (c_plus - c_minus)))
}

pub fn optimal_shift_check(a_star: f64, c_star: f64, d: &PhaseDistribution, tol: f64) -> Result<BoundsVerdict> {
    let (a_lower, _) = d.extremes(|p| p.a);
    let (c_minus, c_plus) = d.extremes(|p| p.c);
    let (center, half) = optimal_shift_bound(a_star, a_lower, c_plus, c_minus)?;
    Ok(BoundsVerdict::from_residual(
        "optimal_shift",
        (c_star - center).abs() - half,
        tol,
        &[("a_star", a_star), ("c_star", c_star), ("center", center), ("halfwidth", half)],
    ))
}

/// `L(σ*) ≤ ⟨L⟩` in the PSD order; residual is `−λ_min(⟨L⟩ − L*)`.
pub fn elementary_check(sigma_star: &Matrix3, d: &PhaseDistribution, tol: f64) -> Result<BoundsVerdict> {
    let lstar = build_block_l(sigma_star)?;
    let lambda = min_eigenvalue(&(d.average_block_l() - lstar), tol.max(1e-9))?;
    Ok(BoundsVerdict::from_residual("elementary", -lambda, tol, &[("min_eigenvalue", lambda)]))
}

/// Every bound above for a transversely isotropic candidate `(a*, b*, c*)`.
pub fn all_elementary_verdicts(
    a_star: f64,
    b_star: f64,
    c_star: f64,
    d: &PhaseDistribution,
    tol: f64,
) -> Result<Vec<BoundsVerdict>> {
    let sigma = crate::tensor::TIConductivity::new(a_star, b_star, c_star)?.to_matrix();
    Ok(vec![
        elementary_check(&sigma, d, tol)?,
        b_check(b_star, d, tol),
        circle_check(a_star, c_star, &circle_params(d), tol),
        superfluous_check(c_star, &superfluous_cstar_bound(d), tol),
        optimal_shift_check(a_star, c_star, d, tol)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{TIConductivity, Vector3, DEFAULT_TOL};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn ti(a: f64, b: f64, c: f64) -> TIConductivity {
        TIConductivity::new(a, b, c).unwrap()
    }

    fn random_distribution(rng: &mut StdRng) -> PhaseDistribution {
        let n = rng.gen_range(1..6);
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let last = 1.0 - w[..n - 1].iter().sum::<f64>();
        w[n - 1] = last;
        PhaseDistribution::new(
            w.into_iter()
                .map(|f| (f, ti(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0), rng.gen_range(-5.0..5.0))))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn b_interval_examples() {
        assert_eq!(b_interval(&PhaseDistribution::single(ti(1.0, 3.0, 0.0)).unwrap()), (3.0, 3.0));
        let d = PhaseDistribution::two_phase(0.5, ti(1.0, 2.0, 0.0), ti(1.0, 1.0, 0.0)).unwrap();
        let (lo, hi) = b_interval(&d);
        assert!((lo - 4.0 / 3.0).abs() < 1e-15 && (hi - 1.5).abs() < 1e-15);
        let d = PhaseDistribution::two_phase(1.0, ti(1.0, 2.0, 0.0), ti(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(b_interval(&d), (2.0, 2.0));
    }

    #[test]
    fn circle_examples() {
        let p = circle_params(&PhaseDistribution::single(ti(3.0, 1.0, 0.7)).unwrap());
        assert!((p.a_l - 3.0).abs() < 1e-15 && (p.c_l - 0.7).abs() < 1e-15 && (p.d_l - 3.0).abs() < 1e-14);

        let d = PhaseDistribution::two_phase(0.5, ti(4.0, 1.0, 0.0), ti(1.0, 1.0, 0.0)).unwrap();
        let p = circle_params(&d);
        assert!((p.a_l - 1.6).abs() < 1e-15 && p.c_l == 0.0 && (p.d_l - 2.5).abs() < 1e-15);
        let v = circle_check(2.0, 0.0, &p, DEFAULT_TOL);
        assert!(v.satisfied && (v.residual + 0.2).abs() < 1e-14);
        assert!(circle_check(p.a_l, p.c_l, &p, DEFAULT_TOL).residual.abs() < 1e-15);
        assert!(!circle_check(p.d_l + 1.0, p.c_l, &p, DEFAULT_TOL).satisfied);

        let d = PhaseDistribution::two_phase(0.5, ti(1.0, 1.0, 1.0), ti(1.0, 1.0, -1.0)).unwrap();
        let p = circle_params(&d);
        assert_eq!((p.a_l, p.c_l, p.d_l), (1.0, 0.0, 2.0));
    }

    #[test]
    fn superfluous_examples() {
        let d = PhaseDistribution::two_phase(0.5, ti(4.0, 1.0, 0.0), ti(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(superfluous_cstar_bound(&d).bound, 2.5);
        let s = superfluous_cstar_bound(&PhaseDistribution::single(ti(1.0, 1.0, 1.0)).unwrap());
        assert_eq!(s.bound, 2.0);
        assert!(superfluous_check(1.0, &s, DEFAULT_TOL).satisfied);
        let d = PhaseDistribution::two_phase(0.5, ti(1.0, 1.0, 1.0), ti(1.0, 1.0, -1.0)).unwrap();
        let s = superfluous_cstar_bound(&d);
        assert_eq!(s.bound, 2.0);
        assert!(s.cap >= s.bound);
    }

    #[test]
    fn partial_iso_examples() {
        assert!((partial_iso_cstar_bound(&Matrix3::identity(), 1.0, 0.1).unwrap() - 0.1).abs() < 1e-15);
        let s = ti(2.0, 1.0, 0.3).to_matrix();
        assert!((partial_iso_cstar_bound(&s, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(partial_isotropy_residual(&s), 0.0);
        assert!(partial_iso_cstar_bound(&(-Matrix3::identity()), 1.0, 1.0).is_err());
    }

    #[test]
    fn optimal_shift_examples() {
        assert_eq!(optimal_shift_bound(3.0, 1.0, 0.4, 0.4).unwrap(), (0.4, 0.0));
        assert_eq!(optimal_shift_bound(1.0, 1.0, 1.0, 0.0).unwrap(), (0.5, 0.5));
        assert!(optimal_shift_bound(1.0, 1.0, 0.0, 1.0).is_err());
        // two-phase form |2c* − c₁ − c₂| ≤ (a*/min a)|c₁ − c₂|
        let (a1, a2, c1, c2, a_star): (f64, f64, f64, f64, f64) = (3.0, 1.5, 0.2, -0.6, 2.0);
        let (center, half) = optimal_shift_bound(a_star, a1.min(a2), c1.max(c2), c1.min(c2)).unwrap();
        assert!((2.0 * center - c1 - c2).abs() < 1e-15);
        assert!((2.0 * half - a_star / a1.min(a2) * (c1 - c2).abs()).abs() < 1e-15);
    }

    #[test]
    fn d_l_dominates_a_l() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10_000 {
            let p = circle_params(&random_distribution(&mut rng));
            assert!(p.d_l >= p.a_l * (1.0 - 1e-12));
        }
    }

    #[test]
    fn circle_implies_harmonic_lower_bound() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..2000 {
            let p = circle_params(&random_distribution(&mut rng));
            let a = rng.gen_range(0.05..12.0);
            let c = p.c_l + rng.gen_range(-3.0..3.0);
            if circle_check(a, c, &p, 0.0).satisfied {
                assert!(a >= p.a_l);
            }
        }
    }

    #[test]
    fn circle_is_shift_covariant() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..1000 {
            let d = random_distribution(&mut rng);
            let c0 = rng.gen_range(-4.0..4.0);
            let shifted = PhaseDistribution::new(
                d.entries().iter().map(|(f, p)| (*f, ti(p.a, p.b, p.c + c0))).collect(),
            )
            .unwrap();
            let (a, c) = (rng.gen_range(0.1..10.0), rng.gen_range(-5.0..5.0));
            let r0 = circle_check(a, c, &circle_params(&d), 0.0).residual;
            let r1 = circle_check(a, c + c0, &circle_params(&shifted), 0.0).residual;
            assert!((r0 - r1).abs() <= 1e-10 * (1.0 + r0.abs()));
        }
    }

    #[test]
    fn e3_laminates_pass_every_bound() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..1000 {
            let f = rng.gen_range(0.01..0.99);
            let p1 = ti(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0), rng.gen_range(-5.0..5.0));
            let p2 = ti(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0), rng.gen_range(-5.0..5.0));
            let d = PhaseDistribution::two_phase(f, p1, p2).unwrap();
            let s = crate::laminate::rank_one_effective(&p1.to_matrix(), &p2.to_matrix(), f, &Vector3::z()).unwrap();
            let star = TIConductivity::from_matrix(&s, 1e-12).unwrap();
            for v in all_elementary_verdicts(star.a, star.b, star.c, &d, 1e-10).unwrap() {
                assert!(v.residual <= 1e-10, "{v:?}");
            }
        }
    }
}
