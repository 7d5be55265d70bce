//! Quadrature rules: fixed Gauss–Legendre (nodes from `gauss-quad`) and a
//! globally adaptive 7/15-point Gauss–Kronrod rule for vector integrands.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n).expect("quadrature order must be positive");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

// Kronrod abscissae on [0, 1), descending; even indices belong to the
// Kronrod extension, odd ones (and the centre) to the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    err: f64,
}

fn gk15<const N: usize>(f: &mut impl FnMut(f64) -> [f64; N], a: f64, b: f64) -> Panel<N> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    let fc = f(c);
    for k in 0..N {
        kronrod[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for k in 0..N {
            let s = f1[k] + f2[k];
            kronrod[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut err: f64 = 0.0;
    for k in 0..N {
        kronrod[k] *= h;
        gauss[k] *= h;
        err = err.max((kronrod[k] - gauss[k]).abs());
    }
    Panel { a, b, value: kronrod, err }
}

/// Result of [`adaptive_gk`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveResult<const N: usize> {
    pub value: [f64; N],
    pub error_estimate: f64,
    pub panels: usize,
    pub converged: bool,
}

/// Integrates a vector-valued `f` over `[a, b]`, repeatedly bisecting the
/// panel with the largest Gauss/Kronrod discrepancy until the summed
/// estimate drops below `max(abs_tol, rel_tol·‖I‖∞)` or `max_panels` is hit.
pub fn adaptive_gk<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> AdaptiveResult<N> {
    let mut panels = vec![gk15(&mut f, a, b)];
    loop {
        let mut total = [0.0; N];
        let mut err = 0.0;
        for p in &panels {
            for (t, v) in total.iter_mut().zip(&p.value) {
                *t += v;
            }
            err += p.err;
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let target = abs_tol.max(rel_tol * scale);
        if err <= target || panels.len() >= max_panels {
            return AdaptiveResult {
                value: total,
                error_estimate: err,
                panels: panels.len(),
                converged: err <= target,
            };
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                if p.err > be {
                    (i, p.err)
                } else {
                    (bi, be)
                }
            });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk15(&mut f, p.a, mid));
        panels.push(gk15(&mut f, mid, p.b));
    }
}

/// Scalar convenience wrapper around [`adaptive_gk`].
pub fn adaptive_gk_scalar(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> AdaptiveResult<1> {
    adaptive_gk(|x| [f(x)], a, b, abs_tol, rel_tol, 20_000)
}
