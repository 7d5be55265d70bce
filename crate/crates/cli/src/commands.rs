use std::collections::BTreeMap;

use hallbounds_core::bounds_elem::{
    all_elementary_verdicts, b_interval, circle_params, elementary_check, superfluous_cstar_bound, CircleParams,
    SuperfluousBound,
};
use hallbounds_core::bounds_hs::{evaluate_hs, hs_geometry, HsCoefficients, HsGeometry, YTensorTI};
use hallbounds_core::gamma::{
    gamma1_of_xi, gamma_asymmetry, gamma_avg_closed, gamma_avg_closed_inverse, gamma_avg_numeric, gamma_of_xi,
    GammaAverage,
};
use hallbounds_core::laminate::{
    counterexample_spec, counterexample_sweep, rank_two_effective, JumpResiduals,
    LaminateSpec, SweepPoint,
};
use hallbounds_core::verdict::all_satisfied;
use hallbounds_core::{BoundsVerdict, Matrix3, Matrix6, PhaseDistribution, TIConductivity, Vector3};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::job::{self, BoundsJob, Command, CounterexampleJob, GammaJob, HsJob, LaminateJob};
use crate::json::to_report_string;
use crate::svg::render_plot;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_QUAD_ORDER: usize = 64;
/// Azimuthal nodes; the integrands are trigonometric polynomials of low
/// degree in φ, so the trapezoid rule is exact here.
const PHI_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { tol: 1e-9, quad_order: None }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<I, R> {
    pub schema_version: u32,
    pub command: &'static str,
    pub settings: Settings,
    pub input: I,
    pub notices: Vec<String>,
    pub result: R,
    pub verdicts: Vec<BoundsVerdict>,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Rendered output and the process exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub exit_code: u8,
}

impl<I: Serialize, R: Serialize> Report<I, R> {
    fn new(command: Command, settings: Settings, input: I, result: R) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.name(),
            settings,
            input,
            notices: Vec::new(),
            result,
            verdicts: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    fn render(&self) -> CliResult<Output> {
        let exit_code = if all_satisfied(&self.verdicts) { 0 } else { 1 };
        Ok(Output { text: to_report_string(self)?, exit_code })
    }
}

fn rows(m: &Matrix3) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn check_tol(settings: &Settings) -> CliResult<()> {
    if settings.tol.is_finite() && settings.tol >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Input(format!("--tol must be finite and non-negative, got {}", settings.tol)))
    }
}

pub fn run(command: Command, job_text: &str, settings: &Settings) -> CliResult<Output> {
    check_tol(settings)?;
    match command {
        Command::Bounds => run_bounds(job::parse(job_text)?, settings),
        Command::Hs => run_hs(job::parse(job_text)?, settings),
        Command::Laminate => run_laminate(job::parse(job_text)?, settings),
        Command::Counterexample => run_counterexample(job::parse(job_text)?, settings),
        Command::GammaCheck => run_gamma_check(job::parse(job_text)?, settings),
        Command::Plot => run_plot(job::parse(job_text)?, settings),
    }
}

#[derive(Debug, Serialize)]
pub struct BoundsResult {
    pub b_interval: (f64, f64),
    pub circle_params: CircleParams,
    pub superfluous: SuperfluousBound,
}

pub fn run_bounds(job: BoundsJob, settings: &Settings) -> CliResult<Output> {
    let entries = job
        .phases
        .iter()
        .map(|p| Ok((p.f, TIConductivity::new(p.a, p.b, p.c)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let d = PhaseDistribution::new(entries)?;
    let result = BoundsResult {
        b_interval: b_interval(&d),
        circle_params: circle_params(&d),
        superfluous: superfluous_cstar_bound(&d),
    };
    let candidate = job.candidate;
    let mut report = Report::new(Command::Bounds, *settings, job, result);
    if let Some(c) = candidate {
        report.verdicts = all_elementary_verdicts(c.a, c.b, c.c, &d, settings.tol)?;
    } else {
        report.notices.push("no candidate given; bounds only".into());
    }
    report.render()
}

#[derive(Debug, Serialize)]
pub struct HsResult {
    pub f1: f64,
    pub phases: [TIConductivity; 2],
    pub coefficients: HsCoefficients,
    pub y: YTensorTI,
    pub phase_circle_residuals: [[f64; 2]; 2],
    pub geometry: HsGeometry,
}

const SWAP_NOTICE: &str = "phases swapped to satisfy b₁ ≥ b₂";

pub fn run_hs(job: HsJob, settings: &Settings) -> CliResult<Output> {
    let [p1, p2] = [job.phases[0].conductivity()?, job.phases[1].conductivity()?];
    let eval = evaluate_hs(job.f1, p1, p2, job.candidate.conductivity()?, settings.tol)?;
    let result = HsResult {
        f1: eval.f1,
        phases: eval.phases,
        coefficients: eval.coefficients,
        y: eval.y,
        phase_circle_residuals: eval.phase_circle_residuals,
        geometry: hs_geometry(&eval.coefficients),
    };
    let mut report = Report::new(Command::Hs, *settings, job, result);
    if eval.swapped {
        report.notices.push(SWAP_NOTICE.into());
    }
    if eval.coefficients.degenerate {
        report.notices.push("a₁ = a₂: the minus disk degenerates to the half-plane a_Y ≥ a₁".into());
    }
    report.verdicts = eval.verdicts;
    report.render()
}

pub fn run_plot(job: HsJob, settings: &Settings) -> CliResult<Output> {
    let [p1, p2] = [job.phases[0].conductivity()?, job.phases[1].conductivity()?];
    let eval = evaluate_hs(job.f1, p1, p2, job.candidate.conductivity()?, settings.tol)?;
    Ok(Output { text: render_plot(&eval), exit_code: 0 })
}

#[derive(Debug, Serialize)]
pub struct Fields {
    pub e1: [[f64; 3]; 3],
    pub e2: [[f64; 3]; 3],
    pub e3: [[f64; 3]; 3],
    pub eta1: [f64; 3],
    pub eta2: [f64; 3],
}

#[derive(Debug, Serialize)]
pub struct LaminateResult {
    pub sigma_star: [[f64; 3]; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transversely_isotropic: Option<TIConductivity>,
    pub region_fractions: [f64; 3],
    pub fields: Fields,
    pub residuals: JumpResiduals,
}

pub fn run_laminate(job: LaminateJob, settings: &Settings) -> CliResult<Output> {
    let mats: Vec<Matrix3> = job.phases.iter().map(|p| p.matrix()).collect();
    let (phases, inner) = match (mats.as_slice(), &job.inner) {
        // rank one: the "inner laminate" is the second phase on its own
        ([a, b], None) => ([*a, *b, *b], (job.outer.direction(), 0.5)),
        ([a, b, c], Some(l)) => ([*a, *b, *c], (l.direction(), l.fraction)),
        _ => {
            return Err(CliError::Input(
                "laminate needs two phases without `inner`, or three phases with `inner`".into(),
            ))
        }
    };
    let spec = LaminateSpec::new(job.outer.direction(), job.outer.fraction, inner.0, inner.1, phases)?;
    let sol = rank_two_effective(&spec)?;
    let fractions = spec.region_fractions();
    let star_ti = TIConductivity::from_matrix(&sol.sigma_star, settings.tol.max(1e-12)).ok();

    let mut verdicts = Vec::new();
    let mut notices = Vec::new();
    let phase_ti: Option<Vec<TIConductivity>> = job.phases.iter().map(|p| p.ti()).collect();
    match phase_ti {
        Some(ti) => {
            let regions = if job.inner.is_some() { ti.clone() } else { vec![ti[0], ti[1], ti[1]] };
            let d = PhaseDistribution::new(fractions.iter().copied().zip(regions).collect())?;
            verdicts = match star_ti {
                Some(s) => all_elementary_verdicts(s.a, s.b, s.c, &d, settings.tol)?,
                None => vec![elementary_check(&sol.sigma_star, &d, settings.tol)?],
            };
        }
        None => notices.push("phases given as matrices; bounds are not evaluated".into()),
    }

    let f = &sol.fields;
    let result = LaminateResult {
        sigma_star: rows(&sol.sigma_star),
        transversely_isotropic: star_ti,
        region_fractions: fractions,
        fields: Fields {
            e1: rows(&f.e1),
            e2: rows(&f.e2),
            e3: rows(&f.e3),
            eta1: f.eta1.into(),
            eta2: f.eta2.into(),
        },
        residuals: sol.residuals,
    };
    let mut report = Report::new(Command::Laminate, *settings, job, result);
    report.notices = notices;
    report.verdicts = verdicts;
    report.diagnostics.insert("condition".into(), sol.condition);
    report.diagnostics.insert("max_relative_residual".into(), sol.residuals.max_relative());
    report.render()
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    #[serde(flatten)]
    pub point: SweepPoint,
    pub opposite_minor_signs: bool,
}

#[derive(Debug, Serialize)]
pub struct CounterexampleResult {
    pub points: Vec<SweepRow>,
    pub limit_c: f64,
    pub expected_limit: f64,
    pub deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_order: Option<f64>,
    pub opposite_minor_signs_everywhere: bool,
}

fn locate_failure(job: &CounterexampleJob, err: hallbounds_core::Error) -> CliError {
    for &theta in &job.theta_grid {
        let failed = counterexample_spec(theta, job.kappa, job.variant).and_then(|s| rank_two_effective(&s));
        if let Err(e) = failed {
            return CliError::from(e).with_context(&format!("theta = {theta:e}"));
        }
    }
    err.into()
}

pub fn run_counterexample(job: CounterexampleJob, settings: &Settings) -> CliResult<Output> {
    if !(job.kappa.is_finite() && job.kappa > 0.0) {
        return Err(CliError::Input(format!("kappa must be positive, got {}", job.kappa)));
    }
    let sweep = match counterexample_sweep(job.kappa, job.variant, &job.theta_grid) {
        Ok(s) => s,
        Err(e) => return Err(locate_failure(&job, e)),
    };
    let expected = job.variant.limit_hall(job.kappa);
    let points: Vec<SweepRow> = sweep
        .points
        .iter()
        .map(|p| SweepRow { point: *p, opposite_minor_signs: p.minor_e2 * p.minor_e3 < 0.0 })
        .collect();
    let everywhere = points.iter().all(|p| p.opposite_minor_signs);
    let max_condition = sweep.points.iter().map(|p| p.condition).fold(0.0, f64::max);
    let max_residual = sweep.points.iter().map(|p| p.max_jump_residual).fold(0.0, f64::max);
    let result = CounterexampleResult {
        points,
        limit_c: sweep.limit_c,
        expected_limit: expected,
        deviation: sweep.limit_c - expected,
        observed_order: sweep.observed_order,
        opposite_minor_signs_everywhere: everywhere,
    };
    let mut report = Report::new(Command::Counterexample, *settings, job, result);
    if sweep.observed_order.is_none() {
        report.notices.push("observed order needs three monotone samples".into());
    }
    if everywhere {
        report.notices.push("minors of E² and E³ have opposite signs at every θ".into());
    }
    report.diagnostics.insert("max_condition".into(), max_condition);
    report.diagnostics.insert("max_relative_residual".into(), max_residual);
    report.render()
}

#[derive(Debug, Serialize)]
pub struct EntryComparison {
    pub entry: (usize, usize),
    pub closed: f64,
    pub numeric: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Serialize)]
pub struct GammaResult {
    pub d1: f64,
    pub directions: usize,
    pub relation_residual: f64,
    pub max_asymmetry: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_average: Option<GammaAverage>,
    pub comparison: Vec<EntryComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_identity_residual: Option<f64>,
    /// Limit of the inverse average, reported when `d₁` vanishes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_inverse: Option<[[f64; 6]; 6]>,
}

/// Fibonacci-lattice directions; the offset keeps every point off the
/// equator, where `Γ` is undefined for a degenerate reference.
fn directions(n: usize) -> Vec<Vector3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            Vector3::new(r * c, r * s, z)
        })
        .collect()
}

// Structurally nonzero entries of the average
const PATTERN: [(usize, usize); 10] =
    [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (0, 4), (4, 0), (1, 3), (3, 1)];

pub fn run_gamma_check(job: GammaJob, settings: &Settings) -> CliResult<Output> {
    let l0 = job.l0;
    l0.validate()?;
    let order = settings.quad_order.or(job.quad_order).unwrap_or(DEFAULT_QUAD_ORDER);
    if order < 2 {
        return Err(CliError::Input(format!("quadrature order must be at least 2, got {order}")));
    }

    let dirs = directions(64);
    let mut relation: f64 = 0.0;
    let mut asym: f64 = 0.0;
    for xi in &dirs {
        let gam = gamma_of_xi(&l0, xi)?;
        let p = gamma1_of_xi(xi)?;
        let scale = 1.0 + gam.amax();
        let range = (p * gam - gam).amax();
        let kernel = (p * (Matrix6::identity() - l0.matrix() * gam)).amax();
        relation = relation.max(range.max(kernel) / scale);
        asym = asym.max(gamma_asymmetry(&gam) / scale);
    }

    let mut verdicts = vec![
        BoundsVerdict::from_residual("defining_relations", relation, settings.tol, &[]),
        BoundsVerdict::from_residual("symmetry", asym, settings.tol, &[]),
    ];
    let mut notices = Vec::new();
    let mut diagnostics = BTreeMap::new();
    let mut result = GammaResult {
        d1: l0.d1(),
        directions: dirs.len(),
        relation_residual: relation,
        max_asymmetry: asym,
        closed_average: None,
        comparison: Vec::new(),
        trace_identity_residual: None,
        limit_inverse: None,
    };

    if l0.d1_vanishes() {
        let inv = gamma_avg_closed_inverse(&l0)?;
        result.limit_inverse = Some(std::array::from_fn(|i| std::array::from_fn(|j| inv[(i, j)])));
        notices.push("d₁ = 0: the average diverges; reporting the limit of its inverse".into());
    } else {
        let closed = gamma_avg_closed(&l0)?;
        let cm = closed.matrix();
        let numeric = gamma_avg_numeric(&l0, order, PHI_NODES)?;
        let mut worst: f64 = 0.0;
        for &(i, j) in &PATTERN {
            let diff = (numeric[(i, j)] - cm[(i, j)]).abs();
            worst = worst.max(diff / cm[(i, j)].abs().max(1.0));
            result.comparison.push(EntryComparison {
                entry: (i + 1, j + 1),
                closed: cm[(i, j)],
                numeric: numeric[(i, j)],
                abs_diff: diff,
            });
        }
        let off_pattern = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j)))
            .filter(|ij| !PATTERN.contains(ij))
            .map(|(i, j)| numeric[(i, j)].abs())
            .fold(0.0, f64::max);
        let trace = closed.trace_identity_residual(&l0);
        verdicts.push(BoundsVerdict::from_residual(
            "numeric_vs_closed",
            worst.max(off_pattern),
            settings.tol,
            &[("quad_order", order as f64)],
        ));
        verdicts.push(BoundsVerdict::from_residual("trace_identity", trace.abs(), settings.tol, &[]));
        result.closed_average = Some(closed);
        result.trace_identity_residual = Some(trace);
        diagnostics.insert("quad_order".into(), order as f64);
        diagnostics.insert("phi_nodes".into(), PHI_NODES as f64);
        diagnostics.insert("off_pattern_max".into(), off_pattern);
    }

    let mut report = Report::new(Command::GammaCheck, *settings, job, result);
    report.notices = notices;
    report.verdicts = verdicts;
    report.diagnostics = diagnostics;
    report.render()
}
