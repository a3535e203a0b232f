use std::f64::consts::PI;
use std::path::Path;

use magkernel::analysis::{decade_times, fit_decay, mazya_condition, DecayFitReport, DecayModel};
use magkernel::assembly::{Assembler, KernelEvaluation, OperatorTag};
use magkernel::exactkern::{ab_kernel, KernelPoint};
use magkernel::radial::{ground_state, psi_comparison, ExteriorFit};
use magkernel::verify::{run_criterion, CRITERIA};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Command, Format, PointSpec, RunConfig};
use crate::CliError;

/// One kernel value with its certificates; also the CSV row layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelRow {
    pub t: f64,
    pub r: f64,
    pub r_prime: f64,
    pub dtheta: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub modulus: f64,
    pub phase: f64,
    pub tail_bound: f64,
    pub modes_used: usize,
    /// absent for closed-form kernels
    pub grid_n: Option<usize>,
    pub r_max: Option<f64>,
}

pub const CSV_HEADER: &str = "t,r,r_prime,dtheta,value_re,value_im,modulus,phase,tail_bound,modes_used,grid_n,r_max";

impl KernelRow {
    fn new(p: &KernelPoint, value: Complex64, tail_bound: f64, modes_used: usize, grid: Option<(usize, f64)>) -> Self {
        Self {
            t: p.t,
            r: p.r,
            r_prime: p.r_prime,
            dtheta: p.dtheta,
            value_re: value.re,
            value_im: value.im,
            modulus: value.norm(),
            phase: value.arg(),
            tail_bound,
            modes_used,
            grid_n: grid.map(|g| g.0),
            r_max: grid.map(|g| g.1),
        }
    }

    fn from_evaluation(e: &KernelEvaluation) -> Self {
        Self::new(&e.point, e.value, e.tail_bound, e.modes_used, Some((e.grid_n, e.r_max)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub command: Command,
    pub rows: Vec<KernelRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub command: Command,
    pub point: PointSpec,
    pub gs_product: f64,
    pub fit: DecayFitReport,
    pub samples: Vec<KernelRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub r: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateReport {
    pub command: Command,
    pub alpha: f64,
    pub r_fit_max: f64,
    pub fit: ExteriorFit,
    pub fit_residual: f64,
    pub leading: f64,
    pub profile: Vec<ProfileSample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MazyaOutput {
    pub command: Command,
    pub mode: i64,
    pub sigma: f64,
    pub p: f64,
    pub q: f64,
    pub supremum: Option<f64>,
    pub infinite: bool,
    pub argmax_r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionRow {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: Command,
    pub passed: bool,
    pub results: Vec<CriterionRow>,
}

/// Result of a run, ready to be rendered.
#[derive(Debug, Clone)]
pub enum Report {
    Kernel(KernelReport),
    Decay(DecayReport),
    GroundState(GroundStateReport),
    Mazya(MazyaOutput),
    Verify(VerifyReport),
}

impl Report {
    /// False only for a verification run with a failing criterion.
    pub fn passed(&self) -> bool {
        match self {
            Report::Verify(v) => v.passed,
            _ => true,
        }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut out = match self {
                    Report::Kernel(r) => serde_json::to_vec_pretty(r),
                    Report::Decay(r) => serde_json::to_vec_pretty(r),
                    Report::GroundState(r) => serde_json::to_vec_pretty(r),
                    Report::Mazya(r) => serde_json::to_vec_pretty(r),
                    Report::Verify(r) => serde_json::to_vec_pretty(r),
                }
                .map_err(|e| CliError::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let res = match self {
                    Report::Kernel(r) => write_rows(&mut w, &r.rows),
                    Report::Decay(r) => write_rows(&mut w, &r.samples),
                    Report::GroundState(r) => write_rows(&mut w, &r.profile),
                    Report::Mazya(r) => w.serialize(r),
                    Report::Verify(r) => write_rows(&mut w, &r.results),
                };
                res.map_err(|e| CliError::Io(e.to_string()))?;
                w.into_inner().map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }
}

fn write_rows<T: Serialize>(w: &mut csv::Writer<Vec<u8>>, rows: &[T]) -> csv::Result<()> {
    for r in rows {
        w.serialize(r)?;
    }
    Ok(())
}

/// Executes a validated configuration. Relative field paths resolve against `base`.
pub fn execute(cfg: &RunConfig, base: Option<&Path>) -> Result<Report, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Kernel => kernel(cfg, base),
        Command::Ab => ab(cfg),
        Command::Decay => decay(cfg, base),
        Command::Groundstate => groundstate(cfg, base),
        Command::Mazya => mazya(cfg, base),
        Command::Verify => Ok(verify(cfg)),
    }
}

fn points_at(cfg: &RunConfig, t: f64) -> Result<Vec<KernelPoint>, CliError> {
    cfg.points.iter().map(|p| Ok(KernelPoint::new(p.r, p.r_prime, p.dtheta, t)?)).collect()
}

fn times(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    cfg.times.as_ref().ok_or_else(|| CliError::Usage("no times given".into()))?.expand()
}

fn kernel(cfg: &RunConfig, base: Option<&Path>) -> Result<Report, CliError> {
    let asm = Assembler::with_policy(cfg.flux(base)?, cfg.policy());
    let tag = cfg.operator.unwrap_or(OperatorTag::Magnetic);
    let mut rows = Vec::new();
    for t in times(cfg)? {
        for p in points_at(cfg, t)? {
            rows.push(KernelRow::from_evaluation(&asm.full_kernel(&p, tag, cfg.tol)?));
        }
    }
    Ok(Report::Kernel(KernelReport { command: cfg.command, rows }))
}

fn ab(cfg: &RunConfig) -> Result<Report, CliError> {
    let alpha = cfg.alpha.unwrap_or(0.0);
    let mut rows = Vec::new();
    for t in times(cfg)? {
        for p in points_at(cfg, t)? {
            let v = ab_kernel(alpha, &p, cfg.tol)?;
            rows.push(KernelRow::new(&p, v.value, v.tail_bound, v.modes_used, None));
        }
    }
    Ok(Report::Kernel(KernelReport { command: cfg.command, rows }))
}

/// Ground-state integration radius in units of the support radius.
const R_FIT_FACTOR: f64 = 100.0;

fn decay(cfg: &RunConfig, base: Option<&Path>) -> Result<Report, CliError> {
    let flux = cfg.flux(base)?;
    let asm = Assembler::with_policy(flux.clone(), cfg.policy());
    let point = cfg.points[0];
    let model = cfg.model.unwrap_or(if flux.alpha == 0.0 && !flux.is_zero() {
        DecayModel::PowerLawLog2
    } else {
        DecayModel::PowerLaw
    });
    let gs_product = if flux.is_zero() {
        1.0
    } else {
        let gs = ground_state(&flux, cfg.r_fit_max.unwrap_or(R_FIT_FACTOR * flux.support_radius()))?;
        gs.eval(point.r) * gs.eval(point.r_prime)
    };
    let mut samples = Vec::new();
    for t in times(cfg)? {
        // tol is relative to the free diagonal 1/(4 pi t)
        let s = asm.slice(t, point.r_prime, &[point.r], OperatorTag::Magnetic, cfg.tol / (4.0 * PI * t))?;
        samples.push(KernelRow::from_evaluation(&s.evaluation(point.r, point.dtheta)));
    }
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.modulus)).collect();
    let fit = fit_decay(&pairs, model, gs_product)?;
    Ok(Report::Decay(DecayReport { command: cfg.command, point, gs_product, fit, samples }))
}

fn groundstate(cfg: &RunConfig, base: Option<&Path>) -> Result<Report, CliError> {
    let flux = cfg.flux(base)?;
    let rr = flux.support_radius();
    let r_fit_max = cfg.r_fit_max.unwrap_or(R_FIT_FACTOR * rr);
    let gs = ground_state(&flux, r_fit_max)?;
    let profile = decade_times(1e-2 * rr, r_fit_max, 16).into_iter().map(|r| ProfileSample { r, h: gs.eval(r) }).collect();
    Ok(Report::GroundState(GroundStateReport {
        command: cfg.command,
        alpha: flux.alpha,
        r_fit_max,
        fit: gs.fit,
        fit_residual: gs.fit_residual,
        leading: gs.fit.leading(),
        profile,
    }))
}

fn mazya(cfg: &RunConfig, base: Option<&Path>) -> Result<Report, CliError> {
    let flux = cfg.flux(base)?;
    let sigma = (flux.alpha + cfg.mode as f64).abs();
    let p = cfg.p.unwrap_or(2.0);
    let q = cfg.q.unwrap_or(if sigma > 0.0 { (2.0 + 2.0 * sigma) / sigma } else { p });
    let radii = match &cfg.radii {
        Some(r) => r.expand()?,
        None => (0..60).map(|i| 0.01 * flux.support_radius() * 1.25f64.powi(i)).collect(),
    };
    let m = cfg.mode;
    let w = |x: f64| x * psi_comparison(&flux, m, x).unwrap_or(1.0).powi(2);
    let rep = mazya_condition(w, w, p, q, &radii)?;
    Ok(Report::Mazya(MazyaOutput {
        command: cfg.command,
        mode: m,
        sigma,
        p,
        q,
        supremum: rep.supremum,
        infinite: rep.infinite,
        argmax_r: rep.argmax_r,
    }))
}

fn verify(cfg: &RunConfig) -> Report {
    let ids: Vec<u32> = if cfg.criteria.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { cfg.criteria.clone() };
    let mut results = Vec::new();
    for id in ids {
        let r = run_criterion(id);
        eprintln!("{} [{:>2}] {} ({:.1}s)", if r.passed { "PASS" } else { "FAIL" }, r.id, r.title, r.seconds);
        results.push(CriterionRow { id: r.id, title: r.title.to_string(), passed: r.passed, detail: r.detail });
    }
    let passed = results.iter().all(|r| r.passed);
    Report::Verify(VerifyReport { command: cfg.command, passed, results })
}
