//! One function per subcommand. Each returns the JSON result printed on
//! stdout and writes any requested files.

use std::path::Path;

use hardy_core::bell::{Behavior, Scenario};
use hardy_core::colored::{theta_solutions, ColoredCurve};
use hardy_core::iw::{iw_classical, iw_quantum_kkt, iw_quantum_numeric, IwSpec};
use hardy_core::ladder::{
    ladder_behavior, ladder_global_randomness, ladder_hardy_prob, ladder_optimal_t, ladder_zeros, LadderParams,
};
use hardy_core::nosignaling::{all_targets, ns_analytic_bound, ns_hardy_level_bound, ns_lp_max_prob, SeedBounds};
use hardy_core::tilted::{
    behavior_of, breakpoints, canonical_strategy, h_global, optimal_sin_theta, optimal_theta, quantum_max, randomness,
    selftest_uniqueness_check, TiltParameter,
};
use hardy_core::HardyError;
use hardy_gadget::compile::HardyPair;
use hardy_gadget::scalar::QSqrt3;
use hardy_gadget::{
    build_gadget15, compile_hardy_test, lhv_search, quantum_verify, rotate_copies, verify_gadget_coloring,
};
use hardy_npa::programs::{functional_problem, guess_problem, CurvePoint, ValueConstraint};
use hardy_npa::sdpa::export_sdpa;
use hardy_npa::{guess_prob_vs_iw, max_functional_q2, mdl_rate_curve, ClarabelSolver, HRule};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::artifact::{in_dir, write_csv, write_json, Envelope, RunConfig};
use crate::cli::*;
use crate::{CertError, Result};

pub struct Ctx {
    pub config: RunConfig,
    pub solver: ClarabelSolver,
}

/// Result of a command; `failed` carries the reason when a verification
/// ran but did not pass.
pub struct Outcome {
    pub result: Value,
    pub failed: Option<String>,
}

impl From<Value> for Outcome {
    fn from(result: Value) -> Self {
        Outcome { result, failed: None }
    }
}

pub fn run(command: &Command, ctx: &Ctx) -> Result<Outcome> {
    match command {
        Command::Tilted(a) => tilted(a, ctx).map(Into::into),
        Command::TiltedSweep(a) => tilted_sweep(a, ctx).map(Into::into),
        Command::Colored(a) => colored(a, ctx).map(Into::into),
        Command::Iw(a) => iw(a, ctx).map(Into::into),
        Command::NpaGuess(a) => npa_guess(a, ctx).map(Into::into),
        Command::MdlCurve(a) => mdl_curve(a, ctx).map(Into::into),
        Command::NsBound(a) => ns_bound(a, ctx).map(Into::into),
        Command::Ladder(a) => ladder(a, ctx).map(Into::into),
        Command::Gadget(a) => gadget(a, ctx),
        Command::ReproduceFigures(a) => reproduce_figures(a, ctx).map(Into::into),
    }
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(lo < hi) {
        return Err(CertError::Usage(format!("need steps >= 2 and lo < hi, got {steps} points on [{lo}, {hi}]")));
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

fn tilted(a: &TiltedArgs, ctx: &Ctx) -> Result<Value> {
    let w = TiltParameter::new(a.w)?;
    let beh = behavior_of(&canonical_strategy(w));
    let r = randomness(w);
    let selftest = match a.selftest {
        Some(restarts) => Some(selftest_uniqueness_check(w, restarts, ctx.config.seed)?),
        None => None,
    };
    Ok(json!({
        "w": a.w,
        "theta": optimal_theta(w),
        "sin_theta": optimal_sin_theta(w),
        "quantum_max": quantum_max(w),
        "h_local": r.h_local,
        "h_global": r.h_global,
        "h_global_from_behavior": r.h_global_from_behavior,
        "global_branch": r.branch,
        "behavior": beh.to_json(),
        "selftest": selftest,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub w: f64,
    pub theta: f64,
    pub pmax: f64,
    pub h_local: f64,
    pub h_global: f64,
}

fn tilted_sweep(a: &SweepArgs, ctx: &Ctx) -> Result<Value> {
    let rows = linspace(a.wmin, a.wmax, a.steps)?
        .into_iter()
        .map(|wv| {
            let w = TiltParameter::new(wv)?;
            let r = randomness(w);
            Ok(SweepRow { w: wv, theta: optimal_theta(w), pmax: quantum_max(w), h_local: r.h_local, h_global: r.h_global })
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(&a.out, &ctx.config, &rows)?;
    Ok(json!({ "rows": rows.len(), "out": a.out }))
}

fn colored(a: &ColoredArgs, ctx: &Ctx) -> Result<Value> {
    let w = TiltParameter::new(a.w)?;
    let curve = ColoredCurve::new(w)?;
    let points = curve.sample(a.steps)?;
    let theta_at_max = theta_solutions(curve.quantum_max, w)?.0;
    let summary = json!({
        "w": a.w,
        "quantum_max": curve.quantum_max,
        "p_k": curve.p_k,
        "p_0": curve.p_0,
        "theta_at_max": theta_at_max,
        "validated": curve.validated,
    });
    match &a.out {
        Some(out) => {
            write_csv(out, &ctx.config, &points)?;
            Ok(json!({ "curve": summary, "rows": points.len(), "out": out }))
        }
        None => Ok(json!({ "curve": summary, "points": points })),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IwRow {
    pub w: f64,
    pub classical: f64,
    /// Empty where the closed form has no verified candidate.
    pub quantum_kkt: Option<f64>,
    pub quantum_numeric: f64,
    pub alpha1: f64,
}

fn iw_row(w: f64) -> Result<(IwRow, Value)> {
    IwSpec::new(w)?;
    let numeric = iw_quantum_numeric(w)?;
    let kkt = iw_quantum_kkt(w);
    let alpha1 = kkt.as_ref().map(|k| k.alpha1).unwrap_or(numeric.alpha1);
    let detail = match &kkt {
        Ok(k) => json!({ "candidate": k.candidate_index, "rule_index": k.rule_index, "rule_agrees": k.rule_agrees }),
        Err(e) => json!({ "error": e.code(), "message": e.to_string() }),
    };
    let row = IwRow {
        w,
        classical: iw_classical(w),
        quantum_kkt: kkt.ok().map(|k| k.lambda_max),
        quantum_numeric: numeric.lambda_max,
        alpha1,
    };
    Ok((row, detail))
}

fn iw(a: &IwArgs, ctx: &Ctx) -> Result<Value> {
    if a.sweep {
        let rows =
            linspace(a.wmin, a.wmax, a.steps)?.into_iter().map(|w| iw_row(w).map(|r| r.0)).collect::<Result<Vec<_>>>()?;
        let out = a.out.as_ref().expect("clap requires --out with --sweep");
        write_csv(out, &ctx.config, &rows)?;
        return Ok(json!({ "rows": rows.len(), "out": out }));
    }
    let w = a.w.expect("clap requires --w without --sweep");
    let (row, kkt) = iw_row(w)?;
    let mut v = serde_json::to_value(row)?;
    v["kkt"] = kkt;
    Ok(v)
}

fn npa_guess(a: &NpaGuessArgs, ctx: &Ctx) -> Result<Value> {
    let setting = (a.setting.0, a.setting.1);
    if let Some(path) = &a.export_sdpa {
        export_sdpa(&guess_problem(a.w, a.iw, setting, ValueConstraint::Equal)?, path)?;
    }
    let g = guess_prob_vs_iw(a.w, a.iw, setting, &ctx.solver)?;
    let mut v = serde_json::to_value(&g)?;
    v["local_bound"] = json!(iw_classical(a.w));
    Ok(v)
}

/// `l = k/(4 steps)` for `k = 1..=steps`.
pub fn l_grid(steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(CertError::Usage("need at least one l point".into()));
    }
    Ok((1..=steps).map(|k| 0.25 * k as f64 / steps as f64).collect())
}

fn export_curve_programs(dir: &Path, w: f64, setting: (usize, usize), points: &[CurvePoint]) -> Result<usize> {
    let mut files = 0;
    for (k, p) in points.iter().enumerate() {
        let bounds = SeedBounds { l: p.l, h: p.h, epsilon: None };
        let f = hardy_core::nosignaling::tilde_mdl_functional(w, &bounds);
        export_sdpa(&functional_problem(&f)?, &in_dir(dir, &format!("tilde_l{:02}.dat-s", k + 1))?)?;
        files += 1;
        if p.threshold > iw_classical(w) {
            let g = guess_problem(w, p.threshold, setting, ValueConstraint::AtLeast)?;
            export_sdpa(&g, &in_dir(dir, &format!("guess_l{:02}.dat-s", k + 1))?)?;
            files += 1;
        }
    }
    Ok(files)
}

fn mdl_curve(a: &MdlCurveArgs, ctx: &Ctx) -> Result<Value> {
    let setting = (a.setting.0, a.setting.1);
    let points = mdl_rate_curve(a.w, &l_grid(a.steps)?, a.rule.into(), setting, &ctx.solver)?;
    let exported = match &a.export_sdpa {
        Some(dir) => export_curve_programs(dir, a.w, setting, &points)?,
        None => 0,
    };
    match &a.out {
        Some(out) => {
            write_csv(out, &ctx.config, &points)?;
            Ok(json!({ "rows": points.len(), "out": out, "sdpa_files": exported }))
        }
        None => Ok(json!({ "points": points, "sdpa_files": exported })),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsRow {
    pub a: usize,
    pub b: usize,
    pub x: usize,
    pub y: usize,
    /// Empty when no no-signalling box reaches the Hardy value.
    pub lp_max: Option<f64>,
    pub analytic_bound: f64,
    pub within_bound: bool,
}

/// The Hardy-level value matching an MDL value `delta`: the two analytic
/// bounds coincide under this map.
pub fn hardy_level_value(w: f64, delta: f64, bounds: &SeedBounds) -> f64 {
    let v = delta / bounds.lh();
    if w <= 0.0 {
        v
    } else {
        v - w
    }
}

fn ns_bound(a: &NsBoundArgs, ctx: &Ctx) -> Result<Value> {
    let bounds = SeedBounds::new(a.l, a.h)?;
    let analytic = ns_analytic_bound(a.w, a.delta, &bounds)?;
    let v = hardy_level_value(a.w, a.delta, &bounds);
    let mut out = json!({ "w": a.w, "delta": a.delta, "l": a.l, "h": a.h, "analytic_bound": analytic, "hardy_value": v });
    if !a.lp_verify {
        return Ok(out);
    }
    let level = ns_hardy_level_bound(a.w, v)?.clamp(0.0, 1.0);
    let mut rows = Vec::new();
    for t in all_targets() {
        let lp_max = match ns_lp_max_prob(a.w, v, t) {
            Ok(m) => Some(m),
            Err(HardyError::Infeasible(_)) => None,
            Err(e) => return Err(e.into()),
        };
        let within_bound = lp_max.is_none_or(|m| m <= level + 1e-9);
        rows.push(NsRow { a: t.0, b: t.1, x: t.2, y: t.3, lp_max, analytic_bound: level, within_bound });
    }
    out["violations"] = json!(rows.iter().filter(|r| !r.within_bound).count());
    out["feasible"] = json!(rows.iter().any(|r| r.lp_max.is_some()));
    match &a.out {
        Some(path) => {
            write_csv(path, &ctx.config, &rows)?;
            out["out"] = json!(path);
        }
        None => out["entries"] = serde_json::to_value(&rows)?,
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub t: f64,
    pub p_hardy: f64,
    pub h_global: f64,
}

fn ladder(a: &LadderArgs, ctx: &Ctx) -> Result<Value> {
    if a.sweep {
        let rows = (1..=a.steps)
            .map(|k| {
                let t = k as f64 / (a.steps + 1) as f64;
                let p = LadderParams::new(a.n, t)?;
                Ok(LadderRow { t, p_hardy: ladder_hardy_prob(&p).value, h_global: ladder_global_randomness(&p) })
            })
            .collect::<Result<Vec<_>>>()?;
        let out = a.out.as_ref().expect("clap requires --out with --sweep");
        write_csv(out, &ctx.config, &rows)?;
        return Ok(json!({ "rows": rows.len(), "out": out }));
    }
    let (t, optimal) = match a.t {
        Some(t) => (t, false),
        None => (ladder_optimal_t(a.n)?.0, true),
    };
    let p = LadderParams::new(a.n, t)?;
    let hardy = ladder_hardy_prob(&p);
    let beh = ladder_behavior(&p)?;
    let zero_residual = ladder_zeros(a.n).iter().map(|&(a, b, x, y)| beh.p(a, b, x, y)).fold(0.0, f64::max);
    Ok(json!({
        "n": a.n,
        "t": t,
        "t_optimal": optimal,
        "p_hardy": hardy.value,
        "printed_form": hardy.printed_form,
        "forms_agree": hardy.forms_agree,
        "h_global": ladder_global_randomness(&p),
        "zero_constraints": ladder_zeros(a.n).len(),
        "zero_residual": zero_residual,
    }))
}

/// The compiled gadget test as written by `gadget --emit-test`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetTestFile {
    pub completion_method: String,
    /// `inputs[x][a]` is the unnormalized vector of outcome `a` of input `x`.
    pub inputs: Vec<Vec<[QSqrt3; 4]>>,
    pub completed_inputs: Vec<usize>,
    pub x_star: usize,
    pub y_star: usize,
    pub s_hz: Vec<HardyPair>,
    pub s_exp: Vec<HardyPair>,
    /// Exact `P(a,b|x*,y*)`.
    pub star_table: Vec<Vec<QSqrt3>>,
    pub star_behavior: hardy_core::bell::BehaviorJson,
}

fn gadget(a: &GadgetArgs, ctx: &Ctx) -> Result<Outcome> {
    let g = build_gadget15()?;
    let rot = rotate_copies(&g)?;
    let test = compile_hardy_test(&rot)?;
    let mut result = json!({
        "gadget": { "vertices": g.len(), "edges": g.edges.len(), "maximal_cliques": g.cliques.len() },
        "rotation": {
            "labelled_vertices": rot.labelled_vertices(),
            "rays": rot.graph.len(),
            "edges": rot.graph.edges.len(),
            "maximal_cliques": rot.graph.cliques.len(),
            "copies_orthogonal": true,
        },
        "test": {
            "inputs": test.inputs.len(),
            "completed_inputs": test.completed_inputs.len(),
            "rays": test.rays.len(),
            "zero_constraints": test.s_hz.len(),
            "x_star": test.x_star,
            "y_star": test.y_star,
            "completion_method": test.completion_method,
        },
    });
    let quantum = quantum_verify(&test)?;
    if let Some(path) = &a.emit_test {
        let star: Vec<f64> = quantum.star_table.iter().flatten().map(QSqrt3::to_f64).collect();
        let file = GadgetTestFile {
            completion_method: test.completion_method.clone(),
            inputs: test.inputs.iter().map(|b| b.iter().map(|&r| test.rays[r].vector.clone()).collect()).collect(),
            completed_inputs: test.completed_inputs.clone(),
            x_star: test.x_star,
            y_star: test.y_star,
            s_hz: test.s_hz.clone(),
            s_exp: test.s_exp.clone(),
            star_table: quantum.star_table.clone(),
            star_behavior: Behavior::new(Scenario::new(1, 1, 4, 4), star)?.to_json(),
        };
        write_json(path, &Envelope::new(ctx.config.clone(), file))?;
        result["emitted"] = json!(path);
    }
    if !a.verify {
        return Ok(result.into());
    }
    let coloring = verify_gadget_coloring(&g)?;
    let lhv = lhv_search(&test, a.lhv_cap)?;
    let mut failures = Vec::new();
    if !coloring.certified {
        failures.push("a valid coloring sets both distinguished vertices to 1");
    }
    if !quantum.passed() {
        failures.push("the quantum strategy misses an exact check");
    }
    if lhv.max_hardy_hits > 0 {
        failures.push("a deterministic strategy fires a distinguished pair");
    }
    result["coloring"] = serde_json::to_value(&coloring)?;
    result["quantum"] = serde_json::to_value(&quantum)?;
    result["lhv"] = serde_json::to_value(&lhv)?;
    result["passed"] = json!(failures.is_empty());
    let failed = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(Outcome { result, failed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub iw_value: f64,
    pub guess: f64,
    pub min_entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub l: f64,
    pub sum_w0: f64,
    pub sum_w044: f64,
    pub third_w0: f64,
    pub third_w044: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub name: String,
    pub reference: f64,
    pub computed: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub ok: bool,
}

fn summary_row(name: &str, reference: f64, computed: f64, tolerance: f64) -> SummaryRow {
    let deviation = computed - reference;
    SummaryRow { name: name.into(), reference, computed, deviation, tolerance, ok: deviation.abs() <= tolerance }
}

/// The tilt of the guessing curve and of the second pair of rate curves.
pub const FIGURE_W: f64 = 0.44;

fn reproduce_figures(a: &FigureArgs, ctx: &Ctx) -> Result<Value> {
    let solver = &ctx.solver;
    let top = iw_quantum_numeric(FIGURE_W)?.lambda_max;
    let fig1 = linspace(iw_classical(FIGURE_W), top, a.fig1_points)?
        .into_iter()
        .map(|v| {
            let g = guess_prob_vs_iw(FIGURE_W, v, (1, 1), solver)?;
            Ok(Fig1Row { iw_value: v, guess: g.guess, min_entropy: g.min_entropy })
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = l_grid(a.steps)?;
    let curve = |w: f64, rule: HRule| -> Result<Vec<f64>> {
        Ok(mdl_rate_curve(w, &grid, rule, (1, 1), solver)?.into_iter().map(|p| p.min_entropy).collect())
    };
    let (s0, s44) = (curve(0.0, HRule::Sum)?, curve(FIGURE_W, HRule::Sum)?);
    let (t0, t44) = (curve(0.0, HRule::Third)?, curve(FIGURE_W, HRule::Third)?);
    let fig2: Vec<Fig2Row> = (0..grid.len())
        .map(|i| Fig2Row { l: grid[i], sum_w0: s0[i], sum_w044: s44[i], third_w0: t0[i], third_w044: t44[i] })
        .collect();

    let bp = breakpoints();
    let w0 = TiltParameter::new(bp.w0)?;
    let colored = ColoredCurve::new(w0)?;
    let tsirelson = 2.0 * std::f64::consts::SQRT_2;
    let chsh = max_functional_q2(&hardy_core::bell::iw_functional(0.0), solver)?.value;
    let chsh_h = guess_prob_vs_iw(0.0, tsirelson, (1, 1), solver)?.min_entropy;
    let summary = vec![
        summary_row("quantum_max_w_zero", 0.0901699, quantum_max(TiltParameter::new(0.0)?), 1e-7),
        summary_row("breakpoint_w0", -0.1546, bp.w0, 5e-5),
        summary_row("breakpoint_w1", -0.1054, bp.w1, 5e-5),
        summary_row("h_global_at_w0", 1.6806, h_global(w0), 1e-3),
        summary_row("colored_p_k", 0.01563, colored.p_k, 2e-4),
        summary_row("colored_p_0", 0.01366, colored.p_0, 2e-4),
        summary_row("theta_at_w0", 1.1356, optimal_theta(w0), 1e-3),
        summary_row("chsh_level2_bound", tsirelson, chsh, 1e-6),
        summary_row("fig1_max_min_entropy", 1.5860, fig1.last().map_or(f64::NAN, |r| r.min_entropy), 0.01),
        summary_row("chsh_point_min_entropy", 1.23, chsh_h, 0.02),
    ];
    let dir = &a.out_dir;
    write_csv(&in_dir(dir, "fig1.csv")?, &ctx.config, &fig1)?;
    write_csv(&in_dir(dir, "fig2.csv")?, &ctx.config, &fig2)?;
    write_csv(&in_dir(dir, "summary.csv")?, &ctx.config, &summary)?;
    let dominated = fig2.iter().all(|r| r.sum_w044 >= r.sum_w0 - 1e-6 && r.third_w044 >= r.third_w0 - 1e-6);
    Ok(json!({
        "out_dir": dir,
        "files": ["fig1.csv", "fig2.csv", "summary.csv"],
        "fig2_dominance": dominated,
        "summary": summary,
    }))
}
