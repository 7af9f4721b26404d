//! `symmin` — verification front end.
//!
//! Subcommands:
//!   table                reproduce the eigenvalue table over all families
//!   verify <kind>        eigen | invariance | regularity | minimality | product-rules
//!   gallery list|run     known critical-point constructions
//!
//! Exit codes: 0 all checks pass, 1 any check fails, 2 usage/config error.

mod report;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use report::{ReportLine, Sink, SCHEMA_VERSION};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use symmin_core::catalog::{
    build, default_params, so2n_restricted_subfamily, Params,
};
use symmin_core::fiber::{
    batch_stats, critical_gallery_with_angles, fiber_point_batch, find_level_point,
    jacobian_singular_values, mean_curvature_estimate, regularity_check, DescentConfig,
    Regularity, GALLERY_CASES,
};
use symmin_core::geometry::{
    dir_derivative, eigen_residuals, gradient_components, product_rule_residual, DerivOrder,
    DerivativeEngine,
};
use symmin_core::groups::{algebra_basis, haar_sample, haar_sample_rng, stream_rng, TangentBasis};
use symmin_core::{EigenfunctionSpec, Space};

#[derive(Parser)]
#[command(
    name = "symmin",
    version,
    about = "Verification laboratory for eigenfunctions and minimal fibres on the classical compact symmetric spaces"
)]
struct Cli {
    /// Worker threads for sample batches (0 = library default). Results are
    /// schedule independent.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Record real wall-clock times in reports (breaks byte-for-byte
    /// reproducibility of the output).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reproduce the (lambda, mu) table with Monte-Carlo residuals.
    Table(TableArgs),
    /// Run one verification suite against one space.
    Verify(VerifyArgs),
    /// List or reproduce the known critical-point constructions.
    #[command(after_help = "Stable case ids: so3-isotropic-p, grassR-2-2, \
                            so4-u2-old-family, grassC-generic, grassH-2-2.")]
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value_t = EngineArg::Exact)]
    engine: EngineArg,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Append JSON-lines here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append a CSV mirror here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Size n for SO(n).
    #[arg(long, default_value_t = 4)]
    so: usize,
    /// Size n for SU(n).
    #[arg(long, default_value_t = 3)]
    su: usize,
    /// Size n for Sp(n).
    #[arg(long, default_value_t = 2)]
    sp: usize,
    /// Size n for SU(n)/SO(n).
    #[arg(long = "su-so", default_value_t = 3)]
    su_so: usize,
    /// Size n for Sp(n)/U(n).
    #[arg(long = "sp-u", default_value_t = 2)]
    sp_u: usize,
    /// Size n for SO(2n)/U(n).
    #[arg(long = "so2n-u", default_value_t = 2)]
    so2n_u: usize,
    /// Size n for SU(2n)/Sp(n).
    #[arg(long = "su2n-sp", default_value_t = 2)]
    su2n_sp: usize,
    /// Sizes m,n for the three Grassmannians.
    #[arg(long, default_value = "2,2", value_parser = parse_pair)]
    gr: (usize, usize),
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(value_enum)]
    kind: VerifyKind,
    /// Space id: so_n, su_n, sp_n, su_so, sp_u, so2n_u, su2n_sp, gr_r, gr_c, gr_h.
    #[arg(long, required_unless_present = "gallery")]
    space: Option<String>,
    /// Size parameter n.
    #[arg(long)]
    n: Option<usize>,
    /// Size parameter m (Grassmannians only).
    #[arg(long)]
    m: Option<usize>,
    /// Parameter vectors as JSON, e.g. '{"a": [[1,0],[0,1],[0,0]]}'.
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EngineArg::Exact)]
    engine: EngineArg,
    /// Override the main residual tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Append JSON-lines here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append a CSV mirror here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// For `verify regularity`: run a gallery case instead of a family.
    #[arg(long)]
    gallery: Option<String>,
    /// For `verify regularity`: also export located fibre points as JSON
    /// matrices of [re, im] entries.
    #[arg(long)]
    points_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GalleryAction {
    /// Print the known cases.
    List,
    /// Reproduce one case and check its classification.
    Run {
        id: String,
        #[arg(long, default_value_t = 0.7)]
        theta: f64,
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyKind {
    Eigen,
    Invariance,
    Regularity,
    Minimality,
    #[value(name = "product-rules")]
    ProductRules,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Exact,
    Fd,
}

impl EngineArg {
    fn engine(self) -> DerivativeEngine {
        match self {
            EngineArg::Exact => DerivativeEngine::exact(),
            EngineArg::Fd => DerivativeEngine::finite_difference(),
        }
    }

    fn default_tolerance(self) -> f64 {
        match self {
            EngineArg::Exact => 1e-9,
            EngineArg::Fd => 1e-6,
        }
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected M,N".into());
    }
    let m = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let n = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((m, n))
}

fn parse_space(id: &str, n: Option<usize>, m: Option<usize>) -> Result<Space> {
    let need_n = || n.ok_or_else(|| anyhow!("--n is required for {id}"));
    let space = match id {
        "so_n" | "so" => Space::So { n: need_n()? },
        "su_n" | "su" => Space::Su { n: need_n()? },
        "sp_n" | "sp" => Space::Sp { n: need_n()? },
        "su_so" | "su_n_so_n" => Space::SuModSo { n: need_n()? },
        "sp_u" | "sp_n_u_n" => Space::SpModU { n: need_n()? },
        "so2n_u" | "so_2n_u_n" => Space::So2nModUn { n: need_n()? },
        "su2n_sp" | "su_2n_sp_n" => Space::Su2nModSpn { n: need_n()? },
        "gr_r" | "gr_c" | "gr_h" => {
            let m = m.ok_or_else(|| anyhow!("--m is required for {id}"))?;
            let n = need_n()?;
            match id {
                "gr_r" => Space::GrassmannR { m, n },
                "gr_c" => Space::GrassmannC { m, n },
                _ => Space::GrassmannH { m, n },
            }
        }
        other => bail!("unknown space id '{other}'"),
    };
    space.validate_size().map_err(|e| anyhow!("{e}"))?;
    if space.total_group().n > 8 {
        bail!("{space} exceeds the supported size range (n <= 8, m + n <= 8)");
    }
    Ok(space)
}

fn build_member(space: Space, params_json: &Option<String>) -> Result<EigenfunctionSpec> {
    let params: Params = match params_json {
        Some(s) => serde_json::from_str(s).context("parsing --params JSON")?,
        None => default_params(space),
    };
    build(space, params).map_err(|e| anyhow!("{e}"))
}

struct Ctx {
    sink: Sink,
    timing: bool,
    started: Instant,
}

#[allow(clippy::too_many_arguments)]
impl Ctx {
    fn new(out: Option<PathBuf>, csv: Option<PathBuf>, timing: bool) -> Self {
        Self {
            sink: Sink::new(out, csv),
            timing,
            started: Instant::now(),
        }
    }

    fn line(
        &mut self,
        spec_space: String,
        params: serde_json::Value,
        check: &str,
        residual: f64,
        tolerance: f64,
        samples: u64,
        seed: u64,
        engine: &str,
    ) -> Result<bool> {
        let pass = residual <= tolerance;
        let wall_time_ms = if self.timing {
            self.started.elapsed().as_millis() as u64
        } else {
            0
        };
        println!(
            "  {check:<28} residual {residual:>12.4e}  tol {tolerance:>9.1e}  {}",
            if pass { "pass" } else { "FAIL" }
        );
        self.sink.emit(ReportLine {
            schema_version: SCHEMA_VERSION,
            space: spec_space,
            params,
            check: check.to_string(),
            residual,
            tolerance,
            pass,
            samples,
            seed,
            engine: engine.to_string(),
            wall_time_ms,
        })?;
        Ok(pass)
    }
}

fn params_json(spec: &EigenfunctionSpec) -> serde_json::Value {
    serde_json::to_value(&spec.params).unwrap_or(serde_json::Value::Null)
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

fn run_table(args: TableArgs, timing: bool) -> Result<ExitCode> {
    let spaces = vec![
        Space::So { n: args.so },
        Space::Su { n: args.su },
        Space::Sp { n: args.sp },
        Space::SuModSo { n: args.su_so },
        Space::SpModU { n: args.sp_u },
        Space::So2nModUn { n: args.so2n_u },
        Space::Su2nModSpn { n: args.su2n_sp },
        Space::GrassmannR { m: args.gr.0, n: args.gr.1 },
        Space::GrassmannC { m: args.gr.0, n: args.gr.1 },
        Space::GrassmannH { m: args.gr.0, n: args.gr.1 },
    ];
    for s in &spaces {
        s.validate_size().map_err(|e| anyhow!("{e}"))?;
        if s.total_group().n > 8 {
            bail!("{s} exceeds the supported size range (n <= 8, m + n <= 8)");
        }
    }
    let engine = args.engine.engine();
    let tol = args.engine.default_tolerance();
    let mut ctx = Ctx::new(args.out, args.csv, timing);
    println!(
        "{:<22} {:>8} {:>8} {:>13} {:>13}  result",
        "space", "lambda", "mu", "tau-residual", "kappa-residual"
    );
    let mut all_pass = true;
    for space in spaces {
        let spec = build_member(space, &None)?;
        let rep = eigen_residuals(&spec, args.samples, args.seed, &engine);
        let pass = rep.max_tau_residual <= tol && rep.max_kappa_residual <= tol;
        all_pass &= pass;
        println!(
            "{:<22} {:>8} {:>8} {:>13.4e} {:>13.4e}  {}",
            space.to_string(),
            spec.lambda.to_string(),
            spec.mu.to_string(),
            rep.max_tau_residual,
            rep.max_kappa_residual,
            if pass { "ok" } else { "FAIL" }
        );
        for (check, residual) in [
            ("table-eigen-tau", rep.max_tau_residual),
            ("table-eigen-kappa", rep.max_kappa_residual),
        ] {
            let wall_time_ms = if ctx.timing {
                ctx.started.elapsed().as_millis() as u64
            } else {
                0
            };
            ctx.sink.emit(ReportLine {
                schema_version: SCHEMA_VERSION,
                space: space.to_string(),
                params: params_json(&spec),
                check: check.to_string(),
                residual,
                tolerance: tol,
                pass: residual <= tol,
                samples: args.samples as u64,
                seed: args.seed,
                engine: engine.name().to_string(),
                wall_time_ms,
            })?;
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn run_verify(args: VerifyArgs, timing: bool) -> Result<ExitCode> {
    let mut ctx = Ctx::new(args.out.clone(), args.csv.clone(), timing);

    if let Some(case_id) = &args.gallery {
        if args.kind != VerifyKind::Regularity {
            bail!("--gallery only applies to `verify regularity`");
        }
        run_gallery_case(&mut ctx, case_id, 0.7, 0.3)?;
        return Ok(exit_from(&ctx));
    }

    let space = parse_space(
        args.space.as_deref().expect("clap enforces space"),
        args.n,
        args.m,
    )?;
    let spec = build_member(space, &args.params)?;
    let engine = args.engine.engine();
    let seed = args.seed;
    println!("verify {:?} on {} ({} engine)", args.kind, space, engine.name());

    match args.kind {
        VerifyKind::Eigen => {
            let samples = args.samples.unwrap_or(50);
            let tol = args.tolerance.unwrap_or(args.engine.default_tolerance());
            let rep = eigen_residuals(&spec, samples, seed, &engine);
            let pj = params_json(&spec);
            ctx.line(
                space.to_string(),
                pj.clone(),
                "eigen-tau",
                rep.max_tau_residual,
                tol,
                samples as u64,
                seed,
                engine.name(),
            )?;
            ctx.line(
                space.to_string(),
                pj,
                "eigen-kappa",
                rep.max_kappa_residual,
                tol,
                samples as u64,
                seed,
                engine.name(),
            )?;
        }
        VerifyKind::Invariance => {
            if !space.is_quotient() {
                bail!("{space} is not a quotient family; invariance does not apply");
            }
            let samples = args.samples.unwrap_or(20);
            let group = spec.space.total_group;
            let mut worst_inv = 0.0f64;
            for i in 0..3u64 {
                let x = haar_sample(group, seed.wrapping_add(1000 + i));
                worst_inv = worst_inv.max(
                    spec.invariance_residual(&x, samples, seed.wrapping_add(i))
                        .map_err(|e| anyhow!("{e}"))?,
                );
            }
            let k_frame = TangentBasis {
                elements: spec.space.subgroup_generators(),
                kind: symmin_core::groups::BasisTag::FullAlgebra,
            };
            let exact = DerivativeEngine::exact();
            let mut worst_vert = 0.0f64;
            for i in 0..50u64 {
                let x = haar_sample(group, seed.wrapping_add(2000 + i));
                for c in gradient_components(&spec, &x, &k_frame, &exact) {
                    worst_vert = worst_vert.max(c.norm());
                }
            }
            let pj = params_json(&spec);
            let tol = args.tolerance.unwrap_or(1e-12);
            ctx.line(
                space.to_string(),
                pj.clone(),
                "invariance",
                worst_inv,
                tol,
                samples as u64,
                seed,
                engine.name(),
            )?;
            ctx.line(
                space.to_string(),
                pj,
                "vertical-derivative",
                worst_vert,
                1e-10,
                50,
                seed,
                "exact",
            )?;
        }
        VerifyKind::Regularity => {
            run_regularity(&mut ctx, &spec, &args)?;
        }
        VerifyKind::Minimality => {
            run_minimality(&mut ctx, &spec, &args)?;
        }
        VerifyKind::ProductRules => {
            run_product_rules(&mut ctx, &spec, &args)?;
        }
    }
    Ok(exit_from(&ctx))
}

/// Families with a proven-regular theorem get asserted gates; the rest are
/// reported empirically (the negative theorems are covered by the gallery).
fn expect_regular(spec: &EigenfunctionSpec) -> bool {
    match spec.space.space {
        Space::So { .. }
        | Space::Su { .. }
        | Space::Sp { .. }
        | Space::SuModSo { .. }
        | Space::SpModU { .. } => true,
        Space::Su2nModSpn { .. } => spec.lambda != spec.mu,
        Space::So2nModUn { .. } => so2n_restricted_subfamily(&spec.params),
        Space::GrassmannR { .. } | Space::GrassmannC { .. } | Space::GrassmannH { .. } => false,
    }
}

/// Serializes a complex matrix as rows of [re, im] pairs.
fn matrix_json(m: &symmin_core::ComplexMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.rows())
            .map(|i| {
                serde_json::Value::Array(
                    (0..m.cols())
                        .map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn export_fiber_points(
    path: &PathBuf,
    points: &[symmin_core::fiber::FiberPoint],
) -> Result<()> {
    let payload: Vec<serde_json::Value> = points
        .iter()
        .map(|p| {
            serde_json::json!({
                "x": matrix_json(&p.x),
                "abs_phi": p.abs_phi,
                "grad_norm": p.grad_norm,
                "iterations": p.iterations,
                "converged": p.converged,
            })
        })
        .collect();
    std::fs::write(path, serde_json::to_string_pretty(&payload)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run_regularity(ctx: &mut Ctx, spec: &EigenfunctionSpec, args: &VerifyArgs) -> Result<()> {
    let restarts = args.samples.unwrap_or(20);
    let points = fiber_point_batch(spec, args.seed, restarts, &DescentConfig::default())
        .map_err(|e| anyhow!("{e}"))?;
    if let Some(path) = &args.points_out {
        export_fiber_points(path, &points)?;
    }
    let stats = batch_stats(&points);
    let ratio = stats.converged as f64 / restarts.max(1) as f64;
    println!(
        "  {} of {} restarts converged; grad_norm in [{:.4e}, {:.4e}]",
        stats.converged, restarts, stats.min_grad_norm, stats.max_grad_norm
    );
    let pj = params_json(spec);
    let space = spec.space.space.to_string();
    if expect_regular(spec) {
        ctx.line(
            space.clone(),
            pj.clone(),
            "regularity-convergence",
            1.0 - ratio,
            0.2,
            restarts as u64,
            args.seed,
            "exact",
        )?;
        let shortfall = (1e-3 - stats.min_grad_norm).max(0.0);
        ctx.line(
            space,
            pj,
            "regularity-grad-floor",
            shortfall,
            0.0,
            stats.converged as u64,
            args.seed,
            "exact",
        )?;
    } else {
        // Empirical report: no positive regularity statement exists here, so
        // the statistics are informational and always pass.
        ctx.line(
            space,
            pj,
            "regularity-empirical",
            0.0,
            0.0,
            restarts as u64,
            args.seed,
            "exact",
        )?;
    }
    Ok(())
}

fn run_minimality(ctx: &mut Ctx, spec: &EigenfunctionSpec, args: &VerifyArgs) -> Result<()> {
    let restarts = args.samples.unwrap_or(20);
    let curvature_tol = args.tolerance.unwrap_or(1e-3);
    let points = fiber_point_batch(spec, args.seed, restarts, &DescentConfig::default())
        .map_err(|e| anyhow!("{e}"))?;
    let mut regular_points = 0u64;
    let mut worst_h = 0.0f64;
    let mut min_sigma2 = f64::INFINITY;
    for fp in points.iter().filter(|p| p.converged) {
        let (class, _) = regularity_check(spec, fp).map_err(|e| anyhow!("{e}"))?;
        if class != Regularity::Regular {
            continue;
        }
        regular_points += 1;
        if spec.mu_f64() != 0.0 && symmin_core::fiber::conformality_violation(spec, &fp.x) {
            println!(
                "  warning: gradient norms differ by more than 1e-3 at a fibre point \
                 (conformality diagnostic)"
            );
        }
        let (_, s2) = jacobian_singular_values(spec, &fp.x);
        min_sigma2 = min_sigma2.min(s2);
        worst_h = worst_h.max(mean_curvature_estimate(spec, fp, 1e-3).map_err(|e| anyhow!("{e}"))?);
    }
    println!(
        "  {regular_points} regular fibre points; min sigma2 {min_sigma2:.4e}; worst |H| {worst_h:.4e}"
    );
    let pj = params_json(spec);
    let space = spec.space.space.to_string();
    ctx.line(
        space.clone(),
        pj.clone(),
        "minimality-sample-shortfall",
        (10.0 - regular_points as f64).max(0.0),
        0.0,
        restarts as u64,
        args.seed,
        "exact",
    )?;
    // The differential maps onto R^2, so the rank-two certificate is the
    // sigma2 floor; a third singular value does not exist (reported as 0).
    ctx.line(
        space.clone(),
        pj.clone(),
        "minimality-rank-sigma3",
        0.0,
        1e-8,
        regular_points,
        args.seed,
        "exact",
    )?;
    ctx.line(
        space.clone(),
        pj.clone(),
        "minimality-rank-floor",
        (1e-3 - min_sigma2).max(0.0),
        0.0,
        regular_points,
        args.seed,
        "exact",
    )?;
    ctx.line(
        space.clone(),
        pj,
        "minimality-mean-curvature",
        worst_h,
        curvature_tol,
        regular_points,
        args.seed,
        "exact",
    )?;
    // Non-eigen control on SO(3): the 0.3-level set of a generic member
    // (complex p) must visibly fail to be minimal.
    if spec.space.space == (Space::So { n: 3 }) {
        let control = build(
            Space::So { n: 3 },
            Params::default()
                .with_a(symmin_core::catalog::isotropic_vector(3))
                .with_p(vec![
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.5),
                    Complex64::new(0.0, 0.0),
                ]),
        )
        .map_err(|e| anyhow!("{e}"))?;
        let mut exceeded = 0u32;
        let mut tested = 0u32;
        for i in 0..10u64 {
            let fp = find_level_point(
                &control,
                Complex64::new(0.3, 0.0),
                args.seed.wrapping_add(i),
                &DescentConfig::default(),
            );
            if !fp.converged || fp.grad_norm <= 1e-3 {
                continue;
            }
            tested += 1;
            if mean_curvature_estimate(&control, &fp, 1e-3).map_err(|e| anyhow!("{e}"))? > 1e-2 {
                exceeded += 1;
            }
        }
        println!("  control level |c| = 0.3: |H| > 1e-2 at {exceeded}/{tested} points");
        let ratio = if tested == 0 {
            0.0
        } else {
            exceeded as f64 / tested as f64
        };
        ctx.line(
            spec.space.space.to_string(),
            serde_json::to_value(&control.params)?,
            "control-curvature",
            1.0 - ratio,
            0.2,
            tested as u64,
            args.seed,
            "exact",
        )?;
    }
    Ok(())
}

fn run_product_rules(ctx: &mut Ctx, spec: &EigenfunctionSpec, args: &VerifyArgs) -> Result<()> {
    let probes = args.samples.unwrap_or(50);
    let tol = args.tolerance.unwrap_or(1e-6);
    let exact = DerivativeEngine::exact();
    let fd = DerivativeEngine::finite_difference();
    let group = spec.space.total_group;
    let basis = algebra_basis(group);
    let mut worst_d1 = 0.0f64;
    let mut worst_d2 = 0.0f64;
    let mut worst_pr = 0.0f64;
    let mut rng = stream_rng(args.seed, 0);
    for _ in 0..probes {
        use rand::Rng;
        let x = haar_sample_rng(group, &mut rng);
        let dir = &basis.elements[rng.gen_range(0..basis.len())];
        let e1 = dir_derivative(spec, &x, dir, DerivOrder::First, &exact);
        let f1 = dir_derivative(spec, &x, dir, DerivOrder::First, &fd);
        worst_d1 = worst_d1.max((e1 - f1).norm() / (1.0 + e1.norm()));
        let e2 = dir_derivative(spec, &x, dir, DerivOrder::Second, &exact);
        let f2 = dir_derivative(spec, &x, dir, DerivOrder::Second, &fd);
        worst_d2 = worst_d2.max((e2 - f2).norm() / (1.0 + e2.norm()));
        worst_pr = worst_pr.max(product_rule_residual(spec, spec, &x, &exact).map_err(|e| anyhow!("{e}"))?);
    }
    let pj = params_json(spec);
    let space = spec.space.space.to_string();
    ctx.line(
        space.clone(),
        pj.clone(),
        "engine-agreement-first",
        worst_d1,
        tol,
        probes as u64,
        args.seed,
        "exact+fd",
    )?;
    ctx.line(
        space.clone(),
        pj.clone(),
        "engine-agreement-second",
        worst_d2,
        tol,
        probes as u64,
        args.seed,
        "exact+fd",
    )?;
    ctx.line(
        space,
        pj,
        "product-rule",
        worst_pr,
        tol,
        probes as u64,
        args.seed,
        "exact+fd",
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// gallery
// ---------------------------------------------------------------------------

fn run_gallery_case(ctx: &mut Ctx, id: &str, theta: f64, alpha: f64) -> Result<()> {
    let r = critical_gallery_with_angles(id, theta, alpha).map_err(|e| anyhow!("{e}"))?;
    println!(
        "gallery {} on {}: phi = {:.4e}{:+.4e}i, grad_norm = {:.4e} (expected critical)",
        r.case_id, r.spec.space.space, r.phi.re, r.phi.im, r.grad_norm
    );
    let pj = params_json(&r.spec);
    let space = r.spec.space.space.to_string();
    ctx.line(
        space.clone(),
        pj.clone(),
        "gallery-phi",
        r.phi.norm(),
        1e-12,
        1,
        0,
        "exact",
    )?;
    ctx.line(space, pj, "gallery-grad", r.grad_norm, 1e-10, 1, 0, "exact")?;
    Ok(())
}

fn run_gallery(action: GalleryAction, timing: bool) -> Result<ExitCode> {
    match action {
        GalleryAction::List => {
            for case in GALLERY_CASES {
                println!("{:<20} {}", case.id, case.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        GalleryAction::Run { id, theta, alpha, out } => {
            let mut ctx = Ctx::new(out, None, timing);
            run_gallery_case(&mut ctx, &id, theta, alpha)?;
            Ok(exit_from(&ctx))
        }
    }
}

fn exit_from(ctx: &Ctx) -> ExitCode {
    if ctx.sink.any_fail {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.cmd {
        Cmd::Table(args) => run_table(args, cli.timing),
        Cmd::Verify(args) => run_verify(args, cli.timing),
        Cmd::Gallery { action } => run_gallery(action, cli.timing),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
