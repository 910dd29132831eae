use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use augtrack::analysis::{analyze as analyze_tf, response_table, AnalysisOptions, MetricsReport};
use augtrack::io::{to_json_string, DesignInput, DesignRecord};
use augtrack::simulate::{mc_evaluate, FrameRecord, ScenarioConfig, SimResult};
use augtrack::validate::{format_table, golden_suite, SuiteOptions};
use serde::Serialize;

pub const SEED_ENV: &str = "AUGTRACK_SEED";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Parses JSON, prefixing errors with the file name (serde_json already
/// reports line and column).
fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_vec(v: &[f64], prec: usize) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.prec$}")).collect();
    format!("[{}]", items.join(", "))
}

fn poles(rec: &DesignRecord) -> String {
    if let Some(s) = &rec.spec {
        return format!("{} (x{})", s.pole, rec.k);
    }
    // second-order tracker: roots of z^2 + a1 z + a2
    let (a1, a2) = (rec.a[1], rec.a[2]);
    let disc = a1 * a1 - 4.0 * a2;
    if disc < 0.0 {
        format!(
            "{:.4} +/- {:.4}i (|z| = {:.4})",
            -a1 / 2.0,
            (-disc).sqrt() / 2.0,
            a2.sqrt()
        )
    } else {
        format!(
            "{:.4}, {:.4}",
            (-a1 + disc.sqrt()) / 2.0,
            (-a1 - disc.sqrt()) / 2.0
        )
    }
}

pub fn design(spec: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let text = read(spec)?;
    let input = DesignInput::from_json(&text)
        .with_context(|| format!("{}: invalid design input", spec.display()))?;
    let rec = DesignRecord::from_input(&input).context("design failed")?;
    let summary = format!(
        "K     = {}\ngain  = {}\npoles = {}\nb     = {}\na     = {}\n",
        rec.k,
        fmt_vec(&rec.gain_kin, 4),
        poles(&rec),
        fmt_vec(&rec.b, 4),
        fmt_vec(&rec.a, 4)
    );
    let json = to_json_string(&rec);
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    emit(out, &json)?;
    Ok(ExitCode::SUCCESS)
}

pub struct AnalyzeArgs {
    pub design: PathBuf,
    pub grid: usize,
    pub omega_man: Option<f64>,
    pub sigma_sns: f64,
    pub radius: f64,
    pub out: Option<PathBuf>,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.prec$}"))
}

fn metrics_summary(m: &MetricsReport) -> String {
    format!(
        "WNG        {:.4} ({:.3} dB)\nsigma_tgt  {:.3} pix\nMESG       {} ({} dB)\nsigma_man  {} pix\neps_R      {} pix\neps_theta  {} deg\n|H|^2 max  {:.4} at omega = {:.4}\nflatness   {}\n",
        m.wng,
        m.wng_db,
        m.sigma_tgt,
        m.mesg.map_or_else(|| "n/a".into(), |x| format!("{x:.3e}")),
        opt(m.mesg_db, 2),
        opt(m.sigma_man, 3),
        opt(m.eps_r, 3),
        opt(m.eps_theta_deg, 3),
        m.h_inf_sq,
        m.omega_max,
        if m.flatness_pass { "pass" } else { "FAIL" }
    )
}

pub fn analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    for (name, v) in [("sigma-sns", args.sigma_sns), ("radius", args.radius)] {
        if !(v.is_finite() && v >= 0.0) {
            bail!("--{name} must be a nonnegative number, got {v}");
        }
    }
    if let Some(w) = args.omega_man {
        if !(w > 0.0 && w < std::f64::consts::PI) {
            bail!("--omega-man must lie in (0, pi) rad/sample, got {w}");
        }
    }
    let rec: DesignRecord = parse_json(&args.design)?;
    rec.validate()?;
    let ctx = rec.context()?;
    let tf = rec.transfer_function();
    let opts = AnalysisOptions {
        omega_man: args.omega_man,
        sigma_sns: args.sigma_sns,
        radius: args.radius,
        grid_n: args.grid,
    };
    let report = analyze_tf(&tf, &ctx, &opts).context("analysis failed")?;
    let table = response_table(&tf, ctx.q, args.grid)?;

    let prefix = args
        .out
        .clone()
        .unwrap_or_else(|| args.design.with_extension(""));
    let metrics_path = with_suffix(&prefix, ".metrics.json");
    let csv_path = with_suffix(&prefix, ".response.csv");
    write(&metrics_path, &to_json_string(&report))?;
    let mut w = csv::Writer::from_path(&csv_path)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    for row in &table {
        w.serialize(row)?;
    }
    w.flush()?;
    print!("{}", metrics_summary(&report));
    println!(
        "wrote {}\nwrote {}",
        metrics_path.display(),
        csv_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub struct SimulateArgs {
    pub config: Option<PathBuf>,
    pub scenario: Option<u8>,
    pub reps: usize,
    pub seed: Option<u64>,
    pub filters: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub frames_csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct SimReport<'a> {
    scenario: &'a ScenarioConfig,
    reps: usize,
    filters: &'a [SimResult],
}

fn frames_path(base: &Path, name: &str, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = match base.extension() {
        Some(ext) => format!("{stem}.{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{name}"),
    };
    base.with_file_name(file)
}

fn filter_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            v.trim().parse().map(Some).with_context(|| {
                format!("{SEED_ENV} must be an unsigned 64-bit integer, got {v:?}")
            })
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{SEED_ENV}: {e}"),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(p) => parse_json::<ScenarioConfig>(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(id) = args.scenario {
        cfg.id = id;
    }
    if let Some(seed) = env_seed()?.or(args.seed) {
        cfg.seed = seed;
    }
    cfg.validate()?;
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let mut filters = Vec::new();
    for path in &args.filters {
        let rec: DesignRecord = parse_json(path)?;
        rec.validate().with_context(|| path.display().to_string())?;
        filters.push(rec.named_filter(&filter_name(path))?);
    }
    let results = mc_evaluate(&cfg, &filters, args.reps)?;

    let report = SimReport {
        scenario: &cfg,
        reps: args.reps,
        filters: &results,
    };
    let summary = sim_summary(&cfg, args.reps, &results);
    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    emit(args.out.as_deref(), &to_json_string(&report))?;
    if let Some(base) = &args.frames_csv {
        let several = results.len() > 1;
        for r in &results {
            let path = frames_path(base, &r.name, several);
            write_frames(&path, &r.frames)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_frames(path: &Path, frames: &[FrameRecord]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for f in frames {
        w.serialize(f)?;
    }
    w.flush()?;
    Ok(())
}

fn sim_summary(cfg: &ScenarioConfig, reps: usize, results: &[SimResult]) -> String {
    let mut s = format!(
        "scenario {} ({} frames, {} reps, seed {})\n{:<16} {:>9} {:>11} {:>10} {:>12}\n",
        cfg.id,
        cfg.n_frames,
        reps,
        cfg.seed,
        "filter",
        "sigma_D",
        "term dist",
        "eps_R",
        "eps_theta"
    );
    for r in results {
        let t = &r.terminal;
        s.push_str(&format!(
            "{:<16} {:>9.3} {:>11.3e} {:>10} {:>12}\n",
            r.name,
            r.sigma_d,
            t.dist,
            opt(t.eps_r, 3),
            opt(t.eps_theta_deg, 2)
        ));
    }
    s
}

pub fn validate(out: Option<&Path>, perturb: f64) -> Result<ExitCode> {
    let rows = golden_suite(&SuiteOptions {
        perturb_b0: perturb,
    })?;
    print!("{}", format_table(&rows));
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!(
        "{} checks, {} passed, {} failed",
        rows.len(),
        rows.len() - failed,
        failed
    );
    if let Some(p) = out {
        write(p, &to_json_string(&rows))?;
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
