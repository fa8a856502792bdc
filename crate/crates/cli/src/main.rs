use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use curvelift::curve::{CurveFile, CurveRef};
use curvelift::experiments::{
    run_energy_experiment, run_exponent_experiment, run_inequality_campaign, to_json, write_count_csv, CampaignKind,
    CountReport, CountRow, DeltaRule, EnergyReport, ExperimentConfig, ExperimentKind, NSchedule,
};
use curvelift::hyperplane::{intersect, mvt_check, survey_intersections, Hyperplane};
use curvelift::lifting::{lift_curve, lifted_wronskian, lipschitz_constant};
use curvelift::point_sets::{additive_energy, WorkCaps};
use curvelift::scalar::{format_rational, parse_rational, rational_to_f64};
use curvelift::tube::{count_in_tube, default_box, PointSource, TubeQuery, TubeQueryFile};
use curvelift::{certify_nondegenerate, exponent, lift_point, make_ms, CurveSpec, FiniteSet, MonomialSet, Rational};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "curvelift", version, about = "Lattice points near curves, lifts and additive energy")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Configuration file (JSON or TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Uniform work cap for enumeration and energy computations.
    #[arg(long, global = true)]
    cap: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Wronskian of a curve at sample parameters.
    Wronskian {
        #[arg(long, default_value = "parabola")]
        curve: String,
        /// Parameters as rationals; defaults to an even grid.
        #[arg(long = "at", value_delimiter = ',')]
        at: Vec<String>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Decide whether |W| > c0 on the whole domain.
    Certify {
        #[arg(long, default_value = "parabola")]
        curve: String,
        #[arg(long, default_value = "0")]
        c0: String,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
    },
    /// Lift a planar curve or point through a monomial set.
    Lift {
        #[arg(long, default_value = "parabola")]
        curve: String,
        /// Monomials, e.g. `x,y,xy` or `Ms:2`.
        #[arg(long)]
        monomials: String,
        /// Lift this point `x,y` instead of the curve.
        #[arg(long, value_delimiter = ',')]
        point: Vec<String>,
        /// Parameters at which to report the lifted Wronskian.
        #[arg(long = "at", value_delimiter = ',')]
        at: Vec<String>,
    },
    /// Exponent e(M) and Lipschitz constant of a monomial set.
    Exponent {
        #[arg(long, conflicts_with = "s")]
        monomials: Option<String>,
        /// Use M_s = {x, y, x², …, x^s}.
        #[arg(long)]
        s: Option<u32>,
    },
    /// Count lattice points in the δ-neighbourhood of a curve.
    Count {
        /// Query file `{curve, delta, source}`.
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(long, default_value = "parabola")]
        curve: String,
        #[arg(long)]
        delta: Option<String>,
        #[arg(short = 'N', long = "n")]
        big_n: Option<u64>,
        #[arg(long)]
        keep_points: bool,
    },
    /// Additive energy of an explicit set, or an energy-scaling run.
    Energy {
        /// JSON point set `[["p/q", ...], ...]`.
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(short, long)]
        m: Option<usize>,
        #[arg(long, default_value = "parabola")]
        curve: String,
        #[arg(long)]
        squares_up_to: Option<u64>,
    },
    /// Intersections of a curve with one hyperplane, or a random survey.
    Hyperplanes {
        #[arg(long, default_value = "parabola")]
        curve: String,
        /// Coefficients `a0,a1,…,an` of a1·x1 + … + an·xn = a0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hyperplane: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Run the experiment described by --config.
    Experiment,
    /// Randomized inequality campaign; exits 2 on any failure.
    Check {
        /// lemma-2.4, plunnecke, lipschitz, bijection, gap-doubling or all.
        kind: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

enum Outcome {
    Success,
    CampaignFailure,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CampaignFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn caps(g: &Global) -> WorkCaps {
    g.cap.map_or_else(WorkCaps::default, |c| WorkCaps::uniform(c as u128))
}

fn curve(name: &str) -> Result<CurveSpec> {
    Ok(CurveRef::Name(name.to_string()).resolve(None)?)
}

fn rationals(values: &[String]) -> Result<Vec<Rational>> {
    values.iter().map(|v| parse_rational(v).map_err(Into::into)).collect()
}

fn emit(g: &Global, text: &str) -> Result<()> {
    emit_to(g.out.as_deref(), text)
}

fn emit_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json_only(g: &Global) -> Result<()> {
    if g.format == Format::Csv {
        bail!("--format csv is only available for count and energy reports");
    }
    Ok(())
}

fn count_csv(report: &CountReport) -> Result<String> {
    let mut buf = Vec::new();
    write_count_csv(report, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn energy_csv(report: &EnergyReport) -> String {
    let mut s = String::from("N,delta,size_b,m,energy,ratio,skipped\n");
    for r in &report.rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.delta,
            r.size_b,
            report.m,
            r.energy.map(|e| e.to_string()).unwrap_or_default(),
            r.ratio.clone().unwrap_or_default(),
            r.skipped.clone().unwrap_or_default().replace(',', ";"),
        ));
    }
    s
}

fn load_config(g: &Global) -> Result<ExperimentConfig> {
    let path = g.config.as_ref().ok_or_else(|| anyhow!("this command needs --config <file>"))?;
    let mut cfg = ExperimentConfig::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(cap) = g.cap {
        cfg.cap = Some(cap);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Wronskian { curve: name, at, samples } => {
            json_only(g)?;
            let c = curve(name)?;
            let ts = if at.is_empty() { c.grid(*samples) } else { rationals(at)? };
            let values = ts
                .iter()
                .map(|t| {
                    let w = c.wronskian(t)?;
                    Ok(json!({
                        "t": format_rational(t),
                        "value": w.as_exact().map(format_rational),
                        "value_f64": w.to_f64(),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            let poly = c.wronskian_polynomial().map(|p| p.coeffs().iter().map(format_rational).collect::<Vec<_>>());
            let report = json!({
                "curve": CurveFile::from_curve(&c),
                "wronskian_polynomial": poly,
                "values": values,
            });
            emit(g, &to_json(&report)?)?;
        }
        Command::Certify { curve: name, c0, grid } => {
            json_only(g)?;
            let cert = certify_nondegenerate(&curve(name)?, &parse_rational(c0)?, *grid)?;
            emit(g, &to_json(&cert)?)?;
        }
        Command::Lift { curve: name, monomials, point, at } => {
            json_only(g)?;
            let set = MonomialSet::parse(monomials)?;
            let report = if !point.is_empty() {
                let p = rationals(point)?;
                let p: [Rational; 2] = p.try_into().map_err(|_| anyhow!("--point needs exactly two coordinates"))?;
                json!({ "monomials": set, "point": lift_point(&p, &set) })
            } else {
                let c = curve(name)?;
                let lifted = lift_curve(&c, &set)?;
                let ts = if at.is_empty() { lifted.grid(4) } else { rationals(at)? };
                let w = ts
                    .iter()
                    .map(|t| {
                        let v = lifted_wronskian(&c, &set, t)?;
                        Ok(json!({ "t": format_rational(t), "value": v.as_exact().map(format_rational), "value_f64": v.to_f64() }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                json!({
                    "monomials": set,
                    "exponent": format_rational(&exponent(&set)),
                    "lifted": CurveFile::from_curve(&lifted),
                    "wronskian": w,
                })
            };
            emit(g, &to_json(&report)?)?;
        }
        Command::Exponent { monomials, s } => {
            json_only(g)?;
            let set = match (monomials, s) {
                (Some(m), None) => MonomialSet::parse(m)?,
                (None, Some(s)) => make_ms(*s)?,
                _ => bail!("pass either --monomials or --s"),
            };
            let e = exponent(&set);
            let report = json!({
                "monomials": set,
                "degrees": set.degrees(),
                "exponent": format_rational(&e),
                "exponent_f64": rational_to_f64(&e),
                "lipschitz_constant_r1": lipschitz_constant(&set, 1.0)?,
            });
            emit(g, &to_json(&report)?)?;
        }
        Command::Count { query, curve: name, delta, big_n, keep_points } => {
            let (q, n_label) = match query {
                Some(path) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let file: TubeQueryFile = serde_json::from_str(&text)?;
                    let n = match &file.source {
                        curvelift::tube::SourceSpec::Lattice { n, .. } => *n,
                        _ => 0,
                    };
                    (file.resolve(path.parent())?.keep_points(*keep_points), n)
                }
                None => {
                    let c = curve(name)?;
                    let n = big_n.ok_or_else(|| anyhow!("pass --query or -N/--n with --delta"))?;
                    let delta = parse_rational(delta.as_deref().ok_or_else(|| anyhow!("--delta is required"))?)?;
                    let source = PointSource::lattice(n, default_box(&c))?;
                    (TubeQuery::new(c, delta, source).keep_points(*keep_points), n)
                }
            };
            let q = q.with_caps(caps(g));
            let start = Instant::now();
            let r = count_in_tube(&q)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            match g.format {
                Format::Json => emit(g, &to_json(&r)?)?,
                Format::Csv => {
                    let report = CountReport {
                        experiment: "count",
                        curve: CurveFile::from_curve(&q.curve),
                        monomials: None,
                        exponent: None,
                        delta_rule: DeltaRule::Fixed { value: format_rational(&q.delta) },
                        rows: vec![CountRow {
                            n: n_label,
                            delta: format_rational(&q.delta),
                            count: r.count,
                            certified: r.certified,
                            runtime_ms: Some(ms),
                        }],
                        fit: None,
                        fit_note: None,
                        verdict: None,
                    };
                    emit(g, &count_csv(&report)?)?;
                }
            }
        }
        Command::Energy { set, m, curve: name, squares_up_to } => {
            if let Some(path) = set {
                json_only(g)?;
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let a: FiniteSet = serde_json::from_str(&text)?;
                let m = m.unwrap_or(2);
                let e = additive_energy(&a, m, caps(g).energy)?;
                let size = a.len() as u32;
                let report = json!({
                    "size": a.len(),
                    "m": m,
                    "energy": e.to_string(),
                    "ratio_f64": e as f64 / (size as f64).powi(m as i32),
                });
                emit(g, &to_json(&report)?)?;
            } else {
                let mut cfg = if g.config.is_some() {
                    load_config(g)?
                } else {
                    let max = squares_up_to.ok_or_else(|| anyhow!("pass --set, --config or --squares-up-to"))?;
                    let mut cfg = ExperimentConfig::new(
                        CurveRef::Name(name.clone()),
                        NSchedule::Squares { squares_up_to: max },
                        DeltaRule::Zero,
                    );
                    cfg.cap = g.cap;
                    cfg
                };
                if m.is_some() {
                    cfg.m = *m;
                }
                let report = run_energy_experiment(&cfg)?;
                match g.format {
                    Format::Json => emit(g, &to_json(&report)?)?,
                    Format::Csv => emit(g, &energy_csv(&report))?,
                }
            }
        }
        Command::Hyperplanes { curve: name, hyperplane, trials } => {
            json_only(g)?;
            let c = curve(name)?;
            if hyperplane.is_empty() {
                let survey = survey_intersections(&c, *trials, g.seed.unwrap_or(0))?;
                emit(g, &to_json(&survey)?)?;
            } else {
                let h = Hyperplane::<Rational>::parse(hyperplane)?;
                let hit = intersect(&c, &h)?;
                let mvt = if hit.count() >= 2 { mvt_check(&c, &h).ok() } else { None };
                emit(g, &to_json(&json!({ "hyperplane": h, "intersection": hit, "mvt": mvt }))?)?;
            }
        }
        Command::Experiment => {
            let cfg = load_config(g)?;
            let out = g.out.clone().or_else(|| cfg.out.clone());
            let (json_text, csv_text) = match cfg.experiment {
                ExperimentKind::Exponent => {
                    let r = run_exponent_experiment(&cfg)?;
                    (to_json(&r)?, count_csv(&r)?)
                }
                ExperimentKind::Energy => {
                    let r = run_energy_experiment(&cfg)?;
                    (to_json(&r)?, energy_csv(&r))
                }
            };
            if let Some(path) = &cfg.csv {
                emit_to(Some(path), &csv_text)?;
            }
            let text = if g.format == Format::Csv { &csv_text } else { &json_text };
            emit_to(out.as_deref(), text)?;
        }
        Command::Check { kind, trials } => {
            json_only(g)?;
            let kinds: Vec<CampaignKind> = if kind == "all" { CampaignKind::ALL.to_vec() } else { vec![kind.parse()?] };
            let seed = g.seed.unwrap_or(0);
            let reports = kinds
                .iter()
                .map(|k| run_inequality_campaign(*k, seed, *trials, caps(g)))
                .collect::<curvelift::Result<Vec<_>>>()?;
            let ok = reports.iter().all(|r| r.ok());
            let text = if reports.len() == 1 { to_json(&reports[0])? } else { to_json(&reports)? };
            emit(g, &text)?;
            if !ok {
                return Ok(Outcome::CampaignFailure);
            }
        }
    }
    Ok(Outcome::Success)
}
