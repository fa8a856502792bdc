//! Scaling experiments and randomized inequality campaigns.
//!
//! Reports are deterministic functions of the configuration and seed; wall
//! clock timings are recorded only when explicitly requested.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveFile, CurveRef, CurveSpec};
use crate::error::{Error, Result};
use crate::lifting::{check_lattice_bijection, exponent, lift_point, lipschitz_constant_squared, make_ms, MonomialSet};
use crate::point_sets::{
    additive_energy, check_energy_lower_bound, check_plunnecke, doubling, ExactPoint, FiniteSet, Gap, WorkCaps,
};
use crate::poly::Polynomial;
use crate::scalar::{format_rational, parse_rational, rational_to_f64, Rational};
use crate::tube::{count_in_tube, count_on_curve_lattice, default_box, PointSource, TubeQuery};

/// Reporting margin for slope-vs-exponent verdicts.
pub const VERDICT_MARGIN: f64 = 0.1;

/// N values: an explicit list, or all squares up to a bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NSchedule {
    List(Vec<u64>),
    Squares { squares_up_to: u64 },
}

impl NSchedule {
    pub fn values(&self) -> Result<Vec<u64>> {
        let v = match self {
            NSchedule::List(v) => v.clone(),
            NSchedule::Squares { squares_up_to } => {
                (2..).map(|m: u64| m * m).take_while(|n| n <= squares_up_to).collect()
            }
        };
        if v.is_empty() {
            return Err(Error::InvalidInput("N schedule is empty".into()));
        }
        if v[0] == 0 || v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("N schedule must be positive and strictly increasing".into()));
        }
        Ok(v)
    }
}

/// How `δ` depends on `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum DeltaRule {
    /// Points exactly on the curve.
    Zero,
    /// `d / Nⁿ`; `n` defaults to `|M|`, or the curve dimension without `M`.
    Scaled {
        #[serde(default = "default_d")]
        d: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<u32>,
    },
    Fixed {
        value: String,
    },
}

fn default_d() -> String {
    "1".into()
}

impl Default for DeltaRule {
    fn default() -> Self {
        DeltaRule::Scaled { d: default_d(), n: None }
    }
}

impl DeltaRule {
    /// `None` for the on-curve mode.
    fn delta(&self, big_n: u64, default_n: u32) -> Result<Option<Rational>> {
        let v = match self {
            DeltaRule::Zero => return Ok(None),
            DeltaRule::Scaled { d, n } => {
                let den = num_traits::pow::pow(BigInt::from(big_n), n.unwrap_or(default_n) as usize);
                parse_rational(d)? / Rational::from_integer(den)
            }
            DeltaRule::Fixed { value } => parse_rational(value)?,
        };
        if !v.is_positive() {
            return Err(Error::InvalidInput("delta must be positive (use the zero rule for on-curve counts)".into()));
        }
        Ok(Some(v))
    }
}

/// A monomial set as text (`"x,y,xy"`, `"Ms:2"`) or as exponent pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MonomialRef {
    Text(String),
    Pairs(Vec<[u32; 2]>),
}

impl MonomialRef {
    pub fn resolve(&self) -> Result<MonomialSet> {
        match self {
            MonomialRef::Text(s) => MonomialSet::parse(s),
            MonomialRef::Pairs(p) => MonomialSet::from_pairs(p),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    Exponent,
    Energy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentKind,
    #[serde(default = "default_curve")]
    pub curve: CurveRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomials: Option<MonomialRef>,
    pub schedule: NSchedule,
    #[serde(default)]
    pub delta: DeltaRule,
    /// Lattice box per coordinate; defaults to the curve's natural box.
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[String; 2]>>,
    /// Energy order; defaults to `n(n+1)/2` for a curve in ℝⁿ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub timings: bool,
    /// Uniform work cap overriding the enumeration and energy defaults.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Directory curve file paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_curve() -> CurveRef {
    CurveRef::Name("parabola".into())
}

impl ExperimentConfig {
    pub fn new(curve: CurveRef, schedule: NSchedule, delta: DeltaRule) -> Self {
        Self {
            experiment: ExperimentKind::Exponent,
            curve,
            monomials: None,
            schedule,
            delta,
            bounds: None,
            m: None,
            seed: 0,
            timings: false,
            cap: None,
            out: None,
            csv: None,
            base_dir: None,
        }
    }

    pub fn with_monomials(mut self, m: MonomialRef) -> Self {
        self.monomials = Some(m);
        self
    }

    /// JSON, or TOML by extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: Self = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?
        } else {
            serde_json::from_str(&text)?
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn caps(&self) -> WorkCaps {
        match self.cap {
            Some(c) => WorkCaps::uniform(c as u128),
            None => WorkCaps::default(),
        }
    }

    fn resolve(&self) -> Result<Resolved> {
        let curve = self.curve.resolve(self.base_dir.as_deref())?;
        let monomials = self.monomials.as_ref().map(|m| m.resolve()).transpose()?;
        let bounds = match &self.bounds {
            Some(b) => {
                b.iter().map(|[lo, hi]| Ok([parse_rational(lo)?, parse_rational(hi)?])).collect::<Result<Vec<_>>>()?
            }
            None => default_box(&curve),
        };
        let default_n = monomials.as_ref().map_or(curve.dimension(), |m| m.len()) as u32;
        Ok(Resolved { schedule: self.schedule.values()?, curve, monomials, bounds, default_n, caps: self.caps() })
    }
}

struct Resolved {
    curve: CurveSpec,
    monomials: Option<MonomialSet>,
    schedule: Vec<u64>,
    bounds: Vec<[Rational; 2]>,
    default_n: u32,
    caps: WorkCaps,
}

impl Resolved {
    /// Tube (or on-curve) points for one `N`.
    fn points(
        &self,
        rule: &DeltaRule,
        big_n: u64,
        keep: bool,
    ) -> Result<(Option<Rational>, u64, bool, Option<FiniteSet>)> {
        match rule.delta(big_n, self.default_n)? {
            None => {
                let x_range = self.bounds.first().cloned();
                let pts = count_on_curve_lattice(&self.curve, big_n, x_range)?;
                let inside_box = FiniteSet::new(
                    2,
                    pts.iter()
                        .filter(|p| p.coords().iter().zip(&self.bounds).all(|(c, [lo, hi])| lo <= c && c <= hi))
                        .cloned(),
                )?;
                Ok((None, inside_box.len() as u64, true, Some(inside_box)))
            }
            Some(delta) => {
                let source = PointSource::lattice(big_n, self.bounds.clone())?;
                let q =
                    TubeQuery::new(self.curve.clone(), delta.clone(), source).keep_points(keep).with_caps(self.caps);
                let r = count_in_tube(&q)?;
                Ok((Some(delta), r.count, r.certified, r.matched_points))
            }
        }
    }
}

/// Ordinary least squares of `log y` on `log x` (natural logs).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Sum of squared residuals in log space.
    pub residual: f64,
    pub points: usize,
}

/// Fits `y ≈ c·x^p`. Needs at least three points with positive coordinates
/// and two distinct `x`.
pub fn fit_loglog(data: &[(f64, f64)]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> =
        data.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Some(Fit { slope, intercept, residual, points: pts.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    #[serde(rename = "N")]
    pub n: u64,
    /// `"p/q"`, or `"0"` in on-curve mode.
    pub delta: String,
    pub count: u64,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub slope: f64,
    pub exponent: f64,
    pub margin: f64,
    /// `slope ≤ e(M) + margin`
    pub within_margin: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub experiment: &'static str,
    pub curve: CurveFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monomials: Option<MonomialSet>,
    /// `e(M)` as `"p/q"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<String>,
    pub delta_rule: DeltaRule,
    pub rows: Vec<CountRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<Fit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl CountReport {
    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.certified)
    }
}

fn timed<T>(enabled: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<f64>)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, enabled.then(|| start.elapsed().as_secs_f64() * 1e3)))
}

/// Lattice counts over the N schedule with a log-log slope fit.
pub fn run_exponent_experiment(cfg: &ExperimentConfig) -> Result<CountReport> {
    let r = cfg.resolve()?;
    let mut rows: Vec<CountRow> = r
        .schedule
        .par_iter()
        .map(|&big_n| {
            let ((delta, count, certified, _), runtime_ms) = timed(cfg.timings, || r.points(&cfg.delta, big_n, false))?;
            Ok(CountRow {
                n: big_n,
                delta: delta.as_ref().map_or_else(|| "0".to_string(), format_rational),
                count,
                certified,
                runtime_ms,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|row| row.n);

    let usable: Vec<(f64, f64)> = rows.iter().filter(|r| r.count >= 1).map(|r| (r.n as f64, r.count as f64)).collect();
    let all_equal = usable.windows(2).all(|w| w[0].1 == w[1].1);
    let (fit, fit_note) = if usable.len() < 3 {
        (None, Some(format!("slope omitted: {} rows with a positive count, need at least 3", usable.len())))
    } else if all_equal {
        (None, Some("slope omitted: every count is equal, so the fit is degenerate".to_string()))
    } else {
        (fit_loglog(&usable), None)
    };
    let e = r.monomials.as_ref().map(exponent);
    let verdict = match (&fit, &e) {
        (Some(f), Some(e)) => {
            let ef = rational_to_f64(e);
            let within = f.slope <= ef + VERDICT_MARGIN;
            let note = if within {
                "fitted slope is within the reporting margin of e(M)".to_string()
            } else {
                "fitted slope exceeds e(M) + margin; bounds hold only up to constants and N^ε, so this is not a refutation"
                    .to_string()
            };
            Some(Verdict { slope: f.slope, exponent: ef, margin: VERDICT_MARGIN, within_margin: within, note })
        }
        _ => None,
    };
    Ok(CountReport {
        experiment: "exponent",
        curve: CurveFile::from_curve(&r.curve),
        monomials: r.monomials.clone(),
        exponent: e.as_ref().map(format_rational),
        delta_rule: cfg.delta.clone(),
        rows,
        fit,
        fit_note,
        verdict,
    })
}

/// `N,delta,count,certified,runtime_ms`; runtime is blank unless timed.
pub fn write_count_csv<W: Write>(report: &CountReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["N", "delta", "count", "certified", "runtime_ms"]).map_err(io)?;
    for r in &report.rows {
        let runtime = r.runtime_ms.map(|v| format!("{v:.3}")).unwrap_or_default();
        w.write_record([r.n.to_string(), r.delta.clone(), r.count.to_string(), r.certified.to_string(), runtime])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: String,
    pub size_b: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<u128>,
    /// `E_m(B) / |B|^m`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_f64: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub experiment: &'static str,
    pub curve: CurveFile,
    pub m: usize,
    pub delta_rule: DeltaRule,
    pub rows: Vec<EnergyRow>,
    /// Log-log slope of the ratio against `N`, when at least three rows ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_trend: Option<Fit>,
}

/// `E_m(B) / |B|^m` for the tube points `B` at each `N`.
pub fn run_energy_experiment(cfg: &ExperimentConfig) -> Result<EnergyReport> {
    let r = cfg.resolve()?;
    let n = r.curve.dimension();
    let m = cfg.m.unwrap_or(n * (n + 1) / 2);
    if m < 2 {
        return Err(Error::InvalidInput("energy runs need m ≥ 2".into()));
    }
    let mut rows: Vec<EnergyRow> = r
        .schedule
        .par_iter()
        .map(|&big_n| {
            let ((delta, _, _, points), runtime_ms) = timed(cfg.timings, || r.points(&cfg.delta, big_n, true))?;
            let b = points.expect("points were kept");
            let delta = delta.as_ref().map_or_else(|| "0".to_string(), format_rational);
            let mut row = EnergyRow {
                n: big_n,
                delta,
                size_b: b.len(),
                energy: None,
                ratio: None,
                ratio_f64: None,
                skipped: None,
                runtime_ms,
            };
            if b.is_empty() {
                row.skipped = Some("B is empty".into());
                return Ok(row);
            }
            match additive_energy(&b, m, r.caps.energy) {
                Ok(e) => {
                    let ratio = Rational::new(BigInt::from(e), num_traits::pow::pow(BigInt::from(b.len()), m));
                    row.energy = Some(e);
                    row.ratio_f64 = Some(rational_to_f64(&ratio));
                    row.ratio = Some(format_rational(&ratio));
                }
                Err(Error::SizeCap { needed, cap, .. }) => {
                    row.skipped = Some(format!("work cap exceeded ({needed} > {cap})"));
                }
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|row| row.n);
    let data: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.n as f64, r.ratio_f64?))).collect();
    Ok(EnergyReport {
        experiment: "energy",
        curve: CurveFile::from_curve(&r.curve),
        m,
        delta_rule: cfg.delta.clone(),
        ratio_trend: fit_loglog(&data),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CampaignKind {
    #[serde(rename = "lemma-2.4")]
    EnergyLowerBound,
    #[serde(rename = "plunnecke", alias = "plünnecke")]
    Plunnecke,
    #[serde(rename = "lipschitz")]
    Lipschitz,
    #[serde(rename = "bijection")]
    Bijection,
    #[serde(rename = "gap-doubling")]
    GapDoubling,
}

impl CampaignKind {
    pub const ALL: [CampaignKind; 5] = [
        CampaignKind::EnergyLowerBound,
        CampaignKind::Plunnecke,
        CampaignKind::Lipschitz,
        CampaignKind::Bijection,
        CampaignKind::GapDoubling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CampaignKind::EnergyLowerBound => "lemma-2.4",
            CampaignKind::Plunnecke => "plunnecke",
            CampaignKind::Lipschitz => "lipschitz",
            CampaignKind::Bijection => "bijection",
            CampaignKind::GapDoubling => "gap-doubling",
        }
    }
}

impl std::str::FromStr for CampaignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma-2.4" | "energy" => Ok(CampaignKind::EnergyLowerBound),
            "plunnecke" | "plünnecke" => Ok(CampaignKind::Plunnecke),
            "lipschitz" => Ok(CampaignKind::Lipschitz),
            "bijection" => Ok(CampaignKind::Bijection),
            "gap-doubling" => Ok(CampaignKind::GapDoubling),
            _ => Err(Error::Parse(format!("unknown campaign {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub kind: CampaignKind,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// First failing instance; the campaign stops there.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
}

impl CampaignReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Random integer points in `[−r, r]^dim`, deduplicated.
pub fn random_int_set(rng: &mut impl Rng, dim: usize, max_size: usize, r: i64) -> FiniteSet {
    let size = rng.gen_range(1..=max_size);
    let pts: Vec<ExactPoint> = (0..size)
        .map(|_| ExactPoint::from_ints(&(0..dim).map(|_| rng.gen_range(-r..=r)).collect::<Vec<_>>()))
        .collect();
    FiniteSet::new(dim, pts).expect("consistent dimension")
}

/// Non-empty random subset.
pub fn random_subset(rng: &mut impl Rng, a: &FiniteSet) -> FiniteSet {
    let mut pts: Vec<ExactPoint> = a.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if pts.is_empty() {
        pts.push(a.points().choose(rng).expect("non-empty").clone());
    }
    FiniteSet::new(a.dimension(), pts).expect("consistent dimension")
}

/// Random proper GAP of rank 1–3 in ℤ^d, `d ≤ 3`, with `∏ Nᵢ ≤ max_size`.
pub fn random_proper_gap(rng: &mut impl Rng, max_size: u64, caps: WorkCaps) -> Result<Gap> {
    for _ in 0..10_000 {
        let rank = rng.gen_range(1..=3usize);
        let dim = rng.gen_range(1..=3usize);
        let mut budget = max_size;
        let mut lengths = Vec::with_capacity(rank);
        for i in 0..rank {
            let remaining = (rank - i - 1) as u32;
            let most = (budget / 2u64.pow(remaining)).max(1);
            let n = rng.gen_range(1..=most.min(12));
            budget /= n;
            lengths.push(n);
        }
        let mut generators = Vec::with_capacity(rank);
        for _ in 0..rank {
            let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-40..=40)).collect();
            generators.push(ExactPoint::from_ints(&v));
        }
        let base = ExactPoint::from_ints(&(0..dim).map(|_| rng.gen_range(-5..=5)).collect::<Vec<_>>());
        let g = Gap::new(base, generators, lengths)?;
        if g.is_proper(caps.enumeration)? {
            return Ok(g);
        }
    }
    Err(Error::InvalidInput("could not draw a proper GAP".into()))
}

fn random_rational(rng: &mut impl Rng, r: i64) -> Rational {
    const DEN: i64 = 1 << 12;
    Rational::new(BigInt::from(rng.gen_range(-r * DEN..=r * DEN)), BigInt::from(DEN))
}

/// `|p^M − q^M|² ≤ C(M, R)² |p − q|²`, exactly.
pub fn check_lipschitz_pair(
    set: &MonomialSet,
    p: &[Rational; 2],
    q: &[Rational; 2],
    radius: &Rational,
) -> Result<bool> {
    let c2 = lipschitz_constant_squared(set, radius)?;
    let lhs = lift_point(p, set).squared_distance(&lift_point(q, set));
    let dp = ExactPoint::new(p.to_vec()).squared_distance(&ExactPoint::new(q.to_vec()));
    Ok(lhs <= c2 * dp)
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

/// Randomized checker for one inequality; stops at the first failure.
pub fn run_inequality_campaign(kind: CampaignKind, seed: u64, trials: usize, caps: WorkCaps) -> Result<CampaignReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CampaignReport { kind, seed, trials, passed: 0, failed: 0, counterexample: None };
    let sets = [MonomialSet::parse("x,y")?, make_ms(2)?, make_ms(3)?];
    for trial in 0..trials {
        let failure: Option<serde_json::Value> = match kind {
            CampaignKind::EnergyLowerBound => {
                let a = random_int_set(&mut rng, 2, 30, 4);
                let b = random_subset(&mut rng, &a);
                let m = rng.gen_range(2..=3);
                let r = check_energy_lower_bound(&a, &b, m, caps)?;
                (!r.holds).then(|| serde_json::json!({"A": a, "B": b, "m": m, "report": r}))
            }
            CampaignKind::Plunnecke => {
                let a = if trial % 2 == 0 {
                    random_proper_gap(&mut rng, 500, caps)?.enumerate(caps.enumeration)?
                } else {
                    random_int_set(&mut rng, 2, 30, 6)
                };
                let m = rng.gen_range(2..=3);
                let r = check_plunnecke(&a, m, caps)?;
                (!r.holds).then(|| serde_json::json!({"A": a, "m": m, "report": r}))
            }
            CampaignKind::Lipschitz => {
                let set = &sets[trial % sets.len()];
                let p = [random_rational(&mut rng, 1), random_rational(&mut rng, 1)];
                let q = [random_rational(&mut rng, 1), random_rational(&mut rng, 1)];
                let one = Rational::from_integer(1.into());
                (!check_lipschitz_pair(set, &p, &q, &one)?).then(|| {
                    serde_json::json!({
                        "monomials": set,
                        "p": p.iter().map(format_rational).collect::<Vec<_>>(),
                        "q": q.iter().map(format_rational).collect::<Vec<_>>(),
                    })
                })
            }
            CampaignKind::Bijection => {
                let coeffs: Vec<Rational> = (0..=rng.gen_range(1..=3))
                    .map(|_| Rational::from_integer(rng.gen_range(-3..=3i64).into()))
                    .collect();
                let f = Polynomial::new(coeffs);
                let zero = Rational::zero();
                let one = Rational::from_integer(1.into());
                let curve = CurveSpec::graph(vec![f], zero, one)?;
                let set = [MonomialSet::parse("x,y,xy")?, make_ms(2)?, make_ms(3)?][trial % 3].clone();
                let n = rng.gen_range(1..=40u64);
                let on_curve = count_on_curve_lattice(&curve, n, None)?;
                let r = check_lattice_bijection(&curve, &set, n, &on_curve)?;
                (!r.bijection).then(|| serde_json::json!({"curve": CurveFile::from_curve(&curve), "N": n, "report": r}))
            }
            CampaignKind::GapDoubling => {
                let g = random_proper_gap(&mut rng, 500, caps)?;
                let a = g.enumerate(caps.enumeration)?;
                let k = doubling(&a)?;
                let bound = Rational::from_integer(BigInt::from(1u64 << g.rank()));
                (k > bound).then(|| serde_json::json!({"gap": g, "doubling": format_rational(&k)}))
            }
        };
        match failure {
            None => report.passed += 1,
            Some(ce) => {
                report.failed = 1;
                report.counterexample = Some(ce);
                break;
            }
        }
    }
    Ok(report)
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&json(report))?;
    s.push('\n');
    Ok(s)
}
