//! Acceptance checks: one PASS/FAIL line per criterion with its runtime
//! budget. Criteria listed in `KNOWN_RED` are reported as FAIL but do not
//! change the exit status; any other failure does.

use std::time::{Duration, Instant};

use curvelift::curve::CertificateStatus;
use curvelift::curve::CurveRef;
use curvelift::experiments::{
    check_lipschitz_pair, random_proper_gap, run_exponent_experiment, run_inequality_campaign, CampaignKind, DeltaRule,
    ExperimentConfig, MonomialRef, NSchedule,
};
use curvelift::hyperplane::survey_intersections;
use curvelift::lifting::{check_lattice_bijection, lift_curve, relation_residual};
use curvelift::point_sets::{additive_energy, check_plunnecke, doubling, DEFAULT_ENERGY_CAP};
use curvelift::scalar::{int, rat, rational_to_f64};
use curvelift::tube::{
    brute_force_tube_oracle, count_in_tube, count_on_curve_lattice, default_box, PointSource, TubeQuery,
};
use curvelift::{
    certify_nondegenerate, exponent, lift_point, make_moment_curve, make_ms, CurveSpec, FiniteSet, MonomialSet,
    Rational, WorkCaps,
};
use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose stated target is known to be unreachable; see the notes
/// printed with them.
const KNOWN_RED: &[u32] = &[2];

/// Slack on the reporting margin for slope-vs-exponent runs.
const SLOPE_MARGIN: f64 = 0.1;

type Check = Result<String, String>;

struct Harness {
    failures: Vec<u32>,
}

impl Harness {
    fn run(&mut self, id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(d) => (false, d),
        };
        let tag = if ok { "PASS" } else { "FAIL" };
        let red = if !ok && KNOWN_RED.contains(&id) { " [known red]" } else { "" };
        println!("{tag} {id:>2} {name} ({:.3}s / {:.0}s){red}: {detail}", elapsed.as_secs_f64(), budget.as_secs_f64());
        if !ok && !KNOWN_RED.contains(&id) {
            self.failures.push(id);
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: curvelift::Error) -> String {
    e.to_string()
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn parabola_on_curve_counts() -> Check {
    for m in 2..=20u64 {
        let n = m * m;
        let pts = count_on_curve_lattice(&CurveSpec::parabola(), n, Some([int(0), int(1)])).map_err(err)?;
        ensure(pts.len() as u64 == m + 1, || format!("N={n}: {} points, expected {}", pts.len(), m + 1))?;
        ensure((pts.len() as f64) >= (n as f64).sqrt(), || format!("N={n}: below N^(1/2)"))?;
    }
    Ok("M+1 points for every N = M², M = 2..20".into())
}

fn square_schedule_slope() -> Check {
    let cfg = ExperimentConfig::new(
        CurveRef::Name("parabola".into()),
        NSchedule::Squares { squares_up_to: 400 },
        DeltaRule::Zero,
    );
    let report = run_exponent_experiment(&cfg).map_err(err)?;
    let slope = report.fit.as_ref().ok_or("no fit")?.slope;
    // Counts are exactly M+1, so log(M+1)/log(M²) only tends to 1/2.
    let detail = format!("slope {slope:.4}, target [0.45, 0.55]");
    ensure((0.45..=0.55).contains(&slope), || {
        format!("{detail}; exact counts M+1 give this slope for M ≤ 20, it approaches 0.5 only as M grows")
    })?;
    Ok(detail)
}

fn moment_wronskians() -> Check {
    let ts: Vec<Rational> = (0..9).map(|k| rat(k, 8)).collect();
    for n in 2..=5usize {
        let c = make_moment_curve(n).map_err(err)?;
        let expected: Rational = (1..=n as i64).map(|k| int((1..=k).product())).product();
        for t in &ts {
            let w = c.wronskian(t).map_err(err)?;
            ensure(w.as_exact() == Some(&expected), || format!("n={n} t={t}: {w:?}"))?;
        }
    }
    Ok("W = 1!·2!·…·n! at 9 parameters for n = 2..5".into())
}

fn degenerate_circle_lift() -> Check {
    let set = make_ms(2).map_err(err)?;
    let lifted = lift_curve(&CurveSpec::circle(), &set).map_err(err)?;
    let ix = set.pairs().iter().position(|p| *p == [2, 0]).unwrap();
    let iy = set.pairs().iter().position(|p| *p == [0, 2]).unwrap();
    let mut coeffs = vec![Rational::zero(); set.len()];
    coeffs[ix] = int(1);
    coeffs[iy] = int(1);
    ensure(relation_residual(&lifted, &coeffs, &int(1)).map_err(err)?, || "x² + y² ≠ 1 on the lift".into())?;
    // 256 rational points on the circle from tan(θ/2) = k/64.
    for k in -128..128i64 {
        let u = rat(k, 64);
        let d = int(1) + &u * &u;
        let p = [(int(1) - &u * &u) / &d, (&u + &u) / &d];
        let q = lift_point(&p, &set);
        ensure(&q.coords()[ix] + &q.coords()[iy] == int(1), || format!("lifted point {q} off the relation"))?;
    }
    let mut max_w = 0.0f64;
    for t in lifted.grid(255) {
        let w = lifted.wronskian(&t).map_err(err)?;
        max_w = max_w.max(w.to_f64().abs());
        ensure(w.to_f64().abs() < 1e-9, || format!("|W({t})| = {}", w.to_f64()))?;
    }
    for c0 in [int(0), rat(1, 1000), int(1), int(100)] {
        let cert = certify_nondegenerate(&lifted, &c0, 256).map_err(err)?;
        ensure(cert.status == CertificateStatus::Failed, || format!("c0={c0}: {:?}", cert.status))?;
    }
    Ok(format!("relation exact at 256 rational points, max |W| = {max_w:e} on 256 parameters, certify failed"))
}

fn ms_exponents() -> Check {
    for s in 1..=6u32 {
        let e = exponent(&make_ms(s).map_err(err)?);
        let want = rat(8, 3 * (s as i64 + 3));
        ensure(e == want, || format!("s={s}: {e} vs {want}"))?;
    }
    Ok("e(M_s) = 8/(3(s+3)) for s = 1..6".into())
}

fn lift_bijection() -> Check {
    let sets = [MonomialSet::parse("x,y,xy").map_err(err)?, make_ms(2).map_err(err)?];
    let mut checked = 0;
    for set in &sets {
        for n in [4u64, 9, 12, 16] {
            let on = count_on_curve_lattice(&CurveSpec::parabola(), n, None).map_err(err)?;
            let r = check_lattice_bijection(&CurveSpec::parabola(), set, n, &on).map_err(err)?;
            ensure(r.bijection && r.cardinality_base == r.cardinality_lifted, || format!("{set} N={n}: {r:?}"))?;
            // Independent denominator check.
            for p in on.iter() {
                let q = lift_point(&[p.coords()[0].clone(), p.coords()[1].clone()], set);
                for (c, d) in q.coords().iter().zip(set.degrees()) {
                    let scaled = c * Rational::from_integer(Pow::pow(BigInt::from(n), d));
                    ensure(scaled.is_integer(), || format!("{set} N={n}: {c} not in (1/N^{d})ℤ"))?;
                }
            }
            checked += on.len();
        }
    }
    Ok(format!("{checked} lifted points across 8 runs"))
}

fn brute_energy(pts: &[[i64; 2]], m: usize) -> u128 {
    let k = pts.len();
    let mut idx = vec![0usize; 2 * m];
    let mut count = 0u128;
    for _ in 0..k.pow(2 * m as u32) {
        let mut s = [0i64; 2];
        for (j, &i) in idx.iter().enumerate() {
            let sign = if j < m { 1 } else { -1 };
            s[0] += sign * pts[i][0];
            s[1] += sign * pts[i][1];
        }
        count += u128::from(s == [0, 0]);
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < k {
                break;
            }
            *slot = 0;
        }
    }
    count
}

fn energy_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..50 {
        let size = rng.gen_range(1..=12);
        let mut pts: Vec<[i64; 2]> = (0..size).map(|_| [rng.gen_range(-4..=4), rng.gen_range(-4..=4)]).collect();
        pts.sort();
        pts.dedup();
        let m = 2 + trial % 2;
        let a = FiniteSet::from_int_points(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).map_err(err)?;
        let fast = additive_energy(&a, m, DEFAULT_ENERGY_CAP).map_err(err)?;
        let slow = brute_energy(&pts, m);
        ensure(fast == slow, || format!("trial {trial}: {fast} vs {slow}"))?;
    }
    Ok("50 sets, m ∈ {2, 3}".into())
}

fn energy_lower_bound_campaign() -> Check {
    let r = run_inequality_campaign(CampaignKind::EnergyLowerBound, 2024, 100, WorkCaps::default()).map_err(err)?;
    ensure(r.passed == 100, || format!("{:?}", r.counterexample))?;
    Ok("100/100 pairs with E_m(B)·K^m·|A| / |B|^{2m} ≥ 1".into())
}

fn gap_doubling() -> Check {
    let caps = WorkCaps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let g = random_proper_gap(&mut rng, 500, caps).map_err(err)?;
        ensure(g.nominal_size() <= 500 && g.rank() <= 3, || format!("bad GAP {g:?}"))?;
        let a = g.enumerate(caps.enumeration).map_err(err)?;
        let k = doubling(&a).map_err(err)?;
        ensure(k <= int(1 << g.rank()), || format!("trial {trial}: K = {k} > 2^{}", g.rank()))?;
        worst = worst.max(rational_to_f64(&k) / (1 << g.rank()) as f64);
        for m in 2..=3 {
            let p = check_plunnecke(&a, m, caps).map_err(err)?;
            ensure(p.holds, || format!("trial {trial} m={m}: {p:?}"))?;
        }
    }
    Ok(format!("100 proper GAPs, max K/2^rank = {worst:.3}"))
}

fn tube_oracle() -> Check {
    let curves = [
        CurveSpec::parabola(),
        CurveSpec::builtin("cubic").map_err(err)?,
        CurveSpec::builtin("circle-arc:0:1/4").map_err(err)?,
    ];
    let mut runs = 0;
    for c in &curves {
        for n in [8u64, 16, 32, 64, 128] {
            let nn = (n * n) as i64;
            for k in [1, 4] {
                let src = PointSource::lattice(n, default_box(c)).map_err(err)?;
                let q = TubeQuery::new(c.clone(), rat(k, nn), src);
                let fast = count_in_tube(&q).map_err(err)?;
                let slow = brute_force_tube_oracle(&q).map_err(err)?;
                ensure(fast.certified, || format!("{:?} N={n} δ={k}/{nn}: uncertified", c.kind()))?;
                ensure(fast.count == slow.count, || {
                    format!("{:?} N={n} δ={k}/{nn}: {} vs oracle {}", c.kind(), fast.count, slow.count)
                })?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} certified runs agree with the oracle"))
}

fn hyperplane_bounds() -> Check {
    let p = survey_intersections(&CurveSpec::parabola(), 1000, 5).map_err(err)?;
    ensure(p.max_intersections == 2, || format!("parabola max {}", p.max_intersections))?;
    let m = survey_intersections(&make_moment_curve(3).map_err(err)?, 1000, 5).map_err(err)?;
    ensure(m.max_intersections <= 3, || format!("moment max {}", m.max_intersections))?;
    for s in [&p, &m] {
        ensure(s.mvt_failures == 0, || format!("MVT failure at {:?}", s.mvt_counterexample))?;
    }
    ensure(p.uncertified + m.uncertified == 0, || "uncertified intersections".into())?;
    Ok(format!(
        "parabola max 2, moment max {}, MVT checked on {} trials",
        m.max_intersections,
        p.mvt_checked + m.mvt_checked
    ))
}

fn lipschitz() -> Check {
    let sets = [MonomialSet::parse("x,y").map_err(err)?, make_ms(2).map_err(err)?, make_ms(3).map_err(err)?];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let one = int(1);
    let mut r = || rat(rng.gen_range(-4096..=4096), 4096);
    for set in &sets {
        for _ in 0..1000 {
            let (p, q) = ([r(), r()], [r(), r()]);
            ensure(check_lipschitz_pair(set, &p, &q, &one).map_err(err)?, || format!("{set}: {p:?} {q:?}"))?;
        }
    }
    Ok("3000 pairs, squared inequality exact".into())
}

fn slope_vs_exponent() -> Check {
    let mut lines = Vec::new();
    for s in 1..=3u32 {
        let cfg = ExperimentConfig::new(
            CurveRef::Name("parabola".into()),
            NSchedule::List(vec![4, 8, 16, 32, 64, 128, 256]),
            DeltaRule::default(),
        )
        .with_monomials(MonomialRef::Text(format!("Ms:{s}")));
        let r = run_exponent_experiment(&cfg).map_err(err)?;
        ensure(r.all_certified(), || format!("M_{s}: uncertified rows"))?;
        let v = r.verdict.as_ref().ok_or_else(|| format!("M_{s}: no verdict ({:?})", r.fit_note))?;
        let line = format!("M_{s}: slope {:.3} vs e = {}", v.slope, r.exponent.as_deref().unwrap_or("?"));
        ensure(v.slope <= v.exponent + SLOPE_MARGIN, || format!("{line} exceeds margin"))?;
        lines.push(line);
    }
    Ok(lines.join("; "))
}

fn main() {
    let mut h = Harness { failures: Vec::new() };
    h.run(1, "parabola on-curve counts", secs(1), parabola_on_curve_counts);
    h.run(2, "square-N exponent fit", secs(1), square_schedule_slope);
    h.run(3, "moment-curve Wronskian", secs(1), moment_wronskians);
    h.run(4, "degenerate circle lift", secs(5), degenerate_circle_lift);
    h.run(5, "M_s exponent formula", secs(1), ms_exponents);
    h.run(6, "lift bijection", secs(1), lift_bijection);
    h.run(7, "energy oracle", secs(30), energy_oracle);
    h.run(8, "energy lower bound campaign", secs(60), energy_lower_bound_campaign);
    h.run(9, "Plünnecke and GAP doubling", secs(60), gap_doubling);
    h.run(10, "tube count oracle", secs(120), tube_oracle);
    h.run(11, "hyperplane bounds", secs(30), hyperplane_bounds);
    h.run(12, "Lipschitz lift", secs(10), lipschitz);
    h.run(13, "slope ≤ e(M) + 0.1 at N ≤ 256", secs(120), slope_vs_exponent);
    if !h.failures.is_empty() {
        println!("unexpected failures: {:?}", h.failures);
        std::process::exit(1);
    }
}
