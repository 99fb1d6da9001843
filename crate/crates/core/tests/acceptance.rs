//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use pearsonprob::plot::PixelMap;
use pearsonprob::{
    cdf, fit, quantile, render_density_plot, ClassifyTolerances, FittedPearson,
    IntegrationSettings, Params, PearsonType, PlotOptions,
};
use statrs::distribution::ContinuousCDF;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fit_unit(sb1: f64, b2: f64) -> Result<FittedPearson, String> {
    fit(
        &common::unit_moments(sb1, b2),
        &ClassifyTolerances::default(),
    )
    .map_err(|e| e.to_string())
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Absolute difference ≤ 0.02 and, unless exempt, relative difference ≤ 1%.
fn concordant(name: &str, got: f64, want: f64, relative: bool) -> Result<f64, String> {
    let abs = (got - want).abs();
    let rel = abs / want.abs();
    check(abs <= 0.02 && (!relative || rel <= 0.01), || {
        format!("{name}: got {got}, reference {want} (abs {abs:.2e}, rel {rel:.2e})")
    })?;
    Ok(abs)
}

fn table2_parameters() -> Outcome {
    let mut worst: f64 = 0.0;

    let f = fit_unit(0.507296f64.sqrt(), 2.935111)?;
    check(f.pearson_type() == PearsonType::TypeI, || {
        format!("row I fitted as {:?}", f.pearson_type())
    })?;
    let Params::TypeI { m1, m2, .. } = *f.params() else {
        unreachable!()
    };
    worst = worst.max(concordant(
        "I kappa",
        f.shape().kappa.value(),
        -0.264500,
        true,
    )?);
    worst = worst.max(concordant("I r", f.r().unwrap(), 5.186811, true)?);
    worst = worst.max(concordant("I m1", m1, 0.409833, true)?);
    worst = worst.max(concordant("I m2", m2, 2.776878, true)?);

    let f = fit_unit(0.005366f64.sqrt(), 3.172912)?;
    check(f.pearson_type() == PearsonType::TypeIV, || {
        format!("row IV fitted as {:?}", f.pearson_type())
    })?;
    let Params::TypeIV { m, nu, .. } = *f.params() else {
        unreachable!()
    };
    worst = worst.max(concordant(
        "IV kappa",
        f.shape().kappa.value(),
        0.012800,
        false,
    )?);
    worst = worst.max(concordant("IV r", f.r().unwrap(), 39.442540, true)?);
    worst = worst.max(concordant("IV |nu|", nu.abs(), 4.388794, true)?);
    worst = worst.max(concordant("IV m", m, 20.721270, true)?);

    let f = fit_unit(0.995360f64.sqrt(), 4.739349)?;
    check(f.pearson_type() == PearsonType::TypeVI, || {
        format!("row VI fitted as {:?}", f.pearson_type())
    })?;
    let Params::TypeVI { q1, q2, .. } = *f.params() else {
        unreachable!()
    };
    worst = worst.max(concordant(
        "VI kappa",
        f.shape().kappa.value(),
        1.895000,
        true,
    )?);
    worst = worst.max(concordant("VI r", f.r().unwrap(), -33.421290, true)?);
    worst = worst.max(concordant("VI q1", q1, 42.030800, true)?);
    worst = worst.max(concordant("VI q2", q2, 6.609500, true)?);

    Ok(format!("12 quantities, max abs diff {worst:.2e}"))
}

fn table3_probabilities() -> Outcome {
    let rows = [
        (PearsonType::Normal, 0.0, 3.0, -1.9600, 1.9600),
        (PearsonType::TypeI, 0.6, 3.2, -1.5998, 2.2320),
        (PearsonType::TypeII, 0.0, 2.6, -1.9196, 1.9196),
        (PearsonType::TypeIV, 1.4, 8.6, -1.5068, 2.3801),
        (PearsonType::TypeVI, 2.0, 11.2, -1.1915, 2.5545),
        (PearsonType::TypeVII, 0.0, 8.4, -1.9925, 1.9925),
    ];
    let s = IntegrationSettings::default();
    let mut worst: f64 = 0.0;
    for (t, sb1, b2, lo, hi) in rows {
        let f = fit_unit(sb1, b2)?;
        check(f.pearson_type() == t, || {
            format!("{t:?} row fitted as {:?}", f.pearson_type())
        })?;
        for (x, want) in [(lo, 0.025), (hi, 0.975)] {
            let p = cdf(&f, x, &s).map_err(|e| e.to_string())?.p;
            let d = (p - want).abs();
            check(d <= 2e-4, || format!("{t:?} at {x}: p = {p}, want {want}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("12 probabilities, max |p - target| {worst:.2e}"))
}

fn normalization_and_moments() -> Outcome {
    let s = IntegrationSettings::default();
    let grid = common::shape_grid();
    check(grid.len() >= 40, || {
        format!("grid has only {} points", grid.len())
    })?;
    let (mut mass_err, mut moment_err): (f64, f64) = (0.0, 0.0);
    for (sb1, b2, t) in &grid {
        let f = fit_unit(*sb1, *b2)?;
        check(f.pearson_type() == *t, || {
            format!(
                "({sb1}, {b2}) fitted as {:?}, expected {t:?}",
                f.pearson_type()
            )
        })?;
        let e = |k: i32| {
            f.expectation(|x| x.powi(k), &s)
                .map(|r| r.value)
                .map_err(|e| e.to_string())
        };
        let mass = (e(0)? - 1.0).abs();
        // Moments are measured relative to σ^k = 1; μ1 = 0 and μ3 = 0 have no
        // scale of their own.
        let targets = [0.0, 1.0, *sb1, *b2];
        let mut m = 0.0f64;
        for (k, want) in (1..=4).zip(targets) {
            m = m.max((e(k)? - want).abs() / want.abs().max(1.0));
        }
        check(mass <= 1e-8, || {
            format!("{t:?} ({sb1}, {b2}): mass off by {mass:e}")
        })?;
        check(m <= 1e-6, || {
            format!("{t:?} ({sb1}, {b2}): moment off by {m:e}")
        })?;
        mass_err = mass_err.max(mass);
        moment_err = moment_err.max(m);
    }
    let types: std::collections::HashSet<_> = grid.iter().map(|g| g.2).collect();
    check(types.len() == 8, || {
        "grid does not cover all eight types".into()
    })?;
    Ok(format!(
        "{} points, max mass err {mass_err:.1e}, max moment rel err {moment_err:.1e}",
        grid.len()
    ))
}

fn closed_form_oracles() -> Outcome {
    let s = IntegrationSettings::default();
    let p = |f: &FittedPearson, x: f64| cdf(f, x, &s).map(|r| r.p).map_err(|e| e.to_string());

    let f = fit_unit(0.0, 3.0)?;
    let mut normal: f64 = 0.0;
    for i in 0..1000 {
        let x = -8.0 + 16.0 * i as f64 / 999.0;
        normal = normal.max((p(&f, x)? - common::normal_cdf(x)).abs());
    }
    check(normal <= 1e-10, || format!("normal max err {normal:e}"))?;

    // Unit-variance gamma with shape k = 4/β1, shifted to mean zero.
    let b1: f64 = 0.8;
    let f = fit_unit(b1.sqrt(), common::type_iii_beta2(b1))?;
    let k = 4.0 / b1;
    let g = statrs::distribution::Gamma::new(k, k.sqrt()).map_err(|e| e.to_string())?;
    let mut gamma: f64 = 0.0;
    for i in 0..100 {
        let x = -k.sqrt() + 0.01 + 10.0 * i as f64 / 99.0;
        gamma = gamma.max((p(&f, x)? - g.cdf(x + k.sqrt())).abs());
    }
    check(gamma <= 1e-6, || format!("gamma max err {gamma:e}"))?;

    // Student t with 2m − 1 degrees of freedom, rescaled to unit variance.
    let b2 = 8.4;
    let f = fit_unit(0.0, b2)?;
    let dof: f64 = 2.0 * (5.0 * b2 - 9.0) / (2.0 * (b2 - 3.0)) - 1.0;
    let t = statrs::distribution::StudentsT::new(0.0, ((dof - 2.0) / dof).sqrt(), dof)
        .map_err(|e| e.to_string())?;
    let mut student: f64 = 0.0;
    for i in 0..100 {
        let x = -8.0 + 16.0 * i as f64 / 99.0;
        student = student.max((p(&f, x)? - t.cdf(x)).abs());
    }
    check(student <= 1e-6, || format!("student t max err {student:e}"))?;

    Ok(format!(
        "normal {normal:.1e} (1000 pts), gamma {gamma:.1e}, student t {student:.1e} (100 pts each)"
    ))
}

fn inversion_consistency() -> Outcome {
    let s = IntegrationSettings::default();
    let levels = [0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (sb1, b2, t) in common::shape_grid() {
        let f = fit_unit(sb1, b2)?;
        for p in levels {
            let x = quantile(&f, p, &s).map_err(|e| format!("{t:?} quantile({p}): {e}"))?;
            let q = cdf(&f, x, &s).map_err(|e| e.to_string())?.p;
            let back = quantile(&f, q, &s).map_err(|e| format!("{t:?} quantile({q}): {e}"))?;
            let d = (back - x).abs();
            check(d <= 1e-5, || {
                format!("{t:?} ({sb1}, {b2}) p={p}: x={x}, back={back}")
            })?;
            worst = worst.max(d);
            count += 1;
        }
    }
    Ok(format!("{count} round trips, max |x' - x| {worst:.1e}"))
}

fn out_of_domain_contract() -> Outcome {
    const WARNING: &str = "WARNING: x0 is out of the domain of type VI Pearson distribution";
    let f = fit_unit(2.0, 11.2)?;
    let x0 = f.support().lo - 1.0;
    let x0s = x0.to_string();
    let base = [
        "prob",
        "--mu2",
        "1",
        "--mu3",
        "2",
        "--mu4",
        "11.2",
        "--x0",
        x0s.as_str(),
    ];

    let out = Command::new(env!("CARGO_BIN_EXE_pearsonprob"))
        .args(base)
        .env_remove("PEARSONPROB_TOLERANCES")
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.code() == Some(0), || {
        format!("text mode exit {:?}", out.status.code())
    })?;
    let err = String::from_utf8_lossy(&out.stderr);
    check(err == format!("{WARNING}\n"), || {
        format!("stderr was {err:?}")
    })?;

    let out = Command::new(env!("CARGO_BIN_EXE_pearsonprob"))
        .args(base)
        .args(["--format", "json"])
        .env_remove("PEARSONPROB_TOLERANCES")
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.code() == Some(0), || {
        format!("json mode exit {:?}", out.status.code())
    })?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    check(v["p"].as_f64() == Some(0.0), || format!("p = {}", v["p"]))?;
    check(v["warning"].as_str() == Some(WARNING), || {
        format!("warning = {}", v["warning"])
    })?;
    check(v["type"] == "VI", || format!("type = {}", v["type"]))?;
    Ok("exit 0, p = 0, warning byte-exact on stderr and in JSON".into())
}

fn plot_structure() -> Outcome {
    let s = IntegrationSettings::default();
    let fits = [(0.0, 3.0, 0.5), (0.6, 3.2, 1.0), (2.0, 11.2, 0.5)];
    let mut worst: f64 = 0.0;
    for (sb1, b2, x0) in fits {
        let f = fit_unit(sb1, b2)?;
        let r = cdf(&f, x0, &s).map_err(|e| e.to_string())?;
        let svg =
            render_density_plot(&f, x0, &r, &PlotOptions::default()).map_err(|e| e.to_string())?;
        let doc = roxmltree::Document::parse(&svg).map_err(|e| e.to_string())?;
        let by_id = |id: &str| {
            doc.descendants()
                .filter(|n| n.attribute("id") == Some(id))
                .collect::<Vec<_>>()
        };
        let t = f.pearson_type();
        check(by_id("density-curve").len() == 1, || {
            format!("{t:?}: density-curve count")
        })?;
        check(by_id("probability-region").len() == 1, || {
            format!("{t:?}: region count")
        })?;
        check(by_id("probability-value").len() == 1, || {
            format!("{t:?}: annotation count")
        })?;
        check(
            by_id("axes").len() == 1 && by_id("ticks").len() == 1,
            || format!("{t:?}: axes"),
        )?;
        let text = by_id("probability-value")[0]
            .text()
            .unwrap_or_default()
            .to_string();
        check(text.ends_with(&format!("{:.6}", r.p)), || {
            format!("{t:?}: annotation {text}")
        })?;

        let map = PixelMap::from_svg(&svg).ok_or("missing coordinate map")?;
        let d = by_id("probability-region")[0]
            .attribute("d")
            .unwrap_or_default();
        let xs: Vec<f64> = d
            .split(['M', 'L', 'Z'])
            .filter_map(|p| p.trim().split_once(',').and_then(|(x, _)| x.parse().ok()))
            .collect();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let want_lo = map.px(f.support().lo.max(map.x_lo));
        let want_hi = map.px(x0.min(map.x_hi));
        let err = (lo - want_lo).abs().max((hi - want_hi).abs());
        check(err <= 0.5, || {
            format!("{t:?}: region [{lo}, {hi}] px, want [{want_lo}, {want_hi}]")
        })?;
        worst = worst.max(err);
    }
    Ok(format!(
        "3 fits (normal, I, VI), max region extent err {worst:.3} px"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        (
            "parameter concordance (kappa, r, shape exponents)",
            table2_parameters,
        ),
        (
            "probability concordance at tabulated points",
            table3_probabilities,
        ),
        (
            "normalization and moment round trip",
            normalization_and_moments,
        ),
        ("closed-form oracles", closed_form_oracles),
        ("inversion consistency", inversion_consistency),
        ("out-of-domain contract", out_of_domain_contract),
        ("plot structure", plot_structure),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {}. {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
