//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use csit_cli::{advect_summary, derive_table, tracking_times, AdvectJob, DeriveJob, DeriveSource, LogisticDemo};
use csit_core::advection::{
    dispersion_csit, dispersion_fd, run_advection, AdvectionConfig, Scheme, SourceTimeFunction,
};
use csit_core::closed_forms::{verify_closed_forms, ClosedFormConfig};
use csit_core::continuation::AnalyticFunction;
use csit_core::grid::{fft_forward, fft_inverse, ComplexSeries, RealSeries, UniformGrid};
use csit_core::ifreq::{
    analytic_signal, chirp, chirp_frequency, chirp_trace, if_classical, if_csit, interior_mask, DerivativeBackend,
    IfParams,
};
use csit_core::operator::{
    complex_step_derivative, csit_quadrature, csit_quadrature_direct, csit_spectral, csit_symbol, remainder_bound,
    CsitParams,
};
use csit_core::special::{shi, si};
use csit_core::Complex64;
use csit_oracles::{shi_quadrature, si_quadrature};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

type Check = fn() -> Result<Verdict, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_closed_forms() -> Result<Verdict, String> {
    let report = verify_closed_forms(&ClosedFormConfig::default()).map_err(err)?;
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{} {:.2e}", r.name, r.max_deviation))
        .collect();
    let ok = report.rows.len() == 5
        && report
            .rows
            .iter()
            .all(|r| r.passed && r.tolerance <= 1e-6 && r.points == 20);
    Ok(verdict(ok, format!("{} (tol 1e-6)", rows.join(", "))))
}

fn max_sine_error(h: f64, z: f64) -> Result<f64, String> {
    let p = CsitParams::new(h, z, 128, 128)
        .and_then(|p| p.with_epsilon(z / 512.0))
        .map_err(err)?;
    let mut worst = 0.0f64;
    for i in 0..32 {
        let x = -PI + 2.0 * PI * i as f64 / 32.0;
        let v = csit_quadrature_direct(&AnalyticFunction::sin(), x, &p).map_err(err)?;
        worst = worst.max((v - x.cos()).abs());
    }
    Ok(worst)
}

fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn c2_remainder_bound() -> Result<Verdict, String> {
    let steps = [0.05, 0.1, 0.15, 0.2];
    let mut worst_ratio = 0.0f64;
    for &h in &steps {
        for &z in &steps {
            let e = max_sine_error(h, z)?;
            worst_ratio = worst_ratio.max(e / remainder_bound(1.0, h, z));
        }
    }
    let errs: Vec<f64> = steps.iter().map(|&z| max_sine_error(z, z)).collect::<Result<_, _>>()?;
    let slope = log_log_slope(&steps, &errs);
    Ok(verdict(
        worst_ratio <= 1.1 && (slope - 2.0).abs() <= 0.3,
        format!("max error/bound {worst_ratio:.4} (<= 1.1), slope {slope:.3} (2 +/- 0.3)"),
    ))
}

fn c3_symbol_expansion() -> Result<Verdict, String> {
    let mut worst = 0.0f64;
    for &k in &[0.1, 1.0, 10.0, 100.0] {
        for i in 0..=10 {
            for j in 0..=10 {
                let (h, z) = (0.005 * i as f64 / k, 0.005 * j as f64 / k);
                if z == 0.0 {
                    continue;
                }
                let ratio = csit_symbol(k, h, z).map_err(err)? / Complex64::new(0.0, k);
                let series = 1.0 - (k * h).powi(2) / 6.0 + (k * z).powi(2) / 18.0;
                worst = worst.max((ratio - series).norm());
            }
        }
    }
    Ok(verdict(
        worst < 1e-6,
        format!("max deviation {worst:.2e} for kH, kZ <= 0.05 (< 1e-6)"),
    ))
}

fn band_limited(grid: UniformGrid, kmax: usize, seed: u64) -> Result<RealSeries, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let terms: Vec<(f64, f64)> = (1..=kmax)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let l = grid.length();
    RealSeries::from_fn(grid, |x| {
        terms
            .iter()
            .enumerate()
            .map(|(m, (a, b))| {
                let w = 2.0 * PI * (m + 1) as f64 * x / l;
                a * w.cos() + b * w.sin()
            })
            .sum()
    })
    .map_err(err)
}

fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn c4_quadrature_symbol() -> Result<Verdict, String> {
    let n = 256;
    let grid = UniformGrid::periodic_2pi(n).map_err(err)?;
    let s = band_limited(grid, n / 8, 4)?;
    let (h, z) = (0.05, 0.05);
    let exact = csit_spectral(&s, h, z).map_err(err)?;
    let mut errs = Vec::new();
    for m in [16, 64, 256] {
        let p = CsitParams::new(h, z, m, m)
            .and_then(|p| p.with_epsilon(z / (4.0 * m as f64)))
            .map_err(err)?;
        errs.push(relative_l2(
            csit_quadrature(&s, &p).map_err(err)?.values(),
            exact.values(),
        ));
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let last = *errs.last().unwrap();
    Ok(verdict(
        monotone && last < 1e-3,
        format!(
            "relative errors {} (decreasing, final < 1e-3)",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

fn c5_logistic() -> Result<Verdict, String> {
    let demo = LogisticDemo::default();
    let dt = 1.0 / demo.n as f64;
    let job = DeriveJob {
        source: DeriveSource::Logistic(demo),
        params: CsitParams::new(dt, dt, 16, 16).map_err(err)?,
        edge: 5,
        output: PathBuf::new(),
    };
    let t = derive_table(&job).map_err(err)?;
    let mid = t.grid.nearest_node(demo.t0);
    let worst = |col: &[f64]| -> f64 {
        let rel = t.relative_errors(col).expect("analytic derivative");
        rel.iter()
            .enumerate()
            .filter(|(j, _)| t.interior[*j] && j.abs_diff(mid) > 10)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    };
    let (csit, ps) = (worst(&t.csit), worst(&t.pseudospectral));
    let columns = [&t.f, &t.fd, &t.pseudospectral, &t.csit];
    let emitted = columns.iter().all(|c| c.len() == demo.n) && t.analytic.as_ref().is_some_and(|a| a.len() == demo.n);
    Ok(verdict(
        emitted && csit < ps,
        format!("interior max relative error csit {csit:.3e} < pseudospectral {ps:.3e}"),
    ))
}

fn c6_advection() -> Result<Verdict, String> {
    let mut energy = Vec::new();
    let mut speed = None;
    let mut diverged = Vec::new();
    for scheme in [Scheme::Fd, Scheme::Pseudospectral, Scheme::Csit] {
        let config = AdvectionConfig::reference(scheme);
        let source = SourceTimeFunction::new(config.f0);
        let (t1, t2) = tracking_times(&config, &source);
        let job = AdvectJob {
            config,
            source,
            snapshots: vec![config.duration()],
            window_wavelengths: 4.0,
            output_dir: PathBuf::new(),
        };
        match run_advection(&config, &source, &[config.duration(), t1, t2]) {
            Ok(s) => {
                let summary = advect_summary(&job, &s[..1], (&s[1], &s[2])).map_err(err)?;
                energy.push(summary.snapshots[0].parasitic_energy);
                if scheme == Scheme::Csit {
                    speed = summary.pulse_speed;
                }
            }
            Err(e) => {
                diverged.push(format!("{scheme:?}: {e}"));
                energy.push(f64::NAN);
            }
        }
    }
    let (fd, ps, cs) = (energy[0], energy[1], energy[2]);
    let v = speed.unwrap_or(f64::NAN);
    let ok = diverged.is_empty() && cs < fd && cs < ps && cs < 0.05 && (v - 900.0).abs() <= 0.02 * 900.0;
    Ok(verdict(
        ok,
        format!(
            "parasitic energy fd {fd:.3e}, pseudospectral {ps:.3e}, csit {cs:.3e} (< 0.05); csit pulse speed {v:.2} m/s (900 +/- 2%){}",
            if diverged.is_empty() { String::new() } else { format!("; diverged: {}", diverged.join(", ")) }
        ),
    ))
}

fn c7_dispersion() -> Result<Verdict, String> {
    let cfg = AdvectionConfig::reference(Scheme::Csit);
    let (dx, c) = (cfg.dx(), cfg.c);
    let fd_at_nyquist = dispersion_fd(PI / dx, c, dx);
    let samples = 2000;
    let ratios: Vec<f64> = (1..=samples)
        .map(|i| {
            let k = PI / dx * i as f64 / samples as f64;
            dispersion_csit(k, c, cfg.csit.h, cfg.csit.z) / (c * k)
        })
        .collect();
    let in_range = ratios.iter().all(|&r| r > 0.0 && r <= 1.0);
    let nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0]);
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(verdict(
        fd_at_nyquist == 0.0 && in_range && nonincreasing,
        format!(
            "omega_fd(pi) = {fd_at_nyquist:e}; csit ratio in (0, 1]: {in_range} (max {max:.6}); nonincreasing: {nonincreasing}"
        ),
    ))
}

fn worst_interior(hz: &[f64], truth: &[f64], mask: &[bool]) -> f64 {
    hz.iter()
        .zip(truth)
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|((v, t), _)| if v.is_finite() { (v - t).abs() } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

fn c8_chirp() -> Result<Verdict, String> {
    let (f0, kc) = (20.0, 20.0);
    let mut errors = Vec::new();
    for n in [2500, 300] {
        let grid = UniformGrid::new(0.0, 1.0, n).map_err(err)?;
        let tr = analytic_signal(&chirp(f0, kc, &grid));
        let truth: Vec<f64> = grid.coords().iter().map(|&t| chirp_frequency(f0, kc, t)).collect();
        let mask = interior_mask(n, 0.05);
        let classical = if_classical(&tr, DerivativeBackend::Pseudospectral).map_err(err)?;
        let csit = if_csit(&tr, &IfParams::for_sampling(grid.spacing()).map_err(err)?).map_err(err)?;
        errors.push((
            worst_interior(&classical.hz, &truth, &mask),
            worst_interior(&csit.hz, &truth, &mask),
        ));
    }
    let a = errors[0].0 <= 0.5 && errors[0].1 <= 0.5;
    let b = errors[1].1 < errors[1].0;

    let n = 2500;
    let grid = UniformGrid::new(0.0, 1.0, n).map_err(err)?;
    let tr = chirp_trace(f0, kc, &grid, |t| (PI * t).sin().powi(2)).map_err(err)?;
    let classical = if_classical(&tr, DerivativeBackend::Pseudospectral).map_err(err)?;
    let csit = if_csit(&tr, &IfParams::for_sampling(grid.spacing()).map_err(err)?).map_err(err)?;
    let bound = 10.0 * chirp_frequency(f0, kc, 1.0);
    let csit_max = csit
        .hz
        .iter()
        .map(|v| if v.is_finite() { v.abs() } else { f64::INFINITY })
        .fold(0.0, f64::max);
    let c = csit_max <= bound && classical.flagged_count() > 0;
    Ok(verdict(
        a && b && c,
        format!(
            "(a) n=2500 classical {:.3} Hz, csit {:.3} Hz (<= 0.5); (b) n=300 csit {:.4} < classical {:.4}; (c) Hann max|csit| {csit_max:.2} Hz (<= {bound}), classical flagged {}",
            errors[0].0,
            errors[0].1,
            errors[1].1,
            errors[1].0,
            classical.flagged_count()
        ),
    ))
}

fn c9_core_numerics() -> Result<Verdict, String> {
    let mut rng = StdRng::seed_from_u64(9);
    let mut round_trip = 0.0f64;
    let mut parseval = 0.0f64;
    for n in [2, 3, 64, 257, 1000, 4096] {
        let grid = UniformGrid::new(0.0, 1.0, n).map_err(err)?;
        let values: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let s = ComplexSeries::new(grid, values).map_err(err)?;
        let spec = fft_forward(&s);
        let back = fft_inverse(&spec);
        let scale = s.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = back
            .values()
            .iter()
            .zip(s.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        round_trip = round_trip.max(diff / scale);
        let time: f64 = s.values().iter().map(|v| v.norm_sqr()).sum();
        let freq: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        parseval = parseval.max((time - freq).abs() / time);
    }
    let mut special = 0.0f64;
    for i in 1..=100 {
        let z = 0.2 * i as f64;
        let (a, b) = (shi_quadrature(z), si_quadrature(z));
        if !a.converged || !b.converged {
            return Ok(verdict(false, format!("oracle did not converge at z = {z}")));
        }
        special = special.max((shi(z) - a.value).abs() / a.value.abs().max(1.0));
        special = special.max((si(z) - b.value).abs());
    }
    let step = complex_step_derivative(&AnalyticFunction::sin(), 0.0, 0.0, 1e-200).map_err(err)?;
    Ok(verdict(
        round_trip <= 1e-12 && parseval <= 1e-10 && special <= 1e-10 && step == 1.0,
        format!(
            "round trip {round_trip:.1e} (1e-12), Parseval {parseval:.1e} (1e-10), shi/si {special:.1e} (1e-10), complex step {step:?}"
        ),
    ))
}

fn csit(args: &[&str], cwd: &Path, threads: Option<&str>) -> Result<(), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_csit"));
    cmd.args(args).current_dir(cwd);
    match threads {
        Some(t) => cmd.env("CSIT_THREADS", t),
        None => cmd.env_remove("CSIT_THREADS"),
    };
    let out = cmd.output().map_err(err)?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "csit {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn csv_files(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    Ok(files)
}

fn c10_determinism() -> Result<Verdict, String> {
    let tmp = tempfile::tempdir().map_err(err)?;
    let root = tmp.path();
    let mut input = String::from("x,value\n");
    for j in 0..128 {
        let x = 2.0 * PI * j as f64 / 128.0;
        input.push_str(&format!("{x:.17e},{:.17e}\n", (3.0 * x).sin() + 0.5 * (7.0 * x).cos()));
    }
    std::fs::write(root.join("series.csv"), input).map_err(err)?;

    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("transform", vec!["transform", "../series.csv", "-o", "out.csv"]),
        (
            "transform-symbol",
            vec!["transform", "../series.csv", "--mode", "symbol", "-o", "out.csv"],
        ),
        ("derive", vec!["derive", "--demo", "logistic", "-o", "out.csv"]),
        ("advect", vec!["advect", "--snapshots", "1,3", "--output-dir", "."]),
        ("ifreq", vec!["ifreq", "--demo", "chirp", "--n", "300", "-o", "out.csv"]),
        ("symbol", vec!["symbol", "-o", "out.csv"]),
        ("closed-forms", vec!["closed-forms", "-o", "out.csv"]),
    ];
    let mut compared = 0;
    for (name, args) in &runs {
        let first = root.join(name);
        let second = root.join(format!("{name}-replay"));
        std::fs::create_dir_all(&first).map_err(err)?;
        csit(args, &first, None)?;
        let manifest = if *name == "advect" {
            "manifest.json"
        } else {
            "out.csv.manifest.json"
        };
        let manifest = first.join(manifest);
        let second_arg = second.to_string_lossy().into_owned();
        csit(
            &["replay", &manifest.to_string_lossy(), "--output-dir", &second_arg],
            &first,
            Some("1"),
        )?;
        let files = csv_files(&first)?;
        if files.is_empty() {
            return Ok(verdict(false, format!("{name} produced no CSV")));
        }
        for f in files {
            let other = second.join(f.file_name().unwrap());
            let (a, b) = (std::fs::read(&f).map_err(err)?, std::fs::read(&other).map_err(err)?);
            if a != b {
                return Ok(verdict(
                    false,
                    format!("{name}: {} differs after replay", other.display()),
                ));
            }
            compared += 1;
        }
    }
    Ok(verdict(
        true,
        format!("{compared} CSV files byte-identical after replay with CSIT_THREADS=1"),
    ))
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 10] = [
        ("closed-form oracle suite", c1_closed_forms),
        ("remainder bound and second-order convergence", c2_remainder_bound),
        ("symbol small-wavenumber expansion", c3_symbol_expansion),
        ("quadrature converges to the symbol", c4_quadrature_symbol),
        ("logistic derivative errors", c5_logistic),
        ("advection parasitic energy and pulse speed", c6_advection),
        ("dispersion curves", c7_dispersion),
        ("chirp instantaneous frequency", c8_chirp),
        ("core numerics", c9_core_numerics),
        ("replay determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let v = check().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        if !v.passed {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
