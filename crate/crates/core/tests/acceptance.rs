//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use vortexmix::balance::{balance_residuals, gronwall_bound_check, Balance};
use vortexmix::functionals::{compute_constants, rates_and_times};
use vortexmix::grid::RadialGrid;
use vortexmix::lemmas::LemmaSuite;
use vortexmix::solver::{
    evolve, heat_mode_exact, Flow, FlowConfig, ModeState, Stepper,
};
use vortexmix::sweep::{
    envelope_checks, run_sweep, scaling_exponent, simulate_mode, SimDefaults, DEFAULT_FIT_WINDOW,
};
use vortexmix::Execution;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn heat_error(n_cells: usize, dt: f64) -> f64 {
    let grid = Arc::new(RadialGrid::new(8.0, n_cells).unwrap());
    let nu = 0.01;
    let config = FlowConfig {
        p: 1.0,
        nu,
        ell: 0,
        dt,
        t_max: 1.0,
        record_every: usize::MAX,
    };
    let initial = heat_mode_exact(1.0, nu, 0.0, &grid).unwrap();
    let stepper = Stepper::new(config.clone(), Arc::clone(&grid)).unwrap();
    let state = ModeState::new(initial, 0.0, config).unwrap();
    let traj = evolve(state, &stepper, |s| Ok((vortexmix::LedgerRow::with_time(s.t), Flow::Continue)));
    assert!(traj.is_complete());
    assert!((traj.state.t - 1.0).abs() < 1e-9);
    let exact = heat_mode_exact(1.0, nu, 1.0, &grid).unwrap();
    let diff = traj
        .state
        .field
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| a - b)
        .collect();
    let diff = vortexmix::RadialField::new(Arc::clone(&grid), diff).unwrap();
    (diff.weighted_norm_sq(0.0) / exact.weighted_norm_sq(0.0)).sqrt()
}

fn criterion_1() -> Outcome {
    let coarse = heat_error(2048, 1e-3);
    let fine = heat_error(4096, 5e-4);
    let ratio = coarse / fine;
    check(
        coarse <= 1e-4 && (3.5..=4.5).contains(&ratio),
        format!("relative L2 error {coarse:.3e}, refinement ratio {ratio:.3}"),
    )
}

fn criterion_2() -> Outcome {
    let nu = 0.01;
    let grid = Arc::new(RadialGrid::new(64.0, 2048).unwrap());
    let initial = heat_mode_exact(1.0, nu, 0.0, &grid).unwrap();
    let norm0 = initial.weighted_norm_sq(0.0).sqrt();
    let config = FlowConfig {
        p: 1.0,
        nu,
        ell: 0,
        dt: 0.05,
        t_max: 10.0 / nu,
        record_every: 20,
    };
    let stepper = Stepper::new(config.clone(), grid).unwrap();
    let state = ModeState::new(initial, 0.0, config).unwrap();
    let traj = evolve(state, &stepper, |s| {
        Ok((
            vortexmix::LedgerRow {
                sup_abs: s.field.sup_norm(),
                ..vortexmix::LedgerRow::with_time(s.t)
            },
            Flow::Continue,
        ))
    });
    if let Some(e) = traj.failure {
        return Err(e.to_string());
    }
    let series: Vec<f64> = traj
        .ledger
        .rows()
        .iter()
        .filter(|r| r.t >= 0.1 / nu - 1e-9)
        .map(|r| (nu * r.t).sqrt() * r.sup_abs / norm0)
        .collect();
    let finite = series.iter().all(|v| v.is_finite());
    let (peak, peak_value) = series
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut running_min = f64::INFINITY;
    let mut worst = 0.0f64;
    for &v in &series[peak..] {
        running_min = running_min.min(v);
        worst = worst.max(v / running_min - 1.0);
    }
    check(
        finite && worst <= 0.01,
        format!(
            "max sqrt(nu t)|f|_inf/|f0| = {peak_value:.5} over {} samples, largest regrowth after peak {worst:.2e}",
            series.len()
        ),
    )
}

fn balance_report(p: f64, n_cells: usize, dt: f64) -> vortexmix::balance::ResidualReport {
    let d = SimDefaults {
        r_max: 8.0,
        n_cells,
        dt: Some(dt),
        t_max: Some(10.0),
        rows: None,
        stop_fraction: 0.0,
        ..SimDefaults::default()
    };
    let (_, traj) = simulate_mode(p, 1e-2, 1, &d).unwrap();
    assert!(traj.is_complete());
    balance_residuals(&traj.ledger, p, 1e-2).unwrap()
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [1.0, 2.0] {
        let base = balance_report(p, 512, 0.01);
        let fine = balance_report(p, 1024, 0.005);
        for b in Balance::ALL {
            let (r0, r1) = (base.get(b).relative, fine.get(b).relative);
            let shrink = r0 / r1;
            ok &= r0 <= 1e-2 && shrink >= 3.0;
            detail.push(format!("p={p} {}: {r0:.2e} -> {r1:.2e} (x{shrink:.2})", b.name()));
        }
    }
    check(ok, detail.join("; "))
}

fn criterion_4() -> Outcome {
    let result = LemmaSuite::default().run(Execution::default()).map_err(|e| e.to_string())?;
    let summaries = result.summaries();
    let detail = summaries
        .iter()
        .map(|s| format!("{} {}/{} min margin {:.3e}", s.lemma, s.passed, s.total, s.min_relative_margin))
        .collect::<Vec<_>>()
        .join("; ");
    check(
        result.all_pass(),
        format!("{detail}; chain violations {}", result.chain_failures),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for i in 0..=30 {
        let p = 1.0 + 0.1 * i as f64;
        let c = compute_constants(p).map_err(|e| e.to_string())?;
        for k in c.constraints() {
            worst = worst.min(k.slack());
            count += k.holds() as usize;
        }
    }
    let c1 = compute_constants(1.0).unwrap();
    let c2 = compute_constants(2.0).unwrap();
    let spots = (c1.c1 - 10.0).abs() <= 1e-12
        && (c1.c3 - 4.0).abs() <= 1e-12
        && (c2.c1 - 64.0).abs() <= 1e-12
        && (c2.c3 - 2f64.powf(1.5)).abs() <= 1e-12;
    check(
        count == 31 * 5 && worst >= -1e-12 && spots,
        format!("{count}/155 constraints hold, min slack {worst:.3e}, spot values match: {spots}"),
    )
}

fn envelope_ratio(p: f64, nu: f64, k: u32, n_cells: usize, dt_scale: f64) -> Result<f64, String> {
    let base = SimDefaults {
        n_cells,
        stop_fraction: 0.0,
        rows: Some(4000),
        ..SimDefaults::default()
    };
    let (config, _) = base.flow_config(p, nu, k).map_err(|e| e.to_string())?;
    let d = SimDefaults {
        dt: Some(config.dt * dt_scale),
        ..base
    };
    let (config, traj) = simulate_mode(p, nu, k, &d).map_err(|e| e.to_string())?;
    if let Some(e) = traj.failure {
        return Err(e.to_string());
    }
    let consts = compute_constants(p).unwrap();
    let env = envelope_checks(&traj.ledger, &config, &consts, 1e-4).map_err(|e| e.to_string())?;
    Ok(env.phi_ratio_max)
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [1.0, 2.0] {
        for nu in [1e-2, 1e-3] {
            for k in [1, 2] {
                let base = envelope_ratio(p, nu, k, 512, 1.0)?;
                let fine = envelope_ratio(p, nu, k, 1024, 0.5)?;
                let pass = base <= 1.0 + 1e-4 || (fine <= 1.0 + 1e-4 && fine < base);
                ok &= pass;
                detail.push(format!("({p},{nu:e},{k}) {base:.6}/{fine:.6}"));
            }
        }
    }
    check(ok, format!("max ratio baseline/refined: {}", detail.join(" ")))
}

const SCALING_NU: [f64; 5] = [1e-3, 3e-4, 1e-4, 3e-5, 1e-5];

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (p, target, tol) in [(1.0, 1.0 / 3.0, 0.05), (2.0, 0.5, 0.08)] {
        let plan: Vec<_> = SCALING_NU.iter().map(|&nu| (p, nu, 1)).collect();
        let res = run_sweep(&plan, &SimDefaults::default(), Execution::default()).map_err(|e| e.to_string())?;
        if res.failures() > 0 {
            return Err(format!("p={p}: {}", res.summary()));
        }
        let fit = scaling_exponent(&res.rate_points(p, 1)).map_err(|e| e.to_string())?;
        ok &= (fit.slope - target).abs() <= tol;
        detail.push(format!("p={p}: slope {:.4} ± {:.4} (target {target:.4} ± {tol})", fit.slope, fit.stderr));
    }
    check(ok, detail.join("; "))
}

/// Same p = 2 sweep with the early-time window, for the record.
fn early_window_slope() -> String {
    let plan: Vec<_> = SCALING_NU.iter().map(|&nu| (2.0, nu, 1)).collect();
    let d = SimDefaults {
        window: DEFAULT_FIT_WINDOW,
        stop_fraction: 1e-4,
        ..SimDefaults::default()
    };
    match run_sweep(&plan, &d, Execution::default())
        .ok()
        .and_then(|r| scaling_exponent(&r.rate_points(2.0, 1)).ok())
    {
        Some(fit) => format!("p=2 slope over the 0.5..1e-3 window: {:.4} ± {:.4}", fit.slope, fit.stderr),
        None => "p=2 early-window fit unavailable".into(),
    }
}

fn criterion_8() -> Outcome {
    let plan = [(1.0, 1e-4, 1), (1.0, 1e-4, 2), (1.0, 1e-4, 4)];
    let res = run_sweep(&plan, &SimDefaults::default(), Execution::default()).map_err(|e| e.to_string())?;
    let fits: Vec<(f64, f64)> = res
        .rows
        .iter()
        .map(|r| (r.lambda_fit.unwrap_or(f64::NAN), r.lambda_fit_stderr.unwrap_or(f64::NAN)))
        .collect();
    let ok = fits
        .windows(2)
        .all(|w| w[1].0 >= w[0].0 - (w[0].1 + w[1].1));
    let detail = res
        .rows
        .iter()
        .zip(&fits)
        .map(|(r, (l, s))| format!("k={}: {l:.4e} ± {s:.1e}", r.k))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, detail)
}

fn criterion_9() -> Outcome {
    let (p, nu) = (2.0, 1e-3);
    let consts = compute_constants(p).unwrap();
    let t_ln = rates_and_times(&consts, nu, 1).unwrap().t_nu_k_ln;
    let d = SimDefaults {
        n_cells: 256,
        t_max: Some(t_ln),
        rows: Some(2000),
        stop_fraction: 0.0,
        ..SimDefaults::default()
    };
    let (config, traj) = simulate_mode(p, nu, 1, &d).map_err(|e| e.to_string())?;
    if let Some(e) = traj.failure {
        return Err(e.to_string());
    }
    let margin = gronwall_bound_check(&traj.ledger, nu, &consts).map_err(|e| e.to_string())?;
    let reached = traj.state.t;
    check(
        margin.holds() && reached >= t_ln - config.dt,
        format!(
            "T_ln = {t_ln:.1}, reached t = {reached:.1}, {} rows, min margin {:.4e} at t = {:.1}",
            traj.ledger.len(),
            margin.min_margin,
            margin.argmin_t
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_vortexmix"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&status.stderr).trim().to_string())
    }
}

fn same_bytes(a: &Path, b: &Path) -> Result<bool, String> {
    let read = |p: &Path| fs::read(p).map_err(|e| format!("{}: {e}", p.display()));
    Ok(read(a)? == read(b)?)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = |name: &str| dir.path().join(name);
    let mut ok = true;
    for run in ["a", "b"] {
        let o = out(&format!("sweep_{run}"));
        run_cli(&[
            "sweep",
            "--plan",
            "1:1e-3:1,2:1e-3:1,1:1e-3:2",
            "--cells",
            "512",
            "--out",
            o.to_str().unwrap(),
        ])?;
        let o = out(&format!("lemmas_{run}"));
        run_cli(&["verify-lemmas", "--p", "2", "--seed", "0", "--out", o.to_str().unwrap()])?;
    }
    let mut detail = Vec::new();
    for (a, b) in [
        ("sweep_a/sweep.csv", "sweep_b/sweep.csv"),
        ("lemmas_a/lemma_reports.csv", "lemmas_b/lemma_reports.csv"),
        ("lemmas_a/lemma_summary.csv", "lemmas_b/lemma_summary.csv"),
    ] {
        let same = same_bytes(&out(a), &out(b))?;
        ok &= same;
        detail.push(format!("{}: {}", a.split('/').nth(1).unwrap(), if same { "identical" } else { "DIFFERENT" }));
    }
    // the sequential and parallel paths agree as well
    let plan = [(1.0, 1e-3, 1), (1.0, 1e-3, 2)];
    let d = SimDefaults {
        n_cells: 512,
        ..SimDefaults::default()
    };
    let seq = run_sweep(&plan, &d, Execution::Sequential).map_err(|e| e.to_string())?;
    let par = run_sweep(&plan, &d, Execution::default()).map_err(|e| e.to_string())?;
    let same = seq.to_csv() == par.to_csv();
    ok &= same;
    detail.push(format!("sequential vs default execution: {}", if same { "identical" } else { "DIFFERENT" }));
    check(ok, detail.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("heat-mode oracle", criterion_1),
        ("sup-norm heat decay", criterion_2),
        ("energy balances", criterion_3),
        ("lemma suite", criterion_4),
        ("constants and constraints", criterion_5),
        ("phi envelope", criterion_6),
        ("scaling exponent", criterion_7),
        ("k-monotonicity", criterion_8),
        ("gronwall bound", criterion_9),
        ("determinism", criterion_10),
    ];
    let filter: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} {name}: PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} {name}: FAIL ({secs:.1}s) {detail}");
            }
        }
        if n == 7 {
            println!("             note: {}", early_window_slope());
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
