//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs sequentially without the libtest harness so that the timings are
//! not distorted by other tests.

use std::time::{Duration, Instant};

use qbss::config::Scenario;
use qbss::ergotropy::ergotropy;
use qbss::linalg::{kron, ComplexMatrix, C64};
use qbss::liouvillian::{devectorize, vectorize, Superoperator};
use qbss::model::{fermi_occupation, CouplingMode, SystemConfig};
use qbss::oracle::{evolve, haar_unitary, random_pure_state, random_unitary_extraction_bound, IntegrationSpec};
use qbss::steadystate::{steady_state, trace_distance, validate_density, SteadyStateOptions};
use qbss::sweep::{run_point, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, &'static str, Option<Duration>, fn() -> Check);

fn err(e: qbss::Error) -> String {
    e.to_string()
}

fn w_of(cfg: &SystemConfig) -> Result<f64, String> {
    let p = run_point(cfg).map_err(err)?;
    p.normalized.ok_or_else(|| format!("W undefined for {cfg:?}"))
}

fn curve(values: &[f64], mut cfg_at: impl FnMut(f64) -> SystemConfig) -> Result<Vec<f64>, String> {
    values.iter().map(|&v| w_of(&cfg_at(v))).collect()
}

/// Adjacent pairs that fall by more than `slack`.
fn drops(ws: &[f64], slack: f64) -> usize {
    ws.windows(2).filter(|p| p[1] < p[0] - slack).count()
}

fn rises(ws: &[f64], slack: f64) -> usize {
    ws.windows(2).filter(|p| p[1] > p[0] + slack).count()
}

fn ac1_single_qubit_law() -> Check {
    let mus = Grid { start: -5.0, stop: 15.0, points: 20 }.values();
    let ts = Grid { start: 0.1, stop: 10.0, points: 20 }.values();
    let (mut dp, mut dw) = (0.0f64, 0.0f64);
    for mode in [CouplingMode::EquilibriumCollective, CouplingMode::NonEquilibriumIndividual] {
        for &mu in &mus {
            for &t in &ts {
                let cfg = Scenario { n_qubits: 1, mode, mu, temperature: t, ..Scenario::default() }.to_config().map_err(err)?;
                let p = run_point(&cfg).map_err(err)?;
                let n = fermi_occupation(1.0, mu, t).map_err(err)?;
                let pe = p.battery.as_ref().ok_or("no battery state")?.rho_battery.populations()[0];
                dp = dp.max((pe - n).abs());
                dw = dw.max((p.normalized.ok_or("W undefined")? - (2.0 * n - 1.0).max(0.0)).abs());
            }
        }
    }
    Ok((dp <= 1e-10 && dw <= 1e-10, format!("max |p_e - n| = {dp:.2e}, max |W - max(0, 2n-1)| = {dw:.2e}")))
}

fn ac2_oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut certified = 0;
    let mut worst = 0.0f64;
    let mut draws = 0;
    while certified < 24 && draws < 60 {
        draws += 1;
        let n = rng.random_range(1..=3usize);
        let mode = if rng.random_bool(0.5) {
            CouplingMode::EquilibriumCollective
        } else {
            CouplingMode::NonEquilibriumIndividual
        };
        let s = Scenario {
            n_qubits: n,
            mode,
            mu: rng.random_range(0.0..8.0),
            delta_mu: if mode == CouplingMode::NonEquilibriumIndividual { rng.random_range(0.0..6.0) } else { 0.0 },
            temperature: rng.random_range(0.5..4.0),
            coupling_j: rng.random_range(0.5..2.0),
            ..Scenario::default()
        };
        let cfg = s.to_config().map_err(err)?;
        let l = Superoperator::build(&cfg).map_err(err)?;
        let ss = match steady_state(&l, &SteadyStateOptions::default()) {
            Ok(r) => r,
            Err(qbss::Error::DegenerateSteadyState { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let rho0 = random_pure_state(cfg.hilbert_dim(), &mut rng).map_err(err)?;
        let out = evolve(&rho0, &l, &IntegrationSpec::for_config(&cfg).map_err(err)?).map_err(err)?;
        if !out.converged {
            return Ok((false, format!("integration did not converge for {s:?}")));
        }
        worst = worst.max(trace_distance(out.state.matrix(), ss.state.matrix()).map_err(err)?);
        certified += 1;
    }
    Ok((
        certified >= 20 && worst <= 1e-6,
        format!("{certified} certified of {draws} draws, max trace distance {worst:.2e}"),
    ))
}

fn ac3_equilibrium_mu_trend() -> Check {
    let mus = Grid { start: 0.0, stop: 20.0, points: 81 }.values();
    let mut total_drops = 0;
    let mut w0_max = 0.0f64;
    for t in [0.5, 1.0, 2.0, 4.0] {
        let ws = curve(&mus, |mu| SystemConfig::equilibrium(3, mu, t))?;
        total_drops += drops(&ws, 1e-9);
        w0_max = w0_max.max(ws[0]);
    }
    let cold = w_of(&SystemConfig::equilibrium(3, 20.0, 0.1))?;
    Ok((
        total_drops == 0 && w0_max < 0.01 && cold > 0.95,
        format!("decreases {total_drops}, max W(mu=0) {w0_max:.2e}, W(mu=20, T=0.1) {cold:.6}"),
    ))
}

fn ac4_bias_plateau() -> Check {
    let dmus = Grid { start: 0.0, stop: 12.0, points: 49 }.values();
    let mut ok = true;
    let mut notes = Vec::new();
    for mu in [1.0, 2.0, 4.0, 8.0] {
        let ws = curve(&dmus, |d| SystemConfig::biased(3, mu, d, 1.0))?;
        let w10 = ws[40];
        let w12 = ws[48];
        let d = drops(&ws, 1e-9);
        let plateau = (w12 - w10).abs();
        ok &= d == 0 && plateau < 0.02;
        if mu == 8.0 {
            ok &= (ws[0] - w12).abs() <= 0.05;
            notes.push(format!("mu=8: W(0)={:.4} W(12)={:.4}", ws[0], w12));
        }
        notes.push(format!("mu={mu}: decreases {d}, |W(12)-W(10)| {plateau:.2e}"));
    }
    Ok((ok, notes.join("; ")))
}

fn ac5_coupling_trend() -> Check {
    let js = Grid { start: 0.0, stop: 5.0, points: 51 }.values();
    let ws = curve(&js, |j| SystemConfig::biased(3, 1.0, 2.0, 1.0).with_coupling(j))?;
    let non_decreasing = ws.len() - 1 - drops(&ws, 1e-9);
    let frac = non_decreasing as f64 / (ws.len() - 1) as f64;
    let (w0, w_small, w1, w_last) = (ws[0], ws[1], ws[10], ws[50]);
    let ok = w_last > w0 && frac >= 0.9 && w1 >= 2.0 * w0 && w1 >= 2.0 * w_small;
    Ok((
        ok,
        format!("W(0)={w0:.2e} W(0.1)={w_small:.4} W(1)={w1:.4} W(5)={w_last:.4}, non-decreasing steps {frac:.2}"),
    ))
}

fn ac6_temperature_trend() -> Check {
    let ts = Grid { start: 0.1, stop: 10.0, points: 100 }.values();
    let ws = curve(&ts, |t| SystemConfig::biased(3, 1.0, 2.0, t).with_coupling(1.0))?;
    let r = rises(&ws, 1e-9);
    let last = ws[ws.len() - 1];
    Ok((r == 0 && last < 0.1, format!("increases {r}, W(0.1)={:.4}, W(10)={last:.4}", ws[0])))
}

/// Smallest Δμ with W > 0.1, from a coarse scan refined by bisection.
fn threshold(n: usize) -> Result<f64, String> {
    let w = |d: f64| w_of(&SystemConfig::biased(n, 0.0, d, 1.0));
    let coarse = Grid { start: 0.0, stop: 12.0, points: 25 }.values();
    let mut prev = coarse[0];
    if w(prev)? > 0.1 {
        return Ok(0.0);
    }
    for &d in &coarse[1..] {
        if w(d)? > 0.1 {
            let (mut lo, mut hi) = (prev, d);
            for _ in 0..12 {
                let mid = 0.5 * (lo + hi);
                if w(mid)? > 0.1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
        prev = d;
    }
    Err(format!("W never exceeds 0.1 for N={n}"))
}

fn ac7_cells_threshold() -> Check {
    let th: Vec<f64> = (2..=5).map(threshold).collect::<Result<_, _>>()?;
    let ok = th.windows(2).all(|p| p[1] < p[0]);
    let listing: Vec<String> = th.iter().zip(2..).map(|(t, n)| format!("N={n}: {t:.3}")).collect();
    Ok((ok, listing.join(", ")))
}

fn random_matrix(rng: &mut impl Rng, r: usize, c: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(r, c, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn ac8_property_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut notes = Vec::new();

    // generator identities
    let mut tp = 0.0f64;
    let mut hp = 0.0f64;
    for cfg in [
        SystemConfig::equilibrium(3, 2.0, 1.0),
        SystemConfig::biased(3, 1.0, 3.0, 0.7),
        SystemConfig::biased(4, 0.0, 4.0, 2.0),
    ] {
        let l = Superoperator::build(&cfg).map_err(err)?;
        let scale = l.matrix.frobenius_norm();
        tp = tp.max(l.trace_row().iter().map(|z| z.norm()).fold(0.0, f64::max) / scale);
        let d = cfg.hilbert_dim();
        for _ in 0..10 {
            let x = random_matrix(&mut rng, d, d);
            let lhs = l.apply(&x.adjoint()).map_err(err)?;
            let rhs = l.apply(&x).map_err(err)?.adjoint();
            hp = hp.max(lhs.max_abs_diff(&rhs) / rhs.frobenius_norm().max(1.0));
        }
    }
    notes.push(format!("trace {tp:.1e}, hermiticity {hp:.1e}"));

    // ergotropy: non-negativity and the sampled unitary bound
    let h = ComplexMatrix::from_real_diag(&[10.0, -10.0]);
    let mut neg = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let psi = random_pure_state(2, &mut rng).map_err(err)?;
        let p: f64 = rng.random_range(0.0..1.0);
        let mixed = &psi.matrix().scale_real(p) + &ComplexMatrix::identity(2).scale_real((1.0 - p) / 2.0);
        let rho = validate_density(&mixed).map_err(err)?;
        let e = ergotropy(&rho, &h).map_err(err)?.ergotropy;
        neg = neg.max(-e);
        let b = random_unitary_extraction_bound(&rho, &h, 1000, &mut rng).map_err(err)?;
        excess = excess.max(b - e);
    }
    notes.push(format!("worst -E {neg:.1e}, worst bound excess {excess:.1e}"));

    // vectorization round trip and kron associativity
    let mut vec_exact = true;
    for d in 1..=16 {
        let x = random_matrix(&mut rng, d, d);
        vec_exact &= devectorize(&vectorize(&x).map_err(err)?, d).map_err(err)? == x;
    }
    let mut assoc = 0.0f64;
    for _ in 0..50 {
        let a = random_matrix(&mut rng, 2, 3);
        let b = random_matrix(&mut rng, 3, 2);
        let c = random_matrix(&mut rng, 2, 2);
        let left = kron(&kron(&a, &b).map_err(err)?, &c).map_err(err)?;
        let right = kron(&a, &kron(&b, &c).map_err(err)?).map_err(err)?;
        assoc = assoc.max(left.max_abs_diff(&right));
    }
    notes.push(format!("vec round trip exact {vec_exact}, kron assoc {assoc:.1e}"));

    // a unitary check on the sampler itself
    let u = haar_unitary(2, &mut rng);
    let unitary = u.adjoint().matmul(&u).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12;

    let ok = tp <= 1e-11 && hp <= 1e-11 && neg <= 1e-9 && excess <= 1e-9 && vec_exact && assoc <= 1e-12 && unitary;
    Ok((ok, notes.join("; ")))
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status.lines().find_map(|l| l.strip_prefix("VmHWM:")).and_then(|v| v.split_whitespace().next()?.parse().ok())
}

fn ac9_performance() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, limit) in [(4, Duration::from_secs(1)), (5, Duration::from_secs(30)), (6, Duration::from_secs(600))] {
        let cfg = SystemConfig::biased(n, 1.0, 2.0, 1.0);
        let start = Instant::now();
        let p = run_point(&cfg).map_err(err)?;
        let took = start.elapsed();
        ok &= took < limit && p.unique;
        notes.push(format!("N={n}: {:.3} s", took.as_secs_f64()));
    }
    match peak_rss_kib() {
        Some(kib) => {
            let gib = kib as f64 / (1024.0 * 1024.0);
            ok &= gib < 8.0;
            notes.push(format!("peak RSS {gib:.2} GiB"));
        }
        None => {
            ok = false;
            notes.push("peak RSS unavailable".into());
        }
    }
    Ok((ok, notes.join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC1", "single-qubit analytic law", Some(Duration::from_secs(5)), ac1_single_qubit_law),
        ("AC2", "oracle equivalence", Some(Duration::from_secs(300)), ac2_oracle_equivalence),
        ("AC3", "equilibrium trend in mu", Some(Duration::from_secs(120)), ac3_equilibrium_mu_trend),
        ("AC4", "bias plateau", None, ac4_bias_plateau),
        ("AC5", "coupling suppression", None, ac5_coupling_trend),
        ("AC6", "temperature decay", None, ac6_temperature_trend),
        ("AC7", "cell-count threshold", None, ac7_cells_threshold),
        ("AC8", "property suite", Some(Duration::from_secs(60)), ac8_property_suite),
        ("AC9", "performance envelope", None, ac9_performance),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (pass, detail) = match result {
            Ok((pass, detail)) => (pass, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = budget.is_none_or(|b| took < b);
        let pass = pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget_note = budget.map_or(String::new(), |b| format!(" (budget {} s)", b.as_secs()));
        println!(
            "{id} {} {name}: {detail} [{:.2} s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
