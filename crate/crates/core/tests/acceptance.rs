//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use fracsync_core::analysis::{classify_error, proposition_audit, strictly_growing, Verdict};
use fracsync_core::cipher::{transmit, Codec, CipherSession, KeySource};
use fracsync_core::coupling::{
    cancellation_check, closed_loop_of, simulate_coupled, simulate_diagonal, CouplingScheme,
    GainVariant, Mode, Scenario, ScenarioName, Vec3,
};
use fracsync_core::systems::registry_lookup;
use fracsync_core::{abm_solve, mittag_leffler, FractionalOrders, SolverConfig, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.detail.push_str(&format!("; runtime {:.2}s", elapsed.as_secs_f64()));
    if let Some(limit) = limit {
        if elapsed > limit {
            o.pass = false;
            o.detail.push_str(&format!(" exceeds {}s", limit.as_secs_f64()));
        }
    }
    o
}

fn max_abs_error_vs(traj: &Trajectory, exact: impl Fn(f64) -> f64) -> f64 {
    traj.times()
        .iter()
        .zip(traj.component(0))
        .map(|(t, x)| (x - exact(*t)).abs())
        .fold(0.0, f64::max)
}

fn classical_reduction() -> Outcome {
    timed(Some(Duration::from_secs(1)), || {
        let orders = FractionalOrders::uniform(1.0, 1).unwrap();
        let cfg = SolverConfig::from_horizon(0.01, 5.0).unwrap();
        let traj = abm_solve(|_t, x, out| out[0] = -x[0], &orders, &[1.0], &cfg).unwrap();
        let err = max_abs_error_vs(&traj, |t| (-t).exp());
        outcome(err <= 1e-3, format!("max |x - e^-t| = {err:.3e} (limit 1e-3)"))
    })
}

fn mittag_leffler_oracle() -> Outcome {
    timed(Some(Duration::from_secs(10)), || {
        let mut pass = true;
        let mut parts = Vec::new();
        for alpha in [0.5, 0.9] {
            let orders = FractionalOrders::uniform(alpha, 1).unwrap();
            let errs: Vec<f64> = [0.005, 0.0025, 0.00125, 0.000625]
                .iter()
                .map(|h| {
                    let cfg = SolverConfig::from_horizon(*h, 2.0).unwrap();
                    let traj = abm_solve(|_t, x, out| out[0] = -x[0], &orders, &[1.0], &cfg).unwrap();
                    max_abs_error_vs(&traj, |t| mittag_leffler(alpha, -t.powf(alpha)).unwrap())
                })
                .collect();
            let monotone = errs.windows(2).all(|w| w[1] < w[0]);
            pass &= errs[0] <= 1e-2 && monotone;
            parts.push(format!(
                "alpha {alpha}: errors {} (monotone {monotone})",
                errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" > ")
            ));
        }
        outcome(pass, parts.join("; "))
    })
}

fn relative_deviation(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn controller_algebra() -> Outcome {
    timed(None, || {
        let cfg = SolverConfig::from_horizon(0.001, 2.0).unwrap();
        let (d0, r0) = ([0.01; 3], [0.5; 3]);
        let mut pass = true;
        let mut parts = Vec::new();
        for name in ScenarioName::ALL {
            let gains = match name.scenario {
                Scenario::TT => GainVariant::Corrected,
                Scenario::RT => GainVariant::Paper,
            };
            let scheme = CouplingScheme::with_presets(name, gains);
            let run = simulate_coupled(&scheme, &d0, &r0, &cfg).unwrap();
            let diag = simulate_diagonal(&closed_loop_of(&scheme), &scheme.error(&d0, &r0), &cfg).unwrap();
            let rows = run.error.len().min(diag.len());
            let worst = (0..rows)
                .flat_map(|j| (0..3).map(move |i| (j, i)))
                .map(|(j, i)| relative_deviation(run.error.row(j)[i], diag.row(j)[i]))
                .fold(0.0, f64::max);
            let ok = worst <= 1e-6;
            pass &= ok;
            parts.push(format!(
                "{name}/{}: max rel dev {worst:.2e} over {rows} rows (coupled {}, diagonal {})",
                gains.name(),
                run.error.status(),
                diag.status()
            ));
        }
        outcome(pass, format!("{} (limit 1e-6)", parts.join("; ")))
    })
}

fn sample_states(seed: u64) -> Vec<(Vec3, Vec3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = || [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(0.0..20.0)];
    let mut samples: Vec<(Vec3, Vec3)> = (0..200).map(|_| (v(), v())).collect();
    // drive states along a T-system orbit, response nearby
    let sys = registry_lookup("t", &Default::default()).unwrap();
    let f = sys.field().clone();
    let cfg = SolverConfig::from_horizon(0.01, 20.0).unwrap();
    let orbit = abm_solve(move |t, x, out| f(t, x, out), &sys.default_orders, &[0.01; 3], &cfg).unwrap();
    for j in (0..orbit.len()).step_by(10) {
        let d = orbit.row(j);
        let r = [0, 1, 2].map(|i| d[i] + rng.gen_range(-1.0..1.0));
        samples.push(([d[0], d[1], d[2]], r));
    }
    samples
}

fn row_one_discrepancy() -> Outcome {
    timed(None, || {
        let samples = sample_states(11);
        let tt = "tt-sync".parse().unwrap();
        let paper = cancellation_check(&CouplingScheme::with_presets(tt, GainVariant::Paper), &samples);
        let corrected = cancellation_check(&CouplingScheme::with_presets(tt, GainVariant::Corrected), &samples);
        let pass = paper.max_residual[0] > 1e-12 && corrected.is_exact(1e-12);
        outcome(
            pass,
            format!(
                "paper residual {:?}, corrected residual {:?} over {} states",
                paper.max_residual.map(|r| format!("{r:.2e}")),
                corrected.max_residual.map(|r| format!("{r:.2e}")),
                paper.samples
            ),
        )
    })
}

fn proposition_audit_check() -> Outcome {
    timed(None, || {
        let cfg = SolverConfig::from_horizon(0.005, 2.0).unwrap();
        let mut pass = true;
        let mut parts = Vec::new();
        for name in ["tt-sync", "rt-sync"] {
            let scheme = CouplingScheme::with_presets(name.parse().unwrap(), GainVariant::Paper);
            let report = proposition_audit(&scheme);
            let closed = closed_loop_of(&scheme);
            let traj = simulate_diagonal(&closed, &[1.0; 3], &cfg).unwrap();
            let c = classify_error(&traj, 1e-3, 0.25).unwrap();
            let growing = strictly_growing(&traj) && c.tail_sup_norm > 1.0;
            pass &= report.overall == Verdict::Unstable && growing;
            parts.push(format!(
                "{name} lambda {:?}: audit {}, tail sup {:.3e} ({}), strictly growing {growing}",
                closed.lambda, report.overall, c.tail_sup_norm, c.verdict
            ));
        }
        outcome(pass, parts.join("; "))
    })
}

fn stabilized_synchronization() -> Outcome {
    timed(Some(Duration::from_secs(60)), || {
        let cfg = SolverConfig::from_horizon(0.005, 20.0).unwrap();
        let mut pass = true;
        let mut parts = Vec::new();
        for name in ScenarioName::ALL {
            let scheme = CouplingScheme::with_presets(name, GainVariant::Stabilized([1.0; 3]));
            let run = simulate_coupled(&scheme, &[0.01; 3], &[0.5; 3], &cfg).unwrap();
            let c = classify_error(&run.error, 1e-3, 0.25).unwrap();
            pass &= c.tail_sup_norm < 1e-3 && run.error.is_completed();
            parts.push(format!("{name}: tail sup {:.3e} ({})", c.tail_sup_norm, c.verdict));
        }
        outcome(pass, format!("{} (limit 1e-3)", parts.join("; ")))
    })
}

fn chaos_proxies() -> Outcome {
    timed(None, || {
        let sys = registry_lookup("t", &Default::default()).unwrap();
        let cfg = SolverConfig::from_horizon(0.01, 100.0).unwrap();
        let solve = |x0: [f64; 3]| {
            let f = sys.field().clone();
            abm_solve(move |t, x, out| f(t, x, out), &sys.default_orders, &x0, &cfg).unwrap()
        };
        let base = solve([0.01; 3]);
        let sup = base.row_norms().into_iter().fold(0.0, f64::max);
        let tail_start = base.len() - base.len() / 10;
        let change = (0..3)
            .map(|i| {
                let tail = &base.component(i)[tail_start..];
                let hi = tail.iter().copied().fold(f64::MIN, f64::max);
                let lo = tail.iter().copied().fold(f64::MAX, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max);
        let perturbed = solve([0.01 + 1e-8, 0.01, 0.01]);
        let separation = (0..base.len().min(perturbed.len()))
            .map(|j| {
                base.row(j)
                    .iter()
                    .zip(perturbed.row(j))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let bounded = base.is_completed() && sup <= 1e3;
        let pass = bounded && change > 1e-3 && separation >= 1e-2;
        outcome(
            pass,
            format!(
                "status {}, sup-norm {sup:.3} (limit 1e3), tail change {change:.3e} (limit 1e-3), \
                 separation {separation:.3e} (limit 1e-2), final state {:?}",
                base.status(),
                base.last().iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
            ),
        )
    })
}

const TABLE_RESIDUES: [u64; 10] = [18, 18, 29, 29, 20, 20, 21, 6, 6, 30];
const TABLE_CIPHERTEXT: [u64; 10] = [0, 33, 15, 15, 9, 9, 14, 19, 17, 22];

fn cipher_tables() -> Outcome {
    timed(None, || {
        let s = CipherSession::new(Codec::Paper36, KeySource::Explicit(TABLE_RESIDUES.to_vec()));
        let c = s.encrypt("Hello Oscar").unwrap();
        let p = s.decrypt(&TABLE_CIPHERTEXT).unwrap();
        outcome(
            c == TABLE_CIPHERTEXT && p == "hellooscar",
            format!("ciphertext {c:?}, plaintext {p:?}"),
        )
    })
}

fn random_message(rng: &mut ChaCha8Rng, codec: Codec) -> String {
    let len = rng.gen_range(0..48);
    match codec {
        Codec::Ascii128 => (0..len).map(|_| rng.gen_range(0u8..128) as char).collect(),
        _ => {
            const POOL: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,!?-";
            (0..len).map(|_| POOL[rng.gen_range(0..POOL.len())] as char).collect()
        }
    }
}

fn random_source(rng: &mut ChaCha8Rng, count: usize) -> KeySource {
    match rng.gen_range(0..3) {
        0 => KeySource::Explicit((0..count).map(|_| rng.gen()).collect()),
        1 => KeySource::SeededPrng(rng.gen()),
        _ => {
            let t0 = rng.gen_range(0..50);
            KeySource::Trajectory {
                z: (0..t0 + count + 1).map(|_| rng.gen_range(-60.0..60.0)).collect(),
                t0_index: t0,
                scale: 1e6,
            }
        }
    }
}

fn cipher_properties() -> Outcome {
    timed(None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut roundtrip_failures = 0;
        let mut residue_failures = 0;
        let trials = 1000;
        for trial in 0..trials {
            let codec = Codec::ALL[trial % 3];
            let message = random_message(&mut rng, codec);
            let source = random_source(&mut rng, message.chars().count());
            let session = CipherSession::new(codec, source);
            let normalized = session.normalize(&message);
            let ciphertext = session.encrypt(&message).unwrap();
            if session.decrypt(&ciphertext).unwrap() != normalized {
                roundtrip_failures += 1;
            }
            let m = codec.modulus();
            let shifted: Vec<u64> = session
                .keys
                .keys(ciphertext.len())
                .unwrap()
                .into_iter()
                .map(|k| k + m * rng.gen_range(0..1_000_000))
                .collect();
            let other = CipherSession::new(codec, KeySource::Explicit(shifted));
            if other.encrypt(&message).unwrap() != ciphertext {
                residue_failures += 1;
            }
        }
        outcome(
            roundtrip_failures == 0 && residue_failures == 0,
            format!("{trials} trials: {roundtrip_failures} roundtrip failures, {residue_failures} residue-sufficiency failures"),
        )
    })
}

fn secure_communication_demo() -> Outcome {
    timed(None, || {
        let scheme = CouplingScheme::with_presets("tt-sync".parse().unwrap(), GainVariant::Stabilized([1.0; 3]));
        assert_eq!(scheme.mode(), Mode::Sync);
        let cfg = SolverConfig::from_horizon(0.005, 7.0).unwrap();
        let drive = [0.01; 3];
        let message = "Hello Oscar";
        let t0 = 1300;
        let mut pass = true;
        let mut parts = Vec::new();
        for (label, response) in [("near-synchronized", [0.01 + 1e-9; 3]), ("far from synchronized", [0.5; 3])] {
            let run = simulate_coupled(&scheme, &drive, &response, &cfg).unwrap();
            let (z1, z2) = (run.drive.component(2), run.response.component(2));
            let t = transmit(Codec::Paper36, message, &z1, &z2, t0, 1e6).unwrap();
            // Decrypt with the receiver's keys regardless, to see what a
            // silent receiver would have produced.
            let forced = CipherSession::new(
                Codec::Paper36,
                KeySource::Trajectory { z: z2.clone(), t0_index: t0, scale: 1e6 },
            )
            .decrypt(&t.ciphertext)
            .unwrap();
            let corrupted: Vec<usize> = forced
                .chars()
                .zip("hellooscar".chars())
                .enumerate()
                .filter(|(_, (a, b))| a != b)
                .map(|(i, _)| i)
                .collect();
            let ok = if t.agreement.passes() {
                t.recovered.as_deref() == Some("hellooscar")
            } else {
                t.recovered.is_none() && t.agreement.mismatched == corrupted
            };
            pass &= ok;
            parts.push(format!(
                "{label}: mismatched keys {:?}, min margin {:.3e}, recovered {:?}",
                t.agreement.mismatched, t.agreement.min_margin, t.recovered
            ));
        }
        outcome(pass, parts.join("; "))
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("classical reduction", classical_reduction),
        ("Mittag-Leffler oracle", mittag_leffler_oracle),
        ("controller-algebra equivalence", controller_algebra),
        ("TT paper-gain row-1 discrepancy detected", row_one_discrepancy),
        ("proposition audit", proposition_audit_check),
        ("stabilized synchronization", stabilized_synchronization),
        ("T-system chaos proxies", chaos_proxies),
        ("cipher tables", cipher_tables),
        ("cipher properties", cipher_properties),
        ("end-to-end secure communication", secure_communication_demo),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
