//! Acceptance suite: one test per criterion, each printing a pass line
//! with the measured numbers (run with `--nocapture` to see them).
//!
//! Reference setup throughout: an 8-element half-wavelength array,
//! desired direction 45 deg, eavesdropper 70 deg, PA split 0.9/0.1,
//! unit noise variance, SNR = P_s.
//!
//! Two checks are expected to fail and are kept as stated on purpose;
//! their assertion messages explain why the targeted curve values are
//! unattainable under this model (see `criterion_2_relative_gain` and
//! `criterion_8_ber_behavior`).

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dm_secrecy::array_channel::{deg_to_rad, ArrayConfig, Scenario};
use dm_secrecy::beamformers::{
    init_an_leakage, init_precoder_leakage, optimize_precoder_fixed_an, solve_leakage,
    solve_max_sr, solve_nsp, InitKind,
};
use dm_secrecy::link_sim::{ber_sweep, BerCurve, LinkConfig};
use dm_secrecy::numeric_solvers::{gpi_solve, RatioProductProblem};
use dm_secrecy::secrecy_metrics::{
    an_coefficients, rate_at, rate_difference, PowerProfile, Precoder,
};
use dm_secrecy::{C64, CVector};

const DELTA: f64 = 1e-4;
const MAX_OUTER: usize = 50;

fn paper_scenario() -> Scenario {
    Scenario::new(
        ArrayConfig::half_wavelength(8).unwrap(),
        deg_to_rad(45.0),
        deg_to_rad(70.0),
    )
    .unwrap()
}

fn paper_power(snr_db: f64) -> PowerProfile {
    PowerProfile::from_snr_db(snr_db, 0.9, 0.1).unwrap()
}

fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    use rand_distr::StandardNormal;
    let v = CVector::from_fn(n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v.unscale(norm)
}

#[test]
fn criterion_1_method_ordering() {
    let started = Instant::now();
    let scenario = paper_scenario();
    for snr_db in [0.0, 5.0, 10.0, 15.0] {
        let p = paper_power(snr_db);
        let (max_sr, _) = solve_max_sr(&scenario, &p, InitKind::Leakage, DELTA, MAX_OUTER).unwrap();
        let leakage = solve_leakage(&scenario, &p).unwrap();
        let nsp = solve_nsp(&scenario, &p).unwrap();
        assert!(
            max_sr.secrecy_rate >= leakage.secrecy_rate - 1e-6,
            "at {snr_db} dB: max_sr {} < leakage {}",
            max_sr.secrecy_rate,
            leakage.secrecy_rate
        );
        assert!(
            max_sr.secrecy_rate >= nsp.secrecy_rate - 1e-6,
            "at {snr_db} dB: max_sr {} < nsp {}",
            max_sr.secrecy_rate,
            nsp.secrecy_rate
        );
        println!(
            "  {snr_db:5.1} dB: max_sr {:.4} >= leakage {:.4} >= nsp? {:.4}",
            max_sr.secrecy_rate, leakage.secrecy_rate, nsp.secrecy_rate
        );
    }
    assert!(started.elapsed() < Duration::from_secs(60), "runtime budget");
    println!("criterion 1 (method ordering at 0/5/10/15 dB): PASS");
}

#[test]
fn criterion_2_relative_gain_at_15db() {
    let scenario = paper_scenario();
    let p = paper_power(15.0);
    let (max_sr, _) = solve_max_sr(&scenario, &p, InitKind::Leakage, DELTA, MAX_OUTER).unwrap();
    let leakage = solve_leakage(&scenario, &p).unwrap();
    let nsp = solve_nsp(&scenario, &p).unwrap();
    let gain_nsp = max_sr.secrecy_rate / nsp.secrecy_rate;
    let gain_leakage = max_sr.secrecy_rate / leakage.secrecy_rate;
    println!(
        "  15 dB: max_sr {:.4}, leakage {:.4} (gain {:.3}), nsp {:.4} (gain {:.3})",
        max_sr.secrecy_rate, leakage.secrecy_rate, gain_leakage, nsp.secrecy_rate, gain_nsp
    );
    assert!(
        gain_nsp >= 1.10,
        "gain over nsp {gain_nsp:.4} below the 1.10 threshold"
    );
    // Known-infeasible target, asserted as stated: the closed-form leakage
    // baseline reaches {:.4} bits while NO unit-norm precoder can exceed
    // log2(1 + beta1^2 * P_s) = 4.8811 bits at 15 dB (the AN term only
    // subtracts), capping any gain over it at 1.018 < 1.05.
    let ceiling = (1.0 + 0.9 * p.total_power()).log2();
    assert!(
        gain_leakage >= 1.05,
        "gain over leakage {gain_leakage:.4} below the 1.05 threshold: the leakage \
         baseline ({:.4} bits) already sits within {:.1}% of the rate ceiling \
         log2(1+beta1^2*P_s) = {ceiling:.4} bits, so a 5% gain over it is \
         mathematically unattainable for any precoder/AN pair",
        leakage.secrecy_rate,
        100.0 * (ceiling / leakage.secrecy_rate - 1.0)
    );
    println!("criterion 2 (relative gain at 15 dB): PASS");
}

#[test]
fn criterion_3_convergence() {
    let scenario = paper_scenario();
    let p = paper_power(10.0);
    let (leak_sol, leak_trace) =
        solve_max_sr(&scenario, &p, InitKind::Leakage, DELTA, MAX_OUTER).unwrap();
    assert!(
        leak_trace.iterations() <= 6,
        "leakage init took {} outer iterations (> 6)",
        leak_trace.iterations()
    );

    let mut counts = Vec::new();
    let mut finals = Vec::new();
    for seed in 1..=20u64 {
        let (sol, trace) =
            solve_max_sr(&scenario, &p, InitKind::Random { seed }, DELTA, MAX_OUTER).unwrap();
        counts.push(trace.iterations());
        finals.push(sol.secrecy_rate);
    }
    counts.sort_unstable();
    finals.sort_by(f64::total_cmp);
    let median_count = counts[counts.len() / 2];
    let median_final = finals[finals.len() / 2];
    println!(
        "  leakage: {} iters, final {:.6}; random: median {} iters, median final {:.6}",
        leak_trace.iterations(),
        leak_sol.secrecy_rate,
        median_count,
        median_final
    );
    assert!(
        median_count >= leak_trace.iterations(),
        "random-init median {} beat the leakage count {}",
        median_count,
        leak_trace.iterations()
    );
    let rel = (median_final - leak_sol.secrecy_rate).abs() / leak_sol.secrecy_rate;
    assert!(rel < 0.02, "final rates differ by {:.2}%", 100.0 * rel);
    println!("criterion 3 (convergence speed and common limit): PASS");
}

#[test]
fn criterion_4_ais_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50 {
        let n = rng.gen_range(3..=8usize);
        let (theta_d, theta_e) = loop {
            let a = deg_to_rad(rng.gen_range(5.0..175.0));
            let b = deg_to_rad(rng.gen_range(5.0..175.0));
            if (a - b).abs() >= deg_to_rad(5.0) {
                break (a, b);
            }
        };
        let snr_db = rng.gen_range(0.0..15.0);
        let scenario =
            Scenario::new(ArrayConfig::half_wavelength(n).unwrap(), theta_d, theta_e).unwrap();
        let p = paper_power(snr_db);
        let init = if case % 2 == 0 {
            InitKind::Leakage
        } else {
            InitKind::Random { seed: case as u64 }
        };
        let (_, trace) = solve_max_sr(&scenario, &p, init, DELTA, MAX_OUTER).unwrap();
        for (i, pair) in trace.sr_per_iteration.windows(2).enumerate() {
            assert!(
                pair[1] >= pair[0] - 1e-9,
                "case {case} (N={n}, snr {snr_db:.1}): SR fell {} -> {} at iteration {}",
                pair[0],
                pair[1],
                i + 2
            );
        }
    }
    println!("criterion 4 (AIS monotone over 50 random scenarios): PASS");
}

#[test]
fn criterion_5_subproblem_oracles() {
    let started = Instant::now();

    // (a) The precoder step is the subproblem's global optimum: no random
    // unit precoder may beat it.
    let scenario = paper_scenario();
    let p = paper_power(10.0);
    let an = init_an_leakage(&scenario, &p).unwrap();
    let v_star = optimize_precoder_fixed_an(&scenario, &p, &an).unwrap();
    let best = rate_difference(&scenario, &v_star, &an, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for i in 0..10_000 {
        let v = Precoder::new(random_unit_vector(8, &mut rng)).unwrap();
        let trial = rate_difference(&scenario, &v, &an, &p).unwrap();
        assert!(
            trial <= best + 1e-9,
            "random precoder {i} beat the eigenvector step: {trial} > {best}"
        );
    }
    println!("  (a) precoder step dominates 1e4 random precoders at N=8");

    // (b) Two-element array: the stacked AN variable lives in C^2; the GPI
    // objective must be within 1% of the best of 1e5 random unit vectors.
    let scenario2 = Scenario::new(
        ArrayConfig::half_wavelength(2).unwrap(),
        deg_to_rad(45.0),
        deg_to_rad(70.0),
    )
    .unwrap();
    let v = init_precoder_leakage(&scenario2, &p).unwrap();
    let coeff = an_coefficients(&scenario2, &v, &p).unwrap();
    let problem =
        RatioProductProblem::kron_block(coeff.b_d, coeff.b_e, coeff.c_e, coeff.c_d, 1).unwrap();
    let w0 = init_an_leakage(&scenario2, &p).unwrap().stacked_columns();
    let report = gpi_solve(&problem, &w0, 1e-10, 1000).unwrap();
    let mut sampled_best = 0.0f64;
    for _ in 0..100_000 {
        let w = random_unit_vector(2, &mut rng);
        sampled_best = sampled_best.max(problem.objective(&w).unwrap());
    }
    println!(
        "  (b) GPI objective {:.8} vs sampled best {:.8}",
        report.objective, sampled_best
    );
    assert!(
        report.objective >= 0.99 * sampled_best,
        "GPI {} below 99% of the sampled maximum {sampled_best}",
        report.objective
    );

    assert!(started.elapsed() < Duration::from_secs(120), "runtime budget");
    println!("criterion 5 (subproblem oracles): PASS");
}

#[test]
fn criterion_6_nsp_exactness() {
    let scenario = paper_scenario();
    let p = paper_power(10.0);
    let solution = solve_nsp(&scenario, &p).unwrap();
    let leak = (solution.an.matrix().adjoint() * scenario.h_d().as_vector()).norm();
    assert!(leak < 1e-12, "AN leaks into the desired direction: {leak}");
    let r_d = rate_at(
        scenario.array(),
        scenario.theta_d(),
        &solution.precoder,
        &solution.an,
        &p,
    )
    .unwrap();
    let expected = (1.0 + 0.9 * p.total_power()).log2();
    assert!(
        (r_d - expected).abs() < 1e-10,
        "desired-direction rate {r_d} != AN-free bound {expected}"
    );
    println!("criterion 6 (NSP exactness: leak {leak:.2e}): PASS");
}

#[test]
fn criterion_7_kron_fast_path() {
    // Objectives must agree between the block-structured and dense paths.
    let p = paper_power(10.0);
    for n in [3usize, 4, 5] {
        let scenario = Scenario::new(
            ArrayConfig::half_wavelength(n).unwrap(),
            deg_to_rad(45.0),
            deg_to_rad(70.0),
        )
        .unwrap();
        let v = init_precoder_leakage(&scenario, &p).unwrap();
        let coeff = an_coefficients(&scenario, &v, &p).unwrap();
        let kron =
            RatioProductProblem::kron_block(coeff.b_d, coeff.b_e, coeff.c_e, coeff.c_d, n - 1)
                .unwrap();
        let dense = kron.materialized();
        let w0 = init_an_leakage(&scenario, &p).unwrap().stacked_columns();
        let kron_report = gpi_solve(&kron, &w0, 1e-8, 500).unwrap();
        let dense_report = gpi_solve(&dense, &w0, 1e-8, 500).unwrap();
        assert!(
            (kron_report.objective - dense_report.objective).abs()
                <= 1e-8 * dense_report.objective.max(1.0),
            "N={n}: kron {} vs dense {}",
            kron_report.objective,
            dense_report.objective
        );
        println!(
            "  N={n}: block {:.10} == dense {:.10}",
            kron_report.objective, dense_report.objective
        );
    }

    // At N=8 (56-dimensional variable) the block path must be measurably
    // faster than factorizing the dense operator every iteration.
    let scenario = paper_scenario();
    let v = init_precoder_leakage(&scenario, &p).unwrap();
    let coeff = an_coefficients(&scenario, &v, &p).unwrap();
    let kron =
        RatioProductProblem::kron_block(coeff.b_d, coeff.b_e, coeff.c_e, coeff.c_d, 7).unwrap();
    let dense = kron.materialized();
    let w0 = init_an_leakage(&scenario, &p).unwrap().stacked_columns();
    let time_path = |problem: &RatioProductProblem| {
        let mut best = Duration::MAX;
        for _ in 0..3 {
            let t = Instant::now();
            let report = gpi_solve(problem, &w0, 1e-8, 500).unwrap();
            best = best.min(t.elapsed());
            std::hint::black_box(report);
        }
        best
    };
    let kron_time = time_path(&kron);
    let dense_time = time_path(&dense);
    println!("  N=8 timing: block {kron_time:?} vs dense {dense_time:?}");
    assert!(
        kron_time < dense_time,
        "block path ({kron_time:?}) not faster than dense ({dense_time:?})"
    );
    println!("criterion 7 (Kronecker fast path): PASS");
}

#[test]
fn criterion_8_ber_behavior() {
    let started = Instant::now();
    let scenario = paper_scenario();
    let p = paper_power(10.0);
    let grid_deg: Vec<f64> = (30..=90).map(|d| d as f64).collect();
    let cfg = LinkConfig {
        num_symbols: 20_000,
        seed: 1,
        snr_db: 10.0,
        angle_grid: grid_deg.iter().map(|d| deg_to_rad(*d)).collect(),
    };

    let (max_sr, _) = solve_max_sr(&scenario, &p, InitKind::Leakage, DELTA, MAX_OUTER).unwrap();
    let leakage = solve_leakage(&scenario, &p).unwrap();
    let nsp = solve_nsp(&scenario, &p).unwrap();
    let curves: Vec<BerCurve> = [&max_sr, &leakage, &nsp]
        .iter()
        .map(|sol| ber_sweep(sol, &scenario, &p, &cfg).unwrap())
        .collect();

    // (a) Every method bottoms out within 1 degree of the desired 45.
    for curve in &curves {
        let (idx, _) = curve.argmin();
        let deg = grid_deg[idx];
        println!(
            "  {}: min BER {:.2e} at {deg} deg",
            curve.method_tag, curve.ber[idx]
        );
        assert!(
            (deg - 45.0).abs() <= 1.0,
            "{}: minimum BER at {deg} deg, not within 1 deg of 45",
            curve.method_tag
        );
    }

    // (b) Along the eavesdropper the AN-concentrating solution must be
    // harder to intercept than the null-space baseline.
    let at70 = |curve: &BerCurve| curve.ber[grid_deg.iter().position(|d| *d == 70.0).unwrap()];
    let nsp_70 = at70(&curves[2]);
    let max_sr_70 = at70(&curves[0]);
    println!("  70 deg: nsp {nsp_70:.3} vs max_sr {max_sr_70:.3}");
    assert!(
        nsp_70 < max_sr_70,
        "expected NSP ({nsp_70}) below max_sr ({max_sr_70}) at 70 deg"
    );

    // (c) Known-infeasible target, asserted as stated: with beta2^2 P_s =
    // sigma^2 at 10 dB the AN-to-noise ratio is bounded by 1, so on the
    // main-lobe shoulder (|theta-45| in [15, 18] deg, still inside the
    // 16.8..62.8 deg lobe) the coherently equalized BER stays below
    // Q(|g|/sqrt(2)) ~ 0.17 < 0.3 for any AN design.
    let mut worst = f64::INFINITY;
    let mut worst_deg = f64::NAN;
    for (deg, ber) in grid_deg.iter().zip(curves[0].ber.iter()) {
        if (deg - 45.0).abs() >= 15.0 && *ber < worst {
            worst = *ber;
            worst_deg = *deg;
        }
    }
    println!("  off-axis floor: BER {worst:.3} at {worst_deg} deg");
    assert!(started.elapsed() < Duration::from_secs(300), "runtime budget");
    assert!(
        worst > 0.3,
        "max_sr BER {worst:.3} at {worst_deg} deg (|angle-45| >= 15): the genie-aided \
         receiver bounds the off-axis BER by Q(|g|/sigma_tot) with sigma_tot^2 <= 2*sigma^2 \
         at 10 dB, which cannot exceed 0.3 on the main-lobe shoulder of an 8-element \
         half-wavelength array; a 0.3+ floor there requires a receiver that cannot \
         equalize the direction-dependent complex gain"
    );
    println!("criterion 8 (BER behavior): PASS");
}

#[test]
fn criterion_9_cli_determinism() {
    let binary = env!("CARGO_BIN_EXE_dm-secrecy");
    let config: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.json");
    let dir = tempfile::tempdir().unwrap();

    let strip_timestamp = |text: &str| -> String {
        text.lines()
            .map(|line| match line.rfind(',') {
                Some(at) => &line[..at],
                None => line,
            })
            .collect::<Vec<_>>()
            .join("\n")
    };

    for subcommand in ["sweep-snr", "converge", "ber-sweep"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out_path = dir.path().join(format!("{subcommand}-{run}.csv"));
            let status = Command::new(binary)
                .args([
                    subcommand,
                    "--config",
                    config.to_str().unwrap(),
                    "--seed",
                    "11",
                    "--out",
                    out_path.to_str().unwrap(),
                    "--quiet",
                ])
                .status()
                .unwrap();
            assert!(status.success(), "{subcommand} run {run} failed");
            outputs.push(strip_timestamp(&std::fs::read_to_string(&out_path).unwrap()));
        }
        assert_eq!(
            outputs[0], outputs[1],
            "{subcommand}: repeated runs differ beyond the timestamp column"
        );
        println!("  {subcommand}: byte-identical modulo timestamp");
    }
    println!("criterion 9 (CLI determinism): PASS");
}
