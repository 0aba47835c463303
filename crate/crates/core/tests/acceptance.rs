//! Acceptance suite: one line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL; the run itself
//! fails if any other criterion fails, or if a known failure starts passing.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use distill_core::analytics::{
    crossover_t, dark_count_region, drift_infidelity_physical, drift_infidelity_quadratic,
    optimize_theta, ours_with_dark_counts, p_two, rate_bell, reference_fidelity, sequence_counts,
    two_photon_reference_rate, DriftParams, Objective, RegionClass,
};
use distill_core::photonics::{
    eta_weight, heralded_state, heralded_state_with_dark_counts, ApparatusParams, ExcitationAngle,
    HeraldedPair,
};
use distill_core::protocol::{
    iterate_closed_form, parity_projected_target, run_iterate_exact, run_strategy_exact,
    run_trajectories, StrategyConfig,
};
use distill_core::qstate::{fidelity, DensityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Drift quadratic bound: the residual is cubic in D_T and ≈32.5·D_x⁴, so the
/// fourth-order bound with constant 10 cannot hold.
const KNOWN_FAILURES: &[u32] = &[7];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = common::random_mixed(&mut rng);
        let pair = HeraldedPair::new(
            rng.random_range(0.0..=1.0),
            rng.random_range(-FRAC_PI_4..FRAC_PI_4),
            rng.random_range(-FRAC_PI_2..FRAC_PI_2),
        )
        .unwrap();
        for branches in [
            run_iterate_exact(&rho, &pair).unwrap(),
            iterate_closed_form(&rho, &pair).unwrap(),
        ] {
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            worst = worst.max((total - 1.0).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |Σ tr E − 1| = {worst:.2e} (tol 1e-12)"),
    )
}

fn case_a_perfection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut leaves = 0;
    for _ in 0..200 {
        let clients = common::random_pure(&mut rng);
        let pair = HeraldedPair::new(
            rng.random_range(0.0..0.9),
            rng.random_range(-0.7..0.7),
            rng.random_range(-FRAC_PI_2..FRAC_PI_2),
        )
        .unwrap();
        let tree =
            run_strategy_exact(&clients, &pair, &StrategyConfig::looped(6, 0).unwrap()).unwrap();
        for leaf in tree.leaves.iter().filter(|l| l.status.is_success()) {
            let target = parity_projected_target(&clients, 1 - leaf.history[0].parity()).unwrap();
            worst = worst.max(1.0 - fidelity(&leaf.final_clients, &target).unwrap());
            leaves += 1;
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{leaves} success leaves, max infidelity {worst:.2e} (tol 1e-10)"),
    )
}

fn two_iterate_success() -> Outcome {
    let clients = DensityMatrix::all_plus(common::clients()).unwrap();
    let mut worst = 0.0f64;
    for a in 0..10 {
        for b in 0..10 {
            for c in 0..10 {
                let eta = a as f64 / 10.0;
                let phi = -FRAC_PI_4 + (b as f64 + 0.5) * FRAC_PI_2 / 10.0;
                let delta = -FRAC_PI_2 + (c as f64 + 0.5) * PI / 10.0;
                let pair = HeraldedPair::new(eta, phi, delta).unwrap();
                let tree =
                    run_strategy_exact(&clients, &pair, &StrategyConfig::two_iter_only(0)).unwrap();
                worst = worst.max((tree.success_probability() - p_two(eta, phi)).abs());
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |P_two − cos²2φ(1−η)²/2| = {worst:.2e} on 1000 points"),
    )
}

fn optimal_excitation() -> Outcome {
    let r = optimize_theta(
        &ApparatusParams::symmetric(1e-5).unwrap(),
        Objective::BellRate,
    )
    .unwrap();
    let s2 = r.optimal_theta.sin().powi(2);
    outcome(
        (s2 - 1.0 / 3.0).abs() <= 1e-3,
        format!("sin²θ* = {s2:.6} at T = 1e-5"),
    )
}

fn chain_constants() -> Outcome {
    let t = 1e-3;
    let r = optimize_theta(
        &ApparatusParams::symmetric(t).unwrap(),
        Objective::ChainRate { k_max: 64 },
    )
    .unwrap();
    let g = r.rate / t;
    let inv = 1.0 / g;
    outcome(
        (g - 0.0345).abs() <= 5e-4 && (inv - 29.0).abs() <= 0.5,
        format!(
            "G = {g:.5} T/τ, 1/G = {inv:.3} τ/T, sin²θ* = {:.4}",
            r.optimal_theta.sin().powi(2)
        ),
    )
}

fn crossover() -> Outcome {
    let tstar = crossover_t();
    let t = 1e-4;
    let p = ApparatusParams::symmetric(t).unwrap();
    let best = optimize_theta(&p, Objective::BellRate).unwrap();
    let ratio = best.rate / two_photon_reference_rate(t, 1.0).unwrap();
    let at_third = rate_bell(&p, ExcitationAngle::from_sin2(1.0 / 3.0).unwrap())
        / two_photon_reference_rate(t, 1.0).unwrap();
    outcome(
        (tstar - 0.152).abs() <= 1e-3 && (1e3..=2e3).contains(&ratio),
        format!("T* = {tstar:.5}; ratio at T = 1e-4: {ratio:.1} (sin²θ = 1/3: {at_third:.1})"),
    )
}

fn drift_bound() -> Outcome {
    let budget = drift_infidelity_physical(&DriftParams::new(1.0 / (32.0 * PI), 0.0).unwrap());
    let mut worst_ratio = 0.0f64;
    let mut worst_at = (0.0, 0.0);
    let mut derived_ok = true;
    for a in 0..=20 {
        for b in 0..=20 {
            let d = DriftParams::new(a as f64 * 0.005, b as f64 * 0.005).unwrap();
            let m = d.d_x.max(d.d_t);
            if m == 0.0 {
                continue;
            }
            let gap = (drift_infidelity_physical(&d) - drift_infidelity_quadratic(&d)).abs();
            if gap / m.powi(4) > worst_ratio {
                worst_ratio = gap / m.powi(4);
                worst_at = (d.d_x, d.d_t);
            }
            derived_ok &= gap <= d.d_t.powi(3) / 4.0 + 40.0 * m.powi(4);
        }
    }
    assert!(budget < 1e-3, "path-length budget {budget}");
    assert!(derived_ok, "residual exceeds D_T³/4 + 40·max⁴");
    outcome(
        budget < 1e-3 && worst_ratio <= 10.0,
        format!(
            "ε(1/(32π), 0) = {budget:.3e} < 1e-3; max |exact − quadratic|/max⁴ = {worst_ratio:.1} at {worst_at:?} \
             (stated bound 10; residual is D_T³/4 + O(D⁴), holds as |gap| ≤ D_T³/4 + 40·max⁴)"
        ),
    )
}

fn combinatorics() -> Outcome {
    let mut bad = Vec::new();
    for k in 2..=14 {
        if sequence_counts(k).unwrap() != common::enumerate_counts(k) {
            bad.push(k);
        }
    }
    let pinned = sequence_counts(2).unwrap().0 == 1
        && sequence_counts(3).unwrap() == (0, 1)
        && sequence_counts(4).unwrap().0 == 1;
    outcome(
        bad.is_empty() && pinned,
        format!("k = 2..=14 agree with enumeration; mismatches {bad:?}"),
    )
}

fn monte_carlo() -> Outcome {
    let params = ApparatusParams::symmetric(1e-2).unwrap();
    let best = optimize_theta(&params, Objective::BellRate).unwrap();
    let theta = ExcitationAngle::new(best.optimal_theta).unwrap();
    let eta = eta_weight(&params, theta).unwrap();
    let n = 1_000_000;
    let cfg = StrategyConfig::two_iter_only(20_240_601);
    let stats = run_trajectories(&cfg, &params, theta, n).unwrap();
    let replay = run_trajectories(&cfg, &params, theta, n).unwrap();
    let z_rate = (stats.rate(1.0) - best.rate) / stats.rate_se(1.0);
    let z_p = (stats.success_probability() - p_two(eta, 0.0)) / stats.success_probability_se();
    outcome(
        z_rate.abs() <= 3.0 && z_p.abs() <= 3.0 && stats == replay,
        format!(
            "{n} trials: rate {:.5e} vs {:.5e} (z = {z_rate:+.2}); P_two {:.5} vs {:.5} (z = {z_p:+.2}); replay identical: {}",
            stats.rate(1.0),
            best.rate,
            stats.success_probability(),
            p_two(eta, 0.0),
            stats == replay
        ),
    )
}

fn dark_counts() -> Outcome {
    let ts = [1e-4, 1e-3, 1e-2, 0.05, 0.15, 0.5, 1.0];
    let ps: Vec<f64> = (0..=12)
        .map(|n| {
            if n == 0 {
                0.0
            } else {
                1e-8 * 10f64.powf(n as f64 * 0.5)
            }
        })
        .collect();
    let mut monotone = true;
    for &t in &ts {
        let theta = ExcitationAngle::from_sin2(1.0 / 3.0).unwrap();
        let mut last = (f64::INFINITY, f64::INFINITY);
        for &p in &ps {
            let ours = ours_with_dark_counts(
                &ApparatusParams {
                    p_dark: p,
                    ..ApparatusParams::symmetric(t).unwrap()
                },
                theta,
            )
            .unwrap()
            .fidelity;
            let reference = reference_fidelity(t, p).unwrap();
            monotone &= ours <= last.0 + 1e-12 && reference <= last.1 + 1e-12;
            last = (ours, reference);
        }
    }
    let mut reduces = true;
    for &t in &ts {
        let p = ApparatusParams::symmetric(t).unwrap();
        let theta = ExcitationAngle::new(0.6).unwrap();
        let dark = heralded_state_with_dark_counts(&p, theta).unwrap();
        let clean = heralded_state(&p, theta).unwrap().to_density_matrix();
        reduces &= dark.state.max_abs_diff(&clean) == 0.0 && dark.genuine_fraction == 1.0;
    }
    let region = dark_count_region(&ts, &ps, 1.0).unwrap();
    let mut nogo_monotone = true;
    for column in region.chunks(ps.len()) {
        let first = column
            .iter()
            .position(|r| r.class == RegionClass::NoGo)
            .unwrap_or(column.len());
        nogo_monotone &= column[first..].iter().all(|r| r.class == RegionClass::NoGo);
    }
    let nogo = region
        .iter()
        .filter(|r| r.class == RegionClass::NoGo)
        .count();
    outcome(
        monotone && reduces && nogo_monotone && nogo > 0,
        format!(
            "fidelity monotone in p_dark: {monotone}; p_dark = 0 reduces exactly: {reduces}; \
             NoGo monotone: {nogo_monotone} ({nogo}/{} points NoGo)",
            region.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "Kraus completeness", completeness),
        (2, "success leaves are perfect", case_a_perfection),
        (3, "two-iterate success probability", two_iterate_success),
        (4, "optimal excitation", optimal_excitation),
        (5, "chain-growth constants", chain_constants),
        (6, "crossover and low-T ratio", crossover),
        (7, "drift bound", drift_bound),
        (8, "sequence counts", combinatorics),
        (9, "Monte Carlo concordance", monte_carlo),
        (10, "dark-count properties", dark_counts),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || *f == id.to_string())
        {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let known = KNOWN_FAILURES.contains(&id);
        let verdict = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (documented)",
            (false, false) => "FAIL",
            (true, true) => "PASS (expected failure)",
        };
        if o.pass == known {
            unexpected += 1;
        }
        println!(
            "criterion {id:>2} {name:<34} {verdict:<18} [{:.2}s] {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criterion result(s) differ from expectations");
        ExitCode::FAILURE
    }
}
