//! Acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so every line is printed on success too.
//! Exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;

use dprime_core::limits::least_squares_slope;
use dprime_core::resonance::{
    adjacent_equation, adjacent_root, chi_adjacent_forms, chi_linear_forms, g_quadratic_forms,
    kappa_quadratic_forms, linear_root, relative_spread,
};
use dprime_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SAMPLES: usize = 1000;
const SEED: u64 = 0x5eed_0001;

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

type Check = (&'static str, fn() -> Outcome);

struct Sample {
    profile: RectProfile,
    energy: f64,
}

fn samples() -> Vec<Sample> {
    let mut rng = StdRng::seed_from_u64(SEED);
    (0..SAMPLES)
        .map(|_| {
            // l log-uniform in [1e-3, 1]
            let l = 10f64.powf(rng.gen_range(-3.0..=0.0));
            let rho = rng.gen_range(0.0..=1.0);
            let lambda = rng.gen_range(0.1..=30.0);
            let energy = rng.gen_range(0.1..=10.0);
            Sample {
                profile: RectProfile::new(l, rho, lambda).unwrap(),
                energy,
            }
        })
        .collect()
}

// Independent root oracle: plain bisection on sinh σ cos σ − cosh σ sin σ,
// which has the same zeros as tanh σ − tan σ and no poles.
fn oracle_adjacent_root(n: usize) -> f64 {
    let f = |s: f64| s.sinh() * s.cos() - s.cosh() * s.sin();
    let (mut a, mut b) = (n as f64 * PI + 1e-3, n as f64 * PI + FRAC_PI_2 - 1e-3);
    let fa = f(a).signum();
    while b - a > 4.0 * f64::EPSILON * b {
        let m = 0.5 * (a + b);
        if f(m).signum() == fa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn lambda1() -> f64 {
    let s = adjacent_root(1).unwrap();
    s * s
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for s in samples() {
        for tm in [
            transfer_matrix(&s.profile, s.energy).unwrap(),
            piecewise_transfer(&s.profile, s.energy).unwrap(),
        ] {
            worst = worst.max(tm.det_residual());
        }
    }
    outcome(
        worst < 1e-12,
        format!("max |det - 1| = {worst:e} over {SAMPLES} samples x 2 constructions"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for s in samples() {
        let tm = transfer_matrix(&s.profile, s.energy).unwrap();
        let amps = scattering(&tm, s.energy.sqrt()).unwrap();
        worst = worst.max(amps.conservation_residual());
    }
    outcome(
        worst < 1e-10,
        format!("max ||R|^2 + |T|^2 - 1| = {worst:e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for s in samples() {
        let a = transfer_matrix(&s.profile, s.energy).unwrap();
        let b = piecewise_transfer(&s.profile, s.energy).unwrap();
        worst = worst.max(a.max_relative_difference(&b));
    }
    outcome(
        worst < 1e-10,
        format!("max entrywise relative difference = {worst:e}"),
    )
}

fn criterion_4() -> Outcome {
    let roots = solve_adjacent(5).unwrap();
    let mut residual = 0.0f64;
    let mut oracle = 0.0f64;
    for r in &roots {
        residual = residual.max(adjacent_equation(r.sigma).abs());
        oracle = oracle.max((r.sigma - oracle_adjacent_root(r.n)).abs());
    }
    let s1 = roots[0].sigma;
    let four_places = (s1 * 1e4).round() / 1e4 == 3.9266;
    outcome(
        residual < 1e-10 && oracle < 1e-9 && four_places,
        format!("max |f| = {residual:e}, max oracle gap = {oracle:e}, sigma_1 = {s1:.10}"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=10 {
        let s = adjacent_root(n).unwrap();
        worst = worst.max(relative_spread(&chi_adjacent_forms(s)));
        for c in [0.5, 1.0, 2.0] {
            worst = worst.max(relative_spread(&g_quadratic_forms(s, c, n)));
            worst = worst.max(relative_spread(&kappa_quadratic_forms(s, c, n)));
            let sl = linear_root(n, c).unwrap();
            worst = worst.max(relative_spread(&chi_linear_forms(sl, c)));
        }
    }
    outcome(
        worst < 1e-9,
        format!("max relative spread of redundant forms = {worst:e}"),
    )
}

fn criterion_6() -> Outcome {
    let l1 = lambda1();
    let path = SqueezePath::PowerLaw { c: 1.0, tau: 2.0 };
    let t = trace(path, l1, 1.0, 1e-1, 1e-4, 13).unwrap();
    let v = classify(&t).unwrap();
    let (chi, g) = match predict(path, l1).unwrap() {
        Prediction::Connection { chi, g, .. } => (chi, g),
        Prediction::Separated => return outcome(false, "quadratic path predicted separated"),
    };
    let targets = [chi, 0.0, g, chi.recip()];
    let mut worst = 0.0f64;
    let mut limits_ok = true;
    for (e, target) in v.entries.iter().zip(targets) {
        match e.value() {
            Some(value) => {
                let gap = if target == 0.0 {
                    value.abs()
                } else {
                    ((value - target) / target).abs()
                };
                worst = worst.max(gap);
            }
            None => limits_ok = false,
        }
    }
    limits_ok &= worst < 1e-3;

    let paths = [
        SqueezePath::BarrierFirst { rho: 0.5 },
        SqueezePath::Adjacent,
        SqueezePath::PowerLaw { c: 1.0, tau: 0.5 },
        SqueezePath::PowerLaw { c: 1.0, tau: 1.0 },
        SqueezePath::PowerLaw { c: 1.0, tau: 1.5 },
        SqueezePath::PowerLaw { c: 1.0, tau: 2.0 },
        SqueezePath::PowerLaw { c: 1.0, tau: 3.0 },
    ];
    let mut disagreements = vec![];
    for p in paths {
        for lambda in [l1, 10.0] {
            let verdict = classify(&trace(p, lambda, 1.0, 1e-1, 1e-4, 13).unwrap()).unwrap();
            let prediction = predict(p, lambda).unwrap();
            if !verdict.agrees_with(&prediction) {
                disagreements.push(format!("{p}@{lambda:.3}"));
            }
        }
    }
    outcome(
        limits_ok && disagreements.is_empty(),
        format!(
            "max relative gap to (chi1, 0, g1, 1/chi1) = {worst:e}; verdict/prediction disagreements: {}",
            if disagreements.is_empty() { "none".to_string() } else { disagreements.join(", ") }
        ),
    )
}

fn criterion_7() -> Outcome {
    let t = trace(SqueezePath::Adjacent, 10.0, 1.0, 1e-1, 1e-4, 13).unwrap();
    let tail = &t.rows[t.rows.len() / 2..];
    let xs: Vec<f64> = tail.iter().map(|r| r.l.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.matrix.get(2, 1).abs().ln()).collect();
    let s = least_squares_slope(&xs, &ys).unwrap();
    let classified = classify(&t).unwrap().slopes[2];
    outcome(
        (s + 1.0).abs() <= 0.05 && (classified - s).abs() < 1e-12,
        format!("off-resonance L21 slope = {s:.6}"),
    )
}

fn criterion_8() -> Outcome {
    let s1 = adjacent_root(1).unwrap();
    let tm = transfer_matrix(&RectProfile::new(1e-4, 0.0, s1 * s1).unwrap(), 1.0).unwrap();
    let t2 = scattering(&tm, 1.0).unwrap().transmittance();
    let limit = 1.0 - s1.tanh().powi(4);
    let gap = ((t2 - limit) / limit).abs();

    let mut k_spread = 0.0f64;
    for r in solve_adjacent(5).unwrap() {
        let base = resonant_scattering(r.chi, 0.0, 1.0).unwrap();
        for k in [0.1, 10.0] {
            let other = resonant_scattering(r.chi, 0.0, k).unwrap();
            k_spread = k_spread
                .max((other.r - base.r).norm())
                .max((other.t - base.t).norm());
        }
    }
    outcome(
        gap < 1e-3 && k_spread < 1e-12,
        format!("|T|^2 = {t2:.12} vs {limit:.12} (rel {gap:e}); k spread = {k_spread:e}"),
    )
}

fn criterion_9() -> Outcome {
    let sweep = transmission_sweep(SqueezePath::Adjacent, 1e-3, 1.0, 60.0, 2000, 1.0).unwrap();
    let roots = solve_adjacent(2).unwrap();
    let mut gaps = vec![];
    for r in &roots {
        let gap = sweep
            .peaks
            .iter()
            .map(|p| (p.lambda - r.lambda).abs())
            .fold(f64::INFINITY, f64::min);
        gaps.push(gap);
    }
    outcome(
        gaps.iter().all(|g| *g < 0.1),
        format!(
            "nearest peaks to sigma_1^2, sigma_2^2 at distance {:.4}, {:.4}",
            gaps[0], gaps[1]
        ),
    )
}

fn criterion_10() -> Outcome {
    let half = ProductParams::new(0.5, 0.0).unwrap();
    let mut seba_gap = 0.0f64;
    for i in 0..20 {
        let lambda = -9.5 + i as f64;
        let a = bc_from_product(half, lambda).unwrap().entries();
        let b = seba_matrix(lambda).unwrap().entries();
        for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
            seba_gap = seba_gap.max((x - y).abs() / y.abs().max(1.0));
        }
    }
    let mut trip = 0.0f64;
    for family in [
        solve_adjacent(10).unwrap(),
        solve_quadratic(1.0, 10).unwrap(),
    ] {
        for r in family {
            let p = params_from_resonance(r.lambda, r.chi, r.g).unwrap();
            trip = trip.max(round_trip_residual(p, r.lambda, r.chi, r.g).unwrap());
        }
    }
    outcome(
        seba_gap < 1e-12 && trip < 1e-12,
        format!("(1/2, 0) vs diagonal matrix gap = {seba_gap:e}; round-trip residual = {trip:e}"),
    )
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0f64;
    let mut counts_ok = true;
    for c in [0.5, 1.0, 2.0] {
        for r in solve_quadratic(c, 5).unwrap() {
            let ks = bound_state(&resonant_matrix(r.chi, r.g).unwrap()).unwrap();
            if ks.len() != 1 {
                counts_ok = false;
                continue;
            }
            let closed = 0.5 * c * r.sigma * r.sigma * r.sigma.tanh().powi(2);
            let ratio = -r.g / (r.chi + r.chi.recip());
            worst = worst
                .max(((ks[0] - closed) / closed).abs())
                .max(((ks[0] - ratio) / ratio).abs());
        }
    }
    let g_zero_empty = solve_adjacent(5).unwrap().iter().all(|r| {
        bound_state(&resonant_matrix(r.chi, 0.0).unwrap())
            .unwrap()
            .is_empty()
    });
    outcome(
        counts_ok && g_zero_empty && worst < 1e-9,
        format!("max relative gap = {worst:e}; g = 0 bound states empty: {g_zero_empty}"),
    )
}

fn criterion_12() -> Outcome {
    let alphas: Vec<f64> = solve_adjacent(10)
        .unwrap()
        .iter()
        .map(|r| params_from_resonance(r.lambda, r.chi, 0.0).unwrap().alpha())
        .collect();
    let lo = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = alphas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        lo > 0.0 && hi < 1.0,
        format!("alpha_n in [{lo:.6e}, {hi:.6e}] for n = 1..10"),
    )
}

fn criterion_13() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 13);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let l = 10f64.powf(rng.gen_range(-3.0..=0.0));
        let rho = rng.gen_range(0.0..=1.0);
        let (m0, m1) = RectProfile::new(l, rho, 1.0).unwrap().moments();
        worst = worst.max(m0.abs()).max((m1 + 1.0).abs());
    }
    outcome(worst < 1e-12, format!("max moment deviation = {worst:e}"))
}

fn main() -> ExitCode {
    let checks: [Check; 13] = [
        ("determinant law", criterion_1),
        ("probability conservation", criterion_2),
        ("closed form vs interface product", criterion_3),
        ("resonance roots", criterion_4),
        ("equality chains", criterion_5),
        ("limit convergence and path verdicts", criterion_6),
        ("off-resonance divergence rate", criterion_7),
        ("scattering limit", criterion_8),
        ("transmission peaks", criterion_9),
        ("boundary-condition consistency", criterion_10),
        ("bound states", criterion_11),
        ("product weight bound", criterion_12),
        ("profile moments", criterion_13),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
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
    println!(
        "{} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
