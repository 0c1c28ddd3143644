//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

use laplace_bounds::bounds::{bracket_e_g, bracket_i, mcw_reference, solve_xa, thresholds};
use laplace_bounds::oracle::{
    empirical_error, integrate_nd, integrate_separable, odd_moment_check, QuadratureSpec,
};
use laplace_bounds::problems::{
    dixon2_transformed, dixon_exponent, dixon_sum_exact, dixon2_published_constants,
    separable_cubic, DixonSpec, Problem, DIXON2_DEFAULT_R,
};
use laplace_bounds::special::{ln_gamma, pochhammer};
use laplace_bounds::{theorem1_constants, theorem2_constants, RelaxationParams};
use laplace_bounds::{SquareMatrix, SymMatrix, ThirdTensor};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::{Duration, Instant};

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

fn criterion_1() -> Outcome {
    let p = dixon2_transformed(DIXON2_DEFAULT_R).unwrap();
    let k = theorem1_constants(&p.local, RelaxationParams::base()).unwrap();
    let rows = [
        ("C", p.local.c, 0.9238, 5e-4),
        ("K_alpha1/2", k.k_alpha1 / 2.0, 0.9238, 5e-4),
        ("K_alpha2", k.k_alpha2, 20.48, 0.02),
        ("K_l/8", k.k_l / 8.0, 0.1355, 5e-4),
        ("Delta", p.local.big_delta, 0.06863, 5e-4),
    ];
    let ok = rows.iter().all(|&(_, g, w, t)| close(g, w, t));
    let detail = rows
        .iter()
        .map(|(n, g, _, _)| format!("{n}={g:.6}"))
        .collect::<Vec<_>>()
        .join(" ");
    check(ok, detail)
}

fn criterion_2() -> Outcome {
    let p = dixon2_transformed(DIXON2_DEFAULT_R).unwrap();
    let base = thresholds(&p.local, RelaxationParams::base()).unwrap();
    let relax = RelaxationParams::new(1.2).unwrap();
    let relaxed = thresholds(&p.local, relax).unwrap();
    let ok = close(base.n0, 1479.0, 1.0)
        && close(base.n2, 240.0, 1.0)
        && close(relaxed.n0, 240.0, 1.0)
        && close(relax.x_a, 3.39, 0.01);
    check(
        ok,
        format!(
            "n0={:.3} n2={:.3} relaxed n0={:.3} x_a={:.5}",
            base.n0, base.n2, relaxed.n0, relax.x_a
        ),
    )
}

fn criterion_3() -> Outcome {
    let c = dixon2_published_constants();
    let want = [(5.0, -0.186, 0.432), (10.0, -0.0925, 0.162), (100.0, -0.00924, 0.0113)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (n, lo, hi) in want {
        let b = bracket_i(n, &c);
        // three significant digits
        ok &= close(b.rel_lo, lo, 0.005 * lo.abs()) && close(b.rel_hi, hi, 0.005 * hi.abs());
        detail.push(format!("n={n}: ({:.5}, {:.5})", b.rel_lo, b.rel_hi));
    }
    check(ok, detail.join(" "))
}

fn criterion_4() -> Outcome {
    let want = [(1.0, 3.9), (2.0, 2.7), (5.0, 1.5), (10.0, 0.77), (100.0, 0.018)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (n, w) in want {
        let m = mcw_reference(n);
        let dev = (m / w - 1.0).abs();
        ok &= dev <= 0.02;
        detail.push(format!("n={n}: {m:.5} ({:+.2}%)", 100.0 * (m / w - 1.0)));
    }
    let c = dixon2_published_constants();
    let first_loss = (2..=100_000u32).find(|&n| mcw_reference(n as f64) <= bracket_i(n as f64, &c).radius());
    ok &= first_loss.is_none();
    detail.push(match first_loss {
        None => "MW radius exceeds ours for all 2 ≤ n ≤ 1e5".into(),
        Some(n) => format!("MW radius not larger at n={n}"),
    });
    check(ok, detail.join(" "))
}

fn criterion_5() -> Outcome {
    let p = dixon2_transformed(DIXON2_DEFAULT_R).unwrap();
    let c = dixon2_published_constants();
    let mut outside = Vec::new();
    for n in 1..=100u32 {
        let e = empirical_error(&p, n as f64).unwrap();
        if !bracket_i(n as f64, &c).contains_relative(e.E) {
            outside.push(n);
        }
    }
    let s31 = dixon_sum_exact(3, 1) == BigInt::from(6);
    let s1 = (1..=100).all(|n| dixon_sum_exact(1, n) == BigInt::from(0));
    let e1 = empirical_error(&p, 1.0).unwrap().E;
    check(
        outside.is_empty() && s31 && s1,
        format!("E(1)={e1:.5}, outside={outside:?}, S(3,1)=6: {s31}, S(1,n)=0: {s1}"),
    )
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();

    let sep = separable_cubic(2, 0.5).unwrap();
    let k = theorem1_constants(&sep.local, RelaxationParams::base()).unwrap();
    let n0 = k.n0 / k.scale;
    let mut misses = 0;
    for n in geometric(n0, 100.0 * n0, 20) {
        let v = integrate_separable(0.5, 2, n, &QuadratureSpec::default()).unwrap();
        if !bracket_i(n, &k).contains(v) {
            misses += 1;
        }
    }
    ok &= misses == 0;
    detail.push(format!("separable n0={n0:.1} misses={misses}"));

    let dx = dixon2_transformed(DIXON2_DEFAULT_R).unwrap();
    let k = theorem1_constants(&dx.local, RelaxationParams::base()).unwrap();
    let n0 = k.n0 / k.scale;
    let mut misses = 0;
    for n in geometric(n0, 100.0 * n0, 20) {
        let v = integrate_nd(&dx, n, &QuadratureSpec::default()).unwrap();
        if !bracket_i(n, &k).contains(v) {
            misses += 1;
        }
    }
    ok &= misses == 0;
    detail.push(format!("dixon2 n0={n0:.1} misses={misses}"));
    check(ok, detail.join(", "))
}

fn criterion_7() -> Outcome {
    let target = (ln_gamma(2.25) - 0.5 * std::f64::consts::PI.ln()).exp();
    let n = 1e6;
    let i = integrate_separable(0.5, 2, n, &QuadratureSpec::default()).unwrap();
    let scaled = n.powf(0.75) / 2.0 * (1.0 - i / (std::f64::consts::PI / n));
    let dev = scaled / target - 1.0;
    check(
        dev.abs() <= 0.03,
        format!("scaled deficit {scaled:.6} vs {target:.6} ({:+.2}%)", 100.0 * dev),
    )
}

fn random_spd(rng: &mut StdRng, d: usize) -> SymMatrix {
    let a: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SymMatrix::from_fn(d, |i, j| {
        (0..d).map(|k| a[k * d + i] * a[k * d + j]).sum::<f64>() + if i == j { 0.5 } else { 0.0 }
    })
}

fn a1_violations(p: &Problem, rng: &mut StdRng) -> usize {
    let d = p.dim();
    let l = &p.local;
    let mut bad = 0;
    for _ in 0..1000 {
        let dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rho = l.r * rng.gen::<f64>();
        let t: Vec<f64> = dir.iter().map(|v| v / norm * rho).collect();
        let lhs = (p.f_eval(&t) - l.cubic_model(&t)).abs();
        if lhs > l.c * rho.powf(2.0 + l.alpha) + 1e-13 {
            bad += 1;
        }
    }
    bad
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut detail = Vec::new();

    let mut worst_odd: f64 = 0.0;
    for k in 0..10 {
        let d = 2 + k % 2;
        let raw: Vec<f64> = (0..d * d * d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let t = ThirdTensor::symmetrized(d, &raw);
        let a = SquareMatrix::new(d, (0..d * d).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let m = odd_moment_check(&t, &a, rng.gen_range(0.0..3.0), rng.gen_range(0.5..4.0)).unwrap();
        worst_odd = worst_odd.max(m.relative());
    }
    detail.push(format!("odd moment {worst_odd:.1e}"));

    let mut worst_chol: f64 = 0.0;
    for _ in 0..100 {
        let d = rng.gen_range(2..=6);
        let h = random_spd(&mut rng, d);
        let u = h.cholesky_upper().unwrap();
        let g = u.gram();
        for (x, y) in g.iter().zip(h.as_slice()) {
            worst_chol = worst_chol.max((x - y).abs() / h.max_abs());
        }
    }
    detail.push(format!("cholesky {worst_chol:.1e}"));

    let mut worst_poch: f64 = 0.0;
    for _ in 0..1000 {
        let x = rng.gen_range(0.1..10.0);
        let a = rng.gen_range(0.0..8.0);
        let lhs = pochhammer(x, a + 1.0).unwrap();
        let rhs = pochhammer(x, a).unwrap() * (x + a);
        worst_poch = worst_poch.max((lhs / rhs - 1.0).abs());
    }
    detail.push(format!("pochhammer {worst_poch:.1e}"));

    let library = [
        separable_cubic(2, 0.5).unwrap(),
        separable_cubic(3, 0.3).unwrap(),
        dixon_exponent(DixonSpec { d: 2, eta: 1.0 / 3.0 }).unwrap(),
        dixon_exponent(DixonSpec { d: 3, eta: 0.2 }).unwrap(),
        dixon2_transformed(DIXON2_DEFAULT_R).unwrap(),
    ];
    let a1: usize = library.iter().map(|p| a1_violations(p, &mut rng)).sum();
    detail.push(format!("Hölder-bound violations {a1}"));

    let mut xa_ok = true;
    for _ in 0..200 {
        let a = rng.gen_range(-0.49..5.0);
        let x = solve_xa(a).unwrap();
        let g = |x: f64| x.exp_m1() - x - (1.0 + a) * x * x;
        xa_ok &= g(x * (1.0 - 1e-9)) < 0.0 && g(x * (1.0 + 1e-9)) > 0.0;
    }
    detail.push(format!("solve_xa sign change {xa_ok}"));

    check(
        worst_odd < 1e-8 && worst_chol < 1e-12 && worst_poch < 1e-12 && a1 == 0 && xa_ok,
        detail.join(", "),
    )
}

fn criterion_9() -> Outcome {
    let p = dixon2_transformed(DIXON2_DEFAULT_R)
        .unwrap()
        .with_constant_amplitude(1.0)
        .unwrap();
    let k = theorem1_constants(&p.local, RelaxationParams::base()).unwrap();
    let g = theorem2_constants(&p.local, &p.amplitude.as_ref().unwrap().data, &k).unwrap();
    let mut worst: f64 = 0.0;
    for n in geometric(k.n0 / k.scale, 1e6, 25) {
        let a = bracket_e_g(n, &k, &g);
        let b = bracket_i(n, &k);
        worst = worst.max((a.rel_lo - b.rel_lo).abs()).max((a.rel_hi - b.rel_hi).abs());
    }
    check(
        worst <= 1e-14 && g.n4 == k.n0,
        format!("max gap {worst:.1e}, n4={} n0={}", g.n4, k.n0),
    )
}

fn main() {
    type Criterion = fn() -> Outcome;
    let criteria: [(&str, Criterion, Duration); 9] = [
        ("constant reproduction", criterion_1, Duration::from_secs(1)),
        ("threshold reproduction", criterion_2, Duration::from_secs(1)),
        ("interval reproduction", criterion_3, Duration::from_secs(1)),
        ("McClure-Wong comparison", criterion_4, Duration::from_secs(60)),
        ("exact-sum containment", criterion_5, Duration::from_secs(30)),
        ("quadrature containment", criterion_6, Duration::from_secs(120)),
        ("asymptotic rate", criterion_7, Duration::from_secs(60)),
        ("property suites", criterion_8, Duration::from_secs(60)),
        ("amplitude reduction", criterion_9, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= *limit;
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {} [{:.2}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
