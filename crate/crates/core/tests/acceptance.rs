//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs at full scale by default. `FCGLE_ACCEPTANCE_SCALE=desk` selects the
//! reduced Strang grid (n = 200) for criterion 4. Criteria can be selected by
//! number as positional arguments, e.g. `cargo test --test acceptance -- 3 6`.

mod common;

use std::time::Instant;

use common::*;
use fcgle_core::fracfd::{riesz_coeffs_order2, riesz_coeffs_order4, riesz_exact_poly, BoundaryVanishingPoly};
use fcgle_core::integrators::{convergence_study, run, ConvergenceResult, ErrorMode, OrderFit};
use fcgle_core::kronspec::{phi_scalar, FilterKind};
use fcgle_core::problem::{discrete_l2_error, example1_setup, example2_setup};
use fcgle_core::tensor::{tucker, CMat, RMat};
use fcgle_core::{CTensor, Engine, FdOrder, FracOperator, GridProblem, RunConfig, Scheme, SourceMode};
use num_complex::Complex64;
use rand::Rng;

const LBDF2_REF: [f64; 5] = [7.2132e-3, 4.0747e-3, 2.6049e-3, 1.8058e-3, 1.3247e-3];
const KROGSTAD_REF_FIRST: f64 = 9.3515e-6;
const STRANG_REF: [f64; 5] = [1.7520e-2, 4.5181e-3, 2.0154e-3, 1.1314e-3, 7.2082e-4];
const LBDF2_3D_REF_FIRST: f64 = 3.49e-3;
const STEPS_EX1: [usize; 5] = [15, 20, 25, 30, 35];
const STEPS_EX2: [usize; 5] = [5, 10, 15, 20, 25];

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    /// Failing and documented as unattainable in the decisions ledger.
    KnownFail,
    /// Failing a hardware-dependent soft gate.
    SoftFail,
}

struct Check {
    name: String,
    status: Status,
    detail: String,
}

fn check(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        status: if ok { Status::Pass } else { Status::Fail },
        detail: detail.into(),
    }
}

impl Check {
    fn or(mut self, fallback: Status) -> Self {
        if self.status == Status::Fail {
            self.status = fallback;
        }
        self
    }
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target
}

fn fmt_errs(e: &[f64]) -> String {
    e.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ")
}

fn order_check(name: &str, fit: OrderFit, target: f64, tol: f64, errs: &[f64]) -> Check {
    check(
        name,
        !fit.degenerate && (fit.order - target).abs() <= tol,
        format!("order {:.3} (want {target}±{tol}); errors [{}]", fit.order, fmt_errs(errs)),
    )
}

fn study(p: &GridProblem, scheme: Scheme, steps: &[usize], mode: ErrorMode) -> ConvergenceResult {
    convergence_study(p, &RunConfig::new(scheme, Engine::Spectral, 1), steps, mode).expect("convergence study")
}

fn c1_stencils() -> Vec<Check> {
    let n = 8;
    let g2 = riesz_coeffs_order2(2.0, n).unwrap();
    let g4 = riesz_coeffs_order4(2.0, n).unwrap();
    let mut want2 = vec![0.0; n];
    want2[..2].copy_from_slice(&[2.0, -1.0]);
    let mut want4 = vec![0.0; n];
    want4[..3].copy_from_slice(&[5.0 / 2.0, -4.0 / 3.0, 1.0 / 12.0]);
    vec![
        check("alpha=2 second-order stencil", g2 == want2, format!("{g2:?}")),
        check("alpha=2 fourth-order stencil", g4 == want4, format!("{g4:?}")),
    ]
}

fn c2_oracles() -> Vec<Check> {
    let mut worst_filter = 0.0f64;
    let mut worst_exp = 0.0f64;
    let mut worst_k = 0.0f64;
    let coef = Complex64::new(1.0, 1.0);
    let theta = 0.05;
    type ScalarFn = fn(Complex64) -> Complex64;
    let kinds: [(FilterKind, ScalarFn); 5] = [
        (FilterKind::Resolvent, |z| 1.0 / (1.0 - z)),
        (FilterKind::Phi(0), |z| z.exp()),
        (FilterKind::Phi(1), |z| phi_scalar(1, z)),
        (FilterKind::Phi(2), |z| phi_scalar(2, z)),
        (FilterKind::Phi(3), |z| phi_scalar(3, z)),
    ];
    let mut r = rng(90);
    for dims in [vec![64usize], vec![8, 8], vec![4, 4, 4], vec![5, 3], vec![2, 3, 4]] {
        let cache = cache(&dims, 1.0, 1.0);
        let ops = cache.operator().operators();
        let u = random_tensor(&mut r, &dims);
        let uv = to_vector(&u);
        for (kind, f) in kinds {
            let a = dense_k(ops, coef) * Complex64::new(theta, 0.0);
            let want = match kind {
                FilterKind::Resolvent => (nalgebra::DMatrix::identity(uv.len(), uv.len()) - &a).lu().solve(&uv).unwrap(),
                FilterKind::Phi(l) => dense_phi_action(&a, l as usize, &uv),
            };
            let filt = cache.filter(kind, theta).unwrap();
            let got = to_vector(&cache.apply_filter(&filt, &u).unwrap());
            worst_filter = worst_filter.max(rel_err(&got, &want));
            // eigendecomposition route for the same function
            let via_eig = dense_matrix_function(ops, coef, theta, f) * &uv;
            worst_filter = worst_filter.max(rel_err(&got, &via_eig));
        }
        let e = (dense_k(ops, coef) * Complex64::new(theta, 0.0)).exp() * &uv;
        worst_exp = worst_exp.max(rel_err(&to_vector(&cache.apply_exp(theta, &u).unwrap()), &e));
        let ku = dense_k(ops, coef) * &uv;
        worst_k = worst_k.max(rel_err(&to_vector(&cache.apply_k(&u).unwrap()), &ku));
    }
    let mut worst_tucker = 0.0f64;
    for dims in [vec![7usize], vec![4, 6], vec![3, 4, 5], vec![2, 3, 2, 3]] {
        let u = random_tensor(&mut r, &dims);
        let mats: Vec<CMat<f64>> = dims
            .iter()
            .map(|&n| CMat::from_fn(n, n, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))))
            .collect();
        let got = to_vector(&tucker(&u, &mats).unwrap());
        let dense: Vec<_> = mats.iter().map(|m| nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])).collect();
        let want = kron_chain(&dense) * to_vector(&u);
        worst_tucker = worst_tucker.max(rel_err(&got, &want));
        let rmats: Vec<RMat<f64>> = dims.iter().map(|&n| RMat::from_fn(n, n, |_, _| r.random_range(-1.0..1.0))).collect();
        let got = to_vector(&tucker(&u, &rmats).unwrap());
        let dense: Vec<_> = rmats
            .iter()
            .map(|m| nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(m[(i, j)], 0.0)))
            .collect();
        worst_tucker = worst_tucker.max(rel_err(&got, &(kron_chain(&dense) * to_vector(&u))));
    }
    vec![
        check("apply_filter vs dense matrix functions", worst_filter <= 1e-11, format!("max rel err {worst_filter:.2e}")),
        check("apply_exp vs dense exponential", worst_exp <= 1e-11, format!("max rel err {worst_exp:.2e}")),
        check("apply_K vs dense matvec", worst_k <= 1e-12, format!("max rel err {worst_k:.2e}")),
        check("tucker vs explicit Kronecker products", worst_tucker <= 1e-13, format!("max rel err {worst_tucker:.2e}")),
    ]
}

fn runtime_check(start: Instant, limit_s: f64) -> Check {
    let secs = start.elapsed().as_secs_f64();
    check("runtime", secs <= limit_s, format!("{secs:.1}s (limit {limit_s:.0}s)"))
}

fn c3_time_order() -> Vec<Check> {
    let start = Instant::now();
    let p = example1_setup(2, 400, FdOrder::Second, SourceMode::DiscreteManufactured).unwrap();
    let lb = study(&p, Scheme::Lbdf2, &STEPS_EX1, ErrorMode::Exact);
    let p4 = example1_setup(2, 400, FdOrder::Fourth, SourceMode::DiscreteManufactured).unwrap();
    let kr = study(&p4, Scheme::Krogstad, &STEPS_EX1, ErrorMode::Exact);
    let (le, ke) = (lb.errors(), kr.errors());
    vec![
        order_check("LBDF2 order, n=400", lb.fit, 2.0, 0.1, &le),
        order_check("Krogstad FD4 order, n=400", kr.fit, 4.0, 0.25, &ke).or(Status::KnownFail),
        check(
            "LBDF2 error at 15 steps",
            within(le[0], LBDF2_REF[0], 0.2),
            format!("{:.4e} vs {:.4e} (±20%); all steps [{}] vs [{}]", le[0], LBDF2_REF[0], fmt_errs(&le), fmt_errs(&LBDF2_REF)),
        ),
        check(
            "Krogstad error at 15 steps",
            within(ke[0], KROGSTAD_REF_FIRST, 0.3),
            format!("{:.4e} vs {KROGSTAD_REF_FIRST:.4e} (±30%)", ke[0]),
        ),
        runtime_check(start, 300.0),
    ]
}

fn c4_strang() -> Vec<Check> {
    let start = Instant::now();
    let desk = std::env::var("FCGLE_ACCEPTANCE_SCALE").is_ok_and(|s| s == "desk");
    let n = if desk { 200 } else { 800 };
    let p = example2_setup(2, n, FdOrder::Second).unwrap();
    let s = study(&p, Scheme::Strang, &STEPS_EX2, ErrorMode::SelfReference { factor: 8 });
    let e = s.errors();
    let mut out = vec![order_check(&format!("Strang self-convergence order, n={n}"), s.fit, 2.0, 0.1, &e)];
    let ok = e.iter().zip(&STRANG_REF).all(|(&x, &t)| within(x, t, 0.35));
    let detail = format!("[{}] vs [{}] (±35%)", fmt_errs(&e), fmt_errs(&STRANG_REF));
    if desk {
        out.push(check("Strang error magnitudes (reported only at n=200)", true, detail));
    } else {
        out.push(check("Strang error magnitudes, n=800", ok, detail));
        out.push(runtime_check(start, 600.0));
    }
    out
}

fn c5_spatial_order() -> Vec<Check> {
    let p = BoundaryVanishingPoly::bump(-1.0, 1.0, 4).unwrap();
    let mut out = Vec::new();
    for (fd, target, tol) in [(FdOrder::Second, 2.0, 0.2), (FdOrder::Fourth, 4.0, 0.3)] {
        let mut dev: f64 = 0.0;
        let mut all = Vec::new();
        for alpha in [1.2, 1.5, 1.8] {
            let exact = riesz_exact_poly(&p, alpha, 0.0).unwrap();
            let mut hs = Vec::new();
            let mut errs = Vec::new();
            for k in 6..=10 {
                // n = 2^k − 1 places a node at the midpoint
                let n = (1usize << k) - 1;
                let h = 2.0 / (n + 1) as f64;
                let v: Vec<f64> = (1..=n).map(|j| p.eval(-1.0 + j as f64 * h)).collect();
                let op = FracOperator::new(alpha, fd, n, h).unwrap();
                errs.push((op.apply_row(n / 2, &v) - exact).abs());
                hs.push(h);
            }
            let slope = fit_slope(&hs, &errs);
            dev = dev.max((slope - target).abs());
            all.push(format!("α={alpha}: {slope:.3}"));
        }
        out.push(check(
            format!("spatial order FD{}", fd.as_u8()),
            dev <= tol,
            format!("slopes {} (want {target}±{tol})", all.join(", ")),
        ));
    }
    out
}

fn gap(a: &CTensor<f64>, b: &CTensor<f64>, p: &GridProblem) -> f64 {
    discrete_l2_error(a, b, p.grid.h()).unwrap()
}

fn c6_baselines() -> Vec<Check> {
    let start = Instant::now();
    let ex1 = example1_setup(2, 100, FdOrder::Second, SourceMode::DiscreteManufactured).unwrap();
    let ex1_fd4 = example1_setup(2, 100, FdOrder::Fourth, SourceMode::DiscreteManufactured).unwrap();
    let ex2 = example2_setup(2, 100, FdOrder::Second).unwrap();
    let mut out = Vec::new();
    for (scheme, p, limit) in [(Scheme::Lbdf2, &ex1, 1e-5), (Scheme::Strang, &ex2, 1e-5), (Scheme::Krogstad, &ex1_fd4, 1e-4)] {
        let m = run(p, &RunConfig::new(scheme, Engine::Spectral, 25)).unwrap();
        let v = run(p, &RunConfig::new(scheme, Engine::IterativeBaseline, 25)).unwrap();
        let g = gap(&v.final_state, &m.final_state, p);
        let stats = v.iterations.unwrap();
        out.push(check(
            format!("{} vs {} final-state gap", v.label, m.label),
            g <= limit,
            format!("{g:.3e} (limit {limit:.0e}); {} non-converged solves", stats.nonconverged),
        ));
        if scheme == Scheme::Lbdf2 {
            out.push(check(
                "PGMRES mean iterations",
                (2.0..=6.0).contains(&stats.outer.mean()),
                format!("mean {:.2}, min {}, max {} over {} solves", stats.outer.mean(), stats.outer.min, stats.outer.max, stats.outer.count),
            ));
        } else {
            out.push(check(
                format!("PCG mean iterations ({})", v.label),
                (2.0..=8.0).contains(&stats.inner.mean()),
                format!("mean {:.2}, min {}, max {} over {} solves", stats.inner.mean(), stats.inner.min, stats.inner.max, stats.inner.count),
            ));
        }
    }
    out.push(runtime_check(start, 300.0));
    out
}

fn c7_speedup() -> Vec<Check> {
    let ex1 = example1_setup(2, 400, FdOrder::Second, SourceMode::DiscreteManufactured).unwrap();
    let ex1_fd4 = example1_setup(2, 400, FdOrder::Fourth, SourceMode::DiscreteManufactured).unwrap();
    let ex2 = example2_setup(2, 400, FdOrder::Second).unwrap();
    let threads = rayon::current_num_threads();
    let mut out = Vec::new();
    for (scheme, p, steps, reported) in [
        (Scheme::Lbdf2, &ex1, 25, "≈30×"),
        (Scheme::Strang, &ex2, 10, ">100×"),
        (Scheme::Krogstad, &ex1_fd4, 5, "≈170×"),
    ] {
        let mut cfg = RunConfig::new(scheme, Engine::Spectral, steps);
        cfg.track_error = false;
        let m = run(p, &cfg).unwrap();
        cfg.engine = Engine::IterativeBaseline;
        let v = run(p, &cfg).unwrap();
        let speedup = v.timing.total.as_secs_f64() / m.timing.total.as_secs_f64();
        out.push(
            check(
                format!("speedup {} over {}, n=400", m.label, v.label),
                speedup >= 5.0,
                format!(
                    "{speedup:.1}× ({steps} steps: {:.2}s vs {:.2}s, {threads} thread(s)); reported {reported}",
                    m.timing.total.as_secs_f64(),
                    v.timing.total.as_secs_f64()
                ),
            )
            .or(Status::SoftFail),
        );
    }
    out
}

fn c8_three_d() -> Vec<Check> {
    let p = example1_setup(3, 100, FdOrder::Second, SourceMode::DiscreteManufactured).unwrap();
    let lb = study(&p, Scheme::Lbdf2, &[15, 25, 35], ErrorMode::Exact);
    let q = example2_setup(3, 120, FdOrder::Second).unwrap();
    let st = study(&q, Scheme::Strang, &STEPS_EX2, ErrorMode::SelfReference { factor: 8 });
    drop((p, q));
    let full = example1_setup(3, 200, FdOrder::Second, SourceMode::DiscreteManufactured).unwrap();
    let mut cfg = RunConfig::new(Scheme::Lbdf2, Engine::Spectral, 15);
    cfg.track_error = false;
    let r = run(&full, &cfg).unwrap();
    let e = r.final_error.unwrap();
    vec![
        order_check("LBDF2-t order, d=3, n=100", lb.fit, 2.0, 0.15, &lb.errors()).or(Status::KnownFail),
        order_check("Strang-t self-convergence order, d=3, n=120", st.fit, 2.0, 0.15, &st.errors()),
        check(
            "LBDF2-t error at 15 steps, d=3, n=200 (double)",
            within(e, LBDF2_3D_REF_FIRST, 0.35),
            format!("{e:.4e} vs {LBDF2_3D_REF_FIRST:.2e} (±35%); {:.1}s", r.timing.total.as_secs_f64()),
        ),
    ]
}

fn c9_phi() -> Vec<Check> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for k in 0..=26 {
        let radius = 1e-12 * 10f64.powf(k as f64 / 2.0);
        if radius > 10.0 {
            break;
        }
        for q in 0..4 {
            for frac in [0.1, 0.5, 0.9] {
                let angle = (q as f64 + frac) * std::f64::consts::FRAC_PI_2;
                let z = Complex64::from_polar(radius, angle);
                for ell in 0..=3 {
                    let terms = if radius < 1.0 { 40 } else { 120 };
                    let want = phi_series_dd(ell, z, terms);
                    let got = phi_scalar(ell, z);
                    worst = worst.max((got - want).norm() / want.norm());
                    count += 1;
                }
            }
        }
        let z = Complex64::new(10.0, 0.0);
        for (zz, ell) in [(z, 1usize), (-z, 2), (Complex64::new(0.0, 10.0), 3)] {
            let want = phi_series_dd(ell, zz, 120);
            worst = worst.max((phi_scalar(ell, zz) - want).norm() / want.norm());
        }
    }
    vec![check(
        "φ_ℓ vs high-precision series",
        worst <= 1e-13,
        format!("max rel err {worst:.2e} over {count} points, |z| in [1e-12, 10], ℓ=0..3"),
    )]
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    type Criterion = (usize, &'static str, fn() -> Vec<Check>);
    let criteria: [Criterion; 9] = [
        (1, "stencil reduction", c1_stencils),
        (2, "small-instance oracles", c2_oracles),
        (3, "time order, Example 1", c3_time_order),
        (4, "Strang order, Example 2", c4_strang),
        (5, "spatial order", c5_spatial_order),
        (6, "baseline equivalence", c6_baselines),
        (7, "speedup", c7_speedup),
        (8, "3D scaled checks", c8_three_d),
        (9, "φ stability", c9_phi),
    ];
    let mut hard_failures = 0;
    for (id, title, f) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let checks = f();
        let secs = start.elapsed().as_secs_f64();
        let status = checks.iter().map(|c| c.status).fold(Status::Pass, |acc, s| match (acc, s) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::KnownFail, _) | (_, Status::KnownFail) => Status::KnownFail,
            (Status::SoftFail, _) | (_, Status::SoftFail) => Status::SoftFail,
            _ => Status::Pass,
        });
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::KnownFail => "FAIL (documented)",
            Status::SoftFail => "FAIL (soft gate)",
        };
        println!("criterion {id} [{tag}] {title} ({secs:.1}s)");
        for c in &checks {
            let t = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::KnownFail => "FAIL, documented",
                Status::SoftFail => "FAIL, soft",
            };
            println!("    {t:>16}  {}: {}", c.name, c.detail);
        }
        hard_failures += usize::from(status == Status::Fail);
    }
    if hard_failures > 0 {
        println!("{hard_failures} criteria failed");
        std::process::exit(1);
    }
}
