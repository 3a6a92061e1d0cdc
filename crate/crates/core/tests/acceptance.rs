//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use common::{random_scalar, random_solenoidal, random_vector, rel, rel_diff, rel_diff_scalar};
use micropolar::auditor::balance::{fractional_energy_scale, l2_energy_scale, max_relative};
use micropolar::auditor::{
    duality_pairing_check, existence_from_ledger, existence_time, existence_time_from_norms,
    fractional_balance_residual, gronwall_check, interpolation_check, l2_balance_residual, uniform_bound_constant,
    viscosity_absorption_report, young_split, Calibration, GronwallProblem, GronwallStatus, Which,
};
use micropolar::datagen::{make_angular_ic, make_velocity_ic, IcKind, IcRecipe};
use micropolar::integrator::{simulate, StepPolicy, Trajectory};
use micropolar::rhs::{pressure, State, SystemParams};
use micropolar::spectral::{
    curl, divergence, fractional_multiplier, gradient, leray_project, pointwise_product, riesz, tensor_divergence,
    GridSpec, SobolevIndex, SobolevKind, SpectralField, VectorField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn grid(n: usize) -> GridSpec {
    GridSpec::cube(n).unwrap()
}

// 1 -------------------------------------------------------------------------

fn spectral_identities() -> Check {
    let g = grid(32);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 6];
    for seed in 0..100u64 {
        let u = random_vector(g, seed);
        let w = random_vector(g, 1000 + seed);

        // Parseval: box average of f² against the coefficient sum.
        for c in u.comps() {
            let phys = c.to_physical();
            let avg = phys.iter().map(|x| x * x).sum::<f64>() / phys.len() as f64;
            worst[0] = worst[0].max(rel(avg, c.norm_sq()));
        }

        let s1 = rng.random_range(-1.5..1.5);
        let s2 = rng.random_range(-1.5..1.5);
        let f = random_scalar(g, 5000 + seed);
        for kind in [SobolevKind::Homogeneous, SobolevKind::Inhomogeneous] {
            let two = fractional_multiplier(&fractional_multiplier(&f, s1, kind).unwrap(), s2, kind).unwrap();
            let one = fractional_multiplier(&f, s1 + s2, kind).unwrap();
            worst[1] = worst[1].max(rel_diff_scalar(&two, &one));
        }

        // div curl = 0 and curl curl = ∇div − Δ.
        let cu = curl(&u);
        let grad_scale = (cu.norm_sq() * 3.0).sqrt() * g.k_unit() * g.n as f64;
        worst[2] = worst[2].max(divergence(&cu).norm_sq().sqrt() / grad_scale);
        let mut rhs = gradient(&divergence(&u));
        let mut lap = u.clone();
        for c in lap.comps_mut() {
            c.scale_modes(|idx, _| g.k_sq(idx));
        }
        rhs += &lap;
        worst[2] = worst[2].max(rel_diff(&curl(&cu), &rhs));

        let pu = leray_project(&u);
        worst[3] = worst[3].max(rel_diff(&leray_project(&pu), &pu));
        let dscale = (u.norm_sq()).sqrt() * g.k_unit() * g.n as f64;
        worst[4] = worst[4].max(divergence(&pu).norm_sq().sqrt() / dscale);

        let a = curl(&u).inner(&w);
        let b = curl(&w).inner(&u);
        let scale = curl(&u).norm_sq().sqrt() * w.norm_sq().sqrt();
        worst[5] = worst[5].max((a - b).abs() / scale);
    }
    let names = ["parseval", "D^s1 D^s2", "curl/div", "leray", "div P", "cross pairing"];
    let detail = names
        .iter()
        .zip(worst)
        .map(|(n, v)| format!("{n} {v:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(worst.iter().all(|&v| v <= 1e-12), detail)
}

// 2 -------------------------------------------------------------------------

fn pressure_identity() -> Check {
    let g = grid(32);
    let mut worst = [0.0f64; 3];
    for seed in 0..20u64 {
        let u = random_solenoidal(g, seed);
        let p = pressure(&u, 0.0);

        let mut oracle = SpectralField::zeros(g);
        for i in 0..3 {
            for j in 0..3 {
                let uu = pointwise_product(&u.comps()[i], &u.comps()[j]).unwrap();
                oracle += &riesz(&riesz(&uu, j), i);
            }
        }
        worst[0] = worst[0].max(rel_diff_scalar(&p, &oracle));

        // −Δp = ∂i∂j(ui uj): |k|² p̂ = −k_i k_j (ui uj)^.
        let mut lap = p.clone();
        lap.scale_modes(|idx, _| g.k_sq(idx));
        let mut src = SpectralField::zeros(g);
        for i in 0..3 {
            for j in 0..3 {
                let mut uu = pointwise_product(&u.comps()[i], &u.comps()[j]).unwrap();
                uu.scale_modes(|idx, _| {
                    let k = g.wavevector(idx);
                    -k[i] * k[j]
                });
                src += &uu;
            }
        }
        worst[1] = worst[1].max(rel_diff_scalar(&lap, &src));

        // ∇p = −(I − P) ∇·(u⊗u).
        let adv = tensor_divergence(&u, &u).unwrap();
        let mut gp = adv.clone();
        gp -= &leray_project(&adv);
        gp *= -1.0;
        worst[2] = worst[2].max(rel_diff(&gradient(&p), &gp));
    }
    ensure(
        worst.iter().all(|&v| v <= 1e-12),
        format!(
            "Riesz form {:.1e}, Poisson {:.1e}, gradient {:.1e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

// 3, 4 ----------------------------------------------------------------------

fn smooth_state(g: GridSpec, eps: f64) -> State {
    let mut ru = IcRecipe::new(IcKind::TaylorGreen, SobolevIndex::inhomogeneous(0.0), 1.0);
    ru.wavevector = Some([1, 0, 0]);
    let mut rw = IcRecipe::new(IcKind::Beltrami, SobolevIndex::inhomogeneous(0.0), 0.5);
    rw.wavevector = Some([2, 0, 0]);
    let u0 = make_velocity_ic(&ru, &g).unwrap();
    let w0 = make_angular_ic(&rw, &g).unwrap();
    State::initial(&u0, &w0, eps).unwrap()
}

fn balance_params(tau: f64, sigma: f64) -> SystemParams {
    SystemParams {
        nu: 0.05,
        mu: 0.05,
        eps: 0.0,
        tau,
        sigma,
    }
}

struct BalanceRuns {
    coarse: Trajectory,
    fine: Trajectory,
}

fn balance_runs() -> &'static BalanceRuns {
    static RUNS: OnceLock<BalanceRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let p = balance_params(1.0, 0.2);
        let s0 = smooth_state(grid(32), p.eps);
        let run = |dt| simulate(s0.clone(), &p, &StepPolicy::fixed(dt, 0.1)).unwrap();
        BalanceRuns {
            coarse: run(1e-3),
            fine: run(5e-4),
        }
    })
}

type Residual = fn(&Trajectory, &SystemParams, Which) -> f64;

fn l2_rel(t: &Trajectory, p: &SystemParams, which: Which) -> f64 {
    let r = l2_balance_residual(&t.ledger, p, which).unwrap();
    max_relative(&r, l2_energy_scale(&t.ledger).unwrap())
}

fn frac_rel(t: &Trajectory, p: &SystemParams, which: Which) -> f64 {
    let r = fractional_balance_residual(&t.ledger, p, which).unwrap();
    max_relative(&r, fractional_energy_scale(&t.ledger).unwrap())
}

fn balance_order(residual: Residual) -> (bool, String) {
    let runs = balance_runs();
    let p = balance_params(1.0, 0.2);
    let mut ok = true;
    let mut parts = Vec::new();
    for (which, label) in [(Which::Velocity, "u"), (Which::Angular, "w")] {
        let a = residual(&runs.coarse, &p, which);
        let b = residual(&runs.fine, &p, which);
        let ratio = a / b;
        ok &= a <= 1e-5 && (3.5..=4.5).contains(&ratio);
        parts.push(format!("{label}: {a:.2e} -> {b:.2e} (ratio {ratio:.2})"));
    }
    (ok, parts.join("; "))
}

fn l2_balances() -> Check {
    let (ok, d) = balance_order(l2_rel);
    ensure(ok, d)
}

fn fractional_balances() -> Check {
    let (ok, mut d) = balance_order(frac_rel);
    // τ = σ = 0: the fractional identities collapse to the L² ones.
    let p0 = balance_params(0.0, 0.0);
    let t = simulate(smooth_state(grid(32), 0.0), &p0, &StepPolicy::fixed(1e-3, 0.1)).unwrap();
    let scale = l2_energy_scale(&t.ledger).unwrap();
    let mut gap = 0.0f64;
    for which in [Which::Velocity, Which::Angular] {
        let a = l2_balance_residual(&t.ledger, &p0, which).unwrap();
        let b = fractional_balance_residual(&t.ledger, &p0, which).unwrap();
        for (x, y) in a.iter().zip(&b) {
            gap = gap.max((x - y).abs() / scale);
        }
    }
    d.push_str(&format!("; tau = 0 gap {gap:.1e}"));
    ensure(ok && gap <= 1e-12, d)
}

// 5 -------------------------------------------------------------------------

fn inequality_suite() -> Check {
    let g = grid(8);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = [f64::INFINITY; 3];
    for case in 0..1000u64 {
        let w = random_vector(g, 10 * case);
        let u = random_vector(g, 10 * case + 1);
        let tau = rng.random_range(0.5..1.5);
        let s = rng.random_range(-0.5..1.5);
        let m = duality_pairing_check(&w, &u, 1.0 - tau + s, tau - s).unwrap();
        worst[0] = worst[0].min(m.margin / m.scale);

        let s1 = rng.random_range(-1.5..2.5);
        let s2 = rng.random_range(-1.5..2.5);
        let theta = rng.random_range(0.0..=1.0);
        let kind = if case % 2 == 0 {
            SobolevKind::Homogeneous
        } else {
            SobolevKind::Inhomogeneous
        };
        let m = interpolation_check(&u, s1, s2, theta, kind).unwrap();
        worst[1] = worst[1].min(m.margin / m.scale);

        let pp = rng.random_range(1.05..6.0);
        let q = pp / (pp - 1.0);
        let x = rng.random_range(0.0..10.0);
        let y = rng.random_range(0.0..10.0);
        let delta = rng.random_range(0.01..5.0);
        let ys = young_split(x, y, delta, pp, q).unwrap();
        worst[2] = worst[2].min(ys.margin / ys.lhs.abs().max(ys.rhs.abs()).max(f64::MIN_POSITIVE));
    }

    // Equality cases.
    let mut sharp = 0.0f64;
    let wm = VectorField::single_mode(g, [1, 2, 0], [0.0, 0.0, 1.0], 0.7).unwrap();
    let um = curl(&wm);
    let m = duality_pairing_check(&wm, &um, 0.3, 0.7).unwrap();
    sharp = sharp.max(m.margin.abs() / m.scale);
    for (s1, s2, theta) in [(-1.0, 2.0, 0.3), (0.5, 1.5, 0.9), (0.0, 1.0, 0.5)] {
        for kind in [SobolevKind::Homogeneous, SobolevKind::Inhomogeneous] {
            let m = interpolation_check(&wm, s1, s2, theta, kind).unwrap();
            sharp = sharp.max(m.margin.abs() / m.scale);
        }
    }
    for (x, delta, p) in [(1.3, 0.25, 3.0), (0.2, 2.0, 1.5), (4.0, 1.0, 2.0)] {
        let q = p / (p - 1.0);
        let y = young_split(x, 1.0, delta, p, q).unwrap().y_star;
        let ys = young_split(x, y, delta, p, q).unwrap();
        sharp = sharp.max(ys.margin.abs() / ys.rhs.abs());
    }
    let ok = worst.iter().all(|&v| v >= -1e-12) && sharp <= 1e-12;
    ensure(
        ok,
        format!(
            "min margin/scale: duality {:.1e}, interpolation {:.1e}, young {:.1e}; equality cases {sharp:.1e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

// 6 -------------------------------------------------------------------------

fn gronwall_lemma() -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for &a in &[0.1, 1.0, 3.0, 10.0] {
        for &b in &[0.2, 1.0, 5.0, 40.0] {
            let t0 = 1.0 / (4.0 * b);
            let n = 400;
            let times: Vec<f64> = (0..=n).map(|i| t0 * i as f64 / n as f64).collect();
            let alpha: Vec<f64> = times.iter().map(|t| a * (b * t).exp()).collect();
            let out = gronwall_check(&GronwallProblem {
                a,
                b_coef: b,
                b: 1.0,
                t1: 1.0,
                times,
                alpha,
            })
            .unwrap();
            ok &= out.status == GronwallStatus::Pass && rel(out.t0, t0) <= 1e-15;
            worst_ratio = worst_ratio.max(out.max_alpha / a);
        }
    }
    ok &= (worst_ratio - 0.25f64.exp()).abs() < 1e-12;
    detail.push(format!("b = 1: max alpha/A = {worst_ratio:.4}"));

    // α' = B(α + α²) with A = B = T1 = 1, RK4.
    let t0 = 1.0 / 18.0;
    let n = 2000;
    let h = t0 / n as f64;
    let f = |a: f64| a + a * a;
    let mut times = vec![0.0];
    let mut alpha = vec![1.0f64];
    for i in 0..n {
        let y = alpha[i];
        let k1 = f(y);
        let k2 = f(y + 0.5 * h * k1);
        let k3 = f(y + 0.5 * h * k2);
        let k4 = f(y + h * k3);
        alpha.push(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        times.push(h * (i + 1) as f64);
    }
    let out = gronwall_check(&GronwallProblem {
        a: 1.0,
        b_coef: 1.0,
        b: 2.0,
        t1: 1.0,
        times,
        alpha,
    })
    .unwrap();
    ok &= out.status == GronwallStatus::Pass && rel(out.t0, t0) <= 1e-15 && out.bound == 3.0;
    detail.push(format!("b = 2: T0 = {:.6}, max alpha = {:.4}", out.t0, out.max_alpha));
    ensure(ok, detail.join("; "))
}

// 7 -------------------------------------------------------------------------

fn existence_formula() -> Check {
    let g = grid(8);
    let p = SystemParams::default();
    let zero = existence_time(
        &VectorField::zeros(g),
        &VectorField::zeros(g),
        &p,
        &Calibration::new(2.5),
    )
    .unwrap()
    .t_e
    .unwrap();
    let unit = existence_time_from_norms(1.0, 0.2, 1.0, 0.0, &Calibration::new(1.0))
        .unwrap()
        .t_e
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut monotone = true;
    for _ in 0..1000 {
        let tau = rng.random_range(0.51..1.5);
        let c1 = rng.random_range(0.1..10.0);
        let un = rng.random_range(0.0..10.0);
        let wn = rng.random_range(0.0..10.0);
        let du = rng.random_range(1e-3..1.0);
        let cal = Calibration::new(c1);
        let te = |u: f64, w: f64| existence_time_from_norms(tau, 0.0, u, w, &cal).unwrap().t_e.unwrap();
        monotone &= te(un + du, wn) < te(un, wn) && te(un, wn + du) < te(un, wn);
    }
    let ok = zero == 2.5 && (unit - 0.25).abs() <= 1e-15 && monotone;
    ensure(ok, format!("zero data {zero}, unit data {unit}, monotone {monotone}"))
}

// 8 -------------------------------------------------------------------------

fn direct_norm_sq(f: &VectorField, s: f64) -> f64 {
    let g = *f.grid();
    (0..g.len())
        .map(|idx| {
            let w = (1.0 + g.k_sq(idx)).powf(s);
            f.at(idx).iter().map(|c| c.norm_sqr()).sum::<f64>() * w
        })
        .sum()
}

fn negative_regularity() -> Check {
    let sigma = -0.4;
    let tau = 0.55;
    let rw = IcRecipe::random(SobolevIndex::inhomogeneous(sigma), 0.05, 2024);
    let ru = IcRecipe::random(SobolevIndex::homogeneous(tau), 0.05, 2025);
    let mut neg = Vec::new();
    let mut l2 = Vec::new();
    for n in [32, 64, 128] {
        let w = make_angular_ic(&rw, &grid(n)).unwrap();
        neg.push(direct_norm_sq(&w, sigma).sqrt());
        l2.push(direct_norm_sq(&w, 0.0).sqrt());
    }
    let stable = neg.iter().all(|v| rel(*v, neg[0]) <= 0.02);
    let growth: Vec<f64> = l2.windows(2).map(|w| w[1] / w[0]).collect();
    let grows = growth.iter().all(|&r| r >= 1.2);

    let p = SystemParams {
        nu: 1.0,
        mu: 1.0,
        eps: 0.0,
        tau,
        sigma,
    };
    let cal = Calibration::new(1.0);
    let mut consts = Vec::new();
    for n in [32, 48] {
        let g = grid(n);
        let s0 = State::initial(
            &make_velocity_ic(&ru, &g).unwrap(),
            &make_angular_ic(&rw, &g).unwrap(),
            0.0,
        )
        .unwrap();
        let probe = simulate(s0.clone(), &p, &StepPolicy::fixed(1e-3, 1e-3)).unwrap();
        let te = existence_from_ledger(&probe.ledger, &p, &cal).unwrap().t_e.unwrap();
        let t_end = te.min(0.05);
        let t = simulate(s0, &p, &StepPolicy::fixed(1e-3, t_end)).unwrap();
        consts.push(uniform_bound_constant(&t.ledger, t_end).unwrap().constant.unwrap());
    }
    let spread = rel(consts[0], consts[1]);
    let ok = stable && grows && spread <= 0.25;
    ensure(
        ok,
        format!(
            "H^-0.4 norms {:.4e}/{:.4e}/{:.4e}; L2 growth {:.3}, {:.3}; C = {:.4} (n=32), {:.4} (n=48), spread {:.1}%",
            neg[0],
            neg[1],
            neg[2],
            growth[0],
            growth[1],
            consts[0],
            consts[1],
            100.0 * spread
        ),
    )
}

// 9 -------------------------------------------------------------------------

fn space_time_l2(a: &Trajectory, b: &Trajectory) -> f64 {
    let mut total = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for ((ta, sa), (tb, sb)) in a.snapshots.iter().zip(&b.snapshots) {
        assert!((ta - tb).abs() < 1e-12);
        let d = rel_sq(&sa.u, &sb.u) + rel_sq(&sa.w, &sb.w);
        if let Some((t0, d0)) = prev {
            total += 0.5 * (ta - t0) * (d + d0);
        }
        prev = Some((*ta, d));
    }
    total.sqrt()
}

fn rel_sq(a: &VectorField, b: &VectorField) -> f64 {
    let mut d = a.clone();
    d -= b;
    d.norm_sq()
}

fn eps_refinement() -> Check {
    let p = balance_params(1.0, 0.2);
    let mut policy = StepPolicy::fixed(1e-3, 0.2);
    policy.snapshot_stride = 10;
    let trajs: Vec<Trajectory> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&eps| {
            let p = SystemParams { eps, ..p };
            simulate(smooth_state(grid(32), eps), &p, &policy).unwrap()
        })
        .collect();
    let d1 = space_time_l2(&trajs[0], &trajs[1]);
    let d2 = space_time_l2(&trajs[1], &trajs[2]);
    ensure(
        d1 > d2 && d2 > 0.0,
        format!("d(0.2, 0.1) = {d1:.4e}, d(0.1, 0.05) = {d2:.4e}"),
    )
}

// 10 ------------------------------------------------------------------------

fn absorption_trend() -> Check {
    let ratios: Vec<f64> = [1.0f64, 4.0, 16.0]
        .iter()
        .map(|&muv| {
            let p = SystemParams {
                nu: muv.sqrt(),
                mu: muv.sqrt(),
                eps: 0.0,
                tau: 1.0,
                sigma: 0.0,
            };
            let t = simulate(smooth_state(grid(32), 0.0), &p, &StepPolicy::fixed(1e-3, 0.1)).unwrap();
            viscosity_absorption_report(&t.ledger, &p).unwrap()
        })
        .collect();
    let ok = ratios.windows(2).all(|w| w[1] <= w[0]);
    ensure(
        ok,
        format!("ratios {:.4e}, {:.4e}, {:.4e}", ratios[0], ratios[1], ratios[2]),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 10] = [
        ("spectral identities", spectral_identities),
        ("pressure Poisson identity", pressure_identity),
        ("L2 energy balances", l2_balances),
        ("fractional energy balances", fractional_balances),
        ("inequality suite", inequality_suite),
        ("Gronwall lemma", gronwall_lemma),
        ("existence-time formula", existence_formula),
        ("negative-regularity data", negative_regularity),
        ("eps refinement", eps_refinement),
        ("mu nu absorption sweep", absorption_trend),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("[PASS] #{:<2} {name}: {d} ({secs:.1}s)", i + 1),
            Err(d) => {
                failed += 1;
                println!("[FAIL] #{:<2} {name}: {d} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
