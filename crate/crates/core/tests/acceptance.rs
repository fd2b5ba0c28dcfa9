//! Acceptance checks, one line per criterion.

use std::time::Instant;

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use strip_pressure::gibbs::{applicability, ising_condition, ising_q_formula, q_hat};
use strip_pressure::lattice::ColumnBudget;
use strip_pressure::models::{self, Model};
use strip_pressure::pressure::{
    compute_strip, fit_rate, prepare, prepare_with, run_pressure, RunConfig, StripMethod,
};
use strip_pressure::transfer::{perron_sparse, PerronOptions, SparseMatrix};
use strip_pressure::P_C_RIGOROUS;

/// Dense eigensolver on hard-square strips up to n = 18, computed once.
const HARD_SQUARE_ENTROPY_REF: f64 = 0.40749510126068;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn strip_log_lambda(m: &Model, n: usize, p: usize, tol: f64) -> Result<f64, String> {
    let prep = prepare(m, m.top.as_ref().unwrap(), m.bottom.as_ref().unwrap(), p)
        .map_err(|e| e.to_string())?;
    let out = compute_strip(
        &prep,
        n,
        &PerronOptions::with_tol(tol),
        &ColumnBudget::default(),
    )
    .map_err(|e| format!("{} n={n}: {e}", m.name))?;
    Ok(out.log_lambda())
}

fn closed_forms() -> Check {
    let hs = models::hard_core(1.0).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let silver = 1.0 + 2f64.sqrt();
    let l1 = strip_log_lambda(&hs, 1, 1, 1e-14)?.exp();
    let l2 = strip_log_lambda(&hs, 2, 1, 1e-14)?.exp();
    ensure(rel(l1, golden) < 1e-12, || format!("lambda_1 = {l1}"))?;
    ensure(rel(l2, silver) < 1e-12, || format!("lambda_2 = {l2}"))?;
    let mut worst = rel(l1, golden).max(rel(l2, silver));
    for a in [0.5, 1.0, 2.0] {
        let l = strip_log_lambda(&models::hard_core(a).unwrap(), 1, 1, 1e-14)?.exp();
        let want = (1.0 + (1.0 + 4.0 * a).sqrt()) / 2.0;
        ensure(rel(l, want) < 1e-12, || {
            format!("hard_core a={a}: {l} vs {want}")
        })?;
        worst = worst.max(rel(l, want));
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn applicability_numbers() -> Check {
    let mut worst_hc = 0.0f64;
    for i in 0..20 {
        let a = 0.05 + 0.25 * i as f64;
        let m = models::hard_core(a).unwrap();
        let q = q_hat(&m.interaction, &m.sft).map_err(|e| e.to_string())?;
        let want = a / (1.0 + a);
        ensure((q - want).abs() <= 1e-15, || {
            format!("hard_core a={a}: q_hat {q} vs {want}")
        })?;
        worst_hc = worst_hc.max((q - want).abs());
    }
    let mut worst_ising = 0.0f64;
    for beta in [0.0, 0.01, 0.05, 0.1, 0.3, 1.0] {
        for h in [-2.0, -0.5, 0.0, 0.3, 1.0, 3.5] {
            let m = models::ising(beta, h).unwrap();
            let q = q_hat(&m.interaction, &m.sft).map_err(|e| e.to_string())?;
            let want = ising_q_formula(beta, h);
            ensure((q - want).abs() <= 1e-14, || {
                format!("ising beta={beta} h={h}: q_hat {q} vs formula {want}")
            })?;
            worst_ising = worst_ising.max((q - want).abs());
        }
    }

    let pc = P_C_RIGOROUS;
    let a_star = pc / (1.0 - pc);
    let gate = |a: f64| {
        let m = models::hard_core(a).unwrap();
        applicability(&m.interaction, &m.sft, &m.kind, pc)
            .unwrap()
            .passes
    };
    ensure(
        gate(a_star * (1.0 - 1e-9)) && !gate(a_star * (1.0 + 1e-9)),
        || format!("hard-core gate does not flip at a = {a_star}"),
    )?;
    let log_ratio = (pc / (1.0 - pc)).ln();
    for h in [0.0, 0.5, -1.5, 3.0] {
        let beta_star = log_ratio / (2.0 * (4.0 - f64::abs(h)));
        let cond = |beta: f64| {
            let m = models::ising(beta, h).unwrap();
            let r = applicability(&m.interaction, &m.sft, &m.kind, pc).unwrap();
            ensure(
                r.ising_condition == Some(ising_condition(beta, h, pc)),
                || "report disagrees with ising_condition".into(),
            )
            .map(|_| r.ising_condition.unwrap())
        };
        ensure(
            cond(beta_star * (1.0 - 1e-9))? && !cond(beta_star * (1.0 + 1e-9))?,
            || format!("Ising condition does not flip at beta = {beta_star} (h={h})"),
        )?;
    }
    Ok(format!(
        "hard-core max err {worst_hc:.1e}, Ising max err {worst_ising:.1e}, flips at a={a_star:.6} and 2b(4-|h|)={log_ratio:.6}"
    ))
}

fn pressure_identity() -> Check {
    use StripMethod::{Cyclic, Recoded};
    // 3-colorings give reducible strips, and recoded 4-checkerboard strips
    // exceed the edge budget beyond n = 5; the cyclic method covers n <= 8.
    let cases: Vec<(Model, usize, StripMethod, usize)> = vec![
        (models::builtin("hard_square").unwrap(), 1, Recoded, 8),
        (models::hard_core(0.5).unwrap(), 1, Recoded, 8),
        (models::hard_core(2.0).unwrap(), 1, Recoded, 8),
        (
            models::hard_core_with(0.7, models::HardCoreConvention::Raw).unwrap(),
            1,
            Recoded,
            8,
        ),
        (models::ising(0.02, 0.0).unwrap(), 1, Recoded, 8),
        (models::ising(0.1, 0.7).unwrap(), 1, Recoded, 8),
        (models::checkerboard(4).unwrap(), 2, Cyclic, 8),
        (models::checkerboard(4).unwrap(), 2, Recoded, 4),
        (models::checkerboard(12).unwrap(), 2, Cyclic, 2),
        (models::zero(2).unwrap(), 1, Recoded, 8),
        (models::zero(3).unwrap(), 1, Recoded, 8),
        (models::zero(2).unwrap(), 2, Cyclic, 8),
    ];
    let mut worst = 0.0f64;
    let mut strips = 0;
    for (m, p, method, n_max) in &cases {
        let prep = prepare_with(
            m,
            m.top.as_ref().unwrap(),
            m.bottom.as_ref().unwrap(),
            *p,
            *method,
        )
        .map_err(|e| e.to_string())?;
        for n in 1..=*n_max {
            let out = compute_strip(
                &prep,
                n,
                &PerronOptions::with_tol(1e-13),
                &ColumnBudget::default(),
            )
            .map_err(|e| format!("{} n={n}: {e}", m.name))?;
            let resid = (out.log_lambda() - (out.entropy() - out.expected_phi())).abs();
            ensure(resid < 1e-9, || {
                format!("{} n={n}: residual {resid:e}", m.name)
            })?;
            worst = worst.max(resid);
            strips += 1;
        }
    }
    Ok(format!("{strips} strips, max residual {worst:.2e}"))
}

fn hard_square_convergence() -> Check {
    let mut cfg = RunConfig::new(models::builtin("hard_square").unwrap(), 1, 16).unwrap();
    cfg.rel_tol = 1e-13;
    let run = run_pressure(&cfg).map_err(|e| e.to_string())?;
    let d = |n: usize| run.diffs.iter().find(|x| x.0 == n).unwrap().1;
    let cauchy = (d(15) - d(14)).abs();
    let err = (d(15) - HARD_SQUARE_ENTROPY_REF).abs();
    ensure(cauchy < 1e-5, || format!("|diff15 - diff14| = {cauchy:e}"))?;
    ensure(err < 1e-5, || {
        format!("diff15 = {} vs reference {HARD_SQUARE_ENTROPY_REF}", d(15))
    })?;
    Ok(format!(
        "diff15 = {:.14}, |diff15-diff14| = {cauchy:.1e}, |diff15-ref| = {err:.1e}",
        d(15)
    ))
}

fn random_primitive(rng: &mut StdRng, dim: usize) -> SparseMatrix {
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut t = Vec::new();
    // a Hamiltonian cycle with one self-loop is irreducible and aperiodic
    for i in 0..dim {
        t.push((perm[i], perm[(i + 1) % dim], rng.random_range(0.1..2.0)));
    }
    t.push((perm[0], perm[0], rng.random_range(0.1..2.0)));
    let extra = rng.random_range(0..4 * dim);
    for _ in 0..extra {
        t.push((
            rng.random_range(0..dim),
            rng.random_range(0..dim),
            rng.random_range(0.01..3.0),
        ));
    }
    t.sort_by_key(|e| (e.0, e.1));
    t.dedup_by_key(|e| (e.0, e.1));
    SparseMatrix::from_triplets(dim, t).unwrap()
}

/// The dense oracle is backward stable, so its eigenvalue may be off by
/// about `eps ||A||_F kappa` with `kappa = |u| |v| / (u . v)`; the enclosure
/// itself involves only sums of positive terms.
fn oracle_slack(a: &SparseMatrix, u: &[f64], v: &[f64], lambda: f64) -> f64 {
    let frob = a.values().iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm = |x: &[f64]| x.iter().map(|y| y * y).sum::<f64>().sqrt();
    let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
    let kappa = norm(u) * norm(v) / dot;
    (8.0 * f64::EPSILON * frob * kappa / lambda).max(1e-13)
}

fn perron_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);
    let rel_tol = 1e-12;
    let opts = PerronOptions::with_tol(rel_tol);
    let mut worst_width = 0.0f64;
    let mut worst_miss = 0.0f64;
    for trial in 0..100 {
        let dim = rng.random_range(2..=200);
        let a = random_primitive(&mut rng, dim);
        let rows = a.to_dense();
        let mut dense = DMatrix::from_fn(dim, dim, |r, c| rows[r][c]);
        balance_parlett_reinsch(&mut dense);
        let lambda = dense
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let pd = perron_sparse(&a, &opts).map_err(|e| format!("trial {trial}: {e}"))?;
        let (lo, hi) = (pd.lambda_lo(), pd.lambda_hi());
        let slack = oracle_slack(&a, &pd.u, &pd.v, lambda);
        ensure(
            lo <= lambda * (1.0 + slack) && lambda <= hi * (1.0 + slack),
            || {
                format!("trial {trial} (dim {dim}): [{lo}, {hi}] misses {lambda} (oracle slack {slack:e})")
            },
        )?;
        let miss = ((lo - lambda).max(lambda - hi).max(0.0) / lambda) / slack;
        worst_miss = worst_miss.max(miss);
        let width = (hi - lo) / lambda;
        ensure(width <= rel_tol, || {
            format!("trial {trial}: width {width:e}")
        })?;
        worst_width = worst_width.max(width);
    }
    Ok(format!(
        "100 matrices bracketed, max width/lambda {worst_width:.2e}, worst oracle miss {:.0}% of its slack",
        100.0 * worst_miss
    ))
}

fn empirical_rate() -> Check {
    let mut summary = Vec::new();
    for spec in ["hard_square", "hard_core a=0.5"] {
        let mut cfg = RunConfig::new(models::builtin(spec).unwrap(), 3, 15).unwrap();
        cfg.rel_tol = 1e-15;
        let run = run_pressure(&cfg).map_err(|e| format!("{spec}: {e}"))?;
        let diffs: Vec<_> = run.diffs.iter().copied().filter(|d| d.0 <= 14).collect();
        let fit = fit_rate(&diffs);
        let f = fit.fit().ok_or_else(|| format!("{spec}: {fit:?}"))?;
        ensure(f.r > 0.2 && f.r_squared > 0.98, || {
            format!("{spec}: R = {} R^2 = {}", f.r, f.r_squared)
        })?;
        summary.push(format!("{spec}: R={:.3} R^2={:.4}", f.r, f.r_squared));
    }
    Ok(summary.join(", "))
}

fn markov_bookkeeping() -> Check {
    let cases = [
        (models::builtin("hard_square").unwrap(), 6),
        (models::hard_core(0.5).unwrap(), 6),
        (models::ising(0.05, 0.4).unwrap(), 4),
        (models::zero(2).unwrap(), 4),
        (models::zero(3).unwrap(), 3),
    ];
    let mut worst = 0.0f64;
    let mut strips = 0;
    for (m, n_max) in &cases {
        let prep = prepare(m, m.top.as_ref().unwrap(), m.bottom.as_ref().unwrap(), 1).unwrap();
        for n in 1..=*n_max {
            let out = compute_strip(
                &prep,
                n,
                &PerronOptions::with_tol(1e-14),
                &ColumnBudget::default(),
            )
            .map_err(|e| e.to_string())?;
            let c = out.chain().unwrap();
            if c.num_states() > 30 {
                continue;
            }
            let h1 = c.conditional_entropy_given_past(1);
            let h2 = c.conditional_entropy_given_past(2);
            ensure((h2 - h1).abs() < 1e-12, || {
                format!("{} n={n}: H(X0|X-1,X-2)={h2} H(X0|X-1)={h1}", m.name)
            })?;
            worst = worst.max((h2 - h1).abs());
            strips += 1;
        }
    }
    Ok(format!("{strips} strips, max difference {worst:.1e}"))
}

fn p_recoding() -> Check {
    let hs = models::builtin("hard_square").unwrap();
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let l1 = strip_log_lambda(&hs, n, 1, 1e-14)?;
        let l2 = strip_log_lambda(&hs, n, 2, 1e-14)? / 2.0;
        ensure((l1 - l2).abs() < 1e-10, || format!("n={n}: {l1} vs {l2}"))?;
        worst = worst.max((l1 - l2).abs());
    }
    Ok(format!("max |log lambda - log lambda[2]/2| = {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("closed-form strip eigenvalues", closed_forms),
        (
            "applicability numbers and gate flips",
            applicability_numbers,
        ),
        ("strip pressure identity", pressure_identity),
        ("hard-square entropy convergence", hard_square_convergence),
        ("Perron oracle equivalence", perron_oracle),
        ("empirical exponential rate", empirical_rate),
        ("Markov-property bookkeeping", markov_bookkeeping),
        ("p-recoding consistency", p_recoding),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
