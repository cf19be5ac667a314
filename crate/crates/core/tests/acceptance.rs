//! Acceptance criteria 1 to 11, one line each.
//!
//! Runs without the libtest harness so every line is printed whether or
//! not it passes. The experiment criteria reuse the reference runs behind
//! `verify`; criteria 8 and 11 are additionally checked against oracles
//! written here, independent of the library's own search routines.

use std::process::ExitCode;
use std::time::Instant;

use ftrl_approach::geometry::{cap_generator, ConeSpec, NormTag};
use ftrl_approach::global_cost::separate;
use ftrl_approach::harness::verify::{criterion, Check};
use ftrl_approach::solvers::weighted::min_weighted_lp_norm;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const TITLES: [&str; 11] = [
    "swap regret",
    "internal regret",
    "combinatorial regret",
    "global cost, ℓ∞",
    "global cost, arbitrary norm",
    "Blackwell guarantee",
    "Blackwell/FTRL equivalence",
    "distance = support",
    "high-probability bound",
    "rate slopes",
    "closed-form oracles vs grid",
];

fn lp(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Minimizes a convex function of one variable on `[lo, hi]`.
fn golden(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (lo, hi);
    let (mut a, mut b) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    fa.min(fb).min(f(lo)).min(f(hi))
}

/// `min_{λ ∈ [0, u]^k} ‖Rλ − y‖_p` by nested golden section; partial
/// minimization keeps every level convex.
fn nested_distance(rays: &[Vec<f64>], y: &[f64], p: f64, u: f64) -> f64 {
    fn level(rays: &[Vec<f64>], lam: &[f64], y: &[f64], p: f64, u: f64) -> f64 {
        if lam.len() == rays.len() {
            let mut v = y.to_vec();
            for (l, r) in lam.iter().zip(rays) {
                for (vi, ri) in v.iter_mut().zip(r) {
                    *vi -= l * ri;
                }
            }
            return lp(&v, p);
        }
        let f = |t: f64| {
            let mut next = lam.to_vec();
            next.push(t);
            level(rays, &next, y, p, u)
        };
        golden(&f, 0.0, u, 70)
    }
    level(rays, &[], y, p, u)
}

fn smallest_singular_value(cols: &[Vec<f64>]) -> f64 {
    let m = DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i]);
    m.svd(false, false).singular_values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// A random cone in the library's form and as generating rays.
fn random_cone(rng: &mut ChaCha8Rng, d: usize) -> (ConeSpec, Vec<Vec<f64>>) {
    loop {
        match rng.random_range(0..3) {
            0 => {
                let rays: Vec<Vec<f64>> = (0..d)
                    .map(|i| {
                        let mut e = vec![0.0; d];
                        e[i] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                        e
                    })
                    .collect();
                let cone = ConeSpec::finitely_generated(rays.clone()).unwrap();
                return (cone, rays);
            }
            1 => {
                let k = rng.random_range(1..=d);
                let rays: Vec<Vec<f64>> =
                    (0..k).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
                if smallest_singular_value(&rays) < 0.2 {
                    continue;
                }
                return (ConeSpec::finitely_generated(rays.clone()).unwrap(), rays);
            }
            _ => {
                // {x : Nx ≤ 0} is generated by the columns of −N⁻¹
                let normals: Vec<Vec<f64>> =
                    (0..d).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
                if smallest_singular_value(&normals) < 0.2 {
                    continue;
                }
                let n = DMatrix::from_fn(d, d, |i, j| normals[i][j]);
                let inv = n.try_inverse().unwrap();
                let rays = (0..d).map(|j| (0..d).map(|i| -inv[(i, j)]).collect()).collect();
                return (ConeSpec::halfspaces(normals).unwrap(), rays);
            }
        }
    }
}

fn distance_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let exponents = [1.0, 2.0, 3.0, f64::INFINITY];
    let cases: Vec<_> = (0..100)
        .map(|_| {
            let d = rng.random_range(2..=3);
            let (cone, rays) = random_cone(&mut rng, d);
            let p = exponents[rng.random_range(0..exponents.len())];
            let y: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            (cone, rays, p, y)
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|(cone, rays, p, y)| {
            let norm = if p.is_infinite() { NormTag::linf() } else { NormTag::Lp { p: *p } };
            let support = cap_generator(&cone.polar(), norm.dual()).support_function(y, 1e-10).unwrap();
            // the optimum has ‖Rλ‖ ≤ 2‖y‖, and ‖·‖₂ ≤ √d ‖·‖_p
            let d = y.len() as f64;
            let u = 2.0 * d.sqrt() * lp(y, *p) / smallest_singular_value(rays) * 1.01;
            (support - nested_distance(rays, y, *p, u)).abs()
        })
        .reduce(|| 0.0, f64::max);
    Check::at_most("independent oracle: nested golden section", worst, 1e-4, "100 instances, d ≤ 3")
}

fn random_exponent(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.25) {
        f64::INFINITY
    } else {
        rng.random_range(1.1..8.0)
    }
}

/// `min_a ‖(a y₁, (1 − a) y₂)‖_p` over a grid of step 10⁻³.
fn phi_on_grid(y: [f64; 2], p: f64) -> f64 {
    (0..=1000)
        .map(|k| {
            let a = k as f64 * 1e-3;
            lp(&[a * y[0], (1.0 - a) * y[1]], p)
        })
        .fold(f64::INFINITY, f64::min)
}

fn q_of(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `max_{y' ∈ Δ₂} φ_p(y')‖z₊‖_q + ⟨z', y'⟩` over a grid of step 10⁻³.
fn separation_on_grid(z: [f64; 2], zp: [f64; 2], p: f64) -> f64 {
    let s = lp(&[z[0].max(0.0), z[1].max(0.0)], q_of(p));
    (0..=1000)
        .map(|k| {
            let t = k as f64 * 1e-3;
            let y = [t, 1.0 - t];
            let phi = golden(&|a: f64| lp(&[a * y[0], (1.0 - a) * y[1]], p), 0.0, 1.0, 80);
            s * phi + zp[0] * y[0] + zp[1] * y[1]
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn closed_form_oracles() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_phi = 0.0_f64;
    for _ in 0..1000 {
        let y = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let p = random_exponent(&mut rng);
        let (phi, _) = min_weighted_lp_norm(&y, p).unwrap();
        worst_phi = worst_phi.max((phi - phi_on_grid(y, p)).abs());
    }
    let cases: Vec<_> = (0..1000)
        .map(|k| {
            let z = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let hi = if k % 2 == 0 { 0.0 } else { 1.0 };
            let zp = [rng.random_range(-1.0..hi), rng.random_range(-1.0..hi)];
            (z, zp, random_exponent(&mut rng))
        })
        .collect();
    let results: Vec<(f64, bool)> = cases
        .par_iter()
        .map(|&(z, zp, p)| {
            let grid = separation_on_grid(z, zp, p);
            match separate(&z, &zp, p, 1e-9).unwrap() {
                None => (0.0, grid <= 1e-3),
                Some(cut) => {
                    let x = [z[0], z[1], zp[0], zp[1]];
                    let value = cut.value(&x);
                    let valid = ConeSpec::GlobalCost { d: 2, p }.contains(&cut.concat(), 1e-8).unwrap() && value > 0.0;
                    let from_max = cut.y.iter().any(|v| *v != 0.0);
                    (if from_max { (value - grid).abs() } else { 0.0 }, valid && grid >= -1e-3)
                }
            }
        })
        .collect();
    let worst_sep = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let wrong = results.iter().filter(|r| !r.1).count();
    vec![
        Check::at_most("independent grid: weighted norm", worst_phi, 1e-3, "1000 instances, d = 2"),
        Check::at_most("independent grid: separation value", worst_sep, 1e-3, "1000 instances, d = 2"),
        Check::at_most("independent grid: separation verdicts", wrong as f64, 0.0, "1000 instances"),
    ]
}

fn main() -> ExitCode {
    // `cargo test --test acceptance -- 8 11` runs a subset
    let picked: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for n in (1..=11).filter(|n| picked.is_empty() || picked.contains(n)) {
        let start = Instant::now();
        let mut checks = match criterion(n) {
            Ok(c) => c,
            Err(e) => vec![Check::flag("reference run", false, e.to_string())],
        };
        match n {
            8 => checks.push(distance_oracle()),
            11 => checks.extend(closed_form_oracles()),
            _ => {}
        }
        let secs = start.elapsed().as_secs_f64();
        let bad: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
        let tightest = checks.iter().min_by(|a, b| a.margin().total_cmp(&b.margin())).unwrap();
        let verdict = if bad.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} {verdict}  {:<28} {} checks, tightest margin {:.3e} ({}), {secs:.1}s",
            TITLES[n - 1],
            checks.len(),
            tightest.margin(),
            tightest.name
        );
        for c in &bad {
            println!("    failed: {} value {:.4e} threshold {:.4e} {}", c.name, c.value, c.threshold, c.detail);
        }
        failed += !bad.is_empty() as usize;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
