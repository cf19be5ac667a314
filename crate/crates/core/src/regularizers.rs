//! Regularizers on generator sets, their leader maps, and certified
//! range and strong-convexity constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConeSpec, GeneratorRepr, GeneratorSet, NormTag};
use crate::solvers::projection::{project_capped_simplex, project_simplex};
use crate::solvers::{pga_maximize, project_onto, FeasibleSet, PgaOptions};
use crate::vector::{conjugate_exponent, dot, log_sum_exp, norm2, norm_p, softmax};

/// Entropy gradients are evaluated at `max(x, ENTROPY_FLOOR)`.
const ENTROPY_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regularizer", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegularizerKind {
    /// `Σ x_i log x_i`
    Entropic { d: usize },
    /// `Σ (x_i/m) log(x_i/m)`
    ScaledEntropic { d: usize, m: usize },
    /// `(scale/2)‖x‖²_{q'}`
    LpSquared { q_prime: f64, scale: f64 },
    /// `½‖x‖₂²`
    EuclideanSquared,
    /// `(A/2)‖z‖₂² + ½‖z'‖²_{q'}` on `(z, z') ∈ ℝ^{2d}`
    CompositeGlobalCost {
        #[serde(rename = "A")]
        a: f64,
        q_prime: f64,
    },
}

impl RegularizerKind {
    fn validate(&self) -> Result<()> {
        let exponent_ok = |q: f64| q > 1.0 && q <= 2.0;
        match *self {
            RegularizerKind::Entropic { d: 0 } => Err(Error::input("entropic regularizer needs d ≥ 1")),
            RegularizerKind::ScaledEntropic { d, m } if m == 0 || m > d => {
                Err(Error::input(format!("scaled entropic needs 1 ≤ m ≤ d (m = {m}, d = {d})")))
            }
            RegularizerKind::LpSquared { q_prime, scale } if !exponent_ok(q_prime) || !(scale > 0.0) => {
                Err(Error::input(format!(
                    "ℓp regularizer needs q' ∈ (1, 2] and scale > 0 (q' = {q_prime}, scale = {scale})"
                )))
            }
            RegularizerKind::CompositeGlobalCost { a, q_prime } if !exponent_ok(q_prime) || !(a > 0.0) => Err(
                Error::input(format!("composite regularizer needs A > 0 and q' ∈ (1, 2] (A = {a}, q' = {q_prime})")),
            ),
            _ => Ok(()),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let xlogx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
        match *self {
            RegularizerKind::Entropic { .. } => x.iter().map(|&v| xlogx(v)).sum(),
            RegularizerKind::ScaledEntropic { m, .. } => {
                let m = m as f64;
                x.iter().map(|&v| xlogx(v / m)).sum()
            }
            RegularizerKind::LpSquared { q_prime, scale } => 0.5 * scale * norm_p(x, q_prime).powi(2),
            RegularizerKind::EuclideanSquared => 0.5 * dot(x, x),
            RegularizerKind::CompositeGlobalCost { a, q_prime } => {
                let (z, zp) = x.split_at(x.len() / 2);
                0.5 * a * dot(z, z) + 0.5 * norm_p(zp, q_prime).powi(2)
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            RegularizerKind::Entropic { .. } => x.iter().map(|&v| v.max(ENTROPY_FLOOR).ln() + 1.0).collect(),
            RegularizerKind::ScaledEntropic { m, .. } => {
                let m = m as f64;
                x.iter().map(|&v| ((v.max(ENTROPY_FLOOR) / m).ln() + 1.0) / m).collect()
            }
            RegularizerKind::LpSquared { q_prime, scale } => {
                mirror(x, q_prime).into_iter().map(|g| scale * g).collect()
            }
            RegularizerKind::EuclideanSquared => x.to_vec(),
            RegularizerKind::CompositeGlobalCost { a, q_prime } => {
                let (z, zp) = x.split_at(x.len() / 2);
                let mut g: Vec<f64> = z.iter().map(|v| a * v).collect();
                g.extend(mirror(zp, q_prime));
                g
            }
        }
    }
}

/// `∇(½‖x‖²_r)`
fn mirror(x: &[f64], r: f64) -> Vec<f64> {
    let n = norm_p(x, r);
    if n == 0.0 {
        return vec![0.0; x.len()];
    }
    x.iter().map(|&v| v.signum() * n * (v.abs() / n).powf(r - 1.0)).collect()
}

/// Range bound Δ and strong-convexity modulus K with respect to `norm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub delta: f64,
    pub k: f64,
    pub norm: NormTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regularizer {
    pub kind: RegularizerKind,
    pub domain: GeneratorSet,
    pub certificate: Certificate,
}

impl Regularizer {
    pub fn new(kind: RegularizerKind, domain: GeneratorSet) -> Result<Self> {
        let certificate = certify_constants(&kind, &domain)?;
        Ok(Regularizer { kind, domain, certificate })
    }

    /// Uses constants established elsewhere instead of the built-in table.
    pub fn with_certificate(kind: RegularizerKind, domain: GeneratorSet, certificate: Certificate) -> Result<Self> {
        kind.validate()?;
        if !(certificate.delta >= 0.0 && certificate.k > 0.0) {
            return Err(Error::input("certificate needs Δ ≥ 0 and K > 0"));
        }
        Ok(Regularizer { kind, domain, certificate })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.kind.value(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.kind.gradient(x)
    }

    /// `argmax_{x∈X} ⟨y, x⟩ − h(x)`.
    pub fn conj_argmax(&self, y: &[f64], tol: f64) -> Result<Vec<f64>> {
        check_dim("conj_argmax", y.len(), self.domain.ambient_dim())?;
        match (&self.kind, &self.domain.repr) {
            (RegularizerKind::Entropic { .. }, GeneratorRepr::Simplex { .. }) => Ok(softmax(y)),
            (RegularizerKind::ScaledEntropic { m, .. }, GeneratorRepr::ScaledCappedSimplex { .. }) => {
                Ok(capped_softmax(y, *m))
            }
            (RegularizerKind::EuclideanSquared, GeneratorRepr::Simplex { .. }) => Ok(project_simplex(y, 1.0)),
            (RegularizerKind::EuclideanSquared, GeneratorRepr::ScaledCappedSimplex { m, .. }) => {
                project_capped_simplex(y, *m as f64)
            }
            (RegularizerKind::EuclideanSquared, GeneratorRepr::BallCapCone { norm, cone, cuts })
                if *norm == NormTag::l2() && cuts.is_empty() && cone.project(y).is_ok() =>
            {
                // proj_K y scaled into the ball is the projection onto K ∩ B₂
                let p = cone.project(y)?;
                let n = norm2(&p);
                Ok(if n > 1.0 { p.iter().map(|v| v / n).collect() } else { p })
            }
            (RegularizerKind::CompositeGlobalCost { a, q_prime }, GeneratorRepr::BallCapCone { norm, cuts, .. }) => {
                let NormTag::GlobalCostDual { d, q } = *norm else {
                    return Err(Error::capability("composite regularizer needs the global-cost dual ball"));
                };
                let params = crate::global_cost::CompositeParams { d, q, a_z: *a, a_zp: 1.0, q_prime: *q_prime };
                crate::global_cost::composite_argmax(&params, cuts, y, &mut Vec::new(), tol)
            }
            _ => {
                let set =
                    self.domain.feasible_set().ok_or_else(|| Error::capability("no projection onto this generator"))?;
                if self.kind == RegularizerKind::EuclideanSquared {
                    return project_onto(&set, y, tol);
                }
                generic_argmax(&self.kind, &set, y, tol)
            }
        }
    }
}

/// Maximizer of `⟨y, x⟩ − h(x)` over the capped simplex for the scaled
/// entropy: `x_i = min(1, exp(m y_i − θ))` with θ fixed by `Σx = m`.
pub fn capped_softmax(y: &[f64], m: usize) -> Vec<f64> {
    let d = y.len();
    let mf = m as f64;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| y[b].total_cmp(&y[a]));
    let s: Vec<f64> = y.iter().map(|v| mf * v).collect();
    for k in 0..m {
        // the top k entries sit at the cap, the rest share m − k
        let rest: Vec<f64> = order[k..].iter().map(|&i| s[i]).collect();
        let theta = log_sum_exp(&rest) - (mf - k as f64).ln();
        let largest_free = (s[order[k]] - theta).exp();
        let smallest_capped_ok = k == 0 || s[order[k - 1]] - theta >= 0.0;
        if largest_free <= 1.0 + 1e-15 && smallest_capped_ok {
            let mut x = vec![0.0; d];
            for (j, &i) in order.iter().enumerate() {
                x[i] = if j < k { 1.0 } else { (s[i] - theta).exp().min(1.0) };
            }
            return x;
        }
    }
    // m = d forces the full vector of ones
    let mut x = vec![0.0; d];
    for &i in &order[..m] {
        x[i] = 1.0;
    }
    x
}

/// Projected gradient ascent on `⟨y, x⟩ − h(x)` over `set`.
pub fn generic_argmax(kind: &RegularizerKind, set: &FeasibleSet, y: &[f64], tol: f64) -> Result<Vec<f64>> {
    let f = |x: &[f64]| {
        let g = kind.gradient(x);
        (dot(y, x) - kind.value(x), y.iter().zip(&g).map(|(a, b)| a - b).collect::<Vec<_>>())
    };
    let x0 = project_onto(set, &vec![0.0; y.len()], tol.max(1e-12))?;
    pga_maximize(f, set, &x0, PgaOptions { tol, ..Default::default() })
}

/// `(Δ, K, norm)` for the supported regularizer/domain pairings.
pub fn certify_constants(kind: &RegularizerKind, domain: &GeneratorSet) -> Result<Certificate> {
    kind.validate()?;
    let n = domain.ambient_dim();
    let mismatch = || Err(Error::capability(format!("no certified constants for {kind:?} on this generator")));
    match (kind, &domain.repr) {
        (RegularizerKind::Entropic { d }, GeneratorRepr::Simplex { d: e }) if d == e => {
            Ok(Certificate { delta: (*d as f64).ln(), k: 1.0, norm: NormTag::l1() })
        }
        (RegularizerKind::ScaledEntropic { d, m }, GeneratorRepr::ScaledCappedSimplex { d: e, m: k })
            if d == e && m == k =>
        {
            let mf = *m as f64;
            Ok(Certificate { delta: (*d as f64 / mf).ln(), k: 1.0 / (mf * mf), norm: NormTag::l1() })
        }
        (RegularizerKind::LpSquared { q_prime, scale }, _) => {
            let delta = match domain.delta {
                Some(v) => v,
                None => numeric_range(kind, domain)?,
            };
            let k = scale * (q_prime - 1.0) * (n as f64).powf(2.0 * (1.0 / q_prime - 1.0));
            Ok(Certificate { delta, k, norm: NormTag::l1() })
        }
        (RegularizerKind::EuclideanSquared, GeneratorRepr::BallCapCone { norm, .. }) if *norm == NormTag::l2() => {
            Ok(Certificate { delta: 0.5, k: 1.0, norm: NormTag::l2() })
        }
        (RegularizerKind::EuclideanSquared, GeneratorRepr::Simplex { d }) => {
            Ok(Certificate { delta: 0.5 * (1.0 - 1.0 / *d as f64), k: 1.0, norm: NormTag::l2() })
        }
        (RegularizerKind::EuclideanSquared, GeneratorRepr::ScaledCappedSimplex { d, m }) => {
            let mf = *m as f64;
            Ok(Certificate { delta: 0.5 * (mf - mf * mf / *d as f64), k: 1.0, norm: NormTag::l2() })
        }
        (
            RegularizerKind::CompositeGlobalCost { a, q_prime },
            GeneratorRepr::BallCapCone { norm: NormTag::GlobalCostDual { d, q }, cone, .. },
        ) => {
            let p = match cone {
                ConeSpec::GlobalCostPolar { p, .. } => *p,
                _ => conjugate_exponent(*q),
            };
            let df = *d as f64;
            let e = if p.is_infinite() { -1.0 } else { 2.0 / p - 1.0 };
            let delta = 0.5 * (a * df.powf(e.max(0.0)) + 1.0);
            let k = a.min((q_prime - 1.0) * df.powf(2.0 * (1.0 / q_prime - 1.0)));
            Ok(Certificate { delta, k, norm: NormTag::GlobalCostDual { d: *d, q: f64::INFINITY } })
        }
        _ => mismatch(),
    }
}

/// `max h − min h` over the domain by projected gradient from 20 random
/// starts. h is convex, so the maximum search is a heuristic lower
/// estimate; callers with a closed form should supply Δ instead.
fn numeric_range(kind: &RegularizerKind, domain: &GeneratorSet) -> Result<f64> {
    let set = domain
        .feasible_set()
        .ok_or_else(|| Error::capability("cannot estimate Δ without a projection onto the generator"))?;
    let n = domain.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_de17a);
    let f = |x: &[f64]| (kind.value(x), kind.gradient(x));
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..20 {
        let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = match pga_maximize(f, &set, &x0, PgaOptions { tol: 1e-9, max_iter: 2_000, initial_step: 1.0 }) {
            Ok(x) => x,
            Err(Error::Solver { iterate, .. }) if !iterate.is_empty() => iterate,
            Err(e) => return Err(e),
        };
        hi = hi.max(kind.value(&x));
    }
    let lo = kind.value(&generic_argmax(kind, &set, &vec![0.0; n], 1e-10)?);
    log::warn!("Δ estimated numerically as {:.6}; supply it when a closed form is known", hi - lo);
    Ok(hi - lo)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongConvexityReport {
    pub samples: usize,
    pub passed: bool,
    /// Smallest `λh(x) + (1−λ)h(x') − K/2·λ(1−λ)‖x−x'‖² − h(λx+(1−λ)x')`.
    pub worst_margin: f64,
}

/// Samples `(x, x', λ)` in the domain and checks the strong-convexity
/// inequality with the certified `(K, norm)`.
pub fn strong_convexity_check(h: &Regularizer, samples: usize, seed: u64) -> Result<StrongConvexityReport> {
    if samples == 0 {
        return Err(Error::input("strong_convexity_check needs at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Certificate { k, norm, .. } = h.certificate;
    let mut worst = f64::INFINITY;
    for s in 0..samples {
        // alternate between spread-out points and points near the boundary
        let concentration = if s % 2 == 0 { 1.0 } else { 0.05 };
        let x = sample_domain(&h.domain, &mut rng, concentration)?;
        let xp = sample_domain(&h.domain, &mut rng, concentration)?;
        let lambda = match s % 10 {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.0..1.0),
        };
        let mid: Vec<f64> = x.iter().zip(&xp).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let diff: Vec<f64> = x.iter().zip(&xp).map(|(a, b)| a - b).collect();
        let rhs = lambda * h.value(&x) + (1.0 - lambda) * h.value(&xp)
            - 0.5 * k * lambda * (1.0 - lambda) * norm.eval(&diff).powi(2);
        worst = worst.min(rhs - h.value(&mid));
    }
    Ok(StrongConvexityReport { samples, passed: worst >= -1e-10, worst_margin: worst })
}

/// Random point of the domain; small `concentration` pushes simplex
/// samples toward faces.
fn sample_domain(domain: &GeneratorSet, rng: &mut ChaCha8Rng, concentration: f64) -> Result<Vec<f64>> {
    let n = domain.ambient_dim();
    let gamma_like = |rng: &mut ChaCha8Rng| {
        // Exp(1)^{1/α} has the right tail behaviour for a rough Dirichlet(α)
        let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        (-u.ln()).powf(1.0 / concentration)
    };
    match &domain.repr {
        GeneratorRepr::Simplex { .. } => {
            let w: Vec<f64> = (0..n).map(|_| gamma_like(rng)).collect();
            let s: f64 = w.iter().sum();
            Ok(w.into_iter().map(|v| v / s).collect())
        }
        GeneratorRepr::ScaledCappedSimplex { m, .. } => {
            let w: Vec<f64> = (0..n).map(|_| gamma_like(rng) * *m as f64).collect();
            project_capped_simplex(&w, *m as f64)
        }
        _ => {
            let set = domain.feasible_set().ok_or_else(|| Error::capability("cannot sample this generator"))?;
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
            project_onto(&set, &v, 1e-12)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropic_examples() {
        let h = Regularizer::new(RegularizerKind::Entropic { d: 2 }, GeneratorSet::simplex(2)).unwrap();
        let x = h.conj_argmax(&[2f64.ln(), 0.0], 1e-9).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-15 && (x[1] - 1.0 / 3.0).abs() < 1e-15);
        let h4 = Regularizer::new(RegularizerKind::Entropic { d: 4 }, GeneratorSet::simplex(4)).unwrap();
        assert_eq!(h4.conj_argmax(&[0.0; 4], 1e-9).unwrap(), vec![0.25; 4]);
        assert_eq!(h4.certificate, Certificate { delta: 4f64.ln(), k: 1.0, norm: NormTag::l1() });
    }

    #[test]
    fn euclidean_on_quarter_disk() {
        let dom = crate::geometry::cap_generator(&ConeSpec::nonneg_orthant(2), NormTag::l2());
        let h = Regularizer::new(RegularizerKind::EuclideanSquared, dom).unwrap();
        assert_eq!(h.conj_argmax(&[1.5, -0.5], 1e-9).unwrap(), vec![1.0, 0.0]);
        assert_eq!(h.certificate.delta, 0.5);
    }

    #[test]
    fn scaled_entropic_constants_and_map() {
        let dom = GeneratorSet::scaled_capped_simplex(8, 2).unwrap();
        let h = Regularizer::new(RegularizerKind::ScaledEntropic { d: 8, m: 2 }, dom).unwrap();
        assert!((h.certificate.delta - 4f64.ln()).abs() < 1e-15);
        assert_eq!(h.certificate.k, 0.25);
        let y = [3.0, 2.5, 0.1, -0.4, 0.0, 0.2, 1.0, -2.0];
        let fast = h.conj_argmax(&y, 1e-10).unwrap();
        assert!((fast.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        // KKT: y − ∇h is constant on uncapped coordinates and no smaller on capped ones
        let g = h.kind.gradient(&fast);
        let resid: Vec<f64> = y.iter().zip(&g).map(|(a, b)| a - b).collect();
        let free: Vec<f64> = (0..8).filter(|&i| fast[i] < 1.0 - 1e-12).map(|i| resid[i]).collect();
        let level = free[0];
        assert!(free.iter().all(|r| (r - level).abs() < 1e-10), "{resid:?}");
        assert!((0..8).filter(|&i| fast[i] >= 1.0 - 1e-12).all(|i| resid[i] >= level - 1e-10));
        // the generic solver agrees to its own accuracy
        let set = h.domain.feasible_set().unwrap();
        let slow = generic_argmax(&h.kind, &set, &y, 1e-11).unwrap();
        assert!(norm2(&crate::vector::sub(&fast, &slow)) < 1e-5, "{fast:?} vs {slow:?}");
    }

    #[test]
    fn composite_constants_at_infinity() {
        let dom = GeneratorSet::ball_cap(
            NormTag::GlobalCostDual { d: 4, q: 1.0 },
            ConeSpec::GlobalCostPolar { d: 4, p: f64::INFINITY },
            Vec::new(),
        );
        let qp = 1.0 + 1.0 / (2.0 * 4f64.ln() - 1.0);
        let h = Regularizer::new(RegularizerKind::CompositeGlobalCost { a: 1.0, q_prime: qp }, dom).unwrap();
        // d^{max(2/p−1, 0)} = 1 when p = ∞
        assert_eq!(h.certificate.delta, 1.0);
        assert!((h.certificate.k - 1.0 / (std::f64::consts::E * (2.0 * 4f64.ln() - 1.0))).abs() < 1e-12);
    }

    #[test]
    fn unsupported_pairing() {
        let r =
            Regularizer::new(RegularizerKind::Entropic { d: 3 }, GeneratorSet::scaled_capped_simplex(3, 1).unwrap());
        assert!(matches!(r, Err(Error::Capability(_))));
    }

    #[test]
    fn strong_convexity_sampling() {
        let h = Regularizer::new(RegularizerKind::Entropic { d: 3 }, GeneratorSet::simplex(3)).unwrap();
        let r = strong_convexity_check(&h, 1000, 7).unwrap();
        assert!(r.passed && r.worst_margin >= -1e-10, "{r:?}");
        let mut inflated = h.clone();
        inflated.certificate.k *= 1.5;
        assert!(!strong_convexity_check(&inflated, 1000, 7).unwrap().passed);
    }

    #[test]
    fn kind_json() {
        let k: RegularizerKind =
            serde_json::from_str(r#"{"regularizer":"composite_global_cost","A":1.0,"q_prime":1.5}"#).unwrap();
        assert_eq!(k, RegularizerKind::CompositeGlobalCost { a: 1.0, q_prime: 1.5 });
    }
}
