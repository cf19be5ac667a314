//! Small dense-vector helpers on plain slices.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// ℓp norm for p in [1, ∞].
pub fn norm_p(a: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        norm_inf(a)
    } else if p == 1.0 {
        norm1(a)
    } else if p == 2.0 {
        norm2(a)
    } else {
        // scale first so large entries do not overflow
        let m = norm_inf(a);
        if m == 0.0 {
            return 0.0;
        }
        m * a.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Hölder conjugate exponent: 1/p + 1/q = 1.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn positive_part(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| x.max(0.0)).collect()
}

pub fn max_entry(a: &[f64]) -> f64 {
    a.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn argmax(a: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in a.iter().enumerate() {
        if v > a[best] {
            best = i;
        }
    }
    best
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Cosine of the angle between two nonzero vectors.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b) / (norm2(a) * norm2(b))
}

pub fn log_sum_exp(a: &[f64]) -> f64 {
    let m = max_entry(a);
    if !m.is_finite() {
        return m;
    }
    m + a.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Softmax with max-subtraction.
pub fn softmax(a: &[f64]) -> Vec<f64> {
    let m = max_entry(a);
    let e: Vec<f64> = a.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_agree_on_special_exponents() {
        let v = [3.0, -4.0, 1.0];
        assert!((norm_p(&v, 2.0) - 26f64.sqrt()).abs() < 1e-12);
        assert_eq!(norm_p(&v, 1.0), 8.0);
        assert_eq!(norm_p(&v, f64::INFINITY), 4.0);
        let generic = norm_p(&v, 2.0 + 1e-12);
        assert!((generic - 26f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn softmax_is_shift_invariant() {
        let a = softmax(&[1000.0, 1000.0 + 2f64.ln()]);
        assert!((a[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((a[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate_exponent(2.0), 2.0);
        assert_eq!(conjugate_exponent(f64::INFINITY), 1.0);
        assert!((conjugate_exponent(3.0) - 1.5).abs() < 1e-15);
    }
}
