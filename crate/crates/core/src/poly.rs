//! Dense polynomial helpers on ascending coefficient slices (`c[k]` multiplies `t^k`).

use num_complex::Complex64;

pub fn eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

pub fn eval_complex(coeffs: &[f64], t: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
}

pub fn derivative<T>(coeffs: &[T]) -> Vec<T>
where
    T: Copy + std::ops::Mul<f64, Output = T>,
{
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Coefficient convolution.
pub fn mul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::default(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

pub fn add<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| {
            let x = a.get(k).copied().unwrap_or_default();
            let y = b.get(k).copied().unwrap_or_default();
            x + y
        })
        .collect()
}

/// Monic polynomial `prod (t - r_i)`; `[1]` for no roots.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        out = mul(&out, &[-r, Complex64::new(1.0, 0.0)]);
    }
    out
}

pub fn max_abs(coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
}
