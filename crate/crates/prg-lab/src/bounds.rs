//! Closed-form failure-probability bounds for the switching experiments.

/// Single-formula bound: `(10 k p)^t + (4 m)^(t + k) * eps`.
pub fn switching_bound(k: usize, p: f64, t: usize, m: usize, eps: f64) -> f64 {
    (10.0 * k as f64 * p).powi(t as i32) + (4.0 * m as f64).powi((t + k) as i32) * eps
}

/// Family bound: `4 m^(t/w) (24 p k)^t + (24 m)^(t + k) * eps`. The exponent
/// `t / w` is real-valued.
pub fn multi_switching_bound(m: usize, t: usize, w: usize, p: f64, k: usize, eps: f64) -> f64 {
    4.0 * (m as f64).powf(t as f64 / w as f64) * (24.0 * p * k as f64).powi(t as i32)
        + (24.0 * m as f64).powi((t + k) as i32) * eps
}

/// A bound is informative when it actually constrains a probability.
pub fn informative(bound: f64) -> bool {
    bound < 1.0
}
