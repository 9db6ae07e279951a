use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Raw periodogram of a uniformly sampled real signal, in the two-sided
/// convention `S(f) = ∫ C(t) e^{−2πift} dt`: `S(f_k) = (dt/N) |X_k|²` at
/// `f_k = k/(N·dt)` for `k = 1..=N/2`.
pub fn periodogram(samples: &[f64], dt: f64) -> Vec<(f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return Vec::new();
    }
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * dt);
    (1..=n / 2)
        .map(|k| (k as f64 * df, buf[k].norm_sqr() * dt / n as f64))
        .collect()
}
