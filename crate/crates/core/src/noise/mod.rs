//! Classical noise models: ensembles of random telegraph noise (RTN) sources
//! and the single multi-state Markovian fluctuator that approximates
//! `1/f^alpha` noise with a number of levels linear in the number of
//! Lorentzian components.
//!
//! A model is a symmetric rate generator `Γ` (`Γ[k][j]` is the rate from level
//! `j` to level `k`, columns sum to zero) together with the noise amplitude
//! `b[k]` of each level. The stationary law is uniform and the amplitudes sum
//! to zero, so the noise is unbiased.

mod periodogram;
mod trajectory;

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub use periodogram::periodogram;
pub use trajectory::NoiseTrajectory;

/// Largest number of independent RTN sources accepted by
/// [`NoiseModel::rtn_ensemble`]; the product space has `2^K` levels.
pub const MAX_RTN_SOURCES: usize = 12;

/// Largest exponent `m` accepted by [`NoiseModel::multistate_fluctuator`].
pub const MAX_FLUCTUATOR_EXPONENT: u32 = 12;

/// Relative tolerance for the generator and amplitude invariants.
const INVARIANT_TOL: f64 = 1e-12;

/// Upper end of the rate band `[1/τ_c, 30/τ_c]` used by the `1/f` presets.
pub const RATE_SPAN: f64 = 30.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "NoiseModelDocument", try_from = "NoiseModelDocument")]
pub struct NoiseModel {
    generator: DMatrix<f64>,
    amplitudes: DVector<f64>,
    alpha: Option<f64>,
    rate_grid: Vec<f64>,
    prefactor: Option<f64>,
    spectrum: OnceLock<SpectralDecomposition>,
}

/// Eigen-decomposition `Γ = V Λ Vᵀ` with eigenvalues in descending order and
/// the weights `χ = Vᵀ b / √M`, so that `C(t) = Σ χ_k² exp(λ_k |t|)`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub weights: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// On-disk form of a [`NoiseModel`]. `Γ` is not stored; it is rebuilt from
/// `gamma_grid`:
///
/// * empty grid: `Γ = 0` (frozen levels);
/// * `M − 1` rates: Hadamard-diagonalized generator with eigenvalues
///   `−2·{0, γ_1, …, γ_{M−1}}`;
/// * `log2 M` rates: Kronecker sum of two-level RTN generators.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NoiseModelDocument {
    #[serde(rename = "M")]
    pub num_states: usize,
    pub alpha: Option<f64>,
    pub gamma_grid: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "A")]
    pub prefactor: Option<f64>,
}

fn parity(x: usize) -> f64 {
    if x.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn power_of_two_exponent(n: usize) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

/// Generator `H^{⊗m} diag(λ) H^{⊗m}` with `λ = −2·{0, rates…}`, assembled
/// entrywise from its XOR structure: `Γ[x][x'] = g(x ⊕ x')`.
fn hadamard_generator(rates: &[f64]) -> DMatrix<f64> {
    let m = rates.len() + 1;
    let inv = 1.0 / m as f64;
    let mut g = vec![0.0; m];
    for (d, gd) in g.iter_mut().enumerate().skip(1) {
        let s: f64 = rates
            .iter()
            .enumerate()
            .map(|(i, r)| parity(d & (i + 1)) * r)
            .sum();
        *gd = -2.0 * s * inv;
    }
    g[0] = -g[1..].iter().sum::<f64>();
    DMatrix::from_fn(m, m, |x, y| g[x ^ y])
}

/// `b = √M · H^{⊗m} χ`, i.e. `b[x] = Σ_y (−1)^{x·y} χ[y]`.
fn walsh_amplitudes(chi: &[f64]) -> DVector<f64> {
    let m = chi.len();
    DVector::from_fn(m, |x, _| {
        chi.iter()
            .enumerate()
            .map(|(y, c)| parity(x & y) * c)
            .sum()
    })
}

fn rtn_generator(rates: &[f64]) -> DMatrix<f64> {
    let m = 1usize << rates.len();
    let total: f64 = rates.iter().sum();
    let mut gen = DMatrix::zeros(m, m);
    for s in 0..m {
        gen[(s, s)] = -total;
        for (k, r) in rates.iter().enumerate() {
            gen[(s ^ (1 << k), s)] = *r;
        }
    }
    gen
}

fn validate(generator: &DMatrix<f64>, amplitudes: &DVector<f64>) -> Result<()> {
    let m = generator.nrows();
    if m == 0 || !generator.is_square() {
        return Err(Error::InvalidNoise(format!(
            "generator must be square and non-empty, got {}x{}",
            generator.nrows(),
            generator.ncols()
        )));
    }
    if amplitudes.len() != m {
        return Err(Error::InvalidNoise(format!(
            "{} amplitudes for {m} levels",
            amplitudes.len()
        )));
    }
    if generator.iter().chain(amplitudes.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidNoise("non-finite entry".into()));
    }
    let scale = generator.amax().max(1.0);
    let tol = INVARIANT_TOL * scale;
    for j in 0..m {
        let col_sum: f64 = generator.column(j).sum();
        if col_sum.abs() > tol {
            return Err(Error::InvalidNoise(format!(
                "column {j} of the generator sums to {col_sum:e}"
            )));
        }
        for k in 0..m {
            let v = generator[(k, j)];
            if (v - generator[(j, k)]).abs() > tol {
                return Err(Error::InvalidNoise(format!(
                    "generator is not symmetric at ({k}, {j})"
                )));
            }
            if k != j && v < -tol {
                return Err(Error::InvalidNoise(format!(
                    "negative transition rate {v:e} from {j} to {k}"
                )));
            }
        }
    }
    let b_scale = amplitudes.amax().max(1.0);
    let b_sum = amplitudes.sum();
    if b_sum.abs() > INVARIANT_TOL * b_scale * m as f64 {
        return Err(Error::InvalidNoise(format!(
            "amplitudes sum to {b_sum:e}; the noise must be unbiased"
        )));
    }
    Ok(())
}

impl NoiseModel {
    /// Validated model from an explicit generator and amplitudes.
    pub fn new(generator: DMatrix<f64>, amplitudes: DVector<f64>) -> Result<Self> {
        validate(&generator, &amplitudes)?;
        Ok(Self {
            generator,
            amplitudes,
            alpha: None,
            rate_grid: Vec::new(),
            prefactor: None,
            spectrum: OnceLock::new(),
        })
    }

    /// One frozen level with zero amplitude.
    pub fn noiseless() -> Self {
        Self::new(DMatrix::zeros(1, 1), DVector::zeros(1)).expect("trivial model is valid")
    }

    /// Two frozen levels `±delta`: a static bias whose sign is averaged over.
    pub fn static_bias(delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::InvalidNoise("non-finite bias".into()));
        }
        Self::new(DMatrix::zeros(2, 2), DVector::from_vec(vec![delta, -delta]))
    }

    /// Single `2^m`-level fluctuator whose nonzero eigenvalues are
    /// `−2γ_k` on the uniform grid `γ_k = γ_min + (k−2)δ`, `k = 2..M`, with
    /// eigenvectors the Hadamard basis and weights `χ_k = γ_k^{−α/2}`.
    ///
    /// The spectral prefactor is `A = 1/(2δ)`, which makes the rate density
    /// and weights satisfy `Δ²(γ) g(γ) = 2Aγ^{−α}`.
    pub fn multistate_fluctuator(m: u32, gamma_min: f64, delta: f64, alpha: f64) -> Result<Self> {
        if !(2..=MAX_FLUCTUATOR_EXPONENT).contains(&m) {
            return Err(Error::InvalidNoise(format!(
                "exponent m = {m} outside 2..={MAX_FLUCTUATOR_EXPONENT}"
            )));
        }
        if !(gamma_min > 0.0 && gamma_min.is_finite()) || !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidNoise("rates must be positive and finite".into()));
        }
        if delta > gamma_min {
            return Err(Error::InvalidNoise(format!(
                "grid spacing {delta} exceeds the smallest rate {gamma_min}"
            )));
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidNoise(format!("alpha = {alpha} outside (0, 2)")));
        }
        let levels = 1usize << m;
        let rates: Vec<f64> = (0..levels - 1)
            .map(|k| gamma_min + k as f64 * delta)
            .collect();
        let mut chi = vec![0.0];
        chi.extend(rates.iter().map(|g| g.powf(-alpha / 2.0)));
        let mut model = Self::new(hadamard_generator(&rates), walsh_amplitudes(&chi))?;
        model.alpha = Some(alpha);
        model.rate_grid = rates;
        model.prefactor = Some(1.0 / (2.0 * delta));
        Ok(model)
    }

    /// Product of `K` independent symmetric RTN sources switching between
    /// `±deltas[k]` at rate `1/taus[k]`. Level `s` has source `k` at
    /// `−deltas[k]` when bit `k` of `s` is set.
    pub fn rtn_ensemble(deltas: &[f64], taus: &[f64]) -> Result<Self> {
        if deltas.is_empty() || deltas.len() != taus.len() {
            return Err(Error::InvalidNoise(
                "need matching, non-empty amplitude and correlation-time lists".into(),
            ));
        }
        if deltas.len() > MAX_RTN_SOURCES {
            return Err(Error::InvalidNoise(format!(
                "{} RTN sources exceed the cap of {MAX_RTN_SOURCES} (2^K levels)",
                deltas.len()
            )));
        }
        if deltas
            .iter()
            .chain(taus)
            .any(|v| !(*v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidNoise(
                "RTN amplitudes and correlation times must be positive".into(),
            ));
        }
        let rates: Vec<f64> = taus.iter().map(|t| 1.0 / t).collect();
        let levels = 1usize << deltas.len();
        let amplitudes = DVector::from_fn(levels, |s, _| {
            deltas
                .iter()
                .enumerate()
                .map(|(k, d)| if s >> k & 1 == 0 { *d } else { -*d })
                .sum()
        });
        let mut model = Self::new(rtn_generator(&rates), amplitudes)?;
        model.rate_grid = rates;
        Ok(model)
    }

    /// `1/f^α` fluctuator with rates on `[1/τ_c, min(30, M−1)/τ_c]` scaled to
    /// mean absolute amplitude `strength`.
    ///
    /// With `δ ≤ γ_min` the uniform grid can span at most a factor `M − 1`,
    /// so models with fewer than 32 levels use the widest admissible band.
    pub fn one_over_f(m: u32, tau_c: f64, alpha: f64, strength: f64) -> Result<Self> {
        if !(tau_c > 0.0 && tau_c.is_finite()) {
            return Err(Error::InvalidNoise(format!("correlation time {tau_c}")));
        }
        let levels = (1u64 << m.min(63)) as f64;
        let span = RATE_SPAN.min(levels - 1.0);
        let gamma_min = 1.0 / tau_c;
        let delta = ((span - 1.0) * gamma_min / (levels - 2.0)).min(gamma_min);
        Self::multistate_fluctuator(m, gamma_min, delta, alpha)?.scale_to_strength(strength)
    }

    pub fn num_states(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn amplitudes(&self) -> &DVector<f64> {
        &self.amplitudes
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn rate_grid(&self) -> &[f64] {
        &self.rate_grid
    }

    pub fn prefactor(&self) -> Option<f64> {
        self.prefactor
    }

    /// `⟨|η|⟩ = (1/M) Σ_k |b_k|` under the uniform stationary law.
    pub fn mean_abs_amplitude(&self) -> f64 {
        self.amplitudes.iter().map(|b| b.abs()).sum::<f64>() / self.num_states() as f64
    }

    pub fn is_noiseless(&self) -> bool {
        self.amplitudes.iter().all(|b| *b == 0.0)
    }

    pub fn spectral_decomposition(&self) -> &SpectralDecomposition {
        self.spectrum
            .get_or_init(|| SpectralDecomposition::of(&self.generator, &self.amplitudes))
    }

    /// `C(t) = (1/M) bᵀ exp(Γ|t|) b`, evaluated with a matrix exponential.
    pub fn autocorrelation(&self, t: f64) -> Result<f64> {
        let propagator = linalg::expm(&(&self.generator * t.abs()))?;
        Ok(self.amplitudes.dot(&(propagator * &self.amplitudes)) / self.num_states() as f64)
    }

    /// Two-sided power spectral density at frequency `f`, as a sum of
    /// Lorentzians over the nonzero eigenvalues.
    pub fn psd(&self, f: f64) -> Result<f64> {
        self.spectral_decomposition().psd(f)
    }

    /// Copy with all amplitudes multiplied by one positive constant so that
    /// `⟨|η|⟩ = target`. The prefactor `A` scales by the square.
    pub fn scale_to_strength(&self, target: f64) -> Result<Self> {
        if !(target > 0.0 && target.is_finite()) {
            return Err(Error::InvalidArgument(format!("target strength {target}")));
        }
        let current = self.mean_abs_amplitude();
        if current == 0.0 {
            return Err(Error::InvalidNoise(
                "cannot rescale a model with all-zero amplitudes".into(),
            ));
        }
        let c = target / current;
        let mut scaled = self.clone();
        scaled.amplitudes *= c;
        scaled.prefactor = self.prefactor.map(|a| a * c * c);
        scaled.spectrum = OnceLock::new();
        Ok(scaled)
    }

    pub fn sample_trajectory(&self, total_time: f64, seed: u64) -> Result<NoiseTrajectory> {
        NoiseTrajectory::sample(self, total_time, seed)
    }

    /// One-line description for reports.
    pub fn describe(&self) -> String {
        let mut s = format!("M={} <|eta|>={}", self.num_states(), self.mean_abs_amplitude());
        if let Some(alpha) = self.alpha {
            s.push_str(&format!(" alpha={alpha}"));
        }
        if let (Some(lo), Some(hi)) = (
            self.rate_grid.iter().cloned().reduce(f64::min),
            self.rate_grid.iter().cloned().reduce(f64::max),
        ) {
            s.push_str(&format!(" rates=[{lo},{hi}]"));
        }
        s
    }

    pub fn to_document(&self) -> NoiseModelDocument {
        self.clone().into()
    }
}

impl From<NoiseModel> for NoiseModelDocument {
    fn from(model: NoiseModel) -> Self {
        Self {
            num_states: model.num_states(),
            alpha: model.alpha,
            gamma_grid: model.rate_grid,
            b: model.amplitudes.iter().cloned().collect(),
            prefactor: model.prefactor,
        }
    }
}

impl TryFrom<NoiseModelDocument> for NoiseModel {
    type Error = Error;

    fn try_from(doc: NoiseModelDocument) -> Result<Self> {
        let m = doc.num_states;
        if doc.b.len() != m || m == 0 {
            return Err(Error::InvalidNoise(format!(
                "document has M = {m} but {} amplitudes",
                doc.b.len()
            )));
        }
        if doc.gamma_grid.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidNoise("gamma_grid entries must be positive".into()));
        }
        let n = doc.gamma_grid.len();
        let exponent = power_of_two_exponent(m);
        let generator = if n == 0 {
            DMatrix::zeros(m, m)
        } else if exponent.is_some() && n == m - 1 {
            hadamard_generator(&doc.gamma_grid)
        } else if exponent == Some(n as u32) {
            rtn_generator(&doc.gamma_grid)
        } else {
            return Err(Error::InvalidNoise(format!(
                "cannot rebuild a {m}-level generator from {n} rates"
            )));
        };
        let mut model = NoiseModel::new(generator, DVector::from_vec(doc.b))?;
        model.alpha = doc.alpha;
        model.rate_grid = doc.gamma_grid;
        model.prefactor = doc.prefactor;
        Ok(model)
    }
}

impl SpectralDecomposition {
    fn of(generator: &DMatrix<f64>, amplitudes: &DVector<f64>) -> Self {
        let m = generator.nrows();
        let eig = SymmetricEigen::new(generator.clone());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let eigenvalues = DVector::from_iterator(m, order.iter().map(|&i| eig.eigenvalues[i]));
        let eigenvectors = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
        let weights = eigenvectors.transpose() * amplitudes / (m as f64).sqrt();
        Self {
            eigenvalues,
            weights,
            eigenvectors,
        }
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.eigenvectors * DMatrix::from_diagonal(&self.eigenvalues) * self.eigenvectors.transpose()
    }

    fn zero_threshold(&self) -> f64 {
        1e-9 * self.eigenvalues.amax().max(1.0)
    }

    /// Total squared weight on (numerically) zero eigenvalues, i.e. the
    /// non-decaying part of the autocorrelation.
    pub fn dc_weight(&self) -> f64 {
        let thr = self.zero_threshold();
        self.eigenvalues
            .iter()
            .zip(self.weights.iter())
            .filter(|(l, _)| l.abs() <= thr)
            .map(|(_, w)| w * w)
            .sum()
    }

    /// `C(t) = Σ_k χ_k² exp(λ_k |t|)`.
    pub fn autocorrelation(&self, t: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(self.weights.iter())
            .map(|(l, w)| w * w * (l * t.abs()).exp())
            .sum()
    }

    /// `S(f) = Σ_{λ_k<0} χ_k² (−2λ_k) / (λ_k² + (2πf)²)`.
    pub fn psd(&self, f: f64) -> Result<f64> {
        if !f.is_finite() {
            return Err(Error::InvalidArgument(format!("frequency {f}")));
        }
        let total: f64 = self.weights.iter().map(|w| w * w).sum();
        let dc = self.dc_weight();
        if dc > 1e-12 * total.max(f64::MIN_POSITIVE) && dc > 0.0 {
            return Err(Error::InvalidNoise(format!(
                "weight {dc:e} on the zero eigenvalue: the spectrum has a DC delta component"
            )));
        }
        let thr = self.zero_threshold();
        let w2 = (2.0 * PI * f).powi(2);
        Ok(self
            .eigenvalues
            .iter()
            .zip(self.weights.iter())
            .filter(|(l, _)| l.abs() > thr)
            .map(|(l, w)| w * w * (-2.0 * l) / (l * l + w2))
            .sum())
    }
}

/// Reference spectrum `A / f^α`.
pub fn ideal_psd(prefactor: f64, alpha: f64, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ideal spectrum needs a positive frequency, got {f}"
        )));
    }
    Ok(prefactor / f.powf(alpha))
}

/// Continuum limit of an RTN ensemble with `Δ²(γ) g(γ) = 2A/γ` on
/// `[γ_min, γ_max]`:
/// `S(f) = (2A / πf) [atan(γ_max / πf) − atan(γ_min / πf)]`.
pub fn band_limited_one_over_f(prefactor: f64, gamma_min: f64, gamma_max: f64, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::InvalidArgument(format!("frequency {f}")));
    }
    let x = PI * f;
    Ok(2.0 * prefactor / x * ((gamma_max / x).atan() - (gamma_min / x).atan()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_invariants(model: &NoiseModel) {
        let g = model.generator();
        let m = model.num_states();
        for j in 0..m {
            assert!(g.column(j).sum().abs() < 1e-12);
            for k in 0..m {
                assert!((g[(k, j)] - g[(j, k)]).abs() < 1e-12);
                if k != j {
                    assert!(g[(k, j)] >= -1e-12);
                }
            }
        }
        assert!(model.amplitudes().sum().abs() < 1e-12);
    }

    #[test]
    fn four_level_fluctuator() {
        let model = NoiseModel::multistate_fluctuator(2, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(model.num_states(), 4);
        assert_invariants(&model);
        let eig = &model.spectral_decomposition().eigenvalues;
        for (got, want) in eig.iter().zip([0.0, -2.0, -4.0, -6.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn eight_level_generator_entries() {
        // Entries from an independent dense V·diag(λ)·Vᵀ evaluation.
        let model = NoiseModel::multistate_fluctuator(3, 1.0, 0.5, 1.5).unwrap();
        let first_row = [-4.375, 0.625, 1.125, 0.125, 2.125, 0.125, 0.125, 0.125];
        let g = model.generator();
        for (j, want) in first_row.iter().enumerate() {
            assert!((g[(0, j)] - want).abs() < 1e-13);
        }
        // XOR-invariant: Γ[x][y] depends only on x ^ y.
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(g[(x, y)], g[(0, x ^ y)]);
            }
        }
        assert_invariants(&model);
    }

    #[test]
    fn fluctuator_rejects_bad_input() {
        assert!(NoiseModel::multistate_fluctuator(1, 1.0, 1.0, 1.0).is_err());
        assert!(NoiseModel::multistate_fluctuator(3, 1.0, 1.5, 1.0).is_err());
        assert!(NoiseModel::multistate_fluctuator(3, -1.0, 0.5, 1.0).is_err());
        assert!(NoiseModel::multistate_fluctuator(3, 1.0, 0.0, 1.0).is_err());
        assert!(NoiseModel::multistate_fluctuator(3, 1.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn fig1_fluctuator_spectrum() {
        let model = NoiseModel::multistate_fluctuator(5, 1.0, 29.0 / 30.0, 1.0).unwrap();
        assert_eq!(model.num_states(), 32);
        let sd = model.spectral_decomposition();
        assert!(sd.eigenvalues[0].abs() < 1e-10);
        assert!((sd.eigenvalues[1] + 2.0).abs() < 1e-10);
        assert!((sd.eigenvalues[31] + 60.0).abs() < 1e-10);
        for k in 1..32 {
            let want = 1.0 / (-sd.eigenvalues[k] / 2.0).sqrt();
            assert!((sd.weights[k].abs() - want).abs() < 1e-10);
        }
        assert!(sd.weights[0].abs() < 1e-12);
    }

    #[test]
    fn rtn_pair_amplitudes() {
        let model = NoiseModel::rtn_ensemble(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(model.amplitudes().as_slice(), &[2.0, 0.0, 0.0, -2.0]);
        assert_invariants(&model);
    }

    #[test]
    fn rtn_rejects_too_many_sources() {
        let d = vec![1.0; MAX_RTN_SOURCES + 1];
        assert!(NoiseModel::rtn_ensemble(&d, &d).is_err());
        assert!(NoiseModel::rtn_ensemble(&[1.0], &[0.0]).is_err());
        assert!(NoiseModel::rtn_ensemble(&[], &[]).is_err());
    }

    #[test]
    fn single_rtn_closed_forms() {
        let (delta, tau) = (0.3, 2.5);
        let model = NoiseModel::rtn_ensemble(&[delta], &[tau]).unwrap();
        let sd = model.spectral_decomposition();
        assert!(sd.eigenvalues[0].abs() < 1e-14);
        assert!((sd.eigenvalues[1] + 2.0 / tau).abs() < 1e-14);
        for t in [0.0f64, 0.4, -1.3, 7.0] {
            let want = delta * delta * (-2.0 * t.abs() / tau).exp();
            assert!((model.autocorrelation(t).unwrap() - want).abs() < 1e-12);
        }
        assert!((model.psd(0.0).unwrap() - delta * delta * tau).abs() < 1e-12);
    }

    #[test]
    fn autocorrelation_at_zero_is_mean_square() {
        let model = NoiseModel::multistate_fluctuator(3, 1.0, 0.5, 1.5).unwrap();
        let ms = model.amplitudes().norm_squared() / 8.0;
        assert!((model.autocorrelation(0.0).unwrap() - ms).abs() < 1e-12);
        let chi2: f64 = model.spectral_decomposition().weights.norm_squared();
        assert!((chi2 - ms).abs() < 1e-12);
    }

    #[test]
    fn ideal_psd_values() {
        assert!((ideal_psd(1.0, 1.0, 10.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((ideal_psd(2.0, 1.5, 4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(ideal_psd(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn arctan_band_form_approaches_one_over_f() {
        let (lo, hi) = (1.0f64, 1e4);
        let f = (lo * hi).sqrt() / PI;
        let s = band_limited_one_over_f(1.0, lo, hi, f).unwrap();
        let ideal = ideal_psd(1.0, 1.0, f).unwrap();
        assert!((s / ideal - 1.0).abs() < 0.05);
    }

    #[test]
    fn scaling_to_strength() {
        let model = NoiseModel::multistate_fluctuator(3, 1.0, 0.5, 1.0).unwrap();
        let scaled = model.scale_to_strength(0.125).unwrap();
        assert!((scaled.mean_abs_amplitude() - 0.125).abs() < 1e-12);
        let again = scaled.scale_to_strength(0.125).unwrap();
        assert!((again.amplitudes() - scaled.amplitudes()).amax() < 1e-15);
        assert_eq!(scaled.generator(), model.generator());
        let r0 = model.psd(0.3).unwrap() / model.psd(2.0).unwrap();
        let r1 = scaled.psd(0.3).unwrap() / scaled.psd(2.0).unwrap();
        assert!((r0 / r1 - 1.0).abs() < 1e-12);
        assert!(NoiseModel::noiseless().scale_to_strength(1.0).is_err());
    }

    #[test]
    fn psd_flags_dc_component() {
        let frozen = NoiseModel::static_bias(0.2).unwrap();
        assert!(frozen.psd(1.0).is_err());
    }

    #[test]
    fn rejects_invalid_generators() {
        let asym = DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, 1.0, -2.0]);
        assert!(NoiseModel::new(asym, DVector::from_vec(vec![1.0, -1.0])).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(NoiseModel::new(neg, DVector::from_vec(vec![1.0, -1.0])).is_err());
        let ok = DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]);
        assert!(NoiseModel::new(ok, DVector::from_vec(vec![1.0, -0.5])).is_err());
    }

    #[test]
    fn one_over_f_preset_band() {
        let model = NoiseModel::one_over_f(5, 3.0, 1.0, 0.125).unwrap();
        let grid = model.rate_grid();
        assert!((grid[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((grid[30] - 10.0).abs() < 1e-12);
        let small = NoiseModel::one_over_f(3, 3.0, 1.0, 0.125).unwrap();
        assert!((small.rate_grid()[6] - 7.0 / 3.0).abs() < 1e-12);
        assert!((small.mean_abs_amplitude() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_rebuilds_generator() {
        for model in [
            NoiseModel::multistate_fluctuator(3, 1.0, 0.5, 1.5).unwrap(),
            NoiseModel::rtn_ensemble(&[0.2, 0.4, 0.1], &[1.0, 3.0, 0.5]).unwrap(),
            NoiseModel::static_bias(0.1).unwrap(),
            NoiseModel::noiseless(),
        ] {
            let text = serde_json::to_string(&model).unwrap();
            let back: NoiseModel = serde_json::from_str(&text).unwrap();
            assert!((back.generator() - model.generator()).amax() < 1e-12);
            assert_eq!(back.amplitudes(), model.amplitudes());
            assert_eq!(back.alpha(), model.alpha());
        }
        let text = serde_json::to_string(&NoiseModel::multistate_fluctuator(2, 1.0, 1.0, 1.0).unwrap())
            .unwrap();
        assert!(text.contains("\"M\":4") && text.contains("\"A\":0.5"));
    }

    #[test]
    fn json_rejects_inconsistent_documents() {
        let doc = r#"{"M":4,"alpha":null,"gamma_grid":[1.0],"b":[1,-1,0,0],"A":null}"#;
        assert!(serde_json::from_str::<NoiseModel>(doc).is_err());
        let doc = r#"{"M":2,"alpha":null,"gamma_grid":[1.0],"b":[1,1],"A":null}"#;
        assert!(serde_json::from_str::<NoiseModel>(doc).is_err());
    }
}
