//! Wide-sense cyclostationary noise: DCD transform, ACGN generation,
//! periodic autocorrelation and the block noise covariance.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{from_fn, hermitian_eigenvalues};
use crate::{CMatrix, Error, Result};

/// Smallest eigenvalue accepted for a noise covariance matrix.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Filtered-innovation noise model: `Z = h_z * W` where `W` is proper complex
/// white Gaussian noise whose variance follows `variance_profile` periodically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseModelSpec", into = "NoiseModelSpec")]
pub struct NoiseModel {
    variance_profile: Vec<f64>,
    shaping_fir: Vec<f64>,
}

/// Serialized form `{period, memory, variance_profile, shaping_fir}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseModelSpec {
    pub period: usize,
    pub memory: usize,
    pub variance_profile: Vec<f64>,
    pub shaping_fir: Vec<f64>,
}

impl TryFrom<NoiseModelSpec> for NoiseModel {
    type Error = Error;

    fn try_from(s: NoiseModelSpec) -> Result<Self> {
        if s.variance_profile.len() != s.period {
            return Err(Error::invalid(
                "noise.variance_profile",
                format!("expected {} entries (period), got {}", s.period, s.variance_profile.len()),
            ));
        }
        if s.shaping_fir.len() != s.memory + 1 {
            return Err(Error::invalid(
                "noise.shaping_fir",
                format!("expected memory+1 = {} taps, got {}", s.memory + 1, s.shaping_fir.len()),
            ));
        }
        NoiseModel::new(s.variance_profile, s.shaping_fir)
    }
}

impl From<NoiseModel> for NoiseModelSpec {
    fn from(m: NoiseModel) -> Self {
        NoiseModelSpec {
            period: m.period(),
            memory: m.memory(),
            variance_profile: m.variance_profile,
            shaping_fir: m.shaping_fir,
        }
    }
}

impl NoiseModel {
    pub fn new(variance_profile: Vec<f64>, shaping_fir: Vec<f64>) -> Result<Self> {
        if variance_profile.is_empty() {
            return Err(Error::invalid("noise.period", "must be positive"));
        }
        if let Some(v) = variance_profile.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid(
                "noise.variance_profile",
                format!("entries must be strictly positive and finite, found {v}"),
            ));
        }
        if shaping_fir.is_empty() {
            return Err(Error::invalid("noise.shaping_fir", "needs at least one tap"));
        }
        if shaping_fir[0] == 0.0 {
            return Err(Error::invalid("noise.shaping_fir", "leading tap h_z[0] must be nonzero"));
        }
        if shaping_fir.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("noise.shaping_fir", "taps must be finite"));
        }
        Ok(Self {
            variance_profile,
            shaping_fir,
        })
    }

    /// Stationary white noise of variance `sigma2`.
    pub fn white(sigma2: f64) -> Result<Self> {
        Self::new(vec![sigma2], vec![1.0])
    }

    pub fn period(&self) -> usize {
        self.variance_profile.len()
    }

    pub fn memory(&self) -> usize {
        self.shaping_fir.len() - 1
    }

    pub fn variance_profile(&self) -> &[f64] {
        &self.variance_profile
    }

    pub fn shaping_fir(&self) -> &[f64] {
        &self.shaping_fir
    }

    /// Innovation variance at absolute time `m`.
    pub fn innovation_variance(&self, m: i64) -> f64 {
        self.variance_profile[m.rem_euclid(self.period() as i64) as usize]
    }

    /// Same shape with every innovation variance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.variance_profile.iter().map(|v| v * factor).collect(),
            self.shaping_fir.clone(),
        )
    }

    /// `c_z[m,l] = E{Z[m+l] Z*[m]}`.
    pub fn autocorrelation(&self, m: i64, l: i64) -> f64 {
        let lz = self.memory() as i64;
        if l.abs() > lz {
            return 0.0;
        }
        let h = &self.shaping_fir;
        let mut acc = 0.0;
        for k in 0..=lz {
            let kl = k + l;
            if (0..=lz).contains(&kl) {
                acc += h[k as usize] * self.innovation_variance(m - k) * h[kl as usize];
            }
        }
        acc
    }
}

/// Complex-valued wrapper of [`NoiseModel::autocorrelation`].
pub fn analytic_autocorrelation(model: &NoiseModel, m: i64, l: i64) -> Complex64 {
    Complex64::new(model.autocorrelation(m, l), 0.0)
}

/// Draws `length` noise samples for absolute times `0..length`.
pub fn generate_acgn<R: Rng + ?Sized>(model: &NoiseModel, length: usize, rng: &mut R) -> Vec<Complex64> {
    generate_acgn_at(model, 0, length, rng)
}

/// Draws noise samples for absolute times `start_time..start_time+length`.
///
/// The innovation phase is tied to absolute time, so windows drawn at
/// different offsets see the correct cyclostationary phase.
pub fn generate_acgn_at<R: Rng + ?Sized>(
    model: &NoiseModel,
    start_time: i64,
    length: usize,
    rng: &mut R,
) -> Vec<Complex64> {
    let lz = model.memory();
    let first = start_time - lz as i64;
    let w: Vec<Complex64> = (0..length + lz)
        .map(|i| {
            let sd = (0.5 * model.innovation_variance(first + i as i64)).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * sd, im * sd)
        })
        .collect();
    let h = model.shaping_fir();
    (0..length)
        .map(|i| {
            // w index of time start_time + i is i + lz
            h.iter()
                .enumerate()
                .map(|(k, hk)| w[i + lz - k] * *hk)
                .sum()
        })
        .collect()
}

/// `K x K` covariance of one post-processed block:
/// `[C]_{a1,a2} = c_z[-a2, a2 - a1]`, i.e. `E{z[-a1] z*[-a2]}`.
pub fn noise_cov_matrix(model: &NoiseModel, k: usize, n: usize) -> Result<CMatrix> {
    if n == 0 || n % model.period() != 0 {
        return Err(Error::Structural(format!(
            "block length {n} is not a multiple of the noise period {}",
            model.period()
        )));
    }
    if k > n {
        return Err(Error::Structural(format!("K = {k} exceeds N = {n}")));
    }
    let c = from_fn(k, k, |a1, a2| {
        analytic_autocorrelation(model, -(a2 as i64), a2 as i64 - a1 as i64)
    });
    if k > 0 {
        let min_eig = hermitian_eigenvalues(&c)[0];
        if min_eig < -PSD_TOLERANCE {
            return Err(Error::ModelConsistency(format!(
                "noise covariance is not positive semidefinite (smallest eigenvalue {min_eig:e})"
            )));
        }
    }
    Ok(c)
}

/// Decimated components of a sequence with base period `N0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DcdFrame {
    base_period: usize,
    components: Vec<Vec<Complex64>>,
}

impl DcdFrame {
    pub fn new(base_period: usize, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if base_period == 0 || components.len() != base_period {
            return Err(Error::Structural(format!(
                "DCD frame needs {base_period} components, got {}",
                components.len()
            )));
        }
        let len = components[0].len();
        if components.iter().any(|c| c.len() != len) {
            return Err(Error::Structural("ragged DCD components".into()));
        }
        Ok(Self {
            base_period,
            components,
        })
    }

    pub fn base_period(&self) -> usize {
        self.base_period
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    /// Component `q` as a sequence over `n`.
    pub fn component(&self, q: usize) -> &[Complex64] {
        &self.components[q]
    }
}

/// Splits `x` into `N0` decimated components: component `q` at index `n`
/// is `x[n*N0 + q]`.
pub fn dcd_decompose(x: &[Complex64], n0: usize) -> Result<DcdFrame> {
    if n0 == 0 {
        return Err(Error::Structural("DCD base period must be positive".into()));
    }
    if x.len() % n0 != 0 {
        return Err(Error::Structural(format!(
            "sequence length {} is not a multiple of {n0}",
            x.len()
        )));
    }
    let comps = (0..n0)
        .map(|q| x.iter().skip(q).step_by(n0).copied().collect())
        .collect();
    DcdFrame::new(n0, comps)
}

/// Interleaves the components back into one sequence.
pub fn dcd_reconstruct(frame: &DcdFrame) -> Vec<Complex64> {
    let n0 = frame.base_period;
    let len = frame.components[0].len();
    let mut out = Vec::with_capacity(n0 * len);
    for l in 0..len {
        for comp in &frame.components {
            out.push(comp[l]);
        }
    }
    out
}
