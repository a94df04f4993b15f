//! Ground-truth generation: Bernoulli-Uniform sparse codes, random
//! Householder products, and Gaussian noise at a requested SNR.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::householder::{HouseholderFactor, OrthogonalProduct};
use crate::numeric::frobenius_norm;
use crate::sparse::{SparseMatrix, Triplet};

/// Name of the generator behind [`RngSpec`], recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64 + set_stream)";

/// Attempts allowed when resampling a Householder vector to reach `min_abs_c`.
pub const MIN_ABS_C_RETRIES: usize = 10_000;

const STREAM_FACTORS: u64 = 0;
const STREAM_CODES: u64 = 1;
const STREAM_NOISE: u64 = 2;

/// Support probability and value range of the sparse-code model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseModel {
    theta: f64,
    value_low: f64,
    value_high: f64,
}

impl SparseModel {
    pub fn new(theta: f64, value_low: f64, value_high: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidModel(format!("theta must lie in (0, 1], got {theta}")));
        }
        if !(value_low < value_high) || !value_low.is_finite() || !value_high.is_finite() {
            return Err(Error::InvalidModel(format!(
                "need finite value_low < value_high, got [{value_low}, {value_high}]"
            )));
        }
        let model = Self {
            theta,
            value_low,
            value_high,
        };
        if !(model.mu() > 0.0) {
            return Err(Error::InvalidModel(format!(
                "support mean must be positive, got {}",
                model.mu()
            )));
        }
        Ok(model)
    }

    /// Support values uniform on `[1, 2]`.
    pub fn with_theta(theta: f64) -> Result<Self> {
        Self::new(theta, 1.0, 2.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn value_low(&self) -> f64 {
        self.value_low
    }

    pub fn value_high(&self) -> f64 {
        self.value_high
    }

    pub fn mu(&self) -> f64 {
        0.5 * (self.value_low + self.value_high)
    }
}

/// Seed plus stream index of a ChaCha8 generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn with_stream(&self, stream_id: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id,
        }
    }
}

/// Mixes a base seed with an index (splitmix64 finaliser).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Entry distribution for raw Householder vectors before normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorDistribution {
    /// iid Uniform[0, 1]; gives `Σu_i ≈ √(3n)/2`.
    #[default]
    Uniform,
    /// iid standard normal; `Σu_i` is O(1).
    Gaussian,
}

fn draw_unit_vector<R: Rng>(rng: &mut R, n: usize, dist: VectorDistribution) -> Result<HouseholderFactor> {
    let v: Array1<f64> = match dist {
        VectorDistribution::Uniform => (0..n).map(|_| rng.random::<f64>()).collect(),
        VectorDistribution::Gaussian => (0..n).map(|_| StandardNormal.sample(rng)).collect(),
    };
    HouseholderFactor::new(v.view())
}

fn sample_factor_from<R: Rng>(
    rng: &mut R,
    n: usize,
    dist: VectorDistribution,
    min_abs_c: f64,
) -> Result<HouseholderFactor> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let mut best = 0.0_f64;
    for _ in 0..MIN_ABS_C_RETRIES {
        let h = draw_unit_vector(rng, n, dist)?;
        let c = h.u().sum().abs();
        if c >= min_abs_c {
            return Ok(h);
        }
        best = best.max(c);
    }
    Err(Error::RetryBudgetExhausted {
        required: min_abs_c,
        attempts: MIN_ABS_C_RETRIES,
        best_abs_c: best,
    })
}

/// Random unit Householder vector, resampled until `|Σu_i| >= min_abs_c`.
pub fn sample_householder_vector(
    n: usize,
    dist: VectorDistribution,
    min_abs_c: f64,
    rng: RngSpec,
) -> Result<HouseholderFactor> {
    sample_factor_from(&mut rng.rng(), n, dist, min_abs_c)
}

fn sample_codes_from<R: Rng>(rng: &mut R, n: usize, p: usize, model: &SparseModel) -> SparseMatrix {
    let values = Uniform::new(model.value_low, model.value_high).expect("validated range");
    let mut entries = Vec::with_capacity((model.theta * (n * p) as f64) as usize + 16);
    // column-major draws: the first p' columns do not depend on p
    for col in 0..p {
        for row in 0..n {
            if rng.random::<f64>() < model.theta {
                entries.push(Triplet {
                    row,
                    col,
                    value: values.sample(rng),
                });
            }
        }
    }
    SparseMatrix::new(n, p, entries).expect("indices in range")
}

/// `n x p` sparse code with iid Bernoulli(θ) support and Uniform values.
pub fn sample_sparse_matrix(n: usize, p: usize, model: &SparseModel, rng: RngSpec) -> SparseMatrix {
    sample_codes_from(&mut rng.rng(), n, p, model)
}

/// How the ground-truth reflectors are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorSampling {
    pub distribution: VectorDistribution,
    pub min_abs_c: f64,
}

impl Default for FactorSampling {
    fn default() -> Self {
        Self {
            distribution: VectorDistribution::Uniform,
            min_abs_c: 0.0,
        }
    }
}

/// A generated problem `Y = VX + N` together with its ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub v: OrthogonalProduct,
    pub x: SparseMatrix,
    pub y: Array2<f64>,
    pub model: SparseModel,
    pub snr_db: Option<f64>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticInstance {
    /// `VX` recomputed from the ground truth.
    pub fn signal(&self) -> Array2<f64> {
        self.v
            .apply(self.x.to_dense().view(), false)
            .expect("instance dimensions agree")
    }

    pub fn noise(&self) -> Array2<f64> {
        &self.y - &self.signal()
    }
}

/// Builds `Y = H_1...H_m X + N`.
///
/// Reflectors, codes and noise use streams 0, 1 and 2 of `seed`, so two
/// instances that differ only in `snr_db` share `V` and `X`, and increasing
/// `p` extends `X` by new columns. `noise_sigma` is set from the realised
/// `‖VX‖_F` so that the expected noise power hits the requested SNR.
pub fn make_instance(
    n: usize,
    p: usize,
    m: usize,
    model: &SparseModel,
    snr_db: Option<f64>,
    sampling: FactorSampling,
    seed: u64,
) -> Result<SyntheticInstance> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if p == 0 {
        return Err(Error::InvalidModel("p must be at least 1".into()));
    }
    let base = RngSpec::new(seed, STREAM_FACTORS);
    let mut factor_rng = base.rng();
    let factors = (0..m)
        .map(|_| sample_factor_from(&mut factor_rng, n, sampling.distribution, sampling.min_abs_c))
        .collect::<Result<Vec<_>>>()?;
    let v = OrthogonalProduct::from_factors(n, factors)?;

    let x = sample_codes_from(&mut base.with_stream(STREAM_CODES).rng(), n, p, model);
    let mut y = v.apply(x.to_dense().view(), false)?;

    let noise_sigma = match snr_db {
        None => 0.0,
        Some(db) => {
            let signal_power = frobenius_norm(y.view()).powi(2);
            (signal_power / (10f64.powf(db / 10.0) * (n * p) as f64)).sqrt()
        }
    };
    add_noise(&mut y, noise_sigma, seed);

    Ok(SyntheticInstance {
        v,
        x,
        y,
        model: *model,
        snr_db,
        noise_sigma,
        seed,
    })
}

/// Adds `sigma · N(0, 1)` entries drawn from the noise stream of `seed`.
fn add_noise(y: &mut Array2<f64>, sigma: f64, seed: u64) {
    if sigma > 0.0 {
        let mut noise_rng = RngSpec::new(seed, STREAM_NOISE).rng();
        for yij in y.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut noise_rng);
            *yij += sigma * z;
        }
    }
}

/// Schema tag written into every instance dump.
pub const INSTANCE_SCHEMA: &str = "householder-dict.instance.v1";

/// Textual (TOML) snapshot of a [`SyntheticInstance`].
///
/// `Y` is not stored: it is rebuilt as `VX` plus the seeded noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDump {
    pub schema: String,
    pub rng_algorithm: String,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub theta: f64,
    pub value_low: f64,
    pub value_high: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub snr_db: Option<f64>,
    pub noise_sigma: f64,
    pub seed: u64,
    pub u_vectors: Vec<Vec<f64>>,
    pub x_triplets: Vec<Triplet>,
}

impl InstanceDump {
    pub fn from_instance(inst: &SyntheticInstance) -> Self {
        let (n, p) = inst.x.shape();
        Self {
            schema: INSTANCE_SCHEMA.to_owned(),
            rng_algorithm: RNG_ALGORITHM.to_owned(),
            n,
            p,
            m: inst.v.len(),
            theta: inst.model.theta(),
            value_low: inst.model.value_low(),
            value_high: inst.model.value_high(),
            snr_db: inst.snr_db,
            noise_sigma: inst.noise_sigma,
            seed: inst.seed,
            u_vectors: inst
                .v
                .reflectors()
                .iter()
                .filter_map(|r| r.factor())
                .map(|h| h.u().to_vec())
                .collect(),
            x_triplets: inst.x.entries().to_vec(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("dump serialises")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let dump: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if dump.schema != INSTANCE_SCHEMA {
            return Err(Error::Config(format!(
                "unsupported instance schema {:?}, expected {INSTANCE_SCHEMA:?}",
                dump.schema
            )));
        }
        Ok(dump)
    }

    pub fn restore(&self) -> Result<SyntheticInstance> {
        let model = SparseModel::new(self.theta, self.value_low, self.value_high)?;
        let factors = self
            .u_vectors
            .iter()
            .map(|u| {
                crate::error::check_dim(self.n, u.len())?;
                HouseholderFactor::from_vec(u.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        crate::error::check_dim(self.m, factors.len())?;
        let v = OrthogonalProduct::from_factors(self.n, factors)?;
        let x = SparseMatrix::new(self.n, self.p, self.x_triplets.clone())?;
        let mut y = v.apply(x.to_dense().view(), false)?;
        add_noise(&mut y, self.noise_sigma, self.seed);
        Ok(SyntheticInstance {
            v,
            x,
            y,
            model,
            snr_db: self.snr_db,
            noise_sigma: self.noise_sigma,
            seed: self.seed,
        })
    }
}
