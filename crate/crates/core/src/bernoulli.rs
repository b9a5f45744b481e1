//! Binomial primitives for a game of independent ±1 trials.
//!
//! The probability mass function uses Loader's saddle-point expansion
//! (`stirlerr` + `bd0`), which keeps full relative accuracy for trial counts
//! far beyond where `C(N, α)` or `p^α` are representable.

use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::enumeration;
use crate::error::{check_probability, KellyError, Result};

/// A biased binary game: `+1` with probability `p`, `-1` with `q = 1 - p`.
///
/// Only `p` is stored, so `p + q = 1` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    p: f64,
}

impl GameParams {
    pub fn new(p: f64) -> Result<Self> {
        check_probability("p", p).map(|p| Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// `p - q`, computed as `2p - 1`.
    pub fn edge(&self) -> f64 {
        2.0 * self.p - 1.0
    }

    /// One-step transition of the win counter.
    ///
    /// A trial either adds a win (probability `p`) or leaves the count
    /// unchanged (probability `q`); every other jump is impossible.
    pub fn transition_prob(&self, from_wins: u64, to_wins: u64) -> Result<f64> {
        if to_wins == from_wins {
            Ok(self.q())
        } else if from_wins.checked_add(1) == Some(to_wins) {
            Ok(self.p)
        } else {
            Err(KellyError::Domain {
                name: "to_wins",
                value: to_wins as f64,
                expected: "from_wins or from_wins + 1",
            })
        }
    }
}

/// `Binomial(N, p)` over the win count `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialSpec {
    trials: u64,
    p: f64,
}

impl BinomialSpec {
    pub fn new(trials: u64, p: f64) -> Result<Self> {
        if trials == 0 {
            return Err(KellyError::Domain {
                name: "N",
                value: 0.0,
                expected: "at least one trial",
            });
        }
        let p = check_probability("p", p)?;
        Ok(Self { trials, p })
    }

    /// The distribution of the loss count `V`, i.e. `Binomial(N, q)`.
    pub fn losses(&self) -> Self {
        Self {
            trials: self.trials,
            p: 1.0 - self.p,
        }
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }
}

/// Wins and losses after `N` trials under the complementary model `V = N - U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialCounts {
    wins: u64,
    losses: u64,
}

impl TrialCounts {
    pub fn new(wins: u64, losses: u64) -> Self {
        Self { wins, losses }
    }

    pub fn wins(&self) -> u64 {
        self.wins
    }

    pub fn losses(&self) -> u64 {
        self.losses
    }

    pub fn trials(&self) -> u64 {
        self.wins + self.losses
    }

    /// Net wins `U - V`.
    pub fn net(&self) -> i64 {
        self.wins as i64 - self.losses as i64
    }
}

/// How the loss count relates to the win count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceModel {
    /// `U` and `V` treated as independent binomials (zero covariance).
    Independent,
    /// `V = N - U`.
    #[default]
    Complementary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub volatility: f64,
}

/// `P(U = α)`.
pub fn pmf(spec: BinomialSpec, wins: u64) -> Result<f64> {
    let n = spec.trials;
    // Endpoints directly as powers so that a single trial returns p and q as given.
    if wins == n {
        return Ok(spec.p.powf(n as f64));
    }
    if wins == 0 {
        return Ok(spec.q().powf(n as f64));
    }
    log_pmf(spec, wins).map(f64::exp)
}

/// `ln P(U = α)`, `-inf` for impossible outcomes.
pub fn log_pmf(spec: BinomialSpec, wins: u64) -> Result<f64> {
    let n = spec.trials;
    if wins > n {
        return Err(KellyError::Domain {
            name: "alpha",
            value: wins as f64,
            expected: "a win count in 0..=N",
        });
    }
    Ok(log_pmf_raw(wins, n, spec.p, spec.q()))
}

fn log_pmf_raw(x: u64, n: u64, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if x == 0 {
        return if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * (-p).ln_1p()
        };
    }
    if x == n {
        return if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
    }
    let xf = x as f64;
    let yf = (n - x) as f64;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xf, nf * p) - bd0(yf, nf * q);
    let lf = std::f64::consts::TAU.ln() + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

/// `ln(n!) - [(n + 1/2) ln n - n + ln sqrt(2π)]` for integer `n`.
pub(crate) fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    #[allow(clippy::excessive_precision)]
    const TABLE: [f64; 16] = [
        0.0,
        0.081_061_466_795_327_258_219_670_2,
        0.041_340_695_955_409_294_093_822_1,
        0.027_677_925_684_998_339_148_789_29,
        0.020_790_672_103_765_093_111_522_77,
        0.016_644_691_189_821_192_163_194_87,
        0.013_876_128_823_070_747_998_745_73,
        0.011_896_709_945_891_770_095_055_72,
        0.010_411_265_261_972_096_497_478_567,
        0.009_255_462_182_712_732_917_728_637,
        0.008_330_563_433_362_871_256_469_318,
        0.007_573_675_487_951_840_794_972_024,
        0.006_942_840_107_209_529_865_664_152,
        0.006_408_994_188_004_207_068_439_631,
        0.005_951_370_112_758_847_735_624_416,
        0.005_554_733_551_962_801_371_038_690,
    ];
    if n < 16 {
        return TABLE[n as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x / np) + np - x`, with a series when `x ≈ np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let v2 = v * v;
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `Σ_α P(U = α)`, which should be 1 up to rounding.
pub fn pmf_normalization(spec: BinomialSpec) -> Result<f64> {
    enumeration::expectation(spec, |_| 1.0)
}

pub fn moments(spec: BinomialSpec) -> Moments {
    let n = spec.trials as f64;
    let variance = n * spec.p * spec.q();
    Moments {
        mean: n * spec.p,
        variance,
        volatility: variance.sqrt(),
    }
}

/// `Cov(U, V)` under the chosen model.
///
/// The complementary value is obtained by summing over the win count, so it
/// carries the enumeration cap.
pub fn covariance_uv(trials: u64, p: f64, model: CovarianceModel) -> Result<f64> {
    let spec = BinomialSpec::new(trials, p)?;
    match model {
        CovarianceModel::Independent => Ok(0.0),
        CovarianceModel::Complementary => {
            let n = trials as f64;
            let mean_u = enumeration::expectation(spec, |a| a as f64)?;
            let mean_uv = enumeration::expectation(spec, |a| a as f64 * (n - a as f64))?;
            Ok(mean_uv - mean_u * (n - mean_u))
        }
    }
}

/// `Var(U - V)` under the chosen model.
pub fn net_wins_variance(trials: u64, p: f64, model: CovarianceModel) -> Result<f64> {
    let spec = BinomialSpec::new(trials, p)?;
    match model {
        CovarianceModel::Independent => Ok(2.0 * trials as f64 * p * (1.0 - p)),
        CovarianceModel::Complementary => {
            let n = trials as f64;
            let net = |a: u64| 2.0 * a as f64 - n;
            let mean = enumeration::expectation(spec, net)?;
            enumeration::expectation(spec, |a| (net(a) - mean).powi(2))
        }
    }
}

/// `ln E[exp(ξU)] = N ln(1 - p + p e^ξ)`.
pub fn log_mgf(spec: BinomialSpec, xi: f64) -> Result<f64> {
    if !xi.is_finite() {
        return Err(KellyError::Domain {
            name: "xi",
            value: xi,
            expected: "a finite real",
        });
    }
    Ok(spec.trials as f64 * (spec.p * xi.exp_m1()).ln_1p())
}

/// `E[exp(ξU)] = (1 - p + p e^ξ)^N`.
pub fn mgf(spec: BinomialSpec, xi: f64) -> Result<f64> {
    let value = log_mgf(spec, xi)?.exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(KellyError::Range {
            what: "moment generating function",
            hint: "use log_mgf instead",
        })
    }
}

/// `Σ_α e^{ξα} P(U = α)` by direct summation.
pub fn mgf_bruteforce(spec: BinomialSpec, xi: f64) -> Result<f64> {
    if !xi.is_finite() {
        return Err(KellyError::Domain {
            name: "xi",
            value: xi,
            expected: "a finite real",
        });
    }
    let value = enumeration::expectation(spec, |a| (xi * a as f64).exp())?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(KellyError::Range {
            what: "moment generating function",
            hint: "use log_mgf instead",
        })
    }
}

/// Identifies an independent random stream: `(master seed, trajectory index)`.
///
/// Streams are ChaCha8 keyed by the seed with the index as the stream
/// number, so draws never depend on which thread evaluates which path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Substream {
    pub seed: u64,
    pub index: u64,
}

impl Substream {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }
}

/// Infinite iterator of `±1` outcomes drawn from one substream.
#[derive(Debug, Clone)]
pub struct OutcomeStream {
    rng: ChaCha8Rng,
    trial: Bernoulli,
}

impl OutcomeStream {
    pub fn new(game: GameParams, stream: Substream) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(stream.seed);
        rng.set_stream(stream.index);
        // p is validated by GameParams, so this cannot fail.
        let trial = Bernoulli::new(game.p()).expect("p in [0, 1]");
        Self { rng, trial }
    }

    /// Draws one trial, `true` for a win.
    #[inline]
    pub fn next_win(&mut self) -> bool {
        self.trial.sample(&mut self.rng)
    }
}

impl Iterator for OutcomeStream {
    type Item = i8;

    #[inline]
    fn next(&mut self) -> Option<i8> {
        Some(if self.next_win() { 1 } else { -1 })
    }
}

/// A finite run of trial outcomes, each exactly `-1` or `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSequence {
    outcomes: Vec<i8>,
    stream: Substream,
}

impl OutcomeSequence {
    pub fn outcomes(&self) -> &[i8] {
        &self.outcomes
    }

    pub fn stream(&self) -> Substream {
        self.stream
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn counts(&self) -> TrialCounts {
        let wins = self.outcomes.iter().filter(|&&z| z == 1).count() as u64;
        TrialCounts::new(wins, self.outcomes.len() as u64 - wins)
    }
}

pub fn sample_outcomes(
    game: GameParams,
    trials: usize,
    stream: Substream,
) -> Result<OutcomeSequence> {
    if trials == 0 {
        return Err(KellyError::Domain {
            name: "N",
            value: 0.0,
            expected: "at least one trial",
        });
    }
    let outcomes = OutcomeStream::new(game, stream).take(trials).collect();
    Ok(OutcomeSequence { outcomes, stream })
}
