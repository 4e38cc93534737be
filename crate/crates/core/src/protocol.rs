//! End-to-end fingerprinting runs on top of [`crate::modes`].
//!
//! Alice and Bob encode their inputs with the same linear code and put a
//! phase `pi * e_i` on mode `i` of their arm. After recombination the photon
//! exits by an `N` mode with probability `d_H(e(x), e(y)) / m`, and never when
//! `x = y`. The referee declares `NotEqual` iff any of `k` independent runs
//! clicks at port N.

use std::fmt;

use num_rational::Ratio;
use rand::distr::Distribution;
use rand::distr::weighted::WeightedIndex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ecc::{BitString, Code};
use crate::error::{Error, Result};
use crate::modes::{Arm, ModeLabel, ModeState, Port};
use crate::scalar::Scalar;
use crate::seed::{derive_seed, rng_from_seed};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    NotEqual,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equal => "equal",
            Verdict::NotEqual => "not_equal",
        })
    }
}

/// Code, repetition count and target error for one protocol configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    code: Code,
    k: u64,
    epsilon: f64,
}

impl ProtocolParams {
    pub fn new(code: Code, k: u64, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("repetition count k must be at least 1"));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::domain(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
        }
        Ok(ProtocolParams { code, k, epsilon })
    }

    /// Picks `k` from the code's relative distance so the miss probability is at most `epsilon`.
    pub fn for_target_error(code: Code, epsilon: f64) -> Result<Self> {
        if code.is_degenerate() {
            return Err(Error::domain("code has minimum distance 0; no repetition count suffices"));
        }
        let nu = code.relative_distance();
        let k = if nu >= 1.0 { 1 } else { repetitions_needed(nu, epsilon)? };
        Self::new(code, k, epsilon)
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// One detector click: the output port and the mode index (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Click {
    pub port: Port,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub verdict: Verdict,
    pub pn_exact: f64,
    pub clicks: Vec<Click>,
    pub seed: u64,
}

impl RunResult {
    pub fn n_clicks_n(&self) -> usize {
        self.clicks.iter().filter(|c| c.port == Port::N).count()
    }
}

/// Port-stage state after Alice encodes `x` and Bob encodes `y`.
pub fn encoded_state<T: Scalar>(code: &Code, x: &BitString, y: &BitString) -> Result<ModeState<T>> {
    let ex = code.encode(x)?;
    let ey = code.encode(y)?;
    let phases = |e: &BitString| -> Vec<T> { e.iter().map(|b| if b { T::PI() } else { T::zero() }).collect() };
    ModeState::prepare_split(code.m())?
        .apply_phases(Arm::A, &phases(&ex))?
        .apply_phases(Arm::B, &phases(&ey))?
        .recombine()
}

/// Exact probability that the photon exits by port N.
pub fn run_exact<T: Scalar>(code: &Code, x: &BitString, y: &BitString) -> Result<T> {
    Ok(encoded_state::<T>(code, x, y)?.port_probabilities()?.p_n)
}

/// Draws port outcomes from the exact per-mode distribution of one `(x, y)` pair.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    labels: Vec<ModeLabel>,
    index: WeightedIndex<f64>,
    pn_exact: f64,
}

impl OutcomeSampler {
    pub fn new(code: &Code, x: &BitString, y: &BitString) -> Result<Self> {
        let probs = encoded_state::<f64>(code, x, y)?.port_probabilities()?;
        let (labels, weights): (Vec<ModeLabel>, Vec<f64>) = probs.per_mode.into_iter().unzip();
        // zero-weight labels are never drawn, so x = y can never click N
        let index = WeightedIndex::new(&weights).map_err(|e| Error::domain(e.to_string()))?;
        Ok(OutcomeSampler {
            labels,
            index,
            pn_exact: probs.p_n,
        })
    }

    pub fn pn_exact(&self) -> f64 {
        self.pn_exact
    }

    /// `k` independent single-photon runs from the stream seeded with `seed`.
    pub fn sample(&self, k: u64, seed: u64) -> RunResult {
        let mut rng = rng_from_seed(seed);
        let clicks: Vec<Click> = (0..k)
            .map(|_| match self.labels[self.index.sample(&mut rng)] {
                ModeLabel::Port { port, index } => Click { port, index },
                ModeLabel::Branch { .. } => unreachable!("sampler holds port-stage labels"),
            })
            .collect();
        let verdict = if clicks.iter().any(|c| c.port == Port::N) {
            Verdict::NotEqual
        } else {
            Verdict::Equal
        };
        RunResult {
            verdict,
            pn_exact: self.pn_exact,
            clicks,
            seed,
        }
    }
}

/// One sampled protocol execution (k runs) seeded with `seed`.
pub fn run_sampled(params: &ProtocolParams, x: &BitString, y: &BitString, seed: u64) -> Result<RunResult> {
    Ok(OutcomeSampler::new(&params.code, x, y)?.sample(params.k, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub not_equal: u64,
    pub frequency: f64,
    /// `1 - (1 - pN)^k`.
    pub expected: f64,
    /// Binomial standard deviation of the frequency, `sqrt(p (1 - p) / trials)`.
    pub sigma: f64,
    pub master_seed: u64,
}

/// Repeats [`run_sampled`] `trials` times; trial `i` uses `derive_seed(master_seed, i)`.
pub fn monte_carlo(
    params: &ProtocolParams,
    x: &BitString,
    y: &BitString,
    master_seed: u64,
    trials: u64,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let sampler = OutcomeSampler::new(&params.code, x, y)?;
    let not_equal = (0..trials)
        .into_par_iter()
        .filter(|&i| sampler.sample(params.k, derive_seed(master_seed, i)).verdict == Verdict::NotEqual)
        .count() as u64;
    let expected = 1.0 - (1.0 - sampler.pn_exact).powf(params.k as f64);
    Ok(MonteCarloSummary {
        trials,
        not_equal,
        frequency: not_equal as f64 / trials as f64,
        expected,
        sigma: (expected * (1.0 - expected) / trials as f64).sqrt(),
        master_seed,
    })
}

/// Smallest `k` with `(1 - nu)^k <= epsilon`.
pub fn repetitions_needed<T: Scalar>(nu: T, epsilon: T) -> Result<u64> {
    let (zero, one) = (T::zero(), T::one());
    if !(nu > zero && nu < one) {
        return Err(Error::domain(format!("nu must lie in (0, 1), got {nu}")));
    }
    if !(epsilon > zero && epsilon < one) {
        return Err(Error::domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let miss = one - nu;
    let estimate = (epsilon.ln() / miss.ln()).ceil();
    let mut k = estimate
        .to_u64()
        .filter(|&k| k < 1 << 53)
        .ok_or_else(|| Error::resource(format!("repetition count {estimate} is not representable")))?
        .max(1);
    let bound = |k: u64| miss.powf(T::from_u64(k).unwrap());
    while bound(k) > epsilon {
        k += 1;
    }
    while k > 1 && bound(k - 1) <= epsilon {
        k -= 1;
    }
    Ok(k)
}

/// Worst-case probability of a false `Equal` verdict after `k` runs: `(1 - nu)^k`.
pub fn amplified_error_bound<T: Scalar>(nu: T, k: u64) -> Result<T> {
    if !(nu > T::zero() && nu < T::one()) {
        return Err(Error::domain(format!("nu must lie in (0, 1), got {nu}")));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let miss = T::one() - nu;
    Ok(match i32::try_from(k) {
        Ok(k) => miss.powi(k),
        Err(_) => miss.powf(T::from_u64(k).unwrap()),
    })
}

fn check_phase_inputs(q: u64, x: u64, y: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::domain(format!("alphabet size q must be >= 2, got {q}")));
    }
    if x >= q || y >= q {
        return Err(Error::domain(format!("inputs must lie in 0..{q}, got x={x}, y={y}")));
    }
    Ok(())
}

/// Port-N probability of the single-mode protocol with phases `2 pi x / q` and `2 pi y / q`,
/// computed through the interferometer.
pub fn phase_protocol_pn<T: Scalar>(q: u64, x: u64, y: u64) -> Result<T> {
    check_phase_inputs(q, x, y)?;
    let angle = |v: u64| T::TAU() * T::from_u64(v).unwrap() / T::from_u64(q).unwrap();
    let state = ModeState::<T>::prepare_split(1)?
        .apply_phases(Arm::A, &[angle(x)])?
        .apply_phases(Arm::B, &[angle(y)])?
        .recombine()?;
    Ok(state.port_probabilities()?.p_n)
}

/// `sin^2(pi (x - y) / q)`.
pub fn phase_protocol_pn_closed_form(q: u64, x: u64, y: u64) -> Result<f64> {
    check_phase_inputs(q, x, y)?;
    let d = x as f64 - y as f64;
    Ok((std::f64::consts::PI * d / q as f64).sin().powi(2))
}

/// Exact `sin^2(pi (x - y) / q)` when it is rational.
///
/// `sin^2(pi d / q) = (1 - cos(2 pi d / q)) / 2`, and the cosine of a rational
/// multiple of `2 pi` is rational only when the reduced denominator is 1, 2, 3, 4 or 6.
pub fn phase_protocol_pn_exact(q: u64, x: u64, y: u64) -> Result<Option<Rational>> {
    check_phase_inputs(q, x, y)?;
    let d = (x + q - y) % q;
    let turn = Ratio::new(d as i64, q as i64);
    let cos = match *turn.denom() {
        1 => Ratio::from_integer(1),
        2 => Ratio::from_integer(-1),
        3 => Ratio::new(-1, 2),
        4 => Ratio::from_integer(0),
        6 => Ratio::new(1, 2),
        _ => return Ok(None),
    };
    Ok(Some((Ratio::from_integer(1) - cos) / 2))
}

/// Referee error of the phase protocol averaged over all `q^2` input pairs,
/// where the verdict is the exit port. Computed through the interferometer.
pub fn phase_protocol_average_error<T: Scalar>(q: u64) -> Result<T> {
    check_phase_inputs(q, 0, 0)?;
    let mut total = T::zero();
    for x in 0..q {
        for y in 0..q {
            let pn = phase_protocol_pn::<T>(q, x, y)?;
            total = total + if x == y { pn } else { T::one() - pn };
        }
    }
    Ok(total / T::from_u64(q * q).unwrap())
}

/// Exact average referee error, when every pair probability is rational.
pub fn phase_protocol_average_error_exact(q: u64) -> Result<Option<Rational>> {
    check_phase_inputs(q, 0, 0)?;
    let mut total = Ratio::from_integer(0);
    for x in 0..q {
        for y in 0..q {
            let Some(pn) = phase_protocol_pn_exact(q, x, y)? else {
                return Ok(None);
            };
            total += if x == y { pn } else { Ratio::from_integer(1) - pn };
        }
    }
    Ok(Some(total / (q * q) as i64))
}

/// One row of a batch report; the CSV header and JSON keys are the field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub k: u64,
    pub x_hex: String,
    pub y_hex: String,
    pub pn_exact: f64,
    pub verdict: Option<Verdict>,
    pub n_clicks_n: Option<usize>,
    pub seed: Option<u64>,
}

impl BatchRow {
    /// Row with the exact probability only; sampling columns left empty.
    pub fn exact(params: &ProtocolParams, x: &BitString, y: &BitString) -> Result<Self> {
        let pn = run_exact::<f64>(&params.code, x, y)?;
        Ok(Self::base(params, x, y, pn))
    }

    pub fn sampled(params: &ProtocolParams, x: &BitString, y: &BitString, result: &RunResult) -> Self {
        BatchRow {
            verdict: Some(result.verdict),
            n_clicks_n: Some(result.n_clicks_n()),
            seed: Some(result.seed),
            ..Self::base(params, x, y, result.pn_exact)
        }
    }

    fn base(params: &ProtocolParams, x: &BitString, y: &BitString, pn_exact: f64) -> Self {
        BatchRow {
            n: params.n(),
            m: params.code.m(),
            t: params.code.t(),
            k: params.k,
            x_hex: x.to_hex(),
            y_hex: y.to_hex(),
            pn_exact,
            verdict: None,
            n_clicks_n: None,
            seed: None,
        }
    }
}
