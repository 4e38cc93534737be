//! Feasibility arithmetic and imperfections for a pulse-train realization.
//!
//! The photon is one pulse-train from an attenuated mode-locked laser; the
//! time slots of the train are the modes. This module counts how many slots
//! fit in the light-travel window between Alice and Bob, and simulates what
//! source statistics, loss and detector dark counts do to the protocol.

use rand::Rng as _;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed, Rng};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Default refractive index of optical fiber.
pub const FIBER_INDEX: f64 = 1.468;
/// Time window quoted for a 10 km separation in the original feasibility estimate, seconds.
pub const QUOTED_WINDOW: f64 = 3e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhotonSource {
    /// Attenuated laser: Poisson photon number with the given mean per train.
    Poisson { mean_photon_number: f64 },
    /// Ideal source emitting exactly one photon per train.
    SinglePhoton,
}

/// Which light-travel time bounds the usable pulse train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingWindow {
    /// `L / c`.
    OneWay,
    /// `L / 2c`, referee midway.
    HalfWay,
    /// `2L / c`.
    RoundTrip,
}

impl TimingWindow {
    fn factor(self) -> f64 {
        match self {
            TimingWindow::OneWay => 1.0,
            TimingWindow::HalfWay => 0.5,
            TimingWindow::RoundTrip => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImperfectionModel {
    pub source: PhotonSource,
    /// End-to-end channel transmission, in (0, 1].
    pub transmission: f64,
    pub detector_efficiency: f64,
    /// Spurious click probability per detector per time slot, in [0, 1).
    pub dark_count_prob: f64,
    /// Spacing of pulses in the train, seconds.
    pub pulse_period: f64,
    /// Alice-Bob distance, meters.
    pub separation: f64,
    pub refractive_index: f64,
    pub window: TimingWindow,
    /// Time slots `d` watched by each detector per run.
    pub slots: u64,
}

impl Default for ImperfectionModel {
    fn default() -> Self {
        ImperfectionModel {
            source: PhotonSource::Poisson { mean_photon_number: 0.1 },
            transmission: 1.0,
            detector_efficiency: 1.0,
            dark_count_prob: 0.0,
            pulse_period: 1e-9,
            separation: 10_000.0,
            refractive_index: FIBER_INDEX,
            window: TimingWindow::OneWay,
            slots: 1,
        }
    }
}

impl ImperfectionModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::domain(format!("{what} out of range: {v}")));
        if let PhotonSource::Poisson { mean_photon_number } = self.source {
            if !(mean_photon_number >= 0.0 && mean_photon_number.is_finite()) {
                return bad("mean photon number", mean_photon_number);
            }
        }
        if !(self.transmission > 0.0 && self.transmission <= 1.0) {
            return bad("transmission", self.transmission);
        }
        if !(self.detector_efficiency > 0.0 && self.detector_efficiency <= 1.0) {
            return bad("detector efficiency", self.detector_efficiency);
        }
        if !(self.dark_count_prob >= 0.0 && self.dark_count_prob < 1.0) {
            return bad("dark count probability", self.dark_count_prob);
        }
        if !(self.pulse_period > 0.0) {
            return bad("pulse period (must be > 0)", self.pulse_period);
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return bad("separation", self.separation);
        }
        if !(self.refractive_index >= 1.0 && self.refractive_index.is_finite()) {
            return bad("refractive index", self.refractive_index);
        }
        if self.slots == 0 {
            return Err(Error::domain("slots must be at least 1"));
        }
        Ok(())
    }

    /// Per-train photon-number probabilities of the source.
    pub fn photon_numbers(&self) -> Result<PhotonNumberDistribution> {
        match self.source {
            PhotonSource::Poisson { mean_photon_number } => photon_number_distribution(mean_photon_number),
            PhotonSource::SinglePhoton => Ok(PhotonNumberDistribution {
                p0: 0.0,
                p1: 1.0,
                p_multi: 0.0,
            }),
        }
    }

    fn detection_efficiency(&self) -> f64 {
        self.transmission * self.detector_efficiency
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonNumberDistribution {
    pub p0: f64,
    pub p1: f64,
    /// Two or more photons.
    pub p_multi: f64,
}

/// Poisson probabilities of 0, 1 and more photons at mean `mean`.
pub fn photon_number_distribution(mean: f64) -> Result<PhotonNumberDistribution> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::domain(format!("mean photon number must be >= 0, got {mean}")));
    }
    let p0 = (-mean).exp();
    let p1 = mean * p0;
    // 1 - e^-mu - mu e^-mu without cancellation at small mu
    let p_multi = (-(-mean).exp_m1() - p1).max(0.0);
    Ok(PhotonNumberDistribution { p0, p1, p_multi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibleModes {
    pub window_vacuum: f64,
    pub window_fiber: f64,
    pub d_vacuum: u64,
    pub d_fiber: u64,
    /// Slots in the quoted 3 us window, for comparison with the light-travel counts.
    pub paper_claim_slot: u64,
}

// floor(window / period), snapping ratios within 1e-9 relative of an integer
fn slot_count(window: f64, period: f64) -> u64 {
    let r = window / period;
    if !r.is_finite() || r <= 0.0 {
        return 0;
    }
    let nearest = r.round();
    if (r - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as u64
    } else {
        r.floor() as u64
    }
}

/// Number of pulse slots that fit in the timing window, in vacuum and in fiber.
pub fn feasible_d(model: &ImperfectionModel) -> Result<FeasibleModes> {
    if !(model.pulse_period > 0.0) {
        return Err(Error::domain(format!(
            "pulse period must be > 0, got {}",
            model.pulse_period
        )));
    }
    if !(model.separation >= 0.0) || !(model.refractive_index >= 1.0) {
        return Err(Error::domain("separation must be >= 0 and refractive index >= 1"));
    }
    let window_vacuum = model.window.factor() * model.separation / SPEED_OF_LIGHT;
    let window_fiber = window_vacuum * model.refractive_index;
    Ok(FeasibleModes {
        window_vacuum,
        window_fiber,
        d_vacuum: slot_count(window_vacuum, model.pulse_period),
        d_fiber: slot_count(window_fiber, model.pulse_period),
        paper_claim_slot: slot_count(QUOTED_WINDOW, model.pulse_period),
    })
}

/// Outcome of one run under the noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RunOutcome {
    E,
    N,
    Discarded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ProtocolOutcome {
    Equal,
    NotEqual,
    Abort,
}

/// Error rates of the k-run protocol under noise, each over all trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseRates {
    pub trials: u64,
    pub k: u64,
    pub pn: f64,
    /// Verdict `Equal` although the inputs differ (`pn > 0`).
    pub false_equal_rate: f64,
    pub false_equal_stderr: f64,
    /// Verdict `NotEqual` although the inputs are equal (`pn = 0`).
    pub false_notequal_rate: f64,
    pub false_notequal_stderr: f64,
    /// Every one of the k runs discarded.
    pub abort_rate: f64,
    pub abort_stderr: f64,
    pub seed: u64,
}

fn stderr(rate: f64, trials: u64) -> f64 {
    (rate * (1.0 - rate) / trials as f64).sqrt()
}

struct NoiseSampler {
    photons: PhotonNumberDistribution,
    eta: f64,
    pn: f64,
    dark_other_port: Option<Binomial>,
    dark_same_port: Option<Binomial>,
}

impl NoiseSampler {
    fn new(model: &ImperfectionModel, pn: f64) -> Result<Self> {
        let pd = model.dark_count_prob;
        let binomial = |n: u64| -> Result<Option<Binomial>> {
            if pd == 0.0 || n == 0 {
                return Ok(None);
            }
            Binomial::new(n, pd).map(Some).map_err(|e| Error::domain(e.to_string()))
        };
        Ok(NoiseSampler {
            photons: model.photon_numbers()?,
            eta: model.detection_efficiency(),
            pn,
            dark_other_port: binomial(model.slots)?,
            dark_same_port: binomial(model.slots - 1)?,
        })
    }

    fn dark(dist: &Option<Binomial>, rng: &mut Rng) -> u64 {
        dist.as_ref().map_or(0, |d| d.sample(rng))
    }

    fn run(&self, rng: &mut Rng) -> RunOutcome {
        let u: f64 = rng.random();
        if u >= self.photons.p0 + self.photons.p1 {
            // multi-photon train
            return RunOutcome::Discarded;
        }
        let one_photon = u >= self.photons.p0;
        if one_photon && rng.random::<f64>() < self.eta {
            let port_n = rng.random::<f64>() < self.pn;
            // the photon's own cell absorbs any dark count there
            let same = Self::dark(&self.dark_same_port, rng);
            let other = Self::dark(&self.dark_other_port, rng);
            if same + other > 0 {
                return RunOutcome::Discarded;
            }
            return if port_n { RunOutcome::N } else { RunOutcome::E };
        }
        let dark_e = Self::dark(&self.dark_other_port, rng);
        let dark_n = Self::dark(&self.dark_other_port, rng);
        match (dark_e, dark_n) {
            (1, 0) => RunOutcome::E,
            (0, 1) => RunOutcome::N,
            _ => RunOutcome::Discarded,
        }
    }

    fn protocol(&self, k: u64, rng: &mut Rng) -> ProtocolOutcome {
        let mut any_survivor = false;
        let mut any_n = false;
        for _ in 0..k {
            match self.run(rng) {
                RunOutcome::N => {
                    any_n = true;
                    any_survivor = true;
                }
                RunOutcome::E => any_survivor = true,
                RunOutcome::Discarded => {}
            }
        }
        match (any_survivor, any_n) {
            (false, _) => ProtocolOutcome::Abort,
            (true, true) => ProtocolOutcome::NotEqual,
            (true, false) => ProtocolOutcome::Equal,
        }
    }
}

fn check_noise_inputs(model: &ImperfectionModel, pn: f64, k: u64) -> Result<()> {
    model.validate()?;
    if !(0.0..=1.0).contains(&pn) {
        return Err(Error::domain(format!("pn must lie in [0, 1], got {pn}")));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    Ok(())
}

/// Monte Carlo estimate of protocol error rates under the imperfection model.
///
/// Each of the `k` runs: the source emits 0, 1 or more photons; multi-photon
/// trains are discarded; a single photon is detected with probability
/// `transmission * detector_efficiency` and lands at port N with probability
/// `pn`; each detector cell (port, slot) also fires with `dark_count_prob`.
/// A run with exactly one firing cell is labeled by that cell's port,
/// otherwise it is discarded. The verdict is `NotEqual` iff a surviving run
/// is labeled N, and the trial aborts if every run is discarded. The inputs
/// are taken as equal iff `pn == 0`. Trial `i` uses `derive_seed(seed, i)`.
pub fn conditional_error_with_noise(
    model: &ImperfectionModel,
    pn: f64,
    k: u64,
    trials: u64,
    seed: u64,
) -> Result<NoiseRates> {
    check_noise_inputs(model, pn, k)?;
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let sampler = NoiseSampler::new(model, pn)?;
    let (equal, not_equal, abort) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i));
            match sampler.protocol(k, &mut rng) {
                ProtocolOutcome::Equal => (1u64, 0u64, 0u64),
                ProtocolOutcome::NotEqual => (0, 1, 0),
                ProtocolOutcome::Abort => (0, 0, 1),
            }
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let inputs_equal = pn == 0.0;
    let rate = |c: u64| c as f64 / trials as f64;
    let false_equal = if inputs_equal { 0.0 } else { rate(equal) };
    let false_notequal = if inputs_equal { rate(not_equal) } else { 0.0 };
    let abort_rate = rate(abort);
    Ok(NoiseRates {
        trials,
        k,
        pn,
        false_equal_rate: false_equal,
        false_equal_stderr: stderr(false_equal, trials),
        false_notequal_rate: false_notequal,
        false_notequal_stderr: stderr(false_notequal, trials),
        abort_rate,
        abort_stderr: stderr(abort_rate, trials),
        seed,
    })
}

/// Closed-form protocol rates for the same model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedNoiseRates {
    pub false_equal_rate: f64,
    pub false_notequal_rate: f64,
    pub abort_rate: f64,
}

/// Exact rates of the noise model: per run, with `z = 1 - dark_count_prob`,
/// a lone dark click on one port has probability `d pd z^(2d-1)` and a
/// detected photon survives if the other `2d - 1` cells stay quiet.
pub fn expected_noise_rates(model: &ImperfectionModel, pn: f64, k: u64) -> Result<ExpectedNoiseRates> {
    check_noise_inputs(model, pn, k)?;
    let photons = model.photon_numbers()?;
    let eta = model.detection_efficiency();
    let pd = model.dark_count_prob;
    let d = model.slots as f64;
    let quiet = (1.0 - pd).powf(2.0 * d - 1.0);
    let no_signal = photons.p0 + photons.p1 * (1.0 - eta);
    let lone_dark = no_signal * d * pd * quiet;
    let detected = photons.p1 * eta * quiet;
    let run_n = lone_dark + detected * pn;
    let run_e = lone_dark + detected * (1.0 - pn);
    let kf = k as f64;
    let abort = (1.0 - run_n - run_e).powf(kf);
    let no_n = (1.0 - run_n).powf(kf);
    let (equal, not_equal) = (no_n - abort, 1.0 - no_n);
    let inputs_equal = pn == 0.0;
    Ok(ExpectedNoiseRates {
        false_equal_rate: if inputs_equal { 0.0 } else { equal },
        false_notequal_rate: if inputs_equal { not_equal } else { 0.0 },
        abort_rate: abort,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    DarkCountProb,
    Transmission,
    DetectorEfficiency,
    MeanPhotonNumber,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::DarkCountProb => "dark_count_prob",
            SweepParameter::Transmission => "transmission",
            SweepParameter::DetectorEfficiency => "detector_efficiency",
            SweepParameter::MeanPhotonNumber => "mean_photon_number",
        }
    }

    fn apply(self, model: &ImperfectionModel, value: f64) -> ImperfectionModel {
        let mut m = *model;
        match self {
            SweepParameter::DarkCountProb => m.dark_count_prob = value,
            SweepParameter::Transmission => m.transmission = value,
            SweepParameter::DetectorEfficiency => m.detector_efficiency = value,
            SweepParameter::MeanPhotonNumber => {
                m.source = PhotonSource::Poisson { mean_photon_number: value }
            }
        }
        m
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dark_count_prob" | "dark" => Ok(SweepParameter::DarkCountProb),
            "transmission" => Ok(SweepParameter::Transmission),
            "detector_efficiency" | "efficiency" => Ok(SweepParameter::DetectorEfficiency),
            "mean_photon_number" | "mu_photon" => Ok(SweepParameter::MeanPhotonNumber),
            other => Err(Error::domain(format!("unknown sweep parameter '{other}'"))),
        }
    }
}

/// One line of a noise sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub metric: String,
    pub rate: f64,
    pub stderr: f64,
}

/// Runs [`conditional_error_with_noise`] at each value of one model parameter,
/// reusing `seed` at every point. Emits three rows (one per rate) per value.
pub fn noise_sweep(
    model: &ImperfectionModel,
    parameter: SweepParameter,
    values: &[f64],
    pn: f64,
    k: u64,
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(3 * values.len());
    for &value in values {
        let r = conditional_error_with_noise(&parameter.apply(model, value), pn, k, trials, seed)?;
        for (metric, rate, err) in [
            ("false_equal", r.false_equal_rate, r.false_equal_stderr),
            ("false_notequal", r.false_notequal_rate, r.false_notequal_stderr),
            ("abort", r.abort_rate, r.abort_stderr),
        ] {
            rows.push(SweepRow {
                parameter: parameter.name().to_string(),
                value,
                metric: metric.to_string(),
                rate,
                stderr: err,
            });
        }
    }
    Ok(rows)
}

/// Feasibility summary with the model echoed back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub model: ImperfectionModel,
    pub speed_of_light: f64,
    pub modes: FeasibleModes,
    pub photon_numbers: PhotonNumberDistribution,
}

pub fn feasibility_report(model: &ImperfectionModel) -> Result<FeasibilityReport> {
    let modes = feasible_d(model)?;
    model.validate()?;
    Ok(FeasibilityReport {
        model: *model,
        speed_of_light: SPEED_OF_LIGHT,
        modes,
        photon_numbers: model.photon_numbers()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn noiseless_single_photon() -> ImperfectionModel {
        ImperfectionModel {
            source: PhotonSource::SinglePhoton,
            ..Default::default()
        }
    }

    #[test]
    fn poisson_triples() {
        let p = photon_number_distribution(0.0).unwrap();
        assert_eq!((p.p0, p.p1, p.p_multi), (1.0, 0.0, 0.0));
        let p = photon_number_distribution(0.1).unwrap();
        assert!((p.p1 - 0.0905).abs() < 1e-4);
        assert!((p.p_multi - 0.0047).abs() < 1e-4);
        assert!(photon_number_distribution(-0.1).is_err());
    }

    proptest! {
        #[test]
        fn poisson_matches_series(mean in 0.0f64..20.0) {
            let p = photon_number_distribution(mean).unwrap();
            prop_assert!((p.p0 + p.p1 + p.p_multi - 1.0).abs() < 1e-12);
            // independent route: sum the series e^-mu mu^j / j! for j >= 2
            let mut term = (-mean).exp() * mean;
            let mut tail = 0.0;
            for j in 2..400 {
                term *= mean / j as f64;
                tail += term;
            }
            prop_assert!((p.p_multi - tail).abs() < 1e-12);
            prop_assert!((p.p1 - mean * (-mean).exp()).abs() < 1e-12);
        }

        #[test]
        fn feasible_d_monotone(
            period in 1e-12f64..1e-6, scale in 1.0f64..10.0,
            length in 0.0f64..1e5, index in 1.0f64..2.0,
        ) {
            let base = ImperfectionModel { pulse_period: period, separation: length, refractive_index: index, ..Default::default() };
            let f = feasible_d(&base).unwrap();
            let slower = feasible_d(&ImperfectionModel { pulse_period: period * scale, ..base }).unwrap();
            prop_assert!(slower.d_vacuum <= f.d_vacuum && slower.d_fiber <= f.d_fiber && slower.paper_claim_slot <= f.paper_claim_slot);
            let longer = feasible_d(&ImperfectionModel { separation: length * scale, ..base }).unwrap();
            prop_assert!(longer.d_vacuum >= f.d_vacuum && longer.d_fiber >= f.d_fiber);
            let denser = feasible_d(&ImperfectionModel { refractive_index: index * scale, ..base }).unwrap();
            prop_assert!(denser.d_fiber >= f.d_fiber);
        }
    }

    #[test]
    fn ten_km_at_one_ns() {
        let model = ImperfectionModel {
            refractive_index: 1.0,
            ..Default::default()
        };
        let f = feasible_d(&model).unwrap();
        // 10^4 / 299792458 s = 33.356 us
        assert_eq!(f.d_vacuum, 33356);
        assert_eq!(f.d_fiber, 33356);
        assert_eq!(f.paper_claim_slot, 3000);
        let fiber = feasible_d(&ImperfectionModel::default()).unwrap();
        assert_eq!(fiber.d_fiber, (33356.409519815206f64 * 1.468).floor() as u64);
        let half = feasible_d(&ImperfectionModel {
            window: TimingWindow::HalfWay,
            ..model
        })
        .unwrap();
        assert_eq!(half.d_vacuum, 16678);
    }

    #[test]
    fn infinite_period_gives_no_slots() {
        let f = feasible_d(&ImperfectionModel {
            pulse_period: f64::INFINITY,
            ..Default::default()
        })
        .unwrap();
        assert_eq!((f.d_vacuum, f.d_fiber, f.paper_claim_slot), (0, 0, 0));
    }

    #[test]
    fn zero_period_rejected() {
        let m = ImperfectionModel {
            pulse_period: 0.0,
            ..Default::default()
        };
        assert!(matches!(feasible_d(&m), Err(Error::Domain(_))));
        assert!(m.validate().is_err());
    }

    fn within(rate: f64, expected: f64, trials: u64) -> bool {
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        (rate - expected).abs() <= 3.0 * sigma + 1e-12
    }

    #[test]
    fn noiseless_limit_matches_engine() {
        let trials = 20_000;
        let r = conditional_error_with_noise(&noiseless_single_photon(), 0.5, 3, trials, 1).unwrap();
        assert!(within(r.false_equal_rate, 0.125, trials), "{r:?}");
        assert_eq!(r.abort_rate, 0.0);
        let r = conditional_error_with_noise(&noiseless_single_photon(), 0.0, 3, trials, 1).unwrap();
        assert_eq!(r.false_notequal_rate, 0.0);
        assert_eq!(r.abort_rate, 0.0);
    }

    #[test]
    fn vacuum_driven_aborts() {
        let model = ImperfectionModel {
            source: PhotonSource::Poisson { mean_photon_number: 0.5 },
            ..Default::default()
        };
        let trials = 20_000;
        let r = conditional_error_with_noise(&model, 0.5, 2, trials, 3).unwrap();
        let p = photon_number_distribution(0.5).unwrap();
        // per run only a lone photon survives; all k runs must fail
        let abort = (1.0 - p.p1).powi(2);
        assert!(within(r.abort_rate, abort, trials), "{r:?} vs {abort}");
        let e = expected_noise_rates(&model, 0.5, 2).unwrap();
        assert!((e.abort_rate - abort).abs() < 1e-12);
        assert!(within(r.false_equal_rate, e.false_equal_rate, trials));
    }

    #[test]
    fn dark_counts_break_one_sidedness() {
        let model = ImperfectionModel {
            source: PhotonSource::SinglePhoton,
            detector_efficiency: 0.5,
            dark_count_prob: 1e-3,
            slots: 50,
            ..Default::default()
        };
        let (k, trials) = (4, 50_000);
        let r = conditional_error_with_noise(&model, 0.0, k, trials, 11).unwrap();
        assert!(r.false_notequal_rate > 0.0);
        let envelope = 1.0 - (1.0 - model.dark_count_prob).powf((model.slots * k) as f64);
        assert!(r.false_notequal_rate <= envelope);
        let e = expected_noise_rates(&model, 0.0, k).unwrap();
        assert!(within(r.false_notequal_rate, e.false_notequal_rate, trials), "{r:?} {e:?}");
        assert!(within(r.abort_rate, e.abort_rate, trials));
    }

    #[test]
    fn zero_signal_limit() {
        // no photons at all: only lone dark clicks can produce a verdict
        let model = ImperfectionModel {
            source: PhotonSource::Poisson { mean_photon_number: 0.0 },
            dark_count_prob: 0.01,
            slots: 20,
            ..Default::default()
        };
        let trials = 40_000;
        for pn in [0.0, 0.7] {
            let r = conditional_error_with_noise(&model, pn, 2, trials, 5).unwrap();
            let e = expected_noise_rates(&model, pn, 2).unwrap();
            assert!(within(r.abort_rate, e.abort_rate, trials), "{r:?} {e:?}");
            assert!(within(r.false_equal_rate, e.false_equal_rate, trials));
            assert!(within(r.false_notequal_rate, e.false_notequal_rate, trials));
        }
    }

    #[test]
    fn lossy_detection_matches_closed_form() {
        let model = ImperfectionModel {
            source: PhotonSource::Poisson { mean_photon_number: 0.8 },
            transmission: 0.6,
            detector_efficiency: 0.7,
            dark_count_prob: 2e-3,
            slots: 10,
            ..Default::default()
        };
        let trials = 100_000;
        let r = conditional_error_with_noise(&model, 0.25, 5, trials, 2).unwrap();
        let e = expected_noise_rates(&model, 0.25, 5).unwrap();
        assert!(within(r.false_equal_rate, e.false_equal_rate, trials), "{r:?} {e:?}");
        assert!(within(r.abort_rate, e.abort_rate, trials), "{r:?} {e:?}");
        for v in [r.false_equal_rate, r.false_notequal_rate, r.abort_rate] {
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn noise_is_reproducible() {
        let model = ImperfectionModel {
            dark_count_prob: 1e-2,
            slots: 5,
            ..Default::default()
        };
        let a = conditional_error_with_noise(&model, 0.3, 3, 1000, 99).unwrap();
        let b = conditional_error_with_noise(&model, 0.3, 3, 1000, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_input_validation() {
        let m = ImperfectionModel::default();
        assert!(conditional_error_with_noise(&m, 1.5, 1, 10, 0).is_err());
        assert!(conditional_error_with_noise(&m, 0.5, 0, 10, 0).is_err());
        assert!(conditional_error_with_noise(&m, 0.5, 1, 0, 0).is_err());
        let bad = ImperfectionModel {
            dark_count_prob: 1.0,
            ..m
        };
        assert!(conditional_error_with_noise(&bad, 0.5, 1, 10, 0).is_err());
    }

    #[test]
    fn sweep_rows() {
        let rows = noise_sweep(
            &noiseless_single_photon(),
            SweepParameter::DarkCountProb,
            &[0.0, 1e-3],
            0.0,
            2,
            500,
            4,
        )
        .unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].parameter, "dark_count_prob");
        assert_eq!(rows[1].metric, "false_notequal");
        assert_eq!(rows[1].rate, 0.0);
    }

    #[test]
    fn report_echoes_model() {
        let r = feasibility_report(&ImperfectionModel::default()).unwrap();
        assert_eq!(r.model, ImperfectionModel::default());
        assert_eq!(r.speed_of_light, SPEED_OF_LIGHT);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"paper_claim_slot\":3000"));
    }
}
