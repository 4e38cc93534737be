//! Single-photon mode states of the two-arm interferometer.
//!
//! A photon is split between Alice's arm (`A`) and Bob's arm (`B`), each
//! carrying `m` internal modes. The arms pick up phases, then a 50:50 beam
//! splitter maps every pair `(A,i)`, `(B,i)` onto the output ports `E` and
//! `N` of the same mode index:
//!
//! ```text
//! |i_A> -> (|i_E> + |i_N>) / sqrt(2)
//! |i_B> -> (|i_E> - |i_N>) / sqrt(2)
//! ```
//!
//! Amplitudes are stored densely, `m` per side, and the stage (before or
//! after the beam splitter) is an explicit tag checked by every operation.

use std::fmt;
use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Before recombination: labels `(A,i)` and `(B,i)`.
    Branch,
    /// After recombination: labels `(E,i)` and `(N,i)`.
    Port,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Branch => "branch",
            Stage::Port => "port",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arm {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    /// Symmetric output, "equal".
    E,
    /// Antisymmetric output, "not equal".
    N,
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arm::A => "A",
            Arm::B => "B",
        })
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Port::E => "E",
            Port::N => "N",
        })
    }
}

/// A single-photon basis mode. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeLabel {
    Branch { arm: Arm, index: usize },
    Port { port: Port, index: usize },
}

impl ModeLabel {
    pub fn stage(&self) -> Stage {
        match self {
            ModeLabel::Branch { .. } => Stage::Branch,
            ModeLabel::Port { .. } => Stage::Port,
        }
    }

    pub fn index(&self) -> usize {
        match *self {
            ModeLabel::Branch { index, .. } | ModeLabel::Port { index, .. } => index,
        }
    }

    pub fn side_name(&self) -> &'static str {
        match self {
            ModeLabel::Branch { arm: Arm::A, .. } => "A",
            ModeLabel::Branch { arm: Arm::B, .. } => "B",
            ModeLabel::Port { port: Port::E, .. } => "E",
            ModeLabel::Port { port: Port::N, .. } => "N",
        }
    }

    // position of this label in (first side 1..m, second side 1..m) order
    fn slot(&self, m: usize) -> Option<(bool, usize)> {
        let i = self.index();
        if i == 0 || i > m {
            return None;
        }
        let second = matches!(
            self,
            ModeLabel::Branch { arm: Arm::B, .. } | ModeLabel::Port { port: Port::N, .. }
        );
        Some((second, i - 1))
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.side_name(), self.index())
    }
}

/// Normalized single-photon state over `2m` labeled modes.
///
/// States are immutable; every operation returns a new value.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState<T: Scalar> {
    stage: Stage,
    // A or E amplitudes, index i-1
    first: Vec<Complex<T>>,
    // B or N amplitudes, index i-1
    second: Vec<Complex<T>>,
}

/// Port measurement statistics of a recombined state.
#[derive(Debug, Clone, PartialEq)]
pub struct PortProbabilities<T> {
    pub p_e: T,
    pub p_n: T,
    /// Probability of each label, E modes first then N modes, ascending index.
    pub per_mode: Vec<(ModeLabel, T)>,
}

impl<T: Scalar> ModeState<T> {
    /// Photon split evenly over all `2m` branch modes, amplitude `1/sqrt(2m)` each.
    pub fn prepare_split(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension("mode count m must be at least 1".into()));
        }
        let amp = T::one() / T::from_usize_exact(2 * m).sqrt();
        let v = vec![Complex::new(amp, T::zero()); m];
        Ok(ModeState {
            stage: Stage::Branch,
            first: v.clone(),
            second: v,
        })
    }

    /// Branch-stage state from explicit arm amplitudes; must be normalized.
    pub fn from_branch_amplitudes(alpha: Vec<Complex<T>>, beta: Vec<Complex<T>>) -> Result<Self> {
        Self::from_parts(Stage::Branch, alpha, beta)
    }

    /// Port-stage state from explicit E and N amplitudes; must be normalized.
    pub fn from_port_amplitudes(e: Vec<Complex<T>>, n: Vec<Complex<T>>) -> Result<Self> {
        Self::from_parts(Stage::Port, e, n)
    }

    fn from_parts(stage: Stage, first: Vec<Complex<T>>, second: Vec<Complex<T>>) -> Result<Self> {
        if first.is_empty() {
            return Err(Error::InvalidDimension("mode count m must be at least 1".into()));
        }
        if first.len() != second.len() {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                actual: second.len(),
            });
        }
        let state = ModeState { stage, first, second };
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::NORM_TOLERANCE {
            return Err(Error::domain(format!("state is not normalized (norm^2 = {norm})")));
        }
        Ok(state)
    }

    pub fn m(&self) -> usize {
        self.first.len()
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn norm_sqr(&self) -> T {
        self.first
            .iter()
            .chain(self.second.iter())
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Amplitude of `label`, or `None` if the label is out of range or at the other stage.
    pub fn amplitude(&self, label: ModeLabel) -> Option<Complex<T>> {
        if label.stage() != self.stage {
            return None;
        }
        let (second, i) = label.slot(self.m())?;
        Some(if second { self.second[i] } else { self.first[i] })
    }

    fn label(&self, second: bool, i: usize) -> ModeLabel {
        let index = i + 1;
        match (self.stage, second) {
            (Stage::Branch, false) => ModeLabel::Branch { arm: Arm::A, index },
            (Stage::Branch, true) => ModeLabel::Branch { arm: Arm::B, index },
            (Stage::Port, false) => ModeLabel::Port { port: Port::E, index },
            (Stage::Port, true) => ModeLabel::Port { port: Port::N, index },
        }
    }

    /// All `(label, amplitude)` pairs: first side (A or E) then second side, ascending index.
    pub fn amplitudes(&self) -> impl Iterator<Item = (ModeLabel, Complex<T>)> + '_ {
        let first = self.first.iter().enumerate().map(move |(i, a)| (self.label(false, i), *a));
        let second = self.second.iter().enumerate().map(move |(i, a)| (self.label(true, i), *a));
        first.chain(second)
    }

    fn require(&self, stage: Stage) -> Result<()> {
        if self.stage != stage {
            return Err(Error::StageMismatch {
                expected: stage.name(),
                actual: self.stage.name(),
            });
        }
        Ok(())
    }

    /// Multiplies amplitude `(arm, i)` by `exp(i * phases[i-1])`.
    pub fn apply_phases(&self, arm: Arm, phases: &[T]) -> Result<Self> {
        self.require(Stage::Branch)?;
        if phases.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                actual: phases.len(),
            });
        }
        let mut out = self.clone();
        let target = match arm {
            Arm::A => &mut out.first,
            Arm::B => &mut out.second,
        };
        for (amp, &phi) in target.iter_mut().zip(phases) {
            *amp = *amp * Complex::from_polar(T::one(), phi);
        }
        Ok(out)
    }

    /// Beam splitter: `E_i = (a_i + b_i)/sqrt(2)`, `N_i = (a_i - b_i)/sqrt(2)`.
    pub fn recombine(&self) -> Result<Self> {
        self.require(Stage::Branch)?;
        let (first, second) = self.hadamard_pairs();
        Ok(ModeState {
            stage: Stage::Port,
            first,
            second,
        })
    }

    /// Inverse of [`recombine`](Self::recombine): maps a port-stage state back to the arms.
    ///
    /// The beam-splitter matrix is real symmetric and squares to the identity,
    /// so the inverse applies the same pairwise transform.
    pub fn split_ports(&self) -> Result<Self> {
        self.require(Stage::Port)?;
        let (first, second) = self.hadamard_pairs();
        Ok(ModeState {
            stage: Stage::Branch,
            first,
            second,
        })
    }

    fn hadamard_pairs(&self) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let s = T::FRAC_1_SQRT_2();
        self.first
            .iter()
            .zip(&self.second)
            .map(|(&a, &b)| ((a + b) * s, (a - b) * s))
            .unzip()
    }

    /// Probabilities of the photon exiting by port E or N, and per mode.
    pub fn port_probabilities(&self) -> Result<PortProbabilities<T>> {
        self.require(Stage::Port)?;
        let p_e = self.first.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        let p_n = self.second.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        let per_mode = self.amplitudes().map(|(l, a)| (l, a.norm_sqr())).collect();
        Ok(PortProbabilities { p_e, p_n, per_mode })
    }

    /// Debug dump, one CSV row `stage,side,index,re,im` per label.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["stage", "side", "index", "re", "im"])?;
        for (label, amp) in self.amplitudes() {
            w.write_record([
                self.stage.name().to_string(),
                label.side_name().to_string(),
                label.index().to_string(),
                amp.re.to_string(),
                amp.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
