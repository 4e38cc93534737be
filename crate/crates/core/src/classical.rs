//! Classical simultaneous-message-passing baselines.
//!
//! Two parts: an exhaustive search over deterministic strategies for tiny
//! alphabets, and closed-form calculators for the communication bounds that
//! the quantum protocol is compared against.

use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ecc::justesen_nu;
use crate::error::{Error, Result};
use crate::protocol::{repetitions_needed, Verdict};
use crate::Rational;

/// Most work items (message-map pairs, or full strategies) a search may touch.
pub const MAX_ENUMERATION: u64 = 100_000_000;

/// The finite space of deterministic SMP strategies for equality on a `q`-letter alphabet.
///
/// A strategy is an Alice map `0..q -> 0..alice_msgs`, a Bob map
/// `0..q -> 0..bob_msgs` and a referee table over message pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategySpace {
    pub q: u64,
    pub alice_msgs: u64,
    pub bob_msgs: u64,
}

impl StrategySpace {
    pub fn new(q: u64, alice_msgs: u64, bob_msgs: u64) -> Result<Self> {
        if q == 0 || alice_msgs == 0 || bob_msgs == 0 {
            return Err(Error::domain("alphabet and message sizes must be positive"));
        }
        Ok(StrategySpace { q, alice_msgs, bob_msgs })
    }

    fn maps(msgs: u64, q: u64) -> Option<u64> {
        u32::try_from(q).ok().and_then(|q| msgs.checked_pow(q))
    }

    /// Number of (Alice map, Bob map) pairs, `a^q b^q`.
    pub fn map_pairs(&self) -> Option<u64> {
        Self::maps(self.alice_msgs, self.q)?.checked_mul(Self::maps(self.bob_msgs, self.q)?)
    }

    /// Number of referee tables, `2^(a b)`.
    pub fn referee_tables(&self) -> Option<u64> {
        let cells = u32::try_from(self.alice_msgs.checked_mul(self.bob_msgs)?).ok()?;
        1u64.checked_shl(cells).filter(|_| cells < 64)
    }

    /// Full strategy count `a^q b^q 2^(a b)`, if it fits in 128 bits.
    pub fn total_strategies(&self) -> Option<u128> {
        let cells = u32::try_from(self.alice_msgs.checked_mul(self.bob_msgs)?).ok()?;
        let tables = 1u128.checked_shl(cells).filter(|_| cells < 128)?;
        (self.map_pairs()? as u128).checked_mul(tables)
    }

    fn decode_map(mut code: u64, msgs: u64, q: u64) -> Vec<u64> {
        (0..q)
            .map(|_| {
                let d = code % msgs;
                code /= msgs;
                d
            })
            .collect()
    }
}

/// A deterministic strategy: message maps and the referee's decision table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmpStrategy {
    pub alice: Vec<u64>,
    pub bob: Vec<u64>,
    /// `referee[a][b]` is the verdict on receiving messages `a` and `b`.
    pub referee: Vec<Vec<Verdict>>,
}

impl SmpStrategy {
    /// Number of input pairs `(x, y)` on which the referee is wrong.
    pub fn error_pairs(&self) -> u64 {
        let q = self.alice.len();
        let mut errors = 0;
        for x in 0..q {
            for y in 0..q {
                let v = self.referee[self.alice[x] as usize][self.bob[y] as usize];
                let truth = if x == y { Verdict::Equal } else { Verdict::NotEqual };
                errors += u64::from(v != truth);
            }
        }
        errors
    }

    pub fn average_error(&self) -> Rational {
        let q = self.alice.len() as i64;
        Ratio::new(self.error_pairs() as i64, q * q)
    }
}

impl fmt::Display for SmpStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alice map (input -> message):")?;
        for (x, m) in self.alice.iter().enumerate() {
            writeln!(f, "  {x} -> {m}")?;
        }
        writeln!(f, "bob map (input -> message):")?;
        for (y, m) in self.bob.iter().enumerate() {
            writeln!(f, "  {y} -> {m}")?;
        }
        writeln!(f, "referee table (rows: alice message, columns: bob message):")?;
        write!(f, "     ")?;
        for b in 0..self.referee.first().map_or(0, Vec::len) {
            write!(f, " {b:>9}")?;
        }
        writeln!(f)?;
        for (a, row) in self.referee.iter().enumerate() {
            write!(f, "  {a:>3}")?;
            for v in row {
                write!(f, " {:>9}", v.to_string())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Optimum of the exhaustive strategy search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmpOptimum {
    pub space: StrategySpace,
    /// Minimum over all deterministic strategies of the error averaged over uniform inputs.
    pub min_avg_error: Rational,
    pub error_pairs: u64,
    /// Worst-case error of the witness over inputs (deterministic, so 0 or 1).
    pub worst_case_error: Rational,
    pub witness: SmpStrategy,
}

// per-cell tallies of equal / unequal input pairs landing on each message pair
fn cell_counts(alice: &[u64], bob: &[u64], b_msgs: usize, cells: &mut [(u32, u32)]) {
    cells.iter_mut().for_each(|c| *c = (0, 0));
    for (x, &ma) in alice.iter().enumerate() {
        for (y, &mb) in bob.iter().enumerate() {
            let c = &mut cells[ma as usize * b_msgs + mb as usize];
            if x == y {
                c.0 += 1;
            } else {
                c.1 += 1;
            }
        }
    }
}

fn optimum_from(space: StrategySpace, errors: u64, witness: SmpStrategy) -> SmpOptimum {
    let q2 = (space.q * space.q) as i64;
    SmpOptimum {
        space,
        min_avg_error: Ratio::new(errors as i64, q2),
        error_pairs: errors,
        worst_case_error: Ratio::from_integer(i64::from(errors > 0)),
        witness,
    }
}

/// Exact minimum average error over every deterministic strategy.
///
/// All Alice and Bob maps are enumerated. For a fixed pair of maps the error
/// is a sum of independent contributions from each referee cell, so the best
/// referee table is found cell by cell: answer `Equal` unless more unequal
/// than equal input pairs land on the cell. This covers all `2^(a b)` tables
/// without listing them; [`brute_force_smp_full`] lists them for cross-checks.
pub fn brute_force_smp(q: u64, alice_msgs: u64, bob_msgs: u64) -> Result<SmpOptimum> {
    let space = StrategySpace::new(q, alice_msgs, bob_msgs)?;
    let alice_maps = StrategySpace::maps(alice_msgs, q);
    let bob_maps = StrategySpace::maps(bob_msgs, q);
    let (Some(alice_maps), Some(bob_maps)) = (alice_maps, bob_maps) else {
        return Err(Error::resource("strategy space overflows"));
    };
    match space.map_pairs() {
        Some(p) if p <= MAX_ENUMERATION => {}
        _ => {
            return Err(Error::resource(format!(
                "{alice_msgs}^{q} x {bob_msgs}^{q} message-map pairs exceed {MAX_ENUMERATION}"
            )))
        }
    }
    let b_msgs = bob_msgs as usize;
    let ncells = (alice_msgs * bob_msgs) as usize;
    let (errors, ai, bi) = (0..alice_maps)
        .into_par_iter()
        .map(|ai| {
            let alice = StrategySpace::decode_map(ai, alice_msgs, q);
            let mut cells = vec![(0u32, 0u32); ncells];
            let mut best = (u64::MAX, ai, 0);
            for bi in 0..bob_maps {
                let bob = StrategySpace::decode_map(bi, bob_msgs, q);
                cell_counts(&alice, &bob, b_msgs, &mut cells);
                let errors: u64 = cells.iter().map(|&(eq, ne)| u64::from(eq.min(ne))).sum();
                if errors < best.0 {
                    best = (errors, ai, bi);
                }
            }
            best
        })
        .min()
        .expect("at least one strategy");

    let alice = StrategySpace::decode_map(ai, alice_msgs, q);
    let bob = StrategySpace::decode_map(bi, bob_msgs, q);
    let mut cells = vec![(0u32, 0u32); ncells];
    cell_counts(&alice, &bob, b_msgs, &mut cells);
    let referee = (0..alice_msgs as usize)
        .map(|a| {
            (0..b_msgs)
                .map(|b| {
                    let (eq, ne) = cells[a * b_msgs + b];
                    if ne > eq {
                        Verdict::NotEqual
                    } else {
                        Verdict::Equal
                    }
                })
                .collect()
        })
        .collect();
    let witness = SmpStrategy { alice, bob, referee };
    debug_assert_eq!(witness.error_pairs(), errors);
    Ok(optimum_from(space, errors, witness))
}

/// Same optimum as [`brute_force_smp`], by listing every strategy including
/// every referee table. Limited to spaces of at most [`MAX_ENUMERATION`] strategies.
pub fn brute_force_smp_full(q: u64, alice_msgs: u64, bob_msgs: u64) -> Result<SmpOptimum> {
    let space = StrategySpace::new(q, alice_msgs, bob_msgs)?;
    match space.total_strategies() {
        Some(total) if total <= MAX_ENUMERATION as u128 => {}
        _ => {
            return Err(Error::resource(format!(
                "full strategy space exceeds {MAX_ENUMERATION} strategies"
            )))
        }
    }
    let alice_maps = StrategySpace::maps(alice_msgs, q).unwrap();
    let bob_maps = StrategySpace::maps(bob_msgs, q).unwrap();
    let tables = space.referee_tables().unwrap();
    let b_msgs = bob_msgs as usize;
    let (errors, ai, bi, table) = (0..alice_maps)
        .into_par_iter()
        .map(|ai| {
            let alice = StrategySpace::decode_map(ai, alice_msgs, q);
            let mut best = (u64::MAX, ai, 0, 0);
            for bi in 0..bob_maps {
                let bob = StrategySpace::decode_map(bi, bob_msgs, q);
                for table in 0..tables {
                    let mut errors = 0;
                    for (x, &ma) in alice.iter().enumerate() {
                        for (y, &mb) in bob.iter().enumerate() {
                            let says_ne = (table >> (ma as usize * b_msgs + mb as usize)) & 1 == 1;
                            errors += u64::from(says_ne == (x == y));
                        }
                    }
                    if errors < best.0 {
                        best = (errors, ai, bi, table);
                    }
                }
            }
            best
        })
        .min()
        .expect("at least one strategy");
    let referee = (0..alice_msgs as usize)
        .map(|a| {
            (0..b_msgs)
                .map(|b| {
                    if (table >> (a * b_msgs + b)) & 1 == 1 {
                        Verdict::NotEqual
                    } else {
                        Verdict::Equal
                    }
                })
                .collect()
        })
        .collect();
    let witness = SmpStrategy {
        alice: StrategySpace::decode_map(ai, alice_msgs, q),
        bob: StrategySpace::decode_map(bi, bob_msgs, q),
        referee,
    };
    Ok(optimum_from(space, errors, witness))
}

/// Minimum average error when the parties may mix deterministic strategies
/// with shared randomness.
///
/// The average error of a mixture is the weighted mean of its components'
/// errors, so it is never below the best pure strategy; the value is the
/// deterministic optimum, checked against its own witness.
pub fn shared_randomness_floor(q: u64, alice_msgs: u64, bob_msgs: u64) -> Result<Rational> {
    let opt = brute_force_smp(q, alice_msgs, bob_msgs)?;
    assert_eq!(opt.witness.average_error(), opt.min_avg_error);
    Ok(opt.min_avg_error)
}

/// Lower bounds on classical SMP communication for `n`-bit equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBounds {
    pub n: u64,
    /// `a b >= n / 400`.
    pub ab_lower: f64,
    /// `max(a, b) >= sqrt(n) / 20`.
    pub max_lower: f64,
    /// With one shared random bit: `sqrt(n) / 40`.
    pub shared_bit_lower: f64,
}

pub fn babai_kimmel_bounds(n: u64) -> Result<ClassicalBounds> {
    if n == 0 {
        return Err(Error::domain("input length n must be positive"));
    }
    let nf = n as f64;
    Ok(ClassicalBounds {
        n,
        ab_lower: nf / 400.0,
        max_lower: nf.sqrt() / 20.0,
        shared_bit_lower: nf.sqrt() / 40.0,
    })
}

/// Qubit counts for a photon spread over `m` modes per party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumCost {
    pub m: u64,
    pub k: u64,
    /// `log2 m` qubits sent by each party per run.
    pub per_party_per_run: f64,
    /// `k log2 m`.
    pub per_party_total: f64,
    /// `1 + log2 m` qubits crossing both channels per run (dimension `2m`).
    pub channel_total: f64,
}

pub fn quantum_cost(m: u64, k: u64) -> Result<QuantumCost> {
    if m == 0 || k == 0 {
        return Err(Error::domain("m and k must be positive"));
    }
    let per_run = (m as f64).log2();
    Ok(QuantumCost {
        m,
        k,
        per_party_per_run: per_run,
        per_party_total: k as f64 * per_run,
        channel_total: 1.0 + per_run,
    })
}

/// [`quantum_cost`] with `m = 2n` modes per party, so `1 + log2 n` qubits per party per run.
pub fn quantum_cost_for_input_length(n: u64, k: u64) -> Result<QuantumCost> {
    let m = n
        .checked_mul(2)
        .ok_or_else(|| Error::domain("2n overflows"))?;
    quantum_cost(m, k)
}

/// Classical bits extractable from the `2m`-dimensional photon: `1 + log2 m`.
pub fn holevo_classical_cap(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    Ok(1.0 + (m as f64).log2())
}

/// Quantum versus classical cost at one input length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u64,
    pub ab_lower: f64,
    pub max_lower: f64,
    pub shared_bit_lower: f64,
    /// `k (1 + log2 n)` qubits per party over all repetitions.
    pub quantum_cost_per_party: f64,
    /// True when the quantum cost is at most the shared-bit classical bound.
    pub breakeven: bool,
}

pub fn bound_report(n: u64, epsilon: f64, mu: f64) -> Result<BoundReport> {
    let b = babai_kimmel_bounds(n)?;
    let k = repetitions_needed(justesen_nu(mu)?, epsilon)?;
    let quantum = k as f64 * (1.0 + (n as f64).log2());
    Ok(BoundReport {
        n,
        ab_lower: b.ab_lower,
        max_lower: b.max_lower,
        shared_bit_lower: b.shared_bit_lower,
        quantum_cost_per_party: quantum,
        breakeven: quantum <= b.shared_bit_lower,
    })
}

/// Smallest input length at which the quantum protocol is cheaper than the classical bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakeven {
    pub epsilon: f64,
    pub mu: f64,
    pub nu: f64,
    pub k: u64,
    pub n: u64,
    pub quantum_cost: f64,
    pub classical_bound: f64,
    pub quantum_cost_below: f64,
    pub classical_bound_below: f64,
    /// Doubling points probed before bisection.
    pub search_path: Vec<u64>,
}

/// Smallest `n` with `k (1 + log2 n) <= sqrt(n) / 40`, where `k` is the
/// repetition count for the Justesen relative distance at `mu`.
///
/// Doubles `n` until the inequality holds, then bisects the last interval.
/// The gap `k (1 + log2 n) - sqrt(n)/40` rises and then falls, so once
/// negative it stays negative; the doubling path is checked to be positive
/// before the crossing.
pub fn breakeven_n(epsilon: f64, mu: f64) -> Result<Breakeven> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let nu = justesen_nu(mu)?;
    let k = repetitions_needed(nu, epsilon)?;
    let quantum = |n: u64| k as f64 * (1.0 + (n as f64).log2());
    let classical = |n: u64| (n as f64).sqrt() / 40.0;
    let holds = |n: u64| quantum(n) <= classical(n);

    let mut search_path = vec![1u64];
    let mut hi = 1u64;
    while !holds(hi) {
        hi = hi
            .checked_mul(2)
            .filter(|&h| h <= 1 << 62)
            .ok_or_else(|| Error::resource("break-even search exceeded 2^62"))?;
        search_path.push(hi);
    }
    if hi == 1 {
        return Err(Error::domain("inequality already holds at n = 1"));
    }
    assert!(search_path[..search_path.len() - 1].iter().all(|&n| !holds(n)));
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Breakeven {
        epsilon,
        mu,
        nu,
        k,
        n: hi,
        quantum_cost: quantum(hi),
        classical_bound: classical(hi),
        quantum_cost_below: quantum(lo),
        classical_bound_below: classical(lo),
        search_path,
    })
}
