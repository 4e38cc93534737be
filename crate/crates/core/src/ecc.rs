//! Binary linear codes with a declared minimum distance.
//!
//! Messages and codewords are [`BitString`]s written most significant bit
//! first. Every code here is linear over GF(2): `encode(x) = x * G` where the
//! generator `G` has one row per message bit. The declared distance `t` of
//! each family can be checked against [`min_distance_bruteforce`].
//!
//! Text format (bit-exact round trip):
//!
//! ```text
//! n m t kind
//! <row 1 as m characters 0/1>
//! ...
//! <row n>
//! ```

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::rng_from_seed;

/// Largest message length for which exhaustive enumeration is attempted.
pub const MAX_ENUMERABLE_N: usize = 20;
/// Largest message length for the quadratic pairwise oracle.
pub const MAX_PAIRWISE_N: usize = 12;

/// Fixed-length bit string, bit 0 is the leftmost (most significant) bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidDimension("bit string length must be positive".into()));
        }
        Ok(BitString {
            len,
            words: vec![0; len.div_ceil(64)],
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut s = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        Ok(s)
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Result<Self> {
        if len < 64 && value >> len != 0 {
            return Err(Error::domain(format!("value {value} does not fit in {len} bits")));
        }
        let mut s = Self::zeros(len)?;
        for i in 0..len.min(64) {
            s.set(len - 1 - i, (value >> i) & 1 == 1);
        }
        Ok(s)
    }

    /// Parses hex digits into a string of exactly `len` bits.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let mut s = Self::zeros(len)?;
        let digits: Vec<u32> = hex
            .trim()
            .trim_start_matches("0x")
            .chars()
            .map(|c| c.to_digit(16).ok_or_else(|| Error::domain(format!("invalid hex digit '{c}'"))))
            .collect::<Result<_>>()?;
        // walk from the least significant end
        for (k, d) in digits.iter().rev().enumerate() {
            for b in 0..4 {
                if (d >> b) & 1 == 1 {
                    let from_right = 4 * k + b;
                    if from_right >= len {
                        return Err(Error::domain(format!("hex value '{hex}' does not fit in {len} bits")));
                    }
                    s.set(len - 1 - from_right, true);
                }
            }
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn check_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.xor_assign_words(&other.words);
        Ok(out)
    }

    fn xor_assign_words(&mut self, words: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(words) {
            *a ^= b;
        }
    }

    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Big-endian hex, `ceil(len/4)` digits, lowercase.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        (0..digits)
            .map(|k| {
                // digit k counts from the left; its bits sit at from_right positions
                let mut d = 0u32;
                let base = 4 * (digits - 1 - k);
                for b in 0..4 {
                    let from_right = base + b;
                    if from_right < self.len && self.get(self.len - 1 - from_right) {
                        d |= 1 << b;
                    }
                }
                char::from_digit(d, 16).unwrap()
            })
            .collect()
    }

    /// Value as an integer; only for strings of at most 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::domain(format!("invalid bit character '{other}'"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        BitString::from_bits(&bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    Identity,
    Repetition,
    Hadamard,
    RandomLinear,
}

impl CodeKind {
    pub fn name(self) -> &'static str {
        match self {
            CodeKind::Identity => "identity",
            CodeKind::Repetition => "repetition",
            CodeKind::Hadamard => "hadamard",
            CodeKind::RandomLinear => "random_linear",
        }
    }
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(CodeKind::Identity),
            "repetition" => Ok(CodeKind::Repetition),
            "hadamard" => Ok(CodeKind::Hadamard),
            "random_linear" | "random" => Ok(CodeKind::RandomLinear),
            other => Err(Error::domain(format!("unknown code kind '{other}'"))),
        }
    }
}

/// A binary linear code mapping `n`-bit messages to `m`-bit codewords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    n: usize,
    m: usize,
    t: usize,
    kind: CodeKind,
    generator: Vec<BitString>,
}

impl Code {
    fn from_generator(kind: CodeKind, t: usize, generator: Vec<BitString>) -> Code {
        let n = generator.len();
        let m = generator[0].len();
        Code { n, m, t, kind, generator }
    }

    /// Identity code, `m = n`, `t = 1`.
    pub fn identity(n: usize) -> Result<Code> {
        if n == 0 {
            return Err(Error::InvalidDimension("message length n must be positive".into()));
        }
        let rows = (0..n)
            .map(|j| {
                let mut row = BitString::zeros(n)?;
                row.set(j, true);
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(Code::from_generator(CodeKind::Identity, 1, rows))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Declared minimum distance.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn generator(&self) -> &[BitString] {
        &self.generator
    }

    /// `t / m`.
    pub fn relative_distance(&self) -> f64 {
        self.t as f64 / self.m as f64
    }

    /// True when two distinct messages share a codeword.
    pub fn is_degenerate(&self) -> bool {
        self.t == 0
    }

    /// `x * G` over GF(2).
    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let mut out = BitString::zeros(self.m)?;
        for (j, row) in self.generator.iter().enumerate() {
            if x.get(j) {
                out.xor_assign_words(&row.words);
            }
        }
        Ok(out)
    }

    /// Serializes to the plain-text exchange format.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {} {}\n", self.n, self.m, self.t, self.kind.name());
        for row in &self.generator {
            s.push_str(&row.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the plain-text exchange format. The declared `t` is taken as-is;
    /// use [`min_distance_bruteforce`] to verify it.
    pub fn from_text(text: &str) -> Result<Code> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header line 'n m t kind'".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(hline, format!("expected 'n m t kind', found '{header}'")));
        }
        let num = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(hline, format!("invalid {what} '{s}'")))
        };
        let n = num(fields[0], "n")?;
        let m = num(fields[1], "m")?;
        let t = num(fields[2], "t")?;
        let kind: CodeKind = fields[3]
            .parse()
            .map_err(|e: Error| parse_err(hline, e.to_string()))?;
        if n == 0 || m == 0 {
            return Err(parse_err(hline, "n and m must be positive".into()));
        }
        if t > m {
            return Err(parse_err(hline, format!("declared distance t={t} exceeds m={m}")));
        }
        let mut generator = Vec::with_capacity(n);
        for (lineno, line) in lines {
            if generator.len() == n {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(parse_err(lineno, format!("unexpected extra row (n={n})")));
            }
            let row: BitString = line.parse().map_err(|e: Error| parse_err(lineno, e.to_string()))?;
            if row.len() != m {
                return Err(parse_err(lineno, format!("row has {} bits, expected m={m}", row.len())));
            }
            generator.push(row);
        }
        if generator.len() != n {
            return Err(parse_err(
                text.lines().count() + 1,
                format!("expected {n} generator rows, found {}", generator.len()),
            ));
        }
        Ok(Code { n, m, t, kind, generator })
    }
}

/// Hadamard code: `m = 2^n`, `t = 2^(n-1)`; codeword bit `z` is `<x, z>` mod 2
/// for `z = 0 .. 2^n - 1`.
pub fn hadamard_code(n: usize) -> Result<Code> {
    if n == 0 {
        return Err(Error::InvalidDimension("message length n must be positive".into()));
    }
    if n > MAX_ENUMERABLE_N {
        return Err(Error::resource(format!(
            "hadamard code with n={n} exceeds n <= {MAX_ENUMERABLE_N}"
        )));
    }
    let m = 1usize << n;
    let rows = (0..n)
        .map(|j| {
            let mut row = BitString::zeros(m)?;
            for z in 0..m {
                if (z >> (n - 1 - j)) & 1 == 1 {
                    row.set(z, true);
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Code::from_generator(CodeKind::Hadamard, m / 2, rows))
}

/// Each message bit repeated `r` times contiguously: `m = n r`, `t = r`.
pub fn repetition_code(n: usize, r: usize) -> Result<Code> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidDimension("n and r must be positive".into()));
    }
    let m = n * r;
    let rows = (0..n)
        .map(|j| {
            let mut row = BitString::zeros(m)?;
            for i in j * r..(j + 1) * r {
                row.set(i, true);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Code::from_generator(CodeKind::Repetition, r, rows))
}

/// Random `n x m` generator from the seeded stream; `t` is computed by brute force.
///
/// Each row is filled from consecutive 64-bit draws, word by word, the last
/// word masked to the row length.
pub fn random_linear_code(n: usize, m: usize, seed: u64) -> Result<Code> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidDimension("n and m must be positive".into()));
    }
    if n > MAX_ENUMERABLE_N {
        return Err(Error::resource(format!(
            "distance oracle infeasible for n={n} (limit {MAX_ENUMERABLE_N})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let rows: Vec<BitString> = (0..n)
        .map(|_| {
            let mut row = BitString::zeros(m)?;
            let nwords = row.words.len();
            for (w, word) in row.words.iter_mut().enumerate() {
                *word = rng.next_u64();
                if w == nwords - 1 && m % 64 != 0 {
                    *word &= (1u64 << (m % 64)) - 1;
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut code = Code::from_generator(CodeKind::RandomLinear, 0, rows);
    code.t = min_distance_bruteforce(&code)?;
    Ok(code)
}

/// Minimum weight over all `2^n - 1` nonzero codewords.
///
/// Messages are enumerated in Gray-code order within chunks that run in
/// parallel, so each step costs one row XOR and a popcount.
pub fn min_distance_bruteforce(code: &Code) -> Result<usize> {
    let n = code.n;
    if n > MAX_ENUMERABLE_N {
        return Err(Error::resource(format!(
            "distance oracle infeasible for n={n} (limit {MAX_ENUMERABLE_N})"
        )));
    }
    let high_bits = n.min(6);
    let low_bits = n - high_bits;
    let best = (0u64..1 << high_bits)
        .into_par_iter()
        .map(|high| {
            // rows [0, low_bits) vary in Gray order, rows [low_bits, n) fixed by `high`
            let mut word = vec![0u64; code.generator[0].words.len()];
            for b in 0..high_bits {
                if (high >> b) & 1 == 1 {
                    for (a, r) in word.iter_mut().zip(&code.generator[low_bits + b].words) {
                        *a ^= r;
                    }
                }
            }
            let weight = |w: &[u64]| w.iter().map(|x| x.count_ones() as usize).sum::<usize>();
            let mut best = if high == 0 { usize::MAX } else { weight(&word) };
            for g in 1u64..1 << low_bits {
                let flip = g.trailing_zeros() as usize;
                for (a, r) in word.iter_mut().zip(&code.generator[flip].words) {
                    *a ^= r;
                }
                best = best.min(weight(&word));
            }
            best
        })
        .min()
        .unwrap_or(usize::MAX);
    // n >= 1 so at least one nonzero message exists
    Ok(best)
}

/// Minimum Hamming distance over all pairs of distinct messages, by direct
/// encoding. Quadratic in `2^n`; makes no use of linearity.
pub fn min_distance_pairwise(code: &Code) -> Result<usize> {
    let n = code.n;
    if n > MAX_PAIRWISE_N {
        return Err(Error::resource(format!(
            "pairwise distance oracle infeasible for n={n} (limit {MAX_PAIRWISE_N})"
        )));
    }
    let words = (0..1u64 << n)
        .map(|v| code.encode(&BitString::from_u64(v, n)?))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..words.len())
        .into_par_iter()
        .map(|i| {
            words[i + 1..]
                .iter()
                .map(|w| words[i].hamming_distance(w).unwrap())
                .min()
                .unwrap_or(usize::MAX)
        })
        .min()
        .unwrap_or(usize::MAX);
    Ok(best)
}

/// Relative distance of the Justesen family at rate parameter `mu`:
/// `1/10 - 1/(15 mu)`, defined for `mu >= 2`.
pub fn justesen_nu<T: Scalar>(mu: T) -> Result<T> {
    let two = T::from_f64_lossy(2.0);
    if !(mu >= two) {
        return Err(Error::domain(format!("justesen mu must be >= 2, got {mu}")));
    }
    let ten = T::from_f64_lossy(10.0);
    let fifteen = T::from_f64_lossy(15.0);
    Ok(T::one() / ten - T::one() / (fifteen * mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    // naive oracle: encode every message and take the smallest nonzero weight
    fn naive_min_weight(code: &Code) -> usize {
        (1..1u64 << code.n())
            .map(|v| code.encode(&BitString::from_u64(v, code.n()).unwrap()).unwrap().weight())
            .min()
            .unwrap()
    }

    #[test]
    fn identity_encodes_verbatim() {
        let c = Code::identity(4).unwrap();
        assert_eq!(c.encode(&bits("1011")).unwrap(), bits("1011"));
        assert_eq!(min_distance_bruteforce(&Code::identity(5).unwrap()).unwrap(), 1);
    }

    #[test]
    fn repetition_is_blockwise() {
        let c = repetition_code(2, 3).unwrap();
        assert_eq!(c.encode(&bits("10")).unwrap(), bits("111000"));
        assert_eq!(c.encode(&bits("01")).unwrap(), bits("000111"));
    }

    #[test]
    fn repetition_parameters() {
        let c = repetition_code(2, 1).unwrap();
        assert_eq!(c.encode(&bits("10")).unwrap(), bits("10"));
        assert_eq!(c.t(), 1);
        let c = repetition_code(3, 5).unwrap();
        assert_eq!((c.m(), c.t()), (15, 5));
        assert_eq!(min_distance_bruteforce(&c).unwrap(), 5);
        let c = repetition_code(1, 7).unwrap();
        assert_eq!((c.m(), c.t()), (7, 7));
        assert_eq!(min_distance_bruteforce(&repetition_code(2, 4).unwrap()).unwrap(), 4);
    }

    #[test]
    fn hadamard_inner_products() {
        let c = hadamard_code(2).unwrap();
        // <11, z> for z = 00, 01, 10, 11
        assert_eq!(c.encode(&bits("11")).unwrap(), bits("0110"));
        assert_eq!(c.encode(&bits("01")).unwrap(), bits("0101"));
        assert_eq!(c.encode(&bits("10")).unwrap(), bits("0011"));
    }

    #[test]
    fn hadamard_parameters() {
        let c = hadamard_code(1).unwrap();
        assert_eq!((c.m(), c.t()), (2, 1));
        let c = hadamard_code(4).unwrap();
        assert_eq!((c.m(), c.t()), (16, 8));
        assert_eq!(c.relative_distance(), 0.5);
        assert_eq!(naive_min_weight(&c), 8);
        let c = hadamard_code(8).unwrap();
        assert_eq!((c.m(), c.t()), (256, 128));
        assert_eq!(min_distance_bruteforce(&hadamard_code(3).unwrap()).unwrap(), 4);
    }

    #[test]
    fn hadamard_distance_for_all_small_n() {
        for n in 1..=8 {
            let c = hadamard_code(n).unwrap();
            assert_eq!(min_distance_bruteforce(&c).unwrap(), 1 << (n - 1), "n={n}");
            assert_eq!(naive_min_weight(&c), 1 << (n - 1), "n={n}");
        }
    }

    #[test]
    fn hadamard_too_large() {
        assert!(hadamard_code(21).unwrap_err().is_resource_limit());
    }

    #[test]
    fn encode_length_mismatch() {
        let c = hadamard_code(3).unwrap();
        assert!(matches!(
            c.encode(&bits("10")),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn random_code_is_reproducible() {
        let a = random_linear_code(4, 16, 1234).unwrap();
        let b = random_linear_code(4, 16, 1234).unwrap();
        assert_eq!(a, b);
        assert!(a.t() >= 1);
        assert_eq!(a.t(), naive_min_weight(&a));
        assert_ne!(a, random_linear_code(4, 16, 1235).unwrap());
    }

    #[test]
    fn random_code_seed_sweep() {
        let mut max_t = 0;
        for seed in 0..100 {
            let c = random_linear_code(8, 32, seed).unwrap();
            assert_eq!(c.t(), min_distance_pairwise(&c).unwrap(), "seed {seed}");
            max_t = max_t.max(c.t());
        }
        // Plotkin: a linear [32, 8] code has t <= 32 * 2^7 / (2^8 - 1)
        assert!(max_t <= 16, "max t = {max_t}");
        assert!(max_t >= 8, "max t = {max_t}");
    }

    #[test]
    fn random_code_degenerate_detected() {
        let degenerate = (0..1000)
            .map(|seed| random_linear_code(2, 2, seed).unwrap())
            .find(|c| c.is_degenerate())
            .expect("some seed yields a singular 2x2 generator");
        assert_eq!(min_distance_pairwise(&degenerate).unwrap(), 0);
        assert_eq!(degenerate.t(), 0);
    }

    #[test]
    fn random_code_too_large() {
        assert!(random_linear_code(21, 64, 0).unwrap_err().is_resource_limit());
        let c = repetition_code(21, 1).unwrap();
        assert!(min_distance_bruteforce(&c).unwrap_err().is_resource_limit());
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        for code in [
            hadamard_code(3).unwrap(),
            repetition_code(2, 3).unwrap(),
            random_linear_code(5, 70, 3).unwrap(),
            Code::identity(1).unwrap(),
        ] {
            let text = code.to_text();
            let back = Code::from_text(&text).unwrap();
            assert_eq!(back, code);
            assert_eq!(back.to_text(), text);
        }
        assert_eq!(
            repetition_code(2, 2).unwrap().to_text(),
            "2 4 2 repetition\n1100\n0011\n"
        );
    }

    #[test]
    fn text_parse_errors_carry_line_numbers() {
        let err = Code::from_text("2 4 2 repetition\n1100\n001\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = Code::from_text("2 4 9 repetition\n1100\n0011\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Code::from_text("2 4 2 bogus\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Code::from_text("2 4 2 repetition\n1100\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = Code::from_text("1 2 1 identity\n10\n11\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn hex_conversions() {
        assert_eq!(bits("0001").to_hex(), "1");
        assert_eq!(bits("101").to_hex(), "5");
        assert_eq!(bits("100000001").to_hex(), "101");
        assert_eq!(BitString::from_hex("5", 3).unwrap(), bits("101"));
        assert_eq!(BitString::from_hex("0x101", 9).unwrap(), bits("100000001"));
        assert!(BitString::from_hex("8", 3).is_err());
        assert_eq!(BitString::from_u64(6, 4).unwrap(), bits("0110"));
        assert_eq!(bits("0110").to_u64(), Some(6));
        assert!(BitString::from_u64(8, 3).is_err());
        assert!("".parse::<BitString>().is_err());
        assert!("10a".parse::<BitString>().is_err());
    }

    #[test]
    fn justesen_values() {
        assert!((justesen_nu(2.0f64).unwrap() - 1.0 / 15.0).abs() < 1e-15);
        assert!((justesen_nu(3.0f64).unwrap() - 7.0 / 90.0).abs() < 1e-15);
        assert!((justesen_nu(1e6f64).unwrap() - 0.1).abs() < 1e-7);
        assert!(justesen_nu(1.99f64).is_err());
        assert!(justesen_nu(f64::NAN).is_err());
        assert!((justesen_nu(2.0f32).unwrap() - 1.0 / 15.0).abs() < 1e-7);
    }

    fn code_strategy() -> impl Strategy<Value = Code> {
        prop_oneof![
            (1usize..7).prop_map(|n| hadamard_code(n).unwrap()),
            (1usize..7, 1usize..5).prop_map(|(n, r)| repetition_code(n, r).unwrap()),
            (1usize..7, 1usize..80, any::<u64>()).prop_map(|(n, m, s)| random_linear_code(n, m, s).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn distance_equals_weight_of_xor(code in code_strategy(), xs in any::<u64>(), ys in any::<u64>()) {
            let n = code.n();
            let mask = (1u64 << n) - 1;
            let x = BitString::from_u64(xs & mask, n).unwrap();
            let y = BitString::from_u64(ys & mask, n).unwrap();
            let ex = code.encode(&x).unwrap();
            let ey = code.encode(&y).unwrap();
            let exy = code.encode(&x.xor(&y).unwrap()).unwrap();
            let d = ex.hamming_distance(&ey).unwrap();
            prop_assert_eq!(d, exy.weight());
            if x != y {
                prop_assert!(d >= code.t());
                if code.t() >= 1 {
                    prop_assert_ne!(ex, ey);
                }
            }
        }

        #[test]
        fn gray_oracle_matches_pairwise(code in code_strategy()) {
            prop_assert_eq!(min_distance_bruteforce(&code).unwrap(), min_distance_pairwise(&code).unwrap());
        }

        #[test]
        fn text_round_trip(code in code_strategy()) {
            prop_assert_eq!(Code::from_text(&code.to_text()).unwrap(), code);
        }

        #[test]
        fn hex_round_trip(len in 1usize..130, seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let b: Vec<bool> = (0..len).map(|_| rand::RngCore::next_u32(&mut rng) & 1 == 1).collect();
            let s = BitString::from_bits(&b).unwrap();
            prop_assert_eq!(BitString::from_hex(&s.to_hex(), len).unwrap(), s);
        }
    }
}
