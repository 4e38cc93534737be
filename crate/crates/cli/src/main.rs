//! `qfp`: experiment driver for single-photon fingerprinting.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 resource limit.

mod config;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use qfp_core::classical::{
    bound_report, breakeven_n, brute_force_smp, brute_force_smp_full, quantum_cost_for_input_length, BoundReport,
    Breakeven, QuantumCost, SmpStrategy,
};
use qfp_core::ecc::{hadamard_code, min_distance_bruteforce, random_linear_code, repetition_code};
use qfp_core::physical::{
    expected_noise_rates, feasibility_report, noise_sweep, ExpectedNoiseRates, FeasibilityReport, ImperfectionModel,
    PhotonSource, SweepParameter, SweepRow, TimingWindow,
};
use qfp_core::protocol::{
    phase_protocol_average_error, phase_protocol_average_error_exact, phase_protocol_pn, run_sampled, BatchRow,
};
use qfp_core::report::{csv_string, json_string};
use qfp_core::seed::{derive_seed, rng_from_seed};
use qfp_core::{BitString, Code, CodeKind, ProtocolParams, Verdict};

/// Rows a single invocation may emit before it is refused as a resource limit.
const MAX_ROWS: u64 = 10_000_000;

#[derive(Parser, Debug)]
#[command(name = "qfp", version, about = "Single-photon quantum fingerprinting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run the fingerprinting protocol on input pairs (exact or sampled).
    Run(RunArgs),
    /// Classical baselines: exhaustive SMP search, bound calculators, break-even.
    Classical(ClassicalArgs),
    /// Timing and photon-statistics feasibility, optional noise sweep.
    Feasibility(FeasibilityArgs),
    /// Export, import and verify linear codes.
    Codes {
        #[command(subcommand)]
        action: CodesCmd,
    },
}

#[derive(Subcommand, Debug)]
enum CodesCmd {
    /// Write a code in the plain-text format.
    Export(ExportArgs),
    /// Read a code file and report its parameters.
    Import(FileArgs),
    /// Recompute the minimum distance of a code file; exit 1 on mismatch.
    Verify(FileArgs),
}

#[derive(Args, Debug, Clone)]
struct Outputs {
    /// Experiment file with one [section] per subcommand; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the CSV table here (atomically) instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the JSON report here (atomically).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CodeArgs {
    /// hadamard, identity, repetition or random.
    #[arg(long, default_value = "hadamard")]
    code: CodeKind,
    /// Input length in bits.
    #[arg(long)]
    n: Option<usize>,
    /// Repetition factor for --code repetition.
    #[arg(long, default_value_t = 3)]
    r: usize,
    /// Codeword length for --code random.
    #[arg(long)]
    m: Option<usize>,
    /// Seed of the random generator matrix.
    #[arg(long, default_value_t = 0)]
    code_seed: u64,
    /// Load the code from a file instead of building it.
    #[arg(long)]
    code_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct RunArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Alice's input: 0/1 string, or hex with a 0x prefix (an integer for --phase-protocol).
    #[arg(long)]
    x: Option<String>,
    /// Bob's input, same format as --x.
    #[arg(long)]
    y: Option<String>,
    /// Report exact probabilities only, no sampling.
    #[arg(long)]
    exact: bool,
    /// Repetitions; derived from the code distance and --epsilon when omitted.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Sampled protocol executions per input pair.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Every pair of inputs.
    #[arg(long)]
    all_pairs: bool,
    /// This many uniformly random input pairs.
    #[arg(long)]
    random_pairs: Option<u64>,
    /// Single-mode phase protocol on inputs 0..q.
    #[arg(long)]
    phase_protocol: bool,
    #[arg(long, default_value_t = 3)]
    q: u64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ClassicalArgs {
    /// Input alphabet size.
    #[arg(long, default_value_t = 3)]
    q: u64,
    /// Alice's message alphabet size.
    #[arg(long, default_value_t = 3)]
    alice: u64,
    /// Bob's message alphabet size.
    #[arg(long, default_value_t = 2)]
    bob: u64,
    /// Enumerate every referee table as well (slower cross-check).
    #[arg(long)]
    full: bool,
    /// Report the communication lower bounds at --n.
    #[arg(long)]
    bounds: bool,
    #[arg(long)]
    n: Option<u64>,
    /// Smallest n where the quantum cost drops below the classical bound.
    #[arg(long)]
    breakeven: bool,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Code family parameter (>= 2).
    #[arg(long, default_value_t = 2.0)]
    mu: f64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct FeasibilityArgs {
    /// Alice-Bob separation (km, m).
    #[arg(long = "L", default_value = "10km")]
    separation: String,
    /// Pulse period (ns, us, ms, s).
    #[arg(long, default_value = "1ns")]
    period: String,
    #[arg(long, default_value_t = qfp_core::physical::FIBER_INDEX)]
    index: f64,
    /// Mean photon number of the attenuated source.
    #[arg(long, default_value_t = 0.1)]
    mu_photon: f64,
    /// Ideal single-photon source instead of a Poisson one.
    #[arg(long)]
    single_photon: bool,
    /// one_way, half_way or round_trip.
    #[arg(long, default_value = "one_way", value_parser = parse_window)]
    window: TimingWindow,
    #[arg(long, default_value_t = 1.0)]
    transmission: f64,
    #[arg(long, default_value_t = 1.0)]
    efficiency: f64,
    /// Dark count probability per detector per slot.
    #[arg(long, default_value_t = 0.0)]
    dark: f64,
    /// Slots watched per detector per run.
    #[arg(long, default_value_t = 1)]
    slots: u64,
    /// Single-run NotEqual probability of the simulated input pair.
    #[arg(long, default_value_t = 0.5)]
    pn: f64,
    #[arg(long, default_value_t = 10)]
    k: u64,
    /// Parameter to sweep: dark_count_prob, transmission, detector_efficiency, mean_photon_number.
    #[arg(long)]
    sweep: Option<SweepParameter>,
    /// Comma-separated values for --sweep.
    #[arg(long)]
    values: Option<String>,
    /// Shorthand for --sweep dark_count_prob --values LIST.
    #[arg(long)]
    sweep_dark: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ExportArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Destination file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct FileArgs {
    /// Code file in the plain-text format.
    #[arg(long)]
    file: PathBuf,
    #[command(flatten)]
    out: Outputs,
}

fn parse_window(s: &str) -> Result<TimingWindow, String> {
    match s {
        "one_way" | "one-way" => Ok(TimingWindow::OneWay),
        "half_way" | "half-way" => Ok(TimingWindow::HalfWay),
        "round_trip" | "round-trip" => Ok(TimingWindow::RoundTrip),
        other => Err(format!("unknown window '{other}' (one_way, half_way, round_trip)")),
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Resource(String),
    Core(qfp_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Resource(_) => 2,
            CliError::Core(e) if e.is_resource_limit() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Resource(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<qfp_core::Error> for CliError {
    fn from(e: qfp_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// What a command produced; `emit` routes it to stdout and files.
#[derive(Default)]
struct Artifacts {
    csv: Option<String>,
    json: Option<String>,
    /// Human-readable report, always printed.
    text: Option<String>,
    /// Printed when no output file was requested and there is no text report.
    stdout_csv: bool,
    master_seed: Option<u64>,
}

fn emit(out: &Outputs, a: Artifacts) -> CliResult<()> {
    if let Some(path) = &out.csv {
        let csv = a
            .csv
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command produces no CSV table".into()))?;
        output::write_atomic(path, csv)?;
        eprintln!("wrote {}", path.display());
    }
    if let Some(path) = &out.json {
        output::write_atomic(path, a.json.as_ref().expect("every command builds JSON"))?;
        eprintln!("wrote {}", path.display());
    }
    if let Some(seed) = a.master_seed {
        eprintln!("master_seed = {seed}");
    }
    if let Some(text) = a.text {
        print!("{text}");
    } else if out.csv.is_none() && out.json.is_none() {
        let primary = if a.stdout_csv { a.csv } else { a.json };
        print!("{}", primary.unwrap_or_default());
    }
    Ok(())
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn build_code(a: &CodeArgs) -> CliResult<Code> {
    if let Some(path) = &a.code_file {
        return Ok(Code::from_text(&read_file(path)?)?);
    }
    let n = a
        .n
        .ok_or_else(|| CliError::Usage("--n is required unless --code-file is given".into()))?;
    Ok(match a.code {
        CodeKind::Identity => Code::identity(n)?,
        CodeKind::Repetition => repetition_code(n, a.r)?,
        CodeKind::Hadamard => hadamard_code(n)?,
        CodeKind::RandomLinear => {
            let m = a
                .m
                .ok_or_else(|| CliError::Usage("--m is required for --code random".into()))?;
            random_linear_code(n, m, a.code_seed)?
        }
    })
}

fn parse_input(s: &str, n: usize) -> CliResult<BitString> {
    let b = match s.strip_prefix("0x") {
        Some(hex) => BitString::from_hex(hex, n)?,
        None => s.parse::<BitString>()?,
    };
    if b.len() != n {
        return Err(CliError::Usage(format!("input '{s}' has {} bits, the code expects {n}", b.len())));
    }
    Ok(b)
}

fn check_rows(rows: Option<u64>) -> CliResult<u64> {
    match rows {
        Some(r) if r <= MAX_ROWS => Ok(r),
        _ => Err(CliError::Resource(format!("request exceeds the limit of {MAX_ROWS} output rows"))),
    }
}

#[derive(Serialize)]
struct CodeSummary {
    n: usize,
    m: usize,
    t: usize,
    kind: &'static str,
    relative_distance: f64,
}

impl CodeSummary {
    fn of(code: &Code) -> Self {
        CodeSummary {
            n: code.n(),
            m: code.m(),
            t: code.t(),
            kind: code.kind().name(),
            relative_distance: code.relative_distance(),
        }
    }
}

#[derive(Serialize)]
struct PairSummary {
    x_hex: String,
    y_hex: String,
    pn_exact: f64,
    trials: u64,
    not_equal: u64,
    frequency: f64,
    expected: f64,
}

#[derive(Serialize)]
struct RunReport {
    master_seed: u64,
    epsilon: f64,
    k: u64,
    code: CodeSummary,
    exact: bool,
    rows: Vec<BatchRow>,
    pairs: Vec<PairSummary>,
}

#[derive(Serialize)]
struct PhaseRow {
    q: u64,
    x: u64,
    y: u64,
    p_n: f64,
    error_probability: f64,
    average_error: f64,
    average_error_exact: String,
}

#[derive(Serialize)]
struct PhaseReport {
    master_seed: u64,
    q: u64,
    average_error: f64,
    average_error_exact: String,
    rows: Vec<PhaseRow>,
}

fn cmd_run(a: &RunArgs) -> CliResult<Artifacts> {
    if a.phase_protocol {
        return cmd_phase(a);
    }
    let code = build_code(&a.code)?;
    let n = code.n();
    let params = match a.k {
        Some(k) => ProtocolParams::new(code.clone(), k, a.epsilon)?,
        None => ProtocolParams::for_target_error(code.clone(), a.epsilon)?,
    };
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let per_pair = if a.exact { 1 } else { a.trials };

    let pairs: Vec<(BitString, BitString)> = if a.all_pairs {
        if n > 31 {
            return Err(CliError::Resource(format!("--all-pairs with n = {n} is too large")));
        }
        let count = 1u64 << n;
        check_rows(count.checked_mul(count).and_then(|c| c.checked_mul(per_pair)))?;
        let words: Vec<BitString> = (0..count).map(|v| BitString::from_u64(v, n)).collect::<Result<_, _>>()?;
        words
            .iter()
            .flat_map(|x| words.iter().map(move |y| (x.clone(), y.clone())))
            .collect()
    } else if let Some(count) = a.random_pairs {
        check_rows(count.checked_mul(per_pair))?;
        let mut rng = rng_from_seed(a.seed);
        let mut random = || {
            let bits: Vec<bool> = (0..n).map(|_| rand::Rng::random(&mut rng)).collect();
            BitString::from_bits(&bits)
        };
        (0..count).map(|_| Ok((random()?, random()?))).collect::<CliResult<_>>()?
    } else {
        let (x, y) = match (&a.x, &a.y) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(CliError::Usage("give --x and --y, --all-pairs or --random-pairs".into())),
        };
        check_rows(Some(per_pair))?;
        vec![(parse_input(x, n)?, parse_input(y, n)?)]
    };

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut index = 0u64;
    for (x, y) in &pairs {
        if a.exact {
            let row = BatchRow::exact(&params, x, y)?;
            summaries.push(PairSummary {
                x_hex: row.x_hex.clone(),
                y_hex: row.y_hex.clone(),
                pn_exact: row.pn_exact,
                trials: 0,
                not_equal: 0,
                frequency: 0.0,
                expected: 1.0 - (1.0 - row.pn_exact).powf(params.k() as f64),
            });
            rows.push(row);
            continue;
        }
        let mut not_equal = 0;
        let mut pn = 0.0;
        for _ in 0..a.trials {
            let result = run_sampled(&params, x, y, derive_seed(a.seed, index))?;
            index += 1;
            pn = result.pn_exact;
            not_equal += u64::from(result.verdict == Verdict::NotEqual);
            rows.push(BatchRow::sampled(&params, x, y, &result));
        }
        summaries.push(PairSummary {
            x_hex: x.to_hex(),
            y_hex: y.to_hex(),
            pn_exact: pn,
            trials: a.trials,
            not_equal,
            frequency: not_equal as f64 / a.trials as f64,
            expected: 1.0 - (1.0 - pn).powf(params.k() as f64),
        });
    }
    let report = RunReport {
        master_seed: a.seed,
        epsilon: params.epsilon(),
        k: params.k(),
        code: CodeSummary::of(&code),
        exact: a.exact,
        rows,
        pairs: summaries,
    };
    Ok(Artifacts {
        csv: Some(csv_string(&report.rows)?),
        json: Some(json_string(&report)?),
        text: None,
        stdout_csv: true,
        master_seed: Some(a.seed),
    })
}

fn cmd_phase(a: &RunArgs) -> CliResult<Artifacts> {
    let q = a.q;
    let parse = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| CliError::Usage(format!("phase protocol inputs are integers in 0..q, got '{s}'")))
    };
    let pairs: Vec<(u64, u64)> = match (&a.x, &a.y) {
        (Some(x), Some(y)) if !a.all_pairs => vec![(parse(x)?, parse(y)?)],
        _ => {
            check_rows(q.checked_mul(q))?;
            (0..q).flat_map(|x| (0..q).map(move |y| (x, y))).collect()
        }
    };
    let average_error = phase_protocol_average_error::<f64>(q)?;
    let average_error_exact = phase_protocol_average_error_exact(q)?
        .map(|r| r.to_string())
        .unwrap_or_default();
    let rows = pairs
        .into_iter()
        .map(|(x, y)| {
            let p_n = phase_protocol_pn::<f64>(q, x, y)?;
            Ok(PhaseRow {
                q,
                x,
                y,
                p_n,
                error_probability: if x == y { p_n } else { 1.0 - p_n },
                average_error,
                average_error_exact: average_error_exact.clone(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let report = PhaseReport {
        master_seed: a.seed,
        q,
        average_error,
        average_error_exact,
        rows,
    };
    Ok(Artifacts {
        csv: Some(csv_string(&report.rows)?),
        json: Some(json_string(&report)?),
        text: None,
        stdout_csv: true,
        master_seed: Some(a.seed),
    })
}

#[derive(Serialize)]
struct SmpReport {
    q: u64,
    alice: u64,
    bob: u64,
    method: &'static str,
    min_avg_error: String,
    error_pairs: u64,
    witness: SmpStrategy,
    quantum_average_error: f64,
    quantum_average_error_exact: String,
}

#[derive(Serialize)]
struct BoundsReport {
    #[serde(flatten)]
    bounds: BoundReport,
    epsilon: f64,
    mu: f64,
    quantum_cost: QuantumCost,
}

#[derive(Serialize, Default)]
struct ClassicalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    smp: Option<SmpReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<BoundsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakeven: Option<Breakeven>,
}

fn cmd_classical(a: &ClassicalArgs) -> CliResult<Artifacts> {
    let mut report = ClassicalReport::default();
    let mut text = String::new();
    if a.bounds {
        let n = a
            .n
            .ok_or_else(|| CliError::Usage("--bounds needs --n".into()))?;
        let b = bound_report(n, a.epsilon, a.mu)?;
        let k = breakeven_n(a.epsilon, a.mu)?.k;
        let qc = quantum_cost_for_input_length(n, k)?;
        text += &format!(
            "n = {n}\nab_lower = {}\nmax_lower = {}\nshared_bit_lower = {}\nquantum_cost_per_party = {}\nk = {k}\nqubits_per_party_per_run = {}\nbreakeven = {}\n",
            b.ab_lower, b.max_lower, b.shared_bit_lower, b.quantum_cost_per_party, qc.per_party_per_run, b.breakeven
        );
        report.bounds = Some(BoundsReport {
            bounds: b,
            epsilon: a.epsilon,
            mu: a.mu,
            quantum_cost: qc,
        });
    }
    if a.breakeven {
        let b = breakeven_n(a.epsilon, a.mu)?;
        let below = b.n - 1;
        text += &format!(
            "epsilon = {}\nmu = {}\nnu = {}\nk = {}\nbreakeven_n = {}\nat n = {}: k(1 + log2 n) = {} <= sqrt(n)/40 = {}\nat n = {below}: k(1 + log2 n) = {} > sqrt(n)/40 = {}\n",
            b.epsilon,
            b.mu,
            b.nu,
            b.k,
            b.n,
            b.n,
            b.quantum_cost,
            b.classical_bound,
            b.quantum_cost_below,
            b.classical_bound_below
        );
        report.breakeven = Some(b);
    }
    if !a.bounds && !a.breakeven {
        let (opt, method) = if a.full {
            (brute_force_smp_full(a.q, a.alice, a.bob)?, "full_enumeration")
        } else {
            (brute_force_smp(a.q, a.alice, a.bob)?, "cellwise_referee")
        };
        let quantum = phase_protocol_average_error::<f64>(a.q)?;
        let quantum_exact = phase_protocol_average_error_exact(a.q)?
            .map(|r| r.to_string())
            .unwrap_or_default();
        text += &format!(
            "q = {}, alice = {}, bob = {}\nmin_avg_error = {}\nerror_pairs = {} of {}\nquantum_average_error = {}\n{}",
            a.q,
            a.alice,
            a.bob,
            opt.min_avg_error,
            opt.error_pairs,
            a.q * a.q,
            if quantum_exact.is_empty() { quantum.to_string() } else { quantum_exact.clone() },
            opt.witness
        );
        report.smp = Some(SmpReport {
            q: a.q,
            alice: a.alice,
            bob: a.bob,
            method,
            min_avg_error: opt.min_avg_error.to_string(),
            error_pairs: opt.error_pairs,
            witness: opt.witness,
            quantum_average_error: quantum,
            quantum_average_error_exact: quantum_exact,
        });
    }
    Ok(Artifacts {
        json: Some(json_string(&report)?),
        text: Some(text),
        ..Default::default()
    })
}

#[derive(Serialize)]
struct FeasibilityOutput {
    master_seed: u64,
    #[serde(flatten)]
    report: FeasibilityReport,
    pn: f64,
    k: u64,
    expected_noise: ExpectedNoiseRates,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sweep: Vec<SweepRow>,
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse sweep value '{}'", v.trim())))
        })
        .collect()
}

fn cmd_feasibility(a: &FeasibilityArgs) -> CliResult<Artifacts> {
    let model = ImperfectionModel {
        source: if a.single_photon {
            PhotonSource::SinglePhoton
        } else {
            PhotonSource::Poisson { mean_photon_number: a.mu_photon }
        },
        transmission: a.transmission,
        detector_efficiency: a.efficiency,
        dark_count_prob: a.dark,
        pulse_period: output::parse_duration(&a.period).map_err(CliError::Usage)?,
        separation: output::parse_length(&a.separation).map_err(CliError::Usage)?,
        refractive_index: a.index,
        window: a.window,
        slots: a.slots,
    };
    let report = feasibility_report(&model)?;
    let expected_noise = expected_noise_rates(&model, a.pn, a.k)?;
    let sweep_spec = match (&a.sweep_dark, a.sweep, &a.values) {
        (Some(list), None, None) => Some((SweepParameter::DarkCountProb, parse_list(list)?)),
        (None, Some(p), Some(list)) => Some((p, parse_list(list)?)),
        (None, None, None) => None,
        _ => {
            return Err(CliError::Usage(
                "use either --sweep-dark LIST or --sweep PARAM --values LIST".into(),
            ))
        }
    };
    let sweep = match sweep_spec {
        Some((param, values)) => noise_sweep(&model, param, &values, a.pn, a.k, a.trials, a.seed)?,
        None => Vec::new(),
    };
    let csv = if sweep.is_empty() { None } else { Some(csv_string(&sweep)?) };
    let out = FeasibilityOutput {
        master_seed: a.seed,
        report,
        pn: a.pn,
        k: a.k,
        expected_noise,
        sweep,
    };
    Ok(Artifacts {
        csv,
        json: Some(json_string(&out)?),
        text: None,
        stdout_csv: false,
        master_seed: Some(a.seed),
    })
}

fn cmd_export(a: &ExportArgs) -> CliResult<()> {
    let code = build_code(&a.code)?;
    let text = code.to_text();
    match &a.out {
        Some(path) => {
            output::write_atomic(path, &text)?;
            eprintln!("wrote {} (n = {}, m = {}, t = {})", path.display(), code.n(), code.m(), code.t());
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(flatten)]
    code: CodeSummary,
    recomputed_t: Option<usize>,
    matches: Option<bool>,
}

fn cmd_codes_file(a: &FileArgs, verify: bool) -> CliResult<()> {
    let code = Code::from_text(&read_file(&a.file)?)?;
    let summary = CodeSummary::of(&code);
    let mut text = format!(
        "n = {}\nm = {}\nt = {}\nkind = {}\nrelative_distance = {}\n",
        summary.n, summary.m, summary.t, summary.kind, summary.relative_distance
    );
    let mut report = VerifyReport {
        code: summary,
        recomputed_t: None,
        matches: None,
    };
    if verify {
        let t = min_distance_bruteforce(&code)?;
        text += &format!("recomputed_t = {t}\nmatches = {}\n", t == code.t());
        report.recomputed_t = Some(t);
        report.matches = Some(t == code.t());
    }
    emit(
        &a.out,
        Artifacts {
            json: Some(json_string(&report)?),
            text: Some(text),
            ..Default::default()
        },
    )?;
    if report.matches == Some(false) {
        return Err(CliError::Usage(format!(
            "{}: recorded distance {} but minimum distance is {}",
            a.file.display(),
            code.t(),
            report.recomputed_t.unwrap()
        )));
    }
    Ok(())
}

const SECTIONS: &[&str] = &[
    "run",
    "classical",
    "feasibility",
    "codes.export",
    "codes.import",
    "codes.verify",
];

fn config_path(cli: &Cli) -> (Option<&Path>, Vec<&'static str>) {
    match &cli.command {
        Cmd::Run(a) => (a.out.config.as_deref(), vec!["run"]),
        Cmd::Classical(a) => (a.out.config.as_deref(), vec!["classical"]),
        Cmd::Feasibility(a) => (a.out.config.as_deref(), vec!["feasibility"]),
        Cmd::Codes { action } => match action {
            CodesCmd::Export(a) => (a.config.as_deref(), vec!["codes", "export"]),
            CodesCmd::Import(a) => (a.out.config.as_deref(), vec!["codes", "import"]),
            CodesCmd::Verify(a) => (a.out.config.as_deref(), vec!["codes", "verify"]),
        },
    }
}

/// Parses the command line, folding in `--config` when present.
fn parse_cli(argv: Vec<String>) -> Result<Cli, CliError> {
    let cli = Cli::try_parse_from(&argv).unwrap_or_else(|e| clap_exit(e));
    let (path, sub_path) = config_path(&cli);
    let Some(path) = path else {
        return Ok(cli);
    };
    let text = read_file(path)?;
    let located = |e: config::ConfigError| CliError::Usage(format!("{}:{}: {}", path.display(), e.line, e.message));
    let sections = config::parse(&text, SECTIONS).map_err(located)?;
    let section = sub_path.join(".");
    let Some(entries) = sections.get(&section) else {
        return Ok(cli);
    };
    let mut cmd = Cli::command();
    cmd.build();
    let mut leaf = &cmd;
    for name in &sub_path {
        leaf = leaf.find_subcommand(name).expect("subcommand exists");
    }
    let extra = config::to_args(entries, &section, leaf).map_err(located)?;
    let split = 1 + sub_path.len();
    let mut merged: Vec<String> = argv[..split].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[split..]);
    Ok(Cli::try_parse_from(&merged).unwrap_or_else(|e| clap_exit(e)))
}

/// Help and version requests exit 0, every other clap error exits 1.
fn clap_exit(e: clap::Error) -> ! {
    use clap::error::ErrorKind;
    let _ = e.print();
    let code = match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
        _ => 1,
    };
    std::process::exit(code)
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Cmd::Run(a) => emit(&a.out, cmd_run(a)?),
        Cmd::Classical(a) => emit(&a.out, cmd_classical(a)?),
        Cmd::Feasibility(a) => emit(&a.out, cmd_feasibility(a)?),
        Cmd::Codes { action } => match action {
            CodesCmd::Export(a) => cmd_export(a),
            CodesCmd::Import(a) => cmd_codes_file(a, false),
            CodesCmd::Verify(a) => cmd_codes_file(a, true),
        },
    }
}

fn main() -> ExitCode {
    let result = parse_cli(std::env::args().collect()).and_then(|cli| dispatch(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
