//! `gess`: command-line front end for generalized enumerative sphere shaping.

mod formats;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gess_core::analysis::{rate_comparison, sweep_factor, CodebookReport, SweepConfig, SweepRow};
use gess_core::ccdm::CcdmMatcher;
use gess_core::channel_capacity::{capacity_sweep, CapacityResult, PpcChannel};
use gess_core::distributions::{entropy_tune, find_lambda_for_entropy, maxwell_boltzmann};
use gess_core::{
    CodebookSize, Composition, EssMatcher, LogBase, Rounding, TargetDistribution, Trellis,
    WeightLevelSet, WeightQuantizer, WeightedAlphabet,
};
use serde::Serialize;

use formats::PayloadFormat;

#[derive(Parser)]
#[command(name = "gess", version, about = "Generalized enumerative sphere shaping toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantize a distribution's self-information into an integer-weight alphabet.
    QuantizeWeights {
        /// Distribution JSON: {"amplitudes": [...], "probs": [...]}
        #[arg(long)]
        dist: PathBuf,
        /// Weight scaling factor.
        #[arg(long)]
        f: f64,
        #[arg(long, value_enum, default_value_t = BaseArg::Natural)]
        log_base: BaseArg,
        #[arg(long, value_enum, default_value_t = RoundingArg::Absolute)]
        rounding: RoundingArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the reachable weight levels up to l_max.
    Levels {
        #[arg(long)]
        alphabet: PathBuf,
        #[arg(long)]
        l_max: u64,
    },
    /// Build a trellis and write it to a binary cache.
    BuildTrellis {
        #[arg(long)]
        alphabet: PathBuf,
        #[arg(long)]
        n: usize,
        /// Pick the smallest l_max that carries this many bits.
        #[arg(long, conflicts_with = "l_max", required_unless_present = "l_max")]
        k_bits: Option<u64>,
        #[arg(long)]
        l_max: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Map payload blocks to amplitude sequences.
    Shape {
        #[command(flatten)]
        trellis: TrellisArgs,
        #[command(flatten)]
        io: IoArgs,
        /// Remap every output amplitude a to M - a.
        #[arg(long, value_name = "M")]
        reverse: Option<u32>,
    },
    /// Map amplitude sequences back to payload blocks.
    Deshape {
        #[command(flatten)]
        trellis: TrellisArgs,
        #[command(flatten)]
        io: IoArgs,
        /// Undo a `shape --reverse M` remap before decoding.
        #[arg(long, value_name = "M")]
        reverse: Option<u32>,
    },
    /// Constant-composition distribution matching.
    Ccdm {
        #[command(subcommand)]
        command: CcdmCommand,
    },
    /// Exact code-book statistics as JSON.
    Analyze {
        #[command(flatten)]
        trellis: TrellisArgs,
        /// Target distribution the code book is compared against.
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum, default_value_t = CodebookArg::Payload)]
        codebook: CodebookArg,
    },
    /// Average energy and rate loss over a grid of weight scaling factors.
    SweepF {
        /// Target distribution; Maxwell-Boltzmann on 1, 3, 5, 7 when absent.
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1, conflicts_with = "dist")]
        mb_lambda: f64,
        #[arg(long, default_value_t = 224)]
        n: usize,
        #[arg(long, default_value_t = 336)]
        k_bits: u64,
        #[arg(long, default_value_t = 0.1)]
        f_start: f64,
        #[arg(long, default_value_t = 6.1)]
        f_stop: f64,
        #[arg(long, default_value_t = 0.1)]
        f_step: f64,
        /// Explicit factors; overrides the grid.
        #[arg(long, value_delimiter = ',')]
        f: Vec<f64>,
        #[arg(long, value_enum, default_value_t = BaseArg::Binary)]
        log_base: BaseArg,
        #[arg(long, value_enum, default_value_t = RoundingArg::RelativeToMode)]
        rounding: RoundingArg,
        #[arg(long, value_enum, default_value_t = CodebookArg::Max)]
        codebook: CodebookArg,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Capacity-achieving amplitude distribution of the peak-power-limited AWGN channel.
    OptimizeDistribution {
        #[arg(long)]
        psnr_db: f64,
        #[arg(long = "M", visible_alias = "m", default_value_t = 8)]
        m: u32,
        #[arg(long, default_value_t = gess_core::channel_capacity::DEFAULT_BINS)]
        bins: usize,
        #[arg(long, default_value_t = gess_core::channel_capacity::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = gess_core::channel_capacity::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Entropy-tune the optimized distribution to this many bits.
        #[arg(long)]
        entropy: Option<f64>,
        /// Full optimizer result as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// PSNR values (dB) for a capacity sweep written to --sweep-csv.
        #[arg(long, value_delimiter = ',', requires = "sweep_csv")]
        sweep_db: Vec<f64>,
        #[arg(long)]
        sweep_csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CcdmCommand {
    /// Composition and payload size; with --alphabet also the ESS comparison.
    Rate {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alphabet: Option<PathBuf>,
    },
    Encode {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        io: IoArgs,
    },
    Decode {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        io: IoArgs,
    },
}

/// Where the trellis comes from: a cache, or an alphabet plus sizes.
#[derive(Args)]
struct TrellisArgs {
    #[arg(long, conflicts_with_all = ["alphabet", "n", "l_max"])]
    cache: Option<PathBuf>,
    #[arg(long, required_unless_present = "cache", requires = "n")]
    alphabet: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Payload bits per block; defaults to everything the trellis carries.
    #[arg(long, conflicts_with = "l_max")]
    k_bits: Option<u64>,
    #[arg(long)]
    l_max: Option<u64>,
}

#[derive(Args)]
struct IoArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PayloadFormat::Raw)]
    payload_format: PayloadFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Natural,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    Absolute,
    RelativeToMode,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodebookArg {
    /// 2^k for the payload size k.
    Payload,
    /// The largest power of two not above T_0^0.
    Max,
    /// All T_0^0 sequences.
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

fn quantizer(base: BaseArg, rounding: RoundingArg) -> WeightQuantizer {
    WeightQuantizer::new(
        match base {
            BaseArg::Natural => LogBase::Natural,
            BaseArg::Binary => LogBase::Binary,
        },
        match rounding {
            RoundingArg::Absolute => Rounding::Absolute,
            RoundingArg::RelativeToMode => Rounding::RelativeToMode,
        },
    )
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Core(gess_core::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        use gess_core::ErrorKind;
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Core(e) => match e.kind() {
                ErrorKind::InvalidInput | ErrorKind::Io => 3,
                ErrorKind::Infeasible => 4,
                ErrorKind::NotConverged => 5,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Input(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

impl From<gess_core::Error> for Failure {
    fn from(e: gess_core::Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let data = read_file(path)?;
    serde_json::from_slice(&data).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, data: &[u8]) -> CliResult {
    match out {
        Some(path) => fs::write(path, data).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(data)
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).map_err(gess_core::Error::from)?;
    text.push('\n');
    emit(out, text.as_bytes())
}

fn load_trellis(args: &TrellisArgs) -> CliResult<EssMatcher> {
    let trellis = if let Some(cache) = &args.cache {
        let file = fs::File::open(cache).map_err(|e| Failure::Input(format!("{}: {e}", cache.display())))?;
        Trellis::read_from(io::BufReader::new(file))?
    } else {
        let path = args.alphabet.as_ref().expect("clap requires --alphabet without --cache");
        let alphabet: WeightedAlphabet = read_json(path)?;
        let n = args.n.expect("clap requires --n with --alphabet");
        match (args.l_max, args.k_bits) {
            (Some(l_max), _) => Trellis::build(&alphabet, n, l_max)?,
            (None, Some(k)) => return Ok(EssMatcher::for_rate(&alphabet, n, k)?),
            (None, None) => return Err(Failure::Usage("give --k-bits or --l-max".into())),
        }
    };
    let k = args.k_bits.unwrap_or(trellis.max_bits());
    Ok(EssMatcher::new(trellis, k)?)
}

fn factor_grid(start: f64, stop: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(start > 0.0 && step > 0.0 && stop >= start) {
        return Err(Failure::Usage("the f grid needs 0 < f-start <= f-stop and f-step > 0".into()));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // round away accumulated binary error so 0.1 + 29 * 0.1 prints as 3
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("f,l_max,trellis_bits,codebook_bits,avg_energy,rate_loss,divergence,weights\n");
    for r in rows {
        let weights: Vec<String> = r.weights.iter().map(u64::to_string).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.f,
            r.l_max,
            r.trellis_bits,
            r.codebook_bits,
            r.avg_energy,
            r.rate_loss,
            r.divergence,
            weights.join(";")
        ));
    }
    out
}

fn capacity_csv(results: &[CapacityResult]) -> String {
    let Some(first) = results.first() else {
        return String::new();
    };
    let mut out = String::from("psnr_db,capacity_bits,kkt_residual,iterations,converged");
    for a in first.amplitude_dist.amplitudes() {
        out.push_str(&format!(",p{a}"));
    }
    out.push('\n');
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{}",
            r.psnr_db, r.capacity_bits, r.kkt_residual, r.iterations, r.converged
        ));
        for &a in first.amplitude_dist.amplitudes() {
            out.push_str(&format!(",{}", r.amplitude_dist.prob_of(a).unwrap_or(0.0)));
        }
        out.push('\n');
    }
    out
}

fn not_converged(r: &CapacityResult) -> Failure {
    Failure::Core(gess_core::Error::NotConverged {
        iterations: r.iterations,
        gap: r.kkt_residual,
    })
}

#[derive(Serialize)]
struct TrellisSummary {
    n: usize,
    l_max: u64,
    levels: usize,
    nodes: usize,
    total: String,
    max_bits: u64,
}

#[derive(Serialize)]
struct LevelsSummary<'a> {
    l_max: u64,
    levels: &'a [u64],
    lut_storage_bits: u64,
}

#[derive(Serialize)]
struct CcdmRate {
    composition: Vec<u64>,
    multinomial: String,
    ccdm_bits: u64,
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::QuantizeWeights { dist, f, log_base, rounding, out } => {
            let dist: TargetDistribution = read_json(&dist)?;
            let alphabet = quantizer(log_base, rounding).quantize(&dist, f)?;
            emit_json(out.as_deref(), &alphabet)
        }
        Command::Levels { alphabet, l_max } => {
            let alphabet: WeightedAlphabet = read_json(&alphabet)?;
            let set = WeightLevelSet::compute(&alphabet, l_max);
            emit_json(
                None,
                &LevelsSummary {
                    l_max,
                    levels: set.levels(),
                    lut_storage_bits: set.lut_storage_bits(),
                },
            )
        }
        Command::BuildTrellis { alphabet, n, k_bits, l_max, out } => {
            let alphabet: WeightedAlphabet = read_json(&alphabet)?;
            let trellis = match (l_max, k_bits) {
                (Some(l), _) => Trellis::build(&alphabet, n, l)?,
                (None, Some(k)) => gess_core::select_l_max(&alphabet, n, k)?.1,
                (None, None) => unreachable!("clap requires --k-bits or --l-max"),
            };
            let file = fs::File::create(&out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
            trellis.write_to(io::BufWriter::new(file))?;
            emit_json(
                None,
                &TrellisSummary {
                    n,
                    l_max: trellis.l_max(),
                    levels: trellis.levels().len(),
                    nodes: trellis.node_count(),
                    total: trellis.total().to_string(),
                    max_bits: trellis.max_bits(),
                },
            )
        }
        Command::Shape { trellis, io, reverse } => {
            let matcher = load_trellis(&trellis)?;
            let data = read_file(&io.input)?;
            let blocks = formats::read_payload(&data, io.payload_format, matcher.k_bits()).map_err(Failure::Input)?;
            let seqs = blocks
                .iter()
                .map(|b| {
                    let amps = matcher.encode_bytes(b)?;
                    match reverse {
                        Some(m) => gess_core::codec::amplitude_remap_reverse(&amps, m),
                        None => Ok(amps),
                    }
                })
                .collect::<gess_core::Result<Vec<_>>>()?;
            emit(io.output.as_deref(), formats::write_sequences(&seqs).as_bytes())
        }
        Command::Deshape { trellis, io, reverse } => {
            let matcher = load_trellis(&trellis)?;
            let text = String::from_utf8(read_file(&io.input)?)
                .map_err(|_| Failure::Input("sequence file is not UTF-8".into()))?;
            let seqs = formats::read_sequences(&text).map_err(Failure::Input)?;
            let blocks = seqs
                .iter()
                .map(|s| match reverse {
                    Some(m) => matcher.decode_bytes(&gess_core::codec::amplitude_remap_reverse(s, m)?),
                    None => matcher.decode_bytes(s),
                })
                .collect::<gess_core::Result<Vec<_>>>()?;
            emit(
                io.output.as_deref(),
                &formats::write_payload(&blocks, io.payload_format, matcher.k_bits()),
            )
        }
        Command::Ccdm { command } => run_ccdm(command),
        Command::Analyze { trellis, dist, codebook } => {
            let matcher = load_trellis(&trellis)?;
            let dist: TargetDistribution = read_json(&dist)?;
            let size = match codebook {
                CodebookArg::Payload => CodebookSize::Payload(matcher.k_bits()),
                CodebookArg::Max => CodebookSize::LargestPowerOfTwo,
                CodebookArg::Full => CodebookSize::Full,
            };
            emit_json(None, &CodebookReport::new(matcher.trellis(), &size, &dist)?)
        }
        Command::SweepF {
            dist,
            mb_lambda,
            n,
            k_bits,
            f_start,
            f_stop,
            f_step,
            f,
            log_base,
            rounding,
            codebook,
            format,
            out,
        } => {
            let target = match dist {
                Some(path) => read_json(&path)?,
                None => maxwell_boltzmann(&[1, 3, 5, 7], mb_lambda)?,
            };
            let factors = if f.is_empty() {
                factor_grid(f_start, f_stop, f_step)?
            } else {
                f
            };
            let config = SweepConfig {
                target,
                len: n,
                k_bits,
                quantizer: quantizer(log_base, rounding),
                codebook: match codebook {
                    CodebookArg::Payload => CodebookSize::Payload(k_bits),
                    CodebookArg::Max => CodebookSize::LargestPowerOfTwo,
                    CodebookArg::Full => CodebookSize::Full,
                },
            };
            let rows = sweep_factor(&config, &factors)?;
            match format {
                TableFormat::Csv => emit(out.as_deref(), sweep_csv(&rows).as_bytes()),
                TableFormat::Json => emit_json(out.as_deref(), &rows),
            }
        }
        Command::OptimizeDistribution {
            psnr_db,
            m,
            bins,
            tol,
            max_iter,
            entropy,
            report,
            sweep_db,
            sweep_csv,
            out,
        } => {
            let result = PpcChannel::with_bins(m, psnr_db, bins)?.optimize(tol, max_iter)?;
            if let Some(path) = &report {
                emit_json(Some(path), &result)?;
            }
            if let Some(path) = &sweep_csv {
                let results = capacity_sweep(m, &sweep_db, tol, max_iter)?;
                emit(Some(path), capacity_csv(&results).as_bytes())?;
                if let Some(bad) = results.iter().find(|r| !r.converged) {
                    return Err(not_converged(bad));
                }
            }
            if !result.converged {
                return Err(not_converged(&result));
            }
            let dist = match entropy {
                Some(h) => {
                    let lambda = find_lambda_for_entropy(&result.amplitude_dist, h)?;
                    entropy_tune(&result.amplitude_dist, lambda)?
                }
                None => result.amplitude_dist,
            };
            emit_json(out.as_deref(), &dist)
        }
    }
}

fn run_ccdm(command: CcdmCommand) -> CliResult {
    match command {
        CcdmCommand::Rate { dist, n, alphabet } => {
            let dist: TargetDistribution = read_json(&dist)?;
            match alphabet {
                Some(path) => {
                    let alphabet: WeightedAlphabet = read_json(&path)?;
                    emit_json(None, &rate_comparison(&dist, &alphabet, n)?)
                }
                None => {
                    let c = Composition::from_distribution(&dist, n)?;
                    emit_json(
                        None,
                        &CcdmRate {
                            composition: c.counts().to_vec(),
                            multinomial: c.multinomial().to_string(),
                            ccdm_bits: c.rate_bits(),
                        },
                    )
                }
            }
        }
        CcdmCommand::Encode { dist, n, io } => {
            let dist: TargetDistribution = read_json(&dist)?;
            let matcher = CcdmMatcher::for_distribution(&dist, n)?;
            let data = read_file(&io.input)?;
            let blocks = formats::read_payload(&data, io.payload_format, matcher.k_bits()).map_err(Failure::Input)?;
            let seqs = blocks
                .iter()
                .map(|b| matcher.encode_bytes(b))
                .collect::<gess_core::Result<Vec<_>>>()?;
            emit(io.output.as_deref(), formats::write_sequences(&seqs).as_bytes())
        }
        CcdmCommand::Decode { dist, n, io } => {
            let dist: TargetDistribution = read_json(&dist)?;
            let matcher = CcdmMatcher::for_distribution(&dist, n)?;
            let text = String::from_utf8(read_file(&io.input)?)
                .map_err(|_| Failure::Input("sequence file is not UTF-8".into()))?;
            let seqs = formats::read_sequences(&text).map_err(Failure::Input)?;
            let blocks = seqs
                .iter()
                .map(|s| matcher.decode_bytes(s))
                .collect::<gess_core::Result<Vec<_>>>()?;
            emit(
                io.output.as_deref(),
                &formats::write_payload(&blocks, io.payload_format, matcher.k_bits()),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let message = failure.message().replace('\n', " ");
            eprintln!("gess: error: {message}");
            ExitCode::from(failure.code())
        }
    }
}
