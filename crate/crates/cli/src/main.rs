mod config;
mod error;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permwhite_core::stats::{self, compare_reports, Verdict};
use permwhite_core::{
    baseline, report, MatrixPool, SelectionTrace, ShuffleMode, SourceSpec, WhitenConfig,
    DEFAULT_MAX_QUBITS,
};

use config::{resolve, ConfigFile};
use error::CliError;

const DEFAULT_POOL: &str = "pool.pwpl";
const ENV_POOL: &str = "PERMWHITE_POOL";
const ENV_WORKERS: &str = "PERMWHITE_WORKERS";

/// Permutation-matrix whitening for raw random-number files.
#[derive(Parser, Debug)]
#[command(name = "permwhite", version)]
struct Cli {
    /// Flat key = value file supplying defaults for generation and source flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a pool of permutations and write it to a pool file.
    GenPool {
        /// Output pool file [default: $PERMWHITE_POOL or pool.pwpl].
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        gen: GenArgs,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Whiten a file with a pool.
    Whiten {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Pool file [default: $PERMWHITE_POOL or pool.pwpl].
        #[arg(long)]
        pool: Option<PathBuf>,
        /// Generate a fresh pool for this run instead of loading one. Generation
        /// draws from the selection source before any selection draw.
        #[arg(long, conflicts_with = "pool")]
        fresh_pool: bool,
        /// Save the fresh pool here.
        #[arg(long, requires = "fresh_pool")]
        save_pool: Option<PathBuf>,
        /// Record the per-chunk selections to this trace file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Worker threads [default: $PERMWHITE_WORKERS or all cores].
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        gen: GenArgs,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Undo a whitening run given its pool and selection trace.
    Unwhiten {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// ENT byte-mode statistics and NIST-style tests for a file.
    Analyze {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the first input against each of the others.
    Compare {
        /// Baseline followed by one or more modified versions.
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        /// Display labels, one per input, in order [default: file names].
        #[arg(long = "label")]
        labels: Vec<String>,
        /// Inputs are CSV reports from `analyze --format csv` rather than data.
        #[arg(long)]
        reports: bool,
        /// Write `label,chi_square,arithmetic_mean` rows for plotting.
        #[arg(long)]
        figure_csv: Option<PathBuf>,
    },
    /// XOR two files byte by byte, stopping at the shorter.
    Xor {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Von Neumann extractor; prints the number of output bits.
    Vn {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Chunk width exponent: permutations act on 2^n bits [default: 13].
    #[arg(long)]
    n_qubits: Option<u32>,
    /// Number of permutations in the pool [default: 32].
    #[arg(long)]
    count: Option<usize>,
    /// Permutation generator [default: paper].
    #[arg(long)]
    shuffle: Option<ShuffleMode>,
    /// Upper bound accepted for --n-qubits [default: 16].
    #[arg(long)]
    max_qubits: Option<u32>,
}

#[derive(Args, Debug)]
struct SourceArgs {
    /// Entropy source [default: os].
    #[arg(long, value_enum)]
    source: Option<SourceKind>,
    /// Raw byte file for --source seed-file.
    #[arg(long)]
    seed_file: Option<PathBuf>,
    /// Key for --source counter [default: 0].
    #[arg(long)]
    key: Option<u64>,
    /// First keystream block for --source counter [default: 0].
    #[arg(long)]
    counter: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceKind {
    Os,
    SeedFile,
    Counter,
}

impl std::str::FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <SourceKind as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

struct Generation {
    n_qubits: u32,
    count: usize,
    shuffle: ShuffleMode,
    max_qubits: u32,
}

fn generation(args: &GenArgs, cfg: &ConfigFile) -> Result<Generation, CliError> {
    let g = Generation {
        n_qubits: resolve(args.n_qubits, cfg, "n-qubits", || Ok(13))?,
        count: resolve(args.count, cfg, "count", || Ok(32))?,
        shuffle: resolve(args.shuffle, cfg, "shuffle", || Ok(ShuffleMode::Paper))?,
        max_qubits: resolve(args.max_qubits, cfg, "max-qubits", || Ok(DEFAULT_MAX_QUBITS))?,
    };
    if g.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    if g.n_qubits == 0 || g.n_qubits > g.max_qubits {
        return Err(CliError::Usage(format!(
            "--n-qubits must be between 1 and {}, got {}",
            g.max_qubits, g.n_qubits
        )));
    }
    Ok(g)
}

fn source_spec(args: &SourceArgs, cfg: &ConfigFile) -> Result<SourceSpec, CliError> {
    let kind = resolve(args.source, cfg, "source", || Ok(SourceKind::Os))?;
    Ok(match kind {
        SourceKind::Os => SourceSpec::Os,
        SourceKind::SeedFile => {
            let path = resolve(args.seed_file.clone(), cfg, "seed-file", || {
                Err(CliError::Usage("--source seed-file needs --seed-file".into()))
            })?;
            require_input(&path)?;
            SourceSpec::SeedFile(path)
        }
        SourceKind::Counter => SourceSpec::Counter {
            key: resolve(args.key, cfg, "key", || Ok(0))?,
            counter: resolve(args.counter, cfg, "counter", || Ok(0))?,
        },
    })
}

fn pool_path(flag: Option<PathBuf>, cfg: &ConfigFile) -> Result<PathBuf, CliError> {
    resolve(flag, cfg, "pool", || {
        Ok(std::env::var_os(ENV_POOL)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_POOL)))
    })
}

fn workers(flag: Option<usize>, cfg: &ConfigFile) -> Result<Option<usize>, CliError> {
    let w = match flag {
        Some(w) => Some(w),
        None => match cfg.get::<usize>("workers")? {
            Some(w) => Some(w),
            None => match std::env::var(ENV_WORKERS) {
                Ok(v) => Some(v.parse().map_err(|_| {
                    CliError::Usage(format!("{ENV_WORKERS}: invalid worker count {v:?}"))
                })?),
                Err(_) => None,
            },
        },
    };
    if w == Some(0) {
        return Err(CliError::Usage("worker count must be at least 1".into()));
    }
    Ok(w)
}

fn require_input(path: &Path) -> Result<(), CliError> {
    let meta = std::fs::metadata(path)
        .map_err(|e| CliError::io(format!("input {}", path.display()), e))?;
    if !meta.is_file() {
        return Err(CliError::Usage(format!("{} is not a regular file", path.display())));
    }
    Ok(())
}

fn open_input(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(format!("opening {}", path.display()), e))
}

/// An output file that only appears at its final path once every write has
/// succeeded.
struct PendingOutput {
    path: PathBuf,
    file: BufWriter<tempfile::NamedTempFile>,
}

impl PendingOutput {
    fn commit(self) -> Result<(), CliError> {
        let path = self.path;
        let tmp = self
            .file
            .into_inner()
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e.into_error()))?;
        tmp.persist(&path)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e.error))?;
        Ok(())
    }
}

impl Write for PendingOutput {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.file.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.file.flush()
    }
}

/// Checks every output path against the inputs and its parent directory
/// before anything is created.
fn check_outputs(inputs: &[&Path], outputs: &[&Path]) -> Result<(), CliError> {
    let canon_inputs: Vec<PathBuf> = inputs.iter().filter_map(|p| p.canonicalize().ok()).collect();
    for (i, out) in outputs.iter().enumerate() {
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        if !parent.is_dir() {
            return Err(CliError::Usage(format!(
                "output directory {} does not exist",
                parent.display()
            )));
        }
        if let Ok(c) = out.canonicalize() {
            if canon_inputs.contains(&c) {
                return Err(CliError::Usage(format!(
                    "refusing to overwrite input file {}",
                    out.display()
                )));
            }
        }
        if outputs[..i].contains(out) {
            return Err(CliError::Usage(format!("{} given twice as output", out.display())));
        }
    }
    Ok(())
}

fn create_output(path: &Path) -> Result<PendingOutput, CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut builder = tempfile::Builder::new();
    builder.prefix(".permwhite-");
    // Same mode a plain create would give, rather than the 0600 temp default.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o666));
    }
    let tmp = builder
        .tempfile_in(dir)
        .map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
    Ok(PendingOutput {
        path: path.to_path_buf(),
        file: BufWriter::with_capacity(1 << 20, tmp),
    })
}

fn write_file(path: &Path, f: impl FnOnce(&mut PendingOutput) -> Result<(), CliError>) -> Result<(), CliError> {
    let mut out = create_output(path)?;
    f(&mut out)?;
    out.commit()
}

fn load_pool(path: &Path) -> Result<MatrixPool, CliError> {
    require_input(path)?;
    Ok(MatrixPool::load(open_input(path)?)?)
}

fn label_for(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::GenPool { output, gen, source } => {
            let gen = generation(&gen, &cfg)?;
            let spec = source_spec(&source, &cfg)?;
            let output = pool_path(output, &cfg)?;
            check_outputs(&[], &[&output])?;
            let mut rng = spec.open()?;
            let tag = format!("{}/{}", gen.shuffle, spec);
            let pool = MatrixPool::generate(gen.n_qubits, gen.count, gen.shuffle, gen.max_qubits, &mut rng, tag)?;
            write_file(&output, |w| Ok(pool.save(w)?))?;
            eprintln!(
                "wrote {} permutations of {} bits to {}",
                pool.count(),
                pool.size(),
                output.display()
            );
        }
        Command::Whiten {
            input,
            output,
            pool,
            fresh_pool,
            save_pool,
            trace,
            workers: w,
            gen,
            source,
        } => {
            require_input(&input)?;
            let spec = source_spec(&source, &cfg)?;
            let workers = workers(w, &cfg)?;
            let mut outs: Vec<&Path> = vec![&output];
            outs.extend(trace.as_deref());
            outs.extend(save_pool.as_deref());
            let pool_file = if fresh_pool { None } else { Some(pool_path(pool, &cfg)?) };
            let mut ins: Vec<&Path> = vec![&input];
            ins.extend(pool_file.as_deref());
            if let SourceSpec::SeedFile(p) = &spec {
                ins.push(p);
            }
            check_outputs(&ins, &outs)?;

            let mut selector = spec.open()?;
            let (pool, gen_cfg) = match &pool_file {
                Some(p) => (load_pool(p)?, None),
                None => {
                    let g = generation(&gen, &cfg)?;
                    let tag = format!("{}/{}", g.shuffle, spec);
                    let pool = MatrixPool::generate(g.n_qubits, g.count, g.shuffle, g.max_qubits, &mut selector, tag)?;
                    (pool, Some(g))
                }
            };
            let config = WhitenConfig {
                n_qubits: pool.n_qubits(),
                pool_count: pool.count(),
                shuffle_mode: gen_cfg.map(|g| g.shuffle).unwrap_or_default(),
                selection_source: spec,
                record_selections: trace.is_some(),
                workers,
                ..WhitenConfig::default()
            };
            let mut out = create_output(&output)?;
            let summary = permwhite_core::whiten_stream(open_input(&input)?, &pool, &config, &mut selector, &mut out)?;
            if let (Some(path), Some(t)) = (&trace, &summary.trace) {
                write_file(path, |w| Ok(t.save(w)?))?;
            }
            if let Some(path) = &save_pool {
                write_file(path, |w| Ok(pool.save(w)?))?;
            }
            out.commit()?;
            eprintln!(
                "whitened {} chunks of {} bits ({} tail bits copied)",
                summary.stream.full_chunk_count, summary.stream.chunk_bits, summary.stream.tail_bits
            );
        }
        Command::Unwhiten {
            input,
            output,
            pool,
            trace,
            workers: w,
        } => {
            require_input(&input)?;
            require_input(&trace)?;
            let pool_file = pool_path(pool, &cfg)?;
            check_outputs(&[&input, &trace, &pool_file], &[&output])?;
            let workers = workers(w, &cfg)?;
            let pool = load_pool(&pool_file)?;
            let trace = SelectionTrace::load(open_input(&trace)?)?;
            write_file(&output, |w| {
                permwhite_core::unwhiten_stream(open_input(&input)?, &pool, &trace, w, workers)?;
                Ok(())
            })?;
        }
        Command::Analyze {
            input,
            format,
            output,
        } => {
            require_input(&input)?;
            if let Some(o) = &output {
                check_outputs(&[&input], &[o])?;
            }
            let text = analyze_text(&input, format)?;
            match output {
                Some(path) => write_file(&path, |w| {
                    w.write_all(text.as_bytes())
                        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
                })?,
                None => print!("{text}"),
            }
        }
        Command::Compare {
            inputs,
            labels,
            reports,
            figure_csv,
        } => {
            for p in &inputs {
                require_input(p)?;
            }
            if !labels.is_empty() && labels.len() != inputs.len() {
                return Err(CliError::Usage(format!(
                    "{} labels given for {} inputs",
                    labels.len(),
                    inputs.len()
                )));
            }
            if let Some(f) = &figure_csv {
                let ins: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
                check_outputs(&ins, &[f])?;
            }
            let labels: Vec<String> = if labels.is_empty() {
                inputs.iter().map(|p| label_for(p)).collect()
            } else {
                labels
            };
            let mut rows = Vec::with_capacity(inputs.len());
            for (label, path) in labels.iter().zip(&inputs) {
                let r = if reports {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
                    report::parse_ent_csv(&text)?
                } else {
                    stats::ent_analyze(open_input(path)?)?
                };
                rows.push((label.clone(), r));
            }
            let (base_label, base) = &rows[0];
            for (label, r) in &rows[1..] {
                let verdicts = compare_reports(base, r);
                print!("{}", report::comparison_text(base_label, label, &verdicts));
                let improved = verdicts.iter().filter(|v| v.verdict == Verdict::Improved).count();
                println!("{improved} of {} parameters improved\n", verdicts.len());
            }
            if let Some(path) = &figure_csv {
                let csv = report::figure_csv(&rows);
                write_file(path, |w| {
                    w.write_all(csv.as_bytes())
                        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
                })?;
            }
        }
        Command::Xor { a, b, output } => {
            require_input(&a)?;
            require_input(&b)?;
            check_outputs(&[&a, &b], &[&output])?;
            let mut n = 0;
            write_file(&output, |w| {
                n = baseline::xor_combine(open_input(&a)?, open_input(&b)?, w)?;
                Ok(())
            })?;
            eprintln!("wrote {n} bytes");
        }
        Command::Vn { input, output } => {
            require_input(&input)?;
            check_outputs(&[&input], &[&output])?;
            let mut bits = 0;
            write_file(&output, |w| {
                bits = baseline::von_neumann(open_input(&input)?, w)?;
                Ok(())
            })?;
            println!("{bits}");
        }
    }
    Ok(())
}

fn analyze_text(input: &Path, format: Format) -> Result<String, CliError> {
    let mut ent = stats::EntAnalyzer::new();
    let mut nist = stats::NistAccumulator::new();
    let mut reader = open_input(input)?;
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = io::Read::read(&mut reader, &mut buf)
            .map_err(|e| CliError::io(format!("reading {}", input.display()), e))?;
        if n == 0 {
            break;
        }
        ent.update(&buf[..n]);
        nist.update(&buf[..n]);
    }
    let ent = ent.finish()?;
    // The NIST subset needs one full 128-bit block; shorter files get ENT only.
    let nist = match nist.finish() {
        Ok(r) => Some(r),
        Err(e) if e.kind() == permwhite_core::ErrorKind::Precondition => None,
        Err(e) => return Err(e.into()),
    };
    Ok(match format {
        Format::Text => {
            let mut s = report::ent_text(&label_for(input), &ent);
            s.push('\n');
            match &nist {
                Some(r) => s.push_str(&report::nist_text(r)),
                None => s.push_str("NIST-style tests skipped: fewer than 128 bits\n"),
            }
            s
        }
        Format::Csv => {
            let mut s = report::ent_csv(&ent);
            if let Some(r) = &nist {
                s.push_str(&report::nist_csv_rows(r));
            }
            s
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("permwhite: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
