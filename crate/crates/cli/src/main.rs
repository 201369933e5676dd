//! `misty-zc`: verification suites, complexity calculators and attack runs.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 for
//! configuration errors (bad flags, unreadable inputs, refused requests).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use misty_zc_core::attack::AttackVariant;

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "misty-zc", version, about = "MISTY1 zero-correlation workbench")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random choice; identical seeds give identical reports.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Samples per sampled estimate.
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Known pairs as hex lines `PT CT` (or 16-byte binary records for `.bin`).
    #[arg(long, global = true)]
    pub pairs_file: Option<PathBuf>,
    /// Output file; defaults to `$MZC_OUT_DIR/<command>.<ext>`, then stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ToyExact,
    RealSampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// Pair counts a desk machine handles (2^14 for the full-width variants).
    Desk,
    /// The data complexity the distinguisher requires.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    WithFl,
    NoFl,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Known-answer vectors, round trips and key-schedule checks.
    VerifyCipher {
        /// Only check the toy cipher.
        #[arg(long)]
        toy_only: bool,
        /// Vector file (`KEY PT CT` hex per line) replacing the built-in records.
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Replacement 9-bit S-box table: 512 hex values.
        #[arg(long)]
        sbox_long: Option<PathBuf>,
    },
    /// Mask-propagation lemmas and the FI/FO observations.
    VerifyLemmas {
        /// Largest width for the exhaustive XOR/branch/OR/AND checks.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=10))]
        max_width: u32,
        /// Replace the OR propagation rule with a wrong one (negative control).
        #[arg(long)]
        inject_fault: bool,
    },
    /// Zero correlation of the five-round approximations.
    VerifyDistinguisher {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Toy keys (toy-exact).
        #[arg(long, default_value_t = 100)]
        keys: usize,
        /// Masks per key (toy-exact).
        #[arg(long, default_value_t = 20)]
        betas: usize,
        /// (key, mask) instances (real-sampled).
        #[arg(long, default_value_t = 10)]
        instances: usize,
    },
    /// Data complexity, statistic moments and threshold.
    CalcComplexity {
        /// Fill in the published parameters of one attack.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        beta0_log2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta1_log2: Option<f64>,
        /// Evaluate moments at `N = 2^x` instead of the computed `N`.
        #[arg(long, allow_hyphen_values = true)]
        data_log2: Option<f64>,
    },
    /// Partial-sum key recovery.
    RunAttack {
        #[arg(long)]
        variant: AttackVariant,
        #[arg(long, value_enum, default_value = "desk")]
        scale: Scale,
        /// Number of known pairs to generate.
        #[arg(long)]
        pairs: Option<u64>,
        /// Random wrong guesses evaluated next to the right one.
        #[arg(long, default_value_t = 7)]
        wrong: usize,
        /// Enumerate every guess (toy variants only).
        #[arg(long, conflicts_with = "wrong")]
        exhaustive: bool,
        /// Master key as hex; drawn from the seed when absent.
        #[arg(long)]
        key: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta0_log2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta1_log2: Option<f64>,
    },
    /// Write entries of the subkey-dependent basis table T1 as CSV.
    ExportT1 {
        #[arg(long, value_enum, default_value = "real")]
        cipher: CipherChoice,
        /// Number of table indices to export.
        #[arg(long, default_value_t = 16)]
        count: u64,
        /// Draw indices at random from the seed instead of counting from 0.
        #[arg(long)]
        random: bool,
        /// Explicit hex indices; overrides --count.
        #[arg(long, num_args = 1..)]
        index: Vec<String>,
    },
    /// Per-step time and memory accounting.
    CostModel {
        /// Defaults to both full-width variants.
        #[arg(long)]
        variant: Option<AttackVariant>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CipherChoice {
    Real,
    Toy,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let g = &cli.global;
    let result = match cli.command {
        Command::VerifyCipher { toy_only, vectors, sbox_long } => commands::verify_cipher(g, toy_only, vectors, sbox_long),
        Command::VerifyLemmas { max_width, inject_fault } => commands::verify_lemmas(g, max_width, inject_fault),
        Command::VerifyDistinguisher { mode, keys, betas, instances } => {
            commands::verify_distinguisher(g, mode, keys, betas, instances)
        }
        Command::CalcComplexity { preset, n, m, beta0_log2, beta1_log2, data_log2 } => {
            commands::calc_complexity(g, preset, n, m, beta0_log2, beta1_log2, data_log2)
        }
        Command::RunAttack { variant, scale, pairs, wrong, exhaustive, key, beta0_log2, beta1_log2 } => {
            commands::run_attack(g, commands::AttackArgs { variant, scale, pairs, wrong, exhaustive, key, beta0_log2, beta1_log2 })
        }
        Command::ExportT1 { cipher, count, random, index } => commands::export_t1(g, cipher, count, random, index),
        Command::CostModel { variant } => commands::cost_model(g, variant),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
