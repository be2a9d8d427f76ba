use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sublock_core::idkll::{DontCarePolicy, PartitionStrategy};
use sublock_core::sublock::Selection;

/// Lock gate-level netlists by sub-circuit replacement with
/// input-dependent keys, attack them, and check the results.
#[derive(Parser, Debug)]
#[command(name = "sublock", version, about, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lock a `.bench` netlist; writes `<out>.bench`, `<out>.keymem.json`
    /// and `<out>.report.json`.
    Lock(LockArgs),
    /// Run the oracle-guided SAT attack on a locked netlist.
    Attack(AttackArgs),
    /// Check a locked netlist and key memory against the original.
    Verify(VerifyArgs),
    /// Print brute-force attempt counts for a key size.
    Analyze(AnalyzeArgs),
    /// Lock and attack a set of circuits over several seeds and key
    /// budgets, comparing with the XOR and Anti-SAT baselines.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Sub-circuit replacement with input-dependent keys.
    Sublock,
    /// XOR/XNOR key gates on random gate outputs.
    Xor,
    /// An Anti-SAT block flipping one random observable net.
    Antisat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionArg {
    Random,
    FaultImpact,
}

impl From<SelectionArg> for Selection {
    fn from(s: SelectionArg) -> Self {
        match s {
            SelectionArg::Random => Selection::Random,
            SelectionArg::FaultImpact => Selection::FaultImpact,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    DontCare,
    Complement,
}

impl From<PolicyArg> for DontCarePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::DontCare => DontCarePolicy::DontCare,
            PolicyArg::Complement => DontCarePolicy::Complement,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionArg {
    MsbSplit,
    BalancedRandom,
}

impl From<PartitionArg> for PartitionStrategy {
    fn from(p: PartitionArg) -> Self {
        match p {
            PartitionArg::MsbSplit => PartitionStrategy::MsbSplit,
            PartitionArg::BalancedRandom => PartitionStrategy::BalancedRandom,
        }
    }
}

/// Options shaping a SubLock run.
#[derive(Args, Clone, Debug, Serialize)]
pub struct SublockOptions {
    /// Key bits per replaced sub-circuit.
    #[arg(long, default_value_t = 2)]
    pub key_bits_per_lock: usize,
    /// Input-pattern sets (valid key sequences) per replaced sub-circuit.
    #[arg(long, default_value_t = 2)]
    pub sets_per_lock: usize,
    /// Allowed sub-circuit input counts.
    #[arg(long = "support", value_delimiter = ',', default_values_t = [3usize, 4])]
    pub support_sizes: Vec<usize>,
    #[arg(long, value_enum, default_value_t = SelectionArg::Random)]
    pub selection: SelectionArg,
    #[arg(long, value_enum, default_value_t = PartitionArg::MsbSplit)]
    pub partition: PartitionArg,
    /// Locked-table entries under unused key sequences.
    #[arg(long, value_enum, default_value_t = PolicyArg::DontCare)]
    pub policy: PolicyArg,
    /// Random patterns for fault impact on designs with more than 16
    /// inputs.
    #[arg(long, default_value_t = 10_000)]
    pub fault_samples: usize,
    /// Random (input, wrong key) pairs for the corruption estimate.
    #[arg(long, default_value_t = 1000)]
    pub corruption_trials: usize,
    /// Never realise a lock as the replaced cone XOR a flip term.
    #[arg(long)]
    pub no_reuse_cone: bool,
}

#[derive(Args, Debug)]
pub struct LockArgs {
    /// Input `.bench` netlist (without key inputs).
    pub input: PathBuf,
    /// Total key bits.
    #[arg(long)]
    pub keys: usize,
    /// Seed for every random choice.
    #[arg(long)]
    pub seed: u64,
    /// Output path prefix; defaults to the input path with `.locked` in
    /// place of its extension.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Scheme::Sublock)]
    pub scheme: Scheme,
    #[command(flatten)]
    pub sublock: SublockOptions,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    /// Locked `.bench` netlist.
    pub locked: PathBuf,
    /// Original `.bench` netlist, used only as an input/output oracle.
    #[arg(long)]
    pub oracle: PathBuf,
    /// DIP budget; defaults to 10 * 2^min(k, 20).
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Wall-clock budget in seconds, checked after every DIP.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Recorded in the report; the attack itself draws no random numbers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the report; standard output if absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// JSON-lines trace, one record per DIP.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// DIMACS dump of the final attack formula.
    #[arg(long)]
    pub dump_cnf: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Locked `.bench` netlist.
    pub locked: PathBuf,
    /// Key memory JSON.
    #[arg(long)]
    pub keymem: PathBuf,
    /// Original `.bench` netlist.
    #[arg(long)]
    pub original: PathBuf,
    /// DIP budget of the universal-key search.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Recorded in the verdict; verification draws no random numbers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttemptScheme {
    /// Single key: `2^k`.
    Conventional,
    /// Anti-SAT lower bound: `2^(k/2)`.
    Antisat,
    /// Input-dependent keys: `2^k` plus the ordered selections of key
    /// sequences.
    Idkll,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Key bits.
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = AttemptScheme::Idkll)]
    pub scheme: AttemptScheme,
    /// Allow key sizes beyond the exact limit, reporting base-10
    /// logarithms from Stirling's series.
    #[arg(long)]
    pub approx: bool,
    /// Recorded in the output; nothing here is random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Original `.bench` netlists.
    #[arg(required = true)]
    pub circuits: Vec<PathBuf>,
    /// Key budgets to try.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize])]
    pub keys: Vec<usize>,
    /// First seed.
    #[arg(long)]
    pub seed: u64,
    /// Number of consecutive seeds per circuit and budget.
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// DIP budget per attack.
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Also attack the Anti-SAT baseline (needs about 2^(k/2) DIPs).
    #[arg(long)]
    pub attack_antisat: bool,
    /// Where to write the summary; standard output if absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub sublock: SublockOptions,
}
