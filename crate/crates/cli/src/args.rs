use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

/// Decomposition certificates, covers, nerves, doubling and the
/// decomposition game on finite metric spaces.
///
/// Scalars may be integers, decimals or `p/q` rationals. Arithmetic is exact
/// unless an input file contains a floating-point number or `--float` is
/// given. Arguments naming a space, family or cover accept either a bundled
/// fixture name or a JSON file.
///
/// Exit status: 0 on success, 1 when a check or a precondition fails, 2 on
/// usage or input errors. Diagnostics go to stderr as JSON.
#[derive(Debug, Parser)]
#[command(name = "coarsekit", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Write the result to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Allow `--out` to replace an existing file.
    #[arg(long, global = true)]
    pub force: bool,
    /// Seed for randomized fixture generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Use f64 arithmetic even when every input is exact.
    #[arg(long, global = true)]
    pub float: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a canonical space document from a fixture, a space description
    /// or a seeded random graph metric.
    Build(BuildArgs),
    /// Decompose a family at scale r with a defender strategy, or turn a
    /// cover into a decomposition.
    Decompose(DecomposeArgs),
    /// Check any artifact: certificates, game transcripts and doubling
    /// certificates are verified; everything else is parsed. Also reports
    /// whether the file is in canonical form.
    Verify(VerifyArgs),
    /// Compose two certificates whose families chain.
    Compose(ComposeArgs),
    /// Exhaustively decide whether a small space has an (r, n)-decomposition
    /// with parts of bounded diameter.
    Oracle(OracleArgs),
    /// Multiplicity, Lebesgue number, mesh and d-multiplicities of a cover.
    CoverStats(CoverStatsArgs),
    /// Nerve of a cover, as JSON or DOT.
    Nerve(NerveArgs),
    /// Partition-of-unity map of a cover and its measured Lipschitz
    /// constant.
    Lipschitz(LipschitzArgs),
    /// Certify large-scale doubling, optionally moving centers into the
    /// subset or emitting the resulting decomposition.
    Doubling(DoublingArgs),
    /// Glue per-part feature maps along partition weights.
    Glue(GlueArgs),
    /// Play the decomposition game against a scripted challenger.
    Game(GameArgs),
    /// List bundled fixtures, emit one, or run the bundled checks.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Fixture name or space description file.
    #[arg(long, conflicts_with = "random")]
    pub space: Option<String>,
    /// Random graph metric on this many points (uses --seed).
    #[arg(long)]
    pub random: Option<usize>,
    /// Largest edge weight of the random graph.
    #[arg(long, default_value_t = 10)]
    pub max_weight: i64,
    /// Id of the emitted space.
    #[arg(long)]
    pub id: Option<String>,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    /// Defender strategy: net_then_grave, singletons or oracle_small.
    #[arg(long, default_value = "net_then_grave")]
    pub strategy: String,
    /// Level bound for oracle_small.
    #[arg(long)]
    pub n: Option<u64>,
    /// Part diameter bound for oracle_small.
    #[arg(long)]
    pub diam: Option<String>,
    /// Net scale growth factor for net_then_grave.
    #[arg(long)]
    pub growth: Option<u32>,
    /// Number of net scales net_then_grave tries.
    #[arg(long)]
    pub max_steps: Option<u32>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Fixture name, family file, space file, or a certificate file standing
    /// for its target family.
    #[arg(long, visible_alias = "space", required_unless_present = "cover", conflicts_with = "cover")]
    pub family: Option<String>,
    /// Cover fixture name or cover file; uses the cover-to-decomposition
    /// construction with level bound --n.
    #[arg(long)]
    pub cover: Option<String>,
    /// Disjointness scale.
    #[arg(long)]
    pub r: String,
    #[command(flatten)]
    pub strategy: StrategyArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(required_unless_present = "cert", conflicts_with = "cert")]
    pub input: Option<PathBuf>,
    /// Same as the positional input.
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

impl VerifyArgs {
    pub fn path(&self) -> &Path {
        self.input.as_deref().or(self.cert.as_deref()).unwrap_or(Path::new(""))
    }
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    /// Certificate of the outer decomposition.
    #[arg(required_unless_present = "outer", conflicts_with = "outer")]
    pub first: Option<PathBuf>,
    /// Certificate decomposing the target of the first.
    #[arg(required_unless_present = "inner", conflicts_with = "inner")]
    pub second: Option<PathBuf>,
    /// Flag form of the first certificate.
    #[arg(long)]
    pub outer: Option<PathBuf>,
    /// Flag form of the second certificate.
    #[arg(long)]
    pub inner: Option<PathBuf>,
}

impl ComposeArgs {
    pub fn outer(&self) -> &Path {
        self.first.as_deref().or(self.outer.as_deref()).unwrap_or(Path::new(""))
    }

    pub fn inner(&self) -> &Path {
        self.second.as_deref().or(self.inner.as_deref()).unwrap_or(Path::new(""))
    }
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Fixture name or space file.
    #[arg(long)]
    pub space: String,
    /// Restrict to these points, e.g. `0,1,2` or `0-5,8` (ranges inclusive).
    #[arg(long)]
    pub points: Option<String>,
    #[arg(long)]
    pub r: String,
    #[arg(long)]
    pub n: u64,
    /// Part diameter bound.
    #[arg(long)]
    pub diam: String,
}

#[derive(Debug, Args)]
pub struct CoverStatsArgs {
    /// Cover fixture name or cover file.
    #[arg(long)]
    pub cover: String,
    /// Also report the d-multiplicity at these scales.
    #[arg(long = "d")]
    pub d: Vec<String>,
}

#[derive(Debug, Args)]
pub struct NerveArgs {
    #[arg(long)]
    pub cover: String,
    /// Emit a DOT graph of the 1-skeleton instead of JSON.
    #[arg(long)]
    pub dot: bool,
}

#[derive(Debug, Args)]
pub struct LipschitzArgs {
    #[arg(long)]
    pub cover: String,
    /// Target Lipschitz constant.
    #[arg(long)]
    pub epsilon: String,
    /// Dimension bound; defaults to multiplicity - 1.
    #[arg(long)]
    pub n: Option<usize>,
    /// Skip the multiplicity and Lebesgue preconditions.
    #[arg(long)]
    pub unchecked: bool,
    /// Include the map itself in the report.
    #[arg(long)]
    pub with_map: bool,
}

#[derive(Debug, Args)]
pub struct DoublingArgs {
    /// Fixture name or space file.
    #[arg(long)]
    pub space: String,
    /// Subset to certify, e.g. `0-9,20`; defaults to the whole space.
    #[arg(long)]
    pub subset: Option<String>,
    /// Smallest certified scale R.
    #[arg(long, visible_alias = "R")]
    pub r_min: String,
    /// Move ball centers into the subset (N becomes N^2, R becomes 2R).
    #[arg(long, conflicts_with = "asdim")]
    pub subspace: bool,
    /// Emit the decomposition obtained from net-ball covers at this lambda.
    #[arg(long)]
    pub asdim: Option<String>,
}

#[derive(Debug, Args)]
pub struct GlueArgs {
    /// Glue input file with space, weights, per-part maps, r and epsilon.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    pub input: Option<PathBuf>,
    /// Run a bundled example instead (see `fixtures`).
    #[arg(long)]
    pub example: Option<String>,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Fixture name, family file, space file or certificate file.
    #[arg(long, visible_alias = "space")]
    pub family: String,
    /// The defender wins once the mesh is at most this.
    #[arg(long)]
    pub bound: String,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[arg(long, default_value_t = coarsekit::game::DEFAULT_MAX_TURNS)]
    pub max_turns: u32,
    /// `constant:R`, `geometric:R:LAMBDA` or `script:R1,R2,...`.
    #[arg(long, required_unless_present = "script", conflicts_with = "script")]
    pub challenger: Option<String>,
    /// Scripted scales, short for `--challenger script:R1,R2,...`.
    #[arg(long)]
    pub script: Option<String>,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Fixture to emit; lists every fixture when omitted.
    pub name: Option<String>,
    /// Run the bundled checks on every fixture.
    #[arg(long, conflicts_with = "name")]
    pub check: bool,
}
