use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "freebeta", version, about = "Free beta prime laws, linked partitions and Fisher spectra")]
pub struct Cli {
    /// Output format; csv is available for tabular results.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Moments m_1..m_n as exact rationals.
    Moments(MomentsArgs),
    /// Density of the continuous part on a grid.
    Density(DensityArgs),
    /// Support interval and atoms.
    Support(FamilyArgs),
    /// Non-crossing linked partitions of [n].
    EnumerateNcl(EnumerateArgs),
    /// Joint distribution of (dc, sc, sg) over NCL(n).
    NclStats(SizeArgs),
    /// Coefficients of the (dc, sc, sg) generating function.
    GammaGf(GammaArgs),
    /// Coefficients of the T-transform of the free beta prime law.
    TCoeffs(TCoeffsArgs),
    /// Free Meixner parameters and class.
    Meixner(MeixnerArgs),
    /// Compares the free score 2Hf with the potential derivative V'.
    ScoreCheck(ScoreArgs),
    /// Spectrum of a random Fisher matrix against the free F law.
    McFisher(FisherArgs),
    /// Runs every acceptance check, stopping at the first failure.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Fbp,
    FreePoisson,
    InverseFreePoisson,
    FreeF,
    FreeT,
    FreeBeta,
    Meixner,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentRoute {
    /// Sum over linked partitions (free beta prime only).
    Ncl,
    /// Series expansion of the closed-form transform.
    Closed,
    /// Vacuum moments of the truncated Fock operator (free beta prime only).
    Fock,
    /// Inversion of the S-transform.
    STransform,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = MomentRoute::All)]
    pub route: MomentRoute,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Also recover the density from the Cauchy transform near the axis.
    #[arg(long)]
    pub numeric: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Print every partition, not only the count.
    #[arg(long)]
    pub list: bool,
    /// Ordinary non-crossing partitions instead of linked ones.
    #[arg(long)]
    pub noncrossing: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct SizeArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaRouteArg {
    Brute,
    Cf,
    Closed,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct GammaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: String,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = GammaRouteArg::All)]
    pub route: GammaRouteArg,
}

#[derive(Args, Debug, Serialize)]
pub struct TCoeffsArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct MeixnerArgs {
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ScoreArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct FisherArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of consecutive seeds to sample.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Keep going after a failure.
    #[arg(long)]
    pub all: bool,
}
