//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardy_npa::HRule;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "hardy-cert", version, about = "Certify randomness from tilted Hardy tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for multi-start optimizers.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Print compact single-line JSON instead of indented JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// SDP gap and feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// SDP iteration cap.
    #[arg(long, global = true, default_value_t = 500)]
    pub max_iter: u32,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Optimal state, Hardy value and randomness at one tilt.
    #[command(allow_negative_numbers = true)]
    Tilted(TiltedArgs),
    /// Tilted-test quantities over a grid of tilts, as CSV.
    #[command(allow_negative_numbers = true)]
    TiltedSweep(SweepArgs),
    /// Guessing probability under colored noise.
    #[command(allow_negative_numbers = true)]
    Colored(ColoredArgs),
    /// Classical and quantum bounds of the Bell functional I_w.
    #[command(allow_negative_numbers = true)]
    Iw(IwArgs),
    /// Level-2 bound on Eve's guessing probability at a given I_w value.
    #[command(allow_negative_numbers = true)]
    NpaGuess(NpaGuessArgs),
    /// Min-entropy versus the seed bias parameter l.
    #[command(allow_negative_numbers = true)]
    MdlCurve(MdlCurveArgs),
    /// No-signalling bounds on the outcome probabilities.
    #[command(allow_negative_numbers = true)]
    NsBound(NsBoundArgs),
    /// Ladder Hardy test with N steps.
    Ladder(LadderArgs),
    /// The ququart gadget Hardy test.
    Gadget(GadgetArgs),
    /// Regenerate the figure data and the constants table.
    ReproduceFigures(FigureArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tilted(_) => "tilted",
            Command::TiltedSweep(_) => "tilted-sweep",
            Command::Colored(_) => "colored",
            Command::Iw(_) => "iw",
            Command::NpaGuess(_) => "npa-guess",
            Command::MdlCurve(_) => "mdl-curve",
            Command::NsBound(_) => "ns-bound",
            Command::Ladder(_) => "ladder",
            Command::Gadget(_) => "gadget",
            Command::ReproduceFigures(_) => "reproduce-figures",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TiltedArgs {
    #[arg(long)]
    pub w: f64,
    /// Also run the numeric uniqueness check with this many restarts.
    #[arg(long)]
    pub selftest: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = -0.24)]
    pub wmin: f64,
    #[arg(long, default_value_t = 0.98)]
    pub wmax: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ColoredArgs {
    #[arg(long)]
    pub w: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// CSV output; without it the rows go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IwArgs {
    #[arg(long, required_unless_present = "sweep")]
    pub w: Option<f64>,
    /// Evaluate on a grid and write CSV to `--out`.
    #[arg(long, requires = "out")]
    pub sweep: bool,
    #[arg(long, default_value_t = -0.24)]
    pub wmin: f64,
    #[arg(long, default_value_t = 0.98)]
    pub wmax: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Setting(pub usize, pub usize);

fn parse_setting(s: &str) -> Result<Setting, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let p = |t: &str| match t.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(format!("input {other:?} is not 0 or 1")),
    };
    Ok(Setting(p(x)?, p(y)?))
}

#[derive(Debug, Args, Serialize)]
pub struct NpaGuessArgs {
    #[arg(long)]
    pub w: f64,
    /// Observed value of I_w.
    #[arg(long)]
    pub iw: f64,
    #[arg(long, default_value = "1,1", value_parser = parse_setting)]
    pub setting: Setting,
    /// Write the guessing SDP in sparse SDPA format.
    #[arg(long)]
    pub export_sdpa: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    Sum,
    Third,
}

impl From<RuleArg> for HRule {
    fn from(r: RuleArg) -> HRule {
        match r {
            RuleArg::Sum => HRule::Sum,
            RuleArg::Third => HRule::Third,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct MdlCurveArgs {
    #[arg(long)]
    pub w: f64,
    #[arg(long, value_enum)]
    pub rule: RuleArg,
    /// Grid `l = k/(4 steps)`, `k = 1..=steps`.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value = "1,1", value_parser = parse_setting)]
    pub setting: Setting,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving one SDPA file per solved program.
    #[arg(long)]
    pub export_sdpa: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct NsBoundArgs {
    #[arg(long)]
    pub w: f64,
    /// Observed MDL value.
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.25)]
    pub l: f64,
    #[arg(long, default_value_t = 0.25)]
    pub h: f64,
    /// Solve the no-signalling LP for every entry.
    #[arg(long)]
    pub lp_verify: bool,
    /// CSV of the per-entry LP maxima.
    #[arg(long, requires = "lp_verify")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LadderArgs {
    #[arg(long)]
    pub n: usize,
    /// State parameter; the Hardy-optimal one when omitted.
    #[arg(long)]
    pub t: Option<f64>,
    /// Scan t over (0, 1) and write CSV to `--out`.
    #[arg(long, requires = "out")]
    pub sweep: bool,
    #[arg(long, default_value_t = 99)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GadgetArgs {
    /// Run the coloring, orthogonality, Born-rule and deterministic checks.
    #[arg(long)]
    pub verify: bool,
    /// Write the compiled test as JSON.
    #[arg(long)]
    pub emit_test: Option<PathBuf>,
    /// Node cap of the deterministic-strategy search.
    #[arg(long, default_value_t = 1_000_000)]
    pub lhv_cap: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FigureArgs {
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
    /// Points on the I_w axis of the guessing curve.
    #[arg(long, default_value_t = 21)]
    pub fig1_points: usize,
    /// Points on the l axis of the min-entropy curves.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
}
