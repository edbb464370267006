//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::pipeline::{Domain, SwapKind};
use fst_core::stylize::Method;

#[derive(Parser, Debug)]
#[command(
    name = "fst",
    version,
    about = "Feature-statistics style transfer in the spatial and frequency domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Transfer the channel statistics of a style image onto a content image
    Stylize(StylizeArgs),
    /// Run the identity-check suite and emit a JSON report
    Verify(VerifyArgs),
    /// Visualize a spectrum, or swap amplitude/phase between two inputs
    Spectrum(SpectrumArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MethodArg {
    /// Per-channel mean/variance alignment
    Adain,
    /// Whitening/coloring covariance alignment
    Wct,
    /// Covariance alignment with minimal content loss
    Optimal,
    /// Gradient-descent Gram-loss minimizer
    GramOpt,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Adain => Method::AdaIn,
            MethodArg::Wct => Method::Wct,
            MethodArg::Optimal => Method::OptimalWct,
            MethodArg::GramOpt => Method::GramOpt,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DomainArg {
    Spatial,
    Frequency,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Domain {
        match d {
            DomainArg::Spatial => Domain::Spatial,
            DomainArg::Frequency => Domain::Frequency,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SwapArg {
    /// Take the donor's amplitudes, keep the input's phases
    Amplitude,
    /// Take the donor's phases, keep the input's amplitudes
    Phase,
}

impl From<SwapArg> for SwapKind {
    fn from(s: SwapArg) -> SwapKind {
        match s {
            SwapArg::Amplitude => SwapKind::Amplitude,
            SwapArg::Phase => SwapKind::Phase,
        }
    }
}

#[derive(Args, Debug)]
pub struct StylizeArgs {
    /// Content input (.png, .ppm or .fmap)
    pub content: PathBuf,
    /// Style input (.png, .ppm or .fmap)
    pub style: PathBuf,
    /// Output path; .fmap keeps full precision, .png/.ppm quantize to 8 bits
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Wct)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = DomainArg::Frequency)]
    pub domain: DomainArg,
    /// Keep the content phases: replace stylized phases before inverting
    #[arg(long)]
    pub phase_replace: bool,
    /// Gaussian frequency-combination strength; larger keeps more of the
    /// stylized low frequencies
    #[arg(long, conflicts_with = "blend_alpha")]
    pub fc_sigma: Option<f64>,
    /// Evaluate the combination weight on raw index offsets instead of
    /// resolution-normalized ones
    #[arg(long, requires = "fc_sigma")]
    pub fc_raw_index: bool,
    /// Scalar blend weight in [0, 1] between stylized and content
    #[arg(long)]
    pub blend_alpha: Option<f64>,
    /// Relative eigenvalue cutoff for covariance whitening
    #[arg(long, default_value_t = fst_core::DEFAULT_EIG_CUTOFF)]
    pub eig_cutoff: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write a JSON verification report (stage timings plus the measured
    /// spatial/frequency equivalence on this pair)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Content input; omit to run on seeded synthetic tensors
    #[arg(long, requires = "style")]
    pub content: Option<PathBuf>,
    /// Style input
    #[arg(long, requires = "content")]
    pub style: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Where to write the JSON report
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Include wall-clock timings in the report (breaks byte-determinism)
    #[arg(long)]
    pub timings: bool,
    /// Perturb the built transforms so the suite must fail (harness self-test)
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Input (.png, .ppm or .fmap)
    pub input: PathBuf,
    /// Second input donating amplitude or phase (with --swap)
    #[arg(long, requires = "swap")]
    pub donor: Option<PathBuf>,
    /// Rebuild the input taking this half from the donor
    #[arg(long, value_enum, requires = "donor")]
    pub swap: Option<SwapArg>,
    /// Output path for the swapped result (required with --swap)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Prefix for the amplitude/phase visualization images
    /// (defaults to the input path without its extension)
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
}
