use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use ptbrach_core::verify::Suite;

use crate::report::{Format, CSV_SCHEMAS};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "ptbrach",
    version,
    about = "Time-optimal state transfer for Hermitian and PT-symmetric two-level Hamiltonians",
    after_long_help = CSV_SCHEMAS
)]
pub struct Cli {
    /// Fixed eigenvalue gap.
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,

    /// Action unit.
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hbar: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Residual tolerance in (0, 1e-4]. Replaces the pinned threshold of
    /// every check the command performs.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Optimal transfer time and Hamiltonian for a Hermitian target.
    HermitianOptimal(HermitianArgs),
    /// Spin flip (1,0) -> (0,1) under the three-parameter PT Hamiltonian.
    PtFlip(FlipArgs),
    /// Solve for a four-parameter PT Hamiltonian reaching a target in time T.
    PtReach(ReachArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::HermitianOptimal(_) => "hermitian-optimal",
            Command::PtFlip(_) => "pt-flip",
            Command::PtReach(_) => "pt-reach",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct HermitianArgs {
    /// Amplitude of (1,0) in the target, e.g. 0.6, 0.3+0.4i, -0.5i.
    /// Defaults to the real value fixed by normalization.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<ComplexArg>,

    /// Amplitude of (0,1) in the target. Defaults like --a.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<ComplexArg>,

    /// Phase of a used for the diagonal of the optimal Hamiltonian
    /// (default 0: target reached up to a global phase).
    #[arg(long = "arg-a", allow_hyphen_values = true)]
    pub arg_a: Option<f64>,

    /// Also run the brute-force grid optimizer.
    #[arg(long)]
    pub oracle: bool,

    /// Grid points per axis for --oracle (at least 100).
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
}

#[derive(Args, Debug, Clone)]
pub struct FlipArgs {
    /// Mixing angle in (-pi/2, pi/2).
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "sweep",
        required_unless_present = "sweep"
    )]
    pub alpha: Option<f64>,

    /// Sweep of alpha as start:stop:step, stop excluded.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<Sweep>,

    /// Off-diagonal phase theta of the Hamiltonian.
    #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_2)]
    pub theta: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ReachArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u: f64,

    #[arg(long, allow_hyphen_values = true)]
    pub v: f64,

    /// Common phase of the target.
    #[arg(long = "A", allow_hyphen_values = true, default_value_t = 0.0)]
    pub phase: f64,

    /// Relative phase of the second component.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub xi: f64,

    /// Dimensionless horizon T = omega t / (2 hbar).
    #[arg(long = "T", conflicts_with = "t_sweep", required_unless_present = "t_sweep")]
    pub t: Option<f64>,

    /// Sweep of T as start:stop:step, stop excluded.
    #[arg(long = "T-sweep")]
    pub t_sweep: Option<Sweep>,

    /// Compare against the small-T series (requires u = v).
    #[arg(long)]
    pub series: bool,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Run only this suite (name or number); repeatable.
    #[arg(long = "suite")]
    pub suites: Vec<Suite>,

    /// Seed for the sampled specs.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

/// Complex number written as `re`, `im i`, or `re±im i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || format!("cannot parse '{s}' as a complex number");
        let Some(body) = t.strip_suffix('i') else {
            return t
                .parse::<f64>()
                .map(|re| ComplexArg(Complex64::new(re, 0.0)))
                .map_err(|_| bad());
        };
        // Split before the last sign that is not part of an exponent.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let parse_im = |x: &str| match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        };
        let (re, im) = match split {
            Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, parse_im(&body[k..])?),
            None => (0.0, parse_im(body)?),
        };
        Ok(ComplexArg(Complex64::new(re, im)))
    }
}

/// `start:stop:step`; yields `start + k·step` while short of `stop`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

pub const MAX_SWEEP_POINTS: usize = 1_000_000;

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step - 1e-9).ceil().max(0.0) as usize;
        (0..n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("sweep '{s}' is not start:stop:step"));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number '{x}' in sweep '{s}'"))
        };
        let sweep = Sweep {
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        };
        if !(sweep.start.is_finite() && sweep.stop.is_finite() && sweep.step.is_finite()) || sweep.step == 0.0 {
            return Err(format!("sweep '{s}' needs finite bounds and a nonzero step"));
        }
        if (sweep.stop - sweep.start) / sweep.step > MAX_SWEEP_POINTS as f64 {
            return Err(format!("sweep '{s}' has more than {MAX_SWEEP_POINTS} points"));
        }
        Ok(sweep)
    }
}
