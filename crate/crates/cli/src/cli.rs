use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fractalab_core::content::Region;
use fractalab_core::targets::GaugeSpec;

use crate::config::{
    default_content_samples, default_coverage_points, default_eta, BakerParams, ContentParams, ExperimentConfig,
    OutputFormat, TargetParams, Task,
};

#[derive(Debug, Parser)]
#[command(name = "fractalab", version, about = "Dimension experiments for iterated function systems")]
pub struct Cli {
    /// Report format; the manifest is always JSON.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Report path (default: `<command>.<format>` in the working directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for the parallel kernels (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct IfsArg {
    /// IFS JSON file, or `gallery:<name>`.
    #[arg(long)]
    pub ifs: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conformality dimension (zero of the pressure).
    Dim {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = fractalab_core::thermo::DEFAULT_CERTIFY_WIDTH)]
        certify_width: f64,
    },
    /// Pressure at one or more exponents.
    Pressure {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        s: Vec<f64>,
        #[arg(long, default_value_t = 12)]
        kmax: usize,
    },
    /// Diameter cut-set at threshold `r`.
    Cutset {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long)]
        r: f64,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Overlap statistic `t_k` over a range of levels.
    Awsc {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 4)]
        kmin: usize,
        #[arg(long, default_value_t = 12)]
        kmax: usize,
    },
    /// Shrinking-target experiment: series bound, box count, coverage.
    Target {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x0: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
        #[command(flatten)]
        ladder: LadderArgs,
        #[arg(long, default_value_t = default_coverage_points())]
        coverage_points: usize,
        #[arg(long, default_value_t = 1e-3)]
        series_epsilon: f64,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Gauge-function experiment: critical exponent and box estimates.
    Baker {
        #[command(flatten)]
        ifs: IfsArg,
        /// `constant`, `power:TAU` or `exp:A`.
        #[arg(long, value_parser = parse_gauge)]
        gauge: GaugeSpec,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x0: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
        #[command(flatten)]
        ladder: LadderArgs,
    },
    /// Hausdorff and essential content estimates.
    Content {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = default_eta())]
        eta: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        grid_scale: Vec<f64>,
        #[arg(long, default_value_t = default_content_samples())]
        samples: usize,
        /// Restrict to the sup-norm ball with this center (needs --ball-radius).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "ball_radius")]
        ball_center: Option<Vec<f64>>,
        #[arg(long, requires = "ball_center")]
        ball_radius: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Every diagnostic for one system.
    FullReport {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Schema, contraction, budget and hypothesis diagnostics.
    Validate {
        #[command(flatten)]
        ifs: IfsArg,
        /// Project the cost of enumerating words of this length.
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Bundled example systems.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Debug, Args)]
pub struct LadderArgs {
    /// Coarsest cut radius.
    #[arg(long, default_value_t = 0.5)]
    pub rmax: f64,
    /// Finest cut radius (default `2^{-15/δ}`, at least `1e-7`).
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long, default_value_t = 6)]
    pub eps_jmin: u32,
    #[arg(long, default_value_t = 14)]
    pub eps_jmax: u32,
}

#[derive(Debug, Subcommand)]
pub enum GalleryAction {
    /// Write every bundled system as `<dir>/<name>.json`.
    Export {
        #[arg(long)]
        dir: PathBuf,
    },
}

pub fn parse_gauge(text: &str) -> Result<GaugeSpec, String> {
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad gauge parameter {v:?}: {e}"));
    let gauge = match text.split_once(':') {
        None if text == "constant" => GaugeSpec::Constant,
        Some(("power", v)) => GaugeSpec::Power { tau: parse(v)? },
        Some(("exp", v)) => GaugeSpec::Exponential { a: parse(v)? },
        _ => return Err(format!("unknown gauge {text:?}; expected constant, power:TAU or exp:A")),
    };
    gauge.validate().map_err(|e| e.to_string())?;
    Ok(gauge)
}

/// What the parsed command line asks for.
#[derive(Debug)]
pub enum Invocation {
    Experiment(ExperimentConfig),
    ExportGallery(PathBuf),
}

impl Cli {
    pub fn parse_from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Self::try_parse_from(args)
    }

    pub fn invocation(self) -> anyhow::Result<Invocation> {
        let (ifs, task) = match self.command {
            Command::Run { config } => {
                let mut cfg = ExperimentConfig::from_file(&config)?;
                if self.out.is_some() {
                    cfg.out = self.out;
                }
                return Ok(Invocation::Experiment(cfg));
            }
            Command::Gallery {
                action: GalleryAction::Export { dir },
            } => return Ok(Invocation::ExportGallery(dir)),
            Command::Dim { ifs, tol, certify_width } => (ifs, Task::Dim { tol, certify_width }),
            Command::Pressure { ifs, s, kmax } => (ifs, Task::Pressure { s, kmax }),
            Command::Cutset { ifs, r, weights } => (ifs, Task::Cutset { r, weights }),
            Command::Awsc { ifs, kmin, kmax } => (ifs, Task::Awsc { kmin, kmax }),
            Command::Target {
                ifs,
                x0,
                delta,
                ladder,
                coverage_points,
                series_epsilon,
                weights,
            } => (
                ifs,
                Task::Target(TargetParams {
                    x0,
                    delta,
                    rmax: ladder.rmax,
                    rmin: ladder.rmin,
                    eps_jmin: ladder.eps_jmin,
                    eps_jmax: ladder.eps_jmax,
                    coverage_points,
                    series_epsilon,
                    weights,
                }),
            ),
            Command::Baker {
                ifs,
                gauge,
                x0,
                delta,
                ladder,
            } => (
                ifs,
                Task::Baker(BakerParams {
                    gauge,
                    x0,
                    delta,
                    rmax: ladder.rmax,
                    rmin: ladder.rmin,
                    eps_jmin: ladder.eps_jmin,
                    eps_jmax: ladder.eps_jmax,
                }),
            ),
            Command::Content {
                ifs,
                s,
                eta,
                grid_scale,
                samples,
                ball_center,
                ball_radius,
                weights,
            } => {
                let region = match (ball_center, ball_radius) {
                    (Some(center), Some(radius)) => Region::Ball { center, radius },
                    _ => Region::Whole,
                };
                (
                    ifs,
                    Task::Content(ContentParams {
                        s,
                        eta,
                        grid_scale,
                        samples,
                        region,
                        weights,
                    }),
                )
            }
            Command::FullReport { ifs, tol } => (ifs, Task::FullReport { tol }),
            Command::Validate { ifs, kmax } => (ifs, Task::Validate { kmax }),
        };
        let cfg = ExperimentConfig {
            ifs: ifs.ifs,
            seed: self.seed,
            format: self.format,
            out: self.out,
            task,
        };
        cfg.validate()?;
        Ok(Invocation::Experiment(cfg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Invocation {
        Cli::parse_from_args(std::iter::once("fractalab").chain(args.iter().copied()))
            .unwrap()
            .invocation()
            .unwrap()
    }

    #[test]
    fn gauges() {
        assert_eq!(parse_gauge("constant"), Ok(GaugeSpec::Constant));
        assert_eq!(parse_gauge("power:2"), Ok(GaugeSpec::Power { tau: 2.0 }));
        assert_eq!(parse_gauge("exp:0.25"), Ok(GaugeSpec::Exponential { a: 0.25 }));
        assert!(parse_gauge("exp:-1").is_err());
        assert!(parse_gauge("linear").is_err());
    }

    #[test]
    fn global_flags_after_subcommand() {
        let Invocation::Experiment(cfg) = parse(&["dim", "--ifs", "gallery:cantor", "--seed", "7", "--format", "csv"])
        else {
            panic!("expected an experiment");
        };
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.report_path(), PathBuf::from("dim.csv"));
    }

    #[test]
    fn lists_and_negative_points() {
        let Invocation::Experiment(cfg) = parse(&["target", "--ifs", "x.json", "--x0", "-0.5", "--delta", "1,2"]) else {
            panic!("expected an experiment");
        };
        match cfg.task {
            Task::Target(p) => {
                assert_eq!(p.x0, vec![-0.5]);
                assert_eq!(p.delta, vec![1.0, 2.0]);
                assert_eq!(p.rmin, None);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        let cli = Cli::parse_from_args(["fractalab", "content", "--ifs", "x", "--s", "1", "--grid-scale", "0.1", "--eta", "0.9"])
            .unwrap();
        assert!(cli.invocation().is_err());
    }
}
