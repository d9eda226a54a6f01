use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coherence::bounds::{bounds_report, crossing, isotropic_row, scan_isotropic, TraceDistanceOptions};
use coherence::moments::{linspace, moment_report, scan_two_qutrit, Cut, MOMENT_TOL};
use coherence::multicopy::{cascade, nonlinear_expectation, Wiring, DETECT_TOL};
use coherence::states::{make_state, StateFamily};
use coherence::witness::validate;
use coherence::{DimSignature, Witness};
use serde_json::json;

use crate::files::{load_state, load_witness, MatrixFile};
use crate::report::{self, Envelope};

/// Process status for a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Command ran; for detection commands, coherence was detected.
    Detected,
    Undetermined,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Detected => 0,
            Outcome::Undetermined => 2,
        }
    }

    fn from_detected(detected: bool) -> Self {
        if detected {
            Outcome::Detected
        } else {
            Outcome::Undetermined
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cohwit", version, about = "Coherence detection with moments and multi-copy witnesses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a state (or witness) file for a built-in family.
    Gen(GenArgs),
    /// Run a detection test. Exit status 0 = coherent, 2 = undetermined.
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Witness-based lower bounds on coherence.
    Bounds(BoundsArgs),
    /// Tabulate a family over a parameter grid as CSV.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(alias = "example1")]
    TwoQutrit,
    XState,
    NoisyGhz,
    ThreeQubitX,
    Isotropic,
    MaxEntangled,
    Random,
    RandomDiagonal,
    /// Witness `sum |u><v| + |v><u|` over `--pairs`.
    Transition,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: Family,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub v: Option<f64>,
    /// Local dimension for max-entangled.
    #[arg(long)]
    pub d: Option<usize>,
    /// Total dimension for random families (single subsystem).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Subsystem dimensions, e.g. `2,2,2`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Basis pairs for `transition`, e.g. `00-10,01-11`.
    #[arg(long, value_delimiter = ',')]
    pub pairs: Vec<String>,
    /// Write the dephasing witness of the state instead of the state.
    #[arg(long)]
    pub witness: bool,
    /// Name stored in witness files.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DetectCommand {
    /// Partial-transpose moment test.
    Moments(MomentsArgs),
    /// Linear or multi-copy witness evaluation.
    Witness(WitnessArgs),
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    pub state: PathBuf,
    /// Bipartition `MxN`; defaults to the file's two subsystems.
    #[arg(long)]
    pub cut: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub kmax: u32,
    #[arg(long, default_value_t = MOMENT_TOL)]
    pub tol: f64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    pub state: PathBuf,
    /// Witness files; repeat for several.
    #[arg(long = "witness", short = 'w', required = true)]
    pub witnesses: Vec<PathBuf>,
    /// Explicit wiring, e.g. `W@A1,A2;V@B1,B2`.
    #[arg(long, conflicts_with = "cascade")]
    pub wiring: Option<String>,
    /// Copies for `--wiring`; defaults to the largest copy it mentions.
    #[arg(long, requires = "wiring")]
    pub copies: Option<usize>,
    /// Run the escalating cascade up to this many copies (default 3).
    #[arg(long)]
    pub cascade: Option<usize>,
    #[arg(long, default_value_t = DETECT_TOL)]
    pub tol: f64,
    /// Seed for the witness validity probes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    pub state: PathBuf,
    /// Witness file; defaults to the state's dephasing witness.
    #[arg(long, short = 'w')]
    pub witness: Option<PathBuf>,
    /// Also minimize the trace distance to the incoherent set.
    #[arg(long = "with-e")]
    pub with_e: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    /// Third-order moment gap of the two-qutrit family over `(a, b)`.
    Example1,
    /// Bound comparison over the isotropic family.
    Isotropic,
}

/// `lo,hi,n`: `n` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo,hi,n, got {s:?}"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Grid {
            lo: num(lo)?,
            hi: num(hi)?,
            n: n.parse().map_err(|e| format!("{n:?}: {e}"))?,
        })
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    pub kind: ScanKind,
    /// Grid for `a` (example1).
    #[arg(long, default_value = "0,1,51")]
    pub a: Grid,
    /// Grid for `b` (example1).
    #[arg(long, default_value = "0,0.5,26")]
    pub b: Grid,
    /// Grid for `v` (isotropic).
    #[arg(long, default_value = "0,1,200")]
    pub v: Grid,
    /// CSV destination; stdout when absent, and the summary goes to stderr.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Detect(DetectCommand::Moments(args)) => detect_moments(args),
        Command::Detect(DetectCommand::Witness(args)) => detect_witness(args),
        Command::Bounds(args) => bounds(args),
        Command::Scan(args) => scan(args),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str, family: Family) -> Result<T> {
    value.ok_or_else(|| anyhow!("--{flag} is required for {}", family_name(family)))
}

fn family_name(f: Family) -> String {
    f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn random_dims(args: &GenArgs) -> Result<Vec<usize>> {
    match (&args.dims, args.dim) {
        (Some(d), _) => Ok(d.clone()),
        (None, Some(n)) => Ok(vec![n]),
        (None, None) => bail!("--dim or --dims is required for {}", family_name(args.family)),
    }
}

/// `"01-10"` against dims `[2, 2]` gives the basis indices of `|01>`, `|10>`.
fn parse_pair(text: &str, sig: &DimSignature) -> Result<(usize, usize)> {
    let (u, v) = text
        .split_once('-')
        .ok_or_else(|| anyhow!("pair {text:?} must look like 01-10"))?;
    let index = |s: &str| -> Result<usize> {
        let digits = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| anyhow!("{s:?} is not a digit string"))?;
        if digits.len() != sig.parties() || digits.iter().zip(sig.dims()).any(|(d, n)| d >= n) {
            bail!("{s:?} is not a basis label for dimensions {sig}");
        }
        Ok(sig.index_of(&digits))
    };
    Ok((index(u)?, index(v)?))
}

fn gen(args: GenArgs) -> Result<Outcome> {
    let fam = args.family;
    let family = match fam {
        Family::TwoQutrit => StateFamily::TwoQutrit {
            a: need(args.a, "a", fam)?,
            b: need(args.b, "b", fam)?,
        },
        Family::XState => StateFamily::XState {
            alpha: need(args.alpha, "alpha", fam)?,
            beta: need(args.beta, "beta", fam)?,
        },
        Family::NoisyGhz => StateFamily::NoisyGhz { g: need(args.g, "g", fam)? },
        Family::ThreeQubitX => StateFamily::ThreeQubitX { c: need(args.c, "c", fam)? },
        Family::Isotropic => StateFamily::Isotropic { v: need(args.v, "v", fam)? },
        Family::MaxEntangled => StateFamily::MaxEntangled { d: need(args.d, "d", fam)? },
        Family::Random => StateFamily::Random {
            dims: random_dims(&args)?,
            seed: args.seed,
        },
        Family::RandomDiagonal => StateFamily::RandomDiagonal {
            dims: random_dims(&args)?,
            seed: args.seed,
        },
        Family::Transition => {
            let sig = DimSignature::new(args.dims.clone().context("--dims is required for transition")?)?;
            if args.pairs.is_empty() {
                bail!("--pairs is required for transition");
            }
            let pairs = args
                .pairs
                .iter()
                .map(|p| parse_pair(p, &sig))
                .collect::<Result<Vec<_>>>()?;
            let w = Witness::transitions(sig, &pairs)?;
            return write_file(MatrixFile::from_witness(&w, args.name), args.out.as_deref());
        }
    };
    let rho = make_state(&family)?;
    let file = if args.witness {
        MatrixFile::from_witness(&Witness::dephasing(&rho), args.name)
    } else {
        MatrixFile::from_state(&rho)
    };
    write_file(file, args.out.as_deref())
}

fn write_file(file: MatrixFile, out: Option<&Path>) -> Result<Outcome> {
    emit(&file.to_json(), out)?;
    Ok(Outcome::Detected)
}

fn detect_moments(args: MomentsArgs) -> Result<Outcome> {
    let rho = load_state(&args.state)?;
    let cut = match &args.cut {
        Some(text) => Cut::parse(text)?,
        None => match rho.sig().dims() {
            &[m, n] => Cut::b(m, n)?,
            dims => bail!("state has {} subsystems; pass --cut MxN", dims.len()),
        },
    };
    if cut.order() != rho.dim() {
        bail!("cut {} does not match a state of dimension {}", cut.sig(), rho.dim());
    }
    let r = moment_report(&rho, &cut, args.kmax, args.tol)?;
    let env = Envelope::new(
        "detect moments",
        json!({
            "state": args.state,
            "dims": rho.sig().dims(),
            "cut": cut.sig().to_string(),
            "kmax": args.kmax,
            "tol": args.tol,
        }),
        report::moments(&r),
    );
    emit(&env.to_json(), args.out.as_deref())?;
    Ok(Outcome::from_detected(r.verdict.is_coherent()))
}

fn detect_witness(args: WitnessArgs) -> Result<Outcome> {
    let rho = load_state(&args.state)?;
    let witnesses = args
        .witnesses
        .iter()
        .map(|p| load_witness(p))
        .collect::<Result<Vec<_>>>()?;
    for (name, w) in &witnesses {
        validate(w, 100, args.seed).with_context(|| format!("witness {name} fails its convention"))?;
    }
    let names: Vec<&str> = witnesses.iter().map(|(n, _)| n.as_str()).collect();
    let inputs = json!({
        "state": args.state,
        "dims": rho.sig().dims(),
        "witnesses": args.witnesses,
        "names": names,
        "wiring": args.wiring,
        "copies": args.copies,
        "cascade": args.cascade,
        "tol": args.tol,
    });

    let (outputs, detected) = if let Some(text) = &args.wiring {
        let wiring = Wiring::parse(text, &witnesses, args.copies)?;
        let value = nonlinear_expectation(&wiring, &rho)?;
        let detected = wiring.convention().detects(value, args.tol);
        (
            json!({
                "mode": "wiring",
                "copies": wiring.copies(),
                "wiring": wiring.to_string(),
                "value": value,
                "detected": detected,
            }),
            detected,
        )
    } else {
        let r = cascade(&witnesses, &rho, args.cascade.unwrap_or(3), args.tol)?;
        let mut out = report::cascade(&r);
        out["mode"] = json!("cascade");
        (out, r.detected())
    };
    let env = Envelope::new("detect witness", inputs, outputs).with_seed(args.seed);
    emit(&env.to_json(), args.out.as_deref())?;
    Ok(Outcome::from_detected(detected))
}

fn bounds(args: BoundsArgs) -> Result<Outcome> {
    let rho = load_state(&args.state)?;
    let (name, w) = match &args.witness {
        Some(p) => load_witness(p)?,
        None => ("dephasing".to_string(), Witness::dephasing(&rho)),
    };
    let opts = TraceDistanceOptions::default();
    let r = bounds_report(&w, &rho, args.with_e.then_some(&opts))?;
    let env = Envelope::new(
        "bounds",
        json!({
            "state": args.state,
            "dims": rho.sig().dims(),
            "witness": args.witness,
            "witness_name": name,
            "with_e": args.with_e,
        }),
        report::bounds(&r),
    )
    .with_flags(report::bound_flags(&r));
    emit(&env.to_json(), args.out.as_deref())?;
    Ok(Outcome::Detected)
}

fn scan(args: ScanArgs) -> Result<Outcome> {
    let (csv, inputs, outputs) = match args.kind {
        ScanKind::Example1 => {
            let points = scan_two_qutrit(&args.a.points(), &args.b.points())?;
            let zero = points.iter().filter(|p| p.gap.abs() < 1e-12).count();
            let min_nonzero = points
                .iter()
                .map(|p| p.gap.abs())
                .filter(|g| *g >= 1e-12)
                .fold(None, |m: Option<f64>, g| Some(m.map_or(g, |m| m.min(g))));
            (
                report::gap_csv(&points),
                json!({"kind": "example1", "a": [args.a.lo, args.a.hi, args.a.n], "b": [args.b.lo, args.b.hi, args.b.n]}),
                json!({"rows": points.len(), "zero_gap_rows": zero, "min_nonzero_gap": min_nonzero}),
            )
        }
        ScanKind::Isotropic => {
            let rows = scan_isotropic(&args.v.points())?;
            let excess = |lr: Option<f64>, l1: Option<f64>| Some(lr? - l1?.abs());
            let bracket = rows.windows(2).find_map(|w| {
                let (d0, d1) = (excess(w[0].l_r, w[0].l1)?, excess(w[1].l_r, w[1].l1)?);
                (d0.signum() != d1.signum()).then_some((w[0].v, w[1].v))
            });
            let refined = bracket
                .map(|(lo, hi)| {
                    let side = |v: f64, pick: fn(&coherence::bounds::IsotropicRow) -> Option<f64>| {
                        isotropic_row(v).ok().and_then(|r| pick(&r)).unwrap_or(f64::NAN)
                    };
                    crossing(lo, hi, |v| side(v, |r| r.l_r), |v| side(v, |r| r.l1.map(f64::abs)))
                })
                .transpose()?;
            (
                report::isotropic_csv(&rows),
                json!({"kind": "isotropic", "v": [args.v.lo, args.v.hi, args.v.n]}),
                json!({
                    "rows": rows.len(),
                    "degenerate_rows": rows.iter().filter(|r| r.l1.is_none()).count(),
                    "lr_vs_abs_l1_bracket": bracket.map(|(a, b)| [a, b]),
                    "lr_vs_abs_l1_crossing": refined,
                }),
            )
        }
    };
    let env = Envelope::new("scan", inputs, outputs);
    match &args.out {
        Some(path) => {
            emit(&csv, Some(path))?;
            print!("{}", env.to_json());
        }
        None => {
            print!("{csv}");
            eprint!("{}", env.to_json());
        }
    }
    Ok(Outcome::Detected)
}
