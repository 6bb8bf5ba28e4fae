//! Command-line front end: JSON system files in, JSON/CSV/PNM out.
//!
//! Exit codes: 0 on success, 1 on domain failures (validation, no certified root,
//! mismatched oracle), 2 on usage errors and unreadable input.

use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, RootEvidence};
use crate::ifs::{check_mask_point, format_rational, parse_rational, rational_str};
use crate::kneading::{conjugate_from_entropy, entropy, replay_critical, EntropyOptions, RootOptions};
use crate::picture::{warp_image, Raster};
use crate::real::{Float, Precision, Round};
use crate::symbolic::{count_words, counts_csv, critical_itineraries, itinerary, oracle, sample_points, Itinerary};
use crate::transform::{check_homeomorphism, compare_critical, fractal_transform, HomeoVerdict};
use crate::{MaskedSystem, MonotoneMap, OverlappingIfs, Rational, Variant};

/// On-disk description of a masked system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    pub maps: [MonotoneMap; 2],
    #[serde(with = "rational_str")]
    pub q: Rational,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SystemFile {
    pub fn ifs(&self) -> OverlappingIfs {
        OverlappingIfs::new_unchecked(self.maps[0].clone(), self.maps[1].clone())
    }

    pub fn read(path: &Path) -> crate::Result<SystemFile> {
        let text = at_path(path, fs::read_to_string(path))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn masked(&self) -> crate::Result<MaskedSystem> {
        MaskedSystem::new(self.ifs(), self.q.clone(), self.variant)
    }
}

/// Prefixes an I/O error with the path it concerns.
fn at_path<T>(path: &Path, r: std::io::Result<T>) -> crate::Result<T> {
    r.map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

const ROOT_CAVEAT: &str = "no certified sign change of the kneading series was found; for \
non-uniform maps the truncated series may not resolve the smallest root, so this is not \
evidence of zero entropy";

const AGREE_CAVEAT: &str = "the critical itineraries agree on the compared prefix only; equality \
of infinite itineraries is semi-decidable, so this is necessary evidence for a homeomorphism, \
not a proof";

#[derive(Parser, Debug)]
#[command(name = "ifsdyn", version, about = "Dynamics of overlapping two-map IFS on [0,1]")]
struct Cli {
    /// Seed for randomized sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SystemArg {
    /// JSON system file
    system: PathBuf,
    /// Override the mask point, as "num/den"
    #[arg(long)]
    q: Option<String>,
}

#[derive(Args, Debug)]
struct RootArgs {
    /// Critical itinerary depth
    #[arg(long, default_value_t = 256)]
    depth: usize,
    /// Root scan grid points
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    /// Bracket refinement factor
    #[arg(long, default_value_t = 16)]
    refine: usize,
    /// Bisect until the root bracket is at most 2^-TOL_BITS wide
    #[arg(long, default_value_t = 100)]
    tol_bits: u32,
    /// Largest word length index for the counting cross-check
    #[arg(long, default_value_t = 30)]
    cross_check: usize,
}

impl RootArgs {
    fn options(&self) -> EntropyOptions {
        EntropyOptions {
            depth: self.depth,
            tol: Float::pow2(-(self.tol_bits as i64)),
            root: RootOptions { grid: self.grid, refine: self.refine, precision: Precision::from_env() },
            cross_check_n: self.cross_check,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the IFS axioms and the mask point
    Validate(SystemArg),
    /// Addresses of points under the masked system
    Itinerary {
        #[command(flatten)]
        sys: SystemArg,
        /// Point of [0,1]; repeatable
        #[arg(long = "x")]
        x: Vec<String>,
        /// Number of seeded random points
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 256)]
        depth: usize,
    },
    /// Critical itineraries alpha and beta of the mask point
    Critical {
        #[command(flatten)]
        sys: SystemArg,
        #[arg(long, default_value_t = 256)]
        depth: usize,
    },
    /// Entropy from the smallest kneading root
    Entropy {
        #[command(flatten)]
        sys: SystemArg,
        #[command(flatten)]
        root: RootArgs,
    },
    /// The conjugate uniform system
    Conjugate {
        #[command(flatten)]
        sys: SystemArg,
        #[command(flatten)]
        root: RootArgs,
        /// Symbols to replay against the critical itineraries
        #[arg(long, default_value_t = 64)]
        replay: usize,
        /// Write an exact rational conjugate as a system file
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Admissible word counts as CSV
    Count {
        #[command(flatten)]
        sys: SystemArg,
        #[arg(long, default_value_t = 30)]
        max_len: usize,
        /// Add a brute-force column and fail on any difference
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 256)]
        depth: usize,
    },
    /// Enclosures of h = pi_G(tau_F(x))
    Transform {
        /// System file for F
        from: PathBuf,
        /// System file for G
        to: PathBuf,
        /// Point of [0,1]; repeatable
        #[arg(long = "x")]
        x: Vec<String>,
        /// Evaluate on i/(N-1) for i < N instead
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 48)]
        depth: usize,
    },
    /// Compare critical itineraries of two systems
    CheckHomeo {
        /// System file for F
        from: PathBuf,
        /// System file for G
        to: PathBuf,
        #[arg(long, default_value_t = 256)]
        depth: usize,
    },
    /// Pull a PGM/PPM image back through a fractal homeomorphism
    Warp {
        /// P5 or P6 raster with maximal value 255
        input: PathBuf,
        /// Source system for the x axis
        #[arg(long)]
        fx: PathBuf,
        /// Target system for the x axis
        #[arg(long)]
        gx: PathBuf,
        /// Source system for the y axis; y is left alone without it
        #[arg(long, requires = "gy")]
        fy: Option<PathBuf>,
        /// Target system for the y axis
        #[arg(long, requires = "fy")]
        gy: Option<PathBuf>,
        #[arg(long, default_value_t = 48)]
        depth: usize,
        /// Output raster, same format as the input
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Json(_) | Error::Parse(_) => 2,
            _ => 1,
        };
        let message = match &e {
            Error::NoRootFound(ev) => no_root_message(ev),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn no_root_message(ev: &RootEvidence) -> String {
    let evidence = json!({
        "grid_points": ev.grid_points,
        "certified_positive": ev.certified_positive,
        "undecided": ev.undecided,
        "last_positive": ev.last_positive,
        "min_lower_bound": if ev.min_lower_bound.is_finite() { json!(ev.min_lower_bound) } else { Value::Null },
    });
    format!("no certified kneading root\nevidence: {evidence}\nnote: {ROOT_CAVEAT}")
}

/// Parses `argv` (program name first), runs the command, and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(arg: &SystemArg) -> Result<(SystemFile, MaskedSystem), Failure> {
    let mut file = SystemFile::read(&arg.system)?;
    if let Some(q) = &arg.q {
        file.q = parse_rational(q).map_err(|e| usage(e.to_string()))?;
    }
    let sys = masked_or_report(&file)?;
    Ok((file, sys))
}

fn load_path(path: &Path) -> Result<MaskedSystem, Failure> {
    masked_or_report(&SystemFile::read(path)?)
}

fn masked_or_report(file: &SystemFile) -> Result<MaskedSystem, Failure> {
    let ifs = file.ifs();
    let report = ifs.validate();
    if !report.passed() {
        return Err(Failure { code: 1, message: format!("invalid system\n{report}") });
    }
    Ok(file.masked()?)
}

fn parse_points(xs: &[String]) -> Result<Vec<Rational>, Failure> {
    xs.iter().map(|x| parse_rational(x).map_err(|e| usage(e.to_string()))).collect()
}

fn itinerary_json(it: &Itinerary) -> Value {
    json!({ "word": it.prefix.to_string(), "period": it.period })
}

fn decimal(x: &Float, dir: Round) -> String {
    x.to_decimal(40, dir)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(arg) => {
            let mut file = SystemFile::read(&arg.system)?;
            if let Some(q) = &arg.q {
                file.q = parse_rational(q).map_err(|e| usage(e.to_string()))?;
            }
            let ifs = file.ifs();
            let report = ifs.validate();
            writeln!(out, "{report}")?;
            let mask = match check_mask_point(&ifs, &file.q) {
                Ok(()) => Ok(()),
                Err(e) => Err(e.to_string()),
            };
            match &mask {
                Ok(()) => writeln!(out, "PASS MaskPoint: q = {}", format_rational(&file.q))?,
                Err(e) => writeln!(out, "FAIL MaskPoint: {e}")?,
            }
            if !report.passed() || mask.is_err() {
                return Err(Failure { code: 1, message: "validation failed".into() });
            }
        }
        Command::Itinerary { sys, x, random, depth } => {
            let (_, ms) = load(&sys)?;
            let mut points = parse_points(&x)?;
            if let Some(n) = random {
                points.extend(sample_points(cli.seed, n));
            }
            if points.is_empty() {
                return Err(usage("give --x or --random"));
            }
            for p in points {
                let it = itinerary(&ms, &p, depth)?;
                let mut v = itinerary_json(&it);
                v["x"] = json!(format_rational(&p));
                v["variant"] = json!(ms.variant);
                v["depth"] = json!(depth);
                writeln!(out, "{v}")?;
            }
        }
        Command::Critical { sys, depth } => {
            let (_, ms) = load(&sys)?;
            let crit = critical_itineraries(&ms.ifs, &ms.q, depth)?;
            let v = json!({
                "q": format_rational(&ms.q),
                "depth": depth,
                "alpha": itinerary_json(&crit.alpha),
                "beta": itinerary_json(&crit.beta),
            });
            writeln!(out, "{v}")?;
        }
        Command::Entropy { sys, root } => {
            let (file, ms) = load(&sys)?;
            let res = entropy(&ms.ifs, &ms.q, &root.options())?;
            let p_mid = res.p.mid();
            let mut v = json!({
                "label": file.label,
                "q": format_rational(&ms.q),
                "depth": res.crit.depth,
                "precision_bits": root.options().root.precision.bits(),
                "r_lo": decimal(&res.root.lo, Round::Down),
                "r_hi": decimal(&res.root.hi, Round::Up),
                "r_exact": res.root.exact.as_ref().map(format_rational),
                "entropy": res.entropy,
                "entropy_lo": res.entropy_bounds.0,
                "entropy_hi": res.entropy_bounds.1,
                "p": p_mid.to_decimal(30, Round::Nearest),
                "p_lo": decimal(&res.p.lo, Round::Down),
                "p_hi": decimal(&res.p.hi, Round::Up),
                "certified": res.root.certified,
                "exact_periodic": res.root.exact_periodic,
                "equal_ratio": res.equal_ratio,
                "guaranteed": res.guaranteed,
                "cross_check": res.cross_check,
            });
            if !res.guaranteed {
                v["caveat"] = json!(
                    "root certified for the truncated series only; for non-uniform maps the \
                     entropy identity is not guaranteed without a periodic critical orbit"
                );
            }
            writeln!(out, "{v}")?;
        }
        Command::Conjugate { sys, root, replay, output } => {
            let (file, ms) = load(&sys)?;
            let opts = root.options();
            let res = entropy(&ms.ifs, &ms.q, &opts)?;
            let u = conjugate_from_entropy(&res)?;
            let rep = replay_critical(&u, &res.crit, replay, opts.root.precision);
            let mut v = json!({
                "a_lo": decimal(&u.a.lo, Round::Down),
                "a_hi": decimal(&u.a.hi, Round::Up),
                "p_lo": decimal(&u.p.lo, Round::Down),
                "p_hi": decimal(&u.p.hi, Round::Up),
                "guaranteed": res.guaranteed,
                "replay": { "symbols": replay, "alpha": rep.alpha, "beta": rep.beta },
            });
            if let Some(path) = output {
                let g = u.rational_system(ms.variant)?;
                // the rational representative tracks the conjugate only to finite depth
                let verdict = compare_critical(&res.crit, &critical_itineraries(&g.ifs, &g.q, res.crit.depth)?);
                let label = file.label.as_deref().unwrap_or("system");
                let sf = SystemFile {
                    maps: [g.ifs.f0.clone(), g.ifs.f1.clone()],
                    q: g.q.clone(),
                    variant: g.variant,
                    label: Some(format!("uniform conjugate of {label}")),
                };
                at_path(&path, fs::write(&path, serde_json::to_string_pretty(&sf).expect("serializable") + "\n"))?;
                v["written"] = json!({ "path": path.display().to_string(), "critical": verdict });
            }
            writeln!(out, "{v}")?;
        }
        Command::Count { sys, max_len, oracle: with_oracle, depth } => {
            let (_, ms) = load(&sys)?;
            if with_oracle && max_len > oracle::MAX_BRUTE_FORCE_N {
                return Err(usage(format!("--oracle supports --max-len up to {}", oracle::MAX_BRUTE_FORCE_N)));
            }
            let crit = critical_itineraries(&ms.ifs, &ms.q, depth.max(max_len + 1))?;
            let counts = count_words(&crit, max_len)?;
            let csv = counts_csv(&counts);
            if !with_oracle {
                write!(out, "{csv}")?;
                return Ok(());
            }
            let brute = oracle::brute_force_counts(&crit, max_len)?;
            let mut lines = csv.lines();
            writeln!(out, "{},oracle_count", lines.next().unwrap_or_default())?;
            for (line, b) in lines.zip(&brute) {
                writeln!(out, "{line},{b}")?;
            }
            if brute != counts {
                return Err(Failure { code: 1, message: "enumeration differs from the brute-force oracle".into() });
            }
        }
        Command::Transform { from, to, x, grid, depth } => {
            let f = load_path(&from)?;
            let g = load_path(&to)?;
            let mut points = parse_points(&x)?;
            if let Some(n) = grid {
                if n < 2 {
                    return Err(usage("--grid needs at least 2 points"));
                }
                let d = (n - 1) as i64;
                points.extend((0..n as i64).map(|i| Rational::new(i.into(), d.into())));
            }
            if points.is_empty() {
                return Err(usage("give --x or --grid"));
            }
            for p in points {
                let e = fractal_transform(&f, &g, &p, depth)?;
                let v = json!({
                    "x": format_rational(&p),
                    "lo": format_rational(&e.lo),
                    "hi": format_rational(&e.hi),
                    "depth": depth,
                });
                writeln!(out, "{v}")?;
            }
        }
        Command::CheckHomeo { from, to, depth } => {
            let f = load_path(&from)?;
            let g = load_path(&to)?;
            let verdict = check_homeomorphism(&f, &g, depth)?;
            let mut v = serde_json::to_value(verdict).expect("serializable");
            v["compared_depth"] = json!(depth);
            if let HomeoVerdict::AgreeToDepth { .. } = verdict {
                v["caveat"] = json!(AGREE_CAVEAT);
            }
            writeln!(out, "{v}")?;
        }
        Command::Warp { input, fx, gx, fy, gy, depth, output } => {
            let fx = load_path(&fx)?;
            let gx = load_path(&gx)?;
            let y = match (fy, gy) {
                (Some(fy), Some(gy)) => Some((load_path(&fy)?, load_path(&gy)?)),
                _ => None,
            };
            let img = Raster::read_pnm(BufReader::new(at_path(&input, fs::File::open(&input))?))?;
            let warped = warp_image(&img, (&fx, &gx), y.as_ref().map(|(a, b)| (a, b)), depth)?;
            warped.write_pnm(std::io::BufWriter::new(at_path(&output, fs::File::create(&output))?))?;
            writeln!(out, "{}", json!({ "width": warped.width, "height": warped.height, "depth": depth }))?;
        }
    }
    Ok(())
}
