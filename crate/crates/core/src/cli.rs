//! Command-line front end. Every command renders a JSON or CSV document;
//! complex numbers are written as [re, im].

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::acceptance::{criteria, Check};
use crate::asymptotics::{
    series_product_derivative, series_tau, series_trace_dgd, series_trace_diff, series_trace_g2, GeneralizedSeries,
    K_MAX,
};
use crate::error::{Error, Result};
use crate::operator_model::{negative_eigenvalues, positive_eigenvalues, rho, secular_f, Coupling, Extension};
use crate::resolvent::{tau, trace_dgd, trace_diff, trace_g2};
use crate::second_order::{predicted_pole_locations, second_order_eigenvalues, SecondOrderSpectrum};
use crate::special_functions::bessel_zeros;
use crate::spectral_zeta::{
    eta, eta_poles, poles_plus, poles_plus_displayed, zeta_full, zeta_full_poles, zeta_plus,
    ContinuationConfig, Method, PoleEntry, PoleSource, PoleTable, ZetaEvaluation,
};

type C = Complex64;

#[derive(Parser, Debug, Clone)]
#[command(name = "spectral", version, about = "Spectra, resolvent traces and ζ/η functions of a singular first-order operator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; tables default to CSV, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct ExtArgs {
    /// Coupling g, |g| ≤ 0.49.
    #[arg(long, default_value_t = 1.0 / 3.0, allow_hyphen_values = true)]
    pub g: f64,
    /// Boundary parameter α (normalized together with β).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Boundary parameter β.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
}

impl ExtArgs {
    fn parse(&self) -> Result<(Extension, Coupling)> {
        Ok((Extension::new(self.alpha, self.beta)?, Coupling::new(self.g)?))
    }
}

#[derive(Args, Debug, Clone)]
pub struct ContArgs {
    /// Truncation order N of the subtracted asymptotic series.
    #[arg(long = "order", default_value_t = 6)]
    pub order: usize,
    #[arg(long, default_value_t = 1e4)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub quad_tol: f64,
    /// Number of eigenvalues summed explicitly before the asymptotic tail.
    #[arg(long, default_value_t = 100_000)]
    pub n_eigs: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Continuation)]
    pub method: MethodArg,
}

impl ContArgs {
    fn config(&self) -> Result<ContinuationConfig> {
        if self.order > K_MAX {
            return Err(Error::Config(format!("order {} exceeds {K_MAX}", self.order)));
        }
        let cfg =
            ContinuationConfig { order: self.order, mu_max: self.mu_max, quad_tol: self.quad_tol, n_eigs: self.n_eigs };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Sum,
    Continuation,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Sum => Method::Sum,
            MethodArg::Continuation => Method::Continuation,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaPart {
    /// ζ₊ over the positive eigenvalues.
    Plus,
    /// ζ₊(s) + e^{−iπs} ζ₋(s).
    Full,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleFunction {
    Plus,
    Full,
    Eta,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchArg {
    Upper,
    Lower,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Eigenvalue table with sign-change brackets.
    Spectrum {
        #[command(flatten)]
        ext: ExtArgs,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Side::Positive)]
        side: Side,
    },
    /// Tr ∂_λG_D, Tr(G_D − G_N), τ and Tr G² at the given λ.
    Traces {
        #[command(flatten)]
        ext: ExtArgs,
        /// Spectral parameter as `re`, `re,im` or `re+imi`; repeatable.
        #[arg(long = "lambda", required = true, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Vec<C>,
    },
    /// Large-|λ| series term tables on one ray.
    Asymptotics {
        #[command(flatten)]
        ext: ExtArgs,
        /// Truncation order.
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, value_enum, default_value_t = BranchArg::Upper)]
        branch: BranchArg,
    },
    /// ζ-function values.
    Zeta {
        #[command(flatten)]
        ext: ExtArgs,
        #[command(flatten)]
        cont: ContArgs,
        #[arg(long, required = true, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Vec<C>,
        #[arg(long, value_enum, default_value_t = ZetaPart::Full)]
        part: ZetaPart,
    },
    /// η-function values.
    Eta {
        #[command(flatten)]
        ext: ExtArgs,
        #[command(flatten)]
        cont: ContArgs,
        #[arg(long, required = true, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Vec<C>,
    },
    /// Pole and residue table.
    Poles {
        #[command(flatten)]
        ext: ExtArgs,
        /// Number of terms k in each pole family.
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, value_enum, default_value_t = PoleFunction::Plus)]
        function: PoleFunction,
        /// Anomalous residues from the literal closed form, which carries
        /// the opposite sign to contour integration (ζ₊ only).
        #[arg(long)]
        literal: bool,
    },
    /// Second-order operator: eigenvalues and predicted pole locations.
    SecondOrder {
        #[command(flatten)]
        ext: ExtArgs,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Number of predicted pole locations.
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Samples of F(λ) on (0, j_{g−1/2,4}) with the horizontal line ρ.
    Figure1 {
        #[arg(long, default_value_t = 1.0 / 3.0, allow_hyphen_values = true)]
        g: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Samples with |F| above this value are dropped, leaving a gap at
        /// each vertical asymptote.
        #[arg(long, default_value_t = 50.0)]
        clip: f64,
    },
    /// Runs the acceptance suite, one line per check.
    Verify {
        /// Restrict to one criterion number.
        #[arg(long)]
        criterion: Option<usize>,
    },
}

/// Parses `x`, `x,y` or `x±yi`.
pub fn parse_complex(s: &str) -> std::result::Result<C, String> {
    let t = s.trim().replace(' ', "");
    let bad = || format!("cannot parse '{s}' as a complex number");
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let cut = (1..bytes.len())
            .rev()
            .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
        let (re, im) = match cut {
            Some(j) => (&body[..j], &body[j..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        return Ok(C::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    Ok(C::new(t.parse().map_err(|_| bad())?, 0.0))
}

/// Rounds to 15 significant digits.
fn sig15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

#[derive(Serialize)]
struct PoleRow {
    location: f64,
    residue: C,
    source: PoleSource,
    k: usize,
}

impl From<&PoleEntry> for PoleRow {
    fn from(p: &PoleEntry) -> PoleRow {
        let location = if p.location.fract() == 0.0 { p.location } else { sig15(p.location) };
        PoleRow { location, residue: p.residue, source: p.source, k: p.k }
    }
}

#[derive(Serialize)]
struct PoleDoc {
    g: f64,
    alpha: f64,
    beta: f64,
    rho: Option<f64>,
    function: &'static str,
    poles: Vec<PoleRow>,
    collisions: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct ZetaRow {
    g: f64,
    alpha: f64,
    beta: f64,
    rho: Option<f64>,
    method: Method,
    s: C,
    value: C,
    error_estimate: f64,
}

#[derive(Serialize)]
struct SpectrumRow {
    side: &'static str,
    n: usize,
    lambda: f64,
    bracket_lo: f64,
    bracket_hi: f64,
}

#[derive(Serialize)]
struct SpectrumDoc {
    g: f64,
    alpha: f64,
    beta: f64,
    rho: Option<f64>,
    has_zero_mode: bool,
    first_interval_root: bool,
    eigenvalues: Vec<SpectrumRow>,
}

#[derive(Serialize)]
struct TraceRow {
    lambda: C,
    trace_dgd: C,
    trace_diff: C,
    tau: C,
    trace_g2: C,
}

#[derive(Serialize)]
struct TermRow {
    series: String,
    exponent: String,
    power: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SecondOrderDoc {
    #[serde(flatten)]
    spectrum: SecondOrderSpectrum,
    predicted_pole_locations: Vec<f64>,
}

#[derive(Serialize)]
struct FigureRow {
    lambda: f64,
    f: f64,
    rho: f64,
    /// Index of the branch between consecutive asymptotes.
    segment: usize,
}

/// A rendered document plus the exit code it should produce.
pub struct Output {
    pub text: String,
    pub code: i32,
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Structural(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Structural(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Structural(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Structural(e.to_string()))
}

/// CSV cannot hold nested arrays, so complex fields become `_re`/`_im` columns.
fn csv_flat(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Structural(e.to_string()))?;
    for r in rows {
        w.write_record(r.iter().map(|x| x.to_string())).map_err(|e| Error::Structural(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Structural(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Structural(e.to_string()))
}

fn rho_of(ext: &Extension, g: Coupling) -> Option<f64> {
    rho(ext, g).ok()
}

fn pole_doc(ext: &Extension, g: Coupling, t: &PoleTable, function: &'static str) -> PoleDoc {
    PoleDoc {
        g: g.value(),
        alpha: ext.alpha(),
        beta: ext.beta(),
        rho: rho_of(ext, g),
        function,
        poles: t.entries.iter().map(PoleRow::from).collect(),
        collisions: t.collisions.iter().map(|&(a, b)| (sig15(a), sig15(b))).collect(),
    }
}

fn render_checks(checks: &[Check], fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => json(&checks),
        Format::Csv => csv_rows(checks),
    }
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<Output> {
    let ok = |text| Ok(Output { text, code: 0 });
    match &cli.command {
        Command::Spectrum { ext, n, side } => {
            let (e, g) = ext.parse()?;
            let mut rows = Vec::new();
            let pos = positive_eigenvalues(&e, g, *n)?;
            if *side != Side::Positive {
                let neg = negative_eigenvalues(&e, g, *n)?;
                for (i, (v, b)) in neg.positive.iter().zip(&neg.brackets).enumerate().rev() {
                    rows.push(SpectrumRow { side: "negative", n: i + 1, lambda: -v, bracket_lo: -b.1, bracket_hi: -b.0 });
                }
            }
            if *side != Side::Negative {
                for (i, (v, b)) in pos.positive.iter().zip(&pos.brackets).enumerate() {
                    rows.push(SpectrumRow { side: "positive", n: i + 1, lambda: *v, bracket_lo: b.0, bracket_hi: b.1 });
                }
            }
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => ok(csv_rows(&rows)?),
                Format::Json => ok(json(&SpectrumDoc {
                    g: g.value(),
                    alpha: e.alpha(),
                    beta: e.beta(),
                    rho: rho_of(&e, g),
                    has_zero_mode: pos.has_zero_mode,
                    first_interval_root: pos.first_interval_root,
                    eigenvalues: rows,
                })?),
            }
        }
        Command::Traces { ext, lambda } => {
            let (e, g) = ext.parse()?;
            let gv = g.value();
            let rows = lambda
                .iter()
                .map(|&l| {
                    Ok(TraceRow {
                        lambda: l,
                        trace_dgd: trace_dgd(l, gv)?,
                        trace_diff: trace_diff(l, gv)?,
                        tau: tau(l, &e, gv)?,
                        trace_g2: trace_g2(l, &e, gv)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => ok(json(&rows)?),
                Format::Csv => {
                    let flat: Vec<Vec<f64>> = rows
                        .iter()
                        .map(|r| {
                            [r.lambda, r.trace_dgd, r.trace_diff, r.tau, r.trace_g2].iter().flat_map(|z| [z.re, z.im]).collect()
                        })
                        .collect();
                    let h = [
                        "lambda_re", "lambda_im", "trace_dgd_re", "trace_dgd_im", "trace_diff_re", "trace_diff_im",
                        "tau_re", "tau_im", "trace_g2_re", "trace_g2_im",
                    ];
                    ok(csv_flat(&h, &flat)?)
                }
            }
        }
        Command::Asymptotics { ext, k, branch } => {
            let (e, g) = ext.parse()?;
            let gv = g.value();
            let sigma = if *branch == BranchArg::Upper { 1.0 } else { -1.0 };
            let series: Vec<(&str, GeneralizedSeries)> = vec![
                ("trace_dgd", series_trace_dgd(gv, sigma, *k)?),
                ("trace_diff", series_trace_diff(gv, sigma)),
                ("tau", series_tau(gv, &e, sigma, *k)?),
                ("product_derivative", series_product_derivative(gv, &e, sigma, *k)?),
                ("trace_g2", series_trace_g2(gv, &e, sigma, *k)?),
            ];
            let rows: Vec<TermRow> = series
                .iter()
                .flat_map(|(name, s)| {
                    s.terms.iter().map(move |t| TermRow {
                        series: name.to_string(),
                        exponent: t.exponent.to_string(),
                        power: t.power,
                        re: t.coeff.re,
                        im: t.coeff.im,
                    })
                })
                .collect();
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => ok(json(&rows)?),
                Format::Csv => ok(csv_rows(&rows)?),
            }
        }
        Command::Zeta { ext, cont, s, part } => {
            let (e, g) = ext.parse()?;
            let cfg = cont.config()?;
            let m = Method::from(cont.method);
            zeta_rows(cli, &e, g, s, |s| match part {
                ZetaPart::Plus => zeta_plus(&e, g.value(), s, &cfg, m),
                ZetaPart::Full => zeta_full(&e, g.value(), s, &cfg, m),
            })
        }
        Command::Eta { ext, cont, s } => {
            let (e, g) = ext.parse()?;
            let cfg = cont.config()?;
            let m = Method::from(cont.method);
            zeta_rows(cli, &e, g, s, |s| eta(&e, g.value(), s, &cfg, m))
        }
        Command::Poles { ext, k, function, literal } => {
            let (e, g) = ext.parse()?;
            let gv = g.value();
            if *k == 0 || *k > K_MAX {
                return Err(Error::Config(format!("k must lie in 1..={K_MAX}")));
            }
            let (t, name) = match (function, literal) {
                (PoleFunction::Plus, false) => (poles_plus(&e, gv, *k)?, "zeta_plus"),
                (PoleFunction::Plus, true) => (poles_plus_displayed(&e, gv, *k)?, "zeta_plus"),
                (PoleFunction::Full, false) => (zeta_full_poles(&e, gv, *k)?, "zeta"),
                (PoleFunction::Eta, false) => (eta_poles(&e, gv, *k)?, "eta"),
                (_, true) => return Err(Error::Config("--literal applies to --function plus only".into())),
            };
            let doc = pole_doc(&e, g, &t, name);
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => ok(json(&doc)?),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let wr = |e: csv::Error| Error::Structural(e.to_string());
                    w.write_record(["location", "residue_re", "residue_im", "source", "k"]).map_err(wr)?;
                    for p in &doc.poles {
                        let src = serde_json::to_value(p.source).map_err(|e| Error::Structural(e.to_string()))?;
                        w.write_record([
                            p.location.to_string(),
                            p.residue.re.to_string(),
                            p.residue.im.to_string(),
                            src.as_str().unwrap_or_default().to_string(),
                            p.k.to_string(),
                        ])
                        .map_err(wr)?;
                    }
                    let b = w.into_inner().map_err(|e| Error::Structural(e.to_string()))?;
                    ok(String::from_utf8(b).map_err(|e| Error::Structural(e.to_string()))?)
                }
            }
        }
        Command::SecondOrder { ext, n, k } => {
            let (e, g) = ext.parse()?;
            let doc = SecondOrderDoc {
                spectrum: second_order_eigenvalues(&e, g, *n)?,
                predicted_pole_locations: predicted_pole_locations(g.value(), *k).into_iter().map(sig15).collect(),
            };
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => ok(json(&doc)?),
                Format::Csv => {
                    let rows: Vec<Vec<f64>> = doc
                        .spectrum
                        .mu
                        .iter()
                        .zip(&doc.spectrum.eigenvalues)
                        .enumerate()
                        .map(|(i, (m, l))| vec![(i + 1) as f64, *m, *l])
                        .collect();
                    ok(csv_flat(&["n", "mu", "eigenvalue"], &rows)?)
                }
            }
        }
        Command::Figure1 { g, rho, samples, clip } => {
            let g = Coupling::new(*g)?;
            if *samples < 2 || !(*clip > 0.0) || !rho.is_finite() {
                return Err(Error::Config("need samples ≥ 2, clip > 0 and finite ρ".into()));
            }
            let z = bessel_zeros(g.nu2(), 4)?;
            let top = z[3];
            let mut rows = Vec::new();
            for i in 1..*samples {
                let l = top * i as f64 / *samples as f64;
                let segment = z.iter().take_while(|&&j| j < l).count();
                match secular_f(l, g) {
                    Ok(f) if f.abs() <= *clip => rows.push(FigureRow { lambda: l, f, rho: *rho, segment }),
                    Ok(_) | Err(Error::Pole(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => ok(csv_rows(&rows)?),
                Format::Json => ok(json(&rows)?),
            }
        }
        Command::Verify { criterion } => {
            let mut checks = Vec::new();
            let mut text = String::new();
            for (num, title, f) in criteria() {
                if criterion.is_some_and(|c| c != num) {
                    continue;
                }
                let cs = f();
                if cli.format.is_none() {
                    let _ = writeln!(text, "# {num}. {title}");
                    for c in &cs {
                        let _ = writeln!(text, "{}", c.line());
                    }
                }
                checks.extend(cs);
            }
            if checks.is_empty() {
                return Err(Error::Config("no such criterion".into()));
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            match cli.format {
                None => {
                    let _ = writeln!(text, "{} of {} checks passed", checks.len() - failed, checks.len());
                }
                Some(f) => text = render_checks(&checks, f)?,
            }
            Ok(Output { text, code: if failed == 0 { 0 } else { 2 } })
        }
    }
}

fn zeta_rows<F>(cli: &Cli, e: &Extension, g: Coupling, s: &[C], f: F) -> Result<Output>
where
    F: Fn(C) -> Result<ZetaEvaluation>,
{
    let rows = s
        .iter()
        .map(|&s| {
            let v = f(s)?;
            Ok(ZetaRow {
                g: g.value(),
                alpha: e.alpha(),
                beta: e.beta(),
                rho: rho_of(e, g),
                method: v.method,
                s: v.s,
                value: v.value,
                error_estimate: v.error_estimate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let flat: Vec<Vec<f64>> =
                rows.iter().map(|r| vec![r.s.re, r.s.im, r.value.re, r.value.im, r.error_estimate]).collect();
            csv_flat(&["s_re", "s_im", "value_re", "value_im", "error_estimate"], &flat)?
        }
    };
    Ok(Output { text, code: 0 })
}

/// Parses `args`, runs the command and writes its output. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if let Some(p) = &cli.out {
                if let Err(e) = std::fs::write(p, &out.text) {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    return 1;
                }
            } else if let Err(e) = std::io::stdout().write_all(out.text.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: cannot write output: {e}");
                    return 1;
                }
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
