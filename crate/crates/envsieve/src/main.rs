//! Command-line laboratory over the library. Every run prints one
//! versioned JSON report on standard output with its manifest embedded;
//! trend experiments can additionally export CSV for offline plotting.
//! Exit codes: 0 success, 1 failed acceptance or I/O, 2 bad input,
//! 3 violated hypothesis, 4 blown budget.

use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use envsieve::forms::LinearSystem;
use envsieve::report::{self, RunManifest};
use envsieve::spectra::ExtensionSequence;
use envsieve::transfer::CyclicFunction;
use envsieve::{chen, forms, gy, selberg, spectra, suite, transfer, Error, Result};

#[derive(Parser)]
#[command(
    name = "envsieve",
    version,
    about = "Enveloping-sieve laboratory: exact weights, Fourier tables, \
             restriction experiments, dense-model transference, and \
             semiprime-partner scans"
)]
struct Cli {
    /// Pretty-print the JSON report for human reading.
    #[arg(long, global = true)]
    pretty: bool,

    /// Worker threads for data-parallel scans (0 keeps the default pool).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Local densities and singular series of integer linear systems.
    Forms {
        #[command(subcommand)]
        op: FormsOp,
    },
    /// Exact sieve kits, Fourier coefficient tables, and verification.
    Selberg {
        #[command(subcommand)]
        op: SelbergOp,
    },
    /// Truncated-logarithm weights: gaps, distances, moments, forms.
    Gy {
        #[command(subcommand)]
        op: GyOp,
    },
    /// Exponential sums over tuple sets: moments, restriction, extension.
    Spectra {
        #[command(subcommand)]
        op: SpectraOp,
    },
    /// Dense-model decomposition of a majorized function on Z_N.
    Transfer {
        #[command(subcommand)]
        op: TransferOp,
    },
    /// Semiprime-partner records, the W-trick, and progression counts.
    Chen {
        #[command(subcommand)]
        op: ChenOp,
    },
    /// End-to-end acceptance battery.
    Suite {
        #[command(subcommand)]
        op: SuiteOp,
    },
}

#[derive(Subcommand)]
enum FormsOp {
    /// Local density gamma(q) and the admissible residues at one modulus.
    Gamma {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long)]
        q: u64,
    },
    /// Euler product of local densities against (1 - 1/p)^k.
    Singular {
        #[arg(long, default_value = "n(n+2)")]
        form: String,
        /// Largest prime entering the product.
        #[arg(long, default_value_t = 100_000)]
        truncation: u64,
    },
}

#[derive(Subcommand)]
enum SelbergOp {
    /// Build the exact kit: G(R), the weights lambda_d, and the h table.
    Build {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long = "R")]
        r: u64,
    },
    /// Max deviation of the finite Fourier expansion from the envelope.
    Verify {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long = "R", default_value_t = 6)]
        r: u64,
        #[arg(long, default_value_t = 1)]
        lo: i64,
        #[arg(long, default_value_t = 1000)]
        hi: i64,
    },
    /// Full table of Fourier coefficients s(a/q) and w(a/q), q <= R^2.
    Table {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long = "R")]
        r: u64,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GyOp {
    /// G(R) minus its limit shape along a ladder of levels.
    Gaps {
        #[arg(long = "R", value_delimiter = ',', num_args = 1.., default_values_t = [1_000u64, 10_000, 100_000])]
        r: Vec<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Mean |beta' - beta| between the two weight families at N = R^4.
    L1 {
        #[arg(long = "R", value_delimiter = ',', num_args = 1.., default_values_t = [10u64, 30, 100])]
        r: Vec<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Empirical moments of the truncated-log envelope on [1, N].
    Moments {
        #[arg(long = "R")]
        r: u64,
        #[arg(long)]
        n: u64,
        /// 1 for the mean of beta', 2 for the mean of beta'^2.
        #[arg(long, default_value_t = 1)]
        moment: u32,
    },
    /// Quadratic form of a weight family at level R.
    Qform {
        #[arg(long = "R")]
        r: u64,
        #[arg(long, value_enum, default_value_t = Family::Sel)]
        family: Family,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Exact rational weights; the form equals 1/G(R) exactly.
    Sel,
    /// Truncated-log weights; the form trends like 1/log R.
    Gy,
}

#[derive(Subcommand)]
enum SpectraOp {
    /// L^p norm of the tuple exponential sum on an oversampled grid.
    Lpnorm {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        oversample: u64,
    },
    /// Seeded random trials of the restriction inequality.
    Restrict {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long = "R", default_value_t = 15)]
        r: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Exponent in (1, 2).
        #[arg(long, default_value_t = 5.0 / 3.0)]
        q: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Extension functionals of one sequence against the energy side.
    Extend {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long = "R", default_value_t = 15)]
        r: u64,
        #[arg(long)]
        n: u64,
        /// Exponent above 2.
        #[arg(long, default_value_t = 2.5)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Sequence::Sieved)]
        sequence: Sequence,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Mean of the envelope over [1, N], directly and through Fourier.
    Mean {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long = "R")]
        r: u64,
        #[arg(long)]
        n: u64,
    },
    /// Normalized p-th moment of the weighted tuple sum along an N ladder.
    Mainthm {
        #[arg(long, default_value = "n")]
        form: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [10_000u64, 100_000, 1_000_000])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Sequence {
    /// a_n = 0.
    Zero,
    /// Normalized indicator of the sieved tuple set.
    Sieved,
    /// Independent random signs from the seed.
    Random,
}

#[derive(Subcommand)]
enum TransferOp {
    /// Decompose f <= nu on Z_N and count progressions in every component.
    Run {
        /// Modulus for the synthetic input (prime); ignored with --input.
        #[arg(long, required_unless_present = "input")]
        n: Option<u64>,
        /// Density of the synthetic random indicator.
        #[arg(long, default_value_t = 0.6)]
        density: f64,
        #[arg(long, default_value_t = 2026)]
        seed: u64,
        /// Fixed epsilon; omitted means the self-tuning schedule.
        #[arg(long)]
        eps: Option<f64>,
        /// Restriction exponent in (2, 3).
        #[arg(long, default_value_t = 2.5)]
        q: f64,
        /// JSON array of f values; replaces the synthetic input.
        #[arg(long)]
        input: Option<PathBuf>,
        /// JSON array of majorant values; constant 1 when omitted.
        #[arg(long)]
        nu: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ChenOp {
    /// All members up to N with their partner factorizations.
    Scan {
        #[arg(long)]
        upto: u64,
        /// Partner factors f must satisfy f^den > p^num.
        #[arg(long, default_value_t = 3)]
        num: u32,
        #[arg(long, default_value_t = 11)]
        den: u32,
        /// Also write one CSV row per record.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Residue classes mod W = prod(p <= t) avoiding 0 and -2.
    Wtrick {
        #[arg(long)]
        t: f64,
    },
    /// Densest admissible class b in the window [N/4, N/2].
    Select {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: u64,
    },
    /// Count 3-term progressions, directly or through transference.
    Ap3 {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Mode::Direct)]
        mode: Mode,
        /// Sieving cutoff for the transference pipeline.
        #[arg(long, default_value_t = 5.0)]
        t: f64,
    },
    /// Fourier flatness of the W-tricked envelope on Z_N.
    Flatness {
        #[arg(long)]
        t: f64,
        #[arg(long = "R")]
        r: u64,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Midpoint scan over the integer records.
    Direct,
    /// W-trick, majorize on a prime cyclic group, decompose, count.
    Transference,
}

#[derive(Subcommand)]
enum SuiteOp {
    /// Run the acceptance battery; exit 1 if any criterion fails.
    Acceptance {
        /// Comma-separated criterion indices (default: all eleven).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn main() {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match dispatch(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.exit_code());
        }
    }
}

fn emit(pretty: bool, manifest: RunManifest, data: Value) -> Result<()> {
    let rep = report::report(manifest, data);
    let text = if pretty {
        serde_json::to_string_pretty(&rep)
    } else {
        serde_json::to_string(&rep)
    }
    .expect("report serialization is infallible");
    println!("{text}");
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialization is infallible")
}

fn parse_form(s: &str) -> Result<LinearSystem> {
    s.parse()
}

fn read_values(path: &PathBuf) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: expected a JSON array of numbers: {e}", path.display())))
}

fn dispatch(cli: Cli) -> Result<i32> {
    let pretty = cli.pretty;
    match cli.command {
        Cmd::Forms { op } => forms_cmd(pretty, op)?,
        Cmd::Selberg { op } => selberg_cmd(pretty, op)?,
        Cmd::Gy { op } => gy_cmd(pretty, op)?,
        Cmd::Spectra { op } => spectra_cmd(pretty, op)?,
        Cmd::Transfer { op } => transfer_cmd(pretty, op)?,
        Cmd::Chen { op } => chen_cmd(pretty, op)?,
        Cmd::Suite { op } => return suite_cmd(pretty, op),
    }
    Ok(0)
}

fn forms_cmd(pretty: bool, op: FormsOp) -> Result<()> {
    match op {
        FormsOp::Gamma { form, q } => {
            let f = parse_form(&form)?;
            let data = forms::local_data(&f, q)?;
            let manifest = RunManifest::new(
                "forms gamma",
                &[("form", form.clone()), ("q", q.to_string())],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "form": form,
                    "q": q,
                    "k": f.k(),
                    "gamma": report::rat_json(&data.gamma),
                    "residue_count": data.residues.len(),
                    "rule": "gamma is exact; q gamma(q) counts admissible residues",
                }),
            )
        }
        FormsOp::Singular { form, truncation } => {
            let f = parse_form(&form)?;
            let s = forms::singular_series(&f, truncation)?;
            let manifest = RunManifest::new(
                "forms singular",
                &[("form", form.clone()), ("truncation", truncation.to_string())],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "form": form,
                    "value": s.value,
                    "truncation_prime": s.truncation_prime,
                    "tolerance": s.tail_bound,
                    "rule": "|true value - value| <= tolerance",
                }),
            )
        }
    }
}

fn selberg_cmd(pretty: bool, op: SelbergOp) -> Result<()> {
    match op {
        SelbergOp::Build { form, r } => {
            let f = parse_form(&form)?;
            let kit = selberg::build_kit(&f, r)?;
            let lambda: Vec<Value> = (1..=r)
                .filter(|&d| kit.mu(d) != 0)
                .map(|d| json!({"d": d, "lambda": report::rat_json(kit.lambda(d))}))
                .collect();
            let h: Vec<Value> = (1..=r)
                .filter(|&q| kit.mu(q) != 0)
                .map(|q| json!({"q": q, "h": report::rat_json(kit.h(q))}))
                .collect();
            let manifest = RunManifest::new(
                "selberg build",
                &[("form", form.clone()), ("R", r.to_string())],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "form": form,
                    "R": r,
                    "big_g": report::rat_json(kit.big_g()),
                    "big_g_f64": kit.big_g_f64(),
                    "lambda": lambda,
                    "h": h,
                    "rule": "|lambda_d| <= 1 exactly; G = sum of h",
                }),
            )
        }
        SelbergOp::Verify { form, r, lo, hi } => {
            let f = parse_form(&form)?;
            let kit = selberg::build_kit(&f, r)?;
            let table = selberg::build_table(&kit)?;
            let dev = selberg::verify_expansion(&kit, &table, lo, hi)?;
            let manifest = RunManifest::new(
                "selberg verify",
                &[
                    ("form", form.clone()),
                    ("R", r.to_string()),
                    ("lo", lo.to_string()),
                    ("hi", hi.to_string()),
                ],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "form": form,
                    "R": r,
                    "lo": lo,
                    "hi": hi,
                    "max_deviation": dev,
                    "tolerance": 1e-6,
                    "rule": "max |beta - expansion| <= tolerance at moderate R",
                }),
            )
        }
        SelbergOp::Table { form, r, csv } => {
            let f = parse_form(&form)?;
            let kit = selberg::build_kit(&f, r)?;
            let table = selberg::build_table(&kit)?;
            let entries: Vec<Value> = table
                .entries()
                .iter()
                .map(|e| {
                    json!({
                        "a": e.a,
                        "q": e.q,
                        "s": report::complex_json(e.s),
                        "w": report::complex_json(e.w),
                    })
                })
                .collect();
            let mut csv_note = Value::Null;
            if let Some(path) = &csv {
                let rows: Vec<Vec<String>> = table
                    .entries()
                    .iter()
                    .map(|e| {
                        vec![
                            e.a.to_string(),
                            e.q.to_string(),
                            format!("{}", e.s.re),
                            format!("{}", e.s.im),
                            format!("{}", e.w.re),
                            format!("{}", e.w.im),
                        ]
                    })
                    .collect();
                report::write_csv(path, &["a", "q", "s_re", "s_im", "w_re", "w_im"], &rows)?;
                csv_note = json!(path.display().to_string());
            }
            let manifest = RunManifest::new(
                "selberg table",
                &[("form", form.clone()), ("R", r.to_string())],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "form": form,
                    "R": r,
                    "count": entries.len(),
                    "entries": entries,
                    "csv": csv_note,
                    "rule": "|w| <= 3^omega(q) |s|; w = 0 exactly off squarefree moduli",
                }),
            )
        }
    }
}

fn gy_cmd(pretty: bool, op: GyOp) -> Result<()> {
    match op {
        GyOp::Gaps { r, csv } => {
            let mut rows = Vec::new();
            for &level in &r {
                rows.push((level, gy::g_asymptotic_gap(level)?));
            }
            if let Some(path) = &csv {
                let lines: Vec<Vec<String>> = rows
                    .iter()
                    .map(|(level, gap)| vec![level.to_string(), format!("{gap}")])
                    .collect();
                report::write_csv(path, &["R", "gap"], &lines)?;
            }
            let points: Vec<Value> =
                rows.iter().map(|(level, gap)| json!({"R": level, "gap": gap})).collect();
            let manifest = RunManifest::new(
                "gy gaps",
                &[("R", join(&r)), ("csv", csv_str(&csv))],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "points": points,
                    "rule": "|gap| decreases along increasing R",
                }),
            )
        }
        GyOp::L1 { r, csv } => {
            let mut rows = Vec::new();
            for &level in &r {
                let n = level.pow(4);
                let l1 = gy::l1_distance(level, n)?;
                let scaled = l1 * (level as f64).ln().sqrt();
                rows.push((level, n, l1, scaled));
            }
            if let Some(path) = &csv {
                let lines: Vec<Vec<String>> = rows
                    .iter()
                    .map(|(level, n, l1, scaled)| {
                        vec![
                            level.to_string(),
                            n.to_string(),
                            format!("{l1}"),
                            format!("{scaled}"),
                        ]
                    })
                    .collect();
                report::write_csv(path, &["R", "N", "l1", "scaled"], &lines)?;
            }
            let points: Vec<Value> = rows
                .iter()
                .map(|(level, n, l1, scaled)| {
                    json!({"R": level, "N": n, "l1": l1, "scaled": scaled})
                })
                .collect();
            let manifest =
                RunManifest::new("gy l1", &[("R", join(&r)), ("csv", csv_str(&csv))], None);
            emit(
                pretty,
                manifest,
                json!({
                    "points": points,
                    "rule": "l1 * sqrt(log R) stays within a factor 2 along the ladder",
                }),
            )
        }
        GyOp::Moments { r, n, moment } => {
            let value = gy::h_r_moments(r, n, moment)?;
            let manifest = RunManifest::new(
                "gy moments",
                &[
                    ("R", r.to_string()),
                    ("n", n.to_string()),
                    ("moment", moment.to_string()),
                ],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "R": r,
                    "N": n,
                    "moment": moment,
                    "value": value,
                    "rule": "mean of beta'^moment; bounded along N at fixed R",
                }),
            )
        }
        GyOp::Qform { r, family } => {
            let manifest = RunManifest::new(
                "gy qform",
                &[
                    ("R", r.to_string()),
                    (
                        "family",
                        match family {
                            Family::Sel => "sel".into(),
                            Family::Gy => "gy".into(),
                        },
                    ),
                ],
                None,
            );
            match family {
                Family::Sel => {
                    let (q, inv_g) = gy::q_form_sel(r)?;
                    emit(
                        pretty,
                        manifest,
                        json!({
                            "R": r,
                            "q": report::rat_json(&q),
                            "one_over_g": report::rat_json(&inv_g),
                            "equal": q == inv_g,
                            "rule": "Q(lambda) == 1/G(R) exactly",
                        }),
                    )
                }
                Family::Gy => {
                    let (q, coeff) = gy::q_form_gy(r)?;
                    emit(
                        pretty,
                        manifest,
                        json!({
                            "R": r,
                            "q": q,
                            "excess_coefficient": coeff,
                            "rule": "Q ~ 1/log R; the scaled excess is recorded, not asserted",
                        }),
                    )
                }
            }
        }
    }
}

fn spectra_cmd(pretty: bool, op: SpectraOp) -> Result<()> {
    match op {
        SpectraOp::Lpnorm { form, n, p, oversample } => {
            let f = parse_form(&form)?;
            let x = spectra::enumerate_tuples(&f, n)?;
            let (value, refinement) = spectra::lp_norm_with_error(&x, p, oversample)?;
            let manifest = RunManifest::new(
                "spectra lpnorm",
                &[
                    ("form", form.clone()),
                    ("n", n.to_string()),
                    ("p", p.to_string()),
                    ("oversample", oversample.to_string()),
                ],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "form": form,
                    "N": n,
                    "p": p,
                    "members": x.members().len(),
                    "value": value,
                    "tolerance": refinement,
                    "rule": "|value - doubled-grid value| <= tolerance",
                }),
            )
        }
        SpectraOp::Restrict { form, r, n, trials, q, seed } => {
            let f = parse_form(&form)?;
            let rep = spectra::restriction_check(&f, r, n, trials, q, seed)?;
            let manifest = RunManifest::new(
                "spectra restrict",
                &[
                    ("form", form.clone()),
                    ("R", r.to_string()),
                    ("n", n.to_string()),
                    ("trials", trials.to_string()),
                    ("q", q.to_string()),
                ],
                Some(seed),
            );
            emit(
                pretty,
                manifest,
                json!({
                    "report": to_value(&rep),
                    "rule": "max ratio stays within a factor 2 while N doubles",
                }),
            )
        }
        SpectraOp::Extend { form, r, n, p, sequence, seed } => {
            let f = parse_form(&form)?;
            let seq = match sequence {
                Sequence::Zero => ExtensionSequence::Zero,
                Sequence::Sieved => ExtensionSequence::SievedTupleNormalized,
                Sequence::Random => ExtensionSequence::RandomSign(seed),
            };
            let rep = spectra::extension_check(&f, r, n, p, seq)?;
            let manifest = RunManifest::new(
                "spectra extend",
                &[
                    ("form", form.clone()),
                    ("R", r.to_string()),
                    ("n", n.to_string()),
                    ("p", p.to_string()),
                    (
                        "sequence",
                        match sequence {
                            Sequence::Zero => "zero".into(),
                            Sequence::Sieved => "sieved".into(),
                            Sequence::Random => "random".into(),
                        },
                    ),
                ],
                match sequence {
                    Sequence::Random => Some(seed),
                    _ => None,
                },
            );
            emit(
                pretty,
                manifest,
                json!({
                    "report": to_value(&rep),
                    "rule": "variable ratio stays within a factor 2 while N doubles",
                }),
            )
        }
        SpectraOp::Mean { form, r, n } => {
            let f = parse_form(&form)?;
            let direct = spectra::beta_mean(&f, r, n)?;
            let fourier = spectra::beta_mean_fourier(&f, r, n)?;
            let manifest = RunManifest::new(
                "spectra mean",
                &[
                    ("form", form.clone()),
                    ("R", r.to_string()),
                    ("n", n.to_string()),
                ],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "form": form,
                    "R": r,
                    "N": n,
                    "mean": direct,
                    "fourier_mean": fourier,
                    "deviation": (direct - fourier).abs(),
                    "rule": "both evaluations agree; the mean tends to 1",
                }),
            )
        }
        SpectraOp::Mainthm { form, n, p, csv } => {
            let f = parse_form(&form)?;
            let mut rows = Vec::new();
            for &level in &n {
                rows.push((level, spectra::mainthm_ratio(&f, level, p)?));
            }
            if let Some(path) = &csv {
                let lines: Vec<Vec<String>> = rows
                    .iter()
                    .map(|(level, ratio)| vec![level.to_string(), format!("{ratio}")])
                    .collect();
                report::write_csv(path, &["N", "ratio"], &lines)?;
            }
            let points: Vec<Value> =
                rows.iter().map(|(level, ratio)| json!({"N": level, "ratio": ratio})).collect();
            let manifest = RunManifest::new(
                "spectra mainthm",
                &[
                    ("form", form.clone()),
                    ("n", join(&n)),
                    ("p", p.to_string()),
                    ("csv", csv_str(&csv)),
                ],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "form": form,
                    "p": p,
                    "points": points,
                    "rule": "ratio stays within a factor 2 along the N ladder",
                }),
            )
        }
    }
}

fn transfer_cmd(pretty: bool, op: TransferOp) -> Result<()> {
    match op {
        TransferOp::Run { n, density, seed, eps, q, input, nu } => {
            let (f, label) = match &input {
                Some(path) => (CyclicFunction::new(read_values(path)?)?, path.display().to_string()),
                None => {
                    let modulus = n.expect("clap requires --n without --input");
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let values: Vec<f64> = (0..modulus)
                        .map(|_| if rng.gen::<f64>() < density { 1.0 } else { 0.0 })
                        .collect();
                    (CyclicFunction::new(values)?, format!("bernoulli({density})"))
                }
            };
            let majorant = match &nu {
                Some(path) => CyclicFunction::new(read_values(path)?)?,
                None => CyclicFunction::constant(f.n(), 1.0)?,
            };
            let rep = transfer::transference_run(&f, &majorant, eps, q)?;
            let manifest = RunManifest::new(
                "transfer run",
                &[
                    ("n", f.n().to_string()),
                    ("input", label),
                    ("eps", eps.map_or_else(|| "auto".into(), |e| e.to_string())),
                    ("q", q.to_string()),
                ],
                if input.is_none() { Some(seed) } else { None },
            );
            emit(
                pretty,
                manifest,
                json!({
                    "report": to_value(&rep),
                    "rule": "f2_sup <= f2_sup_bound; resum_defect ~ 0; f1 <= f1_dominance_bound",
                }),
            )
        }
    }
}

fn chen_cmd(pretty: bool, op: ChenOp) -> Result<()> {
    match op {
        ChenOp::Scan { upto, num, den, csv } => {
            let records = chen::chen_records_up_to(upto, (num, den))?;
            let scan = chen::chen_density_scan(upto, (num, den))?;
            if let Some(path) = &csv {
                let rows: Vec<Vec<String>> = records
                    .iter()
                    .map(|rec| {
                        let kind = match rec.partner_kind {
                            chen::PartnerKind::Prime => "prime",
                            chen::PartnerKind::Semiprime => "semiprime",
                        };
                        let factors = rec
                            .factors_of_p_plus_2
                            .iter()
                            .map(|f| f.to_string())
                            .collect::<Vec<_>>()
                            .join("*");
                        vec![rec.p.to_string(), kind.to_string(), factors]
                    })
                    .collect();
                report::write_csv(path, &["p", "partner_kind", "partner_factors"], &rows)?;
            }
            let preview: Vec<Value> = records.iter().take(25).map(to_value).collect();
            let manifest = RunManifest::new(
                "chen scan",
                &[
                    ("upto", upto.to_string()),
                    ("exponent", format!("{num}/{den}")),
                    ("csv", csv_str(&csv)),
                ],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "total": scan.total,
                    "exponent": format!("{num}/{den}"),
                    "bands": to_value(&scan.bands),
                    "preview": preview,
                    "rule": "normalized band counts stay bounded away from 0",
                }),
            )
        }
        ChenOp::Wtrick { t } => {
            let wt = chen::w_trick(t)?;
            let manifest = RunManifest::new("chen wtrick", &[("t", t.to_string())], None);
            emit(
                pretty,
                manifest,
                json!({
                    "wtrick": to_value(&wt),
                    "corrected_count": wt.corrected_count(),
                    "rule": "residue count equals prod_{3 <= p <= t} (p - 2) exactly",
                }),
            )
        }
        ChenOp::Select { t, n } => {
            let wt = chen::w_trick(t)?;
            let (b, members) = chen::select_residue(n, &wt)?;
            let manifest = RunManifest::new(
                "chen select",
                &[("t", t.to_string()), ("n", n.to_string())],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "t": t,
                    "N": n,
                    "W": wt.w(),
                    "b": b,
                    "x_size": members.len(),
                    "sample": members.iter().take(20).collect::<Vec<_>>(),
                    "rule": "b maximizes members of the window [N/4, N/2]",
                }),
            )
        }
        ChenOp::Ap3 { n, mode, t } => match mode {
            Mode::Direct => {
                let rep = chen::chen_ap3_direct(n, chen::DEFAULT_EXPONENT)?;
                let manifest = RunManifest::new(
                    "chen ap3",
                    &[("n", n.to_string()), ("mode", "direct".into())],
                    None,
                );
                emit(
                    pretty,
                    manifest,
                    json!({
                        "report": to_value(&rep),
                        "rule": "triple_count > 0 for large N; normalized count recorded",
                    }),
                )
            }
            Mode::Transference => {
                let rep = chen::chen_ap3_transference(n, t)?;
                let manifest = RunManifest::new(
                    "chen ap3",
                    &[
                        ("n", n.to_string()),
                        ("mode", "transference".into()),
                        ("t", t.to_string()),
                    ],
                    None,
                );
                emit(
                    pretty,
                    manifest,
                    json!({
                        "report": to_value(&rep),
                        "rule": "direct_triples_in_x > 0 and ap_count_f > 0 together",
                    }),
                )
            }
        },
        ChenOp::Flatness { t, r, n } => {
            let wt = chen::w_trick(t)?;
            let rep = chen::nu_fourier_flatness(&wt, r, n)?;
            let manifest = RunManifest::new(
                "chen flatness",
                &[
                    ("t", t.to_string()),
                    ("R", r.to_string()),
                    ("n", n.to_string()),
                ],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "report": to_value(&rep),
                    "rule": "small_moduli_max_w == 0 exactly; max_deviation shrinks with t",
                }),
            )
        }
    }
}

fn suite_cmd(pretty: bool, op: SuiteOp) -> Result<i32> {
    match op {
        SuiteOp::Acceptance { only } => {
            let indices: Vec<u8> = if only.is_empty() { (1..=11).collect() } else { only };
            let mut results = Vec::new();
            for &i in &indices {
                let res = suite::run_one(i)?;
                eprintln!(
                    "criterion {:02} {}: {} ({:.1}s)",
                    res.index,
                    res.name,
                    if res.passed { "PASS" } else { "FAIL" },
                    res.seconds
                );
                for d in &res.details {
                    eprintln!("    {d}");
                }
                results.push(res);
            }
            let passed = results.iter().all(|r| r.passed);
            let manifest = RunManifest::new(
                "suite acceptance",
                &[("only", indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))],
                None,
            );
            emit(
                pretty,
                manifest,
                json!({
                    "results": to_value(&results),
                    "passed": passed,
                    "rule": "every criterion passes",
                }),
            )?;
            Ok(if passed { 0 } else { 1 })
        }
    }
}

fn join(levels: &[u64]) -> String {
    levels.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn csv_str(path: &Option<PathBuf>) -> String {
    path.as_ref().map_or_else(|| "-".into(), |p| p.display().to_string())
}
