//! Command-line surface: tables for the partition function, recurrence
//! coefficients, enumeration, asymptotic constants, equilibrium data,
//! exact ASM counts, the kappa fit, and the verification suite.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use icehankel::asm_exact::{self, SpecialPoint};
use icehankel::asymptotics;
use icehankel::enumerate;
use icehankel::equilibrium;
use icehankel::error::Error;
use icehankel::hankel;
use icehankel::params::{make_params, Angle, ModelParams};
use icehankel::scalar::{Big, Scalar};
use icehankel::verify;

#[derive(Parser)]
#[command(name = "icehankel", version, about = "Six-vertex model with domain wall boundaries: exact finite-size data and asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Crossing parameter gamma; accepts decimals or "pi/3", "pi/4", "pi/6"
    #[arg(long, default_value = "1.0")]
    gamma: String,
    /// Spectral parameter t (|t| < gamma)
    #[arg(long, default_value = "0.0")]
    t: String,
    /// Target certified decimal digits
    #[arg(long)]
    digits: Option<f64>,
    /// Working precision in bits (overrides adaptive choice)
    #[arg(long)]
    bits: Option<u32>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path (stdout if omitted)
    #[arg(long)]
    out: Option<String>,
    /// Rayon worker threads
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Partition function table: N, Z_N, F_N, N^-2 ln Z_N
    Partition {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Recurrence coefficients with asymptotic predictions
    Recurrence {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// Brute-force enumeration: counts, weight polynomial, Z comparison
    Enumerate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        n: usize,
        /// Enumeration size cap (the state space grows super-exponentially)
        #[arg(long, default_value_t = 7)]
        cap: usize,
    },
    /// Closed-form asymptotic constants for the given parameters
    Asymptotics {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Equilibrium measure: endpoints, density samples, residuals
    Equilibrium {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid size for density samples and the variational residual
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// Exact ASM counts and asymptotic-expansion checks
    Asm {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
    },
    /// Fit the power-law exponent from exact special-point data
    FitKappa {
        #[command(flatten)]
        common: CommonArgs,
        /// Special point: asm or asm3
        #[arg(long, default_value = "asm")]
        point: String,
        #[arg(long, default_value_t = 200)]
        n_min: u32,
        #[arg(long, default_value_t = 2000)]
        n_max: u32,
    },
    /// Run the full acceptance suite
    Verify,
}

impl Command {
    fn common(&self) -> Option<&CommonArgs> {
        match self {
            Command::Partition { common, .. }
            | Command::Recurrence { common, .. }
            | Command::Enumerate { common, .. }
            | Command::Asymptotics { common }
            | Command::Equilibrium { common, .. }
            | Command::Asm { common, .. }
            | Command::FitKappa { common, .. } => Some(common),
            Command::Verify => None,
        }
    }
}

fn default_digits() -> f64 {
    std::env::var("ICEHANKEL_DEFAULT_DIGITS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(30.0)
}

struct Table {
    meta: serde_json::Value,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: serde_json::Map<String, serde_json::Value> = self
                            .columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| (c.to_string(), json!(v)))
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "meta": self.meta, "rows": rows });
                serde_json::to_string_pretty(&doc).unwrap()
            }
        }
    }
}

fn parse_params(common: &CommonArgs) -> Result<ModelParams, Error> {
    let gamma = Angle::parse(&common.gamma)?;
    let t = Angle::parse(&common.t)?;
    make_params(gamma, t)
}

fn meta(p: &ModelParams, digits: f64) -> serde_json::Value {
    json!({
        "gamma": p.gamma_f64(),
        "t": p.t_f64(),
        "zeta": p.zeta_f64(),
        "digits": digits,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn dec(x: &Big, digits: f64) -> String {
    x.to_decimal(digits.max(1.0) as usize)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    if let Some(threads) = cli.command.common().and_then(|c| c.threads) {
        // best effort; ignored if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let (common, table): (&CommonArgs, Table) = match &cli.command {
        Command::Partition { common, n_max } => {
            let p = parse_params(common)?;
            let digits = common.digits.unwrap_or_else(default_digits);
            let mut rows = Vec::new();
            for n in 1..=*n_max {
                let z = if let Some(bits) = common.bits {
                    hankel::Certified {
                        value: hankel::partition_z(&p, n, bits)?,
                        bits,
                        digits,
                    }
                } else {
                    hankel::partition_z_certified(&p, n, digits)?
                };
                let f_n = hankel::free_energy_f(&p, n, z.bits)?;
                let lz = hankel::log_z_over_n2(&p, n, z.bits)?;
                rows.push(vec![
                    n.to_string(),
                    dec(&z.value, z.digits),
                    dec(&f_n, z.digits),
                    dec(&lz, z.digits),
                ]);
            }
            (
                common,
                Table {
                    meta: meta(&p, digits),
                    columns: vec!["N", "Z_N", "F_N", "lnZ_over_N2"],
                    rows,
                },
            )
        }
        Command::Recurrence { common, n_max } => {
            let p = parse_params(common)?;
            let digits = common.digits.unwrap_or_else(default_digits);
            let t = if let Some(bits) = common.bits {
                hankel::recurrence_table(&p, *n_max, bits)?
            } else {
                hankel::recurrence_table_certified(&p, *n_max, digits)?
            };
            let g = p.gamma_f64();
            let mut rows = Vec::new();
            for n in 1..=*n_max {
                let pred = asymptotics::predicted_r_n(&p, n as u32)?;
                let resid = (t.r[n - 1].to_f64() - pred).abs() * g * g;
                rows.push(vec![
                    n.to_string(),
                    dec(&t.h[n], digits),
                    dec(&t.r[n - 1], digits),
                    dec(&t.q[n - 1], digits),
                    format!("{pred:.15e}"),
                    format!("{resid:.6e}"),
                ]);
            }
            (
                common,
                Table {
                    meta: meta(&p, t.certificate.unwrap_or(digits)),
                    columns: vec!["n", "h_n", "R_n", "Q_nm1", "predicted_R_n", "scaled_residual"],
                    rows,
                },
            )
        }
        Command::Enumerate { common, n, cap } => {
            let p = parse_params(common)?;
            let digits = common.digits.unwrap_or_else(default_digits);
            let wp = enumerate::weight_polynomial(*n, *cap)?;
            let bits = common.bits.unwrap_or(256);
            let (a, b, c) = icehankel::params::weights_at::<Big>(&p, bits);
            let z_enum = enumerate::evaluate_z(&wp, &a, &b, &c);
            let z_det = hankel::partition_z(&p, *n, bits)?;
            let mut rows = Vec::new();
            for (&(na, nb, nc), &count) in &wp.terms {
                rows.push(vec![
                    na.to_string(),
                    nb.to_string(),
                    nc.to_string(),
                    count.to_string(),
                ]);
            }
            let mut m = meta(&p, digits);
            m["total_configurations"] = json!(wp.total_count());
            m["Z_enumeration"] = json!(dec(&z_enum, digits));
            m["Z_determinant"] = json!(dec(&z_det, digits));
            (
                common,
                Table {
                    meta: m,
                    columns: vec!["n_a", "n_b", "n_c", "count"],
                    rows,
                },
            )
        }
        Command::Asymptotics { common } => {
            let p = parse_params(common)?;
            let k = asymptotics::asymptotic_constants(&p)?;
            let mut rows = vec![
                vec!["R".to_string(), format!("{:.15e}", k.r)],
                vec!["omega".to_string(), format!("{:.15e}", k.omega)],
                vec!["c".to_string(), format!("{:.15e}", k.c)],
                vec!["F".to_string(), format!("{:.15e}", k.f_cap)],
                vec!["f".to_string(), format!("{:.15e}", k.f)],
                vec!["kappa".to_string(), format!("{:.15e}", k.kappa)],
            ];
            for m in &k.modes {
                rows.push(vec![format!("c_{}", m.j), format!("{:.15e}", m.c_j)]);
                rows.push(vec![format!("kappa_{}", m.j), format!("{:.15e}", m.kappa_j)]);
            }
            (
                common,
                Table {
                    meta: meta(&p, 15.0),
                    columns: vec!["constant", "value"],
                    rows,
                },
            )
        }
        Command::Equilibrium { common, n } => {
            let p = parse_params(common)?;
            let e = equilibrium::endpoints(&p);
            let grid: Vec<f64> = (1..=*n)
                .map(|i| e.alpha + (e.beta - e.alpha) * i as f64 / (*n as f64 + 1.0))
                .filter(|mu| mu.abs() > 1e-3)
                .collect();
            let mut rows = Vec::new();
            for &mu in &grid {
                rows.push(vec![
                    format!("{mu:.15e}"),
                    format!("{:.15e}", equilibrium::density(mu, &p)),
                    format!("{:.6e}", equilibrium::variational_value(mu, &p).abs()),
                ]);
            }
            let mut m = meta(&p, 15.0);
            m["alpha"] = json!(e.alpha);
            m["beta"] = json!(e.beta);
            m["lagrange_l"] = json!(e.l);
            m["mass"] = json!(equilibrium::density_mass(&p)?);
            (
                common,
                Table {
                    meta: m,
                    columns: vec!["mu", "density", "variational_residual"],
                    rows,
                },
            )
        }
        Command::Asm { common, n_max } => {
            let mut rows = Vec::new();
            for n in 1..=*n_max {
                rows.push(vec![
                    n.to_string(),
                    asm_exact::asm_count(n).to_string(),
                    asm_exact::asm3_count(n).to_string(),
                ]);
            }
            let rep = asm_exact::asm_asymptotic_check(100, 320)?;
            let mut m = json!({ "version": env!("CARGO_PKG_VERSION") });
            m["C_limit"] = json!(rep.c_limit);
            m["C_reference"] = json!(rep.c_reference);
            m["C3_limit"] = json!(rep.c3_limit);
            m["C3_reference"] = json!(rep.c3_reference);
            m["coeff_N2"] = json!(rep.coeff_a);
            (
                common,
                Table {
                    meta: m,
                    columns: vec!["N", "A_N", "A_N_3"],
                    rows,
                },
            )
        }
        Command::FitKappa {
            common,
            point,
            n_min,
            n_max,
        } => {
            let (sp, f_known, target) = match point.as_str() {
                "asm" => (SpecialPoint::Asm, (9.0f64 / 8.0).ln(), -5.0 / 36.0),
                "asm3" => (SpecialPoint::Asm3, (0.75f64).ln(), 1.0 / 18.0),
                other => {
                    return Err(Error::Usage(format!(
                        "--point must be asm or asm3, got {other}"
                    )))
                }
            };
            let step = ((n_max - n_min) / 9).max(1);
            let ns: Vec<u32> = (0..10)
                .map(|i| n_min + i * step)
                .filter(|n| n <= n_max)
                .collect();
            let pts = asm_exact::ln_z_points(&ns, sp, 320);
            let (slope, intercept) = asymptotics::fit_kappa(&pts, f_known)?;
            let rows = vec![vec![
                format!("{slope:.12e}"),
                format!("{intercept:.12e}"),
                format!("{target:.12e}"),
            ]];
            (
                common,
                Table {
                    meta: json!({ "point": point, "N_values": ns, "version": env!("CARGO_PKG_VERSION") }),
                    columns: vec!["slope", "intercept", "target_kappa"],
                    rows,
                },
            )
        }
        Command::Verify => {
            let results = verify::run_all();
            let mut all_ok = true;
            let mut out = String::new();
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{status} criterion {:>2} ({}): {}", r.id, r.name, r.detail);
                all_ok &= r.passed;
            }
            print!("{out}");
            return Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            });
        }
    };

    let rendered = table.render(common.format);
    match &common.out {
        Some(path) => std::fs::write(path, rendered).map_err(Error::Io)?,
        None => print!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Error::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
