//! `latvol`: command-line front end for the experiments in the `latvol` crate.
//!
//! Every subcommand emits one table as CSV (default) or JSON. Failures print
//! a JSON error record on stderr and exit with status 2 (parse),
//! 3 (precondition), 4 (budget or overflow) or 5 (internal invariant).

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latvol::arith::{parse_rational, to_f64, Rational};
use latvol::dirichlet::{
    abelian_table, hurwitz_zeta_with_bound, product_error_table, subgroup_zeta, volume_constant,
    PsiSeries,
};
use latvol::fundomain::{in_cone_f, reduce_to_f, size_bounds, ReduceOptions};
use latvol::hnf::{count_by_index, hnf_of};
use latvol::matrix::IntMatrix;
use latvol::measure::{
    cone_point_count, normalization_constant, spike_demo, spike_table, volume_ratio_experiment,
    volume_table,
};
use latvol::padic::{
    local_tamagawa_check, local_zeta, local_zeta_partial, singular_density, tamagawa_partial,
    tamagawa_table,
};
use latvol::report::Table;
use latvol::{Error, Result};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "latvol", version, about = "Sublattice counting, reduction and local densities")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, ValueEnum)]
enum Series {
    /// zeta(Z^k, s) for the rank given by --k.
    Subgroup,
    /// sum_n (n + 1/2)^-s.
    HalfShifted,
    Zero,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of sublattices of Z^k with index <= T, against the volume main term.
    Count {
        #[arg(long)]
        k: usize,
        /// Index bounds T (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        max_index: Vec<f64>,
    },
    /// Number of sublattices of each index n <= N.
    CountByIndex {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
    },
    /// Hurwitz zeta(s, q); q = 1 gives the Riemann zeta function.
    Zeta {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        s: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// zeta(2) ... zeta(k) / k and zeta(Z^k, s) at chosen s.
    Constant {
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        s: Vec<f64>,
    },
    /// Reduces a basis matrix into the fundamental cone.
    Reduce {
        /// Rows separated by ';', entries by ','.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Permit rank-3 input.
        #[arg(long)]
        rank3: bool,
    },
    /// Whether a basis matrix already lies in the fundamental cone.
    InCone {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        rank3: bool,
    },
    /// Size of the lattice spanned by the columns, with the minbasis comparison.
    Size {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        rank3: bool,
    },
    /// Exact local Tamagawa product at p.
    LocalCheck {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u64,
    },
    /// Local zeta function at an integer s, optionally with the truncated HNF sum.
    LocalZeta {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: i64,
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Density of singular matrices over Z/p^n.
    Singular {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
    },
    /// Partial Euler product of the Sl_k local densities up to a prime cutoff.
    Tamagawa {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cutoff: u64,
    },
    /// Error of sum_{n <= T} sigma(n) against zeta(2) T^2 / 2.
    DirichletProduct {
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<u64>,
    },
    /// (s - pole) psi(s) as s decreases to the pole.
    Abelian {
        #[arg(long, value_enum)]
        series: Series,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<f64>,
    },
    /// Cone points counted two ways (k = 2).
    ConeCount {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u64>,
    },
    /// Lattice points on the first m rational lines and on their spikes.
    SpikeDemo {
        #[arg(long)]
        m: usize,
        /// Scales r as rationals (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<String>,
    },
    /// mu_inf of the diagonal parallelepiped, 1/k.
    Normalization {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
    },
}

fn opts(rank3: bool) -> ReduceOptions {
    if rank3 {
        ReduceOptions::rank3()
    } else {
        ReduceOptions::default()
    }
}

fn run(cmd: Command) -> Result<Table> {
    Ok(match cmd {
        Command::Count { k, max_index } => {
            volume_table(k, &volume_ratio_experiment(k, &max_index)?)
        }
        Command::CountByIndex { k, n } => {
            let mut t = Table::new("count-by-index", &["n", "count"]).param("k", k);
            for i in 1..=n {
                t.push(vec![i.into(), count_by_index(k, i)?.into()]);
            }
            t
        }
        Command::Zeta { s, q } => {
            let mut t = Table::new("zeta", &["s", "value", "remainder_bound"]).param("q", q);
            for x in s {
                let z = hurwitz_zeta_with_bound(x, q)?;
                t.push(vec![x.into(), z.value.into(), z.remainder_bound.into()]);
            }
            t
        }
        Command::Constant { k, s } => {
            let mut t = Table::new("constant", &["s", "value"])
                .param("k", k)
                .param("volume_constant", latvol::report::format_float(volume_constant(k)?));
            for x in s {
                t.push(vec![x.into(), subgroup_zeta(k, x)?.into()]);
            }
            t
        }
        Command::Reduce { matrix, rank3 } => {
            let a = IntMatrix::parse(&matrix)?;
            let r = reduce_to_f(&a, &opts(rank3))?;
            let mut t = Table::new(
                "reduce",
                &["input", "gamma", "rep", "input_in_cone", "compared"],
            );
            let in_cone = r.rep == a;
            t.push(vec![
                a.to_compact().into(),
                r.gamma.to_compact().into(),
                r.rep.to_compact().into(),
                in_cone.into(),
                r.compared.into(),
            ]);
            t
        }
        Command::InCone { matrix, rank3 } => {
            let a = IntMatrix::parse(&matrix)?;
            let mut t = Table::new("in-cone", &["matrix", "in_cone"]);
            t.push(vec![a.to_compact().into(), in_cone_f(&a, &opts(rank3))?.into()]);
            t
        }
        Command::Size { matrix, rank3 } => {
            let a = IntMatrix::parse(&matrix)?;
            let (h, _) = hnf_of(&a)?;
            let b = size_bounds(&h, &opts(rank3))?;
            let mut t = Table::new(
                "size",
                &["hnf", "size_sq", "minbasis_sq", "lower_holds", "upper_holds"],
            );
            t.push(vec![
                h.matrix().to_compact().into(),
                b.size_sq.into(),
                b.minbasis_sq.into(),
                b.lower_holds.into(),
                b.upper_holds.into(),
            ]);
            t
        }
        Command::LocalCheck { k, p } => {
            let v = local_tamagawa_check(k, p)?;
            let mut t = Table::new("local-check", &["k", "p", "product"]);
            t.push(vec![k.into(), p.into(), v.into()]);
            t
        }
        Command::LocalZeta { k, p, s, levels } => {
            let v = local_zeta(k, p, s)?.value;
            let mut t = Table::new("local-zeta", &["levels", "value", "value_float"])
                .param("k", k)
                .param("p", p)
                .param("s", s);
            if let Some(levels) = levels {
                for m in 0..=levels {
                    let part = local_zeta_partial(k, p, s, m)?;
                    let f = to_f64(&part);
                    t.push(vec![m.to_string().into(), part.into(), f.into()]);
                }
            }
            let f = to_f64(&v);
            t.push(vec!["inf".into(), v.into(), f.into()]);
            t
        }
        Command::Singular { k, p, n } => {
            let d = singular_density(k, p, n)?;
            let mut t = Table::new("singular", &["singular", "total", "density", "bound"])
                .param("k", k)
                .param("p", p)
                .param("n", n);
            t.push(vec![d.singular.into(), d.total.into(), d.density.into(), d.bound.into()]);
            t
        }
        Command::Tamagawa { k, cutoff } => tamagawa_table(k, cutoff)?
            .param("partial", latvol::report::format_float(tamagawa_partial(k, cutoff)?)),
        Command::DirichletProduct { t } => product_error_table(&t)?.table(),
        Command::Abelian { series, k, s } => {
            let psi = match series {
                Series::Subgroup => PsiSeries::SubgroupZeta(k),
                Series::HalfShifted => PsiSeries::HalfShifted,
                Series::Zero => PsiSeries::Zero,
            };
            abelian_table(&psi, &s)?
        }
        Command::ConeCount { k, d } => {
            let mut t = Table::new("cone-count", &["D", "count"]).param("k", k);
            for x in d {
                t.push(vec![x.into(), cone_point_count(k, x)?.into()]);
            }
            t
        }
        Command::SpikeDemo { m, r } => {
            let r: Vec<Rational> = r.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
            spike_table(&spike_demo(m, &r)?).param("m", m)
        }
        Command::Normalization { k } => {
            let mut t = Table::new("normalization", &["k", "constant"]);
            for x in k {
                t.push(vec![x.into(), normalization_constant(x)?.into()]);
            }
            t
        }
    })
}

fn emit(table: &Table, out: &OutputArgs) -> Result<()> {
    let io = |path: &str, e: io::Error| Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    };
    let mut sink: Box<dyn Write> = match &out.output {
        Some(p) => Box::new(File::create(p).map_err(|e| io(&p.display().to_string(), e))?),
        None => Box::new(io::stdout().lock()),
    };
    let path = out.output.as_ref().map_or("<stdout>".to_string(), |p| p.display().to_string());
    match out.format {
        Format::Csv => table.write_csv(&mut sink).map_err(|e| match e {
            Error::Io { message, .. } => Error::Io { path: path.clone(), message },
            other => other,
        })?,
        Format::Json => {
            let text = serde_json::to_string_pretty(&table.to_json()).expect("json values");
            writeln!(sink, "{text}").map_err(|e| io(&path, e))?;
        }
    }
    sink.flush().map_err(|e| io(&path, e))
}

fn status(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::Precondition(_) | Error::Singular(_) | Error::NotPrimitive | Error::NotInLattice => 3,
        Error::BudgetExceeded { .. } | Error::Overflow(_) => 4,
        Error::Invariant(_) => 5,
        Error::Io { .. } => 1,
    }
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    let record = json!({ "error": kind, "message": message, "status": code });
    eprintln!("{record}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail("parse", e.to_string().trim().to_string(), 2);
        }
    };
    match run(cli.command).and_then(|t| emit(&t, &cli.out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string(), status(&e)),
    }
}
