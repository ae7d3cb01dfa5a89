//! Command-line front end: argument parsing, JSON/text output, and dispatch
//! into the library. Every JSON document carries `"schema": "motent-v1"`.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::classes::{
    kapranov_zeta, motivic_entropy, parse_class, poincare_entropy_components, FqRegistry, KClass,
    Measure,
};
use crate::error::{Error, Result};
use crate::ffcount::{hasse_weil_zeta, FqVarietyDef};
use crate::global::global_entropy;
use crate::infoloss::{
    euler_flat_loss, flat_loss, flat_loss_kl_oracle, proper_loss, proper_loss_kl_oracle,
    ringhom_loss, EulerFlatDesc, FlatFiniteMorphismDesc, KlOracleEval, ProperMorphismDesc,
    RingHom,
};
use crate::logring::LogSeries;
use crate::scalar::{rat_from_str, Ring};
use crate::series::DEFAULT_TRUNC;
use crate::verify::run_suite;
use crate::witt::WittElement;

pub const SCHEMA: &str = "motent-v1";

#[derive(Parser)]
#[command(
    name = "motent",
    version,
    about = "Exact zeta functions, motivic entropy, and information loss"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kapranov zeta function of a variety class under a measure
    Zeta {
        #[command(flatten)]
        input: ClassInput,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Motivic entropy of a variety class under a measure
    Entropy {
        #[command(flatten)]
        input: ClassInput,
        /// Sample the numeric value at these t in (0,1); repeatable
        #[arg(long = "t", value_name = "T")]
        samples: Vec<f64>,
        /// Also emit the regular / log t / log z split (poincare measure)
        #[arg(long)]
        components: bool,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Hasse-Weil zeta function of a finite-field variety definition file
    #[command(name = "hw-zeta")]
    HwZeta {
        /// Variety definition file
        #[arg(long)]
        def: PathBuf,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Global Hasse-Weil entropy over all primes up to a bound
    #[command(name = "global-entropy")]
    GlobalEntropy {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 100_000)]
        pmax: u64,
        #[arg(long, default_value_t = 40)]
        kmax: u32,
        /// Emit JSON instead of plain text
        #[arg(long)]
        json: bool,
    },
    /// Information loss of a morphism
    Infoloss {
        #[command(subcommand)]
        kind: InfolossCommand,
    },
    /// Run an identity-verification suite
    Verify {
        /// series | witt | entropy | classes | ffcount | global | infoloss | all
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args)]
struct ClassInput {
    /// chi | poincare | count:<q>
    #[arg(long)]
    measure: String,
    /// Class expression, e.g. "P^2", "A^1 + 2 pt", "betti[1,2,1]", "fq:name"
    #[arg(long)]
    variety: String,
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    order: usize,
    /// Register a finite-field variety as name=path; repeatable
    #[arg(long = "fq", value_name = "NAME=PATH")]
    fq: Vec<String>,
}

#[derive(Args)]
struct OutputOpts {
    /// Plain-text series rendering instead of JSON
    #[arg(long)]
    text: bool,
}

#[derive(Subcommand)]
enum InfolossCommand {
    /// Loss of a proper morphism, from source and target zeta data
    Proper {
        /// Zeta JSON file or variety definition file for the source
        #[arg(long)]
        src: PathBuf,
        /// Zeta JSON file or variety definition file for the target
        #[arg(long)]
        dst: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        order: usize,
        #[command(flatten)]
        kl: KlOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Loss of a finite flat surjection of the given degree
    Flat {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        dst: PathBuf,
        #[arg(long)]
        deg: u64,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        order: usize,
        #[command(flatten)]
        kl: KlOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Loss of a coefficient-ring homomorphism between two measures
    Ringhom {
        /// Homomorphism: "z-><c>" for evaluation at a rational, or "id:<ring>"
        #[arg(long)]
        phi: String,
        /// Source measure
        #[arg(long)]
        mu: String,
        /// Target measure
        #[arg(long)]
        muprime: String,
        #[arg(long)]
        variety: String,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        order: usize,
        #[arg(long = "fq", value_name = "NAME=PATH")]
        fq: Vec<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Euler-characteristic flat loss from Riemann-Hurwitz data
    #[command(name = "euler-flat")]
    EulerFlat {
        #[arg(long = "chi-x")]
        chi_x: i64,
        #[arg(long = "chi-y")]
        chi_y: i64,
        #[arg(long)]
        deg: i64,
        #[arg(long = "chi-s")]
        chi_s: i64,
        #[arg(long = "chi-f")]
        chi_f: i64,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        order: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(Args)]
struct KlOpts {
    /// Evaluate the brute-force KL sum at this rational t0
    #[arg(long = "kl-t0")]
    kl_t0: Option<String>,
    /// Cycle-degree cutoff for the KL sum
    #[arg(long = "kl-depth")]
    kl_depth: Option<usize>,
}

fn parse_measure(text: &str) -> Result<Measure> {
    match text {
        "chi" | "euler" => Ok(Measure::EulerChar),
        "poincare" => Ok(Measure::Poincare),
        other => {
            if let Some(q) = other.strip_prefix("count:") {
                let q = q
                    .parse::<u64>()
                    .map_err(|_| Error::Json(format!("bad field size in measure '{other}'")))?;
                Ok(Measure::PointCount(q))
            } else {
                Err(Error::Json(format!(
                    "unknown measure '{other}'; expected chi, poincare, or count:<q>"
                )))
            }
        }
    }
}

fn parse_phi(text: &str) -> Result<RingHom> {
    if let Some(c) = text.strip_prefix("z->") {
        return Ok(RingHom::EvalZ(rat_from_str(c)?));
    }
    match text {
        "id:Q" => Ok(RingHom::Identity(Ring::Q)),
        "id:Q[z]" => Ok(RingHom::Identity(Ring::QZ)),
        other => Err(Error::Json(format!(
            "unknown homomorphism '{other}'; expected 'z-><c>' or 'id:<ring>'"
        ))),
    }
}

fn load_registry(specs: &[String]) -> Result<FqRegistry> {
    let mut reg = FqRegistry::new();
    for spec in specs {
        let (name, path) = spec.split_once('=').ok_or_else(|| {
            Error::Json(format!("bad --fq '{spec}'; expected name=path"))
        })?;
        let text = fs::read_to_string(path)?;
        reg.register(name, FqVarietyDef::parse(&text)?);
    }
    Ok(reg)
}

fn parse_input(input: &ClassInput) -> Result<(Measure, KClass, FqRegistry)> {
    Ok((
        parse_measure(&input.measure)?,
        parse_class(&input.variety)?,
        load_registry(&input.fq)?,
    ))
}

/// A zeta source for infoloss: either a zeta JSON document or a variety
/// definition file, detected by the leading character.
fn load_zeta(path: &PathBuf, order: usize) -> Result<WittElement> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        let v: Value =
            serde_json::from_str(&text).map_err(|e| Error::Json(e.to_string()))?;
        let inner = v.get("zeta").unwrap_or(&v);
        WittElement::from_json(inner)
    } else {
        Ok(hasse_weil_zeta(&FqVarietyDef::parse(&text)?, order)?.zeta)
    }
}

fn print_json(v: Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
}

fn emit_zeta(z: &WittElement, text: bool) {
    if text {
        println!("{}", z.series());
    } else {
        print_json(json!({"schema": SCHEMA, "zeta": z.to_json()}));
    }
}

fn logseries_text(s: &LogSeries) -> String {
    format!("regular: {}\nlog t:   {}", s.regular(), s.logpart())
}

fn kl_json(kl: &KlOracleEval, t0: &str, depth: usize) -> Value {
    json!({
        "t0": t0,
        "depth": depth,
        "value": kl.value,
        "truncated_mass": kl.truncated_mass,
    })
}

fn emit_loss(
    loss: &LogSeries,
    kl: Option<(KlOracleEval, String, usize)>,
    text: bool,
) {
    if text {
        println!("{}", logseries_text(loss));
        if let Some((kl, t0, depth)) = kl {
            println!(
                "kl sum at t0={t0}, depth {depth}: {} (mass {})",
                kl.value, kl.truncated_mass
            );
        }
    } else {
        let mut doc = json!({"schema": SCHEMA, "loss": loss.to_json()});
        if let Some((kl, t0, depth)) = kl {
            doc["kl"] = kl_json(&kl, &t0, depth);
        }
        print_json(doc);
    }
}

fn run_kl<F>(kl: &KlOpts, order: usize, f: F) -> Result<Option<(KlOracleEval, String, usize)>>
where
    F: FnOnce(&crate::scalar::Rat, usize) -> Result<KlOracleEval>,
{
    match &kl.kl_t0 {
        None => Ok(None),
        Some(t0_text) => {
            let t0 = rat_from_str(t0_text)?;
            let depth = kl.kl_depth.unwrap_or(order);
            Ok(Some((f(&t0, depth)?, t0_text.clone(), depth)))
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Zeta { input, out } => {
            let (mu, class, reg) = parse_input(&input)?;
            let z = kapranov_zeta(&mu, &class, input.order, &reg)?;
            emit_zeta(&z, out.text);
        }
        Command::Entropy {
            input,
            samples,
            components,
            out,
        } => {
            let (mu, class, reg) = parse_input(&input)?;
            let s = motivic_entropy(&mu, &class, input.order, &reg)?;
            let sampled: Vec<(f64, f64)> = samples
                .iter()
                .map(|&t| Ok((t, s.eval_f64(t)?)))
                .collect::<Result<_>>()?;
            let split = if components {
                Some(poincare_entropy_components(&class, input.order)?)
            } else {
                None
            };
            if out.text {
                println!("{}", logseries_text(&s));
                for (t, v) in &sampled {
                    println!("t={t}: {v}");
                }
                if let Some(p) = &split {
                    println!("split regular: {}", p.regular);
                    println!("split log t:   {}", p.log_t);
                    println!("split log z:   {}", p.log_z);
                }
            } else {
                let mut doc = json!({"schema": SCHEMA, "entropy": s.to_json()});
                if !sampled.is_empty() {
                    doc["samples"] = sampled
                        .iter()
                        .map(|(t, v)| json!({"t": t, "value": v}))
                        .collect();
                }
                if let Some(p) = &split {
                    doc["components"] = json!({
                        "regular": p.regular.to_json()["coeffs"],
                        "log_t": p.log_t.to_json()["coeffs"],
                        "log_z": p.log_z.to_json()["coeffs"],
                    });
                }
                print_json(doc);
            }
        }
        Command::HwZeta { def, order, out } => {
            let text = fs::read_to_string(&def)?;
            let data = hasse_weil_zeta(&FqVarietyDef::parse(&text)?, order)?;
            if out.text {
                println!("point counts:  {:?}", data.point_counts);
                println!("closed points: {:?}", data.closed_points);
                println!("zeta: {}", data.zeta.series());
            } else {
                print_json(json!({
                    "schema": SCHEMA,
                    "point_counts": data.point_counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "closed_points": data.closed_points.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "zeta": data.zeta.to_json(),
                }));
            }
        }
        Command::GlobalEntropy {
            variety,
            s,
            pmax,
            kmax,
            json: as_json,
        } => {
            let class = parse_class(&variety)?;
            let eval = global_entropy(&class, s, pmax, kmax)?;
            if as_json {
                print_json(json!({
                    "schema": SCHEMA,
                    "s": eval.s,
                    "value": eval.value,
                    "logL": eval.logl,
                    "sdds": eval.sdds,
                    "pmax": eval.pmax,
                    "kmax": eval.kmax,
                }));
            } else {
                println!(
                    "S({variety}, s={}) = {} (log L = {}, -s dlogL/ds = {}; pmax {}, kmax {})",
                    eval.s, eval.value, eval.logl, eval.sdds, eval.pmax, eval.kmax
                );
            }
        }
        Command::Infoloss { kind } => match kind {
            InfolossCommand::Proper {
                src,
                dst,
                order,
                kl,
                out,
            } => {
                let f = ProperMorphismDesc::new(load_zeta(&src, order)?, load_zeta(&dst, order)?);
                let loss = proper_loss(&f)?;
                let kl = run_kl(&kl, order, |t0, d| proper_loss_kl_oracle(&f, d, t0))?;
                emit_loss(&loss, kl, out.text);
            }
            InfolossCommand::Flat {
                src,
                dst,
                deg,
                order,
                kl,
                out,
            } => {
                let f = FlatFiniteMorphismDesc::new(
                    load_zeta(&src, order)?,
                    load_zeta(&dst, order)?,
                    deg,
                );
                let loss = flat_loss(&f)?;
                let kl = run_kl(&kl, order, |t0, d| flat_loss_kl_oracle(&f, d, t0))?;
                emit_loss(&loss, kl, out.text);
            }
            InfolossCommand::Ringhom {
                phi,
                mu,
                muprime,
                variety,
                order,
                fq,
                out,
            } => {
                let phi = parse_phi(&phi)?;
                let mu = parse_measure(&mu)?;
                let mu2 = parse_measure(&muprime)?;
                let class = parse_class(&variety)?;
                let reg = load_registry(&fq)?;
                let loss = ringhom_loss(&phi, &mu, &mu2, &class, order, &reg)?;
                emit_loss(&loss, None, out.text);
            }
            InfolossCommand::EulerFlat {
                chi_x,
                chi_y,
                deg,
                chi_s,
                chi_f,
                order,
                out,
            } => {
                let d = EulerFlatDesc::new(chi_x, chi_y, deg, chi_s, chi_f)?;
                let loss = euler_flat_loss(&d, order)?;
                emit_loss(&loss, None, out.text);
            }
        },
        Command::Verify { suite } => {
            let checks = run_suite(&suite)?;
            let mut failed = 0usize;
            for c in &checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                match &c.detail {
                    Some(d) => println!("{mark}  {} ({d})", c.name),
                    None => println!("{mark}  {}", c.name),
                }
                if !c.passed {
                    failed += 1;
                }
            }
            println!("{} checks, {} failed", checks.len(), failed);
            return Ok(failed == 0);
        }
    }
    Ok(true)
}

/// Parses argv and runs the command; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_and_phi_parsing() {
        assert!(matches!(parse_measure("chi"), Ok(Measure::EulerChar)));
        assert!(matches!(parse_measure("poincare"), Ok(Measure::Poincare)));
        assert!(matches!(
            parse_measure("count:5"),
            Ok(Measure::PointCount(5))
        ));
        assert!(parse_measure("hodge").is_err());
        assert!(matches!(parse_phi("z->-1"), Ok(RingHom::EvalZ(_))));
        assert!(matches!(parse_phi("id:Q"), Ok(RingHom::Identity(Ring::Q))));
        assert!(parse_phi("conj").is_err());
    }

    #[test]
    fn argv_shapes_parse() {
        assert!(Cli::try_parse_from([
            "motent", "zeta", "--measure", "chi", "--variety", "P^2", "--order", "8"
        ])
        .is_ok());
        assert!(Cli::try_parse_from([
            "motent",
            "infoloss",
            "ringhom",
            "--phi",
            "z->-1",
            "--mu",
            "poincare",
            "--muprime",
            "chi",
            "--variety",
            "P^1",
        ])
        .is_ok());
        assert!(Cli::try_parse_from(["motent", "zeta", "--frobnicate"]).is_err());
        assert!(Cli::try_parse_from(["motent"]).is_err());
    }
}
