//! The `qpoisson` command line.

use std::path::Path;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::coeff::{self, Coeff};
use crate::contraction::{contract_bivector, ContractionPlan, Side};
use crate::error::{Error, Result};
use crate::expr::terms_from_json;
use crate::leaves::{self, Form, NumericBivector, NumericPoint};
use crate::necklace::{self, NecklaceElement};
use crate::quiver::{DimensionVector, Quiver};
use crate::representation::{self, Budget, Coordinates, TraceWeights, DEFAULT_BUDGET};
use crate::yang_baxter::{self, RMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qpoisson", version, about = "Poisson structures on quiver path algebras")]
pub struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct QuiverArg {
    /// Quiver file, or inline text with ` / ` separating lines.
    #[arg(short = 'q', long = "quiver")]
    pub quiver: String,
}

#[derive(Debug, Args)]
pub struct RepArgs {
    /// Dimension vector, e.g. `1,2`.
    #[arg(long)]
    pub dim: String,
    /// Trace weights per vertex; defaults to all ones.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Maximum number of symbolic terms before refusing.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical necklace form of an element.
    Normalize {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
    },
    /// Schouten bracket of two elements.
    Bracket {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
    },
    /// Whether a bivector brackets to zero with itself.
    IsPoisson {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
    },
    /// Bracket of two necklaces induced by a bivector.
    H0Bracket {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'p', long)]
        pi: String,
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
    },
    /// Double bracket of two arrows induced by a bivector.
    DoubleBracket {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'p', long)]
        pi: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Split an element into homogeneous parts.
    Parts {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
    },
    /// Associative Yang-Baxter r-matrices.
    #[command(subcommand)]
    Ayb(AybCommand),
    /// Linear bivectors and associative algebras.
    #[command(subcommand)]
    Linear(LinearCommand),
    /// Polyvector field on a representation space.
    Induce {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Jacobiator of the induced bracket.
    Jacobi {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Compare the induced field of a bracket with the bracket of fields.
    HomCheck {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Invariance of the induced field under random base changes.
    Invariance {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
    /// Contract a single arrow.
    Contract {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
        #[arg(long)]
        arrow: String,
        #[arg(long, default_value = "tail")]
        side: String,
        /// Also write the contracted quiver here.
        #[arg(long)]
        quiver_out: Option<String>,
    },
    /// Contract several arrows into one vertex.
    ContractMulti {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
        #[arg(long, value_delimiter = ',')]
        arrows: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<String>>,
        #[arg(long)]
        quiver_out: Option<String>,
    },
    /// Numeric checks on pairs of k×k matrices.
    #[command(subcommand)]
    Leaf(LeafCommand),
}

#[derive(Debug, Subcommand)]
pub enum AybCommand {
    /// Check the associative Yang-Baxter equation for an r-matrix file.
    Check {
        r_file: String,
        #[command(flatten)]
        q: QuiverArg,
    },
    /// The triangular solution on the m-arrow Kronecker quiver.
    Aguiar {
        m: usize,
        #[arg(short = 'q', long = "quiver")]
        quiver: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum LinearCommand {
    /// Structure constants of a linear bivector.
    ToAlgebra {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
    },
    /// Poisson and associativity of a linear bivector.
    Check {
        #[command(flatten)]
        q: QuiverArg,
        #[arg(short = 'e', long)]
        element: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum LeafCommand {
    /// Ranks of the deformed bracket at random points.
    Rank {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "0")]
        eps: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Compare a two-form with the inverse of its bracket.
    Symplectic {
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Group law, pushforward and Lie derivative of the deformation flow.
    FlowCheck {
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Trace powers of X under the linear bracket.
    Commute {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    holds: bool,
    text: String,
    json: Value,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { holds: true, text, json }
    }

    fn check(holds: bool, text: String, json: Value) -> Self {
        Report { holds, text, json }
    }
}

/// `-e1`/`-e2` are accepted as spellings of `--e1`/`--e2`.
pub fn normalize_args<I: IntoIterator<Item = String>>(args: I) -> Vec<String> {
    args.into_iter()
        .map(|a| match a.as_str() {
            "-e1" => "--e1".to_string(),
            "-e2" => "--e2".to_string(),
            _ => a,
        })
        .collect()
}

pub fn run<I: IntoIterator<Item = String>>(args: I) -> Outcome {
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(r) => {
            let stdout = match cli.format {
                Format::Text => r.text,
                Format::Json => {
                    let mut v = r.json;
                    if let Value::Object(m) = &mut v {
                        m.insert("schema".into(), json!(1));
                        m.insert("holds".into(), json!(r.holds));
                    }
                    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
                }
            };
            Outcome {
                code: if r.holds { 0 } else { 1 },
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: match e {
                Error::BudgetExceeded { .. } => 3,
                _ => 2,
            },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn read_source(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| Error::Usage(format!("cannot read {arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn load_quiver(arg: &str) -> Result<Arc<Quiver>> {
    let src = if Path::new(arg).is_file() {
        read_source(arg)?
    } else {
        arg.replace(" / ", "\n")
    };
    Ok(Arc::new(Quiver::parse(&src)?))
}

fn load_element(arg: &str, q: &Arc<Quiver>) -> Result<NecklaceElement> {
    let src = read_source(arg)?;
    let trimmed = src.trim();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| Error::Usage(format!("bad JSON element: {e}")))?;
        let mut out = NecklaceElement::zero(q.clone());
        for (w, c) in terms_from_json(q, &v)? {
            out.add_word(&w, c);
        }
        return Ok(out);
    }
    NecklaceElement::parse(trimmed, q)
}

fn parse_coeff(s: &str) -> Result<Coeff> {
    coeff::parse(s.trim()).ok_or_else(|| Error::Usage(format!("malformed rational `{s}`")))
}

fn element_report(e: &NecklaceElement) -> Report {
    Report::ok(format!("{e}\n"), json!({ "element": e.to_json() }))
}

fn coords_for(q: &Arc<Quiver>, rep: &RepArgs) -> Result<(Arc<Coordinates>, TraceWeights)> {
    let dims = DimensionVector::parse(&rep.dim)?;
    let coords = Arc::new(Coordinates::new(q.clone(), dims)?);
    let lambda = match &rep.lambda {
        Some(s) => TraceWeights::parse(s)?,
        None => TraceWeights::ones(q.num_vertices()),
    };
    if lambda.0.len() != q.num_vertices() {
        return Err(Error::Usage(format!("{} trace weights for {} vertices", lambda.0.len(), q.num_vertices())));
    }
    Ok((coords, lambda))
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Normalize { q, element } => {
            let q = load_quiver(&q.quiver)?;
            Ok(element_report(&load_element(element, &q)?))
        }
        Command::Bracket { q, e1, e2 } => {
            let q = load_quiver(&q.quiver)?;
            let b = necklace::schouten(&load_element(e1, &q)?, &load_element(e2, &q)?)?;
            Ok(element_report(&b))
        }
        Command::IsPoisson { q, element } => {
            let q = load_quiver(&q.quiver)?;
            let rep = necklace::is_poisson(&load_element(element, &q)?)?;
            let text = if rep.holds {
                "poisson: yes\n".to_string()
            } else {
                format!("poisson: no\nresidual: {}\n", rep.residual)
            };
            Ok(Report::check(rep.holds, text, json!({ "residual": rep.residual.to_json() })))
        }
        Command::H0Bracket { q, pi, e1, e2 } => {
            let q = load_quiver(&q.quiver)?;
            let pi = load_element(pi, &q)?;
            let b = necklace::h0_bracket(&load_element(e1, &q)?, &load_element(e2, &q)?, &pi)?;
            Ok(element_report(&b))
        }
        Command::DoubleBracket { q, pi, a, b } => {
            let q = load_quiver(&q.quiver)?;
            let pi = load_element(pi, &q)?;
            let ia = q.arrow_index(a).ok_or_else(|| Error::UnknownArrow(a.clone()))?;
            let ib = q.arrow_index(b).ok_or_else(|| Error::UnknownArrow(b.clone()))?;
            let t = necklace::double_bracket(&pi, ia, ib)?;
            let shown = t.display(&q);
            Ok(Report::ok(format!("{shown}\n"), json!({ "tensor": shown })))
        }
        Command::Parts { q, element } => {
            let q = load_quiver(&q.quiver)?;
            let e = load_element(element, &q)?;
            let parts = e.homogeneous_parts();
            let mut text = String::new();
            let mut list = Vec::new();
            for (d, p) in &parts {
                text.push_str(&format!("degree {d}: {p}\n"));
                list.push(json!({ "degree": d, "element": p.to_json() }));
            }
            Ok(Report::ok(text, json!({ "parts": list })))
        }
        Command::Ayb(AybCommand::Check { r_file, q }) => {
            let q = load_quiver(&q.quiver)?;
            let r = RMatrix::parse(&read_source(r_file)?, q)?;
            let rep = yang_baxter::ayb_check(&r);
            let pi = yang_baxter::rmatrix_to_bivector(&r);
            let text = format!(
                "associative Yang-Baxter: {}\nresidual terms: {}\nbivector: {pi}\n",
                if rep.holds { "yes" } else { "no" },
                rep.residual.len()
            );
            Ok(Report::check(
                rep.holds,
                text,
                json!({ "residual_terms": rep.residual.len(), "bivector": pi.to_json() }),
            ))
        }
        Command::Ayb(AybCommand::Aguiar { m, quiver }) => {
            let q = match quiver {
                Some(s) => load_quiver(s)?,
                None => Arc::new(yang_baxter::kronecker(*m)),
            };
            let r = yang_baxter::aguiar(*m, q)?;
            let pi = yang_baxter::rmatrix_to_bivector(&r);
            let holds = yang_baxter::ayb_check(&r).holds;
            let text = format!("{}bivector: {pi}\n", r.to_file());
            Ok(Report::check(holds, text, json!({ "r": r.to_file(), "bivector": pi.to_json() })))
        }
        Command::Linear(LinearCommand::ToAlgebra { q, element }) => {
            let q = load_quiver(&q.quiver)?;
            let j = yang_baxter::linear_to_algebra(&load_element(element, &q)?)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for a in 0..j.num_arrows {
                for b in 0..j.num_arrows {
                    let prod = j.product(a, b);
                    if prod.is_empty() {
                        continue;
                    }
                    let rhs: Vec<String> = prod
                        .iter()
                        .map(|(x, c)| format!("{} {}", coeff::format(c), q.arrow(*x).name))
                        .collect();
                    text.push_str(&format!("{} * {} = {}\n", q.arrow(a).name, q.arrow(b).name, rhs.join(" + ")));
                }
            }
            for ((x, a, b), c) in &j.entries {
                rows.push(json!({
                    "x": q.arrow(*x).name, "a": q.arrow(*a).name, "b": q.arrow(*b).name, "coeff": coeff::format(c)
                }));
            }
            Ok(Report::ok(text, json!({ "structure_constants": rows })))
        }
        Command::Linear(LinearCommand::Check { q, element }) => {
            let q = load_quiver(&q.quiver)?;
            let pi = load_element(element, &q)?;
            let assoc = yang_baxter::associativity_check(&yang_baxter::linear_to_algebra(&pi)?);
            let poisson = necklace::is_poisson(&pi)?.holds;
            let text = format!("associative: {assoc}\npoisson: {poisson}\n");
            Ok(Report::check(
                assoc && poisson,
                text,
                json!({ "associative": assoc, "poisson": poisson }),
            ))
        }
        Command::Induce { q, element, rep } => {
            let q = load_quiver(&q.quiver)?;
            let (coords, lambda) = coords_for(&q, rep)?;
            let f = representation::psi(&load_element(element, &q)?, &coords, &lambda, &mut Budget::new(rep.budget))?;
            Ok(Report::ok(format!("{}\n", f.display()), json!({ "field": f.to_json() })))
        }
        Command::Jacobi { q, element, rep } => {
            let q = load_quiver(&q.quiver)?;
            let (coords, lambda) = coords_for(&q, rep)?;
            let r = representation::jacobi_residual(
                &load_element(element, &q)?,
                &coords,
                &lambda,
                &mut Budget::new(rep.budget),
            )?;
            Ok(Report::check(
                r.is_zero(),
                format!("jacobiator: {}\n", r.display()),
                json!({ "jacobiator": r.to_json() }),
            ))
        }
        Command::HomCheck { q, e1, e2, rep } => {
            let q = load_quiver(&q.quiver)?;
            let (coords, lambda) = coords_for(&q, rep)?;
            let r = representation::bracket_homomorphism_check(
                &load_element(e1, &q)?,
                &load_element(e2, &q)?,
                &coords,
                &lambda,
                &mut Budget::new(rep.budget),
            )?;
            Ok(Report::check(
                r.holds,
                format!("image of bracket: {}\nbracket of images: {}\n", r.lhs.display(), r.rhs.display()),
                json!({ "lhs": r.lhs.to_json(), "rhs": r.rhs.to_json() }),
            ))
        }
        Command::Invariance { q, element, rep, samples } => {
            let q = load_quiver(&q.quiver)?;
            let (coords, lambda) = coords_for(&q, rep)?;
            let f = representation::psi(&load_element(element, &q)?, &coords, &lambda, &mut Budget::new(rep.budget))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let holds = representation::invariance_check(&f, *samples, &mut rng)?;
            Ok(Report::check(
                holds,
                format!("invariant: {holds}\n"),
                json!({ "samples": samples, "point_seed": cli.seed }),
            ))
        }
        Command::Contract { q, element, arrow, side, quiver_out } => {
            let q = load_quiver(&q.quiver)?;
            let pi = load_element(element, &q)?;
            let plan = ContractionPlan::single(&q, arrow, side.parse::<Side>()?)?;
            contraction_report(&pi, &plan, quiver_out.as_deref())
        }
        Command::ContractMulti { q, element, arrows, eps, quiver_out } => {
            let q = load_quiver(&q.quiver)?;
            let pi = load_element(element, &q)?;
            let names: Vec<&str> = arrows.iter().map(String::as_str).collect();
            let eps = eps
                .as_ref()
                .map(|v| v.iter().map(|s| parse_coeff(s)).collect::<Result<Vec<_>>>())
                .transpose()?;
            let plan = ContractionPlan::multi(&q, &names, eps)?;
            contraction_report(&pi, &plan, quiver_out.as_deref())
        }
        Command::Leaf(cmd) => leaf(cmd, cli.seed),
    }
}

fn contraction_report(pi: &NecklaceElement, plan: &ContractionPlan, out: Option<&str>) -> Result<Report> {
    let (qa, pa) = contract_bivector(pi, plan)?;
    let quiver_text = qa.to_string();
    if let Some(path) = out {
        std::fs::write(path, &quiver_text).map_err(|e| Error::Usage(format!("cannot write {path}: {e}")))?;
    }
    let text = format!("{quiver_text}element: {pa}\n");
    Ok(Report::ok(text, json!({ "quiver": quiver_text, "element": pa.to_json() })))
}

fn leaf(cmd: &LeafCommand, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = leaves::two_loops();
    let parse = |s: &str| NecklaceElement::parse(s, &q);
    match cmd {
        LeafCommand::Rank { k, eps, samples } => {
            let pi = leaves::deformed_bracket(&parse_coeff(eps)?);
            let nb = NumericBivector::new(&pi)?;
            let ranks: Vec<usize> = (0..*samples)
                .map(|_| nb.at(&NumericPoint::random(*k, 2, &mut rng)).map(|b| leaves::leaf_rank(&b)))
                .collect::<Result<_>>()?;
            let text = format!("ranks: {ranks:?} of {}\n", 2 * k * k);
            Ok(Report::ok(text, json!({ "point_seed": seed, "ranks": ranks })))
        }
        LeafCommand::Symplectic { form, k, eps, samples } => {
            let eps_c = parse_coeff(eps)?;
            let (form, pi) = match form.parse::<Form>()? {
                Form::I => (Form::I, parse(leaves::LINEAR_BRACKET)?),
                Form::II => (Form::II, parse(leaves::CUBIC_BRACKET)?),
                Form::Inverse => (Form::Inverse, parse(leaves::QUADRATIC_BRACKET)?),
                Form::Bb(_) => (Form::Bb(coeff::to_f64(&eps_c)), leaves::deformed_bracket(&eps_c)),
            };
            let mut residuals = Vec::new();
            let mut signs = Vec::new();
            for _ in 0..*samples {
                let p = NumericPoint::sample(*k, 2, &mut rng, |p| form.regular(p));
                let r = leaves::symplectic_check(form, &pi, &p)?;
                residuals.push(r.residual);
                signs.push(r.sign);
            }
            let worst = residuals.iter().fold(0.0f64, |a, &b| a.max(b));
            let text = format!("max residual: {worst:e}\nsigns: {signs:?}\n");
            Ok(Report::check(
                worst < 1e-8,
                text,
                json!({ "point_seed": seed, "residuals": residuals, "signs": signs }),
            ))
        }
        LeafCommand::FlowCheck { eps, k, samples } => {
            let e = coeff::to_f64(&parse_coeff(eps)?);
            let lin = parse(leaves::LINEAR_BRACKET)?;
            let cub = parse(leaves::CUBIC_BRACKET)?;
            let neg = -&cub;
            let (mut group, mut push, mut reversed, mut fd4, mut fd5) = (0.0f64, 0.0f64, 0.0f64, 0.0, 0.0);
            let mut signs = Vec::new();
            for _ in 0..*samples {
                let p = NumericPoint::sample(*k, 2, &mut rng, |p| Form::Bb(e).regular(p) && Form::Bb(-e).regular(p));
                group = group.max(leaves::group_law_residual(0.5 * e, 0.5 * e, &p)?);
                push = push.max(leaves::pushforward_check(&lin, &cub, e, &p)?);
                reversed = reversed.max(leaves::pushforward_check(&lin, &neg, e, &p)?);
                let a = leaves::deformation_consistency(&lin, &cub, &p, 1e-4)?;
                let b = leaves::deformation_consistency(&lin, &cub, &p, 1e-5)?;
                fd4 += a.residual;
                fd5 += b.residual;
                signs.push(a.sign);
            }
            let ratio = fd4 / fd5;
            let text = format!(
                "group law: {group:e}\npushforward to the deformed bracket: {push:e}\n\
                 pushforward to the oppositely deformed bracket: {reversed:e}\n\
                 lie derivative residual ratio (h = 1e-4 / 1e-5): {ratio:.1}\nlie derivative signs: {signs:?}\n"
            );
            Ok(Report::check(
                group < 1e-10 && push < 1e-7,
                text,
                json!({
                    "point_seed": seed,
                    "residuals": { "group_law": group, "pushforward": push, "pushforward_reversed": reversed,
                                   "lie_h1e-4": fd4, "lie_h1e-5": fd5 },
                    "ratio": ratio,
                }),
            ))
        }
        LeafCommand::Commute { k, samples } => {
            let lin = parse(leaves::LINEAR_BRACKET)?;
            let mut worst = 0.0f64;
            let mut control = Vec::new();
            for _ in 0..*samples {
                let p = NumericPoint::random(*k, 2, &mut rng);
                worst = worst.max(leaves::commuting_hamiltonians_check(&lin, &p)?);
                let b = leaves::bivector_at(&lin, &p)?;
                let (gx, gy) = (leaves::trace_power_gradient(&p, 0, 1), leaves::trace_power_gradient(&p, 1, 1));
                control.push(b.pair(&gx, &gy).abs());
            }
            let text = format!("max |{{tr X^i, tr X^j}}|: {worst:e}\n|{{tr X, tr Y}}|: {control:?}\n");
            Ok(Report::check(
                worst < 1e-10,
                text,
                json!({ "point_seed": seed, "residuals": [worst], "control": control }),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> Outcome {
        run(std::iter::once("qpoisson").chain(args.iter().copied()).map(String::from))
    }

    const LOOPS: &str = "vertices: 1 / arrow x 1 -> 1 / arrow y 1 -> 1";

    #[test]
    fn short_element_flags_are_rewritten() {
        let out = call(&["bracket", "-q", LOOPS, "-e1", "y x y y'", "-e2", "[x x', x'] + [y x', y']"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let q = leaves::two_loops();
        let got = NecklaceElement::parse(out.stdout.trim(), &q).unwrap();
        assert_eq!(got, NecklaceElement::parse(leaves::CUBIC_BRACKET, &q).unwrap());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["is-poisson", "-q", LOOPS, "-e", "[x y', x x']"]).code, 0);
        assert_eq!(call(&["is-poisson", "-q", LOOPS, "-e", "x x' y' + y x' x'"]).code, 1);
        assert_eq!(call(&["is-poisson", "-q", LOOPS, "-e", "z'"]).code, 2);
        assert_eq!(call(&["frobnicate"]).code, 2);
        let out = call(&["induce", "-q", LOOPS, "-e", "[x y', x x']", "--dim", "3", "--budget", "10"]);
        assert_eq!(out.code, 3, "{}", out.stderr);
    }

    #[test]
    fn json_output_is_versioned() {
        let out = call(&["--format", "json", "normalize", "-q", LOOPS, "-e", "x' x y'"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v["element"]["terms"].is_array());
    }
}
