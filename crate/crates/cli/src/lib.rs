//! Command-line front end: loads instances, runs one construction per
//! subcommand and renders a canonical JSON report.
//!
//! Exit codes: 0 success, 1 a structure clause failed, 2 malformed input,
//! 3 a precondition of the requested construction failed.

pub mod canonical;
pub mod document;

use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand};
use indexmap::IndexMap;
use thiserror::Error;

use nestmod::bimodule::{bimodule_closure, bimodule_violation, largest_bimodule, phi_of};
use nestmod::fixtures::{example_5x5, random_instance};
use nestmod::lie::{
    band_annihilation_check, diagonal_algebra, expectation_split_check, k_decompose, lie_closure,
    lie_ideal_refinement_check, lie_violation, verify_structure_theorem, Check, Witness,
};
use nestmod::{InstanceSpec, Operator, OperatorSubspace};

use document::{grid_of, InstanceDocument, InstanceReport, ReportDocument, Summary, WitnessDocument};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

#[derive(Debug, Parser)]
#[command(name = "nestmod", version, about = "Bimodules and Lie modules of finite nest algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lie module generated by the input matrices.
    CloseLie(SourceArgs),
    /// Bimodule generated by the input matrices.
    CloseBimodule(SourceArgs),
    /// Largest bimodule J(M) inside the span M of the input matrices.
    LargestBimodule(SourceArgs),
    /// Nest map φ of the span of the input matrices.
    Phi(SourceArgs),
    /// K(L) and its four parts; the input must span a Lie module.
    KDecompose(SourceArgs),
    /// Diagonal algebra D_K; the input must span a bimodule.
    DAlgebra(SourceArgs),
    /// Check J(L) ⊆ L ⊆ K(L) + D_K for the Lie module generated by the input.
    Verify(SourceArgs),
    /// Emit instance documents.
    Gen(SourceArgs),
}

#[derive(Debug, Clone, clap::Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "example", "random"])))]
pub struct SourceArgs {
    /// Instance document (JSON).
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// The built-in 5×5 example.
    #[arg(long)]
    pub example: bool,
    /// Seeded random instances; trial t uses seed SEED + t.
    #[arg(long, num_args = 5, value_names = ["N", "M", "G", "SEED", "TRIALS"])]
    pub random: Option<Vec<u64>>,
    /// Rank and membership tolerance; overrides the document's.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Include orthonormal bases in the report.
    #[arg(long)]
    pub bases: bool,
    /// Write to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

/// Rendered output and process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Ok,
    ClauseFailure,
    Precondition,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::ClauseFailure => 1,
            Status::Precondition => 3,
        }
    }
}

fn core(e: nestmod::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn load(args: &SourceArgs) -> Result<(Vec<InstanceSpec>, Option<f64>), CliError> {
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let doc: InstanceDocument =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return Ok((vec![doc.to_spec()?], doc.tolerance));
    }
    if args.example {
        return Ok((vec![example_5x5()], None));
    }
    let r = args.random.as_deref().unwrap_or_default();
    let &[n, m, g, seed, trials] = r else {
        return Err(CliError::Input("--random takes N M G SEED TRIALS".into()));
    };
    if trials == 0 {
        return Err(CliError::Input("TRIALS must be at least 1".into()));
    }
    let small = |v: u64| usize::try_from(v).map_err(|_| CliError::Input(format!("{v} is too large")));
    let (n, m, g) = (small(n)?, small(m)?, small(g)?);
    let specs = (0..trials)
        .map(|t| random_instance(n, m, g, seed.wrapping_add(t)).map_err(core))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((specs, None))
}

fn tolerance(args: &SourceArgs, from_doc: Option<f64>) -> Result<f64, CliError> {
    let tol = args.tol.or(from_doc).unwrap_or(DEFAULT_TOL);
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err(CliError::Input(format!("tolerance must be finite and nonnegative, got {tol}")))
    }
}

fn blank_report(spec: &InstanceSpec) -> InstanceReport {
    InstanceReport {
        label: spec.label.clone(),
        nest: spec.nest.boundaries().to_vec(),
        rng_seed: spec.rng_seed,
        ..Default::default()
    }
}

fn witness_doc(check: &str, w: &Witness) -> WitnessDocument {
    WitnessDocument {
        check: check.into(),
        note: w.note.clone(),
        residual: w.residual,
        matrix: grid_of(&w.matrix),
    }
}

fn raw_witness(check: &str, note: &str, matrix: &Operator, residual: f64) -> WitnessDocument {
    WitnessDocument {
        check: check.into(),
        note: note.into(),
        residual,
        matrix: grid_of(matrix),
    }
}

fn dims(entries: &[(&str, usize)]) -> IndexMap<String, usize> {
    entries.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

struct Run<'a> {
    spec: &'a InstanceSpec,
    tol: f64,
    bases: bool,
}

impl Run<'_> {
    fn span(&self) -> Result<OperatorSubspace, CliError> {
        OperatorSubspace::span(self.spec.nest.dimension(), self.spec.seed_matrices.iter(), self.tol).map_err(core)
    }

    fn add_basis(&self, report: &mut InstanceReport, name: &str, space: &OperatorSubspace) {
        if self.bases {
            report
                .bases
                .insert(name.into(), space.basis().iter().map(grid_of).collect());
        }
    }

    fn close(&self, lie: bool) -> Result<(InstanceReport, Status), CliError> {
        let nest = &self.spec.nest;
        let seed = self.span()?;
        let closure = if lie {
            lie_closure(&seed, nest)
        } else {
            bimodule_closure(&seed, nest)
        }
        .map_err(core)?;
        let mut r = blank_report(self.spec);
        r.dimensions = dims(&[("seed", seed.dim()), ("closure", closure.dim())]);
        self.add_basis(&mut r, "closure", &closure);
        Ok((r, Status::Ok))
    }

    fn largest_bimodule(&self) -> Result<(InstanceReport, Status), CliError> {
        let m = self.span()?;
        let j = largest_bimodule(&m, &self.spec.nest).map_err(core)?;
        let mut r = blank_report(self.spec);
        r.dimensions = dims(&[("m", m.dim()), ("j", j.dim())]);
        self.add_basis(&mut r, "j", &j);
        Ok((r, Status::Ok))
    }

    fn phi(&self) -> Result<(InstanceReport, Status), CliError> {
        let m = self.span()?;
        let phi = phi_of(&m, &self.spec.nest).map_err(core)?;
        let mut r = blank_report(self.spec);
        r.dimensions = dims(&[("m", m.dim())]);
        r.phi = Some(phi.table().to_vec());
        Ok((r, Status::Ok))
    }

    fn k_decompose(&self) -> Result<(InstanceReport, Status), CliError> {
        let nest = &self.spec.nest;
        let l = self.span()?;
        let mut r = blank_report(self.spec);
        if let Some(w) = lie_violation(&l, nest).map_err(core)? {
            r.dimensions = dims(&[("l", l.dim())]);
            r.precondition_failure = Some("input span is not a Lie module".into());
            r.witnesses.push(witness_doc("lie_module", &w));
            return Ok((r, Status::Precondition));
        }
        let k = k_decompose(&l, nest).map_err(core)?;
        r.dimensions = dims(&[
            ("l", l.dim()),
            ("k_v", k.k_v.dim()),
            ("k_l", k.k_l.dim()),
            ("k_d", k.k_d.dim()),
            ("k_delta", k.k_delta.dim()),
            ("k", k.k_total.dim()),
        ]);
        for (name, space) in [
            ("k_v", &k.k_v),
            ("k_l", &k.k_l),
            ("k_d", &k.k_d),
            ("k_delta", &k.k_delta),
            ("k", &k.k_total),
        ] {
            self.add_basis(&mut r, name, space);
        }
        Ok((r, Status::Ok))
    }

    fn d_algebra(&self) -> Result<(InstanceReport, Status), CliError> {
        let nest = &self.spec.nest;
        let k = self.span()?;
        let mut r = blank_report(self.spec);
        if let Some((m, res)) = bimodule_violation(&k, nest).map_err(core)? {
            r.dimensions = dims(&[("k", k.dim())]);
            r.precondition_failure = Some("input span is not a bimodule".into());
            r.witnesses
                .push(raw_witness("bimodule", "product with a unit of T(N) outside the span", &m, res));
            return Ok((r, Status::Precondition));
        }
        let dk = diagonal_algebra(&k, nest).map_err(core)?;
        r.dimensions = dims(&[("k", k.dim()), ("d_k", dk.space.dim())]);
        r.phi = Some(dk.phi.table().to_vec());
        r.bands = Some(dk.bands.iter().map(|b| [b.index, b.lower]).collect());
        self.add_basis(&mut r, "d_k", &dk.space);
        Ok((r, Status::Ok))
    }

    fn verify(&self) -> Result<(InstanceReport, Status), CliError> {
        let nest = &self.spec.nest;
        let report = verify_structure_theorem(&self.spec.seed_matrices, nest, self.tol).map_err(core)?;
        let s = &report.spaces;
        let mut checks: Vec<Check> = report.clauses.clone();
        checks.push(band_annihilation_check(&s.l, nest).map_err(core)?);
        checks.push(expectation_split_check(&s.l, &s.k.k_total, &s.d_k.space, nest).map_err(core)?);

        let algebra = OperatorSubspace::span(nest.dimension(), nest.algebra_basis().iter(), self.tol).map_err(core)?;
        let l_in_algebra = algebra.includes(&s.l).map_err(core)?;

        let d = report.dims;
        let mut r = blank_report(self.spec);
        r.dimensions = dims(&[
            ("seed", d.seed),
            ("l", d.l),
            ("j", d.j),
            ("k_v", d.k_v),
            ("k_l", d.k_l),
            ("k_d", d.k_d),
            ("k_delta", d.k_delta),
            ("k", d.k),
            ("d_k", d.d_k),
        ]);
        r.phi = Some(report.phi_k().table().to_vec());
        r.bands = Some(s.d_k.bands.iter().map(|b| [b.index, b.lower]).collect());
        for c in &checks {
            r.clauses.insert(c.name.into(), c.holds);
            if let Some(w) = &c.witness {
                r.witnesses.push(witness_doc(c.name, w));
            }
        }
        if l_in_algebra {
            let holds = lie_ideal_refinement_check(&s.l, nest).map_err(core)?;
            r.clauses.insert("lie_ideal_refinement".into(), holds);
        }
        r.informational.insert("j_not_in_k".into(), !report.j_in_k);
        r.informational.insert("l_not_in_k".into(), !report.l_in_k);
        r.informational.insert("l_in_algebra".into(), l_in_algebra);
        if self.bases {
            for (name, space) in [("l", &s.l), ("j", &s.j), ("k", &s.k.k_total), ("d_k", &s.d_k.space)] {
                r.bases.insert(name.into(), space.basis().iter().map(grid_of).collect());
            }
        }
        let status = if r.clauses.values().all(|&b| b) {
            Status::Ok
        } else {
            Status::ClauseFailure
        };
        Ok((r, status))
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::CloseLie(_) => "close-lie",
        Command::CloseBimodule(_) => "close-bimodule",
        Command::LargestBimodule(_) => "largest-bimodule",
        Command::Phi(_) => "phi",
        Command::KDecompose(_) => "k-decompose",
        Command::DAlgebra(_) => "d-algebra",
        Command::Verify(_) => "verify",
        Command::Gen(_) => "gen",
    }
}

impl Command {
    pub fn args(&self) -> &SourceArgs {
        match self {
            Command::CloseLie(a)
            | Command::CloseBimodule(a)
            | Command::LargestBimodule(a)
            | Command::Phi(a)
            | Command::KDecompose(a)
            | Command::DAlgebra(a)
            | Command::Verify(a)
            | Command::Gen(a) => a,
        }
    }
}

fn render<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    canonical::to_string(value).map_err(|e| CliError::Io(e.to_string()))
}

/// Runs a parsed command. Input errors are returned; every other outcome is
/// a rendered document with its exit code.
pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    let args = cmd.args();
    let (specs, doc_tol) = load(args)?;
    let tol = tolerance(args, doc_tol)?;

    if let Command::Gen(_) = cmd {
        // one document per line
        let mut text = String::new();
        for spec in &specs {
            let mut doc = InstanceDocument::from_spec(spec);
            doc.tolerance = args.tol;
            text.push_str(&render(&doc)?);
        }
        return Ok(Outcome { text, exit_code: 0 });
    }

    let mut results = Vec::with_capacity(specs.len());
    let mut worst = Status::Ok;
    let mut passed = 0;
    for spec in &specs {
        let run = Run {
            spec,
            tol,
            bases: args.bases,
        };
        let (report, status) = match cmd {
            Command::CloseLie(_) => run.close(true),
            Command::CloseBimodule(_) => run.close(false),
            Command::LargestBimodule(_) => run.largest_bimodule(),
            Command::Phi(_) => run.phi(),
            Command::KDecompose(_) => run.k_decompose(),
            Command::DAlgebra(_) => run.d_algebra(),
            Command::Verify(_) => run.verify(),
            Command::Gen(_) => unreachable!("handled above"),
        }?;
        if status == Status::Ok {
            passed += 1;
        }
        worst = worst.max(status);
        results.push(report);
    }
    let summary = matches!(cmd, Command::Verify(_)).then(|| Summary {
        instances: results.len(),
        passed,
        failed: results.len() - passed,
    });
    let doc = ReportDocument {
        tool: concat!("nestmod ", env!("CARGO_PKG_VERSION")).into(),
        command: command_name(cmd).into(),
        tolerance: tol,
        results,
        summary,
    };
    Ok(Outcome {
        text: render(&doc)?,
        exit_code: worst.exit_code(),
    })
}
