//! `cayley`: classify intermediate root-datum lattices, compute Sha-two and
//! cohomology, build the lattices of the constructions, and check
//! certificates.
//!
//! Exit codes: 0 quasi-permutation (or success), 3 not quasi-permutation (or
//! a rejected certificate / failed check), 1 input error, 2 budget exceeded.

mod demo;
mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cayley_lattice::classify::{
    classify_with, verify_certificate_with, Budget, Certificate, Verdict,
};
use cayley_lattice::cohomology::{h_n_with, sha2_with, Method};
use cayley_lattice::constructions::{
    analyze_section2, j_gamma, l_nu, lambda_and_n, section2_lattice, verify_lemma_3_6, w_nu,
    BdFactor, LnuSpec, Section2Spec,
};
use cayley_lattice::glattice::{close_group, permutation_matrix};
use cayley_lattice::json::{from_document, int_to_value, to_document};
use cayley_lattice::rootdata::{char_lattice, intermediate_from_types, Family, NamedGroup};
use cayley_lattice::{Error, FinGroup, GLattice, Int, DEFAULT_MAX_CELLS, DEFAULT_MAX_GROUP_ORDER};

#[derive(Parser)]
#[command(
    name = "cayley",
    version,
    about = "Quasi-permutation decisions and certificates for root-datum lattices"
)]
struct Cli {
    /// Print JSON documents instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest finite group closed during a computation.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_GROUP_ORDER)]
    max_group_order: usize,
    /// Largest cochain matrix, in cells.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: u128,
    /// Seed for the randomized checks of demo-paper.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an intermediate lattice is quasi-permutation.
    Classify {
        /// Group-spec document; stdin when absent or `-`.
        input: Option<PathBuf>,
        /// Also write the verdict document here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a verdict document produced by `classify`.
    Verify { input: Option<PathBuf> },
    /// Sha-two of a lattice.
    Sha2 {
        #[command(subcommand)]
        source: Source,
    },
    /// H^n of a lattice, n ≤ 3.
    Cohomology {
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(subcommand)]
        source: Source,
    },
    /// Build one of the lattices of the constructions.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Replay the reference checks and report pass/fail.
    DemoPaper {
        /// Only checks whose group or name starts with this.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Subcommand, Clone)]
enum Source {
    /// J_Γ for Γ = (Z/p)^m.
    Jgamma {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        m: usize,
    },
    /// Z[C_n], the regular lattice of the cyclic group.
    Regular {
        #[arg(long)]
        order: usize,
    },
    /// A group-spec document, optionally with "gamma"; the full Weyl group
    /// acts otherwise.
    Input { input: Option<PathBuf> },
}

#[derive(Subcommand)]
enum Construct {
    /// The one-vector lattice over B/D factors and A_{2n−1} factors.
    Section2 {
        /// For example `B2,B1,A3`.
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<String>,
    },
    /// L_ν over A_{n_i−1} factors.
    Lnu {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        d: usize,
        /// Defaults to all ones.
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<usize>>,
    },
    /// J_Γ for Γ = (Z/p)^m.
    Jgamma {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        m: usize,
    },
    /// An intermediate lattice from factors and S generators, or a named group.
    Rootdatum {
        #[arg(long, value_delimiter = ',')]
        factors: Vec<String>,
        /// One S generator, residues separated by commas; repeatable.
        #[arg(long)]
        subgroup: Vec<String>,
        #[arg(long, conflicts_with_all = ["factors", "subgroup"])]
        group: Option<String>,
        #[arg(long, requires = "group")]
        param: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Bar,
    Periodic,
    Crossed,
}

impl MethodArg {
    fn method(self) -> Option<Method> {
        match self {
            MethodArg::Auto => None,
            MethodArg::Bar => Some(Method::Bar),
            MethodArg::Periodic => Some(Method::PeriodicTensor),
            MethodArg::Crossed => Some(Method::CrossedHom),
        }
    }
}

const EXIT_INPUT: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } | Error::GroupTooLarge { .. } => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let doc =
                    json!({"error": error_kind(&e), "message": e.to_string(), "exit_code": code});
                write_out(&to_document(&doc).unwrap_or_default());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}

/// Writes to stdout; a closed pipe (`cayley ... | head`) is not an error.
pub(crate) fn write_out(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}

fn budget(cli: &Cli) -> Budget {
    Budget {
        max_group_order: cli.max_group_order,
        max_cells: cli.max_cells,
    }
}

/// Prints the JSON document or the text form.
fn emit<T: Serialize>(cli: &Cli, doc: &T, text: impl FnOnce() -> String) -> Result<(), Error> {
    if cli.json {
        write_out(&to_document(doc)?);
    } else {
        write_out(&format!("{}\n", text().trim_end()));
    }
    Ok(())
}

fn write_atomic(path: &Path, text: &str) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("{}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, text).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Classify { input, output } => {
            cmd_classify(cli, input.as_deref(), output.as_deref())
        }
        Command::Verify { input } => cmd_verify(cli, input.as_deref()),
        Command::Sha2 { source } => cmd_sha2(cli, source),
        Command::Cohomology {
            degree,
            method,
            source,
        } => cmd_cohomology(cli, *degree, *method, source),
        Command::Construct { what } => cmd_construct(cli, what),
        Command::DemoPaper { filter } => demo::run(cli.json, filter.as_deref(), cli.seed),
    }
}

fn cmd_classify(cli: &Cli, input: Option<&Path>, output: Option<&Path>) -> Result<u8, Error> {
    let spec = input::parse_group_spec(&input::read_input(input)?, false)?;
    let verdict = classify_with(&spec.factors, &spec.subgroup, &budget(cli))?;
    let doc = to_document(&verdict)?;
    if let Some(path) = output {
        write_atomic(path, &doc)?;
    }
    emit(cli, &verdict, || verdict_text(&verdict))?;
    Ok(if verdict.is_quasi_permutation() {
        0
    } else {
        EXIT_NEGATIVE
    })
}

fn verdict_text(v: &Verdict) -> String {
    let types: Vec<String> = v.factors.iter().map(|t| t.to_string()).collect();
    let status = serde_json::to_value(v.status).unwrap_or(Value::Null);
    let mut out = format!(
        "status: {}\nfactors: {}\nsubgroup: {:?}\n",
        status.as_str().unwrap_or_default(),
        types.join(" "),
        v.subgroup
    );
    match &v.certificate {
        Certificate::PositiveResolution { resolution } => {
            out += &format!(
                "certificate: resolution ({:?}, rank P = {})\n",
                resolution.shape,
                resolution.iota.cols()
            );
        }
        Certificate::PositiveDecomposition { blocks } => {
            for b in blocks {
                let kind = serde_json::to_value(b.kind).unwrap_or(Value::Null);
                let types: Vec<String> = b.types.iter().map(|t| t.to_string()).collect();
                out += &format!(
                    "block: {} factors {:?} ({})\n",
                    kind.as_str().unwrap_or_default(),
                    b.indices,
                    types.join(" ")
                );
            }
        }
        Certificate::NegativeSha { trace, witness } => {
            out += &format!(
                "certificate: Ш² = {} over a subgroup of order {} ({} reduction steps)\n",
                witness.sha2,
                witness.group_order,
                trace.len()
            );
        }
        Certificate::NegativeByReduction { trace, leaf } => {
            out += &format!(
                "certificate: {} reduction steps, then: {}\n",
                trace.len(),
                leaf.claim.statement()
            );
            if let Some(p) = &leaf.probe {
                out += &format!(
                    "probe: Ш² = {} over a subgroup of order {}\n",
                    p.sha2, p.group_order
                );
            }
        }
    }
    out
}

fn cmd_verify(cli: &Cli, input: Option<&Path>) -> Result<u8, Error> {
    let verdict: Verdict = from_document(&input::read_input(input)?)?;
    let report = verify_certificate_with(&verdict, &budget(cli));
    emit(cli, &report, || {
        let mut s = format!(
            "ok: {}\nmachine verified: {}\n",
            report.ok, report.machine_verified
        );
        for line in &report.log {
            s += &format!("  {line}\n");
        }
        s
    })?;
    Ok(if report.ok { 0 } else { EXIT_NEGATIVE })
}

fn perm_group(points: usize, perms: &[Vec<usize>], cap: usize) -> Result<Arc<FinGroup>, Error> {
    if perms.is_empty() {
        return Ok(Arc::new(FinGroup::trivial(points)));
    }
    let mats: Vec<_> = perms.iter().map(|p| permutation_matrix(p)).collect();
    Ok(Arc::new(close_group(&mats, cap)?))
}

/// `(Z/p)^m` acting on `m` disjoint `p`-cycles.
fn elementary_abelian(p: usize, m: usize, cap: usize) -> Result<Arc<FinGroup>, Error> {
    if p < 2 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "need p ≥ 2 and m ≥ 1, got p = {p}, m = {m}"
        )));
    }
    if (p as f64).powi(m as i32) > cap as f64 {
        return Err(Error::GroupTooLarge { cap });
    }
    let gens: Vec<Vec<usize>> = (0..m)
        .map(|k| {
            (0..p * m)
                .map(|i| {
                    if i / p == k {
                        k * p + (i % p + 1) % p
                    } else {
                        i
                    }
                })
                .collect()
        })
        .collect();
    perm_group(p * m, &gens, cap)
}

fn cyclic(n: usize, cap: usize) -> Result<Arc<FinGroup>, Error> {
    if n == 0 {
        return Err(Error::InvalidParameter("order must be positive".into()));
    }
    if n > cap {
        return Err(Error::GroupTooLarge { cap });
    }
    let gens = if n == 1 {
        vec![]
    } else {
        vec![(0..n).map(|i| (i + 1) % n).collect()]
    };
    perm_group(n, &gens, cap)
}

fn source_lattice(cli: &Cli, source: &Source) -> Result<(String, GLattice), Error> {
    let cap = cli.max_group_order;
    match source {
        Source::Jgamma { p, m } => Ok((
            format!("J_Γ, Γ = (Z/{p})^{m}"),
            j_gamma(elementary_abelian(*p, *m, cap)?),
        )),
        Source::Regular { order } => Ok((
            format!("Z[C_{order}]"),
            GLattice::regular(cyclic(*order, cap)?),
        )),
        Source::Input { input } => {
            let spec = input::parse_group_spec(&input::read_input(input.as_deref())?, true)?;
            let lat = intermediate_from_types(&spec.factors, &spec.subgroup)?;
            let gens = spec.gamma.clone().unwrap_or_else(|| lat.weyl_generators());
            let types: Vec<String> = spec.factors.iter().map(|t| t.to_string()).collect();
            Ok((
                format!("{} with S = {:?}", types.join(" "), spec.subgroup),
                lat.lattice_over(&gens, cap)?,
            ))
        }
    }
}

fn cmd_sha2(cli: &Cli, source: &Source) -> Result<u8, Error> {
    let (name, l) = source_lattice(cli, source)?;
    let s = sha2_with(l.group(), &l, Method::CrossedHom, cli.max_cells)?;
    let doc = json!({
        "lattice": name,
        "rank": l.rank(),
        "group_order": l.group().order(),
        "sha2": s,
    });
    emit(cli, &doc, || {
        format!(
            "{name}: rank {}, |Γ| = {}, Ш² = {s}",
            l.rank(),
            l.group().order()
        )
    })?;
    Ok(0)
}

fn cmd_cohomology(
    cli: &Cli,
    degree: usize,
    method: MethodArg,
    source: &Source,
) -> Result<u8, Error> {
    let (name, l) = source_lattice(cli, source)?;
    let r = h_n_with(l.group(), &l, degree, method.method(), cli.max_cells)?;
    let doc = json!({
        "lattice": name,
        "rank": l.rank(),
        "group_order": l.group().order(),
        "degree": degree,
        "method": r.method,
        "cohomology": r.group,
    });
    emit(cli, &doc, || {
        format!("{name}: H^{degree} = {} ({:?})", r.group, r.method)
    })?;
    Ok(0)
}

fn cmd_construct(cli: &Cli, what: &Construct) -> Result<u8, Error> {
    let doc = match what {
        Construct::Section2 { factors } => construct_section2(factors)?,
        Construct::Lnu { n, d, nu } => {
            let spec = match nu {
                Some(nu) => LnuSpec::new(n.clone(), *d, nu.clone())?,
                None => LnuSpec::trivial_nu(n.clone(), *d)?,
            };
            let lat = l_nu(&spec)?;
            let l36 = verify_lemma_3_6(&spec)?;
            let lam = lambda_and_n(&spec)?;
            json!({
                "spec": spec,
                "types": spec.types().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "basis": lat.basis,
                "w_nu": w_nu(&spec)?.iter().map(int_to_value).collect::<Vec<_>>(),
                "index_over_q": int_to_value(&lat.index_over_q()),
                "quotient": {
                    "invariants": l36.l_quotient.invariants,
                    "expected": l36.expected,
                    "natural_map_iso": l36.natural_map_iso,
                    "basis_checks": l36.b_basis_ok && l36.b_prime_basis_ok,
                },
                "lambda": {
                    "lambda_basis": lam.lambda_basis,
                    "n_basis": lam.n_basis,
                    "phi_image_equals_n": lam.phi_image_ok,
                    "quotient": lam.quotient.invariants,
                    "quotient_trivial_action": lam.quotient.trivial_action,
                },
            })
        }
        Construct::Jgamma { p, m } => {
            let l = j_gamma(elementary_abelian(*p, *m, cli.max_group_order)?);
            let s = sha2_with(l.group(), &l, Method::CrossedHom, cli.max_cells)?;
            json!({
                "p": p,
                "m": m,
                "group_order": l.group().order(),
                "rank": l.rank(),
                "generator_actions": l.generator_actions(),
                "sha2": s,
            })
        }
        Construct::Rootdatum {
            factors,
            subgroup,
            group,
            param,
        } => {
            let lat = match group {
                Some(g) => {
                    let param = param.ok_or_else(|| {
                        Error::InvalidInput("--param is required with --group".into())
                    })?;
                    char_lattice(NamedGroup::parse(g, param)?)?
                }
                None => {
                    if factors.is_empty() {
                        return Err(Error::InvalidInput("give --factors or --group".into()));
                    }
                    let types = input::parse_types(factors)?;
                    let gens = subgroup
                        .iter()
                        .map(|s| input::parse_residues(s))
                        .collect::<Result<Vec<_>, _>>()?;
                    intermediate_from_types(&types, &gens)?
                }
            };
            json!({
                "types": lat.types().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "subgroup": lat.s_generators,
                "rank": lat.rank(),
                "basis": lat.basis,
                "index_over_q": int_to_value(&lat.index_over_q()),
                "index_in_p": int_to_value(&lat.index_in_p()),
                "weyl_order": int_to_value(&Int::from(lat.weyl_order())),
            })
        }
    };
    emit(cli, &doc, || object_text(&doc))?;
    Ok(0)
}

fn construct_section2(factors: &[String]) -> Result<Value, Error> {
    let mut bd = Vec::new();
    let mut a = Vec::new();
    for t in input::parse_types(factors)? {
        match t.family {
            Family::B => bd.push(BdFactor::b(t.n)),
            Family::D => bd.push(BdFactor::d(t.n)),
            Family::A if t.n % 2 == 1 && t.n >= 3 => a.push(t.n.div_ceil(2)),
            _ => {
                return Err(Error::InvalidSpec(format!(
                    "{t}: factors must be B, D or A of odd rank ≥ 3"
                )))
            }
        }
    }
    let spec = Section2Spec::new(bd, a)?;
    let lat = section2_lattice(&spec)?;
    let analysis = match spec.check_hypotheses() {
        Ok(()) => {
            let r = analyze_section2(&spec)?;
            json!({
                "partition": r.partition,
                "orbit_sums_to_zero": r.orbit_sums_to_zero,
                "pair_sums_ok": r.pair_sums_ok,
                "l0_isomorphic_to_j_gamma": r.l0_iso_j_gamma,
                "decomposition_ok": r.decomposition_ok,
                "rank_l1": r.rank_l1,
                "rank_formula": r.rank_formula,
                "sha2": r.sha2,
            })
        }
        Err(e) => json!({"hypotheses_violated": e.to_string()}),
    };
    Ok(json!({
        "spec": spec,
        "types": spec.types().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "rank": lat.rank(),
        "index_over_l_prime": int_to_value(&lat.index()),
        "doubled_coordinates": {
            "l_basis": lat.l_basis,
            "l_prime_basis": lat.l_prime_basis,
            "v": lat.v.iter().map(int_to_value).collect::<Vec<_>>(),
        },
        "analysis": analysis,
    }))
}

/// One `key: value` line per top-level field, values as compact JSON.
fn object_text(doc: &Value) -> String {
    let Some(map) = doc.as_object() else {
        return doc.to_string();
    };
    map.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}
