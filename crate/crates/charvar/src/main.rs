use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use charvar::liegroup::{parse_descriptor, NamedGroup, ReductiveDescriptor};
use charvar::matrixrep::{
    self, check_representation, deck_act, haar_special_unitary, haar_unitary,
    lift_to_universal_cover, obstruction_class, obstruction_class_with_branches,
    random_commuting_tuple_with_diagonals, random_so3_commuting_pair, simultaneous_eigenvalues,
    su2_commuting_invariant, MatrixRep, Target, C64,
};
use charvar::presentation::{parse_presentation, standard_group, Presentation, StandardGroup};
use charvar::theorems::{self, GammaClass};

#[derive(Parser)]
#[command(
    name = "charvar",
    version,
    about = "Topological invariants of representation spaces and character varieties"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file (atomically) instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Residual tolerance override (also settable via CHARVAR_TOL)
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the theorem engine on a group and a target Lie group
    Analyze {
        /// Group: `free r`, `free_abelian r`, `surface g`,
        /// `central_ext_surface g`, or a presentation file path
        #[arg(long)]
        group: String,
        /// Target: named group spec like `U 3`, `PGL 2`, `SO3`, `U 2 x SU 3`,
        /// or a descriptor file path
        #[arg(long)]
        target: String,
        /// Class tag for non-standard presentations: `free r`,
        /// `free_abelian r`, `surface g`, or `other`
        #[arg(long)]
        class: Option<String>,
    },
    /// Numerical verification of a matrix representation
    Verify {
        /// Matrix representation JSON file (not needed in sample mode)
        #[arg(long)]
        input: Option<PathBuf>,
        /// Presentation, same syntax as in analyze
        #[arg(long)]
        group: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Target for sample mode: `U n`, `SU n`, `PU 2`, or `SO3`
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of Monte-Carlo samples
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Presentation utilities
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Lie group descriptor utilities
    Lie {
        #[command(subcommand)]
        cmd: LieCmd,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Check,
    Lift,
    Obstruction,
    Deck,
    Sample,
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Parse and classify a presentation file
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum LieCmd {
    /// Show pi1 data for a named group or a descriptor file
    Info { spec: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn default_tolerance(cli: &Cli) -> Result<f64, String> {
    if let Some(t) = cli.tol {
        return Ok(t);
    }
    match std::env::var("CHARVAR_TOL") {
        Ok(s) => s.parse().map_err(|_| format!("CHARVAR_TOL is not a number: `{s}`")),
        Err(_) => Ok(matrixrep::DEFAULT_TOL),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.cmd {
        Cmd::Analyze { group, target, class } => run_analyze(cli, group, target, class.as_deref()),
        Cmd::Verify { input, group, mode, target, seed, count } => {
            run_verify(cli, input.as_deref(), group, *mode, target.as_deref(), *seed, *count)
        }
        Cmd::Group { cmd: GroupCmd::Check { file } } => run_group_check(cli, file),
        Cmd::Lie { cmd: LieCmd::Info { spec } } => run_lie_info(cli, spec),
    }
}

// --- input parsing --------------------------------------------------------

fn load_presentation(spec: &str) -> Result<Presentation, String> {
    let toks: Vec<&str> = spec.split_whitespace().collect();
    let std_kind = match toks.as_slice() {
        [kind, arg] => arg.parse::<usize>().ok().and_then(|n| match *kind {
            "free" => Some(StandardGroup::Free(n)),
            "free_abelian" => Some(StandardGroup::FreeAbelian(n)),
            "surface" => Some(StandardGroup::Surface(n)),
            "central_ext_surface" => Some(StandardGroup::CentralExtSurface(n)),
            _ => None,
        }),
        _ => None,
    };
    if let Some(kind) = std_kind {
        return standard_group(&kind).map_err(|e| format!("group `{spec}`: {e}"));
    }
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
        return parse_presentation(&text).map_err(|e| format!("{spec}: {e}"));
    }
    Err(format!(
        "unrecognized group `{spec}`: expected `free r`, `free_abelian r`, `surface g`, \
         `central_ext_surface g`, or an existing presentation file"
    ))
}

fn load_descriptor(spec: &str) -> Result<ReductiveDescriptor, String> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
        return parse_descriptor(&text).map_err(|e| format!("{spec}: {e}"));
    }
    NamedGroup::parse(spec)
        .and_then(|g| g.descriptor())
        .map_err(|e| format!("target `{spec}`: {e}"))
}

fn parse_class_tag(s: &str) -> Result<GammaClass, String> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    match toks.as_slice() {
        ["other"] => Ok(GammaClass::Other),
        [kind, arg] => {
            let n: usize = arg.parse().map_err(|_| format!("bad class `{s}`"))?;
            match *kind {
                "free" => Ok(GammaClass::Free { rank: n }),
                "free_abelian" => Ok(GammaClass::FreeAbelian { rank: n }),
                "surface" => Ok(GammaClass::Surface { genus: n }),
                _ => Err(format!("bad class `{s}`")),
            }
        }
        _ => Err(format!("bad class `{s}`")),
    }
}

fn parse_target_spec(s: &str) -> Result<Target, String> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    match toks.as_slice() {
        ["SO3"] => Ok(Target::PU(2)),
        [kind, arg] => {
            let n: usize = arg.parse().map_err(|_| format!("bad target `{s}`"))?;
            match *kind {
                "U" => Ok(Target::U(n)),
                "SU" => Ok(Target::SU(n)),
                "PU" | "PSU" => Ok(Target::PU(n)),
                _ => Err(format!("bad target `{s}`")),
            }
        }
        _ => Err(format!("bad target `{s}`")),
    }
}

// --- output ---------------------------------------------------------------

/// Serialize to the chosen format; the text format is rendered from the
/// JSON value, never computed separately.
fn render(cli: &Cli, value: &impl Serialize) -> Result<String, String> {
    let json = serde_json::to_value(value).map_err(|e| e.to_string())?;
    Ok(match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            render_text(&json, 0, None, &mut out);
            out
        }
    })
}

fn render_text(v: &Value, indent: usize, key: Option<&str>, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            if let Some(k) = key {
                out.push_str(&format!("{pad}{k}:\n"));
            }
            for (k, val) in map {
                render_text(val, indent + usize::from(key.is_some()), Some(k), out);
            }
        }
        Value::Array(items) => {
            let k = key.unwrap_or("-");
            if items.is_empty() {
                out.push_str(&format!("{pad}{k}: []\n"));
            } else if items.iter().all(|i| !matches!(i, Value::Object(_) | Value::Array(_))) {
                let rendered: Vec<String> = items.iter().map(scalar_to_string).collect();
                out.push_str(&format!("{pad}{k}: [{}]\n", rendered.join(", ")));
            } else {
                out.push_str(&format!("{pad}{k}:\n"));
                for item in items {
                    render_text(item, indent + 1, Some("-"), out);
                }
            }
        }
        scalar => {
            let k = key.unwrap_or("-");
            out.push_str(&format!("{pad}{k}: {}\n", scalar_to_string(scalar)));
        }
    }
}

fn scalar_to_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Print to stdout, or write atomically (temp file + rename) to --output.
fn emit(cli: &Cli, content: &str) -> Result<(), String> {
    match &cli.output {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| format!("{}: {e}", dir.display()))?;
            tmp.write_all(content.as_bytes()).map_err(|e| e.to_string())?;
            tmp.persist(path).map_err(|e| e.to_string())?;
            Ok(())
        }
    }
}

// --- subcommands ----------------------------------------------------------

fn run_analyze(
    cli: &Cli,
    group: &str,
    target: &str,
    class: Option<&str>,
) -> Result<ExitCode, String> {
    let pres = load_presentation(group)?;
    let desc = load_descriptor(target)?;
    let tag = class.map(parse_class_tag).transpose()?;
    let report = theorems::analyze(&pres, tag, &desc, target).map_err(|e| e.to_string())?;
    emit(cli, &render(cli, &report)?)?;
    if report.hypothesis_failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

fn run_group_check(cli: &Cli, file: &Path) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let pres = parse_presentation(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    let (ec, rank) = pres.is_exponent_canceling();

    #[derive(Serialize)]
    struct GroupReport {
        generators: Vec<String>,
        num_relators: usize,
        abelianization: String,
        exponent_canceling: bool,
        rank: Option<usize>,
        detected_class: GammaClass,
    }
    let report = GroupReport {
        generators: pres.generator_names().to_vec(),
        num_relators: pres.relators().len(),
        abelianization: pres.abelianization().to_string(),
        exponent_canceling: ec,
        rank,
        detected_class: theorems::detect_class(&pres),
    };
    emit(cli, &render(cli, &report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn run_lie_info(cli: &Cli, spec: &str) -> Result<ExitCode, String> {
    let desc = load_descriptor(spec)?;
    let (torus_rank, factors, kernel) = desc.universal_cover();

    #[derive(Serialize)]
    struct LieReport {
        descriptor: String,
        pi1: String,
        pi1_derived: String,
        pi1_torsion_free: bool,
        orthogonal_free: bool,
        universal_cover_torus_rank: usize,
        universal_cover_factors: Vec<String>,
        universal_cover_kernel: String,
    }
    let report = LieReport {
        descriptor: desc.to_string(),
        pi1: desc.pi1().to_string(),
        pi1_derived: desc.pi1_derived().to_string(),
        pi1_torsion_free: desc.pi1_is_torsion_free(),
        orthogonal_free: desc.is_orthogonal_free(),
        universal_cover_torus_rank: torus_rank,
        universal_cover_factors: factors.iter().map(|f| f.to_string()).collect(),
        universal_cover_kernel: kernel.to_string(),
    };
    emit(cli, &render(cli, &report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(
    cli: &Cli,
    input: Option<&Path>,
    group: &str,
    mode: Mode,
    target: Option<&str>,
    seed: u64,
    count: usize,
) -> Result<ExitCode, String> {
    let tol = default_tolerance(cli)?;
    let pres = load_presentation(group)?;
    let load_rep = || -> Result<MatrixRep, String> {
        let path = input.ok_or("this mode needs --input <matrix file>")?;
        let text =
            std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut rep = MatrixRep::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if cli.tol.is_some() || std::env::var("CHARVAR_TOL").is_ok() {
            rep.tolerance = tol;
        }
        Ok(rep)
    };

    match mode {
        Mode::Check => {
            let rep = load_rep()?;
            let check = check_representation(&rep, &pres).map_err(|e| e.to_string())?;
            emit(cli, &render(cli, &check)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Mode::Lift => {
            let rep = load_rep()?;
            let lift = lift_to_universal_cover(&rep, &pres).map_err(|e| e.to_string())?;
            let round_trip: f64 = rep
                .matrices
                .iter()
                .zip(lift.project())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let residuals = lift.relator_residuals(&pres);

            #[derive(Serialize)]
            struct LiftReport {
                real_parts: Vec<f64>,
                round_trip_residual: f64,
                relator_residuals: Vec<(f64, f64)>,
                lift: Value,
            }
            let report = LiftReport {
                real_parts: lift.real_parts.clone(),
                round_trip_residual: round_trip,
                relator_residuals: residuals,
                lift: serde_json::from_str(&lift.to_json()).expect("valid json"),
            };
            emit(cli, &render(cli, &report)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Mode::Obstruction => {
            let rep = load_rep()?;
            if rep.matrices.len() % 2 != 0 {
                return Err("obstruction mode needs 2g matrices".into());
            }
            let genus = rep.matrices.len() / 2;
            let class = obstruction_class(&rep, genus).map_err(|e| e.to_string())?;

            #[derive(Serialize)]
            struct ObstructionReport {
                genus: usize,
                class: usize,
                modulus: usize,
            }
            let report = ObstructionReport { genus, class, modulus: rep.n() };
            emit(cli, &render(cli, &report)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Mode::Deck => {
            let rep = load_rep()?;
            let lift = lift_to_universal_cover(&rep, &pres).map_err(|e| e.to_string())?;
            let r = pres.num_generators();
            let mut projection_residual: f64 = 0.0;
            let mut freeness_ok = true;
            let mut axiom_residual: f64 = 0.0;
            let base_proj = lift.project();
            for phi in deck_vectors(r, 1) {
                let acted = deck_act(&phi, &lift, &pres).map_err(|e| e.to_string())?;
                for (a, b) in base_proj.iter().zip(acted.project()) {
                    projection_residual = projection_residual.max((a - b).norm());
                }
                if phi.iter().any(|&j| j != 0)
                    && acted
                        .real_parts
                        .iter()
                        .zip(&lift.real_parts)
                        .all(|(a, b)| (a - b).abs() < 1e-12)
                {
                    freeness_ok = false;
                }
                // deck(phi) ∘ deck(phi) = deck(2 phi)
                let twice = deck_act(&phi, &acted, &pres).map_err(|e| e.to_string())?;
                let double: Vec<i64> = phi.iter().map(|j| 2 * j).collect();
                let direct = deck_act(&double, &lift, &pres).map_err(|e| e.to_string())?;
                for (a, b) in twice.su_parts.iter().zip(&direct.su_parts) {
                    axiom_residual = axiom_residual.max((a - b).norm());
                }
            }

            #[derive(Serialize)]
            struct DeckReport {
                vectors_checked: usize,
                projection_residual: f64,
                action_axiom_residual: f64,
                freeness_witnessed: bool,
            }
            let report = DeckReport {
                vectors_checked: deck_vectors(r, 1).len(),
                projection_residual,
                action_axiom_residual: axiom_residual,
                freeness_witnessed: freeness_ok,
            };
            emit(cli, &render(cli, &report)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Mode::Sample => {
            let target = parse_target_spec(target.ok_or("sample mode needs --target")?)?;
            let report = run_sample(&pres, target, seed, count, tol)?;
            emit(cli, &render(cli, &report)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// All deck vectors with entries in −max..=max.
fn deck_vectors(r: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-max..=max).map(move |j| {
                    let mut w = v.clone();
                    w.push(j);
                    w
                })
            })
            .collect();
    }
    out
}

#[derive(Serialize)]
struct SampleReport {
    target: String,
    samples: usize,
    seed: u64,
    all_passed_check: bool,
    max_commutator_residual: f64,
    max_eigenvalue_multiset_deviation: Option<f64>,
    max_commuting_kappa: Option<f64>,
    haar_kappa_above_threshold_fraction: Option<f64>,
    obstruction_classes_seen: Option<Vec<usize>>,
    obstruction_invariance_failures: Option<usize>,
}

fn run_sample(
    pres: &Presentation,
    target: Target,
    seed: u64,
    count: usize,
    tol: f64,
) -> Result<SampleReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SampleReport {
        target: target.to_string(),
        samples: count,
        seed,
        all_passed_check: true,
        max_commutator_residual: 0.0,
        max_eigenvalue_multiset_deviation: None,
        max_commuting_kappa: None,
        haar_kappa_above_threshold_fraction: None,
        obstruction_classes_seen: None,
        obstruction_invariance_failures: None,
    };
    match target {
        Target::U(n) | Target::SU(n) => {
            let tuple_size = pres.num_generators();
            let mut max_dev: f64 = 0.0;
            let mut max_kappa: f64 = 0.0;
            for _ in 0..count {
                let (rep, diagonals) =
                    random_commuting_tuple_with_diagonals(n, tuple_size, target, &mut rng)
                        .map_err(|e| e.to_string())?;
                let check = check_representation(&rep, pres).map_err(|e| e.to_string())?;
                if !check.passed {
                    report.all_passed_check = false;
                }
                for i in 0..rep.matrices.len() {
                    for j in i + 1..rep.matrices.len() {
                        let c = (&rep.matrices[i] * &rep.matrices[j]
                            - &rep.matrices[j] * &rep.matrices[i])
                            .norm();
                        report.max_commutator_residual = report.max_commutator_residual.max(c);
                    }
                }
                if rep.matrices.len() >= 2 {
                    let pairs =
                        simultaneous_eigenvalues(&rep.matrices[0], &rep.matrices[1], tol.max(1e-8))
                            .map_err(|e| e.to_string())?;
                    max_dev = max_dev.max(multiset_deviation(&pairs, &diagonals[0], &diagonals[1]));
                    if matches!(target, Target::SU(2)) {
                        let (_, _, _, kappa) =
                            su2_commuting_invariant(&rep.matrices[0], &rep.matrices[1], tol)
                                .map_err(|e| e.to_string())?;
                        max_kappa = max_kappa.max(kappa.abs());
                    }
                }
            }
            report.max_eigenvalue_multiset_deviation = Some(max_dev);
            if matches!(target, Target::SU(2)) {
                report.max_commuting_kappa = Some(max_kappa);
                let mut above = 0usize;
                for _ in 0..count {
                    let a = haar_special_unitary(2, &mut rng);
                    let b = haar_special_unitary(2, &mut rng);
                    let (_, _, _, kappa) =
                        su2_commuting_invariant(&a, &b, tol).map_err(|e| e.to_string())?;
                    if kappa.abs() > 0.1 {
                        above += 1;
                    }
                }
                report.haar_kappa_above_threshold_fraction = Some(above as f64 / count as f64);
            }
        }
        Target::PU(2) => {
            let mut seen = std::collections::BTreeSet::new();
            let mut failures = 0usize;
            for _ in 0..count {
                let (rep, expected) = random_so3_commuting_pair(&mut rng);
                let class = obstruction_class(&rep, 1).map_err(|e| e.to_string())?;
                if class != expected {
                    failures += 1;
                }
                seen.insert(class);
                // one random branch choice and one random conjugation
                let branches = vec![rng.gen_range(0..2), rng.gen_range(0..2)];
                if obstruction_class_with_branches(&rep, 1, &branches)
                    .map_err(|e| e.to_string())?
                    != class
                {
                    failures += 1;
                }
                let u = haar_unitary(2, &mut rng);
                let conj: Vec<_> =
                    rep.matrices.iter().map(|m| &u * m * u.adjoint()).collect();
                let conj_rep =
                    MatrixRep::new(rep.target, rep.generators.clone(), conj, rep.tolerance)
                        .map_err(|e| e.to_string())?;
                if obstruction_class(&conj_rep, 1).map_err(|e| e.to_string())? != class {
                    failures += 1;
                }
            }
            report.obstruction_classes_seen = Some(seen.into_iter().collect());
            report.obstruction_invariance_failures = Some(failures);
        }
        Target::PU(_) => {
            return Err("sample mode supports PU only for n = 2 (the SO(3) suite)".into());
        }
    }
    Ok(report)
}

/// Compare a canonicalized eigenvalue-pair multiset against the construction
/// diagonals (canonicalized the same way); max pointwise deviation.
fn multiset_deviation(pairs: &[(C64, C64)], da: &[C64], db: &[C64]) -> f64 {
    use std::f64::consts::TAU;
    let mut expected: Vec<(C64, C64)> = da.iter().copied().zip(db.iter().copied()).collect();
    expected.sort_by(|x, y| {
        let key = |p: &(C64, C64)| (p.0.arg().rem_euclid(TAU), p.1.arg().rem_euclid(TAU));
        let (ka, kb) = (key(x), key(y));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    pairs
        .iter()
        .zip(&expected)
        .map(|(p, q)| (p.0 - q.0).norm().max((p.1 - q.1).norm()))
        .fold(0.0, f64::max)
}
