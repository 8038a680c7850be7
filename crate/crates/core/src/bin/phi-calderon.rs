use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use phi_calderon::config::{self, RunParams};
use phi_calderon::discrete::{
    calderon_path_jump, calderon_path_spaces, matrix_to_text, normal_probe, DiscreteOptions, Envelope, Extension, PhiGrid,
};
use phi_calderon::extension::{
    boundary_space, check_inversion_lemma, lemma_instance, make_invertible, seeded_instance, AbstractBVP, InstanceShape,
    RangeRelation,
};
use phi_calderon::linalg::{identity, subspace_distance};
use phi_calderon::model::{Fibre, ModelOperator};
use phi_calderon::normal::{full_ellipticity_scan, normal_calderon, normal_operator, normal_split, ucp_check, FibreExtension};
use phi_calderon::symbol::{calderon_symbol, complementary_symbol, dn_symbol, NormalOrientation, PolyMatrixSymbol, TangentialCovector};
use phi_calderon::verify::{sci, verify_all, Suite, Table, VerifyOptions};
use phi_calderon::{Error, Result};

#[derive(Parser)]
#[command(name = "phi-calderon", version, about = "Calderón projectors for fibred-cusp model operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calderón and DN symbols of the boundary principal symbol over a range of covectors.
    Symbol(Common),
    /// Normal-family projectors, gaps and unique continuation over the τ range.
    Normal(Common),
    /// Seeded invertible extension and inversion-lemma instances.
    Lab(Common),
    /// Finite-difference projector of a config on the grid given by --ns/--nz/--S.
    Discrete(Common),
    /// Runs the acceptance suites.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Operator config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ns: Option<usize>,
    #[arg(long)]
    nz: Option<usize>,
    /// Truncation of the cusp coordinate s = 1/x.
    #[arg(long = "S")]
    s_max: Option<f64>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_steps: Option<usize>,
    #[arg(long)]
    xi: Option<f64>,
    /// Height of the bump on the minus half of the doubled fibre.
    #[arg(long)]
    bump: Option<f64>,
    /// Replaces every tolerance of the run.
    #[arg(long)]
    tol_override: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Suites to run (symbol, lab, normal, discrete); all when omitted.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Runs the selected suites a second time and compares the tables byte for byte.
    #[arg(long)]
    repeat: bool,
}

impl Common {
    fn params(&self) -> Result<RunParams> {
        let mut p = RunParams::default();
        macro_rules! set {
            ($($field:ident <- $flag:ident),*) => { $(if let Some(v) = self.$flag { p.$field = v; })* };
        }
        set!(seed <- seed, n_s <- ns, n_z <- nz, s_max <- s_max, tau_min <- tau_min, tau_max <- tau_max,
             tau_steps <- tau_steps, xi <- xi, bump_height <- bump);
        p.tol_override = self.tol_override;
        p.validate()?;
        Ok(p)
    }

    fn operator(&self) -> Result<ModelOperator<f64>> {
        let path = self.config.as_ref().ok_or_else(|| Error::InvalidArgument("--config is required".into()))?;
        load_operator(path)
    }
}

fn load_operator(path: &Path) -> Result<ModelOperator<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    config::validate(&text).map_err(|violations| {
        for v in &violations[1..] {
            eprintln!("schema error at {}: {}", v.path, v.reason);
        }
        violations.into_iter().next().map(Error::from).unwrap_or_else(|| Error::InvalidArgument("invalid config".into()))
    })
}

fn write_table(dir: &Path, table: &Table) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.csv", table.name));
    std::fs::write(&path, table.to_csv()?)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Boundary symbol with the collar normal as ODE variable: the fibre boundary for interval
/// fibres, `x` itself with `η` tangential for point fibres.
fn boundary_symbol(op: &ModelOperator<f64>) -> Result<PolyMatrixSymbol<f64>> {
    match op.fibre {
        Fibre::Interval { .. } => op.boundary_principal_symbol(0.0, 0.0),
        Fibre::Point => {
            if op.base_dim == 0 {
                return Err(Error::Unsupported("a point fibre without base directions has no tangential covector".into()));
            }
            let mut s = PolyMatrixSymbol::new(op.order, op.system_size, 0, op.base_dim);
            for (&(k, a, b), p) in op.coefficients() {
                if k + a + b == op.order {
                    s.add_term(k, &[], &[a], p.eval(0.0, 0.0))?;
                }
            }
            s.validated()
        }
    }
}

fn run_symbol(c: &Common) -> Result<bool> {
    let op = c.operator()?;
    let p = c.params()?;
    let sym = boundary_symbol(&op)?;
    let mut table = Table::new("symbol", &["magnitude", "idempotence", "rank", "complement_defect", "dn_re", "dn_im"]);
    let n = sym.order() * sym.system_size();
    let mut ok = true;
    for m in p.taus() {
        let mut eta = vec![0.0; sym.base_dim()];
        let mut zeta = vec![0.0; sym.tangential_dim()];
        zeta[0] = m;
        if sym.tangential_dim() == 0 {
            eta[0] = m;
        }
        let xi = TangentialCovector::new(eta, zeta);
        let plus = calderon_symbol(&sym, &xi)?;
        let minus = complementary_symbol(&sym, &xi)?;
        let defect = (plus.matrix() + minus.matrix() - identity::<f64>(n)).norm();
        ok &= defect <= p.tol_override.unwrap_or(1e-9);
        let dn = dn_symbol(&sym, &xi, NormalOrientation::Outward).ok();
        let fmt = |v: Option<f64>| v.map(sci).unwrap_or_default();
        table.push(vec![
            sci(m),
            sci(plus.idem_defect()),
            plus.rank(1e-8).to_string(),
            sci(defect),
            fmt(dn.map(|z| z.re)),
            fmt(dn.map(|z| z.im)),
        ]);
    }
    write_table(&c.out, &table)?;
    Ok(ok)
}

fn run_normal(c: &Common) -> Result<bool> {
    let op = c.operator()?;
    let p = c.params()?;
    let ext = FibreExtension::circle(p.bump_height);
    let taus = p.taus();
    let scan = full_ellipticity_scan(&op, &taus.iter().map(|&t| (t, 0.0)).collect::<Vec<_>>(), &ext)?;
    let mut ok = true;
    let table = match op.fibre {
        Fibre::Point => {
            let mut table = Table::new("normal", &["tau", "min_sv", "invertible"]);
            for pt in &scan {
                table.push(vec![sci(pt.mu.0), sci(pt.min_sv), pt.invertible.to_string()]);
            }
            table
        }
        Fibre::Interval { .. } => {
            let mut table =
                Table::new("normal", &["tau", "min_sv", "gap", "idempotence", "rank", "dim_shadow", "ucp_min_sv"]);
            for (&tau, pt) in taus.iter().zip(&scan) {
                let split = normal_split(&op, (tau, 0.0), &ext)?;
                let ucp = ucp_check(&normal_operator(&op, (tau, 0.0))?)?;
                let (idem, rank) = match normal_calderon(&op, (tau, 0.0), &ext) {
                    Ok(c) => (c.idem_defect(), c.rank(1e-8).to_string()),
                    Err(Error::NotComplementary { .. }) => (f64::NAN, "none".into()),
                    Err(e) => return Err(e),
                };
                ok &= ucp.dim_shadow == 0 && !(idem > p.tol_override.unwrap_or(1e-8));
                table.push(vec![
                    sci(tau),
                    sci(pt.min_sv),
                    sci(split.gap),
                    sci(idem),
                    rank,
                    ucp.dim_shadow.to_string(),
                    sci(ucp.min_sv),
                ]);
            }
            table
        }
    };
    write_table(&c.out, &table)?;
    Ok(ok)
}

fn run_lab(c: &Common) -> Result<bool> {
    let p = c.params()?;
    let margin = p.tol_override.unwrap_or(1e-8);
    let shape = InstanceShape { p: 6, q: 6, r: 1, e: 2, k: 2, d: 3 };
    let b = seeded_instance::<f64>(shape, p.seed)?;
    let ext = make_invertible(&b)?;
    let fin = AbstractBVP::with_sides(ext.t_final.clone(), b.gamma.clone(), b.gram.clone(), b.plus.clone())?;
    let dist = subspace_distance(&boundary_space(&b)?, &boundary_space(&fin)?);
    let mut table = Table::new("lab", &["case", "quantity", "value"]);
    table.push(vec!["extension".into(), "min_sv".into(), sci(ext.min_sv)]);
    table.push(vec!["extension".into(), "boundary_distance".into(), sci(dist)]);
    let mut ok = dist <= p.tol_override.unwrap_or(1e-10) && ext.min_sv > margin;
    for (i, rel) in [RangeRelation::DirectSum, RangeRelation::Sum, RangeRelation::Deficient].into_iter().enumerate() {
        for k in 0..10u64 {
            let inst = lemma_instance::<f64>(rel, 2 + (k as usize % 5), p.seed.wrapping_add(100 * i as u64 + k))?;
            let (good, sr, si) = check_inversion_lemma(&inst, margin)?;
            ok &= good;
            table.push(vec![format!("{rel:?}/{k}"), "smin_real".into(), sci(sr)]);
            table.push(vec![format!("{rel:?}/{k}"), "smin_imag".into(), sci(si)]);
        }
    }
    write_table(&c.out, &table)?;
    Ok(ok)
}

fn run_discrete(c: &Common) -> Result<bool> {
    let op = c.operator()?;
    let p = c.params()?;
    let grid = PhiGrid::for_operator(&op, p.s_max, p.n_s, p.n_z)?;
    let opts = DiscreteOptions { extension: Extension { bump_height: p.bump_height }, ..Default::default() };
    let start = Instant::now();
    let spaces = calderon_path_spaces(&op, &grid, &opts)?;
    eprintln!("projector of dimension {} in {:.1} s", spaces.projector.dim(), start.elapsed().as_secs_f64());
    let mut table = Table::new("discrete", &["quantity", "tau", "value"]);
    let mut push = |q: &str, tau: Option<f64>, v: f64| table.push(vec![q.into(), tau.map(sci).unwrap_or_default(), sci(v)]);
    push("h_s", None, grid.h_s());
    if let Some(h) = grid.h_z() {
        push("h_z", None, h);
    }
    push("idempotence", None, spaces.projector.idem_defect());
    push("trace_stability", None, spaces.trace_stability);
    if let Some(g) = spaces.gap {
        push("space_gap", None, g);
    }
    let mut ok = spaces.projector.idem_defect() <= p.tol_override.unwrap_or(1e-6);
    match op.fibre {
        Fibre::Point => {
            let jump = calderon_path_jump(&op, &grid, &opts)?;
            push("path_gap", None, (jump.projector.matrix() - spaces.projector.matrix()).norm());
            push("idempotence_jump", None, jump.projector.idem_defect());
        }
        Fibre::Interval { .. } => {
            let env = Envelope::centered(p.s_max);
            let ext = FibreExtension::circle(p.bump_height);
            for tau in p.taus() {
                push("probe_error", Some(tau), normal_probe(&spaces, &op, &grid, tau, &env, &ext)?.error);
            }
        }
    }
    write_table(&c.out, &table)?;
    let path = c.out.join("projector.txt");
    std::fs::write(&path, matrix_to_text(spaces.projector.matrix()))?;
    println!("wrote {}", path.display());
    ok &= spaces.projector.matrix().iter().all(|z: &Complex64| z.re.is_finite() && z.im.is_finite());
    Ok(ok)
}

fn run_verify(v: &VerifyArgs) -> Result<bool> {
    let params = v.common.params()?;
    if let Some(path) = &v.common.config {
        load_operator(path)?;
    }
    let suites = if v.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        v.suite
            .iter()
            .map(|s| Suite::parse(s).ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}"))))
            .collect::<Result<Vec<_>>>()?
    };
    let opts = VerifyOptions { suites, params };
    let report = verify_all(&opts)?;
    for c in report.criteria() {
        println!("{}", c.line());
    }
    report.write(&v.common.out)?;
    let mut ok = report.passed();
    if v.repeat {
        let again = verify_all(&opts)?;
        let same = report.files()? == again.files()?;
        println!("{} determinism            repeated run {}", if same { "PASS" } else { "FAIL" }, if same { "byte-identical" } else { "differs" });
        ok &= same;
    }
    println!("tables written to {}", v.common.out.display());
    Ok(ok)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema { .. }
        | Error::Io(_)
        | Error::InvalidArgument(_)
        | Error::GeometryMismatch(_)
        | Error::Unsupported(_)
        | Error::PointFibre => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Symbol(c) => run_symbol(c),
        Command::Normal(c) => run_normal(c),
        Command::Lab(c) => run_lab(c),
        Command::Discrete(c) => run_discrete(c),
        Command::Verify(v) => run_verify(v),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
