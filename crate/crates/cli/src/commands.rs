use std::fmt;
use std::path::Path;

use ctensor::equivalence::{paratuck24_to_parafac4, paratuck2_to_parafac3, paratuck_general_to_parafac, tucker23_to_parafac3};
use ctensor::estimation::{als_confac, als_parafac, paratuck24_kron_ls, FitOptions, FitReport, Init};
use ctensor::io::{
    detect_field, format_matrix, format_model, parse_descriptor, read_model, read_tensor, write_matrix, write_model,
    write_tensor, write_tensor_binary, AnyModel, Field,
};
use ctensor::linalg::slice_norm;
use ctensor::models::{ParafacModel, ParatuckModel};
use ctensor::tensor::{matricize, mode_n_rank};
use ctensor::uniqueness::{
    kruskal_check, paralind_condition_probe, paratuck24_uniqueness, paratuck_uniqueness_extrapolated,
    relaxed_third_order_check, unimode_check, UniquenessReport, Verdict,
};
use ctensor::{Complex64, DenseTensor, ModePartition, Scalar};
use serde_json::json;

use crate::report;
use crate::{CheckArgs, Command, FitArgs, FitFamily, InfoArgs, SynthArgs, Target, TransformArgs, UnfoldArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(ctensor::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ctensor::Error::*;
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(Singular(_) | Identifiability { .. } | Precondition(_)) => 2,
            CliError::Lib(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => e.fmt(f),
        }
    }
}

impl From<ctensor::Error> for CliError {
    fn from(e: ctensor::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn input(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(usage(format!("input file `{}` does not exist", path.display())));
    }
    Ok(())
}

fn output(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(usage(format!("output directory `{}` does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

/// Runs `$body` with `T` bound to the scalar type declared in `$path`.
macro_rules! with_field {
    ($path:expr, $f:ident ( $($arg:expr),* )) => {
        match detect_field($path)? {
            Field::Real => $f::<f64>($($arg),*),
            Field::Complex => $f::<Complex64>($($arg),*),
        }
    };
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth(a) => {
            input(&a.model)?;
            output(&a.out)?;
            with_field!(&a.model, synth(&a))
        }
        Command::Unfold(a) => {
            input(&a.input)?;
            if let Some(out) = &a.out {
                output(out)?;
            }
            with_field!(&a.input, unfold(&a))
        }
        Command::Transform(a) => {
            input(&a.model)?;
            output(&a.out)?;
            with_field!(&a.model, transform(&a))
        }
        Command::Fit(a) => {
            input(&a.input)?;
            if let Some(k) = &a.known {
                input(k)?;
            }
            output(&a.out)?;
            with_field!(&a.input, fit(&a))
        }
        Command::Check(a) => {
            input(&a.model)?;
            with_field!(&a.model, check(&a))
        }
        Command::Info(a) => {
            input(&a.input)?;
            with_field!(&a.input, info(&a))
        }
    }
}

fn synth<T: Scalar>(a: &SynthArgs) -> Result<()> {
    let x = read_model::<T>(&a.model)?.synth()?;
    if a.binary {
        write_tensor_binary(&a.out, &x)?;
    } else {
        write_tensor(&a.out, &x)?;
    }
    Ok(())
}

fn unfold<T: Scalar>(a: &UnfoldArgs) -> Result<()> {
    let x = read_tensor::<T>(&a.input)?;
    let m = matricize(&x, &ModePartition::new(a.s1.clone(), a.s2.clone()))?;
    match &a.out {
        Some(out) => write_matrix(out, &m)?,
        None => print!("{}", format_matrix(&m)),
    }
    Ok(())
}

fn transform<T: Scalar>(a: &TransformArgs) -> Result<()> {
    let m = read_model::<T>(&a.model)?;
    let out = match (a.to, &m) {
        (Target::Tucker, AnyModel::Parafac(p)) => AnyModel::Tucker(p.as_tucker()),
        (Target::Tucker, AnyModel::Tucker(t)) => AnyModel::Tucker(t.clone()),
        (Target::Tucker, AnyModel::Confac(c)) => AnyModel::Tucker(c.as_tucker()),
        (Target::Tucker, AnyModel::Paratuck(p)) => AnyModel::Tucker(p.as_tucker()),
        (_, AnyModel::Parafac(p)) if a.to == Target::Parafac || p.order() == arity(a.to) => {
            AnyModel::Parafac(p.clone())
        }
        (Target::Parafac, AnyModel::Confac(c)) => AnyModel::Parafac(c.as_parafac()),
        (Target::Parafac, AnyModel::Paratuck(p)) => AnyModel::Parafac(paratuck_general_to_parafac(p)?),
        (Target::Parafac | Target::Parafac3, AnyModel::Tucker(t)) => AnyModel::Parafac(tucker23_to_parafac3(t)?),
        (Target::Parafac3, AnyModel::Paratuck(p)) => AnyModel::Parafac(paratuck2_to_parafac3(p)?),
        (Target::Parafac4, AnyModel::Paratuck(p)) => AnyModel::Parafac(paratuck24_to_parafac4(p)?),
        (Target::Parafac3 | Target::Parafac4, AnyModel::Confac(c)) if c.order() == arity(a.to) => {
            AnyModel::Parafac(c.as_parafac())
        }
        (to, m) => {
            return Err(ctensor::Error::Unsupported(format!(
                "no {:?} form for a {}-way {} model",
                to,
                m.dims().len(),
                m.family().name()
            ))
            .into())
        }
    };
    write_model(&a.out, &out)?;
    Ok(())
}

fn arity(t: Target) -> usize {
    match t {
        Target::Parafac3 => 3,
        Target::Parafac4 => 4,
        _ => 0,
    }
}

fn options<T: Scalar>(a: &FitArgs) -> FitOptions<T> {
    FitOptions { max_iters: a.max_iters, tol: a.tol, seed: a.seed, init: Init::Random, restarts: a.restarts }
}

fn fit<T: Scalar>(a: &FitArgs) -> Result<()> {
    let x = read_tensor::<T>(&a.input)?;
    let known = || -> Result<_> {
        let path = a.known.as_ref().ok_or_else(|| usage("--known is required for this family"))?;
        if detect_field(path)? != Field::of::<T>() {
            return Err(usage("known descriptor and input tensor have different fields"));
        }
        Ok(parse_descriptor::<T>(&std::fs::read_to_string(path)?)?)
    };
    let (model, rep): (AnyModel<T>, FitReport) = match a.family {
        FitFamily::Parafac => {
            let r = a.rank.ok_or_else(|| usage("--rank is required for parafac"))?;
            if r == 0 {
                return Err(usage("--rank must be positive"));
            }
            let (m, rep) = als_parafac(&x, r, &options(a))?;
            (AnyModel::Parafac(m), rep)
        }
        FitFamily::Confac => {
            let constraints = known()?.indexed("constraint");
            let (m, rep) = als_confac(&x, &constraints, &options(a))?;
            (AnyModel::Confac(m), rep)
        }
        FitFamily::Paratuck24 => {
            let d = known()?;
            let phis = d.indexed("constraint");
            if phis.len() != 2 {
                return Err(usage("paratuck24 needs constraint1 and constraint2 in the known descriptor"));
            }
            let c = d.tensor("input")?;
            let (a1, a2, rep) = paratuck24_kron_ls(&x, &phis[0], &phis[1], &c)?;
            (AnyModel::Paratuck(ParatuckModel::new(vec![a1, a2], phis, c)?), rep)
        }
    };
    let mut text = format_model(&model);
    for line in report::fit(&rep).lines() {
        text.push_str(&format!("# {line}\n"));
    }
    std::fs::write(&a.out, text)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&rep).expect("serializable report"));
    } else {
        print!("{}", report::fit(&rep));
    }
    Ok(())
}

fn check<T: Scalar>(a: &CheckArgs) -> Result<()> {
    let m = read_model::<T>(&a.model)?;
    let explicit = a.kruskal || a.relaxed || a.unimode || a.paralind || a.paratuck;
    let mut reports: Vec<UniquenessReport> = Vec::new();
    let ask = |cond: &str| -> bool {
        match cond {
            "kruskal" => a.kruskal,
            "relaxed" => a.relaxed,
            "unimode" => a.unimode,
            "paralind" => a.paralind,
            "paratuck" => a.paratuck,
            _ => false,
        }
    };
    match &m {
        AnyModel::Parafac(p) => {
            if !explicit || ask("kruskal") {
                reports.push(kruskal_check(&p.factors)?);
            }
            if ask("relaxed") {
                reports.push(third_order(p, |f| relaxed_third_order_check(&f[0], &f[1], &f[2]))?);
            }
            refuse(&ask, &["unimode", "paralind", "paratuck"], "parafac")?;
        }
        AnyModel::Confac(c) => {
            let f = c.constrained_factors();
            if !explicit || ask("kruskal") {
                reports.push(kruskal_check(&f)?);
            }
            if (!explicit && c.order() == 3) || ask("unimode") {
                reports.push(third_order(&c.as_parafac(), |f| unimode_check(&f[0], &f[1], &f[2]))?);
            }
            if ask("relaxed") {
                reports.push(third_order(&c.as_parafac(), |f| relaxed_third_order_check(&f[0], &f[1], &f[2]))?);
            }
            if ask("paralind") {
                reports.push(paralind_condition_probe(c, a.trials, a.seed)?);
            }
            refuse(&ask, &["paratuck"], "confac")?;
        }
        AnyModel::Paratuck(p) => {
            if !explicit || ask("paratuck") {
                reports.push(if p.n1() == 2 && p.order() == 4 {
                    paratuck24_uniqueness(p)?
                } else {
                    paratuck_uniqueness_extrapolated(p)?
                });
            }
            refuse(&ask, &["kruskal", "relaxed", "unimode", "paralind"], "paratuck")?;
        }
        AnyModel::Tucker(_) => {
            refuse(&ask, &["kruskal", "relaxed", "unimode", "paralind", "paratuck"], "tucker")?;
            let mut r = UniquenessReport {
                condition: "tucker".into(),
                verdict: Verdict::Fails,
                margin: None,
                k_ranks: Vec::new(),
                ranks: Vec::new(),
                case: None,
                witness: None,
                extrapolated: false,
                notes: Vec::new(),
                related: Vec::new(),
            };
            r.notes.push("Tucker models are only unique up to nonsingular transforms of each factor".into());
            reports.push(r);
        }
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&reports).expect("serializable report"));
    } else {
        print!("{}", report::uniqueness(&reports));
    }
    Ok(())
}

fn refuse(ask: &impl Fn(&str) -> bool, conds: &[&str], family: &str) -> Result<()> {
    match conds.iter().find(|c| ask(c)) {
        Some(c) => Err(usage(format!("--{c} does not apply to {family} models"))),
        None => Ok(()),
    }
}

fn third_order<T: Scalar>(
    p: &ParafacModel<T>,
    f: impl FnOnce(&[nalgebra::DMatrix<T>]) -> ctensor::Result<UniquenessReport>,
) -> Result<UniquenessReport> {
    if p.order() != 3 {
        return Err(ctensor::Error::Arity(format!("condition needs a third-order model, got order {}", p.order())).into());
    }
    let mut factors = p.factors.clone();
    if let Some(w) = &p.weights {
        for (mut col, &s) in factors[2].column_iter_mut().zip(w.iter()) {
            col *= s;
        }
    }
    Ok(f(&factors)?)
}

fn is_model(path: &Path) -> Result<bool> {
    let text = std::fs::read(path)?;
    let text = String::from_utf8_lossy(&text);
    Ok(text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).is_some_and(|l| l.starts_with("family:")))
}

fn info<T: Scalar>(a: &InfoArgs) -> Result<()> {
    let bytes = std::fs::metadata(&a.input)?.len();
    let (family, x): (Option<&str>, DenseTensor<T>) = if is_model(&a.input)? {
        let m = read_model::<T>(&a.input)?;
        (Some(m.family().name()), m.synth()?)
    } else {
        (None, read_tensor::<T>(&a.input)?)
    };
    let ranks = (1..=x.order()).map(|n| mode_n_rank(&x, n)).collect::<ctensor::Result<Vec<_>>>()?;
    let norm = slice_norm(x.data());
    let field = Field::of::<T>().name();
    if a.json {
        let v = json!({
            "file": a.input.display().to_string(),
            "bytes": bytes,
            "family": family,
            "field": field,
            "dims": x.dims(),
            "entries": x.len(),
            "mode_ranks": ranks,
            "frobenius_norm": norm,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable info"));
    } else {
        let join = |v: &[usize]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" x ");
        println!("file         {}", a.input.display());
        println!("bytes        {bytes}");
        if let Some(f) = family {
            println!("family       {f}");
        }
        println!("field        {field}");
        println!("dims         {}", join(x.dims()));
        println!("entries      {}", x.len());
        println!("mode ranks   {}", ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "));
        println!("norm         {norm:.6e}");
    }
    Ok(())
}
