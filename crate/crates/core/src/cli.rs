//! Command-line front end. Reports are JSON on stdout unless `--human`.
//!
//! Exit codes: 0 success, 2 a mathematical finding (obstruction, nonzero
//! residual, nontrivial kernel, failed self-check), 1 usage or input error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebra::{cint, fmt_rat, parse_rat, rat, Rat};
use crate::crfields::{is_formally_nonminimal, slice_residual_n2};
use crate::detlab::{alpha_identity, det_report, verify_closed_form_r, MatrixKind};
use crate::error::{Error, Result};
use crate::flatten::{
    correction_dim, flatten_to_order, normalization_map, rigidity_kernel, Outcome,
};
use crate::manifold::{fixture, hy2_obstruction, ManifoldJet, Manifest, Reindex};
use crate::series::{Jet, Valuation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FINDING: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "crsing", version, about = "Exact formal flattening of codimension-two CR singular manifolds")]
struct Cli {
    /// Text rendering instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a manifest and classify its Bishop invariants.
    Invariants { file: PathBuf },
    /// Check the eliminated non-minimality identities through degree K.
    Nonminimal {
        file: PathBuf,
        #[arg(long)]
        order: u32,
    },
    /// Normalize order by order up to N.
    Flatten {
        file: PathBuf,
        #[arg(long)]
        to: u32,
        #[arg(long, value_name = "OUT.json")]
        emit_transform: Option<PathBuf>,
    },
    /// Exact kernel of normal form plus reduced system in degree M.
    Rigidity {
        #[arg(long)]
        n: usize,
        #[arg(long = "lambda", num_args = 1)]
        lambda: Vec<String>,
        #[arg(long)]
        degree: u32,
    },
    /// Determinant of a structured binomial matrix.
    Det {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        mhat: usize,
        #[arg(long)]
        xi: Option<String>,
    },
    /// Print or write a built-in fixture manifest.
    Example {
        name: String,
        /// key=value; repeatable.
        #[arg(long = "param", num_args = 1)]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a quick pass over the invariant suites.
    Selftest {
        #[arg(long, default_value_t = 5)]
        max_degree: u32,
    },
}

/// Parses `args` (program name first) and runs one command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok((report, code)) => {
            let text = if cli.human {
                render_human(&report)
            } else {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            };
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn load(path: &Path) -> Result<ManifoldJet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    ManifoldJet::from_manifest(&manifest)
}

fn ord_json(j: &Jet) -> Value {
    match j.ord() {
        Valuation::Finite(d) => json!(d),
        Valuation::Infinite => json!("Infinite"),
    }
}

fn reindexed(m: &ManifoldJet) -> Option<(ManifoldJet, Vec<usize>)> {
    match m.reindex_smallest_nonparabolic() {
        Reindex::Permuted { manifold, perm } => Some((manifold, perm)),
        Reindex::NotApplicable => None,
    }
}

fn dispatch(cmd: &Command) -> Result<(Value, i32)> {
    match cmd {
        Command::Invariants { file } => {
            let m = load(file)?;
            let classes: Vec<Value> = m
                .classify()
                .into_iter()
                .map(|(l, c)| json!({"value": fmt_rat(&l), "class": format!("{c:?}")}))
                .collect();
            let position = reindexed(&m).map(|(_, perm)| perm[m.n() - 1] + 1);
            Ok((
                json!({
                    "n": m.n(),
                    "order": m.order(),
                    "lambda": classes,
                    "smallest_nonparabolic": position,
                    "ord_p": ord_json(m.p()),
                    "ord_E": ord_json(m.e()),
                }),
                EXIT_OK,
            ))
        }
        Command::Nonminimal { file, order } => {
            let m = load(file)?;
            let r = is_formally_nonminimal(&m, *order)?;
            let code = if r.nonminimal { EXIT_OK } else { EXIT_FINDING };
            Ok((serde_json::to_value(r).expect("serializes"), code))
        }
        Command::Flatten {
            file,
            to,
            emit_transform,
        } => {
            let m = load(file)?;
            let Some((work, perm)) = reindexed(&m) else {
                return Ok((
                    json!({"outcome": "NotApplicable", "order": 2, "corrections": []}),
                    EXIT_FINDING,
                ));
            };
            let report = flatten_to_order(&work, *to)?;
            let mut v = report.to_json();
            v["permutation"] = json!(perm.iter().map(|p| p + 1).collect::<Vec<_>>());
            if let Some(path) = emit_transform {
                let t = json!({
                    "permutation": v["permutation"].clone(),
                    "corrections": v["corrections"].clone(),
                    "manifold": report.manifold.to_manifest(),
                });
                let text = serde_json::to_string_pretty(&t).expect("serializes") + "\n";
                std::fs::write(path, text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            }
            let code = match report.outcome {
                Outcome::Flattened(_) => EXIT_OK,
                _ => EXIT_FINDING,
            };
            Ok((v, code))
        }
        Command::Rigidity { n, lambda, degree } => {
            if lambda.len() != *n {
                return Err(Error::Invalid(format!(
                    "--n {n} needs {n} --lambda values, got {}",
                    lambda.len()
                )));
            }
            let lam = lambda.iter().map(|s| parse_rat(s)).collect::<Result<Vec<Rat>>>()?;
            let zero = Jet::zero(*n, 3);
            let m = ManifoldJet::new(3, lam, zero.clone(), zero)?;
            let Some((work, perm)) = reindexed(&m) else {
                return Err(Error::NotApplicable("every invariant is parabolic".into()));
            };
            let r = rigidity_kernel(work.lambda(), *degree)?;
            let mut v = r.to_json();
            v["permutation"] = json!(perm.iter().map(|p| p + 1).collect::<Vec<_>>());
            let code = if r.dimension() == 0 { EXIT_OK } else { EXIT_FINDING };
            Ok((v, code))
        }
        Command::Det { kind, mhat, xi } => {
            let kind: MatrixKind = kind.parse()?;
            let xi0 = xi.as_deref().map(parse_rat).transpose()?;
            let r = det_report(kind, *mhat, xi0.as_ref())?;
            let code = match &r.at_xi {
                Some(e) if !e.nonsingular => EXIT_FINDING,
                _ => EXIT_OK,
            };
            Ok((serde_json::to_value(r).expect("serializes"), code))
        }
        Command::Example { name, params, out } => {
            let mut map = BTreeMap::new();
            for p in params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("--param needs key=value, got {p:?}")))?;
                map.insert(k.to_string(), v.to_string());
            }
            let m = fixture(name, &map)?;
            let v = serde_json::to_value(m.to_manifest()).expect("serializes");
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&v).expect("serializes") + "\n";
                std::fs::write(path, text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                return Ok((json!({"written": path.display().to_string()}), EXIT_OK));
            }
            Ok((v, EXIT_OK))
        }
        Command::Selftest { max_degree } => {
            let checks = selftest(*max_degree)?;
            let passed = checks.iter().all(|(_, ok)| *ok);
            let list: Vec<Value> = checks
                .into_iter()
                .map(|(name, pass)| json!({"name": name, "pass": pass}))
                .collect();
            Ok((
                json!({"checks": list, "passed": passed}),
                if passed { EXIT_OK } else { EXIT_FINDING },
            ))
        }
    }
}

fn selftest(max_degree: u32) -> Result<Vec<(String, bool)>> {
    let top = max_degree.max(3);
    let mut out = Vec::new();
    for n in [2usize, 3] {
        for ln in [rat(0, 1), rat(1, 4)] {
            let mut lam = vec![rat(1, 3); n];
            lam[n - 1] = ln.clone();
            let mut ok = true;
            for m0 in 3..=top {
                let z = Jet::zero(n, m0);
                let m = ManifoldJet::new(m0, lam.clone(), z.clone(), z)?;
                let map = normalization_map(&m, m0);
                ok &= map.rows() == correction_dim(n, m0)
                    && map.cols() == correction_dim(n, m0)
                    && map.rank() == map.cols();
            }
            out.push((format!("normal form solvable n={n} lambda_n={ln} m0<={top}"), ok));
        }
    }
    for lam in [vec![rat(0, 1), rat(0, 1)], vec![rat(1, 4), rat(1, 8)]] {
        let mut ok = true;
        for m in 3..=top.min(5) {
            ok &= rigidity_kernel(&lam, m)?.dimension() == 0;
        }
        let label: Vec<String> = lam.iter().map(fmt_rat).collect();
        out.push((format!("rigidity lambda=({}) m<={}", label.join(","), top.min(5)), ok));
    }
    let cubic = fixture("cubic_nonminimal", &BTreeMap::new())?;
    out.push((
        "cubic fixture slice residual vanishes".into(),
        slice_residual_n2(&cubic)?.is_zero(),
    ));
    let hy2 = hy2_obstruction(&BTreeMap::from([((2, 2), cint(1, 0))]), 6)?;
    out.push((
        "hy2 fixture obstructed at order 4".into(),
        matches!(flatten_to_order(&hy2, 4)?.outcome, Outcome::Obstructed { m: 4, .. }),
    ));
    let s2 = det_report(MatrixKind::S, 1, None)?;
    out.push(("det S(2) = 2".into(), s2.det == "2"));
    let mut ok = true;
    for mh in 2..=3 {
        for kind in [MatrixKind::Rplus, MatrixKind::Rminus] {
            ok &= verify_closed_form_r(kind, mh)?.exponents_ok;
        }
    }
    out.push(("R closed form mhat<=3".into(), ok));
    let mut ok = true;
    for mh in 1..=3 {
        for k0 in 0..=3 * mh / 2 {
            ok &= alpha_identity(mh, k0)?.coeffs().is_empty();
        }
    }
    out.push(("alpha identity mhat<=3".into(), ok));
    Ok(out)
}

/// Indented key: value text for any report.
pub fn render_human(v: &Value) -> String {
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    match x {
                        Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            walk(x, indent + 1, out);
                        }
                        _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                    }
                }
            }
            Value::Array(items) => {
                for x in items {
                    if is_flat(x) {
                        out.push_str(&format!("{pad}- {}\n", scalar(x)));
                    } else {
                        out.push_str(&format!("{pad}-\n"));
                        walk(x, indent + 1, out);
                    }
                }
            }
            _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
        }
    }
    fn is_flat(v: &Value) -> bool {
        match v {
            Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array()),
            Value::Object(_) => false,
            _ => true,
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Array(a) => format!(
                "[{}]",
                a.iter().map(scalar).collect::<Vec<_>>().join(", ")
            ),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}
