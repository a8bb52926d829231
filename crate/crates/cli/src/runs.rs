//! The four batch runs. Each reads a configuration, computes, and writes its
//! files into the output directory in a fixed order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dirac_nodal::asymptotics::{char_asym, char_derived, lambda_asym, lambda_derived, node_asym, AsymptoticConfig, NodeForm};
use dirac_nodal::forward::{eigenvalues_with, nodes_with, Propagator, SpectrumEntry};
use dirac_nodal::inverse::{reconstruct, InverseError, NodalSet, Reconstruction};
use dirac_nodal::model::{derive_coefficients, Coefficients, FunctionSpec, Problem};
use dirac_nodal::numerics::SampledFunction;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, Overrides, RunConfig, FROM_PROBLEM};
use crate::csvio::{read_csv, write_csv, AsymRow, IoError, Meta, NodeRow, ReconstructionRow, SpectrumRow};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("no eigenvalue found for n = {0:?} (use --allow-gaps to continue without them)")]
    Gap(Vec<i64>),
    #[error("invalid nodal data: {0}")]
    Nodal(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Gap(_) => 3,
            CliError::Nodal(_) => 4,
            CliError::Io(_) | CliError::Compute(_) => 1,
        }
    }
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

fn from_inverse(e: InverseError) -> CliError {
    match e {
        InverseError::MissingEigenvalue(n) => CliError::Gap(vec![n]),
        e @ (InverseError::Length { .. }
        | InverseError::NotIncreasing { .. }
        | InverseError::OutOfRange { .. }
        | InverseError::MissingIndex(_)) => CliError::Nodal(e.to_string()),
        e => compute(e),
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub allow_gaps: bool,
    pub overrides: Overrides,
}

impl RunOptions {
    fn file(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|source| IoError::Io { path: self.out_dir.display().to_string(), source })?;
        Ok(self.out_dir.join(name))
    }
}

pub fn load_config(path: &Path, opts: &RunOptions) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(path)?;
    config.apply(&opts.overrides)?;
    Ok(config)
}

/// Eigenvalues for `indices` (ascending, non-zero), with the missing ones.
fn spectrum_for(prop: &Propagator<'_, f64>, indices: &[i64], tol: f64) -> Result<(Vec<SpectrumEntry<f64>>, Vec<i64>), CliError> {
    let results = indices
        .par_iter()
        .map(|&n| eigenvalues_with(prop, n, n, tol).map(|s| (n, s)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(compute)?;
    let mut entries = Vec::new();
    let mut missing = Vec::new();
    for (n, s) in results {
        match s.entries.into_iter().find(|e| e.n == n) {
            Some(e) => entries.push(e),
            None => missing.push(n),
        }
    }
    Ok((entries, missing))
}

/// Writes `spectrum.csv` and `nodes.csv` for the spectrum range and the
/// inversion indices.
pub fn run_forward(config_path: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let config = load_config(config_path, opts)?;
    let problem = config.problem()?;
    let prop = Propagator::new(&problem).map_err(compute)?;
    let s = &config.spectrum;
    let mut indices: Vec<i64> = (s.n_min..=s.n_max).filter(|&n| n != 0).collect();
    indices.extend(&config.inversion.n_list);
    indices.sort_unstable();
    indices.dedup();

    let (entries, missing) = spectrum_for(&prop, &indices, s.tol)?;
    if !missing.is_empty() && !opts.allow_gaps {
        return Err(CliError::Gap(missing));
    }
    let lists = entries
        .par_iter()
        .filter(|e| e.n >= 1)
        .map(|e| nodes_with(&prop, e.lambda, e.n, s.tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(compute)?;

    let spectrum: Vec<SpectrumRow> =
        entries.iter().map(|e| SpectrumRow { n: e.n, lambda: e.lambda, residual: e.residual }).collect();
    let nodes: Vec<NodeRow> = lists
        .iter()
        .flat_map(|l| l.labelled_nodes().iter().enumerate().map(move |(j, &x)| NodeRow { n: l.n, j: j as i64, x }))
        .collect();
    let spectrum_path = opts.file("spectrum.csv")?;
    write_csv(&spectrum_path, &spectrum)?;
    let nodes_path = opts.file("nodes.csv")?;
    write_csv(&nodes_path, &nodes)?;
    Ok(vec![spectrum_path, nodes_path])
}

/// Groups node rows by `n` and validates the indices in `n_list`.
pub fn nodal_set_from_rows(rows: &[NodeRow], n_list: &[i64], provenance: &str) -> Result<NodalSet<f64>, CliError> {
    let mut by_n: BTreeMap<i64, Vec<&NodeRow>> = BTreeMap::new();
    for row in rows {
        by_n.entry(row.n).or_default().push(row);
    }
    let mut set = NodalSet::new(provenance);
    for &n in n_list {
        let group = by_n.get(&n).ok_or_else(|| CliError::Nodal(format!("n = {n}: no rows")))?;
        if let Some((k, row)) = group.iter().enumerate().find(|(k, row)| row.j != *k as i64) {
            return Err(CliError::Nodal(format!("n = {n}: expected row j = {k}, found j = {}", row.j)));
        }
        set.insert(n, group.iter().map(|r| r.x).collect()).map_err(from_inverse)?;
    }
    Ok(set)
}

/// `L` on the problem grid, from the kernel or from the configured expression.
fn known_l(config: &RunConfig, problem: &Problem<f64>, coeffs: Option<&Coefficients<f64>>) -> Result<SampledFunction<f64>, CliError> {
    if config.inversion.l == FROM_PROBLEM {
        return match coeffs {
            Some(c) => Ok(c.big_l.clone()),
            None => Ok(derive_coefficients(problem).map_err(compute)?.big_l),
        };
    }
    let spec = FunctionSpec::parse(&config.inversion.l).map_err(|e| ConfigError { path: "inversion.l".into(), message: e.to_string() })?;
    spec.sample(&problem.grid)
        .map_err(|e| CliError::Config(ConfigError { path: "inversion.l".into(), message: e.to_string() }))
}

fn reconstruction_rows(rec: &Reconstruction<f64>) -> Vec<ReconstructionRow> {
    let xs = rec.mu_hat.grid().nodes();
    (0..xs.len())
        .map(|i| ReconstructionRow {
            x: xs[i],
            mu: rec.mu_hat.values()[i],
            mu_prime: rec.mu_prime_hat.values()[i],
            v_sq: rec.v_sq_hat.values()[i],
            v: rec.v_hat.values()[i],
            p: rec.p_hat.values()[i],
            r: rec.r_hat.values()[i],
        })
        .collect()
}

fn reconstruction_meta(rec: &Reconstruction<f64>, set: &NodalSet<f64>, n_list: &[i64]) -> Meta {
    let mut m = Meta::default();
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), crate::csvio::fmt_real);
    m.push("provenance", &set.provenance);
    m.push("n_list", n_list.iter().map(i64::to_string).collect::<Vec<_>>().join(","));
    m.push_real("theta_hat", rec.theta_hat);
    m.push_real("omega_pi_hat", rec.omega_pi_hat);
    m.push("v0_hat", opt(rec.v0_hat));
    m.push_real("a_hat", rec.a_hat);
    m.push("a_hat_anchor", opt(rec.a_hat_anchor));
    m.push_real("a_hat_h", rec.a_hat_h);
    let d = &rec.diagnostics;
    m.push_real("f_pi_residual", d.f_pi_residual);
    m.push_real("h_spread", d.h_spread);
    m.push("clip_count", d.clip_count);
    m.push("degenerate_theta", d.degenerate_theta);
    m.push("v_sign_unresolved", d.v_sign_unresolved);
    m.push("a_converged", d.a_converged);
    m.push("a_iterations", d.a_iterations);
    m.push_real("v_sq_form_gap", d.v_sq_form_gap);
    m.push_real("printed_omega_pi", rec.printed.omega_pi);
    m.push_real("printed_v0", rec.printed.v0);
    m
}

fn write_reconstruction(rec: &Reconstruction<f64>, set: &NodalSet<f64>, n_list: &[i64], opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let csv_path = opts.file("reconstruction.csv")?;
    write_csv(&csv_path, &reconstruction_rows(rec))?;
    let meta_path = opts.file("reconstruction.meta")?;
    reconstruction_meta(rec, set, n_list).write(&meta_path)?;
    Ok(vec![csv_path, meta_path])
}

/// Reconstructs from a nodes file; writes `reconstruction.csv` and `reconstruction.meta`.
pub fn run_invert(nodes_path: &Path, config_path: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let config = load_config(config_path, opts)?;
    let problem = config.problem()?;
    let rows: Vec<NodeRow> = read_csv(nodes_path).map_err(|e| CliError::Nodal(e.to_string()))?;
    let n_list = &config.inversion.n_list;
    let set = nodal_set_from_rows(&rows, n_list, &nodes_path.display().to_string())?;
    let l = known_l(&config, &problem, None)?;
    let rec = reconstruct(&set, &l, &config.inversion_options()).map_err(from_inverse)?;
    write_reconstruction(&rec, &set, n_list, opts)
}

/// Sup-norm errors of a reconstruction against the generating problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripErrors {
    pub theta: f64,
    pub omega_pi: f64,
    pub mu: f64,
    pub p_plus_r: f64,
    pub v_sq: f64,
    pub p: f64,
    pub r: f64,
}

pub fn roundtrip_errors(rec: &Reconstruction<f64>, problem: &Problem<f64>, coeffs: &Coefficients<f64>, interior: (f64, f64)) -> Result<RoundTripErrors, CliError> {
    let (a, b) = interior;
    let eval = |f: &FunctionSpec<f64>, x: f64| f.eval(x).unwrap_or(f64::NAN);
    let sup = |est: &SampledFunction<f64>, truth: &dyn Fn(f64) -> f64| est.sup_diff_on(truth, a, b);
    let p_plus_r = rec.mu_prime_hat.map(|_, m| 2.0 * m).map_err(compute)?;
    Ok(RoundTripErrors {
        theta: (rec.theta_hat - problem.theta()).abs(),
        omega_pi: (rec.omega_pi_hat - coeffs.omega_pi).abs(),
        mu: sup(&rec.mu_hat, &|x| coeffs.mu.interpolate(x)),
        p_plus_r: sup(&p_plus_r, &|x| eval(&problem.p, x) + eval(&problem.r, x)),
        v_sq: sup(&rec.v_sq_hat, &|x| (0.5 * (eval(&problem.p, x) - eval(&problem.r, x))).powi(2)),
        p: sup(&rec.p_hat, &|x| eval(&problem.p, x)),
        r: sup(&rec.r_hat, &|x| eval(&problem.r, x)),
    })
}

/// Forward nodes → reconstruction → comparison; writes `roundtrip.meta` and
/// `reconstruction.csv`.
pub fn run_roundtrip(config_path: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let config = load_config(config_path, opts)?;
    let problem = config.problem()?;
    let coeffs = derive_coefficients(&problem).map_err(compute)?;
    let n_list = &config.inversion.n_list;
    let set = NodalSet::from_problem(&problem, n_list, config.spectrum.tol).map_err(from_inverse)?;
    let l = known_l(&config, &problem, Some(&coeffs))?;
    let inv = config.inversion_options();
    let rec = reconstruct(&set, &l, &inv).map_err(from_inverse)?;
    let err = roundtrip_errors(&rec, &problem, &coeffs, inv.interior)?;

    let t = &config.tolerances;
    let checks = [
        ("theta", err.theta, t.theta),
        ("omega_pi", err.omega_pi, t.omega_pi),
        ("mu", err.mu, t.mu),
        ("p_plus_r", err.p_plus_r, t.p_plus_r),
        ("v_sq", err.v_sq, t.v_sq),
        ("p", err.p, t.p),
        ("r", err.r, t.r),
    ];
    let mut m = Meta::default();
    m.push("n_list", n_list.iter().map(i64::to_string).collect::<Vec<_>>().join(","));
    m.push_real("theta_hat", rec.theta_hat);
    m.push_real("omega_pi_hat", rec.omega_pi_hat);
    m.push_real("omega_pi_true", coeffs.omega_pi);
    m.push_real("omega_pi_effective", coeffs.omega_effective(n_list[0]));
    m.push_real("f_pi_residual", rec.diagnostics.f_pi_residual);
    let mut all = true;
    for (name, e, tol) in checks {
        let pass = e <= tol;
        all &= pass;
        m.push_real(&format!("{name}_error"), e);
        m.push_real(&format!("{name}_tol"), tol);
        m.push(&format!("{name}_status"), if pass { "PASS" } else { "FAIL" });
    }
    m.push("status", if all { "PASS" } else { "FAIL" });
    let meta_path = opts.file("roundtrip.meta")?;
    m.write(&meta_path)?;
    let csv_path = opts.file("reconstruction.csv")?;
    write_csv(&csv_path, &reconstruction_rows(&rec))?;
    Ok(vec![meta_path, csv_path])
}

/// Least-squares slope of `ln value` against `ln n`.
pub fn loglog_slope(points: &[(i64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(n, v)| *n != 0 && *v > 0.0).map(|&(n, v)| ((n.abs() as f64).ln(), v.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn row(quantity: &str, form: &str, n: Option<i64>, value: f64) -> AsymRow {
    AsymRow { quantity: quantity.into(), form: form.into(), n, value }
}

/// Writes `asym_report.csv`: asymptotic residuals per `n`, their decay
/// slopes, and the quoted-against-rederived reconstruction constants.
pub fn run_check(config_path: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let config = load_config(config_path, opts)?;
    let problem = config.problem()?;
    let coeffs = derive_coefficients(&problem).map_err(compute)?;
    let cfg = AsymptoticConfig::new(&coeffs);
    let prop = Propagator::new(&problem).map_err(compute)?;
    let s = &config.spectrum;
    let indices: Vec<i64> = (s.n_min..=s.n_max).filter(|&n| n != 0).collect();
    let (entries, missing) = spectrum_for(&prop, &indices, s.tol)?;
    if !missing.is_empty() && !opts.allow_gaps {
        return Err(CliError::Gap(missing));
    }

    let mut rows = Vec::new();
    let mut series: BTreeMap<(&str, &str), Vec<(i64, f64)>> = BTreeMap::new();
    let mut record = |rows: &mut Vec<AsymRow>, q: &'static str, form: &'static str, n: i64, v: f64| {
        rows.push(row(q, form, Some(n), v));
        series.entry((q, form)).or_default().push((n, v));
    };
    let node_forms = [("printed", NodeForm::Printed), ("derived", NodeForm::Derived), ("resummed", NodeForm::Resummed)];
    let node_lists = entries
        .par_iter()
        .map(|e| if e.n >= 1 { nodes_with(&prop, e.lambda, e.n, s.tol).map(Some) } else { Ok(None) })
        .collect::<Result<Vec<_>, _>>()
        .map_err(compute)?;
    for (k, e) in entries.iter().enumerate() {
        let n = e.n;
        let printed = lambda_asym(&cfg, n).map_err(compute)?;
        let derived = lambda_derived(&cfg, n).map_err(compute)?;
        record(&mut rows, "eigenvalue", "printed", n, (e.lambda - printed).abs());
        record(&mut rows, "eigenvalue", "derived", n, (e.lambda - derived).abs());
        if let Some(list) = node_lists[k].as_ref().filter(|l| l.count_matches()) {
            for (name, form) in node_forms {
                let mut worst: f64 = 0.0;
                for (j, &x) in list.labelled_nodes().iter().enumerate() {
                    worst = worst.max((x - node_asym(&cfg, n, j as i64, form).map_err(compute)?).abs());
                }
                record(&mut rows, "node", name, n, worst);
            }
        }
        if let Some(next) = entries.get(k + 1).filter(|x| x.n == n + 1) {
            let mid = 0.5 * (e.lambda + next.lambda);
            let fwd = prop.characteristic(mid).map_err(compute)?;
            record(&mut rows, "characteristic", "printed", n, (fwd - char_asym(&cfg, mid)).abs());
            record(&mut rows, "characteristic", "derived", n, (fwd - char_derived(&cfg, mid)).abs());
        }
    }
    for ((q, form), pts) in &series {
        let positive: Vec<(i64, f64)> = pts.iter().copied().filter(|p| p.0 > 0).collect();
        if let Some(slope) = loglog_slope(&positive) {
            rows.push(row(&format!("{q}_slope"), form, None, slope));
        }
    }

    // Reconstruction constants, as quoted and as re-derived.
    let n_list = &config.inversion.n_list;
    let set = NodalSet::from_problem(&problem, n_list, s.tol).map_err(from_inverse)?;
    let l = known_l(&config, &problem, Some(&coeffs))?;
    let inv = config.inversion_options();
    let rec = reconstruct(&set, &l, &inv).map_err(from_inverse)?;
    let (a, b) = inv.interior;
    let eval = |f: &FunctionSpec<f64>, x: f64| f.eval(x).unwrap_or(f64::NAN);
    let sum = |x: f64| eval(&problem.p, x) + eval(&problem.r, x);
    let mean_offset = |est: &SampledFunction<f64>, scale: f64| {
        let pts: Vec<f64> = est
            .grid()
            .nodes()
            .into_iter()
            .zip(est.values())
            .filter(|(x, _)| *x >= a && *x <= b)
            .map(|(x, &v)| scale * v - sum(x))
            .collect();
        pts.iter().sum::<f64>() / pts.len() as f64
    };
    rows.push(row("p_plus_r_offset", "derived", None, mean_offset(&rec.mu_prime_hat, 2.0)));
    rows.push(row("p_plus_r_offset", "printed", None, mean_offset(&rec.printed.mu_prime_sum, 1.0)));
    rows.push(row("omega_pi_error", "derived", None, rec.omega_pi_hat - coeffs.omega_pi));
    rows.push(row("omega_pi_error", "printed", None, rec.printed.omega_pi - coeffs.omega_pi));
    if let Some(v0) = rec.v0_hat {
        rows.push(row("v0_error", "derived", None, v0 - coeffs.v.first()));
        rows.push(row("v0_error", "printed", None, rec.printed.v0 - coeffs.v.first()));
    }
    let v_sq = |x: f64| coeffs.v.interpolate(x).powi(2);
    rows.push(row("v_sq_error", "derived", None, rec.v_sq_hat.sup_diff_on(v_sq, a, b)));
    rows.push(row("v_sq_error", "printed", None, rec.printed.rho_sq.sup_diff_on(v_sq, a, b)));

    let path = opts.file("asym_report.csv")?;
    write_csv(&path, &rows)?;
    Ok(vec![path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(json: &str) -> (tempfile::TempDir, PathBuf, RunOptions) {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        std::fs::write(&cfg, json).unwrap();
        let opts = RunOptions { out_dir: dir.path().join("out"), ..RunOptions::default() };
        (dir, cfg, opts)
    }

    fn p1_json(extra: &str) -> String {
        let e = dirac_nodal::fixtures::P1_EXPRS;
        format!(
            r#"{{"problem": {{"theta": "pi/3", "p": "{}", "r": "{}", "m11": "{}", "m12": "{}", "m21": "{}", "m22": "{}", "omega": "{}"}}{extra}}}"#,
            e[0], e[1], e[2], e[3], e[4], e[5], e[6]
        )
    }

    #[test]
    fn forward_zero_problem() {
        let (_d, cfg, opts) = setup(r#"{"problem": {"theta": "pi/2"}, "spectrum": {"n_max": 5}, "inversion": {"n_list": [2, 3]}}"#);
        let files = run_forward(&cfg, &opts).unwrap();
        let spec: Vec<SpectrumRow> = read_csv(&files[0]).unwrap();
        assert_eq!(spec.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        for r in &spec {
            assert!((r.lambda - (r.n + 1) as f64).abs() < 1e-8, "{r:?}");
        }
        let nodes: Vec<NodeRow> = read_csv(&files[1]).unwrap();
        let n3: Vec<f64> = nodes.iter().filter(|r| r.n == 3).map(|r| r.x).collect();
        for (x, want) in n3.iter().zip([PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]) {
            assert!((x - want).abs() < 1e-8);
        }
        assert_eq!(n3.len(), 3);
    }

    #[test]
    fn forward_p1_nodes() {
        let (_d, cfg, opts) = setup(&p1_json(r#", "spectrum": {"n_min": 40, "n_max": 40}, "inversion": {"n_list": [39, 40]}"#));
        let files = run_forward(&cfg, &opts).unwrap();
        let nodes: Vec<NodeRow> = read_csv(&files[1]).unwrap();
        let xs: Vec<f64> = nodes.iter().filter(|r| r.n == 40).map(|r| r.x).collect();
        assert_eq!(xs.len(), 40);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(xs[0] > 0.0 && xs[39] < PI);
    }

    #[test]
    fn bad_theta_is_a_config_error() {
        let (_d, cfg, opts) = setup(r#"{"problem": {"theta": 4.0}}"#);
        let e = run_forward(&cfg, &opts).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("problem.theta"), "{e}");
    }

    #[test]
    fn missing_eigenvalue_is_a_gap() {
        let json = r#"{"problem": {"theta": "pi/2", "p": "1.3", "r": "-1.3", "grid_n": 1000},
                       "spectrum": {"n_max": 3}, "inversion": {"n_list": [2, 3]}}"#;
        let (_d, cfg, mut opts) = setup(json);
        let e = run_forward(&cfg, &opts).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(matches!(&e, CliError::Gap(ns) if ns == &vec![1]), "{e}");
        opts.allow_gaps = true;
        run_forward(&cfg, &opts).unwrap();
    }

    #[test]
    fn invert_zero_problem_nodes() {
        let (d, cfg, opts) = setup(r#"{"problem": {"theta": "pi/2"}, "spectrum": {"n_min": 1, "n_max": 1}}"#);
        let files = run_forward(&cfg, &opts).unwrap();
        let out = RunOptions { out_dir: d.path().join("inv"), ..opts.clone() };
        let files = run_invert(&files[1], &cfg, &out).unwrap();
        let meta = Meta::read(&files[1]).unwrap();
        assert!((meta.get_real("theta_hat").unwrap() - PI / 2.0).abs() < 1e-3);
        assert!(meta.get_real("omega_pi_hat").unwrap().abs() < 5e-2);
        let rows: Vec<ReconstructionRow> = read_csv(&files[0]).unwrap();
        assert_eq!(rows.len(), 101);
        assert!(rows.iter().all(|r| r.p.abs() < 5e-2 && r.r.abs() < 5e-2));
    }

    #[test]
    fn truncated_nodes_file_names_the_index() {
        let (d, cfg, opts) = setup(r#"{"problem": {"theta": "pi/2"}, "spectrum": {"n_min": 1, "n_max": 1}}"#);
        let files = run_forward(&cfg, &opts).unwrap();
        let rows: Vec<NodeRow> = read_csv(&files[1]).unwrap();
        let cut: Vec<NodeRow> = rows.into_iter().filter(|r| !(r.n == 200 && r.j == 199)).collect();
        let path = d.path().join("cut.csv");
        write_csv(&path, &cut).unwrap();
        let e = run_invert(&path, &cfg, &opts).unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("200"), "{e}");

        let e = run_invert(&d.path().join("absent.csv"), &cfg, &opts).unwrap_err();
        assert_eq!(e.exit_code(), 4);
    }

    #[test]
    fn roundtrip_zero_problem_passes() {
        let (_d, cfg, opts) = setup(r#"{"problem": {"theta": "pi/3"}}"#);
        let files = run_roundtrip(&cfg, &opts).unwrap();
        let meta = Meta::read(&files[0]).unwrap();
        assert_eq!(meta.get("status"), Some("PASS"), "{meta:?}");
    }

    #[test]
    fn fewer_indices_reconstruct_worse() {
        let (_d, cfg, opts) = setup(&p1_json(""));
        let full = Meta::read(&run_roundtrip(&cfg, &opts).unwrap()[0]).unwrap();
        let coarse = RunOptions {
            overrides: Overrides { n_list: Some(vec![10, 20]), ..Overrides::default() },
            ..opts.clone()
        };
        let few = Meta::read(&run_roundtrip(&cfg, &coarse).unwrap()[0]).unwrap();
        for key in ["mu_error", "p_error"] {
            assert!(few.get_real(key).unwrap() > full.get_real(key).unwrap(), "{key}");
        }
    }

    #[test]
    fn check_writes_every_row_kind() {
        let (_d, cfg, opts) = setup(&p1_json(r#", "spectrum": {"n_min": 10, "n_max": 20}"#));
        let rows: Vec<AsymRow> = read_csv(&run_check(&cfg, &opts).unwrap()[0]).unwrap();
        let has = |q: &str, f: &str| rows.iter().any(|r| r.quantity == q && r.form == f);
        for q in ["eigenvalue", "node", "characteristic", "eigenvalue_slope", "node_slope", "p_plus_r_offset", "omega_pi_error", "v0_error", "v_sq_error"] {
            assert!(has(q, "printed") && has(q, "derived"), "{q}");
        }
        assert!(has("node", "resummed"));
        let slope = rows.iter().find(|r| r.quantity == "eigenvalue_slope" && r.form == "derived").unwrap().value;
        assert!(slope < -1.5, "{slope}");
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(i64, f64)> = [10, 20, 40].iter().map(|&n| (n, 3.0 / (n as f64).powi(3))).collect();
        assert!((loglog_slope(&pts).unwrap() + 3.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
    }
}
