//! The refinement loop: on each level assemble the Gram operator, estimate
//! the condition numbers of the quasi-diagonal and the diagonally scaled
//! system, record a row, refine.

mod csv;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

pub use csv::{format_row, parse_csv, read_csv, write_csv, CSV_HEADER};

use crate::assembly::Space;
use crate::error::{Error, Result};
use crate::matrix_market::{write_diagonal, write_matrix};
use crate::mesh::{check_dim, initial_mesh, SimplicialMesh};
use crate::precond::{Preconditioner, PreconditionerKind};
use crate::refine::{dorfler_mark, nvb_refine, singular_indicator, uniform_refine};
use crate::spectral::{extreme_eigs, EigOptions, GramOperator, LinearOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefineMode {
    Uniform,
    Adaptive,
}

impl RefineMode {
    pub fn name(self) -> &'static str {
        match self {
            RefineMode::Uniform => "uniform",
            RefineMode::Adaptive => "adaptive",
        }
    }
}

impl std::str::FromStr for RefineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(RefineMode::Uniform),
            "adaptive" => Ok(RefineMode::Adaptive),
            other => Err(Error::InvalidConfig(format!(
                "unknown refinement `{other}`"
            ))),
        }
    }
}

/// Largest number of levels accepted for a dimension and refinement mode.
pub fn level_cap(dim: usize, refine: RefineMode) -> usize {
    match (dim, refine) {
        (2, RefineMode::Uniform) => 7,
        (2, RefineMode::Adaptive) => 25,
        (3, _) => 4,
        _ => 3,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub degree: usize,
    pub space: Space,
    pub refine: RefineMode,
    /// Number of meshes; level 1 is the initial mesh.
    pub levels: usize,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub dump_matrices: Option<PathBuf>,
    /// When false the `seconds` column is written as zero, making output
    /// byte-reproducible.
    pub record_timing: bool,
}

impl ExperimentConfig {
    /// Defaults for a dimension: `alpha = 1/100` in 2D and 3D, `1/10` in 4D,
    /// `beta = 1/10`, `theta = 1/4`.
    pub fn new(dim: usize) -> Self {
        ExperimentConfig {
            dim,
            degree: 0,
            space: Space::Hm1,
            refine: RefineMode::Uniform,
            levels: 4,
            alpha: default_alpha(dim),
            beta: 0.1,
            theta: crate::refine::DEFAULT_THETA,
            tol: 1e-6,
            max_iter: 2000,
            seed: 0,
            out: None,
            dump_matrices: None,
            record_timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.degree > 1 {
            return bad(format!(
                "degree {} not supported (expected 0 or 1)",
                self.degree
            ));
        }
        if self.refine == RefineMode::Adaptive && self.dim != 2 {
            return bad("adaptive refinement is only available in 2D".into());
        }
        let cap = level_cap(self.dim, self.refine);
        if self.levels == 0 || self.levels > cap {
            return bad(format!(
                "levels must be in 1..={cap} for this configuration"
            ));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("tol", self.tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad(format!("theta = {} must lie in (0, 1]", self.theta));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        Ok(())
    }

    fn eig_options(&self) -> EigOptions {
        EigOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            ..EigOptions::default()
        }
    }
}

pub fn default_alpha(dim: usize) -> f64 {
    if dim == 4 {
        0.1
    } else {
        0.01
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub level: usize,
    pub num_elements: usize,
    pub num_dofs: usize,
    /// `kappa` of the diagonally scaled system (`C` or `C_1`).
    pub cond_diag: f64,
    /// `kappa` of the quasi-diagonally preconditioned system.
    pub cond_quasidiag: f64,
    /// Extreme eigenvalues of the quasi-diagonally preconditioned system.
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub seconds: f64,
}

/// Both condition numbers on one mesh.
pub fn measure_level(
    mesh: &SimplicialMesh,
    config: &ExperimentConfig,
    level: usize,
) -> Result<ExperimentRow> {
    let start = Instant::now();
    let a = GramOperator::new(mesh, config.degree, config.space, config.beta)?;
    let p = Preconditioner::new(
        mesh,
        PreconditionerKind::quasi_diag(config.space, config.degree)?,
        config.alpha,
    )?;
    let c = Preconditioner::new(
        mesh,
        PreconditionerKind::diagonal(config.degree)?,
        config.alpha,
    )?;
    let opts = config.eig_options();
    let quasi = extreme_eigs(&a, &p, &opts, None)?;
    let diag = extreme_eigs(&a, &c, &opts, Some(&p))?;
    if let Some(dir) = &config.dump_matrices {
        dump_level(dir, level, &p, &c)?;
    }
    Ok(ExperimentRow {
        level,
        num_elements: mesh.num_elements(),
        num_dofs: a.dim(),
        cond_diag: diag.kappa,
        cond_quasidiag: quasi.kappa,
        lambda_min: quasi.lambda_min,
        lambda_max: quasi.lambda_max,
        seconds: if config.record_timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        },
    })
}

fn dump_level(
    dir: &std::path::Path,
    level: usize,
    p: &Preconditioner,
    c: &Preconditioner,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let file = |name: &str| dir.join(format!("level{level}_{name}.mtx"));
    if let (Some(inc), Some(d)) = (p.incidence(), p.d()) {
        write_matrix(inc.matrix(), file("I"))?;
        write_diagonal(d, file("D"))?;
    }
    if let Some(cd) = c.c() {
        write_diagonal(cd, file("C"))?;
    }
    if !p.dp().is_empty() {
        write_diagonal(p.dp(), file("Dp"))?;
    }
    Ok(())
}

/// The next mesh of the loop.
pub fn refine_step(mesh: &SimplicialMesh, config: &ExperimentConfig) -> Result<SimplicialMesh> {
    match config.refine {
        RefineMode::Uniform => uniform_refine(mesh),
        RefineMode::Adaptive => {
            let mu = singular_indicator(mesh)?;
            let marked = dorfler_mark(&mu, config.theta)?;
            nvb_refine(mesh, &marked)
        }
    }
}

/// Runs all levels. With `config.out` set, the CSV is written row by row, so
/// a failure leaves the completed levels on disk.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    run_experiment_with(config, |_| {})
}

/// [`run_experiment`] calling `progress` after each level.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    mut progress: impl FnMut(&ExperimentRow),
) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    let mut out = match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{CSV_HEADER}")?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };
    let mut mesh = initial_mesh(config.dim)?;
    let mut rows = Vec::with_capacity(config.levels);
    for level in 1..=config.levels {
        if level > 1 {
            mesh = refine_step(&mesh, config)?;
        }
        let row = measure_level(&mesh, config, level)?;
        if let Some(w) = out.as_mut() {
            writeln!(w, "{}", format_row(&row))?;
            w.flush()?;
        }
        progress(&row);
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level_2d() {
        let mut cfg = ExperimentConfig::new(2);
        cfg.levels = 1;
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].num_elements, 12);
        assert_eq!(rows[0].num_dofs, 12);
        assert!(rows[0].cond_quasidiag >= 1.0 && rows[0].cond_diag >= 1.0);
    }

    #[test]
    fn uniform_4d_growth() {
        let mut cfg = ExperimentConfig::new(4);
        cfg.levels = 2;
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows[1].num_elements, 24 * 16);
    }

    #[test]
    fn adaptive_3d_rejected() {
        let mut cfg = ExperimentConfig::new(3);
        cfg.refine = RefineMode::Adaptive;
        assert!(matches!(run_experiment(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn invalid_parameters_rejected() {
        let base = ExperimentConfig::new(2);
        type Tweak = Box<dyn Fn(&mut ExperimentConfig)>;
        let cases: Vec<Tweak> = vec![
            Box::new(|c| c.theta = 0.0),
            Box::new(|c| c.theta = 1.5),
            Box::new(|c| c.alpha = -1.0),
            Box::new(|c| c.levels = 0),
            Box::new(|c| c.levels = 8),
            Box::new(|c| c.degree = 2),
            Box::new(|c| c.dim = 5),
        ];
        for f in cases {
            let mut c = base.clone();
            f(&mut c);
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn defaults() {
        assert_eq!(ExperimentConfig::new(2).alpha, 0.01);
        assert_eq!(ExperimentConfig::new(4).alpha, 0.1);
        assert_eq!(ExperimentConfig::new(3).beta, 0.1);
        assert_eq!(ExperimentConfig::new(2).theta, 0.25);
    }

    #[test]
    fn deterministic_output_and_dumps() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(2);
        cfg.levels = 3;
        cfg.degree = 1;
        cfg.record_timing = false;
        cfg.dump_matrices = Some(dir.path().join("mtx"));
        let mut texts = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("run{k}.csv"));
            cfg.out = Some(path.clone());
            let rows = run_experiment(&cfg).unwrap();
            assert_eq!(read_csv(&path).unwrap(), rows);
            texts.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(texts[0], texts[1]);
        for name in ["I", "D", "C", "Dp"] {
            assert!(dir
                .path()
                .join("mtx")
                .join(format!("level3_{name}.mtx"))
                .exists());
        }
    }
}
