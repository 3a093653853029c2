//! Experiment runners behind the CLI subcommands.

use serde::{Deserialize, Serialize};

use dm_secrecy::array_channel::Scenario;
use dm_secrecy::beamformers::{
    solve_leakage, solve_max_sr, solve_nsp, BeamformerSolution, ConvergenceTrace, InitKind,
    MethodTag, Termination,
};
use dm_secrecy::link_sim::ber_sweep;
use dm_secrecy::secrecy_metrics::{
    secrecy_rate, AnProjection, PowerProfile, Precoder,
};
use dm_secrecy::{C64, CMatrix, CVector};

use crate::config::ExperimentConfig;
use crate::rows::ExperimentRow;
use crate::CliError;

/// Portable dump of one solved beamformer.
///
/// Complex data is stored as interleaved `(re, im)` pairs; the AN matrix
/// is row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDump {
    pub method: String,
    pub snr_db: f64,
    pub seed: u64,
    pub secrecy_rate_bits: f64,
    pub alpha: f64,
    pub precoder_re_im: Vec<f64>,
    pub an_rows: usize,
    pub an_cols: usize,
    pub an_matrix_re_im: Vec<f64>,
}

impl SolutionDump {
    pub fn new(solution: &BeamformerSolution, snr_db: f64, seed: u64) -> Self {
        let v = solution.precoder.as_vector();
        let mut precoder_re_im = Vec::with_capacity(2 * v.len());
        for entry in v.iter() {
            precoder_re_im.push(entry.re);
            precoder_re_im.push(entry.im);
        }
        let p = solution.an.matrix();
        let mut an_matrix_re_im = Vec::with_capacity(2 * p.len());
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                an_matrix_re_im.push(p[(i, j)].re);
                an_matrix_re_im.push(p[(i, j)].im);
            }
        }
        Self {
            method: solution.method_tag.to_string(),
            snr_db,
            seed,
            secrecy_rate_bits: solution.secrecy_rate,
            alpha: solution.an.alpha(),
            precoder_re_im,
            an_rows: p.nrows(),
            an_cols: p.ncols(),
            an_matrix_re_im,
        }
    }

    /// Rebuild the precoder/AN pair, e.g. to re-validate the dumped rate.
    pub fn to_parts(&self) -> Result<(Precoder, AnProjection), CliError> {
        if self.precoder_re_im.len() % 2 != 0
            || self.an_matrix_re_im.len() != 2 * self.an_rows * self.an_cols
        {
            return Err(CliError::Config("corrupt solution dump".into()));
        }
        let v = CVector::from_iterator(
            self.precoder_re_im.len() / 2,
            self.precoder_re_im
                .chunks_exact(2)
                .map(|pair| C64::new(pair[0], pair[1])),
        );
        let mut matrix = CMatrix::zeros(self.an_rows, self.an_cols);
        for i in 0..self.an_rows {
            for j in 0..self.an_cols {
                let at = 2 * (i * self.an_cols + j);
                matrix[(i, j)] = C64::new(self.an_matrix_re_im[at], self.an_matrix_re_im[at + 1]);
            }
        }
        Ok((Precoder::new(v)?, AnProjection::new(matrix)?))
    }
}

/// Summary printed by the `solve` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub method: String,
    pub snr_db: f64,
    pub secrecy_rate_bits: f64,
    pub iterations: usize,
    pub terminated_by: String,
    pub init: String,
    pub degenerate: bool,
    pub sr_per_iteration: Vec<f64>,
    pub inner_gpi_iterations: Vec<usize>,
    pub solution: SolutionDump,
}

fn init_label(init: InitKind) -> String {
    match init {
        InitKind::Leakage => "leakage".into(),
        InitKind::Random { seed } => format!("random(seed={seed})"),
    }
}

fn init_seed(init: InitKind) -> u64 {
    match init {
        InitKind::Leakage => 0,
        InitKind::Random { seed } => seed,
    }
}

fn termination_label(t: Termination) -> &'static str {
    match t {
        Termination::Tolerance => "tolerance",
        Termination::MaxIter => "max_iter",
    }
}

/// Run the Max-SR solver once at `config.snr_db`.
pub fn run_solve(config: &ExperimentConfig, init: InitKind) -> Result<SolveSummary, CliError> {
    let scenario = config.scenario()?;
    let p = config.power(config.snr_db)?;
    let (solution, trace) = solve_max_sr(&scenario, &p, init, config.delta, config.max_outer)?;
    Ok(SolveSummary {
        method: solution.method_tag.to_string(),
        snr_db: config.snr_db,
        secrecy_rate_bits: solution.secrecy_rate,
        iterations: trace.iterations(),
        terminated_by: termination_label(trace.terminated_by).into(),
        init: init_label(init),
        degenerate: trace.degenerate,
        sr_per_iteration: trace.sr_per_iteration.clone(),
        inner_gpi_iterations: trace.inner_gpi_iterations.clone(),
        solution: SolutionDump::new(&solution, config.snr_db, init_seed(init)),
    })
}

fn solve_method(
    scenario: &Scenario,
    p: &PowerProfile,
    method: MethodTag,
    init: InitKind,
    config: &ExperimentConfig,
) -> Result<BeamformerSolution, CliError> {
    let solution = match method {
        MethodTag::MaxSr => solve_max_sr(scenario, p, init, config.delta, config.max_outer)?.0,
        MethodTag::Leakage => solve_leakage(scenario, p)?,
        MethodTag::Nsp => solve_nsp(scenario, p)?,
    };
    Ok(solution)
}

const ALL_METHODS: [MethodTag; 3] = [MethodTag::MaxSr, MethodTag::Leakage, MethodTag::Nsp];

/// Secrecy rate of all three methods at every SNR point.
///
/// A solver failure at one point becomes a `solver_error` row and the run
/// continues.
pub fn run_sr_vs_snr(
    config: &ExperimentConfig,
    init: InitKind,
    timestamp: &str,
) -> Result<(Vec<ExperimentRow>, Vec<SolutionDump>), CliError> {
    let scenario = config.scenario()?;
    let mut rows = Vec::new();
    let mut dumps = Vec::new();
    for &snr_db in &config.snr_db_list {
        let p = config.power(snr_db)?;
        for method in ALL_METHODS {
            let seed = match method {
                MethodTag::MaxSr => init_seed(init),
                _ => 0,
            };
            match solve_method(&scenario, &p, method, init, config) {
                Ok(solution) => {
                    rows.push(ExperimentRow {
                        method: method.to_string(),
                        sweep_var: "snr_db".into(),
                        sweep_value: snr_db,
                        metric: "secrecy_rate_bits".into(),
                        value: solution.secrecy_rate,
                        seed,
                        timestamp: timestamp.into(),
                    });
                    dumps.push(SolutionDump::new(&solution, snr_db, seed));
                }
                Err(err) => {
                    eprintln!("warning: {method} failed at {snr_db} dB: {err}");
                    rows.push(ExperimentRow {
                        method: method.to_string(),
                        sweep_var: "snr_db".into(),
                        sweep_value: snr_db,
                        metric: "solver_error".into(),
                        value: 1.0,
                        seed,
                        timestamp: timestamp.into(),
                    });
                }
            }
        }
    }
    Ok((rows, dumps))
}

fn trace_rows(
    trace: &ConvergenceTrace,
    metric: &str,
    iters_metric: &str,
    seed: u64,
    timestamp: &str,
    rows: &mut Vec<ExperimentRow>,
) {
    for (i, sr) in trace.sr_per_iteration.iter().enumerate() {
        rows.push(ExperimentRow {
            method: MethodTag::MaxSr.to_string(),
            sweep_var: "iteration".into(),
            sweep_value: (i + 1) as f64,
            metric: metric.into(),
            value: *sr,
            seed,
            timestamp: timestamp.into(),
        });
    }
    rows.push(ExperimentRow {
        method: MethodTag::MaxSr.to_string(),
        sweep_var: "seed".into(),
        sweep_value: seed as f64,
        metric: iters_metric.into(),
        value: trace.iterations() as f64,
        seed,
        timestamp: timestamp.into(),
    });
}

/// Per-iteration secrecy rate for the leakage initializer and for every
/// configured random seed, plus iterations-to-tolerance records.
pub fn run_convergence(
    config: &ExperimentConfig,
    timestamp: &str,
) -> Result<Vec<ExperimentRow>, CliError> {
    if config.seeds.is_empty() {
        return Err(CliError::Config(
            "the convergence experiment needs a non-empty seeds list".into(),
        ));
    }
    let scenario = config.scenario()?;
    let p = config.power(config.snr_db)?;
    let mut rows = Vec::new();

    let (_, leakage_trace) =
        solve_max_sr(&scenario, &p, InitKind::Leakage, config.delta, config.max_outer)?;
    trace_rows(
        &leakage_trace,
        "sr_leakage_init",
        "iters_to_tol_leakage_init",
        0,
        timestamp,
        &mut rows,
    );

    for &seed in &config.seeds {
        let (_, trace) = solve_max_sr(
            &scenario,
            &p,
            InitKind::Random { seed },
            config.delta,
            config.max_outer,
        )?;
        trace_rows(
            &trace,
            "sr_random_init",
            "iters_to_tol_random_init",
            seed,
            timestamp,
            &mut rows,
        );
    }
    Ok(rows)
}

/// BER versus receive angle for all three methods at `config.snr_db`.
pub fn run_ber_sweep(
    config: &ExperimentConfig,
    init: InitKind,
    link_seed: u64,
    timestamp: &str,
) -> Result<Vec<ExperimentRow>, CliError> {
    let scenario = config.scenario()?;
    let p = config.power(config.snr_db)?;
    let link = config.link_config(link_seed)?;
    let degrees = config.angle_grid_deg.degrees()?;
    let mut rows = Vec::new();
    for method in ALL_METHODS {
        let solution = solve_method(&scenario, &p, method, init, config)?;
        let curve = ber_sweep(&solution, &scenario, &p, &link)?;
        for (deg, ber) in degrees.iter().zip(curve.ber.iter()) {
            rows.push(ExperimentRow {
                method: method.to_string(),
                sweep_var: "angle_deg".into(),
                sweep_value: *deg,
                metric: "ber".into(),
                value: *ber,
                seed: link_seed,
                timestamp: timestamp.into(),
            });
        }
    }
    Ok(rows)
}

/// Re-evaluate a dumped solution's secrecy rate; the dump is self-contained
/// so emitted rates can be validated offline.
pub fn revalidate_dump(
    config: &ExperimentConfig,
    dump: &SolutionDump,
) -> Result<f64, CliError> {
    let scenario = config.scenario()?;
    let p = config.power(dump.snr_db)?;
    let (v, an) = dump.to_parts()?;
    Ok(secrecy_rate(&scenario, &v, &an, &p)?)
}
