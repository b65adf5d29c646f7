//! Experiment orchestration: seeding, local search, optional Lloyd passes and
//! diagnostics over many independent trials, with JSON/CSV reporting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    approximation_factor, exact_opt, planted_reference, LegalBetaSet, OptClustering, ReferenceKind,
    StructureReport,
};
use crate::error::{Error, Result};
use crate::generate::{generate_instance, InstanceSpec};
use crate::geometry::PointSet;
use crate::io::{load_points, PointFormat};
use crate::lloyd::lloyd_refine;
use crate::localsearch::{run_local_search_with, steps_for_epsilon, StepRecord};
use crate::sampling::RandomSource;
use crate::seeding::kmeanspp_seed;

/// Stream reserved for instance generation; trials use streams `0..trials`.
pub const INSTANCE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InputSource {
    File {
        path: PathBuf,
        #[serde(default)]
        format: PointFormat,
    },
    Generate {
        spec: InstanceSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSchedule {
    Epsilon(f64),
    Steps(usize),
}

impl StepSchedule {
    pub fn resolve(self, k: usize) -> Result<usize> {
        match self {
            StepSchedule::Epsilon(eps) => {
                if !(eps > 0.0 && eps <= 1.0) {
                    return Err(Error::usage(format!(
                        "epsilon must lie in (0, 1], got {eps}"
                    )));
                }
                steps_for_epsilon(eps, k)
            }
            StepSchedule::Steps(s) => Ok(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptMode {
    Exact,
    Planted,
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: InputSource,
    pub k: usize,
    pub schedule: StepSchedule,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub lloyd_iters: usize,
    #[serde(default)]
    pub diagnostics: bool,
    /// Snapshot after every step instead of at steps {0, ℓ/2, ℓ}.
    #[serde(default)]
    pub diagnostics_every_step: bool,
    #[serde(default)]
    pub opt_mode: OptMode,
    #[serde(default)]
    pub format: ReportFormat,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::usage("k must be >= 1"));
        }
        if self.trials == 0 {
            return Err(Error::usage("trials must be >= 1"));
        }
        self.schedule.resolve(self.k)?;
        if (self.diagnostics || self.diagnostics_every_step) && self.opt_mode == OptMode::None {
            return Err(Error::usage(
                "diagnostics need a reference: use --opt exact or planted",
            ));
        }
        if let InputSource::Generate { spec } = &self.input {
            spec.validate()?;
            if self.opt_mode == OptMode::Planted && !spec.is_planted() {
                return Err(Error::usage(format!("{spec} has no planted clustering")));
            }
        }
        if let InputSource::File { .. } = &self.input {
            if self.opt_mode == OptMode::Planted {
                return Err(Error::usage("--opt planted needs a generated instance"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub report: StructureReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub stream: u64,
    pub seeding_cost: f64,
    pub steps: Vec<StepRecord>,
    pub converged: bool,
    pub local_search_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lloyd_cost: Option<f64>,
    pub final_cost: f64,
    /// Point indices of the centers after local search.
    pub final_centers: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_centers: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeding_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<Snapshot>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let mut sum = 0.0;
        for v in values {
            sum += v;
        }
        Some(Stats {
            mean: sum / n as f64,
            median,
            min: sorted[0],
            max: sorted[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub steps_per_trial: usize,
    pub seeding_cost: Stats,
    pub final_cost: Stats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_kind: Option<ReferenceKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeding_factor: Option<Stats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_factor: Option<Stats>,
    /// Accepted swaps over attempted steps, across all trials.
    pub acceptance_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub n: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub instance: InstanceInfo,
    pub trials: Vec<TrialReport>,
    pub summary: Summary,
}

impl ExperimentReport {
    /// Copy with all wall-clock fields zeroed.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.trials {
            for s in &mut t.steps {
                s.elapsed_ns = 0;
            }
        }
        out
    }
}

/// Instance, optional planted labels and optional reference for a config.
pub struct Prepared {
    pub points: PointSet,
    pub labels: Option<Vec<usize>>,
    pub reference: Option<OptClustering>,
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let (points, labels) = match &config.input {
        InputSource::File { path, format } => (load_points(path, *format)?, None),
        InputSource::Generate { spec } => {
            let inst =
                generate_instance(spec, &mut RandomSource::new(config.seed, INSTANCE_STREAM))?;
            (inst.points, inst.labels)
        }
    };
    let reference = match config.opt_mode {
        OptMode::Exact => Some(exact_opt(&points, config.k)?),
        OptMode::Planted => {
            let labels = labels
                .as_ref()
                .ok_or_else(|| Error::usage("instance has no planted clustering"))?;
            Some(planted_reference(&points, labels)?)
        }
        OptMode::None => None,
    };
    let distinct = points.distinct_count();
    if config.k > distinct {
        return Err(Error::InfeasibleK {
            k: config.k,
            distinct,
        });
    }
    Ok(Prepared {
        points,
        labels,
        reference,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let prepared = prepare(config)?;
    run_prepared(config, &prepared)
}

pub fn run_prepared(config: &ExperimentConfig, prepared: &Prepared) -> Result<ExperimentReport> {
    let steps = config.schedule.resolve(config.k)?;
    let trials = (0..config.trials as u64)
        .into_par_iter()
        .map(|stream| run_trial(config, prepared, steps, stream))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&trials, steps, prepared.reference.as_ref());
    Ok(ExperimentReport {
        config: config.clone(),
        instance: InstanceInfo {
            n: prepared.points.len(),
            d: prepared.points.dim(),
        },
        trials,
        summary,
    })
}

fn run_trial(
    config: &ExperimentConfig,
    prepared: &Prepared,
    steps: usize,
    stream: u64,
) -> Result<TrialReport> {
    let points = &prepared.points;
    let mut rng = RandomSource::new(config.seed, stream);
    let mut state = kmeanspp_seed(points, config.k, &mut rng)?;
    let seeding_cost = state.total_cost();

    let reference = prepared.reference.as_ref();
    let snapshots_on = config.diagnostics || config.diagnostics_every_step;
    let betas = LegalBetaSet::for_k(config.k).union(&LegalBetaSet::powers_of_two(3, 7));
    let targets = [0, steps / 2, steps];
    let mut snapshots = Vec::new();
    let mut snapshot_error = None;
    let traj = run_local_search_with(points, &mut state, steps, &mut rng, |i, s| {
        let wanted = config.diagnostics_every_step || targets.contains(&i);
        if let (true, true, Some(r)) = (snapshots_on, wanted, reference) {
            match StructureReport::compute(points, s, r, &betas, None) {
                Ok(report) => snapshots.push(Snapshot { step: i, report }),
                Err(e) => snapshot_error = Some(e),
            }
        }
    })?;
    if let Some(e) = snapshot_error {
        return Err(e);
    }
    if let (true, Some(r)) = (snapshots_on, reference) {
        // Early convergence: make sure the final state is captured.
        let last = traj.steps_taken();
        if snapshots.last().is_none_or(|s| s.step != last) {
            let report = StructureReport::compute(points, &state, r, &betas, None)?;
            snapshots.push(Snapshot { step: last, report });
        }
    }

    let local_search_cost = state.total_cost();
    let (lloyd_cost, refined_centers) = if config.lloyd_iters > 0 {
        let refined = lloyd_refine(points, &state, config.lloyd_iters);
        (Some(refined.cost), Some(refined.centers))
    } else {
        (None, None)
    };
    let final_cost = lloyd_cost.unwrap_or(local_search_cost);
    Ok(TrialReport {
        stream,
        seeding_cost,
        steps: traj.records,
        converged: traj.converged,
        local_search_cost,
        lloyd_cost,
        final_cost,
        final_centers: state.centers().to_vec(),
        refined_centers,
        seeding_factor: reference.map(|r| approximation_factor(seeding_cost, r).value),
        factor: reference.map(|r| approximation_factor(final_cost, r).value),
        diagnostics: snapshots_on.then_some(snapshots),
    })
}

fn summarize(trials: &[TrialReport], steps: usize, reference: Option<&OptClustering>) -> Summary {
    let seeding: Vec<f64> = trials.iter().map(|t| t.seeding_cost).collect();
    let finals: Vec<f64> = trials.iter().map(|t| t.final_cost).collect();
    let attempted: usize = trials.iter().map(|t| t.steps.len() - 1).sum();
    let accepted: usize = trials
        .iter()
        .map(|t| t.steps.iter().skip(1).filter(|s| s.accepted).count())
        .sum();
    let factors = |f: fn(&TrialReport) -> Option<f64>| {
        let v: Vec<f64> = trials.iter().filter_map(f).collect();
        Stats::of(&v)
    };
    Summary {
        trials: trials.len(),
        steps_per_trial: steps,
        seeding_cost: Stats::of(&seeding).expect("trials >= 1"),
        final_cost: Stats::of(&finals).expect("trials >= 1"),
        reference_cost: reference.map(|r| r.total_cost),
        reference_kind: reference.map(|r| r.kind),
        seeding_factor: factors(|t| t.seeding_factor),
        final_factor: factors(|t| t.factor),
        acceptance_rate: if attempted == 0 {
            0.0
        } else {
            accepted as f64 / attempted as f64
        },
    }
}

/// Serializes the report as JSON, or as per-step CSV rows.
pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::Csv => {
            let mut out = String::from("trial,i,cost,accepted,sampled,removed,elapsed_ns\n");
            let opt = |v: Option<usize>| v.map_or(String::new(), |x| x.to_string());
            for t in &report.trials {
                for s in &t.steps {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        t.stream,
                        s.i,
                        s.cost,
                        s.accepted,
                        opt(s.sampled),
                        opt(s.removed),
                        s.elapsed_ns
                    ));
                }
            }
            Ok(out)
        }
    }
}

pub fn write_report(
    report: &ExperimentReport,
    format: ReportFormat,
    out: Option<&Path>,
) -> Result<()> {
    let text = render_report(report, format)?;
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cost;

    fn config(spec: &str, k: usize, schedule: StepSchedule, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            input: InputSource::Generate {
                spec: spec.parse().unwrap(),
            },
            k,
            schedule,
            trials,
            seed: 7,
            lloyd_iters: 0,
            diagnostics: false,
            diagnostics_every_step: false,
            opt_mode: OptMode::None,
            format: ReportFormat::Json,
            output: None,
        }
    }

    #[test]
    fn zero_steps_reports_seeding_cost() {
        let cfg = config("uniform:n=50,d=2", 4, StepSchedule::Steps(0), 1);
        let rep = run_experiment(&cfg).unwrap();
        let t = &rep.trials[0];
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.final_cost, t.seeding_cost);
        assert_eq!(rep.summary.final_cost.median, t.seeding_cost);
        assert!(t.factor.is_none());
    }

    #[test]
    fn oracle_too_large_fails_before_trials() {
        let mut cfg = config("uniform:n=50,d=2", 3, StepSchedule::Steps(1), 5);
        cfg.opt_mode = OptMode::Exact;
        assert!(matches!(
            run_experiment(&cfg),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = config("uniform:n=50,d=2", 3, StepSchedule::Epsilon(1.5), 1);
        assert!(cfg.validate().is_err());
        cfg.schedule = StepSchedule::Epsilon(0.5);
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.opt_mode = OptMode::Planted;
        assert!(cfg.validate().is_err());
        cfg.opt_mode = OptMode::None;
        cfg.diagnostics = true;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn reported_costs_match_recomputation() {
        let mut cfg = config(
            "gaussian_mixture:k=4,n=200,d=2,sep=8,scatter=1",
            4,
            StepSchedule::Epsilon(1.0),
            4,
        );
        cfg.opt_mode = OptMode::Planted;
        cfg.diagnostics = true;
        cfg.lloyd_iters = 3;
        let prepared = prepare(&cfg).unwrap();
        let rep = run_prepared(&cfg, &prepared).unwrap();
        for t in &rep.trials {
            let coords: Vec<&[f64]> = t
                .final_centers
                .iter()
                .map(|&c| prepared.points.point(c))
                .collect();
            let ls = cost(&prepared.points, &coords).unwrap();
            assert!((ls - t.local_search_cost).abs() <= 1e-9 * ls);
            let refined = cost(&prepared.points, t.refined_centers.as_ref().unwrap()).unwrap();
            assert!((refined - t.final_cost).abs() <= 1e-9 * refined);
            assert!(t.final_cost <= t.local_search_cost);
            let snaps = t.diagnostics.as_ref().unwrap();
            let steps: Vec<usize> = snaps.iter().map(|s| s.step).collect();
            assert_eq!(steps, vec![0, 2, 4]);
        }
        assert!(rep.summary.final_factor.is_some());
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let cfg = config("uniform:n=30,d=2", 3, StepSchedule::Steps(5), 2);
        let rep = run_experiment(&cfg).unwrap();
        let csv = render_report(&rep, ReportFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 1 + 2 * 6);
    }

    #[test]
    fn stats_median() {
        let s = Stats::of(&[3.0, 1.0, 2.0, 10.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!((s.min, s.max, s.mean), (1.0, 10.0, 4.0));
        assert!(Stats::of(&[]).is_none());
    }
}
