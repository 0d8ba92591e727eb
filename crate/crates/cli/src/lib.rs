//! Scenario runner for the zero-cycle library: configs, suites and reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suites;

use zcycles::points::PointModel;

use config::Scenario;
use error::CliError;
use report::{LevelInfo, ModelInfo, Report};
use suites::{find_suite, Ctx, SUITES};

pub fn model_info(model: &PointModel) -> ModelInfo {
    let kind = if model.is_elliptic() {
        "elliptic"
    } else {
        "mock"
    };
    let levels = model
        .levels()
        .into_iter()
        .map(|e| {
            let g = model.level_group(e);
            LevelInfo {
                level: e,
                points: g.size(),
                group: g.group.to_string(),
            }
        })
        .collect();
    ModelInfo {
        kind: kind.to_string(),
        universe: model.universe_group().to_string(),
        size: model.size(),
        levels,
    }
}

/// Runs the named suites (the scenario's list, or all, when `names` is empty).
pub fn verify(scenario: &Scenario, names: &[String], timings: bool) -> Result<Report, CliError> {
    let model = scenario.build_model()?;
    verify_model(scenario, &model, names, timings)
}

pub fn verify_model(
    scenario: &Scenario,
    model: &PointModel,
    names: &[String],
    timings: bool,
) -> Result<Report, CliError> {
    let chosen = if names.is_empty() {
        &scenario.suites
    } else {
        names
    };
    let suites: Vec<_> = if chosen.is_empty() {
        SUITES.iter().collect()
    } else {
        chosen
            .iter()
            .map(|n| find_suite(n))
            .collect::<Result<_, _>>()?
    };
    let ctx = Ctx::new(scenario, model, timings);
    let mut checks = Vec::new();
    for suite in suites {
        checks.extend((suite.run)(&ctx)?);
    }
    let mut echo = scenario.clone();
    echo.suites = chosen.to_vec();
    Ok(Report::new(echo, model_info(model), checks))
}
