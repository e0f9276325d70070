//! Seeded benchmark episodes over scripted scenarios, with table emitters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::runner::{run_mission, EpisodeResult};
use super::{MissionConfig, PlannerConfig};
use crate::affordance::AffordanceModel;
use crate::embodiment::{EmbodimentKind, EmbodimentSpec};
use crate::error::Result;
use crate::scenario;
use crate::seeds;

/// One summary row (one scenario/embodiment/modulation condition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub scenario: String,
    pub embodiment: String,
    pub modulated: bool,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Chosen-candidate tags across episodes.
    pub tag_choices: BTreeMap<String, usize>,
    pub mean_interventions: f64,
}

/// Run seeded episodes of a scripted scenario under one condition.
///
/// Scripted benchmarks execute all five waypoints of a single plan per
/// episode, reproducing one-choice-per-run semantics: the candidate picked
/// at the first plan decides the outcome.
pub fn run_benchmark(
    scenario_id: &str,
    spec: &EmbodimentSpec,
    model: Option<&AffordanceModel>,
    modulated: bool,
    episodes: usize,
    master_seed: u64,
) -> Result<(BenchmarkRow, Vec<EpisodeResult>)> {
    let scenario = scenario::build(scenario_id)?;
    let planner = PlannerConfig::Scripted {
        scenario: scenario_id.to_string(),
    };
    let mut results = Vec::with_capacity(episodes);
    let mut tag_choices: BTreeMap<String, usize> = BTreeMap::new();
    let mut successes = 0usize;
    let mut interventions = 0usize;
    for episode in 0..episodes {
        let config = MissionConfig {
            m_execute: 5,
            max_plans: Some(1),
            ablate_modulation: !modulated,
            seed: seeds::derive(
                master_seed,
                &format!("bench/{scenario_id}/{modulated}/{episode}"),
            ),
            ..MissionConfig::default()
        };
        let result = run_mission(
            &scenario.world,
            spec,
            &planner,
            model,
            scenario.start,
            &[scenario.goal],
            &config,
        )?;
        successes += usize::from(result.success);
        interventions += result.interventions;
        if let Some(choice) = result.first_choice() {
            *tag_choices.entry(choice.tag.unwrap_or_else(|| "untagged".into())).or_default() += 1;
        }
        results.push(result);
    }
    let row = BenchmarkRow {
        scenario: scenario_id.to_string(),
        embodiment: match spec.kind {
            EmbodimentKind::Legged => "legged".into(),
            EmbodimentKind::Wheeled => "wheeled".into(),
        },
        modulated,
        episodes,
        successes,
        success_rate: successes as f64 / episodes.max(1) as f64,
        tag_choices,
        mean_interventions: interventions as f64 / episodes.max(1) as f64,
    };
    Ok((row, results))
}

fn choices_cell(row: &BenchmarkRow) -> String {
    if row.tag_choices.is_empty() {
        "-".to_string()
    } else {
        row.tag_choices
            .iter()
            .map(|(tag, n)| format!("{tag}:{n}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Markdown table mirroring the per-condition benchmark layout.
pub fn markdown_table(rows: &[BenchmarkRow]) -> String {
    let mut out = String::from(
        "| Scenario | Embodiment | Modulation | Episodes | SR | Choices | NI |\n|---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {:.1}% | {} | {:.2} |\n",
            r.scenario,
            r.embodiment,
            if r.modulated { "with" } else { "none" },
            r.episodes,
            r.success_rate * 100.0,
            choices_cell(r),
            r.mean_interventions,
        ));
    }
    out
}

/// CSV twin of [`markdown_table`].
pub fn csv_table(rows: &[BenchmarkRow]) -> String {
    let mut out = String::from("scenario,embodiment,modulation,episodes,successes,success_rate,choices,mean_interventions\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.4},{},{:.2}\n",
            r.scenario,
            r.embodiment,
            if r.modulated { "with" } else { "none" },
            r.episodes,
            r.successes,
            r.success_rate,
            choices_cell(r).replace(' ', ";"),
            r.mean_interventions,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ablated_benchmark_runs_and_replays() {
        let spec = EmbodimentSpec::wheeled();
        let (row_a, results) = run_benchmark(scenario::STAIRS_VS_RAMP, &spec, None, false, 6, 42).unwrap();
        let (row_b, _) = run_benchmark(scenario::STAIRS_VS_RAMP, &spec, None, false, 6, 42).unwrap();
        assert_eq!(row_a, row_b);
        assert_eq!(results.len(), 6);
        let choices: usize = row_a.tag_choices.values().sum();
        assert_eq!(choices, 6, "every episode records its chosen tag");
    }

    #[test]
    fn tables_render_one_line_per_row() {
        let spec = EmbodimentSpec::wheeled();
        let (row, _) = run_benchmark(scenario::LAB_OBSTACLE, &spec, None, false, 3, 1).unwrap();
        let md = markdown_table(&[row.clone()]);
        assert_eq!(md.lines().count(), 3);
        let csv = csv_table(&[row]);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.contains("lab_obstacle"));
    }
}
