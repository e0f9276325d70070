//! Per-point score diagnostics on the stairs-vs-ramp scenario.

use affnav_core::affordance::{collect_balanced, train, TrainConfig};
use affnav_core::embodiment::{rollout, AgentState, EmbodimentSpec};
use affnav_core::mission::score_path;
use affnav_core::scenario;
use affnav_core::seeds;
use affnav_core::terrain::{generate, TerrainFamily, TerrainParams};

fn main() {
    let master = 42u64;
    let mut terrains = Vec::new();
    for (fi, family) in TerrainFamily::GENERATED.iter().enumerate() {
        let params = TerrainParams::default_for(*family).unwrap();
        for i in 0..20 {
            let seed = seeds::derive(master, &format!("terrain/{fi}/{i}"));
            terrains.push(generate(seed, &params).unwrap());
        }
    }
    let wheeled = EmbodimentSpec::wheeled();
    let (data_w, _) =
        collect_balanced(&terrains, &wheeled, 10_000, seeds::derive(master, "collect/wheeled")).unwrap();
    let model_w = train(&data_w, &TrainConfig::default(), seeds::derive(master, "train/wheeled")).unwrap();

    let scen = scenario::build(scenario::STAIRS_VS_RAMP).unwrap();
    for c in &scen.candidates {
        let scored = score_path(&model_w, &scen.world, c).unwrap();
        println!(
            "{:12} wp {:?}\n   scores {:?}",
            c.tag.as_deref().unwrap_or("-"),
            c.world_points
                .iter()
                .map(|p| format!("({:.1},{:.1})", p.0, p.1))
                .collect::<Vec<_>>(),
            scored
                .per_point_affordance
                .unwrap()
                .iter()
                .map(|s| format!("{s:.2}"))
                .collect::<Vec<_>>()
        );
    }

    // Ground truth: does the wheeled surrogate actually traverse the
    // scenario ramp uphill?
    for x in [1.0, 2.5, 4.0] {
        let start = AgentState::on_terrain(&scen.world, x, 3.4, std::f64::consts::FRAC_PI_2, &wheeled).unwrap();
        let out = rollout(&scen.world, &wheeled, &start, std::f64::consts::FRAC_PI_2, 3.0);
        println!("wheeled rollout up ramp at x={x}: {:?}", out.termination);
    }
}
