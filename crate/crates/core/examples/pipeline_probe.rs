//! End-to-end pipeline probe: terrains -> datasets -> models -> heatmaps ->
//! benchmarks, printing the quality numbers the benchmark suite gates on.

use std::time::Instant;

use affnav_core::affordance::{
    affordance_grid, collect_balanced, evaluate, split_dataset, train, TrainConfig, TrainMode,
};
use affnav_core::embodiment::EmbodimentSpec;
use affnav_core::mission::run_benchmark;
use affnav_core::scenario;
use affnav_core::seeds;
use affnav_core::terrain::{generate, TerrainFamily, TerrainParams};

fn main() {
    let master = 42u64;
    let t0 = Instant::now();

    // 100 terrains, all five families equally represented.
    let mut terrains = Vec::new();
    for (fi, family) in TerrainFamily::GENERATED.iter().enumerate() {
        let params = TerrainParams::default_for(*family).unwrap();
        for i in 0..20 {
            let seed = seeds::derive(master, &format!("terrain/{fi}/{i}"));
            terrains.push(generate(seed, &params).unwrap());
        }
    }
    println!("[{:6.1?}] {} terrains", t0.elapsed(), terrains.len());

    let legged = EmbodimentSpec::legged();
    let wheeled = EmbodimentSpec::wheeled();

    let (data_l, rep_l) = collect_balanced(&terrains, &legged, 10_000, seeds::derive(master, "collect/legged")).unwrap();
    println!(
        "[{:6.1?}] legged dataset: {} balanced of {} raw ({} succ / {} fail)",
        t0.elapsed(),
        rep_l.balanced,
        rep_l.raw_samples,
        rep_l.raw_success,
        rep_l.raw_failure
    );
    let (data_w, rep_w) = collect_balanced(&terrains, &wheeled, 10_000, seeds::derive(master, "collect/wheeled")).unwrap();
    println!(
        "[{:6.1?}] wheeled dataset: {} balanced of {} raw ({} succ / {} fail)",
        t0.elapsed(),
        rep_w.balanced,
        rep_w.raw_samples,
        rep_w.raw_success,
        rep_w.raw_failure
    );

    let config = TrainConfig::default();
    let (train_l, held_l) = split_dataset(&data_l, 5);
    let (train_w, held_w) = split_dataset(&data_w, 5);

    let tt = Instant::now();
    let model_l = train(&train_l, &config, seeds::derive(master, "train/legged")).unwrap();
    println!("[{:6.1?}] legged trained in {:.1?} (loss {:.3} -> {:.3})",
        t0.elapsed(), tt.elapsed(), model_l.report.initial_loss, model_l.report.epoch_losses.last().unwrap());
    let tt = Instant::now();
    let model_w = train(&train_w, &config, seeds::derive(master, "train/wheeled")).unwrap();
    println!("[{:6.1?}] wheeled trained in {:.1?} (loss {:.3} -> {:.3})",
        t0.elapsed(), tt.elapsed(), model_w.report.initial_loss, model_w.report.epoch_losses.last().unwrap());

    let ev_l = evaluate(&model_l, &held_l).unwrap();
    let ev_w = evaluate(&model_w, &held_w).unwrap();
    println!("legged  held-out: acc {:.3} auc {:.3} (n {})", ev_l.accuracy, ev_l.auc, ev_l.n);
    println!("wheeled held-out: acc {:.3} auc {:.3} (n {})", ev_w.accuracy, ev_w.auc, ev_w.n);

    // Regression variant on identical data/seed.
    let reg_config = TrainConfig { mode: TrainMode::Regression, ..TrainConfig::default() };
    let tt = Instant::now();
    let model_reg = train(&train_l, &reg_config, seeds::derive(master, "train/legged")).unwrap();
    let ev_reg = evaluate(&model_reg, &held_l).unwrap();
    println!(
        "regression (legged data): auc {:.3} vs classification {:.3} ({:.1?})",
        ev_reg.auc, ev_l.auc, tt.elapsed()
    );

    // Heatmap regions on the composed world.
    let world = scenario::build(scenario::STAIRS_WALL_FLAT).unwrap().world;
    let grid_l = affordance_grid(&model_l, &world, 0, 2).unwrap();
    let grid_w = affordance_grid(&model_w, &world, 0, 2).unwrap();
    let (sx0, sy0, sx1, sy1) = scenario::regions::STAIRS;
    let (wx0, wy0, wx1, wy1) = scenario::regions::WALL;
    let stairs_l = grid_l.region_mean(&world, sx0, sy0, sx1, sy1);
    let stairs_w = grid_w.region_mean(&world, sx0, sy0, sx1, sy1);
    let wall_l = grid_l.region_mean(&world, wx0, wy0, wx1, wy1);
    let wall_w = grid_w.region_mean(&world, wx0, wy0, wx1, wy1);
    println!("heatmap stairs: legged {stairs_l:.3} wheeled {stairs_w:.3} (gap {:.3})", stairs_l - stairs_w);
    println!("heatmap wall:   legged {wall_l:.3} wheeled {wall_w:.3}");

    // Scripted benchmarks.
    for (scen, spec, model, name) in [
        (scenario::STAIRS_VS_RAMP, &wheeled, &model_w, "wheeled"),
        (scenario::STAIRS_VS_RAMP, &legged, &model_l, "legged"),
        (scenario::LAB_OBSTACLE, &legged, &model_l, "legged"),
    ] {
        for modulated in [true, false] {
            let (row, results) =
                run_benchmark(scen, spec, modulated.then_some(model), modulated, 20, master).unwrap();
            let cum_range: Vec<f64> = results
                .iter()
                .flat_map(|r| r.replans.iter())
                .flat_map(|r| r.candidates.iter())
                .filter_map(|c| c.cumulative_affordance)
                .collect();
            let lo = cum_range.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = cum_range.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            println!(
                "{scen} {name} mod={modulated}: SR {:.0}% choices {:?} scores [{lo:.2}, {hi:.2}]",
                row.success_rate * 100.0,
                row.tag_choices
            );
        }
    }
    println!("total {:?}", t0.elapsed());
}
