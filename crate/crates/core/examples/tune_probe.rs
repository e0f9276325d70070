//! Tuning sweeps: epochs vs held-out accuracy, and the classification-vs-
//! regression AUC ordering across seeds and dataset mixes.

use affnav_core::affordance::{
    collect_balanced, evaluate, split_dataset, train, TrainConfig, TrainMode,
};
use affnav_core::embodiment::EmbodimentSpec;
use affnav_core::seeds;
use affnav_core::terrain::{
    generate, CourseOrientation, StairsParams, TerrainFamily, TerrainParams,
};

fn full_mix(master: u64) -> Vec<affnav_core::terrain::ElevationMap> {
    let mut terrains = Vec::new();
    for (fi, family) in TerrainFamily::GENERATED.iter().enumerate() {
        let params = TerrainParams::default_for(*family).unwrap();
        for i in 0..20 {
            terrains.push(generate(seeds::derive(master, &format!("terrain/{fi}/{i}")), &params).unwrap());
        }
    }
    terrains
}

/// Stairs/flat mix used by the discriminativity property.
fn stairs_flat_mix(master: u64) -> Vec<affnav_core::terrain::ElevationMap> {
    let mut terrains = Vec::new();
    for i in 0..25 {
        let seed = seeds::derive(master, &format!("sf/stairs/{i}"));
        terrains.push(
            generate(
                seed,
                &TerrainParams::SimpleStairs(StairsParams::default()),
            )
            .unwrap(),
        );
    }
    for i in 0..25 {
        terrains.push(
            affnav_core::terrain::ElevationMap::flat(
                100,
                100,
                0.1,
                TerrainFamily::Composed,
                seeds::derive(master, &format!("sf/flat/{i}")),
            )
            .unwrap(),
        );
    }
    // Flat terrain yields no failures by itself; stairs supply them.
    let _ = CourseOrientation::Seeded;
    terrains
}

fn main() {
    let master = 42u64;
    let terrains = full_mix(master);
    let wheeled = EmbodimentSpec::wheeled();
    let legged = EmbodimentSpec::legged();

    // Epoch sweep on the wheeled dataset (the harder one).
    let (data_w, _) = collect_balanced(&terrains, &wheeled, 10_000, seeds::derive(master, "collect/wheeled")).unwrap();
    let (train_w, held_w) = split_dataset(&data_w, 5);
    for epochs in [20, 30, 40, 60] {
        let config = TrainConfig { epochs, ..TrainConfig::default() };
        let model = train(&train_w, &config, seeds::derive(master, "train/wheeled")).unwrap();
        let on_train = evaluate(&model, &train_w).unwrap();
        let on_held = evaluate(&model, &held_w).unwrap();
        println!(
            "wheeled epochs {epochs}: train acc {:.3} | held acc {:.3} auc {:.3}",
            on_train.accuracy, on_held.accuracy, on_held.auc
        );
    }

    // Classification vs regression across seeds, on both dataset mixes.
    let sf_terrains = stairs_flat_mix(master);
    for (mix_name, mix, spec) in [
        ("full-mix/wheeled", &terrains, &wheeled),
        ("full-mix/legged", &terrains, &legged),
        ("stairs-flat/wheeled", &sf_terrains, &wheeled),
        ("stairs-flat/legged", &sf_terrains, &legged),
    ] {
        let mut wins = 0;
        for seed in 0..6u64 {
            let (data, _) = collect_balanced(mix, spec, 6_000, seeds::derive(seed, "cmp/collect")).unwrap();
            let (train_set, held) = split_dataset(&data, 5);
            let cls = train(&train_set, &TrainConfig::default(), seeds::derive(seed, "cmp/train")).unwrap();
            let reg = train(
                &train_set,
                &TrainConfig { mode: TrainMode::Regression, ..TrainConfig::default() },
                seeds::derive(seed, "cmp/train"),
            )
            .unwrap();
            let auc_c = evaluate(&cls, &held).unwrap().auc;
            let auc_r = evaluate(&reg, &held).unwrap().auc;
            wins += usize::from(auc_c >= auc_r);
            println!("{mix_name} seed {seed}: cls {auc_c:.4} vs reg {auc_r:.4} {}", if auc_c >= auc_r { "CLS" } else { "reg" });
        }
        println!("{mix_name}: classification wins {wins}/6\n");
    }
}
