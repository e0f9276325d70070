//! Query probes on synthetic canonical crops.

use affnav_core::affordance::{collect_balanced, train, TrainConfig, CROP_CELLS};
use affnav_core::embodiment::EmbodimentSpec;
use affnav_core::seeds;
use affnav_core::terrain::{generate, TerrainFamily, TerrainParams};

/// Crop with a band gradient: flat, then `slope` rise across `band` meters,
/// then flat, along +y (`along_x = false`) or +x.
fn band_crop(slope: f64, band: f64, along_x: bool) -> Vec<f32> {
    let res = 0.1;
    let half = (CROP_CELLS / 2) as f64;
    let mut crop = vec![0.0f32; CROP_CELLS * CROP_CELLS];
    for row in 0..CROP_CELLS {
        for col in 0..CROP_CELLS {
            let along = if along_x { col as f64 - half } else { row as f64 - half } * res;
            let h = slope * along.clamp(-band / 2.0, band / 2.0);
            crop[row * CROP_CELLS + col] = h as f32;
        }
    }
    crop
}

/// Staircase crop: risers every `tread` meters along the axis.
fn stairs_crop(riser: f64, tread: f64, along_x: bool) -> Vec<f32> {
    let res = 0.1;
    let half = (CROP_CELLS / 2) as f64;
    let mut crop = vec![0.0f32; CROP_CELLS * CROP_CELLS];
    for row in 0..CROP_CELLS {
        for col in 0..CROP_CELLS {
            let along = if along_x { col as f64 - half } else { row as f64 - half } * res;
            let h = (along / tread).floor() * riser;
            crop[row * CROP_CELLS + col] = h as f32;
        }
    }
    crop
}

fn main() {
    let master = 42u64;
    let mut terrains = Vec::new();
    for (fi, family) in TerrainFamily::GENERATED.iter().enumerate() {
        let params = TerrainParams::default_for(*family).unwrap();
        for i in 0..20 {
            terrains.push(generate(seeds::derive(master, &format!("terrain/{fi}/{i}")), &params).unwrap());
        }
    }
    for (name, spec, stream) in [
        ("wheeled", EmbodimentSpec::wheeled(), "collect/wheeled"),
        ("legged", EmbodimentSpec::legged(), "collect/legged"),
    ] {
        let (data, _) = collect_balanced(&terrains, &spec, 10_000, seeds::derive(master, stream)).unwrap();
        let model = train(&data, &TrainConfig::default(), seeds::derive(master, &stream.replace("collect", "train"))).unwrap();
        println!("--- {name} ---");
        for slope in [0.1, 0.225, 0.3] {
            let px = model.query(&band_crop(slope, 2.0, true), 0.5, 0.5, 0).unwrap();
            let py = model.query(&band_crop(slope, 2.0, false), 0.5, 0.5, 2).unwrap();
            println!("ramp band slope {slope}: +x/bin0 {px:.2}  +y/bin2 {py:.2}");
        }
        for riser in [0.09, 0.12] {
            let px = model.query(&stairs_crop(riser, 0.4, true), 0.5, 0.5, 0).unwrap();
            let py = model.query(&stairs_crop(riser, 0.4, false), 0.5, 0.5, 2).unwrap();
            println!("stairs riser {riser}: +x/bin0 {px:.2}  +y/bin2 {py:.2}");
        }
        let flat = model.query(&vec![0.0; CROP_CELLS * CROP_CELLS], 0.5, 0.5, 2).unwrap();
        println!("flat: {flat:.2}");
    }
}
