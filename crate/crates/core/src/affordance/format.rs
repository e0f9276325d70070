//! AFS sample records and AFM model files.
//!
//! AFS: magic `AFS1`, then per record (little-endian): u32 crop_cells,
//! crop_cells^2 f32 heights, f32 qx, f32 qy, u8 heading_bin, u8 label,
//! f32 return.
//!
//! AFM: magic `AFM1`, u8 mode, u32 crop_cells, u32 n_layers, per layer
//! (u32 rows, u32 cols), then per layer rows*cols f32 weights row-major and
//! rows f32 biases. A JSON sidecar at `<path>.json` carries the layout
//! descriptors and training metadata.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mlp::{Layer, Mlp};
use super::model::{TrainConfig, TrainReport};
use super::{AffordanceModel, AffordanceSample, TrainMode, HEADING_BINS};
use crate::error::{CoreError, Result};

const AFS_MAGIC: &[u8; 4] = b"AFS1";
const AFM_MAGIC: &[u8; 4] = b"AFM1";

pub fn write_afs<W: Write>(samples: &[AffordanceSample], mut w: W) -> Result<()> {
    w.write_all(AFS_MAGIC)?;
    for s in samples {
        w.write_all(&(s.crop_cells as u32).to_le_bytes())?;
        for &h in &s.local_map {
            w.write_all(&h.to_le_bytes())?;
        }
        w.write_all(&s.qx.to_le_bytes())?;
        w.write_all(&s.qy.to_le_bytes())?;
        w.write_all(&[s.heading_bin, s.label])?;
        w.write_all(&s.return_value.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_afs<R: Read>(mut r: R) -> Result<Vec<AffordanceSample>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != AFS_MAGIC {
        return Err(CoreError::Format(format!("bad AFS magic {magic:?}")));
    }
    let mut samples = Vec::new();
    loop {
        let mut head = [0u8; 4];
        match r.read(&mut head)? {
            0 => break,
            4 => {}
            n => {
                r.read_exact(&mut head[n..]).map_err(|_| {
                    CoreError::Format("truncated AFS record header".into())
                })?;
            }
        }
        let crop_cells = u32::from_le_bytes(head) as usize;
        if crop_cells == 0 || crop_cells > 4096 {
            return Err(CoreError::Format(format!("implausible crop_cells {crop_cells}")));
        }
        let mut local_map = Vec::with_capacity(crop_cells * crop_cells);
        for _ in 0..crop_cells * crop_cells {
            local_map.push(f32::from_le_bytes(read_array(&mut r)?));
        }
        let qx = f32::from_le_bytes(read_array(&mut r)?);
        let qy = f32::from_le_bytes(read_array(&mut r)?);
        let mut flags = [0u8; 2];
        r.read_exact(&mut flags)?;
        let return_value = f32::from_le_bytes(read_array(&mut r)?);
        samples.push(AffordanceSample {
            crop_cells,
            local_map,
            qx,
            qy,
            heading_bin: flags[0],
            label: flags[1],
            return_value,
        });
    }
    Ok(samples)
}

/// Layout descriptors and training metadata mirrored beside the AFM binary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSidecar {
    pub crop_cells: usize,
    pub feature_order: String,
    pub heading_bins: usize,
    pub mode: TrainMode,
    pub config: TrainConfig,
    pub report: TrainReport,
}

impl ModelSidecar {
    fn for_model(model: &AffordanceModel) -> Self {
        Self {
            crop_cells: model.crop_cells,
            feature_order: "crop_row_major,qx,qy,heading_onehot".into(),
            heading_bins: HEADING_BINS,
            mode: model.mode,
            config: model.config.clone(),
            report: model.report.clone(),
        }
    }
}

pub fn write_afm<W: Write>(model: &AffordanceModel, mut w: W) -> Result<()> {
    w.write_all(AFM_MAGIC)?;
    w.write_all(&[match model.mode {
        TrainMode::Classification => 0u8,
        TrainMode::Regression => 1u8,
    }])?;
    w.write_all(&(model.crop_cells as u32).to_le_bytes())?;
    w.write_all(&(model.net.layers.len() as u32).to_le_bytes())?;
    for layer in &model.net.layers {
        w.write_all(&(layer.rows as u32).to_le_bytes())?;
        w.write_all(&(layer.cols as u32).to_le_bytes())?;
    }
    for layer in &model.net.layers {
        for &v in &layer.w {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
        for &v in &layer.b {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

/// Read an AFM binary; config and report come from the sidecar when the
/// caller has one (see [`load_model`]), otherwise defaults are filled in.
pub fn read_afm<R: Read>(mut r: R) -> Result<AffordanceModel> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != AFM_MAGIC {
        return Err(CoreError::Format(format!("bad AFM magic {magic:?}")));
    }
    let mut mode_byte = [0u8; 1];
    r.read_exact(&mut mode_byte)?;
    let mode = match mode_byte[0] {
        0 => TrainMode::Classification,
        1 => TrainMode::Regression,
        other => return Err(CoreError::Format(format!("unknown mode byte {other}"))),
    };
    let crop_cells = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let n_layers = u32::from_le_bytes(read_array(&mut r)?) as usize;
    if n_layers == 0 || n_layers > 64 {
        return Err(CoreError::Format(format!("implausible layer count {n_layers}")));
    }
    let mut shapes = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let rows = u32::from_le_bytes(read_array(&mut r)?) as usize;
        let cols = u32::from_le_bytes(read_array(&mut r)?) as usize;
        shapes.push((rows, cols));
    }
    let mut layers = Vec::with_capacity(n_layers);
    for &(rows, cols) in &shapes {
        let mut w = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            w.push(f64::from(f32::from_le_bytes(read_array(&mut r)?)));
        }
        let mut b = Vec::with_capacity(rows);
        for _ in 0..rows {
            b.push(f64::from(f32::from_le_bytes(read_array(&mut r)?)));
        }
        layers.push(Layer { rows, cols, w, b });
    }
    let expected_input = crop_cells * crop_cells + 2 + HEADING_BINS;
    if layers[0].cols != expected_input {
        return Err(CoreError::Format(format!(
            "layer 0 expects {} inputs but the layout implies {expected_input}",
            layers[0].cols
        )));
    }
    let config = TrainConfig {
        hidden: shapes[..n_layers - 1].iter().map(|&(rows, _)| rows).collect(),
        mode,
        ..TrainConfig::default()
    };
    Ok(AffordanceModel {
        crop_cells,
        mode,
        config,
        report: TrainReport {
            seed: 0,
            samples: 0,
            initial_loss: 0.0,
            epoch_losses: Vec::new(),
        },
        net: Mlp { layers },
    })
}

/// Write `<path>` (AFM binary) and `<path>.json` (sidecar).
pub fn save_model(model: &AffordanceModel, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_afm(model, &mut w)?;
    w.flush()?;
    let sidecar = ModelSidecar::for_model(model);
    let json_path = sidecar_path(path);
    serde_json::to_writer_pretty(BufWriter::new(File::create(json_path)?), &sidecar)?;
    Ok(())
}

/// Read an AFM file, restoring metadata from the sidecar when present.
pub fn load_model(path: &Path) -> Result<AffordanceModel> {
    let mut model = read_afm(BufReader::new(File::open(path)?))?;
    let json_path = sidecar_path(path);
    if json_path.exists() {
        let sidecar: ModelSidecar = serde_json::from_reader(BufReader::new(File::open(json_path)?))?;
        model.config = sidecar.config;
        model.report = sidecar.report;
    }
    Ok(model)
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    std::path::PathBuf::from(os)
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affordance::{train, TrainConfig};
    use crate::seeds;
    use rand::Rng;

    fn toy_dataset() -> Vec<AffordanceSample> {
        let mut rng = seeds::stream_rng(0, "fmt-test");
        (0..64)
            .map(|i| {
                let offset = if i % 2 == 0 { 0.5 } else { 0.0 };
                AffordanceSample {
                    crop_cells: 5,
                    local_map: (0..25).map(|_| offset + rng.gen_range(-0.1..0.1)).collect(),
                    qx: 0.5,
                    qy: 0.5,
                    heading_bin: rng.gen_range(0..8),
                    label: (i % 2) as u8,
                    return_value: if i % 2 == 1 { 0.0 } else { -0.8 },
                }
            })
            .collect()
    }

    #[test]
    fn afs_round_trip() {
        let samples = toy_dataset();
        let mut buf = Vec::new();
        write_afs(&samples, &mut buf).unwrap();
        let back = read_afs(buf.as_slice()).unwrap();
        assert_eq!(samples, back);
    }

    #[test]
    fn afs_rejects_bad_magic() {
        let mut buf = Vec::new();
        write_afs(&toy_dataset(), &mut buf).unwrap();
        buf[0] = b'Z';
        assert!(read_afs(buf.as_slice()).is_err());
    }

    #[test]
    fn reloaded_model_scores_bit_identically() {
        let dataset = toy_dataset();
        let config = TrainConfig {
            hidden: vec![8, 4],
            epochs: 5,
            ..TrainConfig::default()
        };
        let model = train(&dataset, &config, 11).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.afm");
        save_model(&model, &path).unwrap();
        let back = load_model(&path).unwrap();

        let mut rng = seeds::stream_rng(1, "fmt-query");
        for _ in 0..100 {
            let crop: Vec<f32> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (qx, qy) = (rng.gen(), rng.gen());
            let bin = rng.gen_range(0..8);
            let a = model.query(&crop, qx, qy, bin).unwrap();
            let b = back.query(&crop, qx, qy, bin).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.report.seed, 11, "sidecar metadata restored");
    }
}
