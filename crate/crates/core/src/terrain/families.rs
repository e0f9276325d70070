//! The non-tiled terrain families: simple stairs, simple ramp, smooth mounds
//! and irregular (terraced) stairs.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::params::{
    CourseOrientation, IrregularParams, MoundsParams, RampParams, StairsParams, TerrainParams,
};
use super::{ElevationMap, TerrainFamily};
use crate::error::Result;

/// World extent of the stairs/ramp terrains in meters.
const COURSE_EXTENT: f64 = 10.0;
/// Flat run-in/run-out on either side of the feature.
const COURSE_FLAT: f64 = 2.0;

pub(crate) fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    // Safe for collapsed ranges where gen_range would panic.
    lo + (hi - lo) * rng.gen::<f64>()
}

fn resolve_orientation(rng: &mut ChaCha8Rng, orientation: CourseOrientation) -> CourseOrientation {
    match orientation {
        CourseOrientation::Seeded => {
            const AXES: [CourseOrientation; 4] = [
                CourseOrientation::PosX,
                CourseOrientation::NegX,
                CourseOrientation::PosY,
                CourseOrientation::NegY,
            ];
            AXES[rng.gen_range(0..4)]
        }
        other => other,
    }
}

/// Dispatch a family generator from a parameter bundle.
pub fn generate(seed: u64, params: &TerrainParams) -> Result<ElevationMap> {
    match params {
        TerrainParams::SimpleStairs(p) => generate_simple_stairs(seed, p),
        TerrainParams::SimpleRamp(p) => generate_simple_ramp(seed, p),
        TerrainParams::Procedural(p) => super::wfc::generate_procedural(seed, p),
        TerrainParams::SmoothMounds(p) => generate_smooth_mounds(seed, p),
        TerrainParams::IrregularStairs(p) => generate_irregular_stairs(seed, p),
    }
}

/// Two flat plateaus joined by a staircase of fixed-width steps along +x.
///
/// Per-step rises are drawn uniformly from `rise_range`; the far plateau sits
/// at the sum of all rises.
pub fn generate_simple_stairs(seed: u64, params: &StairsParams) -> Result<ElevationMap> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orientation = resolve_orientation(&mut rng, params.orientation);
    let res = params.resolution;
    let cells = (COURSE_EXTENT / res).round() as usize;
    let stair_run = COURSE_EXTENT - 2.0 * COURSE_FLAT;
    let step_count = (stair_run / params.step_width).round() as usize;

    let mut cumulative = Vec::with_capacity(step_count);
    let mut total = 0.0;
    for _ in 0..step_count {
        total += uniform(&mut rng, params.rise_range.0, params.rise_range.1);
        cumulative.push(total);
    }

    let profile: Vec<f64> = (0..cells)
        .map(|col| {
            let x = (col as f64 + 0.5) * res;
            if x < COURSE_FLAT {
                0.0
            } else if x < COURSE_FLAT + stair_run {
                let step = (((x - COURSE_FLAT) / params.step_width).floor() as usize)
                    .min(step_count - 1);
                cumulative[step]
            } else {
                total
            }
        })
        .collect();

    profile_map(seed, TerrainFamily::SimpleStairs, res, cells, &profile, orientation)
}

/// Flat-ramp-flat profile along +x with a uniformly drawn gradient.
pub fn generate_simple_ramp(seed: u64, params: &RampParams) -> Result<ElevationMap> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orientation = resolve_orientation(&mut rng, params.orientation);
    let res = params.resolution;
    let cells = (COURSE_EXTENT / res).round() as usize;
    let run = COURSE_EXTENT - 2.0 * COURSE_FLAT;
    let gradient = uniform(&mut rng, params.gradient_range.0, params.gradient_range.1);

    let profile: Vec<f64> = (0..cells)
        .map(|col| {
            let x = (col as f64 + 0.5) * res;
            if x < COURSE_FLAT {
                0.0
            } else if x < COURSE_FLAT + run {
                gradient * (x - COURSE_FLAT)
            } else {
                gradient * run
            }
        })
        .collect();

    profile_map(seed, TerrainFamily::SimpleRamp, res, cells, &profile, orientation)
}

/// Sweep a 1D course profile across the grid along the chosen axis.
fn profile_map(
    seed: u64,
    family: TerrainFamily,
    res: f64,
    cells: usize,
    profile: &[f64],
    orientation: CourseOrientation,
) -> Result<ElevationMap> {
    let mut heights = Vec::with_capacity(cells * cells);
    for row in 0..cells {
        for col in 0..cells {
            let i = match orientation {
                CourseOrientation::PosX | CourseOrientation::Seeded => col,
                CourseOrientation::NegX => cells - 1 - col,
                CourseOrientation::PosY => row,
                CourseOrientation::NegY => cells - 1 - row,
            };
            heights.push(profile[i] as f32);
        }
    }
    ElevationMap::from_heights(cells, cells, res, heights, family, seed)
}

/// Cellular-automaton mounds: seed cells at random heights, nearest-seed fill,
/// then synchronous smoothing passes.
pub fn generate_smooth_mounds(seed: u64, params: &MoundsParams) -> Result<ElevationMap> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.cells_per_side();
    let grid = mounds_grid(&mut rng, params, n);
    let heights: Vec<f32> = grid.iter().map(|&h| h as f32).collect();
    ElevationMap::from_heights(n, n, params.resolution, heights, TerrainFamily::SmoothMounds, seed)
}

/// Smooth mounds with every height rounded to the nearest whole multiple of
/// the terrace step.
pub fn generate_irregular_stairs(seed: u64, params: &IrregularParams) -> Result<ElevationMap> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.mounds.cells_per_side();
    let mut grid = mounds_grid(&mut rng, &params.mounds, n);
    for h in &mut grid {
        *h = quantize_to_step(*h, params.terrace_step);
    }
    let heights: Vec<f32> = grid.iter().map(|&h| h as f32).collect();
    ElevationMap::from_heights(
        n,
        n,
        params.mounds.resolution,
        heights,
        TerrainFamily::IrregularStairs,
        seed,
    )
}

/// Nearest whole multiple of `step`.
pub(crate) fn quantize_to_step(height: f64, step: f64) -> f64 {
    (height / step).round() * step
}

fn mounds_grid(rng: &mut ChaCha8Rng, params: &MoundsParams, n: usize) -> Vec<f64> {
    // Seed cells: distinct linear indices in draw order, then heights.
    let total = n * n;
    let mut seeds: Vec<(usize, f64)> = Vec::with_capacity(params.seed_count);
    let mut taken = vec![false; total];
    while seeds.len() < params.seed_count {
        let idx = rng.gen_range(0..total);
        if !taken[idx] {
            taken[idx] = true;
            seeds.push((idx, 0.0));
        }
    }
    for s in &mut seeds {
        s.1 = uniform(rng, params.height_range.0, params.height_range.1);
    }
    // Ties in the nearest-seed fill go to the lowest linear cell index.
    seeds.sort_by_key(|&(idx, _)| idx);

    let mut grid = vec![0.0f64; total];
    for row in 0..n {
        for col in 0..n {
            let mut best = f64::INFINITY;
            let mut best_h = 0.0;
            for &(idx, h) in &seeds {
                let (sr, sc) = (idx / n, idx % n);
                let dr = sr as f64 - row as f64;
                let dc = sc as f64 - col as f64;
                let d2 = dr * dr + dc * dc;
                if d2 < best {
                    best = d2;
                    best_h = h;
                }
            }
            grid[row * n + col] = best_h;
        }
    }

    for _ in 0..params.smooth_iterations {
        smooth_pass(&mut grid, n, n, params.smooth_threshold);
    }
    grid
}

/// One synchronous smoothing pass over an 8-connected grid.
///
/// A cell whose neighbor spread (max - min) exceeds the threshold is replaced
/// by the mean of that max and min; all updates read the previous grid.
pub(crate) fn smooth_pass(grid: &mut Vec<f64>, width: usize, height: usize, threshold: f64) {
    let prev = grid.clone();
    for row in 0..height {
        for col in 0..width {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (r, c) = (row as i64 + dr, col as i64 + dc);
                    if r < 0 || c < 0 || r >= height as i64 || c >= width as i64 {
                        continue;
                    }
                    let h = prev[r as usize * width + c as usize];
                    lo = lo.min(h);
                    hi = hi.max(h);
                }
            }
            if hi - lo > threshold {
                grid[row * width + col] = (hi + lo) / 2.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stairs_collapsed_rise_gives_known_plateau() {
        let params = StairsParams {
            rise_range: (0.10, 0.10),
            orientation: CourseOrientation::PosX,
            ..StairsParams::default()
        };
        let map = generate_simple_stairs(1, &params).unwrap();
        // 15 steps over 6 m at 0.4 m width, 0.10 m each.
        let far = map.height_at(9.5, 5.0).unwrap();
        assert!((far - 1.5).abs() < 1e-6, "far plateau {far}");
        let near = map.height_at(0.5, 5.0).unwrap();
        assert_eq!(near, 0.0);
    }

    #[test]
    fn stairs_rises_stay_in_range() {
        let params = StairsParams {
            orientation: CourseOrientation::PosX,
            ..StairsParams::default()
        };
        for seed in 0..100 {
            let map = generate_simple_stairs(seed, &params).unwrap();
            let mut prev = 0.0;
            for step in 0..15 {
                let x = 2.0 + step as f64 * 0.4 + 0.2;
                let h = map.cell(map.cell_at(x, 5.0).unwrap().0, 50);
                let rise = h - prev;
                assert!(
                    (0.05..=0.15 + 1e-9).contains(&rise),
                    "seed {seed} step {step} rise {rise}"
                );
                prev = h;
            }
        }
    }

    #[test]
    fn stairs_rejects_unaligned_resolution() {
        let params = StairsParams {
            resolution: 0.3,
            ..StairsParams::default()
        };
        assert!(generate_simple_stairs(0, &params).is_err());
    }

    #[test]
    fn stairs_deterministic() {
        let params = StairsParams::default();
        let a = generate_simple_stairs(7, &params).unwrap();
        let b = generate_simple_stairs(7, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ramp_fixed_gradient_plateau() {
        let params = RampParams {
            gradient_range: (0.3, 0.3),
            orientation: CourseOrientation::PosX,
            ..RampParams::default()
        };
        let map = generate_simple_ramp(3, &params).unwrap();
        let far = map.height_at(9.5, 5.0).unwrap();
        assert!((far - 1.8).abs() < 1e-6, "plateau {far}");
    }

    #[test]
    fn ramp_zero_gradient_is_flat() {
        let params = RampParams {
            gradient_range: (0.0, 0.0),
            ..RampParams::default()
        };
        let map = generate_simple_ramp(3, &params).unwrap();
        assert!(map.heights().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn ramp_profile_monotone_and_in_range() {
        let params = RampParams {
            orientation: CourseOrientation::PosX,
            ..RampParams::default()
        };
        for seed in 0..100 {
            let map = generate_simple_ramp(seed, &params).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for col in 0..map.width_cells() {
                let h = map.cell(col, 10);
                assert!(h >= prev - 1e-9, "seed {seed}: not monotone");
                prev = h;
            }
            let gradient = map.height_at(7.95, 5.0).unwrap() / (7.95 - 2.0);
            assert!((0.01 - 1e-6..=0.3 + 1e-6).contains(&gradient), "gradient {gradient}");
        }
    }

    #[test]
    fn mounds_single_seed_is_constant() {
        let params = MoundsParams {
            seed_count: 1,
            ..MoundsParams::default()
        };
        let map = generate_smooth_mounds(11, &params).unwrap();
        let first = map.heights()[0];
        assert!(map.heights().iter().all(|&h| h == first));
        assert!((1.0..=3.0).contains(&f64::from(first)));
    }

    #[test]
    fn mounds_seed_heights_in_range() {
        let params = MoundsParams {
            smooth_iterations: 0,
            ..MoundsParams::default()
        };
        for seed in 0..100 {
            let map = generate_smooth_mounds(seed, &params).unwrap();
            for &h in map.heights() {
                assert!((1.0 - 1e-6..=3.0 + 1e-6).contains(&f64::from(h)), "seed {seed}: {h}");
            }
        }
    }

    #[test]
    fn smooth_pass_matches_hand_computation() {
        // 3x3: center 0 with neighbor max 3.0 and min 1.0, threshold 0.5.
        let mut grid = vec![1.0, 2.0, 2.0, 2.0, 0.0, 2.0, 2.0, 2.0, 3.0];
        smooth_pass(&mut grid, 3, 3, 0.5);
        assert_eq!(grid[4], 2.0);
    }

    #[test]
    fn smooth_pass_stays_within_neighbor_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (w, h) = (12, 12);
        let mut grid: Vec<f64> = (0..w * h).map(|_| uniform(&mut rng, 0.0, 3.0)).collect();
        for _ in 0..4 {
            let prev = grid.clone();
            smooth_pass(&mut grid, w, h, 0.4);
            for row in 0..h {
                for col in 0..w {
                    let idx = row * w + col;
                    if grid[idx] == prev[idx] {
                        continue;
                    }
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for dr in -1i64..=1 {
                        for dc in -1i64..=1 {
                            if dr == 0 && dc == 0 {
                                continue;
                            }
                            let (r, c) = (row as i64 + dr, col as i64 + dc);
                            if r < 0 || c < 0 || r >= h as i64 || c >= w as i64 {
                                continue;
                            }
                            let v = prev[r as usize * w + c as usize];
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                    assert!(grid[idx] >= lo - 1e-12 && grid[idx] <= hi + 1e-12);
                }
            }
        }
    }

    #[test]
    fn irregular_heights_are_terraced() {
        let params = IrregularParams::default();
        for seed in 0..20 {
            let map = generate_irregular_stairs(seed, &params).unwrap();
            for &h in map.heights() {
                let rem = (f64::from(h) / params.terrace_step).fract().abs();
                assert!(
                    rem < 1e-6 || (1.0 - rem) < 1e-6,
                    "seed {seed}: {h} not a terrace multiple"
                );
            }
        }
    }

    #[test]
    fn quantize_rounds_to_nearest_multiple() {
        // 0.37 sits between 0.25 (distance 0.12) and 0.50 (distance 0.13).
        assert!((quantize_to_step(0.37, 0.25) - 0.25).abs() < 1e-12);
        assert!((quantize_to_step(0.38, 0.25) - 0.50).abs() < 1e-12);
        assert_eq!(quantize_to_step(0.0, 0.25), 0.0);
    }

    #[test]
    fn coarse_terrace_collapses_levels() {
        let params = IrregularParams {
            terrace_step: 10.0,
            ..IrregularParams::default()
        };
        let map = generate_irregular_stairs(2, &params).unwrap();
        // Mound heights top out at 3 m, so everything rounds to 0.
        assert!(map.heights().iter().all(|&h| h == 0.0));
    }
}
