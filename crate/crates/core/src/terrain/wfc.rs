//! Tiled terrain assembled with wave function collapse.
//!
//! Each tile is flat, a box obstacle, a ramp, or a staircase, annotated with
//! a terrace level. Adjacency keeps staircases connected: a staircase's
//! uphill neighbor is either the continuing staircase or a flat tile at the
//! staircase's top height.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::families::uniform;
use super::params::{ProceduralParams, TileKind};
use super::{ElevationMap, TerrainFamily};
use crate::error::{CoreError, Result};
use crate::seeds;

/// Highest terrace level; slope tiles span `level .. level + 1`.
const MAX_LEVEL: u8 = 2;
/// Stair tread width in meters.
const TREAD_WIDTH: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    PosX,
    NegX,
    PosY,
    NegY,
}

impl Direction {
    const ALL: [Direction; 4] = [Direction::PosX, Direction::NegX, Direction::PosY, Direction::NegY];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::PosX => Direction::NegX,
            Direction::NegX => Direction::PosX,
            Direction::PosY => Direction::NegY,
            Direction::NegY => Direction::PosY,
        }
    }

    pub fn offset(self) -> (i64, i64) {
        match self {
            Direction::PosX => (1, 0),
            Direction::NegX => (-1, 0),
            Direction::PosY => (0, 1),
            Direction::NegY => (0, -1),
        }
    }

    fn along_x(self) -> bool {
        matches!(self, Direction::PosX | Direction::NegX)
    }

    fn ascending(self) -> bool {
        matches!(self, Direction::PosX | Direction::PosY)
    }
}

/// One collapsed tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tile {
    pub kind: TileKind,
    /// Base terrace level; slope tiles rise from `level` to `level + 1`.
    pub level: u8,
    /// Uphill direction for ramp/stairs tiles.
    pub dir: Option<Direction>,
}

/// The collapsed tile grid, kept alongside the height map so adjacency can be
/// verified against the generated grid.
#[derive(Debug, Clone)]
pub struct TileLayout {
    pub tiles_per_side: usize,
    pub cells_per_tile: usize,
    /// Elevation difference between terrace levels for this map, meters.
    pub level_height: f64,
    /// Row-major tiles.
    pub tiles: Vec<Tile>,
}

impl TileLayout {
    pub fn tile(&self, tx: usize, ty: usize) -> Tile {
        self.tiles[ty * self.tiles_per_side + tx]
    }
}

/// Generate the tiled terrain, discarding the layout.
pub fn generate_procedural(seed: u64, params: &ProceduralParams) -> Result<ElevationMap> {
    generate_procedural_with_layout(seed, params).map(|(map, _)| map)
}

/// Generate the tiled terrain and return the collapsed layout with it.
///
/// A propagation contradiction restarts the collapse with a derived sub-seed,
/// up to `max_retries` times.
pub fn generate_procedural_with_layout(
    seed: u64,
    params: &ProceduralParams,
) -> Result<(ElevationMap, TileLayout)> {
    params.validate()?;
    let mut last_err = String::new();
    for attempt in 0..=params.max_retries {
        let attempt_seed = if attempt == 0 {
            seed
        } else {
            seeds::derive(seed, &format!("wfc-retry-{attempt}"))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed);
        let level_height =
            uniform(&mut rng, params.level_height_range.0, params.level_height_range.1);
        match collapse(&mut rng, params) {
            Ok(tiles) => {
                let layout = TileLayout {
                    tiles_per_side: params.tiles_per_side,
                    cells_per_tile: params.cells_per_tile(),
                    level_height,
                    tiles,
                };
                let map = synthesize(&mut rng, seed, params, &layout)?;
                return Ok((map, layout));
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    Err(CoreError::Generation(format!(
        "wave function collapse failed after {} retries: {last_err}",
        params.max_retries
    )))
}

fn domain_states(params: &ProceduralParams) -> Vec<Tile> {
    let mut states = Vec::new();
    for &kind in &params.allowed {
        match kind {
            TileKind::Flat | TileKind::Boxes => {
                for level in 0..=MAX_LEVEL {
                    states.push(Tile { kind, level, dir: None });
                }
            }
            TileKind::Ramp | TileKind::Stairs => {
                for level in 0..MAX_LEVEL {
                    for dir in Direction::ALL {
                        states.push(Tile { kind, level, dir: Some(dir) });
                    }
                }
            }
        }
    }
    states
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeSig {
    Flat(u8),
    /// Edge height varies `lo -> lo + 1`; `ascending` is the sense along the
    /// positive world axis perpendicular to the shared edge normal.
    Slope { lo: u8, along_x: bool, ascending: bool },
}

fn edge_sig(tile: Tile, d: Direction) -> EdgeSig {
    match (tile.kind, tile.dir) {
        (TileKind::Flat | TileKind::Boxes, _) => EdgeSig::Flat(tile.level),
        (_, Some(dir)) if d == dir => EdgeSig::Flat(tile.level + 1),
        (_, Some(dir)) if d == dir.opposite() => EdgeSig::Flat(tile.level),
        (_, Some(dir)) => EdgeSig::Slope {
            lo: tile.level,
            along_x: dir.along_x(),
            ascending: dir.ascending(),
        },
        (_, None) => unreachable!("slope tiles always carry a direction"),
    }
}

fn sig_ok(a: EdgeSig, b: EdgeSig) -> bool {
    match (a, b) {
        (EdgeSig::Flat(x), EdgeSig::Flat(y)) => x == y,
        // A flat edge may butt against the open side of a slope at either the
        // slope's bottom or top level.
        (EdgeSig::Flat(x), EdgeSig::Slope { lo, .. })
        | (EdgeSig::Slope { lo, .. }, EdgeSig::Flat(x)) => x == lo || x == lo + 1,
        (s1 @ EdgeSig::Slope { .. }, s2 @ EdgeSig::Slope { .. }) => s1 == s2,
    }
}

/// Stairs connect only to stairs or flat at both ends of their run.
fn stairs_end_ok(a: Tile, d: Direction, b: Tile) -> bool {
    if a.kind != TileKind::Stairs {
        return true;
    }
    let Some(dir) = a.dir else { return true };
    if d == dir {
        match b.kind {
            TileKind::Stairs => b.dir == Some(dir) && b.level == a.level + 1,
            TileKind::Flat => b.level == a.level + 1,
            _ => false,
        }
    } else if d == dir.opposite() {
        match b.kind {
            TileKind::Stairs => b.dir == Some(dir) && b.level + 1 == a.level,
            TileKind::Flat => b.level == a.level,
            _ => false,
        }
    } else {
        true
    }
}

fn compatible(a: Tile, d: Direction, b: Tile) -> bool {
    sig_ok(edge_sig(a, d), edge_sig(b, d.opposite()))
        && stairs_end_ok(a, d, b)
        && stairs_end_ok(b, d.opposite(), a)
}

fn collapse(rng: &mut ChaCha8Rng, params: &ProceduralParams) -> Result<Vec<Tile>> {
    let n = params.tiles_per_side;
    let states = domain_states(params);
    let mut domains: Vec<Vec<Tile>> = vec![states.clone(); n * n];

    propagate_all(&mut domains, n)?;

    loop {
        // Minimum-entropy cell, seeded tie-break.
        let min_size = domains.iter().map(Vec::len).filter(|&s| s > 1).min();
        let Some(min_size) = min_size else {
            break; // fully collapsed
        };
        let candidates: Vec<usize> = (0..domains.len())
            .filter(|&i| domains[i].len() == min_size)
            .collect();
        let cell = candidates[rng.gen_range(0..candidates.len())];

        // Pick a kind uniformly among those still present, then a state of
        // that kind, so stairs-heavy domains do not dominate the draw.
        let mut kinds: Vec<TileKind> = Vec::new();
        for t in &domains[cell] {
            if !kinds.contains(&t.kind) {
                kinds.push(t.kind);
            }
        }
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let of_kind: Vec<Tile> = domains[cell].iter().copied().filter(|t| t.kind == kind).collect();
        let choice = of_kind[rng.gen_range(0..of_kind.len())];

        domains[cell] = vec![choice];
        propagate_from(&mut domains, n, cell)?;
    }

    Ok(domains.into_iter().map(|d| d[0]).collect())
}

fn propagate_all(domains: &mut [Vec<Tile>], n: usize) -> Result<()> {
    let mut queue: Vec<usize> = (0..n * n).collect();
    propagate(domains, n, &mut queue)
}

fn propagate_from(domains: &mut [Vec<Tile>], n: usize, cell: usize) -> Result<()> {
    let mut queue = vec![cell];
    propagate(domains, n, &mut queue)
}

/// AC-3 style constraint propagation. A state survives if every neighbor
/// still offers at least one compatible state.
fn propagate(domains: &mut [Vec<Tile>], n: usize, queue: &mut Vec<usize>) -> Result<()> {
    while let Some(cell) = queue.pop() {
        let (cx, cy) = ((cell % n) as i64, (cell / n) as i64);
        for d in Direction::ALL {
            let (dx, dy) = d.offset();
            let (nx, ny) = (cx + dx, cy + dy);
            if nx < 0 || ny < 0 || nx >= n as i64 || ny >= n as i64 {
                continue;
            }
            let nb = ny as usize * n + nx as usize;
            let before = domains[nb].len();
            let cell_domain = domains[cell].clone();
            domains[nb].retain(|&t| cell_domain.iter().any(|&s| compatible(s, d, t)));
            if domains[nb].is_empty() {
                return Err(CoreError::Generation(format!(
                    "contradiction at tile ({nx}, {ny})"
                )));
            }
            if domains[nb].len() < before {
                queue.push(nb);
            }
        }
    }
    Ok(())
}

fn synthesize(
    rng: &mut ChaCha8Rng,
    seed: u64,
    params: &ProceduralParams,
    layout: &TileLayout,
) -> Result<ElevationMap> {
    let n = layout.tiles_per_side;
    let cpt = layout.cells_per_tile;
    let cells = n * cpt;
    let level_h = layout.level_height;
    let treads = ((params.tile_m / TREAD_WIDTH).round() as usize).max(1);
    let mut grid = vec![0.0f64; cells * cells];

    for ty in 0..n {
        for tx in 0..n {
            let tile = layout.tile(tx, ty);
            let base = f64::from(tile.level) * level_h;

            // Per-tile randomization, drawn in fixed tile order.
            let tread_rises: Vec<f64> = if tile.kind == TileKind::Stairs {
                let weights: Vec<f64> = (0..treads).map(|_| uniform(rng, 0.5, 1.5)).collect();
                let total: f64 = weights.iter().sum();
                let mut cum = 0.0;
                weights
                    .iter()
                    .map(|w| {
                        cum += w / total * level_h;
                        cum
                    })
                    .collect()
            } else {
                Vec::new()
            };
            let (box_h, box_half) = if tile.kind == TileKind::Boxes {
                (
                    uniform(rng, params.box_height_range.0, params.box_height_range.1),
                    uniform(rng, params.box_footprint_range.0, params.box_footprint_range.1) / 2.0,
                )
            } else {
                (0.0, 0.0)
            };

            for j in 0..cpt {
                for i in 0..cpt {
                    let fx = (i as f64 + 0.5) / cpt as f64;
                    let fy = (j as f64 + 0.5) / cpt as f64;
                    let frac = tile.dir.map(|dir| match dir {
                        Direction::PosX => fx,
                        Direction::NegX => 1.0 - fx,
                        Direction::PosY => fy,
                        Direction::NegY => 1.0 - fy,
                    });
                    let mut h = match tile.kind {
                        TileKind::Flat => base,
                        TileKind::Boxes => {
                            let local_x = (fx - 0.5) * params.tile_m;
                            let local_y = (fy - 0.5) * params.tile_m;
                            if local_x.abs() <= box_half && local_y.abs() <= box_half {
                                base + box_h
                            } else {
                                base
                            }
                        }
                        TileKind::Ramp => base + frac.unwrap() * level_h,
                        TileKind::Stairs => {
                            let k = ((frac.unwrap() * treads as f64).floor() as usize)
                                .min(treads - 1);
                            base + tread_rises[k]
                        }
                    };
                    if h.abs() < 1e-12 {
                        h = 0.0;
                    }
                    grid[(ty * cpt + j) * cells + tx * cpt + i] = h;
                }
            }
        }
    }

    // Anchor the lowest point at zero.
    let min = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let heights: Vec<f32> = grid.iter().map(|&h| (h - min) as f32).collect();
    ElevationMap::from_heights(cells, cells, params.resolution, heights, TerrainFamily::Procedural, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiles_partition_the_map() {
        let params = ProceduralParams::default();
        let (map, layout) = generate_procedural_with_layout(0, &params).unwrap();
        assert_eq!(layout.tiles.len(), 25);
        assert_eq!(map.width_cells(), 100);
        assert_eq!(map.height_cells(), 100);
        assert!((map.extent().0 - 10.0).abs() < 1e-5);
    }

    #[test]
    fn flat_only_collapses_to_zero() {
        let params = ProceduralParams {
            allowed: vec![TileKind::Flat],
            ..ProceduralParams::default()
        };
        let map = generate_procedural(9, &params).unwrap();
        assert!(map.heights().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let params = ProceduralParams::default();
        let a = generate_procedural(123, &params).unwrap();
        let b = generate_procedural(123, &params).unwrap();
        assert_eq!(a, b);
        let c = generate_procedural(124, &params).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn stairs_tiles_connect_to_stairs_or_flat() {
        let params = ProceduralParams::default();
        for seed in 0..100u64 {
            let (map, layout) = generate_procedural_with_layout(seed, &params).unwrap();
            verify_layout(&map, &layout, seed);
        }
    }

    /// Test-side adjacency check: layout kinds plus grid heights.
    fn verify_layout(map: &ElevationMap, layout: &TileLayout, seed: u64) {
        let n = layout.tiles_per_side;
        let cpt = layout.cells_per_tile;
        for ty in 0..n {
            for tx in 0..n {
                let tile = layout.tile(tx, ty);
                if tile.kind != TileKind::Stairs {
                    continue;
                }
                let dir = tile.dir.unwrap();
                let (dx, dy) = dir.offset();
                let (ux, uy) = (tx as i64 + dx, ty as i64 + dy);
                if ux < 0 || uy < 0 || ux >= n as i64 || uy >= n as i64 {
                    continue;
                }
                let uphill = layout.tile(ux as usize, uy as usize);
                assert!(
                    matches!(uphill.kind, TileKind::Stairs | TileKind::Flat),
                    "seed {seed}: stairs at ({tx},{ty}) has uphill {:?}",
                    uphill.kind
                );
                // Heights across the shared boundary: a flat neighbor sits at
                // the staircase top exactly; a continuing staircase rises by
                // its first riser (bounded by the level height).
                let top_cells = boundary_cells(tx, ty, dir, cpt);
                let low_cells = boundary_cells(ux as usize, uy as usize, dir.opposite(), cpt);
                for (&(c1, r1), &(c2, r2)) in top_cells.iter().zip(low_cells.iter()) {
                    let h1 = map.cell(c1, r1);
                    let h2 = map.cell(c2, r2);
                    match uphill.kind {
                        TileKind::Flat => assert!(
                            (h1 - h2).abs() < 1e-5,
                            "seed {seed}: boundary mismatch {h1} vs {h2}"
                        ),
                        TileKind::Stairs => assert!(
                            h2 - h1 > 0.0 && h2 - h1 <= layout.level_height + 1e-5,
                            "seed {seed}: staircase continuation jump {}",
                            h2 - h1
                        ),
                        _ => unreachable!(),
                    }
                }
            }
        }
    }

    /// Cells of a tile's edge facing `d`, ordered along the edge.
    fn boundary_cells(tx: usize, ty: usize, d: Direction, cpt: usize) -> Vec<(usize, usize)> {
        let (x0, y0) = (tx * cpt, ty * cpt);
        match d {
            Direction::PosX => (0..cpt).map(|j| (x0 + cpt - 1, y0 + j)).collect(),
            Direction::NegX => (0..cpt).map(|j| (x0, y0 + j)).collect(),
            Direction::PosY => (0..cpt).map(|i| (x0 + i, y0 + cpt - 1)).collect(),
            Direction::NegY => (0..cpt).map(|i| (x0 + i, y0)).collect(),
        }
    }
}
