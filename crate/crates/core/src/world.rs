//! Infinite billiard tables assembled from catalog words: tubes over `Z`,
//! gases over `Z^2`.
//!
//! A world never materializes its word. `cell_at` is a pure function of the
//! cell index, backed by an explicit finite window with constant or periodic
//! extension, or by a seeded i.i.d. sampler hashed per index. Orbits can
//! therefore wander arbitrarily far and concurrent queries need no
//! coordination.

// Inherent float methods cover this when std is linked (tests); the trait
// provides them in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::config::{Catalog, ConfigId, LocalConfiguration};
use crate::rng;

/// Lattice flavor: a strip of cells over `Z` or the full plane over `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorldKind {
    Tube,
    Gas,
}

/// A cell index; tubes use `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub x: i64,
    pub y: i64,
}

impl CellIndex {
    pub const ORIGIN: CellIndex = CellIndex { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> CellIndex {
        CellIndex { x, y }
    }

    pub const fn tube(x: i64) -> CellIndex {
        CellIndex { x, y: 0 }
    }

    /// Taxicab norm `|x| + |y|`.
    pub fn norm(self) -> u64 {
        self.x.unsigned_abs() + self.y.unsigned_abs()
    }

    pub fn offset(self, dx: i64, dy: i64) -> CellIndex {
        CellIndex::new(self.x + dx, self.y + dy)
    }
}

/// Extension of an explicit window beyond its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extension {
    Constant(ConfigId),
    /// Tile the window periodically over the whole lattice.
    Periodic,
}

/// An explicit rectangular assignment, row-major from `origin` (the cell at
/// `origin` is `cells[0]`; `x` varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitWindow {
    pub origin: CellIndex,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<ConfigId>,
    pub extend: Extension,
}

impl ExplicitWindow {
    fn lookup(&self, n: CellIndex) -> Option<ConfigId> {
        let dx = n.x - self.origin.x;
        let dy = n.y - self.origin.y;
        match self.extend {
            Extension::Periodic => {
                let dx = dx.rem_euclid(self.width as i64) as usize;
                let dy = dy.rem_euclid(self.height as i64) as usize;
                Some(self.cells[dy * self.width + dx])
            }
            Extension::Constant(id) => {
                if (0..self.width as i64).contains(&dx) && (0..self.height as i64).contains(&dy) {
                    Some(self.cells[dy as usize * self.width + dx as usize])
                } else {
                    Some(id)
                }
            }
        }
    }
}

/// The deterministic cell assignment behind a world.
#[derive(Debug, Clone, PartialEq)]
pub enum CellSource {
    Constant(ConfigId),
    Explicit(ExplicitWindow),
    /// I.i.d. word: the id at index `n` is a pure hash of `(seed, n)`
    /// mapped through the cumulative probability vector.
    Bernoulli { cumulative: Vec<f64>, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum WorldError {
    /// A source id falls outside the catalog range `1..=m`.
    BadId { id: ConfigId },
    BadWindow,
}

impl core::fmt::Display for WorldError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WorldError::BadId { id } => write!(f, "configuration id {id} outside catalog"),
            WorldError::BadWindow => write!(f, "window dimensions do not match the cell list"),
        }
    }
}

/// A tube or gas world: catalog plus lazy word, optionally wrapped into a
/// finite torus.
///
/// The wrap exists solely to build finite-measure approximants for
/// invariance testing; it folds the word (and any folded statistics)
/// periodically and is flagged in all outputs that use it.
#[derive(Debug, Clone)]
pub struct World {
    kind: WorldKind,
    catalog: Arc<Catalog>,
    source: CellSource,
    wrap: Option<i64>,
}

impl World {
    pub fn new(
        catalog: Arc<Catalog>,
        source: CellSource,
        wrap: Option<i64>,
    ) -> Result<World, WorldError> {
        let m = catalog.len() as ConfigId;
        match &source {
            CellSource::Constant(id) => {
                if *id < 1 || *id > m {
                    return Err(WorldError::BadId { id: *id });
                }
            }
            CellSource::Explicit(w) => {
                if w.cells.len() != w.width * w.height || w.cells.is_empty() {
                    return Err(WorldError::BadWindow);
                }
                for &id in &w.cells {
                    if id < 1 || id > m {
                        return Err(WorldError::BadId { id });
                    }
                }
                if let Extension::Constant(id) = w.extend {
                    if id < 1 || id > m {
                        return Err(WorldError::BadId { id });
                    }
                }
            }
            CellSource::Bernoulli { cumulative, .. } => {
                debug_assert_eq!(cumulative.len(), catalog.len());
            }
        }
        Ok(World {
            kind: catalog.kind(),
            catalog,
            source,
            wrap,
        })
    }

    pub fn constant(catalog: Arc<Catalog>, id: ConfigId) -> World {
        World::new(catalog, CellSource::Constant(id), None).expect("constant world")
    }

    pub fn explicit_tube(
        catalog: Arc<Catalog>,
        origin_x: i64,
        cells: Vec<ConfigId>,
        extend: Extension,
    ) -> Result<World, WorldError> {
        let width = cells.len();
        World::new(
            catalog,
            CellSource::Explicit(ExplicitWindow {
                origin: CellIndex::tube(origin_x),
                width,
                height: 1,
                cells,
                extend,
            }),
            None,
        )
    }

    pub fn kind(&self) -> WorldKind {
        self.kind
    }

    pub fn catalog(&self) -> &Arc<Catalog> {
        &self.catalog
    }

    pub fn source(&self) -> &CellSource {
        &self.source
    }

    pub fn wrap(&self) -> Option<i64> {
        self.wrap
    }

    pub fn with_wrap(mut self, period: i64) -> World {
        assert!(period >= 1);
        self.wrap = Some(period);
        self
    }

    /// Folds an index into the fundamental domain of a wrapped world.
    pub fn fold(&self, n: CellIndex) -> CellIndex {
        match self.wrap {
            None => n,
            Some(p) => match self.kind {
                WorldKind::Tube => CellIndex::new(n.x.rem_euclid(p), n.y),
                WorldKind::Gas => CellIndex::new(n.x.rem_euclid(p), n.y.rem_euclid(p)),
            },
        }
    }

    /// The configuration id at cell `n`. Pure: equal indices always yield
    /// equal ids.
    pub fn cell_at(&self, n: CellIndex) -> ConfigId {
        let n = self.fold(n);
        match &self.source {
            CellSource::Constant(id) => *id,
            CellSource::Explicit(w) => w.lookup(n).unwrap(),
            CellSource::Bernoulli { cumulative, seed } => {
                let h = rng::mix3(*seed, n.x as u64, n.y as u64);
                let u = (h >> 11) as f64 * (1.0 / 9007199254740992.0);
                let mut id = cumulative.len() as ConfigId;
                for (i, &c) in cumulative.iter().enumerate() {
                    if u < c {
                        id = (i + 1) as ConfigId;
                        break;
                    }
                }
                id
            }
        }
    }

    pub fn config_at(&self, n: CellIndex) -> &LocalConfiguration {
        self.catalog.cell(self.cell_at(n))
    }

    pub fn is_blocking_at(&self, n: CellIndex) -> bool {
        self.catalog.is_blocking(self.cell_at(n))
    }
}

/// Default scan limit for blocking-cell searches.
pub const DEFAULT_SCAN_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum GapError {
    NotATube,
    /// No blocking cell found within the scan limit: the word has an
    /// all-non-blocking tail (or is all-non-blocking), and the gap coding
    /// is undefined rather than guessed.
    UnboundedSearch { from: i64, rightward: bool, limit: u64 },
}

impl core::fmt::Display for GapError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GapError::NotATube => write!(f, "gap profiles are defined for tube worlds"),
            GapError::UnboundedSearch {
                from,
                rightward,
                limit,
            } => write!(
                f,
                "no blocking cell within {limit} cells {} of {from}",
                if *rightward { "right" } else { "left" }
            ),
        }
    }
}

/// The gap sequences of a tube word around its (shift-normalized) origin.
///
/// `g[j]` for `j >= 1` is one plus the length of the j-th non-blocking
/// factor on each side; `f[j] = +/- sum_{i<=j} g[i]` locates the j-th
/// blocking cell. `g[0] = f[0] = 0`. `k_witness = max_j g[j] / j` over the
/// computed range, the power-law constant of the Borel-Cantelli bound.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    pub g_plus: Vec<u64>,
    pub g_minus: Vec<u64>,
    pub f_plus: Vec<i64>,
    pub f_minus: Vec<i64>,
    pub k_witness: f64,
    /// Cells the origin was shifted (to the first blocking cell at
    /// non-negative index) before coding; indices in `f` are relative to
    /// the shifted origin.
    pub origin_shift: i64,
}

impl GapProfile {
    pub fn len(&self) -> usize {
        self.g_plus.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn scan_blocking(world: &World, from: i64, step: i64, limit: u64) -> Option<i64> {
    let mut n = from;
    for _ in 0..limit {
        if world.is_blocking_at(CellIndex::tube(n)) {
            return Some(n);
        }
        n += step;
    }
    None
}

/// Computes the gap profile of a tube world up to index `J`.
///
/// The word is first shifted left the minimum amount so the origin cell is
/// blocking; an all-non-blocking stretch longer than `scan_limit` surfaces
/// as `UnboundedSearch`.
pub fn gap_profile(world: &World, j_max: usize, scan_limit: u64) -> Result<GapProfile, GapError> {
    if world.kind() != WorldKind::Tube {
        return Err(GapError::NotATube);
    }
    let shift = scan_blocking(world, 0, 1, scan_limit).ok_or(GapError::UnboundedSearch {
        from: 0,
        rightward: true,
        limit: scan_limit,
    })?;

    let mut g_plus = Vec::with_capacity(j_max + 1);
    let mut g_minus = Vec::with_capacity(j_max + 1);
    let mut f_plus = Vec::with_capacity(j_max + 1);
    let mut f_minus = Vec::with_capacity(j_max + 1);
    g_plus.push(0);
    g_minus.push(0);
    f_plus.push(0);
    f_minus.push(0);
    let mut k_witness = 0.0f64;

    for j in 1..=j_max {
        let right = scan_blocking(world, shift + f_plus[j - 1] + 1, 1, scan_limit).ok_or(
            GapError::UnboundedSearch {
                from: f_plus[j - 1],
                rightward: true,
                limit: scan_limit,
            },
        )?;
        let gp = (right - shift - f_plus[j - 1]) as u64;
        g_plus.push(gp);
        f_plus.push(right - shift);

        let left = scan_blocking(world, shift + f_minus[j - 1] - 1, -1, scan_limit).ok_or(
            GapError::UnboundedSearch {
                from: f_minus[j - 1],
                rightward: false,
                limit: scan_limit,
            },
        )?;
        let gm = (shift + f_minus[j - 1] - left) as u64;
        g_minus.push(gm);
        f_minus.push(left - shift);

        k_witness = k_witness.max(gp as f64 / j as f64).max(gm as f64 / j as f64);
    }

    Ok(GapProfile {
        g_plus,
        g_minus,
        f_plus,
        f_minus,
        k_witness,
        origin_shift: shift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistBounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistError {
    KindMismatch,
    /// The metric compares ids numerically, so both words must draw from
    /// catalogs of equal size.
    CatalogMismatch,
}

impl core::fmt::Display for DistError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DistError::KindMismatch => write!(f, "worlds have different kinds"),
            DistError::CatalogMismatch => write!(f, "worlds have different catalog sizes"),
        }
    }
}

/// Two-sided truncation of the word metric
/// `dist = sum_n 2^(-|n|) |a_n - b_n|` (taxicab exponent).
///
/// `lower` is the partial sum over `|n| <= radius`; `upper` adds the exact
/// closed-form tail `(m - 1) * sum_{|n| > radius} 2^(-|n|)`, so the true
/// distance always lies in `[lower, upper]`.
pub fn dist_truncated(a: &World, b: &World, radius: u64) -> Result<DistBounds, DistError> {
    if a.kind() != b.kind() {
        return Err(DistError::KindMismatch);
    }
    if a.catalog().len() != b.catalog().len() {
        return Err(DistError::CatalogMismatch);
    }
    let m = a.catalog().len() as f64;
    let r = radius as i64;
    let mut lower = 0.0;
    match a.kind() {
        WorldKind::Tube => {
            for x in -r..=r {
                let n = CellIndex::tube(x);
                let diff = (a.cell_at(n) as f64 - b.cell_at(n) as f64).abs();
                lower += 2.0f64.powi(-(x.abs() as i32)) * diff;
            }
        }
        WorldKind::Gas => {
            for x in -r..=r {
                for y in -(r - x.abs())..=(r - x.abs()) {
                    let n = CellIndex::new(x, y);
                    let diff = (a.cell_at(n) as f64 - b.cell_at(n) as f64).abs();
                    lower += 2.0f64.powi(-(n.norm() as i32)) * diff;
                }
            }
        }
    }
    let tail = match a.kind() {
        // sum_{|n| > R} 2^(-|n|) = 2 * 2^(-R).
        WorldKind::Tube => 2.0 * 2.0f64.powi(-(r as i32)),
        // 4s points at norm s: sum_{s > R} 4 s 2^(-s) = 4 (R + 2) 2^(-R).
        WorldKind::Gas => 4.0 * (r as f64 + 2.0) * 2.0f64.powi(-(r as i32)),
    };
    Ok(DistBounds {
        lower,
        upper: lower + (m - 1.0) * tail,
    })
}

/// A violation of the blocking-circle structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleViolation {
    pub at: CellIndex,
    pub id: ConfigId,
    /// The circle index j with `|n| = j^2`.
    pub j: u64,
}

/// Whether `n` lies on a blocking circle `D_j` (`|n| = j^2`) with `j >= i`.
pub fn on_blocking_circle(n: CellIndex, i: u64) -> Option<u64> {
    let s = n.norm();
    if s == 0 {
        return None;
    }
    let j = (s as f64).sqrt() as u64;
    [j.saturating_sub(1), j, j + 1].into_iter().find(|&cand| cand >= 1 && cand * cand == s && cand >= i.max(1))
}

/// Checks that every cell on a blocking circle `D_j` (`j >= i`) inside the
/// window (taxicab radius) has configuration 1; returns the first violation.
pub fn verify_blocking_circles(
    world: &World,
    i: u64,
    window: u64,
) -> Result<(), CircleViolation> {
    debug_assert_eq!(world.kind(), WorldKind::Gas);
    let r = window as i64;
    for x in -r..=r {
        for y in -(r - x.abs())..=(r - x.abs()) {
            let n = CellIndex::new(x, y);
            if let Some(j) = on_blocking_circle(n, i) {
                let id = world.cell_at(n);
                if id != 1 {
                    return Err(CircleViolation { at: n, id, j });
                }
            }
        }
    }
    Ok(())
}
