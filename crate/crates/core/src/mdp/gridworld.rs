use super::{ActionId, Choice, LabeledMdp, MdpGraph};
use crate::scltl::{Alphabet, AlphabetError, Symbol};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridworldError {
    #[error("grid must be at least 1x1")]
    EmptyGrid,
    #[error("cell {0} is outside the grid")]
    OutOfBounds(Cell),
    #[error("start cell {0} is an obstacle")]
    StartOnObstacle(Cell),
    #[error("region {region:?} overlaps obstacle {cell}")]
    RegionOnObstacle { region: String, cell: Cell },
    #[error("drift cell {0} is an obstacle")]
    DriftOnObstacle(Cell),
    #[error("drift cell {0} has no directions")]
    NoDriftDirections(Cell),
    #[error("stay probability {0} is not in (0, 1)")]
    StayProbability(f64),
    #[error("battery capacity must be at least 1")]
    Capacity,
    #[error(transparent)]
    Region(#[from] AlphabetError),
}

/// `(col, row)`, with row 0 at the south edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell(pub u32, pub u32);

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::East, Direction::South, Direction::West];

    pub fn name(self) -> &'static str {
        match self {
            Direction::North => "North",
            Direction::East => "East",
            Direction::South => "South",
            Direction::West => "West",
        }
    }

    fn offset(self) -> (i64, i64) {
        match self {
            Direction::North => (0, 1),
            Direction::East => (1, 0),
            Direction::South => (0, -1),
            Direction::West => (-1, 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftCell {
    pub cell: Cell,
    pub directions: Vec<Direction>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridworldConfig {
    pub width: u32,
    pub height: u32,
    #[serde(default)]
    pub obstacles: Vec<Cell>,
    #[serde(default)]
    pub drift: Vec<DriftCell>,
    pub regions: BTreeMap<String, Vec<Cell>>,
    pub battery_capacity: u32,
    #[serde(default = "default_stay")]
    pub stay_probability: f64,
    pub start: Cell,
}

fn default_stay() -> f64 {
    0.5
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridState {
    pub cell: Cell,
    pub battery: u32,
}

impl GridState {
    pub fn name(&self) -> String {
        format!("({},{})b{}", self.cell.0, self.cell.1, self.battery)
    }
}

impl GridworldConfig {
    fn in_bounds(&self, c: Cell) -> bool {
        c.0 < self.width && c.1 < self.height
    }

    fn is_obstacle(&self, c: Cell) -> bool {
        self.obstacles.contains(&c)
    }

    pub fn validate(&self) -> Result<(), GridworldError> {
        if self.width == 0 || self.height == 0 {
            return Err(GridworldError::EmptyGrid);
        }
        if self.battery_capacity < 1 {
            return Err(GridworldError::Capacity);
        }
        if !(self.stay_probability > 0.0 && self.stay_probability < 1.0) {
            return Err(GridworldError::StayProbability(self.stay_probability));
        }
        let all = self
            .obstacles
            .iter()
            .chain(self.drift.iter().map(|d| &d.cell))
            .chain(self.regions.values().flatten())
            .chain(std::iter::once(&self.start));
        for &c in all {
            if !self.in_bounds(c) {
                return Err(GridworldError::OutOfBounds(c));
            }
        }
        if self.is_obstacle(self.start) {
            return Err(GridworldError::StartOnObstacle(self.start));
        }
        for (r, cells) in &self.regions {
            if let Some(&c) = cells.iter().find(|&&c| self.is_obstacle(c)) {
                return Err(GridworldError::RegionOnObstacle { region: r.clone(), cell: c });
            }
        }
        for d in &self.drift {
            if self.is_obstacle(d.cell) {
                return Err(GridworldError::DriftOnObstacle(d.cell));
            }
            if d.directions.is_empty() {
                return Err(GridworldError::NoDriftDirections(d.cell));
            }
        }
        Alphabet::new(self.regions.keys().cloned())?;
        Ok(())
    }

    /// Neighbor in direction `d`, or `c` itself when blocked.
    pub fn neighbor(&self, c: Cell, d: Direction) -> Cell {
        let (dx, dy) = d.offset();
        let (x, y) = (c.0 as i64 + dx, c.1 as i64 + dy);
        if x < 0 || y < 0 {
            return c;
        }
        let n = Cell(x as u32, y as u32);
        if self.in_bounds(n) && !self.is_obstacle(n) {
            n
        } else {
            c
        }
    }

    /// Cell distribution after choosing `d` at `c`.
    pub fn move_distribution(&self, c: Cell, d: Direction) -> Vec<(Cell, f64)> {
        let target = self.neighbor(c, d);
        let Some(drift) = self.drift.iter().find(|x| x.cell == target) else {
            return vec![(target, 1.0)];
        };
        let mut out = vec![(target, self.stay_probability)];
        let share = (1.0 - self.stay_probability) / drift.directions.len() as f64;
        for &dd in &drift.directions {
            let n = self.neighbor(target, dd);
            match out.iter_mut().find(|(x, _)| *x == n) {
                Some((_, p)) => *p += share,
                None => out.push((n, share)),
            }
        }
        out
    }

    pub fn walkable_cells(&self) -> Vec<Cell> {
        let mut v = Vec::new();
        for row in 0..self.height {
            for col in 0..self.width {
                let c = Cell(col, row);
                if !self.is_obstacle(c) {
                    v.push(c);
                }
            }
        }
        v
    }
}

/// Builds the labeled MDP over `(cell, battery)`. States are ordered row-major
/// by cell, then by ascending battery.
pub fn build_gridworld(cfg: &GridworldConfig) -> Result<LabeledMdp, GridworldError> {
    cfg.validate()?;
    let alphabet = Alphabet::new(cfg.regions.keys().cloned())?;
    let cells = cfg.walkable_cells();
    let levels = cfg.battery_capacity + 1;
    let index = |c: Cell, b: u32| -> usize {
        let ci = cells.binary_search_by_key(&(c.1, c.0), |x| (x.1, x.0)).expect("walkable cell");
        ci * levels as usize + b as usize
    };
    let mut names = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for &c in &cells {
        let mut sym = Symbol::EMPTY;
        for (i, cs) in cfg.regions.values().enumerate() {
            if cs.contains(&c) {
                sym = sym.with(i);
            }
        }
        for b in 0..levels {
            names.push(GridState { cell: c, battery: b }.name());
            labels.push(sym);
            let here = index(c, b);
            let row = Direction::ALL
                .iter()
                .enumerate()
                .map(|(ai, &d)| {
                    let succ = if b == 0 {
                        vec![(here, 1.0)]
                    } else {
                        let mut s: Vec<(usize, f64)> =
                            cfg.move_distribution(c, d).into_iter().map(|(n, p)| (index(n, b - 1), p)).collect();
                        s.sort_by_key(|&(t, _)| t);
                        s
                    };
                    Choice { action: ActionId(ai as u32), succ }
                })
                .collect();
            rows.push(row);
        }
    }
    let start = index(cfg.start, cfg.battery_capacity);
    Ok(LabeledMdp::from_parts(
        alphabet,
        names,
        labels,
        Direction::ALL.iter().map(|d| d.name().to_string()).collect(),
        MdpGraph::new(rows),
        vec![(start, 1.0)],
    ))
}
