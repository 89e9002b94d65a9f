use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Cell, Color, Layout, Scenario, Shape, ShapeObject, GRID_CELLS};

/// Consecutive failed expansion proposals before the pattern generator stops.
const MAX_FAILED_PROPOSALS: u32 = 25;
const MIN_OBJECTS: usize = 4;

/// Production rules for `2d-shape-pattern` layouts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternRules {
    pub seed_count: usize,
    pub expansion_prob: f64,
    pub attribute_copy_prob: f64,
    pub max_objects: usize,
}

impl Default for PatternRules {
    fn default() -> Self {
        PatternRules { seed_count: 2, expansion_prob: 0.8, attribute_copy_prob: 0.7, max_objects: 6 }
    }
}

impl PatternRules {
    pub fn validate(&self) -> Result<(), String> {
        for (name, p) in [("expansion_prob", self.expansion_prob), ("attribute_copy_prob", self.attribute_copy_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} = {p} is not a probability"));
            }
        }
        if self.seed_count < 1 {
            return Err("seed_count must be at least 1".into());
        }
        if self.seed_count > self.max_objects {
            return Err(format!(
                "seed_count {} exceeds max_objects {}",
                self.seed_count, self.max_objects
            ));
        }
        if self.max_objects > GRID_CELLS {
            return Err(format!("max_objects {} exceeds the {GRID_CELLS} grid cells", self.max_objects));
        }
        Ok(())
    }
}

fn random_shape(rng: &mut impl Rng) -> Shape {
    Shape::ALL[rng.gen_range(0..Shape::ALL.len())]
}

fn random_color(rng: &mut impl Rng) -> Color {
    Color::ALL[rng.gen_range(0..Color::ALL.len())]
}

fn random_free_cell(rng: &mut impl Rng, grid: &BTreeMap<Cell, ShapeObject>) -> Option<Cell> {
    let free: Vec<Cell> = Cell::all().filter(|c| !grid.contains_key(c)).collect();
    (!free.is_empty()).then(|| free[rng.gen_range(0..free.len())])
}

/// 4 to 6 objects with uniform shape, color and distinct cells.
pub fn generate_random_shape_layout(seed: u64) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(4..=6);
    let objects = sample(&mut rng, GRID_CELLS, count)
        .into_iter()
        .map(|i| {
            let shape = random_shape(&mut rng);
            let color = random_color(&mut rng);
            ShapeObject::new(shape, color, Cell::from_index(i))
        })
        .collect();
    Layout::shape2d(Scenario::ShapeRandom, objects).expect("distinct in-bounds cells")
}

/// Seed-and-expand generator biased toward 4-adjacent objects.
pub fn generate_pattern_shape_layout(seed: u64, rules: &PatternRules) -> Result<Layout, String> {
    rules.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid: BTreeMap<Cell, ShapeObject> = BTreeMap::new();

    for _ in 0..rules.seed_count {
        let cell = random_free_cell(&mut rng, &grid).expect("seed_count <= 25");
        let obj = ShapeObject::new(random_shape(&mut rng), random_color(&mut rng), cell);
        grid.insert(cell, obj);
    }

    let mut failures = 0;
    while grid.len() < rules.max_objects && failures < MAX_FAILED_PROPOSALS {
        let parent = *grid.values().nth(rng.gen_range(0..grid.len())).unwrap();
        if !rng.gen_bool(rules.expansion_prob) {
            failures += 1;
            continue;
        }
        let free: Vec<Cell> = parent.cell.neighbors4().filter(|c| !grid.contains_key(c)).collect();
        if free.is_empty() {
            failures += 1;
            continue;
        }
        let cell = free[rng.gen_range(0..free.len())];
        let shape = if rng.gen_bool(rules.attribute_copy_prob) { parent.shape } else { random_shape(&mut rng) };
        let color = if rng.gen_bool(rules.attribute_copy_prob) { parent.color } else { random_color(&mut rng) };
        grid.insert(cell, ShapeObject::new(shape, color, cell));
        failures = 0;
    }

    let floor = MIN_OBJECTS.min(rules.max_objects);
    while grid.len() < floor {
        let cell = random_free_cell(&mut rng, &grid).expect("floor <= 25");
        grid.insert(cell, ShapeObject::new(random_shape(&mut rng), random_color(&mut rng), cell));
    }

    Ok(Layout::shape2d(Scenario::ShapePattern, grid.into_values().collect()).expect("grid keys are unique"))
}
