//! Regenerates `data/covertype_sample.csv`, a seeded synthetic sample in the
//! UCI Covertype column layout: 10 quantitative terrain features, 4 one-hot
//! wilderness-area columns, 40 one-hot soil-type columns, and an integer
//! cover-type label. Cover types 3, 5, and 7 get ~170 rows each with
//! class-dependent terrain distributions; two in ten type-7 rows draw
//! their features from the type-5 profile, mirroring how those two types
//! blur into each other in the field. A handful of other-type rows are
//! mixed in so the loader's class filter has something to drop.
//!
//! Run with: cargo run --release --example make_covertype_sample

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const ROWS_PER_TARGET_CLASS: usize = 170;
const OTHER_CLASS_ROWS: usize = 18;
const SEED: u64 = 20240817;

/// Per-class terrain profile: means for the 10 quantitative columns.
struct Profile {
    label: u32,
    means: [f64; 10],
    /// Multiplier on the shared column sigmas; < 1 concentrates the class.
    sigma_scale: f64,
    /// Wilderness-area selection weights.
    wilderness: [f64; 4],
    /// Inclusive soil-type index range the class draws from.
    soil_range: (usize, usize),
}

const SIGMAS: [f64; 10] = [
    110.0, 50.0, 5.0, 90.0, 35.0, 450.0, 22.0, 18.0, 25.0, 400.0,
];

fn profiles() -> [Profile; 3] {
    [
        Profile {
            label: 3,
            means: [
                2780.0, 160.0, 12.0, 60.0, 30.0, 1400.0, 215.0, 225.0, 140.0, 1300.0,
            ],
            sigma_scale: 1.0,
            wilderness: [0.7, 0.2, 0.1, 0.0],
            soil_range: (0, 13),
        },
        Profile {
            label: 5,
            means: [
                3000.0, 180.0, 18.0, 240.0, 50.0, 2200.0, 220.0, 230.0, 150.0, 2100.0,
            ],
            sigma_scale: 1.0,
            wilderness: [0.2, 0.6, 0.15, 0.05],
            soil_range: (10, 25),
        },
        Profile {
            label: 7,
            means: [
                3130.0, 195.0, 24.0, 430.0, 65.0, 3000.0, 222.0, 232.0, 152.0, 2900.0,
            ],
            sigma_scale: 1.0,
            wilderness: [0.05, 0.45, 0.35, 0.15],
            soil_range: (15, 30),
        },
    ]
}

fn pick_weighted(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut roll = rng.gen_range(0.0..total);
    for (i, &w) in weights.iter().enumerate() {
        if roll < w {
            return i;
        }
        roll -= w;
    }
    weights.len() - 1
}

fn sample_row(rng: &mut ChaCha8Rng, profile: &Profile) -> Vec<i64> {
    let mut row = Vec::with_capacity(55);
    for (mean, sigma) in profile.means.iter().zip(&SIGMAS) {
        let normal =
            Normal::new(*mean, sigma * profile.sigma_scale).expect("finite parameters");
        row.push(normal.sample(rng).round().max(0.0) as i64);
    }
    let wilderness = pick_weighted(rng, &profile.wilderness);
    for area in 0..4 {
        row.push(i64::from(area == wilderness));
    }
    let (lo, hi) = profile.soil_range;
    let soil = rng.gen_range(lo..=hi);
    for soil_type in 0..40 {
        row.push(i64::from(soil_type == soil));
    }
    row.push(i64::from(profile.label));
    row
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let profiles = profiles();

    let mut rows = Vec::new();
    let type5 = &profiles[1];
    for profile in &profiles {
        for i in 0..ROWS_PER_TARGET_CLASS {
            let source = if profile.label == 7 && i % 10 < 2 {
                type5
            } else {
                profile
            };
            let mut row = sample_row(&mut rng, source);
            *row.last_mut().expect("row has label") = i64::from(profile.label);
            rows.push(row);
        }
    }
    // Filler rows from non-selected cover types, drawn off the class blobs.
    for i in 0..OTHER_CLASS_ROWS {
        let profile = &profiles[i % 3];
        let mut row = sample_row(&mut rng, profile);
        let filler_labels = [1, 2, 4, 6];
        *row.last_mut().expect("row has label") = filler_labels[i % 4];
        rows.push(row);
    }

    // Interleave classes deterministically so the file isn't sorted by label.
    use rand::seq::SliceRandom;
    rows.shuffle(&mut rng);

    let text: String = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/covertype_sample.csv");
    fs::write(&path, text).expect("write sample file");
    println!(
        "wrote {} rows ({} per selected class, {} filler) to {}",
        rows.len(),
        ROWS_PER_TARGET_CLASS,
        OTHER_CLASS_ROWS,
        path.display()
    );
}
