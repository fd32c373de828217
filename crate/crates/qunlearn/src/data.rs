//! Dataset ingestion and preprocessing.
//!
//! Loads Iris (4 features + string label) and Covertype (54 features +
//! integer label, UCI column layout) CSVs, reduces Covertype to four
//! dimensions with PCA, min–max scales features to [0, π], and produces
//! stratified train/val/test splits plus the forget/anchor partition of the
//! training set. All fitting statistics (PCA, scaling) come from training
//! rows only.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;

use crate::circuit::N_CLASSES;
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, STREAM_ANCHOR_SUBSAMPLE, STREAM_COVERTYPE_CAP, STREAM_SPLIT};

/// Rows of features with class labels in {0, 1, 2}.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn class_counts(&self) -> [usize; N_CLASSES] {
        let mut counts = [0; N_CLASSES];
        for &label in &self.labels {
            counts[label] += 1;
        }
        counts
    }
}

/// Disjoint index sets into a [`Dataset`], plus the forget/anchor partition
/// of the training rows once a forget class is chosen.
#[derive(Clone, Debug, Default)]
pub struct SplitPartition {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
    pub forget_class: Option<usize>,
    /// Training rows whose label is the forget class.
    pub forget: Vec<usize>,
    /// Training rows kept as behavioral anchors (label ≠ forget class).
    pub anchor: Vec<usize>,
}

/// Per-class row counts for a stratified split.
#[derive(Clone, Copy, Debug)]
pub struct PerClassSplit {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("reading {}: {e}", path.display()),
        ))
    })?;
    Ok(text.lines().map(str::to_string).collect())
}

fn parse_cell(path: &Path, row: usize, cell: &str) -> Result<f64> {
    cell.trim().parse::<f64>().map_err(|_| Error::Parse {
        path: path.display().to_string(),
        row,
        message: format!("expected a number, found '{}'", cell.trim()),
    })
}

/// Loads the Iris CSV: four numeric columns plus a species label mapped
/// setosa → 0, versicolor → 1, virginica → 2. Features are returned raw.
pub fn load_iris(path: &Path, has_header: bool) -> Result<Dataset> {
    let lines = read_lines(path)?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let skip = usize::from(has_header);
    for (i, line) in lines.iter().enumerate().skip(skip) {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 5 {
            return Err(Error::Format(format!(
                "{}:{row}: expected 5 columns, found {}",
                path.display(),
                cells.len()
            )));
        }
        let mut x = Vec::with_capacity(4);
        for cell in &cells[..4] {
            x.push(parse_cell(path, row, cell)?);
        }
        let species = cells[4].trim();
        let species = species.strip_prefix("Iris-").unwrap_or(species);
        let label = match species {
            "setosa" => 0,
            "versicolor" => 1,
            "virginica" => 2,
            other => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    row,
                    message: format!("unknown species '{other}'"),
                })
            }
        };
        features.push(x);
        labels.push(label);
    }
    Ok(Dataset {
        name: "iris".to_string(),
        features,
        labels,
    })
}

/// Loads a Covertype-layout CSV (54 numeric columns + integer cover type),
/// keeps only rows whose label appears in `selected_classes` (remapped to
/// their position, e.g. [3, 5, 7] → {0, 1, 2}), and caps each class at
/// `per_class_cap` rows chosen by first occurrence under a seeded shuffle.
pub fn load_covertype(
    path: &Path,
    has_header: bool,
    selected_classes: &[u32; N_CLASSES],
    per_class_cap: usize,
    seed: u64,
) -> Result<Dataset> {
    let lines = read_lines(path)?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let skip = usize::from(has_header);
    for (i, line) in lines.iter().enumerate().skip(skip) {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 55 {
            return Err(Error::Format(format!(
                "{}:{row}: expected 55 columns, found {}",
                path.display(),
                cells.len()
            )));
        }
        let raw_label = cells[54].trim().parse::<u32>().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            row,
            message: format!("expected an integer label, found '{}'", cells[54].trim()),
        })?;
        let Some(label) = selected_classes.iter().position(|&c| c == raw_label) else {
            continue;
        };
        let mut x = Vec::with_capacity(54);
        for cell in &cells[..54] {
            x.push(parse_cell(path, row, cell)?);
        }
        features.push(x);
        labels.push(label);
    }

    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut seeded_rng(seed, STREAM_COVERTYPE_CAP));
    let mut taken = [0usize; N_CLASSES];
    let mut kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| {
            if taken[labels[i]] < per_class_cap {
                taken[labels[i]] += 1;
                true
            } else {
                false
            }
        })
        .collect();
    kept.sort_unstable();

    Ok(Dataset {
        name: "covertype".to_string(),
        features: kept.iter().map(|&i| features[i].clone()).collect(),
        labels: kept.iter().map(|&i| labels[i]).collect(),
    })
}

/// Mean vector and top-k principal axes of a feature matrix.
#[derive(Clone, Debug)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// k orthonormal rows, each of the original dimension.
    pub components: Vec<Vec<f64>>,
    /// Covariance eigenvalues for the kept components, non-increasing.
    pub explained_variance: Vec<f64>,
}

/// Fits PCA on `x` (training rows only): top-`k` eigenvectors of the sample
/// covariance of the mean-centered data, ordered by descending eigenvalue.
pub fn fit_pca(x: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    let n = x.len();
    if n <= k {
        return Err(Error::InvalidArgument(format!(
            "PCA needs more than {k} rows, got {n}"
        )));
    }
    let d = x[0].len();
    let mat = DMatrix::from_row_iterator(n, d, x.iter().flat_map(|r| r.iter().copied()));
    let mean = mat.row_mean();
    let centered = DMatrix::from_fn(n, d, |i, j| mat[(i, j)] - mean[j]);
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let max_eig = eig.eigenvalues[order[0]].max(0.0);
    let rank = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] > max_eig * 1e-9)
        .count();
    if rank < k {
        return Err(Error::Numeric(format!(
            "covariance has rank {rank}, cannot extract {k} components"
        )));
    }

    let components = order[..k]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    let explained_variance = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    Ok(PcaModel {
        mean: mean.iter().copied().collect(),
        components,
        explained_variance,
    })
}

/// Projects rows onto the fitted components after centering.
pub fn transform_pca(model: &PcaModel, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mean = DVector::from_column_slice(&model.mean);
    x.iter()
        .map(|row| {
            let centered = DVector::from_column_slice(row) - &mean;
            model
                .components
                .iter()
                .map(|c| DVector::from_column_slice(c).dot(&centered))
                .collect()
        })
        .collect()
}

/// Per-column min/max fitted on training rows; transforms map min → 0 and
/// max → π, clamping anything outside the fitted range.
#[derive(Clone, Debug, PartialEq)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn fit_minmax(x: &[Vec<f64>]) -> Result<MinMaxScaler> {
    if x.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot fit scaler on empty data".to_string(),
        ));
    }
    let d = x[0].len();
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for row in x {
        for j in 0..d {
            min[j] = min[j].min(row[j]);
            max[j] = max[j].max(row[j]);
        }
    }
    for j in 0..d {
        if max[j] - min[j] < f64::EPSILON {
            return Err(Error::Numeric(format!(
                "column {j} is constant ({}); min–max scaling is undefined",
                min[j]
            )));
        }
    }
    Ok(MinMaxScaler { min, max })
}

impl MinMaxScaler {
    pub fn transform(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let scaled = PI * (v - self.min[j]) / (self.max[j] - self.min[j]);
                        scaled.clamp(0.0, PI)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Stratified, seeded, disjoint train/val/test split with fixed per-class
/// counts. Index lists come back sorted for stable manifests.
pub fn split(dataset: &Dataset, seed: u64, per_class: PerClassSplit) -> Result<SplitPartition> {
    let needed = per_class.train + per_class.val + per_class.test;
    let mut rng = seeded_rng(seed, STREAM_SPLIT);
    let mut partition = SplitPartition::default();
    for class in 0..N_CLASSES {
        let mut indices: Vec<usize> = (0..dataset.len())
            .filter(|&i| dataset.labels[i] == class)
            .collect();
        if indices.len() < needed {
            return Err(Error::InvalidArgument(format!(
                "class {class} has {} samples, split needs {needed}",
                indices.len()
            )));
        }
        indices.shuffle(&mut rng);
        partition.train.extend(&indices[..per_class.train]);
        partition
            .val
            .extend(&indices[per_class.train..per_class.train + per_class.val]);
        partition
            .test
            .extend(&indices[per_class.train + per_class.val..needed]);
    }
    partition.train.sort_unstable();
    partition.val.sort_unstable();
    partition.test.sort_unstable();
    Ok(partition)
}

/// Splits the training rows into the forget set F (labels equal to
/// `forget_class`) and the anchor set A (everything else), optionally
/// subsampling A per class to `anchor_fraction` of its size.
pub fn partition_forget_anchor(
    partition: &SplitPartition,
    dataset: &Dataset,
    forget_class: usize,
    anchor_fraction: f64,
    seed: u64,
) -> Result<SplitPartition> {
    if forget_class >= N_CLASSES {
        return Err(Error::InvalidArgument(format!(
            "forget class must be in 0..{N_CLASSES}, got {forget_class}"
        )));
    }
    if !(0.0 < anchor_fraction && anchor_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "anchor fraction must be in (0, 1], got {anchor_fraction}"
        )));
    }
    let forget: Vec<usize> = partition
        .train
        .iter()
        .copied()
        .filter(|&i| dataset.labels[i] == forget_class)
        .collect();
    if forget.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no training samples carry forget class {forget_class}"
        )));
    }

    let mut anchor = Vec::new();
    let mut rng = seeded_rng(seed, STREAM_ANCHOR_SUBSAMPLE);
    for class in (0..N_CLASSES).filter(|&c| c != forget_class) {
        let mut class_indices: Vec<usize> = partition
            .train
            .iter()
            .copied()
            .filter(|&i| dataset.labels[i] == class)
            .collect();
        if anchor_fraction < 1.0 {
            let keep = ((class_indices.len() as f64) * anchor_fraction).round() as usize;
            class_indices.shuffle(&mut rng);
            class_indices.truncate(keep.max(1));
        }
        anchor.extend(class_indices);
    }
    anchor.sort_unstable();

    Ok(SplitPartition {
        forget_class: Some(forget_class),
        forget,
        anchor,
        ..partition.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::io::Write;

    fn write_temp(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        (dir, path)
    }

    fn iris_path() -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/iris.csv")
    }

    #[test]
    fn iris_loads_150_rows_with_balanced_classes() {
        let dataset = load_iris(&iris_path(), false).unwrap();
        assert_eq!(dataset.len(), 150);
        assert_eq!(dataset.n_features(), 4);
        assert_eq!(dataset.class_counts(), [50, 50, 50]);
    }

    #[test]
    fn iris_species_map_to_fixed_labels() {
        let (_dir, path) = write_temp("1,2,3,4,setosa\n5,6,7,8,virginica\n1,1,1,1,Iris-versicolor\n");
        let dataset = load_iris(&path, false).unwrap();
        assert_eq!(dataset.labels, vec![0, 2, 1]);
    }

    #[test]
    fn iris_parse_error_names_the_row() {
        let (_dir, path) = write_temp("1,2,3,4,setosa\n1,oops,3,4,setosa\n");
        match load_iris(&path, false) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn iris_wrong_column_count_is_a_format_error() {
        let (_dir, path) = write_temp("1,2,3,setosa\n");
        assert!(matches!(load_iris(&path, false), Err(Error::Format(_))));
    }

    #[test]
    fn iris_header_skipped_when_flagged() {
        let (_dir, path) =
            write_temp("sepal_l,sepal_w,petal_l,petal_w,species\n1,2,3,4,setosa\n");
        let dataset = load_iris(&path, true).unwrap();
        assert_eq!(dataset.len(), 1);
    }

    fn covertype_row(label: u32, fill: f64) -> String {
        let mut cells: Vec<String> = (0..54).map(|j| format!("{}", fill + j as f64)).collect();
        cells.push(label.to_string());
        cells.join(",")
    }

    #[test]
    fn covertype_filters_and_remaps_labels() {
        let rows = [
            covertype_row(3, 0.0),
            covertype_row(4, 1.0),
            covertype_row(5, 2.0),
            covertype_row(7, 3.0),
            covertype_row(1, 4.0),
        ]
        .join("\n");
        let (_dir, path) = write_temp(&rows);
        let dataset = load_covertype(&path, false, &[3, 5, 7], 100, 0).unwrap();
        assert_eq!(dataset.len(), 3);
        assert_eq!(dataset.labels, vec![0, 1, 2]);
        assert_eq!(dataset.n_features(), 54);
    }

    #[test]
    fn covertype_cap_limits_each_class() {
        let rows: Vec<String> = (0..30)
            .map(|i| covertype_row(if i % 2 == 0 { 3 } else { 5 }, i as f64))
            .collect();
        let (_dir, path) = write_temp(&rows.join("\n"));
        let dataset = load_covertype(&path, false, &[3, 5, 7], 4, 11).unwrap();
        assert_eq!(dataset.class_counts(), [4, 4, 0]);
    }

    #[test]
    fn covertype_cap_selection_is_seeded() {
        let rows: Vec<String> = (0..40).map(|i| covertype_row(3, i as f64)).collect();
        let (_dir, path) = write_temp(&rows.join("\n"));
        let a = load_covertype(&path, false, &[3, 5, 7], 10, 5).unwrap();
        let b = load_covertype(&path, false, &[3, 5, 7], 10, 5).unwrap();
        let c = load_covertype(&path, false, &[3, 5, 7], 10, 6).unwrap();
        assert_eq!(a.features, b.features);
        assert_ne!(a.features, c.features);
    }

    fn random_matrix(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect()
    }

    #[test]
    fn pca_components_are_orthonormal() {
        let mut rng = seeded_rng(31, 99);
        let x = random_matrix(&mut rng, 10, 54);
        let model = fit_pca(&x, 4).unwrap();
        for (i, a) in model.components.iter().enumerate() {
            for (j, b) in model.components.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dot - expected).abs() < 1e-10,
                    "components {i},{j}: dot = {dot}"
                );
            }
        }
    }

    #[test]
    fn pca_projection_variance_equals_eigenvalue() {
        let mut rng = seeded_rng(37, 99);
        let x = random_matrix(&mut rng, 10, 54);
        let model = fit_pca(&x, 4).unwrap();
        let projected = transform_pca(&model, &x);
        let n = projected.len() as f64;
        for c in 0..4 {
            let mean: f64 = projected.iter().map(|r| r[c]).sum::<f64>() / n;
            let var: f64 =
                projected.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!(
                (var - model.explained_variance[c]).abs() < 1e-8,
                "component {c}: variance {var} vs eigenvalue {}",
                model.explained_variance[c]
            );
        }
    }

    #[test]
    fn pca_explained_variance_is_non_increasing() {
        let mut rng = seeded_rng(41, 99);
        let x = random_matrix(&mut rng, 20, 54);
        let model = fit_pca(&x, 4).unwrap();
        for w in model.explained_variance.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn pca_transformed_training_rows_are_centered() {
        let mut rng = seeded_rng(43, 99);
        let x = random_matrix(&mut rng, 15, 54);
        let model = fit_pca(&x, 4).unwrap();
        let projected = transform_pca(&model, &x);
        for c in 0..4 {
            let mean: f64 = projected.iter().map(|r| r[c]).sum::<f64>() / 15.0;
            assert!(mean.abs() < 1e-10, "component {c} mean {mean}");
        }
    }

    #[test]
    fn pca_reports_deficient_rank() {
        // Only three varying dimensions → covariance rank 3 < 4 components.
        let mut rng = seeded_rng(47, 99);
        let x: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                let mut row = vec![1.5; 54];
                for slot in row.iter_mut().take(3) {
                    *slot = rng.gen_range(-2.0..2.0);
                }
                row
            })
            .collect();
        match fit_pca(&x, 4) {
            Err(Error::Numeric(msg)) => assert!(msg.contains("rank 3"), "{msg}"),
            other => panic!("expected rank error, got {other:?}"),
        }
    }

    #[test]
    fn pca_rejects_too_few_rows() {
        let x = vec![vec![0.0; 54]; 4];
        assert!(matches!(fit_pca(&x, 4), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn minmax_maps_training_extremes_to_zero_and_pi() {
        let x = vec![vec![1.0, -3.0], vec![5.0, 7.0], vec![3.0, 2.0]];
        let scaler = fit_minmax(&x).unwrap();
        let scaled = scaler.transform(&x);
        assert_eq!(scaled[0][0], 0.0);
        assert_eq!(scaled[1][0], PI);
        assert_eq!(scaled[0][1], 0.0);
        assert_eq!(scaled[1][1], PI);
        for row in &scaled {
            for &v in row {
                assert!((0.0..=PI).contains(&v));
            }
        }
    }

    #[test]
    fn minmax_clamps_out_of_range_values() {
        let train = vec![vec![0.0], vec![10.0]];
        let scaler = fit_minmax(&train).unwrap();
        let scaled = scaler.transform(&[vec![-5.0], vec![15.0]]);
        assert_eq!(scaled[0][0], 0.0);
        assert_eq!(scaled[1][0], PI);
    }

    #[test]
    fn minmax_rejects_constant_columns() {
        let x = vec![vec![2.0, 1.0], vec![2.0, 3.0]];
        assert!(matches!(fit_minmax(&x), Err(Error::Numeric(_))));
    }

    #[test]
    fn minmax_refit_on_train_reproduces_stats() {
        let mut rng = seeded_rng(53, 99);
        let x = random_matrix(&mut rng, 12, 4);
        let first = fit_minmax(&x).unwrap();
        let second = fit_minmax(&x).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn split_respects_per_class_counts_and_disjointness() {
        let dataset = load_iris(&iris_path(), false).unwrap();
        let per_class = PerClassSplit {
            train: 35,
            val: 10,
            test: 5,
        };
        let partition = split(&dataset, 42, per_class).unwrap();
        assert_eq!(partition.train.len(), 105);
        assert_eq!(partition.val.len(), 30);
        assert_eq!(partition.test.len(), 15);

        let mut all: Vec<usize> = partition
            .train
            .iter()
            .chain(&partition.val)
            .chain(&partition.test)
            .copied()
            .collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 150);

        for class in 0..3 {
            let in_train = partition
                .train
                .iter()
                .filter(|&&i| dataset.labels[i] == class)
                .count();
            assert_eq!(in_train, 35);
        }
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let dataset = load_iris(&iris_path(), false).unwrap();
        let per_class = PerClassSplit {
            train: 35,
            val: 10,
            test: 5,
        };
        let a = split(&dataset, 7, per_class).unwrap();
        let b = split(&dataset, 7, per_class).unwrap();
        let c = split(&dataset, 8, per_class).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.val, b.val);
        assert_eq!(a.test, b.test);
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn split_errors_when_class_is_too_small() {
        let dataset = load_iris(&iris_path(), false).unwrap();
        let per_class = PerClassSplit {
            train: 40,
            val: 10,
            test: 5,
        };
        match split(&dataset, 1, per_class) {
            Err(Error::InvalidArgument(msg)) => {
                assert!(msg.contains("50") && msg.contains("55"), "{msg}")
            }
            other => panic!("expected size error, got {other:?}"),
        }
    }

    #[test]
    fn forget_anchor_partition_covers_training_set() {
        let dataset = load_iris(&iris_path(), false).unwrap();
        let per_class = PerClassSplit {
            train: 35,
            val: 10,
            test: 5,
        };
        let base = split(&dataset, 42, per_class).unwrap();
        let partition = partition_forget_anchor(&base, &dataset, 2, 1.0, 42).unwrap();
        assert_eq!(partition.forget.len(), 35);
        assert_eq!(partition.anchor.len(), 70);
        assert!(partition.forget.iter().all(|i| !partition.anchor.contains(i)));

        let mut union: Vec<usize> = partition
            .forget
            .iter()
            .chain(&partition.anchor)
            .copied()
            .collect();
        union.sort_unstable();
        assert_eq!(union, partition.train);
        assert!(partition.forget.iter().all(|&i| dataset.labels[i] == 2));
    }

    #[test]
    fn anchor_subsampling_preserves_class_balance() {
        let dataset = load_iris(&iris_path(), false).unwrap();
        let per_class = PerClassSplit {
            train: 35,
            val: 10,
            test: 5,
        };
        let base = split(&dataset, 42, per_class).unwrap();
        let partition = partition_forget_anchor(&base, &dataset, 2, 0.5, 42).unwrap();
        let counts: Vec<usize> = (0..2)
            .map(|c| {
                partition
                    .anchor
                    .iter()
                    .filter(|&&i| dataset.labels[i] == c)
                    .count()
            })
            .collect();
        assert_eq!(partition.anchor.len(), counts.iter().sum::<usize>());
        assert!((counts[0] as i64 - counts[1] as i64).abs() <= 1);
        assert!((17..=18).contains(&counts[0]));
    }

    #[test]
    fn forget_partition_rejects_missing_class() {
        let dataset = Dataset {
            name: "toy".to_string(),
            features: vec![vec![0.0; 4]; 4],
            labels: vec![0, 0, 1, 1],
        };
        let base = SplitPartition {
            train: vec![0, 1, 2, 3],
            ..SplitPartition::default()
        };
        assert!(partition_forget_anchor(&base, &dataset, 2, 1.0, 0).is_err());
    }
}
