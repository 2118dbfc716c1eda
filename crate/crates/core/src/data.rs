//! Dataset ingestion: IDX-format parsing, 8x8 box resampling, benchmark
//! class selection, and a seeded synthetic generator for tests and CI.

use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Side length of the raw corpus images.
pub const IMAGE_SIDE: usize = 28;
/// Side length after resampling.
pub const OUT_SIDE: usize = 8;
/// Features per sample; one resampled image.
pub const N_FEATURES: usize = OUT_SIDE * OUT_SIDE;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// One classifier input: 64 features in [0, 1] plus a remapped label.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    features: Vec<f64>,
    label: usize,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: usize) -> Result<Self> {
        if features.len() != N_FEATURES {
            return Err(Error::data(format!(
                "sample has {} features, expected {}",
                features.len(),
                N_FEATURES
            )));
        }
        for (i, &f) in features.iter().enumerate() {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::data(format!("feature {i} = {f} outside [0, 1]")));
            }
        }
        Ok(Sample { features, label })
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn label(&self) -> usize {
        self.label
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Mnist,
    FashionMnist,
    Synthetic,
}

/// A labeled sample collection with a fixed class count.
#[derive(Debug, Clone)]
pub struct Dataset {
    samples: Vec<Sample>,
    n_classes: usize,
    provenance: Provenance,
    tag: String,
}

impl Dataset {
    pub fn new(
        samples: Vec<Sample>,
        n_classes: usize,
        provenance: Provenance,
        tag: impl Into<String>,
    ) -> Result<Self> {
        for (i, s) in samples.iter().enumerate() {
            if s.label >= n_classes {
                return Err(Error::data(format!(
                    "sample {i} has label {} but the dataset has {} classes",
                    s.label, n_classes
                )));
            }
        }
        Ok(Dataset {
            samples,
            n_classes,
            provenance,
            tag: tag.into(),
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }
}

/// Raw parsed IDX content: grayscale images plus labels.
#[derive(Debug, Clone)]
pub struct RawImages {
    pub n_rows: usize,
    pub n_cols: usize,
    pub images: Vec<Vec<u8>>,
    pub labels: Vec<u8>,
}

fn read_u32_be(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::parse(
            bytes.len(),
            format!("stream truncated while reading {what}"),
        ));
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

/// Parse an IDX image file and its label file (already gunzipped).
///
/// Validates the magic numbers, the dimension headers, exact payload length
/// (no trailing bytes) and count agreement between the two files, so any
/// single corrupted header byte is rejected rather than silently misread.
pub fn parse_idx(images_bytes: &[u8], labels_bytes: &[u8]) -> Result<RawImages> {
    let magic = read_u32_be(images_bytes, 0, "image magic")?;
    if magic != IMAGES_MAGIC {
        return Err(Error::parse(
            0,
            format!("bad image magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}"),
        ));
    }
    let n_images = read_u32_be(images_bytes, 4, "image count")? as usize;
    let n_rows = read_u32_be(images_bytes, 8, "row count")? as usize;
    let n_cols = read_u32_be(images_bytes, 12, "column count")? as usize;
    let pixels = n_rows * n_cols;
    let expected = 16 + n_images * pixels;
    if images_bytes.len() < expected {
        return Err(Error::parse(
            images_bytes.len(),
            format!(
                "image payload truncated: expected {expected} bytes, got {}",
                images_bytes.len()
            ),
        ));
    }
    if images_bytes.len() > expected {
        return Err(Error::parse(
            expected,
            format!(
                "{} trailing bytes after image payload",
                images_bytes.len() - expected
            ),
        ));
    }

    let magic = read_u32_be(labels_bytes, 0, "label magic")?;
    if magic != LABELS_MAGIC {
        return Err(Error::parse(
            0,
            format!("bad label magic {magic:#010x}, expected {LABELS_MAGIC:#010x}"),
        ));
    }
    let n_labels = read_u32_be(labels_bytes, 4, "label count")? as usize;
    let expected = 8 + n_labels;
    if labels_bytes.len() < expected {
        return Err(Error::parse(
            labels_bytes.len(),
            format!(
                "label payload truncated: expected {expected} bytes, got {}",
                labels_bytes.len()
            ),
        ));
    }
    if labels_bytes.len() > expected {
        return Err(Error::parse(
            expected,
            format!(
                "{} trailing bytes after label payload",
                labels_bytes.len() - expected
            ),
        ));
    }
    if n_labels != n_images {
        return Err(Error::parse(
            4,
            format!("image count {n_images} does not match label count {n_labels}"),
        ));
    }

    let images = (0..n_images)
        .map(|i| images_bytes[16 + i * pixels..16 + (i + 1) * pixels].to_vec())
        .collect();
    Ok(RawImages {
        n_rows,
        n_cols,
        images,
        labels: labels_bytes[8..8 + n_labels].to_vec(),
    })
}

/// Area-weighted (box) resampling of a 28x28 grayscale image down to 8x8,
/// scaled into [0, 1]. Output pixel (r, c) is the mean of the input over
/// the rectangle [r·3.5, (r+1)·3.5) x [c·3.5, (c+1)·3.5), with fractional
/// rows and columns weighted by their overlap. Mean-preserving by
/// construction.
pub fn resize_8x8(image: &[u8]) -> Vec<f64> {
    assert_eq!(image.len(), IMAGE_SIDE * IMAGE_SIDE, "input must be 28x28");
    let scale = IMAGE_SIDE as f64 / OUT_SIDE as f64;
    let denom = scale * scale * 255.0;
    let mut out = Vec::with_capacity(N_FEATURES);
    for r in 0..OUT_SIDE {
        let y0 = r as f64 * scale;
        let y1 = y0 + scale;
        for c in 0..OUT_SIDE {
            let x0 = c as f64 * scale;
            let x1 = x0 + scale;
            let mut acc = 0.0;
            for iy in y0.floor() as usize..(y1.ceil() as usize).min(IMAGE_SIDE) {
                let wy = y1.min(iy as f64 + 1.0) - y0.max(iy as f64);
                if wy <= 0.0 {
                    continue;
                }
                let row = &image[iy * IMAGE_SIDE..(iy + 1) * IMAGE_SIDE];
                for ix in x0.floor() as usize..(x1.ceil() as usize).min(IMAGE_SIDE) {
                    let wx = x1.min(ix as f64 + 1.0) - x0.max(ix as f64);
                    if wx > 0.0 {
                        acc += wy * wx * row[ix] as f64;
                    }
                }
            }
            out.push(acc / denom);
        }
    }
    out
}

/// The four paper benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    Mnist4,
    Mnist2,
    Fashion4,
    Fashion2,
}

impl Benchmark {
    /// Raw corpus labels kept, in remap order (position = new label).
    pub fn kept_classes(&self) -> &'static [u8] {
        match self {
            Benchmark::Mnist4 | Benchmark::Fashion4 => &[0, 1, 2, 3],
            // MNIST digits 3 and 6; Fashion-MNIST dress (3) and shirt (6).
            Benchmark::Mnist2 | Benchmark::Fashion2 => &[3, 6],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.kept_classes().len()
    }

    pub fn provenance(&self) -> Provenance {
        match self {
            Benchmark::Mnist4 | Benchmark::Mnist2 => Provenance::Mnist,
            Benchmark::Fashion4 | Benchmark::Fashion2 => Provenance::FashionMnist,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::Mnist4 => "mnist-4",
            Benchmark::Mnist2 => "mnist-2",
            Benchmark::Fashion4 => "fashion-4",
            Benchmark::Fashion2 => "fashion-2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mnist-4" => Ok(Benchmark::Mnist4),
            "mnist-2" => Ok(Benchmark::Mnist2),
            "fashion-4" => Ok(Benchmark::Fashion4),
            "fashion-2" => Ok(Benchmark::Fashion2),
            other => Err(Error::config(format!("unknown benchmark '{other}'"))),
        }
    }
}

fn select_split(
    raw: &RawImages,
    benchmark: Benchmark,
    limit_per_class: Option<usize>,
    split_name: &str,
) -> Result<Dataset> {
    if raw.n_rows != IMAGE_SIDE || raw.n_cols != IMAGE_SIDE {
        return Err(Error::data(format!(
            "{split_name} corpus is {}x{}, expected {IMAGE_SIDE}x{IMAGE_SIDE}",
            raw.n_rows, raw.n_cols
        )));
    }
    let kept = benchmark.kept_classes();
    let mut taken = vec![0usize; kept.len()];
    let mut samples = Vec::new();
    for (image, &label) in raw.images.iter().zip(&raw.labels) {
        let Some(new_label) = kept.iter().position(|&k| k == label) else {
            continue;
        };
        if let Some(limit) = limit_per_class {
            if taken[new_label] >= limit {
                continue;
            }
        }
        taken[new_label] += 1;
        samples.push(Sample::new(resize_8x8(image), new_label)?);
    }
    for (new_label, &count) in taken.iter().enumerate() {
        if count == 0 {
            return Err(Error::data(format!(
                "class {} (raw label {}) absent from the {split_name} corpus",
                new_label, kept[new_label]
            )));
        }
    }
    Dataset::new(
        samples,
        benchmark.n_classes(),
        benchmark.provenance(),
        benchmark.name(),
    )
}

/// Build a benchmark's train and test datasets from parsed corpus splits:
/// keep only the benchmark's classes, remap labels to 0..n-1 in listed
/// order, truncate each class to `limit_per_class` first occurrences, and
/// resample every image to 8x8.
pub fn make_benchmark(
    raw_train: &RawImages,
    raw_test: &RawImages,
    benchmark: Benchmark,
    limit_per_class: Option<usize>,
) -> Result<(Dataset, Dataset)> {
    let train = select_split(raw_train, benchmark, limit_per_class, "train")?;
    let test = select_split(raw_test, benchmark, limit_per_class, "test")?;
    Ok((train, test))
}

/// Seeded Gaussian blobs in feature space: each class gets a random mean
/// pattern, samples are mean + N(0, sigma) clipped to [0, 1], split 80/20
/// into train and test.
pub fn synthetic_blobs(
    seed: u64,
    n_per_class: usize,
    n_classes: usize,
    sigma: f64,
) -> Result<(Dataset, Dataset)> {
    if n_classes == 0 || n_classes > 8 {
        return Err(Error::config(format!(
            "synthetic blobs support 1..=8 classes, got {n_classes}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..N_FEATURES).map(|_| rng.gen_range(0.2..0.8)).collect())
        .collect();

    // Box-Muller; two uniforms per normal draw keeps the stream simple.
    let mut normal = |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };

    let n_train = n_per_class * 4 / 5;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mean) in means.iter().enumerate() {
        for i in 0..n_per_class {
            let features: Vec<f64> = mean
                .iter()
                .map(|&m| (m + sigma * normal(&mut rng)).clamp(0.0, 1.0))
                .collect();
            let sample = Sample::new(features, label)?;
            if i < n_train {
                train.push(sample);
            } else {
                test.push(sample);
            }
        }
    }
    let tag = format!("synthetic-{n_classes}");
    Ok((
        Dataset::new(train, n_classes, Provenance::Synthetic, tag.clone())?,
        Dataset::new(test, n_classes, Provenance::Synthetic, tag)?,
    ))
}

fn read_maybe_gzipped(path: &Path) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b {
        let mut decoder = flate2::read::GzDecoder::new(&bytes[..]);
        let mut out = Vec::new();
        decoder.read_to_end(&mut out)?;
        Ok(out)
    } else {
        Ok(bytes)
    }
}

/// Load an IDX image/label file pair, transparently gunzipping either file.
pub fn load_idx_pair(images_path: &Path, labels_path: &Path) -> Result<RawImages> {
    let images = read_maybe_gzipped(images_path)?;
    let labels = read_maybe_gzipped(labels_path)?;
    parse_idx(&images, &labels)
}

fn find_split_file(dir: &Path, stem: &str) -> Result<std::path::PathBuf> {
    for name in [format!("{stem}.gz"), stem.to_string()] {
        let candidate = dir.join(&name);
        if candidate.exists() {
            return Ok(candidate);
        }
    }
    Err(Error::data(format!(
        "neither {stem} nor {stem}.gz found in {}",
        dir.display()
    )))
}

/// Load the canonical train/test IDX pairs (optionally gzipped) from a
/// corpus directory laid out with the standard file names.
pub fn load_corpus(dir: &Path) -> Result<(RawImages, RawImages)> {
    let train = load_idx_pair(
        &find_split_file(dir, "train-images-idx3-ubyte")?,
        &find_split_file(dir, "train-labels-idx1-ubyte")?,
    )?;
    let test = load_idx_pair(
        &find_split_file(dir, "t10k-images-idx3-ubyte")?,
        &find_split_file(dir, "t10k-labels-idx1-ubyte")?,
    )?;
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Build IDX fixture bytes for the given images and labels.
    pub fn idx_fixture(images: &[Vec<u8>], labels: &[u8], rows: usize, cols: usize) -> (Vec<u8>, Vec<u8>) {
        let mut img = Vec::new();
        img.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        img.extend_from_slice(&(images.len() as u32).to_be_bytes());
        img.extend_from_slice(&(rows as u32).to_be_bytes());
        img.extend_from_slice(&(cols as u32).to_be_bytes());
        for image in images {
            assert_eq!(image.len(), rows * cols);
            img.extend_from_slice(image);
        }
        let mut lab = Vec::new();
        lab.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        lab.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        lab.extend_from_slice(labels);
        (img, lab)
    }

    fn gradient_image() -> Vec<u8> {
        (0..IMAGE_SIDE * IMAGE_SIDE).map(|i| (i % 256) as u8).collect()
    }

    #[test]
    fn magic_constants_match_the_format() {
        assert_eq!(IMAGES_MAGIC, 0x00000803);
        assert_eq!(LABELS_MAGIC, 0x00000801);
    }

    #[test]
    fn fixture_round_trips_exactly() {
        let images = vec![vec![7u8; 784], gradient_image()];
        let labels = vec![3u8, 6u8];
        let (img, lab) = idx_fixture(&images, &labels, IMAGE_SIDE, IMAGE_SIDE);
        let raw = parse_idx(&img, &lab).unwrap();
        assert_eq!(raw.n_rows, IMAGE_SIDE);
        assert_eq!(raw.n_cols, IMAGE_SIDE);
        assert_eq!(raw.images, images);
        assert_eq!(raw.labels, labels);
    }

    #[test]
    fn header_byte_flips_are_rejected() {
        let images = vec![vec![1u8; 784], vec![2u8; 784]];
        let (img, lab) = idx_fixture(&images, &[0, 1], IMAGE_SIDE, IMAGE_SIDE);
        for i in 0..16 {
            let mut corrupted = img.clone();
            corrupted[i] ^= 0xFF;
            assert!(
                matches!(parse_idx(&corrupted, &lab), Err(Error::Parse { .. })),
                "image header byte {i} corruption was accepted"
            );
        }
        for i in 0..8 {
            let mut corrupted = lab.clone();
            corrupted[i] ^= 0xFF;
            assert!(
                matches!(parse_idx(&img, &corrupted), Err(Error::Parse { .. })),
                "label header byte {i} corruption was accepted"
            );
        }
    }

    #[test]
    fn count_mismatch_between_files_is_rejected() {
        let images = vec![vec![1u8; 784], vec![2u8; 784]];
        let (img, _) = idx_fixture(&images, &[0, 1], IMAGE_SIDE, IMAGE_SIDE);
        let (_, lab_three) = idx_fixture(&images, &[0, 1, 1], IMAGE_SIDE, IMAGE_SIDE);
        let err = parse_idx(&img, &lab_three).unwrap_err();
        assert!(matches!(err, Error::Parse { offset: 4, .. }), "{err}");
    }

    #[test]
    fn truncated_and_padded_payloads_are_rejected() {
        let images = vec![vec![1u8; 784]];
        let (img, lab) = idx_fixture(&images, &[0], IMAGE_SIDE, IMAGE_SIDE);
        assert!(parse_idx(&img[..img.len() - 1], &lab).is_err());
        let mut padded = img.clone();
        padded.push(0);
        assert!(parse_idx(&padded, &lab).is_err());
    }

    #[test]
    fn resize_constant_image() {
        for v in [0u8, 128, 255] {
            let out = resize_8x8(&vec![v; 784]);
            for o in out {
                assert!((o - v as f64 / 255.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resize_one_hot_corner_pixel() {
        // Cell (0,0) covers [0,3.5)x[0,3.5); a unit pixel contributes
        // 1/(3.5*3.5) of full brightness to it and nothing anywhere else.
        let mut image = vec![0u8; 784];
        image[0] = 255;
        let out = resize_8x8(&image);
        assert!((out[0] - 1.0 / 12.25).abs() < 1e-12);
        for &o in &out[1..] {
            assert_eq!(o, 0.0);
        }
    }

    #[test]
    fn resize_preserves_mean_intensity() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let image: Vec<u8> = (0..784).map(|_| rng.gen()).collect();
            let out = resize_8x8(&image);
            let in_mean = image.iter().map(|&v| v as f64 / 255.0).sum::<f64>() / 784.0;
            let out_mean = out.iter().sum::<f64>() / 64.0;
            assert!((in_mean - out_mean).abs() <= 1e-9);
        }
    }

    fn corpus_fixture(labels: &[u8]) -> RawImages {
        let images = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| vec![(i * 10 + l as usize) as u8; 784])
            .collect();
        RawImages {
            n_rows: IMAGE_SIDE,
            n_cols: IMAGE_SIDE,
            images,
            labels: labels.to_vec(),
        }
    }

    #[test]
    fn benchmark_remaps_labels_in_listed_order() {
        let train = corpus_fixture(&[3, 6, 0, 3, 9, 6, 6]);
        let test = corpus_fixture(&[6, 3]);
        let (train_ds, test_ds) = make_benchmark(&train, &test, Benchmark::Mnist2, None).unwrap();
        // Raw 3 -> 0, raw 6 -> 1; other classes dropped.
        let labels: Vec<usize> = train_ds.samples().iter().map(|s| s.label()).collect();
        assert_eq!(labels, vec![0, 1, 0, 1, 1]);
        assert_eq!(test_ds.samples().iter().map(|s| s.label()).collect::<Vec<_>>(), vec![1, 0]);
        assert_eq!(train_ds.n_classes(), 2);
    }

    #[test]
    fn benchmark_limit_truncates_per_class_in_corpus_order() {
        let labels: Vec<u8> = (0..40).map(|i| (i % 4) as u8).collect();
        let raw = corpus_fixture(&labels);
        let (train_ds, _) = make_benchmark(&raw, &raw, Benchmark::Mnist4, Some(3)).unwrap();
        assert_eq!(train_ds.len(), 12);
        for class in 0..4 {
            assert_eq!(
                train_ds.samples().iter().filter(|s| s.label() == class).count(),
                3
            );
        }
        // First occurrences win: sample features encode corpus position.
        let first = &train_ds.samples()[0];
        assert!((first.features()[0] - 0.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn benchmark_missing_class_is_an_error() {
        let raw = corpus_fixture(&[3, 3, 3]);
        assert!(matches!(
            make_benchmark(&raw, &raw, Benchmark::Mnist2, None),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn fashion2_keeps_dress_and_shirt_labels() {
        assert_eq!(Benchmark::Fashion2.kept_classes(), &[3, 6]);
        assert_eq!(Benchmark::Fashion2.provenance(), Provenance::FashionMnist);
    }

    #[test]
    fn synthetic_blobs_are_deterministic_and_in_range() {
        let (train_a, test_a) = synthetic_blobs(42, 50, 4, 0.1).unwrap();
        let (train_b, test_b) = synthetic_blobs(42, 50, 4, 0.1).unwrap();
        assert_eq!(train_a.samples(), train_b.samples());
        assert_eq!(test_a.samples(), test_b.samples());
        assert_eq!(train_a.len(), 160);
        assert_eq!(test_a.len(), 40);
        for s in train_a.samples().iter().chain(test_a.samples()) {
            assert!(s.features().iter().all(|&f| (0.0..=1.0).contains(&f)));
        }
        let (train_c, _) = synthetic_blobs(43, 50, 4, 0.1).unwrap();
        assert_ne!(train_a.samples(), train_c.samples());
    }

    #[test]
    fn tight_blobs_are_separable_by_nearest_centroid() {
        // sigma = 0.01 makes classes essentially disjoint; a centroid
        // classifier must be perfect.
        let (train, test) = synthetic_blobs(9, 100, 2, 0.01).unwrap();
        let mut centroids = vec![vec![0.0; N_FEATURES]; 2];
        let mut counts = [0usize; 2];
        for s in train.samples() {
            counts[s.label()] += 1;
            for (c, f) in centroids[s.label()].iter_mut().zip(s.features()) {
                *c += f;
            }
        }
        for (centroid, count) in centroids.iter_mut().zip(counts) {
            for c in centroid.iter_mut() {
                *c /= count as f64;
            }
        }
        let correct = test
            .samples()
            .iter()
            .filter(|s| {
                let d: Vec<f64> = centroids
                    .iter()
                    .map(|c| {
                        c.iter()
                            .zip(s.features())
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                    })
                    .collect();
                let pred = if d[0] <= d[1] { 0 } else { 1 };
                pred == s.label()
            })
            .count();
        assert_eq!(correct, test.len());
    }

    #[test]
    fn synthetic_rejects_too_many_classes() {
        assert!(matches!(
            synthetic_blobs(1, 10, 9, 0.1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn gzip_round_trip_through_parse() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        use std::io::Write;

        let images = vec![gradient_image()];
        let (img, lab) = idx_fixture(&images, &[5], IMAGE_SIDE, IMAGE_SIDE);
        let dir = std::env::temp_dir().join(format!("qmoe-idx-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let img_path = dir.join("images.gz");
        let lab_path = dir.join("labels");
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(&img).unwrap();
        std::fs::write(&img_path, enc.finish().unwrap()).unwrap();
        std::fs::write(&lab_path, &lab).unwrap();

        let raw = load_idx_pair(&img_path, &lab_path).unwrap();
        assert_eq!(raw.images[0], images[0]);
        assert_eq!(raw.labels, vec![5]);
        std::fs::remove_dir_all(&dir).ok();
    }
}
