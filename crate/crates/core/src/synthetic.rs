//! Seeded toy vocabularies with a known gender axis, for tests and benchmarks.
//!
//! Male words sit around `+0.4 e1` and female words are their exact mirror
//! images. Orthogonal jitter comes in `±` pairs, so both cluster means lie
//! on the first axis and the gender-neutral hyperplane is `x1 = 0`. Neutral
//! words are placed a few degrees off that hyperplane.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embedding::{EmbeddingSet, Space};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub dim: usize,
    pub neutral_words: usize,
    /// Words per gender cluster; rounded up to an even count.
    pub cluster_size: usize,
    /// Euclidean norm range of the neutral words.
    pub norm_range: (f64, f64),
    /// Range of the angle, in degrees, between a neutral word and the
    /// neutral hyperplane. The side is chosen at random.
    pub tilt_degrees: (f64, f64),
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            dim: 10,
            neutral_words: 80,
            cluster_size: 10,
            norm_range: (0.05, 0.2),
            tilt_degrees: (2.0, 10.0),
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticVocabulary {
    /// Partitioned: the gender words are marked specific.
    pub embedding: EmbeddingSet,
    pub male_words: Vec<String>,
    pub female_words: Vec<String>,
    pub neutral_words: Vec<String>,
}

fn unit_orthogonal_to_e1(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        u[0] = 0.0;
        let n = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 {
            u.iter_mut().for_each(|c| *c /= n);
            return u;
        }
    }
}

pub fn biased_vocabulary(spec: &SyntheticSpec) -> SyntheticVocabulary {
    assert!(spec.dim >= 2, "synthetic vocabularies need at least 2 dimensions");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::new();
    let mut male_words = Vec::new();
    let mut female_words = Vec::new();

    let pairs = spec.cluster_size.div_ceil(2);
    for p in 0..pairs {
        let radial = 0.4 + rng.gen_range(-0.03..0.03);
        let jitter: Vec<f64> = unit_orthogonal_to_e1(&mut rng, spec.dim)
            .into_iter()
            .map(|c| c * rng.gen_range(0.0..0.04))
            .collect();
        for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
            let mut m: Vec<f64> = jitter.iter().map(|c| sign * c).collect();
            m[0] = radial;
            let f: Vec<f64> = m.iter().map(|c| -c).collect();
            let idx = 2 * p + k;
            male_words.push(format!("male{idx}"));
            female_words.push(format!("female{idx}"));
            rows.push((format!("male{idx}"), m));
            rows.push((format!("female{idx}"), f));
        }
    }

    let mut neutral_words = Vec::with_capacity(spec.neutral_words);
    for i in 0..spec.neutral_words {
        let r = rng.gen_range(spec.norm_range.0..=spec.norm_range.1);
        let tilt = rng.gen_range(spec.tilt_degrees.0..=spec.tilt_degrees.1).to_radians();
        let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let u = unit_orthogonal_to_e1(&mut rng, spec.dim);
        let mut w: Vec<f64> = u.iter().map(|c| r * tilt.cos() * c).collect();
        w[0] = side * r * tilt.sin();
        let word = format!("word{i}");
        neutral_words.push(word.clone());
        rows.push((word, w));
    }

    let (mut embedding, _) = EmbeddingSet::from_rows(spec.dim, Space::Poincare, rows).expect("generated rows are valid");
    let specific: Vec<&String> = male_words.iter().chain(&female_words).collect();
    embedding.set_partition(&specific);
    SyntheticVocabulary {
        embedding,
        male_words,
        female_words,
        neutral_words,
    }
}
