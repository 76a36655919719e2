//! Synthetic outcome matrices.
//!
//! Outcomes are drawn in integer micro-units (1e-6), so they are written to
//! CSV exactly and round-trip exactly through the default cost scale:
//!
//! ```text
//! Y[i][j] = base[i] + effect[j] + 2 h (a[i] b[j] + noise[i][j])
//! base ~ U[0, 10], effect, a, b, noise ~ U[-1, 1]
//! ```
//!
//! With heterogeneity `h = 0` every recipient ranks the treatments the same
//! way. Larger `h` adds recipient-specific gains, up to `h = 1`.
//!
//! All draws come from `ChaCha8Rng::seed_from_u64(seed)` on stream 0 in the
//! order base, effect, a, b, noise (row-major). Baselines use stream 1.

use allocflow_core::{Allocation, ProblemInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MICRO: i64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub treatments: usize,
    pub recipients: usize,
    pub heterogeneity: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub treatments: usize,
    pub recipients: usize,
    /// Outcomes in micro-units, row-major.
    pub micro: Vec<i64>,
}

pub fn generate(params: &GenParams) -> Result<Generated, String> {
    let GenParams { treatments: n1, recipients: n2, heterogeneity: h, seed } = *params;
    if n1 == 0 {
        return Err("at least one treatment is required".into());
    }
    if !(0.0..=1.0).contains(&h) {
        return Err(format!("heterogeneity must lie in [0, 1], got {h}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: i64, hi: i64, n: usize| -> Vec<i64> { (0..n).map(|_| rng.random_range(lo..=hi)).collect() };
    let base = draw(0, 10 * MICRO, n2);
    let effect = draw(-MICRO, MICRO, n1);
    let a = draw(-MICRO, MICRO, n2);
    let b = draw(-MICRO, MICRO, n1);
    let noise = draw(-MICRO, MICRO, n1 * n2);

    let unit = MICRO as f64;
    let mut micro = Vec::with_capacity(n1 * n2);
    for i in 0..n2 {
        for j in 0..n1 {
            let interaction = (a[i] as f64 / unit) * (b[j] as f64 / unit) + noise[i * n1 + j] as f64 / unit;
            micro.push(base[i] + effect[j] + (2.0 * h * interaction * unit).round() as i64);
        }
    }
    Ok(Generated { treatments: n1, recipients: n2, micro })
}

pub fn format_micro(v: i64) -> String {
    let sign = if v < 0 { "-" } else { "" };
    let abs = v.unsigned_abs();
    format!("{sign}{}.{:06}", abs / MICRO as u64, abs % MICRO as u64)
}

impl Generated {
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.micro.chunks(self.treatments.max(1)).map(|r| r.iter().map(|&v| v as f64 / MICRO as f64).collect()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.micro.len() * 12);
        for row in self.micro.chunks(self.treatments) {
            let line: Vec<String> = row.iter().map(|&v| format_micro(v)).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn instance(&self, capacities: Vec<i64>, cost_scale: i64) -> allocflow_core::Result<ProblemInstance> {
        ProblemInstance::new(&self.rows(), capacities, cost_scale)
    }
}

/// A uniformly shuffled feasible allocation, or `None` if capacities fall short.
pub fn random_baseline(capacities: &[i64], recipients: usize, seed: u64) -> Option<Allocation> {
    let mut slots: Vec<usize> =
        capacities.iter().enumerate().flat_map(|(j, &m)| std::iter::repeat_n(j, m.max(0) as usize)).collect();
    if slots.len() < recipients {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    slots.shuffle(&mut rng);
    slots.truncate(recipients);
    Some(Allocation::new(slots))
}

/// `ceil(recipients * slack / treatments)`, at least 1.
pub fn slack_capacity(treatments: usize, recipients: usize, slack: f64) -> i64 {
    ((recipients as f64 * slack / treatments as f64).ceil() as i64).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn micro_formatting() {
        assert_eq!(format_micro(0), "0.000000");
        assert_eq!(format_micro(1_500_000), "1.500000");
        assert_eq!(format_micro(-25), "-0.000025");
        assert_eq!(format_micro(-12_345_678), "-12.345678");
    }

    #[test]
    fn shape_and_determinism() {
        let p = GenParams { treatments: 3, recipients: 5, heterogeneity: 0.5, seed: 11 };
        let g = generate(&p).unwrap();
        assert_eq!(g.rows().len(), 5);
        assert!(g.rows().iter().all(|r| r.len() == 3));
        assert_eq!(g.to_csv(), generate(&p).unwrap().to_csv());
        assert_ne!(g, generate(&GenParams { seed: 12, ..p }).unwrap());
        assert!(generate(&GenParams { heterogeneity: 1.5, ..p }).is_err());
        assert!(generate(&GenParams { treatments: 0, ..p }).is_err());
    }

    #[test]
    fn csv_parses_back_exactly() {
        let g = generate(&GenParams { treatments: 4, recipients: 6, heterogeneity: 1.0, seed: 3 }).unwrap();
        let rows = crate::input::parse_matrix(g.to_csv().as_bytes(), "g").unwrap();
        assert_eq!(rows, g.rows());
    }

    #[test]
    fn zero_heterogeneity_is_additive() {
        let g = generate(&GenParams { treatments: 4, recipients: 6, heterogeneity: 0.0, seed: 3 }).unwrap();
        for i in 1..6 {
            let d0: Vec<i64> = (0..4).map(|j| g.micro[j] - g.micro[i * 4 + j]).collect();
            assert!(d0.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn baselines_respect_capacity() {
        let b = random_baseline(&[2, 0, 3], 4, 9).unwrap();
        assert_eq!(b.len(), 4);
        let loads = b.loads(3).unwrap();
        assert!(loads[0] <= 2 && loads[1] == 0 && loads[2] <= 3);
        assert!(random_baseline(&[1, 1], 3, 9).is_none());
    }
}
