use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Independent stream for row `row` of a table seeded with `seed`, so rows
/// can be computed in any order with identical results.
pub fn stream_rng(seed: u64, row: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row);
    rng
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform point in the ball of radius `radius` about the origin.
pub fn in_ball(rng: &mut impl Rng, n: usize, radius: f64) -> Vec<f64> {
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / n as f64);
    unit_vector(rng, n).into_iter().map(|x| r * x).collect()
}
