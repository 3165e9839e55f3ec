//! Synthetic datasets and query directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Zipf};
use rankaccess_core::{Dataset, ScoringVector};

use crate::error::{usage, Result};

/// Coordinate distribution for generated data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordDistribution {
    Uniform,
    /// Rank-power values: rank `k` drawn with `P(k) ∝ k^-s` over `[1, v]`,
    /// emitted as `k^-s`.
    Zipfian { s: f64, v: u64 },
}

impl std::str::FromStr for CoordDistribution {
    type Err = crate::BenchError;

    /// `uniform` or `zipfian:S,V`.
    fn from_str(text: &str) -> Result<Self> {
        if text == "uniform" {
            return Ok(CoordDistribution::Uniform);
        }
        let bad = || usage(format!("bad distribution {text:?} (expected uniform or zipfian:S,V)"));
        let rest = text.strip_prefix("zipfian:").ok_or_else(bad)?;
        let (s, v) = rest.split_once(',').ok_or_else(bad)?;
        let s: f64 = s.trim().parse().map_err(|_| bad())?;
        let v: u64 = v.trim().parse().map_err(|_| bad())?;
        Ok(CoordDistribution::Zipfian { s, v })
    }
}

impl std::fmt::Display for CoordDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoordDistribution::Uniform => write!(f, "uniform"),
            CoordDistribution::Zipfian { s, v } => write!(f, "zipfian:{s},{v}"),
        }
    }
}

fn check_shape(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(usage(format!("need n, d >= 1, got n = {n}, d = {d}")));
    }
    Ok(())
}

pub fn gen_zipfian(n: usize, d: usize, s: f64, v: u64, seed: u64) -> Result<Dataset> {
    check_shape(n, d)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(usage(format!("zipf exponent must be positive, got {s}")));
    }
    if v == 0 {
        return Err(usage("zipf support size must be at least 1"));
    }
    let zipf = Zipf::new(v, s).map_err(|e| usage(format!("zipf parameters: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n * d)
        .map(|_| {
            let k: f64 = zipf.sample(&mut rng);
            k.powf(-s)
        })
        .collect();
    Ok(Dataset::new(d, coords)?)
}

pub fn gen_uniform(n: usize, d: usize, seed: u64) -> Result<Dataset> {
    check_shape(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Dataset::new(d, (0..n * d).map(|_| rng.gen::<f64>()).collect())?)
}

pub fn generate(dist: CoordDistribution, n: usize, d: usize, seed: u64) -> Result<Dataset> {
    match dist {
        CoordDistribution::Uniform => gen_uniform(n, d, seed),
        CoordDistribution::Zipfian { s, v } => gen_zipfian(n, d, s, v, seed),
    }
}

/// `q` directions uniform on the unit sphere in `R^d`.
pub fn gen_directions(q: usize, d: usize, seed: u64) -> Result<Vec<ScoringVector>> {
    if d == 0 {
        return Err(usage("direction dimension must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(q);
    while out.len() < q {
        let w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        // An all-zero draw has probability zero but is cheap to skip.
        if let Ok(f) = rankaccess_core::normalize(&w) {
            out.push(f);
        }
    }
    Ok(out)
}
