//! Reference point sets: regular lattices, Halton, Sobol and seeded uniform
//! clouds in the unit hypercube.

use rand::Rng;

use super::{lab_rng, sobol_table};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Largest number of coordinates a generated grid may hold.
const GRID_BUDGET: usize = 1 << 28;

/// The `m^k` points of `{0, 1/(m-1), ..., 1}^k`, last coordinate varying
/// fastest.
pub fn regular_grid(m: usize, k: usize) -> Result<PointCloud> {
    if m < 2 {
        return Err(Error::invalid("grid needs at least 2 points per axis"));
    }
    if k == 0 {
        return Err(Error::invalid("grid dimension must be at least 1"));
    }
    let n = u32::try_from(k)
        .ok()
        .and_then(|k| m.checked_pow(k))
        .filter(|n| n.checked_mul(k).is_some_and(|c| c <= GRID_BUDGET))
        .ok_or(Error::SizeOverflow { m, k })?;
    let step = (m - 1) as f64;
    let mut data = Vec::with_capacity(n * k);
    let mut digits = vec![0usize; k];
    for _ in 0..n {
        data.extend(digits.iter().map(|&d| d as f64 / step));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < m {
                break;
            }
            *d = 0;
        }
    }
    PointCloud::from_flat(n, k, data)
}

fn check_size(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if k == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    Ok(())
}

/// First `k` primes.
fn primes(k: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(k);
    let mut c = 2u64;
    while out.len() < k {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton points with indices `1..=n`, coordinate `j` in base `prime(j)`.
pub fn halton(n: usize, k: usize) -> Result<PointCloud> {
    check_size(n, k)?;
    let bases = primes(k);
    let data = (1..=n as u64)
        .flat_map(|i| bases.iter().map(move |&b| radical_inverse(i, b)))
        .collect();
    PointCloud::from_flat(n, k, data)
}

/// Highest Sobol dimension supported by the built-in direction numbers.
pub const SOBOL_MAX_DIM: usize = sobol_table::MAX_DIM;

const SOBOL_BITS: usize = 32;

fn sobol_directions(dim: usize) -> [u32; SOBOL_BITS] {
    let mut v = [0u32; SOBOL_BITS];
    if dim == 0 {
        for (i, v) in v.iter_mut().enumerate() {
            *v = 1 << (31 - i);
        }
        return v;
    }
    let (s, a, m) = sobol_table::DIRECTIONS[dim - 1];
    let s = s as usize;
    for i in 0..s.min(SOBOL_BITS) {
        v[i] = m[i] << (31 - i);
    }
    for i in s..SOBOL_BITS {
        v[i] = v[i - s] ^ (v[i - s] >> s);
        for l in 1..s {
            if (a >> (s - 1 - l)) & 1 == 1 {
                v[i] ^= v[i - l];
            }
        }
    }
    v
}

/// First `n` Sobol points in Gray-code order, starting at the origin.
///
/// Matches the unscrambled output of the Joe & Kuo reference generator.
pub fn sobol(n: usize, k: usize) -> Result<PointCloud> {
    check_size(n, k)?;
    if k > SOBOL_MAX_DIM {
        return Err(Error::UnsupportedDimension {
            requested: k,
            max: SOBOL_MAX_DIM,
        });
    }
    if n as u64 > u32::MAX as u64 {
        return Err(Error::invalid("too many Sobol points for 32-bit directions"));
    }
    let dirs: Vec<[u32; SOBOL_BITS]> = (0..k).map(sobol_directions).collect();
    let scale = 1.0 / (1u64 << SOBOL_BITS) as f64;
    let mut x = vec![0u32; k];
    let mut data = Vec::with_capacity(n * k);
    data.extend(std::iter::repeat_n(0.0, k));
    for i in 1..n {
        let c = (i - 1).trailing_ones() as usize;
        for (xj, dj) in x.iter_mut().zip(&dirs) {
            *xj ^= dj[c];
        }
        data.extend(x.iter().map(|&v| v as f64 * scale));
    }
    PointCloud::from_flat(n, k, data)
}

/// `n` independent uniform points from the lab generator seeded with `seed`.
pub fn uniform_random(n: usize, k: usize, seed: u64) -> Result<PointCloud> {
    check_size(n, k)?;
    let mut rng = lab_rng(seed);
    let data = (0..n * k).map(|_| rng.random::<f64>()).collect();
    PointCloud::from_flat(n, k, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids() {
        assert_eq!(regular_grid(2, 1).unwrap().as_flat(), &[0.0, 1.0]);
        let g = regular_grid(3, 2).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.point(5), &[0.5, 1.0]);
        assert!(regular_grid(1, 2).is_err());
        assert!(matches!(regular_grid(1000, 10), Err(Error::SizeOverflow { .. })));
    }

    #[test]
    fn halton_base_two() {
        assert_eq!(halton(4, 1).unwrap().as_flat(), &[0.5, 0.25, 0.75, 0.125]);
        // base 3 in the second coordinate
        let h = halton(3, 2).unwrap();
        assert_eq!(h.column(1), vec![1.0 / 3.0, 2.0 / 3.0, 1.0 / 9.0]);
    }

    #[test]
    fn first_primes() {
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn sobol_rejects_large_dimension() {
        assert!(matches!(
            sobol(10, 99_999),
            Err(Error::UnsupportedDimension { requested: 99_999, .. })
        ));
        assert!(sobol(10, SOBOL_MAX_DIM).is_ok());
    }

    #[test]
    fn uniform_is_seeded() {
        assert_eq!(uniform_random(10, 3, 4).unwrap(), uniform_random(10, 3, 4).unwrap());
        assert_ne!(uniform_random(10, 3, 4).unwrap(), uniform_random(10, 3, 5).unwrap());
    }
}
