//! Cell masses of the permuton of a permutation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rational::{ratio, Rational};

/// Masses of `μ_σ` on an `R × R` grid, stored as integer numerators over the
/// common denominator `n R²`. Row `r` is the band `y ∈ [r/R, (r+1)/R]`,
/// counted from the bottom; column `c` is the band `x ∈ [c/R, (c+1)/R]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermutonGrid {
    pub resolution: usize,
    pub denominator: u64,
    pub numerators: Vec<Vec<u64>>,
}

/// Length of `[a, a+la] ∩ [b, b+lb]`.
fn overlap(a: u64, la: u64, b: u64, lb: u64) -> u64 {
    (a + la).min(b + lb).saturating_sub(a.max(b))
}

/// Exact masses of `μ_σ`, which has density `n` on each square
/// `[(i-1)/n, i/n] × [(σ(i)-1)/n, σ(i)/n]`.
pub fn permuton_grid(sigma: &Permutation, resolution: usize) -> Result<PermutonGrid> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be at least 1".into()));
    }
    let n = sigma.size() as u64;
    let r = resolution as u64;
    let mut numerators = vec![vec![0u64; resolution]; resolution];
    // On the common scale n R, square i spans [R(i-1), R i] and cell c spans
    // [n c, n (c+1)]; the mass is the product of overlaps over n R².
    let cells = |lo: u64| (lo / n) as usize..=(((lo + r - 1) / n) as usize).min(resolution - 1);
    for (i, &v) in sigma.values().iter().enumerate() {
        let (x0, y0) = (r * i as u64, r * (v as u64 - 1));
        for c in cells(x0) {
            let ox = overlap(x0, r, n * c as u64, n);
            if ox == 0 {
                continue;
            }
            for row in cells(y0) {
                numerators[row][c] += ox * overlap(y0, r, n * row as u64, n);
            }
        }
    }
    Ok(PermutonGrid {
        resolution,
        denominator: n * r * r,
        numerators,
    })
}

impl PermutonGrid {
    pub fn cell(&self, row: usize, col: usize) -> Rational {
        ratio(self.numerators[row][col], self.denominator)
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.numerators
            .iter()
            .map(|row| ratio(row.iter().sum::<u64>(), self.denominator))
            .collect()
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.resolution)
            .map(|c| {
                let s: u64 = self.numerators.iter().map(|row| row[c]).sum();
                ratio(s, self.denominator)
            })
            .collect()
    }

    pub fn total(&self) -> Rational {
        let s: u64 = self.numerators.iter().flatten().sum();
        ratio(s, self.denominator)
    }

    /// Cell masses as floating-point values, bottom row first.
    pub fn densities(&self) -> Vec<Vec<f64>> {
        self.numerators
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| v as f64 / self.denominator as f64)
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::sample_separable;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Permutation {
        Permutation::parse_pattern(s).unwrap()
    }

    #[test]
    fn small_grids() {
        let g = permuton_grid(&p("1"), 1).unwrap();
        assert_eq!(g.cell(0, 0), ratio(1, 1));
        let g = permuton_grid(&p("12"), 2).unwrap();
        assert_eq!(g.cell(0, 0), ratio(1, 2));
        assert_eq!(g.cell(0, 1), ratio(0, 1));
        assert_eq!(g.cell(1, 0), ratio(0, 1));
        assert_eq!(g.cell(1, 1), ratio(1, 2));
        let g = permuton_grid(&p("21"), 2).unwrap();
        assert_eq!(g.cell(1, 0), ratio(1, 2));
        assert_eq!(g.cell(0, 1), ratio(1, 2));
    }

    #[test]
    fn fine_grid_splits_squares() {
        // One point of mass 1 spread over a 3 × 3 grid.
        let g = permuton_grid(&p("1"), 3).unwrap();
        for row in 0..3 {
            assert_eq!(g.row_sums()[row], ratio(1, 3));
            for c in 0..3 {
                assert_eq!(g.cell(row, c), ratio(1, 9));
            }
        }
        // 132 on 2 × 2: the squares of 3 and 2 straddle x = 1/2 and y = 1/2.
        let g = permuton_grid(&p("132"), 2).unwrap();
        assert_eq!(g.cell(0, 0), ratio(1, 3));
        assert_eq!(g.cell(1, 1), ratio(1, 3));
        assert_eq!(g.cell(0, 1), ratio(1, 6));
        assert_eq!(g.cell(1, 0), ratio(1, 6));
    }

    #[test]
    fn rejects_zero_resolution() {
        assert!(permuton_grid(&p("1"), 0).is_err());
    }

    proptest! {
        #[test]
        fn uniform_marginals(seed in any::<u64>(), n in 1usize..60, r in 1usize..12) {
            let sigma = sample_separable(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let g = permuton_grid(&sigma, r).unwrap();
            let band = ratio(1, r as u64);
            prop_assert!(g.row_sums().iter().all(|s| *s == band));
            prop_assert!(g.column_sums().iter().all(|s| *s == band));
            prop_assert_eq!(g.total(), ratio(1, 1));
        }
    }
}
