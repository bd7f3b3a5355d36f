//! Summary statistics and chi-square tests.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Summary {
        count: n,
        mean,
        variance,
        std_error: (variance / n as f64).sqrt(),
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl ChiSquare {
    fn from_statistic(statistic: f64, df: usize) -> Self {
        let p_value = if df == 0 {
            1.0
        } else {
            ChiSquared::new(df as f64)
                .expect("positive degrees of freedom")
                .sf(statistic)
        };
        Self {
            statistic,
            df,
            p_value,
        }
    }

    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Goodness of fit of `observed` counts to the probabilities `expected`.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    ChiSquare::from_statistic(statistic, observed.len().saturating_sub(1))
}

/// Test that the rows of a contingency table share one distribution. Columns
/// that are empty in every row are dropped.
pub fn chi_square_homogeneity(rows: &[&[u64]]) -> ChiSquare {
    let cols = rows[0].len();
    let keep: Vec<usize> = (0..cols)
        .filter(|&c| rows.iter().any(|r| r[c] > 0))
        .collect();
    let row_tot: Vec<f64> = rows.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let total: f64 = row_tot.iter().sum();
    let mut statistic = 0.0;
    for &c in &keep {
        let col_tot: f64 = rows.iter().map(|r| r[c] as f64).sum();
        for (r, rt) in rows.iter().zip(&row_tot) {
            let e = rt * col_tot / total;
            statistic += (r[c] as f64 - e).powi(2) / e;
        }
    }
    let df = (rows.len() - 1) * keep.len().saturating_sub(1);
    ChiSquare::from_statistic(statistic, df)
}
