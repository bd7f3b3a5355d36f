//! Distribution functions on `[0,1]` and their pseudo-inverses.

use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};

/// A nondecreasing right-continuous `F` on `[0,1]` with `F(1) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum DistributionFunction {
    /// `F(x) = x`.
    Uniform,
    /// Jumps at the points `numer[i] / denom` with integer weights; `cumulative`
    /// holds running weight totals.
    Step {
        numer: Vec<u64>,
        denom: u64,
        cumulative: Vec<u64>,
    },
}

impl DistributionFunction {
    /// Step function with jumps at `times[i] / m` of relative size `weights[i]`.
    pub fn grid_step(m: u64, times: Vec<u64>, weights: Vec<u64>) -> Result<Self> {
        if m == 0 || times.is_empty() || times.len() != weights.len() {
            return Err(Error::InvalidArgument(
                "step function needs a positive grid and one weight per point".into(),
            ));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) || *times.last().unwrap() > m {
            return Err(Error::InvalidArgument(
                "jump points must increase within [0,1]".into(),
            ));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        let cumulative = weights
            .iter()
            .scan(0u64, |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(Self::Step {
            numer: times,
            denom: m,
            cumulative,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Uniform => x.clamp(0.0, 1.0),
            Self::Step {
                numer,
                denom,
                cumulative,
            } => {
                let k = numer.partition_point(|&t| (t as f64 / *denom as f64) <= x);
                if k == 0 {
                    0.0
                } else {
                    cumulative[k - 1] as f64 / *cumulative.last().unwrap() as f64
                }
            }
        }
    }

    /// `F*(u) = inf { x in [0,1] : F(x) >= u }`.
    pub fn pseudo_inverse(&self, u: f64) -> f64 {
        match self {
            Self::Uniform => u.clamp(0.0, 1.0),
            Self::Step {
                numer,
                denom,
                cumulative,
            } => {
                if u <= 0.0 {
                    return 0.0;
                }
                let total = *cumulative.last().unwrap() as f64;
                let k = cumulative
                    .partition_point(|&c| (c as f64) < u * total)
                    .min(numer.len() - 1);
                numer[k] as f64 / *denom as f64
            }
        }
    }

    /// A draw with law `F`. Step functions are sampled exactly through an
    /// integer index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Uniform => rng.random::<f64>(),
            Self::Step {
                numer,
                denom,
                cumulative,
            } => {
                let r = rng.random_range(0..*cumulative.last().unwrap());
                let k = cumulative.partition_point(|&c| c <= r);
                numer[k] as f64 / *denom as f64
            }
        }
    }

    /// Index of the jump point drawn by [`Self::sample`], for step functions.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        match self {
            Self::Uniform => None,
            Self::Step { cumulative, .. } => {
                let r = rng.random_range(0..*cumulative.last().unwrap());
                Some(cumulative.partition_point(|&c| c <= r))
            }
        }
    }

    /// `sup_x |F(x) - x|`.
    pub fn sup_deviation_from_uniform(&self) -> f64 {
        let Self::Step {
            numer,
            denom,
            cumulative,
        } = self
        else {
            return 0.0;
        };
        let total = *cumulative.last().unwrap() as f64;
        let mut best = 0.0f64;
        let mut prev = 0.0;
        for (&t, &c) in numer.iter().zip(cumulative) {
            let x = t as f64 / *denom as f64;
            let f = c as f64 / total;
            best = best.max((prev - x).abs()).max((f - x).abs());
            prev = f;
        }
        best
    }

    /// Exact `sup_x |F(x) - x|` for step functions; `None` for the uniform law.
    pub fn sup_deviation_exact(&self) -> Option<Rational> {
        let Self::Step {
            numer,
            denom,
            cumulative,
        } = self
        else {
            return None;
        };
        // Between jumps F is constant, so the supremum is reached at a jump
        // point, either by F or by its left limit.
        let total = *cumulative.last().unwrap();
        let mut best = Rational::from_integer(BigInt::from(0));
        let mut prev = 0u64;
        for (&t, &c) in numer.iter().zip(cumulative) {
            let x = ratio(t, *denom);
            for f in [prev, c] {
                let d = (ratio(f, total) - &x).abs();
                if d > best {
                    best = d;
                }
            }
            prev = c;
        }
        Some(best)
    }
}
