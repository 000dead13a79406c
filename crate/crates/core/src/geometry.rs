//! Atomic positions built from tile words and their fluctuation statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perron::perron_data;
use crate::scalar::{linear_fit, Real};
use crate::substitution::{expand_word_capped, occurrence_matrix, SubstitutionRule, Word};

/// Atoms at the left endpoint of every tile, starting at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomChain<T> {
    pub positions: Vec<T>,
    pub tile_letters: Word,
    /// Length of each tile letter.
    pub tile_lengths: Vec<T>,
    pub total_length: T,
    pub mean_spacing: T,
}

impl<T: Real> AtomChain<T> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Cumulative tile lengths with compensated summation; the mean spacing is
/// `L / N`.
pub fn positions_from_word<T: Real>(word: &[u8], lengths: &[T]) -> Result<AtomChain<T>> {
    if lengths.iter().any(|&d| !(d > T::zero()) || !d.is_finite()) {
        return Err(Error::InvalidArgument("tile lengths must be positive".into()));
    }
    let mut positions = Vec::with_capacity(word.len());
    let mut sum = T::zero();
    let mut comp = T::zero();
    for &l in word {
        positions.push(sum);
        let d = *lengths
            .get(l as usize)
            .ok_or_else(|| Error::UnknownLetter(format!("#{l}")))?;
        let y = d - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let mean_spacing = if word.is_empty() { T::zero() } else { sum / T::from_usize_lossy(word.len()) };
    Ok(AtomChain {
        positions,
        tile_letters: word.to_vec(),
        tile_lengths: lengths.to_vec(),
        total_length: sum,
        mean_spacing,
    })
}

/// Perron tile lengths of a rule, one per tile letter.
pub fn perron_tile_lengths<T: Real>(rule: &SubstitutionRule) -> Result<(Vec<T>, T)> {
    let pd = perron_data::<T>(&occurrence_matrix(rule))?;
    let mut lengths = vec![T::zero(); rule.tile_alphabet().len()];
    for (letter, &tile) in rule.projection().iter().enumerate().rev() {
        lengths[tile as usize] = pd.lengths[letter];
    }
    Ok((lengths, pd.mean_length()))
}

/// The projected chain `σ^order(seed)` with Perron tile lengths and Perron
/// mean spacing.
pub fn chain_from_rule<T: Real>(rule: &SubstitutionRule, seed: u8, order: u32, cap: usize) -> Result<AtomChain<T>> {
    let (lengths, dbar) = perron_tile_lengths::<T>(rule)?;
    let word = rule.project(&expand_word_capped(rule, seed, order, cap)?);
    let mut chain = positions_from_word(&word, &lengths)?;
    chain.mean_spacing = dbar;
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluctuationStats<T> {
    /// `u_n = x_n − d̄ n`.
    pub u: Vec<T>,
    pub delta_u_raw: T,
    /// Raw width divided by `|d_a − d_b|`; NaN unless there are exactly two
    /// tiles of distinct length.
    pub delta_u: T,
    pub beta_fit: T,
    pub beta_residual: T,
}

pub const MIN_FLUCTUATION_ATOMS: usize = 16;

pub fn fluctuation_stats<T: Real>(chain: &AtomChain<T>, dbar: T) -> Result<FluctuationStats<T>> {
    let n = chain.len();
    if n < MIN_FLUCTUATION_ATOMS {
        return Err(Error::TooShort { got: n, need: MIN_FLUCTUATION_ATOMS });
    }
    let u: Vec<T> = chain.positions.iter().enumerate().map(|(i, &x)| x - dbar * T::from_usize_lossy(i)).collect();
    let (lo, hi) = u.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), &x| (a.min(x), b.max(x)));
    let raw = hi - lo;
    let delta_u = match chain.tile_lengths.as_slice() {
        [a, b] if (*a - *b).abs() > T::epsilon() => raw / (*a - *b).abs(),
        _ => T::nan(),
    };

    // running sup|u| sampled at dyadic m = 2^k, k ≥ 2
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut sup = T::zero();
    let mut next = 4usize;
    for (i, &x) in u.iter().enumerate() {
        sup = sup.max(x.abs());
        if i == next {
            if sup > T::zero() {
                xs.push(T::from_usize_lossy(i).ln());
                ys.push(sup.ln());
            }
            next *= 2;
        }
    }
    let (beta_fit, beta_residual) = if xs.len() >= 2 { linear_fit(&xs, &ys) } else { (T::zero(), T::zero()) };
    Ok(FluctuationStats { u, delta_u_raw: raw, delta_u, beta_fit, beta_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::DEFAULT_LENGTH_CAP;

    #[test]
    fn simple_positions() {
        let c = positions_from_word(&[0, 1], &[1.0, 1.0]).unwrap();
        assert_eq!(c.positions, vec![0.0, 1.0]);
        assert_eq!(c.total_length, 2.0);
        let c = positions_from_word(&[0, 0, 0], &[2.0]).unwrap();
        assert_eq!(c.positions, vec![0.0, 2.0, 4.0]);
        assert!(positions_from_word(&[0], &[0.0]).is_err());
    }

    #[test]
    fn fibonacci_order_four() {
        let tau = (1.0 + 5f64.sqrt()) / 2.0;
        let rule = SubstitutionRule::builtin("fibonacci").unwrap();
        let c: AtomChain<f64> = chain_from_rule(&rule, 0, 3, DEFAULT_LENGTH_CAP).unwrap();
        let expect = [0.0, tau, tau + 1.0, 2.0 * tau + 1.0, 3.0 * tau + 1.0];
        for (a, b) in c.positions.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let dbar = tau / tau + (1.0 - 1.0 / tau);
        assert!((c.mean_spacing - dbar).abs() < 1e-12);
    }

    #[test]
    fn periodic_no_fluctuation() {
        let w: Vec<u8> = (0..64).map(|i| (i % 2) as u8).collect();
        let c = positions_from_word(&w, &[1.0, 1.0]).unwrap();
        let s = fluctuation_stats(&c, 1.0f64).unwrap();
        assert!(s.u.iter().all(|&x| x == 0.0));
        assert_eq!(s.delta_u_raw, 0.0);
        assert!(s.delta_u.is_nan());
        let short = positions_from_word(&w[..8], &[1.0, 1.0]).unwrap();
        assert_eq!(fluctuation_stats(&short, 1.0), Err(Error::TooShort { got: 8, need: 16 }));
    }
}
