//! Cut-and-project sequences from the characteristic function
//! `χ(n) = sgn[cos(2πns + φ) − cos(πs)]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::substitution::Word;

/// Slope of the cut line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slope {
    /// `p/q` in lowest terms.
    Rational { p: i64, q: i64 },
    /// `(a + b√d) / c`.
    Quadratic { a: i64, b: i64, d: i64, c: i64 },
    Decimal(f64),
}

impl Slope {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = p.gcd(&q);
        let (p, q) = if q < 0 { (-p / g, -q / g) } else { (p / g, q / g) };
        Slope::Rational { p, q }.checked()
    }

    /// `1/τ = (√5 − 1)/2`.
    pub fn inverse_golden() -> Self {
        Slope::Quadratic { a: -1, b: 1, d: 5, c: 2 }
    }

    fn checked(self) -> Result<Self> {
        let v = self.value();
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidArgument(format!("slope {v} outside (0,1)")));
        }
        Ok(self)
    }

    pub fn value(&self) -> f64 {
        let (hi, lo) = self.split();
        hi + lo
    }

    /// Double-double representation `hi + lo`.
    fn split(&self) -> (f64, f64) {
        match *self {
            Slope::Rational { p, q } => {
                let hi = p as f64 / q as f64;
                let lo = (-hi).mul_add(q as f64, p as f64) / q as f64;
                (hi, lo)
            }
            Slope::Decimal(x) => (x, 0.0),
            Slope::Quadratic { a, b, d, c } => {
                let s = (d as f64).sqrt();
                let s_lo = (-s).mul_add(s, d as f64) / (2.0 * s);
                // b * (s + s_lo) + a, then divide by c
                let (ph, pl) = two_prod(b as f64, s);
                let (sh, sl) = two_sum(ph, a as f64);
                let num_lo = sl + pl + b as f64 * s_lo;
                let hi = (sh + num_lo) / c as f64;
                let rem = (-hi).mul_add(c as f64, sh) + num_lo;
                (hi, rem / c as f64)
            }
        }
    }

    /// Fractional part of `n s` with compensated arithmetic.
    pub fn frac_mul(&self, n: i64) -> f64 {
        if let Slope::Rational { p, q } = *self {
            let r = ((n as i128 * p as i128).rem_euclid(q as i128)) as f64;
            return r / q as f64;
        }
        let (hi, lo) = self.split();
        let x = n as f64;
        let p = x * hi;
        let e = x.mul_add(hi, -p);
        let mut f = p - p.floor();
        f += e + x * lo;
        f - f.floor()
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1/golden" {
            return Ok(Slope::inverse_golden());
        }
        if let Some((a, b)) = s.split_once('/') {
            let bad = |_| Error::InvalidArgument(format!("bad slope {s:?}"));
            return Slope::rational(a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        }
        let v: f64 = s.parse().map_err(|_| Error::InvalidArgument(format!("bad slope {s:?}")))?;
        Slope::Decimal(v).checked()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Slope::Rational { p, q } => write!(f, "{p}/{q}"),
            Slope::Quadratic { a: -1, b: 1, d: 5, c: 2 } => write!(f, "1/golden"),
            Slope::Quadratic { a, b, d, c } => write!(f, "({a}+{b}*sqrt({d}))/{c}"),
            Slope::Decimal(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CPParams {
    pub slope: Slope,
    phason: f64,
    pub letter_plus: String,
    pub letter_minus: String,
}

impl CPParams {
    pub fn new(slope: Slope, phason: f64) -> Self {
        CPParams { slope, phason: phason.rem_euclid(2.0 * PI), letter_plus: "a".into(), letter_minus: "b".into() }
    }

    pub fn phason(&self) -> f64 {
        self.phason
    }

    pub fn alphabet(&self) -> [&str; 2] {
        [&self.letter_plus, &self.letter_minus]
    }

    pub fn render(&self, w: &[u8]) -> String {
        w.iter().map(|&l| self.alphabet()[l as usize]).collect()
    }
}

/// The characteristic function, `+1` or `-1`.
///
/// The `+1` set is the half-open window `θ ∈ [−πs, πs)` for the angle
/// `θ = 2πns + φ`, so a vanishing bracket gives `+1` at `θ = −πs` and `−1` at
/// `θ = πs`.
pub fn chi(n: i64, params: &CPParams) -> i8 {
    if let (Slope::Rational { p, q }, 0.0) = (params.slope, params.phason) {
        // angles in units of π/q
        let (p, q) = (p as i128, q as i128);
        let a = (2 * n as i128 * p).rem_euclid(2 * q);
        return if a < p || a >= 2 * q - p { 1 } else { -1 };
    }
    let theta = 2.0 * PI * params.slope.frac_mul(n) + params.phason;
    let v = theta.cos() - (PI * params.slope.value()).cos();
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

/// Letters `χ(n0), …, χ(n0 + count − 1)` as indices: `0` for `+1`, `1` for `−1`.
pub fn cp_word(params: &CPParams, n0: i64, count: usize) -> Word {
    (0..count as i64).map(|i| if chi(n0 + i, params) > 0 { 0 } else { 1 }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub periodic: bool,
    pub period: Option<usize>,
}

/// Multiple of the horizon over which a candidate period is confirmed.
pub const CONFIRM_FACTOR: usize = 4;

/// Smallest period `≤ horizon/2` of the word.
///
/// A candidate found on the first `horizon` letters must persist over
/// `CONFIRM_FACTOR · horizon` letters; aperiodic Sturmian words agree with a
/// shift by a large convergent denominator over windows shorter than about
/// twice that denominator.
pub fn check_periodicity(params: &CPParams, horizon: usize) -> Periodicity {
    let long = cp_word(params, 0, horizon * CONFIRM_FACTOR);
    let w = &long[..horizon];
    let mut from = 1;
    while let Some(p) = (from..=horizon / 2).find(|&p| w.iter().zip(&w[p..]).all(|(a, b)| a == b)) {
        if long.iter().zip(&long[p..]).all(|(a, b)| a == b) {
            return Periodicity { periodic: true, period: Some(p) };
        }
        from = p + 1;
    }
    Periodicity { periodic: false, period: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_slope() {
        let p = CPParams::new(Slope::rational(1, 2).unwrap(), 0.0);
        for n in -6..6 {
            assert_eq!(chi(n, &p), if n % 2 == 0 { 1 } else { -1 });
        }
        assert_eq!(p.render(&cp_word(&p, 0, 4)), "abab");
        assert_eq!(check_periodicity(&p, 100).period, Some(2));
    }

    #[test]
    fn golden_prefix() {
        let p = CPParams::new(Slope::inverse_golden(), 0.0);
        let signs: Vec<i8> = (0..5).map(|n| chi(n, &p)).collect();
        assert_eq!(signs, vec![1, -1, 1, 1, -1]);
        assert_eq!(check_periodicity(&p, 10_000), Periodicity { periodic: false, period: None });
    }

    #[test]
    fn golden_split_is_accurate() {
        let s = Slope::inverse_golden();
        let (hi, lo) = s.split();
        // 1/τ = 0.61803398874989484820458683...
        assert_eq!(hi, 0.618_033_988_749_894_9);
        assert!((lo + 5.432_115_2e-17).abs() < 1e-23);
        // frac(n/τ) against a naive product at moderate n
        let n = 1_000_003;
        let naive = (n as f64 * hi).fract();
        assert!((s.frac_mul(n) - naive).abs() < 1e-9);
    }

    #[test]
    fn rational_periods() {
        for (p, q) in [(2, 5), (1, 3), (3, 7), (5, 12)] {
            let cp = CPParams::new(Slope::rational(p, q).unwrap(), 0.0);
            assert_eq!(check_periodicity(&cp, 200).period, Some(q as usize));
            for n0 in [-13, 0, 4] {
                let w = cp_word(&cp, n0, 40);
                assert!(w.iter().zip(&w[q as usize..]).all(|(a, b)| a == b));
            }
        }
    }

    #[test]
    fn parse_slopes() {
        assert_eq!("2/4".parse::<Slope>().unwrap(), Slope::Rational { p: 1, q: 2 });
        assert_eq!("1/golden".parse::<Slope>().unwrap(), Slope::inverse_golden());
        assert_eq!("0.25".parse::<Slope>().unwrap(), Slope::Decimal(0.25));
        assert!("3/2".parse::<Slope>().is_err());
        assert!("x".parse::<Slope>().is_err());
    }

    #[test]
    fn ties_keep_density() {
        // even numerators put lattice points on both window ends
        for (p, q) in [(2, 3), (4, 5), (2, 7), (6, 7)] {
            let cp = CPParams::new(Slope::rational(p, q).unwrap(), 0.0);
            let w = cp_word(&cp, 0, q as usize);
            assert_eq!(w.iter().filter(|&&l| l == 0).count(), p as usize);
            assert_eq!(check_periodicity(&cp, 100).period, Some(q as usize));
        }
    }

    #[test]
    fn phason_periodicity() {
        let s = Slope::inverse_golden();
        for n in 0..50 {
            let a = CPParams::new(s, 0.7);
            let b = CPParams::new(s, 0.7 + 2.0 * PI);
            assert_eq!(chi(n, &a), chi(n, &b));
        }
    }
}
