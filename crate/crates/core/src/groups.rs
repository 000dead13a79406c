//! Countable subgroups of the reals used to label gaps and Bragg peaks.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `1/τ = (√5 − 1)/2`.
pub fn golden_inverse() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Clone, Debug, PartialEq)]
pub enum LabelGroup {
    /// `(1/q) Z`.
    Cyclic { q: i64 },
    /// `Z + ρZ` with irrational `ρ ∈ (1/2, 1)`.
    TwoGen { rho: f64 },
    /// `(num/den) · Z[1/p]` with `num/den` in lowest terms and prime to `p`.
    ScaledLocalized { num: i64, den: i64, p: i64 },
    /// Integer combinations of finitely many reals.
    FreeAbelian { generators: Vec<f64> },
}

impl LabelGroup {
    /// `Z + ρZ`, collapsing to a cyclic group for rationals with small denominator.
    pub fn two_gen(rho: f64) -> Self {
        if let Some((_, s)) = small_rational(rho, 10_000, 1e-12) {
            return LabelGroup::Cyclic { q: s };
        }
        let mut r = rho - rho.floor();
        if r < 0.5 {
            r = 1.0 - r;
        }
        LabelGroup::TwoGen { rho: r }
    }

    /// `(num/den) · Z[1/p]`.
    pub fn scaled_localized(num: i64, den: i64, p: i64) -> Result<Self> {
        if num <= 0 || den <= 0 {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        let (mut n, mut d) = (num, den);
        while n % p == 0 {
            n /= p;
        }
        while d % p == 0 {
            d /= p;
        }
        let g = n.gcd(&d);
        Ok(LabelGroup::ScaledLocalized { num: n / g, den: d / g, p })
    }

    pub fn canonical_name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LabelGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelGroup::Cyclic { q: 1 } => write!(f, "Z"),
            LabelGroup::Cyclic { q } => write!(f, "(1/{q})Z"),
            LabelGroup::TwoGen { rho } => write!(f, "Z+rho*Z(rho={rho:.10})"),
            LabelGroup::ScaledLocalized { num: 1, den: 1, p } => write!(f, "Z[1/{p}]"),
            LabelGroup::ScaledLocalized { num: 1, den, p } => write!(f, "(1/{den})Z[1/{p}]"),
            LabelGroup::ScaledLocalized { num, den: 1, p } => write!(f, "{num}Z[1/{p}]"),
            LabelGroup::ScaledLocalized { num, den, p } => write!(f, "({num}/{den})Z[1/{p}]"),
            LabelGroup::FreeAbelian { generators } => {
                let g: Vec<String> = generators.iter().map(|x| format!("{x:.10}")).collect();
                write!(f, "Z<{}>", g.join(","))
            }
        }
    }
}

impl Serialize for LabelGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The label group of a built-in family.
pub fn group_for_family(family: &str) -> Result<LabelGroup> {
    match family {
        "periodic" => Ok(LabelGroup::Cyclic { q: 2 }),
        "fibonacci" => Ok(LabelGroup::two_gen(golden_inverse())),
        "thue-morse" | "period-doubling" => LabelGroup::scaled_localized(1, 3, 2),
        "rudin-shapiro" => LabelGroup::scaled_localized(1, 1, 2),
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchBounds {
    /// Cap on `|p|, |q|` (or generator coefficients) and on `|m| / p^N`.
    pub coef: i64,
    /// Cap on the localization depth `N`.
    pub depth: u32,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { coef: 30, depth: 12 }
    }
}

pub const DEFAULT_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupElement {
    /// `(p, q)` for `p + qρ`, `(m, N)` for `a·m/p^N`, `(m)` for `m/q`, or generator coefficients.
    pub coordinates: Vec<i64>,
    pub value: f64,
    pub reduced_mod_1: f64,
}

impl GroupElement {
    fn new(coordinates: Vec<i64>, value: f64) -> Self {
        GroupElement { coordinates, value, reduced_mod_1: value - value.floor() }
    }
}

/// Value of an element from its coordinates.
pub fn element_value(g: &LabelGroup, coords: &[i64]) -> f64 {
    match g {
        LabelGroup::Cyclic { q } => coords[0] as f64 / *q as f64,
        LabelGroup::TwoGen { rho } => coords[0] as f64 + coords[1] as f64 * rho,
        LabelGroup::ScaledLocalized { num, den, p } => {
            let pn = (*p as f64).powi(coords[1] as i32);
            (*num as f64 * coords[0] as f64) / (*den as f64 * pn)
        }
        LabelGroup::FreeAbelian { generators } => generators.iter().zip(coords).map(|(g, &c)| g * c as f64).sum(),
    }
}

/// Closest element to `x` within the coordinate bounds, with the residual
/// `|x − value|`.
pub fn nearest_element(x: f64, g: &LabelGroup, b: &SearchBounds) -> (GroupElement, f64) {
    let (coords, value) = match g {
        LabelGroup::Cyclic { q } => {
            let m = (x * *q as f64).round() as i64;
            (vec![m], m as f64 / *q as f64)
        }
        LabelGroup::TwoGen { rho } => {
            // per q the best p is the rounding; ties go to smaller |q| then |p|
            let best = (-b.coef..=b.coef)
                .into_par_iter()
                .filter_map(|q| {
                    let p = (x - q as f64 * rho).round() as i64;
                    (p.abs() <= b.coef).then(|| {
                        let v = p as f64 + q as f64 * rho;
                        ((x - v).abs(), q.abs(), p.abs(), q, p, v)
                    })
                })
                .min_by(|a, c| a.0.total_cmp(&c.0).then(a.1.cmp(&c.1)).then(a.2.cmp(&c.2)).then(a.3.cmp(&c.3)))
                .expect("q = 0 always admissible for bounded x");
            (vec![best.4, best.3], best.5)
        }
        LabelGroup::ScaledLocalized { num, den, p } => {
            let a = *num as f64 / *den as f64;
            let mut best: Option<(f64, i64, i64, f64)> = None;
            for n in 0..=b.depth {
                let pn = (*p as f64).powi(n as i32);
                let cap = (b.coef as f64 * pn).min(9.0e15);
                let m = (x * pn / a).round().clamp(-cap, cap) as i64;
                let v = a * m as f64 / pn;
                let r = (x - v).abs();
                let better = match best {
                    None => true,
                    Some((br, bm, bn, _)) => {
                        r < br || (r == br && ((n as i64) < bn || (n as i64 == bn && m.abs() < bm.abs())))
                    }
                };
                if better {
                    best = Some((r, m, n as i64, v));
                }
            }
            let (_, m, n, _) = best.unwrap();
            // reduce (m, N) so that m is prime to p where possible
            let (mut m, mut n) = (m, n);
            while n > 0 && m % p == 0 && m != 0 {
                m /= p;
                n -= 1;
            }
            if m == 0 {
                n = 0;
            }
            (vec![m, n], element_value(g, &[m, n]))
        }
        LabelGroup::FreeAbelian { generators } => {
            let k = generators.len();
            let range = if k <= 2 { b.coef } else { b.coef.min(6) };
            let width = (2 * range + 1) as usize;
            let total = width.pow(k as u32);
            let (_, coords, v) = (0..total)
                .into_par_iter()
                .map(|mut idx| {
                    let mut c = Vec::with_capacity(k);
                    for _ in 0..k {
                        c.push((idx % width) as i64 - range);
                        idx /= width;
                    }
                    let v: f64 = generators.iter().zip(&c).map(|(g, &ci)| g * ci as f64).sum();
                    ((x - v).abs(), c, v)
                })
                .min_by(|a, c| {
                    a.0.total_cmp(&c.0)
                        .then(a.1.iter().map(|v| v.abs()).sum::<i64>().cmp(&c.1.iter().map(|v| v.abs()).sum::<i64>()))
                        .then(a.1.cmp(&c.1))
                })
                .unwrap();
            (coords, v)
        }
    };
    let residual = (x - value).abs();
    (GroupElement::new(coords, value), residual)
}

/// `nearest_element` residual within `tol`.
pub fn contains(x: f64, g: &LabelGroup, tol: f64, b: &SearchBounds) -> bool {
    nearest_element(x, g, b).1 <= tol
}

/// `(r, s)` with `|x − r/s| ≤ tol` and `s ≤ max_den`, smallest `s` first.
pub fn small_rational(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    // continued-fraction convergents
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a;
        if frac == 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

pub fn is_prime(p: i64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(group_for_family("fibonacci").unwrap().to_string(), "Z+rho*Z(rho=0.6180339887)");
        assert_eq!(group_for_family("thue-morse").unwrap().to_string(), "(1/3)Z[1/2]");
        assert_eq!(group_for_family("rudin-shapiro").unwrap().to_string(), "Z[1/2]");
        assert_eq!(group_for_family("periodic").unwrap().to_string(), "(1/2)Z");
        assert_eq!(LabelGroup::Cyclic { q: 1 }.to_string(), "Z");
        assert!(group_for_family("penrose").is_err());
    }

    #[test]
    fn normalization() {
        assert_eq!(LabelGroup::two_gen(0.4), LabelGroup::Cyclic { q: 5 });
        let g = LabelGroup::two_gen(1.0 - golden_inverse());
        assert_eq!(g, LabelGroup::two_gen(golden_inverse()));
        assert_eq!(LabelGroup::scaled_localized(4, 6, 2).unwrap(), LabelGroup::ScaledLocalized { num: 1, den: 3, p: 2 });
        assert!(LabelGroup::scaled_localized(1, 3, 4).is_err());
    }

    #[test]
    fn nearest_examples() {
        let b = SearchBounds { coef: 3, depth: 12 };
        let fib = group_for_family("fibonacci").unwrap();
        let (e, r) = nearest_element(0.382, &fib, &b);
        assert_eq!(e.coordinates, vec![1, -1]);
        assert!(r < 1e-3);
        let tm = group_for_family("thue-morse").unwrap();
        let (e, r) = nearest_element(1.0 / 3.0, &tm, &SearchBounds::default());
        assert_eq!(e.coordinates, vec![1, 0]);
        assert_eq!(r, 0.0);
        let rs = group_for_family("rudin-shapiro").unwrap();
        let (e, r) = nearest_element(0.5, &rs, &SearchBounds::default());
        assert_eq!(e.coordinates, vec![1, 1]);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn membership() {
        let d = SearchBounds::default();
        let fib = group_for_family("fibonacci").unwrap();
        assert!(contains(golden_inverse(), &fib, DEFAULT_TOL, &d));
        let rs = group_for_family("rudin-shapiro").unwrap();
        assert!(!contains(0.2, &rs, 1e-6, &SearchBounds { coef: 30, depth: 12 }));
        // 209715 / 2^20 is within 2e-7 of 1/5
        let (e, r) = nearest_element(0.2, &rs, &SearchBounds { coef: 30, depth: 20 });
        assert_eq!(e.coordinates, vec![209715, 20]);
        assert!(r < 2e-7);
        for g in ["periodic", "fibonacci", "thue-morse", "rudin-shapiro"] {
            assert!(contains(0.0, &group_for_family(g).unwrap(), 1e-15, &d));
        }
        let free = LabelGroup::FreeAbelian { generators: vec![1.0, 2f64.sqrt()] };
        let (e, r) = nearest_element(2f64.sqrt() - 1.0, &free, &d);
        assert_eq!(e.coordinates, vec![-1, 1]);
        assert!(r < 1e-15);
    }

    #[test]
    fn rationals() {
        assert_eq!(small_rational(0.4, 100, 1e-12), Some((2, 5)));
        assert_eq!(small_rational(golden_inverse(), 10_000, 1e-12), None);
        assert!(is_prime(2) && is_prime(13) && !is_prime(1) && !is_prime(9));
    }
}
