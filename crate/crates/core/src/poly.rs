//! Integer polynomials: numeric roots and factorization over the integers.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial with integer coefficients, stored low-to-high without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn constant(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact division; `None` when `d` does not divide `self` over the integers.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero());
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return if self.is_zero() { Some(self.clone()) } else { None };
        }
        let dl = d.lead();
        let dn = d.coeffs.len();
        let mut q = vec![BigInt::zero(); r.len() - dn + 1];
        for k in (0..q.len()).rev() {
            let top = &r[k + dn - 1];
            if !top.is_multiple_of(&dl) {
                return None;
            }
            let f = top / &dl;
            for (j, c) in d.coeffs.iter().enumerate() {
                r[k + j] -= &f * c;
            }
            q[k] = f;
        }
        if r.iter().all(Zero::is_zero) {
            Some(Self::new(q))
        } else {
            None
        }
    }

    /// Pseudo-remainder of `self` by `d`.
    fn pseudo_rem(&self, d: &Self) -> Self {
        let mut r = self.coeffs.clone();
        let dn = d.coeffs.len();
        let dl = d.lead();
        while r.len() >= dn && !r.is_empty() {
            let top = r.last().unwrap().clone();
            let shift = r.len() - dn;
            for c in r.iter_mut() {
                *c *= &dl;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                r[shift + j] -= &top * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Self::new(r).primitive()
    }

    /// Primitive gcd over the rationals.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), o.primitive());
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r;
        }
        a.primitive()
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// All complex roots with multiplicity.
    pub fn roots(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        // exact zero roots first, Aberth handles the rest
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        out.extend(std::iter::repeat_n(Complex64::zero(), k));
        let rest = Self::new(self.coeffs[k..].to_vec());
        for (f, mult) in rest.square_free() {
            let r = aberth(&f);
            for _ in 0..mult {
                out.extend(r.iter().copied());
            }
        }
        out
    }

    /// Square-free decomposition: pairs `(f_i, i)` with `self = c * prod f_i^i`.
    pub fn square_free(&self) -> Vec<(IntPoly, usize)> {
        if self.degree() == 0 {
            return vec![];
        }
        // s_k collects the distinct factors of multiplicity at least k
        let radical = |g: &IntPoly| g.exact_div_q(&g.gcd(&g.derivative())).primitive();
        let mut layers = Vec::new();
        let mut g = self.primitive();
        while g.degree() > 0 {
            let s = radical(&g);
            g = g.exact_div_q(&s).primitive();
            layers.push(s);
        }
        let mut out = Vec::new();
        for (k, s) in layers.iter().enumerate() {
            let exact = match layers.get(k + 1) {
                Some(next) => s.exact_div_q(next).primitive(),
                None => s.clone(),
            };
            if exact.degree() > 0 {
                out.push((exact, k + 1));
            }
        }
        out
    }

    fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Division over Q of primitive parts, rescaled to an integer polynomial.
    fn exact_div_q(&self, d: &Self) -> Self {
        let dl = d.lead();
        let mut num = self.clone();
        let mut k = 0;
        loop {
            if let Some(q) = num.exact_div(d) {
                return q.primitive_keep_sign();
            }
            num = num.scale(&dl);
            k += 1;
            assert!(k <= self.degree() + 1, "non-divisible in exact_div_q");
        }
    }

    fn primitive_keep_sign(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let g = self.content();
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Factorization of a monic polynomial into monic irreducible factors over
    /// the integers, with multiplicities.
    pub fn factor_monic(&self) -> Vec<(IntPoly, usize)> {
        assert!(self.is_monic(), "factor_monic expects a monic polynomial");
        let mut out = Vec::new();
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if k > 0 {
            out.push((Self::x(), k));
        }
        let rest = Self::new(self.coeffs[k..].to_vec());
        for (sf, mult) in rest.square_free() {
            for f in split_squarefree(&sf) {
                out.push((f, mult));
            }
        }
        // merge identical factors from different square-free layers
        let mut merged: Vec<(IntPoly, usize)> = Vec::new();
        for (f, m) in out {
            if let Some(e) = merged.iter_mut().find(|(g, _)| *g == f) {
                e.1 += m;
            } else {
                merged.push((f, m));
            }
        }
        merged.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)));
        merged
    }

    pub fn is_irreducible(&self) -> bool {
        let f = self.factor_monic();
        f.len() == 1 && f[0].1 == 1
    }

    /// Reduction of coefficients modulo `p`.
    pub fn mod_p(&self, p: &BigInt) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| c.mod_floor(p)).collect()
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Splits a monic square-free polynomial without zero roots into irreducibles.
fn split_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let mut f = f.primitive();
    let mut out = Vec::new();
    // rational (hence integer) roots from divisors of the constant term
    if let Some(c) = f.constant().abs().to_u64() {
        if c <= 1_000_000 {
            for d in 1..=c {
                if c % d != 0 {
                    continue;
                }
                for s in [d as i64, -(d as i64)] {
                    let lin = IntPoly::from_i64(&[-s, 1]);
                    if let Some(q) = f.exact_div(&lin) {
                        out.push(lin);
                        f = q;
                    }
                }
            }
        }
    }
    if f.degree() == 0 {
        return out;
    }
    split_by_roots(&f, &mut out);
    out
}

/// Smallest-degree monic integer factor search over subsets of numeric roots.
fn split_by_roots(f: &IntPoly, out: &mut Vec<IntPoly>) {
    let n = f.degree();
    if n <= 1 {
        out.push(f.clone());
        return;
    }
    let roots = aberth(f);
    for d in 1..=n / 2 {
        let mut found = None;
        for_each_subset(n, d, &mut |idx: &[usize]| {
            let mut prod = vec![Complex64::new(1.0, 0.0)];
            for &i in idx {
                let mut next = vec![Complex64::zero(); prod.len() + 1];
                for (k, c) in prod.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * roots[i];
                }
                prod = next;
            }
            if prod.iter().any(|c| c.im.abs() > 1e-6 * (1.0 + c.re.abs())) {
                return false;
            }
            if prod.iter().any(|c| (c.re - c.re.round()).abs() > 1e-6 * (1.0 + c.re.abs())) {
                return false;
            }
            let cand = IntPoly::new(prod.iter().map(|c| BigInt::from(c.re.round() as i64)).collect());
            if let Some(q) = f.exact_div(&cand) {
                found = Some((cand, q));
                true
            } else {
                false
            }
        });
        if let Some((a, b)) = found {
            split_by_roots(&a, out);
            split_by_roots(&b, out);
            return;
        }
    }
    out.push(f.clone());
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if rec(i + 1, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Aberth-Ehrlich simultaneous iteration for a square-free polynomial.
fn aberth(f: &IntPoly) -> Vec<Complex64> {
    let n = f.degree();
    if n == 0 {
        return vec![];
    }
    let c: Vec<f64> = f.coeffs.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let lead = c[n];
    if n == 1 {
        return vec![Complex64::new(-c[0] / lead, 0.0)];
    }
    let bound = 1.0 + c[..n].iter().map(|x| (x / lead).abs()).fold(0.0, f64::max);
    let fd = f.derivative();
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, th)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let p = f.eval_c(z[i]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = p / fd.eval_c(z[i]);
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish and clean tiny imaginary parts
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = fd.eval_c(*zi);
            if d.norm() > 0.0 {
                let step = f.eval_c(*zi) / d;
                if step.is_finite() {
                    *zi -= step;
                }
            }
        }
        if zi.im.abs() < 1e-12 * (1.0 + zi.re.abs()) {
            zi.im = 0.0;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, -1, 1]).to_string(), "x^2 - x - 1");
        assert_eq!(p(&[0, 2, 0, -1]).to_string(), "-x^3 + 2x");
    }

    #[test]
    fn golden_roots() {
        let mut r: Vec<f64> = p(&[-1, -1, 1]).roots().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        let tau = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r[1] - tau).abs() < 1e-14);
        assert!((r[0] + 1.0 / tau).abs() < 1e-14);
    }

    #[test]
    fn factor_products() {
        // (x-2) x (x+1) (x^2-2)
        let f = p(&[0, -2, -1, 1]).mul(&p(&[-2, 0, 1]));
        let fac = f.factor_monic();
        let expect = vec![(p(&[-2, 1]), 1), (p(&[0, 1]), 1), (p(&[1, 1]), 1), (p(&[-2, 0, 1]), 1)];
        assert_eq!(fac, expect);
        assert!(p(&[-1, -1, 1]).is_irreducible());
        assert!(!p(&[-1, 0, 1]).is_irreducible());
        // x^4 + 1 is irreducible, (x^2+1)^2 has multiplicity
        assert!(p(&[1, 0, 0, 0, 1]).is_irreducible());
        let sq = p(&[1, 0, 1]).mul(&p(&[1, 0, 1]));
        assert_eq!(sq.factor_monic(), vec![(p(&[1, 0, 1]), 2)]);
    }

    #[test]
    fn factor_nonlinear_pairs() {
        // (x^2 - x - 1)(x^2 + x - 1)(x^3 - x - 1)
        let f = p(&[-1, -1, 1]).mul(&p(&[-1, 1, 1])).mul(&p(&[-1, -1, 0, 1]));
        let fac = f.factor_monic();
        assert_eq!(fac.len(), 3);
        let back = fac.iter().fold(IntPoly::one(), |acc, (g, m)| {
            (0..*m).fold(acc, |a, _| a.mul(g))
        });
        assert_eq!(back, f);
    }

    #[test]
    fn gcd_and_division() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 2, 1]);
        assert_eq!(a.gcd(&b), p(&[1, 1]));
        assert_eq!(a.exact_div(&p(&[1, 1])), Some(p(&[-1, 1])));
        assert_eq!(a.exact_div(&p(&[2, 1])), None);
    }
}
