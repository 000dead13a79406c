//! Tight-binding chains, Sturm-sequence eigenvalues and spectral gaps.
//!
//! Energies follow `H φ = 2 e φ`: every returned energy is half an eigenvalue
//! of the symmetric tridiagonal matrix with diagonal `v_n` and off-diagonal
//! `t_{n,n+1}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Model<T> {
    /// Per-letter on-site potentials, unit hopping.
    Onsite { v: Vec<T> },
    /// Zero on-site potential, `t = exp(−ε²(v_n + v_{n+1})/2)`.
    Hopping { v: Vec<T>, eps: T },
}

impl<T: Real> Model<T> {
    pub fn onsite(va: T, vb: T) -> Self {
        Model::Onsite { v: vec![va, vb] }
    }

    pub fn hopping(eps: T, va: T, vb: T) -> Self {
        Model::Hopping { v: vec![va, vb], eps }
    }

    fn values(&self) -> &[T] {
        match self {
            Model::Onsite { v } | Model::Hopping { v, .. } => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TightBindingChain<T> {
    pub onsite: Vec<T>,
    pub hopping: Vec<T>,
}

impl<T: Real> TightBindingChain<T> {
    pub fn new(onsite: Vec<T>, hopping: Vec<T>) -> Result<Self> {
        if onsite.is_empty() || hopping.len() + 1 != onsite.len() {
            return Err(Error::InvalidArgument("need N on-site and N−1 hopping entries".into()));
        }
        if hopping.iter().any(|&t| !(t > T::zero())) {
            return Err(Error::InvalidArgument("hopping entries must be positive".into()));
        }
        Ok(TightBindingChain { onsite, hopping })
    }

    pub fn len(&self) -> usize {
        self.onsite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsite.is_empty()
    }

    /// Gershgorin interval of the matrix.
    pub fn gershgorin(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let r = if i > 0 { self.hopping[i - 1] } else { T::zero() } + if i + 1 < n { self.hopping[i] } else { T::zero() };
            lo = lo.min(self.onsite[i] - r);
            hi = hi.max(self.onsite[i] + r);
        }
        (lo, hi)
    }

    /// Leading principal `m × m` block.
    pub fn truncate(&self, m: usize) -> Self {
        TightBindingChain { onsite: self.onsite[..m].to_vec(), hopping: self.hopping[..m.saturating_sub(1)].to_vec() }
    }

    /// Adds `c` to every on-site value.
    pub fn shifted(&self, c: T) -> Self {
        TightBindingChain { onsite: self.onsite.iter().map(|&v| v + c).collect(), hopping: self.hopping.clone() }
    }
}

/// The tight-binding chain of a word.
pub fn build_chain<T: Real>(word: &[u8], model: &Model<T>) -> Result<TightBindingChain<T>> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let vals = model.values();
    let v_of = |l: u8| vals.get(l as usize).copied().ok_or_else(|| Error::UnknownLetter(format!("#{l}")));
    let letters = word.iter().map(|&l| v_of(l)).collect::<Result<Vec<T>>>()?;
    match model {
        Model::Onsite { .. } => TightBindingChain::new(letters, vec![T::one(); word.len() - 1]),
        Model::Hopping { eps, .. } => {
            let half = *eps * *eps / T::c(2.0);
            let t = letters.windows(2).map(|w| (-(half * (w[0] + w[1]))).exp()).collect();
            TightBindingChain::new(vec![T::zero(); word.len()], t)
        }
    }
}

/// Number of matrix eigenvalues strictly below `x` (LDLᵀ inertia).
pub fn sturm_count<T: Real>(chain: &TightBindingChain<T>, x: T) -> usize {
    let tiny = T::min_positive_value();
    let mut count = 0;
    let mut d = chain.onsite[0] - x;
    for i in 0..chain.len() {
        if i > 0 {
            let b = chain.hopping[i - 1];
            d = chain.onsite[i] - x - b * b / d;
        }
        if d == T::zero() {
            d = -tiny;
        }
        if d < T::zero() {
            count += 1;
        }
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Open,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergySpectrum<T> {
    pub eigenvalues: Vec<T>,
    pub boundary: Boundary,
}

impl<T: Real> EnergySpectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Bisection for the `k`-th smallest matrix eigenvalue in `[lo, hi]`.
fn bisect_index<T: Real>(chain: &TightBindingChain<T>, k: usize, mut lo: T, mut hi: T, abs_tol: T) -> T {
    let two = T::c(2.0);
    loop {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi || hi - lo <= abs_tol {
            return mid;
        }
        if sturm_count(chain, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// All energies by Sturm bisection, in parallel over eigenvalue indices.
pub fn eigenvalues_tridiag<T: Real>(chain: &TightBindingChain<T>) -> EnergySpectrum<T> {
    let (lo, hi) = chain.gershgorin();
    let pad = (hi - lo).abs().max(T::one()) * T::c(1e-12);
    let (lo, hi) = (lo - pad, hi + pad);
    let abs_tol = T::epsilon() * lo.abs().max(hi.abs());
    let half = T::c(0.5);
    let eigenvalues = (0..chain.len()).into_par_iter().map(|k| bisect_index(chain, k, lo, hi, abs_tol) * half).collect();
    EnergySpectrum { eigenvalues, boundary: Boundary::Open }
}

pub const ORACLE_LIMIT: usize = 12;

/// Independent eigenvalue oracle for small chains: bisection on the sign
/// changes of the characteristic polynomials of the leading minors.
pub fn brute_force_eigs<T: Real>(chain: &TightBindingChain<T>) -> Result<EnergySpectrum<T>> {
    let n = chain.len();
    if n > ORACLE_LIMIT {
        return Err(Error::SizeLimit { got: n, limit: ORACLE_LIMIT });
    }
    // p_0 = 1, p_1 = a_1 − x, p_k = (a_k − x) p_{k−1} − b_{k−1}² p_{k−2}
    let seq = |x: T| {
        let mut p = Vec::with_capacity(n + 1);
        p.push(T::one());
        p.push(chain.onsite[0] - x);
        for k in 1..n {
            let b = chain.hopping[k - 1];
            let v = (chain.onsite[k] - x) * p[k] - b * b * p[k - 1];
            p.push(v);
        }
        p
    };
    let sign_changes = |x: T| {
        let p = seq(x);
        let mut prev = T::one();
        let mut changes = 0;
        for &v in &p[1..] {
            let s = if v == T::zero() { -prev.signum() } else { v.signum() };
            if s != prev.signum() {
                changes += 1;
            }
            prev = s;
        }
        changes
    };
    let (lo, hi) = chain.gershgorin();
    let (lo, hi) = (lo - T::one(), hi + T::one());
    let two = T::c(2.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // the k-th root is the smallest x with more than k sign changes
        let (mut a, mut b) = (lo, hi);
        loop {
            let mid = (a + b) / two;
            if mid <= a || mid >= b {
                break;
            }
            if sign_changes(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push((a + b) / two / two);
    }
    Ok(EnergySpectrum { eigenvalues: out, boundary: Boundary::Open })
}

/// `#{e_i ≤ e} / N`.
pub fn counting_function<T: Real>(spec: &EnergySpectrum<T>, e: T) -> T {
    let k = spec.eigenvalues.partition_point(|&x| x <= e);
    T::from_usize_lossy(k) / T::from_usize_lossy(spec.len())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap<T> {
    pub lower: T,
    pub upper: T,
    pub width: T,
    /// Number of energies below the gap.
    pub index: usize,
    /// `index / N`.
    pub ids_value: T,
    /// Counting-function value with the edge-state contribution removed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids_bulk: Option<T>,
}

impl<T: Real> Gap<T> {
    /// The value used for labeling: the bulk value when available.
    pub fn label_value(&self) -> T {
        self.ids_bulk.unwrap_or(self.ids_value)
    }

    pub fn midpoint(&self) -> T {
        (self.lower + self.upper) / T::c(2.0)
    }
}

pub const MIN_GAP_SPECTRUM: usize = 16;
pub const DEFAULT_REL_THRESHOLD: f64 = 10.0;

/// Spacings wider than `rel_threshold` times the median spacing.
pub fn detect_gaps<T: Real>(spec: &EnergySpectrum<T>, rel_threshold: T) -> Result<Vec<Gap<T>>> {
    let n = spec.len();
    if n < MIN_GAP_SPECTRUM {
        return Err(Error::TooShort { got: n, need: MIN_GAP_SPECTRUM });
    }
    let e = &spec.eigenvalues;
    let spacings: Vec<T> = e.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sorted = spacings.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite spacings"));
    let m = sorted.len();
    let median = if m % 2 == 1 { sorted[m / 2] } else { (sorted[m / 2 - 1] + sorted[m / 2]) / T::c(2.0) };
    let cut = rel_threshold * median;
    let nn = T::from_usize_lossy(n);
    Ok(spacings
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cut && s > T::zero())
        .map(|(i, &s)| Gap {
            lower: e[i],
            upper: e[i + 1],
            width: s,
            index: i + 1,
            ids_value: T::from_usize_lossy(i + 1) / nn,
            ids_bulk: None,
        })
        .collect())
}

/// Bulk counting value inside each gap of the chain of `word`.
///
/// States localized at the two free ends of the open chain shift the count
/// by a few units. Those states are shared by the chain of `word · word`, so
/// the difference of the two counts at the gap midpoint is the count of one
/// bulk copy.
pub fn bulk_ids<T: Real>(word: &[u8], model: &Model<T>, gaps: &mut [Gap<T>]) -> Result<()> {
    let mut doubled = word.to_vec();
    doubled.extend_from_slice(word);
    let big = build_chain(&doubled, model)?;
    let nn = T::from_usize_lossy(word.len());
    for g in gaps.iter_mut() {
        let x = g.midpoint() * T::c(2.0);
        let c = sturm_count(&big, x);
        g.ids_bulk = Some(T::from_usize_lossy(c.saturating_sub(g.index)) / nn);
    }
    Ok(())
}

/// Spectrum and gaps of a word, with bulk counting values attached.
pub fn spectrum_and_gaps<T: Real>(word: &[u8], model: &Model<T>, rel_threshold: T) -> Result<(EnergySpectrum<T>, Vec<Gap<T>>)> {
    let chain = build_chain(word, model)?;
    let spec = eigenvalues_tridiag(&chain);
    let mut gaps = detect_gaps(&spec, rel_threshold)?;
    bulk_ids(word, model, &mut gaps)?;
    Ok((spec, gaps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(n: usize) -> TightBindingChain<f64> {
        TightBindingChain::new(vec![0.0; n], vec![1.0; n - 1]).unwrap()
    }

    #[test]
    fn small_closed_forms() {
        let s = eigenvalues_tridiag(&free(3));
        let r = 2f64.sqrt() / 2.0;
        for (a, b) in s.eigenvalues.iter().zip([-r, 0.0, r]) {
            assert!((a - b).abs() < 1e-14);
        }
        let one = TightBindingChain::new(vec![3.0], vec![]).unwrap();
        assert_eq!(eigenvalues_tridiag(&one).eigenvalues, vec![1.5]);
        let o = brute_force_eigs(&free(2)).unwrap();
        assert!((o.eigenvalues[0] + 0.5).abs() < 1e-14 && (o.eigenvalues[1] - 0.5).abs() < 1e-14);
        assert!(matches!(brute_force_eigs(&free(13)), Err(Error::SizeLimit { got: 13, limit: 12 })));
    }

    #[test]
    fn oracle_with_root_at_the_midpoint() {
        // symmetric bounds put the first bisection point on the root at zero
        let t = 1.03;
        let c = TightBindingChain::new(vec![0.0; 3], vec![t, t]).unwrap();
        let o = brute_force_eigs(&c).unwrap();
        let r = t * 2f64.sqrt() / 2.0;
        for (a, b) in o.eigenvalues.iter().zip([-r, 0.0, r]) {
            assert!((a - b).abs() < 1e-14, "{:?}", o.eigenvalues);
        }
    }

    #[test]
    fn models() {
        let c = build_chain(&[0, 1], &Model::onsite(0.0, 1.0)).unwrap();
        assert_eq!(c.onsite, vec![0.0, 1.0]);
        assert_eq!(c.hopping, vec![1.0]);
        let h = build_chain(&[0, 0, 0], &Model::hopping(1.0, 1.0, 0.0)).unwrap();
        let e1 = (-1.0f64).exp();
        assert!(h.hopping.iter().all(|&t| (t - e1).abs() < 1e-15));
        assert!(h.onsite.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn counting() {
        let s = eigenvalues_tridiag(&free(3));
        assert_eq!(counting_function(&s, -10.0), 0.0);
        assert_eq!(counting_function(&s, 10.0), 1.0);
        assert!((counting_function(&s, 0.1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dimer_gap() {
        let w: Vec<u8> = (0..200).map(|i| (i % 2) as u8).collect();
        let (_, gaps) = spectrum_and_gaps(&w, &Model::onsite(0.0, 2.0), 10.0).unwrap();
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].ids_value, 0.5);
        assert_eq!(gaps[0].ids_bulk, Some(0.5));
        let spec = eigenvalues_tridiag(&build_chain(&w, &Model::onsite(0.0, 2.0)).unwrap());
        assert!(detect_gaps(&spec, f64::INFINITY).unwrap().is_empty());
    }

    #[test]
    fn single_precision() {
        let c: TightBindingChain<f32> = TightBindingChain::new(vec![0.0; 3], vec![1.0; 2]).unwrap();
        let s = eigenvalues_tridiag(&c);
        assert!((s.eigenvalues[2] - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }
}
