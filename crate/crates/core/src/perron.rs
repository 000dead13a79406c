//! Perron-Frobenius data and the algebraic classification of substitutions.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::scalar::Real;
use crate::substitution::{occurrence_matrix, OccurrenceMatrix, SubstitutionRule};

const ROOT_MARGIN: f64 = 1e-9;

/// Tolerance on `|Δ_u - 1|` for quasiperiodicity.
pub const DELTA_U_TOL: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronData<T> {
    pub lambda1: T,
    pub lambda2_abs: T,
    /// Left eigenvector, letter frequencies summing to one.
    pub freq: Vec<T>,
    /// Right eigenvector, tile lengths with minimum one.
    pub lengths: Vec<T>,
    /// `ln|λ2| / ln λ1`, absent when `λ2 = 0`.
    pub beta: Option<T>,
}

impl<T: Real> PerronData<T> {
    /// Mean tile length `Σ ρ_l d_l`.
    pub fn mean_length(&self) -> T {
        self.freq.iter().zip(&self.lengths).map(|(&r, &d)| r * d).sum()
    }
}

/// All eigenvalues of the occurrence matrix, sorted by decreasing modulus.
pub fn eigenvalues(m: &OccurrenceMatrix) -> Vec<Complex64> {
    let mut r = m.char_poly().roots();
    r.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)));
    r
}

fn perron_root(m: &OccurrenceMatrix) -> (f64, Vec<Complex64>) {
    let cp = m.char_poly();
    let roots = eigenvalues(m);
    // the largest real root; Newton-polish against the exact polynomial
    let mut lam = roots
        .iter()
        .filter(|z| z.im.abs() < 1e-8 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let d = cp.derivative();
    for _ in 0..4 {
        let dv = d.eval_f64(lam);
        if dv != 0.0 {
            let step = cp.eval_f64(lam) / dv;
            if step.is_finite() {
                lam -= step;
            }
        }
    }
    (lam, roots)
}

/// Perron eigenvalue, second-largest modulus, normalized eigenvectors and
/// fluctuation exponent.
pub fn perron_data<T: Real>(m: &OccurrenceMatrix) -> Result<PerronData<T>> {
    if !m.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let n = m.size();
    let (lam, roots) = perron_root(m);
    // drop one copy of λ1 from the spectrum
    let idx = roots
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - lam).norm().total_cmp(&(b.1 - lam).norm()))
        .map(|(i, _)| i)
        .unwrap();
    let lambda2 = roots.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, z)| z.norm()).fold(0.0, f64::max);
    let lambda2 = if lambda2 < 1e-12 { 0.0 } else { lambda2 };

    let lambda1 = T::c(lam);
    let (freq, lengths) = if n == 2 {
        let (a, b, g, d) = (
            T::c(m.get(0, 0) as f64),
            T::c(m.get(0, 1) as f64),
            T::c(m.get(1, 0) as f64),
            T::c(m.get(1, 1) as f64),
        );
        let ra = g / (lambda1 + g - a);
        let rb = b / (lambda1 + b - d);
        let s = ra + rb;
        // right eigenvector: (α - λ) d_a + β d_b = 0
        let (da, db) = if b > T::zero() { (b, lambda1 - a) } else { (lambda1 - d, g) };
        (vec![ra / s, rb / s], normalize_min(vec![da, db]))
    } else {
        let mat: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| T::c(m.get(i, j) as f64)).collect()).collect();
        let right = power_vector(&mat, false);
        let left = power_vector(&mat, true);
        let s: T = left.iter().copied().sum();
        (left.into_iter().map(|x| x / s).collect(), normalize_min(right))
    };

    let beta = (lambda2 > 0.0).then(|| T::c(lambda2.ln() / lam.ln()));
    Ok(PerronData { lambda1, lambda2_abs: T::c(lambda2), freq, lengths, beta })
}

fn normalize_min<T: Real>(v: Vec<T>) -> Vec<T> {
    let m = v.iter().copied().fold(T::infinity(), T::min);
    v.into_iter().map(|x| x / m).collect()
}

/// Power iteration on `M + I` (aperiodic for primitive `M`).
fn power_vector<T: Real>(m: &[Vec<T>], left: bool) -> Vec<T> {
    let n = m.len();
    let mut v = vec![T::one(); n];
    let tol = T::epsilon() * T::c(4.0);
    for _ in 0..20_000 {
        let mut w = v.clone();
        for i in 0..n {
            for j in 0..n {
                let a = if left { m[j][i] } else { m[i][j] };
                w[i] = w[i] + a * v[j];
            }
        }
        let s: T = w.iter().copied().sum();
        let w: Vec<T> = w.into_iter().map(|x| x / s).collect();
        let diff = w.iter().zip(&v).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max);
        v = w;
        if diff <= tol {
            break;
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubstitutionClass {
    pub primitive: bool,
    pub irreducible: bool,
    pub pisot: bool,
    pub unimodular: bool,
    pub quasiperiodic: bool,
    pub common_unimodular: bool,
}

/// The irreducible factor of the characteristic polynomial vanishing at `λ1`.
pub fn perron_factor(m: &OccurrenceMatrix) -> IntPoly {
    let (lam, _) = perron_root(m);
    let cp = m.char_poly();
    cp.factor_monic()
        .into_iter()
        .map(|(f, _)| f)
        .min_by(|a, b| a.eval_f64(lam).abs().total_cmp(&b.eval_f64(lam).abs()))
        .expect("characteristic polynomial has a factor")
}

/// `λ1 > 1`, its conjugates lie strictly inside the unit disk, and no other
/// eigenvalue of `M` lies outside it.
pub fn is_pisot(m: &OccurrenceMatrix) -> bool {
    let (lam, roots) = perron_root(m);
    if lam <= 1.0 + ROOT_MARGIN {
        return false;
    }
    let factor = perron_factor(m);
    let conj_ok = factor.roots().iter().filter(|z| (*z - lam).norm() > 1e-7).all(|z| z.norm() < 1.0 - ROOT_MARGIN);
    let mut dropped = false;
    let rest_ok = roots.iter().all(|z| {
        if !dropped && (z - lam).norm() < 1e-7 {
            dropped = true;
            return true;
        }
        z.norm() <= 1.0 + ROOT_MARGIN
    });
    conj_ok && rest_ok
}

/// Some common prefix or suffix letter shared by all images.
fn has_common_end(rule: &SubstitutionRule) -> bool {
    let imgs = rule.images();
    let first = imgs[0][0];
    let last = *imgs[0].last().unwrap();
    imgs.iter().all(|w| w[0] == first) || imgs.iter().all(|w| *w.last().unwrap() == last)
}

/// Classification flags; pass `f64::NAN` for `delta_u` to skip the
/// quasiperiodicity test.
pub fn classify_substitution(rule: &SubstitutionRule, delta_u: f64) -> Result<SubstitutionClass> {
    let m = occurrence_matrix(rule);
    if !m.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let irreducible = m.char_poly().is_irreducible();
    let pisot = is_pisot(&m);
    let unimodular = m.det().abs() == 1;
    let quasiperiodic = (delta_u - 1.0).abs() <= DELTA_U_TOL;
    let common_unimodular = irreducible && pisot && unimodular && has_common_end(rule);
    Ok(SubstitutionClass { primitive: true, irreducible, pisot, unimodular, quasiperiodic, common_unimodular })
}
