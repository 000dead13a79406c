//! Čech H¹ of one-dimensional substitution tiling spaces from collared
//! Anderson–Putnam complexes, and the image of the cohomology trace.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{self, Field, Quad};
use crate::groups::LabelGroup;
use crate::intmat::{char_poly, smith_normal_form, Matrix};
use crate::perron::perron_factor;
use crate::poly::IntPoly;
use crate::substitution::{occurrence_matrix, SubstitutionRule, Word};

/// Largest power of σ searched for a letter whose image starts with itself.
pub const MAX_FIXED_POINT_POWER: u32 = 4;
/// Largest collar radius tried before giving up on rank stability.
pub const MAX_RADIUS: usize = 3;
const LANGUAGE_CAP: usize = 1 << 20;

/// Legal words of length `2r + 1` with the collared substitution matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollaredAlphabet {
    pub radius: usize,
    pub symbols: Vec<Word>,
    /// Base letter at the centre of each symbol.
    pub base: Vec<u8>,
    /// `matrix[i][j]` counts symbol `i` inside the collared image of `j`.
    pub matrix: Matrix<i64>,
}

impl CollaredAlphabet {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, w: &[u8]) -> Option<usize> {
        self.symbols.binary_search_by(|s| s.as_slice().cmp(w)).ok()
    }
}

/// Smallest `k ≤ 4` and letter `a` such that `σ^k(a)` starts with `a` and
/// grows, giving a one-sided fixed point of `σ^k`.
pub fn fixed_point_seed(rule: &SubstitutionRule) -> Result<(u32, u8)> {
    for k in 1..=MAX_FIXED_POINT_POWER {
        let p = rule.power(k);
        for a in 0..rule.size() as u8 {
            let img = p.image(a);
            if img.len() > 1 && img[0] == a {
                return Ok((k, a));
            }
        }
    }
    Err(Error::NoFixedPoint(MAX_FIXED_POINT_POWER))
}

fn factors(w: &[u8], len: usize) -> BTreeSet<Word> {
    if w.len() < len {
        return BTreeSet::new();
    }
    w.windows(len).map(<[u8]>::to_vec).collect()
}

/// Legal words of the given length, enumerated on the fixed point until the
/// set is unchanged over two consecutive iterations.
pub fn legal_words(rule: &SubstitutionRule, len: usize) -> Result<Vec<Word>> {
    if !occurrence_matrix(rule).is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let (k, a) = fixed_point_seed(rule)?;
    let sigma = rule.power(k);
    let mut w = vec![a];
    let mut prev = BTreeSet::new();
    let mut stable = 0;
    loop {
        let next = sigma.apply(&w);
        let f = factors(&next, len);
        if !f.is_empty() && f == prev {
            stable += 1;
            if stable == 2 {
                return Ok(f.into_iter().collect());
            }
        } else {
            stable = 0;
        }
        if next.len() > LANGUAGE_CAP {
            if f.is_empty() {
                return Err(Error::LengthLimit { requested: next.len() as u128, cap: LANGUAGE_CAP });
            }
            return Ok(f.into_iter().collect());
        }
        prev = f;
        w = next;
    }
}

/// Collared alphabet of radius `r` and the collared substitution matrix.
pub fn collar_radius(rule: &SubstitutionRule, r: usize) -> Result<CollaredAlphabet> {
    let symbols = legal_words(rule, 2 * r + 1)?;
    let idx: HashMap<&[u8], usize> = symbols.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let n = symbols.len();
    let mut matrix = Matrix::zeros(n, n);
    for (j, e) in symbols.iter().enumerate() {
        let left = rule.apply(&e[..r]);
        let mid = rule.image(e[r]);
        let mut full = left.clone();
        full.extend_from_slice(mid);
        full.extend(rule.apply(&e[r + 1..]));
        let off = left.len();
        for t in 0..mid.len() {
            let lo = (off + t).checked_sub(r).ok_or_else(|| Error::InvalidRule("collar too short".into()))?;
            let sub = full.get(lo..off + t + r + 1).ok_or_else(|| Error::InvalidRule("collar too short".into()))?;
            let i = *idx
                .get(sub)
                .ok_or_else(|| Error::InvalidRule(format!("illegal collared word {}", rule.render(sub))))?;
            matrix[(i, j)] += 1;
        }
    }
    let base = symbols.iter().map(|s| s[r]).collect();
    Ok(CollaredAlphabet { radius: r, symbols, base, matrix })
}

/// Radius-one collaring.
pub fn collar(rule: &SubstitutionRule) -> Result<CollaredAlphabet> {
    collar_radius(rule, 1)
}

/// Integer coboundary from vertices to edges of the Anderson–Putnam complex.
fn coboundary(rule: &SubstitutionRule, ca: &CollaredAlphabet) -> Result<Matrix<BigInt>> {
    let r = ca.radius;
    let n = ca.len();
    // endpoints: 2i is the left end of edge i, 2i + 1 the right end
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for w in legal_words(rule, 2 * r + 2)? {
        let (Some(a), Some(b)) = (ca.index_of(&w[..w.len() - 1]), ca.index_of(&w[1..])) else {
            return Err(Error::InvalidRule("inconsistent collared language".into()));
        };
        let (x, y) = (find(&mut parent, 2 * a + 1), find(&mut parent, 2 * b));
        parent[x] = y;
    }
    let roots: BTreeSet<usize> = (0..2 * n).map(|x| find(&mut parent, x)).collect();
    let vid: HashMap<usize, usize> = roots.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut d = Matrix::zeros(n, roots.len());
    for e in 0..n {
        let right = vid[&find(&mut parent, 2 * e + 1)];
        let left = vid[&find(&mut parent, 2 * e)];
        d[(e, right)] += BigInt::one();
        d[(e, left)] -= BigInt::one();
    }
    Ok(d)
}

/// Basis (as columns) of the lattice spanned by the columns of `m`.
fn column_lattice(m: &Matrix<BigInt>) -> Matrix<BigInt> {
    let s = smith_normal_form(m);
    let rank = s.rank();
    let rows = m.nrows();
    let mut b = Matrix::zeros(rows, rank);
    for j in 0..rank {
        for i in 0..rows {
            b[(i, j)] = &s.u_inv[(i, j)] * &s.d[(j, j)];
        }
    }
    b
}

/// The map induced on `Z^E / im D` by the pullback `Aᵀ`, or `None` when
/// `im D` is not invariant or the quotient has torsion.
fn induced_on_cokernel(at: &Matrix<BigInt>, d: &Matrix<BigInt>) -> Option<Matrix<BigInt>> {
    let n = at.nrows();
    let s = smith_normal_form(d);
    if s.invariant_factors().iter().any(|x| !x.is_one()) {
        return None;
    }
    let rk = s.rank();
    let conj = s.u.mul(at).mul(&s.u_inv);
    if (rk..n).any(|i| (0..rk).any(|j| !conj[(i, j)].is_zero())) {
        return None;
    }
    Some(conj.block(rk..n, rk..n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
enum Part {
    Unit,
    Prime(u64),
}

/// Direct limit `lim(Z^r, A)` in terms of `Z` and `Z[1/p]` summands.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectLimitGroup {
    pub free_rank: usize,
    /// `(p, multiplicity)` for each `Z[1/p]^multiplicity` summand.
    pub localized: Vec<(u64, usize)>,
    /// The matrix `A` whose limit is taken.
    pub presentation: Matrix<BigInt>,
    /// `A` restricted to its eventual image, in a lattice basis.
    pub eventual: Matrix<BigInt>,
    pub recognized: bool,
}

impl DirectLimitGroup {
    pub fn eventual_rank(&self) -> usize {
        self.eventual.nrows()
    }

    pub fn rank(&self) -> usize {
        self.free_rank + self.localized.iter().map(|&(_, m)| m).sum::<usize>()
    }

    /// Characteristic polynomial of the restricted map.
    pub fn char_poly(&self) -> IntPoly {
        IntPoly::new(char_poly(&self.eventual))
    }

    /// Same abstract group, ignoring the presentation.
    pub fn same_group(&self, o: &Self) -> bool {
        self.recognized && o.recognized && self.free_rank == o.free_rank && self.localized == o.localized
    }

    /// Parses names like `Z ⊕ Z[1/2] ⊕ Z^2[1/2]` or `Z^2`.
    pub fn parse_name(s: &str) -> Option<(usize, Vec<(u64, usize)>)> {
        let mut free = 0;
        let mut loc: BTreeMap<u64, usize> = BTreeMap::new();
        for part in s.split(['⊕', '+']).map(str::trim).filter(|p| !p.is_empty()) {
            let part = part.replace('²', "^2").replace('³', "^3");
            let (head, tail) = match part.find('[') {
                Some(i) => (&part[..i], Some(&part[i..])),
                None => (part.as_str(), None),
            };
            let (head, trailing) = match tail.and_then(|t| t.find(']').map(|i| (&t[..=i], &t[i + 1..]))) {
                Some((br, rest)) => ((head, Some(br)), rest),
                None => ((head, None), ""),
            };
            let exp_of = |s: &str| -> Option<usize> {
                match s.strip_prefix('^') {
                    Some(e) => e.parse().ok(),
                    None if s.is_empty() => Some(1),
                    None => None,
                }
            };
            let base = head.0.strip_prefix('Z')?;
            let mult = exp_of(base)? * exp_of(trailing)?;
            match head.1 {
                None => free += mult,
                Some(br) => {
                    let p: u64 = br.strip_prefix("[1/")?.strip_suffix(']')?.parse().ok()?;
                    *loc.entry(p).or_default() += mult;
                }
            }
        }
        Some((free, loc.into_iter().collect()))
    }
}

impl fmt::Display for DirectLimitGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.recognized {
            return write!(f, "unrecognized({})", self.char_poly());
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for &(p, m) in &self.localized {
            parts.push(if m == 1 { format!("Z[1/{p}]") } else { format!("Z[1/{p}]^{m}") });
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl Serialize for DirectLimitGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn prime_power(n: &BigInt) -> Option<(u64, u32)> {
    let n = n.abs().to_u64()?;
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let (mut m, mut k) = (n, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

fn classify_factor(f: &IntPoly) -> Option<Part> {
    let c = f.constant();
    if c.abs().is_one() {
        return Some(Part::Unit);
    }
    let (p, _) = prime_power(&c)?;
    let reduced = f.mod_p(&BigInt::from(p));
    let d = f.degree();
    let pure = reduced.iter().enumerate().all(|(i, x)| if i == d { x.is_one() } else { x.is_zero() });
    pure.then_some(Part::Prime(p))
}

/// Restriction of `a` to its eventual image `a^n Z^n`, in a lattice basis.
fn eventual_restriction(a: &Matrix<BigInt>) -> Matrix<BigInt> {
    let n = a.nrows();
    let b = column_lattice(&a.pow(n as u32));
    let s = b.ncols();
    if s == 0 {
        return Matrix::zeros(0, 0);
    }
    // a·b = b·m, solved through the Smith form of b: u·b = [diag(d); 0]
    let sm = smith_normal_form(&b);
    let ub = sm.u.mul(a).mul(&b).mul(&sm.v);
    let mut m = Matrix::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            m[(i, j)] = &ub[(i, j)] / &sm.d[(i, i)];
        }
    }
    // undo the column transform: m_b = v · m · v⁻¹ acting on b's coordinates
    let vq = field::to_rational(&sm.v.to_rows());
    let vinv = field::inverse(&vq, &BigRational::zero()).expect("unimodular");
    let mq = field::to_rational(&m.to_rows());
    let prod = field::mat_mul(&field::mat_mul(&vq, &mq, &BigRational::zero()), &vinv, &BigRational::zero());
    Matrix::from_rows(prod.into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect())
}

/// Direct limit of `Z^n → Z^n` under `a`.
///
/// On the eventual image, factors of the characteristic polynomial with unit
/// constant term contribute free summands, and a factor congruent to `x^d`
/// modulo a prime `p` with constant `±p^k` contributes `Z[1/p]^d`. With a
/// single prime the quotient by the `p`-part is a lattice, so the limit
/// splits. Several primes, or any other factor, leave the group unrecognized.
pub fn direct_limit(a: &Matrix<BigInt>) -> DirectLimitGroup {
    assert!(a.is_square(), "direct limit of a non-square matrix");
    let eventual = eventual_restriction(a);
    let mut out = DirectLimitGroup {
        free_rank: 0,
        localized: Vec::new(),
        presentation: a.clone(),
        eventual: eventual.clone(),
        recognized: false,
    };
    let s = eventual.nrows();
    if s == 0 {
        out.recognized = true;
        return out;
    }
    let cp = IntPoly::new(char_poly(&eventual));
    let mut parts: BTreeMap<Part, IntPoly> = BTreeMap::new();
    for (f, mult) in cp.factor_monic() {
        let Some(kind) = classify_factor(&f) else { return out };
        let entry = parts.entry(kind).or_insert_with(IntPoly::one);
        for _ in 0..mult {
            *entry = entry.mul(&f);
        }
    }
    let primes = parts.keys().filter(|k| matches!(k, Part::Prime(_))).count();
    if primes > 1 {
        return out;
    }
    for (kind, q) in &parts {
        match *kind {
            Part::Unit => out.free_rank = q.degree(),
            Part::Prime(p) => out.localized.push((p, q.degree())),
        }
    }
    out.recognized = true;
    out
}

/// Čech H¹ of the tiling space with the collaring data used.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CechH1 {
    pub group: DirectLimitGroup,
    pub radius: usize,
    pub collared_symbols: usize,
    pub vertices: usize,
    /// Minimal period when the language is periodic.
    pub period: Option<usize>,
}

/// Minimal period of the language when its factor complexity stops growing.
pub fn language_period(rule: &SubstitutionRule) -> Result<Option<usize>> {
    let mut prev = legal_words(rule, 1)?.len();
    for n in 2..=4 * rule.size() + 4 {
        let p = legal_words(rule, n)?.len();
        if p == prev {
            return Ok(Some(p));
        }
        prev = p;
    }
    Ok(None)
}

fn h1_at_radius(rule: &SubstitutionRule, r: usize) -> Result<(DirectLimitGroup, CollaredAlphabet, usize)> {
    let ca = collar_radius(rule, r)?;
    let d = coboundary(rule, &ca)?;
    let at = ca.matrix.map(|&x| BigInt::from(x)).transpose();
    let group = match induced_on_cokernel(&at, &d) {
        Some(f) => direct_limit(&f),
        None => DirectLimitGroup {
            free_rank: 0,
            localized: Vec::new(),
            presentation: at.clone(),
            eventual: Matrix::zeros(0, 0),
            recognized: false,
        },
    };
    Ok((group, ca, d.ncols()))
}

/// Čech H¹ as the direct limit of the pullback of the collared matrix on the
/// cokernel of the coboundary. The radius is raised until two consecutive
/// radii agree.
pub fn cech_h1(rule: &SubstitutionRule) -> Result<CechH1> {
    if let Some(q) = language_period(rule)? {
        let one = Matrix::identity(1);
        return Ok(CechH1 {
            group: DirectLimitGroup {
                free_rank: 1,
                localized: Vec::new(),
                presentation: one.clone(),
                eventual: one,
                recognized: true,
            },
            radius: 0,
            collared_symbols: q,
            vertices: q,
            period: Some(q),
        });
    }
    let mut cur = h1_at_radius(rule, 1)?;
    for r in 1..=MAX_RADIUS {
        let next = h1_at_radius(rule, r + 1)?;
        if cur.0.same_group(&next.0) {
            break;
        }
        cur = next;
    }
    let (group, ca, vertices) = cur;
    Ok(CechH1 { group, radius: ca.radius, collared_symbols: ca.len(), vertices, period: None })
}

/// Exact collared frequencies and the generated trace group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceImage {
    pub group: LabelGroup,
    pub lambda: f64,
    /// Collared symbols rendered as strings.
    pub symbols: Vec<String>,
    /// Frequencies as exact strings, `a` or `a + b*lambda`.
    pub frequencies: Vec<String>,
    pub frequency_values: Vec<f64>,
}

fn unrecognized(values: &[f64]) -> Error {
    let g: Vec<String> = values.iter().map(|v| format!("{v:.15}")).collect();
    Error::Unrecognized(format!("trace generators [{}]", g.join(", ")))
}

/// Positive eigenvector of `a` (as rows) for the eigenvalue `lambda`,
/// normalized to unit sum.
fn perron_vector<F: Field>(a: &Matrix<i64>, lambda: &F) -> Option<Vec<F>> {
    let n = a.nrows();
    let rows: Vec<Vec<F>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = lambda.from_int(&BigInt::from(a[(i, j)]));
                    if i == j {
                        x.sub(lambda)
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let ns = field::nullspace(&rows, lambda);
    let [v] = ns.as_slice() else { return None };
    let total = v.iter().fold(lambda.zero_like(), |acc, x| acc.add(x));
    if total.is_zero() {
        return None;
    }
    let inv = total.inv();
    Some(v.iter().map(|x| x.mul(&inv)).collect())
}

/// Row-lattice basis of integer vectors.
fn row_lattice(rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let m = Matrix::from_rows(rows).transpose();
    let b = column_lattice(&m);
    (0..b.ncols()).map(|j| (0..b.nrows()).map(|i| b[(i, j)].clone()).collect()).collect()
}

/// Image of the cohomology trace: the group generated by `λ^{-k} f_i`.
pub fn trace_image(rule: &SubstitutionRule) -> Result<LabelGroup> {
    trace_image_detail(rule).map(|t| t.group)
}

pub fn trace_image_detail(rule: &SubstitutionRule) -> Result<TraceImage> {
    if let Some(q) = language_period(rule)? {
        let words = legal_words(rule, q)?;
        return Ok(TraceImage {
            group: LabelGroup::Cyclic { q: q as i64 },
            lambda: 1.0,
            symbols: words.iter().map(|w| rule.render(w)).collect(),
            frequencies: vec![format!("1/{q}"); words.len()],
            frequency_values: vec![1.0 / q as f64; words.len()],
        });
    }
    let h = cech_h1(rule)?;
    let ca = collar_radius(rule, h.radius)?;
    let symbols: Vec<String> = ca.symbols.iter().map(|w| rule.render(w)).collect();
    let factor = perron_factor(&occurrence_matrix(rule));
    let c = factor.coeffs();
    match factor.degree() {
        1 => {
            let lam = -c[0].clone();
            let f = perron_vector(&ca.matrix, &BigRational::from(lam.clone()))
                .ok_or_else(|| Error::Unrecognized("collared Perron space is not one-dimensional".into()))?;
            let values: Vec<f64> = f.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let frequencies = f.iter().map(|x| x.to_string()).collect();
            let (p, _) = prime_power(&lam).ok_or_else(|| unrecognized(&values))?;
            let g = field::rational_gcd(&f);
            let (num, den) = (g.numer().to_i64(), g.denom().to_i64());
            let (Some(num), Some(den)) = (num, den) else { return Err(unrecognized(&values)) };
            let group = LabelGroup::scaled_localized(num, den, p as i64)?;
            Ok(TraceImage { group, lambda: lam.to_f64().unwrap_or(f64::NAN), symbols, frequencies, frequency_values: values })
        }
        2 if c[0].abs().is_one() => {
            // λ² = c1 λ + c0
            let (c1, c0) = (-c[1].clone(), -c[0].clone());
            let disc = (&c1 * &c1 + BigInt::from(4) * &c0).to_f64().unwrap_or(f64::NAN);
            let lam_f = (c1.to_f64().unwrap_or(f64::NAN) + disc.sqrt()) / 2.0;
            let lam = Quad::generator(&c1, &c0);
            let f = perron_vector(&ca.matrix, &lam)
                .ok_or_else(|| Error::Unrecognized("collared Perron space is not one-dimensional".into()))?;
            let values: Vec<f64> = f.iter().map(|x| x.to_f64(lam_f)).collect();
            let frequencies = f.iter().map(quad_string).collect();
            let group = quadratic_trace_group(&f, &lam, lam_f).ok_or_else(|| unrecognized(&values))?;
            Ok(TraceImage { group, lambda: lam_f, symbols, frequencies, frequency_values: values })
        }
        _ => {
            let roots = factor.roots();
            let lam = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            Err(Error::Unrecognized(format!("Perron eigenvalue {lam:.15} of degree {}", factor.degree())))
        }
    }
}

fn quad_string(x: &Quad) -> String {
    if Zero::is_zero(&x.b) {
        return x.a.to_string();
    }
    let sign = if x.b.is_negative() { "-" } else { "+" };
    format!("{} {sign} {}*lambda", x.a, x.b.abs())
}

/// `Z[λ]`-span of the frequencies, written as `Z + ρZ` when `1` is a
/// primitive lattice vector.
fn quadratic_trace_group(f: &[Quad], lam: &Quad, lam_f: f64) -> Option<LabelGroup> {
    let mut gens: Vec<Quad> = f.to_vec();
    gens.extend(f.iter().map(|x| x.mul(lam)));
    let den = gens.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.a.denom()).lcm(x.b.denom()));
    let scale = BigRational::from(den.clone());
    let int_rows: Vec<Vec<BigInt>> =
        gens.iter().map(|x| vec![(&x.a * &scale).to_integer(), (&x.b * &scale).to_integer()]).collect();
    let basis = row_lattice(int_rows);
    let [v1, v2] = basis.as_slice() else { return None };
    // coordinates of 1 = (den, 0) in the basis
    let det = &v1[0] * &v2[1] - &v1[1] * &v2[0];
    let (x, y) = (&den * &v2[1], -(&den * &v1[1]));
    if !(x.is_multiple_of(&det) && y.is_multiple_of(&det)) {
        return None;
    }
    let (x, y) = (x / &det, y / &det);
    let eg = x.extended_gcd(&y);
    if !eg.gcd.is_one() {
        return None;
    }
    // x·e2 − y·e1 = 1 with e1 = −eg.y, e2 = eg.x
    let (e1, e2) = (-eg.y, eg.x);
    let w = [&e1 * &v1[0] + &e2 * &v2[0], &e1 * &v1[1] + &e2 * &v2[1]];
    let to_f = |z: &BigInt| BigRational::new(z.clone(), den.clone()).to_f64().unwrap_or(f64::NAN);
    let rho = to_f(&w[0]) + to_f(&w[1]) * lam_f;
    if w[1].is_zero() {
        return None;
    }
    Some(LabelGroup::two_gen(rho))
}
