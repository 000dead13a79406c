//! Exact arithmetic in `Q` and in quadratic fields `Q(λ)`, with Gaussian
//! elimination over either.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Minimal field interface for exact elimination.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
    fn from_int(&self, n: &BigInt) -> Self;
}

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn from_int(&self, n: &BigInt) -> Self {
        BigRational::from(n.clone())
    }
}

/// `a + bλ` in `Q(λ)` with `λ² = c1 λ + c0` irreducible.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quad {
    pub a: BigRational,
    pub b: BigRational,
    c1: BigRational,
    c0: BigRational,
}

impl Quad {
    pub fn new(a: BigRational, b: BigRational, c1: &BigInt, c0: &BigInt) -> Self {
        Quad { a, b, c1: BigRational::from(c1.clone()), c0: BigRational::from(c0.clone()) }
    }

    /// The generator `λ` itself.
    pub fn generator(c1: &BigInt, c0: &BigInt) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), c1, c0)
    }

    pub fn rational(&self, q: BigRational) -> Self {
        Quad { a: q, b: BigRational::zero(), c1: self.c1.clone(), c0: self.c0.clone() }
    }

    fn conj(&self) -> Self {
        // λ' = c1 − λ
        Quad { a: &self.a + &self.b * &self.c1, b: -self.b.clone(), c1: self.c1.clone(), c0: self.c0.clone() }
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a + &self.a * &self.b * &self.c1 - &self.b * &self.b * &self.c0
    }

    /// Numeric value using the given real embedding of `λ`.
    pub fn to_f64(&self, lambda: f64) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * lambda
    }
}

impl Field for Quad {
    fn zero_like(&self) -> Self {
        self.rational(BigRational::zero())
    }
    fn one_like(&self) -> Self {
        self.rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn add(&self, o: &Self) -> Self {
        Quad { a: &self.a + &o.a, b: &self.b + &o.b, c1: self.c1.clone(), c0: self.c0.clone() }
    }
    fn sub(&self, o: &Self) -> Self {
        Quad { a: &self.a - &o.a, b: &self.b - &o.b, c1: self.c1.clone(), c0: self.c0.clone() }
    }
    fn mul(&self, o: &Self) -> Self {
        let bd = &self.b * &o.b;
        Quad {
            a: &self.a * &o.a + &bd * &self.c0,
            b: &self.a * &o.b + &self.b * &o.a + &bd * &self.c1,
            c1: self.c1.clone(),
            c0: self.c0.clone(),
        }
    }
    fn inv(&self) -> Self {
        let n = self.norm();
        let c = self.conj();
        Quad { a: &c.a / &n, b: &c.b / &n, c1: self.c1.clone(), c0: self.c0.clone() }
    }
    fn from_int(&self, n: &BigInt) -> Self {
        self.rational(BigRational::from(n.clone()))
    }
}

/// Basis of the right null space of `m` (rows of equal length).
pub fn nullspace<F: Field>(m: &[Vec<F>], proto: &F) -> Vec<Vec<F>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv();
        for v in a[r].iter_mut() {
            *v = v.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let s = a[r][k].mul(&f);
                    a[i][k] = a[i][k].sub(&s);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![proto.zero_like(); cols];
            v[fc] = proto.one_like();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = a[i][fc].zero_like().sub(&a[i][fc]);
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse<F: Field>(m: &[Vec<F>], proto: &F) -> Option<Vec<Vec<F>>> {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { proto.one_like() } else { proto.zero_like() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].inv();
        for v in a[c].iter_mut() {
            *v = v.mul(&inv);
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..2 * n {
                    let s = a[c][k].mul(&f);
                    a[i][k] = a[i][k].sub(&s);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>], proto: &F) -> Vec<Vec<F>> {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(proto.zero_like(), |acc, t| acc.add(&a[i][t].mul(&b[t][j]))))
                .collect()
        })
        .collect()
}

/// Rational matrix from an integer one.
pub fn to_rational(m: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    m.iter().map(|r| r.iter().map(|x| BigRational::from(x.clone())).collect()).collect()
}

/// Least common multiple of all denominators.
pub fn common_denominator(m: &[Vec<BigRational>]) -> BigInt {
    use num_integer::Integer;
    m.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Greatest common divisor of a list of rationals (as a positive rational).
pub fn rational_gcd(xs: &[BigRational]) -> BigRational {
    use num_integer::Integer;
    let den = xs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let g = xs.iter().fold(BigInt::zero(), |acc, q| acc.gcd(&(q.numer() * (&den / q.denom()))));
    BigRational::new(g.abs(), den)
}
