//! Scalars in two arithmetic modes: exact Gaussian rationals and complex doubles.
//!
//! Exact mode is closed and lossless; float mode carries the library-wide
//! tolerance. Mixing modes in one computation is forbidden: public entry
//! points return [`Error::ModeMismatch`], internal arithmetic panics (a panic
//! here is a bug, not bad input).

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

/// Float-mode tolerance knob. Derived radii are fixed multiples of the base
/// value so there is a single dial for the whole library.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(1e-9)
    }
}

impl Tolerance {
    /// Separation below which two candidate points are the same point.
    pub fn cluster_radius(self) -> f64 {
        self.0
    }

    /// Radius for divisor point matching and multiplicity grouping. Looser
    /// than the cluster radius: an m-fold root computed through an
    /// approximate fiber splits by roughly machine-epsilon^(1/m).
    pub fn matching_radius(self) -> f64 {
        100.0 * self.0
    }

    /// Rejection radius around critical points when choosing probe points.
    pub fn probe_radius(self) -> f64 {
        10.0 * self.0
    }
}

/// Element of Q(i): `re + im·i` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_i64(re: i64, im: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn from_ratio(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            im: BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        }
    }

    pub fn zero() -> Self {
        Self::from_i64(0, 0)
    }

    pub fn one() -> Self {
        Self::from_i64(1, 0)
    }

    pub fn i() -> Self {
        Self::from_i64(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    pub fn neg(&self) -> Self {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |self|² = re² + im², a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    pub fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})+({})i", self.re, self.im)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back through a scaled division for out-of-range big integers
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// A coefficient in one of the two modes. Arithmetic between different modes
/// panics; validate with [`same_mode`] at API boundaries.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(GaussianRational),
    Float(Complex64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(GaussianRational::zero()),
            Mode::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(GaussianRational::one()),
            Mode::Float => Scalar::Float(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn from_int(mode: Mode, v: i64) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(GaussianRational::from_i64(v, 0)),
            Mode::Float => Scalar::Float(Complex64::new(v as f64, 0.0)),
        }
    }

    pub fn exact_int(re: i64, im: i64) -> Self {
        Scalar::Exact(GaussianRational::from_i64(re, im))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn from_complex(c: Complex64) -> Self {
        Scalar::Float(c)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.conj()),
            Scalar::Float(c) => Scalar::Float(c.conj()),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.neg()),
            Scalar::Float(c) => Scalar::Float(-c),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.add(b)),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a + b),
            _ => panic!("mixed-mode scalar addition"),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.sub(b)),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a - b),
            _ => panic!("mixed-mode scalar subtraction"),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.mul(b)),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a * b),
            _ => panic!("mixed-mode scalar multiplication"),
        }
    }

    /// Division; `None` when the divisor is exactly zero.
    pub fn div(&self, rhs: &Self) -> Option<Self> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.div(b).map(Scalar::Exact),
            (Scalar::Float(a), Scalar::Float(b)) => {
                if b.re == 0.0 && b.im == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(a / b))
                }
            }
            _ => panic!("mixed-mode scalar division"),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        Scalar::one(self.mode()).div(self)
    }

    /// Modulus as f64 (exact values are lowered).
    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact(g) => rational_to_f64(&g.norm_sqr()).sqrt(),
            Scalar::Float(c) => c.norm(),
        }
    }

    /// |self|² in the same mode (always a real value).
    pub fn norm_sqr(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => {
                Scalar::Exact(GaussianRational::new(g.norm_sqr(), BigRational::zero()))
            }
            Scalar::Float(c) => Scalar::Float(Complex64::new(c.norm_sqr(), 0.0)),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_complex(),
            Scalar::Float(c) => *c,
        }
    }

    /// Lower to float mode (identity on float scalars).
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex())
    }

    pub fn as_exact(&self) -> Option<&GaussianRational> {
        match self {
            Scalar::Exact(g) => Some(g),
            Scalar::Float(_) => None,
        }
    }

    /// Exact: im == 0. Float: im == 0.0 bit-exactly.
    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_real(),
            Scalar::Float(c) => c.im == 0.0,
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{:?}", g),
            Scalar::Float(c) => write!(f, "{}", c),
        }
    }
}

/// Checks a slice of scalars shares a single mode and returns it.
pub fn same_mode<'a, I>(items: I, what: &'static str) -> Result<Mode>
where
    I: IntoIterator<Item = &'a Scalar>,
{
    let mut mode = None;
    for s in items {
        match mode {
            None => mode = Some(s.mode()),
            Some(m) if m == s.mode() => {}
            Some(_) => return Err(Error::ModeMismatch(what)),
        }
    }
    mode.ok_or(Error::ModeMismatch(what))
}

// ---------------------------------------------------------------------------
// Gaussian integers: gcd and the two-squares decomposition.
// ---------------------------------------------------------------------------

/// Gaussian integer a + b·i as a BigInt pair.
pub type GaussInt = (BigInt, BigInt);

fn gi_mul(a: &GaussInt, b: &GaussInt) -> GaussInt {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn gi_conj(a: &GaussInt) -> GaussInt {
    (a.0.clone(), -a.1.clone())
}

fn gi_norm(a: &GaussInt) -> BigInt {
    &a.0 * &a.0 + &a.1 * &a.1
}

fn gi_is_zero(a: &GaussInt) -> bool {
    a.0.is_zero() && a.1.is_zero()
}

// nearest-integer division in Z[i]
fn gi_div_round(a: &GaussInt, b: &GaussInt) -> GaussInt {
    let n = gi_norm(b);
    let prod = gi_mul(a, &gi_conj(b));
    let round = |x: BigInt| -> BigInt {
        // round x/n to nearest integer
        let two_x = &x * 2;
        let num = if x.is_negative() {
            two_x - &n
        } else {
            two_x + &n
        };
        num / (&n * 2)
    };
    (round(prod.0), round(prod.1))
}

/// Euclidean gcd in Z\[i\], up to a unit.
pub fn gauss_int_gcd(a: &GaussInt, b: &GaussInt) -> GaussInt {
    let mut x = a.clone();
    let mut y = b.clone();
    while !gi_is_zero(&y) {
        let q = gi_div_round(&x, &y);
        let r = (
            &x.0 - (&q.0 * &y.0 - &q.1 * &y.1),
            &x.1 - (&q.0 * &y.1 + &q.1 * &y.0),
        );
        x = y;
        y = r;
    }
    x
}

/// Writes n ≥ 0 as a² + b² if possible. Factoring is by trial division with a
/// bound, so very large n may return `None` even when representable.
pub fn sum_of_two_squares(n: &BigInt) -> Option<GaussInt> {
    if n.is_negative() {
        return None;
    }
    if n.is_zero() {
        return Some((BigInt::zero(), BigInt::zero()));
    }
    let mut m = n.clone();
    // result as a Gaussian integer product
    let mut acc: GaussInt = (BigInt::one(), BigInt::zero());
    let mut p = BigInt::from(2);
    let bound = BigInt::from(2_000_000u64);
    while &p * &p <= m {
        if p > bound {
            return None; // factoring effort capped
        }
        if (&m % &p).is_zero() {
            let mut e = 0u32;
            while (&m % &p).is_zero() {
                m /= &p;
                e += 1;
            }
            if p == BigInt::from(2) {
                // 2 = -i (1+i)^2; modulus is what matters
                let one_plus_i: GaussInt = (BigInt::one(), BigInt::one());
                for _ in 0..e {
                    acc = gi_mul(&acc, &one_plus_i);
                }
            } else if (&p % 4u32) == BigInt::from(3) {
                if e % 2 != 0 {
                    return None;
                }
                let half = num::pow::pow(p.clone(), (e / 2) as usize);
                acc = gi_mul(&acc, &(half, BigInt::zero()));
            } else {
                let pi = gaussian_prime_above(&p)?;
                for _ in 0..e {
                    acc = gi_mul(&acc, &pi);
                }
            }
        }
        p += 1u32;
    }
    if m > BigInt::one() {
        // m is prime
        if (&m % 4u32) == BigInt::from(3) {
            return None;
        }
        if m == BigInt::from(2) {
            acc = gi_mul(&acc, &(BigInt::one(), BigInt::one()));
        } else {
            let pi = gaussian_prime_above(&m)?;
            acc = gi_mul(&acc, &pi);
        }
    }
    debug_assert_eq!(gi_norm(&acc), *n);
    Some(acc)
}

// For prime p ≡ 1 (mod 4), find π ∈ Z[i] with N(π) = p via a square root of
// -1 mod p followed by a Gaussian gcd.
fn gaussian_prime_above(p: &BigInt) -> Option<GaussInt> {
    let one = BigInt::one();
    let exp = (p - &one) / 4u32;
    let mut c = BigInt::from(2);
    for _ in 0..64 {
        let x = c.modpow(&exp, p);
        if (&x * &x % p) == (p - &one) {
            let g = gauss_int_gcd(&(p.clone(), BigInt::zero()), &(x, one.clone()));
            if gi_norm(&g) == *p {
                return Some(g);
            }
        }
        c += 1u32;
    }
    None
}

/// Finds s ∈ Q(i) with |s|² = λ for a positive rational λ, when λ is a norm
/// from Q(i). Returns `None` otherwise (or when factoring gives up).
pub fn gaussian_norm_sqrt(lambda: &BigRational) -> Option<GaussianRational> {
    if lambda.is_negative() || lambda.is_zero() {
        return None;
    }
    // |s|² = p/q  ⇔  |s·q|² = p·q
    let n = lambda.numer() * lambda.denom();
    let (a, b) = sum_of_two_squares(&n)?;
    let q = BigRational::from_integer(lambda.denom().clone());
    Some(GaussianRational::new(
        BigRational::from_integer(a) / &q,
        BigRational::from_integer(b) / &q,
    ))
}

// ---------------------------------------------------------------------------
// Canonical ordering of complex values (used for deterministic divisor order).
// ---------------------------------------------------------------------------

/// Total order on complex values: by modulus, then by argument in [0, 2π).
/// Works exactly for exact scalars and by f64 comparison for float ones.
pub fn cmp_complex(a: &Scalar, b: &Scalar) -> Ordering {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => {
            let m = x.norm_sqr().cmp(&y.norm_sqr());
            if m != Ordering::Equal {
                return m;
            }
            let sa = sector_exact(x);
            let sb = sector_exact(y);
            if sa != sb {
                return sa.cmp(&sb);
            }
            // same modulus, same sector: compare arguments via im(conj(x)·y)
            let cross = &x.re * &y.im - &x.im * &y.re;
            if cross.is_positive() {
                Ordering::Less
            } else if cross.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
        _ => {
            let x = a.to_complex();
            let y = b.to_complex();
            let m = x
                .norm_sqr()
                .partial_cmp(&y.norm_sqr())
                .unwrap_or(Ordering::Equal);
            if m != Ordering::Equal {
                return m;
            }
            let sa = sector_float(x);
            let sb = sector_float(y);
            if sa != sb {
                return sa.cmp(&sb);
            }
            let cross = x.re * y.im - x.im * y.re;
            if cross > 0.0 {
                Ordering::Less
            } else if cross < 0.0 {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
    }
}

// Sector index of the argument in [0, 2π): 0 on the positive real axis,
// increasing counterclockwise. Zero maps to sector 0.
fn sector_exact(x: &GaussianRational) -> u8 {
    let re = &x.re;
    let im = &x.im;
    if im.is_zero() {
        if re.is_negative() {
            4
        } else {
            0
        }
    } else if im.is_positive() {
        if re.is_positive() {
            1
        } else if re.is_zero() {
            2
        } else {
            3
        }
    } else if re.is_negative() {
        5
    } else if re.is_zero() {
        6
    } else {
        7
    }
}

fn sector_float(x: Complex64) -> u8 {
    if x.im == 0.0 {
        if x.re < 0.0 {
            4
        } else {
            0
        }
    } else if x.im > 0.0 {
        if x.re > 0.0 {
            1
        } else if x.re == 0.0 {
            2
        } else {
            3
        }
    } else if x.re < 0.0 {
        5
    } else if x.re == 0.0 {
        6
    } else {
        7
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(re: i64, im: i64) -> GaussianRational {
        GaussianRational::from_i64(re, im)
    }

    #[test]
    fn gaussian_rational_field_ops() {
        let a = gr(1, 2);
        let b = gr(3, -1);
        let prod = a.mul(&b); // (1+2i)(3-i) = 5+5i
        assert_eq!(prod, gr(5, 5));
        let back = prod.div(&b).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.conj(), gr(1, -2));
        assert_eq!(a.norm_sqr(), BigRational::from_integer(BigInt::from(5)));
    }

    #[test]
    #[should_panic(expected = "mixed-mode")]
    fn mixed_mode_arithmetic_panics() {
        let _ = Scalar::exact_int(1, 0).add(&Scalar::float(1.0, 0.0));
    }

    #[test]
    fn same_mode_detects_mismatch() {
        let v = [Scalar::exact_int(1, 0), Scalar::float(1.0, 0.0)];
        assert!(same_mode(v.iter(), "test").is_err());
        let w = [Scalar::float(1.0, 0.0), Scalar::float(2.0, 0.0)];
        assert_eq!(same_mode(w.iter(), "test").unwrap(), Mode::Float);
    }

    #[test]
    fn gauss_int_gcd_small() {
        // gcd(5, 1+2i) has norm 5 since 5 = (1+2i)(1-2i)
        let g = gauss_int_gcd(
            &(BigInt::from(5), BigInt::zero()),
            &(BigInt::from(1), BigInt::from(2)),
        );
        assert_eq!(gi_norm(&g), BigInt::from(5));
        // gcd of coprime elements is a unit
        let g = gauss_int_gcd(
            &(BigInt::from(3), BigInt::zero()),
            &(BigInt::from(1), BigInt::from(1)),
        );
        assert_eq!(gi_norm(&g), BigInt::from(1));
    }

    #[test]
    fn two_squares_basic() {
        for (n, ok) in [
            (0i64, true),
            (1, true),
            (2, true),
            (3, false),
            (4, true),
            (5, true),
            (6, false),
            (9, true),
            (25, true),
            (21, false),
            (325, true),
        ] {
            let r = sum_of_two_squares(&BigInt::from(n));
            assert_eq!(r.is_some(), ok, "n={}", n);
            if let Some((a, b)) = r {
                assert_eq!(&a * &a + &b * &b, BigInt::from(n));
            }
        }
    }

    #[test]
    fn norm_sqrt_rational() {
        // λ = 5/9: |s|² with s = (2+i)/3
        let lam = BigRational::new(BigInt::from(5), BigInt::from(9));
        let s = gaussian_norm_sqrt(&lam).unwrap();
        assert_eq!(s.norm_sqr(), lam);
        // λ = 3 is not a norm
        assert!(gaussian_norm_sqrt(&BigRational::from_integer(BigInt::from(3))).is_none());
    }

    #[test]
    fn complex_order_modulus_then_argument() {
        // e^{iπ/4}-like comparisons using exact points 1+i vs -1-i vs 2+2i
        let a = Scalar::Exact(gr(1, 1));
        let b = Scalar::Exact(gr(-1, -1));
        let c = Scalar::Exact(gr(2, 2));
        assert_eq!(cmp_complex(&a, &b), Ordering::Less); // same modulus, smaller argument
        assert_eq!(cmp_complex(&a, &c), Ordering::Less); // smaller modulus
        assert_eq!(cmp_complex(&b, &c), Ordering::Less);
        // positive real axis comes first
        let one = Scalar::Exact(gr(1, 0));
        assert_eq!(cmp_complex(&one, &a), Ordering::Less);
    }
}
