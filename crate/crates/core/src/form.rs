//! Binary forms (homogeneous bivariate polynomials) over [`Scalar`]
//! coefficients: evaluation, arithmetic, GCD, square-free decomposition and
//! resultants, in exact and float modes.
//!
//! A form of declared degree d stores d+1 coefficients; index k holds the
//! coefficient of X^k Z^(d−k). The point `[0:1]` (affine 0) is a root iff
//! coefficient 0 vanishes; `[1:0]` (∞) is a root iff the leading coefficients
//! vanish. The declared degree is part of the value: trailing zero leading
//! coefficients encode roots at infinity rather than a lower degree.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{gauss_int_gcd, same_mode, GaussianRational, Mode, Scalar, Tolerance};
use crate::sphere::{Involution, SpherePoint};

#[derive(Clone, Debug)]
pub struct BinaryForm {
    degree: usize,
    coeffs: Vec<Scalar>,
}

impl BinaryForm {
    /// Builds a form of declared degree `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "form needs at least one coefficient".into(),
            ));
        }
        same_mode(coeffs.iter(), "binary form coefficients")?;
        Ok(BinaryForm {
            degree: coeffs.len() - 1,
            coeffs,
        })
    }

    /// The zero form of a declared degree.
    pub fn zero(mode: Mode, degree: usize) -> Self {
        BinaryForm {
            degree,
            coeffs: vec![Scalar::zero(mode); degree + 1],
        }
    }

    pub fn constant(value: Scalar) -> Self {
        BinaryForm {
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// The linear form a·X + b·Z.
    pub fn linear(a: Scalar, b: Scalar) -> Result<Self> {
        BinaryForm::new(vec![b, a])
    }

    /// Convenience: form from integer coefficients (index k ↔ X^k Z^(d−k)).
    pub fn from_ints(mode: Mode, coeffs: &[i64]) -> Self {
        BinaryForm {
            degree: coeffs.len() - 1,
            coeffs: coeffs.iter().map(|&v| Scalar::from_int(mode, v)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    pub fn mode(&self) -> Mode {
        self.coeffs[0].mode()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> BinaryForm {
        BinaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.to_float()).collect(),
        }
    }

    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_complex()).collect()
    }

    /// Value at a representative (x, z).
    pub fn eval_xz(&self, x: &Scalar, z: &Scalar) -> Scalar {
        let d = self.degree;
        let mut zpow = Vec::with_capacity(d + 1);
        let mut p = Scalar::one(self.mode());
        for _ in 0..=d {
            zpow.push(p.clone());
            p = p.mul(z);
        }
        let mut acc = self.coeffs[d].clone();
        for k in (0..d).rev() {
            acc = acc.mul(x).add(&self.coeffs[k].mul(&zpow[d - k]));
        }
        acc
    }

    /// Value at the canonical representative of a sphere point.
    pub fn eval_point(&self, p: &SpherePoint) -> Result<Scalar> {
        if p.mode() != self.mode() {
            return Err(Error::ModeMismatch("form/point evaluation"));
        }
        Ok(self.eval_xz(p.x(), p.z()))
    }

    pub fn derivative_x(&self) -> BinaryForm {
        if self.degree == 0 {
            return BinaryForm::constant(Scalar::zero(self.mode()));
        }
        let coeffs = (1..=self.degree)
            .map(|k| self.coeffs[k].mul(&Scalar::from_int(self.mode(), k as i64)))
            .collect();
        BinaryForm {
            degree: self.degree - 1,
            coeffs,
        }
    }

    pub fn derivative_z(&self) -> BinaryForm {
        if self.degree == 0 {
            return BinaryForm::constant(Scalar::zero(self.mode()));
        }
        let d = self.degree;
        let coeffs = (0..d)
            .map(|k| self.coeffs[k].mul(&Scalar::from_int(self.mode(), (d - k) as i64)))
            .collect();
        BinaryForm {
            degree: d - 1,
            coeffs,
        }
    }

    pub fn scale(&self, s: &Scalar) -> BinaryForm {
        BinaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
        }
    }

    pub fn neg(&self) -> BinaryForm {
        BinaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn add(&self, other: &BinaryForm) -> Result<BinaryForm> {
        if self.degree != other.degree {
            return Err(Error::InvalidInput(
                "form addition needs equal degrees".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(BinaryForm {
            degree: self.degree,
            coeffs,
        })
    }

    pub fn sub(&self, other: &BinaryForm) -> Result<BinaryForm> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BinaryForm) -> BinaryForm {
        let d = self.degree + other.degree;
        let mode = self.mode();
        let mut coeffs = vec![Scalar::zero(mode); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        BinaryForm { degree: d, coeffs }
    }

    pub fn pow(&self, e: usize) -> BinaryForm {
        let mut acc = BinaryForm::constant(Scalar::one(self.mode()));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// F(aX + bZ, cX + dZ) for scalars (a, b; c, d).
    pub fn compose_linear(
        &self,
        a: &Scalar,
        b: &Scalar,
        c: &Scalar,
        d: &Scalar,
    ) -> Result<BinaryForm> {
        let top = BinaryForm::linear(a.clone(), b.clone())?;
        let bot = BinaryForm::linear(c.clone(), d.clone())?;
        Ok(compose_pair(self, &top, &bot))
    }

    /// Entrywise coefficient conjugation.
    pub fn conj_coeffs(&self) -> BinaryForm {
        BinaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// The form whose zero divisor is the τ-image of this form's zero
    /// divisor: coefficient conjugation for Conj, composed with the
    /// substitution (X, Z) ↦ (−Z, X) for Antipodal.
    pub fn tau_transport(&self, tau: Involution) -> BinaryForm {
        let conj = self.conj_coeffs();
        match tau {
            Involution::Conj => conj,
            Involution::Antipodal => {
                let mode = self.mode();
                let zero = Scalar::zero(mode);
                let one = Scalar::one(mode);
                let minus_one = one.neg();
                conj.compose_linear(&zero, &minus_one, &one, &zero)
                    .expect("linear substitution")
            }
        }
    }

    /// Splits off the root at infinity: returns the dehomogenized
    /// coefficient vector (index = power of x) and the multiplicity of ∞.
    /// In float mode, leading coefficients at or below `zero_thresh` (an
    /// absolute magnitude) count as zero.
    pub fn dehomogenize(&self, zero_thresh: f64) -> (Vec<Scalar>, usize) {
        let is_zero = |c: &Scalar| match c {
            Scalar::Exact(_) => c.is_zero(),
            Scalar::Float(v) => v.norm() <= zero_thresh,
        };
        let mut hi = self.degree;
        loop {
            if !is_zero(&self.coeffs[hi]) {
                break;
            }
            if hi == 0 {
                return (vec![Scalar::zero(self.mode())], self.degree);
            }
            hi -= 1;
        }
        (self.coeffs[..=hi].to_vec(), self.degree - hi)
    }

    /// Homogenizes a univariate coefficient vector (index = power of x) to a
    /// form of the declared degree ≥ deg(poly).
    pub fn from_poly(poly: &[Scalar], declared_degree: usize, mode: Mode) -> BinaryForm {
        let mut coeffs = poly.to_vec();
        while coeffs.len() < declared_degree + 1 {
            coeffs.push(Scalar::zero(mode));
        }
        BinaryForm {
            degree: declared_degree,
            coeffs,
        }
    }

    /// Canonical scaling. Exact: Gaussian-integer content 1 and the leading
    /// nonzero coefficient with positive real part (positive imaginary part
    /// when the real part is zero). Float: unit max-magnitude coefficient,
    /// with the first maximal one rotated to the positive real axis.
    pub fn normalize(&self) -> BinaryForm {
        if self.is_zero() {
            return self.clone();
        }
        match self.mode() {
            Mode::Exact => normalize_exact(self),
            Mode::Float => normalize_float(self),
        }
    }

    /// True when `other` equals a scalar multiple of `self`. Exact mode:
    /// exact decision; float mode: proportionality residual below `tol`.
    pub fn proportional_to(&self, other: &BinaryForm, tol: Tolerance) -> bool {
        if self.degree != other.degree {
            return false;
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return true,
            (true, false) | (false, true) => return false,
            _ => {}
        }
        if self.mode() == Mode::Exact && other.mode() == Mode::Exact {
            let a = normalize_exact(self);
            let b = normalize_exact(other);
            a.coeffs == b.coeffs
        } else {
            proportionality_residual(self, other) < tol.0
        }
    }
}

/// Scale-invariant measure of failure of `b ∝ a`: after scaling `b` by the
/// ratio at `a`'s largest coefficient, the maximum coefficient deviation
/// relative to the larger of the two scaled norms.
pub fn proportionality_residual(a: &BinaryForm, b: &BinaryForm) -> f64 {
    assert_eq!(a.degree, b.degree);
    let av = a.to_complex_vec();
    let bv = b.to_complex_vec();
    let pivot = av
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.norm().partial_cmp(&y.norm()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if av[pivot].norm() == 0.0 {
        return if bv.iter().all(|c| c.norm() == 0.0) {
            0.0
        } else {
            1.0
        };
    }
    let ratio = bv[pivot] / av[pivot];
    let scale_a = av.iter().map(|c| c.norm()).fold(0.0, f64::max) * ratio.norm();
    let scale_b = bv.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = scale_a.max(scale_b).max(f64::MIN_POSITIVE);
    av.iter()
        .zip(&bv)
        .map(|(x, y)| (y - ratio * x).norm())
        .fold(0.0, f64::max)
        / scale
}

/// outer(P, Q): substitution of a pair of forms of equal degree into a form.
pub fn compose_pair(outer: &BinaryForm, p: &BinaryForm, q: &BinaryForm) -> BinaryForm {
    assert_eq!(p.degree, q.degree, "pair substitution needs equal degrees");
    let k = outer.degree;
    let mode = outer.mode();
    // precompute powers
    let mut ppow = vec![BinaryForm::constant(Scalar::one(mode))];
    let mut qpow = vec![BinaryForm::constant(Scalar::one(mode))];
    for j in 1..=k {
        ppow.push(ppow[j - 1].mul(p));
        qpow.push(qpow[j - 1].mul(q));
    }
    let mut acc = BinaryForm::zero(mode, k * p.degree);
    for j in 0..=k {
        if outer.coeffs[j].is_zero() {
            continue;
        }
        let term = ppow[j].mul(&qpow[k - j]).scale(&outer.coeffs[j]);
        acc = acc.add(&term).expect("degrees agree");
    }
    acc
}

fn normalize_exact(f: &BinaryForm) -> BinaryForm {
    // common denominator
    let mut den = BigInt::one();
    for c in &f.coeffs {
        let g = c.as_exact().expect("exact mode");
        den = den.lcm(g.re.denom());
        den = den.lcm(g.im.denom());
    }
    let den_r = BigRational::from_integer(den);
    // Gaussian-integer content of the scaled coefficients
    let mut content: (BigInt, BigInt) = (BigInt::zero(), BigInt::zero());
    let mut nums = Vec::with_capacity(f.coeffs.len());
    for c in &f.coeffs {
        let g = c.as_exact().unwrap();
        let re = (&g.re * &den_r).to_integer();
        let im = (&g.im * &den_r).to_integer();
        content = gauss_int_gcd(&content, &(re.clone(), im.clone()));
        nums.push(GaussianRational::new(
            BigRational::from_integer(re),
            BigRational::from_integer(im),
        ));
    }
    let content_g = GaussianRational::new(
        BigRational::from_integer(content.0),
        BigRational::from_integer(content.1),
    );
    let inv = content_g.inv().expect("nonzero content for nonzero form");
    let mut coeffs: Vec<GaussianRational> = nums.iter().map(|c| c.mul(&inv)).collect();
    // unit adjustment: rotate the leading nonzero coefficient into the
    // quarter-plane re > 0, im ≥ 0 (the unique unit multiple there)
    let lead = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
    let l = coeffs[lead].clone();
    let units = [
        GaussianRational::one(),
        GaussianRational::i(),
        GaussianRational::from_i64(-1, 0),
        GaussianRational::from_i64(0, -1),
    ];
    let unit = units
        .iter()
        .find(|u| {
            let c = l.mul(u);
            c.re.is_positive() && !c.im.is_negative()
        })
        .expect("nonzero leading coefficient has a canonical unit multiple")
        .clone();
    for c in coeffs.iter_mut() {
        *c = c.mul(&unit);
    }
    BinaryForm {
        degree: f.degree,
        coeffs: coeffs.into_iter().map(Scalar::Exact).collect(),
    }
}

fn normalize_float(f: &BinaryForm) -> BinaryForm {
    let v = f.to_complex_vec();
    let (pivot, _) = v
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.norm().partial_cmp(&y.norm()).unwrap())
        .unwrap();
    let p = v[pivot];
    let scale = p.norm();
    let phase = p / scale;
    let factor = phase.conj() / scale;
    BinaryForm {
        degree: f.degree,
        coeffs: v
            .into_iter()
            .map(|c| Scalar::from_complex(c * factor))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Univariate polynomial helpers (coefficients low-to-high).
// ---------------------------------------------------------------------------

pub(crate) fn poly_deg_exact(p: &[GaussianRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn poly_divmod_exact(
    a: &[GaussianRational],
    b: &[GaussianRational],
) -> (Vec<GaussianRational>, Vec<GaussianRational>) {
    let db = poly_deg_exact(b).expect("division by zero polynomial");
    let mut rem: Vec<GaussianRational> = a.to_vec();
    let mut quot = vec![GaussianRational::zero(); a.len().saturating_sub(db).max(1)];
    let lead = &b[db];
    while let Some(dr) = poly_deg_exact(&rem) {
        if dr < db {
            break;
        }
        let q = rem[dr].div(lead).expect("nonzero leading coefficient");
        let shift = dr - db;
        for k in 0..=db {
            let t = q.mul(&b[k]);
            rem[shift + k] = rem[shift + k].sub(&t);
        }
        rem[dr] = GaussianRational::zero(); // clear rounding of the cancelled term
        if shift < quot.len() {
            quot[shift] = q;
        }
    }
    (quot, rem)
}

pub(crate) fn poly_gcd_exact(
    a: &[GaussianRational],
    b: &[GaussianRational],
) -> Vec<GaussianRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    loop {
        let dy = match poly_deg_exact(&y) {
            None => break,
            Some(d) => d,
        };
        if poly_deg_exact(&x).is_none() {
            x = y;
            break;
        }
        let (_, r) = poly_divmod_exact(&x, &y);
        x = y;
        y = r;
        // monic normalization keeps rational sizes in check
        if let Some(d) = poly_deg_exact(&y) {
            let inv = y[d].inv().unwrap();
            for c in y.iter_mut() {
                *c = c.mul(&inv);
            }
        }
        let _ = dy;
    }
    // monic gcd
    if let Some(d) = poly_deg_exact(&x) {
        let inv = x[d].inv().unwrap();
        for c in x.iter_mut() {
            *c = c.mul(&inv);
        }
        x.truncate(d + 1);
    } else {
        x = vec![GaussianRational::zero()];
    }
    x
}

pub(crate) fn poly_deriv_exact(p: &[GaussianRational]) -> Vec<GaussianRational> {
    if p.len() <= 1 {
        return vec![GaussianRational::zero()];
    }
    (1..p.len())
        .map(|k| p[k].mul(&GaussianRational::from_i64(k as i64, 0)))
        .collect()
}

pub(crate) fn poly_deg_float(p: &[Complex64], thresh: f64) -> Option<usize> {
    p.iter().rposition(|c| c.norm() > thresh)
}

fn poly_norm_float(p: &[Complex64]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub(crate) fn poly_divmod_float(
    a: &[Complex64],
    b: &[Complex64],
    db: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut rem = a.to_vec();
    let mut quot = vec![Complex64::new(0.0, 0.0); a.len().saturating_sub(db).max(1)];
    let lead = b[db];
    let mut dr = rem.len() - 1;
    loop {
        if dr < db {
            break;
        }
        let q = rem[dr] / lead;
        let shift = dr - db;
        for k in 0..=db {
            rem[shift + k] -= q * b[k];
        }
        rem[dr] = Complex64::new(0.0, 0.0);
        if shift < quot.len() {
            quot[shift] = q;
        }
        if dr == 0 {
            break;
        }
        dr -= 1;
    }
    rem.truncate(db.max(1));
    (quot, rem)
}

/// Approximate GCD by a thresholded Euclidean chain on max-normalized
/// polynomials: a remainder of relative magnitude below `theta` counts as
/// zero. Returns a max-normalized result.
pub(crate) fn poly_gcd_float(a: &[Complex64], b: &[Complex64], theta: f64) -> Vec<Complex64> {
    let norm_unit = |mut p: Vec<Complex64>| -> Vec<Complex64> {
        let n = poly_norm_float(&p);
        if n > 0.0 {
            for c in p.iter_mut() {
                *c /= n;
            }
        }
        p
    };
    let trim = |p: &[Complex64]| -> Vec<Complex64> {
        let n = poly_norm_float(p);
        match poly_deg_float(p, n * 1e-14) {
            None => vec![Complex64::new(0.0, 0.0)],
            Some(d) => p[..=d].to_vec(),
        }
    };
    let mut x = norm_unit(trim(a));
    let mut y = norm_unit(trim(b));
    if poly_norm_float(&x) == 0.0 {
        return y;
    }
    loop {
        let ny = poly_norm_float(&y);
        if ny <= theta {
            return norm_unit(trim(&x));
        }
        let dy = poly_deg_float(&y, ny * 1e-14).unwrap_or(0);
        if dy == 0 {
            return vec![Complex64::new(1.0, 0.0)];
        }
        let (_, r) = poly_divmod_float(&x, &y, dy);
        let rn = poly_norm_float(&r);
        if rn <= theta {
            return norm_unit(trim(&y));
        }
        x = y;
        y = norm_unit(trim(&r));
    }
}

pub(crate) fn poly_deriv_float(p: &[Complex64]) -> Vec<Complex64> {
    if p.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    (1..p.len()).map(|k| p[k] * k as f64).collect()
}

// ---------------------------------------------------------------------------
// Public form-level operations.
// ---------------------------------------------------------------------------

/// Greatest common divisor of two binary forms, normalized. In float mode
/// this is an approximate GCD at the given tolerance.
pub fn gcd_forms(a: &BinaryForm, b: &BinaryForm, tol: Tolerance) -> Result<BinaryForm> {
    if a.mode() != b.mode() {
        return Err(Error::ModeMismatch("gcd of forms"));
    }
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    if a.is_zero() {
        return Ok(b.normalize());
    }
    if b.is_zero() {
        return Ok(a.normalize());
    }
    let mode = a.mode();
    match mode {
        Mode::Exact => {
            let (pa, ia) = a.dehomogenize(0.0);
            let (pb, ib) = b.dehomogenize(0.0);
            let ga: Vec<GaussianRational> =
                pa.iter().map(|c| c.as_exact().unwrap().clone()).collect();
            let gb: Vec<GaussianRational> =
                pb.iter().map(|c| c.as_exact().unwrap().clone()).collect();
            let g = poly_gcd_exact(&ga, &gb);
            let gs: Vec<Scalar> = g.iter().map(|c| Scalar::Exact(c.clone())).collect();
            let fin = poly_deg_exact(&g).unwrap_or(0);
            let inf = ia.min(ib);
            let form = BinaryForm::from_poly(&gs[..=fin], fin + inf, mode);
            Ok(form.normalize())
        }
        Mode::Float => {
            let sa = a.max_abs();
            let sb = b.max_abs();
            let (pa, ia) = a.dehomogenize(sa * tol.0);
            let (pb, ib) = b.dehomogenize(sb * tol.0);
            let ca: Vec<Complex64> = pa.iter().map(|c| c.to_complex()).collect();
            let cb: Vec<Complex64> = pb.iter().map(|c| c.to_complex()).collect();
            let g = poly_gcd_float(&ca, &cb, tol.0);
            let gs: Vec<Scalar> = g.iter().map(|&c| Scalar::from_complex(c)).collect();
            let inf = ia.min(ib);
            let form = BinaryForm::from_poly(&gs, g.len() - 1 + inf, mode);
            Ok(form.normalize())
        }
    }
}

/// Square-free decomposition: pairwise-coprime square-free factors G_k with
/// the input proportional to Π G_k^k, exponents strictly increasing.
/// Degree-0 inputs decompose into the empty list.
pub fn squarefree_decomposition(
    f: &BinaryForm,
    tol: Tolerance,
) -> Result<Vec<(BinaryForm, usize)>> {
    squarefree_with_threshold(f, tol, tol.0)
}

/// Square-free decomposition with an explicit float GCD threshold (the root
/// extractor groups multiplicities at a looser radius than the base
/// tolerance).
pub(crate) fn squarefree_with_threshold(
    f: &BinaryForm,
    tol: Tolerance,
    theta: f64,
) -> Result<Vec<(BinaryForm, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let mode = f.mode();
    let (poly, inf_mult) = match mode {
        Mode::Exact => f.dehomogenize(0.0),
        Mode::Float => f.dehomogenize(f.max_abs() * tol.0),
    };
    // gcd chain: g_0 = p, g_{k+1} = gcd(g_k, g_k'); u_k = g_{k-1}/g_k has the
    // roots of multiplicity ≥ k, once each; w_k = u_k/u_{k+1} those of
    // multiplicity exactly k.
    let mut us: Vec<Vec<Scalar>> = Vec::new();
    match mode {
        Mode::Exact => {
            let mut g: Vec<GaussianRational> =
                poly.iter().map(|c| c.as_exact().unwrap().clone()).collect();
            while poly_deg_exact(&g).unwrap_or(0) >= 1 {
                let next = poly_gcd_exact(&g, &poly_deriv_exact(&g));
                let (u, r) = poly_divmod_exact(&g, &next);
                debug_assert!(poly_deg_exact(&r).is_none(), "exact sf division remainder");
                us.push(u.iter().map(|c| Scalar::Exact(c.clone())).collect());
                g = next;
            }
        }
        Mode::Float => {
            let mut g: Vec<Complex64> = poly.iter().map(|c| c.to_complex()).collect();
            let unit = |mut p: Vec<Complex64>| {
                let n = poly_norm_float(&p);
                if n > 0.0 {
                    for c in p.iter_mut() {
                        *c /= n;
                    }
                }
                p
            };
            g = unit(g);
            let mut guard = 0;
            while poly_deg_float(&g, 1e-13).unwrap_or(0) >= 1 {
                guard += 1;
                if guard > f.degree() + 2 {
                    return Err(Error::NumericalFailure(
                        "square-free chain failed to terminate".into(),
                    ));
                }
                let next = poly_gcd_float(&g, &poly_deriv_float(&g), theta);
                let dn = poly_deg_float(&next, 1e-13).unwrap_or(0);
                let (u, _r) = poly_divmod_float(&g, &next, dn);
                us.push(u.iter().map(|&c| Scalar::from_complex(c)).collect());
                g = unit(next);
            }
        }
    }
    // w_k = u_k / u_{k+1}
    let mut result: Vec<(BinaryForm, usize)> = Vec::new();
    for k in 1..=us.len() {
        let uk = &us[k - 1];
        let w: Vec<Scalar> = if k < us.len() {
            let unext = &us[k];
            match mode {
                Mode::Exact => {
                    let a: Vec<GaussianRational> =
                        uk.iter().map(|c| c.as_exact().unwrap().clone()).collect();
                    let b: Vec<GaussianRational> = unext
                        .iter()
                        .map(|c| c.as_exact().unwrap().clone())
                        .collect();
                    let (q, r) = poly_divmod_exact(&a, &b);
                    debug_assert!(poly_deg_exact(&r).is_none());
                    q.iter().map(|c| Scalar::Exact(c.clone())).collect()
                }
                Mode::Float => {
                    let a: Vec<Complex64> = uk.iter().map(|c| c.to_complex()).collect();
                    let b: Vec<Complex64> = unext.iter().map(|c| c.to_complex()).collect();
                    let db = poly_deg_float(&b, poly_norm_float(&b) * 1e-14).unwrap_or(0);
                    let (q, _) = poly_divmod_float(&a, &b, db);
                    q.iter().map(|&c| Scalar::from_complex(c)).collect()
                }
            }
        } else {
            uk.clone()
        };
        let dw = match mode {
            Mode::Exact => {
                let g: Vec<GaussianRational> =
                    w.iter().map(|c| c.as_exact().unwrap().clone()).collect();
                poly_deg_exact(&g).unwrap_or(0)
            }
            Mode::Float => {
                let g: Vec<Complex64> = w.iter().map(|c| c.to_complex()).collect();
                poly_deg_float(&g, poly_norm_float(&g) * 1e-10).unwrap_or(0)
            }
        };
        let dw = dw.min(w.len() - 1);
        let mut factor = BinaryForm::from_poly(&w[..=dw], dw, mode);
        if inf_mult == k {
            // the point at infinity joins the factor of its multiplicity
            factor = factor.mul(&BinaryForm::from_ints(mode, &[1, 0]));
        }
        if factor.degree() >= 1 {
            result.push((factor.normalize(), k));
        }
    }
    if inf_mult >= 1 && !result.iter().any(|(_, k)| *k == inf_mult) {
        // no finite root shares the multiplicity of the point at infinity
        result.push((BinaryForm::from_ints(mode, &[1, 0]), inf_mult));
        result.sort_by_key(|(_, k)| *k);
    }
    Ok(result)
}

/// Sylvester resultant of two binary forms at their declared degrees; the
/// point at infinity participates through vanishing leading coefficients.
/// Zero iff the forms share a projective root.
pub fn resultant(a: &BinaryForm, b: &BinaryForm) -> Result<Scalar> {
    if a.mode() != b.mode() {
        return Err(Error::ModeMismatch("resultant"));
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroForm);
    }
    let m = a.degree;
    let n = b.degree;
    if m + n == 0 {
        return Ok(Scalar::one(a.mode()));
    }
    let size = m + n;
    // rows: n shifted copies of a's coefficients (leading first), then m of b's
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(size);
    let arev: Vec<Scalar> = (0..=m).rev().map(|k| a.coeffs[k].clone()).collect();
    let brev: Vec<Scalar> = (0..=n).rev().map(|k| b.coeffs[k].clone()).collect();
    for i in 0..n {
        let mut row = vec![Scalar::zero(a.mode()); size];
        for (j, c) in arev.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![Scalar::zero(a.mode()); size];
        for (j, c) in brev.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    match a.mode() {
        Mode::Exact => {
            let mat: Vec<Vec<GaussianRational>> = rows
                .iter()
                .map(|r| r.iter().map(|c| c.as_exact().unwrap().clone()).collect())
                .collect();
            Ok(Scalar::Exact(det_exact(mat)))
        }
        Mode::Float => {
            let mat: Vec<Vec<Complex64>> = rows
                .iter()
                .map(|r| r.iter().map(|c| c.to_complex()).collect())
                .collect();
            Ok(Scalar::from_complex(det_float(mat)))
        }
    }
}

fn det_exact(mut m: Vec<Vec<GaussianRational>>) -> GaussianRational {
    let n = m.len();
    let mut det = GaussianRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let pivot = match pivot {
            None => return GaussianRational::zero(),
            Some(p) => p,
        };
        if pivot != col {
            m.swap(pivot, col);
            det = det.neg();
        }
        let p = m[col][col].clone();
        det = det.mul(&p);
        let pinv = p.inv().unwrap();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].mul(&pinv);
            for c in col..n {
                let t = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&t);
            }
        }
    }
    det
}

fn det_float(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for r in col + 1..n {
            let factor = m[r][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let t = factor * m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}
