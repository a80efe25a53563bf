//! Rational functions on the sphere as coprime pairs of binary forms.

use crate::error::{Error, Result};
use crate::form::{gcd_forms, BinaryForm};
use crate::mobius::Mobius;
use crate::scalar::{Mode, Scalar, Tolerance};
use crate::sphere::SpherePoint;

/// A holomorphic map f = `[P : Q]` of the sphere: two coprime binary forms of
/// equal degree, not both zero, under a joint canonical scaling. The degree
/// of the map is the common form degree after coprime reduction; degree 0 is
/// a constant map.
#[derive(Clone, Debug)]
pub struct RationalMap {
    p: BinaryForm,
    q: BinaryForm,
}

impl RationalMap {
    /// Builds a map from numerator and denominator forms, homogenizing to a
    /// common degree, removing any common factor, and rescaling canonically.
    pub fn new(p: BinaryForm, q: BinaryForm, tol: Tolerance) -> Result<Self> {
        if p.mode() != q.mode() {
            return Err(Error::ModeMismatch("rational map forms"));
        }
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidInput("rational map [0 : 0]".into()));
        }
        let mode = p.mode();
        let d = p.degree().max(q.degree());
        let p = BinaryForm::from_poly(p.coeffs(), d, mode);
        let q = BinaryForm::from_poly(q.coeffs(), d, mode);
        // coprime reduction
        let (p, q) = if p.is_zero() || q.is_zero() {
            // constant 0 or ∞
            if p.is_zero() {
                (
                    BinaryForm::zero(mode, 0),
                    BinaryForm::constant(Scalar::one(mode)),
                )
            } else {
                (
                    BinaryForm::constant(Scalar::one(mode)),
                    BinaryForm::zero(mode, 0),
                )
            }
        } else {
            let g = gcd_forms(&p, &q, tol)?;
            if g.degree() >= 1 {
                (form_div(&p, &g)?, form_div(&q, &g)?)
            } else {
                (p, q)
            }
        };
        Ok(Self::from_coprime(p, q))
    }

    /// Builds a map from univariate coefficient vectors (index = power of z).
    pub fn from_univariate(num: &[Scalar], den: &[Scalar], tol: Tolerance) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(Error::InvalidInput("empty coefficient array".into()));
        }
        let trim = |v: &[Scalar]| -> Vec<Scalar> {
            let last = v.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
            v[..=last].to_vec()
        };
        let n = trim(num);
        let d = trim(den);
        let deg = (n.len() - 1).max(d.len() - 1);
        let mode = n[0].mode();
        let p = BinaryForm::from_poly(&n, deg, mode);
        let q = BinaryForm::from_poly(&d, deg, mode);
        RationalMap::new(p, q, tol)
    }

    /// Wraps a pair already known to be coprime of equal degree.
    pub(crate) fn from_coprime(p: BinaryForm, q: BinaryForm) -> Self {
        let (p, q) = pair_normalize(p, q);
        RationalMap { p, q }
    }

    pub fn numerator(&self) -> &BinaryForm {
        &self.p
    }

    pub fn denominator(&self) -> &BinaryForm {
        &self.q
    }

    pub fn degree(&self) -> usize {
        self.p.degree()
    }

    pub fn mode(&self) -> Mode {
        self.p.mode()
    }

    pub fn to_float(&self) -> RationalMap {
        RationalMap::from_coprime(self.p.to_float(), self.q.to_float())
    }

    /// f(p) = `[P(p) : Q(p)]`.
    pub fn eval(&self, at: &SpherePoint) -> Result<SpherePoint> {
        let x = self.p.eval_point(at)?;
        let z = self.q.eval_point(at)?;
        if x.is_zero() && z.is_zero() {
            return Err(Error::NumericalFailure(
                "map value indeterminate at evaluation point".into(),
            ));
        }
        SpherePoint::new(x, z)
    }

    /// Value of a degree-0 map.
    pub fn constant_value(&self) -> Option<SpherePoint> {
        if self.degree() == 0 {
            SpherePoint::new(self.p.coeff(0).clone(), self.q.coeff(0).clone()).ok()
        } else {
            None
        }
    }

    /// W = (∂P/∂X)(∂Q/∂Z) − (∂P/∂Z)(∂Q/∂X), a form of degree 2d − 2 whose
    /// zero divisor is the critical divisor Σ ord − 1.
    pub fn wronskian(&self) -> Result<BinaryForm> {
        if self.degree() == 0 {
            return Err(Error::InvalidInput("Wronskian of a degree-0 map".into()));
        }
        let px = self.p.derivative_x();
        let pz = self.p.derivative_z();
        let qx = self.q.derivative_x();
        let qz = self.q.derivative_z();
        px.mul(&qz).sub(&pz.mul(&qx))
    }

    /// m∘f as a map. Coprimality survives post-composition, so no reduction
    /// is needed.
    pub fn compose_mobius(&self, m: &Mobius) -> Result<RationalMap> {
        if m.mode() != self.mode() {
            return Err(Error::ModeMismatch("Möbius post-composition"));
        }
        let [a, b, c, d] = m.entries();
        let p = self.p.scale(a).add(&self.q.scale(b))?;
        let q = self.p.scale(c).add(&self.q.scale(d))?;
        Ok(RationalMap::from_coprime(p, q))
    }

    /// (w ↦ −1/w)∘f = `[−Q : P]`.
    pub fn post_neg_reciprocal(&self) -> RationalMap {
        RationalMap::from_coprime(self.q.neg(), self.p.clone())
    }
}

// exact or near-exact division of forms; the remainder must vanish (exact) or
// be negligible (float)
fn form_div(a: &BinaryForm, g: &BinaryForm) -> Result<BinaryForm> {
    use crate::form::{poly_deg_exact, poly_deg_float, poly_divmod_exact, poly_divmod_float};
    use num::complex::Complex64;
    let mode = a.mode();
    match mode {
        Mode::Exact => {
            let (pa, ea) = a.dehomogenize(0.0);
            let (pg, eg) = g.dehomogenize(0.0);
            if eg > ea {
                return Err(Error::Internal(
                    "divisor has deeper pole at infinity".into(),
                ));
            }
            let ga: Vec<_> = pa.iter().map(|c| c.as_exact().unwrap().clone()).collect();
            let gg: Vec<_> = pg.iter().map(|c| c.as_exact().unwrap().clone()).collect();
            let (quot, rem) = poly_divmod_exact(&ga, &gg);
            if poly_deg_exact(&rem).is_some() && rem.iter().any(|c| !c.is_zero()) {
                return Err(Error::Internal(
                    "exact form division left a remainder".into(),
                ));
            }
            let qs: Vec<Scalar> = quot.iter().map(|c| Scalar::Exact(c.clone())).collect();
            let dq = poly_deg_exact(&quot).unwrap_or(0);
            Ok(BinaryForm::from_poly(&qs[..=dq], dq + (ea - eg), mode))
        }
        Mode::Float => {
            let (pa, ea) = a.dehomogenize(a.max_abs() * 1e-12);
            let (pg, eg) = g.dehomogenize(g.max_abs() * 1e-12);
            if eg > ea {
                return Err(Error::NumericalFailure(
                    "approximate divisor has deeper pole at infinity".into(),
                ));
            }
            let ca: Vec<Complex64> = pa.iter().map(|c| c.to_complex()).collect();
            let cg: Vec<Complex64> = pg.iter().map(|c| c.to_complex()).collect();
            let dg = poly_deg_float(&cg, 0.0).unwrap_or(0);
            let (quot, _rem) = poly_divmod_float(&ca, &cg, dg);
            let qs: Vec<Scalar> = quot.iter().map(|&c| Scalar::from_complex(c)).collect();
            let dq = quot.len() - 1;
            Ok(BinaryForm::from_poly(&qs, dq + (ea - eg), mode))
        }
    }
}

// joint canonical scaling of the pair, so projectively equal maps get equal
// representatives
fn pair_normalize(p: BinaryForm, q: BinaryForm) -> (BinaryForm, BinaryForm) {
    let mut all: Vec<Scalar> = p.coeffs().to_vec();
    all.extend_from_slice(q.coeffs());
    let joint = BinaryForm::new(all).expect("nonempty coefficient list");
    if joint.is_zero() {
        return (p, q);
    }
    let normalized = joint.normalize();
    let np = normalized.coeffs()[..p.coeffs().len()].to_vec();
    let nq = normalized.coeffs()[p.coeffs().len()..].to_vec();
    (
        BinaryForm::from_poly(&np, p.degree(), p.mode()),
        BinaryForm::from_poly(&nq, q.degree(), q.mode()),
    )
}

/// True iff the two maps are equal as functions (their coprime pairs are
/// proportional by one scalar). Float mode compares the normalized
/// cross-coefficient residual against the tolerance.
pub fn maps_equal_up_to_scale(f1: &RationalMap, f2: &RationalMap, tol: Tolerance) -> bool {
    if f1.degree() != f2.degree() {
        return false;
    }
    if f1.mode() == Mode::Exact && f2.mode() == Mode::Exact {
        let cross =
            f1.p.mul(&f2.q)
                .sub(&f2.p.mul(&f1.q))
                .expect("equal degrees");
        cross.is_zero()
    } else {
        map_equality_residual(f1, f2) < tol.0
    }
}

/// Normalized residual of the cross-multiplication identity P₁Q₂ = P₂Q₁;
/// zero exactly when the maps agree. Exact inputs are lowered to float.
pub fn map_equality_residual(f1: &RationalMap, f2: &RationalMap) -> f64 {
    if f1.degree() != f2.degree() {
        return f64::INFINITY;
    }
    let (a, b) = (f1.to_float(), f2.to_float());
    let lhs = a.p.mul(&b.q);
    let rhs = b.p.mul(&a.q);
    let diff = lhs.sub(&rhs).expect("equal degrees");
    let scale = lhs.max_abs().max(rhs.max_abs()).max(f64::MIN_POSITIVE);
    diff.max_abs() / scale
}
