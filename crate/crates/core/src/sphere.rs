//! Points of the Riemann sphere in homogeneous coordinates, the chordal
//! metric, and the two genus-0 antiholomorphic involutions.

use std::cmp::Ordering;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{cmp_complex, Mode, Scalar};

/// A point [X : Z] of the Riemann sphere; equality is projective. The affine
/// coordinate is X/Z, so `[0:1]` is 0 and `[1:0]` is ∞.
///
/// Representatives are canonical: exact points are `[w : 1]` or `[1 : 0]`; float
/// points have unit Euclidean norm with the larger coordinate rotated to the
/// positive real axis.
#[derive(Clone, Debug)]
pub struct SpherePoint {
    x: Scalar,
    z: Scalar,
}

/// The two antiholomorphic involutions of the genus-0 curve. `Conj` fixes the
/// circle R ∪ ∞ (the curve with real points); `Antipodal` is fixed-point free
/// (the curve without real points).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Involution {
    Conj,
    Antipodal,
}

impl SpherePoint {
    pub fn new(x: Scalar, z: Scalar) -> Result<Self> {
        if x.mode() != z.mode() {
            return Err(Error::ModeMismatch("sphere point coordinates"));
        }
        if x.is_zero() && z.is_zero() {
            return Err(Error::InvalidInput("sphere point [0:0]".into()));
        }
        Ok(SpherePoint { x, z }.canonicalize())
    }

    pub fn from_affine(value: Scalar) -> Self {
        let one = Scalar::one(value.mode());
        SpherePoint { x: value, z: one }.canonicalize()
    }

    pub fn from_complex(value: Complex64) -> Self {
        Self::from_affine(Scalar::from_complex(value))
    }

    pub fn infinity(mode: Mode) -> Self {
        SpherePoint {
            x: Scalar::one(mode),
            z: Scalar::zero(mode),
        }
    }

    pub fn zero(mode: Mode) -> Self {
        SpherePoint {
            x: Scalar::zero(mode),
            z: Scalar::one(mode),
        }
    }

    fn canonicalize(self) -> Self {
        match (&self.x, &self.z) {
            (Scalar::Exact(_), Scalar::Exact(_)) => {
                if self.z.is_zero() {
                    SpherePoint {
                        x: Scalar::one(Mode::Exact),
                        z: Scalar::zero(Mode::Exact),
                    }
                } else {
                    let w = self.x.div(&self.z).expect("nonzero z");
                    SpherePoint {
                        x: w,
                        z: Scalar::one(Mode::Exact),
                    }
                }
            }
            _ => {
                let x = self.x.to_complex();
                let z = self.z.to_complex();
                let n = (x.norm_sqr() + z.norm_sqr()).sqrt();
                let (x, z) = (x / n, z / n);
                // rotate the larger coordinate onto the positive real axis
                let pivot = if z.norm() >= x.norm() { z } else { x };
                let phase = pivot / pivot.norm();
                SpherePoint {
                    x: Scalar::from_complex(x * phase.conj()),
                    z: Scalar::from_complex(z * phase.conj()),
                }
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.x.mode()
    }

    pub fn x(&self) -> &Scalar {
        &self.x
    }

    pub fn z(&self) -> &Scalar {
        &self.z
    }

    pub fn is_infinity(&self) -> bool {
        self.z.is_zero()
    }

    /// Affine coordinate X/Z as a complex double (∞ for the point at infinity).
    pub fn to_complex(&self) -> Complex64 {
        if self.is_infinity() {
            Complex64::new(f64::INFINITY, 0.0)
        } else {
            self.x.to_complex() / self.z.to_complex()
        }
    }

    pub fn to_float(&self) -> SpherePoint {
        SpherePoint {
            x: self.x.to_float(),
            z: self.z.to_float(),
        }
        .canonicalize()
    }

    /// Exact projective equality (exact mode only; float callers should use
    /// the chordal metric).
    pub fn eq_exact(&self, other: &SpherePoint) -> bool {
        let cross = self.x.mul(&other.z).sub(&other.x.mul(&self.z));
        cross.is_zero()
    }

    /// 2·|X_p Z_q − X_q Z_p| / (‖p‖·‖q‖): symmetric, 0 iff projectively
    /// equal, diameter 2. Computed on float representatives.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        let (px, pz) = (self.x.to_complex(), self.z.to_complex());
        let (qx, qz) = (other.x.to_complex(), other.z.to_complex());
        let cross = px * qz - qx * pz;
        let np = (px.norm_sqr() + pz.norm_sqr()).sqrt();
        let nq = (qx.norm_sqr() + qz.norm_sqr()).sqrt();
        2.0 * cross.norm() / (np * nq)
    }

    /// Total order used for canonical divisor layout: finite points by
    /// (modulus, argument), the point at infinity last.
    pub fn canonical_cmp(&self, other: &SpherePoint) -> Ordering {
        match (self.is_infinity(), other.is_infinity()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => {
                if self.mode() == Mode::Exact && other.mode() == Mode::Exact {
                    cmp_complex(&self.x, &other.x)
                } else {
                    let a = Scalar::from_complex(self.to_complex());
                    let b = Scalar::from_complex(other.to_complex());
                    cmp_complex(&a, &b)
                }
            }
        }
    }
}

impl Involution {
    /// Image of a point. Conj: `[X:Z] ↦ [conj X : conj Z]`. Antipodal:
    /// `[X:Z] ↦ [−conj Z : conj X]`.
    pub fn apply(self, p: &SpherePoint) -> SpherePoint {
        match self {
            Involution::Conj => SpherePoint {
                x: p.x.conj(),
                z: p.z.conj(),
            }
            .canonicalize(),
            Involution::Antipodal => SpherePoint {
                x: p.z.conj().neg(),
                z: p.x.conj(),
            }
            .canonicalize(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fpt(re: f64, im: f64) -> SpherePoint {
        SpherePoint::from_complex(Complex64::new(re, im))
    }

    #[test]
    fn chordal_examples() {
        let p = fpt(1.0, 0.0);
        assert!(p.chordal_distance(&p) < 1e-15);
        let zero = SpherePoint::zero(Mode::Float);
        let inf = SpherePoint::infinity(Mode::Float);
        assert!((zero.chordal_distance(&inf) - 2.0).abs() < 1e-15);
        let q = fpt(-1.0, 0.0);
        assert!((p.chordal_distance(&q) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn involutions_are_involutive() {
        for tau in [Involution::Conj, Involution::Antipodal] {
            for p in [
                fpt(0.3, -1.7),
                SpherePoint::infinity(Mode::Float),
                SpherePoint::zero(Mode::Float),
            ] {
                let back = tau.apply(&tau.apply(&p));
                assert!(p.chordal_distance(&back) < 1e-14, "{:?} {:?}", tau, p);
            }
        }
    }

    #[test]
    fn conj_examples() {
        let i = fpt(0.0, 1.0);
        let img = Involution::Conj.apply(&i);
        assert!(img.chordal_distance(&fpt(0.0, -1.0)) < 1e-15);
    }

    #[test]
    fn antipodal_examples_and_fixed_point_freeness() {
        let zero = SpherePoint::zero(Mode::Float);
        let inf = SpherePoint::infinity(Mode::Float);
        assert!(Involution::Antipodal.apply(&zero).chordal_distance(&inf) < 1e-15);
        let one = fpt(1.0, 0.0);
        assert!(
            Involution::Antipodal
                .apply(&one)
                .chordal_distance(&fpt(-1.0, 0.0))
                < 1e-15
        );
        // antipodes are at maximal chordal distance
        for p in [zero, inf, one, fpt(0.25, -3.0)] {
            let d = p.chordal_distance(&Involution::Antipodal.apply(&p));
            assert!((d - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_equality_is_projective() {
        let p = SpherePoint::new(Scalar::exact_int(2, 2), Scalar::exact_int(2, 0)).unwrap();
        let q = SpherePoint::new(Scalar::exact_int(1, 1), Scalar::exact_int(1, 0)).unwrap();
        assert!(p.eq_exact(&q));
        let inf = SpherePoint::infinity(Mode::Exact);
        assert!(!p.eq_exact(&inf));
    }

    #[test]
    fn conj_fixed_set_is_real_ratio() {
        let real = SpherePoint::new(Scalar::exact_int(3, 0), Scalar::exact_int(2, 0)).unwrap();
        assert!(Involution::Conj.apply(&real).eq_exact(&real));
        let complex = SpherePoint::new(Scalar::exact_int(1, 1), Scalar::exact_int(1, 0)).unwrap();
        assert!(!Involution::Conj.apply(&complex).eq_exact(&complex));
    }
}
