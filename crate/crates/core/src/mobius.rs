//! Möbius transformations of the sphere as 2×2 matrices up to scale.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{same_mode, Mode, Scalar, Tolerance};
use crate::sphere::SpherePoint;

/// An element of Aut(Ĉ): `[X:Z] ↦ [aX + bZ : cX + dZ]` with ad − bc ≠ 0,
/// identified up to a nonzero scalar.
///
/// Stored representatives are canonical. Exact: the first nonzero entry in
/// row-major order equals 1. Float: Frobenius norm 1 with the first
/// significant entry rotated onto the positive real axis. Canonical
/// representatives make serialized certificates deterministic.
#[derive(Clone, Debug)]
pub struct Mobius {
    entries: [Scalar; 4], // row-major (a, b, c, d)
}

impl Mobius {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar, tol: Tolerance) -> Result<Self> {
        let entries = [a, b, c, d];
        let mode = same_mode(entries.iter(), "Möbius entries")?;
        let det = entries[0]
            .mul(&entries[3])
            .sub(&entries[1].mul(&entries[2]));
        match mode {
            Mode::Exact => {
                if det.is_zero() {
                    return Err(Error::SingularMatrix);
                }
            }
            Mode::Float => {
                let scale = entries.iter().map(|e| e.abs()).fold(0.0, f64::max);
                if det.abs() <= tol.0 * scale * scale {
                    return Err(Error::SingularMatrix);
                }
            }
        }
        Ok(Mobius { entries }.canonicalize())
    }

    pub fn identity(mode: Mode) -> Self {
        Mobius {
            entries: [
                Scalar::one(mode),
                Scalar::zero(mode),
                Scalar::zero(mode),
                Scalar::one(mode),
            ],
        }
    }

    /// w ↦ −1/w, the matrix (0, −1; 1, 0).
    pub fn neg_reciprocal(mode: Mode) -> Self {
        Mobius {
            entries: [
                Scalar::zero(mode),
                Scalar::one(mode).neg(),
                Scalar::one(mode),
                Scalar::zero(mode),
            ],
        }
        .canonicalize()
    }

    fn canonicalize(self) -> Self {
        let mode = self.entries[0].mode();
        match mode {
            Mode::Exact => {
                let pivot = self
                    .entries
                    .iter()
                    .find(|e| !e.is_zero())
                    .expect("nonsingular matrix has a nonzero entry")
                    .clone();
                let inv = pivot.inv().unwrap();
                Mobius {
                    entries: self.entries.map(|e| e.mul(&inv)),
                }
            }
            Mode::Float => {
                let fro = self
                    .entries
                    .iter()
                    .map(|e| e.abs() * e.abs())
                    .sum::<f64>()
                    .sqrt();
                let scaled: Vec<Complex64> =
                    self.entries.iter().map(|e| e.to_complex() / fro).collect();
                let pivot = scaled
                    .iter()
                    .find(|e| e.norm() > 1e-12)
                    .copied()
                    .unwrap_or(Complex64::new(1.0, 0.0));
                let phase = pivot / pivot.norm();
                let factor = phase.conj();
                Mobius {
                    entries: [
                        Scalar::from_complex(scaled[0] * factor),
                        Scalar::from_complex(scaled[1] * factor),
                        Scalar::from_complex(scaled[2] * factor),
                        Scalar::from_complex(scaled[3] * factor),
                    ],
                }
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.entries[0].mode()
    }

    /// Row-major entries (a, b, c, d) of the canonical representative.
    pub fn entries(&self) -> &[Scalar; 4] {
        &self.entries
    }

    pub fn det(&self) -> Scalar {
        self.entries[0]
            .mul(&self.entries[3])
            .sub(&self.entries[1].mul(&self.entries[2]))
    }

    pub fn to_float(&self) -> Mobius {
        Mobius {
            entries: [
                self.entries[0].to_float(),
                self.entries[1].to_float(),
                self.entries[2].to_float(),
                self.entries[3].to_float(),
            ],
        }
        .canonicalize()
    }

    pub fn apply(&self, p: &SpherePoint) -> Result<SpherePoint> {
        if p.mode() != self.mode() {
            return Err(Error::ModeMismatch("Möbius application"));
        }
        let [a, b, c, d] = &self.entries;
        let x = a.mul(p.x()).add(&b.mul(p.z()));
        let z = c.mul(p.x()).add(&d.mul(p.z()));
        SpherePoint::new(x, z)
    }

    /// Matrix product: `compose(g, h)` acts as g after h.
    pub fn compose(g: &Mobius, h: &Mobius) -> Result<Mobius> {
        if g.mode() != h.mode() {
            return Err(Error::ModeMismatch("Möbius composition"));
        }
        let [a1, b1, c1, d1] = &g.entries;
        let [a2, b2, c2, d2] = &h.entries;
        Ok(Mobius {
            entries: [
                a1.mul(a2).add(&b1.mul(c2)),
                a1.mul(b2).add(&b1.mul(d2)),
                c1.mul(a2).add(&d1.mul(c2)),
                c1.mul(b2).add(&d1.mul(d2)),
            ],
        }
        .canonicalize())
    }

    pub fn inverse(&self) -> Mobius {
        let [a, b, c, d] = &self.entries;
        Mobius {
            entries: [d.clone(), b.neg(), c.neg(), a.clone()],
        }
        .canonicalize()
    }

    /// Entrywise conjugate (not the conjugate transpose).
    pub fn conj_entries(&self) -> Mobius {
        Mobius {
            entries: [
                self.entries[0].conj(),
                self.entries[1].conj(),
                self.entries[2].conj(),
                self.entries[3].conj(),
            ],
        }
        .canonicalize()
    }

    /// Projective equality at the library tolerance.
    pub fn projectively_equal(&self, other: &Mobius, tol: Tolerance) -> bool {
        if self.mode() == Mode::Exact && other.mode() == Mode::Exact {
            self.entries
                .iter()
                .zip(other.entries.iter())
                .all(|(x, y)| x == y)
        } else {
            let a: Vec<Complex64> = self.entries.iter().map(|e| e.to_complex()).collect();
            let b: Vec<Complex64> = other.entries.iter().map(|e| e.to_complex()).collect();
            let mut resid: f64 = 0.0;
            for i in 0..4 {
                for j in i + 1..4 {
                    resid = resid.max((a[i] * b[j] - a[j] * b[i]).norm());
                }
            }
            let sa = a.iter().map(|e| e.norm()).fold(0.0, f64::max);
            let sb = b.iter().map(|e| e.norm()).fold(0.0, f64::max);
            resid < tol.0 * sa * sb.max(f64::MIN_POSITIVE)
        }
    }

    /// The unique Möbius transformation sending three distinct points to
    /// three distinct points, built through the cross-ratio normal form.
    pub fn from_three_pairs(
        src: &[SpherePoint; 3],
        dst: &[SpherePoint; 3],
        tol: Tolerance,
    ) -> Result<Mobius> {
        let mode = src[0].mode();
        for p in src.iter().chain(dst.iter()) {
            if p.mode() != mode {
                return Err(Error::ModeMismatch("three-pair interpolation"));
            }
        }
        let distinct = |pts: &[SpherePoint; 3]| -> bool {
            for i in 0..3 {
                for j in i + 1..3 {
                    let same = match mode {
                        Mode::Exact => pts[i].eq_exact(&pts[j]),
                        Mode::Float => pts[i].chordal_distance(&pts[j]) <= tol.probe_radius(),
                    };
                    if same {
                        return false;
                    }
                }
            }
            true
        };
        if !distinct(src) {
            return Err(Error::InvalidInput("repeated source point".into()));
        }
        if !distinct(dst) {
            return Err(Error::InvalidInput("repeated destination point".into()));
        }
        let to_std = |pts: &[SpherePoint; 3]| -> Mobius {
            // maps pts to (0, 1, ∞); rows scale by the cross factors
            let cross = |p: &SpherePoint, q: &SpherePoint| -> Scalar {
                p.x().mul(q.z()).sub(&q.x().mul(p.z()))
            };
            let d23 = cross(&pts[1], &pts[2]);
            let d21 = cross(&pts[1], &pts[0]);
            Mobius {
                entries: [
                    d23.mul(pts[0].z()),
                    d23.mul(pts[0].x()).neg(),
                    d21.mul(pts[2].z()),
                    d21.mul(pts[2].x()).neg(),
                ],
            }
        };
        let ms = to_std(src);
        let md = to_std(dst);
        let g = Mobius::compose(&md.inverse(), &ms)?;
        // degenerate configurations surface as a singular product
        match mode {
            Mode::Exact => {
                if g.det().is_zero() {
                    return Err(Error::SingularMatrix);
                }
            }
            Mode::Float => {
                let scale = g.entries.iter().map(|e| e.abs()).fold(0.0, f64::max);
                if g.det().abs() <= tol.0 * scale * scale {
                    return Err(Error::SingularMatrix);
                }
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(re: f64, im: f64) -> SpherePoint {
        SpherePoint::from_complex(Complex64::new(re, im))
    }

    #[test]
    fn identity_fixes_points() {
        let id = Mobius::identity(Mode::Float);
        for p in [
            pt(0.0, 0.0),
            pt(3.0, -2.0),
            SpherePoint::infinity(Mode::Float),
        ] {
            assert!(id.apply(&p).unwrap().chordal_distance(&p) < 1e-15);
        }
    }

    #[test]
    fn neg_reciprocal_action() {
        let g = Mobius::neg_reciprocal(Mode::Float);
        let img = g.apply(&pt(1.0, 0.0)).unwrap();
        assert!(img.chordal_distance(&pt(-1.0, 0.0)) < 1e-15);
        let img = g.apply(&SpherePoint::zero(Mode::Float)).unwrap();
        assert!(img.chordal_distance(&SpherePoint::infinity(Mode::Float)) < 1e-15);
    }

    #[test]
    fn inverse_of_shift() {
        let tol = Tolerance::default();
        let shift = Mobius::new(
            Scalar::exact_int(1, 0),
            Scalar::exact_int(1, 0),
            Scalar::exact_int(0, 0),
            Scalar::exact_int(1, 0),
            tol,
        )
        .unwrap();
        let unshift = Mobius::new(
            Scalar::exact_int(1, 0),
            Scalar::exact_int(-1, 0),
            Scalar::exact_int(0, 0),
            Scalar::exact_int(1, 0),
            tol,
        )
        .unwrap();
        assert!(shift.inverse().projectively_equal(&unshift, tol));
        let composed = Mobius::compose(&shift, &shift.inverse()).unwrap();
        assert!(composed.projectively_equal(&Mobius::identity(Mode::Exact), tol));
    }

    #[test]
    fn singular_rejected() {
        let tol = Tolerance::default();
        let r = Mobius::new(
            Scalar::exact_int(1, 0),
            Scalar::exact_int(2, 0),
            Scalar::exact_int(2, 0),
            Scalar::exact_int(4, 0),
            tol,
        );
        assert!(matches!(r, Err(Error::SingularMatrix)));
    }

    #[test]
    fn three_pairs_standard_triple() {
        let tol = Tolerance::default();
        let zero = SpherePoint::zero(Mode::Exact);
        let one = SpherePoint::from_affine(Scalar::exact_int(1, 0));
        let inf = SpherePoint::infinity(Mode::Exact);
        let id = Mobius::from_three_pairs(
            &[zero.clone(), one.clone(), inf.clone()],
            &[zero.clone(), one.clone(), inf.clone()],
            tol,
        )
        .unwrap();
        assert!(id.projectively_equal(&Mobius::identity(Mode::Exact), tol));

        // (0,1,∞) → (1,0,∞) is w ↦ 1 − w
        let g = Mobius::from_three_pairs(
            &[zero.clone(), one.clone(), inf.clone()],
            &[one.clone(), zero.clone(), inf.clone()],
            tol,
        )
        .unwrap();
        let expect = Mobius::new(
            Scalar::exact_int(-1, 0),
            Scalar::exact_int(1, 0),
            Scalar::exact_int(0, 0),
            Scalar::exact_int(1, 0),
            tol,
        )
        .unwrap();
        assert!(g.projectively_equal(&expect, tol));
        for (s, d) in [(&zero, &one), (&one, &zero), (&inf, &inf)] {
            assert!(g.apply(s).unwrap().eq_exact(d));
        }
    }

    #[test]
    fn three_pairs_round_trip_float() {
        let tol = Tolerance::default();
        let src = [pt(0.2, 0.3), pt(-1.5, 0.7), pt(2.0, -2.0)];
        let dst = [pt(5.0, 0.0), pt(0.0, 1.0), pt(-0.25, -0.125)];
        let g = Mobius::from_three_pairs(&src, &dst, tol).unwrap();
        for (s, d) in src.iter().zip(dst.iter()) {
            assert!(g.apply(s).unwrap().chordal_distance(d) < 1e-12);
        }
    }

    #[test]
    fn three_pairs_rejects_repeats() {
        let tol = Tolerance::default();
        let a = pt(1.0, 0.0);
        let b = pt(2.0, 0.0);
        let r = Mobius::from_three_pairs(
            &[a.clone(), a.clone(), b.clone()],
            &[a.clone(), b.clone(), pt(3.0, 0.0)],
            tol,
        );
        assert!(r.is_err());
    }
}
