//! Ground-truth instance generation: seed maps of a known class, scrambled
//! by a random Möbius transformation. Deterministic given the seed.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::mobius::Mobius;
use crate::ratmap::maps_equal_up_to_scale;
use crate::ratmap::RationalMap;
use crate::reality::{conj_transport, verify_verdict, Verdict};
use crate::scalar::{GaussianRational, Mode, Scalar, Tolerance};
use crate::sphere::Involution;

/// The class a generated seed function belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedClass {
    Real,
    Pseudoreal,
}

/// What the scrambler knows: the seed map, its class, and the scramble h.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub class: SeedClass,
    pub scramble: Mobius,
    pub seed_map: RationalMap,
}

/// Generates an instance h∘f with f of the requested class and h a random
/// Möbius transformation.
///
/// Pseudoreal seeds require the antipodal involution and odd degree (they
/// are twists of z^d, pseudoreal only for odd d). Real seeds under the
/// antipodal involution require even degree: transport is an involution on
/// degree-d pairs with square (−1)^d, so fixed maps exist only for even d.
pub fn scramble_instance(
    seed: u64,
    degree: usize,
    tau: Involution,
    class: SeedClass,
    mode: Mode,
    tol: Tolerance,
) -> Result<(RationalMap, GroundTruth)> {
    if degree == 0 {
        return Err(Error::InvalidInput("scramble needs degree ≥ 1".into()));
    }
    match (tau, class) {
        (Involution::Conj, SeedClass::Pseudoreal) => {
            return Err(Error::InvalidInput(
                "pseudoreal seeds require the antipodal involution".into(),
            ));
        }
        (Involution::Antipodal, SeedClass::Pseudoreal) if degree % 2 == 0 => {
            return Err(Error::InvalidInput(
                "pseudoreal seeds require odd degree".into(),
            ));
        }
        (Involution::Antipodal, SeedClass::Real) if degree % 2 == 1 => {
            return Err(Error::InvalidInput(
                "real seeds under the antipodal involution require even degree".into(),
            ));
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seed_map = match (tau, class) {
        (Involution::Conj, SeedClass::Real) => random_real_map(&mut rng, degree, mode, tol)?,
        (Involution::Antipodal, SeedClass::Real) => {
            random_antipodal_real_map(&mut rng, degree, mode, tol)?
        }
        (Involution::Antipodal, SeedClass::Pseudoreal) => {
            random_pseudoreal_map(&mut rng, degree, mode, tol)?
        }
        (Involution::Conj, SeedClass::Pseudoreal) => unreachable!(),
    };
    // the seed really is of its class: check the defining identity with the
    // identity certificate
    let verdict = match class {
        SeedClass::Real => Verdict::Real {
            g: Mobius::identity(mode),
            residual: 0.0,
            lambda_sign: 1,
        },
        SeedClass::Pseudoreal => Verdict::Pseudoreal {
            g: Mobius::identity(mode),
            residual: 0.0,
            lambda_sign: -1,
        },
    };
    let residual = verify_verdict(&seed_map, tau, &verdict)?;
    if residual > tol.0 {
        return Err(Error::Internal(format!(
            "generated seed fails its defining identity: residual {:.3e}",
            residual
        )));
    }
    let scramble = random_mobius(&mut rng, mode, tol)?;
    let instance = seed_map.compose_mobius(&scramble)?;
    Ok((
        instance,
        GroundTruth {
            class,
            scramble,
            seed_map,
        },
    ))
}

/// Perturbs one numerator coefficient by `magnitude` (relative to the
/// largest coefficient), turning a scrambled instance into a near-miss.
pub fn perturb_map(f: &RationalMap, seed: u64, magnitude: f64) -> Result<RationalMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7065_7274);
    let mode = f.mode();
    let mut num = f.numerator().coeffs().to_vec();
    let den = f.denominator().coeffs().to_vec();
    let idx = rng.gen_range(0..num.len());
    let scale = f.numerator().max_abs().max(f.denominator().max_abs());
    let delta = match mode {
        Mode::Float => {
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            Scalar::from_complex(Complex64::from_polar(magnitude * scale, phase))
        }
        Mode::Exact => {
            let den_i = (1.0 / magnitude).round() as i64;
            let re = rng.gen_range(1..=3);
            let im = rng.gen_range(1..=3);
            Scalar::Exact(GaussianRational::from_ratio(re, den_i, im, den_i))
        }
    };
    num[idx] = num[idx].add(&delta);
    let p = BinaryForm::new(num)?;
    let q = BinaryForm::new(den)?;
    RationalMap::new(p, q, Tolerance::default())
}

/// A random map with no imposed symmetry (generic instances are not
/// equivalent to real ones).
pub fn random_complex_map(
    seed: u64,
    degree: usize,
    mode: Mode,
    tol: Tolerance,
) -> Result<RationalMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636f_6d70);
    for _ in 0..64 {
        let p = random_form(&mut rng, degree, mode, false);
        let q = random_form(&mut rng, degree, mode, false);
        if let Ok(f) = RationalMap::new(p, q, tol) {
            if f.degree() == degree {
                return Ok(f);
            }
        }
    }
    Err(Error::NumericalFailure(
        "no coprime random pair after 64 draws".into(),
    ))
}

fn random_scalar(rng: &mut ChaCha8Rng, mode: Mode, real_only: bool) -> Scalar {
    match mode {
        Mode::Float => {
            let re = rng.gen_range(-1.0..1.0);
            let im = if real_only {
                0.0
            } else {
                rng.gen_range(-1.0..1.0)
            };
            Scalar::float(re, im)
        }
        Mode::Exact => {
            let re = rng.gen_range(-9..=9);
            let re_den = rng.gen_range(1..=4);
            let (im, im_den) = if real_only {
                (0, 1)
            } else {
                (rng.gen_range(-9..=9), rng.gen_range(1..=4))
            };
            Scalar::Exact(GaussianRational::from_ratio(re, re_den, im, im_den))
        }
    }
}

fn random_form(rng: &mut ChaCha8Rng, degree: usize, mode: Mode, real_only: bool) -> BinaryForm {
    let coeffs: Vec<Scalar> = (0..=degree)
        .map(|_| random_scalar(rng, mode, real_only))
        .collect();
    BinaryForm::new(coeffs).expect("nonempty coefficients")
}

fn random_real_map(
    rng: &mut ChaCha8Rng,
    degree: usize,
    mode: Mode,
    tol: Tolerance,
) -> Result<RationalMap> {
    for _ in 0..64 {
        let p = random_form(rng, degree, mode, true);
        let q = random_form(rng, degree, mode, true);
        if p.is_zero() || q.is_zero() {
            continue;
        }
        if let Ok(f) = RationalMap::new(p, q, tol) {
            if f.degree() == degree {
                return Ok(f);
            }
        }
    }
    Err(Error::NumericalFailure(
        "no coprime real pair after 64 draws".into(),
    ))
}

fn random_antipodal_real_map(
    rng: &mut ChaCha8Rng,
    degree: usize,
    mode: Mode,
    tol: Tolerance,
) -> Result<RationalMap> {
    // symmetrize: P + transport(P) is transport-fixed when the degree is
    // even, and the fixed pair defines a map commuting with the involution
    for _ in 0..64 {
        let p0 = random_form(rng, degree, mode, false);
        let q0 = random_form(rng, degree, mode, false);
        let p = p0.add(&p0.tau_transport(Involution::Antipodal))?;
        let q = q0.add(&q0.tau_transport(Involution::Antipodal))?;
        if p.is_zero() || q.is_zero() {
            continue;
        }
        if let Ok(f) = RationalMap::new(p, q, tol) {
            if f.degree() == degree {
                // symmetrization commutes with coprime reduction only up to
                // a factor; check the map identity itself
                let t = conj_transport(&f, Involution::Antipodal);
                if maps_equal_up_to_scale(&f, &t, tol) {
                    return Ok(f);
                }
            }
        }
    }
    Err(Error::NumericalFailure(
        "no antipodal-real pair after 64 draws".into(),
    ))
}

fn random_pseudoreal_map(
    rng: &mut ChaCha8Rng,
    degree: usize,
    mode: Mode,
    tol: Tolerance,
) -> Result<RationalMap> {
    // g₀∘z^d with g₀ = (a, b; −b̄, ā): such g₀ commute with w ↦ −1/w̄ up to
    // the defining twist, and z^d is pseudoreal for odd d
    for _ in 0..64 {
        let a = random_scalar(rng, mode, false);
        let b = random_scalar(rng, mode, false);
        if a.is_zero() && b.is_zero() {
            continue;
        }
        let mode_zero = Scalar::zero(mode);
        let mut pc = vec![mode_zero.clone(); degree + 1];
        let mut qc = vec![mode_zero.clone(); degree + 1];
        // a·X^d + b·Z^d over −b̄·X^d + ā·Z^d
        pc[degree] = a.clone();
        pc[0] = b.clone();
        qc[degree] = b.conj().neg();
        qc[0] = a.conj();
        let p = BinaryForm::new(pc)?;
        let q = BinaryForm::new(qc)?;
        if let Ok(f) = RationalMap::new(p, q, tol) {
            if f.degree() == degree {
                return Ok(f);
            }
        }
    }
    Err(Error::NumericalFailure(
        "no pseudoreal seed after 64 draws".into(),
    ))
}

/// A random invertible Möbius transformation with moderate conditioning.
pub fn random_mobius(rng: &mut ChaCha8Rng, mode: Mode, tol: Tolerance) -> Result<Mobius> {
    for _ in 0..64 {
        let entries: Vec<Scalar> = match mode {
            Mode::Float => (0..4)
                .map(|_| Scalar::float(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
            Mode::Exact => (0..4)
                .map(|_| Scalar::exact_int(rng.gen_range(-3..=3), rng.gen_range(-3..=3)))
                .collect(),
        };
        let det = entries[0]
            .mul(&entries[3])
            .sub(&entries[1].mul(&entries[2]));
        let scale = entries.iter().map(|e| e.abs()).fold(0.0, f64::max);
        if det.abs() <= 0.05 * scale * scale {
            continue;
        }
        return Mobius::new(
            entries[0].clone(),
            entries[1].clone(),
            entries[2].clone(),
            entries[3].clone(),
            tol,
        );
    }
    Err(Error::NumericalFailure(
        "no well-conditioned Möbius after 64 draws".into(),
    ))
}
