//! The reality decision: is a map equivalent, by post-composition with a
//! Möbius transformation, to one that commutes with the curve's
//! antiholomorphic involution?
//!
//! Two independent routes run on every test. The divisor route checks that
//! the preimage divisor of the critical values is τ-stable. The constructive
//! route transports the map across τ, factors the transport as m∘f in the
//! Möbius group, and solves the descent equation ḡ·m = g (or its twisted
//! form) for a certificate g. The routes must agree; disagreement is a
//! numerical failure, never silently resolved.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::divisor::{is_tau_stable, sigma_divisor, sigma_stable_exact, StabilityWitness};
use crate::error::{Error, Result};
use crate::mobius::Mobius;
use crate::ratmap::{map_equality_residual, maps_equal_up_to_scale, RationalMap};
use crate::roots::roots_with_multiplicities;
use crate::scalar::{gaussian_norm_sqrt, GaussianRational, Mode, Scalar, Tolerance};
use crate::sphere::{Involution, SpherePoint};

/// Outcome of the descent step.
#[derive(Clone, Debug)]
pub enum DescentClass {
    Real(Mobius),
    Pseudoreal(Mobius),
    /// M̄·M is not a scalar matrix within tolerance: upstream numerical
    /// noise, not a statement about the map.
    Inconsistent,
}

/// The decision, with its certificate or its counterexample.
#[derive(Clone, Debug)]
pub enum Verdict {
    Real {
        g: Mobius,
        residual: f64,
        lambda_sign: i8,
    },
    Pseudoreal {
        g: Mobius,
        residual: f64,
        lambda_sign: i8,
    },
    NotEquivalent {
        witness: StabilityWitness,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        !matches!(self, Verdict::NotEquivalent { .. })
    }

    pub fn certificate(&self) -> Option<&Mobius> {
        match self {
            Verdict::Real { g, .. } | Verdict::Pseudoreal { g, .. } => Some(g),
            Verdict::NotEquivalent { .. } => None,
        }
    }
}

/// The transported map F(p) = conj(f(τp)): coefficient conjugation, composed
/// with the substitution (X, Z) ↦ (−Z, X) for the antipodal involution.
/// An involution on maps.
pub fn conj_transport(f: &RationalMap, tau: Involution) -> RationalMap {
    RationalMap::from_coprime(
        f.numerator().tau_transport(tau),
        f.denominator().tau_transport(tau),
    )
}

/// The unique m ∈ Aut(Ĉ) with F = m∘f, if one exists. Probes three points
/// with well-separated, non-critical values, interpolates m through the
/// value pairs, and accepts only if m∘f = F globally.
pub fn mobius_factor(
    f: &RationalMap,
    big_f: &RationalMap,
    tol: Tolerance,
) -> Result<Option<Mobius>> {
    if f.degree() == 0 || big_f.degree() == 0 {
        return Err(Error::InvalidInput(
            "Möbius factor of a degree-0 map".into(),
        ));
    }
    if f.degree() != big_f.degree() {
        return Err(Error::InvalidInput(
            "Möbius factor needs maps of equal degree".into(),
        ));
    }
    if f.mode() != big_f.mode() {
        return Err(Error::ModeMismatch("Möbius factor"));
    }
    let mode = f.mode();
    let critical_points: Vec<SpherePoint> = if f.degree() >= 2 {
        let w = f.wronskian()?;
        roots_with_multiplicities(&w, tol)?
            .entries
            .into_iter()
            .map(|e| e.point)
            .collect()
    } else {
        Vec::new()
    };

    let probes = match mode {
        Mode::Exact => exact_probe_triple(f, big_f)?,
        Mode::Float => float_probe_triple(f, big_f, &critical_points, tol)?,
    };
    let (src, dst) = match probes {
        ProbeOutcome::Triple(src, dst) => (src, dst),
        // transported values collide where f-values stay apart: no Möbius
        // can relate the two maps
        ProbeOutcome::ImageCollision => return Ok(None),
    };
    let m = Mobius::from_three_pairs(&src, &dst, tol)?;
    let composed = f.compose_mobius(&m)?;
    if maps_equal_up_to_scale(&composed, big_f, tol) {
        Ok(Some(m))
    } else {
        Ok(None)
    }
}

enum ProbeOutcome {
    Triple([SpherePoint; 3], [SpherePoint; 3]),
    ImageCollision,
}

fn exact_probe_triple(f: &RationalMap, big_f: &RationalMap) -> Result<ProbeOutcome> {
    let w = if f.degree() >= 2 {
        Some(f.wronskian()?)
    } else {
        None
    };
    let mut fvals: Vec<SpherePoint> = Vec::new();
    let mut bigvals: Vec<SpherePoint> = Vec::new();
    let mut count = 0usize;
    for p in exact_probe_sequence() {
        count += 1;
        if count > 512 {
            return Err(Error::NumericalFailure("probe exhaustion".into()));
        }
        // skip critical points
        if let Some(w) = &w {
            if w.eval_point(&p)?.is_zero() {
                continue;
            }
        }
        let fv = f.eval(&p)?;
        if fvals.iter().any(|v| v.eq_exact(&fv)) {
            continue;
        }
        let bv = big_f.eval(&p)?;
        if bigvals.iter().any(|v| v.eq_exact(&bv)) {
            // f separates these probes but F does not
            return Ok(ProbeOutcome::ImageCollision);
        }
        fvals.push(fv);
        bigvals.push(bv);
        if fvals.len() == 3 {
            return Ok(ProbeOutcome::Triple(
                [fvals[0].clone(), fvals[1].clone(), fvals[2].clone()],
                [bigvals[0].clone(), bigvals[1].clone(), bigvals[2].clone()],
            ));
        }
    }
    Err(Error::NumericalFailure("probe exhaustion".into()))
}

fn float_probe_triple(
    f: &RationalMap,
    big_f: &RationalMap,
    critical_points: &[SpherePoint],
    tol: Tolerance,
) -> Result<ProbeOutcome> {
    // start with a generous separation for well-conditioned interpolation,
    // then relax toward the probe radius
    let mut sep = 0.2f64;
    while sep >= tol.probe_radius() {
        let mut fvals: Vec<SpherePoint> = Vec::new();
        let mut bigvals: Vec<SpherePoint> = Vec::new();
        let mut image_collision = false;
        for k in 0..96 {
            let p = float_probe_point(k);
            if critical_points
                .iter()
                .any(|c| c.chordal_distance(&p) < tol.probe_radius())
            {
                continue;
            }
            let fv = match f.eval(&p) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if fvals.iter().any(|v| v.chordal_distance(&fv) < sep) {
                continue;
            }
            let bv = match big_f.eval(&p) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if bigvals
                .iter()
                .any(|v| v.chordal_distance(&bv) < tol.probe_radius())
            {
                image_collision = true;
                continue;
            }
            fvals.push(fv);
            bigvals.push(bv);
            if fvals.len() == 3 {
                return Ok(ProbeOutcome::Triple(
                    [fvals[0].clone(), fvals[1].clone(), fvals[2].clone()],
                    [bigvals[0].clone(), bigvals[1].clone(), bigvals[2].clone()],
                ));
            }
        }
        if image_collision && fvals.len() < 3 {
            return Ok(ProbeOutcome::ImageCollision);
        }
        sep *= 0.5;
    }
    Err(Error::NumericalFailure(
        "probe exhaustion while factoring in the Möbius group".into(),
    ))
}

// Deterministic low-discrepancy points: golden-angle arguments with radii
// swept through a tangent map so the whole sphere is covered.
fn float_probe_point(k: usize) -> SpherePoint {
    let golden = 2.399963229728653;
    let u = radical_inverse_base2(k as u32 + 1);
    let r = (std::f64::consts::FRAC_PI_2 * (0.04 + 0.92 * u)).tan();
    let th = golden * (k as f64 + 1.0);
    SpherePoint::from_complex(Complex64::from_polar(r, th))
}

fn radical_inverse_base2(mut n: u32) -> f64 {
    let mut inv = 0.0f64;
    let mut base = 0.5f64;
    while n > 0 {
        if n & 1 == 1 {
            inv += base;
        }
        base *= 0.5;
        n >>= 1;
    }
    inv
}

// Small Gaussian rationals in a fixed spiral: (a + b·i)/c by increasing
// height h = max(|a|, |b|, c).
fn exact_probe_sequence() -> impl Iterator<Item = SpherePoint> {
    (1i64..24).flat_map(|h| {
        let mut pts = Vec::new();
        for a in -h..=h {
            for b in -h..=h {
                for c in 1..=h {
                    if a.abs().max(b.abs()).max(c) == h && gcd3(a, b, c) == 1 {
                        pts.push(SpherePoint::from_affine(Scalar::Exact(
                            GaussianRational::from_ratio(a, c, b, c),
                        )));
                    }
                }
            }
        }
        pts
    })
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn gcd(x: i64, y: i64) -> i64 {
        if y == 0 {
            x.abs()
        } else {
            gcd(y, x % y)
        }
    }
    gcd(gcd(a, b), c)
}

// ---------------------------------------------------------------------------
// Descent in the Möbius group.
// ---------------------------------------------------------------------------

type Mat = [Scalar; 4];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    [
        a[0].mul(&b[0]).add(&a[1].mul(&b[2])),
        a[0].mul(&b[1]).add(&a[1].mul(&b[3])),
        a[2].mul(&b[0]).add(&a[3].mul(&b[2])),
        a[2].mul(&b[1]).add(&a[3].mul(&b[3])),
    ]
}

fn mat_conj(a: &Mat) -> Mat {
    [a[0].conj(), a[1].conj(), a[2].conj(), a[3].conj()]
}

fn mat_add(a: &Mat, b: &Mat) -> Mat {
    [
        a[0].add(&b[0]),
        a[1].add(&b[1]),
        a[2].add(&b[2]),
        a[3].add(&b[3]),
    ]
}

fn mat_scale(a: &Mat, s: &Scalar) -> Mat {
    [a[0].mul(s), a[1].mul(s), a[2].mul(s), a[3].mul(s)]
}

fn mat_det(a: &Mat) -> Scalar {
    a[0].mul(&a[3]).sub(&a[1].mul(&a[2]))
}

/// Solves the descent equation for a factor m of the transport.
///
/// With M̄·M = λ·I (forced when m comes from a genuine transport factor, λ
/// real), the sign of λ decides the class: +1 gives a real certificate
/// G = X + X̄·M′, −1 a pseudoreal certificate G = X + J·X̄·M′, where M′ is M
/// rescaled so that M̄′·M′ = ±I and X is a random matrix redrawn until G is
/// invertible. A non-scalar M̄·M reports `Inconsistent`.
pub fn descent_solve(m: &Mobius, tol: Tolerance, seed: u64) -> Result<DescentClass> {
    match m.mode() {
        Mode::Exact => descent_exact(m, tol, seed),
        Mode::Float => descent_float(m.entries(), tol, seed),
    }
}

fn descent_float(entries: &Mat, tol: Tolerance, seed: u64) -> Result<DescentClass> {
    let me: Vec<Complex64> = entries.iter().map(|e| e.to_complex()).collect();
    let scale: f64 = me.iter().map(|e| e.norm_sqr()).sum::<f64>();
    let conj: Vec<Complex64> = me.iter().map(|e| e.conj()).collect();
    let prod = [
        conj[0] * me[0] + conj[1] * me[2],
        conj[0] * me[1] + conj[1] * me[3],
        conj[2] * me[0] + conj[3] * me[2],
        conj[2] * me[1] + conj[3] * me[3],
    ];
    let eps = (tol.0 * scale).max(1e-13 * scale);
    let off = prod[1].norm().max(prod[2].norm());
    let diag_gap = (prod[0] - prod[3]).norm();
    let lambda = (prod[0] + prod[3]) / 2.0;
    if off > eps || diag_gap > eps || lambda.im.abs() > eps {
        return Ok(DescentClass::Inconsistent);
    }
    let sign_positive = lambda.re > 0.0;
    let s = lambda.re.abs().sqrt();
    let mp: Vec<Complex64> = me.iter().map(|e| e / s).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6465_7363);
    for _ in 0..32 {
        let x: Vec<Complex64> = (0..4)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let xbar: Vec<Complex64> = x.iter().map(|e| e.conj()).collect();
        let xbar_m = [
            xbar[0] * mp[0] + xbar[1] * mp[2],
            xbar[0] * mp[1] + xbar[1] * mp[3],
            xbar[2] * mp[0] + xbar[3] * mp[2],
            xbar[2] * mp[1] + xbar[3] * mp[3],
        ];
        let g: [Complex64; 4] = if sign_positive {
            [
                x[0] + xbar_m[0],
                x[1] + xbar_m[1],
                x[2] + xbar_m[2],
                x[3] + xbar_m[3],
            ]
        } else {
            // J·(X̄·M′) with J = (0, −1; 1, 0)
            [
                x[0] - xbar_m[2],
                x[1] - xbar_m[3],
                x[2] + xbar_m[0],
                x[3] + xbar_m[1],
            ]
        };
        let det = g[0] * g[3] - g[1] * g[2];
        let gn: f64 = g.iter().map(|e| e.norm_sqr()).sum();
        if det.norm() > 1e-6 * gn {
            let mob = Mobius::new(
                Scalar::from_complex(g[0]),
                Scalar::from_complex(g[1]),
                Scalar::from_complex(g[2]),
                Scalar::from_complex(g[3]),
                tol,
            )?;
            return Ok(if sign_positive {
                DescentClass::Real(mob)
            } else {
                DescentClass::Pseudoreal(mob)
            });
        }
    }
    Err(Error::NumericalFailure(
        "no invertible descent certificate after 32 draws".into(),
    ))
}

fn descent_exact(m: &Mobius, tol: Tolerance, seed: u64) -> Result<DescentClass> {
    // primitive Gaussian-integer representative keeps λ an integer
    let prim = primitive_integer_matrix(m.entries());
    let conj = mat_conj(&prim);
    let prod = mat_mul(&conj, &prim);
    if !prod[1].is_zero() || !prod[2].is_zero() {
        return Ok(DescentClass::Inconsistent);
    }
    let lam11 = prod[0].as_exact().unwrap().clone();
    let lam22 = prod[3].as_exact().unwrap().clone();
    if lam11 != lam22 || !lam11.is_real() {
        return Ok(DescentClass::Inconsistent);
    }
    let lambda = lam11.re.clone();
    let sign_positive = lambda.is_positive();
    let abs_lambda = if sign_positive {
        lambda.clone()
    } else {
        -lambda.clone()
    };
    let rescale = gaussian_norm_sqrt(&abs_lambda);
    let mp = match rescale {
        Some(s) => {
            let inv = Scalar::Exact(s).inv().expect("nonzero norm root");
            mat_scale(&prim, &inv)
        }
        None => {
            // |λ| is not a norm from Q(i): no Gaussian-rational certificate
            // exists on this route, so the certificate (class is already
            // decided exactly) is produced in float
            let fl: Mat = [
                prim[0].to_float(),
                prim[1].to_float(),
                prim[2].to_float(),
                prim[3].to_float(),
            ];
            return descent_float(&fl, tol, seed);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6465_7363);
    for _ in 0..32 {
        let x: Mat = [
            Scalar::exact_int(rng.gen_range(-4..=4), rng.gen_range(-4..=4)),
            Scalar::exact_int(rng.gen_range(-4..=4), rng.gen_range(-4..=4)),
            Scalar::exact_int(rng.gen_range(-4..=4), rng.gen_range(-4..=4)),
            Scalar::exact_int(rng.gen_range(-4..=4), rng.gen_range(-4..=4)),
        ];
        let xbar_m = mat_mul(&mat_conj(&x), &mp);
        let g = if sign_positive {
            mat_add(&x, &xbar_m)
        } else {
            let j_xbar_m = [
                xbar_m[2].neg(),
                xbar_m[3].neg(),
                xbar_m[0].clone(),
                xbar_m[1].clone(),
            ];
            mat_add(&x, &j_xbar_m)
        };
        if !mat_det(&g).is_zero() {
            let mob = Mobius::new(g[0].clone(), g[1].clone(), g[2].clone(), g[3].clone(), tol)?;
            return Ok(if sign_positive {
                DescentClass::Real(mob)
            } else {
                DescentClass::Pseudoreal(mob)
            });
        }
    }
    Err(Error::NumericalFailure(
        "no invertible descent certificate after 32 draws".into(),
    ))
}

fn primitive_integer_matrix(entries: &Mat) -> Mat {
    use crate::scalar::gauss_int_gcd;
    use num::Integer;
    let mut den = BigInt::one();
    for e in entries {
        let g = e.as_exact().expect("exact mode");
        den = den.lcm(g.re.denom());
        den = den.lcm(g.im.denom());
    }
    let den_r = BigRational::from_integer(den);
    let mut content = (BigInt::zero(), BigInt::zero());
    let mut ints: Vec<GaussianRational> = Vec::with_capacity(4);
    for e in entries {
        let g = e.as_exact().unwrap();
        let re = (&g.re * &den_r).to_integer();
        let im = (&g.im * &den_r).to_integer();
        content = gauss_int_gcd(&content, &(re.clone(), im.clone()));
        ints.push(GaussianRational::new(
            BigRational::from_integer(re),
            BigRational::from_integer(im),
        ));
    }
    let content_g = GaussianRational::new(
        BigRational::from_integer(content.0),
        BigRational::from_integer(content.1),
    );
    let inv = content_g.inv().expect("nonzero matrix");
    let scaled: Vec<Scalar> = ints.iter().map(|g| Scalar::Exact(g.mul(&inv))).collect();
    [
        scaled[0].clone(),
        scaled[1].clone(),
        scaled[2].clone(),
        scaled[3].clone(),
    ]
}

// ---------------------------------------------------------------------------
// The two routes and the verdict.
// ---------------------------------------------------------------------------

/// The divisor route: τΣ(f) = Σ(f)? Exact mode decides through the
/// root-free carrier form; float mode through divisor matching. Degrees 0
/// and 1 have empty divisors and are always stable.
pub fn divisor_criterion(
    f: &RationalMap,
    tau: Involution,
    tol: Tolerance,
) -> Result<(bool, Option<StabilityWitness>)> {
    if f.degree() <= 1 {
        return Ok((true, Some(StabilityWitness::Matching(Vec::new()))));
    }
    match f.mode() {
        Mode::Exact => {
            let (stable, _form) = sigma_stable_exact(f, tau)?;
            Ok((stable, None))
        }
        Mode::Float => {
            let sigma = sigma_divisor(f, tol)?;
            let witness = is_tau_stable(&sigma, tau, tol)?;
            Ok((witness.is_stable(), Some(witness)))
        }
    }
}

/// Full decision pipeline: the divisor criterion and the constructive chain
/// run independently and must agree. Their agreement is the content of the
/// underlying equivalence theorem, so a mismatch raises a numerical failure.
pub fn reality_test(
    f: &RationalMap,
    tau: Involution,
    tol: Tolerance,
    seed: u64,
) -> Result<Verdict> {
    if f.degree() == 0 {
        return degree_zero_verdict(f, tol);
    }
    let (criterion, witness) = divisor_criterion(f, tau, tol)?;

    let transported = conj_transport(f, tau);
    let m = mobius_factor(f, &transported, tol)?;
    let chain = match m {
        None => None,
        Some(m) => match descent_solve(&m, tol, seed)? {
            DescentClass::Inconsistent => {
                return Err(Error::NumericalFailure(
                    "transport factor exists but its descent matrix is not scalar".into(),
                ));
            }
            DescentClass::Real(g) => Some((g, 1i8)),
            DescentClass::Pseudoreal(g) => Some((g, -1i8)),
        },
    };

    match (criterion, chain) {
        (true, Some((g, sign))) => {
            if tau == Involution::Conj && sign < 0 {
                return Err(Error::Internal(
                    "pseudoreal descent class under conjugation: a fixed point of τ would force |w|² = −1".into(),
                ));
            }
            let verdict = if sign > 0 {
                Verdict::Real {
                    g,
                    residual: 0.0,
                    lambda_sign: sign,
                }
            } else {
                Verdict::Pseudoreal {
                    g,
                    residual: 0.0,
                    lambda_sign: sign,
                }
            };
            let residual = verify_verdict(f, tau, &verdict)?;
            if residual >= tol.probe_radius() {
                return Err(Error::NumericalFailure(format!(
                    "descent certificate fails verification: residual {:.3e}",
                    residual
                )));
            }
            Ok(match verdict {
                Verdict::Real { g, lambda_sign, .. } => Verdict::Real {
                    g,
                    residual,
                    lambda_sign,
                },
                Verdict::Pseudoreal { g, lambda_sign, .. } => Verdict::Pseudoreal {
                    g,
                    residual,
                    lambda_sign,
                },
                Verdict::NotEquivalent { .. } => unreachable!(),
            })
        }
        (false, None) => {
            let witness = match witness {
                Some(w) => w,
                None => {
                    // exact route decided without points; recover a witness in float
                    let sigma = sigma_divisor(&f.to_float(), tol)?;
                    let w = is_tau_stable(&sigma, tau, tol)?;
                    if w.is_stable() {
                        return Err(Error::NumericalFailure(
                            "exact instability not reproduced by the float witness search".into(),
                        ));
                    }
                    w
                }
            };
            Ok(Verdict::NotEquivalent { witness })
        }
        (true, None) => Err(Error::NumericalFailure(
            "stable divisor but the constructive chain found no factor; the routes must agree".into(),
        )),
        (false, Some(_)) => Err(Error::NumericalFailure(
            "unstable divisor but the constructive chain produced a certificate; the routes must agree".into(),
        )),
    }
}

fn degree_zero_verdict(f: &RationalMap, tol: Tolerance) -> Result<Verdict> {
    let c = f.constant_value().expect("degree-0 map has a value");
    let mode = f.mode();
    // g translates the constant value to 0 (through 1/w when the value is ∞)
    let g = if c.is_infinity() {
        Mobius::new(
            Scalar::zero(mode),
            Scalar::one(mode),
            Scalar::one(mode),
            Scalar::zero(mode),
            tol,
        )?
    } else {
        let a = c.x().div(c.z()).expect("finite value");
        Mobius::new(
            Scalar::one(mode),
            a.neg(),
            Scalar::zero(mode),
            Scalar::one(mode),
            tol,
        )?
    };
    Ok(Verdict::Real {
        g,
        residual: 0.0,
        lambda_sign: 1,
    })
}

/// Residual of the defining identity for a Real or Pseudoreal verdict:
/// the transport of g∘f against g∘f, or against (w ↦ −1/w)∘(g∘f).
/// Exactly 0 in exact mode on success.
pub fn verify_verdict(f: &RationalMap, tau: Involution, v: &Verdict) -> Result<f64> {
    let (g, pseudoreal) = match v {
        Verdict::Real { g, .. } => (g, false),
        Verdict::Pseudoreal { g, .. } => (g, true),
        Verdict::NotEquivalent { .. } => {
            return Err(Error::InvalidInput(
                "verification applies to real or pseudoreal verdicts".into(),
            ));
        }
    };
    // a float certificate over an exact map lowers the comparison to float
    let (f, g) = if f.mode() == Mode::Exact && g.mode() == Mode::Float {
        (f.to_float(), g.clone())
    } else {
        (f.clone(), g.clone())
    };
    let gf = f.compose_mobius(&g)?;
    let lhs = conj_transport(&gf, tau);
    let rhs = if pseudoreal {
        gf.post_neg_reciprocal()
    } else {
        gf
    };
    if f.mode() == Mode::Exact {
        if maps_equal_up_to_scale(&lhs, &rhs, Tolerance::default()) {
            return Ok(0.0);
        }
    }
    Ok(map_equality_residual(&lhs, &rhs))
}
