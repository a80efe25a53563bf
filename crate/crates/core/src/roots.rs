//! Projective root extraction with multiplicities.
//!
//! Float mode runs a simultaneous Ehrlich–Aberth iteration on the
//! dehomogenized polynomial, after rotating the sphere so no root sits near
//! infinity. Multiplicities come from geometric grouping of the raw roots and
//! are cross-checked against square-free decomposition exponents; any
//! disagreement or grouping ambiguity is an error, never a guess.
//!
//! Exact mode extracts Gaussian-rational roots exactly (verified by exact
//! evaluation) and isolates the remaining roots of each square-free factor by
//! float refinement, flagging those entries as approximate.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::Zero;

use crate::error::{Error, Result};
use crate::form::{squarefree_with_threshold, BinaryForm};
use crate::scalar::{GaussianRational, Mode, Scalar, Tolerance};
use crate::sphere::SpherePoint;

#[derive(Clone, Debug)]
pub struct RootEntry {
    pub point: SpherePoint,
    pub multiplicity: usize,
    /// Exact mode only: true when the point is a float approximation of an
    /// irrational root rather than an exact Gaussian rational.
    pub approx: bool,
}

#[derive(Clone, Debug, Default)]
pub struct RootList {
    pub entries: Vec<RootEntry>,
}

impl RootList {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    fn sort_canonical(&mut self) {
        self.entries.sort_by(|a, b| a.point.canonical_cmp(&b.point));
    }
}

/// All projective roots of a nonzero float form, with repetition and without
/// multiplicity grouping: an m-fold root appears as m nearby approximations
/// whose spread reflects the conditioning. Callers that anchor the roots
/// against independently known points avoid the grouping problem entirely.
pub fn raw_roots(f: &BinaryForm, tol: Tolerance) -> Result<Vec<SpherePoint>> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    if f.degree() == 0 {
        return Ok(Vec::new());
    }
    if f.mode() != Mode::Float {
        return Err(Error::ModeMismatch("raw roots run in float mode"));
    }
    let norm = f.normalize();
    let (t, m, rotated) = rotate_away_from_infinity(&norm, tol)?;
    let poly = rotated.to_complex_vec();
    let roots = aberth_all(&poly)?;
    Ok(roots
        .into_iter()
        .map(|root| match t {
            None => SpherePoint::from_complex(root),
            Some(_) => apply_matrix_to_point(&m, root),
        })
        .collect())
}

/// All projective roots of a nonzero form, with multiplicities summing to the
/// declared degree.
pub fn roots_with_multiplicities(f: &BinaryForm, tol: Tolerance) -> Result<RootList> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    if f.degree() == 0 {
        return Ok(RootList::default());
    }
    let mut list = match f.mode() {
        Mode::Float => roots_float(f, tol)?,
        Mode::Exact => roots_exact(f, tol)?,
    };
    list.sort_canonical();
    debug_assert_eq!(list.total_multiplicity(), f.degree());
    Ok(list)
}

// ---------------------------------------------------------------------------
// Float path.
// ---------------------------------------------------------------------------

// Unitary rotations S_t(w) = (t·w − 1)/(w + conj t) send ∞ to t; composing a
// form with one moves roots away from infinity without changing chordal
// geometry. Candidate t values below are spread over the sphere; `None`
// denotes the identity.
fn rotation_candidates(extra: usize) -> Vec<Option<Complex64>> {
    let mut cands: Vec<Option<Complex64>> = vec![None];
    let base = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(2.0, 1.0),
        Complex64::new(-0.5, 1.5),
        Complex64::new(0.3, -2.2),
    ];
    for b in base {
        cands.push(Some(b));
    }
    // golden-angle spiral for anything beyond the fixed list
    let golden = 2.399963229728653;
    for k in 0..extra {
        let r = 0.25 + 1.5 * (k as f64 + 0.5) / (extra as f64 + 1.0);
        let th = golden * (k as f64 + 1.0);
        cands.push(Some(Complex64::from_polar(r, th)));
    }
    cands
}

fn rotation_matrix(t: Option<Complex64>) -> [Complex64; 4] {
    match t {
        None => [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ],
        Some(t) => {
            let s = (1.0 + t.norm_sqr()).sqrt();
            [
                t / s,
                Complex64::new(-1.0, 0.0) / s,
                Complex64::new(1.0, 0.0) / s,
                t.conj() / s,
            ]
        }
    }
}

fn apply_matrix_to_point(m: &[Complex64; 4], w: Complex64) -> SpherePoint {
    // image of the affine point w under (a, b; c, d)
    let x = m[0] * w + m[1];
    let z = m[2] * w + m[3];
    SpherePoint::new(Scalar::from_complex(x), Scalar::from_complex(z))
        .expect("rotation image of a finite point")
}

// Picks a rotation whose preimage of infinity is far from every root and
// returns it with the rotated form (all of whose roots are finite).
fn rotate_away_from_infinity(
    norm: &BinaryForm,
    _tol: Tolerance,
) -> Result<(Option<Complex64>, [Complex64; 4], BinaryForm)> {
    let d = norm.degree();
    let cands = rotation_candidates(d + 4);
    let mut best: (f64, Option<Complex64>) = (-1.0, None);
    for t in &cands {
        let value = match t {
            None => norm.coeff(d).abs(),
            Some(t) => {
                let p = SpherePoint::from_complex(*t);
                norm.eval_point(&p).map(|v| v.abs()).unwrap_or(0.0)
            }
        };
        if value > best.0 {
            best = (value, *t);
        }
        if t.is_none() && value >= 1e-2 {
            break; // identity is fine; keep the coefficients untouched
        }
    }
    if best.0 <= 0.0 {
        return Err(Error::NumericalFailure(
            "no rotation separates the form from infinity".into(),
        ));
    }
    let t = best.1;
    let m = rotation_matrix(t);
    let rotated = if t.is_none() {
        norm.clone()
    } else {
        norm.compose_linear(
            &Scalar::from_complex(m[0]),
            &Scalar::from_complex(m[1]),
            &Scalar::from_complex(m[2]),
            &Scalar::from_complex(m[3]),
        )?
        .normalize()
    };
    Ok((t, m, rotated))
}

fn roots_float(f: &BinaryForm, tol: Tolerance) -> Result<RootList> {
    let norm = f.normalize();
    let (t, m, rotated) = rotate_away_from_infinity(&norm, tol)?;

    // in the rotated frame every root is finite
    let poly = rotated.to_complex_vec();
    let raw = aberth_all(&poly)?;

    // multiplicity structure from the square-free chain, grouped at the
    // matching radius
    let factors = squarefree_with_threshold(&rotated, tol, tol.matching_radius())?;
    let mut distinct: Vec<(Complex64, usize)> = Vec::new();
    for (factor, k) in &factors {
        let fpoly = factor.to_complex_vec();
        let froots = aberth_all(&fpoly)?;
        for r in froots {
            let polished = polish(&poly, r, *k);
            distinct.push((polished, *k));
        }
    }

    // cross-check: every raw root joins its nearest distinct root; group
    // sizes must reproduce the square-free exponents
    let mut counts = vec![0usize; distinct.len()];
    for &r in &raw {
        let p = SpherePoint::from_complex(r);
        let mut d1 = (f64::INFINITY, usize::MAX);
        let mut d2 = f64::INFINITY;
        for (i, (root, _)) in distinct.iter().enumerate() {
            let q = SpherePoint::from_complex(*root);
            let dist = p.chordal_distance(&q);
            if dist < d1.0 {
                d2 = d1.0;
                d1 = (dist, i);
            } else if dist < d2 {
                d2 = dist;
            }
        }
        if d1.1 == usize::MAX {
            return Err(Error::NumericalFailure(
                "no distinct root candidates".into(),
            ));
        }
        if d1.0 > tol.cluster_radius() && d2 < 2.0 * d1.0 {
            return Err(Error::NumericalFailure(format!(
                "cluster ambiguity near {}: competing groupings at distances {:.3e} and {:.3e}",
                r, d1.0, d2
            )));
        }
        counts[d1.1] += 1;
    }
    for (i, (root, k)) in distinct.iter().enumerate() {
        if counts[i] != *k {
            return Err(Error::NumericalFailure(format!(
                "multiplicity mismatch near {}: grouping gives {}, square-free exponent {}",
                root, counts[i], k
            )));
        }
    }

    // distinct roots must stay separated
    for i in 0..distinct.len() {
        for j in i + 1..distinct.len() {
            let a = SpherePoint::from_complex(distinct[i].0);
            let b = SpherePoint::from_complex(distinct[j].0);
            if a.chordal_distance(&b) <= tol.cluster_radius() {
                return Err(Error::NumericalFailure(
                    "distinct roots closer than the clustering radius".into(),
                ));
            }
        }
    }

    // map back through the rotation; points within machine noise of
    // infinity snap to it exactly
    let entries = distinct
        .into_iter()
        .map(|(root, k)| {
            let point = match t {
                None => SpherePoint::from_complex(root),
                Some(_) => apply_matrix_to_point(&m, root),
            };
            let point = if !point.is_infinity() && point.z().abs() < 1e-13 * point.x().abs() {
                SpherePoint::infinity(Mode::Float)
            } else {
                point
            };
            RootEntry {
                point,
                multiplicity: k,
                approx: false,
            }
        })
        .collect();
    Ok(RootList { entries })
}

fn horner(poly: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in poly.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

fn polish(poly: &[Complex64], mut z: Complex64, mult: usize) -> Complex64 {
    // multiplicity-weighted Newton. A step is kept only when it strictly
    // reduces |p|: at a numerically exact multiple root both p and p' sit at
    // rounding-noise level and their ratio is garbage, so improvement is the
    // only safe acceptance test.
    let (mut best, _) = horner(poly, z);
    for _ in 0..4 {
        let (v, dv) = horner(poly, z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv * mult as f64;
        let sn = step.norm();
        if !sn.is_finite() || sn > 0.1 * (1.0 + z.norm()) {
            break;
        }
        let cand = z - step;
        let (vc, _) = horner(poly, cand);
        if vc.norm() < best.norm() {
            z = cand;
            best = vc;
        } else {
            break;
        }
    }
    z
}

/// All roots of a complex polynomial (coefficients low-to-high, leading
/// coefficient significant). Multiple roots come out as clusters of nearby
/// simple approximations.
pub(crate) fn aberth_all(poly: &[Complex64]) -> Result<Vec<Complex64>> {
    let scale = poly.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::ZeroForm);
    }
    let p: Vec<Complex64> = poly.iter().map(|c| c / scale).collect();
    let deg = match p.iter().rposition(|c| c.norm() > 0.0) {
        Some(d) => d,
        None => return Err(Error::ZeroForm),
    };
    let p = &p[..=deg];
    // exact zeros at the origin split off immediately
    let t = p.iter().position(|c| c.norm() > 0.0).unwrap();
    let mut roots = vec![Complex64::new(0.0, 0.0); t];
    let p = &p[t..];
    let n = p.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-p[0] / p[1]);
        return Ok(roots);
    }
    if n == 2 {
        let (a, b, c) = (p[2], p[1], p[0]);
        let disc = (b * b - 4.0 * a * c).sqrt();
        // stable quadratic: pick the sign that avoids cancellation
        let q = if (b.conj() * disc).re >= 0.0 {
            -(b + disc) / 2.0
        } else {
            -(b - disc) / 2.0
        };
        if q.norm() > 0.0 {
            roots.push(q / a);
            roots.push(c / q);
        } else {
            roots.push(Complex64::new(0.0, 0.0));
            roots.push(Complex64::new(0.0, 0.0));
        }
        return Ok(roots);
    }

    let mut z = bini_initial_guesses(p);
    let mut converged = vec![false; n];
    for _iter in 0..400 {
        let mut done = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (v, dv) = horner(p, z[i]);
            if v.norm() == 0.0 {
                converged[i] = true;
                continue;
            }
            let newton = if dv.norm() > 0.0 {
                v / dv
            } else {
                Complex64::new(1e-8, 1e-8)
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += 1.0 / diff;
                    } else {
                        // coincident iterates: nudge deterministically
                        let nudge = Complex64::new(1e-6, 1e-6) * (1.0 + z[i].norm());
                        z[i] += nudge;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * s;
            let w = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= w;
            if !z[i].re.is_finite() || !z[i].im.is_finite() {
                return Err(Error::NumericalFailure("root iteration diverged".into()));
            }
            if w.norm() <= 1e-14 * (1.0 + z[i].norm()) {
                converged[i] = true;
            } else {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    roots.extend(z);
    Ok(roots)
}

// Starting points on annuli read off the upper convex hull of (k, ln|a_k|),
// following Bini's recipe for Ehrlich–Aberth.
fn bini_initial_guesses(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let pts: Vec<(usize, f64)> = p
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let m = c.norm();
            if m > 0.0 {
                Some((i, m.ln()))
            } else {
                None
            }
        })
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // keep the hull upper-convex
            let cross = (x2 as f64 - x1 as f64) * (y - y1) - (x as f64 - x1 as f64) * (y2 - y1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    let mut guesses = Vec::with_capacity(n);
    let two_pi = std::f64::consts::TAU;
    for seg in hull.windows(2) {
        let (k1, h1) = seg[0];
        let (k2, h2) = seg[1];
        let m = k2 - k1;
        let r = ((h1 - h2) / m as f64).exp();
        for j in 0..m {
            let th = two_pi * (j as f64 + 0.5) / m as f64 + 0.85 * k1 as f64;
            guesses.push(Complex64::from_polar(r, th));
        }
    }
    // hull degeneracies should not happen, but never return a short list
    while guesses.len() < n {
        let k = guesses.len();
        guesses.push(Complex64::from_polar(1.0 + 0.3 * k as f64, 0.61 * k as f64));
    }
    guesses.truncate(n);
    guesses
}

// ---------------------------------------------------------------------------
// Exact path.
// ---------------------------------------------------------------------------

fn roots_exact(f: &BinaryForm, tol: Tolerance) -> Result<RootList> {
    let d = f.degree();
    let (poly, inf_mult) = f.dehomogenize(0.0);
    let mut entries: Vec<RootEntry> = Vec::new();
    if inf_mult > 0 {
        entries.push(RootEntry {
            point: SpherePoint::infinity(Mode::Exact),
            multiplicity: inf_mult,
            approx: false,
        });
    }
    let gpoly: Vec<GaussianRational> = poly
        .iter()
        .map(|c| c.as_exact().expect("exact mode").clone())
        .collect();
    // square-free chain on the finite part
    let factors = exact_squarefree_chain(&gpoly);
    for (factor, k) in factors {
        let (exact_roots, approx_roots) = roots_of_squarefree_exact(&factor)?;
        for r in exact_roots {
            entries.push(RootEntry {
                point: SpherePoint::from_affine(Scalar::Exact(r)),
                multiplicity: k,
                approx: false,
            });
        }
        for r in approx_roots {
            entries.push(RootEntry {
                point: SpherePoint::from_complex(r),
                multiplicity: k,
                approx: true,
            });
        }
    }
    let list = RootList { entries };
    if list.total_multiplicity() != d {
        return Err(Error::Internal(format!(
            "exact root multiplicities sum to {} instead of {}",
            list.total_multiplicity(),
            d
        )));
    }
    let _ = tol;
    Ok(list)
}

fn exact_squarefree_chain(p: &[GaussianRational]) -> Vec<(Vec<GaussianRational>, usize)> {
    use crate::form::{poly_deg_exact, poly_deriv_exact, poly_divmod_exact, poly_gcd_exact};
    let mut us: Vec<Vec<GaussianRational>> = Vec::new();
    let mut g = p.to_vec();
    while poly_deg_exact(&g).unwrap_or(0) >= 1 {
        let next = poly_gcd_exact(&g, &poly_deriv_exact(&g));
        let (u, _r) = poly_divmod_exact(&g, &next);
        us.push(u);
        g = next;
    }
    let mut result = Vec::new();
    for k in 1..=us.len() {
        let w = if k < us.len() {
            let (q, _r) = poly_divmod_exact(&us[k - 1], &us[k]);
            q
        } else {
            us[k - 1].clone()
        };
        if poly_deg_exact(&w).unwrap_or(0) >= 1 {
            result.push((w, k));
        }
    }
    result
}

// Roots of a square-free exact polynomial: Gaussian-rational ones exactly,
// the rest as float refinements.
fn roots_of_squarefree_exact(
    p: &[GaussianRational],
) -> Result<(Vec<GaussianRational>, Vec<Complex64>)> {
    use crate::form::poly_deg_exact;
    let mut work = p.to_vec();
    let mut exact = Vec::new();
    let mut approx = Vec::new();
    loop {
        let deg = poly_deg_exact(&work).unwrap_or(0);
        if deg == 0 {
            break;
        }
        if deg == 1 {
            let r = work[0].neg().div(&work[1]).expect("nonzero leading");
            exact.push(r);
            break;
        }
        // float roots guide rational reconstruction
        let fpoly: Vec<Complex64> = work[..=deg].iter().map(|c| c.to_complex()).collect();
        let froots = aberth_all(&fpoly)?;
        let mut found = None;
        for r in &froots {
            if let Some(cand) = reconstruct_gaussian(*r) {
                if eval_exact(&work, &cand).is_zero() {
                    found = Some(cand);
                    break;
                }
            }
        }
        match found {
            Some(root) => {
                work = deflate_exact(&work, &root);
                exact.push(root);
            }
            None => {
                // no further rational roots: refine each remaining root and
                // report it as approximate
                for r in froots {
                    let polished = polish(&fpoly, r, 1);
                    approx.push(polished);
                }
                break;
            }
        }
    }
    Ok((exact, approx))
}

fn eval_exact(p: &[GaussianRational], x: &GaussianRational) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for c in p.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

fn deflate_exact(p: &[GaussianRational], root: &GaussianRational) -> Vec<GaussianRational> {
    use crate::form::poly_deg_exact;
    let deg = poly_deg_exact(p).expect("nonzero");
    let mut q = vec![GaussianRational::zero(); deg];
    let mut carry = p[deg].clone();
    for k in (0..deg).rev() {
        q[k] = carry.clone();
        carry = p[k].add(&carry.mul(root));
    }
    debug_assert!(carry.is_zero(), "deflation by a verified root");
    q
}

// Continued-fraction reconstruction of both parts, with exact verification
// left to the caller. Bounded denominators keep this honest: a false
// positive is impossible, a miss just leaves the root flagged approximate.
fn reconstruct_gaussian(z: Complex64) -> Option<GaussianRational> {
    let re = reconstruct_rational(z.re, 1_000_000, 1e-9)?;
    let im = reconstruct_rational(z.im, 1_000_000, 1e-9)?;
    Some(GaussianRational::new(re, im))
}

fn reconstruct_rational(x: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    let (mut a, mut b) = (1i64, 0i64); // numerator convergents
    let (mut c, mut d) = (0i64, 1i64); // denominator convergents
    let mut v = x;
    for _ in 0..40 {
        let ai = v.floor();
        if ai.abs() > 9e17 {
            return None;
        }
        let ai_int = ai as i64;
        let na = ai_int.checked_mul(a)?.checked_add(b)?;
        let nc = ai_int.checked_mul(c)?.checked_add(d)?;
        b = a;
        d = c;
        a = na;
        c = nc;
        if c.abs() > max_den {
            return None;
        }
        if c != 0 {
            let approx = a as f64 / c as f64;
            if (approx - x).abs() <= tol * x.abs().max(1.0) {
                return Some(BigRational::new(BigInt::from(a), BigInt::from(c)));
            }
        }
        let frac = v - ai;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    None
}
