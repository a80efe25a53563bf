//! Fibers, critical values, the divisor of the preimage of the critical
//! values, and its stability under an antiholomorphic involution.
//!
//! Two carriers are kept for the divisor: a point multiset (float mode, and
//! exact mode where roots permit) and a single binary form whose zero divisor
//! it is (exact mode, no root extraction). The stability test runs on either
//! carrier.

use crate::error::{Error, Result};
use crate::form::{compose_pair, resultant, BinaryForm};
use crate::ratmap::RationalMap;
use crate::roots::roots_with_multiplicities;
use crate::scalar::{GaussianRational, Mode, Scalar, Tolerance};
use crate::sphere::{Involution, SpherePoint};

/// A finite multiset of sphere points with positive multiplicities, pairwise
/// distinct, kept in canonical order so equality is structural.
#[derive(Clone, Debug, Default)]
pub struct Divisor {
    entries: Vec<(SpherePoint, usize)>,
}

/// Outcome of the stability test: either a bijective matching of entries
/// onto their τ-images, or the first entry (in canonical order) whose
/// τ-image is missing or carries a different multiplicity.
#[derive(Clone, Debug)]
pub enum StabilityWitness {
    Matching(Vec<(usize, usize)>),
    Failure { entry: usize, point: SpherePoint },
}

impl StabilityWitness {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityWitness::Matching(_))
    }
}

/// Which points enter the divisor: the full preimage of the critical values
/// (default), or the critical points alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SigmaConvention {
    #[default]
    FullPreimage,
    CriticalPointsOnly,
}

impl Divisor {
    pub fn from_entries(entries: Vec<(SpherePoint, usize)>, tol: Tolerance) -> Result<Self> {
        for (p, m) in &entries {
            if *m == 0 {
                return Err(Error::InvalidInput("zero multiplicity in divisor".into()));
            }
            let _ = p;
        }
        let mut entries = entries;
        entries.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        // pairwise distinctness at the clustering radius
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                let same =
                    if entries[i].0.mode() == Mode::Exact && entries[j].0.mode() == Mode::Exact {
                        entries[i].0.eq_exact(&entries[j].0)
                    } else {
                        entries[i].0.chordal_distance(&entries[j].0) <= tol.cluster_radius()
                    };
                if same {
                    return Err(Error::NumericalFailure(
                        "divisor entries collide within the clustering radius".into(),
                    ));
                }
            }
        }
        Ok(Divisor { entries })
    }

    pub fn empty() -> Self {
        Divisor::default()
    }

    pub fn entries(&self) -> &[(SpherePoint, usize)] {
        &self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Zero divisor of the pencil β·P − α·Q at v = [α : β]; its degree is
/// exactly deg f for every v, the point at infinity included.
pub fn preimage_divisor(f: &RationalMap, v: &SpherePoint, tol: Tolerance) -> Result<Divisor> {
    if f.degree() == 0 {
        return Err(Error::InvalidInput("fiber of a degree-0 map".into()));
    }
    if v.mode() != f.mode() {
        return Err(Error::ModeMismatch("fiber value"));
    }
    let alpha = v.x();
    let beta = v.z();
    let pencil = f
        .numerator()
        .scale(beta)
        .sub(&f.denominator().scale(alpha))?;
    let roots = roots_with_multiplicities(&pencil, tol)?;
    let entries = roots
        .entries
        .into_iter()
        .map(|e| (e.point, e.multiplicity))
        .collect();
    Divisor::from_entries(entries, tol)
}

/// Distinct images of the critical points; empty iff deg f = 1. Values
/// colliding within the clustering radius are merged (float mode).
pub fn critical_values(f: &RationalMap, tol: Tolerance) -> Result<Vec<SpherePoint>> {
    if f.degree() == 0 {
        return Err(Error::InvalidInput(
            "critical values of a degree-0 map".into(),
        ));
    }
    if f.degree() == 1 {
        return Ok(Vec::new());
    }
    let w = f.wronskian()?;
    let wroots = roots_with_multiplicities(&w, tol)?;
    let mut values: Vec<SpherePoint> = Vec::new();
    for e in &wroots.entries {
        let value = if f.mode() == Mode::Exact && e.point.mode() != Mode::Exact {
            // irrational critical point: its value is computed in float
            f.to_float().eval(&e.point)?
        } else {
            f.eval(&e.point)?
        };
        values.push(value);
    }
    values.sort_by(|a, b| a.canonical_cmp(b));
    // merge duplicates
    let mut merged: Vec<SpherePoint> = Vec::new();
    for v in values {
        let dup = merged.iter().any(|u| match (u.mode(), v.mode()) {
            (Mode::Exact, Mode::Exact) => u.eq_exact(&v),
            _ => u.chordal_distance(&v) <= tol.cluster_radius(),
        });
        if !dup {
            merged.push(v);
        }
    }
    Ok(merged)
}

/// Σ(f): the divisor of the full preimage of the critical values, with
/// multiplicity ord at every point.
pub fn sigma_divisor(f: &RationalMap, tol: Tolerance) -> Result<Divisor> {
    sigma_divisor_with(f, tol, SigmaConvention::FullPreimage)
}

/// Σ(f) under an explicit convention (see [`SigmaConvention`]).
pub fn sigma_divisor_with(
    f: &RationalMap,
    tol: Tolerance,
    convention: SigmaConvention,
) -> Result<Divisor> {
    if f.degree() <= 1 {
        return Ok(Divisor::empty());
    }
    let values = critical_values(f, tol)?;
    let mut entries: Vec<(SpherePoint, usize)> = Vec::new();
    for v in &values {
        let fiber = if f.mode() == Mode::Exact && v.mode() != Mode::Exact {
            preimage_divisor(&f.to_float(), v, tol)?
        } else {
            preimage_divisor(f, v, tol)?
        };
        entries.extend(fiber.entries().iter().cloned());
    }
    if convention == SigmaConvention::CriticalPointsOnly {
        entries.retain(|(_, m)| *m >= 2);
    }
    Divisor::from_entries(entries, tol)
}

/// Stability of a divisor under an involution: a perfect matching of entries
/// onto τ-images with equal multiplicities, or the first failing entry.
///
/// Float mode matches at the matching radius through a deterministic
/// augmenting-path assignment; a point with two candidate partners within a
/// factor 2 of each other is ambiguous and raises a numerical failure.
pub fn is_tau_stable(d: &Divisor, tau: Involution, tol: Tolerance) -> Result<StabilityWitness> {
    let n = d.entries.len();
    if n == 0 {
        return Ok(StabilityWitness::Matching(Vec::new()));
    }
    let all_exact = d.entries.iter().all(|(p, _)| p.mode() == Mode::Exact);
    // admissible partners for the τ-image of each entry
    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (p, m) in &d.entries {
        let image = tau.apply(p);
        let mut cands: Vec<(f64, usize)> = Vec::new();
        for (j, (q, mq)) in d.entries.iter().enumerate() {
            if mq != m {
                continue;
            }
            if all_exact {
                if image.eq_exact(q) {
                    cands.push((0.0, j));
                }
            } else {
                let dist = image.chordal_distance(q);
                if dist < tol.matching_radius() {
                    cands.push((dist, j));
                }
            }
        }
        cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        if !all_exact && cands.len() >= 2 && cands[1].0 < 2.0 * cands[0].0.max(tol.cluster_radius())
        {
            return Err(Error::NumericalFailure(format!(
                "stability matching ambiguity: two partners at distances {:.3e} and {:.3e}",
                cands[0].0, cands[1].0
            )));
        }
        adjacency.push(cands.into_iter().map(|(_, j)| j).collect());
    }
    match perfect_matching(&adjacency, n) {
        Some(mate) => {
            let pairs = (0..n).map(|i| (i, mate[i])).collect();
            Ok(StabilityWitness::Matching(pairs))
        }
        None => {
            // first entry that cannot be matched
            for (i, adj) in adjacency.iter().enumerate() {
                if adj.is_empty() {
                    return Ok(StabilityWitness::Failure {
                        entry: i,
                        point: d.entries[i].0.clone(),
                    });
                }
            }
            // all have candidates but no perfect matching exists
            let mate = greedy_unmatched(&adjacency, n);
            Ok(StabilityWitness::Failure {
                entry: mate,
                point: d.entries[mate].0.clone(),
            })
        }
    }
}

// Kuhn's augmenting-path bipartite matching; rows in canonical order keeps
// the result deterministic.
fn perfect_matching(adjacency: &[Vec<usize>], n: usize) -> Option<Vec<usize>> {
    let mut mate_of_right = vec![usize::MAX; n];
    fn try_augment(
        i: usize,
        adjacency: &[Vec<usize>],
        visited: &mut [bool],
        mate_of_right: &mut [usize],
    ) -> bool {
        for &j in &adjacency[i] {
            if visited[j] {
                continue;
            }
            visited[j] = true;
            if mate_of_right[j] == usize::MAX
                || try_augment(mate_of_right[j], adjacency, visited, mate_of_right)
            {
                mate_of_right[j] = i;
                return true;
            }
        }
        false
    }
    for i in 0..n {
        let mut visited = vec![false; n];
        if !try_augment(i, adjacency, &mut visited, &mut mate_of_right) {
            return None;
        }
    }
    let mut mate = vec![usize::MAX; n];
    for j in 0..n {
        if mate_of_right[j] != usize::MAX {
            mate[mate_of_right[j]] = j;
        }
    }
    Some(mate)
}

fn greedy_unmatched(adjacency: &[Vec<usize>], n: usize) -> usize {
    let mut taken = vec![false; n];
    for (i, adj) in adjacency.iter().enumerate() {
        let mut placed = false;
        for &j in adj {
            if !taken[j] {
                taken[j] = true;
                placed = true;
                break;
            }
        }
        if !placed {
            return i;
        }
    }
    0
}

/// Matches two divisors entry-by-entry at the matching radius (equal
/// multiplicities required). Exact pairs compare exactly.
pub fn match_divisors(a: &Divisor, b: &Divisor, tol: Tolerance) -> Option<Vec<(usize, usize)>> {
    if a.entries.len() != b.entries.len() || a.degree() != b.degree() {
        return None;
    }
    let n = a.entries.len();
    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (p, m) in &a.entries {
        let mut row = Vec::new();
        for (j, (q, mq)) in b.entries.iter().enumerate() {
            if m != mq {
                continue;
            }
            let same = if p.mode() == Mode::Exact && q.mode() == Mode::Exact {
                p.eq_exact(q)
            } else {
                p.chordal_distance(q) < tol.matching_radius()
            };
            if same {
                row.push(j);
            }
        }
        adjacency.push(row);
    }
    perfect_matching(&adjacency, n).map(|mate| (0..n).map(|i| (i, mate[i])).collect())
}

/// A binary form T with zero divisor Σ(f), built without root extraction:
/// the critical-value form V(α, β) = Res_{X,Z}(β·P − α·Q, W) is interpolated
/// from scalar resultants, its square-free part is taken, and the pencil is
/// substituted back. Exact mode only; degree ≤ 1 yields the constant form 1.
pub fn sigma_form_exact(f: &RationalMap) -> Result<BinaryForm> {
    if f.mode() != Mode::Exact {
        return Err(Error::ModeMismatch("sigma form requires exact mode"));
    }
    if f.degree() <= 1 {
        return Ok(BinaryForm::constant(Scalar::one(Mode::Exact)));
    }
    let d = f.degree();
    let w = f.wronskian()?;
    let vdeg = 2 * d - 2;
    // sample V(t, 1) = Res(P − t·Q, W) at vdeg+1 rational nodes
    let mut nodes: Vec<GaussianRational> = Vec::with_capacity(vdeg + 1);
    let mut k = 0i64;
    while nodes.len() < vdeg + 1 {
        nodes.push(GaussianRational::from_i64(k, 0));
        if k > 0 {
            nodes.push(GaussianRational::from_i64(-k, 0));
        }
        k += 1;
    }
    nodes.truncate(vdeg + 1);
    let mut samples: Vec<GaussianRational> = Vec::with_capacity(nodes.len());
    for t in &nodes {
        let pencil = f
            .numerator()
            .sub(&f.denominator().scale(&Scalar::Exact(t.clone())))?;
        let r = if pencil.is_zero() {
            // t equals the constant value of a degenerate pencil; cannot
            // happen for coprime maps of degree ≥ 1
            return Err(Error::Internal("degenerate pencil in sigma form".into()));
        } else {
            resultant(&pencil, &w)?
        };
        samples.push(r.as_exact().unwrap().clone());
    }
    let vpoly = lagrange_interpolate(&nodes, &samples);
    // square-free part, with one factor of β if the value ∞ is critical
    let vform = {
        let coeffs: Vec<Scalar> = vpoly.iter().map(|c| Scalar::Exact(c.clone())).collect();
        BinaryForm::from_poly(&coeffs, vdeg, Mode::Exact)
    };
    if vform.is_zero() {
        return Err(Error::Internal("critical-value form vanished".into()));
    }
    let (vfin, vinf) = vform.dehomogenize(0.0);
    let gv: Vec<GaussianRational> = vfin.iter().map(|c| c.as_exact().unwrap().clone()).collect();
    let sf = exact_squarefree_part(&gv);
    let sf_scalars: Vec<Scalar> = sf.iter().map(|c| Scalar::Exact(c.clone())).collect();
    let sf_deg = sf.len() - 1;
    let v_sf = BinaryForm::from_poly(&sf_scalars, sf_deg + usize::from(vinf >= 1), Mode::Exact);
    let t_form = compose_pair(&v_sf, f.numerator(), f.denominator());
    Ok(t_form.normalize())
}

fn exact_squarefree_part(p: &[GaussianRational]) -> Vec<GaussianRational> {
    use crate::form::{poly_deg_exact, poly_deriv_exact, poly_divmod_exact, poly_gcd_exact};
    match poly_deg_exact(p) {
        None => vec![GaussianRational::zero()],
        Some(0) => vec![GaussianRational::one()],
        Some(_) => {
            let g = poly_gcd_exact(p, &poly_deriv_exact(p));
            let (q, _r) = poly_divmod_exact(p, &g);
            let dq = poly_deg_exact(&q).unwrap_or(0);
            q[..=dq].to_vec()
        }
    }
}

/// Exact-mode stability of Σ(f): T must be proportional to its τ-transport.
/// Returns the decision together with the carrier form.
pub fn sigma_stable_exact(f: &RationalMap, tau: Involution) -> Result<(bool, BinaryForm)> {
    let t = sigma_form_exact(f)?;
    let transported = t.tau_transport(tau);
    let stable = t.proportional_to(&transported, Tolerance::default());
    Ok((stable, t))
}

fn lagrange_interpolate(
    nodes: &[GaussianRational],
    values: &[GaussianRational],
) -> Vec<GaussianRational> {
    let n = nodes.len();
    let mut acc = vec![GaussianRational::zero(); n];
    for i in 0..n {
        // basis polynomial Π_{j≠i} (x − x_j) / (x_i − x_j)
        let mut basis = vec![GaussianRational::zero(); n];
        basis[0] = GaussianRational::one();
        let mut deg = 0usize;
        let mut denom = GaussianRational::one();
        for j in 0..n {
            if j == i {
                continue;
            }
            // multiply by (x − x_j)
            for k in (0..=deg).rev() {
                let high = basis[k].clone();
                basis[k + 1] = basis[k + 1].add(&high);
                basis[k] = basis[k].mul(&nodes[j].neg());
            }
            deg += 1;
            denom = denom.mul(&nodes[i].sub(&nodes[j]));
        }
        let scale = values[i].div(&denom).expect("distinct nodes");
        for k in 0..=deg {
            acc[k] = acc[k].add(&basis[k].mul(&scale));
        }
    }
    acc
}
