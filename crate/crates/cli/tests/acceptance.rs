//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (`cargo test --test acceptance -- --nocapture` shows them).
//!
//! The criteria pin the central equivalence (divisor stability agrees with
//! constructive success on every instance), certificate recovery with tight
//! residuals, degree bookkeeping, exact/float agreement, known answers,
//! covering decompositions, and byte-level determinism.

use std::process::Command;
use std::time::Instant;

use num::complex::Complex64;

use realfn_core::divisor::{preimage_divisor, sigma_divisor, sigma_form_exact};
use realfn_core::generator::{perturb_map, random_complex_map, scramble_instance, SeedClass};
use realfn_core::monodromy::{Constellation, Perm};
use realfn_core::ratmap::RationalMap;
use realfn_core::reality::{
    conj_transport, descent_solve, divisor_criterion, mobius_factor, reality_test, verify_verdict,
    DescentClass, Verdict,
};
use realfn_core::roots::raw_roots;
use realfn_core::scalar::{Mode, Scalar, Tolerance};
use realfn_core::sphere::{Involution, SpherePoint};
use realfn_core::StabilityWitness;

const TOL: Tolerance = Tolerance(1e-9);

struct Criterion {
    number: u8,
    name: &'static str,
}

impl Criterion {
    fn pass(&self, detail: String) {
        println!(
            "acceptance {} ({}): PASS — {}",
            self.number, self.name, detail
        );
    }

    fn fail(&self, detail: String) -> ! {
        println!(
            "acceptance {} ({}): FAIL — {}",
            self.number, self.name, detail
        );
        panic!("acceptance criterion {} failed: {}", self.number, detail);
    }
}

fn zmap(mode: Mode, num: &[i64], den: &[i64]) -> RationalMap {
    let n: Vec<Scalar> = num.iter().map(|&v| Scalar::from_int(mode, v)).collect();
    let d: Vec<Scalar> = den.iter().map(|&v| Scalar::from_int(mode, v)).collect();
    RationalMap::from_univariate(&n, &d, TOL).unwrap()
}

// A deterministic mixed batch: scrambles of the positive classes, perturbed
// near-misses, and generic complex maps, cycling degrees 1..=6.
fn mixed_instance(tau: Involution, index: usize, seed: u64) -> RationalMap {
    let degree = 1 + (index % 6);
    let variant = index % 3;
    let make_positive = || {
        let (class, degree) = match tau {
            Involution::Conj => (SeedClass::Real, degree),
            Involution::Antipodal => {
                if degree % 2 == 0 {
                    (SeedClass::Real, degree)
                } else {
                    (SeedClass::Pseudoreal, degree)
                }
            }
        };
        scramble_instance(seed, degree, tau, class, Mode::Float, TOL)
            .expect("scramble succeeds")
            .0
    };
    match variant {
        0 => make_positive(),
        1 => {
            // perturbed near-misses come from real-class seeds: their
            // critical structure is generic, so a 1e-3 kick stays resolvable
            // at the matching radius (a kicked z^d twist sits too close to a
            // deep stratum of the discriminant for f64 to separate)
            let d = match tau {
                Involution::Conj => degree,
                Involution::Antipodal => degree + degree % 2,
            };
            let base = scramble_instance(seed, d, tau, SeedClass::Real, Mode::Float, TOL)
                .expect("scramble succeeds")
                .0;
            perturb_map(&base, seed, 1e-3).expect("perturbation succeeds")
        }
        _ => random_complex_map(seed, degree, Mode::Float, TOL).expect("random map"),
    }
}

// The constructive chain in isolation; Some(residual) on success.
fn chain(f: &RationalMap, tau: Involution, seed: u64) -> Option<f64> {
    let transported = conj_transport(f, tau);
    let m = mobius_factor(f, &transported, TOL).expect("factoring does not error")?;
    let verdict = match descent_solve(&m, TOL, seed).expect("descent does not error") {
        DescentClass::Inconsistent => panic!("descent inconsistent for an existing factor"),
        DescentClass::Real(g) => Verdict::Real {
            g,
            residual: 0.0,
            lambda_sign: 1,
        },
        DescentClass::Pseudoreal(g) => Verdict::Pseudoreal {
            g,
            residual: 0.0,
            lambda_sign: -1,
        },
    };
    Some(verify_verdict(f, tau, &verdict).expect("verification runs"))
}

#[test]
fn criterion_1_theorem_oracle_equivalence() {
    let c = Criterion {
        number: 1,
        name: "divisor criterion agrees with reality_test, 200 per involution",
    };
    let start = Instant::now();
    let mut checked = 0usize;
    for tau in [Involution::Conj, Involution::Antipodal] {
        for i in 0..200usize {
            let seed = 90_000
                + i as u64
                + if tau == Involution::Conj {
                    0
                } else {
                    1_000_000
                };
            let f = mixed_instance(tau, i, seed);
            let (criterion, _) = divisor_criterion(&f, tau, TOL).expect("criterion runs");
            // the constructive side, in isolation, must reach the same answer
            let constructed = chain(&f, tau, seed);
            if criterion != constructed.is_some() {
                c.fail(format!(
                    "instance {} ({:?}): criterion {} but construction {}",
                    i,
                    tau,
                    criterion,
                    constructed.is_some()
                ));
            }
            // and the full pipeline (which cross-checks internally) agrees
            let verdict = match reality_test(&f, tau, TOL, seed) {
                Ok(v) => v,
                Err(e) => c.fail(format!("instance {} ({:?}): {}", i, tau, e)),
            };
            if criterion != verdict.is_equivalent() {
                c.fail(format!(
                    "instance {} ({:?}): criterion {} but verdict {:?}",
                    i, tau, criterion, verdict
                ));
            }
            if tau == Involution::Conj && matches!(verdict, Verdict::Pseudoreal { .. }) {
                c.fail(format!("instance {}: pseudoreal under conjugation", i));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 60.0 {
        c.fail(format!(
            "agreement held but took {:.1}s (budget 60s)",
            elapsed.as_secs_f64()
        ));
    }
    c.pass(format!(
        "{} instances agree in {:.1}s",
        checked,
        elapsed.as_secs_f64()
    ));
}

#[test]
fn criterion_2_real_scramble_recovery() {
    let c = Criterion {
        number: 2,
        name: "100 real scrambles recover Real with residual < 1e-8",
    };
    let mut max_residual = 0.0f64;
    for i in 0..100usize {
        let degree = 1 + (i % 6);
        let seed = 40_000 + i as u64;
        let (f, _) = scramble_instance(
            seed,
            degree,
            Involution::Conj,
            SeedClass::Real,
            Mode::Float,
            TOL,
        )
        .expect("scramble succeeds");
        let v = reality_test(&f, Involution::Conj, TOL, seed).expect("test runs");
        match v {
            Verdict::Real { residual, .. } => {
                let check = verify_verdict(&f, Involution::Conj, &v).expect("verify runs");
                let r = residual.max(check);
                max_residual = max_residual.max(r);
                if r >= 1e-8 {
                    c.fail(format!("instance {}: residual {:.3e}", i, r));
                }
            }
            other => c.fail(format!(
                "instance {} (deg {}): verdict {:?}",
                i, degree, other
            )),
        }
    }
    c.pass(format!("100/100 Real, max residual {:.3e}", max_residual));
}

#[test]
fn criterion_3_pseudoreal_scramble_recovery() {
    let c = Criterion {
        number: 3,
        name: "50 pseudoreal scrambles recover Pseudoreal; Conj never yields Pseudoreal",
    };
    let mut max_residual = 0.0f64;
    for i in 0..50usize {
        let degree = [1usize, 3, 5][i % 3];
        let seed = 50_000 + i as u64;
        let (f, _) = scramble_instance(
            seed,
            degree,
            Involution::Antipodal,
            SeedClass::Pseudoreal,
            Mode::Float,
            TOL,
        )
        .expect("scramble succeeds");
        let v = reality_test(&f, Involution::Antipodal, TOL, seed).expect("test runs");
        match v {
            Verdict::Pseudoreal { residual, .. } => {
                let check = verify_verdict(&f, Involution::Antipodal, &v).expect("verify runs");
                let r = residual.max(check);
                max_residual = max_residual.max(r);
                if r >= 1e-8 {
                    c.fail(format!("instance {}: residual {:.3e}", i, r));
                }
            }
            other => c.fail(format!(
                "instance {} (deg {}): verdict {:?}",
                i, degree, other
            )),
        }
    }
    // Conj suites: every equivalent verdict must be Real
    for i in 0..60usize {
        let seed = 60_000 + i as u64;
        let f = mixed_instance(Involution::Conj, i, seed);
        match reality_test(&f, Involution::Conj, TOL, seed) {
            Ok(Verdict::Pseudoreal { .. }) => {
                c.fail(format!("conj instance {} returned Pseudoreal", i))
            }
            Ok(_) => {}
            Err(e) => c.fail(format!("conj instance {} errored: {}", i, e)),
        }
    }
    c.pass(format!(
        "50/50 Pseudoreal (max residual {:.3e}), 0 Pseudoreal under Conj",
        max_residual
    ));
}

#[test]
fn criterion_4_riemann_hurwitz_bookkeeping() {
    let c = Criterion {
        number: 4,
        name: "deg W = 2d−2, Σ(ord−1) = 2d−2, fibers have degree d",
    };
    let mut checked = 0usize;
    for i in 0..400usize {
        let tau = if i % 2 == 0 {
            Involution::Conj
        } else {
            Involution::Antipodal
        };
        let seed = 70_000 + i as u64;
        let f = mixed_instance(tau, i, seed);
        let d = f.degree();
        if d == 0 {
            continue;
        }
        let w = f.wronskian().expect("wronskian");
        if w.degree() != 2 * d - 2 {
            c.fail(format!(
                "instance {}: deg W = {} for d = {}",
                i,
                w.degree(),
                d
            ));
        }
        if d >= 2 {
            let sigma = sigma_divisor(&f, TOL).expect("sigma");
            let excess: usize = sigma.entries().iter().map(|(_, m)| m - 1).sum();
            if excess != 2 * d - 2 {
                c.fail(format!(
                    "instance {}: Σ(ord−1) = {} for d = {}",
                    i, excess, d
                ));
            }
            let values = realfn_core::divisor::critical_values(&f, TOL).expect("values");
            for v in &values {
                let fiber = preimage_divisor(&f, v, TOL).expect("fiber");
                if fiber.degree() != d {
                    c.fail(format!(
                        "instance {}: fiber degree {} ≠ {}",
                        i,
                        fiber.degree(),
                        d
                    ));
                }
            }
        }
        checked += 1;
    }
    c.pass(format!("{} instances keep all three identities", checked));
}

#[test]
fn criterion_5_exact_float_agreement() {
    let c = Criterion {
        number: 5,
        name:
            "30 Gaussian-rational instances: carrier divisor matches and verdict classes coincide",
    };
    let mut made = 0usize;
    let mut index = 0usize;
    while made < 30 {
        let i = index;
        index += 1;
        let seed = 80_000 + i as u64;
        // mix: conj scrambles, antipodal scrambles of both classes, generics
        let (f, tau) = match i % 4 {
            0 => {
                let d = 1 + (i / 4) % 4;
                (
                    scramble_instance(seed, d, Involution::Conj, SeedClass::Real, Mode::Exact, TOL)
                        .expect("scramble")
                        .0,
                    Involution::Conj,
                )
            }
            1 => {
                let d = [1usize, 3][(i / 4) % 2];
                (
                    scramble_instance(
                        seed,
                        d,
                        Involution::Antipodal,
                        SeedClass::Pseudoreal,
                        Mode::Exact,
                        TOL,
                    )
                    .expect("scramble")
                    .0,
                    Involution::Antipodal,
                )
            }
            2 => {
                let d = [2usize, 4][(i / 4) % 2];
                (
                    scramble_instance(
                        seed,
                        d,
                        Involution::Antipodal,
                        SeedClass::Real,
                        Mode::Exact,
                        TOL,
                    )
                    .expect("scramble")
                    .0,
                    Involution::Antipodal,
                )
            }
            _ => {
                let d = 2 + (i / 4) % 3;
                (
                    random_complex_map(seed, d, Mode::Exact, TOL).expect("random"),
                    if i % 8 < 4 {
                        Involution::Conj
                    } else {
                        Involution::Antipodal
                    },
                )
            }
        };
        made += 1;
        let f_float = f.to_float();
        // divisor carriers agree under tolerance matching: every float Σ
        // entry of multiplicity m absorbs exactly m raw roots of the exact
        // carrier form. Lowering a content-normalized integer form of degree
        // up to 24 to f64 localizes its multiple roots only to ~1e-5, so the
        // anchoring radius is wider than the base matching radius.
        if f.degree() >= 2 {
            let anchor_radius = 1e-4;
            let t = sigma_form_exact(&f).expect("carrier form");
            let traw = raw_roots(&t.to_float(), TOL).expect("carrier roots");
            let sigma_float = sigma_divisor(&f_float, TOL).expect("float sigma");
            if traw.len() != sigma_float.degree() {
                c.fail(format!(
                    "instance {}: carrier degree {} vs float Σ degree {}",
                    i,
                    traw.len(),
                    sigma_float.degree()
                ));
            }
            let mut consumed = vec![false; traw.len()];
            for (p, m) in sigma_float.entries() {
                let mut count = 0usize;
                for (k, r) in traw.iter().enumerate() {
                    if !consumed[k] && r.chordal_distance(p) < anchor_radius {
                        consumed[k] = true;
                        count += 1;
                    }
                }
                if count != *m {
                    c.fail(format!(
                        "instance {}: {} carrier roots near a multiplicity-{} point of Σ",
                        i, count, m
                    ));
                }
            }
            if consumed.iter().any(|&used| !used) {
                c.fail(format!(
                    "instance {}: carrier roots outside the support of Σ",
                    i
                ));
            }
        }
        // verdict classes coincide
        let ve = reality_test(&f, tau, TOL, seed).expect("exact test");
        let vf = reality_test(&f_float, tau, TOL, seed).expect("float test");
        let same = matches!(
            (&ve, &vf),
            (Verdict::Real { .. }, Verdict::Real { .. })
                | (Verdict::Pseudoreal { .. }, Verdict::Pseudoreal { .. })
                | (Verdict::NotEquivalent { .. }, Verdict::NotEquivalent { .. })
        );
        if !same {
            c.fail(format!("instance {}: exact {:?} vs float {:?}", i, ve, vf));
        }
    }
    c.pass("30/30 instances agree across modes".into());
}

#[test]
fn criterion_6_known_answers() {
    let c = Criterion {
        number: 6,
        name: "known instances: z³−3z, i·z², z³−3iz, z",
    };
    // (z³ − 3z, conj) → Real
    let f = zmap(Mode::Float, &[0, -3, 0, 1], &[1]);
    match reality_test(&f, Involution::Conj, TOL, 0).expect("test") {
        Verdict::Real { .. } => {}
        other => c.fail(format!("z³−3z: {:?}", other)),
    }
    // (i·z², conj) → Real with g∘f real-coefficient up to scale
    let f = RationalMap::from_univariate(
        &[
            Scalar::float(0.0, 0.0),
            Scalar::float(0.0, 0.0),
            Scalar::float(0.0, 1.0),
        ],
        &[Scalar::float(1.0, 0.0)],
        TOL,
    )
    .unwrap();
    match reality_test(&f, Involution::Conj, TOL, 0).expect("test") {
        Verdict::Real { g, .. } => {
            let gf = f.compose_mobius(&g).unwrap();
            let transported = conj_transport(&gf, Involution::Conj);
            let resid = realfn_core::map_equality_residual(&transported, &gf);
            if resid >= 1e-8 {
                c.fail(format!(
                    "i·z²: composition not real-coefficient, residual {:.3e}",
                    resid
                ));
            }
        }
        other => c.fail(format!("i·z²: {:?}", other)),
    }
    // (z³ − 3iz, conj) → NotEquivalent with witness ≈ e^{iπ/4}
    let f = RationalMap::from_univariate(
        &[
            Scalar::float(0.0, 0.0),
            Scalar::float(0.0, -3.0),
            Scalar::float(0.0, 0.0),
            Scalar::float(1.0, 0.0),
        ],
        &[Scalar::float(1.0, 0.0)],
        TOL,
    )
    .unwrap();
    match reality_test(&f, Involution::Conj, TOL, 0).expect("test") {
        Verdict::NotEquivalent { witness } => match witness {
            StabilityWitness::Failure { point, .. } => {
                let expected = SpherePoint::from_complex(Complex64::from_polar(
                    1.0,
                    std::f64::consts::FRAC_PI_4,
                ));
                let err = point.chordal_distance(&expected);
                if err >= 1e-6 {
                    c.fail(format!("z³−3iz: witness chordal error {:.3e}", err));
                }
            }
            StabilityWitness::Matching(_) => c.fail("z³−3iz: matching witness".into()),
        },
        other => c.fail(format!("z³−3iz: {:?}", other)),
    }
    // (z, antipodal) → Pseudoreal
    let f = zmap(Mode::Float, &[0, 1], &[1]);
    match reality_test(&f, Involution::Antipodal, TOL, 0).expect("test") {
        Verdict::Pseudoreal { .. } => {}
        other => c.fail(format!("z antipodal: {:?}", other)),
    }
    c.pass("4/4 known instances".into());
}

#[test]
fn criterion_7_monodromy_examples() {
    let c = Criterion {
        number: 7,
        name: "genus bookkeeping, cyclic blocks {1,3},{2,4}, quotient = z², 4 = 2×2",
    };
    // z²: genus 0
    let s = Perm::from_cycles(2, &[vec![1, 2]]).unwrap();
    let z2 = Constellation::new(2, vec![s.clone(), s.clone()]).unwrap();
    if z2.genus().unwrap() != 0 {
        c.fail("z² constellation genus ≠ 0".into());
    }
    // z³−3z: passport [2,1],[2,1],[3], genus 0
    let a = Perm::from_cycles(3, &[vec![1, 2]]).unwrap();
    let b = Perm::from_cycles(3, &[vec![2, 3]]).unwrap();
    let inf = a.then(&b).inverse();
    let cubic = Constellation::new(3, vec![a, b, inf]).unwrap();
    if cubic.genus().unwrap() != 0 {
        c.fail("cubic constellation genus ≠ 0".into());
    }
    let passport = cubic.passport();
    if passport.0[0] != vec![2, 1] || passport.0[1] != vec![2, 1] || passport.0[2] != vec![3] {
        c.fail(format!("cubic passport {:?}", passport));
    }
    // four transpositions on two sheets: genus 1
    let torus = Constellation::new(2, vec![s.clone(), s.clone(), s.clone(), s]).unwrap();
    if torus.genus().unwrap() != 1 {
        c.fail("four-transposition constellation genus ≠ 1".into());
    }
    // cyclic z⁴: blocks {1,3},{2,4} and quotient z²
    let s0 = Perm::from_cycles(4, &[vec![1, 2, 3, 4]]).unwrap();
    let sinf = Perm::from_cycles(4, &[vec![1, 4, 3, 2]]).unwrap();
    let z4 = Constellation::new(4, vec![s0, sinf]).unwrap();
    let blocks = z4.block_closure(0, &[vec![1, 1]]).unwrap();
    if blocks.blocks_one_based() != vec![vec![1, 3], vec![2, 4]] {
        c.fail(format!("z⁴ blocks {:?}", blocks.blocks_one_based()));
    }
    let q = z4.quotient(&blocks).unwrap();
    if q.degree() != 2 || q.passport() != z2.passport() {
        c.fail("z⁴ quotient is not the z² constellation".into());
    }
    if z4.degree() != blocks.block_size() * q.degree() {
        c.fail("degree multiplicativity 4 = 2×2 violated".into());
    }
    c.pass("all covering examples verified".into());
}

#[test]
fn criterion_8_byte_determinism() {
    let c = Criterion {
        number: 8,
        name: "identical seeds produce byte-identical verdict files",
    };
    let dir = std::env::temp_dir();
    let inst = dir.join(format!("realfn-acc-{}-inst.json", std::process::id()));
    let out1 = dir.join(format!("realfn-acc-{}-v1.json", std::process::id()));
    let out2 = dir.join(format!("realfn-acc-{}-v2.json", std::process::id()));
    let scramble = Command::new(env!("CARGO_BIN_EXE_realfn"))
        .args([
            "scramble",
            "--degree",
            "4",
            "--tau",
            "conj",
            "--class",
            "real",
            "--seed",
            "123",
            "--json-out",
            inst.to_str().unwrap(),
        ])
        .output()
        .expect("scramble runs");
    if !scramble.status.success() {
        c.fail(format!(
            "scramble failed: {}",
            String::from_utf8_lossy(&scramble.stderr)
        ));
    }
    for out in [&out1, &out2] {
        let run = Command::new(env!("CARGO_BIN_EXE_realfn"))
            .args([
                "test",
                "--input",
                inst.to_str().unwrap(),
                "--seed",
                "5",
                "--json-out",
                out.to_str().unwrap(),
            ])
            .output()
            .expect("test runs");
        if !run.status.success() {
            c.fail(format!(
                "test failed: {}",
                String::from_utf8_lossy(&run.stderr)
            ));
        }
    }
    let a = std::fs::read(&out1).expect("first verdict");
    let b = std::fs::read(&out2).expect("second verdict");
    std::fs::remove_file(&inst).ok();
    std::fs::remove_file(&out1).ok();
    std::fs::remove_file(&out2).ok();
    if a != b {
        c.fail("verdict files differ between runs".into());
    }
    // the scramble itself is reproducible too
    let again = Command::new(env!("CARGO_BIN_EXE_realfn"))
        .args([
            "scramble", "--degree", "4", "--tau", "conj", "--class", "real", "--seed", "123",
        ])
        .output()
        .expect("scramble runs");
    if again.stdout != scramble.stdout {
        c.fail("scramble output differs between runs".into());
    }
    c.pass(format!("{} identical bytes across repeated runs", a.len()));
}
