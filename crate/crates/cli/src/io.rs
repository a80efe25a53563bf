//! JSON schemas for instances, verdicts, divisor reports, and
//! constellations, with conversions to the core types.
//!
//! Coefficients travel as strings: "a/b" rational strings in exact mode and
//! 17-significant-digit decimal strings in float mode, so round-trips are
//! bit-exact on both paths.

use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use realfn_core::monodromy::{Constellation, Perm};
use realfn_core::scalar::{GaussianRational, Mode, Scalar};
use realfn_core::sphere::{Involution, SpherePoint};
use realfn_core::{Mobius, RationalMap, Tolerance};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CoeffDto {
    pub re: String,
    pub im: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PointDto {
    #[serde(rename = "X")]
    pub x: CoeffDto,
    #[serde(rename = "Z")]
    pub z: CoeffDto,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct InstanceFile {
    pub numerator: Vec<CoeffDto>,
    pub denominator: Vec<CoeffDto>,
    pub tau: String,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct DivisorEntryDto {
    pub point: PointDto,
    pub multiplicity: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(rename_all = "snake_case")]
pub enum StabilityDto {
    Matching(Vec<(usize, usize)>),
    Failure { entry: usize, point: PointDto },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerdictFile {
    pub verdict: String,
    pub g: Option<[[CoeffDto; 2]; 2]>,
    pub residual: f64,
    pub sigma_divisor: Vec<DivisorEntryDto>,
    pub stability: StabilityDto,
    pub lambda_sign: Option<i8>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct DivisorReport {
    pub degree: usize,
    pub critical_values: Vec<PointDto>,
    pub sigma_divisor: Vec<DivisorEntryDto>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TruthDto {
    pub class: String,
    pub scramble: [[CoeffDto; 2]; 2],
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ScrambleOutput {
    pub instance: InstanceFile,
    pub truth: TruthDto,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ConstellationFile {
    pub degree: usize,
    pub permutations: Vec<Vec<Vec<usize>>>,
}

// ---------------------------------------------------------------------------
// Scalar conversions.
// ---------------------------------------------------------------------------

pub fn scalar_to_dto(s: &Scalar) -> CoeffDto {
    match s {
        Scalar::Exact(g) => CoeffDto {
            re: g.re.to_string(),
            im: g.im.to_string(),
        },
        Scalar::Float(c) => CoeffDto {
            re: format_f64(c.re),
            im: format_f64(c.im),
        },
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

fn parse_rational(text: &str, what: &str) -> Result<BigRational, String> {
    BigRational::from_str(text.trim())
        .or_else(|_| BigInt::from_str(text.trim()).map(BigRational::from_integer))
        .map_err(|_| format!("{}: invalid rational '{}'", what, text))
}

fn parse_decimal(text: &str, what: &str) -> Result<f64, String> {
    f64::from_str(text.trim()).map_err(|_| format!("{}: invalid decimal '{}'", what, text))
}

pub fn dto_to_scalar(dto: &CoeffDto, mode: Mode, what: &str) -> Result<Scalar, String> {
    match mode {
        Mode::Exact => {
            let re = parse_rational(&dto.re, &format!("{}.re", what))?;
            let im = parse_rational(&dto.im, &format!("{}.im", what))?;
            Ok(Scalar::Exact(GaussianRational::new(re, im)))
        }
        Mode::Float => {
            let re = parse_decimal(&dto.re, &format!("{}.re", what))?;
            let im = parse_decimal(&dto.im, &format!("{}.im", what))?;
            Ok(Scalar::float(re, im))
        }
    }
}

pub fn point_to_dto(p: &SpherePoint) -> PointDto {
    PointDto {
        x: scalar_to_dto(p.x()),
        z: scalar_to_dto(p.z()),
    }
}

pub fn mobius_to_dto(m: &Mobius) -> [[CoeffDto; 2]; 2] {
    let [a, b, c, d] = m.entries();
    [
        [scalar_to_dto(a), scalar_to_dto(b)],
        [scalar_to_dto(c), scalar_to_dto(d)],
    ]
}

// ---------------------------------------------------------------------------
// Instance conversions.
// ---------------------------------------------------------------------------

pub fn parse_tau(text: &str) -> Result<Involution, String> {
    match text {
        "conj" => Ok(Involution::Conj),
        "antipodal" => Ok(Involution::Antipodal),
        other => Err(format!(
            "tau: expected 'conj' or 'antipodal', got '{}'",
            other
        )),
    }
}

pub fn parse_mode(text: &str) -> Result<Mode, String> {
    match text {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        other => Err(format!(
            "mode: expected 'exact' or 'float', got '{}'",
            other
        )),
    }
}

pub fn tau_name(tau: Involution) -> &'static str {
    match tau {
        Involution::Conj => "conj",
        Involution::Antipodal => "antipodal",
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

/// Builds the map from an instance file; errors carry the coefficient index.
pub fn instance_to_map(
    file: &InstanceFile,
    tol: Tolerance,
) -> Result<(RationalMap, Involution, Mode), String> {
    if file.numerator.is_empty() {
        return Err("numerator: empty coefficient array".into());
    }
    if file.denominator.is_empty() {
        return Err("denominator: empty coefficient array".into());
    }
    let tau = parse_tau(&file.tau)?;
    let mode = parse_mode(&file.mode)?;
    let mut num = Vec::with_capacity(file.numerator.len());
    for (i, dto) in file.numerator.iter().enumerate() {
        num.push(dto_to_scalar(dto, mode, &format!("numerator[{}]", i))?);
    }
    let mut den = Vec::with_capacity(file.denominator.len());
    for (i, dto) in file.denominator.iter().enumerate() {
        den.push(dto_to_scalar(dto, mode, &format!("denominator[{}]", i))?);
    }
    let map = RationalMap::from_univariate(&num, &den, tol).map_err(|e| e.to_string())?;
    Ok((map, tau, mode))
}

/// Serializes a map as an instance file (univariate coefficient arrays of
/// the form pair).
pub fn map_to_instance(
    f: &RationalMap,
    tau: Involution,
    mode: Mode,
    tol: Option<f64>,
    seed: Option<u64>,
) -> InstanceFile {
    InstanceFile {
        numerator: f.numerator().coeffs().iter().map(scalar_to_dto).collect(),
        denominator: f.denominator().coeffs().iter().map(scalar_to_dto).collect(),
        tau: tau_name(tau).into(),
        mode: mode_name(mode).into(),
        tol,
        seed,
    }
}

// ---------------------------------------------------------------------------
// Constellation conversions.
// ---------------------------------------------------------------------------

pub fn file_to_constellation(file: &ConstellationFile) -> Result<Constellation, String> {
    let mut perms = Vec::with_capacity(file.permutations.len());
    for (i, cycles) in file.permutations.iter().enumerate() {
        let p = Perm::from_cycles(file.degree, cycles)
            .map_err(|e| format!("permutations[{}]: {}", i, e))?;
        perms.push(p);
    }
    Constellation::new(file.degree, perms).map_err(|e| e.to_string())
}

pub fn constellation_to_file(c: &Constellation) -> ConstellationFile {
    ConstellationFile {
        degree: c.degree(),
        permutations: c.generators().iter().map(|p| p.cycles()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_strings_round_trip_bits() {
        for x in [0.1, -3.25e-9, 1.0 / 3.0, std::f64::consts::PI] {
            let s = format_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(x.to_bits(), back.to_bits(), "{}", s);
        }
    }

    #[test]
    fn rational_strings_round_trip() {
        let s = Scalar::Exact(GaussianRational::from_ratio(-3, 7, 1, 2));
        let dto = scalar_to_dto(&s);
        assert_eq!(dto.re, "-3/7");
        assert_eq!(dto.im, "1/2");
        let back = dto_to_scalar(&dto, Mode::Exact, "x").unwrap();
        assert!(matches!(back, Scalar::Exact(g) if g == GaussianRational::from_ratio(-3, 7, 1, 2)));
    }

    #[test]
    fn instance_parse_reports_index() {
        let file = InstanceFile {
            numerator: vec![
                CoeffDto {
                    re: "1".into(),
                    im: "0".into(),
                },
                CoeffDto {
                    re: "oops".into(),
                    im: "0".into(),
                },
            ],
            denominator: vec![CoeffDto {
                re: "1".into(),
                im: "0".into(),
            }],
            tau: "conj".into(),
            mode: "exact".into(),
            tol: None,
            seed: None,
        };
        let err = instance_to_map(&file, Tolerance::default()).unwrap_err();
        assert!(err.contains("numerator[1]"), "{}", err);
    }
}
