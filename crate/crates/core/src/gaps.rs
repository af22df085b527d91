//! From `M_k` evidence and admissible tuples to bounds on `H_m`.
//!
//! A bound `H_m <= H` follows once some `M_k` exceeds the threshold
//! `m / theta` (with prime doubling) and an admissible `k`-tuple of diameter
//! `H` is known. Here `theta = 58/115 (1 - 1/r)`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dashu_float::round::mode::HalfAway;
use dashu_float::FBig;
use dashu_int::UBig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mk::{mk_asymptotic, mk_certificate, MkCertificate, PUBLISHED_INSTANCES};
use crate::tuples::{is_admissible, narrow_end, parse_tuple, AdmissibleTuple, CandidateTuple};

/// Exponent parameter used for every claim in the report.
pub const DEFAULT_R: u64 = 554_401;

/// Environment variable naming the directory with downloaded tuple tables.
pub const DATA_DIR_ENV: &str = "GAPCERT_DATA_DIR";

/// Cited lower bound `M_53 >= 3.986213`.
pub const CITED_M53: f64 = 3.986213;

const H2_TUPLE_TEXT: &str = include_str!("../data/admissible_53_264.txt");

/// `(m, table file, k after end-truncation, expected diameter)`.
pub const PUBLISHED_TABLES: [(u32, &str, usize, u64); 3] = [
    (3, "admissible_5511_52130.txt", 5229, 49_342),
    (4, "admissible_41588_474372.txt", 38_802, 442_052),
    (5, "admissible_309661_4143140.txt", 284_031, 3_788_384),
];

/// `58 (r - 1) / (115 r)`.
pub fn theta_fi(r: u64) -> Result<f64> {
    if r < 2 {
        return Err(Error::Domain(format!("r = {r} < 2")));
    }
    // both integers are exact in f64 for r < 2^53 / 115, leaving one rounding
    let num = 58u128 * (r as u128 - 1);
    let den = 115u128 * r as u128;
    Ok(num as f64 / den as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelOfDistribution {
    pub r: u64,
    pub theta: f64,
    pub doubled: bool,
}

impl LevelOfDistribution {
    pub fn new(r: u64, doubled: bool) -> Result<Self> {
        Ok(LevelOfDistribution {
            r,
            theta: theta_fi(r)?,
            doubled,
        })
    }

    pub fn required_mk(&self, m: u32) -> Result<f64> {
        required_mk(m, self.theta, self.doubled)
    }
}

/// `m / theta` with prime doubling, `2m / theta` without.
pub fn required_mk(m: u32, theta: f64, doubled: bool) -> Result<f64> {
    if m < 1 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, 1)")));
    }
    let m = m as f64;
    Ok(if doubled { m / theta } else { 2.0 * m / theta })
}

type Big = FBig<HalfAway, 2>;

const LOG_PRECISION: usize = 256;

fn asymptotic_big(k: &UBig) -> Big {
    let l = Big::from(k.clone()).with_precision(LOG_PRECISION).value().ln();
    let two = Big::from(2u8).with_precision(LOG_PRECISION).value();
    &l - &two * l.ln() - two
}

/// Smallest `k >= 16` whose asymptotic `M_k` bound exceeds a threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalK {
    pub m: u32,
    pub threshold: f64,
    /// Decimal digits of `k`, which outgrows every machine integer by `m = 40`.
    pub k: String,
    pub ln_k: f64,
    pub value_at_k: f64,
    /// `bound(k) - threshold`, taken before rounding to `f64`; positive.
    pub margin_at_k: f64,
    /// `bound(k - 1) - threshold`; not positive. `None` when `k = 16`, where the bound is first defined.
    pub margin_at_k_minus_1: Option<f64>,
}

impl MinimalK {
    pub fn k_big(&self) -> UBig {
        self.k.parse().expect("stored as decimal digits")
    }
}

pub fn minimal_k_asymptotic(m: u32, theta: f64, doubled: bool) -> Result<MinimalK> {
    let threshold = required_mk(m, theta, doubled)?;
    // exact conversion, so the comparison below is against the same number
    let thr = Big::try_from(threshold).map_err(|_| Error::Domain("threshold not finite".into()))?;
    let holds = |k: &UBig| asymptotic_big(k) > thr;

    let floor = UBig::from(16u8);
    let k = if holds(&floor) {
        floor.clone()
    } else {
        let mut lo = floor.clone();
        let mut hi = &floor * 2u8;
        while !holds(&hi) {
            lo = hi.clone();
            hi = &hi * 2u8;
        }
        // lo fails, hi holds
        while &hi - &lo > UBig::ONE {
            let mid = (&lo + &hi) >> 1;
            if holds(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let before = if k > floor {
        let prev = &k - UBig::ONE;
        if holds(&prev) {
            return Err(Error::Certificate(format!("k - 1 = {prev} also exceeds the threshold")));
        }
        Some((asymptotic_big(&prev) - &thr).to_f64().value())
    } else {
        None
    };
    let ln_k = Big::from(k.clone()).with_precision(LOG_PRECISION).value().ln();
    Ok(MinimalK {
        m,
        threshold,
        k: k.to_string(),
        ln_k: ln_k.to_f64().value(),
        value_at_k: asymptotic_big(&k).to_f64().value(),
        margin_at_k: (asymptotic_big(&k) - &thr).to_f64().value(),
        margin_at_k_minus_1: before,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceSource {
    PolyCertificate,
    CitedConstant,
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MkEvidence {
    Certificate(Box<MkCertificate>),
    Cited { k: u64, value: f64, citation: String },
    Asymptotic { k: u64 },
}

impl MkEvidence {
    pub fn cited_m53() -> Self {
        MkEvidence::Cited {
            k: 53,
            value: CITED_M53,
            citation: "tabulated numerical lower bound for M_53".into(),
        }
    }

    pub fn k(&self) -> u64 {
        match self {
            MkEvidence::Certificate(c) => c.params.k,
            MkEvidence::Cited { k, .. } | MkEvidence::Asymptotic { k } => *k,
        }
    }

    /// The lower bound for `M_k`; certificates contribute their bound minus the quadrature error.
    pub fn value(&self) -> Result<f64> {
        match self {
            MkEvidence::Certificate(c) => Ok(c.conservative_bound()),
            MkEvidence::Cited { value, .. } => Ok(*value),
            MkEvidence::Asymptotic { k } => mk_asymptotic(*k),
        }
    }

    pub fn source(&self) -> EvidenceSource {
        match self {
            MkEvidence::Certificate(_) => EvidenceSource::PolyCertificate,
            MkEvidence::Cited { .. } => EvidenceSource::CitedConstant,
            MkEvidence::Asymptotic { .. } => EvidenceSource::Asymptotic,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MkEvidence::Certificate(c) => c.verify(),
            _ => Ok(()),
        }
    }
}

/// `H_m <= tuple_diameter`, together with the evidence it rests on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBoundClaim {
    pub m: u32,
    pub level: LevelOfDistribution,
    pub threshold: f64,
    pub k: u64,
    pub evidence_value: f64,
    pub source: EvidenceSource,
    pub evidence: MkEvidence,
    pub tuple_diameter: u64,
    pub tuple_hash: String,
    pub certificate_hash: Option<String>,
    #[serde(skip)]
    tuple: Option<AdmissibleTuple>,
}

impl GapBoundClaim {
    /// Re-runs the admissibility check, the certificate check and the threshold inequality.
    pub fn revalidate(&self) -> Result<()> {
        let tuple = self
            .tuple
            .as_ref()
            .ok_or_else(|| Error::Certificate("claim carries no tuple to re-check".into()))?;
        let again = is_admissible(&CandidateTuple::new(tuple.offsets().iter().map(|&h| h as i64).collect())?)
            .map_err(|w| Error::Certificate(format!("tuple no longer admissible: {w}")))?;
        if again.diameter() != self.tuple_diameter || again.content_hash() != self.tuple_hash {
            return Err(Error::Certificate("tuple does not match the recorded hash".into()));
        }
        self.evidence.validate()?;
        let value = self.evidence.value()?;
        let threshold = required_mk(self.m, self.level.theta, true)?;
        if !(value > threshold) || value != self.evidence_value || threshold != self.threshold {
            return Err(Error::Certificate(format!(
                "evidence {value} does not exceed threshold {threshold}"
            )));
        }
        Ok(())
    }
}

pub fn hm_claim(
    m: u32,
    evidence: MkEvidence,
    tuple: &AdmissibleTuple,
    level: &LevelOfDistribution,
) -> Result<GapBoundClaim> {
    if tuple.k() as u64 != evidence.k() {
        return Err(Error::Validation(format!(
            "tuple has {} offsets but the evidence is for k = {}",
            tuple.k(),
            evidence.k()
        )));
    }
    evidence.validate()?;
    let threshold = required_mk(m, level.theta, true)?;
    let value = evidence.value()?;
    if !(value > threshold) {
        return Err(Error::ThresholdNotMet {
            evidence: value,
            threshold,
        });
    }
    let certificate_hash = match &evidence {
        MkEvidence::Certificate(c) => Some(c.content_hash()),
        _ => None,
    };
    Ok(GapBoundClaim {
        m,
        level: LevelOfDistribution { doubled: true, ..*level },
        threshold,
        k: evidence.k(),
        evidence_value: value,
        source: evidence.source(),
        evidence,
        tuple_diameter: tuple.diameter(),
        tuple_hash: tuple.content_hash(),
        certificate_hash,
        tuple: Some(tuple.clone()),
    })
}

/// The embedded admissible 53-tuple of diameter 264.
pub fn h2_tuple() -> AdmissibleTuple {
    let candidate = parse_tuple(H2_TUPLE_TEXT).expect("embedded tuple parses");
    is_admissible(&candidate).expect("embedded tuple is admissible")
}

/// Exponent bookkeeping for a zero-free hypothesis `1 - Re(s) < (log D)^-(r^r + A)`
/// against the requirement `L(1, chi) < (log x)^-(r^r + A - 2)` with `x = D^L`.
///
/// `r^r` is never formed: it enters only through `r ln r`. The hypothesis yields
/// `L(1, chi) << (log D)^-(r^r + A - 2)`, so the error term `L(1, chi) (log x)^(r^r)`
/// is `<< L^(r^r) (log D)^-(A - 2)`. It decays once
/// `ln ln D > r^r ln L / (A - 2)`, i.e. once `ln ln ln D` exceeds
/// `r ln r + ln ln L - ln(A - 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisMargin {
    pub r: u64,
    pub a: f64,
    pub l: f64,
    /// `ln(r^r) = r ln r`.
    pub log_rr: f64,
    /// `ln(r^r + A)`.
    pub lhs_log_exponent: f64,
    /// `ln(r^r + A - 2)`.
    pub rhs_log_exponent: f64,
    /// Power of `log D` by which the error term decays, `A - 2`.
    pub exponent_gap: f64,
    /// Threshold on `ln ln ln D` beyond which the error term is below one.
    pub log_lnln_d_threshold: f64,
    pub dominates: bool,
}

fn check_margin_args(r: u64, a: f64, l: f64) -> Result<()> {
    if r < 2 {
        return Err(Error::Domain(format!("r = {r} < 2")));
    }
    if !(a > 2.0) || !a.is_finite() {
        return Err(Error::Domain(format!("A = {a} must exceed 2")));
    }
    if !(l > r as f64) || !l.is_finite() {
        return Err(Error::Domain(format!("L = {l} must exceed r = {r}")));
    }
    Ok(())
}

fn finish_margin(r: u64, a: f64, l: f64, log_rr: f64, lhs: f64, rhs: f64, threshold: f64) -> HypothesisMargin {
    let gap = a - 2.0;
    let finite = [log_rr, lhs, rhs, threshold].iter().all(|v| v.is_finite());
    HypothesisMargin {
        r,
        a,
        l,
        log_rr,
        lhs_log_exponent: lhs,
        rhs_log_exponent: rhs,
        exponent_gap: gap,
        log_lnln_d_threshold: threshold,
        dominates: finite && gap > 0.0,
    }
}

pub fn hypothesis_margin(r: u64, a: f64, l: f64) -> Result<HypothesisMargin> {
    check_margin_args(r, a, l)?;
    let rf = r as f64;
    let log_rr = rf * rf.ln();
    // ln(r^r + c) = r ln r + ln(1 + c r^-r)
    let shifted = |c: f64| log_rr + (c * (-log_rr).exp()).ln_1p();
    let threshold = log_rr + l.ln().ln() - (a - 2.0).ln();
    Ok(finish_margin(r, a, l, log_rr, shifted(a), shifted(a - 2.0), threshold))
}

/// Largest `r` for which `r^r` is an exact machine integer below `2^53`.
pub const MAX_NUMERIC_MARGIN_R: u64 = 13;

/// [`hypothesis_margin`] evaluated with `r^r` formed directly.
pub fn hypothesis_margin_numeric(r: u64, a: f64, l: f64) -> Result<HypothesisMargin> {
    check_margin_args(r, a, l)?;
    if r > MAX_NUMERIC_MARGIN_R {
        return Err(Error::NotSupported(format!(
            "r^r is not exactly representable for r = {r}"
        )));
    }
    let rr = r.pow(r as u32) as f64;
    let threshold = (rr * l.ln() / (a - 2.0)).ln();
    Ok(finish_margin(r, a, l, rr.ln(), (rr + a).ln(), (rr + a - 2.0).ln(), threshold))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EntryStatus {
    /// Quoted from the literature; nothing is computed here.
    Cited,
    /// Backed by the claim at this index of [`Report::claims`].
    Certified { claim: usize },
    /// Would be certified, but the inputs are unavailable.
    CitedOnly { reason: String },
    /// Rests on a hypothesis beyond the conditional setting; never certified.
    Speculative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub m: u32,
    /// `"<="` or `"="`.
    pub relation: String,
    pub value: u64,
    #[serde(flatten)]
    pub status: EntryStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub entries: Vec<TableEntry>,
    /// Growth of `H_m` in `m`; empty when none is known.
    pub growth: String,
}

#[derive(Clone, Debug, Default)]
pub struct ReportConfig {
    pub data_dir: Option<PathBuf>,
}

impl ReportConfig {
    pub fn from_env() -> Self {
        ReportConfig {
            data_dir: std::env::var_os(DATA_DIR_ENV).map(PathBuf::from),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub r: u64,
    pub theta: f64,
    /// `1 / theta`, the constant in `k >> e^(m / theta)`.
    pub growth_constant: f64,
    pub tables: Vec<Table>,
    pub claims: Vec<GapBoundClaim>,
    pub notes: Vec<String>,
}

fn entry(m: u32, value: u64, status: EntryStatus) -> TableEntry {
    TableEntry {
        m,
        relation: "<=".into(),
        value,
        status,
    }
}

fn cited_table(name: &str, rows: &[(u32, u64)], growth: &str) -> Table {
    Table {
        name: name.into(),
        entries: rows.iter().map(|&(m, v)| entry(m, v, EntryStatus::Cited)).collect(),
        growth: growth.into(),
    }
}

/// Loads a published table and keeps its first `target_k` offsets.
pub fn load_truncated_table(path: &Path, target_k: usize) -> Result<AdmissibleTuple> {
    let text = std::fs::read_to_string(path)?;
    let full = is_admissible(&parse_tuple(&text)?)
        .map_err(|w| Error::Validation(format!("{}: {w}", path.display())))?;
    narrow_end(&full, target_k)
}

pub fn report_tables(cfg: &ReportConfig) -> Result<Report> {
    let level = LevelOfDistribution::new(DEFAULT_R, true)?;
    let mut claims = Vec::new();
    let mut siegel = Vec::new();

    let h2 = hm_claim(2, MkEvidence::cited_m53(), &h2_tuple(), &level)?;
    siegel.push(entry(2, h2.tuple_diameter, EntryStatus::Certified { claim: claims.len() }));
    claims.push(h2);

    for (&(m, file, target_k, cited), &(k, beta, theta_poly, _)) in
        PUBLISHED_TABLES.iter().zip(PUBLISHED_INSTANCES.iter())
    {
        debug_assert_eq!(k as usize, target_k);
        let path = cfg.data_dir.as_ref().map(|d| d.join(file));
        let (value, status) = match path.filter(|p| p.is_file()) {
            None => (
                cited,
                EntryStatus::CitedOnly {
                    reason: format!("tuple table {file} not found; set {DATA_DIR_ENV}"),
                },
            ),
            Some(p) => {
                let tuple = load_truncated_table(&p, target_k)?;
                let cert = mk_certificate(k, beta, theta_poly)?;
                let claim = hm_claim(m, MkEvidence::Certificate(Box::new(cert)), &tuple, &level)?;
                let value = claim.tuple_diameter;
                claims.push(claim);
                (value, EntryStatus::Certified { claim: claims.len() - 1 })
            }
        };
        siegel.push(entry(m, value, status));
    }

    let growth_constant = 1.0 / level.theta;
    let tables = vec![
        Table {
            name: "unconditional".into(),
            entries: std::iter::once(entry(1, 246, EntryStatus::Cited))
                .chain(
                    [(2, 395_106), (3, 24_462_654), (4, 1_404_556_152), (5, 78_602_310_160)]
                        .iter()
                        .map(|&(m, v)| entry(m, v, EntryStatus::Cited)),
                )
                .collect(),
            growth: "e^(3.815 m)".into(),
        },
        cited_table(
            "Elliott-Halberstam",
            &[(1, 12), (2, 270), (3, 52_116), (4, 474_266), (5, 4_137_854)],
            "m e^(2 m)",
        ),
        cited_table("generalized Elliott-Halberstam", &[(1, 6), (2, 252)], ""),
        Table {
            name: "Siegel zeros".into(),
            entries: siegel,
            growth: format!("e^(1.9828 m); computed 1/theta = {growth_constant:.5}"),
        },
        Table {
            name: "Siegel zeros, full non-equidistribution (speculative)".into(),
            entries: vec![
                TableEntry {
                    m: 1,
                    relation: "=".into(),
                    value: 2,
                    status: EntryStatus::Speculative,
                },
                entry(2, 12, EntryStatus::Speculative),
                entry(4, 270, EntryStatus::Speculative),
                entry(6, 52_116, EntryStatus::Speculative),
            ],
            growth: "e^((1 + eps) m) for every eps > 0".into(),
        },
    ];
    Ok(Report {
        r: level.r,
        theta: level.theta,
        growth_constant,
        tables,
        claims,
        notes: vec![
            "claims hold for all sufficiently large L, with the epsilon of the level of distribution absorbed into the strict inequality M_k > m / theta".into(),
            "with prime doubling the threshold is m / theta rather than 2m / theta".into(),
        ],
    })
}

impl Report {
    fn revalidate(&self) -> Result<()> {
        for claim in &self.claims {
            claim.revalidate()?;
        }
        Ok(())
    }

    pub fn render_text(&self) -> Result<String> {
        self.revalidate()?;
        let mut out = String::new();
        let _ = writeln!(out, "r = {}", self.r);
        let _ = writeln!(out, "theta = 58/115 (1 - 1/r) = {}", self.theta);
        let _ = writeln!(out, "1/theta = {:.5}", self.growth_constant);
        for table in &self.tables {
            let _ = writeln!(out, "\n[{}]", table.name);
            for e in &table.entries {
                let tag = match &e.status {
                    EntryStatus::Cited => "cited".to_string(),
                    EntryStatus::Certified { claim } => format!("certified (claim {claim})"),
                    EntryStatus::CitedOnly { reason } => format!("cited-only: {reason}"),
                    EntryStatus::Speculative => "speculative".to_string(),
                };
                let _ = writeln!(out, "H_{} {} {}  [{}]", e.m, e.relation, group_digits(e.value), tag);
            }
            if !table.growth.is_empty() {
                let _ = writeln!(out, "H_m << {}", table.growth);
            }
        }
        let _ = writeln!(out, "\n[claims]");
        for (i, c) in self.claims.iter().enumerate() {
            let _ = writeln!(
                out,
                "claim {i}: H_{} <= {}  k = {}  M_k >= {} > {} = m/theta  source = {:?}",
                c.m,
                group_digits(c.tuple_diameter),
                c.k,
                c.evidence_value,
                c.threshold,
                c.source
            );
            let _ = writeln!(out, "  tuple sha256 = {}", c.tuple_hash);
            if let Some(h) = &c.certificate_hash {
                let _ = writeln!(out, "  certificate sha256 = {h}");
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        Ok(out)
    }

    pub fn render_json(&self) -> Result<String> {
        self.revalidate()?;
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn group_digits(v: u64) -> String {
    let s = v.to_string();
    let mut out = String::new();
    for (i, ch) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}
