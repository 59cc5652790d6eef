//! Builders for the ancilla-mode and extraction W-state generation schemes,
//! and their closed-form success probabilities.
//!
//! The ancilla scheme starts from N+1 uncorrelated particles
//! ∣A₁↓, …, A_N↓, A_{N+1}↑⟩. Random-destination nodes split each ↓ particle
//! evenly between a measurement mode and an intermediate mode,
//!
//! ```text
//! φᵢ     = (∣Mᵢ↓⟩ + ∣Cᵢ↓⟩)/√2          (i = 1, …, N)
//! φ_{N+1} = Σᵢ ∣Mᵢ↑⟩/√N
//! ```
//!
//! and the pipeline postselects one particle per measurement mode, routes
//! the intermediate modes to a common ancilla mode C, and is left with
//! η·∣W_N⟩ ⊗ ∣C↓⟩. The common-ancilla variant sets Cᵢ = C before
//! postselection; the extraction variant instead spreads N particles from a
//! single mode over the nonlocal mode M_nl = Σᵢ ∣Mᵢ⟩/√N, which is
//! Pauli-forbidden for fermions.

use std::fmt;

use num_complex::Complex64;

use crate::algebra::{
    canonicalize, BasisState, CanonicalState, ModeLabel, OneParticleKet, ProductKet, Spin,
    Statistics,
};
use crate::error::{Error, Result};

/// The three protocol variants.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum SchemeVariant {
    /// Separate intermediate modes C₁ … C_N, postselected before merging.
    AncillaSeparate,
    /// All intermediate modes identified with the common mode C up front.
    AncillaCommon,
    /// N particles extracted from one mode through M_nl (bosons only).
    Extraction,
}

impl fmt::Display for SchemeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SchemeVariant::AncillaSeparate => "ancilla-separate",
            SchemeVariant::AncillaCommon => "ancilla-common",
            SchemeVariant::Extraction => "extraction",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for SchemeVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ancilla-separate" => Ok(SchemeVariant::AncillaSeparate),
            "ancilla-common" => Ok(SchemeVariant::AncillaCommon),
            "extraction" => Ok(SchemeVariant::Extraction),
            other => Err(format!("unknown scheme variant `{other}`")),
        }
    }
}

/// Measurement mode Mᵢ (1-based).
pub fn measurement_mode(i: usize) -> ModeLabel {
    ModeLabel::new(format!("M{i}"))
}

/// Intermediate ancilla mode Cᵢ (1-based).
pub fn intermediate_mode(i: usize) -> ModeLabel {
    ModeLabel::new(format!("C{i}"))
}

/// The common ancilla mode C.
pub fn common_mode() -> ModeLabel {
    ModeLabel::new("C")
}

/// Source mode Aᵢ (1-based).
pub fn source_mode(i: usize) -> ModeLabel {
    ModeLabel::new(format!("A{i}"))
}

fn reject_fermion_extraction(stats: Statistics) -> Result<()> {
    if stats.is_fermion() {
        return Err(Error::PauliForbidden(
            "the extraction protocol is undefined for fermions: its working state puts \
             N−1 particles in the same mode and spin"
                .into(),
        ));
    }
    Ok(())
}

/// The pre-network product state for a scheme.
///
/// Ancilla variants give ∣A₁↓, …, A_N↓, A_{N+1}↑⟩; extraction gives
/// ∣M↑, M↓, …, M↓⟩ (norm √((N−1)!), bosons only).
pub fn build_initial(n: usize, variant: SchemeVariant, stats: Statistics) -> Result<ProductKet> {
    assert!(n >= 2, "schemes are defined for n >= 2");
    match variant {
        SchemeVariant::AncillaSeparate | SchemeVariant::AncillaCommon => {
            let states = (1..=n)
                .map(|i| BasisState::new(source_mode(i), Spin::Down))
                .chain(std::iter::once(BasisState::new(source_mode(n + 1), Spin::Up)));
            Ok(ProductKet::elementary(states, stats))
        }
        SchemeVariant::Extraction => {
            reject_fermion_extraction(stats)?;
            let states = std::iter::once(BasisState::new("M", Spin::Up))
                .chain((1..n).map(|_| BasisState::new("M", Spin::Down)));
            Ok(ProductKet::elementary(states, stats))
        }
    }
}

/// The product state after the network nodes.
///
/// Ancilla variants give the N+1 slots φ₁, …, φ_{N+1} above (with Cᵢ = C for
/// the common variant); extraction gives N slots on the nonlocal mode, one ↑
/// and N−1 ↓.
pub fn build_network_state(
    n: usize,
    variant: SchemeVariant,
    stats: Statistics,
) -> Result<ProductKet> {
    assert!(n >= 2, "schemes are defined for n >= 2");
    let inv_sqrt_n = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    match variant {
        SchemeVariant::AncillaSeparate | SchemeVariant::AncillaCommon => {
            let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut slots: Vec<OneParticleKet> = (1..=n)
                .map(|i| {
                    let c_mode = match variant {
                        SchemeVariant::AncillaCommon => common_mode(),
                        _ => intermediate_mode(i),
                    };
                    OneParticleKet::from_terms([
                        (BasisState::new(measurement_mode(i), Spin::Down), half),
                        (BasisState::new(c_mode, Spin::Down), half),
                    ])
                })
                .collect();
            slots.push(OneParticleKet::from_terms(
                (1..=n).map(|i| (BasisState::new(measurement_mode(i), Spin::Up), inv_sqrt_n)),
            ));
            Ok(ProductKet::new(slots, stats))
        }
        SchemeVariant::Extraction => {
            reject_fermion_extraction(stats)?;
            let nonlocal = |spin: Spin| {
                OneParticleKet::from_terms(
                    (1..=n).map(|i| (BasisState::new(measurement_mode(i), spin), inv_sqrt_n)),
                )
            };
            let mut slots = vec![nonlocal(Spin::Up)];
            slots.extend((1..n).map(|_| nonlocal(Spin::Down)));
            Ok(ProductKet::new(slots, stats))
        }
    }
}

/// The target W state on modes M₁ … M_N: the normalized uniform
/// superposition of the N single-excitation canonical terms, one ↑ among
/// N−1 ↓, every coefficient 1/√N.
pub fn build_w_state(n: usize, stats: Statistics) -> CanonicalState {
    assert!(n >= 2, "W states are defined for n >= 2");
    let coeff = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let terms = (1..=n).map(|excited| {
        let mut basis: Vec<BasisState> = (1..=n)
            .map(|i| {
                let spin = if i == excited { Spin::Up } else { Spin::Down };
                BasisState::new(measurement_mode(i), spin)
            })
            .collect();
        basis.sort();
        (basis, coeff)
    });
    CanonicalState::from_terms(terms, stats, n)
}

/// The post-merge (N+1)-particle state: in each of the N terms one particle
/// sits in ∣C↓⟩, one carries ↑ in some Mᵢ, and the rest are ↓ in the other
/// measurement modes. Equals η·∣W_N⟩ ⊗ ∣C↓⟩ up to slot reordering.
pub fn build_target(n: usize, stats: Statistics) -> CanonicalState {
    assert!(n >= 2, "targets are defined for n >= 2");
    let coeff = 1.0 / (n as f64).sqrt();
    let terms = (1..=n).map(|excited| {
        // written slot order: M₁↓ … C↓ (replacing M_excited↓) … M_N↓, M_excited↑
        let mut written: Vec<BasisState> = (1..=n)
            .map(|i| {
                if i == excited {
                    BasisState::new(common_mode(), Spin::Down)
                } else {
                    BasisState::new(measurement_mode(i), Spin::Down)
                }
            })
            .collect();
        written.push(BasisState::new(measurement_mode(excited), Spin::Up));
        let (basis, sign) =
            canonicalize(written, stats).expect("target terms have no repeated basis state");
        (basis, Complex64::new(sign * coeff, 0.0))
    });
    CanonicalState::from_terms(terms, stats, n + 1)
}

/// Selector for the four closed-form success probabilities.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProbabilityKind {
    /// Separate-ancilla postselection: 1/2^N.
    BosonAncilla,
    /// Common-ancilla postselection for fermions: 1/(N+1).
    FermionAncilla,
    /// Common-ancilla postselection for bosons: 1/Σ_{m=0}^N N!/(N−m)!.
    BosonCommon,
    /// Extraction protocol: 1/((N−1)!·N^{N−1}).
    BosonExtraction,
}

/// Evaluates the selected closed form in binary64.
pub fn closed_form_prob(kind: ProbabilityKind, n: usize) -> f64 {
    assert!(n >= 2, "closed forms are defined for n >= 2");
    match kind {
        ProbabilityKind::BosonAncilla => 0.5f64.powi(n as i32),
        ProbabilityKind::FermionAncilla => 1.0 / (n as f64 + 1.0),
        ProbabilityKind::BosonCommon => {
            // Σ_{m=0}^{n} n!/(n−m)! accumulated as falling factorials
            let mut term = 1.0;
            let mut sum = 1.0;
            for m in 1..=n {
                term *= (n - m + 1) as f64;
                sum += term;
            }
            1.0 / sum
        }
        ProbabilityKind::BosonExtraction => {
            let factorial: f64 = (1..n).map(|k| k as f64).product();
            1.0 / (factorial * (n as f64).powi(n as i32 - 1))
        }
    }
}

/// The closed form a brute-force run of (variant, statistics) must
/// reproduce; `None` when the combination is Pauli-forbidden.
///
/// Postselecting the separate-ancilla state gives 1/2^N for either
/// statistics: with distinct Cᵢ no elementary component ever repeats a
/// basis state, so fermions see no Pauli suppression at that stage.
pub fn expected_probability_kind(
    variant: SchemeVariant,
    stats: Statistics,
) -> Option<ProbabilityKind> {
    match (variant, stats) {
        (SchemeVariant::AncillaSeparate, _) => Some(ProbabilityKind::BosonAncilla),
        (SchemeVariant::AncillaCommon, Statistics::Boson) => Some(ProbabilityKind::BosonCommon),
        (SchemeVariant::AncillaCommon, Statistics::Fermion) => Some(ProbabilityKind::FermionAncilla),
        (SchemeVariant::Extraction, Statistics::Boson) => Some(ProbabilityKind::BosonExtraction),
        (SchemeVariant::Extraction, Statistics::Fermion) => None,
    }
}

/// One row of the success-probability table.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ProbabilityRow {
    pub n: usize,
    pub p_boson_ancilla: f64,
    pub p_fermion_ancilla: f64,
    pub p_boson_common: f64,
    pub p_extraction: f64,
}

/// Success probabilities of all four closed forms over a range of N.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    pub rows: Vec<ProbabilityRow>,
}

impl ProbabilityTable {
    pub fn compute(n_min: usize, n_max: usize) -> Self {
        assert!(2 <= n_min && n_min <= n_max, "need 2 <= n_min <= n_max");
        let rows = (n_min..=n_max)
            .map(|n| ProbabilityRow {
                n,
                p_boson_ancilla: closed_form_prob(ProbabilityKind::BosonAncilla, n),
                p_fermion_ancilla: closed_form_prob(ProbabilityKind::FermionAncilla, n),
                p_boson_common: closed_form_prob(ProbabilityKind::BosonCommon, n),
                p_extraction: closed_form_prob(ProbabilityKind::BosonExtraction, n),
            })
            .collect();
        ProbabilityTable { rows }
    }
}
