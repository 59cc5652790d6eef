//! Measurement-side operations on canonical states: occupancy
//! postselection, mode merging, tensor-factor extraction, fidelity, partial
//! trace and purity, and projective sampling.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    canonicalize, inner, product_overlap, self_overlap, BasisState, CanonicalState, ModeLabel,
    ProductKet, PRUNE_EPS,
};
use crate::error::{Error, Result};

/// Mode-occupancy constraints for postselection. Modes not listed are
/// unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OccupancyPattern {
    constraints: BTreeMap<ModeLabel, usize>,
}

impl OccupancyPattern {
    pub fn new(constraints: BTreeMap<ModeLabel, usize>) -> Self {
        OccupancyPattern { constraints }
    }

    /// Requires exactly one particle in each of the given modes.
    pub fn single(modes: impl IntoIterator<Item = ModeLabel>) -> Self {
        OccupancyPattern {
            constraints: modes.into_iter().map(|m| (m, 1)).collect(),
        }
    }

    pub fn constraints(&self) -> impl Iterator<Item = (&ModeLabel, usize)> {
        self.constraints.iter().map(|(m, &c)| (m, c))
    }

    /// Whether a canonical basis sequence satisfies every constraint.
    pub fn matches(&self, basis: &[BasisState]) -> bool {
        self.constraints.iter().all(|(mode, &required)| {
            basis.iter().filter(|b| &b.mode == mode).count() == required
        })
    }
}

/// Projects onto the occupancy sector selected by `pattern` and
/// renormalizes.
///
/// Returns the success probability — the kept weight over the input weight,
/// equal to ∣⟨kept∣input⟩∣² for normalized kept and input — together with
/// the renormalized kept state. An empty kept sector yields probability 0
/// and the empty state rather than an error.
pub fn postselect_single_occupancy(
    state: &CanonicalState,
    pattern: &OccupancyPattern,
) -> Result<(f64, CanonicalState)> {
    let total = state.norm_squared();
    if total == 0.0 {
        return Err(Error::ZeroNorm("cannot postselect a zero-norm state".into()));
    }
    let kept = CanonicalState::from_terms(
        state
            .terms()
            .filter(|(basis, _)| pattern.matches(basis))
            .map(|(basis, c)| (basis.to_vec(), c)),
        state.statistics(),
        state.particle_count(),
    );
    let probability = kept.norm_squared() / total;
    Ok((probability, kept.normalized()))
}

/// Relabels modes through `mapping` (unlisted modes stay put) and restores
/// canonical order, with sign bookkeeping and Pauli drops.
///
/// The norm is preserved whenever no term ends up with extra multiplicity
/// in a target mode — in the schemes, after postselection, at most one
/// particle occupies the preimage modes.
pub fn merge_modes(
    state: &CanonicalState,
    mapping: &BTreeMap<ModeLabel, ModeLabel>,
) -> CanonicalState {
    let stats = state.statistics();
    let relabeled = state.terms().filter_map(|(basis, c)| {
        let renamed: Vec<BasisState> = basis
            .iter()
            .map(|b| {
                let mode = mapping.get(&b.mode).unwrap_or(&b.mode).clone();
                BasisState::new(mode, b.spin)
            })
            .collect();
        canonicalize(renamed, stats).map(|(sorted, sign)| (sorted, c * sign))
    });
    CanonicalState::from_terms(relabeled, stats, state.particle_count())
}

/// Splits off the particle occupying `mode` as a tensor factor.
///
/// Every term must hold exactly one particle in that mode, with the same
/// spin across terms. The particle is moved to the last slot position with
/// η-sign bookkeeping per transposition; an overall sign is then pulled out
/// so that the leading remainder coefficient is positive. Returns
/// (sign, factored basis state, normalized remainder): re-attaching the
/// factor reproduces the input up to the returned sign.
pub fn factor_out_mode(
    state: &CanonicalState,
    mode: &ModeLabel,
) -> Result<(f64, BasisState, CanonicalState)> {
    let not_factorizable = |reason: &str| Error::NotFactorizable {
        mode: mode.clone(),
        reason: reason.into(),
    };
    if state.is_empty() {
        return Err(not_factorizable("the state has no terms"));
    }
    let stats = state.statistics();
    let mut factored: Option<BasisState> = None;
    let mut remainder_terms = Vec::with_capacity(state.len());
    for (basis, coeff) in state.terms() {
        let positions: Vec<usize> = basis
            .iter()
            .enumerate()
            .filter(|(_, b)| &b.mode == mode)
            .map(|(i, _)| i)
            .collect();
        let position = match positions.as_slice() {
            [p] => *p,
            [] => return Err(not_factorizable("a term does not occupy the mode")),
            _ => return Err(not_factorizable("a term occupies the mode more than once")),
        };
        match &factored {
            None => factored = Some(basis[position].clone()),
            Some(single) if single != &basis[position] => {
                return Err(not_factorizable("terms disagree on the factored spin"));
            }
            _ => {}
        }
        // move the factored particle past the len-1-position states after it
        let sign = stats.transposition_sign(basis.len() - 1 - position);
        let mut rest = basis.to_vec();
        rest.remove(position);
        remainder_terms.push((rest, coeff * sign));
    }
    let raw = CanonicalState::from_terms(remainder_terms, stats, state.particle_count() - 1);
    let lead = raw
        .terms()
        .next()
        .ok_or_else(|| not_factorizable("the remainder cancelled to zero"))?
        .1;
    let sign = if lead.re.abs() >= lead.im.abs() {
        lead.re.signum()
    } else {
        lead.im.signum()
    };
    let remainder = raw.scaled(Complex64::new(sign, 0.0)).normalized();
    Ok((sign, factored.expect("state has terms"), remainder))
}

/// Tensor product with one extra particle in `single` — the inverse of
/// [`factor_out_mode`] up to its returned sign.
pub fn tensor_with(state: &CanonicalState, single: &BasisState) -> CanonicalState {
    let stats = state.statistics();
    let grown = state.terms().filter_map(|(basis, coeff)| {
        let pos = basis.partition_point(|b| b <= single);
        if stats.is_fermion() && pos > 0 && &basis[pos - 1] == single {
            return None;
        }
        let sign = stats.transposition_sign(basis.len() - pos);
        let mut extended = Vec::with_capacity(basis.len() + 1);
        extended.extend_from_slice(&basis[..pos]);
        extended.push(single.clone());
        extended.extend_from_slice(&basis[pos..]);
        Some((extended, coeff * sign))
    });
    CanonicalState::from_terms(grown, stats, state.particle_count() + 1)
}

/// ∣⟨a∣b⟩∣² for states of equal particle number and statistics; both inputs
/// are expected normalized.
pub fn fidelity(a: &CanonicalState, b: &CanonicalState) -> Result<f64> {
    Ok(inner(a, b)?.norm_sqr())
}

/// A reduced density matrix on the canonical basis sequences of the kept
/// modes, normalized to unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensity {
    kept_basis: Vec<Vec<BasisState>>,
    matrix: Vec<Complex64>, // row-major, dim × dim
}

impl ReducedDensity {
    pub fn dim(&self) -> usize {
        self.kept_basis.len()
    }

    pub fn kept_basis(&self) -> &[Vec<BasisState>] {
        &self.kept_basis
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// tr ρ² ∈ [1/dim, 1].
    pub fn purity(&self) -> f64 {
        let dim = self.dim();
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                total += self.entry(i, j) * self.entry(j, i);
            }
        }
        total.re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim).all(|i| {
            (i..dim).all(|j| (self.entry(i, j) - self.entry(j, i).conj()).norm() <= tol)
        })
    }
}

/// Traces out every mode not in `keep`.
///
/// Requires the kept particle number to be the same in every term (the
/// spatially separated regime); the traced parts are elementary canonical
/// subsequences whose overlaps go through the permanent/determinant kernel.
pub fn reduce(state: &CanonicalState, keep: &BTreeSet<ModeLabel>) -> Result<ReducedDensity> {
    if state.is_empty() {
        return Err(Error::ZeroNorm("cannot reduce a zero-norm state".into()));
    }
    let stats = state.statistics();

    struct SplitTerm {
        kept: Vec<BasisState>,
        traced: Vec<BasisState>,
        coeff: Complex64, // includes the reordering sign
    }

    let mut split_terms = Vec::with_capacity(state.len());
    for (basis, coeff) in state.terms() {
        let mut kept = Vec::new();
        let mut traced = Vec::new();
        // sign of the stable reorder to (kept..., traced...): one
        // transposition per (traced, kept) pair out of order
        let mut crossings = 0usize;
        for b in basis {
            if keep.contains(&b.mode) {
                crossings += traced.len();
                kept.push(b.clone());
            } else {
                traced.push(b.clone());
            }
        }
        let sign = stats.transposition_sign(crossings);
        split_terms.push(SplitTerm { kept, traced, coeff: coeff * sign });
    }
    let kept_count = split_terms[0].kept.len();
    if split_terms.iter().any(|t| t.kept.len() != kept_count) {
        return Err(Error::NotReducible(
            "terms disagree on the particle number in the kept modes".into(),
        ));
    }

    let mut kept_basis: Vec<Vec<BasisState>> =
        split_terms.iter().map(|t| t.kept.clone()).collect();
    kept_basis.sort();
    kept_basis.dedup();
    let index_of = |kept: &[BasisState]| kept_basis.binary_search_by(|b| b[..].cmp(kept)).unwrap();

    let traced_overlap = |bra: &[BasisState], ket: &[BasisState]| -> Result<Complex64> {
        if bra.len() != ket.len() {
            return Err(Error::NotReducible(
                "terms disagree on the particle number in the traced modes".into(),
            ));
        }
        if bra.is_empty() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        product_overlap(
            &ProductKet::elementary(bra.iter().cloned(), stats),
            &ProductKet::elementary(ket.iter().cloned(), stats),
        )
    };

    let dim = kept_basis.len();
    let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
    for ket_term in &split_terms {
        let row = index_of(&ket_term.kept);
        for bra_term in &split_terms {
            let col = index_of(&bra_term.kept);
            let overlap = traced_overlap(&bra_term.traced, &ket_term.traced)?;
            if overlap.norm() < PRUNE_EPS {
                continue;
            }
            matrix[row * dim + col] += ket_term.coeff * bra_term.coeff.conj() * overlap;
        }
    }
    let trace: f64 = (0..dim).map(|i| matrix[i * dim + i].re).sum();
    if trace <= 0.0 {
        return Err(Error::NotReducible("the reduced state has zero trace".into()));
    }
    for entry in &mut matrix {
        *entry /= trace;
    }
    Ok(ReducedDensity { kept_basis, matrix })
}

/// A projective-measurement distribution over canonical basis sequences.
///
/// Probabilities are nonnegative and sum to 1; entries follow the canonical
/// basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    entries: Vec<(Vec<BasisState>, f64)>,
}

impl OutcomeDistribution {
    pub fn entries(&self) -> &[(Vec<BasisState>, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total probability of the outcomes satisfying `pattern`.
    pub fn probability_matching(&self, pattern: &OccupancyPattern) -> f64 {
        self.entries
            .iter()
            .filter(|(basis, _)| pattern.matches(basis))
            .map(|(_, p)| p)
            .sum()
    }
}

/// The Born distribution of a projective measurement in the canonical
/// mode⊗spin basis: P(b) = ∣c_b∣²·⟨b∣b⟩ over the squared norm.
pub fn occupancy_distribution(state: &CanonicalState) -> Result<OutcomeDistribution> {
    let total = state.norm_squared();
    if total == 0.0 {
        return Err(Error::ZeroNorm("a zero-norm state has no outcome distribution".into()));
    }
    let entries = state
        .terms()
        .map(|(basis, c)| {
            let weight = c.norm_sqr() * self_overlap(basis, state.statistics());
            (basis.to_vec(), weight / total)
        })
        .collect();
    Ok(OutcomeDistribution { entries })
}

/// Name of the pseudorandom generator backing [`sample`], recorded in
/// sampler metadata for reproducibility.
pub const SAMPLE_GENERATOR: &str = "chacha8";

/// Outcome counts of a seeded sampling run, aligned with the entries of the
/// state's [`occupancy_distribution`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCounts {
    pub entries: Vec<(Vec<BasisState>, u64)>,
    pub shots: u64,
    pub seed: u64,
    pub generator: &'static str,
}

impl SampleCounts {
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    /// Fraction of shots whose outcome satisfies `pattern`.
    pub fn frequency_matching(&self, pattern: &OccupancyPattern) -> f64 {
        let hits: u64 = self
            .entries
            .iter()
            .filter(|(basis, _)| pattern.matches(basis))
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.shots as f64
    }
}

/// Draws `shots` i.i.d. outcomes from the state's occupancy distribution by
/// inverse-CDF over a ChaCha8 stream seeded with `seed`. Deterministic in
/// (state, shots, seed).
pub fn sample(state: &CanonicalState, shots: u64, seed: u64) -> Result<SampleCounts> {
    assert!(shots >= 1, "sampling needs at least one shot");
    let distribution = occupancy_distribution(state)?;
    let mut cumulative = Vec::with_capacity(distribution.len());
    let mut running = 0.0;
    for (_, p) in distribution.entries() {
        running += p;
        cumulative.push(running);
    }
    let mut counts = vec![0u64; distribution.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        let u: f64 = rng.random();
        let idx = cumulative.partition_point(|&c| c <= u).min(counts.len() - 1);
        counts[idx] += 1;
    }
    let entries = distribution
        .entries
        .into_iter()
        .map(|(basis, _)| basis)
        .zip(counts)
        .collect();
    Ok(SampleCounts { entries, shots, seed, generator: SAMPLE_GENERATOR })
}
