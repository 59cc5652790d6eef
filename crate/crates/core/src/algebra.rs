//! Label-free state algebra for systems of N indistinguishable particles.
//!
//! An elementary N-particle state ∣φ₁, …, φ_N⟩ means "one particle in φ₁,
//! one in φ₂, …" with no particle labels attached. All physics lives in the
//! probability amplitude
//!
//! ```text
//! ⟨φ'₁, …, φ'_N ∣ φ₁, …, φ_N⟩ = Σ_P η^{n_P} ⟨φ'₁∣φ_{P₁}⟩ ⋯ ⟨φ'_N∣φ_{P_N}⟩
//! ```
//!
//! where the sum runs over all permutations P of the ket slots, n_P is the
//! transposition count of P, and η = +1 for bosons, −1 for fermions. The sum
//! is a matrix permanent (bosons) or determinant (fermions) of the Gram
//! matrix of one-particle overlaps; see [`crate::kernel`].
//!
//! Two consequences shape everything here:
//!
//! * swapping two slot positions multiplies the state by η, so any slot
//!   sequence can be brought to a fixed canonical order at the cost of a
//!   sign ([`canonicalize`]);
//! * the state vector is linear in every slot, so a product of one-particle
//!   superpositions distributes into a sum of elementary canonical terms
//!   ([`ProductKet::expand`]).
//!
//! A single-particle basis state is a spatial mode plus a pseudospin, e.g.
//! ∣M₁↓⟩. Distinct (mode, spin) pairs are orthonormal.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex probability amplitude at binary64 precision.
pub type Amplitude = Complex64;

/// Magnitude below which amplitudes are dropped when terms are merged.
pub const PRUNE_EPS: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Exchange statistics of a particle species.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// The exchange sign η: +1 for bosons, −1 for fermions.
    pub fn eta(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    pub fn is_fermion(self) -> bool {
        matches!(self, Statistics::Fermion)
    }

    /// η^k — the sign picked up by k transpositions.
    pub fn transposition_sign(self, k: usize) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => {
                if k % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Boson => write!(f, "boson"),
            Statistics::Fermion => write!(f, "fermion"),
        }
    }
}

impl std::str::FromStr for Statistics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "boson" => Ok(Statistics::Boson),
            "fermion" => Ok(Statistics::Fermion),
            other => Err(format!("unknown statistics `{other}` (expected `boson` or `fermion`)")),
        }
    }
}

/// Pseudospin of a particle. The canonical order puts ↓ before ↑.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn arrow(self) -> char {
        match self {
            Spin::Down => '↓',
            Spin::Up => '↑',
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.arrow())
    }
}

/// A spatial mode, identified by a non-empty text label such as `M1` or `C`.
///
/// Labels compare by exact text equality and order lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel(String);

impl ModeLabel {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "mode labels must be non-empty");
        ModeLabel(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for ModeLabel {
    fn from(s: &str) -> Self {
        ModeLabel::new(s)
    }
}

impl From<String> for ModeLabel {
    fn from(s: String) -> Self {
        ModeLabel::new(s)
    }
}

/// A one-particle basis state: a mode and a pseudospin, e.g. ∣M₁↓⟩.
///
/// Two basis states are orthonormal iff they differ in mode or spin. The
/// canonical total order is (mode, then spin).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    pub mode: ModeLabel,
    pub spin: Spin,
}

impl BasisState {
    pub fn new(mode: impl Into<ModeLabel>, spin: Spin) -> Self {
        BasisState { mode: mode.into(), spin }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.mode, self.spin)
    }
}

/// A one-particle state: a complex-weighted superposition of basis states.
///
/// Amplitudes with magnitude below [`PRUNE_EPS`] are not stored; the map
/// with no entries is the zero vector.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OneParticleKet {
    terms: BTreeMap<BasisState, Complex64>,
}

impl OneParticleKet {
    /// The zero vector.
    pub fn zero() -> Self {
        OneParticleKet::default()
    }

    /// A pure basis state with amplitude 1.
    pub fn basis(state: BasisState) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(state, ONE);
        OneParticleKet { terms }
    }

    /// Builds a superposition, merging duplicate basis states and pruning
    /// negligible amplitudes.
    pub fn from_terms(terms: impl IntoIterator<Item = (BasisState, Complex64)>) -> Self {
        let mut map: BTreeMap<BasisState, Complex64> = BTreeMap::new();
        for (state, amp) in terms {
            *map.entry(state).or_insert(ZERO) += amp;
        }
        map.retain(|_, amp| amp.norm() >= PRUNE_EPS);
        OneParticleKet { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisState, Complex64)> {
        self.terms.iter().map(|(b, &a)| (b, a))
    }

    /// Amplitude on a basis state (0 when absent).
    pub fn amplitude(&self, state: &BasisState) -> Complex64 {
        self.terms.get(state).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_squared(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Rescales to unit norm; the zero vector is returned unchanged.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n < PRUNE_EPS {
            return self;
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for amp in self.terms.values_mut() {
            *amp *= factor;
        }
        self.terms.retain(|_, amp| amp.norm() >= PRUNE_EPS);
        self
    }
}

/// ⟨bra∣ket⟩ for one-particle states: Σ_b conj(bra_b)·ket_b over shared
/// basis states. Conjugate-linear in the bra, linear in the ket.
pub fn one_particle_overlap(bra: &OneParticleKet, ket: &OneParticleKet) -> Complex64 {
    // iterate the smaller map, look up in the larger
    if bra.len() <= ket.len() {
        bra.terms().map(|(b, a)| a.conj() * ket.amplitude(b)).sum()
    } else {
        ket.terms().map(|(b, a)| a * bra.amplitude(b).conj()).sum()
    }
}

/// An elementary, generally unnormalized N-particle vector
/// ∣φ₁, …, φ_N⟩ with an exchange-statistics tag.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductKet {
    slots: Vec<OneParticleKet>,
    stats: Statistics,
}

impl ProductKet {
    pub fn new(slots: Vec<OneParticleKet>, stats: Statistics) -> Self {
        assert!(!slots.is_empty(), "a product ket needs at least one slot");
        ProductKet { slots, stats }
    }

    /// A product of pure basis states.
    pub fn elementary(states: impl IntoIterator<Item = BasisState>, stats: Statistics) -> Self {
        let slots: Vec<_> = states.into_iter().map(OneParticleKet::basis).collect();
        ProductKet::new(slots, stats)
    }

    pub fn slots(&self) -> &[OneParticleKet] {
        &self.slots
    }

    pub fn statistics(&self) -> Statistics {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        false // slot count is at least 1 by construction
    }

    /// The same ket with slots `i` and `j` interchanged.
    pub fn with_swapped_slots(&self, i: usize, j: usize) -> Self {
        let mut slots = self.slots.clone();
        slots.swap(i, j);
        ProductKet { slots, stats: self.stats }
    }

    /// √⟨φ₁,…∣φ₁,…⟩ evaluated through the permanent/determinant kernel.
    pub fn norm(&self) -> f64 {
        let sq = product_overlap(self, self).expect("a ket is compatible with itself");
        sq.re.max(0.0).sqrt()
    }

    /// Number of elementary components in the fully distributed linear
    /// expansion, before any merging. Fermionic components annihilated by
    /// Pauli exclusion are not counted.
    ///
    /// Grows as the product of the slot sizes; intended for desk-scale N.
    pub fn elementary_component_count(&self) -> u64 {
        fn walk(slots: &[OneParticleKet], stats: Statistics, chosen: &mut Vec<BasisState>) -> u64 {
            let Some((slot, rest)) = slots.split_first() else {
                return 1;
            };
            let mut total = 0;
            for (state, _) in slot.terms() {
                if stats.is_fermion() && chosen.contains(state) {
                    continue;
                }
                chosen.push(state.clone());
                total += walk(rest, stats, chosen);
                chosen.pop();
            }
            total
        }
        walk(&self.slots, self.stats, &mut Vec::new())
    }

    /// Distributes multilinearity over every slot and collects the result
    /// on the canonical basis.
    ///
    /// Each elementary component is sorted into canonical order with the
    /// sign η^{n} of the sorting permutation applied; components that share
    /// a canonical basis are merged; fermionic components with a repeated
    /// basis state are dropped. The expansion folds slot by slot so that
    /// merging keeps intermediate term counts small.
    pub fn expand(&self) -> CanonicalState {
        let stats = self.stats;
        let mut terms: BTreeMap<Vec<BasisState>, Complex64> = BTreeMap::new();
        terms.insert(Vec::new(), ONE);
        for slot in &self.slots {
            let mut next: BTreeMap<Vec<BasisState>, Complex64> = BTreeMap::new();
            for (basis, coeff) in &terms {
                for (state, amp) in slot.terms() {
                    let pos = basis.partition_point(|b| b <= state);
                    if stats.is_fermion() && pos > 0 && &basis[pos - 1] == state {
                        continue; // Pauli exclusion
                    }
                    // appending at the end and bubbling down to `pos`
                    // costs len - pos transpositions
                    let sign = stats.transposition_sign(basis.len() - pos);
                    let mut grown = Vec::with_capacity(basis.len() + 1);
                    grown.extend_from_slice(&basis[..pos]);
                    grown.push(state.clone());
                    grown.extend_from_slice(&basis[pos..]);
                    *next.entry(grown).or_insert(ZERO) += coeff * amp * sign;
                }
            }
            terms = next;
        }
        terms.retain(|_, c| c.norm() >= PRUNE_EPS);
        CanonicalState { terms, stats, particle_count: self.slots.len() }
    }
}

/// ⟨bra∣ket⟩ for elementary N-particle vectors: the permanent (bosons) or
/// determinant (fermions) of the Gram matrix ⟨bra_i∣ket_j⟩.
pub fn product_overlap(bra: &ProductKet, ket: &ProductKet) -> Result<Complex64> {
    if bra.len() != ket.len() {
        return Err(Error::Incompatible(format!(
            "slot counts differ ({} vs {})",
            bra.len(),
            ket.len()
        )));
    }
    if bra.statistics() != ket.statistics() {
        return Err(Error::Incompatible(format!(
            "statistics differ ({} vs {})",
            bra.statistics(),
            ket.statistics()
        )));
    }
    let gram = crate::kernel::GramMatrix::from_slots(bra.slots(), ket.slots());
    Ok(match bra.statistics() {
        Statistics::Boson => gram.permanent(),
        Statistics::Fermion => gram.determinant(),
    })
}

/// Sorts a basis sequence into canonical order.
///
/// Returns the sorted sequence together with η^{n}, where n is the
/// transposition count of the sorting permutation. Returns `None` for a
/// fermionic sequence with a repeated basis state: that sequence is the
/// zero vector, which is a valid result rather than an error.
pub fn canonicalize(
    mut basis: Vec<BasisState>,
    stats: Statistics,
) -> Option<(Vec<BasisState>, f64)> {
    let mut transpositions = 0usize;
    for i in 1..basis.len() {
        let mut j = i;
        while j > 0 && basis[j] < basis[j - 1] {
            basis.swap(j, j - 1);
            transpositions += 1;
            j -= 1;
        }
    }
    if stats.is_fermion() && basis.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((basis, stats.transposition_sign(transpositions)))
}

/// ⟨b∣b⟩ for a canonical basis sequence: the product of the factorials of
/// the multiplicities for bosons, 1 for fermions.
pub fn self_overlap(basis: &[BasisState], stats: Statistics) -> f64 {
    if stats.is_fermion() {
        return 1.0;
    }
    let mut product = 1.0;
    let mut run = 1u32;
    for pair in basis.windows(2) {
        if pair[0] == pair[1] {
            run += 1;
            product *= f64::from(run);
        } else {
            run = 1;
        }
    }
    product
}

/// An N-particle state collected on the canonical basis: a complex-weighted
/// sum over sorted elementary basis sequences.
///
/// Every stored sequence is non-decreasing in the canonical order (strictly
/// increasing for fermions) and has the same length; distinct sequences are
/// mutually orthogonal. Coefficients follow the raw-basis convention: the
/// self-overlap of a repeated-state sequence is ∏ mᵢ!, not 1, and norms
/// account for it.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalState {
    terms: BTreeMap<Vec<BasisState>, Complex64>,
    stats: Statistics,
    particle_count: usize,
}

impl CanonicalState {
    /// The zero state on `particle_count` particles.
    pub fn empty(stats: Statistics, particle_count: usize) -> Self {
        CanonicalState { terms: BTreeMap::new(), stats, particle_count }
    }

    /// Collects (basis, coefficient) pairs, canonical-merging duplicates and
    /// pruning magnitudes below [`PRUNE_EPS`]. The sequences must already be
    /// sorted; lengths must equal `particle_count`.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Vec<BasisState>, Complex64)>,
        stats: Statistics,
        particle_count: usize,
    ) -> Self {
        let mut map: BTreeMap<Vec<BasisState>, Complex64> = BTreeMap::new();
        for (basis, coeff) in terms {
            debug_assert_eq!(basis.len(), particle_count);
            debug_assert!(basis.windows(2).all(|w| w[0] <= w[1]), "basis must be sorted");
            *map.entry(basis).or_insert(ZERO) += coeff;
        }
        map.retain(|_, c| c.norm() >= PRUNE_EPS);
        CanonicalState { terms: map, stats, particle_count }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[BasisState], Complex64)> {
        self.terms.iter().map(|(b, &c)| (b.as_slice(), c))
    }

    /// Coefficient of a canonical basis sequence (0 when absent).
    pub fn coefficient(&self, basis: &[BasisState]) -> Complex64 {
        self.terms.get(basis).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn statistics(&self) -> Statistics {
        self.stats
    }

    pub fn particle_count(&self) -> usize {
        self.particle_count
    }

    pub fn contains_mode(&self, mode: &ModeLabel) -> bool {
        self.terms.keys().any(|basis| basis.iter().any(|b| &b.mode == mode))
    }

    /// Σ_b ∣c_b∣²·⟨b∣b⟩.
    pub fn norm_squared(&self) -> f64 {
        self.terms
            .iter()
            .map(|(basis, c)| c.norm_sqr() * self_overlap(basis, self.stats))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Rescales to unit norm; the zero state is returned unchanged.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n < PRUNE_EPS {
            return self;
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
        self.terms.retain(|_, c| c.norm() >= PRUNE_EPS);
        self
    }

    /// Term-wise sum of two states on the same particle number and
    /// statistics.
    pub fn try_add(&self, other: &CanonicalState) -> Result<CanonicalState> {
        check_compatible(self, other)?;
        let merged = self
            .terms
            .iter()
            .map(|(b, c)| (b.clone(), *c))
            .chain(other.terms.iter().map(|(b, c)| (b.clone(), *c)));
        Ok(CanonicalState::from_terms(merged, self.stats, self.particle_count))
    }

    /// Largest coefficient difference over the union of the two term sets.
    pub fn max_term_delta(&self, other: &CanonicalState) -> f64 {
        let mut delta: f64 = 0.0;
        for (basis, c) in self.terms() {
            delta = delta.max((c - other.coefficient(basis)).norm());
        }
        for (basis, c) in other.terms() {
            delta = delta.max((c - self.coefficient(basis)).norm());
        }
        delta
    }

    /// Term-by-term equality within `tol`.
    pub fn approx_eq(&self, other: &CanonicalState, tol: f64) -> bool {
        self.stats == other.stats
            && self.particle_count == other.particle_count
            && self.max_term_delta(other) <= tol
    }
}

fn check_compatible(a: &CanonicalState, b: &CanonicalState) -> Result<()> {
    if a.particle_count != b.particle_count {
        return Err(Error::Incompatible(format!(
            "particle counts differ ({} vs {})",
            a.particle_count, b.particle_count
        )));
    }
    if a.stats != b.stats {
        return Err(Error::Incompatible(format!(
            "statistics differ ({} vs {})",
            a.stats, b.stats
        )));
    }
    Ok(())
}

/// ⟨a∣b⟩ between canonical states:
/// Σ over shared bases of conj(c_a)·c_b·⟨basis∣basis⟩.
pub fn inner(a: &CanonicalState, b: &CanonicalState) -> Result<Complex64> {
    check_compatible(a, b)?;
    let (small, large, conj_small) =
        if a.len() <= b.len() { (a, b, true) } else { (b, a, false) };
    let mut total = ZERO;
    for (basis, c_small) in small.terms() {
        let c_large = large.coefficient(basis);
        if c_large == ZERO {
            continue;
        }
        let pair = if conj_small { c_small.conj() * c_large } else { c_large.conj() * c_small };
        total += pair * self_overlap(basis, a.stats);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn down(mode: &str) -> BasisState {
        BasisState::new(mode, Spin::Down)
    }

    fn up(mode: &str) -> BasisState {
        BasisState::new(mode, Spin::Up)
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn even_split(a: BasisState, b: BasisState) -> OneParticleKet {
        let amp = re(std::f64::consts::FRAC_1_SQRT_2);
        OneParticleKet::from_terms([(a, amp), (b, amp)])
    }

    #[test]
    fn overlap_identity_and_orthogonal() {
        let m1d = OneParticleKet::basis(down("M1"));
        let m1u = OneParticleKet::basis(up("M1"));
        assert_abs_diff_eq!(one_particle_overlap(&m1d, &m1d).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(one_particle_overlap(&m1d, &m1u).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_of_half_overlapping_superpositions() {
        let bra = even_split(down("M1"), down("C"));
        let ket = even_split(down("M2"), down("C"));
        let ov = one_particle_overlap(&bra, &ket);
        assert_abs_diff_eq!(ov.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_is_conjugate_linear_in_bra() {
        let phase = Complex64::new(0.0, 1.0);
        let bra = OneParticleKet::from_terms([(down("A"), phase)]);
        let ket = OneParticleKet::basis(down("A"));
        let ov = one_particle_overlap(&bra, &ket);
        assert_abs_diff_eq!((ov - phase.conj()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn canonicalize_sorts_and_signs() {
        let seq = vec![down("M2"), up("M1")];
        let (sorted_b, sign_b) = canonicalize(seq.clone(), Statistics::Boson).unwrap();
        assert_eq!(sorted_b, vec![up("M1"), down("M2")]);
        assert_eq!(sign_b, 1.0);
        let (sorted_f, sign_f) = canonicalize(seq, Statistics::Fermion).unwrap();
        assert_eq!(sorted_f, vec![up("M1"), down("M2")]);
        assert_eq!(sign_f, -1.0);
    }

    #[test]
    fn canonicalize_flags_pauli_zero() {
        let seq = vec![down("C"), down("C")];
        assert!(canonicalize(seq.clone(), Statistics::Fermion).is_none());
        assert!(canonicalize(seq, Statistics::Boson).is_some());
    }

    #[test]
    fn product_overlap_distinct_orthonormal_slots() {
        let ket = ProductKet::elementary([down("M1"), down("M2")], Statistics::Boson);
        let ov = product_overlap(&ket, &ket).unwrap();
        assert_abs_diff_eq!(ov.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ket.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn product_overlap_doubly_occupied_mode() {
        let boson = ProductKet::elementary([down("C"), down("C")], Statistics::Boson);
        assert_abs_diff_eq!(product_overlap(&boson, &boson).unwrap().re, 2.0, epsilon = 1e-15);
        let fermion = ProductKet::elementary([down("C"), down("C")], Statistics::Fermion);
        assert_abs_diff_eq!(product_overlap(&fermion, &fermion).unwrap().norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn product_overlap_extraction_style_norm() {
        // ∣M↑, M↓, M↓⟩ has ⟨·∣·⟩ = (N−1)! = 2 for bosons
        let ket = ProductKet::elementary([up("M"), down("M"), down("M")], Statistics::Boson);
        assert_abs_diff_eq!(product_overlap(&ket, &ket).unwrap().re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ket.norm(), std::f64::consts::SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn product_overlap_rejects_mismatches() {
        let two = ProductKet::elementary([down("M1"), down("M2")], Statistics::Boson);
        let three = ProductKet::elementary([down("M1"), down("M2"), down("M3")], Statistics::Boson);
        assert!(matches!(product_overlap(&two, &three), Err(Error::Incompatible(_))));
        let fermi = ProductKet::elementary([down("M1"), down("M2")], Statistics::Fermion);
        assert!(matches!(product_overlap(&two, &fermi), Err(Error::Incompatible(_))));
    }

    #[test]
    fn expand_single_slot_is_linear() {
        let ket = ProductKet::new(vec![even_split(down("M"), down("C"))], Statistics::Boson);
        let state = ket.expand();
        assert_eq!(state.len(), 2);
        for (_, c) in state.terms() {
            assert_abs_diff_eq!(c.norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        }
    }

    #[test]
    fn expand_two_particle_ancilla_state() {
        // φ₁ = (∣M1↓⟩+∣C1↓⟩)/√2, φ₂ = (∣M2↓⟩+∣C2↓⟩)/√2,
        // φ₃ = (∣M1↑⟩+∣M2↑⟩)/√2: N·2^N = 8 components of magnitude 1/(2√2)
        let ket = ProductKet::new(
            vec![
                even_split(down("M1"), down("C1")),
                even_split(down("M2"), down("C2")),
                even_split(up("M1"), up("M2")),
            ],
            Statistics::Boson,
        );
        assert_eq!(ket.elementary_component_count(), 8);
        let state = ket.expand();
        assert_eq!(state.len(), 8);
        let expected = 1.0 / (2.0 * std::f64::consts::SQRT_2);
        for (_, c) in state.terms() {
            assert_abs_diff_eq!(c.norm(), expected, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn expand_fermion_common_mode_drops_pauli_terms() {
        // C1 = C2 = C: terms with C↓ twice are annihilated, N(N+1) = 6 remain
        let ket = ProductKet::new(
            vec![
                even_split(down("M1"), down("C")),
                even_split(down("M2"), down("C")),
                even_split(up("M1"), up("M2")),
            ],
            Statistics::Fermion,
        );
        let state = ket.expand();
        assert_eq!(state.len(), 6);
        // normalization constant 1/√(N(N+1)) = 1/√6 after dividing by √(3)/2
        assert_abs_diff_eq!(state.norm(), 3f64.sqrt() / 2.0, epsilon = 1e-14);
        let normalized = state.normalized();
        for (_, c) in normalized.terms() {
            assert_abs_diff_eq!(c.norm(), 1.0 / 6f64.sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn expand_boson_common_mode_norm() {
        let ket = ProductKet::new(
            vec![
                even_split(down("M1"), down("C")),
                even_split(down("M2"), down("C")),
                even_split(up("M1"), up("M2")),
            ],
            Statistics::Boson,
        );
        let state = ket.expand();
        // repeated C↓ terms carry self-overlap 2!: ⟨·∣·⟩ = 5/4
        assert_abs_diff_eq!(state.norm(), 5f64.sqrt() / 2.0, epsilon = 1e-14);
        let single_occupancy = state.normalized();
        let c = single_occupancy.coefficient(&[down("C"), up("M1"), down("M2")]);
        assert_abs_diff_eq!(c.norm(), 1.0 / 10f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn expand_zero_slot_gives_empty_state() {
        let ket = ProductKet::new(
            vec![OneParticleKet::basis(down("M1")), OneParticleKet::zero()],
            Statistics::Boson,
        );
        let state = ket.expand();
        assert!(state.is_empty());
        assert_abs_diff_eq!(state.norm(), 0.0);
    }

    #[test]
    fn inner_orthogonal_spin_sectors() {
        let a = ProductKet::elementary([down("M1"), down("M2")], Statistics::Boson).expand();
        let b = ProductKet::elementary([up("M1"), down("M2")], Statistics::Boson).expand();
        assert_abs_diff_eq!(inner(&a, &b).unwrap().norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(inner(&a, &a).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_rejects_mismatched_states() {
        let a = ProductKet::elementary([down("M1")], Statistics::Boson).expand();
        let b = ProductKet::elementary([down("M1"), down("M2")], Statistics::Boson).expand();
        assert!(matches!(inner(&a, &b), Err(Error::Incompatible(_))));
    }

    #[test]
    fn self_overlap_counts_multiplicities() {
        let basis = vec![down("C"), down("C"), down("C"), up("M1")];
        assert_abs_diff_eq!(self_overlap(&basis, Statistics::Boson), 6.0);
        assert_abs_diff_eq!(self_overlap(&basis, Statistics::Fermion), 1.0);
    }

    #[test]
    fn pruning_drops_negligible_amplitudes() {
        let ket = OneParticleKet::from_terms([
            (down("A"), re(1.0)),
            (down("B"), re(1e-15)),
        ]);
        assert_eq!(ket.len(), 1);
    }
}
