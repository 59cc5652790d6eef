//! Randomized property suites for the state algebra and the
//! permanent/determinant kernels.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;
use proptest::prelude::*;

use wstate_core::{
    canonicalize, inner, product_overlap, BasisState, CanonicalState, GramMatrix, ModeLabel,
    OneParticleKet, ProductKet, Spin, Statistics,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// -- independent reference implementations ---------------------------------

/// Permanent (eta = +1) or determinant (eta = −1) by Laplace expansion in
/// minors — a different route than the production kernels.
fn minor_expansion(rows: &[Vec<Complex64>], eta: f64) -> Complex64 {
    let n = rows.len();
    if n == 1 {
        return rows[0][0];
    }
    let mut total = ZERO;
    let mut sign = 1.0;
    for col in 0..n {
        let minor: Vec<Vec<Complex64>> = rows[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        total += sign * rows[0][col] * minor_expansion(&minor, eta);
        sign *= eta;
    }
    total
}

/// Full cartesian-product expansion, one elementary term at a time.
fn naive_expand(ket: &ProductKet) -> BTreeMap<Vec<BasisState>, Complex64> {
    let slot_terms: Vec<Vec<(BasisState, Complex64)>> = ket
        .slots()
        .iter()
        .map(|slot| slot.terms().map(|(b, a)| (b.clone(), a)).collect())
        .collect();
    let mut merged: BTreeMap<Vec<BasisState>, Complex64> = BTreeMap::new();
    for combo in slot_terms.iter().multi_cartesian_product() {
        let basis: Vec<BasisState> = combo.iter().map(|(b, _)| b.clone()).collect();
        let amplitude: Complex64 = combo.iter().map(|(_, a)| *a).product();
        if let Some((sorted, sign)) = canonicalize(basis, ket.statistics()) {
            *merged.entry(sorted).or_insert(ZERO) += amplitude * sign;
        }
    }
    merged.retain(|_, c| c.norm() > 0.0);
    merged
}

// -- strategies -------------------------------------------------------------

fn mode_strategy() -> impl Strategy<Value = ModeLabel> {
    prop::sample::select(vec!["A", "B", "C", "D"]).prop_map(ModeLabel::new)
}

fn basis_state_strategy() -> impl Strategy<Value = BasisState> {
    (mode_strategy(), prop::bool::ANY)
        .prop_map(|(mode, up)| BasisState::new(mode, if up { Spin::Up } else { Spin::Down }))
}

fn amplitude_strategy() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn one_particle_ket_strategy() -> impl Strategy<Value = OneParticleKet> {
    prop::collection::vec((basis_state_strategy(), amplitude_strategy()), 1..=3)
        .prop_map(OneParticleKet::from_terms)
}

fn stats_strategy() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Boson), Just(Statistics::Fermion)]
}

fn product_ket_strategy(
    min_slots: usize,
    max_slots: usize,
) -> impl Strategy<Value = ProductKet> {
    (
        prop::collection::vec(one_particle_ket_strategy(), min_slots..=max_slots),
        stats_strategy(),
    )
        .prop_map(|(slots, stats)| ProductKet::new(slots, stats))
}

/// Two product kets with the same slot count and statistics.
fn matched_pair_strategy(
    min_slots: usize,
    max_slots: usize,
) -> impl Strategy<Value = (ProductKet, ProductKet)> {
    (min_slots..=max_slots, stats_strategy()).prop_flat_map(|(n, stats)| {
        (
            prop::collection::vec(one_particle_ket_strategy(), n),
            prop::collection::vec(one_particle_ket_strategy(), n),
        )
            .prop_map(move |(a, b)| (ProductKet::new(a, stats), ProductKet::new(b, stats)))
    })
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<Complex64>>> {
    (2usize..=7).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(amplitude_strategy(), n), n)
    })
}

fn scale(state: &CanonicalState, factor: f64) -> CanonicalState {
    state.clone().scaled(Complex64::new(factor, 0.0))
}

// -- properties --------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Swapping two slot positions multiplies the expansion by η,
    /// term by term.
    #[test]
    fn swap_rule(
        ket in product_ket_strategy(2, 5),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let i = i.index(ket.len());
        let j = j.index(ket.len());
        let swapped = ket.with_swapped_slots(i, j).expand();
        let mut expected = ket.expand();
        if i != j {
            expected = scale(&expected, ket.statistics().eta());
        }
        prop_assert!(swapped.approx_eq(&expected, 1e-12));
    }

    /// ⟨a∣b⟩ = conj(⟨b∣a⟩).
    #[test]
    fn conjugate_symmetry((a, b) in matched_pair_strategy(1, 4)) {
        let ab = product_overlap(&a, &b).unwrap();
        let ba = product_overlap(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-12);
    }

    /// Expansion is linear in every slot.
    #[test]
    fn multilinearity(
        ket in product_ket_strategy(1, 4),
        x in one_particle_ket_strategy(),
        y in one_particle_ket_strategy(),
        a in -1.0..1.0f64,
        b in -1.0..1.0f64,
        slot in any::<prop::sample::Index>(),
    ) {
        let slot = slot.index(ket.len());
        let with_slot = |one: OneParticleKet| {
            let mut slots = ket.slots().to_vec();
            slots[slot] = one;
            ProductKet::new(slots, ket.statistics())
        };
        let combined = OneParticleKet::from_terms(
            x.clone().scaled(Complex64::new(a, 0.0)).terms().map(|(s, c)| (s.clone(), c)).chain(
                y.clone().scaled(Complex64::new(b, 0.0)).terms().map(|(s, c)| (s.clone(), c)),
            ),
        );
        let lhs = with_slot(combined).expand();
        let rhs = scale(&with_slot(x).expand(), a)
            .try_add(&scale(&with_slot(y).expand(), b))
            .unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    /// Two identical fermionic slots annihilate the state, on both the
    /// kernel route and the expansion route.
    #[test]
    fn pauli_exclusion_zero_norm(
        ket in product_ket_strategy(2, 5),
        state in basis_state_strategy(),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let i = i.index(ket.len());
        let j = j.index(ket.len());
        prop_assume!(i != j);
        let mut slots = ket.slots().to_vec();
        slots[i] = OneParticleKet::basis(state.clone());
        slots[j] = OneParticleKet::basis(state);
        let doubled = ProductKet::new(slots, Statistics::Fermion);
        prop_assert!(doubled.norm() < 1e-10);
        prop_assert!(doubled.expand().norm() < 1e-10);
    }

    /// A product of pairwise-orthonormal slots is normalized.
    #[test]
    fn orthonormal_slots_have_unit_norm(
        stats in stats_strategy(),
        spins in prop::collection::vec(prop::bool::ANY, 1..=6),
    ) {
        let states = spins.iter().enumerate().map(|(i, &up)| {
            BasisState::new(format!("X{i}"), if up { Spin::Up } else { Spin::Down })
        });
        let ket = ProductKet::elementary(states, stats);
        prop_assert!((ket.norm() - 1.0).abs() <= 1e-12);
    }

    /// The canonical-basis inner product of two expansions equals the
    /// kernel amplitude of the underlying product kets.
    #[test]
    fn inner_of_expansions_matches_kernel((bra, ket) in matched_pair_strategy(1, 6)) {
        let from_kernel = product_overlap(&bra, &ket).unwrap();
        let from_expansion = inner(&bra.expand(), &ket.expand()).unwrap();
        prop_assert!((from_kernel - from_expansion).norm() <= 1e-10);
    }

    /// Slot-folded expansion agrees with the one-elementary-term-at-a-time
    /// expansion.
    #[test]
    fn expansion_matches_naive_distribution(ket in product_ket_strategy(1, 5)) {
        let expanded = ket.expand();
        let reference = naive_expand(&ket);
        for (basis, coeff) in &reference {
            prop_assert!((expanded.coefficient(basis) - coeff).norm() <= 1e-12);
        }
        for (basis, coeff) in expanded.terms() {
            let want = reference.get(basis).copied().unwrap_or(ZERO);
            prop_assert!((coeff - want).norm() <= 1e-12);
        }
    }

    /// Ryser/LU kernels match Laplace minor expansion to 1e-10 relative.
    #[test]
    fn kernels_match_minor_expansion(rows in matrix_strategy()) {
        let gram = GramMatrix::from_rows(rows.clone()).unwrap();
        let perm_ref = minor_expansion(&rows, 1.0);
        let det_ref = minor_expansion(&rows, -1.0);
        let tol = |reference: Complex64| 1e-10 * reference.norm().max(1.0);
        prop_assert!((gram.permanent() - perm_ref).norm() <= tol(perm_ref));
        prop_assert!((gram.determinant() - det_ref).norm() <= tol(det_ref));
    }

    /// Canonicalization is idempotent and its sign squares to 1.
    #[test]
    fn canonicalize_is_idempotent(
        basis in prop::collection::vec(basis_state_strategy(), 1..=6),
        stats in stats_strategy(),
    ) {
        if let Some((sorted, sign)) = canonicalize(basis, stats) {
            prop_assert!(sign == 1.0 || sign == -1.0);
            let (resorted, resign) = canonicalize(sorted.clone(), stats).unwrap();
            prop_assert_eq!(resorted, sorted);
            prop_assert_eq!(resign, 1.0);
        }
    }
}
