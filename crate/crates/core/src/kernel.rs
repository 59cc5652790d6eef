//! Permanent and determinant kernels over Gram matrices of one-particle
//! overlaps.
//!
//! The N-particle amplitude Σ_P η^{n_P} ∏_k ⟨φ'_k∣φ_{P_k}⟩ is the permanent
//! (η = +1) or determinant (η = −1) of the matrix G with G_{ij} =
//! ⟨φ'_i∣φ_j⟩. Small matrices go through a direct permutation sum, which
//! doubles as the reference path for the fast kernels: Ryser's
//! inclusion–exclusion formula with Gray-code subset ordering for the
//! permanent, LU factorization with partial pivoting for the determinant.

use num_complex::Complex64;

use crate::algebra::{one_particle_overlap, OneParticleKet};
use crate::error::{Error, Result};

/// Largest dimension evaluated by the direct permutation sum.
pub const NAIVE_KERNEL_CUTOFF: usize = 5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square complex matrix of one-particle overlaps, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GramMatrix {
    /// Builds from explicit rows; every row must have the same length as
    /// the row count.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::NonSquareMatrix { rows: 0, cols: 0 });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::NonSquareMatrix { rows: dim, cols: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Ok(GramMatrix { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "Gram matrices have dimension at least 1");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        GramMatrix { dim, entries }
    }

    /// The matrix of overlaps ⟨bra_i∣ket_j⟩ between two slot sequences of
    /// equal length.
    pub fn from_slots(bra: &[OneParticleKet], ket: &[OneParticleKet]) -> Self {
        assert_eq!(bra.len(), ket.len(), "slot sequences must have equal length");
        GramMatrix::from_fn(bra.len(), |i, j| one_particle_overlap(&bra[i], &ket[j]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Σ_P ∏_k G_{k,P_k} over all permutations.
    pub fn permanent(&self) -> Complex64 {
        if self.dim <= NAIVE_KERNEL_CUTOFF {
            self.permutation_sum(1.0)
        } else {
            self.ryser_permanent()
        }
    }

    /// Σ_P (−1)^{n_P} ∏_k G_{k,P_k}.
    pub fn determinant(&self) -> Complex64 {
        if self.dim <= NAIVE_KERNEL_CUTOFF {
            self.permutation_sum(-1.0)
        } else {
            self.lu_determinant()
        }
    }

    /// Direct signed permutation sum; `eta` = +1 gives the permanent and
    /// −1 the determinant. O(n·n!) — used below the cutoff only.
    fn permutation_sum(&self, eta: f64) -> Complex64 {
        fn place(
            m: &GramMatrix,
            row: usize,
            used: &mut [bool],
            sign: f64,
            partial: Complex64,
            eta: f64,
            total: &mut Complex64,
        ) {
            if row == m.dim {
                *total += sign * partial;
                return;
            }
            for col in 0..m.dim {
                if used[col] {
                    continue;
                }
                // inversions added by choosing `col` here: previously used
                // columns with a larger index
                let inversions = used[col + 1..].iter().filter(|&&u| u).count();
                let step_sign = if inversions % 2 == 0 { 1.0 } else { eta };
                used[col] = true;
                place(m, row + 1, used, sign * step_sign, partial * m.entry(row, col), eta, total);
                used[col] = false;
            }
        }
        let mut total = ZERO;
        let mut used = vec![false; self.dim];
        place(self, 0, &mut used, 1.0, ONE, eta, &mut total);
        total
    }

    /// Ryser's formula
    /// perm(G) = (−1)^n Σ_{∅≠S⊆[n]} (−1)^{∣S∣} ∏_i Σ_{j∈S} G_{ij},
    /// walking subsets in Gray-code order so each step updates the row sums
    /// with a single column. O(2^n·n).
    fn ryser_permanent(&self) -> Complex64 {
        let n = self.dim;
        assert!(n <= 63, "Ryser kernel supports dimensions up to 63");
        let mut row_sums = vec![ZERO; n];
        let mut gray: u64 = 0;
        let mut total = ZERO;
        for k in 1u64..(1u64 << n) {
            let col = k.trailing_zeros() as usize;
            let mask = 1u64 << col;
            gray ^= mask;
            if gray & mask != 0 {
                for (i, sum) in row_sums.iter_mut().enumerate() {
                    *sum += self.entry(i, col);
                }
            } else {
                for (i, sum) in row_sums.iter_mut().enumerate() {
                    *sum -= self.entry(i, col);
                }
            }
            let product: Complex64 = row_sums.iter().product();
            if gray.count_ones() % 2 == 0 {
                total += product;
            } else {
                total -= product;
            }
        }
        if n % 2 == 0 {
            total
        } else {
            -total
        }
    }

    /// Determinant by LU factorization with partial pivoting.
    fn lu_determinant(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&p, &q| {
                    a[p * n + col].norm().partial_cmp(&a[q * n + col].norm()).unwrap()
                })
                .unwrap();
            let pivot = a[pivot_row * n + col];
            if pivot.norm() == 0.0 {
                return ZERO;
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                det = -det;
            }
            det *= pivot;
            for row in col + 1..n {
                let factor = a[row * n + col] / pivot;
                if factor == ZERO {
                    continue;
                }
                for j in col..n {
                    let sub = factor * a[col * n + j];
                    a[row * n + j] -= sub;
                }
            }
        }
        det
    }
}
