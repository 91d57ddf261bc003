//! Seeded random quantum objects for property checks.
//!
//! Unitaries come from QR-style orthonormalization of Gaussian complex
//! matrices, densities from `G G† / tr(G G†)`. Both are full-measure
//! samplers and fully deterministic under the seed.

use num_complex::Complex64;

use crate::linalg::{ComplexMatrix, Ket};
use crate::rng::SplitMix64;

fn gaussian_complex(rng: &mut SplitMix64) -> Complex64 {
    Complex64::new(rng.next_gaussian(), rng.next_gaussian())
}

/// Haar-style random unitary: Gaussian matrix, modified Gram-Schmidt on the
/// columns.
pub fn random_unitary(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut col: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for prev in &cols {
            let overlap: Complex64 = prev
                .iter()
                .zip(&col)
                .map(|(p, c)| p.conj() * c)
                .sum();
            for (c, p) in col.iter_mut().zip(prev) {
                *c -= overlap * p;
            }
        }
        let norm: f64 = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-8, "degenerate Gaussian draw");
        for c in &mut col {
            *c /= norm;
        }
        cols.push(col);
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

/// Random density matrix `G G† / tr(G G†)`.
pub fn random_density(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g.set(i, j, gaussian_complex(rng));
        }
    }
    let m = g.matmul(&g.dagger());
    let tr = m.trace();
    m.scale(Complex64::new(1.0 / tr.re, 0.0))
}

/// Random normalized state vector.
pub fn random_ket(dim: usize, rng: &mut SplitMix64) -> Ket {
    Ket::normalized((0..dim).map(|_| gaussian_complex(rng)).collect())
        .expect("Gaussian draw has nonzero norm")
}

/// Columns of a random unitary, as an orthonormal basis.
pub fn random_basis(dim: usize, rng: &mut SplitMix64) -> Vec<Ket> {
    let u = random_unitary(dim, rng);
    (0..dim)
        .map(|j| {
            Ket::from_amplitudes((0..dim).map(|i| u.get(i, j)).collect())
                .expect("unitary columns are finite")
        })
        .collect()
}

/// Computational basis of the given dimension.
pub fn computational_basis(dim: usize) -> Vec<Ket> {
    (0..dim).map(|i| Ket::basis(dim, i)).collect()
}
