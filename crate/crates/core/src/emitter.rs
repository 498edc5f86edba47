//! Non-cascaded multi-level emitters.
//!
//! Every level is either a ground state or an excited state, and the only
//! transitions are ground ↔ excited. Dipoles are stored as a dense
//! `[ground][excited]` table; a forbidden transition is a zero vector.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vector::PolarizationVector;

const UNITARITY_TOL: f64 = 1e-10;
const DEGENERACY_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EmitterModel {
    ground_energies: Vec<f64>,
    excited_energies: Vec<f64>,
    dipoles: Vec<Vec<PolarizationVector>>,
}

impl EmitterModel {
    /// Builds and validates a model. `dipoles[n][m]` couples ground `n` to
    /// excited `m`.
    pub fn new(
        ground_energies: Vec<f64>,
        excited_energies: Vec<f64>,
        dipoles: Vec<Vec<PolarizationVector>>,
    ) -> Result<Self> {
        let model = Self {
            ground_energies,
            excited_energies,
            dipoles,
        };
        model.validate()?;
        Ok(model)
    }

    /// Two-level emitter with ground energy 0 and excited energy `transition`.
    pub fn two_level(transition: f64, dipole: PolarizationVector) -> Result<Self> {
        Self::new(vec![0.0], vec![transition], vec![vec![dipole]])
    }

    pub fn validate(&self) -> Result<()> {
        if self.ground_energies.is_empty() {
            return Err(Error::EmptyManifold("ground"));
        }
        if self.excited_energies.is_empty() {
            return Err(Error::EmptyManifold("excited"));
        }
        if self.dipoles.len() != self.ground_energies.len() {
            return Err(Error::DimensionMismatch(format!(
                "dipole table has {} rows but {} ground states are declared",
                self.dipoles.len(),
                self.ground_energies.len()
            )));
        }
        for (n, row) in self.dipoles.iter().enumerate() {
            if row.len() != self.excited_energies.len() {
                return Err(Error::DimensionMismatch(format!(
                    "dipole row {n} has {} entries but {} excited states are declared",
                    row.len(),
                    self.excited_energies.len()
                )));
            }
        }
        if let Some(i) = self.ground_energies.iter().position(|e| !e.is_finite()) {
            return Err(Error::NonFiniteEntry(format!("ground energy {i}")));
        }
        if let Some(i) = self.excited_energies.iter().position(|e| !e.is_finite()) {
            return Err(Error::NonFiniteEntry(format!("excited energy {i}")));
        }
        for (n, row) in self.dipoles.iter().enumerate() {
            for (m, d) in row.iter().enumerate() {
                if !d.is_finite() {
                    return Err(Error::NonFiniteEntry(format!("dipole d[{n}][{m}]")));
                }
            }
        }
        Ok(())
    }

    pub fn n_ground(&self) -> usize {
        self.ground_energies.len()
    }

    pub fn n_excited(&self) -> usize {
        self.excited_energies.len()
    }

    pub fn ground_energies(&self) -> &[f64] {
        &self.ground_energies
    }

    pub fn excited_energies(&self) -> &[f64] {
        &self.excited_energies
    }

    pub fn dipoles(&self) -> &[Vec<PolarizationVector>] {
        &self.dipoles
    }

    /// Dipole of the transition between ground `n` and excited `m`.
    pub fn dipole(&self, n: usize, m: usize) -> &PolarizationVector {
        &self.dipoles[n][m]
    }

    pub fn check_ground_index(&self, n: usize) -> Result<()> {
        if n >= self.n_ground() {
            return Err(Error::IndexOutOfRange {
                what: "ground",
                index: n,
                len: self.n_ground(),
            });
        }
        Ok(())
    }

    /// Effective radiative dipole of the decay `Σₘ cₘ|eₘ⟩ → |gₙ⟩`,
    /// namely `Σₘ cₘ d_{n,m}`.
    pub fn effective_dipole(
        &self,
        ground_index: usize,
        state: &ExcitedSuperposition,
    ) -> Result<PolarizationVector> {
        self.check_ground_index(ground_index)?;
        if state.len() != self.n_excited() {
            return Err(Error::DimensionMismatch(format!(
                "superposition has {} amplitudes for {} excited states",
                state.len(),
                self.n_excited()
            )));
        }
        Ok(self.dipoles[ground_index]
            .iter()
            .zip(state.amplitudes())
            .fold(PolarizationVector::zero(), |acc, (d, &c)| acc + *d * c))
    }

    /// Rotates the excited manifold to the basis `|e_a⟩ = Σₘ U_{am} |eₘ⟩`;
    /// every ground row of dipoles transforms as `d_{n,a} = Σₘ U_{am} d_{n,m}`.
    ///
    /// `U` may only mix levels of equal energy, so the rotation commutes with
    /// the bare Hamiltonian.
    pub fn rotate_excited_basis(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        let ne = self.n_excited();
        if u.nrows() != ne || u.ncols() != ne {
            return Err(Error::DimensionMismatch(format!(
                "rotation is {}×{} but the excited manifold has {ne} states",
                u.nrows(),
                u.ncols()
            )));
        }
        let deviation = unitarity_deviation(u);
        if !(deviation <= UNITARITY_TOL) {
            return Err(Error::NonUnitaryMatrix { deviation });
        }
        for a in 0..ne {
            for m in 0..ne {
                let ea = self.excited_energies[a];
                let em = self.excited_energies[m];
                let scale = 1.0f64.max(ea.abs()).max(em.abs());
                if u[(a, m)].norm() > DEGENERACY_TOL && (ea - em).abs() > DEGENERACY_TOL * scale {
                    return Err(Error::NonDegenerateExcitedManifold { a, b: m });
                }
            }
        }
        let dipoles = self
            .dipoles
            .iter()
            .map(|row| {
                (0..ne)
                    .map(|a| {
                        row.iter()
                            .enumerate()
                            .fold(PolarizationVector::zero(), |acc, (m, d)| acc + *d * u[(a, m)])
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            ground_energies: self.ground_energies.clone(),
            excited_energies: self.excited_energies.clone(),
            dipoles,
        })
    }

    /// Copy with ground energies shifted by `ground_offset` and excited
    /// energies by `excited_offset`.
    pub fn shifted(&self, ground_offset: f64, excited_offset: f64) -> Self {
        Self {
            ground_energies: self.ground_energies.iter().map(|e| e + ground_offset).collect(),
            excited_energies: self.excited_energies.iter().map(|e| e + excited_offset).collect(),
            dipoles: self.dipoles.clone(),
        }
    }
}

/// Max-entry deviation of `U U†` from the identity.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let prod = u * u.adjoint();
    let n = u.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (prod[(i, j)] - Complex64::new(target, 0.0)).norm();
            if !dev.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(dev);
        }
    }
    worst
}

/// Amplitudes of a pure state in the excited manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitedSuperposition {
    amplitudes: Vec<Complex64>,
}

impl ExcitedSuperposition {
    /// Wraps raw amplitudes without normalization checks. Useful for linear
    /// combinations that are not states.
    pub fn unnormalized(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// A normalized state; fails if `Σ|cₘ|²` deviates from 1 by more than 1e-12.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFiniteEntry("superposition amplitude".into()));
        }
        let state = Self { amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "superposition is not normalized (Σ|c|² = {norm})"
            )));
        }
        Ok(state)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("superposition has zero norm".into()));
        }
        Self::normalized(amplitudes.into_iter().map(|c| c / norm).collect())
    }

    /// All weight on excited state `index`.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Density matrix `|ψ⟩⟨ψ|`.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |x, y| self.amplitudes[x] * self.amplitudes[y].conj())
    }
}
