//! Waveguide Green's tensor at the emitter position and the coupling
//! matrices built from it.
//!
//! The waveguide part of the Green's tensor is
//! `G_wg = (i a ω / 4|v_g|) (E_f E_f* + E_b E_b*)` with `E_b = E_f*`. All
//! transitions share the single frequency `ω`.
//!
//! Index conventions of the stored coupling arrays follow the usual
//! sandwich form `W_{xynm} = −d_{nx}·G*·d*_{my} / ε₀`, `Γ̄_{xy} = Σₙ W_{xynn}`,
//! `V̄_{xynm} = W_{xynm} − W*_{yxmn}`. With the absorption bookend `d*·E` and
//! the emission bookend `E*·d`, the matrix that acts on excited-state
//! amplitudes is the transpose `Γ̄ᵀ`; see [`CouplingBundle::excited_gamma`].

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::emitter::EmitterModel;
use crate::error::{Error, Result};
use crate::vector::{PolarizationVector, Tensor3};

const I: Complex64 = Complex64::new(0.0, 1.0);
const PASSIVITY_TOL: f64 = 1e-12;

/// Propagation direction of a waveguide mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];

    pub fn opposite(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Direction::Forward => 0,
            Direction::Backward => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

/// Where an emitted photon ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Forward,
    Backward,
    Loss,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Forward, Channel::Backward, Channel::Loss];

    pub fn index(self) -> usize {
        match self {
            Channel::Forward => 0,
            Channel::Backward => 1,
            Channel::Loss => 2,
        }
    }
}

impl From<Direction> for Channel {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Forward => Channel::Forward,
            Direction::Backward => Channel::Backward,
        }
    }
}

/// Local waveguide description at the emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideEnv {
    /// Bloch field of the forward mode at the emitter.
    pub e_forward: PolarizationVector,
    /// Waveguide periodicity `a`.
    pub periodicity: f64,
    pub group_velocity: f64,
    /// Photon angular frequency used for every transition.
    pub omega: f64,
    pub epsilon0: f64,
    pub hbar: f64,
}

impl Default for WaveguideEnv {
    /// Simple units: `a = ω = ε₀ = ħ = 1`, `v_g = 0.1`, `E_f = (1, 0, 0)`.
    fn default() -> Self {
        Self {
            e_forward: PolarizationVector::real(1.0, 0.0, 0.0),
            periodicity: 1.0,
            group_velocity: 0.1,
            omega: 1.0,
            epsilon0: 1.0,
            hbar: 1.0,
        }
    }
}

impl WaveguideEnv {
    pub fn with_field(e_forward: PolarizationVector) -> Self {
        Self {
            e_forward,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.e_forward.is_finite() {
            return Err(Error::NonFiniteEntry("forward field".into()));
        }
        let positive = [
            ("periodicity", self.periodicity),
            ("omega", self.omega),
            ("epsilon0", self.epsilon0),
            ("hbar", self.hbar),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        if !(self.group_velocity.is_finite() && self.group_velocity != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "group velocity must be finite and nonzero, got {}",
                self.group_velocity
            )));
        }
        Ok(())
    }

    /// Backward field, the time reverse `E_f*`.
    pub fn e_backward(&self) -> PolarizationVector {
        self.e_forward.conj()
    }

    pub fn field(&self, direction: Direction) -> PolarizationVector {
        match direction {
            Direction::Forward => self.e_forward,
            Direction::Backward => self.e_backward(),
        }
    }

    /// Density-of-states factor `z = a ω / (2|v_g|)`.
    pub fn dos_factor(&self) -> f64 {
        self.periodicity * self.omega / (2.0 * self.group_velocity.abs())
    }

    /// Normalization `N = 2|v_g| ε₀ / (i a ω)`.
    pub fn normalization(&self) -> Complex64 {
        Complex64::new(2.0 * self.group_velocity.abs() * self.epsilon0, 0.0)
            / (I * self.periodicity * self.omega)
    }

    /// Prefactor `i a ω / (4|v_g|)` of each waveguide term of the Green's tensor.
    pub fn waveguide_prefactor(&self) -> Complex64 {
        I * (self.periodicity * self.omega / (4.0 * self.group_velocity.abs()))
    }
}

/// Non-waveguide part of the Green's tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    tensor: Tensor3,
}

impl LossModel {
    pub fn none() -> Self {
        Self {
            tensor: Tensor3::zero(),
        }
    }

    /// Dipole-independent loss that gives any unit dipole the decay rate
    /// `rate` (simple units, `ε₀ = ħ = 1`). On the same scale a dipole
    /// matched to a linear waveguide field decays into the waveguide at
    /// `1/v_g`.
    ///
    /// The tensor is `i (rate/2) 𝟙`: an imaginary Green's tensor entry `g`
    /// yields the population decay rate `2g`.
    pub fn isotropic(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "isotropic loss must be finite and >= 0, got {rate}"
            )));
        }
        Ok(Self {
            tensor: Tensor3::scaled_identity(Complex64::new(0.0, 0.5 * rate)),
        })
    }

    /// Arbitrary loss tensor. Rejected if some dipole would gain energy from it.
    pub fn from_tensor(tensor: Tensor3) -> Result<Self> {
        if !tensor.is_finite() {
            return Err(Error::NonFiniteEntry("loss tensor".into()));
        }
        let model = Self { tensor };
        let rate = model.min_probe_rate();
        if rate < -PASSIVITY_TOL * (1.0 + max_entry(&tensor)) {
            return Err(Error::ActiveLoss { rate });
        }
        Ok(model)
    }

    pub fn tensor(&self) -> &Tensor3 {
        &self.tensor
    }

    /// Smallest value of `Im(d†·G·d)` over unit dipoles, the lowest
    /// eigenvalue of `(G − G†)/2i`.
    pub fn min_probe_rate(&self) -> f64 {
        let g = Matrix3::from_fn(|i, j| self.tensor.0[i][j]);
        let anti = (g - g.adjoint()) / (2.0 * I);
        anti.symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, &v| acc.min(v))
    }
}

impl Default for LossModel {
    fn default() -> Self {
        Self::none()
    }
}

fn max_entry(t: &Tensor3) -> f64 {
    t.0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `G = G_f + G_b + G_loss` at the emitter position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensDecomposition {
    pub forward: Tensor3,
    pub backward: Tensor3,
    pub loss: Tensor3,
}

impl GreensDecomposition {
    pub fn new(env: &WaveguideEnv, loss: &LossModel) -> Result<Self> {
        env.validate()?;
        let pre = env.waveguide_prefactor();
        let ef = env.e_forward;
        let eb = env.e_backward();
        Ok(Self {
            forward: Tensor3::outer(&ef, &ef.conj()).scale(pre),
            backward: Tensor3::outer(&eb, &eb.conj()).scale(pre),
            loss: *loss.tensor(),
        })
    }

    pub fn part(&self, channel: Channel) -> &Tensor3 {
        match channel {
            Channel::Forward => &self.forward,
            Channel::Backward => &self.backward,
            Channel::Loss => &self.loss,
        }
    }

    pub fn total(&self) -> Tensor3 {
        self.forward + self.backward + self.loss
    }
}

/// Four-index array indexed `[x][y][n][m]` (`x, y` excited, `n, m` ground).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n_excited: usize,
    n_ground: usize,
    data: Vec<Complex64>,
}

impl Tensor4 {
    pub fn zeros(n_excited: usize, n_ground: usize) -> Self {
        Self {
            n_excited,
            n_ground,
            data: vec![Complex64::new(0.0, 0.0); n_excited * n_excited * n_ground * n_ground],
        }
    }

    fn offset(&self, x: usize, y: usize, n: usize, m: usize) -> usize {
        ((x * self.n_excited + y) * self.n_ground + n) * self.n_ground + m
    }

    pub fn get(&self, x: usize, y: usize, n: usize, m: usize) -> Complex64 {
        self.data[self.offset(x, y, n, m)]
    }

    pub fn set(&mut self, x: usize, y: usize, n: usize, m: usize, value: Complex64) {
        let k = self.offset(x, y, n, m);
        self.data[k] = value;
    }

    pub fn n_excited(&self) -> usize {
        self.n_excited
    }

    pub fn n_ground(&self) -> usize {
        self.n_ground
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            n_excited: self.n_excited,
            n_ground: self.n_ground,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// `V_{xynm} = W_{xynm} − W*_{yxmn}`.
    fn decay_superoperator(&self) -> Self {
        let mut v = Self::zeros(self.n_excited, self.n_ground);
        for x in 0..self.n_excited {
            for y in 0..self.n_excited {
                for n in 0..self.n_ground {
                    for m in 0..self.n_ground {
                        v.set(x, y, n, m, self.get(x, y, n, m) - self.get(y, x, m, n).conj());
                    }
                }
            }
        }
        v
    }
}

/// Every matrix and scalar the solvers need for one emitter in one
/// environment.
#[derive(Debug, Clone)]
pub struct CouplingBundle {
    w_channels: [Tensor4; 3],
    w: Tensor4,
    v_channels: [Tensor4; 3],
    v: Tensor4,
    gamma: DMatrix<Complex64>,
    delta: Vec<f64>,
    x: DMatrix<Complex64>,
    l: DMatrix<Complex64>,
    normalization: Complex64,
    dos: f64,
    epsilon0: f64,
    hbar: f64,
}

impl CouplingBundle {
    /// Assembles the bundle for interaction energy `interaction_energy`,
    /// which sets the detunings `Δ̄ₘₘ = E_{eₘ} − E_int`.
    pub fn new(
        model: &EmitterModel,
        env: &WaveguideEnv,
        loss: &LossModel,
        interaction_energy: f64,
    ) -> Result<Self> {
        model.validate()?;
        if !interaction_energy.is_finite() {
            return Err(Error::NonFiniteEntry("interaction energy".into()));
        }
        let greens = GreensDecomposition::new(env, loss)?;
        let ne = model.n_excited();
        let ng = model.n_ground();
        let eps = env.epsilon0;

        let w_channels = Channel::ALL.map(|ch| {
            let g_conj = greens.part(ch).conj();
            let mut w = Tensor4::zeros(ne, ng);
            for x in 0..ne {
                for y in 0..ne {
                    for n in 0..ng {
                        for m in 0..ng {
                            let d_left = model.dipole(n, x);
                            let d_right = model.dipole(m, y).conj();
                            w.set(x, y, n, m, -g_conj.sandwich(d_left, &d_right) / eps);
                        }
                    }
                }
            }
            w
        });
        let w = w_channels[0].add(&w_channels[1]).add(&w_channels[2]);
        let v_channels = [
            w_channels[0].decay_superoperator(),
            w_channels[1].decay_superoperator(),
            w_channels[2].decay_superoperator(),
        ];
        let v = w.decay_superoperator();
        let gamma = DMatrix::from_fn(ne, ne, |x, y| (0..ng).map(|n| w.get(x, y, n, n)).sum());

        let ef = env.e_forward;
        let eb = env.e_backward();
        let wg_shape = Tensor3::outer(&ef.conj(), &ef) + Tensor3::outer(&eb.conj(), &eb);
        let loss_conj = loss.tensor().conj();
        let x = DMatrix::from_fn(ne, ne, |a, b| {
            (0..ng)
                .map(|n| 0.5 * wg_shape.sandwich(model.dipole(n, a), &model.dipole(n, b).conj()))
                .sum()
        });
        let l = DMatrix::from_fn(ne, ne, |a, b| {
            (0..ng)
                .map(|n| I * loss_conj.sandwich(model.dipole(n, a), &model.dipole(n, b).conj()))
                .sum()
        });
        let delta = model
            .excited_energies()
            .iter()
            .map(|e| e - interaction_energy)
            .collect();

        Ok(Self {
            w_channels,
            w,
            v_channels,
            v,
            gamma,
            delta,
            x,
            l,
            normalization: env.normalization(),
            dos: env.dos_factor(),
            epsilon0: eps,
            hbar: env.hbar,
        })
    }

    pub fn n_excited(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn n_ground(&self) -> usize {
        self.w.n_ground()
    }

    pub fn w(&self) -> &Tensor4 {
        &self.w
    }

    pub fn w_channel(&self, channel: Channel) -> &Tensor4 {
        &self.w_channels[channel.index()]
    }

    pub fn v(&self) -> &Tensor4 {
        &self.v
    }

    /// `V̄` built from one part of the Green's tensor alone.
    pub fn v_channel(&self, channel: Channel) -> &Tensor4 {
        &self.v_channels[channel.index()]
    }

    /// `Γ̄_{xy} = −Σₙ d_{nx}·G*·d*_{ny} / ε₀`.
    pub fn gamma(&self) -> &DMatrix<Complex64> {
        &self.gamma
    }

    /// Diagonal of `Δ̄`.
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// `X̄_{xy} = ½ Σₙ d_{nx}·(E_f* E_f + E_b* E_b)·d*_{ny}`.
    pub fn x(&self) -> &DMatrix<Complex64> {
        &self.x
    }

    /// `L̄_{xy} = i Σₙ d_{nx}·G_loss*·d*_{ny}`. The factor `i` puts loss on
    /// the same footing as `X̄`: `i z X̄/ε₀ − L̄/ε₀` reproduces `Γ̄`.
    pub fn l(&self) -> &DMatrix<Complex64> {
        &self.l
    }

    pub fn normalization(&self) -> Complex64 {
        self.normalization
    }

    pub fn dos_factor(&self) -> f64 {
        self.dos
    }

    pub fn epsilon0(&self) -> f64 {
        self.epsilon0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `Γ̄ᵀ`: the self-energy acting on excited amplitudes, `(Γ̄ᵀ c)_x = Σ_y Γ̄_{yx} c_y`.
    pub fn excited_gamma(&self) -> DMatrix<Complex64> {
        self.gamma.transpose()
    }

    /// Hermitian decay-rate operator `(Γ̄ᵀ − Γ̄*) / (iħ)`; its expectation in
    /// an excited state is the instantaneous total emission rate.
    pub fn decay_rate_operator(&self) -> DMatrix<Complex64> {
        let g = self.excited_gamma();
        (&g - g.adjoint()) / (I * self.hbar)
    }

    /// Population decay rate of each bare excited state, `2 Im Γ̄ₓₓ / ħ`.
    pub fn decay_rates(&self) -> Vec<f64> {
        (0..self.n_excited())
            .map(|x| 2.0 * self.gamma[(x, x)].im / self.hbar)
            .collect()
    }

    /// Waveguide-plus-loss coupling `X̄ᵀ + L̄ᵀ/z`.
    pub fn coupling_matrix(&self) -> DMatrix<Complex64> {
        self.x.transpose() + self.l.transpose() / Complex64::new(self.dos, 0.0)
    }

    /// Response matrix `X̄ᵀ + L̄ᵀ/z + iε₀Δ̄/z`.
    pub fn response_matrix(&self) -> DMatrix<Complex64> {
        let mut r = self.coupling_matrix();
        for (k, d) in self.delta.iter().enumerate() {
            r[(k, k)] += I * self.epsilon0 * d / self.dos;
        }
        r
    }

    /// The same response written through the Green's self-energy,
    /// `N (Γ̄ᵀ − Δ̄)`.
    pub fn green_form_matrix(&self) -> DMatrix<Complex64> {
        let mut m = self.excited_gamma();
        for (k, d) in self.delta.iter().enumerate() {
            m[(k, k)] -= Complex64::new(*d, 0.0);
        }
        m * self.normalization
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} vs {b}");
    }

    #[test]
    fn matched_linear_total_greens_entry() {
        let g = GreensDecomposition::new(&WaveguideEnv::default(), &LossModel::none()).unwrap();
        let total = g.total();
        assert_close(total.0[0][0], c(0.0, 5.0), 1e-14);
        assert_close(g.forward.0[0][0], c(0.0, 2.5), 1e-14);
        assert_eq!(g.forward, g.backward);
    }

    #[test]
    fn zero_field_leaves_only_loss() {
        let env = WaveguideEnv::with_field(PolarizationVector::zero());
        let loss = LossModel::isotropic(0.2).unwrap();
        let g = GreensDecomposition::new(&env, &loss).unwrap();
        assert_eq!(g.forward, Tensor3::zero());
        assert_eq!(g.backward, Tensor3::zero());
        assert_eq!(g.total(), *loss.tensor());
    }

    #[test]
    fn isotropic_loss_gives_unit_dipole_its_rate() {
        let loss = LossModel::isotropic(0.2).unwrap();
        assert_eq!(*loss.tensor(), Tensor3::scaled_identity(c(0.0, 0.1)));
        let env = WaveguideEnv::with_field(PolarizationVector::zero());
        for d in [
            PolarizationVector::real(1.0, 0.0, 0.0),
            PolarizationVector::planar(c(0.6, 0.0), c(0.0, 0.8)),
        ] {
            let model = EmitterModel::two_level(1.0, d).unwrap();
            let b = CouplingBundle::new(&model, &env, &loss, 1.0).unwrap();
            assert!((b.decay_rates()[0] - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_field_makes_forward_and_backward_parts_equal() {
        let env = WaveguideEnv::with_field(PolarizationVector::real(0.6, -0.8, 0.0));
        let g = GreensDecomposition::new(&env, &LossModel::none()).unwrap();
        assert!(g.forward.max_abs_diff(&g.backward) < 1e-15);
    }

    #[test]
    fn active_loss_rejected() {
        let gain = Tensor3::scaled_identity(c(0.0, -0.1));
        assert!(matches!(LossModel::from_tensor(gain), Err(Error::ActiveLoss { .. })));
        assert!(LossModel::isotropic(-1.0).is_err());
        let shift_only = Tensor3::scaled_identity(c(0.3, 0.0));
        assert!(LossModel::from_tensor(shift_only).is_ok());
    }

    #[test]
    fn invalid_environment_rejected() {
        let mut env = WaveguideEnv::default();
        env.group_velocity = 0.0;
        assert!(env.validate().is_err());
        let mut env = WaveguideEnv::default();
        env.periodicity = -1.0;
        assert!(env.validate().is_err());
    }

    #[test]
    fn paradox_v_system_decay_ratio_is_four() {
        let s5 = 5f64.sqrt();
        let env = WaveguideEnv::with_field(PolarizationVector::planar(c(2.0 / s5, 0.0), c(0.0, 1.0 / s5)));
        let model = EmitterModel::new(
            vec![0.0],
            vec![1.0, 1.0],
            vec![vec![
                PolarizationVector::real(1.0, 0.0, 0.0),
                PolarizationVector::real(0.0, 1.0, 0.0),
            ]],
        )
        .unwrap();
        let b = CouplingBundle::new(&model, &env, &LossModel::none(), 1.0).unwrap();
        let g = b.gamma();
        assert!((g[(0, 0)].im / g[(1, 1)].im - 4.0).abs() < 1e-14);
        let rates = b.decay_rates();
        assert!((rates[0] - 8.0).abs() < 1e-13);
        assert!((rates[1] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn zero_dipoles_give_zero_couplings() {
        let z = PolarizationVector::zero();
        let model = EmitterModel::new(vec![0.0, 0.1], vec![1.0, 1.2], vec![vec![z, z], vec![z, z]]).unwrap();
        let b = CouplingBundle::new(&model, &WaveguideEnv::default(), &LossModel::isotropic(0.2).unwrap(), 1.0)
            .unwrap();
        assert_eq!(b.w().max_abs(), 0.0);
        assert_eq!(b.v().max_abs(), 0.0);
        assert!(b.gamma().iter().all(|v| v.norm() == 0.0));
        assert!(b.x().iter().all(|v| v.norm() == 0.0));
        assert!(b.l().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn matched_two_level_total_rate_is_ten() {
        let model = EmitterModel::two_level(1.0, PolarizationVector::real(1.0, 0.0, 0.0)).unwrap();
        let b = CouplingBundle::new(&model, &WaveguideEnv::default(), &LossModel::none(), 1.0).unwrap();
        // oracle: |d*·E_f|²/(2 v_g) per direction, both directions
        let per_direction = 1.0 / (2.0 * 0.1);
        assert!((b.decay_rates()[0] - 2.0 * per_direction).abs() < 1e-13);
        assert_close(b.normalization(), c(0.0, -0.2), 1e-15);
        assert!((b.dos_factor() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn detuning_matrix_entries() {
        let model = EmitterModel::new(
            vec![0.0],
            vec![1.0, 1.5],
            vec![vec![PolarizationVector::zero(), PolarizationVector::zero()]],
        )
        .unwrap();
        let b = CouplingBundle::new(&model, &WaveguideEnv::default(), &LossModel::none(), 1.2).unwrap();
        assert!((b.delta()[0] + 0.2).abs() < 1e-15);
        assert!((b.delta()[1] - 0.3).abs() < 1e-15);
    }
}
