//! Outer image-space loop: SVD-decoupled Youla controller around the
//! linearized eye-in-hand map, with adaptive re-linearization.
//!
//! With `C1 = U Σ Vᵀ` the plant from joint references to features is
//! `C1·T_in(s)`, i.e. six scalar channels `M_p,i = σᵢ·T_in(s)` plus three
//! directions that no joint motion reaches. Each controlled channel is given
//! the closed loop `M_T = ω²/(s² + 2ζωs + ω²)`; the remaining three stay
//! open. Every channel controller equals `h(s)/σᵢ` with the common
//! `h(s) = ω²(τs+1)³ / [s(s+2ζω)(3τs+1)]`, so the assembled controller is
//! `G_C(s) = h(s)·C1⁺`.

use nalgebra::{Complex, DMatrix, SMatrix, SVector};

use super::discrete::{realize_discrete, StateSpaceD};
use super::inner::{cubic_lag, inner_closed_loop, ControllerGains};
use super::poly::Poly;
use super::tf::RationalTF;
use crate::error::{Error, Result};

/// Smallest accepted `σ₆/σ₁`.
pub const RANK_RTOL: f64 = 1e-9;

pub type Jacobian = SMatrix<f64, 9, 6>;
pub type Mat9 = SMatrix<f64, 9, 9>;
pub type Mat6 = SMatrix<f64, 6, 6>;

#[derive(Debug, Clone, PartialEq)]
pub struct OuterSynthesis {
    pub gains: ControllerGains,
    pub c1: Jacobian,
    /// Left singular vectors completed to an orthogonal 9×9 basis.
    pub u: Mat9,
    pub v: Mat6,
    /// Singular values, descending.
    pub sigma: [f64; 6],
    /// `M_p(i,i)`.
    pub plant_channels: Vec<RationalTF>,
    /// `M_T(i,i)`; zero on channels 7..9.
    pub target_channels: Vec<RationalTF>,
    /// `M_Y(i,i) = M_T/M_p`.
    pub youla_channels: Vec<RationalTF>,
    /// `gᵢ = M_Y/(1 − M_T)`.
    pub controllers: Vec<RationalTF>,
}

/// Second-order Butterworth-style target `ω²/(s² + 2ζωs + ω²)`.
pub fn outer_target(gains: &ControllerGains) -> RationalTF {
    let w = gains.omega_n;
    RationalTF::new(Poly::constant(w * w), Poly::new(vec![w * w, 2.0 * gains.zeta * w, 1.0]))
}

/// Common channel dynamics `h(s) = ω²(τs+1)³ / [s(s+2ζω)(3τs+1)]`.
pub fn channel_dynamics(gains: &ControllerGains) -> RationalTF {
    let w = gains.omega_n;
    let den = &(&Poly::monomial(1) * &Poly::linear(1.0, 2.0 * gains.zeta * w)) * &Poly::linear(3.0 * gains.tau_in, 1.0);
    RationalTF::new(cubic_lag(gains.tau_in).scale(w * w), den)
}

fn sorted_svd(c1: &Jacobian) -> (SMatrix<f64, 9, 6>, [f64; 6], Mat6) {
    let svd = c1.svd(true, true);
    let u = svd.u.expect("svd computes U");
    let v = svd.v_t.expect("svd computes Vᵀ").transpose();
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut us = SMatrix::<f64, 9, 6>::zeros();
    let mut vs = Mat6::zeros();
    let mut sig = [0.0; 6];
    for (k, &i) in order.iter().enumerate() {
        us.set_column(k, &u.column(i));
        vs.set_column(k, &v.column(i));
        sig[k] = svd.singular_values[i];
    }
    (us, sig, vs)
}

/// Orthonormal basis of the complement of `range(u6)`, obtained by
/// projecting `seed` columns and orthonormalizing.
fn complement(u6: &SMatrix<f64, 9, 6>, seed: &SMatrix<f64, 9, 3>) -> SMatrix<f64, 9, 3> {
    let proj = Mat9::identity() - u6 * u6.transpose();
    let mut out = SMatrix::<f64, 9, 3>::zeros();
    for k in 0..3 {
        let mut c = proj * seed.column(k);
        for j in 0..k {
            let prev = out.column(j).into_owned();
            c -= prev * prev.dot(&c);
        }
        // second pass for numerical orthogonality
        for j in 0..6 {
            let uj = u6.column(j).into_owned();
            c -= uj * uj.dot(&c);
        }
        for j in 0..k {
            let prev = out.column(j).into_owned();
            c -= prev * prev.dot(&c);
        }
        out.set_column(k, &c.normalize());
    }
    out
}

fn initial_complement(u6: &SMatrix<f64, 9, 6>) -> SMatrix<f64, 9, 3> {
    let proj = Mat9::identity() - u6 * u6.transpose();
    let eig = proj.symmetric_eigen();
    let mut order: Vec<usize> = (0..9).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut seed = SMatrix::<f64, 9, 3>::zeros();
    for (k, &idx) in order.iter().take(3).enumerate() {
        let mut col = eig.eigenvectors.column(idx).into_owned();
        // deterministic sign: largest-magnitude entry positive
        if col[col.iamax()] < 0.0 {
            col = -col;
        }
        seed.set_column(k, &col);
    }
    complement(u6, &seed)
}

fn assemble(gains: &ControllerGains, c1: &Jacobian, u6: SMatrix<f64, 9, 6>, comp: SMatrix<f64, 9, 3>, v: Mat6, sigma: [f64; 6]) -> OuterSynthesis {
    let mut u = Mat9::zeros();
    u.fixed_columns_mut::<6>(0).copy_from(&u6);
    u.fixed_columns_mut::<3>(6).copy_from(&comp);

    let t_in = inner_closed_loop(gains.tau_in);
    let m_t = outer_target(gains);
    let h = channel_dynamics(gains);
    let mut plant_channels = Vec::with_capacity(9);
    let mut target_channels = Vec::with_capacity(9);
    let mut youla_channels = Vec::with_capacity(9);
    let mut controllers = Vec::with_capacity(6);
    for (i, &s) in sigma.iter().enumerate() {
        let mp = RationalTF::new(t_in.num.scale(s), t_in.den.clone());
        youla_channels.push((&m_t / &mp).minreal());
        plant_channels.push(mp);
        target_channels.push(m_t.clone());
        controllers.push(RationalTF::new(h.num.scale(1.0 / sigma[i]), h.den.clone()));
    }
    for _ in 6..9 {
        plant_channels.push(RationalTF::constant(0.0));
        target_channels.push(RationalTF::constant(0.0));
        youla_channels.push(RationalTF::constant(0.0));
    }
    OuterSynthesis {
        gains: *gains,
        c1: *c1,
        u,
        v,
        sigma,
        plant_channels,
        target_channels,
        youla_channels,
        controllers,
    }
}

fn check_rank(sigma: &[f64; 6]) -> Result<()> {
    let ratio = if sigma[0] > 0.0 { sigma[5] / sigma[0] } else { 0.0 };
    if !(ratio >= RANK_RTOL) {
        return Err(Error::RankDeficient { ratio });
    }
    Ok(())
}

/// Decoupled outer-loop design for the image Jacobian `c1`.
pub fn synthesize_outer(c1: &Jacobian, gains: &ControllerGains) -> Result<OuterSynthesis> {
    let (u6, sigma, v) = sorted_svd(c1);
    check_rank(&sigma)?;
    let comp = initial_complement(&u6);
    Ok(assemble(gains, c1, u6, comp, v, sigma))
}

/// Re-synthesis for a new Jacobian with singular vectors sign-aligned to
/// `prev` (each pair `uᵢ, vᵢ` flipped together so `C1 = UΣVᵀ` still holds)
/// and the uncontrolled complement carried over by projection.
pub fn adaptive_update(prev: &OuterSynthesis, c1_new: &Jacobian) -> Result<OuterSynthesis> {
    if *c1_new == prev.c1 {
        return Ok(prev.clone());
    }
    let (mut u6, sigma, mut v) = sorted_svd(c1_new);
    check_rank(&sigma)?;
    for i in 0..6 {
        let align = u6.column(i).dot(&prev.u.column(i)) + v.column(i).dot(&prev.v.column(i));
        if align < 0.0 {
            u6.column_mut(i).neg_mut();
            v.column_mut(i).neg_mut();
        }
    }
    let seed = prev.u.fixed_columns::<3>(6).into_owned();
    let comp = complement(&u6, &seed);
    Ok(assemble(&prev.gains, c1_new, u6, comp, v, sigma))
}

impl OuterSynthesis {
    pub fn u_controlled(&self) -> SMatrix<f64, 9, 6> {
        self.u.fixed_columns::<6>(0).into_owned()
    }

    /// `C1⁺ = V Σ⁻¹ U₆ᵀ`.
    pub fn pseudo_inverse(&self) -> SMatrix<f64, 6, 9> {
        let mut sinv = Mat6::zeros();
        for i in 0..6 {
            sinv[(i, i)] = 1.0 / self.sigma[i];
        }
        self.v * sinv * self.u_controlled().transpose()
    }

    /// Projected error `Uᵀ·e`.
    pub fn project(&self, e: &SVector<f64, 9>) -> SVector<f64, 9> {
        self.u.transpose() * e
    }

    /// `T_y(s) = U·diag(M_T(s)…, 0, 0, 0)·Uᵀ`.
    pub fn t_y(&self, s: Complex<f64>) -> Result<DMatrix<Complex<f64>>> {
        let mut diag = DMatrix::<Complex<f64>>::zeros(9, 9);
        for (i, m) in self.target_channels.iter().enumerate() {
            diag[(i, i)] = m.eval(s)?;
        }
        let u = self.u.map(|x| Complex::new(x, 0.0));
        let u = DMatrix::from_iterator(9, 9, u.iter().copied());
        Ok(&u * diag * u.transpose())
    }

    /// `S_y(s) = I − T_y(s)`.
    pub fn s_y(&self, s: Complex<f64>) -> Result<DMatrix<Complex<f64>>> {
        Ok(DMatrix::identity(9, 9) - self.t_y(s)?)
    }

    /// Closed loop `(I + P·G_C)⁻¹·P·G_C` with `P = C1·T_in` and
    /// `G_C = V·diag(gᵢ)·U₆ᵀ`, assembled directly from the blocks.
    pub fn closed_loop(&self, s: Complex<f64>) -> Result<DMatrix<Complex<f64>>> {
        let t_in = inner_closed_loop(self.gains.tau_in).eval(s)?;
        let mut g = DMatrix::<Complex<f64>>::zeros(6, 6);
        for (i, c) in self.controllers.iter().enumerate() {
            g[(i, i)] = c.eval(s)?;
        }
        let cplx = |m: DMatrix<f64>| m.map(|x| Complex::new(x, 0.0));
        let c1 = cplx(DMatrix::from_iterator(9, 6, self.c1.iter().copied()));
        let v = cplx(DMatrix::from_iterator(6, 6, self.v.iter().copied()));
        let u6 = cplx(DMatrix::from_iterator(9, 6, self.u_controlled().iter().copied()));
        let l = c1 * t_in * v * g * u6.transpose();
        let lhs = DMatrix::<Complex<f64>>::identity(9, 9) + &l;
        lhs.lu().solve(&l).ok_or(Error::PoleHit)
    }
}

/// Discrete outer controller: six copies of `h(s)` acting on `C1⁺·e`.
///
/// The filter states are expressed in joint coordinates, so re-linearizing
/// swaps only the static matrix and leaves `q_feedback` continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterController {
    pub synthesis: OuterSynthesis,
    filters: Vec<StateSpaceD>,
    pinv: SMatrix<f64, 6, 9>,
}

impl OuterController {
    pub fn new(synthesis: OuterSynthesis, dt: f64) -> Result<Self> {
        let h = realize_discrete(&channel_dynamics(&synthesis.gains), dt)?;
        let pinv = synthesis.pseudo_inverse();
        Ok(Self { synthesis, filters: vec![h; 6], pinv })
    }

    /// Joint-space feedback command for feature error `e`; advances one step.
    pub fn step(&mut self, e: &SVector<f64, 9>) -> SVector<f64, 6> {
        let w = self.pinv * e;
        SVector::<f64, 6>::from_fn(|i, _| self.filters[i].step(w[i]))
    }

    /// Re-synthesizes for `c1_new`, keeping filter states.
    pub fn update(&mut self, c1_new: &Jacobian) -> Result<()> {
        let next = adaptive_update(&self.synthesis, c1_new)?;
        self.pinv = next.pseudo_inverse();
        self.synthesis = next;
        Ok(())
    }

    pub fn states(&self) -> Vec<f64> {
        self.filters.iter().flat_map(|f| f.x.iter().copied()).collect()
    }
}
