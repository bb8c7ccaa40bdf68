//! Parametric multi-path channels, the lens DFT operator, path loss, and CSI corruption.
//!
//! All arrays are uniform planar arrays with half-wavelength spacing. Element `(r, c)` of
//! a `rows × cols` array sits at index `r * cols + c` (row-major).

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::linalg::{cis, CMatrix, CVector, C64};

/// Unitary 2-D DFT of a `√K × √K` lens aperture, `U = U₁ ⊗ U₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct DftOperator {
    size: usize,
    matrix: CMatrix,
}

impl DftOperator {
    pub fn new(size: usize) -> Result<Self> {
        let side = perfect_square_root(size)
            .ok_or_else(|| Error::InvalidDimension(format!("DFT size {size} is not a perfect square")))?;
        if size == 0 || !size.is_multiple_of(2) {
            return Err(Error::InvalidDimension(format!(
                "DFT size {size} must be a positive even perfect square"
            )));
        }
        let u1 = dft_matrix(side);
        Ok(Self {
            size,
            matrix: u1.kronecker(&u1),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Builds the lens operator for `k` ports. Fails unless `k` is an even perfect square.
pub fn make_dft_operator(k: usize) -> Result<DftOperator> {
    DftOperator::new(k)
}

/// Unitary `n`-point DFT matrix, `[U]_pq = e^{-j2πpq/n} / √n`.
pub fn dft_matrix(n: usize) -> CMatrix {
    let scale = 1.0 / libm::sqrt(n as f64);
    CMatrix::from_fn(n, n, |p, q| {
        let phase = -2.0 * PI * ((p * q) % n) as f64 / n as f64;
        cis(phase) * scale
    })
}

pub(crate) fn perfect_square_root(n: usize) -> Option<usize> {
    let r = libm::round(libm::sqrt(n as f64)) as usize;
    (r * r == n).then_some(r)
}

/// Uniform planar array with half-wavelength spacing, `rows × cols` elements.
///
/// Perfect-square element counts give a square array; other counts use the most
/// nearly square factorization (32 elements → 4 × 8).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayGeometry {
    rows: usize,
    cols: usize,
}

impl ArrayGeometry {
    pub fn square(side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidDimension("array side must be at least 1".into()));
        }
        Ok(Self {
            rows: side,
            cols: side,
        })
    }

    /// Planar geometry holding `n ≥ 1` elements.
    pub fn with_elements(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(
                "an array needs at least one element".into(),
            ));
        }
        let mut rows = libm::sqrt(n as f64) as usize;
        while rows > 1 && !n.is_multiple_of(rows) {
            rows -= 1;
        }
        Ok(Self {
            rows: rows.max(1),
            cols: n / rows.max(1),
        })
    }

    pub fn single() -> Self {
        Self { rows: 1, cols: 1 }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn num_elements(&self) -> usize {
        self.rows * self.cols
    }

    /// Steering vector towards `(azimuth, elevation)`; every entry has unit modulus.
    pub fn steering(&self, azimuth: f64, elevation: f64) -> CVector {
        let u = libm::sin(azimuth) * libm::cos(elevation);
        let v = libm::sin(elevation);
        let cols = self.cols;
        CVector::from_fn(self.num_elements(), |i, _| {
            let (r, c) = (i / cols, i % cols);
            cis(PI * (r as f64 * u + c as f64 * v))
        })
    }
}

/// Angular support for randomly drawn paths: azimuth in `[-az_max, az_max]`,
/// elevation in `[-el_max, el_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSpread {
    pub az_max: f64,
    pub el_max: f64,
}

impl Default for AngleSpread {
    fn default() -> Self {
        Self {
            az_max: FRAC_PI_2,
            el_max: FRAC_PI_4,
        }
    }
}

impl AngleSpread {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let az = if self.az_max > 0.0 {
            rng.sample(Uniform::new_inclusive(-self.az_max, self.az_max).unwrap())
        } else {
            0.0
        };
        let el = if self.el_max > 0.0 {
            rng.sample(Uniform::new_inclusive(-self.el_max, self.el_max).unwrap())
        } else {
            0.0
        };
        (az, el)
    }
}

/// Propagation paths of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub gains: Vec<C64>,
    /// `(azimuth, elevation)` of departure, radians.
    pub tx_angles: Vec<(f64, f64)>,
    /// `(azimuth, elevation)` of arrival, radians.
    pub rx_angles: Vec<(f64, f64)>,
    /// Path 0 is line-of-sight.
    pub los: bool,
}

impl PathSet {
    /// Draws `count` paths. NLOS gains are CN(0,1); when `los` is set the first gain is
    /// replaced by `1 + 0j`. All gains are drawn either way so that the LOS flag does not
    /// shift the random stream.
    pub fn draw<R: Rng + ?Sized>(count: usize, los: bool, spread: &AngleSpread, rng: &mut R) -> Result<Self> {
        if count == 0 {
            return Err(Error::Domain("a link needs at least one path".into()));
        }
        let mut gains = Vec::with_capacity(count);
        let mut tx_angles = Vec::with_capacity(count);
        let mut rx_angles = Vec::with_capacity(count);
        for _ in 0..count {
            gains.push(complex_normal(rng));
            tx_angles.push(spread.draw(rng));
            rx_angles.push(spread.draw(rng));
        }
        if los {
            gains[0] = Complex::new(1.0, 0.0);
        }
        Ok(Self {
            gains,
            tx_angles,
            rx_angles,
            los,
        })
    }

    pub fn count(&self) -> usize {
        self.gains.len()
    }
}

/// One sample of CN(0,1).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Distance-dependent power gain `C0 · (d / d0)^(-η)`.
pub fn pathloss(d: f64, d0: f64, c0: f64, eta: f64) -> Result<f64> {
    if !(d0 > 0.0) || !(eta > 0.0) {
        return Err(Error::Domain(format!(
            "pathloss needs d0 > 0 and eta > 0 (d0 = {d0}, eta = {eta})"
        )));
    }
    if !(d >= d0) {
        return Err(Error::Domain(format!(
            "distance {d} m is below the reference distance {d0} m"
        )));
    }
    Ok(c0 * libm::pow(d / d0, -eta))
}

/// `H = √pl · Σ_q c_q a_rx a_txᴴ`, a `rx.num_elements() × tx.num_elements()` matrix.
pub fn gen_channel(tx: &ArrayGeometry, rx: &ArrayGeometry, paths: &PathSet, pl: f64) -> Result<CMatrix> {
    if paths.count() == 0 {
        return Err(Error::Domain("a link needs at least one path".into()));
    }
    if paths.tx_angles.len() != paths.count() || paths.rx_angles.len() != paths.count() {
        return Err(Error::DimensionMismatch(
            "path gains and angles have different lengths".into(),
        ));
    }
    let amp = libm::sqrt(pl);
    let mut h = CMatrix::zeros(rx.num_elements(), tx.num_elements());
    for q in 0..paths.count() {
        let (ta, te) = paths.tx_angles[q];
        let (ra, re) = paths.rx_angles[q];
        let a_tx = tx.steering(ta, te);
        let a_rx = rx.steering(ra, re);
        h += (&a_rx * a_tx.adjoint()) * (paths.gains[q] * amp);
    }
    Ok(h)
}

/// Draws paths and synthesizes the resulting channel in one step.
pub fn draw_channel<R: Rng + ?Sized>(
    tx: &ArrayGeometry,
    rx: &ArrayGeometry,
    count: usize,
    los: bool,
    pl: f64,
    spread: &AngleSpread,
    rng: &mut R,
) -> Result<CMatrix> {
    let paths = PathSet::draw(count, los, spread, rng)?;
    gen_channel(tx, rx, &paths, pl)
}

/// Channel matrices of one realization.
///
/// Single-cell: `h_bs` is `K×N`, `h_su` is `K×M`, `h_bu` is `N×M`.
/// Multi-cell (single-antenna BSs): `h_bs` is `K×M`, `h_su` is `K×M`, `h_bu` is `M×M`
/// with `h_bu[(j, m)]` the conjugated gain from BS `j` to user `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_bs: CMatrix,
    pub h_su: CMatrix,
    pub h_bu: CMatrix,
    /// Noise variance in watts.
    pub noise_var: f64,
}

impl ChannelSet {
    /// Checks mutual consistency and returns `(K, N, M)`, where `N` is the number of
    /// transmit antennas (or BSs in the multi-cell model).
    pub fn dims(&self) -> Result<(usize, usize, usize)> {
        let k = self.h_bs.nrows();
        let n = self.h_bs.ncols();
        let m = self.h_su.ncols();
        if self.h_su.nrows() != k {
            return Err(Error::DimensionMismatch(format!(
                "H_su has {} rows, H_bs has {k}",
                self.h_su.nrows()
            )));
        }
        if self.h_bu.shape() != (n, m) {
            return Err(Error::DimensionMismatch(format!(
                "H_bu is {:?}, expected ({n}, {m})",
                self.h_bu.shape()
            )));
        }
        Ok((k, n, m))
    }

    pub fn is_finite(&self) -> bool {
        crate::linalg::is_finite(&self.h_bs)
            && crate::linalg::is_finite(&self.h_su)
            && crate::linalg::is_finite(&self.h_bu)
            && self.noise_var.is_finite()
    }
}

/// Which links carry a line-of-sight component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LosMode {
    BsRisOnly,
    BsRisAndRisUser,
}

/// Geometry and propagation constants of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScenario {
    /// `M`: users (and single-antenna BSs in the multi-cell model).
    pub users: usize,
    /// `N`: BS antennas; ignored in the multi-cell model.
    pub bs_antennas: usize,
    /// `K`: lens ports / reflective elements.
    pub ris_ports: usize,
    pub multi_cell: bool,
    pub paths_bs_ris: usize,
    pub paths_bs_user: usize,
    pub paths_ris_user: usize,
    pub eta_bs_ris: f64,
    pub eta_ris_user: f64,
    pub eta_bs_user: f64,
    /// BS–RIS distance range in metres, drawn uniformly (per BS in the multi-cell model).
    pub d_bs_ris: (f64, f64),
    /// RIS–user distance range in metres, drawn uniformly per user.
    pub d_ris_user: (f64, f64),
    /// BS–user distance in metres.
    pub d_bs_user: f64,
    pub d0: f64,
    pub c0_db: f64,
    pub noise_dbm: f64,
    pub los: LosMode,
    /// When false, `H_bu` is zero (blocked direct link).
    pub direct_link: bool,
    pub angles: AngleSpread,
}

impl ChannelScenario {
    pub fn single_cell(users: usize, bs_antennas: usize, ris_ports: usize) -> Self {
        Self {
            users,
            bs_antennas,
            ris_ports,
            multi_cell: false,
            paths_bs_ris: 10,
            paths_bs_user: 2,
            paths_ris_user: 2,
            eta_bs_ris: 2.5,
            eta_ris_user: 2.5,
            eta_bs_user: 3.7,
            d_bs_ris: (500.0, 500.0),
            d_ris_user: (10.0, 50.0),
            d_bs_user: 500.0,
            d0: 1.0,
            c0_db: -30.0,
            noise_dbm: -100.0,
            los: LosMode::BsRisOnly,
            direct_link: true,
            angles: AngleSpread::default(),
        }
    }

    pub fn multi_cell(cells: usize, ris_ports: usize) -> Self {
        Self {
            bs_antennas: 1,
            multi_cell: true,
            d_bs_ris: (100.0, 500.0),
            ..Self::single_cell(cells, 1, ris_ports)
        }
    }

    /// Transmit-side width of `H_bs`: `N`, or `M` single-antenna BSs.
    pub fn tx_width(&self) -> usize {
        if self.multi_cell {
            self.users
        } else {
            self.bs_antennas
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::Config(msg));
        if self.users == 0 {
            return bad("users must be at least 1".into());
        }
        if !self.multi_cell && self.bs_antennas == 0 {
            return bad("bs_antennas must be at least 1".into());
        }
        if DftOperator::new(self.ris_ports).is_err() {
            return bad(format!(
                "ris_ports = {} is not an even perfect square",
                self.ris_ports
            ));
        }
        if self.paths_bs_ris == 0 || self.paths_bs_user == 0 || self.paths_ris_user == 0 {
            return bad("every link needs at least one path".into());
        }
        for (name, (lo, hi)) in [("d_bs_ris", self.d_bs_ris), ("d_ris_user", self.d_ris_user)] {
            if !(lo >= self.d0 && hi >= lo) {
                return bad(format!(
                    "{name} range ({lo}, {hi}) is invalid for d0 = {}",
                    self.d0
                ));
            }
        }
        if !(self.d_bs_user >= self.d0) {
            return bad(format!("d_bs_user = {} is below d0", self.d_bs_user));
        }
        for (name, eta) in [
            ("eta_bs_ris", self.eta_bs_ris),
            ("eta_ris_user", self.eta_ris_user),
            ("eta_bs_user", self.eta_bs_user),
        ] {
            if !(eta > 0.0) {
                return bad(format!("{name} must be positive"));
            }
        }
        Ok(())
    }

    pub fn noise_var(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    fn c0(&self) -> f64 {
        db_to_linear(self.c0_db)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

fn uniform_in<R: Rng + ?Sized>(range: (f64, f64), rng: &mut R) -> f64 {
    if range.1 > range.0 {
        rng.sample(Uniform::new_inclusive(range.0, range.1).unwrap())
    } else {
        range.0
    }
}

/// Draws one channel realization for `scenario`.
///
/// Draw order is fixed: BS–RIS link(s), then for each user the RIS–user distance and
/// channel, then the direct links.
pub fn gen_channel_set<R: Rng + ?Sized>(scenario: &ChannelScenario, rng: &mut R) -> Result<ChannelSet> {
    scenario.validate()?;
    let k = scenario.ris_ports;
    let m = scenario.users;
    let ris = ArrayGeometry::with_elements(k)?;
    let one = ArrayGeometry::single();
    let c0 = scenario.c0();
    let spread = &scenario.angles;
    let user_los = scenario.los == LosMode::BsRisAndRisUser;

    let h_bs = if scenario.multi_cell {
        let mut h = CMatrix::zeros(k, m);
        for j in 0..m {
            let d = uniform_in(scenario.d_bs_ris, rng);
            let pl = pathloss(d, scenario.d0, c0, scenario.eta_bs_ris)?;
            let col = draw_channel(&one, &ris, scenario.paths_bs_ris, true, pl, spread, rng)?;
            h.set_column(j, &col.column(0));
        }
        h
    } else {
        let bs = ArrayGeometry::with_elements(scenario.bs_antennas)?;
        let d = uniform_in(scenario.d_bs_ris, rng);
        let pl = pathloss(d, scenario.d0, c0, scenario.eta_bs_ris)?;
        draw_channel(&bs, &ris, scenario.paths_bs_ris, true, pl, spread, rng)?
    };

    let mut h_su = CMatrix::zeros(k, m);
    for u in 0..m {
        let d = uniform_in(scenario.d_ris_user, rng);
        let pl = pathloss(d, scenario.d0, c0, scenario.eta_ris_user)?;
        // 1×K row g with h_su,mᴴ = g.
        let g = draw_channel(&ris, &one, scenario.paths_ris_user, user_los, pl, spread, rng)?;
        h_su.set_column(u, &g.adjoint().column(0));
    }

    let pl_bu = pathloss(scenario.d_bs_user, scenario.d0, c0, scenario.eta_bs_user)?;
    let n = scenario.tx_width();
    let mut h_bu = CMatrix::zeros(n, m);
    if scenario.multi_cell {
        for u in 0..m {
            for j in 0..m {
                let g = draw_channel(&one, &one, scenario.paths_bs_user, false, pl_bu, spread, rng)?;
                h_bu[(j, u)] = g[(0, 0)].conj();
            }
        }
    } else {
        let bs = ArrayGeometry::with_elements(scenario.bs_antennas)?;
        for u in 0..m {
            let g = draw_channel(&bs, &one, scenario.paths_bs_user, false, pl_bu, spread, rng)?;
            h_bu.set_column(u, &g.adjoint().column(0));
        }
    }
    if !scenario.direct_link {
        h_bu.fill(Complex::new(0.0, 0.0));
    }

    Ok(ChannelSet {
        h_bs,
        h_su,
        h_bu,
        noise_var: scenario.noise_var(),
    })
}

/// Gauss–Markov estimation-error model `Ĥ = κH + √(1−κ²)E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiErrorModel {
    kappa: f64,
}

impl CsiErrorModel {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::Domain(format!("kappa = {kappa} is outside (0, 1]")));
        }
        Ok(Self { kappa })
    }

    pub fn perfect() -> Self {
        Self { kappa: 1.0 }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Applies the error model to one matrix. `E` is i.i.d. complex Gaussian whose variance
/// equals the mean entry power of the corresponding column of `H` (columns index users
/// or BSs, which sit at different distances).
pub fn corrupt_csi<R: Rng + ?Sized>(h: &CMatrix, model: &CsiErrorModel, rng: &mut R) -> CMatrix {
    let kappa = model.kappa;
    if kappa == 1.0 {
        return h.clone();
    }
    let spread = libm::sqrt(1.0 - kappa * kappa);
    let rows = h.nrows().max(1) as f64;
    let mut out = DMatrix::zeros(h.nrows(), h.ncols());
    for j in 0..h.ncols() {
        let var = h.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>() / rows;
        let sd = libm::sqrt(var);
        for i in 0..h.nrows() {
            out[(i, j)] = h[(i, j)] * kappa + complex_normal(rng) * (spread * sd);
        }
    }
    out
}

/// Corrupts all three channels independently.
pub fn corrupt_channel_set<R: Rng + ?Sized>(
    channels: &ChannelSet,
    model: &CsiErrorModel,
    rng: &mut R,
) -> ChannelSet {
    ChannelSet {
        h_bs: corrupt_csi(&channels.h_bs, model, rng),
        h_su: corrupt_csi(&channels.h_su, model, rng),
        h_bu: corrupt_csi(&channels.h_bu, model, rng),
        noise_var: channels.noise_var,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dft4_is_normalized_hadamard() {
        let u = make_dft_operator(4).unwrap();
        let h = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        for (i, row) in h.iter().enumerate() {
            for (j, &sign) in row.iter().enumerate() {
                let z = u.matrix()[(i, j)];
                assert!((z.re - 0.5 * sign).abs() < 1e-15, "({i},{j}) = {z}");
                assert!(z.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dft16_unitary() {
        let u = make_dft_operator(16).unwrap();
        let g = u.matrix().adjoint() * u.matrix() - CMatrix::identity(16, 16);
        assert!(g.norm() < 1e-12);
    }

    #[test]
    fn dft_rejects_bad_sizes() {
        assert!(matches!(make_dft_operator(9), Err(Error::InvalidDimension(_))));
        assert!(matches!(make_dft_operator(8), Err(Error::InvalidDimension(_))));
        assert!(make_dft_operator(0).is_err());
    }

    #[test]
    fn pathloss_reference_values() {
        assert!((pathloss(1.0, 1.0, 1e-3, 2.5).unwrap() - 1e-3).abs() < 1e-18);
        let pl = pathloss(100.0, 1.0, 1e-3, 2.5).unwrap();
        assert!((pl / 1e-8 - 1.0).abs() < 1e-12);
        let direct = 1e-3 * 500f64.powf(-3.7);
        assert!((pathloss(500.0, 1.0, 1e-3, 3.7).unwrap() / direct - 1.0).abs() < 1e-12);
        assert!(pathloss(0.5, 1.0, 1e-3, 2.5).is_err());
    }

    #[test]
    fn single_broadside_path_is_all_unit_modulus() {
        let tx = ArrayGeometry::square(2).unwrap();
        let rx = ArrayGeometry::square(3).unwrap();
        let paths = PathSet {
            gains: alloc::vec![Complex::new(1.0, 0.0)],
            tx_angles: alloc::vec![(0.0, 0.0)],
            rx_angles: alloc::vec![(0.0, 0.0)],
            los: true,
        };
        let h = gen_channel(&tx, &rx, &paths, 1.0).unwrap();
        assert_eq!(h.shape(), (9, 4));
        assert!(h.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn geometry_factorizations() {
        let g = ArrayGeometry::with_elements(32).unwrap();
        assert_eq!((g.rows(), g.cols()), (4, 8));
        let g = ArrayGeometry::with_elements(64).unwrap();
        assert!(g.is_square() && g.rows() == 8);
        assert_eq!(ArrayGeometry::with_elements(7).unwrap().num_elements(), 7);
        assert!(ArrayGeometry::with_elements(0).is_err());
    }

    #[test]
    fn steering_norm_equals_element_count() {
        let g = ArrayGeometry::square(5).unwrap();
        let a = g.steering(0.3, -0.2);
        assert!((a.norm_squared() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn scenario_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let set = gen_channel_set(&ChannelScenario::single_cell(4, 32, 256), &mut rng).unwrap();
        assert_eq!(set.dims().unwrap(), (256, 32, 4));
        assert_eq!(set.h_bs.shape(), (256, 32));
        assert_eq!(set.h_su.shape(), (256, 4));
        assert_eq!(set.h_bu.shape(), (32, 4));
        let mc = gen_channel_set(&ChannelScenario::multi_cell(8, 64), &mut rng).unwrap();
        assert_eq!(mc.h_bs.shape(), (64, 8));
        assert_eq!(mc.h_bu.shape(), (8, 8));
    }

    #[test]
    fn csi_kappa_one_is_identity_and_range_checked() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = CMatrix::from_fn(3, 2, |i, j| Complex::new(i as f64, j as f64 - 0.5));
        assert_eq!(corrupt_csi(&h, &CsiErrorModel::new(1.0).unwrap(), &mut rng), h);
        assert!(CsiErrorModel::new(0.0).is_err());
        assert!(CsiErrorModel::new(1.01).is_err());
    }
}
