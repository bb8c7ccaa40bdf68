//! Port-pairing representation of the switching matrix.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::Complex;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix};

/// Symmetric, zero-diagonal 0/1 matrix stored as a partner map.
///
/// A *perfect* matching connects every port (a fixed-point-free involution, i.e. a
/// symmetric permutation matrix with zero diagonal). Port reduction produces *partial*
/// matchings, where disconnected ports have all-zero rows and columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchingMatrix {
    partner: Vec<Option<usize>>,
}

impl MatchingMatrix {
    /// All `size` ports disconnected.
    pub fn empty(size: usize) -> Self {
        Self {
            partner: vec![None; size],
        }
    }

    /// `{(0,1), (2,3), ...}`.
    pub fn consecutive(size: usize) -> Result<Self> {
        check_even(size)?;
        let partner = (0..size).map(|i| Some(i ^ 1)).collect();
        Ok(Self { partner })
    }

    /// Uniformly random perfect matching: shuffle the ports and pair neighbours.
    pub fn random<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<Self> {
        check_even(size)?;
        let mut ports: Vec<usize> = (0..size).collect();
        ports.shuffle(rng);
        let mut partner = vec![None; size];
        for pair in ports.chunks_exact(2) {
            partner[pair[0]] = Some(pair[1]);
            partner[pair[1]] = Some(pair[0]);
        }
        Ok(Self { partner })
    }

    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::empty(size);
        for &(i, j) in pairs {
            m.connect(i, j)?;
        }
        Ok(m)
    }

    pub fn from_partners(partner: Vec<Option<usize>>) -> Result<Self> {
        let k = partner.len();
        for (i, p) in partner.iter().enumerate() {
            if let Some(j) = *p {
                if j >= k || j == i || partner[j] != Some(i) {
                    return Err(Error::Domain(format!(
                        "partner map is not a fixed-point-free involution at port {i}"
                    )));
                }
            }
        }
        Ok(Self { partner })
    }

    /// Reads a dense 0/1 matrix. Entries above 0.5 count as connections.
    pub fn from_dense(x: &RMatrix) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::InvalidDimension("switching matrix must be square".into()));
        }
        let k = x.nrows();
        let mut partner = vec![None; k];
        for i in 0..k {
            let ones: Vec<usize> = (0..k).filter(|&j| x[(i, j)] > 0.5).collect();
            match ones.as_slice() {
                [] => {}
                [j] => partner[i] = Some(*j),
                _ => return Err(Error::Domain(format!("row {i} connects more than one port"))),
            }
        }
        Self::from_partners(partner)
    }

    pub fn size(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, port: usize) -> Option<usize> {
        self.partner[port]
    }

    pub fn partners(&self) -> &[Option<usize>] {
        &self.partner
    }

    /// Connected pairs `(i, j)` with `i < j`, in increasing `i`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.filter(|&j| j > i).map(|j| (i, j)))
            .collect()
    }

    pub fn num_pairs(&self) -> usize {
        self.partner.iter().filter(|p| p.is_some()).count() / 2
    }

    /// Rank of the dense view: the number of connected ports.
    pub fn rank(&self) -> usize {
        2 * self.num_pairs()
    }

    pub fn is_perfect(&self) -> bool {
        !self.partner.is_empty() && self.partner.iter().all(|p| p.is_some())
    }

    pub fn connect(&mut self, i: usize, j: usize) -> Result<()> {
        let k = self.size();
        if i >= k || j >= k || i == j {
            return Err(Error::Domain(format!("cannot connect ports ({i}, {j}) of {k}")));
        }
        if self.partner[i].is_some() || self.partner[j].is_some() {
            return Err(Error::Domain(format!("port {i} or {j} is already connected")));
        }
        self.partner[i] = Some(j);
        self.partner[j] = Some(i);
        Ok(())
    }

    /// Removes the connection `(i, j)`; fails if the two ports are not paired.
    pub fn disconnect(&mut self, i: usize, j: usize) -> Result<()> {
        if i >= self.size() || self.partner[i] != Some(j) {
            return Err(Error::Domain(format!("ports ({i}, {j}) are not connected")));
        }
        self.partner[i] = None;
        self.partner[j] = None;
        Ok(())
    }

    pub fn without_pair(&self, i: usize, j: usize) -> Result<Self> {
        let mut m = self.clone();
        m.disconnect(i, j)?;
        Ok(m)
    }

    /// `true` when the pairs of `self` are a subset of the pairs of `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.size() == other.size()
            && self
                .partner
                .iter()
                .zip(&other.partner)
                .all(|(a, b)| a.is_none() || a == b)
    }

    pub fn to_dense(&self) -> RMatrix {
        let k = self.size();
        let mut x = RMatrix::zeros(k, k);
        for (i, p) in self.partner.iter().enumerate() {
            if let Some(j) = *p {
                x[(i, j)] = 1.0;
            }
        }
        x
    }

    pub fn to_dense_complex(&self) -> CMatrix {
        self.to_dense().map(|v| Complex::new(v, 0.0))
    }

    /// `Υ · m`, i.e. row `i` of the result is row `partner(i)` of `m` (zero if disconnected).
    pub fn apply_left(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.nrows(), self.size(), "row count must equal the port count");
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for (i, p) in self.partner.iter().enumerate() {
            if let Some(j) = *p {
                out.set_row(i, &m.row(j));
            }
        }
        out
    }

    /// `Tr(Υ W) = Σ_{pairs} (W_ij + W_ji)`.
    pub fn trace_with(&self, w: &RMatrix) -> f64 {
        self.pairs().iter().map(|&(i, j)| w[(i, j)] + w[(j, i)]).sum()
    }

    /// Squared Frobenius distance between the dense views.
    pub fn distance2(&self, other: &Self) -> f64 {
        // Each differing partner contributes one 1 in self and one in other per row.
        self.partner
            .iter()
            .zip(&other.partner)
            .map(|(a, b)| match (a, b) {
                (a, b) if a == b => 0.0,
                (Some(_), Some(_)) => 2.0,
                _ => 1.0,
            })
            .sum()
    }

    /// Checks every structural invariant of the dense view: symmetry, zero diagonal,
    /// entries in {0, 1}, row sums in {0, 1} (exactly 1 for perfect matchings), and
    /// `X² = I` on the connected ports.
    pub fn satisfies_invariants(&self) -> bool {
        let x = self.to_dense();
        let k = self.size();
        let sym = x == x.transpose();
        let diag = (0..k).all(|i| x[(i, i)] == 0.0);
        let rows = (0..k).all(|i| {
            let s: f64 = x.row(i).iter().sum();
            s == 0.0 || s == 1.0
        });
        let sq = &x * &x;
        let involution = (0..k).all(|i| {
            (0..k).all(|j| {
                let expect = if i == j && self.partner[i].is_some() {
                    1.0
                } else {
                    0.0
                };
                sq[(i, j)] == expect
            })
        });
        sym && diag && rows && involution
    }
}

pub(crate) fn check_even(size: usize) -> Result<()> {
    if size == 0 || !size.is_multiple_of(2) {
        return Err(Error::InvalidDimension(format!(
            "port count {size} must be positive and even"
        )));
    }
    Ok(())
}

/// `L · Υ · R` without materializing `Υ`.
pub fn cascade(left: &CMatrix, matching: &MatchingMatrix, right: &CMatrix) -> CMatrix {
    left * matching.apply_left(right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_matchings_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [2, 4, 10, 64] {
            let m = MatchingMatrix::random(k, &mut rng).unwrap();
            assert!(m.is_perfect() && m.satisfies_invariants());
        }
        assert_eq!(MatchingMatrix::random(2, &mut rng).unwrap().pairs(), vec![(0, 1)]);
        assert!(MatchingMatrix::random(5, &mut rng).is_err());
    }

    #[test]
    fn dense_round_trip_and_partial() {
        let m = MatchingMatrix::from_pairs(6, &[(0, 3), (4, 5)]).unwrap();
        assert!(!m.is_perfect());
        assert_eq!(m.rank(), 4);
        assert!(m.satisfies_invariants());
        assert_eq!(MatchingMatrix::from_dense(&m.to_dense()).unwrap(), m);
    }

    #[test]
    fn rejects_self_and_double_connections() {
        let mut m = MatchingMatrix::empty(4);
        assert!(m.connect(1, 1).is_err());
        m.connect(0, 1).unwrap();
        assert!(m.connect(1, 2).is_err());
        assert!(m.disconnect(0, 2).is_err());
        m.disconnect(1, 0).unwrap();
        assert_eq!(m.num_pairs(), 0);
    }

    #[test]
    fn apply_left_matches_dense_product() {
        let m = MatchingMatrix::from_pairs(4, &[(0, 2), (1, 3)]).unwrap();
        let r = CMatrix::from_fn(4, 3, |i, j| Complex::new(i as f64, j as f64));
        assert_eq!(m.apply_left(&r), m.to_dense_complex() * &r);
    }

    #[test]
    fn distance_matches_frobenius() {
        let a = MatchingMatrix::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        let b = MatchingMatrix::from_pairs(4, &[(0, 2), (1, 3)]).unwrap();
        let d = (a.to_dense() - b.to_dense()).norm_squared();
        assert_eq!(a.distance2(&b), d);
        let c = MatchingMatrix::from_pairs(4, &[(0, 1)]).unwrap();
        assert_eq!(a.distance2(&c), (a.to_dense() - c.to_dense()).norm_squared());
    }
}
