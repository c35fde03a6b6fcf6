//! Cartesian interaction tensors T^(k) = grad^k (1/r) for k in 0..=4 and
//! their contractions with point multipoles.
//!
//! Components are stored once per multi-index (kx, ky, kz) with
//! kx + ky + kz = k, so permutation symmetry is exact by construction.
//! Contractions carry the (-1)^m / m! prefactor with the multi-index
//! factorial m! = mx! my! mz!, summed over all Cartesian index tuples.

use crate::scalar::Scalar;
use crate::{Mat3, Vec3};
use thiserror::Error;

/// Maximum derivative order: quadrupole moments against a field gradient
/// probe need T^(4), nothing above is used.
pub const MAX_ORDER: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum MultipoleError {
    #[error("interaction tensor is singular at zero separation")]
    SingularGeometry,
    #[error("tensor order {0} not supported (max {MAX_ORDER})")]
    UnsupportedOrder(usize),
    #[error("cannot contract rank-{rank} moment with order-{order} tensor")]
    RankMismatch { order: usize, rank: usize },
}

/// Symmetric Cartesian tensor of the given order with one stored component
/// per multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianTensor<F> {
    order: usize,
    comps: Vec<F>,
}

/// All multi-indices (kx, ky, kz) with kx+ky+kz = order, in a fixed
/// lexicographic order (kx descending, then ky descending).
pub fn multi_indices(order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity((order + 1) * (order + 2) / 2);
    for kx in (0..=order).rev() {
        for ky in (0..=order - kx).rev() {
            out.push([kx, ky, order - kx - ky]);
        }
    }
    out
}

fn multi_index_position(order: usize, mi: [usize; 3]) -> usize {
    // position of (kx, ky, kz) in the enumeration above
    let kx = mi[0];
    let ky = mi[1];
    // entries with larger kx come first: for kx' > kx there are (order-kx'+1) entries
    let mut pos = 0;
    for kxp in (kx + 1..=order).rev() {
        pos += order - kxp + 1;
    }
    pos + (order - kx - ky)
}

fn axes_to_multi(axes: &[usize]) -> [usize; 3] {
    let mut mi = [0usize; 3];
    for &a in axes {
        mi[a] += 1;
    }
    mi
}

impl<F: Scalar> CartesianTensor<F> {
    pub fn zero(order: usize) -> Self {
        let n = (order + 1) * (order + 2) / 2;
        Self {
            order,
            comps: vec![F::zero(); n],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Component addressed by a list of Cartesian axes (0=x, 1=y, 2=z);
    /// any permutation of the axes returns the identical stored value.
    pub fn component(&self, axes: &[usize]) -> F {
        assert_eq!(axes.len(), self.order, "axis count must equal order");
        self.comps[multi_index_position(self.order, axes_to_multi(axes))]
    }

    pub fn component_mut(&mut self, axes: &[usize]) -> &mut F {
        assert_eq!(axes.len(), self.order, "axis count must equal order");
        &mut self.comps[multi_index_position(self.order, axes_to_multi(axes))]
    }

    /// Scalar value of an order-0 tensor.
    pub fn scalar(&self) -> F {
        assert_eq!(self.order, 0);
        self.comps[0]
    }

    /// Order-1 tensor as a vector.
    pub fn vector(&self) -> Vec3<F> {
        assert_eq!(self.order, 1);
        Vec3::new(
            self.component(&[0]),
            self.component(&[1]),
            self.component(&[2]),
        )
    }

    /// Order-2 tensor as a symmetric matrix.
    pub fn matrix(&self) -> Mat3<F> {
        assert_eq!(self.order, 2);
        let mut m = Mat3::zeros();
        for a in 0..3 {
            for b in 0..3 {
                m[(a, b)] = self.component(&[a, b]);
            }
        }
        m
    }

    /// Contract one index pair with the identity (partial trace); the
    /// result has order k-2 and vanishes for the interaction tensors.
    pub fn trace_pair(&self) -> CartesianTensor<F> {
        assert!(self.order >= 2);
        let mut out = CartesianTensor::zero(self.order - 2);
        for mi in multi_indices(self.order - 2) {
            let mut axes = Vec::with_capacity(self.order);
            for (axis, &count) in mi.iter().enumerate() {
                axes.extend(std::iter::repeat(axis).take(count));
            }
            let mut sum = F::zero();
            for b in 0..3 {
                let mut full = axes.clone();
                full.push(b);
                full.push(b);
                sum += self.component(&full);
            }
            *out.component_mut(&axes) = sum;
        }
        out
    }

    pub fn scale(&self, s: F) -> Self {
        Self {
            order: self.order,
            comps: self.comps.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        Self {
            order: self.order,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> F {
        self.comps
            .iter()
            .fold(F::zero(), |acc, c| acc.max(c.abs()))
    }
}

/// grad^k (1/|r|) evaluated at r.
pub fn interaction_tensor<F: Scalar>(
    order: usize,
    r: &Vec3<F>,
) -> Result<CartesianTensor<F>, MultipoleError> {
    if order > MAX_ORDER {
        return Err(MultipoleError::UnsupportedOrder(order));
    }
    let r2 = r.dot(r);
    if r2 == F::zero() {
        return Err(MultipoleError::SingularGeometry);
    }
    let rn = r2.sqrt();
    let inv = [
        F::one() / rn,                 // r^-1
        F::one() / (r2 * rn),          // r^-3
        F::one() / (r2 * r2 * rn),     // r^-5
        F::one() / (r2 * r2 * r2 * rn), // r^-7
        F::one() / (r2 * r2 * r2 * r2 * rn), // r^-9
    ];
    let delta = |a: usize, b: usize| if a == b { F::one() } else { F::zero() };
    let three = F::fl(3.0);

    let mut out = CartesianTensor::zero(order);
    for mi in multi_indices(order) {
        let mut axes = Vec::with_capacity(order);
        for (axis, &count) in mi.iter().enumerate() {
            axes.extend(std::iter::repeat(axis).take(count));
        }
        let val = match axes.as_slice() {
            [] => inv[0],
            [a] => -r[*a] * inv[1],
            [a, b] => three * r[*a] * r[*b] * inv[2] - delta(*a, *b) * inv[1],
            [a, b, c] => {
                let (a, b, c) = (*a, *b, *c);
                -F::fl(15.0) * r[a] * r[b] * r[c] * inv[3]
                    + three
                        * (r[a] * delta(b, c) + r[b] * delta(a, c) + r[c] * delta(a, b))
                        * inv[2]
            }
            [a, b, c, d] => {
                let (a, b, c, d) = (*a, *b, *c, *d);
                let rr4 = F::fl(105.0) * r[a] * r[b] * r[c] * r[d] * inv[4];
                let rr2 = F::fl(15.0)
                    * (r[a] * r[b] * delta(c, d)
                        + r[a] * r[c] * delta(b, d)
                        + r[a] * r[d] * delta(b, c)
                        + r[b] * r[c] * delta(a, d)
                        + r[b] * r[d] * delta(a, c)
                        + r[c] * r[d] * delta(a, b))
                    * inv[3];
                let dd = three
                    * (delta(a, b) * delta(c, d)
                        + delta(a, c) * delta(b, d)
                        + delta(a, d) * delta(b, c))
                    * inv[2];
                rr4 - rr2 + dd
            }
            _ => unreachable!(),
        };
        *out.component_mut(&axes) = val;
    }
    Ok(out)
}

/// A single multipole moment of definite rank.
#[derive(Debug, Clone)]
pub enum Moment<F> {
    Charge(F),
    Dipole(Vec3<F>),
    Quadrupole(Mat3<F>),
}

impl<F: Scalar> Moment<F> {
    pub fn rank(&self) -> usize {
        match self {
            Moment::Charge(_) => 0,
            Moment::Dipole(_) => 1,
            Moment::Quadrupole(_) => 2,
        }
    }

    fn component(&self, axes: &[usize]) -> F {
        match self {
            Moment::Charge(q) => *q,
            Moment::Dipole(mu) => mu[axes[0]],
            Moment::Quadrupole(t) => t[(axes[0], axes[1])],
        }
    }
}

/// Full contraction of the trailing `m` tensor indices with a rank-`m`
/// moment, including the (-1)^m / m! prefactor. Rank 0 is the identity
/// map scaled by the charge.
pub fn contract<F: Scalar>(
    tensor: &CartesianTensor<F>,
    moment: &Moment<F>,
) -> Result<CartesianTensor<F>, MultipoleError> {
    let m = moment.rank();
    if tensor.order() < m {
        return Err(MultipoleError::RankMismatch {
            order: tensor.order(),
            rank: m,
        });
    }
    let out_order = tensor.order() - m;
    let sign = if m % 2 == 0 { F::one() } else { -F::one() };
    let mut out = CartesianTensor::zero(out_order);
    for mi in multi_indices(out_order) {
        let mut axes = Vec::with_capacity(tensor.order());
        for (axis, &count) in mi.iter().enumerate() {
            axes.extend(std::iter::repeat(axis).take(count));
        }
        let mut sum = F::zero();
        // full contraction: sum over all ordered Cartesian tuples with the
        // scalar 1/m! prefactor (equivalently, one term per multi-index
        // weighted by its multi-index factorial)
        let w = F::fl(1.0 / (1..=m).product::<usize>().max(1) as f64);
        for t in &cartesian_tuples(m) {
            let mut full = axes.clone();
            full.extend_from_slice(t);
            sum += w * moment.component(t) * tensor.component(&full);
        }
        *out.component_mut(&axes) = sign * sum;
    }
    Ok(out)
}

fn cartesian_tuples(m: usize) -> Vec<Vec<usize>> {
    match m {
        0 => vec![vec![]],
        _ => {
            let mut out = Vec::new();
            for prev in cartesian_tuples(m - 1) {
                for a in 0..3 {
                    let mut t = prev.clone();
                    t.push(a);
                    out.push(t);
                }
            }
            out
        }
    }
}

/// Point multipoles up to quadrupole carried by one expansion site.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleSet<F> {
    pub charge: F,
    pub dipole: Vec3<F>,
    pub quadrupole: Mat3<F>,
}

impl<F: Scalar> MultipoleSet<F> {
    pub fn zero() -> Self {
        Self {
            charge: F::zero(),
            dipole: Vec3::zeros(),
            quadrupole: Mat3::zeros(),
        }
    }

    pub fn point_charge(q: F) -> Self {
        Self {
            charge: q,
            ..Self::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.charge == F::zero() && self.dipole == Vec3::zeros() && self.quadrupole == Mat3::zeros()
    }

    /// Remove the isotropic part of the quadrupole. The trace part does
    /// not interact through the trace-free tensors, so this only changes
    /// the stored moments, not any field or gradient.
    pub fn with_traceless_quadrupole(mut self) -> Self {
        let t = self.quadrupole.trace() / F::fl(3.0);
        for a in 0..3 {
            self.quadrupole[(a, a)] -= t;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn order_zero_is_inverse_distance() {
        let t = interaction_tensor::<f64>(0, &Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(t.scalar(), 1.0);
    }

    #[test]
    fn order_one_is_gradient() {
        let t = interaction_tensor::<f64>(1, &Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert_relative_eq!(t.vector().z, -0.25, max_relative = 1e-15);
        assert_eq!(t.vector().x, 0.0);
    }

    #[test]
    fn order_two_on_axis() {
        let t = interaction_tensor::<f64>(2, &Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let m = t.matrix();
        assert_relative_eq!(m[(0, 0)], -1.0);
        assert_relative_eq!(m[(1, 1)], -1.0);
        assert_relative_eq!(m[(2, 2)], 2.0);
        assert_eq!(m[(0, 1)], 0.0);
    }

    #[test]
    fn singular_at_origin() {
        let e = interaction_tensor::<f64>(2, &Vec3::zeros()).unwrap_err();
        assert_eq!(e, MultipoleError::SingularGeometry);
    }

    #[test]
    fn order_five_rejected() {
        let e = interaction_tensor::<f64>(5, &Vec3::new(0.0, 0.0, 1.0)).unwrap_err();
        assert_eq!(e, MultipoleError::UnsupportedOrder(5));
    }

    #[test]
    fn dipole_contraction_on_axis() {
        // T^(2) at r = e_z against dipole e_z: (-1)^1 * T^(2) . mu = (0, 0, -2)
        let t2 = interaction_tensor::<f64>(2, &Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let v = contract(&t2, &Moment::Dipole(Vec3::new(0.0, 0.0, 1.0)))
            .unwrap()
            .vector();
        assert_relative_eq!(v.z, -2.0);
        assert_eq!(v.x, 0.0);
    }

    #[test]
    fn zero_moment_gives_zero() {
        let t3 = interaction_tensor::<f64>(3, &Vec3::new(0.3, -0.4, 1.1)).unwrap();
        let c = contract(&t3, &Moment::Dipole(Vec3::zeros())).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn charge_contraction_is_identity() {
        let t3 = interaction_tensor::<f64>(3, &Vec3::new(0.7, 0.2, -0.5)).unwrap();
        let c = contract(&t3, &Moment::Charge(1.0)).unwrap();
        assert_eq!(c, t3);
    }

    #[test]
    fn rank_mismatch_rejected() {
        let t1 = interaction_tensor::<f64>(1, &Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!(matches!(
            contract(&t1, &Moment::Quadrupole(Mat3::zeros())),
            Err(MultipoleError::RankMismatch { .. })
        ));
    }

    #[test]
    fn quadrupole_contraction_matches_hand_sum() {
        // order-2 tensor against a quadrupole: full double sum / 2
        let r = Vec3::new(0.9, -0.3, 0.6);
        let t2 = interaction_tensor::<f64>(2, &r).unwrap();
        let mut q = Mat3::zeros();
        q[(0, 0)] = 0.4;
        q[(1, 1)] = -0.1;
        q[(2, 2)] = 0.25;
        q[(0, 1)] = 0.3;
        q[(1, 0)] = 0.3;
        q[(0, 2)] = -0.2;
        q[(2, 0)] = -0.2;
        let got = contract(&t2, &Moment::Quadrupole(q)).unwrap().scalar();
        let mut want = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                want += 0.5 * q[(a, b)] * t2.component(&[a, b]);
            }
        }
        assert_relative_eq!(got, want, max_relative = 1e-14);
    }

    #[test]
    fn parity_alternates_with_order() {
        let r = Vec3::new(0.4, -1.2, 0.8);
        for k in 0..=4 {
            let plus = interaction_tensor::<f64>(k, &r).unwrap();
            let minus = interaction_tensor::<f64>(k, &(-r)).unwrap();
            for mi in multi_indices(k) {
                let axes: Vec<usize> = (0..3)
                    .flat_map(|a| std::iter::repeat(a).take(mi[a]))
                    .collect();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert_relative_eq!(
                    minus.component(&axes),
                    sign * plus.component(&axes),
                    max_relative = 1e-14
                );
            }
        }
    }

    #[test]
    fn permutations_are_bit_identical() {
        let t = interaction_tensor::<f64>(4, &Vec3::new(1.3, -0.7, 0.4)).unwrap();
        let a = t.component(&[0, 1, 2, 2]);
        assert_eq!(a, t.component(&[2, 1, 0, 2]));
        assert_eq!(a, t.component(&[2, 2, 1, 0]));
        assert_eq!(a, t.component(&[1, 2, 2, 0]));
    }

    #[test]
    fn trace_free_orders_two_to_four() {
        let r = Vec3::new(-0.6, 0.5, 1.7);
        for k in 2..=4 {
            let t = interaction_tensor::<f64>(k, &r).unwrap();
            assert!(t.trace_pair().max_abs() < 1e-12, "order {k} not traceless");
        }
    }

    #[test]
    fn traceless_projection_removes_trace_only() {
        let mut q = Mat3::zeros();
        q[(0, 0)] = 1.0;
        q[(1, 1)] = 2.0;
        q[(2, 2)] = 3.0;
        q[(0, 1)] = 0.5;
        q[(1, 0)] = 0.5;
        let m = MultipoleSet {
            charge: 0.0,
            dipole: Vec3::zeros(),
            quadrupole: q,
        }
        .with_traceless_quadrupole();
        assert_relative_eq!(m.quadrupole.trace(), 0.0, epsilon = 1e-15);
        assert_eq!(m.quadrupole[(0, 1)], 0.5);
    }
}
