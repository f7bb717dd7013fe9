//! Quaternions, SU(2) as unit quaternions and SO(3) as their sign quotient.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;

use super::GroupError;

/// A real quaternion `w + x·i + y·j + z·k`, not necessarily of unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
    pub const J: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
    pub const K: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn pure(v: [f64; 3]) -> Self {
        Quaternion::new(0.0, v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn imag(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sq(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn dot(self, o: Quaternion) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Left multiplication `q ↦ self·q` as a 4×4 real matrix (row-major).
    pub fn left_matrix(self) -> [[f64; 4]; 4] {
        let Quaternion { w, x, y, z } = self;
        [[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]]
    }

    /// Right multiplication `q ↦ q·self` as a 4×4 real matrix (row-major).
    pub fn right_matrix(self) -> [[f64; 4]; 4] {
        let Quaternion { w, x, y, z } = self;
        [[w, -x, -y, -z], [x, w, z, -y], [y, -z, w, x], [z, y, -x, w]]
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

/// An element of SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion(Quaternion::ONE);

    /// Normalizes `q`; panics on the zero quaternion.
    pub fn from_quaternion(q: Quaternion) -> Self {
        let n = q.norm();
        assert!(n > 0.0, "cannot normalize the zero quaternion");
        UnitQuaternion(q.scale(1.0 / n))
    }

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z))
    }

    pub fn quaternion(self) -> Quaternion {
        self.0
    }

    pub fn inverse(self) -> Self {
        UnitQuaternion(self.0.conj())
    }

    pub fn renormalize(self) -> Self {
        UnitQuaternion::from_quaternion(self.0)
    }

    /// SU(2) trace `2w`.
    pub fn trace(self) -> f64 {
        2.0 * self.0.w
    }

    /// Trace of the image in SO(3), `4w² − 1`.
    pub fn so3_trace(self) -> f64 {
        4.0 * self.0.w * self.0.w - 1.0
    }

    pub fn conjugate_by(self, g: UnitQuaternion) -> Self {
        g * self * g.inverse()
    }

    pub fn distance(self, o: UnitQuaternion) -> f64 {
        (self.0 - o.0).norm()
    }

    /// Sign convention for lifts: first nonzero coordinate nonnegative.
    pub fn canonical_sign(self) -> Self {
        let a = self.0.to_array();
        match a.iter().find(|c| c.abs() > 1e-12) {
            Some(c) if *c < 0.0 => UnitQuaternion(-self.0),
            _ => self,
        }
    }

    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Quaternion::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            if q.norm() > 1e-9 {
                return UnitQuaternion::from_quaternion(q);
            }
        }
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, o: UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion(self.0 * o.0)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion(-self.0)
    }
}

/// `exp(v) = cos|v| + sin|v|·v/|v|` for a pure-imaginary `v`.
pub fn exp_su2(v: [f64; 3]) -> UnitQuaternion {
    let theta = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if theta < 1e-300 {
        return UnitQuaternion::IDENTITY;
    }
    let s = theta.sin() / theta;
    UnitQuaternion(Quaternion::new(theta.cos(), v[0] * s, v[1] * s, v[2] * s))
}

/// Inverse of [`exp_su2`] with `|v| < π`.
pub fn log_su2(q: UnitQuaternion) -> Result<[f64; 3], GroupError> {
    let q = q.quaternion();
    let im = (q.x * q.x + q.y * q.y + q.z * q.z).sqrt();
    if im < 1e-15 {
        if q.w < 0.0 {
            return Err(GroupError::LogAtAntipode);
        }
        return Ok([0.0; 3]);
    }
    let theta = im.atan2(q.w);
    let s = theta / im;
    Ok([q.x * s, q.y * s, q.z * s])
}

/// An element of SO(3) represented by either of its two SU(2) lifts.
#[derive(Debug, Clone, Copy)]
pub struct ProjectiveQuaternion(pub UnitQuaternion);

impl ProjectiveQuaternion {
    pub fn lift(self) -> UnitQuaternion {
        self.0
    }

    pub fn distance(self, o: ProjectiveQuaternion) -> f64 {
        self.0.distance(o.0).min(self.0.distance(-o.0))
    }

    pub fn trace(self) -> f64 {
        self.0.so3_trace()
    }

    /// Order two in SO(3) ⇔ the lift is pure imaginary.
    pub fn has_order_two(self, tol: f64) -> bool {
        self.0.quaternion().w.abs() <= tol
    }

    /// Canonical lift under [`UnitQuaternion::canonical_sign`].
    pub fn canonical(self) -> UnitQuaternion {
        self.0.canonical_sign()
    }

    /// Rotation matrix of the adjoint action on pure quaternions.
    pub fn rotation_matrix(self) -> [[f64; 3]; 3] {
        let Quaternion { w, x, y, z } = self.0.quaternion();
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }
}

impl PartialEq for ProjectiveQuaternion {
    /// Exact sign-blind equality.
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0 || self.0 == -o.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn basis_products() {
        use Quaternion as Q;
        assert_eq!(Q::I * Q::J, Q::K);
        assert_eq!(Q::J * Q::K, Q::I);
        assert_eq!(Q::K * Q::I, Q::J);
        assert_eq!(Q::I * Q::I, -Q::ONE);
        assert_eq!(Q::J * Q::I, -Q::K);
    }

    #[test]
    fn exp_examples() {
        assert_eq!(exp_su2([0.0; 3]), UnitQuaternion::IDENTITY);
        let q = exp_su2([-PI / 4.0, 0.0, 0.0]).quaternion();
        let s = (PI / 4.0).sin();
        assert!(close(q, Quaternion::new((PI / 4.0).cos(), -s, 0.0, 0.0), 1e-15));
        let g = exp_su2([0.0, PI / 2.0, 0.0]).quaternion();
        let conj = g * Quaternion::I * g.conj();
        assert!(close(conj, -Quaternion::I, 1e-15));
    }

    #[test]
    fn log_inverts_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let v: [f64; 3] = [rng.random_range(-1.7..1.7), rng.random_range(-1.7..1.7), rng.random_range(-1.7..1.7)];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n >= PI - 1e-6 {
                continue;
            }
            let back = log_su2(exp_su2(v)).unwrap();
            for i in 0..3 {
                assert!((back[i] - v[i]).abs() < 1e-12);
            }
        }
        assert_eq!(log_su2(-UnitQuaternion::IDENTITY), Err(GroupError::LogAtAntipode));
    }

    #[test]
    fn left_right_matrices() {
        let a = Quaternion::new(0.3, -1.0, 2.0, 0.5);
        let q = Quaternion::new(-0.7, 0.1, 0.4, 1.3);
        let apply = |m: [[f64; 4]; 4], v: Quaternion| {
            let v = v.to_array();
            let mut out = [0.0; 4];
            for i in 0..4 {
                out[i] = (0..4).map(|j| m[i][j] * v[j]).sum();
            }
            Quaternion::from_array(out)
        };
        assert!(close(apply(a.left_matrix(), q), a * q, 1e-14));
        assert!(close(apply(a.right_matrix(), q), q * a, 1e-14));
    }

    #[test]
    fn projective_equality_is_sign_blind() {
        let q = UnitQuaternion::new(0.1, 0.2, -0.3, 0.9);
        assert_eq!(ProjectiveQuaternion(q), ProjectiveQuaternion(-q));
        assert!(ProjectiveQuaternion(q).distance(ProjectiveQuaternion(-q)) < 1e-15);
        assert!(ProjectiveQuaternion(UnitQuaternion::new(0.0, 0.0, 0.0, 1.0)).has_order_two(1e-12));
        assert!((ProjectiveQuaternion(UnitQuaternion::new(0.0, 1.0, 0.0, 0.0)).trace() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_matrix_matches_conjugation() {
        let q = UnitQuaternion::new(0.4, -0.2, 0.7, 0.1);
        let r = ProjectiveQuaternion(q).rotation_matrix();
        let v = [0.3, -0.8, 0.5];
        let rotated = (q.quaternion() * Quaternion::pure(v) * q.quaternion().conj()).imag();
        for i in 0..3 {
            let ri: f64 = (0..3).map(|j| r[i][j] * v[j]).sum();
            assert!((ri - rotated[i]).abs() < 1e-14);
        }
    }
}
