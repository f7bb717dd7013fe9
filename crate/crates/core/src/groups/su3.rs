use std::ops::Mul;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Mat3 = Matrix3<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 3×3 special unitary matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU3Element(Mat3);

impl SU3Element {
    pub fn identity() -> Self {
        SU3Element(Mat3::identity())
    }

    /// Wraps a matrix without projecting; callers guarantee membership.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        SU3Element(m)
    }

    /// Closest special unitary matrix: polar factor, then the determinant
    /// phase divided out with the principal cube root.
    pub fn project(m: Mat3) -> Self {
        let svd = m.svd(true, true);
        let u = svd.u.expect("u") * svd.v_t.expect("v_t");
        let phase = u.determinant().arg();
        SU3Element(u * Complex64::from_polar(1.0, -phase / 3.0))
    }

    pub fn scalar(z: Complex64) -> Self {
        SU3Element(Mat3::identity() * z)
    }

    /// The three central elements `ζ^k I`, `ζ = e^{2πi/3}`.
    pub fn center() -> [SU3Element; 3] {
        let zeta = |k: f64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / 3.0);
        [SU3Element::identity(), SU3Element::scalar(zeta(1.0)), SU3Element::scalar(zeta(2.0))]
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        SU3Element(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Entrywise complex conjugate (the dual representation's element).
    pub fn conj(&self) -> Self {
        SU3Element(self.0.map(|c| c.conj()))
    }

    pub fn det(&self) -> Complex64 {
        self.0.determinant()
    }

    /// `max(‖U*U − I‖_F, |det U − 1|)`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.0.adjoint() * self.0 - Mat3::identity();
        gram.norm().max((self.det() - ONE).norm())
    }

    pub fn distance(&self, o: &SU3Element) -> f64 {
        (self.0 - o.0).norm()
    }

    /// Haar measure: QR of a complex Ginibre matrix with phase correction,
    /// then the determinant removed by a scalar.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let g = Mat3::from_fn(|_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..3 {
            let d = r[(j, j)];
            let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
            for i in 0..3 {
                q[(i, j)] *= ph;
            }
        }
        let phase = q.determinant().arg();
        SU3Element(q * Complex64::from_polar(1.0, -phase / 3.0))
    }

    /// `i·λ_k` for the Gell-Mann matrices `λ_1..λ_8`.
    pub fn algebra_basis(k: usize) -> Mat3 {
        let i = Complex64::new(0.0, 1.0);
        let mut m = Mat3::from_element(ZERO);
        let s3 = 1.0 / 3f64.sqrt();
        match k {
            0 => {
                m[(0, 1)] = ONE;
                m[(1, 0)] = ONE;
            }
            1 => {
                m[(0, 1)] = -i;
                m[(1, 0)] = i;
            }
            2 => {
                m[(0, 0)] = ONE;
                m[(1, 1)] = -ONE;
            }
            3 => {
                m[(0, 2)] = ONE;
                m[(2, 0)] = ONE;
            }
            4 => {
                m[(0, 2)] = -i;
                m[(2, 0)] = i;
            }
            5 => {
                m[(1, 2)] = ONE;
                m[(2, 1)] = ONE;
            }
            6 => {
                m[(1, 2)] = -i;
                m[(2, 1)] = i;
            }
            7 => {
                m[(0, 0)] = Complex64::new(s3, 0.0);
                m[(1, 1)] = Complex64::new(s3, 0.0);
                m[(2, 2)] = Complex64::new(-2.0 * s3, 0.0);
            }
            _ => panic!("su(3) basis index {k} out of range"),
        }
        m * i
    }

    /// `exp(Σ c_k X_k)` by scaling and squaring a Taylor series, then projected.
    pub fn exp_algebra(coords: &[f64]) -> Self {
        let mut x = Mat3::from_element(ZERO);
        for (k, c) in coords.iter().enumerate() {
            x += SU3Element::algebra_basis(k) * Complex64::new(*c, 0.0);
        }
        let norm = x.norm();
        let mut squarings = 0;
        let mut scale = 1.0;
        while norm * scale > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let xs = x * Complex64::new(scale, 0.0);
        let mut term = Mat3::identity();
        let mut sum = Mat3::identity();
        for n in 1..=14 {
            term = term * xs * Complex64::new(1.0 / n as f64, 0.0);
            sum += term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        SU3Element::project(sum)
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(9);
        for i in 0..3 {
            for j in 0..3 {
                let c = self.0[(i, j)];
                out.push([c.re, c.im]);
            }
        }
        out
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Option<Self> {
        if pairs.len() != 9 {
            return None;
        }
        Some(SU3Element(Mat3::from_fn(|i, j| {
            let p = pairs[3 * i + j];
            Complex64::new(p[0], p[1])
        })))
    }
}

impl Mul for SU3Element {
    type Output = SU3Element;
    fn mul(self, o: SU3Element) -> SU3Element {
        SU3Element(self.0 * o.0)
    }
}
