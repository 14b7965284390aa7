use std::f64::consts::TAU;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::Complex;

/// Anything that can be evaluated pointwise on the plane.
pub trait Evaluate {
    fn eval(&self, z: Complex) -> Complex;
}

impl<F: Fn(Complex) -> Complex> Evaluate for F {
    fn eval(&self, z: Complex) -> Complex {
        self(z)
    }
}

/// Basis in which polynomial coefficients are expressed. Both variants use
/// the normalised variable `u = (z − center)/scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// `u^j`
    Monomial { center: Complex, scale: f64 },
    /// Discrete orthonormal polynomials from an Arnoldi run:
    /// `q_0 = q0`, `h[k+1][k] q_{k+1} = u q_k − Σ_{j≤k} h[j][k] q_j`.
    /// `hessenberg[k]` stores the column `h[0..=k+1][k]`.
    Orthogonal { center: Complex, scale: f64, q0: f64, hessenberg: Vec<Vec<Complex>> },
}

impl Basis {
    pub fn standard() -> Self {
        Basis::Monomial { center: Complex::new(0.0, 0.0), scale: 1.0 }
    }

    pub fn center(&self) -> Complex {
        match self {
            Basis::Monomial { center, .. } | Basis::Orthogonal { center, .. } => *center,
        }
    }

    pub fn scale(&self) -> f64 {
        match self {
            Basis::Monomial { scale, .. } | Basis::Orthogonal { scale, .. } => *scale,
        }
    }

    /// Values of the first `len` basis functions at `z`.
    pub fn values(&self, z: Complex, len: usize) -> Vec<Complex> {
        let u = (z - self.center()) / self.scale();
        let mut out = Vec::with_capacity(len);
        match self {
            Basis::Monomial { .. } => {
                let mut p = Complex::new(1.0, 0.0);
                for _ in 0..len {
                    out.push(p);
                    p *= u;
                }
            }
            Basis::Orthogonal { q0, hessenberg, .. } => {
                if len == 0 {
                    return out;
                }
                out.push(Complex::new(*q0, 0.0));
                for k in 0..len - 1 {
                    let h = &hessenberg[k];
                    let mut v = u * out[k];
                    for (j, hj) in h[..=k].iter().enumerate() {
                        v -= hj * out[j];
                    }
                    out.push(v / h[k + 1]);
                }
            }
        }
        out
    }

    fn is_standard(&self) -> bool {
        matches!(self, Basis::Monomial { center, scale } if center.norm() == 0.0 && *scale == 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub basis: Basis,
    pub coefficients: Vec<Complex>,
}

impl Polynomial {
    /// Polynomial in the standard monomial basis `z^j`.
    pub fn from_coefficients(coefficients: Vec<Complex>) -> Self {
        Polynomial { basis: Basis::standard(), coefficients }
    }

    pub fn zero() -> Self {
        Polynomial::from_coefficients(vec![])
    }

    pub fn constant(c: Complex) -> Self {
        Polynomial::from_coefficients(vec![c])
    }

    /// `z^mu`
    pub fn monomial(mu: usize) -> Self {
        let mut coefficients = vec![Complex::new(0.0, 0.0); mu + 1];
        coefficients[mu] = Complex::new(1.0, 0.0);
        Polynomial::from_coefficients(coefficients)
    }

    /// Index of the last nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|c| c.norm() != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn scaled(&self, c: Complex) -> Polynomial {
        Polynomial { basis: self.basis.clone(), coefficients: self.coefficients.iter().map(|a| a * c).collect() }
    }

    /// Coefficients of `z^0..z^{n−1}` recovered from values at the `n`-th
    /// roots of unity; exact up to rounding when `n` exceeds the degree.
    pub fn circle_coefficients(&self, n: usize) -> Vec<Complex> {
        circle_coefficients(self, n)
    }

    /// Coefficients of `z^0..z^{n−1}`: copied when already in the standard
    /// basis, otherwise recovered on the circle.
    pub fn standard_coefficients(&self, n: usize) -> Vec<Complex> {
        if self.basis.is_standard() {
            let mut c = self.coefficients.clone();
            c.resize(n.max(c.len()), Complex::new(0.0, 0.0));
            c
        } else {
            circle_coefficients(self, n)
        }
    }

    /// Re-expansion in the standard basis `z^j`.
    pub fn to_standard(&self) -> Polynomial {
        if self.basis.is_standard() {
            return self.clone();
        }
        let n = (self.coefficients.len().max(1)).next_power_of_two();
        let mut coefficients = circle_coefficients(self, n);
        coefficients.truncate(self.coefficients.len());
        Polynomial::from_coefficients(coefficients)
    }
}

impl Evaluate for Polynomial {
    fn eval(&self, z: Complex) -> Complex {
        match &self.basis {
            Basis::Monomial { center, scale } => {
                let u = (z - center) / scale;
                self.coefficients.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * u + c)
            }
            Basis::Orthogonal { .. } => {
                let q = self.basis.values(z, self.coefficients.len());
                q.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum()
            }
        }
    }
}

/// `Σ α_k p_k`, evaluated term by term; zero weights are skipped so that
/// overflowing members never contaminate the sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearCombination {
    pub terms: Vec<(Complex, Polynomial)>,
}

impl Evaluate for LinearCombination {
    fn eval(&self, z: Complex) -> Complex {
        self.terms.iter().filter(|(a, _)| a.norm() != 0.0).map(|(a, p)| a * p.eval(z)).sum()
    }
}

/// Fourier coefficients `ĉ_0..ĉ_{n−1}` of `f` on the unit circle from `n`
/// equispaced samples.
pub fn circle_coefficients(f: &impl Evaluate, n: usize) -> Vec<Complex> {
    let n = n.max(1);
    let mut buf: Vec<Complex> = (0..n).map(|k| f.eval(Complex::from_polar(1.0, TAU * k as f64 / n as f64))).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter().map(|c| c / n as f64).collect()
}

/// `‖p‖₂ = (∫ |p(e^{iθ})|² dθ/2π)^{1/2}`: Parseval on the coefficients in
/// the standard basis, re-expanding first when needed.
pub fn l2_circle_norm(p: &Polynomial) -> f64 {
    let std = p.to_standard();
    std.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖f‖₂` for any function holomorphic near the closed disc whose Taylor
/// series is supported below `degree_bound`.
pub fn l2_circle_norm_of(f: &impl Evaluate, degree_bound: usize) -> f64 {
    let n = (degree_bound + 1).next_power_of_two();
    circle_coefficients(f, n).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Trapezoid rule for `‖f‖₂` with `points` nodes.
pub fn trapezoid_circle_norm(f: &impl Evaluate, points: usize) -> f64 {
    let s: f64 = (0..points).map(|k| f.eval(Complex::from_polar(1.0, TAU * k as f64 / points as f64)).norm_sqr()).sum();
    (s / points as f64).sqrt()
}

fn cantor_pair(x: u64, y: u64) -> u64 {
    (x + y) * (x + y + 1) / 2 + y
}

fn cantor_unpair(z: u64) -> (u64, u64) {
    let w = ((8 * z as u128 + 1).isqrt() as u64 - 1) / 2;
    let t = w * (w + 1) / 2;
    let y = z - t;
    (w - y, y)
}

/// Stern's diatomic sequence.
fn stern(mut n: u64) -> u64 {
    let (mut a, mut b) = (1u64, 0u64);
    while n > 0 {
        if n & 1 == 1 {
            b += a;
        } else {
            a += b;
        }
        n >>= 1;
    }
    b
}

/// Bijection `ℕ → ℚ`: `0 ↦ 0`, `2k−1 ↦ cw(k)`, `2k ↦ −cw(k)` with the
/// Calkin–Wilf enumeration `cw(k) = s(k)/s(k+1)` of the positive rationals.
fn rational(x: u64) -> f64 {
    if x == 0 {
        return 0.0;
    }
    let k = x.div_ceil(2);
    let q = stern(k) as f64 / stern(k + 1) as f64;
    if x % 2 == 1 {
        q
    } else {
        -q
    }
}

/// Bijection `ℕ → ℚ[i]`.
fn gaussian_rational(x: u64) -> Complex {
    let (a, b) = cantor_unpair(x);
    Complex::new(rational(a), rational(b))
}

fn decode_tuple(mut t: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 1..len {
        let (a, rest) = cantor_unpair(t);
        out.push(a);
        t = rest;
    }
    out.push(t);
    out
}

/// The `l`-th polynomial of a fixed enumeration of all polynomials with
/// Gaussian-rational coefficients.
///
/// `P_1 = 0`. For `l ≥ 2`, `(d, t)` is the Cantor unpairing of `l − 2`;
/// `t` decodes into `d + 1` naturals `x_0..x_d` by nested unpairing, and
/// the coefficient of `z^j` is the Gaussian rational number `x_j`, except
/// that the leading one uses `x_d + 1` so it never vanishes. Hence
/// `P_2 = 1`, `P_3 = z`, `P_4 = i` and `z^k = P_{k(k+1)/2 + 2}`.
pub fn enumerate_dense_polynomial(l: u64) -> Polynomial {
    assert!(l >= 1, "the enumeration starts at 1");
    if l == 1 {
        return Polynomial::zero();
    }
    let (d, t) = cantor_unpair(l - 2);
    let mut xs = decode_tuple(t, d as usize + 1);
    *xs.last_mut().expect("d + 1 ≥ 1 entries") += 1;
    Polynomial::from_coefficients(xs.into_iter().map(gaussian_rational).collect())
}

/// Index of `z^k` in the enumeration.
pub fn monomial_index(k: u64) -> u64 {
    cantor_pair(k, 0) + 2
}
