use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fit::FhcCandidate;
use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::Complex;

/// `‖e*_μ‖₂` for the coefficient functionals of the monomial system.
pub const COEFFICIENT_FUNCTIONAL_NORM: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpanKind {
    Spaceable,
    Dense,
    /// Dense members followed by spaceable members.
    Mixed,
}

/// Role of a member inside a mixed basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MemberRole {
    Dense { mu: u64 },
    Spaceable { mu: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanBasis {
    pub members: Vec<FhcCandidate>,
    pub roles: Vec<MemberRole>,
    pub kind: SpanKind,
    pub perturbation_sum: f64,
}

impl SpanBasis {
    /// Member `μ` (1-based) plays `f_μ`; a spaceable basis must satisfy
    /// `Σ ‖f_μ − z^μ‖₂ < 1/2`.
    pub fn new(members: Vec<FhcCandidate>, kind: SpanKind) -> Result<Self> {
        let roles = (1..=members.len() as u64)
            .map(|mu| match kind {
                SpanKind::Dense => MemberRole::Dense { mu },
                _ => MemberRole::Spaceable { mu },
            })
            .collect();
        SpanBasis::with_roles(members, roles, kind)
    }

    pub fn with_roles(members: Vec<FhcCandidate>, roles: Vec<MemberRole>, kind: SpanKind) -> Result<Self> {
        if members.is_empty() || roles.len() != members.len() {
            return Err(Error::InvalidParameter("a basis needs one role per member and at least one member".into()));
        }
        let mut basis = SpanBasis { members, roles, kind, perturbation_sum: 0.0 };
        basis.perturbation_sum = verify_basis_perturbation(&basis);
        if kind == SpanKind::Spaceable && !(basis.perturbation_sum < 0.5) {
            return Err(Error::Precondition(format!(
                "perturbation sum {:.4} is not below 1/2",
                basis.perturbation_sum
            )));
        }
        Ok(basis)
    }

    pub fn polynomials(&self) -> impl Iterator<Item = &Polynomial> {
        self.members.iter().map(|m| &m.poly)
    }
}

fn circle_size(p: &Polynomial, extra: usize) -> usize {
    (p.coefficients.len().max(extra + 1) + 1).next_power_of_two()
}

/// `Σ_μ ‖e*_μ‖₂ · ‖f_μ − z^μ‖₂` over the spaceable members.
pub fn verify_basis_perturbation(basis: &SpanBasis) -> f64 {
    basis
        .members
        .iter()
        .zip(&basis.roles)
        .filter_map(|(m, role)| match role {
            MemberRole::Spaceable { mu } => Some((m, *mu as usize)),
            MemberRole::Dense { .. } => None,
        })
        .map(|(m, mu)| {
            let n = circle_size(&m.poly, mu);
            let mut coeffs = m.poly.standard_coefficients(n);
            coeffs[mu] -= Complex::new(1.0, 0.0);
            COEFFICIENT_FUNCTIONAL_NORM * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub lambda_min: f64,
    /// `1/λ_min`, bounding `Σ|α_μ|²` for unit-norm combinations.
    pub h: f64,
}

/// Smallest eigenvalue of `(⟨f_i, f_j⟩_{L²(𝕋)})`, by Parseval on the
/// circle coefficients.
pub fn gram_independence(basis: &SpanBasis) -> GramReport {
    let n = basis.polynomials().map(|p| circle_size(p, 0)).max().unwrap_or(1);
    let coeffs: Vec<Vec<Complex>> = basis.polynomials().map(|p| p.standard_coefficients(n)).collect();
    let k = coeffs.len();
    let gram = DMatrix::<Complex>::from_fn(k, k, |i, j| coeffs[i].iter().zip(&coeffs[j]).map(|(a, b)| a * b.conj()).sum());
    let lambda_min = gram.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
    GramReport { lambda_min, h: if lambda_min > 0.0 { 1.0 / lambda_min } else { f64::INFINITY } }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn members(polys: Vec<Polynomial>) -> Vec<FhcCandidate> {
        polys.into_iter().map(FhcCandidate::exact).collect()
    }

    fn perturbed(mu: usize, e: Complex) -> Polynomial {
        let mut p = Polynomial::monomial(mu);
        p.coefficients[0] += e;
        p
    }

    #[test]
    fn exact_monomials() {
        let b = SpanBasis::new(members((1..=4).map(Polynomial::monomial).collect()), SpanKind::Spaceable).unwrap();
        assert_eq!(b.perturbation_sum, 0.0);
        let g = gram_independence(&b);
        assert!((g.lambda_min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_perturbations() {
        let big_m = 5;
        let polys = (1..=big_m).map(|mu| perturbed(mu, c(3f64.powi(-(mu as i32)), 0.0))).collect();
        let b = SpanBasis::new(members(polys), SpanKind::Spaceable).unwrap();
        let bound = 0.5 - 3f64.powi(-(big_m as i32)) * 0.5;
        assert!(b.perturbation_sum <= bound + 1e-12, "{}", b.perturbation_sum);
        let g = gram_independence(&b);
        assert!(g.lambda_min >= 0.25, "{}", g.lambda_min);
    }

    #[test]
    fn large_perturbation_is_rejected() {
        let polys = vec![perturbed(1, c(1.0, 0.0)), Polynomial::monomial(2)];
        assert!(matches!(SpanBasis::new(members(polys), SpanKind::Spaceable), Err(Error::Precondition(_))));
    }

    #[test]
    fn duplicated_member_is_singular() {
        let p = perturbed(2, c(0.1, 0.1));
        let b = SpanBasis::new(members(vec![p.clone(), p]), SpanKind::Dense).unwrap();
        assert!(gram_independence(&b).lambda_min < 1e-12);
    }
}
