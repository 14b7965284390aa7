use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::polynomial::{Basis, Evaluate, Polynomial};
use super::target::{Envelope, Piece, PiecewiseTarget};
use crate::error::{Error, Result};
use crate::geometry::smallest_enclosing_disc;
use crate::Complex;

/// Normal equations above this condition number switch to the Arnoldi basis.
pub const CONDITION_LIMIT: f64 = 1e12;

/// First degree of the doubling schedule.
pub const START_DEGREE: usize = 8;

/// Grid sup-norms understate true sup-norms; PASS thresholds divide by this.
pub const GRID_SLACK: f64 = 1.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceCertificate {
    /// Sup of `|f − g|` on the verification grid.
    pub sup_error: f64,
    /// Required bound: the uniform `τ`, or the smallest pointwise allowance.
    pub envelope: f64,
    /// Largest `|f − g| / allowed` on the verification grid.
    pub worst_ratio: f64,
    /// Sup error on the honesty grid (twice the verification resolution).
    pub fine_sup_error: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitStatus {
    Pass,
    NonConverged,
    /// The finer grid changed the sup error by a factor of 2 or more.
    Dishonest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FhcCandidate {
    pub poly: Polynomial,
    pub degree: usize,
    pub certificates: Vec<PieceCertificate>,
    pub status: FitStatus,
}

impl FhcCandidate {
    pub fn pass(&self) -> bool {
        self.status == FitStatus::Pass
    }

    /// A candidate known exactly, with no pieces to certify.
    pub fn exact(poly: Polynomial) -> Self {
        let degree = poly.degree().unwrap_or(0);
        FhcCandidate { poly, degree, certificates: vec![], status: FitStatus::Pass }
    }
}

struct Samples {
    points: Vec<Complex>,
    values: Vec<Complex>,
    weights: Vec<f64>,
}

/// Boundary points per piece for a fit of this degree; the grids below
/// use this count times 1, 2 and 4.
fn boundary_count(degree: usize) -> usize {
    4 * (degree + 1)
}

/// Grid at `refine · res` plus `refine · boundary_count(degree)` boundary
/// points. The error is holomorphic on each hole-free piece, so its sup
/// sits on the boundary, which must be sampled more densely than the degree.
fn piece_samples(piece: &Piece, res: usize, degree: usize, refine: usize) -> Vec<(Complex, Complex)> {
    let mut pts = piece.samples(refine * res);
    pts.extend(piece.boundary_samples(refine * boundary_count(degree)));
    pts
}

fn collect_samples(target: &PiecewiseTarget, res: usize, degree: usize) -> Samples {
    let mut s = Samples { points: vec![], values: vec![], weights: vec![] };
    for piece in &target.pieces {
        for (w, v) in piece_samples(piece, res, degree, 1) {
            s.points.push(w);
            s.values.push(v);
            s.weights.push(1.0 / piece.envelope.allowed(w));
        }
    }
    s
}

/// Least-squares fit at a fixed degree, certified on the verification grid
/// (twice the fitting resolution) and the honesty grid (four times).
pub fn fit_at_degree(target: &PiecewiseTarget, degree: usize, grid_res: usize) -> Result<FhcCandidate> {
    target.validate()?;
    let samples = collect_samples(target, grid_res, degree);
    let poly = if samples.points.is_empty() {
        Polynomial::zero()
    } else {
        solve(&samples, degree, true)?.0
    };
    certify(target, poly, degree, grid_res)
}

/// Degree escalation `8, 16, 32, …` up to `max_degree` until every piece
/// meets its envelope. A candidate that never does is returned with status
/// `NonConverged`.
pub fn fit_on_compacts(target: &PiecewiseTarget, max_degree: usize, grid_res: usize) -> Result<FhcCandidate> {
    target.validate()?;
    if target.pieces.iter().all(|p| p.samples(grid_res).is_empty()) {
        return certify(target, Polynomial::zero(), 0, grid_res);
    }
    let mut schedule = vec![];
    let mut d = START_DEGREE.min(max_degree);
    while d < max_degree {
        schedule.push(d);
        d *= 2;
    }
    schedule.push(max_degree);

    let mut try_monomial = true;
    let mut last = None;
    for degree in schedule {
        let samples = collect_samples(target, grid_res, degree);
        let (poly, monomial_ok) = solve(&samples, degree, try_monomial)?;
        try_monomial = monomial_ok;
        let cand = certify(target, poly, degree, grid_res)?;
        if cand.status != FitStatus::NonConverged {
            return Ok(cand);
        }
        last = Some(cand);
    }
    Ok(last.expect("schedule is nonempty"))
}

fn certify(target: &PiecewiseTarget, poly: Polynomial, degree: usize, grid_res: usize) -> Result<FhcCandidate> {
    let mut certificates = Vec::with_capacity(target.pieces.len());
    for piece in &target.pieces {
        let (mut sup_error, mut worst_ratio) = (0.0f64, 0.0f64);
        for (w, v) in piece_samples(piece, grid_res, degree, 2) {
            let err = (poly.eval(w) - v).norm();
            let err = if err.is_nan() { f64::INFINITY } else { err };
            sup_error = sup_error.max(err);
            worst_ratio = worst_ratio.max(err / piece.envelope.allowed(w));
        }
        let envelope = match piece.envelope {
            Envelope::Uniform { tau } => tau,
            Envelope::Pointwise { .. } => piece.tau(2 * grid_res),
        };
        let pass = worst_ratio * GRID_SLACK < 1.0;
        certificates.push(PieceCertificate { sup_error, envelope, worst_ratio, fine_sup_error: f64::NAN, pass });
    }
    let converged = certificates.iter().all(|c| c.pass);
    let mut status = if converged { FitStatus::Pass } else { FitStatus::NonConverged };
    if converged {
        for (piece, cert) in target.pieces.iter().zip(certificates.iter_mut()) {
            cert.fine_sup_error =
                piece_samples(piece, grid_res, degree, 4).iter().map(|(w, v)| (poly.eval(*w) - v).norm()).fold(0.0, f64::max);
            let honest = cert.fine_sup_error < 2.0 * cert.sup_error.max(f64::MIN_POSITIVE)
                || cert.fine_sup_error * GRID_SLACK < cert.envelope * 1e-6;
            if !honest {
                cert.pass = false;
                status = FitStatus::Dishonest;
            }
        }
    }
    Ok(FhcCandidate { poly, degree, certificates, status })
}

/// Weighted least squares. Returns the polynomial and whether the
/// monomial normal equations were usable.
fn solve(s: &Samples, degree: usize, try_monomial: bool) -> Result<(Polynomial, bool)> {
    let disc = smallest_enclosing_disc(&s.points).expect("nonempty samples");
    let center = disc.center;
    let scale = if disc.radius > 0.0 { disc.radius } else { 1.0 };
    if try_monomial {
        if let Some(coefficients) = monomial_normal_equations(s, degree, center, scale) {
            return Ok((Polynomial { basis: Basis::Monomial { center, scale }, coefficients }, true));
        }
    }
    Ok((arnoldi_fit(s, degree, center, scale)?, false))
}

fn monomial_normal_equations(s: &Samples, degree: usize, center: Complex, scale: f64) -> Option<Vec<Complex>> {
    let m = s.points.len();
    let k = degree + 1;
    let a = DMatrix::<Complex>::from_fn(m, k, |i, j| s.weights[i] * ((s.points[i] - center) / scale).powu(j as u32));
    let b = DVector::<Complex>::from_fn(m, |i, _| s.weights[i] * s.values[i]);
    let gram = a.adjoint() * &a;
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if !(lo > 0.0) || hi / lo > CONDITION_LIMIT {
        return None;
    }
    let rhs = a.adjoint() * b;
    let chol = gram.cholesky()?;
    Some(chol.solve(&rhs).iter().copied().collect())
}

/// Vandermonde with Arnoldi: orthonormalise `1, u, u², …` in the weighted
/// discrete inner product of the samples, then project.
fn arnoldi_fit(s: &Samples, degree: usize, center: Complex, scale: f64) -> Result<Polynomial> {
    let m = s.points.len();
    if m <= degree {
        return Err(Error::IllConditioned { degree, detail: format!("{m} sample points for degree {degree}") });
    }
    let u: Vec<Complex> = s.points.iter().map(|z| (z - center) / scale).collect();
    let w2: Vec<f64> = s.weights.iter().map(|w| w * w).collect();
    let inner = |a: &[Complex], b: &[Complex]| -> Complex {
        a.iter().zip(b).zip(&w2).map(|((x, y), w)| y.conj() * x * *w).sum()
    };
    let norm0 = w2.iter().sum::<f64>().sqrt();
    let q0 = 1.0 / norm0;
    let mut q: Vec<Vec<Complex>> = vec![vec![Complex::new(q0, 0.0); m]];
    let mut hessenberg: Vec<Vec<Complex>> = Vec::with_capacity(degree);
    for k in 0..degree {
        let mut v: Vec<Complex> = q[k].iter().zip(&u).map(|(a, b)| a * b).collect();
        let mut h = vec![Complex::new(0.0, 0.0); k + 2];
        for _pass in 0..2 {
            for j in 0..=k {
                let c = inner(&v, &q[j]);
                h[j] += c;
                for (vi, qj) in v.iter_mut().zip(&q[j]) {
                    *vi -= c * qj;
                }
            }
        }
        let nv = inner(&v, &v).re.sqrt();
        if !(nv > 1e-13) {
            return Err(Error::IllConditioned { degree, detail: format!("Arnoldi breakdown at step {k}") });
        }
        h[k + 1] = Complex::new(nv, 0.0);
        q.push(v.into_iter().map(|x| x / nv).collect());
        hessenberg.push(h);
    }
    let coefficients = q.iter().map(|qk| inner(&s.values, qk)).collect();
    Ok(Polynomial { basis: Basis::Orthogonal { center, scale, q0, hessenberg }, coefficients })
}
