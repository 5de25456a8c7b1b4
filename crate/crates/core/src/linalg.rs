// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra over small labelled tensor-product spaces.
//!
//! Every vector and operator carries the [`HilbertSpace`] it lives on, an
//! ordered list of labelled factors. Composite indices are row-major in that
//! order, so `x ⊗ y` has index `ix * dim(y) + iy`, matching the Kronecker
//! product.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Label of an elementary subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    /// Measured system.
    S,
    /// Friend's memory.
    F,
    /// Wigner's memory.
    W,
    /// Memory of the first apparatus in a plain two-measurement setup.
    M,
    /// Memory of the second apparatus.
    N,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::S => "S",
            Label::F => "F",
            Label::W => "W",
            Label::M => "M",
            Label::N => "N",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: Label,
    pub dim: usize,
}

/// Ordered tensor product of labelled factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    factors: Vec<Subsystem>,
}

impl HilbertSpace {
    pub fn elementary(label: Label, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch(format!("factor {label} has dimension 0")));
        }
        Ok(Self { factors: vec![Subsystem { label, dim }] })
    }

    /// Builds a composite space from `(label, dim)` pairs in the given order.
    pub fn composite(factors: &[(Label, usize)]) -> Result<Self> {
        let mut space: Option<HilbertSpace> = None;
        for &(label, dim) in factors {
            let next = HilbertSpace::elementary(label, dim)?;
            space = Some(match space {
                None => next,
                Some(s) => s.tensor(&next)?,
            });
        }
        space.ok_or_else(|| Error::DimensionMismatch("empty factor list".into()))
    }

    pub fn factors(&self) -> &[Subsystem] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn is_composite(&self) -> bool {
        self.factors.len() > 1
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    pub fn factor_dim(&self, label: Label) -> Option<usize> {
        self.factors.iter().find(|f| f.label == label).map(|f| f.dim)
    }

    pub fn tensor(&self, other: &HilbertSpace) -> Result<HilbertSpace> {
        for f in &other.factors {
            if self.position(f.label).is_some() {
                return Err(Error::FactorMismatch(format!("factor {} appears twice", f.label)));
            }
        }
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Ok(HilbertSpace { factors })
    }

    /// Splits a flat index into per-factor digits.
    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = index % f.dim;
            index /= f.dim;
        }
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|s| format!("{}({})", s.label, s.dim)).collect();
        f.write_str(&parts.join("⊗"))
    }
}

fn check_finite<'a>(values: impl IntoIterator<Item = &'a C64>) -> Result<()> {
    if values.into_iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Largest entry modulus of a matrix, the ∞-norm used for all operator identities.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for space {} of dimension {}",
                amps.len(),
                space,
                space.dim()
            )));
        }
        check_finite(&amps)?;
        Ok(Self { space, amps: DVector::from_vec(amps) })
    }

    pub(crate) fn from_raw(space: HilbertSpace, amps: DVector<C64>) -> Self {
        debug_assert_eq!(space.dim(), amps.len());
        Self { space, amps }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(space: &HilbertSpace, index: usize) -> Result<Self> {
        let dim = space.dim();
        if index >= dim {
            return Err(Error::DimensionMismatch(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = ONE;
        Ok(Self { space: space.clone(), amps })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { space: self.space.clone(), amps: self.amps.unscale(n) })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { space: self.space.clone(), amps: self.amps.map(|a| a * z) }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.same_space(other.space())?;
        Ok(Self { space: self.space.clone(), amps: &self.amps + &other.amps })
    }

    pub fn sub(&self, other: &StateVector) -> Result<Self> {
        self.same_space(other.space())?;
        Ok(Self { space: self.space.clone(), amps: &self.amps - &other.amps })
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.same_space(other.space())?;
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let space = self.space.tensor(&other.space)?;
        Ok(Self { space, amps: self.amps.kronecker(&other.amps) })
    }

    /// Rank-one operator `|self⟩⟨self|`.
    pub fn projector(&self) -> LinearOperator {
        LinearOperator { space: self.space.clone(), matrix: &self.amps * self.amps.adjoint() }
    }

    /// Largest amplitude difference; spaces must agree.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.same_space(other.space())?;
        Ok(self.amps.iter().zip(other.amps.iter()).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm())))
    }

    fn same_space(&self, other: &HilbertSpace) -> Result<()> {
        if &self.space != other {
            return Err(Error::FactorMismatch(format!("{} vs {}", self.space, other)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    space: HilbertSpace,
    matrix: DMatrix<C64>,
}

impl LinearOperator {
    pub fn new(space: HilbertSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for space {} of dimension {d}",
                matrix.nrows(),
                matrix.ncols(),
                space
            )));
        }
        check_finite(matrix.iter())?;
        Ok(Self { space, matrix })
    }

    /// Row-major constructor, convenient for small hand-written operators.
    pub fn from_rows(space: HilbertSpace, rows: &[C64]) -> Result<Self> {
        let d = space.dim();
        if rows.len() != d * d {
            return Err(Error::DimensionMismatch(format!("{} entries for a {d}x{d} operator", rows.len())));
        }
        Self::new(space, DMatrix::from_row_slice(d, d, rows))
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), matrix: DMatrix::identity(d, d) }
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), matrix: DMatrix::zeros(d, d) }
    }

    /// `|i⟩⟨j|` in the computational basis.
    pub fn ket_bra(space: &HilbertSpace, i: usize, j: usize) -> Result<Self> {
        let d = space.dim();
        if i >= d || j >= d {
            return Err(Error::DimensionMismatch(format!("index ({i},{j}) out of range for dimension {d}")));
        }
        let mut m = DMatrix::zeros(d, d);
        m[(i, j)] = ONE;
        Ok(Self { space: space.clone(), matrix: m })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    /// Operator product `self · other`.
    pub fn matmul(&self, other: &LinearOperator) -> Result<Self> {
        self.same_space(&other.space)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn add(&self, other: &LinearOperator) -> Result<Self> {
        self.same_space(&other.space)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &LinearOperator) -> Result<Self> {
        self.same_space(&other.space)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.map(|a| a * z) }
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &LinearOperator) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.same_space(v.space())?;
        Ok(StateVector::from_raw(self.space.clone(), &self.matrix * v.amps()))
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expval(&self, psi: &StateVector) -> Result<C64> {
        psi.inner(&self.apply(psi)?)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn tensor(&self, other: &LinearOperator) -> Result<Self> {
        let space = self.space.tensor(&other.space)?;
        Ok(Self { space, matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// Extends `self` by the identity on every factor of `target` it does not act
    /// on, permuting indices into `target`'s factor order.
    pub fn embed(&self, target: &HilbertSpace) -> Result<Self> {
        if &self.space == target {
            return Ok(self.clone());
        }
        // Position in `target` of each of our factors.
        let mut slots = Vec::with_capacity(self.space.factors.len());
        for f in &self.space.factors {
            match target.position(f.label) {
                Some(k) if target.factors[k].dim == f.dim => slots.push(k),
                Some(k) => {
                    return Err(Error::FactorMismatch(format!(
                        "factor {} has dimension {} here but {} in {}",
                        f.label, f.dim, target.factors[k].dim, target
                    )))
                }
                None => return Err(Error::FactorMismatch(format!("factor {} not in {}", f.label, target))),
            }
        }
        let nt = target.factors.len();
        let own: Vec<bool> = (0..nt).map(|k| slots.contains(&k)).collect();
        let d = target.dim();
        let mut row_digits = vec![0; nt];
        let mut col_digits = vec![0; nt];
        let sub_index = |digits: &[usize]| {
            slots.iter().zip(&self.space.factors).fold(0, |acc, (&k, f)| acc * f.dim + digits[k])
        };
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            target.digits(i, &mut row_digits);
            let si = sub_index(&row_digits);
            for j in 0..d {
                target.digits(j, &mut col_digits);
                let spectators_match = (0..nt).all(|k| own[k] || row_digits[k] == col_digits[k]);
                if spectators_match {
                    m[(i, j)] = self.matrix[(si, sub_index(&col_digits))];
                }
            }
        }
        Ok(Self { space: target.clone(), matrix: m })
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `max(‖P²−P‖∞, ‖P−P†‖∞)`.
    pub fn projector_residual(&self) -> f64 {
        let sq = &self.matrix * &self.matrix;
        max_abs(&(sq - &self.matrix)).max(self.hermiticity_residual())
    }

    /// `‖U†U−1‖∞`.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(d, d)))
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.projector_residual() < tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() < tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() < tol
    }

    pub fn ensure_projector(&self, tol: f64) -> Result<()> {
        let r = self.projector_residual();
        if r < tol {
            Ok(())
        } else {
            Err(Error::NotProjector(r))
        }
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let r = self.unitarity_residual();
        if r < tol {
            Ok(())
        } else {
            Err(Error::NotUnitary(r))
        }
    }

    pub fn max_abs_diff(&self, other: &LinearOperator) -> Result<f64> {
        self.same_space(&other.space)?;
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    /// `exp(−i·self·t)` for Hermitian `self`, via eigendecomposition.
    pub fn evolve(&self, t: f64) -> Result<LinearOperator> {
        let r = self.hermiticity_residual();
        if r >= crate::tol::OPERATOR {
            return Err(Error::NotHermitian(r));
        }
        if t == 0.0 {
            return Ok(LinearOperator::identity(&self.space));
        }
        // Symmetrize so the solver sees an exactly Hermitian input.
        let h = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        let eig = h.symmetric_eigen();
        let phases = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l * t)));
        let v = &eig.eigenvectors;
        let m = v * DMatrix::from_diagonal(&phases) * v.adjoint();
        Ok(Self { space: self.space.clone(), matrix: m })
    }

    fn same_space(&self, other: &HilbertSpace) -> Result<()> {
        if &self.space != other {
            return Err(Error::FactorMismatch(format!("{} vs {}", self.space, other)));
        }
        Ok(())
    }
}

/// Reduced density operator of `state` on the single factor `keep`.
pub fn reduced_state(state: &StateVector, keep: Label) -> Result<LinearOperator> {
    let space = state.space();
    let k = space.position(keep).ok_or_else(|| Error::FactorMismatch(format!("factor {keep} not in {space}")))?;
    let dk = space.factors[k].dim;
    let n = space.factors.len();
    let mut rho = DMatrix::<C64>::zeros(dk, dk);
    let mut di = vec![0; n];
    let mut dj = vec![0; n];
    let amps = state.amps();
    for i in 0..space.dim() {
        space.digits(i, &mut di);
        for j in 0..space.dim() {
            space.digits(j, &mut dj);
            if (0..n).all(|m| m == k || di[m] == dj[m]) {
                rho[(di[k], dj[k])] += amps[i] * amps[j].conj();
            }
        }
    }
    LinearOperator::new(HilbertSpace::elementary(keep, dk)?, rho)
}

/// `½‖ρ − σ‖₁` for Hermitian operators.
pub fn trace_distance(rho: &LinearOperator, sigma: &LinearOperator) -> Result<f64> {
    rho.same_space(&sigma.space)?;
    let diff = &rho.matrix - &sigma.matrix;
    let h = (&diff + diff.adjoint()).scale(0.5);
    Ok(0.5 * h.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn qubit(label: Label) -> HilbertSpace {
        HilbertSpace::elementary(label, 2).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = qubit(Label::S);
        let f = qubit(Label::F);
        let v = StateVector::basis(&s, 0).unwrap().tensor(&StateVector::basis(&f, 0).unwrap()).unwrap();
        assert_eq!(v.dim(), 4);
        assert_eq!(v.amps()[0], ONE);
        assert!(v.amps().iter().skip(1).all(|z| *z == ZERO));
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let s = qubit(Label::S);
        let f = HilbertSpace::elementary(Label::F, 3).unwrap();
        let id = LinearOperator::identity(&s).tensor(&LinearOperator::identity(&f)).unwrap();
        let sf = s.tensor(&f).unwrap();
        assert_eq!(id.max_abs_diff(&LinearOperator::identity(&sf)).unwrap(), 0.0);
    }

    #[test]
    fn tensor_rejects_repeated_factor() {
        let s = qubit(Label::S);
        assert!(s.tensor(&s).is_err());
    }

    #[test]
    fn projector_product_on_product_state() {
        // (Π_↑ ⊗ |R⟩⟨R|)(a|↑⟩|R⟩ + b|↓⟩|R⟩) = a|↑⟩|R⟩
        let s = qubit(Label::S);
        let f = HilbertSpace::elementary(Label::F, 3).unwrap();
        let (a, b) = (0.6, 0.8);
        let up = StateVector::basis(&s, 0).unwrap();
        let down = StateVector::basis(&s, 1).unwrap();
        let ready = StateVector::basis(&f, 0).unwrap();
        let psi = up.scale(c(a)).add(&down.scale(c(b))).unwrap().tensor(&ready).unwrap();
        let op = up.projector().tensor(&ready.projector()).unwrap();
        let out = op.apply(&psi).unwrap();
        let expect = up.scale(c(a)).tensor(&ready).unwrap();
        assert!(out.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn embed_single_factor() {
        let sfw = HilbertSpace::composite(&[(Label::S, 2), (Label::F, 3), (Label::W, 3)]).unwrap();
        let s = qubit(Label::S);
        let up = StateVector::basis(&s, 0).unwrap().projector();
        let embedded = up.embed(&sfw).unwrap();
        let f = HilbertSpace::elementary(Label::F, 3).unwrap();
        let w = HilbertSpace::elementary(Label::W, 3).unwrap();
        let direct = up
            .tensor(&LinearOperator::identity(&f))
            .unwrap()
            .tensor(&LinearOperator::identity(&w))
            .unwrap();
        assert_eq!(embedded.max_abs_diff(&direct).unwrap(), 0.0);
        let id = LinearOperator::identity(&s).embed(&sfw).unwrap();
        assert_eq!(id.max_abs_diff(&LinearOperator::identity(&sfw)).unwrap(), 0.0);
    }

    #[test]
    fn embed_permutes_factor_order() {
        // An operator on W⊗S embedded into S⊗F⊗W must act like its factor-swapped version.
        let w = HilbertSpace::elementary(Label::W, 3).unwrap();
        let s = qubit(Label::S);
        let f = HilbertSpace::elementary(Label::F, 3).unwrap();
        let sfw = HilbertSpace::composite(&[(Label::S, 2), (Label::F, 3), (Label::W, 3)]).unwrap();
        let a = LinearOperator::ket_bra(&w, 1, 0).unwrap();
        let b = LinearOperator::ket_bra(&s, 0, 1).unwrap();
        let ws = a.tensor(&b).unwrap();
        let expect = b.tensor(&LinearOperator::identity(&f)).unwrap().tensor(&a).unwrap();
        assert_eq!(ws.embed(&sfw).unwrap().max_abs_diff(&expect).unwrap(), 0.0);
    }

    #[test]
    fn embed_entangled_projector_keeps_ready_state() {
        let sf = HilbertSpace::composite(&[(Label::S, 2), (Label::F, 3)]).unwrap();
        let sfw = HilbertSpace::composite(&[(Label::S, 2), (Label::F, 3), (Label::W, 3)]).unwrap();
        let w = HilbertSpace::elementary(Label::W, 3).unwrap();
        let (alpha, beta) = (0.6, 0.8);
        let yes = StateVector::basis(&sf, 1)
            .unwrap()
            .scale(c(alpha))
            .add(&StateVector::basis(&sf, 5).unwrap().scale(c(beta)))
            .unwrap();
        let psi = yes.tensor(&StateVector::basis(&w, 0).unwrap()).unwrap();
        let out = yes.projector().embed(&sfw).unwrap().apply(&psi).unwrap();
        assert!(out.max_abs_diff(&psi).unwrap() < 1e-15);
    }

    #[test]
    fn embed_rejects_foreign_factor() {
        let sf = HilbertSpace::composite(&[(Label::S, 2), (Label::F, 3)]).unwrap();
        let n = HilbertSpace::elementary(Label::N, 3).unwrap();
        assert!(LinearOperator::identity(&n).embed(&sf).is_err());
        let f2 = HilbertSpace::elementary(Label::F, 2).unwrap();
        assert!(LinearOperator::identity(&f2).embed(&sf).is_err());
    }

    #[test]
    fn expval_and_inner() {
        let s = qubit(Label::S);
        let zero = StateVector::basis(&s, 0).unwrap();
        let one = StateVector::basis(&s, 1).unwrap();
        assert_eq!(zero.projector().expval(&zero).unwrap(), ONE);
        assert_eq!(zero.inner(&one).unwrap(), ZERO);
        let plus = zero.add(&one).unwrap().normalized().unwrap();
        assert!((zero.projector().expval(&plus).unwrap() - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn evolve_matches_closed_form() {
        // exp(−iσx t) = cos t − i sin t σx
        let s = qubit(Label::S);
        let sx = LinearOperator::from_rows(s.clone(), &[ZERO, ONE, ONE, ZERO]).unwrap();
        let t = 0.37;
        let u = sx.evolve(t).unwrap();
        let (co, si) = (t.cos(), t.sin());
        let expect = LinearOperator::from_rows(s, &[c(co), C64::new(0.0, -si), C64::new(0.0, -si), c(co)]).unwrap();
        assert!(u.max_abs_diff(&expect).unwrap() < 1e-14);
        assert!(u.is_unitary(1e-12));
    }

    #[test]
    fn evolve_rejects_non_hermitian() {
        let s = qubit(Label::S);
        let op = LinearOperator::ket_bra(&s, 0, 1).unwrap();
        assert!(matches!(op.evolve(1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let s = qubit(Label::S);
        assert!(matches!(StateVector::new(s.clone(), vec![C64::new(f64::NAN, 0.0), ZERO]), Err(Error::NonFinite)));
        assert!(StateVector::new(s, vec![ONE]).is_err());
    }

    #[test]
    fn reduced_state_of_product_and_bell() {
        let s = HilbertSpace::elementary(Label::S, 2).unwrap();
        let f = HilbertSpace::elementary(Label::F, 3).unwrap();
        let prod = StateVector::basis(&s, 1).unwrap().tensor(&StateVector::basis(&f, 2).unwrap()).unwrap();
        let rf = reduced_state(&prod, Label::F).unwrap();
        assert!(rf.max_abs_diff(&StateVector::basis(&f, 2).unwrap().projector()).unwrap() < 1e-15);
        let sf = s.tensor(&f).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::basis(&sf, 1)
            .unwrap()
            .scale(C64::new(h, 0.0))
            .add(&StateVector::basis(&sf, 5).unwrap().scale(C64::new(h, 0.0)))
            .unwrap();
        let rs = reduced_state(&bell, Label::S).unwrap();
        assert!(rs.max_abs_diff(&LinearOperator::identity(&s).scale(C64::new(0.5, 0.0))).unwrap() < 1e-15);
        let pure = StateVector::basis(&s, 0).unwrap().projector();
        assert!((trace_distance(&rs, &pure).unwrap() - 0.5).abs() < 1e-12);
    }
}
