//! Gate generators and the spin-chain Hamiltonian built from them.
//!
//! Two normalizations are provided for the NOT and CN generators. The
//! `PaperLiteral` forms are `½(σz + σx)` and `½(1 − σz^c)(σx^t − 1)`; they do
//! not exponentiate to the gates. The `Verified` forms `½(1 − σx)` and
//! `¼(1 − σz^c)(1 − σx^t)` are projectors and satisfy `exp(iπG) = U` exactly.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator::{Operator, C64};
use crate::qstate::{self, DENSE_MATRIX_QUBITS};
use crate::quantize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorVariant {
    PaperLiteral,
    Verified,
}

impl FromStr for GeneratorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(GeneratorVariant::PaperLiteral),
            "verified" => Ok(GeneratorVariant::Verified),
            other => Err(Error::Invalid(format!("unknown generator variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Z => 'Z',
        }
    }
}

fn pauli_i() -> Operator {
    Operator::identity(2)
}

fn pauli_x() -> Operator {
    Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn pauli_z() -> Operator {
    Operator::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Hermitian generator of the NOT gate.
pub fn generator_not(variant: GeneratorVariant) -> Operator {
    match variant {
        GeneratorVariant::PaperLiteral => pauli_z().add(&pauli_x()).scale(real(0.5)),
        GeneratorVariant::Verified => pauli_i().sub(&pauli_x()).scale(real(0.5)),
    }
}

/// Hermitian generator of the CN gate on two qubits ordered by index.
///
/// With `control_before_target` the control is the first (more significant)
/// qubit. Otherwise the target comes first; the literal form then follows
/// the printed mirrored formula, which puts `σz` on the first qubit and
/// `σx` on the second.
pub fn generator_cn(variant: GeneratorVariant, control_before_target: bool) -> Operator {
    let one_minus_z = pauli_i().sub(&pauli_z());
    match variant {
        GeneratorVariant::PaperLiteral => one_minus_z
            .kron(&pauli_x().sub(&pauli_i()))
            .scale(real(0.5)),
        GeneratorVariant::Verified => {
            let one_minus_x = pauli_i().sub(&pauli_x());
            let g = if control_before_target {
                one_minus_z.kron(&one_minus_x)
            } else {
                one_minus_x.kron(&one_minus_z)
            };
            g.scale(real(0.25))
        }
    }
}

/// The CN unitary on two qubits ordered by index.
pub fn cn_matrix(control_before_target: bool) -> Operator {
    let p0 = Operator::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let p1 = Operator::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
    if control_before_target {
        p0.kron(&pauli_i()).add(&p1.kron(&pauli_x()))
    } else {
        pauli_i().kron(&p0).add(&pauli_x().kron(&p1))
    }
}

pub fn not_matrix() -> Operator {
    pauli_x()
}

/// `coefficient · ⊗ factors`, identity on unlisted sites. Sites are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub factors: BTreeMap<usize, Pauli>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, factors: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        PauliTerm {
            coefficient,
            factors: factors.into_iter().collect(),
        }
    }

    pub fn identity(coefficient: f64) -> Self {
        PauliTerm::new(coefficient, [])
    }

    pub fn sites(&self) -> Vec<usize> {
        self.factors.keys().copied().collect()
    }

    /// Distance between the outermost sites acted on.
    pub fn span(&self) -> usize {
        match (self.factors.keys().next(), self.factors.keys().next_back()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    pub fn shifted(&self, k: usize) -> PauliTerm {
        PauliTerm {
            coefficient: self.coefficient,
            factors: self.factors.iter().map(|(&s, &p)| (s + k, p)).collect(),
        }
    }

    fn label(&self) -> String {
        self.factors
            .iter()
            .map(|(s, p)| format!("{}:{}", s + 1, p.symbol()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn sort_key(&self) -> (Vec<usize>, String) {
        (self.sites(), self.factors.values().map(|p| p.symbol()).collect())
    }
}

impl fmt::Display for PauliTerm {
    /// `coeff site:op ..`, 1-based sites.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        if !self.factors.is_empty() {
            write!(f, " {}", self.label())?;
        }
        Ok(())
    }
}

/// A sum of Pauli terms on a chain of `n_sites` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSum {
    pub n_sites: usize,
    pub radius: usize,
    pub terms: Vec<PauliTerm>,
}

impl HamiltonianSum {
    /// Like terms merged, zero terms dropped, sorted by site tuple and then
    /// operator string.
    pub fn simplified(&self) -> HamiltonianSum {
        let mut merged: BTreeMap<(Vec<usize>, String), PauliTerm> = BTreeMap::new();
        for t in &self.terms {
            merged
                .entry(t.sort_key())
                .and_modify(|m| m.coefficient += t.coefficient)
                .or_insert_with(|| t.clone());
        }
        HamiltonianSum {
            n_sites: self.n_sites,
            radius: self.radius,
            terms: merged
                .into_values()
                .filter(|t| t.coefficient != 0.0)
                .collect(),
        }
    }

    /// Largest [`PauliTerm::span`] over all terms.
    pub fn max_span(&self) -> usize {
        self.terms.iter().map(PauliTerm::span).max().unwrap_or(0)
    }

    /// One simplified term per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.simplified().terms {
            writeln!(out, "{t}").unwrap();
        }
        out
    }
}

fn not_terms(site: usize, variant: GeneratorVariant) -> Vec<PauliTerm> {
    match variant {
        GeneratorVariant::PaperLiteral => vec![
            PauliTerm::new(0.5, [(site, Pauli::X)]),
            PauliTerm::new(0.5, [(site, Pauli::Z)]),
        ],
        GeneratorVariant::Verified => vec![
            PauliTerm::identity(0.5),
            PauliTerm::new(-0.5, [(site, Pauli::X)]),
        ],
    }
}

fn cn_terms(control: usize, target: usize, variant: GeneratorVariant) -> Vec<PauliTerm> {
    let zx = [(control, Pauli::Z), (target, Pauli::X)];
    match variant {
        // ½(1 − Zc)(Xt − 1)
        GeneratorVariant::PaperLiteral => vec![
            PauliTerm::new(0.5, [(target, Pauli::X)]),
            PauliTerm::identity(-0.5),
            PauliTerm::new(-0.5, zx),
            PauliTerm::new(0.5, [(control, Pauli::Z)]),
        ],
        // ¼(1 − Zc)(1 − Xt)
        GeneratorVariant::Verified => vec![
            PauliTerm::identity(0.25),
            PauliTerm::new(-0.25, [(target, Pauli::X)]),
            PauliTerm::new(-0.25, [(control, Pauli::Z)]),
            PauliTerm::new(0.25, zx),
        ],
    }
}

/// `H_N^i + Σ_k (H_CN^{i+k,i} + H_CN^{i−k,i})` with out-of-chain neighbours
/// dropped. `site` is 0-based.
pub fn build_site_hamiltonian(
    site: usize,
    radius: usize,
    n_sites: usize,
    variant: GeneratorVariant,
) -> Result<HamiltonianSum> {
    if radius == 0 {
        return Err(Error::ZeroRadius);
    }
    if site >= n_sites {
        return Err(Error::QubitOutOfRange {
            qubit: site,
            n_qubits: n_sites,
        });
    }
    let mut terms = not_terms(site, variant);
    for k in 1..=radius {
        if site + k < n_sites {
            terms.extend(cn_terms(site + k, site, variant));
        }
        if site >= k {
            terms.extend(cn_terms(site - k, site, variant));
        }
    }
    Ok(HamiltonianSum {
        n_sites,
        radius,
        terms,
    })
}

/// Sum of the site Hamiltonians over the whole chain (free boundaries).
pub fn build_chain_hamiltonian(
    n_sites: usize,
    radius: usize,
    variant: GeneratorVariant,
) -> Result<HamiltonianSum> {
    if n_sites == 0 {
        return Err(Error::Invalid("chain needs at least one site".into()));
    }
    let mut terms = Vec::new();
    for site in 0..n_sites {
        terms.extend(build_site_hamiltonian(site, radius, n_sites, variant)?.terms);
    }
    Ok(HamiltonianSum {
        n_sites,
        radius,
        terms,
    })
}

/// Dense `2^n × 2^n` matrix of `h`.
pub fn to_dense(h: &HamiltonianSum) -> Result<Operator> {
    let n = h.n_sites;
    if n > DENSE_MATRIX_QUBITS {
        return Err(Error::DimensionTooLarge {
            n_qubits: n,
            limit: DENSE_MATRIX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for t in &h.terms {
        let (mut xmask, mut zmask) = (0usize, 0usize);
        for (&site, &p) in &t.factors {
            if site >= n {
                return Err(Error::QubitOutOfRange {
                    qubit: site,
                    n_qubits: n,
                });
            }
            let bit = 1 << (n - 1 - site);
            match p {
                Pauli::X => xmask |= bit,
                Pauli::Z => zmask |= bit,
            }
        }
        for col in 0..dim {
            let sign = if (col & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(col ^ xmask, col)] += real(sign * t.coefficient);
        }
    }
    Operator::from_matrix(m)
}

/// `exp(i · scale · h)` for Hermitian `h`, through its eigendecomposition.
pub fn matrix_exp_hermitian(h: &Operator, scale: f64) -> Result<Operator> {
    let residual = h.hermiticity_residual();
    if residual > 1e-10 {
        return Err(Error::NotHermitian(residual));
    }
    let sym = (h.matrix() + h.matrix().adjoint()) * real(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, scale * l)),
    );
    let v = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * phases[j]);
    Operator::from_matrix(scaled * v.adjoint())
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues_hermitian(h: &Operator) -> Result<Vec<f64>> {
    let residual = h.hermiticity_residual();
    if residual > 1e-10 {
        return Err(Error::NotHermitian(residual));
    }
    let sym = (h.matrix() + h.matrix().adjoint()) * real(0.5);
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// How far the exponentials of the generators are from the gates they are
/// meant to produce.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorReport {
    pub not_distance: f64,
    pub cn_distance: f64,
    /// `‖exp(iπ G_CN) − I‖_max`.
    pub cn_identity_distance: f64,
}

pub fn check_generators(variant: GeneratorVariant) -> Result<GeneratorReport> {
    let en = matrix_exp_hermitian(&generator_not(variant), PI)?;
    let ec = matrix_exp_hermitian(&generator_cn(variant, true), PI)?;
    Ok(GeneratorReport {
        not_distance: en.max_abs_diff(&not_matrix()),
        cn_distance: ec.max_abs_diff(&cn_matrix(true)),
        cn_identity_distance: ec.max_abs_diff(&Operator::identity(4)),
    })
}

/// Largest chain for [`generation_gap`].
pub const GENERATION_GAP_SITES: usize = 8;

/// Comparison of the chain Hamiltonian's exponential with the per-site
/// exponentials and the gate-level step.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    pub n_sites: usize,
    pub radius: usize,
    /// `‖exp(iπ Σ_i H_i) − Π_i exp(iπ H_i)‖_max`, site 0 applied first.
    pub chain_gap: f64,
    /// Largest `‖exp(iπ H_i) − U_i‖_max` over sites, `U_i` the site circuit.
    pub site_gap: f64,
    /// `‖Π_i exp(iπ H_i) − total step circuit‖_max`.
    pub product_vs_circuit: f64,
}

pub fn generation_gap(
    n_sites: usize,
    radius: usize,
    variant: GeneratorVariant,
) -> Result<GenerationReport> {
    if n_sites > GENERATION_GAP_SITES {
        return Err(Error::DimensionTooLarge {
            n_qubits: n_sites,
            limit: GENERATION_GAP_SITES,
        });
    }
    let dim = 1usize << n_sites;
    let chain = to_dense(&build_chain_hamiltonian(n_sites, radius, variant)?)?;
    let chain_exp = matrix_exp_hermitian(&chain, PI)?;
    let mut product = Operator::identity(dim);
    let mut site_gap: f64 = 0.0;
    for site in 0..n_sites {
        let h = to_dense(&build_site_hamiltonian(site, radius, n_sites, variant)?)?;
        let e = matrix_exp_hermitian(&h, PI)?;
        let gate = qstate::circuit_matrix(&quantize::build_uf_circuit(radius, site, n_sites)?)?;
        site_gap = site_gap.max(e.max_abs_diff(&gate));
        product = e.mul(&product);
    }
    let circuit = qstate::circuit_matrix(&quantize::total_step_circuit(radius, n_sites)?)?;
    Ok(GenerationReport {
        n_sites,
        radius,
        chain_gap: chain_exp.max_abs_diff(&product),
        site_gap,
        product_vs_circuit: product.max_abs_diff(&circuit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::ONE;

    #[test]
    fn generators_are_hermitian() {
        for v in [GeneratorVariant::PaperLiteral, GeneratorVariant::Verified] {
            assert_eq!(generator_not(v).hermiticity_residual(), 0.0);
            assert_eq!(generator_cn(v, true).hermiticity_residual(), 0.0);
            assert_eq!(generator_cn(v, false).hermiticity_residual(), 0.0);
        }
    }

    #[test]
    fn verified_cn_generator_is_rank_one_projector() {
        for order in [true, false] {
            let g = generator_cn(GeneratorVariant::Verified, order);
            assert_eq!(g.mul(&g), g);
            assert_eq!(g.trace(), ONE);
        }
    }

    #[test]
    fn exp_of_zero_scale_is_identity() {
        let g = generator_cn(GeneratorVariant::PaperLiteral, true);
        let e = matrix_exp_hermitian(&g, 0.0).unwrap();
        assert!(e.max_abs_diff(&Operator::identity(4)) < 1e-14);
    }

    #[test]
    fn exp_rejects_non_hermitian() {
        let m = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(matrix_exp_hermitian(&m, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn mirrored_cn_matrix() {
        // target first: |1 1> (target 1, control 1) -> |0 1>
        let m = cn_matrix(false);
        assert_eq!(m.get(1, 3), ONE);
        assert_eq!(m.get(0, 0), ONE);
        let e = matrix_exp_hermitian(&generator_cn(GeneratorVariant::Verified, false), PI).unwrap();
        assert!(e.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn single_site_chain() {
        let h = build_chain_hamiltonian(1, 2, GeneratorVariant::PaperLiteral).unwrap();
        let m = to_dense(&h).unwrap();
        assert_eq!(m, generator_not(GeneratorVariant::PaperLiteral));
        let ev = eigenvalues_hermitian(&m).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((ev[0] + s).abs() < 1e-14 && (ev[1] - s).abs() < 1e-14);
    }

    #[test]
    fn site_terms_and_truncation() {
        let v = GeneratorVariant::PaperLiteral;
        let h = build_site_hamiltonian(4, 2, 9, v).unwrap();
        assert_eq!(h.terms.len(), 2 + 4 * 4);
        let controls: std::collections::BTreeSet<usize> = h
            .terms
            .iter()
            .filter(|t| t.factors.len() == 2)
            .flat_map(|t| t.sites())
            .filter(|&s| s != 4)
            .collect();
        assert_eq!(controls.into_iter().collect::<Vec<_>>(), vec![2, 3, 5, 6]);
        assert!(h.terms.iter().all(|t| t.sites().iter().all(|&s| (2..=6).contains(&s))));

        let left = build_site_hamiltonian(0, 2, 9, v).unwrap();
        assert!(left.terms.iter().flat_map(|t| t.sites()).all(|s| s <= 2));
        assert_eq!(left.terms.len(), 2 + 2 * 4);
    }

    #[test]
    fn dense_assembly() {
        let empty = HamiltonianSum { n_sites: 2, radius: 1, terms: vec![] };
        assert_eq!(to_dense(&empty).unwrap(), Operator::zeros(4));
        let x1 = HamiltonianSum {
            n_sites: 2,
            radius: 1,
            terms: vec![PauliTerm::new(1.0, [(0, Pauli::X)])],
        };
        assert_eq!(to_dense(&x1).unwrap(), pauli_x().kron(&pauli_i()));
        let zx = HamiltonianSum {
            n_sites: 2,
            radius: 1,
            terms: vec![PauliTerm::new(-0.25, [(0, Pauli::Z), (1, Pauli::X)])],
        };
        assert_eq!(
            to_dense(&zx).unwrap(),
            pauli_z().kron(&pauli_x()).scale(real(-0.25))
        );
    }

    #[test]
    fn text_export_is_sorted_and_merged() {
        let h = HamiltonianSum {
            n_sites: 3,
            radius: 1,
            terms: vec![
                PauliTerm::new(-0.25, [(1, Pauli::Z), (2, Pauli::X)]),
                PauliTerm::new(0.5, [(2, Pauli::X)]),
                PauliTerm::new(0.25, [(2, Pauli::X)]),
                PauliTerm::identity(1.0),
                PauliTerm::identity(-1.0),
            ],
        };
        assert_eq!(h.to_text(), "-0.25 2:Z 3:X\n0.75 3:X\n");
    }

    #[test]
    fn phase_insensitive_literal_not() {
        // the literal NOT generator is not X even up to a global phase
        let e = matrix_exp_hermitian(&generator_not(GeneratorVariant::PaperLiteral), PI).unwrap();
        assert!(crate::operator::distance_up_to_phase(&e, &not_matrix()) > 0.1);
    }
}
