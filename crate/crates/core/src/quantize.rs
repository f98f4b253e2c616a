//! The transition operator `U_f = Σ_{x ≠ 0} |f(x)⟩⟨x|` on `2r + 1` qubits,
//! its gate factorization and the checks that tie the two together.

use std::fmt::Write as _;

use crate::bits::{self, Bit};
use crate::error::{Error, Result};
use crate::operator::{Operator, SparseOperator, C64, ONE, ZERO};
use crate::qstate::{self, Circuit, GateOp, StateVector};
use crate::sca::{self, Rule};

/// Largest radius accepted by [`build_uf_matrix`] (dimension 8192).
pub const MAX_RADIUS: usize = 6;

/// Largest chain for [`total_step_operator`].
pub const MAX_OPERATOR_SITES: usize = 14;

/// `U_f` stored column by column: column `x` has a single 1 in row `f(x)`,
/// except the null-word column, which is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionOperator {
    rule: Rule,
    images: Vec<Option<usize>>,
    preimage: usize,
}

impl TransitionOperator {
    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn radius(&self) -> usize {
        self.rule.radius()
    }

    pub fn n_qubits(&self) -> usize {
        self.rule.window_len()
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    /// Index of the null word (always 0).
    pub fn null_word(&self) -> usize {
        0
    }

    /// Index of `a_0`, the word sent to the null word; its row is zero.
    pub fn preimage_word(&self) -> usize {
        self.preimage
    }

    /// Row of the 1 in column `col`, if any.
    pub fn image(&self, col: usize) -> Option<usize> {
        self.images[col]
    }

    pub fn nnz(&self) -> usize {
        self.images.iter().flatten().count()
    }

    pub fn to_sparse(&self) -> SparseOperator {
        let entries = self
            .images
            .iter()
            .enumerate()
            .filter_map(|(col, row)| row.map(|r| (r, col, ONE)))
            .collect();
        SparseOperator::new(self.dim(), entries).expect("f is injective")
    }

    pub fn to_dense(&self) -> Result<Operator> {
        if self.n_qubits() > qstate::DENSE_MATRIX_QUBITS {
            return Err(Error::DimensionTooLarge {
                n_qubits: self.n_qubits(),
                limit: qstate::DENSE_MATRIX_QUBITS,
            });
        }
        Ok(self.to_sparse().to_dense())
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), state.dim()));
        }
        let mut out = vec![ZERO; self.dim()];
        for (col, row) in self.images.iter().enumerate() {
            if let Some(r) = row {
                out[*r] += state.amplitude(col);
            }
        }
        StateVector::new(self.n_qubits(), out)
    }
}

fn check_radius(radius: usize) -> Result<Rule> {
    if radius > MAX_RADIUS {
        return Err(Error::RadiusOutOfRange {
            radius,
            max: MAX_RADIUS,
        });
    }
    Rule::new(radius)
}

/// Builds `U_f` for radius `r` in `1..=6`.
pub fn build_uf_matrix(radius: usize) -> Result<TransitionOperator> {
    let rule = check_radius(radius)?;
    let n = rule.window_len();
    let mut images = vec![None; 1 << n];
    for (x, slot) in images.iter_mut().enumerate().skip(1) {
        let y = sca::f_window(rule, &bits::index_to_word(x, n))?;
        *slot = Some(bits::word_to_index(&y));
    }
    Ok(TransitionOperator {
        rule,
        images,
        preimage: bits::word_to_index(&sca::null_preimage(rule)),
    })
}

/// Residuals of the two partial-isometry identities.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryReport {
    /// `‖U U† − (I − |a_0⟩⟨a_0|)‖_max`
    pub range_residual: f64,
    /// `‖U† U − (I − |O⟩⟨O|)‖_max`
    pub domain_residual: f64,
}

impl IsometryReport {
    /// Both identities hold exactly, so `U` is a partial isometry on the
    /// complement of the null word.
    pub fn is_partial_isometry(&self) -> bool {
        self.range_residual == 0.0 && self.domain_residual == 0.0
    }
}

pub fn check_partial_isometry(op: &TransitionOperator) -> IsometryReport {
    check_partial_isometry_sparse(&op.to_sparse(), op.null_word(), op.preimage_word())
}

/// Same check for an arbitrary sparse matrix with the given kernel and
/// co-kernel basis words.
pub fn check_partial_isometry_sparse(
    u: &SparseOperator,
    kernel_word: usize,
    missing_word: usize,
) -> IsometryReport {
    let dim = u.dim();
    let identity_without = |skip: usize| {
        let entries = (0..dim).filter(|&i| i != skip).map(|i| (i, i, ONE)).collect();
        SparseOperator::new(dim, entries).expect("diagonal")
    };
    let ud = u.adjoint();
    IsometryReport {
        range_residual: u.mul(&ud).max_abs_diff(&identity_without(missing_word)),
        domain_residual: ud.mul(u).max_abs_diff(&identity_without(kernel_word)),
    }
}

/// Basis words split by whether `U_f` fixes them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisPartition {
    pub radius: usize,
    /// Words with `f(x) = x`, ascending.
    pub invariant_words: Vec<usize>,
    /// The remaining words: the center-0 member of each center-flip pair in
    /// ascending order, then their partners in reverse. The null word comes
    /// first and `a_0` last.
    pub flipped_words: Vec<usize>,
}

impl BasisPartition {
    /// Invariant words followed by flipped words.
    pub fn order(&self) -> Vec<usize> {
        let mut v = self.invariant_words.clone();
        v.extend_from_slice(&self.flipped_words);
        v
    }
}

pub fn partition_basis(radius: usize) -> Result<BasisPartition> {
    let rule = check_radius(radius)?;
    let n = rule.window_len();
    let center = 1usize << radius;
    let mut invariant_words = Vec::new();
    let mut lower = Vec::new();
    for x in 0..(1usize << n) {
        let fixed = x != 0
            && sca::f_window(rule, &bits::index_to_word(x, n))
                .map(|y| bits::word_to_index(&y) == x)
                .unwrap_or(false);
        if fixed {
            invariant_words.push(x);
        } else if x & center == 0 {
            lower.push(x);
        }
    }
    let mut flipped_words = lower.clone();
    flipped_words.extend(lower.iter().rev().map(|&x| x | center));
    Ok(BasisPartition {
        radius,
        invariant_words,
        flipped_words,
    })
}

/// `Pᵀ U_f P` where `P` lists the basis in partition order.
pub fn represent_blocked(op: &TransitionOperator, partition: &BasisPartition) -> Result<SparseOperator> {
    let order = partition.order();
    if order.len() != op.dim() {
        return Err(Error::DimensionMismatch(op.dim(), order.len()));
    }
    let mut position = vec![usize::MAX; op.dim()];
    for (k, &w) in order.iter().enumerate() {
        if position[w] != usize::MAX {
            return Err(Error::Invalid(format!("word {w} listed twice")));
        }
        position[w] = k;
    }
    let entries = (0..op.dim())
        .filter_map(|col| op.image(col).map(|row| (position[row], position[col], ONE)))
        .collect();
    SparseOperator::new(op.dim(), entries)
}

/// Shape of the blocked matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockForm {
    pub invariant_size: usize,
    pub flipped_size: usize,
    /// Upper-left block is the identity.
    pub identity_block: bool,
    /// Entries `(1,N), (2,N-1), .., (N,1)` of the lower-right block.
    pub antidiagonal: Vec<C64>,
    /// Nonzero entries outside the identity diagonal and the antidiagonal.
    pub stray_entries: usize,
}

impl BlockForm {
    /// `diag(1, σ')` with `σ'` antidiagonal `(1, .., 1, 0)`.
    pub fn is_expected_shape(&self) -> bool {
        let n = self.antidiagonal.len();
        self.identity_block
            && self.stray_entries == 0
            && n > 0
            && self.antidiagonal[..n - 1].iter().all(|&v| v == ONE)
            && self.antidiagonal[n - 1] == ZERO
    }
}

pub fn block_form(blocked: &SparseOperator, partition: &BasisPartition) -> BlockForm {
    let k = partition.invariant_words.len();
    let n = partition.flipped_words.len();
    let identity_block = (0..k).all(|i| {
        (0..k).all(|j| blocked.get(i, j) == if i == j { ONE } else { ZERO })
    });
    let antidiagonal: Vec<C64> = (0..n).map(|i| blocked.get(k + i, k + n - 1 - i)).collect();
    let stray_entries = blocked
        .entries()
        .iter()
        .filter(|&&(i, j, _)| {
            let diag = i < k && i == j;
            let anti = i >= k && j >= k && (i - k) + (j - k) == n - 1;
            !diag && !anti
        })
        .count();
    BlockForm {
        invariant_size: k,
        flipped_size: n,
        identity_block,
        antidiagonal,
        stray_entries,
    }
}

/// Text rendering of a 0/1 blocked matrix with a rule between the blocks.
pub fn format_blocked(blocked: &SparseOperator, split: usize) -> String {
    let n = blocked.dim();
    let mut out = String::new();
    for i in 0..n {
        if i == split {
            out.push_str(&"-".repeat(n + 1));
            out.push('\n');
        }
        for j in 0..n {
            if j == split {
                out.push('|');
            }
            let v = blocked.get(i, j);
            out.push(if v == ZERO { '.' } else if v == ONE { '1' } else { '?' });
        }
        out.push('\n');
    }
    out
}

/// Gate factorization of the update at `site` (0-based): CN from each of the
/// `r` left and `r` right neighbours onto `site`, nearest-left first and in
/// increasing qubit order, followed by an unconditional NOT on `site`.
/// Neighbours outside the register are dropped.
pub fn build_uf_circuit(radius: usize, site: usize, n_qubits: usize) -> Result<Circuit> {
    Rule::new(radius)?;
    if site >= n_qubits {
        return Err(Error::QubitOutOfRange {
            qubit: site,
            n_qubits,
        });
    }
    let lo = site.saturating_sub(radius);
    let hi = (site + radius).min(n_qubits - 1);
    let mut ops: Vec<GateOp> = (lo..=hi)
        .filter(|&c| c != site)
        .map(|c| GateOp::Cn {
            control: c,
            target: site,
        })
        .collect();
    ops.push(GateOp::Not(site));
    Circuit::new(n_qubits, ops)
}

/// The single-window circuit: `2r + 1` qubits, updating the center.
pub fn window_circuit(radius: usize) -> Result<Circuit> {
    build_uf_circuit(radius, radius, 2 * radius + 1)
}

/// `M · (I − |O⟩⟨O|)`: the matrix with its null-word column zeroed.
pub fn project_out_null(m: &Operator) -> Operator {
    let mut out = m.clone().into_matrix();
    out.column_mut(0).fill(ZERO);
    Operator::from_matrix(out).expect("square")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// Concatenated per-site gate circuits (unitary).
    UnitaryCircuit,
    /// Product of per-site factors that leave a null window alone (not
    /// unitary, fixes the vacuum).
    PartialIsometry,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TotalStep {
    Circuit(Circuit),
    Operator(SparseOperator),
}

pub fn total_step(radius: usize, n_sites: usize, mode: StepMode) -> Result<TotalStep> {
    match mode {
        StepMode::UnitaryCircuit => total_step_circuit(radius, n_sites).map(TotalStep::Circuit),
        StepMode::PartialIsometry => total_step_operator(radius, n_sites).map(TotalStep::Operator),
    }
}

/// Site circuits for sites `0..n_sites`, site 0 first.
pub fn total_step_circuit(radius: usize, n_sites: usize) -> Result<Circuit> {
    let mut total = Circuit::empty(n_sites);
    for site in 0..n_sites {
        total = total.then(&build_uf_circuit(radius, site, n_sites)?)?;
    }
    Ok(total)
}

/// Per-site factor on a chain: the gate circuit on every basis word whose
/// window around `site` is nonzero, the identity on words whose window is
/// null. Cells beyond the chain count as 0.
pub fn site_factor(radius: usize, site: usize, n_sites: usize) -> Result<SparseOperator> {
    check_sites(n_sites)?;
    let rule = Rule::new(radius)?;
    if site >= n_sites {
        return Err(Error::QubitOutOfRange {
            qubit: site,
            n_qubits: n_sites,
        });
    }
    let dim = 1usize << n_sites;
    let entries = (0..dim)
        .map(|x| {
            let mut word = bits::index_to_word(x, n_sites);
            word[site] = chain_center(rule, &word, site);
            (bits::word_to_index(&word), x, ONE)
        })
        .collect();
    SparseOperator::new(dim, entries)
}

fn chain_center(rule: Rule, word: &[Bit], site: usize) -> Bit {
    let r = rule.radius() as i64;
    let padded: Vec<Bit> = (site as i64 - r..=site as i64 + r)
        .map(|s| {
            if s < 0 || s >= word.len() as i64 {
                0
            } else {
                word[s as usize]
            }
        })
        .collect();
    let window = sca::Window::from_word(rule, &padded).expect("window length");
    sca::next_center(rule, &window)
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::Invalid("chain needs at least one site".into()));
    }
    if n_sites > MAX_OPERATOR_SITES {
        return Err(Error::DimensionTooLarge {
            n_qubits: n_sites,
            limit: MAX_OPERATOR_SITES,
        });
    }
    Ok(())
}

/// `F_{n-1} ⋯ F_1 F_0` over [`site_factor`]s.
pub fn total_step_operator(radius: usize, n_sites: usize) -> Result<SparseOperator> {
    check_sites(n_sites)?;
    let mut total = SparseOperator::identity(1 << n_sites);
    for site in 0..n_sites {
        total = site_factor(radius, site, n_sites)?.mul(&total);
    }
    Ok(total)
}

/// Words `x ≠ 0` for which `U_f |x⟩ ≠ |f(x)⟩`.
pub fn equivariance_violations(op: &TransitionOperator) -> Result<Vec<usize>> {
    let n = op.n_qubits();
    let mut bad = Vec::new();
    for x in 1..op.dim() {
        let word = bits::index_to_word(x, n);
        let lhs = op.apply(&qstate::basis_state(&word)?)?;
        let rhs = qstate::basis_state(&sca::f_window(op.rule(), &word)?)?;
        if lhs != rhs {
            bad.push(x);
        }
    }
    Ok(bad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelismReport {
    pub radius: usize,
    pub n_qubits: usize,
    /// Nonzero input words in the superposition.
    pub input_terms: usize,
    /// Times `U_f` was applied.
    pub operator_applications: usize,
    /// Output basis words carrying amplitude, ascending.
    pub output_support: Vec<usize>,
    /// The only basis word absent from the output.
    pub missing_words: Vec<usize>,
    pub expected_amplitude: f64,
    /// Largest deviation of any output amplitude on the support from
    /// `expected_amplitude`.
    pub amplitude_error: f64,
    pub output_norm: f64,
}

impl ParallelismReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "radius {}", self.radius).unwrap();
        writeln!(s, "qubits {}", self.n_qubits).unwrap();
        writeln!(s, "input terms {}", self.input_terms).unwrap();
        writeln!(s, "operator applications {}", self.operator_applications).unwrap();
        writeln!(s, "image words {}", self.output_support.len()).unwrap();
        let missing: Vec<String> = self
            .missing_words
            .iter()
            .map(|&w| bits::format_bits(&bits::index_to_word(w, self.n_qubits)))
            .collect();
        writeln!(s, "missing words {}", missing.join(" ")).unwrap();
        writeln!(
            s,
            "amplitude 1/sqrt({}) = {:.16e}",
            self.input_terms, self.expected_amplitude
        )
        .unwrap();
        writeln!(s, "max amplitude error {:.3e}", self.amplitude_error).unwrap();
        writeln!(s, "output norm {:.16e}", self.output_norm).unwrap();
        s
    }
}

/// Applies `U_f` once to the normalized superposition of all nonzero words.
pub fn parallelism_demo(radius: usize) -> Result<ParallelismReport> {
    let op = build_uf_matrix(radius)?;
    let n = op.n_qubits();
    let input = qstate::uniform_superposition_nonnull(n)?;
    let output = op.apply(&input)?;
    let support = output.support();
    let missing: Vec<usize> = (0..op.dim()).filter(|i| !support.contains(i)).collect();
    let expected = 1.0 / ((op.dim() - 1) as f64).sqrt();
    let amplitude_error = support
        .iter()
        .map(|&i| (output.amplitude(i) - C64::new(expected, 0.0)).norm())
        .fold(0.0, f64::max);
    Ok(ParallelismReport {
        radius,
        n_qubits: n,
        input_terms: op.dim() - 1,
        operator_applications: 1,
        output_norm: output.norm(),
        output_support: support,
        missing_words: missing,
        expected_amplitude: expected,
        amplitude_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::circuit_matrix;

    fn word(s: &str) -> usize {
        bits::word_to_index(&bits::parse_bits(s).unwrap())
    }

    #[test]
    fn radius_bounds() {
        assert!(matches!(build_uf_matrix(7), Err(Error::RadiusOutOfRange { .. })));
        assert_eq!(build_uf_matrix(0), Err(Error::ZeroRadius));
    }

    #[test]
    fn r2_known_columns() {
        let u = build_uf_matrix(2).unwrap();
        assert_eq!(u.dim(), 32);
        assert_eq!(u.nnz(), 31);
        assert_eq!(u.image(word("00100")), Some(0));
        assert_eq!(u.image(0), None);
        assert_eq!(u.preimage_word(), word("00100"));
        let out = u.apply(&qstate::basis_state(&[0; 5]).unwrap()).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn isometry_exact_small_radii() {
        for r in 1..=3 {
            let rep = check_partial_isometry(&build_uf_matrix(r).unwrap());
            assert_eq!(rep.range_residual, 0.0);
            assert_eq!(rep.domain_residual, 0.0);
            assert!(rep.is_partial_isometry());
        }
    }

    #[test]
    fn corrupted_matrix_detected() {
        let u = build_uf_matrix(2).unwrap();
        let mut entries = u.to_sparse().entries().to_vec();
        // move the entry of column 5 onto the row already hit by column 6
        let target_row = entries.iter().find(|e| e.1 == 6).unwrap().0;
        for e in entries.iter_mut() {
            if e.1 == 5 {
                e.0 = target_row;
            }
        }
        let bad = SparseOperator::new(32, entries).unwrap();
        let rep = check_partial_isometry_sparse(&bad, 0, u.preimage_word());
        assert!(rep.range_residual > 0.0);
        assert!(!rep.is_partial_isometry());
    }

    #[test]
    fn partition_sizes() {
        let p = partition_basis(2).unwrap();
        assert_eq!(p.invariant_words.len(), 16);
        assert_eq!(p.flipped_words.len(), 16);
        assert_eq!(p.flipped_words[0], 0);
        assert_eq!(*p.flipped_words.last().unwrap(), word("00100"));
        let mut all = p.order();
        all.sort();
        assert_eq!(all, (0..32).collect::<Vec<_>>());
    }

    #[test]
    fn flipped_words_pair_with_center_flip() {
        for r in 1..=3 {
            let rule = Rule::new(r).unwrap();
            let p = partition_basis(r).unwrap();
            let n = p.flipped_words.len();
            for k in 0..n {
                let x = p.flipped_words[k];
                let partner = p.flipped_words[n - 1 - k];
                assert_eq!(x ^ partner, 1 << r);
                if x != 0 {
                    let fx = sca::f_window(rule, &bits::index_to_word(x, 2 * r + 1)).unwrap();
                    assert_eq!(bits::word_to_index(&fx), partner);
                }
            }
        }
    }

    #[test]
    fn block_form_r1() {
        let u = build_uf_matrix(1).unwrap();
        let p = partition_basis(1).unwrap();
        let b = represent_blocked(&u, &p).unwrap();
        let form = block_form(&b, &p);
        assert_eq!((form.invariant_size, form.flipped_size), (4, 4));
        assert!(form.is_expected_shape());
        // partitioning again gives the same matrix
        assert_eq!(represent_blocked(&u, &partition_basis(1).unwrap()).unwrap(), b);
    }

    #[test]
    fn fig1_gate_order() {
        let c = build_uf_circuit(2, 4, 9).unwrap();
        let cn = |c| GateOp::Cn { control: c, target: 4 };
        assert_eq!(c.ops(), &[cn(2), cn(3), cn(5), cn(6), GateOp::Not(4)]);
        let edge = build_uf_circuit(2, 0, 9).unwrap();
        assert_eq!(edge.ops(), &[GateOp::Cn { control: 1, target: 0 }, GateOp::Cn { control: 2, target: 0 }, GateOp::Not(0)]);
    }

    #[test]
    fn window_circuit_on_vacuum() {
        let c = window_circuit(2).unwrap();
        let out = qstate::basis_state(&[0; 5]).unwrap().apply_circuit(&c).unwrap();
        assert_eq!(out, qstate::basis_state(&[0, 0, 1, 0, 0]).unwrap());
    }

    #[test]
    fn circuit_agrees_with_uf_off_the_null_word() {
        for r in 1..=3 {
            let m = circuit_matrix(&window_circuit(r).unwrap()).unwrap();
            let u = build_uf_matrix(r).unwrap().to_dense().unwrap();
            assert_eq!(project_out_null(&m), u);
            assert!(m.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn site_factor_matches_gate_formula() {
        // F = C (I - P) + P where P projects onto a null window
        let (r, n) = (1, 4);
        for site in 0..n {
            let c = circuit_matrix(&build_uf_circuit(r, site, n).unwrap()).unwrap();
            let p = Operator::from_fn(1 << n, |i, j| {
                let w = bits::index_to_word(j, n);
                let lo = site.saturating_sub(r);
                let hi = (site + r).min(n - 1);
                if i == j && w[lo..=hi].iter().all(|&b| b == 0) { ONE } else { ZERO }
            });
            let id = Operator::identity(1 << n);
            let expected = c.mul(&id.sub(&p)).add(&p);
            assert_eq!(site_factor(r, site, n).unwrap().to_dense(), expected);
        }
    }

    #[test]
    fn total_step_shift_covariance() {
        let c = total_step_circuit(2, 9).unwrap();
        let per_site: Vec<Circuit> = (0..9).map(|s| build_uf_circuit(2, s, 9).unwrap()).collect();
        assert_eq!(c.len(), per_site.iter().map(Circuit::len).sum::<usize>());
        for s in 2..6 {
            let shifted: Vec<GateOp> = per_site[s].ops().iter().map(|op| op.shifted(1)).collect();
            assert_eq!(per_site[s + 1].ops(), shifted.as_slice());
        }
    }

    #[test]
    fn total_operator_fixes_vacuum() {
        let t = total_step_operator(2, 7).unwrap();
        assert_eq!(t.get(0, 0), ONE);
        assert!(matches!(total_step_operator(1, 15), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn parallelism_r2() {
        let rep = parallelism_demo(2).unwrap();
        assert_eq!(rep.output_support.len(), 31);
        assert_eq!(rep.missing_words, vec![word("00100")]);
        assert!(rep.amplitude_error < 1e-15);
        assert!((rep.output_norm - 1.0).abs() < 1e-12);
        assert!(rep.output_support.contains(&0));
    }
}
