//! Factorization of a unitary into embedded 2×2 unitaries and a phase
//! diagonal by triangular nulling.
//!
//! Column by column from the left, entries below the diagonal are zeroed
//! bottom-up with a rotation on rows `(k-1, k)`. The nulling rotations
//! `G_1 .. G_m` leave a diagonal `D = G_m .. G_1 U`, so
//! `U = G_1† .. G_m† D`. The plan stores `R_i = G_i†`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::operator::{Operator, C64, ONE, ZERO};

/// A 2×2 unitary acting on modes `i < j`, identity elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedRotation {
    pub i: usize,
    pub j: usize,
    pub u: [[C64; 2]; 2],
}

impl EmbeddedRotation {
    pub fn new(i: usize, j: usize, u: [[C64; 2]; 2]) -> Result<Self> {
        if i >= j {
            return Err(Error::Invalid(format!("rotation modes must satisfy i < j, got {i}, {j}")));
        }
        let rot = EmbeddedRotation { i, j, u };
        let res = rot.unitarity_residual();
        if res > 1e-12 {
            return Err(Error::NotUnitary(res));
        }
        Ok(rot)
    }

    fn as_matrix(&self) -> Matrix2<C64> {
        Matrix2::new(self.u[0][0], self.u[0][1], self.u[1][0], self.u[1][1])
    }

    pub fn unitarity_residual(&self) -> f64 {
        let m = self.as_matrix();
        (m.adjoint() * m - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        let a = self.as_matrix().adjoint();
        EmbeddedRotation {
            i: self.i,
            j: self.j,
            u: [[a[(0, 0)], a[(0, 1)]], [a[(1, 0)], a[(1, 1)]]],
        }
    }

    /// The full `dim × dim` matrix.
    pub fn embed(&self, dim: usize) -> Operator {
        let mut m = DMatrix::identity(dim, dim);
        self.apply_left(&mut m);
        Operator::from_matrix(m).expect("square")
    }

    /// `m ← R m`.
    pub fn apply_left(&self, m: &mut DMatrix<C64>) {
        for c in 0..m.ncols() {
            let (a, b) = (m[(self.i, c)], m[(self.j, c)]);
            m[(self.i, c)] = self.u[0][0] * a + self.u[0][1] * b;
            m[(self.j, c)] = self.u[1][0] * a + self.u[1][1] * b;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReckPlan {
    pub dim: usize,
    pub rotations: Vec<EmbeddedRotation>,
    pub phases: Vec<C64>,
}

impl ReckPlan {
    pub fn identity(dim: usize) -> Self {
        ReckPlan {
            dim,
            rotations: Vec::new(),
            phases: vec![ONE; dim],
        }
    }

    /// Checks mode ranges, rotation unitarity, phase moduli and the
    /// rotation count bound.
    pub fn validate(&self) -> Result<()> {
        if self.phases.len() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, self.phases.len()));
        }
        if self.rotations.len() > self.dim * self.dim.saturating_sub(1) / 2 {
            return Err(Error::Invalid(format!(
                "{} rotations exceed the bound for dimension {}",
                self.rotations.len(),
                self.dim
            )));
        }
        for r in &self.rotations {
            if r.i >= r.j || r.j >= self.dim {
                return Err(Error::Invalid(format!("rotation on modes {}, {} out of range", r.i, r.j)));
            }
            let res = r.unitarity_residual();
            if res > 1e-12 {
                return Err(Error::NotUnitary(res));
            }
        }
        if let Some(p) = self.phases.iter().find(|p| (p.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::Invalid(format!("phase {p} is not a unit complex number")));
        }
        Ok(())
    }

    /// One `R i j ...` line per rotation, then one `P k re im` line per
    /// phase. Indices are 1-based.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rotations {
            write!(s, "R {} {}", r.i + 1, r.j + 1).unwrap();
            for z in r.u.iter().flatten() {
                write!(s, " {:.16e} {:.16e}", z.re, z.im).unwrap();
            }
            s.push('\n');
        }
        for (k, p) in self.phases.iter().enumerate() {
            writeln!(s, "P {} {:.16e} {:.16e}", k + 1, p.re, p.im).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut rotations = Vec::new();
        let mut phases: Vec<(usize, C64)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            let index = |s: &str| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(Error::parse(line, format!("bad index `{s}`"))),
                }
            };
            let real = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| Error::parse(line, format!("bad number `{s}`")))
            };
            match fields[0] {
                "R" | "r" => {
                    if fields.len() != 11 {
                        return Err(Error::parse(line, "rotation needs 2 indices and 8 numbers"));
                    }
                    let (i, j) = (index(fields[1])?, index(fields[2])?);
                    let mut z = [ZERO; 4];
                    for (k, slot) in z.iter_mut().enumerate() {
                        *slot = C64::new(real(fields[3 + 2 * k])?, real(fields[4 + 2 * k])?);
                    }
                    let rot = EmbeddedRotation::new(i, j, [[z[0], z[1]], [z[2], z[3]]])
                        .map_err(|e| Error::parse(line, e.to_string()))?;
                    rotations.push(rot);
                }
                "P" | "p" => {
                    if fields.len() != 4 {
                        return Err(Error::parse(line, "phase needs an index and 2 numbers"));
                    }
                    phases.push((index(fields[1])?, C64::new(real(fields[2])?, real(fields[3])?)));
                }
                other => return Err(Error::parse(line, format!("unknown record `{other}`"))),
            }
        }
        let dim = phases.len();
        let mut ordered = vec![None; dim];
        for (k, p) in phases {
            if k >= dim || ordered[k].is_some() {
                return Err(Error::Invalid(format!("phase index {} repeated or out of range", k + 1)));
            }
            ordered[k] = Some(p);
        }
        let plan = ReckPlan {
            dim,
            rotations,
            phases: ordered.into_iter().map(Option::unwrap).collect(),
        };
        plan.validate()?;
        Ok(plan)
    }
}

/// Decomposes a unitary. Below-diagonal entries with modulus at most `tol`
/// are left in place without emitting a rotation.
pub fn reck_decompose(u: &Operator, tol: f64) -> Result<ReckPlan> {
    let res = u.unitarity_residual();
    if res > tol {
        return Err(Error::NotUnitary(res));
    }
    let n = u.dim();
    let mut t = u.matrix().clone();
    let mut rotations = Vec::new();
    for c in 0..n {
        for k in (c + 1..n).rev() {
            let b = t[(k, c)];
            if b.norm() <= tol {
                continue;
            }
            let a = t[(k - 1, c)];
            let norm = a.norm().hypot(b.norm());
            // G maps (a, b) to (norm, 0)
            let g = EmbeddedRotation {
                i: k - 1,
                j: k,
                u: [[a.conj() / norm, b.conj() / norm], [-b / norm, a / norm]],
            };
            g.apply_left(&mut t);
            t[(k, c)] = ZERO;
            rotations.push(g.adjoint());
        }
    }
    let phases = (0..n)
        .map(|k| {
            let d = t[(k, k)];
            if d.norm() == 0.0 {
                ONE
            } else {
                d / d.norm()
            }
        })
        .collect();
    Ok(ReckPlan {
        dim: n,
        rotations,
        phases,
    })
}

/// `R_1 R_2 .. R_m D`.
pub fn reck_reconstruct(plan: &ReckPlan) -> Operator {
    let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(plan.phases.clone()));
    for r in plan.rotations.iter().rev() {
        r.apply_left(&mut m);
    }
    Operator::from_matrix(m).expect("square")
}

/// Unitarity residual of every suffix product `R_k .. R_m D`.
pub fn partial_product_residuals(plan: &ReckPlan) -> Vec<f64> {
    let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(plan.phases.clone()));
    let mut out = Vec::with_capacity(plan.rotations.len());
    for r in plan.rotations.iter().rev() {
        r.apply_left(&mut m);
        out.push(Operator::from_matrix(m.clone()).expect("square").unitarity_residual());
    }
    out
}

/// Unitary from the QR factorization of a matrix with uniform random
/// entries in the unit square.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    Operator::from_matrix(m.qr().q()).expect("square")
}
