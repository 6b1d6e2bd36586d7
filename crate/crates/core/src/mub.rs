//! Complete families of mutually unbiased bases in dimension `d = 2^k`.
//!
//! Basis 0 is the computational basis. For every field element
//! `α ∈ GF(2^k)` basis `1 + α` is the common eigenbasis of the maximal
//! commuting class of Pauli operators `{ X(x) Z(S_α x) : x ∈ GF(2)^k }`,
//! where `S_α` is the matrix of the trace form `(x, y) ↦ tr(α x y)`. Its
//! vectors are the stabilizer states
//!
//! ```text
//! |e_b⟩ = d^{-1/2} Σ_y  i^{yᵀ S_α y} (-1)^{b·y} |y⟩,      b ∈ GF(2)^k
//! ```
//!
//! with the quadratic form `yᵀ S_α y` evaluated over the integers mod 4.
//! Two classes `α ≠ β` intersect trivially because `S_α − S_β = S_{α−β}` is
//! nonsingular, which makes the bases pairwise unbiased.
//!
//! # Vector order
//!
//! The protocol reads the first `d/2` vectors of every basis as key bit 0
//! and the rest as key bit 1, so the order of the vectors is part of the
//! encoding. The computational vector `|y⟩` carries bit `y₀` and `|e_b⟩` of
//! basis `1 + α` carries `b₀ ⊕ tr(c·α³)`, with `c = 1` for odd `k` and
//! `c = t` (the class of the indeterminate) for even `k`; within each half the
//! vectors keep increasing `b`. Each key-bit split is then one Pauli operator
//! `Z_θ` per class, and this sign choice makes `(Σ_θ Z_θ)² = (d + 1)·I`. The
//! averaged key-bit states therefore differ by a multiple of a Hermitian
//! unitary and `‖ρ₀ − ρ₁‖₁ = 2/√(d+1)` holds exactly, which is the largest
//! value any split of a complete family allows. A plain split by the top bit
//! of `b` falls short of it already at `d = 4`. The order has no effect on the
//! eigenvalue bound `λ`, which maximises over all outcome strings.
//!
//! The unbiasedness verifier is the normative check: any family that passes
//! [`verify_unbiasedness`] is acceptable to the rest of the crate.

use std::io::{self, BufRead, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::fmt::sig;
use crate::gf2k::Gf2k;
use crate::linalg::{inner, CMatrix, CVector};

/// Largest `k` accepted by [`build_mub_family`].
pub const MAX_FAMILY_K: u32 = 8;

/// Default tolerance for orthonormality and unbiasedness checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A Hilbert-space dimension `d = 2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dimension {
    k: u32,
}

impl Dimension {
    pub const MAX_K: u32 = 16;

    pub fn new(k: u32) -> Result<Self> {
        if !(1..=Self::MAX_K).contains(&k) {
            return Err(out_of_range("k", k, format!("1..={}", Self::MAX_K)));
        }
        Ok(Self { k })
    }

    /// Accepts `d` only when it is a power of two in range.
    pub fn from_d(d: usize) -> Result<Self> {
        if d < 2 || !d.is_power_of_two() {
            return Err(out_of_range("d", d, "a power of two ≥ 2"));
        }
        Self::new(d.trailing_zeros())
    }

    pub fn k(self) -> u32 {
        self.k
    }

    pub fn d(self) -> usize {
        1 << self.k
    }

    /// `d / 2`, the number of basis vectors carrying each bit value.
    pub fn half(self) -> usize {
        self.d() / 2
    }

    /// `d + 1`, the number of bases in a complete family.
    pub fn num_bases(self) -> usize {
        self.d() + 1
    }
}

/// `d + 1` orthonormal bases of `C^d`, each stored as a unitary matrix whose
/// columns are the basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MubFamily {
    dim: Dimension,
    bases: Vec<CMatrix>,
}

impl MubFamily {
    /// Wraps externally supplied bases. Only shapes are checked here; run
    /// [`verify_unbiasedness`] to check the family itself.
    pub fn from_bases(dim: Dimension, bases: Vec<CMatrix>) -> Result<Self> {
        if bases.len() != dim.num_bases() {
            return Err(Error::DimensionMismatch {
                expected: dim.num_bases(),
                found: bases.len(),
            });
        }
        for b in &bases {
            if b.nrows() != dim.d() || b.ncols() != dim.d() {
                return Err(Error::DimensionMismatch {
                    expected: dim.d(),
                    found: b.nrows().max(b.ncols()),
                });
            }
        }
        Ok(Self { dim, bases })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn d(&self) -> usize {
        self.dim.d()
    }

    pub fn num_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[CMatrix] {
        &self.bases
    }

    pub fn basis(&self, theta: usize) -> Result<&CMatrix> {
        self.bases.get(theta).ok_or(Error::Index {
            name: "basis",
            index: theta,
            len: self.bases.len(),
        })
    }

    /// `|e^θ_i⟩`.
    pub fn basis_state(&self, theta: usize, i: usize) -> Result<CVector> {
        let basis = self.basis(theta)?;
        if i >= self.d() {
            return Err(Error::Index {
                name: "vector",
                index: i,
                len: self.d(),
            });
        }
        Ok(basis.column(i).into_owned())
    }

    /// `⟨e^{θ₁}_i | e^{θ₂}_j⟩` without bounds checks beyond `nalgebra`'s.
    pub(crate) fn overlap(&self, t1: usize, i: usize, t2: usize, j: usize) -> Complex64 {
        self.bases[t1].column(i).dotc(&self.bases[t2].column(j))
    }

    /// Writes the text matrix format: a `d=<d> bases=<d+1>` header, then one
    /// line `theta i re_0 im_0 … re_{d-1} im_{d-1}` per vector with 17
    /// significant digits.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "d={} bases={}", self.d(), self.num_bases())?;
        for (theta, basis) in self.bases.iter().enumerate() {
            for i in 0..self.d() {
                write!(out, "{theta} {i}")?;
                for z in basis.column(i).iter() {
                    write!(out, " {} {}", sig(z.re, 17), sig(z.im, 17))?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }

    /// Parses the format produced by [`MubFamily::write_text`].
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (n, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
        let header = header.map_err(|e| parse_err(n, &e.to_string()))?;
        let mut d = None;
        let mut nb = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("d", v)) => d = v.parse::<usize>().ok(),
                Some(("bases", v)) => nb = v.parse::<usize>().ok(),
                _ => return Err(parse_err(n, "bad header token")),
            }
        }
        let (d, nb) = match (d, nb) {
            (Some(d), Some(nb)) => (d, nb),
            _ => return Err(parse_err(n, "header must be `d=<d> bases=<n>`")),
        };
        let dim = Dimension::from_d(d)?;
        let mut bases = vec![CMatrix::zeros(d, d); nb];
        let mut filled = vec![false; nb * d];
        for (n, line) in lines {
            let line = line.map_err(|e| parse_err(n, &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 + 2 * d {
                return Err(parse_err(n, "wrong number of fields"));
            }
            let theta: usize = toks[0].parse().map_err(|_| parse_err(n, "bad theta"))?;
            let i: usize = toks[1].parse().map_err(|_| parse_err(n, "bad index"))?;
            if theta >= nb || i >= d {
                return Err(parse_err(n, "index out of range"));
            }
            for row in 0..d {
                let re: f64 = toks[2 + 2 * row]
                    .parse()
                    .map_err(|_| parse_err(n, "bad float"))?;
                let im: f64 = toks[3 + 2 * row]
                    .parse()
                    .map_err(|_| parse_err(n, "bad float"))?;
                bases[theta][(row, i)] = Complex64::new(re, im);
            }
            filled[theta * d + i] = true;
        }
        if filled.iter().any(|f| !f) {
            return Err(parse_err(0, "missing vectors"));
        }
        Self::from_bases(dim, bases)
    }
}

/// Builds the complete family of `2^k + 1` mutually unbiased bases.
///
/// Deterministic: equal `k` gives bit-identical families.
pub fn build_mub_family(k: u32) -> Result<MubFamily> {
    if !(1..=MAX_FAMILY_K).contains(&k) {
        return Err(out_of_range("k", k, format!("1..={MAX_FAMILY_K}")));
    }
    let dim = Dimension::new(k)?;
    let field = Gf2k::new(k)?;
    let d = dim.d();
    let amp = 1.0 / (d as f64).sqrt();
    // i^q for q mod 4, exact
    let phase = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];

    let c = if k % 2 == 1 { 1 } else { 2 };
    let mut bases = Vec::with_capacity(dim.num_bases());
    let order = key_split_order(d, 0);
    bases.push(CMatrix::from_fn(d, d, |y, i| {
        Complex64::new(if y == order[i] { 1.0 } else { 0.0 }, 0.0)
    }));
    for alpha in 0..d as u16 {
        let form = field.trace_form(alpha);
        let quad: Vec<usize> = (0..d).map(|y| quadratic_mod4(&form, y)).collect();
        let cube = field.mul(field.mul(alpha, alpha), alpha);
        let order = key_split_order(d, field.trace(field.mul(c, cube)));
        let mut basis = CMatrix::from_fn(d, d, |y, i| {
            let b = order[i];
            let sign = if (y & b).count_ones() % 2 == 0 { 0 } else { 2 };
            phase[(quad[y] + sign) % 4] * amp
        });
        fix_phases(&mut basis);
        bases.push(basis);
    }
    Ok(MubFamily { dim, bases })
}

/// Labels `b` in column order: key bit `b₀ ⊕ flip` equal to 0 first.
fn key_split_order(d: usize, flip: u8) -> Vec<usize> {
    let bit = |b: usize| (b & 1) as u8 ^ flip;
    let mut order: Vec<usize> = (0..d).filter(|&b| bit(b) == 0).collect();
    order.extend((0..d).filter(|&b| bit(b) == 1));
    order
}

/// `yᵀ S y` over the integers, reduced mod 4.
fn quadratic_mod4(form: &[Vec<u8>], y: usize) -> usize {
    let k = form.len();
    let mut q = 0usize;
    for i in 0..k {
        if (y >> i) & 1 == 0 {
            continue;
        }
        for j in 0..k {
            if (y >> j) & 1 == 1 {
                q += form[i][j] as usize;
            }
        }
    }
    q % 4
}

/// Rotates every column so that its first nonzero entry is real and
/// nonnegative.
fn fix_phases(basis: &mut CMatrix) {
    for mut col in basis.column_iter_mut() {
        if let Some(z) = col.iter().copied().find(|z| z.norm() > 1e-12) {
            let rot = z.conj() / z.norm();
            if (rot - Complex64::new(1.0, 0.0)).norm() > 0.0 {
                col.iter_mut().for_each(|w| *w *= rot);
            }
        }
    }
}

/// Outcome of [`verify_unbiasedness`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub d: usize,
    pub num_bases: usize,
    pub tol: f64,
    pub passed: bool,
    /// `max(| ‖e_i‖ − 1 |, |⟨e_i|e_j⟩|)` over all bases and `i ≠ j`.
    pub max_orthonormality_deviation: f64,
    /// `max | |⟨e^{θ₁}_i|e^{θ₂}_j⟩| − 1/√d |` over `θ₁ < θ₂`.
    pub max_unbiasedness_deviation: f64,
    /// `(θ, i, j)` attaining the orthonormality maximum.
    pub worst_orthonormality: Option<(usize, usize, usize)>,
    /// `(θ₁, θ₂, i, j)` attaining the unbiasedness maximum.
    pub worst_unbiasedness: Option<(usize, usize, usize, usize)>,
}

/// Exhaustively checks orthonormality of every basis and the `1/√d` overlap
/// condition for every pair of distinct bases.
pub fn verify_unbiasedness(family: &MubFamily, tol: f64) -> VerificationReport {
    let d = family.d();
    let nb = family.num_bases();
    let target = 1.0 / (d as f64).sqrt();

    let mut max_orth = 0.0f64;
    let mut worst_orth = None;
    for theta in 0..nb {
        for i in 0..d {
            for j in i..d {
                let z = family.overlap(theta, i, theta, j);
                let dev = if i == j {
                    (z.norm().sqrt() - 1.0).abs()
                } else {
                    z.norm()
                };
                if dev > max_orth || worst_orth.is_none() {
                    max_orth = dev;
                    worst_orth = Some((theta, i, j));
                }
            }
        }
    }

    let mut max_mub = 0.0f64;
    let mut worst_mub = None;
    for t1 in 0..nb {
        for t2 in t1 + 1..nb {
            for i in 0..d {
                for j in 0..d {
                    let dev = (family.overlap(t1, i, t2, j).norm() - target).abs();
                    if dev > max_mub || worst_mub.is_none() {
                        max_mub = dev;
                        worst_mub = Some((t1, t2, i, j));
                    }
                }
            }
        }
    }

    VerificationReport {
        d,
        num_bases: nb,
        tol,
        passed: max_orth <= tol && max_mub <= tol,
        max_orthonormality_deviation: max_orth,
        max_unbiasedness_deviation: max_mub,
        worst_orthonormality: worst_orth,
        worst_unbiasedness: worst_mub,
    }
}

/// Convenience wrapper for [`MubFamily::basis_state`].
pub fn basis_state(family: &MubFamily, theta: usize, i: usize) -> Result<CVector> {
    family.basis_state(theta, i)
}

/// `|⟨a|b⟩|` for two basis states.
pub fn overlap_modulus(family: &MubFamily, a: (usize, usize), b: (usize, usize)) -> Result<f64> {
    Ok(inner(&family.basis_state(a.0, a.1)?, &family.basis_state(b.0, b.1)?).norm())
}
