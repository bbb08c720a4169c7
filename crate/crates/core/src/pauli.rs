//! Pauli strings and weighted sums of them.
//!
//! Qubit 0 is the left-most factor and the highest-order bit of a basis index.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients smaller than this are dropped after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Product `self * other` as (power of i, result).
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    /// 2x2 matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

/// Unit phase `i^k`, k in 0..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn value(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn times(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

/// A tensor product of single-qubit Paulis with a unit phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    axes: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(axes: Vec<Pauli>, phase: Phase) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Dimension("Pauli string needs at least one qubit".into()));
        }
        Ok(PauliString { axes, phase })
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliString { axes: vec![Pauli::I; n_qubits.max(1)], phase: Phase::ONE }
    }

    /// `p` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::OutOfRange(format!("qubit {qubit} on {n_qubits} qubits")));
        }
        let mut s = Self::identity(n_qubits);
        s.axes[qubit] = p;
        Ok(s)
    }

    /// Parses labels like `"XIZY"`.
    pub fn parse(label: &str) -> Result<Self> {
        let axes = label
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Parse(format!("bad Pauli label {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes, Phase::ONE)
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn label(&self) -> String {
        self.axes.iter().map(|p| p.as_char()).collect()
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::Dimension(format!(
                "multiplying {}-qubit by {}-qubit string",
                self.n_qubits(),
                other.n_qubits()
            )));
        }
        let (k, axes) = multiply_axes(&self.axes, &other.axes);
        Ok(PauliString {
            axes,
            phase: self.phase.times(other.phase).times(Phase::from_power(k)),
        })
    }

    pub fn masks(&self) -> PauliMasks {
        PauliMasks::of(&self.axes)
    }
}

pub(crate) fn multiply_axes(a: &[Pauli], b: &[Pauli]) -> (u8, Vec<Pauli>) {
    let mut k = 0u8;
    let axes = a
        .iter()
        .zip(b)
        .map(|(&p, &q)| {
            let (dk, r) = p.mul(q);
            k += dk;
            r
        })
        .collect();
    (k % 4, axes)
}

/// Bit-mask form of an axes pattern, for applying it to basis states.
///
/// `P|b> = i^ny (-1)^popcount(b & z) |b ^ x>`, with `x` set on X/Y qubits and
/// `z` set on Y/Z qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub n_y: u32,
}

impl PauliMasks {
    pub fn of(axes: &[Pauli]) -> Self {
        let n = axes.len();
        let (mut x, mut z, mut n_y) = (0usize, 0usize, 0u32);
        for (q, p) in axes.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    n_y += 1;
                }
                Pauli::Z => z |= bit,
            }
        }
        PauliMasks { x, z, n_y }
    }

    /// Phase `i^ny (-1)^popcount(b & z)` picked up by basis state `b`.
    pub fn phase_on(&self, b: usize) -> Complex64 {
        let k = (self.n_y + 2 * (b & self.z).count_ones()) % 4;
        Phase::from_power(k as u8).value()
    }
}

/// Weighted sum of Pauli strings in canonical form.
///
/// Terms are keyed by their axes pattern, iterate in lexicographic order
/// (qubit 0 most significant, `I < X < Y < Z`) and carry the string phase
/// folded into the coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<Vec<Pauli>, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn constant(n_qubits: usize, c: f64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(vec![Pauli::I; n_qubits], Complex64::new(c, 0.0));
        s
    }

    pub fn from_string(s: &PauliString, coeff: Complex64) -> Self {
        let mut out = Self::zero(s.n_qubits());
        out.add_term(s.axes.clone(), coeff * s.phase.value());
        out
    }

    /// Builds a real-weighted sum from `(coefficient, label)` pairs.
    pub fn from_labels(n_qubits: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let mut out = Self::zero(n_qubits);
        for &(c, label) in terms {
            let s = PauliString::parse(label)?;
            if s.n_qubits() != n_qubits {
                return Err(Error::Dimension(format!("label {label} on {n_qubits} qubits")));
            }
            out.add_term(s.axes, Complex64::new(c, 0.0));
        }
        Ok(out)
    }

    /// `c * p` on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli, c: f64) -> Result<Self> {
        let s = PauliString::single(n_qubits, qubit, p)?;
        Ok(Self::from_string(&s, Complex64::new(c, 0.0)))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Pauli], Complex64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn coefficient(&self, axes: &[Pauli]) -> Complex64 {
        self.terms.get(axes).copied().unwrap_or_default()
    }

    /// Coefficient of the all-identity term.
    pub fn identity_coefficient(&self) -> f64 {
        self.coefficient(&vec![Pauli::I; self.n_qubits]).re
    }

    /// Sum of |coefficients| over non-identity terms.
    pub fn one_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().any(|p| *p != Pauli::I))
            .map(|(_, v)| v.norm())
            .sum()
    }

    fn add_term(&mut self, axes: Vec<Pauli>, c: Complex64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(axes) {
            Entry::Vacant(e) => {
                if c.norm() >= PRUNE_THRESHOLD {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().norm() < PRUNE_THRESHOLD {
                    e.remove();
                }
            }
        }
    }

    fn check_dims(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit sum combined with {}-qubit sum",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), *v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> PauliSum {
        self.scale_complex(Complex64::new(c, 0.0))
    }

    pub fn scale_complex(&self, c: Complex64) -> PauliSum {
        let mut out = Self::zero(self.n_qubits);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn add_constant(&self, c: f64) -> PauliSum {
        let mut out = self.clone();
        out.add_term(vec![Pauli::I; self.n_qubits], Complex64::new(c, 0.0));
        out
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dims(other)?;
        let mut acc: BTreeMap<Vec<Pauli>, Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (k, axes) = multiply_axes(a, b);
                *acc.entry(axes).or_default() += ca * cb * Phase::from_power(k).value();
            }
        }
        acc.retain(|_, v| v.norm() >= PRUNE_THRESHOLD);
        Ok(PauliSum { n_qubits: self.n_qubits, terms: acc })
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `{self, other} = self*other + other*self`.
    pub fn anticommutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// Hermitian conjugate (Pauli strings are Hermitian, so conjugate coefficients).
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.conj())).collect(),
        }
    }

    /// True when every coefficient is real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|v| v.im.abs() <= tol)
    }

    /// Real coefficients, failing if any imaginary part exceeds `tol`.
    pub fn real_terms(&self, tol: f64) -> Result<Vec<(Vec<Pauli>, f64)>> {
        self.terms
            .iter()
            .map(|(k, v)| {
                if v.im.abs() > tol {
                    Err(Error::NonHermitian(format!(
                        "term {} has coefficient {v}",
                        k.iter().map(|p| p.as_char()).collect::<String>()
                    )))
                } else {
                    Ok((k.clone(), v.re))
                }
            })
            .collect()
    }

    /// Text form: a `qubits N` header, then one `coeff AXES` line per term.
    ///
    /// Real coefficients are written alone, complex ones as `re,im`.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.n_qubits);
        for (k, v) in &self.terms {
            let label: String = k.iter().map(|p| p.as_char()).collect();
            if v.im == 0.0 {
                out.push_str(&format!("{} {}\n", v.re, label));
            } else {
                out.push_str(&format!("{},{} {}\n", v.re, v.im, label));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let n_qubits = header
            .strip_prefix("qubits ")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let mut out = PauliSum::zero(n_qubits);
        for line in lines {
            let (c, label) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("bad term line {line:?}")))?;
            let coeff = match c.split_once(',') {
                Some((re, im)) => Complex64::new(parse_f64(re)?, parse_f64(im)?),
                None => Complex64::new(parse_f64(c)?, 0.0),
            };
            let s = PauliString::parse(label.trim())?;
            if s.n_qubits() != n_qubits {
                return Err(Error::Dimension(format!("label {label} on {n_qubits} qubits")));
            }
            out.add_term(s.axes, coeff);
        }
        Ok(out)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(axes: &[Pauli], phase: Complex64) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![Complex64::new(1.0, 0.0)]];
        for p in axes {
            let pm = p.matrix();
            let d = m.len();
            let mut next = vec![vec![Complex64::default(); 2 * d]; 2 * d];
            for i in 0..d {
                for j in 0..d {
                    for a in 0..2 {
                        for b in 0..2 {
                            next[2 * i + a][2 * j + b] = m[i][j] * pm[a][b];
                        }
                    }
                }
            }
            m = next;
        }
        m.iter().map(|r| r.iter().map(|v| v * phase).collect()).collect()
    }

    fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn x_times_y_is_i_z() {
        let a = PauliString::parse("XI").unwrap();
        let b = PauliString::parse("YI").unwrap();
        let p = a.multiply(&b).unwrap();
        assert_eq!(p.label(), "ZI");
        assert_eq!(p.phase(), Phase::I);
    }

    #[test]
    fn zz_squares_to_identity() {
        let a = PauliString::parse("ZZ").unwrap();
        let p = a.multiply(&a).unwrap();
        assert_eq!(p.label(), "II");
        assert_eq!(p.phase(), Phase::ONE);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let a = PauliString::parse("ZZ").unwrap();
        let b = PauliString::parse("Z").unwrap();
        assert!(matches!(a.multiply(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn two_qubit_products_match_dense_matrices() {
        let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for &a0 in &all {
            for &a1 in &all {
                for &b0 in &all {
                    for &b1 in &all {
                        let a = PauliString::new(vec![a0, a1], Phase::ONE).unwrap();
                        let b = PauliString::new(vec![b0, b1], Phase::ONE).unwrap();
                        let p = a.multiply(&b).unwrap();
                        let lhs = matmul(&dense(a.axes(), a.phase().value()), &dense(b.axes(), b.phase().value()));
                        let rhs = dense(p.axes(), p.phase().value());
                        for i in 0..4 {
                            for j in 0..4 {
                                assert!((lhs[i][j] - rhs[i][j]).norm() < 1e-15);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn xz_times_yx() {
        let p = PauliString::parse("XZ").unwrap().multiply(&PauliString::parse("YX").unwrap()).unwrap();
        // X*Y = iZ, Z*X = iY
        assert_eq!(p.label(), "ZY");
        assert_eq!(p.phase(), Phase::MINUS_ONE);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn masks_act_like_matrices() {
        let s = PauliString::parse("YXZ").unwrap();
        let m = s.masks();
        let d = dense(s.axes(), Complex64::new(1.0, 0.0));
        for b in 0..8 {
            let col: Vec<Complex64> = (0..8).map(|r| d[r][b]).collect();
            for (r, v) in col.iter().enumerate() {
                if r == b ^ m.x {
                    assert!((v - m.phase_on(b)).norm() < 1e-15);
                } else {
                    assert!(v.norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn cancellation_prunes_terms() {
        let a = PauliSum::from_labels(2, &[(0.5, "ZI"), (1.0, "XX")]).unwrap();
        let b = PauliSum::from_labels(2, &[(-0.5, "ZI")]).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&[Pauli::X, Pauli::X]).re, 1.0);
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let s = PauliSum::from_labels(2, &[(1.0, "ZI"), (1.0, "IZ"), (1.0, "XY"), (1.0, "II")]).unwrap();
        let labels: Vec<String> = s.terms().map(|(k, _)| k.iter().map(|p| p.as_char()).collect()).collect();
        assert_eq!(labels, ["II", "IZ", "XY", "ZI"]);
    }

    #[test]
    fn paulis_anticommute_as_sums() {
        let x = PauliSum::single(1, 0, Pauli::X, 1.0).unwrap();
        let y = PauliSum::single(1, 0, Pauli::Y, 1.0).unwrap();
        assert!(x.anticommutator(&y).unwrap().is_empty());
        let c = x.commutator(&y).unwrap();
        assert_eq!(c.coefficient(&[Pauli::Z]), Complex64::new(0.0, 2.0));
    }

    #[test]
    fn text_round_trip_complex_and_real() {
        let mut s = PauliSum::from_labels(4, &[(0.25, "ZIZI"), (-1.0 / 3.0, "XXII")]).unwrap();
        s = s.add(&PauliSum::from_string(&PauliString::parse("YIII").unwrap(), Complex64::new(0.1, -0.7))).unwrap();
        let text = s.to_text();
        assert!(text.contains("0.25 ZIZI"));
        assert_eq!(PauliSum::from_text(&text).unwrap(), s);
    }

    #[test]
    fn empty_sum_round_trips() {
        let s = PauliSum::zero(3);
        assert_eq!(PauliSum::from_text(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn bad_text_rejected() {
        assert!(PauliSum::from_text("0.1 XX").is_err());
        assert!(PauliSum::from_text("qubits 2\n0.1 XQ").is_err());
        assert!(PauliSum::from_text("qubits 2\n0.1 XXX").is_err());
    }

    fn arb_axes(n: usize) -> impl Strategy<Value = Vec<Pauli>> {
        proptest::collection::vec(prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)], n)
    }

    proptest! {
        #[test]
        fn multiplication_is_associative(a in arb_axes(3), b in arb_axes(3), c in arb_axes(3)) {
            let a = PauliString::new(a, Phase::ONE).unwrap();
            let b = PauliString::new(b, Phase::I).unwrap();
            let c = PauliString::new(c, Phase::ONE).unwrap();
            let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn strings_square_to_identity(a in arb_axes(4)) {
            let a = PauliString::new(a, Phase::ONE).unwrap();
            let p = a.multiply(&a).unwrap();
            prop_assert_eq!(p, PauliString::identity(4));
        }

        #[test]
        fn text_round_trip(cs in proptest::collection::vec(-10.0f64..10.0, 1..6), axes in proptest::collection::vec(arb_axes(3), 1..6)) {
            let mut s = PauliSum::zero(3);
            for (c, a) in cs.iter().zip(&axes) {
                s = s.add(&PauliSum::from_string(&PauliString::new(a.clone(), Phase::ONE).unwrap(), Complex64::new(*c, 0.0))).unwrap();
            }
            prop_assert_eq!(PauliSum::from_text(&s.to_text()).unwrap(), s);
        }
    }
}
