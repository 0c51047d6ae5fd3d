//! Symbolic Pauli-string algebra.
//!
//! Strings are stored as a pair of bit masks `(x, z)` with each letter written
//! as `P = (-i)^{x z} Z^z X^x`. Site 0 maps to the most significant bit of the
//! computational-basis index, and `Z|0> = -|0>`, `Z|1> = +|1>`. With that choice
//! `Y = -i Z X` is the matrix `[[0, i], [-i, 0]]` and the usual relations
//! `XY = iZ`, `YZ = iX`, `ZX = iY` hold.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest site count representable by a [`PauliString`].
pub const MAX_SYMBOLIC_SITES: usize = 64;

/// Powers of `-i`, indexed by exponent mod 4.
const MINUS_I_POW: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, -1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, 1.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
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

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A tensor product of single-site Pauli letters on `n` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    sites: u32,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(sites: usize) -> Self {
        assert!(sites >= 1 && sites <= MAX_SYMBOLIC_SITES, "site count {sites} out of range");
        Self { sites: sites as u32, x: 0, z: 0 }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (site, &p) in letters.iter().enumerate() {
            s = s.with(site, p);
        }
        s
    }

    /// Single letter `p` on `site`, identity elsewhere.
    pub fn single(sites: usize, site: usize, p: Pauli) -> Self {
        Self::identity(sites).with(site, p)
    }

    /// Returns a copy with `site` replaced by `p`.
    pub fn with(mut self, site: usize, p: Pauli) -> Self {
        let bit = self.bit(site);
        let (x, z) = p.bits();
        self.x = (self.x & !bit) | if x { bit } else { 0 };
        self.z = (self.z & !bit) | if z { bit } else { 0 };
        self
    }

    fn bit(&self, site: usize) -> u64 {
        assert!(site < self.sites as usize, "site {site} out of range");
        1u64 << (self.sites as usize - 1 - site)
    }

    pub fn sites(&self) -> usize {
        self.sites as usize
    }

    pub fn letter(&self, site: usize) -> Pauli {
        let bit = self.bit(site);
        Pauli::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.sites()).map(|s| self.letter(s)).collect()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Bit mask of sites carrying an X or Y letter (basis-index bits flipped by the string).
    pub fn flip_mask(&self) -> u64 {
        self.x
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Operator product `self * other = phase * result`; the phase is a power of `i`.
    pub fn mul(&self, other: &PauliString) -> Result<(C64, PauliString)> {
        if self.sites != other.sites {
            return Err(Error::Dimension {
                expected: self.sites(),
                found: other.sites(),
            });
        }
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let a1 = (self.x & self.z).count_ones();
        let a2 = (other.x & other.z).count_ones();
        let a3 = (x & z).count_ones();
        // Z^{z1} X^{x1} Z^{z2} X^{x2} = (-1)^{|x1 & z2|} Z^{z1^z2} X^{x1^x2}
        let swap = (self.x & other.z).count_ones();
        let exponent = (a1 + a2 + 2 * swap + 4 - a3 % 4) % 4;
        Ok((
            MINUS_I_POW[exponent as usize],
            PauliString { sites: self.sites, x, z },
        ))
    }

    /// Action on a computational basis state: `P|b> = phase |b'>`.
    pub fn apply_basis(&self, basis: usize) -> (usize, C64) {
        let mask = if self.sites == 64 { u64::MAX } else { (1u64 << self.sites) - 1 };
        let flipped = (basis as u64) ^ self.x;
        let y_count = (self.x & self.z).count_ones();
        // Z contributes -1 on every Z-site holding a 0 after the flip.
        let minus = (self.z & !flipped & mask).count_ones();
        let exponent = (y_count + 2 * minus) % 4;
        (flipped as usize, MINUS_I_POW[exponent as usize])
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sites.cmp(&other.sites).then_with(|| {
            for site in 0..self.sites() {
                match self.letter(site).cmp(&other.letter(site)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 0..self.sites() {
            write!(f, "{}", self.letter(site).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidInput(format!("bad Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() || letters.len() > MAX_SYMBOLIC_SITES {
            return Err(Error::InvalidInput(format!("bad Pauli string length {}", letters.len())));
        }
        Ok(PauliString::from_letters(&letters))
    }
}

/// A Pauli string with a complex coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: C64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: impl Into<C64>, string: PauliString) -> Self {
        Self {
            coefficient: coefficient.into(),
            string,
        }
    }

    pub fn parse(coefficient: impl Into<C64>, letters: &str) -> Result<Self> {
        Ok(Self::new(coefficient, letters.parse()?))
    }

    pub fn sites(&self) -> usize {
        self.string.sites()
    }
}

/// Product of two terms, exact in the phase.
pub fn pauli_product(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    let (phase, string) = a.string.mul(&b.string)?;
    Ok(PauliTerm {
        coefficient: a.coefficient * b.coefficient * phase,
        string,
    })
}

/// Coefficients below this fraction of the largest magnitude are dropped after
/// products and commutators (floating-point cancellation residue).
const PRUNE_RELATIVE: f64 = 1e-13;

/// A linear combination of Pauli strings in canonical form (no duplicates, no zeros).
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSum {
    sites: usize,
    terms: BTreeMap<PauliString, C64>,
}

impl OperatorSum {
    pub fn zero(sites: usize) -> Self {
        assert!(sites >= 1 && sites <= MAX_SYMBOLIC_SITES, "site count {sites} out of range");
        Self {
            sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(sites: usize, coefficient: impl Into<C64>) -> Self {
        let mut sum = Self::zero(sites);
        sum.add_term(PauliTerm::new(coefficient, PauliString::identity(sites)));
        sum
    }

    pub fn from_terms(sites: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut sum = Self::zero(sites);
        for t in terms {
            if t.sites() != sites {
                return Err(Error::Dimension {
                    expected: sites,
                    found: t.sites(),
                });
            }
            sum.add_term(t);
        }
        Ok(sum)
    }

    /// Adds a term, merging with an existing string. Panics on a site-count mismatch.
    pub fn add_term(&mut self, term: PauliTerm) {
        assert_eq!(term.sites(), self.sites, "site count mismatch");
        if term.coefficient == C64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(term.string).or_insert(C64::new(0.0, 0.0));
        *entry += term.coefficient;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&term.string);
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, string: &PauliString) -> C64 {
        self.terms.get(string).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(s, c)| PauliTerm::new(*c, *s))
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> + '_ {
        self.terms.keys()
    }

    fn check_sites(&self, other: &OperatorSum) -> Result<()> {
        if self.sites != other.sites {
            return Err(Error::Dimension {
                expected: self.sites,
                found: other.sites,
            });
        }
        Ok(())
    }

    pub fn scale(&self, factor: impl Into<C64>) -> OperatorSum {
        let factor = factor.into();
        let mut out = OperatorSum::zero(self.sites);
        for t in self.terms() {
            out.add_term(PauliTerm::new(t.coefficient * factor, t.string));
        }
        out
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: impl Into<C64>, other: &OperatorSum, b: impl Into<C64>) -> Result<OperatorSum> {
        self.check_sites(other)?;
        let (a, b) = (a.into(), b.into());
        let mut out = OperatorSum::zero(self.sites);
        for t in self.terms() {
            out.add_term(PauliTerm::new(t.coefficient * a, t.string));
        }
        for t in other.terms() {
            out.add_term(PauliTerm::new(t.coefficient * b, t.string));
        }
        Ok(out.pruned())
    }

    pub fn add(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.combine(1.0, other, -1.0)
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check_sites(other)?;
        let mut out = OperatorSum::zero(self.sites);
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                let (phase, s) = sa.mul(sb)?;
                out.add_term(PauliTerm::new(ca * cb * phase, s));
            }
        }
        Ok(out.pruned())
    }

    /// Hermitian conjugate: every Pauli string is Hermitian, so only coefficients conjugate.
    pub fn adjoint(&self) -> OperatorSum {
        OperatorSum {
            sites: self.sites,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
        }
    }

    /// Largest imaginary part among the coefficients.
    pub fn hermiticity_defect(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest real part among the coefficients (zero for anti-Hermitian sums).
    pub fn anti_hermiticity_defect(&self) -> f64 {
        self.terms.values().map(|c| c.re.abs()).fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes; bounds the operator norm.
    pub fn pauli_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops floating-point cancellation residue.
    pub fn pruned(mut self) -> OperatorSum {
        let cutoff = PRUNE_RELATIVE * self.max_coefficient();
        self.terms.retain(|_, c| c.norm() > cutoff);
        self
    }

    /// `Tr(self^dagger other)`, computed from coefficients (`Tr P_a P_b = 2^n delta_ab`).
    pub fn hs_inner(&self, other: &OperatorSum) -> Result<C64> {
        self.check_sites(other)?;
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = C64::new(0.0, 0.0);
        for (s, c) in &small.terms {
            if let Some(d) = large.terms.get(s) {
                acc += if conj_small { c.conj() * d } else { d.conj() * c };
            }
        }
        Ok(acc * 2f64.powi(self.sites as i32))
    }

    /// Applies the operator to a state vector of length `2^n`.
    pub fn apply(&self, input: &[C64], output: &mut [C64]) {
        let dim = 1usize << self.sites;
        assert_eq!(input.len(), dim);
        assert_eq!(output.len(), dim);
        output.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for (s, c) in &self.terms {
            for (b, amp) in input.iter().enumerate() {
                let (row, phase) = s.apply_basis(b);
                output[row] += c * phase * amp;
            }
        }
    }

    /// Text dump, one `coeff letters` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            out.push_str(&format_coefficient(*c));
            out.push(' ');
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`OperatorSum::to_text`].
    pub fn from_text(text: &str) -> Result<OperatorSum> {
        let mut parsed = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (coeff, letters) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::InvalidInput(format!("malformed term line {line:?}")))?;
            parsed.push(PauliTerm::new(parse_coefficient(coeff)?, letters.trim().parse()?));
        }
        let sites = parsed
            .first()
            .map(PauliTerm::sites)
            .ok_or_else(|| Error::InvalidInput("empty operator dump".into()))?;
        OperatorSum::from_terms(sites, parsed)
    }
}

fn format_coefficient(c: C64) -> String {
    if c.im == 0.0 {
        format!("{:?}", c.re)
    } else {
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        format!("{:?}{}{:?}i", c.re, sign, c.im.abs())
    }
}

fn parse_coefficient(text: &str) -> Result<C64> {
    let bad = || Error::InvalidInput(format!("bad coefficient {text:?}"));
    if let Some(body) = text.strip_suffix('i') {
        // split at the sign that separates real and imaginary parts (skip exponent signs)
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
            .ok_or_else(bad)?;
        let re: f64 = body[..split].parse().map_err(|_| bad())?;
        let im: f64 = body[split..].parse().map_err(|_| bad())?;
        Ok(C64::new(re, im))
    } else {
        Ok(C64::new(text.parse().map_err(|_| bad())?, 0.0))
    }
}

/// `AB - BA` in canonical form. Only anticommuting string pairs contribute.
pub fn commutator(a: &OperatorSum, b: &OperatorSum) -> Result<OperatorSum> {
    a.check_sites(b)?;
    let mut out = OperatorSum::zero(a.sites);
    for (sa, ca) in &a.terms {
        for (sb, cb) in &b.terms {
            if sa.commutes_with(sb) {
                continue;
            }
            let (phase, s) = sa.mul(sb)?;
            out.add_term(PauliTerm::new(ca * cb * phase * 2.0, s));
        }
    }
    Ok(out.pruned())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(c: C64, s: &str) -> PauliTerm {
        PauliTerm::parse(c, s).unwrap()
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn single_site_products() {
        let p = pauli_product(&term(re(1.0), "X"), &term(re(1.0), "Y")).unwrap();
        assert_eq!(p, term(C64::new(0.0, 1.0), "Z"));
        let p = pauli_product(&term(re(1.0), "X"), &term(re(1.0), "X")).unwrap();
        assert_eq!(p, term(re(1.0), "I"));
        let p = pauli_product(&term(re(1.0), "Y"), &term(re(1.0), "Z")).unwrap();
        assert_eq!(p, term(C64::new(0.0, 1.0), "X"));
        let p = pauli_product(&term(re(1.0), "Z"), &term(re(1.0), "X")).unwrap();
        assert_eq!(p, term(C64::new(0.0, 1.0), "Y"));
        let p = pauli_product(&term(re(1.0), "Y"), &term(re(1.0), "X")).unwrap();
        assert_eq!(p, term(C64::new(0.0, -1.0), "Z"));
    }

    #[test]
    fn disjoint_supports_multiply_coefficients() {
        let p = pauli_product(&term(re(2.0), "XI"), &term(re(3.0), "IX")).unwrap();
        assert_eq!(p, term(re(6.0), "XX"));
    }

    #[test]
    fn mismatched_sites_rejected() {
        let err = pauli_product(&term(re(1.0), "X"), &term(re(1.0), "XX")).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
        let a = OperatorSum::identity(1, 1.0);
        let b = OperatorSum::identity(2, 1.0);
        assert!(commutator(&a, &b).is_err());
    }

    #[test]
    fn su2_commutator() {
        let z = OperatorSum::from_terms(1, [term(re(1.0), "Z")]).unwrap();
        let x = OperatorSum::from_terms(1, [term(re(1.0), "X")]).unwrap();
        let c = commutator(&z, &x).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.coefficient(&"Y".parse().unwrap()), C64::new(0.0, 2.0));
        assert!(commutator(&z, &z).unwrap().is_empty());
    }

    #[test]
    fn basis_action_follows_sign_convention() {
        let z: PauliString = "Z".parse().unwrap();
        assert_eq!(z.apply_basis(0), (0, re(-1.0)));
        assert_eq!(z.apply_basis(1), (1, re(1.0)));
        let y: PauliString = "Y".parse().unwrap();
        assert_eq!(y.apply_basis(0), (1, C64::new(0.0, -1.0)));
        assert_eq!(y.apply_basis(1), (0, C64::new(0.0, 1.0)));
        // site 0 is the most significant bit
        let xi: PauliString = "XI".parse().unwrap();
        assert_eq!(xi.apply_basis(0b00).0, 0b10);
    }

    #[test]
    fn merging_and_zero_removal() {
        let mut s = OperatorSum::zero(2);
        s.add_term(term(re(1.0), "XZ"));
        s.add_term(term(re(2.0), "XZ"));
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&"XZ".parse().unwrap()), re(3.0));
        s.add_term(term(re(-3.0), "XZ"));
        assert!(s.is_empty());
        s.add_term(term(re(0.0), "ZZ"));
        assert!(s.is_empty());
    }

    #[test]
    fn text_dump_round_trip() {
        let s = OperatorSum::from_terms(
            4,
            [
                term(re(-1.0), "ZIII"),
                term(C64::new(0.5, -2.25), "XYZI"),
                term(C64::new(0.0, 1e-3), "IIIY"),
            ],
        )
        .unwrap();
        let text = s.to_text();
        assert!(text.contains("-1.0 ZIII"));
        assert_eq!(OperatorSum::from_text(&text).unwrap(), s);
    }

    #[test]
    fn symbolic_trace_inner_product() {
        let a = OperatorSum::from_terms(2, [term(re(1.0), "XI"), term(re(2.0), "ZZ")]).unwrap();
        let b = OperatorSum::from_terms(2, [term(re(3.0), "ZZ"), term(re(1.0), "YY")]).unwrap();
        assert_eq!(a.hs_inner(&b).unwrap(), re(24.0));
        assert_eq!(OperatorSum::identity(2, 1.0).hs_inner(&OperatorSum::identity(2, 1.0)).unwrap(), re(4.0));
    }
}
