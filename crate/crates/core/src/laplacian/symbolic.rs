//! Formal expansion of `(∂ + g ∂̃^α)²` into Liouville/Weyl words, ignoring
//! weight factors.
//!
//! Adjacent factors of the same kind merge (`∂^a ∂^b = ∂^{a+b}`, likewise for
//! `∂̄`), an ordinary `∂` merges into a neighbouring `∂^a` as `∂^{a+1}` and
//! into a neighbouring `∂̄^a` as `-∂̄^{a+1}` since `∂ = -∂̄¹`. Mixed
//! Liouville–Weyl words stay ordered.

use std::collections::BTreeMap;
use std::fmt;

/// Order `integer + alphas·α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymOrder {
    pub integer: i32,
    pub alphas: i32,
}

impl fmt::Display for SymOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.alphas {
            0 => String::new(),
            1 => "α".into(),
            k => format!("{k}α"),
        };
        match (a.is_empty(), self.integer) {
            (true, i) => write!(f, "{i}"),
            (false, 0) => write!(f, "{a}"),
            (false, i) => write!(f, "{a}+{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Ordinary(i32),
    Liouville(SymOrder),
    Weyl(SymOrder),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Ordinary(1) => write!(f, "∂"),
            Factor::Ordinary(k) => write!(f, "∂^{k}"),
            Factor::Liouville(o) => write!(f, "∂^{{{o}}}"),
            Factor::Weyl(o) => write!(f, "∂̄^{{{o}}}"),
        }
    }
}

/// One normalized operator word with its coefficient `coeff · g^g_power`,
/// summed over all contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub word: Vec<Factor>,
    pub coeffs: BTreeMap<u32, f64>,
}

impl Piece {
    pub fn label(&self) -> String {
        self.word.iter().map(Factor::to_string).collect()
    }
}

type Monomial = (f64, u32, Vec<Factor>);

fn merge(a: Factor, b: Factor) -> Option<(f64, Factor)> {
    use Factor::*;
    let add = |o: SymOrder, k: i32| SymOrder { integer: o.integer + k, alphas: o.alphas };
    let sum = |x: SymOrder, y: SymOrder| SymOrder { integer: x.integer + y.integer, alphas: x.alphas + y.alphas };
    match (a, b) {
        (Ordinary(i), Ordinary(j)) => Some((1.0, Ordinary(i + j))),
        (Ordinary(i), Liouville(o)) | (Liouville(o), Ordinary(i)) => Some((1.0, Liouville(add(o, i)))),
        (Ordinary(i), Weyl(o)) | (Weyl(o), Ordinary(i)) => Some((if i % 2 == 0 { 1.0 } else { -1.0 }, Weyl(add(o, i)))),
        (Liouville(x), Liouville(y)) => Some((1.0, Liouville(sum(x, y)))),
        (Weyl(x), Weyl(y)) => Some((1.0, Weyl(sum(x, y)))),
        _ => None,
    }
}

fn normalize(coeff: f64, word: &[Factor]) -> (f64, Vec<Factor>) {
    let mut c = coeff;
    let mut out: Vec<Factor> = Vec::new();
    for &f in word {
        match out.last().and_then(|&last| merge(last, f)) {
            Some((sign, merged)) => {
                c *= sign;
                *out.last_mut().expect("non-empty") = merged;
            }
            None => out.push(f),
        }
    }
    (c, out)
}

/// Pieces of `(Σ monomials)²`, collected by normalized word; pieces whose
/// coefficients cancel entirely are dropped.
pub fn square(terms: &[Monomial]) -> Vec<Piece> {
    let mut acc: BTreeMap<Vec<Factor>, BTreeMap<u32, f64>> = BTreeMap::new();
    for (c1, g1, w1) in terms {
        for (c2, g2, w2) in terms {
            let word: Vec<Factor> = w1.iter().chain(w2).copied().collect();
            let (c, word) = normalize(c1 * c2, &word);
            *acc.entry(word).or_default().entry(g1 + g2).or_insert(0.0) += c;
        }
    }
    acc.into_iter()
        .map(|(word, mut coeffs)| {
            coeffs.retain(|_, v| *v != 0.0);
            Piece { word, coeffs }
        })
        .filter(|p| !p.coeffs.is_empty())
        .collect()
}

/// `(∂ + g·½(∂^α - ∂̄^α))²`.
pub fn two_term_square() -> Vec<Piece> {
    let alpha = SymOrder { integer: 0, alphas: 1 };
    let terms: Vec<Monomial> = vec![
        (1.0, 0, vec![Factor::Ordinary(1)]),
        (0.5, 1, vec![Factor::Liouville(alpha)]),
        (-0.5, 1, vec![Factor::Weyl(alpha)]),
    ];
    square(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_term_square_has_seven_pieces() {
        let pieces = two_term_square();
        let mut labels: Vec<String> = pieces.iter().map(Piece::label).collect();
        labels.sort();
        let mut expected = vec!["∂^2", "∂^{α+1}", "∂̄^{α+1}", "∂^{2α}", "∂^{α}∂̄^{α}", "∂̄^{α}∂^{α}", "∂̄^{2α}"];
        expected.sort();
        assert_eq!(labels, expected);
    }

    #[test]
    fn coefficients() {
        let pieces = two_term_square();
        let get = |label: &str| pieces.iter().find(|p| p.label() == label).unwrap().coeffs.clone();
        assert_eq!(get("∂^2"), BTreeMap::from([(0, 1.0)]));
        assert_eq!(get("∂^{α+1}"), BTreeMap::from([(1, 1.0)]));
        // ∂ ∂̄^α = -∂̄^{α+1}, entering with coefficient -½ twice
        assert_eq!(get("∂̄^{α+1}"), BTreeMap::from([(1, 1.0)]));
        assert_eq!(get("∂^{α}∂̄^{α}"), BTreeMap::from([(2, -0.25)]));
        assert_eq!(get("∂̄^{2α}"), BTreeMap::from([(2, 0.25)]));
    }
}
