//! Shared corpus and direct language predicates for the integration tests.
#![allow(dead_code)]

use layered_core::dpa::dpa_to_layered;
use layered_core::fixtures::{self, FixtureLanguage};
use layered_core::{Dpa, LayeredAutomaton, UpWord};

/// Min-parity over the letters `1..=d` (letter index `i` is priority `i + 1`).
pub fn parity_oracle(w: &UpWord) -> bool {
    let min = w.period().iter().min().expect("non-empty period");
    (min + 1).is_multiple_of(2)
}

/// Two-strand language over `a1..ak, b1..bk, c` (indices `0..k`, `k..2k`, `2k`): one strand
/// occurs finitely often and the least index of the other strand occurring infinitely often
/// (or `k + 1`) is even.
pub fn two_strand_oracle(k: usize, w: &UpWord) -> bool {
    let v = w.period();
    let a_inf: Vec<usize> = v.iter().filter(|&&l| l < k).map(|&l| l + 1).collect();
    let b_inf: Vec<usize> = v.iter().filter(|&&l| l >= k && l < 2 * k).map(|&l| l - k + 1).collect();
    if !a_inf.is_empty() && !b_inf.is_empty() {
        return false;
    }
    let m = a_inf.iter().chain(&b_inf).copied().min().unwrap_or(k + 1);
    m % 2 == 0
}

/// An automaton of the corpus with an optional direct membership predicate.
pub struct Case {
    pub name: String,
    pub automaton: LayeredAutomaton,
    pub dpa: Option<Dpa>,
    pub oracle: Option<Box<dyn Fn(&UpWord) -> bool + Sync>>,
}

pub fn fixture_dpas() -> Vec<(String, Dpa)> {
    let mut out: Vec<(String, Dpa)> = FixtureLanguage::ALL
        .iter()
        .map(|l| (format!("{l:?}"), l.dpa()))
        .collect();
    out.push(("L2-alt".into(), fixtures::l2_alt_dpa()));
    for d in 1..=3 {
        out.push((format!("parity({d})"), fixtures::gen_parity(d).unwrap()));
    }
    out
}

fn oracle_for(name: &str) -> Option<Box<dyn Fn(&UpWord) -> bool + Sync>> {
    if name.starts_with("parity") {
        return Some(Box::new(parity_oracle));
    }
    let lang = match name {
        "L2-alt" => FixtureLanguage::L2,
        n => FixtureLanguage::parse(n).ok()?,
    };
    Some(Box::new(move |w| fixtures::fixture_oracle(lang, w).unwrap()))
}

/// Fixture DPAs (converted), the hand-built L1 automaton and the two-strand family.
pub fn fixture_cases() -> Vec<Case> {
    let mut out: Vec<Case> = fixture_dpas()
        .into_iter()
        .map(|(name, d)| Case {
            automaton: dpa_to_layered(&d),
            oracle: oracle_for(&name),
            dpa: Some(d),
            name,
        })
        .collect();
    out.push(Case {
        name: "L1 (hand-built)".into(),
        automaton: fixtures::l1_layered(),
        dpa: None,
        oracle: oracle_for("L1"),
    });
    for k in 1..=3 {
        out.push(Case {
            name: format!("two-strand({k})"),
            automaton: fixtures::gen_two_strand(k).unwrap(),
            dpa: None,
            oracle: Some(Box::new(move |w| two_strand_oracle(k, w))),
        });
    }
    out
}

/// Conversions of random DPAs with at most 5 states over two letters and priorities up to 4.
pub fn random_cases(count: u64) -> Vec<Case> {
    (0..count)
        .map(|seed| {
            let states = 1 + (seed % 5) as usize;
            let d = 1 + (seed % 4) as u32;
            let dpa = fixtures::gen_random_dpa(seed, states, 2, d).unwrap();
            Case {
                name: format!("random({seed})"),
                automaton: dpa_to_layered(&dpa),
                dpa: Some(dpa),
                oracle: None,
            }
        })
        .collect()
}

pub mod lemmas;

/// Up-words over `size` letters with `|u| ≤ max_prefix` and `1 ≤ |v| ≤ max_period`.
pub fn words(size: usize, max_prefix: usize, max_period: usize) -> Vec<UpWord> {
    UpWord::enumerate(size, max_prefix, max_period)
}

/// First failure of a check over many items, as a message.
pub fn first_failure<T>(items: impl IntoIterator<Item = T>, mut check: impl FnMut(T) -> Result<(), String>) -> Result<usize, String> {
    let mut n = 0;
    for it in items {
        check(it)?;
        n += 1;
    }
    Ok(n)
}
