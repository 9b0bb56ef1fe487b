//! Word lists and WEAT specs bundled with the crate.

use crate::embedding::{parse_pairs, parse_word_list};
use crate::eval::WeatSpec;

const DEFINITIONAL_PAIRS: &str = include_str!("../data/definitional_pairs.txt");
const GENDER_SPECIFIC: &str = include_str!("../data/gender_specific.txt");
const WEAT_SPECS: [&str; 3] = [
    include_str!("../data/weat_b1.json"),
    include_str!("../data/weat_b2.json"),
    include_str!("../data/weat_b3.json"),
];

/// Gender-definitional pairs, male form first.
pub fn definitional_pairs() -> Vec<(String, String)> {
    parse_pairs(DEFINITIONAL_PAIRS, std::path::Path::new("definitional_pairs.txt")).expect("bundled pair list parses")
}

pub fn male_words() -> Vec<String> {
    definitional_pairs().into_iter().map(|(m, _)| m).collect()
}

pub fn female_words() -> Vec<String> {
    definitional_pairs().into_iter().map(|(_, f)| f).collect()
}

/// Words left untouched by debiasing.
pub fn gender_specific_words() -> Vec<String> {
    parse_word_list(GENDER_SPECIFIC)
}

/// Career vs family, math vs arts, science vs arts.
pub fn weat_specs() -> Vec<WeatSpec> {
    WEAT_SPECS
        .iter()
        .map(|s| WeatSpec::from_json(s).expect("bundled WEAT spec is valid"))
        .collect()
}
