//! Data shipped with the crate: the reference skill tree, the cross-domain
//! noise libraries and the four case fixtures.

use crate::environment::QuestionFixture;
use crate::registry::SkillTree;

pub const REFERENCE_TREE_JSON: &str = include_str!("../data/reference_tree.json");
pub const NOISE_STAGE1_JSON: &str = include_str!("../data/noise_stage1.json");
pub const NOISE_STAGE2_JSON: &str = include_str!("../data/noise_stage2.json");

pub const FIXTURE_F1_JSON: &str = include_str!("../data/fixtures/f1_ati_drought.json");
pub const FIXTURE_F2_JSON: &str = include_str!("../data/fixtures/f2_ndti_turbidity.json");
pub const FIXTURE_A1_JSON: &str = include_str!("../data/fixtures/a1_split_window.json");
pub const FIXTURE_A2_JSON: &str = include_str!("../data/fixtures/a2_water_vapor.json");

/// 5 kits, 104 tools.
pub fn reference_tree() -> SkillTree {
    SkillTree::from_json(REFERENCE_TREE_JSON).expect("bundled reference tree is valid")
}

/// 75 general-purpose tools (accounts, calendar, finance, healthcare, utilities).
pub fn noise_stage1() -> SkillTree {
    SkillTree::from_json(NOISE_STAGE1_JSON).expect("bundled noise manifest is valid")
}

/// 55 tools (advertising, business, music, entertainment).
pub fn noise_stage2() -> SkillTree {
    SkillTree::from_json(NOISE_STAGE2_JSON).expect("bundled noise manifest is valid")
}

pub fn fixture_f1() -> QuestionFixture {
    QuestionFixture::from_json(FIXTURE_F1_JSON).expect("bundled fixture is valid")
}

pub fn fixture_f2() -> QuestionFixture {
    QuestionFixture::from_json(FIXTURE_F2_JSON).expect("bundled fixture is valid")
}

pub fn fixture_a1() -> QuestionFixture {
    QuestionFixture::from_json(FIXTURE_A1_JSON).expect("bundled fixture is valid")
}

pub fn fixture_a2() -> QuestionFixture {
    QuestionFixture::from_json(FIXTURE_A2_JSON).expect("bundled fixture is valid")
}

/// F1, F2, A1, A2.
pub fn fixtures() -> Vec<QuestionFixture> {
    vec![fixture_f1(), fixture_f2(), fixture_a1(), fixture_a2()]
}
