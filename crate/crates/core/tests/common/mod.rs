#![allow(dead_code)]

use ifsdyn::ifs::parse_rational;
use ifsdyn::{MaskedSystem, MonotoneMap, OverlappingIfs, Rational, Variant};

pub fn r(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

#[derive(Clone, Debug)]
pub struct TestSystem {
    pub name: String,
    pub ifs: OverlappingIfs,
    pub q: Rational,
    /// Common slope when both maps are affine with equal slopes.
    pub ratio: Option<Rational>,
}

impl TestSystem {
    pub fn masked(&self, variant: Variant) -> MaskedSystem {
        MaskedSystem::new(self.ifs.clone(), self.q.clone(), variant).unwrap()
    }
}

pub const UNIFORM_RATIOS: [&str; 3] = ["3/5", "7/10", "4/5"];
pub const UNIFORM_MASKS: [&str; 2] = ["1/2", "11/20"];

pub fn uniform_systems() -> Vec<TestSystem> {
    let mut out = Vec::new();
    for a in UNIFORM_RATIOS {
        for q in UNIFORM_MASKS {
            out.push(TestSystem {
                name: format!("U({a}) q={q}"),
                ifs: OverlappingIfs::uniform(r(a)),
                q: r(q),
                ratio: Some(r(a)),
            });
        }
    }
    out
}

pub fn moebius() -> TestSystem {
    TestSystem {
        name: "moebius q=7/9".into(),
        ifs: OverlappingIfs::new(
            MonotoneMap::moebius(r("9"), r("0"), r("1"), r("10")),
            MonotoneMap::moebius(r("2"), r("3"), r("1"), r("4")),
        )
        .unwrap(),
        q: r("7/9"),
        ratio: None,
    }
}

pub fn unequal_affine() -> TestSystem {
    TestSystem {
        name: "affine 3/5,7/10 q=1/2".into(),
        ifs: OverlappingIfs::new(MonotoneMap::affine(r("3/5"), r("0")), MonotoneMap::affine(r("7/10"), r("3/10")))
            .unwrap(),
        q: r("1/2"),
        ratio: None,
    }
}

pub fn non_uniform_systems() -> Vec<TestSystem> {
    vec![moebius(), unequal_affine()]
}

pub fn all_systems() -> Vec<TestSystem> {
    let mut v = uniform_systems();
    v.extend(non_uniform_systems());
    v
}
