//! Cross-module properties checked against independent oracles.

use planebundles::exactalg::{DenseMatrix, FieldCtx};
use planebundles::families::{kaneyama_normalized_splitting, random_c1_zero, FamilySpec};
use planebundles::groupact::{isomorphic, pullback, sample, GroupElement, Subgroup};
use planebundles::jumploci::{scan, ScanMode};
use planebundles::projgeom::{enumerate_lines, random_line, LineP2};
use planebundles::splitting::{restrict, splitting_on, splitting_type, splitting_type_h0};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const Q: FieldCtx = FieldCtx::Rationals;
const F7: FieldCtx = FieldCtx::Prime(7);

fn build(s: &str, ctx: FieldCtx) -> planebundles::presentation::Presentation {
    FamilySpec::parse(s).unwrap().build(ctx).unwrap()
}

#[test]
fn kaneyama_table_over_f7() {
    let lines: Vec<LineP2> = enumerate_lines(F7).unwrap().collect();
    for a in 1..=4 {
        for b in a..=4 {
            for c in b..=4 {
                let p = build(&format!("kaneyama:{a},{b},{c}"), F7).normalize().0;
                for l in &lines {
                    assert_eq!(splitting_on(&p, l).unwrap(), kaneyama_normalized_splitting(a, b, c, l), "E({a},{b},{c}) on {l}");
                }
            }
        }
    }
}

#[test]
fn en_is_a_twisted_permuted_kaneyama_bundle() {
    // Row i of the substitution is the image of variable i: x -> y, y -> z, z -> x.
    let sigma = GroupElement::new(DenseMatrix::from_i64(Q, 3, 3, &[0, 1, 0, 0, 0, 1, 1, 0, 0]), Subgroup::Full).unwrap();
    for n in 1..=4 {
        let en = build(&format!("en:{n}"), Q);
        let k = pullback(&build(&format!("kaneyama:1,1,{n}"), Q).twist(-n), &sigma);
        assert_eq!(k.entries(), en.entries());
        let w = isomorphic(&en, &k).witness().cloned().expect("isomorphic");
        assert!(w.verify(&en, &k));
    }
}

#[test]
fn nearly_free_11_is_the_twisted_tangent_bundle() {
    let nf = build("nf:1,1", Q);
    let e1 = build("en:1", Q);
    assert!(isomorphic(&e1, &nf).witness().is_none(), "degrees differ before the twist");
    let aligned = nf.twist(1);
    let w = isomorphic(&e1, &aligned).witness().cloned().unwrap();
    assert!(w.verify(&e1, &aligned));
}

#[test]
fn jumping_lines_move_with_the_group() {
    let p = build("en:3", F7);
    let base = scan(&p, ScanMode::Exhaustive).unwrap();
    for seed in 0..4 {
        let g = sample(&Subgroup::Full, F7, seed);
        let moved = scan(&pullback(&p, &g), ScanMode::Exhaustive).unwrap();
        let inv = g.inverse();
        let mut expected: Vec<LineP2> = base.jumps.iter().map(|j| inv.apply_line(&j.line)).collect();
        expected.sort();
        let got: Vec<LineP2> = moved.jumps.iter().map(|j| j.line.clone()).collect();
        assert_eq!(got, expected);
        assert_eq!(moved.generic, base.generic);
    }
}

#[test]
fn oracles_agree_on_random_presentations() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let lines: Vec<LineP2> = enumerate_lines(F7).unwrap().collect();
    for _ in 0..40 {
        let p = random_c1_zero(F7, &mut rng);
        for l in &lines {
            let q = restrict(&p, l).unwrap();
            let s = splitting_type(&q);
            assert_eq!(s, splitting_type_h0(&q));
            assert_eq!(s.a + s.b, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kaneyama_closed_form_on_rational_lines(a in 1i64..=4, db in 0i64..=2, dc in 0i64..=2, seed in 0u64..10_000) {
        let (b, c) = (a + db, a + db + dc);
        let p = build(&format!("kaneyama:{a},{b},{c}"), Q).normalize().0;
        let l = random_line(Q, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(splitting_on(&p, &l).unwrap(), kaneyama_normalized_splitting(a, b, c, &l));
    }

    #[test]
    fn pullback_round_trip_is_isomorphic(seed in 0u64..1000, which in 0usize..4) {
        let spec = ["en:2", "kaneyama:1,2,3", "nf:1,2", "ex62:r=1"][which];
        let p = build(spec, Q);
        let g = sample(&Subgroup::Full, Q, seed);
        let back = pullback(&pullback(&p, &g), &g.inverse());
        let w = isomorphic(&p, &back).witness().cloned();
        prop_assert!(w.is_some_and(|w| w.verify(&p, &back)));
    }

    #[test]
    fn chern_and_stability_survive_pullback(seed in 0u64..1000) {
        let p = build("ex61:r=2,k=1,c1=0", Q);
        let g = sample(&Subgroup::Full, Q, seed);
        let pb = pullback(&p, &g);
        prop_assert_eq!(pb.chern(), p.chern());
        prop_assert_eq!(pb.stability_class(), p.stability_class());
    }
}
