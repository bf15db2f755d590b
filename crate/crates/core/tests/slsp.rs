use std::collections::BTreeMap;

use iwahori::hecke_module::{m_check_tw_formula, m_generation_check, m_verify_relations};
use iwahori::coxeter::AffinePermutation;
use iwahori::orbit_graph::{og_orbit_act, og_validate};
use iwahori::spaces::{sp_build_slsp, sp_enumerate_antisym, sp_mm_mul, MonomialMatrix, SymSpaceDescriptor};

fn layers(lengths: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for l in lengths {
        *out.entry(l).or_default() += 1;
    }
    out
}

#[test]
fn bfs_matches_enumeration_for_sizes_four_and_six() {
    for (n, max) in [(2, 12), (3, 9)] {
        let g = sp_build_slsp(&SymSpaceDescriptor::slsp(n, max)).unwrap();
        assert!(og_validate(&g).is_empty());
        let from_graph = layers(g.vertices().iter().map(|v| v.l_sigma as usize + 1));
        let from_enum = layers(sp_enumerate_antisym(2 * n, max).iter().map(|m| m.length()));
        assert_eq!(from_graph, from_enum, "2n = {}", 2 * n);
    }
}

#[test]
fn size_six_minimal_length_is_three() {
    let first = sp_enumerate_antisym(6, 5);
    assert_eq!(first[0].length(), 3);
}

#[test]
fn size_four_layer_sizes() {
    let g = sp_build_slsp(&SymSpaceDescriptor::slsp(2, 14)).unwrap();
    let counts = layers(g.vertices().iter().map(|v| v.l_sigma as usize + 1));
    let expected: BTreeMap<usize, usize> = (1..=7).map(|k| (2 * k, 2 * k)).collect();
    assert_eq!(counts, expected);
}

#[test]
fn size_six_relations_and_generation() {
    let g = sp_build_slsp(&SymSpaceDescriptor::slsp(3, 11)).unwrap();
    let report = m_verify_relations(&g, 3).unwrap();
    assert!(report.is_clean());
    assert!(report.records.iter().any(|r| r.check == iwahori::hecke_module::CheckKind::Braid));
    let generation = m_generation_check(&g, u32::MAX);
    assert!(generation.is_clean(), "{:?}", generation.exceptions);
    assert!(generation.minimal.iter().all(|&v| g.l_sigma(v) == 2));
}

#[test]
fn conjugation_matches_matrix_product() {
    // s × x agrees with the vertex of s·x·sᵗ
    let g = sp_build_slsp(&SymSpaceDescriptor::slsp(2, 10)).unwrap();
    let all = sp_enumerate_antisym(4, 10);
    for x in all.iter().filter(|m| m.length() <= 8) {
        let v = g.find(&x.antisym_label()).unwrap();
        for s in 0..4 {
            let gen = MonomialMatrix::generator(4, s).unwrap();
            let y = sp_mm_mul(&sp_mm_mul(&gen, x).unwrap(), &gen.transpose()).unwrap();
            let w = AffinePermutation::from_word(4, &[s]).unwrap();
            let target = og_orbit_act(&g, &w, v).unwrap();
            assert_eq!(g.vertex(target).label, y.canonical_antisym().antisym_label());
        }
    }
}

#[test]
fn simple_up_steps_give_basis_vectors() {
    let g = sp_build_slsp(&SymSpaceDescriptor::slsp(2, 10)).unwrap();
    for v in g.interior().collect::<Vec<_>>() {
        for s in 0..4 {
            let tr = g.transition(v, s).unwrap();
            if tr.kind == iwahori::TransitionKind::SimpleUp {
                let w = AffinePermutation::from_word(4, &[s]).unwrap();
                assert!(m_check_tw_formula(&g, &w, v).unwrap());
            }
        }
    }
}
