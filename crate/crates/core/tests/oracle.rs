use iwahori::rank1_oracle::{
    fo_build_subgroup, fo_check_closed, fo_orbit_sizes, odd_primes_up_to, PrimeField, SubgroupCase, SubgroupRow,
};

#[test]
fn orbits_partition_the_projective_line() {
    for q in odd_primes_up_to(31) {
        let f = PrimeField::new(q).unwrap();
        for row in SubgroupRow::ALL {
            let s = fo_build_subgroup(&f, &SubgroupCase::standard(&f, row)).unwrap();
            assert_eq!(s.order() as u64, row.expected_order(q), "{row} at q = {q}");
            let sizes = fo_orbit_sizes(&f, &s).unwrap();
            assert_eq!(sizes.iter().sum::<usize>() as u64, q + 1);
        }
    }
}

#[test]
fn nonsplit_rows_as_printed() {
    for q in odd_primes_up_to(50) {
        let f = PrimeField::new(q).unwrap();
        let sizes = |row| fo_orbit_sizes(&f, &fo_build_subgroup(&f, &SubgroupCase::standard(&f, row)).unwrap()).unwrap();
        let whole = vec![q as usize + 1];
        let halves = vec![(q as usize + 1) / 2; 2];
        assert_eq!(sizes(SubgroupRow::Tn), whole);
        assert_eq!(sizes(SubgroupRow::TnWTn), whole);
        assert_eq!(sizes(SubgroupRow::WTnTn2), whole);
        assert_eq!(sizes(SubgroupRow::Tn2), halves);
        assert_eq!(sizes(SubgroupRow::WTn2Tn2), halves);
    }
}

#[test]
fn any_non_residue_gives_the_same_orbits() {
    let f = PrimeField::new(13).unwrap();
    for eps in (2..13).filter(|&e| !f.is_square(e)) {
        for row in [SubgroupRow::Tn, SubgroupRow::Tn2, SubgroupRow::WTnTn2] {
            let s = fo_build_subgroup(&f, &SubgroupCase { row, epsilon: Some(eps) }).unwrap();
            let standard = fo_build_subgroup(&f, &SubgroupCase::standard(&f, row)).unwrap();
            assert_eq!(fo_orbit_sizes(&f, &s).unwrap(), fo_orbit_sizes(&f, &standard).unwrap());
        }
    }
}

#[test]
fn psl2_is_generated_by_unipotents() {
    // closure of the two elementary unipotents is exactly the square-determinant subgroup
    let f = PrimeField::new(11).unwrap();
    let psl = fo_build_subgroup(&f, &SubgroupCase::standard(&f, SubgroupRow::Psl2)).unwrap();
    let gens = fo_check_closed(&f, &psl).unwrap();
    assert!(!gens.is_empty());
    let u = iwahori::rank1_oracle::Pgl2Elem::new(&f, [1, 1, 0, 1]).unwrap();
    let l = iwahori::rank1_oracle::Pgl2Elem::new(&f, [1, 0, 1, 1]).unwrap();
    let mut closure = std::collections::BTreeSet::from([iwahori::rank1_oracle::Pgl2Elem::identity()]);
    let mut frontier = vec![iwahori::rank1_oracle::Pgl2Elem::identity()];
    while let Some(x) = frontier.pop() {
        for g in [u, l] {
            let y = x.mul(&f, &g);
            if closure.insert(y) {
                frontier.push(y);
            }
        }
    }
    let elements: std::collections::BTreeSet<_> = psl.elements.iter().copied().collect();
    assert_eq!(closure, elements);
}
