mod common;

use cdddkit::grid::*;
use common::{corners, oracle_relation};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn cube_strategy(n: usize) -> impl Strategy<Value = (Vec<u8>, i32, Vec<i64>)> {
    (
        prop::collection::vec(0u8..3, n),
        -6i32..6,
        prop::collection::vec(-20i64..20, n),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn same_shift_cubes_are_nested_or_disjoint(
        n in 1usize..=2,
        seed in cube_strategy(2),
        j2 in -6i32..6,
        m2 in prop::collection::vec(-20i64..20, 2),
    ) {
        let thirds: Vec<u8> = seed.0[..n].to_vec();
        let shift = Shift::new(thirds.clone()).unwrap();
        let p = make_cube(&shift, seed.1, &seed.2[..n]).unwrap();
        // a second cube near p: an ancestor/descendant or a neighbour
        let q = if j2 >= seed.1 { p.ancestor(j2) } else { make_cube(&shift, j2, &m2[..n]).unwrap() };
        let r = relate(&p, &q).unwrap();
        prop_assert_ne!(r, Relation::Incomparable);
        let (pl, pe) = corners(&thirds, seed.1, &seed.2[..n]);
        let (ql, qe) = corners(&thirds, q.generation(), q.index());
        prop_assert_eq!(r, oracle_relation((&pl, pe), (&ql, qe)));
        prop_assert_eq!(p.lower_exact(), pl);
    }

    #[test]
    fn cross_shift_relation_matches_corners(a in cube_strategy(2), b in cube_strategy(2)) {
        let p = make_cube(&Shift::new(a.0.clone()).unwrap(), a.1, &a.2).unwrap();
        let q = make_cube(&Shift::new(b.0.clone()).unwrap(), b.1, &b.2).unwrap();
        let (pl, pe) = corners(&a.0, a.1, &a.2);
        let (ql, qe) = corners(&b.0, b.1, &b.2);
        prop_assert_eq!(relate(&p, &q).unwrap(), oracle_relation((&pl, pe), (&ql, qe)));
    }

    #[test]
    fn children_partition_parent((thirds, j, m) in cube_strategy(2), n in 1usize..=2) {
        let q = make_cube(&Shift::new(thirds[..n].to_vec()).unwrap(), j, &m[..n]).unwrap();
        let kids = q.children();
        prop_assert_eq!(kids.len(), 1 << n);
        let total = kids.iter().fold(Rat::zero(), |s, c| s + c.to_axis().volume());
        prop_assert_eq!(total, q.to_axis().volume());
        for (i, c) in kids.iter().enumerate() {
            prop_assert_eq!(c.edge_exact() * Rat::from_integer(2), q.edge_exact());
            prop_assert!(q.to_axis().contains(&c.to_axis()));
            prop_assert_eq!(&c.parent(), &q);
            for d in &kids[i + 1..] {
                prop_assert!(c.to_axis().disjoint(&d.to_axis()));
            }
        }
    }

    #[test]
    fn dominating_cube_contains_and_is_comparable(
        n in 1usize..=2,
        num in prop::collection::vec(-400i128..400, 2),
        den in 1i128..60,
        e_num in 1i128..200,
        e_den in 1i128..64,
    ) {
        let lower: Vec<Rat> = num[..n].iter().map(|&a| Rat::new(a, den)).collect();
        let p = AxisCube::new(lower, Rat::new(e_num, e_den)).unwrap();
        let (shift, q) = dominating_cube(&p).unwrap();
        prop_assert_eq!(q.shift(), &shift);
        prop_assert!(q.to_axis().contains(&p));
        let l = p.edge;
        prop_assert!(q.edge_exact() * Rat::from_integer(2) > l * Rat::from_integer(3));
        prop_assert!(q.edge_exact() <= l * Rat::from_integer(3));
        // the first hit in lexicographic shift order
        for s in Shift::all(n) {
            if s == shift {
                break;
            }
            prop_assert!(dominating_set(&p).iter().all(|c| c.shift() != &s));
        }
    }

    #[test]
    fn dom_multiplicity_within_bound(
        n in 1usize..=2,
        k in prop::sample::select(vec![1i128, 3]),
        picks in prop::collection::btree_set((0i64..8, 0i64..4), 1..10),
        start in -5i64..5,
    ) {
        let base: Vec<AxisCube> = picks
            .iter()
            .filter(|(_, y)| n == 2 || *y == 0)
            .map(|&(x, y)| {
                let mut lo = vec![Rat::from_integer((start + x) as i128)];
                if n == 2 {
                    lo.push(Rat::from_integer(y as i128));
                }
                AxisCube::new(lo, Rat::one()).unwrap()
            })
            .collect();
        prop_assume!(!base.is_empty());
        let v = dom_multiplicity(&base, Rat::from_integer(k)).unwrap();
        prop_assert!(v >= 1);
        prop_assert!(v as i128 <= (3 * k).pow(n as u32));
    }
}

#[test]
fn window_counts_follow_geometric_series() {
    for k in 0..8 {
        let w = GridWindow::interval(0.0, 1.0, -k, 0, vec![Shift::zero(1)]).unwrap();
        assert_eq!(w.count(), (1u128 << (k + 1)) - 1);
        assert_eq!(w.enumerate().unwrap().count() as u128, w.count());
    }
}

#[test]
fn window_cubes_meet_the_box() {
    let w = GridWindow::interval(-1.5, 2.25, -3, 1, Shift::all(1)).unwrap();
    for q in w.enumerate().unwrap() {
        assert!(q.upper()[0] > -1.5 && q.lower()[0] < 2.25, "{q}");
    }
}
