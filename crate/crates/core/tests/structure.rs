//! Common part and sufficient statistics on random tables.

mod support;

use num_traits::Zero;
use otbounds::entropy::{mutual_info_cond, shannon_cond};
use otbounds::structure::{common_part, sufficient_stat};
use otbounds::{MultiDist, Prob};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn common_part_is_computable_from_both_sides(j in support::arb_table(5, 5)) {
        let cp = common_part(&j).unwrap();
        for a in j.atoms() {
            prop_assert_eq!(cp.x_partition.class_of[a.x], cp.y_partition.class_of[a.y]);
        }
        let t = cp.joint_with(&j);
        prop_assert!(shannon_cond(&t.group(&[2], &[0]).unwrap()).abs() < 1e-12);
        prop_assert!(shannon_cond(&t.group(&[2], &[1]).unwrap()).abs() < 1e-12);
        let total: Prob = cp.dist.mass().iter().sum();
        prop_assert_eq!(total, num_traits::One::one());
    }

    #[test]
    fn class_names_are_smallest_members(j in support::arb_table(5, 4)) {
        for part in [common_part(&j).unwrap().x_partition, sufficient_stat(&j).unwrap()] {
            for (c, members) in part.members().into_iter().enumerate() {
                let smallest = members.iter().map(|&s| j.x_alphabet().symbol(s)).min().unwrap();
                prop_assert_eq!(part.classes.symbol(c), smallest);
            }
        }
    }

    #[test]
    fn sufficient_statistic_separates_x_from_y(j in support::arb_table(5, 4)) {
        let k = sufficient_stat(&j).unwrap();
        let class_of = k.class_of.clone();
        let t: MultiDist = MultiDist::from_joint(&j).with_function(k.classes.clone(), move |i| class_of[i[0]].unwrap());
        prop_assert!(mutual_info_cond(&t, &[0], &[1], &[2]).unwrap() < 1e-12);
        // Exactly: P(x, y) P(k) = P(x, k) P(k, y) on every cell.
        let pxk = t.group(&[0], &[2]).unwrap();
        let pky = t.group(&[2], &[1]).unwrap();
        let pk = t.group(&[2], &[]).unwrap().marginal_x();
        for a in j.atoms() {
            let kx = k.class_label(a.x).unwrap().as_str().to_string();
            let xs = j.x_alphabet().symbol(a.x).as_str();
            let ys = j.y_alphabet().symbol(a.y).as_str();
            let lhs = &a.mass * pk.get(&kx);
            let rhs = pxk.get(xs, &kx) * pky.get(&kx, ys);
            prop_assert!((lhs - rhs).is_zero());
        }
        // Classes never merge rows that differ.
        prop_assert!(k.class_count() <= j.marginal_x().support_size());
    }
}
