//! Cross-module identities beyond the acceptance gate: coefficient-wise
//! program products, structural size bounds, and the assignment-sum
//! reading of the block permanent.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cayley::abp::hadamard_abp;
use cayley::graph::{build_cperm_abp, near, DEFAULT_COMPONENT_CAP};
use cayley::nisan::abp_complexity;
use cayley::sat::{assignment_sum, barber_matrix, cnf_program};
use cayley::sym::hammon_abp;
use cayley::VarTable;

use common::*;

#[test]
fn hadamard_product_matches_coefficientwise_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let mut table = VarTable::new();
        let (a, _, _) = random_certified_abp(&mut rng, &mut table);
        let (b, _, _) = random_certified_abp(&mut rng, &mut table);
        let product = hadamard_abp(&a, &b);
        assert!(product.size() <= a.size() * b.size());
        assert_eq!(
            product.expand().unwrap(),
            a.expand().unwrap().hadamard(&b.expand().unwrap())
        );
    }
}

#[test]
fn cover_program_size_stays_under_the_state_bound() {
    for n in [4usize, 6, 8, 10] {
        for inv in all_involutions(n) {
            let mut table = VarTable::new();
            let g = inv.to_graph(&mut table);
            let abp = build_cperm_abp(&g, false, DEFAULT_COMPONENT_CAP).unwrap();
            let cap = DEFAULT_COMPONENT_CAP;
            let bound = (n + 1) * (cap + 1).pow((near(&g) + cap) as u32);
            assert!(abp.size() <= bound, "n = {n}");
        }
    }
}

#[test]
fn block_permanent_equals_assignment_sum_on_random_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let cnf = random_bounded_cnf(&mut rng, 5, 5);
        let pp = cnf_program(&cnf);
        let unsigned = barber_matrix(&pp, false);
        let covers = unsigned.block_cperm().unwrap();
        assert_eq!(covers, assignment_sum(&pp).unwrap(), "{cnf:?}");
        let signed = barber_matrix(&pp, true);
        assert_eq!(signed.block_cdet().unwrap(), covers, "{cnf:?}");
    }
}

#[test]
fn rank_sum_lower_bounds_the_product_fan_program() {
    for n in 1..=3usize {
        let mut table = VarTable::new();
        let abp = hammon_abp(n, &mut table);
        let f = abp.expand().unwrap();
        assert!(abp_complexity(&f).unwrap() <= abp.size());
    }
}

#[test]
fn random_graph_programs_expand_to_homogeneous_cover_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let mut table = VarTable::new();
        let g = random_component_graph(&mut rng, 7, 3, &mut table);
        let abp = build_cperm_abp(&g, false, DEFAULT_COMPONENT_CAP).unwrap();
        let f = abp.expand().unwrap();
        if f.is_zero() {
            continue;
        }
        // Every cycle cover uses exactly one out-edge per vertex.
        assert_eq!(f.homogeneous_degree(), Some(g.n()));
    }
}
