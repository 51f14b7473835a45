use proptest::prelude::*;

use zitter_core::dynamics::{energy_projectors, ClosedForm};
use zitter_core::operator_core::{anticommutator, c, commutator, mat_exp, spectral, ComplexMatrix};
use zitter_core::representations::{gfv_rebase_matrix, pseudo_adjoint, ModeOperators, RepresentationKind};

fn unit_disk_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((0.0..1.0f64, 0.0..std::f64::consts::TAU), dim * dim).prop_map(move |entries| {
        let values: Vec<_> = entries.iter().map(|&(r, phi)| c(r * phi.cos(), r * phi.sin())).collect();
        ComplexMatrix::from_row_major(&values)
    })
}

fn kind() -> impl Strategy<Value = RepresentationKind> {
    prop::sample::select(RepresentationKind::ALL.to_vec())
}

/// Modes with entries of order ten, where absolute tolerances are meaningful.
fn moderate_mode() -> impl Strategy<Value = ModeOperators> {
    (kind(), 1.0..5.0f64, prop::array::uniform3(-3.0..3.0f64), 0usize..4).prop_map(|(kind, m, p, n_idx)| {
        let n = [m / 2.0, m, 2.0 * m, 17.0][n_idx];
        ModeOperators::build(kind, m, p, Some(n)).unwrap()
    })
}

/// The full parameter box: m ∈ (0, 10], p ∈ [−10, 10]³.
fn any_mode() -> impl Strategy<Value = ModeOperators> {
    (kind(), 0.01..=10.0f64, prop::array::uniform3(-10.0..=10.0f64), 0usize..4).prop_map(|(kind, m, p, n_idx)| {
        let n = [m / 2.0, m, 2.0 * m, 17.0][n_idx];
        ModeOperators::build(kind, m, p, Some(n)).unwrap()
    })
}

/// Full momentum box with m ≥ 1/2, keeping ‖H‖/E below ~35.
fn conditioned_mode() -> impl Strategy<Value = ModeOperators> {
    (kind(), 0.5..=10.0f64, prop::array::uniform3(-10.0..=10.0f64), 0usize..4).prop_map(|(kind, m, p, n_idx)| {
        let n = [m / 2.0, m, 2.0 * m, 17.0][n_idx];
        ModeOperators::build(kind, m, p, Some(n)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn anticommutator_is_commutator_plus_twice_reversed_product(
        (a, b) in (1usize..=6).prop_flat_map(|d| (unit_disk_matrix(d), unit_disk_matrix(d)))
    ) {
        let lhs = anticommutator(&a, &b).unwrap();
        let rhs = &commutator(&a, &b).unwrap() + &(&b * &a).scale_re(2.0);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-14);
    }

    #[test]
    fn exponential_group_law(mode in moderate_mode(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let h = &mode.hamiltonian;
        let lhs = &mat_exp(h, c(0.0, -s)) * &mat_exp(h, c(0.0, -t));
        let rhs = mat_exp(h, c(0.0, -(s + t)));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-11, "{}", lhs.max_abs_diff(&rhs));
    }

    #[test]
    fn hamiltonian_spectrum_is_plus_minus_energy(mode in conditioned_mode()) {
        let d = spectral(&mode.hamiltonian).unwrap();
        let half = mode.dim() / 2;
        let e = mode.energy;
        for (k, lambda) in d.eigenvalues.iter().enumerate() {
            let expected = if k < half { e } else { -e };
            prop_assert!((lambda.re - expected).abs() <= 1e-12 * e && lambda.im.abs() <= 1e-12 * e, "{lambda} vs {expected}");
        }
        let scale = mode.hamiltonian.max_abs();
        prop_assert!(d.reconstruct().max_abs_diff(&mode.hamiltonian) <= 1e-12 * scale);
    }

    #[test]
    fn hamiltonians_are_pseudo_hermitian(mode in any_mode()) {
        prop_assert!(pseudo_adjoint(mode.kind, &mode.hamiltonian).max_abs_diff(&mode.hamiltonian) <= 1e-14);
    }

    #[test]
    fn gfv_rebase_intertwines_hamiltonians(
        // Below m ≈ 0.1 the N = m/2 entries (~p²/m) times |T⁻¹| (~N₂/N₁) push the f64 floor past 1e-11.
        m in prop_oneof![Just(0.0), 1.0..=10.0f64],
        p in prop::array::uniform3(-10.0..=10.0f64),
        i in 0usize..4,
        j in 0usize..4,
    ) {
        prop_assume!(m > 0.0 || p.iter().any(|&x| x != 0.0));
        let choices = |m: f64| if m > 0.0 { [m / 2.0, m, 2.0 * m, 17.0] } else { [0.5, 1.0, 2.0, 17.0] };
        let (n1, n2) = (choices(m)[i], choices(m)[j]);
        let h1 = ModeOperators::build(RepresentationKind::Gfv, m, p, Some(n1)).unwrap().hamiltonian;
        let h2 = ModeOperators::build(RepresentationKind::Gfv, m, p, Some(n2)).unwrap().hamiltonian;
        let t = gfv_rebase_matrix(n1, n2).unwrap();
        let t_inv = gfv_rebase_matrix(n2, n1).unwrap();
        let moved = &(&t * &h1) * &t_inv;
        prop_assert!(moved.max_abs_diff(&h2) <= 1e-11, "{}", moved.max_abs_diff(&h2));
    }

    #[test]
    fn sector_blocks_of_velocity_do_not_move(mode in moderate_mode(), t in 0.0..5.0f64) {
        let proj = energy_projectors(&mode).unwrap();
        let closed = ClosedForm::new(&mode).unwrap();
        let (v0, vt) = (closed.velocity(0.0), closed.velocity(t));
        for k in 0..3 {
            for lambda in [&proj.lambda_plus, &proj.lambda_minus] {
                let a = &(lambda * &v0[k]) * lambda;
                let b = &(lambda * &vt[k]) * lambda;
                prop_assert!(a.max_abs_diff(&b) <= 1e-12, "{}", a.max_abs_diff(&b));
            }
        }
    }

    #[test]
    fn off_sector_blocks_rotate_at_twice_the_energy(mode in moderate_mode(), t in 0.0..5.0f64) {
        // e^{iHt} Λ∓ v Λ± e^{−iHt} = e^{∓2iEt} Λ∓ v Λ±.
        let proj = energy_projectors(&mode).unwrap();
        let closed = ClosedForm::new(&mode).unwrap();
        let (v0, vt) = (closed.velocity(0.0), closed.velocity(t));
        let phase = c(0.0, -2.0 * mode.energy * t).exp();
        for k in 0..3 {
            for (left, right, expected) in [
                (&proj.lambda_minus, &proj.lambda_plus, phase),
                (&proj.lambda_plus, &proj.lambda_minus, phase.conj()),
            ] {
                let a = &(left * &v0[k]) * right;
                let b = &(left * &vt[k]) * right;
                prop_assert!(b.max_abs_diff(&a.scale(expected)) <= 1e-10, "{}", b.max_abs_diff(&a.scale(expected)));
            }
        }
    }
}
