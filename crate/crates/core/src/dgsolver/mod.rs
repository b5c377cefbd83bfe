//! Nodal DG discretization: meshes, fields, the flux-differencing residual,
//! boundary treatment, limiters and diagnostics.

pub mod boundary;
pub mod diagnostics;
pub mod field;
pub mod limiter;
pub mod mesh;
pub mod parallel;
pub mod residual;

pub use diagnostics::{integrals, l1_error, l1_error_in, reconnection_flux, total_entropy, ErrorNorm, Quantity};
pub use field::{project_initial, SolutionField};
pub use limiter::{
    apply_limiters, bound_preserving_limit, cell_averages, scaled_slope_limit, slope_limit, LimiterConfig, SlopeKind,
};
pub use mesh::{Axis, BoundaryKind, Mesh};
pub use residual::{DgSolver, Forcing, InterfaceFlux, SourceConfig};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{em, EmState, FullPrim, GasParams, SpeciesPrim, EM, ION, NVAR};
    use std::f64::consts::PI;

    fn periodic(n: usize) -> Axis {
        Axis::uniform(0.0, 1.0, n, BoundaryKind::Periodic, BoundaryKind::Periodic).unwrap()
    }

    fn smooth_ic(x: f64, y: f64) -> FullPrim {
        let s = (2.0 * PI * (x + 0.5 * y)).sin();
        FullPrim {
            ion: SpeciesPrim::new(2.0 + s, 0.5, 0.1 * s, 0.0, 1.0 + 0.2 * s),
            electron: SpeciesPrim::new(2.0 - 0.5 * s, 0.3, 0.0, -0.2, 1.0),
            em: EmState { by: 2.0 * s, ez: -s, bx: 0.3, ..EmState::default() },
        }
    }

    fn constant_ic(_: f64, _: f64) -> FullPrim {
        FullPrim {
            ion: SpeciesPrim::new(1.3, 0.2, -0.4, 0.1, 0.7),
            electron: SpeciesPrim::new(0.6, -0.3, 0.1, 0.5, 1.1),
            em: EmState::from_array(&[0.2, -0.1, 0.4, 0.3, -0.2, 0.1, 0.05, -0.05]),
        }
    }

    fn no_sources() -> SourceConfig {
        SourceConfig { lorentz: false, resistive: false, forcing: None }
    }

    #[test]
    fn free_stream_is_preserved() {
        for k in 1..=3 {
            let s1 = DgSolver::new(Mesh::one_d(periodic(5)), k, GasParams::default()).unwrap().with_sources(no_sources());
            let f = s1.project(constant_ic).unwrap();
            let r = s1.residual(&f, 0.0).unwrap();
            let m = r.data.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
            assert!(m < 1e-13, "1D k={k}: {m}");
            let s2 = DgSolver::new(Mesh::two_d(periodic(3), periodic(4)), k, GasParams::default())
                .unwrap()
                .with_sources(no_sources());
            let f = s2.project(constant_ic).unwrap();
            let r = s2.residual(&f, 0.0).unwrap();
            assert!(r.data.iter().flatten().all(|x| x.abs() < 1e-13), "2D k={k}");
        }
    }

    #[test]
    fn neumann_free_stream() {
        let ax = Axis::uniform(-1.0, 1.0, 4, BoundaryKind::Neumann, BoundaryKind::Neumann).unwrap();
        let s = DgSolver::new(Mesh::one_d(ax), 2, GasParams::default()).unwrap().with_sources(no_sources());
        let f = s.project(constant_ic).unwrap();
        assert!(s.residual(&f, 0.0).unwrap().data.iter().flatten().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn entropy_conservation_with_ec_interfaces() {
        let p = GasParams::default();
        let s = DgSolver::new(Mesh::one_d(periodic(8)), 2, p)
            .unwrap()
            .with_interface(InterfaceFlux::EntropyConservative)
            .with_sources(no_sources());
        let f = s.project(|x, _| smooth_ic(x, 0.0)).unwrap();
        let r = s.residual(&f, 0.0).unwrap();
        let rate = s.entropy_rate(&f, &r).unwrap();
        let scale = s.entropy_rate_scale(&f, &r).unwrap();
        assert!(rate.abs() < 1e-12 * scale.max(1.0), "rate {rate} scale {scale}");

        let s2 = DgSolver::new(Mesh::two_d(periodic(4), periodic(4)), 2, p)
            .unwrap()
            .with_interface(InterfaceFlux::EntropyConservative)
            .with_sources(no_sources());
        let f = s2.project(smooth_ic).unwrap();
        let r = s2.residual(&f, 0.0).unwrap();
        let rate = s2.entropy_rate(&f, &r).unwrap();
        let scale = s2.entropy_rate_scale(&f, &r).unwrap();
        assert!(rate.abs() < 1e-12 * scale.max(1.0), "2D rate {rate} scale {scale}");

        let llf = s2.clone().with_interface(InterfaceFlux::Llf);
        let r = llf.residual(&f, 0.0).unwrap();
        assert!(llf.entropy_rate(&f, &r).unwrap() < 0.0);
    }

    #[test]
    fn two_d_reduces_to_one_d() {
        let p = GasParams::default();
        let s1 = DgSolver::new(Mesh::one_d(periodic(6)), 3, p).unwrap();
        let s2 = DgSolver::new(Mesh::two_d(periodic(6), periodic(2)), 3, p).unwrap();
        let f1 = s1.project(|x, _| smooth_ic(x, 0.0)).unwrap();
        let f2 = s2.project(|x, _| smooth_ic(x, 0.0)).unwrap();
        let r1 = s1.residual(&f1, 0.0).unwrap();
        let r2 = s2.residual(&f2, 0.0).unwrap();
        let n = 4;
        for e in 0..f2.elements() {
            let ix = e % 6;
            for q in 0..n {
                for pp in 0..n {
                    let a = r2.data[f2.index(e, pp, q)];
                    let b = r1.data[f1.index(ix, pp, 0)];
                    for k in 0..NVAR {
                        assert!((a[k] - b[k]).abs() < 1e-13 * (1.0 + b[k].abs()), "e={e} k={k}: {} vs {}", a[k], b[k]);
                    }
                }
            }
        }
    }

    #[test]
    fn periodic_residual_is_conservative() {
        let s = DgSolver::new(Mesh::two_d(periodic(3), periodic(3)), 2, GasParams::default())
            .unwrap()
            .with_sources(no_sources());
        let f = s.project(smooth_ic).unwrap();
        let r = s.residual(&f, 0.0).unwrap();
        let total = integrals(&s, &r);
        assert!(total.iter().all(|x| x.abs() < 1e-12), "{total:?}");
    }

    #[test]
    fn threaded_residual_is_bitwise_serial() {
        let s = DgSolver::new(Mesh::two_d(periodic(5), periodic(3)), 2, GasParams::default()).unwrap();
        let f = s.project(smooth_ic).unwrap();
        let a = s.clone().with_threads(1).residual(&f, 0.0).unwrap();
        let b = s.with_threads(4).residual(&f, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn slope_limiter_properties() {
        let s = DgSolver::new(Mesh::one_d(periodic(32)), 2, GasParams::default()).unwrap();
        let smooth = s.project(|x, _| smooth_ic(x, 0.0)).unwrap();
        let mut lim = smooth.clone();
        slope_limit(&s, &mut lim, 1000.0);
        assert_eq!(lim, smooth);

        let ax = Axis::uniform(-0.5, 0.5, 20, BoundaryKind::Neumann, BoundaryKind::Neumann).unwrap();
        let s = DgSolver::new(Mesh::one_d(ax), 3, GasParams::default()).unwrap();
        let step = |x: f64, _| {
            let r = if x < 0.013 { 1.0 } else { 0.125 };
            FullPrim { ion: SpeciesPrim::at_rest(r, r), electron: SpeciesPrim::at_rest(r, r), em: EmState::default() }
        };
        // A cubic overshoot on top of the step.
        let mut f = s.project(step).unwrap();
        for (i, u) in f.data.iter_mut().enumerate() {
            u[ION] += 0.01 * ((i % 4) as f64 - 1.5).powi(3);
        }
        let before = cell_averages(&s, &f);
        slope_limit(&s, &mut f, 0.0);
        let after = cell_averages(&s, &f);
        for (a, b) in before.iter().zip(&after) {
            for k in 0..NVAR {
                assert!((a[k] - b[k]).abs() < 1e-14);
            }
        }
        for e in 0..f.elements() {
            let lo = after[e.saturating_sub(1)][ION].min(after[(e + 1).min(19)][ION]).min(after[e][ION]);
            let hi = after[e.saturating_sub(1)][ION].max(after[(e + 1).min(19)][ION]).max(after[e][ION]);
            let el = f.element(e);
            if el.windows(2).any(|w| (w[1][ION] - w[0][ION]) * (el[3][ION] - el[0][ION]) < -1e-14) {
                panic!("non-monotone limited cell {e}");
            }
            for u in el {
                assert!(u[ION] >= lo - 1e-12 && u[ION] <= hi + 1e-12, "cell {e}");
            }
        }
    }

    #[test]
    fn scaled_limiter_keeps_means_and_lowers_entropy() {
        let s = DgSolver::new(Mesh::one_d(periodic(32)), 2, GasParams::default()).unwrap();
        let smooth = s.project(|x, _| smooth_ic(x, 0.0)).unwrap();
        let mut lim = smooth.clone();
        scaled_slope_limit(&s, &mut lim, 1000.0);
        assert_eq!(lim, smooth);

        let ax = Axis::uniform(-0.5, 0.5, 20, BoundaryKind::Neumann, BoundaryKind::Neumann).unwrap();
        let s = DgSolver::new(Mesh::one_d(ax), 3, GasParams::default()).unwrap();
        let step = |x: f64, _| {
            let r = if x < 0.013 { 1.0 } else { 0.125 };
            FullPrim { ion: SpeciesPrim::at_rest(r, r), electron: SpeciesPrim::at_rest(r, 2.0 * r), em: EmState::default() }
        };
        let mut f = s.project(step).unwrap();
        for (i, u) in f.data.iter_mut().enumerate() {
            u[ION] += 0.01 * ((i % 4) as f64 - 1.5).powi(3);
        }
        let before = cell_averages(&s, &f);
        let (ent0, _) = total_entropy(&s, &f).unwrap();
        scaled_slope_limit(&s, &mut f, 0.0);
        let after = cell_averages(&s, &f);
        for (a, b) in before.iter().zip(&after) {
            for k in 0..NVAR {
                assert!((a[k] - b[k]).abs() < 1e-14);
            }
        }
        assert!(total_entropy(&s, &f).unwrap().0 <= ent0);
        for e in 1..19 {
            let el = f.element(e);
            for face in [el[0][ION], el[3][ION]] {
                let lo = after[e - 1][ION].min(after[e + 1][ION]).min(after[e][ION]);
                let hi = after[e - 1][ION].max(after[e + 1][ION]).max(after[e][ION]);
                assert!(face >= lo - 1e-12 && face <= hi + 1e-12, "cell {e}");
            }
        }
    }

    #[test]
    fn bound_preserving_limiter() {
        let s = DgSolver::new(Mesh::one_d(periodic(4)), 2, GasParams::default()).unwrap();
        let base = s.project(constant_ic).unwrap();
        let mut f = base.clone();
        bound_preserving_limit(&s, &mut f, 1e-13).unwrap();
        assert_eq!(f, base);

        // One node with D = -eps while the average stays at 1.
        let w = FullPrim {
            ion: SpeciesPrim::at_rest(1.0, 1.0),
            electron: SpeciesPrim::at_rest(1.0, 1.0),
            em: EmState { bx: 0.7, ..EmState::default() },
        };
        let mut f = s.project(|_, _| w).unwrap();
        let eps = 1e-13;
        // Weights 1/6, 2/3, 1/6 of the average: lower node 0, raise node 1 to keep the mean.
        let el = f.element_mut(1);
        el[0][ION] = -eps;
        el[1][ION] = 1.0 + (1.0 + eps) / 4.0;
        let avg_before = cell_averages(&s, &f)[1];
        bound_preserving_limit(&s, &mut f, eps).unwrap();
        let el = f.element(1);
        assert!(el.iter().all(|u| u[ION] >= eps));
        assert!(el.iter().all(|u| u[EM + em::BX] == 0.7));
        let avg_after = cell_averages(&s, &f)[1];
        for k in 0..NVAR {
            assert!((avg_before[k] - avg_after[k]).abs() < 1e-14);
        }

        let mut bad = base.clone();
        for u in bad.element_mut(2) {
            u[ION] = -1.0;
        }
        assert!(bound_preserving_limit(&s, &mut bad, eps).is_err());
    }

    #[test]
    fn entropy_diagnostics() {
        let s = DgSolver::new(Mesh::one_d(periodic(4)), 2, GasParams::default()).unwrap();
        let f = s
            .project(|_, _| FullPrim {
                ion: SpeciesPrim::at_rest(1.0, 1.0),
                electron: SpeciesPrim::at_rest(1.0, 1.0),
                em: EmState { bx: 1.0, ..EmState::default() },
            })
            .unwrap();
        let (fl, emt) = total_entropy(&s, &f).unwrap();
        assert_eq!(fl, 0.0);
        assert!((emt - 0.5).abs() < 1e-14);
        let l1 = l1_error(&s, &f, Quantity::Conserved(EM + em::BX), |_, _| 0.75).unwrap();
        assert!((l1 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn quantity_names() {
        use crate::state::Species;
        assert_eq!(Quantity::parse("rho_i").unwrap(), Quantity::Density(Species::Ion));
        assert_eq!(Quantity::parse("By").unwrap(), Quantity::Conserved(EM + em::BY));
        assert_eq!(Quantity::parse("u3").unwrap(), Quantity::Conserved(3));
        assert!(Quantity::parse("bogus").is_err());
        for k in 0..NVAR {
            let q = Quantity::Conserved(k);
            assert_eq!(Quantity::parse(&q.name()).unwrap(), q);
        }
        for q in [Quantity::Velocity(Species::Electron, 2), Quantity::Lorentz(Species::Ion), Quantity::Pressure(Species::Ion)] {
            assert_eq!(Quantity::parse(&q.name()).unwrap(), q);
        }
    }
}
