mod common;

use common::{random_scalar, random_vector, rel, rel_diff, rel_diff_scalar};
use micropolar::integrator::{EnergyLedger, LedgerRow};
use micropolar::spectral::snapshot::{decode, encode};
use micropolar::spectral::{
    curl, divergence, fractional_multiplier, leray_project, mollify, riesz, sobolev_norm_sq, GridSpec, SobolevIndex,
    SobolevKind, SpectralField, VectorField,
};
use proptest::prelude::*;

fn g8() -> GridSpec {
    GridSpec::cube(8).unwrap()
}

fn kind() -> impl Strategy<Value = SobolevKind> {
    prop_oneof![Just(SobolevKind::Homogeneous), Just(SobolevKind::Inhomogeneous)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_on_the_grid(seed in any::<u64>()) {
        let f = random_scalar(g8(), seed);
        let phys = f.to_physical();
        let avg = phys.iter().map(|x| x * x).sum::<f64>() / phys.len() as f64;
        prop_assert!(rel(avg, f.norm_sq()) < 1e-12);
        let back = SpectralField::from_physical(g8(), &phys).unwrap();
        prop_assert!(rel_diff_scalar(&back, &f) < 1e-13);
    }

    #[test]
    fn multipliers_compose(seed in any::<u64>(), s1 in -2.0..2.0f64, s2 in -2.0..2.0f64, k in kind()) {
        let f = random_scalar(g8(), seed);
        let two = fractional_multiplier(&fractional_multiplier(&f, s1, k).unwrap(), s2, k).unwrap();
        let one = fractional_multiplier(&f, s1 + s2, k).unwrap();
        prop_assert!(rel_diff_scalar(&two, &one) < 1e-12);
        // ‖D^s f‖² is the Sobolev norm squared.
        let d = fractional_multiplier(&f, s1, k).unwrap();
        let norm = sobolev_norm_sq(&f, SobolevIndex { s: s1, kind: k }).unwrap();
        prop_assert!(rel(d.norm_sq(), norm) < 1e-12);
    }

    #[test]
    fn riesz_squares_sum_to_minus_identity(seed in any::<u64>()) {
        let f = random_scalar(g8(), seed);
        let mut sum = SpectralField::zeros(g8());
        for a in 0..3 {
            sum += &riesz(&riesz(&f, a), a);
        }
        sum *= -1.0;
        prop_assert!(rel_diff_scalar(&sum, &f) < 1e-13);
    }

    #[test]
    fn leray_is_an_orthogonal_projection(seed in any::<u64>()) {
        let u = random_vector(g8(), seed);
        let v = random_vector(g8(), seed ^ 0xabcd);
        let pu = leray_project(&u);
        prop_assert!(rel_diff(&leray_project(&pu), &pu) < 1e-14);
        prop_assert!(divergence(&pu).norm_sq().sqrt() < 1e-13 * u.norm_sq().sqrt());
        // ⟨Pu, v⟩ = ⟨u, Pv⟩
        let (a, b) = (pu.inner(&v), u.inner(&leray_project(&v)));
        prop_assert!((a - b).abs() < 1e-12 * u.norm_sq().sqrt() * v.norm_sq().sqrt());
        // curl fields are already solenoidal
        let c = curl(&u);
        prop_assert!(rel_diff(&leray_project(&c), &c) < 1e-14);
    }

    #[test]
    fn mollifier_contracts_and_composes(seed in any::<u64>(), e1 in 0.0..1.0f64, e2 in 0.0..1.0f64) {
        let u = random_vector(g8(), seed);
        let m = mollify(&u, e1);
        prop_assert!(m.norm_sq() <= u.norm_sq() * (1.0 + 1e-15));
        let twice = mollify(&m, e2);
        let once = mollify(&u, (e1 * e1 + e2 * e2).sqrt());
        prop_assert!(rel_diff(&twice, &once) < 1e-13);
    }

    #[test]
    fn physical_values_are_real(seed in any::<u64>()) {
        let f = random_scalar(g8(), seed);
        prop_assert!(f.hermitian_defect() < 1e-15);
        let z = f.to_physical_complex();
        let worst = z.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-13 * f.norm_sq().sqrt().max(1e-300));
    }

    #[test]
    fn snapshot_roundtrip_is_exact(seed in any::<u64>()) {
        let u = random_vector(g8(), seed);
        let bytes = encode(&u.comps().iter().collect::<Vec<_>>()).unwrap();
        let snap = decode(&bytes, g8().dealias_fraction).unwrap();
        prop_assert_eq!(snap.n, 8);
        for (a, b) in snap.fields.iter().zip(u.comps()) {
            prop_assert_eq!(a.coeffs(), b.coeffs());
        }
    }

    #[test]
    fn ledger_csv_roundtrip_is_exact(vals in proptest::collection::vec(-1e300..1e300f64, 1..5)) {
        let rows: Vec<LedgerRow> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| LedgerRow { step: i as u64, t: v, u_l2_sq: v / 3.0, res_frac_w: -v, ..Default::default() })
            .collect();
        let l = EnergyLedger { rows };
        let back = EnergyLedger::read_csv(l.to_csv_bytes().unwrap().as_slice()).unwrap();
        prop_assert_eq!(back, l);
    }
}

#[test]
fn single_mode_has_expected_norms() {
    let g = g8();
    let u = VectorField::single_mode(g, [1, 2, 0], [0.0, 0.0, 1.0], 0.5).unwrap();
    assert!((u.norm_sq() - 0.25).abs() < 1e-15);
    let h1 = sobolev_norm_sq(&u, SobolevIndex::homogeneous(1.0)).unwrap();
    assert!((h1 - 0.25 * 5.0).abs() < 1e-14);
    let max = u.to_physical()[2].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!((max - 0.5 * 2f64.sqrt()).abs() < 1e-14);
}
