use std::fs;
use std::path::PathBuf;

use crsym::canonical_forms::SymbolSpec;
use crsym::catalog::{generate, Catalog, CatalogError, CatalogSet, MANIFEST_FILE};
use crsym::exact_linalg::{GaussianRational as Q, MatrixSubspace};
use crsym::reduced_symbol::SearchOptions;
use crsym::report::{full_report, ReportOptions};
use crsym::symbol_algebra::{assemble_symbol, build_g_minus};
use crsym::tanaka_prolongation::{universal, GradedState, prolong_step, Termination};

fn catalog_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../catalog")
}

fn triples(t: &[(i64, usize, i64)]) -> SymbolSpec {
    let t: Vec<_> = t.iter().map(|&(l, m, e)| (Q::from_int(l), m, e)).collect();
    SymbolSpec::from_triples(&t).unwrap()
}

fn options() -> ReportOptions {
    ReportOptions { k_max: 3, search: SearchOptions::default(), with_float: false }
}

#[test]
fn shipped_catalog_matches_generator() {
    let dir = catalog_dir();
    let manifest: crsym::catalog::Manifest =
        serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap();
    let generated = generate().unwrap();
    assert_eq!(manifest.entries.len(), generated.len());
    for ((entry, text), shipped) in generated.iter().zip(&manifest.entries) {
        assert_eq!(entry, shipped);
        assert_eq!(&fs::read_to_string(dir.join(&entry.path)).unwrap(), text, "{}", entry.id);
    }
}

#[test]
fn shipped_catalog_sizes() {
    let cat = Catalog::load(&catalog_dir()).unwrap();
    assert!(cat.in_set(CatalogSet::Main).count() >= 200);
    assert!(cat.in_set(CatalogSet::NonRegular).any(|e| e.source == "diagonal"));
    assert!(cat.in_set(CatalogSet::NonRegular).any(|e| e.source == "nilpotent_block"));
    assert!(cat.in_set(CatalogSet::NonRegular).all(|e| !e.expected.regular));
}

#[test]
fn corrupted_catalog_names_the_spec() {
    let tmp = std::env::temp_dir().join(format!("crsym-corrupt-{}", std::process::id()));
    fs::create_dir_all(tmp.join("specs")).unwrap();
    let manifest = r#"{"version":1,"entries":[{"id":"bad-1","path":"specs/bad.json","set":"main","source":"test","expected":{"regular":true,"nilpotent":false,"d_total":0}}]}"#;
    fs::write(tmp.join(MANIFEST_FILE), manifest).unwrap();
    fs::write(tmp.join("specs/bad.json"), r#"{"blocks":[{"lambda":{"re":"-1","im":"0"},"m":1,"epsilon":1}]}"#).unwrap();
    let err = Catalog::load(&tmp).unwrap_err();
    assert!(matches!(err, CatalogError::Spec { ref id, .. } if id == "bad-1"));
    assert!(err.to_string().contains("bad-1"));
    fs::remove_dir_all(&tmp).unwrap();
}

#[test]
fn single_positive_block_has_one_dimensional_algebra() {
    let r = full_report(&triples(&[(1, 1, 1)]), &options()).unwrap();
    assert_eq!(r.intersection.dims.full, 1);
    assert!(r.regular);
}

#[test]
fn report_is_deterministic() {
    let s = triples(&[(0, 2, 1), (1, 1, 1)]);
    let a = serde_json::to_string(&full_report(&s, &options()).unwrap()).unwrap();
    let b = serde_json::to_string(&full_report(&s, &options()).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn nilpotent_block_report_has_vanishing_prolongation() {
    let r = full_report(&triples(&[(0, 2, 1), (1, 1, 1)]), &options()).unwrap();
    assert!(!r.regular);
    assert!(!r.search.data.is_empty());
    for d in &r.search.data {
        assert!(d.g1_zero);
        assert!(!d.omega_in_a);
        assert!(d.bounds.iter().all(|b| b.pass));
        assert_eq!(d.prolongation.universal_dim, Termination::Finite(2 * r.n - 1 + d.dim_g0red));
    }
}

#[test]
fn g00_contains_the_intersection_representation() {
    let cat = Catalog::load(&catalog_dir()).unwrap();
    for e in cat.in_set(CatalogSet::Main).filter(|e| e.spec.size() <= 2) {
        let r = full_report(&e.spec, &ReportOptions { k_max: 1, search: SearchOptions { limit: 0, ..Default::default() }, with_float: false }).unwrap();
        assert!(r.g00.contains_a_representation, "{}", e.id);
    }
}

#[test]
fn zero_g0_gives_the_heisenberg_algebra() {
    for size in 1..=4 {
        let h = crsym::canonical_forms::build_pair(&triples(&vec![(1, 1, 1); size])).unwrap().h;
        let space = build_g_minus(&h).unwrap();
        let d = space.dim();
        let r = universal(&space, &MatrixSubspace::zero((d, d)), 2).unwrap();
        assert_eq!(r.universal_dim, Termination::Finite(2 * (size + 1) - 1));
        assert!(r.persistence_ok);
    }
}

#[test]
fn prolongation_dims_ignore_basis_order() {
    let cat = Catalog::load(&catalog_dir()).unwrap();
    for e in cat.in_set(CatalogSet::Main).filter(|e| e.spec.size() == 2).take(12) {
        let sym = assemble_symbol(&e.spec).unwrap();
        let g0 = sym.g0();
        let mut shuffled = g0.basis().to_vec();
        shuffled.rotate_left(1);
        let n = shuffled.len();
        if n > 1 {
            shuffled[n - 1] = &shuffled[n - 1] + &shuffled[0];
        }
        let other = MatrixSubspace::span(g0.shape(), &shuffled).unwrap();
        let mut a = GradedState::new(sym.space.clone(), g0).unwrap();
        let mut b = GradedState::new(sym.space.clone(), other).unwrap();
        for _ in 0..2 {
            let (x, y) = (prolong_step(&a), prolong_step(&b));
            assert_eq!(x.dim(), y.dim(), "{}", e.id);
            a.push(x);
            b.push(y);
        }
    }
}
