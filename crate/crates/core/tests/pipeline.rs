use pairinv::bracket::Interpretation;
use pairinv::maps;
use pairinv::miner::{mine, relfile, MineConfig, MineOutput};
use pairinv::necklace::Bidegree;
use pairinv::numeric::{eval_genpoly, numeric_poisson_genpoly, verify_identity, SamplerConfig, SamplerKind};
use pairinv::par;
use pairinv::ring::{generator_set, ExpressionTable, GenPoly, MonomialOrder, OrderKind};
use pairinv::Q;

fn mine3() -> MineOutput {
    mine(3, 12, MineConfig::default()).unwrap()
}

fn vanishes(p: &GenPoly, n: usize, kind: SamplerKind, trials: usize) -> bool {
    let gens = generator_set(n).unwrap();
    let cfg = SamplerConfig::with_seed(17);
    verify_identity(|pt| eval_genpoly(p, &pt.generator_values(&gens)), kind, n, &cfg, trials)
        .unwrap()
        .passed()
}

#[test]
fn n3_relation_vanishes_and_is_poisson() {
    let out = mine3();
    let gens = generator_set(3).unwrap();
    let rho = &out.ideal.relations()[0].poly;
    assert!(vanishes(rho, 3, SamplerKind::Generic, 20));
    let cfg = SamplerConfig::with_seed(4);
    for seed in [5, 6] {
        let v = verify_identity(
            |pt| numeric_poisson_genpoly(&GenPoly::var(seed), rho, &gens, pt),
            SamplerKind::Generic,
            3,
            &cfg,
            10,
        )
        .unwrap();
        assert!(v.passed(), "{{a{seed}, rho}}");
    }
}

#[test]
fn n3_table_entries_match_traces() {
    let out = mine(3, 9, MineConfig::default()).unwrap();
    let gens = generator_set(3).unwrap();
    let cfg = SamplerConfig::with_seed(9);
    for t in 0..5 {
        let pt = pairinv::numeric::sample(SamplerKind::Generic, 3, &cfg, t).unwrap().point();
        let vals = pt.generator_values(&gens);
        for (v, p) in out.table.sorted() {
            assert_eq!(pt.eval_necklace(v, Interpretation::Traceless), eval_genpoly(p, &vals));
        }
    }
}

#[test]
fn homogenized_n3_identity_is_a_multiple_of_the_relation() {
    let out = mine3();
    let rho = &out.ideal.relations()[0].poly;
    let cfg = SamplerConfig::with_seed(2);
    let check = maps::n3_identity_check(rho, &cfg, 10).unwrap();
    assert!(check.passed());
    assert_eq!(check.factor, Some(Q::new(1.into(), 54.into())));
    assert!(check.difference.is_zero());
}

#[test]
fn literal_n3_identity_holds_on_cm_only() {
    let literal = maps::n3_identity(&GenPoly::constant(Q::from_integer(1.into())));
    assert!(vanishes(&literal, 3, SamplerKind::CalogeroMoser, 10));
    assert!(!vanishes(&literal, 3, SamplerKind::Generic, 10));
}

#[test]
fn n3_images_vanish_on_varieties() {
    let out = mine3();
    let gens = generator_set(3).unwrap();
    let order = MonomialOrder::new(OrderKind::Grevlex, &gens);
    let cfg = SamplerConfig::with_seed(3);
    let com = maps::com_map(3).unwrap();
    for p in maps::image_relations(&out.ideal, &com, &order).unwrap() {
        assert!(vanishes(&p, 3, SamplerKind::Commuting, 10));
    }
    let (cm, report) = maps::resolved_cm_map(3, &cfg, 10).unwrap();
    assert!(report.passed());
    for p in maps::image_relations(&out.ideal, &cm, &order).unwrap() {
        assert!(vanishes(&p, 3, SamplerKind::CalogeroMoser, 10));
    }
}

#[test]
fn relation_file_round_trip() {
    let out = mine3();
    let gens = generator_set(3).unwrap();
    let header = relfile::RelationHeader {
        n: 3,
        max_degree: 12,
        seed: 1,
        target: None,
    };
    let mut buf = Vec::new();
    relfile::write_relations(&mut buf, &header, out.ideal.relations(), &out.order()).unwrap();
    let (back_header, back) = relfile::read_relations(buf.as_slice(), "mem", &gens).unwrap();
    assert_eq!(back_header, header);
    assert_eq!(back.len(), 1);
    assert_eq!(back.relations()[0].poly, out.ideal.relations()[0].poly);
    assert_eq!(back.relations()[0].bidegree, Bidegree::new(6, 6));
}

#[test]
fn table_round_trip() {
    let out = mine(4, 7, MineConfig::default()).unwrap();
    let gens = generator_set(4).unwrap();
    let mut buf = Vec::new();
    out.table.write_to(&mut buf, "n=4 max_degree=7", &out.order()).unwrap();
    let back = ExpressionTable::read_from(buf.as_slice(), "mem", &gens).unwrap();
    assert_eq!(back.sorted(), out.table.sorted());
    assert_eq!(back.frontier(), out.table.frontier());
}

#[test]
fn custom_order_gives_the_same_ideal_dimensions() {
    let grevlex = mine3();
    let custom = mine(
        3,
        12,
        MineConfig {
            order: OrderKind::Custom,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(grevlex.degrees, custom.degrees);
    let a = &grevlex.ideal.relations()[0].poly;
    let b = &custom.ideal.relations()[0].poly;
    // the orders normalize differently, so compare up to a scalar
    let (m, c) = b.terms().next().unwrap();
    assert!(a.sub(&b.scale(&(a.coefficient(m) / c))).is_zero());
}

#[test]
fn sequential_and_parallel_runs_agree() {
    par::set_sequential(true);
    let seq = mine(4, 9, MineConfig::default()).unwrap();
    par::set_sequential(false);
    let par_out = mine(4, 9, MineConfig::default()).unwrap();
    assert_eq!(seq.table.sorted(), par_out.table.sorted());
    assert_eq!(seq.log, par_out.log);
}

#[test]
fn n2_has_no_relations() {
    let out = mine(2, 10, MineConfig::default()).unwrap();
    assert!(out.ideal.is_empty());
    assert!(out.unfilled().is_empty());
}
