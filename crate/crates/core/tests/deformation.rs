use std::sync::Arc;

use ainfty::bank::TupleBank;
use ainfty::deformation::*;
use ainfty::derived::stasheff_check;
use ainfty::models::extension::{build_trivial_extension, dga_to_ainfty};
use ainfty::models::weyl::{WeylConfig, WeylModel};
use ainfty::operator::MultiOperator;
use ainfty::random::random_monomial_operator;
use ainfty::scalar::{MultiSeries, ParamId, Parameter, ParameterContext, Rational};
use ainfty::space::{BasisIndex, BasisKind, Component, GradedElement, GradedSpace, TruncationPolicy};

/// `x` in degree 0 and `y` in degree 1, with parameters `t` and `s`.
fn toy_space() -> Arc<GradedSpace> {
    let ctx = ParameterContext::new(vec![Parameter::new("t", 0, 4), Parameter::new("s", 0, 3)]).unwrap();
    let comps = [("x", 0), ("y", 1)]
        .iter()
        .map(|(n, d)| Component { tag: n.to_string(), degree: *d, basis: BasisKind::Atoms(vec!["1".into()]) })
        .collect();
    GradedSpace::new("toy", ctx, comps, TruncationPolicy::Error).unwrap()
}

fn series(sp: &Arc<GradedSpace>, text: &str) -> MultiSeries {
    MultiSeries::parse(sp.context(), text).unwrap()
}

/// `m_1(x) = t·y`, `m_2(x, x) = y`.
fn toy_family(sp: &Arc<GradedSpace>) -> Family {
    let (x, y) = (BasisIndex::atom(0, 0), BasisIndex::atom(1, 0));
    let ty = GradedElement::term(sp, y, series(sp, "t"));
    let m = MultiOperator::table(sp, 1, [1, 2], [(vec![x], ty), (vec![x, x], GradedElement::basis(sp, y))]).unwrap();
    assert!(stasheff_check(&m, &TupleBank::full(sp, 0..=3)).unwrap().is_ok());
    Family::new(m, vec![ParamId(0)]).unwrap()
}

#[test]
fn single_parameter_flow_translates_the_parameter() {
    let sp = toy_space();
    let (t, s) = (ParamId(0), ParamId(1));
    let fam = toy_family(&sp);
    let word = CupWord::monomial(sp.context(), vec![t]);
    assert_eq!(word.degree(sp.context()).unwrap(), 1);
    let flow = integrate_flow(&fam, &word, s, 3).unwrap();
    let m = flow.assemble().unwrap();
    let x = GradedElement::basis(&sp, BasisIndex::atom(0, 0));
    let m1 = m.eval(std::slice::from_ref(&x)).unwrap();
    assert_eq!(m1, GradedElement::term(&sp, BasisIndex::atom(1, 0), series(&sp, "t + s")));
    let bank = TupleBank::full(&sp, 0..=4);
    assert!(flow_mc_check(&flow, |_| bank.clone()).unwrap().is_ok());

    // a_0 = −t·x solves the MC equation and is carried to −(t+s)·x
    let a0 = x.scale(&series(&sp, "-t")).unwrap();
    let mc = integrate_mc_flow(&flow, &a0, &[]).unwrap();
    assert_eq!(mc.element, x.scale(&series(&sp, "-t - s")).unwrap());
    assert!(mc_residual(&mc.structure, &mc.element).unwrap().is_zero());
    assert_eq!(mc.orders.len(), 4);
}

#[test]
fn mc_flow_rejects_bad_initial_elements() {
    let sp = toy_space();
    let flow =
        integrate_flow(&toy_family(&sp), &CupWord::monomial(sp.context(), vec![ParamId(0)]), ParamId(1), 2).unwrap();
    let x = GradedElement::basis(&sp, BasisIndex::atom(0, 0));
    assert!(integrate_mc_flow(&flow, &x, &[]).is_err());
    let y = GradedElement::basis(&sp, BasisIndex::atom(1, 0));
    assert!(integrate_mc_flow(&flow, &y, &[]).is_err());
}

#[test]
fn flow_parameter_degree_is_checked() {
    let sp = toy_space();
    let fam = toy_family(&sp);
    // the word [t, t] has degree 3 and needs a flow parameter of degree −2
    let word = CupWord::monomial(sp.context(), vec![ParamId(0), ParamId(0)]);
    assert_eq!(word.degree(sp.context()).unwrap(), 3);
    assert!(integrate_flow(&fam, &word, ParamId(1), 2).is_err());
    // the flow parameter cannot be a family parameter
    let word = CupWord::monomial(sp.context(), vec![ParamId(0)]);
    assert!(integrate_flow(&fam, &word, ParamId(0), 2).is_err());
}

fn weyl() -> WeylModel {
    WeylModel::new(WeylConfig::default()).unwrap()
}

#[test]
fn weyl_flow_is_flat_order_by_order() {
    let w = weyl();
    let flow = w.delta1_flow().unwrap();
    let rep = flow_mc_check(&flow, |k| w.bank(0..=3 + k)).unwrap();
    assert!(rep.is_ok(), "{:?}", rep.failures.first());
}

#[test]
fn weyl_mc_flow_from_module_elements() {
    let w = weyl();
    let flow = w.delta1_flow().unwrap();
    let tp = MultiSeries::param(w.space.context(), w.t).unwrap();
    for exps in [[0u8, 0], [1, 0], [0, 3], [2, 2], [4, 0]] {
        let a0 = w.module_monomial(&exps).unwrap();
        let mc = integrate_mc_flow(&flow, &a0, &[w.u]).unwrap();
        assert!(mc_residual(&mc.structure, &mc.element).unwrap().is_zero());
    }
    // a t-dependent start moves: t·1 flows to t/(1+s)
    let one = w.module_monomial(&[0, 0]).unwrap();
    let mc = integrate_mc_flow(&flow, &one.scale(&tp).unwrap(), &[w.u]).unwrap();
    let expect = MultiSeries::parse(w.space.context(), "t - t*s + t*s^2 - t*s^3").unwrap();
    assert_eq!(mc.element, one.scale(&expect).unwrap());
    assert!(mc_residual(&mc.structure, &mc.element).unwrap().is_zero());
}

#[test]
fn weyl_flow_local_finiteness() {
    let w = weyl();
    let flow = w.delta1_flow().unwrap();
    let report = local_finiteness_report(&flow, 3, &w.bank(0..=6)).unwrap();
    assert!(report.is_finite());
    for (k, e) in report.entries.iter().enumerate() {
        assert_eq!(e.label, format!("s^{k}"));
        assert_eq!(e.structural, Some(2 + k));
        if let Some(wit) = e.witnessed {
            assert!(wit <= 2 + k);
        }
    }
    assert_eq!(report.entries[2].witnessed, Some(4));
}

#[test]
fn family_finiteness_of_the_weyl_family() {
    let w = weyl();
    let report = family_finiteness_report(&w.family, 2, &w.bank(0..=3)).unwrap();
    assert!(report.is_finite());
    assert_eq!(report.entries[0].label, "m");
    assert_eq!(report.entries[0].structural, Some(2));
}

#[test]
fn gauge_transform_preserves_stasheff() {
    let w = WeylModel::new(WeylConfig { degree_cap: 3, ..WeylConfig::default() }).unwrap();
    for seed in [5, 6] {
        let gen = random_monomial_operator(&w.space, seed, 0, &[1, 2]);
        let fam = gauge_transform(&w.family, &gen, w.g, w.config.g_cap).unwrap();
        assert_eq!(fam.params(), &[w.t, w.u, w.g]);
        let bank = w.bank(0..=5);
        let rep = stasheff_check(fam.m(), &bank).unwrap();
        assert!(rep.is_ok(), "seed {seed}: {:?}", rep.failures.first());
        // the gauge changes the structure
        let at_zero = fam.m().eval_zero(w.g).unwrap();
        assert!(ainfty::report::check_equal("g0", &at_zero, &w.m, &bank).unwrap().is_ok());
        assert!(!ainfty::report::check_equal("g", fam.m(), &w.m, &bank).unwrap().is_ok());
    }
    let odd = random_monomial_operator(&w.space, 1, 1, &[1]);
    assert!(gauge_transform(&w.family, &odd, w.g, 2).is_err());
    assert!(gauge_transform(&w.family, &random_monomial_operator(&w.space, 1, 0, &[1]), w.t, 2).is_err());
}

/// `k[ε]/(ε²)` as a bimodule over itself.
fn dual_numbers() -> (Arc<GradedSpace>, [MultiOperator; 3]) {
    let ctx = ParameterContext::new(vec![Parameter::new("u", 2, 2)]).unwrap();
    let atoms = BasisKind::Atoms(vec!["1".into(), "e".into()]);
    let comps = vec![
        Component { tag: "a".into(), degree: -1, basis: atoms.clone() },
        Component { tag: "m".into(), degree: 0, basis: atoms },
    ];
    let sp = GradedSpace::new("dual", ctx, comps, TruncationPolicy::Error).unwrap();
    let parts = [(0u8, 0u8, 0u8), (0, 1, 1), (1, 0, 1)].map(|(l, r, out)| {
        let mut entries = Vec::new();
        for i in 0..2u8 {
            for j in 0..2u8 {
                if i + j < 2 {
                    let v = GradedElement::basis(&sp, BasisIndex::atom(out, i + j));
                    entries.push((vec![BasisIndex::atom(l, i), BasisIndex::atom(r, j)], v));
                }
            }
        }
        MultiOperator::table(&sp, 1, [2], entries).unwrap()
    });
    (sp, parts)
}

fn module_map(sp: &Arc<GradedSpace>, f: impl Fn(u8) -> Option<(u8, i64)>) -> MultiOperator {
    let entries = (0..2u8).filter_map(|i| {
        f(i).map(|(j, c)| {
            let v = GradedElement::basis(sp, BasisIndex::atom(0, j)).scale_rational(&Rational::from_int(c));
            (vec![BasisIndex::atom(1, i)], v)
        })
    });
    MultiOperator::table(sp, -1, [1], entries).unwrap()
}

#[test]
fn trivial_extensions_of_dual_numbers() {
    let (sp, [mult, left, right]) = dual_numbers();
    let bank = TupleBank::full(&sp, 0..=3);
    let u = ParamId(0);
    // h = id and h = multiplication by ε are bimodule maps
    for h in [module_map(&sp, |i| Some((i, 1))), module_map(&sp, |i| (i == 0).then_some((1, 1)))] {
        let ext = build_trivial_extension(&mult, &left, &right, &h, &bank).unwrap();
        let m = dga_to_ainfty(&ext.dga, u, &bank).unwrap();
        assert!(stasheff_check(&m, &bank).unwrap().is_ok());
    }
    // h(1) = 1, h(ε) = 0 is not
    let bad = module_map(&sp, |i| (i == 0).then_some((0, 1)));
    assert!(build_trivial_extension(&mult, &left, &right, &bad, &bank).is_err());
}
