//! Exit-gate checks. Every criterion is an exact identity over ℚ; each prints
//! one `PASS`/`FAIL` line and the test fails if any criterion fails.

use std::time::Instant;

use ainfty::bank::TupleBank;
use ainfty::deformation::*;
use ainfty::derived::*;
use ainfty::models::closed_form::closed_form_structure;
use ainfty::models::poly::{Poly, PolyAlgebra};
use ainfty::models::weyl::{WeylConfig, WeylModel, ALG, MOD};
use ainfty::operator::{verify_prejacobi, MultiOperator};
use ainfty::random::{random_monomial_operator, random_operator, rng, small_test_space};
use ainfty::report::{check_equal, check_vanishes, Report};
use ainfty::scalar::{Exponents, MultiSeries, Rational};
use ainfty::space::{BasisIndex, ElementBuilder, GradedElement};

type Outcome = Result<(), String>;

fn ok(name: &str, rep: Report) -> Outcome {
    match rep.failures.first() {
        None => Ok(()),
        Some(f) => Err(format!("{name}: {f:?}")),
    }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn weyl(cap: u32) -> WeylModel {
    WeylModel::new(WeylConfig { degree_cap: cap, ..WeylConfig::default() }).unwrap()
}

fn brace_calculus() -> Outcome {
    let sp = small_test_space();
    let bank = TupleBank::full(&sp, 0..=5);
    let mut r = rng(2024);
    let ops: Vec<MultiOperator> = (0..200).map(|_| random_operator(&sp, &mut r, -1..=2, 3).unwrap()).collect();
    let two = MultiSeries::constant(sp.context(), Rational::from_int(2));
    for w in ops.chunks(5) {
        for (m, n) in [(0, 1), (1, 1), (2, 1), (1, 2), (2, 2)] {
            ok("pre-Jacobi", verify_prejacobi(&w[0], &w[1..1 + m], &w[3..3 + n], &bank).unwrap())?;
        }
        let (f, g, h) = (&w[0], &w[1], &w[2]);
        let br = MultiOperator::bracket;
        let sign = |a: &MultiOperator, b: &MultiOperator, x: MultiOperator| {
            if a.degree() * b.degree() % 2 != 0 {
                x.neg()
            } else {
                x
            }
        };
        let skew = br(f, g).unwrap().add(&sign(f, g, br(g, f).unwrap())).unwrap();
        ok("skew-symmetry", check_vanishes("skew", &skew, &bank).unwrap())?;
        let jac = br(&br(f, g).unwrap(), h)
            .unwrap()
            .sub(&br(f, &br(g, h).unwrap()).unwrap())
            .unwrap()
            .add(&sign(f, g, br(g, &br(f, h).unwrap()).unwrap()))
            .unwrap();
        ok("Jacobi", check_vanishes("jacobi", &jac, &bank).unwrap())?;
        ok("empty brace", check_equal("empty", &MultiOperator::brace(f, &[]).unwrap(), f, &bank).unwrap())?;
        let single = MultiOperator::brace(f, std::slice::from_ref(g)).unwrap();
        ok("single brace", check_equal("single", &single, &MultiOperator::compose(f, g).unwrap(), &bank).unwrap())?;
        for x in w.iter().filter(|x| x.parity()) {
            let lhs = br(x, x).unwrap();
            let rhs = MultiOperator::compose(x, x).unwrap().scale(&two).unwrap();
            ok("[f,f] = 2f∘f", check_equal("square", &lhs, &rhs, &bank).unwrap())?;
        }
    }
    Ok(())
}

/// Seeded operators of mixed degrees and arities on the Weyl carrier.
fn weyl_ops(w: &WeylModel, seed: u64) -> Vec<MultiOperator> {
    vec![
        random_monomial_operator(&w.space, seed, 0, &[1, 2]),
        random_monomial_operator(&w.space, seed + 1, 1, &[1, 2]),
        random_monomial_operator(&w.space, seed + 2, -1, &[0, 1]),
    ]
}

fn derived_bank(w: &WeylModel) -> TupleBank {
    w.bank(0..=5)
}

fn getzler_lift() -> Outcome {
    let w = weyl(4);
    let bank = derived_bank(&w);
    for seed in [10, 20, 30] {
        let ops = weyl_ops(&w, seed);
        for n in 0..=3 {
            ok(&format!("(M∘M) n={n}"), getzler_check(&w.m, &ops[..n], &bank).unwrap())?;
        }
    }
    Ok(())
}

fn cochain_identities() -> Outcome {
    let w = weyl(4);
    let bank = derived_bank(&w);
    for seed in [10, 20, 30] {
        let o = weyl_ops(&w, seed);
        let (a, b, c) = (&o[0], &o[1], &o[2]);
        for (x, y) in [(a, b), (b, c), (c, a)] {
            ok("cup_comm", cup_comm_check(&w.m, x, y, &bank).unwrap())?;
            ok("M12", m12_check(&w.m, x, y, &bank).unwrap())?;
        }
        ok("cup_assoc", cup_assoc_check(&w.m, a, b, c, &bank).unwrap())?;
        ok("poisson", poisson_check(&w.m, a, b, c, &bank).unwrap())?;
    }
    Ok(())
}

fn family_identities() -> Outcome {
    let w = weyl(4);
    let bank = w.bank(0..=3);
    ok("M1(m_t)", cocycle_check(&w.family, w.t, &bank).unwrap())?;
    ok("M1(m_u)", cocycle_check(&w.family, w.u, &bank).unwrap())?;
    ok("[m_t,m_u] + M1(m_tu)", bracket_triviality_check(&w.family, w.t, w.u, &bank).unwrap())
}

fn flow_soundness() -> Outcome {
    let w = weyl(4);
    let flow = w.delta1_flow().unwrap();
    ensure(flow.order_cap() == 3, || "flow stopped early".into())?;
    ok("m̃∘m̃", flow_mc_check(&flow, |k| w.bank(0..=3 + k)).unwrap())?;
    let first = flow.orders()[1].eval_zero(w.u).unwrap();
    ok("first order", check_equal("order1", &first, &w.first_order_cocycle(1), &w.bank(0..=4)).unwrap())
}

fn poly_of(w: &WeylModel, idx: &BasisIndex) -> Poly {
    w.to_poly(idx)
}

fn closed_form() -> Outcome {
    let w = weyl(4);
    let bar = w.minimal_weyl_structure().unwrap();
    let at_t0 = bar.assemble().unwrap().eval_zero(w.t).unwrap();
    let cf = closed_form_structure(&w, 5).unwrap();
    ok("flow = closed form", check_equal("closed", &at_t0, &cf, &w.bank(0..=5)).unwrap())?;

    let ctx = w.space.context();
    let s_pow = |n: usize, c: Rational| MultiSeries::monomial(ctx, Exponents::single(w.s, n as u8), c);
    let unit = w.space.monomial(MOD, &[0, 0]).unwrap().unwrap();
    let algs = w.space.basis_of(ALG);
    let emit = |comp: u8, p: &Poly, c: &MultiSeries| {
        let mut b = ElementBuilder::new(&w.space);
        for (e, q) in p.terms() {
            if let Some(idx) = w.space.monomial(comp, &e[..2]).unwrap() {
                b.add(idx, &c.scale(q));
            }
        }
        b.finish()
    };
    // m_{n+2}(a, b, 1, …, 1) = s^n a ⋆_n b
    for n in 0..=3 {
        for a in &algs {
            for b in &algs {
                if w.space.weight_of(a) + w.space.weight_of(b) > w.config.degree_cap {
                    continue;
                }
                let mut args = vec![GradedElement::basis(&w.space, *a), GradedElement::basis(&w.space, *b)];
                args.extend(std::iter::repeat_n(GradedElement::basis(&w.space, unit), n));
                let got = at_t0.eval(&args).unwrap();
                let star = w.poly.star_k(&poly_of(&w, a), &poly_of(&w, b), n as u32);
                let want = emit(ALG, &star, &s_pow(n, Rational::one()));
                ensure(got == want, || format!("m_{}({a:?}, {b:?}, 1…): {got} ≠ {want}", n + 2))?;
            }
        }
    }
    // the three components of m_3
    let bank = w.bank(3..=3);
    for t in bank.tuples() {
        let got = at_t0.eval_basis(t).unwrap();
        let p: Vec<Poly> = t.iter().map(|i| poly_of(&w, i)).collect();
        let v = w.poly.star_k(&p[0], &p[1], 1).mul(&p[2]);
        let want = match (t[0].comp, t[1].comp, t[2].comp) {
            (ALG, ALG, MOD) => emit(ALG, &v, &s_pow(1, Rational::one())),
            (ALG, MOD, MOD) => emit(MOD, &v, &s_pow(1, Rational::one())),
            (MOD, ALG, MOD) => emit(MOD, &v, &s_pow(1, Rational::from_int(-1))),
            _ => GradedElement::zero(&w.space),
        };
        ensure(*got == want, || format!("m_3{t:?}: {got} ≠ {want}"))?;
    }
    Ok(())
}

fn hochschild() -> Outcome {
    let w = weyl(4);
    for n in 0..=2 {
        ok(&format!("n={n}"), w.hochschild_check(n, &w.bank(n + 3..=n + 3)).unwrap())?;
    }
    Ok(())
}

fn star_product() -> Outcome {
    let p = PolyAlgebra::standard(2, 4).unwrap();
    let (x, y) = (Poly::var(0), Poly::var(1));
    let xy = p.weyl_star(&x, &y);
    let yx = p.weyl_star(&y, &x);
    let two_omega = Poly::one().scale(&(&p.omega()[0][1] * &Rational::from_int(2)));
    ensure(xy.len() == 2 && yx.len() == 2 && xy[0] == yx[0], || "x∗y − y∗x has a t⁰ part".into())?;
    ensure(xy[1].0 == 1 && xy[1].1.sub(&yx[1].1) == two_omega, || "x∗y − y∗x ≠ 2tω".into())?;

    let full = |a: &[(u32, Poly)], b: &[(u32, Poly)]| {
        let mut acc = std::collections::BTreeMap::<u32, Poly>::new();
        for (i, u) in a {
            for (j, v) in b {
                for (k, z) in p.weyl_star(u, v) {
                    let e = acc.entry(i + j + k).or_default();
                    *e = e.add(&z);
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>()
    };
    let w = weyl(4);
    let ms: Vec<Vec<(u32, Poly)>> = w.space.basis_of(ALG).iter().map(|i| vec![(0, w.to_poly(i))]).collect();
    for a in &ms {
        for b in &ms {
            let ab = full(a, b);
            for c in &ms {
                let lhs = full(&ab, c);
                let rhs = full(a, &full(b, c));
                ensure(lhs == rhs, || format!("(a∗b)∗c ≠ a∗(b∗c) for {a:?} {b:?} {c:?}"))?;
            }
        }
    }
    Ok(())
}

fn mc_flow() -> Outcome {
    let w = weyl(4);
    let flow = w.delta1_flow().unwrap();
    let s = w.s;
    let check = |a0: &GradedElement| -> Outcome {
        let mc = integrate_mc_flow(&flow, a0, &[w.u]).map_err(|e| e.to_string())?;
        let res = mc_residual(&mc.structure, &mc.element).unwrap();
        for k in 0..=flow.order_cap() {
            let at_k = res.map_coeffs(|c| c.coefficient_of(s, k as u8)).unwrap();
            ensure(at_k.is_zero(), || format!("MC residual at s^{k} for {a0}: {at_k}"))?;
        }
        Ok(())
    };
    for p in w.space.basis_of(MOD) {
        check(&GradedElement::basis(&w.space, p))?;
    }
    let tp = MultiSeries::param(w.space.context(), w.t).unwrap();
    check(&GradedElement::basis(&w.space, w.space.monomial(MOD, &[0, 0]).unwrap().unwrap()).scale(&tp).unwrap())
}

fn local_finiteness() -> Outcome {
    let w = weyl(4);
    let flow = w.delta1_flow().unwrap();
    let rep = local_finiteness_report(&flow, 3, &w.bank(0..=6)).unwrap();
    for (k, e) in rep.entries.iter().enumerate() {
        ensure(e.structural == Some(2 + k), || format!("s^{k}: bound {:?}, expected {}", e.structural, 2 + k))?;
        ensure(e.witnessed.is_none_or(|x| x <= 2 + k), || format!("s^{k}: witnessed {:?}", e.witnessed))?;
    }
    ensure(rep.entries.len() == 4, || "missing orders".into())
}

fn gauge() -> Outcome {
    let w = weyl(4);
    let full = w.bank(0..=6);
    let long = w.bank(7..=7).sample(4000, 3);
    let bank = TupleBank::from_tuples(full.tuples().chain(long.tuples()).map(|t| t.to_vec()));
    for seed in [31, 32] {
        let gen = random_monomial_operator(&w.space, seed, 0, &[1, 2]);
        let fam = gauge_transform(&w.family, &gen, w.g, w.config.g_cap).unwrap();
        ok("gauged Stasheff", stasheff_check(fam.m(), &bank).unwrap())?;
        ensure(!check_equal("moved", fam.m(), &w.m, &w.bank(0..=3)).unwrap().is_ok(), || {
            "gauge acted trivially".into()
        })?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("brace calculus", brace_calculus),
        ("Getzler lift", getzler_lift),
        ("cochain-level identities", cochain_identities),
        ("family identities", family_identities),
        ("flow soundness", flow_soundness),
        ("closed form", closed_form),
        ("Hochschild cocycle", hochschild),
        ("star product", star_product),
        ("MC flow", mc_flow),
        ("local finiteness", local_finiteness),
        ("gauge", gauge),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.1}s)", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
