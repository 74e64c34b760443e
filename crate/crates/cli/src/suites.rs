//! The named verification suites behind `verify`.

use ainfty::bank::TupleBank;
use ainfty::deformation::{bracket_triviality_check, cocycle_check, flow_mc_check, local_finiteness_report};
use ainfty::derived::{cup_assoc_check, cup_comm_check, getzler_check, m12_check, poisson_check, stasheff_check};
use ainfty::models::closed_form::closed_form_structure;
use ainfty::models::weyl::WeylModel;
use ainfty::operator::{verify_prejacobi, MultiOperator};
use ainfty::random::{random_monomial_operator, random_operator, rng, small_test_space};
use ainfty::report::{check_equal, check_vanishes, Report, Residual};
use ainfty::scalar::{MultiSeries, Rational};
use ainfty::Result;
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Brace calculus on random operators of a small test space.
    Braces,
    /// Derived structure identities on the Weyl model.
    Derived,
    /// Stasheff, family and Hochschild identities of the Weyl model.
    Family,
    /// The Δ₁ flow: flatness, first order, closed form and finiteness.
    Example,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Braces => "braces",
            Suite::Derived => "derived",
            Suite::Family => "family",
            Suite::Example => "example",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckEntry {
    pub check: String,
    pub evaluated: usize,
    pub failures: Vec<Residual>,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub ok: bool,
    pub checks: Vec<CheckEntry>,
}

#[derive(Default)]
struct Collector(Vec<CheckEntry>);

impl Collector {
    fn add(&mut self, name: &str, report: Report) {
        match self.0.iter_mut().find(|e| e.check == name) {
            Some(e) => {
                e.evaluated += report.evaluated;
                e.failures.extend(report.failures);
            }
            None => {
                self.0.push(CheckEntry { check: name.into(), evaluated: report.evaluated, failures: report.failures })
            }
        }
    }

    fn finish(self, suite: Suite) -> SuiteReport {
        let ok = self.0.iter().all(|e| e.failures.is_empty());
        SuiteReport { suite: suite.name().into(), ok, checks: self.0 }
    }
}

const BRACE_OPERATORS: usize = 20;

pub fn run(suite: Suite, model: Option<&WeylModel>, tuple_len: usize, seed: u64) -> Result<SuiteReport> {
    let mut c = Collector::default();
    match (suite, model) {
        (Suite::Braces, _) => braces(&mut c, tuple_len, seed)?,
        (Suite::Derived, Some(w)) => derived(&mut c, w, tuple_len, seed)?,
        (Suite::Family, Some(w)) => family(&mut c, w, tuple_len)?,
        (Suite::Example, Some(w)) => example(&mut c, w, tuple_len)?,
        (_, None) => unreachable!("model suites are run with a model"),
    }
    Ok(c.finish(suite))
}

fn braces(c: &mut Collector, tuple_len: usize, seed: u64) -> Result<()> {
    let sp = small_test_space();
    let bank = TupleBank::full(&sp, 0..=tuple_len);
    let mut r = rng(seed);
    let ops = (0..BRACE_OPERATORS).map(|_| random_operator(&sp, &mut r, -1..=2, 3)).collect::<Result<Vec<_>>>()?;
    let two = MultiSeries::constant(sp.context(), Rational::from_int(2));
    let br = MultiOperator::bracket;
    let signed = |a: &MultiOperator, b: &MultiOperator, x: MultiOperator| {
        if a.parity() && b.parity() {
            x.neg()
        } else {
            x
        }
    };
    for w in ops.chunks(5) {
        for (m, n) in [(0, 1), (1, 1), (2, 1), (1, 2), (2, 2)] {
            c.add("prejacobi", verify_prejacobi(&w[0], &w[1..1 + m], &w[3..3 + n], &bank)?);
        }
        let (f, g, h) = (&w[0], &w[1], &w[2]);
        c.add("skew", check_vanishes("skew", &br(f, g)?.add(&signed(f, g, br(g, f)?))?, &bank)?);
        let jac = br(&br(f, g)?, h)?.sub(&br(f, &br(g, h)?)?)?.add(&signed(f, g, br(g, &br(f, h)?)?))?;
        c.add("jacobi", check_vanishes("jacobi", &jac, &bank)?);
        c.add("empty_brace", check_equal("empty_brace", &MultiOperator::brace(f, &[])?, f, &bank)?);
        let single = MultiOperator::brace(f, std::slice::from_ref(g))?;
        c.add("single_brace", check_equal("single_brace", &single, &MultiOperator::compose(f, g)?, &bank)?);
        for x in w.iter().filter(|x| x.parity()) {
            let sq = MultiOperator::compose(x, x)?.scale(&two)?;
            c.add("odd_square", check_equal("odd_square", &br(x, x)?, &sq, &bank)?);
        }
    }
    Ok(())
}

fn derived(c: &mut Collector, w: &WeylModel, tuple_len: usize, seed: u64) -> Result<()> {
    let bank = w.bank(0..=tuple_len);
    let ops = [(0, &[1, 2][..]), (1, &[1, 2][..]), (-1, &[0, 1][..])]
        .iter()
        .enumerate()
        .map(|(i, (d, ar))| random_monomial_operator(&w.space, seed.wrapping_add(i as u64), *d, ar))
        .collect::<Vec<_>>();
    for n in 0..=3 {
        c.add("getzler", getzler_check(&w.m, &ops[..n], &bank)?);
    }
    let (a, b, d) = (&ops[0], &ops[1], &ops[2]);
    for (x, y) in [(a, b), (b, d), (d, a)] {
        c.add("cup_comm", cup_comm_check(&w.m, x, y, &bank)?);
        c.add("m12", m12_check(&w.m, x, y, &bank)?);
    }
    c.add("cup_assoc", cup_assoc_check(&w.m, a, b, d, &bank)?);
    c.add("poisson", poisson_check(&w.m, a, b, d, &bank)?);
    Ok(())
}

fn family(c: &mut Collector, w: &WeylModel, tuple_len: usize) -> Result<()> {
    let bank = w.bank(0..=tuple_len.min(4));
    c.add("stasheff", stasheff_check(&w.m, &bank)?);
    c.add("cocycle[t]", cocycle_check(&w.family, w.t, &bank)?);
    c.add("cocycle[u]", cocycle_check(&w.family, w.u, &bank)?);
    for (i, j, name) in [(w.t, w.u, "bracket[t,u]"), (w.t, w.t, "bracket[t,t]"), (w.u, w.u, "bracket[u,u]")] {
        c.add(name, bracket_triviality_check(&w.family, i, j, &bank)?);
    }
    for n in (0..=2).filter(|n| n + 3 <= tuple_len) {
        c.add(&format!("hochschild[{n}]"), w.hochschild_check(n, &w.bank(n + 3..=n + 3))?);
    }
    Ok(())
}

fn example(c: &mut Collector, w: &WeylModel, tuple_len: usize) -> Result<()> {
    let flow = w.delta1_flow()?;
    c.add("flow_mc", flow_mc_check(&flow, |k| w.bank(0..=(3 + k).min(tuple_len)))?);
    let bank = w.bank(0..=tuple_len);
    if let Some(first) = flow.orders().get(1) {
        c.add("first_order", check_equal("first_order", &first.eval_zero(w.u)?, &w.first_order_cocycle(1), &bank)?);
    }
    let bar = w.minimal_weyl_structure()?;
    let at_t0 = bar.assemble()?.eval_zero(w.t)?;
    let cf = closed_form_structure(w, flow.order_cap() + 2)?;
    c.add("closed_form", check_equal("closed_form", &at_t0, &cf, &bank)?);
    let fin = local_finiteness_report(&flow, flow.order_cap(), &bank)?;
    let mut rep = Report::new();
    for (k, e) in fin.entries.iter().enumerate() {
        rep.evaluated += 1;
        if e.structural != Some(2 + k) || e.witnessed.is_some_and(|x| x > 2 + k) {
            rep.failures.push(Residual {
                check: "finiteness".into(),
                tuple: vec![e.label.clone()],
                residual: format!("structural {:?}, witnessed {:?}, expected {}", e.structural, e.witnessed, 2 + k),
            });
        }
    }
    c.add("finiteness", rep);
    Ok(())
}
