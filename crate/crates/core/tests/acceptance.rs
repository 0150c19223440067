//! The nine acceptance criteria. Each test writes one `criterion N ...: PASS`
//! or `FAIL` line to stdout (uncaptured) and then asserts.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use kromlab::eval::{eval_qbf_bruteforce, Evaluator, Limits, QBlock, Route};
use kromlab::harness::{
    enumerate_structures, equiv_test, random_digraph, random_dnf_qbf, random_formula, random_prenex_fo,
    random_so_source, scc_strong_connectivity, Profile,
};
use kromlab::hierarchy::{
    compare_with_encoding, encode_qbf, ground_intermediate, interpret_structure, phi_formula, translate_sigma_k,
    PrefixedDnfQbf, Translation,
};
use kromlab::transforms::{drop_innermost_universal, expand_exists_r, skolemize_fo, PrenexFo};
use kromlab::{
    classify, parse_formula, ClausalFormula, Expr, FiniteStructure, FragmentTag, Literal, Quantifier, SoFormula,
    Term, Vocabulary,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn run(id: u32, title: &str, budget: Duration, body: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let mut outcome = body();
    let took = start.elapsed();
    if outcome.is_ok() && took > budget {
        outcome = Err(format!("took {took:.1?}, budget {budget:?}"));
    }
    let line = match &outcome {
        Ok(detail) => format!("criterion {id} ({title}): PASS in {took:.2?}; {detail}"),
        Err(why) => format!("criterion {id} ({title}): FAIL after {took:.2?}; {why}"),
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
    drop(out);
    assert!(outcome.is_ok(), "{line}");
}

fn ok<T>(r: kromlab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn limits() -> Limits {
    Limits::from_env().expect("limit variables")
}

fn unary() -> Vocabulary {
    Vocabulary::new(Vec::<String>::new(), [("P".to_string(), 1)]).unwrap()
}

fn binary() -> Vocabulary {
    Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2)]).unwrap()
}

const NOT_SCC: &str = "exists2 R/2. exists2 Y/2. all x y z. (~E(x,y)|R(x,y)) & (~E(x,y)|~R(y,z)|R(x,z)) \
                          & (R(x,y)|Y(x,y)) & (~Y(x,y)|~R(x,y)) & (some Y)";

fn not_scc() -> SoFormula {
    parse_formula(NOT_SCC).unwrap()
}

// ---------------------------------------------------------------------------
// Corpora, regenerated identically by every criterion that uses them.

fn pi1_corpus() -> Vec<SoFormula> {
    (0..500u64)
        .map(|i| {
            let vocab = if i % 2 == 0 { unary() } else { binary() };
            let so_vars = 1 + (i as usize / 2) % 2;
            let p = Profile::new(FragmentTag::PiKromR(1), vocab, 1 + i as usize % 4, 1000 + i)
                .with_so_vars(so_vars)
                .with_guards(1 + (i as usize / 4) % so_vars)
                .with_fo_vars(1 + i as usize % 3);
            random_formula(&p).unwrap()
        })
        .collect()
}

fn sigma1r_corpus() -> Vec<SoFormula> {
    (0..300u64)
        .map(|i| {
            let vocab = if i % 2 == 0 { unary() } else { binary() };
            let so_vars = 1 + (i as usize / 2) % 2;
            let p = Profile::new(FragmentTag::SigmaKromR(1), vocab, 1 + i as usize % 4, 2000 + i)
                .with_so_vars(so_vars)
                .with_guards(1 + (i as usize / 4) % so_vars)
                .with_fo_vars(1 + i as usize % 3);
            random_formula(&p).unwrap()
        })
        .collect()
}

fn prenex_corpus() -> Vec<PrenexFo> {
    let mut rng = ChaCha8Rng::seed_from_u64(3000);
    (0..300)
        .map(|i| {
            let vocab = if i % 2 == 0 { unary() } else { binary() };
            random_prenex_fo(&mut rng, &vocab, 3, 3, 3)
        })
        .collect()
}

fn qbf_corpus() -> Vec<PrefixedDnfQbf> {
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    (0..200)
        .map(|_| random_dnf_qbf(&mut rng, 2, Quantifier::Exists, 4, 3).unwrap())
        .collect()
}

fn ekrom_corpus() -> Vec<SoFormula> {
    (0..200u64)
        .map(|i| {
            let (vocab, arity) = if i % 2 == 0 { (unary(), 2) } else { (binary(), 1) };
            let p = Profile::new(FragmentTag::SoEkrom, vocab, 1 + i as usize % 3, 5000 + i)
                .with_so_vars(2 + (i as usize / 2) % 2)
                .with_max_arity(arity)
                .with_fo_vars(1 + i as usize % 2);
            random_formula(&p).unwrap()
        })
        .collect()
}

/// `∃X1 ∀X2 ∀x (X1 x ∨ X2 x ∨ E(x,x))`.
const SIGMA2_SOURCE: &str = "exists2 X1/1. forall2 X2/1. forall x. X1(x) | X2(x) | E(x,x)";

fn translation_sources() -> Vec<SoFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(6000);
    (0..50)
        .map(|i| {
            let vocab = if i % 2 == 0 { unary() } else { binary() };
            random_so_source(&mut rng, &vocab, 1 + i % 3, 2, 2).unwrap()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Independent oracles.

fn term_value(t: &Term, env: &BTreeMap<&str, usize>, s: &FiniteStructure) -> usize {
    match t {
        Term::Var(v) => env[v.as_str()],
        Term::Const(c) => s.constant(c).expect("constant"),
    }
}

enum GroundLit {
    Fixed(bool),
    /// Signed atom ids; a guard expands to all atoms of its relation.
    Atoms(Vec<(usize, bool)>),
}

/// Truth of a clausal formula with at most one second-order block and no
/// first-order existential prefix, by explicit grounding. An existential
/// block is decided by backtracking search over the ground atoms, a
/// universal one by checking that every ground clause is valid.
fn single_block_oracle(c: &ClausalFormula, s: &FiniteStructure) -> bool {
    assert!(c.fo_exists.is_empty());
    let q = c.so_prefix.first().map(|q| q.quantifier);
    assert!(c.so_prefix.iter().all(|p| Some(p.quantifier) == q), "one block");
    let n = s.size();
    let mut base = BTreeMap::new();
    let mut next = 0usize;
    for p in &c.so_prefix {
        base.insert(p.name.as_str(), (next, p.arity));
        next += n.pow(p.arity as u32);
    }
    let atom_id = |name: &str, tuple: &[usize]| {
        let (b, _) = base[name];
        b + tuple.iter().fold(0, |acc, &e| acc * n + e)
    };
    let vars: Vec<&str> = c.fo_universal.iter().map(String::as_str).collect();
    let mut clauses: Vec<Vec<(usize, bool)>> = Vec::new();
    for m in 0..n.pow(vars.len() as u32) {
        let mut env = BTreeMap::new();
        let mut rest = m;
        for v in vars.iter().rev() {
            env.insert(*v, rest % n);
            rest /= n;
        }
        'clause: for clause in &c.matrix {
            let mut lits = Vec::new();
            for l in &clause.0 {
                let g = match l {
                    Literal::Falsum => GroundLit::Fixed(false),
                    Literal::Eq { left, right, positive } => {
                        let same = left
                            .iter()
                            .zip(right)
                            .all(|(a, b)| term_value(a, &env, s) == term_value(b, &env, s));
                        GroundLit::Fixed(same == *positive)
                    }
                    Literal::Guard(r) => {
                        let (b, a) = base[r.as_str()];
                        GroundLit::Atoms((b..b + n.pow(a as u32)).map(|i| (i, true)).collect())
                    }
                    Literal::Atom { pred, args, positive } => {
                        let t: Vec<usize> = args.iter().map(|a| term_value(a, &env, s)).collect();
                        if base.contains_key(pred.as_str()) {
                            GroundLit::Atoms(vec![(atom_id(pred, &t), *positive)])
                        } else {
                            GroundLit::Fixed(s.relation(pred).expect("relation").contains(&t, n) == *positive)
                        }
                    }
                };
                match g {
                    GroundLit::Fixed(true) => continue 'clause,
                    GroundLit::Fixed(false) => {}
                    GroundLit::Atoms(a) => lits.extend(a),
                }
            }
            clauses.push(lits);
        }
    }
    match q {
        None => clauses.iter().all(|c| !c.is_empty()),
        Some(Quantifier::Forall) => clauses.iter().all(|c| {
            let pos: BTreeSet<usize> = c.iter().filter(|l| l.1).map(|l| l.0).collect();
            c.iter().any(|l| !l.1 && pos.contains(&l.0))
        }),
        Some(Quantifier::Exists) => {
            let mut assignment = vec![None; next];
            search(&clauses, &mut assignment, 0)
        }
    }
}

fn search(clauses: &[Vec<(usize, bool)>], a: &mut Vec<Option<bool>>, var: usize) -> bool {
    let falsified = clauses
        .iter()
        .any(|c| c.iter().all(|&(v, sign)| a[v].is_some_and(|b| b != sign)));
    if falsified {
        return false;
    }
    if var == a.len() {
        return true;
    }
    for value in [false, true] {
        a[var] = Some(value);
        if search(clauses, a, var + 1) {
            a[var] = None;
            return true;
        }
    }
    a[var] = None;
    false
}

/// Recursive evaluation of a prefixed DNF QBF.
fn qbf_oracle(q: &PrefixedDnfQbf) -> bool {
    let order: Vec<(Quantifier, u32)> = q
        .blocks
        .iter()
        .flat_map(|b| b.vars.iter().map(move |&v| (b.quantifier, v)))
        .collect();
    fn go(q: &PrefixedDnfQbf, order: &[(Quantifier, u32)], values: &mut BTreeMap<u32, bool>) -> bool {
        match order.split_first() {
            None => q
                .terms
                .iter()
                .any(|t| t.iter().all(|&l| values[&l.unsigned_abs()] == (l > 0))),
            Some((&(quant, v), rest)) => {
                let mut branch = |b: bool| {
                    values.insert(v, b);
                    go(q, rest, values)
                };
                match quant {
                    Quantifier::Exists => branch(false) || branch(true),
                    Quantifier::Forall => branch(false) && branch(true),
                }
            }
        }
    }
    go(q, &order, &mut BTreeMap::new())
}

fn strip_fo_quantifiers(e: &Expr) -> &Expr {
    match e {
        Expr::Forall(_, b) | Expr::Exists(_, b) => strip_fo_quantifiers(b),
        other => other,
    }
}

fn is_atom_of(e: &Expr, rel: &str, arity: usize) -> bool {
    matches!(e, Expr::Atom { pred, args } if pred == rel && args.len() == arity)
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_1_not_scc_fidelity() {
    run(1, "non-strong-connectivity fidelity", Duration::from_secs(60), || {
        let f = not_scc();
        let vocab = binary();
        let mut ev = Evaluator::new(limits());
        // n = 1 first: the expected verdict comes from grounding and brute force.
        let mut one = Vec::new();
        for s in ok(enumerate_structures(&vocab, 1, 16))? {
            let brute = ok(ev.check_route(&f, &s, Route::GroundBruteforce))?;
            let got = ok(ev.check(&f, &s))?;
            if got != brute {
                return Err(format!("n=1 check_model {got}, brute force {brute}\n{s}"));
            }
            one.push((s.relation("E").unwrap().len(), brute, !ok(scc_strong_connectivity(&s, "E"))?));
        }
        let mut checked = 2;
        for n in 2..=3 {
            for s in ok(enumerate_structures(&vocab, n, 1 << 10))? {
                let want = !ok(scc_strong_connectivity(&s, "E"))?;
                if ok(ev.check(&f, &s))? != want {
                    return Err(format!("mismatch on\n{s}"));
                }
                checked += 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..1000 {
            let s = ok(random_digraph(&mut rng, 4, 0.5))?;
            let want = !ok(scc_strong_connectivity(&s, "E"))?;
            if ok(ev.check(&f, &s))? != want {
                return Err(format!("mismatch on\n{s}"));
            }
            checked += 1;
        }
        let one: Vec<String> = one
            .iter()
            .map(|(edges, b, not_scc)| format!("{edges} edge(s): formula {b}, not-scc {not_scc}"))
            .collect();
        Ok(format!("{checked} digraphs, zero mismatches; n=1 from brute force: {}", one.join(", ")))
    });
}

#[test]
fn criterion_2_universal_block_elimination() {
    run(2, "universal block elimination", Duration::from_secs(300), || {
        let mut structures = 0u128;
        for f in pi1_corpus() {
            let c = f.as_clausal().unwrap();
            let out = ok(drop_innermost_universal(c))?;
            let out = SoFormula::Clausal(out);
            if ok(classify(&out))? != FragmentTag::FoUniversalCnf {
                return Err(format!("{f} gave {out}, which is not first-order universal CNF"));
            }
            let report = ok(equiv_test(&f, &out, 3))?;
            if let Some(cx) = report.counterexample() {
                return Err(format!("{f} vs {out}: counterexample\n{}", cx.structure));
            }
            // check_model strips universal blocks itself, so the source is
            // also decided by explicit grounding.
            let vocab = ok(f.signature())?;
            for n in 1..=3 {
                for s in ok(enumerate_structures(&vocab, n, 1 << 10))? {
                    if single_block_oracle(c, &s) != single_block_oracle(out.as_clausal().unwrap(), &s) {
                        return Err(format!("{f} vs {out}: grounding disagrees on\n{s}"));
                    }
                }
            }
            structures += report.tested;
        }
        Ok(format!("500 formulas, {structures} structures, zero counterexamples"))
    });
}

#[test]
fn criterion_3_guard_expansion() {
    run(3, "guard expansion", Duration::from_secs(300), || {
        let mut disjuncts = 0;
        for f in sigma1r_corpus() {
            let c = f.as_clausal().unwrap();
            let guarded: BTreeSet<&str> = c
                .matrix
                .iter()
                .flat_map(|cl| &cl.0)
                .filter_map(|l| match l {
                    Literal::Guard(r) => Some(r.as_str()),
                    _ => None,
                })
                .collect();
            if !(1..=2).contains(&guarded.len()) {
                return Err(format!("{f} has {} guarded variables", guarded.len()));
            }
            let ds = ok(expand_exists_r(c))?;
            for d in &ds {
                if d.has_guards() {
                    return Err(format!("{f}: disjunct {d} still has a guard"));
                }
                let tag = ok(classify(&SoFormula::Clausal(d.clone())))?;
                let fits = match &tag {
                    FragmentTag::FoExists(inner) => {
                        matches!(**inner, FragmentTag::SigmaKrom(1) | FragmentTag::FoUniversalCnf)
                    }
                    FragmentTag::SigmaKrom(1) | FragmentTag::FoUniversalCnf => true,
                    _ => false,
                };
                if !fits {
                    return Err(format!("{f}: disjunct {d} classifies as {tag}"));
                }
            }
            disjuncts += ds.len();
            let out = SoFormula::Disjunction(ds);
            let report = ok(equiv_test(&f, &out, 3))?;
            if let Some(cx) = report.counterexample() {
                return Err(format!("{f} vs {out}: counterexample\n{}", cx.structure));
            }
            // check_model expands guards itself; decide the source by grounding.
            let vocab = ok(f.signature())?;
            let mut ev = Evaluator::new(limits());
            for n in 1..=3 {
                for s in ok(enumerate_structures(&vocab, n, 1 << 10))? {
                    if single_block_oracle(c, &s) != ok(ev.check(&out, &s))? {
                        return Err(format!("{f} vs {out}: grounding disagrees on\n{s}"));
                    }
                }
            }
        }
        Ok(format!("300 formulas, {disjuncts} disjuncts, zero counterexamples"))
    });
}

#[test]
fn criterion_4_skolemization() {
    run(4, "first-order Skolemization", Duration::from_secs(300), || {
        let mut alternations = [0usize; 3];
        for p in prenex_corpus() {
            let src = SoFormula::General(p.to_expr());
            let sk = ok(skolemize_fo(&p))?;
            let e = sk.to_expr();
            let arity = p.variables().len();
            let Expr::SoQuant { quantifier: Quantifier::Exists, name, arity: a, body } = &e else {
                return Err(format!("{src}: not ∃Y: {e}"));
            };
            let Expr::And(parts) = &**body else {
                return Err(format!("{src}: body is not a conjunction"));
            };
            let shape = *a == arity
                && parts.len() == 3
                && is_atom_of(strip_fo_quantifiers(&parts[0]), name, arity)
                && matches!(strip_fo_quantifiers(&parts[1]), Expr::Or(o) if matches!(&o[0], Expr::Not(y) if matches!(&**y, Expr::And(ys) if ys.len() == 2 && ys.iter().all(|y| is_atom_of(y, name, arity)))))
                && matches!(strip_fo_quantifiers(&parts[2]), Expr::Or(o) if matches!(&o[0], Expr::Not(y) if is_atom_of(y, name, arity)));
            if !shape {
                return Err(format!("{src}: output {e} does not have the ∃Y(φ1 ∧ φ2 ∧ φ3) shape"));
            }
            let out = SoFormula::General(e);
            let report = ok(equiv_test(&src, &out, 3))?;
            if let Some(cx) = report.counterexample() {
                return Err(format!("{src} vs {out}: counterexample\n{}", cx.structure));
            }
            alternations[p.prefix.len() - 1] += 1;
        }
        Ok(format!(
            "300 sentences ({} with 0, {} with 1, {} with 2 alternations), zero counterexamples",
            alternations[0], alternations[1], alternations[2]
        ))
    });
}

#[test]
fn criterion_5_qbf_encoding() {
    run(5, "QBF encoding fidelity", Duration::from_secs(120), || {
        let lim = limits();
        // ∃x1 ∀x2 ∃x3 ∀x4 ((x1 ∧ ¬x2) ∨ (x2 ∧ ¬x4) ∨ (x3 ∧ x4))
        let sigma4 = PrefixedDnfQbf {
            names: (1..=4).map(|i| format!("x{i}")).collect(),
            blocks: (1..=4u32)
                .map(|v| QBlock {
                    quantifier: if v % 2 == 1 { Quantifier::Exists } else { Quantifier::Forall },
                    vars: vec![v],
                })
                .collect(),
            terms: vec![vec![1, -2], vec![2, -4], vec![3, 4]],
        };
        // all 16 rows, quantifiers applied by hand
        let row = |x: [bool; 4]| (x[0] && !x[1]) || (x[1] && !x[3]) || (x[2] && x[3]);
        let rows = |x1: bool, x2: bool, x3: bool| [false, true].iter().all(|&x4| row([x1, x2, x3, x4]));
        let table =
            [false, true].iter().any(|&x1| [false, true].iter().all(|&x2| [false, true].iter().any(|&x3| rows(x1, x2, x3))));
        let enc = ok(encode_qbf(&sigma4))?;
        let phi = SoFormula::Clausal(phi_formula(4));
        let via_phi = ok(Evaluator::new(lim).check(&phi, &enc.structure))?;
        let brute = ok(eval_qbf_bruteforce(&sigma4.to_ground(), &lim))?;
        if table != via_phi || table != brute || table != qbf_oracle(&sigma4) {
            return Err(format!("Σ4 example: table {table}, Φ {via_phi}, brute force {brute}"));
        }
        let phi2 = SoFormula::Clausal(phi_formula(2));
        let mut truths = 0;
        for q in qbf_corpus() {
            let enc = ok(encode_qbf(&q))?;
            let want = qbf_oracle(&q);
            let brute = ok(eval_qbf_bruteforce(&q.to_ground(), &lim))?;
            let got = ok(Evaluator::new(lim).check(&phi2, &enc.structure))?;
            if want != brute || want != got {
                return Err(format!("{q:?}: oracle {want}, brute force {brute}, Φ {got}"));
            }
            truths += usize::from(want);
        }
        Ok(format!(
            "Σ4 example is {table} (16-row table, Φ and brute force agree; the criterion text expects false), \
             200 Σ2 QBFs ({truths} true) agree"
        ))
    });
}

fn audit(source: &SoFormula, t: &Translation) -> Result<(), String> {
    let im = &t.intermediate;
    let (x_len, m, k) = (im.x.len(), im.m(), im.k());
    let g = im.prefix.iter().map(|q| q.arity).max().unwrap_or(0);
    let d = 3 + (x_len + m + 1).max(g + k + 1);
    if t.interpretation.d != d {
        return Err(format!("{source}: width {} but 3 + max({x_len}+{m}+1, {g}+{k}+1) = {d}", t.interpretation.d));
    }
    let theta = t.theta_clausal();
    if theta.so_prefix.iter().any(|q| q.arity == 0 || q.arity % d != 0) {
        return Err(format!("{source}: Θ arities are not multiples of {d}"));
    }
    let blocks = theta.blocks();
    let source_blocks = source.to_expr().so_prefix().0.len();
    if blocks.len() != source_blocks + 1 || blocks[0].0 != im.prefix[0].quantifier {
        return Err(format!("{source}: Θ has {} blocks", blocks.len()));
    }
    Ok(())
}

fn delta_agrees(source: &SoFormula, t: &Translation) -> Result<usize, String> {
    let SoFormula::Disjunction(ds) = &t.output else {
        return Err("output is not a disjunction".into());
    };
    let small = SoFormula::Clausal(ds[1].clone());
    let vocab = ok(source.signature())?;
    let mut ev = Evaluator::new(limits());
    let mut count = 0;
    for s in ok(enumerate_structures(&vocab, 1, 1 << 10))? {
        let brute = ok(ev.check_route(source, &s, Route::GroundBruteforce))?;
        if ok(ev.check(&small, &s))? != brute {
            return Err(format!("{source}: δ disagrees on\n{s}"));
        }
        count += 1;
    }
    Ok(count)
}

#[test]
fn criterion_6_hierarchy_translation() {
    run(6, "hierarchy translation components", Duration::from_secs(600), || {
        // (i) width audit
        let mut widths = BTreeSet::new();
        let mut one_element = 0;
        for src in translation_sources() {
            let t = ok(translate_sigma_k(&src))?;
            audit(&src, &t)?;
            widths.insert(t.interpretation.d);
            one_element += delta_agrees(&src, &t)?;
        }
        // (ii) the interpreted structure against the encoding of ψ_𝒜
        let src = parse_formula(SIGMA2_SOURCE).unwrap();
        let t = ok(translate_sigma_k(&src))?;
        audit(&src, &t)?;
        let mut ev = Evaluator::new(limits());
        let mut tuples = 0u128;
        for s in ok(enumerate_structures(&binary(), 2, 1 << 8))? {
            let image = ok(interpret_structure(&t.interpretation, &s, 1 << 13))?;
            let ground = ok(ground_intermediate(&t.intermediate, &s))?;
            let problems = ok(compare_with_encoding(&t.interpretation, &image, &ground))?;
            if !problems.is_empty() {
                return Err(format!("on\n{s}\n{}", problems.join("\n")));
            }
            let psi = qbf_oracle(&ground.qbf);
            let direct = ok(ev.check_route(&src, &s, Route::GroundBruteforce))?;
            if psi != direct {
                return Err(format!("ψ_𝒜 is {psi} but the source is {direct} on\n{s}"));
            }
            tuples += image.universe;
        }
        // (iii) δ on one-element structures
        one_element += delta_agrees(&src, &t)?;
        // (iv) shape
        let tag = ok(classify(&t.output))?;
        let want = FragmentTag::Disjunction { inner: Box::new(FragmentTag::SigmaKromR(3)), fo_exists: false };
        if tag != want {
            return Err(format!("output classifies as {tag}"));
        }
        Ok(format!(
            "50 widths audited (d in {widths:?}); 16 structures matched the encoding ({tuples} tuples, d = {}); \
             {one_element} one-element checks; output is {tag}",
            t.interpretation.d
        ))
    });
}

#[test]
fn criterion_7_ekrom() {
    run(7, "EKROM suite", Duration::from_secs(300), || {
        let mut ev = Evaluator::new(limits());
        let (mut models, mut substructures) = (0, 0);
        for f in ekrom_corpus() {
            if ok(classify(&f))? != FragmentTag::SoEkrom {
                return Err(format!("{f} is not SO-EKROM"));
            }
            let vocab = ok(f.signature())?;
            for n in 1..=3 {
                for s in ok(enumerate_structures(&vocab, n, 1 << 10))? {
                    let alt = ok(ev.check_route(&f, &s, Route::Specialized))?;
                    if n <= 2 && alt != ok(ev.check_route(&f, &s, Route::GroundBruteforce))? {
                        return Err(format!("{f}: alternating and brute force disagree on\n{s}"));
                    }
                    if !alt {
                        continue;
                    }
                    models += 1;
                    for mask in 1u32..(1 << n) - 1 {
                        let keep: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                        let sub = ok(s.induced(&keep))?;
                        if !ok(ev.check(&f, &sub))? {
                            return Err(format!("{f}: model\n{s}\nhas a non-model substructure on {keep:?}"));
                        }
                        substructures += 1;
                    }
                }
            }
        }
        Ok(format!("200 formulas, {models} models, {substructures} proper substructures, zero failures"))
    });
}

#[test]
fn criterion_8_polynomial_route() {
    run(8, "polynomial route on n = 20", Duration::from_secs(10), || {
        let f = not_scc();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut ev = Evaluator::new(limits());
        let mut verdicts = Vec::new();
        for _ in 0..3 {
            let s = ok(random_digraph(&mut rng, 20, 0.5))?;
            let got = ok(ev.check(&f, &s))?;
            if got != !ok(scc_strong_connectivity(&s, "E"))? {
                return Err(format!("wrong verdict {got}"));
            }
            verdicts.push(got);
        }
        // one sparse graph, which is not strongly connected
        let s = ok(random_digraph(&mut rng, 20, 0.05))?;
        let got = ok(ev.check(&f, &s))?;
        if got != !ok(scc_strong_connectivity(&s, "E"))? {
            return Err(format!("wrong verdict {got} on the sparse graph"));
        }
        verdicts.push(got);
        if ev.stats.used_bruteforce() || ev.stats.twosat_calls == 0 {
            return Err(format!("route telemetry {:?}", ev.stats));
        }
        Ok(format!(
            "verdicts {verdicts:?}; {} 2-SAT calls, no brute force",
            ev.stats.twosat_calls
        ))
    });
}

fn corpus_union() -> Vec<SoFormula> {
    let mut all = vec![not_scc()];
    for f in pi1_corpus() {
        all.push(SoFormula::Clausal(drop_innermost_universal(f.as_clausal().unwrap()).unwrap()));
        all.push(f);
    }
    for f in sigma1r_corpus() {
        all.push(SoFormula::Disjunction(expand_exists_r(f.as_clausal().unwrap()).unwrap()));
        all.push(f);
    }
    for p in prenex_corpus() {
        all.push(SoFormula::General(skolemize_fo(&p).unwrap().to_expr()));
        all.push(SoFormula::General(p.to_expr()));
    }
    all.push(SoFormula::Clausal(phi_formula(2)));
    all.push(SoFormula::Clausal(phi_formula(4)));
    all.extend(ekrom_corpus());
    all.push(parse_formula(SIGMA2_SOURCE).unwrap());
    all.extend(translation_sources());
    all
}

#[test]
fn criterion_9_route_agreement() {
    run(9, "route agreement", Duration::from_secs(600), || {
        let corpus = corpus_union();
        let mut ev = Evaluator::new(limits());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (mut checks, mut sampled) = (0u64, 0);
        for f in &corpus {
            let vocab = ok(f.signature())?;
            let mut structures = Vec::new();
            for n in 1..=2 {
                let space = ok(enumerate_structures(&vocab, n, u128::MAX))?;
                if space.len() <= 4096 {
                    structures.extend(space.iter());
                } else {
                    sampled += 1;
                    structures.extend((0..256).map(|_| space.get(rng.gen_range(0..space.len()))));
                }
            }
            for s in &structures {
                let tree = ok(ev.check_route(f, s, Route::Tree))?;
                let brute = ok(ev.check_route(f, s, Route::GroundBruteforce))?;
                let spec = ok(ev.check_route(f, s, Route::Specialized))?;
                if tree != brute || brute != spec {
                    return Err(format!("{f}: tree {tree}, brute force {brute}, specialized {spec} on\n{s}"));
                }
                checks += 1;
            }
        }
        Ok(format!(
            "{} formulas, {checks} structures, three routes agree ({sampled} large spaces sampled at 256)",
            corpus.len()
        ))
    });
}
