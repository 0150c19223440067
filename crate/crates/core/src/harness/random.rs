//! Seeded random corpora: clausal formulas by fragment, prenex first-order
//! sentences, prefixed DNF QBFs, second-order sources for the hierarchy
//! translation, and digraphs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::qbf::QBlock;
use crate::hierarchy::qbf::PrefixedDnfQbf;
use crate::logic::classify::{classify, FragmentTag};
use crate::logic::formula::{ClausalFormula, Clause, Expr, Literal, Quantifier, SoFormula, SoQuant, Term};
use crate::logic::structure::{FiniteStructure, Relation};
use crate::logic::vocab::Vocabulary;
use crate::transforms::prenex::PrenexFo;

/// What [`random_formula`] should produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    /// One of `FoUniversalCnf`, the four Krom tags, or `SoEkrom`.
    pub fragment: FragmentTag,
    pub vocab: Vocabulary,
    pub clauses: usize,
    /// Second-order variables, at least one per block.
    pub so_vars: usize,
    /// Largest second-order arity; at most 2.
    pub max_arity: usize,
    pub fo_vars: usize,
    /// Number of guarded variables in the `^r` fragments.
    pub guards: usize,
    pub seed: u64,
}

impl Profile {
    pub fn new(fragment: FragmentTag, vocab: Vocabulary, clauses: usize, seed: u64) -> Self {
        let guards = usize::from(matches!(
            fragment,
            FragmentTag::SigmaKromR(_) | FragmentTag::PiKromR(_)
        ));
        let so_vars = match fragment {
            FragmentTag::SoEkrom => 3,
            _ => blocks_of(&fragment).unwrap_or(0).max(1),
        };
        Profile {
            fragment,
            vocab,
            clauses,
            so_vars,
            max_arity: 2,
            fo_vars: 2,
            guards,
            seed,
        }
    }

    pub fn with_so_vars(mut self, n: usize) -> Self {
        self.so_vars = n;
        self
    }

    pub fn with_guards(mut self, n: usize) -> Self {
        self.guards = n;
        self
    }

    pub fn with_fo_vars(mut self, n: usize) -> Self {
        self.fo_vars = n;
        self
    }

    pub fn with_max_arity(mut self, a: usize) -> Self {
        self.max_arity = a;
        self
    }
}

fn blocks_of(tag: &FragmentTag) -> Option<usize> {
    match *tag {
        FragmentTag::FoUniversalCnf => Some(0),
        FragmentTag::SigmaKrom(k)
        | FragmentTag::PiKrom(k)
        | FragmentTag::SigmaKromR(k)
        | FragmentTag::PiKromR(k) => Some(k),
        FragmentTag::SoEkrom => Some(2),
        _ => None,
    }
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    vocab: &'a Vocabulary,
    terms: Vec<Term>,
}

impl Gen<'_> {
    fn term(&mut self) -> Term {
        self.terms.choose(&mut self.rng).cloned().expect("nonempty term pool")
    }

    fn atom(&mut self, pred: &str, arity: usize) -> Literal {
        let args = (0..arity).map(|_| self.term()).collect();
        Literal::atom(pred, args, self.rng.gen())
    }

    /// A vocabulary atom or an (in)equality.
    fn fo_literal(&mut self) -> Literal {
        let rels: Vec<(String, usize)> = self
            .vocab
            .relations()
            .iter()
            .filter(|(r, _)| !self.vocab.is_builtin(r))
            .cloned()
            .collect();
        if !rels.is_empty() && self.rng.gen_bool(0.8) {
            let (r, a) = rels.choose(&mut self.rng).unwrap().clone();
            self.atom(&r, a)
        } else {
            let (l, r) = (self.term(), self.term());
            Literal::eq(l, r, self.rng.gen())
        }
    }
}

/// A seeded random clausal formula in the fragment of `profile`. The
/// result is checked to classify exactly as requested.
pub fn random_formula(profile: &Profile) -> Result<SoFormula> {
    let p = profile;
    let blocks = blocks_of(&p.fragment).ok_or_else(|| {
        Error::precondition(format!("no generator for fragment {}", p.fragment))
    })?;
    let guarded_fragment = matches!(p.fragment, FragmentTag::SigmaKromR(_) | FragmentTag::PiKromR(_));
    let ekrom = p.fragment == FragmentTag::SoEkrom;
    if p.max_arity > 2 || p.max_arity == 0 && p.so_vars > 0 {
        return Err(Error::precondition("second-order arities must lie in 1..=2"));
    }
    if blocks > 0 && p.so_vars < blocks || blocks == 0 && p.so_vars > 0 {
        return Err(Error::precondition(format!(
            "{} needs {blocks} blocks but the profile has {} second-order variables",
            p.fragment, p.so_vars
        )));
    }
    if guarded_fragment != (p.guards > 0) || p.guards > p.so_vars {
        return Err(Error::precondition(format!(
            "{} cannot have {} guarded variables",
            p.fragment, p.guards
        )));
    }
    if p.clauses == 0 && (guarded_fragment || ekrom) {
        return Err(Error::precondition(format!("{} needs at least one clause", p.fragment)));
    }
    let fo: Vec<String> = (1..=p.fo_vars).map(|i| format!("x{i}")).collect();
    let mut terms: Vec<Term> = fo.iter().map(Term::var).collect();
    terms.extend(
        p.vocab
            .constants()
            .iter()
            .filter(|c| !p.vocab.is_builtin(c))
            .map(Term::constant),
    );
    if terms.is_empty() {
        return Err(Error::precondition("no first-order variables or constants"));
    }
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(p.seed),
        vocab: &p.vocab,
        terms,
    };

    // Blocks alternate; every block gets one variable and the rest are spread.
    let first = match p.fragment {
        FragmentTag::SigmaKrom(_) | FragmentTag::SigmaKromR(_) => Quantifier::Exists,
        _ => Quantifier::Forall,
    };
    let mut block_of: Vec<usize> = (0..blocks).collect();
    for _ in blocks..p.so_vars {
        block_of.push(g.rng.gen_range(0..blocks));
    }
    block_of.sort_unstable();
    let prefix: Vec<SoQuant> = block_of
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let q = if b % 2 == 0 { first } else { first.dual() };
            let name = match (ekrom, q) {
                (true, Quantifier::Exists) => format!("Y{}", i + 1),
                _ => format!("X{}", i + 1),
            };
            SoQuant {
                quantifier: q,
                name,
                arity: g.rng.gen_range(1..=p.max_arity.max(1)),
            }
        })
        .collect();
    let so_atom = |g: &mut Gen, q: &SoQuant| g.atom(&q.name, q.arity);

    let mut matrix: Vec<Vec<Literal>> = Vec::with_capacity(p.clauses);
    for ci in 0..p.clauses {
        let mut lits = Vec::new();
        if ekrom {
            let (xs, ys): (Vec<&SoQuant>, Vec<&SoQuant>) =
                prefix.iter().partition(|q| q.quantifier == Quantifier::Forall);
            let (nx, ny) = if ci == 0 {
                // One clause beyond Krom, so the formula is not classified lower.
                let ny = g.rng.gen_range(0..=2);
                (3 - ny, ny)
            } else {
                (g.rng.gen_range(0..=2), g.rng.gen_range(0..=2))
            };
            for _ in 0..nx {
                let q = (*xs.choose(&mut g.rng).unwrap()).clone();
                lits.push(so_atom(&mut g, &q));
            }
            for _ in 0..ny {
                let q = (*ys.choose(&mut g.rng).unwrap()).clone();
                lits.push(so_atom(&mut g, &q));
            }
        } else if !prefix.is_empty() {
            for _ in 0..g.rng.gen_range(0..=2) {
                let q = prefix.choose(&mut g.rng).unwrap().clone();
                lits.push(so_atom(&mut g, &q));
            }
        }
        for _ in 0..g.rng.gen_range(0..=2) {
            lits.push(g.fo_literal());
        }
        if lits.is_empty() {
            lits.push(g.fo_literal());
        }
        matrix.push(lits);
    }
    if guarded_fragment {
        let is_so = |l: &Literal| l.relation().is_some_and(|r| prefix.iter().any(|q| q.name == r));
        let mut names: Vec<&SoQuant> = prefix.iter().collect();
        names.shuffle(&mut g.rng);
        for q in names.into_iter().take(p.guards) {
            let open: Vec<usize> = (0..matrix.len())
                .filter(|&i| matrix[i].iter().filter(|l| matches!(l, Literal::Guard(_))).count() < 2)
                .collect();
            let ci = match open.choose(&mut g.rng) {
                Some(&i) => i,
                None => {
                    matrix.push(Vec::new());
                    matrix.len() - 1
                }
            };
            let clause = &mut matrix[ci];
            // Make room so the clause stays Krom.
            while clause.iter().filter(|l| is_so(l)).count() >= 2 {
                let atoms: Vec<usize> = (0..clause.len())
                    .filter(|&i| is_so(&clause[i]) && !matches!(clause[i], Literal::Guard(_)))
                    .collect();
                clause.remove(atoms[g.rng.gen_range(0..atoms.len())]);
            }
            clause.push(Literal::Guard(q.name.clone()));
        }
    }
    let formula = SoFormula::Clausal(ClausalFormula::new(
        prefix,
        fo,
        matrix.into_iter().map(Clause::new).collect(),
    ));
    formula.validate()?;
    let got = classify(&formula)?;
    if got != p.fragment {
        return Err(Error::structural(format!(
            "generated formula classifies as {got}, not {}",
            p.fragment
        )));
    }
    Ok(formula)
}

/// A prenex sentence `Q₁x̄₁ ⋯ Q_b x̄_b (C₁ ∧ ⋯ ∧ C_m)` with `1 ≤ b ≤ max_blocks`
/// alternating nonempty blocks, at most `max_vars` variables in total and
/// `1 ≤ m ≤ max_clauses` clauses of one to three literals.
pub fn random_prenex_fo(
    rng: &mut impl Rng,
    vocab: &Vocabulary,
    max_blocks: usize,
    max_vars: usize,
    max_clauses: usize,
) -> PrenexFo {
    let nblocks = rng.gen_range(1..=max_blocks.min(max_vars).max(1));
    let nvars = rng.gen_range(nblocks..=max_vars.max(nblocks));
    let vars: Vec<String> = (1..=nvars).map(|i| format!("v{i}")).collect();
    // Cut points split the variables into `nblocks` nonempty runs.
    let mut cuts: Vec<usize> = (1..nvars).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(nblocks - 1).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(nvars);
    let mut q = if rng.gen() { Quantifier::Forall } else { Quantifier::Exists };
    let mut prefix = Vec::new();
    for w in cuts.windows(2) {
        prefix.push((q, vars[w[0]..w[1]].to_vec()));
        q = q.dual();
    }
    let mut terms: Vec<Term> = vars.iter().map(Term::var).collect();
    terms.extend(vocab.constants().iter().map(Term::constant));
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(rng.gen()),
        vocab,
        terms,
    };
    let matrix = (0..g.rng.gen_range(1..=max_clauses.max(1)))
        .map(|_| Clause::new((0..g.rng.gen_range(1..=3)).map(|_| g.fo_literal()).collect()))
        .collect();
    PrenexFo { prefix, matrix }
}

/// A prefixed DNF QBF with `k` alternating nonempty blocks starting with
/// `first`, `k ≤ vars ≤ max_vars` variables and one to `max_terms` terms.
pub fn random_dnf_qbf(
    rng: &mut impl Rng,
    k: usize,
    first: Quantifier,
    max_vars: usize,
    max_terms: usize,
) -> Result<PrefixedDnfQbf> {
    if k == 0 || max_vars < k || max_terms == 0 {
        return Err(Error::precondition(format!(
            "cannot build {k} blocks from {max_vars} variables and {max_terms} terms"
        )));
    }
    let n = rng.gen_range(k..=max_vars);
    let mut sizes = vec![1usize; k];
    for _ in k..n {
        sizes[rng.gen_range(0..k)] += 1;
    }
    let mut blocks = Vec::with_capacity(k);
    let (mut next, mut q) = (1u32, first);
    for s in sizes {
        blocks.push(QBlock {
            quantifier: q,
            vars: (next..next + s as u32).collect(),
        });
        next += s as u32;
        q = q.dual();
    }
    let mut pool: Vec<i32> = (1..=n as i32).collect();
    let terms = (0..rng.gen_range(1..=max_terms))
        .map(|_| {
            pool.shuffle(rng);
            let len = rng.gen_range(1..=n);
            let mut t: Vec<i32> = pool[..len]
                .iter()
                .map(|&v| if rng.gen() { v } else { -v })
                .collect();
            t.sort_unstable_by_key(|l| l.abs());
            t
        })
        .collect();
    let qbf = PrefixedDnfQbf {
        names: (1..=n).map(|i| format!("p{i}")).collect(),
        blocks,
        terms,
    };
    qbf.validate()?;
    Ok(qbf)
}

/// `Q₁X₁ ⋯ Q_kX_k φ` with one variable per block, the last block universal,
/// and `φ` a random prenex first-order sentence over `vocab` and the `X_i`.
pub fn random_so_source(
    rng: &mut impl Rng,
    vocab: &Vocabulary,
    k: usize,
    max_vars: usize,
    max_clauses: usize,
) -> Result<SoFormula> {
    if k == 0 {
        return Err(Error::precondition("a source needs at least one block"));
    }
    let prefix: Vec<SoQuant> = (1..=k)
        .map(|i| SoQuant {
            quantifier: if (k - i) % 2 == 0 { Quantifier::Forall } else { Quantifier::Exists },
            name: format!("X{i}"),
            arity: rng.gen_range(1..=2),
        })
        .collect();
    let mut extended = vocab.clone();
    for q in &prefix {
        extended.add_relation(q.name.clone(), q.arity)?;
    }
    // Every block variable occurs at least once; otherwise its quantifier is idle.
    let mut fo = random_prenex_fo(rng, &extended, 2, max_vars, max_clauses);
    let vars = fo.variables();
    for q in &prefix {
        let mentioned = fo.matrix.iter().flat_map(|c| &c.0).any(|l| l.relation() == Some(&q.name));
        if !mentioned {
            let ci = rng.gen_range(0..fo.matrix.len());
            let args = (0..q.arity)
                .map(|_| Term::var(vars.choose(rng).unwrap()))
                .collect();
            fo.matrix[ci].0.push(Literal::atom(q.name.clone(), args, rng.gen()));
        }
    }
    let mut body = fo.to_expr();
    for q in prefix.iter().rev() {
        body = Expr::so(q.quantifier, q.name.clone(), q.arity, body);
    }
    let f = SoFormula::General(body);
    f.validate()?;
    Ok(f)
}

/// A digraph on `n` nodes over `{E/2}` with each edge present independently
/// with probability `p`. Loops included.
pub fn random_digraph(rng: &mut impl Rng, n: usize, p: f64) -> Result<FiniteStructure> {
    let vocab = Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2)])?;
    let bits = (0..n * n).map(|_| rng.gen_bool(p)).collect();
    let rels = BTreeMap::from([("E".to_string(), Relation::from_bits(2, bits))]);
    FiniteStructure::new(vocab, n, BTreeMap::new(), rels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::Literal;

    fn unary() -> Vocabulary {
        Vocabulary::new(Vec::<String>::new(), [("P".to_string(), 1)]).unwrap()
    }

    fn binary() -> Vocabulary {
        Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2)]).unwrap()
    }

    #[test]
    fn deterministic() {
        let p = Profile::new(FragmentTag::PiKromR(1), unary(), 3, 7);
        let a = random_formula(&p).unwrap();
        assert_eq!(a, random_formula(&p).unwrap());
        assert_eq!(a.to_string(), random_formula(&p).unwrap().to_string());
        let other = random_formula(&Profile { seed: 8, ..p }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn every_fragment() {
        let tags = [
            FragmentTag::FoUniversalCnf,
            FragmentTag::SigmaKrom(1),
            FragmentTag::PiKrom(2),
            FragmentTag::SigmaKromR(1),
            FragmentTag::PiKromR(3),
            FragmentTag::SoEkrom,
        ];
        for tag in tags {
            for seed in 0..100 {
                for vocab in [unary(), binary()] {
                    let mut p = Profile::new(tag.clone(), vocab, 1 + (seed as usize) % 4, seed);
                    if tag == FragmentTag::FoUniversalCnf {
                        p = p.with_so_vars(0);
                    }
                    let f = random_formula(&p).unwrap();
                    assert_eq!(classify(&f).unwrap(), tag, "{f}");
                    let c = f.as_clausal().unwrap();
                    if matches!(tag, FragmentTag::SigmaKrom(_)) {
                        assert!(!c.has_guards());
                    }
                    assert!(c.so_prefix.iter().all(|q| (1..=2).contains(&q.arity)));
                }
            }
        }
    }

    #[test]
    fn guard_count() {
        for seed in 0..50 {
            let p = Profile::new(FragmentTag::SigmaKromR(1), binary(), 3, seed)
                .with_so_vars(2)
                .with_guards(2);
            let f = random_formula(&p).unwrap();
            let c = f.as_clausal().unwrap();
            let guarded: std::collections::BTreeSet<_> = c
                .matrix
                .iter()
                .flat_map(|cl| &cl.0)
                .filter_map(|l| match l {
                    Literal::Guard(r) => Some(r.clone()),
                    _ => None,
                })
                .collect();
            assert_eq!(guarded.len(), 2);
        }
    }

    #[test]
    fn unsatisfiable_profiles() {
        let bad = [
            Profile::new(FragmentTag::SigmaKrom(2), unary(), 2, 0).with_so_vars(1),
            Profile::new(FragmentTag::SigmaKrom(1), unary(), 2, 0).with_max_arity(3),
            Profile::new(FragmentTag::SigmaKrom(1), unary(), 2, 0).with_guards(1),
            Profile::new(FragmentTag::SoEkrom, unary(), 0, 0),
            Profile::new(FragmentTag::GeneralSo, unary(), 2, 0),
            Profile::new(FragmentTag::FoUniversalCnf, Vocabulary::default(), 1, 0).with_so_vars(0).with_fo_vars(0),
        ];
        for p in bad {
            assert!(random_formula(&p).is_err(), "{p:?}");
        }
    }

    #[test]
    fn qbfs_and_sources() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let q = random_dnf_qbf(&mut rng, 2, Quantifier::Exists, 4, 3).unwrap();
            assert_eq!(q.k(), 2);
            assert!(q.num_vars() <= 4 && !q.terms.is_empty() && q.terms.len() <= 3);
            let p = random_prenex_fo(&mut rng, &binary(), 3, 3, 3);
            assert!(p.prefix.len() <= 3 && p.variables().len() <= 3);
            assert!(p.prefix.windows(2).all(|w| w[0].0 != w[1].0));
            let s = random_so_source(&mut rng, &binary(), 2, 2, 2).unwrap();
            let (prefix, _) = s.to_expr().so_prefix();
            assert_eq!(prefix.len(), 2);
            assert_eq!(prefix[1].quantifier, Quantifier::Forall);
        }
        assert!(random_dnf_qbf(&mut rng, 3, Quantifier::Exists, 2, 1).is_err());
    }

    #[test]
    fn digraph_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_digraph(&mut rng, 20, 0.5).unwrap();
        let edges = g.relation("E").unwrap().len();
        assert!((150..250).contains(&edges), "{edges}");
    }
}
