//! QDIMACS output for ground CNF QBFs.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::eval::ground::GroundAtomIndex;
use crate::eval::qbf::{GroundQbf, Matrix};
use crate::logic::formula::Quantifier;

/// Writes `qbf` in QDIMACS: header, one `e`/`a` line per block (empty blocks
/// skipped, adjacent blocks of the same kind merged), the clauses, and a
/// trailing `c atom <id> R(t1,...,tk)` line per variable.
pub fn emit_qdimacs(qbf: &GroundQbf, index: &GroundAtomIndex) -> Result<String> {
    let Matrix::Cnf(clauses) = &qbf.matrix else {
        return Err(Error::Unsupported(format!(
            "QDIMACS needs a CNF matrix, got {}",
            qbf.matrix.kind()
        )));
    };
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", qbf.num_vars, clauses.len()).unwrap();
    let mut blocks: Vec<(Quantifier, Vec<u32>)> = Vec::new();
    for b in qbf.prefix.iter().filter(|b| !b.vars.is_empty()) {
        match blocks.last_mut() {
            Some((q, vs)) if *q == b.quantifier => vs.extend(&b.vars),
            _ => blocks.push((b.quantifier, b.vars.clone())),
        }
    }
    for (q, vars) in &blocks {
        out.push(if *q == Quantifier::Exists { 'e' } else { 'a' });
        for v in vars {
            write!(out, " {v}").unwrap();
        }
        out.push_str(" 0\n");
    }
    for c in clauses {
        for l in c {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    for id in 1..=qbf.num_vars {
        if let Some((name, tuple)) = index.atom(id) {
            let t: Vec<String> = tuple.iter().map(ToString::to_string).collect();
            writeln!(out, "c atom {id} {name}({})", t.join(",")).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::ground::ground;
    use crate::eval::qbf::QBlock;
    use crate::logic::formula::SoQuant;
    use crate::textio::{parse_formula, parse_structure};

    fn header_and_body(text: &str) -> Vec<&str> {
        text.lines().filter(|l| !l.starts_with('c')).collect()
    }

    #[test]
    fn single_existential_unit() {
        let q = GroundQbf::new(
            1,
            vec![QBlock { quantifier: Quantifier::Exists, vars: vec![1] }],
            Matrix::Cnf(vec![vec![1]]),
        );
        let index = GroundAtomIndex::new(&[SoQuant::exists("P", 0)], 1).unwrap();
        let text = emit_qdimacs(&q, &index).unwrap();
        assert_eq!(header_and_body(&text), ["p cnf 1 1", "e 1 0", "1 0"]);
    }

    #[test]
    fn two_blocks() {
        let q = GroundQbf::new(
            2,
            vec![
                QBlock { quantifier: Quantifier::Exists, vars: vec![1] },
                QBlock { quantifier: Quantifier::Forall, vars: vec![2] },
            ],
            Matrix::Cnf(vec![vec![1, 2], vec![1, -2]]),
        );
        let index = GroundAtomIndex::new(&[SoQuant::exists("P", 0), SoQuant::forall("Q", 0)], 1).unwrap();
        let text = emit_qdimacs(&q, &index).unwrap();
        assert_eq!(header_and_body(&text), ["p cnf 2 2", "e 1 0", "a 2 0", "1 2 0", "1 -2 0"]);
    }

    #[test]
    fn not_scc_grounding_is_deterministic_and_mapped() {
        let f = parse_formula(
            "exists2 R/2. exists2 Y/2. all x y z. (~E(x,y)|R(x,y)) & (~E(x,y)|~R(y,z)|R(x,z)) \
             & (R(x,y)|Y(x,y)) & (~Y(x,y)|~R(x,y)) & (some Y)",
        )
        .unwrap();
        let s = parse_structure("domain 2\nrel E/2 = {(0,1)}").unwrap();
        let (q, index) = ground(f.as_clausal().unwrap(), &s).unwrap();
        let text = emit_qdimacs(&q, &index).unwrap();
        let Matrix::Cnf(cs) = &q.matrix else { unreachable!() };
        // two binary relations over a 2-element domain: 2·2² atoms
        assert_eq!(text.lines().next().unwrap(), format!("p cnf 8 {}", cs.len()));
        assert!(text.contains("c atom 1 R(0,0)"));
        assert!(text.contains("c atom 8 Y(1,1)"));
        assert_eq!(text, emit_qdimacs(&q, &index).unwrap());
    }

    #[test]
    fn dnf_is_unsupported() {
        let q = GroundQbf::new(0, vec![], Matrix::Dnf(vec![]));
        let index = GroundAtomIndex::new(&[], 1).unwrap();
        assert!(matches!(emit_qdimacs(&q, &index), Err(Error::Unsupported(_))));
    }
}
