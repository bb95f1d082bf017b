//! DIMACS CNF input for the reduction, restricted to three-literal clauses.

use super::GadgetError;

/// One literal; `var` is a zero-based variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

/// A 3SAT formula with at least as many clauses as variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self, GadgetError> {
        for (index, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var >= num_vars {
                    return Err(GadgetError::Parse(format!(
                        "clause {index} uses variable {} but only {num_vars} are declared",
                        lit.var + 1
                    )));
                }
            }
        }
        if clauses.len() < num_vars {
            return Err(GadgetError::FewerClausesThanVariables {
                clauses: clauses.len(),
                variables: num_vars,
            });
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }
}

/// Parses DIMACS CNF text. Comment (`c`) and `%` lines are skipped; every
/// clause must be zero-terminated and exactly three literals long.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, GadgetError> {
    let mut header: Option<(usize, usize)> = None;
    let mut literals: Vec<i64> = Vec::new();

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(GadgetError::Parse("duplicate `p` header".into()));
            }
            let mut parts = rest.split_whitespace();
            if parts.next() != Some("cnf") {
                return Err(GadgetError::Parse("expected `p cnf <vars> <clauses>`".into()));
            }
            let vars = parse_count(parts.next(), "variable count")?;
            let clauses = parse_count(parts.next(), "clause count")?;
            if parts.next().is_some() {
                return Err(GadgetError::Parse("trailing tokens after header".into()));
            }
            header = Some((vars, clauses));
            continue;
        }
        if header.is_none() {
            return Err(GadgetError::Parse("clause data before `p cnf` header".into()));
        }
        for token in line.split_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| GadgetError::Parse(format!("bad literal {token:?}")))?;
            literals.push(lit);
        }
    }

    let (num_vars, declared) =
        header.ok_or_else(|| GadgetError::Parse("missing `p cnf` header".into()))?;

    let mut clauses = Vec::with_capacity(declared);
    let mut current: Vec<Literal> = Vec::with_capacity(3);
    for lit in literals {
        if lit == 0 {
            let clause: [Literal; 3] = current
                .as_slice()
                .try_into()
                .map_err(|_| GadgetError::ClauseLength {
                    index: clauses.len(),
                    len: current.len(),
                })?;
            clauses.push(clause);
            current.clear();
            continue;
        }
        let var = lit.unsigned_abs() as usize - 1;
        if var >= num_vars {
            return Err(GadgetError::Parse(format!(
                "literal {lit} exceeds the declared {num_vars} variables"
            )));
        }
        current.push(Literal {
            var,
            negated: lit < 0,
        });
    }
    if !current.is_empty() {
        return Err(GadgetError::Parse("unterminated final clause".into()));
    }
    if clauses.len() != declared {
        return Err(GadgetError::Parse(format!(
            "header declares {declared} clauses, found {}",
            clauses.len()
        )));
    }
    CnfFormula::new(num_vars, clauses)
}

fn parse_count(token: Option<&str>, what: &str) -> Result<usize, GadgetError> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| GadgetError::Parse(format!("bad {what} in header")))
}
