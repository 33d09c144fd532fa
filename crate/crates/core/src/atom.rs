//! Interned atoms: plain symbols, algebraic generators and function atoms.
//!
//! The table is process-wide and append-only. Atom identity is structural, so
//! interning the same atom twice (from any thread) yields the same [`Var`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, OnceLock, RwLock};

use crate::error::{ExprError, ExprResult};
use crate::poly::{Poly, VarId};
use crate::ratfunc::RatFunc;

/// Handle to an interned atom.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Var(pub(crate) VarId);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Atom {
    Symbol(String),
    /// Root of `g² + b·g + c = 0`; `relation` is a canonical rendering of (b, c).
    Generator {
        name: String,
        relation: String,
    },
    /// `index[k]` counts derivatives taken with respect to `args[k]`.
    Function {
        name: String,
        args: Vec<Var>,
        index: Vec<u32>,
    },
}

/// Defining data of an algebraic generator `g` with `g² + b·g + c = 0`.
///
/// `b` and `c` are polynomials in plain symbols. The positive branch
/// `g = (−b + √(b² − 4c)) / 2` is the one used for evaluation.
#[derive(Debug)]
pub struct GeneratorData {
    pub b: Poly,
    pub c: Poly,
    rules: OnceLock<Vec<(Var, RatFunc)>>,
}

impl GeneratorData {
    pub fn rules(&self) -> Option<&[(Var, RatFunc)]> {
        self.rules.get().map(|r| r.as_slice())
    }

    /// Symbols the relation depends on.
    pub fn deps(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.b.vars().into_iter().chain(self.c.vars()).map(Var).collect();
        v.sort();
        v.dedup();
        v
    }
}

struct Entry {
    atom: Arc<Atom>,
    generator: Option<Arc<GeneratorData>>,
}

#[derive(Default)]
struct Table {
    entries: Vec<Entry>,
    index: HashMap<Atom, VarId>,
}

static TABLE: LazyLock<RwLock<Table>> = LazyLock::new(|| RwLock::new(Table::default()));

fn intern(atom: Atom, generator: impl FnOnce() -> Option<Arc<GeneratorData>>) -> Var {
    if let Some(&id) = TABLE.read().unwrap().index.get(&atom) {
        return Var(id);
    }
    let mut t = TABLE.write().unwrap();
    if let Some(&id) = t.index.get(&atom) {
        return Var(id);
    }
    let id = t.entries.len() as VarId;
    t.entries.push(Entry { atom: Arc::new(atom.clone()), generator: generator() });
    t.index.insert(atom, id);
    Var(id)
}

impl Var {
    pub fn symbol(name: &str) -> Var {
        intern(Atom::Symbol(name.to_string()), || None)
    }

    pub fn function(name: &str, args: &[Var], index: &[u32]) -> Var {
        assert_eq!(args.len(), index.len(), "multi-index length must match argument count");
        intern(Atom::Function { name: name.to_string(), args: args.to_vec(), index: index.to_vec() }, || None)
    }

    /// Declares (or re-fetches) the generator `name` with `name² + b·name + c = 0`.
    pub fn generator(name: &str, b: Poly, c: Poly) -> ExprResult<Var> {
        for p in [&b, &c] {
            if p.vars().into_iter().any(|v| Var(v).generator_data().is_some()) {
                return Err(ExprError::InvalidGenerator {
                    name: name.to_string(),
                    msg: "relation coefficients may only involve plain symbols".into(),
                });
            }
        }
        let relation = format!("{};{}", poly_key(&b), poly_key(&c));
        Ok(intern(Atom::Generator { name: name.to_string(), relation }, move || {
            Some(Arc::new(GeneratorData { b, c, rules: OnceLock::new() }))
        }))
    }

    pub fn id(self) -> VarId {
        self.0
    }

    pub fn from_id(id: VarId) -> Var {
        Var(id)
    }

    pub fn atom(self) -> Arc<Atom> {
        TABLE.read().unwrap().entries[self.0 as usize].atom.clone()
    }

    pub fn generator_data(self) -> Option<Arc<GeneratorData>> {
        TABLE.read().unwrap().entries[self.0 as usize].generator.clone()
    }

    pub fn is_generator(self) -> bool {
        self.generator_data().is_some()
    }

    pub fn is_function(self) -> bool {
        matches!(*self.atom(), Atom::Function { .. })
    }

    pub fn is_plain_symbol(self) -> bool {
        matches!(*self.atom(), Atom::Symbol(_))
    }

    pub fn name(self) -> String {
        match &*self.atom() {
            Atom::Symbol(n) | Atom::Generator { name: n, .. } | Atom::Function { name: n, .. } => n.clone(),
        }
    }

    /// For function atoms: the atom with one more derivative in argument `k`.
    pub fn derivative(self, k: usize) -> Option<Var> {
        match &*self.atom() {
            Atom::Function { name, args, index } => {
                let mut idx = index.clone();
                idx[k] += 1;
                Some(Var::function(name, args, &idx))
            }
            _ => None,
        }
    }

    /// Installs the derivative rules of a generator. Re-installing must agree
    /// with what is already there.
    pub fn set_generator_rules(self, rules: Vec<(Var, RatFunc)>) -> ExprResult<()> {
        let data = self
            .generator_data()
            .ok_or_else(|| ExprError::InvalidGenerator { name: self.name(), msg: "not a generator".into() })?;
        if let Some(existing) = data.rules.get() {
            let same = existing.len() == rules.len()
                && rules.iter().all(|(v, r)| existing.iter().any(|(w, q)| w == v && q == r));
            return if same {
                Ok(())
            } else {
                Err(ExprError::InvalidGenerator {
                    name: self.name(),
                    msg: "conflicting derivative rules for an existing generator".into(),
                })
            };
        }
        let _ = data.rules.set(rules);
        Ok(())
    }

    /// Canonical atom order: by name, then multi-index (as sorted argument
    /// positions), then kind.
    pub fn canonical_cmp(self, other: Var) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        canonical_key(&self.atom()).cmp(&canonical_key(&other.atom()))
    }
}

fn canonical_key(a: &Atom) -> (String, Vec<u32>, u8, String) {
    match a {
        Atom::Symbol(n) => (n.clone(), Vec::new(), 0, String::new()),
        Atom::Generator { name, relation } => (name.clone(), Vec::new(), 1, relation.clone()),
        Atom::Function { name, args, index } => {
            let mut positions = Vec::new();
            for (k, &c) in index.iter().enumerate() {
                positions.extend(std::iter::repeat_n(k as u32, c as usize));
            }
            let argkey = args.iter().map(|a| a.name()).collect::<Vec<_>>().join(",");
            (name.clone(), positions, 2, argkey)
        }
    }
}

/// Order-independent textual key of a polynomial (used for generator identity).
fn poly_key(p: &Poly) -> String {
    let mut terms: Vec<String> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut factors: Vec<String> = m.iter().map(|(v, e)| format!("{}^{}", Var(v).name(), e)).collect();
            factors.sort();
            format!("{}*{}", c, factors.join("*"))
        })
        .collect();
    terms.sort();
    terms.join("+")
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.atom() {
            Atom::Symbol(n) | Atom::Generator { name: n, .. } => write!(f, "{n}"),
            Atom::Function { name, args, index } => {
                let arg_names: Vec<String> = args.iter().map(|a| a.name()).collect();
                if index.iter().all(|&c| c == 0) {
                    write!(f, "{}({})", name, arg_names.join(","))
                } else {
                    write!(f, "D({name}")?;
                    for (k, &c) in index.iter().enumerate() {
                        for _ in 0..c {
                            write!(f, ",{}", arg_names[k])?;
                        }
                    }
                    write!(f, ")")
                }
            }
        }
    }
}
