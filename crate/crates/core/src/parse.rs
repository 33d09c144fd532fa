//! Declaration contexts and a recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' signed-integer)?
//! atom   := rational | name | name '(' expr-list ')' | 'D(' name (',' name)+ ')'
//!         | '(' expr ')' | '-' atom
//! ```
//!
//! Besides the grammar, a declared function may be written bare (`v` for
//! `v(r,t)`) and derivatives in subscript form (`v_rt` for `D(v,r,t)`) as long
//! as every argument name is a single character.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::atom::Var;
use crate::error::{ExprError, ExprResult};
use crate::expr::Expr;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

#[derive(Clone, Debug)]
enum Binding {
    Symbol(Var),
    Function(Vec<Var>),
}

/// Names visible to the parser.
#[derive(Clone, Debug, Default)]
pub struct Context {
    names: HashMap<String, Binding>,
}

fn valid_name(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "D"
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh(&self, name: &str) -> ExprResult<()> {
        if !valid_name(name) {
            return Err(ExprError::Declaration(format!("`{name}` is not a valid name")));
        }
        if self.names.contains_key(name) {
            return Err(ExprError::Declaration(format!("`{name}` is declared twice")));
        }
        Ok(())
    }

    pub fn symbol(&mut self, name: &str) -> ExprResult<Var> {
        self.check_fresh(name)?;
        let v = Var::symbol(name);
        self.names.insert(name.to_string(), Binding::Symbol(v));
        Ok(v)
    }

    /// Binds `name` to an already interned atom (plain symbol or generator).
    pub fn bind(&mut self, name: &str, v: Var) -> ExprResult<()> {
        self.check_fresh(name)?;
        self.names.insert(name.to_string(), Binding::Symbol(v));
        Ok(())
    }

    /// Declares an algebraic generator from a monic quadratic relation in
    /// `name` (e.g. `r^2 - x^2 - y^2 - z^2`) and its derivative rules.
    pub fn generator(&mut self, name: &str, relation: &str, rules: &[(&str, &str)]) -> ExprResult<Var> {
        self.check_fresh(name)?;
        let mut scratch = self.clone();
        let tmp = scratch.symbol(name)?;
        let rel = scratch.parse_ratfunc(relation)?;
        let bad = |msg: &str| ExprError::InvalidGenerator { name: name.to_string(), msg: msg.to_string() };
        if rel.den().constant_value().is_none() {
            return Err(bad("relation must be polynomial"));
        }
        let coeffs = rel.num().dense_in(tmp.id());
        if coeffs.len() != 3 {
            return Err(bad("relation must have degree 2 in the generator"));
        }
        let Some(lead) = coeffs[2].constant_value() else {
            return Err(bad("leading coefficient must be a constant"));
        };
        let b = coeffs[1].clone();
        let c = coeffs[0].clone();
        let (b, c) = if lead.is_one() {
            (b, c)
        } else {
            let lb = b.div_exact(&Poly::constant(lead.clone()));
            let lc = c.div_exact(&Poly::constant(lead.clone()));
            match (lb, lc) {
                (Some(b), Some(c)) => (b, c),
                _ => return Err(bad("relation must be monic over the integers")),
            }
        };
        let g = Var::generator(name, b.clone(), c.clone())?;
        self.names.insert(name.to_string(), Binding::Symbol(g));
        if !rules.is_empty() {
            let gr = RatFunc::var(g);
            let bb = RatFunc::from_poly(b);
            let cc = RatFunc::from_poly(c);
            let mut parsed = Vec::new();
            for (s, rule) in rules {
                let sv = self.var(s)?;
                if !sv.is_plain_symbol() {
                    return Err(bad(&format!("rule variable `{s}` is not a plain symbol")));
                }
                let d = self.parse_ratfunc(rule)?;
                // 2 g g' + b' g + b g' + c' = 0
                let check = RatFunc::from_int(2)
                    .mul(&gr)
                    .mul(&d)
                    .add(&bb.diff(sv)?.mul(&gr))
                    .add(&bb.mul(&d))
                    .add(&cc.diff(sv)?);
                if !check.is_zero() {
                    return Err(bad(&format!("derivative rule for `{s}` contradicts the relation")));
                }
                parsed.push((sv, d));
            }
            g.set_generator_rules(parsed)?;
        }
        Ok(g)
    }

    /// Declares `name(args...)` and returns the underived atom.
    pub fn function(&mut self, name: &str, args: &[&str]) -> ExprResult<Var> {
        self.check_fresh(name)?;
        let vars = args.iter().map(|a| self.var(a)).collect::<ExprResult<Vec<_>>>()?;
        Ok(self.function_over(name, vars))
    }

    /// Declares a function whose arguments are the given atoms.
    pub fn function_over(&mut self, name: &str, args: Vec<Var>) -> Var {
        let v = Var::function(name, &args, &vec![0; args.len()]);
        self.names.insert(name.to_string(), Binding::Function(args));
        v
    }

    pub fn var(&self, name: &str) -> ExprResult<Var> {
        match self.names.get(name) {
            Some(Binding::Symbol(v)) => Ok(*v),
            _ => Err(ExprError::Undeclared(name.to_string())),
        }
    }

    pub fn function_args(&self, name: &str) -> Option<&[Var]> {
        match self.names.get(name) {
            Some(Binding::Function(a)) => Some(a),
            _ => None,
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains_key(name)
    }

    /// Parses and normalizes.
    pub fn parse(&self, text: &str) -> ExprResult<Expr> {
        self.parse_tree(text)?.normalize()
    }

    pub fn parse_ratfunc(&self, text: &str) -> ExprResult<RatFunc> {
        self.parse_tree(text)?.to_ratfunc()
    }

    /// Parses without normalizing.
    pub fn parse_tree(&self, text: &str) -> ExprResult<Expr> {
        let tokens = lex(text)?;
        let mut p = Parser { ctx: self, tokens, pos: 0, end: text.len() };
        let e = p.expr()?;
        if p.pos < p.tokens.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Sym(char),
}

fn lex(text: &str) -> ExprResult<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((s, Tok::Num(text[s..i].parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() {
            let s = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((s, Tok::Name(text[s..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(ExprError::Syntax { pos: i, msg: format!("unexpected character `{ch}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a Context,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        let pos = self.tokens.get(self.pos).map(|t| t.0).unwrap_or(self.end);
        ExprError::Syntax { pos, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> ExprResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn name(&mut self) -> ExprResult<String> {
        match self.peek() {
            Some(Tok::Name(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    fn expr(&mut self) -> ExprResult<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                let t = self.term()?;
                terms.push(Expr::Product(vec![Expr::int(-1), t]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> ExprResult<Expr> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat('*') {
                factors.push(self.factor()?);
            } else if self.eat('/') {
                let f = self.factor()?;
                factors.push(Expr::Power(Box::new(f), -1));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Product(factors) })
    }

    fn factor(&mut self) -> ExprResult<Expr> {
        let a = self.atom()?;
        if !self.eat('^') {
            return Ok(a);
        }
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let k = match self.peek() {
            Some(Tok::Num(n)) => {
                let k: i32 = n.try_into().map_err(|_| self.error("exponent too large"))?;
                self.pos += 1;
                k
            }
            _ => return Err(self.error("expected an integer exponent")),
        };
        Ok(Expr::Power(Box::new(a), if negative { -k } else { k }))
    }

    fn atom(&mut self) -> ExprResult<Expr> {
        let start = self.pos;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Const(BigRational::from_integer(n)))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                let a = self.atom()?;
                Ok(Expr::Product(vec![Expr::int(-1), a]))
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                if n == "D" && self.peek() == Some(&Tok::Sym('(')) {
                    self.pos += 1;
                    return self.derivative(start);
                }
                if self.eat('(') {
                    return self.application(&n, start);
                }
                self.bare_name(&n, start)
            }
            _ => Err(self.error("expected an expression")),
        }
    }

    fn derivative(&mut self, start: usize) -> ExprResult<Expr> {
        let f = self.name()?;
        let args = self.ctx.function_args(&f).ok_or_else(|| ExprError::Undeclared(f.clone()))?.to_vec();
        let mut index = vec![0u32; args.len()];
        let mut count = 0;
        while self.eat(',') {
            let a = self.name()?;
            let k = args
                .iter()
                .position(|v| v.name() == a)
                .ok_or_else(|| ExprError::Declaration(format!("`{a}` is not an argument of `{f}`")))?;
            index[k] += 1;
            count += 1;
        }
        self.expect(')')?;
        if count == 0 {
            self.pos = start;
            return Err(self.error("D(...) needs at least one differentiation variable"));
        }
        Ok(Expr::atom(Var::function(&f, &args, &index)))
    }

    fn application(&mut self, f: &str, start: usize) -> ExprResult<Expr> {
        let Some(args) = self.ctx.function_args(f).map(|a| a.to_vec()) else {
            self.pos = start;
            return Err(match self.ctx.names.get(f) {
                Some(_) => self.error(&format!("`{f}` is not a function")),
                None => ExprError::Undeclared(f.to_string()),
            });
        };
        let mut given = Vec::new();
        if !self.eat(')') {
            loop {
                given.push(self.name()?);
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        let expected: Vec<String> = args.iter().map(|a| a.name()).collect();
        if given != expected {
            return Err(ExprError::Declaration(format!(
                "`{f}` takes exactly its declared arguments ({})",
                expected.join(",")
            )));
        }
        Ok(Expr::atom(Var::function(f, &args, &vec![0; args.len()])))
    }

    fn bare_name(&mut self, n: &str, start: usize) -> ExprResult<Expr> {
        match self.ctx.names.get(n) {
            Some(Binding::Symbol(v)) => return Ok(Expr::atom(*v)),
            Some(Binding::Function(args)) => return Ok(Expr::atom(Var::function(n, args, &vec![0; args.len()]))),
            None => {}
        }
        if let Some(v) = self.subscript_form(n) {
            return Ok(Expr::atom(v));
        }
        self.pos = start;
        Err(ExprError::Undeclared(n.to_string()))
    }

    /// `v_rt` for `D(v,r,t)` when all arguments of `v` are one character long.
    fn subscript_form(&self, n: &str) -> Option<Var> {
        let (f, sub) = n.rsplit_once('_')?;
        let args = self.ctx.function_args(f)?;
        let names: Vec<String> = args.iter().map(|a| a.name()).collect();
        if sub.is_empty() || names.iter().any(|a| a.chars().count() != 1) {
            return None;
        }
        let mut index = vec![0u32; args.len()];
        for ch in sub.chars() {
            let k = names.iter().position(|a| a.starts_with(ch))?;
            index[k] += 1;
        }
        Some(Var::function(f, args, &index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        let mut c = Context::new();
        for s in ["x", "y", "z", "t"] {
            c.symbol(s).unwrap();
        }
        c.generator("r", "r^2 - x^2 - y^2 - z^2", &[("x", "x/r"), ("y", "y/r"), ("z", "z/r")]).unwrap();
        c.function("v", &["r", "t"]).unwrap();
        c
    }

    #[test]
    fn relation_normalizes_to_zero() {
        let c = ctx();
        assert!(c.parse("r^2 - x^2 - y^2 - z^2").unwrap().is_zero().unwrap());
        assert_eq!(c.parse("(x^2 + y^2 + z^2)/r").unwrap(), c.parse("r").unwrap());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let c = ctx();
        match c.parse("x + * y") {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert_eq!(c.parse("x + w"), Err(ExprError::Undeclared("w".into())));
    }

    #[test]
    fn shorthand_and_grammar_agree() {
        let c = ctx();
        assert_eq!(c.parse("v_rt").unwrap(), c.parse("D(v,t,r)").unwrap());
        assert_eq!(c.parse("v").unwrap(), c.parse("v(r,t)").unwrap());
    }

    #[test]
    fn unary_minus_binds_to_atom() {
        let c = ctx();
        assert_eq!(c.parse("-x^2").unwrap(), c.parse("x^2").unwrap());
        assert_eq!(c.parse("-1*x^2").unwrap().to_string(), "-1*x^2");
    }
}
