//! Canonical symbolic expressions.
//!
//! An [`Expr`] is a reduced numerator polynomial over a product of monic
//! denominator factors. Denominator factors never contain reduced atoms
//! (`cos`, half-phases, square roots); those are cleared by multiplying with
//! conjugates. The numerator is never divisible by a denominator factor.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::coeff::Coeff;
use super::poly::{Atom, Monomial, Poly};
use super::SymError;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr { num: Poly::zero(), den: Vec::new() }
    }

    pub fn one() -> Self {
        Expr::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Coeff::from_int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Expr::constant(Coeff::from_ratio(n, d))
    }

    pub fn big_rational(r: BigRational) -> Self {
        Expr::constant(Coeff::from_rational(r))
    }

    pub fn i() -> Self {
        Expr::constant(Coeff::i())
    }

    pub fn constant(c: Coeff) -> Self {
        Expr::from_poly(Poly::constant(c))
    }

    pub fn sym(name: &str) -> Self {
        Expr::from_poly(Poly::atom(Atom::sym(name)))
    }

    pub fn sin(angle: &str) -> Self {
        Expr::from_poly(Poly::atom(Atom::Sin(Arc::from(angle))))
    }

    pub fn cos(angle: &str) -> Self {
        Expr::from_poly(Poly::atom(Atom::Cos(Arc::from(angle))))
    }

    /// `exp(I*k*angle/2)`.
    pub fn half_phase(angle: &str, k: i64) -> Self {
        let e = Expr::from_poly(Poly::atom(Atom::Phase(Arc::from(angle))));
        e.powi(k)
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr { num: p.reduce(), den: Vec::new() }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        let mut d = Poly::one();
        for (f, e) in &self.den {
            d = d.mul_raw(&f.pow(*e));
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_constant().filter(|c| c.is_real()).map(|c| c.re)
    }

    /// Names of every symbol the expression depends on.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.num.collect_symbols(&mut out);
        for (f, _) in &self.den {
            f.collect_symbols(&mut out);
        }
        out
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.num.mentions(name) || self.den.iter().any(|(f, _)| f.mentions(name))
    }

    pub fn has_half_phase(&self) -> bool {
        self.num.atoms().iter().any(|a| matches!(a, Atom::Phase(_)))
    }

    /// Build from a numerator and an arbitrary list of monic free factors.
    fn from_parts(num: Poly, den: Vec<(Poly, u32)>) -> Expr {
        let mut merged: BTreeMap<Poly, u32> = BTreeMap::new();
        for (f, e) in den {
            if e == 0 || f.as_constant().is_some() {
                continue;
            }
            *merged.entry(f).or_insert(0) += e;
        }
        let mut num = num.reduce();
        if num.is_zero() {
            return Expr::zero();
        }
        let mut out = Vec::with_capacity(merged.len());
        for (f, mut e) in merged {
            while e > 0 {
                match num.div_exact(&f) {
                    Some(q) => {
                        num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                out.push((f, e));
            }
        }
        Expr { num, den: out }
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn add_expr(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Expr::from_parts(self.num.add(&other.num), self.den.clone());
        }
        let base = refine_base(self.den.iter().chain(other.den.iter()).map(|(f, _)| f.clone()));
        let ea = exponents_over(&self.den, &base);
        let eb = exponents_over(&other.den, &base);
        let mut na = self.num.clone();
        let mut nb = other.num.clone();
        let mut den = Vec::with_capacity(base.len());
        for (k, f) in base.iter().enumerate() {
            let l = ea[k].max(eb[k]);
            if l > ea[k] {
                na = na.mul_raw(&f.pow(l - ea[k]));
            }
            if l > eb[k] {
                nb = nb.mul_raw(&f.pow(l - eb[k]));
            }
            den.push((f.clone(), l));
        }
        Expr::from_parts(na.add(&nb), den)
    }

    pub fn mul_expr(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let num = self.num.mul(&other.num);
        if self.den.is_empty() && other.den.is_empty() {
            return Expr { num, den: Vec::new() };
        }
        let base = refine_base(self.den.iter().chain(other.den.iter()).map(|(f, _)| f.clone()));
        let ea = exponents_over(&self.den, &base);
        let eb = exponents_over(&other.den, &base);
        let den = base.into_iter().enumerate().map(|(k, f)| (f, ea[k] + eb[k])).collect();
        Expr::from_parts(num, den)
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Expr, SymError> {
        self.inv_with_hints(&[])
    }

    fn inv_with_hints(&self, extra: &[(Poly, u32)]) -> Result<Expr, SymError> {
        if self.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        let (conj, free) = rationalize(&self.num);
        let hints: Vec<Poly> =
            self.den.iter().chain(extra.iter()).map(|(f, _)| f.clone()).collect();
        let (lc, factors) = factor_free(&free, &hints);
        let num = conj.mul(&self.denominator()).scale(&lc.inv());
        Ok(Expr::from_parts(num, factors))
    }

    pub fn div_expr(&self, other: &Expr) -> Result<Expr, SymError> {
        if other.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        if let Some(c) = other.as_constant() {
            return Ok(self.scale(&c.inv()));
        }
        let inv = other.inv_with_hints(&self.den)?;
        Ok(self.mul_expr(&inv))
    }

    pub fn powi(&self, k: i64) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        let base = if k < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let k = k.unsigned_abs() as u32;
        if base.den.is_empty() {
            return Expr { num: base.num.pow(k), den: Vec::new() };
        }
        let den = base.den.iter().map(|(f, e)| (f.clone(), e * k)).collect();
        Expr { num: base.num.pow(k), den }
    }

    /// Square root. Perfect squares give the root with positive leading
    /// coefficient (the positive branch on the admissible domain); anything
    /// else becomes an opaque `sqrt` atom.
    pub fn sqrt(&self) -> Result<Expr, SymError> {
        if self.is_zero() {
            return Ok(Expr::zero());
        }
        let (lc, monic) = self.num.monic();
        if let Some(root) = monic.perfect_sqrt() {
            if let Some(c) = lc.sqrt_exact() {
                if self.den.iter().all(|(_, e)| e % 2 == 0) {
                    let den = self.den.iter().map(|(f, e)| (f.clone(), e / 2)).collect();
                    return Ok(Expr::from_parts(root.scale(&c), den));
                }
            }
        }
        // sqrt(N / prod F^e) = sqrt(N * prod F^(e mod 2)) / prod F^ceil(e/2)
        let mut rad = self.num.clone();
        let mut den = Vec::new();
        for (f, e) in &self.den {
            if e % 2 == 1 {
                rad = rad.mul(f);
            }
            den.push((f.clone(), e.div_ceil(2)));
        }
        if !rad.is_free() {
            return Err(SymError::UnsupportedForm(format!("sqrt of non-free radicand {rad}")));
        }
        let atom = Expr::from_poly(Poly::atom(Atom::Sqrt(Arc::new(rad))));
        Ok(atom.mul_expr(&Expr::from_parts(Poly::one(), den)))
    }

    /// Exact partial derivative with respect to a named symbol.
    pub fn diff(&self, name: &str) -> Expr {
        if !self.mentions(name) {
            return Expr::zero();
        }
        let dnum = diff_poly(&self.num, name);
        let den_expr = Expr::from_parts(Poly::one(), self.den.clone());
        let mut out = dnum.mul_expr(&den_expr);
        let num_expr = Expr { num: self.num.clone(), den: Vec::new() };
        for (f, e) in &self.den {
            if !f.mentions(name) {
                continue;
            }
            let df = diff_poly(f, name);
            let term = df
                .mul_expr(&Expr::from_parts(Poly::one(), vec![(f.clone(), 1)]))
                .scale(&Coeff::from_int(-(*e as i64)));
            out = out.add_expr(&num_expr.mul_expr(&den_expr).mul_expr(&term));
        }
        out
    }

    /// Simultaneous substitution of symbols.
    pub fn subst(&self, bindings: &BTreeMap<String, Expr>) -> Result<Expr, SymError> {
        if !self.symbols().iter().any(|s| bindings.contains_key(s)) {
            return Ok(self.clone());
        }
        let mut cache: HashMap<Atom, Expr> = HashMap::new();
        let num = subst_poly(&self.num, bindings, &mut cache)?;
        let mut den = Expr::one();
        for (f, e) in &self.den {
            den = den.mul_expr(&subst_poly(f, bindings, &mut cache)?.powi(*e as i64));
        }
        num.div_expr(&den)
    }

    pub fn subst_one(&self, name: &str, value: &Expr) -> Result<Expr, SymError> {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), value.clone());
        self.subst(&m)
    }

    /// Coefficients of `self` as a polynomial in the named symbol. Fails if
    /// the symbol sits in a denominator or inside a function atom.
    pub fn poly_coefficients(&self, name: &str) -> Result<BTreeMap<u32, Expr>, SymError> {
        let atom = Atom::sym(name);
        if self.den.iter().any(|(f, _)| f.mentions(name)) {
            return Err(SymError::UnsupportedForm(format!("{name} occurs in a denominator")));
        }
        if self.num.atoms().iter().any(|a| a != &atom && a.mentions(name)) {
            return Err(SymError::UnsupportedForm(format!("{name} occurs inside a function")));
        }
        let den = Expr::from_parts(Poly::one(), self.den.clone());
        Ok(self
            .num
            .coefficients_in(&atom)
            .into_iter()
            .map(|(k, p)| (k, Expr::from_poly(p).mul_expr(&den)))
            .collect())
    }

    /// Split `self = c0 + c1 * name` for an expression affine in `name`.
    pub fn affine_in(&self, name: &str) -> Result<(Expr, Expr), SymError> {
        let mut cs = self.poly_coefficients(name)?;
        if cs.keys().any(|k| *k > 1) {
            return Err(SymError::UnsupportedForm(format!("not affine in {name}")));
        }
        Ok((cs.remove(&0).unwrap_or_default(), cs.remove(&1).unwrap_or_default()))
    }

    pub fn complex_conj(&self) -> Expr {
        let conj_poly = |p: &Poly| {
            let mut out = Poly::zero();
            for (m, c) in p.terms() {
                let mut t = Poly::term(Monomial::one(), c.conj());
                for (a, e) in m.0.iter() {
                    let ap = match a {
                        // conj(exp(I*s/2)) = exp(-I*s/2) = exp(I*s/2) * (cos s - I sin s)
                        Atom::Phase(s) => {
                            let cos = Poly::atom(Atom::Cos(s.clone()));
                            let sin = Poly::atom(Atom::Sin(s.clone())).scale(&Coeff::i());
                            Poly::atom(a.clone()).mul(&cos.sub(&sin))
                        }
                        _ => Poly::atom(a.clone()),
                    };
                    t = t.mul(&ap.pow(*e));
                }
                out = out.add(&t);
            }
            out
        };
        let num = conj_poly(&self.num);
        let den: Vec<(Poly, u32)> = self.den.iter().map(|(f, e)| (conj_poly(f), *e)).collect();
        let mut d = Expr::one();
        for (f, e) in den {
            d = d.mul_expr(&Expr::from_poly(f).powi(e as i64));
        }
        Expr::from_poly(num).div_expr(&d).expect("conjugate of a nonzero denominator")
    }

    /// Rename a symbol everywhere, including trig and phase arguments.
    pub fn rename(&self, from: &str, to: &str) -> Expr {
        let f = |a: &Atom| -> Atom {
            let r = |s: &Arc<str>| if &**s == from { Arc::from(to) } else { s.clone() };
            match a {
                Atom::Sym(s) => Atom::Sym(r(s)),
                Atom::Sin(s) => Atom::Sin(r(s)),
                Atom::Cos(s) => Atom::Cos(r(s)),
                Atom::Phase(s) => Atom::Phase(r(s)),
                Atom::Sqrt(p) => Atom::Sqrt(Arc::new(p.map_atoms(&|x: &Atom| match x {
                    Atom::Sym(s) if &**s == from => Atom::sym(to),
                    other => other.clone(),
                }))),
            }
        };
        let num = self.num.map_atoms(&f);
        let den = self.den.iter().map(|(p, e)| (p.map_atoms(&f), *e)).collect();
        Expr::from_parts(num, den)
    }
}

/// Multiply `p` by conjugates until the product is free of reduced atoms.
/// Returns `(conj, p * conj)`.
fn rationalize(p: &Poly) -> (Poly, Poly) {
    let mut conj = Poly::one();
    let mut cur = p.clone();
    while let Some(atom) = cur.outermost_reduced_atom() {
        let (rest, lin) = cur.split_linear(&atom);
        let c = rest.sub(&lin.mul_raw(&Poly::atom(atom.clone())));
        cur = cur.mul(&c);
        conj = conj.mul(&c);
    }
    (conj, cur)
}

/// Split a free polynomial into a constant and monic factors, using trial
/// division by known factors and perfect-square detection.
fn factor_free(p: &Poly, hints: &[Poly]) -> (Coeff, Vec<(Poly, u32)>) {
    let (lc, monic) = p.monic();
    let mut out = Vec::new();
    let content = monic.monomial_content();
    for (a, e) in content.0.iter() {
        out.push((Poly::atom(a.clone()), *e));
    }
    let rest = monic.div_monomial(&content).expect("content divides");
    factor_rec(rest, 1, hints, &mut out);
    (lc, out)
}

fn factor_rec(mut q: Poly, mult: u32, hints: &[Poly], out: &mut Vec<(Poly, u32)>) {
    if q.as_constant().is_some() {
        return;
    }
    for h in hints {
        if h.as_constant().is_some() {
            continue;
        }
        while let Some(r) = q.div_exact(h) {
            out.push((h.clone(), mult));
            q = r;
            if q.as_constant().is_some() {
                return;
            }
        }
    }
    if let Some(s) = q.perfect_sqrt() {
        let (_, s) = s.monic();
        factor_rec(s, mult * 2, hints, out);
        return;
    }
    let degree = q.terms().map(|(m, _)| m.total_degree()).max().unwrap_or(0);
    for k in [3, 5, 7] {
        if degree % k == 0 {
            if let Some(r) = q.perfect_root_monic(k) {
                factor_rec(r, mult * k, hints, out);
                return;
            }
        }
    }
    let (_, q) = q.monic();
    out.push((q, mult));
}

/// Coprime-by-divisibility base for a set of factors: whenever one factor
/// divides another the larger is replaced by the quotient.
fn refine_base<I: Iterator<Item = Poly>>(factors: I) -> Vec<Poly> {
    let mut base: Vec<Poly> = Vec::new();
    for f in factors {
        if !base.contains(&f) {
            base.push(f);
        }
    }
    'outer: loop {
        for i in 0..base.len() {
            for j in 0..base.len() {
                if i == j {
                    continue;
                }
                let (fi, fj) = (&base[i], &base[j]);
                if fi.len() > fj.len() {
                    continue;
                }
                let (lmi, _) = fi.leading().unwrap();
                let (lmj, _) = fj.leading().unwrap();
                if lmj.div(lmi).is_none() {
                    continue;
                }
                if let Some(q) = fj.div_exact(fi) {
                    let (_, q) = q.monic();
                    base.remove(j);
                    if q.as_constant().is_none() && !base.contains(&q) {
                        base.push(q);
                    }
                    continue 'outer;
                }
            }
        }
        break;
    }
    base.sort();
    base
}

fn exponents_over(den: &[(Poly, u32)], base: &[Poly]) -> Vec<u32> {
    let mut out = vec![0u32; base.len()];
    for (f, e) in den {
        if let Some(k) = base.iter().position(|b| b == f) {
            out[k] += e;
            continue;
        }
        let mut q = f.clone();
        for (k, b) in base.iter().enumerate() {
            while let Some(r) = q.div_exact(b) {
                out[k] += e;
                q = r;
            }
        }
        debug_assert!(q.as_constant().is_some(), "factor {f} not expressible over base");
    }
    out
}

fn diff_poly(p: &Poly, name: &str) -> Expr {
    let mut poly_part = Poly::zero();
    let mut extra = Expr::zero();
    for (m, c) in p.terms() {
        for (atom, e) in m.0.iter() {
            if !atom.mentions(name) {
                continue;
            }
            let rest = Poly::term(m.with_degree(atom, e - 1), c * &Coeff::from_int(*e as i64));
            match atom {
                Atom::Sym(_) => poly_part = poly_part.add(&rest),
                Atom::Sin(s) => poly_part = poly_part.add(&rest.mul(&Poly::atom(Atom::Cos(s.clone())))),
                Atom::Cos(s) => {
                    poly_part = poly_part.sub(&rest.mul(&Poly::atom(Atom::Sin(s.clone()))))
                }
                Atom::Phase(_) => {
                    let k = Coeff::new(BigRational::zero(), BigRational::new(1.into(), 2.into()));
                    poly_part = poly_part.add(&rest.mul(&Poly::atom(atom.clone())).scale(&k));
                }
                Atom::Sqrt(rad) => {
                    // d sqrt(P) = P' sqrt(P) / (2 P)
                    let drad = diff_poly(rad, name);
                    let radexpr = Expr::from_poly((**rad).clone());
                    let term = drad
                        .mul_expr(&Expr::from_poly(rest.mul(&Poly::atom(atom.clone()))))
                        .div_expr(&radexpr.scale(&Coeff::from_int(2)))
                        .expect("nonzero radicand");
                    extra = extra.add_expr(&term);
                }
            }
        }
    }
    Expr::from_poly(poly_part).add_expr(&extra)
}

/// Integer-linear combination of symbols: `sum k_j * s_j`.
fn linear_symbol_combination(e: &Expr) -> Option<Vec<(Arc<str>, i64)>> {
    if !e.den.is_empty() {
        return None;
    }
    let mut out = Vec::new();
    for (m, c) in e.num.terms() {
        if m.0.len() != 1 || m.0[0].1 != 1 || !c.is_real() || !c.re.is_integer() {
            return None;
        }
        let Atom::Sym(s) = &m.0[0].0 else { return None };
        out.push((s.clone(), c.re.to_integer().to_i64()?));
    }
    Some(out)
}

/// `(sin(k*s), cos(k*s))` by the angle-addition recurrence.
fn multiple_angle(s: &Arc<str>, k: i64) -> (Expr, Expr) {
    let sin1 = Expr::from_poly(Poly::atom(Atom::Sin(s.clone())));
    let cos1 = Expr::from_poly(Poly::atom(Atom::Cos(s.clone())));
    let mut sn = Expr::zero();
    let mut cs = Expr::one();
    for _ in 0..k.unsigned_abs() {
        let nsn = sn.mul_expr(&cos1).add_expr(&cs.mul_expr(&sin1));
        let ncs = cs.mul_expr(&cos1).sub_expr(&sn.mul_expr(&sin1));
        sn = nsn;
        cs = ncs;
    }
    if k < 0 {
        sn = -sn;
    }
    (sn, cs)
}

pub(crate) fn trig_of(arg: &Expr, want_sin: bool) -> Result<Expr, SymError> {
    let lin = linear_symbol_combination(arg)
        .ok_or_else(|| SymError::UnsupportedForm(format!("trig argument {arg} is not an integer combination of symbols")))?;
    let mut sn = Expr::zero();
    let mut cs = Expr::one();
    for (s, k) in lin {
        let (sk, ck) = multiple_angle(&s, k);
        let nsn = sn.mul_expr(&ck).add_expr(&cs.mul_expr(&sk));
        let ncs = cs.mul_expr(&ck).sub_expr(&sn.mul_expr(&sk));
        sn = nsn;
        cs = ncs;
    }
    Ok(if want_sin { sn } else { cs })
}

/// `exp(I*arg/2)` for an integer combination of symbols.
pub(crate) fn half_phase_of(arg: &Expr) -> Result<Expr, SymError> {
    let lin = linear_symbol_combination(arg)
        .ok_or_else(|| SymError::UnsupportedForm(format!("phase argument {arg} is not an integer combination of symbols")))?;
    let mut out = Expr::one();
    for (s, k) in lin {
        out = out.mul_expr(&Expr::half_phase(&s, k));
    }
    Ok(out)
}

fn subst_atom(
    atom: &Atom,
    bindings: &BTreeMap<String, Expr>,
    cache: &mut HashMap<Atom, Expr>,
) -> Result<Expr, SymError> {
    if let Some(e) = cache.get(atom) {
        return Ok(e.clone());
    }
    let unchanged = || Expr::from_poly(Poly::atom(atom.clone()));
    let out = match atom {
        Atom::Sym(s) => bindings.get(&**s).cloned().unwrap_or_else(unchanged),
        Atom::Sin(s) | Atom::Cos(s) => match bindings.get(&**s) {
            None => unchanged(),
            Some(v) => trig_of(v, matches!(atom, Atom::Sin(_)))?,
        },
        Atom::Phase(s) => match bindings.get(&**s) {
            None => unchanged(),
            Some(v) => half_phase_of(v)?,
        },
        Atom::Sqrt(rad) => {
            if !rad.collect_any(bindings) {
                unchanged()
            } else {
                let r = subst_poly(rad, bindings, cache)?;
                r.sqrt()?
            }
        }
    };
    cache.insert(atom.clone(), out.clone());
    Ok(out)
}

impl Poly {
    fn collect_any(&self, bindings: &BTreeMap<String, Expr>) -> bool {
        let mut syms = BTreeSet::new();
        self.collect_symbols(&mut syms);
        syms.iter().any(|s| bindings.contains_key(s))
    }
}

fn subst_poly(
    p: &Poly,
    bindings: &BTreeMap<String, Expr>,
    cache: &mut HashMap<Atom, Expr>,
) -> Result<Expr, SymError> {
    if !p.collect_any(bindings) {
        return Ok(Expr::from_poly(p.clone()));
    }
    let mut out = Expr::zero();
    for (m, c) in p.terms() {
        let mut t = Expr::constant(c.clone());
        for (a, e) in m.0.iter() {
            let img = subst_atom(a, bindings, cache)?;
            t = t.mul_expr(&img.powi(*e as i64));
        }
        out = out.add_expr(&t);
    }
    Ok(out)
}

impl Expr {
    pub fn sub_expr(&self, other: &Expr) -> Expr {
        self.add_expr(&-other)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: self.num.neg(), den: self.den }
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }
}

macro_rules! bin_ops {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                self.$f(o)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                (&self).$f(&o)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                (&self).$f(o)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                self.$f(&o)
            }
        }
    };
}

bin_ops!(Add, add, add_expr);
bin_ops!(Sub, sub, sub_expr);
bin_ops!(Mul, mul, mul_expr);

/// Division panics on a zero divisor; use [`Expr::div_expr`] to handle it.
impl Div<&Expr> for &Expr {
    type Output = Expr;
    fn div(self, o: &Expr) -> Expr {
        self.div_expr(o).expect("division by zero expression")
    }
}

impl Div<Expr> for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        &self / &o
    }
}

impl Div<&Expr> for Expr {
    type Output = Expr;
    fn div(self, o: &Expr) -> Expr {
        &self / o
    }
}

impl Div<Expr> for &Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        self / &o
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

fn fmt_factor(f: &mut fmt::Formatter<'_>, p: &Poly, e: u32) -> fmt::Result {
    let single = p.len() == 1 && p.terms().next().is_some_and(|(m, c)| c.is_one() && m.0.len() == 1);
    if single && e == 1 {
        write!(f, "{p}")
    } else if single {
        write!(f, "{p}^{e}")
    } else if e == 1 {
        write!(f, "({p})")
    } else {
        write!(f, "({p})^{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (k, (p, e)) in self.den.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            fmt_factor(f, p, *e)?;
        }
        write!(f, ")")
    }
}

/// Parse a decimal or rational literal such as `2`, `-1/9` or `2.5` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let ip: BigInt = if ip.is_empty() { BigInt::zero() } else { ip.parse().ok()? };
        let scale = BigInt::from(10u32).pow(fp.len() as u32);
        let fpv: BigInt = if fp.is_empty() { BigInt::zero() } else { fp.parse().ok()? };
        let mut r = BigRational::new(ip * &scale + fpv, scale);
        if neg {
            r = -r;
        }
        return Some(r);
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Expr {
        Expr::sym(n)
    }

    #[test]
    fn fraction_cancels_common_factor() {
        let w = s("a") + s("b") * Expr::sin("theta");
        let e = (&w * &w) / &w;
        assert_eq!(e, w);
    }

    #[test]
    fn add_over_common_denominator() {
        let w = s("a") + s("b") * Expr::sin("theta");
        let e = Expr::one() / &w + Expr::one() / (&w * &w);
        let expect = (&w + Expr::one()) / (&w * &w);
        assert_eq!(e, expect);
        assert!((e - expect).is_zero());
    }

    #[test]
    fn inverse_of_cos_is_rationalized() {
        let c = Expr::cos("theta");
        let inv = c.inv().unwrap();
        assert!(inv.denominator_factors().iter().all(|(f, _)| f.is_free()));
        assert!((&inv * &c - Expr::one()).is_zero());
    }

    #[test]
    fn inverse_of_half_phase() {
        let e = Expr::half_phase("phi", 3);
        let einv = Expr::half_phase("phi", -3);
        assert!((&e * &einv - Expr::one()).is_zero());
    }

    #[test]
    fn sqrt_of_square_picks_positive_branch() {
        let w = s("a") + s("b") * Expr::sin("theta");
        assert_eq!((&w * &w).sqrt().unwrap(), w);
        let rho = (s("x") * s("x") + s("y") * s("y")).sqrt().unwrap();
        assert!((&rho * &rho - s("x") * s("x") - s("y") * s("y")).is_zero());
    }

    #[test]
    fn derivative_of_rho() {
        let rho = (s("x") * s("x") + s("y") * s("y")).sqrt().unwrap();
        assert_eq!(rho.diff("x"), s("x") / &rho);
    }

    #[test]
    fn substitution_into_trig_argument() {
        let e = Expr::sin("t");
        let two_u = s("u").scale(&Coeff::from_int(2));
        let r = e.subst_one("t", &two_u).unwrap();
        let expect = Expr::int(2) * Expr::sin("u") * Expr::cos("u");
        assert_eq!(r, expect);
        assert!(e.subst_one("t", &(s("u") + Expr::one())).is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("2.5").unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(parse_rational("-1/9").unwrap(), BigRational::new((-1).into(), 9.into()));
        assert!(parse_rational("1/0").is_none());
    }
}
