//! Sparse multivariate polynomials over Gaussian rationals, reduced modulo
//! the side relations of the trigonometric, half-phase and square-root atoms.
//!
//! Reduced atoms (`cos s`, `exp(I*s/2)`, `sqrt(P)`) never appear with an
//! exponent above one in a stored monomial:
//!
//! ```text
//! cos(s)^2      -> 1 - sin(s)^2
//! exp(I*s/2)^2  -> cos(s) + I*sin(s)
//! sqrt(P)^2     -> P
//! ```
//!
//! The quotient ring is a free module over the polynomial ring in the free
//! atoms, so the reduced representation is unique.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::coeff::Coeff;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(Arc<str>),
    Sin(Arc<str>),
    Cos(Arc<str>),
    /// `exp(I*s/2)`.
    Phase(Arc<str>),
    /// Square root of a polynomial free of reduced atoms.
    Sqrt(Arc<Poly>),
}

impl Atom {
    pub fn sym(name: &str) -> Atom {
        Atom::Sym(Arc::from(name))
    }

    pub fn is_reduced(&self) -> bool {
        matches!(self, Atom::Cos(_) | Atom::Phase(_) | Atom::Sqrt(_))
    }

    /// Elimination rank used when clearing reduced atoms from a denominator:
    /// atoms whose relation introduces other reduced atoms go first.
    fn elimination_rank(&self) -> u8 {
        match self {
            Atom::Phase(_) => 0,
            Atom::Sqrt(_) => 1,
            Atom::Cos(_) => 2,
            _ => 3,
        }
    }

    /// The polynomial that `self^2` rewrites to.
    pub fn relation(&self) -> Option<Poly> {
        match self {
            Atom::Cos(s) => {
                let sin = Poly::atom(Atom::Sin(s.clone()));
                Some(Poly::one().sub(&sin.mul_raw(&sin)))
            }
            Atom::Phase(s) => {
                let cos = Poly::atom(Atom::Cos(s.clone()));
                let sin = Poly::atom(Atom::Sin(s.clone())).scale(&Coeff::i());
                Some(cos.add(&sin))
            }
            Atom::Sqrt(p) => Some((**p).clone()),
            _ => None,
        }
    }

    /// Whether the atom depends on the named symbol.
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Atom::Sym(s) | Atom::Sin(s) | Atom::Cos(s) | Atom::Phase(s) => &**s == name,
            Atom::Sqrt(p) => p.mentions(name),
        }
    }

    pub(crate) fn collect_symbols(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            Atom::Sym(s) | Atom::Sin(s) | Atom::Cos(s) | Atom::Phase(s) => {
                out.insert(s.to_string());
            }
            Atom::Sqrt(p) => p.collect_symbols(out),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Sym(s) => write!(f, "{s}"),
            Atom::Sin(s) => write!(f, "sin({s})"),
            Atom::Cos(s) => write!(f, "cos({s})"),
            Atom::Phase(s) => write!(f, "exp(I*{s}/2)"),
            Atom::Sqrt(p) => write!(f, "sqrt({p})"),
        }
    }
}

/// Product of atom powers, sorted by atom, exponents strictly positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub SmallVec<[(Atom, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn of(atom: Atom, e: u32) -> Self {
        let mut v = SmallVec::new();
        if e > 0 {
            v.push((atom, e));
        }
        Monomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree_of(&self, atom: &Atom) -> u32 {
        self.0.iter().find(|(a, _)| a == atom).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    /// `self / other` if every exponent suffices.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::new();
        let mut j = 0;
        for (atom, e) in self.0.iter() {
            if j < other.0.len() && other.0[j].0 < *atom {
                return None;
            }
            if j < other.0.len() && &other.0[j].0 == atom {
                let f = other.0[j].1;
                j += 1;
                if f > *e {
                    return None;
                }
                if e - f > 0 {
                    out.push((atom.clone(), e - f));
                }
            } else {
                out.push((atom.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (atom, e) in self.0.iter() {
            let f = other.degree_of(atom);
            if f > 0 {
                out.push((atom.clone(), (*e).min(f)));
            }
        }
        Monomial(out)
    }

    /// Copy with the exponent of `atom` replaced.
    pub fn with_degree(&self, atom: &Atom, e: u32) -> Monomial {
        let mut out: SmallVec<[(Atom, u32); 4]> =
            self.0.iter().filter(|(a, _)| a != atom).cloned().collect();
        if e > 0 {
            let pos = out.iter().position(|(a, _)| a > atom).unwrap_or(out.len());
            out.insert(pos, (atom.clone(), e));
        }
        Monomial(out)
    }

    fn first_reducible(&self) -> Option<(Atom, u32)> {
        self.0.iter().find(|(a, e)| *e >= 2 && a.is_reduced()).cloned()
    }
}

/// Lexicographic order; the smallest atom carries the highest priority.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((x, e)), Some((y, f))) => match x.cmp(y) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if e != f {
                            return e.cmp(f);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (atom, e) in self.0.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{atom}")?;
            } else {
                write!(f, "{atom}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Monomial::of(a, 1), Coeff::one())
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: &Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, k: &Coeff) -> Poly {
        Poly { terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect() }
    }

    /// Product without side-relation reduction.
    pub fn mul_raw(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Reduced product.
    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_raw(other).reduce()
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_reduced(&self) -> bool {
        self.terms.keys().all(|m| m.first_reducible().is_none())
    }

    /// Apply the side relations until every reduced atom has degree <= 1.
    pub fn reduce(self) -> Poly {
        if self.is_reduced() {
            return self;
        }
        let mut out = Poly::zero();
        for (m, c) in self.terms.into_iter() {
            reduce_into(m, c, &mut out);
        }
        out
    }

    /// True when no reduced atom occurs.
    pub fn is_free(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|(a, _)| !a.is_reduced()))
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| a.mentions(name)))
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(a, _)| a.clone())).collect()
    }

    pub(crate) fn collect_symbols(&self, out: &mut std::collections::BTreeSet<String>) {
        for m in self.terms.keys() {
            for (a, _) in m.0.iter() {
                a.collect_symbols(out);
            }
        }
    }

    pub fn degree_in(&self, atom: &Atom) -> u32 {
        self.terms.keys().map(|m| m.degree_of(atom)).max().unwrap_or(0)
    }

    /// Split `self = rest + coeff * atom^1` for an atom of degree at most one.
    pub fn split_linear(&self, atom: &Atom) -> (Poly, Poly) {
        let mut rest = Poly::zero();
        let mut lin = Poly::zero();
        for (m, c) in self.terms.iter() {
            match m.degree_of(atom) {
                0 => rest.add_term(m.clone(), c.clone()),
                1 => lin.add_term(m.with_degree(atom, 0), c.clone()),
                _ => panic!("split_linear on atom of degree > 1"),
            }
        }
        (rest, lin)
    }

    /// Group by powers of `atom`: coefficient polynomials indexed by degree.
    pub fn coefficients_in(&self, atom: &Atom) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let d = m.degree_of(atom);
            out.entry(d).or_default().add_term(m.with_degree(atom, 0), c.clone());
        }
        out
    }

    /// Group terms by the part of each monomial built from atoms selected by
    /// `pick`; the rest of each monomial goes into the coefficient.
    pub fn group_by<F: Fn(&Atom) -> bool>(&self, pick: F) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let mut key = SmallVec::new();
            let mut rest = SmallVec::new();
            for (a, e) in m.0.iter() {
                if pick(a) {
                    key.push((a.clone(), *e));
                } else {
                    rest.push((a.clone(), *e));
                }
            }
            out.entry(Monomial(key)).or_default().add_term(Monomial(rest), c.clone());
        }
        out
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        let mut g = first.clone();
        for m in it {
            g = g.gcd(m);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut out = Poly::zero();
        for (n, c) in self.terms.iter() {
            out.terms.insert(n.div(m)?, c.clone());
        }
        Some(out)
    }

    /// Leading coefficient and the monic associate.
    pub fn monic(&self) -> (Coeff, Poly) {
        match self.leading() {
            None => (Coeff::one(), Poly::zero()),
            Some((_, lc)) => {
                let lc = lc.clone();
                (lc.clone(), self.scale(&lc.inv()))
            }
        }
    }

    /// Exact quotient by a polynomial free of reduced atoms.
    pub fn div_exact(&self, f: &Poly) -> Option<Poly> {
        debug_assert!(f.is_free());
        let (lm_f, lc_f) = f.leading()?;
        if let Some(c) = f.as_constant() {
            return Some(self.scale(&c.inv()));
        }
        let lc_inv = lc_f.inv();
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((lm_r, lc_r)) = r.leading() {
            let t = lm_r.div(lm_f)?;
            let c = lc_r * &lc_inv;
            r = r.sub(&f.mul_monomial(&t, &c));
            q.add_term(t, c);
        }
        Some(q)
    }

    /// Square root with positive leading coefficient, if `self` is a perfect
    /// square in the free polynomial ring.
    pub fn perfect_sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if !self.is_free() {
            return None;
        }
        let (lm, lc) = self.leading()?;
        if lm.0.iter().any(|(_, e)| e % 2 == 1) {
            return None;
        }
        let c0 = lc.sqrt_exact()?;
        let m0 = Monomial(lm.0.iter().map(|(a, e)| (a.clone(), e / 2)).collect());
        let lead = (m0.clone(), c0.clone());
        let mut root = Poly::term(m0, c0);
        let two_lc_inv = (&lead.1 * &Coeff::from_int(2)).inv();
        for _ in 0..(4 * self.len() + 8) {
            let r = self.sub(&root.mul_raw(&root));
            let Some((lm_r, lc_r)) = r.leading() else { return Some(root) };
            let t = lm_r.div(&lead.0)?;
            if t >= lead.0 {
                return None;
            }
            let c = lc_r * &two_lc_inv;
            root.add_term(t, c);
        }
        None
    }

    /// `k`-th root of a monic free polynomial, if it is a perfect power.
    pub fn perfect_root_monic(&self, k: u32) -> Option<Poly> {
        if k < 2 || !self.is_free() {
            return None;
        }
        let (lm, lc) = self.leading()?;
        if !lc.is_one() || lm.0.iter().any(|(_, e)| e % k != 0) {
            return None;
        }
        let m0 = Monomial(lm.0.iter().map(|(a, e)| (a.clone(), e / k)).collect());
        let mut lead_pow = Monomial::one();
        for _ in 1..k {
            lead_pow = lead_pow.mul(&m0);
        }
        let k_inv = Coeff::from_int(k as i64).inv();
        let mut root = Poly::term(m0.clone(), Coeff::one());
        for _ in 0..(4 * self.len() + 8) {
            let r = self.sub(&root.pow(k));
            let Some((lm_r, lc_r)) = r.leading() else { return Some(root) };
            let t = lm_r.div(&lead_pow)?;
            if t >= m0 {
                return None;
            }
            root.add_term(t, lc_r * &k_inv);
        }
        None
    }

    /// Rename every occurrence of a symbol (also inside trig and phase atoms).
    pub fn map_atoms<F: Fn(&Atom) -> Atom>(&self, f: &F) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms.iter() {
            let mut mono = Monomial::one();
            for (a, e) in m.0.iter() {
                mono = mono.mul(&Monomial::of(f(a), *e));
            }
            out.add_term(mono, c.clone());
        }
        out.reduce()
    }

    /// Pick a reduced atom to eliminate first when rationalizing.
    pub(crate) fn outermost_reduced_atom(&self) -> Option<Atom> {
        self.atoms()
            .into_iter()
            .filter(|a| a.is_reduced())
            .min_by_key(|a| a.elimination_rank())
    }
}

fn reduce_into(m: Monomial, c: Coeff, out: &mut Poly) {
    match m.first_reducible() {
        None => out.add_term(m, c),
        Some((atom, e)) => {
            let rest = m.with_degree(&atom, e % 2);
            let rel = atom.relation().expect("reduced atom without relation");
            let relpow = rel.pow(e / 2);
            for (m2, c2) in relpow.terms.into_iter() {
                reduce_into(rest.mul(&m2), &c * &c2, out);
            }
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let (neg, mag) = if c.is_real() && c.re < num_rational::BigRational::from_integer(0.into()) {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Poly {
        Poly::atom(Atom::sym(n))
    }

    #[test]
    fn cos_squared_reduces() {
        let c = Poly::atom(Atom::Cos(Arc::from("theta")));
        let sn = Poly::atom(Atom::Sin(Arc::from("theta")));
        let lhs = c.mul(&c).add(&sn.mul(&sn));
        assert_eq!(lhs, Poly::one());
    }

    #[test]
    fn half_phase_squares_to_unit_phase() {
        let e = Poly::atom(Atom::Phase(Arc::from("phi")));
        let e4 = e.pow(4);
        // exp(2*I*phi) = cos(phi)^2 - sin(phi)^2 + 2*I*sin(phi)*cos(phi)
        let c = Poly::atom(Atom::Cos(Arc::from("phi")));
        let sn = Poly::atom(Atom::Sin(Arc::from("phi")));
        let expect = c
            .mul(&c)
            .sub(&sn.mul(&sn))
            .add(&sn.mul(&c).scale(&Coeff::from_int(2)).scale(&Coeff::i()));
        assert_eq!(e4, expect);
    }

    #[test]
    fn exact_division_and_failure() {
        let a = s("a");
        let b = s("b");
        let f = a.add(&b);
        let p = f.mul(&f).mul(&b);
        assert_eq!(p.div_exact(&f).unwrap(), f.mul(&b));
        assert!(p.div_exact(&a.sub(&b)).is_none());
    }

    #[test]
    fn perfect_cube_root() {
        let f = s("a").add(&s("b").mul(&Poly::atom(Atom::Sin("theta".into()))));
        assert_eq!(f.pow(3).perfect_root_monic(3), Some(f.clone()));
        assert_eq!(f.pow(3).add(&Poly::one()).perfect_root_monic(3), None);
        assert_eq!(f.pow(2).perfect_root_monic(3), None);
    }

    #[test]
    fn perfect_square_root() {
        let a = s("a");
        let sn = Poly::atom(Atom::Sin(Arc::from("theta")));
        let w = a.add(&s("b").mul(&sn));
        let sq = w.mul(&w).scale(&Coeff::from_int(4));
        assert_eq!(sq.perfect_sqrt().unwrap(), w.scale(&Coeff::from_int(2)));
        assert!(w.perfect_sqrt().is_none());
    }

    #[test]
    fn lex_order_prefers_smallest_atom() {
        let ma = Monomial::of(Atom::sym("a"), 1);
        let mb2 = Monomial::of(Atom::sym("b"), 2);
        assert!(ma > mb2);
        assert!(Monomial::one() < mb2);
    }
}
