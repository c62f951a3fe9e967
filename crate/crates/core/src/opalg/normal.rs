use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::exact::{
    log1p_by_powers, ExactError, PoleSum, QAlgebra, Rat, RatFunc, Ring, TSeries, UPoly, VarKind,
};

/// Operator in normal form `Σ_j x^j f_j(v)` with `v = θ` or `v = y`.
#[derive(Clone)]
pub struct NormalOp<V: VarKind> {
    terms: BTreeMap<i64, RatFunc<V>>,
}

impl<V: VarKind> PartialEq for NormalOp<V> {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

impl<V: VarKind> NormalOp<V> {
    pub fn term(j: i64, f: RatFunc<V>) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(j, f);
        }
        NormalOp { terms }
    }

    /// `x^j`.
    pub fn x_pow(j: i64) -> Self {
        Self::term(j, RatFunc::one())
    }

    /// The symbol `θ` (or `y`) itself.
    pub fn symbol() -> Self {
        Self::term(0, RatFunc::var())
    }

    pub fn from_func(f: RatFunc<V>) -> Self {
        Self::term(0, f)
    }

    pub fn scalar(k: V::K) -> Self {
        Self::from_func(RatFunc::constant(k))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &RatFunc<V>)> {
        self.terms.iter().map(|(j, f)| (*j, f))
    }

    pub fn coeff(&self, j: i64) -> RatFunc<V> {
        self.terms.get(&j).cloned().unwrap_or_else(RatFunc::zero)
    }

    /// Smallest and largest x-exponent present.
    pub fn x_range(&self) -> Option<(i64, i64)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    /// Largest `|j|` among present x-exponents.
    pub fn max_shift(&self) -> i64 {
        self.terms.keys().map(|j| j.abs()).max().unwrap_or(0)
    }

    /// Coefficient of `x^0` as a function of `ε` (resp. `q^ε`).
    pub fn zero_mode(&self) -> RatFunc<V> {
        self.coeff(0)
    }

    pub fn map_funcs(&self, f: impl Fn(&RatFunc<V>) -> RatFunc<V>) -> Self {
        let mut out = Self::zero();
        for (j, g) in &self.terms {
            out.add_term(*j, &f(g));
        }
        out
    }

    pub fn add_term(&mut self, j: i64, f: &RatFunc<V>) {
        if f.is_zero() {
            return;
        }
        match self.terms.get_mut(&j) {
            Some(g) => {
                *g = g.add(f);
                if g.is_zero() {
                    self.terms.remove(&j);
                }
            }
            None => {
                self.terms.insert(j, f.clone());
            }
        }
    }

    /// Whether every coefficient is a polynomial in the symbol.
    pub fn is_polynomial(&self) -> bool {
        self.terms.values().all(|f| f.is_poly())
    }

    /// Applies the operator to the formal basis vector `x^{ε+n}`; returns
    /// `m ↦ coefficient of x^{ε+n+m}` as functions of `ε`.
    pub fn act_on_basis(&self, n: i64) -> Vec<(i64, RatFunc<V>)> {
        self.terms.iter().map(|(j, f)| (n + j, f.shift(n))).collect()
    }
}

impl<V: VarKind> Ring for NormalOp<V> {
    fn zero() -> Self {
        NormalOp { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        Self::x_pow(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (j, f) in &o.terms {
            out.add_term(*j, f);
        }
        out
    }
    /// `(x^a f(v)) · (x^b g(v)) = x^{a+b} f(shift_b v) g(v)`.
    fn mul(&self, o: &Self) -> Self {
        let mut acc: BTreeMap<i64, RatFunc<V>> = BTreeMap::new();
        for (b, g) in &o.terms {
            for (a, f) in &self.terms {
                let t = f.shift(*b).mul(g);
                let e = acc.entry(a + b).or_insert_with(RatFunc::zero);
                *e = e.add(&t);
            }
        }
        acc.retain(|_, f| !f.is_zero());
        NormalOp { terms: acc }
    }
    fn neg(&self) -> Self {
        NormalOp { terms: self.terms.iter().map(|(j, f)| (*j, f.neg())).collect() }
    }
    fn from_i64(n: i64) -> Self {
        Self::from_func(RatFunc::from_i64(n))
    }
    fn inv(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&j, f) = self.terms.iter().next().unwrap();
        // (x^j f)^{-1} = f^{-1} x^{-j} = x^{-j} f(shift_{-j})^{-1}
        Some(Self::term(-j, f.inv()?.shift(-j)))
    }
}

impl<V: VarKind> QAlgebra for NormalOp<V> {
    fn from_rat(r: &Rat) -> Self {
        Self::from_func(RatFunc::from_rat(r))
    }
}

impl<V: VarKind> fmt::Debug for NormalOp<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(j, g)| format!("x^{j}*[{g:?}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Operator series in `u`, one normal-form operator per power.
pub type OpSeries<V> = TSeries<NormalOp<V>>;

/// `P^{-1} · A` for `P = Π (v - r)` given by its roots.
pub fn left_div_by_p<V: VarKind>(roots: &[V::Root], a: &OpSeries<V>) -> OpSeries<V> {
    let pinv = NormalOp::from_func(RatFunc::<V>::inv_roots(roots));
    a.map(|c| pinv.mul(c))
}

/// `log(1 + R)` as an operator series; `R` must vanish modulo `u`.
pub fn op_log1p<V: VarKind>(r: &OpSeries<V>) -> Result<OpSeries<V>, ExactError> {
    log1p_by_powers(r)
}

/// Zero mode of every coefficient of an operator series.
pub fn zero_mode_series<V: VarKind>(a: &OpSeries<V>) -> TSeries<RatFunc<V>> {
    a.map(|c| c.zero_mode())
}

/// Zero mode of `log(1 + R)` computed by letting `R` act on `x^ε` instead
/// of forming operator powers; one partial-fraction sum per power of `u`.
///
/// Tracks `R^m x^ε` as a map from x-offset to functions of `ε`, pruning
/// offsets too far away to return to `x^ε` within the truncation order.
pub fn zero_mode_log1p_poles<V: VarKind>(r: &OpSeries<V>) -> Result<Vec<PoleSum<V>>, ExactError> {
    if r.coeffs().first().is_some_and(|c| !c.is_zero()) {
        return Err(ExactError::Precondition("log(1+R) needs R = 0 mod u".into()));
    }
    let order = r
        .order()
        .ok_or_else(|| ExactError::Precondition("zero mode of log needs a truncated series".into()))?;
    let parts: Vec<Vec<(i64, PoleSum<V>)>> = (0..order)
        .map(|i| match r.coeffs().get(i) {
            Some(c) if i > 0 => c.terms().map(|(j, g)| (j, PoleSum::from_ratfunc(g))).collect(),
            _ => Vec::new(),
        })
        .collect();
    let s_max = parts.iter().flatten().map(|(j, _)| j.abs()).max().unwrap_or(0);
    // vectors[o] : offset -> coefficient, for the current power R^m x^ε at u-order o
    let mut vectors: Vec<BTreeMap<i64, PoleSum<V>>> = vec![BTreeMap::new(); order];
    vectors[0].insert(0, PoleSum::from_ratfunc(&RatFunc::one()));
    let mut acc: Vec<PoleSum<V>> = vec![PoleSum::zero(); order];
    let mut shifted: HashMap<(usize, usize, i64), PoleSum<V>> = HashMap::new();
    for m in 1..order {
        let mut next: Vec<BTreeMap<i64, PoleSum<V>>> = vec![BTreeMap::new(); order];
        let mut any = false;
        for (o, vec) in vectors.iter().enumerate() {
            for (n, c) in vec {
                for (i, terms) in parts.iter().enumerate().skip(1) {
                    let to = o + i;
                    if to >= order {
                        break;
                    }
                    for (t_idx, (j, g)) in terms.iter().enumerate() {
                        let pos = n + j;
                        let budget = (order - 1 - to) as i64;
                        if pos.abs() > budget * s_max {
                            continue;
                        }
                        let gs = shifted.entry((i, t_idx, *n)).or_insert_with(|| g.shift(*n));
                        let t = gs.mul(c);
                        if t.is_zero() {
                            continue;
                        }
                        next[to].entry(pos).or_insert_with(PoleSum::zero).add_assign(&t);
                        any = true;
                    }
                }
            }
        }
        for v in next.iter_mut() {
            v.retain(|_, f| !f.is_zero());
        }
        let sign = if m % 2 == 1 { 1 } else { -1 };
        let w = V::K::from_rat(&crate::exact::rat(sign, m as i64));
        for (o, v) in next.iter().enumerate() {
            if let Some(c) = v.get(&0) {
                acc[o].add_assign(&c.scale(&w));
            }
        }
        vectors = next;
        if !any {
            break;
        }
    }
    Ok(acc)
}

/// [`zero_mode_log1p_poles`] recombined into rational functions.
pub fn zero_mode_log1p<V: VarKind>(r: &OpSeries<V>) -> Result<TSeries<RatFunc<V>>, ExactError> {
    let zm = zero_mode_log1p_poles(r)?;
    let order = zm.len();
    Ok(TSeries::with_order(zm.iter().map(PoleSum::to_ratfunc).collect(), order))
}

/// Rational roots of a polynomial over `Q`, with multiplicity, if it splits.
pub fn rational_roots(p: &UPoly<Rat>) -> Option<Vec<Rat>> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{Signed, ToPrimitive};
    let mut rest = p.clone();
    let mut roots = Vec::new();
    while rest.degree()? > 0 {
        if rest.coeff(0).is_zero() {
            roots.push(Rat::zero());
            rest = rest.exact_div(&UPoly::var());
            continue;
        }
        let l = rest.coeffs().iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            rest.coeffs().iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
        let a0 = ints[0].abs().to_u64()?;
        let ak = ints.last().unwrap().abs().to_u64()?;
        let divisors = |n: u64| -> Vec<u64> {
            let mut d = Vec::new();
            let mut i = 1;
            while i * i <= n {
                if n.is_multiple_of(i) {
                    d.push(i);
                    d.push(n / i);
                }
                i += 1;
            }
            d
        };
        let mut found = None;
        'outer: for num in divisors(a0) {
            for den in divisors(ak) {
                for sign in [1i64, -1] {
                    let r = Rat::new(BigInt::from(sign) * BigInt::from(num), BigInt::from(den));
                    if rest.eval(&r).is_zero() {
                        found = Some(r);
                        break 'outer;
                    }
                }
            }
        }
        let r = found?;
        rest = rest.exact_div(&UPoly::linear(&r));
        roots.push(r);
    }
    roots.sort();
    Some(roots)
}
