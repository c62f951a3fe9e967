use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::RepError;
use crate::exact::{DiffVar, ExactError, Fp, Gf, GfCtx, MPoly, Matrix, Rat, Ring, TSeries};
use crate::opalg::{DiffOpSeries, NormalOp};

/// Laurent polynomials in `ξ, η` over `F_p` (variables 0 and 1).
pub type PSym = MPoly<Fp, 2>;

type Embed<R> = Arc<dyn Fn(&Rat) -> Result<R, ExactError> + Send + Sync>;

/// The `p`-dimensional representation `x ↦ x + ξ`, `∂ ↦ ∂ + η` on
/// `F[x]/(x^p)` with values in a ring `R` containing `ξ^{±1}, η`.
pub struct PRep<R: Ring> {
    pub p: u64,
    pub xi: R,
    pub eta: R,
    x: Matrix<R>,
    xinv: Matrix<R>,
    dx: Matrix<R>,
    theta: Matrix<R>,
    embed: Embed<R>,
    inv_cache: Mutex<HashMap<i64, Matrix<R>>>,
}

impl<R: Ring> PRep<R> {
    pub fn new(p: u64, xi: R, eta: R, embed: Embed<R>) -> Result<Self, RepError> {
        let n = p as usize;
        let xi_inv = xi.inv().ok_or(RepError::Singular("xi"))?;
        // integer entries go through the embedding so that they carry the modulus
        let ints: Vec<R> = (0..n as i64)
            .map(|j| embed(&Rat::from_integer(j.into())).map_err(|_| RepError::BadReduction(p)))
            .collect::<Result<_, _>>()?;
        let x = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                xi.clone()
            } else if i == j + 1 {
                ints[1].clone()
            } else {
                R::zero()
            }
        });
        // (ξ + N)^{-1} = Σ (-1)^m ξ^{-m-1} N^m
        let xinv = Matrix::from_fn(n, n, |i, j| {
            if i < j {
                return R::zero();
            }
            let m = (i - j) as u64;
            let v = xi_inv.pow(m + 1);
            if m % 2 == 1 {
                v.neg()
            } else {
                v
            }
        });
        let dx = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                eta.clone()
            } else if j == i + 1 {
                ints[j].clone()
            } else {
                R::zero()
            }
        });
        let theta = x.mul(&dx);
        Ok(PRep { p, xi, eta, x, xinv, dx, theta, embed, inv_cache: Mutex::new(HashMap::new()) })
    }

    pub fn x(&self) -> &Matrix<R> {
        &self.x
    }

    pub fn dx(&self) -> &Matrix<R> {
        &self.dx
    }

    pub fn theta(&self) -> &Matrix<R> {
        &self.theta
    }

    pub fn embed(&self, r: &Rat) -> Result<R, RepError> {
        (self.embed)(r).map_err(|_| RepError::BadReduction(self.p))
    }

    /// `ε = -ξ^p η^p` and its inverse.
    pub fn eps(&self) -> Result<(R, R), RepError> {
        let e = self.xi.mul(&self.eta).pow(self.p).neg();
        let inv = e.inv().ok_or(RepError::Singular("xi*eta"))?;
        Ok((e, inv))
    }

    pub(crate) fn x_pow(&self, j: i64) -> Matrix<R> {
        let base = if j >= 0 { &self.x } else { &self.xinv };
        let mut out = Matrix::identity(self.p as usize);
        for _ in 0..j.unsigned_abs() {
            out = out.mul(base);
        }
        out
    }

    /// `(Θ - c)^{-1}` for rational `c` whose denominator is prime to `p`.
    pub(crate) fn theta_shift_inv(&self, c: &Rat) -> Result<Matrix<R>, RepError> {
        let key = Fp::from_rat(c, self.p).map_err(|_| RepError::BadReduction(self.p))?.value();
        if let Some(m) = self.inv_cache.lock().expect("cache").get(&key) {
            return Ok(m.clone());
        }
        let cv = self.embed(c)?;
        let n = self.p as usize;
        let m = self.theta.sub(&Matrix::scalar(n, &cv));
        let inv = m.inverse().ok_or(RepError::Singular("theta - c"))?;
        self.inv_cache.lock().expect("cache").insert(key, inv.clone());
        Ok(inv)
    }

    /// `f(Θ)` for a rational function with roots prime to `p`.
    fn func(&self, f: &crate::exact::RatFunc<DiffVar>) -> Result<Matrix<R>, RepError> {
        let n = self.p as usize;
        let mut acc = Matrix::zeros(n, n);
        for c in f.numerator().coeffs().iter().rev() {
            acc = acc.mul(&self.theta).add(&Matrix::scalar(n, &self.embed(c)?));
        }
        for (root, &m) in f.denominator() {
            let inv = self.theta_shift_inv(root)?;
            for _ in 0..m {
                acc = acc.mul(&inv);
            }
        }
        Ok(acc)
    }

    /// Image of a normal-form operator.
    pub fn op(&self, a: &NormalOp<DiffVar>) -> Result<Matrix<R>, RepError> {
        let n = self.p as usize;
        let mut acc = Matrix::zeros(n, n);
        for (j, f) in a.terms() {
            acc = acc.add(&self.x_pow(j).mul(&self.func(f)?));
        }
        Ok(acc)
    }

    /// Image of an operator series, as a matrix of series.
    pub fn op_series(&self, a: &DiffOpSeries, order: usize) -> Result<Matrix<TSeries<R>>, RepError> {
        let n = self.p as usize;
        let mats: Vec<Matrix<R>> = (0..order)
            .map(|i| match a.order() {
                Some(o) if i >= o => Ok(Matrix::zeros(n, n)),
                _ => self.op(&a.coeff(i)),
            })
            .collect::<Result<_, _>>()?;
        Ok(Matrix::from_fn(n, n, |r, c| {
            TSeries::with_order(mats.iter().map(|m| m.get(r, c).clone()).collect(), order)
        }))
    }
}

/// Symbolic representation over `F_p[ξ^{±1}, η^{±1}]`.
pub fn rho_p_symbolic(p: u64) -> Result<PRep<PSym>, RepError> {
    let one = Fp::new(1, p);
    let xi = PSym::monomial([1, 0], one);
    let eta = PSym::monomial([0, 1], one);
    let embed: Embed<PSym> = Arc::new(move |r| Ok(PSym::constant(Fp::from_rat(r, p)?)));
    PRep::new(p, xi, eta, embed)
}

/// Representation at a point `(ξ₀, η₀)` of `F_{p^d}`.
pub fn rho_p_point(ctx: &Arc<GfCtx>, xi: Gf, eta: Gf) -> Result<PRep<Gf>, RepError> {
    let c = ctx.clone();
    let embed: Embed<Gf> = Arc::new(move |r| c.from_rat(r));
    PRep::new(ctx.p, xi, eta, embed)
}

/// Extension degree with `p^d > 10·deg`.
pub fn extension_degree(p: u64, deg: u64) -> usize {
    let mut d = 1;
    let mut size = p as u128;
    while size <= 10 * deg as u128 {
        size *= p as u128;
        d += 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn sym(p: u64, e: [i32; 2], c: i64) -> PSym {
        PSym::monomial(e, Fp::new(c, p))
    }

    #[test]
    fn generators() {
        let r = rho_p_symbolic(3).unwrap();
        assert_eq!(r.x().get(0, 0), &sym(3, [1, 0], 1));
        assert_eq!(r.x().get(1, 0), &PSym::one());
        assert!(r.x().get(0, 1).is_zero());
        assert_eq!(r.dx().get(1, 2), &PSym::from_i64(2));
        let id = r.op(&NormalOp::x_pow(1).mul(&NormalOp::x_pow(-1))).unwrap();
        assert_eq!(id, Matrix::identity(3));
        let r5 = rho_p_symbolic(5).unwrap();
        assert_eq!(r5.x().mul(&r5.xinv), Matrix::identity(5));
    }

    #[test]
    fn theta_det() {
        for p in [3u64, 5] {
            let r = rho_p_symbolic(p).unwrap();
            assert_eq!(r.theta().det(), sym(p, [p as i32, p as i32], 1));
        }
    }

    #[test]
    fn inverse_factor() {
        let r = rho_p_symbolic(5).unwrap();
        let inv = r.theta_shift_inv(&rat(1, 2)).unwrap();
        let m = r.theta().sub(&Matrix::scalar(5, &r.embed(&rat(1, 2)).unwrap()));
        assert_eq!(m.mul(&inv), Matrix::identity(5));
        assert!(r.theta_shift_inv(&rat(1, 5)).is_err());
    }

    #[test]
    fn degree_choice() {
        assert_eq!(extension_degree(11, 100), 3);
        assert_eq!(extension_degree(101, 5), 1);
    }
}
