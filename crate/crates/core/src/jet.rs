//! Truncated Taylor series arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients `f^(k)(t0) / k!` for
//! `k = 0..=order`. Products and quotients of jets give exact derivatives of
//! products and quotients, so kernels built from powers of `t` and `1 - t`
//! can be differentiated to any order without finite differences.

pub(crate) const JET_LEN: usize = 8;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub c: [f64; JET_LEN],
    pub order: usize,
}

impl Jet {
    #[cfg(test)]
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Self { c, order }
    }

    /// `(t0 + h)^p` expanded in `h`, given `ln t0`.
    pub fn power(t0: f64, ln_t0: f64, p: f64, order: usize) -> Self {
        let mut c = [0.0; JET_LEN];
        let base = (p * ln_t0).exp();
        c[0] = base;
        let mut binom = 1.0;
        for k in 1..=order {
            binom *= (p - (k - 1) as f64) / k as f64;
            c[k] = base * binom / t0.powi(k as i32);
        }
        Self { c, order }
    }

    /// `(s0 - h)^p` expanded in `h`: the jet of `(1 - t)^p` with `s0 = 1 - t0`.
    pub fn reflected_power(s0: f64, ln_s0: f64, p: f64, order: usize) -> Self {
        let mut j = Self::power(s0, ln_s0, p, order);
        for k in (1..=order).step_by(2) {
            j.c[k] = -j.c[k];
        }
        j
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = [0.0; JET_LEN];
        for k in 0..=self.order {
            c[k] = self.c[k] + o.c[k];
        }
        Self { c, order: self.order }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.c;
        for v in c.iter_mut().take(self.order + 1) {
            *v *= s;
        }
        Self { c, order: self.order }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = [0.0; JET_LEN];
        for k in 0..=self.order {
            let mut s = 0.0;
            for j in 0..=k {
                s += self.c[j] * o.c[k - j];
            }
            c[k] = s;
        }
        Self { c, order: self.order }
    }

    pub fn div(&self, o: &Self) -> Self {
        let mut c = [0.0; JET_LEN];
        for k in 0..=self.order {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= o.c[j] * c[k - j];
            }
            c[k] = s / o.c[0];
        }
        Self { c, order: self.order }
    }

    /// Derivatives `f^(k)(t0)` for `k = 0..=order`.
    pub fn derivatives(&self) -> [f64; JET_LEN] {
        let mut d = [0.0; JET_LEN];
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            d[k] = self.c[k] * fact;
        }
        d
    }
}
