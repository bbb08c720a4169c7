//! Truncated Laurent series, used to expand pole sums around a point where
//! poles of the hybridization and zeros of `G` may cancel.

use num_complex::Complex64;

/// Expansion order kept above `h^0`.
pub const ORDER: usize = 4;

/// `sum_k c[k] h^(low + k)`, truncated at `h^ORDER`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent {
    pub low: i32,
    pub c: Vec<Complex64>,
}

impl Laurent {
    fn len_for(low: i32) -> usize {
        (ORDER as i32 - low + 1).max(0) as usize
    }

    pub fn zero() -> Self {
        Laurent { low: 0, c: vec![Complex64::new(0.0, 0.0); Self::len_for(0)] }
    }

    pub fn constant(v: Complex64) -> Self {
        let mut s = Self::zero();
        s.c[0] = v;
        s
    }

    /// The variable `h` itself.
    pub fn h() -> Self {
        let mut s = Self::zero();
        s.c[1] = Complex64::new(1.0, 0.0);
        s
    }

    /// Expansion of `weight / (at + h - pole)`. Poles closer than `merge`
    /// to the expansion point are treated as sitting on it.
    pub fn simple_pole(weight: f64, pole: f64, at: Complex64, merge: f64) -> Self {
        let a = Complex64::new(pole, 0.0) - at;
        if a.norm() <= merge {
            let mut s = Laurent { low: -1, c: vec![Complex64::new(0.0, 0.0); Self::len_for(-1)] };
            s.c[0] = Complex64::new(weight, 0.0);
            return s;
        }
        // weight / (h - a) = -(weight / a) sum (h / a)^n
        let mut s = Self::zero();
        let mut t = -weight / a;
        for k in 0..s.c.len() {
            s.c[k] = t;
            t /= a;
        }
        s
    }

    /// Coefficient of `h^n` (zero outside the stored range).
    pub fn coeff(&self, n: i32) -> Complex64 {
        let k = n - self.low;
        if k < 0 || k as usize >= self.c.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[k as usize]
        }
    }

    fn with_low(low: i32, f: impl Fn(i32) -> Complex64) -> Self {
        Laurent { low, c: (0..Self::len_for(low)).map(|k| f(low + k as i32)).collect() }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        Self::with_low(self.low.min(o.low), |n| self.coeff(n) + o.coeff(n))
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        Self::with_low(self.low.min(o.low), |n| self.coeff(n) - o.coeff(n))
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        Self::with_low(self.low + o.low, |n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, a) in self.c.iter().enumerate() {
                let m = n - self.low - i as i32;
                acc += a * o.coeff(m);
            }
            acc
        })
    }

    /// Drops leading coefficients with modulus `<= zero_tol`.
    pub fn trimmed(&self, zero_tol: f64) -> Laurent {
        let skip = self.c.iter().take_while(|v| v.norm() <= zero_tol).count();
        if skip == self.c.len() {
            return Laurent::zero();
        }
        Laurent { low: self.low + skip as i32, c: self.c[skip..].to_vec() }
    }

    /// Reciprocal after trimming. Returns `None` when every stored
    /// coefficient vanishes.
    pub fn recip(&self, zero_tol: f64) -> Option<Laurent> {
        let t = self.trimmed(zero_tol);
        let b0 = t.c[0];
        if b0.norm() <= zero_tol {
            return None;
        }
        // (b0 + b1 h + ...)^-1 = h^-low (d0 + d1 h + ...)
        let len = t.c.len();
        let mut d = vec![Complex64::new(0.0, 0.0); len];
        d[0] = b0.inv();
        for k in 1..len {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += t.c[j] * d[k - j];
            }
            d[k] = -acc / b0;
        }
        Some(Self::with_low(-t.low, |n| {
            let k = n + t.low;
            if k >= 0 && (k as usize) < len {
                d[k as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }
}
