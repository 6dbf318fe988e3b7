//! Real trigonometric polynomials `sum_k a_k cos(k x) + b_k sin(k x)` with
//! exact products and integrals over a full period.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    /// `cos` coefficients; `cos[0]` is the constant term.
    pub cos: Vec<f64>,
    /// `sin` coefficients; `sin[0]` is ignored and kept at zero.
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn zero(degree: usize) -> Self {
        Self {
            cos: vec![0.0; degree + 1],
            sin: vec![0.0; degree + 1],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            cos: vec![c],
            sin: vec![0.0],
        }
    }

    pub fn cos_n(n: usize) -> Self {
        let mut p = Self::zero(n);
        p.cos[n] = 1.0;
        p
    }

    pub fn sin_n(n: usize) -> Self {
        let mut p = Self::zero(n);
        if n > 0 {
            p.sin[n] = 1.0;
        }
        p
    }

    /// `1 + alpha cos(x)`.
    pub fn metric(alpha: f64) -> Self {
        Self {
            cos: vec![1.0, alpha],
            sin: vec![0.0, 0.0],
        }
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len()).saturating_sub(1)
    }

    fn coeff(v: &[f64], k: usize) -> f64 {
        v.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..=self.degree() {
            let (sk, ck) = (k as f64 * x).sin_cos();
            s += Self::coeff(&self.cos, k) * ck + Self::coeff(&self.sin, k) * sk;
        }
        s
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree();
        let mut out = Self::zero(d);
        for k in 1..=d {
            let kf = k as f64;
            out.cos[k] = kf * Self::coeff(&self.sin, k);
            out.sin[k] = -kf * Self::coeff(&self.cos, k);
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            cos: self.cos.iter().map(|v| v * c).collect(),
            sin: self.sin.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().max(other.degree());
        let mut out = Self::zero(d);
        for k in 0..=d {
            out.cos[k] = Self::coeff(&self.cos, k) + Self::coeff(&other.cos, k);
            out.sin[k] = Self::coeff(&self.sin, k) + Self::coeff(&other.sin, k);
        }
        out.sin[0] = 0.0;
        out
    }

    /// Exact product via the product-to-sum identities.
    pub fn mul(&self, other: &Self) -> Self {
        let (dp, dq) = (self.degree(), other.degree());
        let mut out = Self::zero(dp + dq);
        for j in 0..=dp {
            let (aj, bj) = (Self::coeff(&self.cos, j), Self::coeff(&self.sin, j));
            if aj == 0.0 && bj == 0.0 {
                continue;
            }
            for k in 0..=dq {
                let (ak, bk) = (Self::coeff(&other.cos, k), Self::coeff(&other.sin, k));
                let sum = j + k;
                let diff = j.abs_diff(k);
                // cos j cos k = [cos(j+k) + cos(j-k)] / 2
                out.cos[sum] += 0.5 * aj * ak;
                out.cos[diff] += 0.5 * aj * ak;
                // sin j sin k = [cos(j-k) - cos(j+k)] / 2
                out.cos[diff] += 0.5 * bj * bk;
                out.cos[sum] -= 0.5 * bj * bk;
                // cos j sin k = [sin(j+k) - sin(j-k)] / 2
                out.sin[sum] += 0.5 * aj * bk;
                let s = if j >= k { -1.0 } else { 1.0 };
                out.sin[diff] += s * 0.5 * aj * bk;
                // sin j cos k = [sin(j+k) + sin(j-k)] / 2
                out.sin[sum] += 0.5 * bj * ak;
                out.sin[diff] -= s * 0.5 * bj * ak;
            }
        }
        out.sin[0] = 0.0;
        out
    }

    /// `int_0^{2 pi} p(x) dx`.
    pub fn integral(&self) -> f64 {
        2.0 * PI * Self::coeff(&self.cos, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(p: &TrigPoly, q: &TrigPoly, r: &TrigPoly) {
        for i in 0..37 {
            let x = -3.0 + 0.21 * i as f64;
            assert!((p.eval(x) * q.eval(x) - r.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn product_matches_pointwise() {
        let p = TrigPoly {
            cos: vec![0.3, -1.0, 0.5],
            sin: vec![0.0, 2.0, 0.25],
        };
        let q = TrigPoly {
            cos: vec![1.0, 0.0, 0.0, -0.7],
            sin: vec![0.0, 0.4, -1.1, 0.9],
        };
        sample(&p, &q, &p.mul(&q));
        sample(&q, &p, &q.mul(&p));
    }

    #[test]
    fn integrals() {
        assert!((TrigPoly::constant(1.0).integral() - 2.0 * PI).abs() < 1e-15);
        let c2 = TrigPoly::cos_n(2);
        assert!((c2.mul(&c2).integral() - PI).abs() < 1e-15);
        // int cos(x) (1 + cos(x)/2) dx = pi/2
        let w = TrigPoly::metric(0.5);
        assert!((TrigPoly::cos_n(1).mul(&w).integral() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_sin() {
        let d = TrigPoly::sin_n(3).derivative();
        assert_eq!(d.cos[3], 3.0);
        let dd = d.derivative();
        assert_eq!(dd.sin[3], -9.0);
    }
}
