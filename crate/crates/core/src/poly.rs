//! Dense complex polynomials in ascending coefficient order.

use std::ops::{Add, Mul, Sub};

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `x - a`
    pub fn linear_root(a: C64) -> Self {
        Self::new(vec![-a, ONE])
    }

    pub fn from_roots(roots: &[C64], leading: C64) -> Self {
        roots
            .iter()
            .fold(Self::constant(leading), |acc, &r| &acc * &Self::linear_root(r))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Exact degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients below `rel * max|c|`.
    pub fn trimmed(&self, rel: f64) -> Self {
        let cut = rel * self.max_coeff();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().map_or(false, |z| z.norm() <= cut) {
            c.pop();
        }
        Self::new(c)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn deriv(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(ZERO);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Polynomial long division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::constant(ZERO), self.clone());
        }
        let mut quot = vec![ZERO; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for j in 0..=dd {
                rem[k + j] -= q * divisor.coeffs[j];
            }
        }
        rem.truncate(dd.max(1));
        (Self::new(quot), Self::new(rem))
    }

    /// All complex roots: companion-matrix eigenvalues followed by a
    /// guarded Newton polish on the original polynomial.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let p = self.trimmed(1e-14);
        let n = match p.degree() {
            None => return Err(Error::Numerical("roots of the zero polynomial".into())),
            Some(0) => return Ok(Vec::new()),
            Some(n) => n,
        };
        let lead = p.coeffs[n];
        if n == 1 {
            return Ok(vec![-p.coeffs[0] / lead]);
        }
        let comp = Mat::<C64>::from_fn(n, n, |i, j| {
            if i == 0 {
                -p.coeffs[n - 1 - j] / lead
            } else if i == j + 1 {
                ONE
            } else {
                ZERO
            }
        });
        let eig = comp
            .eigenvalues()
            .map_err(|e| Error::Numerical(format!("companion eigenvalues failed: {e:?}")))?;
        let dp = p.deriv();
        let mut roots: Vec<C64> = eig
            .into_iter()
            .map(|mut z| {
                let mut fz = p.eval(z).norm();
                for _ in 0..8 {
                    let d = dp.eval(z);
                    if d == ZERO {
                        break;
                    }
                    let cand = z - p.eval(z) / d;
                    let fc = p.eval(cand).norm();
                    if fc < fz {
                        z = cand;
                        fz = fc;
                    } else {
                        break;
                    }
                }
                z
            })
            .collect();
        sort_complex(&mut roots);
        Ok(roots)
    }

    /// Discriminant. Closed forms for degrees 2 and 3, root products above.
    pub fn discriminant(&self) -> Result<C64> {
        let n = self
            .degree()
            .ok_or_else(|| Error::Numerical("discriminant of the zero polynomial".into()))?;
        let c = &self.coeffs;
        Ok(match n {
            0 | 1 => ONE,
            2 => c[1] * c[1] - 4.0 * c[2] * c[0],
            3 => {
                let (a, b, cc, d) = (c[3], c[2], c[1], c[0]);
                18.0 * a * b * cc * d - 4.0 * b * b * b * d + b * b * cc * cc
                    - 4.0 * a * cc * cc * cc
                    - 27.0 * a * a * d * d
            }
            _ => {
                let r = self.roots()?;
                let mut prod = ONE;
                for i in 0..n {
                    for j in i + 1..n {
                        prod *= (r[i] - r[j]) * (r[i] - r[j]);
                    }
                }
                c[n].powu(2 * n as u32 - 2) * prod
            }
        })
    }
}

/// Sorts by real part, then imaginary part.
pub fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
