use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

const SCHUR_MAX_ITER: usize = 10_000;

/// Retry shifts, as multiples of the geometric mean root magnitude.
const SHIFTS: [f64; 4] = [0.3141, -0.7071, 1.618, -2.718];

/// Dense univariate polynomial, coefficients lowest degree first.
///
/// Trailing zero coefficients are trimmed on construction, so the last stored
/// coefficient is nonzero; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `a + b t`
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Drops leading coefficients whose magnitude is below `rel` times the
    /// largest coefficient.
    pub fn trimmed(&self, rel: f64) -> Self {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.abs() <= rel * max) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    fn companion(&self) -> DMatrix<f64> {
        let n = self.coeffs.len() - 1;
        let lead = self.coeffs[n];
        let mut m = DMatrix::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        m
    }

    /// `p(t + s)`.
    pub fn shifted(&self, s: f64) -> Self {
        let step = Self::linear(s, 1.0);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::new(Vec::new()), |acc, &c| &(&acc * &step) + &Self::constant(c))
    }

    /// Companion-matrix eigenvalues with a bounded Schur iteration, or `None`
    /// when it does not converge.
    fn eigen_roots(&self) -> Option<Vec<f64>> {
        let schur = self.companion().try_schur(f64::EPSILON, SCHUR_MAX_ITER)?;
        Some(
            schur
                .complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() < 1e-8 * (1.0 + z.re.abs()))
                .map(|z| z.re)
                .collect(),
        )
    }

    /// Real roots, ascending.
    ///
    /// Exact zero roots are factored out first. The rest come from the
    /// eigenvalues of the companion matrix; an eigenvalue counts as real when
    /// `|im| < 1e-8 (1 + |re|)`, and each real root is polished with up to
    /// three Newton steps. Root sets symmetric about zero can stall the QR
    /// iteration, so on failure the variable is shifted and the search
    /// repeated.
    pub fn real_roots(&self) -> Vec<f64> {
        let zeros = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let rest = Self::new(self.coeffs[zeros.min(self.coeffs.len())..].to_vec());
        let mut roots = match rest.degree() {
            None | Some(0) => Vec::new(),
            Some(1) => vec![-rest.coeffs[0] / rest.coeffs[1]],
            Some(n) => {
                let lead = rest.coeffs[n];
                let mu = (rest.coeffs[0] / lead).abs().powf(1.0 / n as f64);
                rest.eigen_roots()
                    .or_else(|| {
                        SHIFTS.iter().find_map(|k| {
                            let s = k * mu;
                            rest.shifted(s).eigen_roots().map(|r| r.into_iter().map(|x| x + s).collect())
                        })
                    })
                    .unwrap_or_else(|| {
                        log::warn!("companion eigenvalues did not converge for {:?}", rest.coeffs);
                        Vec::new()
                    })
            }
        };
        let deriv = self.derivative();
        for r in &mut roots {
            *r = self.polish(*r, &deriv);
        }
        if zeros > 0 && !self.coeffs.is_empty() {
            roots.push(0.0);
        }
        roots.retain(|r| r.is_finite());
        roots.sort_by(f64::total_cmp);
        roots
    }

    fn polish(&self, mut x: f64, deriv: &Polynomial) -> f64 {
        let mut fx = self.eval(x);
        for _ in 0..3 {
            let d = deriv.eval(x);
            if d == 0.0 || fx == 0.0 {
                break;
            }
            let next = x - fx / d;
            let f_next = self.eval(next);
            if !(f_next.abs() < fx.abs()) {
                break;
            }
            x = next;
            fx = f_next;
        }
        x
    }
}

pub fn real_roots(poly: &Polynomial) -> Vec<f64> {
    poly.real_roots()
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + rhs.coeffs.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Polynomial::new(Vec::new());
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}
