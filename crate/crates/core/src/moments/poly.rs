//! Dense real polynomials and their real roots.

/// Polynomial with coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    c: Vec<f64>,
}

impl Poly {
    pub fn new(c: Vec<f64>) -> Self {
        Self { c }
    }

    pub fn constant(v: f64) -> Self {
        Self { c: vec![v] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Index of the last non-zero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.c.iter().rposition(|&v| v != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
    }

    pub fn derivative(&self) -> Self {
        Self {
            c: self
                .c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &v)| i as f64 * v)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Poly, s: f64) -> Self {
        let n = self.c.len().max(other.c.len());
        let c = (0..n)
            .map(|i| self.c.get(i).copied().unwrap_or(0.0) + s * other.c.get(i).copied().unwrap_or(0.0))
            .collect();
        Self { c }
    }

    /// `(X - beta)·self`.
    pub fn times_x_minus(&self, beta: f64) -> Self {
        let mut c = vec![0.0; self.c.len() + 1];
        for (i, &v) in self.c.iter().enumerate() {
            c[i + 1] += v;
            c[i] -= beta * v;
        }
        Self { c }
    }
}

/// All real roots, ascending. Simple roots are found reliably; roots of even
/// multiplicity only when they hit a critical point exactly.
pub fn real_roots(p: &Poly) -> Vec<f64> {
    let d = p.degree();
    let c = &p.coeffs()[..=d];
    match d {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => quadratic(c[2], c[1], c[0]),
        _ => {
            let lead = c[d];
            let bound = 1.0 + c[..d].iter().map(|v| (v / lead).abs()).fold(0.0, f64::max);
            let mut pts = vec![-bound];
            pts.extend(
                real_roots(&p.derivative())
                    .into_iter()
                    .filter(|x| x.abs() < bound),
            );
            pts.push(bound);
            let mut roots: Vec<f64> = Vec::new();
            for w in pts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let (flo, fhi) = (p.eval(lo), p.eval(hi));
                if flo == 0.0 {
                    roots.push(lo);
                } else if flo.signum() != fhi.signum() && fhi != 0.0 {
                    roots.push(bisect(p, lo, hi, flo));
                }
            }
            if p.eval(bound) == 0.0 {
                roots.push(bound);
            }
            roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
            roots
        }
    }
}

fn quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc > -1e-14 * b * b {
            return vec![-b / (2.0 * a)];
        }
        return Vec::new();
    }
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc.sqrt());
    let mut r = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    r.sort_by(f64::total_cmp);
    r
}

fn bisect(p: &Poly, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let (a0, b0) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish, kept inside the original bracket.
    let dp = p.derivative();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let nx = x - p.eval(x) / d;
        if !(nx > a0 && nx < b0) {
            break;
        }
        if p.eval(nx).abs() > p.eval(x).abs() {
            break;
        }
        x = nx;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(r: &[f64]) -> Poly {
        r.iter().fold(Poly::constant(1.0), |p, &x| p.times_x_minus(x))
    }

    #[test]
    fn closed_forms() {
        assert_eq!(real_roots(&Poly::new(vec![-1.0, 2.0])), vec![0.5]);
        let r = real_roots(&from_roots(&[0.25, 0.75]));
        assert!((r[0] - 0.25).abs() < 1e-15 && (r[1] - 0.75).abs() < 1e-15);
        assert!(real_roots(&Poly::new(vec![1.0, 0.0, 1.0])).is_empty());
    }

    #[test]
    fn quadratic_sign_of_b() {
        for roots in [[-3.0, -1e-9], [1e-9, 3.0], [-2.0, 5.0]] {
            let r = real_roots(&from_roots(&roots));
            for (a, b) in r.iter().zip(roots) {
                assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-9), "{r:?}");
            }
        }
    }

    #[test]
    fn higher_degree() {
        let want = [0.05, 0.3, 0.31, 0.8, 0.99];
        let r = real_roots(&from_roots(&want));
        assert_eq!(r.len(), 5);
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn cubic_with_complex_pair() {
        // (x - 0.4)(x² + 1)
        let q = Poly::new(vec![-0.4, 1.0, -0.4, 1.0]);
        let r = real_roots(&q);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.4).abs() < 1e-14);
    }

    #[test]
    fn derivative_and_eval() {
        let p = Poly::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative().coeffs(), &[2.0, 6.0]);
    }
}
