//! Small complex-matrix helpers shared by the geometric modules.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Matrix from real rows scaled by a complex constant.
pub fn mat(rows: &[&[f64]], scale: Complex64) -> CMat {
    let n = rows.len();
    let m = rows[0].len();
    CMat::from_fn(n, m, |i, j| scale * rows[i][j])
}

/// Matrix from complex rows given as (re, im) pairs.
pub fn cmat(rows: &[&[(f64, f64)]]) -> CMat {
    let n = rows.len();
    let m = rows[0].len();
    CMat::from_fn(n, m, |i, j| c(rows[i][j].0, rows[i][j].1))
}

pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = c(1.0, 0.0);
    m
}

pub fn bracket(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

/// Trace form B(X, Y) = tr(XY).
pub fn trace_form(x: &CMat, y: &CMat) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..x.nrows() {
        for k in 0..x.ncols() {
            acc += x[(i, k)] * y[(k, i)];
        }
    }
    acc
}

pub fn conj(x: &CMat) -> CMat {
    x.map(|z| z.conj())
}

pub fn norm(x: &CMat) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(x: &CMat, y: &CMat) -> f64 {
    norm(&(x - y))
}

pub fn inverse(x: &CMat) -> Option<CMat> {
    x.clone().try_inverse()
}

/// Matrix exponential; closed form for 2×2.
pub fn expm(x: &CMat) -> CMat {
    if x.nrows() != 2 {
        return x.exp();
    }
    // A = m + B with B traceless, B² = −det(B)·1 = w·1
    let m = (x[(0, 0)] + x[(1, 1)]) / 2.0;
    let b00 = x[(0, 0)] - m;
    let w = b00 * b00 + x[(0, 1)] * x[(1, 0)];
    let (ch, sh) = (cosh_sq(w), sinhc_sq(w));
    let e = m.exp();
    CMat::from_row_slice(2, 2, &[e * (ch + sh * b00), e * sh * x[(0, 1)], e * sh * x[(1, 0)], e * (ch - sh * b00)])
}

/// cosh(√w), entire in w.
pub fn cosh_sq(w: Complex64) -> Complex64 {
    if w.norm() < 1e-6 {
        Complex64::new(1.0, 0.0) + w / 2.0 * (Complex64::new(1.0, 0.0) + w / 12.0)
    } else {
        w.sqrt().cosh()
    }
}

/// sinh(√w)/√w, entire in w.
pub fn sinhc_sq(w: Complex64) -> Complex64 {
    sinhc(w.sqrt())
}

/// Block-diagonal matrix with blocks `a` and `b`.
pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = CMat::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

/// Coefficients c_1..c_n of det(t − X) = t^n − c_1 t^{n−1} + c_2 t^{n−2} − …, via Newton's identities.
pub fn char_poly(x: &CMat) -> Vec<Complex64> {
    let n = x.nrows();
    let mut power = CMat::identity(n, n);
    let mut p = Vec::with_capacity(n);
    for _ in 0..n {
        power = &power * x;
        p.push(power.trace());
    }
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=n {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            s += e[k - i] * p[i - 1] * sign;
        }
        e.push(s / k as f64);
    }
    e.remove(0);
    e
}

/// Nearest rational with denominator at most 12, if within `tol`.
pub fn to_rational(x: f64, tol: f64) -> Option<Rational64> {
    (1..=12i64).find_map(|d| {
        let n = (x * d as f64).round();
        ((x * d as f64 - n).abs() < tol * d as f64).then(|| Rational64::new(n as i64, d))
    })
}

/// sinh(z)/z, with a Taylor branch near the removable singularity.
pub fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) + z2 / 6.0 * (Complex64::new(1.0, 0.0) + z2 / 20.0 * (Complex64::new(1.0, 0.0) + z2 / 42.0))
    } else {
        z.sinh() / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_of_diagonal() {
        let x = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]));
        let cp = char_poly(&x);
        assert!((cp[0] - c(6.0, 0.0)).norm() < 1e-12);
        assert!((cp[1] - c(11.0, 0.0)).norm() < 1e-12);
        assert!((cp[2] - c(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sinhc_branches_meet() {
        for &r in &[0.999e-3, 1.001e-3] {
            for &z in &[c(r, 0.0), c(0.0, r), c(r * 0.6, r * 0.8)] {
                let series = {
                    let z2 = z * z;
                    c(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0
                };
                assert!((sinhc(z) - series).norm() < 1e-15);
            }
        }
        assert_eq!(sinhc(c(0.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn closed_form_exp_matches_pade() {
        for rows in [
            [(0.3, 0.1), (1.2, -0.4), (-0.7, 0.2), (0.5, 0.9)],
            [(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            [(0.0, 1e-5), (2e-4, 0.0), (0.0, 0.0), (0.0, -1e-5)],
            [(0.0, 0.0), (3.0, 0.0), (-3.0, 0.0), (0.0, 0.0)],
        ] {
            let x = CMat::from_row_slice(2, 2, &rows.map(|(a, b)| c(a, b)));
            let d = dist(&expm(&x), &x.exp());
            assert!(d < 1e-13 * norm(&x.exp()), "{d}");
        }
    }

    #[test]
    fn rational_rounding() {
        assert_eq!(to_rational(0.5, 1e-12), Some(Rational64::new(1, 2)));
        assert_eq!(to_rational(-2.0 / 3.0, 1e-12), Some(Rational64::new(-2, 3)));
        assert_eq!(to_rational(std::f64::consts::PI, 1e-12), None);
    }
}
