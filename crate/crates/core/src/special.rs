//! Special functions: Gamma, modified Bessel K, Gauss-Legendre rules, smooth steps.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function (Lanczos, g = 7) with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Taylor coefficients of 1/Gamma(1+x) = sum_k C[k] x^k.
const RGAMMA1: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_860_6,
    -0.655_878_071_520_253_881_1,
    -0.042_002_635_034_095_235_53,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_75,
    -0.009_621_971_527_876_973_562,
    0.007_218_943_246_663_099_542,
    -0.001_165_167_591_859_065_112,
    -0.000_215_241_674_114_950_972_8,
    0.000_128_050_282_388_116_186_2,
    -0.000_020_134_854_780_788_238_66,
    -0.000_001_250_493_482_142_670_657,
    0.000_001_133_027_231_981_695_882,
    -2.056_338_416_977_607_103e-7,
    6.116_095_104_481_415_818e-9,
    5.002_007_644_469_222_930e-9,
    -1.181_274_570_487_020_145e-9,
    1.043_426_711_691_100_510e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783e-14,
    -5.348_122_539_423_017_982e-15,
    1.226_778_628_238_260_790e-15,
    -1.181_259_301_697_458_770e-16,
];

/// Temme's auxiliary values for |mu| <= 1/2:
/// (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)).
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // even = sum c_{2j} mu^{2j}, odd = sum c_{2j+1} mu^{2j}
    let mu2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    for pair in RGAMMA1.chunks(2).rev() {
        even = even * mu2 + pair[0];
        odd = odd * mu2 + pair[1];
    }
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

/// Modified Bessel functions (K_nu(x), K_{nu+1}(x)) for real nu and x > 0.
fn bessel_k_pair(nu: f64, x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-16;
    const MAXIT: usize = 100_000;
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let mu2 = mu * mu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let (mut kmu, mut k1);
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        kmu = sum;
        k1 = sum1 * xi2;
    } else {
        // Steed's continued fraction CF2.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        kmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        k1 = kmu * (mu + x + 0.5 - h) * xi;
    }
    for i in 1..=(nl as i64) {
        let t = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = t;
    }
    (kmu, k1)
}

/// Modified Bessel function of the second kind K_nu(x), x > 0.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got {x}")));
    }
    if !nu.is_finite() {
        return Err(Error::Domain(format!("bessel_k order must be finite, got {nu}")));
    }
    Ok(bessel_k_pair(nu.abs(), x).0)
}

/// A Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// n-point rule via Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (m + h * x, h * w))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `rule` applied on each consecutive pair of `breaks`.
pub fn composite(rule: &GaussLegendre, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(rule.len() * breaks.len());
    let mut ws = Vec::with_capacity(rule.len() * breaks.len());
    for pair in breaks.windows(2) {
        if pair[1] > pair[0] {
            for (x, w) in rule.on(pair[0], pair[1]) {
                xs.push(x);
                ws.push(w);
            }
        }
    }
    (xs, ws)
}

/// C-infinity step: 1 on (-inf, 1/2], 0 on [1, inf).
pub fn smooth_cutoff(t: f64) -> f64 {
    fn h(x: f64) -> f64 {
        if x > 0.0 {
            (-1.0 / x).exp()
        } else {
            0.0
        }
    }
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = h(1.0 - t);
        a / (a + h(t - 0.5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_integers_and_half() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-14);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn temme_matches_gamma() {
        for &mu in &[-0.5, -0.3, -0.01, 0.0, 0.2, 0.49] {
            let (_, _, gp, gm) = temme_gammas(mu);
            assert!((gp - 1.0 / gamma(1.0 + mu)).abs() < 1e-14, "mu={mu} {}", gp - 1.0 / gamma(1.0 + mu));
            assert!((gm - 1.0 / gamma(1.0 - mu)).abs() < 1e-14, "mu={mu} {}", gm - 1.0 / gamma(1.0 - mu));
        }
        let (g1, g2, _, _) = temme_gammas(0.0);
        assert!((g1 + 0.577_215_664_901_532_9).abs() < 1e-15);
        assert!((g2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k_half_closed_form() {
        for &x in &[0.01, 0.5, 1.0, 1.999, 2.0, 3.7, 25.0] {
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let k = bessel_k(0.5, x).unwrap();
            assert!((k / exact - 1.0).abs() < 1e-13, "x={x}: {k} vs {exact}");
            let k32 = bessel_k(1.5, x).unwrap();
            let e32 = exact * (1.0 + 1.0 / x);
            assert!((k32 / e32 - 1.0).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn k_rejects_nonpositive_argument() {
        assert!(bessel_k(0.3, 0.0).is_err());
        assert!(bessel_k(0.3, -1.0).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = GaussLegendre::new(7);
        let s: f64 = gl.on(0.0, 2.0).map(|(x, w)| w * x.powi(13)).sum();
        assert!((s - 2f64.powi(14) / 14.0).abs() < 1e-10);
        let total: f64 = gl.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(smooth_cutoff(0.2), 1.0);
        assert_eq!(smooth_cutoff(1.0), 0.0);
        assert!((smooth_cutoff(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = smooth_cutoff(0.5 + 0.005 * i as f64);
            assert!(v <= prev);
            prev = v;
        }
    }
}
