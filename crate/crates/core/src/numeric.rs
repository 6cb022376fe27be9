//! Small numerical helpers: summation, quadrature, bracketing searches.

/// Sequences longer than this are summed with Neumaier compensation.
pub const COMPENSATION_THRESHOLD: usize = 64;

/// Left-to-right sum; compensated when there are more than 64 terms.
pub fn sum<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: ExactSizeIterator,
{
    let it = values.into_iter();
    if it.len() > COMPENSATION_THRESHOLD {
        neumaier(it)
    } else {
        it.fold(0.0, |acc, x| acc + x)
    }
}

/// Neumaier's improved Kahan summation.
pub fn neumaier<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Running compensated accumulator, used for long prefix sums over rounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over `[a, b]` after splitting at the given interior points.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cuts: &[f64], tol: f64) -> f64 {
    let mut points: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut lo = a;
    let mut total = 0.0;
    let per = tol / (points.len() + 1) as f64;
    for hi in points.into_iter().chain(std::iter::once(b)) {
        total += integrate(&f, lo, hi, per);
        lo = hi;
    }
    total
}

/// Smallest `x` in `[lo, hi]` with `pred(x)` true, to absolute tolerance `tol`.
/// `pred` must be monotone (false then true) and true at `hi`.
pub fn bisect_first_true<P: Fn(f64) -> bool>(pred: P, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if pred(lo) {
        return lo;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive_on_long_tail() {
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-16, 1000));
        let s = sum(v);
        assert!((s - (1.0 + 1e-13)).abs() < 1e-16);
    }

    #[test]
    fn simpson_integrates_polynomials_and_logs() {
        let cubic = integrate(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((cubic - 4.0).abs() < 1e-12);
        let log = integrate(|x| 1.0 / x, 1.0, std::f64::consts::E, 1e-12);
        assert!((log - 1.0).abs() < 1e-11);
    }

    #[test]
    fn piecewise_integration_handles_jumps() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let v = integrate_pieces(step, 0.0, 1.0, &[0.3], 1e-12);
        assert!((v - (0.3 + 1.4)).abs() < 1e-12);
    }

    #[test]
    fn bisection_and_golden_section() {
        let r = bisect_first_true(|x| x * x >= 2.0, 0.0, 2.0, 1e-13);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let m = golden_max(|r| r * (1.0 - r), 0.0, 1.0, 1e-10);
        assert!((m - 0.5).abs() < 1e-8);
    }
}
