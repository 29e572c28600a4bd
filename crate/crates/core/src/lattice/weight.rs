/// The two weight families used to measure growth at infinity:
/// polynomial `p_a(x) = (1 + |x|)^a` and exponential
/// `e_l(x) = exp(l (1 + |x|))`.
///
/// Both satisfy the comparability condition `w(x)/w(y) ∈ [1/C, C]` for
/// `|x - y| <= 1`, with `C = 2^|a|` resp. `e^|l|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightSpec {
    Polynomial { a: f64 },
    Exponential { ell: f64 },
}

impl WeightSpec {
    pub fn polynomial(a: f64) -> Self {
        WeightSpec::Polynomial { a }
    }

    pub fn exponential(ell: f64) -> Self {
        WeightSpec::Exponential { ell }
    }

    /// Evaluates the weight at a point; strictly positive everywhere.
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        match *self {
            WeightSpec::Polynomial { a } => (1.0 + r).powf(a),
            WeightSpec::Exponential { ell } => (ell * (1.0 + r)).exp(),
        }
    }

    /// The comparability constant over unit steps: `w(x)/w(y) <= C` whenever
    /// `|x - y| <= 1`.
    pub fn comparability_constant(&self) -> f64 {
        match *self {
            WeightSpec::Polynomial { a } => 2.0_f64.powf(a.abs()),
            WeightSpec::Exponential { ell } => ell.abs().exp(),
        }
    }
}

/// Public alias mirroring the operation name used by the drivers.
pub fn eval_weight(w: &WeightSpec, x: f64, y: f64) -> f64 {
    w.eval(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn closed_form_values() {
        let p = WeightSpec::polynomial(1.0);
        assert_eq!(p.eval(3.0, 4.0), 6.0); // 1 + |(3,4)| = 6
        let e0 = WeightSpec::exponential(0.0);
        assert_eq!(e0.eval(17.0, -3.0), 1.0);
        let e2 = WeightSpec::exponential(2.0);
        assert!((e2.eval(0.0, 0.0) - (2.0_f64).exp()).abs() < 1e-12);
        assert!((e2.eval(0.0, 0.0) - 7.389_056_098_930_65).abs() < 1e-10);
    }

    #[test]
    fn comparability_over_unit_steps() {
        // 10^6 random pairs with |x-y| <= 1 for a in [0,1], l in [-3,3]
        let rng = CounterRng::new(99);
        let mut k = 0;
        for trial in 0..1_000_000u64 {
            let x = 20.0 * (rng.uniform(4 * trial) - 0.5);
            let y = 20.0 * (rng.uniform(4 * trial + 1) - 0.5);
            let ang = std::f64::consts::TAU * rng.uniform(4 * trial + 2);
            let rad = rng.uniform(4 * trial + 3);
            let (dx, dy) = (rad * ang.cos(), rad * ang.sin());
            let a = rng.uniform(trial);
            let ell = 6.0 * (rng.uniform(trial + 1) - 0.5);
            let p = WeightSpec::polynomial(a);
            let e = WeightSpec::exponential(ell);
            let rp = p.eval(x, y) / p.eval(x + dx, y + dy);
            let re = e.eval(x, y) / e.eval(x + dx, y + dy);
            let cp = 2.0_f64.powf(a);
            let ce = ell.abs().exp();
            assert!(rp >= 1.0 / cp - 1e-12 && rp <= cp + 1e-12, "poly ratio {rp} vs C {cp}");
            assert!(re >= 1.0 / ce - 1e-12 && re <= ce + 1e-12, "exp ratio {re} vs C {ce}");
            k += 1;
        }
        assert_eq!(k, 1_000_000);
    }
}
