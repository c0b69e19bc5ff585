//! First-digit extraction, the Benford reference distribution, and the
//! chi-square machinery built on top of it.

use std::fmt;

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of possible leading digits (1 through 9).
pub const DIGIT_COUNT: usize = 9;

/// A leading decimal digit, guaranteed to lie in `1..=9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digit(u8);

impl Digit {
    pub fn new(d: u8) -> Result<Self> {
        if (1..=9).contains(&d) {
            Ok(Digit(d))
        } else {
            Err(Error::InvalidDigit(d))
        }
    }

    /// Digit for histogram slot `i` (0-based, so slot 0 is digit 1).
    pub fn from_index(i: usize) -> Self {
        assert!(i < DIGIT_COUNT, "digit index {i} out of range");
        Digit(i as u8 + 1)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Histogram slot for this digit (0-based).
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = Digit> {
        (1..=9).map(Digit)
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// First digit of a positive, finite amount.
///
/// Scientific notation is normalized away, so the result depends only on the
/// mantissa: `first_digit(5e-3)` is 5.
pub fn first_digit(amount: f64) -> Result<Digit> {
    if !amount.is_finite() || amount <= 0.0 {
        return Err(Error::InvalidAmount(amount));
    }
    // Shortest round-trip formatting always starts the mantissa with a
    // nonzero digit for positive values.
    let repr = format!("{amount:e}");
    for b in repr.bytes() {
        if (b'1'..=b'9').contains(&b) {
            return Ok(Digit(b - b'0'));
        }
    }
    Err(Error::InvalidAmount(amount))
}

/// First digit of a decimal literal such as `"9667"`, `"0.052"` or `"2.16e3"`.
///
/// The digit is read from the text itself, so no value was rounded through a
/// float on the way: the first nonzero digit of the significand wins.
pub fn first_digit_of_str(literal: &str) -> Result<Digit> {
    let s = literal.trim();
    let err = || Error::InvalidAmountLiteral(literal.to_owned());
    let body = match s.strip_prefix('+') {
        Some(rest) => rest,
        None if s.starts_with('-') => return Err(err()),
        None => s,
    };
    // Validate the whole literal before trusting its first byte: a plain
    // decimal, optionally followed by a signed integer exponent.
    let (mantissa, exponent) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, Some(e)),
        None => (body, None),
    };
    let mut saw_dot = false;
    let mut saw_digit = false;
    for b in mantissa.bytes() {
        match b {
            b'0'..=b'9' => saw_digit = true,
            b'.' if !saw_dot => saw_dot = true,
            _ => return Err(err()),
        }
    }
    if !saw_digit {
        return Err(err());
    }
    if let Some(e) = exponent {
        let digits = e.strip_prefix(['+', '-']).unwrap_or(e);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
    }
    mantissa
        .bytes()
        .find(|b| (b'1'..=b'9').contains(b))
        .map(|b| Digit(b - b'0'))
        // Only zeros in the significand: the value is zero no matter the
        // exponent.
        .ok_or_else(err)
}

/// The Benford first-digit distribution, `P(d) = log10(1 + 1/d)`.
#[derive(Debug, Clone)]
pub struct BenfordModel {
    probs: [f64; DIGIT_COUNT],
    cdf: [f64; DIGIT_COUNT],
}

impl BenfordModel {
    pub fn standard() -> Self {
        let mut probs = [0.0; DIGIT_COUNT];
        let mut cdf = [0.0; DIGIT_COUNT];
        let mut acc = 0.0;
        for (i, slot) in probs.iter_mut().enumerate() {
            let d = (i + 1) as f64;
            *slot = (1.0 + 1.0 / d).log10();
            acc += *slot;
            cdf[i] = acc;
        }
        BenfordModel { probs, cdf }
    }

    pub fn probability(&self, d: Digit) -> f64 {
        self.probs[d.index()]
    }

    pub fn probabilities(&self) -> &[f64; DIGIT_COUNT] {
        &self.probs
    }

    /// Smallest digit probability, i.e. `P(9)`.
    pub fn min_probability(&self) -> f64 {
        self.probs[DIGIT_COUNT - 1]
    }

    /// Draw one digit from the distribution by inverting the CDF.
    pub fn sample_digit<R: Rng + ?Sized>(&self, rng: &mut R) -> Digit {
        let r: f64 = rng.gen();
        for (i, &c) in self.cdf.iter().enumerate() {
            if r < c {
                return Digit::from_index(i);
            }
        }
        Digit(9)
    }
}

impl Default for BenfordModel {
    fn default() -> Self {
        BenfordModel::standard()
    }
}

/// Counts of observed first digits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DigitHistogram {
    counts: [u64; DIGIT_COUNT],
}

impl DigitHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: [u64; DIGIT_COUNT]) -> Self {
        DigitHistogram { counts }
    }

    pub fn add(&mut self, d: Digit) {
        self.counts[d.index()] += 1;
    }

    pub fn remove(&mut self, d: Digit) {
        debug_assert!(self.counts[d.index()] > 0);
        self.counts[d.index()] -= 1;
    }

    pub fn merge(&mut self, other: &DigitHistogram) {
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
    }

    pub fn count(&self, d: Digit) -> u64 {
        self.counts[d.index()]
    }

    pub fn counts(&self) -> &[u64; DIGIT_COUNT] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Observed frequencies; all zeros when the histogram is empty.
    pub fn freqs(&self) -> [f64; DIGIT_COUNT] {
        let total = self.total();
        let mut out = [0.0; DIGIT_COUNT];
        if total > 0 {
            for (slot, &c) in out.iter_mut().zip(self.counts.iter()) {
                *slot = c as f64 / total as f64;
            }
        }
        out
    }
}

impl FromIterator<Digit> for DigitHistogram {
    fn from_iter<I: IntoIterator<Item = Digit>>(iter: I) -> Self {
        let mut h = DigitHistogram::new();
        for d in iter {
            h.add(d);
        }
        h
    }
}

impl Serialize for DigitHistogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("DigitHistogram", 2)?;
        s.serialize_field("counts", &self.counts)?;
        s.serialize_field("total", &self.total())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for DigitHistogram {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            counts: [u64; DIGIT_COUNT],
            #[serde(default)]
            total: Option<u64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let hist = DigitHistogram { counts: raw.counts };
        if let Some(total) = raw.total {
            if total != hist.total() {
                return Err(D::Error::custom(format!(
                    "digit histogram total {} does not match counts sum {}",
                    total,
                    hist.total()
                )));
            }
        }
        Ok(hist)
    }
}

/// Histogram of the first digits of a slice of amounts.
pub fn histogram(amounts: &[f64]) -> Result<DigitHistogram> {
    let mut h = DigitHistogram::new();
    for &a in amounts {
        h.add(first_digit(a)?);
    }
    Ok(h)
}

/// Pearson chi-square of an observed digit histogram against a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub sample_count: u64,
    pub per_digit_terms: [f64; DIGIT_COUNT],
    /// True when the histogram was empty; the statistic is 0 by convention.
    pub no_samples: bool,
}

/// `sum_d (X_d - p_d N)^2 / (p_d N)` where `N` is the histogram total.
///
/// An empty histogram yields statistic 0 with `no_samples` set, rather than
/// an error, so callers can treat isolated nodes uniformly.
pub fn chi_square(hist: &DigitHistogram, model: &BenfordModel) -> ChiSquareResult {
    let total = hist.total();
    let mut terms = [0.0; DIGIT_COUNT];
    if total == 0 {
        return ChiSquareResult {
            statistic: 0.0,
            sample_count: 0,
            per_digit_terms: terms,
            no_samples: true,
        };
    }
    let n = total as f64;
    let mut statistic = 0.0;
    for (i, term) in terms.iter_mut().enumerate() {
        let expected = model.probs[i] * n;
        let diff = hist.counts[i] as f64 - expected;
        *term = diff * diff / expected;
        statistic += *term;
    }
    ChiSquareResult {
        statistic,
        sample_count: total,
        per_digit_terms: terms,
        no_samples: false,
    }
}

/// Density-normalized statistic: chi-square divided by the node count of the
/// subgraph the samples came from.
pub fn psi(chi: &ChiSquareResult, node_count: usize) -> Result<f64> {
    if node_count == 0 {
        return Err(Error::InvalidParameter(
            "psi requires a nonempty node set".into(),
        ));
    }
    Ok(chi.statistic / node_count as f64)
}

/// Average-degree threshold above which every digit count concentrates within
/// a `(1 +/- epsilon)` factor of its expectation with high probability:
/// `36 / (P(9) * epsilon^2)`.
pub fn concentration_density_constant(model: &BenfordModel, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(36.0 / (model.min_probability() * epsilon * epsilon))
}

/// Two-sided multiplicative Chernoff bound `2 exp(-epsilon^2 mean / 3)` on
/// the probability that a binomial count leaves `(1 +/- epsilon) * mean`.
pub fn chernoff_bound(mean: f64, epsilon: f64) -> Result<f64> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mean must be positive and finite, got {mean}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(2.0 * (-epsilon * epsilon * mean / 3.0).exp())
}

/// Serializable bundle of a histogram with its chi-square diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistogramStats {
    pub counts: [u64; DIGIT_COUNT],
    pub total: u64,
    pub statistic: f64,
    pub per_digit_terms: [f64; DIGIT_COUNT],
}

impl HistogramStats {
    pub fn new(hist: &DigitHistogram, chi: &ChiSquareResult) -> Self {
        HistogramStats {
            counts: *hist.counts(),
            total: hist.total(),
            statistic: chi.statistic,
            per_digit_terms: chi.per_digit_terms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model() -> BenfordModel {
        BenfordModel::standard()
    }

    /// P(9) computed through an independent algebraic route.
    fn min_prob_oracle() -> f64 {
        1.0 - 9f64.log10()
    }

    #[test]
    fn pmf_matches_closed_form() {
        let m = model();
        assert!((m.probability(Digit::new(1).unwrap()) - 2f64.log10()).abs() < 1e-15);
        assert!((m.probability(Digit::new(1).unwrap()) - std::f64::consts::LOG10_2).abs() < 1e-15);
        assert!((m.min_probability() - min_prob_oracle()).abs() < 1e-15);
        assert!((m.min_probability() - 0.045757490560675115).abs() < 1e-15);
        let sum: f64 = m.probabilities().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        for w in m.probabilities().windows(2) {
            assert!(w[0] > w[1], "pmf must be strictly decreasing");
        }
    }

    #[test]
    fn first_digit_examples() {
        assert_eq!(first_digit(9667.0).unwrap().get(), 9);
        assert_eq!(first_digit(2160.0).unwrap().get(), 2);
        assert_eq!(first_digit(1.0).unwrap().get(), 1);
        assert_eq!(first_digit(0.052).unwrap().get(), 5);
        assert_eq!(first_digit(5e-3).unwrap().get(), 5);
        assert_eq!(first_digit(f64::MIN_POSITIVE).unwrap().get(), 2);
        assert!(matches!(first_digit(0.0), Err(Error::InvalidAmount(_))));
        assert!(matches!(first_digit(-3.0), Err(Error::InvalidAmount(_))));
        assert!(matches!(first_digit(f64::NAN), Err(Error::InvalidAmount(_))));
        assert!(matches!(
            first_digit(f64::INFINITY),
            Err(Error::InvalidAmount(_))
        ));
    }

    #[test]
    fn first_digit_of_str_examples() {
        assert_eq!(first_digit_of_str("9667").unwrap().get(), 9);
        assert_eq!(first_digit_of_str("0.052").unwrap().get(), 5);
        assert_eq!(first_digit_of_str(" 2.16e3 ").unwrap().get(), 2);
        assert_eq!(first_digit_of_str("+0.0009").unwrap().get(), 9);
        assert_eq!(first_digit_of_str("00100").unwrap().get(), 1);
        for bad in ["0", "0.00", "-5", "", ".", "abc", "1x", "--3"] {
            assert!(
                matches!(
                    first_digit_of_str(bad),
                    Err(Error::InvalidAmountLiteral(_))
                ),
                "expected error for {bad:?}"
            );
        }
    }

    #[test]
    fn histogram_counts_and_total() {
        let h = histogram(&[1.0, 10.0, 100.0, 2.0]).unwrap();
        assert_eq!(h.count(Digit::new(1).unwrap()), 3);
        assert_eq!(h.count(Digit::new(2).unwrap()), 1);
        assert_eq!(h.total(), 4);
        let empty = histogram(&[]).unwrap();
        assert_eq!(empty.total(), 0);
        assert_eq!(empty.freqs(), [0.0; DIGIT_COUNT]);
    }

    #[test]
    fn chi_square_all_nines() {
        // 100 samples all showing digit 9. Oracle: with every count massed on
        // the rarest digit, the statistic collapses to N * (1 - p9) / p9.
        let mut counts = [0u64; DIGIT_COUNT];
        counts[8] = 100;
        let chi = chi_square(&DigitHistogram::from_counts(counts), &model());
        let oracle = 100.0 * (1.0 - min_prob_oracle()) / min_prob_oracle();
        assert!((chi.statistic - oracle).abs() / oracle < 1e-12);
        assert!((chi.statistic - 2085.434532678283).abs() < 1e-3);
        assert_eq!(chi.sample_count, 100);
        assert!(!chi.no_samples);
    }

    #[test]
    fn chi_square_all_ones() {
        // 10 samples all showing digit 1: N * (1 - p1) / p1.
        let mut counts = [0u64; DIGIT_COUNT];
        counts[0] = 10;
        let chi = chi_square(&DigitHistogram::from_counts(counts), &model());
        let p1 = 2f64.log10();
        let oracle = 10.0 * (1.0 - p1) / p1;
        assert!((chi.statistic - oracle).abs() / oracle < 1e-12);
        assert!((chi.statistic - 23.2192809).abs() < 1e-6);
    }

    #[test]
    fn chi_square_empty_and_positive() {
        let chi = chi_square(&DigitHistogram::new(), &model());
        assert_eq!(chi.statistic, 0.0);
        assert!(chi.no_samples);
        // Integer counts can never match the irrational expectations exactly,
        // so any nonempty histogram has a strictly positive statistic.
        for d in Digit::all() {
            let h: DigitHistogram = std::iter::repeat_n(d, 7).collect();
            let chi = chi_square(&h, &model());
            assert!(chi.statistic > 0.0);
            assert_eq!(
                chi.statistic,
                chi.per_digit_terms.iter().sum::<f64>(),
                "terms must sum to the statistic"
            );
        }
    }

    #[test]
    fn chi_square_mean_is_eight_under_benford() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut acc = 0.0;
        let reps = 200;
        for _ in 0..reps {
            let h: DigitHistogram = (0..300).map(|_| m.sample_digit(&mut rng)).collect();
            acc += chi_square(&h, &m).statistic;
        }
        let mean = acc / reps as f64;
        assert!(
            (mean - 8.0).abs() < 1.0,
            "mean chi-square {mean} should sit near 8"
        );
    }

    #[test]
    fn psi_divides_by_node_count() {
        let mut counts = [0u64; DIGIT_COUNT];
        counts[8] = 100;
        let chi = chi_square(&DigitHistogram::from_counts(counts), &model());
        let value = psi(&chi, 25).unwrap();
        assert!((value - chi.statistic / 25.0).abs() < 1e-12);
        assert!(matches!(psi(&chi, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn concentration_constant_frozen() {
        let m = model();
        // 36 / (p9 * 0.25) simplifies to 144 / p9.
        let oracle = 144.0 / min_prob_oracle();
        let got = concentration_density_constant(&m, 0.5).unwrap();
        assert!((got - oracle).abs() / oracle < 1e-12);
        assert!(got > 3000.0 && got < 3300.0);
        assert!(concentration_density_constant(&m, 0.0).is_err());
        assert!(concentration_density_constant(&m, 1.0).is_err());
    }

    #[test]
    fn chernoff_bound_frozen() {
        // epsilon^2 * mean = 3 makes the exponent exactly -1.
        let got = chernoff_bound(12.0, 0.5).unwrap();
        let oracle = 2.0 * (-1.0f64).exp();
        assert!((got - oracle).abs() < 1e-15);
        assert!((got - 0.7357588823428847).abs() < 1e-12);
        assert!(chernoff_bound(0.0, 0.5).is_err());
        assert!(chernoff_bound(3.0, 1.5).is_err());
        // The bound is trivially at most 2.
        assert!(chernoff_bound(1e-12, 1e-9).unwrap() <= 2.0);
    }

    #[test]
    fn sample_digit_tracks_pmf() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let h: DigitHistogram = (0..200_000).map(|_| m.sample_digit(&mut rng)).collect();
        let freqs = h.freqs();
        for (i, p) in m.probabilities().iter().enumerate() {
            assert!(
                (freqs[i] - p).abs() < 0.005,
                "digit {} freq {} vs pmf {}",
                i + 1,
                freqs[i],
                p
            );
        }
    }

    #[test]
    fn histogram_serde_round_trip() {
        let h = DigitHistogram::from_counts([3, 0, 1, 0, 0, 0, 0, 0, 2]);
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"total\":6"));
        let back: DigitHistogram = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
        let bad = r#"{"counts":[1,0,0,0,0,0,0,0,0],"total":5}"#;
        assert!(serde_json::from_str::<DigitHistogram>(bad).is_err());
    }

    proptest! {
        #[test]
        fn string_digits_are_scale_invariant(mantissa in 1u64..=999_999u64, shift in 0u32..6) {
            let base = format!("0.{mantissa:06}");
            let shifted = format!("{base}e{shift}");
            let a = first_digit_of_str(&base).unwrap();
            let b = first_digit_of_str(&shifted).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn integer_digits_survive_decimal_shifts(k in 1u64..1_000_000u64) {
            // Multiplying by ten is exact for small integers, so the digit
            // cannot move.
            let a = first_digit(k as f64).unwrap();
            let b = first_digit((k * 10) as f64).unwrap();
            let c = first_digit((k * 1000) as f64).unwrap();
            prop_assert_eq!(a, b);
            prop_assert_eq!(a, c);
        }

        #[test]
        fn chi_square_doubles_exactly(counts in proptest::array::uniform9(0u64..50)) {
            let h = DigitHistogram::from_counts(counts);
            prop_assume!(h.total() > 0);
            let doubled = DigitHistogram::from_counts(counts.map(|c| c * 2));
            let m = model();
            let a = chi_square(&h, &m).statistic;
            let b = chi_square(&doubled, &m).statistic;
            // Both N and every count scale by 2, so each term scales by 2
            // with no rounding: the ratio is exact in floating point.
            prop_assert_eq!(2.0 * a, b);
        }

        #[test]
        fn float_and_string_paths_agree(mantissa in 1u64..=99_999u64, exp in -3i32..6) {
            let literal = format!("{mantissa}e{exp}");
            let via_str = first_digit_of_str(&literal).unwrap();
            let via_f64 = first_digit(literal.parse::<f64>().unwrap()).unwrap();
            prop_assert_eq!(via_str, via_f64);
        }
    }
}
