//! Customer traffic, logit utilities, choice probabilities and realised demand.

use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::money::Money;
use crate::news::{self, NewsEvent};
use crate::reviews::{self, RatingAggregate};
use crate::rng::{fork, StreamRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficConfig {
    pub base: f64,
    /// Multipliers indexed Monday = 0 .. Sunday = 6.
    pub weekday_factors: [f64; 7],
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            base: 500.0,
            weekday_factors: [1.0, 1.0, 1.0, 1.0, 1.0, 1.3, 1.5],
        }
    }
}

impl TrafficConfig {
    pub fn expected(&self, weekday: usize) -> f64 {
        self.base * self.weekday_factors[weekday % 7]
    }

    pub fn weekly_mean(&self) -> f64 {
        self.base * self.weekday_factors.iter().sum::<f64>() / 7.0
    }
}

/// Draws the day's customer count from `Poisson(base * weekday_factor)`.
/// Consumes exactly one word pair from `rng`.
pub fn sample_traffic(weekday: usize, config: &TrafficConfig, rng: &mut StreamRng) -> u64 {
    let mut draw = fork(rng);
    let lambda = config.expected(weekday);
    if !(lambda > 0.0) {
        return 0;
    }
    let poisson = Poisson::new(lambda).expect("positive finite rate");
    poisson.sample(&mut draw) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityVector {
    pub raw: Vec<f64>,
    pub delta_reviews: Vec<f64>,
    pub delta_news: Vec<f64>,
    pub substitution: Vec<f64>,
    pub augmented: Vec<f64>,
}

/// Utilities with review and news shifts supplied directly.
///
/// The substitution term is a single pass over the base utilities
/// (raw + review + news); the idiosyncratic shock is absorbed into the logit.
pub fn utilities_from_deltas(
    catalog: &Catalog,
    prices: &[Money],
    delta_reviews: &[f64],
    delta_news: &[f64],
) -> UtilityVector {
    let params = catalog.demand();
    let n = catalog.len();
    let raw: Vec<f64> = (0..n)
        .map(|j| {
            params.alpha[j] + params.beta[j] * prices[j].to_f64() + params.category_effect[catalog.category_index(j)]
        })
        .collect();
    let base: Vec<f64> = (0..n).map(|j| raw[j] + delta_reviews[j] + delta_news[j]).collect();
    let exp_base: Vec<f64> = base.iter().map(|u| u.exp()).collect();
    let substitution: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| i != j)
                .map(|i| params.gamma(j, i) * exp_base[i])
                .sum()
        })
        .collect();
    let augmented = (0..n).map(|j| base[j] + substitution[j]).collect();
    UtilityVector {
        raw,
        delta_reviews: delta_reviews.to_vec(),
        delta_news: delta_news.to_vec(),
        substitution,
        augmented,
    }
}

pub fn compute_utilities(
    catalog: &Catalog,
    prices: &[Money],
    ratings: &[RatingAggregate],
    review_weight: f64,
    active_news: &[NewsEvent],
) -> Result<UtilityVector> {
    if prices.len() != catalog.len() {
        return Err(Error::Validation("one price per SKU required".into()));
    }
    if let Some(j) = prices.iter().position(|p| !p.is_positive()) {
        return Err(Error::Validation(format!(
            "price of {} must be positive, got {}",
            catalog.sku(j).sku_id,
            prices[j]
        )));
    }
    let delta_reviews: Vec<f64> = ratings
        .iter()
        .map(|r| reviews::review_delta(r, review_weight))
        .collect();
    let delta_news: Vec<f64> = (0..catalog.len())
        .map(|j| news::demand_delta(catalog, j, active_news))
        .collect();
    Ok(utilities_from_deltas(catalog, prices, &delta_reviews, &delta_news))
}

/// Logit choice probabilities against an outside option of utility zero.
pub fn choice_probabilities(u: &UtilityVector) -> Vec<f64> {
    probabilities_from_utilities(&u.augmented)
}

pub fn probabilities_from_utilities(utilities: &[f64]) -> Vec<f64> {
    let (weights, outside) = stabilized_weights(utilities);
    let denom = outside + weights.iter().sum::<f64>();
    weights.into_iter().map(|w| w / denom).collect()
}

pub fn outside_probability(utilities: &[f64]) -> f64 {
    let (weights, outside) = stabilized_weights(utilities);
    outside / (outside + weights.iter().sum::<f64>())
}

// Shift by max(0, max u) so no exponent is positive.
fn stabilized_weights(utilities: &[f64]) -> (Vec<f64>, f64) {
    let shift = utilities.iter().copied().fold(0.0_f64, f64::max);
    let weights = utilities.iter().map(|u| (u - shift).exp()).collect();
    (weights, (-shift).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandOutcome {
    pub traffic: u64,
    pub probabilities: Vec<f64>,
    pub potential: Vec<u64>,
    pub sold: Vec<u64>,
    pub stockout: Vec<bool>,
}

/// Draws `Binomial(traffic, p_j)` potential demand per SKU in catalog order and
/// caps it by sellable stock. Advances `rng` by one word pair per SKU.
pub fn realize_demand(
    traffic: u64,
    probabilities: &[f64],
    onhand_sellable: &[u64],
    rng: &mut StreamRng,
) -> DemandOutcome {
    let potential: Vec<u64> = probabilities
        .iter()
        .map(|&p| {
            let mut draw = fork(rng);
            let p = p.clamp(0.0, 1.0);
            Binomial::new(traffic, p)
                .expect("probability in [0, 1]")
                .sample(&mut draw)
        })
        .collect();
    let sold = potential.iter().zip(onhand_sellable).map(|(&y, &h)| y.min(h)).collect();
    let stockout = potential.iter().zip(onhand_sellable).map(|(&y, &h)| y > h).collect();
    DemandOutcome {
        traffic,
        probabilities: probabilities.to_vec(),
        potential,
        sold,
        stockout,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{DemandParams, SkuSpec};
    use crate::rng::stream_from_seed;

    fn catalog(alpha: &[f64], beta: &[f64], gamma: f64, categories: &[usize], effect: f64) -> Catalog {
        let n = alpha.len();
        let ncat = categories.iter().max().unwrap() + 1;
        let skus = (0..n)
            .map(|j| SkuSpec {
                sku_id: format!("S{j}"),
                description: String::new(),
                category_id: format!("C{}", categories[j]),
                shelf_life_days: 10,
                base_price: Money::from_units(2),
                reference_cost: Money::from_units(1),
            })
            .collect();
        let mut g = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                if i != j && categories[i] == categories[j] {
                    g[j * n + i] = gamma;
                }
            }
        }
        Catalog::new(
            skus,
            (0..ncat).map(|c| format!("C{c}")).collect(),
            DemandParams {
                alpha: alpha.to_vec(),
                beta: beta.to_vec(),
                gamma: g,
                category_effect: vec![effect; ncat],
            },
        )
        .unwrap()
    }

    #[test]
    fn single_sku_arithmetic() {
        let cat = catalog(&[-1.0], &[-0.5], 0.0, &[0], 0.0);
        let u = utilities_from_deltas(&cat, &[Money::from_units(2)], &[0.0], &[0.0]);
        assert_eq!(u.raw, vec![-2.0]);
        assert_eq!(u.substitution, vec![0.0]);
        assert_eq!(u.augmented, vec![-2.0]);
    }

    #[test]
    fn substitution_single_pass() {
        // alpha = 1, beta = -0.5, price 2 => base utility 0
        let cat = catalog(&[1.0, 1.0], &[-0.5, -0.5], -0.01, &[0, 0], 0.0);
        let prices = [Money::from_units(2); 2];
        let u = utilities_from_deltas(&cat, &prices, &[0.0; 2], &[0.0; 2]);
        assert_eq!(u.substitution, vec![-0.01, -0.01]);
        assert_eq!(u.augmented, vec![-0.01, -0.01]);
    }

    #[test]
    fn category_effect_shifts_raw() {
        let with = catalog(&[-1.0, -2.0], &[-0.3, -0.4], 0.0, &[0, 1], -0.2);
        let without = catalog(&[-1.0, -2.0], &[-0.3, -0.4], 0.0, &[0, 1], 0.0);
        let prices = [Money::from_units(2); 2];
        let a = utilities_from_deltas(&with, &prices, &[0.0; 2], &[0.0; 2]);
        let b = utilities_from_deltas(&without, &prices, &[0.0; 2], &[0.0; 2]);
        for j in 0..2 {
            assert!((a.raw[j] - b.raw[j] + 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_positive_price() {
        let cat = catalog(&[-1.0], &[-0.5], 0.0, &[0], 0.0);
        let agg = [RatingAggregate::empty("S0")];
        let err = compute_utilities(&cat, &[Money::ZERO], &agg, 0.5, &[]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn probabilities_fixtures() {
        assert_eq!(probabilities_from_utilities(&[0.0]), vec![0.5]);
        let p = probabilities_from_utilities(&[0.0; 96]);
        for x in p {
            assert!((x - 1.0 / 97.0).abs() < 1e-12);
        }
        // Oracle: direct unshifted evaluation of e/(2+e) and 1/(2+e).
        let e = std::f64::consts::E;
        let p = probabilities_from_utilities(&[1.0, 0.0]);
        assert!((p[0] - e / (2.0 + e)).abs() < 1e-15);
        assert!((p[1] - 1.0 / (2.0 + e)).abs() < 1e-15);
        assert!((p[0] - 0.5761).abs() < 1e-4 && (p[1] - 0.2119).abs() < 1e-4);
    }

    #[test]
    fn large_utilities_stay_finite() {
        let p = probabilities_from_utilities(&[800.0, 799.0]);
        assert!(p.iter().all(|x| x.is_finite()));
        let total: f64 = p.iter().sum::<f64>() + outside_probability(&[800.0, 799.0]);
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn traffic_zero_means_no_demand() {
        let mut rng = stream_from_seed(1, "demand");
        let out = realize_demand(0, &[0.3, 0.2], &[0, 0], &mut rng);
        assert_eq!(out.potential, vec![0, 0]);
        assert_eq!(out.stockout, vec![false, false]);
    }

    #[test]
    fn zero_probability_means_no_demand() {
        let mut rng = stream_from_seed(1, "demand");
        let out = realize_demand(1000, &[0.0, 0.5], &[10, 10], &mut rng);
        assert_eq!(out.potential[0], 0);
        assert!(out.stockout[1]);
        assert_eq!(out.sold[1], 10);
    }

    #[test]
    fn demand_draws_are_one_word_pair_per_sku() {
        let mut rng = stream_from_seed(3, "demand");
        realize_demand(500, &[0.1; 25], &[0; 25], &mut rng);
        assert_eq!(rng.get_word_pos(), 50);
    }

    #[test]
    fn capped_binomial_statistics() {
        let mut rng = stream_from_seed(42, "demand");
        let trials = 1000;
        let mut total = 0u64;
        for _ in 0..trials {
            let out = realize_demand(1000, &[0.1], &[50], &mut rng);
            assert_eq!(out.sold[0], out.potential[0].min(50));
            assert_eq!(out.stockout[0], out.potential[0] > 50);
            total += out.potential[0];
        }
        let mean = total as f64 / trials as f64;
        // Binomial(1000, 0.1): sd 9.487 per draw, standard error over 1000 trials.
        let se = (1000.0_f64 * 0.1 * 0.9).sqrt() / (trials as f64).sqrt();
        assert!((mean - 100.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn traffic_statistics_and_determinism() {
        let cfg = TrafficConfig::default();
        let mut rng = stream_from_seed(42, "traffic");
        let draws = 10_000;
        let weekday = 6;
        let lambda = cfg.expected(weekday);
        let mean = (0..draws)
            .map(|_| sample_traffic(weekday, &cfg, &mut rng) as f64)
            .sum::<f64>()
            / draws as f64;
        let se = (lambda / draws as f64).sqrt();
        assert!((mean - lambda).abs() < 3.0 * se, "mean {mean} vs {lambda}");

        let a = sample_traffic(0, &cfg, &mut stream_from_seed(5, "traffic"));
        let b = sample_traffic(0, &cfg, &mut stream_from_seed(5, "traffic"));
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_traffic_is_mostly_zero() {
        let cfg = TrafficConfig {
            base: 0.001,
            weekday_factors: [1.0; 7],
        };
        let mut rng = stream_from_seed(2, "traffic");
        let zeros = (0..10_000).filter(|_| sample_traffic(0, &cfg, &mut rng) == 0).count();
        // P(N = 0) = e^-0.001 ~ 0.999; expect about 10 non-zero draws.
        assert!(zeros >= 9_980, "zeros {zeros}");
    }
}
