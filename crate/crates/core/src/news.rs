//! Exogenous news events and their effect on demand utilities and supplier
//! prices.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewsScope {
    Macro,
    Category,
    Product,
    Neutral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewsSide {
    Demand,
    Supply,
    Both,
}

impl NewsSide {
    const ALL: [NewsSide; 3] = [NewsSide::Demand, NewsSide::Supply, NewsSide::Both];

    fn affects_demand(self) -> bool {
        matches!(self, NewsSide::Demand | NewsSide::Both)
    }

    fn affects_supply(self) -> bool {
        matches!(self, NewsSide::Supply | NewsSide::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewsEvent {
    pub event_id: u64,
    pub scope: NewsScope,
    /// Category id for category scope, SKU id for product scope.
    pub target: Option<String>,
    pub side: NewsSide,
    pub sign: i8,
    pub magnitude: f64,
    pub text: String,
    pub ttl: u32,
    pub created_day: u32,
}

impl NewsEvent {
    pub fn covers(&self, catalog: &Catalog, j: usize) -> bool {
        match self.scope {
            NewsScope::Macro => true,
            NewsScope::Neutral => false,
            NewsScope::Category => {
                self.target.as_deref() == Some(catalog.categories()[catalog.category_index(j)].as_str())
            }
            NewsScope::Product => self.target.as_deref() == Some(catalog.sku(j).sku_id.as_str()),
        }
    }

    fn signed_magnitude(&self) -> f64 {
        f64::from(self.sign) * self.magnitude
    }
}

/// Per-scope values keyed the way environment configs name them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScopeWeights {
    pub neutral: f64,
    pub single_category: f64,
    pub macro_all: f64,
    pub sku_level: f64,
}

impl ScopeWeights {
    pub fn get(&self, scope: NewsScope) -> f64 {
        match scope {
            NewsScope::Neutral => self.neutral,
            NewsScope::Category => self.single_category,
            NewsScope::Macro => self.macro_all,
            NewsScope::Product => self.sku_level,
        }
    }

    fn values(&self) -> [f64; 4] {
        [self.neutral, self.single_category, self.macro_all, self.sku_level]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewsConfig {
    pub enabled: bool,
    pub daily_count: u32,
    pub base_scale: f64,
    pub sample_ratios: ScopeWeights,
    pub mode_weights: ScopeWeights,
    /// Seed for the news stream; the master seed is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for NewsConfig {
    fn default() -> Self {
        NewsConfig {
            enabled: false,
            daily_count: 20,
            base_scale: 0.4,
            sample_ratios: ScopeWeights {
                neutral: 0.9,
                single_category: 0.02,
                macro_all: 0.03,
                sku_level: 0.05,
            },
            mode_weights: ScopeWeights {
                neutral: 0.0,
                single_category: 1.0,
                macro_all: 1.0,
                sku_level: 1.2,
            },
            seed: None,
        }
    }
}

impl NewsConfig {
    pub fn validate(&self) -> Result<()> {
        let ratios = self.sample_ratios.values();
        if ratios
            .iter()
            .chain(self.mode_weights.values().iter())
            .any(|w| !(*w >= 0.0))
        {
            return Err(Error::Config("news ratios and weights must be non-negative".into()));
        }
        let total: f64 = ratios.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("news sample ratios sum to {total}, expected 1")));
        }
        if self.mode_weights.neutral != 0.0 {
            return Err(Error::Config("neutral news must carry zero impact weight".into()));
        }
        if !(self.base_scale >= 0.0) {
            return Err(Error::Config("news base scale must be non-negative".into()));
        }
        Ok(())
    }
}

fn sample_scope(ratios: &ScopeWeights, rng: &mut StreamRng) -> NewsScope {
    let u: f64 = rng.random();
    let order = [
        (NewsScope::Neutral, ratios.neutral),
        (NewsScope::Category, ratios.single_category),
        (NewsScope::Macro, ratios.macro_all),
        (NewsScope::Product, ratios.sku_level),
    ];
    let mut acc = 0.0;
    for (scope, w) in order {
        acc += w;
        if u < acc {
            return scope;
        }
    }
    // Rounding slack in the cumulative sum: fall back to the last scope with
    // non-zero weight.
    order
        .iter()
        .rev()
        .find(|(_, w)| *w > 0.0)
        .map(|(s, _)| *s)
        .unwrap_or(NewsScope::Neutral)
}

const NEUTRAL_TEXTS: [&str; 4] = [
    "Local community fair scheduled for the weekend draws routine coverage.",
    "Regional weather service expects seasonal conditions to continue.",
    "City council reviews parking arrangements near the shopping district.",
    "Industry newsletter profiles long-serving store employees.",
];

fn render_text(scope: NewsScope, target: Option<&str>, side: NewsSide, sign: i8, rng: &mut StreamRng) -> String {
    if scope == NewsScope::Neutral {
        return NEUTRAL_TEXTS[rng.random_range(0..NEUTRAL_TEXTS.len())].to_string();
    }
    let subject = match (scope, target) {
        (NewsScope::Category, Some(cat)) => format!("the {} category", cat.replace('_', " ")),
        (NewsScope::Product, Some(sku)) => format!("product {sku}"),
        _ => "the grocery market as a whole".to_string(),
    };
    match (side, sign > 0) {
        (NewsSide::Demand, true) => format!("Analysts report rising consumer interest in {subject}."),
        (NewsSide::Demand, false) => format!("Shoppers are pulling back on purchases in {subject}."),
        (NewsSide::Supply, true) => format!("Producers warn of higher wholesale costs affecting {subject}."),
        (NewsSide::Supply, false) => format!("Wholesale costs ease as supply improves for {subject}."),
        (NewsSide::Both, true) => format!("Surging popularity strains supply and lifts costs across {subject}."),
        (NewsSide::Both, false) => format!("Weak sentiment and a supply glut weigh on {subject}."),
    }
}

/// Draws exactly `config.daily_count` events for `day`, consuming only `rng`.
pub fn generate_daily_news(
    day: u32,
    config: &NewsConfig,
    catalog: &Catalog,
    next_event_id: &mut u64,
    rng: &mut StreamRng,
) -> Result<Vec<NewsEvent>> {
    if !config.enabled {
        return Err(Error::NewsDisabled);
    }
    let mut out = Vec::with_capacity(config.daily_count as usize);
    for _ in 0..config.daily_count {
        let scope = sample_scope(&config.sample_ratios, rng);
        let (target, side, sign, magnitude) = if scope == NewsScope::Neutral {
            (None, NewsSide::Demand, 1, 0.0)
        } else {
            let sign: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
            let side = NewsSide::ALL[rng.random_range(0..3)];
            let target = match scope {
                NewsScope::Category => {
                    Some(catalog.categories()[rng.random_range(0..catalog.categories().len())].clone())
                }
                NewsScope::Product => Some(catalog.sku(rng.random_range(0..catalog.len())).sku_id.clone()),
                _ => None,
            };
            // u in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            let magnitude = config.base_scale * config.mode_weights.get(scope) * u;
            (target, side, sign, magnitude)
        };
        let ttl = rng.random_range(1..=7);
        let text = render_text(scope, target.as_deref(), side, sign, rng);
        out.push(NewsEvent {
            event_id: *next_event_id,
            scope,
            target,
            side,
            sign,
            magnitude,
            text,
            ttl,
            created_day: day,
        });
        *next_event_id += 1;
    }
    Ok(out)
}

/// Sum of `sign * magnitude` over active demand-side events covering SKU `j`.
pub fn demand_delta(catalog: &Catalog, j: usize, active: &[NewsEvent]) -> f64 {
    active
        .iter()
        .filter(|e| e.side.affects_demand() && e.covers(catalog, j))
        .map(NewsEvent::signed_magnitude)
        .sum()
}

/// Product of `(1 + sign * magnitude)`, each factor floored at 0.05, over
/// supply-side events covering SKU `j`. Scope never singles out a supplier, so
/// every supplier of the SKU sees the same factor.
pub fn supply_multiplier(catalog: &Catalog, j: usize, _supplier_id: &str, active: &[NewsEvent]) -> f64 {
    active
        .iter()
        .filter(|e| e.side.affects_supply() && e.covers(catalog, j))
        .map(|e| (1.0 + e.signed_magnitude()).max(0.05))
        .product()
}

/// Decrements every TTL and drops events that reach zero.
pub fn tick_ttl(active: Vec<NewsEvent>) -> Vec<NewsEvent> {
    active
        .into_iter()
        .filter_map(|mut e| {
            e.ttl = e.ttl.saturating_sub(1);
            (e.ttl > 0).then_some(e)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate_synthetic_catalog, CatalogConfig};
    use crate::rng::stream_from_seed;

    fn catalog() -> Catalog {
        let cfg = CatalogConfig {
            categories: vec!["A".into(), "B".into()],
            skus_per_category: 3,
            ..CatalogConfig::default()
        };
        generate_synthetic_catalog(&cfg, 3).unwrap()
    }

    fn event(scope: NewsScope, target: Option<&str>, side: NewsSide, sign: i8, magnitude: f64) -> NewsEvent {
        NewsEvent {
            event_id: 0,
            scope,
            target: target.map(str::to_string),
            side,
            sign,
            magnitude,
            text: String::new(),
            ttl: 3,
            created_day: 1,
        }
    }

    fn hard() -> NewsConfig {
        NewsConfig {
            enabled: true,
            ..NewsConfig::default()
        }
    }

    #[test]
    fn hard_config_emits_daily_count() {
        let cat = catalog();
        let mut id = 0;
        let events = generate_daily_news(1, &hard(), &cat, &mut id, &mut stream_from_seed(42, "news")).unwrap();
        assert_eq!(events.len(), 20);
        assert_eq!(id, 20);
        for e in &events {
            assert!((1..=7).contains(&e.ttl));
            match e.scope {
                NewsScope::Neutral => {
                    assert_eq!(e.magnitude, 0.0);
                    assert!(e.target.is_none());
                }
                NewsScope::Macro => assert!(e.target.is_none()),
                NewsScope::Category => assert!(cat.category_position(e.target.as_ref().unwrap()).is_some()),
                NewsScope::Product => assert!(cat.index_of(e.target.as_ref().unwrap()).is_some()),
            }
            assert!(e.magnitude <= 0.4 * 1.2);
        }
    }

    #[test]
    fn disabled_news_errors() {
        let cat = catalog();
        let mut id = 0;
        let err = generate_daily_news(
            1,
            &NewsConfig::default(),
            &cat,
            &mut id,
            &mut stream_from_seed(1, "news"),
        );
        assert!(matches!(err, Err(Error::NewsDisabled)));
    }

    #[test]
    fn neutral_share_statistics() {
        let cat = catalog();
        let cfg = NewsConfig {
            daily_count: 10_000,
            ..hard()
        };
        let mut id = 0;
        let events = generate_daily_news(1, &cfg, &cat, &mut id, &mut stream_from_seed(42, "news")).unwrap();
        let neutral = events.iter().filter(|e| e.scope == NewsScope::Neutral).count() as f64;
        let n = events.len() as f64;
        let sd = (n * 0.9 * 0.1).sqrt();
        assert!((neutral - 0.9 * n).abs() < 3.0 * sd, "neutral {neutral}");
        assert_eq!(cfg.mode_weights.get(NewsScope::Neutral), 0.0);
    }

    #[test]
    fn demand_delta_fixtures() {
        let cat = catalog();
        assert_eq!(demand_delta(&cat, 0, &[]), 0.0);
        let macro_up = event(NewsScope::Macro, None, NewsSide::Demand, 1, 0.2);
        for j in 0..cat.len() {
            assert_eq!(demand_delta(&cat, j, std::slice::from_ref(&macro_up)), 0.2);
        }
        let x = cat.sku(0).sku_id.clone();
        let cat_x = cat.sku(0).category_id.clone();
        let events = [
            event(NewsScope::Product, Some(&x), NewsSide::Demand, -1, 0.1),
            event(NewsScope::Category, Some(&cat_x), NewsSide::Both, -1, 0.1),
        ];
        assert!((demand_delta(&cat, 0, &events) + 0.2).abs() < 1e-12);
        assert!((demand_delta(&cat, 1, &events) + 0.1).abs() < 1e-12);
        assert_eq!(demand_delta(&cat, 3, &events), 0.0);
        // supply-only events never touch demand
        let supply = event(NewsScope::Macro, None, NewsSide::Supply, 1, 0.3);
        assert_eq!(demand_delta(&cat, 0, &[supply]), 0.0);
    }

    #[test]
    fn supply_multiplier_fixtures() {
        let cat = catalog();
        assert_eq!(supply_multiplier(&cat, 0, "s", &[]), 1.0);
        let up = event(NewsScope::Macro, None, NewsSide::Supply, 1, 0.4);
        assert!((supply_multiplier(&cat, 0, "s", &[up]) - 1.4).abs() < 1e-12);
        let a = event(NewsScope::Macro, None, NewsSide::Both, 1, 0.1);
        let b = event(NewsScope::Macro, None, NewsSide::Supply, -1, 0.1);
        assert!((supply_multiplier(&cat, 0, "s", &[a, b]) - 0.99).abs() < 1e-12);
        let crash = event(NewsScope::Macro, None, NewsSide::Supply, -1, 3.0);
        assert_eq!(supply_multiplier(&cat, 0, "s", &[crash]), 0.05);
        let neutral = event(NewsScope::Neutral, None, NewsSide::Both, 1, 0.0);
        assert_eq!(supply_multiplier(&cat, 0, "s", &[neutral]), 1.0);
    }

    #[test]
    fn ttl_ticks() {
        let mut one = event(NewsScope::Macro, None, NewsSide::Demand, 1, 0.1);
        one.ttl = 1;
        assert!(tick_ttl(vec![one]).is_empty());
        let mut seven = event(NewsScope::Macro, None, NewsSide::Demand, 1, 0.1);
        seven.ttl = 7;
        let mut active = vec![seven];
        for _ in 0..6 {
            active = tick_ttl(active);
            assert_eq!(active.len(), 1);
        }
        assert!(tick_ttl(active).is_empty());
        assert!(tick_ttl(Vec::new()).is_empty());
    }

    #[test]
    fn ratios_must_sum_to_one() {
        let mut cfg = hard();
        cfg.sample_ratios.neutral = 0.5;
        assert!(cfg.validate().is_err());
        assert!(hard().validate().is_ok());
    }
}
