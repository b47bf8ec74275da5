//! Product universe: SKUs, categories and demand parameters.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::demand;
use crate::error::{Error, Result};
use crate::money::Money;
use crate::rng::{stream_from_seed, StreamRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkuSpec {
    pub sku_id: String,
    pub description: String,
    pub category_id: String,
    pub shelf_life_days: u32,
    pub base_price: Money,
    /// Mean supplier base cost; filled in by supplier generation.
    pub reference_cost: Money,
}

/// Logit demand parameters, indexed by catalog position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandParams {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Dense `n x n` row-major substitution matrix, `gamma[j * n + i]`.
    pub gamma: Vec<f64>,
    /// Additive utility shift per category, indexed like `Catalog::categories`.
    pub category_effect: Vec<f64>,
}

impl DemandParams {
    pub fn gamma(&self, j: usize, i: usize) -> f64 {
        self.gamma[j * self.alpha.len() + i]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CatalogParts", into = "CatalogParts")]
pub struct Catalog {
    skus: Vec<SkuSpec>,
    categories: Vec<String>,
    demand: DemandParams,
    sku_index: HashMap<String, usize>,
    category_of: Vec<usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct CatalogParts {
    skus: Vec<SkuSpec>,
    categories: Vec<String>,
    demand: DemandParams,
}

impl TryFrom<CatalogParts> for Catalog {
    type Error = Error;
    fn try_from(p: CatalogParts) -> Result<Self> {
        Catalog::new(p.skus, p.categories, p.demand)
    }
}

impl From<Catalog> for CatalogParts {
    fn from(c: Catalog) -> Self {
        CatalogParts {
            skus: c.skus,
            categories: c.categories,
            demand: c.demand,
        }
    }
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        self.skus == other.skus && self.categories == other.categories && self.demand == other.demand
    }
}

impl Catalog {
    pub fn new(skus: Vec<SkuSpec>, categories: Vec<String>, demand: DemandParams) -> Result<Self> {
        let n = skus.len();
        if demand.alpha.len() != n || demand.beta.len() != n || demand.gamma.len() != n * n {
            return Err(Error::Validation(
                "demand parameter dimensions do not match SKU count".into(),
            ));
        }
        if demand.category_effect.len() != categories.len() {
            return Err(Error::Validation("one category effect per category required".into()));
        }
        let mut sku_index = HashMap::with_capacity(n);
        let mut category_of = Vec::with_capacity(n);
        for (j, sku) in skus.iter().enumerate() {
            if sku_index.insert(sku.sku_id.clone(), j).is_some() {
                return Err(Error::Validation(format!("duplicate sku_id {}", sku.sku_id)));
            }
            let cat = categories.iter().position(|c| *c == sku.category_id).ok_or_else(|| {
                Error::Validation(format!("sku {} has unknown category {}", sku.sku_id, sku.category_id))
            })?;
            category_of.push(cat);
            if sku.shelf_life_days < 1 {
                return Err(Error::Validation(format!("sku {} shelf life must be >= 1", sku.sku_id)));
            }
            if !sku.base_price.is_positive() {
                return Err(Error::Validation(format!("sku {} base price must be > 0", sku.sku_id)));
            }
            if !(demand.beta[j] < 0.0) {
                return Err(Error::Validation(format!(
                    "sku {} price sensitivity must be negative",
                    sku.sku_id
                )));
            }
        }
        for j in 0..n {
            for i in 0..n {
                let g = demand.gamma[j * n + i];
                if g != 0.0 && (i == j || category_of[i] != category_of[j]) {
                    return Err(Error::Validation(
                        "substitution only allowed between distinct SKUs of one category".into(),
                    ));
                }
            }
        }
        Ok(Catalog {
            skus,
            categories,
            demand,
            sku_index,
            category_of,
        })
    }

    pub fn len(&self) -> usize {
        self.skus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skus.is_empty()
    }

    pub fn skus(&self) -> &[SkuSpec] {
        &self.skus
    }

    pub fn sku(&self, j: usize) -> &SkuSpec {
        &self.skus[j]
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn demand(&self) -> &DemandParams {
        &self.demand
    }

    pub fn index_of(&self, sku_id: &str) -> Option<usize> {
        self.sku_index.get(sku_id).copied()
    }

    pub fn category_index(&self, j: usize) -> usize {
        self.category_of[j]
    }

    pub fn category_position(&self, category_id: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category_id)
    }

    pub fn base_prices(&self) -> Vec<Money> {
        self.skus.iter().map(|s| s.base_price).collect()
    }

    pub(crate) fn set_reference_cost(&mut self, j: usize, cost: Money) {
        self.skus[j].reference_cost = cost;
    }
}

/// Parameters of catalog construction.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogConfig {
    pub categories: Vec<String>,
    pub skus_per_category: u32,
    /// When set, overrides `skus_per_category`; SKUs are spread as evenly as
    /// possible with the remainder going to the first categories.
    pub total_skus: Option<u32>,
    pub category_effect: f64,
    pub gamma: f64,
    pub alpha_range: (f64, f64),
    pub beta_range: (f64, f64),
    pub shelf_life_range: (u32, u32),
    pub base_price_range: (f64, f64),
}

impl Default for CatalogConfig {
    fn default() -> Self {
        CatalogConfig {
            categories: Vec::new(),
            skus_per_category: 5,
            total_skus: None,
            category_effect: 0.0,
            gamma: -0.01,
            alpha_range: (-4.5, -3.0),
            beta_range: (-0.8, -0.2),
            shelf_life_range: (7, 60),
            base_price_range: (0.5, 8.0),
        }
    }
}

impl CatalogConfig {
    pub fn skus_in_category(&self) -> Vec<u32> {
        let k = self.categories.len() as u32;
        match self.total_skus {
            Some(total) if k > 0 => (0..k).map(|c| total / k + u32::from(c < total % k)).collect(),
            _ => vec![self.skus_per_category; k as usize],
        }
    }

    fn check(&self) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::Config("catalog needs at least one category".into()));
        }
        if self.skus_in_category().contains(&0) {
            return Err(Error::Config("every category needs at least one SKU".into()));
        }
        let (a, b) = self.beta_range;
        if a > b || b >= 0.0 {
            return Err(Error::Config("beta range must be strictly negative".into()));
        }
        let (lo, hi) = self.shelf_life_range;
        if lo < 1 || lo > hi {
            return Err(Error::Config("invalid shelf life range".into()));
        }
        let (lo, hi) = self.base_price_range;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::Config("invalid base price range".into()));
        }
        Ok(())
    }
}

fn substitution_matrix(category_of: &[usize], gamma: f64) -> Vec<f64> {
    let n = category_of.len();
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            if i != j && category_of[i] == category_of[j] {
                out[j * n + i] = gamma;
            }
        }
    }
    out
}

fn draw_alpha_beta(rng: &mut StreamRng, config: &CatalogConfig) -> (f64, f64) {
    let alpha = rng.random_range(config.alpha_range.0..=config.alpha_range.1);
    let beta = rng.random_range(config.beta_range.0..=config.beta_range.1);
    (alpha, beta)
}

/// Builds a synthetic catalog; deterministic in `(config, seed)`.
pub fn generate_synthetic_catalog(config: &CatalogConfig, seed: u64) -> Result<Catalog> {
    let mut rng = stream_from_seed(seed, "catalog");
    generate_with(config, &mut rng)
}

pub(crate) fn generate_with(config: &CatalogConfig, rng: &mut StreamRng) -> Result<Catalog> {
    config.check()?;
    let counts = config.skus_in_category();
    let mut skus = Vec::new();
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut category_of = Vec::new();
    let mut seen = HashSet::new();
    for (c, (category, &count)) in config.categories.iter().zip(&counts).enumerate() {
        for k in 0..count {
            let sku_id = loop {
                // Ten-digit UPC-like identifiers with a category prefix.
                let id = format!("{:02}{:08}", 10 + c, rng.random_range(0..100_000_000u32));
                if seen.insert(id.clone()) {
                    break id;
                }
            };
            let shelf_life_days = rng.random_range(config.shelf_life_range.0..=config.shelf_life_range.1);
            let base_price = Money::from_f64(rng.random_range(config.base_price_range.0..=config.base_price_range.1));
            let (a, b) = draw_alpha_beta(rng, config);
            skus.push(SkuSpec {
                sku_id,
                description: format!("{} item {}", category.replace('_', " "), k + 1),
                category_id: category.clone(),
                shelf_life_days,
                base_price,
                reference_cost: base_price.scale(0.5),
            });
            alpha.push(a);
            beta.push(b);
            category_of.push(c);
        }
    }
    let demand = DemandParams {
        alpha,
        beta,
        gamma: substitution_matrix(&category_of, config.gamma),
        category_effect: vec![config.category_effect; config.categories.len()],
    };
    Catalog::new(skus, config.categories.clone(), demand)
}

#[derive(Debug, Deserialize)]
struct CatalogRow {
    sku_id: String,
    description: String,
    category: String,
    shelf_life_days: u32,
    base_price: f64,
}

const CATALOG_COLUMNS: [&str; 5] = ["sku_id", "description", "category", "shelf_life_days", "base_price"];

/// Loads SKUs from a comma-separated file with header
/// `sku_id,description,category,shelf_life_days,base_price`.
///
/// Rows outside `config.categories` are skipped. Demand parameters are not
/// part of the file; they are drawn from generators keyed by each `sku_id`,
/// so loading is a pure function of the file and the config.
pub fn load_catalog(path: &Path, config: &CatalogConfig) -> Result<Catalog> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    for column in CATALOG_COLUMNS {
        if !headers.iter().any(|h| h == column) {
            return Err(Error::Schema(format!("missing column {column}")));
        }
    }
    if config.categories.is_empty() {
        return Err(Error::Config("catalog needs at least one category".into()));
    }
    let mut skus = Vec::new();
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut category_of = Vec::new();
    let mut ids = HashSet::new();
    for row in reader.deserialize::<CatalogRow>() {
        let row = row.map_err(|e| Error::Schema(e.to_string()))?;
        if !ids.insert(row.sku_id.clone()) {
            return Err(Error::Validation(format!("duplicate sku_id {}", row.sku_id)));
        }
        let Some(c) = config.categories.iter().position(|c| *c == row.category) else {
            continue;
        };
        let mut rng = stream_from_seed(0, &format!("demand-params/{}", row.sku_id));
        let (a, b) = draw_alpha_beta(&mut rng, config);
        let base_price = Money::from_f64(row.base_price);
        skus.push(SkuSpec {
            sku_id: row.sku_id,
            description: row.description,
            category_id: row.category,
            shelf_life_days: row.shelf_life_days,
            base_price,
            reference_cost: base_price.scale(0.5),
        });
        alpha.push(a);
        beta.push(b);
        category_of.push(c);
    }
    for (c, name) in config.categories.iter().enumerate() {
        if !category_of.contains(&c) {
            return Err(Error::Validation(format!(
                "unknown category {name}: no rows in catalog file"
            )));
        }
    }
    let demand = DemandParams {
        alpha,
        beta,
        gamma: substitution_matrix(&category_of, config.gamma),
        category_effect: vec![config.category_effect; config.categories.len()],
    };
    Catalog::new(skus, config.categories.clone(), demand)
}

/// Expected total daily sales at base prices with no review or news effects.
pub fn expected_sales_at_base(catalog: &Catalog, traffic: f64) -> f64 {
    let prices = catalog.base_prices();
    let zero = vec![0.0; catalog.len()];
    let utilities = demand::utilities_from_deltas(catalog, &prices, &zero, &zero);
    traffic * demand::choice_probabilities(&utilities).iter().sum::<f64>()
}

/// Shifts every `alpha` by a common offset so that expected total sales at
/// base prices match `target_daily_sales`.
///
/// Substitution makes total sales non-monotone for very large offsets, so the
/// search first scans upward for the lowest bracketing interval and then
/// bisects inside it.
pub fn calibrate_alpha(catalog: &Catalog, target_daily_sales: f64, traffic: u64) -> Result<Catalog> {
    let traffic_f = traffic as f64;
    if !(target_daily_sales < traffic_f) {
        return Err(Error::Calibration(format!(
            "target {target_daily_sales} must be below traffic {traffic}"
        )));
    }
    let sales_at = |delta: f64| {
        let mut shifted = catalog.clone();
        for a in &mut shifted.demand.alpha {
            *a += delta;
        }
        expected_sales_at_base(&shifted, traffic_f)
    };
    const LO: f64 = -20.0;
    const HI: f64 = 20.0;
    const STEP: f64 = 0.25;
    let mut lo = LO;
    if sales_at(lo) > target_daily_sales {
        return Err(Error::Calibration(format!(
            "target {target_daily_sales} below the minimum reachable expected sales"
        )));
    }
    let mut hi = None;
    let mut x = LO;
    while x < HI {
        let next = (x + STEP).min(HI);
        if sales_at(next) >= target_daily_sales {
            lo = x;
            hi = Some(next);
            break;
        }
        x = next;
    }
    let Some(mut hi) = hi else {
        return Err(Error::Calibration(format!(
            "target {target_daily_sales} unreachable for offsets in [{LO}, {HI}]"
        )));
    };
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if sales_at(mid) < target_daily_sales {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = 0.5 * (lo + hi);
    let mut out = catalog.clone();
    for a in &mut out.demand.alpha {
        *a += delta;
    }
    let achieved = expected_sales_at_base(&out, traffic_f);
    if (achieved - target_daily_sales).abs() > 0.5 {
        return Err(Error::Calibration(format!(
            "bisection ended at {achieved}, outside target {target_daily_sales} +/- 0.5"
        )));
    }
    Ok(out)
}
