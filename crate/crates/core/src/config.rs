//! Episode configuration, presets and TOML loading.
//!
//! A config file is a TOML tree laid over a preset: keys present in the file
//! replace the preset's, nested tables merge key by key. The base preset is
//! named by a top-level `preset` key and defaults to `easy`.

use std::path::{Path, PathBuf};

use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::catalog::{self, Catalog, CatalogConfig};
use crate::demand::TrafficConfig;
use crate::error::{Error, Result};
use crate::money::Money;
use crate::news::NewsConfig;

pub const EASY_CATEGORIES: [&str; 5] = [
    "Bathroom_Tissues",
    "Canned_Soup",
    "Cigarettes",
    "Front_end_candies",
    "Soft_Drinks",
];

pub const FULL_CATEGORIES: [&str; 20] = [
    "Bathroom_Tissues",
    "Beer",
    "Bottled_Juices",
    "Canned_Soup",
    "Canned_Tuna",
    "Cereals",
    "Cheeses",
    "Cigarettes",
    "Cookies",
    "Crackers",
    "Dish_Detergent",
    "Fabric_Softeners",
    "Front_end_candies",
    "Frozen_Entrees",
    "Frozen_Juices",
    "Oatmeal",
    "Paper_Towels",
    "Snack_Crackers",
    "Soft_Drinks",
    "Toothpastes",
];

pub const PRESETS: [&str; 3] = ["easy", "middle", "hard"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogSettings {
    /// CSV catalog to load; a synthetic catalog is generated when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub skus_per_category: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_skus: Option<u32>,
    /// Expected daily unit sales at base prices that alpha is shifted to hit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_daily_sales: Option<f64>,
    pub gamma: f64,
    pub alpha_range: [f64; 2],
    pub beta_range: [f64; 2],
    pub shelf_life_range: [u32; 2],
    pub base_price_range: [f64; 2],
}

impl Default for CatalogSettings {
    fn default() -> Self {
        let d = CatalogConfig::default();
        CatalogSettings {
            path: None,
            skus_per_category: d.skus_per_category,
            total_skus: None,
            target_daily_sales: None,
            gamma: d.gamma,
            alpha_range: [d.alpha_range.0, d.alpha_range.1],
            beta_range: [d.beta_range.0, d.beta_range.1],
            shelf_life_range: [d.shelf_life_range.0, d.shelf_life_range.1],
            base_price_range: [d.base_price_range.0, d.base_price_range.1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeConfig {
    pub name: String,
    pub initial_funds: Money,
    pub daily_rent: Money,
    pub inventory_capacity: u64,
    pub categories: Vec<String>,
    pub category_effect: f64,
    pub catalog: CatalogSettings,
    pub review_ratio: f64,
    pub review_weight: f64,
    pub recent_window: u32,
    pub return_base: f64,
    pub news: NewsConfig,
    pub traffic: TrafficConfig,
    /// Calendar date of day 1.
    pub epoch_date: NaiveDate,
    pub max_days: u32,
    pub seed: u64,
    /// Tool calls allowed per phase before the phase is force-closed.
    pub call_budget: u32,
}

impl EpisodeConfig {
    pub fn easy() -> Self {
        EpisodeConfig {
            name: "easy".into(),
            initial_funds: Money::from_units(10_000),
            daily_rent: Money::from_units(250),
            inventory_capacity: 10_000,
            categories: EASY_CATEGORIES.iter().map(|s| s.to_string()).collect(),
            category_effect: -0.2,
            catalog: CatalogSettings {
                skus_per_category: 5,
                target_daily_sales: Some(450.0),
                ..CatalogSettings::default()
            },
            review_ratio: 0.02,
            review_weight: 0.5,
            recent_window: 14,
            return_base: 0.1,
            news: NewsConfig::default(),
            traffic: TrafficConfig::default(),
            epoch_date: NaiveDate::from_ymd_opt(1991, 9, 7).expect("valid date"),
            max_days: 200,
            seed: 42,
            call_budget: 200,
        }
    }

    pub fn middle() -> Self {
        EpisodeConfig {
            name: "middle".into(),
            initial_funds: Money::from_units(50_000),
            daily_rent: Money::from_units(1_000),
            inventory_capacity: 40_000,
            categories: FULL_CATEGORIES.iter().map(|s| s.to_string()).collect(),
            catalog: CatalogSettings {
                skus_per_category: 5,
                total_skus: Some(96),
                target_daily_sales: Some(1_800.0),
                ..CatalogSettings::default()
            },
            traffic: TrafficConfig {
                base: 2_000.0,
                ..TrafficConfig::default()
            },
            ..Self::easy()
        }
    }

    pub fn hard() -> Self {
        EpisodeConfig {
            name: "hard".into(),
            news: NewsConfig {
                enabled: true,
                seed: Some(42),
                ..NewsConfig::default()
            },
            ..Self::middle()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "easy" => Ok(Self::easy()),
            "middle" => Ok(Self::middle()),
            "hard" => Ok(Self::hard()),
            other => Err(Error::Config(format!(
                "unknown preset {other:?}, expected one of {}",
                PRESETS.join(", ")
            ))),
        }
    }

    /// Parses a TOML document over the preset it names (or `default_preset`).
    pub fn from_toml_str(text: &str, default_preset: &str) -> Result<Self> {
        let mut overlay: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let base_name = match overlay.remove("preset") {
            Some(toml::Value::String(s)) => s,
            Some(_) => return Err(Error::Config("preset must be a string".into())),
            None => default_preset.to_string(),
        };
        let base = Self::preset(&base_name)?;
        let mut tree = toml::Table::try_from(&base).map_err(|e| Error::Internal(e.to_string()))?;
        merge(&mut tree, overlay);
        let config: EpisodeConfig = tree
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, default_preset: &str) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml_str(&text, default_preset)?;
        // Catalog paths are relative to the config file.
        if let (Some(p), Some(dir)) = (config.catalog.path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if !self.initial_funds.is_positive() {
            return fail("initial_funds must be positive");
        }
        if !self.daily_rent.is_positive() {
            return fail("daily_rent must be positive");
        }
        if self.inventory_capacity == 0 {
            return fail("inventory_capacity must be positive");
        }
        if self.categories.is_empty() {
            return fail("at least one category required");
        }
        for (name, v) in [("review_ratio", self.review_ratio), ("return_base", self.return_base)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1]")));
            }
        }
        if !(self.review_weight >= 0.0) {
            return fail("review_weight must be non-negative");
        }
        if self.recent_window == 0 {
            return fail("recent_window must be positive");
        }
        if !(self.traffic.base > 0.0) || self.traffic.weekday_factors.iter().any(|f| !(*f >= 0.0)) {
            return fail("traffic base must be positive and weekday factors non-negative");
        }
        if self.max_days == 0 {
            return fail("max_days must be at least 1");
        }
        if self.call_budget == 0 {
            return fail("call_budget must be at least 1");
        }
        self.news.validate()
    }

    pub fn catalog_config(&self) -> CatalogConfig {
        let c = &self.catalog;
        CatalogConfig {
            categories: self.categories.clone(),
            skus_per_category: c.skus_per_category,
            total_skus: c.total_skus,
            category_effect: self.category_effect,
            gamma: c.gamma,
            alpha_range: (c.alpha_range[0], c.alpha_range[1]),
            beta_range: (c.beta_range[0], c.beta_range[1]),
            shelf_life_range: (c.shelf_life_range[0], c.shelf_life_range[1]),
            base_price_range: (c.base_price_range[0], c.base_price_range[1]),
        }
    }

    /// Loads or generates the catalog and applies alpha calibration.
    pub fn build_catalog(&self, rng: &mut crate::rng::StreamRng) -> Result<Catalog> {
        let cc = self.catalog_config();
        let mut cat = match &self.catalog.path {
            Some(p) => catalog::load_catalog(p, &cc)?,
            None => catalog::generate_with(&cc, rng)?,
        };
        if let Some(target) = self.catalog.target_daily_sales {
            cat = catalog::calibrate_alpha(&cat, target, self.traffic.weekly_mean().round() as u64)?;
        }
        Ok(cat)
    }

    pub fn date_of(&self, day: u32) -> NaiveDate {
        self.epoch_date + Days::new(u64::from(day.saturating_sub(1)))
    }

    /// Day index of a calendar date; dates before the epoch map to 0 or below.
    pub fn day_of(&self, date: NaiveDate) -> i64 {
        (date - self.epoch_date).num_days() + 1
    }

    /// Monday = 0.
    pub fn weekday_of(&self, day: u32) -> usize {
        self.date_of(day).weekday().num_days_from_monday() as usize
    }
}

fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
