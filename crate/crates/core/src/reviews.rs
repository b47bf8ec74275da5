//! Customer reviews, returns and the rating signal fed back into demand.

use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::rng::StreamRng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub sku_id: String,
    pub day: u32,
    pub rating: u8,
    pub source_quality: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingAggregate {
    pub sku_id: String,
    pub count: u64,
    pub mean_all: Option<f64>,
    pub mean_recent: Option<f64>,
}

impl RatingAggregate {
    pub fn empty(sku_id: &str) -> Self {
        RatingAggregate {
            sku_id: sku_id.to_string(),
            count: 0,
            mean_all: None,
            mean_recent: None,
        }
    }
}

/// Units of one SKU sold out of a single lot, with that lot's supplier quality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoldSlice {
    pub quantity: u64,
    pub quality: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReviewBook {
    per_sku: Vec<Vec<Review>>,
    rating_sum: Vec<u64>,
}

impl ReviewBook {
    pub fn new(n_skus: usize) -> Self {
        ReviewBook {
            per_sku: vec![Vec::new(); n_skus],
            rating_sum: vec![0; n_skus],
        }
    }

    pub fn add(&mut self, catalog: &Catalog, reviews: &[Review]) {
        for r in reviews {
            if let Some(j) = catalog.index_of(&r.sku_id) {
                self.rating_sum[j] += u64::from(r.rating);
                self.per_sku[j].push(r.clone());
            }
        }
    }

    pub fn reviews(&self, j: usize) -> &[Review] {
        &self.per_sku[j]
    }

    pub fn total(&self) -> usize {
        self.per_sku.iter().map(Vec::len).sum()
    }

    /// Reviews of SKU `j` written within the `window` days before `day`.
    pub fn recent(&self, j: usize, day: u32, window: u32) -> &[Review] {
        let cutoff = day.saturating_sub(window);
        let list = &self.per_sku[j];
        let start = list.partition_point(|r| r.day <= cutoff);
        &list[start..]
    }

    pub fn aggregate(&self, catalog: &Catalog, j: usize, day: u32, window: u32) -> RatingAggregate {
        let sku_id = &catalog.sku(j).sku_id;
        let list = &self.per_sku[j];
        if list.is_empty() {
            return RatingAggregate::empty(sku_id);
        }
        let recent = self.recent(j, day, window);
        let mean_recent = if recent.is_empty() {
            None
        } else {
            Some(recent.iter().map(|r| f64::from(r.rating)).sum::<f64>() / recent.len() as f64)
        };
        RatingAggregate {
            sku_id: sku_id.clone(),
            count: list.len() as u64,
            mean_all: Some(self.rating_sum[j] as f64 / list.len() as f64),
            mean_recent,
        }
    }

    pub fn aggregates(&self, catalog: &Catalog, day: u32, window: u32) -> Vec<RatingAggregate> {
        (0..catalog.len())
            .map(|j| self.aggregate(catalog, j, day, window))
            .collect()
    }
}

/// Rating drawn as `clamp(round(Normal(1 + 4q, 0.7)), 1, 5)`.
pub fn draw_rating(quality: f64, rng: &mut StreamRng) -> u8 {
    let normal = Normal::new(1.0 + 4.0 * quality, 0.7).expect("finite mean, positive sd");
    normal.sample(rng).round().clamp(1.0, 5.0) as u8
}

/// Each sold unit independently yields a review with probability `review_ratio`.
pub fn generate_reviews(
    catalog: &Catalog,
    sold: &[Vec<SoldSlice>],
    review_ratio: f64,
    day: u32,
    rng: &mut StreamRng,
) -> Vec<Review> {
    let ratio = review_ratio.clamp(0.0, 1.0);
    let mut out = Vec::new();
    if ratio == 0.0 {
        return out;
    }
    for (j, slices) in sold.iter().enumerate() {
        for slice in slices {
            if slice.quantity == 0 {
                continue;
            }
            let count = Binomial::new(slice.quantity, ratio)
                .expect("ratio in [0, 1]")
                .sample(rng);
            for _ in 0..count {
                out.push(Review {
                    sku_id: catalog.sku(j).sku_id.clone(),
                    day,
                    rating: draw_rating(slice.quality, rng),
                    source_quality: slice.quality,
                });
            }
        }
    }
    out
}

/// Each sold unit is returned with probability `return_base * (1 - q)`.
pub fn generate_returns(sold: &[Vec<SoldSlice>], return_base: f64, rng: &mut StreamRng) -> Vec<u64> {
    sold.iter()
        .map(|slices| {
            slices
                .iter()
                .map(|s| {
                    let p = (return_base * (1.0 - s.quality)).clamp(0.0, 1.0);
                    if s.quantity == 0 || p == 0.0 {
                        0
                    } else {
                        Binomial::new(s.quantity, p).expect("probability in [0, 1]").sample(rng)
                    }
                })
                .sum()
        })
        .collect()
}

/// Utility shift from ratings: `weight * (blend - 3) / 2` with
/// `blend = 0.7 * mean_recent + 0.3 * mean_all`. Without recent reviews the
/// overall mean stands in for the recent one.
pub fn review_delta(aggregate: &RatingAggregate, weight: f64) -> f64 {
    if aggregate.count == 0 {
        return 0.0;
    }
    let Some(all) = aggregate.mean_all else {
        return 0.0;
    };
    let recent = aggregate.mean_recent.unwrap_or(all);
    // Same as 0.7 * recent + 0.3 * all, but exact when the two agree.
    let blend = recent + 0.3 * (all - recent);
    weight * (blend - 3.0) / 2.0
}
