//! Supplier sets, price quotes and the purchase-order book.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::money::Money;
use crate::news::{self, NewsEvent};
use crate::rng::{stream_from_seed, StreamRng};

pub const SUPPLIERS_PER_SKU: usize = 5;
pub const MAX_LEAD_TIME: u32 = 7;

/// Quality tiers and their cost as a fraction of the SKU's base price.
const QUALITY_TIERS: [f64; SUPPLIERS_PER_SKU] = [0.2, 0.4, 0.6, 0.8, 1.0];
const COST_FRACTIONS: [f64; SUPPLIERS_PER_SKU] = [0.35, 0.42, 0.50, 0.58, 0.65];
/// Multiplicative cost jitter; small enough that tiers never overlap.
const COST_JITTER: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Supplier {
    pub supplier_id: String,
    pub sku_id: String,
    pub base_cost: Money,
    pub quality: f64,
    pub lead_time_min: u32,
    pub lead_time_max: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupplierTable {
    by_sku: Vec<Vec<Supplier>>,
}

impl SupplierTable {
    pub fn for_sku(&self, j: usize) -> &[Supplier] {
        &self.by_sku[j]
    }

    pub fn find(&self, j: usize, supplier_id: &str) -> Option<&Supplier> {
        self.by_sku.get(j)?.iter().find(|s| s.supplier_id == supplier_id)
    }

    pub fn len(&self) -> usize {
        self.by_sku.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_sku.is_empty()
    }
}

/// Generates five suppliers per SKU and sets each SKU's reference cost to the
/// mean of their base costs.
pub fn generate_suppliers(catalog: &mut Catalog, seed: u64) -> SupplierTable {
    let mut rng = stream_from_seed(seed, "suppliers");
    generate_suppliers_with(catalog, &mut rng)
}

pub(crate) fn generate_suppliers_with(catalog: &mut Catalog, rng: &mut StreamRng) -> SupplierTable {
    let mut by_sku = Vec::with_capacity(catalog.len());
    for j in 0..catalog.len() {
        let sku = catalog.sku(j).clone();
        let mut letters = ['A', 'B', 'C', 'D', 'E'];
        letters.shuffle(rng);
        let mut suppliers: Vec<Supplier> = (0..SUPPLIERS_PER_SKU)
            .map(|tier| {
                let jitter = rng.random_range(1.0 - COST_JITTER..=1.0 + COST_JITTER);
                let base_cost = sku
                    .base_price
                    .scale(COST_FRACTIONS[tier] * jitter)
                    .max(Money::from_cents(1));
                let lead_time_min = rng.random_range(1..=3);
                let lead_time_max = rng.random_range(lead_time_min..=MAX_LEAD_TIME);
                Supplier {
                    supplier_id: format!("SUP_{}_{}", sku.sku_id, letters[tier]),
                    sku_id: sku.sku_id.clone(),
                    base_cost,
                    quality: QUALITY_TIERS[tier],
                    lead_time_min,
                    lead_time_max,
                }
            })
            .collect();
        suppliers.sort_by(|a, b| a.supplier_id.cmp(&b.supplier_id));
        let total: i64 = suppliers.iter().map(|s| s.base_cost.cents()).sum();
        let mean = Money::from_f64(total as f64 / SUPPLIERS_PER_SKU as f64 / 100.0);
        catalog.set_reference_cost(j, mean);
        by_sku.push(suppliers);
    }
    SupplierTable { by_sku }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub sku_id: String,
    pub supplier_id: String,
    pub price: Money,
    pub quality: f64,
    pub lead_time_min: u32,
    pub lead_time_max: u32,
}

pub fn quote(catalog: &Catalog, j: usize, supplier: &Supplier, active: &[NewsEvent]) -> Money {
    let m = news::supply_multiplier(catalog, j, &supplier.supplier_id, active);
    if m == 1.0 {
        supplier.base_cost
    } else {
        supplier.base_cost.scale(m).max(Money::from_cents(1))
    }
}

/// Current quotes for every supplier, or only those of SKU `only`.
pub fn quote_prices(catalog: &Catalog, table: &SupplierTable, active: &[NewsEvent], only: Option<usize>) -> Vec<Quote> {
    let range: Vec<usize> = match only {
        Some(j) => vec![j],
        None => (0..catalog.len()).collect(),
    };
    range
        .into_iter()
        .flat_map(|j| {
            table.for_sku(j).iter().map(move |s| Quote {
                sku_id: s.sku_id.clone(),
                supplier_id: s.supplier_id.clone(),
                price: quote(catalog, j, s, active),
                quality: s.quality,
                lead_time_min: s.lead_time_min,
                lead_time_max: s.lead_time_max,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStatus {
    Pending,
    Delivered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurchaseOrder {
    pub order_id: u64,
    pub sku_id: String,
    pub supplier_id: String,
    pub quantity: u64,
    pub unit_cost_paid: Money,
    pub placed_day: u32,
    pub arrival_day: u32,
    pub status: OrderStatus,
}

/// Orders not yet delivered; delivered orders leave the book.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OrderBook {
    next_id: u64,
    orders: Vec<PurchaseOrder>,
    delivered_count: u64,
}

impl OrderBook {
    pub fn new() -> Self {
        OrderBook {
            next_id: 1,
            orders: Vec::new(),
            delivered_count: 0,
        }
    }

    pub fn pending(&self) -> impl Iterator<Item = &PurchaseOrder> {
        self.orders.iter()
    }

    pub fn pending_units(&self, sku_id: &str) -> u64 {
        self.pending().filter(|o| o.sku_id == sku_id).map(|o| o.quantity).sum()
    }

    pub fn delivered_count(&self) -> u64 {
        self.delivered_count
    }

    /// Records an order with a lead time drawn uniformly from the supplier's
    /// range. Funds are checked and debited by the caller.
    pub fn place_order(
        &mut self,
        supplier: &Supplier,
        quantity: u64,
        unit_cost: Money,
        day: u32,
        rng: &mut StreamRng,
    ) -> Result<PurchaseOrder> {
        if quantity == 0 {
            return Err(Error::Validation("order quantity must be positive".into()));
        }
        let lead = rng.random_range(supplier.lead_time_min..=supplier.lead_time_max);
        let order = PurchaseOrder {
            order_id: self.next_id,
            sku_id: supplier.sku_id.clone(),
            supplier_id: supplier.supplier_id.clone(),
            quantity,
            unit_cost_paid: unit_cost,
            placed_day: day,
            arrival_day: day + lead,
            status: OrderStatus::Pending,
        };
        self.next_id += 1;
        self.orders.push(order.clone());
        Ok(order)
    }

    /// Pending orders arriving on `day`, in order-id order, marked delivered
    /// and removed from the book.
    pub fn deliveries_due(&mut self, day: u32) -> Vec<PurchaseOrder> {
        let (mut due, keep): (Vec<_>, Vec<_>) = std::mem::take(&mut self.orders)
            .into_iter()
            .partition(|o| o.arrival_day == day);
        self.orders = keep;
        for o in &mut due {
            o.status = OrderStatus::Delivered;
        }
        due.sort_by_key(|o| o.order_id);
        self.delivered_count += due.len() as u64;
        due
    }
}
