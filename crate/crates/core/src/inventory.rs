//! Age-tracked stock with a capacity limit and a FIFO overflow queue.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::money::Money;
use crate::reviews::SoldSlice;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lot {
    pub quantity: u64,
    pub arrival_day: u32,
    pub shelf_life_days: u32,
    pub unit_cost: Money,
    pub supplier_id: String,
    pub quality: f64,
}

impl Lot {
    pub fn age(&self, day: u32) -> u32 {
        day.saturating_sub(self.arrival_day)
    }
}

/// Units that have left a supplier but are not yet on the shelf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inbound {
    pub order_id: u64,
    pub sku: usize,
    pub quantity: u64,
    pub unit_cost: Money,
    pub supplier_id: String,
    pub quality: f64,
}

/// Per-SKU lots (oldest first) and the pending queue.
///
/// Invariant: total on-hand units never exceed `capacity`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InventoryLedger {
    capacity: u64,
    shelf_life: Vec<u32>,
    lots: Vec<VecDeque<Lot>>,
    pending: VecDeque<Inbound>,
    expired_total: u64,
}

impl InventoryLedger {
    pub fn new(catalog: &Catalog, capacity: u64) -> Self {
        InventoryLedger {
            capacity,
            shelf_life: catalog.skus().iter().map(|s| s.shelf_life_days).collect(),
            lots: vec![VecDeque::new(); catalog.len()],
            pending: VecDeque::new(),
            expired_total: 0,
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn lots(&self, j: usize) -> &VecDeque<Lot> {
        &self.lots[j]
    }

    pub fn pending(&self) -> &VecDeque<Inbound> {
        &self.pending
    }

    pub fn on_hand(&self, j: usize) -> u64 {
        self.lots[j].iter().map(|l| l.quantity).sum()
    }

    pub fn on_hand_all(&self) -> Vec<u64> {
        (0..self.lots.len()).map(|j| self.on_hand(j)).collect()
    }

    pub fn total_on_hand(&self) -> u64 {
        self.lots.iter().flatten().map(|l| l.quantity).sum()
    }

    pub fn free_space(&self) -> u64 {
        self.capacity.saturating_sub(self.total_on_hand())
    }

    pub fn pending_units(&self, j: usize) -> u64 {
        self.pending.iter().filter(|p| p.sku == j).map(|p| p.quantity).sum()
    }

    pub fn pending_total(&self) -> u64 {
        self.pending.iter().map(|p| p.quantity).sum()
    }

    pub fn expired_total(&self) -> u64 {
        self.expired_total
    }

    fn shelve(&mut self, entry: &Inbound, quantity: u64, day: u32) {
        self.lots[entry.sku].push_back(Lot {
            quantity,
            arrival_day: day,
            shelf_life_days: self.shelf_life[entry.sku],
            unit_cost: entry.unit_cost,
            supplier_id: entry.supplier_id.clone(),
            quality: entry.quality,
        });
    }

    /// Shelves deliveries in order while space remains; the overflow joins the
    /// pending queue. While the queue is non-empty every delivery joins its
    /// tail so that older units are released first.
    ///
    /// Returns `(placed, queued)` units per SKU.
    pub fn add_arrivals(&mut self, deliveries: Vec<Inbound>, day: u32) -> (Vec<u64>, Vec<u64>) {
        let n = self.lots.len();
        let mut placed = vec![0; n];
        let mut queued = vec![0; n];
        for entry in deliveries {
            if entry.quantity == 0 {
                continue;
            }
            let room = if self.pending.is_empty() { self.free_space() } else { 0 };
            let now = entry.quantity.min(room);
            if now > 0 {
                self.shelve(&entry, now, day);
                placed[entry.sku] += now;
            }
            let rest = entry.quantity - now;
            if rest > 0 {
                queued[entry.sku] += rest;
                self.pending.push_back(Inbound {
                    quantity: rest,
                    ..entry
                });
            }
        }
        (placed, queued)
    }

    /// Moves queued units onto the shelf oldest-first while space allows. The
    /// head entry may be released partially.
    pub fn release_pending(&mut self, day: u32) -> Vec<u64> {
        let mut released = vec![0; self.lots.len()];
        let mut room = self.free_space();
        while room > 0 {
            let Some(head) = self.pending.front_mut() else {
                break;
            };
            let take = head.quantity.min(room);
            head.quantity -= take;
            let entry = head.clone();
            if head.quantity == 0 {
                self.pending.pop_front();
            }
            self.shelve(&entry, take, day);
            released[entry.sku] += take;
            room -= take;
        }
        released
    }

    /// Removes sold units oldest lot first. Returns the cost of goods per SKU
    /// and, per SKU, the quantities taken from each lot with its quality.
    pub fn consume_sales(&mut self, sold: &[u64]) -> Result<(Vec<Money>, Vec<Vec<SoldSlice>>)> {
        if let Some(j) = (0..sold.len()).find(|&j| sold[j] > self.on_hand(j)) {
            return Err(Error::Internal(format!(
                "sale of {} units exceeds on-hand {} for SKU index {j}",
                sold[j],
                self.on_hand(j)
            )));
        }
        let mut costs = Vec::with_capacity(sold.len());
        let mut slices = Vec::with_capacity(sold.len());
        for (j, &units) in sold.iter().enumerate() {
            let mut left = units;
            let mut cost = Money::ZERO;
            let mut taken = Vec::new();
            while left > 0 {
                let lot = self.lots[j].front_mut().expect("on-hand checked above");
                let take = lot.quantity.min(left);
                lot.quantity -= take;
                left -= take;
                cost += lot.unit_cost.times(take);
                taken.push(SoldSlice {
                    quantity: take,
                    quality: lot.quality,
                });
                if lot.quantity == 0 {
                    self.lots[j].pop_front();
                }
            }
            costs.push(cost);
            slices.push(taken);
        }
        Ok((costs, slices))
    }

    /// Drops every lot whose age exceeds its shelf life.
    pub fn expire_units(&mut self, day: u32) -> Vec<u64> {
        let mut expired = vec![0; self.lots.len()];
        for (j, lots) in self.lots.iter_mut().enumerate() {
            lots.retain(|lot| {
                if lot.age(day) > lot.shelf_life_days {
                    expired[j] += lot.quantity;
                    false
                } else {
                    true
                }
            });
        }
        self.expired_total += expired.iter().sum::<u64>();
        expired
    }
}
