//! The two-phase day loop over an abstract agent, a scripted test agent and
//! the privileged heuristic baseline.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::demand;
use crate::engine::{DayRecord, EndReason, Episode, Phase};
use crate::error::{Error, Result};
use crate::money::Money;
use crate::strategy::{ExecuteStrategy, PlannedAction, PriceAdjustment, SkuSupplier};
use crate::supply;

/// An agent acts only through [`Episode::call`]; read access to the episode
/// is available for privileged baselines.
pub trait Agent {
    fn strategy_phase(&mut self, ep: &mut Episode) -> Result<()>;
    fn execution_phase(&mut self, ep: &mut Episode) -> Result<()>;
}

/// Drives one day: strategy phase, automatic `finish_strategy_phase` if the
/// agent left it open, execution phase, automatic `end_today`.
pub fn run_day(agent: &mut dyn Agent, ep: &mut Episode) -> Result<DayRecord> {
    if ep.is_over() {
        return Err(Error::Phase("the episode has ended".into()));
    }
    if ep.phase() != Phase::Strategy {
        return Err(Error::Phase("a day must start in the strategy phase".into()));
    }
    let day = ep.day();
    if let Err(e) = agent.strategy_phase(ep) {
        log::warn!("agent failed in strategy phase of day {day}: {e}");
    }
    if ep.phase() == Phase::Strategy && ep.day() == day {
        ep.call("finish_strategy_phase", json!({}));
    }
    if ep.phase() == Phase::Execution && ep.day() == day {
        if let Err(e) = agent.execution_phase(ep) {
            log::warn!("agent failed in execution phase of day {day}: {e}");
        }
    }
    if ep.phase() == Phase::Execution && ep.day() == day {
        let r = ep.call("end_today", json!({}));
        if !r.ok {
            return Err(Error::Internal(format!("end_today failed: {:?}", r.error)));
        }
    }
    let mut done = ep.take_completed();
    match done.len() {
        1 => Ok(done.remove(0)),
        n => Err(Error::Internal(format!("expected one completed day, got {n}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub days: u32,
    pub reason: EndReason,
}

/// Runs days until termination or `max_days`, handing each record to `sink`.
pub fn run_episode(
    agent: &mut dyn Agent,
    ep: &mut Episode,
    mut sink: impl FnMut(&DayRecord) -> Result<()>,
) -> Result<EpisodeOutcome> {
    while !ep.is_over() {
        let record = run_day(agent, ep)?;
        sink(&record)?;
    }
    Ok(EpisodeOutcome {
        days: ep.days_completed(),
        reason: ep.ended().expect("loop exits only once ended"),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScriptedCall {
    pub tool: String,
    #[serde(default)]
    pub arguments: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScriptedDay {
    #[serde(default)]
    pub strategy: Vec<ScriptedCall>,
    #[serde(default)]
    pub execution: Vec<ScriptedCall>,
}

/// Replays fixed per-day call lists; days past the script end immediately.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScriptedAgent {
    pub days: Vec<ScriptedDay>,
}

impl ScriptedAgent {
    /// The agent that ends every phase at once.
    pub fn null() -> Self {
        ScriptedAgent::default()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn calls(&self, day: u32, phase: Phase) -> Vec<ScriptedCall> {
        self.days
            .get(day as usize - 1)
            .map(|d| match phase {
                Phase::Strategy => d.strategy.clone(),
                Phase::Execution => d.execution.clone(),
            })
            .unwrap_or_default()
    }

    fn play(&self, ep: &mut Episode, phase: Phase) {
        let day = ep.day();
        for c in self.calls(day, phase) {
            if ep.day() != day || ep.phase() != phase {
                break;
            }
            ep.call(&c.tool, c.arguments);
        }
    }
}

impl Agent for ScriptedAgent {
    fn strategy_phase(&mut self, ep: &mut Episode) -> Result<()> {
        self.play(ep, Phase::Strategy);
        Ok(())
    }

    fn execution_phase(&mut self, ep: &mut Episode) -> Result<()> {
        self.play(ep, Phase::Execution);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicParams {
    /// Days of expected demand the base-stock target covers.
    pub cover_days: f64,
    pub markup: f64,
    /// Weight of relative cost against quality in supplier choice.
    pub lambda: f64,
    pub price_min: f64,
    pub price_max: f64,
    /// Days of rent kept back from procurement.
    pub rent_reserve_days: u32,
    /// Cap the target at this share of shelf life worth of demand.
    pub shelf_life_share: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            cover_days: 10.0,
            markup: 1.8,
            lambda: 0.5,
            price_min: 0.5,
            price_max: 45.0,
            rent_reserve_days: 3,
            shelf_life_share: 1.0,
        }
    }
}

/// Base-stock replenishment with full knowledge of the demand model.
#[derive(Clone, Debug, Default)]
pub struct HeuristicAgent {
    pub params: HeuristicParams,
}

struct Plan {
    prices: Vec<(String, Money)>,
    orders: Vec<(String, String, u64)>,
}

impl HeuristicAgent {
    pub fn new(params: HeuristicParams) -> Self {
        HeuristicAgent { params }
    }

    fn target_price(&self, ep: &Episode, j: usize) -> Money {
        let p = ep.catalog().sku(j).reference_cost.to_f64() * self.params.markup;
        Money::from_f64(p.clamp(self.params.price_min, self.params.price_max))
    }

    fn plan(&self, ep: &Episode) -> Plan {
        let s = ep.state();
        let catalog = ep.catalog();
        let cfg = ep.config();
        let n = catalog.len();
        let targets: Vec<Money> = (0..n).map(|j| self.target_price(ep, j)).collect();
        let prices: Vec<(String, Money)> = (0..n)
            .filter(|&j| s.prices[j] != targets[j])
            .map(|j| (catalog.sku(j).sku_id.clone(), targets[j]))
            .collect();

        let ratings = s.reviews.aggregates(catalog, s.day, cfg.recent_window);
        let probs = demand::compute_utilities(catalog, &targets, &ratings, cfg.review_weight, &s.news)
            .map(|u| demand::choice_probabilities(&u))
            .unwrap_or_else(|_| vec![0.0; n]);
        let traffic = cfg.traffic.weekly_mean();

        let mut wanted: Vec<(usize, String, u64, Money)> = Vec::new();
        for (j, p) in probs.iter().enumerate() {
            let sku = catalog.sku(j);
            let d_hat = traffic * p;
            let cover = self
                .params
                .cover_days
                .min(self.params.shelf_life_share * f64::from(sku.shelf_life_days));
            let target = (d_hat * cover).ceil() as u64;
            let position = s.inventory.on_hand(j) + s.inventory.pending_units(j) + s.orders.pending_units(&sku.sku_id);
            if position >= target {
                continue;
            }
            let base = sku.base_price.to_f64();
            let best = ep
                .suppliers()
                .for_sku(j)
                .iter()
                .map(|sup| (sup, supply::quote(catalog, j, sup, &s.news)))
                .max_by(|(a, qa), (b, qb)| {
                    let sa = a.quality - self.params.lambda * qa.to_f64() / base;
                    let sb = b.quality - self.params.lambda * qb.to_f64() / base;
                    sa.total_cmp(&sb).then_with(|| b.supplier_id.cmp(&a.supplier_id))
                })
                .expect("five suppliers per SKU");
            wanted.push((j, best.0.supplier_id.clone(), target - position, best.1));
        }

        // Budget: keep a rent reserve; scale all orders down together.
        let reserve = cfg.daily_rent.times(u64::from(self.params.rent_reserve_days));
        let budget = (s.finance.funds - reserve).max(Money::ZERO);
        let total: Money = wanted.iter().map(|w| w.3.times(w.2)).sum();
        let funds_scale = if total > budget && total.is_positive() {
            budget.cents() as f64 / total.cents() as f64
        } else {
            1.0
        };
        // Capacity: stock on hand, queued and on order plus new orders.
        let committed = s.inventory.total_on_hand()
            + s.inventory.pending_total()
            + s.orders.pending().map(|o| o.quantity).sum::<u64>();
        let room = cfg.inventory_capacity.saturating_sub(committed);
        let units: u64 = wanted.iter().map(|w| w.2).sum();
        let cap_scale = if units > room { room as f64 / units as f64 } else { 1.0 };
        let scale = funds_scale.min(cap_scale);

        let mut spent = Money::ZERO;
        let orders = wanted
            .into_iter()
            .filter_map(|(j, supplier, qty, unit)| {
                let mut q = (qty as f64 * scale).floor() as u64;
                while q > 0 && spent + unit.times(q) > budget {
                    q -= 1;
                }
                if q == 0 {
                    return None;
                }
                spent += unit.times(q);
                Some((catalog.sku(j).sku_id.clone(), supplier, q))
            })
            .collect();
        Plan { prices, orders }
    }
}

impl Agent for HeuristicAgent {
    fn strategy_phase(&mut self, ep: &mut Episode) -> Result<()> {
        if ep.day() == 1 {
            ep.call(
                "set_macro_strategy",
                json!({"macro_strategy": [
                    "Price every SKU at a fixed markup over its mean supplier cost.",
                    "Keep stock at a base-stock level covering expected demand over lead time and review period.",
                    "Prefer suppliers with the best quality net of relative cost.",
                    "Hold back a few days of rent before buying stock."
                ]}),
            );
        }
        let plan = self.plan(ep);
        let mut actions: Vec<PlannedAction> = plan
            .prices
            .iter()
            .map(|(sku, p)| PlannedAction {
                tool: "modify_sku_price".into(),
                arguments: json!({"sku_id": sku, "new_price": p}),
            })
            .collect();
        actions.extend(plan.orders.iter().map(|(sku, sup, q)| PlannedAction {
            tool: "place_order".into(),
            arguments: json!({"sku_id": sku, "supplier_id": sup, "quantity": q}),
        }));
        let reorder: Vec<Value> = plan.orders.iter().map(|o| json!(o.0)).collect();
        let plan_record = ExecuteStrategy {
            focus_skus: reorder.clone(),
            sku_supplier_mapping: plan
                .orders
                .iter()
                .map(|(sku, sup, _)| SkuSupplier {
                    sku_id: sku.clone(),
                    supplier_id: sup.clone(),
                })
                .collect(),
            news_to_monitor: Vec::new(),
            skus_to_reorder: reorder.clone(),
            price_adjustments: plan
                .prices
                .iter()
                .map(|(sku, p)| PriceAdjustment {
                    sku_id: sku.clone(),
                    adjustment: json!(format!("set to {p}")),
                })
                .collect(),
            sku_to_monitor: reorder,
            other: Vec::new(),
        };
        ep.call("set_execute_strategy", json!({ "execute_strategy": plan_record }));
        ep.call("set_action", json!({ "today_action": actions }));
        ep.call("finish_strategy_phase", json!({}));
        Ok(())
    }

    fn execution_phase(&mut self, ep: &mut Episode) -> Result<()> {
        let actions = ep
            .strategy_snapshot()
            .map(|s| s.today_action.clone())
            .unwrap_or_default();
        for a in actions {
            ep.call(&a.tool, a.arguments);
        }
        ep.call("end_today", json!({}));
        Ok(())
    }
}
