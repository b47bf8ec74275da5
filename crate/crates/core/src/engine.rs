//! World state, the end-of-day transition and the episode driver.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::catalog::Catalog;
use crate::config::EpisodeConfig;
use crate::demand;
use crate::error::{Error, Result};
use crate::finance::{self, FinancialState, RentOutcome};
use crate::inventory::{Inbound, InventoryLedger};
use crate::money::Money;
use crate::news::{self, NewsEvent};
use crate::reviews::{self, ReviewBook};
use crate::rng::RngStreams;
use crate::strategy::StrategyRecord;
use crate::supply::{self, OrderBook, SupplierTable};
use crate::toolapi::{self, ActionFlag, ErrorCode, ToolError, ToolResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Strategy,
    Execution,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Strategy => "strategy",
            Phase::Execution => "execution",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    RentDefault,
    MaxDays,
}

impl EndReason {
    pub fn as_str(self) -> &'static str {
        match self {
            EndReason::RentDefault => "rent_default",
            EndReason::MaxDays => "max_days",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SalesRecord {
    pub day: u32,
    pub units: u64,
    pub price: Money,
}

/// Everything the transition and the tools read or write.
///
/// Catalog and supplier table are shared and immutable; they are left out of
/// serialization and of the state hash.
#[derive(Clone, Debug, Serialize)]
pub struct WorldState {
    pub day: u32,
    #[serde(skip)]
    pub catalog: Arc<Catalog>,
    #[serde(skip)]
    pub suppliers: Arc<SupplierTable>,
    pub prices: Vec<Money>,
    pub inventory: InventoryLedger,
    pub orders: OrderBook,
    pub news: Vec<NewsEvent>,
    pub next_event_id: u64,
    pub reviews: ReviewBook,
    pub sales_history: Vec<Vec<SalesRecord>>,
    pub finance: FinancialState,
    pub phase: Phase,
    /// Current strategy; entries not set today carry over from yesterday.
    pub strategy: StrategyRecord,
    pub memory: BTreeMap<String, String>,
    pub ended: Option<EndReason>,
    /// Funds at the start of the current day.
    pub funds_start: Money,
    /// Procurement spend of the current day.
    pub procurement_today: Money,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkuDayReport {
    pub sku_id: String,
    pub price: Money,
    pub on_hand_start: u64,
    pub potential: u64,
    pub sold: u64,
    pub returned: u64,
    pub expired: u64,
    pub stockout: bool,
    pub placed: u64,
    pub queued: u64,
    pub released: u64,
    pub on_hand_end: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DayReport {
    pub day: u32,
    pub date: String,
    pub traffic: u64,
    pub skus: Vec<SkuDayReport>,
    pub units_sold: u64,
    pub units_returned: u64,
    pub units_expired: u64,
    /// Units handed over by suppliers today (shelved or queued).
    pub units_delivered: u64,
    pub revenue: Money,
    pub refunds: Money,
    pub procurement: Money,
    pub rent: RentOutcome,
    pub pending_units: u64,
    pub new_reviews: u64,
    pub funds_start: Money,
    pub funds_end: Money,
    pub net_worth_end: Money,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub call_id: u64,
    pub phase: Phase,
    pub tool: String,
    pub arguments: Value,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ToolError>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<ActionFlag>,
}

/// One completed day as written to the trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DayRecord {
    pub day: u32,
    pub date: String,
    pub strategy: StrategyRecord,
    pub tool_calls: Vec<CallRecord>,
    pub day_report: DayReport,
}

#[derive(Clone)]
pub struct Episode {
    pub(crate) config: EpisodeConfig,
    pub(crate) seed: u64,
    pub(crate) state: WorldState,
    pub(crate) rng: RngStreams,
    next_call_id: u64,
    phase_calls: u32,
    day_calls: Vec<CallRecord>,
    /// Strategy snapshot taken when today's strategy phase closed.
    pub(crate) snapshot: Option<StrategyRecord>,
    pending_day: Option<DayReport>,
    completed: Vec<DayRecord>,
    days_completed: u32,
}

impl Episode {
    /// Builds the initial world: catalog, suppliers, prices at base, empty
    /// stock, day 1 in the strategy phase.
    pub fn new(config: EpisodeConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let news_seed = config.news.seed.unwrap_or(seed);
        let mut rng = RngStreams::with_news_seed(seed, news_seed);
        let mut catalog = config.build_catalog(&mut rng.catalog)?;
        let suppliers = supply::generate_suppliers_with(&mut catalog, &mut rng.catalog);
        let n = catalog.len();
        let funds = config.initial_funds;
        let mut state = WorldState {
            day: 1,
            prices: catalog.base_prices(),
            inventory: InventoryLedger::new(&catalog, config.inventory_capacity),
            orders: OrderBook::new(),
            news: Vec::new(),
            next_event_id: 1,
            reviews: ReviewBook::new(n),
            sales_history: vec![Vec::new(); n],
            finance: FinancialState::new(funds),
            phase: Phase::Strategy,
            strategy: StrategyRecord::default(),
            memory: BTreeMap::new(),
            ended: None,
            funds_start: funds,
            procurement_today: Money::ZERO,
            catalog: Arc::new(catalog),
            suppliers: Arc::new(suppliers),
        };
        if config.news.enabled {
            state.news =
                news::generate_daily_news(1, &config.news, &state.catalog, &mut state.next_event_id, &mut rng.news)?;
        }
        Ok(Episode {
            config,
            seed,
            state,
            rng,
            next_call_id: 1,
            phase_calls: 0,
            day_calls: Vec::new(),
            snapshot: None,
            pending_day: None,
            completed: Vec::new(),
            days_completed: 0,
        })
    }

    pub fn from_preset(name: &str, seed: u64) -> Result<Self> {
        Self::new(EpisodeConfig::preset(name)?, seed)
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self) -> &WorldState {
        &self.state
    }

    pub fn catalog(&self) -> &Catalog {
        &self.state.catalog
    }

    pub fn suppliers(&self) -> &SupplierTable {
        &self.state.suppliers
    }

    pub fn day(&self) -> u32 {
        self.state.day
    }

    pub fn phase(&self) -> Phase {
        self.state.phase
    }

    pub fn ended(&self) -> Option<EndReason> {
        self.state.ended
    }

    pub fn is_over(&self) -> bool {
        self.state.ended.is_some()
    }

    pub fn days_completed(&self) -> u32 {
        self.days_completed
    }

    pub fn rng_positions(&self) -> [u128; 6] {
        self.rng.positions()
    }

    /// Strategy in force for the current execution phase, if it has started.
    pub fn strategy_snapshot(&self) -> Option<&StrategyRecord> {
        self.snapshot.as_ref()
    }

    pub fn date_string(&self, day: u32) -> String {
        self.config.date_of(day).to_string()
    }

    /// SHA-256 over the mutable world state and every stream position.
    pub fn state_hash(&self) -> String {
        #[derive(Serialize)]
        struct View<'a> {
            state: &'a WorldState,
            snapshot: &'a Option<StrategyRecord>,
            rng: [u128; 6],
        }
        let bytes = serde_json::to_vec(&View {
            state: &self.state,
            snapshot: &self.snapshot,
            rng: self.rng.positions(),
        })
        .expect("state serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub(crate) fn pending_report(&self) -> Option<&DayReport> {
        self.pending_day.as_ref()
    }

    /// Completed day records not yet taken by the caller.
    pub fn take_completed(&mut self) -> Vec<DayRecord> {
        std::mem::take(&mut self.completed)
    }

    /// Executes one tool call. Every call, successful or not, is logged.
    pub fn call(&mut self, tool: &str, arguments: Value) -> ToolResult {
        let call_id = self.next_call_id;
        self.next_call_id += 1;
        let phase = self.state.phase;
        let over_budget = !self.is_over() && self.phase_calls >= self.config.call_budget;
        let (outcome, flags) = if self.is_over() {
            (
                Err(ToolError::new(ErrorCode::EpisodeOver, "the episode has ended")),
                Vec::new(),
            )
        } else if over_budget {
            (
                Err(ToolError::new(
                    ErrorCode::BudgetExceeded,
                    format!(
                        "more than {} calls in the {} phase",
                        self.config.call_budget,
                        phase.as_str()
                    ),
                )),
                Vec::new(),
            )
        } else {
            self.phase_calls += 1;
            toolapi::dispatch(self, tool, &arguments)
        };
        let flags: Vec<ActionFlag> = flags.into_iter().map(|f| f.with_call(call_id)).collect();
        let (ok, result, error) = match outcome {
            Ok(v) => (true, Some(v), None),
            Err(e) => (false, None, Some(e)),
        };
        log::debug!("call {call_id} {tool} ok={ok}");
        let record = CallRecord {
            call_id,
            phase,
            tool: tool.to_string(),
            arguments,
            ok,
            result: result.clone(),
            error: error.clone(),
            flags: flags.clone(),
        };
        self.push_call(record);
        if over_budget {
            log::warn!(
                "call budget exhausted in {} phase of day {}",
                phase.as_str(),
                self.state.day
            );
            self.force_close();
        }
        ToolResult {
            call_id,
            ok,
            result,
            error,
            flags,
        }
    }

    fn push_call(&mut self, record: CallRecord) {
        self.day_calls.push(record);
        if let Some(report) = self.pending_day.take() {
            self.flush_day(report);
        }
    }

    fn force_close(&mut self) {
        match self.state.phase {
            Phase::Strategy => self.close_strategy_phase(),
            Phase::Execution => match self.close_day() {
                Ok(()) => {
                    if let Some(report) = self.pending_day.take() {
                        self.flush_day(report);
                    }
                }
                Err(e) => log::error!("forced end of day failed: {e}"),
            },
        }
    }

    pub(crate) fn close_strategy_phase(&mut self) {
        let mut snap = self.state.strategy.clone();
        snap.day = self.state.day;
        self.state.strategy.day = self.state.day;
        self.snapshot = Some(snap);
        self.state.phase = Phase::Execution;
        self.phase_calls = 0;
    }

    /// Runs the end-of-day transition; the day record is emitted once the
    /// closing call has been logged.
    pub(crate) fn close_day(&mut self) -> Result<()> {
        if self.state.phase != Phase::Execution {
            return Err(Error::Phase("the day can only end from the execution phase".into()));
        }
        let report = self.end_of_day_transition()?;
        self.pending_day = Some(report);
        Ok(())
    }

    fn flush_day(&mut self, report: DayReport) {
        let strategy = self.snapshot.take().unwrap_or_else(|| self.state.strategy.clone());
        let record = DayRecord {
            day: report.day,
            date: report.date.clone(),
            strategy,
            tool_calls: std::mem::take(&mut self.day_calls),
            day_report: report,
        };
        self.completed.push(record);
    }

    /// The five-step transition: traffic; demand and sales; reviews and
    /// returns; expiry, arrivals and queue release; rent, news decay and
    /// tomorrow's news.
    pub(crate) fn end_of_day_transition(&mut self) -> Result<DayReport> {
        if self.state.phase != Phase::Execution {
            return Err(Error::Phase("transition requires the execution phase".into()));
        }
        let day = self.state.day;
        let catalog = Arc::clone(&self.state.catalog);
        let suppliers = Arc::clone(&self.state.suppliers);
        let n = catalog.len();
        let on_hand_start = self.state.inventory.on_hand_all();
        let prices = self.state.prices.clone();

        // 1. traffic
        let weekday = self.config.weekday_of(day);
        let traffic = demand::sample_traffic(weekday, &self.config.traffic, &mut self.rng.traffic);

        // 2. demand and sales
        let ratings = self.state.reviews.aggregates(&catalog, day, self.config.recent_window);
        let utilities =
            demand::compute_utilities(&catalog, &prices, &ratings, self.config.review_weight, &self.state.news)?;
        let probabilities = demand::choice_probabilities(&utilities);
        let outcome = demand::realize_demand(traffic, &probabilities, &on_hand_start, &mut self.rng.demand);
        let (_cost_of_goods, slices) = self.state.inventory.consume_sales(&outcome.sold)?;
        let revenue: Money = (0..n).map(|j| prices[j].times(outcome.sold[j])).sum();
        for (j, history) in self.state.sales_history.iter_mut().enumerate() {
            history.push(SalesRecord {
                day,
                units: outcome.sold[j],
                price: prices[j],
            });
        }

        // 3. reviews and returns
        let new_reviews =
            reviews::generate_reviews(&catalog, &slices, self.config.review_ratio, day, &mut self.rng.reviews);
        let returned = reviews::generate_returns(&slices, self.config.return_base, &mut self.rng.reviews);
        let refunds: Money = (0..n).map(|j| prices[j].times(returned[j])).sum();
        self.state.reviews.add(&catalog, &new_reviews);

        // 4. expiry, then arrivals, then queue release
        let expired = self.state.inventory.expire_units(day);
        let inbound: Vec<Inbound> = self
            .state
            .orders
            .deliveries_due(day)
            .into_iter()
            .map(|o| {
                let j = catalog.index_of(&o.sku_id).expect("orders reference catalog SKUs");
                let quality = suppliers.find(j, &o.supplier_id).map(|s| s.quality).unwrap_or(0.0);
                Inbound {
                    order_id: o.order_id,
                    sku: j,
                    quantity: o.quantity,
                    unit_cost: o.unit_cost_paid,
                    supplier_id: o.supplier_id,
                    quality,
                }
            })
            .collect();
        let units_delivered = inbound.iter().map(|i| i.quantity).sum();
        let (placed, queued) = self.state.inventory.add_arrivals(inbound, day);
        let released = self.state.inventory.release_pending(day);

        // 5. rent, news decay, next day's news
        let rent = self.state.finance.settle_day(revenue, refunds, self.config.daily_rent);
        let active = std::mem::take(&mut self.state.news);
        self.state.news = news::tick_ttl(active);
        if self.config.news.enabled {
            let fresh = news::generate_daily_news(
                day + 1,
                &self.config.news,
                &catalog,
                &mut self.state.next_event_id,
                &mut self.rng.news,
            )?;
            self.state.news.extend(fresh);
        }

        let on_hand_end = self.state.inventory.on_hand_all();
        let skus = (0..n)
            .map(|j| SkuDayReport {
                sku_id: catalog.sku(j).sku_id.clone(),
                price: prices[j],
                on_hand_start: on_hand_start[j],
                potential: outcome.potential[j],
                sold: outcome.sold[j],
                returned: returned[j],
                expired: expired[j],
                stockout: outcome.stockout[j],
                placed: placed[j],
                queued: queued[j],
                released: released[j],
                on_hand_end: on_hand_end[j],
            })
            .collect();
        let funds_end = self.state.finance.funds;
        let report = DayReport {
            day,
            date: self.date_string(day),
            traffic,
            skus,
            units_sold: outcome.sold.iter().sum(),
            units_returned: returned.iter().sum(),
            units_expired: expired.iter().sum(),
            units_delivered,
            revenue,
            refunds,
            procurement: self.state.procurement_today,
            rent,
            pending_units: self.state.inventory.pending_total(),
            new_reviews: new_reviews.len() as u64,
            funds_start: self.state.funds_start,
            funds_end,
            net_worth_end: finance::net_worth(&self.state.finance, &self.state.inventory, &catalog, day),
        };

        self.days_completed += 1;
        self.state.day += 1;
        self.state.phase = Phase::Strategy;
        self.state.funds_start = funds_end;
        self.state.procurement_today = Money::ZERO;
        self.phase_calls = 0;
        if self.state.finance.check_termination() {
            self.state.ended = Some(EndReason::RentDefault);
        } else if self.days_completed >= self.config.max_days {
            self.state.ended = Some(EndReason::MaxDays);
        }
        Ok(report)
    }
}
