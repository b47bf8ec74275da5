//! Phase-gated tool surface through which agents observe and act.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::engine::{Episode, Phase};
use crate::error::Error;
use crate::money::Money;
use crate::strategy::{ExecuteStrategy, PlannedAction, ACTION_TOOLS};
use crate::supply;

/// Prices above this are accepted but flagged.
pub const PRICE_FLAG_THRESHOLD: f64 = 50.0;
/// Order quantities above this share of capacity are accepted but flagged.
pub const QUANTITY_FLAG_SHARE: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub call_id: u64,
    pub tool: String,
    #[serde(default)]
    pub arguments: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    PhaseGate,
    UnknownTool,
    InvalidArguments,
    UnknownSku,
    UnknownSupplier,
    InsufficientFunds,
    InvalidAction,
    NewsDisabled,
    EpisodeOver,
    BudgetExceeded,
    ProtocolError,
    Internal,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 12] = [
        ErrorCode::PhaseGate,
        ErrorCode::UnknownTool,
        ErrorCode::InvalidArguments,
        ErrorCode::UnknownSku,
        ErrorCode::UnknownSupplier,
        ErrorCode::InsufficientFunds,
        ErrorCode::InvalidAction,
        ErrorCode::NewsDisabled,
        ErrorCode::EpisodeOver,
        ErrorCode::BudgetExceeded,
        ErrorCode::ProtocolError,
        ErrorCode::Internal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::PhaseGate => "phase_gate",
            ErrorCode::UnknownTool => "unknown_tool",
            ErrorCode::InvalidArguments => "invalid_arguments",
            ErrorCode::UnknownSku => "unknown_sku",
            ErrorCode::UnknownSupplier => "unknown_supplier",
            ErrorCode::InsufficientFunds => "insufficient_funds",
            ErrorCode::InvalidAction => "invalid_action",
            ErrorCode::NewsDisabled => "news_disabled",
            ErrorCode::EpisodeOver => "episode_over",
            ErrorCode::BudgetExceeded => "budget_exceeded",
            ErrorCode::ProtocolError => "protocol_error",
            ErrorCode::Internal => "internal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolError {
    pub code: ErrorCode,
    pub message: String,
}

impl ToolError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ToolError {
            code,
            message: message.into(),
        }
    }

    fn args(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::InvalidArguments, message)
    }
}

impl From<Error> for ToolError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Reference { kind: "sku", .. } => ErrorCode::UnknownSku,
            Error::Reference { .. } => ErrorCode::UnknownSupplier,
            Error::Funds { .. } => ErrorCode::InsufficientFunds,
            Error::Validation(_) => ErrorCode::InvalidAction,
            Error::Argument(_) | Error::Json(_) => ErrorCode::InvalidArguments,
            Error::NewsDisabled => ErrorCode::NewsDisabled,
            Error::Phase(_) => ErrorCode::PhaseGate,
            _ => ErrorCode::Internal,
        };
        ToolError::new(code, e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolResult {
    pub call_id: u64,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ToolError>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<ActionFlag>,
}

impl ToolResult {
    pub fn error_code(&self) -> Option<ErrorCode> {
        self.error.as_ref().map(|e| e.code)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagKind {
    PriceOutOfRange,
    QuantityImplausible,
    UnknownSku,
    UnknownSupplier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionFlag {
    pub call_id: u64,
    pub kind: FlagKind,
    pub detail: String,
}

impl ActionFlag {
    fn new(kind: FlagKind, detail: impl Into<String>) -> Self {
        ActionFlag {
            call_id: 0,
            kind,
            detail: detail.into(),
        }
    }

    pub(crate) fn with_call(mut self, call_id: u64) -> Self {
        self.call_id = call_id;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Access {
    Both,
    StrategyOnly,
    ExecutionOnly,
}

impl Access {
    pub fn allows(self, phase: Phase) -> bool {
        match self {
            Access::Both => true,
            Access::StrategyOnly => phase == Phase::Strategy,
            Access::ExecutionOnly => phase == Phase::Execution,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToolDefinition {
    pub name: &'static str,
    pub access: Access,
    /// True when the tool can change world state.
    pub mutating: bool,
    pub description: &'static str,
    pub parameters: Value,
}

const TOOLS: [(&str, Access, bool, &str); 17] = [
    (
        "view_funds_and_date",
        Access::Both,
        false,
        "Current day, calendar date, funds, rent and net worth.",
    ),
    (
        "view_inventory",
        Access::Both,
        false,
        "On-hand stock per SKU with lot ages, queued and on-order units.",
    ),
    (
        "view_sku_sales_history",
        Access::Both,
        false,
        "Daily units sold and price for one SKU over a day or date range.",
    ),
    (
        "view_sku_avg_ratings",
        Access::Both,
        false,
        "Review count and mean ratings, overall and recent.",
    ),
    (
        "view_sku_recent_reviews",
        Access::Both,
        false,
        "Ratings received for one SKU in a trailing window of days.",
    ),
    (
        "view_current_date_supplier_prices",
        Access::Both,
        false,
        "Today's supplier quotes with quality and lead-time range.",
    ),
    (
        "view_current_orders",
        Access::Both,
        false,
        "Purchase orders not yet delivered.",
    ),
    (
        "view_today_news",
        Access::Both,
        false,
        "Today's news items (only when news is enabled).",
    ),
    (
        "memory_write",
        Access::Both,
        true,
        "Store a note under a key; persists across days.",
    ),
    (
        "memory_read",
        Access::Both,
        false,
        "Read one note, or all notes when no key is given.",
    ),
    (
        "set_macro_strategy",
        Access::StrategyOnly,
        true,
        "Replace the macro strategy (list of statements).",
    ),
    (
        "set_execute_strategy",
        Access::StrategyOnly,
        true,
        "Replace the seven-field execution strategy.",
    ),
    (
        "set_action",
        Access::StrategyOnly,
        true,
        "Replace today's planned actions.",
    ),
    (
        "finish_strategy_phase",
        Access::StrategyOnly,
        true,
        "Freeze the strategy and enter the execution phase.",
    ),
    (
        "place_order",
        Access::ExecutionOnly,
        true,
        "Order units of a SKU from one of its suppliers; paid immediately.",
    ),
    (
        "modify_sku_price",
        Access::ExecutionOnly,
        true,
        "Set a SKU's shelf price.",
    ),
    (
        "end_today",
        Access::ExecutionOnly,
        true,
        "Close the day and run the overnight transition.",
    ),
];

pub fn tool_access(tool: &str) -> Option<Access> {
    TOOLS.iter().find(|t| t.0 == tool).map(|t| t.1)
}

pub fn is_mutating(tool: &str) -> bool {
    TOOLS.iter().any(|t| t.0 == tool && t.2)
}

pub fn tool_names() -> Vec<&'static str> {
    TOOLS.iter().map(|t| t.0).collect()
}

fn parameters_of(tool: &str) -> Value {
    let sku = json!({"type": "string"});
    let day = json!({"oneOf": [{"type": "integer"}, {"type": "string", "description": "YYYY-MM-DD or MM/DD/YY"}]});
    let (props, required): (Value, Vec<&str>) = match tool {
        "view_sku_sales_history" => (json!({"sku_id": sku, "start_day": day, "end_day": day}), vec!["sku_id"]),
        "view_sku_avg_ratings" => (json!({"sku_id": sku}), vec![]),
        "view_sku_recent_reviews" => (json!({"sku_id": sku, "window": {"type": "integer"}}), vec!["sku_id"]),
        "view_current_date_supplier_prices" => (json!({"sku_id": sku}), vec![]),
        "memory_write" => (
            json!({"key": {"type": "string"}, "text": {"type": "string"}}),
            vec!["key", "text"],
        ),
        "memory_read" => (json!({"key": {"type": "string"}}), vec![]),
        "set_macro_strategy" => (
            json!({"macro_strategy": {"type": "array", "items": {"type": "string"}}}),
            vec!["macro_strategy"],
        ),
        "set_execute_strategy" => (
            json!({"execute_strategy": {"type": "object"}}),
            vec!["execute_strategy"],
        ),
        "set_action" => (json!({"today_action": {"type": "array"}}), vec!["today_action"]),
        "place_order" => (
            json!({"sku_id": sku, "supplier_id": {"type": "string"}, "quantity": {"type": "integer"}}),
            vec!["sku_id", "supplier_id", "quantity"],
        ),
        "modify_sku_price" => (
            json!({"sku_id": sku, "new_price": {"type": "number"}}),
            vec!["sku_id", "new_price"],
        ),
        _ => (json!({}), vec![]),
    };
    json!({"type": "object", "properties": props, "required": required})
}

pub fn tool_definitions() -> Vec<ToolDefinition> {
    TOOLS
        .iter()
        .map(|&(name, access, mutating, description)| ToolDefinition {
            name,
            access,
            mutating,
            description,
            parameters: parameters_of(name),
        })
        .collect()
}

type Outcome = Result<Value, ToolError>;

/// Routes one call. The phase gate is checked before arguments are looked
/// at, so a gated call never touches state.
pub(crate) fn dispatch(ep: &mut Episode, tool: &str, arguments: &Value) -> (Outcome, Vec<ActionFlag>) {
    let Some(access) = tool_access(tool) else {
        return (
            Err(ToolError::new(
                ErrorCode::UnknownTool,
                format!("no tool named {tool:?}"),
            )),
            Vec::new(),
        );
    };
    let phase = ep.state.phase;
    if !access.allows(phase) {
        return (
            Err(ToolError::new(
                ErrorCode::PhaseGate,
                format!("{tool} is not available in the {} phase", phase.as_str()),
            )),
            Vec::new(),
        );
    }
    let args = match arguments {
        Value::Object(m) => m.clone(),
        Value::Null => Map::new(),
        _ => return (Err(ToolError::args("arguments must be an object")), Vec::new()),
    };
    match tool {
        "place_order" | "modify_sku_price" => {
            let call = ToolCall {
                call_id: 0,
                tool: tool.to_string(),
                arguments: Value::Object(args.clone()),
            };
            let (verdict, flags) = validate_action(&call, ep);
            let outcome = verdict.and_then(|()| {
                if tool == "place_order" {
                    place_order(ep, &args)
                } else {
                    modify_price(ep, &args)
                }
            });
            (outcome, flags)
        }
        _ => (run_tool(ep, tool, &args), Vec::new()),
    }
}

fn run_tool(ep: &mut Episode, tool: &str, args: &Map<String, Value>) -> Outcome {
    match tool {
        "view_funds_and_date" => Ok(view_funds(ep)),
        "view_inventory" => Ok(view_inventory(ep)),
        "view_sku_sales_history" => view_sales_history(ep, args),
        "view_sku_avg_ratings" => view_ratings(ep, args),
        "view_sku_recent_reviews" => view_recent_reviews(ep, args),
        "view_current_date_supplier_prices" => view_supplier_prices(ep, args),
        "view_current_orders" => Ok(json!({"orders": ep.state.orders.pending().collect::<Vec<_>>()})),
        "view_today_news" => view_news(ep),
        "memory_write" => {
            let key = req_str(args, "key")?;
            let text = req_str(args, "text")?;
            ep.state.memory.insert(key.clone(), text);
            Ok(json!({"key": key, "stored": true}))
        }
        "memory_read" => match opt_str(args, "key")? {
            Some(key) => Ok(json!({"key": key, "text": ep.state.memory.get(&key)})),
            None => Ok(json!({"notes": ep.state.memory})),
        },
        "set_macro_strategy" => {
            let items = req(args, "macro_strategy")?;
            let list: Vec<String> = serde_json::from_value(items.clone())
                .map_err(|e| ToolError::args(format!("macro_strategy must be a list of strings: {e}")))?;
            ep.state.strategy.macro_strategy = list.clone();
            Ok(json!({"macro_strategy": list}))
        }
        "set_execute_strategy" => {
            let value = req(args, "execute_strategy")?;
            let plan: ExecuteStrategy =
                serde_json::from_value(value.clone()).map_err(|e| ToolError::args(format!("execute_strategy: {e}")))?;
            if !ep.config.news.enabled && !plan.news_to_monitor.is_empty() {
                return Err(ToolError::args("news_to_monitor must be empty when news is disabled"));
            }
            ep.state.strategy.execute_strategy = plan;
            Ok(json!({"execute_strategy": ep.state.strategy.execute_strategy}))
        }
        "set_action" => {
            let value = req(args, "today_action")?;
            let actions: Vec<PlannedAction> =
                serde_json::from_value(value.clone()).map_err(|e| ToolError::args(format!("today_action: {e}")))?;
            if let Some(a) = actions.iter().find(|a| !ACTION_TOOLS.contains(&a.tool.as_str())) {
                return Err(ToolError::args(format!(
                    "today_action may only contain {}, got {}",
                    ACTION_TOOLS.join(" or "),
                    a.tool
                )));
            }
            if actions.iter().any(|a| !a.arguments.is_object()) {
                return Err(ToolError::args("today_action arguments must be objects"));
            }
            ep.state.strategy.today_action = actions;
            Ok(json!({"today_action": ep.state.strategy.today_action}))
        }
        "finish_strategy_phase" => {
            ep.close_strategy_phase();
            Ok(json!({"day": ep.state.day, "phase": "execution", "strategy": ep.snapshot}))
        }
        "end_today" => {
            ep.close_day().map_err(ToolError::from)?;
            Ok(json!({
                "day_report": ep.pending_report(),
                "episode_end": ep.state.ended.map(|r| r.as_str()),
            }))
        }
        other => Err(ToolError::new(
            ErrorCode::Internal,
            format!("tool {other} has no handler"),
        )),
    }
}

/// Accept/reject decision plus advisory flags for `place_order` and
/// `modify_sku_price`.
pub fn validate_action(call: &ToolCall, ep: &Episode) -> (Result<(), ToolError>, Vec<ActionFlag>) {
    let mut flags = Vec::new();
    let empty = Map::new();
    let args = call.arguments.as_object().unwrap_or(&empty);
    let verdict = (|| {
        let sku_id = req_str(args, "sku_id")?;
        let catalog = ep.catalog();
        let j = catalog.index_of(&sku_id);
        match call.tool.as_str() {
            "modify_sku_price" => {
                let price = req(args, "new_price")?
                    .as_f64()
                    .ok_or_else(|| ToolError::args("new_price must be a number"))?;
                if j.is_none() {
                    flags.push(ActionFlag::new(FlagKind::UnknownSku, sku_id.clone()));
                    return Err(Error::unknown_sku(sku_id).into());
                }
                if !(price > 0.0) || !Money::from_f64(price).is_positive() {
                    flags.push(ActionFlag::new(FlagKind::PriceOutOfRange, format!("new_price {price}")));
                    return Err(ToolError::new(
                        ErrorCode::InvalidAction,
                        format!("price must be positive, got {price}"),
                    ));
                }
                if price > PRICE_FLAG_THRESHOLD {
                    flags.push(ActionFlag::new(
                        FlagKind::PriceOutOfRange,
                        format!("new_price {price} exceeds {PRICE_FLAG_THRESHOLD}"),
                    ));
                }
                Ok(())
            }
            "place_order" => {
                let supplier_id = req_str(args, "supplier_id")?;
                let quantity = req(args, "quantity")?
                    .as_i64()
                    .ok_or_else(|| ToolError::args("quantity must be an integer"))?;
                let Some(j) = j else {
                    flags.push(ActionFlag::new(FlagKind::UnknownSku, sku_id.clone()));
                    return Err(Error::unknown_sku(sku_id).into());
                };
                if ep.suppliers().find(j, &supplier_id).is_none() {
                    flags.push(ActionFlag::new(FlagKind::UnknownSupplier, supplier_id.clone()));
                    return Err(Error::unknown_supplier(format!("{supplier_id} for sku {sku_id}")).into());
                }
                let capacity = ep.config.inventory_capacity;
                if quantity > (QUANTITY_FLAG_SHARE * capacity as f64) as i64 {
                    flags.push(ActionFlag::new(
                        FlagKind::QuantityImplausible,
                        format!("quantity {quantity} against capacity {capacity}"),
                    ));
                }
                if quantity <= 0 || quantity as u64 > capacity {
                    return Err(ToolError::new(
                        ErrorCode::InvalidAction,
                        format!("quantity must lie in [1, {capacity}], got {quantity}"),
                    ));
                }
                Ok(())
            }
            other => Err(ToolError::args(format!("{other} is not an action tool"))),
        }
    })();
    (verdict, flags)
}

fn place_order(ep: &mut Episode, args: &Map<String, Value>) -> Outcome {
    let sku_id = req_str(args, "sku_id")?;
    let supplier_id = req_str(args, "supplier_id")?;
    let quantity = req(args, "quantity")?.as_i64().unwrap_or(0) as u64;
    let catalog = ep.state.catalog.clone();
    let j = catalog.index_of(&sku_id).ok_or_else(|| Error::unknown_sku(&sku_id))?;
    let supplier = ep
        .state
        .suppliers
        .find(j, &supplier_id)
        .cloned()
        .ok_or_else(|| Error::unknown_supplier(&supplier_id))?;
    let unit = supply::quote(&catalog, j, &supplier, &ep.state.news);
    let cost = unit.times(quantity);
    ep.state.finance.debit_procurement(cost)?;
    let order = ep
        .state
        .orders
        .place_order(&supplier, quantity, unit, ep.state.day, &mut ep.rng.leadtime)?;
    ep.state.procurement_today += cost;
    Ok(json!({
        "order": order,
        "total_cost": cost,
        "funds": ep.state.finance.funds,
    }))
}

fn modify_price(ep: &mut Episode, args: &Map<String, Value>) -> Outcome {
    let sku_id = req_str(args, "sku_id")?;
    let price = Money::from_f64(req(args, "new_price")?.as_f64().unwrap_or(0.0));
    let j = ep
        .catalog()
        .index_of(&sku_id)
        .ok_or_else(|| Error::unknown_sku(&sku_id))?;
    let old = ep.state.prices[j];
    ep.state.prices[j] = price;
    Ok(json!({"sku_id": sku_id, "old_price": old, "new_price": price}))
}

fn view_funds(ep: &Episode) -> Value {
    let s = &ep.state;
    let net_worth = crate::finance::net_worth(&s.finance, &s.inventory, &s.catalog, s.day);
    json!({
        "day": s.day,
        "date": ep.date_string(s.day),
        "weekday": ep.config.date_of(s.day).format("%A").to_string(),
        "phase": s.phase,
        "funds": s.finance.funds,
        "daily_rent": ep.config.daily_rent,
        "consecutive_unpaid_rent_days": s.finance.consecutive_unpaid_rent_days,
        "net_worth": net_worth,
    })
}

fn view_inventory(ep: &Episode) -> Value {
    let s = &ep.state;
    let day = s.day;
    let skus: Vec<Value> = (0..s.catalog.len())
        .map(|j| {
            let sku = s.catalog.sku(j);
            let lots: Vec<Value> = s
                .inventory
                .lots(j)
                .iter()
                .map(|l| json!({"age": l.age(day), "quantity": l.quantity}))
                .collect();
            json!({
                "sku_id": sku.sku_id,
                "description": sku.description,
                "category": sku.category_id,
                "shelf_life_days": sku.shelf_life_days,
                "price": s.prices[j],
                "on_hand": s.inventory.on_hand(j),
                "lots": lots,
                "queued": s.inventory.pending_units(j),
                "on_order": s.orders.pending_units(&sku.sku_id),
            })
        })
        .collect();
    json!({
        "capacity": s.inventory.capacity(),
        "on_hand_total": s.inventory.total_on_hand(),
        "free_space": s.inventory.free_space(),
        "queued_total": s.inventory.pending_total(),
        "skus": skus,
    })
}

fn sku_arg(ep: &Episode, args: &Map<String, Value>) -> Result<usize, ToolError> {
    let sku_id = req_str(args, "sku_id")?;
    ep.catalog()
        .index_of(&sku_id)
        .ok_or_else(|| Error::unknown_sku(sku_id).into())
}

/// Day index from an integer or a `YYYY-MM-DD` / `MM/DD/YY` date.
fn parse_day(ep: &Episode, v: &Value) -> Result<i64, ToolError> {
    if let Some(d) = v.as_i64() {
        return Ok(d);
    }
    let Some(text) = v.as_str() else {
        return Err(ToolError::args("days must be integers or date strings"));
    };
    if let Ok(d) = text.trim().parse::<i64>() {
        return Ok(d);
    }
    let date = NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(text.trim(), "%m/%d/%y"))
        .map_err(|_| ToolError::args(format!("unrecognised date {text:?}")))?;
    Ok(ep.config.day_of(date))
}

fn view_sales_history(ep: &Episode, args: &Map<String, Value>) -> Outcome {
    let j = sku_arg(ep, args)?;
    let last = i64::from(ep.state.day) - 1;
    let start = match args.get("start_day") {
        Some(v) if !v.is_null() => parse_day(ep, v)?,
        _ => 1,
    };
    let end = match args.get("end_day") {
        Some(v) if !v.is_null() => Some(parse_day(ep, v)?),
        _ => None,
    };
    if let Some(end) = end.filter(|&e| start > e) {
        return Err(ToolError::args(format!("start_day {start} is after end_day {end}")));
    }
    // Only completed days have records.
    let (lo, hi) = (start.max(1), end.unwrap_or(last).min(last));
    let records: Vec<Value> = ep.state.sales_history[j]
        .iter()
        .filter(|r| (lo..=hi).contains(&i64::from(r.day)))
        .map(|r| json!({"day": r.day, "date": ep.date_string(r.day), "units": r.units, "price": r.price}))
        .collect();
    Ok(json!({"sku_id": ep.catalog().sku(j).sku_id, "records": records}))
}

fn view_ratings(ep: &Episode, args: &Map<String, Value>) -> Outcome {
    let s = &ep.state;
    let window = ep.config.recent_window;
    if args.get("sku_id").is_some_and(|v| !v.is_null()) {
        let j = sku_arg(ep, args)?;
        return Ok(serde_json::to_value(s.reviews.aggregate(&s.catalog, j, s.day, window)).expect("serializable"));
    }
    Ok(json!({"ratings": s.reviews.aggregates(&s.catalog, s.day, window), "recent_window": window}))
}

fn view_recent_reviews(ep: &Episode, args: &Map<String, Value>) -> Outcome {
    let j = sku_arg(ep, args)?;
    let window = match args.get("window") {
        Some(v) if !v.is_null() => {
            let w = v
                .as_u64()
                .ok_or_else(|| ToolError::args("window must be a positive integer"))?;
            if w == 0 {
                return Err(ToolError::args("window must be a positive integer"));
            }
            u32::try_from(w).unwrap_or(u32::MAX)
        }
        _ => ep.config.recent_window,
    };
    let reviews: Vec<Value> = ep
        .state
        .reviews
        .recent(j, ep.state.day, window)
        .iter()
        .map(|r| json!({"day": r.day, "rating": r.rating}))
        .collect();
    Ok(json!({"sku_id": ep.catalog().sku(j).sku_id, "window": window, "reviews": reviews}))
}

fn view_supplier_prices(ep: &Episode, args: &Map<String, Value>) -> Outcome {
    let only = if args.get("sku_id").is_some_and(|v| !v.is_null()) {
        Some(sku_arg(ep, args)?)
    } else {
        None
    };
    let quotes = supply::quote_prices(ep.catalog(), ep.suppliers(), &ep.state.news, only);
    Ok(json!({"day": ep.state.day, "quotes": quotes}))
}

fn view_news(ep: &Episode) -> Outcome {
    if !ep.config.news.enabled {
        return Err(Error::NewsDisabled.into());
    }
    let items: Vec<Value> = ep
        .state
        .news
        .iter()
        .map(|e| json!({"event_id": e.event_id, "text": e.text, "created_day": e.created_day}))
        .collect();
    Ok(json!({"day": ep.state.day, "news": items}))
}

fn req<'a>(args: &'a Map<String, Value>, key: &str) -> Result<&'a Value, ToolError> {
    args.get(key)
        .filter(|v| !v.is_null())
        .ok_or_else(|| ToolError::args(format!("missing argument {key}")))
}

fn req_str(args: &Map<String, Value>, key: &str) -> Result<String, ToolError> {
    req(args, key)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| ToolError::args(format!("{key} must be a string")))
}

fn opt_str(args: &Map<String, Value>, key: &str) -> Result<Option<String>, ToolError> {
    match args.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(ToolError::args(format!("{key} must be a string"))),
    }
}
