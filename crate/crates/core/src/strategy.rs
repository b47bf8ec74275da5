//! The three-layer policy record: macro guidelines, a structured execution
//! plan and the day's concrete actions.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Tools a `today_action` entry may name.
pub const ACTION_TOOLS: [&str; 2] = ["place_order", "modify_sku_price"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkuSupplier {
    pub sku_id: String,
    pub supplier_id: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceAdjustment {
    pub sku_id: String,
    /// Kept verbatim; never interpreted by the engine.
    pub adjustment: Value,
}

/// Seven list-valued fields; all must be present.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecuteStrategy {
    pub focus_skus: Vec<Value>,
    pub sku_supplier_mapping: Vec<SkuSupplier>,
    pub news_to_monitor: Vec<Value>,
    pub skus_to_reorder: Vec<Value>,
    pub price_adjustments: Vec<PriceAdjustment>,
    pub sku_to_monitor: Vec<Value>,
    pub other: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannedAction {
    pub tool: String,
    pub arguments: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StrategyRecord {
    pub day: u32,
    pub macro_strategy: Vec<String>,
    pub execute_strategy: ExecuteStrategy,
    pub today_action: Vec<PlannedAction>,
}

/// Canonical string form of a list entry: strings as-is, anything else as
/// compact JSON.
pub fn canonical_entry(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn execute_strategy_requires_all_fields() {
        let full = json!({
            "focus_skus": ["A"], "sku_supplier_mapping": [{"sku_id": "A", "supplier_id": "S"}],
            "news_to_monitor": [], "skus_to_reorder": [], "price_adjustments": [{"sku_id": "A", "adjustment": "increase by 10%"}],
            "sku_to_monitor": [], "other": []
        });
        let parsed: ExecuteStrategy = serde_json::from_value(full.clone()).unwrap();
        assert_eq!(serde_json::to_value(&parsed).unwrap(), full);
        let mut missing = full.clone();
        missing.as_object_mut().unwrap().remove("other");
        assert!(serde_json::from_value::<ExecuteStrategy>(missing).is_err());
        let mut extra = full;
        extra["eighth"] = json!([]);
        assert!(serde_json::from_value::<ExecuteStrategy>(extra).is_err());
    }

    #[test]
    fn canonical_entries() {
        assert_eq!(canonical_entry(&json!("X")), "X");
        assert_eq!(canonical_entry(&json!({"a": 1})), "{\"a\":1}");
    }
}
