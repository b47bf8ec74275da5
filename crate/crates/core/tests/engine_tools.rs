use serde_json::{json, Value};

use storesim::config::EpisodeConfig;
use storesim::engine::{Episode, Phase};
use storesim::policy::{run_day, run_episode, HeuristicAgent, ScriptedAgent};
use storesim::toolapi::{self, ErrorCode};

fn easy() -> Episode {
    Episode::from_preset("easy", 42).unwrap()
}

fn to_execution(ep: &mut Episode) {
    let r = ep.call("finish_strategy_phase", json!({}));
    assert!(r.ok, "{:?}", r.error);
    assert_eq!(ep.phase(), Phase::Execution);
}

fn cheapest_supplier(ep: &Episode, j: usize) -> String {
    ep.suppliers()
        .for_sku(j)
        .iter()
        .min_by_key(|s| s.base_cost)
        .unwrap()
        .supplier_id
        .clone()
}

/// Runs `days` heuristic days so sales history, reviews and orders exist.
fn warmed_up(days: u32) -> Episode {
    let mut ep = easy();
    let mut agent = HeuristicAgent::default();
    for _ in 0..days {
        run_day(&mut agent, &mut ep).unwrap();
    }
    ep
}

#[test]
fn fresh_episode_reports_initial_funds() {
    let mut ep = easy();
    let r = ep.call("view_funds_and_date", json!({}));
    assert!(r.ok);
    let v = r.result.unwrap();
    assert_eq!(v["funds"], json!(10000.0));
    assert_eq!(v["day"], json!(1));
    assert_eq!(v["date"], json!("1991-09-07"));
    assert_eq!(v["weekday"], json!("Saturday"));
    assert_eq!(v["phase"], json!("strategy"));
    assert_eq!(v["net_worth"], json!(10000.0));
}

#[test]
fn read_tools_leave_state_hash_unchanged() {
    let mut ep = warmed_up(12);
    let sku = ep.catalog().sku(3).sku_id.clone();
    let reads = [
        ("view_funds_and_date", json!({})),
        ("view_inventory", json!({})),
        ("view_sku_sales_history", json!({"sku_id": sku})),
        ("view_sku_avg_ratings", json!({})),
        ("view_sku_avg_ratings", json!({"sku_id": sku})),
        ("view_sku_recent_reviews", json!({"sku_id": sku, "window": 5})),
        ("view_current_date_supplier_prices", json!({"sku_id": sku})),
        ("view_current_orders", json!({})),
        ("memory_read", json!({})),
    ];
    for phase in [Phase::Strategy, Phase::Execution] {
        if phase == Phase::Execution {
            to_execution(&mut ep);
        }
        for (tool, args) in &reads {
            assert!(!toolapi::is_mutating(tool));
            let before = ep.state_hash();
            let r = ep.call(tool, args.clone());
            assert!(r.ok, "{tool}: {:?}", r.error);
            assert_eq!(ep.state_hash(), before, "{tool} changed the state");
        }
    }
}

#[test]
fn every_tool_is_listed_with_a_schema() {
    let defs = toolapi::tool_definitions();
    assert_eq!(defs.len(), 17);
    assert_eq!(toolapi::tool_names().len(), 17);
    for d in &defs {
        assert_eq!(d.parameters["type"], json!("object"), "{}", d.name);
        assert_eq!(toolapi::tool_access(d.name), Some(d.access));
    }
}

#[test]
fn unknown_sku_is_rejected_everywhere() {
    let mut ep = easy();
    for tool in [
        "view_sku_sales_history",
        "view_sku_avg_ratings",
        "view_sku_recent_reviews",
    ] {
        let r = ep.call(tool, json!({"sku_id": "440004627"}));
        assert_eq!(r.error_code(), Some(ErrorCode::UnknownSku), "{tool}");
    }
    to_execution(&mut ep);
    let r = ep.call("modify_sku_price", json!({"sku_id": "440004627", "new_price": 3.0}));
    assert_eq!(r.error_code(), Some(ErrorCode::UnknownSku));
    assert!(!r.flags.is_empty());
    let r = ep.call(
        "place_order",
        json!({"sku_id": "440004627", "supplier_id": "SUP_x_A", "quantity": 3}),
    );
    assert_eq!(r.error_code(), Some(ErrorCode::UnknownSku));
}

#[test]
fn unknown_supplier_and_insufficient_funds() {
    let mut ep = easy();
    to_execution(&mut ep);
    let sku = ep.catalog().sku(0).sku_id.clone();
    let other = ep.suppliers().for_sku(1)[0].supplier_id.clone();
    let r = ep.call(
        "place_order",
        json!({"sku_id": sku, "supplier_id": other, "quantity": 3}),
    );
    assert_eq!(r.error_code(), Some(ErrorCode::UnknownSupplier));

    let sup = cheapest_supplier(&ep, 0);
    let before = ep.state_hash();
    let r = ep.call(
        "place_order",
        json!({"sku_id": sku, "supplier_id": sup, "quantity": 10_000}),
    );
    let expensive = ep
        .suppliers()
        .for_sku(0)
        .iter()
        .all(|s| s.base_cost.cents() * 10_000 > 1_000_000);
    assert!(expensive, "fixture needs an order beyond the initial funds");
    assert_eq!(r.error_code(), Some(ErrorCode::InsufficientFunds));
    assert_eq!(ep.state_hash(), before);
}

#[test]
fn order_debits_funds_and_arrives_within_lead_time() {
    let mut ep = easy();
    to_execution(&mut ep);
    let sku = ep.catalog().sku(0).sku_id.clone();
    let sup = cheapest_supplier(&ep, 0);
    let r = ep.call(
        "place_order",
        json!({"sku_id": sku, "supplier_id": sup, "quantity": 40}),
    );
    assert!(r.ok, "{:?}", r.error);
    let v = r.result.unwrap();
    let total = v["total_cost"].as_f64().unwrap();
    assert!((v["funds"].as_f64().unwrap() - (10_000.0 - total)).abs() < 1e-9);
    let arrival = v["order"]["arrival_day"].as_u64().unwrap() as u32;
    let s = ep.suppliers().find(0, &sup).unwrap();
    assert!((1 + s.lead_time_min..=1 + s.lead_time_max).contains(&arrival));

    let mut agent = ScriptedAgent::null();
    ep.call("end_today", json!({}));
    ep.take_completed();
    while ep.day() <= arrival {
        run_day(&mut agent, &mut ep).unwrap();
    }
    let stocked = ep.state().inventory.on_hand(0) + ep.state().inventory.pending_units(0);
    // Every ordered unit is on hand, queued, or sold on its arrival day.
    let sold: u64 = ep.state().sales_history[0].iter().map(|r| r.units).sum();
    assert_eq!(stocked + sold, 40);
}

#[test]
fn phase_gate_blocks_without_side_effects() {
    let mut ep = easy();
    let sku = ep.catalog().sku(0).sku_id.clone();
    let before = ep.state_hash();
    for tool in ["place_order", "modify_sku_price", "end_today"] {
        let r = ep.call(tool, json!({"sku_id": sku, "new_price": 1.0}));
        assert_eq!(r.error_code(), Some(ErrorCode::PhaseGate), "{tool}");
    }
    assert_eq!(ep.state_hash(), before);
    to_execution(&mut ep);
    let before = ep.state_hash();
    for tool in [
        "set_macro_strategy",
        "set_execute_strategy",
        "set_action",
        "finish_strategy_phase",
    ] {
        let r = ep.call(tool, json!({}));
        assert_eq!(r.error_code(), Some(ErrorCode::PhaseGate), "{tool}");
    }
    assert_eq!(ep.state_hash(), before);
}

#[test]
fn unknown_tool_and_bad_arguments() {
    let mut ep = easy();
    assert_eq!(
        ep.call("teleport", json!({})).error_code(),
        Some(ErrorCode::UnknownTool)
    );
    assert_eq!(
        ep.call("view_inventory", json!([1])).error_code(),
        Some(ErrorCode::InvalidArguments)
    );
    assert_eq!(
        ep.call("set_macro_strategy", json!({"macro_strategy": "not a list"}))
            .error_code(),
        Some(ErrorCode::InvalidArguments)
    );
    let partial = json!({"execute_strategy": {"focus_skus": []}});
    assert_eq!(
        ep.call("set_execute_strategy", partial).error_code(),
        Some(ErrorCode::InvalidArguments)
    );
    assert_eq!(
        ep.call("view_today_news", json!({})).error_code(),
        Some(ErrorCode::NewsDisabled)
    );
    let action = json!({"today_action": [{"tool": "end_today", "arguments": {}}]});
    assert_eq!(
        ep.call("set_action", action).error_code(),
        Some(ErrorCode::InvalidArguments)
    );
}

#[test]
fn sales_history_accepts_dates_and_clips_range() {
    let mut ep = warmed_up(10);
    let sku = ep.catalog().sku(0).sku_id.clone();
    let days_of = |v: &Value| -> Vec<u64> {
        v["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["day"].as_u64().unwrap())
            .collect()
    };
    let all = ep
        .call("view_sku_sales_history", json!({"sku_id": sku}))
        .result
        .unwrap();
    assert_eq!(days_of(&all), (1..=10).collect::<Vec<_>>());

    let iso = ep
        .call(
            "view_sku_sales_history",
            json!({"sku_id": sku, "start_day": "1991-09-09", "end_day": "1991-09-11"}),
        )
        .result
        .unwrap();
    assert_eq!(days_of(&iso), vec![3, 4, 5]);
    let us = ep
        .call(
            "view_sku_sales_history",
            json!({"sku_id": sku, "start_day": "09/09/91", "end_day": 4}),
        )
        .result
        .unwrap();
    assert_eq!(days_of(&us), vec![3, 4]);

    let clipped = ep
        .call(
            "view_sku_sales_history",
            json!({"sku_id": sku, "start_day": -5, "end_day": 500}),
        )
        .result
        .unwrap();
    assert_eq!(days_of(&clipped), (1..=10).collect::<Vec<_>>());
    // The current day has no record yet.
    let future = ep
        .call(
            "view_sku_sales_history",
            json!({"sku_id": sku, "start_day": 11, "end_day": 20}),
        )
        .result
        .unwrap();
    assert!(days_of(&future).is_empty());

    let r = ep.call(
        "view_sku_sales_history",
        json!({"sku_id": sku, "start_day": 5, "end_day": 2}),
    );
    assert_eq!(r.error_code(), Some(ErrorCode::InvalidArguments));
    let r = ep.call(
        "view_sku_sales_history",
        json!({"sku_id": sku, "start_day": "yesterday"}),
    );
    assert_eq!(r.error_code(), Some(ErrorCode::InvalidArguments));
}

#[test]
fn strategy_fields_carry_over_until_replaced() {
    let mut ep = easy();
    let plan = json!({
        "focus_skus": ["a"], "sku_supplier_mapping": [], "news_to_monitor": [],
        "skus_to_reorder": [], "price_adjustments": [], "sku_to_monitor": ["b"], "other": []
    });
    assert!(
        ep.call("set_macro_strategy", json!({"macro_strategy": ["keep stock lean"]}))
            .ok
    );
    assert!(ep.call("set_execute_strategy", json!({"execute_strategy": plan})).ok);
    let mut agent = ScriptedAgent::null();
    let day1 = run_day(&mut agent, &mut ep).unwrap();
    assert_eq!(day1.strategy.macro_strategy, vec!["keep stock lean".to_string()]);

    assert!(
        ep.call("set_macro_strategy", json!({"macro_strategy": ["grow sales"]}))
            .ok
    );
    let day2 = run_day(&mut agent, &mut ep).unwrap();
    assert_eq!(day2.strategy.day, 2);
    assert_eq!(day2.strategy.macro_strategy, vec!["grow sales".to_string()]);
    assert_eq!(day2.strategy.execute_strategy, day1.strategy.execute_strategy);
    let day3 = run_day(&mut agent, &mut ep).unwrap();
    assert_eq!(day3.strategy.macro_strategy, day2.strategy.macro_strategy);
}

#[test]
fn news_to_monitor_needs_news() {
    let plan = json!({
        "focus_skus": [], "sku_supplier_mapping": [], "news_to_monitor": ["storm"],
        "skus_to_reorder": [], "price_adjustments": [], "sku_to_monitor": [], "other": []
    });
    let mut ep = easy();
    let r = ep.call("set_execute_strategy", json!({"execute_strategy": plan.clone()}));
    assert_eq!(r.error_code(), Some(ErrorCode::InvalidArguments));
    let mut hard = Episode::from_preset("hard", 42).unwrap();
    assert!(hard.call("set_execute_strategy", json!({"execute_strategy": plan})).ok);
    let news = hard.call("view_today_news", json!({}));
    assert!(news.ok);
}

#[test]
fn call_budget_force_closes_the_phase() {
    let mut config = EpisodeConfig::easy();
    config.call_budget = 3;
    let mut ep = Episode::new(config, 42).unwrap();
    for _ in 0..3 {
        assert!(ep.call("view_funds_and_date", json!({})).ok);
    }
    let r = ep.call("view_funds_and_date", json!({}));
    assert_eq!(r.error_code(), Some(ErrorCode::BudgetExceeded));
    assert_eq!(ep.phase(), Phase::Execution);
    for _ in 0..3 {
        assert!(ep.call("view_inventory", json!({})).ok);
    }
    let r = ep.call("view_inventory", json!({}));
    assert_eq!(r.error_code(), Some(ErrorCode::BudgetExceeded));
    assert_eq!(ep.day(), 2);
    assert_eq!(ep.phase(), Phase::Strategy);
    let done = ep.take_completed();
    assert_eq!(done.len(), 1);
    // Both over-budget calls are logged with the day they belong to.
    assert_eq!(done[0].tool_calls.len(), 8);
    assert!(done[0].tool_calls.last().unwrap().error.is_some());
}

#[test]
fn ended_episode_refuses_calls() {
    let mut ep = easy();
    let outcome = run_episode(&mut ScriptedAgent::null(), &mut ep, |_| Ok(())).unwrap();
    assert_eq!(outcome.days, 45);
    let r = ep.call("view_funds_and_date", json!({}));
    assert_eq!(r.error_code(), Some(ErrorCode::EpisodeOver));
}

#[test]
fn scripted_runs_are_reproducible() {
    let script = json!({"days": [
        {"strategy": [{"tool": "set_macro_strategy", "arguments": {"macro_strategy": ["stock up"]}}],
         "execution": [{"tool": "modify_sku_price", "arguments": {"sku_id": "placeholder", "new_price": 2.5}}]},
    ]});
    let run = || {
        let mut ep = easy();
        let mut agent = ScriptedAgent::from_json(&script.to_string()).unwrap();
        let mut lines = Vec::new();
        for _ in 0..5 {
            let d = run_day(&mut agent, &mut ep).unwrap();
            lines.push(serde_json::to_string(&d).unwrap());
        }
        (lines, ep.state_hash())
    };
    assert_eq!(run(), run());
}

#[test]
fn different_seeds_differ() {
    let a = warmed_up(3).state_hash();
    let mut ep = Episode::from_preset("easy", 43).unwrap();
    let mut agent = HeuristicAgent::default();
    for _ in 0..3 {
        run_day(&mut agent, &mut ep).unwrap();
    }
    assert_ne!(a, ep.state_hash());
}

#[test]
fn heuristic_survives_middle_preset_briefly() {
    let mut config = EpisodeConfig::middle();
    config.max_days = 20;
    let mut ep = Episode::new(config, 42).unwrap();
    let out = run_episode(&mut HeuristicAgent::default(), &mut ep, |_| Ok(())).unwrap();
    assert_eq!(out.days, 20);
    assert_eq!(ep.state().finance.consecutive_unpaid_rent_days, 0);
}

#[test]
fn sales_history_is_empty_on_day_one() {
    let mut ep = easy();
    let sku = ep.catalog().sku(0).sku_id.clone();
    for args in [json!({"sku_id": sku}), json!({"sku_id": sku, "start_day": 1})] {
        let r = ep.call("view_sku_sales_history", args);
        assert!(r.ok, "{:?}", r.error);
        assert_eq!(r.result.unwrap()["records"], json!([]));
    }
}
