"""Smoke test for the storesim_py extension module.

Build first with `cargo build -p storesim-py`; the script copies the built
library next to a temporary import path. Set STORESIM_PY_LIB to point at a
specific build instead.
"""

import json
import os
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_library() -> Path:
    explicit = os.environ.get("STORESIM_PY_LIB")
    if explicit:
        return Path(explicit)
    for profile in ("release", "debug"):
        for name in ("libstoresim_py.so", "libstoresim_py.dylib"):
            candidate = ROOT / "target" / profile / name
            if candidate.exists():
                return candidate
    sys.exit("storesim_py library not found; run `cargo build -p storesim-py` first")


def load_module():
    lib = locate_library()
    target = Path(tempfile.mkdtemp(prefix="storesim_py_")) / "storesim_py.so"
    shutil.copy(lib, target)
    sys.path.insert(0, str(target.parent))
    import storesim_py

    return storesim_py


def main() -> None:
    sim = load_module()

    names = sim.tool_names()
    assert len(names) == 17 and "place_order" in names, names
    assert set(sim.prompt_templates()) == {"strategy_phase", "execution_phase", "macro_judge"}

    probs, outside = sim.choice_probabilities([0.0])
    assert probs == [0.5] and outside == 0.5

    stats = sim.instability([0.8, 0.6, 0.9])
    assert abs(stats["std_diff"] - 0.25) < 1e-12 and abs(stats["tv"] - 0.5) < 1e-12

    empty = {"focus_skus": [], "sku_supplier_mapping": [], "news_to_monitor": [],
             "skus_to_reorder": [], "price_adjustments": [], "sku_to_monitor": [], "other": []}
    a = {"day": 1, "macro_strategy": [], "today_action": [], "execute_strategy": dict(empty, focus_skus=["A", "B"])}
    b = {"day": 2, "macro_strategy": [], "today_action": [], "execute_strategy": dict(empty, focus_skus=["B", "C"])}
    assert abs(sim.execution_similarity(a, b) - 0.8333) < 1e-4

    ep = sim.Episode("easy", seed=42)
    assert (ep.day, ep.phase) == (1, "strategy")
    funds = ep.call("view_funds_and_date")
    assert funds["ok"] and funds["result"]["funds"] == 10000.0, funds

    before = ep.state_hash()
    gated = ep.call("place_order", {"sku_id": "x", "supplier_id": "y", "quantity": 1})
    assert not gated["ok"] and gated["error"]["code"] == "phase_gate", gated
    assert ep.state_hash() == before

    assert ep.call("finish_strategy_phase")["ok"]
    assert ep.phase == "execution"
    end = ep.call("end_today")
    assert end["ok"] and end["result"]["day_report"]["day"] == 1
    records = ep.take_completed()
    assert len(records) == 1 and records[0]["day"] == 1
    record = ep.run_day("heuristic")
    assert record["day"] == 2 and ep.day == 3

    first = sim.run_rollout("easy", 42, "null")
    second = sim.run_rollout("easy", 42, "null")
    assert first["days"] == 45 and first["reason"] == "rent_default", first["days"]
    assert first["state_hash"] == second["state_hash"]

    short = sim.run_rollout("easy", 43, "heuristic", max_days=20)
    assert short["days"] == 20 and short["report"]["metrics"]["avg_daily_sales"] > 0

    try:
        sim.Episode("nightmare")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown preset accepted")

    print(json.dumps({"smoke_test": "ok", "tools": len(names), "null_days": first["days"]}))


if __name__ == "__main__":
    main()
