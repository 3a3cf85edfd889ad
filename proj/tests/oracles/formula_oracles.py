#!/usr/bin/env python3
"""Recomputes the coverage and hallucination spot-check values from scratch.

  formula_oracles.py           print the values
  formula_oracles.py --write   refresh formula_values.json
  formula_oracles.py --check   fail if formula_values.json disagrees
"""
import json
import sys
from collections import Counter
from pathlib import Path

VALUES = Path(__file__).with_name("formula_values.json")


def alnum(s):
    return sum(ch.isascii() and ch.isalnum() for ch in s)


def coverage(source, rows):
    pool = Counter(tok for row in rows for cell in row for tok in cell.split())
    total = alnum(source)
    if total == 0:
        return 1.0
    uncovered = 0
    for tok in source.split():
        if pool[tok] > 0:
            pool[tok] -= 1
        else:
            uncovered += alnum(tok)
    return 1.0 - uncovered / total


def cell_coverage(source, cell):
    if not cell.strip() or alnum(cell) == 0 or cell.strip() in source:
        return 1.0
    available = Counter(source.split())
    found = 0
    for tok in cell.split():
        if available[tok] > 0:
            available[tok] -= 1
            found += alnum(tok)
    return found / alnum(cell)


def hallucination(source, rows):
    rows = [r for r in rows if r]
    if not rows:
        return 0.0
    return sum(sum(1.0 - cell_coverage(source, c) for c in r) / len(r) for r in rows) / len(rows)


CASES = {
    "coverage_revenue_cost": lambda: coverage("Revenue 750 Cost 320", [["Revenue", "750"], ["Cost", ""]]),
    # row 1: one fully traced cell, one half traced ("beta" found, "zzzz" not); row 2: one traced cell
    "hallucination_rows": lambda: hallucination("alpha beta gamma", [["alpha", "beta zzzz"], ["gamma"]]),
}


def compute():
    return {name: fn() for name, fn in CASES.items()}


def main(argv):
    values = compute()
    if "--write" in argv:
        VALUES.write_text(json.dumps(values, indent=2, sort_keys=True) + "\n")
    elif "--check" in argv:
        stored = json.loads(VALUES.read_text())
        bad = [k for k in values if abs(stored.get(k, float("nan")) - values[k]) > 1e-12]
        if bad:
            print("mismatch:", ", ".join(bad))
            return 1
    # hand arithmetic, independent of the helpers above
    assert abs(values["coverage_revenue_cost"] - (1 - 3 / 17)) < 1e-12
    assert abs(values["hallucination_rows"] - ((0 + 0.5) / 2 + 0) / 2) < 1e-12
    print(json.dumps(values, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
