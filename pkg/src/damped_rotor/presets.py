"""Figure-reproduction presets: k = I = 1, A = (3, 3, 7)."""
import hashlib
import json

from .dynamics import BodyParams, State

FIGURE_PARAMS = {"A": [3.0, 3.0, 7.0], "I": 1.0, "k": 1.0}

PRESETS = {
    # W0 and W10 parallel, both in the A1 = A2 eigenplane
    "fig-stable": {
        "params": FIGURE_PARAMS,
        "omega0": [1.5, 3.0, 0.0],
        "omega10": [-1.0, -2.0, 0.0],
        "expect_axis": "Plane12",
    },
    # fifth coordinate of fig-stable lowered by 0.01
    "fig-unstable": {
        "params": FIGURE_PARAMS,
        "omega0": [1.5, 3.0, 0.0],
        "omega10": [-1.0, -2.01, 0.0],
        "expect_axis": "Axis3",
    },
    # violates the A1 = A2 < A3 attainability condition yet spins up about A3
    "fig-attain": {
        "params": FIGURE_PARAMS,
        "omega0": [1.0, 0.0, 0.0],
        "omega10": [0.0, 1.0, 0.0],
        "expect_axis": "Axis3",
    },
}


def preset(name: str) -> tuple[BodyParams, State]:
    try:
        entry = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    p = entry["params"]
    return BodyParams.from_moments(p["A"], p["I"], p["k"]), State(entry["omega0"], entry["omega10"])


def preset_checksum() -> str:
    blob = json.dumps(PRESETS, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
