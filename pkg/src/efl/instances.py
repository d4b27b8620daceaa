"""Instance files: the JSON formats the CLI reads, plus built-in demos.

Every instance file carries ``"schema": "efl/1"`` and a ``"kind"`` of
``extremal``, ``utility``, ``halfspace`` or ``hybrid``; optional
``"params"`` holds search defaults that command-line flags override.
"""

from __future__ import annotations

import json

from .core import InputError
from .hybrid import (
    HybridInstance,
    Measure,
    interval_share_oracle,
    max_measure_oracle,
)
from .preferences import (
    ExtremalInstance,
    HalfspaceSystem,
    Valuation,
    default_eps,
    extremal_preferences,
    halfspace_preferences,
    utility_preferences,
)

SCHEMA = "efl/1"
KINDS = ("extremal", "utility", "halfspace", "hybrid")


def load_instance(path):
    """Parse and validate an instance file; InputError on anything malformed."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read instance file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("instance file must hold a JSON object")
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise InputError(f"unsupported schema {schema!r}, expected {SCHEMA!r}")
    kind = data.get("kind")
    if kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}, got {kind!r}")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise InputError("params must be an object")
    return data


def _require(data, key, kind):
    if key not in data:
        raise InputError(f"{kind} instance needs field {key!r}")
    return data[key]


def build_oracle(data):
    """Preference oracle for a cut-space instance (extremal/utility/halfspace)."""
    kind = data["kind"]
    if kind == "extremal":
        r = int(_require(data, "r", kind))
        eps = data.get("eps")
        if eps is None:
            eps = default_eps(r)
        inst = ExtremalInstance(r, tuple(float(v) for v in eps))
        return extremal_preferences(inst)
    if kind == "utility":
        players = _require(data, "players", kind)
        if not isinstance(players, list) or not players:
            raise InputError("utility instance needs a nonempty players list")
        vals = []
        for spec in players:
            if "weights" in spec:
                vals.append(Valuation.from_weights(spec["weights"]))
            else:
                vals.append(Valuation(spec["breakpoints"], spec["densities"]))
        arity = int(data.get("arity", len(vals)))
        tie_tol = float(data.get("tie_tol", 0.0))
        return utility_preferences(vals, arity=arity, tie_tol=tie_tol)
    if kind == "halfspace":
        system = HalfspaceSystem.from_json(data)
        return halfspace_preferences(system, is_hungry=bool(data.get("is_hungry", False)))
    raise InputError(f"kind {kind!r} does not define a cut-space oracle")


def build_hybrid(data):
    """HybridInstance from a hybrid-kind instance file."""
    if data["kind"] != "hybrid":
        raise InputError(f"expected a hybrid instance, got kind {data['kind']!r}")
    p = int(_require(data, "p", "hybrid"))
    mdata = _require(data, "measure", "hybrid")
    mu = Measure(mdata["breakpoints"], mdata["densities"])
    odata = _require(data, "oracle", "hybrid")
    name = odata.get("name")
    if name == "max-measure-boxes":
        oracle = max_measure_oracle(p, mu)
    elif name == "own-interval-share":
        oracle = interval_share_oracle(odata["intervals"])
    else:
        raise InputError(
            f"unknown hybrid oracle {name!r}; built-ins: "
            "'max-measure-boxes', 'own-interval-share'"
        )
    equi_tol = data.get("equi_tol")
    return HybridInstance(p, oracle, mu, None if equi_tol is None else float(equi_tol))


# ---------------------------------------------------------------------------
# Built-in demo instances (also handy in tests and docs)
# ---------------------------------------------------------------------------


def demo_uniform_hybrid(p, equi_tol):
    """Uniform measure, everyone prefers the heaviest boxes."""
    return {
        "schema": SCHEMA,
        "kind": "hybrid",
        "p": p,
        "measure": {"breakpoints": [0.0, 1.0], "densities": [1.0]},
        "oracle": {"name": "max-measure-boxes"},
        "equi_tol": equi_tol,
    }


def demo_interleaved_hybrid(equi_tol=0.05):
    """Three players with disjoint pet intervals; mass concentrated after them.

    With only 2p-2 = 4 tiles this instance admits no favourable division:
    equipartition forces two cut points inside the mass support, leaving
    a single cut for the three pet intervals.
    """
    return {
        "schema": SCHEMA,
        "kind": "hybrid",
        "p": 3,
        "measure": {
            "breakpoints": [0.0, 0.7, 1.0],
            "densities": [0.0, 1.0 / 0.3],
        },
        "oracle": {
            "name": "own-interval-share",
            "intervals": [[0.05, 0.15], [0.25, 0.35], [0.45, 0.55]],
        },
        "equi_tol": equi_tol,
    }
