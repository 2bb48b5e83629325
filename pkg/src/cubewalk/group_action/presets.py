"""Preset construction from shorthand strings and JSON specs."""
from __future__ import annotations

import json
import re
from pathlib import Path

from .base import GroupPreset
from .product import Product
from .raag import RAAG, FreeAbelian, FreeGroup, pentagon


class PresetError(ValueError):
    pass


def from_spec(spec) -> GroupPreset:
    """Build a preset from a shorthand string or a JSON-like dict."""
    if isinstance(spec, GroupPreset):
        return spec
    if isinstance(spec, str):
        return _from_shorthand(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise PresetError(f"unrecognised preset spec: {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "raag":
            graph = spec["graph"]
            return RAAG(graph["vertices"], [tuple(e) for e in graph.get("edges", [])], spec.get("label"))
        if kind == "free":
            return FreeGroup(int(spec["rank"]), spec.get("names"))
        if kind == "abelian":
            return FreeAbelian(int(spec["rank"]), spec.get("names"))
        if kind == "product":
            return Product([from_spec(f) for f in spec["factors"]], spec.get("names"))
    except (KeyError, TypeError, ValueError) as exc:
        raise PresetError(f"bad {kind} preset: {exc}") from exc
    raise PresetError(f"unknown preset kind {kind!r}")


def _from_shorthand(text: str) -> GroupPreset:
    text = text.strip()
    if text.startswith("raag:"):
        path = Path(text[5:])
        try:
            data = json.loads(path.read_text())
        except (OSError, ValueError) as exc:
            raise PresetError(f"cannot read graph file {path}: {exc}") from exc
        if "kind" not in data:
            data = {"kind": "raag", "graph": data}
        return from_spec(data)
    if text.lstrip().startswith("{"):
        try:
            return from_spec(json.loads(text))
        except ValueError as exc:
            raise PresetError(str(exc)) from exc
    parts = text.lower().split("x")
    if len(parts) > 1:
        return Product([_atom(p) for p in parts])
    return _atom(text.lower())


def _atom(token: str) -> GroupPreset:
    if token == "pentagon":
        return pentagon()
    m = re.fullmatch(r"([fz])(\d+)", token)
    if not m:
        raise PresetError(f"unknown preset {token!r}")
    rank = int(m.group(2))
    if rank < 1:
        raise PresetError("rank must be positive")
    return FreeGroup(rank) if m.group(1) == "f" else FreeAbelian(rank)


def is_euclidean_factor(preset: GroupPreset) -> bool:
    """Abelian factors have no facing triples: no strongly separated pairs, no linear drift."""
    return getattr(preset, "is_abelian", False)
