"""Bundled benchmark circuits."""
from __future__ import annotations

import json
from importlib import resources

from .qasm import Circuit, parse_qasm

BENCHMARKS = ("adder_n4", "basis_trotter_n4", "fredkin_n3", "basis_change_n3", "wstate_n3")
SYNTHETIC = ("ghz_n3", "toffoli_chain_n4")


def _dir():
    return resources.files(__package__) / "corpus"


def names(include_synthetic: bool = False) -> list[str]:
    return list(BENCHMARKS) + (list(SYNTHETIC) if include_synthetic else [])


def qasm_text(name: str) -> str:
    path = _dir() / f"{name}.qasm"
    if not path.is_file():
        raise KeyError(f"no bundled circuit named {name!r}")
    return path.read_text(encoding="utf-8")


def load(name: str) -> Circuit:
    return parse_qasm(qasm_text(name))


def reference() -> dict[str, dict]:
    """Reference per-benchmark figures, keyed by benchmark name."""
    return json.loads((_dir() / "reference.json").read_text(encoding="utf-8"))["rows"]
