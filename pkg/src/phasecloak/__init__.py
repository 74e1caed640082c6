"""Key-based phase obfuscation of quantum circuits for untrusted compilers."""
from __future__ import annotations

from .keys import KeySpec, derive_keystream
from .obfuscation import PhaseRecord, deobfuscate, obfuscate
from .qasm import Circuit, GateApp, emit_qasm, parse_qasm
from .transpile import transpile

__version__ = "0.1.0"

__all__ = [
    "Circuit", "GateApp", "KeySpec", "PhaseRecord", "deobfuscate", "derive_keystream",
    "emit_qasm", "obfuscate", "parse_qasm", "transpile",
]
