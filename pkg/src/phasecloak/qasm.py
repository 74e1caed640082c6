"""OpenQASM 2.0 subset: circuit types, parser and emitter.

Only the gates in ``GATE_KINDS`` are accepted; everything in ``qelib1.inc``
that maps onto them is built in, so the include line is recognised but never
read from disk.  Angles are kept exactly as written (no reduction mod 2*pi).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

PHASE_KINDS = frozenset({"rz", "p", "s", "sdg", "t", "tdg"})

# name -> (number of qubits, number of angle parameters)
GATE_ARITY: dict[str, tuple[int, int]] = {
    "h": (1, 0), "x": (1, 0), "y": (1, 0), "z": (1, 0),
    "s": (1, 0), "sdg": (1, 0), "t": (1, 0), "tdg": (1, 0),
    "sx": (1, 0),
    "rz": (1, 1), "rx": (1, 1), "ry": (1, 1), "p": (1, 1),
    "cx": (2, 0), "cz": (2, 0), "swap": (2, 0),
    "ccx": (3, 0),
}
GATE_KINDS = frozenset(GATE_ARITY) | {"barrier", "measure"}

# spellings normalised on parse
_ALIASES = {"u1": "p", "CX": "cx", "cnot": "cx", "phase": "p"}


class QasmError(ValueError):
    """Base class for frontend errors."""


class QasmSyntaxError(QasmError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


class UnsupportedGateError(QasmError):
    def __init__(self, name: str, line: int | None = None, col: int | None = None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(f"{where}unsupported gate or statement '{name}'")
        self.name = name
        self.line = line
        self.col = col


class QasmIndexError(QasmError):
    pass


@dataclass(frozen=True)
class GateApp:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbits: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(a) for a in self.params))
        object.__setattr__(self, "clbits", tuple(int(c) for c in self.clbits))
        if self.kind not in GATE_KINDS:
            raise UnsupportedGateError(self.kind)
        if self.kind in GATE_ARITY:
            nq, npar = GATE_ARITY[self.kind]
            if len(self.qubits) != nq or len(self.params) != npar:
                raise ValueError(
                    f"{self.kind} takes {nq} qubit(s) and {npar} parameter(s), "
                    f"got {self.qubits} / {self.params}"
                )
        elif self.kind == "measure":
            if len(self.qubits) != 1 or len(self.clbits) != 1 or self.params:
                raise ValueError("measure takes one qubit and one classical bit")
        elif self.params:
            raise ValueError("barrier takes no parameters")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} applied to repeated qubits {self.qubits}")

    @property
    def is_phase(self) -> bool:
        return self.kind in PHASE_KINDS

    @property
    def angle(self) -> float:
        return self.params[0]


@dataclass(frozen=True)
class Circuit:
    """Gate sequence over one flat qubit index space.

    ``register_names`` maps each declared quantum register to ``(offset, size)``;
    ``creg_names`` does the same for classical registers.
    """

    qubit_count: int
    gates: tuple[GateApp, ...] = ()
    register_names: dict[str, tuple[int, int]] = field(default_factory=dict, compare=False)
    creg_names: dict[str, tuple[int, int]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.qubit_count < 0:
            raise ValueError("qubit_count must be non-negative")
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.qubit_count:
                    raise QasmIndexError(
                        f"{g.kind} on qubit {q} outside 0..{self.qubit_count - 1}"
                    )

    @property
    def clbit_count(self) -> int:
        if self.creg_names:
            return max(off + size for off, size in self.creg_names.values())
        return max((c + 1 for g in self.gates for c in g.clbits), default=0)

    def with_gates(self, gates) -> "Circuit":
        return Circuit(self.qubit_count, tuple(gates), dict(self.register_names),
                       dict(self.creg_names))

    def __len__(self) -> int:
        return len(self.gates)


# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>//[^\n]*)
  | (?P<nl>\n)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)
  | (?P<int>\d+)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[;,()\[\]{}+\-*/^=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QasmSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan,
          "exp": math.exp, "ln": math.log, "sqrt": math.sqrt}


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.qregs: dict[str, tuple[int, int]] = {}
        self.cregs: dict[str, tuple[int, int]] = {}
        self.nq = 0
        self.nc = 0
        self.gates: list[GateApp] = []

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise QasmSyntaxError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            self.error(f"expected '{text}', found '{self.tok.text or 'end of file'}'")
        return self.advance()

    def expect_kind(self, kind: str) -> _Tok:
        if self.tok.kind != kind:
            self.error(f"expected {kind}, found '{self.tok.text or 'end of file'}'")
        return self.advance()

    # grammar
    def parse(self) -> Circuit:
        t = self.tok
        if t.text != "OPENQASM":
            self.error("program must start with 'OPENQASM 2.0;'")
        self.advance()
        ver = self.advance()
        if ver.text not in ("2.0", "2"):
            self.error(f"unsupported OpenQASM version '{ver.text}'", ver)
        self.expect(";")
        while self.tok.kind != "eof":
            self.statement()
        return Circuit(self.nq, tuple(self.gates), dict(self.qregs), dict(self.cregs))

    def statement(self):
        t = self.tok
        if t.kind != "id":
            self.error(f"unexpected '{t.text}'")
        name = t.text
        if name == "include":
            self.advance()
            s = self.expect_kind("string")
            if s.text != '"qelib1.inc"':
                raise UnsupportedGateError(f"include {s.text}", s.line, s.col)
            self.expect(";")
        elif name in ("qreg", "creg"):
            self.advance()
            reg = self.expect_kind("id")
            self.expect("[")
            size = int(self.expect_kind("int").text)
            self.expect("]")
            self.expect(";")
            if reg.text in self.qregs or reg.text in self.cregs:
                self.error(f"register '{reg.text}' redeclared", reg)
            if name == "qreg":
                self.qregs[reg.text] = (self.nq, size)
                self.nq += size
            else:
                self.cregs[reg.text] = (self.nc, size)
                self.nc += size
        elif name == "barrier":
            self.advance()
            qubits: list[int] = []
            for arg in self.arglist(self.qregs):
                qubits.extend(q for q in arg if q not in qubits)
            self.expect(";")
            self.gates.append(GateApp("barrier", tuple(qubits)))
        elif name == "measure":
            self.advance()
            src = self.argument(self.qregs)
            self.expect_kind("arrow")
            dst = self.argument(self.cregs)
            self.expect(";")
            if len(src) != len(dst):
                self.error("measure register sizes differ", t)
            for q, c in zip(src, dst):
                self.gates.append(GateApp("measure", (q,), clbits=(c,)))
        elif name in ("if", "gate", "opaque", "reset", "U"):
            raise UnsupportedGateError(name, t.line, t.col)
        else:
            self.gate_call()

    def gate_call(self):
        t = self.advance()
        kind = _ALIASES.get(t.text, t.text)
        if kind not in GATE_ARITY:
            raise UnsupportedGateError(t.text, t.line, t.col)
        nq, npar = GATE_ARITY[kind]
        params: list[float] = []
        if self.tok.text == "(":
            self.advance()
            if self.tok.text != ")":
                params.append(self.expr())
                while self.tok.text == ",":
                    self.advance()
                    params.append(self.expr())
            self.expect(")")
        if len(params) != npar:
            self.error(f"gate '{t.text}' takes {npar} parameter(s), got {len(params)}", t)
        args = self.arglist(self.qregs)
        self.expect(";")
        if len(args) != nq:
            self.error(f"gate '{t.text}' takes {nq} qubit argument(s), got {len(args)}", t)
        # register broadcasting, as in qelib1: whole registers zip element-wise
        sizes = {len(a) for a in args if len(a) > 1}
        if len(sizes) > 1:
            self.error("broadcast registers have different sizes", t)
        width = sizes.pop() if sizes else 1
        for k in range(width):
            qs = tuple(a[k] if len(a) > 1 else a[0] for a in args)
            if len(set(qs)) != len(qs):
                self.error(f"gate '{t.text}' repeats a qubit", t)
            self.gates.append(GateApp(kind, qs, tuple(params)))

    def arglist(self, regs) -> list[list[int]]:
        args = [self.argument(regs)]
        while self.tok.text == ",":
            self.advance()
            args.append(self.argument(regs))
        return args

    def argument(self, regs) -> list[int]:
        name = self.expect_kind("id")
        if name.text not in regs:
            self.error(f"undeclared register '{name.text}'", name)
        off, size = regs[name.text]
        if self.tok.text != "[":
            return list(range(off, off + size))
        self.advance()
        idx_tok = self.expect_kind("int")
        self.expect("]")
        idx = int(idx_tok.text)
        if idx >= size:
            raise QasmIndexError(
                f"line {idx_tok.line}, column {idx_tok.col}: index {idx} out of range "
                f"for register '{name.text}' of size {size}"
            )
        return [off + idx]

    # expressions: standard precedence, ^ right-associative
    def expr(self) -> float:
        val = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self) -> float:
        val = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            rhs = self.unary()
            if op == "*":
                val *= rhs
            else:
                if rhs == 0:
                    self.error("division by zero")
                val /= rhs
        return val

    def unary(self) -> float:
        if self.tok.text == "-":
            self.advance()
            return -self.unary()
        if self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> float:
        base = self.atom()
        if self.tok.text == "^":
            self.advance()
            return base ** self.unary()
        return base

    def atom(self) -> float:
        t = self.tok
        if t.kind in ("real", "int"):
            self.advance()
            return float(t.text)
        if t.kind == "id":
            self.advance()
            if t.text == "pi":
                return math.pi
            if t.text in _FUNCS:
                self.expect("(")
                v = self.expr()
                self.expect(")")
                return _FUNCS[t.text](v)
            self.error(f"unknown identifier '{t.text}' in expression", t)
        if t.text == "(":
            self.advance()
            v = self.expr()
            self.expect(")")
            return v
        self.error(f"unexpected '{t.text}' in expression")


def parse_qasm(text: str) -> Circuit:
    """Parse OpenQASM 2.0 source into a :class:`Circuit`."""
    return _Parser(text).parse()


def _fmt_angle(a: float) -> str:
    return format(a, ".17g")


def _qubit_names(circuit: Circuit) -> list[str]:
    names = [f"q[{i}]" for i in range(circuit.qubit_count)]
    for reg, (off, size) in circuit.register_names.items():
        for k in range(size):
            names[off + k] = f"{reg}[{k}]"
    return names


def _regs_or_default(regs: dict, count: int, default: str) -> dict:
    covered = sum(size for _, size in regs.values())
    if regs and covered == count:
        return regs
    return {default: (0, count)} if count else {}


def emit_qasm(circuit: Circuit) -> str:
    """Serialise a circuit; ``parse_qasm(emit_qasm(c)) == c``."""
    qregs = _regs_or_default(circuit.register_names, circuit.qubit_count, "q")
    cregs = _regs_or_default(circuit.creg_names, circuit.clbit_count, "c")
    qnames = _qubit_names(Circuit(circuit.qubit_count, (), qregs))
    cnames = [f"c[{i}]" for i in range(circuit.clbit_count)]
    for reg, (off, size) in cregs.items():
        for k in range(size):
            cnames[off + k] = f"{reg}[{k}]"

    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    for reg, (_, size) in sorted(qregs.items(), key=lambda kv: kv[1][0]):
        lines.append(f"qreg {reg}[{size}];")
    for reg, (_, size) in sorted(cregs.items(), key=lambda kv: kv[1][0]):
        lines.append(f"creg {reg}[{size}];")
    for g in circuit.gates:
        if g.kind == "measure":
            lines.append(f"measure {qnames[g.qubits[0]]} -> {cnames[g.clbits[0]]};")
            continue
        args = ",".join(qnames[q] for q in g.qubits)
        if g.params:
            params = ",".join(_fmt_angle(a) for a in g.params)
            lines.append(f"{g.kind}({params}) {args};")
        else:
            lines.append(f"{g.kind} {args};")
    return "\n".join(lines) + "\n"

