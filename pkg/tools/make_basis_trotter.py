"""Generate corpus/basis_trotter_n4.qasm.

First-order Trotter evolution of a 4-site chain with XX + YY hopping, ZZ
interaction and an on-site Z field, starting from |0101> rotated into a
delocalised basis.  Rerun after changing the constants; the file is
committed so the corpus stays hermetic.
"""
import math
from pathlib import Path

STEPS = 4
DT = 0.25
HOP, INTER, FIELD = 1.0, 0.5, (0.3, -0.2, 0.1, 0.4)
BONDS = [(0, 1), (2, 3), (1, 2)]

out = [
    "// 4-site XX+YY+ZZ chain with on-site field, first-order Trotter, "
    f"{STEPS} steps of dt={DT}",
    "OPENQASM 2.0;",
    'include "qelib1.inc";',
    "qreg q[4];",
    "creg c[4];",
    "x q[1];",
    "x q[3];",
    "h q[0];",
    "cx q[0],q[1];",
]


def term(a, b, theta, pre, post):
    for g in pre:
        out.append(f"{g} q[{a}];")
        out.append(f"{g} q[{b}];")
    out.append(f"cx q[{a}],q[{b}];")
    out.append(f"rz({theta!r}) q[{b}];")
    out.append(f"cx q[{a}],q[{b}];")
    for g in post:
        out.append(f"{g} q[{a}];")
        out.append(f"{g} q[{b}];")


for _ in range(STEPS):
    for a, b in BONDS:
        term(a, b, 2 * HOP * DT, ["h"], ["h"])
        term(a, b, 2 * HOP * DT, ["rx(pi/2)"], ["rx(-pi/2)"])
        term(a, b, 2 * INTER * DT, [], [])
    for q, hz in enumerate(FIELD):
        out.append(f"rz({2 * hz * DT!r}) q[{q}];")

out.extend(f"measure q[{q}] -> c[{q}];" for q in range(4))
path = Path(__file__).resolve().parents[1] / "src/phasecloak/corpus/basis_trotter_n4.qasm"
path.write_text("\n".join(out) + "\n")
print(path)
