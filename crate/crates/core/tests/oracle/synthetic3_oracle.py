#!/usr/bin/env python3
"""Exact-rational hand evaluation of every DEMATEL stage for data/synthetic-3x2.json.

Independent of the Rust implementation: fractions throughout, the 3x3 inverse
by the adjugate formula, and no shared code. Writes tests/golden/synthetic-3x2/oracle.json.
"""
import json
from fractions import Fraction as F
from pathlib import Path

HERE = Path(__file__).resolve().parent
CRATE = HERE.parent.parent

SCALE = {
    "NI": (0, 0, 0), "ELI": (0, 0, 1), "VLI": (0, 1, 2), "MLI": (1, 2, 3),
    "LI": (2, 3, 4), "MI": (3, 4, 5), "HI": (4, 5, 6), "MHI": (5, 6, 7),
    "VHI": (6, 7, 8), "EHI": (7, 8, 9), "VELI": (8, 9, 10),
}
LEVELS = list(SCALE.values())


def fuzzify(term):
    tenths = LEVELS[term] if isinstance(term, int) else SCALE[term]
    return tuple(F(x, 10) for x in tenths)


def inverse3(a):
    (a11, a12, a13), (a21, a22, a23), (a31, a32, a33) = a
    det = (a11 * (a22 * a33 - a23 * a32)
           - a12 * (a21 * a33 - a23 * a31)
           + a13 * (a21 * a32 - a22 * a31))
    adj = [
        [a22 * a33 - a23 * a32, a13 * a32 - a12 * a33, a12 * a23 - a13 * a22],
        [a23 * a31 - a21 * a33, a11 * a33 - a13 * a31, a13 * a21 - a11 * a23],
        [a21 * a32 - a22 * a31, a12 * a31 - a11 * a32, a11 * a22 - a12 * a21],
    ]
    return [[x / det for x in row] for row in adj]


def matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def graded(t):
    return (t[0] + 2 * t[1] + t[2]) / 4


def main():
    doc = json.loads((CRATE / "data" / "synthetic-3x2.json").read_text())
    grids = [[[fuzzify(t) for t in row] for row in e["matrix"]] for e in doc["experts"]]
    n, k = len(grids[0]), len(grids)

    agg = [[tuple(sum(g[i][j][c] for g in grids) / k for c in range(3)) for j in range(n)] for i in range(n)]
    c = max(sum(agg[i][j][2] for j in range(n)) for i in range(n))
    norm = [[tuple(x / c for x in agg[i][j]) for j in range(n)] for i in range(n)]

    layers = []
    for comp in range(3):
        g = [[norm[i][j][comp] for j in range(n)] for i in range(n)]
        i_minus_g = [[(1 if i == j else 0) - g[i][j] for j in range(n)] for i in range(n)]
        layers.append(matmul(g, inverse3(i_minus_g)))
    total = [[tuple(layers[comp][i][j] for comp in range(3)) for j in range(n)] for i in range(n)]
    crisp = [[graded(total[i][j]) for j in range(n)] for i in range(n)]

    d = [tuple(sum(total[i][j][comp] for j in range(n)) for comp in range(3)) for i in range(n)]
    r = [tuple(sum(total[i][j][comp] for i in range(n)) for comp in range(3)) for j in range(n)]
    prom = [tuple(a + b for a, b in zip(d[i], r[i])) for i in range(n)]
    rel = [tuple(a - b for a, b in zip(d[i], r[i])) for i in range(n)]
    prom_c = [graded(p) for p in prom]
    rel_c = [graded(p) for p in rel]
    order = sorted(range(n), key=lambda i: (-prom_c[i], i))
    rank = [order.index(i) + 1 for i in range(n)]
    cls = ["net-cause" if x > 0 else "net-effect" if x < 0 else "neutral" for x in rel_c]
    threshold = sum(sum(row) for row in crisp) / (n * n)
    edges = [[i, j] for i in range(n) for j in range(n) if i != j and crisp[i][j] >= threshold]

    fl = lambda m: [[[float(x) for x in t] for t in row] for row in m]
    out = {
        "aggregated": fl(agg),
        "normalization_constant": float(c),
        "normalized": fl(norm),
        "total": fl(total),
        "crisp_total": [[float(x) for x in row] for row in crisp],
        "d": [[float(x) for x in t] for t in d],
        "r": [[float(x) for x in t] for t in r],
        "d_crisp": [float(graded(t)) for t in d],
        "r_crisp": [float(graded(t)) for t in r],
        "prominence": [[float(x) for x in t] for t in prom],
        "relation": [[float(x) for x in t] for t in rel],
        "prominence_crisp": [float(x) for x in prom_c],
        "relation_crisp": [float(x) for x in rel_c],
        "class": cls,
        "rank": rank,
        "threshold": float(threshold),
        "edges": edges,
    }
    target = CRATE / "tests" / "golden" / "synthetic-3x2" / "oracle.json"
    target.write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main()
