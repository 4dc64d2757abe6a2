"""Writes the small exact fixtures in this directory."""

import itertools
import json
from fractions import Fraction as F


def subsets(items, lo=1):
    for k in range(lo, len(items) + 1):
        yield from itertools.combinations(items, k)


def dst(menu, alpha, order, w):
    best = min(menu, key=order.index)
    total = sum(w[x] for x in menu)
    return {x: alpha * (x == best) + (1 - alpha) * w[x] / total for x in menu}


def write(path, universe, rows, default=None):
    menus, prob = {}, {}
    for menu, row in rows.items():
        mid = "_".join(sorted(menu)) or "EMPTY"
        menus[mid] = sorted(menu)
        prob[mid] = {x: str(v) for x, v in sorted(row.items())}
        if default is not None:
            prob[mid]["__default__"] = str(default[menu])
    doc = {"universe": universe, "menus": menus, "prob": prob}
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def luce(path, u):
    w = {x: F(k + 1) for k, x in enumerate(u)}
    rows = {m: {x: w[x] / sum(w[y] for y in m) for x in m} for m in subsets(u, 2)}
    write(path, u, rows)


def cyclic():
    u = ["x", "y", "z"]
    q, t, third = F(3, 4), F(1, 4), F(1, 3)
    rows = {
        ("x", "y"): {"x": q, "y": t},
        ("y", "z"): {"y": q, "z": t},
        ("x", "z"): {"x": t, "z": q},
        ("x", "y", "z"): {"x": third, "y": third, "z": third},
    }
    write("cyclic.json", u, rows)


def worked_observed():
    """All pairs, but only two of the four triples."""
    u = ["t", "x", "y", "z"]
    lo, hi = F(2, 5), F(3, 5)
    rows = {(a, "x"): {"x": lo, a: hi} for a in ["t", "y", "z"]}
    rows[("y", "z")] = {"y": hi, "z": lo}
    rows[("t", "y")] = {"y": hi, "t": lo}
    rows[("t", "z")] = {"z": hi, "t": lo}
    for b, c in [("y", "z"), ("t", "z")]:
        rows[("x", b, c)] = {"x": F(11, 35), b: F(12, 35), c: F(12, 35)}
    write("worked_observed.json", u, rows)


def dstpa():
    u = ["x", "y", "z"]
    alpha, order = F(1, 4), ["x", "y", "z"]
    w = {"x": F(1, 6), "y": F(1, 3), "z": F(1, 2)}
    phi = {"x": F(1, 2), "y": F(2, 3), "z": F(3, 4)}

    def mass(t):
        out = F(1)
        for x in u:
            out *= phi[x] if x in t else 1 - phi[x]
        return out

    rows, default = {(): {}}, {(): F(1)}
    for s in subsets(u):
        within = sum(mass(t) for t in subsets(s, 0))
        row = {x: F(0) for x in s}
        for t in subsets(s):
            for x, p in dst(t, alpha, order, w).items():
                row[x] += mass(t) * p
        rows[s] = {x: v / within for x, v in row.items()}
        default[s] = mass(()) / within
    write("dstpa.json", u, rows, default)


if __name__ == "__main__":
    luce("luce.json", ["x", "y", "z", "t"])
    luce("luce3.json", ["x", "y", "z"])
    cyclic()
    worked_observed()
    dstpa()
