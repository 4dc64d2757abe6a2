"""Smoke test for the pydst extension.

Build and run from the repository root:

    cargo build -p dst-python --features extension-module
    python3 python/smoke_test.py

The script looks for the compiled library under target/ when pydst is not
installed.
"""

import importlib.util
import json
import pathlib
import shutil
import sys
import tempfile
from fractions import Fraction

ROOT = pathlib.Path(__file__).resolve().parent.parent


def import_pydst():
    try:
        import pydst

        return pydst
    except ImportError:
        pass
    for profile in ("debug", "release"):
        lib = ROOT / "target" / profile / "libpydst.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            shutil.copy(lib, tmp / "pydst.so")
            spec = importlib.util.spec_from_file_location("pydst", tmp / "pydst.so")
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("pydst not found; build it with: cargo build -p dst-python --features extension-module")


def main():
    pydst = import_pydst()
    weights = {"x": "1/10", "y": "3/10", "z": "3/10", "t": "3/10"}
    order = ["x", "y", "z", "t"]

    exact = pydst.choice_probabilities("1/5", order, weights, exact=True)
    grand = exact[("t", "x", "y", "z")]
    assert grand == {"t": "6/25", "x": "7/25", "y": "6/25", "z": "6/25"}, grand

    data = pydst.choice_probabilities(Fraction(1, 5), order, weights)
    found = pydst.identify(data)
    assert found["order"] == order, found
    assert abs(found["alpha"] - 0.2) < 1e-9, found
    assert abs(found["weights"]["x"] - 0.1) < 1e-9, found

    exact_found = pydst.identify(exact, exact=True)
    assert exact_found["alpha"] == "1/5", exact_found

    axioms = pydst.check_axioms(data)
    assert axioms["passed"] and axioms["order"] == order, axioms
    assert axioms["consistent"] is False, axioms

    luce = {m: {a: Fraction(w) / sum(Fraction(weights[b]) for b in m) for a, w in ((a, weights[a]) for a in m)} for m in data}
    assert pydst.check_axioms(luce)["passed"] is False

    rr = pydst.read_data(str(ROOT / "data" / "rr2000" / "choices.csv"))
    assert rr[("x", "y")] == {"x": "17/25", "y": "8/25"}, rr
    fitted = pydst.fit(rr, order=order)
    assert abs(fitted["alpha"] - 0.625) < 1e-3, fitted

    problem = (ROOT / "data" / "examples" / "showcase_list.json").read_text()
    best = pydst.optimal_list(problem, exact=True)
    assert best["platform_utility"] == "8/15", best

    try:
        pydst.identify({("x", "y"): {"x": 0.5, "y": 0.5}})
    except ValueError:
        pass
    else:
        raise AssertionError("two options cannot be identified")

    print(json.dumps({"pydst": pydst.__version__, "alpha": found["alpha"], "fit_alpha": fitted["alpha"], "list": best["list"]}))
    print("smoke test passed")


if __name__ == "__main__":
    main()
