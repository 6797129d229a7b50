"""Smoke test for the `iet` extension module.

Build first with `cargo build --release -p iet-python`, then run
`python3 python/smoke_test.py`. The script loads target/release/libiet.so
directly when the module is not installed.
"""

import importlib.machinery
import importlib.util
import pathlib
import sys


def load():
    try:
        import iet  # noqa: F401

        return sys.modules["iet"]
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libiet.so", "libiet.dylib", "iet.dll"):
        path = root / "target" / "release" / name
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("iet", str(path))
            spec = importlib.util.spec_from_file_location("iet", str(path), loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("iet extension not found; run `cargo build --release -p iet-python`")


def main():
    iet = load()
    assert iet.SCHEMA_VERSION == 1

    rot = iet.Iet(["3/5", "2/5"], [2, 1])
    assert rot.evaluate("1/5") == "3/5"
    assert rot.evaluate_inverse("3/5") == "1/5"
    assert [k for k, _ in rot.orbit("0", 2)] == [-2, -1, 0, 1]
    assert rot.check_idoc(10)["status"] == "Collision"

    golden = iet.Iet(["-1/2+1/2*sqrt(5)", "3/2-1/2*sqrt(5)"], [2, 1])
    assert golden.discontinuities == ["-1/2+1/2*sqrt(5)"]
    assert golden.check_idoc(1000) == {"status": "Ok", "depth": 1000}

    induced = golden.induce("1/2")
    assert induced["s"] == 3
    assert sum(p["return_time"] for p in induced["pieces"]) > 3

    prof = golden.profile("1/2", 10)
    assert prof["rho_prime_n"] == "-29/4+13/4*sqrt(5)"

    series = golden.psi_records("1/2", 2000)
    assert series["valid"] and series["psi_hat"] > 1 / 48

    stack = golden.build_tall_stack(100)
    assert stack["verify"]["status"] == "Ok"
    assert stack["distinct"] and stack["height"] >= 100

    rows = golden.scan_critical(["1/4", "1/2"], 500)
    assert [r["classification"] for r in rows] == ["PsiPositiveEvidence"] * 2

    scan = golden.eigenvalue_scan("1/2", 2000, grid_size=64)
    assert abs(scan["v_n"][0] - 1.0) < 1e-12

    try:
        iet.Iet(["1/2", "1/2"], [1, 1])
    except ValueError as e:
        assert "perm" in str(e)
    else:
        raise AssertionError("invalid permutation accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
