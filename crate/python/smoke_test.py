#!/usr/bin/env python3
"""Smoke test for the qmlbk_py extension module.

Builds the cdylib with cargo if needed, loads it directly from the target
directory, and exercises the main bindings end to end. Exits non-zero on
the first failed check.

Usage: python3 python/smoke_test.py [--release]
"""

import importlib.util
import math
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module(profile: str):
    subprocess.run(
        ["cargo", "build", "-p", "qmlbk-py"]
        + (["--release"] if profile == "release" else []),
        cwd=ROOT,
        check=True,
    )
    libdir = ROOT / "target" / profile
    for stem in ("libqmlbk_py.so", "libqmlbk_py.dylib", "qmlbk_py.dll"):
        lib = libdir / stem
        if lib.exists():
            break
    else:
        sys.exit(f"no qmlbk_py cdylib under {libdir}")
    spec = importlib.util.spec_from_file_location("qmlbk_py", lib)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def check(name: str, condition: bool):
    print(f"{'ok  ' if condition else 'FAIL'} {name}")
    if not condition:
        sys.exit(1)


def main():
    profile = "release" if "--release" in sys.argv[1:] else "debug"
    q = load_module(profile)

    # Bell state from the circuit builder.
    bell = q.Circuit(2)
    bell.h(0)
    bell.cnot(0, 1)
    amps = bell.run()
    r = 1 / math.sqrt(2)
    check(
        "bell state amplitudes",
        max(abs(a - e) + abs(b) for (a, b), e in zip(amps, [r, 0, 0, r])) < 1e-12,
    )

    # f(x; theta) = cos(theta) for a single RY measured in Z.
    c = q.Circuit(1)
    c.ry(0, param=0)
    c.rz(0, data=0)
    model = q.Model.reuploading(c, q.Observable.single(1, 0, "Z"))
    check("model eval", abs(model.eval([0.3], [0.7]) - math.cos(0.3)) < 1e-12)
    g = model.gradient([0.3], [0.7])
    check("parameter-shift gradient", abs(g[0] + math.sin(0.3)) < 1e-12)

    # Every mapping must agree with the source model.
    for name, mapped in [
        ("approximate", q.map_approximate(model, 0.1)),
        ("exact simple", q.map_exact_simple(model)),
        ("exact nested", q.map_exact_nested(model, 0.1)),
    ]:
        target, report = mapped
        tol = 0.1 if name == "approximate" else 1e-9
        eq = q.verify_equivalence(model, target, trials=50, tolerance=tol, seed=7)
        check(f"{name} mapping ({report['kind']})", eq["pass"])

    # JSON round trip.
    check("model json round trip", q.Model.from_json(model.to_json()).eval([0.3], [0.7]) == model.eval([0.3], [0.7]))

    # Train a tiny explicit model on labels from a fixed teacher.
    var = q.Circuit(2)
    var.ry(0, param=0)
    var.ry(1, param=1)
    student = q.Model.explicit_havlicek(2, var, q.Observable.single(2, 0, "Z"))
    inputs = [[0.1 * i, 0.05 * i - 0.3] for i in range(12)]
    labels = [student.eval([0.4, -0.2], x) for x in inputs]
    trained, result = q.train(student, inputs, labels, steps=150, seed=3)
    check("training reduces loss", result["loss_trace"][-1] < 0.05 * result["loss_trace"][0])

    # Kernel interpolation is exact on the training set.
    km = q.fit_kernel(student, inputs, labels, lam=0.0)
    worst = max(abs(km.eval(x) - y) for x, y in zip(inputs, labels))
    check("kernel interpolation", worst < 1e-8)

    gram = q.gram_matrix(student, inputs[:5])
    check("gram unit diagonal", all(abs(gram[i][i] - 1) < 1e-12 for i in range(5)))

    # Parity circuit computes the planted parity exactly.
    par = q.Model.parity(4)
    theta = q.parity_params(4, [0, 2])
    xs = [1.0, -1.0, -1.0, 1.0]
    check("parity circuit", abs(par.eval(theta, xs) - xs[0] * xs[2]) < 1e-9)

    csv = q.separation_experiment([4], trials=20, seed=1)
    check("separation experiment csv", csv.splitlines()[0].startswith("d,k,"))

    print("all smoke tests passed")


if __name__ == "__main__":
    main()
