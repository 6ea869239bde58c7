"""Oracle-equivalence suites behind ``su11wigner verify``.

Each suite compares a closed-form route against truncated-Fock ground truth
whose cutoff has passed the doubling gate, and returns a JSON-ready dict.
"""

from __future__ import annotations

import math
from typing import Any, Callable

import numpy as np

from .core import HalfInteger, HyperboloidPoint
from .interferometer import InterferometerConfig, output_state_direct, output_wigner_covariant
from .oracle import GateReport, build_operators, converge, disentangled_kernel_element, fock_wigner, kernel_elements
from .special import dfunction_matrix
from .states import build_tmsv, decompose, su11_coherent_state
from .wigner import GridSpec, PhaseConvention, wigner_grid, wigner_values

__all__ = ["SUITES", "TOLERANCES", "run_suite", "run_all"]

TOLERANCES = {"dfunc": 1e-8, "kernel": 1e-8, "wigner": 1e-6, "interferometer": 1e-6}


def _result(name: str, residual: float, worst: dict | None, gates: list[GateReport], cases: int) -> dict[str, Any]:
    tol = TOLERANCES[name]
    gate_ok = all(g.passed for g in gates)
    passed = bool(residual <= tol and gate_ok)
    return {
        "suite": name,
        "max_residual": residual,
        "tolerance": tol,
        "cases": cases,
        "gate": {"passed": gate_ok, "checks": [g.as_dict() for g in gates]},
        "passed": passed,
        "failing_case": None if passed else worst,
    }


def _track(state: dict, residual: float, case: dict) -> None:
    if residual > state["max"]:
        state["max"] = residual
        state["case"] = case


def suite_dfunc(ks=("1/2", "1", "3/2", "2", "5/2", "3"), count: int = 11, taus=(0.3, 1.0, 2.0, 3.0)) -> dict:
    """d-functions against the disentangled kernel and the Fock squeeze matrix."""
    worst = {"max": 0.0, "case": None}
    gates = []
    cases = 0
    for k in ks:
        kk = HalfInteger.of(k)
        d = kk.twice - 1
        for tau in taus:
            dm = dfunction_matrix(kk, tau, count)
            # disentangled kernel at (tau/2, 0) carries 2 d(tau) e^{i pi mu'}
            pt = HyperboloidPoint(0.5 * tau, 0.0)
            for i in range(count):
                for j in range(count):
                    el = disentangled_kernel_element(kk, kk + i, kk + j, pt)
                    ref = el / (2.0 * complex(math.cos(math.pi * (float(kk) + j)), math.sin(math.pi * (float(kk) + j))))
                    res = abs(dm[i, j] - ref)
                    cases += 1
                    _track(worst, res, {"check": "disentangled", "k": str(kk), "i": i, "j": j, "tau": tau})

            def sector_rows(n: int, tau=tau) -> np.ndarray:
                return build_operators(n).sector(d).squeeze_rows(complex(0.5 * tau), count)[:, :count].real

            fock, gate = converge(sector_rows, max(40, d + 2 * count))
            gates.append(gate)
            res = float(np.max(np.abs(fock - dm)))
            cases += count * count
            _track(worst, res, {"check": "fock_squeeze", "k": str(kk), "tau": tau})
    return _result("dfunc", worst["max"], worst["case"], gates, cases)


def suite_kernel(k_max: str = "3", count: int = 16, taus=(0.5, 1.5, 2.5), chis=(0.0, 1.1, -2.3)) -> dict:
    """Disentangled kernel elements against the boxed Fock kernel."""
    worst = {"max": 0.0, "case": None}
    gates = []
    cases = 0
    top = HalfInteger.of(k_max).twice
    points = [HyperboloidPoint(t, c) for t in taus for c in chis]
    for twice_k in range(1, top + 1):
        kk = HalfInteger(twice_k)
        fock, gate = kernel_elements(kk, count, points)
        gates.append(gate)
        for p_i, pt in enumerate(points):
            for i in range(count):
                for j in range(count):
                    el = disentangled_kernel_element(kk, kk + i, kk + j, pt)
                    res = abs(el - fock[p_i, i, j])
                    cases += 1
                    _track(worst, res, {"k": str(kk), "i": i, "j": j, "tau": pt.tau, "chi": pt.chi})
    return _result("kernel", worst["max"], worst["case"], gates, cases)


def _test_states():
    return [
        ("tmsv xi=0.3", build_tmsv(0.3)),
        ("tmsv xi=0.485", build_tmsv(0.485)),
        ("tmsv xi=0.6", build_tmsv(0.6)),
        ("su11_coherent k=1 xi=0.4e^{0.5i}", su11_coherent_state(1, 0.4 * np.exp(0.5j))),
        ("su11_coherent k=3/2 xi=0.35e^{-1.2i}", su11_coherent_state("3/2", 0.35 * np.exp(-1.2j))),
    ]


def suite_wigner(n_points: int = 200, tau_max: float = 2.0, seed: int = 2024) -> dict:
    """Closed-form Wigner values against the Fock oracle (literal convention)."""
    rng = np.random.default_rng(seed)
    worst = {"max": 0.0, "case": None}
    gates = []
    cases = 0
    for label, st in _test_states():
        tau = rng.uniform(0.0, tau_max, n_points)
        chi = rng.uniform(-math.pi, math.pi, n_points)
        points = [HyperboloidPoint(t, c) for t, c in zip(tau, chi)]
        ref, gate = fock_wigner(st, points)
        gates.append(gate)
        dec = decompose(st)
        ana = wigner_values(dec, [p.tau for p in points], [p.chi for p in points], PhaseConvention.LITERAL)
        # relative residual; an absolute floor only guards exact zeros of the field
        res = np.abs(ana - ref) / np.maximum(np.abs(ref), 1e-12)
        cases += n_points
        i = int(np.argmax(res))
        _track(worst, float(res[i]), {"state": label, "tau": points[i].tau, "chi": points[i].chi,
                                      "analytic": [ana[i].real, ana[i].imag], "oracle": [ref[i].real, ref[i].imag]})
    return _result("wigner", worst["max"], worst["case"], gates, cases)


def suite_interferometer(n_grid: int = 41, seed: int = 7) -> dict:
    """Möbius-covariant output field against direct Fock propagation."""
    rng = np.random.default_rng(seed)
    grid = GridSpec.disk(n_grid)
    scenarios = [("tmsv xi=0.5", build_tmsv(0.5), InterferometerConfig(0.5, 0.0, math.pi / 2))]
    st = su11_coherent_state("3/2", 0.3 * np.exp(0.8j))
    scenarios.append(("su11_coherent k=3/2", st, InterferometerConfig(float(rng.uniform(0, 0.8)),
                                                                     float(rng.uniform(-math.pi, math.pi)),
                                                                     float(rng.uniform(-math.pi, math.pi)))))
    worst = {"max": 0.0, "case": None}
    gates = []
    cases = 0
    for label, state, cfg in scenarios:
        cov = output_wigner_covariant(decompose(state), cfg, grid)
        out = output_state_direct(state, cfg)
        g = out.provenance["gate"]
        gates.append(GateReport(g["passed"], tuple(g["cutoffs"]), g["max_change"], g["tol"]))
        direct = wigner_grid(decompose(out), grid)
        res = np.abs(cov.values - direct.values)
        cases += res.size
        i = int(np.argmax(res))
        _track(worst, float(res[i]), {"state": label, "config": cfg.to_dict(), "xi": [cov.points.xi[i].real, cov.points.xi[i].imag]})
    return _result("interferometer", worst["max"], worst["case"], gates, cases)


SUITES: dict[str, Callable[[], dict]] = {
    "dfunc": suite_dfunc,
    "kernel": suite_kernel,
    "wigner": suite_wigner,
    "interferometer": suite_interferometer,
}


def run_suite(name: str) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()


def run_all(names=None) -> dict:
    names = list(SUITES) if names is None else list(names)
    results = {n: run_suite(n) for n in names}
    return {"suites": results, "passed": all(r["passed"] for r in results.values())}
