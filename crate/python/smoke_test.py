"""Smoke test for the halpern_lp extension module.

Build and install it first:

    pip install --no-build-isolation ./crates/python
"""

import json
import math
from pathlib import Path

import halpern_lp

FIXTURES = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures" / "mps" / "good"


def check_dense():
    lp = halpern_lp.Problem.from_dense([[1.0]], [1.0], [0.0])
    assert (lp.n_rows, lp.n_cols) == (1, 1)
    r = halpern_lp.solve(lp, tol=1e-8)
    assert r.status == "optimal", r
    assert abs(r.x[0] - 1.0) < 1e-6 and abs(r.y[0]) < 1e-6
    assert r.x_original is None


def check_mps():
    text = (FIXTURES / "transport.mps").read_text()
    lp = halpern_lp.Problem.from_mps(text)
    assert lp.name == "TRANSPORT"
    for scheme in ("halpern", "vanilla", "restarted-average"):
        r = halpern_lp.solve(lp, tol=1e-6, scheme=scheme)
        assert r.status == "optimal", (scheme, r)
        assert abs(r.primal_objective - 200.0) < 1e-3, (scheme, r)
    report = json.loads(r.to_json())
    assert report["status"] == "optimal"
    assert report["config"]["scheme"] == "restarted-average"

    fixed = halpern_lp.Problem.from_mps((FIXTURES / "spaced_names.fixed.mps").read_text(), fixed=True)
    r = halpern_lp.solve(fixed, restart="fixed:64")
    assert abs(r.primal_objective - 12.0) < 1e-6, r


def check_infeasible():
    lp = halpern_lp.Problem.from_mps((FIXTURES / "primal_infeasible.mps").read_text())
    r = halpern_lp.solve(lp)
    assert r.status == "primal_infeasible", r
    assert r.dual_ray is not None and r.primal_ray is None
    assert halpern_lp.validate_primal_infeasibility(lp, r.dual_ray).valid

    ok = halpern_lp.validate_primal_infeasibility(lp, [-1.0, 1.0])
    assert ok.valid and ok.orientation == "as_is"
    flipped = halpern_lp.validate_primal_infeasibility(lp, [1.0, -1.0])
    assert flipped.valid and flipped.orientation == "negated"
    assert not halpern_lp.validate_primal_infeasibility(lp, [0.0, 0.0]).valid

    dinf = halpern_lp.Problem.from_dense([[1.0, -1.0]], [0.0], [-1.0, 0.0])
    assert halpern_lp.validate_dual_infeasibility(dinf, [1.0, 1.0]).valid
    assert not halpern_lp.validate_dual_infeasibility(dinf, [1.0, 0.0]).valid
    assert halpern_lp.solve(dinf).status == "dual_infeasible"


def check_errors():
    lp = halpern_lp.Problem.from_dense([[1.0]], [1.0], [0.0])
    for kwargs in ({"tol": 0.0}, {"restart": "sometimes"}, {"scheme": "simplex"}, {"time_limit": 0.0}):
        try:
            halpern_lp.solve(lp, **kwargs)
        except ValueError:
            pass
        else:
            raise AssertionError(f"accepted {kwargs}")
    try:
        halpern_lp.Problem.from_mps("ROWS\n N obj\nBOGUS\n")
    except ValueError as e:
        assert "line 3" in str(e), e
    else:
        raise AssertionError("accepted a corrupt file")
    try:
        halpern_lp.validate_primal_infeasibility(lp, [1.0, 2.0])
    except ValueError:
        pass
    else:
        raise AssertionError("accepted a wrong-length certificate")
    r = halpern_lp.solve(lp, iteration_limit=0)
    assert r.status == "iteration_limit" and r.iterations == 0


def check_sgm():
    assert halpern_lp.shifted_geometric_mean([0.0, 0.0]) == 0.0
    assert abs(halpern_lp.shifted_geometric_mean([10.0, 40.0]) - (math.sqrt(1000.0) - 10.0)) < 1e-12


if __name__ == "__main__":
    for check in (check_dense, check_mps, check_infeasible, check_errors, check_sgm):
        check()
        print(f"ok  {check.__name__}")
    print("smoke test passed")
