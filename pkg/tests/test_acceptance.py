"""Acceptance criteria 1-9 at their stated tolerances.

Every criterion records a PASS/FAIL line in ``conftest.ACCEPTANCE``; the
summary is printed at the end of the pytest run.  Sub-results that miss
their tolerance are asserted at that tolerance under a strict xfail, so a
regression into passing is noticed as well.
"""
import math

import numpy as np
import pytest
import scipy.linalg as sl

from conftest import ACCEPTANCE
from entfrontier import frontier as fr
from entfrontier.channels import damp, pdc_closed_form
from entfrontier.cli import table1_rows
from entfrontier.errors import RankError
from entfrontier.kkt import a2_params, d_params, kkt_check
from entfrontier.measures import (
    chsh_operator,
    concurrence,
    correlation_eigensystem,
    horodecki_M,
    negativity,
    nonlocality_B,
    wootters_W,
)
from entfrontier.ree import (
    SolverConfig,
    ree,
    horodecki_ree_value,
    ree_bell_diagonal,
    ree_gen_horodecki,
    ree_numeric,
    v_state_ree_value,
)
from entfrontier.channels import v_state
from entfrontier.states import (
    PureState,
    bell_diagonal,
    gen_horodecki,
    horodecki,
    sample_mixture,
    validate_density,
)


def record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_pure(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return PureState.from_vector(v / np.linalg.norm(v))


# --- 1. reference table ----------------------------------------------------

def test_criterion_1_table():
    rows = table1_rows()
    worst = max(r["max_dev"] for r in rows)
    record(1, worst <= 1e-3, f"6 rows, max deviation {worst:.2e} (tol 1e-3)")
    assert worst <= 1e-3


# --- 2. gaps ----------------------------------------------------------------

@pytest.fixture(scope="module")
def gaps():
    return {
        "A2": fr.gap(fr.curve_upper_A2()),
        "A1": fr.gap(fr.curve_upper_A1(fr.default_grid(101)), n_scan=401),
        "H": fr.gap(fr.curve_horodecki("B")),
    }


GAP_TARGETS = {"A2": (0.404, 0.0, 5e-3), "A1": (0.0391, 0.154, 1e-3), "H": (0.2949, 0.0, 1e-4)}


def _gap_ok(g, name):
    delta, x, tol = GAP_TARGETS[name]
    return abs(g.delta - delta) <= tol and abs(g.x_opt - x) <= tol


def test_criterion_2_record(gaps):
    ok = all(_gap_ok(gaps[k], k) for k in GAP_TARGETS)
    detail = ", ".join(f"{k} {gaps[k].delta:.4f} at {gaps[k].x_opt:.4f}" for k in GAP_TARGETS)
    record(2, ok, detail + " (targets 0.404@0, 0.0391@0.154, 0.2949@0)")


@pytest.mark.parametrize("name", ["A2", "H"])
def test_criterion_2_gap(gaps, name):
    assert _gap_ok(gaps[name], name)


@pytest.mark.xfail(strict=True, reason="amplitude-damped N-gap is 0.0412 at N=0.164; "
                   "the reference 0.0391 at 0.154 is the Horodecki N-gap")
def test_criterion_2_gap_A1(gaps):
    assert _gap_ok(gaps["A1"], "A1")


def test_criterion_2_A1_gap_is_not_below_horodecki(gaps):
    # the A1 family contains the Horodecki states, so its gap cannot be smaller
    h = fr.gap(fr.curve_horodecki("N"))
    assert h.delta == pytest.approx(0.0391, abs=1e-3) and h.x_opt == pytest.approx(0.154, abs=1e-3)
    assert gaps["A1"].delta >= h.delta - 1e-9


# --- 3. crossings -----------------------------------------------------------

CROSS_TARGETS = {"B6": (0.5856, 0.4520), "B0": (0.8169, 0.7445), "N1": (0.3770, 0.2279),
                 "N0": (0.5271, 0.3847)}


@pytest.fixture(scope="module")
def crossings():
    pure_B, pure_N = fr.curve_pure("B"), fr.curve_pure("N")
    return {
        "B6": fr.crossing(fr.curve_horodecki("B"), pure_B),
        "B0": fr.crossing(fr.curve_upper_A2(), pure_B),
        "N1": fr.crossing(fr.curve_horodecki("N"), pure_N),
        "N0": fr.crossing(fr.curve_upper_A1(fr.default_grid(101)), pure_N, n_scan=201),
    }


def _cross_ok(pts, name):
    x, e = CROSS_TARGETS[name]
    return len(pts) == 1 and abs(pts[0][0] - x) <= 1e-3 and abs(pts[0][1] - e) <= 1e-3


def test_criterion_3_record(crossings):
    ok = all(_cross_ok(crossings[k], k) for k in CROSS_TARGETS)
    detail = ", ".join(f"{k} " + "/".join(f"({x:.4f}, {e:.4f})" for x, e in crossings[k])
                       for k in CROSS_TARGETS)
    record(3, ok, detail)


@pytest.mark.parametrize("name", ["B6", "B0", "N1"])
def test_criterion_3_crossing(crossings, name):
    assert _cross_ok(crossings[name], name)


@pytest.mark.xfail(strict=True, reason="amplitude-damped N-frontier merges with the pure "
                   "curve at N=0.5209, E_R=0.3777")
def test_criterion_3_crossing_N0(crossings):
    assert _cross_ok(crossings["N0"], "N0")


def test_criterion_3_N0_is_on_pure_curve():
    # at the reference N0 the maximum is already attained by a pure state
    x, e = CROSS_TARGETS["N0"]
    assert fr.upper_A1_point(x)[0] == pytest.approx(e, abs=1e-3)


# --- 4. Horodecki criterion -------------------------------------------------

def _random_unit(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_criterion_4_chsh():
    rng = np.random.default_rng(404)
    n_settings = 64
    worst_attain = worst_excess = 0.0
    for i in range(10_000):
        _, rho = sample_mixture(np.random.default_rng([404, i]))
        op = chsh_operator(rho)
        bound = 2.0 * math.sqrt(horodecki_M(rho))
        worst_attain = max(worst_attain, abs(np.trace(rho.matrix @ op.matrix).real - bound))
        # expectation of a x (b+b') + a' x (b-b') is a^T T (b+b') + a'^T T (b-b')
        T = correlation_eigensystem(rho)[2]
        a, ap, b, bp = (_random_unit(rng, n_settings) for _ in range(4))
        vals = (np.einsum("ki,ij,kj->k", a, T, b + bp) + np.einsum("ki,ij,kj->k", ap, T, b - bp))
        worst_excess = max(worst_excess, float(vals.max()) - bound)
    ok = worst_attain <= 1e-8 and worst_excess <= 1e-6
    record(4, ok, f"10^4 states: |Tr(rho B) - 2 sqrt M| <= {worst_attain:.1e}, "
                  f"random settings exceed by {max(worst_excess, 0.0):.1e}")
    assert worst_attain <= 1e-8
    assert worst_excess <= 1e-6


# --- 5. numeric REE against closed forms ------------------------------------

def _family_cases(rng):
    cases = {"pure": [], "bell_diagonal": [], "horodecki": [], "gen_horodecki": [], "v_state": []}
    for _ in range(100):
        psi = random_pure(rng)
        rho = psi.density()
        cases["pure"].append((rho, wootters_W(concurrence(rho))))
        lams = rng.dirichlet(np.ones(4))
        cases["bell_diagonal"].append((bell_diagonal(lams), ree_bell_diagonal(lams).ree))
        p = rng.uniform(0.01, 1.0)
        cases["horodecki"].append((horodecki(p), horodecki_ree_value(p)))
        alpha, p = rng.uniform(0.02, 0.98), rng.uniform(0.02, 1.0)
        cases["gen_horodecki"].append((gen_horodecki(alpha, p), ree_gen_horodecki(alpha, p)))
        av = rng.uniform(0.5, 1.0)
        cases["v_state"].append((v_state(av), v_state_ree_value(av)))
    return cases


def test_criterion_5_ree_oracles():
    cases = _family_cases(np.random.default_rng(505))
    cfg = SolverConfig(starts=8)
    worst = {}
    for name, items in cases.items():
        worst[name] = max(abs(ree_numeric(rho, cfg).ree - want) for rho, want in items)
    ok = max(worst.values()) <= 1e-4
    record(5, ok, "max |numeric - closed form|: "
                  + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (tol 1e-4)")
    assert ok, worst


# --- 6. channels ------------------------------------------------------------

def test_criterion_6_channels():
    grid = np.linspace(0.0, 1.0, 10)
    worst_eq = worst_pdc = 0.0
    for alpha in grid:
        for q1 in grid:
            for q2 in grid:
                for kind in ("adc", "pdc"):
                    closed = damp(kind, alpha, q1, q2).matrix
                    kraus = damp(kind, alpha, q1, q2, closed_form=False).matrix
                    worst_eq = max(worst_eq, float(np.abs(closed - kraus).max()))
                rho = pdc_closed_form(alpha, q1, q2).density
                c, n, b = concurrence(rho), negativity(rho), nonlocality_B(rho)
                worst_pdc = max(worst_pdc, abs(b - n), abs(b - c), abs(c - n))
    ok = worst_eq <= 1e-12 and worst_pdc <= 1e-10
    record(6, ok, f"1000 grid points: closed vs Kraus {worst_eq:.1e} (tol 1e-12), "
                  f"PDC max |B-N|,|B-C| {worst_pdc:.1e} (tol 1e-10)")
    assert worst_eq <= 1e-12
    assert worst_pdc <= 1e-10


# --- 7. KKT -----------------------------------------------------------------

B_GRID = [round(0.1 * k, 1) for k in range(1, 10)]


def _kkt_pass(point_fn, B):
    try:
        return point_fn(B).kkt().verdict
    except RankError:
        return False


def _perturbed(point, rng, scale=1e-2):
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = (h + h.conj().T) / 2
    U = sl.expm(1j * scale * h / np.linalg.norm(h, 2))
    return validate_density(U @ point.state.matrix @ U.conj().T)


@pytest.fixture(scope="module")
def kkt_results():
    d = {B: _kkt_pass(d_params, B) for B in B_GRID}
    a2 = {B: _kkt_pass(a2_params, B) for B in B_GRID}
    rng = np.random.default_rng(707)
    cfg = SolverConfig(starts=8)
    fails = 0
    for B in (0.1, 0.2, 0.3, 0.4, 0.5):
        for point in (d_params(B), a2_params(B)):
            for _ in range(2):
                rho = _perturbed(point, rng)
                sol = ree_numeric(rho, cfg)
                r = kkt_check(rho, sol.sigma, chsh_operator(rho).matrix, point.extremum)
                fails += not r.verdict
    return d, a2, fails


def test_criterion_7_record(kkt_results):
    d, a2, fails = kkt_results
    ok = all(d.values()) and all(a2.values()) and fails == 20
    bad = [B for B, v in a2.items() if not v]
    record(7, ok, f"D passes {sum(d.values())}/9, A2 passes {sum(a2.values())}/9 "
                  f"(fails at B={bad}), perturbed rank-2 fail {fails}/20")


def test_criterion_7_lower_family(kkt_results):
    assert all(kkt_results[0].values())


@pytest.mark.parametrize("B", [B for B in B_GRID if B <= 0.6])
def test_criterion_7_upper_family(kkt_results, B):
    assert kkt_results[1][B]


@pytest.mark.xfail(strict=True, reason="the amplitude-damped family is not stationary above "
                   "B=0.673; at B=0.9 the boundary state is pure and the check does not apply")
@pytest.mark.parametrize("B", [0.7, 0.8, 0.9])
def test_criterion_7_upper_family_high_B(kkt_results, B):
    assert kkt_results[1][B]


def test_criterion_7_perturbed_fail(kkt_results):
    assert kkt_results[2] == 20


# --- 8. scatter containment -------------------------------------------------

@pytest.fixture(scope="module")
def scatter():
    return fr.monte_carlo_scatter(10_000, seed=2024, bands=fr.Bands.build())


def test_criterion_8_scatter(scatter):
    bad = scatter.flagged
    names = sorted({n for _, v in bad for n in v})
    record(8, not bad, f"10^4 states, {scatter.rechecked} re-verified with 16 starts, "
                       f"{len(bad)} outside the bands {names} (tol 1e-4)")
    assert len(scatter.points) == 10_000
    assert all(math.isfinite(p.E_R) for p in scatter.points)
    assert not bad, bad[:5]


# --- 9. pure states ---------------------------------------------------------

def test_criterion_9_pure():
    rng = np.random.default_rng(909)
    worst_cn = worst_cb = worst_e = 0.0
    for _ in range(1000):
        psi = random_pure(rng)
        rho = psi.density()
        c, n, b = concurrence(rho), negativity(rho), nonlocality_B(rho)
        worst_cn = max(worst_cn, abs(c - n))
        worst_cb = max(worst_cb, abs(c - b))
        # Schmidt-coefficient route against the concurrence route
        sol = ree(rho)
        assert sol.method == "pure"
        worst_e = max(worst_e, abs(sol.ree - wootters_W(c)))
    ok = max(worst_cn, worst_cb, worst_e) <= 1e-10
    record(9, ok, f"10^3 pure states: |C-N| {worst_cn:.1e}, |C-B| {worst_cb:.1e}, "
                  f"|E_R-W(C)| {worst_e:.1e} (tol 1e-10)")
    assert worst_cn <= 1e-10 and worst_cb <= 1e-10
    assert worst_e <= 1e-10
