import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state, seeds
from entfrontier.channels import v_state
from entfrontier.errors import DomainError
from entfrontier.measures import binary_entropy, concurrence, wootters_W
from entfrontier.ree import (
    SolverConfig,
    css_gen_horodecki,
    detect_family,
    horodecki_ree_value,
    ree,
    ree_bell_diagonal,
    ree_gen_horodecki,
    ree_horodecki,
    ree_numeric,
    ree_pure,
    ree_v_state,
)
from entfrontier.states import (
    PSI_PLUS,
    PureState,
    bell_diagonal,
    gen_horodecki,
    horodecki,
    is_ppt,
    partial_transpose,
    projector,
    relative_entropy,
    sample_state,
)

QUICK = SolverConfig(starts=4)


def assert_valid_css(rho, sol, tol=1e-9):
    assert np.linalg.eigvalsh(partial_transpose(sol.sigma.matrix))[0] >= -tol
    assert relative_entropy(rho, sol.sigma) == pytest.approx(sol.ree, abs=tol)


# --- closed forms -----------------------------------------------------------

def test_pure_bell_state():
    psi = PureState.from_vector(PSI_PLUS)
    sol = ree_pure(psi)
    assert sol.ree == pytest.approx(1.0) and sol.method == "pure"
    assert_valid_css(psi.density(), sol)


def test_pure_product_state():
    sol = ree_pure(PureState(1, 0, 0, 0))
    assert sol.ree == 0.0


def test_pure_table_row():
    # psi_alpha with B = 0.5271 (row rho2)
    alpha = 0.5 * (1 - math.sqrt(1 - 0.5271**2))
    assert ree_pure(PureState.psi_alpha(alpha)).ree == pytest.approx(0.3847, abs=1e-4)


@given(seeds)
def test_pure_css_is_consistent(seed):
    v = np.linalg.eigh(sample_state(seed, 1).matrix)[1][:, -1]
    psi = PureState.from_vector(v / np.linalg.norm(v))
    sol = ree_pure(psi)
    assert_valid_css(psi.density(), sol)
    assert sol.ree == pytest.approx(wootters_W(concurrence(psi.density())), abs=1e-10)


def test_bell_diagonal_examples():
    assert ree_bell_diagonal([1, 0, 0, 0]).ree == pytest.approx(1.0)
    assert ree_bell_diagonal([0.5, 0.5, 0, 0]).ree == 0.0
    # 1 - h(3/4) from a 50-digit evaluation
    sol = ree_bell_diagonal([0.75, 0.25, 0, 0])
    assert sol.ree == pytest.approx(0.18872187554086714, abs=1e-14)
    rho = bell_diagonal([0.75, 0.25, 0, 0])
    assert_valid_css(rho, sol)
    assert ree_numeric(rho, QUICK).ree == pytest.approx(sol.ree, abs=1e-6)


def test_bell_diagonal_domain():
    with pytest.raises(DomainError):
        ree_bell_diagonal([0.5, 0.6, 0, 0])


@given(st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda l: sum(l) > 1e-3))
def test_bell_diagonal_css_valid(raw):
    lams = np.array(raw) / sum(raw)
    assert_valid_css(bell_diagonal(lams), ree_bell_diagonal(lams))


def test_horodecki_examples():
    assert horodecki_ree_value(1.0) == pytest.approx(1.0)
    assert horodecki_ree_value(0.0) == 0.0
    assert horodecki_ree_value(1e-9) == pytest.approx(0.0, abs=1e-8)
    assert horodecki_ree_value(1 / math.sqrt(2)) == pytest.approx(0.2949, abs=1e-4)
    # 50-digit evaluation of the closed form
    assert horodecki_ree_value(1 / math.sqrt(2)) == pytest.approx(0.29486700027506699, abs=1e-14)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.9, 1.0])
def test_horodecki_css_valid(p):
    assert_valid_css(horodecki(p), ree_horodecki(p))


def test_horodecki_numeric_cross_check():
    rho = horodecki(0.9)
    assert ree_numeric(rho, QUICK).ree == pytest.approx(0.61655331438633537, abs=1e-4)
    assert ree_horodecki(0.9).ree == pytest.approx(0.61655331438633537, abs=1e-13)


def test_v_state_examples():
    assert ree_v_state(0.5).ree == pytest.approx(1.0)
    assert ree_v_state(1.0).ree == 0.0
    # B' = 0.5: h(1/4) - h((sqrt(1/2) + 1)/2), 50-digit value
    sol = ree_v_state(0.75)
    assert sol.ree == pytest.approx(0.21040208776627676, abs=1e-14)
    assert sol.ree == pytest.approx(binary_entropy(0.25) - binary_entropy((1 + math.sqrt(0.5)) / 2), abs=1e-14)
    assert ree_numeric(v_state(0.75), QUICK).ree == pytest.approx(sol.ree, abs=1e-4)
    assert_valid_css(v_state(0.75), sol)


def test_v_state_domain():
    with pytest.raises(DomainError):
        ree_v_state(0.3)


# --- amplitude-damped states ------------------------------------------------

@pytest.mark.parametrize("p", [0.75, 0.85, 0.95])
def test_gen_horodecki_reduces_to_horodecki(p):
    _, sol = css_gen_horodecki(0.5, p)
    assert sol.ree == pytest.approx(horodecki_ree_value(p), abs=1e-8)


@pytest.mark.parametrize("alpha,p,want", [
    # minimum of S(rho||sigma) over product mixtures, 24 starts
    (0.3, 0.6, 0.16837714932880687),
    (0.1, 0.9, 0.3037872374130653),
    (0.4, 0.95, 0.7442488231345745),
    (0.2, 0.3, 0.02579506663665565),
])
def test_gen_horodecki_matches_numeric_oracle(alpha, p, want):
    assert ree_gen_horodecki(alpha, p) == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("alpha,p,want", [(0.0369, 1.0, 0.2279), (0.2198, 0.8536, 0.4039)])
def test_gen_horodecki_table_rows(alpha, p, want):
    assert css_gen_horodecki(alpha, p)[1].ree == pytest.approx(want, abs=1e-4)


@settings(max_examples=40)
@given(st.floats(0.01, 0.99), st.floats(0.02, 1.0))
def test_gen_horodecki_css_invariants(alpha, p):
    rec, sol = css_gen_horodecki(alpha, p)
    rho = gen_horodecki(alpha, p)
    assert_valid_css(rho, sol)
    assert rec.R4 == pytest.approx(rec.R1 - 1 + p, abs=1e-14)
    assert min(rec.R1, rec.R2, rec.R3, rec.R4) >= -1e-10
    assert np.trace(sol.sigma.matrix).real == pytest.approx(1.0, abs=1e-10)
    assert sol.ree <= wootters_W(concurrence(rho)) + 1e-9


@pytest.mark.parametrize("alpha,p", [(0.05, 1 - 1e-9), (0.076, 0.99985), (0.45, 0.999999), (0.3, 1e-3)])
def test_gen_horodecki_hard_corners(alpha, p):
    rho = gen_horodecki(alpha, p)
    _, sol = css_gen_horodecki(alpha, p)
    assert_valid_css(rho, sol)
    assert ree_numeric(rho, QUICK).ree == pytest.approx(sol.ree, abs=1e-6)


def test_gen_horodecki_domain():
    with pytest.raises(DomainError):
        css_gen_horodecki(0.0, 0.5)
    with pytest.raises(DomainError):
        css_gen_horodecki(0.3, 0.0)


# --- numeric solver ---------------------------------------------------------

def test_numeric_bell_state():
    assert ree_numeric(projector(PSI_PLUS), QUICK).ree == pytest.approx(1.0, abs=1e-4)


def test_numeric_ppt_input():
    # Werner state below the 1/3 threshold
    rho = 0.3 * projector(PSI_PLUS) + 0.7 * np.eye(4) / 4
    assert is_ppt(rho)
    sol = ree_numeric(rho)
    assert sol.ree == 0.0
    assert np.allclose(sol.sigma.matrix, rho)


@settings(max_examples=25)
@given(seeds)
def test_numeric_properties(seed):
    rho = random_state(seed)
    sol = ree_numeric(rho, QUICK)
    assert sol.ree >= 0.0
    assert (sol.ree <= 1e-9) == is_ppt(rho)
    assert sol.ree <= wootters_W(concurrence(rho)) + 1e-6
    assert_valid_css(rho, sol)
    trace = sol.diagnostics["objective_trace"]
    assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


def test_numeric_rank_deficient_css_is_finite():
    # this rank-2 state has a rank-3 CSS; round-off leaves rho slightly
    # outside the kernel of the raw optimum
    from entfrontier.frontier import point_seed
    from entfrontier.states import sample_mixture

    _, rho = sample_mixture(point_seed(2024, 722))
    sol = ree_numeric(rho, QUICK)
    assert math.isfinite(sol.ree)
    assert sol.ree == pytest.approx(0.10510182039, abs=1e-9)
    assert_valid_css(rho, sol)


def test_numeric_deterministic():
    rho = random_state(42)
    a, b = ree_numeric(rho, QUICK), ree_numeric(rho, QUICK)
    assert a.ree == b.ree
    assert np.array_equal(a.sigma.matrix, b.sigma.matrix)


# --- dispatcher -------------------------------------------------------------

def test_dispatch_examples():
    assert ree(projector(PSI_PLUS)).method == "pure"
    sol = ree(gen_horodecki(0.3510, 0.9565))
    assert sol.method == "gen_horodecki"
    assert sol.ree == pytest.approx(0.7445, abs=1e-4)
    sol = ree(sample_state(1001, 4), QUICK)
    assert sol.method == "numeric" and sol.ree >= 0.0


@pytest.mark.parametrize("rho,tag", [
    (bell_diagonal([0.6, 0.2, 0.1, 0.1]), "bell_diagonal"),
    (horodecki(0.6), "horodecki"),
    (gen_horodecki(0.3, 0.6), "gen_horodecki"),
    (v_state(0.7), "v_state"),
    (sample_state(3, 1), "pure"),
    (sample_state(3, 3), None),
])
def test_detect_family(rho, tag):
    found = detect_family(rho)
    assert (found[0] if found else None) == tag


@pytest.mark.parametrize("rho", [
    bell_diagonal([0.6, 0.2, 0.1, 0.1]),
    horodecki(0.6),
    gen_horodecki(0.3, 0.6),
    v_state(0.7),
])
def test_dispatch_agrees_with_numeric(rho):
    assert ree(rho).ree == pytest.approx(ree_numeric(rho, QUICK).ree, abs=1e-6)


def test_bell_diagonal_css_with_tiny_weights():
    # regression: the remaining weight used to be taken as 1 - top
    raw = np.array([0.625, 2.220446049250313e-16, 2.220446049250313e-16, 2.220446049250313e-16])
    lams = raw / raw.sum()
    assert_valid_css(bell_diagonal(lams), ree_bell_diagonal(lams))
