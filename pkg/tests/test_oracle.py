"""Grid solver: boundary data, bracketing, exit distributions."""


import numpy as np
import pytest

import qhp.oracle as O
from qhp.errors import DomainError
from qhp.walk import preset


@pytest.fixture(scope="module")
def voter_grid():
    return O.solve_bracket(preset("voter"), 200, 200, 1e-10)


def test_boundary_values(voter_grid):
    assert voter_grid.lower[0, 5] == 1.0
    assert voter_grid.lower[7, 0] == 0.0
    assert voter_grid.upper[0, 0] == 1.0      # the origin belongs to the vertical axis
    assert voter_grid.lower[200, 3] == 0.0    # far clamp
    assert voter_grid.upper[200, 3] == 1.0


def test_voter_center_is_half(voter_grid):
    lo, hi = voter_grid.bracket(1, 1)
    assert lo <= 0.5 <= hi
    assert hi - lo < 1e-6
    assert voter_grid.midpoint(1, 1) == pytest.approx(0.5, abs=1e-6)


def test_bracket_orders_and_residual(voter_grid):
    assert np.all(voter_grid.lower <= voter_grid.upper + 1e-14)
    assert voter_grid.residual <= 1e-10
    assert np.all(voter_grid.lower >= -1e-14)
    assert np.all(voter_grid.upper <= 1 + 1e-14)


def test_monotonicity_in_start(voter_grid):
    # the far-0 grid decreases in i0 all the way into its clamp, and the
    # far-1 grid increases in j0 into its clamp; the opposite combinations
    # are perturbed near the artificial boundary
    assert np.all(np.diff(voter_grid.lower[:, 1:-1], axis=0) <= 1e-12)
    assert np.all(np.diff(voter_grid.upper[1:-1, :], axis=1) >= -1e-12)
    # away from the truncation edge the bracket midpoint is monotone too
    mid = 0.5 * (voter_grid.lower + voter_grid.upper)
    assert np.all(np.diff(mid[1:60, 1:60], axis=0) <= 1e-12)
    assert np.all(np.diff(mid[1:60, 1:60], axis=1) >= -1e-12)


def test_far_field_decay_negneg():
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    sol = O.solve_bracket(p, 200, 200, 1e-10)
    rho = 0.9199022855888916
    assert sol.lower[199, 1] < rho ** 100


def test_bracket_width_shrinks_with_n():
    p = preset("voter")
    w120 = O.solve_bracket(p, 120, 120, 1e-10).width(5, 5)
    w240 = O.solve_bracket(p, 240, 240, 1e-10).width(5, 5)
    assert w240 < w120


def test_tandem_bracket_tight():
    lo, hi = O.bracket_probability(preset("tandem", (0.2, 0.4)), 10, 1, 600)
    assert hi - lo < 1e-8


def test_rectangular_truncation():
    p = preset("tandem", (0.2, 0.4))
    sol = O.solve_bracket(p, 120, 240, 1e-10)
    assert sol.lower.shape == (121, 241)
    lo, hi = sol.bracket(10, 100)
    assert 0.0 <= lo <= hi <= 1.0


def test_start_validation():
    with pytest.raises(DomainError):
        O.bracket_probability(preset("voter"), 0, 1, 100)
    with pytest.raises(DomainError):
        O.bracket_probability(preset("voter"), 100, 1, 100)
    with pytest.raises(DomainError):
        O.solve_dp(preset("voter"), 3, 3, 0)
    with pytest.raises(DomainError):
        O.solve_dp(preset("voter"), 50, 50, 0, tol=1e-6)  # tol too loose
    with pytest.raises(DomainError):
        O.solve_dp(preset("voter"), 50, 50, 0.5)


def test_solve_dp_single_grid():
    g = O.solve_dp(preset("voter"), 64, 64, 1, 1e-10)
    assert g.values.shape == (65, 65)
    assert g.residual <= 1e-10
    assert g.iterations >= 1


def test_direct_and_amg_agree():
    """The small-grid direct path and the AMG path solve the same system."""
    p = preset("tandem", (0.2, 0.4))
    small = O.solve_bracket(p, 60, 60, 1e-10)
    forced = O._DIRECT_LIMIT
    try:
        O._DIRECT_LIMIT = 0  # force the AMG path
        amg = O.solve_bracket(p, 60, 60, 1e-10)
    finally:
        O._DIRECT_LIMIT = forced
    assert np.max(np.abs(small.lower - amg.lower)) < 1e-9
    assert np.max(np.abs(small.upper - amg.upper)) < 1e-9


# -- exit distributions ------------------------------------------------------

def test_exit_distribution_voter_origin_unreachable():
    ex = O.exit_distribution(preset("voter"), 1, 1, 150)
    assert ex.h00 == 0.0  # no step into the origin exists from (1,1)


def test_exit_mass_identity():
    ex = O.exit_distribution(preset("voter"), 2, 3, 150)
    assert 1 - ex.far_loss - 1e-12 <= ex.total_mass() <= 1.0 + 1e-12
    assert np.all(ex.h >= 0) and np.all(ex.htilde >= 0)


def test_exit_distribution_matches_bracket():
    p = preset("tandem", (0.2, 0.4))
    ex = O.exit_distribution(p, 4, 3, 220)
    lo, hi = O.bracket_probability(p, 4, 3, 220)
    p_v = ex.htilde[1:].sum() + ex.h00
    assert lo - 1e-9 <= p_v <= hi + 1e-9


def test_simple_walk_exit_symmetry():
    ex = O.exit_distribution(preset("simple"), 1, 1, 150)
    assert ex.h[1] == pytest.approx(ex.htilde[1], rel=1e-12)
    assert ex.h[3] == pytest.approx(ex.htilde[3], rel=1e-10)


def test_functional_equation_residual_on_kernel_zeros():
    """h(x) + htilde(Y0(x)) + h00 = x^i0 Y0(x)^j0 on the kernel curve."""
    import qhp.kernel as kn

    v = preset("voter")
    ex = O.exit_distribution(v, 3, 2, 400)
    for x in (0.55, 0.7, 0.9):
        y0 = kn.branch_Y(v, x, 0, kn.Approach.FROM_ABOVE).value
        resid = abs(ex.h_gen(x) + ex.htilde_gen(y0) + ex.h00 - x ** 3 * y0 ** 2)
        assert resid < 1e-6


def test_residual_below_1e12_on_every_preset():
    presets = [preset("voter"), preset("simple"), preset("tandem", (0.2, 0.4)),
               preset("nucleosome", (1.0, 2.0)),
               preset("asym_simple", (0.2, 0.3, 0.2, 0.3))]
    for p in presets:
        sol = O.solve_bracket(p, 80, 80, 1e-10)
        assert sol.residual <= 1e-12
