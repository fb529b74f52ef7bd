import numpy as np
import pytest
from numpy.testing import assert_allclose

from ptdoublet import (
    AsymmetricGrid,
    BadParameters,
    BranchUndefined,
    EckartParams,
    EpsilonProfile,
    GridTooCoarse,
    InadmissibleN,
    InvalidDelta,
    NatanzonParams,
    NoBoundStates,
    TailTooShort,
    WaveSamples,
    WindingNotInteger,
    build_grid,
    count_nodes,
    decay_rate,
    derive_uv,
    doublet,
    dxi_dr,
    eckart_state,
    natanzon_state,
    node_count_sweep,
    polynomial_zero_positions,
    polynomial_zeros_in_strip,
    psi_eckart,
    psi_natanzon,
    pt_symmetry_defect,
    schrodinger_residual,
    v_eckart,
    v_natanzon_r,
)

P10 = NatanzonParams(beta=1.0, C=10.0)
P14 = NatanzonParams(beta=1.0, C=14.0)


def all_doublet_states(grid, params=P10, n_values=(0, 1)):
    return [
        natanzon_state(params, n, q, grid) for n in n_values for q in (-1, 1)
    ]


def test_derive_uv_identities():
    for delta, beta in ((0.34, 1.0), (8.99, 1.0), (2.5, 0.0), (1.3, 4.2)):
        uv = derive_uv(1, delta, beta)
        assert_allclose(uv.u + uv.v, delta, rtol=1e-13)
        assert_allclose(uv.v - uv.u, 1j * beta / delta, rtol=0, atol=1e-13)
    with pytest.raises(InvalidDelta):
        derive_uv(0, -1.0, 1.0)
    with pytest.raises(InvalidDelta):
        derive_uv(0, 0.0, 1.0)


def test_eckart_state_schrodinger_residual(grid):
    p = EckartParams(A=3.0, beta=1.0)
    for n in (0, 1):
        st = eckart_state(p, n, grid)
        res = schrodinger_residual(st, lambda r: v_eckart(r, p), st.energy)
        assert res < 1e-5


def test_eckart_state_metadata(grid):
    st = eckart_state(EckartParams(A=3.0, beta=1.0), 1, grid)
    assert (st.model, st.N, st.q) == ("eckart", 1, 0)
    assert_allclose(st.delta, 1.0)
    assert_allclose(st.energy, 0.0)
    assert st.values.shape == (grid.n_points,)


def test_eckart_inadmissible_levels(grid):
    with pytest.raises(InadmissibleN):
        eckart_state(EckartParams(A=3.0, beta=1.0), 2, grid)
    with pytest.raises(InadmissibleN):
        psi_eckart(1.0 - 0.5j, EckartParams(A=1.5, beta=0.0), 1)


def test_natanzon_state_schrodinger_residual(grid):
    for st in all_doublet_states(grid):
        res = schrodinger_residual(
            st, lambda xi: v_natanzon_r(grid.r, P10), st.energy
        )
        assert res < 1e-5


def test_halved_jacobi_convention_fails_the_equation(grid):
    # the alternative (u/2, v/2) parameter reading is kept for adjudication:
    # for N >= 1 it changes the polynomial and breaks the eigenfunction
    st_std = natanzon_state(P10, 1, -1, grid)
    st_alt = natanzon_state(P10, 1, -1, grid, convention="halved")
    res_std = schrodinger_residual(st_std, lambda _: v_natanzon_r(grid.r, P10), st_std.energy)
    res_alt = schrodinger_residual(st_alt, lambda _: v_natanzon_r(grid.r, P10), st_alt.energy)
    assert res_std < 1e-5
    assert res_alt > 1e-2


def test_map_ratio_is_constant(grid):
    # psi_d == sqrt(xi') psi_e * const, state by state
    for st in all_doublet_states(grid):
        pe = EckartParams(A=st.delta + st.N + 1.0, beta=1.0)
        se = eckart_state(pe, st.N, grid)
        ratio = st.values / (np.sqrt(dxi_dr(grid.r)) * se.values)
        ref = ratio[grid.anchor_index]
        assert float(np.abs(ratio - ref).max() / abs(ref)) < 1e-8


def test_point_queries_match_path_samples(grid):
    st = natanzon_state(P10, 1, 1, grid)
    idx = [150, 700, grid.anchor_index, 1500]
    vals = psi_natanzon(grid.xi[idx], 1, 1, P10, grid)
    assert_allclose(vals, st.values[idx], rtol=1e-12)
    one = psi_natanzon(grid.xi[700], 1, 1, P10, grid)
    assert isinstance(one, complex)
    assert_allclose(one, st.values[700], rtol=1e-12)


def test_psi_natanzon_off_contour_raises(grid):
    with pytest.raises(BranchUndefined):
        psi_natanzon(4.0 + 4.0j, 0, -1, P10, grid)


def test_branch_selection(grid):
    minus = natanzon_state(P10, 0, -1, grid)
    plus = natanzon_state(P10, 0, 1, grid)
    assert minus.q == -1 and plus.q == 1
    assert minus.delta < plus.delta
    assert minus.energy < plus.energy
    with pytest.raises(BadParameters):
        natanzon_state(P10, 0, 0, grid)
    with pytest.raises(NoBoundStates):
        natanzon_state(NatanzonParams(beta=1.0, C=2.0), 0, -1, grid)


def test_single_level_accepts_any_branch(grid):
    p0 = NatanzonParams(beta=0.0, C=10.0)
    st = natanzon_state(p0, 0, 1, grid)
    assert st.q == 0
    assert_allclose(st.delta, 9.0)
    st2 = natanzon_state(p0, 0, -1, grid)
    assert_allclose(st2.values, st.values, rtol=0, atol=0)


def test_decay_slopes_match_delta(grid):
    for st in all_doublet_states(grid):
        left, right = decay_rate(st)
        assert abs(left + st.delta) < 0.02 * st.delta
        assert abs(right + st.delta) < 0.02 * st.delta
    st_e = eckart_state(EckartParams(A=3.0, beta=1.0), 0, grid)
    left, right = st_e.decay_fit
    assert abs(left + 2.0) < 0.04
    assert abs(right + 2.0) < 0.04


def test_decay_fit_needs_enough_tail():
    g = build_grid(EpsilonProfile.constant(1.0), -12.0, 12.0, 41)
    with pytest.raises(TailTooShort):
        eckart_state(EckartParams(A=3.0, beta=1.0), 0, g)


def test_pt_symmetry_defect_small(grid):
    for st in all_doublet_states(grid):
        assert pt_symmetry_defect(st) < 1e-8


def test_pt_symmetry_needs_symmetric_grid(grid):
    g = build_grid(EpsilonProfile.constant(1.0), -4.0, 6.0, 301)
    st = natanzon_state(P10, 0, -1, grid)
    with pytest.raises(AsymmetricGrid):
        pt_symmetry_defect(st, g)


@pytest.mark.parametrize("n_val, q, params", [
    (0, -1, P10), (0, 1, P10), (1, -1, P10), (1, 1, P10), (2, -1, P14), (2, 1, P14),
])
def test_count_nodes_equals_n(grid, n_val, q, params):
    st = natanzon_state(params, n_val, q, grid)
    assert count_nodes(st) == n_val
    assert polynomial_zeros_in_strip(st) == n_val


def test_count_nodes_eckart(grid):
    assert count_nodes(eckart_state(EckartParams(A=3.0, beta=1.0), 1, grid)) == 1
    assert count_nodes(eckart_state(EckartParams(A=4.5, beta=1.0), 2, grid)) == 2


def test_node_sweep_resolves_zero_depth(grid):
    # the N=1 small-branch zero sits at depth eps0 - arctan(d(d+1)/beta)
    st = natanzon_state(P10, 1, -1, grid)
    d = st.delta
    depth = 1.0 - np.arctan(d * (d + 1.0))
    counts = dict(node_count_sweep(st, [0.9 * depth, 1.1 * depth]))
    assert counts[0.9 * depth] == 0
    assert counts[1.1 * depth] == 1


def test_winding_guard_near_prefactor_branch_point(grid):
    # widening the rectangle past the coth branch point at t = i(eps0 - pi/2)
    # encloses a half-order zero and the winding stops being an integer
    st = natanzon_state(P10, 0, -1, grid)
    with pytest.raises(WindingNotInteger):
        count_nodes(st, strip_half_width=0.60)


def test_polynomial_zero_positions_frozen(grid):
    st = natanzon_state(P10, 1, -1, grid)
    zeros = polynomial_zero_positions(st)
    assert zeros.shape == (1,)
    depth = np.arctan(st.delta * (st.delta + 1.0))
    assert_allclose(zeros[0], 1j * (1.0 - depth), rtol=0, atol=1e-10)
    st2 = natanzon_state(P14, 2, 1, grid)
    zeros2 = polynomial_zero_positions(st2)
    assert zeros2.shape == (2,)
    assert_allclose(zeros2[0], -zeros2[1].conjugate(), rtol=0, atol=1e-9)


def test_residual_grid_guard():
    g = build_grid(EpsilonProfile.constant(1.0), -12.0, 12.0, 5)
    fake = WaveSamples(
        grid=g, values=np.ones(5, dtype=complex), model="eckart", N=0, q=0,
        delta=1.0, beta=1.0, energy=0.0, convention="standard",
        decay_fit=(0.0, 0.0), node_count=None, path_eval=None,
    )
    with pytest.raises(GridTooCoarse):
        schrodinger_residual(fake, lambda r: np.zeros(5), 0.0)


def test_doublet_energies_flow_into_states(grid):
    lev = doublet(0, 1.0, 10.0)
    st_minus = natanzon_state(P10, 0, -1, grid)
    st_plus = natanzon_state(P10, 0, 1, grid)
    assert_allclose(st_minus.energy, lev.e_minus, rtol=1e-13)
    assert_allclose(st_plus.energy, lev.e_plus, rtol=1e-13)
    assert_allclose(st_minus.delta, lev.delta_minus, rtol=1e-13)
    assert_allclose(st_plus.delta, lev.delta_plus, rtol=1e-13)
