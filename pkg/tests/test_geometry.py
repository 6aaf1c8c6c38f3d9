import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qplex.designs import GOLDEN_RATIO, bipyramid, catalog_build, catalog_povm, disphenoid
from qplex.errors import NotADesignError, NotInAffineSpaceError, NotMorphophoricError
from qplex.geometry import (
    basis_polytope,
    cubic_form,
    design_linear_system,
    duality_checks,
    geometry_report,
    independent_rows,
    linear_residual,
    primal_affine_space,
    primal_polytope,
    pure_membership_check,
    pure_state_constants,
    radii,
    reconstruct_state,
    reconstruction_membership,
    reduced_linear_system,
    sample_primal_polytope,
    state_membership_low_dim,
)
from qplex.linalg import hs_norm, min_eigenvalue
from qplex.povm import measurement_map
from qplex.sampling import haar_pure_states, hs_mixed_states, random_states

from conftest import TWO_DESIGNS, design_id


def _rows(equations, n):
    """Equations as ``{index: coeff}`` dicts (1-based labels) -> coefficient matrix."""
    A = np.zeros((len(equations), n))
    for i, row in enumerate(equations):
        for k, v in row.items():
            A[i, k - 1] = v
    return A


PAIRS12 = [{1: 1, 2: 1}, {3: 1, 4: 1}, {5: 1, 6: 1}, {7: 1, 8: 1}, {9: 1, 10: 1}, {11: 1, 12: 1}]


def _twelve_extra(s):
    return [{1: s, 3: -s, 6: 1, 8: 1}, {5: s, 7: -s, 10: 1, 12: 1}, {9: s, 11: -s, 2: 1, 4: 1}]


def test_cube_system_rank_and_equations():
    D = catalog_build("cube")
    assert np.linalg.matrix_rank(design_linear_system(D)[0]) == 5
    space = primal_affine_space(D.povm())
    assert space.dim == 3
    A = _rows([{1: 1, 5: 1}, {2: 1, 6: 1}, {3: 1, 7: 1}, {4: 1, 8: 1}, {1: 1, 3: 1, 6: 1, 8: 1}], 8)
    assert space.equation_residual(A, [1 / 4] * 4 + [1 / 2]) < 1e-12
    # the first four already force normalisation
    assert space.equation_residual(np.ones((1, 8)), [1.0]) < 1e-12


@pytest.mark.parametrize("name,s", [("cuboctahedron", 1.0), ("icosahedron", GOLDEN_RATIO)])
def test_twelve_vertex_equations(name, s):
    space = primal_affine_space(catalog_povm(name))
    A = _rows(PAIRS12 + _twelve_extra(s), 12)
    assert np.linalg.matrix_rank(A) == 9
    assert space.equation_residual(A, [1 / 6] * 9) < 1e-12


def test_icosahedron_rejects_cuboctahedral_weights():
    space = primal_affine_space(catalog_povm("icosahedron"))
    A = _rows(_twelve_extra(1.0), 12)
    assert space.equation_residual(A, [1 / 6] * 3) > 1e-3


def test_sic_system_rank():
    assert np.linalg.matrix_rank(design_linear_system(catalog_build("sic-d2"))[0]) == 1


@pytest.mark.parametrize("entry", TWO_DESIGNS, ids=design_id)
def test_linear_system_rank_and_reduction(entry):
    name, params, d, n = entry
    D = catalog_build(name, params)
    M, b = design_linear_system(D)
    assert np.linalg.matrix_rank(M) == n - d * d + 1
    idx, A, rhs = reduced_linear_system(D)
    assert len(idx) == A.shape[0] == n - d * d + 1
    assert primal_affine_space(D.povm()).equation_residual(A, rhs) < 1e-10


def test_independent_rows():
    A = np.array([[1.0, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0]])
    assert independent_rows(A) == [0, 2]


@pytest.mark.parametrize("entry", TWO_DESIGNS, ids=design_id)
def test_mediality(entry):
    name, params, d, n = entry
    rep = geometry_report(catalog_povm(name, params))
    expected = np.sqrt(1 - d * d / n)
    assert np.ptp(rep.mediality_distances) < 1e-10
    assert np.max(np.abs(rep.mediality_distances - expected)) < 1e-10


def test_mediality_examples():
    med = {
        ("sic-d2", ()): 0.0,
        ("mub", (2,)): np.sqrt(1 / 3),
        ("mub", (3,)): 0.5,
        ("cube", ()): np.sqrt(1 / 2),
    }
    for (name, params), v in med.items():
        assert geometry_report(catalog_povm(name, params)).mediality_distances[0] == pytest.approx(v, abs=1e-10)


def test_radii_and_report(morphophoric_povm):
    rep = geometry_report(morphophoric_povm)
    d = morphophoric_povm.dim
    assert rep.m**2 == pytest.approx(rep.r * rep.R, abs=1e-12)
    assert (rep.m, rep.r, rep.R) == radii(rep.alpha, d)
    assert rep.dim_affine == d * d - 1
    assert rep.linear_system_rank == morphophoric_povm.n - d * d + 1


def test_contraction_residual(two_design):
    rep = geometry_report(two_design.povm())
    assert rep.is_two_design and rep.contraction_residual < 1e-10
    assert geometry_report(bipyramid()).contraction_residual is None


def test_geometry_rejects_non_morphophoric():
    with pytest.raises(NotMorphophoricError):
        geometry_report(disphenoid(np.pi / 4).povm())


def test_pure_state_constants():
    assert pure_state_constants(2, 4) == pytest.approx((1 / 3, 9 / 27))
    assert pure_state_constants(3, 9)[1] == pytest.approx(10 / 64)


def test_pure_membership_on_haar_states(two_design):
    D = two_design
    P = measurement_map(D.povm(), haar_pure_states(D.dim, 200, 11))
    for p in P:
        res = pure_membership_check(D, p)
        assert res.is_pure_image
        assert res.new3rd < 1e-10


def test_pure_membership_rejects_mixed(two_design):
    D = two_design
    p = measurement_map(D.povm(), 0.7 * haar_pure_states(D.dim, 1, 2)[0] + 0.3 * np.eye(D.dim) / D.dim)
    res = pure_membership_check(D, p)
    assert not res.is_pure_image and res.linear < 1e-12 and res.quadratic > 1e-3


def test_pure_membership_needs_design():
    with pytest.raises(NotADesignError):
        pure_membership_check(disphenoid(np.pi / 4), np.full(4, 0.25))


LOW_DIM = [e for e in TWO_DESIGNS if e[2] in (2, 3)]


@pytest.mark.parametrize("entry", LOW_DIM, ids=design_id)
def test_low_dim_membership_matches_reconstruction(entry):
    D = catalog_build(*entry[:2])
    P = D.povm()
    rng = np.random.default_rng(31)
    space = primal_affine_space(P)
    pts = P.center + (rng.standard_normal((150, space.dim)) @ space.directions) * rng.uniform(0, 0.6, (150, 1))
    pts = np.concatenate([pts, measurement_map(P, random_states(D.dim, 50, rng))])
    for p in pts:
        # skip points within rounding of the boundary
        tau = reconstruct_state(P, p)
        if abs(min_eigenvalue(tau)) < 1e-7:
            continue
        assert state_membership_low_dim(D, p) == reconstruction_membership(P, p)


def test_low_dim_membership_rejects_off_space_and_high_d():
    D = catalog_build("sic-d2")
    assert not state_membership_low_dim(D, np.array([1.0, 0, 0, 0]))
    with pytest.raises(ValueError):
        state_membership_low_dim(catalog_build("mub", (4,)), np.full(20, 1 / 20))


def test_cubic_form_at_pure_states():
    D = catalog_build("sic-d3", (0.0,))
    p = measurement_map(D.povm(), haar_pure_states(3, 1, 4)[0])
    assert cubic_form(D, p) == pytest.approx(10 / 64, abs=1e-12)


@pytest.mark.parametrize("name,params", [t[:2] for t in TWO_DESIGNS] + [("bipyramid", ())])
def test_reconstruction_roundtrip(name, params):
    P = catalog_povm(name, params)
    states = hs_mixed_states(P.dim, 30, 8)
    for rho in states:
        tau = reconstruct_state(P, measurement_map(P, rho))
        assert hs_norm(tau - rho) < 1e-10


def test_reconstruction_routes_agree(two_design):
    P = two_design.povm()
    for rho in random_states(P.dim, 20, 5):
        p = measurement_map(P, rho)
        a = reconstruct_state(P, p, method="frame")
        b = reconstruct_state(two_design, p, method="design")
        assert hs_norm(a - b) < 1e-10


def test_reconstruction_errors():
    P = catalog_povm("cube")
    with pytest.raises(NotInAffineSpaceError):
        reconstruct_state(P, np.eye(8)[0])
    with pytest.raises(ValueError):
        reconstruct_state(P, P.center, method="magic")
    with pytest.raises(NotADesignError):
        reconstruct_state(bipyramid(), bipyramid().center, method="design")
    assert not reconstruction_membership(P, np.eye(8)[0])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_forward_images_are_members(seed):
    P = catalog_povm("mub", (3,))
    p = measurement_map(P, random_states(3, 1, seed)[0])
    assert reconstruction_membership(P, p)
    assert state_membership_low_dim(catalog_build("mub", (3,)), p)


def test_basis_polytope_inside_range(morphophoric_povm):
    D = basis_polytope(morphophoric_povm)
    assert all(reconstruction_membership(morphophoric_povm, v) for v in D.vertices)


def test_primal_polytope_mub2():
    P = catalog_povm("mub", (2,))
    delta = primal_polytope(P)
    assert len(delta.vertices) == 8
    assert np.all(delta.vertices >= -1e-12)
    D = catalog_build("mub", (2,))
    quad, _ = pure_state_constants(2, 6)
    # Delta is strictly larger than the range: its vertices fail the sphere bound
    for v in delta.vertices:
        assert linear_residual(D, v) < 1e-12
        assert v @ v > quad + 1e-6
        assert not reconstruction_membership(P, v)


def test_primal_polytope_dimension_limit():
    with pytest.raises(ValueError):
        primal_polytope(catalog_povm("mub", (4,)))


def test_sample_primal_polytope():
    P = catalog_povm("cube")
    interior, boundary, facet = sample_primal_polytope(P, 200, 3)
    space = primal_affine_space(P)
    assert space.contains(interior) and space.contains(boundary, tol=1e-10)
    assert interior.min() >= -1e-12 and boundary.min() >= -1e-12
    assert np.all(boundary[np.arange(200), facet] == 0)


@pytest.mark.parametrize("name,params", [t[:2] for t in TWO_DESIGNS] + [("bipyramid", ())])
def test_duality_checks_pass(name, params):
    rep = duality_checks(catalog_povm(name, params), samples=300, seed=12)
    assert rep.passed, rep
    assert rep.m**2 == pytest.approx(rep.r * rep.R, abs=1e-12)
    assert rep.polar_max_excess <= 1e-10
    assert rep.self_dual_accepted > 0 and rep.self_dual_accepted < rep.self_dual_candidates


def test_sic_inner_products_extremes():
    P = catalog_povm("sic-d2")
    rng = np.random.default_rng(2024)
    p = measurement_map(P, haar_pure_states(2, 10**4, rng))
    q = measurement_map(P, haar_pure_states(2, 10**4, rng))
    inner = np.einsum("ij,ij->i", p, q)
    assert inner.min() >= 1 / 6 - 1e-12 and inner.max() <= 1 / 3 + 1e-12
    assert inner.min() < 1 / 6 + 1e-3 and inner.max() > 1 / 3 - 1e-3


def test_duality_rejects_non_morphophoric():
    with pytest.raises(NotMorphophoricError):
        duality_checks(disphenoid(np.pi / 4).povm(), samples=10)
