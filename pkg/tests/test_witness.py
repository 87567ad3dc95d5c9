from functools import reduce

import numpy as np
import pytest

from stabwit.config import CapExceededError, override_limits
from stabwit.pauli import ObservableSum, observable_to_dense, parse_pauli, to_dense
from stabwit.separability import product_expectations, random_bloch_vectors
from stabwit.stabilizer import GraphSpec, cluster_generators, ghz_generators
from stabwit.states import (
    BiseparableGraphError,
    cluster_state,
    ghz_basis,
    ghz_state,
    graph_state,
    maximally_mixed,
    noisy_mixture,
    product_state,
)
from stabwit.witness import (
    Family,
    ProjectorWitness,
    WitnessSpec,
    WitnessSpecError,
    build,
    closed_form_threshold,
    evaluate,
    finer_than_check,
    finer_than_for,
    noise_threshold,
    projector_witness,
    stabilizer_group_projector,
    witness_to_dense,
)


def obs(n, identity, terms):
    return ObservableSum.from_terms(n, [(c, parse_pauli(t)) for c, t in terms], identity)


def dense_half_plus(g):
    d = to_dense(g)
    return (d + np.eye(d.shape[0])) / 2


def dense_oracle(family, n):
    """Witness assembled from dense generator matrices, no Pauli expansion."""
    eye = np.eye(1 << n)
    if family in (Family.GHZ, Family.GHZ_PRIME):
        gs = list(ghz_generators(n))
    else:
        gs = list(cluster_generators(n))
    if family in (Family.GHZ_PRIME, Family.CLUSTER_PRIME):
        return (n - 1) * eye - sum(to_dense(g) for g in gs)
    if family is Family.GHZ:
        first = dense_half_plus(gs[0])
        second = reduce(np.matmul, [dense_half_plus(g) for g in gs[1:]])
    else:
        first = reduce(np.matmul, [dense_half_plus(g) for g in gs[1::2]])
        second = reduce(np.matmul, [dense_half_plus(g) for g in gs[0::2]])
    return 3 * eye - 2 * (first + second)


def test_ghz3_matches_eq4():
    expected = obs(3, 1.5, [(-1, "XXX"), (-0.5, "ZZI"), (-0.5, "IZZ"), (-0.5, "ZIZ")])
    assert build(WitnessSpec(Family.GHZ, 3)).same_as(expected)
    assert build(WitnessSpec(Family.GHZ3_EXPANDED, 3)).same_as(expected)


def test_mermin_expansion():
    expected = obs(3, 2.0, [(1, "YYX"), (1, "XYY"), (1, "YXY"), (-1, "XXX")])
    assert build(WitnessSpec(Family.MERMIN3, 3)).same_as(expected)


def test_mermin_dense_product():
    s1, s2, s3 = (to_dense(g) for g in ghz_generators(3))
    eye = np.eye(8)
    dense = 2 * eye - s1 @ (eye + s2) @ (eye + s3)
    np.testing.assert_allclose(observable_to_dense(build(WitnessSpec(Family.MERMIN3, 3))), dense)


def test_ghz_prime_four():
    expected = obs(4, 3.0, [(-1, "XXXX"), (-1, "ZZII"), (-1, "IZZI"), (-1, "IIZZ")])
    assert build(WitnessSpec(Family.GHZ_PRIME, 4)).same_as(expected)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("family", [Family.GHZ, Family.GHZ_PRIME, Family.CLUSTER, Family.CLUSTER_PRIME])
def test_expansion_matches_dense_oracle(family, n):
    w = build(WitnessSpec(family, n))
    np.testing.assert_allclose(observable_to_dense(w), dense_oracle(family, n), atol=1e-12)


@pytest.mark.parametrize("n", [3, 6, 10])
def test_term_counts(n):
    # 1 + (2^(N-1) - 1) non-identity strings for the GHZ witness
    assert len(build(WitnessSpec(Family.GHZ, n)).terms) == 2 ** (n - 1)


def test_spec_validation():
    with pytest.raises(WitnessSpecError):
        WitnessSpec(Family.GHZ3_EXPANDED, 4)
    with pytest.raises(WitnessSpecError):
        WitnessSpec(Family.MERMIN3, 5)
    with pytest.raises(WitnessSpecError):
        WitnessSpec(Family.GRAPH, 3)
    with pytest.raises(BiseparableGraphError):
        WitnessSpec.for_graph(GraphSpec.from_edges(4, [(0, 1), (2, 3)]))
    with pytest.raises(WitnessSpecError):
        WitnessSpec(Family.PROJECTOR, 3, target="w-state")


def test_expansion_cap():
    with override_limits(expansion_cap=5):
        with pytest.raises(CapExceededError):
            build(WitnessSpec(Family.GHZ, 6))


@pytest.mark.parametrize("n", range(2, 13))
def test_ghz_witness_on_target(n):
    assert abs(evaluate(build(WitnessSpec(Family.GHZ, n)), ghz_state(n)) + 1) < 1e-12


def test_ghz3_on_mixed():
    w = build(WitnessSpec(Family.GHZ, 3))
    dense_value = np.trace(witness_to_dense(w)).real / 8
    assert evaluate(w, maximally_mixed(3)) == pytest.approx(1.5, abs=1e-12)
    assert dense_value == pytest.approx(1.5, abs=1e-12)


@pytest.mark.parametrize("n", range(3, 9))
def test_cluster_witnesses_on_target(n):
    c = cluster_state(n)
    assert abs(evaluate(build(WitnessSpec(Family.CLUSTER, n)), c) + 1) < 1e-12
    assert abs(evaluate(build(WitnessSpec(Family.CLUSTER_PRIME, n)), c) + 1) < 1e-12


@pytest.mark.parametrize("g", [GraphSpec.complete(4), GraphSpec.ring(5), GraphSpec.star(6), GraphSpec.path(3)])
def test_graph_witness_on_target(g):
    value = evaluate(build(WitnessSpec.for_graph(g)), graph_state(g))
    assert value == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("family,n", [(Family.GHZ, 4), (Family.CLUSTER, 5), (Family.MERMIN3, 3), (Family.PROJECTOR, 4)])
def test_affine_in_noise(family, n):
    spec = WitnessSpec(family, n)
    w = build(spec)
    psi = cluster_state(n) if family is Family.CLUSTER else ghz_state(n)
    values = [evaluate(w, noisy_mixture(psi, p)) for p in (0.1, 0.45, 0.8)]
    slope1 = (values[1] - values[0]) / 0.35
    slope2 = (values[2] - values[1]) / 0.35
    assert abs(slope1 - slope2) < 1e-12


@pytest.mark.parametrize("n,expected", [(3, 0.4)])
def test_threshold_known_values(n, expected):
    r = noise_threshold(WitnessSpec(Family.GHZ, n))
    assert abs(r.p_threshold - expected) < 1e-12
    assert abs(noise_threshold(WitnessSpec(Family.GHZ_PRIME, 5)).p_threshold - 0.2) < 1e-12
    assert abs(noise_threshold(WitnessSpec(Family.CLUSTER, 4)).p_threshold - 1 / 3) < 1e-12


@pytest.mark.parametrize("n", range(3, 11))
@pytest.mark.parametrize("family", [Family.GHZ, Family.GHZ_PRIME, Family.CLUSTER])
def test_threshold_closed_forms(family, n):
    r = noise_threshold(WitnessSpec(family, n))
    assert r.closed_form is not None
    assert r.difference < 1e-12
    assert r.witness_at_zero < 0 <= r.witness_at_one


@pytest.mark.parametrize("n", [12, 14, 16])
def test_threshold_pure_path_large(n):
    r = noise_threshold(WitnessSpec(Family.GHZ_PRIME, n))
    assert r.difference < 1e-12
    g = GraphSpec.ring(n)
    r = noise_threshold(WitnessSpec.for_graph(g))
    assert r.closed_form is None
    # value -1 on the target and N - 1 on white noise give 1/N
    assert abs(r.p_threshold - 1 / n) < 1e-12


def test_threshold_matches_dense_scan():
    spec = WitnessSpec(Family.CLUSTER, 5)
    r = noise_threshold(spec)
    w = build(spec)
    at_root = evaluate(w, noisy_mixture(cluster_state(5), r.p_threshold))
    assert abs(at_root) < 1e-12


def test_closed_form_absent():
    for family in (Family.CLUSTER_PRIME, Family.GRAPH, Family.PROJECTOR):
        assert closed_form_threshold(family, 5) is None


@pytest.mark.parametrize("n", range(3, 9))
def test_finer_than_ghz(n):
    for family in (Family.GHZ, Family.GHZ_PRIME):
        rep = finer_than_for(WitnessSpec(family, n))
        assert rep.psd and rep.min_eigenvalue >= -1e-10
        assert rep.max_offdiag < 1e-10
        assert rep.diagonal.min() >= -1e-10


def test_finer_than_ghz_diagonal_values():
    # W - 2W~ in the GHZ basis: 0 unless both S_1 and some Z-pair fail, then 2
    rep = finer_than_for(WitnessSpec(Family.GHZ, 3))
    expected = [0, 0, 0, 0, 0, 2, 2, 2]
    np.testing.assert_allclose(rep.diagonal, expected, atol=1e-12)


@pytest.mark.parametrize("n", range(3, 9))
def test_finer_than_cluster(n):
    for family in (Family.CLUSTER, Family.CLUSTER_PRIME):
        assert finer_than_for(WitnessSpec(family, n)).psd


def test_finer_than_fails_for_too_large_alpha():
    w = build(WitnessSpec(Family.GHZ, 3))
    rep = finer_than_check(w, 3, ghz_state(3), alpha=3.0, basis=ghz_basis(3))
    assert not rep.psd


def test_projector_witness_values():
    for n in (3, 5, 7):
        assert abs(projector_witness(ghz_state(n)).c_tilde - 0.5) < 1e-12
    assert abs(projector_witness(cluster_state(5)).c_tilde - 0.5) < 1e-12
    prod = projector_witness(product_state([[1, 0], [1, 1], [0, 1]]))
    assert abs(prod.c_tilde - 1) < 1e-12
    assert not prod.detecting


def test_projector_family():
    w = build(WitnessSpec(Family.PROJECTOR, 4))
    assert isinstance(w, ProjectorWitness)
    assert evaluate(w, ghz_state(4)) == pytest.approx(-0.5)
    wc = build(WitnessSpec(Family.PROJECTOR, 4, target="cluster"))
    assert evaluate(wc, cluster_state(4)) == pytest.approx(-0.5)
    rho = noisy_mixture(ghz_state(4), 0.3)
    assert evaluate(w, rho) == pytest.approx(np.trace(rho.matrix @ w.to_dense()).real, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_projector_equals_group_average(n):
    for gs, psi in ((ghz_generators(n), ghz_state(n)), (cluster_generators(n), cluster_state(n))):
        np.testing.assert_allclose(observable_to_dense(stabilizer_group_projector(gs)), psi.projector(), atol=1e-12)


NONNEG_FAMILIES = [
    (Family.GHZ, range(2, 7)),
    (Family.GHZ_PRIME, range(2, 7)),
    (Family.GHZ3_EXPANDED, [3]),
    (Family.MERMIN3, [3]),
    (Family.CLUSTER, range(2, 7)),
    (Family.CLUSTER_PRIME, range(2, 7)),
]


@pytest.mark.parametrize("family,ns", NONNEG_FAMILIES)
def test_nonnegative_on_random_products(family, ns):
    rng = np.random.default_rng(11)
    for n in ns:
        w = build(WitnessSpec(family, n))
        values = product_expectations(w, random_bloch_vectors(10_000, n, rng))
        assert values.min() >= -1e-10


def test_graph_witness_nonnegative_on_products():
    rng = np.random.default_rng(12)
    for g in (GraphSpec.complete(4), GraphSpec.star(5), GraphSpec.ring(6)):
        w = build(WitnessSpec.for_graph(g))
        assert product_expectations(w, random_bloch_vectors(10_000, g.n_qubits, rng)).min() >= -1e-10


def test_witness_json():
    w = build(WitnessSpec(Family.CLUSTER, 4))
    assert ObservableSum.from_json(w.to_json()).same_as(w)
