"""Exit criteria, one marked group per criterion.

The terminal summary prints a PASS/FAIL line for every criterion number.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from stabwit import cli
from stabwit.pauli import ObservableSum, parse_pauli
from stabwit.sampling import estimate_observable
from stabwit.scheduler import graph_witness_settings, min_settings
from stabwit.separability import (
    biseparable_min,
    check_cluster,
    check_ghz,
    pair_observable,
    product_expectations,
    product_state_max,
    random_bloch_vectors,
)
from stabwit.stabilizer import GraphSpec, cluster_generators, ghz_generators, graph_generators
from stabwit.states import (
    bipartitions,
    cluster_state,
    ghz_state,
    graph_state,
    max_schmidt_over_bipartitions,
    noisy_mixture,
    pauli_expectation,
)
from stabwit.witness import (
    Family,
    WitnessSpec,
    build,
    finer_than_for,
    noise_threshold,
    witness_to_dense,
)

acceptance = pytest.mark.acceptance
NS = range(2, 11)


def stabilized_cases():
    for n in NS:
        yield f"ghz-{n}", ghz_generators(n), ghz_state(n)
        yield f"cluster-{n}", cluster_generators(n), cluster_state(n)
        graphs = [("path", GraphSpec.path(n)), ("star", GraphSpec.star(n))]
        if n >= 3:
            graphs.append(("ring", GraphSpec.ring(n)))
        for name, g in graphs:
            yield f"{name}-{n}", graph_generators(g), graph_state(g)


@acceptance(1, "stabilization of GHZ, cluster and graph states, N=2..10")
def test_stabilization():
    worst = 0.0
    for _, gs, psi in stabilized_cases():
        for s in gs:
            worst = max(worst, abs(pauli_expectation(s, psi) - 1))
    assert worst < 1e-12


@acceptance(2, "three-qubit GHZ witness expands to the literal Pauli sum")
def test_ghz3_expansion():
    expected = ObservableSum.from_terms(
        3,
        [(-1.0, parse_pauli("XXX"))] + [(-0.5, parse_pauli(t)) for t in ("ZZI", "IZZ", "ZIZ")],
        1.5,
    )
    for family in (Family.GHZ, Family.GHZ3_EXPANDED):
        w = build(WitnessSpec(family, 3))
        assert w.identity_coeff == expected.identity_coeff
        assert set(w.terms) == set(expected.terms)


def cluster_closed(n):
    if n % 2 == 0:
        return 1 / (4 - 4 / 2 ** (n / 2))
    return 1 / (4 - 2 * (1 / 2 ** ((n + 1) / 2) + 1 / 2 ** ((n - 1) / 2)))


THRESHOLD_CASES = (
    [(Family.GHZ, 3, 0.4)]
    + [(Family.GHZ, n, 1 / (3 - 4 / 2**n)) for n in range(4, 11)]
    + [(Family.GHZ_PRIME, n, 1 / n) for n in range(3, 11)]
    + [(Family.CLUSTER, n, cluster_closed(n)) for n in range(3, 11)]
    + [(Family.MERMIN3, 3, 0.5), (Family.GHZ3_EXPANDED, 3, 0.4)]
)


@acceptance(3, "noise thresholds match the closed forms within 1e-12")
@pytest.mark.parametrize("family, n, expected", THRESHOLD_CASES, ids=lambda v: getattr(v, "value", str(v)))
def test_thresholds(family, n, expected):
    r = noise_threshold(WitnessSpec(family, n))
    assert abs(r.p_threshold - expected) < 1e-12
    if family is Family.GHZ:
        assert r.p_threshold > 1 / 3
    if family is Family.CLUSTER:
        assert r.p_threshold > 1 / 4


@acceptance(4, "W - 2*(1/2 - |target><target|) is PSD; GHZ case diagonal in the GHZ basis")
@pytest.mark.parametrize("family", [Family.GHZ, Family.GHZ_PRIME, Family.CLUSTER, Family.CLUSTER_PRIME])
@pytest.mark.parametrize("n", range(3, 9))
def test_finer_than(family, n):
    rep = finer_than_for(WitnessSpec(family, n))
    assert rep.min_eigenvalue >= -1e-10
    if family in (Family.GHZ, Family.GHZ_PRIME):
        assert rep.max_offdiag < 1e-10


@acceptance(5, "largest Schmidt coefficient over all cuts is 1/sqrt(2)")
@pytest.mark.parametrize("n", NS)
def test_schmidt_bound(n):
    for psi in (ghz_state(n), cluster_state(n)):
        smax, _ = max_schmidt_over_bipartitions(psi)
        assert abs(smax - 1 / np.sqrt(2)) < 1e-10
        assert abs(smax**2 - 0.5) < 1e-10


def settings_count(spec):
    plan = min_settings(build(spec).strings)
    assert plan.is_valid() and plan.optimal
    return plan.n_settings


@acceptance(6, "two settings for GHZ/cluster and bipartite graphs; N for complete graphs")
def test_setting_counts():
    for n in range(2, 13):
        for family in (Family.GHZ, Family.GHZ_PRIME, Family.CLUSTER, Family.CLUSTER_PRIME):
            assert settings_count(WitnessSpec(family, n)) == 2, (family, n)
    bipartite = [GraphSpec.path(n) for n in range(2, 9)] + [GraphSpec.ring(4), GraphSpec.ring(6)]
    bipartite += [GraphSpec.star(n) for n in range(3, 9)]
    for g in bipartite:
        assert graph_witness_settings(g).n_settings == 2
        assert settings_count(WitnessSpec.for_graph(g)) == 2
    for n in range(3, 7):
        g = GraphSpec.complete(n)
        assert graph_witness_settings(g).n_settings == n
        assert settings_count(WitnessSpec.for_graph(g)) == n


def condition_pairs(n):
    ghz, cl = ghz_generators(n), cluster_generators(n)
    return [(ghz[0], ghz[m]) for m in range(1, n)] + [(cl[k], cl[k + 1]) for k in range(n - 1)]


@acceptance(7, "separability conditions: random products, noise bracket at 1/2, optimizer bound")
def test_separability_conditions():
    rng = np.random.default_rng(2024)
    for n in range(2, 7):
        bloch = random_bloch_vectors(10_000, n, rng)
        for a, b in condition_pairs(n):
            assert product_expectations(pair_observable(a, b), bloch).max() <= 1 + 1e-10
    for n in range(3, 7):
        for p, violated in ((0.49, True), (0.51, False)):
            rho_g = noisy_mixture(ghz_state(n), p)
            rho_c = noisy_mixture(cluster_state(n), p)
            assert all(check_ghz(rho_g, m).violated is violated for m in range(2, n + 1))
            assert all(check_cluster(rho_c, k).violated is violated for k in range(1, n))
        for a, b in condition_pairs(n):
            assert abs(product_state_max(pair_observable(a, b), n).value - 1) < 1e-8


NONNEG_CASES = (
    [(Family.GHZ3_EXPANDED, 3, None), (Family.MERMIN3, 3, None)]
    + [(f, n, None) for f in (Family.GHZ, Family.GHZ_PRIME, Family.CLUSTER, Family.CLUSTER_PRIME) for n in (3, 4, 5)]
    + [(Family.GRAPH, g.n_qubits, g) for g in (GraphSpec.star(4), GraphSpec.ring(5), GraphSpec.complete(4))]
)


@acceptance(8, "no product or biseparable state drives a witness below -1e-6")
@pytest.mark.parametrize("family, n, graph", NONNEG_CASES, ids=lambda v: getattr(v, "value", None))
def test_biseparable_nonnegativity(family, n, graph):
    w = build(WitnessSpec(family, n, graph))
    rng = np.random.default_rng(n)
    assert product_expectations(w, random_bloch_vectors(20_000, n, rng)).min() >= -1e-6
    dense = witness_to_dense(w)
    # random states that are product across a random cut
    cuts = bipartitions(n)
    for _ in range(200):
        part = cuts[rng.integers(len(cuts))]
        rest = [k for k in range(n) if k not in part]
        a = rng.normal(size=1 << len(part)) + 1j * rng.normal(size=1 << len(part))
        b = rng.normal(size=1 << len(rest)) + 1j * rng.normal(size=1 << len(rest))
        t = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b)).reshape((2,) * n)
        psi = t.transpose(np.argsort(list(part) + rest)).reshape(-1)
        assert np.vdot(psi, dense @ psi).real >= -1e-6
    assert product_state_max(-dense, n).value <= 1e-6
    value, _ = biseparable_min(w, n)
    assert value >= -1e-6


@acceptance(9, "shot estimates: pure GHZ3 within 5 stderr of -1; stderr halves at 4x shots")
def test_sampling_statistics():
    w = build(WitnessSpec(Family.GHZ3_EXPANDED, 3))
    plan = min_settings(w.strings)
    pure = noisy_mixture(ghz_state(3), 0.0)
    for seed in range(20):
        est = estimate_observable(w, plan, pure, 10_000, seed)
        assert abs(est.mean + 1) <= 5 * est.stderr + 1e-12
    # a pure GHZ3 has zero shot variance, so scaling is checked on a noisy one
    noisy = noisy_mixture(ghz_state(3), 0.3)
    for seed in range(20):
        small = estimate_observable(w, plan, noisy, 10_000, seed).stderr
        large = estimate_observable(w, plan, noisy, 40_000, seed + 100).stderr
        assert abs(large / small - 0.5) <= 0.2 * 0.5


DETERMINISM_RUNS = [
    ["build", "--family", "cluster", "--n", "5"],
    ["threshold", "--family", "ghz", "--n", "6", "--p-grid", "0:1:11"],
    ["settings", "--family", "mermin3", "--n", "3"],
    ["sample", "--family", "ghz3", "--n", "3", "--shots", "2000", "--seed", "7", "--p", "0.2"],
    ["verify", "--family", "ghz", "--n", "3", "--starts", "10", "--seed", "3"],
]


@acceptance(10, "identical seeds give byte-identical JSON")
@pytest.mark.parametrize("argv", DETERMINISM_RUNS, ids=lambda a: a[0])
def test_determinism(argv):
    outputs = []
    for hash_seed in ("0", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=hash_seed)
        proc = subprocess.run(
            [sys.executable, "-m", "stabwit", *argv], capture_output=True, env=env, check=False
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1]
    json.loads(outputs[0])
    assert cli.main(argv) == 0
