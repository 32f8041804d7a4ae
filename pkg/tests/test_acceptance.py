"""Acceptance suite: every criterion prints one PASS/FAIL line.

The heavyweight criteria (4 and 8) drive the real CLI; the rest exercise
the library API directly on seeded instances.
"""

import json
import math
import time

import numpy as np
import pytest

from pdmeans import _kernels
from pdmeans.cli import dumps_17g, main as cli_main
from pdmeans.matfun import thompson_distance, validate_spd
from pdmeans.means2 import (
    ScalarBounds,
    furuta_bound,
    gen_kantorovich,
    geo_mean2,
    kantorovich,
    specht,
)
from pdmeans.meansn import (
    WeightVector,
    chaotic_geometric_mean,
    karcher_mean,
    lawson_lim_geometric,
    lawson_lim_weights,
    matrix_inverse,
    power_mean,
    weighted_arithmetic,
    weighted_harmonic,
)

from conftest import random_spd_matrix


def _report(criterion: int, passed: bool, detail: str):
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {criterion}: {status} - {detail}")
    assert passed, f"criterion {criterion}: {detail}"


def _random_weights(rng, n):
    w = rng.uniform(0.5, 1.5, n)
    return WeightVector.of(w / w.sum())


def test_criterion_1_scalar_oracle_equivalence():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    t_grid = (0.25, 0.5, 0.75)
    for i in range(200):
        d = 2 + i % 5
        n = 2 + i % 3
        diags = np.exp(rng.uniform(np.log(0.5), np.log(4.0), (n, d)))
        ops = [validate_spd(np.diag(v)) for v in diags]
        w = _random_weights(rng, n)
        t_pow = float(rng.uniform(0.2, 1.0)) * (1 if i % 2 == 0 else -1)
        t_geo = t_grid[i % 3]

        got, _ = power_mean(w, ops, t_pow)
        expected = np.einsum("i,ij->j", w.w, diags ** t_pow) ** (1.0 / t_pow)
        worst = max(worst, np.max(np.abs(np.diag(got.entries) - expected) / expected))

        expected = np.prod(diags ** w.w[:, None], axis=0)
        got, _ = karcher_mean(w, ops)
        worst = max(worst, np.max(np.abs(np.diag(got.entries) - expected) / expected))
        got = chaotic_geometric_mean(w, ops)
        worst = max(worst, np.max(np.abs(np.diag(got.entries) - expected) / expected))

        what = lawson_lim_weights(n, t_geo)
        expected = np.prod(diags ** what.w[:, None], axis=0)
        got, _ = lawson_lim_geometric(ops, t_geo)
        worst = max(worst, np.max(np.abs(np.diag(got.entries) - expected) / expected))
    elapsed = time.perf_counter() - start
    _report(
        1,
        worst <= 1e-8 and elapsed < 30.0,
        f"max relative error {worst:.2e} (<= 1e-8), runtime {elapsed:.1f}s (< 30s)",
    )


def test_criterion_2_two_variable_coincidence():
    rng = np.random.default_rng(202)
    worst_karcher = 0.0
    worst_residual = 0.0
    for i in range(100):
        d = 2 + i % 5
        a, b = random_spd_matrix(rng, d), random_spd_matrix(rng, d)
        w2 = float(rng.uniform(0.1, 0.9))
        w = WeightVector.of([1.0 - w2, w2])
        gk, _ = karcher_mean(w, [a, b])
        worst_karcher = max(
            worst_karcher, thompson_distance(gk, geo_mean2(a, b, w2))
        )
        t = float(rng.uniform(0.1, 1.0))
        x, _ = power_mean(w, [a, b], t)
        fx = (1.0 - w2) * _kernels.geo2(x.entries, a.entries, t) + w2 * _kernels.geo2(
            x.entries, b.entries, t
        )
        worst_residual = max(
            worst_residual, _kernels.thompson(x.entries, 0.5 * (fx + fx.T))
        )
    _report(
        2,
        worst_karcher <= 1e-7 and worst_residual <= 1e-8,
        f"karcher-vs-geodesic {worst_karcher:.2e} (<= 1e-7), "
        f"power fixed-point residual {worst_residual:.2e} (<= 1e-8)",
    )


def test_criterion_3_power_mean_limit():
    rng = np.random.default_rng(303)
    grid = (0.5, 0.25, 0.1, 0.05, 0.01)
    strictly_decreasing = True
    worst_final = 0.0
    for i in range(20):
        d = 2 + i % 5
        n = 2 + i % 3
        ops = [random_spd_matrix(rng, d) for _ in range(n)]
        w = _random_weights(rng, n)
        gk, _ = karcher_mean(w, ops)
        dists = [thompson_distance(power_mean(w, ops, t)[0], gk) for t in grid]
        strictly_decreasing &= all(
            dists[j] > dists[j + 1] for j in range(len(dists) - 1)
        )
        worst_final = max(worst_final, dists[-1])
    _report(
        3,
        strictly_decreasing and worst_final <= 1e-2,
        f"distance to Karcher strictly decreasing over t={grid}, "
        f"final {worst_final:.2e} (<= 1e-2)",
    )


@pytest.fixture(scope="module")
def full_suite_reports(tmp_path_factory):
    """Criterion 4's CLI invocation, run twice for the determinism check."""
    outs = []
    elapsed = []
    base = tmp_path_factory.mktemp("acceptance")
    for run in range(2):
        out = base / f"report{run}.json"
        start = time.perf_counter()
        code = cli_main(
            [
                "verify",
                "--checks",
                "all",
                "--count",
                "200",
                "--dims",
                "2..6",
                "--seed",
                "1",
                "--out",
                str(out),
            ]
        )
        elapsed.append(time.perf_counter() - start)
        assert code == 0, "verification suite reported failures"
        outs.append(out)
    return outs, elapsed


def test_criterion_4_inequality_suite(full_suite_reports):
    outs, elapsed = full_suite_reports
    report = json.loads(outs[0].read_text())
    total_fail = sum(r["failures"] for r in report["results"])
    conclusive_ok = all(
        r["passes"] + r["failures"] >= 0.99 * (r["passes"] + r["failures"] + r["inconclusive"])
        for r in report["results"]
    )
    _report(
        4,
        total_fail == 0 and conclusive_ok and elapsed[0] < 300.0,
        f"{len(report['results'])} checks x 200 instances, {total_fail} failures, "
        f">= 99% conclusive, {elapsed[0]:.1f}s (< 300s)",
    )


def test_criterion_5_scalar_constant_identities():
    exact_one = specht(1.0) == 1.0
    grid_ok = True
    for m in np.geomspace(0.1, 10.0, 50):
        big = m * 3.7
        bounds = ScalarBounds(float(m), float(big))
        direct = (m + big) ** 2 / (4.0 * m * big)
        grid_ok &= abs(gen_kantorovich(bounds, 2.0) - direct) <= 1e-12 * direct
    chain_ok = True
    furuta_ok = True
    for h in np.geomspace(1.0 + 1e-9, 100.0, 100):
        s = specht(float(h))
        k = kantorovich(ScalarBounds(1.0, float(h)))
        chain_ok &= s <= k + 1e-12 and k <= s * s + 1e-12
        bounds = ScalarBounds(1.0, float(h))
        for p in (1.5, 2.0, 3.0):
            furuta_ok &= gen_kantorovich(bounds, p) <= furuta_bound(bounds, p) + 1e-12
    _report(
        5,
        exact_one and grid_ok and chain_ok and furuta_ok,
        "S(1)=1 exact; K(m,M,2)=(m+M)^2/4mM on 50-pt grid; "
        "S<=K<=S^2 on 100 h; genK <= Ky Fan-Furuta for p in {1.5,2,3}",
    )


def test_criterion_6_sharper_bound_crossover():
    threshold = 2.0 + math.sqrt(3.0)
    inside_ok = True
    for h in list(np.linspace(1.0, threshold, 40)) + [threshold]:
        m, M = 1.0, float(h)
        k = kantorovich(ScalarBounds(m, M))
        inside_ok &= k * (M * M + m * m) <= (M + m) ** 2 + 1e-12
    h = threshold + 0.01
    k = kantorovich(ScalarBounds(1.0, h))
    outside_fails = k * (h * h + 1.0) > (1.0 + h) ** 2 + 1e-12
    _report(
        6,
        inside_ok and outside_fails,
        f"k(M^2+m^2) <= (M+m)^2 up to M/m = 2+sqrt(3), violated at 2+sqrt(3)+0.01",
    )


def test_criterion_7_meansn_invariants():
    rng = np.random.default_rng(707)
    worst = {"duality": 0.0, "self_duality": 0.0, "homogeneity": 0.0, "permutation": 0.0}
    for i in range(200):
        d = 2 + i % 4
        n = 2 + i % 3
        ops = [random_spd_matrix(rng, d) for _ in range(n)]
        w = _random_weights(rng, n)
        t = float(rng.uniform(0.2, 1.0))
        inv_ops = [matrix_inverse(a) for a in ops]

        direct, _ = power_mean(w, ops, t)
        dual, _ = power_mean(w, inv_ops, -t)
        worst["duality"] = max(
            worst["duality"], thompson_distance(matrix_inverse(dual), direct)
        )

        gk, _ = karcher_mean(w, ops)
        gk_dual, _ = karcher_mean(w, inv_ops)
        worst["self_duality"] = max(
            worst["self_duality"], thompson_distance(matrix_inverse(gk_dual), gk)
        )

        scale = float(rng.uniform(0.3, 3.0))
        scaled, _ = power_mean(
            w, [validate_spd(scale * a.entries) for a in ops], t
        )
        target = validate_spd(scale * direct.entries)
        worst["homogeneity"] = max(
            worst["homogeneity"], thompson_distance(scaled, target)
        )

        perm = rng.permutation(n)
        ops_p = [ops[j] for j in perm]
        w_p = WeightVector.of(w.w[perm])
        for mean, mean_p in (
            (direct, power_mean(w_p, ops_p, t)[0]),
            (gk, karcher_mean(w_p, ops_p)[0]),
            (chaotic_geometric_mean(w, ops), chaotic_geometric_mean(w_p, ops_p)),
            (weighted_arithmetic(w, ops), weighted_arithmetic(w_p, ops_p)),
            (weighted_harmonic(w, ops), weighted_harmonic(w_p, ops_p)),
        ):
            worst["permutation"] = max(
                worst["permutation"], float(np.max(np.abs(mean.entries - mean_p.entries)))
            )
    ok = (
        worst["duality"] <= 1e-7
        and worst["self_duality"] <= 1e-7
        and worst["homogeneity"] <= 1e-8
        and worst["permutation"] <= 1e-9
    )
    _report(
        7,
        ok,
        "200 instances: duality {duality:.1e} (<=1e-7), self-duality "
        "{self_duality:.1e} (<=1e-7), homogeneity {homogeneity:.1e} (<=1e-8), "
        "permutation {permutation:.1e} (<=1e-9)".format(**worst),
    )


def test_criterion_8_determinism(full_suite_reports):
    outs, _ = full_suite_reports
    docs = [json.loads(out.read_text()) for out in outs]
    blobs = [dumps_17g(doc["results"]) for doc in docs]
    _report(
        8,
        blobs[0] == blobs[1] and docs[0]["config"] == docs[1]["config"],
        "two seed-1 suite runs produce byte-identical result arrays",
    )
