"""Smoke test for the `gwalk` extension module.

Build and install first, e.g. `maturin build --release` followed by
`pip install target/wheels/gwalk-*.whl`, then run `python python/smoke_test.py`.
"""

import cmath
import math

import gwalk


def close(a, b, tol=1e-10):
    return abs(a - b) < tol


def main():
    k4 = gwalk.Graph.complete(4, 2)
    assert k4.vertex_count == 4 and k4.boundary == [0, 1]
    assert len(k4.arcs) == 12

    # special values on K4 with two tails
    assert close(gwalk.comfortability(k4, 0.0), 13 / 8)
    assert close(gwalk.comfortability(k4, math.pi), 5 / 12)
    assert close(gwalk.complete_comfortability(4, 2, 0.0), 13 / 8)

    # direct solver against the time iteration
    inflow = [0.3 - 0.2j, 1 + 0.5j]
    direct = gwalk.stationary_state(k4, 1.1, inflow)
    iterated, steps = gwalk.iterate(k4, 1.1, inflow, tol=1e-12)
    assert steps > 0
    assert max(abs(a - b) for a, b in zip(direct, iterated)) < 1e-9

    # unitary scattering; perfect reflection at θ*
    ts = gwalk.theta_star(4)
    s = gwalk.scattering_matrix(k4, ts)
    assert close(abs(s[0][1]), 0.0) and close(s[0][0], cmath.exp(1j * ts))
    s = gwalk.scattering_matrix(k4, 0.7)
    for i in range(2):
        for j in range(2):
            dot = sum(s[i][k] * s[j][k].conjugate() for k in range(2))
            assert close(dot, 1.0 if i == j else 0.0)

    thetas = [t for t, _ in gwalk.singular_set(k4)]
    assert any(close(t, ts, 1e-9) for t in thetas)

    # JSON round trip and error mapping
    p2 = gwalk.Graph.from_json('{"vertices":2,"edges":[[0,1]],"boundary":[0,1]}')
    assert gwalk.Graph.from_json(p2.to_json()).edges == [(0, 1)]
    z = cmath.exp(0.4j)
    assert close(gwalk.scattering_matrix(p2, 0.4)[0][1], z * z)
    try:
        gwalk.Graph(3, [(0, 1)], [0])
    except ValueError as e:
        assert "disconnected" in str(e)
    else:
        raise AssertionError("disconnected graph accepted")

    curve = gwalk.comfortability_curve(gwalk.Graph.complete(4, 4), [0.5, 1.5, 2.5])
    assert all(e > 0 for e in curve)

    passed, checks = gwalk.run_verify("pm1")
    assert passed and checks

    print("gwalk smoke test passed")


if __name__ == "__main__":
    main()
