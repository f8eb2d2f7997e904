"""Smoke tests for the python bindings."""

import math
import sys

import qdirac as qd


def test_lattice():
    lat = qd.build_lattice(0.5, 1.0, 8)
    assert len(lat) == 9
    assert lat.nodes[0] == 1.0
    assert lat.nodes[3] == 0.125
    assert lat.ext_node == 2.0


def test_trig_values():
    ctx = qd.QTrigContext(0.5)
    assert abs(qd.q_cos(ctx, 1.0) - 0.67926125280013183) < 1e-14
    assert abs(qd.q_sin(ctx, 1.0) - 0.90639386286161405) < 1e-14
    assert qd.q_cos(ctx, -3.2) == qd.q_cos(ctx, 3.2)
    assert qd.q_sin(ctx, -3.2) == -qd.q_sin(ctx, 3.2)
    e = qd.q_cos_eval(ctx, 2000.0)
    assert e.bits_used == 256 and not e.precision_loss


def test_precision_flags():
    lat = qd.build_lattice(0.5, 1.0, 64)
    pb = qd.zero_potential_problem(lat, qd.BoundarySpec(0.0, 1.0, 1.0, 0.0))
    plain = qd.QTrigContext.binary64_only(0.5)
    rep = qd.find_eigenvalues(pb, plain, 12, False)
    assert rep.flags.precision_loss
    rep_ok = qd.find_eigenvalues(pb, qd.QTrigContext(0.5), 12, False)
    assert not rep_ok.flags.precision_loss


def test_zero_table():
    ctx = qd.QTrigContext(0.5)
    t = qd.trig_zeros(ctx, qd.TrigKind.COS, 8)
    assert all(b > a for a, b in zip(t.zeros, t.zeros[1:]))
    dev = abs(t.zeros[7] * 0.5 * 0.5 ** 7.5 - 1.0)
    assert dev < 1e-10
    assert t.to_csv().startswith("m,zero,residual")


def test_solver_round_trip():
    lat = qd.build_lattice(0.5, 1.0, 64)
    ctx = qd.QTrigContext(0.5)
    pb = qd.zero_potential_problem(lat, qd.BoundarySpec(0.0, 1.0, 1.0, 0.0))
    sol = qd.propagate(pb, 2.0)
    assert sol.residual < 1e-12
    sa = qd.successive_approx(pb, ctx, 2.0)
    diff = max(
        abs(x - y) for x, y in zip(sol.phi.y1.values, sa.phi.y1.values)
    )
    assert diff < 1e-10
    assert sa.iterations == 1


def test_spectrum():
    lat = qd.build_lattice(0.5, 1.0, 64)
    ctx = qd.QTrigContext(0.5)
    pb = qd.zero_potential_problem(lat, qd.BoundarySpec(0.0, 1.0, 1.0, 0.0))
    rep = qd.find_eigenvalues(pb, ctx, 6, False)
    assert len(rep.eigenvalues) == 6
    zeros = qd.trig_zeros(ctx, qd.TrigKind.COS, 6).zeros
    for e in rep.eigenvalues:
        assert abs(e.lambda_ - zeros[e.index - 1]) < 1e-10 * zeros[e.index - 1]
        assert qd.simplicity_check(pb, e) < 1e-6
    assert rep.flags.orthogonality_ok
    assert rep.flags.simplicity_ok
    assert not rep.flags.precision_loss
    assert math.isclose(
        qd.asymptotic_eigenvalue(qd.BoundaryCase.CASE_1II, lat, 3),
        2.0 ** 3.5,
        rel_tol=1e-12,
    )


def test_csv_round_trip():
    lat = qd.build_lattice(0.5, 1.0, 4)
    f = qd.LatticeFn(lat, [1.0, 0.25, 1e-3, -7.5, 0.0], 2.5, 0.0)
    csv = f.to_csv()
    assert csv.splitlines()[0] == "n,t,value"
    assert csv.splitlines()[-1].startswith("-1,")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"[PASS] {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
