"""Acceptance checklist: one test per shipped guarantee.

Run with -v to read the checklist as pass/fail lines.  Tolerances and
runtime budgets are part of the guarantees and are asserted, not logged.
"""

import math
import time

import pytest

from tropical_pants import lattice
from tropical_pants.amoeba import (
    AmoebaGrid,
    convergence_study,
    fiber_probe,
    limit_fiber_check,
    period_integral,
)
from tropical_pants.cli import main
from tropical_pants.invariants import compute_invariants, consistency_checks
from tropical_pants.pants import build_pants_graph, classify_cells, k3_blocks
from tropical_pants.patchwork import monomial_identity, residual_exponents
from tropical_pants.subdivision import subdivide, verify_tables
from tropical_pants.tropical import build_tropical

E4, E8, E16 = math.e**4, math.e**8, math.e**16


def test_criterion_01_table_fidelity():
    start = time.perf_counter()
    report = verify_tables()
    elapsed = time.perf_counter() - start
    assert report.ok
    assert report.entries_total == 96
    assert report.entries_matched == 96
    assert not report.mismatches
    assert elapsed < 1.0


def test_criterion_02_cell_counts(sub_factory):
    start = time.perf_counter()
    for d in range(1, 8):
        sub = sub_factory(d)
        assert len(sub.cells) == d**3
        for cell in sub.cells:
            assert lattice.normalized_volume(cell.vertices) == 1
        for tri, ids in sub.faces.items():
            if not sub.boundary_face(tri):
                assert len(ids) == 2
    assert time.perf_counter() - start < 10.0


def test_criterion_03_pants_counts(sub_factory):
    for d, total in ((5, 5), (6, 24), (7, 63)):
        cls = classify_cells(sub_factory(d))
        assert cls.pants_count == d * (d - 4) ** 2 == total
        assert len(cls.interior_ids) == (d - 4) ** 3
        assert len(cls.flap_ids) == 4 * (d - 4) ** 2


def test_criterion_04_k3_block_lemma(sub_factory):
    for d in (5, 6, 7):
        blocks, verdict = k3_blocks(sub_factory(d))
        assert verdict.ok
        assert verdict.missing == () and verdict.extra == ()
        assert all(len(b.cell_ids) == 64 for b in blocks)


def test_criterion_05_identity_sweeps(sub_factory):
    for d in (5, 6):
        sub = sub_factory(d)
        cls = classify_cells(sub)
        for cid in cls.interior_ids:
            for m, _ in lattice.enumerate_delta(d):
                assert monomial_identity(sub, cid, m).verified
            assert all(r.exponent < 0 for r in residual_exponents(sub, cid))


def test_criterion_06_tropical_duality(sub_factory):
    for d in range(1, 7):
        sub = sub_factory(d)
        comp = build_tropical(sub)
        counts = comp.counts()
        assert counts[0] == len(sub.cells) == d**3
        assert counts[1] == len(sub.faces)
        assert counts[2] == len(sub.edges)
        for e in comp.edges:
            assert e.bounded == (not sub.boundary_face(e.face))
        for c2 in comp.two_cells:
            assert c2.bounded == (not sub.boundary_edge(c2.edge))
    d1 = build_tropical(sub_factory(1))
    assert len(d1.vertices) == 1
    assert d1.vertices[0].point == (8, 8, 13)


def test_criterion_07_graph_b(sub_factory):
    sub = sub_factory(5)
    g = build_pants_graph(classify_cells(sub), sub)
    assert g.n_vertices == 16
    assert len(g.edges) == 30
    assert g.degree_multiset() == {6: 4, 3: 12}
    for d in (5, 6, 7):
        sub = sub_factory(d)
        g = build_pants_graph(classify_cells(sub), sub)
        assert len(g.edges) == 6 * d * (d - 4) ** 2
        assert sum(g.degrees) == 2 * len(g.edges)


def test_criterion_08_amoeba_convergence():
    grid1 = AmoebaGrid((0.0, 16.0, 5), (0.0, 16.0, 5), 3, 3)
    rows1 = convergence_study(1, [E4, E8, E16], grid1)
    maxima1 = [r.max_distance for r in rows1]
    assert maxima1[0] > maxima1[1] > maxima1[2]
    assert maxima1[2] < 0.1

    start = time.perf_counter()
    grid5 = AmoebaGrid((-2.0, 8.0, 8), (-2.0, 8.0, 8), 6, 6)
    rows5 = convergence_study(5, [E4, E8, E16], grid5)
    elapsed = time.perf_counter() - start
    maxima5 = [r.max_distance for r in rows5]
    assert maxima5[0] > maxima5[1] > maxima5[2]
    assert elapsed < 300.0


def test_criterion_09_limit_fiber(sub_factory):
    probe = fiber_probe(
        sub_factory(1), (0, 0, 0), (1, 0, 0), ("7.6", 6, "10.5"), ("8.4", 7, "11.5")
    )
    results = [limit_fiber_check(probe, t, n_x=3, n_theta=6) for t in (E4, E8, E16)]
    angles = [r.angle_residual for r in results]
    ratios = [r.ratio_residual for r in results]
    assert angles[0] > angles[1] > angles[2]
    assert ratios[0] > ratios[1] > ratios[2]
    assert angles[2] < 0.05
    assert ratios[2] < 0.05


def test_criterion_10_period(sub_factory):
    probe = fiber_probe(
        sub_factory(1), (0, 0, 0), (0, 0, 1), ("5.5", "5.5", "12.5"), ("6.5", "6.5", "13.5")
    )
    exact = period_integral(probe, E16, n=64, mode="consistency")
    assert abs(exact.value - exact.target) < 1e-6
    numeric = period_integral(probe, E16, n=64, mode="numeric")
    assert abs(numeric.value - 4 * math.pi**2) / (4 * math.pi**2) < 0.10


def test_criterion_11_invariants(sub_factory):
    inv = compute_invariants(5)
    assert (inv.k_squared, inv.chi, inv.tau, inv.p_g) == (5, 55, -35, 4)
    assert inv.yamabe == pytest.approx(-math.sqrt(32 * math.pi**2 * 5), rel=1e-9)
    assert inv.yamabe == pytest.approx(-39.7384, abs=5e-5)
    assert inv.vol_ke_total == pytest.approx(2 * math.pi**2 * 5, rel=1e-9)
    assert all(e.ok for e in consistency_checks(range(5, 13)))
    for d in (5, 6, 7):
        inv = compute_invariants(d)
        cls = classify_cells(sub_factory(d))
        assert 2 * inv.chi + 3 * inv.tau == cls.pants_count


def test_criterion_12_determinism(tmp_path, capsys):
    def snapshot(run_dir):
        run_dir.mkdir(exist_ok=True)
        assert main(["subdivide", "--d", "3", "--json", str(run_dir / "sub.json")]) == 0
        assert main(["pants", "--d", "5"]) == 0
        pants_out = capsys.readouterr().out
        assert main(["tropical", "--d", "2", "--mesh", str(run_dir / "mesh.off")]) == 0
        assert main([
            "amoeba", "--d", "1", "--t-list", "e8",
            "--grid", "0:16:3,0:16:3,2,2", "--out", str(run_dir),
        ]) == 0
        assert main([
            "period", "--d", "1", "--m", "0,0,0", "--mprime", "0,0,1",
            "--t", "e16", "--res", "8", "--mode", "consistency",
        ]) == 0
        period_out = capsys.readouterr().out
        files = {p.name: p.read_bytes() for p in run_dir.iterdir()}
        # the echoed config contains the run directory path; identical config
        # means identical directory, so compare it within the same location
        return pants_out, period_out, files

    first = snapshot(tmp_path / "run")
    second = snapshot(tmp_path / "run")
    assert first == second
