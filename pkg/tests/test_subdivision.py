"""Lifting function, supporting forms, subdivision construction, reference tables."""

import json

import pytest

from tropical_pants import lattice, subdivision
from tropical_pants.errors import CertificationError, DegeneracyError, DomainError
from tropical_pants.subdivision import (
    AffineForm,
    check_supporting,
    lift_value,
    subdivide,
    supporting_form,
    verify_tables,
)


def test_lift_values_frozen():
    assert lift_value((0, 0, 0)) == 0
    assert lift_value((1, 0, 0)) == 8
    assert lift_value((0, 1, 0)) == 8
    assert lift_value((0, 0, 1)) == 13
    assert lift_value((1, 1, 1)) == 61
    assert lift_value((0, -1, 0)) == 8
    assert lift_value((1, -1, 1)) == 21
    assert lift_value((2, 1, 1)) == 105
    assert lift_value((1, 1, 2)) == 124


def test_lift_positive_definite():
    for m, _ in lattice.enumerate_delta(6):
        shifted = (m[0] - 3, m[1] - 3, m[2] - 3)
        val = lift_value(shifted)
        assert val >= 0
        assert (val == 0) == (shifted == (0, 0, 0))


def test_supporting_form_unit_cell():
    form = supporting_form([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert form == AffineForm((8, 8, 13), 0)


def test_supporting_form_top_cube_cell():
    form = supporting_form([(1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)])
    assert form == AffineForm((28, 28, 37), -32)


def test_supporting_form_interior_cell_d5():
    # frozen from the exact solve with lift values 61, 105, 105, 124
    form = supporting_form([(1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2)])
    assert form == AffineForm((44, 44, 63), -90)
    assert form((1, 1, 1)) == 61


def test_supporting_form_degenerate():
    with pytest.raises(DegeneracyError):
        supporting_form([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)])


def test_check_supporting_examples():
    cell = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    form = AffineForm((8, 8, 13), 0)
    assert form((1, 1, 0)) == 16  # 16 < v = 24
    v = check_supporting(form, cell, 1, points=[(1, 1, 0), (0, 0, -1)])
    assert v.ok and not v.violations
    assert form((0, 0, -1)) == -13  # -13 < v = 13
    bad = AffineForm((9, 8, 13), 0)
    v = check_supporting(bad, cell, 1)
    assert not v.ok
    assert any(p == (1, 0, 0) for p, _, _ in v.violations)


def test_verify_tables_full_match():
    report = verify_tables()
    assert report.ok
    assert report.entries_total == 96
    assert report.entries_matched == 96
    assert report.forms_ok and report.lift_ok
    assert report.mismatches == []
    assert "96/96" in report.summary()


def test_reference_table_spot_entries():
    # frozen spot checks of the embedded fixture grids
    row0 = subdivision.REFERENCE_CUBE_VALUES[0]
    assert row0[subdivision.CUBE_POINTS.index((1, 1, 1))] == 29
    row5 = subdivision.REFERENCE_NEARBY_VALUES[5]
    assert row5[subdivision.NEARBY_POINTS.index((0, 0, -1))] == -69


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_subdivide_counts(sub_factory, d):
    sub = sub_factory(d)
    assert len(sub.cells) == d**3
    assert all(lattice.normalized_volume(c.vertices) == 1 for c in sub.cells)
    total = sum(lattice.normalized_volume(c.vertices) for c in sub.cells)
    assert total == d**3


def test_subdivide_d1_single_cell(sub_factory):
    sub = sub_factory(1)
    assert len(sub.cells) == 1
    assert sub.cells[0].vertices == ((0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0))


def test_face_sharing(sub_factory):
    for d in (2, 5):
        sub = sub_factory(d)
        for tri, ids in sub.faces.items():
            if sub.boundary_face(tri):
                assert len(ids) == 1
            else:
                assert len(ids) == 2


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_hull_path_agrees_with_pattern(sub_factory, d):
    hull = subdivide(d, method="hull")
    pat = sub_factory(d)
    assert [c.vertices for c in hull.cells] == [c.vertices for c in pat.cells]
    both = subdivide(d, method="both")
    assert len(both.cells) == d**3


def test_translation_invariance(sub_factory):
    # every translate of a cell staying inside the simplex is again a cell
    for d in (3, 5):
        sub = sub_factory(d)
        cell_set = {c.vertices for c in sub.cells}
        shifts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0), (1, -1, 0), (0, 1, -1)]
        for vs in cell_set:
            for s in shifts:
                moved = tuple(
                    (v[0] + s[0], v[1] + s[1], v[2] + s[2]) for v in vs
                )
                if all(lattice.in_delta(v, d) for v in moved):
                    assert moved in cell_set


def test_restriction_compatibility(sub_factory):
    # cells inside (1,1,1)+D_{d-4} are exactly the shifted degree-(d-4) cells
    for d in (5, 6):
        sub = sub_factory(d)
        small = sub_factory(d - 4)
        inner = {
            c.vertices
            for c in sub.cells
            if all(lattice.is_interior(v, d) for v in c.vertices)
        }
        shifted = {
            tuple((v[0] + 1, v[1] + 1, v[2] + 1) for v in c.vertices)
            for c in small.cells
        }
        assert inner == shifted


def test_supporting_certification(sub_factory):
    sub = sub_factory(3)
    for cell in sub.cells:
        verdict = check_supporting(cell.support, cell.vertices, 3)
        assert verdict.ok


def test_custom_lift_degenerate_rejected():
    # squared-norm lift puts all 8 cube corners on one supporting plane
    with pytest.raises(DegeneracyError):
        subdivide(3, lift=lambda m: m[0] ** 2 + m[1] ** 2 + m[2] ** 2)
    # affine lift: lifted points lie in a hyperplane
    with pytest.raises(DegeneracyError):
        subdivide(2, lift=lambda m: m[0] + 2 * m[1])


def test_custom_lift_table_missing_point():
    with pytest.raises(DomainError):
        subdivide(2, lift={(0, 0, 0): 0})


def test_subdivide_domain_error():
    with pytest.raises(DomainError):
        subdivide(0)
    with pytest.raises(DomainError):
        subdivide(2, lift=lambda m: lift_value(m), method="pattern")


def test_json_export_roundtrip(sub_factory):
    sub = sub_factory(2)
    blob = subdivision.subdivision_to_dict(sub)
    assert blob["schema"] == 1
    assert blob["d"] == "2"
    assert blob["cell_count"] == "8"
    text = json.dumps(blob, sort_keys=True)
    back = json.loads(text)
    assert len(back["cells"]) == 8
    # integers serialized as decimal strings
    assert all(isinstance(x, str) for x in back["cells"][0]["vertices"][0])
    assert isinstance(back["cells"][0]["support"]["b"], str)
