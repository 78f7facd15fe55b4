import numpy as np
import pytest

from spectower.spectra import (
    DenseSequence,
    Interval,
    Lattice,
    Point,
    RayDown,
    RayUp,
    SpectrumSpec,
    SpectrumSpecError,
    canonical_key,
    covering_radius,
    covering_radius_points,
    dense_enumerate,
    distance_to_set,
    parse_spectrum_spec,
    render_spectrum_spec,
)

ACCEPT_SPECS = {
    "lattice01": "lattice 0 1",
    "interval01": "interval 0 1",
    "mixed": "interval -1 1 + rayup 5",
}


def test_lattice_enumeration():
    spec = SpectrumSpec((Lattice(0.0, 1.0),))
    assert dense_enumerate(spec, 4).terms == (0.0, 1.0, 2.0, 3.0)


def test_interval_enumeration_dyadic_order():
    spec = SpectrumSpec((Interval(0.0, 1.0),))
    assert dense_enumerate(spec, 5).terms == (0.0, 1.0, 0.5, 0.25, 0.75)
    assert dense_enumerate(spec, 9).terms == (
        0.0, 1.0, 0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875,
    )


def test_round_robin_skips_exhausted_pieces():
    spec = SpectrumSpec((Interval(0.0, 1.0), Point(5.0)))
    assert dense_enumerate(spec, 4).terms == (0.0, 5.0, 1.0, 0.5)


def test_cross_piece_duplicates_dropped():
    spec = SpectrumSpec((Point(0.0), Lattice(0.0, 1.0)))
    assert dense_enumerate(spec, 4).terms == (0.0, 1.0, 2.0, 3.0)


def test_ray_enumeration_front_then_fill():
    spec = SpectrumSpec((RayUp(5.0),))
    assert dense_enumerate(spec, 8).terms == (5.0, 6.0, 5.5, 7.0, 6.5, 5.25, 8.0, 7.5)
    down = SpectrumSpec((RayDown(-2.0),))
    assert dense_enumerate(down, 5).terms == (-2.0, -3.0, -2.5, -4.0, -3.5)


def test_ray_sequence_is_unbounded():
    spec = SpectrumSpec((RayUp(0.0),))
    terms = dense_enumerate(spec, 300).terms
    # frontier integers keep appearing: diagonal s contributes integer s
    assert max(terms) >= 20


def test_prefix_stability_and_determinism():
    for text in ACCEPT_SPECS.values():
        spec = parse_spectrum_spec(text)
        short = dense_enumerate(spec, 40).terms
        long = dense_enumerate(spec, 120).terms
        assert long[:40] == short
        assert dense_enumerate(spec, 120).terms == long


@pytest.mark.parametrize("text", list(ACCEPT_SPECS.values()), ids=list(ACCEPT_SPECS))
def test_terms_distinct_and_in_set(text):
    spec = parse_spectrum_spec(text)
    seq = dense_enumerate(spec, 128)
    keys = {canonical_key(t) for t in seq.terms}
    assert len(keys) == len(seq.terms)
    for t in seq.terms:
        assert distance_to_set(spec, t) <= 1e-12 * (1.0 + abs(t))


def test_distance_examples():
    assert distance_to_set(SpectrumSpec((Interval(0.0, 1.0),)), 2.0) == 1.0
    assert distance_to_set(SpectrumSpec((Point(0.0), Point(5.0))), 3.0) == 2.0
    assert distance_to_set(SpectrumSpec((Lattice(0.0, 2.0),)), 3.5) == 0.5


def test_distance_lattice_starts_at_c():
    # no lattice points below c
    assert distance_to_set(SpectrumSpec((Lattice(0.0, 1.0),)), -2.5) == 2.5


def test_distance_vectorized_matches_scalar():
    spec = parse_spectrum_spec("interval -1 1 + rayup 5 + point 3")
    xs = np.linspace(-4, 9, 301)
    vec = distance_to_set(spec, xs)
    for x, d in zip(xs, vec):
        assert d == distance_to_set(spec, float(x))


def test_covering_radius_examples():
    spec = SpectrumSpec((Interval(0.0, 1.0),))
    first = covering_radius(DenseSequence(spec, (0.0, 1.0)), (0.0, 1.0), 1e-3)
    assert first.value == pytest.approx(0.5, abs=1e-3)
    second = covering_radius(DenseSequence(spec, (0.0, 1.0, 0.5)), (0.0, 1.0), 1e-3)
    assert second.value == pytest.approx(0.25, abs=1e-3)


def test_covering_radius_lattice_against_brute_force():
    spec = SpectrumSpec((Lattice(0.0, 1.0),))
    points = (0.0, 1.0, 2.0, 3.0)
    got = covering_radius_points(spec, points, (0.0, 10.0), 1e-3)
    assert not got.empty_window

    # independent brute force over the same grid; on [0, 10] the lattice
    # distance is just the distance to the nearest integer
    worst = 0.0
    steps = 10000
    for i in range(steps + 1):
        x = i * 10.0 / steps
        if abs(x - round(x)) <= 1e-3:
            worst = max(worst, min(abs(x - p) for p in points))
    assert got.value == pytest.approx(worst, abs=1e-9)
    assert got.value == pytest.approx(7.0, abs=1e-3)


def test_covering_radius_monotone_in_prefix_length():
    for text in ACCEPT_SPECS.values():
        spec = parse_spectrum_spec(text)
        seq = dense_enumerate(spec, 64)
        values = [
            covering_radius_points(spec, seq.terms[:n], (0.0, 1.0), 1e-3).value
            for n in (4, 8, 16, 32, 64)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_covering_radius_rejects_absurd_grid():
    spec = SpectrumSpec((Interval(0.0, 1.0),))
    with pytest.raises(ValueError, match="refusing"):
        covering_radius_points(spec, (0.0,), (0.0, 1.0), 1e-12)


def test_covering_radius_empty_window():
    spec = SpectrumSpec((Interval(0.0, 1.0),))
    out = covering_radius_points(spec, (0.0,), (6.0, 7.0), 1e-4)
    assert out.value == 0.0
    assert out.empty_window


def test_finite_set_error():
    spec = SpectrumSpec((Point(3.0),))
    with pytest.raises(SpectrumSpecError, match="finite set"):
        dense_enumerate(spec, 4)


def test_piece_validation():
    with pytest.raises(SpectrumSpecError):
        Interval(1.0, 1.0)
    with pytest.raises(SpectrumSpecError):
        Interval(2.0, 1.0)
    with pytest.raises(SpectrumSpecError):
        Lattice(0.0, 0.0)
    with pytest.raises(SpectrumSpecError):
        SpectrumSpec(())


def test_dsl_parse_and_render_round_trip():
    text = "point 3\ninterval -1 1\nrayup 5\nraydown -7\nlattice 0.5 0.25\n"
    spec = parse_spectrum_spec(text)
    assert spec.pieces == (
        Point(3.0), Interval(-1.0, 1.0), RayUp(5.0), RayDown(-7.0), Lattice(0.5, 0.25),
    )
    assert parse_spectrum_spec(render_spectrum_spec(spec)) == spec


def test_dsl_inline_separators_and_comments():
    assert parse_spectrum_spec("interval -1 1 + rayup 5") == parse_spectrum_spec(
        "# comment\ninterval -1 1\n\nrayup 5\n"
    )
    assert parse_spectrum_spec("point 1; lattice 0 2") == SpectrumSpec(
        (Point(1.0), Lattice(0.0, 2.0))
    )


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("interval 0", "takes 2 number"),
        ("wedge 1 2", "unknown kind"),
        ("point abc", "non-numeric"),
        ("", "no pieces"),
        ("interval 1 0", "a < b"),
        ("point inf", "finite"),
    ],
)
def test_dsl_errors(text, fragment):
    with pytest.raises(SpectrumSpecError, match=fragment):
        parse_spectrum_spec(text)
