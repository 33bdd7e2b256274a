"""Codec construction, validation, and per-noise-level family resolution."""

import pytest

from jscc.codecs import (
    CapacityError,
    CodecSpec,
    build_codec,
    digital_depth_for_sigma,
    resolve_for_sigma,
)


def test_every_concrete_scheme_builds():
    specs = [
        CodecSpec("repetition", n=2),
        CodecSpec("shift_map", n=3, a=2),
        CodecSpec("shift_map", n=3, b=(2, 5)),
        CodecSpec("spherical", n=2, a=3),
        CodecSpec("scheme1", n=2, alpha=3.0),
        CodecSpec("scheme2", n=4, grouping_variant="shifted"),
        CodecSpec("type1", n=2, k=3),
        CodecSpec("type2", n=2, k=3),
        CodecSpec("unbounded_wrap", n=2),
    ]
    for spec in specs:
        codec = build_codec(spec)
        assert codec.dims == spec.dims
        assert spec.scheme in codec.spec.describe()


def test_family_specs_need_resolution():
    family = CodecSpec("shift_map", n=2)
    assert family.is_family
    with pytest.raises(ValueError):
        build_codec(family)
    concrete = resolve_for_sigma(family, 1e-3)
    assert concrete.a == 33
    build_codec(concrete)


def test_digital_depth_band():
    assert digital_depth_for_sigma(2.0 ** -3) == 3
    assert digital_depth_for_sigma(0.9 * 2.0 ** -3) == 3
    assert digital_depth_for_sigma(0.3) == 1
    assert digital_depth_for_sigma(0.7) == 1  # clamp at the shallow end
    with pytest.raises(CapacityError):
        digital_depth_for_sigma(2.0 ** -25.5)


def test_type_family_resolution():
    spec = resolve_for_sigma(CodecSpec("type1", n=2), 0.04)
    assert spec.k == 4
    with pytest.raises(CapacityError):
        resolve_for_sigma(CodecSpec("type2", n=4), 2.0 ** -14)


def test_concrete_specs_pass_through():
    spec = CodecSpec("scheme1", n=2, alpha=3.0)
    assert resolve_for_sigma(spec, 0.1) is spec


def test_validation_errors():
    with pytest.raises(ValueError):
        CodecSpec("nonsense", n=2)
    with pytest.raises(ValueError):
        CodecSpec("spherical", n=2)
    with pytest.raises(ValueError):
        CodecSpec("shift_map", n=3, b=(2,))
    with pytest.raises(ValueError):
        CodecSpec("shift_map", n=2, a=1)
    with pytest.raises(ValueError):
        CodecSpec("type1", n=2, k=0)
    with pytest.raises(CapacityError):
        CodecSpec("type1", n=2, k=25, p=50)
    with pytest.raises(ValueError):
        CodecSpec("scheme2", n=1)


def test_describe_mentions_parameters():
    assert "a=33" in CodecSpec("shift_map", n=2, a=33).describe()
    assert "k=auto" in CodecSpec("type2", n=2).describe()
    assert "shifted" in CodecSpec("scheme2", n=2, grouping_variant="shifted").describe()
    assert "inner=" in CodecSpec("unbounded_wrap", n=2).describe()
