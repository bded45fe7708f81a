from fractions import Fraction

import pytest

from minorsep.config import (
    DESK,
    PROVEN,
    PROFILE_ENV,
    ConstantsProfile,
    load_profile,
    parse_profile,
    resolve_profile,
)
from minorsep.helpers import ProfileError


def test_proven_constants():
    assert PROVEN.k(2) == 80
    assert PROVEN.delta(3600, 3) == 1
    assert PROVEN.numerator(80) == 80**3
    assert PROVEN.dense_guard_threshold(2) == 400
    assert PROVEN.balance_slack(8) == Fraction(1, 80)
    assert PROVEN.repeat_cap(2) == 326


def test_desk_constants():
    assert DESK.k(5) == 8
    assert DESK.delta(3600, 5) == 10
    assert DESK.numerator(8) == 32
    assert "profile=desk" in DESK.describe(10_000, 2)


def test_scale_helpers():
    assert ConstantsProfile.bfs_radius(10_000) == 100
    assert ConstantsProfile.reweight_denominator(0) == 1


def test_parse_profile_overrides_proven():
    profile = parse_profile("# tuned\nw_init = 10\nk_per_h2 = no\n", name="tuned")
    assert profile.name == "tuned"
    assert profile.w_init == 10
    assert profile.k(3) == PROVEN.k_base
    assert profile.delta_divisor == PROVEN.delta_divisor


def test_parse_profile_with_base():
    profile = parse_profile("base=desk\nreweight_numerator=k3\n")
    assert profile.k_base == DESK.k_base
    assert profile.numerator(4) == 64


@pytest.mark.parametrize(
    "text",
    [
        "w_init",
        "speed=3",
        "w_init=fast",
        "w_init=0",
        "k_per_h2=maybe",
        "base=turbo",
    ],
)
def test_parse_profile_errors(text):
    with pytest.raises(ProfileError):
        parse_profile(text)


def test_load_profile_takes_file_name(tmp_path):
    path = tmp_path / "fast.txt"
    path.write_text("base=desk\nk_base=2\n", encoding="utf-8")
    profile = load_profile(path)
    assert profile.name == "fast"
    assert profile.k(7) == 2
    with pytest.raises(ProfileError):
        load_profile(tmp_path / "missing.txt")


def test_resolve_profile(monkeypatch, tmp_path):
    monkeypatch.delenv(PROFILE_ENV, raising=False)
    assert resolve_profile() is PROVEN
    assert resolve_profile("paper") is PROVEN
    assert resolve_profile("proven") is PROVEN
    assert PROVEN.name == "paper"
    assert resolve_profile("desk") is DESK
    assert resolve_profile(DESK) is DESK
    monkeypatch.setenv(PROFILE_ENV, "desk")
    assert resolve_profile() is DESK
    path = tmp_path / "mine.cfg"
    path.write_text("w_init=7\n", encoding="utf-8")
    assert resolve_profile(str(path)).w_init == 7
    with pytest.raises(ProfileError):
        resolve_profile("nonexistent")


def test_named_profile_is_the_base_of_a_file():
    profile = parse_profile("base=paper\nw_init=5\n")
    assert profile.k_base == PROVEN.k_base
    assert profile.w_init == 5
