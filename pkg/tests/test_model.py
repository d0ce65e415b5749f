from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohost.model import (
    ClockError,
    ConfigError,
    MeetingConfig,
    Participant,
    Role,
    Roster,
    RosterError,
    SpeakingLedger,
    VoiceEvent,
)

from .conftest import drive, ledger_with, make_roster


def brute_force_count(intervals, t):
    """Tick instants 1..t that fall inside some [start, end) interval."""
    return sum(1 for s in range(1, t + 1) if any(a <= s * 1000 < b for a, b in intervals))


@pytest.fixture
def ledger(roster):
    return SpeakingLedger(roster)


class TestIngestVoice:
    def test_sets_active(self, ledger):
        ledger.ingest_voice(VoiceEvent("A", True, 0))
        assert ledger.is_active("A")

    def test_duplicate_state_is_idempotent(self, ledger):
        ledger.ingest_voice(VoiceEvent("A", True, 0))
        before = (set(ledger.active), dict(ledger.last_active_end), dict(ledger.cumulative))
        ledger.ingest_voice(VoiceEvent("A", True, 5000))
        assert (set(ledger.active), dict(ledger.last_active_end), dict(ledger.cumulative)) == before

    def test_inactive_records_end(self, ledger):
        ledger.ingest_voice(VoiceEvent("A", True, 0))
        ledger.ingest_voice(VoiceEvent("A", False, 3200))
        assert not ledger.is_active("A")
        assert ledger.last_active_end["A"] == 3200

    def test_unknown_participant(self, ledger):
        with pytest.raises(RosterError):
            ledger.ingest_voice(VoiceEvent("Z", True, 0))

    def test_cohost_has_no_voice(self, ledger):
        with pytest.raises(RosterError):
            ledger.ingest_voice(VoiceEvent("cohost", True, 0))

    def test_out_of_order(self, ledger):
        ledger.ingest_voice(VoiceEvent("A", True, 2000))
        with pytest.raises(ClockError):
            ledger.ingest_voice(VoiceEvent("B", True, 1000))


class TestSampleTick:
    def test_only_active_accrue(self, ledger):
        ledger.ingest_voice(VoiceEvent("A", True, 0))
        ledger.sample_tick(1)
        assert ledger.cumulative["A"] == 1
        assert ledger.cumulative["B"] == 0

    def test_nobody_active(self, ledger):
        ledger.sample_tick(1)
        assert set(ledger.cumulative.values()) == {0}
        assert ledger.elapsed == 1

    def test_300_ticks(self, ledger):
        ivs = [(0, 300_500)]
        drive(ledger, {"A": ivs}, 300)
        assert ledger.cumulative_of("A") == brute_force_count(ivs, 300) == 300

    def test_non_consecutive(self, ledger):
        ledger.sample_tick(1)
        with pytest.raises(ClockError):
            ledger.sample_tick(3)

    def test_interval_sample_instants(self, ledger):
        # (0, 3200] spans the instants 1000, 2000, 3000
        drive(ledger, {"A": [(0, 3200)]}, 3)
        assert ledger.cumulative_of("A") == 3


class TestQueries:
    def test_fresh_ledger_is_zero(self, ledger):
        assert all(ledger.cumulative_of(p) == 0 for p in ("A", "B", "C", "H"))

    def test_unknown_cumulative(self, ledger):
        with pytest.raises(RosterError):
            ledger.cumulative_of("nobody")

    @pytest.mark.parametrize(
        "totals, expected",
        [({"A": 300, "B": 100, "C": 50}, Fraction(150)), ({"A": 0, "B": 0}, Fraction(0)), ({"A": 42}, Fraction(42))],
    )
    def test_average_nonhost_excludes_host(self, totals, expected):
        assert ledger_with(totals, host_total=900).average_nonhost() == expected

    def test_roster_without_members_is_a_config_error(self):
        with pytest.raises(ConfigError):
            Roster([Participant("H", Role.HOST)])

    def test_quiet_duration(self, ledger):
        ledger.ingest_voice(VoiceEvent("A", True, 0))
        assert ledger.quiet_duration("A", 4000) == 0
        ledger.ingest_voice(VoiceEvent("A", False, 10_000))
        assert ledger.quiet_duration("A", 16_000) == 6000
        assert ledger.quiet_duration("B", 9000) == 9000


class TestRosterAndConfig:
    def test_needs_one_host(self):
        with pytest.raises(RosterError):
            Roster([Participant("A"), Participant("B")])
        with pytest.raises(RosterError):
            Roster([Participant("A", Role.HOST), Participant("B", Role.HOST)])

    def test_cohost_added(self):
        r = make_roster()
        assert r.cohost == "cohost" and r.roles["cohost"] is Role.COHOST
        assert r.non_hosts == ("A", "B", "C")

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"scheduled_duration": 0},
            {"scheduled_duration": 60, "ratio_high": 0.9},
            {"scheduled_duration": 60, "ratio_low": 1.2},
            {"scheduled_duration": 60, "half_time_fraction": 1.0},
            {"scheduled_duration": 60, "tick": 2},
            {"scheduled_duration": 60, "mic_quiet_gate": -1},
        ],
    )
    def test_config_invariants(self, kwargs):
        with pytest.raises(ConfigError):
            MeetingConfig(**kwargs)


interval_lists = st.lists(
    st.tuples(st.integers(0, 20_000), st.integers(1, 20_000)), max_size=6
).map(lambda xs: _disjoint(xs))


def _disjoint(pairs):
    out, t = [], 0
    for gap, length in pairs:
        s = t + gap
        out.append((s, s + length))
        t = s + length
    return out


@settings(max_examples=60, deadline=None)
@given(st.fixed_dictionaries({"A": interval_lists, "B": interval_lists, "H": interval_lists}), st.integers(1, 150))
def test_replay_matches_brute_force(scripts, until):
    ledger = SpeakingLedger(make_roster(("A", "B")))
    history = {p: [] for p in scripts}
    events = sorted(
        [(s, p, True) for p, ivs in scripts.items() for s, _ in ivs]
        + [(e, p, False) for p, ivs in scripts.items() for _, e in ivs],
        key=lambda x: (x[0], x[2]),
    )
    i = 0
    for t in range(1, until + 1):
        while i < len(events) and events[i][0] <= t * 1000:
            s, p, a = events[i]
            ledger.ingest_voice(VoiceEvent(p, a, s))
            i += 1
        ledger.sample_tick(t)
        for p in scripts:
            history[p].append(ledger.cumulative[p])
            assert 0 <= ledger.cumulative[p] <= ledger.elapsed
    for p, ivs in scripts.items():
        assert ledger.cumulative[p] == brute_force_count(ivs, until)
        assert history[p] == sorted(history[p])
    assert ledger.cumulative["cohost"] == 0
    assert sum(ledger.cumulative.values()) <= 3 * until


@settings(max_examples=40, deadline=None)
@given(interval_lists, st.integers(1, 100))
def test_single_speaker_floor_sum_bounded(ivs, until):
    # split one non-overlapping schedule between two speakers: at most one talks at a time
    scripts = {"A": ivs[::2], "B": ivs[1::2]}
    ledger = drive(SpeakingLedger(make_roster(("A", "B"))), scripts, until)
    assert ledger.cumulative["A"] + ledger.cumulative["B"] <= until
