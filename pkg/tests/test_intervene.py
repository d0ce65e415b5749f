import pytest

from cohost import templates
from cohost.ask import HostReason, InterventionActivation
from cohost.intervene import (
    Bar,
    ChartKind,
    InterventionKind,
    QueuedMessage,
    VisualizationSpec,
    activate,
    build_host_chart,
    build_self_vs_avg_chart,
    forward_feedback,
    gate_and_deliver,
    handle_stop,
    refresh_due,
)
from cohost.model import MeetingConfig, SpeakingLedger, VoiceEvent

from .conftest import ledger_with, make_roster

CFG = MeetingConfig(1800)


def test_activate_host_only():
    ledger = ledger_with({"A": 300, "B": 50})
    states, msgs = activate(InterventionActivation(HostReason.EXPRESSION), ledger, ["A"], "H", 600, CFG)
    assert [(s.kind, s.receiver) for s in states] == [(InterventionKind.HOST_EXPRESSION, "H")]
    assert len(msgs) == 1 and msgs[0].to == "H" and msgs[0].chart.kind is ChartKind.PER_MEMBER
    assert templates.HOST_SUGGESTIONS in msgs[0].text
    assert states[0].next_refresh_t == 840


def test_activate_both():
    ledger = ledger_with({"A": 300, "B": 50})
    states, msgs = activate(InterventionActivation(HostReason.INHIBITION, True), ledger, ["A"], "H", 600, CFG)
    assert [(s.kind, s.receiver) for s in states] == [
        (InterventionKind.HOST_INHIBITION, "H"),
        (InterventionKind.OVER_PARTICIPATOR, "A"),
    ]
    assert [m.to for m in msgs] == ["H", "A"]
    assert msgs[1].chart.kind is ChartKind.SELF_VS_AVERAGE


def test_activate_nothing():
    assert activate(InterventionActivation(), ledger_with({"A": 1}), ["A"], "H", 600, CFG) == ([], [])


def test_over_participator_skipped_without_peers():
    states, msgs = activate(InterventionActivation(HostReason.INHIBITION, True), ledger_with({"A": 1}), ["A"], "H", 9, CFG)
    assert [s.receiver for s in states] == ["H"]


class TestRefresh:
    def test_cadence(self):
        ledger = ledger_with({"A": 300, "B": 50})
        states, _ = activate(InterventionActivation(HostReason.EXPRESSION), ledger, [], "H", 600, CFG)
        times = [t for t in range(601, 1800 + 1) if refresh_due(states, ledger, t, CFG)]
        assert times == [840, 1080, 1320, 1560, 1800]

    def test_stopped_state_never_refreshes(self):
        ledger = ledger_with({"A": 300, "B": 50})
        states, _ = activate(InterventionActivation(HostReason.EXPRESSION), ledger, [], "H", 600, CFG)
        states[0].stopped = True
        assert all(not refresh_due(states, ledger, t, CFG) for t in range(601, 1801))

    def test_nothing_before_due(self):
        ledger = ledger_with({"A": 300, "B": 50})
        states, _ = activate(InterventionActivation(HostReason.EXPRESSION), ledger, [], "H", 1700, CFG)
        assert all(not refresh_due(states, ledger, t, CFG) for t in range(1701, 1801))


class TestGate:
    def _ledger(self):
        ledger = SpeakingLedger(make_roster(("A", "B")))
        return ledger

    def test_speaker_waits_until_quiet(self):
        ledger = self._ledger()
        ledger.ingest_voice(VoiceEvent("H", True, 0))
        queue = [QueuedMessage("H", "hi", "intervention", 0)]
        delivered_at = None
        for t in range(1, 40):
            if t == 20:
                ledger.ingest_voice(VoiceEvent("H", False, 20_000))
            ledger.sample_tick(t)
            if gate_and_deliver(queue, ledger, t * 1000, CFG):
                delivered_at = t
                break
        assert delivered_at == 25

    def test_silent_receiver_gets_it_at_first_check(self):
        ledger = self._ledger()
        ledger.sample_tick(1)
        ledger.elapsed = 5
        queue = [QueuedMessage("A", "hi", "intervention", 5000)]
        assert len(gate_and_deliver(queue, ledger, 5000, CFG)) == 1
        assert queue == []

    def test_fifo_per_receiver(self):
        ledger = self._ledger()
        queue = [
            QueuedMessage("A", "first", "intervention", 0),
            QueuedMessage("B", "other", "intervention", 0),
            QueuedMessage("A", "second", "refresh", 1000),
        ]
        ledger.ingest_voice(VoiceEvent("B", True, 0))
        out = gate_and_deliver(queue, ledger, 6000, CFG)
        assert [m.text for m in out] == ["first", "second"]
        assert [m.text for m in queue] == ["other"]
        assert all(m.delivered_t == 6000 for m in out)


class TestStop:
    def _setup(self):
        ledger = ledger_with({"A": 400, "B": 100, "C": 100})
        states, queue = activate(InterventionActivation(HostReason.INHIBITION, True), ledger, ["A"], "H", 600, CFG)
        return ledger, states, queue

    def test_over_participator_stops(self):
        ledger, states, queue = self._setup()
        dropped = handle_stop(states, queue, "A", "stop", 601_000)
        assert [m.to for m in dropped] == ["A"]
        assert [m.to for m in queue] == ["H"]
        assert states[1].stopped and not states[0].stopped
        assert not any(m.to == "A" for m in refresh_due(states, ledger, 840, CFG))

    def test_normalized(self):
        _, states, queue = self._setup()
        handle_stop(states, queue, "H", "Stop ", 0)
        assert states[0].stopped

    def test_no_states_is_noop(self):
        _, states, queue = self._setup()
        assert handle_stop(states, queue, "B", "stop", 0) == []
        assert len(queue) == 2 and not any(s.stopped for s in states)

    def test_other_text_is_noop(self):
        _, states, queue = self._setup()
        assert handle_stop(states, queue, "A", "please stop talking", 0) == []
        assert not states[1].stopped


class TestCharts:
    def test_host_chart_excludes_host(self):
        spec = build_host_chart(ledger_with({"A": 300, "B": 50}, host_total=900))
        assert spec.bars == (Bar("B", 50, True), Bar("A", 300, False))

    def test_equal_members(self):
        spec = build_host_chart(ledger_with({"C": 10, "A": 10, "B": 10}))
        assert [b.label for b in spec.bars] == ["A", "B", "C"]
        assert not any(b.highlight for b in spec.bars)

    def test_single_member(self):
        assert len(build_host_chart(ledger_with({"A": 7})).bars) == 1

    @pytest.mark.parametrize(
        "totals, pid, expected",
        [
            ({"A": 400, "B": 100, "C": 100}, "A", (400, 100)),
            ({"A": 100, "B": 100}, "A", (100, 100)),
            ({"A": 0, "B": 50, "C": 100}, "A", (0, 75)),
            ({"A": 10, "B": 20, "C": 30, "D": 0}, "B", (20, 40 / 3)),
        ],
    )
    def test_self_vs_average(self, totals, pid, expected):
        spec = build_self_vs_avg_chart(ledger_with(totals, host_total=1000), pid)
        assert spec.kind is ChartKind.SELF_VS_AVERAGE
        assert spec.bars[0].label == pid and spec.bars[0].highlight
        assert spec.bars[0].seconds == expected[0]
        assert spec.bars[1].seconds == pytest.approx(expected[1], abs=1e-9)

    def test_self_vs_average_needs_peers(self):
        with pytest.raises(ValueError):
            build_self_vs_avg_chart(ledger_with({"A": 5}), "A")

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            VisualizationSpec(ChartKind.PER_MEMBER, (), 0)
        with pytest.raises(ValueError):
            VisualizationSpec(ChartKind.SELF_VS_AVERAGE, (Bar("A", 1),), 0)


class TestFeedback:
    def test_one_note(self):
        msgs = forward_feedback("H", ["slow down"], 700)
        assert len(msgs) == 1 and msgs[0].to == "H" and msgs[0].kind == "feedback"
        assert msgs[0].text == templates.FEEDBACK.format(note="slow down")

    def test_none(self):
        assert forward_feedback("H", [], 700) == []

    def test_two_notes_keep_order_without_sender(self):
        msgs = forward_feedback("H", ["from C", "from B"], 700)
        assert [m.text.endswith(n) for m, n in zip(msgs, ["from C", "from B"])] == [True, True]
        assert all("C:" not in m.text and "B:" not in m.text for m in msgs)
