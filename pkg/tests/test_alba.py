import json

import pytest

from rank2inhab.alba import (
    Config,
    Kind,
    Machine,
    MachineError,
    Transition,
    accepting_configs,
    accepts,
    accepts_in_place,
    apply_transition,
    consistent_transitions,
    load_machine,
    reachable_configs,
)


def machine(kind, delta, initial="q0"):
    return Machine.build(kind, delta, initial)


def test_left_boundary_blocks_left_moves():
    m = machine({"q": "or"}, [("q", "0", "q", "1", "L")], "q")
    assert consistent_transitions(m, Config("q", "01", 1)) == []


def test_right_boundary_blocks_right_moves():
    m = machine({"q": "or"}, [("q", "1", "q", "1", "R"), ("q", "1", "q", "0", "L")], "q")
    assert consistent_transitions(m, Config("q", "01", 2)) == [Transition("q", "1", "q", "0", "L")]


def test_single_consistent_transition():
    p = Transition("q0", "0", "q1", "1", "R")
    m = machine({"q0": "or", "q1": "accept"}, [p])
    assert consistent_transitions(m, Config("q0", "00", 1)) == [p]


def test_apply_right_move():
    p = Transition("q0", "0", "q1", "1", "R")
    assert apply_transition(Config("q0", "00", 1), p) == Config("q1", "10", 2)


def test_apply_left_move():
    p = Transition("q0", "1", "q2", "0", "L")
    assert apply_transition(Config("q0", "01", 2), p) == Config("q2", "00", 1)


def test_length_one_word_has_no_moves():
    m = machine({"q0": "or"}, [("q0", "1", "q0", "1", "R"), ("q0", "1", "q0", "1", "L")])
    assert consistent_transitions(m, Config("q0", "1", 1)) == []
    with pytest.raises(MachineError):
        apply_transition(Config("q0", "1", 1), Transition("q0", "1", "q0", "1", "R"))


def test_accept_state_with_head_at_end():
    m = machine({"q0": "accept"}, [("q0", "0", "q0", "0", "R")])
    assert accepts_in_place(m, "1")


def test_accept_state_requires_rightmost_head():
    m = machine({"q0": "accept"}, [("q0", "0", "q0", "0", "R")])
    assert not accepts_in_place(m, "10")


def test_and_state_without_moves_accepts():
    m = machine({"q0": "and"}, [("q0", "1", "q0", "1", "R")])
    assert accepts_in_place(m, "0")  # nothing is consistent reading 0
    assert accepts_in_place(m, "1")  # R is blocked on a length-1 word


def test_or_state_without_moves_rejects():
    m = machine({"q0": "or"}, [("q0", "1", "q0", "1", "R")])
    assert not accepts_in_place(m, "0")


def test_cycles_do_not_accept():
    # or-state bouncing between two cells forever
    m = machine({"q0": "or"}, [("q0", "0", "q0", "0", "R"), ("q0", "0", "q0", "0", "L")])
    assert not accepts_in_place(m, "00")
    assert len(reachable_configs(m, Config("q0", "00", 1))) == 2


def test_and_needs_every_branch():
    delta = [("q0", "0", "q1", "0", "R"), ("q0", "0", "q2", "1", "R")]
    m = machine({"q0": "and", "q1": "accept", "q2": "or"}, delta)
    assert not accepts_in_place(m, "00")
    m = machine({"q0": "and", "q1": "accept", "q2": "accept"}, delta)
    assert accepts_in_place(m, "00")
    m = machine({"q0": "or", "q1": "accept", "q2": "or"}, delta)
    assert accepts_in_place(m, "00")


def test_or_accepts_after_walking_right():
    m = machine({"q0": "or", "q1": "accept"}, [("q0", "1", "q1", "0", "R")])
    assert accepts_in_place(m, "10")
    assert not accepts_in_place(m, "01")


def test_fixpoint_marks_only_accepting():
    m = machine({"q0": "or", "q1": "accept"}, [("q0", "0", "q0", "1", "R"), ("q0", "1", "q1", "1", "R")])
    start = Config("q0", "001", 1)
    marked = accepting_configs(m, start)
    assert marked <= set(reachable_configs(m, start))
    assert not accepts(m, start)  # rewrites 0s to 1s and gets stuck on cell 3
    assert accepts(m, Config("q0", "010", 2))


def test_reachable_configs_stay_on_tape():
    m = machine({"q0": "or"}, [("q0", s, "q0", w, d) for s in "01" for w in "01" for d in "LR"])
    succ = reachable_configs(m, Config("q0", "010", 1))
    assert all(1 <= c.head <= 3 for c in succ)
    assert len(succ) == 3 * 8


@pytest.mark.parametrize(
    "data",
    [
        {"states": ["q0"], "initial": "q1", "kind": {"q0": "or"}, "delta": [["q0", "0", "q0", "0", "R"]]},
        {"states": ["q0"], "initial": "q0", "kind": {"q0": "or"}, "delta": []},
        {"states": ["q0"], "initial": "q0", "kind": {"q0": "or"}, "delta": [["q0", "0", "q0", "0", "U"]]},
        {"states": ["q0"], "initial": "q0", "kind": {"q0": "or"}, "delta": [["q0", "2", "q0", "0", "R"]]},
        {"states": ["q0"], "initial": "q0", "kind": {"q0": "maybe"}, "delta": [["q0", "0", "q0", "0", "R"]]},
        {"states": ["q0"], "initial": "q0", "kind": {}, "delta": [["q0", "0", "q0", "0", "R"]]},
        {"states": ["q0"], "initial": "q0", "kind": {"q0": "or"}, "delta": [["q0", "0", "q9", "0", "R"]]},
        {"states": ["q0"], "initial": "q0", "kind": {"q0": "or"}, "delta": [["q0", "0", "q0"]]},
        {"states": ["q0"], "kind": {"q0": "or"}, "delta": []},
    ],
)
def test_invalid_machines(data):
    with pytest.raises(MachineError):
        Machine.from_json(data)


def test_json_round_trip(tmp_path):
    m = machine({"q0": "or", "q1": "accept"}, [("q0", "1", "q1", "0", "R")])
    path = tmp_path / "m.json"
    path.write_text(json.dumps(m.to_json()))
    loaded = load_machine(path)
    assert loaded == m
    assert loaded.kind["q1"] is Kind.ACCEPT


def test_empty_word_rejected():
    m = machine({"q0": "accept"}, [("q0", "0", "q0", "0", "R")])
    with pytest.raises(MachineError):
        accepts_in_place(m, "")
