""" test_control.py -- run control, parallel map and utilities

    Language: Python 3

    + 10/18/26: Created.
"""

import hashlib
import threading
import time

import pytest

from fasc import (
    control,
    parameters,
    utils,
)


def test_parallel_map_keeps_item_order():
    def slow_square(x):
        time.sleep(0.001*(10 - x))
        return x*x

    for workers in (1, 2, 8):
        assert control.parallel_map(slow_square, range(10), workers=workers) == [x*x for x in range(10)]


def test_parallel_map_uses_threads():
    seen = set()

    def record(_):
        seen.add(threading.get_ident())
        time.sleep(0.01)

    control.parallel_map(record, range(8), workers=4)
    assert len(seen) > 1


def test_parallel_imap_draws_items_lazily():
    drawn = [0]

    def items():
        for x in range(40):
            drawn[0] += 1
            yield x

    window = 4
    for (k, value) in enumerate(control.parallel_imap(lambda x: x + 1, items(), workers=2, window=window)):
        assert value == k + 1
        assert drawn[0] - k <= window
    assert drawn[0] == 40


def test_termination_returns_exit_code(quiet_run, capsys):
    assert control.termination() == 0
    assert control.termination(control.ExitCode.kIOError, "no such file") == 3
    assert "ERROR: no such file" in capsys.readouterr().err
    assert [code.value for code in control.ExitCode] == [0, 2, 3, 4]


def test_init_prints_banner(monkeypatch, capsys):
    monkeypatch.delenv("FASC_VERBOSE", raising=False)
    control.init("cluster", workers=2, verbose=True)
    out = capsys.readouterr().out
    assert "fasc cluster" in out
    assert "Workers: 2" in out
    control.init("cluster", workers=1, verbose=False)
    assert capsys.readouterr().out == ""
    assert parameters.run.workers == 1

################################################################
# utilities
################################################################

def test_write_lines_and_digest(tmp_path):
    path = tmp_path / "lines.txt"
    utils.write_lines(str(path), ["a", "b"])
    assert path.read_bytes() == b"a\nb\n"
    assert utils.content_digest(str(path), chunk_size=1) == hashlib.sha256(b"a\nb\n").hexdigest()


def test_expand_path(monkeypatch):
    monkeypatch.setenv("FASC_DATA", "/data")
    assert utils.expand_path("$FASC_DATA/mnist/../x.csv") == "/data/x.csv"
    assert utils.expand_path(["$FASC_DATA", "/tmp/"]) == ["/data", "/tmp"]
    assert utils.expand_path(None) is None


def test_task_timer():
    timer = utils.TaskTimer()
    assert timer.last_time == 0.0
    timer.start_timer()
    with pytest.raises(RuntimeError):
        timer.start_timer()
    elapsed = timer.stop_timer()
    assert timer.timings == [elapsed]
    assert timer.last_time == timer.average_time == elapsed
    with pytest.raises(RuntimeError):
        timer.stop_timer()
