# ruff: noqa: D100,D101,D102,D103,D107,S101,PLR2004,SLF001
import threading

import pytest

from fragvqe.concurrency import WorkQueue, run_all


def fail() -> int:
    msg = "boom"
    raise ValueError(msg)


class TestWorkQueue:
    def test_rejects_zero_workers(self) -> None:
        with pytest.raises(ValueError, match="max_workers"):
            WorkQueue(0)

    def test_map_keeps_order(self) -> None:
        with WorkQueue(4) as wq:
            assert wq.map(lambda x: x * x, range(20)) == [x * x for x in range(20)]

    def test_map_returns_exceptions_in_place(self) -> None:
        with WorkQueue(2) as wq:
            results = wq.map(lambda x: 1 // x, [1, 0, 2])
        assert results[0] == 1
        assert isinstance(results[1], ZeroDivisionError)
        assert results[2] == 0

    def test_callbacks_run_on_the_processing_thread(self) -> None:
        seen: list[tuple[int, str]] = []
        with WorkQueue(2) as wq:
            for i in range(5):
                wq.submit(lambda i=i: i, lambda value: seen.append((value, threading.current_thread().name)))
            wq.join()
        assert sorted(value for value, _ in seen) == [0, 1, 2, 3, 4]
        assert {name for _, name in seen} == {threading.current_thread().name}

    def test_process_queue_counts_results(self) -> None:
        done = threading.Event()
        wq = WorkQueue(1)
        try:
            wq.submit(done.set)
            done.wait(timeout=5)
            wq.join()
            assert wq.process_queue() == 0
        finally:
            wq.shutdown()

    def test_submit_after_shutdown(self) -> None:
        wq = WorkQueue(1)
        wq.shutdown()
        wq.shutdown()
        with pytest.raises(RuntimeError, match="shut down"):
            wq.submit(lambda: 1)


class TestRunAll:
    def test_inline(self) -> None:
        results = run_all([lambda: 1, fail, lambda: 3])
        assert results[0] == 1
        assert isinstance(results[1], ValueError)
        assert results[2] == 3

    def test_on_work_queue(self) -> None:
        with WorkQueue(3) as wq:
            results = run_all([lambda: 1, fail, lambda: 3], wq)
        assert results[0] == 1
        assert isinstance(results[1], ValueError)
        assert results[2] == 3
