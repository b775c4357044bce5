"""Concurrency utilities for fragvqe: a thread work queue and task/result dataclasses."""

import logging
import queue
import threading
import uuid
from collections.abc import Callable, Iterable
from dataclasses import dataclass

logger = logging.getLogger(__name__)


@dataclass
class Task[T]:
    """A task to be executed by a worker, with a function and unique ID."""

    fn: Callable[[], T]
    task_id: uuid.UUID


@dataclass
class Result[T]:
    """Result of a task.

    Contains the return value or the exception it raised, and the task ID.
    """

    result: T | Exception
    task_id: uuid.UUID


_STOP = None


class WorkQueue:
    """A small thread pool for independent subproblems.

    Results are posted to a result queue; callbacks run on the thread that
    calls :meth:`process_queue` (or :meth:`join`), never on a worker.
    """

    def __init__(self, max_workers: int = 4) -> None:
        """Initialize the worker pool.

        Args:
            max_workers: Number of worker threads to start.

        """
        if max_workers < 1:
            msg = f"max_workers must be at least 1, got {max_workers}"
            raise ValueError(msg)
        self.max_workers = max_workers
        self._input_queue: queue.Queue[Task | None] = queue.Queue()
        self._result_queue: queue.Queue[Result] = queue.Queue()
        self._callbacks: dict[uuid.UUID, Callable] = {}
        self._pending = 0
        self._lock = threading.Lock()
        self._threads: list[threading.Thread] = []
        self._shutdown = threading.Event()
        for _ in range(max_workers):
            t = threading.Thread(target=self._worker_loop, daemon=True)
            t.start()
            self._threads.append(t)

    def __enter__(self) -> "WorkQueue":
        """Return self for use as a context manager."""
        return self

    def __exit__(self, *exc_info: object) -> None:
        """Shut the pool down, waiting for the workers."""
        self.shutdown()

    def _worker_loop(self) -> None:
        """Worker thread loop: fetches and executes tasks until a stop sentinel arrives."""
        while True:
            task = self._input_queue.get()
            if task is _STOP:
                self._input_queue.task_done()
                return
            try:
                result = task.fn()
            except Exception as e:  # noqa: BLE001 - a failing subproblem must not kill the worker
                result = e
            self._result_queue.put(Result(result, task.task_id))
            self._input_queue.task_done()

    def submit(self, fn: Callable[[], object], callback: Callable[[object], None] | None = None) -> uuid.UUID:
        """Submit a zero-argument function to run on a worker.

        The callback, if any, is called with the return value or the raised
        exception when the result is processed.
        """
        if self._shutdown.is_set():
            msg = "WorkQueue has been shut down"
            raise RuntimeError(msg)
        task_id = uuid.uuid4()
        with self._lock:
            if callback is not None:
                self._callbacks[task_id] = callback
            self._pending += 1
        self._input_queue.put(Task(fn, task_id))
        return task_id

    def process_queue(self) -> int:
        """Process completed results and invoke their callbacks; return how many were handled."""
        handled = 0
        try:
            while True:
                result = self._result_queue.get_nowait()
                with self._lock:
                    self._pending -= 1
                    callback = self._callbacks.pop(result.task_id, None)
                if callback is not None:
                    callback(result.result)
                handled += 1
        except queue.Empty:
            pass
        return handled

    def join(self) -> None:
        """Block until every submitted task has finished and its callback has run."""
        while True:
            with self._lock:
                if self._pending == 0:
                    return
            result = self._result_queue.get()
            self._result_queue.put(result)
            self.process_queue()

    def map[T, R](self, fn: Callable[[T], R], items: Iterable[T]) -> list[R | Exception]:
        """Run fn over items on the workers; results (or exceptions) in submission order."""
        items = list(items)
        out: list[R | Exception | None] = [None] * len(items)

        def store(index: int) -> Callable[[R | Exception], None]:
            def _store(value: R | Exception) -> None:
                out[index] = value

            return _store

        for i, item in enumerate(items):
            self.submit(lambda item=item: fn(item), store(i))
        self.join()
        return out

    def shutdown(self, wait: bool = True) -> None:  # noqa: FBT001, FBT002 - wait can only be bool
        """Shut down the worker pool and drop pending tasks.

        Args:
            wait: Whether to wait for all threads to finish.

        """
        if self._shutdown.is_set():
            return
        self._shutdown.set()
        dropped = 0
        try:
            while True:
                if self._input_queue.get_nowait() is not _STOP:
                    dropped += 1
                self._input_queue.task_done()
        except queue.Empty:
            pass
        if dropped:
            logger.log(logging.WARNING, "WorkQueue shut down with %d tasks not started", dropped)
        for _ in self._threads:
            self._input_queue.put(_STOP)
        if wait:
            for t in self._threads:
                t.join()
        self._callbacks.clear()


def run_all[T](fns: list[Callable[[], T]], work_queue: WorkQueue | None = None) -> list[T | Exception]:
    """Run zero-argument functions on the queue, or inline when no queue is given.

    Exceptions are returned in place of results in both modes.
    """
    if work_queue is not None:
        return work_queue.map(lambda fn: fn(), fns)
    out: list[T | Exception] = []
    for fn in fns:
        try:
            out.append(fn())
        except Exception as e:  # noqa: BLE001 - same contract as the threaded path
            out.append(e)
    return out
