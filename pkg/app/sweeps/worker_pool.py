import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from app.config import settings
from app.utils.logging import get_logger
from app.utils.metrics import active_sweep_workers

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """Thread pool that evaluates grid chunks and returns results in submission order."""

    def __init__(self, worker_count: Optional[int] = None):
        self.worker_count = worker_count or settings.worker_count
        self.executor: Optional[ThreadPoolExecutor] = None
        self.in_flight = 0
        self.lock = threading.Lock()

    def __enter__(self) -> "WorkerPool":
        if self.worker_count > 1:
            self.executor = ThreadPoolExecutor(max_workers=self.worker_count)
            logger.debug("worker_pool_started", worker_count=self.worker_count)
        return self

    def __exit__(self, exc_type, exc, tb):
        self.shutdown()

    def map(self, fn: Callable[[T], R], chunks: Iterable[T]) -> List[R]:
        """Apply ``fn`` to every chunk; the first exception raised by a chunk propagates."""
        if self.executor is None:
            return [self._run(fn, chunk) for chunk in chunks]
        futures = [self.executor.submit(self._run, fn, chunk) for chunk in chunks]
        return [future.result() for future in futures]

    def _run(self, fn: Callable[[T], R], chunk: T) -> R:
        with self.lock:
            self.in_flight += 1
            active_sweep_workers.set(self.in_flight)
        try:
            return fn(chunk)
        finally:
            with self.lock:
                self.in_flight -= 1
                active_sweep_workers.set(self.in_flight)

    def shutdown(self):
        if self.executor is not None:
            self.executor.shutdown(wait=True)
            self.executor = None
            logger.debug("worker_pool_shutdown_complete")
