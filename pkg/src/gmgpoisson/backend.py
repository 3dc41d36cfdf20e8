"""Execution engines and the memory-space boundary between them.

Two engines run the same slab kernels. The host engine makes one call over
the whole index range. The accelerator engine splits the slowest axis into
contiguous slabs and runs them on a thread pool, blocking until all slabs
finish. Every kernel updates each output point independently of the others
in the same launch, so both engines produce bit-identical results for any
worker count.

Fields carry a ``space`` tag. Kernels refuse operands that live in the other
space; moving data requires an explicit :func:`copy_across`, which is where
transfer bytes and communication time are accounted.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .grid import DEVICE, HOST, GridField


class OperandNotResident(RuntimeError):
    """A kernel operand lives in a different memory space than the engine."""


@dataclass
class TransferLog:
    bytes_to_host: int = 0
    bytes_to_device: int = 0
    copies: int = 0
    noop_copies: int = 0
    seconds: float = 0.0

    @property
    def total_bytes(self) -> int:
        return self.bytes_to_host + self.bytes_to_device


@dataclass(frozen=True)
class MemorySpace:
    tag: str


@dataclass(eq=False)
class Engine:
    """Runs slab kernels over the interior range of the slowest axis.

    A kernel is a callable ``fn(lo, hi)`` that handles every output point whose
    last index lies in ``[lo, hi)``. ``workers > 1`` only makes sense for the
    accelerator engine.
    """

    name: str
    space: MemorySpace
    workers: int = 1
    launches: Counter = field(default_factory=Counter)
    _pool: ThreadPoolExecutor | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def require(self, *fields: GridField) -> None:
        for fld in fields:
            if fld.space != self.space.tag:
                raise OperandNotResident(
                    f"{fld.name or 'field'} on level {fld.grid.level} lives in "
                    f"{fld.space!r}, engine {self.name!r} runs in {self.space.tag!r}"
                )

    def claim(self, fld: GridField) -> None:
        """Take ownership of a write-only operand; its old contents are dead, so nothing moves."""
        fld.space = self.space.tag

    def run(self, kernel: str, fn: Callable[[int, int], None], lo: int, hi: int) -> None:
        self.launches[kernel] += 1
        if hi <= lo:
            return
        nslabs = min(self.workers, hi - lo)
        if nslabs == 1:
            fn(lo, hi)
            return
        bounds = [lo + (hi - lo) * k // nslabs for k in range(nslabs + 1)]
        pool = self._executor()
        futures = [pool.submit(fn, a, b) for a, b in zip(bounds[:-1], bounds[1:])]
        for fut in futures:
            fut.result()

    def map(self, fn: Callable[[int], object], count: int) -> list:
        """Evaluate ``fn(k)`` for ``k < count`` across workers, results in order."""
        if self.workers == 1 or count == 1:
            return [fn(k) for k in range(count)]
        return list(self._executor().map(fn, range(count)))

    def _executor(self) -> ThreadPoolExecutor:
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix=self.name)
        return self._pool

    def shutdown(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None


def host_engine() -> Engine:
    return Engine("host", MemorySpace(HOST))


def accelerator_engine(workers: int = 1) -> Engine:
    return Engine("accelerator", MemorySpace(DEVICE), workers=workers)


HOST_ENGINE = host_engine()


def copy_across(fld: GridField, direction: str, log: TransferLog | None = None) -> int:
    """Move ``fld`` to the other memory space and return the bytes moved.

    ``direction`` is ``"to_host"`` or ``"to_device"``. A field already in the
    destination is left alone, counted as a no-op copy, and reports 0 bytes.
    """
    if direction == "to_host":
        dest = HOST
    elif direction == "to_device":
        dest = DEVICE
    else:
        raise ValueError(f"direction must be 'to_host' or 'to_device', got {direction!r}")
    if fld.space == dest:
        if log is not None:
            log.noop_copies += 1
        return 0
    t0 = time.perf_counter()
    fld.values = fld.values.copy(order="F")
    fld.space = dest
    nbytes = fld.grid.nbytes
    if log is not None:
        log.seconds += time.perf_counter() - t0
        log.copies += 1
        if dest == HOST:
            log.bytes_to_host += nbytes
        else:
            log.bytes_to_device += nbytes
    return nbytes
