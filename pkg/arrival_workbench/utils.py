import time
from contextlib import contextmanager
from pathlib import Path


def exists(val):
    return val is not None


def default(val, d):
    return val if exists(val) else d


def cast_list(el):
    """fire hands over `--set 1,3` as a tuple and `--set 1` as an int"""
    if not exists(el):
        return []
    if isinstance(el, (list, tuple, range)):
        return list(el)
    if isinstance(el, str):
        return [tok.strip() for tok in el.split(",") if tok.strip()]
    return [el]


def split_evenly(count):
    """(ceil, floor) halves of a train count"""
    return (count + 1) // 2, count // 2


@contextmanager
def stopwatch():
    timer = {"elapsed": 0.0}
    start = time.perf_counter()
    try:
        yield timer
    finally:
        timer["elapsed"] = time.perf_counter() - start


@contextmanager
def open_text(file, mode="r"):
    """path or already-open text stream"""
    if hasattr(file, "read") or hasattr(file, "write"):
        yield file
        return
    path = Path(file)
    if "w" in mode:
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open(mode, newline="") as handle:
        yield handle
