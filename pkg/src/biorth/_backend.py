import os

_FALSY = {"", "0", "false", "no", "off"}


def jit_requested():
    """True unless ``BIORTH_DISABLE_JIT`` is set to a truthy value."""
    return os.environ.get("BIORTH_DISABLE_JIT", "").strip().lower() in _FALSY


def numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def default_workers():
    """Worker cap from ``BIORTH_THREADS``; defaults to the machine's core count."""
    raw = os.environ.get("BIORTH_THREADS", "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    return os.cpu_count() or 1
