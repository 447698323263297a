"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameter, resolution, or config-file content."""


class DataCorruptionError(RuntimeError):
    """Spectral data violates a structural invariant (Hermitian symmetry, file layout)."""


class SnapshotFormatError(DataCorruptionError):
    """Snapshot file has a bad magic, version, or payload length."""


class BlowupError(RuntimeError):
    """Raised when a trajectory leaves the resolvable regime.

    Carries the simulation time and the monitor values at detection so a
    driver can emit a structured partial result instead of crashing.
    """

    def __init__(self, t, detail=""):
        super().__init__(f"blow-up detected at t={t:.6g}" + (f": {detail}" if detail else ""))
        self.t = t
        self.detail = detail
