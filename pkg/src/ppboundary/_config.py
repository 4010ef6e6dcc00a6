"""Process-wide numerical defaults.

Every yes/no algebraic check falls back to :data:`settings.tol` when no
explicit tolerance is passed. Change it with :func:`set_tolerance`.
"""

from dataclasses import dataclass


@dataclass
class Settings:
    tol: float = 1e-9
    tol_cluster: float = 1e-7
    tol_periph: float = 1e-7
    # contractions whose eigenvalues exceed the unit circle by at most this
    # much are snapped back onto it
    snap: float = 1e-6


settings = Settings()


def set_tolerance(tol: float) -> None:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    settings.tol = float(tol)


def resolve_tol(tol):
    return settings.tol if tol is None else float(tol)
