import numpy as np
import pytest

from qesolve import Case, Family, FamilyProblem, SolverConfig


@pytest.fixture(scope="session")
def cfg():
    return SolverConfig(seed=0, starts=80)


@pytest.fixture(scope="session")
def cfg_small():
    return SolverConfig(seed=0, starts=40)


def quartic_harmonic(n=0, ell=0, omega=1.0, c=0.0, d=0.5, **kw):
    return FamilyProblem(
        Family.QUARTIC, Case.HARMONIC, n, ell, {"omega": omega, "c": c, "d": d}, **kw
    )


def quartic_coulombic(n=0, ell=0, a=-1.0, c=0.0, d=0.5):
    return FamilyProblem(Family.QUARTIC, Case.COULOMBIC, n, ell, {"a": a, "c": c, "d": d})


def sextic(n=0, ell=0, omega=1.0, e=0.5, d=0.5, **kw):
    free = {"omega": omega, "e": e, "d": d}
    if kw.get("match_ell"):
        free.pop("omega")
    return FamilyProblem(Family.SEXTIC, Case.HARMONIC, n, ell, free, **kw)


def octic_harmonic(n=0, ell=0, omega=1.0, e=0.0, f=0.0, g=0.0, h=0.5):
    return FamilyProblem(
        Family.OCTIC, Case.HARMONIC, n, ell,
        {"omega": omega, "e": e, "f": f, "g": g, "h": h},
    )


def octic_coulombic(n=0, ell=0, a=-1.0, e=0.0, f=0.0, g=0.0, h=0.5):
    return FamilyProblem(
        Family.OCTIC, Case.COULOMBIC, n, ell,
        {"a": a, "e": e, "f": f, "g": g, "h": h},
    )


def decatic(n=0, ell=0, omega=1.0, b=0.0, c=1.0, d=0.5, **kw):
    free = {"omega": omega, "b": b, "c": c, "d": d}
    if kw.get("match_ell"):
        free.pop("omega")
    return FamilyProblem(Family.DECATIC, Case.HARMONIC, n, ell, free, **kw)


def max_abs(x) -> float:
    arr = np.asarray(x)
    return float(np.max(np.abs(arr))) if arr.size else 0.0
