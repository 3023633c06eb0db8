"""Modal analysis: mode sets, participation factors and interconnection modes.

The interconnection mode of a multi-area system is found by comparing the
spectrum of the connected system (CIS) with that of the same system with
its tie-lines removed (DIS): oscillatory CIS modes that find no partner in
the DIS spectrum are the ones created by the interconnection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigensolver import eig
from .errors import AmbiguousMatch, DefectiveMode, DimensionMismatch

ZERO_TOL = 1e-6
THRESHOLD = 0.1
AMBIGUITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Eigenvalues [1/s] with right eigenvectors (columns of ``right``) and
    left eigenvectors (rows of ``left``).

    ``left @ right`` is the identity on the non-defective modes.  Members of
    a defective eigenvalue cluster carry repeated eigenvectors and are
    flagged in ``defective``.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    labels: tuple
    defective: np.ndarray
    a_norm: float
    residual: float
    biorthogonality: float

    def __len__(self):
        return len(self.eigenvalues)

    def nearest(self, value) -> int:
        """Index of the eigenvalue closest to ``value``.

        A real ``value`` is read as a frequency in rad/s and matched against
        the upper-half-plane eigenvalues.
        """
        if isinstance(value, (int, np.integer)):
            return int(value)
        if not np.iscomplexobj(value) and np.isreal(value):
            upper = np.where(self.eigenvalues.imag >= 0, np.abs(self.eigenvalues.imag - value), np.inf)
            return int(np.argmin(upper))
        return int(np.argmin(np.abs(self.eigenvalues - value)))


def _sort_key(lam):
    return np.lexsort((lam.real, -lam.imag, np.round(np.abs(lam.imag), 12)))


def eigen_decompose(A, labels=None, **kwargs) -> ModeSet:
    """Full eigendecomposition of a real square matrix.

    Modes are ordered by frequency ``|Im|``; within a conjugate pair the
    upper-half-plane member comes first.  Extra keyword arguments go to
    :func:`interarea.eigensolver.eig`.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if labels is None:
        labels = tuple(f"x{i}" for i in range(n))
    labels = tuple(str(s) for s in labels)
    if len(labels) != n:
        raise DimensionMismatch(f"{len(labels)} labels for a {n}x{n} matrix")
    es = eig(A, **kwargs)
    order = _sort_key(es.values)
    lam = es.values[order]
    R = es.right[:, order]
    L = es.left[order, :]
    defective = es.defective[order]

    a_norm = float(np.abs(A).sum(axis=1).max(initial=0.0))
    residual = 0.0
    if n:
        residual = float(max(np.abs(A @ R - R * lam).max(), np.abs(L @ A - lam[:, None] * L).max()))
    ok = ~defective
    bi = float(np.abs((L @ R)[np.ix_(ok, ok)] - np.eye(ok.sum())).max(initial=0.0))
    return ModeSet(lam, R, L, labels, defective, a_norm, residual, bi)


@dataclass(frozen=True)
class OscillatoryPair:
    upper: int
    lower: int
    eigenvalue: complex
    damped: bool

    @property
    def frequency(self):
        """Angular frequency [rad/s]."""
        return abs(self.eigenvalue.imag)

    @property
    def damping_ratio(self):
        return -self.eigenvalue.real / abs(self.eigenvalue)


@dataclass(frozen=True)
class ModeClassification:
    zero: tuple
    oscillatory: tuple
    aperiodic: tuple
    tolerance: float

    @property
    def frequencies(self):
        return [p.frequency for p in self.oscillatory]


def classify_modes(modes: ModeSet, zero_tol: float = ZERO_TOL) -> ModeClassification:
    """Split modes into zero modes, oscillatory conjugate pairs and real non-zero modes.

    A mode is zero when ``|lambda| < zero_tol * ||A||_inf``.
    """
    tol = zero_tol * modes.a_norm
    lam = modes.eigenvalues
    zero = [i for i in range(len(lam)) if abs(lam[i]) < tol or modes.a_norm == 0.0]
    rest = [i for i in range(len(lam)) if i not in zero]
    aperiodic = [i for i in rest if abs(lam[i].imag) <= tol]
    upper = [i for i in rest if lam[i].imag > tol]
    lower = {i for i in rest if lam[i].imag < -tol}
    pairs = []
    for i in upper:
        j = min(lower, key=lambda k: abs(lam[k] - np.conj(lam[i])))
        lower.discard(j)
        pairs.append(OscillatoryPair(i, j, complex(lam[i]), bool(lam[i].real < -tol)))
    pairs.sort(key=lambda p: p.frequency)
    return ModeClassification(tuple(zero), tuple(pairs), tuple(aperiodic), tol)


@dataclass(frozen=True, eq=False)
class ParticipationMatrix:
    """``values[k, i]``: normalized participation of state ``k`` in mode ``i``.

    Columns of defective modes are NaN and listed in ``omitted``.
    """

    values: np.ndarray
    labels: tuple
    eigenvalues: np.ndarray
    omitted: tuple = field(default=())

    def column(self, mode) -> np.ndarray:
        return self.values[:, mode]


def participation_factors(modes: ModeSet, strict: bool = False) -> ParticipationMatrix:
    """Participation ``|phi_ki psi_ik|`` normalized to unit sum per mode.

    Defective modes have no well-defined participation; their columns are
    left as NaN (or :class:`DefectiveMode` is raised when ``strict``).
    """
    if strict and modes.defective.any():
        bad = modes.eigenvalues[modes.defective]
        raise DefectiveMode(f"defective eigenvalue(s) {np.unique(np.round(bad, 12))}")
    prod = np.abs(modes.right * modes.left.T)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = prod / prod.sum(axis=0)
    p[:, modes.defective] = np.nan
    omitted = tuple(int(i) for i in np.flatnonzero(modes.defective))
    return ParticipationMatrix(p, modes.labels, modes.eigenvalues, omitted)


def dominant_states(p: ParticipationMatrix, mode, threshold: float = THRESHOLD) -> list[str]:
    """State labels with participation at least ``threshold`` in ``mode``, largest first.

    ``mode`` is a column index, an eigenvalue (complex) or a frequency in
    rad/s (real), the last two resolved to the nearest mode.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    if isinstance(mode, (int, np.integer)):
        i = int(mode)
    elif np.iscomplexobj(mode):
        i = int(np.argmin(np.abs(p.eigenvalues - mode)))
    else:
        i = int(np.argmin(np.where(p.eigenvalues.imag >= 0, np.abs(p.eigenvalues.imag - mode), np.inf)))
    col = p.values[:, i]
    if np.isnan(col).any():
        return []
    # tiny slack so exact ties with the threshold survive rounding
    keep = np.flatnonzero(col >= threshold - 1e-12)
    keep = keep[np.argsort(-col[keep], kind="stable")]
    return [p.labels[k] for k in keep]


@dataclass(frozen=True, eq=False)
class ModeMatch:
    """Pairing of CIS and DIS oscillatory modes (upper-half-plane representatives)."""

    pairs: tuple
    interconnection: tuple
    unmatched_dis: tuple
    cis_zero_count: int
    dis_zero_count: int
    cis: ModeSet
    dis: ModeSet

    @property
    def interconnection_eigenvalues(self):
        return [complex(self.cis.eigenvalues[i]) for i in self.interconnection]

    @property
    def interconnection_frequencies(self):
        return sorted(abs(self.cis.eigenvalues[i].imag) for i in self.interconnection)


def identify_interconnection_mode(cis: ModeSet, dis: ModeSet, zero_tol: float = ZERO_TOL) -> ModeMatch:
    """Pair CIS with DIS oscillatory modes greedily by eigenvalue distance.

    CIS pairs left without a DIS partner are the interconnection modes.
    Raises :class:`AmbiguousMatch` when two competing pairings lie within
    ``1e-6`` of each other and would lead to different partners.
    """
    if len(cis) != len(dis):
        raise DimensionMismatch(f"CIS has {len(cis)} modes, DIS has {len(dis)}")
    c_cls = classify_modes(cis, zero_tol)
    d_cls = classify_modes(dis, zero_tol)
    c_idx = [p.upper for p in c_cls.oscillatory]
    d_idx = [p.upper for p in d_cls.oscillatory]
    lc = cis.eigenvalues
    ld = dis.eigenvalues

    candidates = sorted(
        (abs(lc[i] - ld[j]), i, j) for i in c_idx for j in d_idx
    )
    used_c, used_d, pairs = set(), set(), []
    for dist, i, j in candidates:
        if i in used_c or j in used_d:
            continue
        for d2, i2, j2 in candidates:
            if d2 - dist > AMBIGUITY_TOL:
                break
            if (i2, j2) == (i, j) or i2 in used_c or j2 in used_d:
                continue
            if i2 == i and abs(ld[j2] - ld[j]) > AMBIGUITY_TOL:
                raise AmbiguousMatch(f"CIS mode {lc[i]:.6g} is equally close to DIS modes {ld[j]:.6g} and {ld[j2]:.6g}")
            if j2 == j and abs(lc[i2] - lc[i]) > AMBIGUITY_TOL:
                raise AmbiguousMatch(f"DIS mode {ld[j]:.6g} is equally close to CIS modes {lc[i]:.6g} and {lc[i2]:.6g}")
        used_c.add(i)
        used_d.add(j)
        pairs.append((i, j, float(dist)))

    inter = tuple(sorted((i for i in c_idx if i not in used_c), key=lambda i: abs(lc[i].imag)))
    unmatched = tuple(j for j in d_idx if j not in used_d)
    return ModeMatch(tuple(pairs), inter, unmatched, len(c_cls.zero), len(d_cls.zero), cis, dis)
