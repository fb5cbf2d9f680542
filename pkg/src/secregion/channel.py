"""Channel models, confidential/common rate functionals, and gradients.

Two equivalent channel views are supported.  A :class:`GeneralChannel`
carries receiver gain matrices H1 (r1 x t), H2 (r2 x t) and the input
covariance cap S (t x t, strictly positive definite).  When H1 and H2 are
square and invertible the channel can be rewritten with identity gains
and colored noises Nk = Hk^{-1} Hk^{-T}; that :class:`AlignedChannel`
form is what the optimizer and certifier work on.

Rates are in nats throughout.  For an aligned channel and an allocation
(B0 to the common layer, B1 to confidential layer 1, with S - B0 - B1
left for confidential layer 2):

    f0(B0)      = min_k 1/2 [ logdet(S + Nk) - logdet((S - B0) + Nk) ]
    f1(B1)      = 1/2 [ logdet(B1 + N1) - logdet(N1) ]
                - 1/2 [ logdet(B1 + N2) - logdet(N2) ]
    f2(B0, B1)  = 1/2 [ logdet((S - B0) + N2) - logdet(B1 + N2) ]
                - 1/2 [ logdet((S - B0) + N1) - logdet(B1 + N1) ]

f0 is the common-message bound (nonnegative); f1 and f2 are the two
confidential-message bounds and may be negative, in which case the
corresponding message gets rate zero.  Note f2(B0, B1) - f1(B1) depends
on B0 only, which is why a single B1 maximizes both bounds at any fixed
B0 (the gradients in B1 coincide exactly).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import (
    DegenerateConstraint,
    DimMismatch,
    InfeasibleCovariance,
    InvalidChannel,
    NotAlignable,
)
from .matcore import SymMatrix

# Uniform feasibility tolerance for covariance constraints.
TOL_FEAS = 1e-9


def _require_pd(name, m: SymMatrix):
    w, _ = matcore.sym_eig(m)
    if w[0] <= matcore.TOL_PD * max(1.0, float(np.max(np.abs(w)))):
        raise InvalidChannel(f"{name} not positive definite")


@dataclass(frozen=True, eq=False)
class GeneralChannel:
    """Receiver gains H1, H2 and input covariance cap S (strictly PD)."""

    h1: np.ndarray
    h2: np.ndarray
    s: SymMatrix

    def __post_init__(self):
        h1 = np.array(self.h1, dtype=float)
        h2 = np.array(self.h2, dtype=float)
        if h1.ndim != 2 or h2.ndim != 2:
            raise InvalidChannel("H1 and H2 must be matrices")
        if not (np.isfinite(h1).all() and np.isfinite(h2).all()):
            raise InvalidChannel("H1 and H2 must have finite entries")
        t = self.s.dim
        if h1.shape[1] != t or h2.shape[1] != t:
            raise InvalidChannel(
                f"H1/H2 must have {t} columns to match S, got {h1.shape} and {h2.shape}"
            )
        if h1.shape[0] < 1 or h2.shape[0] < 1:
            raise InvalidChannel("receivers need at least one antenna")
        try:
            _require_pd("S", self.s)
        except InvalidChannel:
            raise DegenerateConstraint("S not positive definite") from None
        h1.setflags(write=False)
        h2.setflags(write=False)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)

    @property
    def t(self):
        return self.s.dim

    @property
    def r1(self):
        return self.h1.shape[0]

    @property
    def r2(self):
        return self.h2.shape[0]


@dataclass(frozen=True, eq=False)
class AlignedChannel:
    """Identity-gain channel with noise covariances N1, N2 and cap S."""

    n1: SymMatrix
    n2: SymMatrix
    s: SymMatrix

    def __post_init__(self):
        t = self.s.dim
        if self.n1.dim != t or self.n2.dim != t:
            raise InvalidChannel("N1, N2 and S must share one dimension")
        _require_pd("N1", self.n1)
        _require_pd("N2", self.n2)
        try:
            _require_pd("S", self.s)
        except InvalidChannel:
            raise DegenerateConstraint("S not positive definite") from None

    @property
    def t(self):
        return self.s.dim


@dataclass(frozen=True, eq=False)
class CovSplit:
    """Input covariance allocation (B0 common layer, B1 confidential 1)."""

    b0: SymMatrix
    b1: SymMatrix

    def __post_init__(self):
        if self.b0.dim != self.b1.dim:
            raise DimMismatch(f"B0 dim {self.b0.dim} vs B1 dim {self.b1.dim}")


@dataclass(frozen=True)
class RateTriple:
    """Nonnegative achieved rates (common, confidential 1, confidential 2)."""

    r0: float
    r1: float
    r2: float

    def __post_init__(self):
        for name, v in (("r0", self.r0), ("r1", self.r1), ("r2", self.r2)):
            if not np.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


def to_aligned(ch: GeneralChannel) -> AlignedChannel:
    """Rewrite a square invertible channel with identity gains.

    Requires r1 = r2 = t and both gain matrices invertible; the noise
    covariances become Nk = Hk^{-1} Hk^{-T} and S is unchanged.
    """
    t = ch.t
    if ch.r1 != t or ch.r2 != t:
        raise NotAlignable(
            f"channel matrices must be square (t={t}, r1={ch.r1}, r2={ch.r2})"
        )
    noises = []
    for name, h in (("H1", ch.h1), ("H2", ch.h2)):
        scale = max(1.0, float(np.max(np.abs(h)))) ** t
        det = float(np.linalg.det(h))
        if abs(det) <= 1e-10 * scale:
            raise NotAlignable(f"{name} is singular (|det| = {abs(det):.3e})")
        hinv = np.linalg.inv(h)
        noises.append(SymMatrix(hinv @ hinv.T))
    return AlignedChannel(n1=noises[0], n2=noises[1], s=ch.s)


def check_feasible(s: SymMatrix, split: CovSplit, tol: float = TOL_FEAS):
    """Raise InfeasibleCovariance unless B0, B1 >= 0 and B0 + B1 <= S."""
    if split.b0.dim != s.dim:
        raise DimMismatch(f"split dim {split.b0.dim} vs S dim {s.dim}")
    if not matcore.is_psd(split.b0, tol):
        raise InfeasibleCovariance("B0 is not positive semidefinite")
    if not matcore.is_psd(split.b1, tol):
        raise InfeasibleCovariance("B1 is not positive semidefinite")
    if not matcore.loewner_leq(split.b0 + split.b1, s, tol):
        raise InfeasibleCovariance("B0 + B1 exceeds the power cap S")


def is_feasible(s: SymMatrix, split: CovSplit, tol: float = TOL_FEAS) -> bool:
    try:
        check_feasible(s, split, tol)
    except InfeasibleCovariance:
        return False
    return True


def f0(ch: AlignedChannel, b0: SymMatrix) -> float:
    """Common-message rate bound for allocation B0 (nats, >= 0)."""
    if not matcore.is_psd(b0, TOL_FEAS):
        raise InfeasibleCovariance("B0 is not positive semidefinite")
    if not matcore.loewner_leq(b0, ch.s, TOL_FEAS):
        raise InfeasibleCovariance("B0 exceeds the power cap S")
    rem = ch.s - b0
    v1 = 0.5 * (matcore.logdet(ch.s + ch.n1) - matcore.logdet(rem + ch.n1))
    v2 = 0.5 * (matcore.logdet(ch.s + ch.n2) - matcore.logdet(rem + ch.n2))
    return max(0.0, min(v1, v2))


def f1(ch: AlignedChannel, b1: SymMatrix) -> float:
    """Confidential rate bound for message 1 (nats, may be negative)."""
    if not matcore.is_psd(b1, TOL_FEAS):
        raise InfeasibleCovariance("B1 is not positive semidefinite")
    gain1 = matcore.logdet(b1 + ch.n1) - matcore.logdet(ch.n1)
    gain2 = matcore.logdet(b1 + ch.n2) - matcore.logdet(ch.n2)
    return 0.5 * (gain1 - gain2)


def f2(ch: AlignedChannel, b0: SymMatrix, b1: SymMatrix) -> float:
    """Confidential rate bound for message 2 (nats, may be negative)."""
    check_feasible(ch.s, CovSplit(b0=b0, b1=b1))
    rem = ch.s - b0
    gain2 = matcore.logdet(rem + ch.n2) - matcore.logdet(b1 + ch.n2)
    gain1 = matcore.logdet(rem + ch.n1) - matcore.logdet(b1 + ch.n1)
    return 0.5 * (gain2 - gain1)


def rates_aligned(ch: AlignedChannel, split: CovSplit):
    """The three rate bounds (f0, f1, f2); f1/f2 are returned unclamped.

    Region membership applies max(., 0) to the confidential bounds.
    """
    check_feasible(ch.s, split)
    return (
        f0(ch, split.b0),
        f1(ch, split.b1),
        f2(ch, split.b0, split.b1),
    )


def _gram_logdet(h, x: SymMatrix):
    # logdet(I + H X H^T), formed as an explicit symmetric gram.
    g = h @ x.array @ h.T
    return matcore.logdet(SymMatrix(np.eye(h.shape[0]) + g))


def rates_general(ch: GeneralChannel, split: CovSplit):
    """Rate bounds of the general channel via grams Hk X Hk^T + I."""
    check_feasible(ch.s, split)
    rem = ch.s - split.b0
    r0 = min(
        _gram_logdet(ch.h1, ch.s) - _gram_logdet(ch.h1, rem),
        _gram_logdet(ch.h2, ch.s) - _gram_logdet(ch.h2, rem),
    )
    l1b = _gram_logdet(ch.h1, split.b1)
    l2b = _gram_logdet(ch.h2, split.b1)
    r1 = l1b - l2b
    r2 = (_gram_logdet(ch.h2, rem) - l2b) - (_gram_logdet(ch.h1, rem) - l1b)
    return (max(0.0, 0.5 * r0), 0.5 * r1, 0.5 * r2)


def grad_f1_b1(ch: AlignedChannel, b1: SymMatrix) -> SymMatrix:
    """Gradient of f1 in B1: 1/2 [ (B1+N1)^-1 - (B1+N2)^-1 ]."""
    return 0.5 * (matcore.sym_inverse(b1 + ch.n1) - matcore.sym_inverse(b1 + ch.n2))


def grad_f2_b1(ch: AlignedChannel, b1: SymMatrix) -> SymMatrix:
    """Gradient of f2 in B1; identical closed form to grad_f1_b1."""
    return grad_f1_b1(ch, b1)


def grad_f2_b0(ch: AlignedChannel, b0: SymMatrix) -> SymMatrix:
    """Gradient of f2 in B0: -1/2 [ ((S-B0)+N2)^-1 - ((S-B0)+N1)^-1 ]."""
    rem = ch.s - b0
    return -0.5 * (
        matcore.sym_inverse(rem + ch.n2) - matcore.sym_inverse(rem + ch.n1)
    )


def grad_f0_b0(ch: AlignedChannel, b0: SymMatrix, branch: int) -> SymMatrix:
    """Gradient of receiver ``branch``'s common-rate bound in B0."""
    if branch not in (1, 2):
        raise ValueError(f"branch must be 1 or 2, got {branch}")
    nk = ch.n1 if branch == 1 else ch.n2
    return 0.5 * matcore.sym_inverse((ch.s - b0) + nk)


def dpc_precoder(h1, b1: SymMatrix):
    """Interference precoder B1 H1^T (I + H1 B1 H1^T)^-1 H1 (t x t).

    This is the matrix applied to the layer-2 signal when layer 1 is
    encoded against it as known interference.
    """
    h1 = np.asarray(h1, dtype=float)
    if h1.ndim != 2 or h1.shape[1] != b1.dim:
        raise DimMismatch(
            f"H1 shape {h1.shape} incompatible with B1 dim {b1.dim}"
        )
    r1 = h1.shape[0]
    core = SymMatrix(np.eye(r1) + h1 @ b1.array @ h1.T)
    return b1.array @ h1.T @ matcore.sym_inverse(core).array @ h1
