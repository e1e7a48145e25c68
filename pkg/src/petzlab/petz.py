"""Random codes, the transpose-channel (Petz) decoder, fidelity evaluation,
and the pinching-map machinery used by the verification suite.

The decoder for a code with operator S through a channel N is
X -> S^{1/2} N*( N(S)^{-1/2} X N(S)^{-1/2} ) S^{1/2}, completed to a
trace-preserving map by routing the mass outside supp N(S) into a fixed
completion state (the normalized S by default).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import Channel
from .errors import (
    BadParameterError,
    BadProjectorError,
    DimensionMismatchError,
    EmptyCodeError,
    NotInvariantError,
    NotUnitaryError,
    NumericsError,
    RankDeficientRhoError,
)
from .entropy import exp2_collision
from .linalg import (
    as_matrix,
    hermitian_eig,
    hermitian_fn,
    hermitize,
    kernel_basis,
    support_basis,
    support_projector,
    support_rank,
)
from .qstate import (
    DensityMatrix,
    PureState,
    Subspace,
    avg_from_ent_fidelity,
    haar_projector,
    haar_state_in,
    haar_unitary,
    keyed_stream,
    max_entangled,
)

UNITARITY_ATOL = 1e-9


@dataclass(frozen=True)
class CodeSpec:
    """Random code data: input state rho, rank-m projector P, the code
    operator S = sqrt(d rho) P sqrt(d rho), and the orthonormal code basis
    w_i = S^{-1/2} sqrt(d rho) v_i over an eigenbasis {v_i} of P."""

    rho: DensityMatrix
    projector: np.ndarray
    m: int
    s: np.ndarray
    code_basis: Subspace


def build_code(rho: DensityMatrix, projector) -> CodeSpec:
    """Construct the code induced by a full-rank input state and a rank-m
    projector. The code basis spans supp S and is exactly orthonormal in
    exact arithmetic."""
    r = as_matrix(rho)
    d = r.shape[0]
    p = hermitize(projector)
    if p.shape != (d, d):
        raise DimensionMismatchError(
            f"projector shape {p.shape} != state shape {r.shape}"
        )
    if float(np.abs(p @ p - p).max()) > 1e-9:
        raise BadProjectorError("operator is not idempotent within 1e-9")
    m = int(round(float(np.trace(p).real)))
    if m < 1:
        raise EmptyCodeError("projector has rank zero")
    if support_rank(r) < d:
        raise RankDeficientRhoError(
            "input state is rank deficient; restrict to its support first"
        )
    sqrt_rt = hermitian_fn(d * r, np.sqrt)
    s = hermitize(sqrt_rt @ p @ sqrt_rt)
    if support_rank(s) != m:
        raise NumericsError(
            f"code operator rank {support_rank(s)} != projector rank {m}"
        )
    s_inv_half = hermitian_fn(s, lambda x: x ** -0.5, on_support=True)
    v = support_basis(p)
    code_basis = Subspace(s_inv_half @ sqrt_rt @ v)
    resid = float(np.abs(code_basis.projector() - support_projector(s)).max())
    if resid > 1e-8:
        raise NumericsError(f"code basis does not span supp S (residual {resid:.3e})")
    return CodeSpec(
        rho=DensityMatrix(r), projector=p, m=m, s=s, code_basis=code_basis
    )


@dataclass(frozen=True)
class PetzDecoder:
    """Transpose-channel decoder split into its trace-non-increasing base map
    and the completion that restores trace preservation."""

    base: Channel
    completion_state: DensityMatrix
    total: Channel


def petz_decoder(
    ch: Channel, code: CodeSpec, completion_state: DensityMatrix | None = None
) -> PetzDecoder:
    """Decoder for the given code through the given channel.

    The base map recovers S from N(S) exactly; the completion routes input
    mass outside supp N(S) into completion_state (normalized S by default).
    The returned total map is trace preserving.
    """
    if ch.d_in != code.s.shape[0]:
        raise DimensionMismatchError(
            f"channel input {ch.d_in} != code dimension {code.s.shape[0]}"
        )
    ns = hermitize(ch.apply_mat(code.s))
    ns_inv_half = hermitian_fn(ns, lambda x: x ** -0.5, on_support=True)
    s_half = hermitian_fn(code.s, np.sqrt)
    base_kraus = tuple(s_half @ k.conj().T @ ns_inv_half for k in ch.kraus)
    base = Channel(ch.d_out, ch.d_in, base_kraus, trace_preserving=False)

    if completion_state is None:
        tau = DensityMatrix(code.s / float(np.trace(code.s).real))
    else:
        tau = completion_state
        if tau.dim != ch.d_in:
            raise DimensionMismatchError(
                f"completion state dimension {tau.dim} != {ch.d_in}"
            )
        pi_s = support_projector(code.s)
        leak = float(np.trace(tau.mat @ (np.eye(ch.d_in) - pi_s)).real)
        if leak > 1e-9:
            raise BadParameterError(
                "completion state has support outside the code operator"
            )

    missing = kernel_basis(ns)
    completion_kraus = []
    if missing.shape[1]:
        w_t, v_t = hermitian_eig(tau.mat)
        keep = w_t > 1e-12 * max(float(w_t[0]), 1e-300)
        for t, col in zip(w_t[keep], v_t[:, keep].T):
            for j in range(missing.shape[1]):
                completion_kraus.append(
                    np.sqrt(t) * np.outer(col, missing[:, j].conj())
                )
    total = Channel(
        ch.d_out, ch.d_in, base_kraus + tuple(completion_kraus), True
    )
    return PetzDecoder(base=base, completion_state=tau, total=total)


def code_max_entangled(code_basis: Subspace) -> PureState:
    """Maximally entangled state between an m-dim reference and the code."""
    m = code_basis.dim
    vec = (code_basis.basis.T / np.sqrt(m)).reshape(-1)
    return PureState(vec)


def fidelity_to_target(
    ch: Channel, dec: Channel, input_state: PureState, target: PureState, left_dim: int
) -> float:
    """Overlap of the target with (id (x) dec . ch) applied to the input."""
    rho = input_state.density().mat
    y = ch.apply_to_second(rho, left_dim)
    z = dec.apply_to_second(y, left_dim)
    return float(np.real(target.vec.conj() @ z @ target.vec))


def ent_fidelity(ch: Channel, dec: Channel, code_space: Subspace) -> float:
    """Entanglement fidelity of the coding scheme on the given code space."""
    if ch.d_in != code_space.ambient_dim:
        raise DimensionMismatchError(
            f"channel input {ch.d_in} != ambient {code_space.ambient_dim}"
        )
    if dec.d_in != ch.d_out or dec.d_out != ch.d_in:
        raise DimensionMismatchError("decoder does not invert the channel shape")
    phi = code_max_entangled(code_space)
    return fidelity_to_target(ch, dec, phi, phi, code_space.dim)


def avg_fidelity_mc(
    ch: Channel,
    dec: Channel,
    code_space: Subspace,
    samples: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of the input-output fidelity over
    Haar-random pure states in the code space."""
    if samples < 2:
        raise BadParameterError("need at least 2 samples")
    vals = np.empty(samples)
    for i in range(samples):
        phi = haar_state_in(code_space, rng)
        out = dec.apply_mat(ch.apply_mat(np.outer(phi.vec, phi.vec.conj())))
        vals[i] = float(np.real(phi.vec.conj() @ out @ phi.vec))
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


@dataclass(frozen=True)
class CodeExperimentStats:
    """Per-sample entanglement fidelities (index order) with the best code."""

    fidelities: np.ndarray
    best_index: int
    best_code: CodeSpec

    def summary(self) -> dict:
        f = self.fidelities
        return {
            "samples": int(f.size),
            "mean": float(f.mean()),
            "min": float(f.min()),
            "max": float(f.max()),
            "q25": float(np.quantile(f, 0.25)),
            "median": float(np.quantile(f, 0.5)),
            "q75": float(np.quantile(f, 0.75)),
            "best_index": int(self.best_index),
        }


def _code_sample(
    ch: Channel, rho: DensityMatrix, m: int, seed: int, index: int
) -> tuple[float, CodeSpec]:
    rng = keyed_stream(seed, "code-sample", index)
    p = haar_projector(rho.dim, m, rng)
    code = build_code(rho, p)
    dec = petz_decoder(ch, code)
    return ent_fidelity(ch, dec.total, code.code_basis), code


def random_code_experiment(
    ch: Channel,
    rho: DensityMatrix,
    m: int,
    code_samples: int,
    seed: int,
    workers: int = 1,
) -> CodeExperimentStats:
    """Sample Haar-random rank-m codes, decode with the transpose-channel
    decoder, and collect exact entanglement fidelities.

    Results depend only on (seed, sample index), so any worker count gives
    identical output.
    """
    if code_samples < 1:
        raise BadParameterError("need at least one code sample")
    indices = range(code_samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda i: _code_sample(ch, rho, m, seed, i), indices)
            )
    else:
        results = [_code_sample(ch, rho, m, seed, i) for i in indices]
    fid = np.array([f for f, _ in results])
    fid.setflags(write=False)
    best = int(np.argmax(fid))
    return CodeExperimentStats(
        fidelities=fid, best_index=best, best_code=results[best][1]
    )


# ---------------------------------------------------------------------------
# pinching maps and their verification
# ---------------------------------------------------------------------------


def _check_unitary(u) -> np.ndarray:
    m = as_matrix(u)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotUnitaryError(f"shape {m.shape} is not square")
    defect = float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())
    if defect > UNITARITY_ATOL:
        raise NotUnitaryError(f"unitarity defect {defect:.3e}")
    return m


@dataclass(frozen=True)
class DephasingMap:
    """Pinching in the orthonormal basis u|i>; idempotent and unital."""

    u: np.ndarray

    def __post_init__(self):
        m = _check_unitary(self.u)
        m.setflags(write=False)
        object.__setattr__(self, "u", m)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def basis_vector(self, i: int) -> np.ndarray:
        return self.u[:, i]

    def clock(self) -> np.ndarray:
        """Unitary with eigenvalue exp(2 pi i j / d) on the j-th basis vector;
        averaging its conjugations over j realizes the pinching."""
        d = self.dim
        phases = np.exp(2j * np.pi * np.arange(1, d + 1) / d)
        return (self.u * phases) @ self.u.conj().T

    def pinch(self, x) -> np.ndarray:
        a = as_matrix(x)
        y = self.u.conj().T @ a @ self.u
        return (self.u * np.diagonal(y)) @ self.u.conj().T

    def pinch_first(self, x, right_dim: int) -> np.ndarray:
        """Apply the pinching to the first factor of C^d (x) C^right_dim."""
        d = self.dim
        big = np.kron(self.u.conj().T, np.eye(right_dim))
        y = big @ as_matrix(x) @ big.conj().T
        t = y.reshape(d, right_dim, d, right_dim).copy()
        mask = np.eye(d)[:, None, :, None]
        y = (t * mask).reshape(d * right_dim, d * right_dim)
        back = np.kron(self.u, np.eye(right_dim))
        return back @ y @ back.conj().T


def dephasing_map(u, x) -> np.ndarray:
    """Pinch x in the orthonormal basis given by the columns of u."""
    return DephasingMap(u).pinch(x)


def clock_invariant_state(
    dmap: DephasingMap, sigma0, right_dim: int
) -> np.ndarray:
    """Average a bipartite operator over the clock orbit on the first factor,
    producing an invariant reference state."""
    z = dmap.clock()
    d = dmap.dim
    s = as_matrix(sigma0)
    acc = np.zeros_like(s)
    for j in range(d):
        big = np.kron(np.linalg.matrix_power(z, j), np.eye(right_dim))
        acc += big @ s @ big.conj().T
    return acc / d


def weak_monotonicity_violation(lam, u, sigma) -> float:
    """Violation of the pinching weak-monotonicity bound.

    For a completely positive map applied to one half of the maximally
    entangled state, pinching the reference side costs at most a factor d in
    the exponential collision divergence against any reference state that is
    invariant under the clock conjugation on the first factor:
    exp2 D2((pinch (x) lam)(Phi) || sigma) >= exp2 D2((id (x) lam)(Phi) || sigma) / d.

    `lam` is a Channel or a bare sequence of Kraus operators. Returns the
    amount by which the inequality fails (0 when it holds).
    """
    kraus = tuple(getattr(lam, "kraus", lam))
    dmap = DephasingMap(as_matrix(u))
    d = dmap.dim
    d_b = kraus[0].shape[0]
    s = as_matrix(sigma)

    z_big = np.kron(dmap.clock(), np.eye(d_b))
    invariance = float(np.abs(z_big @ s @ z_big.conj().T - s).max())
    if invariance > 1e-8:
        raise NotInvariantError(
            f"reference state not clock invariant (defect {invariance:.3e})"
        )

    phi = max_entangled(d).density().mat
    omega = np.zeros((d * d_b, d * d_b), dtype=complex)
    eye = np.eye(d)
    for k in kraus:
        big = np.kron(eye, k)
        omega += big @ phi @ big.conj().T

    lhs = exp2_collision(dmap.pinch_first(omega, d_b), s)
    rhs = exp2_collision(omega, s) / d
    return max(0.0, rhs - lhs)


# ---------------------------------------------------------------------------
# verification drivers
# ---------------------------------------------------------------------------


def check_dephasing_identities(
    d: int,
    trials: int,
    rng: np.random.Generator,
    pinching: Callable[[np.ndarray, np.ndarray], np.ndarray] = dephasing_map,
) -> float:
    """Max residual over the pinching identities on random bases and states:
    idempotence, the clock-conjugation average, and the action on one half of
    the maximally entangled state. The pinching implementation under test can
    be swapped out, which supports negative controls."""
    worst = 0.0
    phi = max_entangled(d).density().mat
    for _ in range(trials):
        u = haar_unitary(d, rng)
        dmap = DephasingMap(u)
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        x = g @ g.conj().T
        x = x / np.trace(x).real

        once = pinching(u, x)
        worst = max(worst, float(np.abs(pinching(u, once) - once).max()))

        z = dmap.clock()
        acc = np.zeros_like(x)
        for j in range(1, d + 1):
            zj = np.linalg.matrix_power(z, j)
            acc += zj @ x @ zj.conj().T
        worst = max(worst, float(np.abs(once - acc / d).max()))

        pinched_phi = dmap.pinch_first(phi, d)
        direct = np.zeros_like(pinched_phi)
        for i in range(d):
            ui = u[:, i]
            direct += np.kron(
                np.outer(ui, ui.conj()), np.outer(ui.conj(), ui)
            )
        worst = max(worst, float(np.abs(pinched_phi - direct / d).max()))
    return worst


def check_weak_monotonicity(trials: int, rng: np.random.Generator) -> float:
    """Worst violation of the pinching weak-monotonicity bound over random
    completely positive maps, bases, and invariant reference states."""
    worst = 0.0
    dims = (2, 3, 4)
    for t in range(trials):
        d = dims[t % len(dims)]
        d_b = int(rng.integers(2, 4))
        u = haar_unitary(d, rng)
        dmap = DephasingMap(u)
        kraus = []
        for _ in range(int(rng.integers(1, 4))):
            kraus.append(
                rng.standard_normal((d_b, d)) + 1j * rng.standard_normal((d_b, d))
            )
        gram = sum(k.conj().T @ k for k in kraus)
        scale = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2).max())
        kraus = [k / np.sqrt(scale) for k in kraus]

        g = rng.standard_normal((d * d_b, d * d_b)) + 1j * rng.standard_normal(
            (d * d_b, d * d_b)
        )
        raw = g @ g.conj().T
        raw = raw / np.trace(raw).real
        sigma = clock_invariant_state(dmap, raw, d_b)
        worst = max(worst, weak_monotonicity_violation(kraus, u, sigma))
    return worst


def check_avg_ent_relation(
    trials: int, rng: np.random.Generator, mc_samples: int = 2000
) -> float:
    """Monte-Carlo consistency of the average fidelity with the value implied
    by the entanglement fidelity, beyond three standard errors."""
    from .channel import random_channel

    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        ch = random_channel(d, d, int(rng.integers(1, 4)), rng)
        ident = Channel(d, d, (np.eye(d, dtype=complex),))
        full = Subspace(np.eye(d, dtype=complex))
        f_ent = ent_fidelity(ch, ident, full)
        mean, stderr = avg_fidelity_mc(ch, ident, full, mc_samples, rng)
        predicted = avg_from_ent_fidelity(f_ent, d)
        worst = max(worst, abs(mean - predicted) - 3.0 * stderr - 1e-12)
    return max(0.0, worst)
