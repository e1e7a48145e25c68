"""Completely positive maps in Kraus form.

Construction of the standard channel zoo (erasure, qubit dephasing,
depolarizing, identity), Stinespring dilations, complementary channels,
Choi operators, adjoints, tensor powers, and loading from JSON files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadParameterError,
    DimensionMismatchError,
    NotTracePreservingError,
)
from .linalg import as_matrix
from .qstate import DensityMatrix

CPTP_ATOL = 1e-9
# tensor powers are materialized explicitly only up to this total dimension
TENSOR_DIM_LIMIT = 256


@dataclass(frozen=True)
class Channel:
    """Quantum channel with Kraus operators of shape (d_out, d_in).

    trace_preserving=False marks the trace-non-increasing variant used for
    intermediate maps (sum of K† K at most the identity).
    """

    d_in: int
    d_out: int
    kraus: tuple[np.ndarray, ...]
    trace_preserving: bool = True

    def __post_init__(self):
        if self.d_in < 1 or self.d_out < 1:
            raise BadParameterError("channel dimensions must be positive")
        ops = []
        for k in self.kraus:
            k = np.asarray(k, dtype=complex)
            if k.shape != (self.d_out, self.d_in):
                raise DimensionMismatchError(
                    f"Kraus shape {k.shape} != ({self.d_out}, {self.d_in})"
                )
            k.setflags(write=False)
            ops.append(k)
        if not ops:
            raise BadParameterError("channel needs at least one Kraus operator")
        gram = sum(k.conj().T @ k for k in ops)
        if self.trace_preserving:
            defect = float(np.abs(gram - np.eye(self.d_in)).max())
            if defect > CPTP_ATOL:
                raise NotTracePreservingError(
                    f"sum of K†K deviates from identity by {defect:.3e}"
                )
        else:
            top = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2).max())
            if top > 1.0 + CPTP_ATOL:
                raise NotTracePreservingError(
                    f"trace-non-increasing map has K†K sum with eigenvalue {top!r}"
                )
        object.__setattr__(self, "kraus", tuple(ops))

    def apply_mat(self, x) -> np.ndarray:
        """Apply the channel to an arbitrary operator."""
        a = as_matrix(x)
        if a.shape != (self.d_in, self.d_in):
            raise DimensionMismatchError(
                f"operator shape {a.shape} != ({self.d_in}, {self.d_in})"
            )
        out = np.zeros((self.d_out, self.d_out), dtype=complex)
        for k in self.kraus:
            out += k @ a @ k.conj().T
        return out

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """Apply the channel to a state; requires a trace-preserving map."""
        return DensityMatrix(self.apply_mat(rho))

    def adjoint_apply(self, y) -> np.ndarray:
        """Heisenberg-picture adjoint: sum of K† Y K."""
        a = as_matrix(y)
        if a.shape != (self.d_out, self.d_out):
            raise DimensionMismatchError(
                f"operator shape {a.shape} != ({self.d_out}, {self.d_out})"
            )
        out = np.zeros((self.d_in, self.d_in), dtype=complex)
        for k in self.kraus:
            out += k.conj().T @ a @ k
        return out

    def apply_to_second(self, x, left_dim: int) -> np.ndarray:
        """Apply id (x) channel to an operator on C^left_dim (x) C^d_in."""
        a = as_matrix(x)
        n = left_dim * self.d_in
        if a.shape != (n, n):
            raise DimensionMismatchError(
                f"operator shape {a.shape} != ({n}, {n})"
            )
        eye = np.eye(left_dim)
        out = np.zeros(
            (left_dim * self.d_out, left_dim * self.d_out), dtype=complex
        )
        for k in self.kraus:
            big = np.kron(eye, k)
            out += big @ a @ big.conj().T
        return out

    def stinespring(self) -> np.ndarray:
        """Isometry V = sum_k K_k (x) |k>_E from C^d_in to C^d_out (x) C^d_E.

        The environment dimension equals the number of Kraus operators; the
        output factor comes first.
        """
        d_e = len(self.kraus)
        v = np.zeros((self.d_out * d_e, self.d_in), dtype=complex)
        for e, k in enumerate(self.kraus):
            for o in range(self.d_out):
                v[o * d_e + e, :] = k[o, :]
        return v

    def complementary(self) -> "Channel":
        """Channel to the environment of the Stinespring dilation."""
        d_e = len(self.kraus)
        comp = []
        for j in range(self.d_out):
            c = np.zeros((d_e, self.d_in), dtype=complex)
            for e, k in enumerate(self.kraus):
                c[e, :] = k[j, :]
            comp.append(c)
        return Channel(self.d_in, d_e, tuple(comp), self.trace_preserving)

    def choi(self) -> np.ndarray:
        """Choi operator (id (x) channel) applied to the maximally entangled
        state, normalized to unit trace for a trace-preserving map."""
        d = self.d_in
        out = np.zeros((d * self.d_out, d * self.d_out), dtype=complex)
        basis = np.eye(d, dtype=complex)
        for i in range(d):
            for j in range(d):
                block = self.apply_mat(np.outer(basis[i], basis[j].conj()))
                out[
                    i * self.d_out : (i + 1) * self.d_out,
                    j * self.d_out : (j + 1) * self.d_out,
                ] = block
        return out / d

    def tensor(self, other: "Channel") -> "Channel":
        """Tensor product channel, materialized explicitly."""
        d_in = self.d_in * other.d_in
        d_out = self.d_out * other.d_out
        if max(d_in, d_out) > TENSOR_DIM_LIMIT:
            raise BadParameterError(
                f"tensor product dimension {max(d_in, d_out)} exceeds the "
                f"supported limit {TENSOR_DIM_LIMIT}"
            )
        kraus = tuple(
            np.kron(a, b) for a in self.kraus for b in other.kraus
        )
        return Channel(
            d_in, d_out, kraus, self.trace_preserving and other.trace_preserving
        )

    def power(self, n: int) -> "Channel":
        """n-fold tensor power."""
        if n < 1:
            raise BadParameterError(f"tensor power {n} must be at least 1")
        out = self
        for _ in range(n - 1):
            out = out.tensor(self)
        return out


def kraus_from_choi(choi: np.ndarray, d_in: int, d_out: int) -> list[np.ndarray]:
    """Recover a Kraus representation from a unit-trace Choi operator."""
    t = as_matrix(choi) * d_in
    w, v = np.linalg.eigh((t + t.conj().T) / 2)
    ops = []
    for lam, col in zip(w, v.T):
        if lam > 1e-12 * max(float(w.max()), 1e-300):
            ops.append(np.sqrt(lam) * col.reshape(d_in, d_out).T)
    return ops


def make_channel(name: str, *params: float) -> Channel:
    """Construct a named channel.

    Supported: identity(d), erasure(p[, d]), dephasing(p) on qubits, and
    depolarizing(p[, d]).
    """
    if name == "identity":
        if len(params) != 1:
            raise BadParameterError("identity takes one parameter: the dimension")
        d = int(params[0])
        if d < 1 or d != params[0]:
            raise BadParameterError(f"identity dimension {params[0]!r} invalid")
        return Channel(d, d, (np.eye(d, dtype=complex),))

    if name == "erasure":
        if len(params) not in (1, 2):
            raise BadParameterError("erasure takes p and optionally the dimension")
        p = float(params[0])
        d = int(params[1]) if len(params) == 2 else 2
        if not 0.0 <= p <= 1.0:
            raise BadParameterError(f"erasure probability {p!r} outside [0, 1]")
        if d < 1:
            raise BadParameterError(f"erasure dimension {d} invalid")
        embed = np.zeros((d + 1, d), dtype=complex)
        embed[:d, :] = np.eye(d)
        kraus = [np.sqrt(1.0 - p) * embed]
        for i in range(d):
            k = np.zeros((d + 1, d), dtype=complex)
            k[d, i] = np.sqrt(p)
            kraus.append(k)
        return Channel(d, d + 1, tuple(kraus))

    if name == "dephasing":
        if len(params) != 1:
            raise BadParameterError("dephasing takes one parameter: p")
        p = float(params[0])
        if not 0.0 <= p <= 1.0:
            raise BadParameterError(f"dephasing probability {p!r} outside [0, 1]")
        z = np.diag([1.0, -1.0]).astype(complex)
        return Channel(
            2, 2, (np.sqrt(1.0 - p) * np.eye(2, dtype=complex), np.sqrt(p) * z)
        )

    if name == "depolarizing":
        if len(params) not in (1, 2):
            raise BadParameterError(
                "depolarizing takes p and optionally the dimension"
            )
        p = float(params[0])
        d = int(params[1]) if len(params) == 2 else 2
        if not 0.0 <= p <= 1.0:
            raise BadParameterError(f"depolarizing probability {p!r} outside [0, 1]")
        kraus = [np.sqrt(1.0 - p) * np.eye(d, dtype=complex)]
        for i in range(d):
            for j in range(d):
                k = np.zeros((d, d), dtype=complex)
                k[i, j] = np.sqrt(p / d)
                kraus.append(k)
        return Channel(d, d, tuple(kraus))

    raise BadParameterError(f"unknown channel name {name!r}")


def channel_from_dict(spec: dict) -> Channel:
    """Build a channel from the JSON schema
    {"d_in": int, "d_out": int, "kraus": [[[[re, im], ...], ...], ...]}."""
    try:
        d_in = int(spec["d_in"])
        d_out = int(spec["d_out"])
        raw = spec["kraus"]
    except (KeyError, TypeError, ValueError) as exc:
        raise BadParameterError(f"malformed channel spec: {exc}") from exc
    kraus = []
    for mat in raw:
        rows = []
        for row in mat:
            try:
                rows.append([complex(re, im) for re, im in row])
            except (TypeError, ValueError) as exc:
                raise BadParameterError(
                    f"malformed Kraus entry, expected [re, im] pairs: {exc}"
                ) from exc
        kraus.append(np.asarray(rows, dtype=complex))
    return Channel(d_in, d_out, tuple(kraus))


def channel_to_dict(ch: Channel) -> dict:
    """Serialize a channel to the JSON schema accepted by channel_from_dict."""
    return {
        "d_in": ch.d_in,
        "d_out": ch.d_out,
        "kraus": [
            [[[float(z.real), float(z.imag)] for z in row] for row in k]
            for k in ch.kraus
        ],
    }


def load_channel(path: str) -> Channel:
    """Load a channel from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BadParameterError(f"invalid channel JSON: {exc}") from exc
    return channel_from_dict(spec)


def parse_channel(text: str) -> Channel:
    """Parse a channel argument: either "name:p1[:p2]" or "@file.json"."""
    if text.startswith("@"):
        return load_channel(text[1:])
    parts = text.split(":")
    name = parts[0]
    try:
        params = [float(p) for p in parts[1:]]
    except ValueError as exc:
        raise BadParameterError(f"bad channel parameters in {text!r}") from exc
    return make_channel(name, *params)


def random_channel(
    d_in: int, d_out: int, kraus_count: int, rng: np.random.Generator
) -> Channel:
    """Haar-random channel from a random isometry into d_out * kraus_count.

    Requires d_out * kraus_count >= d_in so an isometry exists.
    """
    if d_out * kraus_count < d_in:
        raise BadParameterError(
            f"d_out * kraus_count = {d_out * kraus_count} < d_in = {d_in}"
        )
    g = rng.standard_normal((d_out * kraus_count, d_in)) + 1j * rng.standard_normal(
        (d_out * kraus_count, d_in)
    )
    q, _ = np.linalg.qr(g)
    kraus = tuple(q[e * d_out : (e + 1) * d_out, :] for e in range(kraus_count))
    return Channel(d_in, d_out, kraus)
