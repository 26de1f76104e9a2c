"""Finite irreducible reversible Markov chains and the benchmark families.

States are integers ``0..n-1``.  Torus states are row-major flattenings of
coordinate tuples, so ``torus(d=1, m=n)`` reproduces ``cycle(n)`` exactly.
Every kernel stores its stationary distribution explicitly; reversibility
is certified when a kernel is built, not assumed.

Chain-spec files are UTF-8 ``key=value`` lines, e.g.::

    family=torus
    d=2
    m=8

Custom matrices are referenced with ``family=custom`` and ``matrix=<csv>``
where the CSV holds n rows of n comma-separated decimals.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InvalidSpec, NotIrreducible, NotReversible, NumericalFailure

# Structural tolerance: about 100x double epsilon accumulated at n ~ 1e4.
STRUCT_TOL = 1e-12

FAMILIES = ("cycle", "torus", "complete", "hypercube", "dlp_birth_death", "custom")
_TRANSITIVE_FAMILIES = {"cycle", "torus", "complete", "hypercube"}


@dataclass(frozen=True)
class TransitionKernel:
    """Row-stochastic matrix P with certified stationary distribution pi.

    The container itself performs only shape coercion; the construction
    paths (`build_family`, `kernel_from_matrix`, `load_kernel`) enforce the
    invariants and raise on violation.  Arrays are frozen after
    construction and safe to share across threads.
    """

    n: int
    P: np.ndarray
    pi: np.ndarray
    label: str = "custom"
    transitive: bool = False

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        pi = np.array(self.pi, dtype=float)
        if P.shape != (self.n, self.n) or pi.shape != (self.n,):
            raise InvalidSpec(f"shape mismatch: n={self.n}, P{P.shape}, pi{pi.shape}")
        P.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "pi", pi)


@dataclass(frozen=True)
class ChainFamilySpec:
    """A named benchmark family plus its parameters."""

    family: str
    params: dict = field(default_factory=dict)

    def label(self) -> str:
        inner = ",".join(f"{k}={_fmt_param(v)}" for k, v in sorted(self.params.items())
                         if k != "matrix")
        return f"{self.family}({inner})"


def _fmt_param(v):
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def cycle_spec(n: int) -> ChainFamilySpec:
    return ChainFamilySpec("cycle", {"n": int(n)})


def torus_spec(d: int, m: int) -> ChainFamilySpec:
    return ChainFamilySpec("torus", {"d": int(d), "m": int(m)})


def complete_spec(n: int) -> ChainFamilySpec:
    return ChainFamilySpec("complete", {"n": int(n)})


def hypercube_spec(d: int) -> ChainFamilySpec:
    return ChainFamilySpec("hypercube", {"d": int(d)})


def dlp_spec(n: int, lam: float, eps: float, k: int | None = None) -> ChainFamilySpec:
    if k is None:
        k = int(n)
    return ChainFamilySpec("dlp_birth_death",
                           {"n": int(n), "lambda": float(lam), "eps": float(eps), "k": int(k)})


def custom_spec(matrix: np.ndarray) -> ChainFamilySpec:
    return ChainFamilySpec("custom", {"matrix": np.array(matrix, dtype=float)})


def canonical_spec_text(spec: ChainFamilySpec) -> str:
    """Stable text form of a spec, used for digests and manifests."""
    lines = [f"family={spec.family}"]
    for key in sorted(spec.params):
        if key == "matrix":
            digest = hashlib.sha256(_matrix_csv_bytes(spec.params["matrix"])).hexdigest()
            lines.append(f"matrix=sha256:{digest}")
        else:
            lines.append(f"{key}={_fmt_param(spec.params[key])}")
    return "\n".join(lines) + "\n"


def _matrix_csv_bytes(matrix) -> bytes:
    rows = [",".join(format(v, ".17g") for v in row) for row in np.asarray(matrix, float)]
    return ("\n".join(rows) + "\n").encode()


# ---------------------------------------------------------------------------
# family builders

def build_family(spec: ChainFamilySpec) -> TransitionKernel:
    """Build a certified kernel for a benchmark family.

    Raises InvalidSpec for out-of-range parameters.  Built-in families are
    reversible by construction; this is asserted, not trusted.
    """
    fam = spec.family
    p = spec.params
    if fam == "cycle":
        kernel = _build_cycle(_int_param(p, "n", low=2))
    elif fam == "torus":
        kernel = _build_torus(_int_param(p, "d", low=1), _int_param(p, "m", low=2))
    elif fam == "complete":
        kernel = _build_complete(_int_param(p, "n", low=2))
    elif fam == "hypercube":
        kernel = _build_hypercube(_int_param(p, "d", low=1))
    elif fam == "dlp_birth_death":
        n = _int_param(p, "n", low=2)
        lam = _float_param(p, "lambda")
        eps = _float_param(p, "eps")
        k = _int_param(p, "k", low=0) if "k" in p else n
        kernel = _build_dlp(n, lam, eps, k)
    elif fam == "custom":
        if "matrix" not in p:
            raise InvalidSpec("custom spec needs a matrix")
        return kernel_from_matrix(p["matrix"], label=spec.label())
    else:
        raise InvalidSpec(f"unknown family {fam!r}")

    report = validate(kernel)
    if not report.passed:
        raise NumericalFailure(f"built-in family failed validation: {report}")
    return kernel


def _int_param(params, key, low):
    if key not in params:
        raise InvalidSpec(f"missing parameter {key!r}")
    v = params[key]
    if int(v) != v:
        raise InvalidSpec(f"{key} must be an integer, got {v!r}")
    v = int(v)
    if v < low:
        raise InvalidSpec(f"{key}={v} below minimum {low}")
    return v


def _float_param(params, key):
    if key not in params:
        raise InvalidSpec(f"missing parameter {key!r}")
    return float(params[key])


def _uniform_kernel(P, label):
    n = P.shape[0]
    return TransitionKernel(n=n, P=P, pi=np.full(n, 1.0 / n), label=label, transitive=True)


def _build_cycle(n):
    P = np.zeros((n, n))
    for x in range(n):
        P[x, (x + 1) % n] += 0.5
        P[x, (x - 1) % n] += 0.5
    return _uniform_kernel(P, f"cycle(n={n})")


def _build_torus(d, m):
    n = m**d
    P = np.zeros((n, n))
    strides = [m ** (d - 1 - i) for i in range(d)]
    for s in range(n):
        coords = [(s // strides[i]) % m for i in range(d)]
        for i in range(d):
            for step in (+1, -1):
                c = (coords[i] + step) % m
                nb = s + (c - coords[i]) * strides[i]
                P[s, nb] += 1.0 / (2 * d)
    return _uniform_kernel(P, f"torus(d={d},m={m})")


def _build_complete(n):
    P = (np.ones((n, n)) - np.eye(n)) / (n - 1)
    return _uniform_kernel(P, f"complete(n={n})")


def _build_hypercube(d):
    n = 1 << d
    P = np.zeros((n, n))
    for s in range(n):
        for b in range(d):
            P[s, s ^ (1 << b)] = 1.0 / d
    return _uniform_kernel(P, f"hypercube(d={d})")


def _build_dlp(n, lam, eps, k):
    """Birth-death chain whose nonzero Laplacian eigenvalues cluster near lam.

    Row i (1-based) moves down with probability r_i*eps and up with
    r_i*(1-eps).  With k = n every row uses the rate r_i = lam.  For k < n
    the k top rows keep rate lam, rows below the boundary use rate 1/2, and
    the boundary row i = n-k uses the average of the two block rates; any
    birth-death chain is reversible, so the seam only reshapes pi.
    """
    if not (0.0 < lam <= 1.0):
        raise InvalidSpec(f"lambda={lam} outside (0, 1]")
    if not (0.0 < eps < 0.5):
        raise InvalidSpec(f"eps={eps} outside (0, 1/2)")
    if not (0 <= k <= n):
        raise InvalidSpec(f"k={k} outside [0, {n}]")

    boundary = n - k
    rates = np.empty(n)
    for idx in range(n):
        i = idx + 1
        if i < boundary:
            rates[idx] = 0.5
        elif i == boundary:
            rates[idx] = 0.5 * (0.5 + lam)
        else:
            rates[idx] = lam

    P = np.zeros((n, n))
    for idx in range(n):
        up = rates[idx] * (1.0 - eps) if idx < n - 1 else 0.0
        down = rates[idx] * eps if idx > 0 else 0.0
        P[idx, idx] = 1.0 - up - down
        if idx < n - 1:
            P[idx, idx + 1] = up
        if idx > 0:
            P[idx, idx - 1] = down

    # Detailed-balance product in log space; eps near 0 makes pi span many
    # orders of magnitude.
    log_pi = np.zeros(n)
    for idx in range(n - 1):
        log_pi[idx + 1] = log_pi[idx] + math.log(P[idx, idx + 1]) - math.log(P[idx + 1, idx])
    log_pi -= log_pi.max()
    pi = np.exp(log_pi)
    pi /= pi.sum()

    label = f"dlp_birth_death(n={n},lambda={_fmt_param(lam)},eps={_fmt_param(eps)},k={k})"
    return TransitionKernel(n=n, P=P, pi=pi, label=label, transitive=False)


# ---------------------------------------------------------------------------
# validation and custom kernels

@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max(c.residual for c in self.checks)

    def __str__(self):
        parts = [f"{c.name}: residual={c.residual:.3e} tol={c.tol:.0e} "
                 f"{'ok' if c.passed else 'FAIL'}" for c in self.checks]
        return "; ".join(parts)


def validate(kernel: TransitionKernel) -> ValidationReport:
    """Measure every kernel invariant and report residuals.

    Never raises; failures are carried in the report.
    """
    P, pi = kernel.P, kernel.pi
    row_res = float(np.abs(P.sum(axis=1) - 1.0).max())
    neg_res = float(max(0.0, -P.min()))
    pi_pos = float(max(0.0, -(pi.min() - np.finfo(float).tiny)))
    pi_sum = float(abs(pi.sum() - 1.0))
    balance = float(np.abs(pi[:, None] * P - pi[None, :] * P.T).max())
    stat = float(np.abs(pi @ P - pi).max())
    irred = 0.0 if _strongly_connected(P) else 1.0
    checks = (
        CheckResult("row_sums", row_res, STRUCT_TOL),
        CheckResult("nonnegative_entries", neg_res, 0.0),
        CheckResult("pi_positive", pi_pos, 0.0),
        CheckResult("pi_sums_to_one", pi_sum, STRUCT_TOL),
        CheckResult("detailed_balance", balance, STRUCT_TOL),
        CheckResult("stationarity", stat, STRUCT_TOL),
        CheckResult("strongly_connected", irred, 0.0),
    )
    return ValidationReport(checks)


def _strongly_connected(P) -> bool:
    graph = csr_matrix((np.abs(P) > 0).astype(np.int8))
    n_comp, _ = connected_components(graph, directed=True, connection="strong")
    return n_comp == 1


def stationary(P: np.ndarray) -> np.ndarray:
    """Unique positive probability vector with pi P = pi.

    Uses Grassmann-Taksar-Heyman elimination: no subtractions, so every
    entry keeps relative accuracy even when pi spans hundreds of orders of
    magnitude (the small-drift birth-death family does).  Raises
    NotIrreducible when the support graph is not strongly connected.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidSpec(f"matrix must be square, got shape {P.shape}")
    n = P.shape[0]
    if np.abs(P.sum(axis=1) - 1.0).max() > 1e-9 or P.min() < -1e-15:
        raise InvalidSpec("matrix is not row-stochastic")
    if not _strongly_connected(P):
        raise NotIrreducible("support graph is not strongly connected")
    A = P.copy()
    for k in range(n - 1, 0, -1):
        s = A[k, :k].sum()
        if s <= 0.0:
            raise NotIrreducible(f"state {k} unreachable during elimination")
        A[:k, k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    pi = np.empty(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ A[:k, k]
    pi /= pi.sum()
    if pi.min() <= 0.0:
        raise NumericalFailure("stationary solve produced a non-positive entry")
    resid = float(np.abs(pi @ P - pi).max())
    if resid > 1e-10:
        raise NumericalFailure(f"stationary residual {resid:.3e} exceeds 1e-10")
    return pi


def kernel_from_matrix(P: np.ndarray, pi: np.ndarray | None = None,
                       label: str = "custom") -> TransitionKernel:
    """Certify an arbitrary matrix as a reversible irreducible kernel.

    Raises InvalidSpec for a malformed matrix, NotIrreducible for a
    disconnected support graph and NotReversible when detailed balance
    fails beyond tolerance.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 2:
        raise InvalidSpec(f"matrix must be square with n >= 2, got shape {P.shape}")
    if P.min() < 0.0:
        raise InvalidSpec("negative transition probability")
    if np.abs(P.sum(axis=1) - 1.0).max() > STRUCT_TOL:
        raise InvalidSpec("row sums deviate from 1 beyond 1e-12")
    if pi is None:
        pi = stationary(P)
    else:
        pi = np.asarray(pi, dtype=float)
        if pi.shape != (P.shape[0],) or pi.min() <= 0.0 or abs(pi.sum() - 1.0) > STRUCT_TOL:
            raise InvalidSpec("pi must be a positive probability vector")
        if not _strongly_connected(P):
            raise NotIrreducible("support graph is not strongly connected")
    balance = float(np.abs(pi[:, None] * P - pi[None, :] * P.T).max())
    if balance > STRUCT_TOL:
        raise NotReversible(f"detailed balance residual {balance:.3e} exceeds 1e-12")
    return TransitionKernel(n=P.shape[0], P=P, pi=pi, label=label, transitive=False)


def random_reversible_kernel(n: int, rng: np.random.Generator,
                             label: str | None = None) -> TransitionKernel:
    """Random walk on a dense random weighted graph (always reversible)."""
    W = rng.uniform(0.1, 1.1, size=(n, n))
    W = 0.5 * (W + W.T)
    deg = W.sum(axis=1)
    P = W / deg[:, None]
    pi = deg / deg.sum()
    return TransitionKernel(n=n, P=P, pi=pi,
                            label=label or f"random(n={n})", transitive=False)


# ---------------------------------------------------------------------------
# chain-spec files and CSV export

def parse_chain_spec(path: str | Path) -> ChainFamilySpec:
    """Parse a key=value chain-spec file; see the module docstring."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidSpec(f"cannot read spec file: {exc}") from exc
    pairs = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidSpec(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        pairs[key.strip()] = value.strip()

    family = pairs.pop("family", None)
    if family is None:
        raise InvalidSpec(f"{path}: missing family= line")
    if family == "dlp":
        family = "dlp_birth_death"
    if family not in FAMILIES:
        raise InvalidSpec(f"{path}: unknown family {family!r}")

    if family == "custom":
        matrix_ref = pairs.pop("matrix", None)
        if matrix_ref is None:
            raise InvalidSpec(f"{path}: custom spec needs matrix=<csv path>")
        if pairs:
            raise InvalidSpec(f"{path}: unexpected keys {sorted(pairs)}")
        matrix_path = (path.parent / matrix_ref).resolve()
        try:
            matrix = np.loadtxt(matrix_path, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise InvalidSpec(f"cannot read matrix CSV {matrix_path}: {exc}") from exc
        return custom_spec(matrix)

    params = {}
    for key, value in pairs.items():
        if key == "lam":
            key = "lambda"
        try:
            params[key] = float(value) if key in ("lambda", "eps") else int(value)
        except ValueError as exc:
            raise InvalidSpec(f"{path}: bad value for {key}: {value!r}") from exc
    return ChainFamilySpec(family, params)


def load_kernel(path: str | Path) -> TransitionKernel:
    return build_family(parse_chain_spec(path))


def export_kernel_csv(kernel: TransitionKernel, path: str | Path) -> None:
    """Write P as n CSV rows followed by one row holding pi."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in kernel.P:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
        fh.write(",".join(format(v, ".17g") for v in kernel.pi) + "\n")
