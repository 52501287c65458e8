"""Codeword families for the two-environment Gaussian channel.

A codebook is an n x m matrix: rows are transmission times (samples), columns
are codewords (predictors).  The first n/2 rows belong to environment 1 and
the last n/2 rows to environment 2, which is why n must always be even.

Four families are provided:

* ``make_simplex``   -- m codewords forming a regular simplex on the sphere of
  radius sqrt(n*P), with all energy placed in the environment-1 rows (the
  environment-2 rows are identically zero: the two environments are as
  different as the power budget allows).
* ``make_uniform``   -- the degenerate family where every codeword equals
  sqrt(P) in every row; the two environments are indistinguishable.
* ``make_inter``     -- the entrywise interpolation a*uniform + (1-a)*simplex.
* ``sample_random_uniform_env`` -- random design with Uniform[0, sqrt(P)]
  entries in environment 1 and Uniform[0, sqrt(P+d)] entries in environment 2,
  so per-environment power budgets n*P/2 and n*(P+d)/2 hold almost surely.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

#: relative tolerance for column-power and Gram-matrix checks
POWER_RTOL = 1e-9

KINDS = ("simplex", "uniform", "interpolated", "random_uniform_env")


@dataclass(frozen=True)
class EnvironmentSplit:
    """Half/half row split with per-environment power budgets.

    The budgets bind for the random family; the deterministic families spend
    the whole n*P budget as they see fit (the simplex puts all of it in
    environment 1).
    """

    boundary: int
    env1_power: float
    env2_power: float
    d: float = 0.0


@dataclass(frozen=True)
class Codebook:
    entries: np.ndarray = field(repr=False)
    n: int
    m: int
    power: float
    kind: str
    a: float | None = None
    d: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown codebook kind {self.kind!r}")
        if self.n <= 0 or self.n % 2 != 0:
            raise ParameterError(f"sample count n={self.n} must be a positive even integer")
        if self.m < 1:
            raise ParameterError(f"codeword count m={self.m} must be >= 1")
        if self.power <= 0:
            raise ParameterError(f"power budget P={self.power} must be > 0")
        ent = np.ascontiguousarray(self.entries, dtype=np.float64)
        if ent.shape != (self.n, self.m):
            raise ParameterError(f"entries shape {ent.shape} != (n, m) = ({self.n}, {self.m})")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)
        self._check_power()

    def _check_power(self):
        budget = self.n * self.power
        if self.kind == "random_uniform_env":
            budget = self.n * (self.power + (self.d or 0.0) / 2.0)
        col_power = np.einsum("ij,ij->j", self.entries, self.entries)
        if np.any(col_power > budget * (1.0 + POWER_RTOL)):
            worst = float(col_power.max())
            raise ParameterError(
                f"column power {worst:.6g} exceeds budget {budget:.6g} for kind {self.kind!r}"
            )
        if self.kind == "simplex" and not np.allclose(
            col_power, self.n * self.power, rtol=POWER_RTOL, atol=0.0
        ):
            raise ParameterError("simplex columns must lie exactly on the power sphere")

    @property
    def split(self) -> EnvironmentSplit:
        d = self.d or 0.0
        return EnvironmentSplit(
            boundary=self.n // 2,
            env1_power=self.power / 2.0,
            env2_power=(self.power + d) / 2.0,
            d=d,
        )

    def gram(self) -> np.ndarray:
        return self.entries.T @ self.entries


def _simplex_directions(m: int) -> np.ndarray:
    """Unit vectors u_1..u_m in R^(m-1) with <u_i, u_j> = -1/(m-1) for i != j.

    Built from the Helmert submatrix (an orthonormal basis of the hyperplane
    orthogonal to the all-ones vector), then reflected so that u_1 lands on
    the last coordinate axis.  The reflection fixes the orientation: for m=3
    the first codeword is [0, 1], matching the conventional picture of the
    2-simplex with one vertex due north.
    """
    rows = []
    for i in range(1, m):
        r = np.zeros(m)
        r[:i] = 1.0
        r[i] = -float(i)
        rows.append(r / np.sqrt(i * (i + 1)))
    helmert = np.array(rows)  # (m-1, m), orthonormal rows, each orthogonal to 1
    u = helmert / np.sqrt(1.0 - 1.0 / m)  # columns are the simplex directions

    target = np.zeros(m - 1)
    target[m - 2] = 1.0
    v = u[:, 0] - target
    vv = v @ v
    if vv > 1e-12:  # Householder reflection sending u_1 to the target axis
        u = u - np.outer(v, (2.0 / vv) * (v @ u))
    return u


def make_simplex(n: int, m: int, power: float) -> Codebook:
    """Regular simplex of m codewords on the sphere of radius sqrt(n*power).

    All nonzero entries sit in the first m-1 rows, so the construction needs
    n/2 >= m-1 to keep the whole simplex inside environment 1; the
    environment-2 rows come out identically zero.

    Columns satisfy ||c_j||^2 = n*power and <c_i, c_j> = -n*power/(m-1).
    """
    _check_common(n, power)
    if m < 2:
        raise ParameterError(f"simplex needs m >= 2 codewords, got m={m}")
    if n // 2 < m - 1:
        raise ParameterError(
            f"simplex with m={m} codewords needs n/2 >= m-1 environment-1 rows, got n={n}"
        )
    entries = np.zeros((n, m))
    entries[: m - 1, :] = np.sqrt(n * power) * _simplex_directions(m)
    return Codebook(entries=entries, n=n, m=m, power=power, kind="simplex")


def make_uniform(n: int, m: int, power: float) -> Codebook:
    """Worst-case codebook: every entry equals sqrt(power), all columns equal."""
    _check_common(n, power)
    if m < 1:
        raise ParameterError(f"m={m} must be >= 1")
    entries = np.full((n, m), np.sqrt(power))
    return Codebook(entries=entries, n=n, m=m, power=power, kind="uniform")


def make_inter(n: int, m: int, power: float, a: float) -> Codebook:
    """Entrywise interpolation a*uniform + (1-a)*simplex.

    a=0 reproduces the simplex bit for bit, a=1 the uniform codebook; a is a
    knob for how similar the two environments look.
    """
    if not 0.0 <= a <= 1.0:
        raise ParameterError(f"interpolation weight a={a} must lie in [0, 1]")
    simp = make_simplex(n, m, power)
    unif = make_uniform(n, m, power)
    entries = a * unif.entries + (1.0 - a) * simp.entries
    return Codebook(entries=entries, n=n, m=m, power=power, kind="interpolated", a=a)


def sample_random_uniform_env(
    n: int, m: int, power: float, d: float, rng: np.random.Generator
) -> Codebook:
    """Random design: Uniform[0, sqrt(P)] rows in environment 1, Uniform[0, sqrt(P+d)] in environment 2.

    The support bound makes the per-environment power constraints
    sum_{i<=n/2} x_ij^2 <= n*P/2 and sum_{i>n/2} x_ij^2 <= n*(P+d)/2 hold
    almost surely.  Same rng state => bit-identical codebook.
    """
    _check_common(n, power)
    if d < 0:
        raise ParameterError(f"environment power surplus d={d} must be >= 0")
    half = n // 2
    entries = np.empty((n, m))
    entries[:half] = rng.uniform(0.0, np.sqrt(power), size=(half, m))
    entries[half:] = rng.uniform(0.0, np.sqrt(power + d), size=(n - half, m))
    return Codebook(entries=entries, n=n, m=m, power=power, kind="random_uniform_env", d=d)


def _check_common(n: int, power: float):
    if n <= 0 or n % 2 != 0:
        raise ParameterError(f"sample count n={n} must be a positive even integer")
    if power <= 0:
        raise ParameterError(f"power budget P={power} must be > 0")


# ---------------------------------------------------------------------------
# CSV persistence: one comment header, then n rows of m values at 17
# significant digits (full float64 round trip).

def dump_csv(cb: Codebook) -> str:
    head = f"# n={cb.n} m={cb.m} P={cb.power!r} kind={cb.kind}"
    if cb.a is not None:
        head += f" a={cb.a!r}"
    if cb.d is not None:
        head += f" d={cb.d!r}"
    buf = io.StringIO()
    buf.write(head + "\n")
    for row in cb.entries:
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def save_csv(cb: Codebook, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_csv(cb))


def load_csv(path) -> Codebook:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# "):
            raise ParameterError(f"{path}: missing codebook header line")
        meta = dict(tok.split("=", 1) for tok in header[2:].split())
        rows = [
            [float(v) for v in line.split(",")]
            for line in fh
            if line.strip() and not line.startswith("#")
        ]
    entries = np.array(rows)
    return Codebook(
        entries=entries,
        n=int(meta["n"]),
        m=int(meta["m"]),
        power=float(meta["P"]),
        kind=meta["kind"],
        a=float(meta["a"]) if "a" in meta else None,
        d=float(meta["d"]) if "d" in meta else None,
    )
