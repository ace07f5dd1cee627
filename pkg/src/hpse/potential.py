"""Even polynomial potentials V(x) = x^(2M) + sum_m v_m x^(2m) and queries on them.

Coefficients and the stiffness parameter s enter as decimal strings and are
kept verbatim; numeric values are materialized per working precision on
demand, so no binary-double contamination can occur on the high-precision
path.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bigreal import BigReal, PrecisionCtx
from .mplane import MP, mpf_from

__all__ = ["PotentialSpec", "StateIndex", "NoTurningPointError"]


class NoTurningPointError(ValueError):
    """Energy is at or below the minimum of V: no classical turning point."""


@dataclass(frozen=True)
class StateIndex:
    """Global eigenvalue index n (energy ordered from 0) and parity exponent."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"state index must be >= 0, got {self.n}")

    @property
    def sigma(self) -> int:
        # even potential: states alternate parity, even ground state
        return self.n % 2

    @property
    def k_in_sector(self) -> int:
        return self.n // 2


@dataclass(frozen=True)
class PotentialSpec:
    """V(x) = x^(2M) + sum_{m<M} v_m x^(2m), leading coefficient exactly 1."""

    M: int
    s: str
    v: tuple[str, ...]

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if len(self.v) != self.M:
            raise ValueError(f"need exactly M={self.M} coefficients, got {len(self.v)}")
        object.__setattr__(self, "v", tuple(self.v))
        if mpf_from(self.s) <= 0:
            raise ValueError(f"s must be > 0, got {self.s!r}")

    # -- high-precision lane ---------------------------------------------------
    def s_value(self, ctx: PrecisionCtx) -> BigReal:
        return BigReal.from_str(self.s, ctx)

    def coeffs(self, ctx: PrecisionCtx) -> tuple[BigReal, ...]:
        return tuple(BigReal.from_str(t, ctx) for t in self.v)

    def value(self, x: BigReal) -> BigReal:
        """V(x) by Horner's scheme in x^2."""
        u = x * x
        acc = BigReal.from_int(1, x.ctx)
        for m in range(self.M - 1, -1, -1):
            acc = acc * u + BigReal.from_str(self.v[m], x.ctx)
        return acc

    def classical_momentum_sq(self, eps: BigReal, y: BigReal) -> BigReal:
        """V(y) - eps; negative inside the classically allowed region."""
        return self.value(y) - eps

    # -- moderate-precision lane -------------------------------------------------
    def value_mp(self, y):
        """V(y) in the moderate mpmath lane (y may be mpf or mpc)."""
        u = y * y
        acc = MP.mpf(1)
        for m in range(self.M - 1, -1, -1):
            acc = acc * u + mpf_from(self.v[m])
        return acc

    def value_float(self, y: float) -> float:
        u = y * y
        acc = 1.0
        for m in range(self.M - 1, -1, -1):
            acc = acc * u + float(self.v[m])
        return acc

    @property
    def s_float(self) -> float:
        return float(self.s)

    def search_bound(self, eps) -> float:
        """Upper bound beyond which V(y) > eps certainly holds."""
        eps = MP.mpf(eps)
        b = 1 + (abs(eps)) ** (MP.mpf(1) / (2 * self.M)) + sum(abs(mpf_from(t)) for t in self.v)
        b = float(b)
        for _ in range(200):
            if self.value_mp(b) > eps:
                return b
            b *= 2
        raise ValueError("could not bound the turning point search")

    def min_on_axis(self) -> tuple[float, float]:
        """(location, value) of the minimum of V on [0, inf), moderate precision."""
        hi = self.search_bound(self.value_mp(0))
        grid = [hi * i / 4096 for i in range(4097)]
        vals = [self.value_float(g) for g in grid]
        j = min(range(len(vals)), key=vals.__getitem__)
        lo = grid[max(j - 1, 0)]
        up = grid[min(j + 1, len(grid) - 1)]
        # golden-section refine at moderate precision
        gr = (5 ** 0.5 - 1) / 2
        a, b = lo, up
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        fc, fd = self.value_float(c), self.value_float(d)
        for _ in range(120):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - gr * (b - a)
                fc = self.value_float(c)
            else:
                a, c, fc = c, d, fd
                d = a + gr * (b - a)
                fd = self.value_float(d)
        ymin = 0.5 * (a + b)
        return ymin, float(self.value_mp(ymin))

    def largest_turning_point(self, eps):
        """Largest x0 >= 0 with V(x0) = eps, as a moderate-precision mpf.

        Bisection on [0, bound]; V(y) > eps for all y > x0.
        """
        eps = MP.mpf(eps)
        _, vmin = self.min_on_axis()
        if eps <= vmin:
            raise NoTurningPointError(f"eps={eps} is not above min V = {vmin}")
        hi = MP.mpf(self.search_bound(eps))
        # scan from above for the last sign change of V - eps
        npts = 1024
        xs = [hi * i / npts for i in range(npts + 1)]
        b = None
        for i in range(npts, 0, -1):
            if (self.value_mp(xs[i]) - eps) > 0 and (self.value_mp(xs[i - 1]) - eps) <= 0:
                b = (xs[i - 1], xs[i])
                break
        if b is None:
            raise NoTurningPointError(f"no crossing of V = {eps} found below {hi}")
        a, c = b
        for _ in range(180):
            m = (a + c) / 2
            if self.value_mp(m) - eps > 0:
                c = m
            else:
                a = m
        return (a + c) / 2

    def forbidden_intervals(self, eps, x_upper) -> list[tuple[float, float]]:
        """Maximal intervals of {y in [0, x_upper]: V(y) > eps}, moderate precision."""
        eps = MP.mpf(eps)
        npts = 1600
        xs = [MP.mpf(x_upper) * i / npts for i in range(npts + 1)]
        above = [(self.value_mp(x) - eps) > 0 for x in xs]

        def cross(i):  # root of V - eps in (xs[i-1], xs[i])
            a, c = xs[i - 1], xs[i]
            fa = self.value_mp(a) - eps
            for _ in range(160):
                m = (a + c) / 2
                if ((self.value_mp(m) - eps) > 0) == (fa > 0):
                    a = m
                else:
                    c = m
            return (a + c) / 2

        out = []
        start = xs[0] if above[0] else None
        for i in range(1, npts + 1):
            if above[i] and not above[i - 1]:
                start = cross(i)
            elif above[i - 1] and not above[i]:
                out.append((float(start), float(cross(i))))
                start = None
        if start is not None:
            out.append((float(start), float(xs[-1])))
        return out

