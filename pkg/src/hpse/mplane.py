"""Moderate-precision lane (isolated mpmath context, ~40 digits).

Used for planning quantities only: turning points, quadratures, WKB
estimates.  Final eigenvalue digits never pass through this lane.  The
context is private to this package so the global mpmath state is untouched.
"""

from mpmath.ctx_mp import MPContext

MP = MPContext()
MP.dps = 40

LN10 = MP.ln(10)


def mpf_from(text: str):
    """Decimal string -> mpf in the moderate lane."""
    return MP.mpf(text)
