import math


def solve_increasing(f, lo, hi, fprime=None, steps=80, newton_steps=8):
    """Root of a nondecreasing ``f`` with ``f(lo) <= 0 < f(hi)``.

    Plain bisection for ``steps`` halvings (stopping early once the bracket is
    a few ulps wide), then Newton steps that are only accepted while they stay
    inside the bracket.  Returns ``(x, (lo, hi), iterations)``.
    """
    it = 0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        v = f(mid)
        it += 1
        if v > 0:
            hi = mid
        elif v < 0:
            lo = mid
        else:
            return mid, (lo, hi), it
    x = 0.5 * (lo + hi)
    if fprime is None:
        return x, (lo, hi), it
    for _ in range(newton_steps):
        v = f(x)
        d = fprime(x)
        if v == 0 or not (d > 0 and math.isfinite(d)):
            break
        xn = x - v / d
        if not lo <= xn <= hi or xn == x:
            break
        x = xn
        it += 1
    return x, (lo, hi), it


def expand_up(f, lo, start=1.0, limit=2000):
    """Smallest ``lo + start * 2**j`` with ``f > 0``; None if never found."""
    step = start
    for _ in range(limit):
        hi = lo + step
        if f(hi) > 0:
            return hi
        step *= 2
        if not math.isfinite(hi):
            break
    return None


def expand_down(f, hi, start=1.0, limit=2000):
    """Largest ``hi - start * 2**j`` with ``f < 0``; None if never found."""
    step = start
    for _ in range(limit):
        lo = hi - step
        if f(lo) < 0:
            return lo
        step *= 2
        if not math.isfinite(lo):
            break
    return None
