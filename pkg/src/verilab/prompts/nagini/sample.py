from nagini_contracts.contracts import *


def clamp(x: int, lo: int, hi: int) -> int:
    Requires(lo <= hi)
    Ensures(lo <= Result() and Result() <= hi)
    Ensures(Implies(lo <= x and x <= hi, Result() == x))
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x
