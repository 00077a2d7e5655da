"""Sparse vectors as {index: scalar} dicts, shared by the algebra layers."""

from __future__ import annotations


def vclean(field, v: dict) -> dict:
    return {i: x for i, x in v.items() if not field.is_zero(x)}


def vadd(field, u: dict, v: dict) -> dict:
    out = dict(u)
    for i, x in v.items():
        if i in out:
            y = out[i] + x
            if field.is_zero(y):
                del out[i]
            else:
                out[i] = y
        else:
            out[i] = x
    return out


def vaxpy(field, out: dict, c, v: dict) -> None:
    """In-place out += c*v."""
    if field.is_zero(c):
        return
    for i, x in v.items():
        y = out.get(i, field.zero) + c * x
        if field.is_zero(y):
            out.pop(i, None)
        else:
            out[i] = y


def vscale(field, c, v: dict) -> dict:
    if field.is_zero(c):
        return {}
    return {i: c * x for i, x in v.items()}


def vneg(v: dict) -> dict:
    return {i: -x for i, x in v.items()}

def vsub(field, u: dict, v: dict) -> dict:
    return vadd(field, u, vneg(v))


def from_list(field, xs) -> dict:
    return {i: x for i, x in enumerate(xs) if not field.is_zero(x)}


def to_list(field, v: dict, n: int) -> list:
    out = [field.zero] * n
    for i, x in v.items():
        out[i] = x
    return out
