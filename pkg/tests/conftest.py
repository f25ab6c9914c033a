"""Shared generators for randomized property suites.

All randomness is seeded per test so the suite is deterministic.
"""

from __future__ import annotations

import math
import random

from ptkit import modfn
from ptkit.modfn import App, Bin, ImagUnit, Neg, Num, Param, TimeVar


def gen_fd_safe_expr(rng: random.Random, depth: int = 3):
    """Random expression that is smooth and moderate-valued on real t.

    Built so that central finite differences at h=1e-5 are reliable:
    real parameters, denominators and ln/sqrt arguments bounded away
    from zero, powers restricted to small integers.

    Returns (expr, params).
    """
    params: dict[str, complex] = {}

    def const() -> Num:
        return Num(round(rng.uniform(0.2, 2.5), 6))

    def leaf():
        c = rng.random()
        if c < 0.4:
            return Bin("*", const(), TimeVar())
        if c < 0.6:
            name = f"p{len(params)}"
            params[name] = complex(round(rng.uniform(-2.0, 2.0), 6))
            return Param(name)
        if c < 0.8:
            return const()
        return Bin("+", Bin("*", const(), TimeVar()), const())

    def bounded(d: int):
        # |value| <= 1 on real inputs
        return App(rng.choice(("sin", "cos", "tanh")), safe(d - 1))

    def safe(d: int):
        if d <= 0:
            return leaf()
        c = rng.random()
        if c < 0.25:
            return bounded(d)
        if c < 0.40:
            return Bin(rng.choice("+-"), safe(d - 1), safe(d - 1))
        if c < 0.55:
            return Bin("*", safe(d - 1), bounded(d))
        if c < 0.65:
            return Bin("/", safe(d - 1), Bin("+", Num(2.5), bounded(d)))
        if c < 0.75:
            return App("exp", Bin("*", Num(0.4), bounded(d)))
        if c < 0.83:
            return App(rng.choice(("ln", "sqrt")), Bin("+", Num(2.5), bounded(d)))
        if c < 0.92:
            return Bin("^", Bin("+", Num(2.0), bounded(d)), Num(float(rng.choice((2, 3)))))
        return Neg(safe(d - 1))

    return safe(depth), params


def gen_model_spec(rng: random.Random, with_omega: bool = True):
    """Random well-behaved ModelSpec: bounded smooth modulations and
    potentials, couplings of moderate size, f1/f2 bounded away from zero."""
    from ptkit.model import ModelSpec

    def coupling() -> complex:
        r = rng.uniform(0.5, 1.5)
        ph = rng.uniform(0, 2 * math.pi)
        return complex(r * math.cos(ph), r * math.sin(ph))

    params = {
        "a1": rng.uniform(1.0, 2.0),
        "b1": rng.uniform(-0.5, 0.5),
        "w1": rng.uniform(0.3, 2.0),
        "a2": rng.uniform(1.0, 2.0),
        "b2": rng.uniform(-0.5, 0.5),
        "w2": rng.uniform(0.3, 2.0),
        "c1": rng.uniform(-0.8, 0.8),
        "d1": rng.uniform(-0.5, 0.5),
        "u1": rng.uniform(0.3, 2.0),
        "c2": rng.uniform(-0.8, 0.8),
        "d2": rng.uniform(-0.5, 0.5),
        "u2": rng.uniform(0.3, 2.0),
        "s1": rng.uniform(-0.4, 0.4),
        "s2": rng.uniform(-0.4, 0.4),
    }
    omega1 = "c1+d1*cos(u1*t)+i*s1*sin(u1*t)" if with_omega else "0"
    omega2 = "c2+d2*sin(u2*t)+i*s2*cos(u2*t)" if with_omega else "0"
    return ModelSpec(
        nu=coupling(),
        nu_prime=coupling(),
        f1="a1+b1*sin(w1*t)",
        f2="a2+b2*cos(w2*t)",
        omega1=omega1,
        omega2=omega2,
        params=params,
    )


def gen_any_expr(rng: random.Random, depth: int = 4):
    """Random expression tree over the full grammar (round-trip fuzzing only)."""
    names = ("w", "g", "e1", "e2", "alpha", "x_0")

    def node(d: int):
        if d <= 0:
            c = rng.random()
            if c < 0.3:
                return Num(round(rng.uniform(0, 9.75), 4))
            if c < 0.45:
                return ImagUnit()
            if c < 0.7:
                return TimeVar()
            return Param(rng.choice(names))
        c = rng.random()
        if c < 0.45:
            return Bin(rng.choice("+-*/^"), node(d - 1), node(d - 1))
        if c < 0.65:
            return Neg(node(d - 1))
        if c < 0.9:
            return App(rng.choice(modfn.FUNCTIONS), node(d - 1))
        return node(d - 1)

    return node(depth)
