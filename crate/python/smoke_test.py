"""Smoke test for the wheelkit_py extension module.

Build and install it first:
    pip install --no-build-isolation -e crates/py
"""

from fractions import Fraction
import json

import wheelkit_py as wk


def main():
    b = wk.modified_bernoulli(3)
    assert b[1:] == [Fraction(1, 48), Fraction(-1, 5760), Fraction(1, 362880)], b

    w2 = wk.Element(wk.Diagram.wheel("x", 2))
    w4 = wk.Element(wk.Diagram.wheel("x", 4))
    assert wk.apply_diffop(w4, w2, "x").is_zero()
    side_and_diagonal = wk.apply_diffop(w2, w4, "x")
    assert sorted(abs(c) for _, c in side_and_diagonal.terms()) == [4, 8]

    engine = wk.Engine(4)
    assert engine.sl2_reduce(wk.Element(wk.Diagram.theta())) == 6
    s = wk.Element(wk.Diagram.strut("x"))
    omega = wk.omega("x", 8)
    power = s
    for n in range(1, 5):
        assert engine.sl2_pair(omega, power, "x") == Fraction(1, 4 ** n)
        power = power.union(s)

    assert [engine.dim(n) for n in range(5)] == [1, 1, 2, 3, 6]
    assert [engine.dim(n, "interval") for n in range(5)] == [1, 1, 2, 3, 6]

    # Delta Omega = Omega x Omega modulo link relations, which act on circled stars only
    def delta_minus_product(kind):
        delta = wk.coproduct(wk.omega("x", 4).with_kind("x", kind), "x", "a", "b")
        product = wk.omega("a", 4).with_kind("a", kind).union(wk.omega("b", 4).with_kind("b", kind))
        return engine.equal_mod_relations(delta, product, 4)

    assert delta_minus_product("circledstar") == (True, None)
    assert delta_minus_product("star") == (False, 2)

    again = wk.Element.from_json(omega.to_json())
    assert again == omega
    assert (omega - again).is_zero()
    assert (2 * omega - omega) == omega

    passed, report = wk.run_suites(["appendix"])
    assert passed and json.loads(report)["schema"] == "wheelkit-report/1"
    print("wheelkit_py smoke test passed")


if __name__ == "__main__":
    main()
