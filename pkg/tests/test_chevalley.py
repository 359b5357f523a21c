"""Tests for the jet tangent carrier, cochains, and the mode algebra.

Oracles used here:
  * the free-field dictionary is checked to be a ring isomorphism that
    intertwines the jet translation with the negated vertex translation,
    so the carrier bracket inherits antisymmetry and Jacobi from the
    independently tested vertex engine (re-verified on a window anyway);
  * the action of frame fields on functions is compared against the
    explicit prolongation formula written with jet partial derivatives;
  * the Chevalley differential is validated by d(d(phi)) = 0 on random
    cochains over both an even base and a super base, and against a hand
    computation for a linear 1-cochain;
  * mode brackets reproduce the Heisenberg and Witt relations.
"""

import itertools
import random
from fractions import Fraction

from chiralis import ring
from chiralis.algebra import SuperPolyAlgebra
from chiralis.chevalley import (
    ChevalleyCochain,
    JetWorld,
    chevalley_d,
    lie_modes_bracket,
    multilinearity_check,
    symmetrized_seed,
    tau_name,
)
from chiralis.starops import (
    StarModule,
    StarOp,
    op_on_free_basis,
    lp_add,
    lp_from_elem,
    lp_normal,
    lp_scale,
    lie_star_check,
    sigma_act,
)


def even_world(n=2):
    return JetWorld(
        SuperPolyAlgebra([(f"x{i}", 0, 0) for i in range(1, n + 1)])
    )


def super_world():
    base = SuperPolyAlgebra(
        [("x", 0, 0), ("xi", 1, -1)],
        D={"xi": {(("x", 2),): Fraction(1)}},
    )
    return JetWorld(base)


def rand_jet(rng, world, maxjet=2, maxdeg=2, terms=3):
    keys = [
        (name, k)
        for name in world.base.gen_names
        for k in range(maxjet + 1)
    ]
    p = {}
    for _ in range(terms):
        deg = rng.randrange(maxdeg + 1)
        mono = world.jets.one()
        for _ in range(deg):
            mono = world.jets.mul(mono, world.jets.gen(rng.choice(keys)))
        c = Fraction(rng.randrange(-3, 4))
        if c and mono:
            p = ring.padd(p, ring.pscale(mono, c))
    return p


def test_fock_dictionary_round_trip_and_translate():
    rng = random.Random(11)
    w = super_world()
    for _ in range(20):
        p = rand_jet(rng, w)
        # also mix in a tangent letter
        if rng.randrange(2):
            p = w.jets.mul(p, w.tau("x", rng.randrange(2)))
        q = w.from_fock(w.to_fock(p))
        assert ring.psub(q, p) == {}
        # the dictionary sends the jet translation to minus the vertex one
        lhs = w.to_fock(w.jets.translate(p))
        rhs = ring.pscale(w.fock.T(w.to_fock(p)), -1)
        assert ring.psub(lhs, rhs) == {}


def test_carrier_bracket_is_lie_star():
    w = even_world(1)
    mu = w.bracket()
    x, tau = w.coord("x1"), w.tau("x1")
    basis = [
        x,
        tau,
        w.jets.mul(x, tau),
        w.jets.mul(w.jets.mul(x, x), tau),
        w.coord("x1", 1),
    ]
    report = lie_star_check(mu, basis)
    assert report["ok"], report["failures"][:2]


def test_carrier_bracket_super_window():
    w = super_world()
    mu = w.bracket()
    basis = [
        w.coord("x"),
        w.coord("xi"),
        w.tau("x"),
        w.tau("xi"),
        w.jets.mul(w.coord("xi"), w.tau("x")),
        w.jets.mul(w.coord("x"), w.tau("xi")),
    ]
    report = lie_star_check(mu, basis)
    assert report["ok"], report["failures"][:2]


def test_action_prolongation_formula():
    rng = random.Random(5)
    w = even_world(2)
    mu = w.bracket()
    for _ in range(15):
        g = rand_jet(rng, w)
        for name in ("x1", "x2"):
            got = mu(w.tau(name), g)
            want = {}
            for k in range(0, 4):
                dg = ring.derive(
                    g,
                    {(name, k): w.jets.one()},
                    w.base.parity(name),
                    w.jets.parity,
                )
                if dg:
                    mono = ((1, k),) if k else ()
                    want = lp_add(
                        want,
                        {mono: ring.pscale(dg, Fraction((-1) ** k))},
                    )
            assert lp_normal(lp_add(got, lp_scale(want, -1))) == {}


def test_cochain_antisymmetry_and_multilinearity():
    rng = random.Random(7)
    w = even_world(2)
    seeds = {
        ("x1", "x2"): {
            (): {((("x1", 0), 1),): Fraction(2)},
            ((1, 1),): {((("x2", 1), 1),): Fraction(1)},
        }
    }
    phi = ChevalleyCochain(w, 2, seeds)
    flip = sigma_act((2, 1), phi)
    for _ in range(8):
        a = w.jets.mul(rand_jet(rng, w), w.tau(rng.choice(["x1", "x2"])))
        b = w.jets.mul(rand_jet(rng, w), w.tau(rng.choice(["x1", "x2"])))
        if not a or not b:
            continue
        assert lp_normal(lp_add(flip(a, b), phi(a, b))) == {}
        f = rand_jet(rng, w)
        for slot in (1, 2):
            res = multilinearity_check(phi, slot, f, (a, b), w)
            assert res["ok"], res["difference"]


def test_even_repeat_seed_rejected():
    w = even_world(2)
    try:
        ChevalleyCochain(
            w, 2, {("x1", "x1"): {(): {(): Fraction(1)}}}
        )
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_chevalley_d_hand_example():
    w = even_world(2)
    # phi(tau_1) = x2, phi(tau_2) = 0
    phi = ChevalleyCochain(
        w, 1, {("x1",): {(): {((("x2", 0), 1),): Fraction(1)}}}
    )
    d = chevalley_d(phi)
    val = d(w.tau("x1"), w.tau("x2"))
    # d phi(t1, t2) = action(t1, phi(t2)) - action(t2, phi(t1)) = -1
    assert lp_normal(val) == {(): {(): Fraction(-1)}}


def test_chevalley_d_squared_even_base():
    rng = random.Random(23)
    w = even_world(2)
    names = sorted(w.frame_names())
    for _ in range(6):
        arity = rng.choice([1, 2])
        seeds = {}
        for tup in itertools.combinations(names, arity):
            val = {}
            for zpow in range(2):
                g = rand_jet(rng, w, maxjet=1, maxdeg=2, terms=2)
                if g:
                    val[((1, zpow),) if zpow else ()] = g
            if arity == 1:
                val = {k: v for k, v in val.items() if not k}
            if val:
                seeds[tup] = val
        phi = ChevalleyCochain(w, arity, seeds)
        dd = chevalley_d(chevalley_d(phi))
        assert not dd.table, dd.table


def test_chevalley_d_squared_super_base():
    rng = random.Random(41)
    w = super_world()
    names = sorted(w.frame_names())
    pars = {n: w.frame_parity(n) for n in names}
    for _ in range(6):
        arity = rng.choice([1, 2])
        seeds = {}
        tuples = [
            t
            for t in itertools.combinations_with_replacement(names, arity)
            if not any(
                t[i] == t[i + 1] and not pars[t[i]]
                for i in range(arity - 1)
            )
        ]
        for tup in tuples:
            val = {}
            for zpow in range(2):
                g = rand_jet(rng, w, maxjet=1, maxdeg=2, terms=2)
                # keep the seed parity-homogeneous so Koszul bookkeeping
                # stays well defined
                want_par = sum(pars[n] for n in tup) & 1
                g = {
                    m: c
                    for m, c in g.items()
                    if ring.mono_parity(m, w.jets.parity) == want_par
                }
                if g:
                    val[((1, zpow),) if zpow else ()] = g
            if arity == 1:
                val = {k: v for k, v in val.items() if not k}
            val = symmetrized_seed(w, tup, val)
            if val:
                seeds[tup] = val
        phi = ChevalleyCochain(
            w,
            arity,
            seeds,
            op_parity=0,
        )
        dd = chevalley_d(chevalley_d(phi))
        assert not dd.table, (arity, dd.table)


def test_multilinearity_counterexample():
    w = even_world(1)

    def bad(f, g):
        return lp_from_elem(w.jets.mul(w.jets.translate(f), g))

    op = StarOp(2, w.module, bad, 0)
    x = w.coord("x1")
    res = multilinearity_check(op, 1, x, (x, x), w)
    assert not res["ok"]
    # while the tangent action is multilinear in its frame slot
    mu = w.bracket()
    res2 = multilinearity_check(
        mu, 1, x, (w.tau("x1"), w.jets.mul(x, x)), w
    )
    assert res2["ok"], res2["difference"]


def _heisenberg_decompose(w):
    tname = tau_name("x1")

    def decompose(elem):
        out = {}
        for mono, c in elem.items():
            if not mono:
                out[("1", 0)] = out.get(("1", 0), Fraction(0)) + c
                continue
            (g, e), = mono
            assert e == 1
            name, k = g
            label = "b" if name == tname else "g"
            out[(label, k)] = out.get((label, k), Fraction(0)) + c
        return {k: v for k, v in out.items() if v}

    return decompose


def test_modes_heisenberg():
    w = even_world(1)
    mu = w.bracket()
    dec = _heisenberg_decompose(w)
    for n in range(0, 3):
        for m in range(0, 3):
            out = lie_modes_bracket(mu, w.tau("x1"), n, w.coord("x1"), m, dec)
            assert out == {("1", n + m): Fraction(1)}
            out2 = lie_modes_bracket(
                mu, w.coord("x1"), m, w.coord("x1"), n, dec
            )
            assert out2 == {}


def test_modes_heisenberg_current_level():
    # the weight-one current J = x*tau has [J_[n], J_[m]] = -n 1_[n+m-1]
    w = even_world(1)
    mu = w.bracket()
    ell = w.jets.mul(w.coord("x1"), w.tau("x1"))

    def decompose(elem):
        out = {}
        for mono, c in elem.items():
            assert mono == ()
            out[("1", 0)] = c
        return out

    for n in range(0, 4):
        for m in range(0, 4):
            out = lie_modes_bracket(mu, ell, n, ell, m, decompose)
            want = {("1", n + m - 1): Fraction(-n)} if n else {}
            assert out == want, (n, m, out)


def test_modes_witt():
    # the rank-one free translation module with mu(l, l) = -(Tl) + 2l z
    module = StarModule(
        parity=lambda e: 0,
        translate=lambda e: {(nm, k + 1): c for (nm, k), c in e.items()},
    )
    mu = op_on_free_basis(
        2,
        module,
        {("l", "l"): {(): {("l", 1): Fraction(-1)},
                      ((1, 1),): {("l", 0): Fraction(2)}}},
    )
    ell = {("l", 0): Fraction(1)}
    for n in range(0, 4):
        for m in range(0, 4):
            out = lie_modes_bracket(mu, ell, n, ell, m, lambda e: dict(e))
            want = {}
            if n != m:
                want[("l", n + m - 1)] = Fraction(n - m)
            assert out == want, (n, m, out)
