"""Tests for chiral algebroids, their twists, and the homotopy layer.

Oracles used here:
  * the standard bracket over an even base restricted to frames is
    abelian, and the classical Jacobi report is exact on the sample
    window, so twist soundness/completeness is a genuine two-sided test:
    closed forms must pass, non-closed ones must fail with a witness, and
    the "closed" and "ok" verdicts must agree in both directions;
  * the chiral module action is compared bit for bit before and after a
    twist — the module structure is not part of the torsor data;
  * the commutator formula for extended (negative) modes is evaluated in
    the free-field realization, where it holds identically;
  * the homotopy differential is validated by squaring to zero and by the
    exact defect law: the arity-k generalized Jacobi defect of a twisted
    structure equals the evaluated k-th component of the differential of
    the twist, for non-closed twists too;
  * morphism residuals are compared against the evaluated differential of
    the defining cochain family.
"""

import itertools
from fractions import Fraction

from chiralis import ring
from chiralis.algebra import FormAlgebra, SuperPolyAlgebra
from chiralis.algebroid import (
    ChiralInftyAlgebroid,
    chiral_infty_morphism,
    chiral_infty_twist,
    cochain_seeds,
    default_field_samples,
    extended_commutator_defect,
    filtered_twist,
    graded_form_functor,
    jet_differential,
    lc_d,
    liestar_infty_jacobi,
    morphism_residual,
    non_centrality_witness,
    standard_chiral_algebroid,
    standard_chiral_infty_algebroid,
    twist_chiral,
    two_form_cochain,
    validate_lc_component,
)
from chiralis.chevalley import ChevalleyCochain, JetWorld, symmetrized_seed
from chiralis.starops import lp_normal


def even_world(n=3):
    return JetWorld(
        SuperPolyAlgebra([(f"x{i}", 0, 0) for i in range(1, n + 1)])
    )


def fs_world(m=2):
    return JetWorld(
        SuperPolyAlgebra(
            [("x", 0, 0), ("xi", 1, -1)],
            D={"xi": {(("x", m),): Fraction(1)}},
        )
    )


def four_gen_world():
    return JetWorld(
        SuperPolyAlgebra(
            [("x", 0, 0), ("y", 0, 0), ("xi", 1, -1), ("et", 1, -1)],
            D={
                "xi": {(("x", 1), ("y", 1)): Fraction(1)},
                "et": {(("x", 2),): Fraction(1)},
            },
        )
    )


def dform(forms, *names):
    out = forms.inject(ring.poly_one())
    for nm in names:
        out = forms.mul(out, forms.d_gen(nm))
    return out


def fs_closed_family(world):
    """The exact closed (twist) family over the m=2 base, weight <= 3."""
    jets = world.jets

    def mono(*keys):
        out = ring.poly_one()
        for k in keys:
            out = jets.mul(out, jets.gen(k))
        return out

    seeds2 = {
        ("x", "x"): {
            ((1, 1),): ring.pscale(mono(("x", 0), ("x", 2)), 2),
            (): ring.padd(
                ring.pscale(mono(("x", 1), ("x", 2)), -1),
                ring.pscale(mono(("x", 0), ("x", 3)), -1),
            ),
        }
    }
    seeds3 = {
        ("x", "x", "xi"): {
            ((1, 1), (2, 2)): {(): Fraction(1, 2)},
            ((1, 2), (2, 1)): {(): Fraction(-1, 2)},
        }
    }
    a2 = ChevalleyCochain(world, 2, seeds2, 0)
    a3 = ChevalleyCochain(world, 3, seeds3, 1)
    return a2, a3


# -- the standard algebroid and classical twists -------------------------------------


def test_standard_bracket_frames_abelian():
    world = even_world()
    P = standard_chiral_algebroid(world.base)
    for a, b in itertools.combinations(world.frame_names(), 2):
        assert P.bracket(world.tau(a), world.tau(b)) == {}


def test_twist_by_closed_three_form_passes():
    world = even_world()
    forms = FormAlgebra(world.base)
    omega = dform(forms, "x1", "x2", "x3")
    rep = graded_form_functor(world, alpha0=omega)
    assert rep["ok"] and rep["derham_d"] == {}
    P = standard_chiral_algebroid(world.base)
    _, report = twist_chiral(P, rep["alpha"], check=True)
    assert report["ok"] and report["closed"] and report["match"]


def test_twist_by_non_closed_three_form_fails_with_witness():
    world = even_world(4)
    forms = FormAlgebra(world.base)
    omega = forms.mul(
        forms.inject(world.base.gen("x4")),
        dform(forms, "x1", "x2", "x3"),
    )
    rep = graded_form_functor(world, alpha0=omega)
    assert not rep["ok"] and rep["derham_d"]
    forced = graded_form_functor(world, alpha0=omega, force=True)
    P = standard_chiral_algebroid(world.base)
    _, report = twist_chiral(P, forced["alpha"], check=True)
    assert not report["ok"] and report["failures"]
    assert not report["closed"] and report["match"]


def test_module_action_invariant_under_twist():
    world = even_world()
    forms = FormAlgebra(world.base)
    P = standard_chiral_algebroid(world.base)
    rep = graded_form_functor(
        world, alpha0=dform(forms, "x1", "x2", "x3")
    )
    Q, _ = twist_chiral(P, rep["alpha"])
    f = world.jets.mul(world.coord("x1"), world.coord("x2", 1))
    states = [
        world.tau("x1"),
        world.jets.mul(world.coord("x3"), world.tau("x2")),
        world.coord("x1", 2),
    ]
    for v in states:
        for n in (-2, -1, 0, 1):
            assert P.module_action(f, n, v) == Q.module_action(f, n, v)


def test_filtered_twist_additivity_and_match():
    world = even_world()
    forms = FormAlgebra(world.base)
    omega = dform(forms, "x1", "x2", "x3")
    beta = forms.mul(
        forms.inject(world.base.gen("x1")), dform(forms, "x2", "x3")
    )
    # beta is not closed: the combined twist must fail and say so
    _, rep = filtered_twist(world, omega, beta, check=True)
    assert not rep["ok"] and not rep["closed"] and rep["match"]
    closed_beta = dform(forms, "x1", "x2")
    _, rep2 = filtered_twist(world, omega, closed_beta, check=True)
    assert rep2["ok"] and rep2["closed"] and rep2["match"]


def test_two_form_cochain_shape():
    world = even_world()
    forms = FormAlgebra(world.base)
    beta = dform(forms, "x1", "x2")
    phi = two_form_cochain(world, beta)
    v = phi(world.tau("x1"), world.tau("x2"))
    # the contraction convention feeds frames from the right
    assert lp_normal(v) == {(): {(): Fraction(-1)}}
    assert phi(world.tau("x1"), world.tau("x3")) == {}


# -- free-field witnesses -------------------------------------------------------------


def test_non_centrality_witness():
    world = fs_world()
    rep = non_centrality_witness(world)
    assert rep["generator"] == "x"
    assert rep["difference"] == {
        ((("c", "x", -1), 1),): Fraction(-2)
    }
    assert rep["jet_image"] == {((("x", 1), 1),): Fraction(2)}


def test_extended_commutator_formula_negative_modes():
    world = fs_world()
    f = world.jets.mul(world.coord("x"), world.coord("x"))
    g = world.coord("x", 1)
    states = [world.tau("x"), world.coord("xi"),
              world.jets.mul(world.coord("x"), world.tau("xi"))]
    for v in states:
        for n in (0, 1, -1):
            for m in (-1, -2):
                assert (
                    extended_commutator_defect(world, f, n, g, m, v)
                    == {}
                )


# -- the homotopy differential --------------------------------------------------------


def test_untwisted_generalized_jacobi():
    world = fs_world()
    P = standard_chiral_infty_algebroid(world.base)
    samples = default_field_samples(world)
    rep = liestar_infty_jacobi(P.ops(), samples, k_max=3)
    assert rep["ok"], rep["failures"][:1]


def test_unary_operation_is_zero_mode_not_prolongation():
    world = fs_world()
    l1 = jet_differential(world)
    v = world.jets.mul(world.coord("xi"), world.tau("x"))
    got = l1(v).get((), {})
    naive = world.jets.D(v)
    diff = ring.psub(got, naive)
    # the normal-ordering contraction adds a pure first-jet term
    assert diff == {((("x", 1), 1),): Fraction(2)}
    # and the corrected operation still squares to zero
    assert lp_normal(l1(got)) == {}


def test_lc_d_squares_to_zero():
    world = four_gen_world()
    jets = world.jets
    X = world.coord("x")
    XI = world.coord("xi")
    ET = world.coord("et")
    s2 = symmetrized_seed(
        world, ("x", "y"), {((1, 1),): jets.mul(X, X), (): world.coord("x", 1)}
    )
    a2 = ChevalleyCochain(world, 2, {("x", "y"): s2}, 0)
    s3 = symmetrized_seed(world, ("x", "x", "xi"), {((1, 2),): XI})
    a3 = ChevalleyCochain(world, 3, {("x", "x", "xi"): s3}, 1)
    for fam in ({2: a2}, {3: a3}, {2: a2, 3: a3}):
        once = lc_d(world, fam)
        twice = lc_d(world, {k: v for k, v in once.items()})
        assert not twice, sorted(twice)


def test_defect_equals_differential_for_open_twist():
    """The Jacobi defect of any twist equals the differential, evaluated."""
    world = fs_world()
    a2, _ = fs_closed_family(world)  # open once its partner is dropped
    P = standard_chiral_infty_algebroid(world.base)
    Q, _ = chiral_infty_twist(P, {2: a2})
    d = lc_d(world, {2: a2})
    module = world.module
    samples = default_field_samples(world)
    from chiralis.starops import jacobi_defect

    checked = 0
    for args in samples:
        k = len(args)
        defect = jacobi_defect(Q.ops(), k, list(args), module)
        comp = d.get(k)
        want = lp_normal(comp(*args)) if comp is not None else {}
        assert lp_normal(defect) == want
        if want:
            checked += 1
    assert checked > 0


def test_fs_closed_family_twist_passes():
    world = fs_world()
    P = standard_chiral_infty_algebroid(world.base)
    a2, a3 = fs_closed_family(world)
    assert not lc_d(world, {2: a2, 3: a3})
    Q, rep = chiral_infty_twist(P, {2: a2, 3: a3}, check=True)
    assert rep["ok"] and rep["closed"] and rep["match"]


def test_fs_family_truncation_fails():
    world = fs_world()
    P = standard_chiral_infty_algebroid(world.base)
    a2, _ = fs_closed_family(world)
    _, rep = chiral_infty_twist(P, {2: a2}, check=True)
    assert not rep["ok"] and not rep["closed"] and rep["match"]
    assert any(f["arity"] == 3 for f in rep["failures"])


def test_sequential_twists_add():
    world = fs_world()
    P = standard_chiral_infty_algebroid(world.base)
    a2, a3 = fs_closed_family(world)
    Q1, _ = chiral_infty_twist(P, {2: a2})
    Q2, rep = chiral_infty_twist(Q1, {3: a3}, check=True)
    direct, _ = chiral_infty_twist(P, {2: a2, 3: a3})
    assert rep["ok"] and rep["closed"] and rep["match"]
    for k in (2, 3):
        s1 = cochain_seeds(Q2.alphas.get(k))
        s2 = cochain_seeds(direct.alphas.get(k))
        assert s1 == s2


def test_component_grading_validation():
    world = fs_world()
    jets = world.jets
    # wrong parity for an arity-2 twist component
    s = symmetrized_seed(world, ("x", "x"), {((1, 1),): world.coord("xi")})
    bad = ChevalleyCochain(world, 2, {("x", "x"): s}, 1)
    try:
        validate_lc_component(world, bad, total_degree=2)
        assert False, "expected a grading rejection"
    except ValueError:
        pass
    # wrong value degree
    s2 = symmetrized_seed(
        world, ("x", "x"), {((1, 1),): jets.mul(world.coord("x"), world.coord("x"))}
    )
    bad2 = ChevalleyCochain(world, 2, {("x", "x"): s2}, 0)
    try:
        validate_lc_component(world, bad2, total_degree=1)
        assert False, "expected a degree rejection"
    except ValueError:
        pass


# -- morphisms ------------------------------------------------------------------------


def test_morphism_residuals_mixed_family():
    world = four_gen_world()
    jets = world.jets
    X, Y = world.coord("x"), world.coord("y")
    XI, ET = world.coord("xi"), world.coord("et")
    P = ChiralInftyAlgebroid(world)
    b1 = ChevalleyCochain(world, 1, {("x",): {(): jets.mul(X, Y)}}, 0)
    s2 = symmetrized_seed(
        world, ("x", "xi"), {(): jets.mul(X, X)}
    )
    b2 = ChevalleyCochain(world, 2, {("x", "xi"): s2}, 1)
    s3 = symmetrized_seed(world, ("x", "x", "x"), {((1, 1),): jets.mul(XI, ET)})
    b3 = ChevalleyCochain(world, 3, {("x", "x", "x"): s3}, 0)
    rep = chiral_infty_morphism(P, {1: b1, 2: b2, 3: b3})
    assert rep["ok"], rep["failures"][:1]
    assert rep["residual_matches_differential"]
    assert rep["exact_target"]  # the family is not closed


def test_morphism_beta1_only_trivial_differential_reduces():
    """Over a differential-free base the morphism is a plain relabeling."""
    world = even_world(2)
    jets = world.jets
    b1 = ChevalleyCochain(
        world,
        1,
        {("x1",): {(): jets.mul(world.coord("x1"), world.coord("x2"))}},
        0,
    )
    P = ChiralInftyAlgebroid(world)
    rep = chiral_infty_morphism(P, {1: b1})
    assert rep["ok"] and rep["residual_matches_differential"]
    # by hand: the residual of the equation against P itself at arity 2
    # is the commutator correction of xi -> xi + beta(xi)
    d = lc_d(world, {1: b1})
    args = [world.tau("x1"), world.tau("x2")]
    res = morphism_residual(P, P, {1: b1}, args)
    want = lp_normal(d[2](*args)) if 2 in d else {}
    assert lp_normal(res) == want


def test_form_functor_morphism_identity():
    """An exact 3-form twist is conjugate to the standard algebroid."""
    world = even_world()
    forms = FormAlgebra(world.base)
    beta = forms.mul(
        forms.inject(world.base.gen("x1")), dform(forms, "x2", "x3")
    )
    omega = forms.derham_d(beta)
    rep = graded_form_functor(world, alpha0=omega, beta0=beta)
    assert rep["ok"]
    P = ChiralInftyAlgebroid(world)
    mrep = chiral_infty_morphism(P, {1: rep["beta"]})
    assert mrep["ok"] and mrep["residual_matches_differential"]
    # the differential of beta is exactly the alpha of d(beta)
    d = lc_d(world, {1: rep["beta"]})
    assert sorted(d) == [2]
    samples = default_field_samples(world)
    for args in samples:
        if len(args) != 2:
            continue
        got = lp_normal(d[2](*args))
        want = lp_normal(rep["alpha"](*args))
        assert got == want
