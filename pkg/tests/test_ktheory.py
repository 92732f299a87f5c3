"""Tests for the K-theory layer: structure matrices, base K-groups,
six-term steps, and classification reports."""

import json

import pytest
from conftest import seeded_rng

from ringkt.abgrp import GroupDescriptor, colimit, identified, mat_mul
from ringkt.errors import AmbiguityError, HypothesisError, InputError
from ringkt.ktheory import (
    RESULT_TAGS,
    ActionDescriptor,
    AmbiguityReport,
    GradedKGroup,
    classify_A,
    classify_B,
    even_subsets_graded_lex,
    exterior_graded_ranks,
    identity_action,
    involution_action,
    k_full_adele_Q,
    k_of_A0,
    k_of_A_truncated_Q,
    k_of_B0,
    kappa,
    kappa_inf,
    pv_step,
    rank_one_inclusion_matrix,
    rank_one_system,
    subsets_graded_lex,
)
from ringkt.numfield import parse_field


# ---------------------------------------------------------------------------
# subset bases
# ---------------------------------------------------------------------------


def test_subset_order():
    assert subsets_graded_lex(2) == [(), (1,), (2,), (1, 2)]
    assert subsets_graded_lex(3) == [
        (), (1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3),
    ]
    assert even_subsets_graded_lex(3) == [(), (1, 2), (1, 3), (2, 3)]
    assert len(subsets_graded_lex(5)) == 32
    assert len(even_subsets_graded_lex(5)) == 16


# ---------------------------------------------------------------------------
# structure matrices
# ---------------------------------------------------------------------------


def test_rank_one_matrices():
    assert rank_one_inclusion_matrix(2) == [[2, 1, 0], [0, 0, 1], [0, 0, 1]]
    assert rank_one_inclusion_matrix(3) == [[3, 1, 1], [0, 1, 0], [0, 0, 1]]
    assert rank_one_inclusion_matrix(5) == [[5, 2, 2], [0, 1, 0], [0, 0, 1]]
    # even multiplier 2d: first row (2d, d, d-1), the two projection rows agree
    for d in (2, 3, 4, 5, 10):
        m = rank_one_inclusion_matrix(2 * d)
        assert m == [[2 * d, d, d - 1], [0, 0, 1], [0, 0, 1]]


def test_kappa_inf_values():
    assert kappa_inf(3, 2) == (8, 2, 2, 2)
    assert kappa_inf(1, 7) == (7,)
    assert kappa_inf(2, 3) == (9, 1)
    n = 4
    subs = even_subsets_graded_lex(n)
    assert kappa_inf(n, 5) == tuple(5 ** (n - len(t)) for t in subs)


def test_kappa_dense_shapes():
    k = kappa(2, 2)
    assert k.size == 6
    dense = k.dense()
    # finite block collapses onto the empty-set column; mixing row hits the
    # unit class; infinite diagonal is d^(n - |T|)
    assert [row[0] for row in dense[:4]] == [1, 1, 1, 1]
    assert dense[4][:4] == [0, 2, 2, 2]
    assert dense[4][4] == 4 and dense[5][5] == 1
    k3 = kappa(2, 3)
    d3 = k3.dense()
    assert all(d3[i][i] == 1 for i in range(4))
    assert d3[4][:4] == [4, 4, 4, 4]  # (3^2 - 1) / 2
    assert d3[4][4] == 9 and d3[5][5] == 1


def test_kappa_composition_exact():
    rng = seeded_rng("kappa-compose")
    for _ in range(40):
        n = rng.randint(1, 4)
        a = rng.randint(2, 30)
        b = rng.randint(2, 30)
        lhs = kappa(n, a).compose(kappa(n, b))
        assert lhs == kappa(n, a * b)
        # composition is commutative
        assert kappa(n, b).compose(kappa(n, a)) == lhs


def test_kappa_sparse_matches_dense_product():
    rng = seeded_rng("kappa-dense")
    for _ in range(15):
        n = rng.randint(1, 3)
        a = rng.randint(2, 12)
        b = rng.randint(2, 12)
        sparse = kappa(n, a).compose(kappa(n, b)).dense()
        dense = mat_mul(kappa(n, a).dense(), kappa(n, b).dense())
        assert sparse == dense


def test_kappa_validation():
    with pytest.raises(InputError):
        kappa(0, 2)
    with pytest.raises(InputError):
        kappa(2, 1)
    with pytest.raises(InputError):
        kappa(1, 2).compose(kappa(2, 2))


def test_rank_one_system_matches_matrices():
    sys = rank_one_system()
    # canonical chain: step t uses multiplier t+1, i.e. the inclusion 2(t+1)
    for t in (1, 2, 3, 7):
        assert sys.matrix(t) == rank_one_inclusion_matrix(2 * (t + 1))
    rep = colimit(sys)
    assert str(rep.invariants) == "Z + Q"
    assert rep.relations == (((1, (1, 0, 0)), (1, (0, 2, 0))),)
    assert identified(sys, (1, (1, 0, 0)), (1, (0, 2, 0)))


# ---------------------------------------------------------------------------
# base K-groups (closed forms carry their own engine cross-check)
# ---------------------------------------------------------------------------


def test_k_of_B0_small():
    assert str(k_of_B0(1)) == "K0 = Q, K1 = Z"
    assert str(k_of_B0(2)) == "K0 = Z + Q, K1 = Q^2"
    assert str(k_of_B0(3)) == "K0 = Q^4, K1 = Z + Q^3"


def test_k_of_B0_closed_form_larger():
    for n in (4, 5, 6):
        g = k_of_B0(n, engine_check=False)
        total_q = g.k0.q_rank + g.k1.q_rank
        total_free = g.k0.free_rank + g.k1.free_rank
        assert total_q == 2 ** n - 1 and total_free == 1
        # the Z summand sits in degree n mod 2
        z_side = g.k0 if n % 2 == 0 else g.k1
        assert z_side.free_rank == 1
        assert z_side.q_rank == 2 ** (n - 1) - 1


def test_k_of_A0_small():
    assert str(k_of_A0(1)) == "K0 = Z + Q, K1 = 0"
    assert str(k_of_A0(2)) == "K0 = Z^2 + Q, K1 = 0"
    assert str(k_of_A0(3)) == "K0 = Z + Q^4, K1 = 0"


def test_k_of_A0_closed_form_larger():
    g = k_of_A0(4, engine_check=False)
    assert g.k0 == GroupDescriptor(free_rank=2, q_rank=7)
    assert g.k1.is_trivial
    g = k_of_A0(5, engine_check=False)
    assert g.k0 == GroupDescriptor(free_rank=1, q_rank=16)


def test_base_k_validation():
    for bad in (0, -1, "2"):
        with pytest.raises(InputError):
            k_of_B0(bad)
        with pytest.raises(InputError):
            k_of_A0(bad)


# ---------------------------------------------------------------------------
# six-term steps
# ---------------------------------------------------------------------------


def test_action_validation():
    g = GradedKGroup(GroupDescriptor.free(2), GroupDescriptor.zero())
    with pytest.raises(InputError):  # not unimodular
        ActionDescriptor.build(g, deg0={"z": [[2, 0], [0, 1]]})
    with pytest.raises(InputError):  # wrong shape
        ActionDescriptor.build(g, deg0={"z": [[1]]})
    gq = GradedKGroup(GroupDescriptor(q_rank=1), GroupDescriptor.zero())
    with pytest.raises(InputError):  # singular divisible block
        ActionDescriptor.build(gq, deg0={"q": [[0]]})
    gl = GradedKGroup(GroupDescriptor.localized((2,)), GroupDescriptor.zero())
    with pytest.raises(InputError):  # localized summands unsupported
        ActionDescriptor.build(gl)


def test_action_json_roundtrip():
    g = GradedKGroup(
        GroupDescriptor(free_rank=1, q_rank=1), GroupDescriptor.free(1)
    )
    act = ActionDescriptor.build(
        g,
        deg0={"z": [[1]], "q": [["1/2"]], "mix": [["1/3"]]},
        deg1={"z": [[-1]]},
    )
    again = ActionDescriptor.from_json(act.to_json_dict())
    assert again == act
    assert str(act.deg0.q_block[0][0]) == "1/2"


def test_involution_normal_form():
    # one six-term step of the order-two involution in both resolutions
    for m in (1, 2, 3):
        act = involution_action(m)
        res = pv_step(act.domain, act, resolution="elementary_divisors")
        half = 2 ** (m - 1)
        expected_coker = GroupDescriptor(free_rank=half, torsion=(2,) * half)
        assert res.coker0 == expected_coker
        assert res.coker1 == expected_coker
        assert res.ker0 == GroupDescriptor.free(half)
        expected_k = GroupDescriptor(free_rank=2 ** m, torsion=(2,) * half)
        assert res.k0 == expected_k and res.k1 == expected_k
        # the split is certified (free quotient), so require_split agrees
        strict = pv_step(act.domain, act)
        assert strict.k0 == expected_k and not strict.ambiguous


def test_pv_identity_action_doubles():
    g = GradedKGroup(
        GroupDescriptor(free_rank=2, torsion=(3,)), GroupDescriptor.free(1)
    )
    res = pv_step(g, identity_action(g), resolution="elementary_divisors")
    assert res.k0 == g.k0.direct_sum(g.k1)
    assert res.k1 == g.k1.direct_sum(g.k0)


def test_pv_divisible_halving_step():
    # the first adjoined generator over the rationals: acts by 1/2 on the
    # divisible part of K0 = Z + Q and kills it exactly
    g = GradedKGroup(GroupDescriptor(free_rank=1, q_rank=1), GroupDescriptor.zero())
    act = ActionDescriptor.build(g, deg0={"z": [[1]], "q": [["1/2"]]})
    res = pv_step(g, act)
    assert str(res.graded()) == "K0 = Z, K1 = Z"
    assert res.ker0 == GroupDescriptor.free(1)
    assert res.coker0 == GroupDescriptor.free(1)


def test_pv_mix_inside_image_is_supported():
    g = GradedKGroup(GroupDescriptor(free_rank=1, q_rank=1), GroupDescriptor.zero())
    act = ActionDescriptor.build(g, deg0={"z": [[1]], "q": [[2]], "mix": [[1]]})
    res = pv_step(g, act, resolution="elementary_divisors")
    assert str(res.k0) == "Z" and str(res.k1) == "Z"


def test_pv_residual_mixing_rejected():
    g = GradedKGroup(GroupDescriptor(free_rank=1, q_rank=1), GroupDescriptor.zero())
    act = ActionDescriptor.build(g, deg0={"z": [[1]], "q": [[1]], "mix": [[1]]})
    with pytest.raises(InputError, match="mixes into a direction"):
        pv_step(g, act)
    g2 = GradedKGroup(GroupDescriptor(free_rank=1, q_rank=2), GroupDescriptor.zero())
    act2 = ActionDescriptor.build(
        g2, deg0={"z": [[1]], "q": [[1, 0], [0, 2]], "mix": [[1], [0]]}
    )
    with pytest.raises(InputError):
        pv_step(g2, act2)


def test_pv_ambiguity_handling():
    # torsion quotient over a non-divisible subgroup: Z/2 by Z/2
    g = GradedKGroup(GroupDescriptor.free(1), GroupDescriptor(torsion=(2,)))
    act = ActionDescriptor.build(g, deg0={"z": [[-1]]})
    res = pv_step(g, act)
    assert isinstance(res.k0, AmbiguityReport)
    assert res.k0.sub == GroupDescriptor(torsion=(2,))
    assert res.k0.quot == GroupDescriptor(torsion=(2,))
    assert res.ambiguous
    with pytest.raises(AmbiguityError):
        res.graded()
    forced = pv_step(g, act, resolution="elementary_divisors")
    assert forced.k0 == GroupDescriptor(torsion=(2, 2))
    assert forced.k1 == GroupDescriptor(torsion=(2,))
    both = pv_step(g, act, resolution="report_both")
    assert isinstance(both.k0, AmbiguityReport)
    assert (both.coker0, both.ker1) == (
        GroupDescriptor(torsion=(2,)),
        GroupDescriptor(torsion=(2,)),
    )
    # JSON carries the pair either way
    blob = json.dumps(both.to_json_dict())
    assert "ambiguity" in blob


def test_pv_resolution_validation():
    g = GradedKGroup(GroupDescriptor.free(1), GroupDescriptor.zero())
    with pytest.raises(InputError):
        pv_step(g, identity_action(g), resolution="guess")
    with pytest.raises(InputError):
        pv_step(g, None)
    other = GradedKGroup(GroupDescriptor.free(2), GroupDescriptor.zero())
    with pytest.raises(InputError):
        pv_step(other, identity_action(g))


def test_pv_square_map_rank_balance():
    # for a square endomorphism the kernel and cokernel free ranks agree,
    # and the divisible nullities match on both sides
    rng = seeded_rng("pv-ranks")
    for _ in range(25):
        a = rng.randint(1, 4)
        z = [[1 if i == j else 0 for j in range(a)] for i in range(a)]
        for _ in range(rng.randint(0, 6)):
            i, j = rng.randrange(a), rng.randrange(a)
            if i != j:
                q = rng.randint(-3, 3)
                for c in range(a):
                    z[i][c] += q * z[j][c]
        g = GradedKGroup(GroupDescriptor.free(a), GroupDescriptor.zero())
        res = pv_step(g, ActionDescriptor.build(g, deg0={"z": z}),
                      resolution="elementary_divisors")
        assert res.ker0.free_rank == res.coker0.free_rank
        assert res.ker0.q_rank == res.coker0.q_rank == 0


def test_k_of_A_truncated_Q():
    for m in range(1, 6):
        g = k_of_A_truncated_Q(m)
        half = 2 ** (m - 1)
        assert g == GradedKGroup(
            GroupDescriptor.free(half), GroupDescriptor.free(half)
        )
    with pytest.raises(InputError):
        k_of_A_truncated_Q(0)


# ---------------------------------------------------------------------------
# exterior ranks and classification reports
# ---------------------------------------------------------------------------


def test_exterior_graded_ranks():
    assert exterior_graded_ranks(0, 0) == 1
    assert exterior_graded_ranks(0, 1) == 0
    for r in range(1, 12):
        assert exterior_graded_ranks(r, 0) == 2 ** (r - 1)
        assert exterior_graded_ranks(r, 1) == 2 ** (r - 1)
    with pytest.raises(InputError):
        exterior_graded_ranks(-1, 0)
    with pytest.raises(InputError):
        exterior_graded_ranks(3, 2)


def test_classify_B_rationals():
    q = parse_field("x - 1")
    gens = [q.parse_element(s) for s in ("2", "3", "5")]
    rep = classify_B(q, gens, truncate=3)
    assert rep.case == "odd-reals-even-signs"
    assert rep.formula(0) == "Lambda_odd(Gamma)"
    assert rep.formula(1) == "Lambda_even(Gamma)"
    assert rep.grading_offset == 1
    ranks = [(r["m"], r["k0_rank"], r["k1_rank"]) for r in rep.truncations]
    assert ranks == [(0, 0, 1), (1, 1, 1), (2, 2, 2), (3, 4, 4)]
    assert all(not r["torsion"]["k0"] and not r["torsion"]["k1"]
               for r in rep.truncations)


def test_classify_B_gaussian():
    qi = parse_field("x^2 + 1")
    rep = classify_B(qi)
    assert rep.case == "no-real-embedding"
    assert rep.formula(0) == "Lambda_even(Gamma)"
    assert rep.grading_offset == 0


def test_classify_B_real_quadratic():
    f = parse_field("x^2 - 2")
    rep = classify_B(f, [f.parse_element("1,1")])
    assert rep.case == "even-reals"
    assert rep.formula(0) == "(Z/2) (x) Lambda_even(Gamma)"
    assert rep.formula(1) == "(Z/2) (x) Lambda_odd(Gamma)"
    rows = classify_B(f, truncate=2).truncations
    assert [(r["m"], r["torsion"]["k0"]) for r in rows] == [
        (0, [2]), (1, [2]), (2, [2, 2]),
    ]


def test_classify_B_odd_sign_generator():
    f = parse_field("x^3 - 2")
    theta = f.parse_element("0,1")
    rep = classify_B(f, [theta])
    assert rep.case == "odd-reals-even-signs"  # theta > 0 at the real root
    minus = f.parse_element("-1,-1")  # -(1 + theta) < 0 there
    rep2 = classify_B(f, [theta, minus])
    assert rep2.case == "odd-reals-odd-sign"
    assert rep2.formula(0).startswith("(Z/2)")


def test_classify_B_insufficient_data():
    q = parse_field("x - 1")
    with pytest.raises(InputError, match="supply at least one generator"):
        classify_B(q)


def test_classify_A_cases():
    assert classify_A(parse_field("x - 1")).case == "odd-real-embeddings"
    assert classify_A(parse_field("x^3 - 2")).formula(0) == "Lambda_even(Gamma)"
    rep = classify_A(parse_field("x^2 - 2"))
    assert rep.case == "even-real-embeddings"
    assert rep.formula(0) == "Lambda_even(Gamma) + (Z/2) (x) Lambda_even(Gamma)"
    imag = parse_field("x^2 + 5")
    assert imag.roots_of_unity_order == 2
    rep = classify_A(imag, truncate=2)
    assert rep.case == "totally-imaginary-two-roots"
    assert rep.formula(0) == "Lambda_even(Gamma)^2"
    assert [(r["m"], r["k0_rank"], r["k1_rank"]) for r in rep.truncations] == [
        (0, 2, 0), (1, 2, 2), (2, 4, 4),
    ]


def test_classify_A_hypothesis_failure():
    with pytest.raises(HypothesisError, match="roots of unity"):
        classify_A(parse_field("x^2 + 1"))
    with pytest.raises(HypothesisError):
        classify_A(parse_field("x^2 + x + 1"))


def test_full_adele_report():
    rep = k_full_adele_Q(truncate=3)
    assert rep.algebra == "A_full_Q"
    assert rep.formula(0) == "Lambda_even(Gamma)^2"
    assert rep.formula(1) == "Lambda_odd(Gamma)^2"
    assert [(r["m"], r["k0_rank"], r["k1_rank"]) for r in rep.truncations] == [
        (0, 2, 0), (1, 2, 2), (2, 4, 4), (3, 8, 8),
    ]


def test_grading_offset_override():
    q = parse_field("x - 1")
    rep = classify_B(q, [q.parse_element("2")], grading_offset=0)
    assert rep.formula(0) == "Lambda_even(Gamma)"
    with pytest.raises(InputError):
        classify_B(q, [q.parse_element("2")], grading_offset=2)


def test_report_citations_registered():
    q = parse_field("x - 1")
    reports = [
        classify_B(q, [q.parse_element("2")]),
        classify_A(q),
        k_full_adele_Q(),
    ]
    for rep in reports:
        assert rep.citations
        for tag in rep.citations:
            assert tag in RESULT_TAGS
    res = pv_step(
        GradedKGroup(GroupDescriptor.free(1), GroupDescriptor.zero()),
        identity_action(
            GradedKGroup(GroupDescriptor.free(1), GroupDescriptor.zero())
        ),
    )
    for tag in res.citations:
        assert tag in RESULT_TAGS


def test_report_json_shape():
    f = parse_field("x^2 - 2")
    rep = classify_B(f, [f.parse_element("1,1")], truncate=1)
    blob = json.loads(json.dumps(rep.to_json_dict()))
    assert blob["algebra"] == "B"
    assert set(blob["components"]) == {"k0", "k1"}
    assert blob["truncations"][0]["m"] == 0
    assert blob["citations"] == [
        "classification-ring-algebra", "exterior-parity-ranks",
    ]
