import pytest
from hypothesis import given, strategies as st

from floqsim.pauli import PauliString, two_qubit


letters = st.sampled_from(["I", "X", "Y", "Z"])


def random_pauli(draw, n=6):
    pairs = [(q, draw) for q in range(n)]
    return pairs


paulis = st.builds(
    lambda ls: PauliString.from_pairs(list(enumerate(ls))),
    st.lists(letters, min_size=1, max_size=8),
)


def test_identity_letters_never_stored():
    p = PauliString.from_pairs([(0, "I"), (3, "X"), (5, "I")])
    assert p.support == {3: "X"}


def test_commutation_basic():
    assert two_qubit(0, "Z", 1, "Z").commutes_with(two_qubit(0, "X", 1, "X"))
    assert not two_qubit(0, "Z", 1, "Z").commutes_with(two_qubit(1, "X", 2, "X"))
    assert two_qubit(0, "X", 1, "Y").commutes_with(PauliString({}))


@given(paulis, paulis)
def test_commutation_matches_clash_count(a, b):
    clashes = sum(
        1
        for q in set(a.support) & set(b.support)
        if a.support[q] != b.support[q]
    )
    assert a.commutes_with(b) == (clashes % 2 == 0)


@given(paulis, paulis)
def test_product_support(a, b):
    if not a.commutes_with(b):
        with pytest.raises(ValueError):
            _ = a * b
        return
    prod = a * b
    for q in set(a.support) | set(b.support):
        la, lb = a.support.get(q, "I"), b.support.get(q, "I")
        if la == lb:
            assert q not in prod.support
        elif la == "I":
            assert prod.support[q] == lb
        elif lb == "I":
            assert prod.support[q] == la
        else:
            assert prod.support[q] not in ("I", la, lb)


@given(paulis)
def test_self_product_is_identity(a):
    prod = a * a
    assert prod.support == {}
    assert prod.phase == 1


def test_sign_tracking():
    # (X0 Z1) * (Z0 X1) = (XZ)(ZX) = (-iY)(iY) = Y0 Y1 with +1
    a = two_qubit(0, "X", 1, "Z")
    b = two_qubit(0, "Z", 1, "X")
    prod = a * b
    assert prod.support == {0: "Y", 1: "Y"}
    assert prod.phase == 1
