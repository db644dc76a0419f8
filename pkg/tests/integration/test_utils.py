from fractions import Fraction
import pytest
import damsenviet.pzf.utils as utils


def test_public_names_resolve():
    assert all(utils.__all__)
    for name in utils.__all__:
        assert hasattr(utils, name)


def test_mix64_matches_splitmix64():
    assert utils.mix64(0) == 0xE220A8397B1DCDAF


def test_derive_seed():
    assert utils.derive_seed(7) == 7
    assert utils.derive_seed(7, 3) == utils.derive_seed(7, 3)
    children = {utils.derive_seed(7, k) for k in range(100)}
    assert len(children) == 100
    assert utils.derive_seed(7, utils.trial_stream) != utils.derive_seed(7, utils.topup_stream)
    assert 0 <= utils.derive_seed(-1, 5) < 2 ** 64


def test_make_rng_is_reproducible():
    assert utils.make_rng(11).random(4).tolist() == utils.make_rng(11).random(4).tolist()


@pytest.mark.parametrize(
    "value, text", [(Fraction(8, 3), "8/3"), (Fraction(2), "2/1"), (Fraction(0), "0/1")]
)
def test_fraction_str(value, text):
    assert utils.fraction_str(value) == text


def test_bitmasks():
    assert utils.to_bitmask([0, 2, 5]) == 0b100101
    assert utils.from_bitmask(0b100101) == frozenset([0, 2, 5])
    assert utils.from_bitmask(0) == frozenset()


def test_expect():
    utils.expect("n", 3, "be positive", lambda n: n > 0)
    with pytest.raises(utils.IllegalValueException) as error:
        utils.expect("n", -3, "be positive", lambda n: n > 0)
    assert str(error.value) == "expected n -3 to be positive"
    assert error.value.value == -3
