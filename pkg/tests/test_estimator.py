import subprocess
import sys

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

import peggsearch
from peggsearch.search import Exhausted


def test_sklearn_is_loaded_lazily():
    code = "import sys, peggsearch; print('sklearn' in sys.modules)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_search_estimator():
    est = peggsearch.PeggSearch(exps=(3, 3, 4), s_max=1 << 28, min_pegg=2)
    assert clone(est).get_params()["s_max"] == 1 << 28
    with pytest.raises(NotFittedError):
        est.search()
    est.fit()
    assert 9 in est.coefficients_["ax_minus_cz"]
    rec = est.search()
    assert rec.report.pegg_value == 14
    assert [r.report.pegg_value for r in est.search_all()] == [14]
    est.set_params(s_max=1 << 34).fit()
    assert [r.pegg_value for r in est.ladder()] == [14, 21]
    est.set_params(s_max=1 << 27).fit()
    assert isinstance(est.search(), Exhausted)


def test_search_estimator_validates_params():
    with pytest.raises(ValueError):
        peggsearch.PeggSearch(exps="3,3").fit()
    with pytest.raises(TypeError):
        peggsearch.PeggSearch(s_max=2.5).fit()
    with pytest.raises(ValueError):
        peggsearch.PeggSearch(permutations="ax_minus_cz,nope").fit()


def test_converter_transform():
    conv = peggsearch.PeggConverter()
    out = conv.fit_transform(["23^3 + 9*14^4 = 71^3", "5^3 + 427^3 = 60073*6^4"])
    assert [o["report"].pegg_value for o in out] == [14, 5]
    assert out[0]["violations"] == []
    moved = peggsearch.PeggConverter(reassociate=True, s_max=1 << 400).transform(
        ["5^3 + 427^3 = 60073*6^4"])
    assert moved[0]["report"].pegg_value == 6
    with pytest.raises(ValueError):
        peggsearch.PeggConverter(reassociate=True).transform(["23^3 + 9*14^4 = 71^3"])
    with pytest.raises(TypeError):
        conv.transform("23^3 + 9*14^4 = 71^3")


def test_unknown_attribute():
    with pytest.raises(AttributeError):
        peggsearch.NoSuchThing
