from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from fppgroups.estimators import FingerprintTransformer, QuotientPartition
from fppgroups.presentation import parse_presentation
from fppgroups.register import load_register


@pytest.fixture(scope="module")
def entries():
    from conftest import DATA
    return list(load_register(DATA / "toy_register.grp"))


def test_transformer_matrix(entries):
    ft = FingerprintTransformer(targets=("S3", "Q8"), torsion_width=2)
    X = ft.fit_transform(entries)
    assert X.dtype == np.int64 and X.shape == (9, 1 + 2 + 2)
    names = list(ft.get_feature_names_out())
    assert names == ["h1_free_rank", "h1_torsion_0", "h1_torsion_1", "quotients_S3", "quotients_Q8"]
    assert X[0].tolist() == [0, 2, 1, 1, 0]
    assert X[4].tolist() == [0, 2, 2, 0, 1]


def test_transformer_accepts_text_and_presentations():
    ft = FingerprintTransformer(targets=("S3",)).fit(["< a | a^2 >"])
    X = ft.transform(["< a | a^2 >", parse_presentation("< a, b | a^2, b^3, (a*b)^2 >")])
    assert X[:, -1].tolist() == [0, 1]


def test_transformer_validation(entries):
    with pytest.raises(TypeError):
        FingerprintTransformer().fit("< a | a >")
    with pytest.raises(ValueError):
        FingerprintTransformer().fit([])
    with pytest.raises(ValueError):
        FingerprintTransformer(targets=("S3", "S3")).fit(entries)
    with pytest.raises(ValueError):
        FingerprintTransformer(targets=("S3",), torsion_width=1).fit_transform(entries[4:5])
    with pytest.raises(Exception):
        FingerprintTransformer().transform(entries)


def test_partition_labels_and_predict(entries):
    qp = QuotientPartition(tier="full").fit(entries)
    assert qp.labels_.tolist() == [0, 0, 1, 1, 2, 3, 4, 5, 6]
    assert qp.report_.class_count == 7
    new = [parse_presentation("< u | u^3 >"), parse_presentation("< u | u^5 >")]
    assert qp.predict(new).tolist() == [6, -1]
    assert qp.fit_predict(entries).tolist() == qp.labels_.tolist()


def test_estimators_follow_sklearn_conventions(entries):
    qp = QuotientPartition(tier="h1", jobs=1)
    assert clone(qp).get_params() == qp.get_params()
    assert not hasattr(qp, "labels_")
    pipe = make_pipeline(FingerprintTransformer(targets=("S3",)))
    assert pipe.fit_transform(entries).shape == (9, 6)


def test_cache_dir_gives_identical_results(tmp_path, entries):
    a = FingerprintTransformer(targets=("S3", "A4"), cache_dir=str(tmp_path)).fit_transform(entries)
    b = FingerprintTransformer(targets=("S3", "A4"), cache_dir=str(tmp_path)).fit_transform(entries)
    assert np.array_equal(a, b)
