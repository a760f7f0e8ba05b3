import json

import pytest

from focir.services.ecm_models import BranchParams, FoEcmParams


@pytest.fixture
def single_cpe():
    return FoEcmParams(r_inf=0.05, branches=(BranchParams(r=0.02, c=50.0, alpha=0.6),), ts=1.0)


@pytest.fixture
def two_cpe():
    return FoEcmParams(
        r_inf=0.01,
        branches=(BranchParams(r=0.02, c=100.0, alpha=0.4), BranchParams(r=0.05, c=500.0, alpha=0.8)),
        ts=1.0,
    )


@pytest.fixture
def randles_like():
    """One integer-order branch: the Randles circuit."""
    return FoEcmParams(r_inf=0.1, branches=(BranchParams(r=1.0, c=1.0, alpha=1.0),), ts=0.1)


@pytest.fixture
def write_json(tmp_path):
    def _write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path

    return _write
