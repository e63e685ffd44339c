import os
from pathlib import Path

import pytest

import riskctl

MODELS = Path(os.environ.get("RISKCTL_MODELS", Path(__file__).resolve().parents[2] / "models"))
FIXTURES = Path(os.environ.get("RISKCTL_FIXTURES", Path(__file__).resolve().parents[1] / "fixtures"))
DEMO = MODELS / "workcell"


@pytest.fixture(scope="module")
def demo():
    return riskctl.load_model([str(DEMO / "workcell.yap")])


@pytest.fixture(scope="module")
def design_space(demo):
    text = riskctl.inject((DEMO / "workcell.prism").read_text(), demo)
    return riskctl.build_mdp(text)


def test_model_basics(demo):
    assert demo.validate(synthesis=True) == []
    assert set(demo.factors) == {"HC", "HS"}
    again = riskctl.parse_model(demo.print(), "workcell.yap")
    assert again.equals(demo)


def test_parse_errors_are_exceptions():
    with pytest.raises(riskctl.ParseError):
        riskctl.parse_model("Activity a { successor ; }")


def test_gradients():
    g = riskctl.complete_matrix(["off", "idle"], [[0], [1, 0]])
    assert g == [[0, -1], [1, 0]]


def test_generation(demo):
    frags = demo.generate()
    assert "module" in frags["controller"]
    assert 'filter(avg, P=? [ !"ACCIDENT" W "SAFE" ], "ANYREC" & !"MISHAP")' in frags["policy_props"]


def test_solve_and_check(design_space, tmp_path):
    assert design_space.num_states < 50000
    assert "FINAL" in design_space.labels
    res = design_space.solve('multi(R{"effort"}max=? [ C ], R{"nuisance"}max=? [ C ])')
    assert res["kind"] == "pareto"
    assert len(res["points"]) == len(res["witnesses"]) >= 1
    policy = res["witnesses"][0]
    policy.export(str(tmp_path / "adv"))
    back = riskctl.import_policy(str(tmp_path / "adv.tra"), str(tmp_path / "adv.sta"), str(tmp_path / "adv.lab"))
    assert back.equals(policy)
    v = back.check('filter(avg, P=? [ !"ACCIDENT" W "SAFE" ], "ANYREC" & !"MISHAP")')
    assert 0.0 <= v <= 1.0
    assert v == policy.check('filter(avg, P=? [ !"ACCIDENT" W "SAFE" ], "ANYREC" & !"MISHAP")')


def test_bad_policy_rows():
    with pytest.raises(riskctl.AnalysisError):
        riskctl.parse_policy("2 2\n0 1 0.9\n1 1 1\n", "(x)\n0:(0)\n1:(1)\n", '0="init" 1="deadlock"\n0: 0\n')


def test_cli_entry(tmp_path):
    stem = tmp_path / "out" / "workcell"
    code = riskctl.run(["synthesise", "-m", str(DEMO / "workcell.yap"), "-t", str(DEMO / "workcell.prism"),
                        "-o", str(stem)])
    assert code == 0
    assert (tmp_path / "out" / "workcell_pol.props").exists()
    assert riskctl.run(["synthesise", "-m", str(DEMO / "workcell.yap"), "-t", str(DEMO / "workcell.prism"),
                        "-o", str(stem), "-f", "smv"]) == 2


def test_dot_outputs_parse(demo, design_space):
    pydot = pytest.importorskip("pydot")
    cobot = riskctl.load_model([str(p) for p in sorted((FIXTURES / "cobot").glob("*.yap"))])
    texts = [
        cobot.activity_dot("exchWrkp"),
        demo.activity_dot("setup"),
        demo.risk_dot(),
        design_space.dot(),
    ]
    for text in texts:
        graphs = pydot.graph_from_dot_data(text)
        assert graphs and len(graphs) == 1
        assert graphs[0].get_nodes() or graphs[0].get_edges()
