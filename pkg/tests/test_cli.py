import json
import shutil

from chatrank.cli import main
from chatrank.dataset import load_dataset
from chatrank.eval.experiment import run_experiment
from chatrank.synthetic import bundled_path


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_evaluate_empty_judgments_exit_2(tmp_path, capsys):
    root = tmp_path / "data"
    shutil.copytree(bundled_path(), root)
    (root / "judgments.jsonl").write_text("")
    code, _, err = run(["evaluate", "--data", str(root)], capsys)
    assert code == 2 and "judgments" in err


def test_missing_input_names_path(tmp_path, capsys):
    code, _, err = run(["evaluate", "--data", str(tmp_path / "nowhere")], capsys)
    assert code == 2 and "nowhere" in err


def test_invalid_config_names_field(capsys):
    code, _, err = run(["evaluate", "--set", "ranker=magic"], capsys)
    assert code == 1 and "ranker" in err
    code, _, _ = run(["no-such-command"], capsys)
    assert code == 1


def test_rank_se_echoes_pool(capsys):
    code, out, _ = run(["rank", "--set", "ranker=se", "--user", "u0", "--query", "books-q0"], capsys)
    assert code == 0
    lines = [l for l in out.splitlines() if l.strip()]
    data = load_dataset(bundled_path())
    expected = sorted(data.se_ranks["books-q0"], key=lambda d: (data.se_ranks["books-q0"][d], d))
    got = [l.split("\t")[1] for l in lines]
    assert got == expected


def test_grid_cells_match_standalone(tmp_path, capsys):
    out_dir = tmp_path / "grid"
    code, _, _ = run(["grid", "--set", "source=chats", "--vary", "ranker=lm,bm25", "--vary", "scope=Dom,DomGen",
                      "--out-dir", str(out_dir)], capsys)
    assert code == 0
    data = load_dataset(bundled_path())
    cells = [("lm", "Dom"), ("lm", "DomGen"), ("bm25", "Dom"), ("bm25", "DomGen")]
    for i, (ranker, scope) in enumerate(cells):
        solo = run_experiment({"ranker": ranker, "source": "chats", "scope": scope}, data)
        assert (out_dir / f"cell-{i:02d}.jsonl").read_text() == solo.to_jsonl()
        assert (out_dir / f"cell-{i:02d}.txt").read_text() == solo.to_text()


def test_commands_are_idempotent(tmp_path, capsys):
    root = bundled_path()
    for i in range(2):
        assert main(["ingest", "--docs", str(root / "documents.jsonl"), "--out", str(tmp_path / f"stats{i}.json")]) == 0
        assert main(["build-model", "--user", "u1", "--source", "chats", "--scope", "Dom", "--domain", "books",
                     "--chats", str(root / "chats.jsonl"), "--out", str(tmp_path / f"model{i}.txt")]) == 0
        assert main(["spy", "--docs", str(root / "documents.jsonl"), "--domain", "travel",
                     "--out", str(tmp_path / f"spy{i}.tsv")]) == 0
        assert main(["domain-vector", "--vectors", str(root / "entity_vectors.txt"), "--seed", "ENTITY/Travel",
                     "--m", "5", "--out", str(tmp_path / f"dv{i}.txt")]) == 0
        assert main(["expand", "--model", str(tmp_path / f"model{i}.txt"),
                     "--annotations", str(root / "annotations.jsonl"), "--catalog", str(root / "catalog.jsonl"),
                     "--variant", "ne-all", "--out", str(tmp_path / f"exp{i}.txt")]) == 0
        assert main(["evaluate", "--set", "ranker=lm", "--set", "source=chats",
                     "--out", str(tmp_path / f"eval{i}")]) == 0
    capsys.readouterr()
    for stem in ("stats{}.json", "model{}.txt", "spy{}.tsv", "dv{}.txt", "exp{}.txt", "eval{}.jsonl", "eval{}.txt"):
        a = (tmp_path / stem.format(0)).read_bytes()
        assert a and a == (tmp_path / stem.format(1)).read_bytes()
    assert json.loads((tmp_path / "stats0.json").read_text())


def test_train_knrm_writes_model(tmp_path, capsys):
    out = tmp_path / "knrm.json"
    assert main(["train-knrm", "--set", "epochs=2", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["weights"]) == 11
