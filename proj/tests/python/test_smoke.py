import itertools

import pytest

import structlearn as sl

TAGGED = """the\tD
dog\tN
runs\tV

a\tD
cat\tN
sleeps\tV

the\tD
cat\tN
runs\tV

a\tD
dog\tN
sleeps\tV
"""

CONLL = """1\tthe\t_\t_\tD\t_\t2\t_\t_\t_
2\tdog\t_\t_\tN\t_\t3\t_\t_\t_
3\truns\t_\t_\tV\t_\t0\t_\t_\t_

1\ta\t_\t_\tD\t_\t2\t_\t_\t_
2\tcat\t_\t_\tN\t_\t3\t_\t_\t_
3\tsleeps\t_\t_\tV\t_\t0\t_\t_\t_
"""

SVMLIGHT = """a 1:1 2:0.5
b 3:1 4:0.5
a 1:0.8 2:0.2
b 3:0.9 4:0.1
c 5:1
c 1:0.1 5:0.7
"""


@pytest.fixture
def files(tmp_path):
    paths = {"tsv": tmp_path / "train.tsv", "conll": tmp_path / "train.conll", "svm": tmp_path / "train.svm"}
    paths["tsv"].write_text(TAGGED)
    paths["conll"].write_text(CONLL)
    paths["svm"].write_text(SVMLIGHT)
    return paths


def test_viterbi_matches_enumeration():
    start = [0.5, -0.25, 0.0]
    transition = [[0.0, 1.0, -0.5], [0.25, 0.0, 0.75], [-1.0, 0.5, 0.0]]
    emission = [[1.0, 0.0, 0.5], [0.0, 0.75, 0.25], [0.5, 0.5, 1.0]]

    def score(path):
        s = start[path[0]] + sum(emission[t][k] for t, k in enumerate(path))
        return s + sum(transition[a][b] for a, b in zip(path, path[1:]))

    best = max(itertools.product(range(3), repeat=3), key=score)
    assert sl.viterbi(start, transition, emission) == list(best)


def test_chu_liu_edmonds_matches_enumeration():
    scores = [[0, 5, 1, 1], [0, 0, 11, 4], [0, 10, 0, 5], [0, 9, 8, 0]]

    def score(heads):
        return sum(scores[h][m] for m, h in enumerate(heads, start=1))

    trees = [list(h) for h in itertools.product(range(4), repeat=3) if sl.is_valid_tree(list(h))]
    heads = sl.chu_liu_edmonds(scores)
    assert sl.is_valid_tree(heads)
    assert score(heads) == max(score(t) for t in trees)
    assert not sl.is_valid_tree([2, 1, 0])


def test_losses():
    assert sl.hamming_loss([0, 1, 2], [0, 2, 2]) == 1
    assert sl.attachment_loss([0, 1], [2, 0]) == 2
    with pytest.raises(sl.ContractError):
        sl.hamming_loss([0], [0, 1])


@pytest.mark.parametrize("algo", [sl.Algorithm.perceptron, sl.Algorithm.dcd, sl.Algorithm.demidcd])
def test_tagger_fit_predict_roundtrip(tmp_path, algo):
    sentences = [["the", "dog", "runs"], ["a", "cat", "sleeps"]]
    tags = [["D", "N", "V"], ["D", "N", "V"]]
    tagger = sl.SequenceTagger()
    report = tagger.fit(sentences, tags, algo=algo, config=sl.LearnerConfig(epochs=10, threads=2, seed=1))
    assert report.epochs and report.to_csv().startswith("#")
    assert tagger.predict(["a", "dog", "runs"]) == ["D", "N", "V"]
    tagger.save(tmp_path / "m.bin")
    loaded = sl.SequenceTagger.load(tmp_path / "m.bin")
    assert loaded.tags == tagger.tags
    assert loaded.predict(["the", "cat", "sleeps"]) == ["D", "N", "V"]


def test_parser_and_classifier(files, tmp_path):
    parser = sl.DependencyParser()
    parser.fit_file(files["conll"], config=sl.LearnerConfig(epochs=20))
    assert parser.uas(files["conll"]) == 1.0
    assert sl.is_valid_tree(parser.predict(["the", "cat", "sleeps"], ["D", "N", "V"]))

    clf = sl.MulticlassClassifier()
    clf.fit_file(files["svm"], algo=sl.Algorithm.dcd, config=sl.LearnerConfig(C=1.0))
    assert clf.labels == ["a", "b", "c"]
    assert clf.accuracy(files["svm"]) == 1.0
    assert clf.predict({"3": 1.0, "unseen": 2.0}) == "b"

    clf.save(tmp_path / "clf.bin")
    with pytest.raises(sl.ModelMismatch):
        sl.SequenceTagger.load(tmp_path / "clf.bin")


def test_errors_map_to_exceptions(files, tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"not a model")
    with pytest.raises(sl.ParseError):
        sl.DependencyParser.load(bad)
    with pytest.raises(sl.ContractError):
        sl.LearnerConfig(C=-1.0).validate(sl.Algorithm.dcd)
    empty = tmp_path / "empty.tsv"
    empty.write_text("")
    with pytest.raises(sl.StructlearnError):
        sl.SequenceTagger().fit_file(empty)


def test_cli_in_process(files, tmp_path):
    model = tmp_path / "tagger.bin"
    code, out, _ = sl.run_cli(["train", "--task", "sequence", "--train", str(files["tsv"]), "--model", str(model)])
    assert code == 0 and "trained" in out
    code, out, _ = sl.run_cli(["predict", "--task", "sequence", "--test", str(files["tsv"]), "--model", str(model)])
    assert code == 0 and out.splitlines()[0] == "the\tD"
    code, _, err = sl.run_cli(["predict", "--task", "deptree", "--test", str(files["conll"]), "--model", str(model)])
    assert code == 4 and err
    assert sl.run_cli(["train", "--bogus"])[0] == 64
