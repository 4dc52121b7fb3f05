"""Golden evaluation report for the eval fixture, computed with pytrec_eval.

Regenerate with:
    python3 tests/oracles/eval_oracle.py tests/data/eval_run.txt tests/data/eval_qrels.txt > tests/data/eval_golden.tsv

trec_eval orders documents by score, so the fixture run has strictly
decreasing scores per topic. Topics without a relevant judgment are left out
of per-topic values and means, matching the library.
"""
import collections
import sys

import pytrec_eval

METRICS = [("ndcg_cut_20", "ndcg_cut.20"), ("P_20", "P.20"), ("map", "map"), ("recall_1000", "recall.1000")]


def read_run(path):
    run = collections.defaultdict(dict)
    with open(path) as f:
        for line in f:
            t, _, d, _, s, _ = line.split()
            run[t][d] = float(s)
    return run


def read_qrels(path):
    qrels = collections.defaultdict(dict)
    with open(path) as f:
        for line in f:
            t, _, d, g = line.split()
            if int(g) >= 0:
                qrels[t][d] = int(g)
    return qrels


def main():
    run = read_run(sys.argv[1])
    qrels = read_qrels(sys.argv[2])
    topics = sorted((t for t in run if any(g >= 1 for g in qrels.get(t, {}).values())), key=int)
    ev = pytrec_eval.RelevanceEvaluator({t: qrels[t] for t in topics}, {"ndcg_cut.20", "P.20", "map", "recall.1000"})
    res = ev.evaluate({t: run[t] for t in topics})
    for name, key in METRICS:
        vals = [res[t][key.replace(".", "_")] for t in topics]
        for t, v in zip(topics, vals):
            print(f"{name}\t{t}\t{v:.6f}")
        print(f"{name}\tall\t{sum(vals) / len(vals):.6f}")


if __name__ == "__main__":
    main()
