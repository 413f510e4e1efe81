"""Smoke test for the ndcolor_py extension module."""

import json

import ndcolor_py as nd


def main():
    keep = nd.keep_value(10.0, 4.0, 2, 0.1)
    assert abs(keep - 10.0 * (1 - 0.01) ** 8) < 1e-12, keep

    rows = nd.schedule_csv(1e4, 0.5, 2).strip().splitlines()
    assert len(rows) > 1

    doc = nd.construct_t15ii(3)
    assert nd.chromatic(doc) == 4

    hg = nd.gen_hypergraph(40, 3, 6, seed=1)
    colors = nd.edge_color(hg, eps=0.5, seed=2)
    edges = json.loads(hg)["edges"]
    assert len(colors) == len(edges)
    for i, a in enumerate(edges):
        for j in range(i + 1, len(edges)):
            if set(a) & set(edges[j]):
                assert colors[i] != colors[j]

    try:
        nd.color(doc, eps=0.5)
        raise AssertionError("short lists accepted")
    except RuntimeError:
        pass
    report = json.loads(nd.color(nd.construct_t15ii(3, colors=6), eps=0.5, seed=0))
    assert report["verified"], report
    print("ok")


if __name__ == "__main__":
    main()
