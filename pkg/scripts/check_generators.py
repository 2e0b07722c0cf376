"""Print the relation deviations of every DF generator set, printed and repaired."""

from dfalgebra.df import GENERATOR_SETS, expected_casimir, verify_relations

seen = set()
for target, factory in GENERATOR_SETS.items():
    for variant in ("printed", "repaired"):
        for g in factory(variant):
            if g.name in seen:
                continue
            seen.add(g.name)
            rep = verify_relations(g)
            want = expected_casimir(g.name)
            devs = "  ".join(f"{k}={v:.2e}" for k, v in rep.deviations().items())
            verdict = "ok" if rep.passed(1e-12, want) else "FAIL"
            print(f"{verdict:4s} {g.name:26s} casimir={rep.casimir_value:.6f} (want {want:g})  {devs}")
