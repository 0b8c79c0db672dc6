"""
Learned costs versus BM25
=========================

Train on one synthetic set, test on a fresh one, and compare each test
ranking with the one BM25 produces from the item labels alone.
"""

# %%
from matchforge.experiment import run_synthetic_experiment

result = run_synthetic_experiment(seed=0)
print(f"{result.seconds:.1f} s, train rho {result.report.best_rho:.3f}, test rho {result.test_rho:.3f}")

# %%
# Per-case comparison, one column per case; an asterisk marks p >= 0.05.
cmp = result.comparison
print(cmp.to_text())
print(f"wins {cmp.wins}  losses {cmp.losses}  ties {cmp.ties}")

# %%
# One test case in detail: the top of each ranking.
from matchforge.bm25 import rank_bm25  # noqa: E402
from matchforge.scoring import explain, rank_candidates  # noqa: E402
from matchforge.taxonomy import toy_taxonomy  # noqa: E402

graph = toy_taxonomy()
test = result.test_data
case = test.cases[0]
offer = test.offer_map()[case.offer_id]
cands = [test.profile_map()[p] for p in case.expert_ranking]
model = result.report.best_model
print("expert", list(case.expert_ranking)[:4])
print("model ", rank_candidates(offer, cands, model, graph).order[:4])
print("bm25  ", rank_bm25(offer, cands, labels=graph).order[:4])

# %%
# Why the expert's favourite wins: its edit trace.
labels = {cid: graph.label(cid) for cid in graph.nodes}
print(explain(offer, cands[0], model, graph).to_text(labels))

# %%
# Noisy experts: shuffle the lower half of every ranking a little.
noisy = run_synthetic_experiment(seed=0, tail_swaps=3)
print(f"noisy experts: test rho {noisy.test_rho:.3f}, wins {noisy.comparison.wins}/{len(noisy.comparison.cases)}")
