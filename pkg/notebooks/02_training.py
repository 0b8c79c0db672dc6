"""
Learning costs from solved cases
================================

A synthetic expert ranks candidates with a hidden cost model. Greedy
random-restart search over (alpha, ic, dc) per category tries to
reproduce those rankings, measured by mean Spearman rho.
"""

# %%
import numpy as np

from matchforge import TrainConfig, cross_validate, toy_taxonomy, train
from matchforge.learning import Evaluator, random_model
from matchforge.synthetic import count_summary, default_truth_model, generate_synthetic_dataset, load_domain_stats

graph = toy_taxonomy().precompute()
stats = load_domain_stats()
truth = default_truth_model()
print(truth)

# %%
# Six solved cases per domain, eight candidates each.
data = generate_synthetic_dataset(stats, graph, truth, n_offers=6, n_profiles_per_offer=8, seed=1)
print(len(data.offers), "offers,", len(data.profiles), "profiles,", len(data.cases), "cases")
for domain, cats in count_summary(data).items():
    print(domain, {c: round(v["requested"][0], 2) for c, v in cats.items()})

# %%
# A random model is a poor expert; the hidden one is perfect.
ev = Evaluator(data.cases, data.offers, data.profiles, graph)
print("truth objective", ev.objective(truth))
rng = np.random.default_rng(0)
print("random objective", round(ev.objective(random_model(ev.categories, rng)), 3))

# %%
# Train. Each restart has its own seed, so jobs>1 gives the same answer.
config = TrainConfig(max_iters=800, restarts=4, rng_seed=0)
report = train(data.cases, data.offers, data.profiles, graph, config, evaluator=ev)
print("best rho", round(report.best_rho, 4), "restart", report.best_restart, "iterations", report.iterations)
for it, rho in report.objective_history[-5:]:
    print(f"  iter {it:>5}  rho {rho:.4f}")
print(report.best_model)

# %%
# Only the ratios of costs matter for a ranking, so the learned parameters
# need not equal the hidden ones. Compare after normalising by skills ic.
def normalised(model):
    ref = model.costs("skills").ic or 1.0
    return {c: tuple(round(v / ref, 2) for v in (k.alpha, k.ic, k.dc)) for c, k in model.categories.items()}


print("truth  ", normalised(truth))
print("learned", normalised(report.best_model))

# %%
# Held-out performance with two folds.
folds = cross_validate(data.cases, data.offers, data.profiles, graph, TrainConfig(max_iters=400), 2)
for f in folds:
    print(f"fold {f.fold}: train {f.train_rho:.3f}  test {f.test_rho:.3f}")
