"""
Transformation cost between an offer and a profile
==================================================

Items of one category are matched as sets: an offer item is either
matched exactly, replaced by a taxonomy neighbour, or inserted, and
leftover profile items are deleted. The cheapest such plan is an
assignment problem.
"""

# %%
# The bundled toy taxonomy: skills, education and languages.
from matchforge import CategoryCosts, CostModel, Item, shortest_path_len, toy_taxonomy
from matchforge.distance import brute_force_distance, category_distance

graph = toy_taxonomy().precompute()
print(graph)
for cat in graph.categories():
    print(f"{cat:<10} {len(graph.vocabulary(cat))} concepts")

# %%
# Path lengths drive substitution costs.
for a, b in [("java", "cpp"), ("c", "cpp"), ("java", "mysql"), ("java", "english")]:
    print(f"{a:>6} -> {b:<8} {shortest_path_len(graph, a, b)}")

# %%
# Five requested skills against four offered ones, unit costs, only direct
# neighbours substitutable.
unit = CostModel({"skills": CategoryCosts(1.0, 1.0, 1.0)}, path_cutoff=1)
offer = [Item(c, "skills") for c in ("java", "cpp", "mysql", "forklift", "copywriting")]
profile = [Item(c, "skills") for c in ("java", "c", "sql", "litigation")]
cost, script = category_distance(offer, profile, unit, graph, "skills")
print("cost", cost)
for op in script:
    print(f"  {op.kind:<10} {op.offer_concept or '-':<12} {op.profile_concept or '-':<12} {op.cost:g}")

# %%
# The exhaustive oracle agrees.
print("oracle", brute_force_distance(offer, profile, unit, graph, "skills"))

# %%
# A wider cutoff with a cheaper alpha: the plan keeps its shape here and
# only the substitutions get cheaper.
cheap = CostModel({"skills": CategoryCosts(0.25, 1.0, 1.0)}, path_cutoff=4)
cost, script = category_distance(offer, profile, cheap, graph, "skills")
print("cost", cost, {k: script.count(k) for k in ("match", "substitute", "insert", "delete")})

# %%
# Offer weights scale insertions and substitutions of the heavy item.
heavy = [Item("java", "skills", 3.0), Item("seo", "skills")]
for scheme in ("multiplicative", "additive"):
    m = CostModel({"skills": CategoryCosts(0.5, 1.0, 0.5)}, path_cutoff=2, weight_scheme=scheme)
    c, s = category_distance(heavy, [Item("cpp", "skills")], m, graph, "skills")
    print(scheme, c, [(op.kind, op.cost) for op in s])
