# coding: utf-8

# # Ramsey, densities and progressions

# In[1]:

from stratlab.combinatorics import (
    Coloring, all_colorings, find_homogeneous, find_k_ap, greedy_homogeneous, max_ap_free_subset,
    replay_side_conditions, upper_banach_density,
)


# Every two-coloring of the pairs of a 6-set has a monochromatic triangle; the pentagon
# coloring of a 5-set has none.

# In[2]:

print(all(find_homogeneous(c, 3) for c in all_colorings(6)))
print(find_homogeneous(Coloring.generated("pentagon", 2, 5), 3))


# The greedy construction behind the finite Ramsey argument:

# In[3]:

g = greedy_homogeneous(Coloring.generated("parity-sum", 2, 8))
print(g.a, g.sentinels, g.color, g.homogeneous_set)


# Replaying the side conditions of the embedding argument for small n and p.

# In[4]:

rep = replay_side_conditions(4, 2)
print(rep.passed, sorted(rep.clauses))


# Upper Banach density over windows of length at least 10:

# In[5]:

d = upper_banach_density(range(0, 100, 2), 10)
print(d.value, d.witness)


# Arithmetic progressions.

# In[6]:

print(find_k_ap((0, 2, 4, 6, 8), 5))
print(max_ap_free_subset(9, 3))
