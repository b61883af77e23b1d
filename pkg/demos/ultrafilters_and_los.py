# coding: utf-8

# # Finite ultrafilters and ultrapowers
#
# On a finite index set every ultrafilter is principal, so everything here can be
# checked by brute force.

# In[1]:

import itertools

from stratlab.uflab import (
    all_ultrafilters, check_coherence, digraph, los_check, los_sweep, parse_los_formula,
    pushforward, tensor, ultrapower,
)


# In[2]:

us = all_ultrafilters(range(3))
print([u.point for u in us])
print(us[1].family())


# Pushforward along a map and the tensor product.

# In[3]:

u = us[2]
print(pushforward({0: "a", 1: "b", 2: "a"}, u).point)
print(tensor(u, all_ultrafilters(range(2))[0]).point)
print(check_coherence(u, {0}, {0, 1}))


# Ultrapower of a small digraph, then Łoś for one formula and every pair of functions.

# In[4]:

m = digraph(3, [(0, 1), (1, 2)])
up = ultrapower(m, u)
phi = parse_los_formula("E y1. R(x1,y1)")
print(all(los_check(phi, fs, m, u, up) for fs in itertools.product(list(up.quotient), repeat=1)))


# The full sweep: every digraph on at most 3 nodes, every ultrafilter on at most 3 points.

# In[5]:

report = los_sweep(max_index=3, max_nodes=3)
print(report.formulas, f"{report.cases:,}", report.passed)
