# coding: utf-8

# # Formulas, shifts and transfer instances

# In[1]:

from stratlab.formulas import free_variables, gt_instance, ho_instance, parse_formula, render, shift_up


# Formulas quantify over levels `S{...}`. Parsing and rendering round-trip.

# In[2]:

f = parse_formula("A x in S{0}. E y in S{0,1}. I{0}{1}(x) = y")
print(render(f))
print(sorted(free_variables(parse_formula("A x in S{0}. x = y"))))


# Shifting by r moves every label up by r scales.

# In[3]:

print(render(shift_up(parse_formula("I{0}{1}(x) = y"), 2)))


# The homogeneity instance relates a formula to its shift along an embedding.

# In[4]:

print(render(ho_instance(parse_formula("v in S{0}"), 1, {0})))


# The transfer instance for a pure membership formula:

# In[5]:

print(render(gt_instance(parse_formula("v = v"), {2})))
