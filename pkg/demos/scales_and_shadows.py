# coding: utf-8

# # Scales, levels and shadows
#
# Numbers live in the field of rational functions in w0, w1, ..., ordered so that
# every positive power of a higher scale beats everything built from the lower ones.

# In[1]:

from stratlab.numbers import classify, derivative, embed, in_level, parse_number, shadow, w


# In[2]:

x = parse_number("w1")
y = w(0) ** 3 + 5
print(x > y)  # w1 is unlimited relative to level {0}


# A number belongs to level `a` when only the scales in `a` occur in it.

# In[3]:

z = parse_number("w0 + 1/w1")
print(z.support(), in_level(z, {0}), in_level(z, {0, 1}))


# `classify(x, r)` looks at x from the first r scales; `shadow` strips the part that is
# infinitesimal from there.

# In[4]:

print(classify(z, 1))
print(shadow(z, 1))


# Embeddings rename scales along the order isomorphism between two labels.

# In[5]:

print(embed(parse_number("w0^2 + w1"), {0, 1}, {1, 3}))


# The derivative at a point is the shadow of a difference quotient with an increment
# from a new scale.

# In[6]:

print(derivative("x^3 - 2*x", 2))
print(derivative("1/(x - w0)", w(1)))
