#!/usr/bin/env python
# 5-smooth numbers: list the first few, then count far beyond what a list can hold
from smoothcount import count_smooth, generate_smooth

basis = (2, 3, 5)
print(list(generate_smooth(basis, 60)))

for e in (3, 6, 10, 30, 100):
    print(f"N(1e{e}) = {count_smooth(basis, 10**e)}")

# the stream and the nested floor-log count agree everywhere
members = list(generate_smooth(basis, 10**6))
print(len(members), count_smooth(basis, 10**6))
