"""Dense brute-force channel generator, written row by row from the PU
transition rules and the twenty HU arrival cases, for small configurations.

Kept deliberately naive: every state is a plain tuple, every rate is typed
out per case, and nothing is shared with the package's generator code.
"""

import math
from itertools import product

import numpy as np


def all_states(p, d_max):
    out = []
    for s in product(range(p.n_freq_sat + 1), range(p.n_freq_sat + 1),
                     range(p.n_freq_ter), range(p.n_freq_ter), range(p.n_freq_ter),
                     range(2), range(d_max + 1)):
        hs, hsu, pu, hb, hbu, pf1, d = s
        if hs + hsu > p.n_freq_sat or pu + hb + hbu > p.n_freq_ter - 1:
            continue
        if pf1 == 1 and d > 0:
            continue
        out.append(s)
    return sorted(out)


def _frac(a, b):
    return a / b if b > 0 else 0.0


def dense_generator(p, lam, p_loc, p_sat, p_bs, rates):
    """Return (states, Q) for params ``p`` and per-content inputs."""
    d_max = p.d_max if p.overlay else 1
    states = all_states(p, d_max)
    pos = {s: k for k, s in enumerate(states)}
    Q = np.zeros((len(states), len(states)))
    nft = p.n_freq_ter
    lpu = p.lambda_pu
    r_sat, r_bs, r_dev = p.r_sat, p.r_bs, p.r_dev
    cell = math.pi * p.r_bs_cell**2
    neighbours = math.floor(p.hu_density * math.pi * p.r_int**2)

    def add(src, dst, rate):
        if rate > 0:
            Q[pos[src], pos[dst]] += rate

    for s in states:
        hs, hsu, pu, hb, hbu, pf1, d = s
        idle_sat = p.n_freq_sat - hs - hsu
        idle_ter = (nft - 1) - pu - hb - hbu

        # PU activity
        if idle_ter > 0:
            add(s, (hs, hsu, pu + 1, hb, hbu, pf1, d), (nft - 1) * lpu / nft)
        if idle_ter == 0 and (nft - 1) - pu > 0:
            if hb > 0:
                add(s, (hs, hsu, pu + 1, hb - 1, hbu, pf1, d),
                    (nft - 1) * lpu / nft * hb / ((nft - 1) - pu))
            if hbu > 0:
                add(s, (hs, hsu, pu + 1, hb, hbu - 1, pf1, d),
                    (nft - 1) * lpu / nft * hbu / ((nft - 1) - pu))
        if pf1 == 0 and d == 0:
            add(s, (hs, hsu, pu, hb, hbu, 1, 0), lpu / nft)
        if d > 0:
            add(s, (hs, hsu, pu, hb, hbu, 1, 0), lpu / nft)
        if pu > 0:
            add(s, (hs, hsu, pu - 1, hb, hbu, pf1, d), pu * rates.mu_pu_ter)
        if pf1 > 0:
            add(s, (hs, hsu, pu, hb, hbu, 0, d), pf1 * rates.mu_pu_ter)

        # aggregate weights
        RS = r_sat * idle_sat
        RB = r_bs * idle_ter
        RD = r_dev * (1.0 if (0 < d < d_max) or (d == 0 and pf1 == 0) else 0.0)
        dev_off = r_dev == 0 or d == d_max or pf1 == 1

        h1 = (hs, hsu + 1, pu, hb, hbu, pf1, d)
        h2 = (hs, hsu, pu, hb, hbu + 1, pf1, d)
        h3 = (hs + 1, hsu, pu, hb, hbu, pf1, d)
        h4 = (hs, hsu, pu, hb + 1, hbu, pf1, d)
        h5 = (hs, hsu, pu, hb, hbu, pf1, d + 1)
        for i in range(len(lam)):
            if d < d_max:
                rx = max(0.0, cell - d * math.pi * p.r_int**2) / cell
                tx = max(0.0, cell - d * math.pi * (2 * p.r_int) ** 2) / cell
                pd = rx * tx * (1 - (1 - p_loc[i]) ** neighbours)
            else:
                pd = 0.0
            base = lam[i] * (1 - p_loc[i])
            S, B = p_sat[i], p_bs[i]
            g1 = g2 = 0.0
            if p.universal_source:
                g1 = (base * (1 - S) * (1 - B) * (1 - pd) * _frac(RS, RS + RB)                 # nowhere
                      + base * (1 - S) * B * (1 - pd)
                      * float((idle_ter == 0 or r_bs == 0) and idle_sat > 0 and r_sat > 0)    # BS only
                      + base * (1 - S) * (1 - B) * pd * _frac(RS, RS + RB) * float(dev_off)   # devices only
                      + base * (1 - S) * B * pd
                      * float(RB + RD == 0 and idle_sat > 0 and r_sat > 0))                   # BS and devices
                g2 = (base * (1 - S) * (1 - B) * (1 - pd) * _frac(RB, RS + RB)                 # nowhere
                      + base * S * (1 - B) * (1 - pd)
                      * float((idle_sat == 0 or r_sat == 0) and idle_ter > 0 and r_bs > 0)    # satellite only
                      + base * (1 - S) * (1 - B) * pd * _frac(RB, RS + RB) * float(dev_off)   # devices only
                      + base * S * (1 - B) * pd
                      * float(RS + RD == 0 and idle_ter > 0 and r_bs > 0))                    # satellite and devices
            g3 = (base * S * (1 - B) * (1 - pd) * float(idle_sat > 0 and r_sat > 0)           # satellite only
                  + base * S * B * (1 - pd) * _frac(RS, RS + RB)                              # satellite and BS
                  + base * S * (1 - B) * pd * _frac(RS, RS + RD)                              # satellite and devices
                  + base * S * B * pd * _frac(RS, RS + RB + RD))                              # everywhere
            g4 = (base * (1 - S) * B * (1 - pd) * float(idle_ter > 0 and r_bs > 0)            # BS only
                  + base * S * B * (1 - pd) * _frac(RB, RS + RB)                              # satellite and BS
                  + base * (1 - S) * B * pd * _frac(RB, RB + RD)                              # BS and devices
                  + base * S * B * pd * _frac(RB, RS + RB + RD))                              # everywhere
            g5 = (base * (1 - S) * (1 - B) * pd * float(r_dev > 0)
                  * (float(0 < d < d_max) + float(d == 0 and pf1 == 0))                       # devices only
                  + base * S * (1 - B) * pd * _frac(RD, RS + RD)                              # satellite and devices
                  + base * (1 - S) * B * pd * _frac(RD, RB + RD)                              # BS and devices
                  + base * S * B * pd * _frac(RD, RS + RB + RD))                              # everywhere
            for dst, g in ((h1, g1), (h2, g2), (h3, g3), (h4, g4), (h5, g5)):
                if g > 0:
                    add(s, dst, g)

        # HU departures
        if hsu:
            add(s, (hs, hsu - 1, pu, hb, hbu, pf1, d), hsu * rates.mu_hu_sat_u)
        if hbu:
            add(s, (hs, hsu, pu, hb, hbu - 1, pf1, d), hbu * rates.mu_hu_bs_u)
        if hs:
            add(s, (hs - 1, hsu, pu, hb, hbu, pf1, d), hs * rates.mu_hu_sat)
        if hb:
            add(s, (hs, hsu, pu, hb - 1, hbu, pf1, d), hb * rates.mu_hu_bs)
        if d:
            add(s, (hs, hsu, pu, hb, hbu, pf1, d - 1), d * rates.mu_hu_d2d)

    np.fill_diagonal(Q, -Q.sum(axis=1))
    return states, Q
