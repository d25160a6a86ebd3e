"""Writes sample.Mx_1x1.txt: a synthetic death-rate table in HMD Mx_1x1
layout (Gompertz-Makeham schedule, period improvement, excess mortality for
the 1930-1935 and 1925 birth cohorts, a few missing old-age cells)."""
import math
from pathlib import Path


def rate(year, age, sex_factor):
    m = 0.0004 + 0.00002 * math.exp(0.095 * age)
    if age == 0:
        m += 0.02
    m *= math.exp(-0.012 * (year - 1960))
    cohort = year - age
    if 1930 <= cohort <= 1935:
        m *= 1.06
    if cohort == 1925:
        m *= 1.04
    return m * sex_factor


def fmt(v, width):
    return f"{'.':>{width}}" if v is None else f"{v:>{width}.6f}"


def main():
    lines = [
        "Synthetic Land, Death rates (period 1x1), \tLast modified: 01 Jan 2026; "
        "Methods Protocol: v6 (2017)",
        "",
        "  Year          Age             Female            Male           Total",
    ]
    for year in range(1960, 2000):
        for age in range(0, 111):
            label = "110+" if age == 110 else str(age)
            f, m, t = rate(year, age, 0.85), rate(year, age, 1.15), rate(year, age, 1.0)
            if year < 1963 and age >= 108:
                f = m = t = None
            lines.append(f"{year:>6}{label:>13}{fmt(f, 19)}{fmt(m, 15)}{fmt(t, 15)}")
    Path(__file__).with_name("sample.Mx_1x1.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
