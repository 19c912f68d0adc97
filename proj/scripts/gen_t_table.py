"""Regenerates the two-sided 95% Student t critical values used by harness/stats.cpp."""
from mpmath import mp, betainc, findroot, mpf
import scipy.stats as st

mp.dps = 40


def t_cdf(x, df):
    df = mpf(df)
    z = df / (df + x * x)
    return 1 - betainc(df / 2, mpf(1) / 2, 0, z, regularized=True) / 2


def t_ppf975(df):
    guess = mpf(st.t.ppf(0.975, df))
    return findroot(lambda x: t_cdf(x, df) - mpf("0.975"), guess)


if __name__ == "__main__":
    for df in range(1, 201):
        print(f"    {mp.nstr(t_ppf975(df), 20)},  // df = {df}")
