"""Where does the sympow psi stop being injective on the real line?

Configuration a = (1, -1), b = (1+t) a; psi restricted to [-1, 1] is monotone
exactly when it is injective there. Prints the first sign change of the
difference quotient for each t.
"""
import numpy as np

from arcwise.interp import psi_np


def first_fold(t, n=4001):
    a = np.array([1.0, -1.0], dtype=complex)
    b = (1 + t) * a
    x = np.linspace(-1, 1, n).astype(complex)
    y = psi_np(x, a, b, "sympow").real
    dy = np.diff(y)
    bad = np.nonzero(dy <= 0)[0]
    return None if bad.size == 0 else float(x[bad[0]].real)


def main():
    for t in np.linspace(-0.25, 0.25, 21):
        fold = first_fold(t)
        print(f"t = {t:+.3f}  " + ("monotone" if fold is None else f"fold near x = {fold:+.4f}"))


if __name__ == "__main__":
    main()
