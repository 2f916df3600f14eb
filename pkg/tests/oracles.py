"""Independent reference values used by several test modules."""


def harer_zagier(g, n):
    """Number of genus-g gluings of a 2n-gon (one-face maps), the GUE moment
    <tr M^2n> coefficient of N^(n+1-2g)."""
    table = {}

    def eps(g, n):
        if g < 0 or n < 0 or 2 * g > n:
            return 0
        if n == 0:
            return 1 if g == 0 else 0
        key = (g, n)
        if key not in table:
            # (n+1) e_g(n) = 2(2n-1) e_g(n-1) + (n-1)(2n-1)(2n-3) e_{g-1}(n-2)
            v = 2 * (2 * n - 1) * eps(g, n - 1) + (n - 1) * (2 * n - 1) * (2 * n - 3) * eps(g - 1, n - 2)
            assert v % (n + 1) == 0
            table[key] = v // (n + 1)
        return table[key]
    return eps(g, n)
